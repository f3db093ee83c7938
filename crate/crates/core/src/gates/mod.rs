//! Gate compilation: unitary → two-level ops → timed pulse schedule, and
//! verification of a schedule by simulation.

mod decompose;
mod schedule;
mod simulate;

pub use decompose::{
    as_shift, decompose_unitary, fuse_phases, max_entry_error, reconstruct, shift_matrix, unitarity_error, Mat2,
    TwoLevelOp, ELIMINATION_THRESHOLD, UNITARITY_TOLERANCE,
};
pub use schedule::{
    compile_two_level, compile_unitary, storage_factorisation, storage_rotation, Carrier, GateOptions,
    GateSchedule, Primitive, Timing,
};
pub use simulate::{
    average_fidelity, basis_state_fidelity, process_fidelity, process_matrix, run_schedule, simulate_schedule,
    PulseModel,
    SimulationOptions,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Haar-random d×d unitary from a seeded generator (Ginibre matrix, QR,
/// phases of R's diagonal divided out).
pub fn haar_unitary(d: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with(d, &mut rng)
}

pub fn haar_unitary_with<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..d {
        let p = r[(c, c)];
        let phase = if p.norm() > 0.0 { p / p.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_unitary_and_seeded() {
        let a = haar_unitary(5, 11);
        assert!(unitarity_error(&a) < 1e-12);
        assert_eq!(a, haar_unitary(5, 11));
        assert_ne!(a, haar_unitary(5, 12));
    }
}
