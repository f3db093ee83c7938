//! Conjugate bases of the manifold: energy levels |j⟩_ν and temporal wave
//! packets |k⟩_τ, related by a quantum Fourier transform.
//!
//! Component convention: amplitude arrays transform with the kernel
//! e^{+i2πjk/d}/√d (energy → packet), so that the packet kets themselves are
//! |k⟩_τ = Σ_j e^{−i2πjk/d}/√d |j⟩_ν. Packet index k runs over the same
//! symmetric range as j.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{ManifoldSpec, SpectrumMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    Energy,
    Packet,
}

/// Complex amplitudes over the d levels of a manifold in one of the two bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeVector {
    pub values: Vec<Complex64>,
    pub basis: BasisTag,
}

impl AmplitudeVector {
    pub fn new(values: Vec<Complex64>, basis: BasisTag) -> Self {
        Self { values, basis }
    }

    /// Equal real amplitudes 1/√d.
    pub fn uniform(d: usize, basis: BasisTag) -> Self {
        let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        Self::new(vec![a; d], basis)
    }

    /// Unit amplitude on index `index` (j or k).
    pub fn basis_state(spec: &ManifoldSpec, index: i64, basis: BasisTag) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); spec.d()];
        values[spec.position(index)?] = Complex64::new(1.0, 0.0);
        Ok(Self::new(values, basis))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.norm_sqr()).collect()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &AmplitudeVector) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for c in &mut self.values {
                *c /= n;
            }
        }
        self
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub(crate) fn expect_basis(&self, basis: BasisTag) -> Result<()> {
        if self.basis != basis {
            return Err(Error::BasisMismatch {
                expected: basis,
                found: self.basis,
            });
        }
        Ok(())
    }

    pub(crate) fn expect_len(&self, d: usize) -> Result<()> {
        if self.values.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Fixed QFT matrices for one manifold size.
#[derive(Debug, Clone)]
pub struct TransformTable {
    d: usize,
    /// Packet-from-energy matrix, entry (k, j) = e^{+i2πjk/d}/√d.
    forward: DMatrix<Complex64>,
    /// Exact adjoint of `forward`.
    inverse: DMatrix<Complex64>,
}

impl TransformTable {
    pub fn new(spec: &ManifoldSpec) -> Self {
        let d = spec.d();
        let scale = 1.0 / (d as f64).sqrt();
        let idx: Vec<i64> = spec.j_range().collect();
        let forward = DMatrix::from_fn(d, d, |r, c| {
            let phase = (idx[c] * idx[r]).rem_euclid(d as i64) as f64;
            Complex64::from_polar(scale, 2.0 * PI * phase / d as f64)
        });
        let inverse = forward.adjoint();
        Self { d, forward, inverse }
    }

    /// Cached table for the manifold's size; tables depend only on d.
    pub fn shared(spec: &ManifoldSpec) -> Arc<TransformTable> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<TransformTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("transform cache poisoned");
        guard
            .entry(spec.d())
            .or_insert_with(|| Arc::new(TransformTable::new(spec)))
            .clone()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn forward(&self) -> &DMatrix<Complex64> {
        &self.forward
    }

    pub fn inverse(&self) -> &DMatrix<Complex64> {
        &self.inverse
    }

    pub fn apply_forward(&self, v: &[Complex64]) -> Vec<Complex64> {
        mat_vec(&self.forward, v)
    }

    pub fn apply_inverse(&self, v: &[Complex64]) -> Vec<Complex64> {
        mat_vec(&self.inverse, v)
    }
}

pub(crate) fn mat_vec(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

/// Energy-basis components of the packet ket |k⟩_τ, straight from its definition.
pub fn packet_ket(spec: &ManifoldSpec, k: i64) -> Result<AmplitudeVector> {
    spec.position(k)?;
    let d = spec.d() as f64;
    let values = spec
        .j_range()
        .map(|j| Complex64::from_polar(1.0 / d.sqrt(), -2.0 * PI * (j * k) as f64 / d))
        .collect();
    Ok(AmplitudeVector::new(values, BasisTag::Energy))
}

pub fn qft_energy_to_packet(b: &AmplitudeVector, spec: &ManifoldSpec) -> Result<AmplitudeVector> {
    b.expect_basis(BasisTag::Energy)?;
    b.expect_len(spec.d())?;
    let table = TransformTable::shared(spec);
    Ok(AmplitudeVector::new(table.apply_forward(&b.values), BasisTag::Packet))
}

pub fn iqft_packet_to_energy(b: &AmplitudeVector, spec: &ManifoldSpec) -> Result<AmplitudeVector> {
    b.expect_basis(BasisTag::Packet)?;
    b.expect_len(spec.d())?;
    let table = TransformTable::shared(spec);
    Ok(AmplitudeVector::new(table.apply_inverse(&b.values), BasisTag::Energy))
}

/// Free-evolution phases e^{−iω_j0 t} in storage order.
pub fn free_phases(spec: &ManifoldSpec, t: f64, mode: SpectrumMode) -> Vec<Complex64> {
    spec.detunings(mode)
        .into_iter()
        .map(|w| Complex64::from_polar(1.0, -w * t))
        .collect()
}

/// Wave-packet amplitudes b̃_k(t) = (1/√d) Σ_j b_j e^{−iω_j0 t} e^{i2πjk/d}.
///
/// `b` holds slowly varying (interaction-picture) energy amplitudes; the
/// overall e^{−iω_0 t} is not included.
pub fn packet_amplitudes_at(
    b: &AmplitudeVector,
    spec: &ManifoldSpec,
    t: f64,
    mode: SpectrumMode,
) -> Result<AmplitudeVector> {
    b.expect_basis(BasisTag::Energy)?;
    b.expect_len(spec.d())?;
    if !t.is_finite() {
        return Err(Error::InvalidPulse(format!("non-finite time {t}")));
    }
    let phased: Vec<Complex64> = b
        .values
        .iter()
        .zip(free_phases(spec, t, mode))
        .map(|(a, p)| a * p)
        .collect();
    let table = TransformTable::shared(spec);
    Ok(AmplitudeVector::new(table.apply_forward(&phased), BasisTag::Packet))
}

/// Inverse of [`packet_amplitudes_at`]: the interaction-picture energy
/// amplitudes whose packet amplitudes at time `t` are `bt`.
pub fn energy_amplitudes_from_packets(
    bt: &AmplitudeVector,
    spec: &ManifoldSpec,
    t: f64,
    mode: SpectrumMode,
) -> Result<AmplitudeVector> {
    bt.expect_basis(BasisTag::Packet)?;
    bt.expect_len(spec.d())?;
    let table = TransformTable::shared(spec);
    let values = table
        .apply_inverse(&bt.values)
        .into_iter()
        .zip(free_phases(spec, t, mode))
        .map(|(a, p)| a * p.conj())
        .collect();
    Ok(AmplitudeVector::new(values, BasisTag::Energy))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uniform_energy_is_core_packet() {
        let spec = ManifoldSpec::new(180, 8).unwrap();
        let b = AmplitudeVector::uniform(8, BasisTag::Energy);
        let bt = qft_energy_to_packet(&b, &spec).unwrap();
        for (pos, a) in bt.values.iter().enumerate() {
            let expect = if spec.index_at(pos) == 0 { 1.0 } else { 0.0 };
            assert!((a - c(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn delta_energy_is_flat_packets() {
        let spec = ManifoldSpec::new(180, 6).unwrap();
        let b = AmplitudeVector::basis_state(&spec, 0, BasisTag::Energy).unwrap();
        let bt = qft_energy_to_packet(&b, &spec).unwrap();
        for a in &bt.values {
            assert!((a - c(1.0 / 6f64.sqrt(), 0.0)).norm() < 1e-14);
        }
        let back = iqft_packet_to_energy(&bt, &spec).unwrap();
        assert!((back.values[spec.position(0).unwrap()] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn two_point_transform_is_hadamard() {
        let spec = ManifoldSpec::new(10, 2).unwrap();
        let table = TransformTable::new(&spec);
        let h = 1.0 / 2f64.sqrt();
        let expect = [[h, h], [h, -h]];
        for r in 0..2 {
            for col in 0..2 {
                assert!((table.forward()[(r, col)] - c(expect[r][col], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn packet_kets_match_inverse_columns() {
        for d in 2..=9 {
            let spec = ManifoldSpec::new(100, d).unwrap();
            for k in spec.j_range() {
                let ket = packet_ket(&spec, k).unwrap();
                let delta = AmplitudeVector::basis_state(&spec, k, BasisTag::Packet).unwrap();
                let via = iqft_packet_to_energy(&delta, &spec).unwrap();
                for (a, b) in ket.values.iter().zip(&via.values) {
                    assert!((a - b).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn time_zero_equals_fixed_dft() {
        let spec = ManifoldSpec::new(180, 5).unwrap();
        let b = AmplitudeVector::new(
            vec![c(0.1, 0.2), c(-0.3, 0.1), c(0.5, 0.0), c(0.2, -0.4), c(0.0, 0.3)],
            BasisTag::Energy,
        )
        .normalized();
        let a = packet_amplitudes_at(&b, &spec, 0.0, SpectrumMode::Exact).unwrap();
        let q = qft_energy_to_packet(&b, &spec).unwrap();
        assert_eq!(a, q);
    }

    #[test]
    fn tag_mismatch_is_rejected() {
        let spec = ManifoldSpec::new(180, 4).unwrap();
        let b = AmplitudeVector::uniform(4, BasisTag::Packet);
        assert!(matches!(
            qft_energy_to_packet(&b, &spec),
            Err(Error::BasisMismatch { .. })
        ));
        let short = AmplitudeVector::uniform(3, BasisTag::Energy);
        assert!(matches!(
            qft_energy_to_packet(&short, &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn columns_orthonormal() {
        for d in 2..=16 {
            let spec = ManifoldSpec::new(300, d).unwrap();
            let t = TransformTable::new(&spec);
            let prod = t.inverse() * t.forward();
            for r in 0..d {
                for col in 0..d {
                    let e = if r == col { 1.0 } else { 0.0 };
                    assert!((prod[(r, col)] - c(e, 0.0)).norm() < 1e-14);
                }
            }
        }
    }
}
