//! Dormand–Prince 5(4) integrator for complex linear amplitude equations.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Steps smaller than this abort with [`Error::StepUnderflow`].
    pub min_step: f64,
    pub max_steps: usize,
    /// Disable error control and march with this step.
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            min_step: 0.0,
            max_steps: 1_000_000,
            fixed_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrate y′ = f(t, y) from `t0` to `t1` in place.
///
/// `observe` is called after every accepted step with the new time and state.
pub fn dopri5<F, O>(
    f: F,
    t0: f64,
    t1: f64,
    y: &mut [Complex64],
    opts: &IntegratorOptions,
    mut observe: O,
) -> Result<Stats>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
    O: FnMut(f64, &[Complex64]),
{
    let n = y.len();
    let mut stats = Stats::default();
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(stats);
    }

    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];

    f(t0, y, &mut k[0]);
    stats.evaluations += 1;

    let mut t = t0;
    let mut h = match opts.fixed_step {
        Some(h) => h,
        None => initial_step(&f, t0, y, &k[0], opts, &mut stats).min(opts.max_step),
    }
    .min(span);

    let order_exp = 1.0 / 5.0;
    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let last = t + h >= t1 || (t1 - (t + h)) < 1e-12 * span;
        if last {
            h = t1 - t;
        }
        if h <= opts.min_step || t + h == t {
            return Err(Error::StepUnderflow { t, h });
        }

        stage(&mut tmp, y, h, &k, &[A21]);
        f(t + C2 * h, &tmp, &mut k[1]);
        stage(&mut tmp, y, h, &k, &[A31, A32]);
        f(t + C3 * h, &tmp, &mut k[2]);
        stage(&mut tmp, y, h, &k, &[A41, A42, A43]);
        f(t + C4 * h, &tmp, &mut k[3]);
        stage(&mut tmp, y, h, &k, &[A51, A52, A53, A54]);
        f(t + C5 * h, &tmp, &mut k[4]);
        stage(&mut tmp, y, h, &k, &[A61, A62, A63, A64, A65]);
        f(t + h, &tmp, &mut k[5]);
        stage(&mut y_new, y, h, &k, &[A71, 0.0, A73, A74, A75, A76]);
        f(t + h, &y_new, &mut k[6]);
        stats.evaluations += 6;

        let t_next = if last { t1 } else { t + h };

        if let Some(hf) = opts.fixed_step {
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            t = t_next;
            stats.accepted += 1;
            observe(t, y);
            h = hf;
            continue;
        }

        let mut err = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if err <= 1.0 {
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            t = t_next;
            stats.accepted += 1;
            observe(t, y);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-order_exp)).clamp(0.2, 5.0) };
            h = (h * fac).min(opts.max_step);
        } else {
            stats.rejected += 1;
            let fac = (0.9 * err.powf(-order_exp)).clamp(0.1, 1.0);
            h *= fac;
        }
    }
    Ok(stats)
}

fn stage(out: &mut [Complex64], y: &[Complex64], h: f64, k: &[Vec<Complex64>], a: &[f64]) {
    for i in 0..y.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, &coef) in a.iter().enumerate() {
            if coef != 0.0 {
                acc += coef * k[s][i];
            }
        }
        out[i] = y[i] + h * acc;
    }
}

fn initial_step<F>(
    f: &F,
    t0: f64,
    y: &[Complex64],
    f0: &[Complex64],
    opts: &IntegratorOptions,
    stats: &mut Stats,
) -> f64
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len() as f64;
    let scale: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let d0 = (y.iter().zip(&scale).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().zip(&scale).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(opts.max_step);
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![Complex64::new(0.0, 0.0); y.len()];
    f(t0 + h0, &y1, &mut f1);
    stats.evaluations += 1;
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&scale)
        .map(|((a, b), s)| ((a - b).norm() / s).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotate(t1: f64, opts: &IntegratorOptions) -> (Vec<Complex64>, Stats) {
        // y' = -i ω y, exact solution e^{-iωt}
        let w = 3.0;
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let stats = dopri5(
            |_, y, dy| dy[0] = Complex64::new(0.0, -w) * y[0],
            0.0,
            t1,
            &mut y,
            opts,
            |_, _| {},
        )
        .unwrap();
        (y, stats)
    }

    #[test]
    fn adaptive_matches_exponential() {
        let (y, stats) = rotate(10.0, &IntegratorOptions::default());
        let exact = Complex64::from_polar(1.0, -30.0);
        assert!((y[0] - exact).norm() < 1e-8, "{}", (y[0] - exact).norm());
        assert!(stats.accepted > 10);
    }

    #[test]
    fn fixed_step_converges_at_fifth_order() {
        let err = |h: f64| {
            let opts = IntegratorOptions {
                fixed_step: Some(h),
                ..Default::default()
            };
            let (y, _) = rotate(2.0, &opts);
            (y[0] - Complex64::from_polar(1.0, -6.0)).norm()
        };
        let ratio = err(0.05) / err(0.025);
        assert!(ratio > 25.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn underflow_is_reported() {
        let opts = IntegratorOptions {
            min_step: 1.0,
            max_step: 0.5,
            ..Default::default()
        };
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let r = dopri5(|_, y, dy| dy[0] = y[0], 0.0, 1.0, &mut y, &opts, |_, _| {});
        assert!(matches!(r, Err(Error::StepUnderflow { .. })));
    }

    #[test]
    fn step_budget_is_enforced() {
        let opts = IntegratorOptions {
            max_steps: 3,
            max_step: 0.01,
            ..Default::default()
        };
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let r = dopri5(|_, y, dy| dy[0] = -y[0], 0.0, 1.0, &mut y, &opts, |_, _| {});
        assert!(matches!(r, Err(Error::TooManySteps(3))));
    }
}
