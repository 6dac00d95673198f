use super::Liouvillian;
use crate::error::{Error, Result};
use crate::linalg::{unvectorize, vectorize, ComplexVector, DensityOperator, C64};

const STABILITY_BOUND: f64 = 0.1;
const DRIFT_LIMIT: f64 = 1e-6;
const CHECK_EVERY: usize = 256;

/// Largest step satisfying dt·‖L‖₁ ≤ 0.1.
pub fn stable_step(l: &Liouvillian) -> f64 {
    let norm = l.norm_one();
    if norm == 0.0 {
        f64::INFINITY
    } else {
        STABILITY_BOUND / norm
    }
}

/// Classical fixed-step RK4 integration of d(vec ρ)/dt = L vec ρ up to time `t`.
/// The step is shortened so that an integer number of steps lands on `t`.
pub fn propagate(l: &Liouvillian, rho0: &DensityOperator, t: f64, dt: f64) -> Result<DensityOperator> {
    if rho0.shape() != l.shape() {
        return Err(Error::DimensionMismatch("initial state and generator shapes differ".into()));
    }
    if !(t >= 0.0 && t.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("need t >= 0 and dt > 0, got t={t}, dt={dt}")));
    }
    if dt * l.norm_one() > STABILITY_BOUND * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("step {dt} exceeds stability bound {}", stable_step(l))));
    }
    let steps = (t / dt).ceil() as usize;
    let n = l.dim();
    let mut v = vectorize(rho0.matrix());
    if steps > 0 {
        let h = C64::new(t / steps as f64, 0.0);
        let m = l.matrix();
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let len = v.len();
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
            ComplexVector::zeros(len),
            ComplexVector::zeros(len),
            ComplexVector::zeros(len),
            ComplexVector::zeros(len),
            ComplexVector::zeros(len),
        );
        let half = h * 0.5;
        for step in 1..=steps {
            k1.gemv(one, m, &v, zero);
            tmp.copy_from(&v);
            tmp.axpy(half, &k1, one);
            k2.gemv(one, m, &tmp, zero);
            tmp.copy_from(&v);
            tmp.axpy(half, &k2, one);
            k3.gemv(one, m, &tmp, zero);
            tmp.copy_from(&v);
            tmp.axpy(h, &k3, one);
            k4.gemv(one, m, &tmp, zero);
            k2 *= C64::new(2.0, 0.0);
            k3 *= C64::new(2.0, 0.0);
            k1 += &k2;
            k1 += &k3;
            k1 += &k4;
            v.axpy(h / 6.0, &k1, one);
            if step % CHECK_EVERY == 0 || step == steps {
                let drift = trace_drift(&v, n);
                if !(drift <= DRIFT_LIMIT) {
                    return Err(Error::Instability { drift });
                }
            }
        }
    }
    let m = unvectorize(&v, n)?;
    DensityOperator::from_raw(&m, l.shape(), 1e-6)
}

fn trace_drift(v: &ComplexVector, n: usize) -> f64 {
    let tr: C64 = (0..n).map(|k| v[k * n + k]).sum();
    (tr - C64::new(1.0, 0.0)).norm()
}
