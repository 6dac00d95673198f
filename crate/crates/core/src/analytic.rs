//! Closed-form steady states, filtered states and success probabilities at
//! maximal temperature gradient (T_A = ∞, T_B = 0).
//!
//! Expressions are transcribed term by term rather than simplified.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BipartiteShape, ComplexMatrix, ComplexVector, DensityOperator, C64, I};
use crate::model::MachineSpec;

/// Coupling pattern of the qutrit machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QutritCouplings {
    /// g₁ = g₂ = g₃ = g.
    Equal,
    /// g₁ = g cos θ, g₂ = g sin θ, g₃ = 0.
    Theta { theta: f64 },
}

impl QutritCouplings {
    /// (g₁, g₂, g₃) for overall strength g.
    pub fn couplings(&self, g: f64) -> (f64, f64, f64) {
        match *self {
            QutritCouplings::Equal => (g, g, g),
            QutritCouplings::Theta { theta } => (g * theta.cos(), g * theta.sin(), 0.0),
        }
    }

    pub fn machine(&self, epsilon: f64, g: f64) -> Result<MachineSpec> {
        let (g1, g2, g3) = self.couplings(g);
        MachineSpec::qutrit(epsilon, g1, g2, g3)
    }
}

/// Filtered two-qubit state of the qutrit machine.
///
/// In the kept basis |01⟩, |02⟩, |11⟩, |12⟩ the populations are
/// 1 − r₁ − r₂ − r₃, r₃, r₂, r₁ and the only coherence is
/// ⟨02|ρ′|11⟩ = t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilteredQutritClosedForm {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub t: f64,
    pub g: f64,
    pub couplings: QutritCouplings,
    pub p_a: f64,
    pub p_b: f64,
}

impl FilteredQutritClosedForm {
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        let pops = [1.0 - self.r1 - self.r2 - self.r3, self.r3, self.r2, self.r1];
        for (k, p) in pops.into_iter().enumerate() {
            m[(k, k)] = C64::new(p, 0.0);
        }
        m[(1, 2)] = C64::new(self.t, 0.0);
        m[(2, 1)] = C64::new(self.t, 0.0);
        m
    }

    pub fn density(&self) -> Result<DensityOperator> {
        DensityOperator::new(self.matrix(), qubit_pair())
    }
}

fn qubit_pair() -> BipartiteShape {
    BipartiteShape { dim_a: 2, dim_b: 2 }
}

fn check_rates(p_a: f64, p_b: f64, g: f64) -> Result<()> {
    if !(p_a > 0.0 && p_b > 0.0 && g >= 0.0 && p_a.is_finite() && p_b.is_finite() && g.is_finite()) {
        return Err(Error::InvalidParameter(format!("need p_A, p_B > 0 and g >= 0, got p_A={p_a}, p_B={p_b}, g={g}")));
    }
    Ok(())
}

/// Filtered state of the qutrit machine at maximal gradient.
pub fn filtered_qutrit_state(
    g: f64,
    couplings: QutritCouplings,
    p_a: f64,
    p_b: f64,
) -> Result<FilteredQutritClosedForm> {
    check_rates(p_a, p_b, g)?;
    let (r1, r2, r3, t) = match couplings {
        QutritCouplings::Equal => {
            let den = 4.0 * p_a + 6.0 * p_b;
            (p_a / den, (p_a + 3.0 * p_b) / den, (p_a + 3.0 * p_b) / den, 3.0 * p_b / den)
        }
        QutritCouplings::Theta { theta } => {
            let g2 = g * g;
            let (c, s) = (theta.cos(), theta.sin());
            let c2t = (2.0 * theta).cos();
            let c4t = (4.0 * theta).cos();
            let den =
                (2.0 * p_a + 3.0 * p_b) * (-g2 * p_a * c4t + g2 * (p_a + 6.0 * p_b) + 6.0 * p_b * (p_a + p_b).powi(2));
            let r1 =
                2.0 * p_a * c * c * (-g2 * p_a * c2t + g2 * (p_a + 3.0 * p_b) + 3.0 * p_b * (p_a + p_b).powi(2)) / den;
            let r2 = 2.0
                * s
                * s
                * (p_a + 3.0 * p_b)
                * (g2 * p_a * c2t + g2 * (p_a + 3.0 * p_b) + 3.0 * p_b * (p_a + p_b).powi(2))
                / den;
            let r3 = 2.0
                * c
                * c
                * (p_a + 3.0 * p_b)
                * (-g2 * p_a * c2t + g2 * (p_a + 3.0 * p_b) + 3.0 * p_b * (p_a + p_b).powi(2))
                / den;
            let t = 3.0 * p_b * (2.0 * theta).sin() * (g2 * (p_a + 3.0 * p_b) + 3.0 * p_b * (p_a + p_b).powi(2)) / den;
            (r1, r2, r3, t)
        }
    };
    Ok(FilteredQutritClosedForm { r1, r2, r3, t, g, couplings, p_a, p_b })
}

/// First order in μ = p_A/p_B with g ≪ p_B, in the kept basis.
pub fn first_order_filtered_state(theta: f64, mu: f64) -> ComplexMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(mu * s * s / 3.0, 0.0);
    m[(1, 1)] = C64::new((1.0 - mu / 3.0) * c * c, 0.0);
    m[(2, 2)] = C64::new((1.0 - mu / 3.0) * s * s, 0.0);
    m[(3, 3)] = C64::new(mu * c * c / 3.0, 0.0);
    let coh = C64::new((1.0 - 2.0 * mu / 3.0) * c * s, 0.0);
    m[(1, 2)] = coh;
    m[(2, 1)] = coh;
    m
}

/// cos θ |02⟩ + sin θ |11⟩ in the kept basis; the μ → 0 limit of the
/// θ-family filtered state.
pub fn psi_theta(theta: f64) -> ComplexVector {
    let mut v = ComplexVector::zeros(4);
    v[1] = C64::new(theta.cos(), 0.0);
    v[2] = C64::new(theta.sin(), 0.0);
    v
}

/// (|02⟩ + |11⟩)/√2 in the kept basis.
pub fn psi_plus() -> ComplexVector {
    psi_theta(std::f64::consts::FRAC_PI_4)
}

/// Success probability of the qutrit filter at maximal gradient.
///
/// The θ-family uses the full four-term expression. For equal couplings
/// the expression below was derived from the same steady state; its μ → 0
/// limit is μ/3 and its g → 0 coefficient is twice the θ-family one.
pub fn qutrit_psuc(g: f64, couplings: QutritCouplings, p_a: f64, p_b: f64) -> Result<f64> {
    check_rates(p_a, p_b, g)?;
    let g2 = g * g;
    Ok(match couplings {
        QutritCouplings::Theta { theta } => {
            let c4t = (4.0 * theta).cos();
            let a = g2 * g2 * p_a * c4t * (p_a + p_b) * (p_a + 2.0 * p_b);
            let b = g2 * g2 * (p_a.powi(3) + 11.0 * p_a * p_a * p_b + 26.0 * p_a * p_b * p_b + 12.0 * p_b.powi(3));
            let c = 2.0 * g2 * p_b * (p_a + p_b).powi(2) * (4.0 * p_a * p_a + 15.0 * p_a * p_b + 6.0 * p_b * p_b);
            let d = 6.0 * p_a * p_b * p_b * (p_a + p_b).powi(4);
            2.0 * g2
                * p_a
                * (2.0 * p_a + 3.0 * p_b)
                * (g2 * p_a * c4t - g2 * (p_a + 6.0 * p_b) - 6.0 * p_b * (p_a + p_b).powi(2))
                / (9.0 * a - 9.0 * (b + c + d))
        }
        QutritCouplings::Equal => {
            4.0 * g2 * p_a * (2.0 * p_a + 3.0 * p_b)
                / (9.0 * (g2 * (2.0 * p_a * p_a + 9.0 * p_a * p_b + 4.0 * p_b * p_b) + p_a * p_b * (p_a + p_b).powi(2)))
        }
    })
}

/// Large-g limit μ/3 of the θ-family success probability.
pub fn psuc_small_mu(p_a: f64, p_b: f64) -> f64 {
    p_a / (3.0 * p_b)
}

/// Small-g limit 2(2p_A + 3p_B) g² / (9 p_B (p_A + p_B)²) of the θ-family success probability.
pub fn psuc_small_g(g: f64, p_a: f64, p_b: f64) -> f64 {
    2.0 * (2.0 * p_a + 3.0 * p_b) / (9.0 * p_b * (p_a + p_b).powi(2)) * g * g
}

/// Steady state of the (d+1)-level machine with every coupling equal to g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuditSteadyClosedForm {
    pub d: usize,
    pub g: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: C64,
    pub n: f64,
}

impl QuditSteadyClosedForm {
    pub fn new(d: usize, g: f64, p_a: f64, p_b: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("qudit machine needs d >= 2, got {d}")));
        }
        check_rates(p_a, p_b, g)?;
        let df = d as f64;
        let g2 = g * g;
        let c1 = (df + 1.0) * p_a * p_b * (p_a + p_b).powi(2)
            + 2.0 * g2 * ((df + 1.0).powi(2) * p_b * p_b + 2.0 * df * (df + 1.0) * p_a * p_b);
        let c2 = p_a * ((df + 1.0) * p_b * (p_a + p_b).powi(2) + 2.0 * (df + 1.0) * g2 * df * p_b);
        let c3 = I * ((df + 1.0) * g * p_a * p_b * (p_a + p_b));
        let n = (df + 1.0).powi(2)
            * (p_a * p_b * (p_a + p_b).powi(2) + 2.0 * g2 * (p_a * p_a + 2.0 * df * p_a * p_b + df * p_b * p_b));
        Ok(Self { d, g, p_a, p_b, c1, c2, c3, n })
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape { dim_a: self.d + 1, dim_b: self.d + 1 }
    }

    /// Residuals of the two scalar identities that certify stationarity.
    pub fn verification_residuals(&self) -> (C64, C64) {
        let (d, g, pa, pb) = (self.d as f64, self.g, self.p_a, self.p_b);
        let first = I * (g * self.c2 - 2.0 * d * (d + 1.0) * g.powi(3) * pa * pb) - self.c3 * (pa + pb);
        let second =
            I * (I * (2.0 * d * g * self.c3.im)) + C64::new(2.0 * d * (d + 1.0) * g * g * pa * pb * (pa + pb), 0.0);
        (first, second)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.d;
        let s = self.shape();
        let (g2, pa, pb) = (self.g * self.g, self.p_a, self.p_b);
        let df = d as f64;
        let mut m = ComplexMatrix::zeros(s.total(), s.total());
        let mut add = |r: usize, c: usize, v: C64| m[(r, c)] += v;
        for k in 0..=d {
            for l in 0..=d {
                add(s.index(k, l), s.index(k, l), C64::new(2.0 * g2 * pa * pa, 0.0));
            }
        }
        for k in 0..d {
            add(s.index(k, 0), s.index(k, 0), C64::new(self.c1, 0.0));
        }
        add(s.index(d, 0), s.index(d, 0), C64::new(self.c2, 0.0));
        let w = 2.0 * (df + 1.0) * g2 * pa * pb;
        for k in 0..d {
            add(s.index(k, d - k), s.index(k, d - k), C64::new(w, 0.0));
        }
        for k in 0..d {
            add(s.index(d, 0), s.index(k, d - k), self.c3);
            add(s.index(k, d - k), s.index(d, 0), self.c3.conj());
        }
        for k in 1..d {
            for l in 1..=d - k {
                let a = s.index(k + l - 1, d - k - l + 1);
                let b = s.index(k - 1, d - k + 1);
                add(a, b, C64::new(w, 0.0));
                add(b, a, C64::new(w, 0.0));
            }
        }
        m / C64::new(self.n, 0.0)
    }
}

/// Closed-form steady state of the uniform (d+1)-level machine whose
/// couplings all equal g.
pub fn qudit_steady_state(d: usize, g: f64, p_a: f64, p_b: f64) -> Result<DensityOperator> {
    let form = QuditSteadyClosedForm::new(d, g, p_a, p_b)?;
    DensityOperator::new(form.matrix(), form.shape())
}

/// Success probability as written with a level count `levels` and an
/// overall strength g.
pub fn eq12_psuc(levels: usize, g: f64, p_a: f64, p_b: f64) -> f64 {
    let d = levels as f64;
    let xi = 2.0 * (d - 1.0) * p_a * p_b + (d - 1.0) * p_b * p_b + p_a * p_a;
    (d - 1.0) * g * g * p_a * ((d - 1.0) * p_a + d * p_b) / (d * d * (g * g * xi + p_a * p_b * (p_a + p_b).powi(2)))
}

/// Filter success probability of the uniform (d+1)-level machine with
/// every coupling equal to `coupling`.
///
/// The written expression counts levels (d+1) and uses g = √2·coupling;
/// at d = 2 this is the θ = π/4 qutrit machine.
pub fn qudit_psuc(d: usize, coupling: f64, p_a: f64, p_b: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("qudit machine needs d >= 2, got {d}")));
    }
    check_rates(p_a, p_b, coupling)?;
    Ok(eq12_psuc(d + 1, SQRT_2 * coupling, p_a, p_b))
}

/// Non-negative Schmidt coefficients λ₀ … λ_{d−1} with Σλ² = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtTarget {
    lambdas: Vec<f64>,
}

impl SchmidtTarget {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::InvalidParameter("need at least two Schmidt coefficients".into()));
        }
        if lambdas.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter(format!("Schmidt coefficients must be >= 0: {lambdas:?}")));
        }
        let norm: f64 = lambdas.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("Schmidt coefficients have squared norm {norm}")));
        }
        Ok(Self { lambdas })
    }

    /// Rescales non-negative weights to unit norm.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        let norm = raw.iter().map(|l| l * l).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("Schmidt vector has zero norm".into()));
        }
        Self::new(raw.iter().map(|l| l / norm).collect())
    }

    pub fn maximally_entangled(d: usize) -> Result<Self> {
        Self::normalized(&vec![1.0; d])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn d(&self) -> usize {
        self.lambdas.len()
    }

    /// Σ λ_i |i, i⟩ on d × d.
    pub fn schmidt_vector(&self) -> ComplexVector {
        let d = self.d();
        let mut v = ComplexVector::zeros(d * d);
        for (i, &l) in self.lambdas.iter().enumerate() {
            v[i * d + i] = C64::new(l, 0.0);
        }
        v
    }

    /// The same state in the kept basis of the machine, where level k of A
    /// pairs with level d − k of B (kept index d − 1 − k).
    pub fn filtered_vector(&self) -> ComplexVector {
        let d = self.d();
        let mut v = ComplexVector::zeros(d * d);
        for (k, &l) in self.lambdas.iter().enumerate() {
            v[k * d + (d - 1 - k)] = C64::new(l, 0.0);
        }
        v
    }
}

/// Uniform-gap (d+1)-level machine with coupling g λ_k on |d,0⟩ ↔ |k, d−k⟩.
pub fn schmidt_machine(target: &SchmidtTarget, g: f64) -> Result<MachineSpec> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidParameter(format!("coupling must be positive, got {g}")));
    }
    let d = target.d();
    MachineSpec::qudit(vec![1.0; d], target.lambdas.iter().map(|l| g * l).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{reset_machine, steady_state};
    use crate::entfilter::{apply_filter, fidelity_target, FilterSpec};
    use crate::linalg::{max_abs_diff, vectorize, ComplexVector};
    use crate::model::Temperature;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn solve_qutrit(couplings: QutritCouplings, g: f64, p_a: f64, p_b: f64) -> (ComplexMatrix, f64) {
        let spec = couplings.machine(2.0, g).unwrap();
        let l = reset_machine(&spec, Temperature::Infinite, Temperature::ZERO, p_a, p_b).unwrap();
        let ss = steady_state(&l).unwrap();
        let (rho, p) = apply_filter(&ss.state, &FilterSpec::qutrit()).unwrap();
        (rho.into_matrix(), p)
    }

    #[test]
    fn equal_rates_give_tabulated_state() {
        let f = filtered_qutrit_state(0.01, QutritCouplings::Equal, 0.005, 0.005).unwrap();
        let m = f.matrix();
        for (k, v) in [0.1, 0.4, 0.4, 0.1].into_iter().enumerate() {
            assert_relative_eq!(m[(k, k)].re, v, epsilon = 1e-15);
        }
        assert_relative_eq!(m[(1, 2)].re, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn equal_couplings_match_solver() {
        for &(g, pa, pb) in &[(0.01, 0.002, 0.01), (0.003, 0.0005, 0.008), (0.008, 0.004, 0.002)] {
            let (num, p) = solve_qutrit(QutritCouplings::Equal, g, pa, pb);
            let closed = filtered_qutrit_state(g, QutritCouplings::Equal, pa, pb).unwrap().matrix();
            assert!(max_abs_diff(&num, &closed) < 1e-9);
            assert_relative_eq!(p, qutrit_psuc(g, QutritCouplings::Equal, pa, pb).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn theta_family_matches_solver() {
        for &(theta, g, pa, pb) in
            &[(0.4, 0.004, 0.001, 0.01), (1.1, 0.009, 0.003, 0.006), (FRAC_PI_4, 0.002, 0.0002, 0.004)]
        {
            let c = QutritCouplings::Theta { theta };
            let (num, p) = solve_qutrit(c, g, pa, pb);
            let closed = filtered_qutrit_state(g, c, pa, pb).unwrap().matrix();
            assert!(max_abs_diff(&num, &closed) < 1e-9);
            assert_relative_eq!(p, qutrit_psuc(g, c, pa, pb).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn first_order_form_tracks_exact_form() {
        let (mu, pb) = (1e-3, 1e-2);
        let pa = mu * pb;
        let g = 1e-6;
        for theta in [0.3, FRAC_PI_4, 1.2] {
            let exact = filtered_qutrit_state(g, QutritCouplings::Theta { theta }, pa, pb).unwrap().matrix();
            let approx = first_order_filtered_state(theta, mu);
            assert!(max_abs_diff(&exact, &approx) < 5.0 * mu * mu);
        }
    }

    #[test]
    fn small_mu_limit_is_pure_target() {
        let f = filtered_qutrit_state(1e-3, QutritCouplings::Equal, 1e-7, 1e-2).unwrap();
        let rho = f.density().unwrap();
        assert!(fidelity_target(&rho, &psi_plus()).unwrap() > 1.0 - 1e-4);
        let f = filtered_qutrit_state(1e-7, QutritCouplings::Theta { theta: 0.3 }, 1e-7, 1e-2).unwrap();
        assert!(fidelity_target(&f.density().unwrap(), &psi_theta(0.3)).unwrap() > 1.0 - 1e-4);
    }

    #[test]
    fn coherence_peaks_at_quarter_pi() {
        let (g, pa, pb) = (1e-3, 1e-5, 1e-2);
        let t = |theta| filtered_qutrit_state(g, QutritCouplings::Theta { theta }, pa, pb).unwrap().t;
        let best = t(FRAC_PI_4);
        for k in 1..40 {
            let theta = PI / 2.0 * k as f64 / 40.0;
            assert!(t(theta) <= best + 1e-15);
        }
    }

    #[test]
    fn psuc_limits() {
        let (pa, pb) = (1e-6, 1e-2);
        let p = qutrit_psuc(1e-1, QutritCouplings::Theta { theta: 0.6 }, pa, pb).unwrap();
        assert_relative_eq!(p, psuc_small_mu(pa, pb), max_relative = 1e-3);
        let p = 5e-3;
        assert_relative_eq!(psuc_small_g(1.0, p, p), 5.0 / (18.0 * p * p), max_relative = 1e-14);
        let g = 1e-7;
        let exact = qutrit_psuc(g, QutritCouplings::Theta { theta: 0.6 }, 0.004, 0.007).unwrap();
        assert_relative_eq!(exact, psuc_small_g(g, 0.004, 0.007), max_relative = 1e-6);
        let equal = qutrit_psuc(g, QutritCouplings::Equal, 0.004, 0.007).unwrap();
        assert_relative_eq!(equal, 2.0 * psuc_small_g(g, 0.004, 0.007), max_relative = 1e-6);
        let equal_mu = qutrit_psuc(1e-1, QutritCouplings::Equal, pa, pb).unwrap();
        assert_relative_eq!(equal_mu, psuc_small_mu(pa, pb), max_relative = 1e-3);
    }

    #[test]
    fn qudit_identities_hold() {
        for d in 2..7 {
            let f = QuditSteadyClosedForm::new(d, 0.003, 0.002, 0.01).unwrap();
            let (a, b) = f.verification_residuals();
            let scale = f.c3.norm() * (f.p_a + f.p_b);
            assert!(a.norm() <= 1e-14 * scale.max(1e-30));
            assert!(b.norm() <= 1e-14 * scale.max(1e-30));
        }
    }

    #[test]
    fn qudit_closed_form_is_stationary_and_matches_solver() {
        for d in 2..=4 {
            let (g, pa, pb) = (0.003, 0.002, 0.01);
            let spec = MachineSpec::uniform_qudit(d, g).unwrap();
            let l = reset_machine(&spec, Temperature::Infinite, Temperature::ZERO, pa, pb).unwrap();
            let closed = qudit_steady_state(d, g, pa, pb).unwrap();
            assert!((l.matrix() * vectorize(closed.matrix())).norm() < 1e-10);
            let ss = steady_state(&l).unwrap();
            assert!(max_abs_diff(ss.state.matrix(), closed.matrix()) < 1e-8);
        }
    }

    #[test]
    fn level_count_and_root_two_convention() {
        let (g, pa, pb) = (0.003, 0.002, 0.01);
        for d in 2..=4 {
            let spec = MachineSpec::uniform_qudit(d, g).unwrap();
            let l = reset_machine(&spec, Temperature::Infinite, Temperature::ZERO, pa, pb).unwrap();
            let (_, p) = apply_filter(&steady_state(&l).unwrap().state, &FilterSpec::qudit(d).unwrap()).unwrap();
            assert_relative_eq!(p, qudit_psuc(d, g, pa, pb).unwrap(), max_relative = 1e-8);
            assert!((p - eq12_psuc(d, SQRT_2 * g, pa, pb)).abs() > 1e-3 * p);
            assert!((p - eq12_psuc(d + 1, g, pa, pb)).abs() > 1e-3 * p);
        }
        let theta = qutrit_psuc(g, QutritCouplings::Theta { theta: FRAC_PI_4 }, pa, pb).unwrap();
        assert_relative_eq!(theta, eq12_psuc(3, g, pa, pb), max_relative = 1e-12);
    }

    #[test]
    fn schmidt_targets() {
        assert!(SchmidtTarget::new(vec![0.6, 0.6]).is_err());
        assert!(SchmidtTarget::new(vec![-0.6, 0.8]).is_err());
        let t = SchmidtTarget::new(vec![0.6, 0.8]).unwrap();
        let v = t.filtered_vector();
        assert_eq!(v[1].re, 0.6);
        assert_eq!(v[2].re, 0.8);
        assert_relative_eq!(t.schmidt_vector().norm(), 1.0, epsilon = 1e-15);
        let m = SchmidtTarget::maximally_entangled(2).unwrap();
        let diff: ComplexVector = m.filtered_vector() - psi_plus();
        assert!(diff.norm() < 1e-15);
        let spec = schmidt_machine(&m, 0.01).unwrap();
        assert_eq!(spec.levels(), 3);
    }
}
