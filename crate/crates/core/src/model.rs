//! Hamiltonians, energy ladders, thermal states and machine descriptions.
//!
//! Energies are in units of the first gap of subsystem A, with ħ = k_B = 1.
//! Level indices are 0-based and the composite basis is |i⟩_A ⊗ |j⟩_B.

use serde::{Deserialize, Serialize};

use crate::dynamics::LocalRates;
use crate::error::{Error, Result};
use crate::linalg::{diag, identity, kron, BipartiteShape, ComplexMatrix, C64};

/// Bath temperature. Infinite temperature is a distinct value, not a large
/// number, so that the maximal-gradient limit is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Finite(f64),
    Infinite,
}

impl Temperature {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("temperature must be >= 0, got {t}")));
        }
        Ok(if t.is_infinite() { Temperature::Infinite } else { Temperature::Finite(t) })
    }

    pub const ZERO: Temperature = Temperature::Finite(0.0);

    pub fn is_zero(&self) -> bool {
        matches!(self, Temperature::Finite(t) if *t == 0.0)
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Temperature::Finite(t) => t,
            Temperature::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Temperature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Temperature::Finite(t) => write!(f, "{t}"),
            Temperature::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Temperature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Temperature::Finite(t) => s.serialize_f64(*t),
            Temperature::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Temperature {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let t = match Raw::deserialize(d)? {
            Raw::Num(t) => t,
            Raw::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => f64::INFINITY,
                other => {
                    other.parse::<f64>().map_err(|_| serde::de::Error::custom(format!("invalid temperature {s:?}")))?
                }
            },
        };
        Temperature::new(t).map_err(serde::de::Error::custom)
    }
}

/// Energies E_0 = 0 < E_1 < … of one subsystem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLadder {
    energies: Vec<f64>,
}

impl EnergyLadder {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidParameter("a ladder needs at least two levels".into()));
        }
        if energies[0] != 0.0 {
            return Err(Error::InvalidParameter("ground energy must be 0".into()));
        }
        if energies.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidParameter(format!("energies must increase strictly: {energies:?}")));
        }
        Ok(Self { energies })
    }

    /// Cumulative sums of `gaps`: E_k = Σ_{l ≤ k} ε_l.
    pub fn from_gaps(gaps: &[f64]) -> Result<Self> {
        let mut energies = Vec::with_capacity(gaps.len() + 1);
        energies.push(0.0);
        let mut acc = 0.0;
        for &g in gaps {
            acc += g;
            energies.push(acc);
        }
        Self::new(energies)
    }

    /// Cumulative sums of the reversed gaps, the B-side ladder of the machine.
    pub fn from_gaps_reversed(gaps: &[f64]) -> Result<Self> {
        let rev: Vec<f64> = gaps.iter().rev().copied().collect();
        Self::from_gaps(&rev)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// E_n − E_m.
    pub fn gap(&self, m: usize, n: usize) -> f64 {
        self.energies[n] - self.energies[m]
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        diag(&self.energies)
    }
}

/// Boltzmann populations of a ladder.
pub fn thermal_populations(ladder: &EnergyLadder, t: Temperature) -> Vec<f64> {
    let n = ladder.levels();
    match t {
        Temperature::Infinite => vec![1.0 / n as f64; n],
        Temperature::Finite(0.0) => {
            let mut p = vec![0.0; n];
            p[0] = 1.0;
            p
        }
        Temperature::Finite(t) => {
            // E_0 = 0 keeps every weight in (0, 1].
            let w: Vec<f64> = ladder.energies().iter().map(|e| (-e / t).exp()).collect();
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        }
    }
}

/// τ = exp(−H/T) / Tr exp(−H/T) as a diagonal matrix.
pub fn thermal_state(ladder: &EnergyLadder, t: Temperature) -> ComplexMatrix {
    diag(&thermal_populations(ladder, t))
}

/// Energy-preserving coupling between the two subsystems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Interaction {
    /// g₁|02⟩⟨20| + g₂|11⟩⟨20| + g₃|11⟩⟨02| + h.c. on two qutrits.
    Qutrit { g1: f64, g2: f64, g3: f64 },
    /// Σ_k couplings[k] |d,0⟩⟨k, d−k| + h.c. for k = 0 … d−1 on two
    /// (d+1)-level systems.
    Ladder { couplings: Vec<f64> },
}

/// A two-subsystem thermal machine: gaps of A (first gap 1) and the
/// interaction. B carries the reversed gaps so that every |k, d−k⟩ is
/// degenerate with |d, 0⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub gaps: Vec<f64>,
    pub interaction: Interaction,
}

impl MachineSpec {
    /// The two-qutrit machine with gaps (1, ε).
    pub fn qutrit(epsilon: f64, g1: f64, g2: f64, g3: f64) -> Result<Self> {
        let spec = Self { gaps: vec![1.0, epsilon], interaction: Interaction::Qutrit { g1, g2, g3 } };
        spec.validate()?;
        Ok(spec)
    }

    /// A (d+1)-level machine; `couplings[k]` drives |d,0⟩ ↔ |k, d−k⟩.
    pub fn qudit(gaps: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        let spec = Self { gaps, interaction: Interaction::Ladder { couplings } };
        spec.validate()?;
        Ok(spec)
    }

    /// (d+1)-level machine with unit gaps and equal couplings.
    pub fn uniform_qudit(d: usize, coupling: f64) -> Result<Self> {
        Self::qudit(vec![1.0; d], vec![coupling; d])
    }

    pub fn validate(&self) -> Result<()> {
        if self.gaps.is_empty() {
            return Err(Error::InvalidParameter("machine needs at least one gap".into()));
        }
        if self.gaps[0] != 1.0 {
            return Err(Error::InvalidParameter(format!("first gap of A must be 1, got {}", self.gaps[0])));
        }
        if self.gaps.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidParameter(format!("gaps must be positive: {:?}", self.gaps)));
        }
        match &self.interaction {
            Interaction::Qutrit { g1, g2, g3 } => {
                if self.gaps.len() != 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "qutrit interaction needs 2 gaps, got {}",
                        self.gaps.len()
                    )));
                }
                if ![g1, g2, g3].iter().all(|g| g.is_finite()) {
                    return Err(Error::InvalidParameter("couplings must be finite".into()));
                }
            }
            Interaction::Ladder { couplings } => {
                if couplings.len() != self.gaps.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} couplings for a machine with d = {}",
                        couplings.len(),
                        self.gaps.len()
                    )));
                }
                if !couplings.iter().all(|g| g.is_finite()) {
                    return Err(Error::InvalidParameter("couplings must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// d, so that each subsystem has d + 1 levels.
    pub fn d(&self) -> usize {
        self.gaps.len()
    }

    pub fn levels(&self) -> usize {
        self.gaps.len() + 1
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape { dim_a: self.levels(), dim_b: self.levels() }
    }

    pub fn ladder_a(&self) -> Result<EnergyLadder> {
        EnergyLadder::from_gaps(&self.gaps)
    }

    pub fn ladder_b(&self) -> Result<EnergyLadder> {
        EnergyLadder::from_gaps_reversed(&self.gaps)
    }

    /// (H_A ⊗ 1, 1 ⊗ H_B) on the composite space.
    pub fn free_hamiltonians(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        self.validate()?;
        qudit_hamiltonians(&self.gaps)
    }

    pub fn interaction_hamiltonian(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        match &self.interaction {
            Interaction::Qutrit { g1, g2, g3 } => Ok(qutrit_interaction(*g1, *g2, *g3)),
            Interaction::Ladder { couplings } => ladder_interaction(couplings),
        }
    }

    /// H_A + H_B + H_int.
    pub fn hamiltonian(&self) -> Result<ComplexMatrix> {
        let (ha, hb) = self.free_hamiltonians()?;
        Ok(ha + hb + self.interaction_hamiltonian()?)
    }
}

/// H_A = diag(0, 1, 1+ε) ⊗ 1 and H_B = 1 ⊗ diag(0, ε, 1+ε).
pub fn qutrit_hamiltonians(spec: &MachineSpec) -> Result<(ComplexMatrix, ComplexMatrix)> {
    spec.validate()?;
    if spec.levels() != 3 {
        return Err(Error::DimensionMismatch(format!("expected a qutrit machine, got {} levels", spec.levels())));
    }
    qudit_hamiltonians(&spec.gaps)
}

fn couple(h: &mut ComplexMatrix, a: usize, b: usize, g: f64) {
    h[(a, b)] += C64::new(g, 0.0);
    h[(b, a)] += C64::new(g, 0.0);
}

/// g₁|02⟩⟨20| + g₂|11⟩⟨20| + g₃|11⟩⟨02| + h.c.
pub fn qutrit_interaction(g1: f64, g2: f64, g3: f64) -> ComplexMatrix {
    let s = BipartiteShape { dim_a: 3, dim_b: 3 };
    let mut h = ComplexMatrix::zeros(9, 9);
    couple(&mut h, s.index(0, 2), s.index(2, 0), g1);
    couple(&mut h, s.index(1, 1), s.index(2, 0), g2);
    couple(&mut h, s.index(1, 1), s.index(0, 2), g3);
    h
}

/// Free Hamiltonians of the (d+1)-level machine with gaps ε_1 … ε_d.
pub fn qudit_hamiltonians(gaps: &[f64]) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if gaps.first() != Some(&1.0) {
        return Err(Error::InvalidParameter("first gap must be 1".into()));
    }
    let la = EnergyLadder::from_gaps(gaps)?;
    let lb = EnergyLadder::from_gaps_reversed(gaps)?;
    let n = gaps.len() + 1;
    Ok((kron(&la.hamiltonian(), &identity(n)), kron(&identity(n), &lb.hamiltonian())))
}

fn ladder_interaction(couplings: &[f64]) -> Result<ComplexMatrix> {
    let d = couplings.len();
    if d < 2 {
        return Err(Error::DimensionMismatch("ladder interaction needs d >= 2".into()));
    }
    let s = BipartiteShape { dim_a: d + 1, dim_b: d + 1 };
    let mut h = ComplexMatrix::zeros(s.total(), s.total());
    for (k, &g) in couplings.iter().enumerate() {
        couple(&mut h, s.index(d, 0), s.index(k, d - k), g);
    }
    Ok(h)
}

/// Σ_{k=1}^{d} g_k |d,0⟩⟨k−1, d−k+1| + h.c.
pub fn qudit_interaction(couplings: &[f64], d: usize) -> Result<ComplexMatrix> {
    if couplings.len() != d {
        return Err(Error::DimensionMismatch(format!("{} couplings for d = {d}", couplings.len())));
    }
    ladder_interaction(couplings)
}

/// How one subsystem couples to its bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BathCoupling {
    /// Thermal reset at rate `rate`.
    Reset { rate: f64 },
    /// Local Lindblad jumps with an explicit rate table.
    Lindblad(LocalRates),
    /// Local Lindblad jumps with bosonic statistics: coupling `rate` on every
    /// level pair unless listed in `scaled`, and dephasing γ on every pair.
    Bosonic {
        rate: f64,
        dephasing: f64,
        #[serde(default)]
        scaled: Vec<PairScale>,
    },
}

/// Multiplies the bosonic coupling of one level pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairScale {
    pub lower: usize,
    pub upper: usize,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub temperature: Temperature,
    pub coupling: BathCoupling,
}

impl BathSpec {
    pub fn reset(temperature: Temperature, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("reset rate must be >= 0, got {rate}")));
        }
        Ok(Self { temperature, coupling: BathCoupling::Reset { rate } })
    }
}
