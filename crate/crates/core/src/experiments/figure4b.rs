use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{machine_liouvillian, Figure4bConfig, FigureRecord, RecordStatus};
use crate::dynamics::steady_state;
use crate::entfilter::{apply_filter, negativity, FilterSpec};
use crate::error::{Error, Result};
use crate::model::{BathCoupling, BathSpec, MachineSpec, PairScale, Temperature};

/// Lindblad machine of the heatmap: equal couplings g, bosonic baths with
/// couplings Γ_A and Γ_B, the B transition between levels 1 and 2 scaled by
/// `gamma_b12_factor`, and dephasing γ on every pair of both qutrits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatmapParams {
    pub g: f64,
    pub epsilon: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_b12_factor: f64,
    pub dephasing: f64,
    /// Cells whose success probability falls below this count as failed
    /// filters with zero negativity.
    pub psuc_floor: f64,
    /// Cells above this negativity form the entangled region.
    pub region_threshold: f64,
}

impl Default for HeatmapParams {
    fn default() -> Self {
        Self {
            g: 1.6e-3,
            epsilon: 3.0,
            gamma_a: 1e-4,
            gamma_b: 5e-3,
            gamma_b12_factor: 1.0 / 50.0,
            dephasing: 3.5e-5,
            psuc_floor: 1e-10,
            region_threshold: 1e-3,
        }
    }
}

impl HeatmapParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [self.g, self.gamma_a, self.gamma_b, self.gamma_b12_factor, self.dephasing, self.psuc_floor];
        if nonneg.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(self.epsilon > 0.0) {
            return Err(Error::Config("heatmap parameters must be finite and non-negative, epsilon positive".into()));
        }
        if !(self.region_threshold >= 0.0) {
            return Err(Error::Config("region_threshold must be non-negative".into()));
        }
        Ok(())
    }

    pub fn machine(&self) -> Result<MachineSpec> {
        MachineSpec::qutrit(self.epsilon, self.g, self.g, self.g)
    }

    pub fn baths(&self, t_a: Temperature, t_b: Temperature) -> (BathSpec, BathSpec) {
        let a = BathSpec {
            temperature: t_a,
            coupling: BathCoupling::Bosonic { rate: self.gamma_a, dephasing: self.dephasing, scaled: vec![] },
        };
        let b = BathSpec {
            temperature: t_b,
            coupling: BathCoupling::Bosonic {
                rate: self.gamma_b,
                dephasing: self.dephasing,
                scaled: vec![PairScale { lower: 1, upper: 2, factor: self.gamma_b12_factor }],
            },
        };
        (a, b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeatmapReport {
    #[serde(skip)]
    pub records: Vec<FigureRecord>,
    pub t_a: Vec<f64>,
    pub t_b: Vec<f64>,
    /// negativity[i][j] at (t_a[i], t_b[j]); failed cells are 0.
    pub negativity: Vec<Vec<f64>>,
    pub peak: f64,
    pub peak_t_a: f64,
    pub peak_t_b: f64,
    /// Peak column is neither the first nor the last hot temperature.
    pub interior_peak: bool,
    /// 4-connected components of cells above the region threshold.
    pub entangled_components: usize,
    pub failed_cells: usize,
}

fn cell(p: &HeatmapParams, spec: &MachineSpec, index: usize, t_a: f64, t_b: f64) -> FigureRecord {
    let (ta, tb) = (Temperature::Finite(t_a), Temperature::Finite(t_b));
    let mut rec = FigureRecord::new("figure4b", index, "lindblad", spec, ta, tb);
    rec.rate_a = p.gamma_a;
    rec.rate_b = p.gamma_b;
    rec.rate_b12 = Some(p.gamma_b * p.gamma_b12_factor);
    rec.dephasing = Some(p.dephasing);
    let (bath_a, bath_b) = p.baths(ta, tb);
    let solved = machine_liouvillian(spec, &bath_a, &bath_b).and_then(|l| steady_state(&l));
    let ss = match solved {
        Ok(ss) => ss,
        Err(e) => {
            rec.fail(RecordStatus::Error, &e);
            return rec;
        }
    };
    rec.kernel_gap = Some(ss.kernel_gap);
    rec.residual = Some(ss.residual);
    match apply_filter(&ss.state, &FilterSpec::qutrit()) {
        Ok((_, p_suc)) if p_suc < p.psuc_floor => {
            rec.p_suc = Some(p_suc);
            rec.negativity = Some(0.0);
            rec.status = RecordStatus::FilterFailed;
            rec.message = Some(format!("p_suc {p_suc:.3e} below floor {:.1e}", p.psuc_floor));
        }
        Ok((rho, p_suc)) => {
            rec.p_suc = Some(p_suc);
            match negativity(&rho) {
                Ok(n) => {
                    rec.negativity = Some(n);
                    rec.solver_negativity = Some(n);
                }
                Err(e) => rec.fail(RecordStatus::Error, &e),
            }
        }
        Err(e) => {
            rec.negativity = Some(0.0);
            rec.fail(RecordStatus::FilterFailed, &e);
        }
    }
    rec
}

fn components(grid: &[Vec<f64>], threshold: f64) -> usize {
    let (n, m) = (grid.len(), grid.first().map_or(0, Vec::len));
    let mut seen = vec![vec![false; m]; n];
    let mut count = 0;
    for i in 0..n {
        for j in 0..m {
            if seen[i][j] || grid[i][j] <= threshold {
                continue;
            }
            count += 1;
            let mut stack = vec![(i, j)];
            seen[i][j] = true;
            while let Some((a, b)) = stack.pop() {
                let nbrs = [(a.wrapping_sub(1), b), (a + 1, b), (a, b.wrapping_sub(1)), (a, b + 1)];
                for (x, y) in nbrs {
                    if x < n && y < m && !seen[x][y] && grid[x][y] > threshold {
                        seen[x][y] = true;
                        stack.push((x, y));
                    }
                }
            }
        }
    }
    count
}

/// Filtered negativity of the Lindblad machine over a (T_A, T_B) grid.
/// Cells are independent; failures are recorded per cell.
pub fn lindblad_heatmap(cfg: &Figure4bConfig) -> Result<HeatmapReport> {
    cfg.validate()?;
    let p = cfg.params;
    let spec = p.machine()?;
    let (ta, tb) = (cfg.t_a.values(), cfg.t_b.values());
    let nb = tb.len();
    let records: Vec<FigureRecord> =
        (0..ta.len() * nb).into_par_iter().map(|k| cell(&p, &spec, k, ta[k / nb], tb[k % nb])).collect();

    let negativity: Vec<Vec<f64>> =
        (0..ta.len()).map(|i| (0..nb).map(|j| records[i * nb + j].negativity.unwrap_or(0.0)).collect()).collect();
    let (mut pi, mut pj) = (0, 0);
    for i in 0..ta.len() {
        for j in 0..nb {
            if negativity[i][j] > negativity[pi][pj] {
                (pi, pj) = (i, j);
            }
        }
    }
    Ok(HeatmapReport {
        peak: negativity[pi][pj],
        peak_t_a: ta[pi],
        peak_t_b: tb[pj],
        interior_peak: pi > 0 && pi + 1 < ta.len(),
        entangled_components: components(&negativity, p.region_threshold),
        failed_cells: records.iter().filter(|r| r.status != RecordStatus::Ok).count(),
        t_a: ta,
        t_b: tb,
        negativity,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SweepAxis;

    #[test]
    fn component_count() {
        let g = vec![vec![1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert_eq!(components(&g, 0.5), 2);
        let g = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(components(&g, 0.5), 3);
    }

    #[test]
    fn uncoupled_machine_is_never_entangled() {
        let cfg = Figure4bConfig {
            t_a: SweepAxis::log(0.5, 50.0, 3),
            t_b: SweepAxis::log(0.05, 5.0, 3),
            params: HeatmapParams { g: 0.0, ..Default::default() },
        };
        let rep = lindblad_heatmap(&cfg).unwrap();
        assert_eq!(rep.peak, 0.0);
        assert_eq!(rep.entangled_components, 0);
    }
}
