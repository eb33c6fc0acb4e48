//! Photon-loss efficiency model: heralding efficiency of the bus-based
//! baseline, of the shared-resource layout with a centrally placed source,
//! their ratio, and the distance at which the advantage crosses unity.

use serde::Serialize;

use crate::error::{Result, SimError};

/// Inputs to the loss model. Defaults: η₀ = 0.96, η_d = 0.96,
/// attenuation 1/22 per km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyParams {
    /// Probability that a photon enters the channel after scattering.
    pub eta0: f64,
    /// Single-photon detector efficiency.
    pub eta_d: f64,
    /// Channel attenuation rate per km.
    pub attenuation: f64,
    /// Distance between each pair of parties, km.
    pub l_km: f64,
    /// Number of parties.
    pub n: usize,
}

impl Default for EfficiencyParams {
    fn default() -> Self {
        Self {
            eta0: 0.96,
            eta_d: 0.96,
            attenuation: 1.0 / 22.0,
            l_km: 0.0,
            n: 2,
        }
    }
}

impl EfficiencyParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eta0", self.eta0), ("eta_d", self.eta_d)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(SimError::InvalidCoefficient(format!(
                    "{name} = {v} is outside (0, 1]"
                )));
            }
        }
        if !(self.attenuation >= 0.0 && self.attenuation.is_finite()) {
            return Err(SimError::InvalidCoefficient(format!(
                "attenuation = {} must be a finite non-negative rate",
                self.attenuation
            )));
        }
        if !(self.l_km >= 0.0 && self.l_km.is_finite()) {
            return Err(SimError::InvalidCoefficient(format!(
                "L = {} km must be finite and non-negative",
                self.l_km
            )));
        }
        if self.n < 2 {
            return Err(SimError::InvalidConfig(format!(
                "n = {} parties, need at least 2",
                self.n
            )));
        }
        Ok(())
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Total fiber length factor of the shared-resource layout: the source
    /// sits at the circumcenter, so N spokes of L / (2 sin(π/N)) each.
    fn central_length_factor(&self) -> f64 {
        self.nf() / (2.0 * (std::f64::consts::PI / self.nf()).sin())
    }
}

/// Heralding efficiency of the single-photon-bus baseline:
/// η₀^N · η_d · exp[-α(N-1)L].
pub fn eta_prior(p: &EfficiencyParams) -> Result<f64> {
    p.validate()?;
    Ok(p.eta0.powi(p.n as i32)
        * p.eta_d
        * (-p.attenuation * (p.nf() - 1.0) * p.l_km).exp())
}

/// Heralding efficiency of the shared-resource layout:
/// η_d^N · exp[-α · N/(2 sin(π/N)) · L].
pub fn eta_ours(p: &EfficiencyParams) -> Result<f64> {
    p.validate()?;
    Ok(p.eta_d.powi(p.n as i32) * (-p.attenuation * p.central_length_factor() * p.l_km).exp())
}

/// Efficiency ratio in closed form:
/// η₀^{-N} · η_d^{N-1} · exp[αL(N - 1 - N/(2 sin(π/N)))].
pub fn enhancement(p: &EfficiencyParams) -> Result<f64> {
    p.validate()?;
    let prefactor = p.eta0.powi(-(p.n as i32)) * p.eta_d.powi(p.n as i32 - 1);
    let exponent = p.attenuation * p.l_km * (p.nf() - 1.0 - p.central_length_factor());
    Ok(prefactor * exponent.exp())
}

/// Distance at which the enhancement crosses 1, solved in closed form:
/// L* = ln(η₀^{-N} η_d^{N-1}) / [α(N/(2 sin(π/N)) - N + 1)].
/// `None` when the enhancement never crosses unity at positive distance
/// (e.g. N = 2, 3, 4 at the default parameters, where it is ≥ 1 for all L).
pub fn crossover_distance(n: usize, base: &EfficiencyParams) -> Result<Option<f64>> {
    let p = EfficiencyParams { n, ..*base };
    p.validate()?;
    let ln_prefactor = -(p.nf()) * p.eta0.ln() + (p.nf() - 1.0) * p.eta_d.ln();
    let slope = p.attenuation * (p.central_length_factor() - p.nf() + 1.0);
    if slope == 0.0 {
        return Ok(None);
    }
    let l_star = ln_prefactor / slope;
    if l_star.is_finite() && l_star > 0.0 {
        Ok(Some(l_star))
    } else {
        Ok(None)
    }
}

/// One sweep row.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub l_km: f64,
    pub eta_prior: f64,
    pub eta_ours: f64,
    pub enhancement: f64,
}

/// Evaluate the model over a grid of party counts and distances.
pub fn sweep(n_list: &[usize], l_grid: &[f64], base: &EfficiencyParams) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() || l_grid.is_empty() {
        return Err(SimError::InvalidConfig("empty sweep grid".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len() * l_grid.len());
    for &n in n_list {
        for &l_km in l_grid {
            let p = EfficiencyParams {
                n,
                l_km,
                ..*base
            };
            rows.push(SweepRow {
                n,
                l_km,
                eta_prior: eta_prior(&p)?,
                eta_ours: eta_ours(&p)?,
                enhancement: enhancement(&p)?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(n: usize, l_km: f64) -> EfficiencyParams {
        EfficiencyParams {
            n,
            l_km,
            ..Default::default()
        }
    }

    fn pct(x: f64) -> f64 {
        (x * 10000.0).round() / 100.0
    }

    #[test]
    fn prior_efficiency_reference_points() {
        assert_eq!(pct(eta_prior(&at(2, 11.0)).unwrap()), 53.66);
        assert_eq!(pct(eta_prior(&at(3, 66.0)).unwrap()), 0.21);
        let perfect = EfficiencyParams {
            eta0: 1.0,
            eta_d: 1.0,
            l_km: 0.0,
            ..Default::default()
        };
        assert_eq!(eta_prior(&perfect).unwrap(), 1.0);
    }

    #[test]
    fn ours_efficiency_reference_points() {
        assert_eq!(pct(eta_ours(&at(2, 11.0)).unwrap()), 55.9);
        assert_eq!(pct(eta_ours(&at(4, 11.0)).unwrap()), 20.65);
        let perfect = EfficiencyParams {
            eta_d: 1.0,
            l_km: 0.0,
            n: 2,
            ..Default::default()
        };
        assert_eq!(eta_ours(&perfect).unwrap(), 1.0);
    }

    #[test]
    fn enhancement_reference_points() {
        let e2 = enhancement(&at(2, 5.0)).unwrap();
        assert!((e2 - 1.0 / 0.96).abs() < 1e-12);
        assert!((enhancement(&at(3, 11.0)).unwrap() - 1.191).abs() < 5e-4);
        assert!((enhancement(&at(4, 11.0)).unwrap() - 1.135).abs() < 5e-4);
    }

    #[test]
    fn enhancement_equals_ratio() {
        for n in 2..=7 {
            for l in [0.0, 3.0, 11.0, 40.0, 66.0] {
                let p = at(n, l);
                let ratio = eta_ours(&p).unwrap() / eta_prior(&p).unwrap();
                assert!((enhancement(&p).unwrap() - ratio).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn crossover_reference_points() {
        let base = EfficiencyParams::default();
        for n in 2..=4 {
            assert!(crossover_distance(n, &base).unwrap().is_none());
        }
        let expect = [(5, 3.546), (6, 0.898), (7, 0.435)];
        for (n, l) in expect {
            let got = crossover_distance(n, &base).unwrap().unwrap();
            assert!((got - l).abs() < 1e-3, "N={n}: {got}");
            // at L*, the enhancement is exactly 1
            let p = EfficiencyParams {
                n,
                l_km: got,
                ..base
            };
            assert!((enhancement(&p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_shape_and_edge_values() {
        let base = EfficiencyParams::default();
        let l_grid: Vec<f64> = (0..=66).map(|i| i as f64).collect();
        let rows = sweep(&[2, 3, 4], &l_grid, &base).unwrap();
        assert_eq!(rows.len(), 3 * 67);
        for row in &rows {
            assert!(row.enhancement >= 1.0);
            if row.l_km == 0.0 {
                let prefactor =
                    base.eta0.powi(-(row.n as i32)) * base.eta_d.powi(row.n as i32 - 1);
                assert!((row.enhancement - prefactor).abs() < 1e-12);
            }
        }
        let rows = sweep(&[5, 6, 7], &[10.0], &base).unwrap();
        for row in rows {
            assert!(row.enhancement < 1.0, "N={} at L=10", row.n);
        }
        assert!(sweep(&[], &[1.0], &base).is_err());
    }

    #[test]
    fn monotonicity_in_distance() {
        for (n, increasing) in [(3usize, true), (4, true), (5, false), (6, false)] {
            let mut prev = None;
            for l in 0..=20 {
                let e = enhancement(&at(n, l as f64)).unwrap();
                if let Some(p) = prev {
                    if increasing {
                        assert!(e > p);
                    } else {
                        assert!(e < p);
                    }
                }
                prev = Some(e);
            }
        }
        // N = 2: flat to 1e-12
        let e0 = enhancement(&at(2, 0.0)).unwrap();
        for l in [1.0, 17.0, 66.0, 500.0] {
            assert!((enhancement(&at(2, l)).unwrap() - e0).abs() < 1e-12);
        }
    }
}
