//! Entanglement measures and the MES/PES/SS/Null output classifier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::linalg::hermitian_eigenvalues;
use crate::qcore::StateVector;

/// Tolerance used by the classifier (looser than the kernel tolerance since
/// it consumes end-to-end pipelines).
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Output taxonomy: maximally entangled, partially entangled, separable, or
/// the vanished branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateClass {
    Mes,
    Pes,
    Ss,
    Null,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateClass::Mes => write!(f, "MES"),
            StateClass::Pes => write!(f, "PES"),
            StateClass::Ss => write!(f, "SS"),
            StateClass::Null => write!(f, "NULL"),
        }
    }
}

/// Witness values behind a classification decision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    /// Spin-flip concurrence, present for two-qubit states.
    pub concurrence: Option<f64>,
    /// Best phase-optimized overlap with a computational-relabeled GHZ state,
    /// present for three or more qubits.
    pub ghz_fidelity: Option<f64>,
    /// 1 - min over single-qubit reductions of the purity.
    pub max_reduction_purity_deficit: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub class: StateClass,
    pub witness: Witness,
}

/// Reduced density matrix produced by a partial trace.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl DensityMatrix {
    fn validated(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let rho = Self { dim, entries };
        let mut herm_dev: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                herm_dev = herm_dev.max((rho.entry(i, j) - rho.entry(j, i).conj()).norm());
            }
        }
        if herm_dev > 1e-12 {
            return Err(SimError::InvalidCoefficient(format!(
                "density matrix is not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(SimError::InvalidCoefficient(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        if let Some(min) = rho
            .eigenvalues()
            .iter()
            .copied()
            .fold(None::<f64>, |acc, x| Some(acc.map_or(x, |a| a.min(x))))
        {
            if min < -1e-10 {
                return Err(SimError::InvalidCoefficient(format!(
                    "density matrix has eigenvalue {min:.3e} below 0"
                )));
            }
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// tr(ρ²); for Hermitian ρ this is Σ |ρ_ij|².
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// Real spectrum, sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim, &self.entries)
    }
}

/// Partial trace over the complement of `keep`. The kept qubits appear in the
/// order listed.
pub fn reduce(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.num_qubits();
    if keep.is_empty() {
        return Err(SimError::InvalidConfig("empty keep set".into()));
    }
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n {
            return Err(SimError::QubitIndexOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
        if seen[q] {
            return Err(SimError::RepeatedQubitIndex(q));
        }
        seen[q] = true;
    }
    let env: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let k = keep.len();
    let keep_shifts: Vec<usize> = keep.iter().map(|&q| n - 1 - q).collect();
    let env_shifts: Vec<usize> = env.iter().map(|&q| n - 1 - q).collect();
    let dim = 1usize << k;
    let env_len = 1usize << env.len();

    let index_of = |kept: usize, e: usize| -> usize {
        let mut idx = 0usize;
        for (j, &s) in keep_shifts.iter().enumerate() {
            if (kept >> (k - 1 - j)) & 1 == 1 {
                idx |= 1 << s;
            }
        }
        for (j, &s) in env_shifts.iter().enumerate() {
            if (e >> (env.len() - 1 - j)) & 1 == 1 {
                idx |= 1 << s;
            }
        }
        idx
    };

    let amps = state.amplitudes();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut s = Complex64::new(0.0, 0.0);
            for e in 0..env_len {
                s += amps[index_of(r, e)] * amps[index_of(c, e)].conj();
            }
            entries[r * dim + c] = s;
        }
    }
    DensityMatrix::validated(dim, entries)
}

/// Spin-flip concurrence of a pure two-qubit state: 2|a₀₀a₁₁ - a₀₁a₁₀|.
pub fn concurrence(state: &StateVector) -> Result<f64> {
    if state.num_qubits() != 2 {
        return Err(SimError::DimensionMismatch(format!(
            "concurrence is defined for 2 qubits, got {}",
            state.num_qubits()
        )));
    }
    let a = state.amplitudes();
    let c = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
    Ok(c.clamp(0.0, 1.0))
}

/// |⟨GHZ_N^±|state⟩|² where GHZ_N^± = (|0…0⟩ ± |1…1⟩)/√2.
pub fn ghz_fidelity(state: &StateVector, plus: bool) -> Result<f64> {
    if state.num_qubits() < 2 {
        return Err(SimError::DimensionMismatch(
            "GHZ fidelity needs at least 2 qubits".into(),
        ));
    }
    let a = state.amplitudes();
    let sign = if plus { 1.0 } else { -1.0 };
    let overlap = (a[0] + sign * a[a.len() - 1]) / std::f64::consts::SQRT_2;
    Ok(overlap.norm_sqr())
}

/// Best overlap with a GHZ state over all computational relabelings (bit
/// flips per qubit), after optimizing the single relative phase:
/// max_mask (|ψ[mask]| + |ψ[¬mask]|)² / 2.
fn best_relabeled_ghz_fidelity(state: &StateVector) -> f64 {
    let a = state.amplitudes();
    let len = a.len();
    let mut best: f64 = 0.0;
    for mask in 0..len / 2 {
        let c0 = a[mask].norm();
        let c1 = a[!mask & (len - 1)].norm();
        best = best.max((c0 + c1) * (c0 + c1) / 2.0);
    }
    best
}

/// Classify a protocol output. `None` is the vanished branch.
pub fn classify(state: Option<&StateVector>) -> Result<Classification> {
    let Some(state) = state else {
        return Ok(Classification {
            class: StateClass::Null,
            witness: Witness {
                concurrence: None,
                ghz_fidelity: None,
                max_reduction_purity_deficit: None,
            },
        });
    };
    let n = state.num_qubits();
    let mut min_purity = f64::INFINITY;
    for q in 0..n {
        min_purity = min_purity.min(reduce(state, &[q])?.purity());
    }
    let deficit = 1.0 - min_purity;

    let conc = if n == 2 { Some(concurrence(state)?) } else { None };
    let ghz = if n >= 3 {
        Some(best_relabeled_ghz_fidelity(state))
    } else {
        None
    };
    let witness = Witness {
        concurrence: conc,
        ghz_fidelity: ghz,
        max_reduction_purity_deficit: Some(deficit),
    };

    let class = if deficit <= CLASSIFY_TOL {
        StateClass::Ss
    } else if n == 2 && conc.unwrap() >= 1.0 - CLASSIFY_TOL {
        StateClass::Mes
    } else if n >= 3 {
        let mut all_maximally_mixed = true;
        for q in 0..n {
            if (reduce(state, &[q])?.purity() - 0.5).abs() > CLASSIFY_TOL {
                all_maximally_mixed = false;
                break;
            }
        }
        if all_maximally_mixed && ghz.unwrap() >= 1.0 - CLASSIFY_TOL {
            StateClass::Mes
        } else {
            StateClass::Pes
        }
    } else {
        StateClass::Pes
    };

    Ok(Classification { class, witness })
}
