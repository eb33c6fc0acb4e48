//! Graph states built from controlled-phase gates, and the equivalent
//! construction from coherently order-controlled gate pairs with local
//! corrections.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::qcore::{apply, StateVector, Unitary};

/// Vertex cap for dense simulation.
pub const MAX_VERTICES: usize = 12;

/// Simple undirected graph; edges are stored sorted with i < j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count < 1 {
            return Err(SimError::InvalidGraph("graph needs at least one vertex".into()));
        }
        if vertex_count > MAX_VERTICES {
            return Err(SimError::GraphTooLarge(vertex_count));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == j {
                return Err(SimError::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if i >= vertex_count || j >= vertex_count {
                return Err(SimError::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {vertex_count} vertices"
                )));
            }
            normalized.push((i.min(j), i.max(j)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(SimError::InvalidGraph("duplicate edge".into()));
        }
        Ok(Self {
            vertex_count,
            edges: normalized,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges in sorted lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// True when no two edges share a vertex.
    pub fn is_matching(&self) -> bool {
        let mut used = vec![false; self.vertex_count];
        for &(i, j) in &self.edges {
            if used[i] || used[j] {
                return false;
            }
            used[i] = true;
            used[j] = true;
        }
        true
    }
}

/// Controlled phase-flip gate: diag(1, 1, 1, -1).
pub fn cz() -> Unitary {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    Unitary::new(
        4,
        vec![
            l, o, o, o, //
            o, l, o, o, //
            o, o, l, o, //
            o, o, o, -l,
        ],
    )
    .expect("cz matrix is unitary")
}

/// Sign branch of the order-superposed edge operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IcoSign {
    Plus,
    Minus,
}

/// Order-superposed two-qubit edge operation
/// (1/√2)[(U₂U₁) ⊗ (U₂U₁) ± i(U₁U₂) ⊗ (U₁U₂)] with U₁ = R_z(π/2), U₂ = X.
/// Unitarity is validated on construction.
pub fn ico_pm(sign: IcoSign) -> Result<Unitary> {
    let u1 = Unitary::rz(std::f64::consts::FRAC_PI_2);
    let u2 = Unitary::pauli_x();
    let fwd = u2.mul(&u1)?; // control-0 order
    let rev = u1.mul(&u2)?; // control-1 order
    let fwd2 = fwd.kron(&fwd)?;
    let rev2 = rev.kron(&rev)?;
    let i = Complex64::new(0.0, 1.0);
    let s = match sign {
        IcoSign::Plus => i,
        IcoSign::Minus => -i,
    };
    let inv_rt2 = 1.0 / std::f64::consts::SQRT_2;
    let entries: Vec<Complex64> = fwd2
        .entries()
        .iter()
        .zip(rev2.entries())
        .map(|(a, b)| (a + s * b) * inv_rt2)
        .collect();
    Unitary::new(4, entries)
}

/// Local correction turning the edge operation into an exact CZ:
/// CZ = phase · (σ ⊗ σ) · ICO_±, with (e^{-iπ/4}, σ_y) for the plus branch
/// and (e^{iπ/4}, σ_x) for the minus branch.
pub fn correction(sign: IcoSign) -> (Complex64, Unitary) {
    match sign {
        IcoSign::Plus => (
            Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
            Unitary::pauli_y(),
        ),
        IcoSign::Minus => (
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            Unitary::pauli_x(),
        ),
    }
}

/// Max entry deviation of phase·(σ⊗σ)·ICO_± from CZ.
pub fn correction_identity_residual(sign: IcoSign) -> Result<f64> {
    let ico = ico_pm(sign)?;
    let (phase, sigma) = correction(sign);
    let pair = sigma.kron(&sigma)?;
    let product = pair.mul(&ico)?;
    let target = cz();
    let residual = product
        .entries()
        .iter()
        .zip(target.entries())
        .map(|(a, b)| (a * phase - b).norm())
        .fold(0.0, f64::max);
    Ok(residual)
}

/// Π CZ^{(i,j)} |+⟩^{⊗n}; order-independent since the CZ gates commute.
pub fn build_graph_state(g: &Graph) -> Result<StateVector> {
    let mut state = StateVector::plus_state(g.vertex_count())?;
    let gate = cz();
    for &(i, j) in g.edges() {
        state = apply(&state, &gate, &[i, j])?;
    }
    Ok(state)
}

/// Π ICO_±^{(i,j)} |+⟩^{⊗n}, edges in sorted order. With
/// `interleave_corrections` every edge is immediately followed by its local
/// correction, reproducing the plain graph state exactly; without it the raw
/// order-superposed construction is returned.
pub fn build_ico_graph_state(
    g: &Graph,
    sign: IcoSign,
    interleave_corrections: bool,
) -> Result<StateVector> {
    let mut state = StateVector::plus_state(g.vertex_count())?;
    let ico = ico_pm(sign)?;
    let (phase, sigma) = correction(sign);
    let pair = sigma.kron(&sigma)?;
    for &(i, j) in g.edges() {
        state = apply(&state, &ico, &[i, j])?;
        if interleave_corrections {
            state = apply(&state, &pair, &[i, j])?;
            state = state.with_global_phase(phase)?;
        }
    }
    Ok(state)
}
