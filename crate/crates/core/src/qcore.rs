//! Dense complex state-vector and unitary-matrix kernel.
//!
//! Register convention: a state over qubits `[q0, q1, ..., q_{n-1}]` stores
//! amplitude `a[i]` for the basis ket whose bit string is the big-endian
//! binary expansion of `i`, i.e. qubit 0 is the most significant bit. All
//! public states are normalized; zero-probability branches are represented
//! as `None`, never as a zero-norm vector.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Tolerance for exact kernel identities (unitarity, norm preservation).
pub const KERNEL_TOL: f64 = 1e-12;
/// Acceptance tolerance for unitarity of caller-supplied matrices.
pub const UNITARY_INPUT_TOL: f64 = 1e-10;
/// Probability below which a collapsed branch is reported as null.
pub const NULL_PROBABILITY: f64 = 1e-14;

/// Measurement basis for control qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    /// {|0⟩, |1⟩}; outcome characters are '0'/'1'.
    Computational,
    /// {|±⟩ = (|0⟩ ± |1⟩)/√2}; outcome characters are '+'/'-'.
    PlusMinus,
}

/// Parity of a measurement outcome string: even/odd count of '-' (or '1').
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// One projective measurement outcome: the outcome string over the measured
/// qubits, its probability, and the renormalized post-measurement state of
/// the remaining qubits (`None` when the probability is below
/// [`NULL_PROBABILITY`]).
#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub outcome: String,
    pub probability: f64,
    pub collapsed: Option<StateVector>,
    pub parity: Parity,
}

/// Dense normalized state vector over an ordered, labelled qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
    labels: Vec<String>,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

impl StateVector {
    /// Build a state from amplitudes that are already normalized to within
    /// [`KERNEL_TOL`]. The stored amplitudes are renormalized exactly.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n = num_qubits_for_len(amps.len())?;
        Self::with_labels(amps, default_labels(n))
    }

    /// Same as [`StateVector::new`] with explicit qubit labels.
    pub fn with_labels(amps: Vec<Complex64>, labels: Vec<String>) -> Result<Self> {
        let num_qubits = num_qubits_for_len(amps.len())?;
        if labels.len() != num_qubits {
            return Err(SimError::DimensionMismatch(format!(
                "{} labels for {} qubits",
                labels.len(),
                num_qubits
            )));
        }
        check_finite(&amps)?;
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > KERNEL_TOL {
            return Err(SimError::NotNormalized(norm));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            num_qubits,
            amps,
            labels,
        })
    }

    /// Renormalize an unnormalized vector; `None` when its squared norm is
    /// below [`NULL_PROBABILITY`].
    pub(crate) fn from_unnormalized(
        amps: Vec<Complex64>,
        labels: Vec<String>,
    ) -> Result<Option<Self>> {
        check_finite(&amps)?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr < NULL_PROBABILITY {
            return Ok(None);
        }
        let norm = norm_sqr.sqrt();
        let amps: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
        Ok(Some(Self::with_labels(amps, labels)?))
    }

    /// Computational basis state |index⟩ on `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > 63 {
            return Err(SimError::InvalidConfig(format!(
                "unsupported qubit count {num_qubits}"
            )));
        }
        let len = 1usize << num_qubits;
        if index >= len {
            return Err(SimError::QubitIndexOutOfRange {
                index,
                num_qubits,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// |+⟩^⊗n.
    pub fn plus_state(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > 63 {
            return Err(SimError::InvalidConfig(format!(
                "unsupported qubit count {num_qubits}"
            )));
        }
        let len = 1usize << num_qubits;
        let amp = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
        Self::new(vec![amp; len])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.num_qubits {
            return Err(SimError::DimensionMismatch(format!(
                "{} labels for {} qubits",
                labels.len(),
                self.num_qubits
            )));
        }
        self.labels = labels;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(SimError::DimensionMismatch(format!(
                "overlap of {}- and {}-dimensional states",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|², clamped into [0, 1].
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// True iff the two states agree modulo a global phase: fidelity ≥ 1 - tol.
    pub fn global_phase_equal(&self, other: &StateVector, tol: f64) -> Result<bool> {
        Ok(self.fidelity(other)? >= 1.0 - tol)
    }

    /// Fidelity carrying the sign of the real part of the overlap: +1 for an
    /// exact match, -1 for an exact match with flipped global sign. Used by
    /// the strict ("signs included") table checks.
    pub fn signed_fidelity(&self, other: &StateVector) -> Result<f64> {
        let o = self.overlap(other)?;
        Ok(o.norm_sqr().clamp(0.0, 1.0) * o.re.signum())
    }

    /// Multiply every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: Complex64) -> Result<StateVector> {
        if (phase.norm() - 1.0).abs() > KERNEL_TOL {
            return Err(SimError::InvalidCoefficient(format!(
                "global phase must have unit modulus, got |{phase}| = {}",
                phase.norm()
            )));
        }
        let amps = self.amps.iter().map(|a| a * phase).collect();
        Self::with_labels(amps, self.labels.clone())
    }

    /// Reorder the register: position `k` of the result holds the qubit that
    /// was at `new_order[k]`.
    pub fn permuted(&self, new_order: &[usize]) -> Result<StateVector> {
        let n = self.num_qubits;
        if new_order.len() != n {
            return Err(SimError::DimensionMismatch(format!(
                "permutation of length {} for {} qubits",
                new_order.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &q in new_order {
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
        let mut amps = vec![Complex64::new(0.0, 0.0); self.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut new_idx = 0usize;
            for (k, &q) in new_order.iter().enumerate() {
                let bit = (idx >> (n - 1 - q)) & 1;
                new_idx |= bit << (n - 1 - k);
            }
            amps[new_idx] = *amp;
        }
        let labels = new_order
            .iter()
            .map(|&q| self.labels[q].clone())
            .collect();
        Self::with_labels(amps, labels)
    }
}

fn num_qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(SimError::DimensionMismatch(format!(
            "amplitude vector of length {len} is not a power of two ≥ 2"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_finite(amps: &[Complex64]) -> Result<()> {
    if amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
        Ok(())
    } else {
        Err(SimError::NonFinite)
    }
}

fn l2_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Tensor product of a list of states; label order is the concatenation of
/// the part labels.
pub fn tensor(parts: &[StateVector]) -> Result<StateVector> {
    if parts.is_empty() {
        return Err(SimError::EmptyTensorProduct);
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    let mut labels = Vec::new();
    for part in parts {
        let mut next = Vec::with_capacity(amps.len() * part.len());
        for a in &amps {
            for b in part.amplitudes() {
                next.push(a * b);
            }
        }
        amps = next;
        labels.extend(part.labels().iter().cloned());
    }
    StateVector::with_labels(amps, labels)
}

/// Dense square unitary matrix over a power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl Unitary {
    /// Validate and wrap a row-major matrix. Rejects entries that are not
    /// finite and matrices farther than [`UNITARY_INPUT_TOL`] from unitary.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(SimError::DimensionMismatch(format!(
                "unitary dimension {dim} is not a power of two ≥ 2"
            )));
        }
        if entries.len() != dim * dim {
            return Err(SimError::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        check_finite(&entries)?;
        let u = Self { dim, entries };
        let dev = u.max_unitarity_deviation();
        if dev > UNITARY_INPUT_TOL {
            return Err(SimError::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// max_{ij} |(U·U†)_{ij} - δ_{ij}|.
    pub fn max_unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut max_dev: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    s += self.entry(i, k) * self.entry(j, k).conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((s - target).norm());
            }
        }
        max_dev
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self::new(dim, entries)
    }

    /// Matrix product self · rhs.
    pub fn mul(&self, rhs: &Unitary) -> Result<Unitary> {
        if self.dim != rhs.dim {
            return Err(SimError::DimensionMismatch(format!(
                "product of {}x{} and {}x{} matrices",
                self.dim, self.dim, rhs.dim, rhs.dim
            )));
        }
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entry(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * rhs.entry(k, j);
                }
            }
        }
        Unitary::new(d, entries)
    }

    pub fn adjoint(&self) -> Unitary {
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entry(i, j).conj();
            }
        }
        Unitary {
            dim: d,
            entries,
        }
    }

    /// Kronecker product self ⊗ rhs.
    pub fn kron(&self, rhs: &Unitary) -> Result<Unitary> {
        let d1 = self.dim;
        let d2 = rhs.dim;
        let d = d1 * d2;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i1 in 0..d1 {
            for j1 in 0..d1 {
                let a = self.entry(i1, j1);
                for i2 in 0..d2 {
                    for j2 in 0..d2 {
                        entries[(i1 * d2 + i2) * d + (j1 * d2 + j2)] = a * rhs.entry(i2, j2);
                    }
                }
            }
        }
        Unitary::new(d, entries)
    }

    pub fn max_entry_distance(&self, other: &Unitary) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    // -- standard single-qubit gates -----------------------------------

    pub fn pauli_x() -> Unitary {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        Unitary {
            dim: 2,
            entries: vec![o, l, l, o],
        }
    }

    pub fn pauli_y() -> Unitary {
        let o = Complex64::new(0.0, 0.0);
        Unitary {
            dim: 2,
            entries: vec![o, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), o],
        }
    }

    pub fn pauli_z() -> Unitary {
        let o = Complex64::new(0.0, 0.0);
        Unitary {
            dim: 2,
            entries: vec![Complex64::new(1.0, 0.0), o, o, Complex64::new(-1.0, 0.0)],
        }
    }

    pub fn hadamard() -> Unitary {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Unitary {
            dim: 2,
            entries: vec![h, h, h, -h],
        }
    }

    /// R_y(2θ) = [[cos θ, -sin θ], [sin θ, cos θ]]; the argument is the full
    /// rotation angle 2θ.
    pub fn ry(two_theta: f64) -> Unitary {
        let theta = two_theta / 2.0;
        let c = Complex64::new(theta.cos(), 0.0);
        let s = Complex64::new(theta.sin(), 0.0);
        Unitary {
            dim: 2,
            entries: vec![c, -s, s, c],
        }
    }

    /// R_z(φ) = diag(e^{-iφ/2}, e^{iφ/2}).
    pub fn rz(phi: f64) -> Unitary {
        let o = Complex64::new(0.0, 0.0);
        Unitary {
            dim: 2,
            entries: vec![
                Complex64::from_polar(1.0, -phi / 2.0),
                o,
                o,
                Complex64::from_polar(1.0, phi / 2.0),
            ],
        }
    }
}

/// Block-diagonal two-qubit unitary |0⟩⟨0| ⊗ a + |1⟩⟨1| ⊗ b; the first
/// tensor factor is the control.
pub fn block_diag2(a: &Unitary, b: &Unitary) -> Result<Unitary> {
    if a.dim() != b.dim() {
        return Err(SimError::DimensionMismatch(format!(
            "block dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let d = a.dim();
    let dd = 2 * d;
    let mut entries = vec![Complex64::new(0.0, 0.0); dd * dd];
    for i in 0..d {
        for j in 0..d {
            entries[i * dd + j] = a.entry(i, j);
            entries[(d + i) * dd + (d + j)] = b.entry(i, j);
        }
    }
    Unitary::new(dd, entries)
}

/// Quantum-switch unitary: control |0⟩ applies u2·u1, control |1⟩ applies
/// u1·u2. The control qubit is the first tensor factor.
pub fn switch_unitary(u1: &Unitary, u2: &Unitary) -> Result<Unitary> {
    if u1.dim() != 2 || u2.dim() != 2 {
        return Err(SimError::DimensionMismatch(format!(
            "switch expects 2x2 operand gates, got {}x{} and {}x{}",
            u1.dim(),
            u1.dim(),
            u2.dim(),
            u2.dim()
        )));
    }
    for u in [u1, u2] {
        let dev = u.max_unitarity_deviation();
        if dev > UNITARY_INPUT_TOL {
            return Err(SimError::NotUnitary(dev));
        }
    }
    block_diag2(&u2.mul(u1)?, &u1.mul(u2)?)
}

/// Apply `u` to the named qubits (identity on the rest). `targets[0]` is the
/// most significant bit of the gate's own basis, matching the register
/// convention.
pub fn apply(state: &StateVector, u: &Unitary, targets: &[usize]) -> Result<StateVector> {
    let n = state.num_qubits();
    let k = targets.len();
    if u.dim() != (1usize << k) {
        return Err(SimError::DimensionMismatch(format!(
            "{}x{} gate applied to {} qubits",
            u.dim(),
            u.dim(),
            k
        )));
    }
    let mut seen = vec![false; n];
    for &t in targets {
        if t >= n {
            return Err(SimError::QubitIndexOutOfRange {
                index: t,
                num_qubits: n,
            });
        }
        if seen[t] {
            return Err(SimError::RepeatedQubitIndex(t));
        }
        seen[t] = true;
    }

    let shifts: Vec<usize> = targets.iter().map(|&t| n - 1 - t).collect();
    let mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let sub_dim = 1usize << k;
    // Position of gate-basis row r in the full index space.
    let spread = |r: usize| -> usize {
        let mut out = 0usize;
        for (j, &s) in shifts.iter().enumerate() {
            if (r >> (k - 1 - j)) & 1 == 1 {
                out |= 1 << s;
            }
        }
        out
    };
    let offsets: Vec<usize> = (0..sub_dim).map(spread).collect();

    let mut new_amps = state.amps.clone();
    let mut gathered = vec![Complex64::new(0.0, 0.0); sub_dim];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (r, &off) in offsets.iter().enumerate() {
            gathered[r] = state.amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for (c, &g) in gathered.iter().enumerate() {
                s += u.entry(r, c) * g;
            }
            new_amps[base | off] = s;
        }
    }

    let norm = l2_norm(&new_amps);
    if (norm - 1.0).abs() > KERNEL_TOL {
        return Err(SimError::NotNormalized(norm));
    }
    for a in &mut new_amps {
        *a /= norm;
    }
    Ok(StateVector {
        num_qubits: n,
        amps: new_amps,
        labels: state.labels.clone(),
    })
}

fn parity_of(outcome: &str) -> Parity {
    let minus = outcome.chars().filter(|&c| c == '-' || c == '1').count();
    if minus % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// In-place Walsh-Hadamard butterfly: v'[s] = Σ_b (-1)^{popcount(s & b)} v[b].
fn walsh_hadamard(v: &mut [Complex64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        let mut i = 0;
        while i < len {
            for j in i..i + h {
                let x = v[j];
                let y = v[j + h];
                v[j] = x + y;
                v[j + h] = x - y;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}

/// Project the named qubits onto every basis outcome and return the full
/// outcome table. Outcomes are enumerated lexicographically with '+' (or '0')
/// ordered first; probabilities sum to 1 within [`KERNEL_TOL`]. The collapsed
/// state covers the remaining qubits in register order.
pub fn measure_controls(
    state: &StateVector,
    control_indices: &[usize],
    basis: BasisKind,
) -> Result<Vec<OutcomeRecord>> {
    let n = state.num_qubits();
    let m = control_indices.len();
    if m == 0 {
        return Err(SimError::InvalidConfig(
            "no control qubits to measure".into(),
        ));
    }
    if m >= n {
        return Err(SimError::InvalidConfig(
            "measurement must leave at least one unmeasured qubit".into(),
        ));
    }
    let mut seen = vec![false; n];
    for &c in control_indices {
        if c >= n {
            return Err(SimError::QubitIndexOutOfRange {
                index: c,
                num_qubits: n,
            });
        }
        if seen[c] {
            return Err(SimError::RepeatedQubitIndex(c));
        }
        seen[c] = true;
    }

    let rest: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let rest_labels: Vec<String> = rest.iter().map(|&q| state.labels[q].clone()).collect();
    let control_shifts: Vec<usize> = control_indices.iter().map(|&c| n - 1 - c).collect();
    let rest_shifts: Vec<usize> = rest.iter().map(|&q| n - 1 - q).collect();
    let n_outcomes = 1usize << m;
    let rest_len = 1usize << rest.len();

    let mut branch_amps: Vec<Vec<Complex64>> =
        vec![vec![Complex64::new(0.0, 0.0); rest_len]; n_outcomes];
    let scale = 1.0 / (n_outcomes as f64).sqrt();

    let mut gathered = vec![Complex64::new(0.0, 0.0); n_outcomes];
    for r in 0..rest_len {
        let mut base = 0usize;
        for (j, &s) in rest_shifts.iter().enumerate() {
            if (r >> (rest.len() - 1 - j)) & 1 == 1 {
                base |= 1 << s;
            }
        }
        for (b, slot) in gathered.iter_mut().enumerate() {
            let mut idx = base;
            for (j, &s) in control_shifts.iter().enumerate() {
                if (b >> (m - 1 - j)) & 1 == 1 {
                    idx |= 1 << s;
                }
            }
            *slot = state.amps[idx];
        }
        match basis {
            BasisKind::Computational => {
                for (s, amp) in gathered.iter().enumerate() {
                    branch_amps[s][r] = *amp;
                }
            }
            BasisKind::PlusMinus => {
                walsh_hadamard(&mut gathered);
                for (s, amp) in gathered.iter().enumerate() {
                    branch_amps[s][r] = amp * scale;
                }
            }
        }
    }

    let mut records = Vec::with_capacity(n_outcomes);
    for (s, amps) in branch_amps.into_iter().enumerate() {
        let outcome: String = (0..m)
            .map(|j| {
                let bit = (s >> (m - 1 - j)) & 1;
                match (basis, bit) {
                    (BasisKind::PlusMinus, 0) => '+',
                    (BasisKind::PlusMinus, _) => '-',
                    (BasisKind::Computational, 0) => '0',
                    (BasisKind::Computational, _) => '1',
                }
            })
            .collect();
        let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let collapsed = StateVector::from_unnormalized(amps, rest_labels.clone())?;
        let parity = parity_of(&outcome);
        records.push(OutcomeRecord {
            outcome,
            probability,
            collapsed,
            parity,
        });
    }
    Ok(records)
}

/// |⟨a|b⟩|² convenience wrapper.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

/// True iff a and b agree modulo a global phase within tol.
pub fn global_phase_equal(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    a.global_phase_equal(b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket(bits: &str) -> StateVector {
        let idx = usize::from_str_radix(bits, 2).unwrap();
        StateVector::basis_state(bits.len(), idx).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = tensor(&[ket("0"), ket("0")]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn tensor_bell_with_plus() {
        let bell = StateVector::new(vec![
            c(1.0 / SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0 / SQRT_2, 0.0),
        ])
        .unwrap();
        let plus = StateVector::plus_state(1).unwrap();
        let s = tensor(&[bell, plus]).unwrap();
        let nonzero: Vec<f64> = s
            .amplitudes()
            .iter()
            .filter(|a| a.norm() > 1e-15)
            .map(|a| a.norm())
            .collect();
        assert_eq!(nonzero.len(), 4);
        for v in nonzero {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_shared_pair_with_two_plus_targets() {
        // Expansion of the 4-qubit initial state with both target
        // coefficients at 1/2: eight amplitudes of 1/(2√2) where the two
        // control bits agree, zero elsewhere.
        let bell = StateVector::new(vec![
            c(1.0 / SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0 / SQRT_2, 0.0),
        ])
        .unwrap();
        let plus = StateVector::plus_state(1).unwrap();
        let s = tensor(&[bell, plus.clone(), plus]).unwrap();
        let expected = 1.0 / (2.0 * SQRT_2);
        for (idx, amp) in s.amplitudes().iter().enumerate() {
            let a_bit = (idx >> 3) & 1;
            let b_bit = (idx >> 2) & 1;
            if a_bit == b_bit {
                assert!((amp.re - expected).abs() < 1e-15);
                assert!(amp.im.abs() < 1e-15);
            } else {
                assert!(amp.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn tensor_rejects_empty() {
        assert!(matches!(tensor(&[]), Err(SimError::EmptyTensorProduct)));
    }

    #[test]
    fn apply_x_flips_second_qubit() {
        let s = apply(&ket("00"), &Unitary::pauli_x(), &[1]).unwrap();
        assert!((s.fidelity(&ket("01")).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn apply_identity_is_bitwise_equal() {
        let s = StateVector::new(vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let out = apply(&s, &Unitary::identity(2).unwrap(), &[0]).unwrap();
        assert_eq!(s.amplitudes(), out.amplitudes());
    }

    #[test]
    fn apply_ry_matches_direct_two_by_two_multiply() {
        let plus = StateVector::plus_state(1).unwrap();
        let g = Unitary::ry(FRAC_PI_2);
        let out = apply(&plus, &g, &[0]).unwrap();
        // oracle: multiply the 2x2 matrix against the amplitude pair
        let expected: Vec<Complex64> = (0..2)
            .map(|r| {
                (0..2)
                    .map(|cx| g.entry(r, cx) * plus.amplitudes()[cx])
                    .sum()
            })
            .collect();
        for (a, e) in out.amplitudes().iter().zip(&expected) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_rejects_bad_targets() {
        let s = ket("00");
        assert!(matches!(
            apply(&s, &Unitary::pauli_x(), &[2]),
            Err(SimError::QubitIndexOutOfRange { .. })
        ));
        let cz4 = Unitary::identity(4).unwrap();
        assert!(matches!(
            apply(&s, &cz4, &[0, 0]),
            Err(SimError::RepeatedQubitIndex(0))
        ));
        assert!(matches!(
            apply(&s, &cz4, &[0]),
            Err(SimError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn ry_zero_is_identity() {
        assert!(Unitary::ry(0.0).max_entry_distance(&Unitary::identity(2).unwrap()) < 1e-15);
    }

    #[test]
    fn ry_half_pi_matrix() {
        // R_y(2θ) at θ = π/4.
        let g = Unitary::ry(FRAC_PI_2);
        let v = SQRT_2 / 2.0;
        let expected = [c(v, 0.0), c(-v, 0.0), c(v, 0.0), c(v, 0.0)];
        for (a, e) in g.entries().iter().zip(&expected) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn ry_products_compose_angles() {
        // matrix-product oracle: ry(π)·ry(π) == ry(2π) entrywise.
        let twice = Unitary::ry(PI).mul(&Unitary::ry(PI)).unwrap();
        assert!(twice.max_entry_distance(&Unitary::ry(2.0 * PI)) < 1e-15);
    }

    #[test]
    fn switch_of_identities_is_identity() {
        let id = Unitary::identity(2).unwrap();
        let sw = switch_unitary(&id, &id).unwrap();
        assert!(sw.max_entry_distance(&Unitary::identity(4).unwrap()) < 1e-15);
    }

    #[test]
    fn switch_blocks_hold_both_orders() {
        let r = Unitary::ry(FRAC_PI_2);
        let x = Unitary::pauli_x();
        let sw = switch_unitary(&r, &x).unwrap();
        let xr = x.mul(&r).unwrap();
        let rx = r.mul(&x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((sw.entry(i, j) - xr.entry(i, j)).norm() < 1e-15);
                assert!((sw.entry(2 + i, 2 + j) - rx.entry(i, j)).norm() < 1e-15);
                assert!(sw.entry(i, 2 + j).norm() < 1e-15);
                assert!(sw.entry(2 + i, j).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn switch_of_commuting_gates_has_equal_blocks() {
        let a = Unitary::rz(0.7);
        let b = Unitary::rz(-1.3);
        let sw = switch_unitary(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((sw.entry(i, j) - sw.entry(2 + i, 2 + j)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn switch_rejects_non_unitary() {
        let bad = Unitary {
            dim: 2,
            entries: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        };
        assert!(matches!(
            switch_unitary(&bad, &Unitary::pauli_x()),
            Err(SimError::NotUnitary(_))
        ));
    }

    #[test]
    fn measure_product_control_is_deterministic() {
        let plus = StateVector::plus_state(1).unwrap();
        let target = ket("1");
        let s = tensor(&[plus, target]).unwrap();
        let recs = measure_controls(&s, &[0], BasisKind::PlusMinus).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].outcome, "+");
        assert!((recs[0].probability - 1.0).abs() < 1e-12);
        assert!(recs[1].collapsed.is_none());
        assert!(recs[1].probability < 1e-14);
    }

    #[test]
    fn measurement_probabilities_sum_to_one() {
        let s = StateVector::new(vec![
            c(0.5, 0.0),
            c(0.0, 0.5),
            c(-0.5, 0.0),
            c(0.0, -0.5),
        ])
        .unwrap();
        for basis in [BasisKind::Computational, BasisKind::PlusMinus] {
            let recs = measure_controls(&s, &[0], basis).unwrap();
            let total: f64 = recs.iter().map(|r| r.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_basics() {
        let phi_plus = StateVector::new(vec![
            c(1.0 / SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0 / SQRT_2, 0.0),
        ])
        .unwrap();
        let phi_minus = StateVector::new(vec![
            c(1.0 / SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-1.0 / SQRT_2, 0.0),
        ])
        .unwrap();
        assert!((fidelity(&phi_plus, &phi_plus).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&phi_plus, &phi_minus).unwrap() < 1e-15);
        assert!(global_phase_equal(&phi_plus, &phi_plus.with_global_phase(c(0.0, 1.0)).unwrap(), 1e-12).unwrap());
        assert!((phi_plus.signed_fidelity(&phi_plus.with_global_phase(c(-1.0, 0.0)).unwrap()).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_rejects_dimension_mismatch() {
        let a = ket("0");
        let b = ket("00");
        assert!(matches!(
            fidelity(&a, &b),
            Err(SimError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn state_constructor_rejects_bad_input() {
        assert!(matches!(
            StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(SimError::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::new(vec![c(f64::NAN, 0.0), c(0.0, 0.0)]),
            Err(SimError::NonFinite)
        ));
        assert!(matches!(
            StateVector::new(vec![c(1.0, 0.0); 3]),
            Err(SimError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn permuted_swaps_qubits() {
        let s = apply(&ket("01"), &Unitary::hadamard(), &[0]).unwrap();
        let p = s.permuted(&[1, 0]).unwrap();
        // |ψ⟩ = H|0⟩ ⊗ |1⟩; swapped: |1⟩ ⊗ H|0⟩
        let expected = tensor(&[ket("1"), apply(&ket("0"), &Unitary::hadamard(), &[0]).unwrap()]).unwrap();
        assert!((p.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rz_convention() {
        let g = Unitary::rz(FRAC_PI_2);
        assert!((g.entry(0, 0) - Complex64::from_polar(1.0, -FRAC_PI_4)).norm() < 1e-15);
        assert!((g.entry(1, 1) - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
    }
}
