//! Dual-rail photonic model: each photon carries a path qubit and a
//! polarization qubit. Photon `i` occupies register positions `2i` (path)
//! and `2i + 1` (polarization); H = 0, V = 1, and the input rail is path 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::protocol::{run, ProtocolConfig};
use crate::qcore::{apply, block_diag2, measure_controls, BasisKind, StateVector, Unitary};

/// Path ⊗ polarization coordinates of a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhotonMode {
    pub path: u8,
    pub polarization: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    /// Half-wave plate at the given fast-axis angle (degrees).
    Hwp { angle_deg: f64 },
    /// Quarter-wave plate at the given fast-axis angle (degrees).
    Qwp { angle_deg: f64 },
    /// Polarizing beam splitter: transmits H, routes V to the other path.
    Pbs,
    /// Balanced beam splitter on the path qubit.
    Bs,
    /// Relative phase on the |1⟩ path arm.
    PathPhase { phase: Complex64 },
}

/// One placed element. Waveplates act on polarization, either in both arms
/// (`arm: None`) or conditioned on the path bit; PBS acts on path ⊗
/// polarization; BS and arm phases act on the path qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalElement {
    pub kind: ElementKind,
    pub photon: usize,
    pub arm: Option<u8>,
}

/// Detector coincidence labels for the two-photon layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DetectorPair {
    D1D2,
    D1D4,
    D3D2,
    D3D4,
}

impl DetectorPair {
    pub fn label(&self) -> &'static str {
        match self {
            DetectorPair::D1D2 => "D1-D2",
            DetectorPair::D1D4 => "D1-D4",
            DetectorPair::D3D2 => "D3-D2",
            DetectorPair::D3D4 => "D3-D4",
        }
    }

    /// The (±, ±) control outcome this coincidence heralds.
    pub fn plus_minus(&self) -> &'static str {
        match self {
            DetectorPair::D1D2 => "++",
            DetectorPair::D1D4 => "+-",
            DetectorPair::D3D2 => "-+",
            DetectorPair::D3D4 => "--",
        }
    }

    fn from_path_bits(bits: &str) -> DetectorPair {
        match bits {
            "00" => DetectorPair::D1D2,
            "01" => DetectorPair::D1D4,
            "10" => DetectorPair::D3D2,
            _ => DetectorPair::D3D4,
        }
    }
}

/// One coincidence outcome: its probability and the heralded two-photon
/// polarization state (`None` for dark outcomes).
#[derive(Debug, Clone)]
pub struct CoincidenceOutcome {
    pub pair: DetectorPair,
    pub probability: f64,
    pub polarization_state: Option<StateVector>,
}

/// Jones matrix of a half-wave plate at fast-axis angle λ (degrees):
/// [[cos 2λ, sin 2λ], [sin 2λ, -cos 2λ]].
pub fn hwp(lambda_deg: f64) -> Unitary {
    hwp_rad(lambda_deg.to_radians())
}

fn hwp_rad(lambda: f64) -> Unitary {
    let c = Complex64::new((2.0 * lambda).cos(), 0.0);
    let s = Complex64::new((2.0 * lambda).sin(), 0.0);
    Unitary::new(2, vec![c, s, s, -c]).expect("half-wave plate matrix is unitary")
}

/// Jones matrix of a quarter-wave plate at fast-axis angle ξ (degrees):
/// [[cos²ξ + i·sin²ξ, (1-i)·sinξ·cosξ], [(1-i)·sinξ·cosξ, sin²ξ + i·cos²ξ]].
pub fn qwp(xi_deg: f64) -> Unitary {
    let xi = xi_deg.to_radians();
    let (c, s) = (xi.cos(), xi.sin());
    let diag0 = Complex64::new(c * c, s * s);
    let diag1 = Complex64::new(s * s, c * c);
    let off = Complex64::new(1.0, -1.0) * (s * c);
    Unitary::new(2, vec![diag0, off, off, diag1]).expect("quarter-wave plate matrix is unitary")
}

/// Balanced beam splitter on the path basis: (1/√2)[[1, 1], [1, -1]].
pub fn bs() -> Unitary {
    let h = Complex64::new(1.0 / std::f64::consts::SQRT_2, 0.0);
    Unitary::new(2, vec![h, h, h, -h]).expect("beam splitter matrix is unitary")
}

/// Polarizing beam splitter on one photon's path ⊗ polarization space:
/// H keeps its path, V toggles it. Self-inverse, reflection phase +1.
pub fn pbs() -> Unitary {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    Unitary::new(
        4,
        vec![
            l, o, o, o, //
            o, o, o, l, //
            o, o, l, o, //
            o, l, o, o,
        ],
    )
    .expect("polarizing beam splitter matrix is unitary")
}

/// Polarization analyzer before a detector: light passes the QWP, then the
/// HWP, then a PBS. Measuring H/V after this unitary realizes a projective
/// measurement in the basis selected by the two plate angles.
pub fn analyzer_unitary(qwp_deg: f64, hwp_deg: f64) -> Result<Unitary> {
    hwp(hwp_deg).mul(&qwp(qwp_deg))
}

fn apply_element(state: &StateVector, elem: &OpticalElement) -> Result<StateVector> {
    let path = 2 * elem.photon;
    let pol = 2 * elem.photon + 1;
    match elem.kind {
        ElementKind::Hwp { angle_deg } | ElementKind::Qwp { angle_deg } => {
            let gate = match elem.kind {
                ElementKind::Hwp { .. } => hwp(angle_deg),
                _ => qwp(angle_deg),
            };
            match elem.arm {
                None => apply(state, &gate, &[pol]),
                Some(arm) => {
                    let id = Unitary::identity(2)?;
                    let blocked = if arm == 0 {
                        block_diag2(&gate, &id)?
                    } else {
                        block_diag2(&id, &gate)?
                    };
                    apply(state, &blocked, &[path, pol])
                }
            }
        }
        ElementKind::Pbs => apply(state, &pbs(), &[path, pol]),
        ElementKind::Bs => apply(state, &bs(), &[path]),
        ElementKind::PathPhase { phase } => {
            let o = Complex64::new(0.0, 0.0);
            let gate = Unitary::new(2, vec![Complex64::new(1.0, 0.0), o, o, phase])?;
            apply(state, &gate, &[path])
        }
    }
}

/// Apply a sequence of elements in temporal order.
pub fn apply_circuit(state: &StateVector, elements: &[OpticalElement]) -> Result<StateVector> {
    let mut s = state.clone();
    for elem in elements {
        s = apply_element(&s, elem)?;
    }
    Ok(s)
}

/// The two-photon circuit: PBS split, state-preparation HWPs (λ in the 0
/// arm, λ+45° in the 1 arm), per-arm gate orders (X·R_y(2θ) on path 0,
/// R_y(2θ)·X on path 1, both compiled from wave plates), an optional arm
/// phase, and the two beam splitters.
pub fn two_photon_circuit(
    theta: f64,
    lambda1_deg: f64,
    lambda2_deg: f64,
    arm_phase: Complex64,
) -> Vec<OpticalElement> {
    let mut elems = Vec::new();
    let lambdas = [lambda1_deg, lambda2_deg];
    for photon in 0..2 {
        elems.push(OpticalElement {
            kind: ElementKind::Pbs,
            photon,
            arm: None,
        });
    }
    for photon in 0..2 {
        elems.push(OpticalElement {
            kind: ElementKind::Hwp { angle_deg: lambdas[photon] },
            photon,
            arm: Some(0),
        });
        elems.push(OpticalElement {
            kind: ElementKind::Hwp { angle_deg: lambdas[photon] + 45.0 },
            photon,
            arm: Some(1),
        });
    }
    // R_y(2θ) compiles to an HWP at 0° followed by an HWP at θ/2 (degrees);
    // X is an HWP at 45°.
    let half_theta_deg = theta.to_degrees() / 2.0;
    for photon in 0..2 {
        for (angle, arm) in [
            (0.0, 0u8),
            (half_theta_deg, 0),
            (45.0, 0),
            (45.0, 1),
            (0.0, 1),
            (half_theta_deg, 1),
        ] {
            elems.push(OpticalElement {
                kind: ElementKind::Hwp { angle_deg: angle },
                photon,
                arm: Some(arm),
            });
        }
    }
    if arm_phase != Complex64::new(1.0, 0.0) {
        for photon in 0..2 {
            elems.push(OpticalElement {
                kind: ElementKind::PathPhase { phase: arm_phase },
                photon,
                arm: None,
            });
        }
    }
    for photon in 0..2 {
        elems.push(OpticalElement {
            kind: ElementKind::Bs,
            photon,
            arm: None,
        });
    }
    elems
}

/// Initial two-photon resource: polarization Bell pair (|HH⟩ + |VV⟩)/√2 with
/// both photons on their input rail.
pub fn two_photon_initial_state() -> Result<StateVector> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    let h = 1.0 / std::f64::consts::SQRT_2;
    amps[0b0000] = Complex64::new(h, 0.0);
    amps[0b0101] = Complex64::new(h, 0.0);
    StateVector::with_labels(
        amps,
        ["path_a", "pol_a", "path_b", "pol_b"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    )
}

/// Simulate the two-photon layout and detect the path qubits. Outcomes are
/// returned in path order 00, 01, 10, 11 (D1-D2, D1-D4, D3-D2, D3-D4).
pub fn simulate_two_photon_layout(
    theta: f64,
    lambda1_deg: f64,
    lambda2_deg: f64,
) -> Result<Vec<CoincidenceOutcome>> {
    simulate_two_photon_layout_with_phase(theta, lambda1_deg, lambda2_deg, Complex64::new(1.0, 0.0))
}

/// Same as [`simulate_two_photon_layout`] with an explicit interferometric phase on both
/// |1⟩ arms (the layout itself fixes no convention; 1 is the reference).
pub fn simulate_two_photon_layout_with_phase(
    theta: f64,
    lambda1_deg: f64,
    lambda2_deg: f64,
    arm_phase: Complex64,
) -> Result<Vec<CoincidenceOutcome>> {
    if !(theta.is_finite() && lambda1_deg.is_finite() && lambda2_deg.is_finite()) {
        return Err(SimError::InvalidConfig("angles must be finite".into()));
    }
    let state = apply_circuit(
        &two_photon_initial_state()?,
        &two_photon_circuit(theta, lambda1_deg, lambda2_deg, arm_phase),
    )?;
    let records = measure_controls(&state, &[0, 2], BasisKind::Computational)?;
    Ok(records
        .into_iter()
        .map(|r| CoincidenceOutcome {
            pair: DetectorPair::from_path_bits(&r.outcome),
            probability: r.probability,
            polarization_state: r.collapsed,
        })
        .collect())
}

/// Per-outcome comparison between the optical layout and the switch engine.
#[derive(Debug, Clone)]
pub struct OutcomeComparison {
    pub pair: DetectorPair,
    pub optical_probability: f64,
    pub abstract_probability: f64,
    /// 1 - fidelity modulo global phase; 0 when both sides vanish, 1 when
    /// exactly one side vanishes.
    pub infidelity: f64,
}

/// Equivalence audit between the photonic layout and the abstract protocol.
#[derive(Debug, Clone)]
pub struct OpticalReport {
    pub max_infidelity: f64,
    pub total_variation_distance: f64,
    pub per_outcome: Vec<OutcomeComparison>,
}

impl OpticalReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_infidelity <= tol && self.total_variation_distance <= tol
    }
}

/// Compare the two-photon layout against the abstract two-party run with
/// α_A = cos²2λ₁ and α_B = cos²2λ₂, pairing detector coincidences with (±, ±)
/// outcomes. Mismatches are reported, never thrown.
pub fn verify_against_abstract(
    theta: f64,
    lambda1_deg: f64,
    lambda2_deg: f64,
    _tol: f64,
) -> Result<OpticalReport> {
    let optical = simulate_two_photon_layout(theta, lambda1_deg, lambda2_deg)?;
    let alpha_a = (2.0 * lambda1_deg.to_radians()).cos().powi(2);
    let alpha_b = (2.0 * lambda2_deg.to_radians()).cos().powi(2);
    let cfg = ProtocolConfig::standard(2, theta, vec![alpha_a, alpha_b])?;
    let abstract_records = run(&cfg)?;

    let mut per_outcome = Vec::with_capacity(4);
    let mut max_inf: f64 = 0.0;
    let mut tvd = 0.0;
    for (opt, abs) in optical.iter().zip(&abstract_records) {
        debug_assert_eq!(opt.pair.plus_minus(), abs.outcome);
        let infidelity = match (&opt.polarization_state, &abs.collapsed) {
            (None, None) => 0.0,
            (Some(a), Some(b)) => 1.0 - a.fidelity(b)?,
            _ => 1.0,
        };
        tvd += 0.5 * (opt.probability - abs.probability).abs();
        max_inf = max_inf.max(infidelity);
        per_outcome.push(OutcomeComparison {
            pair: opt.pair,
            optical_probability: opt.probability,
            abstract_probability: abs.probability,
            infidelity,
        });
    }
    Ok(OpticalReport {
        max_infidelity: max_inf,
        total_variation_distance: tvd,
        per_outcome,
    })
}

/// Front-end of the N-photon layout: a polarization GHZ resource passes one
/// PBS + HWP block per photon, turning polarization entanglement into path
/// entanglement with product polarizations. Register order is interleaved
/// [path_0, pol_0, path_1, pol_1, …].
pub fn block_stage(lambdas_deg: &[f64]) -> Result<StateVector> {
    let n = lambdas_deg.len();
    if n < 2 {
        return Err(SimError::InvalidConfig(
            "block stage needs at least 2 photons".into(),
        ));
    }
    if 2 * n > 22 {
        return Err(SimError::TooManyParties {
            requested: n,
            cap: 11,
        });
    }
    let qubits = 2 * n;
    let len = 1usize << qubits;
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    let h = 1.0 / std::f64::consts::SQRT_2;
    // |H…H⟩ on all polarization bits, paths 0.
    amps[0] = Complex64::new(h, 0.0);
    // |V…V⟩: polarization bits are the odd register positions.
    let mut v_index = 0usize;
    for i in 0..n {
        v_index |= 1 << (qubits - 1 - (2 * i + 1));
    }
    amps[v_index] = Complex64::new(h, 0.0);
    let labels = (0..n)
        .flat_map(|i| [format!("path_{i}"), format!("pol_{i}")])
        .collect();
    let mut state = StateVector::with_labels(amps, labels)?;

    for (photon, &lambda) in lambdas_deg.iter().enumerate() {
        let stage = [
            OpticalElement {
                kind: ElementKind::Pbs,
                photon,
                arm: None,
            },
            OpticalElement {
                kind: ElementKind::Hwp { angle_deg: lambda },
                photon,
                arm: Some(0),
            },
            OpticalElement {
                kind: ElementKind::Hwp { angle_deg: lambda + 45.0 },
                photon,
                arm: Some(1),
            },
        ];
        state = apply_circuit(&state, &stage)?;
    }
    Ok(state)
}
