//! Deterministic simulator and analysis toolkit for heralded entanglement
//! generation between distant parties via coherently controlled gate orders.
//!
//! A pre-shared GHZ-type control state steers one quantum switch per party;
//! measuring the controls in the ± basis collapses the remote target qubits
//! onto maximally entangled, partially entangled, or separable states
//! depending on the rotation angle and the target coefficients. The crate
//! covers the full pipeline at desk scale:
//!
//! - [`qcore`]: dense state-vector and unitary kernel (tensor products, gate
//!   embedding, projective measurement, fidelities, the switch operator).
//! - [`protocol`]: the N-party engine, closed-form branch states, and the
//!   tabulated output classifiers.
//! - [`entanglement`]: partial traces, concurrence, GHZ fidelity, and the
//!   MES/PES/SS/Null classifier.
//! - [`optical`]: dual-rail (path ⊗ polarization) compilation of the
//!   two-party layout and the N-photon front end, with an equivalence audit
//!   against the abstract engine.
//! - [`efficiency`]: photon-loss budgets of the bus baseline vs. the
//!   shared-resource layout, enhancement curves, and crossover distances.
//! - [`graphstate`]: controlled-phase graph states and their construction
//!   from order-superposed gate pairs with local corrections.
//!
//! Everything is pure and deterministic: no RNG, no globals, outcome tables
//! enumerate the full distribution. All values are immutable after
//! construction and safe to share across threads.

pub mod efficiency;
pub mod entanglement;
pub mod error;
pub mod graphstate;
mod linalg;
pub mod optical;
pub mod protocol;
pub mod qcore;

pub use error::{Result, SimError};
pub use num_complex::Complex64;

pub use entanglement::{classify, concurrence, ghz_fidelity, reduce, Classification, StateClass};
pub use protocol::{branch_states, build_initial, run, ProtocolConfig};
pub use qcore::{
    apply, fidelity, global_phase_equal, measure_controls, switch_unitary, tensor, BasisKind,
    OutcomeRecord, Parity, StateVector, Unitary,
};
