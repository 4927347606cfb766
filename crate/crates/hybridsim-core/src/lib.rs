//! Numerical core for simulating the distribution of hybrid CV-DV
//! entanglement over lossy bosonic channels.
//!
//! The library answers one quantitative question: given a hybrid entangled
//! state between a continuous-variable mode (a Schrodinger-cat superposition)
//! and a discrete-variable qubit-like mode, is it better to send both modes
//! directly through lossy down-links, or to distribute one half and then
//! teleport the other through an attenuated two-mode-squeezed-vacuum channel?
//! Both routes are scored by Uhlmann fidelity against the ideal state and by
//! logarithmic negativity of the surviving entanglement.
//!
//! Module map:
//!
//! * [`fock`]: truncated-Fock-space states, tensor algebra, beam splitters,
//!   fidelity and negativity metrics.
//! * [`hybrid`]: constructors for the exact hybrid entangled state and its
//!   large-cat, small-cat, and coherent-state variants.
//! * [`channel`]: transmissivity pairs and dB conversions for the two lossy
//!   down-links.
//! * [`direct`]: direct distribution of both modes through beam-splitter
//!   loss, in closed form and via a brute-force four-mode reference.
//! * [`dv_teleport`]: teleportation of the DV mode through the attenuated
//!   TMSV channel using closed-form Fock transfer coefficients.
//! * [`cv_teleport`]: teleportation of the CV mode in the
//!   characteristic-function picture, with closed-form fidelities and a
//!   Gauss-Hermite quadrature oracle.

pub mod channel;
pub mod cv_teleport;
pub mod direct;
pub mod dv_teleport;
pub mod fock;
pub mod hybrid;

pub use channel::ChannelPair;
pub use fock::{
    uhlmann_fidelity, C64, DensityMatrix, FockError, FockResult, StateVector, TruncationPolicy,
};
pub use cv_teleport::{CvError, CvResult, ExponentReading};
pub use direct::{direct_metrics, direct_metrics_for_state, direct_state_analytic};
pub use dv_teleport::{choose_kmax, dv_metrics, FockTruncation, TeleportParams};
pub use hybrid::{HybridSpec, HybridVariant};
