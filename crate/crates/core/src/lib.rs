//! Photodetection models with a coherent electric-magnetic detector
//! response.
//!
//! A conventional photodetector responds to the electric field alone. This
//! crate models detectors whose excitation amplitude mixes the electric and
//! the (rescaled) magnetic field with a complex ratio ζ, and works out the
//! consequences in three analytically solvable settings:
//!
//! - [`farfield`] — two in-phase dipoles observed in the radiation zone.
//!   The response rescales the detection pattern by |1+ζ|², leaving fringe
//!   positions untouched and cancelling the signal entirely at ζ = -1.
//! - [`onephoton`] — a single photon on two counter-propagating modes. The
//!   response rotates the measured one-photon basis, trading fringe
//!   visibility against path distinguishability through V² + B² = 1, with
//!   the POVM element and Bloch-sphere picture available explicitly.
//! - [`resonant`] — a lossy resonance coupled through electric and magnetic
//!   radiative channels. Balanced couplings silence the dark output channel
//!   while the mode stays excited; at critical coupling the matched input
//!   is absorbed completely.
//!
//! [`sampler`] generates synthetic detection events from the one-photon
//! probability law and recovers visibility and fringe phase statistically.
//! [`verify`] bundles the whole invariant suite behind a single call.
//! Sweeps return [`scan::ScanTable`], which serializes deterministically to
//! CSV or JSON.
//!
//! All operations are pure functions of their arguments and safe to call
//! concurrently.
//!
//! ```
//! use emdet::onephoton::{self, FieldScale, OnePhotonState};
//! use emdet::response::ComplexResponse;
//!
//! let state = OnePhotonState::from_relative_phase(0.0);
//! let detector = ComplexResponse::real(0.5).unwrap();
//! let p = onephoton::detection_probability(
//!     &state, &detector, 0.0, &FieldScale::default(), 2.0 * std::f64::consts::PI,
//! );
//! assert!((p - 2.0).abs() < 1e-12);
//! assert!((onephoton::visibility(&detector) - 0.6).abs() < 1e-12);
//! ```

pub mod error;
pub mod farfield;
pub mod onephoton;
pub mod resonant;
pub mod response;
pub mod sampler;
pub mod scan;
pub mod verify;

pub use error::{Error, Result};
pub use response::ComplexResponse;
pub use scan::ScanTable;
