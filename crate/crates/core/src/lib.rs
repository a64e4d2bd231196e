//! Which finite abelian groups are unit groups of commutative rings.
//!
//! The crate pairs a rule-based classifier ([`classify`]) with witness rings
//! ([`witness`]) and independent oracles that compute unit groups of
//! presented rings ([`oracle`]).

pub mod abelian;
pub mod arith;
pub mod classify;
pub mod config;
pub mod density;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod poly;
pub mod witness;

pub use abelian::AbelianGroup;
pub use classify::{RingClass, RuleSet, Status, Verdict};
pub use config::Config;
pub use error::{Error, Result};
pub use gaussian::GaussianInt;
pub use oracle::{evaluate, ModuleRing, UnitGroupReport};
pub use poly::{build_module_ring, RingPresentation};
pub use witness::{verify_certificate, WitnessCertificate};
