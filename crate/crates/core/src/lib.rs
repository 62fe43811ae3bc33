//! Liouvillian spectra of Lindblad chains with one strongly dissipated site:
//! exact dense diagonalization, and stripe-by-stripe eigenvalues through
//! order 1/Gamma near the Zeno limit.
//!
//! ```
//! use lindblad_zeno::lindblad_model::{presets, ZenoSetup};
//! use lindblad_zeno::zeno_spectrum::{zeno_spectrum, ZenoOptions};
//!
//! let setup = ZenoSetup::new(&presets::two_qubit(100.0)).unwrap();
//! let z = zeno_spectrum(&setup, &ZenoOptions::default()).unwrap();
//! assert_eq!(z.len(), 16);
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod exact_spectrum;
pub mod linalg;
pub mod lindblad_model;
pub mod operator_algebra;
pub mod zeno_spectrum;

pub use error::{Error, Result};
pub use operator_algebra::C64;
