//! Deterministic simulator and analysis toolkit for collective atomic recoil
//! lasing and superradiant Rayleigh scattering of cold atoms in a pumped ring
//! cavity: gain formulas and regime classification, the semiclassical coupled
//! equations of motion with mirror backscattering and radiation pressure, and
//! a sweep/repro harness for the standard parameter studies.

pub mod constants;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod fit;
pub mod gain;
pub mod observables;
pub mod params;
pub mod pump;
pub mod repro;
pub mod scenario;
pub mod sweep;

pub use error::{CarlError, Result};
