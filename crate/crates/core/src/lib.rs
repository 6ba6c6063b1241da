//! Exact-arithmetic workbench for λ-connections, first-order transport along
//! infinitesimally close maps, and the nonabelian Kodaira–Spencer map on
//! Higgs bundles presented by Čech data.

pub mod builtin;
pub mod cech;
pub mod conn;
pub mod error;
pub mod ks;
pub mod linalg;
pub mod report;
pub mod ring;
pub mod sampling;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
