//! Čech data over small covers: charts, bundles, Higgs fields, cochain
//! complexes and their cohomology.

pub mod bundle;
pub mod cohomology;
pub mod complex;
pub mod cover;
pub mod stratification;
pub mod thickening;

pub use bundle::{validate_higgs, CheckStatus, HiggsBundleData, ValidationReport, VectorBundle};
pub use cohomology::{
    cech_h1, cohomology, euler_characteristic, find_primitive, is_hyper_coboundary, CohomologyGroup, DegreeWindow,
    PrimitiveSolver,
};
pub use complex::{
    Cochain, Complex, Component, HiggsComplex, HyperCocycle, Location, MThetaSign, SheafComplex, SheafKind,
};
pub use cover::{Chart, Cover, CoverRef, Overlap, Triple};
pub use stratification::{stratification_order2, stratification_order2_status};
pub use thickening::{interpolate_thickening, overlap_transport, Thickening, ThickeningData};
