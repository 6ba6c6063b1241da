//! The Kodaira–Spencer pipeline on Higgs bundles: contraction of the Higgs
//! field with tangent cocycles, first-order deformations, their
//! equivalence, gradedness under scaling, and order-2 commutation.

pub mod deform;
pub mod integrability;
pub mod tangent;

pub use deform::{
    build_deformation, build_deformation_with, check_conditions, contract, deformations_equivalent,
    deformations_equivalent_with, gradedness_check, ks_cocycle, ks_cocycle_with, DeformedHiggsBundle, GradednessReport,
};
pub use integrability::{integrability_check, IntegrabilityReport, Order2Solver};
pub use tangent::{seeded_family, TangentCocycle};
