//! Exact coefficient arithmetic: rationals, Laurent polynomials, rings with
//! square-zero nilpotents, homomorphisms, differentials and the Rees family.

pub mod element;
pub mod hom;
pub mod kaehler;
pub mod laurent;
pub mod matrix;
pub mod parse;
pub mod rees;
pub mod scalar;

pub use element::{NilShape, Ring, RingElem, RingRef};
pub use hom::{hom_square_zero_close, interpolate_homs, RingHom};
pub use kaehler::KaehlerForm;
pub use laurent::{Exponents, LaurentPoly, Vars};
pub use matrix::Matrix;
pub use parse::{parse_elem, parse_poly};
pub use rees::{gm_twist_check, rees_trivialize, rees_untrivialize, FirstOrderDiagonal, ReesElem};
pub use scalar::Scalar;
