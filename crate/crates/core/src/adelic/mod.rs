//! Desk-scale adelic counting for SL(2) over F_q(t): places, local lattice
//! classes with their Iwasawa heights, weighted orbital integrals and the
//! two-sided fiber count, all with the base curve fixed to the projective
//! line.

pub mod count;
pub mod ff;
pub mod fps;
pub mod local;
pub mod places;
pub mod poly;

pub use count::{
    build_char, descent_check, fiber_count_direct, fiber_count_formula, gl2_bound_check,
    orbital_integral, vol_at, AdelicPoint, CharCase, CharDatum, WeightKind,
};
pub use ff::FiniteField;
pub use local::{local_springer, LocalClass};
pub use places::{places, Place, PlaceKind};
pub use poly::{Poly, RatFunc};
