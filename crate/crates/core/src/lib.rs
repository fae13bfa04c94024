//! Exhaustive enumeration of Artin-Schreier curve families y^p - y = f(x)
//! over small finite fields, with exact zeta functions and the statistics
//! built from them.

pub mod bs;
pub mod cache;
pub mod curve;
pub mod cyclo;
pub mod families;
pub mod gfq;
pub mod polyring;
pub mod scan;
pub mod stats;
pub mod zeta;

/// Exact rationals used for predicted densities and averages.
pub type Q = num_rational::Ratio<i128>;

pub use curve::{Reduced, Reduction};
pub use cyclo::Cyc;
pub use families::{Family, FamilyKind, FamilySpec, Member, PoleData};
pub use gfq::{Fe, FieldTower, Level, P1};
pub use polyring::{FactorizationType, Form, Place, Poly, PolyRing};
pub use zeta::{CurveZeta, Eigen, ZetaOpts};
