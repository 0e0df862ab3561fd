//! Exact Newton polygon formalism on truncated Mal'cev-Neumann series.
//!
//! * [`domains`]: coefficient rings and their valuations;
//! * [`series`]: `t`-adic and `p`-adic series, Gauss valuations, argnorm witnesses;
//! * [`polygon`]: Newton polygons, the infimum Legendre transform, formalism checks;
//! * [`duconstruct`]: discrete approximation, the profile elements `g_mu`,
//!   asymptotic classes and chain-separation reports;
//! * [`verify`]: seeded property suites over all of the above.

pub mod domains;
pub mod duconstruct;
pub mod literal;
pub mod polygon;
pub mod series;
pub mod value;
pub mod verify;

pub use domains::{Coefficient, CoefficientDomain, Denominators, DomainError};
pub use literal::{parse_series, LiteralError};
pub use polygon::{legendre_eval, newton_polygon, PLConvexFn};
pub use series::{Mode, Series, SeriesError};
pub use value::{Exponent, GaussParam, Precision, Value};
