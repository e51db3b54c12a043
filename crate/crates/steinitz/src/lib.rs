//! Certified small-subset selection for convex hulls.
//!
//! Given m points in R^d whose convex hull contains the unit ball, the
//! pipeline in [`selection`] picks at most 2d of them whose hull still
//! contains the concentric ball of radius `1 / (2(m + d) + 1)`, and
//! certifies the actual inscribed radius by exhaustive polar vertex
//! enumeration. The construction re-centers the polar at the point where
//! the weighted vertex images sum to zero ([`center`]), takes a locally
//! maximal origin-anchored simplex, and closes the selection with an
//! anchored Caratheodory step.
//!
//! [`oracle`] provides seeded generators and an exhaustive best-subset
//! search used to cross-check certificates; [`macbeath`] is a Monte-Carlo
//! explorer for the symmetry center of a hull.

pub mod center;
pub mod cli;
pub mod error;
pub mod geom;
pub mod lp;
pub mod macbeath;
pub mod oracle;
pub mod polarity;
pub mod rng;
pub mod selection;

pub use error::{Error, Result};
pub use geom::{Tolerance, Vector};
pub use polarity::PointCloud;
