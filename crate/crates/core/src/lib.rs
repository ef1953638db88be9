//! Union-free generic (ufg) depth over closure systems.
//!
//! The crate covers finite formal contexts, mixed spatial, categorical and numerical
//! data (the plane with convex hulls, a nominal covariate and a real covariate), and
//! hierarchical digit codes. All arithmetic is exact.
//!
//! ```
//! use ufg_core::closures::{ClosureDescriptor, Element};
//! use ufg_core::depth::{ufg_depth, Weights};
//! use ufg_core::geometry::Point2;
//! use ufg_core::sample::Sample;
//!
//! let pts = [(0, 0), (4, 0), (0, 4)];
//! let sample = Sample::unit(pts.iter().map(|&(x, y)| Element::Point(Point2::from_ints(x, y))));
//! let query = Element::Point(Point2::from_ints(0, 0));
//! let res = ufg_depth(&sample, &[query], &ClosureDescriptor::convex2d(), &Weights::ones()).unwrap();
//! assert_eq!(res.queries[0].depth.to_string(), "5/3");
//! ```

pub mod closures;
pub mod context;
pub mod depth;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod ingest;
pub mod oracle;
pub mod rational;
pub mod sample;

pub use closures::{ClosedSet, ClosureDescriptor, Element};
pub use context::FormalContext;
pub use error::{Result, UfgError};
pub use rational::Rational;
pub use sample::{Observation, Sample};
