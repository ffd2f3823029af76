//! Geometry, certificates and combinatorics for planar four-bubble clusters.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arc_geometry;
pub mod bounds;
pub mod certificates;
pub mod cluster;
pub mod constructors;
pub mod newton;
pub mod render;
pub mod solver;
pub mod topology;

pub use arc_geometry::{ArcPolygon, DirectedArc, GeometryError, Point};
pub use cluster::{Cluster, ClusterError, Region, RegionId, StationarityReport};
pub use constructors::ConstructError;
