//! Random nice quadrangulations: labeled plane trees, Schaeffer's bijection,
//! exact samplers, and a discrete Brownian snake reference simulator.
//!
//! Integer combinatorics (trees, labels, maps) is exact. Real-valued parts
//! (offspring law, rescaling constants, snake paths, distance grids and the
//! comparators in [`stats`]) are generic over [`Scalar`], with `f64`
//! aliases exported at the crate root.

pub mod error;
pub mod experiments;
pub mod map;
pub mod sampling;
pub mod scalar;
pub mod schaeffer;
pub mod snake;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use map::{HalfEdgeMap, MapHeader, Quadrangulation};
pub use sampling::{
    enumerate, enumerate_trees, sample_gw_conditioned, sample_nice_tree, sample_plain_tree,
    LabeledTreeSampler, Model, SamplerConfig, TreePredicate,
};
pub use scalar::Scalar;
pub use schaeffer::phi;
pub use tree::{ContourCoding, LabeledTree, PlaneTree, TreeClass};

pub type OffspringLawF64 = sampling::OffspringLaw<f64>;
pub type OffspringLawF32 = sampling::OffspringLaw<f32>;
pub type SnakePathF64 = snake::SnakePath<f64>;
pub type SnakePathF32 = snake::SnakePath<f32>;
pub type RescaleConstantsF64 = snake::RescaleConstants<f64>;
pub type RescaleConstantsF32 = snake::RescaleConstants<f32>;
pub type DistanceGridF64 = snake::DistanceGrid<f64>;
pub type DistanceGridF32 = snake::DistanceGrid<f32>;
