//! Planar percolation laboratory.
//!
//! Lattice geometry and duality maps, reproducible counter-based sampling,
//! a dependent bond model, discrete Voronoi percolation, exact crossing
//! algorithms (including the constructive interface walk), cluster
//! observables and renormalization / enumeration tools.

pub mod cluster;
pub mod crossing;
pub mod depbond;
pub mod error;
pub mod lattice;
pub mod renorm;
pub mod rng;
pub mod sample;
pub mod stats;
pub mod unionfind;
pub mod voronoi;

pub use crate::crossing::{CrossingResult, Direction};
pub use crate::error::{Error, Result};
pub use crate::lattice::{Annulus, Dir, EdgeId, IRect, LatticeKind, Rect, Site, Surd, TriRect};
pub use crate::sample::{Configuration, Model, ModelParams};
