//! Combinatorics of quadratic invariant laminations.
//!
//! Angles are exact rationals mod 1. The crate covers the doubling map
//! ([`circle`]), the Lavaurs pairing of periodic angles into minor leaves
//! ([`qml`]), itinerary-based laminations ([`lamination`]), matings of two
//! laminations ([`mating`]) and symbolic counting plus address arithmetic
//! ([`symdyn`]). [`cli`] drives the `lamlab` binary and [`render`] draws
//! chord diagrams.

pub mod circle;
pub mod cli;
pub mod error;
pub mod lamination;
pub mod limits;
pub mod mating;
pub mod qml;
pub mod render;
pub mod symdyn;

pub use circle::{Angle, Arc, Leaf};
pub use error::{Error, Result};
pub use lamination::{ItineraryWord, LaminationApprox, LaminationSpec, Piece, Polygon};
pub use mating::{EquivClass, MatingReport, MatingSpec};
pub use qml::MinorLeaf;
