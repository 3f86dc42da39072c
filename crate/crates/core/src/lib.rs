//! Generalized triangulations of 4-manifolds.
//!
//! Pentachora glued along tetrahedral facets, with face skeleta, validity
//! checks, integer homology, the five bistellar moves plus edge collapse,
//! canonical isomorphism signatures, simplification heuristics and a
//! dual-source search over the Pachner graph.

pub mod invariants;
pub mod io;
pub mod isosig;
pub mod moves;
pub mod perm;
pub mod search;
pub mod simplify;
pub mod skeleton;
pub mod triangulation;
pub mod validity;

pub use invariants::{homology, HomologyGroup, IntegerMatrix};
pub use io::{FacetList, IoError};
pub use isosig::IsoSig;
pub use moves::{Move, MoveKind};
pub use perm::Perm5;
pub use skeleton::{FVector, Skeleton};
pub use triangulation::{Gluing, Triangulation, TriangulationError};
pub use validity::ValidityReport;
