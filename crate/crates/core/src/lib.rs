//! Local-Connectivity ATSP on directed graphs with two edge weights.
//!
//! The pipeline solves the Held-Karp relaxation, routes the expensive flow
//! to a small terminal set, builds the split graph with its lower bound, and
//! produces for any vertex partition an Eulerian edge multiset that crosses
//! every class while each weak component stays within a constant factor of
//! the lower bound. Every guarantee is re-checked at runtime.

pub mod brute;
pub mod error;
pub mod flow;
pub mod flow_routing;
pub mod generate;
pub mod graph;
pub mod held_karp;
pub mod io;
pub mod local;
pub mod lp;
pub mod pipeline;
pub mod simplex;
pub mod split;
pub mod tol;
pub mod tour;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{CutSpec, Direction, EdgeMultiset, TwoWeightDigraph, WeightClass};
pub use held_karp::{enumerate_held_karp, solve_held_karp, FractionalCirculation};
