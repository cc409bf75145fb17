//! Heuristic tour assembly by repeated local-connectivity rounds.
//!
//! Each round takes the weak components of the current multiset as the
//! partition and adds the Eulerian multiset that crosses them. No
//! approximation factor is claimed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeMultiset, TwoWeightDigraph};
use crate::local::{solve_local_connectivity, Partition, Prepared};

#[derive(Debug, Clone, Serialize)]
pub struct Tour {
    #[serde(skip)]
    pub f: EdgeMultiset,
    pub rounds: usize,
    pub weight: f64,
    /// `w(F) / OPT_LP`.
    pub ratio: f64,
}

pub fn assemble_tour(graph: &TwoWeightDigraph, prepared: &Prepared) -> Result<Tour> {
    let n = graph.vertex_count();
    let mut f = EdgeMultiset::empty(graph.edge_count());
    let mut rounds = 0;
    loop {
        let comps = f.weak_components(graph);
        if comps.len() == 1 {
            break;
        }
        if rounds >= n {
            return Err(Error::IterationLimit { limit: n });
        }
        let partition = Partition::new(n, comps.into_iter().map(|c| c.vertices).collect())?;
        let sol = solve_local_connectivity(graph, prepared, &partition)?;
        f.add_all(&sol.f);
        rounds += 1;
    }
    if !f.is_eulerian(graph) {
        return Err(Error::inconsistency("assembled tour is not Eulerian"));
    }
    let weight = f.weight(graph);
    let lp = prepared.x().objective;
    let ratio = if lp > 0.0 { weight / lp } else { f64::INFINITY };
    Ok(Tour {
        f,
        rounds,
        weight,
        ratio,
    })
}
