//! Rerouting part of a circulation through one auxiliary node per class.
//!
//! Shared by the two-weight pipeline (on split nodes) and the unweighted
//! subroutine (on vertices). Arcs may be split into parallel copies; every
//! refined arc remembers its base arc.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedArc {
    pub tail: usize,
    pub head: usize,
    pub value: f64,
    /// Index of the arc this one was split from (split arc or edge id).
    pub base: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinedNet {
    pub node_count: usize,
    pub arcs: Vec<RefinedArc>,
}

impl RefinedNet {
    pub fn imbalance(&self) -> f64 {
        let mut net = vec![0.0; self.node_count];
        for a in &self.arcs {
            net[a.head] += a.value;
            net[a.tail] -= a.value;
        }
        net.into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn in_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.node_count];
        for a in &self.arcs {
            deg[a.head] += a.value;
        }
        deg
    }
}

/// Selects arcs entering `members` with total value `target`, all from one
/// side as given by `side` (0 or 1). The side with larger entering mass wins,
/// ties going to side 0. At most one arc is split.
pub fn select_incoming(
    net: &mut RefinedNet,
    members: &[bool],
    target: f64,
    side: impl Fn(&RefinedArc) -> u8,
) -> Result<(Vec<usize>, u8)> {
    let entering: Vec<usize> = (0..net.arcs.len())
        .filter(|&a| {
            let arc = &net.arcs[a];
            !members[arc.tail] && members[arc.head] && arc.value > tol::ZERO
        })
        .collect();
    let mut mass = [0.0f64; 2];
    for &a in &entering {
        mass[side(&net.arcs[a]) as usize] += net.arcs[a].value;
    }
    let chosen: u8 = if mass[1] > mass[0] { 1 } else { 0 };
    if mass[chosen as usize] < target - tol::feas() {
        return Err(Error::inconsistency(format!(
            "entering mass {} on the larger side is below {target}",
            mass[chosen as usize]
        )));
    }
    let mut selected = Vec::new();
    let mut acc = 0.0;
    for a in entering {
        if side(&net.arcs[a]) != chosen {
            continue;
        }
        let need = target - acc;
        if need <= 1e-12 {
            break;
        }
        let value = net.arcs[a].value;
        if value <= need + 1e-12 {
            acc += value;
            selected.push(a);
        } else {
            let rest = RefinedArc {
                value: value - need,
                ..net.arcs[a]
            };
            net.arcs[a].value = need;
            net.arcs.push(rest);
            selected.push(a);
            break;
        }
    }
    Ok((selected, chosen))
}

#[derive(Debug, Clone, Serialize)]
pub struct Cycle {
    pub arcs: Vec<usize>,
    pub mass: f64,
}

/// Deterministic cycle decomposition: start at the smallest-id arc with
/// residual, leave every node by its largest-residual arc (smallest id on
/// ties), and peel off a cycle at the first repeated node.
pub fn cycle_decompose(net: &RefinedNet) -> Result<Vec<Cycle>> {
    let n = net.node_count;
    let mut rest: Vec<f64> = net.arcs.iter().map(|a| a.value).collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in net.arcs.iter().enumerate() {
        out[a.tail].push(i);
    }
    let mut cycles = Vec::new();
    let mut lost = 0.0f64;
    let mut next_start = 0;
    let mut pos = vec![usize::MAX; n];
    let limit = 2 * net.arcs.len() + 2;
    loop {
        while next_start < rest.len() && rest[next_start] <= tol::ZERO {
            next_start += 1;
        }
        if next_start == rest.len() {
            break;
        }
        if cycles.len() > limit * n.max(1) {
            return Err(Error::inconsistency(
                "cycle decomposition did not terminate",
            ));
        }
        let first = next_start;
        let mut path = vec![first];
        let mut touched = vec![net.arcs[first].tail];
        pos[net.arcs[first].tail] = 0;
        let mut v = net.arcs[first].head;
        loop {
            if pos[v] != usize::MAX {
                let start = pos[v];
                let cyc: Vec<usize> = path[start..].to_vec();
                let mass = cyc.iter().map(|&a| rest[a]).fold(f64::INFINITY, f64::min);
                for &a in &cyc {
                    rest[a] -= mass;
                    if rest[a] <= tol::ZERO {
                        lost += rest[a].max(0.0);
                        rest[a] = 0.0;
                    }
                }
                cycles.push(Cycle { arcs: cyc, mass });
                break;
            }
            pos[v] = path.len();
            touched.push(v);
            let mut best: Option<usize> = None;
            for &a in &out[v] {
                if rest[a] > tol::ZERO && best.is_none_or(|b| rest[a] > rest[b]) {
                    best = Some(a);
                }
            }
            match best {
                Some(a) => {
                    path.push(a);
                    v = net.arcs[a].head;
                }
                None => {
                    // Float dust: the node has no residual outflow.
                    let last = *path.last().expect("nonempty path");
                    lost += rest[last];
                    rest[last] = 0.0;
                    break;
                }
            }
        }
        for u in touched {
            pos[u] = usize::MAX;
        }
    }
    let mut recon = vec![0.0; net.arcs.len()];
    for c in &cycles {
        for &a in &c.arcs {
            recon[a] += c.mass;
        }
    }
    let residual = net
        .arcs
        .iter()
        .zip(&recon)
        .map(|(a, r)| (a.value - r).abs())
        .fold(0.0, f64::max);
    if residual > tol::DECOMPOSITION || lost > tol::DECOMPOSITION {
        return Err(Error::inconsistency(format!(
            "cycle decomposition residual {residual} (dropped {lost})"
        )));
    }
    Ok(cycles)
}

/// A class to reroute: its node set and chosen entering arcs.
#[derive(Debug, Clone, Serialize)]
pub struct ClassRoute {
    pub members: Vec<bool>,
    pub incoming: Vec<usize>,
    pub side: u8,
    /// `X⁺` with the mass each arc carries to the auxiliary node.
    pub exits: Vec<(usize, f64)>,
    /// The connector flow `g` inside the class.
    pub inner: Vec<(usize, f64)>,
}

/// An arc of the rerouted network: a refined arc, possibly with its tail
/// and/or head moved to an auxiliary node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub arc: usize,
    pub tail_class: Option<usize>,
    pub head_class: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Rerouted {
    pub net: RefinedNet,
    pub classes: Vec<ClassRoute>,
    pub pieces: Vec<Piece>,
}

impl Rerouted {
    pub fn aux_node(&self, class: usize) -> usize {
        self.net.node_count + class
    }

    pub fn total_nodes(&self) -> usize {
        self.net.node_count + self.classes.len()
    }

    pub fn piece_tail(&self, p: &Piece) -> usize {
        match p.tail_class {
            Some(i) => self.aux_node(i),
            None => self.net.arcs[p.arc].tail,
        }
    }

    pub fn piece_head(&self, p: &Piece) -> usize {
        match p.head_class {
            Some(i) => self.aux_node(i),
            None => self.net.arcs[p.arc].head,
        }
    }

    /// Largest imbalance of the rerouted vector over all nodes.
    pub fn imbalance(&self) -> f64 {
        let mut net = vec![0.0; self.total_nodes()];
        for p in &self.pieces {
            net[self.piece_head(p)] += p.value;
            net[self.piece_tail(p)] -= p.value;
        }
        net.into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn aux_in_degree(&self, class: usize) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.head_class == Some(class))
            .map(|p| p.value)
            .sum()
    }
}

/// Derives `X⁺` and `g` from the cycle decomposition and builds the rerouted
/// vector as the sum of the shortcut cycles.
pub fn build_rerouted(
    net: RefinedNet,
    mut classes: Vec<ClassRoute>,
    cycles: &[Cycle],
    expected: f64,
) -> Result<Rerouted> {
    let mut entry_class = vec![None; net.arcs.len()];
    for (i, c) in classes.iter().enumerate() {
        for &a in &c.incoming {
            entry_class[a] = Some(i);
        }
    }
    let mut pieces: BTreeMap<(usize, Option<usize>, Option<usize>), f64> = BTreeMap::new();
    let mut exits: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); classes.len()];
    let mut inner: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); classes.len()];
    for cycle in cycles {
        let len = cycle.arcs.len();
        let mut head_of: Vec<Option<usize>> = vec![None; len];
        let mut tail_of: Vec<Option<usize>> = vec![None; len];
        let mut internal = vec![false; len];
        for p in 0..len {
            let Some(i) = entry_class[cycle.arcs[p]] else {
                continue;
            };
            head_of[p] = Some(i);
            let members = &classes[i].members;
            let mut q = (p + 1) % len;
            let mut steps = 0;
            while members[net.arcs[cycle.arcs[q]].head] {
                internal[q] = true;
                q = (q + 1) % len;
                steps += 1;
                if steps > len {
                    return Err(Error::inconsistency(format!(
                        "a cycle enters class {i} and never leaves"
                    )));
                }
            }
            tail_of[q] = Some(i);
        }
        for p in 0..len {
            let a = cycle.arcs[p];
            if internal[p] {
                let i = (0..len)
                    .rev()
                    .map(|d| (p + len - d) % len)
                    .find_map(|r| head_of[r])
                    .expect("internal arcs follow an entry");
                *inner[i].entry(a).or_insert(0.0) += cycle.mass;
                continue;
            }
            if let Some(i) = tail_of[p] {
                *exits[i].entry(a).or_insert(0.0) += cycle.mass;
            }
            *pieces.entry((a, tail_of[p], head_of[p])).or_insert(0.0) += cycle.mass;
        }
    }
    for (i, c) in classes.iter_mut().enumerate() {
        c.exits = exits[i].iter().map(|(&a, &m)| (a, m)).collect();
        c.inner = inner[i].iter().map(|(&a, &m)| (a, m)).collect();
    }
    let pieces = pieces
        .into_iter()
        .filter(|&(_, v)| v > tol::ZERO)
        .map(|((arc, tail_class, head_class), value)| Piece {
            arc,
            tail_class,
            head_class,
            value,
        })
        .collect();
    let rerouted = Rerouted {
        net,
        classes,
        pieces,
    };
    for i in 0..rerouted.classes.len() {
        let deg = rerouted.aux_in_degree(i);
        if (deg - expected).abs() > tol::DECOMPOSITION {
            return Err(Error::inconsistency(format!(
                "auxiliary node of class {i} has in-degree {deg}, expected {expected}"
            )));
        }
    }
    let imbalance = rerouted.imbalance();
    if imbalance > tol::DECOMPOSITION {
        return Err(Error::inconsistency(format!(
            "rerouted vector unbalanced by {imbalance}"
        )));
    }
    Ok(rerouted)
}
