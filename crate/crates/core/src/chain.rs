//! ε-chains and chain recurrence through box graphs.
//!
//! An edge `B → B′` is recorded when a sampled point of `B` has an image
//! within `ε` plus the cell radius of the center of `B′`. Σ₂ cylinders are
//! mapped exactly: every sample of a cylinder has the same first symbols, so
//! the set distance to a target cylinder does not depend on the sample.

use std::collections::VecDeque;
use std::io::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{Ifs, Symbol};
use crate::orbit::PseudoOrbit;
use crate::spaces::BoxCover;
use crate::spaces::Point;

pub const DEFAULT_SAMPLES: usize = 9;

#[derive(Clone, Debug)]
pub struct ChainGraph {
    cover: BoxCover,
    eps: f64,
    samples: usize,
    seed: u64,
    active: Vec<bool>,
    edges: Vec<Vec<usize>>,
}

impl ChainGraph {
    pub fn cover(&self) -> &BoxCover {
        &self.cover
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Step error realized along any graph path: `ε + 2·radius`.
    pub fn effective_eps(&self) -> f64 {
        self.eps + 2.0 * self.cover.max_radius()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Whether the box meets the space; other boxes carry no edges.
    pub fn is_active(&self, index: usize) -> bool {
        self.active[index]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Sorted successors of a box.
    pub fn successors(&self, index: usize) -> &[usize] {
        &self.edges[index]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges[from].binary_search(&to).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// One `from to` pair per line, preceded by `#` comment metadata.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# boxes: {}", self.len())?;
        writeln!(out, "# eps: {}", self.eps)?;
        writeln!(out, "# effective_eps: {}", self.effective_eps())?;
        writeln!(out, "# resolution: {}", self.cover.resolution())?;
        writeln!(out, "# samples: {}", self.samples)?;
        writeln!(out, "# seed: {}", self.seed)?;
        for (from, succ) in self.edges.iter().enumerate() {
            for to in succ {
                writeln!(out, "{from} {to}")?;
            }
        }
        Ok(())
    }
}

/// Builds the ε-chain graph of `ifs` on a uniform cover.
pub fn build_chain_graph(ifs: &Ifs, resolution: usize, eps: f64, samples: usize, seed: u64) -> Result<ChainGraph> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let cover = BoxCover::new(ifs.space(), resolution)?;
    let active: Vec<bool> = (0..cover.len()).map(|i| cover.meets_space(i)).collect();
    let edges: Vec<Vec<usize>> = (0..cover.len())
        .into_par_iter()
        .map(|index| {
            if !active[index] {
                return Vec::new();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let points = cover.samples(index, samples, &mut rng);
            let mut out = Vec::new();
            for p in &points {
                for s in 0..ifs.len() {
                    let y = ifs.image(s, p);
                    out.extend(cover.near(&y, eps).into_iter().filter(|&j| active[j]));
                }
            }
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    Ok(ChainGraph {
        cover,
        eps,
        samples,
        seed,
        active,
        edges,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceReport {
    /// A box is recurrent when it lies on a directed cycle.
    pub recurrent: Vec<bool>,
    /// Strongly connected component per active box, numbered by smallest member.
    pub component: Vec<Option<usize>>,
    /// Number of strongly connected components that contain a cycle.
    pub component_count: usize,
    pub active_count: usize,
}

impl RecurrenceReport {
    pub fn recurrent_count(&self) -> usize {
        self.recurrent.iter().filter(|&&r| r).count()
    }

    /// Share of active boxes that are recurrent.
    pub fn recurrent_fraction(&self) -> f64 {
        if self.active_count == 0 {
            0.0
        } else {
            self.recurrent_count() as f64 / self.active_count as f64
        }
    }

    /// Rows `box,component,recurrent` under a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["box", "component", "recurrent"])?;
        for (i, (c, r)) in self.component.iter().zip(&self.recurrent).enumerate() {
            w.write_record([
                i.to_string(),
                c.map(|c| c.to_string()).unwrap_or_default(),
                r.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn analyze(graph: &ChainGraph) -> RecurrenceReport {
    let n = graph.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, graph.edge_count());
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for (from, succ) in graph.edges.iter().enumerate() {
        for &to in succ {
            g.add_edge(nodes[from], nodes[to], ());
        }
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c
                .into_iter()
                .map(NodeIndex::index)
                .filter(|&i| graph.active[i])
                .collect();
            v.sort_unstable();
            v
        })
        .filter(|c| !c.is_empty())
        .collect();
    sccs.sort_unstable_by_key(|c| c[0]);

    let mut recurrent = vec![false; n];
    let mut component = vec![None; n];
    let mut component_count = 0;
    for (id, members) in sccs.iter().enumerate() {
        let cyclic = members.len() > 1 || graph.has_edge(members[0], members[0]);
        if cyclic {
            component_count += 1;
        }
        for &m in members {
            component[m] = Some(id);
            recurrent[m] = cyclic;
        }
    }
    RecurrenceReport {
        recurrent,
        component,
        component_count,
        active_count: graph.active_count(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChainSearch {
    /// A realized chain; every step error is at most ε.
    Found(PseudoOrbit),
    /// No chain through box centers exists at this resolution.
    Absent { resolution: usize },
}

impl ChainSearch {
    pub fn chain(&self) -> Option<&PseudoOrbit> {
        match self {
            ChainSearch::Found(o) => Some(o),
            ChainSearch::Absent { .. } => None,
        }
    }
}

/// Shortest ε-chain of at least one step from `x` to `y` whose intermediate
/// points are box centers of a uniform cover.
pub fn find_chain(ifs: &Ifs, x: &Point, y: &Point, eps: f64, resolution: usize) -> Result<ChainSearch> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let space = ifs.space();
    space.check(x)?;
    space.check(y)?;
    let cover = BoxCover::new(space, resolution)?;
    let centers: Vec<Option<Point>> = (0..cover.len())
        .map(|i| {
            let c = cover.center(i);
            space.contains(&c).then_some(c)
        })
        .collect();

    // nodes: 0..len are box centers, len is x
    let start = cover.len();
    let node_point = |k: usize| -> &Point {
        if k == start {
            x
        } else {
            centers[k].as_ref().expect("visited centers exist")
        }
    };
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None; cover.len()];
    let mut queue = VecDeque::from([start]);
    while let Some(k) = queue.pop_front() {
        let p = node_point(k).clone();
        for s in 0..ifs.len() {
            let image = ifs.image(s, &p);
            if space.dist(&image, y) <= eps {
                let mut points = vec![y.clone()];
                let mut symbols = vec![s];
                let mut cur = k;
                while cur != start {
                    points.push(node_point(cur).clone());
                    let (prev, sym) = parent[cur].expect("visited nodes have parents");
                    symbols.push(sym);
                    cur = prev;
                }
                points.push(x.clone());
                points.reverse();
                symbols.reverse();
                return Ok(ChainSearch::Found(PseudoOrbit::from_points(ifs, points, symbols)?));
            }
            for j in cover.near(&image, eps) {
                if parent[j].is_some() {
                    continue;
                }
                if let Some(c) = &centers[j] {
                    if space.dist(&image, c) <= eps {
                        parent[j] = Some((k, s));
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    Ok(ChainSearch::Absent { resolution })
}
