//! Interference graphs, feasible schedules and the vertex-cover quantities
//! used by the service-rate agnostic analysis.
//!
//! Links are vertices; an edge joins two links that cannot transmit in the
//! same slot. A schedule is an independent set packed into a `u32`, bit `i`
//! set when link `i` transmits, so graphs are limited to 32 links.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported link count (one bit per link in a `u32`).
pub const MAX_LINKS: usize = 32;

/// Refuse to materialise schedule spaces larger than this.
pub const MAX_SCHEDULES: usize = 1 << 22;

/// Description of a graph family, as used in configs and on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GraphSpec {
    /// Link 0 conflicts with every other link.
    Star { n: usize },
    /// Ring of `n >= 3` links.
    Cycle { n: usize },
    /// Each link conflicts with the `k/2` nearest links on each side of the ring.
    Circulant { n: usize, k: usize },
    Complete { n: usize },
    Explicit { n: usize, edges: Vec<(usize, usize)> },
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        match self {
            GraphSpec::Star { n }
            | GraphSpec::Cycle { n }
            | GraphSpec::Circulant { n, .. }
            | GraphSpec::Complete { n }
            | GraphSpec::Explicit { n, .. } => *n,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            GraphSpec::Star { .. } => "star",
            GraphSpec::Cycle { .. } => "cycle",
            GraphSpec::Circulant { .. } => "circulant",
            GraphSpec::Complete { .. } => "complete",
            GraphSpec::Explicit { .. } => "explicit",
        }
    }

    /// Regularity degree for circulant graphs.
    pub fn k(&self) -> Option<usize> {
        match self {
            GraphSpec::Circulant { k, .. } => Some(*k),
            _ => None,
        }
    }

    /// Short human label, e.g. `circulant(16,6)`.
    pub fn label(&self) -> String {
        match self {
            GraphSpec::Circulant { n, k } => format!("circulant({n},{k})"),
            other => format!("{}({})", other.family(), other.n()),
        }
    }

    /// The six interference graphs studied at `n` links: star, cycle,
    /// circulant with k in {6, 8, 10}, and complete.
    pub fn standard_families(n: usize) -> Vec<GraphSpec> {
        vec![
            GraphSpec::Star { n },
            GraphSpec::Cycle { n },
            GraphSpec::Circulant { n, k: 6 },
            GraphSpec::Circulant { n, k: 8 },
            GraphSpec::Circulant { n, k: 10 },
            GraphSpec::Complete { n },
        ]
    }

    pub fn build(&self) -> Result<InterferenceGraph> {
        build_graph(self)
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Circulant { n, k } => write!(f, "circulant:{n}:{k}"),
            GraphSpec::Explicit { n, edges } => write!(f, "explicit:{n}:{}edges", edges.len()),
            other => write!(f, "{}:{}", other.family(), other.n()),
        }
    }
}

/// Parses `star:16`, `cycle:16`, `circulant:16:6` and `complete:16`.
impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |idx: usize| -> Result<usize> {
            parts
                .get(idx)
                .ok_or_else(|| Error::InvalidGraph(format!("missing field {idx} in '{s}'")))?
                .parse::<usize>()
                .map_err(|e| Error::InvalidGraph(format!("'{s}': {e}")))
        };
        let spec = match parts[0].to_ascii_lowercase().as_str() {
            "star" => GraphSpec::Star { n: num(1)? },
            "cycle" | "circular" => GraphSpec::Cycle { n: num(1)? },
            "circulant" | "regular" => GraphSpec::Circulant { n: num(1)?, k: num(2)? },
            "complete" => GraphSpec::Complete { n: num(1)? },
            other => {
                return Err(Error::InvalidGraph(format!(
                    "unknown family '{other}' (expected star, cycle, circulant, complete)"
                )))
            }
        };
        let expected = if matches!(spec, GraphSpec::Circulant { .. }) { 3 } else { 2 };
        if parts.len() != expected {
            return Err(Error::InvalidGraph(format!("malformed graph spec '{s}'")));
        }
        Ok(spec)
    }
}

/// Undirected simple graph over at most 32 links, stored as neighbor bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterferenceGraph {
    n: usize,
    adj: Vec<u32>,
}

impl InterferenceGraph {
    /// Graph with `n` links and no conflicts.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one link".into()));
        }
        if n > MAX_LINKS {
            return Err(Error::TooManyLinks { n, max: MAX_LINKS });
        }
        Ok(Self { n, adj: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge ({i},{j}) out of range for {} links",
                self.n
            )));
        }
        if i == j {
            return Err(Error::InvalidGraph(format!("self-edge at link {i}")));
        }
        self.adj[i] |= 1 << j;
        self.adj[j] |= 1 << i;
        Ok(())
    }

    /// Reads the plain-text edge-list format: first line `n`, then one
    /// `i j` pair per line. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |f: &str| {
                f.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("'{f}': {e}"),
                })
            };
            match (n, fields.as_slice()) {
                (None, [count]) => n = Some(parse(count)?),
                (None, _) => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: "first line must hold the link count".into(),
                    })
                }
                (Some(_), [a, b]) => edges.push((parse(a)?, parse(b)?)),
                (Some(_), _) => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected 'i j', got '{line}'"),
                    })
                }
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "empty edge list".into() })?;
        Self::from_edges(n, &edges)
    }

    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Neighbor bitmask of link `i`.
    #[inline]
    pub fn neighbors_mask(&self, i: usize) -> u32 {
        self.adj[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.adj[i];
        (0..self.n).filter(move |&j| mask & (1 << j) != 0)
    }

    #[inline]
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i] & (1 << j) != 0
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.is_adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Mask with one bit per link.
    #[inline]
    pub fn full_mask(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    /// True when no two links of `bits` conflict.
    pub fn is_independent(&self, bits: u32) -> bool {
        if bits & !self.full_mask() != 0 {
            return false;
        }
        let mut rest = bits;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if self.adj[i] & bits != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }

    pub fn schedule_space(&self) -> Result<ScheduleSpace> {
        enumerate_schedules(self)
    }
}

/// A feasible schedule: an independent set, bit `i` set when link `i` transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule(pub u32);

impl Schedule {
    pub const EMPTY: Schedule = Schedule(0);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn with(self, i: usize) -> Schedule {
        Schedule(self.0 | (1 << i))
    }

    #[inline]
    pub fn without(self, i: usize) -> Schedule {
        Schedule(self.0 & !(1 << i))
    }

    #[inline]
    pub fn flipped(self, i: usize) -> Schedule {
        Schedule(self.0 ^ (1 << i))
    }

    pub fn links(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |&i| bits & (1 << i) != 0)
    }

    /// Transmitting links joined by `-`, or `{}` for the empty schedule.
    pub fn label(self) -> String {
        if self.0 == 0 {
            return "{}".into();
        }
        self.links().map(|i| i.to_string()).collect::<Vec<_>>().join("-")
    }
}

/// All feasible schedules of a graph in ascending packed-word order.
#[derive(Debug, Clone)]
pub struct ScheduleSpace {
    graph: InterferenceGraph,
    schedules: Vec<Schedule>,
}

impl ScheduleSpace {
    pub fn graph(&self) -> &InterferenceGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn schedules(&self) -> &[Schedule] {
        &self.schedules
    }

    pub fn len(&self) -> usize {
        self.schedules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schedules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Schedule> + '_ {
        self.schedules.iter().copied()
    }

    /// Position of `x` in the ordering, `None` when `x` is infeasible.
    pub fn index_of(&self, x: Schedule) -> Option<usize> {
        self.schedules.binary_search(&x).ok()
    }

    pub fn contains(&self, x: Schedule) -> bool {
        self.index_of(x).is_some()
    }
}

/// Validates the family parameters and builds the adjacency relation.
pub fn build_graph(spec: &GraphSpec) -> Result<InterferenceGraph> {
    let n = spec.n();
    match spec {
        GraphSpec::Star { .. } => {
            if n < 2 {
                return Err(Error::InvalidGraph("star needs n >= 2".into()));
            }
            let edges: Vec<_> = (1..n).map(|j| (0, j)).collect();
            InterferenceGraph::from_edges(n, &edges)
        }
        GraphSpec::Cycle { .. } => {
            if n < 3 {
                return Err(Error::InvalidGraph("cycle needs n >= 3".into()));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            InterferenceGraph::from_edges(n, &edges)
        }
        GraphSpec::Circulant { k, .. } => {
            let k = *k;
            if k % 2 != 0 {
                return Err(Error::InvalidGraph(format!("circulant degree k={k} must be even")));
            }
            if k < 2 || k + 2 > n {
                return Err(Error::InvalidGraph(format!(
                    "circulant degree k={k} must satisfy 2 <= k <= n-2 (n={n})"
                )));
            }
            let mut edges = Vec::with_capacity(n * k / 2);
            for i in 0..n {
                for off in 1..=k / 2 {
                    edges.push((i, (i + off) % n));
                }
            }
            InterferenceGraph::from_edges(n, &edges)
        }
        GraphSpec::Complete { .. } => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    edges.push((i, j));
                }
            }
            InterferenceGraph::from_edges(n, &edges)
        }
        GraphSpec::Explicit { edges, .. } => InterferenceGraph::from_edges(n, edges),
    }
}

/// Every independent set of `g`, sorted by packed word.
pub fn enumerate_schedules(g: &InterferenceGraph) -> Result<ScheduleSpace> {
    if g.n > MAX_LINKS {
        return Err(Error::TooManyLinks { n: g.n, max: MAX_LINKS });
    }
    let mut out = Vec::new();
    // Depth-first: decide links in order; `blocked` holds neighbors of chosen links.
    let mut stack: Vec<(usize, u32, u32)> = vec![(0, 0, 0)];
    while let Some((next, chosen, blocked)) = stack.pop() {
        if next == g.n {
            if out.len() == MAX_SCHEDULES {
                return Err(Error::ScheduleSpaceTooLarge { limit: MAX_SCHEDULES });
            }
            out.push(Schedule(chosen));
            continue;
        }
        stack.push((next + 1, chosen, blocked));
        if blocked & (1 << next) == 0 {
            stack.push((next + 1, chosen | (1 << next), blocked | g.adj[next]));
        }
    }
    out.sort_unstable();
    Ok(ScheduleSpace { graph: g.clone(), schedules: out })
}

pub fn max_independent_set_size(space: &ScheduleSpace) -> usize {
    space.iter().map(Schedule::size).max().unwrap_or(0)
}

/// Minimum vertex cover size, `n - MIS` by the Gallai identity.
pub fn min_vertex_cover_size(space: &ScheduleSpace) -> usize {
    space.n() - max_independent_set_size(space)
}

/// `1 + MVC`, the graph constant compared against `log n`.
pub fn jensen_constant(space: &ScheduleSpace) -> usize {
    1 + min_vertex_cover_size(space)
}
