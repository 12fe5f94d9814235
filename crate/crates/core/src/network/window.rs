use super::partnerships::EdgeLog;
use crate::error::{Error, Result};
use crate::{Day, NodeId};

/// Undirected graph without loops or parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<NodeId>>,
    edges: usize,
}

impl SimpleGraph {
    /// Builds from an edge list, dropping self-loops and duplicates.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a != b {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        let mut twice = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Self {
            adj,
            edges: twice / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    /// Edges as `(lo, hi)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, list)| {
            let a = a as NodeId;
            list.iter().filter(move |&&b| b > a).map(move |&b| (a, b))
        })
    }
}

/// Union of every edge, of any kind, live on at least one snapshot in
/// `t0..=t1`.
pub fn cumulative_window_graph(log: &EdgeLog, n: usize, t0: Day, t1: Day) -> Result<SimpleGraph> {
    if t0 > t1 {
        return Err(Error::query(format!("window start {t0} after end {t1}")));
    }
    if t0 < 0 || t1 > log.last_day() {
        return Err(Error::query(format!(
            "window {t0}..={t1} outside recorded days 0..={}",
            log.last_day()
        )));
    }
    let edges = log
        .rows()
        .iter()
        .filter(|r| r.formed_day <= t1 && r.dissolved_day.is_none_or(|d| d > t0))
        .map(|r| (r.u, r.v));
    Ok(SimpleGraph::from_edges(n, edges))
}
