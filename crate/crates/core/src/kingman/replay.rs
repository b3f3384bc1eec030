use std::collections::BTreeMap;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::events::CoalescentEvents;
use super::forest::OrderedForest;
use crate::tree::{RootedTree, Vertex};

/// Result of replaying a merge chain on the original labels, together with
/// the relabelling that turns it into an increasing tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledOutcome {
    pub final_tree: RootedTree,
    // edge_time[u - 1] = step at which u's outgoing edge was added; 0 for the root
    edge_time: Vec<u32>,
    // relabel[u - 1] = new label of u
    relabel: Vec<Vertex>,
    pub phi_tree: RootedTree,
}

impl LabelledOutcome {
    /// Step (1-based) at which the edge out of `u` was added; `None` for the root.
    pub fn edge_time(&self, u: Vertex) -> Option<u32> {
        match self.edge_time[u as usize - 1] {
            0 => None,
            t => Some(t),
        }
    }

    /// New label of `u`: 1 for the root, `n + 1 - edge_time(u)` otherwise.
    pub fn relabel(&self, u: Vertex) -> Vertex {
        self.relabel[u as usize - 1]
    }

    pub fn relabelling(&self) -> &[Vertex] {
        &self.relabel
    }
}

impl Serialize for LabelledOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let times: BTreeMap<Vertex, u32> = (1..=self.edge_time.len() as Vertex)
            .filter_map(|u| self.edge_time(u).map(|t| (u, t)))
            .collect();
        let labels: BTreeMap<Vertex, Vertex> = (1..=self.relabel.len() as Vertex)
            .map(|u| (u, self.relabel(u)))
            .collect();
        let mut st = s.serialize_struct("LabelledOutcome", 4)?;
        st.serialize_field("final_tree", &self.final_tree)?;
        st.serialize_field("edge_time", &times)?;
        st.serialize_field("relabel", &labels)?;
        st.serialize_field("phi_tree", &self.phi_tree)?;
        st.end()
    }
}

/// Runs the merge chain described by `events`. Deterministic; `O(n log n)`.
pub fn replay(events: &CoalescentEvents) -> LabelledOutcome {
    let n = events.n();
    let mut forest = OrderedForest::new(n);
    let mut parent = vec![0 as Vertex; n];
    let mut edge_time = vec![0u32; n];
    for (s, step) in events.steps().enumerate() {
        let ma = forest.min_label(step.a);
        let mb = forest.min_label(step.b);
        let (ra, rb) = (forest.root_of(ma), forest.root_of(mb));
        let (child, par) = if step.coin == 1 { (rb, ra) } else { (ra, rb) };
        parent[child as usize - 1] = par;
        edge_time[child as usize - 1] = s as u32 + 1;
        forest.merge(ma, mb, par);
    }
    let root = forest.root_of(1);
    let relabel: Vec<Vertex> = edge_time
        .iter()
        .map(|&t| if t == 0 { 1 } else { n as Vertex + 1 - t })
        .collect();
    let mut phi_parent = vec![0 as Vertex; n];
    for (u, &p) in parent.iter().enumerate() {
        if p != 0 {
            phi_parent[relabel[u] as usize - 1] = relabel[p as usize - 1];
        }
    }
    LabelledOutcome {
        final_tree: RootedTree::from_parts_unchecked(parent, root),
        edge_time,
        relabel,
        phi_tree: RootedTree::from_parts_unchecked(phi_parent, 1),
    }
}
