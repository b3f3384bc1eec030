//! Rooted labelled trees on `1..=n`, stored as parent maps.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex label, 1-based.
pub type Vertex = u32;

/// A rooted tree on the vertex set `1..=n` with edges directed towards the
/// root. Construction validates that the parent map has a single root and no
/// cycles, so every value of this type is a well-formed tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TreeJson", into = "TreeJson")]
pub struct RootedTree {
    // parent[v - 1] is the parent of v; 0 marks the root.
    parent: Vec<Vertex>,
    root: Vertex,
}

impl RootedTree {
    /// Builds a tree from `parent[v - 1]`, using 0 for the root.
    pub fn from_parents(parent: Vec<Vertex>) -> Result<Self> {
        let root = validate(&parent)?;
        Ok(RootedTree { parent, root })
    }

    /// Builds a tree on `1..=n` from `(child, parent)` edges.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut parent = vec![0; n];
        for &(child, p) in edges {
            if child == 0 || child as usize > n {
                return Err(Error::Structure(format!("vertex {child} outside 1..={n}")));
            }
            if parent[child as usize - 1] != 0 {
                return Err(Error::Structure(format!("vertex {child} has two parents")));
            }
            if p == 0 {
                return Err(Error::Structure("parent label 0".into()));
            }
            parent[child as usize - 1] = p;
        }
        Self::from_parents(parent)
    }

    pub fn singleton() -> Self {
        RootedTree {
            parent: vec![0],
            root: 1,
        }
    }

    /// Star on `1..=n` centred at vertex 1.
    pub fn star(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a tree needs at least one vertex".into()));
        }
        let mut parent = vec![1; n];
        parent[0] = 0;
        Ok(RootedTree { parent, root: 1 })
    }

    /// Caller guarantees `parent` is a valid parent map rooted at `root`.
    pub(crate) fn from_parts_unchecked(parent: Vec<Vertex>, root: Vertex) -> Self {
        debug_assert_eq!(validate(&parent).ok(), Some(root));
        RootedTree { parent, root }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        match self.parent.get((v as usize).wrapping_sub(1)) {
            Some(&0) | None => None,
            Some(&p) => Some(p),
        }
    }

    /// Parent map as a slice indexed by `v - 1`, 0 for the root.
    pub fn parents(&self) -> &[Vertex] {
        &self.parent
    }

    /// `(child, parent)` pairs in increasing child order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0)
            .map(|(i, &p)| (i as Vertex + 1, p))
    }

    /// Children lists indexed by `v - 1`, each in increasing order.
    pub fn children(&self) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new(); self.n()];
        for (c, p) in self.edges() {
            out[p as usize - 1].push(c);
        }
        out
    }

    pub fn child_counts(&self) -> DegreeVector {
        let mut deg = vec![0u32; self.n()];
        for &p in &self.parent {
            if p != 0 {
                deg[p as usize - 1] += 1;
            }
        }
        DegreeVector(deg)
    }

    pub fn degree_multiset(&self) -> DegreeMultiset {
        self.child_counts().multiset()
    }

    /// True iff the root is 1 and every parent label is below its child's.
    pub fn is_increasing(&self) -> bool {
        self.root == 1 && self.edges().all(|(c, p)| p < c)
    }

    /// Applies the bijection `map[v - 1]` to every label.
    pub fn relabel(&self, map: &[Vertex]) -> Result<RootedTree> {
        let n = self.n();
        if map.len() != n {
            return Err(Error::Validation(format!(
                "relabelling has {} entries for {n} vertices",
                map.len()
            )));
        }
        let mut seen = vec![false; n];
        for &l in map {
            if l == 0 || l as usize > n || std::mem::replace(&mut seen[l as usize - 1], true) {
                return Err(Error::Validation("relabelling is not a bijection".into()));
            }
        }
        let mut parent = vec![0; n];
        for (c, p) in self.edges() {
            parent[map[c as usize - 1] as usize - 1] = map[p as usize - 1];
        }
        Ok(RootedTree {
            parent,
            root: map[self.root as usize - 1],
        })
    }
}

/// Returns the root, or a structural error.
fn validate(parent: &[Vertex]) -> Result<Vertex> {
    let n = parent.len();
    if n == 0 {
        return Err(Error::Structure("empty vertex set".into()));
    }
    if n > Vertex::MAX as usize {
        return Err(Error::Structure(format!(
            "{n} vertices exceed the label range"
        )));
    }
    let mut root = None;
    for (i, &p) in parent.iter().enumerate() {
        let v = i as Vertex + 1;
        if p == 0 {
            if let Some(r) = root {
                return Err(Error::Structure(format!("two roots: {r} and {v}")));
            }
            root = Some(v);
        } else if p as usize > n {
            return Err(Error::Structure(format!(
                "parent {p} of {v} outside 1..={n}"
            )));
        } else if p == v {
            return Err(Error::Structure(format!("vertex {v} is its own parent")));
        }
    }
    let root =
        root.ok_or_else(|| Error::Structure("no root (parent links form a cycle)".into()))?;

    // 0 = unseen, 1 = on the current walk, 2 = known to reach the root
    let mut state = vec![0u8; n];
    state[root as usize - 1] = 2;
    let mut walk = Vec::new();
    for start in 1..=n as Vertex {
        let mut v = start;
        while state[v as usize - 1] == 0 {
            state[v as usize - 1] = 1;
            walk.push(v);
            v = parent[v as usize - 1];
        }
        if state[v as usize - 1] == 1 {
            return Err(Error::Structure(format!("cycle through vertex {v}")));
        }
        for w in walk.drain(..) {
            state[w as usize - 1] = 2;
        }
    }
    Ok(root)
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root {}; ", self.root)?;
        let mut first = true;
        for (c, p) in self.edges() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{c}->{p}")?;
        }
        Ok(())
    }
}

/// Wire form: `{"n": n, "root": r, "parent": {"2": 1, ...}}`.
#[derive(Serialize, Deserialize)]
struct TreeJson {
    n: usize,
    root: Vertex,
    parent: BTreeMap<Vertex, Vertex>,
}

impl From<RootedTree> for TreeJson {
    fn from(t: RootedTree) -> Self {
        TreeJson {
            n: t.n(),
            root: t.root,
            parent: t.edges().collect(),
        }
    }
}

impl TryFrom<TreeJson> for RootedTree {
    type Error = Error;

    fn try_from(j: TreeJson) -> Result<Self> {
        let edges: Vec<_> = j.parent.into_iter().collect();
        let tree = RootedTree::from_edges(j.n, &edges)?;
        if tree.root != j.root {
            return Err(Error::Structure(format!(
                "declared root {} but vertex {} has no parent",
                j.root, tree.root
            )));
        }
        Ok(tree)
    }
}

/// Child counts indexed by vertex label. The entries sum to `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DegreeVector(Vec<u32>);

impl DegreeVector {
    /// Validates that `deg[v - 1]` sums to `n - 1` over `n = deg.len()` vertices.
    pub fn new(deg: Vec<u32>) -> Result<Self> {
        if deg.is_empty() {
            return Err(Error::Validation("empty degree vector".into()));
        }
        let total: u64 = deg.iter().map(|&d| u64::from(d)).sum();
        if total != deg.len() as u64 - 1 {
            return Err(Error::Validation(format!(
                "degrees sum to {total}, expected {}",
                deg.len() - 1
            )));
        }
        Ok(DegreeVector(deg))
    }

    pub(crate) fn from_vec_unchecked(deg: Vec<u32>) -> Self {
        debug_assert_eq!(
            deg.iter().map(|&d| u64::from(d)).sum::<u64>() + 1,
            deg.len() as u64
        );
        DegreeVector(deg)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Degree of vertex `v` (1-based).
    pub fn get(&self, v: Vertex) -> u32 {
        self.0[v as usize - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &d)| (i as Vertex + 1, d))
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn multiset(&self) -> DegreeMultiset {
        DegreeMultiset::from_degrees(self.0.clone())
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

/// Degrees of all vertices as a multiset, stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeMultiset(Vec<u32>);

impl DegreeMultiset {
    pub fn from_degrees(mut degrees: Vec<u32>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        DegreeMultiset(degrees)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DegreeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn six_vertex() -> RootedTree {
        RootedTree::from_edges(6, &[(5, 2), (1, 6), (4, 6), (3, 2), (6, 2)]).unwrap()
    }

    #[test]
    fn child_counts_small_cases() {
        assert_eq!(RootedTree::singleton().child_counts().as_slice(), &[0]);
        let t = RootedTree::from_parents(vec![0, 1]).unwrap();
        assert_eq!(t.child_counts().as_slice(), &[1, 0]);
        let t = six_vertex();
        assert_eq!(t.root(), 2);
        assert_eq!(t.child_counts().as_slice(), &[0, 3, 0, 0, 0, 2]);
    }

    #[test]
    fn degree_multisets() {
        let t = RootedTree::from_parents(vec![0, 1]).unwrap();
        assert_eq!(t.degree_multiset().as_slice(), &[1, 0]);
        assert_eq!(
            six_vertex().degree_multiset().as_slice(),
            &[3, 2, 0, 0, 0, 0]
        );
        let star = RootedTree::star(7).unwrap();
        assert_eq!(star.degree_multiset().as_slice(), &[6, 0, 0, 0, 0, 0, 0]);
        assert_eq!(six_vertex().degree_multiset().to_string(), "{3,2,0,0,0,0}");
    }

    #[test]
    fn increasing_trees() {
        let path = RootedTree::from_parents(vec![0, 1, 2]).unwrap();
        assert!(path.is_increasing());
        let t = RootedTree::from_parents(vec![0, 3, 1]).unwrap();
        assert!(!t.is_increasing());
        let phi = RootedTree::from_edges(6, &[(2, 1), (3, 1), (6, 1), (4, 2), (5, 2)]).unwrap();
        assert!(phi.is_increasing());
        assert!(!six_vertex().is_increasing());
    }

    #[test]
    fn malformed_parent_maps_are_rejected() {
        // two roots
        assert!(matches!(
            RootedTree::from_parents(vec![0, 0, 1]),
            Err(Error::Structure(_))
        ));
        // 2 -> 3 -> 2 cycle beside root 1
        assert!(matches!(
            RootedTree::from_parents(vec![0, 3, 2]),
            Err(Error::Structure(_))
        ));
        // no root at all
        assert!(matches!(
            RootedTree::from_parents(vec![2, 1]),
            Err(Error::Structure(_))
        ));
        assert!(matches!(
            RootedTree::from_parents(vec![0, 5]),
            Err(Error::Structure(_))
        ));
        assert!(matches!(
            RootedTree::from_parents(vec![]),
            Err(Error::Structure(_))
        ));
        assert!(RootedTree::from_edges(3, &[(2, 1), (2, 3)]).is_err());
    }

    #[test]
    fn json_wire_format() {
        let t = six_vertex();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(
            s,
            r#"{"n":6,"root":2,"parent":{"1":6,"3":2,"4":6,"5":2,"6":2}}"#
        );
        let back: RootedTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let wrong_root = r#"{"n":2,"root":2,"parent":{"2":1}}"#;
        assert!(serde_json::from_str::<RootedTree>(wrong_root).is_err());
        let cycle = r#"{"n":3,"root":1,"parent":{"2":3,"3":2}}"#;
        assert!(serde_json::from_str::<RootedTree>(cycle).is_err());
    }

    #[test]
    fn degree_vector_validation() {
        assert!(DegreeVector::new(vec![1, 0]).is_ok());
        assert!(matches!(
            DegreeVector::new(vec![1, 1]),
            Err(Error::Validation(_))
        ));
        assert!(DegreeVector::new(vec![]).is_err());
    }

    #[test]
    fn relabel_rejects_non_bijections() {
        let t = six_vertex();
        assert!(t.relabel(&[1, 1, 2, 3, 4, 5]).is_err());
        assert!(t.relabel(&[1, 2, 3]).is_err());
        let id: Vec<Vertex> = (1..=6).collect();
        assert_eq!(t.relabel(&id).unwrap(), t);
    }

    fn arb_tree() -> impl Strategy<Value = RootedTree> {
        (1usize..40)
            .prop_flat_map(|n| {
                let parents: Vec<_> = (2..=n as u32).map(|k| 1..k).collect();
                (
                    parents,
                    Just(n),
                    proptest::sample::subsequence((1..=n as u32).collect::<Vec<_>>(), n),
                )
            })
            .prop_map(|(parents, n, perm)| {
                // increasing tree, then shuffle labels through a permutation
                let mut p = vec![0u32; n];
                for (i, &q) in parents.iter().enumerate() {
                    p[i + 1] = q;
                }
                let t = RootedTree::from_parents(p).unwrap();
                let mut perm = perm;
                perm.rotate_left(n / 3);
                t.relabel(&perm).unwrap()
            })
    }

    proptest! {
        #[test]
        fn degree_mass_and_multiset_size(t in arb_tree()) {
            let n = t.n();
            let deg = t.child_counts();
            prop_assert_eq!(deg.as_slice().iter().map(|&d| d as usize).sum::<usize>(), n - 1);
            prop_assert_eq!(t.degree_multiset().len(), n);
            prop_assert!(deg.as_slice().iter().all(|&d| (d as usize) < n));
        }

        #[test]
        fn json_round_trip(t in arb_tree()) {
            let s = serde_json::to_string(&t).unwrap();
            prop_assert_eq!(serde_json::from_str::<RootedTree>(&s).unwrap(), t);
        }
    }
}
