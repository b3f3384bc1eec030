//! Trees of the current forest in increasing order of their smallest label.
//!
//! A merge of trees `a < b` keeps the smallest label of tree `a`, so the
//! merged tree stays at index `a` and tree `b` drops out. Live minimum labels
//! sit in a Fenwick tree, which turns "the `k`-th tree" into an order
//! statistic query in `O(log n)`.

pub(crate) struct OrderedForest {
    // Fenwick tree over labels 1..=n; 1 where the label is a live tree minimum
    fen: Vec<u32>,
    // root of the tree keyed by its minimum label (index label - 1)
    root: Vec<u32>,
    top: usize,
}

impl OrderedForest {
    /// `n` singleton trees.
    pub fn new(n: usize) -> Self {
        let mut fen = vec![0u32; n + 1];
        for (i, slot) in fen.iter_mut().enumerate().skip(1) {
            *slot = (i & i.wrapping_neg()) as u32;
        }
        let top = if n == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - n.leading_zeros())
        };
        OrderedForest {
            fen,
            root: (1..=n as u32).collect(),
            top,
        }
    }

    /// Smallest label of the `k`-th tree (1-based).
    pub fn min_label(&self, k: u32) -> u32 {
        let mut pos = 0usize;
        let mut rem = k;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next < self.fen.len() && self.fen[next] < rem {
                pos = next;
                rem -= self.fen[next];
            }
            step >>= 1;
        }
        pos as u32 + 1
    }

    pub fn root_of(&self, min_label: u32) -> u32 {
        self.root[min_label as usize - 1]
    }

    /// Merges the tree keyed by `absorbed` into the one keyed by `kept`,
    /// whose root becomes `new_root`.
    pub fn merge(&mut self, kept: u32, absorbed: u32, new_root: u32) {
        self.root[kept as usize - 1] = new_root;
        let mut i = absorbed as usize;
        while i < self.fen.len() {
            self.fen[i] -= 1;
            i += i & i.wrapping_neg();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistics_follow_removals() {
        let mut f = OrderedForest::new(10);
        let mut live: Vec<u32> = (1..=10).collect();
        for (kept, gone) in [(2u32, 5u32), (1, 9), (3, 4), (1, 10), (2, 3)] {
            f.merge(kept, gone, kept);
            live.retain(|&x| x != gone);
            for (k, &m) in live.iter().enumerate() {
                assert_eq!(f.min_label(k as u32 + 1), m);
            }
        }
    }
}
