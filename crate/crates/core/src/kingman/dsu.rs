//! Disjoint sets with a per-class counter, for counting how often each
//! vertex's tree has been selected without touching every member.
//!
//! The count of `x` is the sum of `acc` along the path from `x` to its
//! representative (inclusive). Bumping a class adds 1 at the representative;
//! linking subtracts the new parent's `acc` from the attached root so that no
//! member's count changes.

pub struct SelectionCounter {
    parent: Vec<u32>,
    size: Vec<u32>,
    acc: Vec<i64>,
}

impl SelectionCounter {
    pub fn new(n: usize) -> Self {
        SelectionCounter {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            acc: vec![0; n],
        }
    }

    pub fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n as u32);
        self.size.clear();
        self.size.resize(n, 1);
        self.acc.clear();
        self.acc.resize(n, 0);
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Representative of `x`'s class, with path halving.
    pub fn find(&mut self, mut x: u32) -> u32 {
        loop {
            let p = self.parent[x as usize];
            if p == x {
                return x;
            }
            let g = self.parent[p as usize];
            if g != p {
                // skip over p: fold its offset into x's
                self.acc[x as usize] += self.acc[p as usize];
                self.parent[x as usize] = g;
            }
            x = g;
        }
    }

    /// Adds one to the count of every member of `x`'s class.
    pub fn bump(&mut self, x: u32) {
        let r = self.find(x);
        self.acc[r as usize] += 1;
    }

    /// Merges the classes of `x` and `y` (union by size).
    pub fn union(&mut self, x: u32, y: u32) {
        let (mut rx, mut ry) = (self.find(x), self.find(y));
        if rx == ry {
            return;
        }
        if self.size[rx as usize] < self.size[ry as usize] {
            std::mem::swap(&mut rx, &mut ry);
        }
        self.parent[ry as usize] = rx;
        self.size[rx as usize] += self.size[ry as usize];
        self.acc[ry as usize] -= self.acc[rx as usize];
    }

    pub fn count(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        let mut total = self.acc[r as usize];
        let mut y = x;
        while y != r {
            total += self.acc[y as usize];
            y = self.parent[y as usize];
        }
        total as u32
    }

    pub fn same_class(&mut self, x: u32, y: u32) -> bool {
        self.find(x) == self.find(y)
    }
}
