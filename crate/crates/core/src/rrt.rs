//! Random recursive trees by uniform attachment: vertex `k` picks its
//! parent uniformly from `1..k`.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng::below;
use crate::tree::{DegreeVector, RootedTree, Vertex};

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > Vertex::MAX as usize {
        return Err(Error::Domain(format!("n = {n} exceeds the label range")));
    }
    Ok(())
}

pub fn grow_rrt<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<RootedTree> {
    check_n(n)?;
    let mut parent = vec![0; n];
    for k in 2..=n as u32 {
        parent[k as usize - 1] = 1 + below(rng, k - 1);
    }
    Ok(RootedTree::from_parts_unchecked(parent, 1))
}

/// Child counts of a random recursive tree, written into `deg` (resized to
/// `n`). Consumes the random stream exactly as [`grow_rrt`] does, so both
/// agree for the same seed.
pub fn sample_degrees_into<R: RngCore + ?Sized>(
    n: usize,
    rng: &mut R,
    deg: &mut Vec<u32>,
) -> Result<()> {
    check_n(n)?;
    deg.clear();
    deg.resize(n, 0);
    for k in 2..=n as u32 {
        deg[below(rng, k - 1) as usize] += 1;
    }
    Ok(())
}

pub fn rrt_degrees<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<DegreeVector> {
    let mut deg = Vec::new();
    sample_degrees_into(n, rng, &mut deg)?;
    Ok(DegreeVector::from_vec_unchecked(deg))
}
