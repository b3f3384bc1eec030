use serde::Serialize;

use super::events::CoalescentEvents;
use super::forest::OrderedForest;
use crate::tree::Vertex;

/// Merge steps at which a vertex's tree was selected, and what the coin did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionRecord {
    pub vertex: Vertex,
    /// Selection steps in increasing order.
    pub times: Vec<u32>,
    /// `favours[j]` is true iff the coin at `times[j]` favoured this vertex's tree.
    pub favours: Vec<bool>,
    /// First unfavourable selection step; `None` if every selection was favourable.
    pub stop: Option<u32>,
    /// Favourable selections before `stop`.
    pub degree: u32,
}

impl SelectionRecord {
    fn from_times(vertex: Vertex, times: Vec<u32>, favours: Vec<bool>) -> Self {
        let streak = favours.iter().take_while(|&&f| f).count();
        SelectionRecord {
            vertex,
            stop: times.get(streak).copied(),
            degree: streak as u32,
            times,
            favours,
        }
    }

    /// Number of selections up to and including step `step`.
    pub fn selections_through(&self, step: u32) -> usize {
        self.times.partition_point(|&t| t <= step)
    }
}

/// Selection records for every vertex, indexed by `v - 1`.
///
/// Member lists are merged small-into-large, so the cost is `O(n log n)`
/// plus the total size of the output.
pub fn selection_records(events: &CoalescentEvents) -> Vec<SelectionRecord> {
    let n = events.n();
    let mut forest = OrderedForest::new(n);
    let mut members: Vec<Vec<Vertex>> = (1..=n as Vertex).map(|v| vec![v]).collect();
    let mut times: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut favours: Vec<Vec<bool>> = vec![Vec::new(); n];
    for (s, step) in events.steps().enumerate() {
        let t = s as u32 + 1;
        let ma = forest.min_label(step.a);
        let mb = forest.min_label(step.b);
        for (key, favoured) in [(ma, step.coin == 1), (mb, step.coin == 0)] {
            for &v in &members[key as usize - 1] {
                times[v as usize - 1].push(t);
                favours[v as usize - 1].push(favoured);
            }
        }
        let (ra, rb) = (forest.root_of(ma), forest.root_of(mb));
        forest.merge(ma, mb, if step.coin == 1 { ra } else { rb });
        let mut absorbed = std::mem::take(&mut members[mb as usize - 1]);
        let kept = &mut members[ma as usize - 1];
        if absorbed.len() > kept.len() {
            std::mem::swap(kept, &mut absorbed);
        }
        kept.extend_from_slice(&absorbed);
    }
    times
        .into_iter()
        .zip(favours)
        .enumerate()
        .map(|(i, (t, f))| SelectionRecord::from_times(i as Vertex + 1, t, f))
        .collect()
}
