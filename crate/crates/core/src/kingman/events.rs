use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{coin, distinct_pair};
use crate::tree::Vertex;

/// One merge step: tree indices `a < b` (1-based within the current forest)
/// and the orientation coin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub a: u32,
    pub b: u32,
    pub coin: u8,
}

/// The random choices driving one run of the chain on `n` vertices.
///
/// Wire form: `{"n": n, "pairs": [[a, b], ...], "coins": [0, 1, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "EventsJson", into = "EventsJson")]
pub struct CoalescentEvents {
    n: usize,
    pairs: Vec<(u32, u32)>,
    coins: Vec<u8>,
}

impl CoalescentEvents {
    /// Validates lengths (`n - 1` each), `1 <= a < b <= n + 1 - i` at step
    /// `i`, and coins in `{0, 1}`. Pairs may be given in either order.
    pub fn new(n: usize, pairs: Vec<(u32, u32)>, coins: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if n > Vertex::MAX as usize {
            return Err(Error::Domain(format!("n = {n} exceeds the label range")));
        }
        if pairs.len() != n - 1 || coins.len() != n - 1 {
            return Err(Error::Validation(format!(
                "expected {} steps, got {} pairs and {} coins",
                n - 1,
                pairs.len(),
                coins.len()
            )));
        }
        let mut normalised = Vec::with_capacity(pairs.len());
        for (s, &(x, y)) in pairs.iter().enumerate() {
            let trees = (n - s) as u32;
            let (a, b) = if x < y { (x, y) } else { (y, x) };
            if a == 0 || a == b || b > trees {
                return Err(Error::Validation(format!(
                    "step {}: pair {{{x},{y}}} is not two distinct indices in 1..={trees}",
                    s + 1
                )));
            }
            normalised.push((a, b));
        }
        if let Some(s) = coins.iter().position(|&c| c > 1) {
            return Err(Error::Validation(format!(
                "step {}: coin {} is not a bit",
                s + 1,
                coins[s]
            )));
        }
        Ok(CoalescentEvents {
            n,
            pairs: normalised,
            coins,
        })
    }

    pub(crate) fn from_steps_unchecked(n: usize, steps: impl IntoIterator<Item = Step>) -> Self {
        let mut pairs = Vec::with_capacity(n.saturating_sub(1));
        let mut coins = Vec::with_capacity(n.saturating_sub(1));
        for s in steps {
            pairs.push((s.a, s.b));
            coins.push(s.coin);
        }
        debug_assert_eq!(pairs.len(), n - 1);
        CoalescentEvents { n, pairs, coins }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn coins(&self) -> &[u8] {
        &self.coins
    }

    /// Steps in order; the `s`-th item (0-based) is merge step `s + 1`.
    pub fn steps(&self) -> impl ExactSizeIterator<Item = Step> + '_ {
        self.pairs
            .iter()
            .zip(&self.coins)
            .map(|(&(a, b), &coin)| Step { a, b, coin })
    }
}

#[derive(Serialize, Deserialize)]
struct EventsJson {
    n: usize,
    pairs: Vec<[u32; 2]>,
    coins: Vec<u8>,
}

impl From<CoalescentEvents> for EventsJson {
    fn from(e: CoalescentEvents) -> Self {
        EventsJson {
            n: e.n,
            pairs: e.pairs.into_iter().map(|(a, b)| [a, b]).collect(),
            coins: e.coins,
        }
    }
}

impl TryFrom<EventsJson> for CoalescentEvents {
    type Error = Error;

    fn try_from(j: EventsJson) -> Result<Self> {
        CoalescentEvents::new(
            j.n,
            j.pairs.into_iter().map(|[a, b]| (a, b)).collect(),
            j.coins,
        )
    }
}

/// Lazily sampled merge steps. Each step draws its pair, then its coin.
pub struct EventStream<'r, R: ?Sized> {
    rng: &'r mut R,
    trees: u32,
}

impl<'r, R: RngCore + ?Sized> EventStream<'r, R> {
    pub fn new(n: usize, rng: &'r mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if n > Vertex::MAX as usize {
            return Err(Error::Domain(format!("n = {n} exceeds the label range")));
        }
        Ok(EventStream {
            rng,
            trees: n as u32,
        })
    }
}

impl<R: RngCore + ?Sized> Iterator for EventStream<'_, R> {
    type Item = Step;

    fn next(&mut self) -> Option<Step> {
        if self.trees < 2 {
            return None;
        }
        let (x, y) = distinct_pair(self.rng, self.trees);
        let c = coin(self.rng);
        self.trees -= 1;
        Some(Step {
            a: x + 1,
            b: y + 1,
            coin: c,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.trees.saturating_sub(1) as usize;
        (left, Some(left))
    }
}

pub fn sample_events<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<CoalescentEvents> {
    let stream = EventStream::new(n, rng)?;
    Ok(CoalescentEvents::from_steps_unchecked(n, stream))
}

/// First step whose pair lies in `{1, ..., k}`; `None` if there is none.
pub fn tau_k(events: &CoalescentEvents, k: usize) -> Result<Option<usize>> {
    if k < 2 || k > events.n {
        return Err(Error::Domain(format!(
            "tau_k needs 2 <= k <= n, got k = {k}, n = {}",
            events.n
        )));
    }
    Ok(events
        .steps()
        .position(|s| s.b as usize <= k)
        .map(|s| s + 1))
}

/// Streams merge steps and returns `tau_k` for every `k` in `ks`, stopping
/// once all are found or after step `horizon` (values beyond it are `None`).
/// For the same generator state the results agree with [`tau_k`] applied to
/// [`sample_events`].
pub fn sample_taus<R: RngCore + ?Sized>(
    n: usize,
    ks: &[usize],
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<Option<usize>>> {
    if let Some(&k) = ks.iter().find(|&&k| k < 2 || k > n) {
        return Err(Error::Domain(format!(
            "tau_k needs 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let mut out = vec![None; ks.len()];
    let mut open = ks.len();
    for (s, step) in EventStream::new(n, rng)?.enumerate().take(horizon) {
        for (slot, &k) in out.iter_mut().zip(ks) {
            if slot.is_none() && step.b as usize <= k {
                *slot = Some(s + 1);
                open -= 1;
            }
        }
        if open == 0 {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    pub(crate) fn six_vertex_events() -> CoalescentEvents {
        CoalescentEvents::new(
            6,
            vec![(2, 5), (1, 5), (1, 4), (2, 3), (1, 2)],
            vec![1, 0, 1, 1, 0],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        assert!(CoalescentEvents::new(2, vec![(1, 2)], vec![1]).is_ok());
        assert_eq!(
            CoalescentEvents::new(2, vec![(2, 1)], vec![1])
                .unwrap()
                .pairs(),
            &[(1, 2)]
        );
        assert!(CoalescentEvents::new(2, vec![(1, 3)], vec![1]).is_err());
        assert!(CoalescentEvents::new(3, vec![(1, 2), (1, 3)], vec![1, 0]).is_err());
        assert!(CoalescentEvents::new(3, vec![(1, 1), (1, 2)], vec![1, 0]).is_err());
        assert!(CoalescentEvents::new(2, vec![(1, 2)], vec![2]).is_err());
        assert!(CoalescentEvents::new(3, vec![(1, 2)], vec![1]).is_err());
        assert!(matches!(
            CoalescentEvents::new(0, vec![], vec![]),
            Err(Error::Domain(_))
        ));
        assert_eq!(
            CoalescentEvents::new(1, vec![], vec![])
                .unwrap()
                .steps()
                .len(),
            0
        );
    }

    #[test]
    fn sampled_events_are_valid() {
        let mut rng = seeded(3);
        for n in 1..50 {
            let e = sample_events(n, &mut rng).unwrap();
            let again = CoalescentEvents::new(n, e.pairs().to_vec(), e.coins().to_vec()).unwrap();
            assert_eq!(again, e);
        }
        assert!(sample_events(0, &mut rng).is_err());
    }

    #[test]
    fn two_vertex_events() {
        let mut rng = seeded(9);
        let mut ones = 0;
        for _ in 0..4000 {
            let e = sample_events(2, &mut rng).unwrap();
            assert_eq!(e.pairs(), &[(1, 2)]);
            ones += e.coins()[0] as u32;
        }
        assert!((1800..2200).contains(&ones), "{ones}");
    }

    #[test]
    fn tau_examples() {
        let e = CoalescentEvents::new(2, vec![(1, 2)], vec![0]).unwrap();
        assert_eq!(tau_k(&e, 2).unwrap(), Some(1));
        let e = six_vertex_events();
        assert_eq!(tau_k(&e, 2).unwrap(), Some(5));
        assert_eq!(tau_k(&e, 3).unwrap(), Some(4));
        assert!(matches!(tau_k(&e, 1), Err(Error::Domain(_))));
        assert!(tau_k(&e, 7).is_err());
    }

    #[test]
    fn streamed_taus_match_collected_events() {
        for seed in 0..200 {
            let n = 30;
            let e = sample_events(n, &mut seeded(seed)).unwrap();
            let streamed = sample_taus(n, &[2, 3, 5], n, &mut seeded(seed)).unwrap();
            for (k, got) in [2, 3, 5].into_iter().zip(streamed) {
                assert_eq!(got, tau_k(&e, k).unwrap());
            }
            let capped = sample_taus(n, &[2], 10, &mut seeded(seed)).unwrap()[0];
            assert_eq!(capped, tau_k(&e, 2).unwrap().filter(|&t| t <= 10));
        }
    }

    #[test]
    fn json_wire_format() {
        let e = six_vertex_events();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"n":6,"pairs":[[2,5],[1,5],[1,4],[2,3],[1,2]],"coins":[1,0,1,1,0]}"#
        );
        assert_eq!(serde_json::from_str::<CoalescentEvents>(&s).unwrap(), e);
        let bad = r#"{"n":3,"pairs":[[1,4],[1,2]],"coins":[0,0]}"#;
        assert!(serde_json::from_str::<CoalescentEvents>(bad).is_err());
    }
}
