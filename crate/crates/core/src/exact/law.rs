use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};

use super::enumerate::{enumerate_events, enumerate_increasing_trees};
use crate::error::{Error, Result};
use crate::kingman::replay;
use crate::stats::{DegreeProfile, MomentSpec};
use crate::tree::{DegreeMultiset, RootedTree};

/// Renders a rational as `"p/q"`, including integers (`"1/1"`).
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Nearest `f64`, for display next to the exact value.
pub fn rational_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn ser_rational<S: Serializer>(
    q: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(q))
}

pub(crate) fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// A finite law with exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactLaw<T: Ord> {
    weights: BTreeMap<T, BigRational>,
}

impl<T: Ord> ExactLaw<T> {
    /// Normalises outcome counts into a law. Zero counts are dropped.
    pub fn from_counts(counts: BTreeMap<T, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::Domain("empty law".into()));
        }
        let weights = counts
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(t, c)| (t, ratio(c, total)))
            .collect();
        Ok(ExactLaw { weights })
    }

    pub fn weight(&self, outcome: &T) -> BigRational {
        self.weights
            .get(outcome)
            .cloned()
            .unwrap_or_else(|| ratio(0, 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &BigRational)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.weights.values().fold(ratio(0, 1), |acc, w| acc + w)
    }

    pub fn expectation(&self, f: impl Fn(&T) -> BigRational) -> BigRational {
        self.weights
            .iter()
            .fold(ratio(0, 1), |acc, (t, w)| acc + f(t) * w)
    }
}

#[derive(Serialize)]
struct Entry<'a, T> {
    outcome: &'a T,
    #[serde(serialize_with = "ser_rational")]
    weight: &'a BigRational,
}

impl<T: Ord + Serialize> Serialize for ExactLaw<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let support: Vec<Entry<'_, T>> = self
            .weights
            .iter()
            .map(|(outcome, weight)| Entry { outcome, weight })
            .collect();
        support.serialize(s)
    }
}

/// Which construction an exact law is computed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Uniform increasing trees.
    Rrt,
    /// Final trees of uniform event sequences.
    Kingman,
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rrt" => Ok(Source::Rrt),
            "kingman" => Ok(Source::Kingman),
            _ => Err(Error::Config(format!(
                "unknown source '{s}', expected rrt or kingman"
            ))),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Rrt => "rrt",
            Source::Kingman => "kingman",
        })
    }
}

/// For every tree, the number of event sequences whose relabelled final
/// tree equals it.
pub fn phi_fiber_census(n: usize) -> Result<BTreeMap<RootedTree, u64>> {
    let mut census = BTreeMap::new();
    for events in enumerate_events(n)? {
        *census.entry(replay(&events).phi_tree).or_insert(0) += 1;
    }
    Ok(census)
}

pub fn exact_profile_law(n: usize, source: Source) -> Result<ExactLaw<DegreeMultiset>> {
    let mut counts = BTreeMap::new();
    match source {
        Source::Rrt => {
            for t in enumerate_increasing_trees(n)? {
                *counts.entry(t.degree_multiset()).or_insert(0) += 1;
            }
        }
        Source::Kingman => {
            for events in enumerate_events(n)? {
                *counts
                    .entry(replay(&events).final_tree.degree_multiset())
                    .or_insert(0) += 1;
            }
        }
    }
    ExactLaw::from_counts(counts)
}

/// Exact `E[(X_{≥i'})_{a'} Π_k (X_k)_{a_k}]` under uniform increasing trees.
pub fn exact_factorial_moments(n: usize, spec: &MomentSpec) -> Result<BigRational> {
    let law = exact_profile_law(n, Source::Rrt)?;
    let mut acc = ratio(0, 1);
    for (multiset, w) in law.iter() {
        let p = DegreeProfile::from_degrees(multiset.as_slice())?;
        acc += BigRational::from_integer(BigInt::from(spec.evaluate(&p)?)) * w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> u64 {
        (1..=n).product()
    }

    #[test]
    fn fibers_are_constant() {
        for n in 1..=4 {
            let census = phi_fiber_census(n).unwrap();
            let trees: Vec<RootedTree> = enumerate_increasing_trees(n).unwrap().collect();
            assert_eq!(census.keys().cloned().collect::<Vec<_>>(), trees);
            assert!(
                census.values().all(|&c| c == factorial(n as u64)),
                "n = {n}"
            );
        }
        assert_eq!(phi_fiber_census(2).unwrap().values().next(), Some(&2));
    }

    #[test]
    fn small_profile_laws() {
        let two = exact_profile_law(2, Source::Rrt).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(
            two.weight(&DegreeMultiset::from_degrees(vec![1, 0])),
            ratio(1, 1)
        );

        let three = exact_profile_law(3, Source::Rrt).unwrap();
        assert_eq!(
            three.weight(&DegreeMultiset::from_degrees(vec![2, 0, 0])),
            ratio(1, 2)
        );
        assert_eq!(
            three.weight(&DegreeMultiset::from_degrees(vec![1, 1, 0])),
            ratio(1, 2)
        );
    }

    #[test]
    fn sources_agree_and_sum_to_one() {
        for n in 1..=5 {
            let r = exact_profile_law(n, Source::Rrt).unwrap();
            let k = exact_profile_law(n, Source::Kingman).unwrap();
            assert_eq!(r, k, "n = {n}");
            assert_eq!(r.total(), ratio(1, 1));
        }
        assert!(exact_profile_law(7, Source::Kingman).is_err());
    }

    #[test]
    fn factorial_moments() {
        // n = 4: degree-2 counts over the six trees are 0,1,1,1,1,0
        assert_eq!(
            exact_factorial_moments(4, &MomentSpec::point(0, 1)).unwrap(),
            ratio(2, 3)
        );
        assert_eq!(
            exact_factorial_moments(6, &MomentSpec::default()).unwrap(),
            ratio(1, 1)
        );
        assert_eq!(
            exact_factorial_moments(4, &MomentSpec::point(-2, 5)).unwrap(),
            ratio(0, 1)
        );
        // point moment of order one equals the mean read off the law
        for n in 2..=7 {
            let law = exact_profile_law(n, Source::Rrt).unwrap();
            for i in -2..=2 {
                let mean = law.expectation(|m| {
                    let p = DegreeProfile::from_degrees(m.as_slice()).unwrap();
                    ratio(p.x(i), 1)
                });
                assert_eq!(
                    exact_factorial_moments(n, &MomentSpec::point(i, 1)).unwrap(),
                    mean
                );
            }
        }
    }

    #[test]
    fn rationals_render_as_fractions() {
        assert_eq!(rational_string(&ratio(4, 6)), "2/3");
        assert_eq!(rational_string(&ratio(1, 1)), "1/1");
        let law = exact_profile_law(3, Source::Rrt).unwrap();
        let json = serde_json::to_string(&law).unwrap();
        assert_eq!(
            json,
            r#"[{"outcome":[1,1,0],"weight":"1/2"},{"outcome":[2,0,0],"weight":"1/2"}]"#
        );
    }
}
