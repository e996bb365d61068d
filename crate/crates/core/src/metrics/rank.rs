use std::fmt;
use std::ops::{Add, Sub};

use serde::{Serialize, Serializer};

use super::Label;
use crate::{Error, Result};

/// A Mann-Whitney U value.
///
/// U is always a multiple of one half (a tied pair counts 0.5), so it is held
/// as an integer count of half-pairs. Sums of U values are therefore exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UStatistic {
    half_units: u64,
}

impl UStatistic {
    pub const ZERO: Self = Self { half_units: 0 };

    pub fn from_half_units(half_units: u64) -> Self {
        Self { half_units }
    }

    pub fn half_units(self) -> u64 {
        self.half_units
    }

    pub fn value(self) -> f64 {
        self.half_units as f64 / 2.0
    }

    /// `U / pairs`; `None` when there are no pairs.
    pub fn normalized(self, pairs: u64) -> Option<f64> {
        (pairs > 0).then(|| self.half_units as f64 / (2.0 * pairs as f64))
    }
}

impl Add for UStatistic {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_half_units(self.half_units + rhs.half_units)
    }
}

impl Sub for UStatistic {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_half_units(self.half_units - rhs.half_units)
    }
}

impl std::iter::Sum for UStatistic {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl fmt::Display for UStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.half_units.is_multiple_of(2) {
            write!(f, "{}", self.half_units / 2)
        } else {
            write!(f, "{}.5", self.half_units / 2)
        }
    }
}

impl Serialize for UStatistic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

/// Mann-Whitney U of `positives` over `negatives`: the number of
/// (negative, positive) pairs in which the positive scores higher, with ties
/// counted as one half.
///
/// Runs in `O(m log m)` by ranking the pooled scores with midranks for ties.
pub fn mann_whitney_u(negatives: &[f64], positives: &[f64]) -> Result<UStatistic> {
    let pooled = negatives
        .iter()
        .map(|&s| (s, Label::Negative))
        .chain(positives.iter().map(|&s| (s, Label::Positive)));
    mann_whitney_u_labeled(pooled)
}

/// `mann_whitney_u / (|negatives| * |positives|)`.
pub fn auc(negatives: &[f64], positives: &[f64]) -> Result<f64> {
    let u = mann_whitney_u(negatives, positives)?;
    Ok(
        u.normalized(negatives.len() as u64 * positives.len() as u64)
            .expect("both sides are non-empty"),
    )
}

/// Mann-Whitney U over a pooled sequence of `(score, label)` pairs.
pub fn mann_whitney_u_labeled<I>(scored: I) -> Result<UStatistic>
where
    I: IntoIterator<Item = (f64, Label)>,
{
    let mut pooled: Vec<(f64, Label)> = scored.into_iter().collect();
    if pooled.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::NanScore);
    }
    let n_pos = pooled.iter().filter(|(_, l)| l.is_positive()).count() as u64;
    let n_neg = pooled.len() as u64 - n_pos;
    if n_neg == 0 {
        return Err(Error::EmptySide { side: "negative" });
    }
    if n_pos == 0 {
        return Err(Error::EmptySide { side: "positive" });
    }
    pooled.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    // Twice the rank sum of the positives. A tie block occupying 0-based
    // positions start..end has doubled midrank (start + 1) + end.
    let mut doubled_rank_sum: u64 = 0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        let block_pos = pooled[start..end]
            .iter()
            .filter(|(_, l)| l.is_positive())
            .count() as u64;
        doubled_rank_sum += block_pos * (start as u64 + 1 + end as u64);
        start = end;
    }
    Ok(UStatistic::from_half_units(
        doubled_rank_sum - n_pos * (n_pos + 1),
    ))
}

/// AUC over a pooled sequence of `(score, label)` pairs.
pub fn auc_labeled<I>(scored: I) -> Result<f64>
where
    I: IntoIterator<Item = (f64, Label)>,
{
    let pooled: Vec<(f64, Label)> = scored.into_iter().collect();
    let n_pos = pooled.iter().filter(|(_, l)| l.is_positive()).count() as u64;
    let n_neg = pooled.len() as u64 - n_pos;
    let u = mann_whitney_u_labeled(pooled)?;
    Ok(u.normalized(n_neg * n_pos)
        .expect("both sides are non-empty"))
}

/// Scores sorted once so that U against many small samples can be taken by
/// binary search.
#[derive(Debug, Clone, Default)]
pub struct SortedScores {
    sorted: Vec<f64>,
}

impl SortedScores {
    pub fn new(mut scores: Vec<f64>) -> Result<Self> {
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::NanScore);
        }
        scores.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: scores })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Twice the number of stored scores strictly below `x`, plus the number
    /// equal to `x`.
    pub fn half_units_below(&self, x: f64) -> u64 {
        let below = self.sorted.partition_point(|s| *s < x);
        let not_above = self.sorted.partition_point(|s| *s <= x);
        (2 * below + (not_above - below)) as u64
    }

    /// U of `positives` over the stored scores taken as negatives. Unlike
    /// [`mann_whitney_u`] this accepts empty sides and returns zero.
    pub fn u_as_negatives(&self, positives: &[f64]) -> UStatistic {
        UStatistic::from_half_units(positives.iter().map(|&p| self.half_units_below(p)).sum())
    }

    /// U of the stored scores taken as positives over `negatives`.
    pub fn u_as_positives(&self, negatives: &[f64]) -> UStatistic {
        let pairs = (self.len() * negatives.len()) as u64;
        // Pairs split into positive-wins, ties and negative-wins; flipping the
        // roles swaps wins and keeps ties.
        UStatistic::from_half_units(2 * pairs - self.u_as_negatives(negatives).half_units())
    }
}

#[cfg(test)]
mod tests {
    use std::cmp::Ordering;

    use proptest::prelude::*;

    use super::*;

    /// Quadratic pair count in half units; the definition of U.
    fn brute_force_half_units(neg: &[f64], pos: &[f64]) -> u64 {
        let mut total = 0;
        for &n in neg {
            for &p in pos {
                total += match p.partial_cmp(&n).unwrap() {
                    Ordering::Greater => 2,
                    Ordering::Equal => 1,
                    Ordering::Less => 0,
                };
            }
        }
        total
    }

    #[test]
    fn single_dominating_pair() {
        assert_eq!(mann_whitney_u(&[0.1], &[0.9]).unwrap().value(), 1.0);
    }

    #[test]
    fn exact_tie_counts_half() {
        assert_eq!(mann_whitney_u(&[0.5], &[0.5]).unwrap().value(), 0.5);
    }

    #[test]
    fn two_by_two_matches_enumeration() {
        let (neg, pos) = ([0.2, 0.4], [0.3, 0.6]);
        assert_eq!(brute_force_half_units(&neg, &pos), 6);
        assert_eq!(mann_whitney_u(&neg, &pos).unwrap().value(), 3.0);
        assert_eq!(auc(&neg, &pos).unwrap(), 0.75);
    }

    #[test]
    fn constant_scores_give_one_half() {
        assert_eq!(auc(&[0.3; 7], &[0.3; 4]).unwrap(), 0.5);
    }

    #[test]
    fn perfect_separation_gives_one() {
        assert_eq!(auc(&[0.1, 0.2, 0.2], &[0.3, 0.9]).unwrap(), 1.0);
    }

    #[test]
    fn empty_sides_are_errors() {
        assert!(matches!(
            mann_whitney_u(&[], &[0.5]),
            Err(Error::EmptySide { side: "negative" })
        ));
        assert!(matches!(
            auc(&[0.5], &[]),
            Err(Error::EmptySide { side: "positive" })
        ));
    }

    #[test]
    fn nan_is_rejected() {
        assert!(matches!(auc(&[f64::NAN], &[0.5]), Err(Error::NanScore)));
    }

    #[test]
    fn signed_zero_ties() {
        assert_eq!(
            mann_whitney_u(&[-0.0, 0.0], &[0.0, -0.0]).unwrap().value(),
            2.0
        );
    }

    #[test]
    fn display_shows_halves() {
        assert_eq!(UStatistic::from_half_units(7).to_string(), "3.5");
        assert_eq!(UStatistic::from_half_units(8).to_string(), "4");
    }

    fn tied_scores(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0u32..=20).prop_map(|k| f64::from(k) / 20.0), 1..max_len)
    }

    proptest! {
        #[test]
        fn ranked_u_equals_pair_count(neg in tied_scores(60), pos in tied_scores(60)) {
            let u = mann_whitney_u(&neg, &pos).unwrap();
            prop_assert_eq!(u.half_units(), brute_force_half_units(&neg, &pos));
        }

        #[test]
        fn sorted_scores_route_agrees(neg in tied_scores(60), pos in tied_scores(60)) {
            let expected = brute_force_half_units(&neg, &pos);
            let sorted_neg = SortedScores::new(neg.clone()).unwrap();
            prop_assert_eq!(sorted_neg.u_as_negatives(&pos).half_units(), expected);
            let sorted_pos = SortedScores::new(pos.clone()).unwrap();
            prop_assert_eq!(sorted_pos.u_as_positives(&neg).half_units(), expected);
        }

        #[test]
        fn complement_without_ties(
            neg in prop::collection::vec(0.0f64..1.0, 1..40),
            pos in prop::collection::vec(0.0f64..1.0, 1..40),
        ) {
            let mut all: Vec<f64> = neg.iter().chain(&pos).copied().collect();
            all.sort_by(f64::total_cmp);
            all.dedup();
            prop_assume!(all.len() == neg.len() + pos.len());
            let a = auc(&neg, &pos).unwrap();
            let b = auc(&pos, &neg).unwrap();
            prop_assert!((a + b - 1.0).abs() < 1e-15);
        }

        #[test]
        fn duplicating_positives_keeps_auc(neg in tied_scores(30), pos in tied_scores(30), k in 1usize..5) {
            let repeated: Vec<f64> = pos.iter().flat_map(|&p| std::iter::repeat_n(p, k)).collect();
            prop_assert_eq!(auc(&neg, &pos).unwrap(), auc(&neg, &repeated).unwrap());
        }
    }
}
