//! Strict partial orders over a roster, stored transitively closed, and their
//! linear extensions.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::CandidateId;

/// A strict partial order over `0..m`, closed under transitivity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialOrder {
    m: usize,
    rel: Vec<bool>,
}

impl PartialOrder {
    pub fn empty(m: usize) -> Self {
        PartialOrder {
            m,
            rel: vec![false; m * m],
        }
    }

    /// Transitive closure of `pairs`; a cycle is an error.
    pub fn from_pairs<I>(m: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CandidateId, CandidateId)>,
    {
        let mut po = PartialOrder::empty(m);
        for (a, b) in pairs {
            if a.0 >= m || b.0 >= m {
                return Err(Error::invalid(format!(
                    "constraint ({a}, {b}) leaves the roster"
                )));
            }
            po.rel[a.0 * m + b.0] = true;
        }
        po.close()?;
        Ok(po)
    }

    /// The total order given by a ranking.
    pub fn from_ranking(ranking: &[CandidateId]) -> Result<Self> {
        crate::model::check_permutation(ranking, ranking.len())?;
        let m = ranking.len();
        let mut po = PartialOrder::empty(m);
        for (i, a) in ranking.iter().enumerate() {
            for b in &ranking[i + 1..] {
                po.rel[a.0 * m + b.0] = true;
            }
        }
        Ok(po)
    }

    /// Chains `x1 > x2 > ...`; consecutive elements become constraints.
    pub fn from_chains(m: usize, chains: &[Vec<CandidateId>]) -> Result<Self> {
        PartialOrder::from_pairs(
            m,
            chains
                .iter()
                .flat_map(|ch| ch.windows(2).map(|w| (w[0], w[1]))),
        )
    }

    fn close(&mut self) -> Result<()> {
        let m = self.m;
        for k in 0..m {
            for i in 0..m {
                if self.rel[i * m + k] {
                    for j in 0..m {
                        if self.rel[k * m + j] {
                            self.rel[i * m + j] = true;
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..m).find(|&i| self.rel[i * m + i]) {
            return Err(Error::invalid(format!(
                "cyclic constraints through candidate {}",
                CandidateId(i)
            )));
        }
        Ok(())
    }

    pub fn candidate_count(&self) -> usize {
        self.m
    }

    /// Whether `a` is required to come before `b`.
    #[inline]
    pub fn precedes(&self, a: CandidateId, b: CandidateId) -> bool {
        self.rel[a.0 * self.m + b.0]
    }

    /// Every constrained pair, lexicographically.
    pub fn pairs(&self) -> Vec<(CandidateId, CandidateId)> {
        let mut out = Vec::new();
        for a in 0..self.m {
            for b in 0..self.m {
                if self.rel[a * self.m + b] {
                    out.push((CandidateId(a), CandidateId(b)));
                }
            }
        }
        out
    }

    /// The transitive reduction (cover relation), lexicographically.
    pub fn cover_pairs(&self) -> Vec<(CandidateId, CandidateId)> {
        self.pairs()
            .into_iter()
            .filter(|&(a, b)| {
                !(0..self.m)
                    .map(CandidateId)
                    .any(|k| self.precedes(a, k) && self.precedes(k, b))
            })
            .collect()
    }

    /// Adds `a > b` and re-closes.
    pub fn with_pair(&self, a: CandidateId, b: CandidateId) -> Result<Self> {
        let mut po = self.clone();
        po.rel[a.0 * self.m + b.0] = true;
        po.close()?;
        Ok(po)
    }

    pub fn is_total(&self) -> bool {
        self.pairs().len() == self.m * self.m.saturating_sub(1) / 2
    }

    /// The ranking, when the order is total.
    pub fn as_ranking(&self) -> Option<Vec<CandidateId>> {
        self.is_total().then(|| self.first_extension())
    }

    /// Whether a complete ranking respects every constraint.
    pub fn is_extended_by(&self, ranking: &[CandidateId]) -> bool {
        if ranking.len() != self.m {
            return false;
        }
        let pos = crate::model::positions(ranking);
        self.pairs().into_iter().all(|(a, b)| pos[a.0] < pos[b.0])
    }

    /// Candidates that must precede `c`.
    pub fn superiors(&self, c: CandidateId) -> Vec<CandidateId> {
        (0..self.m)
            .map(CandidateId)
            .filter(|&x| self.precedes(x, c))
            .collect()
    }

    /// Topological order of `subset` placing the smallest available id first.
    /// Constraints reaching outside `subset` are ignored.
    fn min_id_topo(&self, subset: &[bool]) -> Vec<CandidateId> {
        let m = self.m;
        let mut placed = vec![false; m];
        let mut out = Vec::with_capacity(subset.iter().filter(|&&x| x).count());
        let target = out.capacity();
        while out.len() < target {
            let next = (0..m)
                .find(|&c| {
                    subset[c]
                        && !placed[c]
                        && (0..m).all(|x| !(subset[x] && !placed[x] && self.rel[x * m + c]))
                })
                .expect("a partial order always has a minimal element");
            placed[next] = true;
            out.push(CandidateId(next));
        }
        out
    }

    /// The linear extension built by always taking the smallest available id.
    pub fn first_extension(&self) -> Vec<CandidateId> {
        self.min_id_topo(&vec![true; self.m])
    }

    /// A linear extension ranking `c` as high as the constraints allow: its
    /// forced superiors first, then `c`, then everybody else. Both blocks use
    /// smallest-available-id order.
    pub fn raised_extension(&self, c: CandidateId) -> Vec<CandidateId> {
        let above: Vec<bool> = (0..self.m).map(|x| self.rel[x * self.m + c.0]).collect();
        let below: Vec<bool> = (0..self.m).map(|x| x != c.0 && !above[x]).collect();
        let mut out = self.min_id_topo(&above);
        out.push(c);
        out.extend(self.min_id_topo(&below));
        out
    }

    /// Visits every linear extension by backtracking, trying the smallest
    /// available id first. Stops early when `f` breaks.
    pub fn for_each_extension<F>(&self, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&[CandidateId]) -> ControlFlow<()>,
    {
        let m = self.m;
        // pending[c] = number of unplaced candidates required before c
        let mut pending: Vec<usize> = (0..m)
            .map(|c| (0..m).filter(|&x| self.rel[x * m + c]).count())
            .collect();
        let mut placed = vec![false; m];
        let mut prefix = Vec::with_capacity(m);
        self.extend_rec(&mut pending, &mut placed, &mut prefix, &mut f)
    }

    fn extend_rec<F>(
        &self,
        pending: &mut [usize],
        placed: &mut [bool],
        prefix: &mut Vec<CandidateId>,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[CandidateId]) -> ControlFlow<()>,
    {
        let m = self.m;
        if prefix.len() == m {
            return f(prefix);
        }
        for c in 0..m {
            if placed[c] || pending[c] != 0 {
                continue;
            }
            placed[c] = true;
            prefix.push(CandidateId(c));
            for y in 0..m {
                if self.rel[c * m + y] {
                    pending[y] -= 1;
                }
            }
            let flow = self.extend_rec(pending, placed, prefix, f);
            for y in 0..m {
                if self.rel[c * m + y] {
                    pending[y] += 1;
                }
            }
            prefix.pop();
            placed[c] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }

    pub fn extensions(&self) -> Vec<Vec<CandidateId>> {
        let mut out = Vec::new();
        let _ = self.for_each_extension(|r| {
            out.push(r.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    /// Number of linear extensions, by dynamic programming over down-sets.
    /// Saturates at `u128::MAX` when the state space is too large to walk
    /// (sparse orders on many candidates), which callers treat as "beyond any
    /// cap".
    pub fn count_extensions(&self) -> u128 {
        const STATE_LIMIT: usize = 1 << 21;
        let m = self.m;
        if m > 128 {
            return u128::MAX;
        }
        let preds: Vec<u128> = (0..m)
            .map(|c| {
                (0..m)
                    .filter(|&x| self.rel[x * m + c])
                    .fold(0u128, |acc, x| acc | (1u128 << x))
            })
            .collect();
        let full: u128 = if m == 128 {
            u128::MAX
        } else {
            (1u128 << m) - 1
        };
        let mut memo: HashMap<u128, u128> = HashMap::new();
        fn walk(
            placed: u128,
            full: u128,
            preds: &[u128],
            memo: &mut HashMap<u128, u128>,
            limit: usize,
        ) -> Option<u128> {
            if placed == full {
                return Some(1);
            }
            if let Some(&v) = memo.get(&placed) {
                return Some(v);
            }
            if memo.len() > limit {
                return None;
            }
            let mut total: u128 = 0;
            for (c, &p) in preds.iter().enumerate() {
                let bit = 1u128 << c;
                if placed & bit == 0 && p & !placed == 0 {
                    let sub = walk(placed | bit, full, preds, memo, limit)?;
                    total = total.saturating_add(sub);
                }
            }
            memo.insert(placed, total);
            Some(total)
        }
        walk(0, full, &preds, &mut memo, STATE_LIMIT).unwrap_or(u128::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(i: usize) -> CandidateId {
        CandidateId(i)
    }

    fn factorial(n: usize) -> u128 {
        (1..=n as u128).product()
    }

    #[test]
    fn closure_and_cycles() {
        let po = PartialOrder::from_pairs(3, [(c(0), c(1)), (c(1), c(2))]).unwrap();
        assert!(po.precedes(c(0), c(2)));
        assert!(po.is_total());
        assert_eq!(po.cover_pairs(), vec![(c(0), c(1)), (c(1), c(2))]);
        assert!(PartialOrder::from_pairs(2, [(c(0), c(1)), (c(1), c(0))]).is_err());
        assert!(PartialOrder::from_pairs(2, [(c(0), c(0))]).is_err());
    }

    #[test]
    fn extension_counts() {
        assert_eq!(PartialOrder::empty(0).count_extensions(), 1);
        assert_eq!(PartialOrder::empty(5).count_extensions(), 120);
        let chain = PartialOrder::from_ranking(&[c(2), c(0), c(1)]).unwrap();
        assert_eq!(chain.count_extensions(), 1);
        assert_eq!(chain.extensions(), vec![vec![c(2), c(0), c(1)]]);
        // a > b, c free: 3 extensions
        let po = PartialOrder::from_pairs(3, [(c(0), c(1))]).unwrap();
        assert_eq!(po.count_extensions(), 3);
        assert_eq!(
            po.extensions(),
            vec![
                vec![c(0), c(1), c(2)],
                vec![c(0), c(2), c(1)],
                vec![c(2), c(0), c(1)]
            ]
        );
    }

    #[test]
    fn raised_extension_places_c_under_its_superiors() {
        // 0 > 2, 1 > 3 ; raise 2: only 0 must precede it
        let po = PartialOrder::from_pairs(4, [(c(0), c(2)), (c(1), c(3))]).unwrap();
        assert_eq!(po.raised_extension(c(2)), vec![c(0), c(2), c(1), c(3)]);
        assert_eq!(po.raised_extension(c(3)), vec![c(1), c(3), c(0), c(2)]);
        assert_eq!(po.first_extension(), vec![c(0), c(1), c(2), c(3)]);
    }

    fn arb_order(max_m: usize) -> impl Strategy<Value = PartialOrder> {
        (1..=max_m).prop_flat_map(|m| {
            (
                Just(m),
                Just((0..m).collect::<Vec<usize>>()).prop_shuffle(),
                proptest::collection::vec(any::<bool>(), m * m),
            )
                .prop_map(|(m, perm, keep)| {
                    let mut pairs = Vec::new();
                    for i in 0..m {
                        for j in i + 1..m {
                            if keep[i * m + j] {
                                pairs.push((c(perm[i]), c(perm[j])));
                            }
                        }
                    }
                    PartialOrder::from_pairs(m, pairs).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn enumeration_matches_count_and_brute_force(po in arb_order(6)) {
            let exts = po.extensions();
            prop_assert_eq!(exts.len() as u128, po.count_extensions());
            // brute force over all permutations
            let m = po.candidate_count();
            let brute = itertools::Itertools::permutations((0..m).map(c), m)
                .filter(|r| po.is_extended_by(r))
                .count();
            prop_assert_eq!(brute, exts.len());
            for r in &exts {
                prop_assert!(po.is_extended_by(r));
            }
            prop_assert!(po.is_extended_by(&po.first_extension()));
            for x in 0..m {
                let r = po.raised_extension(c(x));
                prop_assert!(po.is_extended_by(&r));
                prop_assert_eq!(r.iter().position(|&y| y == c(x)).unwrap(), po.superiors(c(x)).len());
            }
        }

        #[test]
        fn cover_pairs_regenerate_closure(po in arb_order(7)) {
            let back = PartialOrder::from_pairs(po.candidate_count(), po.cover_pairs()).unwrap();
            prop_assert_eq!(back, po);
        }
    }

    #[test]
    fn empty_order_on_many_candidates_saturates_or_counts() {
        assert_eq!(PartialOrder::empty(10).count_extensions(), factorial(10));
    }
}
