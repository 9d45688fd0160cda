//! Agenda control and coalition manipulation for TSMR.

use std::ops::ControlFlow;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Agenda, CandidateId, Election, Vote};
use crate::rules::{tsmr_winner, tsmr_winner_by};

/// Limit on the number of ballot multisets the manipulation oracle visits.
pub const MANIPULATION_ORACLE_CAP: u128 = 1_000_000;

/// Largest roster the agenda-control oracle enumerates.
pub const AGENDA_ORACLE_MAX_M: usize = 8;

fn check_candidate(e: &Election, p: CandidateId) -> Result<()> {
    if p.0 >= e.candidate_count() {
        return Err(Error::invalid(format!(
            "candidate {p} is not in the roster"
        )));
    }
    Ok(())
}

/// Finds an agenda under which `p` wins, if one exists.
///
/// Candidates that do not beat `p` go first (ascending id), then `p`. Every
/// remaining candidate beats `p` and must be placed after some candidate that
/// beats it; the construction appends, layer by layer, all unplaced
/// candidates beaten by someone already placed. Control is possible exactly
/// when this reaches every candidate.
pub fn agenda_control(e: &Election, p: CandidateId) -> Result<Option<Agenda>> {
    check_candidate(e, p)?;
    let m = e.candidate_count();
    let t = e.tally();
    let mut placed = vec![false; m];
    let mut order: Vec<CandidateId> = e
        .roster()
        .ids()
        .filter(|&c| c != p && !t.beats(c, p))
        .collect();
    order.push(p);
    for c in &order {
        placed[c.0] = true;
    }
    loop {
        let layer: Vec<CandidateId> = e
            .roster()
            .ids()
            .filter(|&c| !placed[c.0] && order.iter().any(|&s| t.beats(s, c)))
            .collect();
        if layer.is_empty() {
            break;
        }
        for &c in &layer {
            placed[c.0] = true;
        }
        order.extend(layer);
    }
    if order.len() < m {
        return Ok(None);
    }
    Ok(Some(Agenda::new(order, m)?))
}

/// Tries every agenda. Exponential; for cross-checking only.
pub fn agenda_control_oracle(e: &Election, p: CandidateId) -> Result<bool> {
    check_candidate(e, p)?;
    let m = e.candidate_count();
    if m > AGENDA_ORACLE_MAX_M {
        return Err(Error::CapExceeded {
            what: "agenda enumeration",
            size: m as u128,
            cap: AGENDA_ORACLE_MAX_M as u128,
        });
    }
    let t = e.tally();
    let found = e
        .roster()
        .ids()
        .permutations(m)
        .any(|order| tsmr_winner_by(&order, |a, b| t.beats(a, b)) == Some(p));
    Ok(found)
}

/// The outcome of [`coalition_manipulation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manipulation {
    /// The ballot every manipulator casts.
    pub ballot: Vec<CandidateId>,
    pub k: u32,
    pub feasible: bool,
}

impl Manipulation {
    /// The manipulators' votes, when they make `p` win.
    pub fn witness(&self) -> Option<Vote> {
        self.feasible
            .then(|| Vote::new(self.ballot.clone(), self.k).expect("k >= 1"))
    }
}

/// `p`, then its agenda predecessors, then its successors, both in agenda
/// order.
pub fn canonical_ballot(a: &Agenda, p: CandidateId) -> Vec<CandidateId> {
    let mut ballot = vec![p];
    ballot.extend(a.predecessors(p));
    ballot.extend(a.successors(p));
    ballot
}

/// Decides whether `k` additional voters can make `p` the TSMR winner. All
/// manipulators cast the canonical ballot, which is optimal.
pub fn coalition_manipulation(
    e: &Election,
    p: CandidateId,
    a: &Agenda,
    k: u32,
) -> Result<Manipulation> {
    check_candidate(e, p)?;
    if k == 0 {
        return Err(Error::invalid("coalition size must be at least 1"));
    }
    if a.len() != e.candidate_count() {
        return Err(Error::invalid("agenda does not match the roster"));
    }
    let ballot = canonical_ballot(a, p);
    let mut votes = e.votes().to_vec();
    votes.push(Vote::new(ballot.clone(), k)?);
    let after = Election::new(e.roster().clone(), votes)?;
    let feasible = tsmr_winner(&after, a)? == p;
    Ok(Manipulation {
        ballot,
        k,
        feasible,
    })
}

/// Tries every multiset of `k` ballots. Exponential; for cross-checking only.
pub fn manipulation_oracle(e: &Election, p: CandidateId, a: &Agenda, k: u32) -> Result<bool> {
    check_candidate(e, p)?;
    let m = e.candidate_count();
    let orders = (1..=m as u128).product::<u128>();
    let size = (0..k).try_fold(1u128, |acc, _| acc.checked_mul(orders));
    match size {
        Some(s) if s <= MANIPULATION_ORACLE_CAP => {}
        _ => {
            return Err(Error::CapExceeded {
                what: "ballot multisets",
                size: size.unwrap_or(u128::MAX),
                cap: MANIPULATION_ORACLE_CAP,
            })
        }
    }
    let base = e.tally();
    let ballots: Vec<Vec<CandidateId>> = e.roster().ids().permutations(m).collect();
    // margin[a][b] after adding a ballot multiset, computed incrementally
    let base_margin: Vec<i64> = (0..m * m)
        .map(|i| base.margin(CandidateId(i / m), CandidateId(i % m)))
        .collect();
    let wins =
        |margin: &[i64]| tsmr_winner_by(a.order(), |x, y| margin[x.0 * m + y.0] > 0) == Some(p);
    if k == 0 {
        return Ok(wins(&base_margin));
    }
    let found = (0..ballots.len()).into_par_iter().any(|first| {
        let mut margin = base_margin.clone();
        apply(&mut margin, &ballots[first], m, 1);
        search(&ballots, first, k - 1, &mut margin, m, &wins).is_break()
    });
    Ok(found)
}

fn apply(margin: &mut [i64], ballot: &[CandidateId], m: usize, sign: i64) {
    for (i, x) in ballot.iter().enumerate() {
        for y in &ballot[i + 1..] {
            margin[x.0 * m + y.0] += sign;
            margin[y.0 * m + x.0] -= sign;
        }
    }
}

fn search<F>(
    ballots: &[Vec<CandidateId>],
    from: usize,
    left: u32,
    margin: &mut Vec<i64>,
    m: usize,
    wins: &F,
) -> ControlFlow<()>
where
    F: Fn(&[i64]) -> bool,
{
    if left == 0 {
        return if wins(margin) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        };
    }
    for i in from..ballots.len() {
        apply(margin, &ballots[i], m, 1);
        let r = search(ballots, i, left - 1, margin, m, wins);
        apply(margin, &ballots[i], m, -1);
        r?;
    }
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{election, example1};

    const P: CandidateId = CandidateId(0);
    const Q: CandidateId = CandidateId(1);

    #[test]
    fn agenda_control_example1_everyone() {
        let e = example1();
        for c in e.roster().ids() {
            let witness = agenda_control(&e, c).unwrap();
            assert_eq!(witness.is_some(), agenda_control_oracle(&e, c).unwrap());
            if let Some(a) = witness {
                assert_eq!(tsmr_winner(&e, &a).unwrap(), c);
            }
        }
    }

    #[test]
    fn agenda_control_condorcet_loser_fails() {
        // 0 > 1 > 2 unanimously: nobody beats 0, so 0 wins wherever it sits.
        let e = election(3, &[&[0, 1, 2]]);
        assert_eq!(agenda_control(&e, CandidateId(2)).unwrap(), None);
        assert_eq!(agenda_control(&e, CandidateId(1)).unwrap(), None);
        let a = agenda_control(&e, CandidateId(0)).unwrap().unwrap();
        assert_eq!(
            a.order(),
            &[CandidateId(1), CandidateId(2), CandidateId(0)][..]
        );
    }

    #[test]
    fn manipulation_two_candidates() {
        let a = Agenda::from_indices(&[1, 0]).unwrap();
        let e = election(2, &[&[1, 0]]);
        let r = coalition_manipulation(&e, P, &a, 1).unwrap();
        assert!(r.feasible);
        assert_eq!(r.ballot, vec![P, Q]);

        let e = election(2, &[&[1, 0], &[1, 0], &[1, 0]]);
        let r = coalition_manipulation(&e, P, &a, 1).unwrap();
        assert!(!r.feasible);
        assert!(r.witness().is_none());
        assert!(!manipulation_oracle(&e, P, &a, 1).unwrap());
    }

    #[test]
    fn manipulation_keeps_existing_winner() {
        let e = example1();
        let a = Agenda::identity(4);
        for k in 1..4 {
            assert!(coalition_manipulation(&e, P, &a, k).unwrap().feasible);
        }
    }

    #[test]
    fn canonical_ballot_layout() {
        let a = Agenda::from_indices(&[2, 0, 3, 1]).unwrap();
        let b = canonical_ballot(&a, CandidateId(3));
        assert_eq!(
            b,
            vec![
                CandidateId(3),
                CandidateId(2),
                CandidateId(0),
                CandidateId(1)
            ]
        );
    }

    #[test]
    fn oracle_cap() {
        let e = election(6, &[]);
        let a = Agenda::identity(6);
        assert!(manipulation_oracle(&e, P, &a, 3).unwrap_err().is_cap());
    }

    #[test]
    fn single_candidate_trivial() {
        let e = election(1, &[&[0]]);
        let a = Agenda::identity(1);
        assert!(manipulation_oracle(&e, P, &a, 2).unwrap());
        assert!(coalition_manipulation(&e, P, &a, 2).unwrap().feasible);
        assert!(agenda_control(&e, P).unwrap().is_some());
    }
}
