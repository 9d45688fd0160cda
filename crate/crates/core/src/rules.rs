//! Winner determination for sequential rules.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{positions, Agenda, CandidateId, Election};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Tsmr,
    Successive,
    Amendment,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Tsmr, Rule::Successive, Rule::Amendment];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Tsmr => "tsmr",
            Rule::Successive => "successive",
            Rule::Amendment => "amendment",
        }
    }

    pub fn winner(self, e: &Election, a: &Agenda) -> Result<CandidateId> {
        match self {
            Rule::Tsmr => tsmr_winner(e, a),
            Rule::Successive => successive_winner(e, a),
            Rule::Amendment => amendment_winner(e, a),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown rule {s:?}")))
    }
}

fn check_agenda(e: &Election, a: &Agenda) -> Result<()> {
    if e.candidate_count() == 0 {
        return Err(Error::invalid("empty roster"));
    }
    if a.len() != e.candidate_count() {
        return Err(Error::invalid(format!(
            "agenda covers {} candidates, election has {}",
            a.len(),
            e.candidate_count()
        )));
    }
    Ok(())
}

/// TSMR over an arbitrary beats-relation: the latest candidate in `order`
/// that no earlier candidate beats. `None` only when `order` is empty.
///
/// The first candidate of a non-empty order always qualifies, so scanning
/// from the back terminates with a winner.
pub fn tsmr_winner_by<F>(order: &[CandidateId], beats: F) -> Option<CandidateId>
where
    F: Fn(CandidateId, CandidateId) -> bool,
{
    (0..order.len())
        .rev()
        .find(|&j| order[..j].iter().all(|&x| !beats(x, order[j])))
        .map(|j| order[j])
}

pub fn tsmr_winner(e: &Election, a: &Agenda) -> Result<CandidateId> {
    check_agenda(e, a)?;
    let t = e.tally();
    Ok(tsmr_winner_by(a.order(), |x, y| t.beats(x, y)).expect("non-empty agenda"))
}

/// The first agenda candidate ranked above all of its successors by a
/// strict majority of voters.
pub fn successive_winner(e: &Election, a: &Agenda) -> Result<CandidateId> {
    check_agenda(e, a)?;
    let n = e.vote_count();
    if n == 0 {
        return Err(Error::NoVotes);
    }
    let vote_pos: Vec<(Vec<usize>, u64)> = e
        .votes()
        .iter()
        .map(|v| (positions(v.ranking()), u64::from(v.multiplicity())))
        .collect();
    for (i, &c) in a.order().iter().enumerate() {
        let support: u64 = vote_pos
            .iter()
            .filter(|(pos, _)| a.order()[i + 1..].iter().all(|s| pos[c.0] < pos[s.0]))
            .map(|(_, w)| w)
            .sum();
        if 2 * support > n {
            return Ok(c);
        }
    }
    unreachable!("the last agenda candidate is supported by every voter")
}

/// Pairwise knock-out along the agenda; the incumbent survives a round only
/// by strictly beating the challenger, so ties advance the challenger.
pub fn amendment_winner(e: &Election, a: &Agenda) -> Result<CandidateId> {
    check_agenda(e, a)?;
    let t = e.tally();
    let mut order = a.order().iter().copied();
    let first = order.next().expect("non-empty agenda");
    Ok(order.fold(first, |inc, ch| if t.beats(inc, ch) { inc } else { ch }))
}

/// The candidate beating every other candidate, if any.
pub fn condorcet_winner(e: &Election) -> Option<CandidateId> {
    let t = e.tally();
    e.roster()
        .ids()
        .find(|&c| e.roster().ids().all(|x| x == c || t.beats(c, x)))
}

/// Candidates beaten by nobody.
pub fn weak_condorcet_winners(e: &Election) -> Vec<CandidateId> {
    let t = e.tally();
    e.roster()
        .ids()
        .filter(|&c| e.roster().ids().all(|x| !t.beats(x, c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{election, example1};
    use crate::model::{Roster, Vote};

    const A: CandidateId = CandidateId(0);
    const B: CandidateId = CandidateId(1);
    const D: CandidateId = CandidateId(3);

    fn agenda(xs: &[usize]) -> Agenda {
        Agenda::from_indices(xs).unwrap()
    }

    #[test]
    fn tsmr_example1() {
        let e = example1();
        assert_eq!(tsmr_winner(&e, &agenda(&[0, 1, 2, 3])).unwrap(), A);
        assert_eq!(tsmr_winner(&e, &agenda(&[3, 2, 1, 0])).unwrap(), B);
    }

    #[test]
    fn single_candidate() {
        let e = election(1, &[&[0]]);
        for r in Rule::ALL {
            assert_eq!(r.winner(&e, &agenda(&[0])).unwrap(), A);
        }
    }

    #[test]
    fn successive_example1() {
        assert_eq!(
            successive_winner(&example1(), &agenda(&[0, 1, 2, 3])).unwrap(),
            D
        );
        assert_eq!(
            successive_winner(&election(2, &[&[0, 1]]), &agenda(&[0, 1])).unwrap(),
            A
        );
    }

    #[test]
    fn successive_needs_votes() {
        let e = Election::new(Roster::anonymous(2), vec![]).unwrap();
        assert_eq!(successive_winner(&e, &agenda(&[0, 1])), Err(Error::NoVotes));
        // TSMR and amendment accept n = 0: the empty majority graph leaves every
        // candidate unbeaten.
        assert_eq!(tsmr_winner(&e, &agenda(&[0, 1])).unwrap(), B);
        assert_eq!(amendment_winner(&e, &agenda(&[0, 1])).unwrap(), B);
    }

    #[test]
    fn successive_strict_majority_with_even_n() {
        // a is ranked above b by exactly half of four voters: not a majority.
        let e = election(2, &[&[0, 1], &[0, 1], &[1, 0], &[1, 0]]);
        assert_eq!(successive_winner(&e, &agenda(&[0, 1])).unwrap(), B);
    }

    #[test]
    fn amendment_example1_and_ties() {
        assert_eq!(
            amendment_winner(&example1(), &agenda(&[0, 1, 2, 3])).unwrap(),
            D
        );
        let tie = election(2, &[&[0, 1], &[1, 0]]);
        assert_eq!(amendment_winner(&tie, &agenda(&[0, 1])).unwrap(), B);
    }

    #[test]
    fn condorcet_diagnostics() {
        let e = example1();
        assert_eq!(condorcet_winner(&e), None);
        assert!(weak_condorcet_winners(&e).is_empty());

        let e = election(3, &[&[0, 1, 2]]);
        assert_eq!(condorcet_winner(&e), Some(A));
        assert_eq!(weak_condorcet_winners(&e), vec![A]);

        let e = election(2, &[&[0, 1], &[1, 0]]);
        assert_eq!(condorcet_winner(&e), None);
        assert_eq!(weak_condorcet_winners(&e), vec![A, B]);
    }

    #[test]
    fn multiplicity_counts_as_copies() {
        let roster = Roster::anonymous(2);
        let e = Election::new(
            roster,
            vec![
                Vote::from_indices(&[1, 0], 2).unwrap(),
                Vote::from_indices(&[0, 1], 1).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(condorcet_winner(&e), Some(B));
    }

    #[test]
    fn rule_names_round_trip() {
        for r in Rule::ALL {
            assert_eq!(r.as_str().parse::<Rule>().unwrap(), r);
        }
        assert!("copeland".parse::<Rule>().is_err());
    }
}
