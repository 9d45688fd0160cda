//! Possible and necessary winners when votes and the agenda are only
//! partially known.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Agenda, CandidateId, Election, PairwiseTally, Roster, Vote};
use crate::order::PartialOrder;
use crate::rules::{tsmr_winner, tsmr_winner_by};

/// Default limit on the completions [`possible_winner_exact`] may visit.
pub const DEFAULT_COMPLETION_BUDGET: u128 = 1_000_000;

/// A partial agenda is a strict partial order over the roster.
pub type PartialAgenda = PartialOrder;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialVote {
    pub order: PartialOrder,
    pub multiplicity: u32,
}

impl PartialVote {
    pub fn new(order: PartialOrder, multiplicity: u32) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::invalid("vote multiplicity must be at least 1"));
        }
        Ok(PartialVote {
            order,
            multiplicity,
        })
    }

    pub fn from_vote(v: &Vote) -> Self {
        PartialVote {
            order: PartialOrder::from_ranking(v.ranking()).expect("votes are permutations"),
            multiplicity: v.multiplicity(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialElection {
    roster: Roster,
    votes: Vec<PartialVote>,
}

impl PartialElection {
    pub fn new(roster: Roster, votes: Vec<PartialVote>) -> Result<Self> {
        if let Some(v) = votes
            .iter()
            .find(|v| v.order.candidate_count() != roster.len())
        {
            return Err(Error::invalid(format!(
                "partial vote over {} candidates, roster has {}",
                v.order.candidate_count(),
                roster.len()
            )));
        }
        Ok(PartialElection { roster, votes })
    }

    pub fn from_election(e: &Election) -> Self {
        PartialElection {
            roster: e.roster().clone(),
            votes: e.votes().iter().map(PartialVote::from_vote).collect(),
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn votes(&self) -> &[PartialVote] {
        &self.votes
    }

    pub fn candidate_count(&self) -> usize {
        self.roster.len()
    }

    /// The election if every vote is total.
    pub fn as_election(&self) -> Option<Election> {
        let votes = self
            .votes
            .iter()
            .map(|v| Vote::new(v.order.as_ranking()?, v.multiplicity).ok())
            .collect::<Option<Vec<_>>>()?;
        Election::new(self.roster.clone(), votes).ok()
    }
}

/// Completed votes, one entry per partial vote entry and chosen extension,
/// together with a completed agenda.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub votes: Vec<Vote>,
    pub agenda: Agenda,
}

impl Completion {
    pub fn winner(&self, roster: &Roster) -> Result<CandidateId> {
        let e = Election::new(roster.clone(), self.votes.clone())?;
        tsmr_winner(&e, &self.agenda)
    }

    /// Whether this completes `pe` and `pa`.
    pub fn extends(&self, pe: &PartialElection, pa: &PartialAgenda) -> bool {
        if !pa.is_extended_by(self.agenda.order()) {
            return false;
        }
        let mut left: Vec<u32> = pe.votes.iter().map(|v| v.multiplicity).collect();
        let mut entry = 0;
        for v in &self.votes {
            while entry < left.len() && left[entry] == 0 {
                entry += 1;
            }
            if entry == left.len()
                || v.multiplicity() > left[entry]
                || !pe.votes[entry].order.is_extended_by(v.ranking())
            {
                return false;
            }
            left[entry] -= v.multiplicity();
        }
        left.iter().all(|&k| k == 0)
    }
}

fn check(pe: &PartialElection, pa: &PartialAgenda, p: CandidateId) -> Result<()> {
    let m = pe.candidate_count();
    if p.0 >= m {
        return Err(Error::invalid(format!(
            "candidate {p} is not in the roster"
        )));
    }
    if pa.candidate_count() != m {
        return Err(Error::invalid("partial agenda does not match the roster"));
    }
    Ok(())
}

fn complete_each(pe: &PartialElection, f: impl Fn(&PartialOrder) -> Vec<CandidateId>) -> Vec<Vote> {
    pe.votes
        .iter()
        .map(|v| Vote::new(f(&v.order), v.multiplicity).expect("extensions are permutations"))
        .collect()
}

fn tally(m: usize, votes: &[Vote]) -> PairwiseTally {
    let mut t = PairwiseTally::zero(m);
    for v in votes {
        t.add(v.ranking(), u64::from(v.multiplicity()));
    }
    t
}

/// A completion in which `p` does not win, or `None` when `p` wins every
/// completion.
///
/// `p` can fail in two ways. Some `c` may precede and beat it: ranking `c`
/// above `p` wherever a vote leaves the pair open makes that as likely as
/// possible. Otherwise some later `c` is unbeaten by everything before it:
/// placing `c` right after `p` and its own forced predecessors in the agenda,
/// and raising `c` as high as each vote allows, makes that as likely as
/// possible.
pub fn necessary_counterexample(
    pe: &PartialElection,
    pa: &PartialAgenda,
    p: CandidateId,
) -> Result<Option<Completion>> {
    check(pe, pa, p)?;
    let m = pe.candidate_count();
    let others = || (0..m).map(CandidateId).filter(move |&c| c != p);

    for c in others().filter(|&c| !pa.precedes(p, c)) {
        let votes = complete_each(pe, |o| {
            if o.precedes(p, c) {
                o.first_extension()
            } else {
                o.with_pair(c, p).expect("pair is open").first_extension()
            }
        });
        if tally(m, &votes).beats(c, p) {
            let agenda = pa.with_pair(c, p).expect("pair is open").first_extension();
            return Ok(Some(Completion {
                votes,
                agenda: Agenda::new(agenda, m)?,
            }));
        }
    }

    for c in others().filter(|&c| !pa.precedes(c, p)) {
        let order = pa.with_pair(p, c).expect("pair is open");
        let votes = complete_each(pe, |o| o.raised_extension(c));
        let t = tally(m, &votes);
        if order.superiors(c).into_iter().all(|x| !t.beats(x, c)) {
            let agenda = Agenda::new(order.raised_extension(c), m)?;
            return Ok(Some(Completion { votes, agenda }));
        }
    }
    Ok(None)
}

/// Whether `p` wins the TSMR election in every completion of the votes and
/// the agenda.
pub fn necessary_winner(pe: &PartialElection, pa: &PartialAgenda, p: CandidateId) -> Result<bool> {
    Ok(necessary_counterexample(pe, pa, p)?.is_none())
}

/// Number of (vote completion, agenda completion) pairs.
pub fn completion_count(pe: &PartialElection, pa: &PartialAgenda) -> u128 {
    let mut total = pa.count_extensions();
    for v in &pe.votes {
        let per = v.order.count_extensions();
        for _ in 0..v.multiplicity {
            total = total.saturating_mul(per);
        }
    }
    total
}

/// A completion in which `p` wins, searched exhaustively.
///
/// Copies of one vote entry are interchangeable, so they are completed as a
/// multiset. Fails with a cap error when [`completion_count`] exceeds
/// `budget`.
pub fn possible_winner_exact(
    pe: &PartialElection,
    pa: &PartialAgenda,
    p: CandidateId,
    budget: u128,
) -> Result<Option<Completion>> {
    check(pe, pa, p)?;
    let size = completion_count(pe, pa);
    if size > budget {
        return Err(Error::CapExceeded {
            what: "completions",
            size,
            cap: budget,
        });
    }
    let m = pe.candidate_count();
    let agendas = pa.extensions();
    let exts: Vec<Vec<Vec<CandidateId>>> = pe.votes.iter().map(|v| v.order.extensions()).collect();
    // one slot per vote copy: (entry, first copy of the entry?)
    let slots: Vec<usize> = pe
        .votes
        .iter()
        .enumerate()
        .flat_map(|(i, v)| std::iter::repeat_n(i, v.multiplicity as usize))
        .collect();

    let wins = |margin: &[i32]| {
        agendas
            .iter()
            .find(|a| tsmr_winner_by(a, |x, y| margin[x.0 * m + y.0] > 0) == Some(p))
    };
    let finish = |choice: &[usize], agenda: &Vec<CandidateId>| -> Completion {
        let mut votes: Vec<Vote> = Vec::new();
        let mut k = 0;
        while k < slots.len() {
            let entry = slots[k];
            let mut run = 1;
            while k + run < slots.len() && slots[k + run] == entry && choice[k + run] == choice[k] {
                run += 1;
            }
            votes.push(Vote::new(exts[entry][choice[k]].clone(), run as u32).unwrap());
            k += run;
        }
        Completion {
            votes,
            agenda: Agenda::new(agenda.clone(), m).unwrap(),
        }
    };

    if slots.is_empty() {
        let margin = vec![0; m * m];
        return Ok(wins(&margin).map(|a| finish(&[], a)));
    }
    let search = |first: usize| -> Option<Completion> {
        let mut margin = vec![0i32; m * m];
        let mut choice = vec![0usize; slots.len()];
        choice[0] = first;
        apply(&mut margin, m, &exts[slots[0]][first], 1);
        let mut found = None;
        let _ = descend(
            1,
            &slots,
            &exts,
            &mut choice,
            &mut margin,
            m,
            &mut |choice, margin| match wins(margin) {
                Some(a) => {
                    found = Some(finish(choice, a));
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            },
        );
        found
    };
    Ok((0..exts[slots[0]].len())
        .into_par_iter()
        .find_map_first(search))
}

fn apply(margin: &mut [i32], m: usize, ranking: &[CandidateId], w: i32) {
    for (i, a) in ranking.iter().enumerate() {
        for b in &ranking[i + 1..] {
            margin[a.0 * m + b.0] += w;
            margin[b.0 * m + a.0] -= w;
        }
    }
}

fn descend<F>(
    k: usize,
    slots: &[usize],
    exts: &[Vec<Vec<CandidateId>>],
    choice: &mut Vec<usize>,
    margin: &mut Vec<i32>,
    m: usize,
    leaf: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize], &[i32]) -> ControlFlow<()>,
{
    if k == slots.len() {
        return leaf(choice, margin);
    }
    let entry = slots[k];
    let start = if slots[k - 1] == entry {
        choice[k - 1]
    } else {
        0
    };
    for x in start..exts[entry].len() {
        choice[k] = x;
        apply(margin, m, &exts[entry][x], 1);
        let r = descend(k + 1, slots, exts, choice, margin, m, leaf);
        apply(margin, m, &exts[entry][x], -1);
        r?;
    }
    ControlFlow::Continue(())
}

/// With a complete agenda ending at `p`, `p` is a possible winner iff it is
/// unbeaten once every vote ranks it as high as its constraints allow.
/// Returns that completion when `p` wins it.
pub fn possible_winner_p_last(
    pe: &PartialElection,
    pa: &PartialAgenda,
    p: CandidateId,
) -> Result<Option<Completion>> {
    check(pe, pa, p)?;
    let order = pa
        .as_ranking()
        .ok_or_else(|| Error::precondition("complete agenda"))?;
    if order.last() != Some(&p) {
        return Err(Error::precondition("p last"));
    }
    let m = pe.candidate_count();
    let votes = complete_each(pe, |o| o.raised_extension(p));
    let t = tally(m, &votes);
    let unbeaten = (0..m).map(CandidateId).all(|c| !t.beats(c, p));
    Ok(unbeaten.then(|| Completion {
        votes,
        agenda: Agenda::new(order, m).expect("total order"),
    }))
}

/// Outcome of enumerating every completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompletionCensus {
    pub possible: bool,
    pub necessary: bool,
}

/// Visits every completion of votes and agenda, copy by copy, without any
/// shortcuts. Exponential; for cross-checking only.
pub fn completion_census(
    pe: &PartialElection,
    pa: &PartialAgenda,
    p: CandidateId,
    cap: u128,
) -> Result<CompletionCensus> {
    check(pe, pa, p)?;
    let size = completion_count(pe, pa);
    if size > cap {
        return Err(Error::CapExceeded {
            what: "completions",
            size,
            cap,
        });
    }
    let m = pe.candidate_count();
    let copies: Vec<Vec<Vec<CandidateId>>> = pe
        .votes
        .iter()
        .flat_map(|v| std::iter::repeat_n(v.order.extensions(), v.multiplicity as usize))
        .collect();
    let agendas = pa.extensions();
    let mut census = CompletionCensus {
        possible: false,
        necessary: true,
    };
    let mut pick = vec![0usize; copies.len()];
    loop {
        let votes: Vec<Vote> = copies
            .iter()
            .zip(&pick)
            .map(|(ext, &i)| Vote::single(ext[i].clone()))
            .collect();
        let e = Election::new(pe.roster.clone(), votes)?;
        for a in &agendas {
            if tsmr_winner(&e, &Agenda::new(a.clone(), m)?)? == p {
                census.possible = true;
            } else {
                census.necessary = false;
            }
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == copies.len() {
                return Ok(census);
            }
            pick[i] += 1;
            if pick[i] < copies[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}
