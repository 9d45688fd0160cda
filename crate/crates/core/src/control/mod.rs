//! Multimode election control: adding or deleting votes and candidates to
//! make the distinguished candidate win (constructive) or lose
//! (destructive).

mod exact;
mod poly;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Agenda, CandidateId, Election, Restriction, Roster, Vote};
use crate::rules::tsmr_winner;

pub use exact::{exact_search_size, solve_exact, solve_exact_with_cap, EXACT_CAP};
pub use poly::{
    ccac_immunity_check, ccdc_deletions, ccdc_greedy, dcac, dcdc, destructive_votes_p_last,
    IMMUNITY_MAX_D,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Constructive,
    Destructive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Constructive => "constructive",
            Mode::Destructive => "destructive",
        }
    }

    /// Whether `winner` meets the goal for distinguished candidate `p`.
    pub fn achieved(self, winner: CandidateId, p: CandidateId) -> bool {
        match self {
            Mode::Constructive => winner == p,
            Mode::Destructive => winner != p,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constructive" => Ok(Mode::Constructive),
            "destructive" => Ok(Mode::Destructive),
            _ => Err(Error::invalid(format!("unknown mode {s:?}"))),
        }
    }
}

/// Upper bounds on added votes, deleted votes, added candidates and deleted
/// candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Budgets {
    pub av: usize,
    pub dv: usize,
    pub ac: usize,
    pub dc: usize,
}

/// A multimode control instance. Ids cover registered and unregistered
/// candidates alike; every vote ranks all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlInstance {
    pub roster: Roster,
    /// Unregistered candidates, ascending.
    pub unregistered_candidates: Vec<CandidateId>,
    pub votes: Vec<Vote>,
    pub unregistered_votes: Vec<Vote>,
    pub distinguished: CandidateId,
    pub agenda: Agenda,
    pub budgets: Budgets,
    pub mode: Mode,
}

/// Chosen copies: `(vote entry index, number of copies)`, entries ascending,
/// counts positive.
pub type VoteSelection = Vec<(usize, u32)>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ControlSolution {
    pub deleted_votes: VoteSelection,
    pub added_votes: VoteSelection,
    pub deleted_candidates: Vec<CandidateId>,
    pub added_candidates: Vec<CandidateId>,
}

impl ControlSolution {
    pub fn is_empty(&self) -> bool {
        self.deleted_votes.is_empty()
            && self.added_votes.is_empty()
            && self.deleted_candidates.is_empty()
            && self.added_candidates.is_empty()
    }

    /// Total number of modifications.
    pub fn size(&self) -> usize {
        let copies = |s: &VoteSelection| s.iter().map(|&(_, k)| k as usize).sum::<usize>();
        copies(&self.deleted_votes)
            + copies(&self.added_votes)
            + self.deleted_candidates.len()
            + self.added_candidates.len()
    }
}

fn total_copies(votes: &[Vote]) -> usize {
    votes.iter().map(|v| v.multiplicity() as usize).sum()
}

fn copies(sel: &VoteSelection) -> usize {
    sel.iter().map(|&(_, k)| k as usize).sum()
}

impl ControlInstance {
    pub fn candidate_count(&self) -> usize {
        self.roster.len()
    }

    pub fn is_registered(&self, c: CandidateId) -> bool {
        self.unregistered_candidates.binary_search(&c).is_err()
    }

    pub fn registered_candidates(&self) -> Vec<CandidateId> {
        self.roster
            .ids()
            .filter(|&c| self.is_registered(c))
            .collect()
    }

    /// Checks the structural invariants, including the budget bounds.
    pub fn validate(&self) -> Result<()> {
        let m = self.roster.len();
        if self.agenda.len() != m {
            return Err(Error::invalid("agenda does not cover every candidate"));
        }
        if self.distinguished.0 >= m {
            return Err(Error::invalid(
                "distinguished candidate is not in the roster",
            ));
        }
        if !self.is_registered(self.distinguished) {
            return Err(Error::invalid("distinguished candidate must be registered"));
        }
        if self
            .unregistered_candidates
            .windows(2)
            .any(|w| w[0] >= w[1])
            || self.unregistered_candidates.iter().any(|c| c.0 >= m)
        {
            return Err(Error::invalid("malformed unregistered candidate set"));
        }
        for v in self.votes.iter().chain(&self.unregistered_votes) {
            crate::model::check_permutation(v.ranking(), m)?;
        }
        let b = self.budgets;
        let checks = [
            ("av", b.av, total_copies(&self.unregistered_votes)),
            ("dv", b.dv, total_copies(&self.votes)),
            ("ac", b.ac, self.unregistered_candidates.len()),
            ("dc", b.dc, m - self.unregistered_candidates.len()),
        ];
        for (name, k, bound) in checks {
            if k > bound {
                return Err(Error::invalid(format!(
                    "budget {name}={k} exceeds the available {bound}"
                )));
            }
        }
        Ok(())
    }

    /// The election over registered candidates and votes, with its agenda.
    pub fn registered_election(&self) -> Result<(Restriction, Agenda)> {
        self.modified(&ControlSolution::default())
    }

    /// The election after applying `sol`, restricted to the surviving
    /// candidates, and the correspondingly restricted agenda.
    pub fn modified(&self, sol: &ControlSolution) -> Result<(Restriction, Agenda)> {
        let keep: Vec<CandidateId> = self
            .roster
            .ids()
            .filter(|&c| {
                if self.is_registered(c) {
                    !sol.deleted_candidates.contains(&c)
                } else {
                    sol.added_candidates.contains(&c)
                }
            })
            .collect();
        let mut votes = Vec::new();
        let mut deleted = vec![0u32; self.votes.len()];
        for &(i, k) in &sol.deleted_votes {
            *deleted
                .get_mut(i)
                .ok_or_else(|| Error::invalid("deleted vote index out of range"))? += k;
        }
        for (v, &d) in self.votes.iter().zip(&deleted) {
            if d > v.multiplicity() {
                return Err(Error::invalid("more copies deleted than registered"));
            }
            if d < v.multiplicity() {
                votes.push(v.with_multiplicity(v.multiplicity() - d)?);
            }
        }
        for &(i, k) in &sol.added_votes {
            let w = self
                .unregistered_votes
                .get(i)
                .ok_or_else(|| Error::invalid("added vote index out of range"))?;
            if k > w.multiplicity() {
                return Err(Error::invalid("more copies added than available"));
            }
            votes.push(w.with_multiplicity(k)?);
        }
        let full = Election::new(self.roster.clone(), votes)?;
        let restricted = full.restrict(&keep)?;
        let agenda = self.agenda.restrict(&keep)?;
        Ok((restricted, agenda))
    }

    /// TSMR winner after applying `sol`, as an id of this instance.
    pub fn winner_after(&self, sol: &ControlSolution) -> Result<CandidateId> {
        let (r, a) = self.modified(sol)?;
        Ok(r.original(tsmr_winner(&r.election, &a)?))
    }

    /// Whether `sol` respects every budget and achieves the goal.
    pub fn verify(&self, sol: &ControlSolution) -> Result<bool> {
        let b = self.budgets;
        let legal = copies(&sol.deleted_votes) <= b.dv
            && copies(&sol.added_votes) <= b.av
            && sol.deleted_candidates.len() <= b.dc
            && sol.added_candidates.len() <= b.ac
            && !sol.deleted_candidates.contains(&self.distinguished)
            && sol
                .deleted_candidates
                .iter()
                .all(|&c| self.is_registered(c))
            && sol.added_candidates.iter().all(|&c| !self.is_registered(c));
        if !legal {
            return Ok(false);
        }
        let w = self.winner_after(sol)?;
        Ok(self.mode.achieved(w, self.distinguished))
    }
}

/// The eight single-operation special cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Ccav,
    Ccdv,
    Ccac,
    Ccdc,
    Dcav,
    Dcdv,
    Dcac,
    Dcdc,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Ccav,
        Variant::Ccdv,
        Variant::Ccac,
        Variant::Ccdc,
        Variant::Dcav,
        Variant::Dcdv,
        Variant::Dcac,
        Variant::Dcdc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Ccav => "ccav",
            Variant::Ccdv => "ccdv",
            Variant::Ccac => "ccac",
            Variant::Ccdc => "ccdc",
            Variant::Dcav => "dcav",
            Variant::Dcdv => "dcdv",
            Variant::Dcac => "dcac",
            Variant::Dcdc => "dcdc",
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Variant::Ccav | Variant::Ccdv | Variant::Ccac | Variant::Ccdc => Mode::Constructive,
            _ => Mode::Destructive,
        }
    }

    /// The budget pattern with `k` on this variant's operation and zero
    /// elsewhere.
    pub fn budgets(self, k: usize) -> Budgets {
        let mut b = Budgets::default();
        match self {
            Variant::Ccav | Variant::Dcav => b.av = k,
            Variant::Ccdv | Variant::Dcdv => b.dv = k,
            Variant::Ccac | Variant::Dcac => b.ac = k,
            Variant::Ccdc | Variant::Dcdc => b.dc = k,
        }
        b
    }

    /// This variant's budget within `b`.
    pub fn budget(self, b: Budgets) -> usize {
        match self {
            Variant::Ccav | Variant::Dcav => b.av,
            Variant::Ccdv | Variant::Dcdv => b.dv,
            Variant::Ccac | Variant::Dcac => b.ac,
            Variant::Ccdc | Variant::Dcdc => b.dc,
        }
    }

    /// Whether the instance's mode and budgets follow this variant's pattern.
    pub fn matches(self, inst: &ControlInstance) -> bool {
        inst.mode == self.mode() && inst.budgets == self.budgets(self.budget(inst.budgets))
    }

    /// Rewrites mode and budgets to this variant, keeping the instance's own
    /// budget for the operation unless `k` is given.
    pub fn configure(self, inst: &mut ControlInstance, k: Option<usize>) {
        let k = k.unwrap_or_else(|| self.budget(inst.budgets));
        inst.mode = self.mode();
        inst.budgets = self.budgets(k);
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown control variant {s:?}")))
    }
}

/// Which algorithm produced an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Polynomial,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Polynomial => "polynomial",
        }
    }
}

/// Solves `inst` as `variant`, using a polynomial algorithm where one
/// applies and the exact solver otherwise.
pub fn solve(
    inst: &ControlInstance,
    variant: Variant,
) -> Result<(Option<ControlSolution>, Method)> {
    solve_with_cap(inst, variant, EXACT_CAP)
}

/// [`solve`] with the exact solver limited to `cap` instead of [`EXACT_CAP`].
pub fn solve_with_cap(
    inst: &ControlInstance,
    variant: Variant,
    cap: u128,
) -> Result<(Option<ControlSolution>, Method)> {
    if !variant.matches(inst) {
        return Err(Error::invalid(format!(
            "instance budgets or mode do not fit variant {variant}"
        )));
    }
    inst.validate()?;
    let poly = match variant {
        Variant::Ccdc | Variant::Dcdc => {
            let (r, a) = inst.registered_election()?;
            let p = r.renamed(inst.distinguished).expect("p is registered");
            let sol = if variant == Variant::Ccdc {
                ccdc_greedy(&r.election, p, &a, inst.budgets.dc)?
            } else {
                dcdc(&r.election, p, &a, inst.budgets.dc)?
            };
            Some(sol.map(|s| {
                ControlSolution {
                    deleted_candidates: s
                        .deleted_candidates
                        .iter()
                        .map(|&c| r.original(c))
                        .collect(),
                    ..ControlSolution::default()
                }
            }))
        }
        Variant::Dcac => Some(dcac(inst)?),
        Variant::Dcav | Variant::Dcdv if p_last_among_registered(inst) => {
            Some(destructive_votes_p_last(inst)?)
        }
        _ => None,
    };
    match poly {
        Some(sol) => Ok((sol, Method::Polynomial)),
        None => Ok((solve_exact_with_cap(inst, cap)?, Method::Exact)),
    }
}

pub(crate) fn p_last_among_registered(inst: &ControlInstance) -> bool {
    inst.agenda
        .filtered(|c| inst.is_registered(c))
        .last()
        .is_some_and(|&c| c == inst.distinguished)
}
