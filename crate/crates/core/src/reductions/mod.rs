//! Red-Blue Dominating Set instances and their compilation into control and
//! possible-winner instances.
//!
//! An RBDS instance asks for `kappa` blue vertices whose neighbourhoods
//! cover every red vertex. Every [`ReductionId`] names one construction that
//! turns such an instance into an election problem with the same yes/no
//! answer, and maps dominating sets to solutions of the election problem.

mod build;
mod verify;

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::control::{ControlInstance, ControlSolution, Variant};
use crate::error::{Error, Result};
use crate::model::{valid_label, CandidateId, Election, MajorityGraph, Roster, Vote};
use crate::partial::{Completion, PartialAgenda, PartialElection};

pub use verify::{verify_reduction, Counterexample, VerifyReport};

/// Largest blue side [`rbds_brute`] accepts.
pub const RBDS_MAX_BLUE: usize = 20;

/// A bipartite graph between red and blue vertices with a budget `kappa`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RbdsInstance {
    red: Vec<String>,
    blue: Vec<String>,
    /// `(blue, red)` index pairs, sorted and unique.
    edges: Vec<(usize, usize)>,
    kappa: usize,
}

impl RbdsInstance {
    pub fn new(
        red: Vec<String>,
        blue: Vec<String>,
        mut edges: Vec<(usize, usize)>,
        kappa: usize,
    ) -> Result<Self> {
        let all: Vec<&String> = red.iter().chain(&blue).collect();
        for (i, l) in all.iter().enumerate() {
            if !valid_label(l) {
                return Err(Error::invalid(format!("invalid vertex label {l:?}")));
            }
            if all[..i].contains(l) {
                return Err(Error::invalid(format!("duplicate vertex label {l:?}")));
            }
        }
        if let Some(&(b, r)) = edges
            .iter()
            .find(|&&(b, r)| b >= blue.len() || r >= red.len())
        {
            return Err(Error::invalid(format!("edge ({b}, {r}) leaves the graph")));
        }
        if kappa == 0 || kappa > blue.len() {
            return Err(Error::invalid(format!(
                "kappa must lie in 1..={}, got {kappa}",
                blue.len()
            )));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(RbdsInstance {
            red,
            blue,
            edges,
            kappa,
        })
    }

    /// Vertices labelled `r1.. ` and `b1..`.
    pub fn anonymous(
        n_red: usize,
        n_blue: usize,
        edges: Vec<(usize, usize)>,
        kappa: usize,
    ) -> Result<Self> {
        RbdsInstance::new(
            (1..=n_red).map(|i| format!("r{i}")).collect(),
            (1..=n_blue).map(|i| format!("b{i}")).collect(),
            edges,
            kappa,
        )
    }

    pub fn red(&self) -> &[String] {
        &self.red
    }

    pub fn blue(&self) -> &[String] {
        &self.blue
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Red neighbours of blue vertex `b`, ascending.
    pub fn neighbors(&self, b: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(x, _)| x == b)
            .map(|&(_, r)| r)
            .collect()
    }

    pub fn red_degree(&self, r: usize) -> usize {
        self.edges.iter().filter(|&&(_, x)| x == r).count()
    }

    /// The common degree of all red vertices, if they share one.
    pub fn red_regularity(&self) -> Option<usize> {
        let degrees: Vec<usize> = (0..self.red.len()).map(|r| self.red_degree(r)).collect();
        match degrees.first() {
            Some(&d) if degrees.iter().all(|&x| x == d) => Some(d),
            None => Some(0),
            _ => None,
        }
    }

    pub fn max_red_degree(&self) -> usize {
        (0..self.red.len())
            .map(|r| self.red_degree(r))
            .max()
            .unwrap_or(0)
    }

    pub fn has_isolated_vertex(&self) -> bool {
        (0..self.red.len()).any(|r| self.red_degree(r) == 0)
            || (0..self.blue.len()).any(|b| self.neighbors(b).is_empty())
    }

    /// Whether the blue vertices in `set` cover every red vertex.
    pub fn dominates(&self, set: &[usize]) -> bool {
        let mut covered = vec![false; self.red.len()];
        for &(b, r) in &self.edges {
            if set.contains(&b) {
                covered[r] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }
}

/// The lexicographically first dominating set of exactly `kappa` blue
/// vertices.
pub fn rbds_brute(r: &RbdsInstance) -> Result<Option<Vec<usize>>> {
    if r.blue.len() > RBDS_MAX_BLUE {
        return Err(Error::CapExceeded {
            what: "blue vertices",
            size: r.blue.len() as u128,
            cap: RBDS_MAX_BLUE as u128,
        });
    }
    Ok((0..r.blue.len())
        .combinations(r.kappa)
        .find(|set| r.dominates(set)))
}

/// Pads every red vertex to the maximum red degree with fresh blue vertices
/// adjacent to it alone. The answer does not change: a fresh blue vertex in
/// a solution can be swapped for any original neighbour of its red vertex.
pub fn normalize_rbds(r: &RbdsInstance) -> Result<RbdsInstance> {
    if let Some(x) = (0..r.red.len()).find(|&x| r.red_degree(x) == 0) {
        return Err(Error::invalid(format!(
            "unsatisfiable red vertex {}",
            r.red[x]
        )));
    }
    let target = r.max_red_degree();
    let mut blue = r.blue.clone();
    let mut edges = r.edges.clone();
    for x in 0..r.red.len() {
        for j in r.red_degree(x)..target {
            let mut label = format!("{}_{}", r.red[x], j + 1);
            while blue.contains(&label) || r.red.contains(&label) {
                label.push('_');
            }
            edges.push((blue.len(), x));
            blue.push(label);
        }
    }
    RbdsInstance::new(r.red.clone(), blue, edges, r.kappa)
}

/// An election whose majority graph is exactly `arcs`.
///
/// Each arc `(a, b)` contributes the ballots `a, b, rest ascending` and
/// `rest descending, a, b`: together they rank `a` above `b` twice and split
/// every other pair evenly.
pub fn mcgarvey(roster: &Roster, arcs: &[(CandidateId, CandidateId)]) -> Result<Election> {
    let m = roster.len();
    let g = MajorityGraph::from_arcs(m, arcs)?;
    let mut votes = Vec::with_capacity(2 * arcs.len());
    for (a, b) in g.arcs() {
        let rest: Vec<CandidateId> = roster.ids().filter(|&c| c != a && c != b).collect();
        let mut first = vec![a, b];
        first.extend(&rest);
        let mut second: Vec<CandidateId> = rest.iter().rev().copied().collect();
        second.extend([a, b]);
        votes.push(Vote::single(first));
        votes.push(Vote::single(second));
    }
    Election::new(roster.clone(), votes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionId {
    CcavFirst,
    CcavLast,
    CcdvFirstK,
    CcdvFirstDual,
    CcdvLastK,
    CcdvLastDual,
    CcacFirst,
    DcavNonlast,
    DcdvK,
    DcdvDual,
    PwFirst,
    PwPenultimate,
}

/// What a reduction produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Control(Variant),
    PossibleWinner,
}

impl ReductionId {
    pub const ALL: [ReductionId; 12] = [
        ReductionId::CcavFirst,
        ReductionId::CcavLast,
        ReductionId::CcdvFirstK,
        ReductionId::CcdvFirstDual,
        ReductionId::CcdvLastK,
        ReductionId::CcdvLastDual,
        ReductionId::CcacFirst,
        ReductionId::DcavNonlast,
        ReductionId::DcdvK,
        ReductionId::DcdvDual,
        ReductionId::PwFirst,
        ReductionId::PwPenultimate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReductionId::CcavFirst => "ccav-first",
            ReductionId::CcavLast => "ccav-last",
            ReductionId::CcdvFirstK => "ccdv-first-k",
            ReductionId::CcdvFirstDual => "ccdv-first-dual",
            ReductionId::CcdvLastK => "ccdv-last-k",
            ReductionId::CcdvLastDual => "ccdv-last-dual",
            ReductionId::CcacFirst => "ccac-first",
            ReductionId::DcavNonlast => "dcav-nonlast",
            ReductionId::DcdvK => "dcdv-k",
            ReductionId::DcdvDual => "dcdv-dual",
            ReductionId::PwFirst => "pw-first",
            ReductionId::PwPenultimate => "pw-penultimate",
        }
    }

    pub fn target(self) -> Target {
        use ReductionId::*;
        match self {
            CcavFirst | CcavLast => Target::Control(Variant::Ccav),
            CcdvFirstK | CcdvFirstDual | CcdvLastK | CcdvLastDual => Target::Control(Variant::Ccdv),
            CcacFirst => Target::Control(Variant::Ccac),
            DcavNonlast => Target::Control(Variant::Dcav),
            DcdvK | DcdvDual => Target::Control(Variant::Dcdv),
            PwFirst | PwPenultimate => Target::PossibleWinner,
        }
    }

    /// Whether the construction needs `kappa >= 4`.
    pub fn needs_large_kappa(self) -> bool {
        matches!(
            self,
            ReductionId::CcdvFirstK | ReductionId::CcdvLastK | ReductionId::DcdvK
        )
    }

    /// Checks the structural assumptions the construction relies on.
    pub fn check_preconditions(self, r: &RbdsInstance) -> Result<()> {
        use ReductionId::*;
        let no_isolated = || {
            if r.has_isolated_vertex() {
                Err(Error::precondition("no isolated vertices"))
            } else {
                Ok(())
            }
        };
        let regular = || match r.red_regularity() {
            Some(_) => Ok(()),
            None => Err(Error::precondition(
                "all red vertices must have the same degree (normalize first)",
            )),
        };
        let regular_positive = || match r.red_regularity() {
            Some(l) if l > 0 => Ok(()),
            _ => Err(Error::precondition(
                "all red vertices must have the same positive degree (normalize first)",
            )),
        };
        match self {
            CcdvFirstK | CcdvLastK | DcdvK => {
                if r.kappa < 4 {
                    return Err(Error::precondition("kappa >= 4"));
                }
                no_isolated()?;
                regular()
            }
            CcdvFirstDual => regular(),
            // q must strictly beat every red candidate whatever is deleted,
            // which fails for kappa = 1 (the counts can tie at one apiece)
            DcdvDual if r.kappa < 2 => Err(Error::precondition("kappa >= 2")),
            PwFirst => {
                no_isolated()?;
                regular()
            }
            PwPenultimate => regular_positive(),
            CcavFirst | CcavLast | CcdvLastDual | CcacFirst | DcavNonlast | DcdvDual => Ok(()),
        }
    }
}

impl fmt::Display for ReductionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReductionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReductionId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown reduction {s:?}")))
    }
}

/// The instance produced by a reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduced {
    Control(ControlInstance),
    Possible {
        election: PartialElection,
        agenda: PartialAgenda,
        distinguished: CandidateId,
    },
}

/// How a dominating set `B'` becomes a solution of the reduced instance.
#[derive(Clone, Debug, PartialEq, Eq)]
enum CertificateRule {
    /// Add the unregistered vote of every blue vertex in `B'`.
    AddVotes,
    /// Delete the registered vote of every blue vertex in `B'`.
    DeleteChosen,
    /// Delete the registered vote of every blue vertex outside `B'`.
    DeleteComplement,
    /// Add the candidate of every blue vertex in `B'`.
    AddCandidates,
    /// Complete the per-blue partial votes by membership in `B'`; the first
    /// ranking applies to members, the second to everybody else.
    Complete(Vec<[Vec<CandidateId>; 2]>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub which: ReductionId,
    pub instance: Reduced,
    /// Vote entry (registered or unregistered, depending on the rule) or
    /// candidate standing for each blue vertex.
    blue_items: Vec<usize>,
    rule: CertificateRule,
}

/// A solution of a reduced instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Control(ControlSolution),
    Completion(Completion),
}

impl ReductionOutput {
    /// The image of the blue set `chosen` under the construction's
    /// correspondence.
    pub fn certificate(&self, chosen: &[usize]) -> Certificate {
        let pick = |inside: bool| -> Vec<(usize, u32)> {
            let mut sel: Vec<(usize, u32)> = (0..self.blue_items.len())
                .filter(|b| chosen.contains(b) == inside)
                .map(|b| (self.blue_items[b], 1))
                .collect();
            sel.sort_unstable();
            sel
        };
        let mut sol = ControlSolution::default();
        match &self.rule {
            CertificateRule::AddVotes => sol.added_votes = pick(true),
            CertificateRule::DeleteChosen => sol.deleted_votes = pick(true),
            CertificateRule::DeleteComplement => sol.deleted_votes = pick(false),
            CertificateRule::AddCandidates => {
                sol.added_candidates = pick(true)
                    .into_iter()
                    .map(|(c, _)| CandidateId(c))
                    .collect()
            }
            CertificateRule::Complete(options) => {
                let Reduced::Possible {
                    election, agenda, ..
                } = &self.instance
                else {
                    unreachable!("completion certificates belong to partial elections")
                };
                let votes = election
                    .votes()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let ranking = match self.blue_items.iter().position(|&e| e == i) {
                            Some(b) => options[b][usize::from(!chosen.contains(&b))].clone(),
                            None => v.order.as_ranking().expect("fixed votes are complete"),
                        };
                        Vote::new(ranking, v.multiplicity).expect("positive")
                    })
                    .collect();
                let agenda = crate::model::Agenda::new(
                    agenda.as_ranking().expect("agenda is complete"),
                    agenda.candidate_count(),
                )
                .expect("total order");
                return Certificate::Completion(Completion { votes, agenda });
            }
        }
        Certificate::Control(sol)
    }

    /// Whether `cert` solves the reduced instance.
    pub fn check_certificate(&self, cert: &Certificate) -> Result<bool> {
        match (&self.instance, cert) {
            (Reduced::Control(inst), Certificate::Control(sol)) => inst.verify(sol),
            (
                Reduced::Possible {
                    election,
                    agenda,
                    distinguished,
                },
                Certificate::Completion(c),
            ) => Ok(c.extends(election, agenda) && c.winner(election.roster())? == *distinguished),
            _ => Ok(false),
        }
    }
}

/// Compiles `r` with the construction `which`.
pub fn reduce(r: &RbdsInstance, which: ReductionId) -> Result<ReductionOutput> {
    which.check_preconditions(r)?;
    Ok(build::build(r, which))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> RbdsInstance {
        RbdsInstance::anonymous(3, 2, vec![(1, 0), (1, 1), (1, 2)], 1).unwrap()
    }

    #[test]
    fn brute_force_cases() {
        assert_eq!(rbds_brute(&star()).unwrap(), Some(vec![1]));
        let r = RbdsInstance::anonymous(1, 1, vec![], 1).unwrap();
        assert_eq!(rbds_brute(&r).unwrap(), None);
        let r = RbdsInstance::anonymous(4, 4, (0..4).map(|i| (i, i)).collect(), 4).unwrap();
        assert_eq!(rbds_brute(&r).unwrap(), Some(vec![0, 1, 2, 3]));
        let r = RbdsInstance::anonymous(1, 21, vec![], 1).unwrap();
        assert!(rbds_brute(&r).unwrap_err().is_cap());
    }

    #[test]
    fn normalization() {
        let r = RbdsInstance::anonymous(2, 2, vec![(0, 0), (0, 1), (1, 1)], 1).unwrap();
        let n = normalize_rbds(&r).unwrap();
        assert_eq!(n.blue().len(), 3);
        assert_eq!(n.red_regularity(), Some(2));
        assert_eq!(n.neighbors(2), vec![0]);

        let regular = RbdsInstance::anonymous(2, 2, vec![(0, 0), (1, 1)], 2).unwrap();
        assert_eq!(normalize_rbds(&regular).unwrap(), regular);

        let isolated = RbdsInstance::anonymous(2, 1, vec![(0, 0)], 1).unwrap();
        assert_eq!(
            normalize_rbds(&isolated).unwrap_err().to_string(),
            "unsatisfiable red vertex r2"
        );
    }

    #[test]
    fn instance_validation() {
        assert!(RbdsInstance::anonymous(1, 1, vec![], 2).is_err());
        assert!(RbdsInstance::anonymous(1, 1, vec![(1, 0)], 1).is_err());
        assert!(RbdsInstance::new(vec!["x".into()], vec!["x".into()], vec![], 1).is_err());
    }

    #[test]
    fn mcgarvey_examples() {
        let roster = Roster::anonymous(3);
        let arcs = [(CandidateId(0), CandidateId(1))];
        let e = mcgarvey(&roster, &arcs).unwrap();
        let rankings: Vec<&[CandidateId]> = e.votes().iter().map(|v| v.ranking()).collect();
        let ids = |xs: &[usize]| xs.iter().map(|&i| CandidateId(i)).collect::<Vec<_>>();
        assert_eq!(rankings, vec![&ids(&[0, 1, 2])[..], &ids(&[2, 0, 1])[..]]);
        assert_eq!(e.majority_graph().arcs(), arcs.to_vec());

        let empty = mcgarvey(&roster, &[]).unwrap();
        assert_eq!(empty.vote_count(), 0);

        let sym = [
            (CandidateId(0), CandidateId(1)),
            (CandidateId(1), CandidateId(0)),
        ];
        assert!(mcgarvey(&roster, &sym).is_err());
    }

    #[test]
    fn mcgarvey_full_tournament() {
        let roster = Roster::anonymous(4);
        let arcs: Vec<_> = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (CandidateId(a), CandidateId(b))))
            .collect();
        let e = mcgarvey(&roster, &arcs).unwrap();
        assert_eq!(e.vote_count(), 12);
        assert_eq!(e.majority_graph().arcs(), arcs);
    }

    #[test]
    fn reduction_names() {
        for id in ReductionId::ALL {
            assert_eq!(id.as_str().parse::<ReductionId>().unwrap(), id);
        }
        assert!("ccav".parse::<ReductionId>().is_err());
    }

    #[test]
    fn preconditions_reported() {
        let r = star();
        let err = reduce(&r, ReductionId::CcdvFirstK).unwrap_err();
        assert_eq!(err.to_string(), "precondition: kappa >= 4");
        assert!(reduce(&r, ReductionId::PwFirst).is_err());
        assert!(reduce(&r, ReductionId::CcavFirst).is_ok());
    }
}
