//! Sequential parliamentary voting under the two-stage majoritarian rule
//! (TSMR).
//!
//! The crate covers winner determination for TSMR and the successive and
//! amendment rules, the polynomial agenda-control and coalition-manipulation
//! algorithms, exact and polynomial solvers for multimode election control,
//! possible/necessary winners under partial information, and compilers from
//! Red-Blue Dominating Set instances into election instances together with
//! an exhaustive harness that checks each compiler's yes/no equivalence.

pub mod control;
pub mod error;
pub mod format;
pub mod generate;
pub mod model;
pub mod order;
pub mod partial;
pub mod reductions;
pub mod rules;
pub mod strategy;

pub use error::{Error, Result};
pub use model::{
    forward_graph, Agenda, CandidateId, Election, MajorityGraph, PairwiseTally, Restriction,
    Roster, Vote,
};
pub use order::PartialOrder;
pub use rules::{
    amendment_winner, condorcet_winner, successive_winner, tsmr_winner, tsmr_winner_by,
    weak_condorcet_winners, Rule,
};

/// Number of worker threads requested through `TSMR_THREADS`, if set.
/// `0` means sequential execution.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("TSMR_THREADS").ok()?.trim().parse().ok()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::model::{Election, Roster, Vote};

    /// Candidates a, b, c, d with ballots `b d c a`, `c a b d`, `a d b c`.
    pub fn example1() -> Election {
        election_labeled(
            &["a", "b", "c", "d"],
            &[&[1, 3, 2, 0], &[2, 0, 1, 3], &[0, 3, 1, 2]],
        )
    }

    pub fn election(m: usize, votes: &[&[usize]]) -> Election {
        let votes = votes
            .iter()
            .map(|r| Vote::from_indices(r, 1).unwrap())
            .collect();
        Election::new(Roster::anonymous(m), votes).unwrap()
    }

    pub fn election_labeled(labels: &[&str], votes: &[&[usize]]) -> Election {
        let votes = votes
            .iter()
            .map(|r| Vote::from_indices(r, 1).unwrap())
            .collect();
        Election::new(Roster::new(labels.iter().copied()).unwrap(), votes).unwrap()
    }
}
