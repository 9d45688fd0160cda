//! Random instances for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::control::{ControlInstance, Variant};
use crate::model::{Agenda, CandidateId, Election, Roster, Vote};
use crate::order::PartialOrder;
use crate::partial::{PartialElection, PartialVote};

pub fn ranking<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<CandidateId> {
    let mut r: Vec<CandidateId> = (0..m).map(CandidateId).collect();
    r.shuffle(rng);
    r
}

pub fn agenda<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Agenda {
    Agenda::new(ranking(rng, m), m).expect("shuffled roster")
}

/// `n` independent uniformly random votes.
pub fn election<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Election {
    let votes = (0..n).map(|_| Vote::single(ranking(rng, m))).collect();
    Election::new(Roster::anonymous(m), votes).expect("random permutations")
}

/// Random votes drawn from a few distinct rankings with multiplicities.
pub fn election_with_copies<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    entries: usize,
    max_copies: u32,
) -> Election {
    let votes = (0..entries)
        .map(|_| Vote::new(ranking(rng, m), rng.gen_range(1..=max_copies)).expect("positive"))
        .collect();
    Election::new(Roster::anonymous(m), votes).expect("random permutations")
}

/// A partial order obtained by keeping each pair of a random ranking with
/// probability `density`.
pub fn partial_order<R: Rng + ?Sized>(rng: &mut R, m: usize, density: f64) -> PartialOrder {
    let base = ranking(rng, m);
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if rng.gen_bool(density) {
                pairs.push((base[i], base[j]));
            }
        }
    }
    PartialOrder::from_pairs(m, pairs).expect("pairs follow one ranking")
}

pub fn partial_election<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    density: f64,
) -> PartialElection {
    let votes = (0..n)
        .map(|_| PartialVote::new(partial_order(rng, m, density), 1).expect("positive"))
        .collect();
    PartialElection::new(Roster::anonymous(m), votes).expect("matching roster")
}

/// An oriented graph: every pair gets an arc with probability `density`,
/// in a random direction.
pub fn arcs<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    density: f64,
) -> Vec<(CandidateId, CandidateId)> {
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if rng.gen_bool(density) {
                let (a, b) = (CandidateId(a), CandidateId(b));
                out.push(if rng.gen_bool(0.5) { (a, b) } else { (b, a) });
            }
        }
    }
    out
}

/// Shape of a random control instance.
#[derive(Clone, Copy, Debug)]
pub struct ControlShape {
    pub registered: usize,
    pub unregistered: usize,
    pub votes: usize,
    pub unregistered_votes: usize,
}

/// A random instance of `variant` with budget `k`, clamped to what the
/// instance can support. The distinguished candidate is a random registered
/// candidate.
pub fn control_instance<R: Rng + ?Sized>(
    rng: &mut R,
    variant: Variant,
    shape: ControlShape,
    k: usize,
) -> ControlInstance {
    let m = shape.registered + shape.unregistered;
    let votes: Vec<Vote> = (0..shape.votes)
        .map(|_| Vote::single(ranking(rng, m)))
        .collect();
    let unregistered_votes: Vec<Vote> = (0..shape.unregistered_votes)
        .map(|_| Vote::single(ranking(rng, m)))
        .collect();
    let limit = match variant {
        Variant::Ccav | Variant::Dcav => shape.unregistered_votes,
        Variant::Ccdv | Variant::Dcdv => shape.votes,
        Variant::Ccac | Variant::Dcac => shape.unregistered,
        Variant::Ccdc | Variant::Dcdc => shape.registered,
    };
    ControlInstance {
        roster: Roster::anonymous(m),
        unregistered_candidates: (shape.registered..m).map(CandidateId).collect(),
        votes,
        unregistered_votes,
        distinguished: CandidateId(rng.gen_range(0..shape.registered)),
        agenda: agenda(rng, m),
        budgets: variant.budgets(k.min(limit)),
        mode: variant.mode(),
    }
}

/// Moves `c` to the end of the agenda.
pub fn put_last(a: &Agenda, c: CandidateId) -> Agenda {
    let mut order: Vec<CandidateId> = a.order().iter().copied().filter(|&x| x != c).collect();
    order.push(c);
    Agenda::new(order, a.len()).expect("same candidates")
}
