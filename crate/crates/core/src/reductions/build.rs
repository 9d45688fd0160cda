//! The constructions behind each [`ReductionId`].
//!
//! Candidates are laid out as the special candidates (`p`, `q`, `q'`), then
//! the red vertices, then (where they become candidates) the blue vertices.
//! `fwd` lists a group by ascending id and `back` by descending id; the
//! neighbourhood segments keep that order.

use super::{CertificateRule, RbdsInstance, Reduced, ReductionId, ReductionOutput};
use crate::control::{Budgets, ControlInstance, Mode};
use crate::model::{Agenda, CandidateId, Roster, Vote};
use crate::order::PartialOrder;
use crate::partial::{PartialElection, PartialVote};
use crate::reductions::mcgarvey;

struct Layout<'a> {
    r: &'a RbdsInstance,
    roster: Roster,
    specials: Vec<CandidateId>,
    reds: Vec<CandidateId>,
    blues: Vec<CandidateId>,
}

type Seq = Vec<CandidateId>;

impl<'a> Layout<'a> {
    fn new(r: &'a RbdsInstance, specials: &[&str], with_blues: bool) -> Self {
        let taken = |l: &str| r.red().iter().chain(r.blue()).any(|x| x == l);
        let mut labels: Vec<String> = Vec::new();
        for s in specials {
            let mut l = (*s).to_owned();
            while taken(&l) || labels.contains(&l) {
                l.push('_');
            }
            labels.push(l);
        }
        labels.extend(r.red().iter().cloned());
        if with_blues {
            labels.extend(r.blue().iter().cloned());
        }
        let k = specials.len();
        let nr = r.red().len();
        Layout {
            r,
            roster: Roster::new(labels).expect("labels are distinct and valid"),
            specials: (0..k).map(CandidateId).collect(),
            reds: (k..k + nr).map(CandidateId).collect(),
            blues: if with_blues {
                (k + nr..k + nr + r.blue().len()).map(CandidateId).collect()
            } else {
                Vec::new()
            },
        }
    }

    fn special(&self, i: usize) -> CandidateId {
        self.specials[i]
    }

    fn fwd_r(&self) -> Seq {
        self.reds.clone()
    }

    fn back_r(&self) -> Seq {
        self.reds.iter().rev().copied().collect()
    }

    fn fwd_b(&self) -> Seq {
        self.blues.clone()
    }

    fn back_b(&self) -> Seq {
        self.blues.iter().rev().copied().collect()
    }

    /// `N(b)` ascending and `R \ N(b)` ascending.
    fn split(&self, b: usize) -> (Seq, Seq) {
        let nb = self.r.neighbors(b);
        let (inside, outside): (Vec<usize>, Vec<usize>) =
            (0..self.reds.len()).partition(|x| nb.contains(x));
        (
            inside.into_iter().map(|x| self.reds[x]).collect(),
            outside.into_iter().map(|x| self.reds[x]).collect(),
        )
    }

    fn fwd_n(&self, b: usize) -> Seq {
        self.split(b).0
    }

    fn fwd_not_n(&self, b: usize) -> Seq {
        self.split(b).1
    }

    fn back_n(&self, b: usize) -> Seq {
        rev(self.split(b).0)
    }

    fn back_not_n(&self, b: usize) -> Seq {
        rev(self.split(b).1)
    }

    fn agenda(&self, parts: &[Seq]) -> Agenda {
        Agenda::new(parts.concat(), self.roster.len())
            .expect("construction agenda is a permutation")
    }
}

fn rev(mut s: Seq) -> Seq {
    s.reverse();
    s
}

fn one(c: CandidateId) -> Seq {
    vec![c]
}

/// Appends `k` copies of the ballot; nothing when `k` is zero.
fn push(votes: &mut Vec<Vote>, k: usize, parts: &[Seq]) {
    if k > 0 {
        votes.push(Vote::new(parts.concat(), k as u32).expect("positive multiplicity"));
    }
}

/// Appends one ballot per blue vertex and returns their entry indices.
fn per_blue(
    votes: &mut Vec<Vote>,
    n_blue: usize,
    ballot: impl Fn(usize) -> Vec<Seq>,
) -> Vec<usize> {
    (0..n_blue)
        .map(|b| {
            votes.push(Vote::single(ballot(b).concat()));
            votes.len() - 1
        })
        .collect()
}

fn control(
    l: &Layout,
    agenda: Agenda,
    votes: Vec<Vote>,
    unregistered_votes: Vec<Vote>,
    distinguished: CandidateId,
    budgets: Budgets,
    mode: Mode,
) -> Reduced {
    Reduced::Control(ControlInstance {
        roster: l.roster.clone(),
        unregistered_candidates: l.blues.clone(),
        votes,
        unregistered_votes,
        distinguished,
        agenda,
        budgets,
        mode,
    })
}

fn output(
    which: ReductionId,
    instance: Reduced,
    blue_items: Vec<usize>,
    rule: CertificateRule,
) -> ReductionOutput {
    ReductionOutput {
        which,
        instance,
        blue_items,
        rule,
    }
}

pub(super) fn build(r: &RbdsInstance, which: ReductionId) -> ReductionOutput {
    use ReductionId::*;
    match which {
        CcavFirst => ccav_first(r),
        CcavLast => ccav_last(r),
        CcdvFirstK => ccdv_first_k(r),
        CcdvFirstDual => ccdv_first_dual(r),
        CcdvLastK => ccdv_last_k(r, which, false),
        CcdvLastDual => ccdv_last_dual(r, which, false),
        CcacFirst => ccac_first(r),
        DcavNonlast => dcav_nonlast(r),
        DcdvK => ccdv_last_k(r, which, true),
        DcdvDual => ccdv_last_dual(r, which, true),
        PwFirst => pw_first(r),
        PwPenultimate => pw_penultimate(r),
    }
}

fn ccav_first(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p"], true);
    let p = l.special(0);
    let kappa = r.kappa();
    let mut votes = Vec::new();
    push(&mut votes, kappa, &[l.back_b(), l.back_r(), one(p)]);
    push(&mut votes, 1, &[l.back_r(), one(p), l.back_b()]);
    let mut w = Vec::new();
    let items = per_blue(&mut w, r.blue().len(), |b| {
        let others: Seq = l
            .back_b()
            .into_iter()
            .filter(|&x| x != l.blues[b])
            .collect();
        vec![
            one(p),
            l.back_not_n(b),
            one(l.blues[b]),
            l.back_n(b),
            others,
        ]
    });
    let agenda = l.agenda(&[one(p), l.fwd_b(), l.fwd_r()]);
    let inst = Reduced::Control(ControlInstance {
        roster: l.roster.clone(),
        unregistered_candidates: Vec::new(),
        votes,
        unregistered_votes: w,
        distinguished: p,
        agenda,
        budgets: Budgets {
            av: kappa,
            ..Budgets::default()
        },
        mode: Mode::Constructive,
    });
    output(
        ReductionId::CcavFirst,
        inst,
        items,
        CertificateRule::AddVotes,
    )
}

fn ccav_last(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q"], false);
    let (p, q) = (l.special(0), l.special(1));
    let kappa = r.kappa();
    let mut votes = Vec::new();
    push(&mut votes, kappa - 1, &[one(q), one(p), l.fwd_r()]);
    push(&mut votes, 1, &[one(q), l.fwd_r(), one(p)]);
    let mut w = Vec::new();
    let items = per_blue(&mut w, r.blue().len(), |b| {
        vec![l.fwd_not_n(b), one(p), l.fwd_n(b), one(q)]
    });
    let agenda = l.agenda(&[l.fwd_r(), one(q), one(p)]);
    let inst = control(
        &l,
        agenda,
        votes,
        w,
        p,
        Budgets {
            av: kappa,
            ..Budgets::default()
        },
        Mode::Constructive,
    );
    output(
        ReductionId::CcavLast,
        inst,
        items,
        CertificateRule::AddVotes,
    )
}

fn ccdv_first_k(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q", "q'"], false);
    let (p, q, q2) = (l.special(0), l.special(1), l.special(2));
    let kappa = r.kappa();
    let ell = r.max_red_degree();
    let n_blue = r.blue().len();
    let mut votes = Vec::new();
    push(&mut votes, ell + 1, &[one(q2), one(p), one(q), l.back_r()]);
    push(
        &mut votes,
        kappa + ell - 2,
        &[one(q), one(p), l.back_r(), one(q2)],
    );
    push(
        &mut votes,
        n_blue - kappa + 1,
        &[l.back_r(), one(p), one(q), one(q2)],
    );
    push(&mut votes, 1, &[l.back_r(), one(q), one(p), one(q2)]);
    push(
        &mut votes,
        kappa - 2,
        &[l.back_r(), one(q2), one(p), one(q)],
    );
    let items = per_blue(&mut votes, n_blue, |b| {
        vec![one(q), one(q2), l.back_n(b), one(p), l.back_not_n(b)]
    });
    let agenda = l.agenda(&[one(p), one(q2), l.fwd_r(), one(q)]);
    let inst = control(
        &l,
        agenda,
        votes,
        Vec::new(),
        p,
        Budgets {
            dv: kappa,
            ..Budgets::default()
        },
        Mode::Constructive,
    );
    output(
        ReductionId::CcdvFirstK,
        inst,
        items,
        CertificateRule::DeleteChosen,
    )
}

fn ccdv_first_dual(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q"], false);
    let (p, q) = (l.special(0), l.special(1));
    let kappa = r.kappa();
    let n_blue = r.blue().len();
    let mut votes = Vec::new();
    push(&mut votes, kappa, &[one(p), one(q), l.back_r()]);
    push(&mut votes, 1, &[l.back_r(), one(p), one(q)]);
    let items = per_blue(&mut votes, n_blue, |b| {
        vec![one(q), l.back_not_n(b), one(p), l.back_n(b)]
    });
    let agenda = l.agenda(&[one(p), l.fwd_r(), one(q)]);
    let inst = control(
        &l,
        agenda,
        votes,
        Vec::new(),
        p,
        Budgets {
            dv: n_blue - kappa,
            ..Budgets::default()
        },
        Mode::Constructive,
    );
    output(
        ReductionId::CcdvFirstDual,
        inst,
        items,
        CertificateRule::DeleteComplement,
    )
}

/// Shared by the constructive `p`-last construction and its destructive twin
/// in which `q` is distinguished.
fn ccdv_last_k(r: &RbdsInstance, which: ReductionId, destructive: bool) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q"], false);
    let (p, q) = (l.special(0), l.special(1));
    let kappa = r.kappa();
    let ell = r.max_red_degree();
    let n_blue = r.blue().len();
    let mut votes = Vec::new();
    push(&mut votes, n_blue + 1, &[l.back_r(), one(p), one(q)]);
    push(&mut votes, ell + kappa, &[one(q), one(p), l.back_r()]);
    push(&mut votes, ell - 1, &[one(p), one(q), l.back_r()]);
    let items = per_blue(&mut votes, n_blue, |b| {
        vec![one(q), l.back_n(b), one(p), l.back_not_n(b)]
    });
    let agenda = l.agenda(&[one(q), l.fwd_r(), one(p)]);
    let (target, mode) = if destructive {
        (q, Mode::Destructive)
    } else {
        (p, Mode::Constructive)
    };
    let inst = control(
        &l,
        agenda,
        votes,
        Vec::new(),
        target,
        Budgets {
            dv: kappa,
            ..Budgets::default()
        },
        mode,
    );
    output(which, inst, items, CertificateRule::DeleteChosen)
}

fn ccdv_last_dual(r: &RbdsInstance, which: ReductionId, destructive: bool) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q"], false);
    let (p, q) = (l.special(0), l.special(1));
    let kappa = r.kappa();
    let n_blue = r.blue().len();
    let mut votes = Vec::new();
    push(&mut votes, kappa - 1, &[one(p), one(q), l.fwd_r()]);
    push(&mut votes, 1, &[l.fwd_r(), one(p), one(q)]);
    let items = per_blue(&mut votes, n_blue, |b| {
        vec![one(q), l.fwd_not_n(b), one(p), l.fwd_n(b)]
    });
    let agenda = l.agenda(&[one(q), l.fwd_r(), one(p)]);
    let (target, mode) = if destructive {
        (q, Mode::Destructive)
    } else {
        (p, Mode::Constructive)
    };
    let inst = control(
        &l,
        agenda,
        votes,
        Vec::new(),
        target,
        Budgets {
            dv: n_blue - kappa,
            ..Budgets::default()
        },
        mode,
    );
    output(which, inst, items, CertificateRule::DeleteComplement)
}

fn ccac_first(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p"], true);
    let p = l.special(0);
    let mut arcs = Vec::new();
    for (j, &rj) in l.reds.iter().enumerate() {
        arcs.push((rj, p));
        for &ri in &l.reds[..j] {
            arcs.push((rj, ri));
        }
    }
    for (b, &bc) in l.blues.iter().enumerate() {
        arcs.push((p, bc));
        let nb = r.neighbors(b);
        for (x, &rc) in l.reds.iter().enumerate() {
            if nb.contains(&x) {
                arcs.push((bc, rc));
            } else {
                arcs.push((rc, bc));
            }
        }
    }
    let e = mcgarvey(&l.roster, &arcs).expect("construction arcs are oriented");
    let agenda = l.agenda(&[one(p), l.fwd_b(), l.fwd_r()]);
    let inst = control(
        &l,
        agenda,
        e.votes().to_vec(),
        Vec::new(),
        p,
        Budgets {
            ac: r.kappa(),
            ..Budgets::default()
        },
        Mode::Constructive,
    );
    let items = l.blues.iter().map(|c| c.0).collect();
    output(
        ReductionId::CcacFirst,
        inst,
        items,
        CertificateRule::AddCandidates,
    )
}

fn dcav_nonlast(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q"], false);
    let (p, q) = (l.special(0), l.special(1));
    let kappa = r.kappa();
    let mut votes = Vec::new();
    push(&mut votes, kappa - 1, &[one(p), one(q), l.fwd_r()]);
    push(&mut votes, 2, &[one(p), l.fwd_r(), one(q)]);
    push(&mut votes, 1, &[one(q), one(p), l.fwd_r()]);
    let mut w = Vec::new();
    let items = per_blue(&mut w, r.blue().len(), |b| {
        vec![l.fwd_not_n(b), one(q), one(p), l.fwd_n(b)]
    });
    let agenda = l.agenda(&[one(p), l.fwd_r(), one(q)]);
    let inst = control(
        &l,
        agenda,
        votes,
        w,
        p,
        Budgets {
            av: kappa,
            ..Budgets::default()
        },
        Mode::Destructive,
    );
    output(
        ReductionId::DcavNonlast,
        inst,
        items,
        CertificateRule::AddVotes,
    )
}

fn chains_vote(m: usize, chains: &[Seq]) -> PartialVote {
    let order = PartialOrder::from_chains(m, chains).expect("construction chains are acyclic");
    PartialVote::new(order, 1).expect("positive multiplicity")
}

fn fixed_vote(votes: &mut Vec<PartialVote>, k: usize, parts: &[Seq]) {
    if k > 0 {
        let order = PartialOrder::from_ranking(&parts.concat()).expect("permutation");
        votes.push(PartialVote::new(order, k as u32).expect("positive multiplicity"));
    }
}

fn possible(
    l: &Layout,
    which: ReductionId,
    votes: Vec<PartialVote>,
    agenda: Agenda,
    p: CandidateId,
    items: Vec<usize>,
    options: Vec<[Seq; 2]>,
) -> ReductionOutput {
    let election = PartialElection::new(l.roster.clone(), votes).expect("roster matches");
    let agenda = PartialOrder::from_ranking(agenda.order()).expect("permutation");
    output(
        which,
        Reduced::Possible {
            election,
            agenda,
            distinguished: p,
        },
        items,
        CertificateRule::Complete(options),
    )
}

fn pw_first(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q"], false);
    let (p, q) = (l.special(0), l.special(1));
    let m = l.roster.len();
    let kappa = r.kappa();
    let ell = r.max_red_degree();
    let n_blue = r.blue().len();
    let mut votes = Vec::new();
    let mut items = Vec::new();
    let mut options = Vec::new();
    for b in 0..n_blue {
        items.push(votes.len());
        votes.push(chains_vote(
            m,
            &[
                [l.back_n(b), one(p), l.back_not_n(b)].concat(),
                [one(q), l.back_not_n(b)].concat(),
            ],
        ));
        options.push([
            [one(q), l.back_n(b), one(p), l.back_not_n(b)].concat(),
            [l.back_n(b), one(p), one(q), l.back_not_n(b)].concat(),
        ]);
    }
    fixed_vote(&mut votes, n_blue, &[l.back_r(), one(q), one(p)]);
    fixed_vote(&mut votes, 2 * ell + kappa, &[one(q), l.back_r(), one(p)]);
    fixed_vote(
        &mut votes,
        ell + 2 * kappa + 1,
        &[l.back_r(), one(p), one(q)],
    );
    fixed_vote(&mut votes, ell + kappa, &[one(p), one(q), l.back_r()]);
    let agenda = l.agenda(&[one(p), one(q), l.fwd_r()]);
    possible(&l, ReductionId::PwFirst, votes, agenda, p, items, options)
}

fn pw_penultimate(r: &RbdsInstance) -> ReductionOutput {
    let l = Layout::new(r, &["p", "q", "q'"], false);
    let (p, q, q2) = (l.special(0), l.special(1), l.special(2));
    let m = l.roster.len();
    let kappa = r.kappa();
    let n_blue = r.blue().len();
    let mut votes = Vec::new();
    let mut items = Vec::new();
    let mut options = Vec::new();
    for b in 0..n_blue {
        items.push(votes.len());
        votes.push(chains_vote(
            m,
            &[
                [l.fwd_not_n(b), one(q2)].concat(),
                [one(q), one(p), l.fwd_n(b)].concat(),
            ],
        ));
        options.push([
            [l.fwd_not_n(b), one(q2), one(q), one(p), l.fwd_n(b)].concat(),
            [one(q), one(p), l.fwd_not_n(b), one(q2), l.fwd_n(b)].concat(),
        ]);
    }
    fixed_vote(
        &mut votes,
        n_blue + 1,
        &[one(q2), one(q), l.fwd_r(), one(p)],
    );
    fixed_vote(&mut votes, 2 * kappa, &[one(q), one(p), l.fwd_r(), one(q2)]);
    fixed_vote(&mut votes, kappa, &[one(q), one(p), one(q2), l.fwd_r()]);
    fixed_vote(&mut votes, kappa, &[l.fwd_r(), one(p), one(q2), one(q)]);
    let agenda = l.agenda(&[one(q2), l.fwd_r(), one(p), one(q)]);
    possible(
        &l,
        ReductionId::PwPenultimate,
        votes,
        agenda,
        p,
        items,
        options,
    )
}
