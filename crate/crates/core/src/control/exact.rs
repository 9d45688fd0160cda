//! Exhaustive multimode control.
//!
//! Copies of a vote entry are interchangeable, so a choice of copies is a
//! count per entry. Choices are visited by ascending cardinality; within one
//! cardinality, count vectors come in the order of their sorted copy lists
//! (more copies of earlier entries first), and candidate sets in
//! lexicographic order. Deleted votes form the outermost loop, then added
//! votes, deleted candidates and added candidates. The first success in this
//! order is returned, so answers are canonical.

use itertools::Itertools;
use rayon::prelude::*;

use super::{ControlInstance, ControlSolution, VoteSelection};
use crate::error::{Error, Result};
use crate::model::{CandidateId, Vote};
use crate::rules::tsmr_winner_by;

/// Default limit on the number of modification combinations.
pub const EXACT_CAP: u128 = 10_000_000;

fn binomial_prefix_sum(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut term = 1u128;
    for j in 0..=k.min(n) {
        total = total.saturating_add(term);
        term = term.saturating_mul((n - j) as u128) / (j as u128 + 1);
    }
    total
}

/// Number of modification combinations the exact solver may visit, counting
/// vote copies individually.
pub fn exact_search_size(inst: &ControlInstance) -> u128 {
    let b = inst.budgets;
    let n_v: usize = inst.votes.iter().map(|v| v.multiplicity() as usize).sum();
    let n_w: usize = inst
        .unregistered_votes
        .iter()
        .map(|v| v.multiplicity() as usize)
        .sum();
    let c = inst.candidate_count() - inst.unregistered_candidates.len();
    [
        binomial_prefix_sum(n_v, b.dv),
        binomial_prefix_sum(n_w, b.av),
        binomial_prefix_sum(c.saturating_sub(1), b.dc),
        binomial_prefix_sum(inst.unregistered_candidates.len(), b.ac),
    ]
    .into_iter()
    .fold(1u128, u128::saturating_mul)
}

pub fn solve_exact(inst: &ControlInstance) -> Result<Option<ControlSolution>> {
    solve_exact_with_cap(inst, EXACT_CAP)
}

pub fn solve_exact_with_cap(inst: &ControlInstance, cap: u128) -> Result<Option<ControlSolution>> {
    inst.validate()?;
    let size = exact_search_size(inst);
    if size > cap {
        return Err(Error::CapExceeded {
            what: "instance too large for exact solver",
            size,
            cap,
        });
    }
    let m = inst.candidate_count();
    let b = inst.budgets;
    let p = inst.distinguished;

    let dv = count_vectors(&inst.votes, b.dv);
    let av = count_vectors(&inst.unregistered_votes, b.av);
    let deletable: Vec<CandidateId> = inst
        .registered_candidates()
        .into_iter()
        .filter(|&c| c != p)
        .collect();
    let dc = subsets(&deletable, b.dc);
    let ac = subsets(&inst.unregistered_candidates, b.ac);

    let mut base = vec![0i32; m * m];
    for v in &inst.votes {
        add_vote(&mut base, m, v.ranking(), v.multiplicity() as i32);
    }
    let registered: Vec<bool> = inst.roster.ids().map(|c| inst.is_registered(c)).collect();

    let search = |del: &Vec<u32>| -> Option<ControlSolution> {
        let mut margin = base.clone();
        for (v, &k) in inst.votes.iter().zip(del) {
            if k > 0 {
                add_vote(&mut margin, m, v.ranking(), -(k as i32));
            }
        }
        let mut keep = vec![false; m];
        for add in &av {
            let mut margin = margin.clone();
            for (w, &k) in inst.unregistered_votes.iter().zip(add) {
                if k > 0 {
                    add_vote(&mut margin, m, w.ranking(), k as i32);
                }
            }
            for removed in &dc {
                for added in &ac {
                    keep.copy_from_slice(&registered);
                    for c in removed {
                        keep[c.0] = false;
                    }
                    for c in added {
                        keep[c.0] = true;
                    }
                    let order = inst.agenda.filtered(|c| keep[c.0]);
                    let w = tsmr_winner_by(&order, |x, y| margin[x.0 * m + y.0] > 0)
                        .expect("p is always kept");
                    if inst.mode.achieved(w, p) {
                        return Some(ControlSolution {
                            deleted_votes: selection(del),
                            added_votes: selection(add),
                            deleted_candidates: removed.clone(),
                            added_candidates: added.clone(),
                        });
                    }
                }
            }
        }
        None
    };
    Ok(if dv.len() > 1 {
        dv.par_iter().find_map_first(search)
    } else {
        dv.iter().find_map(search)
    })
}

fn selection(counts: &[u32]) -> VoteSelection {
    counts
        .iter()
        .enumerate()
        .filter(|&(_, &k)| k > 0)
        .map(|(i, &k)| (i, k))
        .collect()
}

fn add_vote(margin: &mut [i32], m: usize, ranking: &[CandidateId], w: i32) {
    for (i, a) in ranking.iter().enumerate() {
        for b in &ranking[i + 1..] {
            margin[a.0 * m + b.0] += w;
            margin[b.0 * m + a.0] -= w;
        }
    }
}

/// All count vectors with total at most `k`, in canonical order.
fn count_vectors(votes: &[Vote], k: usize) -> Vec<Vec<u32>> {
    let caps: Vec<u32> = votes.iter().map(|v| v.multiplicity()).collect();
    let total: usize = caps.iter().map(|&c| c as usize).sum();
    let mut out = Vec::new();
    let mut cur = vec![0u32; caps.len()];
    for size in 0..=k.min(total) {
        fill(&caps, 0, size as u32, &mut cur, &mut out);
    }
    out
}

fn fill(caps: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i == caps.len() {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let rest: u32 = caps[i + 1..].iter().sum();
    let lo = left.saturating_sub(rest);
    for c in (lo..=left.min(caps[i])).rev() {
        cur[i] = c;
        fill(caps, i + 1, left - c, cur, out);
    }
    cur[i] = 0;
}

fn subsets(pool: &[CandidateId], k: usize) -> Vec<Vec<CandidateId>> {
    (0..=k.min(pool.len()))
        .flat_map(|size| pool.iter().copied().combinations(size))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::tests::from_election;
    use crate::control::{Mode, Variant};
    use crate::fixtures::{election, example1};

    #[test]
    fn count_vector_order() {
        let votes = vec![
            Vote::from_indices(&[0, 1], 2).unwrap(),
            Vote::from_indices(&[1, 0], 1).unwrap(),
        ];
        let got = count_vectors(&votes, 2);
        assert_eq!(
            got,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1]]
        );
    }

    #[test]
    fn search_size_formula() {
        let inst = from_election(&example1(), &[0, 1, 2, 3], 0, Variant::Ccdv, 2);
        // 1 + 3 + 3 vote subsets
        assert_eq!(exact_search_size(&inst), 7);
        let inst = from_election(&example1(), &[0, 1, 2, 3], 0, Variant::Ccdc, 3);
        assert_eq!(exact_search_size(&inst), 8);
    }

    #[test]
    fn trivial_cases() {
        let inst = from_election(&example1(), &[0, 1, 2, 3], 0, Variant::Ccav, 0);
        assert_eq!(
            solve_exact(&inst).unwrap(),
            Some(ControlSolution::default())
        );

        let e = election(3, &[&[0, 1, 2]]);
        let inst = from_election(&e, &[1, 2, 0], 0, Variant::Dcdv, 0);
        assert_eq!(solve_exact(&inst).unwrap(), None);
    }

    #[test]
    fn ccdc_example1() {
        let inst = from_election(&example1(), &[2, 0, 1, 3], 0, Variant::Ccdc, 1);
        let sol = solve_exact(&inst).unwrap().unwrap();
        assert_eq!(sol.deleted_candidates, vec![CandidateId(2)]);
        assert!(inst.verify(&sol).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let inst = from_election(&example1(), &[0, 1, 2, 3], 0, Variant::Ccdv, 3);
        let err = solve_exact_with_cap(&inst, 5).unwrap_err();
        assert!(err.is_cap());
        assert!(err
            .to_string()
            .contains("instance too large for exact solver"));
    }

    #[test]
    fn destructive_candidate_addition() {
        // p = 0 wins over {0, 1}; unregistered 2 beats 0 and sits before it.
        let e = election(3, &[&[2, 0, 1], &[2, 0, 1]]);
        let mut inst = from_election(&e, &[2, 0, 1], 0, Variant::Dcac, 1);
        inst.unregistered_candidates = vec![CandidateId(2)];
        assert_eq!(inst.mode, Mode::Destructive);
        let sol = solve_exact(&inst).unwrap().unwrap();
        assert_eq!(sol.added_candidates, vec![CandidateId(2)]);
    }
}
