//! Polynomial-time control algorithms.

use super::{p_last_among_registered, ControlInstance, ControlSolution, Variant};
use crate::error::{Error, Result};
use crate::model::{Agenda, CandidateId, Election, PairwiseTally};
use crate::rules::{tsmr_winner, tsmr_winner_by};

/// Largest unregistered candidate set [`ccac_immunity_check`] enumerates.
pub const IMMUNITY_MAX_D: usize = 12;

/// The smallest set of candidates whose deletion makes `p` the TSMR winner.
///
/// Predecessors of `p` that beat it must go. A successor survives exactly
/// when some surviving earlier candidate beats it; any successful deletion
/// set contains the one built this way, so it is minimum.
pub fn ccdc_deletions(t: &PairwiseTally, a: &Agenda, p: CandidateId) -> Vec<CandidateId> {
    let mut kept: Vec<CandidateId> = Vec::new();
    let mut deleted = Vec::new();
    for &c in a.predecessors(p) {
        if t.beats(c, p) {
            deleted.push(c);
        } else {
            kept.push(c);
        }
    }
    kept.push(p);
    for &s in a.successors(p) {
        if kept.iter().any(|&x| t.beats(x, s)) {
            kept.push(s);
        } else {
            deleted.push(s);
        }
    }
    deleted.sort_unstable();
    deleted
}

fn check_agenda(e: &Election, p: CandidateId, a: &Agenda) -> Result<()> {
    if p.0 >= e.candidate_count() {
        return Err(Error::invalid(format!(
            "candidate {p} is not in the roster"
        )));
    }
    if a.len() != e.candidate_count() {
        return Err(Error::invalid("agenda does not match the roster"));
    }
    Ok(())
}

/// Constructive control by deleting at most `k` candidates.
pub fn ccdc_greedy(
    e: &Election,
    p: CandidateId,
    a: &Agenda,
    k: usize,
) -> Result<Option<ControlSolution>> {
    check_agenda(e, p, a)?;
    let deleted = ccdc_deletions(&e.tally(), a, p);
    Ok((deleted.len() <= k).then(|| ControlSolution {
        deleted_candidates: deleted,
        ..ControlSolution::default()
    }))
}

/// Destructive control by deleting at most `k` candidates other than `p`.
///
/// Some rival has to win. For each rival the constructive greedy yields its
/// minimum deletion set; rivals whose set contains `p` are out. The cheapest
/// remaining rival (smallest id on ties) is used.
pub fn dcdc(e: &Election, p: CandidateId, a: &Agenda, k: usize) -> Result<Option<ControlSolution>> {
    check_agenda(e, p, a)?;
    if tsmr_winner(e, a)? != p {
        return Ok(Some(ControlSolution::default()));
    }
    let t = e.tally();
    let best = e
        .roster()
        .ids()
        .filter(|&c| c != p)
        .map(|c| ccdc_deletions(&t, a, c))
        .filter(|del| !del.contains(&p))
        .min_by_key(|del| del.len());
    Ok(best
        .filter(|del| del.len() <= k)
        .map(|del| ControlSolution {
            deleted_candidates: del,
            ..ControlSolution::default()
        }))
}

/// Destructive control by adding at most `k_AC` unregistered candidates.
///
/// When `p` wins the registered election, one added candidate is enough if
/// any works: either it precedes `p` and beats it, or it follows `p` and no
/// registered predecessor beats it.
pub fn dcac(inst: &ControlInstance) -> Result<Option<ControlSolution>> {
    if !Variant::Dcac.matches(inst) {
        return Err(Error::precondition("instance is not a dcac instance"));
    }
    inst.validate()?;
    let p = inst.distinguished;
    if inst.winner_after(&ControlSolution::default())? != p {
        return Ok(Some(ControlSolution::default()));
    }
    if inst.budgets.ac == 0 {
        return Ok(None);
    }
    let full = Election::new(inst.roster.clone(), inst.votes.clone())?;
    let t = full.tally();
    let pos = inst.agenda.positions();
    let found = inst.unregistered_candidates.iter().copied().find(|&c| {
        if pos[c.0] < pos[p.0] {
            t.beats(c, p)
        } else {
            inst.agenda
                .predecessors(c)
                .iter()
                .all(|&x| !inst.is_registered(x) || !t.beats(x, c))
        }
    });
    Ok(found.map(|c| ControlSolution {
        added_candidates: vec![c],
        ..ControlSolution::default()
    }))
}

/// Destructive control by adding (DCAV) or deleting (DCDV) votes when `p` is
/// the last registered candidate of the agenda.
///
/// Then `p` wins exactly when nobody beats it, so it suffices to push one
/// rival's margin over `p` above zero. Each added vote ranking the rival
/// above `p`, or each deleted vote ranking `p` above the rival, moves that
/// margin by one.
pub fn destructive_votes_p_last(inst: &ControlInstance) -> Result<Option<ControlSolution>> {
    let adding = if Variant::Dcav.matches(inst) {
        true
    } else if Variant::Dcdv.matches(inst) {
        false
    } else {
        return Err(Error::precondition(
            "instance is not a dcav or dcdv instance",
        ));
    };
    inst.validate()?;
    if !p_last_among_registered(inst) {
        return Err(Error::precondition("p last"));
    }
    let p = inst.distinguished;
    let full = Election::new(inst.roster.clone(), inst.votes.clone())?;
    let t = full.tally();
    let rivals = inst.registered_candidates();
    let rivals = rivals.iter().copied().filter(|&c| c != p);
    if rivals.clone().any(|c| t.beats(c, p)) {
        return Ok(Some(ControlSolution::default()));
    }
    let (pool, k) = if adding {
        (&inst.unregistered_votes, inst.budgets.av)
    } else {
        (&inst.votes, inst.budgets.dv)
    };
    let useful = |c: CandidateId, i: usize| {
        let v = &pool[i];
        if adding {
            v.prefers(c, p)
        } else {
            v.prefers(p, c)
        }
    };
    let mut best: Option<(usize, CandidateId)> = None;
    for c in rivals {
        let need = (t.margin(p, c) + 1) as usize;
        let supply: usize = (0..pool.len())
            .filter(|&i| useful(c, i))
            .map(|i| pool[i].multiplicity() as usize)
            .sum();
        if need <= k && need <= supply && best.is_none_or(|(n, _)| need < n) {
            best = Some((need, c));
        }
    }
    let Some((mut need, c)) = best else {
        return Ok(None);
    };
    let mut chosen = Vec::new();
    for i in 0..pool.len() {
        if need == 0 {
            break;
        }
        if useful(c, i) {
            let take = need.min(pool[i].multiplicity() as usize);
            chosen.push((i, take as u32));
            need -= take;
        }
    }
    let mut sol = ControlSolution::default();
    if adding {
        sol.added_votes = chosen;
    } else {
        sol.deleted_votes = chosen;
    }
    Ok(Some(sol))
}

/// Whether no set of unregistered candidates turns `p` from a non-winner
/// into a winner. Exhaustive over subsets of the unregistered candidates.
pub fn ccac_immunity_check(inst: &ControlInstance) -> Result<bool> {
    inst.validate()?;
    let p = inst.distinguished;
    if inst.agenda.last() != Some(p) {
        return Err(Error::precondition("p last"));
    }
    let d = &inst.unregistered_candidates;
    if d.len() > IMMUNITY_MAX_D {
        return Err(Error::CapExceeded {
            what: "unregistered candidate subsets",
            size: 1u128 << d.len(),
            cap: 1u128 << IMMUNITY_MAX_D,
        });
    }
    let full = Election::new(inst.roster.clone(), inst.votes.clone())?;
    let t = full.tally();
    let wins = |keep: &[bool]| {
        let order = inst.agenda.filtered(|c| keep[c.0]);
        tsmr_winner_by(&order, |x, y| t.beats(x, y)) == Some(p)
    };
    let registered: Vec<bool> = inst.roster.ids().map(|c| inst.is_registered(c)).collect();
    if wins(&registered) {
        return Ok(true);
    }
    for mask in 1u32..(1 << d.len()) {
        let mut keep = registered.clone();
        for (j, c) in d.iter().enumerate() {
            keep[c.0] = mask & (1 << j) != 0;
        }
        if wins(&keep) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::solve_exact;
    use crate::control::tests::from_election;
    use crate::fixtures::{election, example1};
    use crate::model::Vote;

    fn id(i: usize) -> CandidateId {
        CandidateId(i)
    }

    #[test]
    fn ccdc_example1() {
        let e = example1();
        let a = Agenda::identity(4);
        assert_eq!(
            ccdc_greedy(&e, id(0), &a, 0).unwrap(),
            Some(ControlSolution::default())
        );

        let a = Agenda::from_indices(&[2, 0, 1, 3]).unwrap();
        let sol = ccdc_greedy(&e, id(0), &a, 1).unwrap().unwrap();
        assert_eq!(sol.deleted_candidates, vec![id(2)]);
        assert_eq!(ccdc_greedy(&e, id(0), &a, 0).unwrap(), None);
    }

    #[test]
    fn ccdc_condorcet_winner_needs_nothing() {
        let e = election(4, &[&[2, 0, 1, 3]]);
        for order in [[0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2]] {
            let a = Agenda::from_indices(&order).unwrap();
            assert!(ccdc_greedy(&e, id(2), &a, 0).unwrap().is_some());
        }
    }

    #[test]
    fn dcdc_cases() {
        let e = example1();
        let a = Agenda::from_indices(&[2, 0, 1, 3]).unwrap();
        // a does not win here, so nothing is needed.
        assert_eq!(
            dcdc(&e, id(0), &a, 0).unwrap(),
            Some(ControlSolution::default())
        );

        let e = election(2, &[&[0, 1]]);
        let a = Agenda::identity(2);
        assert_eq!(dcdc(&e, id(0), &a, 1).unwrap(), None);
    }

    #[test]
    fn dcac_cases() {
        let e = election(3, &[&[2, 0, 1], &[2, 0, 1]]);
        let mut inst = from_election(&e, &[2, 0, 1], 0, Variant::Dcac, 1);
        inst.unregistered_candidates = vec![id(2)];
        let sol = dcac(&inst).unwrap().unwrap();
        assert_eq!(sol.added_candidates, vec![id(2)]);
        assert_eq!(solve_exact(&inst).unwrap(), Some(sol));

        // The unregistered candidate follows p and p beats it: no help.
        let e = election(3, &[&[0, 1, 2]]);
        let mut inst = from_election(&e, &[0, 1, 2], 0, Variant::Dcac, 1);
        inst.unregistered_candidates = vec![id(2)];
        assert_eq!(dcac(&inst).unwrap(), None);
        assert_eq!(solve_exact(&inst).unwrap(), None);

        // p loses already.
        let e = election(2, &[&[1, 0]]);
        let inst = from_election(&e, &[1, 0], 0, Variant::Dcac, 0);
        assert_eq!(dcac(&inst).unwrap(), Some(ControlSolution::default()));
    }

    #[test]
    fn dcdv_margin_two_needs_two() {
        // p beats 1 by 3-1 (margin 2); deleting one p>1 vote leaves a 2-1 win.
        let e = election(2, &[&[0, 1], &[0, 1], &[0, 1], &[1, 0]]);
        let inst = from_election(&e, &[1, 0], 0, Variant::Dcdv, 1);
        assert_eq!(destructive_votes_p_last(&inst).unwrap(), None);
        let inst = from_election(&e, &[1, 0], 0, Variant::Dcdv, 3);
        let sol = destructive_votes_p_last(&inst).unwrap().unwrap();
        assert_eq!(sol.deleted_votes, vec![(0, 1), (1, 1), (2, 1)]);
        assert!(inst.verify(&sol).unwrap());
    }

    #[test]
    fn dcav_tie_plus_one() {
        let e = election(2, &[&[0, 1], &[1, 0]]);
        let mut inst = from_election(&e, &[1, 0], 0, Variant::Dcav, 0);
        inst.unregistered_votes = vec![Vote::from_indices(&[1, 0], 1).unwrap()];
        inst.budgets.av = 1;
        let sol = destructive_votes_p_last(&inst).unwrap().unwrap();
        assert_eq!(sol.added_votes, vec![(0, 1)]);
        assert!(inst.verify(&sol).unwrap());
    }

    #[test]
    fn p_last_required() {
        let inst = from_election(&example1(), &[0, 1, 2, 3], 0, Variant::Dcdv, 1);
        assert_eq!(
            destructive_votes_p_last(&inst).unwrap_err().to_string(),
            "precondition: p last"
        );
    }

    #[test]
    fn immunity_without_unregistered() {
        let inst = from_election(&example1(), &[1, 2, 3, 0], 0, Variant::Ccac, 0);
        assert!(ccac_immunity_check(&inst).unwrap());
    }
}
