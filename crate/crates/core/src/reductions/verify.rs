//! Exhaustive check that a reduction preserves yes/no answers on every small
//! RBDS instance.

use rayon::prelude::*;

use super::{rbds_brute, reduce, RbdsInstance, Reduced, ReductionId};
use crate::control::solve_exact;
use crate::error::{Error, Result};
use crate::partial::{possible_winner_exact, DEFAULT_COMPLETION_BUDGET};

/// An instance on which the reduction and the RBDS answer disagree, or on
/// which the mapped certificate fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: RbdsInstance,
    pub rbds_yes: bool,
    pub reduced_yes: bool,
    pub certificate_ok: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: u64,
    /// Instances skipped because the construction's assumptions fail.
    pub filtered: u64,
    pub yes: u64,
    pub no: u64,
    pub discrepancies: u64,
    pub certificate_failures: u64,
    /// Instances skipped because a solver cap was hit.
    pub skipped: u64,
    pub first_counterexample: Option<Counterexample>,
}

impl VerifyReport {
    /// True when some instance could not be decided within the caps.
    pub fn incomplete(&self) -> bool {
        self.skipped > 0
    }

    pub fn passed(&self) -> bool {
        self.discrepancies == 0 && self.certificate_failures == 0
    }
}

enum Outcome {
    Filtered,
    Skipped,
    Checked {
        rbds_yes: bool,
        reduced_yes: bool,
        certificate_ok: Option<bool>,
    },
}

fn check_one(r: &RbdsInstance, which: ReductionId) -> Result<Outcome> {
    let out = match reduce(r, which) {
        Ok(out) => out,
        Err(Error::Precondition(_)) => return Ok(Outcome::Filtered),
        Err(e) => return Err(e),
    };
    let dominating = rbds_brute(r)?;
    let solved = match &out.instance {
        Reduced::Control(inst) => solve_exact(inst).map(|s| s.is_some()),
        Reduced::Possible {
            election,
            agenda,
            distinguished,
        } => possible_winner_exact(election, agenda, *distinguished, DEFAULT_COMPLETION_BUDGET)
            .map(|s| s.is_some()),
    };
    let reduced_yes = match solved {
        Ok(v) => v,
        Err(e) if e.is_cap() => return Ok(Outcome::Skipped),
        Err(e) => return Err(e),
    };
    let certificate_ok = match &dominating {
        Some(set) => Some(out.check_certificate(&out.certificate(set))?),
        None => None,
    };
    Ok(Outcome::Checked {
        rbds_yes: dominating.is_some(),
        reduced_yes,
        certificate_ok,
    })
}

/// All RBDS instances with `1..=max_red` red and `1..=max_blue` blue
/// vertices, every edge set and every `kappa`, in a fixed order.
fn instances(max_red: usize, max_blue: usize) -> Vec<(usize, usize, u64, usize)> {
    let mut out = Vec::new();
    for nr in 1..=max_red {
        for nb in 1..=max_blue {
            for mask in 0..(1u64 << (nr * nb)) {
                for kappa in 1..=nb {
                    out.push((nr, nb, mask, kappa));
                }
            }
        }
    }
    out
}

fn instance(nr: usize, nb: usize, mask: u64, kappa: usize) -> RbdsInstance {
    let edges = (0..nb)
        .flat_map(|b| (0..nr).map(move |x| (b, x)))
        .enumerate()
        .filter(|&(i, _)| mask & (1 << i) != 0)
        .map(|(_, e)| e)
        .collect();
    RbdsInstance::anonymous(nr, nb, edges, kappa).expect("well-formed enumeration")
}

/// Runs the reduction on every small instance and compares the reduced
/// instance's answer, found by an exact solver, with brute-force RBDS.
/// For yes-instances the image of the dominating set must also solve the
/// reduced instance.
pub fn verify_reduction(
    which: ReductionId,
    max_red: usize,
    max_blue: usize,
) -> Result<VerifyReport> {
    if max_red * max_blue > 24 {
        return Err(Error::CapExceeded {
            what: "bipartite graph enumeration (edge slots)",
            size: (max_red * max_blue) as u128,
            cap: 24,
        });
    }
    let all = instances(max_red, max_blue);
    let outcomes: Vec<(RbdsInstance, Outcome)> = all
        .par_iter()
        .map(|&(nr, nb, mask, kappa)| {
            let r = instance(nr, nb, mask, kappa);
            let o = check_one(&r, which)?;
            Ok((r, o))
        })
        .collect::<Result<_>>()?;

    let mut report = VerifyReport::default();
    for (r, o) in outcomes {
        match o {
            Outcome::Filtered => report.filtered += 1,
            Outcome::Skipped => report.skipped += 1,
            Outcome::Checked {
                rbds_yes,
                reduced_yes,
                certificate_ok,
            } => {
                report.checked += 1;
                if rbds_yes {
                    report.yes += 1;
                } else {
                    report.no += 1;
                }
                let mismatch = rbds_yes != reduced_yes;
                let bad_cert = certificate_ok == Some(false);
                report.discrepancies += u64::from(mismatch);
                report.certificate_failures += u64::from(bad_cert);
                if (mismatch || bad_cert) && report.first_counterexample.is_none() {
                    report.first_counterexample = Some(Counterexample {
                        instance: r,
                        rbds_yes,
                        reduced_yes,
                        certificate_ok,
                    });
                }
            }
        }
    }
    Ok(report)
}
