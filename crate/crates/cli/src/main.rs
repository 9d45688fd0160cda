//! `tsmr`: command-line access to the solvers, file formats and reduction
//! checks of the `tsmr` library.
//!
//! Exit codes: 0 yes/success, 1 no/infeasible, 2 usage or parse error,
//! 3 cap exceeded, 4 a witness failed its own re-verification.

mod report;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use itertools::Itertools;

use tsmr::control::{
    solve_exact_with_cap, solve_with_cap, Budgets, ControlInstance, ControlSolution, Variant,
    EXACT_CAP,
};
use tsmr::format::{parse_rbds, rbds_to_text, vote_line, ElectionFile};
use tsmr::partial::{
    necessary_counterexample, possible_winner_exact, possible_winner_p_last, Completion,
    PartialAgenda, PartialElection, DEFAULT_COMPLETION_BUDGET,
};
use tsmr::reductions::{
    normalize_rbds, reduce, verify_reduction, RbdsInstance, Reduced, ReductionId, Target,
};
use tsmr::strategy::{agenda_control, coalition_manipulation};
use tsmr::{tsmr_winner, Agenda, CandidateId, Election, Roster, Rule, Vote};

use report::RunReport;

/// `8!`: the default limit on agendas enumerated by `winner --all-agendas`.
const ALL_AGENDAS_CAP: u128 = 40_320;

#[derive(Parser)]
#[command(
    name = "tsmr",
    version,
    about = "Sequential voting under the two-stage majoritarian rule"
)]
struct Cli {
    /// Print the report as one JSON object
    #[arg(long, global = true)]
    json: bool,

    /// Override the size limit of exhaustive searches
    #[arg(long, global = true, value_name = "N")]
    cap: Option<u128>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Winner of the election under its agenda
    Winner {
        #[arg(long, default_value = "tsmr", value_parser = parse_with::<Rule>)]
        rule: Rule,
        /// Report the winner under every agenda instead
        #[arg(long)]
        all_agendas: bool,
        file: PathBuf,
    },
    /// Find an agenda under which the target wins
    AgendaControl {
        #[arg(long)]
        target: Option<String>,
        file: PathBuf,
    },
    /// Can k voters casting one ballot make the target win?
    Manipulate {
        #[arg(long)]
        target: Option<String>,
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        file: PathBuf,
    },
    /// Solve a control problem
    Control {
        #[arg(long, value_parser = parse_with::<Variant>)]
        variant: Variant,
        #[arg(long)]
        target: Option<String>,
        /// Budget for the variant's operation; defaults to the file's budgets
        #[arg(short)]
        k: Option<usize>,
        /// Use the exhaustive solver even when a polynomial one applies
        #[arg(long)]
        exact: bool,
        file: PathBuf,
    },
    /// Is the target a possible winner of the partial election?
    Possible {
        #[arg(long)]
        target: Option<String>,
        /// Maximum number of completions to enumerate
        #[arg(long)]
        budget: Option<u128>,
        file: PathBuf,
    },
    /// Is the target a necessary winner of the partial election?
    Necessary {
        #[arg(long)]
        target: Option<String>,
        file: PathBuf,
    },
    /// Compile a Red-Blue Dominating Set instance into an election instance
    Reduce {
        #[arg(long, value_parser = parse_with::<ReductionId>)]
        theorem: ReductionId,
        /// Pad red degrees to a common value first
        #[arg(long)]
        normalize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Check a reduction on every small RBDS instance
    VerifyReduction {
        #[arg(long, value_parser = parse_with::<ReductionId>)]
        theorem: ReductionId,
        #[arg(long, default_value_t = 3)]
        max_red: usize,
        #[arg(long, default_value_t = 4)]
        max_blue: usize,
    },
    /// Check a file and report tied pairs
    Lint {
        /// Also print the file in canonical form
        #[arg(long)]
        canonical: bool,
        file: PathBuf,
    },
}

fn parse_with<T: std::str::FromStr<Err = tsmr::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: tsmr::Error| e.to_string())
}

enum Failure {
    Usage(String),
    Cap(String),
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Cap(m) | Failure::Internal(m) => m,
        }
    }
}

type Outcome = Result<RunReport, Failure>;

/// Attaches the file name (and line, for parse errors) to a library error.
fn at(path: &Path) -> impl Fn(tsmr::Error) -> Failure + '_ {
    move |e| {
        let path = path.display();
        match e {
            tsmr::Error::Parse { line, msg } => Failure::Usage(format!("{path}:{line}: {msg}")),
            e if e.is_cap() => Failure::Cap(format!("{path}: {e}")),
            e => Failure::Usage(format!("{path}: {e}")),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ElectionFile, Failure> {
    ElectionFile::parse(&read(path)?).map_err(at(path))
}

fn check(ok: bool, what: &str) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Internal(format!("{what} failed re-verification")))
    }
}

fn target(ef: &ElectionFile, label: Option<&str>, path: &Path) -> Result<CandidateId, Failure> {
    match label {
        Some(l) => ef
            .roster
            .id(l)
            .ok_or_else(|| Failure::Usage(format!("{}: unknown candidate {l:?}", path.display()))),
        None => ef
            .distinguished
            .ok_or_else(|| Failure::Usage(format!("{}: target required", path.display()))),
    }
}

fn vote_copies(votes: &[Vote]) -> u64 {
    votes.iter().map(|v| u64::from(v.multiplicity())).sum()
}

fn completion_lines(roster: &Roster, c: &Completion) -> Vec<String> {
    let mut lines = vec![format!("agenda: {}", roster.format_list(c.agenda.order()))];
    lines.extend(c.votes.iter().map(|v| vote_line("vote", roster, v)));
    lines
}

fn budgets_text(b: Budgets) -> String {
    format!("av={} dv={} ac={} dc={}", b.av, b.dv, b.ac, b.dc)
}

fn verdict(yes: bool, word: &str, negated: &str) -> (String, u8) {
    if yes {
        (word.to_string(), 0)
    } else {
        (negated.to_string(), 1)
    }
}

struct Ctx {
    command: String,
    cap: Option<u128>,
}

fn winner(ctx: &Ctx, rule: Rule, all: bool, path: &Path) -> Outcome {
    let ef = load(path)?;
    let e = ef.election().map_err(at(path))?;
    let roster = e.roster();
    let m = e.candidate_count();
    if all {
        let count = (1..=m as u128).product::<u128>();
        let cap = ctx.cap.unwrap_or(ALL_AGENDAS_CAP);
        if count > cap {
            return Err(Failure::Cap(format!(
                "{}: agenda enumeration: size {count} exceeds cap {cap}",
                path.display()
            )));
        }
        let mut winners = BTreeSet::new();
        let mut rows = Vec::new();
        for order in roster.ids().permutations(m) {
            let a = Agenda::new(order, m).expect("permutation");
            let w = rule.winner(&e, &a).map_err(at(path))?;
            winners.insert(w);
            rows.push((roster.format_list(a.order()), roster.label(w).to_string()));
        }
        let ids: Vec<CandidateId> = winners.into_iter().collect();
        let mut r = RunReport::new(ctx.command.clone(), roster.format_list(&ids), 0);
        r.info("rule", rule.as_str()).info("agendas", rows.len());
        for (agenda, w) in rows {
            r.info(&format!("agenda {agenda}"), w);
        }
        r.stats(m, e.vote_count(), None);
        return Ok(r);
    }
    let a = ef.agenda().map_err(at(path))?;
    let w = rule.winner(&e, &a).map_err(at(path))?;
    if rule == Rule::Tsmr {
        check(tsmr_by_forward_arcs(&e, &a) == w, "winner")?;
    }
    let mut r = RunReport::new(ctx.command.clone(), roster.label(w), 0);
    r.info("rule", rule.as_str())
        .info("agenda", roster.format_list(a.order()))
        .stats(m, e.vote_count(), None);
    Ok(r)
}

/// The latest candidate without an incoming forward arc, read off the
/// majority graph.
fn tsmr_by_forward_arcs(e: &Election, a: &Agenda) -> CandidateId {
    let forward = e.majority_graph().forward(a).expect("agenda fits");
    *a.order()
        .iter()
        .rev()
        .find(|&&c| forward.in_neighbors(c).is_empty())
        .expect("the first candidate has no incoming forward arc")
}

fn agenda_control_cmd(ctx: &Ctx, label: Option<&str>, path: &Path) -> Outcome {
    let ef = load(path)?;
    let e = ef.election().map_err(at(path))?;
    let p = target(&ef, label, path)?;
    let found = agenda_control(&e, p).map_err(at(path))?;
    let (v, code) = verdict(found.is_some(), "feasible", "infeasible");
    let mut r = RunReport::new(ctx.command.clone(), v, code);
    r.info("target", e.roster().label(p))
        .stats(e.candidate_count(), e.vote_count(), None);
    if let Some(a) = found {
        check(tsmr_winner(&e, &a).map_err(at(path))? == p, "agenda")?;
        r.witness(vec![format!(
            "agenda: {}",
            e.roster().format_list(a.order())
        )]);
    }
    Ok(r)
}

fn manipulate(ctx: &Ctx, label: Option<&str>, k: u32, path: &Path) -> Outcome {
    let ef = load(path)?;
    let e = ef.election().map_err(at(path))?;
    let a = ef.agenda().map_err(at(path))?;
    let p = target(&ef, label, path)?;
    let out = coalition_manipulation(&e, p, &a, k).map_err(at(path))?;
    let (v, code) = verdict(out.feasible, "feasible", "infeasible");
    let roster = e.roster();
    let mut r = RunReport::new(ctx.command.clone(), v, code);
    r.info("target", roster.label(p))
        .info("k", k)
        .info("ballot", roster.format_ranking(&out.ballot))
        .stats(e.candidate_count(), e.vote_count(), None);
    if let Some(w) = out.witness() {
        let mut votes = e.votes().to_vec();
        votes.push(w.clone());
        let after = Election::new(roster.clone(), votes).map_err(at(path))?;
        check(
            tsmr_winner(&after, &a).map_err(at(path))? == p,
            "manipulation",
        )?;
        r.witness(vec![vote_line("vote", roster, &w)]);
    }
    Ok(r)
}

fn solution_lines(inst: &ControlInstance, sol: &ControlSolution) -> Vec<String> {
    let roster = &inst.roster;
    let picked = |keyword: &str, pool: &[Vote], sel: &[(usize, u32)]| -> Vec<String> {
        sel.iter()
            .map(|&(i, k)| {
                vote_line(
                    keyword,
                    roster,
                    &pool[i].with_multiplicity(k).expect("positive"),
                )
            })
            .collect()
    };
    let mut lines = picked("delete_vote", &inst.votes, &sol.deleted_votes);
    lines.extend(picked(
        "add_vote",
        &inst.unregistered_votes,
        &sol.added_votes,
    ));
    if !sol.deleted_candidates.is_empty() {
        lines.push(format!(
            "delete_candidates: {}",
            roster.format_list(&sol.deleted_candidates)
        ));
    }
    if !sol.added_candidates.is_empty() {
        lines.push(format!(
            "add_candidates: {}",
            roster.format_list(&sol.added_candidates)
        ));
    }
    lines
}

fn control(
    ctx: &Ctx,
    variant: Variant,
    label: Option<&str>,
    k: Option<usize>,
    exact: bool,
    path: &Path,
) -> Outcome {
    let ef = load(path)?;
    let p = target(&ef, label, path)?;
    let mut inst = ef.control_instance(Some(p)).map_err(at(path))?;
    variant.configure(&mut inst, k);
    let cap = ctx.cap.unwrap_or(EXACT_CAP);
    let (sol, method) = if exact {
        inst.validate().map_err(at(path))?;
        (solve_exact_with_cap(&inst, cap).map_err(at(path))?, "exact")
    } else {
        let (sol, m) = solve_with_cap(&inst, variant, cap).map_err(at(path))?;
        (sol, m.as_str())
    };
    let (v, code) = verdict(sol.is_some(), "feasible", "infeasible");
    let mut r = RunReport::new(ctx.command.clone(), v, code);
    r.info("variant", variant.as_str())
        .info("target", inst.roster.label(p))
        .info("method", method)
        .stats(
            inst.candidate_count(),
            vote_copies(&inst.votes),
            Some(budgets_text(inst.budgets)),
        );
    if let Some(sol) = sol {
        check(inst.verify(&sol).map_err(at(path))?, "control solution")?;
        r.info("modifications", sol.size());
        r.witness(solution_lines(&inst, &sol));
    }
    Ok(r)
}

fn partial_inputs(
    path: &Path,
    label: Option<&str>,
) -> Result<(PartialElection, PartialAgenda, CandidateId), Failure> {
    let ef = load(path)?;
    let p = target(&ef, label, path)?;
    let pe = ef.partial_election().map_err(at(path))?;
    let pa = ef.partial_agenda().map_err(at(path))?;
    Ok((pe, pa, p))
}

fn pe_copies(pe: &PartialElection) -> u64 {
    pe.votes().iter().map(|v| u64::from(v.multiplicity)).sum()
}

fn possible(ctx: &Ctx, label: Option<&str>, budget: Option<u128>, path: &Path) -> Outcome {
    let (pe, pa, p) = partial_inputs(path, label)?;
    let p_last = pa.as_ranking().is_some_and(|o| o.last() == Some(&p));
    let (found, method) = if p_last {
        (
            possible_winner_p_last(&pe, &pa, p).map_err(at(path))?,
            "p-last",
        )
    } else {
        let budget = ctx.cap.or(budget).unwrap_or(DEFAULT_COMPLETION_BUDGET);
        (
            possible_winner_exact(&pe, &pa, p, budget).map_err(at(path))?,
            "exact",
        )
    };
    let (v, code) = verdict(found.is_some(), "yes", "no");
    let roster = pe.roster();
    let mut r = RunReport::new(ctx.command.clone(), v, code);
    r.info("target", roster.label(p))
        .info("method", method)
        .stats(pe.candidate_count(), pe_copies(&pe), None);
    if let Some(c) = found {
        check(
            c.extends(&pe, &pa) && c.winner(roster).map_err(at(path))? == p,
            "completion",
        )?;
        r.witness(completion_lines(roster, &c));
    }
    Ok(r)
}

fn necessary(ctx: &Ctx, label: Option<&str>, path: &Path) -> Outcome {
    let (pe, pa, p) = partial_inputs(path, label)?;
    let counter = necessary_counterexample(&pe, &pa, p).map_err(at(path))?;
    let (v, code) = verdict(counter.is_none(), "yes", "no");
    let roster = pe.roster();
    let mut r = RunReport::new(ctx.command.clone(), v, code);
    r.info("target", roster.label(p))
        .stats(pe.candidate_count(), pe_copies(&pe), None);
    if let Some(c) = counter {
        let w = c.winner(roster).map_err(at(path))?;
        check(c.extends(&pe, &pa) && w != p, "counterexample")?;
        r.info("winner", roster.label(w));
        r.witness(completion_lines(roster, &c));
    }
    Ok(r)
}

fn rbds_file(path: &Path) -> Result<RbdsInstance, Failure> {
    parse_rbds(&read(path)?).map_err(at(path))
}

fn reduce_cmd(
    ctx: &Ctx,
    which: ReductionId,
    normalize: bool,
    output: Option<&Path>,
    path: &Path,
) -> Outcome {
    let mut rbds = rbds_file(path)?;
    if normalize {
        rbds = normalize_rbds(&rbds).map_err(at(path))?;
    }
    let out = reduce(&rbds, which).map_err(at(path))?;
    let (file, stats) = match &out.instance {
        Reduced::Control(inst) => (
            ElectionFile::from_control(inst).map_err(at(path))?,
            (
                inst.candidate_count(),
                vote_copies(&inst.votes),
                Some(budgets_text(inst.budgets)),
            ),
        ),
        Reduced::Possible {
            election,
            agenda,
            distinguished,
        } => (
            ElectionFile::from_partial(election, agenda, *distinguished),
            (election.candidate_count(), pe_copies(election), None),
        ),
    };
    let text = file.to_text();
    let target = match which.target() {
        Target::Control(v) => v.as_str(),
        Target::PossibleWinner => "possible-winner",
    };
    let mut r = RunReport::new(ctx.command.clone(), "ok", 0);
    r.info("theorem", which.as_str())
        .info("target", target)
        .info("red", rbds.red().len())
        .info("blue", rbds.blue().len())
        .info("kappa", rbds.kappa())
        .stats(stats.0, stats.1, stats.2);
    match output {
        Some(o) => {
            fs::write(o, &text).map_err(|e| Failure::Usage(format!("{}: {e}", o.display())))?;
            r.info("output", o.display().to_string());
        }
        None => {
            r.witness(text.lines().map(str::to_string).collect());
        }
    }
    Ok(r)
}

fn verify_cmd(ctx: &Ctx, which: ReductionId, max_red: usize, max_blue: usize) -> Outcome {
    let report = verify_reduction(which, max_red, max_blue).map_err(|e| {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    })?;
    let (v, code) = if !report.passed() {
        ("fail", 1)
    } else if report.incomplete() {
        ("incomplete", 3)
    } else {
        ("pass", 0)
    };
    let mut r = RunReport::new(ctx.command.clone(), v, code);
    r.info("theorem", which.as_str())
        .info("max_red", max_red)
        .info("max_blue", max_blue)
        .info("checked", report.checked)
        .info("filtered", report.filtered)
        .info("yes", report.yes)
        .info("no", report.no)
        .info("discrepancies", report.discrepancies)
        .info("certificate_failures", report.certificate_failures)
        .info("skipped", report.skipped);
    if let Some(c) = report.first_counterexample {
        r.info("rbds_yes", c.rbds_yes)
            .info("reduced_yes", c.reduced_yes);
        r.witness(
            rbds_to_text(&c.instance)
                .lines()
                .map(str::to_string)
                .collect(),
        );
    }
    Ok(r)
}

fn lint(ctx: &Ctx, canonical: bool, path: &Path) -> Outcome {
    let mut r = RunReport::new(ctx.command.clone(), "ok", 0);
    if path.extension().is_some_and(|x| x == "rbds") {
        let rbds = rbds_file(path)?;
        let regular = match rbds.red_regularity() {
            Some(d) => d.to_string(),
            None => "no".to_string(),
        };
        r.info("kind", "rbds")
            .info("red", rbds.red().len())
            .info("blue", rbds.blue().len())
            .info("edges", rbds.edges().len())
            .info("kappa", rbds.kappa())
            .info("isolated_vertex", rbds.has_isolated_vertex())
            .info("red_regular", regular);
        if canonical {
            r.witness(rbds_to_text(&rbds).lines().map(str::to_string).collect());
        }
        return Ok(r);
    }
    let ef = load(path)?;
    let kind = if ef.budgets.is_some() || ef.mode.is_some() || ef.unregistered > 0 {
        let inst = ef.control_instance(None).map_err(at(path))?;
        inst.validate().map_err(at(path))?;
        "control"
    } else if ef.election().is_ok() {
        "election"
    } else {
        ef.partial_election().map_err(at(path))?;
        ef.partial_agenda().map_err(at(path))?;
        "partial"
    };
    let agenda = match (ef.agenda.is_some(), ef.agenda()) {
        (false, _) => "none",
        (true, Ok(_)) => "total",
        (true, Err(_)) => "partial",
    };
    r.info("kind", kind)
        .info("candidates", ef.roster.len())
        .info("unregistered", ef.unregistered)
        .info("agenda", agenda);
    if let Ok(e) = ef.election() {
        let ties: Vec<String> = e
            .tally()
            .tied_pairs()
            .into_iter()
            .map(|(a, b)| format!("{}={}", e.roster().label(a), e.roster().label(b)))
            .collect();
        r.info("tied_pairs", ties);
        r.stats(e.candidate_count(), e.vote_count(), None);
    }
    if canonical {
        r.witness(ef.to_text().lines().map(str::to_string).collect());
    }
    Ok(r)
}

fn run(cli: &Cli, ctx: &Ctx) -> Outcome {
    match &cli.command {
        Command::Winner {
            rule,
            all_agendas,
            file,
        } => winner(ctx, *rule, *all_agendas, file),
        Command::AgendaControl { target, file } => agenda_control_cmd(ctx, target.as_deref(), file),
        Command::Manipulate { target, k, file } => manipulate(ctx, target.as_deref(), *k, file),
        Command::Control {
            variant,
            target,
            k,
            exact,
            file,
        } => control(ctx, *variant, target.as_deref(), *k, *exact, file),
        Command::Possible {
            target,
            budget,
            file,
        } => possible(ctx, target.as_deref(), *budget, file),
        Command::Necessary { target, file } => necessary(ctx, target.as_deref(), file),
        Command::Reduce {
            theorem,
            normalize,
            output,
            file,
        } => reduce_cmd(ctx, *theorem, *normalize, output.as_deref(), file),
        Command::VerifyReduction {
            theorem,
            max_red,
            max_blue,
        } => verify_cmd(ctx, *theorem, *max_red, *max_blue),
        Command::Lint { canonical, file } => lint(ctx, *canonical, file),
    }
}

fn configure_threads() {
    if let Some(n) = tsmr::threads_from_env() {
        // rayon reads 0 as "pick for me"; here it means sequential
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    if let Some(cap) = cli.cap {
        eprintln!(
            "warning: size cap overridden to {cap}; exhaustive searches may run for a long time"
        );
    }
    let ctx = Ctx {
        command: std::env::args().skip(1).join(" "),
        cap: cli.cap,
    };
    let start = Instant::now();
    match run(&cli, &ctx) {
        Ok(mut report) => {
            report.elapsed(start.elapsed());
            if cli.json {
                println!("{}", report.to_json());
            } else {
                println!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
