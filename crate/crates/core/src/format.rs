//! Line-oriented text formats for elections, control instances, partial
//! elections and RBDS instances.
//!
//! One statement per line, `#` starts a comment:
//!
//! ```text
//! candidates: a b c d
//! agenda: a b c d
//! vote 3: b > d > c > a
//! pvote 1: b > d, c > a
//! distinguished: a
//! ```
//!
//! Control instances add `unregistered_candidates:`, `uvote N:`,
//! `budgets: av=1 dv=0 ac=0 dc=0` and `mode: constructive|destructive`.
//! Serialization is canonical: parsing the output of [`ElectionFile::to_text`]
//! yields the same document.

use std::fmt::Write as _;

use crate::control::{Budgets, ControlInstance, Mode};
use crate::error::{Error, Result};
use crate::model::{Agenda, CandidateId, Election, Roster, Vote};
use crate::order::PartialOrder;
use crate::partial::{PartialAgenda, PartialElection, PartialVote};
use crate::reductions::RbdsInstance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgendaSpec {
    Total(Vec<CandidateId>),
    Partial(PartialOrder),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ballot {
    Complete(Vote),
    Partial(PartialVote),
}

/// A parsed election file. Candidate ids number the registered candidates
/// first, then the unregistered ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElectionFile {
    pub roster: Roster,
    pub unregistered: usize,
    pub agenda: Option<AgendaSpec>,
    pub votes: Vec<Ballot>,
    pub unregistered_votes: Vec<Vote>,
    pub distinguished: Option<CandidateId>,
    pub budgets: Option<Budgets>,
    pub mode: Option<Mode>,
}

struct Statement<'a> {
    line: usize,
    key: &'a str,
    multiplicity: Option<&'a str>,
    body: &'a str,
}

fn statements(text: &str) -> Result<Vec<Statement<'_>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, body) = content
            .split_once(':')
            .ok_or_else(|| Error::parse(line, "expected `keyword: ...`"))?;
        let mut words = head.split_whitespace();
        let key = words
            .next()
            .ok_or_else(|| Error::parse(line, "missing keyword"))?;
        let multiplicity = words.next();
        if words.next().is_some() {
            return Err(Error::parse(
                line,
                format!("unexpected text before ':' in {head:?}"),
            ));
        }
        out.push(Statement {
            line,
            key,
            multiplicity,
            body: body.trim(),
        });
    }
    Ok(out)
}

fn lookup(roster: &Roster, line: usize, label: &str) -> Result<CandidateId> {
    roster
        .id(label)
        .ok_or_else(|| Error::parse(line, format!("unknown candidate {label:?}")))
}

fn parse_chain(roster: &Roster, line: usize, text: &str) -> Result<Vec<CandidateId>> {
    text.split('>')
        .map(|l| lookup(roster, line, l.trim()))
        .collect()
}

fn parse_ranking(roster: &Roster, line: usize, text: &str) -> Result<Vec<CandidateId>> {
    let ranking = parse_chain(roster, line, text)?;
    crate::model::check_permutation(&ranking, roster.len())
        .map_err(|e| Error::parse(line, format!("vote must rank every candidate once ({e})")))?;
    Ok(ranking)
}

fn parse_partial(roster: &Roster, line: usize, text: &str) -> Result<PartialOrder> {
    let chains = if text.is_empty() {
        Vec::new()
    } else {
        text.split(',')
            .map(|c| parse_chain(roster, line, c))
            .collect::<Result<Vec<_>>>()?
    };
    PartialOrder::from_chains(roster.len(), &chains).map_err(|e| Error::parse(line, e.to_string()))
}

fn parse_multiplicity(s: &Statement) -> Result<u32> {
    match s.multiplicity {
        None => Ok(1),
        Some(text) => match text.parse::<u32>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(Error::parse(
                s.line,
                format!("invalid multiplicity {text:?}"),
            )),
        },
    }
}

fn parse_budgets(line: usize, text: &str) -> Result<Budgets> {
    let mut b = Budgets::default();
    for item in text.split_whitespace() {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, got {item:?}")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid budget value {value:?}")))?;
        match key {
            "av" => b.av = value,
            "dv" => b.dv = value,
            "ac" => b.ac = value,
            "dc" => b.dc = value,
            _ => return Err(Error::parse(line, format!("unknown budget {key:?}"))),
        }
    }
    Ok(b)
}

impl ElectionFile {
    pub fn parse(text: &str) -> Result<Self> {
        let stmts = statements(text)?;
        let mut registered: Option<Vec<String>> = None;
        let mut unregistered: Vec<String> = Vec::new();
        let mut seen_unregistered = false;
        for s in &stmts {
            match s.key {
                "candidates" => {
                    if registered.is_some() {
                        return Err(Error::parse(s.line, "duplicate candidates statement"));
                    }
                    registered = Some(s.body.split_whitespace().map(str::to_owned).collect());
                }
                "unregistered_candidates" => {
                    if seen_unregistered {
                        return Err(Error::parse(
                            s.line,
                            "duplicate unregistered_candidates statement",
                        ));
                    }
                    seen_unregistered = true;
                    unregistered = s.body.split_whitespace().map(str::to_owned).collect();
                }
                _ => {}
            }
        }
        let registered =
            registered.ok_or_else(|| Error::parse(1, "missing candidates statement"))?;
        let line_of = |key: &str| stmts.iter().find(|s| s.key == key).map_or(1, |s| s.line);
        let n_unregistered = unregistered.len();
        let roster = Roster::new(registered.into_iter().chain(unregistered))
            .map_err(|e| Error::parse(line_of("candidates"), e.to_string()))?;

        let mut doc = ElectionFile {
            roster,
            unregistered: n_unregistered,
            agenda: None,
            votes: Vec::new(),
            unregistered_votes: Vec::new(),
            distinguished: None,
            budgets: None,
            mode: None,
        };
        for s in &stmts {
            let roster = &doc.roster;
            match s.key {
                "candidates" | "unregistered_candidates" => {}
                "agenda" | "pagenda" => {
                    if doc.agenda.is_some() {
                        return Err(Error::parse(
                            s.line,
                            "only one agenda or pagenda statement is allowed",
                        ));
                    }
                    doc.agenda = Some(if s.key == "agenda" {
                        let order: Vec<CandidateId> = s
                            .body
                            .split_whitespace()
                            .map(|l| lookup(roster, s.line, l))
                            .collect::<Result<_>>()?;
                        crate::model::check_permutation(&order, roster.len()).map_err(|e| {
                            Error::parse(
                                s.line,
                                format!("agenda must list every candidate once ({e})"),
                            )
                        })?;
                        AgendaSpec::Total(order)
                    } else {
                        AgendaSpec::Partial(parse_partial(roster, s.line, s.body)?)
                    });
                }
                "vote" | "uvote" => {
                    let k = parse_multiplicity(s)?;
                    let vote = Vote::new(parse_ranking(roster, s.line, s.body)?, k)?;
                    if s.key == "vote" {
                        doc.votes.push(Ballot::Complete(vote));
                    } else {
                        doc.unregistered_votes.push(vote);
                    }
                }
                "pvote" => {
                    let k = parse_multiplicity(s)?;
                    let order = parse_partial(roster, s.line, s.body)?;
                    doc.votes.push(Ballot::Partial(PartialVote::new(order, k)?));
                }
                "distinguished" => {
                    doc.distinguished = Some(lookup(roster, s.line, s.body)?);
                }
                "budgets" => doc.budgets = Some(parse_budgets(s.line, s.body)?),
                "mode" => {
                    doc.mode = Some(
                        s.body
                            .parse()
                            .map_err(|e: Error| Error::parse(s.line, e.to_string()))?,
                    )
                }
                other => {
                    return Err(Error::parse(s.line, format!("unknown statement {other:?}")));
                }
            }
            if s.multiplicity.is_some() && !matches!(s.key, "vote" | "pvote" | "uvote") {
                return Err(Error::parse(s.line, format!("{} takes no count", s.key)));
            }
        }
        Ok(doc)
    }

    pub fn registered_count(&self) -> usize {
        self.roster.len() - self.unregistered
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let r = &self.roster;
        let mut out = String::new();
        let (reg, unreg) = r.labels().split_at(self.registered_count());
        let _ = writeln!(out, "candidates: {}", reg.join(" "));
        if self.unregistered > 0 {
            let _ = writeln!(out, "unregistered_candidates: {}", unreg.join(" "));
        }
        match &self.agenda {
            Some(AgendaSpec::Total(order)) => {
                let _ = writeln!(out, "agenda: {}", r.format_list(order));
            }
            Some(AgendaSpec::Partial(po)) => {
                let _ = writeln!(out, "{}", partial_line("pagenda", None, r, po));
            }
            None => {}
        }
        for b in &self.votes {
            let line = match b {
                Ballot::Complete(v) => vote_line("vote", r, v),
                Ballot::Partial(v) => partial_line("pvote", Some(v.multiplicity), r, &v.order),
            };
            let _ = writeln!(out, "{line}");
        }
        for v in &self.unregistered_votes {
            let _ = writeln!(out, "{}", vote_line("uvote", r, v));
        }
        if let Some(p) = self.distinguished {
            let _ = writeln!(out, "distinguished: {}", r.label(p));
        }
        if let Some(b) = self.budgets {
            let _ = writeln!(
                out,
                "budgets: av={} dv={} ac={} dc={}",
                b.av, b.dv, b.ac, b.dc
            );
        }
        if let Some(m) = self.mode {
            let _ = writeln!(out, "mode: {}", m.as_str());
        }
        out
    }

    /// The complete agenda; an error when it is missing or partial.
    pub fn agenda(&self) -> Result<Agenda> {
        match &self.agenda {
            Some(AgendaSpec::Total(order)) => Agenda::new(order.clone(), self.roster.len()),
            Some(AgendaSpec::Partial(po)) => po
                .as_ranking()
                .map(|o| Agenda::new(o, self.roster.len()).expect("total order"))
                .ok_or_else(|| Error::invalid("agenda is only partially specified")),
            None => Err(Error::invalid("agenda required")),
        }
    }

    /// The partial agenda; a missing agenda imposes no constraints.
    pub fn partial_agenda(&self) -> Result<PartialAgenda> {
        match &self.agenda {
            Some(AgendaSpec::Total(order)) => PartialOrder::from_ranking(order),
            Some(AgendaSpec::Partial(po)) => Ok(po.clone()),
            None => Ok(PartialOrder::empty(self.roster.len())),
        }
    }

    /// The election of complete votes over all candidates.
    pub fn election(&self) -> Result<Election> {
        if self.unregistered > 0 || !self.unregistered_votes.is_empty() {
            return Err(Error::invalid(
                "unregistered candidates or votes only make sense for control",
            ));
        }
        let votes = self
            .votes
            .iter()
            .map(|b| match b {
                Ballot::Complete(v) => Ok(v.clone()),
                Ballot::Partial(pv) => pv
                    .order
                    .as_ranking()
                    .map(|r| Vote::new(r, pv.multiplicity).expect("positive"))
                    .ok_or_else(|| Error::invalid("election contains partial votes")),
            })
            .collect::<Result<Vec<_>>>()?;
        Election::new(self.roster.clone(), votes)
    }

    pub fn partial_election(&self) -> Result<PartialElection> {
        if self.unregistered > 0 || !self.unregistered_votes.is_empty() {
            return Err(Error::invalid(
                "unregistered candidates or votes only make sense for control",
            ));
        }
        let votes = self
            .votes
            .iter()
            .map(|b| match b {
                Ballot::Complete(v) => PartialVote::from_vote(v),
                Ballot::Partial(pv) => pv.clone(),
            })
            .collect();
        PartialElection::new(self.roster.clone(), votes)
    }

    /// The control instance described by the file. `target` overrides the
    /// `distinguished` statement; missing budgets are zero and the mode
    /// defaults to constructive.
    pub fn control_instance(&self, target: Option<CandidateId>) -> Result<ControlInstance> {
        let votes = self
            .votes
            .iter()
            .map(|b| match b {
                Ballot::Complete(v) => Ok(v.clone()),
                Ballot::Partial(_) => Err(Error::invalid("control instances need complete votes")),
            })
            .collect::<Result<Vec<_>>>()?;
        let distinguished = target
            .or(self.distinguished)
            .ok_or_else(|| Error::invalid("target required"))?;
        let inst = ControlInstance {
            roster: self.roster.clone(),
            unregistered_candidates: (self.registered_count()..self.roster.len())
                .map(CandidateId)
                .collect(),
            votes,
            unregistered_votes: self.unregistered_votes.clone(),
            distinguished,
            agenda: self.agenda()?,
            budgets: self.budgets.unwrap_or_default(),
            mode: self.mode.unwrap_or(Mode::Constructive),
        };
        Ok(inst)
    }

    pub fn from_election(e: &Election, agenda: Option<&Agenda>) -> Self {
        ElectionFile {
            roster: e.roster().clone(),
            unregistered: 0,
            agenda: agenda.map(|a| AgendaSpec::Total(a.order().to_vec())),
            votes: e.votes().iter().cloned().map(Ballot::Complete).collect(),
            unregistered_votes: Vec::new(),
            distinguished: None,
            budgets: None,
            mode: None,
        }
    }

    /// The file for a control instance. Unregistered candidates must carry
    /// the highest ids, as they do in parsed files.
    pub fn from_control(inst: &ControlInstance) -> Result<Self> {
        let m = inst.roster.len();
        let d = inst.unregistered_candidates.len();
        if inst
            .unregistered_candidates
            .iter()
            .enumerate()
            .any(|(i, c)| c.0 != m - d + i)
        {
            return Err(Error::invalid(
                "unregistered candidates must follow the registered ones",
            ));
        }
        Ok(ElectionFile {
            roster: inst.roster.clone(),
            unregistered: d,
            agenda: Some(AgendaSpec::Total(inst.agenda.order().to_vec())),
            votes: inst.votes.iter().cloned().map(Ballot::Complete).collect(),
            unregistered_votes: inst.unregistered_votes.clone(),
            distinguished: Some(inst.distinguished),
            budgets: Some(inst.budgets),
            mode: Some(inst.mode),
        })
    }

    /// The file for a partial election; total votes become `vote` lines.
    pub fn from_partial(pe: &PartialElection, pa: &PartialAgenda, p: CandidateId) -> Self {
        let agenda = match pa.as_ranking() {
            Some(order) => AgendaSpec::Total(order),
            None => AgendaSpec::Partial(pa.clone()),
        };
        ElectionFile {
            roster: pe.roster().clone(),
            unregistered: 0,
            agenda: Some(agenda),
            votes: pe
                .votes()
                .iter()
                .map(|v| match v.order.as_ranking() {
                    Some(r) => Ballot::Complete(Vote::new(r, v.multiplicity).expect("positive")),
                    None => Ballot::Partial(v.clone()),
                })
                .collect(),
            unregistered_votes: Vec::new(),
            distinguished: Some(p),
            budgets: None,
            mode: None,
        }
    }
}

/// `keyword N: a > b > c`.
pub fn vote_line(keyword: &str, roster: &Roster, v: &Vote) -> String {
    format!(
        "{keyword} {}: {}",
        v.multiplicity(),
        roster.format_ranking(v.ranking())
    )
}

fn partial_line(keyword: &str, k: Option<u32>, roster: &Roster, po: &PartialOrder) -> String {
    let pairs = po
        .cover_pairs()
        .into_iter()
        .map(|(a, b)| format!("{} > {}", roster.label(a), roster.label(b)))
        .collect::<Vec<_>>()
        .join(", ");
    let head = match k {
        Some(k) => format!("{keyword} {k}:"),
        None => format!("{keyword}:"),
    };
    if pairs.is_empty() {
        head
    } else {
        format!("{head} {pairs}")
    }
}

/// Parses `red:`, `blue:`, `edge: <blue> <red>` and `kappa:` statements.
pub fn parse_rbds(text: &str) -> Result<RbdsInstance> {
    let stmts = statements(text)?;
    let mut red = None;
    let mut blue = None;
    let mut kappa = None;
    for s in &stmts {
        let words = || {
            s.body
                .split_whitespace()
                .map(str::to_owned)
                .collect::<Vec<_>>()
        };
        match s.key {
            "red" if red.is_none() => red = Some(words()),
            "blue" if blue.is_none() => blue = Some(words()),
            "kappa" if kappa.is_none() => {
                kappa = Some(
                    s.body
                        .parse::<usize>()
                        .map_err(|_| Error::parse(s.line, format!("invalid kappa {:?}", s.body)))?,
                )
            }
            "red" | "blue" | "kappa" => {
                return Err(Error::parse(
                    s.line,
                    format!("duplicate {} statement", s.key),
                ))
            }
            "edge" => {}
            other => return Err(Error::parse(s.line, format!("unknown statement {other:?}"))),
        }
    }
    let red = red.ok_or_else(|| Error::parse(1, "missing red statement"))?;
    let blue = blue.ok_or_else(|| Error::parse(1, "missing blue statement"))?;
    let kappa = kappa.ok_or_else(|| Error::parse(1, "missing kappa statement"))?;
    let mut edges = Vec::new();
    for s in stmts.iter().filter(|s| s.key == "edge") {
        let ends: Vec<&str> = s.body.split_whitespace().collect();
        let [b, r] = ends[..] else {
            return Err(Error::parse(s.line, "expected `edge: <blue> <red>`"));
        };
        let bi = blue
            .iter()
            .position(|x| x == b)
            .ok_or_else(|| Error::parse(s.line, format!("unknown blue vertex {b:?}")))?;
        let ri = red
            .iter()
            .position(|x| x == r)
            .ok_or_else(|| Error::parse(s.line, format!("unknown red vertex {r:?}")))?;
        edges.push((bi, ri));
    }
    RbdsInstance::new(red, blue, edges, kappa)
}

pub fn rbds_to_text(r: &RbdsInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "red: {}", r.red().join(" "));
    let _ = writeln!(out, "blue: {}", r.blue().join(" "));
    for &(b, x) in r.edges() {
        let _ = writeln!(out, "edge: {} {}", r.blue()[b], r.red()[x]);
    }
    let _ = writeln!(out, "kappa: {}", r.kappa());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = "\
candidates: a b c d
agenda: a b c d   # priority order
vote: b > d > c > a
vote 1: c > a > b > d
vote 1: a > d > b > c
";

    #[test]
    fn parses_example1() {
        let doc = ElectionFile::parse(EXAMPLE1).unwrap();
        let e = doc.election().unwrap();
        assert_eq!(e, crate::fixtures::example1());
        assert_eq!(doc.agenda().unwrap(), Agenda::identity(4));
    }

    #[test]
    fn canonical_round_trip() {
        let doc = ElectionFile::parse(EXAMPLE1).unwrap();
        let text = doc.to_text();
        assert!(text.starts_with("candidates: a b c d\nagenda: a b c d\nvote 1: b > d > c > a\n"));
        assert_eq!(ElectionFile::parse(&text).unwrap(), doc);
    }

    #[test]
    fn control_sections() {
        let text = "\
candidates: a b
unregistered_candidates: e
agenda: a e b
vote 2: a > b > e
uvote 1: e > b > a
distinguished: b
budgets: av=1 ac=1
mode: destructive
";
        let doc = ElectionFile::parse(text).unwrap();
        let inst = doc.control_instance(None).unwrap();
        assert_eq!(inst.unregistered_candidates, vec![CandidateId(2)]);
        assert_eq!(
            inst.budgets,
            Budgets {
                av: 1,
                dv: 0,
                ac: 1,
                dc: 0
            }
        );
        assert_eq!(inst.mode, Mode::Destructive);
        assert_eq!(inst.distinguished, CandidateId(1));
        let again = ElectionFile::parse(&doc.to_text()).unwrap();
        assert_eq!(again, doc);
        assert_eq!(ElectionFile::from_control(&inst).unwrap(), doc);
    }

    #[test]
    fn partial_statements() {
        let text =
            "candidates: a b c d\npagenda: a > b, c > d\npvote 2: b > d > a, c > a\npvote:\n";
        let doc = ElectionFile::parse(text).unwrap();
        let pe = doc.partial_election().unwrap();
        assert_eq!(pe.votes()[0].multiplicity, 2);
        assert!(pe.votes()[0].order.precedes(CandidateId(1), CandidateId(0)));
        assert_eq!(
            doc.agenda().unwrap_err().to_string(),
            "agenda is only partially specified"
        );
        let text = doc.to_text();
        assert!(text.contains("pvote 2: b > d, c > a, d > a\n"));
        assert!(text.contains("pvote 1:\n"));
        assert_eq!(ElectionFile::parse(&text).unwrap(), doc);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("candidates: a b\nvote 1: a > c\n", 2),
            ("candidates: a b\nvote 1: a\n", 2),
            ("candidates: a b\nagenda: a b\npagenda: a > b\n", 3),
            ("candidates: a b\npvote 1: a > b, b > a\n", 2),
            ("candidates: a b\n\nvote 0: a > b\n", 3),
            ("candidates: a b\nbogus: 1\n", 2),
            ("candidates: a a\n", 1),
            ("candidates: a b\nvote 1 2: a > b\n", 2),
        ];
        for (text, line) in cases {
            match ElectionFile::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn missing_agenda() {
        let doc = ElectionFile::parse("candidates: a b\nvote: a > b\n").unwrap();
        assert_eq!(doc.agenda().unwrap_err().to_string(), "agenda required");
    }

    #[test]
    fn rbds_round_trip() {
        let text = "red: r1 r2 r3\nblue: b1 b2\nedge: b1 r1\nedge: b2 r2\nedge: b2 r3\nkappa: 1\n";
        let r = parse_rbds(text).unwrap();
        assert_eq!(r.kappa(), 1);
        assert_eq!(r.neighbors(1), vec![1, 2]);
        assert_eq!(rbds_to_text(&r), text);
        assert!(parse_rbds("red: r\nblue: b\nedge: r b\nkappa: 1\n").is_err());
    }
}
