//! Elections, votes, agendas and pairwise tallies.
//!
//! Candidates are dense indices `0..m` into a [`Roster`]; labels only matter
//! at the I/O boundary. Wherever a fixed order over a candidate set is needed
//! (for example when a construction writes "the reds in order"), ascending id
//! order is used.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateId(pub usize);

impl CandidateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Checks that `ranking` is a permutation of `0..m`.
pub(crate) fn check_permutation(ranking: &[CandidateId], m: usize) -> Result<()> {
    if ranking.len() != m {
        return Err(Error::invalid(format!(
            "ranking has {} candidates, roster has {m}",
            ranking.len()
        )));
    }
    let mut seen = vec![false; m];
    for c in ranking {
        if c.0 >= m || seen[c.0] {
            return Err(Error::invalid(format!(
                "ranking is not a permutation of the roster (offending {c})"
            )));
        }
        seen[c.0] = true;
    }
    Ok(())
}

/// Position of every candidate in a ranking.
pub(crate) fn positions(ranking: &[CandidateId]) -> Vec<usize> {
    let mut pos = vec![0; ranking.len()];
    for (i, c) in ranking.iter().enumerate() {
        pos[c.0] = i;
    }
    pos
}

pub(crate) fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && !label
            .chars()
            .any(|ch| ch.is_whitespace() || matches!(ch, '>' | ',' | ':' | '#' | '='))
}

/// The candidate list of an election. Labels are unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roster {
    labels: Vec<String>,
}

impl Roster {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, l) in labels.iter().enumerate() {
            if !valid_label(l) {
                return Err(Error::invalid(format!("invalid candidate label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::invalid(format!("duplicate candidate label {l:?}")));
            }
        }
        Ok(Roster { labels })
    }

    /// A roster labelled `c0, c1, ...`.
    pub fn anonymous(m: usize) -> Self {
        Roster {
            labels: (0..m).map(|i| format!("c{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, c: CandidateId) -> &str {
        &self.labels[c.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Option<CandidateId> {
        self.labels.iter().position(|l| l == label).map(CandidateId)
    }

    pub fn ids(&self) -> impl Iterator<Item = CandidateId> + Clone {
        (0..self.labels.len()).map(CandidateId)
    }

    /// Renders a sequence of candidates as `a > b > c`.
    pub fn format_ranking(&self, ranking: &[CandidateId]) -> String {
        ranking
            .iter()
            .map(|&c| self.label(c))
            .collect::<Vec<_>>()
            .join(" > ")
    }

    pub fn format_list(&self, ids: &[CandidateId]) -> String {
        ids.iter()
            .map(|&c| self.label(c))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A complete ranking, most preferred first, cast by `multiplicity` voters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vote {
    ranking: Vec<CandidateId>,
    multiplicity: u32,
}

impl Vote {
    pub fn new(ranking: Vec<CandidateId>, multiplicity: u32) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::invalid("vote multiplicity must be at least 1"));
        }
        Ok(Vote {
            ranking,
            multiplicity,
        })
    }

    pub fn single(ranking: Vec<CandidateId>) -> Self {
        Vote {
            ranking,
            multiplicity: 1,
        }
    }

    pub fn from_indices(ranking: &[usize], multiplicity: u32) -> Result<Self> {
        Vote::new(
            ranking.iter().copied().map(CandidateId).collect(),
            multiplicity,
        )
    }

    pub fn ranking(&self) -> &[CandidateId] {
        &self.ranking
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn with_multiplicity(&self, multiplicity: u32) -> Result<Self> {
        Vote::new(self.ranking.clone(), multiplicity)
    }

    /// Whether `a` is ranked before `b`.
    pub fn prefers(&self, a: CandidateId, b: CandidateId) -> bool {
        for &c in &self.ranking {
            if c == a {
                return true;
            }
            if c == b {
                return false;
            }
        }
        false
    }
}

/// A roster together with a multiset of complete votes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    roster: Roster,
    votes: Vec<Vote>,
}

impl Election {
    pub fn new(roster: Roster, votes: Vec<Vote>) -> Result<Self> {
        for v in &votes {
            check_permutation(&v.ranking, roster.len())?;
        }
        Ok(Election { roster, votes })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn candidate_count(&self) -> usize {
        self.roster.len()
    }

    /// Total number of voters, counting multiplicities.
    pub fn vote_count(&self) -> u64 {
        self.votes.iter().map(|v| u64::from(v.multiplicity)).sum()
    }

    pub fn tally(&self) -> PairwiseTally {
        let mut t = PairwiseTally::zero(self.candidate_count());
        for v in &self.votes {
            t.add(&v.ranking, u64::from(v.multiplicity));
        }
        t
    }

    pub fn majority_graph(&self) -> MajorityGraph {
        MajorityGraph::from_tally(&self.tally())
    }

    /// Keeps only the candidates in `keep`, preserving the order inside every
    /// vote. Surviving candidates are renumbered by ascending original id.
    pub fn restrict(&self, keep: &[CandidateId]) -> Result<Restriction> {
        let kept = normalize_keep(keep, self.candidate_count())?;
        let map = new_ids(&kept, self.candidate_count());
        let roster = Roster {
            labels: kept
                .iter()
                .map(|&c| self.roster.label(c).to_owned())
                .collect(),
        };
        let votes = self
            .votes
            .iter()
            .map(|v| Vote {
                ranking: v.ranking.iter().filter_map(|c| map[c.0]).collect(),
                multiplicity: v.multiplicity,
            })
            .collect();
        Ok(Restriction {
            election: Election { roster, votes },
            kept,
        })
    }
}

fn normalize_keep(keep: &[CandidateId], m: usize) -> Result<Vec<CandidateId>> {
    if keep.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(c) = kept.iter().find(|c| c.0 >= m) {
        return Err(Error::invalid(format!(
            "candidate {c} is not in the roster"
        )));
    }
    Ok(kept)
}

fn new_ids(kept: &[CandidateId], m: usize) -> Vec<Option<CandidateId>> {
    let mut map = vec![None; m];
    for (i, &c) in kept.iter().enumerate() {
        map[c.0] = Some(CandidateId(i));
    }
    map
}

/// The result of [`Election::restrict`]: the smaller election and the id map
/// back to the original roster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub election: Election,
    /// `kept[new.0]` is the original id of `new`.
    pub kept: Vec<CandidateId>,
}

impl Restriction {
    pub fn original(&self, c: CandidateId) -> CandidateId {
        self.kept[c.0]
    }

    pub fn renamed(&self, original: CandidateId) -> Option<CandidateId> {
        self.kept.binary_search(&original).ok().map(CandidateId)
    }
}

/// A linear order over the roster fixing the sequence of consideration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Agenda {
    order: Vec<CandidateId>,
}

impl Agenda {
    pub fn new(order: Vec<CandidateId>, m: usize) -> Result<Self> {
        check_permutation(&order, m).map_err(|e| match e {
            Error::Invalid(msg) => Error::invalid(format!("agenda: {msg}")),
            other => other,
        })?;
        Ok(Agenda { order })
    }

    pub fn from_indices(order: &[usize]) -> Result<Self> {
        Agenda::new(
            order.iter().copied().map(CandidateId).collect(),
            order.len(),
        )
    }

    /// The agenda `0, 1, ..., m-1`.
    pub fn identity(m: usize) -> Self {
        Agenda {
            order: (0..m).map(CandidateId).collect(),
        }
    }

    pub fn order(&self) -> &[CandidateId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn first(&self) -> Option<CandidateId> {
        self.order.first().copied()
    }

    pub fn last(&self) -> Option<CandidateId> {
        self.order.last().copied()
    }

    pub fn position(&self, c: CandidateId) -> Option<usize> {
        self.order.iter().position(|&x| x == c)
    }

    pub fn positions(&self) -> Vec<usize> {
        positions(&self.order)
    }

    pub fn predecessors(&self, c: CandidateId) -> &[CandidateId] {
        match self.position(c) {
            Some(i) => &self.order[..i],
            None => &[],
        }
    }

    pub fn successors(&self, c: CandidateId) -> &[CandidateId] {
        match self.position(c) {
            Some(i) => &self.order[i + 1..],
            None => &[],
        }
    }

    /// Restriction to `keep`, renumbered exactly like [`Election::restrict`].
    pub fn restrict(&self, keep: &[CandidateId]) -> Result<Agenda> {
        let kept = normalize_keep(keep, self.len())?;
        let map = new_ids(&kept, self.len());
        Ok(Agenda {
            order: self.order.iter().filter_map(|c| map[c.0]).collect(),
        })
    }

    /// The subsequence of candidates satisfying `keep`, without renumbering.
    pub fn filtered(&self, mut keep: impl FnMut(CandidateId) -> bool) -> Vec<CandidateId> {
        self.order.iter().copied().filter(|&c| keep(c)).collect()
    }
}

/// `counts[a][b]` is the number of voters ranking `a` before `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseTally {
    m: usize,
    counts: Vec<u64>,
}

impl PairwiseTally {
    pub fn zero(m: usize) -> Self {
        PairwiseTally {
            m,
            counts: vec![0; m * m],
        }
    }

    pub(crate) fn add(&mut self, ranking: &[CandidateId], weight: u64) {
        for (i, a) in ranking.iter().enumerate() {
            for b in &ranking[i + 1..] {
                self.counts[a.0 * self.m + b.0] += weight;
            }
        }
    }

    pub fn candidate_count(&self) -> usize {
        self.m
    }

    pub fn count(&self, a: CandidateId, b: CandidateId) -> u64 {
        self.counts[a.0 * self.m + b.0]
    }

    /// `count(a, b) - count(b, a)`.
    pub fn margin(&self, a: CandidateId, b: CandidateId) -> i64 {
        self.count(a, b) as i64 - self.count(b, a) as i64
    }

    pub fn beats(&self, a: CandidateId, b: CandidateId) -> bool {
        self.count(a, b) > self.count(b, a)
    }

    /// Unordered pairs `(a, b)`, `a < b`, with equal support both ways.
    pub fn tied_pairs(&self) -> Vec<(CandidateId, CandidateId)> {
        let mut out = Vec::new();
        for a in 0..self.m {
            for b in a + 1..self.m {
                let (a, b) = (CandidateId(a), CandidateId(b));
                if self.count(a, b) == self.count(b, a) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Oriented graph with an arc `a -> b` iff `a` beats `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorityGraph {
    m: usize,
    arcs: Vec<bool>,
}

impl MajorityGraph {
    pub fn empty(m: usize) -> Self {
        MajorityGraph {
            m,
            arcs: vec![false; m * m],
        }
    }

    pub fn from_tally(t: &PairwiseTally) -> Self {
        let m = t.candidate_count();
        let mut g = MajorityGraph::empty(m);
        for a in 0..m {
            for b in 0..m {
                if a != b && t.beats(CandidateId(a), CandidateId(b)) {
                    g.arcs[a * m + b] = true;
                }
            }
        }
        g
    }

    /// Builds a graph from an explicit arc list; rejects loops and 2-cycles.
    pub fn from_arcs(m: usize, arcs: &[(CandidateId, CandidateId)]) -> Result<Self> {
        let mut g = MajorityGraph::empty(m);
        for &(a, b) in arcs {
            if a.0 >= m || b.0 >= m {
                return Err(Error::invalid(format!("arc ({a}, {b}) leaves the roster")));
            }
            if a == b {
                return Err(Error::invalid(format!("loop at {a}")));
            }
            if g.has_arc(b, a) {
                return Err(Error::invalid(format!(
                    "symmetric pair ({a}, {b}) in arc set"
                )));
            }
            g.arcs[a.0 * m + b.0] = true;
        }
        Ok(g)
    }

    pub fn candidate_count(&self) -> usize {
        self.m
    }

    pub fn has_arc(&self, a: CandidateId, b: CandidateId) -> bool {
        self.arcs[a.0 * self.m + b.0]
    }

    /// All arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(CandidateId, CandidateId)> {
        let mut out = Vec::new();
        for a in 0..self.m {
            for b in 0..self.m {
                if self.arcs[a * self.m + b] {
                    out.push((CandidateId(a), CandidateId(b)));
                }
            }
        }
        out
    }

    pub fn in_neighbors(&self, c: CandidateId) -> Vec<CandidateId> {
        (0..self.m)
            .map(CandidateId)
            .filter(|&x| self.has_arc(x, c))
            .collect()
    }

    pub fn out_neighbors(&self, c: CandidateId) -> Vec<CandidateId> {
        (0..self.m)
            .map(CandidateId)
            .filter(|&x| self.has_arc(c, x))
            .collect()
    }

    /// The subgraph of arcs pointing forward along `agenda`.
    pub fn forward(&self, agenda: &Agenda) -> Result<MajorityGraph> {
        if agenda.len() != self.m {
            return Err(Error::invalid(format!(
                "agenda covers {} candidates, graph has {}",
                agenda.len(),
                self.m
            )));
        }
        let pos = agenda.positions();
        let mut g = self.clone();
        for a in 0..self.m {
            for b in 0..self.m {
                if pos[a] > pos[b] {
                    g.arcs[a * self.m + b] = false;
                }
            }
        }
        Ok(g)
    }
}

/// Free-function form of [`MajorityGraph::forward`].
pub fn forward_graph(g: &MajorityGraph, a: &Agenda) -> Result<MajorityGraph> {
    g.forward(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;

    fn ids(xs: &[usize]) -> Vec<CandidateId> {
        xs.iter().copied().map(CandidateId).collect()
    }

    #[test]
    fn example1_tally() {
        let t = example1().tally();
        let (a, b, c, d) = (
            CandidateId(0),
            CandidateId(1),
            CandidateId(2),
            CandidateId(3),
        );
        assert_eq!(t.count(a, b), 2);
        assert_eq!(t.count(c, a), 2);
        assert_eq!(t.count(a, d), 2);
        for x in 0..4 {
            for y in 0..4 {
                if x != y {
                    let (x, y) = (CandidateId(x), CandidateId(y));
                    assert_eq!(t.count(x, y) + t.count(y, x), 3);
                }
            }
        }
    }

    #[test]
    fn empty_and_single_vote_tallies() {
        let e = Election::new(Roster::anonymous(3), vec![]).unwrap();
        assert!(e.tally().counts.iter().all(|&x| x == 0));
        assert!(e.majority_graph().arcs().is_empty());

        let e = Election::new(
            Roster::anonymous(3),
            vec![Vote::from_indices(&[0, 1, 2], 1).unwrap()],
        )
        .unwrap();
        let t = e.tally();
        let c = |i| CandidateId(i);
        assert_eq!(
            (
                t.count(c(0), c(1)),
                t.count(c(0), c(2)),
                t.count(c(1), c(2))
            ),
            (1, 1, 1)
        );
        assert_eq!(
            (
                t.count(c(1), c(0)),
                t.count(c(2), c(0)),
                t.count(c(2), c(1))
            ),
            (0, 0, 0)
        );
        assert_eq!(
            e.majority_graph().arcs(),
            vec![(c(0), c(1)), (c(0), c(2)), (c(1), c(2))]
        );
    }

    #[test]
    fn example1_majority_graph() {
        let g = example1().majority_graph();
        // a->b, a->d, b->c, b->d, c->a, d->c
        let expect: Vec<_> = [(0, 1), (0, 3), (1, 2), (1, 3), (2, 0), (3, 2)]
            .iter()
            .map(|&(x, y)| (CandidateId(x), CandidateId(y)))
            .collect();
        assert_eq!(g.arcs(), expect);
    }

    #[test]
    fn perfect_tie_has_no_arcs() {
        let e = Election::new(
            Roster::anonymous(2),
            vec![
                Vote::from_indices(&[0, 1], 1).unwrap(),
                Vote::from_indices(&[1, 0], 1).unwrap(),
            ],
        )
        .unwrap();
        assert!(e.majority_graph().arcs().is_empty());
        assert_eq!(
            e.tally().tied_pairs(),
            vec![(CandidateId(0), CandidateId(1))]
        );
    }

    #[test]
    fn forward_graph_drops_backward_arcs() {
        let g = example1().majority_graph();
        let f = g
            .forward(&Agenda::from_indices(&[0, 1, 2, 3]).unwrap())
            .unwrap();
        assert_eq!(
            f.arcs(),
            ids(&[0, 1, 0, 3, 1, 2, 1, 3])
                .chunks(2)
                .map(|p| (p[0], p[1]))
                .collect::<Vec<_>>()
        );
        let f = g
            .forward(&Agenda::from_indices(&[3, 2, 1, 0]).unwrap())
            .unwrap();
        assert_eq!(
            f.arcs(),
            vec![
                (CandidateId(2), CandidateId(0)),
                (CandidateId(3), CandidateId(2))
            ]
        );

        let empty = MajorityGraph::empty(3);
        assert!(empty
            .forward(&Agenda::identity(3))
            .unwrap()
            .arcs()
            .is_empty());
        assert!(empty.forward(&Agenda::identity(4)).is_err());
    }

    #[test]
    fn restrict_filters_votes_and_agenda() {
        let e = example1();
        let r = e.restrict(&ids(&[0, 2])).unwrap();
        let rankings: Vec<_> = r
            .election
            .votes()
            .iter()
            .map(|v| v.ranking().to_vec())
            .collect();
        // c>a, c>a, a>c
        assert_eq!(rankings, vec![ids(&[1, 0]), ids(&[1, 0]), ids(&[0, 1])]);
        assert_eq!(r.election.roster().labels(), &["a", "c"]);
        assert_eq!(r.original(CandidateId(1)), CandidateId(2));

        let full = e.restrict(&ids(&[3, 2, 1, 0])).unwrap();
        assert_eq!(full.election, e);

        assert_eq!(e.restrict(&[]), Err(Error::EmptyRestriction));

        // agenda (p, b1, b2, r1) restricted to {p, r1}
        let a = Agenda::from_indices(&[0, 1, 2, 3]).unwrap();
        assert_eq!(a.restrict(&ids(&[0, 3])).unwrap().order(), &ids(&[0, 1]));
    }

    #[test]
    fn roster_rejects_bad_labels() {
        assert!(Roster::new(["a", "a"]).is_err());
        assert!(Roster::new(["a b"]).is_err());
        assert!(Roster::new(["x>y"]).is_err());
        assert!(Roster::new(["q'"]).is_ok());
    }

    #[test]
    fn election_rejects_non_permutations() {
        let r = Roster::anonymous(3);
        assert!(Election::new(r.clone(), vec![Vote::from_indices(&[0, 1], 1).unwrap()]).is_err());
        assert!(Election::new(r, vec![Vote::from_indices(&[0, 1, 1], 1).unwrap()]).is_err());
        assert!(Vote::from_indices(&[0], 0).is_err());
    }
}
