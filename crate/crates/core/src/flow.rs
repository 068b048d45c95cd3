//! Flow functions on enumerated balls.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::ball::{BallEdge, CayleyBall, ElementId, TreeKind};
use crate::rewrite::RewritingSystem;
use crate::words::{Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("assigned path of edge ({source_nf}, {letter}) leaves the ball")]
    DanglingEdge { source_nf: String, letter: String },
    #[error("no rule applies to the recursive edge ({source_nf}, {letter})")]
    NoApplicableRule { source_nf: String, letter: String },
    #[error("ball normal forms are not prefix-closed")]
    NotPrefixClosed,
    #[error("ball normal forms are not geodesic at `{0}`")]
    NotGeodesic(String),
    #[error("no path of length at most {k} inside B({level}) joins `{from}` and `{to}`")]
    NotAlmostConvex {
        from: String,
        to: String,
        level: usize,
        k: usize,
    },
    #[error("factorization of the path for ({source_nf}, {letter}) does not match the tree")]
    BadFactorization { source_nf: String, letter: String },
}

/// The label of `ff(e)` split as `x_g⁻¹ · c_e · x_h`, where `x_g` and `x_h`
/// are suffixes of the tree words of the endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPath {
    pub label: Word,
    pub tail: usize,
    pub head: usize,
}

impl FlowPath {
    pub fn identity(a: Letter) -> Self {
        FlowPath {
            label: Word::single(a),
            tail: 0,
            head: 0,
        }
    }

    /// The middle part `c_e`.
    pub fn middle(&self) -> Word {
        self.label.factor(self.tail, self.label.len() - self.head)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowKind {
    Rewriting,
    AlmostConvex,
    Custom,
}

#[derive(Clone, Debug)]
pub struct FlowFunction {
    pub kind: FlowKind,
    assignment: BTreeMap<BallEdge, FlowPath>,
    unusable: BTreeSet<BallEdge>,
}

fn edge_names(ball: &CayleyBall, e: BallEdge) -> (String, String) {
    (
        ball.alphabet().render(ball.nf(e.source)),
        ball.alphabet().name(e.letter).to_string(),
    )
}

/// Greedy split of a hand-built label: the longest prefix running back down
/// the tree from `g`, and likewise at the end toward `h`.
fn greedy_factorization(ball: &CayleyBall, e: BallEdge, label: &Word) -> (usize, usize) {
    let al = ball.alphabet();
    let Some(h) = ball.target(e) else {
        return (0, 0);
    };
    let yg = ball.tree_word(e.source);
    let yh = ball.tree_word(h);
    let mut tail = 0;
    while tail < label.len()
        && tail < yg.len()
        && label.letters()[tail] == al.inverse(yg.letters()[yg.len() - 1 - tail])
    {
        tail += 1;
    }
    let mut head = 0;
    while head + tail < label.len()
        && head < yh.len()
        && label.letters()[label.len() - 1 - head] == yh.letters()[yh.len() - 1 - head]
    {
        head += 1;
    }
    (tail, head)
}

impl FlowFunction {
    pub fn new(kind: FlowKind) -> Self {
        FlowFunction {
            kind,
            assignment: BTreeMap::new(),
            unusable: BTreeSet::new(),
        }
    }

    /// Assigns `label` to `e` with a greedy factorization; marks the edge
    /// unusable if the path leaves the ball.
    pub fn assign(&mut self, ball: &CayleyBall, e: BallEdge, label: Word) {
        let (tail, head) = greedy_factorization(ball, e, &label);
        self.assign_factored(ball, e, FlowPath { label, tail, head });
    }

    pub fn assign_factored(&mut self, ball: &CayleyBall, e: BallEdge, path: FlowPath) {
        if ball.walk(e.source, &path.label).is_none() {
            self.unusable.insert(e);
        } else {
            self.unusable.remove(&e);
        }
        self.assignment.insert(e, path);
    }

    pub fn get(&self, e: BallEdge) -> Option<&FlowPath> {
        self.assignment.get(&e)
    }

    pub fn is_unusable(&self, e: BallEdge) -> bool {
        self.unusable.contains(&e)
    }

    pub fn unusable(&self) -> impl Iterator<Item = BallEdge> + '_ {
        self.unusable.iter().copied()
    }

    pub fn assignments(&self) -> impl Iterator<Item = (BallEdge, &FlowPath)> {
        self.assignment.iter().map(|(e, p)| (*e, p))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn bound_k(&self) -> usize {
        self.assignment
            .values()
            .map(|p| p.label.len())
            .max()
            .unwrap_or(0)
    }

    /// Identity on every edge inside the ball.
    pub fn identity(ball: &CayleyBall) -> Self {
        let mut ff = FlowFunction::new(FlowKind::Custom);
        for e in ball.inner_edges() {
            ff.assign_factored(ball, e, FlowPath::identity(e.letter));
        }
        ff
    }

    /// Relators `label(ff(e)) · label(e)⁻¹` over the usable assignments,
    /// free of empty words, symmetrized.
    pub fn relators(&self, ball: &CayleyBall) -> Presentation {
        let al = ball.alphabet();
        let rels = self
            .assignment
            .iter()
            .filter(|(e, _)| !self.unusable.contains(e))
            .map(|(e, p)| p.label.pushed(al.inverse(e.letter)))
            .filter(|r| !al.free_reduce(r).is_empty());
        Presentation::new(al.clone(), rels)
            .symmetrize()
            .presentation
    }

    /// `w TAB a TAB label(ff(e))` for every assigned edge.
    pub fn export_triples(&self, ball: &CayleyBall) -> String {
        let al = ball.alphabet();
        let mut out = String::new();
        for (e, p) in &self.assignment {
            out.push_str(&al.render(ball.nf(e.source)));
            out.push('\t');
            out.push_str(al.name(e.letter));
            out.push('\t');
            out.push_str(&al.render(&p.label));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct FlowReport {
    pub edges_checked: usize,
    /// Edges whose assigned path leaves the ball; excluded from the checks.
    pub unusable: usize,
    pub missing: Vec<BallEdge>,
    pub f1_failures: Vec<BallEdge>,
    pub f2d_failures: Vec<BallEdge>,
    pub f3_failures: Vec<BallEdge>,
    pub factorization_failures: Vec<BallEdge>,
    pub descent_pairs: usize,
    /// A directed cycle of the descent relation, if one exists.
    pub cycle: Option<Vec<BallEdge>>,
    pub bound_k: usize,
    /// Radius of the ball the check covered.
    pub verified_radius: usize,
}

impl FlowReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty()
            && self.f1_failures.is_empty()
            && self.f2d_failures.is_empty()
            && self.f3_failures.is_empty()
            && self.factorization_failures.is_empty()
            && self.cycle.is_none()
    }
}

fn factorization_ok(ball: &CayleyBall, e: BallEdge, p: &FlowPath) -> bool {
    let al = ball.alphabet();
    let Some(h) = ball.target(e) else {
        return false;
    };
    if p.tail + p.head > p.label.len() {
        return false;
    }
    let yg = ball.tree_word(e.source);
    let yh = ball.tree_word(h);
    if p.tail > yg.len() || p.head > yh.len() {
        return false;
    }
    let xg = yg.suffix_from(yg.len() - p.tail);
    let xh = yh.suffix_from(yh.len() - p.head);
    p.label.prefix(p.tail) == al.formal_inverse(&xg)
        && p.label.suffix_from(p.label.len() - p.head) == xh
}

/// Checks F1, F2d, F3 against `bound_k`, the recorded factorizations and
/// acyclicity of the descent relation. Edges marked unusable are skipped; a
/// path that leaves the ball without being marked is an error.
pub fn verify_flow(
    ff: &FlowFunction,
    ball: &CayleyBall,
    bound_k: usize,
) -> Result<FlowReport, FlowError> {
    let mut report = FlowReport {
        verified_radius: ball.radius(),
        bound_k: ff.bound_k(),
        ..FlowReport::default()
    };
    let mut succ: HashMap<BallEdge, Vec<BallEdge>> = HashMap::new();
    for e in ball.inner_edges() {
        if ff.is_unusable(e) {
            report.unusable += 1;
            continue;
        }
        report.edges_checked += 1;
        let Some(p) = ff.get(e) else {
            report.missing.push(e);
            continue;
        };
        let Some(path) = ball.trace(e.source, &p.label) else {
            let (source_nf, letter) = edge_names(ball, e);
            return Err(FlowError::DanglingEdge { source_nf, letter });
        };
        if path.last().copied() != ball.target(e) {
            report.f1_failures.push(e);
        }
        let degenerate = ball.is_degenerate(e);
        if degenerate && p.label != Word::single(e.letter) {
            report.f2d_failures.push(e);
        }
        if p.label.len() > bound_k {
            report.f3_failures.push(e);
        }
        if !factorization_ok(ball, e, p) {
            report.factorization_failures.push(e);
        }
        if !degenerate {
            let below: &mut Vec<BallEdge> = succ.entry(e).or_default();
            for (i, a) in p.label.iter().enumerate() {
                let e2 = BallEdge::new(path[i], a);
                if !ball.is_degenerate(e2) {
                    below.push(e2);
                }
            }
            report.descent_pairs += below.len();
        }
    }
    report.cycle = find_cycle(&succ);
    Ok(report)
}

/// Kahn's algorithm; on failure a cycle is extracted from the remainder.
fn find_cycle(succ: &HashMap<BallEdge, Vec<BallEdge>>) -> Option<Vec<BallEdge>> {
    let mut nodes: BTreeSet<BallEdge> = succ.keys().copied().collect();
    for v in succ.values() {
        nodes.extend(v.iter().copied());
    }
    let mut indeg: HashMap<BallEdge, usize> = nodes.iter().map(|&e| (e, 0)).collect();
    for v in succ.values() {
        for e in v {
            *indeg.get_mut(e).unwrap() += 1;
        }
    }
    let mut queue: Vec<BallEdge> = nodes.iter().copied().filter(|e| indeg[e] == 0).collect();
    let mut removed = 0;
    while let Some(e) = queue.pop() {
        removed += 1;
        for x in succ.get(&e).into_iter().flatten() {
            let d = indeg.get_mut(x).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push(*x);
            }
        }
    }
    if removed == nodes.len() {
        return None;
    }
    // every remaining node has a remaining predecessor; walk predecessors
    let remaining: BTreeSet<BallEdge> = nodes.into_iter().filter(|e| indeg[e] > 0).collect();
    let mut pred: HashMap<BallEdge, BallEdge> = HashMap::new();
    for (from, tos) in succ {
        if remaining.contains(from) {
            for t in tos {
                if remaining.contains(t) {
                    pred.entry(*t).or_insert(*from);
                }
            }
        }
    }
    let start = *remaining.iter().next().unwrap();
    let mut seen: HashMap<BallEdge, usize> = HashMap::new();
    let mut walk = vec![start];
    let mut cur = start;
    loop {
        seen.insert(cur, walk.len() - 1);
        cur = pred[&cur];
        if let Some(&i) = seen.get(&cur) {
            let mut cyc = walk[i..].to_vec();
            cyc.reverse();
            return Some(cyc);
        }
        walk.push(cur);
    }
}

/// The rewriting flow function of a complete rewriting system whose normal
/// forms label the ball's tree.
pub fn rewriting_flow(rs: &RewritingSystem, ball: &CayleyBall) -> Result<FlowFunction, FlowError> {
    if ball.tree_kind() != TreeKind::NormalForms {
        return Err(FlowError::NotPrefixClosed);
    }
    let al = ball.alphabet();
    let mut ff = FlowFunction::new(FlowKind::Rewriting);
    for e in ball.inner_edges() {
        let g = e.source;
        let a = e.letter;
        let h = ball.target(e).unwrap();
        let yg = ball.nf(g);
        let yh = ball.nf(h);
        if rs.is_irreducible(&yg.pushed(a)) || rs.is_irreducible(&yh.pushed(al.inverse(a))) {
            ff.assign_factored(ball, e, FlowPath::identity(a));
            continue;
        }
        // longest suffix u of y_g with u·a a left side
        let mut found = None;
        for start in 0..yg.len() {
            let ua = yg.suffix_from(start).pushed(a);
            if let Some(r) = rs.rules().iter().find(|r| r.lhs == ua) {
                found = Some((yg.suffix_from(start), r.rhs.clone()));
                break;
            }
        }
        if found.is_none() {
            if let Some(r) = rs.rules().iter().find(|r| r.lhs == Word::single(a)) {
                found = Some((Word::new(), r.rhs.clone()));
            }
        }
        let Some((u, v)) = found else {
            let (source_nf, letter) = edge_names(ball, e);
            return Err(FlowError::NoApplicableRule { source_nf, letter });
        };
        let label = al.formal_inverse(&u).concat(&v);
        ff.assign_factored(
            ball,
            e,
            FlowPath {
                label,
                tail: u.len(),
                head: 0,
            },
        );
    }
    Ok(ff)
}

/// The almost-convexity flow function with constant `k` over shortlex
/// geodesic normal forms.
pub fn ac_flow(ball: &CayleyBall, k: usize) -> Result<FlowFunction, FlowError> {
    if ball.tree_kind() != TreeKind::NormalForms {
        return Err(FlowError::NotPrefixClosed);
    }
    let al = ball.alphabet();
    for g in ball.elements() {
        if ball.nf(g).len() != ball.dist(g) {
            return Err(FlowError::NotGeodesic(al.render(ball.nf(g))));
        }
    }
    let mut ff = FlowFunction::new(FlowKind::AlmostConvex);
    let phi = |from: ElementId, to: ElementId, level: usize| -> Result<Word, FlowError> {
        match ball.shortest_path_within(from, to, level) {
            Some(p) if p.len() <= k => Ok(p),
            _ => Err(FlowError::NotAlmostConvex {
                from: al.render(ball.nf(from)),
                to: al.render(ball.nf(to)),
                level,
                k,
            }),
        }
    };
    for e in ball.inner_edges() {
        let a = e.letter;
        if ball.is_degenerate(e) {
            ff.assign_factored(ball, e, FlowPath::identity(a));
            continue;
        }
        let g = e.source;
        let h = ball.target(e).unwrap();
        let (dg, dh) = (ball.dist(g), ball.dist(h));
        let path = if dg == dh {
            FlowPath {
                label: phi(g, h, dg)?,
                tail: 0,
                head: 0,
            }
        } else if dh == dg + 1 {
            let b = ball.nf(h).last().unwrap();
            let q = ball.neighbor(h, al.inverse(b)).unwrap();
            FlowPath {
                label: phi(g, q, dg)?.pushed(b),
                tail: 0,
                head: 1,
            }
        } else {
            let b = ball.nf(g).last().unwrap();
            let q = ball.neighbor(g, al.inverse(b)).unwrap();
            let mut label = Word::single(al.inverse(b));
            label = label.concat(&phi(q, h, dh)?);
            FlowPath {
                label,
                tail: 1,
                head: 0,
            }
        };
        ff.assign_factored(ball, e, path);
    }
    Ok(ff)
}
