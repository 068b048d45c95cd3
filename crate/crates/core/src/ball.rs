//! Radius-n balls of Cayley graphs over a normal-form oracle.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::rewrite::{RewriteError, RewritingSystem};
use crate::words::{Alphabet, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BallError {
    #[error("normal-form oracle failed: {0}")]
    OracleFailure(String),
    #[error("oracle is not idempotent on `{word}`: nf = `{nf}`, nf(nf) = `{nf_nf}`")]
    InconsistentOracle {
        word: String,
        nf: String,
        nf_nf: String,
    },
    #[error("requested radius {requested} exceeds the ball radius {radius}")]
    RadiusExceeded { requested: usize, radius: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// Solves the word problem by returning canonical representatives.
pub trait NormalFormOracle {
    fn normal_form(&self, w: &Word) -> Result<Word, BallError>;
}

impl NormalFormOracle for RewritingSystem {
    fn normal_form(&self, w: &Word) -> Result<Word, BallError> {
        Ok(RewritingSystem::normal_form(self, w)?)
    }
}

/// Adapter turning a closure into an oracle.
pub struct FnOracle<F>(pub F);

impl<F> NormalFormOracle for FnOracle<F>
where
    F: Fn(&Word) -> Result<Word, BallError>,
{
    fn normal_form(&self, w: &Word) -> Result<Word, BallError> {
        (self.0)(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub u32);

impl ElementId {
    pub const IDENTITY: ElementId = ElementId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A directed edge of the Cayley graph: `source --letter--> source·letter`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallEdge {
    pub source: ElementId,
    pub letter: Letter,
}

impl BallEdge {
    pub fn new(source: ElementId, letter: Letter) -> Self {
        BallEdge { source, letter }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub nf: Word,
    pub dist: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    /// Tree edges are the normal-form paths.
    NormalForms,
    /// Normal forms were not prefix-closed inside the ball; the tree is the
    /// breadth-first shortlex-first spanning tree.
    BfsFallback,
}

#[derive(Clone, Debug)]
pub struct CayleyBall {
    alphabet: Arc<Alphabet>,
    radius: usize,
    elements: Vec<GroupElement>,
    index: HashMap<Word, ElementId>,
    neighbors: Vec<Vec<Option<ElementId>>>,
    parent: Vec<Option<BallEdge>>,
    tree_words: Vec<Word>,
    tree_kind: TreeKind,
    boundary_complete: bool,
}

fn check_idempotent(
    oracle: &dyn NormalFormOracle,
    alphabet: &Alphabet,
    w: &Word,
    y: &Word,
) -> Result<(), BallError> {
    let yy = oracle.normal_form(y)?;
    if &yy != y {
        return Err(BallError::InconsistentOracle {
            word: alphabet.render(w),
            nf: alphabet.render(y),
            nf_nf: alphabet.render(&yy),
        });
    }
    Ok(())
}

impl CayleyBall {
    pub fn build(
        oracle: &dyn NormalFormOracle,
        alphabet: Arc<Alphabet>,
        radius: usize,
    ) -> Result<Self, BallError> {
        let id = oracle.normal_form(&Word::new())?;
        check_idempotent(oracle, &alphabet, &Word::new(), &id)?;
        let mut elements = vec![GroupElement {
            nf: id.clone(),
            dist: 0,
        }];
        let mut index = HashMap::new();
        index.insert(id, ElementId::IDENTITY);
        let nletters = alphabet.len();
        let mut neighbors: Vec<Vec<Option<ElementId>>> = vec![vec![None; nletters]];
        let mut layer_start = 0usize;
        let mut boundary_complete = true;
        for d in 0..=radius {
            let layer_end = elements.len();
            for g in layer_start..layer_end {
                for a in alphabet.letters() {
                    let w = elements[g].nf.pushed(a);
                    let y = oracle.normal_form(&w)?;
                    let target = match index.get(&y) {
                        Some(&h) => Some(h),
                        None if d < radius => {
                            check_idempotent(oracle, &alphabet, &w, &y)?;
                            let h = ElementId(elements.len() as u32);
                            index.insert(y.clone(), h);
                            elements.push(GroupElement { nf: y, dist: d + 1 });
                            neighbors.push(vec![None; nletters]);
                            Some(h)
                        }
                        None => {
                            boundary_complete = false;
                            None
                        }
                    };
                    neighbors[g][a.index()] = target;
                }
            }
            layer_start = layer_end;
            if layer_start == elements.len() {
                break;
            }
        }
        let mut ball = CayleyBall {
            alphabet,
            radius,
            elements,
            index,
            neighbors,
            parent: Vec::new(),
            tree_words: Vec::new(),
            tree_kind: TreeKind::NormalForms,
            boundary_complete,
        };
        ball.build_tree();
        Ok(ball)
    }

    fn build_tree(&mut self) {
        let n = self.elements.len();
        let mut parent = vec![None; n];
        let mut prefix_closed = self.elements[0].nf.is_empty();
        for (g, slot) in parent.iter_mut().enumerate().skip(1) {
            let nf = &self.elements[g].nf;
            let Some(last) = nf.last() else {
                prefix_closed = false;
                break;
            };
            match self.index.get(&nf.prefix(nf.len() - 1)) {
                Some(&p)
                    if self.neighbors[p.index()][last.index()] == Some(ElementId(g as u32)) =>
                {
                    *slot = Some(BallEdge::new(p, last));
                }
                _ => {
                    prefix_closed = false;
                    break;
                }
            }
        }
        if !prefix_closed {
            parent = vec![None; n];
            for g in 0..n {
                for a in self.alphabet.letters() {
                    if let Some(h) = self.neighbors[g][a.index()] {
                        let h = h.index();
                        if h != 0
                            && parent[h].is_none()
                            && self.elements[h].dist == self.elements[g].dist + 1
                        {
                            parent[h] = Some(BallEdge::new(ElementId(g as u32), a));
                        }
                    }
                }
            }
            self.tree_kind = TreeKind::BfsFallback;
        }
        let mut tree_words: Vec<Word> = vec![Word::new(); n];
        // elements are stored in BFS order, parents come first
        let mut order: Vec<usize> = (1..n).collect();
        order.sort_by_key(|&g| (self.depth_of(&parent, g), g));
        for g in order {
            let e = parent[g].expect("every non-identity element has a tree parent");
            tree_words[g] = tree_words[e.source.index()].pushed(e.letter);
        }
        self.parent = parent;
        self.tree_words = tree_words;
    }

    fn depth_of(&self, parent: &[Option<BallEdge>], mut g: usize) -> usize {
        let mut d = 0;
        while let Some(e) = parent[g] {
            g = e.source.index();
            d += 1;
        }
        d
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, g: ElementId) -> &GroupElement {
        &self.elements[g.index()]
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        (0..self.elements.len() as u32).map(ElementId)
    }

    pub fn dist(&self, g: ElementId) -> usize {
        self.elements[g.index()].dist
    }

    pub fn nf(&self, g: ElementId) -> &Word {
        &self.elements[g.index()].nf
    }

    pub fn lookup(&self, nf: &Word) -> Option<ElementId> {
        self.index.get(nf).copied()
    }

    pub fn tree_kind(&self) -> TreeKind {
        self.tree_kind
    }

    /// No edge leaves the ball. For a ball built past the diameter this
    /// detects finiteness of the group.
    pub fn boundary_complete(&self) -> bool {
        self.boundary_complete
    }

    /// `g·a`, or `None` if it lies outside the ball.
    pub fn neighbor(&self, g: ElementId, a: Letter) -> Option<ElementId> {
        self.neighbors[g.index()][a.index()]
    }

    pub fn target(&self, e: BallEdge) -> Option<ElementId> {
        self.neighbor(e.source, e.letter)
    }

    pub fn reverse(&self, e: BallEdge) -> Option<BallEdge> {
        self.target(e)
            .map(|h| BallEdge::new(h, self.alphabet.inverse(e.letter)))
    }

    /// Follows `w` from `g`; `None` as soon as the path leaves the ball.
    pub fn walk(&self, g: ElementId, w: &Word) -> Option<ElementId> {
        let mut cur = g;
        for a in w.iter() {
            cur = self.neighbor(cur, a)?;
        }
        Some(cur)
    }

    /// The vertices visited by `w` from `g`, including `g`.
    pub fn trace(&self, g: ElementId, w: &Word) -> Option<Vec<ElementId>> {
        let mut out = Vec::with_capacity(w.len() + 1);
        out.push(g);
        let mut cur = g;
        for a in w.iter() {
            cur = self.neighbor(cur, a)?;
            out.push(cur);
        }
        Some(out)
    }

    /// Label of the tree path from ε to `g`.
    pub fn tree_word(&self, g: ElementId) -> &Word {
        &self.tree_words[g.index()]
    }

    pub fn tree_parent(&self, g: ElementId) -> Option<BallEdge> {
        self.parent[g.index()]
    }

    /// Vertices along the tree path from ε to `g`.
    pub fn tree_path(&self, g: ElementId) -> Vec<ElementId> {
        self.trace(ElementId::IDENTITY, self.tree_word(g))
            .expect("tree paths stay inside the ball")
    }

    /// Whether the undirected edge underlying `e` lies in the tree.
    pub fn is_degenerate(&self, e: BallEdge) -> bool {
        let Some(h) = self.target(e) else {
            return false;
        };
        let inv = self.alphabet.inverse(e.letter);
        self.parent[h.index()] == Some(e)
            || self.parent[e.source.index()] == Some(BallEdge::new(h, inv))
    }

    /// Shortlex-least endpoint becomes the source. Loops keep their letter
    /// order by taking the smaller letter.
    pub fn canonical(&self, e: BallEdge) -> Option<BallEdge> {
        let r = self.reverse(e)?;
        let key = |x: BallEdge| (self.nf(x.source).clone(), x.letter);
        Some(if key(e) <= key(r) { e } else { r })
    }

    pub fn is_canonical(&self, e: BallEdge) -> bool {
        self.canonical(e) == Some(e)
    }

    /// Letters that represent the identity, which give loops at ε.
    pub fn trivial_letters(&self) -> Vec<Letter> {
        self.alphabet
            .letters()
            .filter(|&a| self.neighbor(ElementId::IDENTITY, a) == Some(ElementId::IDENTITY))
            .collect()
    }

    /// Directed edges whose endpoints are both inside the ball.
    pub fn inner_edges(&self) -> impl Iterator<Item = BallEdge> + '_ {
        self.elements().flat_map(move |g| {
            self.alphabet
                .letters()
                .map(move |a| BallEdge::new(g, a))
                .filter(|e| self.target(*e).is_some())
        })
    }

    pub fn sphere(&self, m: usize) -> Result<Vec<ElementId>, BallError> {
        if m > self.radius {
            return Err(BallError::RadiusExceeded {
                requested: m,
                radius: self.radius,
            });
        }
        Ok(self.elements().filter(|&g| self.dist(g) == m).collect())
    }

    /// Breadth-first distances from `from` using only vertices at distance at
    /// most `level` from ε. Vertices outside get `usize::MAX`.
    pub fn distances_within(&self, from: ElementId, level: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        if self.dist(from) > level {
            return dist;
        }
        dist[from.index()] = 0;
        let mut q = VecDeque::from([from]);
        while let Some(g) = q.pop_front() {
            for a in self.alphabet.letters() {
                if let Some(h) = self.neighbor(g, a) {
                    if self.dist(h) <= level && dist[h.index()] == usize::MAX {
                        dist[h.index()] = dist[g.index()] + 1;
                        q.push_back(h);
                    }
                }
            }
        }
        dist
    }

    /// The lex-least shortest path from `from` to `to` inside `B(level)`.
    pub fn shortest_path_within(
        &self,
        from: ElementId,
        to: ElementId,
        level: usize,
    ) -> Option<Word> {
        let dist = self.distances_within(to, level);
        if dist[from.index()] == usize::MAX {
            return None;
        }
        let mut out = Word::new();
        let mut cur = from;
        while cur != to {
            let d = dist[cur.index()];
            let (a, next) = self
                .alphabet
                .letters()
                .filter_map(|a| self.neighbor(cur, a).map(|h| (a, h)))
                .find(|&(_, h)| dist[h.index()] != usize::MAX && dist[h.index()] + 1 == d)
                .expect("a distance-decreasing neighbor exists");
            out.push(a);
            cur = next;
        }
        Some(out)
    }
}

impl CayleyBall {
    /// Nonempty words of length at most `max_len` representing ε, in shortlex
    /// order. Such words stay within distance `max_len / 2` of ε, so the
    /// ball must have at least that radius.
    pub fn identity_words(
        &self,
        max_len: usize,
        freely_reduced: bool,
    ) -> Result<Vec<Word>, BallError> {
        if max_len / 2 > self.radius {
            return Err(BallError::RadiusExceeded {
                requested: max_len / 2,
                radius: self.radius,
            });
        }
        let mut out = Vec::new();
        let mut cur: Vec<Letter> = Vec::new();
        self.identity_dfs(
            ElementId::IDENTITY,
            max_len,
            freely_reduced,
            &mut cur,
            &mut out,
        );
        out.sort();
        Ok(out)
    }

    fn identity_dfs(
        &self,
        g: ElementId,
        max_len: usize,
        freely_reduced: bool,
        cur: &mut Vec<Letter>,
        out: &mut Vec<Word>,
    ) {
        if !cur.is_empty() && g == ElementId::IDENTITY {
            out.push(Word::from_letters(cur.clone()));
        }
        if cur.len() == max_len {
            return;
        }
        for a in self.alphabet.letters() {
            if freely_reduced && cur.last().is_some_and(|&b| self.alphabet.inverse(b) == a) {
                continue;
            }
            let Some(h) = self.neighbor(g, a) else {
                continue;
            };
            if self.dist(h) > max_len - cur.len() - 1 {
                continue;
            }
            cur.push(a);
            self.identity_dfs(h, max_len, freely_reduced, cur, out);
            cur.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcWitness {
    pub g: ElementId,
    pub h: ElementId,
    pub graph_dist: usize,
    /// Shortest path inside `B(n)`, `None` if disconnected there.
    pub inside_dist: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcReport {
    pub n: usize,
    pub k: usize,
    pub pairs_checked: usize,
    pub max_inside_dist: usize,
    pub failure: Option<AcWitness>,
}

impl AcReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks the almost convexity condition at level `n` with constant `k`.
pub fn check_almost_convex(ball: &CayleyBall, n: usize, k: usize) -> Result<AcReport, BallError> {
    if n + 1 > ball.radius() {
        return Err(BallError::RadiusExceeded {
            requested: n + 1,
            radius: ball.radius(),
        });
    }
    let sphere = ball.sphere(n)?;
    let mut report = AcReport {
        n,
        k,
        pairs_checked: 0,
        max_inside_dist: 0,
        failure: None,
    };
    // distance ≤ 2 between points of S(n) is realized inside B(n+1)
    for &g in &sphere {
        let near = ball.distances_within(g, n + 1);
        let inside = ball.distances_within(g, n);
        for &h in &sphere {
            let d = near[h.index()];
            if h <= g || d > 2 {
                continue;
            }
            report.pairs_checked += 1;
            let i = inside[h.index()];
            if i != usize::MAX {
                report.max_inside_dist = report.max_inside_dist.max(i);
            }
            if i == usize::MAX || i > k {
                report.failure = Some(AcWitness {
                    g,
                    h,
                    graph_dist: d,
                    inside_dist: (i != usize::MAX).then_some(i),
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FellowWitness {
    pub edge: BallEdge,
    pub step: usize,
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FellowReport {
    pub n: usize,
    pub k: usize,
    pub max_distance: usize,
    pub failure: Option<FellowWitness>,
}

impl FellowReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Synchronous distance between the tree normal forms of the endpoints of
/// every edge with source in `B(n-1)`.
pub fn check_fellow_traveler(
    ball: &CayleyBall,
    n: usize,
    k: usize,
) -> Result<FellowReport, BallError> {
    if n + k > ball.radius() {
        return Err(BallError::RadiusExceeded {
            requested: n + k,
            radius: ball.radius(),
        });
    }
    let mut cache: HashMap<ElementId, Vec<usize>> = HashMap::new();
    let mut report = FellowReport {
        n,
        k,
        max_distance: 0,
        failure: None,
    };
    for g in ball.elements() {
        if n == 0 || ball.dist(g) > n - 1 {
            continue;
        }
        for a in ball.alphabet().letters() {
            let e = BallEdge::new(g, a);
            let h = ball.target(e).expect("neighbors of B(n-1) lie in the ball");
            let pg = ball.tree_path(g);
            let ph = ball.tree_path(h);
            let steps = pg.len().max(ph.len());
            for i in 0..steps {
                let u = pg[i.min(pg.len() - 1)];
                let v = ph[i.min(ph.len() - 1)];
                let du = cache
                    .entry(u)
                    .or_insert_with(|| ball.distances_within(u, ball.radius()));
                let d = du[v.index()];
                if d != usize::MAX {
                    report.max_distance = report.max_distance.max(d);
                }
                if d > k && report.failure.is_none() {
                    report.failure = Some(FellowWitness {
                        edge: e,
                        step: i,
                        distance: d,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Whether every prefix of every normal form in `B(n)` is a normal form.
pub fn check_prefix_closed(
    oracle: &dyn NormalFormOracle,
    alphabet: &Alphabet,
    n: usize,
) -> Result<bool, BallError> {
    let mut seen = std::collections::HashSet::new();
    for w in alphabet.words_up_to(n) {
        let y = oracle.normal_form(&w)?;
        if !seen.insert(y.clone()) {
            continue;
        }
        for i in 0..y.len() {
            let p = y.prefix(i);
            if oracle.normal_form(&p)? != p {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Graphviz rendering of the ball, one edge per inverse pair. Tree edges
/// are drawn bold.
pub fn to_dot(ball: &CayleyBall) -> String {
    let al = ball.alphabet();
    let mut out = String::from("digraph ball {\n  node [shape=circle];\n");
    for g in ball.elements() {
        let nf = ball.nf(g);
        let name = if nf.is_empty() {
            "1".to_string()
        } else {
            al.render(nf)
        };
        out.push_str(&format!("  v{} [label=\"{}\"];\n", g.0, name));
    }
    for e in ball.inner_edges().filter(|&e| ball.is_canonical(e)) {
        let h = ball.target(e).unwrap();
        let style = if ball.is_degenerate(e) {
            ", style=bold"
        } else {
            ""
        };
        out.push_str(&format!(
            "  v{} -> v{} [label=\"{}\"{style}];\n",
            e.source.0,
            h.0,
            al.name(e.letter)
        ));
    }
    out.push_str("}\n");
    out
}

pub fn to_json(ball: &CayleyBall) -> serde_json::Value {
    let al = ball.alphabet();
    let vertices: Vec<serde_json::Value> = ball
        .elements()
        .map(|g| serde_json::json!({"id": g.0, "nf": al.render(ball.nf(g)), "dist": ball.dist(g)}))
        .collect();
    let edges: Vec<serde_json::Value> = ball
        .inner_edges()
        .filter(|&e| ball.is_canonical(e))
        .map(|e| {
            serde_json::json!({
                "source": e.source.0,
                "target": ball.target(e).unwrap().0,
                "letter": al.name(e.letter),
                "tree": ball.is_degenerate(e),
            })
        })
        .collect();
    serde_json::json!({
        "radius": ball.radius(),
        "complete": ball.boundary_complete(),
        "vertices": vertices,
        "edges": edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::Rule;

    pub(crate) fn z2() -> RewritingSystem {
        let al = Arc::new(Alphabet::case_paired(&["a", "A", "b", "B"]).unwrap());
        let r = |l: &str, r: &str| Rule::new(al.parse_word(l).unwrap(), al.parse_word(r).unwrap());
        let rules = vec![
            r("a A", ""),
            r("A a", ""),
            r("b B", ""),
            r("B b", ""),
            r("b a", "a b"),
            r("b A", "A b"),
            r("B a", "a B"),
            r("B A", "A B"),
        ];
        RewritingSystem::new(al, rules).unwrap()
    }

    fn free2() -> RewritingSystem {
        let al = Arc::new(Alphabet::case_paired(&["a", "A", "b", "B"]).unwrap());
        let r = |l: &str| Rule::new(al.parse_word(l).unwrap(), Word::new());
        RewritingSystem::new(al.clone(), vec![r("a A"), r("A a"), r("b B"), r("B b")]).unwrap()
    }

    fn ball(rs: &RewritingSystem, n: usize) -> CayleyBall {
        CayleyBall::build(rs, rs.alphabet().clone(), n).unwrap()
    }

    #[test]
    fn z2_counts() {
        let rs = z2();
        let b1 = ball(&rs, 1);
        assert_eq!(b1.len(), 5);
        let inner: Vec<_> = b1.inner_edges().collect();
        assert_eq!(inner.len(), 8);
        assert_eq!(ball(&rs, 2).len(), 13);
        let b0 = ball(&rs, 0);
        assert_eq!(b0.len(), 1);
        assert_eq!(b0.inner_edges().count(), 0);
        for n in 0..6 {
            assert_eq!(ball(&rs, n).len(), 2 * n * n + 2 * n + 1);
        }
    }

    #[test]
    fn spheres() {
        let b = ball(&z2(), 3);
        assert_eq!(b.sphere(1).unwrap().len(), 4);
        assert_eq!(b.sphere(0).unwrap(), vec![ElementId::IDENTITY]);
        assert_eq!(b.sphere(2).unwrap().len(), 8);
        assert!(matches!(b.sphere(4), Err(BallError::RadiusExceeded { .. })));
    }

    #[test]
    fn tree_and_classification() {
        let rs = z2();
        let b = ball(&rs, 4);
        assert_eq!(b.tree_kind(), TreeKind::NormalForms);
        let mut tree = 0;
        let mut undirected = 0;
        for e in b.inner_edges() {
            if b.is_canonical(e) {
                undirected += 1;
                if b.is_degenerate(e) {
                    tree += 1;
                }
            }
            let r = b.reverse(e).unwrap();
            assert_eq!(b.target(r), Some(e.source));
            assert_eq!(b.is_degenerate(e), b.is_degenerate(r));
        }
        assert_eq!(tree, b.len() - 1);
        assert!(undirected > tree);
        for g in b.elements() {
            assert_eq!(b.tree_word(g), b.nf(g));
        }
    }

    #[test]
    fn inconsistent_oracle_detected() {
        let al = Arc::new(Alphabet::case_paired(&["a", "A"]).unwrap());
        let a = al.letter("a").unwrap();
        // nf(a) = a a but nf(a a) = a
        let oracle = FnOracle(move |w: &Word| {
            Ok(match w.letters() {
                [x] if *x == a => Word::from_letters(vec![a, a]),
                [x, y] if *x == a && *y == a => Word::single(a),
                _ => w.clone(),
            })
        });
        assert!(matches!(
            CayleyBall::build(&oracle, al.clone(), 2),
            Err(BallError::InconsistentOracle { .. })
        ));
    }

    #[test]
    fn prefix_closure() {
        let rs = z2();
        assert!(check_prefix_closed(&rs, rs.alphabet(), 3).unwrap());
        assert!(check_prefix_closed(&rs, rs.alphabet(), 0).unwrap());
        let al = rs.alphabet().clone();
        let a = al.letter("a").unwrap();
        let na = al.letter("A").unwrap();
        // "a" is sent to a non-normal spelling while "a b" is kept
        let oracle = FnOracle(move |w: &Word| {
            Ok(if w.letters() == [a] {
                Word::from_letters(vec![a, na, a])
            } else {
                w.clone()
            })
        });
        assert!(!check_prefix_closed(&oracle, &al, 2).unwrap());
    }

    #[test]
    fn almost_convexity() {
        let rs = z2();
        let b = ball(&rs, 5);
        for n in 0..=4 {
            let r = check_almost_convex(&b, n, 4).unwrap();
            assert!(r.passed(), "n = {n}");
        }
        let f = free2();
        let bf = ball(&f, 3);
        assert!(check_almost_convex(&bf, 2, 2).unwrap().passed());
        assert!(check_almost_convex(&b, 5, 4).is_err());
    }

    #[test]
    fn fellow_traveling() {
        let rs = z2();
        let b = ball(&rs, 6);
        let r = check_fellow_traveler(&b, 4, 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_distance, 2);
        let f = free2();
        let bf = ball(&f, 5);
        let r = check_fellow_traveler(&bf, 4, 1).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_distance, 1);
        assert!(!check_fellow_traveler(&b, 4, 1).unwrap().passed());
    }

    #[test]
    fn shortest_paths() {
        let rs = z2();
        let b = ball(&rs, 3);
        let al = b.alphabet();
        let g = b.lookup(&al.parse_word("a").unwrap()).unwrap();
        let h = b.lookup(&al.parse_word("b").unwrap()).unwrap();
        let p = b.shortest_path_within(g, h, 1).unwrap();
        assert_eq!(p, al.parse_word("A b").unwrap());
        assert_eq!(b.walk(g, &p), Some(h));
    }

    #[test]
    fn trivial_generators() {
        assert!(ball(&z2(), 2).trivial_letters().is_empty());
        let al = Arc::new(Alphabet::case_paired(&["a", "A", "b", "B"]).unwrap());
        let r = |l: &str, r: &str| Rule::new(al.parse_word(l).unwrap(), al.parse_word(r).unwrap());
        let rs = RewritingSystem::new(
            al.clone(),
            vec![r("b", ""), r("B", ""), r("a A", ""), r("A a", "")],
        )
        .unwrap();
        let b = ball(&rs, 2);
        let names: Vec<&str> = b
            .trivial_letters()
            .into_iter()
            .map(|a| al.name(a))
            .collect();
        assert_eq!(names, ["b", "B"]);
    }
}
