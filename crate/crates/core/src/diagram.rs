//! Van Kampen diagrams as combinatorial 2-complexes, their validity checks
//! and coarse-distance profiles.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::ball::{CayleyBall, ElementId};
use crate::quarter::QuarterDist;
use crate::words::{Alphabet, Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("vertex {vertex} projects to an element outside the ball")]
    BallTooSmall { vertex: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl FaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An edge traversed forward (src to dst) or backward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirEdge {
    pub edge: EdgeId,
    pub forward: bool,
}

impl DirEdge {
    pub fn new(edge: EdgeId, forward: bool) -> Self {
        DirEdge { edge, forward }
    }

    pub fn rev(self) -> Self {
        DirEdge {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Vertex(VertexId),
    Edge(EdgeId),
    Face(FaceId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramEdge {
    pub src: VertexId,
    pub dst: VertexId,
    pub label: Letter,
}

#[derive(Clone, Debug)]
pub struct VanKampenDiagram {
    alphabet: Arc<Alphabet>,
    projection: Vec<ElementId>,
    edges: Vec<DiagramEdge>,
    faces: Vec<Vec<DirEdge>>,
    basepoint: VertexId,
    boundary: Vec<DirEdge>,
}

impl VanKampenDiagram {
    pub fn new(
        alphabet: Arc<Alphabet>,
        projection: Vec<ElementId>,
        edges: Vec<DiagramEdge>,
        faces: Vec<Vec<DirEdge>>,
        basepoint: VertexId,
        boundary: Vec<DirEdge>,
    ) -> Self {
        VanKampenDiagram {
            alphabet,
            projection,
            edges,
            faces,
            basepoint,
            boundary,
        }
    }

    pub fn single_vertex(alphabet: Arc<Alphabet>) -> Self {
        VanKampenDiagram::new(
            alphabet,
            vec![ElementId::IDENTITY],
            Vec::new(),
            Vec::new(),
            VertexId(0),
            Vec::new(),
        )
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.projection.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn basepoint(&self) -> VertexId {
        self.basepoint
    }

    pub fn boundary(&self) -> &[DirEdge] {
        &self.boundary
    }

    pub fn edge(&self, e: EdgeId) -> &DiagramEdge {
        &self.edges[e.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.projection.len() as u32).map(VertexId)
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> {
        (0..self.faces.len() as u32).map(FaceId)
    }

    pub fn face(&self, f: FaceId) -> &[DirEdge] {
        &self.faces[f.index()]
    }

    pub fn projection(&self, v: VertexId) -> ElementId {
        self.projection[v.index()]
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.vertices()
            .map(Cell::Vertex)
            .chain(self.edges().map(Cell::Edge))
            .chain(self.faces().map(Cell::Face))
    }

    pub fn tail(&self, d: DirEdge) -> VertexId {
        let e = &self.edges[d.edge.index()];
        if d.forward {
            e.src
        } else {
            e.dst
        }
    }

    pub fn head(&self, d: DirEdge) -> VertexId {
        self.tail(d.rev())
    }

    pub fn label(&self, d: DirEdge) -> Letter {
        let a = self.edges[d.edge.index()].label;
        if d.forward {
            a
        } else {
            self.alphabet.inverse(a)
        }
    }

    pub fn path_word(&self, path: &[DirEdge]) -> Word {
        path.iter().map(|&d| self.label(d)).collect()
    }

    pub fn boundary_word(&self) -> Word {
        self.path_word(&self.boundary)
    }

    pub fn face_word(&self, f: FaceId) -> Word {
        self.path_word(&self.faces[f.index()])
    }

    /// Vertex `i` of the boundary circuit, `0 ≤ i ≤ len`.
    pub fn boundary_vertex(&self, i: usize) -> VertexId {
        if i == 0 {
            self.basepoint
        } else {
            self.head(self.boundary[i - 1])
        }
    }

    /// The same complex with the boundary read backwards.
    pub fn mirrored(&self) -> VanKampenDiagram {
        let mut m = self.clone();
        m.boundary = self.boundary.iter().rev().map(|d| d.rev()).collect();
        m.faces = self
            .faces
            .iter()
            .map(|c| c.iter().rev().map(|d| d.rev()).collect())
            .collect();
        m
    }

    /// Cells of a directed path from its first vertex, alternating vertex
    /// and edge cells.
    pub fn path_cells(&self, start: VertexId, path: &[DirEdge]) -> Vec<Cell> {
        let mut out = vec![Cell::Vertex(start)];
        for &d in path {
            out.push(Cell::Edge(d.edge));
            out.push(Cell::Vertex(self.head(d)));
        }
        out
    }

    pub fn incident(&self, a: Cell, b: Cell) -> bool {
        use Cell::*;
        match (a, b) {
            (Vertex(v), Edge(e)) | (Edge(e), Vertex(v)) => {
                let e = &self.edges[e.index()];
                e.src == v || e.dst == v
            }
            (Edge(e), Face(f)) | (Face(f), Edge(e)) => {
                self.faces[f.index()].iter().any(|d| d.edge == e)
            }
            (Vertex(v), Face(f)) | (Face(f), Vertex(v)) => {
                self.faces[f.index()].iter().any(|&d| self.tail(d) == v)
            }
            _ => a == b,
        }
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<(EdgeId, VertexId)>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.src.index()].push((EdgeId(i as u32), e.dst));
            adj[e.dst.index()].push((EdgeId(i as u32), e.src));
        }
        adj
    }

    /// Breadth-first distances from the basepoint in the 1-skeleton.
    pub fn vertex_distances(&self) -> Vec<u32> {
        let adj = self.adjacency();
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[self.basepoint.index()] = 0;
        let mut q = VecDeque::from([self.basepoint]);
        while let Some(v) = q.pop_front() {
            for &(_, w) in &adj[v.index()] {
                if dist[w.index()] == u32::MAX {
                    dist[w.index()] = dist[v.index()] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Geodesic edge path from the basepoint to `target`, preferring lower
    /// edge ids.
    pub fn geodesic_to(&self, target: VertexId) -> Vec<DirEdge> {
        let adj = self.adjacency();
        let mut prev: Vec<Option<DirEdge>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[self.basepoint.index()] = true;
        let mut q = VecDeque::from([self.basepoint]);
        while let Some(v) = q.pop_front() {
            if v == target {
                break;
            }
            let mut next = adj[v.index()].clone();
            next.sort();
            for (e, w) in next {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    let fwd = self.edges[e.index()].src == v;
                    prev[w.index()] = Some(DirEdge::new(e, fwd));
                    q.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = target;
        while cur != self.basepoint {
            let d = prev[cur.index()].expect("diagram is connected");
            path.push(d);
            cur = self.tail(d);
        }
        path.reverse();
        path
    }

    /// Vertices reached from the basepoint by reading `w`.
    pub fn read_from_basepoint(&self, w: &Word) -> BTreeSet<VertexId> {
        let adj = self.adjacency();
        let mut cur = BTreeSet::from([self.basepoint]);
        for a in w.iter() {
            let mut next = BTreeSet::new();
            for &v in &cur {
                for &(e, u) in &adj[v.index()] {
                    let ed = &self.edges[e.index()];
                    if (ed.src == v && ed.label == a)
                        || (ed.dst == v && self.alphabet.inverse(ed.label) == a)
                    {
                        next.insert(u);
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub euler_characteristic: i64,
    pub boundary_closed: bool,
    pub boundary_word_ok: bool,
    pub open_faces: Vec<FaceId>,
    pub non_relator_faces: Vec<FaceId>,
    /// Edges not bordered by exactly two sides (faces or the boundary).
    pub side_failures: Vec<EdgeId>,
    pub basepoint_projection_ok: bool,
    pub projection_failures: Vec<EdgeId>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.euler_characteristic == 1
            && self.boundary_closed
            && self.boundary_word_ok
            && self.open_faces.is_empty()
            && self.non_relator_faces.is_empty()
            && self.side_failures.is_empty()
            && self.basepoint_projection_ok
            && self.projection_failures.is_empty()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.euler_characteristic != 1 {
            out.push(format!(
                "euler characteristic {}",
                self.euler_characteristic
            ));
        }
        if !self.boundary_closed {
            out.push("boundary is not a closed path at the basepoint".into());
        }
        if !self.boundary_word_ok {
            out.push("boundary label differs from the expected word".into());
        }
        if !self.open_faces.is_empty() {
            out.push(format!(
                "{} faces with open boundary",
                self.open_faces.len()
            ));
        }
        if !self.non_relator_faces.is_empty() {
            out.push(format!(
                "{} faces not labeled by relators",
                self.non_relator_faces.len()
            ));
        }
        if !self.side_failures.is_empty() {
            out.push(format!(
                "{} edges without two sides",
                self.side_failures.len()
            ));
        }
        if !self.basepoint_projection_ok {
            out.push("basepoint does not project to the identity".into());
        }
        if !self.projection_failures.is_empty() {
            out.push(format!(
                "{} edges with inconsistent projection",
                self.projection_failures.len()
            ));
        }
        out
    }
}

impl VanKampenDiagram {
    fn closed_at(&self, start: VertexId, cycle: &[DirEdge]) -> bool {
        let mut cur = start;
        for &d in cycle {
            if self.tail(d) != cur {
                return false;
            }
            cur = self.head(d);
        }
        cur == start
    }

    /// Checks the disk invariants, face labels against `p` (which should be
    /// symmetrized), and the projection into `ball`.
    pub fn validate(
        &self,
        p: &Presentation,
        ball: &CayleyBall,
        expected: Option<&Word>,
    ) -> ValidationReport {
        let mut r = ValidationReport {
            euler_characteristic: self.euler_characteristic(),
            boundary_closed: self.closed_at(self.basepoint, &self.boundary),
            boundary_word_ok: expected.is_none_or(|w| &self.boundary_word() == w),
            basepoint_projection_ok: self.projection(self.basepoint) == ElementId::IDENTITY,
            ..ValidationReport::default()
        };
        for f in self.faces() {
            let c = self.face(f);
            if c.is_empty() || !self.closed_at(self.tail(c[0]), c) {
                r.open_faces.push(f);
            }
            if !p.contains(&self.face_word(f)) {
                r.non_relator_faces.push(f);
            }
        }
        let mut sides = vec![0usize; self.edge_count()];
        for d in self.boundary.iter().chain(self.faces.iter().flatten()) {
            sides[d.edge.index()] += 1;
        }
        r.side_failures = sides
            .iter()
            .enumerate()
            .filter(|(_, &n)| n != 2)
            .map(|(i, _)| EdgeId(i as u32))
            .collect();
        for e in self.edges() {
            let ed = self.edge(e);
            let ps = self.projection(ed.src);
            let pd = self.projection(ed.dst);
            let ok = ps.index() < ball.len()
                && pd.index() < ball.len()
                && ball.neighbor(ps, ed.label) == Some(pd);
            if !ok {
                r.projection_failures.push(e);
            }
        }
        r
    }
}

/// Coarse distance to the basepoint of every cell, in quarters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseProfile {
    pub vertices: Vec<QuarterDist>,
    pub edges: Vec<QuarterDist>,
    pub faces: Vec<QuarterDist>,
}

impl CoarseProfile {
    pub fn cell(&self, c: Cell) -> QuarterDist {
        match c {
            Cell::Vertex(v) => self.vertices[v.index()],
            Cell::Edge(e) => self.edges[e.index()],
            Cell::Face(f) => self.faces[f.index()],
        }
    }

    pub fn max_vertex(&self) -> QuarterDist {
        self.vertices.iter().copied().max().unwrap_or_default()
    }

    fn from_vertices(d: &VanKampenDiagram, vertices: Vec<QuarterDist>) -> Self {
        let edges: Vec<QuarterDist> = d
            .edges
            .iter()
            .map(|e| vertices[e.src.index()].min(vertices[e.dst.index()]) + QuarterDist::HALF)
            .collect();
        let faces = d
            .faces
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| edges[x.edge.index()])
                    .max()
                    .expect("faces have nonempty boundary")
                    - QuarterDist::QUARTER
            })
            .collect();
        CoarseProfile {
            vertices,
            edges,
            faces,
        }
    }
}

pub fn coarse_profile_intrinsic(d: &VanKampenDiagram) -> CoarseProfile {
    let vertices = d
        .vertex_distances()
        .into_iter()
        .map(QuarterDist::from_int)
        .collect();
    CoarseProfile::from_vertices(d, vertices)
}

/// Values of the projected cells in the Cayley complex.
pub fn coarse_profile_extrinsic(
    d: &VanKampenDiagram,
    ball: &CayleyBall,
) -> Result<CoarseProfile, DiagramError> {
    let mut vertices = Vec::with_capacity(d.vertex_count());
    for v in d.vertices() {
        let g = d.projection(v);
        if g.index() >= ball.len() {
            return Err(DiagramError::BallTooSmall { vertex: v.0 });
        }
        vertices.push(QuarterDist::from_int(ball.dist(g) as u32));
    }
    Ok(CoarseProfile::from_vertices(d, vertices))
}

/// Faces whose projected boundary runs over some edge of the Cayley graph
/// more than once.
pub fn collapsed_faces(d: &VanKampenDiagram) -> Vec<FaceId> {
    let mut out = Vec::new();
    for f in d.faces() {
        let mut seen = BTreeSet::new();
        let mut collapsed = false;
        for &x in d.face(f) {
            let (s, t) = (d.projection(d.tail(x)), d.projection(d.head(x)));
            let a = d.label(x);
            let key = if (s, a) <= (t, d.alphabet.inverse(a)) {
                (s, a)
            } else {
                (t, d.alphabet.inverse(a))
            };
            if !seen.insert(key) {
                collapsed = true;
            }
        }
        if collapsed {
            out.push(f);
        }
    }
    out
}

/// Intrinsic and extrinsic diameters: the largest vertex values.
pub fn diameters(intrinsic: &CoarseProfile, extrinsic: &CoarseProfile) -> (u32, u32) {
    (
        intrinsic.max_vertex().floor(),
        extrinsic.max_vertex().floor(),
    )
}

/// Words of length at most `max_len` representing ε, as a symmetrized
/// presentation (`P_k` for almost convex groups, `P_K` for fellow
/// travelers).
pub fn short_relator_presentation(
    ball: &CayleyBall,
    max_len: usize,
) -> Result<Presentation, crate::ball::BallError> {
    let words = ball.identity_words(max_len, false)?;
    Ok(Presentation::new(ball.alphabet().clone(), words)
        .symmetrize()
        .presentation)
}

pub fn to_json(d: &VanKampenDiagram, ball: &CayleyBall, profile: Option<&CoarseProfile>) -> Value {
    let al = &d.alphabet;
    let dists = d.vertex_distances();
    let vertices: Vec<Value> = d
        .vertices()
        .map(|v| {
            let g = d.projection(v);
            json!({
                "id": v.0,
                "projection": al.render(ball.nf(g)),
                "dist": dists[v.index()],
            })
        })
        .collect();
    let edges: Vec<Value> = d
        .edges()
        .map(|e| {
            let ed = d.edge(e);
            let tree =
                ball.is_degenerate(crate::ball::BallEdge::new(d.projection(ed.src), ed.label));
            json!({
                "id": e.0,
                "src": ed.src.0,
                "dst": ed.dst.0,
                "label": al.name(ed.label),
                "tree": tree,
            })
        })
        .collect();
    let dir = |x: &DirEdge| json!({"edge": x.edge.0, "forward": x.forward});
    let faces: Vec<Value> = d
        .faces()
        .map(|f| {
            json!({
                "id": f.0,
                "cycle": d.face(f).iter().map(dir).collect::<Vec<_>>(),
                "label": al.render(&d.face_word(f)),
            })
        })
        .collect();
    let mut out = json!({
        "basepoint": d.basepoint.0,
        "word": al.render(&d.boundary_word()),
        "vertices": vertices,
        "edges": edges,
        "faces": faces,
        "boundary": d.boundary.iter().map(dir).collect::<Vec<_>>(),
    });
    if let Some(p) = profile {
        let q = |v: &[QuarterDist]| v.iter().map(|x| x.quarters()).collect::<Vec<_>>();
        out["profile"] = json!({
            "vertices": q(&p.vertices),
            "edges": q(&p.edges),
            "faces": q(&p.faces),
        });
    }
    out
}

/// Boundary vertices on a circle, interior vertices placed by repeated
/// neighbor averaging.
pub fn to_svg(d: &VanKampenDiagram) -> String {
    let size = 480.0_f64;
    let c = size / 2.0;
    let radius = size * 0.42;
    let n = d.vertex_count();
    let mut pos = vec![(c, c); n];
    let mut fixed = vec![false; n];
    let mut ring: Vec<VertexId> = Vec::new();
    for i in 0..d.boundary.len().max(1) {
        let v = d.boundary_vertex(i);
        if !fixed[v.index()] {
            fixed[v.index()] = true;
            ring.push(v);
        }
    }
    if !fixed[d.basepoint.index()] {
        fixed[d.basepoint.index()] = true;
        ring.push(d.basepoint);
    }
    let m = ring.len() as f64;
    for (i, v) in ring.iter().enumerate() {
        let t = std::f64::consts::TAU * i as f64 / m - std::f64::consts::FRAC_PI_2;
        pos[v.index()] = (c + radius * t.cos(), c + radius * t.sin());
    }
    let adj = d.adjacency();
    for _ in 0..500 {
        for v in 0..n {
            if fixed[v] || adj[v].is_empty() {
                continue;
            }
            let (sx, sy) = adj[v].iter().fold((0.0, 0.0), |(x, y), &(_, w)| {
                (x + pos[w.index()].0, y + pos[w.index()].1)
            });
            let k = adj[v].len() as f64;
            pos[v] = (sx / k, sy / k);
        }
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    for f in d.faces() {
        let pts: Vec<String> = d
            .face(f)
            .iter()
            .map(|&x| {
                let p = pos[d.tail(x).index()];
                format!("{:.1},{:.1}", p.0, p.1)
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#dde8f4" stroke="none"/>"##,
            pts.join(" ")
        );
    }
    for e in d.edges() {
        let ed = d.edge(e);
        let (a, b) = (pos[ed.src.index()], pos[ed.dst.index()]);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
            a.0, a.1, b.0, b.1
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" fill="darkred">{}</text>"#,
            (a.0 + b.0) / 2.0,
            (a.1 + b.1) / 2.0,
            d.alphabet.name(ed.label)
        );
    }
    for v in d.vertices() {
        let p = pos[v.index()];
        let fill = if v == d.basepoint { "red" } else { "black" };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{fill}"/>"#,
            p.0, p.1
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Groups cell values by kind for reporting.
pub fn profile_histogram(p: &CoarseProfile) -> BTreeMap<QuarterDist, usize> {
    let mut h = BTreeMap::new();
    for q in p.vertices.iter().chain(&p.edges).chain(&p.faces) {
        *h.entry(*q).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{RewritingSystem, Rule};

    fn z2_ball(n: usize) -> CayleyBall {
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
        let rs = RewritingSystem::new(al.clone(), rules).unwrap();
        CayleyBall::build(&rs, al, n).unwrap()
    }

    /// The square a b A B based at a corner.
    fn square(ball: &CayleyBall) -> VanKampenDiagram {
        let al = ball.alphabet().clone();
        let l = |s: &str| al.letter(s).unwrap();
        let e = |s: &str| ball.lookup(&al.parse_word(s).unwrap()).unwrap();
        let proj = vec![e(""), e("a"), e("a b"), e("b")];
        let edges = vec![
            DiagramEdge {
                src: VertexId(0),
                dst: VertexId(1),
                label: l("a"),
            },
            DiagramEdge {
                src: VertexId(1),
                dst: VertexId(2),
                label: l("b"),
            },
            DiagramEdge {
                src: VertexId(3),
                dst: VertexId(2),
                label: l("a"),
            },
            DiagramEdge {
                src: VertexId(0),
                dst: VertexId(3),
                label: l("b"),
            },
        ];
        let cycle = vec![
            DirEdge::new(EdgeId(0), true),
            DirEdge::new(EdgeId(1), true),
            DirEdge::new(EdgeId(2), false),
            DirEdge::new(EdgeId(3), false),
        ];
        VanKampenDiagram::new(al, proj, edges, vec![cycle.clone()], VertexId(0), cycle)
    }

    fn segment(ball: &CayleyBall) -> VanKampenDiagram {
        let al = ball.alphabet().clone();
        let a = al.letter("a").unwrap();
        let ga = ball.neighbor(ElementId::IDENTITY, a).unwrap();
        VanKampenDiagram::new(
            al,
            vec![ElementId::IDENTITY, ga],
            vec![DiagramEdge {
                src: VertexId(0),
                dst: VertexId(1),
                label: a,
            }],
            Vec::new(),
            VertexId(0),
            vec![
                DirEdge::new(EdgeId(0), true),
                DirEdge::new(EdgeId(0), false),
            ],
        )
    }

    fn commutator(ball: &CayleyBall) -> Presentation {
        let al = ball.alphabet().clone();
        Presentation::new(al.clone(), [al.parse_word("a b A B").unwrap()])
            .symmetrize()
            .presentation
    }

    #[test]
    fn square_is_valid() {
        let ball = z2_ball(3);
        let d = square(&ball);
        let w = ball.alphabet().parse_word("a b A B").unwrap();
        let r = d.validate(&commutator(&ball), &ball, Some(&w));
        assert!(r.passed(), "{:?}", r.failures());
        assert_eq!(d.euler_characteristic(), 1);
    }

    #[test]
    fn segment_is_valid() {
        let ball = z2_ball(2);
        let d = segment(&ball);
        let w = ball.alphabet().parse_word("a A").unwrap();
        let r = d.validate(&commutator(&ball), &ball, Some(&w));
        assert!(r.passed(), "{:?}", r.failures());
        assert_eq!(d.face_count(), 0);
    }

    #[test]
    fn non_relator_face_reported() {
        let ball = z2_ball(3);
        let d = square(&ball);
        let al = ball.alphabet().clone();
        let p = Presentation::new(al.clone(), [al.parse_word("a a a a").unwrap()])
            .symmetrize()
            .presentation;
        let r = d.validate(&p, &ball, None);
        assert_eq!(r.non_relator_faces, vec![FaceId(0)]);
        assert!(!r.passed());
    }

    #[test]
    fn square_profiles() {
        let ball = z2_ball(3);
        let d = square(&ball);
        let p = coarse_profile_intrinsic(&d);
        let q = |n| QuarterDist(n);
        assert_eq!(p.vertices, vec![q(0), q(4), q(8), q(4)]);
        assert_eq!(p.edges, vec![q(2), q(6), q(6), q(2)]);
        assert_eq!(p.faces, vec![q(5)]);
        let x = coarse_profile_extrinsic(&d, &ball).unwrap();
        assert_eq!(x, p);
        assert_eq!(diameters(&p, &x), (2, 2));
    }

    #[test]
    fn trivial_profiles() {
        let ball = z2_ball(1);
        let d = VanKampenDiagram::single_vertex(ball.alphabet().clone());
        let p = coarse_profile_intrinsic(&d);
        assert_eq!(p.vertices, vec![QuarterDist(0)]);
        assert!(p.edges.is_empty() && p.faces.is_empty());
        let x = coarse_profile_extrinsic(&d, &ball).unwrap();
        assert_eq!(diameters(&p, &x), (0, 0));
        let s = segment(&ball);
        let p = coarse_profile_intrinsic(&s);
        assert_eq!(p.vertices, vec![QuarterDist(0), QuarterDist(4)]);
        assert_eq!(p.edges, vec![QuarterDist(2)]);
    }

    #[test]
    fn folded_projection_lowers_extrinsic_values() {
        // a path a b A B drawn as a hair of four edges: the far end projects
        // back to ε
        let ball = z2_ball(3);
        let al = ball.alphabet().clone();
        let l = |s: &str| al.letter(s).unwrap();
        let e = |s: &str| ball.lookup(&al.parse_word(s).unwrap()).unwrap();
        let proj = vec![e(""), e("a"), e("a b"), e("b"), e("")];
        let edges = vec![
            DiagramEdge {
                src: VertexId(0),
                dst: VertexId(1),
                label: l("a"),
            },
            DiagramEdge {
                src: VertexId(1),
                dst: VertexId(2),
                label: l("b"),
            },
            DiagramEdge {
                src: VertexId(2),
                dst: VertexId(3),
                label: l("A"),
            },
            DiagramEdge {
                src: VertexId(3),
                dst: VertexId(4),
                label: l("B"),
            },
        ];
        let path: Vec<DirEdge> = (0..4).map(|i| DirEdge::new(EdgeId(i), true)).collect();
        let mut boundary = path.clone();
        boundary.extend(path.iter().rev().map(|d| d.rev()));
        let d = VanKampenDiagram::new(al, proj, edges, Vec::new(), VertexId(0), boundary);
        let i = coarse_profile_intrinsic(&d);
        let x = coarse_profile_extrinsic(&d, &ball).unwrap();
        assert_eq!(i.vertices[4], QuarterDist(16));
        assert_eq!(x.vertices[4], QuarterDist(0));
        for c in d.cells() {
            assert!(x.cell(c) <= i.cell(c));
        }
    }

    #[test]
    fn mirror_reverses_boundary() {
        let ball = z2_ball(3);
        let d = square(&ball);
        let m = d.mirrored();
        assert_eq!(
            m.boundary_word(),
            ball.alphabet().formal_inverse(&d.boundary_word())
        );
        assert!(m.validate(&commutator(&ball), &ball, None).passed());
    }

    #[test]
    fn exports() {
        let ball = z2_ball(3);
        let d = square(&ball);
        let p = coarse_profile_intrinsic(&d);
        let j = to_json(&d, &ball, Some(&p));
        assert_eq!(j["vertices"].as_array().unwrap().len(), 4);
        assert_eq!(j["profile"]["faces"][0], 5);
        assert_eq!(j["word"], "a b A B");
        let svg = to_svg(&d);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<line").count(), 4);
    }

    #[test]
    fn short_relators() {
        let ball = z2_ball(3);
        let p = short_relator_presentation(&ball, 4).unwrap();
        assert!(p.contains(&ball.alphabet().parse_word("a b A B").unwrap()));
        assert!(p.contains(&ball.alphabet().parse_word("a A").unwrap()));
    }
}
