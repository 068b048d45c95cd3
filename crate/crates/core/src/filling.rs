//! N-diagrams built by Noetherian induction over a flow function, seashell
//! gluing, finite-group fillings and thin ladder diagrams, each with
//! discretized combing paths.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::ball::{BallEdge, CayleyBall, ElementId};
use crate::diagram::{Cell, DiagramEdge, DirEdge, EdgeId, FaceId, VanKampenDiagram, VertexId};
use crate::flow::FlowFunction;
use crate::words::{Alphabet, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FillingError {
    #[error("descent cycle through edge ({source_nf}, {letter})")]
    CycleDetected { source_nf: String, letter: String },
    #[error("ball too small for edge ({source_nf}, {letter})")]
    BallTooSmall { source_nf: String, letter: String },
    #[error("path of `{0}` leaves the ball")]
    WordOutsideBall(String),
    #[error("no flow path assigned to edge ({source_nf}, {letter})")]
    MissingFlow { source_nf: String, letter: String },
    #[error("`{0}` does not represent the identity")]
    NotIdentity(String),
    #[error("normal form of `{0}` does not label a simple path")]
    NonSimpleNormalForm(String),
    #[error("catalog has no diagram for `{0}`")]
    CatalogIncomplete(String),
    #[error("ball does not close up; the group is not verified finite")]
    NotFinite,
    #[error("rung {step} of edge ({source_nf}, {letter}) has length {length} > {k}")]
    FellowTravelerViolation {
        source_nf: String,
        letter: String,
        step: usize,
        length: usize,
        k: usize,
    },
    #[error("internal gluing error: {0}")]
    Internal(String),
}

/// Cells from the basepoint to a boundary sample, consecutive cells incident.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombingPath {
    pub cells: Vec<Cell>,
}

impl CombingPath {
    pub fn new(cells: Vec<Cell>) -> Self {
        CombingPath { cells }
    }

    pub fn last(&self) -> Cell {
        *self.cells.last().expect("combing paths are nonempty")
    }

    /// Starts at the basepoint and moves only between incident cells.
    pub fn is_valid_in(&self, d: &VanKampenDiagram) -> bool {
        self.cells.first() == Some(&Cell::Vertex(d.basepoint()))
            && self
                .cells
                .windows(2)
                .all(|p| p[0] != p[1] && d.incident(p[0], p[1]))
    }

    fn extended(&self, more: &[Cell]) -> CombingPath {
        let mut cells = self.cells.clone();
        cells.extend_from_slice(more);
        CombingPath { cells }
    }
}

/// Combing of an N-diagram: paths to both endpoints of the distinguished
/// edge and one path per interior sweep class of that edge, ordered from
/// the source side to the target side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCombing {
    pub start: CombingPath,
    pub end: CombingPath,
    pub interior: Vec<CombingPath>,
}

impl EdgeCombing {
    /// The middle interior class.
    pub fn representative(&self) -> &CombingPath {
        &self.interior[self.interior.len() / 2]
    }

    pub fn paths(&self) -> impl Iterator<Item = &CombingPath> {
        std::iter::once(&self.start)
            .chain(std::iter::once(&self.end))
            .chain(self.interior.iter())
    }

    fn reversed(&self) -> EdgeCombing {
        let mut interior = self.interior.clone();
        interior.reverse();
        EdgeCombing {
            start: self.end.clone(),
            end: self.start.clone(),
            interior,
        }
    }
}

/// A diagram with boundary `y_g a y_h⁻¹` and its edge combing.
#[derive(Clone, Debug)]
pub struct NDiagram {
    pub edge: BallEdge,
    pub diagram: VanKampenDiagram,
    pub combing: EdgeCombing,
    /// Index of the distinguished edge in the boundary circuit, `l(y_g)`.
    pub edge_pos: usize,
}

impl NDiagram {
    pub fn hat_edge(&self) -> DirEdge {
        self.diagram.boundary()[self.edge_pos]
    }

    /// The same diagram read as the N-diagram of the reverse edge.
    pub fn mirrored(&self, ball: &CayleyBall) -> NDiagram {
        let len = self.diagram.boundary().len();
        NDiagram {
            edge: ball
                .reverse(self.edge)
                .expect("N-diagram edges lie in the ball"),
            diagram: self.diagram.mirrored(),
            combing: self.combing.reversed(),
            edge_pos: len - 1 - self.edge_pos,
        }
    }
}

/// One combing path per boundary vertex and a list of interior classes per
/// boundary edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramCombing {
    pub vertex_paths: Vec<CombingPath>,
    pub edge_paths: Vec<Vec<CombingPath>>,
}

impl DiagramCombing {
    pub fn paths(&self) -> impl Iterator<Item = &CombingPath> {
        self.vertex_paths
            .iter()
            .chain(self.edge_paths.iter().flatten())
    }
}

#[derive(Clone, Debug)]
pub struct CombedDiagram {
    pub word: Word,
    pub diagram: VanKampenDiagram,
    pub combing: DiagramCombing,
}

fn edge_names(ball: &CayleyBall, e: BallEdge) -> (String, String) {
    (
        ball.alphabet().render(ball.nf(e.source)),
        ball.alphabet().name(e.letter).to_string(),
    )
}

// ---------------------------------------------------------------------------
// gluing

#[derive(Clone, Copy)]
struct Offsets {
    v: u32,
    e: u32,
    f: u32,
}

impl Offsets {
    fn cell(&self, c: Cell) -> Cell {
        match c {
            Cell::Vertex(v) => Cell::Vertex(VertexId(v.0 + self.v)),
            Cell::Edge(e) => Cell::Edge(EdgeId(e.0 + self.e)),
            Cell::Face(f) => Cell::Face(FaceId(f.0 + self.f)),
        }
    }

    fn vertex(&self, v: VertexId) -> VertexId {
        VertexId(v.0 + self.v)
    }

    fn dir(&self, d: DirEdge) -> DirEdge {
        DirEdge::new(EdgeId(d.edge.0 + self.e), d.forward)
    }

    fn path(&self, p: &CombingPath) -> CombingPath {
        CombingPath::new(p.cells.iter().map(|&c| self.cell(c)).collect())
    }

    fn combing(&self, c: &EdgeCombing) -> EdgeCombing {
        EdgeCombing {
            start: self.path(&c.start),
            end: self.path(&c.end),
            interior: c.interior.iter().map(|p| self.path(p)).collect(),
        }
    }
}

struct Remap {
    vertex: Vec<u32>,
    edge: Vec<(u32, bool)>,
}

impl Remap {
    fn cell(&self, c: Cell) -> Cell {
        match c {
            Cell::Vertex(v) => Cell::Vertex(VertexId(self.vertex[v.index()])),
            Cell::Edge(e) => Cell::Edge(EdgeId(self.edge[e.index()].0)),
            Cell::Face(f) => Cell::Face(f),
        }
    }

    fn path(&self, p: &CombingPath) -> CombingPath {
        let mut cells: Vec<Cell> = p.cells.iter().map(|&c| self.cell(c)).collect();
        cells.dedup();
        CombingPath::new(cells)
    }

    fn combing(&self, c: &EdgeCombing) -> EdgeCombing {
        EdgeCombing {
            start: self.path(&c.start),
            end: self.path(&c.end),
            interior: c.interior.iter().map(|p| self.path(p)).collect(),
        }
    }
}

/// Disjoint pieces plus union-find identifications of vertices and of edges
/// (with a flip bit for edges glued against their stored direction).
struct Builder {
    alphabet: Arc<Alphabet>,
    vparent: Vec<u32>,
    vproj: Vec<ElementId>,
    eparent: Vec<(u32, bool)>,
    edges: Vec<DiagramEdge>,
    faces: Vec<Vec<DirEdge>>,
}

impl Builder {
    fn new(alphabet: Arc<Alphabet>) -> Self {
        Builder {
            alphabet,
            vparent: Vec::new(),
            vproj: Vec::new(),
            eparent: Vec::new(),
            edges: Vec::new(),
            faces: Vec::new(),
        }
    }

    fn add_vertex(&mut self, proj: ElementId) -> VertexId {
        let id = self.vproj.len() as u32;
        self.vproj.push(proj);
        self.vparent.push(id);
        VertexId(id)
    }

    fn add_edge(&mut self, src: VertexId, dst: VertexId, label: Letter) -> DirEdge {
        let id = self.edges.len() as u32;
        self.edges.push(DiagramEdge { src, dst, label });
        self.eparent.push((id, false));
        DirEdge::new(EdgeId(id), true)
    }

    fn add_face(&mut self, cycle: Vec<DirEdge>) -> FaceId {
        self.faces.push(cycle);
        FaceId(self.faces.len() as u32 - 1)
    }

    fn embed(&mut self, d: &VanKampenDiagram) -> Offsets {
        self.embed_mapped(d, |g| g)
    }

    /// Embeds `d` with the projection of each vertex passed through `proj`.
    fn embed_mapped(
        &mut self,
        d: &VanKampenDiagram,
        mut proj: impl FnMut(ElementId) -> ElementId,
    ) -> Offsets {
        let off = Offsets {
            v: self.vproj.len() as u32,
            e: self.edges.len() as u32,
            f: self.faces.len() as u32,
        };
        for v in d.vertices() {
            self.add_vertex(proj(d.projection(v)));
        }
        for e in d.edges() {
            let ed = d.edge(e);
            self.add_edge(off.vertex(ed.src), off.vertex(ed.dst), ed.label);
        }
        for f in d.faces() {
            let c = d.face(f).iter().map(|&x| off.dir(x)).collect();
            self.add_face(c);
        }
        off
    }

    fn tail(&self, d: DirEdge) -> VertexId {
        let e = &self.edges[d.edge.index()];
        if d.forward {
            e.src
        } else {
            e.dst
        }
    }

    fn head(&self, d: DirEdge) -> VertexId {
        self.tail(d.rev())
    }

    fn label(&self, d: DirEdge) -> Letter {
        let a = self.edges[d.edge.index()].label;
        if d.forward {
            a
        } else {
            self.alphabet.inverse(a)
        }
    }

    fn find_v(&mut self, v: u32) -> u32 {
        let mut r = v;
        while self.vparent[r as usize] != r {
            r = self.vparent[r as usize];
        }
        let mut cur = v;
        while self.vparent[cur as usize] != r {
            let next = self.vparent[cur as usize];
            self.vparent[cur as usize] = r;
            cur = next;
        }
        r
    }

    /// Root edge and whether `e` runs against it.
    fn find_e(&mut self, e: u32) -> (u32, bool) {
        let mut chain = Vec::new();
        let mut cur = e;
        let mut flip = false;
        while self.eparent[cur as usize].0 != cur {
            chain.push(cur);
            let (p, f) = self.eparent[cur as usize];
            flip ^= f;
            cur = p;
        }
        let root = cur;
        // compress: recompute each node's flip to the root
        let mut acc = flip;
        for &c in &chain {
            let f = self.eparent[c as usize].1;
            self.eparent[c as usize] = (root, acc);
            acc ^= f;
        }
        (root, flip)
    }

    fn glue_vertices(&mut self, a: VertexId, b: VertexId) -> Result<(), FillingError> {
        let ra = self.find_v(a.0);
        let rb = self.find_v(b.0);
        if ra == rb {
            return Ok(());
        }
        if self.vproj[ra as usize] != self.vproj[rb as usize] {
            return Err(FillingError::Internal(format!(
                "identifying vertices {ra} and {rb} with different projections"
            )));
        }
        self.vparent[rb as usize] = ra;
        Ok(())
    }

    /// Identifies the traversals `x` and `y`, endpoints included.
    fn glue_dir(&mut self, x: DirEdge, y: DirEdge) -> Result<(), FillingError> {
        if self.label(x) != self.label(y) {
            return Err(FillingError::Internal(
                "gluing edges with different labels".into(),
            ));
        }
        self.glue_vertices(self.tail(x), self.tail(y))?;
        self.glue_vertices(self.head(x), self.head(y))?;
        let (rx, fx) = self.find_e(x.edge.0);
        let (ry, fy) = self.find_e(y.edge.0);
        let ox = x.forward ^ fx;
        let oy = y.forward ^ fy;
        if rx == ry {
            if ox != oy {
                return Err(FillingError::Internal(
                    "gluing an edge to its reverse".into(),
                ));
            }
            return Ok(());
        }
        self.eparent[ry as usize] = (rx, ox ^ oy);
        Ok(())
    }

    fn finish(
        mut self,
        basepoint: VertexId,
        boundary: &[DirEdge],
    ) -> Result<(VanKampenDiagram, Remap), FillingError> {
        let nv = self.vproj.len();
        let mut vroot_id: HashMap<u32, u32> = HashMap::new();
        let mut vertex = vec![0u32; nv];
        let mut projection = Vec::new();
        for v in 0..nv as u32 {
            let r = self.find_v(v);
            let id = *vroot_id.entry(r).or_insert_with(|| {
                projection.push(self.vproj[r as usize]);
                projection.len() as u32 - 1
            });
            vertex[v as usize] = id;
        }
        let ne = self.edges.len();
        let mut eroot_id: HashMap<u32, u32> = HashMap::new();
        let mut edge = vec![(0u32, false); ne];
        let mut edges = Vec::new();
        for e in 0..ne as u32 {
            let (r, flip) = self.find_e(e);
            let id = *eroot_id.entry(r).or_insert_with(|| {
                let ed = self.edges[r as usize];
                edges.push(DiagramEdge {
                    src: VertexId(vertex[ed.src.index()]),
                    dst: VertexId(vertex[ed.dst.index()]),
                    label: ed.label,
                });
                edges.len() as u32 - 1
            });
            edge[e as usize] = (id, flip);
        }
        let map_dir = |d: DirEdge| {
            let (id, flip) = edge[d.edge.index()];
            DirEdge::new(EdgeId(id), d.forward ^ flip)
        };
        let faces = self
            .faces
            .iter()
            .map(|c| c.iter().map(|&d| map_dir(d)).collect())
            .collect();
        let boundary = boundary.iter().map(|&d| map_dir(d)).collect();
        let d = VanKampenDiagram::new(
            self.alphabet.clone(),
            projection,
            edges,
            faces,
            VertexId(vertex[basepoint.index()]),
            boundary,
        );
        Ok((d, Remap { vertex, edge }))
    }

    fn path_cells(&self, start: VertexId, path: &[DirEdge]) -> Vec<Cell> {
        let mut out = vec![Cell::Vertex(start)];
        for &d in path {
            out.push(Cell::Edge(d.edge));
            out.push(Cell::Vertex(self.head(d)));
        }
        out
    }

    /// New vertices and edges spelling the tree path from depth `from` to
    /// the end of `g`'s tree word, starting at `start`.
    fn tree_segment(
        &mut self,
        ball: &CayleyBall,
        g: ElementId,
        from: usize,
        start: VertexId,
    ) -> (Vec<DirEdge>, VertexId) {
        let word = ball.tree_word(g).clone();
        let path = ball.tree_path(g);
        let mut cur = start;
        let mut out = Vec::new();
        for j in from..word.len() {
            let v = self.add_vertex(path[j + 1]);
            out.push(self.add_edge(cur, v, word.letters()[j]));
            cur = v;
        }
        (out, cur)
    }
}

struct Chain {
    basepoint: VertexId,
    boundary: Vec<DirEdge>,
    combings: Vec<EdgeCombing>,
}

/// Glues N-diagrams of consecutive edges of a path along their shared
/// normal-form boundary arcs, starting at the basepoints.
fn glue_chain(b: &mut Builder, pieces: &[Arc<NDiagram>]) -> Result<Chain, FillingError> {
    let mut boundary: Vec<DirEdge> = Vec::new();
    let mut basepoint = VertexId(0);
    let mut combings = Vec::with_capacity(pieces.len());
    for (i, p) in pieces.iter().enumerate() {
        let off = b.embed(&p.diagram);
        let pb: Vec<DirEdge> = p.diagram.boundary().iter().map(|&d| off.dir(d)).collect();
        let pbase = off.vertex(p.diagram.basepoint());
        combings.push(off.combing(&p.combing));
        if i == 0 {
            boundary = pb;
            basepoint = pbase;
            continue;
        }
        b.glue_vertices(basepoint, pbase)?;
        let l = p.edge_pos;
        let len = boundary.len();
        if l > len {
            return Err(FillingError::Internal(
                "shared arc longer than boundary".into(),
            ));
        }
        for t in 0..l {
            b.glue_dir(boundary[len - 1 - t].rev(), pb[t])?;
        }
        boundary.truncate(len - l);
        boundary.extend_from_slice(&pb[l..]);
    }
    Ok(Chain {
        basepoint,
        boundary,
        combings,
    })
}

fn end_path_cells(b: &Builder, basepoint: VertexId, boundary: &[DirEdge], n: usize) -> Vec<Cell> {
    let rev: Vec<DirEdge> = boundary[boundary.len() - n..]
        .iter()
        .rev()
        .map(|d| d.rev())
        .collect();
    b.path_cells(basepoint, &rev)
}

// ---------------------------------------------------------------------------
// N-diagrams

/// Builds and memoizes N-diagrams for the directed edges of a ball.
pub struct FillingBuilder<'a> {
    ball: &'a CayleyBall,
    flow: &'a FlowFunction,
    memo: RwLock<HashMap<BallEdge, Arc<NDiagram>>>,
}

impl<'a> FillingBuilder<'a> {
    pub fn new(ball: &'a CayleyBall, flow: &'a FlowFunction) -> Self {
        FillingBuilder {
            ball,
            flow,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn ball(&self) -> &CayleyBall {
        self.ball
    }

    pub fn flow(&self) -> &FlowFunction {
        self.flow
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    /// The N-diagram of the directed edge `e`.
    pub fn ndiagram(&self, e: BallEdge) -> Result<Arc<NDiagram>, FillingError> {
        let mut stack = Vec::new();
        self.build(e, &mut stack)
    }

    /// The member of the combed N-filling for the undirected edge under
    /// `e`: the diagram of the canonical orientation, mirrored if `e` runs
    /// the other way.
    pub fn filling_piece(&self, e: BallEdge) -> Result<Arc<NDiagram>, FillingError> {
        let c = self.ball.canonical(e).ok_or_else(|| {
            let (source_nf, letter) = edge_names(self.ball, e);
            FillingError::BallTooSmall { source_nf, letter }
        })?;
        let d = self.ndiagram(c)?;
        if c == e {
            Ok(d)
        } else {
            Ok(Arc::new(d.mirrored(self.ball)))
        }
    }

    fn build(&self, e: BallEdge, stack: &mut Vec<BallEdge>) -> Result<Arc<NDiagram>, FillingError> {
        if let Some(d) = self.memo.read().unwrap().get(&e) {
            return Ok(d.clone());
        }
        if stack.contains(&e) {
            let (source_nf, letter) = edge_names(self.ball, e);
            return Err(FillingError::CycleDetected { source_nf, letter });
        }
        let Some(_) = self.ball.target(e) else {
            let (source_nf, letter) = edge_names(self.ball, e);
            return Err(FillingError::BallTooSmall { source_nf, letter });
        };
        let d = if self.ball.is_degenerate(e) {
            degenerate_ndiagram(self.ball, e)?
        } else {
            stack.push(e);
            let d = self.recursive(e, stack);
            stack.pop();
            d?
        };
        let d = Arc::new(d);
        self.memo.write().unwrap().insert(e, d.clone());
        Ok(d)
    }

    fn recursive(&self, e: BallEdge, stack: &mut Vec<BallEdge>) -> Result<NDiagram, FillingError> {
        let ball = self.ball;
        let (source_nf, letter) = edge_names(ball, e);
        if self.flow.is_unusable(e) {
            return Err(FillingError::BallTooSmall { source_nf, letter });
        }
        let fp = self.flow.get(e).ok_or(FillingError::MissingFlow {
            source_nf: source_nf.clone(),
            letter: letter.clone(),
        })?;
        let g = e.source;
        let h = ball.target(e).unwrap();
        let (lg, lh) = (ball.tree_word(g).len(), ball.tree_word(h).len());
        if fp.tail > lg || fp.head > lh {
            return Err(FillingError::Internal(format!(
                "flow factorization exceeds the tree words at ({source_nf}, {letter})"
            )));
        }
        let q = ball.tree_path(g)[lg - fp.tail];
        let r = ball.tree_path(h)[lh - fp.head];
        let c = fp.middle();
        let cpath = ball.trace(q, &c).ok_or(FillingError::BallTooSmall {
            source_nf: source_nf.clone(),
            letter: letter.clone(),
        })?;
        if cpath.last() != Some(&r) {
            return Err(FillingError::Internal(format!(
                "flow path of ({source_nf}, {letter}) does not match its factorization"
            )));
        }
        let mut pieces = Vec::with_capacity(c.len());
        for (i, a) in c.iter().enumerate() {
            pieces.push(self.build(BallEdge::new(cpath[i], a), stack)?);
        }

        let mut b = Builder::new(ball.alphabet().clone());
        let lq = lg - fp.tail;
        let (basepoint, inner, arc, classes): (
            VertexId,
            Vec<DirEdge>,
            std::ops::Range<usize>,
            Vec<CombingPath>,
        );
        if pieces.is_empty() {
            let base = b.add_vertex(ElementId::IDENTITY);
            let (seg, _) = b.tree_segment(ball, q, 0, base);
            let mut bd = seg.clone();
            bd.extend(seg.iter().rev().map(|d| d.rev()));
            let cls = CombingPath::new(b.path_cells(base, &seg));
            basepoint = base;
            arc = lq..lq;
            inner = bd;
            classes = vec![cls];
        } else {
            let chain = glue_chain(&mut b, &pieces)?;
            let k = pieces.len();
            let mut cls = Vec::new();
            for i in 0..=k {
                if i < k {
                    cls.push(chain.combings[i].start.clone());
                    cls.extend(chain.combings[i].interior.iter().cloned());
                } else {
                    cls.push(chain.combings[k - 1].end.clone());
                }
            }
            basepoint = chain.basepoint;
            arc = lq..lq + k;
            inner = chain.boundary;
            classes = cls;
        }
        let qhat = if lq == 0 {
            basepoint
        } else {
            b.head(inner[lq - 1])
        };
        let rhat = if arc.end == 0 {
            basepoint
        } else {
            b.head(inner[arc.end - 1])
        };
        let (xg, ghat) = b.tree_segment(ball, g, lq, qhat);
        let (xh, hhat) = b.tree_segment(ball, h, lh - fp.head, rhat);
        let ehat = b.add_edge(ghat, hhat, e.letter);
        let mut cycle: Vec<DirEdge> = xg.iter().rev().map(|d| d.rev()).collect();
        cycle.extend_from_slice(&inner[arc.clone()]);
        cycle.extend_from_slice(&xh);
        cycle.push(ehat.rev());
        let face = b.add_face(cycle);
        let mut boundary: Vec<DirEdge> = inner[..lq].to_vec();
        boundary.extend_from_slice(&xg);
        boundary.push(ehat);
        boundary.extend(xh.iter().rev().map(|d| d.rev()));
        boundary.extend_from_slice(&inner[arc.end..]);
        if boundary.len() != lg + 1 + lh {
            return Err(FillingError::Internal(format!(
                "N-diagram boundary of ({source_nf}, {letter}) has the wrong length"
            )));
        }
        let start = CombingPath::new(b.path_cells(basepoint, &boundary[..lg]));
        let end = CombingPath::new(end_path_cells(&b, basepoint, &boundary, lh));
        let tailcells = [Cell::Face(face), Cell::Edge(ehat.edge)];
        let interior: Vec<CombingPath> = classes.iter().map(|p| p.extended(&tailcells)).collect();
        let combing = EdgeCombing {
            start,
            end,
            interior,
        };
        let (diagram, remap) = b.finish(basepoint, &boundary)?;
        Ok(NDiagram {
            edge: e,
            diagram,
            combing: remap.combing(&combing),
            edge_pos: lg,
        })
    }

    /// N-diagrams of every directed edge with source in `B(n)` that the flow
    /// can build inside this ball.
    pub fn ndiagrams_up_to(&self, n: usize) -> Result<Vec<Arc<NDiagram>>, FillingError> {
        let mut out = Vec::new();
        for e in self.ball.inner_edges() {
            if self.ball.dist(e.source) <= n {
                out.push(self.ndiagram(e)?);
            }
        }
        Ok(out)
    }

    /// Fills `w` by gluing the N-filling pieces along the path of `w`.
    pub fn seashell(&self, w: &Word) -> Result<CombedDiagram, FillingError> {
        let ball = self.ball;
        let al = ball.alphabet();
        if w.is_empty() {
            return Ok(CombedDiagram {
                word: Word::new(),
                diagram: VanKampenDiagram::single_vertex(al.clone()),
                combing: DiagramCombing {
                    vertex_paths: vec![CombingPath::new(vec![Cell::Vertex(VertexId(0))])],
                    edge_paths: Vec::new(),
                },
            });
        }
        let path = ball
            .trace(ElementId::IDENTITY, w)
            .ok_or_else(|| FillingError::WordOutsideBall(al.render(w)))?;
        if *path.last().unwrap() != ElementId::IDENTITY {
            return Err(FillingError::NotIdentity(al.render(w)));
        }
        for &v in &path {
            let tp = ball.tree_path(v);
            let mut seen = std::collections::HashSet::new();
            if !tp.iter().all(|x| seen.insert(*x)) {
                return Err(FillingError::NonSimpleNormalForm(al.render(ball.nf(v))));
            }
        }
        let mut pieces = Vec::with_capacity(w.len());
        for (i, a) in w.iter().enumerate() {
            pieces.push(self.filling_piece(BallEdge::new(path[i], a))?);
        }
        let mut b = Builder::new(al.clone());
        let chain = glue_chain(&mut b, &pieces)?;
        if chain.boundary.len() != w.len() {
            return Err(FillingError::Internal(
                "seashell boundary has the wrong length".into(),
            ));
        }
        let (diagram, remap) = b.finish(chain.basepoint, &chain.boundary)?;
        let combings: Vec<EdgeCombing> = chain.combings.iter().map(|c| remap.combing(c)).collect();
        for i in 1..combings.len() {
            if combings[i - 1].end != combings[i].start {
                return Err(FillingError::Internal(format!(
                    "gluing condition fails at position {i}"
                )));
            }
        }
        let mut vertex_paths = vec![CombingPath::new(vec![Cell::Vertex(diagram.basepoint())])];
        vertex_paths.extend(combings.iter().map(|c| c.end.clone()));
        let edge_paths = combings.into_iter().map(|c| c.interior).collect();
        Ok(CombedDiagram {
            word: w.clone(),
            diagram,
            combing: DiagramCombing {
                vertex_paths,
                edge_paths,
            },
        })
    }
}

fn degenerate_ndiagram(ball: &CayleyBall, e: BallEdge) -> Result<NDiagram, FillingError> {
    let g = e.source;
    let h = ball.target(e).unwrap();
    let (lg, lh) = (ball.tree_word(g).len(), ball.tree_word(h).len());
    let mut b = Builder::new(ball.alphabet().clone());
    let base = b.add_vertex(ElementId::IDENTITY);
    // segment along the longer tree word; the distinguished edge is its last edge
    let (long, short_len, forward) = if lh == lg + 1 {
        (h, lg, true)
    } else {
        (g, lh, false)
    };
    let (seg, _) = b.tree_segment(ball, long, 0, base);
    let mut boundary: Vec<DirEdge> = seg.clone();
    boundary.extend(seg.iter().rev().map(|d| d.rev()));
    // forward: y_g · ê · y_h⁻¹ = seg ++ rev(seg); otherwise y_g ends with ê⁻¹
    let ehat = if forward { seg[lg] } else { seg[lh].rev() };
    debug_assert_eq!(boundary[lg], ehat);
    let start = CombingPath::new(b.path_cells(base, &boundary[..lg]));
    let end = CombingPath::new(end_path_cells(&b, base, &boundary, lh));
    let near = b.path_cells(base, &seg[..short_len]);
    let interior = vec![CombingPath::new(near).extended(&[Cell::Edge(ehat.edge)])];
    let combing = EdgeCombing {
        start,
        end,
        interior,
    };
    let (diagram, remap) = b.finish(base, &boundary)?;
    Ok(NDiagram {
        edge: e,
        diagram,
        combing: remap.combing(&combing),
        edge_pos: lg,
    })
}

// ---------------------------------------------------------------------------
// finite groups

/// Seashell fillings of every word of length at most `max_len` representing
/// the identity.
pub struct FiniteCatalog {
    entries: HashMap<Word, CombedDiagram>,
    max_len: usize,
    order: usize,
}

impl FiniteCatalog {
    pub fn build(fb: &FillingBuilder<'_>, max_len: usize) -> Result<Self, FillingError> {
        let ball = fb.ball();
        if !ball.boundary_complete() {
            return Err(FillingError::NotFinite);
        }
        let words = ball
            .identity_words(max_len, false)
            .map_err(|e| FillingError::Internal(e.to_string()))?;
        let mut entries = HashMap::with_capacity(words.len());
        for w in words {
            let d = fb.seashell(&w)?;
            entries.insert(w, d);
        }
        Ok(FiniteCatalog {
            entries,
            max_len,
            order: ball.len(),
        })
    }

    pub fn get(&self, w: &Word) -> Option<&CombedDiagram> {
        self.entries.get(w)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn max_intrinsic_diameter(&self) -> u32 {
        self.entries
            .values()
            .map(|c| c.diagram.vertex_distances().into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

/// Fills `u` in a finite group by repeatedly cutting off the earliest-ending
/// shortest subword representing ε and attaching its catalog diagram.
pub fn build_finite_filling(
    u: &Word,
    ball: &CayleyBall,
    catalog: &FiniteCatalog,
) -> Result<CombedDiagram, FillingError> {
    let al = ball.alphabet();
    if !ball.boundary_complete() {
        return Err(FillingError::NotFinite);
    }
    if u.is_empty() {
        return Ok(CombedDiagram {
            word: Word::new(),
            diagram: VanKampenDiagram::single_vertex(al.clone()),
            combing: DiagramCombing {
                vertex_paths: vec![CombingPath::new(vec![Cell::Vertex(VertexId(0))])],
                edge_paths: Vec::new(),
            },
        });
    }
    let path = ball
        .trace(ElementId::IDENTITY, u)
        .ok_or_else(|| FillingError::WordOutsideBall(al.render(u)))?;
    if *path.last().unwrap() != ElementId::IDENTITY {
        return Err(FillingError::NotIdentity(al.render(u)));
    }
    let mut b = Builder::new(al.clone());
    let verts: Vec<VertexId> = path.iter().map(|&g| b.add_vertex(g)).collect();
    let hair: Vec<DirEdge> = u
        .iter()
        .enumerate()
        .map(|(t, a)| b.add_edge(verts[t], verts[t + 1], a))
        .collect();
    let mut cur: Vec<usize> = (0..u.len()).collect();
    // (disk, offsets, attach vertex) and per original edge (disk, position)
    let mut disks: Vec<(&CombedDiagram, Offsets, VertexId)> = Vec::new();
    let mut owner = vec![(0usize, 0usize); u.len()];
    while !cur.is_empty() {
        let word: Word = cur.iter().map(|&t| u.letters()[t]).collect();
        let elems = ball.trace(ElementId::IDENTITY, &word).unwrap();
        let mut cut = None;
        'outer: for j in 1..elems.len() {
            for i in (0..j).rev() {
                if elems[i] == elems[j] {
                    cut = Some((i, j));
                    break 'outer;
                }
            }
        }
        let (i, j) = cut.ok_or_else(|| FillingError::Internal("no identity subword".into()))?;
        let sub = word.factor(i, j);
        let disk = catalog
            .get(&sub)
            .ok_or_else(|| FillingError::CatalogIncomplete(al.render(&sub)))?;
        // the disk is drawn at ε; translate it to the attaching element
        let at = elems[i];
        let mut outside = false;
        let off = b.embed_mapped(&disk.diagram, |g| {
            ball.walk(at, ball.nf(g)).unwrap_or_else(|| {
                outside = true;
                g
            })
        });
        if outside {
            return Err(FillingError::NotFinite);
        }
        let attach = b.tail(hair[cur[i]]);
        b.glue_vertices(off.vertex(disk.diagram.basepoint()), attach)?;
        for s in 0..(j - i) {
            b.glue_dir(off.dir(disk.diagram.boundary()[s]), hair[cur[i + s]])?;
            owner[cur[i + s]] = (disks.len(), s);
        }
        disks.push((disk, off, attach));
        cur.drain(i..j);
    }
    let (diagram, remap) = b.finish(verts[0], &hair)?;
    let join = |k: usize, p: &CombingPath| -> CombingPath {
        let (_, off, attach) = disks[k];
        let target = VertexId(remap.vertex[attach.index()]);
        let geo = diagram.geodesic_to(target);
        let mut cells = diagram.path_cells(diagram.basepoint(), &geo);
        let tail = remap.path(&off.path(p));
        cells.extend_from_slice(&tail.cells[1..]);
        CombingPath::new(cells)
    };
    let mut vertex_paths = Vec::with_capacity(u.len() + 1);
    let mut edge_paths = Vec::with_capacity(u.len());
    for t in 0..=u.len() {
        let (k, s) = if t < u.len() {
            owner[t]
        } else {
            let (k, s) = owner[t - 1];
            (k, s + 1)
        };
        vertex_paths.push(join(k, &disks[k].0.combing.vertex_paths[s]));
    }
    for &(k, s) in owner.iter() {
        let cls = disks[k].0.combing.edge_paths[s]
            .iter()
            .map(|p| join(k, p))
            .collect();
        edge_paths.push(cls);
    }
    Ok(CombedDiagram {
        word: u.clone(),
        diagram,
        combing: DiagramCombing {
            vertex_paths,
            edge_paths,
        },
    })
}

// ---------------------------------------------------------------------------
// thin diagrams

/// Ladder diagram for the edge `e` whose rungs are geodesics between the
/// synchronous prefixes of the two tree normal forms.
pub fn build_thin_diagram(
    ball: &CayleyBall,
    e: BallEdge,
    k: usize,
) -> Result<NDiagram, FillingError> {
    let (source_nf, letter) = edge_names(ball, e);
    let Some(h) = ball.target(e) else {
        return Err(FillingError::BallTooSmall { source_nf, letter });
    };
    if ball.is_degenerate(e) {
        return degenerate_ndiagram(ball, e);
    }
    let g = e.source;
    let yg = ball.tree_word(g).clone();
    let yh = ball.tree_word(h).clone();
    let (m, n) = (yg.len(), yh.len());
    let big_n = m.max(n);
    let pg = ball.tree_path(g);
    let ph = ball.tree_path(h);
    let u_at = |i: usize| pg[i.min(m)];
    let w_at = |i: usize| ph[i.min(n)];
    let mut rungs: Vec<Word> = Vec::with_capacity(big_n + 1);
    rungs.push(Word::new());
    for i in 1..big_n {
        let c = ball
            .shortest_path_within(u_at(i), w_at(i), ball.radius())
            .ok_or(FillingError::BallTooSmall {
                source_nf: source_nf.clone(),
                letter: letter.clone(),
            })?;
        if c.len() > k {
            return Err(FillingError::FellowTravelerViolation {
                source_nf,
                letter,
                step: i,
                length: c.len(),
                k,
            });
        }
        rungs.push(c);
    }
    rungs.push(Word::single(e.letter));

    let mut b = Builder::new(ball.alphabet().clone());
    let base = b.add_vertex(ElementId::IDENTITY);
    let mut uv = vec![base];
    let mut wv = vec![base];
    let mut rung_paths: Vec<Vec<DirEdge>> = vec![Vec::new()];
    let mut aside: Vec<DirEdge> = Vec::new();
    let mut bside: Vec<DirEdge> = Vec::new();
    let mut sweep: Vec<Cell> = vec![Cell::Vertex(base)];
    let mut ehat = None;
    for i in 1..=big_n {
        let empty = rungs[i].is_empty();
        let (ui, wi);
        if empty {
            let z = if i > m {
                uv[i - 1]
            } else if i > n {
                wv[i - 1]
            } else {
                b.add_vertex(u_at(i))
            };
            ui = z;
            wi = z;
        } else {
            ui = if i > m {
                uv[i - 1]
            } else {
                b.add_vertex(u_at(i))
            };
            wi = if i > n {
                wv[i - 1]
            } else {
                b.add_vertex(w_at(i))
            };
        }
        uv.push(ui);
        wv.push(wi);
        let ai = (i <= m).then(|| yg.letters()[i - 1]);
        let bi = (i <= n).then(|| yh.letters()[i - 1]);
        let fold = i <= m && i <= n && rungs[i - 1].is_empty() && empty && ai == bi;
        let a_edge = ai.map(|a| b.add_edge(uv[i - 1], ui, a));
        let b_edge = match bi {
            Some(_) if fold => a_edge,
            Some(x) => Some(b.add_edge(wv[i - 1], wi, x)),
            None => None,
        };
        if let Some(x) = a_edge {
            aside.push(x);
        }
        if let Some(x) = b_edge {
            bside.push(x);
        }
        // rung i from ui to wi
        let mut rung = Vec::new();
        if !empty {
            let verts = ball.trace(u_at(i), &rungs[i]).unwrap();
            let mut cur = ui;
            for (j, a) in rungs[i].iter().enumerate() {
                let next = if j + 1 == rungs[i].len() {
                    wi
                } else {
                    b.add_vertex(verts[j + 1])
                };
                rung.push(b.add_edge(cur, next, a));
                cur = next;
            }
        }
        if i == big_n {
            ehat = Some(rung[0]);
        }
        if fold {
            sweep.push(Cell::Edge(a_edge.unwrap().edge));
            sweep.push(Cell::Vertex(ui));
        } else {
            let mut cycle = Vec::new();
            cycle.extend(a_edge);
            cycle.extend_from_slice(&rung);
            cycle.extend(b_edge.map(|x| x.rev()));
            cycle.extend(rung_paths[i - 1].iter().rev().map(|d| d.rev()));
            let f = b.add_face(cycle);
            sweep.push(Cell::Face(f));
            if i < big_n {
                let cells = b.path_cells(ui, &rung);
                sweep.push(cells[cells.len() / 2]);
            }
        }
        rung_paths.push(rung);
    }
    let ehat = ehat.unwrap();
    sweep.push(Cell::Edge(ehat.edge));
    let mut boundary = aside.clone();
    boundary.push(ehat);
    boundary.extend(bside.iter().rev().map(|d| d.rev()));
    let start = CombingPath::new(b.path_cells(base, &boundary[..m]));
    let end = CombingPath::new(end_path_cells(&b, base, &boundary, n));
    let combing = EdgeCombing {
        start,
        end,
        interior: vec![CombingPath::new(sweep)],
    };
    let (diagram, remap) = b.finish(base, &boundary)?;
    Ok(NDiagram {
        edge: e,
        diagram,
        combing: remap.combing(&combing),
        edge_pos: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{coarse_profile_intrinsic, short_relator_presentation};
    use crate::flow::{ac_flow, rewriting_flow};
    use crate::rewrite::{RewritingSystem, Rule};

    fn z2() -> RewritingSystem {
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

    fn z3() -> RewritingSystem {
        let al = Arc::new(Alphabet::case_paired(&["a", "A"]).unwrap());
        let r = |l: &str, r: &str| Rule::new(al.parse_word(l).unwrap(), al.parse_word(r).unwrap());
        let rules = vec![r("a a", "A"), r("a A", ""), r("A a", ""), r("A A", "a")];
        RewritingSystem::new(al, rules).unwrap()
    }

    fn edge(ball: &CayleyBall, g: &str, a: &str) -> BallEdge {
        let al = ball.alphabet();
        BallEdge::new(
            ball.lookup(&al.parse_word(g).unwrap()).unwrap(),
            al.letter(a).unwrap(),
        )
    }

    fn check_nd(nd: &NDiagram, ball: &CayleyBall, ff: &FlowFunction) {
        let al = ball.alphabet();
        let h = ball.target(nd.edge).unwrap();
        let w = ball
            .tree_word(nd.edge.source)
            .pushed(nd.edge.letter)
            .concat(&al.formal_inverse(ball.tree_word(h)));
        let rels = ff.relators(ball);
        let r = nd.diagram.validate(&rels, ball, Some(&w));
        assert!(r.passed(), "{:?}", r.failures());
        for p in nd.combing.paths() {
            assert!(p.is_valid_in(&nd.diagram), "{p:?}");
        }
        assert_eq!(
            nd.combing.start.last(),
            Cell::Vertex(nd.diagram.tail(nd.hat_edge()))
        );
        assert_eq!(
            nd.combing.end.last(),
            Cell::Vertex(nd.diagram.head(nd.hat_edge()))
        );
        for p in &nd.combing.interior {
            assert_eq!(p.last(), Cell::Edge(nd.hat_edge().edge));
        }
    }

    #[test]
    fn degenerate_edge_is_a_segment() {
        let rs = z2();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 4).unwrap();
        let ff = rewriting_flow(&rs, &ball).unwrap();
        let fb = FillingBuilder::new(&ball, &ff);
        let nd = fb.ndiagram(edge(&ball, "", "a")).unwrap();
        assert_eq!(nd.diagram.vertex_count(), 2);
        assert_eq!(nd.diagram.face_count(), 0);
        check_nd(&nd, &ball, &ff);
        let nd = fb.ndiagram(edge(&ball, "a", "A")).unwrap();
        check_nd(&nd, &ball, &ff);
    }

    #[test]
    fn commutation_edge_is_a_square() {
        let rs = z2();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 4).unwrap();
        let ff = rewriting_flow(&rs, &ball).unwrap();
        let fb = FillingBuilder::new(&ball, &ff);
        let e = edge(&ball, "b", "a");
        let nd = fb.ndiagram(e).unwrap();
        assert_eq!(nd.diagram.face_count(), 1);
        assert_eq!(nd.diagram.vertex_count(), 4);
        let al = ball.alphabet();
        assert_eq!(
            nd.diagram.boundary_word(),
            al.parse_word("b a B A").unwrap()
        );
        check_nd(&nd, &ball, &ff);
        // memoized
        let again = fb.ndiagram(e).unwrap();
        assert!(Arc::ptr_eq(&nd, &again));
    }

    #[test]
    fn all_ndiagrams_valid() {
        let rs = z2();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 5).unwrap();
        let ff = rewriting_flow(&rs, &ball).unwrap();
        let fb = FillingBuilder::new(&ball, &ff);
        for nd in fb.ndiagrams_up_to(3).unwrap() {
            check_nd(&nd, &ball, &ff);
            let m = nd.mirrored(&ball);
            check_nd(&m, &ball, &ff);
        }
    }

    #[test]
    fn seashell_examples() {
        let rs = z2();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 4).unwrap();
        let ff = rewriting_flow(&rs, &ball).unwrap();
        let fb = FillingBuilder::new(&ball, &ff);
        let al = ball.alphabet();
        let rels = ff.relators(&ball);
        let w = al.parse_word("b a B A").unwrap();
        let cd = fb.seashell(&w).unwrap();
        assert!(cd.diagram.validate(&rels, &ball, Some(&w)).passed());
        assert_eq!(cd.diagram.face_count(), 1);
        assert_eq!(
            coarse_profile_intrinsic(&cd.diagram).max_vertex().floor(),
            2
        );
        let w = al.parse_word("a A").unwrap();
        let cd = fb.seashell(&w).unwrap();
        assert_eq!(cd.diagram.face_count(), 0);
        assert!(cd.diagram.validate(&rels, &ball, Some(&w)).passed());
        let cd = fb.seashell(&Word::new()).unwrap();
        assert_eq!(cd.diagram.vertex_count(), 1);
        assert!(matches!(
            fb.seashell(&al.parse_word("a b").unwrap()),
            Err(FillingError::NotIdentity(_))
        ));
        let w = al.parse_word("a a b A A B").unwrap();
        let cd = fb.seashell(&w).unwrap();
        assert!(cd.diagram.validate(&rels, &ball, Some(&w)).passed());
        for p in cd.combing.paths() {
            assert!(p.is_valid_in(&cd.diagram));
        }
        assert_eq!(cd.combing.vertex_paths.len(), w.len() + 1);
    }

    #[test]
    fn ac_flow_diagrams() {
        let rs = z2();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 5).unwrap();
        let ff = ac_flow(&ball, 4).unwrap();
        let fb = FillingBuilder::new(&ball, &ff);
        let pk = short_relator_presentation(&ball, 6).unwrap();
        let al = ball.alphabet();
        let w = al.parse_word("a a b b A A B B").unwrap();
        let cd = fb.seashell(&w).unwrap();
        let r = cd.diagram.validate(&pk, &ball, Some(&w));
        assert!(r.passed(), "{:?}", r.failures());
    }

    #[test]
    fn finite_filling_z3() {
        let rs = z3();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 3).unwrap();
        assert!(ball.boundary_complete());
        assert_eq!(ball.len(), 3);
        let ff = rewriting_flow(&rs, &ball).unwrap();
        let fb = FillingBuilder::new(&ball, &ff);
        let cat = FiniteCatalog::build(&fb, 3).unwrap();
        let al = ball.alphabet();
        let w = al.parse_word("a a a a a a").unwrap();
        let cd = build_finite_filling(&w, &ball, &cat).unwrap();
        let pe = short_relator_presentation(&ball, 3).unwrap();
        let r = cd.diagram.validate(&pe, &ball, Some(&w));
        assert!(r.passed(), "{:?}", r.failures());
        let idiam = coarse_profile_intrinsic(&cd.diagram).max_vertex().floor();
        assert!(idiam <= 3 + cat.max_intrinsic_diameter());
        for p in cd.combing.paths() {
            assert!(p.is_valid_in(&cd.diagram), "{p:?}");
        }
        let cd = build_finite_filling(&Word::new(), &ball, &cat).unwrap();
        assert_eq!(cd.diagram.vertex_count(), 1);
        let w = al.parse_word("a A").unwrap();
        let cd = build_finite_filling(&w, &ball, &cat).unwrap();
        assert_eq!(cd.diagram.face_count(), 0);
        assert_eq!(cd.diagram.vertex_count(), 2);
    }

    #[test]
    fn thin_diagrams() {
        let rs = z2();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 6).unwrap();
        let pk = short_relator_presentation(&ball, 6).unwrap();
        let al = ball.alphabet();
        let e = edge(&ball, "a b", "a");
        let nd = build_thin_diagram(&ball, e, 2).unwrap();
        let h = ball.target(e).unwrap();
        let w = ball
            .tree_word(e.source)
            .pushed(e.letter)
            .concat(&al.formal_inverse(ball.tree_word(h)));
        let r = nd.diagram.validate(&pk, &ball, Some(&w));
        assert!(r.passed(), "{:?}", r.failures());
        assert!(nd.diagram.face_count() <= 3);
        for p in nd.combing.paths() {
            assert!(p.is_valid_in(&nd.diagram), "{p:?}");
        }
        let e = edge(&ball, "a", "b");
        let nd = build_thin_diagram(&ball, e, 2).unwrap();
        assert_eq!(nd.diagram.face_count(), 0);
        for g in ball.elements().filter(|&g| ball.dist(g) <= 3) {
            for a in al.letters() {
                let nd = build_thin_diagram(&ball, BallEdge::new(g, a), 2).unwrap();
                assert!(nd.diagram.validate(&pk, &ball, None).passed());
                for p in nd.combing.paths() {
                    assert!(p.is_valid_in(&nd.diagram));
                }
            }
        }
        assert!(matches!(
            build_thin_diagram(&ball, edge(&ball, "b b", "a"), 1),
            Err(FillingError::FellowTravelerViolation { .. })
        ));
    }
}
