//! Empirical tame filling functions of combings and the theoretical bound
//! functions they are compared against.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::ball::{BallEdge, CayleyBall, ElementId};
use crate::diagram::{
    coarse_profile_extrinsic, coarse_profile_intrinsic, CoarseProfile, DiagramError,
};
use crate::filling::{CombedDiagram, CombingPath, FillingBuilder, FillingError, NDiagram};
use crate::flow::FlowFunction;
use crate::quarter::QuarterDist;
use crate::rewrite::{RewriteError, RewritingSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TamenessError {
    #[error("bound function needed at {needed} but computed only to {available}")]
    RangeExceeded { needed: usize, available: usize },
    #[error("missing N-diagram: {0}")]
    MissingDiagram(FillingError),
    #[error("ball of radius {radius} is too small for argument {n}")]
    BallTooSmall { n: usize, radius: usize },
    #[error("unfolding exceeded the budget of {0} edges")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Nondecreasing step function on the quarter grid: `f(x)` is the value of
/// the largest breakpoint at or below `x`, and 0 below the first one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepFunction {
    breakpoints: Vec<(QuarterDist, QuarterDist)>,
    verified_to: QuarterDist,
}

impl StepFunction {
    /// Monotone closure of the given constraints `f(x) ≥ y`.
    pub fn from_constraints(
        points: impl IntoIterator<Item = (QuarterDist, QuarterDist)>,
        verified_to: QuarterDist,
    ) -> Self {
        let mut pts: Vec<_> = points.into_iter().collect();
        pts.sort();
        let mut breakpoints: Vec<(QuarterDist, QuarterDist)> = Vec::new();
        for (x, y) in pts {
            let cur = breakpoints.last().map(|b| b.1).unwrap_or_default();
            if y <= cur {
                continue;
            }
            match breakpoints.last_mut() {
                Some(b) if b.0 == x => b.1 = y,
                _ => breakpoints.push((x, y)),
            }
        }
        StepFunction {
            breakpoints,
            verified_to,
        }
    }

    pub fn eval(&self, x: QuarterDist) -> QuarterDist {
        match self.breakpoints.partition_point(|b| b.0 <= x) {
            0 => QuarterDist::ZERO,
            i => self.breakpoints[i - 1].1,
        }
    }

    pub fn breakpoints(&self) -> &[(QuarterDist, QuarterDist)] {
        &self.breakpoints
    }

    /// Largest coarse distance observed when measuring.
    pub fn verified_to(&self) -> QuarterDist {
        self.verified_to
    }

    pub fn max_value(&self) -> QuarterDist {
        self.breakpoints.last().map(|b| b.1).unwrap_or_default()
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &StepFunction) -> StepFunction {
        StepFunction::from_constraints(
            self.breakpoints
                .iter()
                .chain(other.breakpoints.iter())
                .copied(),
            self.verified_to.max(other.verified_to),
        )
    }

    /// Every point of the quarter grid up to `verified_to`.
    pub fn grid(&self) -> impl Iterator<Item = QuarterDist> {
        (0..=self.verified_to.quarters()).map(QuarterDist)
    }

    /// First grid point of the observed range where `f(x) > bound(x)`.
    pub fn first_exceeding<E>(
        &self,
        mut bound: impl FnMut(QuarterDist) -> Result<QuarterDist, E>,
    ) -> Result<Option<(QuarterDist, QuarterDist, QuarterDist)>, E> {
        for x in self.grid() {
            let (f, b) = (self.eval(x), bound(x)?);
            if f > b {
                return Ok(Some((x, f, b)));
            }
        }
        Ok(None)
    }

    /// CSV with columns `x_quarters,f_quarters,bound_quarters` over the grid.
    pub fn to_csv<E>(
        &self,
        mut bound: impl FnMut(QuarterDist) -> Result<QuarterDist, E>,
    ) -> Result<String, E> {
        let mut out = String::from("x_quarters,f_quarters,bound_quarters\n");
        for x in self.grid() {
            out.push_str(&format!("{},{},{}\n", x.0, self.eval(x).0, bound(x)?.0));
        }
        Ok(out)
    }
}

/// Which time pairs of a combing path constrain `f`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TameMode {
    /// `s ≤ t`: a path dwells in each cell it visits, so every visited
    /// value also constrains itself.
    #[default]
    Inclusive,
    /// `s < t` over cell indices only.
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Intrinsic,
    Extrinsic,
}

/// Accumulates constraints from cell traces.
#[derive(Clone, Debug, Default)]
pub struct TameMeter {
    mode: TameMode,
    // best lower bound forced at each observed value
    points: BTreeMap<QuarterDist, QuarterDist>,
    max_x: QuarterDist,
    paths: usize,
}

impl TameMeter {
    pub fn new(mode: TameMode) -> Self {
        TameMeter {
            mode,
            ..Default::default()
        }
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn add_trace(&mut self, trace: &[QuarterDist]) {
        self.paths += 1;
        let mut before = None::<QuarterDist>;
        for &v in trace {
            self.max_x = self.max_x.max(v);
            let forced = match self.mode {
                TameMode::Inclusive => Some(before.map_or(v, |b| b.max(v))),
                TameMode::Strict => before,
            };
            if let Some(y) = forced {
                let e = self.points.entry(v).or_default();
                *e = (*e).max(y);
            }
            before = Some(before.map_or(v, |b| b.max(v)));
        }
    }

    pub fn add_path(&mut self, profile: &CoarseProfile, path: &CombingPath) {
        let trace: Vec<QuarterDist> = path.cells.iter().map(|&c| profile.cell(c)).collect();
        self.add_trace(&trace);
    }

    pub fn add_paths<'a>(
        &mut self,
        profile: &CoarseProfile,
        paths: impl IntoIterator<Item = &'a CombingPath>,
    ) {
        for p in paths {
            self.add_path(profile, p);
        }
    }

    pub fn finish(&self) -> StepFunction {
        StepFunction::from_constraints(self.points.iter().map(|(&x, &y)| (x, y)), self.max_x)
    }
}

/// Tameness of a family of cell traces.
pub fn measure_traces<'a>(
    traces: impl IntoIterator<Item = &'a [QuarterDist]>,
    mode: TameMode,
) -> StepFunction {
    let mut m = TameMeter::new(mode);
    for t in traces {
        m.add_trace(t);
    }
    m.finish()
}

/// Profiles of the combed N-diagrams and combed diagrams under measurement.
pub struct TameSuite {
    intrinsic: TameMeter,
    extrinsic: TameMeter,
}

impl TameSuite {
    pub fn new(mode: TameMode) -> Self {
        TameSuite {
            intrinsic: TameMeter::new(mode),
            extrinsic: TameMeter::new(mode),
        }
    }

    pub fn add_ndiagram(&mut self, nd: &NDiagram, ball: &CayleyBall) -> Result<(), TamenessError> {
        let pi = coarse_profile_intrinsic(&nd.diagram);
        let pe = coarse_profile_extrinsic(&nd.diagram, ball)?;
        self.intrinsic.add_paths(&pi, nd.combing.paths());
        self.extrinsic.add_paths(&pe, nd.combing.paths());
        Ok(())
    }

    pub fn add_combed(
        &mut self,
        cd: &CombedDiagram,
        ball: &CayleyBall,
    ) -> Result<(), TamenessError> {
        let pi = coarse_profile_intrinsic(&cd.diagram);
        let pe = coarse_profile_extrinsic(&cd.diagram, ball)?;
        self.intrinsic.add_paths(&pi, cd.combing.paths());
        self.extrinsic.add_paths(&pe, cd.combing.paths());
        Ok(())
    }

    pub fn intrinsic(&self) -> StepFunction {
        self.intrinsic.finish()
    }

    pub fn extrinsic(&self) -> StepFunction {
        self.extrinsic.finish()
    }

    pub fn get(&self, kind: ProfileKind) -> StepFunction {
        match kind {
            ProfileKind::Intrinsic => self.intrinsic(),
            ProfileKind::Extrinsic => self.extrinsic(),
        }
    }
}

/// A nondecreasing function on `0..=available`; the `k` functions of the
/// bound suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntFn {
    values: Vec<u32>,
}

impl IntFn {
    pub fn new(values: Vec<u32>) -> Self {
        IntFn { values }
    }

    pub fn get(&self, n: usize) -> Result<u32, TamenessError> {
        self.values
            .get(n)
            .copied()
            .ok_or(TamenessError::RangeExceeded {
                needed: n,
                available: self.values.len().saturating_sub(1),
            })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn dominated_by(&self, other: &IntFn) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

#[derive(Clone, Debug)]
pub struct Kappas {
    pub k_ti: IntFn,
    pub k_te: IntFn,
    pub k_xi: IntFn,
    pub k_xe: IntFn,
}

/// Normal-form lengths, prefix distances and N-diagram diameters over
/// `B(n)` for `n ≤ n_max`.
pub fn compute_kappas(fb: &FillingBuilder<'_>, n_max: usize) -> Result<Kappas, TamenessError> {
    let ball = fb.ball();
    let radius = ball.radius();
    if n_max > radius {
        return Err(TamenessError::BallTooSmall { n: n_max, radius });
    }
    let mut ti = vec![0u32; n_max + 1];
    let mut te = vec![0u32; n_max + 1];
    let mut xi = vec![0u32; n_max + 1];
    let mut xe = vec![0u32; n_max + 1];
    for g in ball.elements() {
        let d = ball.dist(g);
        if d > n_max {
            continue;
        }
        let nf = ball.nf(g);
        ti[d] = ti[d].max(nf.len() as u32);
        let path = ball
            .trace(ElementId::IDENTITY, nf)
            .ok_or(TamenessError::BallTooSmall { n: d, radius })?;
        let far = path.iter().map(|&p| ball.dist(p)).max().unwrap_or(0);
        te[d] = te[d].max(far as u32);
    }
    for e in ball.inner_edges() {
        let d = ball.dist(e.source);
        if d > n_max || ball.is_degenerate(e) {
            continue;
        }
        let nd = fb.ndiagram(e).map_err(TamenessError::MissingDiagram)?;
        let pi = coarse_profile_intrinsic(&nd.diagram);
        let pe = coarse_profile_extrinsic(&nd.diagram, ball)?;
        xi[d] = xi[d].max(pi.max_vertex().floor());
        xe[d] = xe[d].max(pe.max_vertex().floor());
    }
    let running = |mut v: Vec<u32>| {
        for i in 1..v.len() {
            v[i] = v[i].max(v[i - 1]);
        }
        IntFn::new(v)
    };
    Ok(Kappas {
        k_ti: running(ti),
        k_te: running(te),
        k_xi: running(xi),
        k_xe: running(xe),
    })
}

/// `μ(x) = max{k_t(⌈x⌉+1)+1, x+1, k_x(⌈x⌉+ρ+1)+1}` on the quarter grid.
#[derive(Clone, Debug)]
pub struct MuFunction {
    pub k_t: IntFn,
    pub k_x: IntFn,
    pub rho: usize,
}

impl MuFunction {
    pub fn eval(&self, x: QuarterDist) -> Result<QuarterDist, TamenessError> {
        let n = x.ceil() as usize;
        let a = QuarterDist::from_int(self.k_t.get(n + 1)? + 1);
        let b = x + QuarterDist::from_int(1);
        let c = QuarterDist::from_int(self.k_x.get(n + self.rho + 1)? + 1);
        Ok(a.max(b).max(c))
    }

    /// Largest integer argument the tables support.
    pub fn max_argument(&self) -> usize {
        let kt = self.k_t.values().len().saturating_sub(2);
        let kx = self.k_x.values().len().saturating_sub(self.rho + 2);
        kt.min(kx)
    }
}

/// The intrinsic and extrinsic μ functions.
pub fn compute_mus(kappas: &Kappas, rho: usize) -> (MuFunction, MuFunction) {
    (
        MuFunction {
            k_t: kappas.k_ti.clone(),
            k_x: kappas.k_xi.clone(),
            rho,
        },
        MuFunction {
            k_t: kappas.k_te.clone(),
            k_x: kappas.k_xe.clone(),
            rho,
        },
    )
}

/// Elements whose normal forms accumulate while unfolding the flow from
/// `e`: the two endpoints, then every vertex along the flow path of each
/// recursive edge met.
#[derive(Clone, Debug)]
pub struct LeSet {
    pub elements: BTreeSet<ElementId>,
    pub max_len: usize,
    pub edges_unfolded: usize,
}

pub fn compute_le(
    e: BallEdge,
    ff: &FlowFunction,
    ball: &CayleyBall,
    budget: usize,
) -> Result<LeSet, TamenessError> {
    let too_small = || TamenessError::BallTooSmall {
        n: ball.dist(e.source),
        radius: ball.radius(),
    };
    let mut elements = BTreeSet::new();
    elements.insert(e.source);
    elements.insert(ball.target(e).ok_or_else(too_small)?);
    let mut seen = HashSet::new();
    let mut stack = vec![e];
    while let Some(e) = stack.pop() {
        if ball.is_degenerate(e) || !seen.insert(e) {
            continue;
        }
        if seen.len() > budget {
            return Err(TamenessError::BudgetExceeded(budget));
        }
        let fp = ff.get(e).ok_or_else(too_small)?;
        let path = ball.trace(e.source, &fp.label).ok_or_else(too_small)?;
        elements.extend(path.iter().copied());
        for (i, a) in fp.label.iter().enumerate() {
            stack.push(BallEdge::new(path[i], a));
        }
    }
    let max_len = elements
        .iter()
        .map(|&g| ball.nf(g).len())
        .max()
        .unwrap_or(0);
    Ok(LeSet {
        elements,
        max_len,
        edges_unfolded: seen.len(),
    })
}

/// `k_r'(n)`: the largest `k(w,a)` over edges with source in `B(n)`.
pub fn compute_kr_prime(
    ff: &FlowFunction,
    ball: &CayleyBall,
    n_max: usize,
    budget: usize,
) -> Result<IntFn, TamenessError> {
    let mut v = vec![0u32; n_max + 1];
    for e in ball.inner_edges() {
        let d = ball.dist(e.source);
        if d > n_max {
            continue;
        }
        let le = compute_le(e, ff, ball, budget)?;
        v[d] = v[d].max(le.max_len as u32);
    }
    for i in 1..v.len() {
        v[i] = v[i].max(v[i - 1]);
    }
    Ok(IntFn::new(v))
}

/// `γ(⌈x⌉+ρ+2)+1` with ρ the longest rule side.
pub fn rsgrowth_bound(rs: &RewritingSystem, x: QuarterDist) -> Result<QuarterDist, TamenessError> {
    let n = x.ceil() as usize + rs.max_side_len() + 2;
    Ok(QuarterDist::from_int(rs.gamma(n)? as u32 + 1))
}

/// `γ(⌈x⌉+ρ+2)+1` from a precomputed γ table.
pub fn rsgrowth_bound_from_table(
    gamma: &[usize],
    rho: usize,
    x: QuarterDist,
) -> Result<QuarterDist, TamenessError> {
    let n = x.ceil() as usize + rho + 2;
    gamma
        .get(n)
        .map(|&g| QuarterDist::from_int(g as u32 + 1))
        .ok_or(TamenessError::RangeExceeded {
            needed: n,
            available: gamma.len().saturating_sub(1),
        })
}

/// `t^i(n)` and `t^e(n)` for the ball's normal forms, where `T_n` is the
/// set of normal-form prefixes ending within distance `n`.
pub fn compute_t_functions(
    ball: &CayleyBall,
    n_max: usize,
) -> Result<(IntFn, IntFn), TamenessError> {
    let radius = ball.radius();
    if n_max >= radius && !ball.boundary_complete() {
        return Err(TamenessError::BallTooSmall { n: n_max, radius });
    }
    let mut ti = vec![0u32; n_max + 1];
    let mut te = vec![0u32; n_max + 1];
    for g in ball.elements() {
        let nf = ball.nf(g);
        let path = ball
            .trace(ElementId::IDENTITY, nf)
            .ok_or(TamenessError::BallTooSmall { n: n_max, radius })?;
        let mut far = 0usize;
        for (len, p) in path.iter().enumerate() {
            far = far.max(ball.dist(*p));
            let d = ball.dist(*p);
            if d <= n_max {
                ti[d] = ti[d].max(len as u32);
                te[d] = te[d].max(far as u32);
            }
        }
    }
    for i in 1..=n_max {
        ti[i] = ti[i].max(ti[i - 1]);
        te[i] = te[i].max(te[i - 1]);
    }
    Ok((IntFn::new(ti), IntFn::new(te)))
}

#[derive(Clone, Debug, Default)]
pub struct DiameterReport {
    pub checked: usize,
    /// (index, word length, intrinsic diameter, bound)
    pub failures: Vec<(usize, usize, u32, u32)>,
}

impl DiameterReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `idiam(D_w) ≤ ⌈f(l(w)/2)⌉` for `(l(w), idiam)` pairs.
pub fn check_diameter_bound(
    items: impl IntoIterator<Item = (usize, u32)>,
    f: &StepFunction,
) -> DiameterReport {
    let mut r = DiameterReport::default();
    for (i, (len, idiam)) in items.into_iter().enumerate() {
        r.checked += 1;
        let bound = f.eval(QuarterDist(2 * len as u32)).ceil();
        if idiam > bound {
            r.failures.push((i, len, idiam, bound));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[u32]) -> Vec<QuarterDist> {
        v.iter().map(|&x| QuarterDist(x)).collect()
    }

    #[test]
    fn monotone_trace() {
        let t = q(&[0, 2, 4, 6]);
        let f = measure_traces([t.as_slice()], TameMode::Inclusive);
        for &x in &t {
            assert_eq!(f.eval(x), x);
        }
        let f = measure_traces([t.as_slice()], TameMode::Strict);
        assert_eq!(f.eval(QuarterDist(2)), QuarterDist(0));
        assert_eq!(f.eval(QuarterDist(6)), QuarterDist(4));
    }

    #[test]
    fn backtracking_trace() {
        let t = q(&[0, 4, 2, 6]);
        for mode in [TameMode::Inclusive, TameMode::Strict] {
            let f = measure_traces([t.as_slice()], mode);
            assert_eq!(f.eval(QuarterDist(2)), QuarterDist(4));
        }
    }

    #[test]
    fn empty_suite() {
        let f = measure_traces(std::iter::empty(), TameMode::Inclusive);
        assert_eq!(f.eval(QuarterDist(100)), QuarterDist::ZERO);
        assert!(f.breakpoints().is_empty());
    }

    #[test]
    fn step_function_closure() {
        let f = StepFunction::from_constraints(
            q(&[4, 0, 8, 2]).into_iter().zip(q(&[3, 1, 2, 1])),
            QuarterDist(8),
        );
        assert_eq!(f.eval(QuarterDist(0)), QuarterDist(1));
        assert_eq!(f.eval(QuarterDist(3)), QuarterDist(1));
        assert_eq!(f.eval(QuarterDist(4)), QuarterDist(3));
        assert_eq!(f.eval(QuarterDist(9)), QuarterDist(3));
        assert_eq!(f.breakpoints().len(), 2);
    }

    #[test]
    fn diameter_bound() {
        let f = StepFunction::default();
        assert!(check_diameter_bound([(0, 0)], &f).passed());
        let r = check_diameter_bound([(4, 2)], &f);
        assert!(!r.passed());
        assert_eq!(r.failures[0], (0, 4, 2, 0));
    }

    #[test]
    fn int_fn_range() {
        let k = IntFn::new(vec![0, 1, 2]);
        assert_eq!(k.get(2).unwrap(), 2);
        assert!(matches!(
            k.get(3),
            Err(TamenessError::RangeExceeded {
                needed: 3,
                available: 2
            })
        ));
    }
}
