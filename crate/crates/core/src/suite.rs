//! The acceptance checks, shared by the `acceptance` test target and the
//! `check-all` command.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use crate::ball::{check_almost_convex, BallEdge, CayleyBall, ElementId};
use crate::diagram::{
    coarse_profile_extrinsic, coarse_profile_intrinsic, short_relator_presentation, CoarseProfile,
    VanKampenDiagram,
};
use crate::filling::{
    build_finite_filling, build_thin_diagram, CombedDiagram, FillingBuilder, FiniteCatalog,
};
use crate::flow::{ac_flow, rewriting_flow, verify_flow};
use crate::presets::{
    bs12_system, bs1p_nf_member, bs_alphabet, preset, thompson_alphabet, thompson_nf_member,
};
use crate::quarter::QuarterDist;
use crate::rewrite::RewritingSystem;
use crate::tameness::{
    check_diameter_bound, compute_kappas, compute_mus, StepFunction, TameMode, TameSuite,
};
use crate::words::{Alphabet, Presentation, Word};

pub const TITLES: [&str; 11] = [
    "complete rewriting systems",
    "coarse distance oracle",
    "flow verification and N-diagrams",
    "seashell soundness",
    "dominance by mu",
    "dominance by the growth bound",
    "almost convex combings",
    "finite groups",
    "diameter bound",
    "lower bound on geodesic probes",
    "normal-form predicates",
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.1}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rs_of(name: &str) -> RewritingSystem {
    preset(name).unwrap().rewriting.unwrap()
}

fn ball_of(rs: &RewritingSystem, radius: usize) -> Result<CayleyBall, String> {
    CayleyBall::build(rs, rs.alphabet().clone(), radius).map_err(|e| e.to_string())
}

/// Vertex distances by repeated relaxation over the edge list.
fn relaxed_distances(d: &VanKampenDiagram) -> Vec<u32> {
    let mut dist = vec![u32::MAX; d.vertex_count()];
    dist[d.basepoint().index()] = 0;
    loop {
        let mut changed = false;
        for e in d.edges() {
            let ed = d.edge(e);
            let (s, t) = (ed.src.index(), ed.dst.index());
            for (x, y) in [(s, t), (t, s)] {
                if dist[x] != u32::MAX && dist[x] + 1 < dist[y] {
                    dist[y] = dist[x] + 1;
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

fn max_vertex(p: &CoarseProfile) -> u32 {
    p.max_vertex().floor()
}

fn idiam(d: &VanKampenDiagram) -> u32 {
    max_vertex(&coarse_profile_intrinsic(d))
}

struct Seashells {
    ball: CayleyBall,
    relators: Presentation,
    rho: usize,
    words: Vec<Word>,
    diagrams: Vec<CombedDiagram>,
    nd_suite: TameSuite,
    suite: TameSuite,
    kappas: Option<crate::tameness::Kappas>,
    max_suite_source: usize,
}

impl Seashells {
    fn f_int(&self) -> StepFunction {
        self.suite.intrinsic().max(&self.nd_suite.intrinsic())
    }

    fn f_ext(&self) -> StepFunction {
        self.suite.extrinsic().max(&self.nd_suite.extrinsic())
    }
}

/// Seashells of every freely reduced identity word up to `max_len`, under
/// the rewriting flow of `rs`, and the N-diagrams of edges up to
/// `nd_source`. With `kappa_to`, kappas are tabulated that far.
fn seashells(
    rs: &RewritingSystem,
    radius: usize,
    max_len: usize,
    nd_source: usize,
    kappa_to: Option<usize>,
) -> Result<Seashells, String> {
    let ball = ball_of(rs, radius)?;
    let ff = rewriting_flow(rs, &ball).map_err(|e| e.to_string())?;
    let relators = ff.relators(&ball);
    let rho = relators.max_relator_len();
    let fb = FillingBuilder::new(&ball, &ff);
    let words = ball
        .identity_words(max_len, true)
        .map_err(|e| e.to_string())?;
    let mut diagrams = Vec::with_capacity(words.len());
    let mut suite = TameSuite::new(TameMode::default());
    for w in &words {
        let cd = fb
            .seashell(w)
            .map_err(|e| format!("{}: {e}", ball.alphabet().render(w)))?;
        suite.add_combed(&cd, &ball).map_err(|e| e.to_string())?;
        diagrams.push(cd);
    }
    let mut nd_suite = TameSuite::new(TameMode::default());
    for nd in fb.ndiagrams_up_to(nd_source).map_err(|e| e.to_string())? {
        nd_suite
            .add_ndiagram(&nd, &ball)
            .map_err(|e| e.to_string())?;
    }
    let kappas = match kappa_to {
        Some(n) => Some(compute_kappas(&fb, n).map_err(|e| e.to_string())?),
        None => None,
    };
    drop(fb);
    Ok(Seashells {
        ball,
        relators,
        rho,
        words,
        diagrams,
        nd_suite,
        suite,
        kappas,
        max_suite_source: nd_source,
    })
}

struct FiniteRun {
    name: &'static str,
    order: usize,
    catalog_idiam: u32,
    words: Vec<Word>,
    diagrams: Vec<CombedDiagram>,
    suite: TameSuite,
    max_idiam: u32,
}

fn finite_run(name: &'static str, max_len: usize) -> Result<FiniteRun, String> {
    let p = preset(name).unwrap();
    let rs = p.rewriting.unwrap();
    let order = p.order.unwrap();
    let ball = ball_of(&rs, max_len.max(order))?;
    ensure(ball.boundary_complete() && ball.len() == order, || {
        format!("{name}: ball has {} elements, expected {order}", ball.len())
    })?;
    let ff = rewriting_flow(&rs, &ball).map_err(|e| e.to_string())?;
    let fb = FillingBuilder::new(&ball, &ff);
    let catalog = FiniteCatalog::build(&fb, order).map_err(|e| e.to_string())?;
    let catalog_idiam = catalog.max_intrinsic_diameter();
    let pe = short_relator_presentation(&ball, order).map_err(|e| e.to_string())?;
    let words = ball
        .identity_words(max_len, false)
        .map_err(|e| e.to_string())?;
    let mut diagrams = Vec::with_capacity(words.len());
    let mut suite = TameSuite::new(TameMode::default());
    let mut max_idiam = 0;
    for w in &words {
        let cd = build_finite_filling(w, &ball, &catalog).map_err(|e| e.to_string())?;
        let r = cd.diagram.validate(&pe, &ball, Some(w));
        ensure(r.passed(), || {
            format!(
                "{name}: filling of {} invalid: {:?}",
                ball.alphabet().render(w),
                r.failures()
            )
        })?;
        max_idiam = max_idiam.max(idiam(&cd.diagram));
        suite.add_combed(&cd, &ball).map_err(|e| e.to_string())?;
        diagrams.push(cd);
    }
    Ok(FiniteRun {
        name,
        order,
        catalog_idiam,
        words,
        diagrams,
        suite,
        max_idiam,
    })
}

struct AcRun {
    words: Vec<Word>,
    diagrams: Vec<CombedDiagram>,
    f_int: StepFunction,
    f_ext: StepFunction,
}

/// Everything the checks share, computed on first use.
#[derive(Default)]
pub struct Lab {
    z2: Option<Result<Seashells, String>>,
    s3: Option<Result<Seashells, String>>,
    z3_finite: Option<Result<FiniteRun, String>>,
    s3_finite: Option<Result<FiniteRun, String>>,
    ac: Option<Result<AcRun, String>>,
}

/// Radius of the Z² ball behind the seashell and bound checks.
const Z2_RADIUS: usize = 14;
const Z2_KAPPA_TO: usize = 13;
const Z2_WORDS: usize = 8;

impl Lab {
    pub fn new() -> Self {
        Lab::default()
    }

    fn z2(&mut self) -> Result<&Seashells, String> {
        self.z2
            .get_or_insert_with(|| {
                seashells(
                    &rs_of("Z2"),
                    Z2_RADIUS,
                    Z2_WORDS,
                    Z2_WORDS / 2,
                    Some(Z2_KAPPA_TO),
                )
            })
            .as_ref()
            .map_err(|e| format!("Z2 seashells: {e}"))
    }

    fn s3(&mut self) -> Result<&Seashells, String> {
        self.s3
            .get_or_insert_with(|| seashells(&rs_of("S3"), 6, 6, 3, None))
            .as_ref()
            .map_err(|e| format!("S3 seashells: {e}"))
    }

    fn z3_finite(&mut self) -> Result<&FiniteRun, String> {
        self.z3_finite
            .get_or_insert_with(|| finite_run("Z3", 8))
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn s3_finite(&mut self) -> Result<&FiniteRun, String> {
        self.s3_finite
            .get_or_insert_with(|| finite_run("S3", 8))
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn ac(&mut self) -> Result<&AcRun, String> {
        self.ac
            .get_or_insert_with(ac_run)
            .as_ref()
            .map_err(|e| e.clone())
    }
}

fn ac_run() -> Result<AcRun, String> {
    let rs = rs_of("Z2");
    let ball = ball_of(&rs, 7)?;
    let ff = ac_flow(&ball, 4).map_err(|e| e.to_string())?;
    let report = verify_flow(&ff, &ball, 4).map_err(|e| e.to_string())?;
    ensure(report.passed(), || {
        format!("ac flow fails verification: {report:?}")
    })?;
    let pk = short_relator_presentation(&ball, 6).map_err(|e| e.to_string())?;
    let fb = FillingBuilder::new(&ball, &ff);
    let words = ball.identity_words(8, true).map_err(|e| e.to_string())?;
    let mut suite = TameSuite::new(TameMode::default());
    let mut diagrams = Vec::with_capacity(words.len());
    for w in &words {
        let cd = fb.seashell(w).map_err(|e| e.to_string())?;
        let r = cd.diagram.validate(&pk, &ball, Some(w));
        ensure(r.passed(), || {
            format!(
                "ac seashell of {} invalid: {:?}",
                ball.alphabet().render(w),
                r.failures()
            )
        })?;
        suite.add_combed(&cd, &ball).map_err(|e| e.to_string())?;
        diagrams.push(cd);
    }
    Ok(AcRun {
        words,
        diagrams,
        f_int: suite.intrinsic(),
        f_ext: suite.extrinsic(),
    })
}

fn c1() -> Check {
    let mut notes = Vec::new();
    for name in ["Z2", "F2", "Z3", "Z5", "S3"] {
        let rs = rs_of(name);
        let viol = rs.check_minimal();
        ensure(viol.is_empty(), || format!("{name}: not minimal: {viol:?}"))?;
        let cps = rs.critical_pairs().map_err(|e| e.to_string())?;
        ensure(cps.is_empty(), || {
            format!("{name}: {} unresolved critical pairs", cps.len())
        })?;
        let mut nodes = 0usize;
        for w in rs.alphabet().words_up_to(5) {
            let irr = rs.irreducible_descendants(&w).map_err(|e| e.to_string())?;
            nodes += irr.len();
            let nf = rs.normal_form(&w).map_err(|e| e.to_string())?;
            ensure(irr.len() == 1 && irr.contains(&nf), || {
                format!(
                    "{name}: {} has irreducible descendants {}",
                    rs.alphabet().render(&w),
                    irr.len()
                )
            })?;
        }
        notes.push(format!(
            "{name} {} rules, {nodes} irreducible descendants",
            rs.rules().len()
        ));
    }
    Ok(format!(
        "{}; unique normal forms for all words of length <= 5",
        notes.join(", ")
    ))
}

fn check_profile(d: &VanKampenDiagram, ball: &CayleyBall) -> Result<(), String> {
    let pi = coarse_profile_intrinsic(d);
    let pe = coarse_profile_extrinsic(d, ball).map_err(|e| e.to_string())?;
    let oracle = relaxed_distances(d);
    for v in d.vertices() {
        ensure(
            pi.vertices[v.index()] == QuarterDist::from_int(oracle[v.index()]),
            || {
                format!(
                    "vertex {} has {} but relaxation gives {}",
                    v.0,
                    pi.vertices[v.index()],
                    oracle[v.index()]
                )
            },
        )?;
        ensure(
            pe.vertices[v.index()] == QuarterDist::from_int(ball.dist(d.projection(v)) as u32),
            || format!("extrinsic value of vertex {} disagrees with the ball", v.0),
        )?;
    }
    for p in [&pi, &pe] {
        for e in d.edges() {
            let ed = d.edge(e);
            let want =
                p.vertices[ed.src.index()].min(p.vertices[ed.dst.index()]) + QuarterDist::HALF;
            ensure(p.edges[e.index()] == want && want.residue() == 2, || {
                format!("edge {} value", e.0)
            })?;
        }
        for f in d.faces() {
            let m = d
                .face(f)
                .iter()
                .map(|x| p.edges[x.edge.index()])
                .max()
                .unwrap();
            let v = p.faces[f.index()];
            ensure(v + QuarterDist::QUARTER == m && v.residue() == 1, || {
                format!("face {} value", f.0)
            })?;
        }
    }
    for c in d.cells() {
        ensure(pe.cell(c) <= pi.cell(c), || {
            format!("extrinsic exceeds intrinsic at {c:?}")
        })?;
    }
    Ok(())
}

fn spread<T>(items: &[T], n: usize) -> impl Iterator<Item = &T> {
    let step = (items.len() / n.max(1)).max(1);
    items.iter().step_by(step).take(n)
}

fn c2(lab: &mut Lab) -> Check {
    let mut count = 0;
    {
        let z2 = lab.z2()?;
        for cd in spread(&z2.diagrams, 30) {
            check_profile(&cd.diagram, &z2.ball).map_err(|e| format!("Z2 seashell: {e}"))?;
            count += 1;
        }
    }
    {
        let s3 = lab.s3()?;
        for cd in spread(&s3.diagrams, 10) {
            check_profile(&cd.diagram, &s3.ball).map_err(|e| format!("S3 seashell: {e}"))?;
            count += 1;
        }
    }
    let z3 = preset("Z3").unwrap().rewriting.unwrap();
    let z3ball = ball_of(&z3, 8)?;
    {
        let run = lab.z3_finite()?;
        for cd in spread(&run.diagrams, 10) {
            check_profile(&cd.diagram, &z3ball).map_err(|e| format!("Z3 filling: {e}"))?;
            count += 1;
        }
    }
    let rs = rs_of("Z2");
    let ball = ball_of(&rs, 7)?;
    let mut thin = 0;
    for g in ball.elements().filter(|&g| ball.dist(g) <= 3) {
        for a in ball.alphabet().letters() {
            let e = BallEdge::new(g, a);
            if ball.is_degenerate(e) || thin >= 12 {
                continue;
            }
            let nd = build_thin_diagram(&ball, e, 2).map_err(|e| e.to_string())?;
            check_profile(&nd.diagram, &ball).map_err(|e| format!("thin diagram: {e}"))?;
            thin += 1;
            count += 1;
        }
    }
    ensure(count >= 50, || format!("only {count} diagrams checked"))?;
    Ok(format!("{count} diagrams, profiles exact"))
}

fn c3() -> Check {
    let mut notes = Vec::new();
    for (name, radius) in [("Z2", 5), ("F2", 6)] {
        let rs = rs_of(name);
        let ball = ball_of(&rs, radius)?;
        let ff = rewriting_flow(&rs, &ball).map_err(|e| e.to_string())?;
        let report = verify_flow(&ff, &ball, ff.bound_k()).map_err(|e| e.to_string())?;
        ensure(report.passed(), || {
            format!("{name}: flow fails: {report:?}")
        })?;
        let rels = ff.relators(&ball);
        let fb = FillingBuilder::new(&ball, &ff);
        let (mut built, mut skipped) = (0, 0);
        for e in ball.inner_edges() {
            let nd = match fb.ndiagram(e) {
                Ok(nd) => nd,
                Err(crate::filling::FillingError::BallTooSmall { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(err) => return Err(format!("{name}: {err}")),
            };
            let al = ball.alphabet();
            let h = ball.target(e).unwrap();
            let w = ball
                .tree_word(e.source)
                .pushed(e.letter)
                .concat(&al.formal_inverse(ball.tree_word(h)));
            let r = nd.diagram.validate(&rels, &ball, Some(&w));
            ensure(r.passed(), || {
                format!("{name}: N-diagram invalid: {:?}", r.failures())
            })?;
            for v in nd.diagram.vertices() {
                let nf = ball.nf(nd.diagram.projection(v));
                ensure(nd.diagram.read_from_basepoint(nf).contains(&v), || {
                    format!(
                        "{name}: vertex {} not reached by its normal form {}",
                        v.0,
                        al.render(nf)
                    )
                })?;
            }
            built += 1;
        }
        notes.push(format!(
            "{name} r={radius}: {} edges verified, {built} N-diagrams{}",
            report.edges_checked,
            if skipped > 0 {
                format!(" ({skipped} need a larger ball)")
            } else {
                String::new()
            }
        ));
    }
    Ok(notes.join("; "))
}

fn check_seashells(s: &Seashells, name: &str) -> Result<usize, String> {
    for (w, cd) in s.words.iter().zip(&s.diagrams) {
        let r = cd.diagram.validate(&s.relators, &s.ball, Some(w));
        ensure(r.passed() && cd.diagram.boundary_word() == *w, || {
            format!(
                "{name}: seashell of {} invalid: {:?}",
                s.ball.alphabet().render(w),
                r.failures()
            )
        })?;
        ensure(cd.diagram.euler_characteristic() == 1, || {
            format!("{name}: Euler characteristic")
        })?;
    }
    Ok(s.words.len())
}

fn c4(lab: &mut Lab) -> Check {
    let nz = check_seashells(lab.z2()?, "Z2")?;
    let ns = check_seashells(lab.s3()?, "S3")?;
    Ok(format!(
        "{nz} Z2 words (length <= 8), {ns} S3 words (length <= 6)"
    ))
}

fn c5(lab: &mut Lab) -> Check {
    let z2 = lab.z2()?;
    let kappas = z2.kappas.as_ref().unwrap();
    ensure(
        kappas.k_te.dominated_by(&kappas.k_ti) && kappas.k_xe.dominated_by(&kappas.k_xi),
        || "extrinsic kappas exceed intrinsic ones".into(),
    )?;
    let (mu_i, mu_e) = compute_mus(kappas, z2.rho);
    let mut notes = Vec::new();
    for (label, f, mu) in [
        ("intrinsic", z2.f_int(), &mu_i),
        ("extrinsic", z2.f_ext(), &mu_e),
    ] {
        let mut prev = QuarterDist::ZERO;
        for x in f.grid() {
            let m = mu.eval(x).map_err(|e| format!("{label}: {e}"))?;
            ensure(m >= prev && m >= x + QuarterDist::from_int(1), || {
                format!("{label} mu not monotone")
            })?;
            prev = m;
        }
        let bad = f
            .first_exceeding(|x| mu.eval(x))
            .map_err(|e| e.to_string())?;
        if let Some((x, fx, b)) = bad {
            return Err(format!("{label}: f({x}) = {fx} > mu = {b}"));
        }
        notes.push(format!("{label} f <= mu to {}", f.verified_to()));
    }
    Ok(format!(
        "{} (rho = {}, N-diagrams from B({}), kappas to {})",
        notes.join(", "),
        z2.rho,
        z2.max_suite_source,
        Z2_KAPPA_TO
    ))
}

/// Longest word reachable from words of length at most `n`, by exhaustive
/// search over one-step rewrites.
fn brute_gamma(rs: &RewritingSystem, n: usize) -> usize {
    let mut best = 0;
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    for w in rs.alphabet().words_up_to(n) {
        if !seen.insert(w.clone()) {
            continue;
        }
        let mut stack = vec![w];
        while let Some(u) = stack.pop() {
            best = best.max(u.len());
            for v in rs.one_step_rewrites(&u) {
                if seen.insert(v.clone()) {
                    stack.push(v);
                }
            }
        }
    }
    best
}

fn c6(lab: &mut Lab) -> Check {
    let rs = rs_of("Z2");
    let mut table = Vec::new();
    for n in 0..=7 {
        let g = brute_gamma(&rs, n);
        ensure(g == n, || format!("brute-force gamma({n}) = {g}"))?;
        let e = rs.gamma(n).map_err(|e| e.to_string())?;
        ensure(e == n, || format!("engine gamma({n}) = {e}"))?;
        table.push(g);
    }
    // beyond 7: no rule lengthens a word and a^n is irreducible
    let nonincreasing = rs.rules().iter().all(|r| r.rhs.len() <= r.lhs.len());
    let a = rs.alphabet().letter("a").unwrap();
    let rho = rs.max_side_len();
    let z2 = lab.z2()?;
    let bound = |x: QuarterDist| -> Result<QuarterDist, String> {
        let n = x.ceil() as usize + rho + 2;
        let g = if let Some(&g) = table.get(n) {
            g
        } else if nonincreasing && rs.is_irreducible(&Word::from_letters(vec![a; n])) {
            n
        } else {
            return Err(format!("gamma({n}) unavailable"));
        };
        Ok(QuarterDist::from_int(g as u32 + 1))
    };
    for (label, f) in [("intrinsic", z2.f_int()), ("extrinsic", z2.f_ext())] {
        if let Some((x, fx, b)) = f.first_exceeding(bound)? {
            return Err(format!("{label}: f({x}) = {fx} > {b}"));
        }
    }
    Ok(format!(
        "gamma(n) = n to 7; f <= gamma(ceil(x)+{}) + 1 on [0, {}]",
        rho + 2,
        z2.f_int().verified_to()
    ))
}

fn c7(lab: &mut Lab) -> Check {
    let rs = rs_of("Z2");
    let ball = ball_of(&rs, 5)?;
    for n in 0..=4 {
        let r = check_almost_convex(&ball, n, 4).map_err(|e| e.to_string())?;
        ensure(r.passed(), || {
            format!("not almost convex at n = {n}: {:?}", r.failure)
        })?;
    }
    let ac = lab.ac()?;
    for (label, f) in [("intrinsic", &ac.f_int), ("extrinsic", &ac.f_ext)] {
        let bad = f.first_exceeding(|x| Ok::<_, String>(x + QuarterDist::from_int(1)))?;
        if let Some((x, fx, b)) = bad {
            return Err(format!("{label}: f({x}) = {fx} > {b}"));
        }
    }
    Ok(format!(
        "AC(4) for n <= 4; {} words, f <= x+1 on [0, {}]",
        ac.words.len(),
        ac.f_int.verified_to()
    ))
}

fn c8(lab: &mut Lab) -> Check {
    let mut notes = Vec::new();
    for which in ["Z3", "S3"] {
        let run = if which == "Z3" {
            lab.z3_finite()?
        } else {
            lab.s3_finite()?
        };
        let g = QuarterDist::from_int(run.order as u32);
        let ci = g + QuarterDist::from_int(run.catalog_idiam) + QuarterDist::HALF;
        let ce = g + QuarterDist::HALF;
        let fi = run.suite.intrinsic();
        let fe = run.suite.extrinsic();
        ensure(fi.max_value() <= ci, || {
            format!("{}: intrinsic max {} > {ci}", run.name, fi.max_value())
        })?;
        ensure(fe.max_value() <= ce, || {
            format!("{}: extrinsic max {} > {ce}", run.name, fe.max_value())
        })?;
        ensure(
            run.max_idiam <= run.order as u32 + run.catalog_idiam,
            || {
                format!(
                    "{}: idiam {} exceeds the diameter bound",
                    run.name, run.max_idiam
                )
            },
        )?;
        notes.push(format!(
            "{}: {} words, f_i <= {} <= {ci}, f_e <= {} <= {ce}",
            run.name,
            run.words.len(),
            fi.max_value(),
            fe.max_value()
        ));
    }
    Ok(notes.join("; "))
}

fn diameter_check(
    diagrams: &[CombedDiagram],
    f: &StepFunction,
    label: &str,
) -> Result<usize, String> {
    let r = check_diameter_bound(
        diagrams
            .iter()
            .map(|cd| (cd.word.len(), idiam(&cd.diagram))),
        f,
    );
    if let Some(&(i, len, d, b)) = r.failures.first() {
        return Err(format!(
            "{label}: diagram {i} (length {len}) has idiam {d} > {b}"
        ));
    }
    Ok(r.checked)
}

fn c9(lab: &mut Lab) -> Check {
    let mut total = 0;
    {
        let z2 = lab.z2()?;
        total += diameter_check(&z2.diagrams, &z2.f_int(), "Z2 seashells")?;
    }
    {
        let s3 = lab.s3()?;
        total += diameter_check(&s3.diagrams, &s3.suite.intrinsic(), "S3 seashells")?;
    }
    {
        let ac = lab.ac()?;
        total += diameter_check(&ac.diagrams, &ac.f_int, "AC seashells")?;
    }
    {
        let z3 = lab.z3_finite()?;
        total += diameter_check(&z3.diagrams, &z3.suite.intrinsic(), "Z3 fillings")?;
    }
    {
        let s3 = lab.s3_finite()?;
        total += diameter_check(&s3.diagrams, &s3.suite.intrinsic(), "S3 fillings")?;
    }
    Ok(format!("{total} diagrams within ceil(f(l/2))"))
}

fn c10() -> Check {
    let rs = rs_of("Z2");
    let ball = ball_of(&rs, 7)?;
    let ff = rewriting_flow(&rs, &ball).map_err(|e| e.to_string())?;
    let fb = FillingBuilder::new(&ball, &ff);
    let al = ball.alphabet().clone();
    let (a, b) = (al.letter("a").unwrap(), al.letter("b").unwrap());
    let mut notes = Vec::new();
    for mode in [TameMode::Inclusive, TameMode::Strict] {
        let mut suite = TameSuite::new(mode);
        let mut probes = 0;
        for n in 1..=6usize {
            let mut geodesics = Vec::new();
            for i in 0..=n {
                let mut v = vec![a; i];
                v.extend(std::iter::repeat_n(b, n - i));
                geodesics.push(Word::from_letters(v));
            }
            geodesics.push((0..n).map(|j| if j % 2 == 0 { a } else { b }).collect());
            for w in geodesics {
                let g = ball
                    .walk(ElementId::IDENTITY, &w)
                    .ok_or("probe leaves the ball")?;
                ensure(ball.dist(g) == n, || {
                    format!("probe {} is not geodesic", al.render(&w))
                })?;
                let probe = w.concat(&al.formal_inverse(&w));
                let cd = fb.seashell(&probe).map_err(|e| e.to_string())?;
                suite.add_combed(&cd, &ball).map_err(|e| e.to_string())?;
                probes += 1;
            }
        }
        for (label, f) in [
            ("intrinsic", suite.intrinsic()),
            ("extrinsic", suite.extrinsic()),
        ] {
            for n in 1..=6u32 {
                let fx = f.eval(QuarterDist::from_int(n));
                ensure(fx + QuarterDist(3) >= QuarterDist::from_int(n), || {
                    format!("{mode:?} {label}: f({n}) = {fx} < {n} - 3/4")
                })?;
            }
        }
        notes.push(format!("{mode:?}: {probes} probes"));
    }
    Ok(format!("f(n) >= n - 3/4 for n <= 6 ({})", notes.join(", ")))
}

/// Thompson normal forms read off the rendered letter names.
fn thompson_reference(names: &[&str]) -> bool {
    let sign = |s: &str| if s.starts_with('x') { 1i32 } else { -1 };
    let generator = |s: &str| s.chars().nth(1).unwrap();
    for i in 0..names.len() {
        if i + 1 < names.len()
            && generator(names[i]) == generator(names[i + 1])
            && sign(names[i]) != sign(names[i + 1])
        {
            return false;
        }
        if i + 2 < names.len()
            && names[i] == "x0"
            && names[i + 1] == "x0"
            && generator(names[i + 2]) == '1'
        {
            return false;
        }
    }
    let mut sum = 0;
    for s in names {
        if generator(s) == '0' {
            sum += sign(s);
        }
        if sum > 0 {
            return false;
        }
    }
    true
}

/// `t^-i a^m t^k` shape check on a compact string over `aAtT`.
fn bs1p_reference(text: &str, p: usize) -> bool {
    let i = text.chars().take_while(|&c| c == 'T').count();
    let rest = &text[i..];
    let m = rest
        .chars()
        .take_while(|&c| c == 'a')
        .count()
        .max(rest.chars().take_while(|&c| c == 'A').count());
    let rest = &rest[m..];
    let k = rest.chars().take_while(|&c| c == 't').count();
    k == rest.len() && (m % p != 0 || i == 0 || k == 0)
}

fn c11() -> Check {
    let ta = thompson_alphabet();
    let mut count = 0;
    let mut accepted = 0;
    for w in ta.words_up_to(4) {
        let names: Vec<&str> = w.iter().map(|x| ta.name(x)).collect();
        let got = thompson_nf_member(&ta, &w).map_err(|e| e.to_string())?;
        ensure(got == thompson_reference(&names), || {
            format!("Thompson disagrees on {}", ta.render(&w))
        })?;
        count += 1;
        accepted += got as usize;
    }
    let hand: [(&str, bool); 6] = [
        ("", true),
        ("x0", false),
        ("X0 x1 x0", true),
        ("X0 x0", false),
        ("X0 X0 x0 x0", false),
        ("X0 X0 x1 x0 x0", true),
    ];
    for (s, want) in hand {
        let w = ta.parse_word(s).unwrap();
        ensure(thompson_nf_member(&ta, &w).unwrap() == want, || {
            format!("Thompson table entry `{s}`")
        })?;
    }
    let ba = bs_alphabet();
    for p in [2u32, 3] {
        for w in ba.words_up_to(4) {
            let text: String = w.iter().map(|x| ba.name(x)).collect();
            let got = bs1p_nf_member(&ba, &w, p).map_err(|e| e.to_string())?;
            ensure(got == bs1p_reference(&text, p as usize), || {
                format!("BS(1,{p}) disagrees on {text}")
            })?;
            count += 1;
        }
    }
    let hand: [(&str, u32, bool); 3] = [("T a t", 3, true), ("T a a a t", 3, false), ("", 3, true)];
    for (s, p, want) in hand {
        let w = ba.parse_word(s).unwrap();
        ensure(bs1p_nf_member(&ba, &w, p).unwrap() == want, || {
            format!("BS table entry `{s}`")
        })?;
    }
    Ok(format!(
        "{count} words agree ({accepted} Thompson normal forms of length <= 4)"
    ))
}

/// Runs one check by number, reusing work cached in `lab`.
pub fn run_one(id: usize, lab: &mut Lab) -> Outcome {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(|| match id {
        1 => c1(),
        2 => c2(lab),
        3 => c3(),
        4 => c4(lab),
        5 => c5(lab),
        6 => c6(lab),
        7 => c7(lab),
        8 => c8(lab),
        9 => c9(lab),
        10 => c10(),
        11 => c11(),
        _ => Err(format!("no check numbered {id}")),
    }));
    let (passed, detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    Outcome {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<Outcome> {
    let mut lab = Lab::new();
    (1..=TITLES.len()).map(|id| run_one(id, &mut lab)).collect()
}

/// Status of the experimental BS(1,2) system: unresolved critical pairs and
/// disagreements with the normal-form predicate on words up to `max_len`.
#[derive(Clone, Debug)]
pub struct Bs12Status {
    pub rules: usize,
    pub critical_pairs: usize,
    pub words_checked: usize,
    pub predicate_mismatches: Vec<String>,
}

pub fn bs12_status(depth: usize, max_len: usize) -> Result<Bs12Status, String> {
    let rs = bs12_system(depth);
    let al: &Alphabet = rs.alphabet();
    let cps = rs.critical_pairs().map_err(|e| e.to_string())?;
    let mut mismatches = Vec::new();
    let words = al.words_up_to(max_len);
    for w in &words {
        let nf = rs.normal_form(w).map_err(|e| e.to_string())?;
        if !bs1p_nf_member(al, &nf, 2).map_err(|e| e.to_string())? {
            mismatches.push(format!("{} -> {}", al.render(w), al.render(&nf)));
        }
    }
    Ok(Bs12Status {
        rules: rs.rules().len(),
        critical_pairs: cps.len(),
        words_checked: words.len(),
        predicate_mismatches: mismatches,
    })
}
