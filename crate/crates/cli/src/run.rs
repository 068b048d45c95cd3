use std::fs;
use std::path::Path;

use tamefill::ball::{self, check_almost_convex, BallEdge, CayleyBall, ElementId};
use tamefill::diagram::{
    self, coarse_profile_extrinsic, coarse_profile_intrinsic, diameters, VanKampenDiagram,
};
use tamefill::filling::{build_finite_filling, CombedDiagram, FillingBuilder, FiniteCatalog};
use tamefill::flow::{ac_flow, rewriting_flow, verify_flow, FlowFunction};
use tamefill::format::parse_presentation;
use tamefill::presets::preset;
use tamefill::quarter::QuarterDist;
use tamefill::rewrite::RewritingSystem;
use tamefill::suite::run_all;
use tamefill::tameness::{
    check_diameter_bound, compute_kappas, compute_kr_prime, compute_mus, ProfileKind, StepFunction,
    TameMode, TameSuite,
};
use tamefill::words::{Presentation, Word};

use crate::fail::Failure;
use crate::{BallFormat, Cli, Command, DiagramFormat, FlowAction, FlowChoice, Kind, Mode};

const DEFAULT_UNFOLD_BUDGET: usize = 1_000_000;

struct Group {
    name: String,
    presentation: Presentation,
    rewriting: Option<RewritingSystem>,
    order: Option<usize>,
}

impl Group {
    fn rs(&self) -> Result<&RewritingSystem, Failure> {
        self.rewriting
            .as_ref()
            .ok_or_else(|| Failure::Input(format!("{} has no rewriting system", self.name)))
    }

    fn parse(&self, text: &str) -> Result<Word, Failure> {
        Ok(self.presentation.alphabet().parse_word(text)?)
    }

    fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            "1".to_string()
        } else {
            self.presentation.alphabet().render(w)
        }
    }

    fn ball(&self, radius: usize) -> Result<CayleyBall, Failure> {
        let rs = self.rs()?;
        Ok(CayleyBall::build(rs, rs.alphabet().clone(), radius)?)
    }
}

fn load(cli: &Cli) -> Result<Group, Failure> {
    let mut g = match (&cli.source.preset, &cli.source.input) {
        (Some(name), None) => {
            let p = preset(name)?;
            Group {
                name: p.name.to_string(),
                presentation: p.presentation,
                rewriting: p.rewriting,
                order: p.order,
            }
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let f = parse_presentation(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Group {
                name: path.display().to_string(),
                presentation: f.presentation,
                rewriting: f.rewriting,
                order: None,
            }
        }
        _ => {
            return Err(Failure::Input(
                "one of --preset or --input is required".into(),
            ))
        }
    };
    if let Some(b) = cli.budget {
        let b = b as usize;
        g.rewriting = g.rewriting.map(|rs| rs.with_budgets(b, b));
    }
    Ok(g)
}

fn unfold_budget(cli: &Cli) -> usize {
    cli.budget.map_or(DEFAULT_UNFOLD_BUDGET, |b| b as usize)
}

/// Writes `contents` to `name` in the output directory, or to stdout.
fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, contents)?;
            println!("wrote {}", path.display());
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(msg()))
    }
}

fn make_flow(
    g: &Group,
    ball: &CayleyBall,
    choice: FlowChoice,
    k: usize,
) -> Result<FlowFunction, Failure> {
    Ok(match choice {
        FlowChoice::Rewriting => rewriting_flow(g.rs()?, ball)?,
        FlowChoice::Ac => ac_flow(ball, k)?,
    })
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if let Command::CheckAll = cli.command {
        return check_all();
    }
    let g = load(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Nf { word } => {
            let w = g.parse(&word.join(" "))?;
            println!("{}", g.render(&g.rs()?.normal_form(&w)?));
            Ok(())
        }
        Command::Gamma { n, prefix } => {
            let rs = g.rs()?;
            let v = if *prefix {
                rs.gamma_prefix(*n)?
            } else {
                rs.gamma(*n)?
            };
            println!("{v}");
            Ok(())
        }
        Command::Ball { n, format } => ball_cmd(&g, *n, *format, out),
        Command::AcCheck { n, k } => ac_check(&g, *n, *k),
        Command::Flow {
            action,
            kind,
            radius,
            k,
        } => flow_cmd(&g, *action, *kind, *radius, *k, out),
        Command::Diagram {
            edge,
            tokens,
            flow,
            radius,
            k,
            format,
        } => diagram_cmd(&g, *edge, tokens, *flow, *radius, *k, *format, out),
        Command::Tameness {
            kind,
            words,
            all_to,
            mode,
            flow,
            radius,
            k,
        } => {
            let sample = match (words, all_to) {
                (Some(path), _) => Sample::File(
                    fs::read_to_string(path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                ),
                (None, Some(l)) => Sample::AllTo(*l),
                (None, None) => {
                    return Err(Failure::Input("--words or --all-to is required".into()))
                }
            };
            let mode = match mode {
                Mode::Inclusive => TameMode::Inclusive,
                Mode::Strict => TameMode::Strict,
            };
            let kind = match kind {
                Kind::Intrinsic => ProfileKind::Intrinsic,
                Kind::Extrinsic => ProfileKind::Extrinsic,
            };
            tameness_cmd(&g, kind, &sample, mode, *flow, *radius, *k, out)
        }
        Command::Bounds { n, radius } => bounds_cmd(&g, *n, *radius, unfold_budget(cli), out),
        Command::CheckAll => unreachable!(),
    }
}

fn check_all() -> Result<(), Failure> {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id.to_string())
        .collect();
    check(failed.is_empty(), || {
        format!("criteria failed: {}", failed.join(", "))
    })
}

fn ball_cmd(g: &Group, n: usize, format: BallFormat, out: Option<&Path>) -> Result<(), Failure> {
    let b = g.ball(n)?;
    match format {
        BallFormat::Summary => {
            let edges = b.inner_edges().filter(|&e| b.is_canonical(e)).count();
            println!("radius: {n}");
            println!("vertices: {}", b.len());
            println!("edges: {edges}");
            for m in 0..=n {
                println!("sphere {m}: {}", b.sphere(m)?.len());
            }
            println!("complete: {}", b.boundary_complete());
            let trivial = b.trivial_letters();
            if !trivial.is_empty() {
                let names: Vec<&str> = trivial.iter().map(|&a| b.alphabet().name(a)).collect();
                println!("trivial generators: {}", names.join(" "));
            }
            Ok(())
        }
        BallFormat::Dot => emit(out, "ball.dot", &ball::to_dot(&b)),
        BallFormat::Json => emit(out, "ball.json", &format!("{:#}\n", ball::to_json(&b))),
    }
}

fn ac_check(g: &Group, n: usize, k: usize) -> Result<(), Failure> {
    let b = g.ball(n + 1)?;
    let mut failed = Vec::new();
    for m in 1..=n {
        let r = check_almost_convex(&b, m, k)?;
        let status = if r.passed() { "pass" } else { "FAIL" };
        println!(
            "n={m} k={k} pairs={} max_inside={} {status}",
            r.pairs_checked, r.max_inside_dist
        );
        if let Some(w) = &r.failure {
            let inside = w.inside_dist.map_or("none".to_string(), |d| d.to_string());
            println!(
                "  witness {} / {} distance {} inside {inside}",
                g.render(b.nf(w.g)),
                g.render(b.nf(w.h)),
                w.graph_dist
            );
            failed.push(m);
        }
    }
    check(failed.is_empty(), || {
        format!("not almost convex with k={k} at levels {failed:?}")
    })
}

fn flow_cmd(
    g: &Group,
    action: FlowAction,
    kind: FlowChoice,
    radius: usize,
    k: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let b = g.ball(radius)?;
    let ff = make_flow(g, &b, kind, k)?;
    match action {
        FlowAction::Build => emit(out, "flow.txt", &ff.export_triples(&b)),
        FlowAction::Verify => {
            let bound = match kind {
                FlowChoice::Rewriting => ff.bound_k(),
                FlowChoice::Ac => k,
            };
            let r = verify_flow(&ff, &b, bound)?;
            println!("radius: {}", r.verified_radius);
            println!("edges checked: {}", r.edges_checked);
            println!("unusable: {}", r.unusable);
            println!("descent pairs: {}", r.descent_pairs);
            println!("bound k: {}", r.bound_k);
            println!("passed: {}", r.passed());
            check(r.passed(), || {
                format!(
                    "missing {}, F1 {}, F2d {}, F3 {}, factorization {}, cycle {}",
                    r.missing.len(),
                    r.f1_failures.len(),
                    r.f2d_failures.len(),
                    r.f3_failures.len(),
                    r.factorization_failures.len(),
                    r.cycle.is_some()
                )
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn diagram_cmd(
    g: &Group,
    edge: bool,
    tokens: &[String],
    choice: FlowChoice,
    radius: Option<usize>,
    k: usize,
    format: DiagramFormat,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (d, boundary, b, ff) = if edge {
        let (letter, src) = tokens.split_last().unwrap();
        let src = g.parse(&src.join(" "))?;
        let al = g.presentation.alphabet();
        let a = al
            .letter(letter)
            .ok_or_else(|| Failure::Input(format!("unknown letter `{letter}`")))?;
        let b = g.ball(radius.unwrap_or(src.len() + 6))?;
        let s = b.lookup(&src).ok_or_else(|| {
            Failure::Input(format!(
                "`{}` is not a normal form in the ball",
                g.render(&src)
            ))
        })?;
        let e = BallEdge::new(s, a);
        let ff = make_flow(g, &b, choice, k)?;
        let nd = FillingBuilder::new(&b, &ff).ndiagram(e)?;
        let boundary = nd.diagram.boundary_word();
        (nd.diagram.clone(), boundary, b, ff)
    } else {
        let w = g.parse(&tokens.join(" "))?;
        let b = g.ball(radius.unwrap_or(w.len() + 4))?;
        let ff = make_flow(g, &b, choice, k)?;
        let cd = FillingBuilder::new(&b, &ff).seashell(&w)?;
        (cd.diagram, w, b, ff)
    };
    let report = d.validate(&ff.relators(&b), &b, Some(&boundary));
    let pi = coarse_profile_intrinsic(&d);
    match format {
        DiagramFormat::Summary => {
            let pe = coarse_profile_extrinsic(&d, &b)?;
            let (di, de) = diameters(&pi, &pe);
            println!("boundary: {}", g.render(&boundary));
            println!("vertices: {}", d.vertex_count());
            println!("edges: {}", d.edge_count());
            println!("faces: {}", d.face_count());
            println!("euler: {}", d.euler_characteristic());
            println!("intrinsic diameter: {di}");
            println!("extrinsic diameter: {de}");
            println!("valid: {}", report.passed());
        }
        DiagramFormat::Json => emit(
            out,
            "diagram.json",
            &format!("{:#}\n", diagram::to_json(&d, &b, Some(&pi))),
        )?,
        DiagramFormat::Svg => emit(out, "diagram.svg", &diagram::to_svg(&d))?,
    }
    check(report.passed(), || report.failures().join("; "))
}

enum Sample {
    File(String),
    AllTo(usize),
}

fn sample_words(g: &Group, b: &CayleyBall, sample: &Sample) -> Result<Vec<Word>, Failure> {
    match sample {
        Sample::AllTo(l) => Ok(b.identity_words(*l, true)?),
        Sample::File(text) => {
            let mut words = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let body = line.split('#').next().unwrap().trim();
                if body.is_empty() {
                    continue;
                }
                let w = g
                    .parse(body)
                    .map_err(|e| Failure::Input(format!("line {}: {}", i + 1, fail_message(&e))))?;
                words.push(w);
            }
            Ok(words)
        }
    }
}

fn fail_message(f: &Failure) -> &str {
    match f {
        Failure::Check(m) | Failure::Input(m) | Failure::Budget(m) => m,
    }
}

fn longest(sample: &Sample, g: &Group) -> Result<usize, Failure> {
    match sample {
        Sample::AllTo(l) => Ok(*l),
        Sample::File(text) => {
            let mut m = 0;
            for line in text.lines() {
                let body = line.split('#').next().unwrap().trim();
                if let Ok(w) = g.parse(body) {
                    m = m.max(w.len());
                }
            }
            Ok(m)
        }
    }
}

fn idiam(d: &VanKampenDiagram) -> u32 {
    coarse_profile_intrinsic(d).max_vertex().floor()
}

#[allow(clippy::too_many_arguments)]
fn tameness_cmd(
    g: &Group,
    kind: ProfileKind,
    sample: &Sample,
    mode: TameMode,
    choice: FlowChoice,
    radius: Option<usize>,
    k: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let l = longest(sample, g)?;
    let radius = radius.unwrap_or(match g.order {
        Some(n) => n.max(l),
        None => l + 6,
    });
    let b = g.ball(radius)?;
    let ff = make_flow(g, &b, choice, k)?;
    let fb = FillingBuilder::new(&b, &ff);
    let words = sample_words(g, &b, sample)?;
    for w in &words {
        check(
            b.walk(ElementId::IDENTITY, w) == Some(ElementId::IDENTITY),
            || format!("`{}` does not represent the identity", g.render(w)),
        )
        .map_err(|f| Failure::Input(fail_message(&f).to_string()))?;
    }
    let mut suite = TameSuite::new(mode);
    let mut diams = Vec::with_capacity(words.len());
    let mut add = |cd: CombedDiagram, len: usize| -> Result<(), Failure> {
        suite.add_combed(&cd, &b)?;
        diams.push((len, idiam(&cd.diagram)));
        Ok(())
    };
    // Finite groups are filled from a catalog of short relations; the
    // bound is then a constant.
    let bound: Option<Box<dyn Fn(QuarterDist) -> QuarterDist>> = if b.boundary_complete() {
        let order = b.len();
        let catalog = FiniteCatalog::build(&fb, order)?;
        for w in &words {
            add(build_finite_filling(w, &b, &catalog)?, w.len())?;
        }
        let c = match kind {
            ProfileKind::Intrinsic => order as u32 + catalog.max_intrinsic_diameter(),
            ProfileKind::Extrinsic => order as u32,
        };
        let v = QuarterDist::from_int(c) + QuarterDist(2);
        Some(Box::new(move |_| v))
    } else {
        for w in &words {
            add(fb.seashell(w)?, w.len())?;
        }
        match choice {
            FlowChoice::Ac => Some(Box::new(|x| x + QuarterDist::from_int(1))),
            FlowChoice::Rewriting => None,
        }
    };
    let f = suite.get(kind);
    emit(out, &csv_name(kind), &csv(&f, bound.as_deref()))?;
    if let Some(bd) = &bound {
        let over = f.first_exceeding(|x| Ok::<_, ()>(bd(x))).unwrap();
        check(over.is_none(), || {
            let (x, v, c) = over.unwrap();
            format!("f({x}) = {v} exceeds the bound {c}")
        })?;
    }
    let rep = check_diameter_bound(diams, &f);
    check(rep.passed(), || {
        format!("{} diagrams exceed the diameter bound", rep.failures.len())
    })
}

fn csv_name(kind: ProfileKind) -> String {
    match kind {
        ProfileKind::Intrinsic => "tameness_intrinsic.csv".into(),
        ProfileKind::Extrinsic => "tameness_extrinsic.csv".into(),
    }
}

fn csv(f: &StepFunction, bound: Option<&dyn Fn(QuarterDist) -> QuarterDist>) -> String {
    let mut s = String::from("x_quarters,f_quarters,bound_quarters\n");
    for x in f.grid() {
        let b = bound.map_or(String::new(), |b| b(x).0.to_string());
        s.push_str(&format!("{},{},{b}\n", x.0, f.eval(x).0));
    }
    s
}

fn bounds_cmd(
    g: &Group,
    n: usize,
    radius: Option<usize>,
    budget: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let rs = g.rs()?;
    let b = g.ball(radius.unwrap_or(n + 8))?;
    let ff = rewriting_flow(rs, &b)?;
    let rho = ff.relators(&b).max_relator_len();
    let fb = FillingBuilder::new(&b, &ff);
    let kappa_to = (n + rho + 1).min(b.radius().saturating_sub(1));
    let kappas = compute_kappas(&fb, kappa_to)?;
    let (mu_i, mu_e) = compute_mus(&kappas, rho);
    let kr = compute_kr_prime(&ff, &b, n.min(kappa_to), budget)?;
    let side = rs.max_side_len();
    let gamma = rs.gamma_table(n + side + 2)?;
    let cell = |v: Result<u32, _>| v.map_or(String::new(), |v: u32| v.to_string());
    let mut s =
        String::from("n,k_ti,k_te,k_xi,k_xe,k_r_prime,mu_i_quarters,mu_e_quarters,gamma_bound\n");
    for m in 0..=n {
        let mu = |f: &tamefill::tameness::MuFunction| {
            cell(f.eval(QuarterDist::from_int(m as u32)).map(|q| q.0))
        };
        s.push_str(&format!(
            "{m},{},{},{},{},{},{},{},{}\n",
            cell(kappas.k_ti.get(m)),
            cell(kappas.k_te.get(m)),
            cell(kappas.k_xi.get(m)),
            cell(kappas.k_xe.get(m)),
            cell(kr.get(m)),
            mu(&mu_i),
            mu(&mu_e),
            gamma[m + side + 2] + 1
        ));
    }
    emit(out, "bounds.csv", &s)
}
