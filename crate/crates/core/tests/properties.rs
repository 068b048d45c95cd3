use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use tamefill::ball::{CayleyBall, ElementId};
use tamefill::diagram::{coarse_profile_extrinsic, coarse_profile_intrinsic};
use tamefill::filling::FillingBuilder;
use tamefill::flow::{rewriting_flow, FlowFunction};
use tamefill::format::{parse_presentation, print_presentation};
use tamefill::presets::preset;
use tamefill::quarter::QuarterDist;
use tamefill::rewrite::{RewritingSystem, Rule};
use tamefill::tameness::{measure_traces, TameMode};
use tamefill::words::{Alphabet, Letter, Presentation, Word};

fn abab() -> Arc<Alphabet> {
    Arc::new(Alphabet::case_paired(&["a", "A", "b", "B"]).unwrap())
}

fn word(max: usize, letters: u16) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..letters, 0..=max).prop_map(|v| v.into_iter().map(Letter).collect())
}

/// Free reduction by cancelling the leftmost-found pair at a chosen spot,
/// repeated until nothing cancels.
fn reduce_in_order(al: &Alphabet, w: &Word, picks: &[usize]) -> Word {
    let mut v: Vec<Letter> = w.letters().to_vec();
    let mut k = 0;
    loop {
        let spots: Vec<usize> = (0..v.len().saturating_sub(1))
            .filter(|&i| al.inverse(v[i]) == v[i + 1])
            .collect();
        if spots.is_empty() {
            return Word::from_letters(v);
        }
        let i = spots[picks.get(k).copied().unwrap_or(0) % spots.len()];
        k += 1;
        v.drain(i..i + 2);
    }
}

struct Z2 {
    rs: RewritingSystem,
    ball: CayleyBall,
    ff: FlowFunction,
}

fn z2() -> &'static Z2 {
    static CELL: OnceLock<Z2> = OnceLock::new();
    CELL.get_or_init(|| {
        let rs = preset("Z2").unwrap().rewriting.unwrap();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 7).unwrap();
        let ff = rewriting_flow(&rs, &ball).unwrap();
        Z2 { rs, ball, ff }
    })
}

/// Identity words of Z², built as a shuffle of balanced letters.
fn z2_identity_word() -> impl Strategy<Value = Word> {
    (0usize..=3, 0usize..=3)
        .prop_flat_map(|(i, j)| {
            let mut v = Vec::new();
            v.extend(std::iter::repeat_n(Letter(0), i));
            v.extend(std::iter::repeat_n(Letter(1), i));
            v.extend(std::iter::repeat_n(Letter(2), j));
            v.extend(std::iter::repeat_n(Letter(3), j));
            Just(v).prop_shuffle()
        })
        .prop_map(Word::from_letters)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn free_reduction_is_idempotent(w in word(12, 4)) {
        let al = abab();
        let r = al.free_reduce(&w);
        prop_assert!(al.is_freely_reduced(&r));
        prop_assert_eq!(al.free_reduce(&r), r);
    }

    #[test]
    fn free_reduction_is_confluent(w in word(8, 4), picks in prop::collection::vec(0usize..8, 8)) {
        let al = abab();
        prop_assert_eq!(reduce_in_order(&al, &w, &picks), al.free_reduce(&w));
    }

    #[test]
    fn word_times_inverse_reduces_to_empty(w in word(10, 4)) {
        let al = abab();
        prop_assert!(al.free_reduce(&w.concat(&al.formal_inverse(&w))).is_empty());
    }

    #[test]
    fn symmetrize_is_idempotent(rels in prop::collection::vec(word(5, 4), 0..4)) {
        let al = abab();
        let s = Presentation::new(al, rels).symmetrize().presentation;
        prop_assert!(s.is_symmetric());
        let t = s.symmetrize().presentation;
        prop_assert_eq!(t.relators().collect::<Vec<_>>(), s.relators().collect::<Vec<_>>());
    }

    #[test]
    fn shortlex_is_length_first(u in word(6, 4), v in word(6, 4)) {
        if u.len() < v.len() {
            prop_assert!(u < v);
        }
        prop_assert_eq!(u.cmp(&v), v.cmp(&u).reverse());
    }

    #[test]
    fn normal_forms_are_idempotent(w in word(8, 4)) {
        for name in ["Z2", "F2"] {
            let rs = preset(name).unwrap().rewriting.unwrap();
            let nf = rs.normal_form(&w).unwrap();
            prop_assert!(rs.is_irreducible(&nf));
            prop_assert_eq!(rs.normal_form(&nf).unwrap(), nf);
        }
    }

    #[test]
    fn finite_normal_forms_are_idempotent(w in word(8, 3)) {
        let rs = preset("S3").unwrap().rewriting.unwrap();
        let nf = rs.normal_form(&w).unwrap();
        prop_assert_eq!(rs.normal_form(&nf).unwrap(), nf);
        let w2: Word = w.iter().map(|a| Letter(a.0 % 2)).collect();
        for name in ["Z3", "Z5"] {
            let rs = preset(name).unwrap().rewriting.unwrap();
            let nf = rs.normal_form(&w2).unwrap();
            prop_assert_eq!(rs.normal_form(&nf).unwrap(), nf);
        }
    }

    #[test]
    fn normal_form_respects_products(u in word(5, 4), v in word(5, 4)) {
        let rs = &z2().rs;
        let uv = rs.normal_form(&u.concat(&v)).unwrap();
        let nu = rs.normal_form(&u).unwrap();
        let nv = rs.normal_form(&v).unwrap();
        prop_assert_eq!(rs.normal_form(&nu.concat(&nv)).unwrap(), uv);
    }

    #[test]
    fn step_function_is_minimal_and_sound(
        traces in prop::collection::vec(prop::collection::vec(0u32..24, 1..8), 0..5),
        strict in any::<bool>(),
    ) {
        let mode = if strict { TameMode::Strict } else { TameMode::Inclusive };
        let traces: Vec<Vec<QuarterDist>> =
            traces.into_iter().map(|t| t.into_iter().map(QuarterDist).collect()).collect();
        let f = measure_traces(traces.iter().map(|t| t.as_slice()), mode);
        // brute force over all pairs
        let mut need: Vec<(QuarterDist, QuarterDist)> = Vec::new();
        for t in &traces {
            for j in 0..t.len() {
                let upto = if strict { j } else { j + 1 };
                for i in 0..upto {
                    need.push((t[j], t[i]));
                }
            }
        }
        for &(x, y) in &need {
            prop_assert!(f.eval(x) >= y);
        }
        for q in 0..26 {
            let x = QuarterDist(q);
            let want = need.iter().filter(|p| p.0 <= x).map(|p| p.1).max().unwrap_or_default();
            prop_assert_eq!(f.eval(x), want);
        }
        for w in f.breakpoints().windows(2) {
            prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
    }

    #[test]
    fn seashells_are_sound(w in z2_identity_word()) {
        let z = z2();
        let fb = FillingBuilder::new(&z.ball, &z.ff);
        let cd = fb.seashell(&w).unwrap();
        let rels = z.ff.relators(&z.ball);
        let r = cd.diagram.validate(&rels, &z.ball, Some(&w));
        prop_assert!(r.passed(), "{:?}", r.failures());
        let pi = coarse_profile_intrinsic(&cd.diagram);
        let pe = coarse_profile_extrinsic(&cd.diagram, &z.ball).unwrap();
        for c in cd.diagram.cells() {
            prop_assert!(pe.cell(c) <= pi.cell(c));
        }
        for p in cd.combing.paths() {
            prop_assert!(p.is_valid_in(&cd.diagram));
        }
        // geodesic normal forms: glued boundary vertices keep their distance
        for (i, p) in cd.combing.vertex_paths.iter().enumerate() {
            let v = cd.diagram.boundary_vertex(i);
            let g = cd.diagram.projection(v);
            prop_assert_eq!(pi.vertices[v.index()], QuarterDist::from_int(z.ball.dist(g) as u32));
            prop_assert_eq!(p.cells.len(), 2 * z.ball.dist(g) + 1);
        }
    }

    #[test]
    fn presentation_files_round_trip(rels in prop::collection::vec(word(5, 4), 0..3), rule_pick in 0usize..4) {
        let al = abab();
        let p = Presentation::new(al.clone(), rels).symmetrize().presentation;
        let rules = vec![Rule::new(Word::from_letters(vec![Letter(2), Letter(0)]), Word::from_letters(vec![Letter(0), Letter(2)]))];
        let rs = RewritingSystem::new(al, rules.into_iter().take(rule_pick % 2).collect()).ok();
        let text = print_presentation(&p, rs.as_ref().filter(|r| !r.rules().is_empty()));
        let back = parse_presentation(&text).unwrap();
        if p.relator_count() > 0 {
            prop_assert_eq!(back.presentation.relators().collect::<Vec<_>>(), p.relators().collect::<Vec<_>>());
        }
        if p.relator_count() > 0 {
            prop_assert_eq!(print_presentation(&back.presentation, back.rewriting.as_ref()), text.clone());
        }
        let once = print_presentation(&back.presentation, back.rewriting.as_ref());
        let again = parse_presentation(&once).unwrap();
        prop_assert_eq!(print_presentation(&again.presentation, again.rewriting.as_ref()), once);
    }
}

#[test]
fn gamma_is_monotone_and_prefix_bounded() {
    let al = abab();
    let r = |l: &str, r: &str| Rule::new(al.parse_word(l).unwrap(), al.parse_word(r).unwrap());
    let systems = [
        vec![r("a a", "a"), r("a", "b")],
        vec![r("a b", "a"), r("b a", "b")],
        vec![r("a", "b b")],
        vec![r("b a", "a b"), r("a A", ""), r("b B", "")],
    ];
    for rules in systems {
        let rs = RewritingSystem::new(al.clone(), rules).unwrap();
        let g = rs.gamma_table(5).unwrap();
        let gp = rs.gamma_prefix_table(5).unwrap();
        for n in 0..=5 {
            assert!(gp[n] <= g[n]);
            assert!(g[n] >= n);
            if n > 0 {
                assert!(g[n] >= g[n - 1] && gp[n] >= gp[n - 1]);
            }
        }
    }
}

#[test]
fn preset_normal_forms_are_prefix_closed() {
    for name in ["F1", "F2", "Z2", "Z3", "Z5", "S3"] {
        let rs = preset(name).unwrap().rewriting.unwrap();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 5).unwrap();
        for g in ball.elements() {
            let nf = ball.nf(g);
            for k in 0..nf.len() {
                let p = nf.prefix(k);
                assert_eq!(rs.normal_form(&p).unwrap(), p, "{name}");
            }
        }
    }
}

#[test]
fn normal_forms_idempotent_on_random_words() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    for name in ["F1", "F2", "Z2", "Z3", "Z5", "S3"] {
        let rs = preset(name).unwrap().rewriting.unwrap();
        let n = rs.alphabet().len() as u16;
        for _ in 0..1000 {
            let w = word(8, n).new_tree(&mut runner).unwrap().current();
            let nf = rs.normal_form(&w).unwrap();
            assert_eq!(rs.normal_form(&nf).unwrap(), nf, "{name}");
        }
    }
}

#[test]
fn z2_identity_word_count() {
    // freely reduced words with zero exponent sums, counted directly
    let al = abab();
    let mut want = 0;
    for w in al.words_up_to(8) {
        if w.is_empty() || !al.is_freely_reduced(&w) {
            continue;
        }
        let mut s = [0i32; 2];
        for a in w.iter() {
            s[(a.0 / 2) as usize] += if a.0 % 2 == 0 { 1 } else { -1 };
        }
        if s == [0, 0] {
            want += 1;
        }
    }
    let ball = &z2().ball;
    let got = ball.identity_words(8, true).unwrap();
    assert_eq!(got.len(), want);
    let set: BTreeSet<_> = got.iter().collect();
    assert_eq!(set.len(), got.len());
    assert!(got
        .iter()
        .all(|w| ball.walk(ElementId::IDENTITY, w) == Some(ElementId::IDENTITY)));
}
