//! Built-in presentations and rewriting systems, plus membership tests for
//! two normal-form languages that ship without a rewriting system.

use std::sync::Arc;

use thiserror::Error;

use crate::rewrite::{RewriteError, RewritingSystem, Rule};
use crate::words::{Alphabet, Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresetError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("word is not over the alphabet {0}")]
    WrongAlphabet(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub presentation: Presentation,
    pub rewriting: Option<RewritingSystem>,
    /// Group order when finite.
    pub order: Option<usize>,
    /// The rewriting system is not known to be complete.
    pub experimental: bool,
}

pub const PRESET_NAMES: &[&str] = &["F1", "F2", "Z2", "Z3", "Z5", "S3", "BS12", "F"];

pub fn preset(name: &str) -> Result<Preset, PresetError> {
    match name {
        "F1" => Ok(free_group(1, "F1", "infinite cyclic group, free reduction")),
        "F2" => Ok(free_group(2, "F2", "free group of rank 2, free reduction")),
        "Z2" => Ok(z2()),
        "Z3" => Ok(cyclic(3)),
        "Z5" => Ok(cyclic(5)),
        "S3" => Ok(s3()),
        "BS12" => Ok(bs12(BS12_DEPTH)),
        "F" => Ok(thompson()),
        _ => Err(PresetError::UnknownPreset(name.to_string())),
    }
}

pub fn all_presets() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| preset(n).unwrap()).collect()
}

fn rules(al: &Alphabet, pairs: &[(&str, &str)]) -> Vec<Rule> {
    pairs
        .iter()
        .map(|(l, r)| Rule::new(al.parse_word(l).unwrap(), al.parse_word(r).unwrap()))
        .collect()
}

fn cancellations(al: &Alphabet) -> Vec<Rule> {
    let mut out = Vec::new();
    for a in al.letters() {
        out.push(Rule::new(
            Word::from_letters(vec![a, al.inverse(a)]),
            Word::new(),
        ));
    }
    out
}

fn system(al: Arc<Alphabet>, rules: Vec<Rule>) -> RewritingSystem {
    RewritingSystem::new(al, rules).expect("preset rules are well formed")
}

fn entry(
    name: &'static str,
    description: &'static str,
    rs: RewritingSystem,
    order: Option<usize>,
) -> Preset {
    Preset {
        name,
        description,
        presentation: rs.rule_relators().symmetrize().presentation,
        rewriting: Some(rs),
        order,
        experimental: false,
    }
}

const LOWER: [&str; 4] = ["a", "b", "c", "d"];
const UPPER: [&str; 4] = ["A", "B", "C", "D"];

fn free_group(rank: usize, name: &'static str, description: &'static str) -> Preset {
    let mut names = Vec::new();
    for i in 0..rank {
        names.push(LOWER[i]);
        names.push(UPPER[i]);
    }
    let al = Arc::new(Alphabet::case_paired(&names).unwrap());
    let rs = system(al.clone(), cancellations(&al));
    entry(name, description, rs, None)
}

fn z2() -> Preset {
    let al = Arc::new(Alphabet::case_paired(&["a", "A", "b", "B"]).unwrap());
    let mut r = cancellations(&al);
    r.extend(rules(
        &al,
        &[
            ("b a", "a b"),
            ("b A", "A b"),
            ("B a", "a B"),
            ("B A", "A B"),
        ],
    ));
    entry(
        "Z2",
        "free abelian group of rank 2, shortlex commutation",
        system(al, r),
        None,
    )
}

/// Shortlex system for `Z/n` over `a < A`, `n ≥ 3`.
pub fn cyclic_system(n: usize) -> RewritingSystem {
    assert!(n >= 3, "cyclic presets need n >= 3");
    let al = Arc::new(Alphabet::case_paired(&["a", "A"]).unwrap());
    let (a, inv) = (al.letter("a").unwrap(), al.letter("A").unwrap());
    let pow = |x: Letter, k: usize| Word::from_letters(vec![x; k]);
    let mut r = cancellations(&al);
    let k = n / 2;
    if n % 2 == 1 {
        r.push(Rule::new(pow(a, k + 1), pow(inv, k)));
        r.push(Rule::new(pow(inv, k + 1), pow(a, k)));
    } else {
        r.push(Rule::new(pow(a, k + 1), pow(inv, k - 1)));
        r.push(Rule::new(pow(inv, k), pow(a, k)));
    }
    system(al, r)
}

fn cyclic(n: usize) -> Preset {
    let (name, description) = match n {
        3 => ("Z3", "cyclic group of order 3"),
        5 => ("Z5", "cyclic group of order 5"),
        _ => ("Zn", "cyclic group"),
    };
    entry(name, description, cyclic_system(n), Some(n))
}

fn s3() -> Preset {
    let al = Arc::new(Alphabet::new(&["a", "A", "b"], &[("a", "A"), ("b", "b")]).unwrap());
    let r = rules(
        &al,
        &[
            ("a a", "A"),
            ("a A", ""),
            ("A a", ""),
            ("A A", "a"),
            ("b a", "A b"),
            ("b A", "a b"),
            ("b b", ""),
        ],
    );
    entry(
        "S3",
        "symmetric group on three letters, b of order 2",
        system(al, r),
        Some(6),
    )
}

/// Largest `m` in the shipped rules `T a^(2m) t -> a^m`.
pub const BS12_DEPTH: usize = 12;

pub fn bs_alphabet() -> Arc<Alphabet> {
    Arc::new(Alphabet::case_paired(&["a", "A", "t", "T"]).unwrap())
}

/// A finite part of the infinite complete system for `BS(1,2)` with
/// conjugation rules up to `T a^(2m) t` for `m ≤ depth`.
pub fn bs12_system(depth: usize) -> RewritingSystem {
    let al = bs_alphabet();
    let l = |s: &str| al.letter(s).unwrap();
    let (a, ai, t, ti) = (l("a"), l("A"), l("t"), l("T"));
    let w = |v: Vec<Letter>| Word::from_letters(v);
    let mut r = cancellations(&al);
    for x in [a, ai] {
        r.push(Rule::new(w(vec![t, x]), w(vec![x, x, t])));
        r.push(Rule::new(w(vec![x, ti]), w(vec![ti, x, x])));
        for m in 1..=depth {
            let mut lhs = vec![ti];
            lhs.extend(std::iter::repeat_n(x, 2 * m));
            lhs.push(t);
            r.push(Rule::new(w(lhs), w(vec![x; m])));
        }
    }
    system(al, r)
}

fn bs12(depth: usize) -> Preset {
    let rs = bs12_system(depth);
    let al = rs.alphabet().clone();
    let rel = al.parse_word("t a T A A").unwrap();
    Preset {
        name: "BS12",
        description: "Baumslag-Solitar group BS(1,2), truncated rewriting system",
        presentation: Presentation::new(al, [rel]).symmetrize().presentation,
        rewriting: Some(rs),
        order: None,
        experimental: true,
    }
}

pub fn thompson_alphabet() -> Arc<Alphabet> {
    Arc::new(Alphabet::new(&["x0", "X0", "x1", "X1"], &[("x0", "X0"), ("x1", "X1")]).unwrap())
}

fn thompson() -> Preset {
    let al = thompson_alphabet();
    let rels = [
        "x0 X1 X0 x1 x0 x1 X0 X0 X1 x0",
        "x0 X1 X0 X0 x1 x0 x0 x1 X0 X0 X0 X1 x0 x0",
    ];
    let rels: Vec<Word> = rels
        .iter()
        .map(|s| al.free_reduce(&al.parse_word(s).unwrap()))
        .collect();
    Preset {
        name: "F",
        description: "Thompson's group F; normal-form predicate only",
        presentation: Presentation::new(al, rels).symmetrize().presentation,
        rewriting: None,
        order: None,
        experimental: false,
    }
}

fn same_alphabet(al: &Alphabet, names: &[&str]) -> bool {
    al.names().len() == names.len() && names.iter().all(|n| al.letter(n).is_some())
}

/// Membership in the Thompson normal forms over `x0, X0, x1, X1`.
pub fn thompson_nf_member(al: &Alphabet, w: &Word) -> Result<bool, PresetError> {
    let names = ["x0", "X0", "x1", "X1"];
    if !same_alphabet(al, &names) {
        return Err(PresetError::WrongAlphabet(names.join(" ")));
    }
    let l = |s: &str| al.letter(s).unwrap();
    let (x0, y0, x1, y1) = (l("x0"), l("X0"), l("x1"), l("X1"));
    let forbidden: [&[Letter]; 6] = [
        &[x0, y0],
        &[y0, x0],
        &[x1, y1],
        &[y1, x1],
        &[x0, x0, x1],
        &[x0, x0, y1],
    ];
    if forbidden.iter().any(|f| w.contains_factor(f)) {
        return Ok(false);
    }
    let mut sum = 0i64;
    for a in w.iter() {
        if a == x0 {
            sum += 1;
        } else if a == y0 {
            sum -= 1;
        }
        if sum > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership in `{t^-i a^m t^k : p ∤ m or i·k = 0}` over `a, A, t, T`.
pub fn bs1p_nf_member(al: &Alphabet, w: &Word, p: u32) -> Result<bool, PresetError> {
    let names = ["a", "A", "t", "T"];
    if !same_alphabet(al, &names) {
        return Err(PresetError::WrongAlphabet(names.join(" ")));
    }
    let l = |s: &str| al.letter(s).unwrap();
    let (a, ai, t, ti) = (l("a"), l("A"), l("t"), l("T"));
    let s = w.letters();
    let mut pos = 0;
    let run = |pos: &mut usize, x: Letter| {
        let start = *pos;
        while *pos < s.len() && s[*pos] == x {
            *pos += 1;
        }
        *pos - start
    };
    let i = run(&mut pos, ti);
    let m = match s.get(pos) {
        Some(&x) if x == a => run(&mut pos, a),
        Some(&x) if x == ai => run(&mut pos, ai),
        _ => 0,
    };
    let k = run(&mut pos, t);
    if pos != s.len() {
        return Ok(false);
    }
    Ok(!(m as u32).is_multiple_of(p) || i * k == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads() {
        for p in all_presets() {
            if let Some(rs) = &p.rewriting {
                if !p.experimental {
                    assert!(rs.check_minimal().is_empty(), "{}", p.name);
                    assert!(rs.critical_pairs().unwrap().is_empty(), "{}", p.name);
                }
            }
        }
        assert!(matches!(preset("Q8"), Err(PresetError::UnknownPreset(_))));
    }

    #[test]
    fn z2_shape() {
        let p = preset("Z2").unwrap();
        let rs = p.rewriting.unwrap();
        assert_eq!(rs.alphabet().len(), 4);
        assert_eq!(rs.rules().len(), 8);
    }

    #[test]
    fn cyclic_systems_complete() {
        for n in 3..=9 {
            let rs = cyclic_system(n);
            assert!(rs.check_minimal().is_empty(), "n = {n}");
            assert!(rs.critical_pairs().unwrap().is_empty(), "n = {n}");
        }
    }

    #[test]
    fn thompson_examples() {
        let al = thompson_alphabet();
        let w = |s: &str| al.parse_word(s).unwrap();
        assert!(thompson_nf_member(&al, &w("")).unwrap());
        assert!(!thompson_nf_member(&al, &w("x0")).unwrap());
        assert!(thompson_nf_member(&al, &w("X0 x1 x0")).unwrap());
        assert!(!thompson_nf_member(&al, &w("X0 X0 x0")).unwrap());
        let other = Alphabet::case_paired(&["a", "A"]).unwrap();
        assert!(thompson_nf_member(&other, &Word::new()).is_err());
    }

    #[test]
    fn bs1p_examples() {
        let al = bs_alphabet();
        let w = |s: &str| al.parse_word(s).unwrap();
        assert!(bs1p_nf_member(&al, &w("T a t"), 3).unwrap());
        assert!(!bs1p_nf_member(&al, &w("T a a a t"), 3).unwrap());
        assert!(bs1p_nf_member(&al, &w(""), 3).unwrap());
        assert!(!bs1p_nf_member(&al, &w("a T"), 2).unwrap());
        assert!(!bs1p_nf_member(&al, &w("a A"), 2).unwrap());
        assert!(bs1p_nf_member(&al, &w("a a t t"), 2).unwrap());
    }
}
