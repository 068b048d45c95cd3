//! String rewriting: normal forms, prefix rewriting, completeness checks and
//! string growth complexity.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::words::{Alphabet, Letter, Presentation, Word};

pub const DEFAULT_STEP_BUDGET: usize = 100_000;
pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("rule {0} has an empty left-hand side")]
    EmptyLhs(usize),
    #[error("rule {0} has identical sides")]
    TrivialRule(usize),
    #[error("rule {0} duplicates an earlier rule")]
    DuplicateRule(usize),
    #[error("rewriting did not terminate within {0} steps")]
    BudgetExceeded(usize),
    #[error("reachability search exceeded {0} nodes")]
    NodeBudgetExceeded(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

impl Rule {
    pub fn new(lhs: Word, rhs: Word) -> Self {
        Rule { lhs, rhs }
    }
}

/// An occurrence of a rule's left side inside a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Redex {
    pub start: usize,
    pub rule: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinimalityViolation {
    ReducibleRhs { rule: usize },
    ReducibleFactor { rule: usize, factor: Word },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    /// The overlap (or containing) word.
    pub overlap: Word,
    pub rules: (usize, usize),
    pub left: Word,
    pub right: Word,
}

#[derive(Clone, Debug)]
pub struct RewritingSystem {
    alphabet: Arc<Alphabet>,
    rules: Vec<Rule>,
    pub step_budget: usize,
    pub node_budget: usize,
}

impl RewritingSystem {
    pub fn new(alphabet: Arc<Alphabet>, rules: Vec<Rule>) -> Result<Self, RewriteError> {
        let mut seen = HashSet::new();
        for (i, r) in rules.iter().enumerate() {
            if r.lhs.is_empty() {
                return Err(RewriteError::EmptyLhs(i));
            }
            if r.lhs == r.rhs {
                return Err(RewriteError::TrivialRule(i));
            }
            if !seen.insert(r) {
                return Err(RewriteError::DuplicateRule(i));
            }
        }
        Ok(RewritingSystem {
            alphabet,
            rules,
            step_budget: DEFAULT_STEP_BUDGET,
            node_budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn with_budgets(mut self, steps: usize, nodes: usize) -> Self {
        self.step_budget = steps;
        self.node_budget = nodes;
        self
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Longest rule side, used as ρ in the growth-based tameness bound.
    pub fn max_side_len(&self) -> usize {
        self.rules
            .iter()
            .map(|r| r.lhs.len().max(r.rhs.len()))
            .max()
            .unwrap_or(0)
    }

    /// The words `u v⁻¹` for each rule `u → v`.
    pub fn rule_relators(&self) -> Presentation {
        let rels = self
            .rules
            .iter()
            .map(|r| r.lhs.concat(&self.alphabet.formal_inverse(&r.rhs)));
        Presentation::new(self.alphabet.clone(), rels)
    }

    fn matches_at(&self, w: &[Letter], start: usize, rule: usize) -> bool {
        let l = self.rules[rule].lhs.letters();
        start + l.len() <= w.len() && &w[start..start + l.len()] == l
    }

    /// Leftmost start, then longest lhs, then rule order.
    pub fn find_redex(&self, w: &[Letter]) -> Option<Redex> {
        for start in 0..w.len() {
            let mut best: Option<usize> = None;
            for i in 0..self.rules.len() {
                if self.matches_at(w, start, i)
                    && best.is_none_or(|b| self.rules[i].lhs.len() > self.rules[b].lhs.len())
                {
                    best = Some(i);
                }
            }
            if let Some(rule) = best {
                return Some(Redex { start, rule });
            }
        }
        None
    }

    /// Leftmost-ending occurrence; ties broken as in [`Self::find_redex`].
    pub fn find_prefix_redex(&self, w: &[Letter]) -> Option<Redex> {
        for end in 1..=w.len() {
            let mut best: Option<Redex> = None;
            for i in 0..self.rules.len() {
                let l = self.rules[i].lhs.len();
                if l > end {
                    continue;
                }
                let start = end - l;
                if self.matches_at(w, start, i) {
                    let better = match best {
                        None => true,
                        Some(b) => start < b.start,
                    };
                    if better {
                        best = Some(Redex { start, rule: i });
                    }
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    pub fn apply(&self, w: &Word, r: Redex) -> Word {
        let rule = &self.rules[r.rule];
        let l = w.letters();
        let mut v = Vec::with_capacity(l.len() + rule.rhs.len());
        v.extend_from_slice(&l[..r.start]);
        v.extend_from_slice(rule.rhs.letters());
        v.extend_from_slice(&l[r.start + rule.lhs.len()..]);
        Word::from_letters(v)
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        self.find_redex(w.letters()).is_none()
    }

    pub fn rewrite_once(&self, w: &Word) -> Option<Word> {
        self.find_redex(w.letters()).map(|r| self.apply(w, r))
    }

    pub fn normal_form(&self, w: &Word) -> Result<Word, RewriteError> {
        let mut cur = w.clone();
        for _ in 0..=self.step_budget {
            match self.find_redex(cur.letters()) {
                None => return Ok(cur),
                Some(r) => cur = self.apply(&cur, r),
            }
        }
        Err(RewriteError::BudgetExceeded(self.step_budget))
    }

    /// The full sequence of words visited by [`Self::normal_form`].
    pub fn normal_form_trace(&self, w: &Word) -> Result<Vec<Word>, RewriteError> {
        self.trace_with(w, |s, x| s.find_redex(x))
    }

    pub fn prefix_rewrite_sequence(&self, w: &Word) -> Result<Vec<Word>, RewriteError> {
        self.trace_with(w, |s, x| s.find_prefix_redex(x))
    }

    fn trace_with(
        &self,
        w: &Word,
        pick: impl Fn(&Self, &[Letter]) -> Option<Redex>,
    ) -> Result<Vec<Word>, RewriteError> {
        let mut out = vec![w.clone()];
        for _ in 0..=self.step_budget {
            let cur = out.last().unwrap();
            match pick(self, cur.letters()) {
                None => return Ok(out),
                Some(r) => {
                    let next = self.apply(cur, r);
                    out.push(next);
                }
            }
        }
        Err(RewriteError::BudgetExceeded(self.step_budget))
    }

    /// Every word obtained from `w` by one rewriting, at any position.
    pub fn one_step_rewrites(&self, w: &Word) -> Vec<Word> {
        let l = w.letters();
        let mut out = Vec::new();
        for start in 0..l.len() {
            for i in 0..self.rules.len() {
                if self.matches_at(l, start, i) {
                    out.push(self.apply(w, Redex { start, rule: i }));
                }
            }
        }
        out
    }

    /// One-step rewritings inside the shortest reducible prefix.
    pub fn prefix_step_rewrites(&self, w: &Word) -> Vec<Word> {
        let l = w.letters();
        for end in 1..=l.len() {
            let mut out = Vec::new();
            for i in 0..self.rules.len() {
                let k = self.rules[i].lhs.len();
                if k <= end && self.matches_at(l, end - k, i) {
                    out.push(self.apply(
                        w,
                        Redex {
                            start: end - k,
                            rule: i,
                        },
                    ));
                }
            }
            if !out.is_empty() {
                return out;
            }
        }
        Vec::new()
    }

    pub fn check_minimal(&self) -> Vec<MinimalityViolation> {
        let mut out = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            if !self.is_irreducible(&r.rhs) {
                out.push(MinimalityViolation::ReducibleRhs { rule: i });
            }
            let n = r.lhs.len();
            let mut reported = BTreeSet::new();
            for s in 0..n {
                for e in (s + 1)..=n {
                    if e - s == n {
                        continue;
                    }
                    let f = r.lhs.factor(s, e);
                    if !self.is_irreducible(&f) && reported.insert(f.clone()) {
                        out.push(MinimalityViolation::ReducibleFactor { rule: i, factor: f });
                    }
                }
            }
        }
        out
    }

    /// Overlaps and containments of left sides whose two resolutions have
    /// different normal forms.
    pub fn critical_pairs(&self) -> Result<Vec<CriticalPair>, RewriteError> {
        let mut out = Vec::new();
        let n = self.rules.len();
        for i in 0..n {
            for j in 0..n {
                let li = self.rules[i].lhs.letters();
                let lj = self.rules[j].lhs.letters();
                // suffix of li equals prefix of lj
                for k in 1..li.len().min(lj.len()) {
                    if li[li.len() - k..] == lj[..k] {
                        let mut ov = li.to_vec();
                        ov.extend_from_slice(&lj[k..]);
                        let ov = Word::from_letters(ov);
                        let left = self.apply(&ov, Redex { start: 0, rule: i });
                        let right = self.apply(
                            &ov,
                            Redex {
                                start: li.len() - k,
                                rule: j,
                            },
                        );
                        self.push_if_unresolved(&mut out, ov, (i, j), left, right)?;
                    }
                }
                // lj occurs inside li
                if i != j && lj.len() <= li.len() {
                    for s in 0..=(li.len() - lj.len()) {
                        if li[s..s + lj.len()] == *lj {
                            let ov = self.rules[i].lhs.clone();
                            let left = self.rules[i].rhs.clone();
                            let right = self.apply(&ov, Redex { start: s, rule: j });
                            self.push_if_unresolved(&mut out, ov, (i, j), left, right)?;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn push_if_unresolved(
        &self,
        out: &mut Vec<CriticalPair>,
        overlap: Word,
        rules: (usize, usize),
        left: Word,
        right: Word,
    ) -> Result<(), RewriteError> {
        let l = self.normal_form(&left)?;
        let r = self.normal_form(&right)?;
        if l != r {
            out.push(CriticalPair {
                overlap,
                rules,
                left: l,
                right: r,
            });
        }
        Ok(())
    }

    /// Set of irreducible words reachable from `w` by arbitrary rewriting.
    pub fn irreducible_descendants(&self, w: &Word) -> Result<BTreeSet<Word>, RewriteError> {
        let mut seen: HashSet<Word> = HashSet::new();
        let mut stack = vec![w.clone()];
        let mut out = BTreeSet::new();
        seen.insert(w.clone());
        while let Some(x) = stack.pop() {
            let next = self.one_step_rewrites(&x);
            if next.is_empty() {
                out.insert(x);
                continue;
            }
            for y in next {
                if seen.insert(y.clone()) {
                    if seen.len() > self.node_budget {
                        return Err(RewriteError::NodeBudgetExceeded(self.node_budget));
                    }
                    stack.push(y);
                }
            }
        }
        Ok(out)
    }

    /// γ(n) for each n in `0..=max_n`.
    pub fn gamma_table(&self, max_n: usize) -> Result<Vec<usize>, RewriteError> {
        self.growth_table(max_n, false)
    }

    /// γ_p(n) for each n in `0..=max_n`.
    pub fn gamma_prefix_table(&self, max_n: usize) -> Result<Vec<usize>, RewriteError> {
        self.growth_table(max_n, true)
    }

    pub fn gamma(&self, n: usize) -> Result<usize, RewriteError> {
        Ok(self.gamma_table(n)?[n])
    }

    pub fn gamma_prefix(&self, n: usize) -> Result<usize, RewriteError> {
        Ok(self.gamma_prefix_table(n)?[n])
    }

    // One visited set shared by all stages: the closure of A^{<=m} is
    // contained in the closure of A^{<=m+1}, so each stage only explores the
    // new start words.
    fn growth_table(&self, max_n: usize, prefix: bool) -> Result<Vec<usize>, RewriteError> {
        let mut visited: HashSet<Word> = HashSet::new();
        let mut best = 0usize;
        let mut table = Vec::with_capacity(max_n + 1);
        let mut layer = vec![Word::new()];
        for n in 0..=max_n {
            if n > 0 {
                let mut next = Vec::with_capacity(layer.len() * self.alphabet.len());
                for w in &layer {
                    for a in self.alphabet.letters() {
                        next.push(w.pushed(a));
                    }
                }
                layer = next;
            }
            let mut stack: Vec<Word> = Vec::new();
            for w in &layer {
                if visited.insert(w.clone()) {
                    if visited.len() > self.node_budget {
                        return Err(RewriteError::NodeBudgetExceeded(self.node_budget));
                    }
                    stack.push(w.clone());
                }
            }
            while let Some(x) = stack.pop() {
                best = best.max(x.len());
                let next = if prefix {
                    self.prefix_step_rewrites(&x)
                } else {
                    self.one_step_rewrites(&x)
                };
                for y in next {
                    if !visited.contains(&y) {
                        if visited.len() >= self.node_budget {
                            return Err(RewriteError::NodeBudgetExceeded(self.node_budget));
                        }
                        visited.insert(y.clone());
                        stack.push(y);
                    }
                }
            }
            table.push(best);
        }
        Ok(table)
    }

    /// Memoizing wrapper around [`Self::normal_form`].
    pub fn normal_form_cache(&self) -> NormalFormCache<'_> {
        NormalFormCache {
            rs: self,
            memo: HashMap::new(),
        }
    }
}

pub struct NormalFormCache<'a> {
    rs: &'a RewritingSystem,
    memo: HashMap<Word, Word>,
}

impl NormalFormCache<'_> {
    pub fn get(&mut self, w: &Word) -> Result<Word, RewriteError> {
        if let Some(v) = self.memo.get(w) {
            return Ok(v.clone());
        }
        let v = self.rs.normal_form(w)?;
        self.memo.insert(w.clone(), v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn monoid(rules: &[(&str, &str)]) -> RewritingSystem {
        let al = Arc::new(Alphabet::case_paired(&["a", "A", "b", "B"]).unwrap());
        let rules = rules
            .iter()
            .map(|(l, r)| Rule::new(al.parse_word(l).unwrap(), al.parse_word(r).unwrap()))
            .collect();
        RewritingSystem::new(al, rules).unwrap()
    }

    fn w(rs: &RewritingSystem, s: &str) -> Word {
        rs.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn irreducibility() {
        let rs = z2();
        assert!(rs.is_irreducible(&w(&rs, "a b")));
        assert!(!rs.is_irreducible(&w(&rs, "b a")));
        assert!(rs.is_irreducible(&Word::new()));
    }

    #[test]
    fn one_step_and_normal_forms() {
        let rs = z2();
        assert_eq!(rs.rewrite_once(&w(&rs, "b a a")), Some(w(&rs, "a b a")));
        assert_eq!(rs.rewrite_once(&w(&rs, "a b")), None);
        assert_eq!(rs.rewrite_once(&Word::new()), None);
        assert_eq!(rs.normal_form(&w(&rs, "b a")).unwrap(), w(&rs, "a b"));
        assert_eq!(rs.normal_form(&w(&rs, "b a a")).unwrap(), w(&rs, "a a b"));
        assert_eq!(rs.normal_form(&w(&rs, "a a b")).unwrap(), w(&rs, "a a b"));
    }

    #[test]
    fn budget_guard() {
        let rs = monoid(&[("a", "b"), ("b", "a")]).with_budgets(50, 100);
        assert_eq!(
            rs.normal_form(&w(&rs, "a")),
            Err(RewriteError::BudgetExceeded(50))
        );
    }

    #[test]
    fn prefix_sequences() {
        let rs = z2();
        assert_eq!(
            rs.prefix_rewrite_sequence(&w(&rs, "b a")).unwrap(),
            vec![w(&rs, "b a"), w(&rs, "a b")]
        );
        assert_eq!(
            rs.prefix_rewrite_sequence(&w(&rs, "a b")).unwrap(),
            vec![w(&rs, "a b")]
        );
        assert_eq!(
            rs.prefix_rewrite_sequence(&w(&rs, "b a a")).unwrap(),
            vec![w(&rs, "b a a"), w(&rs, "a b a"), w(&rs, "a a b")]
        );
    }

    #[test]
    fn minimality() {
        assert!(z2().check_minimal().is_empty());
        let rs = monoid(&[("a a", "a"), ("a", "b")]);
        let v = rs.check_minimal();
        assert!(v.contains(&MinimalityViolation::ReducibleFactor {
            rule: 0,
            factor: w(&rs, "a")
        }));
        assert!(monoid(&[]).check_minimal().is_empty());
    }

    #[test]
    fn critical_pair_detection() {
        assert!(z2().critical_pairs().unwrap().is_empty());
        let rs = monoid(&[("a b", "a"), ("b a", "b")]);
        let cps = rs.critical_pairs().unwrap();
        let aba = cps.iter().find(|c| c.overlap == w(&rs, "a b a")).unwrap();
        assert_ne!(aba.left, aba.right);
        assert!(monoid(&[("a b", "b")]).critical_pairs().unwrap().is_empty());
    }

    #[test]
    fn growth_examples() {
        let rs = z2();
        assert_eq!(rs.gamma(3).unwrap(), 3);
        assert_eq!(rs.gamma(0).unwrap(), 0);
        assert_eq!(rs.gamma_prefix(3).unwrap(), 3);
        assert_eq!(rs.gamma_prefix(0).unwrap(), 0);
        let rs = monoid(&[("a", "b b")]);
        assert_eq!(rs.gamma(1).unwrap(), 2);
        assert_eq!(rs.gamma_prefix(1).unwrap(), 2);
    }

    #[test]
    fn node_budget_guard() {
        let rs = z2().with_budgets(1000, 10);
        assert!(matches!(
            rs.gamma(4),
            Err(RewriteError::NodeBudgetExceeded(10))
        ));
    }
}
