//! Letters, words, free reduction and symmetric presentations.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("letter `{0}` declared twice")]
    DuplicateLetter(String),
    #[error("letter `{0}` has no declared inverse")]
    UnpairedLetter(String),
    #[error("letter `{0}` is paired with two different inverses")]
    InconsistentInverse(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
}

/// Index into an [`Alphabet`]. The declaration order is the shortlex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u16);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite word. `Ord` is shortlex with respect to letter indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn single(a: Letter) -> Self {
        Word(vec![a])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn pushed(&self, a: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(a);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n..].to_vec())
    }

    pub fn factor(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        Word(v)
    }

    pub fn contains_factor(&self, f: &[Letter]) -> bool {
        f.is_empty() || self.0.windows(f.len()).any(|w| w == f)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Letter names together with the inversion involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    inverse: Vec<Letter>,
    lookup: HashMap<String, Letter>,
}

impl Alphabet {
    /// `pairs` lists inverse pairs by name; `(x, x)` declares an order-2 letter.
    pub fn new<S: AsRef<str>>(names: &[S], pairs: &[(S, S)]) -> Result<Self, WordError> {
        if names.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        let mut lookup = HashMap::new();
        let mut owned = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().to_string();
            if lookup.insert(n.clone(), Letter(i as u16)).is_some() {
                return Err(WordError::DuplicateLetter(n));
            }
            owned.push(n);
        }
        let mut inverse: Vec<Option<Letter>> = vec![None; owned.len()];
        for (x, y) in pairs {
            let (x, y) = (x.as_ref(), y.as_ref());
            let lx = *lookup
                .get(x)
                .ok_or_else(|| WordError::UnknownLetter(x.to_string()))?;
            let ly = *lookup
                .get(y)
                .ok_or_else(|| WordError::UnknownLetter(y.to_string()))?;
            for (p, q) in [(lx, ly), (ly, lx)] {
                match inverse[p.index()] {
                    Some(old) if old != q => {
                        return Err(WordError::InconsistentInverse(owned[p.index()].clone()))
                    }
                    _ => inverse[p.index()] = Some(q),
                }
            }
        }
        let inverse = inverse
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| WordError::UnpairedLetter(owned[i].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Alphabet {
            names: owned,
            inverse,
            lookup,
        })
    }

    /// Pairs each lowercase name with its uppercase twin (`a`/`A`, `x0`/`X0`).
    pub fn case_paired<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let set: BTreeSet<&str> = names.iter().map(|s| s.as_ref()).collect();
        let mut pairs = Vec::new();
        for n in names {
            let n = n.as_ref();
            let up = n.to_uppercase();
            if up != n && set.contains(up.as_str()) {
                pairs.push((n.to_string(), up));
            }
        }
        let owned: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        Alphabet::new(&owned, &pairs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..self.names.len() as u16).map(Letter)
    }

    pub fn inverse(&self, a: Letter) -> Letter {
        self.inverse[a.index()]
    }

    pub fn is_order_two(&self, a: Letter) -> bool {
        self.inverse(a) == a
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.names[a.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.lookup.get(name).copied()
    }

    /// Inverse pairs in declaration order, each listed once.
    pub fn inverse_pairs(&self) -> Vec<(Letter, Letter)> {
        self.letters()
            .filter(|&a| self.inverse(a) >= a)
            .map(|a| (a, self.inverse(a)))
            .collect()
    }

    /// Whitespace-separated letter names. A token that is not a name is split
    /// into single characters, so `"baBA"` reads like `"b a B A"`. `1` and `ε`
    /// denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" || tok == "ε" {
                continue;
            }
            if let Some(a) = self.letter(tok) {
                out.push(a);
                continue;
            }
            for ch in tok.chars() {
                let s = ch.to_string();
                match self.letter(&s) {
                    Some(a) => out.push(a),
                    None => return Err(WordError::UnknownLetter(tok.to_string())),
                }
            }
        }
        Ok(Word(out))
    }

    pub fn render(&self, w: &Word) -> String {
        let parts: Vec<&str> = w.iter().map(|a| self.name(a)).collect();
        parts.join(" ")
    }

    pub fn formal_inverse(&self, w: &Word) -> Word {
        w.iter().rev().map(|a| self.inverse(a)).collect()
    }

    pub fn free_reduce(&self, w: &Word) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
        for a in w.iter() {
            if stack.last() == Some(&self.inverse(a)) {
                stack.pop();
            } else {
                stack.push(a);
            }
        }
        Word(stack)
    }

    pub fn is_freely_reduced(&self, w: &Word) -> bool {
        w.letters().windows(2).all(|p| p[1] != self.inverse(p[0]))
    }

    /// All words of length exactly `n` in shortlex order.
    pub fn words_of_length(&self, n: usize) -> Vec<Word> {
        let mut out = vec![Word::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * self.len());
            for w in &out {
                for a in self.letters() {
                    next.push(w.pushed(a));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `n` in shortlex order.
    pub fn words_up_to(&self, n: usize) -> Vec<Word> {
        (0..=n).flat_map(|k| self.words_of_length(k)).collect()
    }
}

pub struct DisplayWord<'a> {
    alphabet: &'a Alphabet,
    word: &'a Word,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("ε");
        }
        f.write_str(&self.alphabet.render(self.word))
    }
}

impl Word {
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayWord<'a> {
        DisplayWord {
            alphabet,
            word: self,
        }
    }
}

/// A finite presentation over an involution-closed alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Arc<Alphabet>,
    relators: BTreeSet<Word>,
}

/// Result of [`Presentation::symmetrize`].
#[derive(Clone, Debug)]
pub struct Symmetrized {
    pub presentation: Presentation,
    /// Nonempty relators whose free reduction is empty. They are kept.
    pub trivial: Vec<Word>,
}

impl Presentation {
    /// Empty relators are dropped.
    pub fn new(alphabet: Arc<Alphabet>, relators: impl IntoIterator<Item = Word>) -> Self {
        let relators = relators.into_iter().filter(|r| !r.is_empty()).collect();
        Presentation { alphabet, relators }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Relators in shortlex order.
    pub fn relators(&self) -> impl Iterator<Item = &Word> {
        self.relators.iter()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.relators.contains(w)
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Closure under formal inversion, cyclic conjugation and free reduction.
    pub fn symmetrize(&self) -> Symmetrized {
        let a = &self.alphabet;
        let mut closed: BTreeSet<Word> = BTreeSet::new();
        let mut work: Vec<Word> = self.relators.iter().cloned().collect();
        while let Some(r) = work.pop() {
            if r.is_empty() || closed.contains(&r) {
                continue;
            }
            let inv = a.formal_inverse(&r);
            for base in [&r, &inv] {
                for k in 0..base.len() {
                    let rot = base.rotate(k);
                    if !closed.contains(&rot) {
                        work.push(rot);
                    }
                }
            }
            let red = a.free_reduce(&r);
            if !red.is_empty() && !closed.contains(&red) {
                work.push(red);
            }
            closed.insert(r);
        }
        let trivial = closed
            .iter()
            .filter(|r| a.free_reduce(r).is_empty())
            .cloned()
            .collect();
        Symmetrized {
            presentation: Presentation {
                alphabet: self.alphabet.clone(),
                relators: closed,
            },
            trivial,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let a = &self.alphabet;
        self.relators.iter().all(|r| {
            self.contains(&a.formal_inverse(r))
                && (0..r.len()).all(|k| self.contains(&r.rotate(k)))
                && {
                    let red = a.free_reduce(r);
                    red.is_empty() || self.contains(&red)
                }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::case_paired(&["a", "A", "b", "B"]).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        let al = ab();
        let w = |s| al.parse_word(s).unwrap();
        assert_eq!(al.free_reduce(&w("a A")), Word::new());
        assert_eq!(al.free_reduce(&Word::new()), Word::new());
        assert_eq!(al.free_reduce(&w("a b B a")), w("a a"));
    }

    #[test]
    fn formal_inverse_examples() {
        let al = ab();
        let w = |s| al.parse_word(s).unwrap();
        assert_eq!(al.formal_inverse(&w("a b")), w("B A"));
        assert_eq!(al.formal_inverse(&Word::new()), Word::new());
        let x = w("a b a");
        assert_eq!(al.formal_inverse(&al.formal_inverse(&x)), x);
    }

    #[test]
    fn inverse_is_involution() {
        let al = Alphabet::new(&["a", "A", "b"], &[("a", "A"), ("b", "b")]).unwrap();
        for a in al.letters() {
            assert_eq!(al.inverse(al.inverse(a)), a);
        }
        assert!(al.is_order_two(al.letter("b").unwrap()));
        assert!(!al.is_order_two(al.letter("a").unwrap()));
    }

    #[test]
    fn strict_pairing_rejects_unpaired() {
        assert_eq!(
            Alphabet::case_paired(&["a", "A", "b"]),
            Err(WordError::UnpairedLetter("b".into()))
        );
        assert!(matches!(
            Alphabet::new(&["a", "b", "c"], &[("a", "b"), ("a", "c")]),
            Err(WordError::InconsistentInverse(_))
        ));
    }

    #[test]
    fn shortlex_order() {
        let al = ab();
        let w = |s| al.parse_word(s).unwrap();
        assert!(w("b") < w("a a"));
        assert!(w("a b") < w("A a"));
        assert!(Word::new() < w("a"));
    }

    #[test]
    fn compact_parse() {
        let al = ab();
        assert_eq!(
            al.parse_word("baBA").unwrap(),
            al.parse_word("b a B A").unwrap()
        );
        assert!(al.parse_word("c").is_err());
        assert_eq!(al.parse_word("1").unwrap(), Word::new());
    }

    #[test]
    fn symmetrize_commutator() {
        let al = Arc::new(ab());
        let w = |s| al.parse_word(s).unwrap();
        let p = Presentation::new(al.clone(), [w("a b A B")]);
        let s = p.symmetrize();
        let sp = &s.presentation;
        assert_eq!(sp.relator_count(), 8);
        assert!(sp.contains(&w("b a B A")));
        assert!(sp.contains(&w("B A b a")));
        assert!(s.trivial.is_empty());
        assert!(sp.is_symmetric());
    }

    #[test]
    fn symmetrize_power() {
        let al = Arc::new(Alphabet::case_paired(&["a", "A"]).unwrap());
        let w = |s| al.parse_word(s).unwrap();
        let p = Presentation::new(al.clone(), [w("a a a")]);
        let sp = p.symmetrize().presentation;
        let got: Vec<_> = sp.relators().cloned().collect();
        assert_eq!(got, vec![w("a a a"), w("A A A")]);
        let empty = Presentation::new(al.clone(), []);
        assert_eq!(empty.symmetrize().presentation.relator_count(), 0);
    }

    #[test]
    fn symmetrize_reports_trivial_relators() {
        let al = Arc::new(ab());
        let w = |s| al.parse_word(s).unwrap();
        let p = Presentation::new(al.clone(), [w("a b B A")]);
        let s = p.symmetrize();
        assert!(s.trivial.contains(&w("a b B A")));
        // freely reduced representatives of the proper relators are added alongside
        let p = Presentation::new(al.clone(), [w("a b B b A")]);
        let s = p.symmetrize();
        assert!(s.presentation.contains(&w("a b A")));
        assert!(s.presentation.is_symmetric());
    }
}
