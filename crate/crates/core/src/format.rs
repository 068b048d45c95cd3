//! Line-oriented presentation files.
//!
//! ```text
//! # Z^2
//! generators: a A b B
//! inverses: a A, b B
//! rule: b a -> a b
//! relator: a b A B
//! ```
//!
//! `inverses:` pairs letters; a pair `b b` declares an involution. When the
//! directive is absent, letters are paired by case. Relators are
//! symmetrized on load. Without relators the presentation is read off the
//! rules.

use std::sync::Arc;

use thiserror::Error;

use crate::rewrite::{RewritingSystem, Rule};
use crate::words::{Alphabet, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Debug)]
pub struct PresentationFile {
    pub presentation: Presentation,
    pub rewriting: Option<RewritingSystem>,
}

pub fn parse_presentation(text: &str) -> Result<PresentationFile, ParseError> {
    let mut generators: Option<(usize, Vec<String>)> = None;
    let mut inverses: Option<(usize, Vec<(String, String)>)> = None;
    let mut relators: Vec<(usize, String)> = Vec::new();
    let mut rules: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let (key, rest) = body
            .split_once(':')
            .ok_or_else(|| err(line, format!("expected `directive: ...`, found `{body}`")))?;
        let rest = rest.trim();
        match key.trim() {
            "generators" => {
                if generators.is_some() {
                    return Err(err(line, "duplicate generators directive"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.is_empty() {
                    return Err(err(line, "no generators listed"));
                }
                generators = Some((line, names));
            }
            "inverses" => {
                if inverses.is_some() {
                    return Err(err(line, "duplicate inverses directive"));
                }
                let mut pairs = Vec::new();
                for part in rest.split(',') {
                    let toks: Vec<&str> = part.split_whitespace().collect();
                    match toks.as_slice() {
                        [] => continue,
                        [x, y] => pairs.push((x.to_string(), y.to_string())),
                        _ => {
                            return Err(err(
                                line,
                                format!("malformed inverse pair `{}`", part.trim()),
                            ))
                        }
                    }
                }
                inverses = Some((line, pairs));
            }
            "relator" => relators.push((line, rest.to_string())),
            "rule" => {
                let (l, r) = rest
                    .split_once("->")
                    .ok_or_else(|| err(line, "rule needs `->`"))?;
                if l.trim().is_empty() {
                    return Err(err(line, "rule has an empty left side"));
                }
                rules.push((line, l.trim().to_string(), r.trim().to_string()));
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    let (gline, names) = generators.ok_or_else(|| err(1, "generators directive required"))?;
    let alphabet = match &inverses {
        Some((line, pairs)) => {
            Alphabet::new(&names, pairs).map_err(|e| err(*line, e.to_string()))?
        }
        None => Alphabet::case_paired(&names).map_err(|e| err(gline, e.to_string()))?,
    };
    let alphabet = Arc::new(alphabet);
    let word = |line: usize, s: &str| -> Result<Word, ParseError> {
        alphabet.parse_word(s).map_err(|e| err(line, e.to_string()))
    };
    let mut rel_words = Vec::new();
    for (line, s) in &relators {
        rel_words.push(word(*line, s)?);
    }
    let rewriting = if rules.is_empty() {
        None
    } else {
        let mut rs = Vec::new();
        let last = rules.last().unwrap().0;
        for (line, l, r) in &rules {
            rs.push(Rule::new(word(*line, l)?, word(*line, r)?));
        }
        Some(RewritingSystem::new(alphabet.clone(), rs).map_err(|e| err(last, e.to_string()))?)
    };
    let presentation = if rel_words.is_empty() {
        match &rewriting {
            Some(rs) => rs.rule_relators().symmetrize().presentation,
            None => Presentation::new(alphabet.clone(), []),
        }
    } else {
        Presentation::new(alphabet.clone(), rel_words)
            .symmetrize()
            .presentation
    };
    Ok(PresentationFile {
        presentation,
        rewriting,
    })
}

fn render(al: &Alphabet, w: &Word) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        al.render(w)
    }
}

/// Prints `generators`, `inverses`, every rule and every relator.
pub fn print_presentation(p: &Presentation, rs: Option<&RewritingSystem>) -> String {
    let al = p.alphabet();
    let mut out = format!("generators: {}\n", al.names().join(" "));
    let pairs: Vec<String> = al
        .inverse_pairs()
        .iter()
        .map(|&(x, y)| format!("{} {}", al.name(x), al.name(y)))
        .collect();
    out.push_str(&format!("inverses: {}\n", pairs.join(", ")));
    if let Some(rs) = rs {
        for r in rs.rules() {
            out.push_str(&format!(
                "rule: {} -> {}\n",
                render(al, &r.lhs),
                render(al, &r.rhs)
            ));
        }
    }
    for r in p.relators() {
        out.push_str(&format!("relator: {}\n", al.render(r)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragment_with_rules() {
        let f = parse_presentation("generators: a A b B\ninverses: a A, b B\nrule: b a -> a b\n")
            .unwrap();
        let rs = f.rewriting.unwrap();
        assert_eq!(rs.rules().len(), 1);
        assert!(f.presentation.is_symmetric());
    }

    #[test]
    fn empty_file() {
        let e = parse_presentation("").unwrap_err();
        assert!(e.message.contains("generators"));
        assert!(parse_presentation("# nothing\n\n").is_err());
    }

    #[test]
    fn relator_only() {
        let f = parse_presentation("generators: a A b B\nrelator: a b A B").unwrap();
        assert!(f.rewriting.is_none());
        assert!(f.presentation.is_symmetric());
        assert_eq!(f.presentation.relator_count(), 8);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_presentation("generators: a A\nrule: a q -> a").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_presentation("generators: a A\nrule a -> 1").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_presentation("generators: a A\n\nrule: a").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_presentation("generators: a A\nfoo: x").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_presentation("generators: a A b\ninverses: a A, b b c").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn involutions_and_empty_sides() {
        let f = parse_presentation(
            "generators: a A b\ninverses: a A, b b\nrule: b b -> 1\nrule: a A ->\n",
        )
        .unwrap();
        let al = f.presentation.alphabet();
        assert!(al.is_order_two(al.letter("b").unwrap()));
        assert!(f
            .rewriting
            .unwrap()
            .rules()
            .iter()
            .all(|r| r.rhs.is_empty()));
    }

    #[test]
    fn round_trip() {
        let text = "generators: a A b B\ninverses: a A, b B\nrule: a A -> 1\nrule: b a -> a b\n";
        let f = parse_presentation(text).unwrap();
        let printed = print_presentation(&f.presentation, f.rewriting.as_ref());
        let g = parse_presentation(&printed).unwrap();
        assert_eq!(
            g.presentation.relators().collect::<Vec<_>>(),
            f.presentation.relators().collect::<Vec<_>>()
        );
        assert_eq!(g.rewriting.unwrap().rules(), f.rewriting.unwrap().rules());
        assert_eq!(
            print_presentation(&g.presentation, None),
            print_presentation(&f.presentation, None)
        );
    }
}
