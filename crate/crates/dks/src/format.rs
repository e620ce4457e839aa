//! Line-oriented text format for structures and abstract relations.
//!
//! A file is a sequence of directives, one per line, with `#` starting a
//! comment anywhere:
//!
//! ```text
//! tokens: a b c
//! conflict: {a b}
//! entail: {a} |- c
//! default: {} : a
//! assume: {a} |~ c
//! ```
//!
//! `default` lines make the file a structure; `assume` lines make it an
//! abstract relation base, and the two kinds cannot be mixed (`entail` only
//! belongs to structures). Serialization is canonical: loading a serialized
//! file and serializing again reproduces it byte for byte.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::defaults::{DefaultRule, DefaultStructure};
use crate::represent::Representation;
use crate::system::{ConsistencyPredicate, EntailmentRelation, InformationSystem, Sequent};
use crate::token::{TokenId, TokenSet, TokenUniverse};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// What a file denotes: a default structure, or the base of an abstract
/// consequence relation over a consistency predicate.
#[derive(Debug, Clone)]
pub enum Loaded {
    Structure(DefaultStructure),
    Abstract {
        con: ConsistencyPredicate,
        base: Vec<(TokenSet, TokenId)>,
    },
}

#[derive(Debug, Clone)]
pub struct LoadResult {
    pub loaded: Loaded,
    pub warnings: Vec<String>,
}

struct Cursor {
    line: usize,
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(line: usize, text: &str) -> Self {
        let truncated = match text.find('#') {
            Some(i) => &text[..i],
            None => text,
        };
        Cursor {
            line,
            chars: truncated.chars().collect(),
            pos: 0,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, lit: &str, what: &str) -> Result<(), ParseError> {
        self.skip_ws();
        for c in lit.chars() {
            if self.peek() != Some(c) {
                return Err(self.err(format!("expected {what}")));
            }
            self.pos += 1;
        }
        Ok(())
    }

    /// Reads one token name, stopping at whitespace or a reserved character.
    fn name(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let col = self.col();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '{' | '}' | '#' | ':' | '|') {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a token name"));
        }
        Ok((self.chars[start..self.pos].iter().collect(), col))
    }

    /// Reads `{name name ...}`, keeping each name's column for later
    /// resolution errors.
    fn set(&mut self) -> Result<SetLit, ParseError> {
        self.skip_ws();
        let col = self.col();
        self.expect("{", "a set like `{a b}`")?;
        let mut names = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => names.push(self.name()?),
                None => return Err(self.err("unclosed set, expected `}`")),
            }
        }
        Ok(SetLit {
            line: self.line,
            col,
            names,
        })
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if !self.at_end() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(())
    }
}

struct SetLit {
    line: usize,
    col: usize,
    names: Vec<(String, usize)>,
}

struct NameLit {
    line: usize,
    col: usize,
    name: String,
}

struct Decls {
    tokens: Vec<NameLit>,
    conflicts: Vec<SetLit>,
    entails: Vec<(SetLit, NameLit)>,
    defaults: Vec<(SetLit, NameLit)>,
    assumes: Vec<(SetLit, NameLit)>,
}

fn scan(text: &str) -> Result<Decls, ParseError> {
    let mut decls = Decls {
        tokens: Vec::new(),
        conflicts: Vec::new(),
        entails: Vec::new(),
        defaults: Vec::new(),
        assumes: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let mut cur = Cursor::new(i + 1, raw);
        if cur.at_end() {
            continue;
        }
        let (key, key_col) = cur.name()?;
        cur.expect(":", "`:` after the directive name")?;
        match key.as_str() {
            "tokens" => {
                while !cur.at_end() {
                    let (name, col) = cur.name()?;
                    decls.tokens.push(NameLit {
                        line: cur.line,
                        col,
                        name,
                    });
                }
            }
            "conflict" => {
                let set = cur.set()?;
                cur.end()?;
                decls.conflicts.push(set);
            }
            "entail" => {
                let set = cur.set()?;
                cur.expect("|-", "`|-` between premise and conclusion")?;
                let (name, col) = cur.name()?;
                cur.end()?;
                decls.entails.push((
                    set,
                    NameLit {
                        line: cur.line,
                        col,
                        name,
                    },
                ));
            }
            "default" => {
                let set = cur.set()?;
                cur.expect(":", "`:` between precondition and consequent")?;
                let (name, col) = cur.name()?;
                cur.end()?;
                decls.defaults.push((
                    set,
                    NameLit {
                        line: cur.line,
                        col,
                        name,
                    },
                ));
            }
            "assume" => {
                let set = cur.set()?;
                cur.expect("|~", "`|~` between premise and conclusion")?;
                let (name, col) = cur.name()?;
                cur.end()?;
                decls.assumes.push((
                    set,
                    NameLit {
                        line: cur.line,
                        col,
                        name,
                    },
                ));
            }
            _ => {
                return Err(ParseError {
                    line: cur.line,
                    col: key_col,
                    message: format!("unknown directive `{key}`"),
                })
            }
        }
    }
    Ok(decls)
}

pub fn load_str(text: &str) -> Result<LoadResult, ParseError> {
    let decls = scan(text)?;

    let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
    for t in &decls.tokens {
        if !crate::token::valid_token_name(&t.name) {
            return Err(ParseError {
                line: t.line,
                col: t.col,
                message: format!("invalid token name `{}`", t.name),
            });
        }
        if seen.insert(t.name.as_str(), ()).is_some() {
            return Err(ParseError {
                line: t.line,
                col: t.col,
                message: format!("duplicate token `{}`", t.name),
            });
        }
    }
    let universe = TokenUniverse::new(decls.tokens.iter().map(|t| t.name.clone()))
        .expect("names were validated");

    if !decls.assumes.is_empty() {
        let first_assume = &decls.assumes[0].0;
        if let Some((set, _)) = decls.defaults.first() {
            let (line, col) = later((set.line, set.col), (first_assume.line, first_assume.col));
            return Err(ParseError {
                line,
                col,
                message: "cannot mix `default` and `assume` declarations in one file".into(),
            });
        }
        if let Some((set, _)) = decls.entails.first() {
            let (line, col) = later((set.line, set.col), (first_assume.line, first_assume.col));
            return Err(ParseError {
                line,
                col,
                message: "`entail` declarations only belong to structure files".into(),
            });
        }
    }

    let resolve_set = |lit: &SetLit| -> Result<TokenSet, ParseError> {
        let mut s = universe.empty_set();
        for (name, col) in &lit.names {
            match universe.id(name) {
                Some(id) => {
                    s.insert(id);
                }
                None => {
                    return Err(ParseError {
                        line: lit.line,
                        col: *col,
                        message: format!("unknown token `{name}`"),
                    })
                }
            }
        }
        Ok(s)
    };
    let resolve_name = |lit: &NameLit| -> Result<TokenId, ParseError> {
        universe.id(&lit.name).ok_or_else(|| ParseError {
            line: lit.line,
            col: lit.col,
            message: format!("unknown token `{}`", lit.name),
        })
    };

    let mut forbidden = Vec::new();
    for lit in &decls.conflicts {
        let set = resolve_set(lit)?;
        if set.len() < 2 {
            let message = if set.is_empty() {
                "empty conflict declaration".to_string()
            } else {
                format!(
                    "singleton conflicts forbidden: {}",
                    universe.render_set(&set)
                )
            };
            return Err(ParseError {
                line: lit.line,
                col: lit.col,
                message,
            });
        }
        forbidden.push(set);
    }
    let con = ConsistencyPredicate::new(universe.clone(), forbidden)
        .expect("singleton conflicts were rejected");

    let check_premise = |lit: &SetLit, set: &TokenSet| -> Result<(), ParseError> {
        if !con.is_consistent(set) {
            return Err(ParseError {
                line: lit.line,
                col: lit.col,
                message: format!("inconsistent premise set {}", universe.render_set(set)),
            });
        }
        Ok(())
    };

    let mut warnings = Vec::new();

    if !decls.assumes.is_empty() {
        let mut base = BTreeSet::new();
        for (set_lit, name_lit) in &decls.assumes {
            let premise = resolve_set(set_lit)?;
            check_premise(set_lit, &premise)?;
            let conclusion = resolve_name(name_lit)?;
            base.insert((premise, conclusion));
        }
        return Ok(LoadResult {
            loaded: Loaded::Abstract {
                con,
                base: base.into_iter().collect(),
            },
            warnings,
        });
    }

    let mut sequents = BTreeSet::new();
    for (set_lit, name_lit) in &decls.entails {
        let premise = resolve_set(set_lit)?;
        check_premise(set_lit, &premise)?;
        let conclusion = resolve_name(name_lit)?;
        sequents.insert(Sequent {
            premise,
            conclusion,
        });
    }
    let entail = if sequents.is_empty() {
        EntailmentRelation::trivial()
    } else {
        EntailmentRelation::new(&con, sequents.into_iter().collect())
            .expect("premises were checked")
    };

    let mut rules = BTreeSet::new();
    for (set_lit, name_lit) in &decls.defaults {
        let precondition = resolve_set(set_lit)?;
        check_premise(set_lit, &precondition)?;
        let consequent = resolve_name(name_lit)?;
        let rule = DefaultRule {
            precondition,
            consequent,
        };
        if !rules.insert(rule.clone()) {
            warnings.push(format!(
                "line {}: duplicate default {} : {} ignored",
                set_lit.line,
                universe.render_set(&rule.precondition),
                universe.name(rule.consequent)
            ));
        }
    }

    let system = InformationSystem::new(con, entail);
    let structure = DefaultStructure::new(system, rules.into_iter().collect())
        .expect("preconditions were checked");
    Ok(LoadResult {
        loaded: Loaded::Structure(structure),
        warnings,
    })
}

fn later(a: (usize, usize), b: (usize, usize)) -> (usize, usize) {
    if a >= b {
        a
    } else {
        b
    }
}

fn push_tokens_line(out: &mut String, universe: &TokenUniverse) {
    out.push_str("tokens:");
    for name in universe.names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
}

fn push_conflict_lines(out: &mut String, con: &ConsistencyPredicate) {
    for set in con.forbidden() {
        out.push_str("conflict: ");
        out.push_str(&con.universe().render_set(set));
        out.push('\n');
    }
}

/// Canonical text for a structure: tokens, conflicts, entailments and
/// defaults, each section in listing order.
pub fn serialize_structure(ds: &DefaultStructure) -> String {
    let u = ds.system().universe();
    let mut out = String::new();
    push_tokens_line(&mut out, u);
    push_conflict_lines(&mut out, ds.system().con());
    for s in ds.system().entail().sequents() {
        out.push_str("entail: ");
        out.push_str(&u.render_set(&s.premise));
        out.push_str(" |- ");
        out.push_str(u.name(s.conclusion));
        out.push('\n');
    }
    for r in ds.rules() {
        out.push_str("default: ");
        out.push_str(&u.render_set(&r.precondition));
        out.push_str(" : ");
        out.push_str(u.name(r.consequent));
        out.push('\n');
    }
    out
}

/// Canonical text for an abstract relation base.
pub fn serialize_abstract(con: &ConsistencyPredicate, base: &[(TokenSet, TokenId)]) -> String {
    let u = con.universe();
    let mut out = String::new();
    push_tokens_line(&mut out, u);
    push_conflict_lines(&mut out, con);
    let mut sorted: Vec<&(TokenSet, TokenId)> = base.iter().collect();
    sorted.sort();
    sorted.dedup();
    for (premise, conclusion) in sorted {
        out.push_str("assume: ");
        out.push_str(&u.render_set(premise));
        out.push_str(" |~ ");
        out.push_str(u.name(*conclusion));
        out.push('\n');
    }
    out
}

/// Structure text prefixed with comments recording which consistent set each
/// label token stands for.
pub fn serialize_representation(rep: &Representation) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# {} representation; label tokens name the consistent sets of the source system\n",
        rep.mode()
    ));
    let b = rep.structure().system().universe();
    let a = rep.base_universe();
    for (label, source) in rep.labels() {
        out.push_str(&format!(
            "# {} := {}\n",
            b.name(label),
            a.render_set(source)
        ));
    }
    out.push_str(&serialize_structure(rep.structure()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> LoadResult {
        load_str(text).unwrap()
    }

    fn structure(text: &str) -> DefaultStructure {
        match load(text).loaded {
            Loaded::Structure(ds) => ds,
            Loaded::Abstract { .. } => panic!("expected a structure file"),
        }
    }

    #[test]
    fn loads_a_structure_with_every_directive_kind() {
        let ds = structure(
            "tokens: a b c\n\
             conflict: {a b} # the two defaults clash\n\
             entail: {c} |- a\n\
             default: {} : c\n\
             default: {c} : b\n",
        );
        assert_eq!(ds.rules().len(), 2);
        assert_eq!(ds.system().con().forbidden().len(), 1);
        assert_eq!(ds.system().entail().sequents().len(), 1);
    }

    #[test]
    fn loads_an_abstract_base() {
        let r = load(
            "tokens: a b\n\
             assume: {} |~ a\n\
             assume: {a} |~ b\n",
        );
        match r.loaded {
            Loaded::Abstract { base, .. } => assert_eq!(base.len(), 2),
            Loaded::Structure(_) => panic!("expected an abstract file"),
        }
    }

    #[test]
    fn empty_input_is_a_bare_structure() {
        let ds = structure("tokens:\n");
        assert_eq!(ds.system().universe().len(), 0);
        assert!(ds.rules().is_empty());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let ds = structure("# a comment\n\ntokens: x\n   \n# done\n");
        assert_eq!(ds.system().universe().len(), 1);
    }

    #[test]
    fn spacing_does_not_matter() {
        let ds = structure("tokens: a b\ndefault:{a}:b\nentail:{b}|-a\n");
        assert_eq!(ds.rules().len(), 1);
        assert_eq!(ds.system().entail().sequents().len(), 1);
    }

    #[test]
    fn singleton_conflicts_are_rejected_with_position() {
        let err = load_str("tokens: a\nconflict: {a}\n").unwrap_err();
        assert_eq!((err.line, err.col), (2, 11));
        assert!(err.message.contains("singleton conflicts forbidden"));
    }

    #[test]
    fn empty_conflicts_are_rejected() {
        let err = load_str("tokens: a\nconflict: {}\n").unwrap_err();
        assert!(err.message.contains("empty conflict"));
    }

    #[test]
    fn unknown_tokens_are_positioned_exactly() {
        let err = load_str("tokens: a\ndefault: {a} : q\n").unwrap_err();
        assert_eq!((err.line, err.col), (2, 16));
        assert!(err.message.contains("unknown token `q`"));
    }

    #[test]
    fn duplicate_tokens_are_rejected() {
        let err = load_str("tokens: a b a\n").unwrap_err();
        assert!(err.message.contains("duplicate token `a`"));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn kinds_cannot_mix() {
        let err = load_str("tokens: a\ndefault: {} : a\nassume: {} |~ a\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("cannot mix"));

        let err = load_str("tokens: a\nassume: {} |~ a\nentail: {a} |- a\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("structure files"));
    }

    #[test]
    fn inconsistent_premises_are_rejected_at_their_declaration() {
        let err = load_str("tokens: a b\nconflict: {a b}\ndefault: {a b} : a\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("inconsistent premise set {a b}"));
    }

    #[test]
    fn duplicate_defaults_warn_and_merge() {
        let r = load("tokens: a\ndefault: {} : a\ndefault: {} : a\n");
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("duplicate default"));
        match r.loaded {
            Loaded::Structure(ds) => assert_eq!(ds.rules().len(), 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn duplicate_assumes_merge_silently() {
        let r = load("tokens: a\nassume: {} |~ a\nassume: {} |~ a # again\n");
        assert!(r.warnings.is_empty());
        match r.loaded {
            Loaded::Abstract { base, .. } => assert_eq!(base.len(), 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn unknown_directives_are_rejected() {
        let err = load_str("rules: a\n").unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
        assert!(err.message.contains("unknown directive `rules`"));
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let err = load_str("tokens: a\nconflict: {a a} extra\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("trailing"));
    }

    #[test]
    fn serialization_round_trips_to_a_fixed_point() {
        let text = "default: {c} : b\ntokens: c a b\nconflict: {b c a}\n\
                    entail: {a} |- b\ndefault: {} : a\n";
        let once = serialize_structure(&structure(text));
        let twice = serialize_structure(&structure(&once));
        assert_eq!(once, twice);
        assert_eq!(
            once,
            "tokens: a b c\nconflict: {a b c}\nentail: {a} |- b\n\
             default: {} : a\ndefault: {c} : b\n"
        );
    }

    #[test]
    fn abstract_serialization_round_trips() {
        let text = "tokens: b a\nassume: {a} |~ b\nassume: {} |~ a\n";
        let r = load(text);
        let Loaded::Abstract { con, base } = r.loaded else {
            unreachable!()
        };
        let once = serialize_abstract(&con, &base);
        assert_eq!(once, "tokens: a b\nassume: {} |~ a\nassume: {a} |~ b\n");
        let r2 = load(&once);
        let Loaded::Abstract { con: c2, base: b2 } = r2.loaded else {
            unreachable!()
        };
        assert_eq!(serialize_abstract(&c2, &b2), once);
    }
}
