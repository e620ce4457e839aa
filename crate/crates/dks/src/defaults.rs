//! Normal default structures and their extensions.
//!
//! A default structure adds rules `X : a` to an information system: if every
//! token of X is present and `a` is jointly consistent with the candidate
//! context, `a` may be added. Extensions of a state are the fixed points of
//! the context-guarded expansion, computed here twice over by independent
//! algorithms so each can convict the other of a bug.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::Error;
use crate::report::CheckReport;
use crate::system::InformationSystem;
use crate::token::{TokenId, TokenSet};

/// Rule `precondition : consequent` (a normal default; the consequent is its
/// own justification).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DefaultRule {
    pub precondition: TokenSet,
    pub consequent: TokenId,
}

#[derive(Debug, Clone)]
pub struct DefaultStructure {
    system: InformationSystem,
    rules: Vec<DefaultRule>,
}

/// Result of expanding a state against a candidate context: the limit set,
/// the least stage index after which nothing changes, and the rules that
/// fired at each stage.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub tokens: TokenSet,
    pub depth: usize,
    pub fired: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct ExtensionInfo {
    pub tokens: TokenSet,
    pub depth: usize,
    pub fired: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct ExtensionReport {
    pub state: TokenSet,
    pub extensions: Vec<ExtensionInfo>,
}

impl ExtensionReport {
    pub fn sets(&self) -> Vec<TokenSet> {
        self.extensions.iter().map(|e| e.tokens.clone()).collect()
    }
}

/// States and the extension relation between them. `edges[i]` lists, as
/// indices into `states`, the extensions of `states[i]`. A state is stable
/// when its only extension is itself.
#[derive(Debug, Clone)]
pub struct KripkeGraph {
    pub states: Vec<TokenSet>,
    pub edges: Vec<Vec<usize>>,
    pub stable: Vec<bool>,
}

const ORACLE_CAP: usize = 24;

impl DefaultStructure {
    /// Rules form a set: duplicates collapse. Preconditions must be
    /// consistent, like any entailment premise.
    pub fn new(system: InformationSystem, rules: Vec<DefaultRule>) -> Result<Self, Error> {
        for r in &rules {
            if !system.con().is_consistent(&r.precondition) {
                return Err(Error::InconsistentPremise {
                    set: system.universe().render_set(&r.precondition),
                });
            }
        }
        let mut rules = rules;
        rules.sort();
        rules.dedup();
        Ok(DefaultStructure { system, rules })
    }

    pub fn system(&self) -> &InformationSystem {
        &self.system
    }

    pub fn rules(&self) -> &[DefaultRule] {
        &self.rules
    }

    pub fn is_precondition_free(&self) -> bool {
        self.rules.iter().all(|r| r.precondition.is_empty())
    }

    pub fn render_rule(&self, index: usize) -> String {
        let r = &self.rules[index];
        format!(
            "{} : {}",
            self.system.universe().render_set(&r.precondition),
            self.system.universe().name(r.consequent)
        )
    }

    /// Expands state `x` against candidate context `context`: each stage
    /// closes under entailment and fires every rule whose precondition is
    /// met and whose consequent is consistent with the context. Stabilizes
    /// within one step per token.
    pub fn expand(&self, x: &TokenSet, context: &TokenSet) -> Result<Expansion, Error> {
        self.system.require_state(x)?;
        Ok(self.expand_unchecked(x, context))
    }

    fn expand_unchecked(&self, x: &TokenSet, context: &TokenSet) -> Expansion {
        let context_ok = self.system.con().is_consistent(context);
        let mut cur = x.clone();
        let mut fired = Vec::new();
        let cap = self.system.universe().len() + 1;
        for depth in 0..=cap {
            let mut next = cur.clone();
            self.system.entail().close_into(&mut next);
            let mut stage_fired = Vec::new();
            if context_ok {
                for (i, r) in self.rules.iter().enumerate() {
                    if r.precondition.is_subset(&cur)
                        && !cur.contains(r.consequent)
                        && self.system.con().is_consistent_with(context, r.consequent)
                    {
                        next.insert(r.consequent);
                        stage_fired.push(i);
                    }
                }
            }
            if next == cur {
                return Expansion {
                    tokens: cur,
                    depth,
                    fired,
                };
            }
            fired.push(stage_fired);
            cur = next;
        }
        unreachable!("expansion failed to stabilize within the token count");
    }

    /// Whether `y` is an extension of `x`: expanding `x` against `y`
    /// reproduces exactly `y`.
    pub fn is_extension(&self, x: &TokenSet, y: &TokenSet) -> Result<bool, Error> {
        Ok(self.expand(x, y)?.tokens == *y)
    }

    /// Extension enumeration by brute force: test every subset of the
    /// universe as a candidate context. Reference implementation; quadratic
    /// blowup is the point, so it refuses large universes.
    pub fn extensions_exhaustive(&self, x: &TokenSet) -> Result<Vec<TokenSet>, Error> {
        let n = self.system.universe().len();
        if n > ORACLE_CAP {
            return Err(Error::OracleInfeasible {
                tokens: n,
                cap: ORACLE_CAP,
            });
        }
        self.system.require_state(x)?;
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << n) {
            let mut y = self.system.universe().empty_set();
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    y.insert(TokenId(i as u32));
                }
            }
            if self.expand_unchecked(x, &y).tokens == y {
                out.push(y);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Extension enumeration by guided search: forward-chain, firing every
    /// applicable rule whose consequent cannot take part in any conflict
    /// among the still-reachable tokens, and branch (fire vs. veto) only on
    /// consequents that can. Candidate fixed points are deduplicated and
    /// each is verified with [`is_extension`](Self::is_extension).
    pub fn extensions(&self, x: &TokenSet) -> Result<ExtensionReport, Error> {
        self.system.require_state(x)?;
        let con = self.system.con();
        let universe = self.system.universe();
        let mut consequents = universe.empty_set();
        for r in &self.rules {
            consequents.insert(r.consequent);
        }

        let mut candidates: BTreeSet<TokenSet> = BTreeSet::new();
        let mut visited: HashSet<(TokenSet, TokenSet)> = HashSet::new();
        let mut stack: Vec<(TokenSet, TokenSet)> = vec![(x.clone(), universe.empty_set())];

        while let Some((cur, veto)) = stack.pop() {
            if !visited.insert((cur.clone(), veto.clone())) {
                continue;
            }
            let mut applicable = universe.empty_set();
            for r in &self.rules {
                if !cur.contains(r.consequent)
                    && !veto.contains(r.consequent)
                    && r.precondition.is_subset(&cur)
                    && con.is_consistent_with(&cur, r.consequent)
                {
                    applicable.insert(r.consequent);
                }
            }
            if applicable.is_empty() {
                candidates.insert(cur);
                continue;
            }

            // Every completion reachable from this node stays inside the
            // entailment closure of cur plus the unvetoed consequents; a
            // consequent with no forbidden set inside that bound can never
            // be blocked later, so firing it loses nothing.
            let mut upper = cur.union(&consequents.difference(&veto));
            self.system.entail().close_into(&mut upper);
            let mut safe = universe.empty_set();
            let mut conflictable: Option<TokenId> = None;
            for a in applicable.iter() {
                let in_conflict = con
                    .forbidden()
                    .iter()
                    .any(|f| f.contains(a) && f.is_subset(&upper));
                if in_conflict {
                    conflictable.get_or_insert(a);
                } else {
                    safe.insert(a);
                }
            }

            if !safe.is_empty() {
                let mut next = cur.union(&safe);
                self.system.entail().close_into(&mut next);
                stack.push((next, veto));
            } else {
                let a = conflictable.expect("applicable set was non-empty");
                let mut fire = cur.with(a);
                self.system.entail().close_into(&mut fire);
                stack.push((fire, veto.clone()));
                stack.push((cur, veto.with(a)));
            }
        }

        let mut extensions = Vec::new();
        for cand in candidates {
            let run = self.expand_unchecked(x, &cand);
            if run.tokens == cand {
                extensions.push(ExtensionInfo {
                    tokens: cand,
                    depth: run.depth,
                    fired: run.fired,
                });
            }
        }
        if extensions.is_empty() {
            return Err(Error::Internal(format!(
                "state {} has no extension",
                universe.render_set(x)
            )));
        }
        Ok(ExtensionReport {
            state: x.clone(),
            extensions,
        })
    }

    /// Extension graph over all states. Exponential in the universe; callers
    /// gate the size.
    pub fn kripke(&self) -> Result<KripkeGraph, Error> {
        let states = self.system.states();
        let index: BTreeMap<&TokenSet, usize> =
            states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut edges = Vec::with_capacity(states.len());
        let mut stable = Vec::with_capacity(states.len());
        for s in &states {
            let report = self.extensions(s)?;
            let mut out = Vec::new();
            for e in &report.extensions {
                let j = *index.get(&e.tokens).ok_or_else(|| {
                    Error::Internal(format!(
                        "extension {} is not a state",
                        self.system.universe().render_set(&e.tokens)
                    ))
                })?;
                out.push(j);
            }
            stable.push(out == [index[s]]);
            edges.push(out);
        }
        Ok(KripkeGraph {
            states,
            edges,
            stable,
        })
    }

    /// Extension laws, checked over every state: (1) at least one extension
    /// exists; (2) extensions contain their state; (3) the only extension of
    /// an extension is itself; (4) distinct extensions of one state are
    /// jointly inconsistent.
    pub fn check_extension_laws(&self) -> Result<CheckReport, Error> {
        let name = "extension laws";
        let u = self.system.universe();
        let mut instances = 0;
        let mut memo: BTreeMap<TokenSet, Vec<TokenSet>> = BTreeMap::new();
        let states = self.system.states();
        for x in &states {
            let exts = self.extensions(x)?.sets();
            memo.insert(x.clone(), exts.clone());
            instances += 1;
            if exts.is_empty() {
                return Ok(CheckReport::fail(
                    name,
                    instances,
                    format!("state {} has no extension", u.render_set(x)),
                ));
            }
            for y in &exts {
                if !x.is_subset(y) {
                    return Ok(CheckReport::fail(
                        name,
                        instances,
                        format!(
                            "extension {} of {} does not contain it",
                            u.render_set(y),
                            u.render_set(x)
                        ),
                    ));
                }
            }
            for (i, y) in exts.iter().enumerate() {
                for z in &exts[i + 1..] {
                    instances += 1;
                    if self.system.con().is_consistent(&y.union(z)) {
                        return Ok(CheckReport::fail(
                            name,
                            instances,
                            format!(
                                "distinct extensions {} and {} of {} are jointly consistent",
                                u.render_set(y),
                                u.render_set(z),
                                u.render_set(x)
                            ),
                        ));
                    }
                }
            }
        }
        // Self-extension: an extension extends itself and nothing else.
        for (x, exts) in memo.clone() {
            for y in exts {
                instances += 1;
                let of_y = match memo.get(&y) {
                    Some(v) => v.clone(),
                    None => self.extensions(&y)?.sets(),
                };
                if of_y != [y.clone()] {
                    return Ok(CheckReport::fail(
                        name,
                        instances,
                        format!(
                            "extension {} of {} has extensions {:?}",
                            u.render_set(&y),
                            u.render_set(&x),
                            of_y.iter().map(|s| u.render_set(s)).collect::<Vec<_>>()
                        ),
                    ));
                }
            }
        }
        Ok(CheckReport::pass(name, instances))
    }

    /// Absorption of included premises: if R extends P and Q ⊆ R, then P∪Q
    /// (when it is a state) also has R as an extension. Exhaustive over
    /// states, their extensions, and subsets of each extension.
    pub fn check_premise_absorption(&self) -> Result<CheckReport, Error> {
        let name = "premise absorption";
        let u = self.system.universe();
        let mut instances = 0;
        for p in self.system.states() {
            for r in self.extensions(&p)?.sets() {
                if r.len() > ORACLE_CAP {
                    return Err(Error::OracleInfeasible {
                        tokens: r.len(),
                        cap: ORACLE_CAP,
                    });
                }
                for q in r.subsets() {
                    let z = p.union(&q);
                    if !self.system.is_state(&z) {
                        continue;
                    }
                    instances += 1;
                    if self.expand_unchecked(&z, &r).tokens != r {
                        return Ok(CheckReport::fail(
                            name,
                            instances,
                            format!(
                                "{} extends {} and {} ⊆ it, but it does not extend {}",
                                u.render_set(&r),
                                u.render_set(&p),
                                u.render_set(&q),
                                u.render_set(&z)
                            ),
                        ));
                    }
                }
            }
        }
        Ok(CheckReport::pass(name, instances))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{ConsistencyPredicate, EntailmentRelation, Sequent};
    use crate::token::TokenUniverse;

    fn structure(
        names: &[&str],
        conflicts: &[&[&str]],
        sequents: &[(&[&str], &str)],
        rules: &[(&[&str], &str)],
    ) -> DefaultStructure {
        let u = TokenUniverse::new(names.iter().copied()).unwrap();
        let forbidden = conflicts
            .iter()
            .map(|c| u.set_from_names(c.iter().copied()).unwrap())
            .collect();
        let con = ConsistencyPredicate::new(u.clone(), forbidden).unwrap();
        let seqs = sequents
            .iter()
            .map(|(p, c)| Sequent {
                premise: u.set_from_names(p.iter().copied()).unwrap(),
                conclusion: u.id(c).unwrap(),
            })
            .collect();
        let entail = EntailmentRelation::new(&con, seqs).unwrap();
        let sys = InformationSystem::new(con, entail);
        let rules = rules
            .iter()
            .map(|(p, c)| DefaultRule {
                precondition: u.set_from_names(p.iter().copied()).unwrap(),
                consequent: u.id(c).unwrap(),
            })
            .collect();
        DefaultStructure::new(sys, rules).unwrap()
    }

    /// Two tokens that conflict, one free default for b.
    fn two_token() -> DefaultStructure {
        structure(&["a", "b"], &[&["a", "b"]], &[], &[(&[], "b")])
    }

    /// Three-token chain: a free, b from a, c from b, with all three jointly
    /// forbidden.
    fn chain() -> DefaultStructure {
        structure(
            &["a", "b", "c"],
            &[&["a", "b", "c"]],
            &[],
            &[(&[], "a"), (&["a"], "b"), (&["b"], "c")],
        )
    }

    fn set(ds: &DefaultStructure, names: &[&str]) -> TokenSet {
        ds.system()
            .universe()
            .set_from_names(names.iter().copied())
            .unwrap()
    }

    fn rendered_extensions(ds: &DefaultStructure, state: &[&str]) -> Vec<String> {
        let x = set(ds, state);
        ds.extensions(&x)
            .unwrap()
            .sets()
            .iter()
            .map(|s| ds.system().universe().render_set(s))
            .collect()
    }

    #[test]
    fn expansion_depth_counts_stages_until_fixpoint() {
        let ds = two_token();
        let empty = ds.system().universe().empty_set();
        let run = ds.expand(&empty, &set(&ds, &["b"])).unwrap();
        assert_eq!(ds.system().universe().render_set(&run.tokens), "{b}");
        assert_eq!(run.depth, 1);
        assert_eq!(run.fired, vec![vec![0]]);

        let a = set(&ds, &["a"]);
        let run = ds.expand(&a, &a).unwrap();
        assert_eq!(run.tokens, a);
        assert_eq!(run.depth, 0);
    }

    // Hand-run of the expansion: against context {a} the rule for b is
    // blocked, so the empty state stays empty and {a} is not reproduced.
    #[test]
    fn expansion_against_hostile_context_stalls() {
        let ds = two_token();
        let empty = ds.system().universe().empty_set();
        let a = set(&ds, &["a"]);
        let run = ds.expand(&empty, &a).unwrap();
        assert!(run.tokens.is_empty());
        assert!(!ds.is_extension(&empty, &a).unwrap());
    }

    #[test]
    fn expansion_without_rules_is_entailment_closure() {
        let ds = structure(&["a", "b"], &[], &[(&["a"], "b")], &[]);
        let ab = set(&ds, &["a", "b"]);
        let run = ds.expand(&ab, &ds.system().universe().empty_set()).unwrap();
        assert_eq!(run.tokens, ab);
        assert_eq!(run.depth, 0);
    }

    #[test]
    fn expansion_requires_a_state() {
        let ds = structure(&["a", "b"], &[], &[(&["a"], "b")], &[]);
        let a = set(&ds, &["a"]);
        let err = ds.expand(&a, &a).unwrap_err();
        assert!(matches!(err, Error::NotAState { .. }));
    }

    #[test]
    fn two_token_extensions() {
        let ds = two_token();
        assert_eq!(rendered_extensions(&ds, &[]), ["{b}"]);
        assert_eq!(rendered_extensions(&ds, &["a"]), ["{a}"]);
    }

    #[test]
    fn chain_extensions() {
        let ds = chain();
        assert_eq!(rendered_extensions(&ds, &[]), ["{a b}"]);
        assert_eq!(rendered_extensions(&ds, &["b"]), ["{a b}", "{b c}"]);
    }

    // The guided search must not commit to firing a rule just because its
    // consequent is currently consistent: here b conflicts with d, which
    // only becomes derivable after c fires, and both {b c} and {c d} are
    // extensions of the empty state.
    #[test]
    fn guided_search_branches_on_deferred_conflicts() {
        let ds = structure(
            &["b", "c", "d"],
            &[&["b", "d"]],
            &[],
            &[(&[], "b"), (&[], "c"), (&["c"], "d")],
        );
        let empty = ds.system().universe().empty_set();
        assert_eq!(rendered_extensions(&ds, &[]), ["{b c}", "{c d}"]);
        assert_eq!(
            ds.extensions(&empty).unwrap().sets(),
            ds.extensions_exhaustive(&empty).unwrap()
        );
    }

    #[test]
    fn oracle_and_guided_search_agree_on_the_examples() {
        for ds in [two_token(), chain()] {
            for x in ds.system().states() {
                assert_eq!(
                    ds.extensions(&x).unwrap().sets(),
                    ds.extensions_exhaustive(&x).unwrap(),
                    "state {}",
                    ds.system().universe().render_set(&x)
                );
            }
        }
    }

    #[test]
    fn extension_laws_hold_on_the_examples() {
        for ds in [two_token(), chain()] {
            let report = ds.check_extension_laws().unwrap();
            assert!(report.ok(), "{:?}", report.failure);
        }
    }

    #[test]
    fn premise_absorption_holds_on_the_examples() {
        for ds in [two_token(), chain()] {
            let report = ds.check_premise_absorption().unwrap();
            assert!(report.ok(), "{:?}", report.failure);
            assert!(report.instances > 0);
        }
    }

    #[test]
    fn kripke_graph_marks_stable_states() {
        let ds = two_token();
        let g = ds.kripke().unwrap();
        let u = ds.system().universe();
        let rendered: Vec<String> = g.states.iter().map(|s| u.render_set(s)).collect();
        assert_eq!(rendered, ["{}", "{a}", "{b}"]);
        assert_eq!(g.edges, vec![vec![2], vec![1], vec![2]]);
        assert_eq!(g.stable, vec![false, true, true]);
    }

    #[test]
    fn kripke_without_rules_is_all_self_loops() {
        let ds = structure(&["a", "b"], &[&["a", "b"]], &[], &[]);
        let g = ds.kripke().unwrap();
        assert!(g.stable.iter().all(|&s| s));
        assert!(g.edges.iter().enumerate().all(|(i, e)| e == &vec![i]));
    }

    #[test]
    fn duplicate_rules_collapse() {
        let ds = structure(&["a", "b"], &[], &[], &[(&[], "a"), (&[], "a"), (&[], "b")]);
        assert_eq!(ds.rules().len(), 2);
    }
}
