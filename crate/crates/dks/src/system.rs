//! Information systems: a token universe, a consistency predicate given by
//! minimal forbidden sets, and an entailment relation generated from base
//! sequents.
//!
//! The encoding makes downward closure and singleton consistency structural,
//! and entailment is represented by its generating sequents with closure
//! computed on demand by forward chaining, which yields the least relation
//! that is reflexive and transitive over the base. Validation still checks
//! all five definition properties by brute force: the point of the tool is
//! that nothing is trusted on construction.

use crate::error::Error;
use crate::report::CheckReport;
use crate::token::{TokenId, TokenSet, TokenUniverse};

/// Consistency predicate: a set is consistent iff it contains no forbidden
/// set. `forbidden` is an antichain of minimal inconsistent sets, each of
/// size at least two, so singletons are always consistent.
#[derive(Debug, Clone)]
pub struct ConsistencyPredicate {
    universe: TokenUniverse,
    forbidden: Vec<TokenSet>,
    by_member: Vec<Vec<u32>>,
}

impl ConsistencyPredicate {
    pub fn new(universe: TokenUniverse, forbidden: Vec<TokenSet>) -> Result<Self, Error> {
        for set in &forbidden {
            if set.len() < 2 {
                return Err(Error::SingletonConflict {
                    set: universe.render_set(set),
                });
            }
        }
        let mut sets = forbidden;
        sets.sort();
        sets.dedup();
        // Drop any forbidden set that contains a smaller one; membership is
        // unchanged and the antichain keeps witnesses minimal.
        let mut minimal: Vec<TokenSet> = Vec::with_capacity(sets.len());
        for set in sets {
            if !minimal.iter().any(|m| m.is_subset(&set)) {
                minimal.push(set);
            }
        }
        Ok(Self::from_minimal_sets(universe, minimal))
    }

    /// Builds from sets already known to form an antichain of minimal
    /// conflicts (the representation constructions produce one by shape).
    pub(crate) fn from_minimal_sets(universe: TokenUniverse, mut forbidden: Vec<TokenSet>) -> Self {
        forbidden.sort();
        forbidden.dedup();
        debug_assert!(forbidden.iter().all(|s| s.len() >= 2));
        let mut by_member = vec![Vec::new(); universe.len()];
        for (i, set) in forbidden.iter().enumerate() {
            for id in set.iter() {
                by_member[id.index()].push(i as u32);
            }
        }
        ConsistencyPredicate {
            universe,
            forbidden,
            by_member,
        }
    }

    pub fn trivial(universe: TokenUniverse) -> Self {
        Self::from_minimal_sets(universe, Vec::new())
    }

    pub fn universe(&self) -> &TokenUniverse {
        &self.universe
    }

    pub fn forbidden(&self) -> &[TokenSet] {
        &self.forbidden
    }

    pub fn is_consistent(&self, set: &TokenSet) -> bool {
        !self.forbidden.iter().any(|f| f.is_subset(set))
    }

    /// Whether `set ∪ {extra}` is consistent, assuming `set` itself is.
    pub fn is_consistent_with(&self, set: &TokenSet, extra: TokenId) -> bool {
        debug_assert!(self.is_consistent(set));
        !self.by_member[extra.index()]
            .iter()
            .any(|&i| self.forbidden[i as usize].is_subset(&set.with(extra)))
    }

    /// All consistent sets in canonical order. Enumeration recurses over
    /// token indices and prunes as soon as a forbidden set is completed, so
    /// the cost is proportional to the output, not to the full powerset.
    pub fn consistent_sets(&self) -> Vec<TokenSet> {
        let n = self.universe.len();
        let mut out = Vec::new();
        let mut cur = self.universe.empty_set();
        self.enumerate(0, n, &mut cur, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, i: usize, n: usize, cur: &mut TokenSet, out: &mut Vec<TokenSet>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        self.enumerate(i + 1, n, cur, out);
        let id = TokenId(i as u32);
        let completes_conflict = self.by_member[i].iter().any(|&fi| {
            let f = &self.forbidden[fi as usize];
            f.difference(&self.universe.singleton(id)).is_subset(cur)
        });
        if !completes_conflict {
            cur.insert(id);
            self.enumerate(i + 1, n, cur, out);
            cur.remove(id);
        }
    }
}

/// One generating sequent: premise set entails a single token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sequent {
    pub premise: TokenSet,
    pub conclusion: TokenId,
}

/// Entailment generated by base sequents under reflexivity and transitivity.
#[derive(Debug, Clone)]
pub struct EntailmentRelation {
    sequents: Vec<Sequent>,
}

impl EntailmentRelation {
    /// Base sequents must have consistent premises; that is part of the
    /// relation's type, not something validation repairs later.
    pub fn new(con: &ConsistencyPredicate, sequents: Vec<Sequent>) -> Result<Self, Error> {
        for s in &sequents {
            if !con.is_consistent(&s.premise) {
                return Err(Error::InconsistentPremise {
                    set: con.universe().render_set(&s.premise),
                });
            }
        }
        let mut sequents = sequents;
        sequents.sort();
        sequents.dedup();
        Ok(EntailmentRelation { sequents })
    }

    pub fn trivial() -> Self {
        EntailmentRelation {
            sequents: Vec::new(),
        }
    }

    pub fn sequents(&self) -> &[Sequent] {
        &self.sequents
    }

    /// True when the generated relation is `X ⊢ a iff a ∈ X`, i.e. every
    /// sequent is already reflexive.
    pub fn is_trivial(&self) -> bool {
        self.sequents
            .iter()
            .all(|s| s.premise.contains(s.conclusion))
    }

    /// Forward-chains sequents into `set` until nothing fires. This is the
    /// closure operator applied in place; it is well defined on any set.
    pub(crate) fn close_into(&self, set: &mut TokenSet) {
        if self.sequents.is_empty() {
            return;
        }
        loop {
            let mut changed = false;
            for s in &self.sequents {
                if !set.contains(s.conclusion) && s.premise.is_subset(set) {
                    set.insert(s.conclusion);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }
}

/// Violation found by [`InformationSystem::validate`]; `property` names the
/// definition clause that failed and `witness` is a rendered counterexample.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PropertyViolation {
    pub property: String,
    pub witness: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub violations: Vec<PropertyViolation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct InformationSystem {
    con: ConsistencyPredicate,
    entail: EntailmentRelation,
}

impl InformationSystem {
    pub fn new(con: ConsistencyPredicate, entail: EntailmentRelation) -> Self {
        InformationSystem { con, entail }
    }

    /// System with the given consistency predicate and trivial entailment.
    pub fn flat(con: ConsistencyPredicate) -> Self {
        InformationSystem {
            con,
            entail: EntailmentRelation::trivial(),
        }
    }

    pub fn universe(&self) -> &TokenUniverse {
        self.con.universe()
    }

    pub fn con(&self) -> &ConsistencyPredicate {
        &self.con
    }

    pub fn entail(&self) -> &EntailmentRelation {
        &self.entail
    }

    /// Closure of a consistent set under entailment.
    pub fn closure(&self, x: &TokenSet) -> Result<TokenSet, Error> {
        if !self.con.is_consistent(x) {
            return Err(Error::InconsistentPremise {
                set: self.universe().render_set(x),
            });
        }
        Ok(self.closure_unchecked(x))
    }

    pub(crate) fn closure_unchecked(&self, x: &TokenSet) -> TokenSet {
        let mut out = x.clone();
        self.entail.close_into(&mut out);
        out
    }

    /// An information state: consistent and closed.
    pub fn is_state(&self, x: &TokenSet) -> bool {
        self.con.is_consistent(x) && self.closure_unchecked(x) == *x
    }

    pub(crate) fn require_state(&self, x: &TokenSet) -> Result<(), Error> {
        if !self.con.is_consistent(x) {
            return Err(Error::InconsistentPremise {
                set: self.universe().render_set(x),
            });
        }
        let closed = self.closure_unchecked(x);
        if closed != *x {
            return Err(Error::NotAState {
                set: self.universe().render_set(x),
                missing: self.universe().render_set(&closed.difference(x)),
            });
        }
        Ok(())
    }

    /// All information states in canonical order.
    pub fn states(&self) -> Vec<TokenSet> {
        self.con
            .consistent_sets()
            .into_iter()
            .filter(|x| self.closure_unchecked(x) == *x)
            .collect()
    }

    /// Brute-force check of all five definition properties. The encoding
    /// makes four of them hold by construction; entailment consistency is
    /// the one real failure mode and aborts loading elsewhere.
    pub fn validate(&self) -> ValidationReport {
        let u = self.universe();
        let mut violations = Vec::new();
        let con_sets = self.con.consistent_sets();

        // Downward closure: removing one member never leaves Con. Single
        // removals suffice since inclusion chains decompose stepwise.
        'dc: for y in &con_sets {
            for t in y.iter() {
                let mut x = y.clone();
                x.remove(t);
                if !self.con.is_consistent(&x) {
                    violations.push(PropertyViolation {
                        property: "downward closure".into(),
                        witness: format!(
                            "{} ∈ Con but subset {} is not",
                            u.render_set(y),
                            u.render_set(&x)
                        ),
                    });
                    break 'dc;
                }
            }
        }

        for id in u.ids() {
            if !self.con.is_consistent(&u.singleton(id)) {
                violations.push(PropertyViolation {
                    property: "singleton consistency".into(),
                    witness: format!("{{{}}} is not consistent", u.name(id)),
                });
                break;
            }
        }

        let closures: Vec<TokenSet> = con_sets.iter().map(|x| self.closure_unchecked(x)).collect();

        'ec: for (x, cl) in con_sets.iter().zip(&closures) {
            for a in cl.difference(x).iter() {
                if !self.con.is_consistent_with(x, a) {
                    violations.push(PropertyViolation {
                        property: "entailment consistency".into(),
                        witness: format!(
                            "{} ⊢ {} but {} is not consistent",
                            u.render_set(x),
                            u.name(a),
                            u.render_set(&x.with(a))
                        ),
                    });
                    break 'ec;
                }
            }
        }

        for (x, cl) in con_sets.iter().zip(&closures) {
            if !x.is_subset(cl) {
                violations.push(PropertyViolation {
                    property: "reflexivity".into(),
                    witness: format!("{} does not entail all of its members", u.render_set(x)),
                });
                break;
            }
        }

        'tr: for (x, clx) in con_sets.iter().zip(&closures) {
            for (y, cly) in con_sets.iter().zip(&closures) {
                if y.is_subset(clx) && !cly.is_subset(clx) {
                    let c = cly.difference(clx).iter().next().unwrap();
                    violations.push(PropertyViolation {
                        property: "transitivity".into(),
                        witness: format!(
                            "{} ⊢ every member of {} and {} ⊢ {}, but {} ⊬ {}",
                            u.render_set(x),
                            u.render_set(y),
                            u.render_set(y),
                            u.name(c),
                            u.render_set(x),
                            u.name(c)
                        ),
                    });
                    break 'tr;
                }
            }
        }

        ValidationReport { violations }
    }

    /// Exhaustive closure-operator laws over all consistent sets:
    /// inflationary, monotone, idempotent.
    pub fn check_closure_laws(&self) -> CheckReport {
        let u = self.universe();
        let con_sets = self.con.consistent_sets();
        let closures: Vec<TokenSet> = con_sets.iter().map(|x| self.closure_unchecked(x)).collect();
        let mut instances = 0;

        for (x, cl) in con_sets.iter().zip(&closures) {
            instances += 1;
            if !x.is_subset(cl) {
                return CheckReport::fail(
                    "closure laws",
                    instances,
                    format!("not inflationary at {}", u.render_set(x)),
                );
            }
            let again = self.closure_unchecked(cl);
            if again != *cl {
                return CheckReport::fail(
                    "closure laws",
                    instances,
                    format!(
                        "not idempotent at {}: F(F(X)) = {}",
                        u.render_set(x),
                        u.render_set(&again)
                    ),
                );
            }
        }
        for (x, clx) in con_sets.iter().zip(&closures) {
            for (y, cly) in con_sets.iter().zip(&closures) {
                if x.is_subset(y) {
                    instances += 1;
                    if !clx.is_subset(cly) {
                        return CheckReport::fail(
                            "closure laws",
                            instances,
                            format!(
                                "not monotone: {} ⊆ {} but F(X) ⊄ F(Y)",
                                u.render_set(x),
                                u.render_set(y)
                            ),
                        );
                    }
                }
            }
        }
        CheckReport::pass("closure laws", instances)
    }
}
