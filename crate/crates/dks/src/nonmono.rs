//! Skeptical consequence relations and the abstract-system axioms.
//!
//! A relation is stored in pointwise normal form: one row per consistent
//! premise set, holding every token the set defaults to. `X |~ Y` then means
//! Y is a consistent subset of X's row, and `X |~ {}` is vacuously true.
//! Rows are materialized for the whole consistency predicate up front, which
//! is exponential in the universe by design; constructors take a cap.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::defaults::DefaultStructure;
use crate::error::Error;
use crate::report::CheckReport;
use crate::system::ConsistencyPredicate;
use crate::token::{TokenId, TokenSet, TokenUniverse};

/// Default cap on the universe size for row materialization.
pub const MATERIALIZE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Skeptical consequence of a default structure.
    Derived,
    /// Instances supplied as-is; nothing is added or assumed, so any axiom
    /// may fail.
    UserSupplied,
    /// Least relation over a base closed under reflexivity, cautious cut and
    /// conjunction.
    Generated,
}

#[derive(Debug, Clone)]
pub struct NmRelation {
    con: ConsistencyPredicate,
    rows: BTreeMap<TokenSet, TokenSet>,
    provenance: Provenance,
}

/// One axiom verdict: how many instances were examined and the minimal
/// witness if any failed (smallest total token count, lexicographic ties).
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub instances: usize,
    pub witness: Option<String>,
}

impl AxiomCheck {
    pub fn ok(&self) -> bool {
        self.witness.is_none()
    }
}

/// Verdicts for the six abstract-system axioms plus cautious monotony.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomCheck>,
    pub cautious_monotony: AxiomCheck,
}

impl AxiomReport {
    /// The relation is an abstract nonmonotonic system.
    pub fn abstract_ok(&self) -> bool {
        self.axioms.iter().all(AxiomCheck::ok)
    }

    /// ... and additionally cumulative.
    pub fn cumulative_ok(&self) -> bool {
        self.abstract_ok() && self.cautious_monotony.ok()
    }

    pub fn first_axiom_failure(&self) -> Option<&AxiomCheck> {
        self.axioms.iter().find(|c| !c.ok())
    }
}

/// Witness that plain cut fails: `x |~ t` and `t ∪ y |~ {z}` hold while
/// `x ∪ y |~ {z}` does not.
#[derive(Debug, Clone)]
pub struct CutGap {
    pub x: TokenSet,
    pub t: TokenSet,
    pub y: TokenSet,
    pub z: TokenId,
}

fn check_cap(universe: &TokenUniverse, cap: usize) -> Result<(), Error> {
    if universe.len() > cap {
        return Err(Error::TooLarge {
            tokens: universe.len(),
            cap,
        });
    }
    Ok(())
}

impl NmRelation {
    /// Skeptical consequence of a default structure: a token follows from X
    /// when every extension of X contains it. Defined for structures whose
    /// entailment is trivial, where the consistent sets are the states.
    pub fn skeptical(ds: &DefaultStructure) -> Result<Self, Error> {
        Self::skeptical_with_cap(ds, MATERIALIZE_CAP)
    }

    pub fn skeptical_with_cap(ds: &DefaultStructure, cap: usize) -> Result<Self, Error> {
        if !ds.system().entail().is_trivial() {
            return Err(Error::NontrivialEntailment);
        }
        check_cap(ds.system().universe(), cap)?;
        let con = ds.system().con().clone();
        let mut rows = BTreeMap::new();
        for x in con.consistent_sets() {
            let report = ds.extensions(&x)?;
            let mut meet = report.extensions[0].tokens.clone();
            for e in &report.extensions[1..] {
                meet = meet.intersect(&e.tokens);
            }
            rows.insert(x, meet);
        }
        Ok(NmRelation {
            con,
            rows,
            provenance: Provenance::Derived,
        })
    }

    /// Raw relation from explicit instances. Rows contain exactly what the
    /// instances say; use [`check_axioms`](Self::check_axioms) to find out
    /// what the result satisfies.
    pub fn from_instances(
        con: ConsistencyPredicate,
        instances: &[(TokenSet, TokenSet)],
    ) -> Result<Self, Error> {
        Self::from_instances_with_cap(con, instances, MATERIALIZE_CAP)
    }

    pub fn from_instances_with_cap(
        con: ConsistencyPredicate,
        instances: &[(TokenSet, TokenSet)],
        cap: usize,
    ) -> Result<Self, Error> {
        check_cap(con.universe(), cap)?;
        let mut rows: BTreeMap<TokenSet, TokenSet> = con
            .consistent_sets()
            .into_iter()
            .map(|x| (x, con.universe().empty_set()))
            .collect();
        for (x, y) in instances {
            if !con.is_consistent(x) {
                return Err(Error::InconsistentPremise {
                    set: con.universe().render_set(x),
                });
            }
            if !con.is_consistent(y) {
                return Err(Error::InconsistentConclusion {
                    premise: con.universe().render_set(x),
                    conclusion: con.universe().render_set(y),
                });
            }
            rows.get_mut(x).unwrap().union_with(y);
        }
        Ok(NmRelation {
            con,
            rows,
            provenance: Provenance::UserSupplied,
        })
    }

    /// Least relation containing the base instances that is closed under
    /// reflexivity, cautious cut and conjunction, computed by saturation.
    /// Conjunction is free in pointwise form; cut is applied until the rows
    /// stop growing. Fails if any row ends up inconsistent with its premise,
    /// since no relation over this Con can then contain the base.
    pub fn generated_by(
        con: ConsistencyPredicate,
        base: &[(TokenSet, TokenId)],
    ) -> Result<Self, Error> {
        Self::generated_by_with_cap(con, base, MATERIALIZE_CAP)
    }

    pub fn generated_by_with_cap(
        con: ConsistencyPredicate,
        base: &[(TokenSet, TokenId)],
        cap: usize,
    ) -> Result<Self, Error> {
        check_cap(con.universe(), cap)?;
        let con_sets = con.consistent_sets();
        let mut rows: BTreeMap<TokenSet, TokenSet> =
            con_sets.iter().map(|x| (x.clone(), x.clone())).collect();
        for (x, a) in base {
            if !con.is_consistent(x) {
                return Err(Error::InconsistentPremise {
                    set: con.universe().render_set(x),
                });
            }
            rows.get_mut(x).unwrap().insert(*a);
        }
        loop {
            let mut changed = false;
            for x in &con_sets {
                let row = rows[x].clone();
                for t in row.difference(x).subsets() {
                    if t.is_empty() || !con.is_consistent(&t) {
                        continue;
                    }
                    let xt = x.union(&t);
                    if !con.is_consistent(&xt) {
                        continue;
                    }
                    let pulled = rows[&xt].clone();
                    let target = rows.get_mut(x).unwrap();
                    if !pulled.is_subset(target) {
                        target.union_with(&pulled);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for (x, row) in &rows {
            if !con.is_consistent(row) {
                let g = con
                    .forbidden()
                    .iter()
                    .find(|f| f.is_subset(row))
                    .expect("inconsistent row without forbidden subset");
                let t = g.difference(x);
                return Err(Error::BaseInconsistent {
                    witness: format!(
                        "{} |~ {} but {} ∪ {} is forbidden",
                        con.universe().render_set(x),
                        con.universe().render_set(&t),
                        con.universe().render_set(x),
                        con.universe().render_set(&t)
                    ),
                });
            }
        }
        Ok(NmRelation {
            con,
            rows,
            provenance: Provenance::Generated,
        })
    }

    pub fn con(&self) -> &ConsistencyPredicate {
        &self.con
    }

    pub fn universe(&self) -> &TokenUniverse {
        self.con.universe()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The row of X: every token t with `X |~ {t}`.
    pub fn consequences(&self, x: &TokenSet) -> Result<&TokenSet, Error> {
        self.rows.get(x).ok_or_else(|| Error::InconsistentPremise {
            set: self.universe().render_set(x),
        })
    }

    /// `X |~ Y`: both sides consistent and Y pointwise inside X's row.
    pub fn holds(&self, x: &TokenSet, y: &TokenSet) -> Result<bool, Error> {
        let row = self.consequences(x)?;
        Ok(self.con.is_consistent(y) && y.is_subset(row))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&TokenSet, &TokenSet)> {
        self.rows.iter()
    }

    /// As base instances `(X, t)` for every non-member consequence; feeding
    /// these back to [`generated_by`](Self::generated_by) reproduces a
    /// generated relation exactly.
    pub fn instances(&self) -> Vec<(TokenSet, TokenId)> {
        let mut out = Vec::new();
        for (x, row) in &self.rows {
            for t in row.difference(x).iter() {
                out.push((x.clone(), t));
            }
        }
        out
    }

    /// Checks the six abstract-system axioms and cautious monotony, each
    /// with a minimal witness on failure.
    pub fn check_axioms(&self) -> AxiomReport {
        AxiomReport {
            axioms: vec![
                self.check_downward_closure(),
                self.check_singleton_consistency(),
                self.check_consequence_support(),
                self.check_reflexivity(),
                self.check_cut(),
                self.check_conjunction(),
            ],
            cautious_monotony: self.check_cautious_monotony(),
        }
    }

    fn check_downward_closure(&self) -> AxiomCheck {
        let u = self.universe();
        let mut instances = 0;
        let mut witness = None;
        'outer: for y in self.rows.keys() {
            for t in y.iter() {
                instances += 1;
                let mut x = y.clone();
                x.remove(t);
                if !self.con.is_consistent(&x) {
                    witness = Some(format!(
                        "{} ∈ Con but subset {} is not",
                        u.render_set(y),
                        u.render_set(&x)
                    ));
                    break 'outer;
                }
            }
        }
        AxiomCheck {
            name: "downward closure".into(),
            instances,
            witness,
        }
    }

    fn check_singleton_consistency(&self) -> AxiomCheck {
        let u = self.universe();
        let mut witness = None;
        for id in u.ids() {
            if !self.con.is_consistent(&u.singleton(id)) {
                witness = Some(format!("{{{}}} is not consistent", u.name(id)));
                break;
            }
        }
        AxiomCheck {
            name: "singleton consistency".into(),
            instances: u.len(),
            witness,
        }
    }

    /// Consequences must cohere with the premise: X |~ T forces X ∪ T ∈ Con.
    /// A violation exists at X exactly when some forbidden set sits inside
    /// X ∪ row(X) and touches X; its part outside X is the minimal T.
    fn check_consequence_support(&self) -> AxiomCheck {
        let u = self.universe();
        let mut instances = 0;
        let mut best: Option<(usize, TokenSet, TokenSet)> = None;
        for (x, row) in &self.rows {
            instances += 1;
            let reach = x.union(row);
            for g in self.con.forbidden() {
                if g.is_subset(&reach) && !g.is_disjoint(x) {
                    let t = g.difference(x);
                    if t.is_empty() {
                        continue;
                    }
                    let size = x.len() + t.len();
                    let cand = (size, x.clone(), t);
                    let better = match &best {
                        None => true,
                        Some((s, bx, bt)) => (size, &cand.1, &cand.2) < (*s, bx, bt),
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        }
        AxiomCheck {
            name: "consequence support".into(),
            instances,
            witness: best.map(|(_, x, t)| {
                format!(
                    "{} |~ {} but {} ∪ {} is forbidden",
                    u.render_set(&x),
                    u.render_set(&t),
                    u.render_set(&x),
                    u.render_set(&t)
                )
            }),
        }
    }

    fn check_reflexivity(&self) -> AxiomCheck {
        let u = self.universe();
        let mut instances = 0;
        let mut witness = None;
        for (x, row) in &self.rows {
            instances += 1;
            if !x.is_subset(row) {
                let t = x.difference(row).iter().next().unwrap();
                witness = Some(format!(
                    "{} does not default to its member {}",
                    u.render_set(x),
                    u.name(t)
                ));
                break;
            }
        }
        AxiomCheck {
            name: "reflexivity".into(),
            instances,
            witness,
        }
    }

    /// Cautious cut: X |~ T and X ∪ T |~ Z imply X |~ Z. Checked for every
    /// consistent T inside row(X) \ X (adding members of X changes nothing).
    pub fn check_cut(&self) -> AxiomCheck {
        let u = self.universe();
        let mut instances = 0;
        let mut best: Option<(usize, TokenSet, TokenSet, TokenId)> = None;
        for (x, row) in &self.rows {
            for t in row.difference(x).subsets() {
                if t.is_empty() || !self.con.is_consistent(&t) {
                    continue;
                }
                let xt = x.union(&t);
                let Some(pulled) = self.rows.get(&xt) else {
                    continue;
                };
                instances += 1;
                if let Some(z) = pulled.difference(row).iter().next() {
                    let size = x.len() + t.len() + 1;
                    let cand = (size, x.clone(), t.clone(), z);
                    let better = match &best {
                        None => true,
                        Some((s, bx, bt, bz)) => (size, &cand.1, &cand.2, &z) < (*s, bx, bt, bz),
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        }
        AxiomCheck {
            name: "cautious cut".into(),
            instances,
            witness: best.map(|(_, x, t, z)| {
                format!(
                    "{x} |~ {t} and {x} ∪ {t} |~ {z} but {x} does not default to {z}",
                    x = u.render_set(&x),
                    t = u.render_set(&t),
                    z = u.name(z)
                )
            }),
        }
    }

    /// Conjunction: consequences of one premise combine, so the whole row
    /// must be consistent; a forbidden set inside a row splits into two
    /// derivable conjuncts whose union is not.
    fn check_conjunction(&self) -> AxiomCheck {
        let u = self.universe();
        let mut instances = 0;
        let mut best: Option<(usize, TokenSet, TokenSet)> = None;
        for (x, row) in &self.rows {
            instances += 1;
            for g in self.con.forbidden() {
                if g.is_subset(row) {
                    let size = x.len() + g.len();
                    let better = match &best {
                        None => true,
                        Some((s, bx, bg)) => (size, x, g) < (*s, bx, bg),
                    };
                    if better {
                        best = Some((size, x.clone(), g.clone()));
                    }
                }
            }
        }
        AxiomCheck {
            name: "conjunction".into(),
            instances,
            witness: best.map(|(_, x, g)| {
                let split = g.iter().next().unwrap();
                let rest = g.difference(&u.singleton(split));
                format!(
                    "{x} |~ {y} and {x} |~ {{{z}}} but {g} is forbidden",
                    x = u.render_set(&x),
                    y = u.render_set(&rest),
                    z = u.name(split),
                    g = u.render_set(&g)
                )
            }),
        }
    }

    /// Cautious monotony: X |~ a and X |~ b imply X ∪ {b} |~ a. Premise sets
    /// iterate in canonical order, so the first witness found is minimal.
    fn check_cautious_monotony(&self) -> AxiomCheck {
        let u = self.universe();
        let mut instances = 0;
        let mut witness = None;
        'outer: for (x, row) in &self.rows {
            for kept in row.iter() {
                for added in row.iter() {
                    instances += 1;
                    let grown = x.with(added);
                    let still = self
                        .rows
                        .get(&grown)
                        .map(|r| r.contains(kept))
                        .unwrap_or(false);
                    if !still {
                        witness = Some(format!(
                            "({x}, {a}, {b}): {x} |~ {a} and {x} |~ {b} but {xb} does not default to {a}",
                            x = u.render_set(x),
                            a = u.name(kept),
                            b = u.name(added),
                            xb = u.render_set(&grown)
                        ));
                        break 'outer;
                    }
                }
            }
        }
        AxiomCheck {
            name: "cautious monotony".into(),
            instances,
            witness,
        }
    }

    /// Consequence rows are intersections over sandwiching premises: the
    /// row of X equals the meet of row(Y) over all Y ⊆ X with X ⊆ row(Y).
    /// Requires an abstract system.
    pub fn check_consequence_intersection(&self) -> Result<CheckReport, Error> {
        self.require_abstract()?;
        let name = "consequence intersection";
        let u = self.universe();
        let mut instances = 0;
        for (x, row) in &self.rows {
            instances += 1;
            let mut meet: Option<TokenSet> = None;
            for y in x.subsets() {
                if !self.con.is_consistent(&y) {
                    continue;
                }
                let ry = &self.rows[&y];
                if x.is_subset(ry) {
                    meet = Some(match meet {
                        None => ry.clone(),
                        Some(m) => m.intersect(ry),
                    });
                }
            }
            let meet = meet.expect("X itself always sandwiches");
            if meet != *row {
                return Ok(CheckReport::fail(
                    name,
                    instances,
                    format!(
                        "at {}: row is {} but the sandwich meet is {}",
                        u.render_set(x),
                        u.render_set(row),
                        u.render_set(&meet)
                    ),
                ));
            }
        }
        Ok(CheckReport::pass(name, instances))
    }

    /// In a cumulative system, any premise between Q and row(Q) has exactly
    /// Q's consequences.
    pub fn check_cumulativity(&self) -> Result<CheckReport, Error> {
        self.require_cumulative()?;
        let name = "cumulativity";
        let u = self.universe();
        let mut instances = 0;
        for (q, row) in &self.rows {
            for extra in row.difference(q).subsets() {
                let p = q.union(&extra);
                if !self.con.is_consistent(&p) {
                    continue;
                }
                instances += 1;
                if self.rows[&p] != *row {
                    return Ok(CheckReport::fail(
                        name,
                        instances,
                        format!(
                            "{q} ⊆ {p} ⊆ row({q}) but their rows differ: {rp} vs {rq}",
                            q = u.render_set(q),
                            p = u.render_set(&p),
                            rp = u.render_set(&self.rows[&p]),
                            rq = u.render_set(row)
                        ),
                    ));
                }
            }
        }
        Ok(CheckReport::pass(name, instances))
    }

    /// Searches for a failure of plain cut (X |~ T, T ∪ Y |~ z, yet
    /// X ∪ Y does not default to z). Exponential sweep; small systems only.
    pub fn find_cut_gap(&self) -> Option<CutGap> {
        let mut best: Option<(usize, CutGap)> = None;
        for (x, row) in &self.rows {
            for t in row.subsets() {
                if !self.con.is_consistent(&t) {
                    continue;
                }
                for y in self.rows.keys() {
                    let ty = t.union(y);
                    let Some(row_ty) = self.rows.get(&ty) else {
                        continue;
                    };
                    let xy = x.union(y);
                    let Some(row_xy) = self.rows.get(&xy) else {
                        continue;
                    };
                    if let Some(z) = row_ty.difference(row_xy).iter().next() {
                        let size = x.len() + t.len() + y.len() + 1;
                        let gap = CutGap {
                            x: x.clone(),
                            t: t.clone(),
                            y: y.clone(),
                            z,
                        };
                        let better = match &best {
                            None => true,
                            Some((s, b)) => {
                                (size, &gap.x, &gap.t, &gap.y, &gap.z)
                                    < (*s, &b.x, &b.t, &b.y, &b.z)
                            }
                        };
                        if better {
                            best = Some((size, gap));
                        }
                    }
                }
            }
        }
        best.map(|(_, gap)| gap)
    }

    pub fn render_cut_gap(&self, gap: &CutGap) -> String {
        let u = self.universe();
        format!(
            "{x} |~ {t} and {t} ∪ {y} |~ {z}, but {x} ∪ {y} does not default to {z}",
            x = u.render_set(&gap.x),
            t = u.render_set(&gap.t),
            y = u.render_set(&gap.y),
            z = u.name(gap.z)
        )
    }

    pub fn require_abstract(&self) -> Result<(), Error> {
        let report = self.check_axioms();
        if let Some(fail) = report.first_axiom_failure() {
            return Err(Error::AxiomViolation {
                axiom: fail.name.clone(),
                witness: fail.witness.clone().unwrap(),
            });
        }
        Ok(())
    }

    pub fn require_cumulative(&self) -> Result<(), Error> {
        self.require_abstract()?;
        let cm = self.check_axioms().cautious_monotony;
        if let Some(w) = cm.witness {
            return Err(Error::NotCumulative { witness: w });
        }
        Ok(())
    }
}

/// Derives the skeptical relation of a structure and checks cautious cut on
/// it; the derivation is expected to satisfy it for every structure.
pub fn check_cautious_cut(ds: &DefaultStructure) -> Result<CheckReport, Error> {
    let nm = NmRelation::skeptical(ds)?;
    let check = nm.check_cut();
    Ok(match check.witness {
        None => CheckReport::pass("cautious cut", check.instances),
        Some(w) => CheckReport::fail("cautious cut", check.instances, w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::DefaultRule;
    use crate::system::{EntailmentRelation, InformationSystem};

    fn universe(names: &[&str]) -> TokenUniverse {
        TokenUniverse::new(names.iter().copied()).unwrap()
    }

    fn con(names: &[&str], conflicts: &[&[&str]]) -> ConsistencyPredicate {
        let u = universe(names);
        let forbidden = conflicts
            .iter()
            .map(|c| u.set_from_names(c.iter().copied()).unwrap())
            .collect();
        ConsistencyPredicate::new(u, forbidden).unwrap()
    }

    fn structure(
        names: &[&str],
        conflicts: &[&[&str]],
        rules: &[(&[&str], &str)],
    ) -> DefaultStructure {
        let con = con(names, conflicts);
        let u = con.universe().clone();
        let sys = InformationSystem::new(con, EntailmentRelation::trivial());
        let rules = rules
            .iter()
            .map(|(p, c)| DefaultRule {
                precondition: u.set_from_names(p.iter().copied()).unwrap(),
                consequent: u.id(c).unwrap(),
            })
            .collect();
        DefaultStructure::new(sys, rules).unwrap()
    }

    fn chain() -> DefaultStructure {
        structure(
            &["a", "b", "c"],
            &[&["a", "b", "c"]],
            &[(&[], "a"), (&["a"], "b"), (&["b"], "c")],
        )
    }

    fn set(nm: &NmRelation, names: &[&str]) -> TokenSet {
        nm.universe().set_from_names(names.iter().copied()).unwrap()
    }

    #[test]
    fn skeptical_consequence_of_the_two_token_example() {
        let ds = structure(&["a", "b"], &[&["a", "b"]], &[(&[], "b")]);
        let nm = NmRelation::skeptical(&ds).unwrap();
        let b = nm.universe().id("b").unwrap();
        assert!(nm
            .consequences(&nm.universe().empty_set())
            .unwrap()
            .contains(b));
        assert!(!nm.consequences(&set(&nm, &["a"])).unwrap().contains(b));
    }

    #[test]
    fn skeptical_requires_trivial_entailment() {
        let c = con(&["a", "b"], &[]);
        let u = c.universe().clone();
        let entail = EntailmentRelation::new(
            &c,
            vec![crate::system::Sequent {
                premise: u.set_from_names(["a"]).unwrap(),
                conclusion: u.id("b").unwrap(),
            }],
        )
        .unwrap();
        let ds = DefaultStructure::new(InformationSystem::new(c, entail), vec![]).unwrap();
        assert!(matches!(
            NmRelation::skeptical(&ds),
            Err(Error::NontrivialEntailment)
        ));
    }

    #[test]
    fn chain_relation_fails_cautious_monotony_with_minimal_witness() {
        let nm = NmRelation::skeptical(&chain()).unwrap();
        let report = nm.check_axioms();
        assert!(report.abstract_ok());
        let cm = report.cautious_monotony;
        assert!(!cm.ok());
        let w = cm.witness.unwrap();
        assert!(w.starts_with("({}, a, b)"), "witness: {w}");
    }

    #[test]
    fn chain_relation_satisfies_cautious_cut() {
        let report = check_cautious_cut(&chain()).unwrap();
        assert!(report.ok(), "{:?}", report.failure);
        assert!(report.instances > 0);
    }

    #[test]
    fn generated_closure_applies_cut_not_monotony() {
        // Base: {} |~ a, {} |~ b over a free two-token universe. The closure
        // keeps {a} and {b} at their reflexive rows.
        let c = con(&["a", "b"], &[]);
        let u = c.universe().clone();
        let a = u.id("a").unwrap();
        let b = u.id("b").unwrap();
        let nm = NmRelation::generated_by(c, &[(u.empty_set(), a), (u.empty_set(), b)]).unwrap();
        let empty_row = nm.consequences(&u.empty_set()).unwrap();
        assert_eq!(u.render_set(empty_row), "{a b}");
        let a_row = nm.consequences(&u.singleton(a)).unwrap();
        assert_eq!(u.render_set(a_row), "{a}");
        assert!(nm.check_axioms().abstract_ok());
    }

    #[test]
    fn generated_closure_pulls_rows_through_cut() {
        // {} |~ a and {a} |~ b force {} |~ b by cautious cut.
        let c = con(&["a", "b"], &[]);
        let u = c.universe().clone();
        let a = u.id("a").unwrap();
        let b = u.id("b").unwrap();
        let nm = NmRelation::generated_by(c, &[(u.empty_set(), a), (u.singleton(a), b)]).unwrap();
        assert_eq!(
            u.render_set(nm.consequences(&u.empty_set()).unwrap()),
            "{a b}"
        );
    }

    #[test]
    fn generated_closure_rejects_bases_that_force_conflicts() {
        let c = con(&["a", "b"], &[&["a", "b"]]);
        let u = c.universe().clone();
        let a = u.id("a").unwrap();
        let b = u.id("b").unwrap();
        let err =
            NmRelation::generated_by(c, &[(u.empty_set(), a), (u.empty_set(), b)]).unwrap_err();
        assert!(matches!(err, Error::BaseInconsistent { .. }), "{err}");
    }

    #[test]
    fn generation_is_idempotent() {
        let c = con(&["a", "b", "c"], &[&["b", "c"]]);
        let u = c.universe().clone();
        let nm = NmRelation::generated_by(
            c.clone(),
            &[
                (u.empty_set(), u.id("a").unwrap()),
                (u.singleton(u.id("a").unwrap()), u.id("b").unwrap()),
            ],
        )
        .unwrap();
        let again = NmRelation::generated_by(c, &nm.instances()).unwrap();
        assert!(nm.rows().eq(again.rows()));
    }

    // The required idempotence counterexample: a raw relation where taking
    // consequences twice grows the set. Axioms cannot all hold for it (cut
    // fails), which is exactly why the operation must not shortcut.
    #[test]
    fn raw_relation_consequences_need_not_be_idempotent() {
        let c = con(&["a", "b"], &[]);
        let u = c.universe().clone();
        let a = u.id("a").unwrap();
        let empty = u.empty_set();
        let nm = NmRelation::from_instances(
            c,
            &[
                (empty.clone(), u.singleton(a)),
                (u.singleton(a), u.set_from_names(["a", "b"]).unwrap()),
            ],
        )
        .unwrap();
        let once = nm.consequences(&empty).unwrap().clone();
        assert_eq!(u.render_set(&once), "{a}");
        let twice = nm.consequences(&once).unwrap();
        assert_eq!(u.render_set(twice), "{a b}");
        assert_ne!(&once, twice);
        assert!(!nm.check_axioms().axioms[4].ok(), "cut should fail");
    }

    #[test]
    fn consequence_intersection_holds_for_derived_relations() {
        let nm = NmRelation::skeptical(&chain()).unwrap();
        let report = nm.check_consequence_intersection().unwrap();
        assert!(report.ok(), "{:?}", report.failure);
    }

    #[test]
    fn cumulativity_requires_cautious_monotony() {
        let nm = NmRelation::skeptical(&chain()).unwrap();
        assert!(matches!(
            nm.check_cumulativity(),
            Err(Error::NotCumulative { .. })
        ));
    }

    #[test]
    fn cumulativity_holds_for_precondition_free_structures() {
        let ds = structure(
            &["a", "b", "c"],
            &[&["a", "b"]],
            &[(&[], "a"), (&[], "b"), (&[], "c")],
        );
        let nm = NmRelation::skeptical(&ds).unwrap();
        let report = nm.check_cumulativity().unwrap();
        assert!(report.ok(), "{:?}", report.failure);
    }

    #[test]
    fn cut_gap_search_finds_a_separating_example() {
        let nm = NmRelation::skeptical(&chain()).unwrap();
        // Cautious cut holds (checked above); plain cut does not have to.
        // Whatever the sweep finds must be a genuine gap.
        let gap = nm
            .find_cut_gap()
            .expect("the chain example separates the two cut rules");
        assert!(nm.holds(&gap.x, &gap.t).unwrap());
        let ty = gap.t.union(&gap.y);
        assert!(nm.consequences(&ty).unwrap().contains(gap.z));
        assert!(!nm
            .consequences(&gap.x.union(&gap.y))
            .unwrap()
            .contains(gap.z));
    }

    #[test]
    fn materialization_cap_is_enforced() {
        let names: Vec<String> = (0..13).map(|i| format!("t{i:02}")).collect();
        let u = TokenUniverse::new(names).unwrap();
        let c = ConsistencyPredicate::new(u, vec![]).unwrap();
        assert!(matches!(
            NmRelation::generated_by(c, &[]),
            Err(Error::TooLarge { .. })
        ));
    }
}
