//! Builds a default structure whose skeptical consequence reproduces a given
//! abstract relation, by adjoining one label token per consistent set.
//!
//! The label of X is forced exactly when the premise sits between X and X's
//! consequences, and firing it releases those consequences. Consistency over
//! the extended universe is compiled to minimal conflict sets: the base
//! conflicts, label pairs (all pairs in plain mode, pairs with different
//! consequence rows in cumulative mode), and label-against-token pairs for
//! tokens outside the label's row. Every build self-checks the compiled
//! predicate against the defining conditions before returning.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::defaults::{DefaultRule, DefaultStructure};
use crate::error::Error;
use crate::nonmono::NmRelation;
use crate::report::CheckReport;
use crate::system::{ConsistencyPredicate, InformationSystem};
use crate::token::{TokenId, TokenSet, TokenUniverse};

/// Cap on the extended universe; beyond this the pairwise conflict tables
/// stop being desk-scale objects.
pub const REPRESENT_CAP: usize = 128;

/// Extended universes up to this size get exhaustively self-checked and are
/// eligible for the whole-state-space verifications.
const EXHAUSTIVE_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Extensions of P enumerate the consistent sets sandwiching P.
    Plain,
    /// Requires cautious monotony; every premise gets exactly one extension.
    Cumulative,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Cumulative => "cumulative",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A structure over the extended universe together with the bookkeeping
/// needed to move between the two coordinate systems.
#[derive(Debug, Clone)]
pub struct Representation {
    structure: DefaultStructure,
    mode: Mode,
    base_universe: TokenUniverse,
    a_to_b: Vec<TokenId>,
    b_to_a: Vec<Option<TokenId>>,
    label_of: BTreeMap<TokenSet, TokenId>,
    source_of: BTreeMap<TokenId, TokenSet>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepStats {
    pub mode: Mode,
    pub base_tokens: usize,
    pub label_tokens: usize,
    pub rules: usize,
    pub conflict_sets: usize,
}

/// Report of the plain-mode extension shape check.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeReport {
    pub check: CheckReport,
    pub max_depth: usize,
}

/// Report of the cumulative-mode uniqueness checks. The state-space sweep
/// and the relation rebuild are skipped (None) when the extended universe
/// is too large to enumerate.
#[derive(Debug, Clone, Serialize)]
pub struct UniqueReport {
    pub per_premise: CheckReport,
    pub all_states: Option<CheckReport>,
    pub rebuilt_cumulative: Option<CheckReport>,
    pub max_depth: usize,
}

pub fn label_name(universe: &TokenUniverse, set: &TokenSet) -> String {
    format!("[{}]", universe.set_names(set).join(","))
}

pub fn build_plain(nm: &NmRelation) -> Result<Representation, Error> {
    nm.require_abstract()?;
    build(nm, Mode::Plain)
}

pub fn build_cumulative(nm: &NmRelation) -> Result<Representation, Error> {
    nm.require_cumulative()?;
    build(nm, Mode::Cumulative)
}

fn build(nm: &NmRelation, mode: Mode) -> Result<Representation, Error> {
    let a = nm.universe();
    let con_sets = nm.con().consistent_sets();
    if a.len() + con_sets.len() > REPRESENT_CAP {
        return Err(Error::TooLarge {
            tokens: a.len() + con_sets.len(),
            cap: REPRESENT_CAP,
        });
    }

    let labels: Vec<String> = con_sets.iter().map(|x| label_name(a, x)).collect();
    for name in &labels {
        if a.id(name).is_some() {
            return Err(Error::LabelCollision { name: name.clone() });
        }
    }
    let b = TokenUniverse::new(a.names().map(str::to_owned).chain(labels.iter().cloned()))?;

    let a_to_b: Vec<TokenId> = a.names().map(|n| b.id(n).unwrap()).collect();
    let mut b_to_a: Vec<Option<TokenId>> = vec![None; b.len()];
    for (i, target) in a_to_b.iter().enumerate() {
        b_to_a[target.index()] = Some(TokenId(i as u32));
    }
    let lift = |s: &TokenSet| -> TokenSet {
        let mut out = b.empty_set();
        for t in s.iter() {
            out.insert(a_to_b[t.index()]);
        }
        out
    };

    let mut label_of = BTreeMap::new();
    let mut source_of = BTreeMap::new();
    for (x, name) in con_sets.iter().zip(&labels) {
        let id = b.id(name).unwrap();
        label_of.insert(x.clone(), id);
        source_of.insert(id, x.clone());
    }

    let mut rules = Vec::new();
    for x in &con_sets {
        let label = label_of[x];
        rules.push(DefaultRule {
            precondition: lift(x),
            consequent: label,
        });
        let row = nm.consequences(x)?;
        for t in row.difference(x).iter() {
            rules.push(DefaultRule {
                precondition: b.singleton(label),
                consequent: a_to_b[t.index()],
            });
        }
    }

    let mut forbidden: Vec<TokenSet> = nm.con().forbidden().iter().map(&lift).collect();
    for (i, x) in con_sets.iter().enumerate() {
        for y in &con_sets[i + 1..] {
            let clash = match mode {
                Mode::Plain => true,
                Mode::Cumulative => nm.consequences(x)? != nm.consequences(y)?,
            };
            if clash {
                let mut pair = b.empty_set();
                pair.insert(label_of[x]);
                pair.insert(label_of[y]);
                forbidden.push(pair);
            }
        }
        let row = nm.consequences(x)?;
        for t in a.ids() {
            if !row.contains(t) {
                let mut pair = b.empty_set();
                pair.insert(label_of[x]);
                pair.insert(a_to_b[t.index()]);
                forbidden.push(pair);
            }
        }
    }

    let con_star = ConsistencyPredicate::from_minimal_sets(b, forbidden);
    let structure = DefaultStructure::new(InformationSystem::flat(con_star), rules)?;
    let rep = Representation {
        structure,
        mode,
        base_universe: a.clone(),
        a_to_b,
        b_to_a,
        label_of,
        source_of,
    };
    let self_test = check_conflict_compilation(nm, &rep);
    if let Some(f) = self_test.failure {
        return Err(Error::Internal(f));
    }
    Ok(rep)
}

impl Representation {
    pub fn structure(&self) -> &DefaultStructure {
        &self.structure
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn base_universe(&self) -> &TokenUniverse {
        &self.base_universe
    }

    /// Maps a set over the base universe into extended coordinates.
    pub fn lift(&self, s: &TokenSet) -> TokenSet {
        let mut out = self.structure.system().universe().empty_set();
        for t in s.iter() {
            out.insert(self.a_to_b[t.index()]);
        }
        out
    }

    /// The base-universe part of an extended set, in base coordinates.
    pub fn lower(&self, s: &TokenSet) -> TokenSet {
        let mut out = self.base_universe.empty_set();
        for t in s.iter() {
            if let Some(a) = self.b_to_a[t.index()] {
                out.insert(a);
            }
        }
        out
    }

    pub fn is_label(&self, t: TokenId) -> bool {
        self.b_to_a[t.index()].is_none()
    }

    pub fn label_of(&self, x: &TokenSet) -> Option<TokenId> {
        self.label_of.get(x).copied()
    }

    pub fn source_of(&self, label: TokenId) -> Option<&TokenSet> {
        self.source_of.get(&label)
    }

    pub fn labels(&self) -> impl Iterator<Item = (TokenId, &TokenSet)> {
        self.source_of.iter().map(|(id, x)| (*id, x))
    }

    pub fn stats(&self) -> RepStats {
        RepStats {
            mode: self.mode,
            base_tokens: self.base_universe.len(),
            label_tokens: self.source_of.len(),
            rules: self.structure.rules().len(),
            conflict_sets: self.structure.system().con().forbidden().len(),
        }
    }

    fn require_mode(&self, expected: Mode) -> Result<(), Error> {
        if self.mode != expected {
            return Err(Error::WrongMode {
                expected: expected.as_str().into(),
                actual: self.mode.as_str().into(),
            });
        }
        Ok(())
    }
}

/// Evaluates consistency of an extended set straight from the definition:
/// the base part is consistent, labels are pairwise compatible, and each
/// label's companions sit inside its consequence row.
fn direct_consistent(nm: &NmRelation, rep: &Representation, w: &TokenSet) -> bool {
    let mut base = nm.universe().empty_set();
    let mut labels: Vec<&TokenSet> = Vec::new();
    for t in w.iter() {
        match rep.b_to_a[t.index()] {
            Some(a) => base.insert(a),
            None => labels.push(&rep.source_of[&t]),
        }
    }
    if !nm.con().is_consistent(&base) {
        return false;
    }
    match rep.mode {
        Mode::Plain => {
            if labels.len() > 1 {
                return false;
            }
            labels
                .first()
                .map(|x| base.is_subset(nm.consequences(x).unwrap()))
                .unwrap_or(true)
        }
        Mode::Cumulative => {
            for pair in labels.windows(2) {
                let ra = nm.consequences(pair[0]).unwrap();
                let rb = nm.consequences(pair[1]).unwrap();
                if ra != rb {
                    return false;
                }
            }
            labels
                .iter()
                .all(|x| base.is_subset(nm.consequences(x).unwrap()))
        }
    }
}

/// Compares the compiled conflict sets against [`direct_consistent`]:
/// exhaustively when the extended universe is small, otherwise on every
/// compiled set, its one-smaller neighbours, and a seeded random sample.
pub fn check_conflict_compilation(nm: &NmRelation, rep: &Representation) -> CheckReport {
    let name = "conflict compilation";
    let b = rep.structure.system().universe();
    let con_star = rep.structure.system().con();
    let mut instances = 0;
    let mut probe = |w: &TokenSet| -> Option<String> {
        instances += 1;
        let compiled = con_star.is_consistent(w);
        let direct = direct_consistent(nm, rep, w);
        (compiled != direct).then(|| {
            format!(
                "compiled consistency says {compiled} but the definition says {direct} at {}",
                b.render_set(w)
            )
        })
    };
    if b.len() <= EXHAUSTIVE_CAP {
        for mask in 0u64..(1 << b.len()) {
            let w = set_from_mask(b, mask);
            if let Some(f) = probe(&w) {
                return CheckReport::fail(name, instances, f);
            }
        }
    } else {
        for g in con_star.forbidden() {
            if let Some(f) = probe(g) {
                return CheckReport::fail(name, instances, f);
            }
            for t in g.iter() {
                let mut smaller = g.clone();
                smaller.remove(t);
                if let Some(f) = probe(&smaller) {
                    return CheckReport::fail(name, instances, f);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x0dc5);
        for _ in 0..10_000 {
            let mut w = b.empty_set();
            for t in b.ids() {
                if rng.gen_bool(0.5) {
                    w.insert(t);
                }
            }
            if let Some(f) = probe(&w) {
                return CheckReport::fail(name, instances, f);
            }
        }
    }
    CheckReport::pass(name, instances)
}

fn set_from_mask(u: &TokenUniverse, mask: u64) -> TokenSet {
    let mut s = u.empty_set();
    for (i, t) in u.ids().enumerate() {
        if mask >> i & 1 == 1 {
            s.insert(t);
        }
    }
    s
}

/// The construction must not disturb the base universe: consistency of base
/// sets and the consequence rows of base premises come out unchanged.
pub fn verify_conservativity(nm: &NmRelation, rep: &Representation) -> Result<CheckReport, Error> {
    let name = "conservativity";
    let a = nm.universe();
    let mut instances = 0;
    for mask in 0u64..(1 << a.len()) {
        let w = set_from_mask(a, mask);
        instances += 1;
        let base = nm.con().is_consistent(&w);
        let lifted = rep.structure.system().con().is_consistent(&rep.lift(&w));
        if base != lifted {
            return Ok(CheckReport::fail(
                name,
                instances,
                format!(
                    "consistency of {} changes from {base} to {lifted} under lifting",
                    a.render_set(&w)
                ),
            ));
        }
    }
    for x in nm.con().consistent_sets() {
        instances += 1;
        let report = rep.structure.extensions(&rep.lift(&x))?;
        let mut meet = report.extensions[0].tokens.clone();
        for e in &report.extensions[1..] {
            meet = meet.intersect(&e.tokens);
        }
        let restricted = rep.lower(&meet);
        let row = nm.consequences(&x)?;
        if &restricted != row {
            return Ok(CheckReport::fail(
                name,
                instances,
                format!(
                    "consequences of {} restrict to {} instead of {}",
                    a.render_set(&x),
                    a.render_set(&restricted),
                    a.render_set(row)
                ),
            ));
        }
    }
    Ok(CheckReport::pass(name, instances))
}

/// Plain mode: the extensions of a lifted premise P are exactly the rows of
/// the consistent sets Q sandwiching P (Q ⊆ P ⊆ row(Q)), each carrying its
/// own label, and every extension is reached within two stages.
pub fn verify_extension_shape(nm: &NmRelation, rep: &Representation) -> Result<ShapeReport, Error> {
    rep.require_mode(Mode::Plain)?;
    let name = "plain extension shape";
    let a = nm.universe();
    let con_sets = nm.con().consistent_sets();
    let mut instances = 0;
    let mut max_depth = 0;
    for p in &con_sets {
        instances += 1;
        let mut expected: Vec<TokenSet> = Vec::new();
        for q in &con_sets {
            if q.is_subset(p) && p.is_subset(nm.consequences(q)?) {
                let mut e = rep.lift(nm.consequences(q)?);
                e.insert(rep.label_of(q).unwrap());
                expected.push(e);
            }
        }
        expected.sort();
        let report = rep.structure.extensions(&rep.lift(p))?;
        for e in &report.extensions {
            max_depth = max_depth.max(e.depth);
        }
        let actual = report.sets();
        if actual != expected {
            return Ok(ShapeReport {
                check: CheckReport::fail(
                    name,
                    instances,
                    format!(
                        "premise {}: expected extensions {:?}, found {:?}",
                        a.render_set(p),
                        expected
                            .iter()
                            .map(|s| rep.structure.system().universe().render_set(s))
                            .collect::<Vec<_>>(),
                        actual
                            .iter()
                            .map(|s| rep.structure.system().universe().render_set(s))
                            .collect::<Vec<_>>()
                    ),
                ),
                max_depth,
            });
        }
        if max_depth > 2 {
            return Ok(ShapeReport {
                check: CheckReport::fail(
                    name,
                    instances,
                    format!(
                        "premise {} needed {} expansion stages, more than the promised 2",
                        a.render_set(p),
                        max_depth
                    ),
                ),
                max_depth,
            });
        }
    }
    Ok(ShapeReport {
        check: CheckReport::pass(name, instances),
        max_depth,
    })
}

/// Cumulative mode: every lifted premise P has exactly one extension, the
/// row of P together with the labels of every set sharing that row, reached
/// within three stages. When the extended universe is small enough the check
/// also sweeps all states of the extended structure for single extensions
/// and rebuilds the skeptical relation to confirm it stays cumulative.
pub fn verify_unique_extension(
    nm: &NmRelation,
    rep: &Representation,
) -> Result<UniqueReport, Error> {
    rep.require_mode(Mode::Cumulative)?;
    let a = nm.universe();
    let b_len = rep.structure.system().universe().len();
    let con_sets = nm.con().consistent_sets();
    let mut max_depth = 0;

    let mut per_premise = CheckReport::pass("unique extension per premise", 0);
    for p in &con_sets {
        per_premise.instances += 1;
        let row = nm.consequences(p)?;
        let mut expected = rep.lift(row);
        for q in &con_sets {
            if nm.consequences(q)? == row {
                expected.insert(rep.label_of(q).unwrap());
            }
        }
        let report = rep.structure.extensions(&rep.lift(p))?;
        for e in &report.extensions {
            max_depth = max_depth.max(e.depth);
        }
        let actual = report.sets();
        if actual != vec![expected.clone()] {
            per_premise.failure = Some(format!(
                "premise {}: expected the single extension {}, found {:?}",
                a.render_set(p),
                rep.structure.system().universe().render_set(&expected),
                actual
                    .iter()
                    .map(|s| rep.structure.system().universe().render_set(s))
                    .collect::<Vec<_>>()
            ));
            break;
        }
        if max_depth > 3 {
            per_premise.failure = Some(format!(
                "premise {} needed {} expansion stages, more than the promised 3",
                a.render_set(p),
                max_depth
            ));
            break;
        }
    }

    let small = b_len <= EXHAUSTIVE_CAP;
    let all_states = if small && per_premise.ok() {
        let mut check = CheckReport::pass("unique extension per state", 0);
        for w in rep.structure.system().states() {
            check.instances += 1;
            let report = rep.structure.extensions(&w)?;
            if report.extensions.len() != 1 {
                check.failure = Some(format!(
                    "state {} has {} extensions",
                    rep.structure.system().universe().render_set(&w),
                    report.extensions.len()
                ));
                break;
            }
        }
        Some(check)
    } else {
        None
    };

    let rebuilt_cumulative = if small && per_premise.ok() {
        let rebuilt = NmRelation::skeptical_with_cap(&rep.structure, b_len)?;
        let report = rebuilt.check_axioms();
        let mut check = CheckReport::pass("rebuilt relation cumulative", report.axioms.len() + 1);
        if let Some(f) = report.first_axiom_failure() {
            check.failure = Some(format!("{}: {}", f.name, f.witness.clone().unwrap()));
        } else if let Some(w) = report.cautious_monotony.witness {
            check.failure = Some(format!("cautious monotony: {w}"));
        }
        Some(check)
    } else {
        None
    };

    Ok(UniqueReport {
        per_premise,
        all_states,
        rebuilt_cumulative,
        max_depth,
    })
}
