//! Seeded random instances for the law batteries.
//!
//! Generators draw from small universes and retry until the draw satisfies
//! the structural preconditions of its kind (valid system, consistent base,
//! cautious monotony), so callers can demand a batch of valid cases without
//! filtering. Everything is driven by the caller's RNG; fixed seeds give
//! reproducible batches.

use rand::seq::index::sample;
use rand::Rng;

use crate::defaults::{DefaultRule, DefaultStructure};
use crate::error::Error;
use crate::nonmono::NmRelation;
use crate::system::{ConsistencyPredicate, EntailmentRelation, InformationSystem, Sequent};
use crate::token::{TokenSet, TokenUniverse};

const NAME_POOL: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn universe(rng: &mut impl Rng, max_tokens: usize) -> TokenUniverse {
    assert!((1..=NAME_POOL.len()).contains(&max_tokens));
    let n = rng.gen_range(1..=max_tokens);
    TokenUniverse::new(NAME_POOL[..n].iter().copied()).unwrap()
}

fn consistency(rng: &mut impl Rng, universe: TokenUniverse) -> ConsistencyPredicate {
    let n = universe.len();
    let mut forbidden = Vec::new();
    if n >= 2 {
        for _ in 0..rng.gen_range(0..=n) {
            let size = rng.gen_range(2..=n);
            let picks = sample(rng, n, size);
            forbidden.push(universe.set_of(picks.iter().map(|i| crate::token::TokenId(i as u32))));
        }
    }
    ConsistencyPredicate::new(universe, forbidden).unwrap()
}

fn random_member(rng: &mut impl Rng, sets: &[TokenSet]) -> TokenSet {
    sets[rng.gen_range(0..sets.len())].clone()
}

/// Random default structure. Sequents are optional because skeptical
/// consequence is only defined over trivial entailment; when they are drawn,
/// draws that break the coherence of entailment with consistency are
/// discarded and after enough misses the structure falls back to trivial
/// entailment.
pub fn structure(
    rng: &mut impl Rng,
    max_tokens: usize,
    max_rules: usize,
    allow_sequents: bool,
) -> DefaultStructure {
    let pool = universe(rng, max_tokens);
    let con = consistency(rng, pool);
    let u = con.universe().clone();
    let consistent = con.consistent_sets();

    let mut system = None;
    if allow_sequents && rng.gen_bool(0.5) {
        for _ in 0..50 {
            let count = rng.gen_range(1..=u.len());
            let sequents: Vec<Sequent> = (0..count)
                .map(|_| Sequent {
                    premise: random_member(rng, &consistent),
                    conclusion: crate::token::TokenId(rng.gen_range(0..u.len()) as u32),
                })
                .collect();
            let entail = EntailmentRelation::new(&con, sequents).unwrap();
            let candidate = InformationSystem::new(con.clone(), entail);
            if candidate.validate().ok() {
                system = Some(candidate);
                break;
            }
        }
    }
    let system =
        system.unwrap_or_else(|| InformationSystem::new(con, EntailmentRelation::trivial()));

    let rules = (0..rng.gen_range(0..=max_rules))
        .map(|_| DefaultRule {
            precondition: random_member(rng, &consistent),
            consequent: crate::token::TokenId(rng.gen_range(0..u.len()) as u32),
        })
        .collect();
    DefaultStructure::new(system, rules).unwrap()
}

/// Random structure whose rules all have empty preconditions, over trivial
/// entailment; the skeptical consequence of such a structure is cumulative.
pub fn precondition_free(
    rng: &mut impl Rng,
    max_tokens: usize,
    max_rules: usize,
) -> DefaultStructure {
    let pool = universe(rng, max_tokens);
    let con = consistency(rng, pool);
    let u = con.universe().clone();
    let empty = u.empty_set();
    let rules = (0..rng.gen_range(0..=max_rules))
        .map(|_| DefaultRule {
            precondition: empty.clone(),
            consequent: crate::token::TokenId(rng.gen_range(0..u.len()) as u32),
        })
        .collect();
    DefaultStructure::new(InformationSystem::flat(con), rules).unwrap()
}

/// Random generated relation: a base of assumption instances closed under
/// the generation rules. Bases that force a forbidden set are redrawn.
pub fn generated_relation(rng: &mut impl Rng, max_tokens: usize) -> NmRelation {
    for _ in 0..10_000 {
        let pool = universe(rng, max_tokens);
        let con = consistency(rng, pool);
        let u = con.universe().clone();
        let consistent = con.consistent_sets();
        let base: Vec<_> = (0..rng.gen_range(0..=2 * u.len()))
            .map(|_| {
                (
                    random_member(rng, &consistent),
                    crate::token::TokenId(rng.gen_range(0..u.len()) as u32),
                )
            })
            .collect();
        match NmRelation::generated_by(con, &base) {
            Ok(nm) => return nm,
            Err(Error::BaseInconsistent { .. }) => continue,
            Err(e) => unreachable!("generator drew an invalid base: {e}"),
        }
    }
    let pool = universe(rng, max_tokens);
    let con = consistency(rng, pool);
    NmRelation::generated_by(con, &[]).expect("empty bases always close")
}

/// Random generated relation that additionally satisfies cautious monotony.
pub fn cumulative_relation(rng: &mut impl Rng, max_tokens: usize) -> NmRelation {
    for _ in 0..10_000 {
        let nm = generated_relation(rng, max_tokens);
        if nm.check_axioms().cumulative_ok() {
            return nm;
        }
    }
    let u = TokenUniverse::new(NAME_POOL[..1].iter().copied()).unwrap();
    let con = ConsistencyPredicate::new(u, vec![]).unwrap();
    NmRelation::generated_by(con, &[]).expect("reflexive relations are cumulative")
}
