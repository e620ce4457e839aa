//! Acceptance gates. Each test prints one `criterion N (...): PASS` line and
//! enforces the stated runtime budget; together they pin the worked examples
//! bit for bit and run the law batteries at scale.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dks::{
    build_cumulative, build_plain, load_str, sampling, serialize_representation,
    verify_conservativity, verify_extension_shape, verify_unique_extension, DefaultStructure,
    Loaded, NmRelation, TokenSet,
};

const RIVALS: &str = "tokens: a b\nconflict: {a b}\ndefault: {} : b\n";
const CHAIN: &str =
    "tokens: a b c\nconflict: {a b c}\ndefault: {} : a\ndefault: {a} : b\ndefault: {b} : c\n";
const FREE_PAIR_BASE: &str = "tokens: a b\nassume: {} |~ a\nassume: {} |~ b\n";

fn structure(text: &str) -> DefaultStructure {
    match load_str(text).unwrap().loaded {
        Loaded::Structure(ds) => ds,
        Loaded::Abstract { .. } => panic!("expected a structure file"),
    }
}

fn abstract_relation(text: &str) -> NmRelation {
    match load_str(text).unwrap().loaded {
        Loaded::Abstract { con, base } => NmRelation::generated_by(con, &base).unwrap(),
        Loaded::Structure(_) => panic!("expected an abstract file"),
    }
}

fn extension_names(ds: &DefaultStructure, state: &TokenSet) -> Vec<String> {
    ds.extensions(state)
        .unwrap()
        .sets()
        .iter()
        .map(|s| ds.system().universe().render_set(s))
        .collect()
}

fn finish(n: usize, what: &str, checks: usize, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    let ok = elapsed < budget;
    println!(
        "criterion {n} ({what}): {} [{checks} checks in {} ms]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_millis()
    );
    assert!(
        ok,
        "criterion {n} exceeded its {} s budget: {} ms",
        budget.as_secs(),
        elapsed.as_millis()
    );
}

#[test]
fn criterion_1_rival_defaults_example() {
    let started = Instant::now();
    let ds = structure(RIVALS);
    let u = ds.system().universe();
    let empty = u.empty_set();
    let a = u.set_from_names(["a"]).unwrap();
    let b = u.set_from_names(["b"]).unwrap();

    assert_eq!(extension_names(&ds, &empty), ["{b}"]);
    assert_eq!(extension_names(&ds, &a), ["{a}"]);

    let nm = NmRelation::skeptical(&ds).unwrap();
    assert!(nm.holds(&empty, &b).unwrap());
    assert!(!nm.holds(&a, &b).unwrap());

    finish(
        1,
        "rival defaults example",
        4,
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_chained_defaults_example() {
    let started = Instant::now();
    let ds = structure(CHAIN);
    let u = ds.system().universe();
    let empty = u.empty_set();
    let b = u.set_from_names(["b"]).unwrap();

    assert_eq!(extension_names(&ds, &empty), ["{a b}"]);
    assert_eq!(extension_names(&ds, &b), ["{a b}", "{b c}"]);

    let nm = NmRelation::skeptical(&ds).unwrap();
    let report = nm.check_axioms();
    assert!(report.abstract_ok());
    let cm = report.cautious_monotony;
    assert!(!cm.ok(), "the chain must break cautious monotony");
    assert!(
        cm.witness.as_deref().unwrap().starts_with("({}, a, b)"),
        "minimal witness should be ({{}}, a, b): {:?}",
        cm.witness
    );
    let cut = dks::check_cautious_cut(&ds).unwrap();
    assert!(cut.ok(), "{:?}", cut.failure);

    finish(
        2,
        "chained defaults example",
        5,
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_3_label_representation_example() {
    let started = Instant::now();
    let nm = abstract_relation(FREE_PAIR_BASE);
    let rep = build_plain(&nm).unwrap();
    let b = rep.structure().system().universe();

    let stats = rep.stats();
    assert_eq!(stats.label_tokens, 4);
    assert_eq!(stats.rules, 6);

    assert_eq!(
        serialize_representation(&rep),
        "# plain representation; label tokens name the consistent sets of the source system\n\
         # [] := {}\n\
         # [a,b] := {a b}\n\
         # [a] := {a}\n\
         # [b] := {b}\n\
         tokens: [] [a,b] [a] [b] a b\n\
         conflict: {[] [a,b]}\n\
         conflict: {[] [a]}\n\
         conflict: {[] [b]}\n\
         conflict: {[a,b] [a]}\n\
         conflict: {[a,b] [b]}\n\
         conflict: {[a] [b]}\n\
         conflict: {[a] b}\n\
         conflict: {[b] a}\n\
         default: {} : []\n\
         default: {[]} : a\n\
         default: {[]} : b\n\
         default: {a} : [a]\n\
         default: {b} : [b]\n\
         default: {a b} : [a,b]\n"
    );

    let con_star = rep.structure().system().con();
    let both_labels = b.set_from_names(["[]", "[a]"]).unwrap();
    assert!(!con_star.is_consistent(&both_labels));
    let label_against_token = b.set_from_names(["[a]", "b"]).unwrap();
    assert!(!con_star.is_consistent(&label_against_token));

    let a_univ = nm.universe();
    let empty = a_univ.empty_set();
    assert_eq!(
        extension_names(rep.structure(), &rep.lift(&empty)),
        ["{[] a b}"]
    );
    let b_tok = a_univ.set_from_names(["b"]).unwrap();
    assert_eq!(
        extension_names(rep.structure(), &rep.lift(&b_tok)),
        ["{[b] b}", "{[] a b}"]
    );

    let conservativity = verify_conservativity(&nm, &rep).unwrap();
    assert!(conservativity.ok(), "{:?}", conservativity.failure);

    finish(
        3,
        "label representation example",
        7,
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_4_extension_law_battery() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20264);
    let mut checks = 0;
    for _ in 0..500 {
        let ds = sampling::structure(&mut rng, 6, 8, true);
        let laws = ds.check_extension_laws().unwrap();
        assert!(laws.ok(), "extension laws: {:?}", laws.failure);
        let absorb = ds.check_premise_absorption().unwrap();
        assert!(absorb.ok(), "premise absorption: {:?}", absorb.failure);
        checks += laws.instances + absorb.instances;
    }
    finish(
        4,
        "extension law battery",
        checks,
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_5_plain_round_trip_battery() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20265);
    let mut checks = 0;
    for _ in 0..200 {
        let nm = sampling::generated_relation(&mut rng, 3);
        let rep = build_plain(&nm).unwrap();
        let conservativity = verify_conservativity(&nm, &rep).unwrap();
        assert!(conservativity.ok(), "{:?}", conservativity.failure);
        let shape = verify_extension_shape(&nm, &rep).unwrap();
        assert!(shape.check.ok(), "{:?}", shape.check.failure);
        assert!(
            shape.max_depth <= 2,
            "plain extensions must stabilize within 2 stages, saw {}",
            shape.max_depth
        );
        checks += conservativity.instances + shape.check.instances;
    }
    finish(
        5,
        "plain round-trip battery",
        checks,
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_6_cumulative_round_trip_battery() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20266);
    let mut checks = 0;
    for _ in 0..200 {
        let nm = sampling::cumulative_relation(&mut rng, 3);
        let rep = build_cumulative(&nm).unwrap();
        let unique = verify_unique_extension(&nm, &rep).unwrap();
        assert!(unique.per_premise.ok(), "{:?}", unique.per_premise.failure);
        assert!(
            unique.max_depth <= 3,
            "cumulative extensions must stabilize within 3 stages, saw {}",
            unique.max_depth
        );
        let states = unique.all_states.expect("small universes sweep all states");
        assert!(states.ok(), "{:?}", states.failure);
        let rebuilt = unique
            .rebuilt_cumulative
            .expect("small universes rebuild the relation");
        assert!(rebuilt.ok(), "{:?}", rebuilt.failure);
        let conservativity = verify_conservativity(&nm, &rep).unwrap();
        assert!(conservativity.ok(), "{:?}", conservativity.failure);
        checks += unique.per_premise.instances
            + states.instances
            + rebuilt.instances
            + conservativity.instances;
    }
    finish(
        6,
        "cumulative round-trip battery",
        checks,
        started,
        Duration::from_secs(120),
    );
}

/// Replays the exact instance streams of criteria 4, 5 and 6 and compares
/// the guided extension search against the exhaustive subset oracle at every
/// state (battery 4) and every lifted premise (batteries 5 and 6).
#[test]
fn criterion_7_oracle_agreement() {
    let started = Instant::now();
    let mut checks = 0;

    let mut agree = |ds: &DefaultStructure, state: &TokenSet| {
        let guided = ds.extensions(state).unwrap().sets();
        let oracle = ds.extensions_exhaustive(state).unwrap();
        assert_eq!(
            guided,
            oracle,
            "guided search disagrees with the oracle at {}",
            ds.system().universe().render_set(state)
        );
        checks += 1;
    };

    for text in [RIVALS, CHAIN] {
        let ds = structure(text);
        for state in ds.system().states() {
            agree(&ds, &state);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20264);
    for _ in 0..500 {
        let ds = sampling::structure(&mut rng, 6, 8, true);
        for state in ds.system().states() {
            agree(&ds, &state);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20265);
    for _ in 0..200 {
        let nm = sampling::generated_relation(&mut rng, 3);
        let rep = build_plain(&nm).unwrap();
        for x in nm.con().consistent_sets() {
            agree(rep.structure(), &rep.lift(&x));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20266);
    for _ in 0..200 {
        let nm = sampling::cumulative_relation(&mut rng, 3);
        let rep = build_cumulative(&nm).unwrap();
        for x in nm.con().consistent_sets() {
            agree(rep.structure(), &rep.lift(&x));
        }
    }

    finish(
        7,
        "oracle agreement",
        checks,
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_8_precondition_free_cumulativity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20268);
    let mut checks = 0;
    for _ in 0..200 {
        let ds = sampling::precondition_free(&mut rng, 5, 8);
        let nm = NmRelation::skeptical(&ds).unwrap();
        let report = nm.check_axioms();
        assert!(report.abstract_ok(), "axioms fail on a derived relation");
        assert!(
            report.cautious_monotony.ok(),
            "precondition-free structures must be cumulative: {:?}",
            report.cautious_monotony.witness
        );
        let cumulativity = nm.check_cumulativity().unwrap();
        assert!(cumulativity.ok(), "{:?}", cumulativity.failure);
        checks += report.cautious_monotony.instances + cumulativity.instances;
    }
    finish(
        8,
        "precondition-free cumulativity",
        checks,
        started,
        Duration::from_secs(60),
    );
}

/// Replays every system generated in the batteries above (the examples, the
/// law battery and the precondition-free battery) and checks the closure
/// operator laws exhaustively on each system with at most 5 tokens.
#[test]
fn criterion_9_closure_operator_laws() {
    let started = Instant::now();
    let mut checks = 0;

    let mut check = |ds: &DefaultStructure| {
        if ds.system().universe().len() > 5 {
            return;
        }
        let laws = ds.system().check_closure_laws();
        assert!(laws.ok(), "closure laws: {:?}", laws.failure);
        checks += laws.instances;
    };

    for text in [RIVALS, CHAIN] {
        check(&structure(text));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20264);
    for _ in 0..500 {
        check(&sampling::structure(&mut rng, 6, 8, true));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20268);
    for _ in 0..200 {
        check(&sampling::precondition_free(&mut rng, 5, 8));
    }

    finish(
        9,
        "closure operator laws",
        checks,
        started,
        Duration::from_secs(60),
    );
}
