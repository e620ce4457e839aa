//! Command line front end for the dks library. Loads a default structure or
//! an abstract relation from a text file and answers queries about it.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 a check found violations
//! or a verifier failed, 3 internal invariant breach. Diagnostics go to the
//! error stream, data to the output stream, and all output is deterministic
//! for a fixed (file, flags, seed).

mod dot;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use dks::nonmono::AxiomCheck;
use dks::{
    build_cumulative, build_plain, check_conflict_compilation, load_str, sampling,
    serialize_representation, verify_conservativity, verify_extension_shape,
    verify_unique_extension, CheckReport, ConsistencyPredicate, DefaultStructure, Error,
    InformationSystem, Loaded, NmRelation, RepStats, TokenId, TokenSet, TokenUniverse,
};

#[derive(Parser)]
#[command(
    name = "dks",
    version,
    about = "Reason over default structures and abstract consequence relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a file: system laws for structure files, base consistency
    /// and the abstract-system axioms for relation files
    Check {
        file: PathBuf,
        /// Refuse universes larger than this many tokens
        #[arg(long, default_value_t = 12)]
        max_tokens: usize,
        /// Emit a machine readable report
        #[arg(long)]
        json: bool,
    },
    /// List the extensions of a state, one per line with search depth
    Extensions {
        file: PathBuf,
        /// State tokens, comma or space separated, braces optional
        #[arg(long, default_value = "")]
        state: String,
        /// Refuse universes larger than this many tokens
        #[arg(long, default_value_t = 12)]
        max_tokens: usize,
        /// Emit a machine readable report
        #[arg(long)]
        json: bool,
    },
    /// Print the skeptical consequences of a state: the tokens shared by
    /// all of its extensions
    Consequence {
        file: PathBuf,
        /// State tokens, comma or space separated, braces optional
        #[arg(long, default_value = "")]
        state: String,
        /// Refuse universes larger than this many tokens
        #[arg(long, default_value_t = 12)]
        max_tokens: usize,
        /// Emit a machine readable report
        #[arg(long)]
        json: bool,
    },
    /// Print the axiom verdict table of the file's consequence relation
    Axioms {
        file: PathBuf,
        /// For relation files: judge the declared rows as given instead of
        /// their generated closure
        #[arg(long)]
        raw: bool,
        /// Refuse universes larger than this many tokens
        #[arg(long, default_value_t = 12)]
        max_tokens: usize,
        /// Emit a machine readable report
        #[arg(long)]
        json: bool,
    },
    /// Compile an abstract relation into a default structure whose extra
    /// tokens name the consistent sets of the source
    Represent {
        file: PathBuf,
        /// Build the single-extension variant (needs cautious monotony)
        #[arg(long)]
        cumulative: bool,
        /// Write the structure here instead of standard output
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Refuse universes larger than this many tokens
        #[arg(long, default_value_t = 12)]
        max_tokens: usize,
        /// Emit a machine readable report
        #[arg(long)]
        json: bool,
    },
    /// Run every verifier that applies to the file; exit 0 only if all pass
    Verify {
        file: PathBuf,
        /// For relation files: require cumulativity and round-trip through
        /// the single-extension construction
        #[arg(long)]
        cumulative: bool,
        /// Seed for the sampled batteries
        #[arg(long, default_value_t = 2026)]
        seed: u64,
        /// Also verify this many freshly sampled instances
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// Refuse universes larger than this many tokens
        #[arg(long, default_value_t = 12)]
        max_tokens: usize,
        /// Emit a machine readable report
        #[arg(long)]
        json: bool,
    },
    /// Print the extension graph over all states
    Kripke {
        file: PathBuf,
        /// Emit Graphviz DOT instead of text
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        /// Refuse universes larger than this many tokens
        #[arg(long, default_value_t = 12)]
        max_tokens: usize,
        /// Emit a machine readable report
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Check {
            file,
            max_tokens,
            json,
        } => cmd_check(&file, max_tokens, json),
        Command::Extensions {
            file,
            state,
            max_tokens,
            json,
        } => cmd_extensions(&file, &state, max_tokens, json),
        Command::Consequence {
            file,
            state,
            max_tokens,
            json,
        } => cmd_consequence(&file, &state, max_tokens, json),
        Command::Axioms {
            file,
            raw,
            max_tokens,
            json,
        } => cmd_axioms(&file, raw, max_tokens, json),
        Command::Represent {
            file,
            cumulative,
            out,
            max_tokens,
            json,
        } => cmd_represent(&file, cumulative, out.as_deref(), max_tokens, json),
        Command::Verify {
            file,
            cumulative,
            seed,
            samples,
            max_tokens,
            json,
        } => cmd_verify(
            &file,
            VerifyOpts {
                cumulative,
                seed,
                samples,
                max_tokens,
            },
            json,
        ),
        Command::Kripke {
            file,
            dot: as_dot,
            max_tokens,
            json,
        } => cmd_kripke(&file, as_dot, max_tokens, json),
    }
}

/// A terminating failure: its message goes to the error stream and its code
/// becomes the process exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        // Violations of the laws a file's content promised are verification
        // failures; everything else is bad input apart from genuine bugs.
        let code = match &err {
            Error::Internal(_) => 3,
            Error::AxiomViolation { .. }
            | Error::NotCumulative { .. }
            | Error::BaseInconsistent { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

enum Input {
    Structure(DefaultStructure),
    Abstract {
        con: ConsistencyPredicate,
        base: Vec<(TokenSet, TokenId)>,
    },
}

fn load(path: &std::path::Path) -> Result<Input, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read `{}`: {e}", path.display())))?;
    let parsed = load_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(match parsed.loaded {
        Loaded::Structure(ds) => Input::Structure(ds),
        Loaded::Abstract { con, base } => Input::Abstract { con, base },
    })
}

fn expect_structure(input: Input, command: &str) -> Result<DefaultStructure, Failure> {
    match input {
        Input::Structure(ds) => Ok(ds),
        Input::Abstract { .. } => Err(Failure::usage(format!(
            "`{command}` needs a structure file with default rules, not an abstract relation"
        ))),
    }
}

fn guard_tokens(universe: &TokenUniverse, max_tokens: usize) -> Result<(), Failure> {
    let n = universe.len();
    if n > max_tokens {
        return Err(Failure::usage(format!(
            "universe has {n} tokens, exceeding the cap of {max_tokens}; raise --max-tokens to proceed"
        )));
    }
    Ok(())
}

/// Commands that compute on a structure refuse one whose system breaks its
/// own laws; `check` and `verify` are the places that report the details.
fn require_valid(ds: &DefaultStructure) -> Result<(), Failure> {
    let report = ds.system().validate();
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Failure {
            code: 2,
            message: format!("system law `{}` fails: {}", v.property, v.witness),
        }),
    }
}

/// Splits a state argument into token names. Commas and spaces separate at
/// the top level only, so bracketed label names like `[a,b]` stay whole.
fn parse_state(universe: &TokenUniverse, raw: &str) -> Result<TokenSet, Failure> {
    let mut text = raw.trim();
    if let Some(stripped) = text.strip_prefix('{') {
        text = stripped
            .strip_suffix('}')
            .ok_or_else(|| Failure::usage("unbalanced `{` in state"))?;
    }
    let mut names: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    for ch in text.chars() {
        match ch {
            '[' => {
                depth += 1;
                current.push(ch);
            }
            ']' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Failure::usage("unbalanced `]` in state"))?;
                current.push(ch);
            }
            ',' | ' ' | '\t' if depth == 0 => {
                if !current.is_empty() {
                    names.push(std::mem::take(&mut current));
                }
            }
            _ => current.push(ch),
        }
    }
    if depth != 0 {
        return Err(Failure::usage("unbalanced `[` in state"));
    }
    if !current.is_empty() {
        names.push(current);
    }
    Ok(universe.set_from_names(names.iter().map(String::as_str))?)
}

fn print_check(check: &CheckReport) {
    match &check.failure {
        None => println!("{}: ok ({} instances)", check.name, check.instances),
        Some(witness) => println!("{}: FAIL {}", check.name, witness),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization")
    );
}

fn axiom_check(axiom: &AxiomCheck) -> CheckReport {
    CheckReport {
        name: axiom.name.clone(),
        instances: axiom.instances,
        failure: axiom.witness.clone(),
    }
}

fn system_laws(sys: &InformationSystem) -> CheckReport {
    let name = "system laws";
    let instances = sys.con().consistent_sets().len();
    let report = sys.validate();
    match report.violations.first() {
        None => CheckReport::pass(name, instances),
        Some(v) => CheckReport::fail(name, instances, format!("{}: {}", v.property, v.witness)),
    }
}

fn collect_witnesses(verdicts: &[CheckReport]) -> Vec<WitnessEntry> {
    verdicts
        .iter()
        .filter_map(|c| {
            c.failure.clone().map(|witness| WitnessEntry {
                check: c.name.clone(),
                witness,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct WitnessEntry {
    check: String,
    witness: String,
}

#[derive(Serialize)]
struct ReportOutput {
    command: &'static str,
    kind: &'static str,
    verdicts: Vec<CheckReport>,
    witnesses: Vec<WitnessEntry>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct AxiomsOutput {
    command: &'static str,
    relation: &'static str,
    verdicts: Vec<CheckReport>,
    witnesses: Vec<WitnessEntry>,
}

#[derive(Serialize)]
struct ExtensionEntry {
    tokens: Vec<String>,
    depth: usize,
    fired: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct ExtensionsOutput {
    command: &'static str,
    state: Vec<String>,
    extensions: Vec<ExtensionEntry>,
}

#[derive(Serialize)]
struct ConsequenceOutput {
    command: &'static str,
    state: Vec<String>,
    consequences: Vec<String>,
}

#[derive(Serialize)]
struct RepresentOutput {
    command: &'static str,
    stats: RepStats,
    out: Option<String>,
    text: Option<String>,
}

#[derive(Serialize)]
struct KripkeOutput {
    command: &'static str,
    states: Vec<Vec<String>>,
    edges: Vec<Vec<usize>>,
    stable: Vec<bool>,
}

fn cmd_check(file: &std::path::Path, max_tokens: usize, json: bool) -> Result<u8, Failure> {
    let input = load(file)?;
    let mut verdicts = Vec::new();
    let mut notes = Vec::new();
    let kind = match &input {
        Input::Structure(_) => "structure",
        Input::Abstract { .. } => "abstract",
    };
    match input {
        Input::Structure(ds) => {
            guard_tokens(ds.system().universe(), max_tokens)?;
            verdicts.push(system_laws(ds.system()));
        }
        Input::Abstract { con, base } => {
            guard_tokens(con.universe(), max_tokens)?;
            match NmRelation::generated_by_with_cap(con, &base, max_tokens) {
                Ok(nm) => {
                    verdicts.push(CheckReport::pass("base consistency", nm.rows().count()));
                    let report = nm.check_axioms();
                    for axiom in &report.axioms {
                        verdicts.push(axiom_check(axiom));
                    }
                    notes.push(render_cm_note(&report.cautious_monotony, "not required"));
                }
                Err(Error::BaseInconsistent { witness }) => {
                    verdicts.push(CheckReport::fail("base consistency", 0, witness));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let failed = verdicts.iter().filter(|c| !c.ok()).count();
    if json {
        let witnesses = collect_witnesses(&verdicts);
        print_json(&ReportOutput {
            command: "check",
            kind,
            verdicts,
            witnesses,
            notes,
        });
    } else {
        for check in &verdicts {
            print_check(check);
        }
        for note in &notes {
            println!("note: {note}");
        }
        if failed == 0 {
            println!("check: ok");
        } else {
            println!(
                "check: {failed} violation{} found",
                if failed == 1 { "" } else { "s" }
            );
        }
    }
    Ok(if failed == 0 { 0 } else { 2 })
}

fn render_cm_note(cm: &AxiomCheck, when_failing: &str) -> String {
    match &cm.witness {
        None => format!(
            "cautious monotony holds ({} instances): the relation is cumulative",
            cm.instances
        ),
        Some(w) => format!("cautious monotony fails ({when_failing}): {w}"),
    }
}

fn cmd_extensions(
    file: &std::path::Path,
    state: &str,
    max_tokens: usize,
    json: bool,
) -> Result<u8, Failure> {
    let ds = expect_structure(load(file)?, "extensions")?;
    guard_tokens(ds.system().universe(), max_tokens)?;
    require_valid(&ds)?;
    let u = ds.system().universe();
    let state = parse_state(u, state)?;
    let report = ds.extensions(&state)?;
    if json {
        print_json(&ExtensionsOutput {
            command: "extensions",
            state: u.set_names(&state),
            extensions: report
                .extensions
                .iter()
                .map(|e| ExtensionEntry {
                    tokens: u.set_names(&e.tokens),
                    depth: e.depth,
                    fired: e
                        .fired
                        .iter()
                        .map(|stage| stage.iter().map(|&i| ds.render_rule(i)).collect())
                        .collect(),
                })
                .collect(),
        });
    } else {
        for e in &report.extensions {
            println!("{} (depth {})", u.render_set(&e.tokens), e.depth);
        }
    }
    Ok(0)
}

fn cmd_consequence(
    file: &std::path::Path,
    state: &str,
    max_tokens: usize,
    json: bool,
) -> Result<u8, Failure> {
    let (universe, state, consequences) = match load(file)? {
        Input::Structure(ds) => {
            guard_tokens(ds.system().universe(), max_tokens)?;
            require_valid(&ds)?;
            if !ds.system().entail().is_trivial() {
                return Err(Error::NontrivialEntailment.into());
            }
            let u = ds.system().universe();
            let state = parse_state(u, state)?;
            let report = ds.extensions(&state)?;
            let mut meet: Option<TokenSet> = None;
            for e in &report.extensions {
                meet = Some(match meet {
                    None => e.tokens.clone(),
                    Some(m) => m.intersect(&e.tokens),
                });
            }
            let meet = meet.expect("every state has at least one extension");
            (u.clone(), state, meet)
        }
        Input::Abstract { con, base } => {
            guard_tokens(con.universe(), max_tokens)?;
            let nm = NmRelation::generated_by_with_cap(con, &base, max_tokens)?;
            let state = parse_state(nm.universe(), state)?;
            let row = nm.consequences(&state)?.clone();
            (nm.universe().clone(), state, row)
        }
    };
    if json {
        print_json(&ConsequenceOutput {
            command: "consequence",
            state: universe.set_names(&state),
            consequences: universe.set_names(&consequences),
        });
    } else {
        println!("{}", universe.render_set(&consequences));
    }
    Ok(0)
}

fn cmd_axioms(
    file: &std::path::Path,
    raw: bool,
    max_tokens: usize,
    json: bool,
) -> Result<u8, Failure> {
    let (report, relation) = match load(file)? {
        Input::Structure(ds) => {
            if raw {
                return Err(Failure::usage(
                    "--raw applies to abstract relation files only",
                ));
            }
            guard_tokens(ds.system().universe(), max_tokens)?;
            require_valid(&ds)?;
            let nm = NmRelation::skeptical_with_cap(&ds, max_tokens)?;
            (nm.check_axioms(), "derived")
        }
        Input::Abstract { con, base } => {
            guard_tokens(con.universe(), max_tokens)?;
            let nm = if raw {
                let instances: Vec<(TokenSet, TokenSet)> = base
                    .iter()
                    .map(|(x, a)| (x.clone(), con.universe().singleton(*a)))
                    .collect();
                NmRelation::from_instances_with_cap(con, &instances, max_tokens)?
            } else {
                NmRelation::generated_by_with_cap(con, &base, max_tokens)?
            };
            (nm.check_axioms(), if raw { "raw" } else { "generated" })
        }
    };
    let mut verdicts: Vec<CheckReport> = report.axioms.iter().map(axiom_check).collect();
    verdicts.push(axiom_check(&report.cautious_monotony));
    if json {
        let witnesses = collect_witnesses(&verdicts);
        print_json(&AxiomsOutput {
            command: "axioms",
            relation,
            verdicts,
            witnesses,
        });
    } else {
        for check in &verdicts {
            print_check(check);
        }
    }
    Ok(0)
}

fn cmd_represent(
    file: &std::path::Path,
    cumulative: bool,
    out: Option<&std::path::Path>,
    max_tokens: usize,
    json: bool,
) -> Result<u8, Failure> {
    let (con, base) = match load(file)? {
        Input::Abstract { con, base } => (con, base),
        Input::Structure(_) => {
            return Err(Failure::usage(
                "`represent` needs an abstract relation file, not a structure",
            ))
        }
    };
    guard_tokens(con.universe(), max_tokens)?;
    let nm = NmRelation::generated_by_with_cap(con, &base, max_tokens)?;
    let rep = if cumulative {
        build_cumulative(&nm)?
    } else {
        build_plain(&nm)?
    };
    let text = serialize_representation(&rep);
    let stats = rep.stats();
    let stats_line = format!(
        "{} representation: {} base tokens, {} labels, {} rules, {} conflict sets",
        stats.mode, stats.base_tokens, stats.label_tokens, stats.rules, stats.conflict_sets
    );
    if let Some(path) = out {
        fs::write(path, &text)
            .map_err(|e| Failure::usage(format!("cannot write `{}`: {e}", path.display())))?;
    }
    if json {
        print_json(&RepresentOutput {
            command: "represent",
            stats,
            out: out.map(|p| p.display().to_string()),
            text: if out.is_none() { Some(text) } else { None },
        });
    } else if let Some(path) = out {
        println!("{stats_line}");
        println!("wrote {}", path.display());
    } else {
        print!("{text}");
        eprintln!("{stats_line}");
    }
    Ok(0)
}

struct VerifyOpts {
    cumulative: bool,
    seed: u64,
    samples: usize,
    max_tokens: usize,
}

fn cmd_verify(file: &std::path::Path, opts: VerifyOpts, json: bool) -> Result<u8, Failure> {
    let input = load(file)?;
    let mut verdicts = Vec::new();
    let mut notes = Vec::new();
    let kind = match &input {
        Input::Structure(_) => "structure",
        Input::Abstract { .. } => "abstract",
    };
    match input {
        Input::Structure(ds) => {
            if opts.cumulative {
                return Err(Failure::usage(
                    "--cumulative applies to abstract relation files only",
                ));
            }
            verify_structure(&ds, &opts, &mut verdicts, &mut notes)?;
        }
        Input::Abstract { con, base } => {
            verify_abstract(con, base, &opts, &mut verdicts, &mut notes)?;
        }
    }
    let failed = verdicts.iter().filter(|c| !c.ok()).count();
    if json {
        let witnesses = collect_witnesses(&verdicts);
        print_json(&ReportOutput {
            command: "verify",
            kind,
            verdicts,
            witnesses,
            notes,
        });
    } else {
        for check in &verdicts {
            print_check(check);
        }
        for note in &notes {
            println!("note: {note}");
        }
        if failed == 0 {
            println!("verify: all {} checks passed", verdicts.len());
        } else {
            println!("verify: {failed} of {} checks failed", verdicts.len());
        }
    }
    Ok(if failed == 0 { 0 } else { 2 })
}

fn verify_structure(
    ds: &DefaultStructure,
    opts: &VerifyOpts,
    verdicts: &mut Vec<CheckReport>,
    notes: &mut Vec<String>,
) -> Result<(), Failure> {
    guard_tokens(ds.system().universe(), opts.max_tokens)?;
    let laws = system_laws(ds.system());
    let sound = laws.ok();
    verdicts.push(laws);
    if !sound {
        notes.push("remaining checks skipped: the system laws fail".into());
        return Ok(());
    }
    verdicts.push(ds.system().check_closure_laws());
    verdicts.push(ds.check_extension_laws()?);
    verdicts.push(ds.check_premise_absorption()?);
    verdicts.push(oracle_agreement(ds)?);
    if ds.system().entail().is_trivial() {
        let nm = NmRelation::skeptical_with_cap(ds, opts.max_tokens)?;
        let report = nm.check_axioms();
        for axiom in &report.axioms {
            verdicts.push(axiom_check(axiom));
        }
        verdicts.push(nm.check_consequence_intersection()?);
        notes.push(render_cm_note(
            &report.cautious_monotony,
            "not a law of skeptical consequence",
        ));
    } else {
        notes.push("skeptical consequence checks skipped: entailment is not trivial".into());
    }
    if opts.samples > 0 {
        verdicts.push(sampled_structures(opts.seed, opts.samples));
    }
    Ok(())
}

fn oracle_agreement(ds: &DefaultStructure) -> Result<CheckReport, Error> {
    let name = "oracle agreement";
    let u = ds.system().universe();
    let mut instances = 0;
    for x in ds.system().states() {
        let guided = ds.extensions(&x)?.sets();
        let oracle = ds.extensions_exhaustive(&x)?;
        instances += 1;
        if guided != oracle {
            return Ok(CheckReport::fail(
                name,
                instances,
                format!(
                    "at state {}: guided search and the exhaustive oracle disagree",
                    u.render_set(&x)
                ),
            ));
        }
    }
    Ok(CheckReport::pass(name, instances))
}

fn sampled_structures(seed: u64, samples: usize) -> CheckReport {
    let name = "sampled structures";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = 0;
    for i in 0..samples {
        let ds = sampling::structure(&mut rng, 6, 8, true);
        let run = || -> Result<Vec<CheckReport>, Error> {
            Ok(vec![
                ds.system().check_closure_laws(),
                ds.check_extension_laws()?,
                ds.check_premise_absorption()?,
                oracle_agreement(&ds)?,
            ])
        };
        match run() {
            Err(e) => return CheckReport::fail(name, instances, format!("sample {i}: {e}")),
            Ok(checks) => {
                for c in checks {
                    instances += c.instances;
                    if let Some(w) = c.failure {
                        return CheckReport::fail(
                            name,
                            instances,
                            format!("sample {i}: {}: {w}", c.name),
                        );
                    }
                }
            }
        }
    }
    CheckReport::pass(name, instances)
}

fn verify_abstract(
    con: ConsistencyPredicate,
    base: Vec<(TokenSet, TokenId)>,
    opts: &VerifyOpts,
    verdicts: &mut Vec<CheckReport>,
    notes: &mut Vec<String>,
) -> Result<(), Failure> {
    guard_tokens(con.universe(), opts.max_tokens)?;
    let nm = match NmRelation::generated_by_with_cap(con, &base, opts.max_tokens) {
        Ok(nm) => nm,
        Err(Error::BaseInconsistent { witness }) => {
            verdicts.push(CheckReport::fail("base consistency", 0, witness));
            notes.push("remaining checks skipped: the assumption base is inconsistent".into());
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    verdicts.push(CheckReport::pass("base consistency", nm.rows().count()));
    let report = nm.check_axioms();
    for axiom in &report.axioms {
        verdicts.push(axiom_check(axiom));
    }
    if opts.cumulative {
        verdicts.push(axiom_check(&report.cautious_monotony));
    } else {
        notes.push(render_cm_note(
            &report.cautious_monotony,
            "only required with --cumulative",
        ));
    }
    if !report.abstract_ok() || (opts.cumulative && !report.cumulative_ok()) {
        notes.push("representation checks skipped: the axiom table has failures".into());
        return Ok(());
    }
    verdicts.push(nm.check_consequence_intersection()?);
    if opts.cumulative {
        verdicts.push(nm.check_cumulativity()?);
    }
    let built = if opts.cumulative {
        build_cumulative(&nm)
    } else {
        build_plain(&nm)
    };
    let rep = match built {
        Ok(rep) => Some(rep),
        Err(e @ Error::TooLarge { .. }) => {
            notes.push(format!("representation checks skipped: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(rep) = rep {
        verdicts.push(check_conflict_compilation(&nm, &rep));
        verdicts.push(verify_conservativity(&nm, &rep)?);
        if opts.cumulative {
            let unique = verify_unique_extension(&nm, &rep)?;
            verdicts.push(unique.per_premise);
            match unique.all_states {
                Some(check) => verdicts.push(check),
                None => notes.push(
                    "state-space uniqueness sweep skipped: the labelled universe is too large"
                        .into(),
                ),
            }
            match unique.rebuilt_cumulative {
                Some(check) => verdicts.push(check),
                None => notes
                    .push("skeptical rebuild skipped: the labelled universe is too large".into()),
            }
            notes.push(format!(
                "maximum extension depth {} (bound 3)",
                unique.max_depth
            ));
        } else {
            let shape = verify_extension_shape(&nm, &rep)?;
            verdicts.push(shape.check);
            notes.push(format!(
                "maximum extension depth {} (bound 2)",
                shape.max_depth
            ));
        }
    }
    if opts.samples > 0 {
        verdicts.push(sampled_round_trips(opts));
    }
    Ok(())
}

fn sampled_round_trips(opts: &VerifyOpts) -> CheckReport {
    let name = "sampled round trips";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut instances = 0;
    for i in 0..opts.samples {
        let nm = if opts.cumulative {
            sampling::cumulative_relation(&mut rng, 3)
        } else {
            sampling::generated_relation(&mut rng, 3)
        };
        let run = || -> Result<Vec<CheckReport>, Error> {
            let mut checks = Vec::new();
            if opts.cumulative {
                let rep = build_cumulative(&nm)?;
                checks.push(check_conflict_compilation(&nm, &rep));
                checks.push(verify_conservativity(&nm, &rep)?);
                let unique = verify_unique_extension(&nm, &rep)?;
                checks.push(unique.per_premise);
                checks.extend(unique.all_states);
                checks.extend(unique.rebuilt_cumulative);
            } else {
                let rep = build_plain(&nm)?;
                checks.push(check_conflict_compilation(&nm, &rep));
                checks.push(verify_conservativity(&nm, &rep)?);
                checks.push(verify_extension_shape(&nm, &rep)?.check);
            }
            Ok(checks)
        };
        match run() {
            Err(e) => return CheckReport::fail(name, instances, format!("sample {i}: {e}")),
            Ok(checks) => {
                for c in checks {
                    instances += c.instances;
                    if let Some(w) = c.failure {
                        return CheckReport::fail(
                            name,
                            instances,
                            format!("sample {i}: {}: {w}", c.name),
                        );
                    }
                }
            }
        }
    }
    CheckReport::pass(name, instances)
}

fn cmd_kripke(
    file: &std::path::Path,
    as_dot: bool,
    max_tokens: usize,
    json: bool,
) -> Result<u8, Failure> {
    let ds = expect_structure(load(file)?, "kripke")?;
    guard_tokens(ds.system().universe(), max_tokens)?;
    require_valid(&ds)?;
    let graph = ds.kripke()?;
    let u = ds.system().universe();
    if as_dot {
        print!("{}", dot::render(&graph, u));
    } else if json {
        print_json(&KripkeOutput {
            command: "kripke",
            states: graph.states.iter().map(|s| u.set_names(s)).collect(),
            edges: graph.edges.clone(),
            stable: graph.stable.clone(),
        });
    } else {
        for (i, s) in graph.states.iter().enumerate() {
            let targets: Vec<String> = graph.edges[i]
                .iter()
                .map(|&t| u.render_set(&graph.states[t]))
                .collect();
            let marker = if graph.stable[i] { " (stable)" } else { "" };
            println!("{} -> {}{}", u.render_set(s), targets.join(", "), marker);
        }
    }
    Ok(0)
}
