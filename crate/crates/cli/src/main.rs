//! `resw`: batch runner for the finite residuated-logic workbench.
//!
//! Subcommands load algebras, frames, and Kripke models from JSON files,
//! run the exhaustive verifiers, and emit reports in human or structured
//! form. Exit codes: 0 all checks passed, 1 a check failed, 2 input error,
//! 3 enumeration budget refused.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use residuated::algebra;
use residuated::forcing;
use residuated::frames::{self, Conucleus, PStarLattice, SOMonoid};
use residuated::hierarchy::{self, Hierarchy, HierarchyError};
use residuated::logic;
use residuated::nuclei::{self, UnaryMap};
use residuated::report::{SweepConfig, DEFAULT_SEED};

use report::{CheckOut, Report, Status};

#[derive(Parser)]
#[command(name = "resw", version, about = "Finite residuated-logic workbench")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled law sweeps; echoed in every report.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Re-run the replay commands embedded in a report file (`-` for
    /// stdin); equivalent to the `replay` subcommand.
    #[arg(long, value_name = "REPORT")]
    replay: Option<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra file and run the full law suite.
    CheckAlgebra {
        path: PathBuf,
        /// Only report laws whose name contains this substring.
        #[arg(long)]
        law: Option<String>,
    },
    /// Enumerate all quantic nuclei on an algebra.
    EnumerateNuclei {
        path: PathBuf,
        #[arg(long, default_value_t = frames::DEFAULT_ENUM_BOUND)]
        bound: usize,
    },
    /// Quotient an algebra by the dense filter of a nucleus and verify the
    /// quotient theorems.
    Quotient {
        path: PathBuf,
        /// `identity`, `double-negation`, or omit to use the file's table.
        #[arg(long)]
        nucleus: Option<String>,
    },
    /// Emit the lattice of strongly hereditary sets of a frame as an
    /// algebra file on stdout.
    Pstar {
        /// Builtin frame name, frame file, or model file.
        frame: String,
        #[arg(long, default_value_t = frames::DEFAULT_ENUM_BOUND)]
        bound: usize,
    },
    /// Evaluate a formula on a model: prints the forcing set, or a boolean
    /// with `--at`.
    Force {
        model: PathBuf,
        /// A formula, or `@path` to read one formula per line (`#` comments).
        formula: String,
        /// Evaluate at a single world (by name), via the definitional
        /// clauses.
        #[arg(long)]
        at: Option<String>,
        /// Also run the definitional evaluator on the whole carrier and
        /// check it against the algebraic one.
        #[arg(long)]
        oracle: bool,
    },
    /// Compare the definitional and algebraic evaluators over every
    /// sentence up to a connective depth.
    Crosscheck {
        model: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Build the set hierarchy over a model's frame and report level sizes
    /// and graphs.
    Hierarchy {
        /// Model file, frame file, or builtin frame name.
        model: String,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Cache built levels here, keyed by the structure hash.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Check the forcing-set/Heyting-value translation at a level.
    VerifyTranslation {
        model: String,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Check the validity biconditional between a sentence and its
    /// possibility at a level.
    VerifyCorollary {
        model: String,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Re-run the replay commands embedded in a report's failures
    /// (`-` reads the report from stdin).
    Replay { path: String },
}

enum CliError {
    Input(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Budget(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(err: E) -> CliError {
    CliError::Input(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let command = match (cli.replay, cli.command) {
        (Some(path), None) => Command::Replay { path },
        (None, Some(command)) => command,
        (Some(_), Some(_)) => {
            eprintln!("error: pass either --replay or a subcommand, not both");
            return ExitCode::from(2);
        }
        (None, None) => {
            eprintln!("error: a subcommand is required (try `resw --help`)");
            return ExitCode::from(2);
        }
    };
    match dispatch(&command, cli.seed) {
        Ok(Some(report)) => {
            match cli.format {
                Format::Text => print!("{}", report.render_text(started.elapsed())),
                Format::Json => println!("{}", report.render_json()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn dispatch(command: &Command, seed: u64) -> Result<Option<Report>, CliError> {
    match command {
        Command::CheckAlgebra { path, law } => check_algebra(path, law.as_deref(), seed).map(Some),
        Command::EnumerateNuclei { path, bound } => enumerate_nuclei(path, *bound, seed).map(Some),
        Command::Quotient { path, nucleus } => quotient(path, nucleus.as_deref(), seed).map(Some),
        Command::Pstar { frame, bound } => {
            let (frame, _) = resolve_structure(frame)?;
            let pstar = PStarLattice::enumerate(&frame, *bound).map_err(frame_err)?;
            println!("{}", algebra::quantale_to_json(pstar.quantale()));
            Ok(None)
        }
        Command::Force { model, formula, at, oracle } => {
            force(model, formula, at.as_deref(), *oracle, seed).map(Some)
        }
        Command::Crosscheck { model, depth } => crosscheck(model, *depth, seed).map(Some),
        Command::Hierarchy { model, levels, budget, cache_dir } => {
            hierarchy_cmd(model, *levels, *budget, cache_dir.as_deref(), seed).map(Some)
        }
        Command::VerifyTranslation { model, levels, depth, budget, cache_dir } => {
            verify_cmd(model, *levels, *depth, *budget, cache_dir.as_deref(), seed, false).map(Some)
        }
        Command::VerifyCorollary { model, levels, depth, budget, cache_dir } => {
            verify_cmd(model, *levels, *depth, *budget, cache_dir.as_deref(), seed, true).map(Some)
        }
        Command::Replay { path } => replay(path, seed).map(Some),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read `{}`: {e}", path.display())))
}

fn frame_err(err: residuated::frames::FrameError) -> CliError {
    match err {
        residuated::frames::FrameError::BoundExceeded { .. } => CliError::Budget(err.to_string()),
        _ => CliError::Input(err.to_string()),
    }
}

fn nuclei_err(err: residuated::nuclei::NucleiError) -> CliError {
    match err {
        residuated::nuclei::NucleiError::BoundExceeded { .. } => CliError::Budget(err.to_string()),
        _ => CliError::Input(err.to_string()),
    }
}

fn forcing_err(err: residuated::forcing::ForcingError) -> CliError {
    match err {
        residuated::forcing::ForcingError::SweepTooLarge { .. } => {
            CliError::Budget(err.to_string())
        }
        residuated::forcing::ForcingError::Frame(inner) => frame_err(inner),
        _ => CliError::Input(err.to_string()),
    }
}

fn hierarchy_err(err: HierarchyError) -> CliError {
    match err {
        HierarchyError::BudgetExceeded { candidates, .. } => CliError::Budget(format!(
            "{err}; rerun with --budget {candidates}"
        )),
        HierarchyError::Forcing(inner) => forcing_err(inner),
        HierarchyError::Frame(inner) => frame_err(inner),
        HierarchyError::Nuclei(inner) => nuclei_err(inner),
        _ => CliError::Input(err.to_string()),
    }
}

fn check_algebra(path: &Path, law: Option<&str>, seed: u64) -> Result<Report, CliError> {
    let file = algebra::load_algebra(&read_file(path)?).map_err(input)?;
    let cfg = SweepConfig { seed, ..SweepConfig::default() };
    let mut report = Report::new(
        "check-algebra",
        json!({"path": path.display().to_string(), "law": law}),
        seed,
    );
    let laws = algebra::verify_quantale_laws(&file.quantale, &cfg);
    for check in &laws.checks {
        if let Some(filter) = law {
            if !check.law.contains(filter) {
                continue;
            }
        }
        let mut out = CheckOut {
            name: check.law.clone(),
            status: check.status.into(),
            counterexample: check.counterexample.clone().map(Value::String),
            replay: None,
        };
        if out.status == Status::Fail {
            out = out.with_replay(vec![
                "check-algebra".into(),
                path.display().to_string(),
                "--law".into(),
                check.law.clone(),
            ]);
        }
        report.push(out);
    }
    report.output = Some(json!({
        "carrier": file.quantale.n(),
        "idempotent": file.quantale.is_idempotent(),
    }));
    Ok(report)
}

fn enumerate_nuclei(path: &Path, bound: usize, seed: u64) -> Result<Report, CliError> {
    let file = algebra::load_algebra(&read_file(path)?).map_err(input)?;
    let q = &file.quantale;
    let found = nuclei::enumerate_quantic_nuclei(q, bound).map_err(nuclei_err)?;
    let mut report = Report::new(
        "enumerate-nuclei",
        json!({"path": path.display().to_string(), "bound": bound}),
        seed,
    );
    let mut all_characterized = true;
    let mut listed = Vec::new();
    for gamma in &found {
        let flags = nuclei::nucleus_predicates(q, gamma);
        all_characterized &= nuclei::check_nucleus_characterization(q, gamma);
        listed.push(json!({
            "table": gamma.table(),
            "idempotent_wrt_products": flags.idempotent_wrt_products,
            "respects_implications": flags.respects_implications,
            "respects_bottom": flags.respects_bottom,
            "standard": flags.standard,
        }));
    }
    report.push(if all_characterized {
        CheckOut::pass(format!("all {} nuclei satisfy the residual characterization", found.len()))
    } else {
        CheckOut::fail("residual characterization", json!("some enumerated map fails"))
    });
    report.output = Some(json!({"count": found.len(), "nuclei": listed}));
    Ok(report)
}

fn quotient(path: &Path, nucleus: Option<&str>, seed: u64) -> Result<Report, CliError> {
    let file = algebra::load_algebra(&read_file(path)?).map_err(input)?;
    let q = &file.quantale;
    let gamma = match nucleus {
        Some("identity") => UnaryMap::identity(q.n()),
        Some("double-negation") => nuclei::double_negation(q),
        Some(other) => {
            return Err(CliError::Input(format!(
                "unknown nucleus `{other}` (expected identity, double-negation, or a `nucleus` table in the file)"
            )))
        }
        None => match (&file.nucleus, &file.filter) {
            (Some(table), _) => UnaryMap::new(q, table.clone()).map_err(input)?,
            // Quotient by a raw filter: no nucleus, so no theorem suite.
            (None, Some(members)) => {
                let filter = nuclei::Filter::from_indices(q, members).map_err(input)?;
                let quot = nuclei::quotient(q, &filter).map_err(input)?;
                let mut report = Report::new(
                    "quotient",
                    json!({"path": path.display().to_string(), "filter": members}),
                    seed,
                );
                report.push(CheckOut::pass(format!(
                    "quotient by the given filter has {} classes",
                    quot.quotient.n()
                )));
                report.output = Some(json!({
                    "filter": filter.indices(),
                    "classes": quot.class_of,
                    "representatives": quot.representatives,
                    "quotient": algebra::quantale_to_json(&quot.quotient),
                }));
                return Ok(report);
            }
            (None, None) => {
                return Err(CliError::Input(
                    "no nucleus: pass --nucleus or add a `nucleus` or `filter` table to the file"
                        .into(),
                ))
            }
        },
    };
    if !nuclei::is_quantic_nucleus(q, &gamma) {
        return Err(CliError::Input(format!(
            "table {:?} is not a quantic nucleus on this algebra",
            gamma.table()
        )));
    }
    let cfg = SweepConfig { seed, ..SweepConfig::default() };
    let mut report = Report::new(
        "quotient",
        json!({"path": path.display().to_string(), "nucleus": gamma.table()}),
        seed,
    );
    let filter = nuclei::dense_filter(q, &gamma).map_err(input)?;
    let quot = nuclei::quotient(q, &filter).map_err(input)?;
    let laws = nuclei::verify_quotient_theorems(q, &gamma, &cfg).map_err(input)?;
    report.absorb_laws(&laws);
    report.output = Some(json!({
        "filter": filter.indices(),
        "classes": quot.class_of,
        "representatives": quot.representatives,
        "quotient": algebra::quantale_to_json(&quot.quotient),
    }));
    Ok(report)
}

fn force(
    model_path: &Path,
    formula_arg: &str,
    at: Option<&str>,
    oracle: bool,
    seed: u64,
) -> Result<Report, CliError> {
    let model = forcing::load_model_path(model_path).map_err(input)?;
    let texts: Vec<String> = if let Some(file) = formula_arg.strip_prefix('@') {
        read_file(Path::new(file))?
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect()
    } else {
        vec![formula_arg.to_string()]
    };
    let mut report = Report::new(
        "force",
        json!({
            "model": model_path.display().to_string(),
            "formula": formula_arg,
            "at": at,
            "oracle": oracle,
        }),
        seed,
    );
    let mut results = Vec::new();
    for text in &texts {
        let formula = logic::parse(text).map_err(input)?;
        let alg = model.forcing_worlds(&formula).map_err(input)?;
        let names: Vec<String> =
            alg.iter().map(|w| model.frame().name(w).to_string()).collect();
        let mut entry = json!({
            "formula": text,
            "forcing_set": names,
            "true_in_model": model.is_true(&formula).map_err(input)?,
        });
        if let Some(world_name) = at {
            let w = model.world_by_name(world_name).map_err(input)?;
            entry["forced_at"] =
                json!({ "world": world_name, "forces": model.forces(w, &formula).map_err(input)? });
        }
        if oracle {
            let def = model.forcing_mask_definitional(&formula).map_err(input)?;
            let def_names: Vec<String> =
                def.iter().map(|w| model.frame().name(w).to_string()).collect();
            entry["definitional_set"] = json!(def_names);
            report.push(if def == alg {
                CheckOut::pass(format!("evaluators agree on `{text}`"))
            } else {
                CheckOut::fail(
                    format!("evaluators agree on `{text}`"),
                    json!({"definitional": def_names, "algebraic": names}),
                )
            });
        }
        results.push(entry);
    }
    report.output = Some(Value::Array(results));
    Ok(report)
}

fn crosscheck(model_path: &Path, depth: usize, seed: u64) -> Result<Report, CliError> {
    let model = forcing::load_model_path(model_path).map_err(input)?;
    let result = model.cross_check(depth).map_err(forcing_err)?;
    let mut report = Report::new(
        "crosscheck",
        json!({"model": model_path.display().to_string(), "depth": depth}),
        seed,
    );
    if result.passed() {
        report.push(CheckOut::pass(format!(
            "definitional and algebraic evaluators agree on {} sentences",
            result.sentences_checked
        )));
    } else {
        for m in &result.mismatches {
            report.push(
                CheckOut::fail(
                    format!("evaluator mismatch on `{}`", m.sentence),
                    json!({"definitional": m.definitional, "algebraic": m.algebraic}),
                )
                .with_replay(vec![
                    "force".into(),
                    model_path.display().to_string(),
                    m.sentence.clone(),
                    "--oracle".into(),
                ]),
            );
        }
        report.push(CheckOut::fail(
            "cross-check summary",
            json!({
                "sentences": result.sentences_checked,
                "mismatches": result.mismatch_count,
            }),
        ));
    }
    Ok(report)
}

/// A hierarchy target is a builtin frame name, a frame file, or a model
/// file; returns the frame and the conucleus (identity by default).
fn resolve_structure(target: &str) -> Result<(SOMonoid, Option<Conucleus>), CliError> {
    if let Ok(frame) = frames::frame_by_name(target) {
        return Ok((frame, None));
    }
    let path = Path::new(target);
    let text = read_file(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("`{target}` is not valid JSON: {e}")))?;
    if value.get("frame").is_some() {
        let model = forcing::load_model_str(&text, path.parent()).map_err(input)?;
        return Ok((model.frame().clone(), Some(model.delta().clone())));
    }
    let file = frames::load_frame(&text).map_err(input)?;
    let delta = match file.conucleus {
        Some(table) => Some(Conucleus::new(&file.frame, table).map_err(input)?),
        None => None,
    };
    Ok((file.frame, delta))
}

fn build_hierarchy(
    target: &str,
    levels: usize,
    budget: u64,
    cache_dir: Option<&Path>,
) -> Result<Result<Hierarchy, &'static str>, CliError> {
    let (frame, delta) = resolve_structure(target)?;
    let delta = delta.unwrap_or_else(|| Conucleus::identity(&frame));
    let mut h = match Hierarchy::new(frame.clone(), delta.clone(), frames::DEFAULT_ENUM_BOUND) {
        Ok(h) => h,
        Err(HierarchyError::NotStandard { flag }) => return Ok(Err(flag)),
        Err(e) => return Err(hierarchy_err(e)),
    };
    let key = hierarchy::structure_hash(&frame, &delta);
    if let Some(dir) = cache_dir {
        for cached_level in (1..=levels).rev() {
            let path = dir.join(format!("{key:016x}-level{cached_level}.json"));
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Ok(snap) = serde_json::from_str(&text) {
                    if h.restore(snap).is_ok() {
                        break;
                    }
                }
            }
        }
    }
    match h.build_to(levels, budget) {
        Ok(_) => {}
        Err(HierarchyError::BudgetExceeded { candidates, budget }) => {
            return Err(CliError::Budget(format!(
                "level build needs {candidates} candidates, over the budget of {budget}; rerun with --budget {candidates}"
            )))
        }
        Err(e) => return Err(hierarchy_err(e)),
    }
    if let Some(dir) = cache_dir {
        let _ = std::fs::create_dir_all(dir);
        let path = dir.join(format!("{key:016x}-level{}.json", h.top_level()));
        if let Ok(text) = serde_json::to_string(&h.snapshot()) {
            let _ = std::fs::write(path, text);
        }
    }
    Ok(Ok(h))
}

fn hierarchy_cmd(
    target: &str,
    levels: usize,
    budget: u64,
    cache_dir: Option<&Path>,
    seed: u64,
) -> Result<Report, CliError> {
    let mut report = Report::new(
        "hierarchy",
        json!({"model": target, "levels": levels, "budget": budget}),
        seed,
    );
    let h = match build_hierarchy(target, levels, budget, cache_dir)? {
        Ok(h) => h,
        Err(flag) => {
            report.push(CheckOut::unmet(
                "hierarchy requires a standard conucleus",
                json!({ "failing_flag": flag }),
            ));
            report.status = Status::HypothesisUnmet;
            return Ok(report);
        }
    };
    report.push(CheckOut::pass(format!(
        "built levels 0..={} with sizes {:?}",
        h.top_level(),
        h.level_sizes()
    )));
    if let Some(at) = h.stabilized() {
        report.push(CheckOut::pass(format!("levels stabilize at {at}")));
    }

    let mut elements = Vec::new();
    for &id in h.level(h.top_level()).map_err(input)? {
        let e = h.element(id);
        let dom = h.level(e.level - 1).map_err(input)?;
        let graph: serde_json::Map<String, Value> = dom
            .iter()
            .zip(&e.graph)
            .map(|(&x, &set)| {
                let worlds: Vec<String> = h
                    .pstar()
                    .element(set)
                    .iter()
                    .map(|w| h.pstar().frame().name(w).to_string())
                    .collect();
                (hierarchy::element_name(x), json!(worlds))
            })
            .collect();
        elements.push(json!({
            "id": hierarchy::element_name(id),
            "level": e.level,
            "graph": graph,
        }));
    }
    report.output = Some(json!({
        "level_sizes": h.level_sizes(),
        "heyting_level_sizes": h.heyting_level_sizes(),
        "heyting_carrier": h.heyting().quotient.n(),
        "elements": elements,
    }));
    Ok(report)
}

fn verify_cmd(
    target: &str,
    levels: usize,
    depth: usize,
    budget: u64,
    cache_dir: Option<&Path>,
    seed: u64,
    corollary: bool,
) -> Result<Report, CliError> {
    let command = if corollary { "verify-corollary" } else { "verify-translation" };
    let mut report = Report::new(
        command,
        json!({"model": target, "levels": levels, "depth": depth, "budget": budget}),
        seed,
    );
    let h = match build_hierarchy(target, levels, budget, cache_dir)? {
        Ok(h) => h,
        Err(flag) => {
            report.push(CheckOut::unmet(
                "verification requires a standard conucleus",
                json!({ "failing_flag": flag }),
            ));
            report.status = Status::HypothesisUnmet;
            return Ok(report);
        }
    };
    let sweep = if corollary {
        h.verify_diamond_corollary(levels, depth).map_err(hierarchy_err)?
    } else {
        h.verify_translation(levels, depth).map_err(hierarchy_err)?
    };
    let name = if corollary {
        format!(
            "validity biconditional holds for {} universal-free sentences",
            sweep.sentences_checked
        )
    } else {
        format!(
            "translation identity holds for {} universal-free sentences",
            sweep.sentences_checked
        )
    };
    if sweep.passed() {
        report.push(CheckOut::pass(name));
    } else {
        report.push(CheckOut::fail(
            name,
            json!({"violations": sweep.violations, "examples": sweep.examples}),
        ));
    }
    report.output = Some(json!({
        "level_sizes": h.level_sizes(),
        "sentences_checked": sweep.sentences_checked,
        "violations": sweep.violations,
    }));
    Ok(report)
}

fn replay(path: &str, seed: u64) -> Result<Report, CliError> {
    let text = if path == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(input)?;
        buf
    } else {
        read_file(Path::new(path))?
    };
    let value: Value = serde_json::from_str(&text).map_err(input)?;
    let mut report = Report::new("replay", json!({ "path": path }), seed);
    let empty = Vec::new();
    let checks = value["checks"].as_array().unwrap_or(&empty);
    let mut ran = 0;
    for check in checks {
        let Some(argv) = check["replay"].as_array() else { continue };
        let args: Vec<String> =
            argv.iter().filter_map(|v| v.as_str().map(str::to_string)).collect();
        ran += 1;
        let parsed = Cli::try_parse_from(std::iter::once("resw".to_string()).chain(args.clone()))
            .map_err(|e| CliError::Input(format!("bad replay entry {args:?}: {e}")))?;
        let Some(command) = parsed.command else {
            return Err(CliError::Input(format!("replay entry {args:?} has no subcommand")));
        };
        match dispatch(&command, seed)? {
            Some(inner) => {
                let name = format!("replay `{}`", args.join(" "));
                if inner.passed() {
                    report.push(CheckOut::pass(name));
                } else {
                    report.push(CheckOut::fail(name, json!("replayed check failed")));
                }
            }
            None => report.push(CheckOut::pass(format!("replay `{}`", args.join(" ")))),
        }
    }
    if ran == 0 {
        report.push(CheckOut::pass("report contains no replayable failures"));
    }
    Ok(report)
}
