mod report;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relrw::analyze::laws::{oracle_cross_check, structural_equalities};
use relrw::analyze::{
    critical_pairs, diamond_check, kleisli_premise_check, lambda_diamond, law_suite, left_linear,
    nesting_check, orthogonality_check, sequentialisation_check, LamMode, LawConfig, Technique,
};
use relrw::lambda::{lam_full_image, lam_parallel_image, lam_seq_image, parse_lam, LamTerm};
use relrw::reduce::Mode;
use relrw::syntax::{parse_term_for, parse_trs_file};
use relrw::universe::enumerate;
use relrw::ESystem;
use serde_json::json;

use report::Report;

#[derive(Parser)]
#[command(name = "relrw", version, about = "Check rewriting systems for confluence and relational laws")]
struct Cli {
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reducts of a term under one of the reduction relations.
    Reduce {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long, value_enum, default_value_t = ReduceMode::Parallel)]
        mode: ReduceMode,
        /// Apply the reduction this many times.
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Law suites and confluence checks.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Operational orthogonality over the bounded universe.
    Orthogonal {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Overlaps between rule left-hand sides.
    CriticalPairs {
        #[arg(long)]
        file: PathBuf,
    },
    /// β-reduction on de Bruijn terms.
    Lambda {
        #[command(subcommand)]
        what: LambdaCommand,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Randomized relational laws for a system.
    Laws(LawArgs),
    /// Diamond property of a reduction, with the premises of the technique.
    Confluence {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = TechniqueArg::ParallelMoves)]
        technique: TechniqueArg,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Args)]
struct LawArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pair density of random relations (default: about two pairs per row).
    #[arg(long)]
    density: Option<f64>,
    /// Add the substitution law without its `∨ b` disjunct, which should fail.
    #[arg(long)]
    mutant: bool,
}

#[derive(Subcommand)]
enum LambdaCommand {
    /// Diamond check over every term up to a size and scope.
    Confluence {
        #[arg(long, default_value_t = 7)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        scope: usize,
        #[arg(long, value_enum, default_value_t = LamModeArg::Full)]
        mode: LamModeArg,
    },
    /// Reducts of a term, e.g. `(\.(\.0) 0) ((\.0) 1)`.
    Reduce {
        #[arg(long)]
        term: String,
        #[arg(long, value_enum, default_value_t = LamReduceArg::Parallel)]
        mode: LamReduceArg,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceMode {
    Ground,
    Seq,
    Parallel,
    Full,
    Scc,
}

impl From<ReduceMode> for Mode {
    fn from(m: ReduceMode) -> Mode {
        match m {
            ReduceMode::Ground => Mode::Ground,
            ReduceMode::Seq => Mode::Seq,
            ReduceMode::Parallel => Mode::Parallel,
            ReduceMode::Full => Mode::Full,
            ReduceMode::Scc => Mode::Scc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TechniqueArg {
    ParallelMoves,
    Tml,
}

#[derive(Clone, Copy, ValueEnum)]
enum LamModeArg {
    Parallel,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum LamReduceArg {
    Seq,
    Parallel,
    Full,
}

fn name_of(v: impl ValueEnum) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn load(path: &Path) -> anyhow::Result<ESystem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_trs_file(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.system)
}

/// Applies `image` `steps` times to the whole frontier.
fn iterate<T: Ord + Clone>(start: &T, steps: usize, image: impl Fn(&T) -> BTreeSet<T>) -> BTreeSet<T> {
    let mut current = BTreeSet::from([start.clone()]);
    for _ in 0..steps {
        current = current.iter().flat_map(&image).collect();
    }
    current
}

fn reduce(file: &Path, term: &str, mode: ReduceMode, steps: usize) -> anyhow::Result<Report> {
    let es = load(file)?;
    let t = parse_term_for(term, &es).context("parsing --term")?;
    let reducts = iterate(&t, steps, |s| Mode::from(mode).image(s, &es));
    let mut report = Report::new(
        "reduce",
        json!({"file": file.display().to_string(), "term": t.to_string(), "mode": name_of(mode), "steps": steps}),
    );
    report.line(format!("{} reducts of {t} ({} mode, {steps} step(s)):", reducts.len(), name_of(mode)));
    for r in &reducts {
        report.line(format!("  {r}"));
    }
    report.output = Some(json!({"reducts": reducts.iter().map(ToString::to_string).collect::<Vec<_>>()}));
    Ok(report)
}

fn check_laws(args: &LawArgs) -> anyhow::Result<Report> {
    let es = load(&args.file)?;
    if args.depth < 2 {
        bail!("--depth must be at least 2");
    }
    if let Some(p) = args.density {
        if !(0.0..=1.0).contains(&p) {
            bail!("--density must lie in [0, 1]");
        }
    }
    let config = LawConfig {
        depth: args.depth,
        trials: args.trials,
        seed: args.seed,
        density: args.density,
        include_mutant: args.mutant,
    };
    let mut report = Report::new(
        "check laws",
        json!({
            "file": args.file.display().to_string(),
            "depth": args.depth,
            "trials": args.trials,
            "seed": args.seed,
            "density": args.density,
            "mutant": args.mutant,
        }),
    );
    let u = enumerate(es.sig(), es.vars(), args.depth)?;
    let laws = law_suite(&es, &config)?;
    for r in &laws.results {
        report.law(r);
    }
    for r in structural_equalities(&es, &u, args.trials, args.seed)? {
        report.law(&r);
    }
    for r in oracle_cross_check(&es, &u)? {
        report.law(&r);
    }
    for r in sequentialisation_check(&es, args.depth, args.trials, args.seed)? {
        report.law(&r);
    }
    Ok(report)
}

fn check_confluence(file: &Path, technique: TechniqueArg, depth: usize) -> anyhow::Result<Report> {
    let es = load(file)?;
    let u = enumerate(es.sig(), es.vars(), depth)?;
    let tech = match technique {
        TechniqueArg::ParallelMoves => Technique::ParallelMoves,
        TechniqueArg::Tml => Technique::Tml,
    };
    let mut report = Report::new(
        "check confluence",
        json!({"file": file.display().to_string(), "technique": name_of(technique), "depth": depth}),
    );
    let ortho = orthogonality_check(&es, &u, tech)?;
    report.verdict(
        "unique-root-steps",
        "a[Δ]°;a[Δ] ≤ Δ",
        ortho.unique_root_steps.pass,
        ortho.unique_root_steps.witness_string(),
    );
    report.verdict(
        "redexes-persist",
        "a[Δ]°;compreff(R) ≤ a°[R]",
        ortho.redexes_persist.pass,
        ortho.redexes_persist.witness_string(),
    );
    if let Technique::ParallelMoves = tech {
        let nesting = nesting_check(&es, &u, tech)?;
        report.verdict("nesting", "a°[R] ≤ R;a°[Δ]", nesting.pass, nesting.witness_string());
    }
    let diamond = diamond_check(|t| tech.image(t, &es), u.terms());
    report.line(format!("{} terms, {} peaks checked", diamond.terms, diamond.peaks));
    report.verdict(
        "diamond",
        "R°;R ≤ R;R°",
        diamond.pass(),
        diamond
            .failure
            .map(|w| format!("peak {} with reducts {} and {}", w.peak, w.left, w.right)),
    );
    Ok(report)
}

fn orthogonal(file: &Path, depth: usize) -> anyhow::Result<Report> {
    let es = load(file)?;
    let u = enumerate(es.sig(), es.vars(), depth)?;
    let mut report = Report::new("orthogonal", json!({"file": file.display().to_string(), "depth": depth}));
    let ortho = orthogonality_check(&es, &u, Technique::ParallelMoves)?;
    report.verdict(
        "unique-root-steps",
        "a[Δ]°;a[Δ] ≤ Δ",
        ortho.unique_root_steps.pass,
        ortho.unique_root_steps.witness_string(),
    );
    report.verdict(
        "redexes-persist",
        "a[Δ]°;compreff(a^SP) ≤ a°[a^SP]",
        ortho.redexes_persist.pass,
        ortho.redexes_persist.witness_string(),
    );
    let kleisli = kleisli_premise_check(&es, &u, false)?;
    report.verdict(
        "kleisli-premise",
        "a[Δ]°;a^SP ≤ a^SP;a^SP°",
        kleisli.premise.pass,
        kleisli.premise.witness_string(),
    );
    report.line(format!(
        "truncation artifacts discarded: {}",
        ortho.redexes_persist.truncation_artifacts + kleisli.premise.truncation_artifacts
    ));
    Ok(report)
}

fn critical(file: &Path) -> anyhow::Result<Report> {
    let es = load(file)?;
    let pairs = critical_pairs(&es);
    let mut report = Report::new("critical-pairs", json!({"file": file.display().to_string()}));
    let linear = left_linear(&es);
    report.line(format!("{} critical pair(s)", pairs.len()));
    let mut listed = Vec::new();
    for cp in &pairs {
        report.line(format!(
            "  ({}, {}) from peak {} at {} (rules {} over {})",
            cp.left, cp.right, cp.peak, cp.position, cp.rules.1, cp.rules.0
        ));
        listed.push(json!({
            "peak": cp.peak.to_string(),
            "left": cp.left.to_string(),
            "right": cp.right.to_string(),
            "position": cp.position.to_string(),
            "outer_rule": cp.rules.0,
            "inner_rule": cp.rules.1,
        }));
    }
    report.verdict("left-linear", "no variable repeats in a left-hand side", linear, None);
    report.verdict(
        "no-critical-pairs",
        "no overlap between left-hand sides",
        pairs.is_empty(),
        pairs.first().map(|cp| format!("({}, {}) from peak {}", cp.left, cp.right, cp.peak)),
    );
    report.output = Some(json!({"critical_pairs": listed}));
    Ok(report)
}

fn lambda_confluence(size: usize, scope: usize, mode: LamModeArg) -> anyhow::Result<Report> {
    let lam_mode = match mode {
        LamModeArg::Parallel => LamMode::Parallel,
        LamModeArg::Full => LamMode::Full,
    };
    let mut report = Report::new(
        "lambda confluence",
        json!({"size": size, "scope": scope, "mode": name_of(mode)}),
    );
    let diamond = lambda_diamond(scope, size, lam_mode)?;
    report.line(format!("{} terms, {} peaks checked", diamond.terms, diamond.peaks));
    report.verdict(
        "diamond",
        "R°;R ≤ R;R°",
        diamond.pass(),
        diamond
            .failure
            .map(|w| format!("peak {} with reducts {} and {}", w.peak, w.left, w.right)),
    );
    Ok(report)
}

fn lambda_reduce(term: &str, mode: LamReduceArg, steps: usize) -> anyhow::Result<Report> {
    let t = parse_lam(term).context("parsing --term")?;
    let image: fn(&LamTerm) -> BTreeSet<LamTerm> = match mode {
        LamReduceArg::Seq => lam_seq_image,
        LamReduceArg::Parallel => lam_parallel_image,
        LamReduceArg::Full => lam_full_image,
    };
    let reducts = iterate(&t, steps, image);
    let mut report = Report::new(
        "lambda reduce",
        json!({"term": t.to_string(), "mode": name_of(mode), "steps": steps}),
    );
    report.line(format!("{} reducts of {t}:", reducts.len()));
    for r in &reducts {
        report.line(format!("  {r}"));
    }
    report.output = Some(json!({"reducts": reducts.iter().map(ToString::to_string).collect::<Vec<_>>()}));
    Ok(report)
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Reduce { file, term, mode, steps } => reduce(file, term, *mode, *steps),
        Command::Check { what } => match what {
            CheckCommand::Laws(args) => check_laws(args),
            CheckCommand::Confluence { file, technique, depth } => check_confluence(file, *technique, *depth),
        },
        Command::Orthogonal { file, depth } => orthogonal(file, *depth),
        Command::CriticalPairs { file } => critical(file),
        Command::Lambda { what } => match what {
            LambdaCommand::Confluence { size, scope, mode } => lambda_confluence(*size, *scope, *mode),
            LambdaCommand::Reduce { term, mode, steps } => lambda_reduce(term, *mode, *steps),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            report.finish(cli.timing.then(|| start.elapsed()));
            if cli.json {
                print!("{}", report.render_json());
            } else {
                print!("{}", report.render_text());
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
