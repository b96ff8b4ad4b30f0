//! Command-line driver: verification suites, catalog certification, word
//! folding, and Pluecker/Pfaffian computations, emitted as deterministic
//! JSON, CSV, or text reports.
//!
//! Exit codes: 0 all checks passed, 1 some check failed, 2 usage error,
//! 3 malformed input file.

use clap::{Parser, Subcommand, ValueEnum};
use flagpos::counterexamples::{build_counterexample, certify_construction, type_d_pfaffian_point};
use flagpos::linalg::{plucker_vector, ExactMatrix};
use flagpos::pinning::{verify_pinning_report, GroupDescriptor};
use flagpos::positivity::theorem_forward_report;
use flagpos::report::{CheckResult, Report};
use flagpos::sampling;
use flagpos::scalar::QuadScalar;
use flagpos::weyl::{
    self, coset_rep_first_entries_agree, distinguished_subexpression, enumerate_signed,
    longest_element, Direction, Subexpression, System, Word,
};
use rand::Rng;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "flagpos-cli", version, about = "Exact positivity checks for flag varieties of classical types")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Generator membership, one-parameter laws, and folding compatibility.
    VerifyPinning {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fold a type B or C word letterwise and report reducedness.
    Fold {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated simple-root indices.
        #[arg(long)]
        word: String,
    },
    /// Sample points from the positive parametrization at ranks K and check
    /// strict Pluecker positivity with isotropy.
    Theorem {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        k: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build one catalog entry, verify its nonnegativity, and certify that
    /// it admits no nonnegative extension.
    Counterexample {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        k: String,
    },
    /// Full Pluecker vector of the leading k columns of a matrix file.
    Plucker {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Weight coordinates of the six-parameter point on the orthogonal
    /// Grassmannian of D(4).
    PfaffianDemo {
        /// Six comma-separated scalar literals.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Weyl combinatorics suites.
    Weyl {
        #[command(subcommand)]
        suite: WeylSuite,
    },
}

#[derive(Subcommand)]
enum WeylSuite {
    /// Distinguished subexpressions of the longest word: uniqueness of the
    /// reduced one per element, folding stability, and coset first entries.
    Distinguished {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        /// Run over every signed permutation (n <= 3) instead of a sample.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 12)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure { code: 3, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let report = match cli.command {
        Command::VerifyPinning { system, n, seed } => {
            let g = parse_group(&system, n)?;
            verify_pinning_report(g, effective_seed(seed)?)
        }
        Command::Fold { system, n, word } => fold_report(&system, n, &word)?,
        Command::Theorem { system, n, k, samples, seed } => {
            let g = parse_group(&system, n)?;
            let k_set = parse_index_list(&k)?;
            validate_ranks(&k_set, g.rank())?;
            if samples == 0 {
                return Err(usage("--samples must be at least 1"));
            }
            theorem_forward_report(g, &k_set, samples, effective_seed(seed)?)
        }
        Command::Counterexample { system, n, k } => {
            let g = parse_group(&system, n)?;
            if !matches!(g, GroupDescriptor::B { .. } | GroupDescriptor::C { .. }) {
                return Err(usage("the catalog covers systems B and C"));
            }
            let k_set = parse_index_list(&k)?;
            let c = build_counterexample(g, &k_set).map_err(|e| usage(e.to_string()))?;
            certify_construction(&c)
        }
        Command::Plucker { matrix, k } => plucker_report(&matrix, k)?,
        Command::PfaffianDemo { t } => pfaffian_report(&t)?,
        Command::Weyl { suite } => match suite {
            WeylSuite::Distinguished { system, n, exhaustive, samples, seed } => {
                let sys = parse_bc_system(&system, n)?;
                if exhaustive && n > 3 {
                    return Err(usage("--exhaustive enumerates all masks; use n <= 3"));
                }
                if !exhaustive && samples == 0 {
                    return Err(usage("--samples must be at least 1"));
                }
                weyl_distinguished_report(sys, exhaustive, samples, effective_seed(seed)?)
            }
        },
    };
    emit(&report, cli.format, cli.output.as_deref())?;
    Ok(report.passed())
}

/// Explicit --seed wins; otherwise FLAGPOS_SEED; otherwise 42.
fn effective_seed(explicit: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var("FLAGPOS_SEED") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| usage(format!("FLAGPOS_SEED is not an integer: {raw}"))),
        Err(_) => Ok(42),
    }
}

fn parse_group(system: &str, n: usize) -> Result<GroupDescriptor, Failure> {
    match (system.to_ascii_uppercase().as_str(), n) {
        ("A", r) if r >= 1 => Ok(GroupDescriptor::A { ambient: r + 1 }),
        ("B", n) if n >= 2 => Ok(GroupDescriptor::B { n }),
        ("C", n) if n >= 2 => Ok(GroupDescriptor::C { n }),
        ("D", n) if n >= 3 => Ok(GroupDescriptor::D { n }),
        _ => Err(usage(format!("unsupported system {system}({n})"))),
    }
}

fn parse_bc_system(system: &str, n: usize) -> Result<System, Failure> {
    match (system.to_ascii_uppercase().as_str(), n) {
        ("B", n) if n >= 2 => Ok(System::B(n)),
        ("C", n) if n >= 2 => Ok(System::C(n)),
        _ => Err(usage(format!("need system B or C with n >= 2, got {system}({n})"))),
    }
}

fn parse_index_list(raw: &str) -> Result<Vec<usize>, Failure> {
    let out: Result<Vec<usize>, _> = raw.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match out {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(usage(format!("expected a comma-separated index list, got {raw:?}"))),
    }
}

fn validate_ranks(k_set: &[usize], rank: usize) -> Result<(), Failure> {
    let increasing = k_set.windows(2).all(|w| w[0] < w[1]);
    if !increasing || k_set[0] < 1 || *k_set.last().unwrap() > rank {
        return Err(usage(format!(
            "ranks must be strictly increasing inside [1, {rank}]"
        )));
    }
    Ok(())
}

fn parse_scalar_list(raw: &str) -> Result<Vec<QuadScalar>, Failure> {
    raw.split(',')
        .map(|p| QuadScalar::from_str(p.trim()).map_err(|e| usage(format!("bad scalar {p:?}: {e}"))))
        .collect()
}

fn emit(report: &Report, format: Format, output: Option<&Path>) -> Result<(), Failure> {
    let mut body = match format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match output {
        None => print!("{body}"),
        Some(p) => std::fs::write(p, body)
            .map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?,
    }
    Ok(())
}

fn fold_report(system: &str, n: usize, word: &str) -> Result<Report, Failure> {
    let sys = parse_bc_system(system, n)?;
    let letters = parse_index_list(word)?;
    let w = Word::new(sys, letters).map_err(|e| usage(e.to_string()))?;
    let folded = weyl::fold_word(&w).map_err(|e| usage(e.to_string()))?;
    let image_el = weyl::word_to_element(&folded);
    let is_w0a = image_el == longest_element(folded.system);
    let mut report = Report::new(
        "fold",
        json!({
            "system": sys.to_string(),
            "word": w.letters,
            "psi_image": folded.letters,
            "image_system": folded.system.to_string(),
            "image_is_type_a_longest": is_w0a,
        }),
        0,
        0,
    );
    report.push(CheckResult::from_bool(
        "input-reduced",
        weyl::is_reduced(&w),
        json!({"word": w.letters}),
    ));
    report.push(CheckResult::from_bool(
        "image-reduced",
        weyl::is_reduced(&folded),
        json!({"word": folded.letters}),
    ));
    Ok(report)
}

fn plucker_report(path: &Path, k: usize) -> Result<Report, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let m: ExactMatrix = serde_json::from_str(&text)
        .map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    if k < 1 || k > m.cols() {
        return Err(usage(format!(
            "--k must lie in [1, {}] for this matrix",
            m.cols()
        )));
    }
    let v = plucker_vector(&m.leading_columns(k)).map_err(|e| usage(e.to_string()))?;
    let coords: serde_json::Map<String, Value> = v
        .coords
        .iter()
        .map(|(set, val)| {
            let key = set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
            (key, Value::String(val.to_string()))
        })
        .collect();
    let mut report = Report::new(
        "plucker",
        json!({
            "matrix": path.display().to_string(),
            "ambient": m.rows(),
            "k": k,
            "coordinates": coords,
        }),
        0,
        0,
    );
    report.push(CheckResult::from_bool(
        "columns-span-rank-k",
        v.first_nonzero().is_some(),
        json!({"k": k}),
    ));
    Ok(report)
}

fn index_set_label(set: &[usize]) -> String {
    if set.is_empty() {
        "empty".into()
    } else {
        set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-")
    }
}

fn pfaffian_report(raw: &str) -> Result<Report, Failure> {
    let vals = parse_scalar_list(raw)?;
    let t: [QuadScalar; 6] = vals
        .try_into()
        .map_err(|_| usage("--t takes exactly six scalars"))?;
    let point = type_d_pfaffian_point(&t);
    let pf_json: serde_json::Map<String, Value> = point
        .pfaffians
        .iter()
        .map(|(set, val)| (index_set_label(set), Value::String(val.to_string())))
        .collect();
    let mut report = Report::new(
        "pfaffian-demo",
        json!({
            "t": point.t.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "lusztig_nonneg": point.lusztig_nonneg,
            "pfaffians": pf_json,
        }),
        0,
        0,
    );
    for (set, val) in &point.pfaffians {
        report.push(CheckResult::from_bool(
            format!("pfaffian.{}.strictly-positive", index_set_label(set)),
            val.sign() > 0,
            json!({"value": val.to_string()}),
        ));
    }
    Ok(report)
}

fn weyl_distinguished_report(sys: System, exhaustive: bool, samples: usize, seed: u64) -> Report {
    let n = sys.rank();
    let base = weyl::w0_word(sys);
    let all = enumerate_signed(n);
    let chosen: Vec<_> = if exhaustive {
        all
    } else {
        let mut rng = sampling::rng(seed);
        (0..samples).map(|_| all[rng.gen_range(0..all.len())].clone()).collect()
    };
    let mut report = Report::new(
        "weyl-distinguished",
        json!({"system": sys.to_string(), "exhaustive": exhaustive}),
        seed,
        chosen.len() as u64,
    );
    let len = base.letters.len();
    for u in &chosen {
        let label = u.one_line_string();
        let mut reduced_distinguished = 0usize;
        for bits in 0u64..(1 << len) {
            let mask: Vec<bool> = (0..len).map(|i| bits >> i & 1 == 1).collect();
            let s = Subexpression::new(base.clone(), mask);
            if s.kept() == u.length() && s.element() == *u && s.is_distinguished() {
                reduced_distinguished += 1;
            }
        }
        report.push(CheckResult::from_bool(
            format!("unique-reduced-distinguished.{label}"),
            reduced_distinguished == 1,
            json!({"count": reduced_distinguished}),
        ));
        let folded_ok = distinguished_subexpression(u, &base, Direction::Rightmost)
            .and_then(|s| weyl::fold_subexpression(&s))
            .map(|f| f.is_distinguished())
            .unwrap_or(false);
        report.push(CheckResult::from_bool(
            format!("fold-distinguished.{label}"),
            folded_ok,
            json!({"element": label}),
        ));
    }
    for k in 1..=n {
        let k_set: Vec<usize> = (k..=n).collect();
        report.push(CheckResult::from_bool(
            format!("first-entries-agree.K{}", index_set_label(&k_set)),
            coset_rep_first_entries_agree(sys, &k_set),
            json!({"K": k_set}),
        ));
    }
    report
}
