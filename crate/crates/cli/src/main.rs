use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hyperstab::output::OutputDir;
use hyperstab_core::ffcount::{self, GroupVariant};
use hyperstab_core::linalg::{self, WorkingField};
use hyperstab_core::m0n;
use hyperstab_core::spectral::{self, ConfigurationType};
use hyperstab_core::stable::{self, MAX_POINTS};
use hyperstab_core::symfunc::schur_expand;
use hyperstab_verify::{self as suites, Budget, SuiteOptions, DEFAULT_SEED};

const CACHE_ENV: &str = "HYPERSTAB_CACHE";

#[derive(Parser)]
#[command(
    name = "hyperstab",
    version,
    about = "Stable cohomology of hyperelliptic curves on Hirzebruch surfaces"
)]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for output files and the manifest.
    #[arg(long, global = true, default_value = "hyperstab-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    N0,
    Npos,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Md => "md",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Formula,
    Stratified,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    G0,
    G0prime,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Rational,
    Prime,
}

#[derive(Subcommand)]
enum Command {
    /// Stable cohomology table up to a degree.
    Stable {
        #[arg(long)]
        max_deg: usize,
        #[arg(long, value_enum, default_value = "n0")]
        regime: RegimeArg,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        suite: String,
        #[arg(long, default_value = "medium")]
        budget: Budget,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Columns of the first page for a range of line counts.
    E1 {
        #[arg(long = "L", value_parser = parse_range)]
        lines: RangeInclusive<u32>,
        #[arg(long, default_value_t = 30)]
        d: i64,
        #[arg(long, default_value_t = 0)]
        n: i64,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Graded character table of the cohomology of M_{0,n}.
    M0n {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Point count of the moduli stack over F_q.
    Count {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, default_value = "medium")]
        budget: Budget,
    },
    /// Rank of the incidence bundle for one configuration type.
    Rankcheck {
        #[arg(long = "type", value_parser = parse_type)]
        ty: ConfigurationType,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = suites::RANK_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "rational")]
        field: FieldArg,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => {
            let v = num(s)?;
            v..=v
        }
    };
    if r.is_empty() || *r.start() == 0 {
        return Err(format!("empty or invalid range {s:?}"));
    }
    Ok(r)
}

fn parse_type(s: &str) -> Result<ConfigurationType, String> {
    let parts: Vec<u32> = s
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [k1, k2, h] => Ok(ConfigurationType::new(k1, k2, h)),
        _ => Err(format!("expected k1,k2,h, got {s:?}")),
    }
}

/// Outcome of a command: exit code 0 for success, 1 for a failed check,
/// 2 for usage or input errors.
enum Failure {
    Check(String),
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn warm_cache(max_points: u32) -> Result<(), Failure> {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        for n in 3..=max_points {
            m0n::load_or_compute(Path::new(&dir), n)?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Stable {
            max_deg,
            regime,
            format,
        } => {
            warm_cache((*max_deg as u32).min(MAX_POINTS))?;
            let (n, tag) = match regime {
                RegimeArg::N0 => (0, "n0"),
                RegimeArg::Npos => (1, "npos"),
            };
            let table = stable::cohomology_table(n, *max_deg)?;
            let text = match format {
                Format::Json => table.to_json() + "\n",
                Format::Md => table.to_markdown(),
                Format::Csv => table.to_csv(),
            };
            let mut out = OutputDir::create(&cli.out, "stable", None)?;
            out.input("max_deg", max_deg)
                .input("regime", tag)
                .input("format", format.ext());
            out.write(&format!("stable_{tag}_{max_deg}.{}", format.ext()), &text)?;
            out.finish()?;
            print!("{text}");
            Ok(())
        }
        Command::Verify {
            suite,
            budget,
            seed,
        } => {
            let opts = SuiteOptions {
                budget: *budget,
                seed: *seed,
            };
            let result = suites::run(suite, opts).ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown suite {suite:?}; expected one of {}",
                    suites::SUITES.join(", ")
                ))
            })?;
            let mut out = OutputDir::create(&cli.out, "verify", Some(*seed))?;
            out.input("suite", suite).input("budget", budget.0);
            out.write(&format!("verify_{suite}.json"), &result.to_json())?;
            out.finish()?;
            let report = result.report();
            print!("{report}");
            if result.passed() {
                Ok(())
            } else {
                Err(Failure::Check(format!("suite {suite} has failing checks")))
            }
        }
        Command::E1 {
            lines,
            d,
            n,
            format,
        } => {
            let v = linalg::SectionSpace::new(*d, *n)?.expected_dimension();
            warm_cache(*lines.end())?;
            let mut columns = Vec::new();
            if *lines.start() <= 2 {
                columns.push(spectral::main_table_small_column().as_column());
            }
            for l in lines.clone().filter(|&l| l >= 3) {
                columns.push(spectral::e1_column(l, v)?);
            }
            let text = match format {
                Format::Md => spectral::render_markdown(&columns),
                Format::Csv => spectral::render_csv(&columns),
                Format::Json => Err(Failure::Usage("e1 writes md or csv".into()))?,
            };
            let mut out = OutputDir::create(&cli.out, "e1", None)?;
            out.input("L", format!("{}..{}", lines.start(), lines.end()))
                .input("d", d)
                .input("n", n)
                .input("format", format.ext());
            out.write(
                &format!(
                    "e1_L{}-{}_d{d}_n{n}.{}",
                    lines.start(),
                    lines.end(),
                    format.ext()
                ),
                &text,
            )?;
            out.finish()?;
            print!("{text}");
            Ok(())
        }
        Command::M0n { n, format } => {
            let ep = match std::env::var_os(CACHE_ENV) {
                Some(dir) => m0n::load_or_compute(Path::new(&dir), *n)?,
                None => m0n::equivariant_poincare_m0n(*n)?,
            };
            let text = match format {
                Format::Json => ep.to_json() + "\n",
                Format::Md | Format::Csv => {
                    let mut rows = BTreeMap::new();
                    for (i, chi) in &ep.layers {
                        let expansion: Vec<String> = schur_expand(chi)?
                            .into_iter()
                            .filter(|(_, m)| *m != 0)
                            .map(|(lambda, m)| {
                                if m == 1 {
                                    format!("chi{lambda}")
                                } else {
                                    format!("{m} chi{lambda}")
                                }
                            })
                            .collect();
                        rows.insert(*i, (chi.dimension(), expansion));
                    }
                    if *format == Format::Md {
                        let mut s = format!("| i | dim | H^i(M_0,{n}) |\n|---|---|---|\n");
                        for (i, (dim, e)) in rows {
                            s.push_str(&format!("| {i} | {dim} | {} |\n", e.join(" + ")));
                        }
                        s
                    } else {
                        let mut s = String::from("i,partition,multiplicity\n");
                        for (i, chi) in &ep.layers {
                            for (lambda, m) in schur_expand(chi)? {
                                if m != 0 {
                                    s.push_str(&format!("{i},\"{lambda}\",{m}\n"));
                                }
                            }
                        }
                        s
                    }
                }
            };
            let mut out = OutputDir::create(&cli.out, "m0n", None)?;
            out.input("n", n).input("format", format.ext());
            out.write(&format!("m0n_{n}.{}", format.ext()), &text)?;
            out.finish()?;
            print!("{text}");
            Ok(())
        }
        Command::Count {
            g,
            l,
            q,
            method,
            variant,
            budget,
        } => {
            let (g, l, q) = (*g, *l, *q);
            let variant = match variant {
                Some(VariantArg::Full) => GroupVariant::Full,
                Some(VariantArg::G0) => GroupVariant::G0,
                Some(VariantArg::G0prime) => GroupVariant::G0Prime,
                None => ffcount::default_variant(g, l),
            };
            let mut out = OutputDir::create(&cli.out, "count", None)?;
            out.input("g", g)
                .input("l", l)
                .input("q", q)
                .input("variant", format!("{variant:?}"))
                .input("budget", budget.0);
            let mut text = format!("{}\n", ffcount::CSV_HEADER);
            let record = match method {
                Method::Brute => ffcount::enumerate_count(g, l, q, variant, budget.0)?,
                Method::Stratified => {
                    let strata = ffcount::stratified_count(g, l, q, budget.0)?;
                    let mut s = String::from("m,lambda,raw\n");
                    for (st, c) in &strata {
                        let parts: Vec<String> =
                            st.lambda.parts().iter().map(|p| p.to_string()).collect();
                        s.push_str(&format!("{},\"[{}]\",{c}\n", st.m, parts.join(",")));
                    }
                    out.write(&format!("strata_g{g}_l{l}_q{q}.csv"), &s)?;
                    let mut r = ffcount::enumerate_count(g, l, q, variant, budget.0)?;
                    let total: u128 = strata.values().sum();
                    if total != r.raw_count {
                        return Err(Failure::Check(format!(
                            "strata sum {total} != raw {}",
                            r.raw_count
                        )));
                    }
                    r.method = "stratified".into();
                    r
                }
                Method::Formula => ffcount::formula_count(g, l, q, variant)?,
            };
            text.push_str(&ffcount::csv_row(&record));
            text.push('\n');
            out.write(
                &format!("count_g{g}_l{l}_q{q}_{}.csv", record.method),
                &text,
            )?;
            out.finish()?;
            print!("{text}");
            if !record.roots_of_unity {
                eprintln!("note: q = {q} is not 1 mod n = {}", g + 1 - l);
            }
            if text.trim_end().ends_with(",false") {
                return Err(Failure::Check(
                    "count differs from the printed formula".into(),
                ));
            }
            Ok(())
        }
        Command::Rankcheck {
            ty,
            d,
            n,
            trials,
            seed,
            field,
        } => {
            let field = match field {
                FieldArg::Rational => WorkingField::Rational,
                FieldArg::Prime => WorkingField::Prime(linalg::default_prime(*d, *n)),
            };
            let report = linalg::verify_bundle_rank(ty, *d, *n, *trials, *seed, field)?;
            let text = report.to_json() + "\n";
            let mut out = OutputDir::create(&cli.out, "rankcheck", Some(*seed))?;
            out.input("type", ty)
                .input("d", d)
                .input("n", n)
                .input("trials", trials);
            out.write(
                &format!("rankcheck_{}-{}-{}_d{d}_n{n}.json", ty.k1, ty.k2, ty.h),
                &text,
            )?;
            out.finish()?;
            print!("{text}");
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Check(format!(
                    "{} of {trials} trials jumped",
                    report.failures.len()
                )))
            }
        }
    }
}
