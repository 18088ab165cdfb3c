//! `sidon`: exact Sidon-set experiments from the command line.
//!
//! Exit codes: 0 success, 2 input (file, parse, domain), 3 capacity,
//! 4 parameter regime.

mod report;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sidon_core::constructions::{Construction, ConstructionSpec, Family};
use sidon_core::error::{INCIDENCE_BUDGET, MULTISET_BUDGET};
use sidon_core::extract::{extract_sidon, theorem_pipeline, SamplingParams};
use sidon_core::incidence::{
    hyperbolic_count_brute, hyperbolic_count_fast, theorem_ratio, IncidenceInstance,
};
use sidon_core::representation::energy;
use sidon_core::sidon::{is_bhg, measure_g};
use sidon_core::{
    format_rational, parse_rational, parse_rational_set, parse_set, Error, GroundSet, Mode,
    Rational, RationalSet,
};

use report::{nested, strings, write_atomic, Format, Report};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl CliError {
    fn io(e: impl fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }

    fn file(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Core(Error::Parse { .. } | Error::Domain(_)) => 2,
            CliError::Core(Error::Capacity { .. }) => 3,
            CliError::Core(Error::Parameter(_)) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => f.write_str(msg),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "sidon",
    version,
    about = "Exact Sidon-set, energy and incidence experiments"
)]
#[command(
    after_help = "Set files hold one integer (or p/q rational) per line; '#' starts a comment.\n\
    SIDON_BUDGET=<n> overrides every enumeration budget.\n\
    Exit codes: 0 ok, 2 input error, 3 capacity exceeded, 4 parameter out of regime."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Print the JSON report (canonical; exact numbers are decimal strings).
    #[arg(long, conflicts_with = "csv", global = true)]
    json: bool,
    /// Print a header row and one data row; columns are listed per command.
    #[arg(long, global = true)]
    csv: bool,
}

impl Output {
    fn format(&self) -> Format {
        match (self.json, self.csv) {
            (true, _) => Format::Json,
            (_, true) => Format::Csv,
            _ => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Additive energy E_{s,k} or multiplicative energy M_{s,k}.
    #[command(after_help = "CSV columns: op,s,k,mode,size,value")]
    Energy {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "add")]
        mode: Mode,
        #[command(flatten)]
        output: Output,
    },
    /// Decide whether a set is B_h[g] and certify its minimal g.
    #[command(
        after_help = "CSV columns: op,h,g,mode,size,holds,violation_value,g_measured,witness"
    )]
    Verify {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        g: u64,
        #[arg(long, default_value = "add")]
        mode: Mode,
        #[command(flatten)]
        output: Output,
    },
    /// Sample, delete and re-verify until the subset is B_h[g].
    #[command(
        after_help = "CSV columns: op,h,g,mode,seed,p,size,sample_size,subset_size,deletions,passes,witnesses,g_measured"
    )]
    Extract {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        g: u64,
        #[arg(long, default_value = "add")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusion probability, "p" or "p/q" in (0, 1].
        #[arg(long, value_parser = rational_arg, conflicts_with = "delta")]
        p: Option<Rational>,
        /// Exponent offset used to derive p = |A|^{1/h - 1 + delta}.
        #[arg(long, value_parser = rational_arg)]
        delta: Option<Rational>,
        /// Write the extracted subset here (atomically).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Decompose, extract on both sides and keep the larger certified subset.
    #[command(
        after_help = "CSV columns: op,h,g,seeds,size,side,pool,best_size,exponent_presentation_only,b_size,c_size"
    )]
    Pipeline {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        h: u32,
        #[arg(long, default_value_t = 1)]
        g: u64,
        /// Number of seeds in the schedule.
        #[arg(long, default_value_t = 4)]
        seeds: u64,
        /// First seed of the schedule; the schedule is seed, seed+1, ...
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the best subset here (atomically).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Generate one of the explicit set families.
    #[command(after_help = "Families and parameter order:\n  \
        prime_product SIZE_P SIZE_Q\n  power_sumset N M\n  balog_wooley M N\n  \
        incidence_lb_one N M   (M >= 2N >= 2)\n  incidence_lb_two N M   (N >= M + 1)\n\
        Files: PREFIX.A.txt (plus .P/.Q for factored families) or PREFIX.X.txt/.Y.txt.\n\
        CSV columns: op,family,param1,param2,sizes,lambda")]
    Construct {
        #[arg(long)]
        family: Family,
        /// The two family parameters, in the order listed below.
        #[arg(num_args = 2, required = true)]
        params: Vec<u32>,
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Count solutions of (x1 - y1)(x2 - y2) = lambda.
    #[command(after_help = "CSV columns: op,lambda,x_size,y_size,h,brute,in_regime,bound,k")]
    Incidence {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        lambda: Rational,
        /// Also run direct enumeration and require agreement.
        #[arg(long)]
        brute: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s)
}

/// `SIDON_BUDGET` overrides every default budget when set.
fn budget(default: u64) -> CliResult<u64> {
    match std::env::var("SIDON_BUDGET") {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Io(format!(
                "SIDON_BUDGET must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(default),
    }
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::file(path, e))
}

fn warn_duplicates(path: &Path, n: usize) {
    if n > 0 {
        eprintln!("warning: {n} duplicate(s) dropped from {}", path.display());
    }
}

fn load_set(path: &Path, report: &mut Report) -> CliResult<GroundSet> {
    let bytes = read_file(path)?;
    let parsed = parse_set(&bytes).map_err(|e| CliError::file(path, e))?;
    warn_duplicates(path, parsed.duplicates);
    report.input(&bytes, parsed.duplicates);
    Ok(parsed.set)
}

fn load_rational_set(path: &Path, report: &mut Report) -> CliResult<RationalSet> {
    let bytes = read_file(path)?;
    let parsed = parse_rational_set(&bytes).map_err(|e| CliError::file(path, e))?;
    warn_duplicates(path, parsed.duplicates);
    report.input(&bytes, parsed.duplicates);
    Ok(parsed.set)
}

fn run(command: Command, out: &mut impl Write) -> CliResult<()> {
    match command {
        Command::Energy {
            set,
            s,
            k,
            mode,
            output,
        } => {
            let mut r = Report::new("energy", &["op", "s", "k", "mode", "size", "value"]);
            let a = load_set(&set, &mut r)?;
            let e = energy(&a, s, k, mode)?;
            r.param("s", s).param("k", k).param("mode", mode);
            r.result("size", a.len()).result("value", e.value);
            r.emit(output.format(), out)
        }
        Command::Verify {
            set,
            h,
            g,
            mode,
            output,
        } => {
            let mut r = Report::new(
                "verify",
                &[
                    "op",
                    "h",
                    "g",
                    "mode",
                    "size",
                    "holds",
                    "violation_value",
                    "g_measured",
                    "witness",
                ],
            );
            let a = load_set(&set, &mut r)?;
            let b = budget(MULTISET_BUDGET)?;
            let verdict = is_bhg(&a, h, g, mode, b)?;
            r.param("h", h).param("g", g).param("mode", mode);
            r.result("size", a.len()).result("holds", verdict.holds);
            if let Some(v) = &verdict.violation {
                r.result("violation_value", &v.value);
                r.result_value("violation_multisets", nested(&v.multisets));
            }
            if !a.is_empty() {
                let cert = measure_g(&a, h, mode, b)?;
                r.result("g_measured", cert.g_measured)
                    .result("witness", &cert.witness);
                r.result_value("witness_multisets", nested(&cert.witness_multisets));
            }
            r.emit(output.format(), out)
        }
        Command::Extract {
            set,
            h,
            g,
            mode,
            seed,
            p,
            delta,
            out: path,
            output,
        } => {
            let mut r = Report::new(
                "extract",
                &[
                    "op",
                    "h",
                    "g",
                    "mode",
                    "seed",
                    "p",
                    "size",
                    "sample_size",
                    "subset_size",
                    "deletions",
                    "passes",
                    "witnesses",
                    "g_measured",
                ],
            );
            let a = load_set(&set, &mut r)?;
            let params = SamplingParams {
                p,
                seed,
                delta: delta.clone(),
            };
            let o = extract_sidon(&a, h, g, mode, &params, budget(MULTISET_BUDGET)?)?;
            if let Some(path) = &path {
                write_atomic(path, o.subset.serialize().as_bytes())?;
            }
            r.param("h", h)
                .param("g", g)
                .param("mode", mode)
                .param("seed", seed);
            if let Some(d) = &delta {
                r.param("delta", format_rational(d));
            }
            r.result("p", format_rational(&o.p))
                .result("size", a.len())
                .result("sample_size", o.sample_size)
                .result("subset_size", o.subset.len())
                .result("deletions", o.deletions)
                .result("passes", o.passes)
                .result("witnesses", o.witnesses);
            if let Some(c) = &o.certificate {
                r.result("g_measured", c.g_measured)
                    .result("witness", &c.witness);
                r.result_value("witness_multisets", nested(&c.witness_multisets));
            }
            r.result_value("subset", strings(o.subset.iter()));
            r.emit(output.format(), out)
        }
        Command::Pipeline {
            set,
            h,
            g,
            seeds,
            seed,
            out: path,
            output,
        } => {
            let mut r = Report::new(
                "pipeline",
                &[
                    "op",
                    "h",
                    "g",
                    "seeds",
                    "size",
                    "side",
                    "pool",
                    "best_size",
                    "exponent_presentation_only",
                    "b_size",
                    "c_size",
                ],
            );
            let a = load_set(&set, &mut r)?;
            let schedule: Vec<u64> = (0..seeds).map(|i| seed.wrapping_add(i)).collect();
            let o = theorem_pipeline(&a, h, g, &schedule, budget(MULTISET_BUDGET)?)?;
            if let Some(path) = &path {
                write_atomic(path, o.best.subset.serialize().as_bytes())?;
            }
            r.param("h", h).param("g", g);
            r.result_value("seeds", strings(&schedule));
            r.result("size", a.len())
                .result("side", o.side)
                .result("pool", format!("{:?}", o.pool).to_lowercase())
                .result("best_size", o.best.subset.len())
                .result("exponent_presentation_only", format!("{:.4}", o.exponent))
                .result("b_size", o.decomposition.b.len())
                .result("c_size", o.decomposition.c.len())
                .result("decomposition_objective", &o.decomposition.objective)
                .result("runs", o.runs);
            if let Some(c) = &o.best.certificate {
                r.result("g_measured", c.g_measured);
            }
            r.result_value("best", strings(o.best.subset.iter()));
            r.emit(output.format(), out)
        }
        Command::Construct {
            family,
            params,
            out: prefix,
            output,
        } => {
            let mut r = Report::new(
                "construct",
                &["op", "family", "param1", "param2", "sizes", "lambda"],
            );
            let spec = ConstructionSpec {
                family,
                params: (params[0], params[1]),
            };
            let (n1, n2) = family.param_names();
            r.param("family", family)
                .param("param1", params[0])
                .param("param2", params[1])
                .param("param_names", format!("{n1},{n2}"));
            let mut files: Vec<(&str, String)> = Vec::new();
            let mut sizes = Vec::new();
            match spec.build()? {
                Construction::Integer(f) => {
                    for (name, s) in [("A", &f.a), ("P", &f.p), ("Q", &f.q)] {
                        sizes.push(format!("{name}={}", s.len()));
                        files.push((name, s.serialize()));
                    }
                }
                Construction::Single(a) => {
                    sizes.push(format!("A={}", a.len()));
                    files.push(("A", a.serialize()));
                }
                Construction::Incidence(c) => {
                    for (name, s) in [("X", &c.x), ("Y", &c.y)] {
                        sizes.push(format!("{name}={}", s.len()));
                        files.push((name, s.serialize()));
                    }
                    r.result("lambda", format_rational(&c.lambda));
                }
            }
            r.result_value("sizes", strings(&sizes));
            if let Some(prefix) = prefix {
                let mut written = Vec::new();
                for (name, contents) in &files {
                    let path = PathBuf::from(format!("{prefix}.{name}.txt"));
                    write_atomic(&path, contents.as_bytes())?;
                    written.push(path.display().to_string());
                }
                r.result_value("files", strings(&written));
            }
            r.emit(output.format(), out)
        }
        Command::Incidence {
            x,
            y,
            lambda,
            brute,
            output,
        } => {
            let mut r = Report::new(
                "incidence",
                &[
                    "op",
                    "lambda",
                    "x_size",
                    "y_size",
                    "h",
                    "brute",
                    "in_regime",
                    "bound",
                    "k",
                ],
            );
            let xs = load_rational_set(&x, &mut r)?;
            let ys = load_rational_set(&y, &mut r)?;
            r.param("lambda", format_rational(&lambda));
            let inst = IncidenceInstance::new(xs, ys, lambda)?;
            let h = hyperbolic_count_fast(&inst);
            r.result("x_size", inst.x.len())
                .result("y_size", inst.y.len())
                .result("h", &h);
            if brute {
                let slow = hyperbolic_count_brute(&inst, budget(INCIDENCE_BUDGET)?)?;
                if slow != h {
                    return Err(CliError::Io(format!(
                        "internal mismatch: fast count {h} but enumeration gives {slow}"
                    )));
                }
                r.result("brute", "match");
            }
            let ratio = theorem_ratio(&inst);
            r.result("in_regime", ratio.in_regime)
                .result("bound", ratio.bound);
            if let Some(k) = ratio.k {
                r.result("k", k);
            }
            r.emit(output.format(), out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli.command, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
