use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use simplicial_ld::count::{count_ordered, count_unordered, expected_ordered, expected_unordered, psi};
use simplicial_ld::extremal::{
    blowup_witness, brute_force_n, gamma_in_base, n_hat_bounds, solve_gamma, witness_constant, Bound, ExtremalQuery,
};
use simplicial_ld::harness::{
    exponent_report, mean_check, parse_alphas, parse_probs, tail_estimate, write_report_csv, write_tail_csv,
    ReportMode, TailConfigFile, TailExperimentConfig, Target,
};
use simplicial_ld::homology::{betti_vector, euler_characteristic, free_count, morse_slacks};
use simplicial_ld::model::{critical_profile, sample, ModelParams};
use simplicial_ld::mstar::{mstar, sweep, write_sweep_csv, MStarMode, MStarOptions};
use simplicial_ld::{Error, Result, SimplicialComplex};

#[derive(Parser)]
#[command(name = "sld", version, about = "Random simplicial complexes: copy counts, extremal bounds and upper tails")]
struct Cli {
    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    n: usize,
    /// Face probabilities p1,p2,... (decimals or fractions).
    #[arg(long, conflicts_with = "alpha")]
    p: Option<String>,
    /// Exponents a1,a2,... with p_i = n^(-a_i); "inf" for p_i = 0.
    #[arg(long)]
    alpha: Option<String>,
    /// Highest dimension sampled (default: length of the list).
    #[arg(long)]
    kmax: Option<usize>,
}

impl ModelArgs {
    fn params(&self, min_k: usize) -> Result<ModelParams> {
        match (&self.p, &self.alpha) {
            (Some(p), None) => parse_probs(self.n, p),
            (None, Some(a)) => {
                let alphas = parse_alphas(a)?;
                let k = self.kmax.unwrap_or(alphas.len().max(min_k));
                ModelParams::from_alphas(self.n, alphas, k)
            }
            _ => Err(Error::InvalidParams("give exactly one of --p and --alpha".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw one complex from K(n; p).
    Sample(ModelArgs),
    /// Count copies of a pattern in a host complex.
    Count {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        /// Count ordered copies (injective embeddings).
        #[arg(long)]
        ordered: bool,
    },
    /// Expected copy counts, optionally checked by simulation.
    Mean {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        pattern: PathBuf,
        /// Simulate this many complexes (at least 100) and compare.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Solve the vertex-weight LP and report the sandwich bounds.
    Gamma {
        #[arg(long)]
        pattern: PathBuf,
        /// Face bounds m0,m1,...; with --exponent-base these are exponents.
        #[arg(long)]
        bounds: String,
        #[arg(long)]
        exponent_base: Option<u64>,
        /// Also build the blow-up witness.
        #[arg(long)]
        witness: bool,
    },
    /// Exact extremal count by exhaustive search (tiny instances only).
    OracleN {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        bounds: String,
    },
    /// Threshold M* for the upper tail.
    Mstar {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        pattern: PathBuf,
        /// Use the exhaustive oracle instead of the LP surrogate (n ≤ 6).
        #[arg(long)]
        oracle: bool,
        /// Also minimise over subcomplexes with isolated vertices.
        #[arg(long)]
        include_isolated: bool,
    },
    /// M* over a grid of n.
    Sweep {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "50,100,200,400")]
        ngrid: String,
        #[arg(long)]
        include_isolated: bool,
    },
    /// Critical dimension and face-mean exponents.
    CriticalDim {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Betti numbers over GF(p).
    Betti {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        field: u32,
    },
    /// Faces of a dimension lying in no larger face.
    Free {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Monte Carlo estimate of an upper-tail probability.
    TailMc {
        /// JSON experiment file; the flags below are used without it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, value_enum)]
        target: Option<TargetArg>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Table of predicted tail exponents (no simulation).
    ExponentReport {
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "100,1000")]
        ngrid: String,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Report for Betti numbers at the critical dimension.
        #[arg(long)]
        betti: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    OrderedCount,
    SimplexCount,
    Betti,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::OrderedCount => Target::OrderedCount,
            TargetArg::SimplexCount => Target::SimplexCount,
            TargetArg::Betti => Target::Betti,
        }
    }
}

enum Output {
    Json(Value),
    Text(Vec<u8>),
}

fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    SimplicialComplex::read_json(path)
}

fn parse_grid(text: &str) -> Result<Vec<usize>> {
    text.split(',').map(|s| s.trim().parse().map_err(|_| Error::InvalidNumber(s.trim().into()))).collect()
}

fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    text.split(',').map(|s| s.trim().parse().map_err(|_| Error::InvalidNumber(s.trim().into()))).collect()
}

fn no_csv(format: Option<Format>, what: &str) -> Result<()> {
    match format {
        Some(Format::Csv) => Err(Error::InvalidConfig(format!("{what} has no CSV output"))),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let seed = cli.seed.unwrap_or(0);
    let fmt = cli.format;
    match &cli.command {
        Command::Sample(model) => {
            no_csv(fmt, "sample")?;
            let k = sample(&model.params(1)?, seed);
            Ok(Output::Json(serde_json::to_value(k.to_file()).map_err(Error::from)?))
        }
        Command::Count { host, pattern, ordered } => {
            no_csv(fmt, "count")?;
            let (h, g) = (read_complex(host)?, read_complex(pattern)?);
            let count = if *ordered { count_ordered(&h, &g) } else { count_unordered(&h, &g) };
            Ok(Output::Json(json!({ "ordered": ordered, "count": count })))
        }
        Command::Mean { model, pattern, trials } => {
            no_csv(fmt, "mean")?;
            let g = read_complex(pattern)?;
            let params = model.params(g.dimension().unwrap_or(0))?;
            let ps = psi(&params, &g);
            let mut out = json!({
                "expected_ordered": expected_ordered(&params, &g),
                "expected_unordered": expected_unordered(&params, &g),
                "psi": ps.value,
                "ln_psi": ps.ln_value,
                "automorphisms": g.automorphism_count(),
            });
            if let Some(t) = trials {
                out["check"] = serde_json::to_value(mean_check(&params, &g, *t, seed)?).map_err(Error::from)?;
            }
            Ok(Output::Json(out))
        }
        Command::Gamma { pattern, bounds, exponent_base, witness } => {
            no_csv(fmt, "gamma")?;
            let g = read_complex(pattern)?;
            let bounds = bounds.split(',').map(|b| Bound::parse(b, *exponent_base)).collect::<Result<Vec<_>>>()?;
            let query = ExtremalQuery::new(g, bounds)?;
            let solution = solve_gamma(&query)?;
            let sandwich = n_hat_bounds(&query, &solution);
            let mut out = solution.to_json();
            out["sandwich"] = sandwich.to_json();
            if let Some(base) = exponent_base {
                out["gamma_over_ln_base"] = json!(gamma_in_base(&solution, *base).map(|r| r.to_string()));
            }
            if *witness {
                let c = witness_constant(&query);
                let w = blowup_witness(&query, &solution, &c)?;
                out["witness"] = json!({
                    "constant": c.to_string(),
                    "block_sizes": w.block_sizes,
                    "simplex_counts": w.complex.simplex_counts().0,
                    "copies": count_unordered(&w.complex, &query.pattern),
                });
            }
            Ok(Output::Json(out))
        }
        Command::OracleN { pattern, bounds } => {
            no_csv(fmt, "oracle-n")?;
            let g = read_complex(pattern)?;
            let m = parse_u64_list(bounds)?;
            Ok(Output::Json(json!({ "bounds": m, "n": brute_force_n(&g, &m)? })))
        }
        Command::Mstar { model, pattern, oracle, include_isolated } => {
            no_csv(fmt, "mstar")?;
            let g = read_complex(pattern)?;
            let params = model.params(g.dimension().unwrap_or(0))?;
            let mode = if *oracle { MStarMode::OracleExact } else { MStarMode::LpSurrogate };
            let result = mstar(&params, &g, MStarOptions { mode, include_isolated: *include_isolated })?;
            Ok(Output::Json(result.to_json()))
        }
        Command::Sweep { pattern, alpha, ngrid, include_isolated } => {
            let g = read_complex(pattern)?;
            let opts = MStarOptions { mode: MStarMode::LpSurrogate, include_isolated: *include_isolated };
            let rows = sweep(&g, &parse_alphas(alpha)?, &parse_grid(ngrid)?, opts)?;
            match fmt {
                Some(Format::Json) => Ok(Output::Json(serde_json::to_value(&rows).map_err(Error::from)?)),
                _ => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&rows, &mut buf)?;
                    Ok(Output::Text(buf))
                }
            }
        }
        Command::CriticalDim { alpha, kmax } => {
            no_csv(fmt, "critical-dim")?;
            let alphas = parse_alphas(alpha)?;
            let k = kmax.unwrap_or(alphas.len());
            Ok(Output::Json(critical_profile(&alphas, k)?.to_json()))
        }
        Command::Betti { input, field } => {
            no_csv(fmt, "betti")?;
            let k = read_complex(input)?;
            let b = betti_vector(&k, *field)?;
            let dim = k.dimension().unwrap_or(0);
            let morse: Vec<_> = (0..=dim).map(|j| morse_slacks(&k, &b, j)).collect();
            Ok(Output::Json(json!({
                "field": field,
                "betti": b.betti,
                "simplex_counts": k.simplex_counts().0,
                "euler_characteristic": euler_characteristic(&k),
                "morse_slacks": morse,
            })))
        }
        Command::Free { input, dim } => {
            no_csv(fmt, "free")?;
            let k = read_complex(input)?;
            Ok(Output::Json(json!({ "dim": dim, "free": free_count(&k, *dim) })))
        }
        Command::TailMc { config, n, p, alpha, kmax, pattern, epsilon, trials, target, dim } => {
            let cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(Error::from)?;
                    let mut file: TailConfigFile = serde_json::from_str(&text).map_err(Error::from)?;
                    if let Some(s) = cli.seed {
                        file.seed = s;
                    }
                    file.resolve(path.parent().unwrap_or(Path::new(".")))?
                }
                None => {
                    let missing = |what: &str| Error::InvalidConfig(format!("--{what} is required without --config"));
                    let g = read_complex(pattern.as_deref().ok_or_else(|| missing("pattern"))?)?;
                    let model = ModelArgs { n: n.ok_or_else(|| missing("n"))?, p: p.clone(), alpha: alpha.clone(), kmax: *kmax };
                    TailExperimentConfig::new(
                        model.params(g.dimension().unwrap_or(0))?,
                        g,
                        epsilon.ok_or_else(|| missing("epsilon"))?,
                        trials.ok_or_else(|| missing("trials"))?,
                        seed,
                        target.map(Target::from).unwrap_or_default(),
                        *dim,
                    )?
                }
            };
            let record = tail_estimate(&cfg)?;
            match fmt {
                Some(Format::Json) => Ok(Output::Json(serde_json::to_value(&record).map_err(Error::from)?)),
                _ => {
                    let mut buf = Vec::new();
                    write_tail_csv(&record, &mut buf)?;
                    Ok(Output::Text(buf))
                }
            }
        }
        Command::ExponentReport { pattern, alpha, ngrid, epsilon, betti } => {
            let mode = if *betti { ReportMode::Betti } else { ReportMode::Copies };
            let g = match (pattern, betti) {
                (Some(p), _) => read_complex(p)?,
                (None, true) => SimplicialComplex::simplex(1),
                (None, false) => return Err(Error::InvalidConfig("--pattern is required unless --betti".into())),
            };
            let report = exponent_report(&g, &parse_alphas(alpha)?, &parse_grid(ngrid)?, *epsilon, mode)?;
            match fmt {
                Some(Format::Csv) => {
                    let mut buf = Vec::new();
                    write_report_csv(&report, &mut buf)?;
                    Ok(Output::Text(buf))
                }
                _ => Ok(Output::Json(serde_json::to_value(&report).map_err(Error::from)?)),
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, output: Output) -> io::Result<()> {
    let mut w: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match output {
        Output::Json(v) => {
            serde_json::to_writer_pretty(&mut w, &v)?;
            writeln!(w)?;
        }
        Output::Text(bytes) => w.write_all(&bytes)?,
    }
    w.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(output) => match emit(&cli.out, output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_guard() { 3 } else { 2 })
        }
    }
}
