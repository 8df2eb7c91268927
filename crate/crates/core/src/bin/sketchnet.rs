use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use ctx::Context;
use clap::{Parser, Subcommand, ValueEnum};

use sketchnet::bench::{gen_synthetic, hash_grid_spec, net_vs_linear_spec, projection_vs_sketch_spec, run_benchmark, BenchSpec, SynthConfig};
use sketchnet::construct::{build_bool_sketch_net, build_det_net, build_min_sketch_net, build_raw_bool_net};
use sketchnet::decoders::{rows_for_binary, rows_for_nonneg, rows_for_real};
use sketchnet::det_sketch::det_sketch;
use sketchnet::hash_family::HashFamily;
use sketchnet::montecarlo::{run_trials, TrialConfig, TrialMode};
use sketchnet::sketch::{bool_sketch, count_sketch};
use sketchnet::{Error, SparsePolynomialModel, SparseVector};

/// Sparse-vector sketches, decoders and the networks built on them.
#[derive(Parser)]
#[command(name = "sketchnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SketchType {
    Count,
    Bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum NetKind {
    /// AND units over a boolean sketch.
    Bool,
    /// Min gates over a count sketch (linear models only).
    Min,
    /// ReLU reads of the deterministic sketch.
    Det,
    /// AND units over the raw 0/1 input.
    Raw,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    ProjectionVsSketch,
    HashGrid,
    NetVsLinear,
}

#[derive(Subcommand)]
enum Command {
    /// Sketch a sparse vector read from a text file (`d` then `index:value` pairs).
    Sketch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = SketchType::Count)]
        kind: SketchType,
    },
    /// Deterministic sketch of a binary vector, printed as JSON.
    DetSketch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Monte Carlo failure rates of a decoder; CSV on stdout.
    Montecarlo {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Rows per hash; defaults to the value the guarantee asks for.
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated hash counts.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        t: Vec<usize>,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        /// and | min | min-interval | median
        #[arg(long, default_value = "and")]
        mode: String,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Build an explicit network for a model file and write it as JSON.
    BuildNet {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = NetKind::Bool)]
        kind: NetKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Sparsity budget for `det` networks.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset in the sparse text format.
    Gen {
        /// SynthConfig JSON; desk-scale defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the generating model as JSON.
        #[arg(long)]
        model_out: Option<PathBuf>,
        #[arg(long)]
        paper_scale: bool,
    },
    /// Run a benchmark grid and write the CSV report.
    Bench {
        #[arg(long, conflicts_with = "preset")]
        spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        paper_scale: bool,
        /// Write the resolved spec JSON here and exit.
        #[arg(long)]
        dump_spec: Option<PathBuf>,
    },
}

mod ctx {
    //! Tiny context helper so errors carry the file they came from.
    pub trait Context<T> {
        fn context(self, what: impl FnOnce() -> String) -> Result<T, sketchnet::Error>;
    }

    impl<T> Context<T> for std::io::Result<T> {
        fn context(self, what: impl FnOnce() -> String) -> Result<T, sketchnet::Error> {
            self.map_err(|e| sketchnet::Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", what()))))
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).context(|| path.display().to_string())
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).context(|| p.display().to_string()),
        None => io::stdout().write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sketch { input, seed, t, m, kind } => {
            let x = SparseVector::parse_text(&read(&input)?)?;
            let fam = HashFamily::seeded(seed, t, x.dim(), m)?;
            let y = match kind {
                SketchType::Count => count_sketch(&x, &fam)?,
                SketchType::Bool => bool_sketch(&x, &fam)?,
            };
            print!("{}", y.to_text());
        }
        Command::DetSketch { input, k } => {
            let x = SparseVector::parse_text(&read(&input)?)?;
            println!("{}", det_sketch(&x, k)?.to_json()?);
        }
        Command::Montecarlo { d, k, m, t, trials, mode, epsilon, c, seed } => {
            let mode: TrialMode = mode.parse()?;
            let m = m.unwrap_or(match mode {
                TrialMode::And | TrialMode::Min => rows_for_binary(k),
                TrialMode::MinInterval => rows_for_nonneg(k, epsilon),
                TrialMode::Median => rows_for_real(k, epsilon),
            });
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(["mode", "t", "m", "trials", "failures", "rate", "bound"])?;
            for t in t {
                let r = run_trials(&TrialConfig { d, k, m, t, trials, mode, epsilon, c, seed })?;
                w.write_record([
                    r.mode.to_string(),
                    r.t.to_string(),
                    r.m.to_string(),
                    r.trials.to_string(),
                    r.failures.to_string(),
                    r.rate.to_string(),
                    r.bound.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Command::BuildNet { model, kind, seed, t, m, k, out } => {
            let model = SparsePolynomialModel::from_json(&read(&model)?)?;
            let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::Parameter(format!("--{name} is required for this network kind")));
            let net = match kind {
                NetKind::Bool | NetKind::Min => {
                    let fam = HashFamily::seeded(seed, need(t, "t")?, model.d(), need(m, "m")?)?;
                    if matches!(kind, NetKind::Bool) {
                        build_bool_sketch_net(&model, &fam)?
                    } else {
                        build_min_sketch_net(&model, &fam)?
                    }
                }
                NetKind::Det => build_det_net(&model, need(k, "k")?)?,
                NetKind::Raw => build_raw_bool_net(&model)?,
            };
            write_out(out.as_ref(), &net.to_json()?)?;
        }
        Command::Gen { config, out, model_out, paper_scale } => {
            let mut cfg = match config {
                Some(p) => serde_json::from_str(&read(&p)?)?,
                None => SynthConfig::desk_scale(),
            };
            if paper_scale {
                cfg = cfg.with_sizes_of(&SynthConfig::paper_scale());
            }
            let ds = gen_synthetic(&cfg)?;
            let file = fs::File::create(&out).context(|| out.display().to_string())?;
            ds.write_text(io::BufWriter::new(file))?;
            if let Some(p) = model_out {
                fs::write(&p, ds.model.to_json()?).context(|| p.display().to_string())?;
            }
        }
        Command::Bench { spec, preset, out, paper_scale, dump_spec } => {
            let desk = SynthConfig::desk_scale();
            let mut spec = match (spec, preset) {
                (Some(p), _) => BenchSpec::from_json(&read(&p)?)?,
                (None, Some(Preset::ProjectionVsSketch)) => projection_vs_sketch_spec(&desk, 5),
                (None, Some(Preset::HashGrid)) => hash_grid_spec(&desk, &[10, 20, 55, 120], &[1, 2, 3, 4, 5, 6, 7, 8], 3),
                (None, Some(Preset::NetVsLinear)) => net_vs_linear_spec(&desk, &[1, 2, 4, 6, 8], 3),
                (None, None) => return Err(Error::Parameter("either --spec or --preset is required".into())),
            };
            if paper_scale {
                spec = spec.at_paper_scale();
            }
            if let Some(p) = dump_spec {
                fs::write(&p, serde_json::to_string_pretty(&spec)?).context(|| p.display().to_string())?;
                return Ok(());
            }
            let report = run_benchmark(&spec, |row| {
                eprintln!(
                    "{} {} m={:?} t={:?} dim={} rep={} train={:.5} test={:.5} ({:.1}s){}",
                    row.task,
                    row.scheme,
                    row.m,
                    row.t,
                    row.dim,
                    row.replicate,
                    row.train_mse,
                    row.test_mse,
                    row.runtime_s,
                    row.error.as_deref().map(|e| format!(" FAILED: {e}")).unwrap_or_default()
                );
            })?;
            let file = fs::File::create(&out).context(|| out.display().to_string())?;
            report.write_csv(file)?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
