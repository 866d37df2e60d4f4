use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gmshrink::bench::{self, BoundOverride, DenoiseOptions, RuleKind, SimulationConfig};
use gmshrink::elicitation::ElicitationConfig;
use gmshrink::risk::{Model, MstarOptions, RiskSettings, TABLE_MU};
use gmshrink::signals::{self, grid_point, NoiseSpec, SignalName};
use gmshrink::wavelet;

const DEFAULT_SEED: u64 = 12345;
const TABLE_EPS: [f64; 12] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];

#[derive(Parser)]
#[command(name = "gmshrink", version, about = "Gamma-minimax wavelet shrinkage toolkit")]
struct Cli {
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Denoise a signal read from CSV.
    Denoise(DenoiseArgs),
    /// Tabulate the largest bound at which the three-point prior is least favorable.
    Mstar(MstarArgs),
    /// Write the risk, squared bias and variance of a rule over [-m, m].
    Risk(RiskArgs),
    /// Run the Monte-Carlo AMSE comparison from a JSON config.
    Simulate(SimulateArgs),
    /// Write a test signal, optionally rescaled and with noise.
    Signal(SignalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModelChoice {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

#[derive(clap::Args)]
struct DenoiseArgs {
    /// One value per row, or `t,value` pairs; a header row is allowed.
    #[arg(long, short)]
    input: PathBuf,
    /// Destination CSV; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "1")]
    model: ModelArg,
    #[arg(long, default_value = "symmlet8")]
    wavelet: String,
    #[arg(long, default_value_t = 3)]
    j0: usize,
    #[arg(long, default_value_t = 6.0)]
    l: f64,
    #[arg(long, default_value_t = 2.5)]
    k: f64,
    /// Noise level to use instead of the MAD estimate.
    #[arg(long)]
    sigma: Option<f64>,
    /// Bound for every level (`2.5`) or for chosen levels (`5=1.2,6=2`).
    #[arg(long)]
    m_bound: Option<String>,
}

#[derive(clap::Args)]
struct MstarArgs {
    /// Comma-separated prior weights at zero.
    #[arg(long, value_delimiter = ',', default_values_t = TABLE_EPS)]
    eps_list: Vec<f64>,
    #[arg(long, value_enum, default_value = "both")]
    model: ModelChoice,
    /// Prior mean of the noise variance for model 2.
    #[arg(long, default_value_t = TABLE_MU)]
    mu: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RiskArgs {
    #[arg(long)]
    eps: f64,
    /// Bound of the parameter space; the least-favorable limit when omitted.
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, value_enum, default_value = "1")]
    model: ModelArg,
    #[arg(long, default_value_t = TABLE_MU)]
    mu: f64,
    /// Number of equispaced points on [-m, m].
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// JSON config.
    #[arg(long, short)]
    config: PathBuf,
    /// Receives replications.csv and summary.csv.
    #[arg(long, short = 'd')]
    out_dir: PathBuf,
    /// Master seed used when the config has none.
    #[arg(long, env = "GMX_SEED")]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct SignalArgs {
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Rescale to this SNR and add noise.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, env = "GMX_SEED")]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the rescaled noiseless signal here.
    #[arg(long)]
    clean_output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Core(gmshrink::Error),
}

impl From<gmshrink::Error> for Failure {
    fn from(e: gmshrink::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(msg) => f.write_str(msg),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let outcome = match cli.command {
        Command::Denoise(a) => cmd_denoise(a),
        Command::Mstar(a) => cmd_mstar(a),
        Command::Risk(a) => cmd_risk(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Signal(a) => cmd_signal(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_series(path: Option<&Path>, t: &[f64], values: &[f64]) -> CliResult {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(["t", "value"])?;
    for (t, v) in t.iter().zip(values) {
        w.write_record([fmt(*t), fmt(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `value` or `t,value` rows. A non-numeric first row is a header.
fn read_series(path: &Path) -> Result<(Option<Vec<f64>>, Vec<f64>), Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut width = None;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let fields = match parsed {
            Ok(f) => f,
            Err(_) if row == 0 => continue,
            Err(_) => {
                return Err(Failure::Input(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    row + 1
                )))
            }
        };
        if fields.len() > 2 || *width.get_or_insert(fields.len()) != fields.len() {
            return Err(Failure::Input(format!(
                "{}: row {} must have the same one or two columns as the first data row",
                path.display(),
                row + 1
            )));
        }
        if fields.len() == 2 {
            times.push(fields[0]);
        }
        values.push(*fields.last().expect("nonempty record"));
    }
    if values.is_empty() {
        return Err(Failure::Input(format!("{}: no data rows", path.display())));
    }
    Ok(((width == Some(2)).then_some(times), values))
}

fn cmd_denoise(a: DenoiseArgs) -> CliResult {
    let (times, y) = read_series(&a.input)?;
    let bank = wavelet::filter(&a.wavelet)?;
    let opts = DenoiseOptions {
        elicitation: ElicitationConfig::new(a.l, a.k)?,
        j0: a.j0,
        sigma: a.sigma,
        bound: match &a.m_bound {
            Some(s) => s.parse()?,
            None => BoundOverride::Elicited,
        },
    };
    let rule = match a.model {
        ModelArg::One => RuleKind::ModelI,
        ModelArg::Two => RuleKind::ModelII,
    };
    let out = bench::denoise(&y, rule, &bank, &opts)?;

    eprintln!("sigma_hat = {:.6}{}", out.sigma_hat, if out.sigma_floored { " (floored)" } else { "" });
    if rule == RuleKind::ModelII {
        eprintln!("mu = {:.6}", out.sigma_hat * out.sigma_hat);
    }
    eprintln!("{:>5}  {:>14}  {:>10}", "level", "m(j)", "eps(j)");
    for d in &out.levels {
        eprintln!("{:>5}  {:>14.6}  {:>10.6}", d.level, d.m, d.eps);
    }

    let t = times.unwrap_or_else(|| (0..y.len()).map(|i| grid_point(i, y.len())).collect());
    write_series(a.output.as_deref(), &t, &out.estimate)
}

fn cmd_mstar(a: MstarArgs) -> CliResult {
    let models: Vec<Model> = match a.model {
        ModelChoice::One => vec![Model::I],
        ModelChoice::Two => vec![Model::II { mu: a.mu }],
        ModelChoice::Both => vec![Model::I, Model::II { mu: a.mu }],
    };
    let settings = RiskSettings::default();
    let opts = MstarOptions::default();
    let mut w = csv::Writer::from_writer(sink(a.output.as_deref())?);
    w.write_record(["model", "eps", "mu", "mstar", "error"])?;
    let mut failed = None;
    for model in &models {
        let mu = match model {
            Model::I => String::new(),
            Model::II { mu } => fmt(*mu),
        };
        for &eps in &a.eps_list {
            match settings.mstar(eps, *model, &opts) {
                Ok(m) => w.write_record([model.label(), &fmt(eps), &mu, &fmt(m), ""])?,
                Err(e) => {
                    eprintln!("model {} eps {eps}: {e}", model.label());
                    w.write_record([model.label(), &fmt(eps), &mu, "", &e.to_string()])?;
                    failed = Some(e);
                }
            }
        }
    }
    w.flush()?;
    match failed {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn cmd_risk(a: RiskArgs) -> CliResult {
    let model = match a.model {
        ModelArg::One => Model::I,
        ModelArg::Two => Model::II { mu: a.mu },
    };
    let settings = RiskSettings::default();
    let m = match a.m {
        Some(m) => m,
        None => {
            let m = settings.mstar(a.eps, model, &MstarOptions::default())?;
            eprintln!("m = {m:.6} (least-favorable limit)");
            m
        }
    };
    let profile = settings.risk_profile(a.eps, m, model, a.grid)?;
    let mut out = sink(a.output.as_deref())?;
    profile.write_csv(&mut out)?;
    out.flush()?;
    match profile.shape {
        Some(shape) => {
            eprintln!("shape: {shape}");
            Ok(())
        }
        // Report why the classification failed; the profile is already written.
        None => Err(settings.risk_shape(a.eps, m, model).unwrap_err().into()),
    }
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Failure::Input(format!("{}: {e}", a.config.display())))?;
    let cfg = SimulationConfig::from_json_with_seed(&text, a.seed.unwrap_or(DEFAULT_SEED))?;
    let report = bench::run_simulation(&cfg)?;
    fs::create_dir_all(&a.out_dir)?;
    report.write_replications_csv(File::create(a.out_dir.join("replications.csv"))?)?;
    report.write_summary_csv(File::create(a.out_dir.join("summary.csv"))?)?;

    let mut out = io::stdout().lock();
    writeln!(out, "{:<18} {:>8} {:<15} {:>12} {:>12}", "signal", "snr", "rule", "amse", "median")?;
    for c in &report.cells {
        writeln!(
            out,
            "{:<18} {:>8.4} {:<15} {:>12.6} {:>12.6}",
            c.signal.as_str(),
            c.snr,
            c.rule.as_str(),
            c.amse,
            c.median
        )?;
    }
    Ok(())
}

fn cmd_signal(a: SignalArgs) -> CliResult {
    let name: SignalName = a.name.parse()?;
    let base = signals::generate(name, a.n)?;
    let t: Vec<f64> = (0..a.n).map(|i| grid_point(i, a.n)).collect();
    let Some(snr) = a.snr else {
        if a.clean_output.is_some() {
            return Err(Failure::Input("--clean-output needs --snr".into()));
        }
        return write_series(a.output.as_deref(), &t, base.samples());
    };
    let noise = NoiseSpec::new(a.sigma, a.seed.unwrap_or(DEFAULT_SEED))?;
    let (clean, noisy) = signals::noisy_test_signal(name, a.n, snr, &noise)?;
    if let Some(p) = &a.clean_output {
        write_series(Some(p), &t, clean.samples())?;
    }
    write_series(a.output.as_deref(), &t, noisy.samples())
}
