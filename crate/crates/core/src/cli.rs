//! Command-line front end.
//!
//! Settings resolve in three layers: built-in defaults (per subcommand),
//! then a flat `key = value` config file, then command-line flags. Keys in
//! the file are the flag names without the leading dashes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{run_sweep, ScenarioConfig, SweepResult, SweepVariable};
use crate::geometry::{build_ucya, build_ula, ArrayGeometry};
use crate::report::{write_csv, RunManifest, MANIFEST_KEYS};

#[derive(Debug, Parser)]
#[command(name = "mimo-crb", version, about = "Cramér-Rao bounds for semi-blind structured MIMO-OFDM channel estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Bounds versus SNR for a ULA and a UCyA.
    SweepSnr,
    /// Bounds versus the number of UCyA layers (ULA grows as N_UCA · N_3D).
    SweepLayers,
    /// Bounds versus the UCyA ring size (ULA grows as N_UCA · N_3D).
    SweepRing,
    /// One scenario at a fixed SNR on both arrays.
    Single,
    /// Print element coordinates of an array as CSV.
    DumpGeometry {
        /// UCyA with N_UCA elements per ring and N_3D layers.
        #[arg(long, num_args = 2, value_names = ["N_UCA", "N_3D"], conflicts_with = "ula")]
        ucya: Option<Vec<usize>>,
        /// ULA with N elements.
        #[arg(long, value_name = "N")]
        ula: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SweepSnr => "sweep-snr",
            Command::SweepLayers => "sweep-layers",
            Command::SweepRing => "sweep-ring",
            Command::Single => "single",
            Command::DumpGeometry { .. } => "dump-geometry",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub trials: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    #[arg(long, global = true)]
    pub n_tx: Option<String>,
    #[arg(long, global = true)]
    pub n_paths: Option<String>,
    #[arg(long, global = true)]
    pub k: Option<String>,
    #[arg(long, global = true)]
    pub k_pilot: Option<String>,
    #[arg(long, global = true)]
    pub k_data: Option<String>,
    #[arg(long, global = true)]
    pub n_ula: Option<String>,
    #[arg(long, global = true)]
    pub n_uca: Option<String>,
    #[arg(long = "n-3d", global = true)]
    pub n_3d: Option<String>,
    #[arg(long = "spacing-2d", global = true)]
    pub spacing_2d: Option<String>,
    #[arg(long = "spacing-3d", global = true)]
    pub spacing_3d: Option<String>,
    /// `paper` or `wirtinger`.
    #[arg(long, global = true)]
    pub derivative_convention: Option<String>,
    /// `radians` or `degrees`.
    #[arg(long, global = true)]
    pub angle_unit: Option<String>,
    /// `orthogonal` or `qpsk`.
    #[arg(long, global = true)]
    pub pilots: Option<String>,
    /// Relative eigenvalue cut-off of the pseudo-inverse.
    #[arg(long, global = true)]
    pub pinv_tolerance: Option<String>,
    /// `mean-trace` or `sum-trace`.
    #[arg(long, global = true)]
    pub reduction: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub values: Option<String>,
    #[arg(long, global = true)]
    pub threads: Option<String>,
    /// Output path; `-` writes to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file with defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Flags {
    fn settings(&self) -> Vec<(&'static str, &str)> {
        let pairs: [(&'static str, &Option<String>); 20] = [
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("snr-db", &self.snr_db),
            ("n-tx", &self.n_tx),
            ("n-paths", &self.n_paths),
            ("k", &self.k),
            ("k-pilot", &self.k_pilot),
            ("k-data", &self.k_data),
            ("n-ula", &self.n_ula),
            ("n-uca", &self.n_uca),
            ("n-3d", &self.n_3d),
            ("spacing-2d", &self.spacing_2d),
            ("spacing-3d", &self.spacing_3d),
            ("derivative-convention", &self.derivative_convention),
            ("angle-unit", &self.angle_unit),
            ("pilots", &self.pilots),
            ("pinv-tolerance", &self.pinv_tolerance),
            ("reduction", &self.reduction),
            ("values", &self.values),
            ("threads", &self.threads),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }
}

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub config: ScenarioConfig,
    /// Sweep values; for `single` the one SNR point.
    pub values: Vec<f64>,
    pub out: Option<PathBuf>,
}

impl PartialEq for Command {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("{0}")]
    Config(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Config(_) => 2,
        }
    }
}

fn defaults_for(command: &Command) -> (ScenarioConfig, Vec<f64>) {
    let config = ScenarioConfig::default();
    let values = match command {
        Command::SweepSnr => (-10..=30).step_by(5).map(f64::from).collect(),
        Command::SweepLayers => (1..=8).map(f64::from).collect(),
        Command::SweepRing => (8..=64).step_by(8).map(f64::from).collect(),
        Command::Single | Command::DumpGeometry { .. } => vec![config.snr_db],
    };
    (config, values)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse `{value}` for {key}")))
}

/// Applies one `key = value` setting.
pub fn apply_setting(config: &mut ScenarioConfig, values: &mut Vec<f64>, key: &str, value: &str) -> Result<()> {
    let key = key.trim().replace('_', "-");
    let v = value.trim();
    match key.as_str() {
        "trials" => config.trials = parse(&key, v)?,
        "seed" => config.master_seed = parse(&key, v)?,
        "snr-db" => config.snr_db = parse(&key, v)?,
        "n-tx" => config.num_tx = parse(&key, v)?,
        "n-paths" => config.num_paths = parse(&key, v)?,
        "k" => config.num_subcarriers = parse(&key, v)?,
        "k-pilot" => config.num_pilots = parse(&key, v)?,
        "k-data" => config.num_data = parse(&key, v)?,
        "n-ula" => config.arrays.n_ula = parse(&key, v)?,
        "n-uca" => config.arrays.n_uca = parse(&key, v)?,
        "n-3d" => config.arrays.n_3d = parse(&key, v)?,
        "spacing-2d" => config.arrays.spacing_2d = parse(&key, v)?,
        "spacing-3d" => config.arrays.spacing_3d = parse(&key, v)?,
        "derivative-convention" => config.derivative_convention = v.parse()?,
        "angle-unit" => config.angle_unit = v.parse()?,
        "pilots" => config.pilot_kind = v.parse()?,
        "pinv-tolerance" => config.pinv_tolerance = parse(&key, v)?,
        "reduction" => config.reduction = v.parse()?,
        "threads" => config.threads = Some(parse(&key, v)?),
        "values" => {
            *values = v
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse(&key, s))
                .collect::<Result<_>>()?;
        }
        other if MANIFEST_KEYS.contains(&other.replace('-', "_").as_str()) => {}
        other => return Err(Error::InvalidConfig(format!("unknown setting `{other}`"))),
    }
    Ok(())
}

/// Reads a flat `key = value` file; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected `key = value`", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// The resolved configuration as `key = value` pairs, accepted back by
/// `--config`.
pub fn config_echo(config: &ScenarioConfig, values: &[f64]) -> Vec<(String, String)> {
    let mut echo: Vec<(String, String)> = [
        ("trials", config.trials.to_string()),
        ("seed", config.master_seed.to_string()),
        ("snr-db", config.snr_db.to_string()),
        ("n-tx", config.num_tx.to_string()),
        ("n-paths", config.num_paths.to_string()),
        ("k", config.num_subcarriers.to_string()),
        ("k-pilot", config.num_pilots.to_string()),
        ("k-data", config.num_data.to_string()),
        ("n-ula", config.arrays.n_ula.to_string()),
        ("n-uca", config.arrays.n_uca.to_string()),
        ("n-3d", config.arrays.n_3d.to_string()),
        ("spacing-2d", config.arrays.spacing_2d.to_string()),
        ("spacing-3d", config.arrays.spacing_3d.to_string()),
        ("derivative-convention", config.derivative_convention.as_str().to_string()),
        ("angle-unit", config.angle_unit.as_str().to_string()),
        ("pilots", config.pilot_kind.as_str().to_string()),
        ("pinv-tolerance", config.pinv_tolerance.to_string()),
        ("reduction", config.reduction.as_str().to_string()),
        ("values", values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    if let Some(t) = config.threads {
        echo.push(("threads".into(), t.to_string()));
    }
    echo
}

/// Parses arguments (including the program name) into a resolved
/// invocation: defaults, then `--config`, then flags.
pub fn parse_config<I, T>(args: I) -> std::result::Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (mut config, mut values) = defaults_for(&cli.command);

    if let Some(path) = &cli.flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Config(Error::Io { path: path.clone(), source }))?;
        for (k, v) in parse_config_text(&text).map_err(CliError::Config)? {
            apply_setting(&mut config, &mut values, &k, &v).map_err(CliError::Config)?;
        }
    }
    for (k, v) in cli.flags.settings() {
        apply_setting(&mut config, &mut values, k, v).map_err(CliError::Config)?;
    }
    if matches!(cli.command, Command::Single) {
        values = vec![config.snr_db];
    }
    config.validate().map_err(CliError::Config)?;
    if values.is_empty() {
        return Err(CliError::Config(Error::InvalidConfig("values must not be empty".into())));
    }
    Ok(Invocation { command: cli.command, config, values, out: cli.flags.out })
}

fn sweep_variable(command: &Command) -> Option<SweepVariable> {
    match command {
        Command::SweepSnr | Command::Single => Some(SweepVariable::SnrDb),
        Command::SweepLayers => Some(SweepVariable::Layers),
        Command::SweepRing => Some(SweepVariable::RingSize),
        Command::DumpGeometry { .. } => None,
    }
}

fn dump_geometry(invocation: &Invocation, ucya: &Option<Vec<usize>>, ula: Option<usize>) -> Result<()> {
    let dims = &invocation.config.arrays;
    let geometry: ArrayGeometry = match (ucya.as_deref(), ula) {
        (_, Some(n)) => build_ula(n, dims.spacing_2d)?,
        (Some([ring, layers]), None) => build_ucya(*ring, *layers, dims.spacing_2d, dims.spacing_3d)?,
        _ => dims.ucya()?,
    };
    match invocation.out.as_deref() {
        None => geometry.write_csv(std::io::stdout().lock()),
        Some(p) if p == Path::new("-") => geometry.write_csv(std::io::stdout().lock()),
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|source| Error::Io { path: p.to_path_buf(), source })?;
            geometry.write_csv(std::io::BufWriter::new(file))
        }
    }
    .map_err(|source| Error::Io {
        path: invocation.out.clone().unwrap_or_else(|| "-".into()),
        source,
    })
}

fn progress_line(var: SweepVariable, value: f64, rows: &[crate::experiments::SweepRow]) -> String {
    let mut line = format!("{}={value}:", var.as_str());
    for r in rows {
        line.push_str(&format!(" {}/{}/{}={:.3e}", r.geometry, r.model, r.method, r.mean_crb));
    }
    line
}

/// Runs a sweep-type invocation and returns its result after writing the
/// CSV and manifest.
pub fn execute(invocation: &Invocation) -> Result<Option<SweepResult>> {
    let var = match (&invocation.command, sweep_variable(&invocation.command)) {
        (Command::DumpGeometry { ucya, ula }, _) => {
            dump_geometry(invocation, ucya, *ula)?;
            return Ok(None);
        }
        (_, Some(var)) => var,
        (_, None) => unreachable!("only dump-geometry lacks a sweep variable"),
    };
    let out = invocation
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", invocation.command.name())));
    let started_at = chrono::Utc::now().to_rfc3339();
    let result = run_sweep(&invocation.config, var, &invocation.values, |value, rows| {
        eprintln!("{}", progress_line(var, value, rows));
    })?;
    write_csv(&result, &out)?;
    let manifest = RunManifest {
        subcommand: invocation.command.name().to_string(),
        config_echo: config_echo(&invocation.config, &invocation.values),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        completed_at: chrono::Utc::now().to_rfc3339(),
        output_path: out.display().to_string(),
    };
    if out == Path::new("-") {
        eprint!("{}", manifest.render());
    } else {
        manifest.write(&manifest_path(&out))?;
    }
    Ok(Some(result))
}

/// `<out>.manifest`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let invocation = match parse_config(args) {
        Ok(inv) => inv,
        Err(CliError::Usage(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match execute(&invocation) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {} failed: {e}", invocation.command.name());
            1
        }
    }
}
