//! Command-line front end: sweeps over SNR and diversity order, regime
//! reports, infinite-diversity limits and the three figure data sets.
//!
//! Exit codes: 0 success, 2 usage error, 3 math domain error, 4 I/O error.

mod output;
mod settings;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::asymptotic::{extend_to_l, infinite_l_asymptotic, AsymptoticEed};
use crate::channel::{build_correlation, classify_regime, transit_point, CorrelationSpec};
use crate::error::Error;
use crate::montecarlo::estimate_grid;

pub use output::{fmt_float, Row, Table, HEADER, NOTES};
pub use settings::{db_to_linear, parse_l_list, Emit, Settings, SnrGrid};

/// Relative standard error above which a Monte Carlo value is flagged.
pub const REL_STDERR_WARN: f64 = 0.05;

/// Diversity orders of the frequency-diversity figures.
pub const FIGURE_L_VALUES: [u32; 5] = [1, 2, 3, 4, 8];

/// Exponential correlation coefficients of the correlation figure.
pub const FIGURE_R_VALUES: [f64; 5] = [0.0, 0.3, 0.5, 0.7, 0.9];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Math(Error),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Math(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => CliError::Usage(msg),
            Error::Io(e) => CliError::Io(e),
            other => CliError::Math(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eed",
    version,
    about = "Optimum expected distortion of wideband MIMO analog transmission",
    after_help = "SNR values are given in dB and converted as rho = 10^(snr_db/10).\n\
                  EED_THREADS sets the number of worker threads (default: logical CPUs)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CSV sweep over the SNR grid and diversity orders
    Sweep(CommonArgs),
    /// Regime, beta, s and transit point for one diversity order
    Regime(CommonArgs),
    /// Infinite-diversity bound: Monte Carlo and asymptotic
    Limit(CommonArgs),
    /// Write fig1.csv, fig2.csv and fig3.csv into the --out directory
    Figures(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat key=value file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nt: Option<u32>,
    #[arg(long)]
    pub nr: Option<u32>,
    /// Source-to-channel bandwidth ratio
    #[arg(long)]
    pub eta: Option<f64>,
    /// Source power
    #[arg(long)]
    pub ps: Option<f64>,
    /// Diversity orders, comma separated
    #[arg(long)]
    pub l: Option<String>,
    /// SNR grid in dB, start:stop:step (stop included)
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    /// Monte Carlo sample count
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent generator streams (fixes the result for a given seed)
    #[arg(long)]
    pub streams: Option<u32>,
    /// Outputs, subset of mc,asy,inf_mc,inf_asy
    #[arg(long)]
    pub emit: Option<String>,
    /// identity, exp:<r> or eig:<s1>,<s2>,...
    #[arg(long)]
    pub corr: Option<String>,
    /// Output file (directory for `figures`); stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn settings(&self) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s.apply_file(path)?;
        }
        if let Some(v) = self.nt {
            s.nt = v;
        }
        if let Some(v) = self.nr {
            s.nr = v;
        }
        if let Some(v) = self.eta {
            s.eta = v;
        }
        if let Some(v) = self.ps {
            s.ps = v;
        }
        if let Some(v) = self.samples {
            s.samples = v;
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.streams {
            s.streams = v;
        }
        for (key, value) in [
            ("l", &self.l),
            ("snr_db", &self.snr_db),
            ("emit", &self.emit),
            ("corr", &self.corr),
        ] {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        Ok(s)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("eed: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    let Ok(value) = std::env::var("EED_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => eprintln!("eed: ignoring EED_THREADS={value:?}, expected a positive integer"),
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(args) => write_output(args.out.as_deref(), &cmd_sweep(&args.settings()?)?),
        Command::Regime(args) => {
            let mut text = cmd_regime(&args.settings()?)?;
            text.push('\n');
            write_output(args.out.as_deref(), &text)
        }
        Command::Limit(args) => write_output(args.out.as_deref(), &cmd_limit(&args.settings()?)?),
        Command::Figures(args) => {
            let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
            cmd_figures(&args.settings()?, &dir).map(|_| ())
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Keeps a distortion value only when it lies in `(0, ps]`.
fn checked_distortion(value: f64, ps: f64) -> Option<f64> {
    (value > 0.0 && value <= ps && value.is_finite()).then_some(value)
}

fn evaluate_asy(asy: &AsymptoticEed, rho: f64, ps: f64) -> std::result::Result<f64, String> {
    match asy.ln_evaluate(rho) {
        Ok(ln) => checked_distortion(ln.exp(), ps)
            .ok_or_else(|| format!("value exp({}) outside (0, ps]", fmt_float(ln))),
        Err(e) => Err(e.to_string()),
    }
}

/// Appends the sweep rows of `settings` to `table`, each prefixed with `key`
/// when the table has a key column.
pub fn sweep_into(
    settings: &Settings,
    table: &mut Table,
    key: Option<&str>,
) -> Result<(), CliError> {
    let emit = settings.emit;
    let base = settings.config(1)?;
    let configs = settings
        .l_values
        .iter()
        .map(|&l| settings.config(l))
        .collect::<Result<Vec<_>, _>>()?;
    let snrs = settings.snr.points_db();
    let rhos: Vec<f64> = snrs.iter().map(|&db| db_to_linear(db)).collect();
    let corr = &settings.corr;

    let mc = if emit.any_mc() {
        let l_list: &[u32] = if emit.mc { &settings.l_values } else { &[] };
        Some(estimate_grid(
            &base,
            corr,
            &rhos,
            l_list,
            &settings.sample_spec()?,
        )?)
    } else {
        None
    };
    let asy = if emit.asy {
        configs
            .iter()
            .map(|c| extend_to_l(c, corr).map(Some))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        vec![None; configs.len()]
    };
    let inf_asy = if emit.inf_asy {
        let (_, sigma) = build_correlation(corr, base.n_min() as usize)?;
        Some(infinite_l_asymptotic(&base, &sigma)?)
    } else {
        None
    };

    let ps = settings.ps;
    let push = |table: &mut Table, row: &Row| match key {
        Some(k) => table.push_keyed(k, row),
        None => table.push(row),
    };
    let tag = |snr: f64, l: Option<u32>| {
        let prefix = key.map(|k| format!("key={k}, ")).unwrap_or_default();
        match l {
            Some(l) => format!("{prefix}snr_db={snr}, L={l}"),
            None => format!("{prefix}snr_db={snr}, L=inf"),
        }
    };

    for (i, (&snr_db, &rho)) in snrs.iter().zip(&rhos).enumerate() {
        for (k, config) in configs.iter().enumerate() {
            if !(emit.mc || emit.asy) {
                break;
            }
            let regime = classify_regime(config);
            let mut row = Row {
                snr_db,
                rho,
                l: Some(config.l()),
                regime: Some(regime.kind.name()),
                s: regime.kind.s(),
                ..Row::default()
            };
            if let Some(a) = &asy[k] {
                row.delta = Some(a.delta);
                row.mu_ln = Some(a.mu_ln());
                row.log_rho_power = Some(a.log_rho_power);
                match evaluate_asy(a, rho, ps) {
                    Ok(v) => row.ed_asy = Some(v),
                    Err(why) => table.warn(&format!(
                        "{}: ed_asy left empty, {why}",
                        tag(snr_db, Some(config.l()))
                    )),
                }
            }
            if let (Some(points), true) = (&mc, emit.mc) {
                let est = &points[i].eed[k];
                row.n_samples = Some(est.n_samples);
                match checked_distortion(est.mean, ps) {
                    Some(mean) => {
                        row.ed_mc = Some(mean);
                        row.ed_mc_stderr = Some(est.std_error);
                        let rel = est.relative_error();
                        if rel > REL_STDERR_WARN {
                            table.warn(&format!(
                                "{}: ed_mc relative standard error {} exceeds {REL_STDERR_WARN}",
                                tag(snr_db, Some(config.l())),
                                fmt_float(rel)
                            ));
                        }
                    }
                    None => table.warn(&format!(
                        "{}: ed_mc left empty, mean {} outside (0, ps]",
                        tag(snr_db, Some(config.l())),
                        fmt_float(est.mean)
                    )),
                }
            }
            push(table, &row);
        }
        if emit.any_limit() {
            let mut row = Row {
                snr_db,
                rho,
                ..Row::default()
            };
            if let (Some(points), true) = (&mc, emit.inf_mc) {
                let bound = &points[i].infinite_bound;
                row.n_samples = Some(bound.n_samples);
                match checked_distortion(bound.mean, ps) {
                    Some(v) => row.inf_mc = Some(v),
                    None => table.warn(&format!(
                        "{}: inf_mc left empty, value {} outside (0, ps]",
                        tag(snr_db, None),
                        fmt_float(bound.mean)
                    )),
                }
            }
            if let Some(a) = &inf_asy {
                row.delta = Some(a.delta);
                row.mu_ln = Some(a.mu_ln());
                row.log_rho_power = Some(a.log_rho_power);
                match evaluate_asy(a, rho, ps) {
                    Ok(v) => row.inf_asy = Some(v),
                    Err(why) => {
                        table.warn(&format!("{}: inf_asy left empty, {why}", tag(snr_db, None)))
                    }
                }
            }
            push(table, &row);
        }
    }
    Ok(())
}

/// One CSV row per `(snr_db, L)`, plus one limit row per SNR point (with
/// empty `L`) when an infinite-diversity output is requested.
pub fn cmd_sweep(settings: &Settings) -> Result<String, CliError> {
    let mut table = Table::new();
    sweep_into(settings, &mut table, None)?;
    Ok(table.into_string())
}

/// Infinite-diversity bound per SNR point, Monte Carlo and asymptotic.
pub fn cmd_limit(settings: &Settings) -> Result<String, CliError> {
    let mut s = settings.clone();
    s.emit = Emit {
        mc: false,
        asy: false,
        inf_mc: true,
        inf_asy: true,
    };
    cmd_sweep(&s)
}

/// One-line report, e.g. `low, beta=10, L*=4, L>=L*: no`.
pub fn cmd_regime(settings: &Settings) -> Result<String, CliError> {
    let [l] = settings.l_values.as_slice() else {
        return Err(CliError::Usage(
            "regime takes exactly one diversity order".into(),
        ));
    };
    let config = settings.config(*l)?;
    let regime = classify_regime(&config);
    let l_star = transit_point(&config);
    let mut parts = vec![regime.kind.name().to_string()];
    if let Some(s) = regime.kind.s() {
        parts.push(format!("s={s}"));
    }
    parts.push(format!("beta={}", regime.beta));
    parts.push(format!("L*={l_star}"));
    parts.push(format!(
        "L>=L*: {}",
        if *l >= l_star { "yes" } else { "no" }
    ));
    Ok(parts.join(", "))
}

/// Writes the three figure data sets into `dir` and returns their paths.
///
/// `fig1.csv` holds Monte Carlo values for `L` in {1,2,3,4,8} and the
/// infinite-diversity bound, `fig2.csv` the asymptotic counterparts and
/// `fig3.csv` the asymptotic values under exponential correlation, keyed by
/// an extra leading `r` column. Only the system parameters, the SNR grid and
/// the sample settings of `settings` are used.
pub fn cmd_figures(settings: &Settings, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut base = settings.clone();
    base.l_values = FIGURE_L_VALUES.to_vec();
    base.corr = CorrelationSpec::Identity;

    let mut fig1 = base.clone();
    fig1.emit = Emit {
        mc: true,
        asy: false,
        inf_mc: true,
        inf_asy: false,
    };
    let mut fig2 = base.clone();
    fig2.emit = Emit {
        mc: false,
        asy: true,
        inf_mc: false,
        inf_asy: true,
    };

    let mut files = vec![
        ("fig1.csv", cmd_sweep(&fig1)?),
        ("fig2.csv", cmd_sweep(&fig2)?),
    ];
    let mut table = Table::with_prefix_column(Some("r"));
    for r in FIGURE_R_VALUES {
        let mut s = fig2.clone();
        s.corr = if r == 0.0 {
            CorrelationSpec::Identity
        } else {
            CorrelationSpec::Exponential(r)
        };
        sweep_into(&s, &mut table, Some(&r.to_string()))?;
    }
    files.push(("fig3.csv", table.into_string()));

    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(nt: u32, nr: u32, eta: f64, l: u32) -> Settings {
        Settings {
            nt,
            nr,
            eta,
            l_values: vec![l],
            ..Settings::default()
        }
    }

    #[test]
    fn regime_reports() {
        assert_eq!(
            cmd_regime(&settings(4, 2, 0.2, 1)).unwrap(),
            "low, beta=10, L*=4, L>=L*: no"
        );
        assert_eq!(
            cmd_regime(&settings(4, 2, 0.2, 4)).unwrap(),
            "high, beta=2.5, L*=4, L>=L*: yes"
        );
        assert!(cmd_regime(&settings(4, 2, 0.2, 3))
            .unwrap()
            .starts_with("moderate, s=1, "));
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(CliError::from(Error::config("x")).exit_code(), 2);
        assert_eq!(CliError::from(Error::domain("x")).exit_code(), 3);
        assert_eq!(
            CliError::from(Error::Io(io::Error::other("x"))).exit_code(),
            4
        );
        assert!(matches!(
            cmd_regime(&settings(0, 2, 0.2, 1)),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn asymptotic_only_sweep_has_no_mc_fields() {
        let mut s = settings(4, 2, 0.2, 2);
        s.emit = "asy".parse().unwrap();
        s.snr = "30:40:10".parse().unwrap();
        let text = cmd_sweep(&s).unwrap();
        let rows: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .collect();
        assert_eq!(rows.len(), 2);
        for row in rows {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields[3], "moderate");
            assert_eq!(fields[7], "2");
            assert!(fields[9..].iter().all(|f| f.is_empty()));
        }
    }
}
