//! Resolution of flags and config-file values into a [`SweepParams`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use onebit_core::{ConstellationKind, EstimatorKind, PilotKind};

use crate::error::{CliError, CliResult};
use crate::grid::{parse_grid, parse_int_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    MseVsRho,
    MseVsTau,
    RhoStar,
    DetectScatter,
    VarVsM,
    VarVsRho,
    VarVsTau,
    SerVsRho,
    Validate,
}

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    RhoDb,
    Tau,
    M,
    None,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::MseVsRho => "mse-vs-rho",
            Command::MseVsTau => "mse-vs-tau",
            Command::RhoStar => "rho-star",
            Command::DetectScatter => "detect-scatter",
            Command::VarVsM => "var-vs-m",
            Command::VarVsRho => "var-vs-rho",
            Command::VarVsTau => "var-vs-tau",
            Command::SerVsRho => "ser-vs-rho",
            Command::Validate => "validate",
        }
    }

    pub fn axis(self) -> Axis {
        match self {
            Command::MseVsRho | Command::DetectScatter | Command::VarVsRho | Command::SerVsRho => {
                Axis::RhoDb
            }
            Command::MseVsTau | Command::RhoStar | Command::VarVsTau => Axis::Tau,
            Command::VarVsM => Axis::M,
            Command::Validate => Axis::None,
        }
    }

    /// Single-user detection subcommands.
    pub fn is_detection(self) -> bool {
        matches!(
            self,
            Command::DetectScatter
                | Command::VarVsM
                | Command::VarVsRho
                | Command::VarVsTau
                | Command::SerVsRho
        )
    }

    fn default_grid(self) -> &'static str {
        match self {
            Command::MseVsRho | Command::VarVsRho => "-10:2:30",
            Command::SerVsRho => "-10:1:30",
            Command::DetectScatter => "10",
            Command::MseVsTau | Command::VarVsTau => "8:8:128",
            Command::RhoStar => "4:4:1024",
            Command::VarVsM => "16:16:256",
            Command::Validate => "",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Flags shared by every subcommand. Values are kept as text so flags and
/// config-file entries go through the same parser.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Number of users K
    #[arg(long)]
    pub k: Option<String>,
    /// Base-station antennas M (a grid for var-vs-m)
    #[arg(long)]
    pub m: Option<String>,
    /// Pilot length tau (a grid for mse-vs-tau, rho-star and var-vs-tau)
    #[arg(long)]
    pub tau: Option<String>,
    /// Transmit SNR in dB, `start:step:stop` or a comma list on rho sweeps
    #[arg(long, allow_hyphen_values = true)]
    pub rho_db: Option<String>,
    /// Pilot family: dft, pstar or ones
    #[arg(long)]
    pub pilot: Option<String>,
    /// Comma list of blm-full, blm-simplified, sls-mol, sls-opt, sls-custom:PSI, or `all`
    #[arg(long)]
    pub estimators: Option<String>,
    /// Constellation: qam16 or qpsk
    #[arg(long)]
    pub constellation: Option<String>,
    /// Monte Carlo trials per point (0 skips the empirical columns where allowed)
    #[arg(long)]
    pub trials: Option<String>,
    /// Base RNG seed
    #[arg(long)]
    pub seed: Option<String>,
    /// Output CSV path (stdout if omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// `key = value` file with defaults for the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: [&str; 10] = [
    "k",
    "m",
    "tau",
    "rho_db",
    "pilot",
    "estimators",
    "constellation",
    "trials",
    "seed",
    "output",
];

/// Where a raw value came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Line(usize),
    Flag(&'static str),
    Default,
}

/// Parsed `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<&'static str, (String, usize)>,
}

impl ConfigFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses config text. Blank lines and `#` comments are ignored; keys may use
/// `-` or `_`; a repeated key keeps the last value.
pub fn parse_config(text: &str) -> CliResult<ConfigFile> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::Config {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim().replace('-', "_");
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(CliError::Config {
                line,
                msg: format!("unknown key `{key}`"),
            });
        };
        let value = value.trim();
        if value.is_empty() {
            return Err(CliError::Config {
                line,
                msg: format!("missing value for `{key}`"),
            });
        }
        entries.insert(known, (value.to_string(), line));
    }
    Ok(ConfigFile { entries })
}

pub fn read_config(path: &Path) -> CliResult<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub command: Command,
    /// Values of the swept parameter: dB for SNR sweeps, integers otherwise.
    pub grid: Vec<f64>,
    pub k: usize,
    pub m: usize,
    pub tau: usize,
    pub rho_db: f64,
    pub pilot: PilotKind,
    pub estimators: Vec<EstimatorKind>,
    /// Whether the estimator list was requested rather than defaulted.
    pub estimators_given: bool,
    pub constellation: ConstellationKind,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

struct Resolver<'a> {
    file: Option<&'a ConfigFile>,
    flags: &'a Flags,
}

impl Resolver<'_> {
    fn raw(&self, key: &'static str) -> Option<(String, Origin)> {
        let flag = match key {
            "k" => self.flags.k.clone(),
            "m" => self.flags.m.clone(),
            "tau" => self.flags.tau.clone(),
            "rho_db" => self.flags.rho_db.clone(),
            "pilot" => self.flags.pilot.clone(),
            "estimators" => self.flags.estimators.clone(),
            "constellation" => self.flags.constellation.clone(),
            "trials" => self.flags.trials.clone(),
            "seed" => self.flags.seed.clone(),
            "output" => self.flags.output.as_ref().map(|p| p.display().to_string()),
            _ => None,
        };
        if let Some(v) = flag {
            return Some((v, Origin::Flag(key)));
        }
        self.file
            .and_then(|f| f.entries.get(key))
            .map(|(v, line)| (v.clone(), Origin::Line(*line)))
    }

    fn parse<T>(
        &self,
        key: &'static str,
        default: &str,
        f: impl Fn(&str) -> Result<T, String>,
    ) -> CliResult<(T, Origin)> {
        let (text, origin) = self
            .raw(key)
            .unwrap_or((default.to_string(), Origin::Default));
        f(&text)
            .map(|v| (v, origin))
            .map_err(|msg| fail(origin, key, &msg))
    }
}

fn fail(origin: Origin, key: &str, msg: &str) -> CliError {
    match origin {
        Origin::Line(line) => CliError::Config {
            line,
            msg: format!("{key}: {msg}"),
        },
        Origin::Flag(_) => CliError::Usage(format!("--{}: {msg}", key.replace('_', "-"))),
        Origin::Default => CliError::Usage(format!("{key}: {msg}")),
    }
}

fn scalar<T: Copy>(values: Vec<T>, key: &str) -> Result<T, String> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(format!("{key} takes a single value for this subcommand")),
    }
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a non-negative integer", s.trim()))
}

fn parse_estimators(s: &str) -> Result<Vec<EstimatorKind>, String> {
    if s.trim() == "all" {
        return Ok(EstimatorKind::STANDARD.to_vec());
    }
    let kinds = s
        .split(',')
        .map(|x| x.trim().parse::<EstimatorKind>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err("empty estimator list".into());
    }
    Ok(kinds)
}

impl SweepParams {
    /// Combines built-in defaults, the config file and the flags, in rising
    /// order of precedence.
    pub fn resolve(command: Command, file: Option<&ConfigFile>, flags: &Flags) -> CliResult<Self> {
        let r = Resolver { file, flags };
        let axis = command.axis();

        let (k, k_origin) = r.parse("k", "1", |s| parse_u64(s).map(|v| v as usize))?;
        if k == 0 {
            return Err(fail(k_origin, "k", "K must be at least 1"));
        }
        if command.is_detection() && k != 1 {
            return Err(fail(
                k_origin,
                "k",
                &format!("{command} covers a single user, got K = {k}"),
            ));
        }

        let mut grid = Vec::new();
        let (tau, tau_origin) = if axis == Axis::Tau {
            let (taus, origin) = r.parse("tau", command.default_grid(), parse_int_grid)?;
            grid = taus.iter().map(|&t| t as f64).collect();
            (taus[0], origin)
        } else {
            r.parse("tau", "32", |s| {
                parse_int_grid(s).and_then(|v| scalar(v, "tau"))
            })?
        };
        let min_tau = if command == Command::RhoStar {
            2
        } else {
            k.max(1)
        };
        let taus: Vec<usize> = if axis == Axis::Tau {
            grid.iter().map(|&t| t as usize).collect()
        } else {
            vec![tau]
        };
        if let Some(bad) = taus.iter().find(|&&t| t < min_tau) {
            return Err(fail(
                tau_origin,
                "tau",
                &format!("pilot length {bad} is below the minimum {min_tau}"),
            ));
        }

        let rho_db = if axis == Axis::RhoDb {
            let (g, _) = r.parse("rho_db", command.default_grid(), parse_grid)?;
            grid = g;
            grid[0]
        } else {
            r.parse("rho_db", "10", |s| {
                parse_grid(s).and_then(|v| scalar(v, "rho_db"))
            })?
            .0
        };

        let default_m = if command.is_detection() { 128 } else { k };
        let (m, m_origin) = if axis == Axis::M {
            let (ms, origin) = r.parse("m", command.default_grid(), parse_int_grid)?;
            grid = ms.iter().map(|&v| v as f64).collect();
            (ms[0], origin)
        } else {
            r.parse("m", &default_m.to_string(), |s| {
                parse_int_grid(s).and_then(|v| scalar(v, "m"))
            })?
        };
        if m == 0 {
            return Err(fail(m_origin, "m", "M must be at least 1"));
        }

        let (pilot, pilot_origin) = r.parse("pilot", "dft", |s| {
            s.trim().parse::<PilotKind>().map_err(|e| e.to_string())
        })?;
        if pilot != PilotKind::Dft && k != 1 {
            return Err(fail(
                pilot_origin,
                "pilot",
                &format!("{pilot} pilots are single-user, got K = {k}"),
            ));
        }
        let estimators_given = r.raw("estimators").is_some();
        let (estimators, _) = r.parse("estimators", "all", parse_estimators)?;
        let (constellation, _) = r.parse("constellation", "qam16", |s| {
            s.trim()
                .parse::<ConstellationKind>()
                .map_err(|e| e.to_string())
        })?;
        let default_trials = if command == Command::DetectScatter {
            "100"
        } else {
            "100000"
        };
        let (trials, trials_origin) = r.parse("trials", default_trials, |s| {
            parse_u64(s).map(|v| v as usize)
        })?;
        let needs_trials = matches!(
            command,
            Command::DetectScatter | Command::SerVsRho | Command::Validate
        );
        if trials == 0 && needs_trials {
            return Err(fail(
                trials_origin,
                "trials",
                &format!("{command} needs at least one trial"),
            ));
        }
        let (seed, _) = r.parse("seed", "1", parse_u64)?;
        let output = r.raw("output").map(|(v, _)| PathBuf::from(v));

        Ok(Self {
            command,
            grid,
            k,
            m,
            tau,
            rho_db,
            pilot,
            estimators,
            estimators_given,
            constellation,
            trials,
            seed,
            output,
        })
    }

    /// Reads `flags.config` if given, then resolves.
    pub fn from_flags(command: Command, flags: &Flags) -> CliResult<Self> {
        let file = match &flags.config {
            Some(path) => Some(read_config(path)?),
            None => None,
        };
        Self::resolve(command, file.as_ref(), flags)
    }
}
