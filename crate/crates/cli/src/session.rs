//! Global settings: config file, flags and their validation.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use gencol::bigo::BigOError;
use gencol::colombeau::{ColombeauError, GenConfig, Interval};
use gencol::index::{IndexConfig, IndexError, IndexKind, IndexSet};
use serde::Deserialize;

/// Exit codes.
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, out-of-range settings or unparsable expressions.
    Usage(String),
    /// Well-formed input the library rejects: domains, kinds, non-moderate nets.
    Data(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl From<ColombeauError> for CliError {
    fn from(e: ColombeauError) -> Self {
        match e {
            ColombeauError::Parse(_)
            | ColombeauError::UnknownKernel(_)
            | ColombeauError::BigO(BigOError::Parse(_)) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<BigOError> for CliError {
    fn from(e: BigOError) -> Self {
        match e {
            BigOError::Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// `index = "full"` or a table `[index] kind = "full" profile = "aq2"`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum IndexEntry {
    Kind(String),
    Table(IndexConfig),
}

/// The optional TOML config file; every key mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    index: Option<IndexEntry>,
    q: Option<u32>,
    kmin: Option<u32>,
    kmax: Option<u32>,
    tol: Option<f64>,
    csv: Option<PathBuf>,
    seed: Option<u64>,
    json: Option<bool>,
    trials: Option<usize>,
    budget: Option<usize>,
    domain: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Values given on the command line; `None` defers to the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub index: Option<IndexKind>,
    pub q: Option<u32>,
    pub kmin: Option<u32>,
    pub kmax: Option<u32>,
    pub tol: Option<f64>,
    pub csv: Option<PathBuf>,
    pub seed: Option<u64>,
    pub json: bool,
    pub trials: Option<usize>,
    pub budget: Option<usize>,
    pub domain: Option<String>,
}

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TRIALS: usize = 1000;

pub struct Session {
    pub index: IndexConfig,
    pub q: Option<u32>,
    pub gen: GenConfig,
    pub csv: Option<PathBuf>,
    pub seed: u64,
    pub json: bool,
    pub trials: usize,
    pub budget: usize,
    pub domain: Interval,
}

impl Session {
    pub fn new(file: FileConfig, flags: Overrides) -> Result<Self, CliError> {
        let from_file = match file.index {
            None => None,
            Some(IndexEntry::Kind(k)) => Some(IndexConfig::default_for(
                k.parse().map_err(CliError::Usage)?,
            )),
            Some(IndexEntry::Table(c)) => Some(c),
        };
        // a flag naming the configured kind keeps the file's parameters
        let index = match (flags.index, from_file) {
            (Some(kind), Some(c)) if c.kind() == kind => c,
            (Some(kind), _) => IndexConfig::default_for(kind),
            (None, Some(c)) => c,
            (None, None) => IndexConfig::Special,
        };
        let q = flags.q.or(file.q);
        if let Some(q) = q {
            if index.kind() != IndexKind::Full {
                return Err(CliError::Usage(format!(
                    "--q selects a moment class of the full instance, not of {}",
                    index.kind()
                )));
            }
            if q > gencol::testfn::MAX_MOLLIFIER_ORDER {
                return Err(CliError::Usage(format!(
                    "--q must be at most {}",
                    gencol::testfn::MAX_MOLLIFIER_ORDER
                )));
            }
        }
        let seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let mut gen = GenConfig {
            seed,
            ..GenConfig::default()
        };
        gen.kmin = flags.kmin.or(file.kmin).unwrap_or(gen.kmin);
        gen.kmax = flags.kmax.or(file.kmax).unwrap_or(gen.kmax);
        gen.tol = flags.tol.or(file.tol).unwrap_or(gen.tol);
        if let Some(q) = q {
            gen.q_max = q;
        }
        if gen.kmin < 1 || gen.kmax > 40 || gen.kmin + 2 > gen.kmax {
            return Err(CliError::Usage(format!(
                "probe range needs 1 <= kmin, kmin + 2 <= kmax <= 40, got {}..{}",
                gen.kmin, gen.kmax
            )));
        }
        if !(gen.tol > 0.0 && gen.tol <= 1.0) {
            return Err(CliError::Usage(format!(
                "--tol must lie in (0, 1], got {}",
                gen.tol
            )));
        }
        let trials = flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::Usage("--trials must be positive".into()));
        }
        let budget = flags
            .budget
            .or(file.budget)
            .unwrap_or(gencol::index::DEFAULT_BUDGET);
        if budget == 0 {
            return Err(CliError::Usage("--budget must be positive".into()));
        }
        let domain = match flags.domain.or(file.domain) {
            Some(d) => d.parse().map_err(CliError::Usage)?,
            None => Interval::REAL_LINE,
        };
        Ok(Session {
            index,
            q,
            gen,
            csv: flags.csv.or(file.csv),
            seed,
            json: flags.json || file.json.unwrap_or(false),
            trials,
            budget,
            domain,
        })
    }

    pub fn build(&self) -> Result<Arc<dyn IndexSet>, CliError> {
        Ok(self.index.build()?)
    }
}
