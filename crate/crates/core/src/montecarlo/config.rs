use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::MomentSpec;

/// Largest `n` accepted by the `kingman-replay` model. Replay keeps the
/// whole event sequence and several `n`-sized arrays per worker.
pub const REPLAY_MAX_N: usize = 1 << 22;

macro_rules! kebab_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "kebab-case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => {
                        let known: Vec<&str> = vec![$($text),+];
                        Err(Error::Config(format!(
                            "unknown {} '{s}', expected one of {}",
                            stringify!($name),
                            known.join(", ")
                        )))
                    }
                }
            }
        }
    };
}

kebab_enum!(
    /// Which experiment a run performs, and therefore which checks it reports.
    Kind {
        Profile => "profile",
        Poisson => "poisson",
        Tail => "tail",
        Clt => "clt",
        Moments => "moments",
        Verify => "verify",
    }
);

kebab_enum!(
    /// How one replicate's degrees are sampled.
    Model {
        Rrt => "rrt",
        KingmanReplay => "kingman-replay",
        KingmanFast => "kingman-fast",
    }
);

kebab_enum!(
    /// Structural checks run by [`Kind::Verify`].
    Suite {
        All => "all",
        Streak => "streak",
        Exchangeability => "exchangeability",
        Selection => "selection",
        Tau => "tau",
        Models => "models",
    }
);

impl Suite {
    /// `(n, replicates)` used when the suite runs as part of [`Suite::All`].
    pub fn default_size(self) -> (usize, u64) {
        match self {
            Suite::All => (0, 0),
            Suite::Streak => (1_000, 1_000),
            Suite::Exchangeability => (100, 20_000),
            Suite::Selection => (10_000, 10_000),
            Suite::Tau => (10_000, 100_000),
            Suite::Models => (6, 100_000),
        }
    }
}

fn default_kind() -> Kind {
    Kind::Profile
}
fn default_model() -> Model {
    Model::KingmanFast
}
fn default_n() -> usize {
    1 << 16
}
fn default_replicates() -> u64 {
    1_000
}
fn default_imin() -> i64 {
    -2
}
fn default_imax() -> i64 {
    4
}
fn default_clt_i() -> i64 {
    -8
}
fn default_suite() -> Suite {
    Suite::All
}
fn default_tau_eps() -> f64 {
    0.5
}

/// Everything that determines a run. Reports are a pure function of this
/// value; `threads` and the output paths do not affect their content.
///
/// The JSON form uses the field names below; missing fields take defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_kind")]
    pub kind: Kind,
    #[serde(default = "default_model")]
    pub model: Model,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Smallest tracked index; smaller ones are pooled into `x_lo`.
    #[serde(default = "default_imin")]
    pub imin: i64,
    /// Largest tracked index; `x_hi` holds `X_{≥imax}`.
    #[serde(default = "default_imax")]
    pub imax: i64,
    /// Index standardised by the `clt` kind.
    #[serde(default = "default_clt_i")]
    pub i: i64,
    #[serde(default)]
    pub moments: Vec<MomentSpec>,
    #[serde(default = "default_suite")]
    pub suite: Suite,
    /// `ε` in the cut-off `n - ceil(n^ε)` of the `tau` suite.
    #[serde(default = "default_tau_eps")]
    pub tau_eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Adds wall-clock time to the report, which then differs between runs.
    #[serde(default)]
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: default_kind(),
            model: default_model(),
            n: default_n(),
            replicates: default_replicates(),
            master_seed: 0,
            imin: default_imin(),
            imax: default_imax(),
            i: default_clt_i(),
            moments: Vec::new(),
            suite: default_suite(),
            tau_eps: default_tau_eps(),
            threads: None,
            csv: None,
            json: None,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::Config(format!(
                "n = {} exceeds the label range",
                self.n
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.imin > self.imax {
            return Err(Error::Config(format!(
                "imin = {} exceeds imax = {}",
                self.imin, self.imax
            )));
        }
        if self.imax - self.imin > 256 {
            return Err(Error::Config("at most 257 tracked indices".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.model == Model::KingmanReplay && self.n > REPLAY_MAX_N {
            return Err(Error::Config(format!(
                "kingman-replay is limited to n <= {REPLAY_MAX_N}; use kingman-fast"
            )));
        }
        if !(self.tau_eps > 0.0 && self.tau_eps < 1.0) {
            return Err(Error::Config(format!(
                "tau_eps = {} must lie in (0, 1)",
                self.tau_eps
            )));
        }
        Ok(())
    }
}
