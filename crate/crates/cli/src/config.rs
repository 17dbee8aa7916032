//! Experiment settings: a TOML file overlaid by command-line flags.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "IFS_SHADOW_OUT";
pub const DEFAULT_OUT: &str = "ifs-shadow-out";

macro_rules! params {
    ($( $(#[$doc:meta])* $name:ident : $ty:ty ),* $(,)?) => {
        /// Every setting is optional; unset values fall back to the config
        /// file, then to per-command defaults.
        #[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
        #[serde(deny_unknown_fields)]
        pub struct Params {
            $( $(#[$doc])* #[arg(long)] pub $name: Option<$ty>, )*
        }

        impl Params {
            /// Values set here win over `base`.
            pub fn overlay(self, base: Params) -> Params {
                Params { $( $name: self.$name.or(base.$name), )* }
            }
        }
    };
}

params! {
    /// Output directory (default: $IFS_SHADOW_OUT, then ./ifs-shadow-out)
    out: PathBuf,
    /// Catalog system
    example: String,
    /// Catalog parameter (n, alpha or a)
    param: f64,
    /// Number of steps
    horizon: usize,
    eps: f64,
    delta: f64,
    /// uniform | bursty
    noise: String,
    /// Burst size
    jump: f64,
    /// Steps between bursts
    period: usize,
    /// Start point coordinates, space separated
    start: String,
    /// average | average_shifted | plain
    mode: String,
    /// Pseudo-orbit file to validate instead of generating one
    input: PathBuf,
    resolution: usize,
    /// Sample points per box
    samples: usize,
    seed: u64,
    /// Restrict the system to one map
    map: usize,
    /// Point whose box is reported
    at: String,
    /// Chain search start point
    from: String,
    /// Chain search end point
    to: String,
    /// Block length of the switching orbit
    k: usize,
    /// Number of doubling blocks
    doublings: usize,
    /// Candidate grid per axis (cylinder length on Σ₂)
    grid: usize,
    /// Sampled symbol streams
    streams: usize,
    /// Step limit of the convergence check
    claim_steps: usize,
    /// Grid points used for average-distance profiles
    profile_z: usize,
    /// Streams used for average-distance profiles
    profile_streams: usize,
    /// Row stride of the profile table
    stride: usize,
    /// exhaustive | greedy
    oracle: String,
    /// Oracle word length and horizon
    word_len: usize,
    /// Tail window fraction
    window: f64,
    /// Chaos game points
    points: usize,
    /// Image width in pixels
    image_size: usize,
}

pub fn load_file(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Settings after merging, with a log of every value a command used.
pub struct Resolved {
    pub params: Params,
    used: Vec<(String, String)>,
}

impl Resolved {
    pub fn new(params: Params) -> Self {
        Self {
            params,
            used: Vec::new(),
        }
    }

    /// Records `value` under `key` and returns it.
    pub fn record<T: Display>(&mut self, key: &str, value: T) -> T {
        self.used.push((key.to_string(), value.to_string()));
        value
    }

    pub fn used(&self) -> &[(String, String)] {
        &self.used
    }

    pub fn out_dir(&self) -> PathBuf {
        self.params
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}
