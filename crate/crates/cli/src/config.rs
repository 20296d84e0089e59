//! Resolution of the effective refinement config from defaults, an optional
//! `key=value` file, and command-line flags (flags win).

use std::path::Path;

use clap::Args;
use rgr::{Connectivity, RefineConfig};

#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// Detector threshold used for voting
    #[arg(long)]
    pub tau0: Option<f64>,
    /// Confident-foreground threshold
    #[arg(long = "tau-f")]
    pub tau_f: Option<f64>,
    /// Confident-background threshold
    #[arg(long = "tau-b")]
    pub tau_b: Option<f64>,
    /// Number of Monte Carlo passes
    #[arg(long = "n-s")]
    pub n_s: Option<usize>,
    /// Average seed spacing in pixels
    #[arg(long = "seed-spacing")]
    pub seed_spacing: Option<f64>,
    /// Color compactness; the color normalizer is its square
    #[arg(long)]
    pub compactness: Option<f64>,
    /// Growth cap on the joint spatial/color distance
    #[arg(long = "d-max")]
    pub d_max: Option<f64>,
    /// Pixel connectivity for growth (4 or 8)
    #[arg(long, value_parser = parse_connectivity)]
    pub connectivity: Option<u8>,
    /// Chebyshev radius of the uncertain-band thickening
    #[arg(long = "thicken-radius")]
    pub thicken_radius: Option<usize>,
    /// Near-background depth in pixels (default: twice the seed spacing)
    #[arg(long = "roi-margin")]
    pub roi_margin: Option<f64>,
    /// Master seed of the Monte Carlo passes
    #[arg(long = "rng-seed")]
    pub rng_seed: Option<u64>,
    /// File of key=value lines using the flag names above
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

fn parse_connectivity(s: &str) -> Result<u8, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("expected 4 or 8, got {s}")),
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Read(std::io::Error),
    Invalid(String),
}

impl ConfigArgs {
    /// Overlays `other` on top of `self`: fields set in `other` win.
    fn overlay(self, other: ConfigArgs) -> ConfigArgs {
        ConfigArgs {
            tau0: other.tau0.or(self.tau0),
            tau_f: other.tau_f.or(self.tau_f),
            tau_b: other.tau_b.or(self.tau_b),
            n_s: other.n_s.or(self.n_s),
            seed_spacing: other.seed_spacing.or(self.seed_spacing),
            compactness: other.compactness.or(self.compactness),
            d_max: other.d_max.or(self.d_max),
            connectivity: other.connectivity.or(self.connectivity),
            thicken_radius: other.thicken_radius.or(self.thicken_radius),
            roi_margin: other.roi_margin.or(self.roi_margin),
            rng_seed: other.rng_seed.or(self.rng_seed),
            config: other.config.or(self.config),
        }
    }

    pub fn resolve(&self) -> Result<RefineConfig<f64>, ConfigError> {
        let merged = match &self.config {
            Some(path) => parse_file(path)?.overlay(self.clone()),
            None => self.clone(),
        };
        merged.build()
    }

    fn build(&self) -> Result<RefineConfig<f64>, ConfigError> {
        let d = RefineConfig::<f64>::default();
        let spacing = self.seed_spacing.unwrap_or(d.seed_spacing);
        let mut cfg = RefineConfig {
            tau0: self.tau0.unwrap_or(d.tau0),
            tau_f: self.tau_f.unwrap_or(d.tau_f),
            tau_b: self.tau_b.unwrap_or(d.tau_b),
            n_s: self.n_s.unwrap_or(d.n_s),
            d_max: self.d_max.unwrap_or(d.d_max),
            thicken_radius: self.thicken_radius.unwrap_or(d.thicken_radius),
            roi_margin: self.roi_margin.unwrap_or(2.0 * spacing),
            rng_seed: self.rng_seed.unwrap_or(d.rng_seed),
            connectivity: match self.connectivity {
                Some(8) => Connectivity::Eight,
                _ => Connectivity::Four,
            },
            ..d
        }
        .with_seed_spacing(spacing);
        if let Some(c) = self.compactness {
            cfg = cfg.with_compactness(c);
        }
        cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped; keys
/// are the long flag names, with `-` or `_` separators.
pub fn parse_config_text(text: &str) -> Result<ConfigArgs, String> {
    let mut out = ConfigArgs::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let bad = |what: &str| format!("line {}: invalid {what} value {value:?}", n + 1);
        let float = |what: &str| value.parse::<f64>().map_err(|_| bad(what));
        let int = |what: &str| value.parse::<usize>().map_err(|_| bad(what));
        match key.as_str() {
            "tau0" => out.tau0 = Some(float("tau0")?),
            "tau-f" => out.tau_f = Some(float("tau-f")?),
            "tau-b" => out.tau_b = Some(float("tau-b")?),
            "n-s" => out.n_s = Some(int("n-s")?),
            "seed-spacing" => out.seed_spacing = Some(float("seed-spacing")?),
            "compactness" => out.compactness = Some(float("compactness")?),
            "d-max" => out.d_max = Some(float("d-max")?),
            "connectivity" => {
                out.connectivity =
                    Some(parse_connectivity(value).map_err(|e| format!("line {}: {e}", n + 1))?)
            }
            "thicken-radius" => out.thicken_radius = Some(int("thicken-radius")?),
            "roi-margin" => out.roi_margin = Some(float("roi-margin")?),
            "rng-seed" => out.rng_seed = Some(value.parse::<u64>().map_err(|_| bad("rng-seed"))?),
            other => return Err(format!("line {}: unknown key {other:?}", n + 1)),
        }
    }
    Ok(out)
}

fn parse_file(path: &Path) -> Result<ConfigArgs, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(ConfigError::Read)?;
    parse_config_text(&text).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))
}
