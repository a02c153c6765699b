//! Desk-scale experiments: decay of the quadratic mean of correlations and
//! decay of the exponential-sum spectrum.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphafun::{AlphaFunction, AtomRegistry, FnSpec};
use crate::cfrac::{covering, QuotientSpec};
use crate::error::{Error, Result};
use crate::spectral::expsum::{scan_evaluator, ExpSumEvaluator, DEFAULT_GRID};
use crate::spectral::{correlation_profile, scale_sums};

/// Number of random `β` in the contraction part of the spectrum experiment.
pub const CONTRACTION_SAMPLES: usize = 16;

/// Smallest truncation on the spectrum ladder.
pub const LADDER_START: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Parse(format!(
                "unknown format {s:?}; expected csv or json"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha_spec: String,
    pub fn_spec: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "R_list")]
    pub r_list: Vec<usize>,
    pub lambda_list: Vec<usize>,
    pub seed: u64,
    pub output_path: Option<String>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha_spec: "golden".into(),
            fn_spec: "theta:1/2".into(),
            n: 100_000,
            r_list: (5..=12).map(|e| 1usize << e).collect(),
            lambda_list: Vec::new(),
            seed: 0,
            output_path: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    /// Parses the specs and checks `N ≥ max R` and `q_λ ≤ N` for every listed `λ`.
    pub fn validate(&self) -> Result<(QuotientSpec, FnSpec)> {
        let alpha: QuotientSpec = self.alpha_spec.parse()?;
        let func: FnSpec = self.fn_spec.parse()?;
        if self.n == 0 {
            return Err(Error::Validation("N must be positive".into()));
        }
        if self.r_list.is_empty() || self.r_list.contains(&0) {
            return Err(Error::Validation("R_list must hold positive shifts".into()));
        }
        let r_max = self.r_max();
        if r_max as u64 > self.n {
            return Err(Error::Validation(format!(
                "N = {} is below max R = {r_max}",
                self.n
            )));
        }
        if let Some(&lambda) = self.lambda_list.iter().max() {
            let table = crate::cfrac::expand(&alpha, lambda.max(1))?;
            for &l in &self.lambda_list {
                if table.q(l) > self.n {
                    return Err(Error::Validation(format!(
                        "q_{l} = {} exceeds N = {}",
                        table.q(l),
                        self.n
                    )));
                }
            }
        }
        Ok((alpha, func))
    }

    fn r_max(&self) -> usize {
        self.r_list.iter().copied().max().unwrap_or(1)
    }

    /// The function over a scale covering `n < N + max R`.
    pub fn build(&self, registry: &AtomRegistry) -> Result<AlphaFunction> {
        let (alpha, func) = self.validate()?;
        let scale = covering(&alpha, self.n + self.r_max() as u64)?;
        registry.build(&func, scale)
    }

    /// `# {config as JSON}`, the first line of every CSV output.
    pub fn header_line(&self) -> String {
        format!(
            "# {}",
            serde_json::to_string(self).expect("config serializes")
        )
    }
}

/// Rendering shared by the experiment reports.
pub trait Tabular: Serialize {
    fn config(&self) -> &ExperimentConfig;
    fn csv_body(&self) -> String;

    fn to_csv(&self) -> String {
        format!("{}\n{}", self.config().header_line(), self.csv_body())
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticMeanRow {
    #[serde(rename = "R")]
    pub r: usize,
    pub quadratic_mean: f64,
    pub absolute_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudorandomnessReport {
    pub config: ExperimentConfig,
    pub rows: Vec<QuadraticMeanRow>,
    pub runtime_seconds: f64,
}

impl Tabular for PseudorandomnessReport {
    fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    fn csv_body(&self) -> String {
        let mut out = String::from("R,quadratic_mean,absolute_mean,runtime_seconds\n");
        for row in &self.rows {
            out += &format!(
                "{},{:e},{:e},{:.3}\n",
                row.r, row.quadratic_mean, row.absolute_mean, self.runtime_seconds
            );
        }
        out
    }
}

/// `Q(R) = (1/R) Σ_{r<R} |γ̂_r|²` and the absolute mean for every `R` in the
/// list, all read off one correlation profile at the largest `R`.
pub fn pseudorandomness_experiment(
    config: &ExperimentConfig,
    registry: &AtomRegistry,
) -> Result<PseudorandomnessReport> {
    let start = Instant::now();
    let g = config.build(registry)?;
    let profile = correlation_profile(&g, config.r_max(), config.n)?;
    let rows = config
        .r_list
        .iter()
        .map(|&r| {
            let p = profile.prefix(r);
            QuadraticMeanRow {
                r,
                quadratic_mean: p.quadratic_mean,
                absolute_mean: p.absolute_mean,
            }
        })
        .collect();
    Ok(PseudorandomnessReport {
        config: config.clone(),
        rows,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub beta_peak: f64,
    pub peak_value: f64,
}

/// `|S_i|` for `i = 0..=K` at one `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSumRow {
    pub beta: f64,
    pub magnitudes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub config: ExperimentConfig,
    pub peaks: Vec<PeakRow>,
    pub scale_sums: Vec<ScaleSumRow>,
    /// `max_i |S_{i+1}| − max(|S_i|, |S_{i−1}|)` over all sampled `β`.
    pub contraction_excess: f64,
    pub runtime_seconds: f64,
}

impl Tabular for SpectrumReport {
    fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    fn csv_body(&self) -> String {
        let mut out = String::from("series,index,beta,value\n");
        for p in &self.peaks {
            out += &format!("peak,{},{},{:e}\n", p.n, p.beta_peak, p.peak_value);
        }
        for row in &self.scale_sums {
            for (i, m) in row.magnitudes.iter().enumerate() {
                out += &format!("scale_sum,{i},{},{:e}\n", row.beta, m);
            }
        }
        out += &format!("contraction_excess,,,{:e}\n", self.contraction_excess);
        out
    }
}

/// The truncations `1024, 2048, …` below `N`, then `N` itself.
pub fn doubling_ladder(n: u64) -> Vec<u64> {
    let mut ladder = Vec::new();
    let mut m = LADDER_START;
    while m < n {
        ladder.push(m);
        m *= 2;
    }
    ladder.push(n);
    ladder
}

/// `max_i |S_{i+1}| − max(|S_i|, |S_{i−1}|)`.
pub fn contraction_excess(magnitudes: &[f64]) -> f64 {
    magnitudes
        .windows(3)
        .map(|w| w[2] - w[0].max(w[1]))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Spectrum peaks along a doubling ladder of truncations, and `|S_i|` along
/// the convergent scales `q_i ≤ N` for random `β`.
pub fn spectrum_experiment(
    config: &ExperimentConfig,
    registry: &AtomRegistry,
) -> Result<SpectrumReport> {
    let start = Instant::now();
    let g = config.build(registry)?;
    let values = g.values(0, config.n as usize)?;
    let peaks = doubling_ladder(config.n)
        .into_iter()
        .map(|n| {
            let scan = scan_evaluator(
                &ExpSumEvaluator::new(values[..n as usize].to_vec()),
                DEFAULT_GRID,
            );
            PeakRow {
                n,
                beta_peak: scan.beta_peak,
                peak_value: scan.peak_value,
            }
        })
        .collect();

    let scale = g.scale();
    let k = (1..=scale.max_index())
        .take_while(|&i| scale.q(i) <= config.n)
        .last()
        .unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::with_capacity(CONTRACTION_SAMPLES);
    let mut excess = f64::NEG_INFINITY;
    for _ in 0..CONTRACTION_SAMPLES {
        let beta: f64 = rng.random();
        let magnitudes: Vec<f64> = scale_sums(&g, beta, k)?.iter().map(|s| s.norm()).collect();
        excess = excess.max(contraction_excess(&magnitudes));
        rows.push(ScaleSumRow { beta, magnitudes });
    }
    Ok(SpectrumReport {
        config: config.clone(),
        peaks,
        scale_sums: rows,
        contraction_excess: excess,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(fn_spec: &str) -> ExperimentConfig {
        ExperimentConfig {
            fn_spec: fn_spec.into(),
            n: 20_000,
            ..Default::default()
        }
    }

    #[test]
    fn validation() {
        assert!(config("theta:1/2").validate().is_ok());
        let mut c = config("theta:1/2");
        c.n = 100;
        assert!(matches!(c.validate(), Err(Error::Validation(_))));
        let mut c = config("theta:1/2");
        c.lambda_list = vec![30];
        assert!(matches!(c.validate(), Err(Error::Validation(_))));
        assert!(matches!(config("theta:x").validate(), Err(Error::Parse(_))));
    }

    #[test]
    fn control_has_unit_quadratic_mean() {
        let report = pseudorandomness_experiment(&config("one"), &AtomRegistry::new()).unwrap();
        assert_eq!(report.rows.len(), 8);
        for row in &report.rows {
            assert_eq!(row.quadratic_mean, 1.0);
            assert_eq!(row.absolute_mean, 1.0);
        }
    }

    #[test]
    fn quadratic_mean_matches_recomputation() {
        let c = config("theta:1/2");
        let report = pseudorandomness_experiment(&c, &AtomRegistry::new()).unwrap();
        let g = c.build(&AtomRegistry::new()).unwrap();
        for row in &report.rows {
            let p = correlation_profile(&g, row.r, c.n).unwrap();
            let q = p.gamma.iter().map(|z| z.norm_sqr()).sum::<f64>() / row.r as f64;
            assert_eq!(row.quadratic_mean, q);
        }
    }

    #[test]
    fn spectrum_control_and_contraction() {
        let report = spectrum_experiment(&config("one"), &AtomRegistry::new()).unwrap();
        assert_eq!(report.peaks.last().unwrap().n, 20_000);
        for p in &report.peaks {
            assert!((p.peak_value - 1.0).abs() < 1e-12);
        }
        let report = spectrum_experiment(&config("theta:1/2"), &AtomRegistry::new()).unwrap();
        assert_eq!(report.scale_sums.len(), CONTRACTION_SAMPLES);
        assert!(report.contraction_excess <= 1e-12);
    }

    #[test]
    fn csv_starts_with_config() {
        let report = pseudorandomness_experiment(&config("one"), &AtomRegistry::new()).unwrap();
        let csv = report.to_csv();
        let first = csv.lines().next().unwrap();
        let back: ExperimentConfig =
            serde_json::from_str(first.strip_prefix("# ").unwrap()).unwrap();
        assert_eq!(back, report.config);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "R,quadratic_mean,absolute_mean,runtime_seconds"
        );
    }

    #[test]
    fn ladder() {
        assert_eq!(doubling_ladder(5000), vec![1024, 2048, 4096, 5000]);
        assert_eq!(doubling_ladder(100), vec![100]);
        assert!((contraction_excess(&[1.0, 0.5, 0.4, 0.45]) + 0.05).abs() < 1e-15);
    }
}
