//! The full verification suite: exact identities, inequalities with explicit
//! constants, and the numeration checks, over a set of α and functions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checks::{carry_sweep, density_sweep, gap_structure_check};
use super::report::CheckReport;
use crate::alphafun::{AlphaFunction, AtomRegistry, FnSpec};
use crate::cfrac::{covering, expand, QuotientSpec};
use crate::error::{Error, Result};
use crate::spectral::fourier::{cyclic_identity_from, fourier_coeffs};
use crate::spectral::inequalities::{
    fejer_check, large_sieve_check, vdc_check, SIEVE_SLACK, VDC_SLACK,
};

pub const FAMILIES: [&str; 8] = [
    "fejer", "sieve", "vdc", "parseval", "cyclic", "carry", "density", "gaps",
];

/// Largest `q_λ` entering the Parseval and cyclic sweeps.
pub const IDENTITY_SCALE_CAP: u64 = 1024;
/// Largest shift `r` entering the cyclic sweep.
pub const CYCLIC_SHIFT_CAP: u64 = 64;
/// Tolerance factor of the exact identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

pub const FEJER_CASES: usize = 100;
pub const SIEVE_CASES: usize = 500;
pub const VDC_CASES: usize = 200;

pub const CARRY_LAMBDA_MAX: usize = 12;
pub const CARRY_TRUNCATIONS: [u64; 3] = [1_000, 10_000, 100_000];
/// The carry sweep skips levels with more shifts than this.
pub const CARRY_SHIFT_CAP: u64 = 8192;

pub const DENSITY_LAMBDA_MAX: usize = 6;
pub const DENSITY_N: u64 = 1_000_000;

pub const GAP_LAMBDA_MAX: usize = 8;
pub const GAP_BLOCKS: usize = 10_000;

/// The default α set: `a_1 = 1` and `a_1 ≥ 2`, constant and mixed quotients.
pub fn default_alphas() -> Vec<QuotientSpec> {
    ["golden", "silver", "periodic:/1,2", "periodic:/1,2,3,1,1,4"]
        .iter()
        .map(|s| s.parse().expect("default alpha parses"))
        .collect()
}

/// `θ ∈ {1/2, 1/3, 0.1234567, 0}`.
pub fn default_functions() -> Vec<FnSpec> {
    [0.5, 1.0 / 3.0, 0.1234567, 0.0]
        .into_iter()
        .map(|theta| FnSpec::Theta { theta, beta: None })
        .collect()
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub alphas: Vec<QuotientSpec>,
    pub functions: Vec<FnSpec>,
    pub seed: u64,
    /// Families to run; all of [`FAMILIES`] when `None`.
    pub only: Option<Vec<String>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            alphas: default_alphas(),
            functions: default_functions(),
            seed: 0,
            only: None,
        }
    }
}

impl VerifyConfig {
    fn families(&self) -> Result<Vec<&'static str>> {
        match &self.only {
            None => Ok(FAMILIES.to_vec()),
            Some(names) => names
                .iter()
                .map(|n| {
                    FAMILIES.iter().copied().find(|f| f == n).ok_or_else(|| {
                        Error::Parse(format!(
                            "unknown check family {n:?}; known: {}",
                            FAMILIES.join(",")
                        ))
                    })
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub families: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(CheckReport::passed)
    }

    /// All families merged into one report named `all`.
    pub fn total(&self) -> CheckReport {
        let mut total = CheckReport::new("all");
        for f in &self.families {
            total.merge(f.clone());
        }
        total
    }

    pub fn summary(&self) -> String {
        let mut out: String = self
            .families
            .iter()
            .map(|f| f.summary_line() + "\n")
            .collect();
        out += &self.total().summary_line();
        out
    }
}

/// Functions for one α, over a scale reaching past every check on it.
struct Instance {
    alpha: QuotientSpec,
    functions: Vec<AlphaFunction>,
}

fn identity_levels(g: &AlphaFunction) -> impl Iterator<Item = usize> + '_ {
    (0..=g.scale().max_index()).take_while(|&l| g.scale().q(l) <= IDENTITY_SCALE_CAP)
}

/// Runs the selected families. Every function is built before any check,
/// so an invalid atom table fails the whole run up front.
pub fn verify_all(config: &VerifyConfig, registry: &AtomRegistry) -> Result<VerifyReport> {
    let families = config.families()?;
    let carry_reach = CARRY_TRUNCATIONS.iter().max().copied().unwrap_or(0) + CARRY_SHIFT_CAP;
    let instances = config
        .alphas
        .iter()
        .map(|alpha| {
            let scale = covering(alpha, carry_reach.max(IDENTITY_SCALE_CAP * 2))?;
            let functions = config
                .functions
                .iter()
                .map(|f| registry.build(f, scale.clone()))
                .collect::<Result<Vec<_>>>()?;
            Ok(Instance {
                alpha: alpha.clone(),
                functions,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = VerifyReport {
        families: Vec::new(),
    };
    for name in families {
        let index = FAMILIES
            .iter()
            .position(|f| *f == name)
            .expect("known family") as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(index));
        let family = match name {
            "fejer" => fejer_family(&mut rng)?,
            "sieve" => sieve_family(&mut rng)?,
            "vdc" => vdc_family(&mut rng)?,
            "parseval" => parseval_family(&instances)?,
            "cyclic" => cyclic_family(&instances)?,
            "carry" => carry_family(&instances)?,
            "density" => density_family(&instances)?,
            "gaps" => gap_family(&instances)?,
            _ => unreachable!("families() only yields known names"),
        };
        report.families.push(family);
    }
    Ok(report)
}

fn fejer_family(rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut report = CheckReport::new("fejer");
    for _ in 0..FEJER_CASES {
        let r = rng.random_range(1..=64u64);
        let x: f64 = rng.random_range(-1.0..1.0);
        let c = fejer_check(r, x)?;
        report.record_le(c.delta, IDENTITY_TOLERANCE * (r * r) as f64, || {
            format!("R={r} x={x}")
        });
    }
    Ok(report)
}

fn sieve_family(rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut report = CheckReport::new("sieve");
    for _ in 0..SIEVE_CASES {
        let h = rng.random_range(1..=128u64);
        let r = rng.random_range(1..=128u64);
        let t: f64 = rng.random_range(-1.0..1.0);
        let c = large_sieve_check(h, r, t)?;
        report.record(c.ok, c.lhs, c.bound + SIEVE_SLACK, || {
            format!("H={h} R={r} t={t}")
        });
    }
    Ok(report)
}

fn vdc_family(rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut report = CheckReport::new("vdc");
    for _ in 0..VDC_CASES {
        let len = rng.random_range(1..=256usize);
        let seq: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let r = rng.random_range(1..=len);
        let c = vdc_check(&seq, r)?;
        let bound = c.rhs.re + VDC_SLACK * (len * len) as f64;
        report.record(c.ok, c.lhs, bound, || format!("|I|={len} R={r}"));
    }
    Ok(report)
}

fn parseval_family(instances: &[Instance]) -> Result<CheckReport> {
    let mut report = CheckReport::new("parseval");
    for inst in instances {
        for g in &inst.functions {
            for lambda in identity_levels(g) {
                let table = fourier_coeffs(g, lambda)?;
                let q = table.q as usize;
                let mean = g.values(0, q)?.iter().map(|z| z.norm_sqr()).sum::<f64>() / q as f64;
                let delta = (table.energy() - mean).abs();
                report.record_le(delta, IDENTITY_TOLERANCE, || {
                    format!("{} lambda={lambda}", inst.alpha)
                });
            }
        }
    }
    Ok(report)
}

fn cyclic_family(instances: &[Instance]) -> Result<CheckReport> {
    let mut report = CheckReport::new("cyclic");
    for inst in instances {
        for g in &inst.functions {
            for lambda in identity_levels(g) {
                let table = fourier_coeffs(g, lambda)?;
                let values = g.values(0, table.q as usize)?;
                for r in 0..=table.q.min(CYCLIC_SHIFT_CAP) {
                    let c = cyclic_identity_from(&table.coeffs, &values, r);
                    report.record_le(c.delta, IDENTITY_TOLERANCE * table.q as f64, || {
                        format!("{} lambda={lambda} r={r}", inst.alpha)
                    });
                }
            }
        }
    }
    Ok(report)
}

fn carry_family(instances: &[Instance]) -> Result<CheckReport> {
    let mut report = CheckReport::new("carry");
    for inst in instances {
        for g in &inst.functions {
            let scale = g.scale();
            let top = CARRY_LAMBDA_MAX.min(scale.max_index());
            let levels = (1..=top).filter(|&l| scale.q(l - 1) <= CARRY_SHIFT_CAP);
            report.merge(carry_sweep(g, levels, &CARRY_TRUNCATIONS)?);
        }
    }
    Ok(report)
}

fn density_family(instances: &[Instance]) -> Result<CheckReport> {
    let mut report = CheckReport::new("density");
    for inst in instances {
        report.merge(density_sweep(&inst.alpha, DENSITY_LAMBDA_MAX, DENSITY_N)?);
    }
    Ok(report)
}

fn gap_family(instances: &[Instance]) -> Result<CheckReport> {
    let mut report = CheckReport::new("gaps");
    for inst in instances {
        let q = expand(&inst.alpha, GAP_LAMBDA_MAX)?.q(GAP_LAMBDA_MAX);
        let scale = covering(&inst.alpha, (GAP_BLOCKS as u64 + 2) * q)?;
        for lambda in 1..=GAP_LAMBDA_MAX {
            report.merge(gap_structure_check(lambda, GAP_BLOCKS, &scale)?);
        }
    }
    Ok(report)
}
