//! α-multiplicative functions `g(n) = Π_k g(ε_k(n) q_k)`, stored as their
//! atom values `v[k][ε] = g(ε q_k)`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cfrac::ConvergentTable;
use crate::error::{Error, Result};
use crate::numeration::{encode, Odometer};
use crate::phase;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Atoms must satisfy `|v[k][0] − 1| ≤` this.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A bounded α-multiplicative function over one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFunction {
    scale: ConvergentTable,
    atoms: Vec<Vec<Complex64>>,
    modulus_bound: f64,
}

impl AlphaFunction {
    /// Builds a function from its atom table; `atoms[k]` holds
    /// `v[k][0..=a_{k+1}]` for each digit position of the scale.
    pub fn from_atoms(scale: ConvergentTable, atoms: Vec<Vec<Complex64>>) -> Result<Self> {
        let positions = scale.digit_positions();
        if atoms.len() != positions {
            return Err(Error::Validation(format!(
                "atom table has {} levels, scale has {positions} digit positions",
                atoms.len()
            )));
        }
        let mut modulus_bound: f64 = 0.0;
        for (k, row) in atoms.iter().enumerate() {
            let a = scale.a(k + 1).expect("quotient for digit position") as usize;
            if row.len() != a + 1 {
                return Err(Error::Validation(format!(
                    "atom level {k} has {} entries, expected {}",
                    row.len(),
                    a + 1
                )));
            }
            if (row[0] - ONE).norm() > UNIT_TOLERANCE {
                return Err(Error::Validation(format!(
                    "v[{k}][0] = {} must equal 1",
                    row[0]
                )));
            }
            for v in row {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Validation(format!("non-finite atom at level {k}")));
                }
                modulus_bound = modulus_bound.max(v.norm());
            }
        }
        Ok(Self {
            scale,
            atoms,
            modulus_bound,
        })
    }

    /// `n ↦ e(θ σ_α(n))`.
    pub fn from_theta(theta: f64, scale: ConvergentTable) -> Self {
        Self::from_atom_fn(scale, |_, eps| phase::e_mul(eps as u64, theta))
    }

    /// The constant function `1`.
    pub fn one(scale: ConvergentTable) -> Self {
        Self::from_atom_fn(scale, |_, _| ONE)
    }

    fn from_atom_fn(scale: ConvergentTable, f: impl Fn(usize, u32) -> Complex64) -> Self {
        let atoms = (0..scale.digit_positions())
            .map(|k| {
                let a = scale.a(k + 1).expect("quotient for digit position");
                (0..=a)
                    .map(|eps| if eps == 0 { ONE } else { f(k, eps) })
                    .collect()
            })
            .collect();
        Self::from_atoms(scale, atoms).expect("generated atoms are valid")
    }

    pub fn scale(&self) -> &ConvergentTable {
        &self.scale
    }

    pub fn atoms(&self) -> &[Vec<Complex64>] {
        &self.atoms
    }

    /// `v[k][ε] = g(ε q_k)`.
    pub fn atom(&self, k: usize, eps: u32) -> Complex64 {
        self.atoms[k][eps as usize]
    }

    pub fn modulus_bound(&self) -> f64 {
        self.modulus_bound
    }

    /// Whether every atom has modulus one within [`UNIT_TOLERANCE`].
    pub fn is_unimodular(&self) -> bool {
        self.atoms
            .iter()
            .flatten()
            .all(|v| (v.norm() - 1.0).abs() <= UNIT_TOLERANCE)
    }

    /// Product of `v[k][ε_k]` over the given digits, lowest position first.
    #[inline]
    pub fn eval_digits(&self, digits: &[u32]) -> Complex64 {
        let mut acc = ONE;
        for (k, &d) in digits.iter().enumerate() {
            if d != 0 {
                acc *= self.atoms[k][d as usize];
            }
        }
        acc
    }

    pub fn eval(&self, n: u64) -> Result<Complex64> {
        Ok(self.eval_digits(encode(n, &self.scale)?.digits()))
    }

    /// `g_λ(n) = g(ψ_λ(n))`.
    pub fn eval_truncated(&self, lambda: usize, n: u64) -> Result<Complex64> {
        let d = encode(n, &self.scale)?;
        let digits = d.digits();
        Ok(self.eval_digits(&digits[..lambda.min(digits.len())]))
    }

    /// `h(n) = g(n) e(−nβ)`, itself α-multiplicative with atoms
    /// `v[k][ε] e(−ε q_k β)`.
    pub fn twist(&self, beta: f64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let q = self.scale.q(k);
                row.iter()
                    .enumerate()
                    .map(|(eps, &v)| {
                        if eps == 0 {
                            v
                        } else {
                            v * phase::e_neg_mul(eps as u64 * q, beta)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_atoms(self.scale.clone(), atoms).expect("twisting preserves validity")
    }

    /// `g(n)` for `n` in `start..start + count`.
    pub fn values(&self, start: u64, count: usize) -> Result<Vec<Complex64>> {
        self.values_with(start, count, |digits| self.eval_digits(digits))
    }

    /// `g_λ(n)` for `n` in `start..start + count`.
    pub fn truncated_values(
        &self,
        lambda: usize,
        start: u64,
        count: usize,
    ) -> Result<Vec<Complex64>> {
        self.values_with(start, count, |digits| {
            self.eval_digits(&digits[..lambda.min(digits.len())])
        })
    }

    /// `g(n) / g_λ(n)`, the product of the atoms at positions `≥ λ`, for `n`
    /// in `start..start + count`.
    pub fn high_values(&self, lambda: usize, start: u64, count: usize) -> Result<Vec<Complex64>> {
        self.values_with(start, count, |digits| {
            let mut acc = ONE;
            for (k, &d) in digits.iter().enumerate().skip(lambda) {
                if d != 0 {
                    acc *= self.atoms[k][d as usize];
                }
            }
            acc
        })
    }

    fn values_with(
        &self,
        start: u64,
        count: usize,
        f: impl Fn(&[u32]) -> Complex64,
    ) -> Result<Vec<Complex64>> {
        let end = start
            .checked_add(count as u64)
            .ok_or_else(|| Error::Range("value range overflows u64".into()))?;
        let mut out = Vec::with_capacity(count);
        Odometer::for_each_in(&self.scale, start, end, |_, digits| out.push(f(digits)))?;
        Ok(out)
    }
}

/// Parses reals written as decimals or as fractions `p/q`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("bad real {s:?}: {e}"));
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|e| bad(&e))?;
            let den: f64 = den.trim().parse().map_err(|e| bad(&e))?;
            if den == 0.0 {
                return Err(bad(&"zero denominator"));
            }
            Ok(num / den)
        }
        None => s.parse().map_err(|e| bad(&e)),
    }
}

/// Command-line description of a function.
///
/// Grammar: `one`, `theta:<real>`, `theta:<real>+beta:<real>`,
/// `atoms:<path.json>`, `table:<name>` (a registered atom table).
#[derive(Debug, Clone, PartialEq)]
pub enum FnSpec {
    One,
    Theta { theta: f64, beta: Option<f64> },
    AtomFile(String),
    Named(String),
}

impl FromStr for FnSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "one" {
            return Ok(Self::One);
        }
        if let Some(body) = s.strip_prefix("theta:") {
            let (theta, beta) = match body.split_once('+') {
                Some((t, b)) => {
                    let b = b
                        .strip_prefix("beta:")
                        .ok_or_else(|| Error::Parse(format!("expected beta:<real> in {s:?}")))?;
                    (parse_real(t)?, Some(parse_real(b)?))
                }
                None => (parse_real(body)?, None),
            };
            return Ok(Self::Theta { theta, beta });
        }
        if let Some(path) = s.strip_prefix("atoms:") {
            return Ok(Self::AtomFile(path.to_string()));
        }
        if let Some(name) = s.strip_prefix("table:") {
            return Ok(Self::Named(name.to_string()));
        }
        Err(Error::Parse(format!("unknown function spec {s:?}")))
    }
}

/// Atom table document: `{"k": [[re, im], …]}`. Levels that are absent, and
/// trailing entries of a listed level, default to `1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtomDocument(pub BTreeMap<usize, Vec<[f64; 2]>>);

impl AtomDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("atom table: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn build(&self, scale: ConvergentTable) -> Result<AlphaFunction> {
        let positions = scale.digit_positions();
        if let Some((&k, _)) = self.0.range(positions..).next() {
            return Err(Error::Validation(format!(
                "atom level {k} beyond the scale"
            )));
        }
        let mut atoms = Vec::with_capacity(positions);
        for k in 0..positions {
            let a = scale.a(k + 1).expect("quotient for digit position") as usize;
            let mut row = vec![ONE; a + 1];
            if let Some(given) = self.0.get(&k) {
                if given.len() > a + 1 {
                    return Err(Error::Validation(format!(
                        "atom level {k} lists {} values, at most {} allowed",
                        given.len(),
                        a + 1
                    )));
                }
                for (slot, &[re, im]) in row.iter_mut().zip(given) {
                    *slot = Complex64::new(re, im);
                }
            }
            atoms.push(row);
        }
        AlphaFunction::from_atoms(scale, atoms)
    }
}

/// Named atom tables available to `table:<name>` specs.
#[derive(Debug, Clone, Default)]
pub struct AtomRegistry {
    tables: BTreeMap<String, AtomDocument>,
}

impl AtomRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, doc: AtomDocument) {
        self.tables.insert(name.into(), doc);
    }

    /// Registers the JSON document at `path` under `name`.
    pub fn load(&mut self, name: impl Into<String>, path: impl AsRef<Path>) -> Result<()> {
        let doc = AtomDocument::load(path)?;
        self.insert(name, doc);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &FnSpec, scale: ConvergentTable) -> Result<AlphaFunction> {
        match spec {
            FnSpec::One => Ok(AlphaFunction::one(scale)),
            FnSpec::Theta { theta, beta } => {
                let g = AlphaFunction::from_theta(*theta, scale);
                Ok(match beta {
                    Some(b) => g.twist(*b),
                    None => g,
                })
            }
            FnSpec::AtomFile(path) => AtomDocument::load(path)?.build(scale),
            FnSpec::Named(name) => self
                .tables
                .get(name)
                .ok_or_else(|| Error::Parse(format!("no atom table named {name:?}")))?
                .build(scale),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::{covering, QuotientSpec};
    use crate::numeration::sigma;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn golden(n: u64) -> ConvergentTable {
        covering(&QuotientSpec::golden(), n).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn theta_examples() {
        let g = AlphaFunction::from_theta(0.5, golden(100));
        assert!(close(g.eval(1).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
        assert!(close(g.eval(4).unwrap(), ONE, 1e-15));
        assert_eq!(g.eval(0).unwrap(), ONE);

        let g = AlphaFunction::from_theta(0.0, golden(100));
        for n in 0..100 {
            assert_eq!(g.eval(n).unwrap(), ONE);
        }

        let g = AlphaFunction::from_theta(1.0 / 3.0, golden(100));
        assert!(close(g.eval(4).unwrap(), phase::e(2.0 / 3.0), 1e-15));
    }

    #[test]
    fn custom_atom_single_digit() {
        let scale = golden(100);
        let mut doc = AtomDocument::default();
        doc.0.insert(1, vec![[1.0, 0.0], [0.0, 1.0]]);
        doc.0.insert(2, vec![[1.0, 0.0], [-1.0, 0.0]]);
        let g = doc.build(scale).unwrap();
        assert_eq!(g.eval(1).unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(g.eval(2).unwrap(), Complex64::new(-1.0, 0.0));
        // 4 = q_1 + q_3
        assert_eq!(g.eval(4).unwrap(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn corrupted_unit_atom_is_rejected() {
        let scale = golden(100);
        let mut atoms = AlphaFunction::one(scale.clone()).atoms().to_vec();
        atoms[2][0] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            AlphaFunction::from_atoms(scale.clone(), atoms),
            Err(Error::Validation(_))
        ));
        let doc = AtomDocument::from_json(r#"{"3": [[0.0, 1.0], [1.0, 0.0]]}"#).unwrap();
        assert!(matches!(doc.build(scale), Err(Error::Validation(_))));
    }

    #[test]
    fn truncation() {
        let g = AlphaFunction::from_theta(0.5, golden(1000));
        for n in 0..200 {
            assert_eq!(g.eval_truncated(0, n).unwrap(), ONE);
        }
        assert!(close(
            g.eval_truncated(2, 4).unwrap(),
            Complex64::new(-1.0, 0.0),
            1e-15
        ));
        let q5 = g.scale().q(5);
        for n in 0..q5 {
            assert_eq!(g.eval_truncated(5, n).unwrap(), g.eval(n).unwrap());
        }
    }

    #[test]
    fn twist_examples() {
        let g = AlphaFunction::from_theta(1.0 / 3.0, golden(1000));
        assert_eq!(g.twist(0.0), g);
        let one = AlphaFunction::one(golden(1000));
        assert!(close(
            one.twist(0.5).eval(3).unwrap(),
            Complex64::new(-1.0, 0.0),
            1e-12
        ));
    }

    #[test]
    fn twist_matches_linear_phase() {
        let scale = covering(&QuotientSpec::silver(), 1 << 40).unwrap();
        let g = AlphaFunction::from_theta(0.1234567, scale);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(0..1u64 << 40);
            let beta: f64 = rng.random();
            let h = g.twist(beta);
            let lhs = h.eval(n).unwrap();
            let rhs = g.eval(n).unwrap() * phase::e_neg_mul(n, beta);
            assert!(close(lhs, rhs, 1e-12), "n={n} β={beta}");
            assert!(h.is_unimodular());
        }
    }

    #[test]
    fn theta_agrees_with_sigma() {
        let scale = covering(
            &QuotientSpec::periodic(vec![], vec![1, 2, 3, 1, 1, 4]).unwrap(),
            10_000,
        )
        .unwrap();
        let g = AlphaFunction::from_theta(0.1234567, scale.clone());
        let values = g.values(0, 10_000).unwrap();
        for (n, v) in values.iter().enumerate() {
            let s = sigma(n as u64, &scale).unwrap();
            assert!(close(*v, phase::e_mul(s, 0.1234567), 1e-12));
            assert_eq!(*v, g.eval(n as u64).unwrap());
        }
    }

    #[test]
    fn multiplicative_over_digit_split() {
        let scale = covering(&QuotientSpec::periodic(vec![2], vec![1, 3]).unwrap(), 5_000).unwrap();
        let g = AlphaFunction::from_theta(0.377, scale.clone()).twist(0.21);
        for k in 1..scale.digit_positions() {
            let qk = scale.q(k);
            if qk > 200 {
                break;
            }
            let a = scale.a(k + 1).unwrap();
            for b in 0..=a {
                let cap = if b == a { scale.q(k - 1) } else { qk };
                for u in 0..cap {
                    let lhs = g.eval(u + b as u64 * qk).unwrap();
                    let rhs = g.eval(u).unwrap() * g.atom(k, b);
                    assert!(close(lhs, rhs, 1e-13), "k={k} b={b} u={u}");
                }
            }
        }
    }

    #[test]
    fn fn_spec_grammar() {
        assert_eq!("one".parse::<FnSpec>().unwrap(), FnSpec::One);
        assert_eq!(
            "theta:1/2".parse::<FnSpec>().unwrap(),
            FnSpec::Theta {
                theta: 0.5,
                beta: None
            }
        );
        assert_eq!(
            "theta:0.25+beta:1/4".parse::<FnSpec>().unwrap(),
            FnSpec::Theta {
                theta: 0.25,
                beta: Some(0.25)
            }
        );
        assert!("theta:0.25+gamma:1".parse::<FnSpec>().is_err());
        assert!("sin".parse::<FnSpec>().is_err());
    }

    #[test]
    fn registry_resolves_named_tables() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flip.json");
        std::fs::write(&path, r#"{"1": [[1,0],[-1,0]], "4": [[1,0],[0,-1]]}"#).unwrap();
        let mut reg = AtomRegistry::new();
        reg.load("flip", &path).unwrap();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["flip"]);
        let g = reg
            .build(&FnSpec::Named("flip".into()), golden(100))
            .unwrap();
        assert_eq!(g.eval(1).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(g.eval(5).unwrap(), Complex64::new(0.0, -1.0));
        let direct = reg
            .build(&FnSpec::AtomFile(path.display().to_string()), golden(100))
            .unwrap();
        assert_eq!(direct, g);
        assert!(reg
            .build(&FnSpec::Named("nope".into()), golden(100))
            .is_err());
    }

    proptest! {
        #[test]
        fn twisted_theta_is_unimodular(theta in -2.0f64..2.0, beta in -2.0f64..2.0) {
            let g = AlphaFunction::from_theta(theta, golden(1 << 30)).twist(beta);
            prop_assert!(g.is_unimodular());
            prop_assert!((g.modulus_bound() - 1.0).abs() < 1e-12);
            for n in [0u64, 1, 17, 1 << 20, (1 << 30) - 1] {
                prop_assert!((g.eval(n).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
