//! Finitely supported laws, their moments, and exact laws of independent
//! sums by convolution.
//!
//! Everything here is exact up to floating-point rounding: laws of sums are
//! enumerated, never sampled. Atoms closer than the merge tolerance
//! (default [`MERGE_TOL`]) are merged so that convolution does not split a
//! lattice point into rounding-noise neighbours.

use crate::error::{Result, SteinError};
use rand::Rng;
use std::io::{Read, Write};

/// Absolute tolerance under which two atoms are considered the same value.
pub const MERGE_TOL: f64 = 1e-12;
/// Default cap on the number of states materialized by one convolution step.
pub const DEFAULT_STATE_CAP: u128 = 10_000_000;

/// A probability law with finitely many atoms.
///
/// Atoms are strictly increasing, masses are positive and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    atoms: Vec<f64>,
    masses: Vec<f64>,
    cum: Vec<f64>,
}

/// Mean, variance and absolute third moment E|X|³ of a law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub abs_third: f64,
}

/// Builds a law from atoms and nonnegative weights; duplicates (within
/// [`MERGE_TOL`]) are merged and the weights normalized to total one.
pub fn make_finite(atoms: &[f64], masses: &[f64]) -> Result<FiniteDist> {
    FiniteDist::new(atoms, masses)
}

impl FiniteDist {
    pub fn new(atoms: &[f64], masses: &[f64]) -> Result<Self> {
        Self::with_tolerance(atoms, masses, MERGE_TOL)
    }

    pub fn with_tolerance(atoms: &[f64], masses: &[f64], tol: f64) -> Result<Self> {
        if atoms.len() != masses.len() {
            return Err(SteinError::LengthMismatch(atoms.len(), masses.len()));
        }
        if atoms.is_empty() {
            return Err(SteinError::EmptySupport);
        }
        for (&a, &m) in atoms.iter().zip(masses) {
            if !a.is_finite() || !m.is_finite() {
                return Err(SteinError::NonFinite(format!("atom {a}, mass {m}")));
            }
            if m < 0.0 {
                return Err(SteinError::NegativeMass(m, a));
            }
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(SteinError::ZeroMass);
        }
        let mut pairs: Vec<(f64, f64)> = atoms.iter().copied().zip(masses.iter().copied()).collect();
        Ok(Self::from_pairs(&mut pairs, tol, total))
    }

    /// Sort, merge within `tol`, drop zero masses, divide by `total`.
    fn from_pairs(pairs: &mut [(f64, f64)], tol: f64, total: f64) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut masses: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut start = f64::NEG_INFINITY;
        for &(a, m) in pairs.iter() {
            if !atoms.is_empty() && a - start <= tol {
                *masses.last_mut().unwrap() += m;
            } else {
                start = a;
                atoms.push(a);
                masses.push(m);
            }
        }
        let (atoms, masses): (Vec<f64>, Vec<f64>) = atoms
            .into_iter()
            .zip(masses)
            .filter(|&(_, m)| m > 0.0)
            .map(|(a, m)| (a, m / total))
            .unzip();
        let mut cum = Vec::with_capacity(masses.len());
        let mut acc = 0.0;
        for m in &masses {
            acc += m;
            cum.push(acc);
        }
        FiniteDist { atoms, masses, cum }
    }

    pub fn point_mass(x: f64) -> Self {
        FiniteDist { atoms: vec![x], masses: vec![1.0], cum: vec![1.0] }
    }

    /// ±a with probability ½ each.
    pub fn rademacher(a: f64) -> Self {
        Self::new(&[-a, a], &[0.5, 0.5]).expect("valid two-point law")
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.masses.iter().copied())
    }

    pub fn min(&self) -> f64 {
        self.atoms[0]
    }

    pub fn max(&self) -> f64 {
        *self.atoms.last().unwrap()
    }

    /// E f(X).
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.iter().map(|(a, m)| m * f(a)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn moments(&self) -> MomentSummary {
        moments(self)
    }

    /// P(X ≤ x).
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a <= x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1].min(1.0)
        }
    }

    /// P(a ≤ X ≤ b), with the endpoints widened by the merge tolerance.
    pub fn prob_between(&self, a: f64, b: f64) -> f64 {
        self.iter()
            .filter(|&(x, _)| x >= a - MERGE_TOL && x <= b + MERGE_TOL)
            .map(|(_, m)| m)
            .sum()
    }

    /// The law of cX.
    pub fn scale(&self, c: f64) -> FiniteDist {
        let mut pairs: Vec<(f64, f64)> = self.iter().map(|(a, m)| (c * a, m)).collect();
        Self::from_pairs(&mut pairs, MERGE_TOL, 1.0)
    }

    /// The law of X + c.
    pub fn shift(&self, c: f64) -> FiniteDist {
        let mut pairs: Vec<(f64, f64)> = self.iter().map(|(a, m)| (a + c, m)).collect();
        Self::from_pairs(&mut pairs, MERGE_TOL, 1.0)
    }

    /// The law of X − E X.
    pub fn centered(&self) -> FiniteDist {
        self.shift(-self.mean())
    }

    /// Exact law of X + Y for independent X ~ self, Y ~ other.
    pub fn convolve(&self, other: &FiniteDist) -> FiniteDist {
        let mut pairs = Vec::with_capacity(self.len() * other.len());
        for (a, p) in self.iter() {
            for (b, q) in other.iter() {
                pairs.push((a + b, p * q));
            }
        }
        Self::from_pairs(&mut pairs, MERGE_TOL, 1.0)
    }

    /// Inverse-cdf draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen::<f64>() * self.cum[self.cum.len() - 1];
        let k = self.cum.partition_point(|&c| c <= u).min(self.len() - 1);
        self.atoms[k]
    }

    /// Largest absolute mass difference after aligning atoms; infinite if
    /// the supports differ beyond `atom_tol`.
    pub fn max_mass_diff(&self, other: &FiniteDist, atom_tol: f64) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for ((a, p), (b, q)) in self.iter().zip(other.iter()) {
            if (a - b).abs() > atom_tol {
                return f64::INFINITY;
            }
            worst = worst.max((p - q).abs());
        }
        worst
    }

    /// Two-column CSV `atom,mass` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["atom", "mass"])?;
        for (a, m) in self.iter() {
            wtr.write_record([format!("{a:.16e}"), format!("{m:.16e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "atom" || &headers[1] != "mass" {
            return Err(SteinError::Config(format!("expected header `atom,mass`, got {headers:?}")));
        }
        let (mut atoms, mut masses) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| SteinError::Config(format!("bad number `{s}`: {e}")))
            };
            atoms.push(parse(&rec[0])?);
            masses.push(parse(&rec[1])?);
        }
        Self::new(&atoms, &masses)
    }
}

/// Exact moments by summation over atoms.
pub fn moments(d: &FiniteDist) -> MomentSummary {
    let mean = d.mean();
    let variance = d.expect(|x| (x - mean) * (x - mean)).max(0.0);
    let abs_third = d.expect(|x| x.abs().powi(3));
    MomentSummary { mean, variance, abs_third }
}

/// Independent centered summands X₁, …, Xₙ with W = ΣXᵢ.
#[derive(Debug, Clone, PartialEq)]
pub struct IndepSumModel {
    components: Vec<FiniteDist>,
    normalized: bool,
}

const MEAN_TOL: f64 = 1e-12;
const NORMALIZED_TOL: f64 = 1e-10;

impl IndepSumModel {
    /// Every component must have mean zero (within 1e-12 relative to its scale).
    pub fn new(components: Vec<FiniteDist>) -> Result<Self> {
        if components.is_empty() {
            return Err(SteinError::EmptySupport);
        }
        for (index, c) in components.iter().enumerate() {
            let mean = c.mean();
            let scale = c.min().abs().max(c.max().abs()).max(1.0);
            if mean.abs() > MEAN_TOL * scale {
                return Err(SteinError::NonzeroMean { index, mean });
            }
        }
        let total: f64 = components.iter().map(|c| moments(c).variance).sum();
        let normalized = (total - 1.0).abs() <= NORMALIZED_TOL;
        Ok(IndepSumModel { components, normalized })
    }

    /// `n` copies of `d`.
    pub fn iid(d: FiniteDist, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    /// n iid Rademacher(±1/√n) summands, so Var W = 1.
    pub fn rademacher(n: usize) -> Self {
        Self::iid(FiniteDist::rademacher(1.0 / (n as f64).sqrt()), n).expect("centered components")
    }

    pub fn components(&self) -> &[FiniteDist] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(SteinError::Unnormalized(self.total_variance()))
        }
    }

    /// Σσᵢ².
    pub fn total_variance(&self) -> f64 {
        self.components.iter().map(|c| moments(c).variance).sum()
    }

    /// Σ E|Xᵢ|³.
    pub fn sum_abs_third(&self) -> f64 {
        self.components.iter().map(|c| moments(c).abs_third).sum()
    }

    /// Whether all components are the same law (atoms and masses within 1e-12).
    pub fn is_iid(&self) -> bool {
        let first = &self.components[0];
        self.components.iter().all(|c| first.max_mass_diff(c, 1e-12) <= 1e-12)
    }

    /// The model with the first `k` components.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        Self::new(self.components[..k].to_vec())
    }

    /// The model without component `i`; W⁽ⁱ⁾ = W − Xᵢ.
    pub fn without(&self, i: usize) -> Vec<FiniteDist> {
        self.components.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| c.clone()).collect()
    }

    /// Draws (X₁, …, Xₙ) into `out`.
    pub fn sample_components<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.components.iter().map(|c| c.sample(rng)));
    }

    pub fn sample_sum<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.components.iter().map(|c| c.sample(rng)).sum()
    }
}

/// Exact law of W = ΣXᵢ with the default state cap.
pub fn sum_law(m: &IndepSumModel) -> Result<FiniteDist> {
    convolve_all(m.components(), DEFAULT_STATE_CAP)
}

/// Exact law of the sum of independent `laws` by iterated convolution.
///
/// `cap` bounds the number of (atom, atom) states built by any single
/// convolution step before merging; exceeding it is an error rather than a
/// truncation.
pub fn convolve_all(laws: &[FiniteDist], cap: u128) -> Result<FiniteDist> {
    let mut acc = FiniteDist::point_mass(0.0);
    for law in laws {
        let states = acc.len() as u128 * law.len() as u128;
        if states > cap {
            return Err(SteinError::StateCap { states, cap });
        }
        acc = acc.convolve(law);
    }
    Ok(acc)
}

/// Rescales every component by 1/√(ΣVar) so that Var W = 1.
pub fn standardize(m: &IndepSumModel) -> Result<IndepSumModel> {
    let total = m.total_variance();
    if total <= 0.0 {
        return Err(SteinError::ZeroVariance);
    }
    let s = 1.0 / total.sqrt();
    let components = m.components.iter().map(|c| c.scale(s)).collect();
    let mut out = IndepSumModel::new(components)?;
    out.normalized = (out.total_variance() - 1.0).abs() <= NORMALIZED_TOL;
    Ok(out)
}
