//! Exchangeable pairs (W, W′) for two built-in constructions, the checks
//! that make them usable for normal approximation, and the (W′ − W)
//! moments that feed the exchangeable-pair bounds.
//!
//! * Independent sums: W′ = W − X_I + X_I′ with I uniform and X_I′ an
//!   independent copy. Linear regression holds with λ = 1/n.
//! * Combinatorial sums: W = Σ c_{iπ(i)} for a uniform permutation π and a
//!   matrix with zero row and column sums; π′ = π∘(I J) for a uniform
//!   ordered pair I ≠ J. Linear regression holds with λ = 2/(n − 1) once
//!   n ≥ 3.
//!
//! Exact results come from enumerating the joint law of (W, W′) into a
//! [`JointLaw`]. Monte Carlo variants take a [`PairSampler`] and a master
//! seed and run on the chunked streams of [`crate::rng`].

use crate::couplings::PairSampler;
use crate::distributions::{convolve_all, FiniteDist, IndepSumModel, DEFAULT_STATE_CAP};
use crate::error::{Result, SteinError};
use crate::quadrature::gauss_legendre_on;
use crate::rng::{mc_mean, par_draws, Estimate, SteinRng};
use crate::stein_equation::RealFn;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::Serialize;
use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

/// Values of W closer than this are treated as the same atom.
pub const ATOM_TOL: f64 = 1e-9;

/// Minimum replication count for Monte Carlo pair statistics.
pub const MIN_PAIR_REPS: usize = 1000;

/// The n×n array of a combinatorial sum, with zero row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinatorialModel {
    n: usize,
    c: Vec<f64>,
    variance: f64,
}

/// What the CSV loader changed to make a matrix admissible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Adjustment {
    pub max_abs_row_mean: f64,
    pub max_abs_col_mean: f64,
    /// Var(W) before rescaling; entries were divided by its square root.
    pub original_variance: f64,
}

impl CombinatorialModel {
    /// Validates squareness, zero margins (1e-10) and Var(W) > 0.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::unchecked(rows)?;
        if m.variance <= 0.0 {
            return Err(SteinError::ZeroVariance);
        }
        Ok(m)
    }

    /// The all-zero array: W ≡ W′ ≡ 0. Only useful as a control.
    pub fn zero(n: usize) -> Result<Self> {
        Self::unchecked(vec![vec![0.0; n]; n])
    }

    fn unchecked(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(SteinError::Matrix(format!("need n ≥ 2, got {n}")));
        }
        if let Some(r) = rows.iter().position(|r| r.len() != n) {
            return Err(SteinError::Matrix(format!("row {r} has {} entries, expected {n}", rows[r].len())));
        }
        let c: Vec<f64> = rows.into_iter().flatten().collect();
        if c.iter().any(|x| !x.is_finite()) {
            return Err(SteinError::NonFinite("matrix entry".into()));
        }
        for i in 0..n {
            let row: f64 = c[i * n..(i + 1) * n].iter().sum();
            let col: f64 = (0..n).map(|k| c[k * n + i]).sum();
            if row.abs() > 1e-10 {
                return Err(SteinError::Matrix(format!("row {i} sums to {row:e}")));
            }
            if col.abs() > 1e-10 {
                return Err(SteinError::Matrix(format!("column {i} sums to {col:e}")));
            }
        }
        let variance = c.iter().map(|x| x * x).sum::<f64>() / (n - 1) as f64;
        Ok(CombinatorialModel { n, c, variance })
    }

    /// Double-centers `rows` (row means, then column means) and rescales to
    /// Var(W) = 1.
    pub fn admissible_from(rows: Vec<Vec<f64>>) -> Result<(Self, Adjustment)> {
        let n = rows.len();
        if n < 2 || rows.iter().any(|r| r.len() != n) {
            return Err(SteinError::Matrix(format!("expected a square array with n ≥ 2, got {n} rows")));
        }
        let mut rows = rows;
        let mut max_abs_row_mean: f64 = 0.0;
        for r in rows.iter_mut() {
            let mean = r.iter().sum::<f64>() / n as f64;
            max_abs_row_mean = max_abs_row_mean.max(mean.abs());
            r.iter_mut().for_each(|x| *x -= mean);
        }
        let mut max_abs_col_mean: f64 = 0.0;
        for j in 0..n {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            max_abs_col_mean = max_abs_col_mean.max(mean.abs());
            rows.iter_mut().for_each(|r| r[j] -= mean);
        }
        let centered = Self::new(rows)?;
        let adj = Adjustment { max_abs_row_mean, max_abs_col_mean, original_variance: centered.variance };
        Ok((centered.normalized(), adj))
    }

    /// Reads n lines of n comma-separated reals and makes them admissible.
    pub fn from_csv<R: Read>(r: R) -> Result<(Self, Adjustment)> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| SteinError::Matrix(format!("`{s}`: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::admissible_from(rows)
    }

    pub fn load(path: &Path) -> Result<(Self, Adjustment)> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.c.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Var(W) = Σ c²/(n − 1) over a uniform permutation.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn is_normalized(&self) -> bool {
        (self.variance - 1.0).abs() <= 1e-8
    }

    pub fn normalized(&self) -> Self {
        if self.variance <= 0.0 {
            return self.clone();
        }
        let s = self.variance.sqrt();
        let c: Vec<f64> = self.c.iter().map(|x| x / s).collect();
        let variance = c.iter().map(|x| x * x).sum::<f64>() / (self.n - 1) as f64;
        CombinatorialModel { n: self.n, c, variance }
    }

    /// W = Σᵢ c_{iπ(i)}.
    pub fn w(&self, perm: &[usize]) -> f64 {
        perm.iter().enumerate().map(|(i, &p)| self.c(i, p)).sum()
    }

    /// W′ − W after swapping the images of i and j.
    pub fn swap_delta(&self, perm: &[usize], i: usize, j: usize) -> f64 {
        let (pi, pj) = (perm[i], perm[j]);
        self.c(i, pj) + self.c(j, pi) - self.c(i, pi) - self.c(j, pj)
    }

    /// The regression coefficient of the transposition pair.
    pub fn lambda(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Exact law of W over all n! permutations.
pub fn comb_law(cm: &CombinatorialModel, cap: u128) -> Result<FiniteDist> {
    let states = factorial(cm.n);
    if states > cap {
        return Err(SteinError::StateCap { states, cap });
    }
    let atoms: Vec<f64> = (0..cm.n).permutations(cm.n).map(|p| cm.w(&p)).collect();
    let masses = vec![1.0; atoms.len()];
    FiniteDist::new(&atoms, &masses)
}

/// A joint pmf of (W, W′) on a common set of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    atoms: Vec<f64>,
    /// (index of w, index of w′, mass), sorted and merged.
    pmf: Vec<(usize, usize, f64)>,
    states: usize,
}

impl JointLaw {
    /// Builds the law from weighted (w, w′) states; values within
    /// [`ATOM_TOL`] of a cluster's first value share an atom.
    pub fn from_states(states: &[(f64, f64, f64)]) -> Result<Self> {
        if states.is_empty() {
            return Err(SteinError::EmptySupport);
        }
        let mut values: Vec<f64> = states.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        values.sort_by(f64::total_cmp);
        let mut atoms: Vec<f64> = Vec::new();
        let mut upper: Vec<f64> = Vec::new();
        for v in values {
            match atoms.last() {
                Some(&a) if v - a <= ATOM_TOL => *upper.last_mut().unwrap() = v,
                _ => {
                    atoms.push(v);
                    upper.push(v);
                }
            }
        }
        let index = |v: f64| upper.partition_point(|&u| u < v);
        let total: f64 = states.iter().map(|s| s.2).sum();
        let mut acc: HashMap<(usize, usize), f64> = HashMap::new();
        for &(a, b, p) in states {
            *acc.entry((index(a), index(b))).or_insert(0.0) += p / total;
        }
        let mut pmf: Vec<(usize, usize, f64)> = acc.into_iter().map(|((i, j), p)| (i, j, p)).collect();
        pmf.sort_by_key(|x| (x.0, x.1));
        Ok(JointLaw { atoms, pmf, states: states.len() })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn pmf(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.pmf.iter().map(|&(i, j, p)| (self.atoms[i], self.atoms[j], p))
    }

    /// Number of enumerated states before merging.
    pub fn states(&self) -> usize {
        self.states
    }

    pub fn expect<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.pmf().map(|(w, v, p)| p * f(w, v)).sum()
    }

    pub fn marginal_w(&self) -> Result<FiniteDist> {
        let (a, m): (Vec<f64>, Vec<f64>) = self.pmf().map(|(w, _, p)| (w, p)).unzip();
        FiniteDist::new(&a, &m)
    }

    pub fn marginal_w_prime(&self) -> Result<FiniteDist> {
        let (a, m): (Vec<f64>, Vec<f64>) = self.pmf().map(|(_, v, p)| (v, p)).unzip();
        FiniteDist::new(&a, &m)
    }

    /// (w, P(W = w), E[g(W, W′) | W = w]) for each atom of W.
    pub fn conditional<F: Fn(f64, f64) -> f64>(&self, g: F) -> Vec<(f64, f64, f64)> {
        let mut out: Vec<(f64, f64, f64)> = Vec::new();
        for (i, group) in &self.pmf.iter().chunk_by(|e| e.0) {
            let (mut mass, mut sum) = (0.0, 0.0);
            for &(_, j, p) in group {
                mass += p;
                sum += p * g(self.atoms[i], self.atoms[j]);
            }
            out.push((self.atoms[i], mass, sum / mass));
        }
        out
    }

    /// max |P(W = a, W′ = b) − P(W = b, W′ = a)|.
    pub fn swap_asymmetry(&self) -> f64 {
        let find = |i: usize, j: usize| {
            self.pmf
                .binary_search_by(|e| (e.0, e.1).cmp(&(i, j)))
                .map(|k| self.pmf[k].2)
                .unwrap_or(0.0)
        };
        self.pmf.iter().map(|&(i, j, p)| (p - find(j, i)).abs()).fold(0.0, f64::max)
    }

    /// 1 − E[WW′]/E[W²], the least-squares regression slope deficit.
    pub fn fitted_lambda(&self) -> f64 {
        1.0 - self.expect(|w, v| w * v) / self.expect(|w, _| w * w)
    }
}

/// Exact joint law of the independent-sum pair, via the law of W⁽ⁱ⁾.
pub fn example1_joint(m: &IndepSumModel, cap: u128) -> Result<JointLaw> {
    let n = m.n();
    let rest: Vec<FiniteDist> = (0..n)
        .map(|i| {
            let others = m.without(i);
            if others.is_empty() {
                Ok(FiniteDist::point_mass(0.0))
            } else {
                convolve_all(&others, cap)
            }
        })
        .collect::<Result<_>>()?;
    let count: u128 = rest
        .iter()
        .zip(m.components())
        .map(|(r, x)| (r.len() * x.len() * x.len()) as u128)
        .sum();
    if count > cap {
        return Err(SteinError::StateCap { states: count, cap });
    }
    let mut states = Vec::with_capacity(count as usize);
    for (r, x) in rest.iter().zip(m.components()) {
        for (s, ps) in r.iter() {
            for (a, pa) in x.iter() {
                for (b, pb) in x.iter() {
                    states.push((s + a, s + b, ps * pa * pb / n as f64));
                }
            }
        }
    }
    JointLaw::from_states(&states)
}

/// Exact joint law of the transposition pair over n!·n(n − 1) states.
pub fn example2_joint(cm: &CombinatorialModel, cap: u128) -> Result<JointLaw> {
    let n = cm.n;
    let count = factorial(n) * (n * (n - 1)) as u128;
    if count > cap {
        return Err(SteinError::StateCap { states: count, cap });
    }
    let mut states = Vec::with_capacity(count as usize);
    for perm in (0..n).permutations(n) {
        let w = cm.w(&perm);
        for (i, j) in (0..n).cartesian_product(0..n).filter(|(i, j)| i != j) {
            states.push((w, w + cm.swap_delta(&perm, i, j), 1.0));
        }
    }
    JointLaw::from_states(&states)
}

/// One draw of the independent-sum pair.
pub fn pair_indep<R: Rng + ?Sized>(m: &IndepSumModel, rng: &mut R) -> (f64, f64) {
    let comps = m.components();
    let mut w = 0.0;
    let i = rng.gen_range(0..comps.len());
    let mut xi = 0.0;
    for (k, c) in comps.iter().enumerate() {
        let x = c.sample(rng);
        if k == i {
            xi = x;
        }
        w += x;
    }
    let fresh = comps[i].sample(rng);
    (w, w - xi + fresh)
}

/// One draw of the transposition pair.
pub fn pair_comb<R: Rng + ?Sized>(cm: &CombinatorialModel, rng: &mut R) -> (f64, f64) {
    let n = cm.n;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let w = cm.w(&perm);
    (w, w + cm.swap_delta(&perm, i, j))
}

#[derive(Debug, Clone)]
pub struct IndepPairSampler(pub IndepSumModel);

impl PairSampler for IndepPairSampler {
    fn sample_pair(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        pair_indep(&self.0, rng)
    }
}

#[derive(Debug, Clone)]
pub struct CombPairSampler(pub CombinatorialModel);

impl PairSampler for CombPairSampler {
    fn sample_pair(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        pair_comb(&self.0, rng)
    }
}

/// max over atoms w of |E(W′ | W = w) − (1 − λ)w|.
pub fn regression_check(joint: &JointLaw, lambda: f64) -> f64 {
    joint
        .conditional(|_, v| v)
        .into_iter()
        .map(|(w, _, m)| (m - (1.0 - lambda) * w).abs())
        .fold(0.0, f64::max)
}

/// Exact E(W′ − W)(f(W′) + f(W)).
pub fn antisymmetry_exact<F: Fn(f64) -> f64>(joint: &JointLaw, f: F) -> f64 {
    joint.expect(|w, v| (v - w) * (f(v) + f(w)))
}

/// Monte Carlo E(W′ − W)(f(W′) + f(W)); zero within a few SE for any
/// exchangeable pair.
pub fn antisymmetry_check<S, F>(sampler: &S, f: F, reps: usize, seed: u64) -> Estimate
where
    S: PairSampler + Sync + ?Sized,
    F: Fn(f64) -> f64 + Sync,
{
    mc_mean(reps, seed, |rng| {
        let (w, v) = sampler.sample_pair(rng);
        (v - w) * (f(v) + f(w))
    })
}

/// How a [`PairStats`] was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum StatsMode {
    Exact { states: usize },
    MonteCarlo {
        reps: usize,
        seed: u64,
        /// Equal-count quantile bins on W used for E[(W′ − W)² | W].
        bins: usize,
        mean_sq_diff_se: f64,
        cond_var_se: f64,
        abs_cubed_se: f64,
    },
}

/// Moments of D = W′ − W entering the exchangeable-pair bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStats {
    pub lambda: f64,
    /// E D²
    pub mean_sq_diff: f64,
    /// Var E[D² | W]
    pub cond_var: f64,
    /// E|D|³
    pub abs_cubed: f64,
    pub mode: StatsMode,
}

impl PairStats {
    /// |E D² − 2λ|, to be compared with 1e-10 (exact) or 3 SE (MC).
    pub fn variance_gap(&self) -> f64 {
        (self.mean_sq_diff - 2.0 * self.lambda).abs()
    }

    pub fn variance_condition_holds(&self) -> bool {
        match self.mode {
            StatsMode::Exact { .. } => self.variance_gap() <= 1e-10,
            StatsMode::MonteCarlo { mean_sq_diff_se, .. } => self.variance_gap() <= 3.0 * mean_sq_diff_se,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(SteinError::Lambda(lambda))
    }
}

pub fn pair_stats_exact(joint: &JointLaw, lambda: f64) -> Result<PairStats> {
    check_lambda(lambda)?;
    let cond = joint.conditional(|w, v| (v - w).powi(2));
    let mean_sq_diff: f64 = cond.iter().map(|(_, p, c)| p * c).sum();
    let cond_var = cond.iter().map(|(_, p, c)| p * (c - mean_sq_diff).powi(2)).sum();
    let abs_cubed = joint.expect(|w, v| (v - w).abs().powi(3));
    Ok(PairStats { lambda, mean_sq_diff, cond_var, abs_cubed, mode: StatsMode::Exact { states: joint.states() } })
}

/// Variance of within-bin means of `y` after sorting by `w` into `bins`
/// equal-count bins.
fn binned_cond_var(pairs: &mut [(f64, f64)], bins: usize) -> f64 {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = pairs.len();
    let mean = pairs.iter().map(|p| p.1).sum::<f64>() / m as f64;
    (0..bins)
        .map(|b| {
            let (lo, hi) = (b * m / bins, (b + 1) * m / bins);
            let slice = &pairs[lo..hi];
            let bm = slice.iter().map(|p| p.1).sum::<f64>() / slice.len() as f64;
            slice.len() as f64 * (bm - mean).powi(2)
        })
        .sum::<f64>()
        / m as f64
}

/// Monte Carlo pair statistics. E[D² | W] is estimated by equal-count
/// binning on W with ⌈reps^{1/3}⌉ bins unless `bins` is given; the SE of
/// cond_var comes from ten interleaved batches.
pub fn pair_stats_mc<S>(sampler: &S, lambda: f64, reps: usize, seed: u64, bins: Option<usize>) -> Result<PairStats>
where
    S: PairSampler + Sync + ?Sized,
{
    check_lambda(lambda)?;
    if reps < MIN_PAIR_REPS {
        return Err(SteinError::SampleTooSmall { got: reps, need: MIN_PAIR_REPS });
    }
    let draws: Vec<(f64, f64)> = par_draws(reps, seed, |rng: &mut SteinRng| sampler.sample_pair(rng));
    let d2: Vec<f64> = draws.iter().map(|(w, v)| (v - w).powi(2)).collect();
    let d3: Vec<f64> = draws.iter().map(|(w, v)| (v - w).abs().powi(3)).collect();
    let (mean_sq_diff, mean_sq_diff_se) = crate::rng::mean_se(&d2);
    let (abs_cubed, abs_cubed_se) = crate::rng::mean_se(&d3);
    let bins = bins.unwrap_or_else(|| (reps as f64).cbrt().ceil() as usize).clamp(1, reps);
    let mut pairs: Vec<(f64, f64)> = draws.iter().zip(&d2).map(|(p, &y)| (p.0, y)).collect();
    let cond_var = binned_cond_var(&mut pairs, bins);
    const BATCHES: usize = 10;
    let batch: Vec<f64> = (0..BATCHES)
        .map(|k| {
            let mut sub: Vec<(f64, f64)> = draws
                .iter()
                .zip(&d2)
                .skip(k)
                .step_by(BATCHES)
                .map(|(p, &y)| (p.0, y))
                .collect();
            let b = ((sub.len() as f64).cbrt().ceil() as usize).max(1);
            binned_cond_var(&mut sub, b)
        })
        .collect();
    let cond_var_se = crate::rng::mean_se(&batch).1 / (BATCHES as f64).sqrt();
    Ok(PairStats {
        lambda,
        mean_sq_diff,
        cond_var,
        abs_cubed,
        mode: StatsMode::MonteCarlo { reps, seed, bins, mean_sq_diff_se, cond_var_se, abs_cubed_se },
    })
}

/// A function with three derivatives, for the generator identity.
pub trait Smooth3: Sync {
    /// k-th derivative at w, k ∈ 0..=3.
    fn d(&self, k: usize, w: f64) -> f64;
}

/// c₀ + c₁w + c₂w² + ⋯
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Smooth3 for Polynomial {
    fn d(&self, k: usize, w: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .skip(k)
            .map(|(p, &c)| c * (p - k + 1..=p).map(|x| x as f64).product::<f64>() * w.powi((p - k) as i32))
            .sum()
    }
}

/// Tabulated f, f′, f″, f‴.
#[derive(Clone)]
pub struct Derivatives(pub [RealFn; 4]);

impl Smooth3 for Derivatives {
    fn d(&self, k: usize, w: f64) -> f64 {
        (self.0[k])(w)
    }
}

/// Per-state lhs − rhs of the generator identity; `rem` is the remainder
/// weight integral ∫₀¹ (1−s)²/2 f‴(w + sD) ds.
fn generator_term(f: &dyn Smooth3, lambda: f64, w: f64, v: f64, rem: f64) -> f64 {
    let d = v - w;
    let lhs = f.d(2, w) - w * f.d(1, w);
    let rhs = (1.0 - d * d / (2.0 * lambda)) * f.d(2, w) - d.powi(3) * rem / lambda;
    lhs - rhs
}

/// Monte Carlo residual of
/// E{f″(W) − Wf′(W)} = E{(1 − D²/2λ) f″(W)} − (1/λ) E D³U₁²U₂ f‴(W + DU₁U₂U₃).
pub fn generator_identity_residual<S>(sampler: &S, f: &dyn Smooth3, lambda: f64, reps: usize, seed: u64) -> Estimate
where
    S: PairSampler + Sync + ?Sized,
{
    mc_mean(reps, seed, |rng| {
        let (w, v) = sampler.sample_pair(rng);
        let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
        let rem = u1 * u1 * u2 * f.d(3, w + (v - w) * u1 * u2 * u3);
        generator_term(f, lambda, w, v, rem)
    })
}

/// The same residual with the uniform integrals done by Gauss–Legendre
/// over an exactly enumerated pair.
pub fn generator_identity_exact(joint: &JointLaw, f: &dyn Smooth3, lambda: f64) -> f64 {
    let (s, ws) = gauss_legendre_on(16, 0.0, 1.0);
    joint.expect(|w, v| {
        let rem: f64 = s.iter().zip(&ws).map(|(&s, &q)| q * 0.5 * (1.0 - s).powi(2) * f.d(3, w + s * (v - w))).sum();
        generator_term(f, lambda, w, v, rem)
    })
}

/// Default enumeration cap for joint laws.
pub const JOINT_STATE_CAP: u128 = DEFAULT_STATE_CAP;
