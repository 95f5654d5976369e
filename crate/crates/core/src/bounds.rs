//! Explicit normal-approximation error bounds, each packaged with the
//! distance it controls so that domination can be checked.
//!
//! | bound | distance | value |
//! |---|---|---|
//! | [`dw_indep`] | Wasserstein | 3 Σ E\|Xᵢ\|³ |
//! | [`dw_zero_bias`] | Wasserstein | 2 E\|W* − W\| |
//! | [`be_iid`] | Kolmogorov | 6.5 γ/(σ³√n) |
//! | [`concentration_bound`] | P(a ≤ W⁽ⁿ⁻¹⁾ ≤ b) | (b − a) + 2n E\|X₁\|³ |
//! | [`dw_exchangeable`] | Wasserstein | (1/2λ)√Var E[D²\|W] + (1/2λ) E\|D\|³ |
//! | [`dk_exchangeable`] | Kolmogorov | (1/λ)√Var E[D²\|W] + (2π)^{−1/4} √(E\|D\|³/λ) |
//! | [`dtv_interpolation`] | total variation | 2√Var T(X) |

use crate::couplings::{PairSampler, ZeroBiasIndepSampler};
use crate::distances::{distances_mc, kolmogorov_exact, wasserstein_exact, EmpiricalSample};
use crate::distributions::{sum_law, FiniteDist, IndepSumModel};
use crate::error::{Result, SteinError};
use crate::exchangeable::{PairStats, StatsMode};
use crate::quadrature::gauss_legendre_on;
use crate::rng::{mc_mean, mean_se, par_draws, SteinRng};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// d_W(W, Z) ≤ E|W| + E|Z| ≤ 1 + √(2/π) for standardized W.
pub const TRIVIAL_WASSERSTEIN_CAP: f64 = 1.797_884_560_802_865_4;

pub const MIN_ZERO_BIAS_REPS: usize = 1000;
pub const MIN_INNER_REPS: usize = 100;
pub const MIN_QUAD_POINTS: usize = 8;
pub const DEFAULT_QUAD_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Wasserstein,
    Kolmogorov,
    TotalVariation,
    /// Not a distance: the concentration bound controls a probability.
    Probability,
}

impl std::fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DistanceKind::Wasserstein => "wasserstein",
            DistanceKind::Kolmogorov => "kolmogorov",
            DistanceKind::TotalVariation => "total_variation",
            DistanceKind::Probability => "probability",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DistanceMode {
    Exact,
    MonteCarlo { reps: usize, seed: Option<u64>, std_err: f64 },
}

/// A bound value together with the distance it is meant to dominate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub bound_value: f64,
    /// Present when the bound itself is a Monte Carlo estimate.
    pub bound_std_err: Option<f64>,
    pub distance_kind: DistanceKind,
    pub empirical_distance: Option<f64>,
    pub distance_mode: Option<DistanceMode>,
    /// `None` when no distance is attached, or when bound and distance
    /// are within 3 combined standard errors of each other.
    pub dominates: Option<bool>,
    pub vacuous: bool,
    pub inputs_digest: String,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub extras: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// The flat row written to CSV and used in tabular JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub bound_name: String,
    pub bound_value: f64,
    pub distance_kind: DistanceKind,
    pub empirical_distance: Option<f64>,
    pub std_err: Option<f64>,
    pub dominates: Option<bool>,
    pub vacuous: bool,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
}

pub const RECORD_HEADER: [&str; 9] = [
    "bound_name",
    "bound_value",
    "distance_kind",
    "empirical_distance",
    "std_err",
    "dominates",
    "vacuous",
    "seed",
    "reps",
];

impl BoundReport {
    pub fn new(name: impl Into<String>, value: f64, kind: DistanceKind, digest: impl Into<String>) -> Self {
        let mut r = BoundReport {
            bound_name: name.into(),
            bound_value: value,
            bound_std_err: None,
            distance_kind: kind,
            empirical_distance: None,
            distance_mode: None,
            dominates: None,
            vacuous: false,
            inputs_digest: digest.into(),
            seed: None,
            reps: None,
            extras: BTreeMap::new(),
            notes: Vec::new(),
        };
        r.vacuous = r.is_vacuous();
        r
    }

    fn is_vacuous(&self) -> bool {
        match self.distance_kind {
            DistanceKind::Wasserstein => self.bound_value >= TRIVIAL_WASSERSTEIN_CAP,
            _ => self.bound_value >= 1.0,
        }
    }

    fn with_mc_bound(mut self, std_err: f64, reps: usize, seed: u64) -> Self {
        self.bound_std_err = Some(std_err);
        self.reps = Some(reps);
        self.seed = Some(seed);
        self.refresh();
        self
    }

    fn distance_std_err(&self) -> Option<f64> {
        match self.distance_mode {
            Some(DistanceMode::MonteCarlo { std_err, .. }) => Some(std_err),
            _ => None,
        }
    }

    /// sqrt(bound SE² + distance SE²), if either is random.
    pub fn std_err(&self) -> Option<f64> {
        match (self.bound_std_err, self.distance_std_err()) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0).hypot(b.unwrap_or(0.0))),
        }
    }

    fn refresh(&mut self) {
        self.dominates = self.empirical_distance.and_then(|d| match self.std_err() {
            None => Some(d <= self.bound_value),
            Some(s) if (self.bound_value - d).abs() <= 3.0 * s => None,
            Some(_) => Some(d <= self.bound_value),
        });
    }

    /// True when the check failed with an exact distance.
    pub fn exact_violation(&self) -> bool {
        matches!(self.distance_mode, Some(DistanceMode::Exact)) && self.dominates == Some(false)
    }

    /// Is the distance at most bound + k·SE?
    pub fn dominates_within(&self, k: f64) -> Option<bool> {
        self.empirical_distance.map(|d| d <= self.bound_value + k * self.std_err().unwrap_or(0.0))
    }

    /// Attaches an exactly computed distance.
    pub fn with_exact(mut self, distance: f64) -> Self {
        self.empirical_distance = Some(distance);
        self.distance_mode = Some(DistanceMode::Exact);
        self.refresh();
        self
    }

    /// Attaches the exact d_W or d_K of `law` to Z, matching the bound's kind.
    pub fn with_exact_law(self, law: &FiniteDist) -> Self {
        match self.distance_kind {
            DistanceKind::Wasserstein => self.with_exact(wasserstein_exact(law)),
            DistanceKind::Kolmogorov => self.with_exact(kolmogorov_exact(law)),
            _ => self,
        }
    }

    /// Attaches a Monte Carlo distance estimate.
    pub fn with_mc_distance(mut self, distance: f64, std_err: f64, reps: usize, seed: Option<u64>) -> Self {
        self.empirical_distance = Some(distance);
        self.distance_mode = Some(DistanceMode::MonteCarlo { reps, seed, std_err });
        if self.seed.is_none() {
            self.seed = seed;
        }
        if self.reps.is_none() {
            self.reps = Some(reps);
        }
        self.refresh();
        self
    }

    /// Attaches d_W or d_K estimated from a sample of W.
    pub fn with_mc(self, sample: &EmpiricalSample) -> Result<Self> {
        let mc = distances_mc(sample)?;
        Ok(match self.distance_kind {
            DistanceKind::Wasserstein => {
                let se = mc.d_w_std_err + mc.dw_grid_bias;
                self.with_mc_distance(mc.d_w, se, mc.m, sample.seed)
            }
            DistanceKind::Kolmogorov => self.with_mc_distance(mc.d_k, mc.d_k_std_err, mc.m, sample.seed),
            _ => self,
        })
    }

    pub fn record(&self) -> BoundRecord {
        BoundRecord {
            bound_name: self.bound_name.clone(),
            bound_value: self.bound_value,
            distance_kind: self.distance_kind,
            empirical_distance: self.empirical_distance,
            std_err: self.std_err(),
            dominates: self.dominates,
            vacuous: self.vacuous,
            seed: self.seed,
            reps: self.reps,
        }
    }
}

/// Writes records as CSV with the fixed header.
pub fn write_records<W: std::io::Write>(reports: &[BoundReport], w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(RECORD_HEADER)?;
    for r in reports {
        wtr.serialize(r.record())?;
    }
    wtr.flush()?;
    Ok(())
}

/// FNV-1a over the bit patterns of a model's numbers, prefixed by a label.
pub fn digest(label: &str, numbers: impl IntoIterator<Item = f64>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in numbers {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{label}#{h:016x}")
}

pub fn model_digest(m: &IndepSumModel) -> String {
    let nums = m.components().iter().flat_map(|c| c.atoms().iter().chain(c.masses()).copied().collect::<Vec<_>>());
    digest(&format!("indep_sum(n={})", m.n()), nums)
}

/// 3 Σ E|Xᵢ|³ ≥ d_W(W, Z).
pub fn dw_indep(m: &IndepSumModel) -> Result<BoundReport> {
    m.require_normalized()?;
    Ok(BoundReport::new("dw_indep", 3.0 * m.sum_abs_third(), DistanceKind::Wasserstein, model_digest(m)))
}

/// 2 Ê|W* − W| from `reps` coupled draws.
pub fn dw_zero_bias<S>(coupling: &S, reps: usize, seed: u64) -> Result<BoundReport>
where
    S: PairSampler + Sync + ?Sized,
{
    if reps < MIN_ZERO_BIAS_REPS {
        return Err(SteinError::SampleTooSmall { got: reps, need: MIN_ZERO_BIAS_REPS });
    }
    let e = mc_mean(reps, seed, |rng| {
        let (w, ws) = coupling.sample_pair(rng);
        (ws - w).abs()
    });
    Ok(BoundReport::new("dw_zero_bias", 2.0 * e.mean, DistanceKind::Wasserstein, "zero_bias_coupling")
        .with_mc_bound(2.0 * e.std_err, reps, seed))
}

/// 2 E|W* − W| computed exactly for the independent-index coupling.
pub fn dw_zero_bias_exact(s: &ZeroBiasIndepSampler) -> BoundReport {
    let parts: Vec<f64> = s.kernels().iter().flat_map(|k| k.source.atoms().iter().chain(k.source.masses()).copied().collect::<Vec<_>>()).collect();
    BoundReport::new(
        "dw_zero_bias",
        2.0 * s.exact_mean_abs_gap(),
        DistanceKind::Wasserstein,
        digest(&format!("indep_sum(n={})", s.kernels().len()), parts),
    )
}

/// 6.5 γ/(σ³√n) ≥ d_K(W, Z) for n iid summands with variance σ² and
/// E|X₁|³ = γ.
pub fn be_iid(sigma: f64, gamma: f64, n: usize) -> Result<BoundReport> {
    if !(sigma > 0.0) || !sigma.is_finite() || !gamma.is_finite() {
        return Err(SteinError::InvalidMoments(format!("sigma = {sigma}, gamma = {gamma}")));
    }
    if gamma < sigma.powi(3) * (1.0 - 1e-12) {
        return Err(SteinError::InvalidMoments(format!("gamma = {gamma} < sigma³ = {}", sigma.powi(3))));
    }
    if n == 0 {
        return Err(SteinError::InvalidMoments("n = 0".into()));
    }
    let value = 6.5 * gamma / (sigma.powi(3) * (n as f64).sqrt());
    let d = digest(&format!("iid(n={n})"), [sigma, gamma]);
    let mut r = BoundReport::new("be_iid", value, DistanceKind::Kolmogorov, d);
    r.extras.insert("lyapunov_ratio".into(), gamma / sigma.powi(3));
    Ok(r)
}

/// [`be_iid`] with moments read off an iid model.
pub fn be_iid_model(m: &IndepSumModel) -> Result<BoundReport> {
    if !m.is_iid() {
        return Err(SteinError::NotIid);
    }
    let s = m.components()[0].moments();
    let mut r = be_iid(s.variance.sqrt(), s.abs_third, m.n())?;
    r.inputs_digest = model_digest(m);
    Ok(r)
}

/// P(a ≤ W⁽ⁿ⁻¹⁾ ≤ b) ≤ (b − a) + 2n E|X₁|³ for a normalized iid model, where
/// W⁽ⁿ⁻¹⁾ sums the first n − 1 summands. The exact probability is attached
/// as the "distance"; `extras["e_abs_t"]` is E|T| = n E|X₁|³/2.
pub fn concentration_bound(m: &IndepSumModel, a: f64, b: f64) -> Result<BoundReport> {
    if !m.is_iid() {
        return Err(SteinError::NotIid);
    }
    m.require_normalized()?;
    if a > b || !a.is_finite() || !b.is_finite() {
        return Err(SteinError::Interval(a, b));
    }
    let n = m.n();
    let third = m.components()[0].moments().abs_third;
    let value = (b - a) + 2.0 * n as f64 * third;
    let law = if n > 1 { sum_law(&m.prefix(n - 1)?)? } else { FiniteDist::point_mass(0.0) };
    let mut r = BoundReport::new("concentration", value, DistanceKind::Probability, model_digest(m))
        .with_exact(law.prob_between(a, b));
    r.extras.insert("a".into(), a);
    r.extras.insert("b".into(), b);
    r.extras.insert("e_abs_t".into(), n as f64 * third / 2.0);
    Ok(r)
}

fn pair_digest(stats: &PairStats) -> String {
    digest("pair_stats", [stats.lambda, stats.mean_sq_diff, stats.cond_var, stats.abs_cubed])
}

fn pair_provenance(r: &mut BoundReport, stats: &PairStats, se: Option<f64>) {
    if let StatsMode::MonteCarlo { reps, seed, .. } = stats.mode {
        r.reps = Some(reps);
        r.seed = Some(seed);
        r.bound_std_err = se;
        r.refresh();
    }
    if r.bound_value == 0.0 {
        // W′ ≡ W: the bound degenerates but a finitely supported W is never normal
        r.vacuous = true;
        r.notes.push("degenerate pair statistics: bound is 0 but W cannot equal Z in law".into());
    }
}

fn stats_ses(stats: &PairStats) -> Option<(f64, f64)> {
    match stats.mode {
        StatsMode::MonteCarlo { cond_var_se, abs_cubed_se, .. } => Some((cond_var_se, abs_cubed_se)),
        StatsMode::Exact { .. } => None,
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(SteinError::Lambda(lambda))
    }
}

/// Delta-method SE of √v.
fn sqrt_se(v: f64, se: f64) -> f64 {
    if v > 0.0 {
        se / (2.0 * v.sqrt())
    } else {
        se.sqrt()
    }
}

/// (1/2λ)√Var E[D² | W] + (1/2λ) E|D|³ ≥ d_W(W, Z).
pub fn dw_exchangeable(stats: &PairStats) -> Result<BoundReport> {
    check_lambda(stats.lambda)?;
    let c = 1.0 / (2.0 * stats.lambda);
    let value = c * stats.cond_var.max(0.0).sqrt() + c * stats.abs_cubed;
    let mut r = BoundReport::new("dw_exchangeable", value, DistanceKind::Wasserstein, pair_digest(stats));
    let se = stats_ses(stats).map(|(v, a)| c * sqrt_se(stats.cond_var.max(0.0), v).hypot(a));
    pair_provenance(&mut r, stats, se);
    Ok(r)
}

/// (1/λ)√Var E[D² | W] + (2π)^{−1/4} √(E|D|³/λ) ≥ d_K(W, Z).
pub fn dk_exchangeable(stats: &PairStats) -> Result<BoundReport> {
    check_lambda(stats.lambda)?;
    let k = (2.0 * PI).powf(-0.25);
    let first = stats.cond_var.max(0.0).sqrt() / stats.lambda;
    let second = k * (stats.abs_cubed / stats.lambda).sqrt();
    let mut r = BoundReport::new("dk_exchangeable", first + second, DistanceKind::Kolmogorov, pair_digest(stats));
    let se = stats_ses(stats).map(|(v, a)| {
        (sqrt_se(stats.cond_var.max(0.0), v) / stats.lambda).hypot(k * sqrt_se(stats.abs_cubed / stats.lambda, a / stats.lambda))
    });
    pair_provenance(&mut r, stats, se);
    Ok(r)
}

/// g: ℝⁿ → ℝ evaluated at standard Gaussian inputs, with its gradient.
pub trait GaussianFunctional: Sync {
    fn dim(&self) -> usize;
    fn name(&self) -> String;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

/// g(x) = a·x with |a| = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    coeffs: Vec<f64>,
}

impl LinearFunctional {
    /// Normalizes `coeffs` to unit length.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if coeffs.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(SteinError::ZeroVariance);
        }
        Ok(LinearFunctional { coeffs: coeffs.into_iter().map(|c| c / norm).collect() })
    }

    /// g(x) = x₁ in n dimensions.
    pub fn first_coordinate(n: usize) -> Self {
        let mut coeffs = vec![0.0; n.max(1)];
        coeffs[0] = 1.0;
        LinearFunctional { coeffs }
    }
}

impl GaussianFunctional for LinearFunctional {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }
    fn name(&self) -> String {
        format!("linear(n={})", self.coeffs.len())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, x)| a * x).sum()
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.coeffs);
    }
}

/// g(x) = (|x|² − n)/√(2n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFunctional {
    pub n: usize,
}

impl GaussianFunctional for QuadraticFunctional {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        format!("quadratic(n={})", self.n)
    }
    fn value(&self, x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() - self.n as f64) / (2.0 * self.n as f64).sqrt()
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let c = 2.0 / (2.0 * self.n as f64).sqrt();
        out.iter_mut().zip(x).for_each(|(o, v)| *o = c * v);
    }
}

/// Draws one standard Gaussian vector.
pub fn gaussian_vector(rng: &mut SteinRng, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
}

/// Two independent half-sample estimates of
/// T(x) = ∫₀¹ E[∇g(x)·∇g(ux + √(1 − u²)X′)] du,
/// the form of ∫₀¹ (1/2√t) E[∇g(x)·∇g(√t x + √(1−t) X′)] dt after t = u².
fn t_halves(g: &dyn GaussianFunctional, x: &[f64], nodes: &(Vec<f64>, Vec<f64>), inner: usize, rng: &mut SteinRng) -> (f64, f64) {
    let n = g.dim();
    let mut gx = vec![0.0; n];
    g.gradient(x, &mut gx);
    let mut xp = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut gy = vec![0.0; n];
    let half = inner / 2;
    let (mut a, mut b) = (0.0, 0.0);
    for r in 0..inner {
        gaussian_vector(rng, &mut xp);
        let mut acc = 0.0;
        for (&u, &q) in nodes.0.iter().zip(&nodes.1) {
            let s = (1.0 - u * u).sqrt();
            y.iter_mut().zip(x.iter().zip(&xp)).for_each(|(y, (x, xp))| *y = u * x + s * xp);
            g.gradient(&y, &mut gy);
            acc += q * gx.iter().zip(&gy).map(|(a, b)| a * b).sum::<f64>();
        }
        if r < half {
            a += acc;
        } else {
            b += acc;
        }
    }
    (a / half as f64, b / (inner - half) as f64)
}

/// 2√Var T(X) ≥ d_TV(g(X), Z).
///
/// Var T is estimated without inner-sampling bias as the covariance of two
/// independent half-sample estimates of T across the outer draws. Also
/// reports Ê T (which should be 1) in `extras`.
pub fn dtv_interpolation(
    g: &dyn GaussianFunctional,
    reps_outer: usize,
    reps_inner: usize,
    quad_points: usize,
    seed: u64,
) -> Result<BoundReport> {
    if reps_inner < MIN_INNER_REPS {
        return Err(SteinError::Budget(format!("reps_inner = {reps_inner} < {MIN_INNER_REPS}")));
    }
    if quad_points < MIN_QUAD_POINTS {
        return Err(SteinError::Budget(format!("quad_points = {quad_points} < {MIN_QUAD_POINTS}")));
    }
    if reps_outer < 2 {
        return Err(SteinError::SampleTooSmall { got: reps_outer, need: 2 });
    }
    let nodes = gauss_legendre_on(quad_points, 0.0, 1.0);
    let n = g.dim();
    let halves: Vec<(f64, f64)> = par_draws(reps_outer, seed, |rng| {
        let mut x = vec![0.0; n];
        gaussian_vector(rng, &mut x);
        t_halves(g, &x, &nodes, reps_inner, rng)
    });
    let half = (reps_inner / 2) as f64;
    let full = reps_inner as f64;
    let ts: Vec<f64> = halves.iter().map(|(a, b)| (half * a + (full - half) * b) / full).collect();
    let (mean_t, mean_t_se) = mean_se(&ts);
    let (ma, _) = mean_se(&halves.iter().map(|h| h.0).collect::<Vec<_>>());
    let (mb, _) = mean_se(&halves.iter().map(|h| h.1).collect::<Vec<_>>());
    let r = reps_outer as f64;
    let prods: Vec<f64> = halves.iter().map(|(a, b)| (a - ma) * (b - mb)).collect();
    let (pm, pm_se) = mean_se(&prods);
    let var_t = pm * r / (r - 1.0);
    let var_t_se = pm_se * r / (r - 1.0);
    let v = var_t.max(0.0);
    let value = 2.0 * v.sqrt();
    let bound_se = if v > 0.0 { var_t_se / v.sqrt() } else { 0.0 };
    let mut rep = BoundReport::new("dtv_interpolation", value, DistanceKind::TotalVariation, digest(&g.name(), [reps_inner as f64, quad_points as f64]))
        .with_mc_bound(bound_se, reps_outer, seed);
    rep.extras.insert("mean_t".into(), mean_t);
    rep.extras.insert("mean_t_se".into(), mean_t_se);
    rep.extras.insert("var_t".into(), var_t);
    rep.extras.insert("var_t_se".into(), var_t_se);
    rep.extras.insert("reps_inner".into(), reps_inner as f64);
    rep.extras.insert("quad_points".into(), quad_points as f64);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::ZeroBiasIndepSampler;
    use crate::distributions::make_finite;
    use crate::exchangeable::{example1_joint, pair_stats_exact, JOINT_STATE_CAP};

    #[test]
    fn closed_form_values() {
        let r = dw_indep(&IndepSumModel::rademacher(100)).unwrap();
        assert!((r.bound_value - 0.3).abs() < 1e-14);
        let r = dw_indep(&IndepSumModel::rademacher(1)).unwrap();
        assert!((r.bound_value - 3.0).abs() < 1e-14 && r.vacuous);
        let r = be_iid(1.0, 1.0, 100).unwrap();
        assert!((r.bound_value - 0.65).abs() < 1e-15);
        assert!(!r.vacuous);
        assert!(be_iid(0.0, 1.0, 4).is_err());
        assert!(be_iid(1.0, 0.5, 4).is_err());
        assert!(dw_indep(&IndepSumModel::iid(FiniteDist::rademacher(1.0), 4).unwrap()).is_err());
    }

    #[test]
    fn scaling_in_n_is_exact() {
        let base_w = dw_indep(&IndepSumModel::rademacher(4)).unwrap().bound_value;
        let base_k = be_iid_model(&IndepSumModel::rademacher(4)).unwrap().bound_value;
        for n in [16usize, 64, 256, 1024] {
            let ratio = (n as f64 / 4.0).sqrt();
            let w = dw_indep(&IndepSumModel::rademacher(n)).unwrap().bound_value;
            let k = be_iid_model(&IndepSumModel::rademacher(n)).unwrap().bound_value;
            assert!((base_w / w / ratio - 1.0).abs() < 1e-12);
            assert!((base_k / k / ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_domination_and_flags() {
        let m = IndepSumModel::rademacher(16);
        let law = sum_law(&m).unwrap();
        let r = dw_indep(&m).unwrap().with_exact_law(&law);
        assert_eq!(r.dominates, Some(true));
        assert!(r.empirical_distance.unwrap() <= 0.75);
        let bad = BoundReport::new("fake", 1e-6, DistanceKind::Kolmogorov, "x").with_exact_law(&law);
        assert_eq!(bad.dominates, Some(false));
        assert!(bad.exact_violation());
    }

    #[test]
    fn zero_bias_bound_single_summand() {
        let s = ZeroBiasIndepSampler::new(&IndepSumModel::rademacher(1)).unwrap();
        assert!((dw_zero_bias_exact(&s).bound_value - 2.0).abs() < 1e-14);
        let r = dw_zero_bias(&s, 100_000, 3).unwrap();
        assert!((r.bound_value - 2.0).abs() < 3.0 * r.bound_std_err.unwrap());
        let same = |rng: &mut dyn rand::RngCore| {
            let w = FiniteDist::rademacher(1.0).sample(rng);
            (w, w)
        };
        assert_eq!(dw_zero_bias(&same, 1000, 1).unwrap().bound_value, 0.0);
        assert!(dw_zero_bias(&same, 999, 1).is_err());
    }

    #[test]
    fn concentration_examples() {
        let m = IndepSumModel::rademacher(16);
        let r = concentration_bound(&m, -0.25, 0.25).unwrap();
        assert!((r.bound_value - 1.0).abs() < 1e-14);
        assert_eq!(r.dominates, Some(true));
        assert!((r.extras["e_abs_t"] - 16.0 / 64.0 / 2.0).abs() < 1e-15);
        let r = concentration_bound(&IndepSumModel::rademacher(100), -0.25, 0.25).unwrap();
        assert!((r.bound_value - 0.7).abs() < 1e-12);
        let point = concentration_bound(&m, 0.25, 0.25).unwrap();
        assert!((point.bound_value - 0.5).abs() < 1e-14);
        assert!(concentration_bound(&m, 1.0, 0.0).is_err());
        let mixed = IndepSumModel::new(vec![FiniteDist::rademacher(0.6), FiniteDist::rademacher(0.8)]).unwrap();
        assert!(matches!(concentration_bound(&mixed, 0.0, 1.0), Err(SteinError::NotIid)));
    }

    #[test]
    fn exchangeable_bounds_at_n12() {
        let m = IndepSumModel::rademacher(12);
        let j = example1_joint(&m, JOINT_STATE_CAP).unwrap();
        let s = pair_stats_exact(&j, 1.0 / 12.0).unwrap();
        let law = sum_law(&m).unwrap();
        let dw = dw_exchangeable(&s).unwrap().with_exact_law(&law);
        let dk = dk_exchangeable(&s).unwrap().with_exact_law(&law);
        assert_eq!(dw.dominates, Some(true));
        assert_eq!(dk.dominates, Some(true));
        // the abs-cubed term alone is 2/√n for Rademacher summands
        assert!((6.0 * s.abs_cubed - 2.0 / 12f64.sqrt()).abs() < 1e-12);
        assert!(dw_exchangeable(&PairStats { lambda: 1.0, ..s.clone() }).is_err());
    }

    #[test]
    fn dk_exchangeable_constant() {
        let s = PairStats { lambda: 0.01, mean_sq_diff: 0.02, cond_var: 0.0, abs_cubed: 4e-3, mode: StatsMode::Exact { states: 0 } };
        let r = dk_exchangeable(&s).unwrap();
        let k = (2.0 * PI).powf(-0.25);
        assert!((k - 0.631_618_777_746_065).abs() < 1e-12);
        assert!((r.bound_value - k * 0.4f64.sqrt() * 1.0).abs() < 1e-12);
        let z = PairStats { cond_var: 0.0, abs_cubed: 0.0, ..s };
        let r = dk_exchangeable(&z).unwrap();
        assert_eq!(r.bound_value, 0.0);
        assert!(r.vacuous && !r.notes.is_empty());
    }

    #[test]
    fn interpolation_linear_is_exact() {
        let g = LinearFunctional::first_coordinate(5);
        let r = dtv_interpolation(&g, 200, 100, 32, 1).unwrap();
        assert!((r.extras["mean_t"] - 1.0).abs() < 1e-12);
        assert!(r.bound_value < 1e-9);
        assert!(dtv_interpolation(&g, 200, 99, 32, 1).is_err());
        assert!(dtv_interpolation(&g, 200, 100, 7, 1).is_err());
    }

    #[test]
    fn record_csv_header() {
        let r = be_iid(1.0, 1.0, 4).unwrap().with_exact(0.1);
        let mut buf = Vec::new();
        write_records(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RECORD_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "be_iid,3.25,kolmogorov,0.1,,true,true,,");
    }

    #[test]
    fn vacuity_threshold_for_wasserstein() {
        let x = make_finite(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        let r = BoundReport::new("w", 1.7, DistanceKind::Wasserstein, "x").with_exact_law(&x);
        assert!(!r.vacuous);
        assert!((TRIVIAL_WASSERSTEIN_CAP - (1.0 + (2.0 / PI).sqrt())).abs() < 1e-15);
    }
}
