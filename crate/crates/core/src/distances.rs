//! Distances between a law and N(0, 1): exact on finite supports, estimated
//! from samples otherwise.

use crate::distributions::{FiniteDist, MERGE_TOL};
use crate::error::{Result, SteinError};
use crate::normal;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Minimum sample size accepted by [`distances_mc`].
pub const MIN_MC_SAMPLE: usize = 1000;

/// d_K(W, Z) = sup_x |P(W ≤ x) − Φ(x)|.
///
/// The sup is attained at an atom, either at the cdf value or at its left
/// limit, so only those 2·|support| candidates are inspected.
pub fn kolmogorov_exact(w: &FiniteDist) -> f64 {
    let mut left = 0.0;
    let mut sup: f64 = 0.0;
    for (a, p) in w.iter() {
        let phi = normal::cdf(a);
        let right = (left + p).min(1.0);
        sup = sup.max((left - phi).abs()).max((right - phi).abs());
        left = right;
    }
    sup
}

/// d_W(W, Z) = ∫ |F_W(x) − Φ(x)| dx, integrated in closed form between
/// consecutive atoms and over both tails.
pub fn wasserstein_exact(w: &FiniteDist) -> f64 {
    let atoms = w.atoms();
    let mut total = normal::cdf_integral(atoms[0]);
    let mut level = 0.0;
    for (k, pair) in atoms.windows(2).enumerate() {
        level += w.masses()[k];
        total += abs_gap_integral(pair[0], pair[1], level.min(1.0));
    }
    total + normal::sf_tail_integral(*atoms.last().unwrap())
}

/// ∫_l^r |c − Φ(x)| dx for a constant level c.
fn abs_gap_integral(l: f64, r: f64, c: f64) -> f64 {
    // signed ∫_a^b (Φ − c)
    let signed = |a: f64, b: f64| {
        if a >= 0.0 {
            (1.0 - c) * (b - a) - (normal::sf_tail_integral(a) - normal::sf_tail_integral(b))
        } else {
            normal::cdf_integral(b) - normal::cdf_integral(a) - c * (b - a)
        }
    };
    if c <= 0.0 {
        return signed(l, r).abs();
    }
    if c >= 1.0 {
        return normal::sf_tail_integral(l) - normal::sf_tail_integral(r);
    }
    let cross = normal::quantile(c);
    if cross <= l || cross >= r {
        signed(l, r).abs()
    } else {
        signed(l, cross).abs() + signed(cross, r).abs()
    }
}

/// Total variation between two finite laws: half the L¹ distance of the
/// mass vectors after merging atoms within [`MERGE_TOL`].
pub fn tv_exact(p: &FiniteDist, q: &FiniteDist) -> f64 {
    let mut entries: Vec<(f64, f64)> = p.iter().chain(q.iter().map(|(a, m)| (a, -m))).collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut start = f64::NEG_INFINITY;
    let mut acc: f64 = 0.0;
    for (a, m) in entries {
        if a - start > MERGE_TOL {
            total += acc.abs();
            acc = 0.0;
            start = a;
        }
        acc += m;
    }
    0.5 * (total + acc.abs())
}

/// A sorted sample with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    pub seed: Option<u64>,
    pub source: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleSidecar {
    seed: Option<u64>,
    source: String,
    len: usize,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>, seed: Option<u64>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(SteinError::SampleTooSmall { got: 0, need: 1 });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(SteinError::NonFinite(bad.to_string()));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalSample { values, seed, source: source.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn sidecar_path(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }

    /// Writes `path` (one column, header `value`) and `path.json` with the
    /// seed and source.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(["value"])?;
        for v in &self.values {
            wtr.write_record([format!("{v:.16e}")])?;
        }
        wtr.flush()?;
        let side = SampleSidecar { seed: self.seed, source: self.source.clone(), len: self.len() };
        std::fs::write(Self::sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    /// Reads a sample written by [`EmpiricalSample::write`]; the sidecar is optional.
    pub fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        if rdr.headers()?.iter().collect::<Vec<_>>() != ["value"] {
            return Err(SteinError::Config("expected header `value`".into()));
        }
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            values.push(rec[0].trim().parse::<f64>().map_err(|e| SteinError::Config(e.to_string()))?);
        }
        let side = Self::sidecar_path(path);
        let (seed, source) = if side.exists() {
            let s: SampleSidecar = serde_json::from_str(&std::fs::read_to_string(side)?)?;
            (s.seed, s.source)
        } else {
            (None, path.display().to_string())
        };
        Self::new(values, seed, source)
    }
}

/// Monte Carlo estimates of d_K and d_W with their uncertainty terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McDistances {
    pub d_k: f64,
    pub d_w: f64,
    /// DKW half-width at α = 0.01: P(sup|F̂ − F| > width) ≤ 0.01.
    pub dkw_width: f64,
    /// Bound on the error of the quantile-midpoint rule used for d_W:
    /// the Wasserstein distance between Z and its m-point midpoint grid.
    pub dw_grid_bias: f64,
    /// 1/(2√m), the largest pointwise standard deviation of F̂.
    pub d_k_std_err: f64,
    /// ∫√(F̂(1 − F̂))dx/√m, a conservative standard deviation for the
    /// L¹ cdf distance.
    pub d_w_std_err: f64,
    pub m: usize,
}

/// DKW confidence half-width √(ln(2/α)/(2m)).
pub fn dkw_width(m: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * m as f64)).sqrt()
}

pub fn distances_mc(s: &EmpiricalSample) -> Result<McDistances> {
    let m = s.len();
    if m < MIN_MC_SAMPLE {
        return Err(SteinError::SampleTooSmall { got: m, need: MIN_MC_SAMPLE });
    }
    let mf = m as f64;
    let d_k = ks_statistic(s.values(), normal::cdf);
    let mut d_w = 0.0;
    let mut grid_bias = 0.0;
    for (i, &x) in s.values().iter().enumerate() {
        let q = normal::quantile((i as f64 + 0.5) / mf);
        d_w += (x - q).abs();
        grid_bias += 2.0 * normal::pdf(q);
        if i > 0 {
            grid_bias -= 2.0 * normal::pdf(normal::quantile(i as f64 / mf));
        }
    }
    let spread: f64 = s
        .values()
        .windows(2)
        .enumerate()
        .map(|(i, p)| {
            let q = (i + 1) as f64 / mf;
            (p[1] - p[0]) * (q * (1.0 - q)).sqrt()
        })
        .sum();
    Ok(McDistances {
        d_k,
        d_w: d_w / mf,
        dkw_width: dkw_width(m, 0.01),
        dw_grid_bias: grid_bias.max(0.0),
        d_k_std_err: 0.5 / mf.sqrt(),
        d_w_std_err: spread / mf.sqrt(),
        m,
    })
}

/// sup_x |F̂(x) − F(x)| over a sorted sample, checking both one-sided limits.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let m = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let f = cdf(v);
        sup = sup.max((i as f64 / m - f).abs()).max((j as f64 / m - f).abs());
        i = j;
    }
    sup
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / n - j as f64 / m).abs());
    }
    sup
}

/// Asymptotic KS critical value c(α) = √(−ln(α/2)/2); reject when
/// √(effective n)·D > c(α).
pub fn ks_critical(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// E h(Z) for h(w) = clamp((x + ε − w)/ε, 0, 1), i.e. (1/ε)∫_x^{x+ε} Φ.
fn normal_ramp_mean(x: f64, eps: f64) -> f64 {
    (normal::cdf_integral(x + eps) - normal::cdf_integral(x)) / eps
}

fn law_ramp_mean(w: &FiniteDist, x: f64, eps: f64) -> f64 {
    w.expect(|a| ((x + eps - a) / eps).clamp(0.0, 1.0))
}

/// sup_x |E h_{x,ε}(W) − E h_{x,ε}(Z)| over the smoothed half-line
/// indicators h_{x,ε}(w) = clamp((x + ε − w)/ε, 0, 1).
///
/// The W-side is piecewise linear in x with breakpoints at aₖ − ε and aₖ;
/// the Z-side has a single inflection at x = −ε/2. On each resulting piece
/// the difference has a monotone derivative, so its extremes are at the
/// piece ends or at the unique stationary point, found by bisection.
pub fn smoothed_kolmogorov(w: &FiniteDist, eps: f64) -> f64 {
    let mut knots: Vec<f64> = w.atoms().iter().flat_map(|&a| [a - eps, a]).collect();
    knots.push(-eps / 2.0);
    knots.push(w.min() - eps - 40.0);
    knots.push(w.max() + 40.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let diff = |x: f64| law_ramp_mean(w, x, eps) - normal_ramp_mean(x, eps);
    let mut sup: f64 = 0.0;
    for piece in knots.windows(2) {
        let (l, r) = (piece[0], piece[1]);
        let (dl, dr) = (diff(l), diff(r));
        sup = sup.max(dl.abs()).max(dr.abs());
        if r - l <= 0.0 {
            continue;
        }
        let slope = (law_ramp_mean(w, r, eps) - law_ramp_mean(w, l, eps)) / (r - l);
        let deriv = |x: f64| slope - (normal::cdf(x + eps) - normal::cdf(x)) / eps;
        let (gl, gr) = (deriv(l), deriv(r));
        if gl == 0.0 || gr == 0.0 || gl.signum() == gr.signum() {
            continue;
        }
        let (mut lo, mut hi) = (l, r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if deriv(mid).signum() == gl.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sup = sup.max(diff(0.5 * (lo + hi)).abs());
    }
    sup
}

/// Monte Carlo lower estimate of d_TV(W, Z) through smoothed interval
/// indicators: the largest |Ê h(W) − E h(Z)| over ramps with plateau
/// [a, b] on `grid` × `grid` (a < b) and ramp width `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothedTv {
    pub value: f64,
    /// Standard error of the maximizing estimate.
    pub std_err: f64,
    pub a: f64,
    pub b: f64,
}

pub fn tv_smoothed_mc(sample: &[f64], grid: &[f64], eps: f64) -> SmoothedTv {
    let m = sample.len() as f64;
    let mut best = SmoothedTv { value: 0.0, std_err: 0.0, a: 0.0, b: 0.0 };
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i + 1..] {
            let h = |w: f64| ((b + eps - w) / eps).clamp(0.0, 1.0) - ((a - w) / eps).clamp(0.0, 1.0);
            let (mut s, mut s2) = (0.0, 0.0);
            for &x in sample {
                let v = h(x);
                s += v;
                s2 += v * v;
            }
            let mean = s / m;
            let ez = normal_ramp_mean(b, eps) - normal_ramp_mean(a - eps, eps);
            let gap = (mean - ez).abs();
            if gap > best.value {
                let var = (s2 / m - mean * mean).max(0.0);
                best = SmoothedTv { value: gap, std_err: (var / m).sqrt(), a, b };
            }
        }
    }
    best
}
