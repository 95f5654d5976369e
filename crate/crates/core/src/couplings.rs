//! Distributional transforms that produce Stein identities: the K-kernels
//! of independent summands, the zero-bias transform and the size-bias
//! transform.
//!
//! Densities of these transforms are piecewise constant with breakpoints at
//! the atoms of the base law, so integrals against them are done exactly:
//! ∫ f′(t)·K(t) dt telescopes to Σ Kₖ (f(bₖ₊₁) − f(bₖ)).

use crate::distributions::{moments, FiniteDist, IndepSumModel};
use crate::error::{Result, SteinError};
use rand::{Rng, RngCore};

/// Two random variables realized on one probability space.
pub trait PairSampler {
    fn sample_pair(&self, rng: &mut dyn RngCore) -> (f64, f64);
}

impl<F: Fn(&mut dyn RngCore) -> (f64, f64)> PairSampler for F {
    fn sample_pair(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        self(rng)
    }
}

/// A nonnegative function, constant on each (knots[k], knots[k+1]) and zero
/// outside [knots[0], knots[last]].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    knots: Vec<f64>,
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl PiecewiseConstant {
    fn new(knots: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(knots.len(), values.len() + 1);
        let mut cum = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        for (k, v) in values.iter().enumerate() {
            acc += v * (knots[k + 1] - knots[k]);
            cum.push(acc);
        }
        PiecewiseConstant { knots, values, cum }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.values.is_empty() || t < self.knots[0] || t > *self.knots.last().unwrap() {
            return 0.0;
        }
        let k = self.knots.partition_point(|&b| b <= t).clamp(1, self.values.len());
        self.values[k - 1]
    }

    /// ∫ K.
    pub fn integral(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }

    /// ∫ f′(t) K(t) dt, exact for any absolutely continuous f.
    pub fn integrate_derivative<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate_antiderivative(f)
    }

    /// ∫ g(t) K(t) dt given an antiderivative G of g.
    pub fn integrate_antiderivative<F: Fn(f64) -> f64>(&self, antiderivative: F) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| v * (antiderivative(self.knots[k + 1]) - antiderivative(self.knots[k])))
            .sum()
    }

    /// ∫ |t − a| K(t) dt.
    pub fn integrate_abs_shift(&self, a: f64) -> f64 {
        self.integrate_antiderivative(|t| 0.5 * (t - a) * (t - a).abs())
    }

    /// Draw from K/∫K by exact inverse cdf.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = self.integral();
        let u: f64 = rng.gen::<f64>() * total;
        let k = self.cum.partition_point(|&c| c <= u).min(self.values.len() - 1);
        let below = if k == 0 { 0.0 } else { self.cum[k - 1] };
        let width = self.knots[k + 1] - self.knots[k];
        let frac = if self.values[k] > 0.0 { (u - below) / (self.values[k] * width) } else { 0.5 };
        self.knots[k] + frac.clamp(0.0, 1.0) * width
    }
}

fn check_centered(x: &FiniteDist) -> Result<()> {
    let mean = x.mean();
    let scale = x.min().abs().max(x.max().abs()).max(1.0);
    if mean.abs() > 1e-12 * scale {
        return Err(SteinError::NonzeroMean { index: 0, mean });
    }
    Ok(())
}

/// Kᵢ(t) = E Xᵢ[I(Xᵢ > t > 0) − I(Xᵢ < t ≤ 0)] for one centered summand.
#[derive(Debug, Clone, PartialEq)]
pub struct KKernel {
    pub source: FiniteDist,
    pub values: PiecewiseConstant,
    /// ∫K = σᵢ²
    pub total_mass: f64,
}

pub fn k_kernel(x: &FiniteDist) -> Result<KKernel> {
    check_centered(x)?;
    let mut knots: Vec<f64> = x.atoms().to_vec();
    knots.push(0.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let values = knots
        .windows(2)
        .map(|p| {
            let t = 0.5 * (p[0] + p[1]);
            if t > 0.0 {
                x.iter().filter(|&(a, _)| a > t).map(|(a, m)| a * m).sum()
            } else {
                x.iter().filter(|&(a, _)| a < t).map(|(a, m)| -a * m).sum()
            }
        })
        .collect();
    let values = PiecewiseConstant::new(knots, values);
    let total_mass = values.integral();
    Ok(KKernel { source: x.clone(), values, total_mass })
}

impl KKernel {
    pub fn eval(&self, t: f64) -> f64 {
        self.values.eval(t)
    }

    /// Density of Tᵢ, i.e. Kᵢ/σᵢ²; zero for a degenerate summand.
    pub fn density(&self, t: f64) -> f64 {
        if self.total_mass > 0.0 {
            self.eval(t) / self.total_mass
        } else {
            0.0
        }
    }

    /// ∫|t| Kᵢ(t) dt = σᵢ² E|Tᵢ|, which equals ½E|Xᵢ|³.
    pub fn abs_moment(&self) -> f64 {
        self.values.integrate_abs_shift(0.0)
    }

    /// Draw Tᵢ (equivalently Xᵢ*).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.total_mass > 0.0 {
            self.values.sample(rng)
        } else {
            0.0
        }
    }
}

/// The zero-bias transform W* of a centered law with variance B² > 0:
/// E W f(W) = B² E f′(W*), density E[W·I(W > x)]/B².
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroBias {
    pub base: FiniteDist,
    pub variance: f64,
    density: PiecewiseConstant,
    pub sampler_spec: String,
}

pub fn zero_bias(w: &FiniteDist) -> Result<ZeroBias> {
    check_centered(w)?;
    let variance = moments(w).variance;
    if variance <= 0.0 {
        return Err(SteinError::ZeroVariance);
    }
    let knots = w.atoms().to_vec();
    // E[W; W > x] on (a_k, a_{k+1}) is the tail sum over atoms above a_k.
    let mut tail: Vec<f64> = vec![0.0; knots.len()];
    let mut acc = 0.0;
    for k in (0..knots.len()).rev() {
        tail[k] = acc;
        acc += knots[k] * w.masses()[k];
    }
    let values = tail[..knots.len() - 1].iter().map(|t| (t / variance).max(0.0)).collect();
    Ok(ZeroBias {
        base: w.clone(),
        variance,
        density: PiecewiseConstant::new(knots, values),
        sampler_spec: "marginal: inverse cdf of the piecewise-constant density; for W = ΣXᵢ use \
                       ZeroBiasIndepSampler (W* = W − X_I + X_I*, P(I = i) = σᵢ²)"
            .into(),
    })
}

impl ZeroBias {
    pub fn density(&self, x: f64) -> f64 {
        self.density.eval(x)
    }

    pub fn piecewise(&self) -> &PiecewiseConstant {
        &self.density
    }

    /// (E W f(W), B² E f′(W*)) for an absolutely continuous f.
    pub fn identity_sides<F: Fn(f64) -> f64>(&self, f: F) -> (f64, f64) {
        let lhs = self.base.expect(|w| w * f(w));
        let rhs = self.variance * self.density.integrate_derivative(&f);
        (lhs, rhs)
    }

    /// CDF of W*.
    pub fn cdf(&self, x: f64) -> f64 {
        self.density.integrate_antiderivative(|t| t.min(x))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.density.sample(rng)
    }
}

/// Couples W = ΣXᵢ with its zero-bias transform through an independent
/// random index: W* = W − X_I + X_I* with P(I = i) = σᵢ² and X_I* drawn
/// from K_I/σ_I².
#[derive(Debug, Clone)]
pub struct ZeroBiasIndepSampler {
    model: IndepSumModel,
    kernels: Vec<KKernel>,
    index_cum: Vec<f64>,
}

impl ZeroBiasIndepSampler {
    pub fn new(m: &IndepSumModel) -> Result<Self> {
        m.require_normalized()?;
        let kernels = m.components().iter().map(k_kernel).collect::<Result<Vec<_>>>()?;
        let mut acc = 0.0;
        let index_cum = kernels
            .iter()
            .map(|k| {
                acc += k.total_mass;
                acc
            })
            .collect();
        Ok(ZeroBiasIndepSampler { model: m.clone(), kernels, index_cum })
    }

    pub fn kernels(&self) -> &[KKernel] {
        &self.kernels
    }

    /// One draw of (W, W*).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let xs: Vec<f64> = self.model.components().iter().map(|c| c.sample(rng)).collect();
        let w: f64 = xs.iter().sum();
        let u: f64 = rng.gen::<f64>() * self.index_cum[self.index_cum.len() - 1];
        let i = self.index_cum.partition_point(|&c| c <= u).min(xs.len() - 1);
        let star = self.kernels[i].sample(rng);
        (w, w - xs[i] + star)
    }

    /// E|W* − W| = Σᵢ σᵢ² E|Xᵢ* − Xᵢ|, computed exactly.
    pub fn exact_mean_abs_gap(&self) -> f64 {
        self.kernels
            .iter()
            .map(|k| k.source.iter().map(|(a, p)| p * k.values.integrate_abs_shift(a)).sum::<f64>())
            .sum()
    }
}

impl PairSampler for ZeroBiasIndepSampler {
    fn sample_pair(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        self.sample(rng)
    }
}

/// Draws (W, W*) from the independent-index construction.
pub fn zero_bias_indep_sampler<R: Rng + ?Sized>(m: &IndepSumModel, rng: &mut R) -> Result<(f64, f64)> {
    Ok(ZeroBiasIndepSampler::new(m)?.sample(rng))
}

/// The size-bias transform Yˢ of a nonnegative law: P(Yˢ = y) = y·P(Y = y)/μ.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeBias {
    pub base: FiniteDist,
    pub mean: f64,
    pub transformed: FiniteDist,
    /// 1 − (mass supplied) when the base is a truncation of a larger law.
    pub truncation_deficit: f64,
}

pub fn size_bias(y: &FiniteDist) -> Result<SizeBias> {
    if let Some(&a) = y.atoms().iter().find(|&&a| a < 0.0) {
        return Err(SteinError::NegativeAtom(a));
    }
    let mean = y.mean();
    if mean <= 0.0 {
        return Err(SteinError::ZeroMean);
    }
    let weights: Vec<f64> = y.iter().map(|(a, m)| a * m / mean).collect();
    let transformed = FiniteDist::new(y.atoms(), &weights)?;
    Ok(SizeBias { base: y.clone(), mean, transformed, truncation_deficit: 0.0 })
}

/// Size-bias of an explicit truncation: `masses` are the untruncated
/// probabilities on `atoms`, whose shortfall from one is reported.
pub fn size_bias_truncated(atoms: &[f64], masses: &[f64]) -> Result<SizeBias> {
    let supplied: f64 = masses.iter().sum();
    let base = FiniteDist::new(atoms, masses)?;
    let mut s = size_bias(&base)?;
    s.truncation_deficit = (1.0 - supplied).max(0.0);
    Ok(s)
}

impl SizeBias {
    /// (E Y f(Y), μ E f(Yˢ)).
    pub fn identity_sides<F: Fn(f64) -> f64>(&self, f: F) -> (f64, f64) {
        (self.base.expect(|y| y * f(y)), self.mean * self.transformed.expect(&f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::{ks_critical, ks_statistic, tv_exact};
    use crate::distributions::{make_finite, sum_law};

    #[test]
    fn rademacher_kernel_is_flat() {
        for &a in &[1.0, 0.3] {
            let k = k_kernel(&FiniteDist::rademacher(a)).unwrap();
            // direct evaluation of E X[I(X>t>0) − I(X<t≤0)] at a few points
            for &t in &[-0.9 * a, -0.1 * a, 0.2 * a, 0.99 * a] {
                let direct: f64 = [(-a, 0.5), (a, 0.5)]
                    .iter()
                    .map(|&(x, p)| p * x * ((x > t && t > 0.0) as i32 - (x < t && t <= 0.0) as i32) as f64)
                    .sum();
                assert!((k.eval(t) - direct).abs() < 1e-15);
                assert!((k.eval(t) - a / 2.0).abs() < 1e-15);
            }
            assert_eq!(k.eval(1.5 * a), 0.0);
            assert!((k.total_mass - a * a).abs() < 1e-15);
        }
        let k = k_kernel(&FiniteDist::point_mass(0.0)).unwrap();
        assert_eq!(k.total_mass, 0.0);
        assert_eq!(k.eval(0.0), 0.0);
    }

    #[test]
    fn kernel_abs_moment_is_half_third_moment() {
        let x = make_finite(&[-2.0, 0.5], &[0.2, 0.8]).unwrap();
        let k = k_kernel(&x).unwrap();
        assert!((k.abs_moment() - 0.5 * 1.7).abs() < 1e-14);
        assert!((k.total_mass - 1.0).abs() < 1e-14);
        assert!(k_kernel(&make_finite(&[0.0, 1.0], &[0.5, 0.5]).unwrap()).is_err());
    }

    #[test]
    fn rademacher_zero_bias_is_uniform() {
        let z = zero_bias(&FiniteDist::rademacher(1.0)).unwrap();
        for &x in &[-0.999, -0.5, 0.0, 0.7, 0.999] {
            assert!((z.density(x) - 0.5).abs() < 1e-15);
        }
        assert_eq!(z.density(1.2), 0.0);
        let (l, r) = z.identity_sides(|w| w);
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_bias_identity_for_cubic_on_three_summands() {
        let w = sum_law(&IndepSumModel::rademacher(3)).unwrap();
        let z = zero_bias(&w).unwrap();
        let (l, r) = z.identity_sides(|x| x.powi(3));
        // E W⁴ for W = (ε₁+ε₂+ε₃)/√3: (n + 3n(n−1))/n² = 7/3
        assert!((l - 7.0 / 3.0).abs() < 1e-12);
        assert!((l - r).abs() < 1e-9);
    }

    #[test]
    fn zero_bias_rejects_degenerate() {
        assert!(matches!(zero_bias(&FiniteDist::point_mass(0.0)), Err(SteinError::ZeroVariance)));
    }

    #[test]
    fn single_summand_kernel_equals_zero_bias_density() {
        let x = make_finite(&[-1.0, 0.25, 3.0], &[0.5, 0.4, 0.1]).unwrap().centered();
        let k = k_kernel(&x).unwrap();
        let z = zero_bias(&x).unwrap();
        for p in z.piecewise().knots().windows(2) {
            let t = 0.5 * (p[0] + p[1]);
            assert!((k.density(t) - z.density(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn indep_sampler_gap_for_rademacher() {
        for n in [1usize, 4, 9] {
            let s = ZeroBiasIndepSampler::new(&IndepSumModel::rademacher(n)).unwrap();
            let a = 1.0 / (n as f64).sqrt();
            // E|U − X| with U ~ Unif(−a, a), X = ±a: a·E|V − 1| over V ~ Unif(−1,1) = a.
            assert!((s.exact_mean_abs_gap() - a).abs() < 1e-14);
            assert!(s.exact_mean_abs_gap() <= a + a / 2.0);
        }
    }

    #[test]
    fn indep_sampler_marginal_is_uniform_for_one_summand() {
        let s = ZeroBiasIndepSampler::new(&IndepSumModel::rademacher(1)).unwrap();
        let mut rng = crate::rng::stream(42, 0);
        let mut stars: Vec<f64> = (0..100_000).map(|_| s.sample(&mut rng).1).collect();
        stars.sort_by(f64::total_cmp);
        let d = ks_statistic(&stars, |x| ((x + 1.0) / 2.0).clamp(0.0, 1.0));
        assert!((stars.len() as f64).sqrt() * d < ks_critical(0.01));
    }

    #[test]
    fn indep_sampler_is_reproducible_and_requires_normalization() {
        let m = IndepSumModel::rademacher(5);
        let s = ZeroBiasIndepSampler::new(&m).unwrap();
        let a: Vec<_> = { let mut r = crate::rng::stream(1, 0); (0..10).map(|_| s.sample(&mut r)).collect() };
        let b: Vec<_> = { let mut r = crate::rng::stream(1, 0); (0..10).map(|_| s.sample(&mut r)).collect() };
        assert_eq!(a, b);
        let raw = IndepSumModel::iid(FiniteDist::rademacher(1.0), 3).unwrap();
        assert!(matches!(ZeroBiasIndepSampler::new(&raw), Err(SteinError::Unnormalized(_))));
    }

    fn poisson_pmf(k: u32) -> f64 {
        (-1f64).exp() / (1..=k).map(f64::from).product::<f64>()
    }

    #[test]
    fn size_bias_of_truncated_poisson_is_shifted_poisson() {
        let atoms: Vec<f64> = (0..=12).map(f64::from).collect();
        let masses: Vec<f64> = (0..=12).map(poisson_pmf).collect();
        let s = size_bias_truncated(&atoms, &masses).unwrap();
        assert!(s.truncation_deficit < 1e-9 && s.truncation_deficit > 0.0);
        let shifted_atoms: Vec<f64> = (1..=13).map(f64::from).collect();
        let shifted: Vec<f64> = (0..=12).map(poisson_pmf).collect();
        let target = make_finite(&shifted_atoms, &shifted).unwrap();
        assert!(tv_exact(&s.transformed, &target) <= 1e-6);
    }

    #[test]
    fn size_bias_fixed_points_and_errors() {
        let s = size_bias(&FiniteDist::point_mass(2.5)).unwrap();
        assert_eq!(s.transformed, FiniteDist::point_mass(2.5));
        let b = size_bias(&make_finite(&[0.0, 1.0], &[0.7, 0.3]).unwrap()).unwrap();
        assert_eq!(b.transformed, FiniteDist::point_mass(1.0));
        assert!(matches!(size_bias(&make_finite(&[-1.0, 1.0], &[0.5, 0.5]).unwrap()), Err(SteinError::NegativeAtom(_))));
        assert!(matches!(size_bias(&FiniteDist::point_mass(0.0)), Err(SteinError::ZeroMean)));
    }

    #[test]
    fn size_bias_identity_for_tabulated_f() {
        let y = make_finite(&[0.0, 1.0, 2.5, 4.0], &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = size_bias(&y).unwrap();
        let table = [(0.0, 3.0), (1.0, -1.0), (2.5, 7.0), (4.0, 0.5)];
        let f = |x: f64| table.iter().find(|(a, _)| *a == x).map(|t| t.1).unwrap();
        let (l, r) = s.identity_sides(f);
        assert!((l - r).abs() < 1e-12);
    }
}
