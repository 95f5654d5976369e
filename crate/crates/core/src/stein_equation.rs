//! Bounded solutions of the Stein equation
//!
//! ```text
//! f'(w) - w f(w) = h(w) - E h(Z),    Z ~ N(0, 1)
//! ```
//!
//! for the three test-function classes: half-line indicators (Kolmogorov),
//! Lipschitz functions (Wasserstein) and bounded functions (total
//! variation). Indicator solutions use the closed form; the others are
//! computed by quadrature of
//!
//! ```text
//! f(w) =  ∫_0^∞ g(w - s) e^{ws - s²/2} ds      (w ≤ 0)
//! f(w) = -∫_0^∞ g(w + s) e^{-ws - s²/2} ds     (w > 0)
//! ```
//!
//! with g = h − E h(Z). Both forms are the usual left/right tail integrals
//! after substituting t = w ∓ s, which keeps e^{w²/2} from ever being formed.
//! In every case f′ is recovered from the equation itself.

use crate::distributions::FiniteDist;
use crate::error::{Result, SteinError};
use crate::normal;
use crate::quadrature::{integrate, integrate_raw, QuadConfig};
use rand::Rng;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Grid used for sup-norm certificates and the residual invariant.
pub const GRID_LO: f64 = -8.0;
pub const GRID_HI: f64 = 8.0;
pub const GRID_STEP: f64 = 1e-3;
/// Half-width of the excluded neighbourhood around an indicator's jump.
pub const JUMP_EXCLUSION: f64 = 1e-6;

const QUAD: QuadConfig = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: 4000, accept_tol: 1e-10 };
const TAIL_BREAKS: [f64; 8] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 24.0];
const TAIL_END: f64 = 40.0;

/// Which separating class a test function belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestKind {
    /// h(w) = I(w ≤ x)
    Indicator { x: f64 },
    /// |h(u) − h(v)| ≤ lip_const·|u − v|
    Lipschitz { lip_const: f64 },
    /// 0 ≤ h ≤ sup_bound
    Bounded { sup_bound: f64 },
}

/// A test function h together with its class and known kinks.
#[derive(Clone)]
pub struct TestFunction {
    pub kind: TestKind,
    pub name: String,
    h: RealFn,
    kinks: Vec<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("kind", &self.kind).field("name", &self.name).finish()
    }
}

impl TestFunction {
    pub fn indicator(x: f64) -> Self {
        TestFunction {
            kind: TestKind::Indicator { x },
            name: format!("indicator({x})"),
            h: Arc::new(move |w| if w <= x { 1.0 } else { 0.0 }),
            kinks: vec![x],
        }
    }

    /// `kinks` lists points where h is not smooth; quadrature splits there.
    pub fn lipschitz(name: impl Into<String>, h: RealFn, lip_const: f64, kinks: Vec<f64>) -> Self {
        TestFunction { kind: TestKind::Lipschitz { lip_const }, name: name.into(), h, kinks }
    }

    pub fn bounded(name: impl Into<String>, h: RealFn, sup_bound: f64, kinks: Vec<f64>) -> Self {
        TestFunction { kind: TestKind::Bounded { sup_bound }, name: name.into(), h, kinks }
    }

    pub fn identity() -> Self {
        Self::lipschitz("w", Arc::new(|w| w), 1.0, vec![])
    }

    pub fn abs() -> Self {
        Self::lipschitz("|w|", Arc::new(f64::abs), 1.0, vec![0.0])
    }

    pub fn cos() -> Self {
        Self::lipschitz("cos(w)", Arc::new(f64::cos), 1.0, vec![])
    }

    /// Continuous surrogate of I(a ≤ w ≤ b): 1 on [a, b], linear ramps of
    /// width `eps` on both sides, 0 elsewhere.
    pub fn smoothed_interval(a: f64, b: f64, eps: f64) -> Self {
        let h = move |w: f64| {
            if w < a - eps || w > b + eps {
                0.0
            } else if w < a {
                (w - (a - eps)) / eps
            } else if w > b {
                ((b + eps) - w) / eps
            } else {
                1.0
            }
        };
        Self::bounded(format!("ramp[{a},{b};{eps}]"), Arc::new(h), 1.0, vec![a - eps, a, b, b + eps])
    }

    /// Continuous surrogate of I(w ≤ x): 1 up to x, linear down to 0 at x + eps.
    pub fn smoothed_halfline(x: f64, eps: f64) -> Self {
        let h = move |w: f64| ((x + eps - w) / eps).clamp(0.0, 1.0);
        Self::bounded(format!("ramp(-inf,{x};{eps})"), Arc::new(h), 1.0, vec![x, x + eps])
    }

    pub fn eval(&self, w: f64) -> f64 {
        (self.h)(w)
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// E h(Z).
    pub fn normal_expectation(&self) -> Result<f64> {
        if let TestKind::Indicator { x } = self.kind {
            return Ok(normal::cdf(x));
        }
        let mut breaks: Vec<f64> = (-8..=8).map(f64::from).collect();
        breaks.extend_from_slice(&[-16.0, 16.0]);
        breaks.extend_from_slice(&self.kinks);
        integrate(|t| self.eval(t) * normal::pdf(t), -TAIL_END, TAIL_END, &breaks, &QUAD)
    }

    /// Spot-checks the class invariant: the Lipschitz constant on `pairs`
    /// random pairs, or the range on the certificate grid.
    pub fn check_class<R: Rng + ?Sized>(&self, rng: &mut R, pairs: usize) -> bool {
        match self.kind {
            TestKind::Indicator { .. } => true,
            TestKind::Lipschitz { lip_const } => (0..pairs).all(|_| {
                let u = rng.gen_range(-10.0..10.0);
                let v = rng.gen_range(-10.0..10.0);
                (self.eval(u) - self.eval(v)).abs() <= lip_const * (u - v).abs() * (1.0 + 1e-12) + 1e-15
            }),
            TestKind::Bounded { sup_bound } => {
                grid().all(|w| (0.0..=sup_bound).contains(&self.eval(w)))
            }
        }
    }
}

fn grid() -> impl Iterator<Item = f64> + Clone {
    let n = ((GRID_HI - GRID_LO) / GRID_STEP).round() as usize;
    (0..=n).map(|k| GRID_LO + k as f64 * GRID_STEP)
}

#[derive(Clone)]
enum Repr {
    Indicator { x: f64, phi_x: f64 },
    Quadrature { h: TestFunction, eh: f64 },
}

/// The bounded solution f_h of the Stein equation and its grid sup-norms.
#[derive(Clone)]
pub struct SteinSolution {
    repr: Repr,
    pub test_fn: TestFunction,
    /// E h(Z)
    pub normal_mean: f64,
    pub norm_f: f64,
    pub norm_f_prime: f64,
    /// Sup of difference quotients of f′ on the grid; absent for
    /// indicators, whose f′ jumps.
    pub norm_f_double_prime: Option<f64>,
}

impl fmt::Debug for SteinSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SteinSolution")
            .field("test_fn", &self.test_fn)
            .field("normal_mean", &self.normal_mean)
            .field("norm_f", &self.norm_f)
            .field("norm_f_prime", &self.norm_f_prime)
            .field("norm_f_double_prime", &self.norm_f_double_prime)
            .finish()
    }
}

/// Something with a value and a derivative, usable in E[f′(W) − W f(W)].
pub trait Differentiable {
    fn value(&self, w: f64) -> f64;
    fn derivative(&self, w: f64) -> f64;
}

/// A (f, f′) pair of closures.
pub struct FnPair<F, G>(pub F, pub G);

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> Differentiable for FnPair<F, G> {
    fn value(&self, w: f64) -> f64 {
        (self.0)(w)
    }
    fn derivative(&self, w: f64) -> f64 {
        (self.1)(w)
    }
}

impl Differentiable for SteinSolution {
    fn value(&self, w: f64) -> f64 {
        self.f(w)
    }
    fn derivative(&self, w: f64) -> f64 {
        self.f_prime(w)
    }
}

/// f_x for h = I(· ≤ x):
/// f_x(w) = √(2π) e^{w²/2} Φ(min(w, x)) (1 − Φ(max(w, x))).
pub fn solve_indicator(x: f64) -> SteinSolution {
    let mut s = SteinSolution {
        repr: Repr::Indicator { x, phi_x: normal::cdf(x) },
        test_fn: TestFunction::indicator(x),
        normal_mean: normal::cdf(x),
        norm_f: 0.0,
        norm_f_prime: 0.0,
        norm_f_double_prime: None,
    };
    s.certify(false);
    s
}

/// f_h for a Lipschitz h, with certificates ‖f′‖ and ‖f″‖ measured on the grid.
pub fn solve_smooth(h: &TestFunction) -> Result<SteinSolution> {
    if !matches!(h.kind, TestKind::Lipschitz { lip_const } if lip_const.is_finite()) {
        return Err(SteinError::Config(format!("solve_smooth needs a Lipschitz test function, got {:?}", h.kind)));
    }
    let mut s = solve_uncertified(h)?;
    s.certify_checked(true)?;
    Ok(s)
}

/// f_h for a bounded h (total-variation class).
pub fn solve_bounded(h: &TestFunction) -> Result<SteinSolution> {
    if !matches!(h.kind, TestKind::Bounded { .. }) {
        return Err(SteinError::Config(format!("solve_bounded needs a bounded test function, got {:?}", h.kind)));
    }
    let mut s = solve_uncertified(h)?;
    s.certify_checked(false)?;
    Ok(s)
}

/// Dispatches on the kind of `h`.
pub fn solve(h: &TestFunction) -> Result<SteinSolution> {
    match h.kind {
        TestKind::Indicator { x } => Ok(solve_indicator(x)),
        TestKind::Lipschitz { .. } => solve_smooth(h),
        TestKind::Bounded { .. } => solve_bounded(h),
    }
}

/// The solution without grid certificates (norm fields are NaN). Cheap to
/// construct; used when only expectations are needed.
pub fn solve_uncertified(h: &TestFunction) -> Result<SteinSolution> {
    if let TestKind::Indicator { x } = h.kind {
        let mut s = solve_indicator(x);
        s.test_fn = h.clone();
        return Ok(s);
    }
    let eh = h.normal_expectation()?;
    Ok(SteinSolution {
        repr: Repr::Quadrature { h: h.clone(), eh },
        test_fn: h.clone(),
        normal_mean: eh,
        norm_f: f64::NAN,
        norm_f_prime: f64::NAN,
        norm_f_double_prime: None,
    })
}

impl SteinSolution {
    pub fn f(&self, w: f64) -> f64 {
        match &self.repr {
            Repr::Indicator { x, phi_x } => indicator_value(*x, *phi_x, w),
            Repr::Quadrature { h, eh } => quadrature_value(h, *eh, w).0,
        }
    }

    /// f′(w) = w f(w) + h(w) − E h(Z); left-continuous at an indicator's jump.
    pub fn f_prime(&self, w: f64) -> f64 {
        w * self.f(w) + self.test_fn.eval(w) - self.normal_mean
    }

    /// f(w) with the quadrature error estimate (zero for the closed form).
    pub fn f_checked(&self, w: f64) -> Result<f64> {
        match &self.repr {
            Repr::Indicator { x, phi_x } => Ok(indicator_value(*x, *phi_x, w)),
            Repr::Quadrature { h, eh } => {
                let (v, err) = quadrature_value(h, *eh, w);
                if err <= QUAD.accept_tol {
                    Ok(v)
                } else {
                    Err(SteinError::Quadrature(err))
                }
            }
        }
    }

    /// |f′(w) − w f(w) − (h(w) − E h(Z))|
    pub fn residual(&self, w: f64) -> f64 {
        (self.f_prime(w) - w * self.f(w) - (self.test_fn.eval(w) - self.normal_mean)).abs()
    }

    /// Max residual over the grid, skipping the jump neighbourhood of an indicator.
    pub fn max_grid_residual(&self) -> f64 {
        let jump = match self.test_fn.kind {
            TestKind::Indicator { x } => Some(x),
            _ => None,
        };
        let pts: Vec<f64> = grid().filter(|w| jump.is_none_or(|x| (w - x).abs() > JUMP_EXCLUSION)).collect();
        pts.par_iter().map(|&w| self.residual(w)).reduce(|| 0.0, f64::max)
    }

    fn certify(&mut self, second: bool) {
        let _ = self.certify_with(second, false);
    }

    fn certify_checked(&mut self, second: bool) -> Result<()> {
        self.certify_with(second, true)
    }

    fn certify_with(&mut self, second: bool, checked: bool) -> Result<()> {
        let pts: Vec<f64> = grid().collect();
        let vals: Vec<Result<(f64, f64)>> = pts
            .par_iter()
            .map(|&w| {
                let f = if checked { self.f_checked(w)? } else { self.f(w) };
                Ok((f, w * f + self.test_fn.eval(w) - self.normal_mean))
            })
            .collect();
        let vals: Vec<(f64, f64)> = vals.into_iter().collect::<Result<_>>()?;
        self.norm_f = vals.iter().map(|v| v.0.abs()).fold(0.0, f64::max);
        self.norm_f_prime = vals.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
        self.norm_f_double_prime = second.then(|| {
            vals.windows(2).map(|p| (p[1].1 - p[0].1).abs() / GRID_STEP).fold(0.0, f64::max)
        });
        Ok(())
    }
}

fn indicator_value(x: f64, phi_x: f64, w: f64) -> f64 {
    if w <= x {
        normal::SQRT_2PI * normal::scaled_cdf(w) * (1.0 - phi_x)
    } else {
        normal::SQRT_2PI * phi_x * normal::scaled_cdf(-w)
    }
}

fn quadrature_value(h: &TestFunction, eh: f64, w: f64) -> (f64, f64) {
    let mut breaks: Vec<f64> = TAIL_BREAKS.to_vec();
    if w <= 0.0 {
        breaks.extend(h.kinks().iter().map(|k| w - k).filter(|&s| s > 0.0));
        integrate_raw(|s| (h.eval(w - s) - eh) * (w * s - 0.5 * s * s).exp(), 0.0, TAIL_END, &breaks, &QUAD)
    } else {
        breaks.extend(h.kinks().iter().map(|k| k - w).filter(|&s| s > 0.0));
        let (v, e) = integrate_raw(|s| (h.eval(w + s) - eh) * (-w * s - 0.5 * s * s).exp(), 0.0, TAIL_END, &breaks, &QUAD);
        (-v, e)
    }
}

/// A law given exactly or through a sample.
#[derive(Debug, Clone, Copy)]
pub enum Law<'a> {
    Exact(&'a FiniteDist),
    Sample(&'a [f64]),
}

impl Law<'_> {
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match self {
            Law::Exact(d) => d.expect(f),
            Law::Sample(xs) => xs.iter().map(|&x| f(x)).sum::<f64>() / xs.len() as f64,
        }
    }
}

/// E[f′(W) − W f(W)]; zero for every admissible f exactly when W ~ N(0, 1).
pub fn characterization_residual<D: Differentiable + ?Sized>(w: Law<'_>, f: &D) -> f64 {
    w.expect(|x| f.derivative(x) - x * f.value(x))
}

/// Both sides of E h(W) − E h(Z) = E[f_h′(W) − W f_h(W)].
pub fn discrepancy_identity_check(w: &FiniteDist, h: &TestFunction) -> Result<(f64, f64)> {
    let sol = solve_uncertified(h)?;
    let lhs = w.expect(|x| h.eval(x)) - sol.normal_mean;
    let mut rhs = 0.0;
    for (x, p) in w.iter() {
        let f = sol.f_checked(x)?;
        let fp = x * f + h.eval(x) - sol.normal_mean;
        rhs += p * (fp - x * f);
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Classical RK4 on f′ = w f + g(w), integrated forward from −8 and
    /// backward from +8 towards `target`, starting from the asymptotic
    /// bounded solution f ≈ −g(w)/w. Errors in the start value are damped
    /// by e^{−(64 − target²)/2}.
    fn ode_oracle(g: &dyn Fn(f64) -> f64, target: f64, steps: usize) -> f64 {
        let rhs = |w: f64, f: f64| w * f + g(w);
        let (start, dir) = if target <= 0.0 { (-8.0, 1.0) } else { (8.0, -1.0) };
        let mut f = -g(start) / start;
        let h = dir * (target - start).abs() / steps as f64;
        let node = |i: usize| if i == steps { target } else { start + i as f64 * h };
        for i in 0..steps {
            let (w, next) = (node(i), node(i + 1));
            let mid = 0.5 * (w + next);
            let k1 = rhs(w, f);
            let k2 = rhs(mid, f + h / 2.0 * k1);
            let k3 = rhs(mid, f + h / 2.0 * k2);
            let k4 = rhs(next, f + h * k3);
            f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        f
    }

    #[test]
    fn indicator_at_zero_matches_ode_oracle() {
        let oracle = ode_oracle(&|w| if w <= 0.0 { 0.5 } else { -0.5 }, 0.0, 200_000);
        let s = solve_indicator(0.0);
        assert!((oracle - 0.626_657).abs() < 1e-6);
        assert!((s.f(0.0) - oracle).abs() < 1e-8);
        assert!((s.f(0.0) - normal::SQRT_2PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_tails_and_certificates() {
        let s = solve_indicator(0.7);
        assert!(s.f(-30.0) < 0.02 && s.f(-300.0) < 0.002 && s.f(-300.0) > 0.0);
        assert!(s.f(40.0) < 0.03 && s.f(40.0) > 0.0);
        let s = solve_indicator(1.5);
        assert!(s.norm_f <= 1.0 && s.norm_f_prime <= 1.0);
        assert!(s.max_grid_residual() <= 1e-8);
    }

    #[test]
    fn indicator_solution_is_positive_and_unimodal() {
        for &x in &[-2.0, 0.0, 0.3, 2.5] {
            let s = solve_indicator(x);
            let vals: Vec<(f64, f64)> = grid().map(|w| (w, s.f(w))).collect();
            assert!(vals.iter().all(|&(_, f)| f > 0.0));
            for p in vals.windows(2) {
                if p[1].0 <= x {
                    assert!(p[1].1 >= p[0].1, "not increasing before x={x} at {}", p[1].0);
                } else if p[0].0 >= x {
                    assert!(p[1].1 <= p[0].1, "not decreasing after x={x} at {}", p[1].0);
                }
            }
        }
    }

    #[test]
    fn identity_test_function_gives_constant_solution() {
        let s = solve_smooth(&TestFunction::identity()).unwrap();
        for &w in &[-7.5, -1.0, 0.0, 0.3, 6.0] {
            assert!((s.f(w) + 1.0).abs() < 1e-10, "f({w}) = {}", s.f(w));
            assert!(s.f_prime(w).abs() < 1e-9);
        }
    }

    #[test]
    fn abs_solution_certificates() {
        let s = solve_smooth(&TestFunction::abs()).unwrap();
        assert!(s.norm_f_prime <= 1.0 + 1e-9);
        assert!(s.norm_f_double_prime.unwrap() <= 2.0 + 1e-6);
        assert!(s.max_grid_residual() <= 1e-8);
    }

    #[test]
    fn cos_solution_matches_ode_oracle() {
        let h = TestFunction::cos();
        let s = solve_smooth(&h).unwrap();
        let eh = (-0.5f64).exp();
        assert!((s.normal_mean - eh).abs() < 1e-13);
        assert!(s.max_grid_residual() <= 1e-8);
        for &w in &[-3.0, -0.5, 0.0, 0.8, 2.0] {
            let oracle = ode_oracle(&|t: f64| t.cos() - eh, w, 400_000);
            assert!((s.f(w) - oracle).abs() < 1e-8, "w={w}: {} vs {oracle}", s.f(w));
        }
    }

    #[test]
    fn smooth_solution_satisfies_equation_by_finite_differences() {
        let s = solve_smooth(&TestFunction::cos()).unwrap();
        let d = 1e-3;
        for &w in &[-2.0, -0.7, 0.4, 1.9] {
            let fd = (-s.f(w + 2.0 * d) + 8.0 * s.f(w + d) - 8.0 * s.f(w - d) + s.f(w - 2.0 * d)) / (12.0 * d);
            assert!((fd - w * s.f(w) - (w.cos() - s.normal_mean)).abs() < 1e-7);
        }
    }

    #[test]
    fn solve_smooth_rejects_other_kinds() {
        assert!(solve_smooth(&TestFunction::indicator(0.0)).is_err());
        assert!(solve_bounded(&TestFunction::cos()).is_err());
    }

    #[test]
    fn bounded_solution_norms() {
        let s = solve_bounded(&TestFunction::smoothed_interval(-0.5, 1.0, 0.1)).unwrap();
        // ‖f_h′‖ ≤ 2‖h‖ for 0 ≤ h ≤ 1
        assert!(s.norm_f_prime <= 2.0);
        assert!(s.max_grid_residual() <= 1e-8);
    }

    #[test]
    fn characterization_examples() {
        let r = FiniteDist::rademacher(1.0);
        let v = characterization_residual(Law::Exact(&r), &FnPair(|w| w, |_| 1.0));
        assert_eq!(v, 0.0);
        let p = FiniteDist::point_mass(0.0);
        let v = characterization_residual(Law::Exact(&p), &solve_indicator(0.0));
        assert!((v - 0.5).abs() < 1e-15);
        let sample = [1.0, -1.0, 1.0, -1.0];
        let v = characterization_residual(Law::Sample(&sample), &FnPair(|w| w, |_| 1.0));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn discrepancy_examples() {
        let r = FiniteDist::rademacher(1.0);
        let (l, rr) = discrepancy_identity_check(&r, &TestFunction::indicator(0.0)).unwrap();
        assert!(l.abs() < 1e-15 && rr.abs() < 1e-7);
        let (l, rr) = discrepancy_identity_check(&r, &TestFunction::identity()).unwrap();
        assert!(l.abs() < 1e-12 && rr.abs() < 1e-9);
    }

    #[test]
    fn class_spot_checks() {
        let mut rng = crate::rng::stream(1, 0);
        assert!(TestFunction::cos().check_class(&mut rng, 1000));
        let bad = TestFunction::lipschitz("2w", Arc::new(|w| 2.0 * w), 1.0, vec![]);
        assert!(!bad.check_class(&mut rng, 100));
        assert!(TestFunction::smoothed_halfline(0.0, 0.5).check_class(&mut rng, 0));
    }
}
