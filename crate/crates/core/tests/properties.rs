use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use stein_core::bounds::{be_iid_model, dtv_interpolation, dw_indep, gaussian_vector, GaussianFunctional, QuadraticFunctional};
use stein_core::couplings::{size_bias, zero_bias};
use stein_core::distances::{distances_mc, dkw_width, kolmogorov_exact, ks_statistic, tv_smoothed_mc, wasserstein_exact, EmpiricalSample};
use stein_core::distributions::{make_finite, sum_law, FiniteDist, IndepSumModel};
use stein_core::exchangeable::{example2_joint, regression_check, JOINT_STATE_CAP};
use stein_core::harness::random_admissible_matrix;
use stein_core::normal;
use stein_core::rng::{par_draws, stream};

fn law() -> impl Strategy<Value = FiniteDist> {
    prop::collection::vec((-4.0f64..4.0, 0.01f64..1.0), 1..7)
        .prop_map(|v| {
            let (a, m): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            make_finite(&a, &m).unwrap()
        })
}

fn centered_law() -> impl Strategy<Value = FiniteDist> {
    law().prop_map(|d| d.centered()).prop_filter("nondegenerate", |d| d.moments().variance > 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_bias_identity_holds(d in centered_law(), c in -2.0f64..2.0) {
        let z = zero_bias(&d).unwrap();
        for f in [|x: f64| x.powi(3), |x: f64| x.sin()] {
            let (l, r) = z.identity_sides(f);
            prop_assert!((l - r).abs() <= 1e-9 * (1.0 + l.abs()));
        }
        let (l, r) = z.identity_sides(|x| (x - c).abs());
        prop_assert!((l - r).abs() <= 1e-9 * (1.0 + l.abs()));
    }

    #[test]
    fn size_bias_identity_holds(d in law(), shift in 0.0f64..1.0) {
        let d = d.shift(-d.min() + shift);
        prop_assume!(d.mean() > 1e-6);
        let s = size_bias(&d).unwrap();
        let (l, r) = s.identity_sides(|x| x.cos());
        prop_assert!((l - r).abs() <= 1e-9);
    }

    #[test]
    fn distances_are_in_range(d in centered_law()) {
        let d = d.scale(1.0 / d.moments().variance.sqrt());
        let k = kolmogorov_exact(&d);
        prop_assert!((0.0..=1.0).contains(&k));
        let w = wasserstein_exact(&d);
        prop_assert!(w >= 0.0);
        // Jensen: d_W(W, Z) >= |E|W| - E|Z||
        let gap = (d.expect(f64::abs) - (2.0 / std::f64::consts::PI).sqrt()).abs();
        prop_assert!(w + 1e-12 >= gap);
    }

    #[test]
    fn wasserstein_at_least_mean_gap(d in law()) {
        prop_assert!(wasserstein_exact(&d) + 1e-12 >= d.mean().abs());
    }

    #[test]
    fn lyapunov_ordering(d in law()) {
        let m = d.moments();
        let abs2 = d.expect(|x| x * x);
        prop_assert!(m.abs_third + 1e-12 >= abs2.powf(1.5));
    }

    #[test]
    fn exact_domination_random_iid(d in centered_law(), n in 1usize..9) {
        let d = d.scale(1.0 / (d.moments().variance * n as f64).sqrt());
        let m = IndepSumModel::iid(d, n).unwrap();
        let Ok(law) = sum_law(&m) else { return Ok(()) };
        prop_assert!(kolmogorov_exact(&law) <= be_iid_model(&m).unwrap().bound_value);
        prop_assert!(wasserstein_exact(&law) <= dw_indep(&m).unwrap().bound_value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn regression_for_random_arrays(n in 3usize..6, seed in any::<u64>()) {
        let cm = random_admissible_matrix(n, seed).unwrap();
        let j = example2_joint(&cm, JOINT_STATE_CAP).unwrap();
        prop_assert!(regression_check(&j, cm.lambda()) <= 1e-10);
    }
}

#[test]
fn dkw_band_covers_at_nominal_rate() {
    let m = 2000;
    let w = dkw_width(m, 0.01);
    let misses = (0..100u64)
        .filter(|&s| {
            let mut rng = stream(s, 0);
            let mut v: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            v.sort_by(f64::total_cmp);
            ks_statistic(&v, normal::cdf) > w
        })
        .count();
    // expected at most one miss; five would be a 1-in-10^4 event under the band
    assert!(misses <= 4, "{misses} of 100 samples outside the band");
}

#[test]
fn mc_distances_track_exact_values() {
    let m = IndepSumModel::rademacher(30);
    let law = sum_law(&m).unwrap();
    let draws = par_draws(400_000, 5, |r| m.sample_sum(r));
    let s = EmpiricalSample::new(draws, Some(5), "rademacher(30)").unwrap();
    let mc = distances_mc(&s).unwrap();
    assert!((mc.d_k - kolmogorov_exact(&law)).abs() <= mc.dkw_width);
    let dw = wasserstein_exact(&law);
    assert!((mc.d_w - dw).abs() <= 4.0 * mc.d_w_std_err + mc.dw_grid_bias, "{} vs {dw}", mc.d_w);
}

#[test]
fn smoothed_tv_below_interpolation_bound() {
    let n = 32;
    let g = QuadraticFunctional { n };
    let r = dtv_interpolation(&g, 4000, 100, 32, 12).unwrap();
    let draws = par_draws(200_000, 13, |rng| {
        let mut x = vec![0.0; n];
        gaussian_vector(rng, &mut x);
        g.value(&x)
    });
    let grid: Vec<f64> = (0..=40).map(|k| -4.0 + 0.2 * k as f64).collect();
    let tv = tv_smoothed_mc(&draws, &grid, 0.1);
    let se = r.bound_std_err.unwrap_or(0.0);
    assert!(tv.value <= r.bound_value + 3.0 * (se + tv.std_err), "{} vs {}", tv.value, r.bound_value);
}
