use blockfade_core::fbl::dt_rate_from_samples;
use blockfade_core::mc::Sequential;
use blockfade_core::specfun::{q_inv, Tolerance};
use blockfade_core::{
    dt_epsilon, fano_upper, normal_approx_coh, normal_approx_noncoh, upper_bound_u, vbar_estimate,
    ChannelParams, Error, FblSpec, InfoDensitySamples, QuadratureSpec,
};

#[test]
fn empirical_dt_curve_is_monotone() {
    let p = ChannelParams::new(10, 10.0).unwrap();
    let s = InfoDensitySamples::draw(&p, 30, 50_000, 2, 4096, false, &Sequential).unwrap();
    let mut prev = 0.0;
    // Codeword densities here average about 510 nats; 1000 clears them all.
    for k in 0..=4000 {
        let e = dt_epsilon(&s, k as f64 * 0.25).mean;
        assert!(e >= prev);
        prev = e;
    }
    assert_eq!(prev, 1.0);
}

#[test]
fn bisection_brackets_the_target_and_sits_under_fano() {
    let q = QuadratureSpec::default();
    let tol = Tolerance::default();
    for (t, rho, blocks, eps) in [(10u32, 10.0, 40usize, 1e-2), (4, 1.0, 100, 5e-2), (50, 10.0, 4, 1e-2)] {
        let p = ChannelParams::new(t, rho).unwrap();
        let spec = FblSpec::new(p, blocks, eps).unwrap();
        let s = InfoDensitySamples::draw(&p, blocks, 200_000, 4, 4096, false, &Sequential).unwrap();
        let r = dt_rate_from_samples(&spec, &s).unwrap();
        assert!(r.epsilon_at_m <= eps);
        assert!(dt_epsilon(&s, r.log_m + 1e-5).mean > eps);
        let (u, _) = upper_bound_u(&p, &tol).unwrap();
        assert!(r.rate <= fano_upper(u, spec.n, eps).unwrap());
        assert!(r.rate <= normal_approx_coh(&p, spec.n, eps, &q).unwrap() + 0.05);
    }
}

#[test]
fn dt_rate_grows_with_epsilon() {
    let p = ChannelParams::new(10, 10.0).unwrap();
    let s = InfoDensitySamples::draw(&p, 20, 1_000_000, 9, 4096, false, &Sequential).unwrap();
    let loose = dt_rate_from_samples(&FblSpec::new(p, 20, 1e-2).unwrap(), &s).unwrap();
    let tight = dt_rate_from_samples(&FblSpec::new(p, 20, 1e-3).unwrap(), &s).unwrap();
    assert!(loose.rate >= tight.rate);
}

#[test]
fn too_few_samples_is_an_error_not_a_rate() {
    let p = ChannelParams::new(10, 10.0).unwrap();
    let s = InfoDensitySamples::draw(&p, 20, 5_000, 9, 4096, false, &Sequential).unwrap();
    let r = dt_rate_from_samples(&FblSpec::new(p, 20, 1e-3).unwrap(), &s);
    assert!(matches!(r, Err(Error::StatisticalResolution { .. })), "{r:?}");
}

#[test]
fn dispersion_estimate_scales_and_reproduces() {
    let p = ChannelParams::new(8, 10.0).unwrap();
    let a = vbar_estimate(&p, 300_000, 1, &Sequential).unwrap();
    let b = vbar_estimate(&p, 300_000, 2, &Sequential).unwrap();
    assert!(a.mean > 0.0);
    assert!((a.mean - b.mean).abs() <= 6.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt());
    assert_eq!(a, vbar_estimate(&p, 300_000, 1, &Sequential).unwrap());

    // Variance of a 5-block codeword density is 5·T·V̲.
    let s = InfoDensitySamples::draw(&p, 5, 300_000, 3, 4096, false, &Sequential).unwrap();
    let n = s.len() as f64;
    let mean = s.values.iter().sum::<f64>() / n;
    let m2 = s.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = s.values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let se_var = ((m4 - m2 * m2) / n).sqrt();
    let want = 5.0 * 8.0 * a.mean;
    let se = (se_var.powi(2) + (40.0 * a.stderr).powi(2)).sqrt();
    assert!((m2 - want).abs() <= 4.0 * se, "{m2} vs {want} ± {se}");
}

#[test]
fn coherent_approximation_dominates_noncoherent() {
    let q = QuadratureSpec::default();
    for t in [2u32, 10, 50, 200] {
        for rho in [1.0, 10.0] {
            let p = ChannelParams::new(t, rho).unwrap();
            let v = vbar_estimate(&p, 100_000, 5, &Sequential).unwrap();
            for n in [1000usize, 4000, 40_000] {
                for eps in [1e-3, 1e-1] {
                    let coh = normal_approx_coh(&p, n, eps, &q).unwrap();
                    let non = normal_approx_noncoh(&p, n, eps, &v, &q).unwrap();
                    assert!(coh >= non, "T={t} rho={rho} n={n} eps={eps}");
                }
            }
        }
    }
}

#[test]
fn normal_approximation_penalty_uses_q_inverse() {
    let q = QuadratureSpec::default();
    let p = ChannelParams::new(50, 10.0).unwrap();
    let v = vbar_estimate(&p, 50_000, 5, &Sequential).unwrap();
    let l = normal_approx_noncoh(&p, 4000, 0.5, &v, &q).unwrap();
    let r = normal_approx_noncoh(&p, 4000, 1e-3, &v, &q).unwrap();
    assert!(((l - r) - (v.mean / 4000.0).sqrt() * q_inv(1e-3).unwrap()).abs() < 1e-13);
}
