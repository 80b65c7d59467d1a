use blockfade_core::channel::DensitySampler;
use blockfade_core::mc::{self, Sequential};
use blockfade_core::specfun::Tolerance;
use blockfade_core::{
    coherent_capacity, coherent_dispersion, lower_bound_l, upper_bound_u, ChannelParams, QuadratureSpec,
};

#[test]
fn lower_bound_never_exceeds_upper_bound() {
    let q = QuadratureSpec::default();
    let tol = Tolerance::default();
    for t in [2u32, 5, 10, 20, 50, 100, 200] {
        for rho in [0.1, 1.0, 10.0, 100.0] {
            let p = ChannelParams::new(t, rho).unwrap();
            let l = lower_bound_l(&p, &q).unwrap();
            let (u, diag) = upper_bound_u(&p, &tol).unwrap();
            println!("T={t:<3} rho={rho:<5} L={l:.9} U={u:.9} maxima={}", diag.inner_local_maxima);
            assert!(l <= u, "T={t} rho={rho}: L={l} U={u}");
            assert!(l >= 0.0);
        }
    }
}

#[test]
fn lower_bound_rises_with_coherence_time() {
    let q = QuadratureSpec::default();
    let c = coherent_capacity(10.0, &q).unwrap();
    let mut prev = 0.0;
    for t in 2..=200u32 {
        let l = lower_bound_l(&ChannelParams::new(t, 10.0).unwrap(), &q).unwrap();
        assert!(l >= prev, "T={t}: {l} < {prev}");
        assert!(l < c);
        prev = l;
    }
}

#[test]
fn lower_bound_is_the_mean_information_density() {
    let q = QuadratureSpec::default();
    for (t, rho) in [(2u32, 1.0), (10, 10.0), (50, 10.0), (7, 0.3)] {
        let p = ChannelParams::new(t, rho).unwrap();
        let s = DensitySampler::new(&p).unwrap();
        let e = mc::estimate(|r| s.block(r).unwrap(), 300_000, 21, 4096, &Sequential).unwrap();
        let l = lower_bound_l(&p, &q).unwrap();
        let tf = t as f64;
        assert!(
            (l - e.mean / tf).abs() <= 3.0 * e.stderr / tf,
            "T={t} rho={rho}: L={l} mc={}",
            e.mean / tf
        );
    }
}

#[test]
fn coherent_dispersion_is_affine_in_t() {
    let q = QuadratureSpec::default();
    for rho in [0.5, 10.0, 100.0] {
        let v: Vec<f64> = (1..=6u32).map(|t| coherent_dispersion(t * 25, rho, &q).unwrap()).collect();
        let slope = v[1] - v[0];
        assert!(slope > 0.0);
        for w in v.windows(2) {
            assert!(((w[1] - w[0]) - slope).abs() < 1e-9 * v[5]);
        }
    }
}
