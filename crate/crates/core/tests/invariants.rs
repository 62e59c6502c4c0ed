use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhgt::algos::{is_parabolic, min_symmetric_pair, synchronous_check};
use rhgt::filling::{dehn_scan, AreaCaps, RowStatus, ScanOptions};
use rhgt::graph::rel_geodesic;
use rhgt::hypcheck::{bcp_check, estimate_delta, nu_scan, BcpParams, Sample};
use rhgt::zoo::{presets, DEFAULT_VERTEX_CAP};

#[test]
fn estimates_grow_with_radius_and_sample() {
    let z = presets::zz();
    let mut last = (0, 0);
    for r in 1..=3 {
        let d = estimate_delta(&z, r, Sample::Exhaustive).unwrap();
        assert!(d.delta_hat >= last.0 && d.nu_hat >= last.1);
        last = (d.delta_hat, d.nu_hat);
    }
    let small = estimate_delta(&z, 3, Sample::Seeded { count: 30, seed: 1 }).unwrap();
    let large = estimate_delta(&z, 3, Sample::Seeded { count: 90, seed: 1 }).unwrap();
    assert!(small.delta_hat <= large.delta_hat && small.nu_hat <= large.nu_hat);
}

#[test]
fn zz_nu_grows_without_bound() {
    let z = presets::zz();
    let nus: Vec<usize> = (1..=4)
        .map(|r| nu_scan(&z, r, Sample::Exhaustive).unwrap().nu_hat)
        .collect();
    assert!(nus.windows(2).all(|w| w[1] > w[0]), "{nus:?}");
}

#[test]
fn phase_margin_is_symmetric_for_geodesics() {
    let f = presets::f2relx();
    let o = &*f.oracle;
    let ball = o.enumerate_x_ball(3, DEFAULT_VERTEX_CAP).unwrap();
    let near = o.enumerate_x_ball(1, DEFAULT_VERTEX_CAP).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let g = &ball[rng.gen_range(0..ball.len())];
        let s = &near[rng.gen_range(0..near.len())];
        let p = rel_geodesic(&f, &o.identity(), g).unwrap();
        let q = rel_geodesic(&f, s, &o.multiply(g, s)).unwrap();
        let params = BcpParams {
            k: 1,
            ..Default::default()
        };
        let a = bcp_check(&f, &p, &q, &params, 0).unwrap();
        let b = bcp_check(&f, &q, &p, &params, 0).unwrap();
        assert_eq!(a.margins, b.margins);
    }
}

#[test]
fn parabolic_witness_survives_conjugation() {
    let f = presets::f2relx();
    let o = &*f.oracle;
    let g = f.element("y x^2 y^-1").unwrap();
    assert!(is_parabolic(&f, &g, 1).unwrap().is_some());
    for s in o.enumerate_x_ball(2, DEFAULT_VERTEX_CAP).unwrap() {
        let c = o.conjugate(&g, &s);
        let w = is_parabolic(&f, &c, 1 + o.x_length(&s)).unwrap();
        let w = w.expect("conjugate of a parabolic element");
        assert_eq!(o.subgroup_element(w.lambda, w.image), o.conjugate(&c, &w.t));
    }
}

#[test]
fn symmetric_pairs_have_synchronous_components() {
    let f = presets::f2relx();
    let o = &*f.oracle;
    let fs = ["x y", "y x^2 y", "x y^-1 x^3", "y @H(x^2) y^-1 x y"];
    for text in fs {
        let a = f.element(text).unwrap();
        for t in o.enumerate_x_ball(2, DEFAULT_VERTEX_CAP).unwrap() {
            let b = o.conjugate(&a, &t);
            let sp = min_symmetric_pair(&f, &a, &b, 2).unwrap().unwrap();
            assert!(sp.synchronous_components);
            assert_eq!(o.conjugate(&a, &sp.t), b);
            synchronous_check(&f, &sp.p, &sp.q).unwrap();
        }
    }
}

#[test]
fn dehn_rows_are_monotone_and_exact_for_finite_factors() {
    let g = presets::fp23();
    let t = dehn_scan(&g, 6, &ScanOptions::default()).unwrap();
    assert!(t.rows.windows(2).all(|w| w[0].area <= w[1].area));
    assert!(t.rows.iter().all(|r| r.status == RowStatus::Exact));
    let z = presets::zz();
    let opts = ScanOptions {
        caps: AreaCaps::with_max_area(2),
        ..Default::default()
    };
    let t = dehn_scan(&z, 4, &opts).unwrap();
    assert_eq!(t.rows[4].status, RowStatus::CapHit);
}
