use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swlab::experiments::checks::random_real_field;
use swlab::spectral::multiplier::{derivative, Multiplier};
use swlab::spectral::{make_grid, Complex64, Direction, Field, GaussLegendre, GridSpec, Origin, DEFAULT_DEALIAS};

fn rel_max(a: &Field, b: &Field) -> f64 {
    let (a, b) = (a.to_physical(), b.to_physical());
    let scale = b.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    diff / scale.max(1e-300)
}

#[test]
fn grid_arithmetic() {
    let g = make_grid(2.0 * PI, 64, DEFAULT_DEALIAS).unwrap();
    assert!((g.spacing() - 1.0).abs() < 1e-15);
    assert!((g.nyquist().0 - 32.0).abs() < 1e-12);
    assert!((g.band_inner_radius() - 64.0 / 3.0).abs() < 1e-12);
    let g = make_grid(4.0 * PI, 64, DEFAULT_DEALIAS).unwrap();
    assert!((g.spacing() - 0.5).abs() < 1e-15);
    assert!(make_grid(2.0 * PI, 63, DEFAULT_DEALIAS).is_err());
    assert!(make_grid(0.0, 64, DEFAULT_DEALIAS).is_err());
    assert!(make_grid(-1.0, 64, DEFAULT_DEALIAS).is_err());
}

#[test]
fn constant_lands_on_zero_mode() {
    let g = GridSpec::square(2.0 * PI, 16).unwrap();
    let s = Field::constant(g, 2.5).transform(Direction::Forward).unwrap();
    let v = s.values();
    assert!(v[0].norm() > 1.0);
    assert!(v[1..].iter().all(|z| z.norm() < 1e-13));
}

#[test]
fn cosine_has_two_equal_coefficients() {
    let g = GridSpec::square(2.0 * PI, 16).unwrap();
    let s = Field::from_fn(g, |x, _| x.cos()).to_spectral();
    let plus = s.values()[g.mode_index(1, 0).unwrap()];
    let minus = s.values()[g.mode_index(-1, 0).unwrap()];
    assert!((plus - minus).norm() < 1e-13);
    assert!((plus.re - 8.0).abs() < 1e-12, "unitary coefficient {plus}");
    let rest: f64 = s.values().iter().map(|z| z.norm_sqr()).sum::<f64>() - 2.0 * plus.norm_sqr();
    assert!(rest.abs() < 1e-20);
}

#[test]
fn multiplier_examples() {
    let g = GridSpec::square(2.0 * PI, 32).unwrap();
    let f = Field::from_fn(g, |x, _| x.sin());
    let id = f.apply_multiplier(&Multiplier::real_even(Origin::Formula, |_, _| 1.0)).unwrap();
    assert!(rel_max(&id, &f) < 1e-14);
    let d = f.apply_multiplier(&derivative(0)).unwrap();
    assert!(rel_max(&d, &Field::from_fn(g, |x, _| x.cos())) < 1e-12);

    let vals = (0..g.len())
        .map(|k| {
            let x = (k % g.nx()) as f64 * g.dx();
            Complex64::from_polar(1.0, 2.0 * x)
        })
        .collect();
    let e2 = Field::from_physical(g, vals, false).unwrap();
    let m = Multiplier::real_even(Origin::Formula, |a, b| a * a + b * b);
    let out = e2.apply_multiplier(&m).unwrap().to_spectral();
    let idx = g.mode_index(2, 0).unwrap();
    let ratio = out.values()[idx] / e2.to_spectral().values()[idx];
    assert!((ratio - Complex64::new(4.0, 0.0)).norm() < 1e-12);

    let bad = Multiplier::real_even(Origin::Formula, |a, b| 1.0 / (a * a + b * b));
    assert!(f.apply_multiplier(&bad).is_err());
}

#[test]
fn heat_on_modes_and_zero_time() {
    let g = GridSpec::square(2.0 * PI, 32).unwrap();
    let f = Field::from_fn(g, |x, y| (3.0 * x).cos() * (4.0 * y).sin());
    assert!(rel_max(&f.heat_propagate(0.0).unwrap(), &f) < 1e-15);
    let t: f64 = 0.01;
    let expect = f.scale((-25.0 * t).exp());
    assert!(rel_max(&f.heat_propagate(t).unwrap(), &expect) < 1e-13);
    assert!(f.heat_propagate(-1.0).is_err());
    assert!(f.integrated_heat(-1.0).is_err());
}

#[test]
fn heat_of_periodized_gaussian() {
    let p = 2.0 * PI;
    let g = GridSpec::square(p, 128).unwrap();
    let gauss = |s2: f64| {
        move |x: f64, y: f64| {
            let mut acc = 0.0;
            for i in -1..=1 {
                for j in -1..=1 {
                    let dx = x - PI + i as f64 * p;
                    let dy = y - PI + j as f64 * p;
                    acc += (-(dx * dx + dy * dy) / (2.0 * s2)).exp() / s2;
                }
            }
            acc
        }
    };
    let s2 = 0.09;
    let t = 0.05;
    let evolved = Field::from_fn(g, gauss(s2)).heat_propagate(t).unwrap();
    let exact = Field::from_fn(g, gauss(s2 + 2.0 * t));
    assert!(rel_max(&evolved, &exact) < 1e-8);
}

#[test]
fn integrated_heat_examples() {
    let g = GridSpec::square(2.0 * PI, 32).unwrap();
    let c = Field::constant(g, 1.7);
    let ct = c.integrated_heat(0.3).unwrap();
    assert!(rel_max(&ct, &Field::constant(g, 1.7 * 0.3)) < 1e-14);
    assert!(c.integrated_heat(0.0).unwrap().spectral_energy() == 0.0);

    let f = Field::from_fn(g, |x, y| (3.0 * x + 4.0 * y).cos());
    let t: f64 = 0.1;
    let idx = g.mode_index(3, 4).unwrap();
    let got = f.integrated_heat(t).unwrap().to_spectral().values()[idx].re / f.to_spectral().values()[idx].re;
    let quad = GaussLegendre::new(64).integrate(0.0, t, |tau| (-25.0 * tau).exp());
    assert!((got - quad).abs() < 1e-10 * quad);
    assert!((got - (1.0 - (-25.0 * t).exp()) / 25.0).abs() < 1e-14);
}

#[test]
fn products() {
    let g = GridSpec::square(2.0 * PI, 32).unwrap();
    let f = Field::from_fn(g, |x, y| x.cos() + (2.0 * y).sin());
    let one = Field::constant(g, 1.0);
    assert!(rel_max(&f.pointwise_product(&one).unwrap(), &f) < 1e-13);
    let c = Field::from_fn(g, |x, _| x.cos());
    let sq = c.pointwise_product(&c).unwrap();
    assert!(rel_max(&sq, &Field::from_fn(g, |x, _| 0.5 * (1.0 + (2.0 * x).cos()))) < 1e-13);
}

/// Product coefficients by direct summation over all pairs of modes.
fn dense_convolution(f: &Field, h: &Field) -> Vec<Complex64> {
    let g = *f.grid();
    let (fs, hs) = (f.to_spectral(), h.to_spectral());
    let n = g.len();
    let norm = 1.0 / (n as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for a in 0..n {
        let (a1, a2) = (GridSpec::signed_index(a % g.nx(), g.nx()), GridSpec::signed_index(a / g.nx(), g.ny()));
        for b in 0..n {
            let (b1, b2) = (GridSpec::signed_index(b % g.nx(), g.nx()), GridSpec::signed_index(b / g.nx(), g.ny()));
            if let Some(k) = g.mode_index(a1 + b1, a2 + b2) {
                out[k] += fs.values()[a] * hs.values()[b] * norm;
            }
        }
    }
    out
}

#[test]
fn dealiased_product_matches_dense_convolution() {
    let g = GridSpec::square(2.0 * PI, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let f = random_real_field(&g, 2.6, 0.0, &mut rng).unwrap();
        let h = random_real_field(&g, 2.6, 0.0, &mut rng).unwrap();
        let got = f.pointwise_product(&h).unwrap().to_spectral();
        let want = dense_convolution(&f, &h);
        let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = got.values().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10 * scale, "error {err:e}");
    }
}

#[test]
fn lebesgue_norms() {
    let p = 3.0;
    let g = GridSpec::square(p, 16).unwrap();
    let c = Field::constant(g, -2.0);
    for e in [1.0, 2.0, 3.5] {
        let want = 2.0 * p.powf(2.0 / e);
        assert!((c.lp_norm(e).unwrap() - want).abs() < 1e-12 * want);
    }
    assert!((c.lp_norm(f64::INFINITY).unwrap() - 2.0).abs() < 1e-15);
    assert!(c.lp_norm(0.5).is_err());

    let g = GridSpec::square(2.0 * PI, 32).unwrap();
    let cos = Field::from_fn(g, |x, _| x.cos());
    assert!((cos.lp_norm(2.0).unwrap() - PI * 2f64.sqrt()).abs() < 1e-12);

    // 1D midpoint rule with 10⁶ points for ∫₀^{2π} cos⁴
    let m = 1_000_000;
    let h = 2.0 * PI / m as f64;
    let i4: f64 = (0..m).map(|k| ((k as f64 + 0.5) * h).cos().powi(4)).sum::<f64>() * h;
    let want = (2.0 * PI * i4).powf(0.25);
    assert!((cos.lp_norm(4.0).unwrap() - want).abs() < 1e-10 * want);
}

#[test]
fn duhamel_derivative_is_second_order() {
    let g = GridSpec::square(2.0 * PI, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_real_field(&g, 4.0, 0.0, &mut rng).unwrap();
    let t = 0.05;
    let target = f.heat_propagate(t).unwrap();
    let hs = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .map(|&h| {
            let fd = f
                .integrated_heat(t + h)
                .unwrap()
                .sub(&f.integrated_heat(t - h).unwrap())
                .unwrap()
                .scale(0.5 / h);
            (h.ln(), fd.rel_l2_diff(&target).unwrap().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope >= 1.9, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parseval(seed in any::<u64>(), radius in 2.0f64..10.0) {
        let g = GridSpec::square(2.0 * PI, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_real_field(&g, radius, 0.3, &mut rng).unwrap();
        let l2 = f.lp_norm(2.0).unwrap().powi(2);
        let spec = f.spectral_energy() * g.cell_area();
        prop_assert!((l2 - spec).abs() <= 1e-10 * spec);
    }

    #[test]
    fn round_trip(seed in any::<u64>()) {
        let g = GridSpec::anisotropic(3.0, 32, 16, DEFAULT_DEALIAS).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_real_field(&g, 20.0, 0.0, &mut rng).unwrap().into_physical();
        let back = f.transform(Direction::Forward).unwrap().transform(Direction::Inverse).unwrap();
        prop_assert!(back.rel_l2_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn heat_semigroup(seed in any::<u64>(), s in 0.0f64..0.5, t in 0.0f64..0.5) {
        let g = GridSpec::square(2.0 * PI, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_real_field(&g, 6.0, 0.0, &mut rng).unwrap();
        let two = f.heat_propagate(s).unwrap().heat_propagate(t).unwrap();
        let one = f.heat_propagate(s + t).unwrap();
        prop_assert!(two.rel_l2_diff(&one).unwrap() < 1e-12);
    }
}
