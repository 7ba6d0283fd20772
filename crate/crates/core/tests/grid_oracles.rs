//! Closed-form oracles for the manifold backends and their calculus.

use std::f64::consts::{PI, TAU};

use kahler_lab::error::Error;
use kahler_lab::grid::profile::Profile;
use kahler_lab::grid::{cp1, Form01, Form11, Manifold, ScalarField, SymplecticPotential};
use num_complex::Complex64;

fn torus_field(man: &Manifold, f: impl Fn(f64, f64) -> f64) -> ScalarField {
    let t = man.as_torus().unwrap();
    let n = t.n();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(f(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    ScalarField::new(man.shape(), data)
}

#[test]
fn flat_torus_volume_is_two() {
    let man = Manifold::torus(64, |_, _| 1.0).unwrap();
    assert!((man.volume() - 2.0).abs() < 1e-12);
}

#[test]
fn cosine_torus_volume_is_two() {
    // the cosine integrates to zero over the period
    let man = Manifold::torus(64, |x1, _| 1.0 + 0.3 * (TAU * x1).cos()).unwrap();
    assert!((man.volume() - 2.0).abs() < 1e-12);
}

#[test]
fn small_torus_rejected() {
    match Manifold::torus(8, |_, _| 1.0) {
        Err(Error::ResolutionTooSmall { given: 8, .. }) => {}
        other => panic!("expected resolution error, got {other:?}"),
    }
}

#[test]
fn non_positive_density_rejected_with_location() {
    let res = Manifold::torus(16, |x1, _| 1.0 - 2.0 * x1);
    match res {
        Err(Error::NonPositiveDensity { index, value }) => {
            assert!(value <= 0.0);
            assert!(index > 0);
        }
        other => panic!("expected positivity error, got {other:?}"),
    }
}

#[test]
fn fubini_study_volume_is_two_pi() {
    let man = Manifold::cp1_fubini_study(256).unwrap();
    assert!((man.volume() - TAU).abs() < 1e-10);
}

#[test]
fn perturbed_potential_is_valid_manifold() {
    let w = SymplecticPotential::new(Profile::squared_bump(0.05));
    let man = Manifold::cp1(256, w).unwrap();
    assert!((man.volume() - TAU).abs() < 1e-7);
}

#[test]
fn concave_potential_rejected() {
    // δ'' = −3 overwhelms w_FS'' = 1/μ ≥ 4 nowhere near the center? it does:
    // 1/μ(0.5) = 4 < 5, so convexity fails at the center
    let w = SymplecticPotential::new(Profile::Poly(vec![0.0, 0.0, -2.5]));
    match Manifold::cp1(256, w) {
        Err(Error::ConvexityFailure { m, .. }) => assert!(m > 0.2 && m < 0.8),
        other => panic!("expected convexity failure, got {other:?}"),
    }
}

#[test]
fn dbar_of_constant_vanishes() {
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let u = ScalarField::constant(man.shape(), 3.25);
    assert!(man.dbar(&u).unwrap().coeff.sup_norm() < 1e-12);
    let man_c = Manifold::cp1_fubini_study(64).unwrap();
    let u = ScalarField::constant(man_c.shape(), -1.5);
    assert!(man_c.dbar(&u).unwrap().coeff.sup_norm() < 1e-12);
}

#[test]
fn dbar_of_sine_matches_closed_form() {
    // u = sin 2πx₁: u_z̄ = ½ u_x = π cos 2πx₁
    let man = Manifold::torus(64, |_, _| 1.0).unwrap();
    let u = torus_field(&man, |x1, _| (TAU * x1).sin());
    let beta = man.dbar(&u).unwrap();
    let t = man.as_torus().unwrap();
    for (idx, v) in beta.coeff.data.iter().enumerate() {
        let (x1, _) = t.node(idx);
        let expected = Complex64::new(PI * (TAU * x1).cos(), 0.0);
        assert!((v - expected).norm() < 1e-10);
    }
}

#[test]
fn i_del_dbar_of_cosine_matches_closed_form() {
    // u = cos 2πx₂: density ¼Δu = −π² cos 2πx₂
    let man = Manifold::torus(64, |_, _| 1.0).unwrap();
    let u = torus_field(&man, |_, x2| (TAU * x2).cos());
    let q = man.i_del_dbar(&u).unwrap();
    let t = man.as_torus().unwrap();
    for (idx, &v) in q.density.data.iter().enumerate() {
        let (_, x2) = t.node(idx);
        assert!((v + PI * PI * (TAU * x2).cos()).abs() < 1e-9);
    }
}

#[test]
fn del_is_conjugate_of_dbar_for_real_fields() {
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let u = torus_field(&man, |x1, x2| (TAU * x1).sin() + 0.5 * (2.0 * TAU * x2).cos());
    let d = man.del(&u).unwrap();
    let db = man.dbar(&u).unwrap();
    let diff = d.coeff.sub(&db.coeff.conj());
    assert!(diff.sup_norm() < 1e-12);
}

#[test]
fn integrate_flat_reference_gives_volume() {
    let man = Manifold::torus(64, |_, _| 1.0).unwrap();
    let form = Form11 {
        density: man.reference_metric().density,
    };
    assert!((man.integrate(&form).unwrap() - 2.0).abs() < 1e-12);

    let man = Manifold::cp1_fubini_study(128).unwrap();
    let form = Form11 {
        density: man.reference_metric().density,
    };
    assert!((man.integrate(&form).unwrap() - TAU).abs() < 1e-12);
}

#[test]
fn integrate_zero_density_is_zero() {
    let man = Manifold::cp1_fubini_study(64).unwrap();
    let form = Form11 {
        density: ScalarField::zeros(man.shape()),
    };
    assert_eq!(man.integrate(&form).unwrap(), 0.0);
}

#[test]
fn integrate_is_linear_and_positive() {
    let man = Manifold::torus(32, |x1, _| 1.0 + 0.2 * (TAU * x1).cos()).unwrap();
    let f = torus_field(&man, |x1, x2| ((TAU * x1).sin() * (TAU * x2).cos()).powi(2));
    let g = torus_field(&man, |x1, _| 1.5 + (TAU * x1).sin());
    let form = |d: &ScalarField| Form11 { density: d.clone() };
    let a = man.integrate(&form(&f)).unwrap();
    let b = man.integrate(&form(&g)).unwrap();
    let combo = man
        .integrate(&form(&f.zip_map(&g, |x, y| 2.0 * x - 0.5 * y)))
        .unwrap();
    assert!((combo - (2.0 * a - 0.5 * b)).abs() < 1e-12);
    assert!(man.integrate(&form(&f)).unwrap() >= 0.0);
}

#[test]
fn poisson_solves_zero_to_zero() {
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let rho = Form11 {
        density: ScalarField::zeros(man.shape()),
    };
    assert!(man.poisson_solve(&rho).unwrap().sup_norm() < 1e-14);
}

#[test]
fn torus_poisson_round_trip() {
    // ρ = i∂∂̄(cos 2πx₁) solves back to the (already mean-zero) cosine
    let man = Manifold::torus(64, |_, _| 1.0).unwrap();
    let u = torus_field(&man, |x1, _| (TAU * x1).cos());
    let rho = man.i_del_dbar(&u).unwrap();
    let solved = man.poisson_solve(&rho).unwrap();
    assert!(solved.sub(&u).sup_norm() < 1e-10);
}

#[test]
fn torus_poisson_rejects_incompatible_data() {
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let rho = Form11 {
        density: ScalarField::constant(man.shape(), 0.1),
    };
    match man.poisson_solve(&rho) {
        Err(Error::CompatibilityViolation { .. }) => {}
        other => panic!("expected compatibility violation, got {other:?}"),
    }
}

#[test]
fn cp1_poisson_matches_pullback_potential() {
    // ρ = F_t*(ω_FS) − ω_FS for the flow of z∂/∂z has the closed-form
    // potential log((1+e^{2t}|z|²)/(1+|z|²)) = log(1 + (e^{2t}−1)m)
    use kahler_lab::flows::{flow, pullback_reference, HoloField};
    let man = Manifold::cp1_fubini_study(256).unwrap();
    let c = man.as_cp1().unwrap();
    let t = 0.7;
    let map = flow(&man, &HoloField::cp1_linear(1.0, 0.0), Complex64::new(t, 0.0)).unwrap();
    let pulled = pullback_reference(&man, &map).unwrap();
    let rho = Form11 {
        density: pulled.density.sub(&man.reference_metric().density),
    };
    let solved = man.poisson_solve_tol(&rho, 1e-4).unwrap();
    let mut closed: Vec<f64> = (0..c.nodes())
        .map(|i| (1.0 + ((2.0 * t).exp() - 1.0) * c.m(i)).ln())
        .collect();
    let closed_field = ScalarField::new(man.shape(), closed.clone());
    let mean = man.reference_mean(&closed_field);
    for v in closed.iter_mut() {
        *v -= mean;
    }
    let diff: f64 = solved
        .data
        .iter()
        .zip(&closed)
        .fold(0.0, |acc, (&a, &b)| acc.max((a - b).abs()));
    assert!(diff < 1e-7, "poisson vs closed form: {diff}");
}

#[test]
fn stokes_integral_of_i_del_dbar_vanishes() {
    let man = Manifold::torus(64, |x1, _| 1.0 + 0.25 * (TAU * x1).cos()).unwrap();
    let u = torus_field(&man, |x1, x2| {
        (TAU * x1).sin() * (TAU * x2).cos() + 0.3 * (2.0 * TAU * x2).sin()
    });
    let q = man.i_del_dbar(&u).unwrap();
    assert!(man.integrate(&q).unwrap().abs() < 1e-9);

    let man = Manifold::cp1_fubini_study(128).unwrap();
    let c = man.as_cp1().unwrap();
    let u = ScalarField::new(
        man.shape(),
        (0..c.nodes()).map(|i| (PI * c.m(i)).sin()).collect(),
    );
    let q = man.i_del_dbar(&u).unwrap();
    assert!(man.integrate(&q).unwrap().abs() < 1e-9);
}

#[test]
fn cp1_poisson_round_trip_converges_at_second_order() {
    let error_at = |intervals: usize| -> f64 {
        let man = Manifold::cp1_fubini_study(intervals).unwrap();
        let c = man.as_cp1().unwrap();
        let u = ScalarField::new(
            man.shape(),
            (0..c.nodes())
                .map(|i| {
                    let m = c.m(i);
                    (PI * m).sin() + 0.2 * m * m
                })
                .collect(),
        );
        let mean = man.reference_mean(&u);
        let q = man.i_del_dbar(&u).unwrap();
        let solved = man.poisson_solve(&q).unwrap();
        solved.sub(&u.shift(-mean)).sup_norm()
    };
    let e1 = error_at(64);
    let e2 = error_at(128);
    let e3 = error_at(256);
    let slope1 = (e1 / e2).log2();
    let slope2 = (e2 / e3).log2();
    assert!(
        slope1 > 1.8 && slope2 > 1.8,
        "round-trip orders {slope1:.2}, {slope2:.2} (errors {e1:.2e}, {e2:.2e}, {e3:.2e})"
    );
}

#[test]
fn harmonic_part_of_constant_form_is_itself() {
    // β = i dz̄: not ∂̄-exact on the torus
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let beta = Form01 {
        coeff: kahler_lab::grid::ComplexField::new(
            man.shape(),
            vec![Complex64::new(0.0, 1.0); man.shape().len()],
        ),
    };
    let harm = man.harmonic_part(&beta).unwrap();
    assert!((harm.coeff.data[0] - Complex64::new(0.0, 1.0)).norm() < 1e-13);
    assert!(harm.coeff.sup_norm() > 0.5);
}

#[test]
fn harmonic_part_of_exact_form_vanishes() {
    let man = Manifold::torus(64, |_, _| 1.0).unwrap();
    let u = torus_field(&man, |x1, _| (TAU * x1).sin());
    let beta = man.dbar(&u).unwrap();
    assert!(man.harmonic_part(&beta).unwrap().coeff.sup_norm() < 1e-10);
}

#[test]
fn harmonic_part_of_modulated_form_is_the_mean() {
    // β = (1 + ε cos 2πx₁) i dz̄ has harmonic coefficient i (the mean)
    let man = Manifold::torus(64, |_, _| 1.0).unwrap();
    let t = man.as_torus().unwrap();
    let data: Vec<Complex64> = (0..man.shape().len())
        .map(|idx| {
            let (x1, _) = t.node(idx);
            Complex64::new(0.0, 1.0 + 0.25 * (TAU * x1).cos())
        })
        .collect();
    let beta = Form01 {
        coeff: kahler_lab::grid::ComplexField::new(man.shape(), data),
    };
    let harm = man.harmonic_part(&beta).unwrap();
    assert!((harm.coeff.data[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn scalar_curvature_of_fubini_study_is_two() {
    let man = Manifold::cp1_fubini_study(128).unwrap();
    let s = man.scalar_curvature(&man.reference_metric()).unwrap();
    for &v in &s.data {
        assert!((v - 2.0).abs() < 1e-9, "S = {v}");
    }
}

#[test]
fn cp1_moment_reparam_is_exact_for_fubini_study() {
    let w = SymplecticPotential::fubini_study();
    for &m in &[0.0, 0.1, 0.5, 0.9, 1.0] {
        assert!((w.moment_reparam(m) - m).abs() < 1e-14);
    }
}

#[test]
fn cumulative_integral_is_fourth_order() {
    let f = |x: f64| (3.0 * x).sin() + x * x;
    let exact = |x: f64| (1.0 - (3.0 * x).cos()) / 3.0 + x * x * x / 3.0;
    let err_at = |n: usize| -> f64 {
        let h = 1.0 / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| f(i as f64 * h)).collect();
        let cum = cp1::cumulative_integral(&vals, h);
        (0..=n)
            .map(|i| (cum[i] - exact(i as f64 * h)).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err_at(64), err_at(128));
    assert!((e1 / e2).log2() > 3.7, "order {}", (e1 / e2).log2());
}
