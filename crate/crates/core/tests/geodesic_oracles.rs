//! Oracles for induced, toric and multidimensional geodesics.

use std::f64::consts::TAU;

use kahler_lab::flows::HoloField;
use kahler_lab::geodesics::energy::{aubin_yau_energy, aubin_yau_energy_quadrature};
use kahler_lab::geodesics::multi::{multi_geodesic, TimeGrid2};
use kahler_lab::geodesics::{
    asymptotic_slope, extension_interval, geodesic_residual, hcmae_residual, induced_geodesic,
    max_extension_time, toric_geodesic, ExtensionTime, TimeGrid,
};
use kahler_lab::grid::profile::Profile;
use kahler_lab::grid::{Manifold, ScalarField, SymplecticPotential};

/// Energy-gauged rotation potential: `log(1 + (e^{2t}−1)m) − t`.
fn rotation_closed_form(man: &Manifold, t: f64) -> ScalarField {
    let c = man.as_cp1().unwrap();
    ScalarField::new(
        man.shape(),
        (0..c.nodes())
            .map(|i| (1.0 + ((2.0 * t).exp() - 1.0) * c.m(i)).ln() - t)
            .collect(),
    )
}

fn rotation_path(intervals: usize, grid: TimeGrid) -> kahler_lab::geodesics::GeodesicPath {
    let man = Manifold::cp1_fubini_study(intervals).unwrap();
    induced_geodesic(&man, &HoloField::cp1_linear(1.0, 0.0), grid, false).unwrap()
}

#[test]
fn flat_torus_path_is_identically_zero() {
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let path = induced_geodesic(
        &man,
        &HoloField::torus_constant(1.0, 0.0),
        TimeGrid::new(-1.0, 1.0, 8),
        true,
    )
    .unwrap();
    for i in 0..path.times.nodes() {
        assert!(path.potentials[i].sup_norm() < 1e-12);
        assert!(path.velocities[i].sup_norm() < 1e-12);
    }
}

#[test]
fn rotation_potentials_match_closed_form() {
    let path = rotation_path(256, TimeGrid::new(-1.0, 1.0, 16));
    let mut worst = 0.0_f64;
    for i in 0..path.times.nodes() {
        let closed = rotation_closed_form(&path.manifold, path.times.t(i));
        worst = worst.max(path.potentials[i].sub(&closed).sup_norm());
    }
    assert!(worst < 3e-7, "closed-form mismatch {worst:.3e}");
}

#[test]
fn rotation_velocities_match_closed_form() {
    // u̇_t = 2 m_t − 1 with m_t the flowed moment coordinate
    let path = rotation_path(128, TimeGrid::new(-1.0, 1.0, 8));
    let c = path.manifold.as_cp1().unwrap();
    let mut worst = 0.0_f64;
    for i in 0..path.times.nodes() {
        let t = path.times.t(i);
        for k in 0..c.nodes() {
            let m = c.m(k);
            let mt = if m == 0.0 {
                0.0
            } else if m == 1.0 {
                1.0
            } else {
                let r = m / (1.0 - m) * (2.0 * t).exp();
                r / (1.0 + r)
            };
            worst = worst.max((path.velocities[i].data[k] - (2.0 * mt - 1.0)).abs());
        }
    }
    assert!(worst < 1e-9, "velocity mismatch {worst:.3e}");
}

#[test]
fn obstructed_construction_requires_override() {
    let man = Manifold::torus(32, |x1, _| 1.0 + 0.3 * (TAU * x1).cos()).unwrap();
    let field = HoloField::torus_constant(1.0, 0.0);
    let grid = TimeGrid::new(0.0, 1.0, 8);
    assert!(induced_geodesic(&man, &field, grid, false).is_err());
    assert!(induced_geodesic(&man, &field, grid, true).is_ok());
}

#[test]
fn counterexample_path_is_periodic_and_nonconstant() {
    let man = Manifold::torus(64, |x1, _| 1.0 + 0.3 * (TAU * x1).cos()).unwrap();
    let path = induced_geodesic(
        &man,
        &HoloField::torus_constant(1.0, 0.0),
        TimeGrid::new(0.0, 1.0, 16),
        true,
    )
    .unwrap();
    let n = path.times.nodes();
    let period_gap = path.potentials[n - 1].sub(&path.potentials[0]).sup_norm();
    assert!(period_gap < 1e-10, "period gap {period_gap:.3e}");
    let mid_gap = path.potentials[n / 2].sub(&path.potentials[0]).sup_norm();
    assert!(mid_gap > 1e-2, "path should be nonconstant, gap {mid_gap:.3e}");
}

#[test]
fn counterexample_potential_matches_closed_form() {
    // ¼Δu = ξ(x₁+t) − ξ(x₁) with ξ = 1 + ε cos 2πx₁ gives
    // u = −(ε/π²)[cos 2π(x₁+t) − cos 2πx₁] plus the energy gauge
    let eps = 0.3;
    let man = Manifold::torus(64, move |x1, _| 1.0 + eps * (TAU * x1).cos()).unwrap();
    let t = 0.3;
    let path = induced_geodesic(
        &man,
        &HoloField::torus_constant(1.0, 0.0),
        TimeGrid::new(0.0, t, 4),
        true,
    )
    .unwrap();
    let torus = man.as_torus().unwrap();
    let i = path.times.nodes() - 1;
    let mut closed: Vec<f64> = (0..man.shape().len())
        .map(|idx| {
            let (x1, _) = torus.node(idx);
            -(eps / (std::f64::consts::PI * std::f64::consts::PI))
                * ((TAU * (x1 + t)).cos() - (TAU * x1).cos())
        })
        .collect();
    let closed_field = ScalarField::new(man.shape(), closed.clone());
    let e = aubin_yau_energy(&man, &closed_field).unwrap();
    for v in closed.iter_mut() {
        *v -= e / man.volume();
    }
    let diff: f64 = path.potentials[i]
        .data
        .iter()
        .zip(&closed)
        .fold(0.0, |acc, (&a, &b)| acc.max((a - b).abs()));
    assert!(diff < 1e-10, "counterexample closed form mismatch {diff:.3e}");
}

#[test]
fn energy_of_zero_is_zero_and_constants_scale_by_volume() {
    let man = Manifold::cp1_fubini_study(64).unwrap();
    assert_eq!(aubin_yau_energy(&man, &ScalarField::zeros(man.shape())).unwrap(), 0.0);
    let c = 0.7;
    let e = aubin_yau_energy(&man, &ScalarField::constant(man.shape(), c)).unwrap();
    assert!((e - c * man.volume()).abs() < 1e-12);
}

#[test]
fn energy_formulas_agree_on_random_smooth_fields() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let man = Manifold::cp1_fubini_study(128).unwrap();
    let c = man.as_cp1().unwrap();
    for _ in 0..5 {
        let a: f64 = rng.gen_range(-0.12..0.12);
        let b: f64 = rng.gen_range(-0.1..0.1);
        let u = ScalarField::new(
            man.shape(),
            (0..c.nodes())
                .map(|i| {
                    let m = c.m(i);
                    a * (std::f64::consts::PI * m).sin() + b * m * m
                })
                .collect(),
        );
        let e1 = aubin_yau_energy(&man, &u).unwrap();
        let e2 = aubin_yau_energy_quadrature(&man, &u, 64).unwrap();
        assert!((e1 - e2).abs() < 1e-8, "energy routes differ: {}", e1 - e2);
    }
}

#[test]
fn canonical_paths_have_zero_energy() {
    use kahler_lab::geodesics::energy::aubin_yau_energy_with;
    use kahler_lab::grid::Form11;
    let path = rotation_path(128, TimeGrid::new(-1.0, 1.0, 8));
    let reference = path.manifold.reference_metric();
    for i in 0..path.times.nodes() {
        let q = Form11 {
            density: path.metrics[i].density.sub(&reference.density),
        };
        let e = aubin_yau_energy_with(&path.manifold, &path.potentials[i], &q).unwrap();
        assert!(e.abs() < 1e-10, "energy at node {i}: {e:.3e}");
    }
}

#[test]
fn residual_errors_on_boundary_nodes() {
    let path = rotation_path(64, TimeGrid::new(0.0, 1.0, 8));
    assert!(geodesic_residual(&path, 0).is_err());
    assert!(geodesic_residual(&path, 8).is_err());
}

#[test]
fn flat_path_residual_is_exactly_zero() {
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let path = induced_geodesic(
        &man,
        &HoloField::torus_constant(1.0, 0.0),
        TimeGrid::new(-1.0, 1.0, 8),
        true,
    )
    .unwrap();
    let r = geodesic_residual(&path, 4).unwrap();
    assert!(r.deviation < 1e-12);
    assert!(hcmae_residual(&path, 4).unwrap() < 1e-12);
}

#[test]
fn rotation_residual_converges_at_second_order() {
    let deviation_at = |intervals: usize| -> f64 {
        let steps = intervals / 16;
        let path = rotation_path(intervals, TimeGrid::new(-0.5, 0.5, steps));
        geodesic_residual(&path, steps / 2).unwrap().deviation
    };
    let (e1, e2, e3) = (deviation_at(64), deviation_at(128), deviation_at(256));
    let s1 = (e1 / e2).log2();
    let s2 = (e2 / e3).log2();
    assert!(
        s1 > 1.8 && s2 > 1.8,
        "residual orders {s1:.2}, {s2:.2} (deviations {e1:.2e} {e2:.2e} {e3:.2e})"
    );
}

#[test]
fn counterexample_residual_stays_bounded_away_from_zero() {
    let eps = 0.3;
    let deviation_at = |n: usize| -> f64 {
        let man = Manifold::torus(n, move |x1, _| 1.0 + eps * (TAU * x1).cos()).unwrap();
        let steps = n / 8;
        let path = induced_geodesic(
            &man,
            &HoloField::torus_constant(1.0, 0.0),
            TimeGrid::new(0.0, 1.0, steps),
            true,
        )
        .unwrap();
        geodesic_residual(&path, steps / 2).unwrap().deviation
    };
    let (d1, d2) = (deviation_at(32), deviation_at(64));
    assert!(d1 > 0.1 && d2 > 0.1, "deviations {d1:.3e}, {d2:.3e}");
    assert!((d1 - d2).abs() / d1 < 0.2, "should not vanish under refinement");
}

#[test]
fn hcmae_and_geodesic_residuals_are_consistent() {
    // the wedge-density residual is bounded by the deviation times sup ρ_t
    let path = rotation_path(128, TimeGrid::new(-0.5, 0.5, 8));
    let r = geodesic_residual(&path, 4).unwrap();
    let h = hcmae_residual(&path, 4).unwrap();
    let rho_sup = path.metrics[4].density.max();
    assert!(h <= r.deviation * rho_sup * (1.0 + 1e-12));
    assert!(h >= r.deviation * path.metrics[4].density.min() * (1.0 - 1e-12));
}

#[test]
fn toric_path_with_same_endpoints_is_constant() {
    let man = Manifold::cp1_fubini_study(64).unwrap();
    let w1 = SymplecticPotential::fubini_study();
    let path = toric_geodesic(&man, &w1, TimeGrid::new(0.0, 1.0, 8)).unwrap();
    for i in 0..path.times.nodes() {
        assert!(path.potentials[i].sup_norm() < 1e-12);
        assert!(path.velocities[i].sup_norm() < 1e-12);
    }
    let r = geodesic_residual(&path, 4).unwrap();
    assert!(r.deviation < 1e-12);
}

#[test]
fn affine_toric_path_matches_induced_geodesic() {
    // w₁ = w₀ + affine(m) generates the dilation flow: an s-shift by −b·t,
    // i.e. the induced geodesic of V = −(b/2)·z∂/∂z
    let b = 0.8;
    let man = Manifold::cp1_fubini_study(256).unwrap();
    let w1 = SymplecticPotential::new(Profile::Affine { a: 0.3, b });
    let grid = TimeGrid::new(0.0, 1.0, 8);
    let toric = toric_geodesic(&man, &w1, grid).unwrap();
    let induced = induced_geodesic(&man, &HoloField::cp1_linear(-b / 2.0, 0.0), grid, false).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..grid.nodes() {
        worst = worst.max(toric.potentials[i].sub(&induced.potentials[i]).sup_norm());
    }
    assert!(worst < 1e-6, "toric vs induced mismatch {worst:.3e}");
}

#[test]
fn toric_bump_residual_converges_at_second_order() {
    let w1 = SymplecticPotential::new(Profile::squared_bump(0.05));
    let deviation_at = |intervals: usize| -> f64 {
        let man = Manifold::cp1_fubini_study(intervals).unwrap();
        let steps = intervals / 16;
        let path = toric_geodesic(&man, &w1, TimeGrid::new(0.0, 1.0, steps)).unwrap();
        geodesic_residual(&path, steps / 2).unwrap().deviation
    };
    let (e1, e2, e3) = (deviation_at(64), deviation_at(128), deviation_at(256));
    let s1 = (e1 / e2).log2();
    let s2 = (e2 / e3).log2();
    assert!(
        s1 > 1.7 && s2 > 1.7,
        "toric residual orders {s1:.2}, {s2:.2} ({e1:.2e} {e2:.2e} {e3:.2e})"
    );
}

#[test]
fn velocities_nondecreasing_in_time_along_geodesics() {
    let path = rotation_path(64, TimeGrid::new(-1.0, 1.0, 16));
    let c = path.manifold.as_cp1().unwrap();
    for k in 0..c.nodes() {
        for i in 1..path.times.nodes() {
            let prev = path.velocities[i - 1].data[k];
            let next = path.velocities[i].data[k];
            assert!(next >= prev - 1e-12, "velocity decreased at node {k}");
        }
    }
}

#[test]
fn max_extension_of_affine_direction_is_infinite() {
    let w0 = SymplecticPotential::fubini_study();
    assert_eq!(
        max_extension_time(&w0, &Profile::Affine { a: 1.0, b: -2.0 }),
        ExtensionTime::Infinite
    );
    assert_eq!(max_extension_time(&w0, &Profile::Zero), ExtensionTime::Infinite);
}

#[test]
fn max_extension_of_squared_bump_is_four() {
    // brute-force oracle: T = min over (t, m) scans of convexity loss for
    // δw = m²(1−m)²; the analytic minimum sits at m = ½ where
    // w_FS'' = 4 and |δw''| = 1, so T = 4
    let w0 = SymplecticPotential::fubini_study();
    let dw = Profile::squared_bump(1.0);
    // oracle scan
    let mut t_scan = f64::INFINITY;
    for i in 1..1000 {
        let m = i as f64 / 1000.0;
        let a = 1.0 / (m * (1.0 - m));
        let b = dw.d2(m);
        if b.abs() > 1e-14 {
            t_scan = t_scan.min(a / b.abs());
        }
    }
    assert!((t_scan - 4.0).abs() < 1e-3, "scan oracle {t_scan}");
    match max_extension_time(&w0, &dw) {
        ExtensionTime::Finite(t) => assert!((t - 4.0).abs() < 1e-6, "T = {t}"),
        ExtensionTime::Infinite => panic!("expected finite extension"),
    }
}

#[test]
fn extension_interval_sides_are_ordered_for_signed_bump() {
    // asymmetric second derivative gives different one-sided times
    let w0 = SymplecticPotential::fubini_study();
    let dw = Profile::GaussBump {
        amp: 0.05,
        center: 0.5,
        sigma: 0.1,
    };
    let (neg, pos) = extension_interval(&w0, &dw);
    let (tn, tp) = (neg.as_f64(), pos.as_f64());
    assert!(tn.is_finite() && tp.is_finite());
    assert!(tn > 0.0 && tp > 0.0);
    assert!(tn != tp);
}

#[test]
fn multi_geodesic_splits_into_factor_paths() {
    let f1 = Manifold::cp1_fubini_study(64).unwrap();
    let f2 = Manifold::cp1_fubini_study(64).unwrap();
    let man = Manifold::product_cp1(
        f1.as_cp1().unwrap().clone(),
        f2.as_cp1().unwrap().clone(),
    );
    let tuple = HoloField::product(
        HoloField::cp1_linear(1.0, 0.0),
        HoloField::cp1_linear(0.6, 0.0),
    );
    let grid = TimeGrid2 {
        axis1: TimeGrid::new(-0.5, 0.5, 8),
        axis2: TimeGrid::new(-0.5, 0.5, 8),
    };
    let multi = multi_geodesic(&man, &tuple, grid).unwrap();
    // separation oracle: the product energy gauge constants vanish when the
    // factors are separately gauged
    let worst = multi
        .gauge_constants
        .iter()
        .fold(0.0_f64, |acc, &c| acc.max(c.abs()));
    assert!(worst < 1e-7, "gauge constants should vanish, worst {worst:.3e}");
    // mixed system: ü_{12} = ⟨∂̄u̇₁, ∂̄u̇₂⟩ = 0
    let mixed = multi.mixed_residual(4, 4).unwrap();
    assert!(mixed < 1e-7, "mixed residual {mixed:.3e}");
}

#[test]
fn multi_geodesic_zero_tuple_is_constant() {
    let f = Manifold::cp1_fubini_study(32).unwrap();
    let man = Manifold::product_cp1(
        f.as_cp1().unwrap().clone(),
        f.as_cp1().unwrap().clone(),
    );
    let tuple = HoloField::product(HoloField::cp1_linear(0.0, 0.0), HoloField::cp1_linear(0.0, 0.0));
    let grid = TimeGrid2 {
        axis1: TimeGrid::new(0.0, 1.0, 4),
        axis2: TimeGrid::new(0.0, 1.0, 4),
    };
    let multi = multi_geodesic(&man, &tuple, grid).unwrap();
    for i in 0..grid.axis1.nodes() {
        for j in 0..grid.axis2.nodes() {
            assert!(multi.potential_field(i, j).sup_norm() < 1e-12);
        }
    }
}

#[test]
fn diagonal_restriction_passes_residual_refinement() {
    let deviation_at = |intervals: usize| -> f64 {
        let f = Manifold::cp1_fubini_study(intervals).unwrap();
        let man = Manifold::product_cp1(
            f.as_cp1().unwrap().clone(),
            f.as_cp1().unwrap().clone(),
        );
        let tuple = HoloField::product(
            HoloField::cp1_linear(1.0, 0.0),
            HoloField::cp1_linear(0.5, 0.0),
        );
        let steps = intervals / 8;
        let grid = TimeGrid2 {
            axis1: TimeGrid::new(-0.5, 0.5, steps),
            axis2: TimeGrid::new(-0.5, 0.5, steps),
        };
        let multi = multi_geodesic(&man, &tuple, grid).unwrap();
        multi.diagonal_residual(steps / 2).unwrap().deviation
    };
    let (e1, e2) = (deviation_at(32), deviation_at(64));
    let slope = (e1 / e2).log2();
    assert!(slope > 1.7, "diagonal residual order {slope:.2} ({e1:.2e} {e2:.2e})");
}

#[test]
fn asymptotic_slope_of_rotation() {
    // M = 512: the fixed-point node carries measure πh, which must sit
    // below the deviation-measure bound
    let path = rotation_path(512, TimeGrid::new(-1.0, 1.0, 16));
    let samples: Vec<f64> = (0..11).map(|i| -5.0 + i as f64).collect();
    let report = asymptotic_slope(&path, 20.0, 1e-6, &samples).unwrap();
    // sup|u̇_t| ≡ 1 for all t
    for &(t, sup) in &report.sup_norms {
        assert!((sup - 1.0).abs() < 1e-8, "sup norm at t={t}: {sup}");
    }
    // velocity converges to +1 except in an exponentially small cap
    assert!((report.ess_max - 1.0).abs() < 1e-9);
    assert!(report.deviation_measure < 1e-3 * path.manifold.volume());
    // the slope field approaches 1 like log(m)/T away from the fixed point
    let c = path.manifold.as_cp1().unwrap();
    for k in 0..c.nodes() {
        let m = c.m(k);
        if m > 0.1 {
            let expected = 1.0 + m.ln() / 20.0;
            assert!(
                (report.slope.data[k] - expected).abs() < 1e-3,
                "slope at m={m}: {} vs {expected}",
                report.slope.data[k]
            );
        }
    }
}

#[test]
fn asymptotic_slope_of_flat_path_is_zero() {
    let man = Manifold::torus(32, |_, _| 1.0).unwrap();
    let path = induced_geodesic(
        &man,
        &HoloField::torus_constant(1.0, 0.0),
        TimeGrid::new(-1.0, 1.0, 8),
        true,
    )
    .unwrap();
    let report = asymptotic_slope(&path, 20.0, 1e-6, &[-5.0, 0.0, 5.0]).unwrap();
    assert!(report.velocity.sup_norm() < 1e-12);
    assert!(report.slope.sup_norm() < 1e-12);
}
