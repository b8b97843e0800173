use std::f64::consts::{FRAC_PI_2, PI};

use mcf_lab::barriers::{pancake_margin, pancake_radius, PancakeConstants};
use mcf_lab::diagnostics::{discrete_turning, f_functional, fit_translation, phi_of_state, CurveSample, FitWindow};
use mcf_lab::experiments::config::perturbation_values;
use mcf_lab::experiments::Perturbation;
use mcf_lab::grid::{bicubic, d1, d2, Field, Geometry, Grid1D, Grid2D};
use mcf_lab::solver::{cfl_dt, step, BoundaryPolicy, DirichletSource, Face, FaceCondition, FlowState};
use mcf_lab::translators::{table_from_str, table_to_string, tilt_angle, TableMeta, TranslatorProfile};
use proptest::prelude::*;

fn reservoir(g: &Grid1D) -> BoundaryPolicy {
    BoundaryPolicy::new(vec![
        (Face::Left, FaceCondition::TailReservoir { tail: FRAC_PI_2 + g.lo() }),
        (Face::Right, FaceCondition::TailReservoir { tail: FRAC_PI_2 - g.hi() }),
    ])
}

fn bumped(g: &Grid1D, amplitude: f64, center: f64, width: f64) -> Field {
    let geometry = Geometry::Interval(*g);
    let bar = TranslatorProfile::GrimReaper.sample_on(&geometry).unwrap();
    let p = perturbation_values(&Perturbation::Bump { amplitude, center: vec![center], width }, &geometry, false).unwrap();
    Field::new(geometry, bar.values().iter().zip(&p).map(|(a, b)| a + b).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn second_differences_are_exact_on_quadratics(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, n in 8usize..200) {
        let g = Grid1D::new(-2.0, 3.0, n).unwrap();
        let f = Field::sample_interval(g, |x| a * x * x + b * x + c).unwrap();
        for v in d2(&f, 0).unwrap().values() {
            prop_assert!((v - 2.0 * a).abs() < 1e-7 * (1.0 + a.abs()) * (n * n) as f64 / 100.0);
        }
        let p = d1(&f, 0).unwrap();
        for (i, v) in p.values().iter().enumerate() {
            let x = g.node(i);
            prop_assert!((v - (2.0 * a * x + b)).abs() < 1e-8 * (n as f64));
        }
    }

    #[test]
    fn bicubic_reproduces_cubics(c in prop::array::uniform4(-2.0..2.0f64), x in -0.99..0.99f64, y in -0.49..0.49f64) {
        let grid = Grid2D::new(Grid1D::new(-1.0, 1.0, 16).unwrap(), Grid1D::new(-0.5, 0.5, 8).unwrap());
        let p = |x: f64, y: f64| c[0] + c[1] * x + c[2] * x * x * x + c[3] * x * y * y;
        let f = Field::sample_slab(grid, p).unwrap();
        prop_assert!((bicubic(&f, x, y).unwrap() - p(x, y)).abs() < 1e-10);
    }

    #[test]
    fn stable_steps_preserve_order(
        amp in -0.2..0.2f64,
        center in -0.5..0.5f64,
        width in 0.2..0.6f64,
        gap in 0.0..0.1f64,
        sigma in 0.05..1.0f64,
    ) {
        let g = Grid1D::with_spacing(-1.45, 1.45, 0.02).unwrap();
        let u = bumped(&g, amp, center, width);
        let v = bumped(&g, amp + gap, center, width);
        let su = FlowState::new(0.0, u.clone(), BoundaryPolicy::translating(&u, 0.0)).unwrap();
        let sv = FlowState::new(0.0, v.clone(), BoundaryPolicy::translating(&v, 0.0)).unwrap();
        let dt = cfl_dt(&u, sigma);
        let (mut a, mut b) = (su, sv);
        for _ in 0..20 {
            a = step(&a, dt).unwrap();
            b = step(&b, dt).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!(x <= y);
            }
        }
    }

    #[test]
    fn guarded_step_rejects_unstable_dt(factor in 1.01..10.0f64, h in 0.01..0.1f64) {
        let g = Grid1D::with_spacing(-1.0, 1.0, h).unwrap();
        let u = Field::sample_interval(g, |x| x * x).unwrap();
        let s = FlowState::new(0.0, u.clone(), BoundaryPolicy::translating(&u, 0.0)).unwrap();
        prop_assert!(step(&s, factor * cfl_dt(&u, 1.0)).is_err());
    }

    #[test]
    fn cfl_scales_with_h_squared(h in 0.005..0.1f64) {
        let a = Field::sample_interval(Grid1D::new(0.0, 1.0, (1.0 / h) as usize).unwrap(), |_| 0.0).unwrap();
        let b = Field::sample_interval(Grid1D::new(0.0, 1.0, 2 * (1.0 / h) as usize).unwrap(), |_| 0.0).unwrap();
        prop_assert!((cfl_dt(&a, 1.0) / cfl_dt(&b, 1.0) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn turning_never_increases_and_phi_is_conserved(amp in -0.25..0.25f64, center in -0.5..0.5f64, width in 0.2..0.6f64) {
        let g = Grid1D::with_spacing(-1.45, 1.45, 0.02).unwrap();
        let u = bumped(&g, amp, center, width);
        let mut s = FlowState::new(0.0, u, reservoir(&g)).unwrap();
        let profile = TranslatorProfile::GrimReaper;
        let phi0 = phi_of_state(&s, &profile).unwrap();
        let dt = cfl_dt(&s.field, 0.9);
        let mut turning = discrete_turning(&s).unwrap();
        for _ in 0..200 {
            s = step(&s, dt).unwrap();
            let now = discrete_turning(&s).unwrap();
            prop_assert!(now <= turning + 1e-12);
            turning = now;
        }
        prop_assert!((phi_of_state(&s, &profile).unwrap() - phi0).abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_vertical_shift(c0 in -0.5..0.5f64, t in 0.0..5.0f64) {
        let geometry = Geometry::Interval(Grid1D::with_spacing(-1.45, 1.45, 0.01).unwrap());
        let bar = TranslatorProfile::GrimReaper.sample_on(&geometry).unwrap();
        let u = bar.map(|v| v + c0 + t).unwrap();
        let fit = fit_translation(&u, &TranslatorProfile::GrimReaper, t, &FitWindow::interval(-1.0, 1.0), None).unwrap();
        prop_assert!((fit.c0 - c0).abs() < 1e-12);
        prop_assert!(fit.residual < 1e-12);
    }

    #[test]
    fn gaussian_density_is_scale_and_translation_invariant(
        r in 0.5..3.0f64,
        shift in prop::array::uniform2(-3.0..3.0f64),
        lambda in 0.3..3.0f64,
        t in 0.2..4.0f64,
    ) {
        let c = CurveSample::circle([0.0, 0.0], r, 400).unwrap();
        let base = f_functional(&c, [0.1, -0.2], t).unwrap();
        let moved = f_functional(&c.translated(shift), [0.1 + shift[0], -0.2 + shift[1]], t).unwrap();
        let scaled = f_functional(&c.dilated(lambda), [0.1 * lambda, -0.2 * lambda], lambda * lambda * t).unwrap();
        prop_assert!((moved - base).abs() < 1e-10);
        prop_assert!((scaled - base).abs() < 1e-10);
    }

    #[test]
    fn pancake_radius_grows_with_time(n in 1usize..6, lambda in 0.05..1.0f64, t in 0.0..10.0f64, dt in 0.01..5.0f64) {
        let pc = PancakeConstants::default();
        prop_assert!(pancake_radius(n, lambda, t + dt, pc).unwrap() > pancake_radius(n, lambda, t, pc).unwrap());
        if n == 1 {
            let closed = PI * (2.0 * t + pc.t0) / (2.0 * lambda) + 1.0;
            prop_assert_eq!(pancake_radius(1, lambda, t, pc).unwrap(), closed);
            prop_assert_eq!(pancake_margin(1, lambda, t).unwrap(), PI * t / (2.0 * lambda) + 1.0);
        }
    }

    #[test]
    fn tilt_angle_matches_its_definition(extra in 1e-6..10.0f64) {
        let b = FRAC_PI_2 + extra;
        let theta = tilt_angle(b).unwrap();
        prop_assert!((0.0..FRAC_PI_2).contains(&theta));
        prop_assert!((theta.cos() * 2.0 * b / PI - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_ripples_are_seeded_and_bounded(seed in any::<u64>(), modes in 1usize..10, amplitude in 0.01..1.0f64) {
        let geometry = Geometry::Slab(Grid2D::slab(2.0, 0.4, 2.0, 0.1).unwrap());
        let p = Perturbation::Fourier { seed, n_modes: modes, amplitude, cutoff: None };
        let a = perturbation_values(&p, &geometry, false).unwrap();
        let b = perturbation_values(&p, &geometry, false).unwrap();
        prop_assert_eq!(&a, &b);
        let sup = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(sup <= amplitude * (1.0 + 1e-9));
    }

    #[test]
    fn tables_round_trip(values in prop::collection::vec(-1e6..1e6f64, 9..40)) {
        let n = values.len() - 1;
        let geometry = Geometry::Interval(Grid1D::new(-1.0, 2.0, n).unwrap());
        let field = Field::new(geometry, values).unwrap();
        let meta = TableMeta::new("snapshot", 1, 0.0).with_extra("t", 1.5);
        let (m, f) = table_from_str(&table_to_string(&meta, &field).unwrap()).unwrap();
        prop_assert_eq!(f.values(), field.values());
        prop_assert_eq!(m.extra("t"), Some("1.5"));
    }
}

#[test]
fn affine_graphs_are_stationary() {
    let g = Grid1D::with_spacing(-1.0, 1.0, 0.05).unwrap();
    let u = Field::sample_interval(g, |x| 0.7 * x - 0.2).unwrap();
    let fixed = |v: f64| FaceCondition::Dirichlet { base: vec![v], speed: 0.0, source: DirichletSource::Translating };
    let policy = BoundaryPolicy::new(vec![
        (Face::Left, fixed(u.values()[0])),
        (Face::Right, fixed(*u.values().last().unwrap())),
    ]);
    let mut s = FlowState::new(0.0, u.clone(), policy).unwrap();
    let dt = cfl_dt(&u, 0.9);
    for _ in 0..100 {
        s = step(&s, dt).unwrap();
    }
    let drift = s.values().iter().zip(u.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-12, "drift {drift}");
}
