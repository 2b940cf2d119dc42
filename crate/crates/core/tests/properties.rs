use cavity_sim::bogoliubov::{unwrap_near, wrap_angle, CMatrix};
use cavity_sim::robin::{delta_l_eff, flux_for_length, ModeBasis};
use cavity_sim::scenario::ScenarioConfig;
use cavity_sim::{BogoliubovTransform, PhysicalConstants, TrajectoryPlan};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn distance(a: &BogoliubovTransform, b: &BogoliubovTransform) -> f64 {
    max_abs(&(a.alpha() - b.alpha())).max(max_abs(&(a.beta() - b.beta())))
}

/// Exact transform from a Hermitian H and symmetric K built out of `raw`.
fn transform(n: usize, raw: &[f64]) -> BogoliubovTransform {
    let mut it = raw.iter().copied().cycle();
    let mut next = || it.next().unwrap();
    let mut h = CMatrix::zeros(n, n);
    let mut k = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let hz = Complex64::new(next(), if i == j { 0.0 } else { next() });
            h[(i, j)] = hz;
            h[(j, i)] = hz.conj();
            let kz = Complex64::new(next(), next());
            k[(i, j)] = kz;
            k[(j, i)] = kz;
        }
    }
    BogoliubovTransform::from_generator(&h, &k).unwrap()
}

fn generator() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.4..0.4f64, 64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_transforms_satisfy_the_identities(raw in generator(), n in 1usize..7) {
        let t = transform(n, &raw);
        prop_assert!(t.full_defects().max() < 1e-12, "{:?}", t.full_defects());
    }

    #[test]
    fn composition_is_associative(a in generator(), b in generator(), c in generator()) {
        let (x, y, z) = (transform(5, &a), transform(5, &b), transform(5, &c));
        let left = x.compose(&y).unwrap().compose(&z).unwrap();
        let right = x.compose(&y.compose(&z).unwrap()).unwrap();
        prop_assert!(distance(&left, &right) < 1e-12);
        prop_assert!(left.full_defects().max() < 1e-11);
    }

    #[test]
    fn inverse_undoes_the_transform(raw in generator()) {
        let t = transform(6, &raw);
        let id = BogoliubovTransform::identity(6);
        prop_assert!(distance(&t.compose(&t.inverse().unwrap()).unwrap(), &id) < 1e-12);
        prop_assert!(distance(&t.inverse().unwrap().compose(&t).unwrap(), &id) < 1e-12);
    }

    #[test]
    fn power_matches_repeated_composition(raw in generator(), count in 0u64..9) {
        let t = transform(4, &raw);
        let mut slow = BogoliubovTransform::identity(4);
        for _ in 0..count {
            slow = slow.compose(&t).unwrap();
        }
        prop_assert!(distance(&t.power(count), &slow) < 1e-11);
    }

    #[test]
    fn wrapped_angles_stay_on_the_branch(x in -1e3..1e3f64, r in -50.0..50.0f64) {
        let w = wrap_angle(x);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((x - w) / (2.0 * PI)).fract().abs() < 1e-9 || ((x - w) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9);
        prop_assert!((unwrap_near(x, r) - r).abs() <= PI + 1e-9);
    }

    #[test]
    fn flux_inverts_the_effective_length(frac in 0.01..0.49f64) {
        let k = PhysicalConstants::default();
        let flux = frac * k.phi0;
        let dl = delta_l_eff(flux, &k).unwrap();
        prop_assert!(dl >= delta_l_eff(0.0, &k).unwrap());
        let back = flux_for_length(dl, &k).unwrap();
        prop_assert!((back - flux).abs() < 1e-12 * k.phi0);
    }

    #[test]
    fn robin_wavenumbers_are_ordered_and_below_dirichlet(d_l in 0.0..0.05f64, d_r in 0.0..0.05f64) {
        let b = ModeBasis::solve(1.0, d_l, d_r, 12).unwrap();
        for n in 0..12 {
            prop_assert!(b.k[n] <= PI * (n + 1) as f64 + 1e-12);
            prop_assert!(b.k[n] > PI * n as f64);
        }
    }

    #[test]
    fn trip_timing_is_consistent(h in 1e-4..1.9f64, t_a in 1e-11..1e-8f64, l in 1e-3..0.2f64) {
        let plan = TrajectoryPlan::from_h(h, t_a, l, 1.19e8).unwrap();
        prop_assert!((plan.total_time() - 4.0 * t_a).abs() <= 1e-15 * t_a);
        prop_assert!((plan.h() / h - 1.0).abs() < 1e-12);
        let deficit = plan.time_dilation_deficit();
        prop_assert!(deficit > 0.0 && deficit < 4.0 * t_a);
        prop_assert!((plan.proper_time_round_trip() + deficit - 4.0 * t_a).abs() < 1e-12 * t_a);
        let (x0, _) = plan.mirror_displacements(0.0).unwrap();
        let (x1, _) = plan.mirror_displacements(plan.total_time()).unwrap();
        prop_assert!(x0.abs() < 1e-15 && x1.abs() < 1e-9 * l);
    }
}

#[test]
fn configs_survive_a_toml_round_trip() {
    for id in cavity_sim::scenario::preset_names() {
        for cfg in cavity_sim::scenario::preset(id).unwrap() {
            let text = cfg.to_toml_string().unwrap();
            let back = ScenarioConfig::from_toml_str(&text).unwrap();
            assert_eq!(back.to_toml_string().unwrap(), text, "{id}");
        }
    }
}
