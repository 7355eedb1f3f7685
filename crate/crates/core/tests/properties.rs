use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use std::sync::Arc;

use tmlab::analyze::{xi_mu_trajectory, xi_psi_trajectory, SampleGrid};
use tmlab::construct::{
    fiber_measure, idealized_block_simulation, joint_parameters, BlockBernoulliMeasure, PredicatePositions,
};
use tmlab::measure::{cylinder_log_bounds, cylinder_measure_estimate, EstimateConfig};
use tmlab::seqcore::{ratio_f64, AlternationCode, BinaryWord};
use tmlab::spectrum::{eta, joint_dim, SpectrumPoint};

fn interior() -> impl Strategy<Value = (f64, f64)> {
    (1e-3f64..0.999, 0.0f64..1.0).prop_map(|(b, t)| (b * t.max(1e-3) * 0.999, b))
}

fn small_code() -> impl Strategy<Value = AlternationCode> {
    prop::collection::vec(1u64..40, 2..30).prop_map(|b| AlternationCode::from_blocks(b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimate_inside_sandwich(bits in prop::collection::vec(0u8..2, 1..=12), depth in 6usize..12) {
        let w = BinaryWord::new(bits).unwrap();
        let e = cylinder_measure_estimate(&w, &EstimateConfig::new(depth)).unwrap();
        let b = cylinder_log_bounds(&w).unwrap();
        prop_assert!(b.contains(e.log_value), "{} not in {}", e.log_value, b);
    }

    #[test]
    fn f_decreases_in_alpha(b in 0.01f64..0.99, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let (a1, a2) = (b * s.min(t), b * s.max(t));
        let f1 = joint_dim(SpectrumPoint::new(a1, b).unwrap());
        let f2 = joint_dim(SpectrumPoint::new(a2, b).unwrap());
        prop_assert!(f2 <= f1 + 1e-14);
    }

    #[test]
    fn cycle_parameters_reproduce_f((a, b) in interior()) {
        let p = joint_parameters(a, b).unwrap();
        let f = joint_dim(SpectrumPoint::new(a, b).unwrap());
        prop_assert!((p.ell / (p.ell + p.m) - f).abs() < 1e-12);
    }

    #[test]
    fn idealized_ratio_is_f((a, b) in interior()) {
        let f = joint_dim(SpectrumPoint::new(a, b).unwrap());
        for c in idealized_block_simulation(a, b, 4).unwrap() {
            prop_assert!((c.ratio - f).abs() < 1e-12, "{} vs {f}", c.ratio);
        }
    }

    #[test]
    fn eta_positive_inside((a, b) in interior()) {
        let e = eta(SpectrumPoint::new(a, b).unwrap()).unwrap();
        prop_assert!(e.is_finite() && e > 0.0);
    }

    #[test]
    fn fiber_masses_split(bits in prop::collection::vec(0u8..2, 0..60), period in 2u64..6) {
        let nu = fiber_measure(Arc::new(PredicatePositions::new(move |n| (n % period == 0).then_some(1))));
        let parent = nu.mass_exact(&bits);
        let mut ext = bits.clone();
        ext.push(0);
        let zero = nu.mass_exact(&ext);
        *ext.last_mut().unwrap() = 1;
        prop_assert_eq!(parent, zero + nu.mass_exact(&ext));
    }

    #[test]
    fn bernoulli_is_a_probability(m in 2u32..6, len in 1usize..12) {
        let nu = BlockBernoulliMeasure::with_default_weight(m).unwrap();
        let total = BinaryWord::all_of_length(len)
            .map(|w| nu.nu_measure_exact(w.bits()))
            .fold(BigRational::from_integer(0.into()), |a, b| a + b);
        prop_assert!(total.is_one());
    }

    #[test]
    fn xi_at_block_ends_equals_f(code in small_code()) {
        let n = code.total_length();
        let mu = xi_mu_trajectory(&code, n, SampleGrid::default()).unwrap();
        let psi = xi_psi_trajectory(&code, n, SampleGrid::default()).unwrap();
        for m in 1..=code.len() {
            let f = ratio_f64(code.f_at(m), code.n_at(m) * code.n_at(m));
            let at = code.n_at(m);
            prop_assert!((mu.at(at).unwrap() - f).abs() < 1e-15);
            prop_assert!((psi.at(at).unwrap() - f).abs() < 1e-15);
        }
    }

    #[test]
    fn xi_within_block_envelopes(code in small_code()) {
        let n_max = code.total_length();
        let mu = xi_mu_trajectory(&code, n_max, SampleGrid::default()).unwrap();
        let psi = xi_psi_trajectory(&code, n_max, SampleGrid::default()).unwrap();
        for m in 1..code.len() {
            // mu on [N_m, N_{m+1}] uses F_m; psi on [N_{m-1}, N_m] uses F_m.
            let f = ratio_f64(code.f_at(m), code.n_at(m) * code.n_at(m));
            for n in code.n_at(m)..=code.n_at(m + 1) {
                prop_assert!(mu.at(n).unwrap() >= f / (1.0 + f) - 1e-12);
            }
            for n in code.n_at(m - 1).max(1)..=code.n_at(m) {
                if f < 1.0 {
                    prop_assert!(psi.at(n).unwrap() <= f / (1.0 - f) + 1e-12);
                }
            }
        }
    }
}
