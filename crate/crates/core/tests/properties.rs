use pdqp::adversary::{
    build_relation, closed_form_degrees, load_profile, validate_weight_scheme, verify_polynomial_inequality,
    Construction, WeightScheme,
};
use pdqp::algorithms::{build_algorithm, Model};
use pdqp::bench::verify::random_monotone_case;
use pdqp::bench::{loglog_fit, trial_rng, wilson_interval, WILSON_Z};
use pdqp::engine::{check_fidelity_monotone, empirical, exact_distribution, run_direct, total_variation};
use pdqp::problems::{evaluate, generate_instance, InstanceParams, ProblemKind};
use pdqp::state::{density_fidelity, random, Gate, GateOp, Register, Target};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = ProblemKind> {
    prop::sample::select(ProblemKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(seed in any::<u64>(), qubits in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let regs = vec![Register::new("a", 1), Register::new("b", qubits)];
        let mut s = random::random_state(regs, &mut rng);
        for _ in 0..3 {
            let u = random::haar_unitary(1 << (qubits + 1), &mut rng);
            let op = GateOp::new(Gate::unitary(u).unwrap(), vec![Target::reg("b"), Target::reg("a")]);
            s = s.apply(&op).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_probability_is_born_weight(seed in any::<u64>(), value in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random::random_state(vec![Register::new("a", 2), Register::new("b", 1)], &mut rng);
        let born = s.born_distribution("a").unwrap();
        prop_assert!((born.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let (post, p) = s.project("a", value).unwrap();
        prop_assert!((p - born[value]).abs() < 1e-10);
        prop_assert!((post.norm() - 1.0).abs() < 1e-10);
        prop_assert!((post.born_distribution("a").unwrap()[value] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn generated_answers_match_brute_force(k in kind(), exp in 2u32..6, seed in any::<u64>()) {
        let n = 1usize << exp;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = generate_instance(k, n, &InstanceParams::default(), &mut rng).unwrap();
        prop_assert_eq!(inst.answer, evaluate(k, &inst.table).unwrap());
        prop_assert_eq!(inst.table.len(), n);
    }

    #[test]
    fn steps_account_for_queries_and_samples(k in kind(), model in prop::sample::select(Model::ALL.to_vec()), seed in any::<u64>()) {
        let n = 16;
        let algo = build_algorithm(k, model, n, None, None).unwrap();
        let mut rng = trial_rng(seed, 0);
        let inst = generate_instance(k, n, &InstanceParams::default(), &mut rng).unwrap();
        let t = match model {
            Model::Cbqp => pdqp::engine::run_cbqp(&algo.circuit, &inst, &mut rng).unwrap(),
            _ => run_direct(&algo.circuit, &inst, &mut rng).unwrap(),
        };
        prop_assert_eq!(t.steps, algo.circuit.steps.len());
        prop_assert_eq!(algo.circuit.counted(), (algo.q, algo.p));
        if model != Model::Cbqp {
            prop_assert_eq!(t.queries_used, algo.q);
            prop_assert_eq!(t.samples_used, algo.p);
        }
    }

    #[test]
    fn scaled_schemes_are_valid(seed in any::<u64>()) {
        use rand::Rng;
        let r = build_relation(ProblemKind::Majority, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..r.pairs.len()).map(|_| rng.random_range(0.1..5.0)).collect();
        let boost: Vec<f64> = (0..r.pairs.len()).map(|_| rng.random_range(1.0..3.0)).collect();
        let s = WeightScheme::from_fn(&r, |k| w[k], |k, _| (w[k] * boost[k], w[k]));
        prop_assert!(validate_weight_scheme(&s, &r).is_empty());
        let p = load_profile(&r, &s);
        prop_assert!(p.v_max > 0.0);
        prop_assert!((p.wt_x.iter().sum::<f64>() - p.total_weight).abs() < 1e-9);
        prop_assert!((p.wt_y.iter().sum::<f64>() - p.total_weight).abs() < 1e-9);
    }

    #[test]
    fn wilson_interval_is_sane(trials in 1usize..5000, frac in 0.0f64..=1.0) {
        let s = ((trials as f64) * frac).floor() as usize;
        let (lo, hi) = wilson_interval(s, trials, WILSON_Z);
        let p = s as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        let (lo4, hi4) = wilson_interval(4 * s, 4 * trials, WILSON_Z);
        prop_assert!(hi4 - lo4 <= hi - lo + 1e-12);
    }

    #[test]
    fn fit_recovers_power_laws(a in 0.1f64..10.0, b in -1.0f64..2.0, xs in prop::collection::btree_set(2u32..500, 3..8)) {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x as f64, a * (x as f64).powf(b))).collect();
        let fit = loglog_fit(&pts).unwrap();
        prop_assert!((fit.exponent - b).abs() < 1e-9);
        prop_assert!(fit.residual < 1e-9);
    }

    #[test]
    fn polynomial_inequality_on_grid(k in 1u32..65, r in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let rep = verify_polynomial_inequality(&[(k, r, 2.0 * r * t)]);
        prop_assert!(rep.holds());
    }

    #[test]
    fn m_star_never_lowers_fidelity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = random_monotone_case(&mut rng).unwrap();
        let (before, after) = check_fidelity_monotone(&[case]).unwrap()[0];
        prop_assert!(after >= before - 1e-9);
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&before));
    }

    #[test]
    fn fidelity_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let regs = vec![Register::new("a", 1), Register::new("b", 1)];
        let x = random::random_state(regs.clone(), &mut rng).reduced_density(&["a"]).unwrap();
        let y = random::random_state(regs, &mut rng).reduced_density(&["a"]).unwrap();
        let f = density_fidelity(&x, &y).unwrap();
        prop_assert!((f - density_fidelity(&y, &x).unwrap()).abs() < 1e-9);
        prop_assert!((density_fidelity(&x, &x).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_converges_to_exact(seed in any::<u64>()) {
        let algo = build_algorithm(ProblemKind::Collision, Model::Pdqp, 4, None, Some(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = generate_instance(ProblemKind::Collision, 4, &InstanceParams::default(), &mut rng).unwrap();
        let exact = exact_distribution(&algo.circuit, &inst, 10_000).unwrap();
        prop_assert!((exact.values().sum::<f64>() - 1.0).abs() < 1e-9);
        let emp = empirical((0..4000).map(|_| run_direct(&algo.circuit, &inst, &mut rng).unwrap().key()));
        let tv = total_variation(&exact, &emp);
        prop_assert!(tv < 0.08, "tv {}", tv);
        prop_assert!((total_variation(&emp, &exact) - tv).abs() < 1e-12);
        prop_assert_eq!(total_variation(&exact, &exact), 0.0);
    }
}

#[test]
fn closed_forms_match_enumeration() {
    for kind in [ProblemKind::Search, ProblemKind::Majority, ProblemKind::Parity] {
        for n in [4, 8] {
            let r = build_relation(kind, n).unwrap();
            assert_eq!(r.degrees, closed_form_degrees(kind, n, Construction::Canonical).unwrap(), "{kind} {n}");
            for k in 0..r.pairs.len() {
                assert!(!r.differing(k).is_empty());
            }
        }
    }
}
