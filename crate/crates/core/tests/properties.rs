mod common;

use common::*;
use proptest::prelude::*;
use uqcut::bench::{summarize, BenchMethod, BenchRecord};
use uqcut::circuits::*;
use uqcut::optimize::*;
use uqcut::problem::*;
use uqcut::statevec::*;

fn gate(m: usize) -> impl Strategy<Value = Gate> {
    let q = 0..m;
    let pair = (0..m, 0..m).prop_filter("distinct", |(a, b)| a != b);
    let angle = -7.0..7.0f64;
    prop_oneof![
        q.clone().prop_map(Gate::X),
        q.clone().prop_map(Gate::Z),
        q.clone().prop_map(Gate::H),
        (q.clone(), angle.clone()).prop_map(|(target, theta)| Gate::Ry { target, theta }),
        (q.clone(), angle.clone()).prop_map(|(target, theta)| Gate::Rx { target, theta }),
        pair.clone().prop_map(|(control, target)| Gate::Cnot { control, target }),
        (pair, angle.clone()).prop_map(|((control, target), theta)| Gate::Cry { control, target, theta }),
        (Just(m), angle).prop_flat_map(|(m, gamma)| {
            (proptest::sample::subsequence((0..m).collect::<Vec<_>>(), 1..=m.min(3)), Just(gamma))
                .prop_flat_map(|(targets, gamma)| {
                    let len = 1usize << targets.len();
                    (Just(targets), Just(gamma), proptest::collection::vec(-3.0..3.0f64, len))
                })
                .prop_map(|(targets, gamma, phases)| Gate::DiagPhase { targets, gamma, phases })
        }),
    ]
}

fn circuit(max_m: usize, max_len: usize) -> impl Strategy<Value = Circuit> {
    (2..=max_m).prop_flat_map(move |m| {
        proptest::collection::vec(gate(m), 0..=max_len).prop_map(move |ops| {
            let mut c = Circuit::new(m);
            for g in ops {
                c.push(g).unwrap();
            }
            c
        })
    })
}

fn cnot_heavy(m: usize) -> impl Strategy<Value = Circuit> {
    let g = prop_oneof![
        3 => (0..m, 0..m)
            .prop_filter("distinct", |(a, b)| a != b)
            .prop_map(|(control, target)| Gate::Cnot { control, target }),
        1 => (0..m, -3.0..3.0f64).prop_map(|(target, theta)| Gate::Ry { target, theta }),
        1 => (0..m).prop_map(Gate::H),
    ];
    proptest::collection::vec(g, 0..40).prop_map(move |ops| {
        let mut c = Circuit::new(m);
        for g in ops {
            c.push(g).unwrap();
        }
        c
    })
}

fn instance(maxcut: bool) -> impl Strategy<Value = IsingInstance> {
    (2usize..=5, any::<u64>(), any::<bool>())
        .prop_map(move |(n, seed, signed)| random_instance(n, 0.5, 10.0, signed, maxcut, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(c in circuit(10, 200)) {
        let mut s = StateVector::zero(c.n_qubits()).unwrap();
        s.apply_circuit(&c).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn circuit_unitaries_are_unitary(c in circuit(5, 60)) {
        let u = circuit_unitary(&c).unwrap();
        prop_assert!(max_abs_diff(&(u.adjoint() * &u), &identity(u.nrows())) <= 1e-9);
    }

    #[test]
    fn phase_table_inverts(c in circuit(4, 10), gamma in -5.0..5.0f64, phases in proptest::collection::vec(-3.0..3.0f64, 4)) {
        let m = c.n_qubits();
        let mut s = StateVector::zero(m).unwrap();
        s.apply_circuit(&c).unwrap();
        let before = s.clone();
        let targets = vec![m - 1, 0];
        s.apply(&Gate::DiagPhase { targets: targets.clone(), gamma, phases: phases.clone() }).unwrap();
        s.apply(&Gate::DiagPhase { targets, gamma: -gamma, phases }).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn cnot_cancellation_preserves_unitary(c in cnot_heavy(4)) {
        let reduced = cancel_adjacent_cnots(&c);
        prop_assert!(reduced.len() <= c.len());
        let diff = max_abs_diff(&circuit_unitary(&c).unwrap(), &circuit_unitary(&reduced).unwrap());
        prop_assert!(diff <= 1e-12);
    }

    #[test]
    fn circuit_json_round_trips(c in circuit(6, 30)) {
        let back = Circuit::from_json(&c.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn maxcut_cost_is_complement_invariant(inst in instance(true), q in any::<usize>()) {
        let a = CutAssignment::from_index(q % (1 << inst.n()), inst.n());
        prop_assert_eq!(cut_cost(&inst, &a).unwrap(), cut_cost(&inst, &a.complement()).unwrap());
    }

    #[test]
    fn rescaled_diagonal_fits_sine_window(inst in instance(false)) {
        let s = rescale_k(&inst, DEFAULT_LAMBDA).unwrap();
        let d = hamiltonian_diagonal(&inst).unwrap();
        prop_assert!(d.iter().all(|e| (e / s.k_const()).abs() <= std::f64::consts::FRAC_PI_2 + 1e-12));
        prop_assert_eq!(order_agreement(&inst, DEFAULT_LAMBDA).unwrap(), 1.0);
    }

    #[test]
    fn ratio_is_monotone(inst in instance(false), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let report = brute_force(&inst).unwrap();
        prop_assume!(report.c_max > report.c_min);
        let e = |t: f64| report.c_min + t * (report.c_max - report.c_min);
        prop_assert!((report.approximation_ratio(report.c_min).unwrap().value - 1.0).abs() < 1e-12);
        prop_assert!(report.approximation_ratio(report.c_max).unwrap().value.abs() < 1e-12);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(report.approximation_ratio(e(lo)).unwrap().value >= report.approximation_ratio(e(hi)).unwrap().value);
    }

    #[test]
    fn ngd_step_is_scale_invariant(
        grad in proptest::collection::vec(-5.0..5.0f64, 1..6),
        scale in 1e-3..1e3f64,
        k in 0usize..50,
    ) {
        prop_assume!(grad.iter().map(|g| g * g).sum::<f64>().sqrt() > 1e-6);
        let dim = grad.len();
        let theta = vec![0.25; dim];
        let a = ngd_step(&theta, &grad, k, 50, dim).unwrap();
        let scaled: Vec<f64> = grad.iter().map(|g| g * scale).collect();
        let b = ngd_step(&theta, &scaled, k, 50, dim).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        let step = a.iter().zip(&theta).map(|(x, t)| (x - t).powi(2)).sum::<f64>().sqrt();
        prop_assert!((step - ngd_scale(k, 50, dim)).abs() <= 1e-12);
    }

    #[test]
    fn loss_is_bounded_and_recovers_energy(inst in instance(false), seed in any::<u64>()) {
        let s = rescale_k(&inst, DEFAULT_LAMBDA).unwrap();
        let thetas = random_angles(&mut rng(seed), inst.n());
        let l = loss(&s, &thetas, &OptimizerConfig::default()).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&l));
        let report = brute_force(&inst).unwrap();
        let e = s.k_const() * l.clamp(-1.0, 1.0).asin();
        prop_assert!(e >= report.c_min - 1e-9 && e <= report.c_max + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn summary_ignores_record_order(rs in proptest::collection::vec((0.0..1.0f64, 0u8..=1), 1..8), rot in 0usize..8) {
        let inst = IsingInstance::from_weights(2, &[], &[(1, 2, 1.0)]).unwrap();
        let solution = solve_uq(&inst, &OptimizerConfig { k_max: 1, ..Default::default() }).unwrap();
        let records: Vec<BenchRecord> = rs
            .iter()
            .enumerate()
            .map(|(k, &(r, i))| BenchRecord {
                n: 3,
                index: k,
                seed: k as u64,
                method: BenchMethod::UqMaxCut,
                r,
                r_clamped: false,
                i,
                iterations: 0,
                wall_ms: None,
                solution: solution.clone(),
            })
            .collect();
        let mut rotated = records.clone();
        let len = rotated.len();
        rotated.rotate_left(rot % len);
        rotated.reverse();
        prop_assert_eq!(summarize(&records).unwrap(), summarize(&rotated).unwrap());
    }
}
