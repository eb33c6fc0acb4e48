//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime and asserting the stated tolerances and budgets.

mod common;

use std::time::{Duration, Instant};

use common::*;
use ico_netsim::efficiency::{
    crossover_distance, enhancement, eta_ours, eta_prior, sweep, EfficiencyParams,
};
use ico_netsim::entanglement::{classify, concurrence, reduce};
use ico_netsim::graphstate::{
    build_graph_state, build_ico_graph_state, correction_identity_residual, Graph, IcoSign,
};
use ico_netsim::optical::verify_against_abstract;
use ico_netsim::protocol::{
    branch_states, expected_three_party, expected_two_party, run, verify_table1, verify_table2,
    ProtocolConfig,
};
use ico_netsim::qcore::{
    apply, measure_controls, switch_unitary, BasisKind, Parity, StateVector, Unitary,
};
use ico_netsim::StateClass;
use rand::Rng;

const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;
const PI: f64 = std::f64::consts::PI;
const TAU: f64 = std::f64::consts::TAU;

fn finish(name: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("PASS {name} ({elapsed:?}, budget {budget:?})");
    assert!(
        elapsed < budget,
        "{name} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

#[test]
fn criterion_1_table1_reproduction() {
    let start = Instant::now();
    let reports = verify_table1().unwrap();
    assert!(reports.len() >= 5 * 4 * 2 + 5 * 5 * 2);
    for r in &reports {
        assert!(r.pass, "table 1 cell failed: {r:?}");
        if let Some(f) = r.strict_fidelity {
            assert!(f >= 1.0 - 1e-9);
        }
    }
    finish("criterion 1: table 1 reproduction", start, Duration::from_secs(1));
}

#[test]
fn criterion_2_table2_reproduction() {
    let start = Instant::now();
    let reports = verify_table2().unwrap();
    assert!(reports.len() >= 4 * 2 + 5 * 5 * 2);
    for r in &reports {
        assert!(r.pass, "table 2 cell failed: {r:?}");
    }
    finish("criterion 2: table 2 reproduction", start, Duration::from_secs(1));
}

#[test]
fn criterion_3_closed_form_agreement() {
    let start = Instant::now();
    let mut rng = rng(301);
    for n in [2usize, 3] {
        for _ in 0..1000 {
            let theta = rng.random_range(0.0..TAU);
            let alphas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let cfg = ProtocolConfig::standard(n, theta, alphas.clone()).unwrap();
            let records = run(&cfg).unwrap();
            let cf = if n == 2 {
                expected_two_party(theta, alphas[0], alphas[1]).unwrap()
            } else {
                expected_three_party(theta, alphas[0], alphas[1], alphas[2]).unwrap()
            };
            let mut even_prob = 0.0;
            let mut odd_prob = 0.0;
            for r in &records {
                let (expected, total) = match r.parity {
                    Parity::Even => (&cf.even, &mut even_prob),
                    Parity::Odd => (&cf.odd, &mut odd_prob),
                };
                *total += r.probability;
                match (expected, &r.collapsed) {
                    (Some(e), Some(a)) => {
                        assert!(
                            e.fidelity(a).unwrap() >= 1.0 - 1e-9,
                            "state mismatch at n={n}, theta={theta}"
                        );
                    }
                    (None, None) => {}
                    _ => panic!("null-branch mismatch at n={n}, theta={theta}"),
                }
            }
            // The branch weights follow the closed-form norms exactly:
            // p = ‖printed branch expression‖²/2.
            assert!((even_prob - cf.even_norm.powi(2) / 2.0).abs() <= 1e-12);
            assert!((odd_prob - cf.odd_norm.powi(2) / 2.0).abs() <= 1e-12);
            assert!((even_prob + odd_prob - 1.0).abs() <= 1e-12);
        }
        // The branch split is exactly 1/2 / 1/2 at the odd quarter angles
        // (where the two gate orders interfere with zero overlap); the null
        // angles put all weight on a single branch.
        for k in [1.0, 3.0, 5.0, 7.0] {
            let theta = k * FRAC_PI_4;
            for _ in 0..10 {
                let alphas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let b = branch_states(&ProtocolConfig::standard(n, theta, alphas).unwrap()).unwrap();
                assert!((b.even_prob - 0.5).abs() <= 1e-12);
                assert!((b.odd_prob - 0.5).abs() <= 1e-12);
            }
        }
        for (k, null_parity) in [
            (0.0, Parity::Odd),
            (2.0, if n % 2 == 0 { Parity::Odd } else { Parity::Even }),
            (4.0, Parity::Odd),
            (6.0, if n % 2 == 0 { Parity::Odd } else { Parity::Even }),
            (8.0, Parity::Odd),
        ] {
            let theta = k * FRAC_PI_4;
            let alphas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let b = branch_states(&ProtocolConfig::standard(n, theta, alphas).unwrap()).unwrap();
            let (null_prob, null_state) = match null_parity {
                Parity::Even => (b.even_prob, b.even.is_none()),
                Parity::Odd => (b.odd_prob, b.odd.is_none()),
            };
            assert!(null_prob < 1e-14);
            assert!(null_state);
        }
    }
    println!(
        "note: branch weights follow (1 ± Re(phase)·cos^N(2θ))/2, which is \
         1/2 / 1/2 exactly at θ = (2n-1)π/4 and single-branch at the null angles"
    );
    finish(
        "criterion 3: closed-form agreement (1000 configs at N=2 and N=3)",
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_4_case_v_amplitudes() {
    let start = Instant::now();
    let cf = expected_two_party(FRAC_PI_4, 0.5, 1.0 / 3.0).unwrap();
    let p = (1.0 + std::f64::consts::SQRT_2) / (2.0 * 3.0f64.sqrt());
    let m = (1.0 - std::f64::consts::SQRT_2) / (2.0 * 3.0f64.sqrt());
    let even = cf.even.unwrap();
    let odd = cf.odd.unwrap();
    for (amp, expected) in even.amplitudes().iter().zip([p, m, -m, p]) {
        assert!((amp.re - expected).abs() <= 1e-12);
        assert!(amp.im.abs() <= 1e-15);
    }
    for (amp, expected) in odd.amplitudes().iter().zip([p, m, m, -p]) {
        assert!((amp.re - expected).abs() <= 1e-12);
    }
    // engine route reproduces the same amplitudes
    let b = branch_states(&ProtocolConfig::standard(2, FRAC_PI_4, vec![0.5, 1.0 / 3.0]).unwrap())
        .unwrap();
    assert!((b.even.unwrap().signed_fidelity(&even).unwrap() - 1.0).abs() <= 1e-12);
    assert!((b.odd.unwrap().signed_fidelity(&odd).unwrap() - 1.0).abs() <= 1e-12);

    let c_even = concurrence(&even).unwrap();
    let c_odd = concurrence(&odd).unwrap();
    println!(
        "criterion 4 note: computed spin-flip concurrence even={c_even:.12}, odd={c_odd:.12}; \
         the tabulated label for this point is PES — logged as a discrepancy, not enforced"
    );
    assert!((c_even - 1.0).abs() <= 1e-12);
    assert!((c_odd - 1.0).abs() <= 1e-12);
    finish("criterion 4: closed-form amplitudes at (π/4, 1/2, 1/3)", start, Duration::from_secs(1));
}

#[test]
fn criterion_5_optical_equivalence() {
    let start = Instant::now();
    let lambdas = [0.0, 15.0, 22.5, 30.0, 45.0];
    let mut worst_infidelity: f64 = 0.0;
    let mut worst_tvd: f64 = 0.0;
    for k in 0..=16 {
        let theta = k as f64 * PI / 8.0;
        for l1 in lambdas {
            for l2 in lambdas {
                let report = verify_against_abstract(theta, l1, l2, 1e-9).unwrap();
                worst_infidelity = worst_infidelity.max(report.max_infidelity);
                worst_tvd = worst_tvd.max(report.total_variation_distance);
                assert!(
                    report.max_infidelity <= 1e-9,
                    "infidelity {} at theta={theta}, l1={l1}, l2={l2}",
                    report.max_infidelity
                );
                assert!(report.total_variation_distance <= 1e-10);
            }
        }
    }
    println!("criterion 5 note: worst infidelity {worst_infidelity:.3e}, worst TVD {worst_tvd:.3e}");
    finish(
        "criterion 5: optical equivalence over 17x5x5 grid",
        start,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_6_efficiency_regression() {
    let start = Instant::now();
    let at = |n: usize, l_km: f64| EfficiencyParams {
        n,
        l_km,
        ..Default::default()
    };
    // printed percentages, rounded to the printed number of decimals
    let pct_cases: [(f64, f64, u32); 11] = [
        (eta_prior(&at(2, 11.0)).unwrap(), 53.66, 2),
        (eta_ours(&at(2, 11.0)).unwrap(), 55.90, 2),
        (eta_prior(&at(2, 66.0)).unwrap(), 4.40, 2),
        (eta_ours(&at(2, 66.0)).unwrap(), 4.59, 2),
        (eta_prior(&at(3, 11.0)).unwrap(), 31.25, 2),
        (eta_ours(&at(3, 11.0)).unwrap(), 37.21, 2),
        (eta_prior(&at(3, 66.0)).unwrap(), 0.21, 2),
        (eta_ours(&at(3, 66.0)).unwrap(), 0.49, 2),
        (eta_prior(&at(4, 11.0)).unwrap(), 18.19, 2),
        (eta_ours(&at(4, 11.0)).unwrap(), 20.65, 2),
        (eta_ours(&at(4, 66.0)).unwrap(), 0.0175, 4),
    ];
    for (value, printed, decimals) in pct_cases {
        let scale = 10f64.powi(decimals as i32);
        let rounded = (value * 100.0 * scale).round() / scale;
        assert!(
            (rounded - printed).abs() < 1e-9,
            "percentage {rounded} != printed {printed}"
        );
    }
    // enhancements at the printed rounding
    let e2 = enhancement(&at(2, 11.0)).unwrap();
    assert!((e2 - 1.042).abs() <= 5e-4);
    for l in [0.0, 1.0, 11.0, 66.0, 250.0] {
        assert!((enhancement(&at(2, l)).unwrap() - e2).abs() <= 1e-12);
    }
    assert!((enhancement(&at(3, 11.0)).unwrap() - 1.191).abs() <= 5e-4);
    assert!((enhancement(&at(4, 11.0)).unwrap() - 1.135).abs() <= 5e-4);
    // crossover distances
    let base = EfficiencyParams::default();
    for (n, expected) in [(5usize, 3.546), (6, 0.898), (7, 0.435)] {
        let got = crossover_distance(n, &base).unwrap().unwrap();
        assert!((got - expected).abs() <= 1e-3, "N={n}: {got}");
    }
    for n in 2..=4 {
        assert!(crossover_distance(n, &base).unwrap().is_none());
    }
    // ratio identity over the full sweep grid
    let l_grid: Vec<f64> = (0..=66).map(f64::from).collect();
    for row in sweep(&[2, 3, 4, 5, 6, 7], &l_grid, &base).unwrap() {
        let p = EfficiencyParams {
            n: row.n,
            l_km: row.l_km,
            ..base
        };
        let ratio = eta_ours(&p).unwrap() / eta_prior(&p).unwrap();
        assert!((row.enhancement - ratio).abs() <= 1e-12 * ratio.max(1.0));
    }
    // The two reference ratios at L = 66: one reproduces as the ratio of the
    // rounded percentages, the other lies between that reading and the exact
    // closed form — recorded, not forced.
    let exact3 = enhancement(&at(3, 66.0)).unwrap();
    let rounded_ratio3 = (0.49f64 / 0.21 * 1000.0).round() / 1000.0;
    assert!((rounded_ratio3 - 2.333).abs() < 1e-9);
    println!(
        "criterion 6 note: reference ratio 2.333 = 0.49/0.21 from rounded percentages \
         (exact closed form {exact3:.4})"
    );
    let exact4 = enhancement(&at(4, 66.0)).unwrap();
    let rounded_ratio4 = 0.0175 / 0.01;
    assert!(
        exact4 <= 1.748 && 1.748 <= rounded_ratio4,
        "reference 1.748 not bracketed by exact {exact4:.4} and rounded ratio {rounded_ratio4:.4}"
    );
    println!(
        "criterion 6 note: reference ratio 1.748 lies between the exact closed form \
         ({exact4:.4}) and the rounded-percentage ratio ({rounded_ratio4:.4}) — rounding artifact"
    );
    finish("criterion 6: efficiency regression", start, Duration::from_secs(1));
}

/// DFS over all edge subsets with at most `max_edges` edges, carrying the
/// plain construction and both corrected order-superposed constructions.
fn check_all_graphs(
    all_edges: &[(usize, usize)],
    idx: usize,
    used: usize,
    max_edges: usize,
    states: &(StateVector, StateVector, StateVector),
    checked: &mut usize,
) {
    if idx == all_edges.len() {
        return;
    }
    // skip edge idx
    check_all_graphs(all_edges, idx + 1, used, max_edges, states, checked);
    if used == max_edges {
        return;
    }
    // take edge idx
    let (i, j) = all_edges[idx];
    let cz_gate = ico_netsim::graphstate::cz();
    let (cz_state, plus_state, minus_state) = states;
    let next_cz = apply(cz_state, &cz_gate, &[i, j]).unwrap();
    let mut next = Vec::with_capacity(2);
    for (sign, state) in [(IcoSign::Plus, plus_state), (IcoSign::Minus, minus_state)] {
        let ico = ico_netsim::graphstate::ico_pm(sign).unwrap();
        let (phase, sigma) = ico_netsim::graphstate::correction(sign);
        let pair = sigma.kron(&sigma).unwrap();
        let s = apply(state, &ico, &[i, j]).unwrap();
        let s = apply(&s, &pair, &[i, j]).unwrap();
        let s = s.with_global_phase(phase).unwrap();
        assert!(
            next_cz.fidelity(&s).unwrap() >= 1.0 - 1e-12,
            "corrected construction diverged at edge set ending with ({i},{j})"
        );
        next.push(s);
    }
    *checked += 1;
    let states = (next_cz, next.remove(0), next.remove(0));
    check_all_graphs(all_edges, idx + 1, used + 1, max_edges, &states, checked);
}

fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn recurse(unmatched: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if unmatched.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = unmatched[0];
        for k in 1..unmatched.len() {
            let partner = unmatched[k];
            let rest: Vec<usize> = unmatched[1..]
                .iter()
                .copied()
                .filter(|&v| v != partner)
                .collect();
            acc.push((first, partner));
            recurse(&rest, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    recurse(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_7_graph_state_identities() {
    let start = Instant::now();
    // exact operator identities for both sign branches
    for sign in [IcoSign::Plus, IcoSign::Minus] {
        let residual = correction_identity_residual(sign).unwrap();
        assert!(residual <= 1e-12, "identity residual {residual:.3e}");
    }

    // interleaved corrections reproduce the plain graph state for every
    // graph on up to 6 vertices with up to 8 edges
    let mut total_graphs = 0usize;
    for n in 2..=6usize {
        let mut all_edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                all_edges.push((i, j));
            }
        }
        let plus = StateVector::plus_state(n).unwrap();
        let states = (plus.clone(), plus.clone(), plus);
        check_all_graphs(&all_edges, 0, 0, 8, &states, &mut total_graphs);
    }
    assert!(total_graphs >= 22_819, "only {total_graphs} graphs checked");

    // raw mode on all perfect matchings up to 6 vertices: every bipartition
    // spectrum matches the plain construction
    let mut matchings_checked = 0usize;
    for n in [2usize, 4, 6] {
        for matching in perfect_matchings(n) {
            let g = Graph::new(n, &matching).unwrap();
            assert!(g.is_matching());
            let reference = build_graph_state(&g).unwrap();
            for sign in [IcoSign::Plus, IcoSign::Minus] {
                let raw = build_ico_graph_state(&g, sign, false).unwrap();
                for subset_mask in 1usize..(1 << n) {
                    let keep: Vec<usize> = (0..n).filter(|q| subset_mask >> q & 1 == 1).collect();
                    if keep.len() > n / 2 {
                        continue;
                    }
                    let a = reduce(&raw, &keep).unwrap().eigenvalues();
                    let b = reduce(&reference, &keep).unwrap().eigenvalues();
                    for (x, y) in a.iter().zip(&b) {
                        assert!(
                            (x - y).abs() <= 1e-10,
                            "spectrum mismatch on {matching:?} keep {keep:?}"
                        );
                    }
                }
            }
            matchings_checked += 1;
        }
    }
    assert_eq!(matchings_checked, 1 + 3 + 15);
    println!(
        "criterion 7 note: {total_graphs} graphs checked exhaustively, \
         {matchings_checked} perfect matchings in raw mode"
    );
    finish("criterion 7: graph-state identities", start, Duration::from_secs(30));
}

#[test]
fn criterion_8_property_suites() {
    let start = Instant::now();
    let mut rng = rng(801);

    // unitarity of constructors and compositions
    for _ in 0..100 {
        let angle = rng.random_range(-8.0..8.0);
        assert!(Unitary::ry(angle).max_unitarity_deviation() <= 1e-12);
        assert!(Unitary::rz(angle).max_unitarity_deviation() <= 1e-12);
        let sw = switch_unitary(&random_unitary2(&mut rng), &random_unitary2(&mut rng)).unwrap();
        assert!(sw.max_unitarity_deviation() <= 1e-12);
    }

    // norm preservation under random gate placements
    for _ in 0..100 {
        let n = rng.random_range(2..=5usize);
        let state = random_state(&mut rng, n);
        let target = rng.random_range(0..n);
        let out = apply(&state, &random_unitary2(&mut rng), &[target]).unwrap();
        assert!((out.norm() - 1.0).abs() <= 1e-12);
    }

    // probability completeness across bases and control subsets
    for _ in 0..100 {
        let n = rng.random_range(2..=5usize);
        let state = random_state(&mut rng, n);
        let m = rng.random_range(1..n);
        let controls: Vec<usize> = (0..m).collect();
        for basis in [BasisKind::Computational, BasisKind::PlusMinus] {
            let total: f64 = measure_controls(&state, &controls, basis)
                .unwrap()
                .iter()
                .map(|r| r.probability)
                .sum();
            assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    // parity degeneracy of protocol outcomes
    for _ in 0..100 {
        let n = rng.random_range(2..=4usize);
        let theta = rng.random_range(0.0..TAU);
        let alphas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let records = run(&ProtocolConfig::standard(n, theta, alphas).unwrap()).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let states: Vec<&StateVector> = records
                .iter()
                .filter(|r| r.parity == parity)
                .filter_map(|r| r.collapsed.as_ref())
                .collect();
            for pair in states.windows(2) {
                assert!(pair[0].fidelity(pair[1]).unwrap() >= 1.0 - 1e-12);
            }
        }
    }

    // local-unitary invariance of the entanglement witnesses
    for _ in 0..100 {
        let state = random_state(&mut rng, 2);
        let c0 = concurrence(&state).unwrap();
        let mut rotated = state.clone();
        for q in 0..2 {
            rotated = apply(&rotated, &random_unitary2(&mut rng), &[q]).unwrap();
        }
        assert!((concurrence(&rotated).unwrap() - c0).abs() <= 1e-10);
        let spec0 = reduce(&state, &[0]).unwrap().eigenvalues();
        let spec1 = reduce(&rotated, &[0]).unwrap().eigenvalues();
        for (x, y) in spec0.iter().zip(&spec1) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    // separable constructions classify as SS
    for _ in 0..100 {
        let n = rng.random_range(2..=4usize);
        let product = random_product_state(&mut rng, n);
        assert_eq!(classify(Some(&product)).unwrap().class, StateClass::Ss);
    }

    finish(
        "criterion 8: randomized property suites (6 x 100 instances, fixed seeds)",
        start,
        Duration::from_secs(30),
    );
}
