use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmfmc::classical::{edge_disjoint_paths, integral_max_flow, max_flow, DirectedCapacityGraph};
use qmfmc::generate::{random_cut, random_flow, random_network, NetworkShape};
use qmfmc::tensor::{estimate_qmf_tilde, TensorAssignment, TensorConfig};
use qmfmc::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn min_cut_cardinality(net: &Network) -> usize {
    enumerate_cuts(net).unwrap().map(|c| c.cardinality()).min().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classical_duality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=8usize);
        let mut g = DirectedCapacityGraph::new(n, 0, n - 1);
        for _ in 0..r.gen_range(0..=14) {
            let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
            if u != v {
                g.add_arc(u, v, GroupValue::count_only(r.gen_range(1..=9)));
            }
        }
        let flow = max_flow(&g);
        prop_assert!(flow.is_feasible(&g));
        let best = (0u32..1 << (n - 2))
            .map(|mask| {
                let side: Vec<bool> = (0..n).map(|v| v == 0 || (v + 1 < n && mask >> (v - 1) & 1 == 1)).collect();
                g.cut_capacity(&side)
            })
            .min()
            .unwrap();
        prop_assert_eq!(flow.value, best);
    }

    #[test]
    fn network_json_round_trip(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), &NetworkShape::new(7, 12, 50));
        prop_assert_eq!(Network::from_json(&net.to_json()).unwrap(), net);
    }

    #[test]
    fn scaling_composes(seed in any::<u64>(), a in 1u64..40, b in 1u64..40) {
        let net = random_network(&mut rng(seed), &NetworkShape::new(5, 8, 9));
        prop_assert_eq!(net.scale_by(a).unwrap().scale_by(b).unwrap(), net.scale_by(a * b).unwrap());
    }

    #[test]
    fn qmc_matches_enumeration(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), &NetworkShape { max_vertices: 10, max_edges: 16, min_capacity: 1, max_capacity: 12 });
        prop_assert_eq!(quantum_min_cut(&net).value, brute_force_qmc(&net).unwrap());
    }
}

#[test]
fn integral_unit_flows_count_disjoint_paths() {
    let mut r = rng(9);
    for _ in 0..200 {
        let net = random_network(&mut r, &NetworkShape::new(6, 9, 9));
        let g = DirectedCapacityGraph::reduction(&net, |_| GroupValue::count_only(1));
        let flow = integral_max_flow(&g).unwrap();
        assert!(flow.arc_flow.iter().all(|f| f.weight().is_one() && f.count() >= 0));
        let k = min_cut_cardinality(&net);
        assert_eq!(flow.value.count() as usize, k);
        let paths = edge_disjoint_paths(&net);
        assert_eq!(paths.len(), k);
        let mut used: Vec<usize> = paths.iter().flatten().map(|t| t.edge).collect();
        used.sort_unstable();
        assert!(used.windows(2).all(|w| w[0] != w[1]));
        for p in &paths {
            assert_eq!(p[0].tail(&net), net.source());
            assert_eq!(p.last().unwrap().head(&net), net.sink());
            assert!(p.windows(2).all(|w| w[0].head(&net) == w[1].tail(&net)));
        }
    }
}

#[test]
fn cut_ratio_equals_flow_value() {
    let mut r = rng(4);
    for _ in 0..1000 {
        let net = random_network(&mut r, &NetworkShape::new(6, 9, 9));
        let f = if r.gen_bool(0.8) { random_flow(&mut r, &net, 10) } else { rational_max_flow(&net) };
        assert!(verify_flow(&net, &f).is_valid());
        let cut = random_cut(&mut r, &net);
        assert_eq!(cut_ratio(&net, &f, &cut).unwrap(), flow_value(&net, &f).unwrap().0);
    }
}

#[test]
fn rational_optimum_and_ordering() {
    let mut r = rng(5);
    let mut compared = 0;
    for _ in 0..150 {
        let net = random_network(&mut r, &NetworkShape::new(5, 6, 5));
        let qmc = brute_force_qmc(&net).unwrap();
        let g = rational_max_flow(&net);
        assert!(verify_flow(&net, &g).is_valid());
        assert!(flow_value(&net, &g).unwrap().equals_integer(&qmc));
        let sat = saturation_check(&net, &g).unwrap();
        assert!(sat.violations.is_empty());

        if let (Ok(strict), Ok(loose)) = (brute_force_qmf(&net, true, 200_000), brute_force_qmf(&net, false, 200_000)) {
            assert!(strict <= loose);
            assert!(loose <= FlowValue::from_integer(&qmc));
            compared += 1;
        }
    }
    assert!(compared > 100);
}

#[test]
fn integer_pipeline_reaches_scaled_min_cut() {
    let mut r = rng(6);
    for _ in 0..40 {
        let net = random_network(&mut r, &NetworkShape::new(5, 7, 6));
        let plan = plan_integer_flow(&net).unwrap();
        for extra in 0..3u32 {
            let k = &plan.k_min + extra;
            let out = plan.build(&net, &k).unwrap();
            assert!(verify_flow(&out.network, &out.flow).is_valid());
            let qmc = brute_force_qmc(&out.network).unwrap();
            assert!(flow_value(&out.network, &out.flow).unwrap().equals_integer(&qmc));

            let st = strictify(&out.network, &out.flow).unwrap();
            assert!(is_strict(&out.network, &st.flow));
            assert!(verify_flow(&out.network, &st.flow).is_valid());
            assert!(flow_value(&out.network, &st.flow).unwrap().equals_integer(&qmc));
            assert!(saturation_check(&out.network, &st.flow).unwrap().violations.is_empty());
        }
    }
}

#[test]
fn protocols_are_sound_and_complete() {
    let mut r = rng(7);
    for _ in 0..40 {
        let net = random_network(&mut r, &NetworkShape::new(5, 7, 6));
        let run = teleportation_pipeline(&net, None).unwrap();
        assert!(run.is_sound(), "{:?}", run.report.violations);
        assert_eq!(run.report.dimension, brute_force_qmc(&run.network).unwrap());
        // every step carries one prime factor of QMC
        let omega = factorize(&run.qmc).unwrap().omega();
        assert_eq!(run.extraction.protocol.steps.len() as u64, omega);
    }
}

#[test]
fn tensor_rank_never_exceeds_min_cut() {
    let mut r = rng(8);
    let cfg = TensorConfig::default();
    for _ in 0..20 {
        let net = random_network(&mut r, &NetworkShape::new(5, 6, 4));
        let qmc = quantum_min_cut(&net).value;
        let est = estimate_qmf_tilde(&net, 100, 0, &cfg).unwrap();
        assert!(est.ranks.iter().all(|rank| *rank <= qmc));
    }
}

#[test]
fn strict_protocols_witness_tensor_rank() {
    let mut r = rng(10);
    let cfg = TensorConfig::default();
    let mut checked = 0;
    for _ in 0..30 {
        let net = random_network(&mut r, &NetworkShape::new(4, 5, 4));
        for n in 1..=2u64 {
            let scaled = net.scale_by(n).unwrap();
            let Ok((value, f)) = brute_force_max_flow(&scaled, true, 100_000) else { continue };
            let ex = extract_protocol(&scaled, &f).unwrap();
            let witness = TensorAssignment::protocol_witness(&scaled, &ex.protocol, &cfg).unwrap();
            let rank = witness.contract(&scaled, &cfg).unwrap().rank;
            assert!(FlowValue::from_integer(&rank) >= value);
            let est = estimate_qmf_tilde(&scaled, 5, 0, &cfg).unwrap();
            assert!(FlowValue::from_integer(&est.max_rank) >= value);
            checked += 1;
        }
    }
    assert!(checked > 30);
}

#[test]
fn generic_rank_reaches_min_cut_at_pipeline_scale() {
    let cfg = TensorConfig::default();
    let net = fixtures::b(2, 3);
    let plan = plan_integer_flow(&net).unwrap();
    let n = &plan.k_min * &plan.params.n0 * &plan.params.m0;
    let scaled = net.scale(&n).unwrap();
    assert_eq!(estimate_qmf_tilde(&scaled, 3, 0, &cfg).unwrap().max_rank, quantum_min_cut(&scaled).value);
    assert!(n > BigUint::one());
}
