//! Acceptance criteria, one line each. Lines go straight to the process
//! stdout so they show up even when the test harness captures output.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use qmfmc::classical::{edge_disjoint_paths, integral_max_flow, DirectedCapacityGraph};
use qmfmc::generate::{random_cut, random_flow, random_network, NetworkShape};
use qmfmc::tensor::{estimate_qmf_tilde, TensorConfig};
use qmfmc::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn network_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../networks").join(name)
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn c1_gap_witness() -> Outcome {
    let net = fixtures::parallel5();
    let qmf = brute_force_qmf(&net, true, u64::MAX).unwrap();
    let qmc = quantum_min_cut(&net).value;
    outcome(qmf.equals_integer(&big(4)) && qmc == big(5), format!("QMF_s(PARALLEL5)={qmf} < QMC={qmc}"))
}

fn c2_scaled_equality() -> Outcome {
    let net = fixtures::parallel5().scale_by(5).unwrap();
    let qmf = brute_force_qmf(&net, true, u64::MAX).unwrap();
    let qmc = quantum_min_cut(&net).value;
    outcome(qmf.equals_integer(&big(25)) && qmc == big(25), format!("QMF_s(5·PARALLEL5)={qmf} = QMC={qmc}"))
}

/// The 200 networks shared by criteria 3 and 9.
fn criterion3_networks() -> Vec<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..200).map(|_| random_network(&mut rng, &NetworkShape::new(6, 9, 9))).collect()
}

fn c3_rational_flows(nets: &[Network]) -> Outcome {
    let mut bad = 0;
    for net in nets {
        let g = rational_max_flow(net);
        let qmc = brute_force_qmc(net).unwrap();
        if !verify_flow(net, &g).is_valid() || !flow_value(net, &g).unwrap().equals_integer(&qmc) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} networks, {bad} mismatches or violations", nets.len()))
}

fn c4_cut_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for _ in 0..1000 {
        let net = random_network(&mut rng, &NetworkShape::new(6, 9, 9));
        let f = random_flow(&mut rng, &net, 10);
        let cut = random_cut(&mut rng, &net);
        if !verify_flow(&net, &f).is_valid() || cut_ratio(&net, &f, &cut).unwrap() != flow_value(&net, &f).unwrap().0 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("1000 triples, {bad} failures"))
}

/// Pipeline outputs for criteria 5 and 6.
struct PipelineCase {
    network: Network,
    strict: MultiplicativeFlow,
    qmc: BigUint,
}

fn c5_pipeline(cases: &mut Vec<PipelineCase>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    for i in 0..50 {
        let net = random_network(&mut rng, &NetworkShape::new(5, 8, 6));
        let plan = plan_integer_flow(&net).unwrap();
        let out = plan.build(&net, &plan.k_min).unwrap();
        let n = &plan.k_min * &plan.params.n0 * &plan.params.m0;
        let qmc = brute_force_qmc(&net.scale(&n).unwrap()).unwrap();
        let value = flow_value(&out.network, &out.flow).unwrap();
        let st = strictify(&out.network, &out.flow).unwrap();
        let ok = out.n == n
            && verify_flow(&out.network, &out.flow).is_valid()
            && value.equals_integer(&qmc)
            && is_strict(&out.network, &st.flow)
            && verify_flow(&out.network, &st.flow).is_valid()
            && flow_value(&out.network, &st.flow).unwrap() == value;
        if !ok {
            bad.push(i);
        }
        cases.push(PipelineCase { network: out.network, strict: st.flow, qmc });
    }
    outcome(bad.is_empty(), format!("50 networks at n = k_min·n0·m0, failures: {bad:?}"))
}

fn c6_protocols(cases: &[PipelineCase]) -> Outcome {
    let mut bad = 0;
    for c in cases {
        let ok = match extract_protocol(&c.network, &c.strict) {
            Ok(ex) => {
                let report = simulate_protocol(&c.network, &ex.protocol);
                report.is_valid() && report.dimension == c.qmc && ex.residual_is_zero()
            }
            Err(_) => false,
        };
        if !ok {
            bad += 1;
        }
    }
    outcome(bad == 0 && !cases.is_empty(), format!("{} protocols, {bad} unsound", cases.len()))
}

fn c7_tensor() -> Outcome {
    let cfg = TensorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    for _ in 0..20 {
        let net = random_network(&mut rng, &NetworkShape::new(5, 6, 4));
        let qmc = quantum_min_cut(&net).value;
        let est = estimate_qmf_tilde(&net, 100, 0, &cfg).unwrap();
        violations += est.ranks.iter().filter(|r| **r > qmc).count();
    }
    let mut witnesses = Vec::new();
    for (name, net) in [("B(2,3)", fixtures::b(2, 3)), ("DIAMOND2", fixtures::diamond2())] {
        let plan = plan_integer_flow(&net).unwrap();
        let n = &plan.k_min * &plan.params.n0 * &plan.params.m0;
        let scaled = net.scale(&n).unwrap();
        let est = estimate_qmf_tilde(&scaled, 2, 0, &cfg).unwrap();
        let qmc = quantum_min_cut(&scaled).value;
        witnesses.push((name, n, est.max_rank == qmc));
    }
    let all_witnessed = witnesses.iter().all(|w| w.2);
    let summary: Vec<String> = witnesses.iter().map(|(name, n, ok)| format!("{name}@n={n}:{}", if *ok { "=" } else { "<" })).collect();
    outcome(
        violations == 0 && all_witnessed,
        format!("2000 ranks, {violations} above QMC; rank vs QMC at pipeline n: {}", summary.join(", ")),
    )
}

fn c8_scan() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_qmfmc"))
        .args(["scan", "--max", "20"])
        .arg(network_file("parallel5.json"))
        .output()
        .expect("run qmfmc");
    if !out.status.success() {
        return outcome(false, format!("qmfmc scan exited with {}", out.status));
    }
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let mut problems = Vec::new();
    let mut prev_prefix: Option<BigRational> = None;
    let mut rows = 0;
    let four_fifths = BigRational::new(4.into(), 5.into());
    for rec in reader.records() {
        let rec = rec.unwrap();
        let n: u64 = rec[0].parse().unwrap();
        let ratio: BigRational = rec[3].parse().unwrap();
        let prefix: BigRational = rec[5].parse().unwrap();
        rows += 1;
        if n.is_multiple_of(5) && !ratio.is_one() {
            problems.push(format!("n={n}: ratio {ratio}"));
        }
        if ratio < four_fifths {
            problems.push(format!("n={n}: ratio {ratio} < 4/5"));
        }
        if prev_prefix.as_ref().is_some_and(|p| prefix < *p) {
            problems.push(format!("n={n}: prefix max decreased"));
        }
        prev_prefix = Some(prefix);
    }
    let ends_at_one = prev_prefix.is_some_and(|p| p.is_one());
    outcome(
        rows == 20 && problems.is_empty() && ends_at_one,
        if problems.is_empty() { format!("{rows} CSV rows; ratio 1 at multiples of 5, >= 4/5 elsewhere, prefix max -> 1") } else { problems.join("; ") },
    )
}

fn c9_integrality(nets: &[Network]) -> Outcome {
    let mut bad = 0;
    for net in nets {
        let g = DirectedCapacityGraph::reduction(net, |_| GroupValue::count_only(1));
        let flow = integral_max_flow(&g).unwrap();
        let k = enumerate_cuts(net).unwrap().map(|c| c.cardinality()).min().unwrap();
        let integral = flow.arc_flow.iter().all(|f| f.weight().is_one());
        if !integral || flow.value.count() as usize != k || edge_disjoint_paths(net).len() != k {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} networks, {bad} mismatches", nets.len()))
}

#[test]
fn acceptance() {
    let mut stdout = std::io::stdout();
    let _ = writeln!(stdout);
    let mut failures = Vec::new();
    let mut report = |id: u32, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let ok = o.ok && in_time;
        let budget = limit.map(|l| format!(" (limit {l:?})")).unwrap_or_default();
        let _ = writeln!(
            stdout,
            "[{}] {id}. {name}: {} [{elapsed:.2?}{budget}]",
            if ok { "PASS" } else { "FAIL" },
            o.detail
        );
        if !ok {
            failures.push(id);
        }
    };

    let nets = criterion3_networks();
    let mut cases = Vec::new();
    report(1, "gap witness", Some(Duration::from_secs(1)), &mut c1_gap_witness);
    report(2, "scaled equality", Some(Duration::from_secs(5)), &mut c2_scaled_equality);
    report(3, "rational max-flow = QMC", Some(Duration::from_secs(60)), &mut || c3_rational_flows(&nets));
    report(4, "cut-ratio identity", Some(Duration::from_secs(30)), &mut c4_cut_identity);
    report(5, "integer pipeline", Some(Duration::from_secs(120)), &mut || c5_pipeline(&mut cases));
    report(6, "teleportation protocols", None, &mut || c6_protocols(&cases));
    report(7, "tensor rank bound and witness", None, &mut c7_tensor);
    report(8, "ratio scan", None, &mut c8_scan);
    report(9, "unit-capacity integrality", None, &mut || c9_integrality(&nets));
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
