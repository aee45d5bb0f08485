use std::io::Write;

use anyhow::{Context, Result};
use num_bigint::BigUint;
use qmfmc::cut::enumerate_cuts;
use qmfmc::error::Error;
use qmfmc::flow::FlowFile;
use qmfmc::tensor::estimate_qmf_tilde;
use qmfmc::{
    brute_force_qmc, brute_force_qmf, cut_ratio, flow_value, is_strict, plan_integer_flow, quantum_min_cut,
    rational_max_flow, saturation_check, strictify, teleportation_pipeline, verify_flow, FlowValue,
    MultiplicativeFlow, Network,
};
use serde::Serialize;
use serde_json::json;

use super::write_json;
use crate::input::{load_network, parse_positive, read_text, require_format};
use crate::{Ctx, Format, Status, VerifyArgs};

/// Cut enumeration is skipped beyond this many vertices.
const ENUMERATE_VERTICES: usize = 20;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    status: &'static str,
    detail: String,
}

fn pass(name: &'static str, detail: impl Into<String>) -> Check {
    Check { name, status: "pass", detail: detail.into() }
}

fn fail(name: &'static str, detail: impl Into<String>) -> Check {
    Check { name, status: "fail", detail: detail.into() }
}

fn skip(name: &'static str, detail: impl Into<String>) -> Check {
    Check { name, status: "skip", detail: detail.into() }
}

fn check(name: &'static str, ok: bool, good: impl Into<String>, bad: impl Into<String>) -> Check {
    if ok {
        pass(name, good)
    } else {
        fail(name, bad)
    }
}

pub fn run(ctx: &Ctx, args: &VerifyArgs, out: &mut dyn Write) -> Result<Status> {
    require_format(ctx.format, &[Format::Text, Format::Json], "verify")?;
    let net = load_network(&args.net.path)?;
    let small = net.vertex_count() <= ENUMERATE_VERTICES;
    let mut checks = Vec::new();

    if let Some(path) = &args.flow {
        let file: FlowFile =
            serde_json::from_str(&read_text(path)?).with_context(|| format!("parse error in {path}"))?;
        checks.extend(flow_file_checks(&net, &file, small)?);
    }

    let qmc = quantum_min_cut(&net);
    checks.push(if small {
        let b = brute_force_qmc(&net)?;
        check("qmc", b == qmc.value, format!("QMC={} matches enumeration", qmc.value), format!("reduction gives {}, enumeration {b}", qmc.value))
    } else {
        skip("qmc", format!("QMC={}; enumeration skipped", qmc.value))
    });

    let g = rational_max_flow(&net);
    let report = verify_flow(&net, &g);
    let value = flow_value(&net, &g)?;
    checks.push(if small {
        cut_identity(&net, &g, &value)?
    } else {
        skip("cut-identity", "too many vertices to enumerate cuts")
    });

    let qmc_value = FlowValue::from_integer(&qmc.value);
    let rational_ok = report.is_valid() && value == qmc_value;
    checks.push(match (brute_force_qmf(&net, true, ctx.cap), brute_force_qmf(&net, false, ctx.cap)) {
        (Ok(s), Ok(l)) => check(
            "ordering",
            rational_ok && s <= l && l <= qmc_value,
            format!("QMF_s={s} <= QMF={l} <= QMC={} = rational flow value", qmc.value),
            format!("QMF_s={s}, QMF={l}, rational={value}, QMC={}, rational flow valid: {}", qmc.value, report.is_valid()),
        ),
        (Err(Error::SearchTooLarge { .. }), _) | (_, Err(Error::SearchTooLarge { .. })) => check(
            "ordering",
            rational_ok,
            format!("rational flow value {value} = QMC; brute force skipped (cap {})", ctx.cap),
            format!("rational flow value {value}, QMC={}, valid: {}", qmc.value, report.is_valid()),
        ),
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    });

    checks.push(if small {
        let sat = saturation_check(&net, &g)?;
        check(
            "saturation",
            sat.violations.is_empty(),
            format!("ratio = capacity on every edge of {} minimum cut(s)", sat.cuts_checked),
            format!("{} unsaturated edge(s), first on edge {}", sat.violations.len(), sat.violations.first().map_or(0, |v| v.edge)),
        )
    } else {
        skip("saturation", "too many vertices to enumerate minimum cuts")
    });

    checks.push(pipeline_check(&net)?);

    let run = teleportation_pipeline(&net, None)?;
    checks.push(check(
        "protocol",
        run.is_sound(),
        format!("{} step(s) deliver dimension {} = QMC at n={}", run.extraction.protocol.steps.len(), run.report.dimension, run.n),
        format!("delivered {} vs QMC {}; {} violation(s)", run.report.dimension, run.qmc, run.report.violations.len()),
    ));

    checks.push(match estimate_qmf_tilde(&net, args.tensor.trials, args.tensor.seed, &args.tensor.config()) {
        Ok(est) => check(
            "tensor-bound",
            est.ranks.iter().all(|r| *r <= qmc.value),
            format!("max rank {} <= QMC={} over {} seeds", est.max_rank, qmc.value, est.seeds.len()),
            format!("rank {} exceeds QMC={}", est.max_rank, qmc.value),
        ),
        Err(Error::BudgetExceeded { needed, budget }) => {
            skip("tensor-bound", format!("contraction needs {needed} entries, budget {budget}"))
        }
        Err(e) => return Err(e.into()),
    });

    let failed = checks.iter().filter(|c| c.status == "fail").count();
    if ctx.format == Format::Json {
        write_json(out, &json!({ "checks": checks, "passed": failed == 0 }))?;
    } else {
        for c in &checks {
            writeln!(out, "{:<4} {}: {}", c.status.to_uppercase(), c.name, c.detail)?;
        }
        if failed == 0 {
            writeln!(out, "all checks passed")?;
        } else {
            writeln!(out, "{failed} check(s) failed")?;
        }
    }
    Ok(if failed == 0 { Status::Ok } else { Status::Failed })
}

fn flow_file_checks(net: &Network, file: &FlowFile, small: bool) -> Result<Vec<Check>> {
    let n = match &file.scale {
        Some(s) => parse_positive("flow scale", s)?,
        None => BigUint::from(1u32),
    };
    let scaled = net.scale(&n)?;
    let f = match MultiplicativeFlow::from_file(file, &scaled) {
        Ok(f) => f,
        Err(e) => return Ok(vec![fail("flow-file", e.to_string())]),
    };
    let report = verify_flow(&scaled, &f);
    if !report.is_valid() {
        let lines: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Ok(vec![fail("flow-file", lines.join("; "))]);
    }
    let value = flow_value(&scaled, &f)?;
    let mut checks = vec![pass("flow-file", format!("valid {:?} flow of value {value} on n={n}", f.kind()))];
    if small {
        let mut c = cut_identity(&scaled, &f, &value)?;
        c.name = "flow-file-cut-identity";
        checks.push(c);
    }
    Ok(checks)
}

fn cut_identity(net: &Network, f: &MultiplicativeFlow, value: &FlowValue) -> Result<Check> {
    let mut count = 0usize;
    for cut in enumerate_cuts(net)? {
        let r = cut_ratio(net, f, &cut)?;
        if r != value.0 {
            return Ok(fail("cut-identity", format!("cut {} has ratio {} but the flow value is {value}", cut.display(net), FlowValue(r))));
        }
        count += 1;
    }
    Ok(pass("cut-identity", format!("all {count} cuts carry ratio {value}")))
}

fn pipeline_check(net: &Network) -> Result<Check> {
    if !net.is_connected() {
        return Ok(skip("pipeline", "source and sink are disconnected"));
    }
    let plan = plan_integer_flow(net)?;
    let built = plan.build(net, &plan.k_min)?;
    let qmc = quantum_min_cut(&built.network).value;
    let valid = verify_flow(&built.network, &built.flow).is_valid();
    let value = flow_value(&built.network, &built.flow)?;
    let st = strictify(&built.network, &built.flow)?;
    let strict_value = flow_value(&built.network, &st.flow)?;
    let ok = valid
        && value.equals_integer(&qmc)
        && plan.params.qmc_at(&built.n) == qmc
        && is_strict(&built.network, &st.flow)
        && strict_value == value;
    Ok(check(
        "pipeline",
        ok,
        format!("n={} (k={}, n0={}, m0={}): integer and strict flows reach QMC={qmc}", built.n, plan.k_min, plan.params.n0, plan.params.m0),
        format!("n={}: valid={valid}, value={value}, strict value={strict_value}, QMC={qmc}", built.n),
    ))
}
