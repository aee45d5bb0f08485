use std::io::Write;

use anyhow::Result;
use num_bigint::BigUint;
use num_traits::One;
use qmfmc::error::Error;
use qmfmc::flow::mult::fmt_rational;
use qmfmc::network::big_to_json;
use qmfmc::{
    flow_value, minimal_strict_scale, plan_integer_flow, quantum_min_cut, rational_max_flow, strictify, verify_flow,
    MultiplicativeFlow, Network,
};
use serde_json::{json, Map, Value};

use super::write_json;
use crate::input::{load_network, parse_big, require_format};
use crate::{Ctx, FlowArgs, Format, Status};

struct Built {
    mode: &'static str,
    n: BigUint,
    network: Network,
    flow: MultiplicativeFlow,
    /// Mode-specific facts, reported verbatim.
    extra: Map<String, Value>,
}

pub fn run(ctx: &Ctx, args: &FlowArgs, out: &mut dyn Write) -> Result<Status> {
    require_format(ctx.format, &[Format::Text, Format::Json, Format::Dot], "flow")?;
    let net = load_network(&args.net.path)?;
    let k = args.k.as_deref().map(|k| parse_big("--k", k)).transpose()?;
    let built = if args.field.is_some() {
        if k.is_some() {
            anyhow::bail!("--k only applies to --integer and --strict");
        }
        Built { mode: "rational", n: BigUint::one(), flow: rational_max_flow(&net), network: net, extra: Map::new() }
    } else if args.integer {
        pipeline(&net, k.as_ref(), false)?
    } else if let Some(k) = &k {
        pipeline(&net, Some(k), true)?
    } else {
        match minimal_strict_scale(&net, args.max_n, ctx.cap) {
            Ok(Some((n, network, flow))) => {
                let mut extra = Map::new();
                extra.insert("method".into(), json!("search"));
                Built { mode: "strict", n: n.into(), network, flow, extra }
            }
            Ok(None) | Err(Error::SearchTooLarge { .. }) => {
                let mut b = pipeline(&net, None, true)?;
                b.extra.insert("search".into(), json!(format!("no n <= {} within the search cap", args.max_n)));
                b
            }
            Err(e) => return Err(e.into()),
        }
    };

    let report = verify_flow(&built.network, &built.flow);
    let value = flow_value(&built.network, &built.flow)?;
    let qmc = quantum_min_cut(&built.network);
    let optimal = value.equals_integer(&qmc.value);
    let status = if report.is_valid() && optimal { Status::Ok } else { Status::Failed };

    match ctx.format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("mode".into(), json!(built.mode));
            doc.insert("n".into(), big_to_json(&built.n));
            doc.extend(built.extra);
            doc.insert("value".into(), json!(value.to_string()));
            doc.insert("qmc".into(), big_to_json(&qmc.value));
            doc.insert("optimal".into(), json!(optimal));
            let scale = (!built.n.is_one()).then_some(&built.n);
            doc.insert("flow".into(), serde_json::to_value(built.flow.to_file(scale))?);
            doc.insert("verification".into(), json!({ "valid": report.is_valid(), "violations": report.violations }));
            write_json(out, &Value::Object(doc))?;
        }
        Format::Dot => {
            let labels: Vec<String> = built
                .flow
                .edges()
                .iter()
                .map(|e| format!("{} / {}", fmt_rational(&e.fwd), fmt_rational(&e.bwd)))
                .collect();
            write!(out, "{}", built.network.to_dot(Some(&labels), qmc.cut.cut_edges()))?;
        }
        _ => {
            write!(out, "{} flow, n={}", built.mode, built.n)?;
            for (key, v) in &built.extra {
                write!(out, ", {key}={}", v.as_str().map(str::to_owned).unwrap_or_else(|| v.to_string()))?;
            }
            writeln!(out)?;
            writeln!(out, "value={value}, QMC={}{}", qmc.value, if optimal { "" } else { " (NOT optimal)" })?;
            for (e, f) in built.network.edges().iter().zip(built.flow.edges()) {
                writeln!(
                    out,
                    "  e{} {}->{}: {}  {}->{}: {}  (d={})",
                    e.id,
                    built.network.name(e.u),
                    built.network.name(e.v),
                    fmt_rational(&f.fwd),
                    built.network.name(e.v),
                    built.network.name(e.u),
                    fmt_rational(&f.bwd),
                    e.capacity
                )?;
            }
            if report.is_valid() {
                writeln!(out, "verified: no violations")?;
            } else {
                for v in &report.violations {
                    writeln!(out, "violation: {v}")?;
                }
            }
        }
    }
    Ok(status)
}

fn pipeline(net: &Network, k: Option<&BigUint>, strict: bool) -> Result<Built> {
    let plan = plan_integer_flow(net)?;
    let k = k.cloned().unwrap_or_else(|| plan.k_min.clone());
    let built = plan.build(net, &k)?;
    let mut extra = Map::new();
    if strict {
        extra.insert("method".into(), json!("pipeline"));
    }
    extra.insert("k".into(), big_to_json(&k));
    extra.insert("k_min".into(), big_to_json(&plan.k_min));
    extra.insert("n0".into(), big_to_json(&plan.params.n0));
    extra.insert("m0".into(), big_to_json(&plan.params.m0));
    let flow = if strict {
        let st = strictify(&built.network, &built.flow)?;
        extra.insert("cycles_cancelled".into(), json!(st.cycles_cancelled));
        st.flow
    } else {
        built.flow
    };
    Ok(Built { mode: if strict { "strict" } else { "integer" }, n: built.n, network: built.network, flow, extra })
}
