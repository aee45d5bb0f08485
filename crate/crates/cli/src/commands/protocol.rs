use std::io::Write;

use anyhow::{Context, Result};
use qmfmc::network::big_to_json;
use qmfmc::protocol::{ProtocolFile, SimulationReport};
use qmfmc::{quantum_min_cut, simulate_protocol, teleportation_pipeline, Network, Protocol};
use serde_json::{json, Map, Value};

use super::write_json;
use crate::input::{load_network, parse_big, parse_positive, read_text, require_format};
use crate::{Ctx, Format, ProtocolArgs, Status};

pub fn run(ctx: &Ctx, args: &ProtocolArgs, out: &mut dyn Write) -> Result<Status> {
    require_format(ctx.format, &[Format::Text, Format::Json], "protocol")?;
    let net = load_network(&args.net.path)?;

    let mut doc = Map::new();
    let (network, protocol, report, qmc) = if let Some(path) = &args.check {
        let n = parse_positive("--n", &args.n)?;
        let file: ProtocolFile = serde_json::from_str(&read_text(path)?).with_context(|| format!("parse error in {path}"))?;
        let protocol = Protocol::from_file(&file)?;
        let network = net.scale(&n)?;
        let report = simulate_protocol(&network, &protocol);
        let qmc = quantum_min_cut(&network).value;
        doc.insert("n".into(), big_to_json(&n));
        (network, protocol, report, qmc)
    } else {
        let k = args.k.as_deref().map(|k| parse_big("--k", k)).transpose()?;
        let run = teleportation_pipeline(&net, k.as_ref())?;
        doc.insert("n".into(), big_to_json(&run.n));
        doc.insert("cycles_cancelled".into(), json!(run.extraction.cycles_cancelled));
        doc.insert("residual_zero".into(), json!(run.extraction.residual_is_zero()));
        (run.network, run.extraction.protocol, run.report, run.qmc)
    };
    let sound = report.is_valid() && report.dimension == qmc;
    // an explicitly checked protocol only has to be feasible
    let ok = if args.check.is_some() { report.is_valid() } else { sound };

    match ctx.format {
        Format::Json => {
            doc.insert("qmc".into(), big_to_json(&qmc));
            doc.insert("protocol".into(), serde_json::to_value(protocol.to_file())?);
            if args.simulate || args.check.is_some() {
                doc.insert("simulation".into(), report.to_json());
            }
            write_json(out, &Value::Object(doc))?;
        }
        _ => {
            let n = doc.get("n").map(Value::to_string).unwrap_or_default();
            writeln!(
                out,
                "n={n}, steps={}, dimension={}, QMC={qmc}",
                protocol.steps.len(),
                protocol.claimed_dimension
            )?;
            for step in &protocol.steps {
                writeln!(out, "  p={}: {}", step.dimension, render_path(&network, step))?;
            }
            if args.simulate || args.check.is_some() {
                write_simulation(out, &network, &report, &qmc)?;
            }
        }
    }
    Ok(if ok { Status::Ok } else { Status::Failed })
}

fn render_path(net: &Network, step: &qmfmc::TeleportStep) -> String {
    let mut s = match step.path.first() {
        Some(t) if t.edge < net.edges().len() => net.name(t.tail(net)).to_owned(),
        _ => String::from("?"),
    };
    for t in &step.path {
        if t.edge < net.edges().len() {
            s.push_str(&format!(" -e{}-> {}", t.edge, net.name(t.head(net))));
        } else {
            s.push_str(&format!(" -e{}-> ?", t.edge));
        }
    }
    s
}

fn write_simulation(out: &mut dyn Write, net: &Network, report: &SimulationReport, qmc: &num_bigint::BigUint) -> Result<()> {
    writeln!(out, "simulation: delivered dimension {}", report.dimension)?;
    for e in net.edges() {
        writeln!(out, "  e{}: used {} of {}", e.id, report.usage[e.id], e.capacity)?;
    }
    if report.is_valid() {
        writeln!(out, "no violations")?;
    }
    for v in &report.violations {
        writeln!(out, "violation: {}", serde_json::to_string(v)?)?;
    }
    if report.dimension != *qmc {
        writeln!(out, "dimension {} differs from QMC {qmc}", report.dimension)?;
    }
    Ok(())
}
