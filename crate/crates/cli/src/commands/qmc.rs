use std::io::Write;

use anyhow::Result;
use qmfmc::cut::MAX_ENUMERATION_VERTICES;
use qmfmc::network::big_to_json;
use qmfmc::{brute_force_qmc, quantum_min_cut};
use serde_json::json;

use super::write_json;
use crate::input::{load_network, require_format};
use crate::{Ctx, Format, NetArgs, Status};

/// Explicit enumeration is skipped past this many vertices (2^18 cuts).
const CONFIRM_VERTICES: usize = 20;

pub fn run(ctx: &Ctx, args: &NetArgs, out: &mut dyn Write) -> Result<Status> {
    require_format(ctx.format, &[Format::Text, Format::Json, Format::Dot], "qmc")?;
    let net = load_network(&args.path)?;
    let q = quantum_min_cut(&net);
    let confirmed = (net.vertex_count() <= CONFIRM_VERTICES.min(MAX_ENUMERATION_VERTICES))
        .then(|| brute_force_qmc(&net))
        .transpose()?;
    let status = match &confirmed {
        Some(b) if *b != q.value => Status::Failed,
        _ => Status::Ok,
    };
    match ctx.format {
        Format::Json => write_json(
            out,
            &json!({
                "qmc": big_to_json(&q.value),
                "cut": q.cut.report(&net),
                "brute_force": confirmed.as_ref().map(big_to_json),
                "confirmed": confirmed.as_ref().map(|b| *b == q.value),
            }),
        )?,
        Format::Dot => write!(out, "{}", net.to_dot(None, q.cut.cut_edges()))?,
        _ => {
            writeln!(out, "QMC={}, cut={}", q.value, q.cut.display(&net))?;
            match &confirmed {
                Some(b) if *b == q.value => writeln!(out, "brute force over all cuts agrees")?,
                Some(b) => writeln!(out, "MISMATCH: brute force over all cuts gives {b}")?,
                None => writeln!(out, "brute force skipped: more than {CONFIRM_VERTICES} vertices")?,
            }
        }
    }
    Ok(status)
}
