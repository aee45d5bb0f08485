use std::io::Write;

use anyhow::Result;
use num_bigint::BigUint;
use num_traits::One;
use qmfmc::network::big_to_json;
use qmfmc::tensor::{estimate_qmf_tilde, TensorConfig};
use qmfmc::{plan_integer_flow, quantum_min_cut};
use serde_json::json;

use super::write_json;
use crate::input::{load_network, parse_positive, require_format};
use crate::{Ctx, Format, Status, TensorArgs, TensorOpts};

impl TensorOpts {
    pub fn config(&self) -> TensorConfig {
        TensorConfig { field_prime: self.field_prime, budget: self.budget }
    }
}

pub fn run(ctx: &Ctx, args: &TensorArgs, out: &mut dyn Write) -> Result<Status> {
    require_format(ctx.format, &[Format::Text, Format::Json], "tensor")?;
    let net = load_network(&args.net.path)?;
    let n = if args.pipeline {
        let plan = plan_integer_flow(&net)?;
        &plan.k_min * &plan.params.n0 * &plan.params.m0
    } else {
        args.n.as_deref().map(|n| parse_positive("--n", n)).transpose()?.unwrap_or_else(BigUint::one)
    };
    let scaled = net.scale(&n)?;
    let qmc = quantum_min_cut(&scaled).value;
    let est = estimate_qmf_tilde(&scaled, args.tensor.trials, args.tensor.seed, &args.tensor.config())?;
    let bounded = est.ranks.iter().all(|r| *r <= qmc);

    if ctx.format == Format::Json {
        let mut doc = est.to_json();
        doc["n"] = big_to_json(&n);
        doc["qmc"] = big_to_json(&qmc);
        doc["bounded"] = json!(bounded);
        write_json(out, &doc)?;
    } else {
        writeln!(out, "n={n}, max rank={} over {} trials, QMC={qmc}", est.max_rank, est.seeds.len())?;
        writeln!(out, "field F_{}, seeds {}..", est.field_prime, args.tensor.seed)?;
        let ranks: Vec<String> = est.ranks.iter().map(ToString::to_string).collect();
        writeln!(out, "ranks: {}", ranks.join(" "))?;
        if !bounded {
            writeln!(out, "VIOLATION: a rank exceeds the quantum min-cut")?;
        }
    }
    Ok(if bounded { Status::Ok } else { Status::Failed })
}
