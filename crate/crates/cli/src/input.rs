use std::fs;
use std::io::{self, Read};

use anyhow::{bail, Context, Result};
use num_bigint::BigUint;
use qmfmc::Network;

use crate::Format;

pub fn read_text(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

pub fn load_network(path: &str) -> Result<Network> {
    let text = read_text(path)?;
    Network::from_json(&text).with_context(|| format!("parse error in {}", if path == "-" { "<stdin>" } else { path }))
}

pub fn parse_big(flag: &str, s: &str) -> Result<BigUint> {
    let n: BigUint = s.trim().parse().with_context(|| format!("{flag}: expected a nonnegative integer, got {s:?}"))?;
    Ok(n)
}

pub fn parse_positive(flag: &str, s: &str) -> Result<BigUint> {
    let n = parse_big(flag, s)?;
    if n == BigUint::default() {
        bail!("{flag} must be at least 1");
    }
    Ok(n)
}

pub fn require_format(format: Format, allowed: &[Format], command: &str) -> Result<()> {
    if !allowed.contains(&format) {
        bail!("--format {} is not supported by `{command}`", format_name(format));
    }
    Ok(())
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Text => "text",
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Csv => "csv",
    }
}
