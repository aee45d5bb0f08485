pub mod flow;
pub mod protocol;
pub mod qmc;
pub mod scan;
pub mod tensor;
pub mod verify;

use std::io::Write;

use anyhow::Result;
use serde_json::Value;

pub fn write_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}
