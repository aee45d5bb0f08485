use std::io::Write;

use anyhow::Result;
use qmfmc::scan::{scan, ScanRow};
use serde_json::json;

use super::write_json;
use crate::input::{load_network, require_format};
use crate::{Ctx, Format, ScanArgs, Status};

/// CSV by default (`text` and `csv` are the same here), or a JSON array.
pub fn run(ctx: &Ctx, args: &ScanArgs, out: &mut dyn Write) -> Result<Status> {
    require_format(ctx.format, &[Format::Text, Format::Csv, Format::Json], "scan")?;
    let net = load_network(&args.net.path)?;
    let rows = scan(&net, args.max, ctx.cap)?;
    let records: Vec<_> = rows.iter().map(ScanRow::record).collect();
    if ctx.format == Format::Json {
        write_json(out, &json!(records))?;
    } else {
        let mut w = csv::Writer::from_writer(out);
        for r in &records {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(Status::Ok)
}
