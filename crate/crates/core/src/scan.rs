//! `QMF_s(n·N) / QMC(n·N)` for `n = 1..=N`, by exhaustive search.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::construct::quantum_min_cut;
use crate::flow::mult::fmt_rational;
use crate::flow::oracle::brute_force_qmf;
use crate::network::Network;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub n: u64,
    pub qmc: BigUint,
    /// `None` when the search space exceeded the cap.
    pub qmf_strict: Option<BigUint>,
    pub ratio: Option<BigRational>,
    /// Best ratio over the non-skipped rows up to and including this one.
    pub prefix_max: Option<BigRational>,
}

impl ScanRow {
    pub fn is_equal(&self) -> bool {
        self.qmf_strict.as_ref() == Some(&self.qmc)
    }

    pub fn is_skipped(&self) -> bool {
        self.qmf_strict.is_none()
    }

    pub fn record(&self) -> ScanRecord {
        let opt = |r: &Option<BigRational>| r.as_ref().map(fmt_rational).unwrap_or_default();
        ScanRecord {
            n: self.n,
            qmf_strict: self.qmf_strict.as_ref().map(ToString::to_string).unwrap_or_default(),
            qmc: self.qmc.to_string(),
            ratio: opt(&self.ratio),
            equal: self.is_equal(),
            prefix_max: opt(&self.prefix_max),
            status: if self.is_skipped() { "skipped" } else { "ok" },
        }
    }
}

/// Flat, string-valued row for CSV/JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub n: u64,
    pub qmf_strict: String,
    pub qmc: String,
    pub ratio: String,
    pub equal: bool,
    pub prefix_max: String,
    pub status: &'static str,
}

/// One row per `n`. Rows are computed in parallel on the current rayon pool;
/// output order is always by `n`.
pub fn scan(net: &Network, max_n: u64, cap: u64) -> Result<Vec<ScanRow>> {
    let computed: Vec<Result<(u64, BigUint, Option<BigUint>)>> = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let scaled = net.scale_by(n)?;
            let qmc = quantum_min_cut(&scaled).value;
            let qmf = match brute_force_qmf(&scaled, true, cap) {
                Ok(v) if v.is_integer() => Some(v.0.to_integer().to_biguint().expect("flow values are positive")),
                Ok(v) => return Err(Error::Internal(format!("strict flow value {v} is not an integer"))),
                Err(Error::SearchTooLarge { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok((n, qmc, qmf))
        })
        .collect();
    let mut rows = Vec::with_capacity(computed.len());
    let mut best: Option<BigRational> = None;
    for r in computed {
        let (n, qmc, qmf) = r?;
        let ratio = qmf
            .as_ref()
            .map(|v| BigRational::new(BigInt::from(v.clone()), BigInt::from(qmc.clone())));
        if let Some(r) = &ratio {
            if best.as_ref().is_none_or(|b| r > b) {
                best = Some(r.clone());
            }
        }
        rows.push(ScanRow { n, qmc, qmf_strict: qmf, ratio, prefix_max: best.clone() });
    }
    Ok(rows)
}
