//! Run records in the detailed-results CSV layout and per-group summaries.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::Result;
use omt::gap::gap_metrics;
use serde::{Deserialize, Serialize};

pub const HEADER: [&str; 12] =
    ["|V|", "p", "ins", "cpu", "objU", "objL", "objR", "gUR", "gUL", "gULbar", "gUL_term", "nod"];

/// Gap columns are percentages: gUR = (Ū − R)/Ū, gUL = (Ū − L)/Ū,
/// gULbar = (U − L̄)/U, gUL_term = (U − L)/U, where Ū and L̄ are the best
/// bounds known for the instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(rename = "|V|")]
    pub v: usize,
    pub p: usize,
    pub ins: usize,
    pub cpu: f64,
    #[serde(rename = "objU")]
    pub obj_u: f64,
    #[serde(rename = "objL")]
    pub obj_l: Option<f64>,
    #[serde(rename = "objR")]
    pub obj_r: Option<f64>,
    #[serde(rename = "gUR")]
    pub g_ur: Option<f64>,
    #[serde(rename = "gUL")]
    pub g_ul_bar: Option<f64>,
    #[serde(rename = "gULbar")]
    pub g_u_lbar: Option<f64>,
    #[serde(rename = "gUL_term")]
    pub g_ul: Option<f64>,
    pub nod: usize,
    #[serde(skip)]
    pub method: String,
}

/// Bounds of one run plus the best bounds known for its instance.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub obj_u: f64,
    pub obj_l: Option<f64>,
    pub obj_r: Option<f64>,
    pub best_u: f64,
    pub best_l: Option<f64>,
}

impl RunRecord {
    pub fn new(v: usize, p: usize, ins: usize, method: &str, cpu: f64, b: Bounds, nod: usize) -> Result<Self> {
        let nan = f64::NAN;
        let g = gap_metrics(b.obj_u, b.obj_l.unwrap_or(nan), b.best_u, b.obj_r.unwrap_or(nan), b.best_l.unwrap_or(nan))?;
        // float noise around a closed gap prints as 0
        let some = |x: f64| if x.is_nan() { None } else if x.abs() < 1e-9 { Some(0.0) } else { Some(x) };
        Ok(Self {
            v,
            p,
            ins,
            cpu,
            obj_u: b.obj_u,
            obj_l: b.obj_l,
            obj_r: b.obj_r,
            g_ur: some(g.g_ur),
            g_ul_bar: some(g.g_ul_bar),
            g_u_lbar: some(g.g_u_lbar),
            g_ul: some(g.g_ul),
            nod,
            method: method.to_string(),
        })
    }

    /// Solved to proven optimality (termination gap zero).
    pub fn optimal(&self) -> bool {
        self.g_ul.is_some_and(|g| g.abs() <= 1e-9)
    }
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord], header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(HEADER)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
pub fn read_records(text: &str) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<Vec<RunRecord>, _>>()?)
}

/// Means per (|V|, p) group; |#| counts runs closed to optimality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    #[serde(rename = "|V|")]
    pub v: usize,
    pub p: usize,
    #[serde(rename = "|#|")]
    pub solved: usize,
    pub cpu: f64,
    #[serde(rename = "gUR")]
    pub g_ur: Option<f64>,
    #[serde(rename = "gUL")]
    pub g_ul_bar: Option<f64>,
    #[serde(rename = "gULbar")]
    pub g_u_lbar: Option<f64>,
    #[serde(rename = "gUL_term")]
    pub g_ul: Option<f64>,
    pub nod: f64,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = values.collect();
    v.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.v, r.p)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((v, p), rs)| {
            let k = rs.len() as f64;
            SummaryRow {
                v,
                p,
                solved: rs.iter().filter(|r| r.optimal()).count(),
                cpu: rs.iter().map(|r| r.cpu).sum::<f64>() / k,
                g_ur: mean(rs.iter().map(|r| r.g_ur)),
                g_ul_bar: mean(rs.iter().map(|r| r.g_ul_bar)),
                g_u_lbar: mean(rs.iter().map(|r| r.g_u_lbar)),
                g_ul: mean(rs.iter().map(|r| r.g_ul)),
                nod: rs.iter().map(|r| r.nod as f64).sum::<f64>() / k,
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
