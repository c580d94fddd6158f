//! Record writers: JSON lines or CSV, always in index order.

use std::io::Write;

use littlewood_core::interval::SERIAL_DIGITS;
use littlewood_core::lab::{LittlewoodRecord, PeriodStatsReport};
use littlewood_core::RationalInterval;
use serde::Serialize;

use crate::config::Format;

fn lo(iv: &RationalInterval) -> String {
    iv.lo_decimal(SERIAL_DIGITS)
}

fn hi(iv: &RationalInterval) -> String {
    iv.hi_decimal(SERIAL_DIGITS)
}

#[derive(Serialize)]
struct LittlewoodRow {
    n: usize,
    u_n: String,
    l: usize,
    a_last: String,
    r_digits: usize,
    q_digits: usize,
    product_lo: String,
    product_hi: String,
    l_over_un: String,
    ec4_ratio_lo: String,
    ec4_ratio_hi: String,
}

impl From<&LittlewoodRecord> for LittlewoodRow {
    fn from(r: &LittlewoodRecord) -> Self {
        LittlewoodRow {
            n: r.n,
            u_n: r.u_n.to_string(),
            l: r.l,
            a_last: r.a_last.to_string(),
            r_digits: r.r_digits,
            q_digits: r.q_digits,
            product_lo: lo(&r.product),
            product_hi: hi(&r.product),
            l_over_un: r.l_over_un.to_string(),
            ec4_ratio_lo: lo(&r.ec4_ratio),
            ec4_ratio_hi: hi(&r.ec4_ratio),
        }
    }
}

#[derive(Serialize)]
struct StatsRow {
    n: usize,
    u_n: String,
    l: usize,
    birkhoff_lo: String,
    birkhoff_hi: String,
    gamma_dev_lo: String,
    gamma_dev_hi: String,
    gm_log_b_lo: String,
    gm_log_b_hi: String,
    gm_log_b1_lo: String,
    gm_log_b1_hi: String,
    kappa: String,
    below_threshold: usize,
    unresolved: usize,
    sandwich: bool,
    upper_bound: bool,
    lower_bound: bool,
}

impl From<&PeriodStatsReport> for StatsRow {
    fn from(r: &PeriodStatsReport) -> Self {
        StatsRow {
            n: r.n,
            u_n: r.u_n.to_string(),
            l: r.l,
            birkhoff_lo: lo(&r.birkhoff),
            birkhoff_hi: hi(&r.birkhoff),
            gamma_dev_lo: lo(&r.gamma_dev),
            gamma_dev_hi: hi(&r.gamma_dev),
            gm_log_b_lo: lo(&r.gm_log_b),
            gm_log_b_hi: hi(&r.gm_log_b),
            gm_log_b1_lo: lo(&r.gm_log_b1),
            gm_log_b1_hi: hi(&r.gm_log_b1),
            kappa: r.kappa.to_string(),
            below_threshold: r.below_threshold,
            unresolved: r.unresolved,
            sandwich: r.sandwich,
            upper_bound: r.upper_bound,
            lower_bound: r.lower_bound,
        }
    }
}

/// One JSON object per line.
pub fn jsonl_lines<T: Serialize>(items: &[T]) -> Vec<String> {
    items.iter().map(|x| serde_json::to_string(x).expect("records serialize")).collect()
}

fn write_csv<R: Serialize, W: Write>(rows: impl Iterator<Item = R>, w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row).map_err(std::io::Error::other)?;
    }
    out.flush()
}

fn write_jsonl<T: Serialize, W: Write>(items: &[T], mut w: W) -> std::io::Result<()> {
    for line in jsonl_lines(items) {
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn write_littlewood<W: Write>(records: &[LittlewoodRecord], format: Format, w: W) -> std::io::Result<()> {
    match format {
        Format::Jsonl => write_jsonl(records, w),
        Format::Csv => write_csv(records.iter().map(LittlewoodRow::from), w),
    }
}

pub fn write_stats<W: Write>(reports: &[PeriodStatsReport], format: Format, w: W) -> std::io::Result<()> {
    match format {
        Format::Jsonl => write_jsonl(reports, w),
        Format::Csv => write_csv(reports.iter().map(StatsRow::from), w),
    }
}
