use std::path::Path;

use oscint_core::mi::{mi_contour, mi_exp_scaling, mi_log_expansion, mi_longman, mi_partial_int, HalfPeriodRule};
use oscint_core::precision::{format_decimals, neg_log10};
use oscint_core::series_accel::{mrb_constant, Method};
use oscint_core::{Complex, Error, PrecisionContext, Real, Result};

use crate::cache;
use crate::published::{self, PublishedRow, PublishedTable};
use crate::report::Report;

/// Split point used for every row of the Longman table.
pub const LONGMAN_SPLIT: u32 = 3;

pub const TABLE_IDS: &[&str] = &[
    "tab1", "tab2", "tab3", "tab4", "tab5", "tab6", "tab8", "tabcont", "tabv1", "tabvks",
];

/// Rows that take minutes rather than seconds and only run under `--full`.
pub fn is_long(id: &str, row: &PublishedRow) -> bool {
    let s = |i: usize| row.params[i].parse::<u64>().unwrap_or(0);
    match id {
        "tab5" => s(1) >= 256_000,
        "tab4" => s(1) >= 512_000,
        "tabcont" => s(0) >= 512_000,
        _ => false,
    }
}

fn param<T: std::str::FromStr>(row: &PublishedRow, i: usize) -> Result<T> {
    row.params[i]
        .parse()
        .map_err(|_| Error::InternalConsistency(format!("bad table parameter {:?}", row.params[i])))
}

fn parts(z: &Complex) -> Vec<Real> {
    vec![z.real().clone(), z.imag().clone()]
}

/// Decimal places printed in a published cell.
pub fn printed_decimals(cell: &str) -> usize {
    cell.split_once('.').map_or(0, |(_, frac)| frac.len())
}

/// Leading decimals on which `x` agrees with the printed cell, capped at the
/// number printed.
pub fn agreement(ctx: &PrecisionContext, x: &Real, cell: &str) -> Result<usize> {
    let printed = printed_decimals(cell);
    let p = ctx.parse_real(cell)?;
    let gap = Real::with_val(ctx.prec(), x - &p).abs();
    let digits = neg_log10(&gap, printed as f64 + 1.0).floor();
    Ok((digits.max(0.0) as usize).min(printed))
}

/// Values for every selected row, in row order.
fn compute(
    ctx: &PrecisionContext,
    table: &PublishedTable,
    rows: &[&PublishedRow],
    cache_path: Option<&Path>,
) -> Result<Vec<Vec<Real>>> {
    match table.id {
        "tab1" | "tab2" | "tab3" => {
            let method = match table.id {
                "tab1" => Method::Direct,
                "tab2" => Method::Euler,
                _ => Method::Cvz,
            };
            rows.iter()
                .map(|r| {
                    let k: u64 = param(r, 0)?;
                    Ok(vec![mrb_constant(ctx, method, k)?.value.real().clone()])
                })
                .collect()
        }
        "tab4" => rows
            .iter()
            .map(|r| Ok(parts(&mi_partial_int(ctx, param(r, 0)?, param(r, 1)?)?.value)))
            .collect(),
        "tab5" => rows
            .iter()
            .map(|r| Ok(parts(&mi_exp_scaling(ctx, param(r, 0)?, param(r, 1)?)?.value)))
            .collect(),
        "tab6" => rows
            .iter()
            .map(|r| {
                let est = mi_longman(ctx, LONGMAN_SPLIT, param(r, 0)?, param(r, 1)?, HalfPeriodRule::Simpson)?;
                Ok(parts(&est.value))
            })
            .collect(),
        "tab8" => {
            let n_max = rows.iter().map(|r| param::<u32>(r, 0)).try_fold(1, |m, n| n.map(|n| m.max(n)))?;
            let vt = cache::load_or_build(ctx, cache_path, n_max, n_max)?;
            let report = mi_log_expansion(ctx, n_max, &vt)?;
            rows.iter()
                .map(|r| {
                    let n: usize = param(r, 0)?;
                    Ok(parts(&report.rows[n - 1].value))
                })
                .collect()
        }
        "tabcont" => rows
            .iter()
            .map(|r| {
                let tau = ctx.parse_real(r.params[2])?;
                Ok(parts(&mi_contour(ctx, param(r, 0)?, param(r, 1)?, &tau)?.value))
            })
            .collect(),
        "tabv1" | "tabvks" => {
            let (k_max, s_max) = if table.id == "tabv1" { (1, 6) } else { (6, 8) };
            let vt = cache::load_or_build(ctx, cache_path, k_max, s_max)?;
            rows.iter()
                .map(|r| {
                    let (k, s) = if table.id == "tabv1" {
                        (1, param(r, 0)?)
                    } else {
                        (param(r, 0)?, param(r, 1)?)
                    };
                    Ok(parts(vt.value(k, s)?))
                })
                .collect()
        }
        other => Err(Error::Config(format!("unknown table id {other:?}"))),
    }
}

/// Recomputes a published table row by row. Long rows are skipped unless
/// `full`; `compare` appends an agreement count after each value column.
pub fn regenerate(
    ctx: &PrecisionContext,
    id: &str,
    full: bool,
    compare: bool,
    cache_path: Option<&Path>,
) -> Result<Report> {
    let table = published::table(id).ok_or_else(|| {
        Error::Config(format!("unknown table id {id:?} (expected one of {})", TABLE_IDS.join(", ")))
    })?;
    let (rows, skipped): (Vec<&PublishedRow>, Vec<&PublishedRow>) =
        table.rows.iter().partition(|r| full || !is_long(id, r));
    let values = compute(ctx, table, &rows, cache_path)?;

    let mut header: Vec<String> = table.params.iter().map(|s| s.to_string()).collect();
    for v in table.values {
        header.push(v.to_string());
        if compare {
            header.push(format!("{v}_agree"));
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut report = Report::new(table.caption, &header);
    let decimals = ctx.digits() as usize;
    for (row, vals) in rows.iter().zip(&values) {
        let mut cells: Vec<String> = row.params.iter().map(|s| s.to_string()).collect();
        for (j, x) in vals.iter().enumerate() {
            cells.push(format_decimals(x, decimals));
            if compare {
                cells.push(agreement(ctx, x, row.values[j])?.to_string());
            }
        }
        report.push(cells);
    }
    report.note(format!("table={id} digits={}", ctx.digits()));
    if id == "tab6" {
        report.note(format!("m={LONGMAN_SPLIT} rule={}", HalfPeriodRule::Simpson));
    }
    if compare && table.truncated {
        report.note("published values are truncated, not rounded");
    }
    for row in skipped {
        report.note(format!("skipped ({}) = ({}); rerun with --full", table.params.join(","), row.params.join(",")));
    }
    Ok(report)
}
