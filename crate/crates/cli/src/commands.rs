use std::path::PathBuf;

use clap::Args;

use oscint_core::fichtenholz::{
    telescope_fill, v_closed_11, v_closed_1s, v_numeric, Provenance, VEntry, VTable,
};
use oscint_core::integrand::{table as coefficient_table, f_derivative, TableKind};
use oscint_core::inverse_em::{em_estimate, em_profile};
use oscint_core::mi::{
    mi_contour, mi_exp_scaling, mi_inverse_map, mi_log_expansion, mi_longman, mi_partial_int,
    raw_integrand, Algorithm, HalfPeriodRule, MiEstimate,
};
use oscint_core::precision::{format_decimals, with_sign};
use oscint_core::series_accel::{mrb_constant, Method};
use oscint_core::{Complex, Error, PrecisionContext, Real, Result};

use crate::config::RunConfig;
use crate::report::Report;
use crate::{cache, tables, Command};

#[derive(Debug, Args)]
pub struct MrbArgs {
    /// direct, euler or cvz
    #[arg(long, default_value = "cvz")]
    pub method: Method,
    #[arg(long, default_value_t = 100)]
    pub terms: u64,
}

#[derive(Debug, Args)]
pub struct MiArgs {
    /// pi, invmap, esc, longman, logexp, contour or em
    #[arg(long)]
    pub alg: Algorithm,
    /// Partial-integration order, or number of log terms for logexp
    #[arg(long)]
    pub n: Option<u32>,
    /// Number of Simpson subintervals
    #[arg(long)]
    pub points: Option<u64>,
    /// Longman split point (odd), or Euler-Maclaurin offset for em
    #[arg(long)]
    pub m: Option<u32>,
    /// CVZ terms of the Longman series
    #[arg(long)]
    pub l: Option<u32>,
    /// Contour length parameter
    #[arg(long = "N")]
    pub big_n: Option<u64>,
    /// Contour slope
    #[arg(long)]
    pub tau: Option<String>,
    /// Half-period rule for longman: simpson or filon
    #[arg(long)]
    pub rule: Option<HalfPeriodRule>,
    /// Highest Euler-Maclaurin order for em
    #[arg(long)]
    pub dmax: Option<u32>,
}

#[derive(Debug, Args)]
pub struct VArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub s: u32,
    /// table, numeric or closed
    #[arg(long, default_value = "table")]
    pub route: String,
}

#[derive(Debug, Args)]
pub struct VtableArgs {
    #[arg(long, default_value_t = 6)]
    pub kmax: u32,
    #[arg(long, default_value_t = 8)]
    pub smax: u32,
    /// Anchor column for the telescoping (default smax + kmax + 1)
    #[arg(long)]
    pub shat: Option<u32>,
    /// Also write the table in cache format to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// alpha or beta
    #[arg(long, default_value = "alpha")]
    pub kind: String,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct EmArgs {
    #[arg(long, default_value_t = 12)]
    pub dmax: u32,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub id: String,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// raw or pi1
    #[arg(long, default_value = "raw")]
    pub which: String,
    #[arg(long, default_value = "1", allow_negative_numbers = true)]
    pub from: String,
    #[arg(long, default_value = "36", allow_negative_numbers = true)]
    pub to: String,
    #[arg(long, default_value = "0.01")]
    pub step: String,
}

/// Points above which a figure request is refused.
pub const MAX_FIGURE_POINTS: u64 = 1_000_000;

pub fn execute(command: &Command, config: &RunConfig) -> Result<Report> {
    let ctx = PrecisionContext::new(config.digits)?;
    match command {
        Command::Mrb(a) => mrb(&ctx, a),
        Command::Mi(a) => mi(&ctx, a, config),
        Command::V(a) => v(&ctx, a, config),
        Command::Vtable(a) => vtable(&ctx, a, config),
        Command::Coeffs(a) => coeffs(a),
        Command::Em(a) => em(&ctx, a),
        Command::Table(a) => tables::regenerate(&ctx, &a.id, config.full, config.compare, config.cache_path.as_deref()),
        Command::Figure(a) => figure(&ctx, a),
    }
}

fn dec(ctx: &PrecisionContext, x: &Real) -> String {
    format_decimals(x, ctx.digits() as usize)
}

fn re_im(ctx: &PrecisionContext, z: &Complex) -> [String; 2] {
    [dec(ctx, z.real()), with_sign(dec(ctx, z.imag()))]
}

fn mrb(ctx: &PrecisionContext, a: &MrbArgs) -> Result<Report> {
    let r = mrb_constant(ctx, a.method, a.terms)?;
    let mut report = Report::new("MRB constant", &["method", "terms", "value"]);
    report.push(vec![a.method.to_string(), a.terms.to_string(), dec(ctx, r.value.real())]);
    report.note(format!("digits={}", ctx.digits()));
    if r.non_monotone {
        report.note("leading term magnitudes are not monotone");
    }
    Ok(report)
}

fn mi(ctx: &PrecisionContext, a: &MiArgs, config: &RunConfig) -> Result<Report> {
    let est: MiEstimate = match a.alg {
        Algorithm::PartialInt => mi_partial_int(ctx, a.n.unwrap_or(6), a.points.unwrap_or(8000))?,
        Algorithm::InverseMap => mi_inverse_map(ctx, a.n.unwrap_or(6), a.points.unwrap_or(8000))?,
        Algorithm::ExpScaling => mi_exp_scaling(ctx, a.n.unwrap_or(6), a.points.unwrap_or(8000))?,
        Algorithm::Longman => mi_longman(
            ctx,
            a.m.unwrap_or(3),
            a.points.unwrap_or(1024),
            a.l.unwrap_or(70),
            a.rule.unwrap_or_default(),
        )?,
        Algorithm::LogExpansion => {
            let n = a.n.unwrap_or(9);
            let table = cache::load_or_build(ctx, config.cache_path.as_deref(), n, n)?;
            mi_log_expansion(ctx, n, &table)?
                .rows
                .pop()
                .ok_or_else(|| Error::InternalConsistency("empty log expansion".into()))?
        }
        Algorithm::Contour => {
            let tau = ctx.parse_real(a.tau.as_deref().unwrap_or("0.3"))?;
            mi_contour(ctx, a.points.unwrap_or(64000), a.big_n.unwrap_or(20), &tau)?
        }
        Algorithm::InverseEm => {
            let d = a.dmax.unwrap_or(7);
            let m = a.m.unwrap_or(1);
            let value = em_estimate(ctx, d, m)?;
            let mut report = Report::new("M_I", &["re", "im"]);
            report.push(re_im(ctx, &value).to_vec());
            report.note(format!("algorithm=em dmax={d} m={m}"));
            report.note(format!("digits={}", ctx.digits()));
            return Ok(report);
        }
    };
    let mut report = Report::new("M_I", &["re", "im"]);
    report.push(re_im(ctx, &est.value).to_vec());
    let params: Vec<String> = est.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    report.note(format!("algorithm={} {}", est.algorithm, params.join(" ")));
    report.note(format!("digits={}", ctx.digits()));
    for d in &est.diagnostics {
        report.note(d.clone());
    }
    Ok(report)
}

fn v(ctx: &PrecisionContext, a: &VArgs, config: &RunConfig) -> Result<Report> {
    let pi = ctx.pi();
    let entry = match a.route.as_str() {
        "table" => {
            let table = cache::load_or_build(ctx, config.cache_path.as_deref(), a.k, a.s)?;
            table
                .get(a.k, a.s)
                .cloned()
                .ok_or_else(|| Error::Dependency(format!("table has no entry for V(k={}, s={})", a.k, a.s)))?
        }
        "numeric" => {
            let n = v_numeric(ctx, &pi, a.k, a.s)?;
            VEntry {
                value: n.value,
                provenance: Provenance::Numeric,
                digits: n.digits,
            }
        }
        "closed" => {
            if a.k != 1 {
                return Err(Error::Parameter(format!(
                    "closed forms exist for k = 1 only, got k = {}",
                    a.k
                )));
            }
            let value = if a.s == 1 { v_closed_11(ctx, &pi)? } else { v_closed_1s(ctx, &pi, a.s)? };
            VEntry {
                value,
                provenance: Provenance::Closed,
                digits: ctx.working_digits(),
            }
        }
        other => return Err(Error::Config(format!("unknown route {other:?} (table, numeric, closed)"))),
    };
    let mut report = Report::new("V(pi,k,s)", &["k", "s", "re", "im", "digits", "provenance"]);
    let [re, im] = re_im(ctx, &entry.value);
    report.push(vec![
        a.k.to_string(),
        a.s.to_string(),
        re,
        im,
        entry.digits.min(ctx.digits()).to_string(),
        entry.provenance.to_string(),
    ]);
    report.note(format!("route={} digits={}", a.route, ctx.digits()));
    Ok(report)
}

fn vtable(ctx: &PrecisionContext, a: &VtableArgs, config: &RunConfig) -> Result<Report> {
    let table: VTable = match a.shat {
        Some(s_hat) => telescope_fill(ctx, a.kmax, a.smax, Some(s_hat))?,
        None => cache::load_or_build(ctx, config.cache_path.as_deref(), a.kmax, a.smax)?,
    };
    if let Some(out) = &a.out {
        cache::write(ctx, out, &table)?;
    }
    let mut report = Report::new("V(pi,k,s)", &["k", "s", "re", "im", "digits", "provenance"]);
    for (key, entry) in table.entries() {
        if key.k > a.kmax || key.s > a.smax {
            continue;
        }
        let [re, im] = re_im(ctx, &entry.value);
        report.push(vec![
            key.k.to_string(),
            key.s.to_string(),
            re,
            im,
            entry.digits.min(ctx.digits()).to_string(),
            entry.provenance.to_string(),
        ]);
    }
    report.note(format!(
        "kmax={} smax={} shat={} digits={}",
        a.kmax,
        a.smax,
        a.shat.unwrap_or(a.kmax + a.smax + 1),
        ctx.digits()
    ));
    Ok(report)
}

fn coeffs(a: &CoeffsArgs) -> Result<Report> {
    let kind = match a.kind.as_str() {
        "alpha" => TableKind::Alpha,
        "beta" => TableKind::Beta,
        other => return Err(Error::Config(format!("unknown coefficient kind {other:?} (alpha, beta)"))),
    };
    let table = coefficient_table(kind, a.n)?;
    let mut report = Report::new(format!("{} coefficients, n = {}", a.kind, a.n), &["r", "s", "coefficient"]);
    for (&(r, s), c) in table.entries() {
        if !c.is_zero() {
            report.push(vec![r.to_string(), s.to_string(), c.to_string()]);
        }
    }
    Ok(report)
}

fn em(ctx: &PrecisionContext, a: &EmArgs) -> Result<Report> {
    let reference = mi_longman(ctx, 3, 128, 60, HalfPeriodRule::FilonSimpson)?.value;
    let profile = em_profile(ctx, a.dmax, &reference)?;
    let mut report = Report::new("Inverted Euler-Maclaurin estimates", &["d", "re", "im", "abs_error"]);
    for row in &profile.rows {
        let [re, im] = re_im(ctx, &row.estimate);
        report.push(vec![row.d_max.to_string(), re, im, format_decimals(&row.abs_error, 12)]);
    }
    if let Some(best) = profile.best() {
        report.note(format!("smallest error at d = {}", best.d_max));
    }
    report.note(format!(
        "reference: longman m=3 points=128 l=60 rule=filon; digits={}",
        ctx.digits()
    ));
    Ok(report)
}

fn figure(ctx: &PrecisionContext, a: &FigureArgs) -> Result<Report> {
    let prec = ctx.prec();
    let from = ctx.parse_real(&a.from)?;
    let to = ctx.parse_real(&a.to)?;
    let step = ctx.parse_real(&a.step)?;
    if step <= 0 || to < from {
        return Err(Error::Parameter("need step > 0 and to >= from".into()));
    }
    if from <= 0 {
        return Err(Error::Domain(format!("the integrand needs x > 0, got from = {}", a.from)));
    }
    let span = Real::with_val(prec, &to - &from) / &step;
    // a tiny slack keeps the end point when to − from is a multiple of step
    let count = (span + 1e-20f64).floor().to_f64() as u64 + 1;
    if count > MAX_FIGURE_POINTS {
        return Err(Error::Parameter(format!("{count} samples requested, limit is {MAX_FIGURE_POINTS}")));
    }
    let (title, first_order) = match a.which.as_str() {
        "raw" => ("e^{i pi x} x^{1/x}", false),
        "pi1" => ("e^{i pi x} x^{1/x} (1 - log x)/x^2", true),
        other => return Err(Error::Config(format!("unknown figure {other:?} (raw, pi1)"))),
    };
    let x_decimals = tables::printed_decimals(&a.step).max(tables::printed_decimals(&a.from));
    let mut report = Report::new(title, &["x", "re", "im"]);
    for j in 0..count {
        let x = Real::with_val(prec, &step * j) + &from;
        let y = if first_order {
            let mut z = ctx.exp_i_pi(&x);
            z *= f_derivative(ctx, 1, &x)?;
            z
        } else {
            raw_integrand(ctx, &x)
        };
        let [re, im] = re_im(ctx, &y);
        report.push(vec![format_decimals(&x, x_decimals), re, im]);
    }
    Ok(report)
}
