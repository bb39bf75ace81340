//! Evaluators of M_I = lim_{N→∞} ∫₁^{2N} e^{iπx} x^{1/x} dx.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fichtenholz::{telescope_fill, VTable};
use crate::integrand::{
    alpha_table, beta_table, boundary_terms, f_derivative_with, i_over_pi_pow, inverse_map_with,
    mapped_esc_with, mapped_pi_with,
};
use crate::precision::{pow_self_root, Complex, PrecisionContext, Real};
use crate::quadrature::{
    filon_simpson_composite, gauss_legendre_composite, simpson_composite, simpson_multiplier,
};
use crate::series_accel::{non_monotone, CvzWeights};

/// Orders accepted by the partial-integration algorithms.
pub const MAX_LADDER_ORDER: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    PartialInt,
    InverseMap,
    ExpScaling,
    Longman,
    LogExpansion,
    Contour,
    InverseEm,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Self::PartialInt => "pi",
            Self::InverseMap => "invmap",
            Self::ExpScaling => "esc",
            Self::Longman => "longman",
            Self::LogExpansion => "logexp",
            Self::Contour => "contour",
            Self::InverseEm => "em",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pi" => Self::PartialInt,
            "invmap" => Self::InverseMap,
            "esc" => Self::ExpScaling,
            "longman" => Self::Longman,
            "logexp" => Self::LogExpansion,
            "contour" => Self::Contour,
            "em" => Self::InverseEm,
            other => return Err(Error::Config(format!("unknown algorithm {other:?}"))),
        })
    }
}

/// Rule used on the half period in the Longman evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum HalfPeriodRule {
    /// Plain composite Simpson of e^{iπy} G(y); reproduces the published table.
    #[default]
    Simpson,
    /// Filon–Simpson with e^{iπy} integrated exactly, on the same nodes.
    FilonSimpson,
}

impl FromStr for HalfPeriodRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simpson" => Ok(Self::Simpson),
            "filon" | "filon_simpson" => Ok(Self::FilonSimpson),
            other => Err(Error::Config(format!("unknown half-period rule {other:?}"))),
        }
    }
}

impl fmt::Display for HalfPeriodRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Simpson => "simpson",
            Self::FilonSimpson => "filon",
        })
    }
}

/// One estimate of M_I together with the knobs that produced it.
#[derive(Clone, Debug)]
pub struct MiEstimate {
    pub value: Complex,
    pub algorithm: Algorithm,
    pub params: Vec<(String, String)>,
    pub diagnostics: Vec<String>,
}

impl MiEstimate {
    fn new(value: Complex, algorithm: Algorithm, params: &[(&str, String)]) -> Self {
        Self {
            value,
            algorithm,
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            diagnostics: Vec::new(),
        }
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConvergenceReport {
    pub caption: String,
    pub rows: Vec<MiEstimate>,
}

fn check_even(subintervals: u64) -> Result<()> {
    if subintervals < 2 || !subintervals.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "need an even number of subintervals >= 2, got {subintervals}"
        )));
    }
    Ok(())
}

fn check_order(n: u32, min: u32) -> Result<()> {
    if n < min || n > MAX_LADDER_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: format!("supported orders are {min}..={MAX_LADDER_ORDER}"),
        });
    }
    Ok(())
}

/// e^{iπx} x^{1/x}
pub fn raw_integrand(ctx: &PrecisionContext, x: &Real) -> Complex {
    let amp = pow_self_root(ctx, x).expect("x > 0 on the integration path");
    let mut z = ctx.exp_i_pi(x);
    z *= &amp;
    z
}

/// Composite Simpson value of ∫_{x0}^{x1} e^{iπx} x^{1/x} dx.
pub fn finite_segment(
    ctx: &PrecisionContext,
    x0: &Real,
    x1: &Real,
    subintervals: u64,
) -> Result<Complex> {
    if *x0 < 1 {
        return Err(Error::Parameter(format!(
            "finite segment needs x0 >= 1, got {}",
            x0.to_f64()
        )));
    }
    if x1 <= x0 {
        return Err(Error::Parameter("finite segment needs x1 > x0".into()));
    }
    check_even(subintervals)?;
    Ok(simpson_composite(ctx, |x| raw_integrand(ctx, x), x0, x1, subintervals)?.value)
}

/// Gauss–Legendre order giving full working precision on panels of width ½
/// for integrands analytic in a neighbourhood of the panel.
pub fn default_gauss_order(ctx: &PrecisionContext) -> u32 {
    ctx.working_digits() / 2 + 12
}

/// ∫_{x0}^{x1} e^{iπx} x^{1/x} dx by composite Gauss–Legendre on panels of
/// width at most ½.
pub fn finite_segment_gauss(ctx: &PrecisionContext, x0: &Real, x1: &Real) -> Result<Complex> {
    if *x0 < 1 || x1 <= x0 {
        return Err(Error::Parameter("finite segment needs 1 <= x0 < x1".into()));
    }
    let panels = (Real::with_val(ctx.prec(), x1 - x0).to_f64() * 2.0).ceil().max(1.0) as u64;
    Ok(gauss_legendre_composite(
        ctx,
        |x| raw_integrand(ctx, x),
        x0,
        x1,
        panels,
        default_gauss_order(ctx),
    )?
    .value)
}

/// b(n) + (i/π)^n ∫₀^{1/2} e^{iπx} f^{(n)}(x) / y² dy, x = 1/y − 1.
pub fn mi_partial_int(ctx: &PrecisionContext, n: u32, subintervals: u64) -> Result<MiEstimate> {
    check_order(n, 2)?;
    check_even(subintervals)?;
    let table = alpha_table(n)?;
    let half = ctx.real(0.5);
    let q = simpson_composite(ctx, |y| mapped_pi_with(ctx, &table, y), &ctx.real(0), &half, subintervals)?;
    let mut value = Complex::with_val(ctx.prec(), &q.value * &i_over_pi_pow(ctx, n));
    value += &boundary_terms(ctx, n)?.value;
    Ok(MiEstimate::new(
        value,
        Algorithm::PartialInt,
        &[("n", n.to_string()), ("s", subintervals.to_string())],
    ))
}

/// b(n) + (i/π)^n ∫₀¹ e^{iπ/u} f^{(n)}(1/u) / u² du.
pub fn mi_inverse_map(ctx: &PrecisionContext, n: u32, subintervals: u64) -> Result<MiEstimate> {
    check_order(n, 2)?;
    check_even(subintervals)?;
    let table = alpha_table(n)?;
    let q = simpson_composite(
        ctx,
        |u| inverse_map_with(ctx, &table, u),
        &ctx.real(0),
        &ctx.real(1),
        subintervals,
    )?;
    let mut value = Complex::with_val(ctx.prec(), &q.value * &i_over_pi_pow(ctx, n));
    value += &boundary_terms(ctx, n)?.value;
    Ok(MiEstimate::new(
        value,
        Algorithm::InverseMap,
        &[("n", n.to_string()), ("s", subintervals.to_string())],
    ))
}

/// Boundary value (i(−1)^m/π) m^{1/m} (1 − log m)/m² of the first partial
/// integration of F_m at x = m.
pub fn first_boundary_at(ctx: &PrecisionContext, m: u32) -> Complex {
    let x = ctx.real(m);
    let g = f_derivative_with(ctx, &alpha_table(1).expect("order 1"), &x);
    let mut v = Complex::with_val(ctx.prec(), &ctx.i_over_pi() * &g);
    if m % 2 == 1 {
        v = -v;
    }
    v
}

/// M_I = −2i/π + (i/π) F₁ with
/// F₁ = Σ_{j<n} (i/π)^j (−i/π) h_j(0) + (i/π)^n ∫₀¹ e^{iπ/u} h_n(−log u) u^{−2} du.
pub fn mi_exp_scaling(ctx: &PrecisionContext, n: u32, subintervals: u64) -> Result<MiEstimate> {
    check_order(n, 1)?;
    check_even(subintervals)?;
    let prec = ctx.prec();
    let i_pi = ctx.i_over_pi();
    let minus_i_pi = Complex::with_val(prec, -&i_pi);

    let mut boundary = ctx.zero();
    let mut power = ctx.complex(1);
    for j in 0..n {
        let h0 = beta_table(j)?.sum_log_free();
        let mut term = Complex::with_val(prec, &power * &minus_i_pi);
        term *= &h0;
        if j == 0 {
            let explicit = first_boundary_at(ctx, 1);
            let gap = Complex::with_val(prec, &term - &explicit).abs().real().clone();
            if gap > ctx.epsilon() * 16u32 {
                return Err(Error::InternalConsistency(format!(
                    "z = 0 boundary term disagrees with the m = 1 formula by {}",
                    gap.to_f64()
                )));
            }
        }
        boundary += &term;
        power *= &i_pi;
    }

    let table = beta_table(n)?;
    let q = simpson_composite(
        ctx,
        |u| mapped_esc_with(ctx, &table, u),
        &ctx.real(0),
        &ctx.real(1),
        subintervals,
    )?;
    let mut f1 = Complex::with_val(prec, &q.value * &power);
    f1 += &boundary;
    let mut value = Complex::with_val(prec, &f1 * &i_pi);
    value -= Complex::with_val(prec, &i_pi * 2u32);
    Ok(MiEstimate::new(
        value,
        Algorithm::ExpScaling,
        &[("n", n.to_string()), ("s", subintervals.to_string())],
    ))
}

/// Longman evaluator with split point m (odd, ≥ 3): the integral over [1, m]
/// is done by Gauss–Legendre, the half-period integral of the CVZ-summed
/// alternating series Σ (−1)^l g(m+l+y), g = f', by `rule` on `subintervals`.
pub fn mi_longman(
    ctx: &PrecisionContext,
    m: u32,
    subintervals: u64,
    l_terms: u32,
    rule: HalfPeriodRule,
) -> Result<MiEstimate> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "Longman split point must be odd and >= 3, got {m}"
        )));
    }
    if l_terms < 4 {
        return Err(Error::Parameter(format!(
            "Longman needs at least 4 series terms, got {l_terms}"
        )));
    }
    check_even(subintervals)?;
    let prec = ctx.prec();
    let g_table = alpha_table(1)?;
    let weights = CvzWeights::new(ctx, l_terms)?;
    let g = |x: &Real| ctx.complex(f_derivative_with(ctx, &g_table, x));
    let series_at = |y: &Real| {
        weights.apply_fn(ctx, |l| {
            let mut x = Real::with_val(prec, y + (m as u64 + l));
            x.set_prec(prec);
            g(&x)
        })
    };

    let mut diagnostics = Vec::new();
    let probe: Vec<Complex> = (0..16u64).map(|l| g(&ctx.real(m as u64 + l))).collect();
    if non_monotone(&probe) {
        diagnostics.push(format!(
            "l-series magnitudes g({m}+l) are not positive and decreasing"
        ));
    }

    let (zero, one) = (ctx.real(0), ctx.real(1));
    let half_period = match rule {
        HalfPeriodRule::Simpson => simpson_composite(
            ctx,
            |y| {
                let mut v = series_at(y);
                v *= ctx.exp_i_pi(y);
                v
            },
            &zero,
            &one,
            subintervals,
        )?,
        HalfPeriodRule::FilonSimpson => {
            filon_simpson_composite(ctx, series_at, &zero, &one, subintervals / 2)?
        }
    };
    let mut f_m = half_period.value;
    if m % 2 == 1 {
        f_m = -f_m;
    }

    let i_pi = ctx.i_over_pi();
    let base = finite_segment_gauss(ctx, &ctx.real(1), &ctx.real(m))?;
    let mut root = pow_self_root(ctx, &ctx.real(m))?;
    if m % 2 == 1 {
        root = -root;
    }
    root -= 1u32;
    let mut value = base;
    value += Complex::with_val(prec, &i_pi * &root);
    value += Complex::with_val(prec, &i_pi * &f_m);
    let mut est = MiEstimate::new(
        value,
        Algorithm::Longman,
        &[
            ("m", m.to_string()),
            ("n", subintervals.to_string()),
            ("l", l_terms.to_string()),
            ("rule", rule.to_string()),
        ],
    );
    est.diagnostics = diagnostics;
    Ok(est)
}

/// Largest truncation accepted by [`mi_log_expansion`].
pub const MAX_LOG_TERMS: u32 = 15;

/// Partial sums −2i/π + Σ_{n=1}^{N} V(π,n,n)/n! for N = 1..=n_max.
pub fn mi_log_expansion(ctx: &PrecisionContext, n_max: u32, table: &VTable) -> Result<ConvergenceReport> {
    if !(1..=MAX_LOG_TERMS).contains(&n_max) {
        return Err(Error::Parameter(format!(
            "log expansion order must be in 1..={MAX_LOG_TERMS}, got {n_max}"
        )));
    }
    let prec = ctx.prec();
    let mut sum = Complex::with_val(prec, &ctx.i_over_pi() * -2i32);
    let mut factorial = ctx.real(1);
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        factorial *= n;
        let v = table.value(n, n)?;
        sum += Complex::with_val(prec, v / &factorial);
        let mut est = MiEstimate::new(sum.clone(), Algorithm::LogExpansion, &[("n_max", n.to_string())]);
        if let Some(entry) = table.get(n, n) {
            if n > 9 {
                est.diagnostics.push(format!(
                    "V(pi,{n},{n}) carries an estimated {} digits",
                    entry.digits
                ));
            }
        }
        rows.push(est);
    }
    Ok(ConvergenceReport {
        caption: "Convergence of the partial sums of the logarithmic expansion".into(),
        rows,
    })
}

/// Telescoped table holding V(π,n,n) for n ≤ n_max.
pub fn log_expansion_table(ctx: &PrecisionContext, n_max: u32) -> Result<VTable> {
    telescope_fill(ctx, n_max, n_max, None)
}

/// −i/π + Simpson along z_j = 1 + j(1+τi)Δt, Δt = (2N−1)/s, of
/// e^{iπz + log z / z}. The far-end node is given its N → ∞ limit 0.
pub fn mi_contour(
    ctx: &PrecisionContext,
    subintervals: u64,
    big_n: u64,
    tau: &Real,
) -> Result<MiEstimate> {
    if *tau <= 0 {
        return Err(Error::Parameter(format!(
            "contour slope tau must be positive, got {}",
            tau.to_f64()
        )));
    }
    if big_n < 1 {
        return Err(Error::Parameter("contour needs N >= 1".into()));
    }
    check_even(subintervals)?;
    let prec = ctx.prec();
    let direction = ctx.complex((1, tau.clone()));
    let mut step = Complex::with_val(prec, &direction * (2 * big_n - 1));
    step /= subintervals;
    let mut acc = ctx.zero();
    for j in 0..subintervals {
        let mut z = Complex::with_val(prec, &step * j);
        z += 1u32;
        let log_z = Complex::with_val(prec, z.ln_ref());
        let mut v = Complex::with_val(prec, &log_z / &z).exp();
        v *= ctx.exp_i_pi_complex(&z);
        v *= simpson_multiplier(j, subintervals);
        acc += &v;
    }
    acc *= &step;
    acc /= 3u32;
    acc -= ctx.i_over_pi();
    Ok(MiEstimate::new(
        acc,
        Algorithm::Contour,
        &[
            ("s", subintervals.to_string()),
            ("N", big_n.to_string()),
            ("tau", crate::precision::format_significant(tau, 6)),
        ],
    ))
}

/// (i/π) e^{2πiN(1+iτ)}, the size of the contribution a finite N misses.
pub fn contour_tail_estimate(ctx: &PrecisionContext, big_n: &Real, tau: &Real) -> Complex {
    let prec = ctx.prec();
    let two_n = Real::with_val(prec, big_n * 2u32);
    let mut phase = ctx.exp_i_pi(&two_n);
    let damping = Real::with_val(prec, -(Real::with_val(prec, &two_n * tau) * ctx.pi())).exp();
    phase *= &damping;
    phase *= &ctx.i_over_pi();
    phase
}
