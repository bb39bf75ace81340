//! One-sided Fourier–Euler–Maclaurin estimate of M_I from the moments of
//! the Filon quadrature, S(d) = ∫₋₁¹ e^{iπy} y^d dy.

use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};
use crate::integrand::f_derivative;
use crate::precision::{bernoulli, Complex, PrecisionContext, Real};

/// Largest truncation order accepted by [`em_estimate`].
pub const MAX_EM_ORDER: u32 = 20;

#[derive(Clone, Debug)]
pub struct MomentTable {
    pub max_d: u32,
    /// S(0..=max_d)
    pub s: Vec<Complex>,
    /// S̄(d) = S(d)/d!
    pub s_bar: Vec<Complex>,
}

impl MomentTable {
    pub fn s_bar(&self, d: u32) -> &Complex {
        &self.s_bar[d as usize]
    }
}

/// S̄(d) from the closed forms for odd and even index.
pub fn s_bar_closed(ctx: &PrecisionContext, d: u32) -> Complex {
    let prec = ctx.prec();
    let pi = ctx.pi();
    let pi2 = Real::with_val(prec, pi.square_ref());
    if d == 0 {
        return ctx.zero();
    }
    let half = d / 2;
    // Σ_{j=0}^{top} (−π²)^j/(2j+1)!
    let top = if d % 2 == 1 { half + 1 } else { half };
    let mut term = ctx.real(1);
    let mut sum = ctx.real(0);
    for j in 0..top {
        sum += &term;
        term *= &pi2;
        term /= (2 * j + 2) * (2 * j + 3);
        term = -term;
    }
    let mut scale = Real::with_val(prec, (&pi).pow(d)).recip() * 2u32;
    if half % 2 == 1 {
        scale = -scale;
    }
    sum *= scale;
    if d % 2 == 1 {
        ctx.complex((0, sum))
    } else {
        ctx.complex(sum)
    }
}

/// S(0) = 0, S(1) = 2i/π, S(d+1) = (i/π)[(1 + (−1)^d) + (d+1)S(d)], checked
/// against the closed forms of S̄.
pub fn moments(ctx: &PrecisionContext, max_d: u32) -> Result<MomentTable> {
    if max_d < 1 {
        return Err(Error::Parameter("moment table needs max_d >= 1".into()));
    }
    let prec = ctx.prec();
    let i_pi = ctx.i_over_pi();
    let mut s = vec![ctx.zero(), Complex::with_val(prec, &i_pi * 2u32)];
    for d in 1..max_d {
        let mut next = Complex::with_val(prec, &s[d as usize] * (d + 1));
        if d % 2 == 0 {
            next += 2u32;
        }
        next *= &i_pi;
        s.push(next);
    }
    let mut s_bar = Vec::with_capacity(s.len());
    let tol = Real::with_val(prec, 10u32).pow(-(ctx.working_digits() as i32 - 5));
    for (d, sd) in s.iter().enumerate() {
        let fact = Integer::from(Integer::factorial(d as u32));
        let bar = Complex::with_val(prec, sd / &fact);
        let closed = s_bar_closed(ctx, d as u32);
        let gap = Complex::with_val(prec, &bar - &closed).abs().real().clone();
        if gap > tol {
            return Err(Error::InternalConsistency(format!(
                "moment S({d}) recurrence and closed form differ by {:e}",
                gap.to_f64()
            )));
        }
        s_bar.push(bar);
    }
    Ok(MomentTable { max_d, s, s_bar })
}

/// Coefficient of g^{(d)}(m+1):
/// S̄(d) − S̄(d+1) − Σ_{l=0}^{⌊(d−1)/2⌋} S̄(d−1−2l) B_{2+2l} 2^{2+2l}/(2+2l)!.
fn em_coefficient(ctx: &PrecisionContext, table: &MomentTable, d: u32) -> Complex {
    let prec = ctx.prec();
    let mut c = Complex::with_val(prec, table.s_bar(d) - table.s_bar(d + 1));
    for l in 0..=(d - 1) / 2 {
        let q = 2 + 2 * l;
        let fact = Integer::from(Integer::factorial(q));
        let mut b = bernoulli(ctx, q);
        b <<= q;
        b /= &fact;
        c -= Complex::with_val(prec, table.s_bar(d - 1 - 2 * l) * &b);
    }
    c
}

/// M_I = (i/π)(F − 2) with 2(−1)^{m+1}F = −S̄(1)g(m+1) + Σ_{d=1}^{d_max} c_d g^{(d)}(m+1),
/// g = f'.
pub fn em_estimate(ctx: &PrecisionContext, d_max: u32, m: u32) -> Result<Complex> {
    if !(1..=MAX_EM_ORDER).contains(&d_max) {
        return Err(Error::Parameter(format!(
            "Euler-Maclaurin order must be in 1..={MAX_EM_ORDER}, got {d_max}"
        )));
    }
    if m < 1 {
        return Err(Error::Parameter("Euler-Maclaurin start m must be >= 1".into()));
    }
    let prec = ctx.prec();
    let table = moments(ctx, d_max + 1)?;
    let x = ctx.real(m + 1);
    let mut total = -Complex::with_val(prec, table.s_bar(1) * f_derivative(ctx, 1, &x)?);
    for d in 1..=d_max {
        let mut t = em_coefficient(ctx, &table, d);
        t *= f_derivative(ctx, d + 1, &x)?;
        total += &t;
    }
    total /= 2u32;
    if m.is_multiple_of(2) {
        total = -total;
    }
    total -= 2u32;
    total *= ctx.i_over_pi();
    Ok(total)
}

#[derive(Clone, Debug)]
pub struct EmRow {
    pub d_max: u32,
    pub estimate: Complex,
    pub abs_error: Real,
}

#[derive(Clone, Debug)]
pub struct EmProfile {
    pub rows: Vec<EmRow>,
}

impl EmProfile {
    /// Row with the smallest error.
    pub fn best(&self) -> Option<&EmRow> {
        self.rows.iter().min_by(|a, b| a.abs_error.total_cmp(&b.abs_error))
    }
}

/// Errors of em_estimate(d, m = 1) against `reference` for d = 1..=d_limit.
pub fn em_profile(ctx: &PrecisionContext, d_limit: u32, reference: &Complex) -> Result<EmProfile> {
    if !(8..=MAX_EM_ORDER).contains(&d_limit) {
        return Err(Error::Parameter(format!(
            "profile limit must be in 8..={MAX_EM_ORDER}, got {d_limit}"
        )));
    }
    let mut rows = Vec::with_capacity(d_limit as usize);
    for d in 1..=d_limit {
        let estimate = em_estimate(ctx, d, 1)?;
        let abs_error = Complex::with_val(ctx.prec(), &estimate - reference)
            .abs()
            .real()
            .clone();
        rows.push(EmRow {
            d_max: d,
            estimate,
            abs_error,
        });
    }
    Ok(EmProfile { rows })
}
