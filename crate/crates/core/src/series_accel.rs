//! Summation and acceleration of alternating series Σ (−1)^k a_k.
//!
//! Callers supply the magnitudes a_k; the accelerators own the sign.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;

use crate::error::{Error, Result};
use crate::precision::{pow_self_root, Complex, PrecisionContext, Real};

/// Number of leading magnitudes inspected by the monotonicity diagnostic.
const DIAGNOSTIC_TERMS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Euler,
    Cvz,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "euler" => Ok(Self::Euler),
            "cvz" => Ok(Self::Cvz),
            other => Err(Error::Config(format!("unknown summation method {other:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Direct => "direct",
            Self::Euler => "euler",
            Self::Cvz => "cvz",
        })
    }
}

/// Σ_{k ≥ offset} (−1)^k term(k).
pub struct AlternatingSeries<F> {
    pub offset: u64,
    pub term: F,
}

impl<F> AlternatingSeries<F>
where
    F: Fn(u64) -> Complex,
{
    pub fn new(offset: u64, term: F) -> Self {
        Self { offset, term }
    }

    /// The j-th supplied magnitude, a_{offset+j}.
    fn magnitude(&self, j: u64) -> Complex {
        (self.term)(self.offset + j)
    }

    /// (−1)^offset
    fn leading_sign(&self) -> i32 {
        if self.offset.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Debug)]
pub struct AccelerationResult {
    pub value: Complex,
    pub terms_used: u64,
    pub method: Method,
    /// Set when the leading magnitudes changed sign or grew.
    pub non_monotone: bool,
}

/// Heuristic check that the leading magnitudes share one sign and decrease
/// in modulus. Leading exact zeros are skipped.
pub fn non_monotone(terms: &[Complex]) -> bool {
    let mut mags = terms
        .iter()
        .take(DIAGNOSTIC_TERMS)
        .skip_while(|t| t.is_zero())
        .map(|t| (t.real().is_sign_positive(), Real::with_val(t.prec().0, t.abs_ref())));
    let Some((sign, mut prev)) = mags.next() else {
        return false;
    };
    for (s, mag) in mags {
        if s != sign || mag > prev {
            return true;
        }
        prev = mag;
    }
    false
}

fn collect<F>(series: &AlternatingSeries<F>, count: u64) -> Vec<Complex>
where
    F: Fn(u64) -> Complex,
{
    (0..count).map(|j| series.magnitude(j)).collect()
}

/// Partial sum Σ_{k=offset}^{k_max} (−1)^k a_k.
pub fn direct_sum<F>(
    ctx: &PrecisionContext,
    series: &AlternatingSeries<F>,
    k_max: u64,
) -> Result<AccelerationResult>
where
    F: Fn(u64) -> Complex,
{
    if k_max < 1 || k_max < series.offset {
        return Err(Error::Parameter(format!(
            "direct sum needs k_max >= max(1, offset), got {k_max}"
        )));
    }
    let count = k_max - series.offset + 1;
    let terms = collect(series, count);
    let mut acc = ctx.zero();
    for (j, t) in terms.iter().enumerate() {
        if j % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc *= series.leading_sign();
    Ok(AccelerationResult {
        value: acc,
        terms_used: count,
        method: Method::Direct,
        non_monotone: non_monotone(&terms),
    })
}

/// Euler transform of the first k_max terms: the k_max partial sums are
/// averaged pairwise k_max − 1 times, i.e. Σ_j C(k_max−1, j) S_j / 2^{k_max−1}.
pub fn euler_accelerate<F>(
    ctx: &PrecisionContext,
    series: &AlternatingSeries<F>,
    k_max: u64,
) -> Result<AccelerationResult>
where
    F: Fn(u64) -> Complex,
{
    if k_max < 2 {
        return Err(Error::Parameter(format!(
            "Euler transform needs k_max >= 2, got {k_max}"
        )));
    }
    let terms = collect(series, k_max);
    let sign = series.leading_sign();
    let mut partial = ctx.zero();
    let mut sums = Vec::with_capacity(terms.len());
    for (j, t) in terms.iter().enumerate() {
        if (j % 2 == 0) == (sign > 0) {
            partial += t;
        } else {
            partial -= t;
        }
        sums.push(partial.clone());
    }
    while sums.len() > 1 {
        for i in 0..sums.len() - 1 {
            let (head, tail) = sums.split_at_mut(i + 1);
            head[i] += &tail[0];
            head[i] /= 2u32;
        }
        sums.pop();
    }
    Ok(AccelerationResult {
        value: sums.pop().expect("at least one partial sum"),
        terms_used: k_max,
        method: Method::Euler,
        non_monotone: non_monotone(&terms),
    })
}

/// Weights of the first Cohen–Rodriguez Villegas–Zagier algorithm for n
/// terms, already divided by d. Σ_{j<n} w_j a_j approximates Σ (−1)^j a_j.
#[derive(Clone, Debug)]
pub struct CvzWeights {
    weights: Vec<Real>,
}

impl CvzWeights {
    pub fn new(ctx: &PrecisionContext, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "CVZ acceleration needs at least 2 terms, got {n}"
            )));
        }
        // d grows like 5.83^n; carry enough extra bits that c_k/d keeps full precision
        let prec = ctx.prec() + (n as f64 * 2.55) as u32 + 16;
        let root8 = Real::with_val(prec, 8u32).sqrt();
        let mut d = (root8 + 3u32).pow(n);
        let inv = Real::with_val(prec, d.recip_ref());
        d += inv;
        d /= 2u32;
        let mut b = Real::with_val(prec, -1);
        let mut c = Real::with_val(prec, -&d);
        let mut weights = Vec::with_capacity(n as usize);
        let n = n as i64;
        for k in 0..n {
            c = Real::with_val(prec, &b - &c);
            let mut w = Real::with_val(prec, &c / &d);
            w.set_prec(ctx.prec());
            weights.push(w);
            // b ← (k+n)(k−n) b / ((k+½)(k+1))
            b *= 2 * (k + n) * (k - n);
            b /= (2 * k + 1) * (k + 1);
        }
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Real] {
        &self.weights
    }

    /// Σ_j w_j a_j in ascending order.
    pub fn apply(&self, ctx: &PrecisionContext, magnitudes: &[Complex]) -> Complex {
        let mut acc = ctx.zero();
        for (w, a) in self.weights.iter().zip(magnitudes) {
            acc += Complex::with_val(ctx.prec(), a * w);
        }
        acc
    }

    /// Σ_j w_j f(j), evaluating f in ascending order.
    pub fn apply_fn(&self, ctx: &PrecisionContext, mut f: impl FnMut(u64) -> Complex) -> Complex {
        let mut acc = ctx.zero();
        for (j, w) in self.weights.iter().enumerate() {
            let mut t = f(j as u64);
            t *= w;
            acc += &t;
        }
        acc
    }
}

/// First CVZ algorithm over the n_terms magnitudes a_offset, …
pub fn cvz_accelerate<F>(
    ctx: &PrecisionContext,
    series: &AlternatingSeries<F>,
    n_terms: u32,
) -> Result<AccelerationResult>
where
    F: Fn(u64) -> Complex,
{
    let weights = CvzWeights::new(ctx, n_terms)?;
    let terms = collect(series, n_terms as u64);
    let mut value = weights.apply(ctx, &terms);
    value *= series.leading_sign();
    Ok(AccelerationResult {
        value,
        terms_used: n_terms as u64,
        method: Method::Cvz,
        non_monotone: non_monotone(&terms),
    })
}

/// a_k = k^{1/k} − 1.
pub fn mrb_term(ctx: &PrecisionContext, k: u64) -> Complex {
    let x = ctx.real(k);
    let mut root = pow_self_root(ctx, &x).expect("k >= 1");
    root -= 1u32;
    ctx.complex(root)
}

/// The MRB constant Σ_{k≥1} (−1)^k (k^{1/k} − 1).
///
/// `direct` and `euler` use the terms k = 1..terms. `cvz` skips the vanishing
/// k = 1 term and weights terms+1 magnitudes starting at k = 2.
pub fn mrb_constant(
    ctx: &PrecisionContext,
    method: Method,
    terms: u64,
) -> Result<AccelerationResult> {
    if terms < 2 {
        return Err(Error::Parameter(format!(
            "MRB summation needs at least 2 terms, got {terms}"
        )));
    }
    let term = |k: u64| mrb_term(ctx, k);
    match method {
        Method::Direct => direct_sum(ctx, &AlternatingSeries::new(1, term), terms),
        Method::Euler => euler_accelerate(ctx, &AlternatingSeries::new(1, term), terms),
        Method::Cvz => {
            let n = u32::try_from(terms + 1)
                .map_err(|_| Error::Parameter(format!("too many CVZ terms: {terms}")))?;
            cvz_accelerate(ctx, &AlternatingSeries::new(2, term), n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::format_decimals;

    fn log2_series(ctx: &PrecisionContext) -> AlternatingSeries<impl Fn(u64) -> Complex + '_> {
        AlternatingSeries::new(0, move |k| {
            let v = Real::with_val(ctx.prec(), k + 1).recip();
            ctx.complex(v)
        })
    }

    fn err_vs(ctx: &PrecisionContext, z: &Complex, x: &Real) -> f64 {
        let d = Complex::with_val(ctx.prec(), z - x);
        d.abs().real().to_f64()
    }

    #[test]
    fn direct_partial_sums() {
        let ctx = PrecisionContext::new(40).unwrap();
        let r = mrb_constant(&ctx, Method::Direct, 10).unwrap();
        // printed values are truncated, not rounded
        let truncated = |z: &Complex| format_decimals(z.real(), 14)[..14].to_string();
        assert_eq!(truncated(&r.value), "0.313231759254");
        let r = mrb_constant(&ctx, Method::Direct, 100).unwrap();
        assert_eq!(truncated(&r.value), "0.211329543346");
        let zero = AlternatingSeries::new(1, |_| ctx.zero());
        let r = direct_sum(&ctx, &zero, 5).unwrap();
        assert!(r.value.is_zero());
        assert_eq!(r.terms_used, 5);
        assert!(!r.non_monotone);
    }

    #[test]
    fn log2_oracle() {
        let ctx = PrecisionContext::new(40).unwrap();
        let ln2 = Real::with_val(ctx.prec(), 2u32).ln();
        let s = log2_series(&ctx);
        let e = euler_accelerate(&ctx, &s, 30).unwrap();
        assert!(err_vs(&ctx, &e.value, &ln2) < 1e-10);
        let c = cvz_accelerate(&ctx, &s, 40).unwrap();
        assert!(err_vs(&ctx, &c.value, &ln2) < 1e-25);
        assert!(!c.non_monotone);
    }

    #[test]
    fn odd_offset_sign() {
        let ctx = PrecisionContext::new(40).unwrap();
        // Σ_{k≥1} (−1)^k / k = −ln 2
        let s = AlternatingSeries::new(1, |k| ctx.complex(Real::with_val(ctx.prec(), k).recip()));
        let ln2 = -Real::with_val(ctx.prec(), 2u32).ln();
        assert!(err_vs(&ctx, &cvz_accelerate(&ctx, &s, 40).unwrap().value, &ln2) < 1e-25);
        assert!(err_vs(&ctx, &euler_accelerate(&ctx, &s, 40).unwrap().value, &ln2) < 1e-12);
    }

    #[test]
    fn finite_series_agree() {
        let ctx = PrecisionContext::new(40).unwrap();
        let s = AlternatingSeries::new(0, |k| match k {
            0 => ctx.complex(3),
            1 => ctx.complex(2),
            2 => ctx.complex(1),
            _ => ctx.zero(),
        });
        let d = direct_sum(&ctx, &s, 2).unwrap().value;
        assert_eq!(*d.real(), 2);
        // binomial averaging of partial sums 3,1,2 → (3+2+2)/4 = 7/4, not 2; Euler
        // only agrees after enough trailing zero terms.
        let e = euler_accelerate(&ctx, &s, 200).unwrap().value;
        assert!(err_vs(&ctx, &e, &ctx.real(2)) < 1e-50);
        let c = cvz_accelerate(&ctx, &s, 80).unwrap().value;
        assert!(err_vs(&ctx, &c, &ctx.real(2)) < 1e-50);
    }

    #[test]
    fn mrb_rows() {
        let ctx = PrecisionContext::new(70).unwrap();
        let e = mrb_constant(&ctx, Method::Euler, 20).unwrap();
        assert_eq!(
            format_decimals(e.value.real(), 55),
            format_decimals(&ctx.parse_real("0.187859649854050194658445181421685949965109596411421113134589").unwrap(), 55)
        );
        let c = mrb_constant(&ctx, Method::Cvz, 40).unwrap();
        assert_eq!(
            format_decimals(c.value.real(), 55),
            format_decimals(&ctx.parse_real("0.187859642462067120248517934054273140023454509840554949525330").unwrap(), 55)
        );
        assert_eq!(c.terms_used, 41);
        assert!(c.non_monotone, "3^(1/3) > 2^(1/2)");
    }

    #[test]
    fn weights_are_reusable() {
        let ctx = PrecisionContext::new(40).unwrap();
        let w = CvzWeights::new(&ctx, 30).unwrap();
        assert_eq!(w.len(), 30);
        let s = log2_series(&ctx);
        let via_fn = w.apply_fn(&ctx, |j| (s.term)(j));
        let via_slice = w.apply(&ctx, &collect(&s, 30));
        assert_eq!(via_fn, via_slice);
        assert!(CvzWeights::new(&ctx, 1).is_err());
        assert!(mrb_constant(&ctx, Method::Cvz, 1).is_err());
    }
}
