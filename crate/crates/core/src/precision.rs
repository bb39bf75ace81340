//! Configurable-precision scalars, constants and Bernoulli numbers.
//!
//! All arithmetic is carried by MPFR floats. A [`PrecisionContext`] fixes the
//! number of decimal digits that are displayed and compared, plus a number of
//! guard digits that are only used internally.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rug::float::{Constant as MpfrConstant, Round};
use rug::ops::{CompleteRound, Pow};
use rug::{Assign, Integer, Rational};

use crate::error::{Error, Result};

/// Arbitrary-precision real scalar.
pub type Real = rug::Float;
/// Arbitrary-precision complex scalar.
pub type Complex = rug::Complex;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Display and working precision shared by every computation of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    guard_digits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            digits: Self::DEFAULT_DIGITS,
            guard_digits: Self::DEFAULT_GUARD_DIGITS,
        }
    }
}

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 30;
    pub const DEFAULT_DIGITS: u32 = 50;
    pub const DEFAULT_GUARD_DIGITS: u32 = 10;

    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, Self::DEFAULT_GUARD_DIGITS)
    }

    pub fn with_guard(digits: u32, guard_digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::Config(format!(
                "{digits} digits requested, at least {} are required",
                Self::MIN_DIGITS
            )));
        }
        if guard_digits == 0 {
            return Err(Error::Config("guard digits must be positive".into()));
        }
        Ok(Self {
            digits,
            guard_digits,
        })
    }

    /// Significant decimal digits used for display and comparisons.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Decimal digits carried internally.
    pub fn working_digits(&self) -> u32 {
        self.digits + self.guard_digits
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        (self.working_digits() as f64 * BITS_PER_DIGIT).ceil() as u32 + 4
    }

    /// Relative size of one unit in the last working bit.
    pub fn epsilon(&self) -> Real {
        Real::with_val(self.prec(), Real::u_exp(1, 1 - self.prec() as i32))
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Real: Assign<T>,
    {
        Real::with_val(self.prec(), value)
    }

    pub fn complex<T>(&self, value: T) -> Complex
    where
        Complex: Assign<T>,
    {
        Complex::with_val(self.prec(), value)
    }

    pub fn zero(&self) -> Complex {
        Complex::new(self.prec())
    }

    /// The imaginary unit.
    pub fn i(&self) -> Complex {
        self.complex((0, 1))
    }

    pub fn pi(&self) -> Real {
        Real::with_val(self.prec(), MpfrConstant::Pi)
    }

    /// i/pi, the factor produced by every partial integration against e^{i pi x}.
    pub fn i_over_pi(&self) -> Complex {
        let inv = Real::with_val(self.prec(), self.pi().recip_ref());
        self.complex((0, inv))
    }

    pub fn constant(&self, name: Constant) -> Real {
        let prec = self.prec();
        match name {
            Constant::Pi => self.pi(),
            Constant::EulerGamma => Real::with_val(prec, MpfrConstant::Euler),
            Constant::Zeta3 => Real::with_val(prec, Real::zeta_u(3)),
        }
    }

    /// Parses a decimal string at working precision.
    pub fn parse_real(&self, text: &str) -> Result<Real> {
        let parsed = Real::parse(text.trim())
            .map_err(|e| Error::Parse {
                line: 0,
                message: format!("invalid decimal {text:?}: {e}"),
            })?;
        Ok(parsed.complete(self.prec()))
    }

    /// e^{i pi x}. The argument is reduced modulo 2 exactly before the
    /// trigonometric evaluation, so large x lose no accuracy.
    pub fn exp_i_pi(&self, x: &Real) -> Complex {
        let prec = self.prec();
        let reduced = reduce_mod2(x);
        let angle = Real::with_val(prec, &reduced * &self.pi());
        let (sin, cos) = angle.sin_cos(Real::new(prec));
        Complex::with_val(prec, (cos, sin))
    }

    /// e^{i pi x} for complex x.
    pub fn exp_i_pi_complex(&self, z: &Complex) -> Complex {
        let prec = self.prec();
        let pi = self.pi();
        let modulus = (-Real::with_val(prec, z.imag() * &pi)).exp();
        let mut rotation = self.exp_i_pi(z.real());
        rotation *= &modulus;
        rotation
    }
}

/// x - 2 floor(x/2), computed without rounding.
fn reduce_mod2(x: &Real) -> Real {
    let mut half = Real::with_val(x.prec().max(64), x / 2u32);
    half.floor_mut();
    half *= 2u32;
    let mut reduced = Real::with_val(x.prec().max(64), x - &half);
    reduced.set_prec(x.prec());
    reduced
}

/// `make_context(digits)`; digits below 30 are a configuration error.
pub fn make_context(digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(digits)
}

/// Named constants available at working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    EulerGamma,
    Zeta3,
}

impl FromStr for Constant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" => Ok(Self::Pi),
            "euler_gamma" | "gamma" => Ok(Self::EulerGamma),
            "zeta3" => Ok(Self::Zeta3),
            other => Err(Error::Config(format!("unknown constant {other:?}"))),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pi => "pi",
            Self::EulerGamma => "euler_gamma",
            Self::Zeta3 => "zeta3",
        })
    }
}

/// Looks a constant up by name.
pub fn constant(ctx: &PrecisionContext, name: &str) -> Result<Real> {
    Ok(ctx.constant(name.parse()?))
}

static BERNOULLI_CACHE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Exact Bernoulli number B_n (B_1 = -1/2 convention).
pub fn bernoulli_rational(n: u32) -> Rational {
    let mut cache = BERNOULLI_CACHE.lock().expect("bernoulli cache poisoned");
    while cache.len() <= n as usize {
        let m = cache.len() as u32;
        if m == 0 {
            cache.push(Rational::from(1));
            continue;
        }
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut acc = Rational::new();
        for (k, b) in cache.iter().enumerate() {
            let binom = Integer::from(Integer::binomial_u(m + 1, k as u32));
            acc += Rational::from(b * binom);
        }
        acc /= m + 1;
        cache.push(-acc);
    }
    cache[n as usize].clone()
}

/// B_n rendered at working precision.
pub fn bernoulli(ctx: &PrecisionContext, n: u32) -> Real {
    ctx.real(&bernoulli_rational(n))
}

/// x^{1/x} = exp(log(x)/x).
pub fn pow_self_root(ctx: &PrecisionContext, x: &Real) -> Result<Real> {
    if *x <= 0 {
        return Err(Error::Domain(format!(
            "x^(1/x) requires x > 0, got {}",
            x.to_f64()
        )));
    }
    let ln = Real::with_val(ctx.prec(), x.ln_ref());
    Ok((ln / x).exp())
}

/// Fixed-point rendering with exactly `decimals` digits after the point.
pub fn format_decimals(x: &Real, decimals: usize) -> String {
    let scale = Integer::from(10u32).pow(decimals as u32);
    let scaled = Real::with_val(x.prec() + 64, x * &scale);
    let (mut int, _) = scaled
        .to_integer_round(Round::Nearest)
        .unwrap_or_else(|| (Integer::new(), std::cmp::Ordering::Equal));
    let negative = int < 0 || (int == 0 && x.is_sign_negative() && !x.is_zero());
    int.abs_mut();
    let mut digits = int.to_string();
    if digits.len() <= decimals {
        digits = format!("{}{digits}", "0".repeat(decimals + 1 - digits.len()));
    }
    let split = digits.len() - decimals;
    let sign = if negative && int != 0 { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{digits}")
    } else {
        format!("{sign}{}.{}", &digits[..split], &digits[split..])
    }
}

/// Number of digits after the decimal point needed to show `significant`
/// significant digits of x.
pub fn decimals_for_significant(x: &Real, significant: usize) -> usize {
    if x.is_zero() || !x.is_finite() {
        return significant;
    }
    let magnitude = Real::with_val(64, x.abs_ref()).log10().floor().to_f64() as i64;
    (significant as i64 - 1 - magnitude).max(0) as usize
}

/// Fixed-point rendering with `significant` significant digits, never using
/// exponent notation.
pub fn format_significant(x: &Real, significant: usize) -> String {
    format_decimals(x, decimals_for_significant(x, significant))
}

/// Explicit '+' or '-' prefix, used for imaginary parts.
pub fn with_sign(text: String) -> String {
    if text.starts_with('-') {
        text
    } else {
        format!("+{text}")
    }
}

/// "re im" rendering at `significant` digits, the imaginary part always signed.
pub fn format_complex(z: &Complex, significant: usize) -> String {
    format!(
        "{} {}",
        format_significant(z.real(), significant),
        with_sign(format_significant(z.imag(), significant))
    )
}

/// |a - b|, as f64 for diagnostics.
pub fn abs_diff(a: &Complex, b: &Complex) -> Real {
    let prec = a.prec().0.max(b.prec().0);
    Complex::with_val(prec, a - b).abs().real().clone()
}

/// -log10 of a positive real, saturating at `cap` for zero.
pub fn neg_log10(x: &Real, cap: f64) -> f64 {
    if x.is_zero() {
        return cap;
    }
    let v = -Real::with_val(x.prec(), x.log10_ref()).to_f64();
    v.min(cap)
}
