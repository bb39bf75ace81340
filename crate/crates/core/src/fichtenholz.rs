//! Generalized integro-exponential integrals
//! V(a,k,s) = ∫₁^∞ e^{iax} log^k x / x^s dx.
//!
//! Rows k = 0 and k = 1 come from closed forms and exact recurrences in s.
//! Rows k ≥ 2 are telescoped downward in s with the contiguous relation
//! V(a,k+1,s−1) = (i/a)[(1+k)V(a,k,s) − (s−1)V(a,k+1,s)], starting from
//! numerically computed anchors V(π,k,ŝ).

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rug::float::Constant as MpfrConstant;
use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};
use crate::precision::{format_decimals, neg_log10, Complex, PrecisionContext, Real};
use crate::quadrature::{gauss_legendre, gauss_legendre_composite};
use crate::series_accel::CvzWeights;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VKey {
    pub k: u32,
    pub s: u32,
}

impl VKey {
    pub fn new(k: u32, s: u32) -> Self {
        Self { k, s }
    }
}

impl fmt::Display for VKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V(k={}, s={})", self.k, self.s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Closed,
    Numeric,
    Telescoped,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Closed => "closed",
            Self::Numeric => "numeric",
            Self::Telescoped => "telescoped",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Self::Closed),
            "numeric" => Ok(Self::Numeric),
            "telescoped" => Ok(Self::Telescoped),
            other => Err(Error::Config(format!("unknown provenance {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VEntry {
    pub value: Complex,
    pub provenance: Provenance,
    /// Estimated number of correct decimal places.
    pub digits: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VTable {
    pub a: Real,
    entries: BTreeMap<VKey, VEntry>,
}

impl VTable {
    pub fn new(a: Real) -> Self {
        Self {
            a,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, k: u32, s: u32, entry: VEntry) {
        self.entries.insert(VKey::new(k, s), entry);
    }

    pub fn get(&self, k: u32, s: u32) -> Option<&VEntry> {
        self.entries.get(&VKey::new(k, s))
    }

    /// The stored value, or a dependency error naming the missing pair.
    pub fn value(&self, k: u32, s: u32) -> Result<&Complex> {
        self.get(k, s)
            .map(|e| &e.value)
            .ok_or_else(|| Error::Dependency(format!("table has no entry for {}", VKey::new(k, s))))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&VKey, &VEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes k,s,re,im,provenance,digits with `decimals` places per part.
    pub fn write_csv<W: Write>(&self, out: W, decimals: usize) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        w.write_record(["k", "s", "re", "im", "provenance", "digits"]).map_err(io)?;
        for (key, e) in &self.entries {
            w.write_record([
                key.k.to_string(),
                key.s.to_string(),
                format_decimals(e.value.real(), decimals),
                format_decimals(e.value.imag(), decimals),
                e.provenance.to_string(),
                e.digits.min(decimals as u32).to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self, decimals: usize) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, decimals).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Parses the CSV written by [`VTable::write_csv`]. Errors carry the
    /// 1-based line number.
    pub fn read_csv<R: Read>(ctx: &PrecisionContext, a: Real, input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        let expected = ["k", "s", "re", "im", "provenance", "digits"];
        if !headers.is_empty() && headers.iter().ne(expected) {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
            });
        }
        let mut table = Self::new(a);
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let bad = |message: String| Error::Parse { line, message };
            if record.len() != 6 {
                return Err(bad(format!("expected 6 fields, found {}", record.len())));
            }
            let k: u32 = record[0].trim().parse().map_err(|e| bad(format!("k: {e}")))?;
            let s: u32 = record[1].trim().parse().map_err(|e| bad(format!("s: {e}")))?;
            let re = parse_decimal(ctx, &record[2]).map_err(|m| bad(format!("re: {m}")))?;
            let im = parse_decimal(ctx, &record[3]).map_err(|m| bad(format!("im: {m}")))?;
            let provenance: Provenance = record[4]
                .trim()
                .parse()
                .map_err(|e: Error| bad(e.to_string()))?;
            let digits: u32 = record[5].trim().parse().map_err(|e| bad(format!("digits: {e}")))?;
            table.insert(
                k,
                s,
                VEntry {
                    value: ctx.complex((re, im)),
                    provenance,
                    digits,
                },
            );
        }
        Ok(table)
    }
}

/// Strict decimal syntax: optional sign, digits, optional fraction.
fn parse_decimal(ctx: &PrecisionContext, text: &str) -> std::result::Result<Real, String> {
    let t = text.trim();
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    let mut parts = body.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next().unwrap_or("");
    let ok = !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit());
    if !ok {
        return Err(format!("invalid decimal {text:?}"));
    }
    ctx.parse_real(t).map_err(|e| e.to_string())
}

fn euler_gamma(prec: u32) -> Real {
    Real::with_val(prec, MpfrConstant::Euler)
}

fn series_cutoff(ctx: &PrecisionContext) -> Real {
    let mut t = Real::with_val(ctx.prec(), 10u32);
    t = t.pow(-(ctx.working_digits() as i32 + 5));
    t
}

/// Σ_{n≥1} (ia)^{n+j} / ((n+j)! n²).
pub fn tail_series(ctx: &PrecisionContext, a: &Real, j: u32) -> Complex {
    let prec = ctx.prec();
    let ia = ctx.complex((0, a.clone()));
    // (ia)^{1+j}/(1+j)!
    let mut term = ctx.complex(1);
    for q in 1..=(1 + j) {
        term *= &ia;
        term /= q;
    }
    let cutoff = series_cutoff(ctx);
    let a_f = a.to_f64();
    let mut acc = ctx.zero();
    let mut n: u32 = 1;
    loop {
        let piece = Complex::with_val(prec, &term / (n * n));
        let small = *Complex::with_val(prec, piece.abs_ref()).real() < cutoff;
        acc += &piece;
        if small && n as f64 > a_f {
            break;
        }
        n += 1;
        term *= &ia;
        term /= n + j;
    }
    acc
}

/// Closed form of V(a,1,1).
pub fn v_closed_11(ctx: &PrecisionContext, a: &Real) -> Result<Complex> {
    check_positive(a)?;
    let prec = ctx.prec();
    let pi = ctx.pi();
    let g = euler_gamma(prec);
    let l = Real::with_val(prec, a.ln_ref());
    let pi2 = Real::with_val(prec, pi.square_ref());
    let mut re = -Real::with_val(prec, &pi2 / 24u32);
    re += (Real::with_val(prec, &g / 2u32) + &l) * &g;
    re += Real::with_val(prec, l.square_ref()) / 2u32;
    let im = -(Real::with_val(prec, &g + &l) * &pi) / 2u32;
    let mut v = ctx.complex((re, im));
    v += tail_series(ctx, a, 0);
    Ok(v)
}

/// The two constituents of Im V(a,1,1): ∫₀^∞ sin(ax) log x / x dx and
/// ∫₀¹ sin(ax) log x / x dx.
pub fn im_v11_constituents(ctx: &PrecisionContext, a: &Real) -> (Real, Real) {
    let prec = ctx.prec();
    let g = euler_gamma(prec);
    let l = Real::with_val(prec, a.ln_ref());
    let zero_inf = -(Real::with_val(prec, &g + &l) * ctx.pi()) / 2u32;
    // −a Σ_{n≥0} (−1)^n a^{2n} / ((2n+1)! (2n+1)²)
    let a2 = Real::with_val(prec, a.square_ref());
    let cutoff = series_cutoff(ctx);
    let mut term = ctx.real(1); // (−1)^n a^{2n}/(2n+1)!
    let mut acc = ctx.real(0);
    let mut n: u32 = 0;
    loop {
        let d = (2 * n + 1) * (2 * n + 1);
        let piece = Real::with_val(prec, &term / d);
        let small = Real::with_val(prec, piece.abs_ref()) < cutoff;
        acc += &piece;
        if small && n > 4 {
            break;
        }
        term *= &a2;
        term /= (2 * n + 2) * (2 * n + 3);
        term = -term;
        n += 1;
    }
    (zero_inf, -(acc * a))
}

/// Closed forms of V(a,1,s) for s ∈ {2,3,4}.
pub fn v_closed_1s(ctx: &PrecisionContext, a: &Real, s: u32) -> Result<Complex> {
    check_positive(a)?;
    let prec = ctx.prec();
    let pi = ctx.pi();
    let g = euler_gamma(prec);
    let l = Real::with_val(prec, a.ln_ref());
    let l2 = Real::with_val(prec, l.square_ref());
    let pi2 = Real::with_val(prec, pi.square_ref());
    let a2 = Real::with_val(prec, a.square_ref());
    let a3 = Real::with_val(prec, &a2 * a);
    let r = |num: i32, den: u32| Real::with_val(prec, num) / den;
    let gl = Real::with_val(prec, &g + &l);
    let mut v = match s {
        2 => {
            // 1 + ia[−π²/24 + γ(γ/2 + L − 1) + L²/2 − L + 1 − (iπ/2)(γ + L − 1)]
            let mut c_re = -Real::with_val(prec, &pi2 / 24u32);
            c_re += (Real::with_val(prec, &g / 2u32) + &l) * &g - &g;
            c_re += Real::with_val(prec, &l2 / 2u32) - &l + 1u32;
            let c_im = -(Real::with_val(prec, &gl - 1u32) * &pi) / 2u32;
            let c = ctx.complex((c_re, c_im));
            let mut v = Complex::with_val(prec, &c * &ctx.complex((0, a.clone())));
            v += 1u32;
            v
        }
        3 => {
            // π²a²/48 − (γa/4)(γa + 2aL − 3a) − (a²/4)(L² − 3L + 7/2) + 1/4
            //   + i(πa²/4)(γ + L − 3/2) + ia
            let mut re = Real::with_val(prec, &pi2 * &a2) / 48u32;
            let inner = Real::with_val(prec, &g + Real::with_val(prec, &l * 2u32)) - 3u32;
            re -= Real::with_val(prec, &g * &g) * &a2 / 4u32 * Real::with_val(prec, &inner / &g);
            re -= Real::with_val(prec, &a2 / 4u32) * (Real::with_val(prec, &l2 - Real::with_val(prec, &l * 3u32)) + r(7, 2));
            re += r(1, 4);
            let mut im = Real::with_val(prec, &pi * &a2) / 4u32 * (Real::with_val(prec, &gl - r(3, 2)));
            im += a;
            ctx.complex((re, im))
        }
        4 => {
            // i π²a³/144 − i(γa³/12)(γ + 2L − 11/3) + i(a³/3)(−85/72 + 11L/12 − L²/4) + ia/4
            //   − (πa³/12)(γ + L − 11/6) − a²/2 + 1/9
            let mut im = Real::with_val(prec, &pi2 * &a3) / 144u32;
            let inner = Real::with_val(prec, &g + Real::with_val(prec, &l * 2u32)) - r(11, 3);
            im -= Real::with_val(prec, &g * &a3) / 12u32 * inner;
            let poly = r(-85, 72) + Real::with_val(prec, &l * 11u32) / 12u32 - Real::with_val(prec, &l2 / 4u32);
            im += Real::with_val(prec, &a3 / 3u32) * poly;
            im += Real::with_val(prec, a / 4u32);
            let mut re = -(Real::with_val(prec, &pi * &a3) / 12u32) * (Real::with_val(prec, &gl - r(11, 6)));
            re -= Real::with_val(prec, &a2 / 2u32);
            re += r(1, 9);
            ctx.complex((re, im))
        }
        other => {
            return Err(Error::Parameter(format!(
                "closed forms of V(a,1,s) exist for s in 2..=4, got s = {other}"
            )))
        }
    };
    v += tail_series(ctx, a, s - 1);
    Ok(v)
}

/// Closed form of Im V(a,2,2) = ∫₁^∞ sin(ax) log² x / x² dx.
pub fn im_v22_closed(ctx: &PrecisionContext, a: &Real) -> Result<Real> {
    check_positive(a)?;
    let prec = ctx.prec();
    let pi = ctx.pi();
    let g = euler_gamma(prec);
    let l = Real::with_val(prec, a.ln_ref());
    let zeta3 = Real::with_val(prec, Real::zeta_u(3));
    let pi2 = Real::with_val(prec, pi.square_ref());
    let g2 = Real::with_val(prec, g.square_ref());
    let l2 = Real::with_val(prec, l.square_ref());
    // γ(−γ + 2 − L)L + (π²/12)(L − 1 + γ) − (2/3)ζ(3) − 2L + L² − L³/3 − γ³/3 − 2γ + γ² + 2
    let mut bracket = Real::with_val(prec, 2u32 - Real::with_val(prec, &g + &l)) * &g * &l;
    bracket += Real::with_val(prec, &pi2 / 12u32) * (Real::with_val(prec, &l + &g) - 1u32);
    bracket -= Real::with_val(prec, &zeta3 * 2u32) / 3u32;
    bracket -= Real::with_val(prec, &l * 2u32);
    bracket += &l2;
    bracket -= Real::with_val(prec, &l2 * &l) / 3u32;
    bracket -= Real::with_val(prec, &g2 * &g) / 3u32;
    bracket -= Real::with_val(prec, &g * 2u32);
    bracket += &g2;
    bracket += 2u32;
    let mut v = bracket * a;
    // −2a Σ_{n≥1} (−a²)^n / ((2n+1)! (2n)³)
    let a2 = Real::with_val(prec, a.square_ref());
    let cutoff = series_cutoff(ctx);
    let mut term = -Real::with_val(prec, &a2 / 6u32); // (−a²)^1/3!
    let mut acc = ctx.real(0);
    let mut n: u32 = 1;
    loop {
        let piece = Real::with_val(prec, &term / (8 * n * n * n));
        let small = Real::with_val(prec, piece.abs_ref()) < cutoff;
        acc += &piece;
        if small && n > 4 {
            break;
        }
        term *= &a2;
        term /= (2 * n + 2) * (2 * n + 3);
        term = -term;
        n += 1;
    }
    v -= acc * a * 2u32;
    Ok(v)
}

/// V(0,k,s) = k! / (s−1)^{k+1}.
pub fn v_zero(ctx: &PrecisionContext, k: u32, s: u32) -> Result<Real> {
    if s < 2 {
        return Err(Error::Domain(format!(
            "V(0,{k},{s}) diverges; s >= 2 is required"
        )));
    }
    let num = Integer::from(Integer::factorial(k));
    let den = Integer::from(s - 1).pow(k + 1);
    Ok(ctx.real(&num) / ctx.real(&den))
}

fn check_positive(a: &Real) -> Result<()> {
    if *a <= 0 {
        return Err(Error::Domain(format!(
            "frequency a must be positive, got {}",
            a.to_f64()
        )));
    }
    Ok(())
}

/// V(a,0,1) = E₁(−ia) = −γ − ln a + iπ/2 − Σ_{n≥1} (ia)^n/(n·n!).
pub fn v_01(ctx: &PrecisionContext, a: &Real) -> Result<Complex> {
    check_positive(a)?;
    let prec = ctx.prec();
    let ia = ctx.complex((0, a.clone()));
    let cutoff = series_cutoff(ctx);
    let mut term = ctx.complex(1);
    let mut sum = ctx.zero();
    let mut n: u32 = 1;
    loop {
        term *= &ia;
        term /= n;
        let piece = Complex::with_val(prec, &term / n);
        let small = *Complex::with_val(prec, piece.abs_ref()).real() < cutoff;
        sum += &piece;
        if small && n as f64 > a.to_f64() {
            break;
        }
        n += 1;
    }
    let re = -(euler_gamma(prec) + Real::with_val(prec, a.ln_ref()));
    let im = ctx.pi() / 2u32;
    let mut v = ctx.complex((re, im));
    v -= sum;
    Ok(v)
}

/// Rows k = 0 and k = 1 for s = 1..=s_max at any positive frequency.
///
/// Row 0 follows V(0,s+1) = (ia V(0,s) + e^{ia})/s. Row 1 uses the closed
/// forms for s ≤ 4 and V(1,s) = [V(0,s) + ia V(1,s−1)]/(s−1) above.
pub fn analytic_rows(ctx: &PrecisionContext, a: &Real, s_max: u32, with_row1: bool) -> Result<VTable> {
    check_positive(a)?;
    let prec = ctx.prec();
    let digits = ctx.working_digits().saturating_sub(3);
    let mut table = VTable::new(a.clone());
    let ia = ctx.complex((0, a.clone()));
    let e_ia = {
        let (sin, cos) = a.clone().sin_cos(Real::new(prec));
        ctx.complex((cos, sin))
    };
    let mut row0 = vec![ctx.zero(), v_01(ctx, a)?];
    for s in 1..s_max {
        let mut next = Complex::with_val(prec, &ia * &row0[s as usize]);
        next += &e_ia;
        next /= s;
        row0.push(next);
    }
    for s in 1..=s_max {
        table.insert(
            0,
            s,
            VEntry {
                value: row0[s as usize].clone(),
                provenance: Provenance::Closed,
                digits,
            },
        );
    }
    if !with_row1 {
        return Ok(table);
    }
    let mut prev = v_closed_11(ctx, a)?;
    for s in 1..=s_max {
        let (value, provenance) = match s {
            1 => (prev.clone(), Provenance::Closed),
            2..=4 => (v_closed_1s(ctx, a, s)?, Provenance::Closed),
            _ => {
                let mut v = Complex::with_val(prec, &ia * &prev);
                v += &row0[s as usize];
                v /= s - 1;
                (v, Provenance::Telescoped)
            }
        };
        prev = value.clone();
        table.insert(
            1,
            s,
            VEntry {
                value,
                provenance,
                digits,
            },
        );
    }
    Ok(table)
}

fn check_pi(ctx: &PrecisionContext, a: &Real) -> Result<()> {
    let gap = Real::with_val(ctx.prec(), a - &ctx.pi()).abs();
    if gap > ctx.epsilon() * 64u32 {
        return Err(Error::Parameter(format!(
            "numeric V evaluation is implemented for a = pi only, got {}",
            a.to_f64()
        )));
    }
    Ok(())
}

/// Smallest odd m > max(3, e^{k/s} + 1), beyond which log^k x / x^s decreases.
pub fn split_point(k: u32, s: f64) -> Result<u32> {
    let peak = if k == 0 { 0.0 } else { (k as f64 / s).exp() + 1.0 };
    let lower = peak.max(3.0);
    let mut m = lower.floor() as u64 + 1;
    if m.is_multiple_of(2) {
        m += 1;
    }
    if m > 2001 {
        return Err(Error::Parameter(format!(
            "log^{k} x / x^{s} peaks too late for the half-period split"
        )));
    }
    Ok(m as u32)
}

/// Result of the numeric V route with its self-convergence estimate.
#[derive(Clone, Debug)]
pub struct NumericV {
    pub value: Complex,
    pub digits: u32,
    pub error_estimate: Real,
}

fn v_numeric_once(
    ctx: &PrecisionContext,
    k: u32,
    s: &Real,
    m: u32,
    order: u32,
    cvz_terms: u32,
) -> Result<Complex> {
    let prec = ctx.prec();
    let neg_s = Real::with_val(prec, -s);
    let g = |x: &Real| -> Real {
        let lx = Real::with_val(prec, x.ln_ref());
        let mut v = Real::with_val(prec, &lx * &neg_s).exp();
        if k > 0 {
            v *= Real::with_val(prec, lx.pow(k));
        }
        v
    };
    let base = gauss_legendre_composite(
        ctx,
        |x| {
            let mut z = ctx.exp_i_pi(x);
            z *= g(x);
            z
        },
        &ctx.real(1),
        &ctx.real(m),
        2 * (m as u64 - 1),
        order,
    )?
    .value;
    let weights = CvzWeights::new(ctx, cvz_terms)?;
    let mut tail = gauss_legendre_composite(
        ctx,
        |y| {
            let mut sum = weights.apply_fn(ctx, |l| {
                let x = Real::with_val(prec, y + (m as u64 + l));
                ctx.complex(g(&x))
            });
            sum *= ctx.exp_i_pi(y);
            sum
        },
        &ctx.real(0),
        &ctx.real(1),
        2,
        order,
    )?
    .value;
    if m % 2 == 1 {
        tail = -tail;
    }
    Ok(base + tail)
}

/// V(π,k,s) for real s by half-period splitting at the split point, Gauss–
/// Legendre on [1,m] and on the half period, and CVZ over the alternating
/// series of half periods.
pub fn v_numeric_real_s(ctx: &PrecisionContext, a: &Real, k: u32, s: &Real) -> Result<NumericV> {
    check_pi(ctx, a)?;
    if *s <= 0 || (k == 0 && *s < 2) {
        return Err(Error::Domain(format!(
            "V(pi,{k},{}) is outside the supported convergent range",
            s.to_f64()
        )));
    }
    let m = split_point(k, s.to_f64())?;
    let w = ctx.working_digits();
    let order = w / 2 + 12;
    let terms = (1.3 * w as f64) as u32 + 10;
    let v1 = v_numeric_once(ctx, k, s, m, order, terms)?;
    let v2 = v_numeric_once(ctx, k, s, m, order + 8, terms + 16)?;
    let diff = Complex::with_val(ctx.prec(), &v1 - &v2).abs().real().clone();
    let floor = Real::with_val(ctx.prec(), 10u32).pow(-(w as i32 - 3));
    let err = if diff * 10u32 > floor {
        Complex::with_val(ctx.prec(), &v1 - &v2).abs().real().clone() * 10u32
    } else {
        floor
    };
    let digits = neg_log10(&err, w as f64).floor().max(0.0) as u32;
    Ok(NumericV {
        value: v2,
        digits,
        error_estimate: err,
    })
}

/// V(π,k,s) for integer s ≥ 1 (k ≥ 1) or s ≥ 2 (k = 0).
pub fn v_numeric(ctx: &PrecisionContext, a: &Real, k: u32, s: u32) -> Result<NumericV> {
    v_numeric_real_s(ctx, a, k, &ctx.real(s))
}

fn error_of_digits(ctx: &PrecisionContext, digits: u32) -> Real {
    Real::with_val(ctx.prec(), 10u32).pow(-(digits as i32))
}

/// Rows 0..=k_max, s = 1..=s_max of V(π,k,s). Rows k ≥ 2 are telescoped from
/// anchors V(π,k,ŝ); `s_hat` defaults to s_max + k_max + 1. Fails with a
/// precision error if any entry's projected accuracy drops below `min_digits`.
pub fn telescope_fill_with(
    ctx: &PrecisionContext,
    k_max: u32,
    s_max: u32,
    s_hat: Option<u32>,
    min_digits: u32,
) -> Result<VTable> {
    if s_max < 1 {
        return Err(Error::Parameter("s_max must be at least 1".into()));
    }
    let s_hat = s_hat.unwrap_or(s_max + k_max + 1);
    if s_hat <= s_max + k_max {
        return Err(Error::Parameter(format!(
            "s_hat = {s_hat} must exceed s_max + k_max = {}",
            s_max + k_max
        )));
    }
    let prec = ctx.prec();
    let pi = ctx.pi();
    let analytic = analytic_rows(ctx, &pi, s_hat, k_max >= 1)?;
    let rounding = error_of_digits(ctx, ctx.working_digits().saturating_sub(3));

    // rows[k][s] = (value, absolute error bound, provenance); s indexes 1..=s_hat
    let mut rows: Vec<Vec<(Complex, Real, Provenance)>> = Vec::new();
    for k in 0..=k_max.min(1) {
        let mut row = vec![(ctx.zero(), ctx.real(0), Provenance::Closed)];
        for s in 1..=s_hat {
            let e = analytic.get(k, s).expect("analytic row");
            row.push((e.value.clone(), rounding.clone(), e.provenance));
        }
        rows.push(row);
    }
    let mut anchor_of_row = vec![None, None];
    let i_over_a = Complex::with_val(prec, (0, Real::with_val(prec, pi.recip_ref())));
    for k1 in 2..=k_max {
        let anchor = v_numeric(ctx, &pi, k1, s_hat)?;
        anchor_of_row.push(Some(VKey::new(k1, s_hat)));
        let mut row = vec![(ctx.zero(), ctx.real(0), Provenance::Closed); s_hat as usize + 1];
        row[s_hat as usize] = (anchor.value, anchor.error_estimate, Provenance::Numeric);
        let k = k1 - 1;
        for s in (2..=s_hat).rev() {
            // V(k+1,s−1) = (i/a)[(1+k)V(k,s) − (s−1)V(k+1,s)]
            let (lower, lower_err) = {
                let e = &rows[k as usize][s as usize];
                (e.0.clone(), e.1.clone())
            };
            let (same, same_err) = (row[s as usize].0.clone(), row[s as usize].1.clone());
            let mut v = Complex::with_val(prec, &lower * (1 + k));
            v -= Complex::with_val(prec, &same * (s - 1));
            v *= &i_over_a;
            let mut err = Real::with_val(prec, &lower_err * (1 + k));
            err += Real::with_val(prec, &same_err * (s - 1));
            err /= &pi;
            err += &rounding;
            row[s as usize - 1] = (v, err, Provenance::Telescoped);
        }
        rows.push(row);
    }

    let cap = ctx.working_digits();
    let mut table = VTable::new(pi.clone());
    for (k, row) in rows.iter().enumerate() {
        for s in 1..=s_max {
            let (value, err, provenance) = &row[s as usize];
            let digits = neg_log10(err, cap as f64).floor().max(0.0) as u32;
            if digits < min_digits {
                let anchor = anchor_of_row
                    .get(k)
                    .copied()
                    .flatten()
                    .map_or_else(|| format!("row {k}"), |key| key.to_string());
                return Err(Error::Precision(format!(
                    "V(pi,{k},{s}) projects to {digits} digits (< {min_digits}); anchor {anchor} is not precise enough"
                )));
            }
            table.insert(
                k as u32,
                s,
                VEntry {
                    value: value.clone(),
                    provenance: *provenance,
                    digits,
                },
            );
        }
    }
    Ok(table)
}

/// Digits every telescoped entry must keep by default.
pub fn default_min_digits(ctx: &PrecisionContext) -> u32 {
    ctx.digits().saturating_sub(10).max(20)
}

pub fn telescope_fill(
    ctx: &PrecisionContext,
    k_max: u32,
    s_max: u32,
    s_hat: Option<u32>,
) -> Result<VTable> {
    telescope_fill_with(ctx, k_max, s_max, s_hat, default_min_digits(ctx))
}

/// |V(k,s) + (ia/(1+k)) V(k+1,s−1) − ((s−1)/(1+k)) V(k+1,s)|.
pub fn contiguous_residual(ctx: &PrecisionContext, table: &VTable, k: u32, s: u32) -> Result<Real> {
    if s < 2 {
        return Err(Error::Dependency(format!(
            "contiguous relation at (k={k}, s={s}) needs V(k+1, s-1) with s-1 >= 1"
        )));
    }
    let prec = ctx.prec();
    let v = table.value(k, s)?;
    let up_left = table.value(k + 1, s - 1)?;
    let up = table.value(k + 1, s)?;
    let ia = ctx.complex((0, table.a.clone()));
    let mut r = v.clone();
    r += Complex::with_val(prec, &ia * up_left) / (1 + k);
    r -= Complex::with_val(prec, up * (s - 1)) / (1 + k);
    Ok(r.abs().real().clone())
}

/// ∫₁^∞ e^{iax} log^k(bx) / x^s dx = Σ_l C(k,l) log^{k−l}(b) V(a,l,s).
pub fn v_scaled(ctx: &PrecisionContext, b: &Real, k: u32, s: u32, table: &VTable) -> Result<Complex> {
    if *b <= 0 {
        return Err(Error::Domain(format!("scale b must be positive, got {}", b.to_f64())));
    }
    let prec = ctx.prec();
    let lb = Real::with_val(prec, b.ln_ref());
    let mut acc = ctx.zero();
    for l in 0..=k {
        let coeff = Integer::from(Integer::binomial_u(k, l));
        let mut t = table.value(l, s)?.clone();
        t *= Real::with_val(prec, (&lb).pow(k - l)) * &coeff;
        acc += &t;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    Sin,
    Cos,
}

impl FromStr for TrigKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin" => Ok(Self::Sin),
            "cos" => Ok(Self::Cos),
            other => Err(Error::Config(format!("unknown trigonometric kind {other:?}"))),
        }
    }
}

/// V(freq,k,s) looked up among `tables` by frequency, with V(−a) = conj V(a)
/// and V(0,k,s) in closed form.
fn v_at_frequency(ctx: &PrecisionContext, freq: &Real, k: u32, s: u32, tables: &[&VTable]) -> Result<Complex> {
    if freq.is_zero() {
        return Ok(ctx.complex(v_zero(ctx, k, s)?));
    }
    let target = Real::with_val(ctx.prec(), freq.abs_ref());
    let tol = ctx.epsilon() * 1024u32 * &target;
    let table = tables
        .iter()
        .find(|t| Real::with_val(ctx.prec(), &t.a - &target).abs() <= tol)
        .ok_or_else(|| {
            Error::Dependency(format!(
                "no table at frequency {} for V(k={k}, s={s})",
                target.to_f64()
            ))
        })?;
    let v = table.value(k, s)?.clone();
    Ok(if freq.is_sign_negative() { v.conj() } else { v })
}

/// ∫₁^∞ sin^m(ax) or cos^m(ax) times log^k x / x^s, expanded into
/// V[a(m−2l),k,s] by Euler's formula.
pub fn trig_power(
    ctx: &PrecisionContext,
    a: &Real,
    m: u32,
    k: u32,
    s: u32,
    kind: TrigKind,
    tables: &[&VTable],
) -> Result<Complex> {
    if m < 1 {
        return Err(Error::Parameter("trigonometric power m must be >= 1".into()));
    }
    let prec = ctx.prec();
    let mut acc = ctx.zero();
    for l in 0..=m {
        let freq = Real::with_val(prec, a * (m as i64 - 2 * l as i64));
        let mut v = v_at_frequency(ctx, &freq, k, s, tables)?;
        v *= Integer::from(Integer::binomial_u(m, l));
        if kind == TrigKind::Sin && l % 2 == 1 {
            v = -v;
        }
        acc += &v;
    }
    let prefactor = match kind {
        TrigKind::Cos => ctx.complex(1),
        TrigKind::Sin => Complex::with_val(prec, ctx.complex((0, 1)).recip()),
    };
    for _ in 0..m {
        acc *= &prefactor;
        acc /= 2u32;
    }
    Ok(acc)
}

/// Gauss–Legendre rule of `order` applied on `panels` panels whose widths
/// shrink geometrically by half towards the left end.
pub fn graded_gauss(
    ctx: &PrecisionContext,
    mut f: impl FnMut(&Real) -> Complex,
    a: &Real,
    b: &Real,
    panels: u32,
    order: u32,
) -> Result<Complex> {
    let prec = ctx.prec();
    let rule = gauss_legendre(ctx, order)?;
    let width = Real::with_val(prec, b - a);
    let mut acc = ctx.zero();
    for p in 0..panels {
        // [a + width 2^{−(p+1)}, a + width 2^{−p}], the last panel reaching a
        let hi = Real::with_val(prec, &width >> p) + a;
        let lo = if p + 1 == panels {
            a.clone()
        } else {
            Real::with_val(prec, &width >> (p + 1)) + a
        };
        let half = Real::with_val(prec, &hi - &lo) / 2u32;
        let mid = Real::with_val(prec, &hi + &lo) / 2u32;
        let mut panel = ctx.zero();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = Real::with_val(prec, x * &half) + &mid;
            let mut v = f(&t);
            v *= w;
            panel += &v;
        }
        panel *= &half;
        acc += &panel;
    }
    Ok(acc)
}
