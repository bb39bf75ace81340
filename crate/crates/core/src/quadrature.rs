//! Composite Simpson, Filon–Simpson and Gauss–Legendre rules for complex
//! integrands at working precision. All reductions run in ascending node order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::precision::{Complex, PrecisionContext, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Simpson,
    FilonSimpson,
    GaussLegendre,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Simpson => "simpson",
            Self::FilonSimpson => "filon_simpson",
            Self::GaussLegendre => "gauss_legendre",
        })
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub value: Complex,
    pub nodes: u64,
    pub rule: Rule,
}

/// Simpson weight multiplier (1, 4, 2, …, 4, 1) of node j out of 0..=subintervals.
pub fn simpson_multiplier(j: u64, subintervals: u64) -> u32 {
    if j == 0 || j == subintervals {
        1
    } else if j % 2 == 1 {
        4
    } else {
        2
    }
}

fn check_interval(a: &Real, b: &Real) -> Result<()> {
    if a >= b {
        return Err(Error::Parameter(format!(
            "integration interval needs a < b, got [{}, {}]",
            a.to_f64(),
            b.to_f64()
        )));
    }
    Ok(())
}

/// a + j (b − a) / n, computed without accumulating the step.
fn node(ctx: &PrecisionContext, a: &Real, width: &Real, j: u64, n: u64) -> Real {
    let mut x = Real::with_val(ctx.prec(), width * j);
    x /= n;
    x += a;
    x
}

/// Composite Simpson with `subintervals` (even) panels of width (b − a)/subintervals.
pub fn simpson_composite(
    ctx: &PrecisionContext,
    mut sampler: impl FnMut(&Real) -> Complex,
    a: &Real,
    b: &Real,
    subintervals: u64,
) -> Result<QuadratureResult> {
    if subintervals < 2 || !subintervals.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "Simpson needs an even number of subintervals >= 2, got {subintervals}"
        )));
    }
    check_interval(a, b)?;
    let width = Real::with_val(ctx.prec(), b - a);
    let mut acc = ctx.zero();
    for j in 0..=subintervals {
        let x = node(ctx, a, &width, j, subintervals);
        let mut v = sampler(&x);
        v *= simpson_multiplier(j, subintervals);
        acc += &v;
    }
    acc *= &width;
    acc /= 3 * subintervals;
    Ok(QuadratureResult {
        value: acc,
        nodes: subintervals + 1,
        rule: Rule::Simpson,
    })
}

/// Weights (w0, w1, w2) integrating e^{iπy} Q(y) exactly over [y0, y0 + 2h]
/// for every quadratic Q sampled at y0, y0 + h, y0 + 2h.
#[derive(Clone, Debug)]
pub struct PanelRule {
    pub y0: Real,
    pub h: Real,
    pub weights: [Complex; 3],
}

impl PanelRule {
    pub fn apply(&self, ctx: &PrecisionContext, g0: &Complex, g1: &Complex, g2: &Complex) -> Complex {
        let mut acc = Complex::with_val(ctx.prec(), &self.weights[0] * g0);
        acc += Complex::with_val(ctx.prec(), &self.weights[1] * g1);
        acc += Complex::with_val(ctx.prec(), &self.weights[2] * g2);
        acc
    }
}

/// Brackets of the three Filon weights without the common factor
/// e^{iπ y0} / (h² π³). They cancel to O(h³), so the caller picks `prec`.
fn filon_brackets(prec: u32, h: &Real) -> [Complex; 3] {
    let pi = Real::with_val(prec, rug::float::Constant::Pi);
    let hp = Real::with_val(prec, h * &pi);
    let hp2 = Real::with_val(prec, hp.square_ref());
    let (sin, cos) = Real::with_val(prec, &hp * 2u32).sin_cos(Real::new(prec));
    let e2 = Complex::with_val(prec, (cos, sin));
    let c = |re: Real, im: Real| Complex::with_val(prec, (re, im));
    let zero = || Real::new(prec);

    // (i/2) [−2 + 2hp² − 3i hp + (2 − i hp) E]
    let mut b0 = c(Real::with_val(prec, &hp2 * 2u32) - 2u32, Real::with_val(prec, &hp * -3i32));
    b0 += Complex::with_val(prec, &e2 * &c(Real::with_val(prec, 2u32), Real::with_val(prec, -&hp)));
    b0 *= c(zero(), Real::with_val(prec, 0.5));

    // −2 [−i + hp + (i + hp) E]
    let mut b1 = c(hp.clone(), Real::with_val(prec, -1));
    b1 += Complex::with_val(prec, &e2 * &c(hp.clone(), Real::with_val(prec, 1)));
    b1 *= -2i32;

    // −(i/2) [2 + i hp + (−2 + 2hp² + 3i hp) E]
    let mut b2 = c(Real::with_val(prec, 2u32), hp.clone());
    b2 += Complex::with_val(
        prec,
        &e2 * &c(Real::with_val(prec, &hp2 * 2u32) - 2u32, Real::with_val(prec, &hp * 3u32)),
    );
    b2 *= c(zero(), Real::with_val(prec, -0.5));
    [b0, b1, b2]
}

/// Extra bits so that the O(h³) cancellation inside the brackets is harmless.
fn filon_extra_bits(h: &Real) -> u32 {
    let inv = 1.0 / h.to_f64();
    3 * inv.log2().max(0.0).ceil() as u32 + 32
}

/// Closed-form Filon–Simpson panel weights.
pub fn filon_panel_weights(ctx: &PrecisionContext, y0: &Real, h: &Real) -> Result<PanelRule> {
    if *h <= 0 {
        return Err(Error::Parameter(format!(
            "Filon panel needs h > 0, got {}",
            h.to_f64()
        )));
    }
    let prec = ctx.prec();
    let hi = prec + filon_extra_bits(h);
    let brackets = filon_brackets(hi, &Real::with_val(hi, h));
    let pi = Real::with_val(hi, rug::float::Constant::Pi);
    let denom = Real::with_val(hi, h.square_ref()) * pi.clone().square() * &pi;
    let mut phase = ctx.exp_i_pi(y0);
    phase /= Real::with_val(prec, &denom);
    let weights = brackets.map(|b| {
        let mut w = Complex::with_val(prec, &b);
        w *= &phase;
        w
    });
    Ok(PanelRule {
        y0: y0.clone(),
        h: h.clone(),
        weights,
    })
}

/// Filon–Simpson over `panels` disjoint panels of width 2h covering [a, b].
/// The sampler supplies the smooth factor G only; e^{iπy} lives in the weights.
pub fn filon_simpson_composite(
    ctx: &PrecisionContext,
    mut sampler: impl FnMut(&Real) -> Complex,
    a: &Real,
    b: &Real,
    panels: u64,
) -> Result<QuadratureResult> {
    if panels < 1 {
        return Err(Error::Parameter("Filon-Simpson needs at least one panel".into()));
    }
    check_interval(a, b)?;
    let prec = ctx.prec();
    let width = Real::with_val(prec, b - a);
    let subintervals = 2 * panels;
    let h = Real::with_val(prec, &width / subintervals);
    // weights of a panel at y0 are the y0 = 0 weights rotated by e^{iπ y0}
    let base = filon_panel_weights(ctx, &ctx.real(0), &h)?;
    let mut acc = ctx.zero();
    let mut left = sampler(a);
    for p in 0..panels {
        let mid = sampler(&node(ctx, a, &width, 2 * p + 1, subintervals));
        let right = sampler(&node(ctx, a, &width, 2 * p + 2, subintervals));
        let y0 = node(ctx, a, &width, 2 * p, subintervals);
        let mut panel = base.apply(ctx, &left, &mid, &right);
        panel *= ctx.exp_i_pi(&y0);
        acc += &panel;
        left = right;
    }
    Ok(QuadratureResult {
        value: acc,
        nodes: subintervals + 1,
        rule: Rule::FilonSimpson,
    })
}

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: u32, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p0 = Real::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        // k P_k = (2k−1) x P_{k−1} − (k−1) P_{k−2}
        let mut p2 = Real::with_val(prec, x * &p1);
        p2 *= 2 * k - 1;
        p2 -= Real::with_val(prec, &p0 * (k - 1));
        p2 /= k;
        p0 = std::mem::replace(&mut p1, p2);
    }
    // (1 − x²) P_n' = n (P_{n−1} − x P_n)
    let mut d = Real::with_val(prec, x * &p1);
    d = Real::with_val(prec, &p0 - &d) * n;
    let one_minus = Real::with_val(prec, 1u32 - Real::with_val(prec, x.square_ref()));
    d /= &one_minus;
    (p1, d)
}

fn compute_gauss_rule(order: u32, prec: u32) -> GaussRule {
    let work = prec + 32;
    let mut nodes = Vec::with_capacity(order as usize);
    let mut weights = Vec::with_capacity(order as usize);
    let tol_exp = -(work as i32) + 8;
    for i in 1..=order {
        let guess =
            (std::f64::consts::PI * (i as f64 - 0.25) / (order as f64 + 0.5)).cos();
        let mut x = Real::with_val(work, guess);
        for _ in 0..200 {
            let (p, dp) = legendre(order, &x);
            let step = Real::with_val(work, &p / &dp);
            x -= &step;
            if step.is_zero() || step.get_exp().is_none_or(|e| e < tol_exp) {
                break;
            }
        }
        let (_, dp) = legendre(order, &x);
        let one_minus = Real::with_val(work, 1u32 - Real::with_val(work, x.square_ref()));
        let w = Real::with_val(work, 2u32) / (one_minus * dp.square());
        nodes.push(Real::with_val(prec, &x));
        weights.push(Real::with_val(prec, &w));
    }
    GaussRule { nodes, weights }
}

/// Cached n-point Gauss–Legendre rule at the precision of `ctx`.
pub fn gauss_legendre(ctx: &PrecisionContext, order: u32) -> Result<Arc<GaussRule>> {
    if order < 1 {
        return Err(Error::Parameter("Gauss-Legendre needs at least one node".into()));
    }
    type Cache = Mutex<HashMap<(u32, u32), Arc<GaussRule>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (order, ctx.prec());
    if let Some(rule) = cache.lock().expect("gauss cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(compute_gauss_rule(order, ctx.prec()));
    cache
        .lock()
        .expect("gauss cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// Composite Gauss–Legendre with `panels` equal panels of `order` nodes each.
pub fn gauss_legendre_composite(
    ctx: &PrecisionContext,
    mut sampler: impl FnMut(&Real) -> Complex,
    a: &Real,
    b: &Real,
    panels: u64,
    order: u32,
) -> Result<QuadratureResult> {
    if panels < 1 {
        return Err(Error::Parameter("Gauss-Legendre needs at least one panel".into()));
    }
    check_interval(a, b)?;
    let prec = ctx.prec();
    let rule = gauss_legendre(ctx, order)?;
    let width = Real::with_val(prec, b - a);
    let half = Real::with_val(prec, &width / (2 * panels));
    let mut acc = ctx.zero();
    for p in 0..panels {
        let mid = node(ctx, a, &width, 2 * p + 1, 2 * panels);
        let mut panel = ctx.zero();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let offset = Real::with_val(prec, x * &half);
            let t = Real::with_val(prec, &mid + &offset);
            let mut v = sampler(&t);
            v *= w;
            panel += &v;
        }
        panel *= &half;
        acc += &panel;
    }
    Ok(QuadratureResult {
        value: acc,
        nodes: panels * order as u64,
        rule: Rule::GaussLegendre,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn dist(ctx: &PrecisionContext, a: &Complex, b: &Complex) -> f64 {
        Complex::with_val(ctx.prec(), a - b).abs().real().to_f64()
    }

    fn two_i_over_pi(c: &PrecisionContext) -> Complex {
        let mut z = c.i_over_pi();
        z *= 2u32;
        z
    }

    #[test]
    fn simpson_exactness() {
        let c = ctx();
        let (zero, one) = (c.real(0), c.real(1));
        let r = simpson_composite(&c, |_| c.complex(1), &zero, &one, 4).unwrap();
        assert_eq!(r.nodes, 5);
        assert!(dist(&c, &r.value, &c.complex(1)) < 1e-58);
        let cube = |y: &Real| c.complex(Real::with_val(c.prec(), y.pow(3u32)));
        let r = simpson_composite(&c, cube, &zero, &one, 2).unwrap();
        assert!(dist(&c, &r.value, &c.complex(Real::with_val(c.prec(), 0.25))) < 1e-58);
        let r = simpson_composite(&c, |y| c.exp_i_pi(y), &zero, &one, 1000).unwrap();
        assert!(dist(&c, &r.value, &two_i_over_pi(&c)) < 1e-12);
        assert!(simpson_composite(&c, |_| c.zero(), &zero, &one, 3).is_err());
        assert!(simpson_composite(&c, |_| c.zero(), &one, &one, 2).is_err());
    }

    fn exact_quadratic(c: &PrecisionContext, q: [f64; 3], y0: &Real, y1: &Real) -> Complex {
        // antiderivative of e^{iπy}(q0 + q1 y + q2 y²): e^{iπy} Σ_j (−1)^j Q^{(j)}(y)/(iπ)^{j+1}
        let ipi = Complex::with_val(c.prec(), (0, c.pi()));
        let prim = |y: &Real| {
            let yf = y.clone();
            let q0 = Real::with_val(c.prec(), q[0])
                + Real::with_val(c.prec(), q[1]) * &yf
                + Real::with_val(c.prec(), q[2]) * Real::with_val(c.prec(), yf.square_ref());
            let q1 = Real::with_val(c.prec(), q[1]) + Real::with_val(c.prec(), q[2] * 2.0) * &yf;
            let q2 = Real::with_val(c.prec(), q[2] * 2.0);
            let mut acc = Complex::with_val(c.prec(), q0 / &ipi);
            acc -= Complex::with_val(c.prec(), q1 / Complex::with_val(c.prec(), ipi.square_ref()));
            let ipi3 = Complex::with_val(c.prec(), ipi.square_ref()) * &ipi;
            acc += Complex::with_val(c.prec(), q2 / ipi3);
            acc * c.exp_i_pi(y)
        };
        prim(y1) - prim(y0)
    }

    #[test]
    fn filon_weights_on_constants_and_squares() {
        let c = ctx();
        let half = c.parse_real("0.5").unwrap();
        let rule = filon_panel_weights(&c, &c.real(0), &half).unwrap();
        let one = c.complex(1);
        let sum = rule.apply(&c, &one, &one, &one);
        assert!(dist(&c, &sum, &two_i_over_pi(&c)) < 1e-55);
        let sq = rule.apply(&c, &c.zero(), &c.complex(Real::with_val(c.prec(), 0.25)), &one);
        let exact = exact_quadratic(&c, [0.0, 0.0, 1.0], &c.real(0), &c.real(1));
        assert!(dist(&c, &sq, &exact) < 1e-55);
        // ∫₀¹ cos(πy) y² dy = −2/π²
        let want_re = Real::with_val(c.prec(), -2) / c.pi().square();
        assert!((Real::with_val(c.prec(), sq.real() - &want_re)).abs() < 1e-55);
        assert!(filon_panel_weights(&c, &c.real(0), &c.real(0)).is_err());
    }

    #[test]
    fn filon_small_panel_matches_simpson() {
        let c = ctx();
        let h = c.parse_real("0.001").unwrap();
        let rule = filon_panel_weights(&c, &c.real(0), &h).unwrap();
        let one = c.complex(1);
        let filon = rule.apply(&c, &one, &one, &one);
        let two_h = Real::with_val(c.prec(), &h * 2u32);
        let simpson = simpson_composite(&c, |y| c.exp_i_pi(y), &c.real(0), &two_h, 2).unwrap();
        let exact = {
            let mut e = c.exp_i_pi(&two_h);
            e -= 1u32;
            e / Complex::with_val(c.prec(), (0, c.pi()))
        };
        assert!(dist(&c, &filon, &exact) < 1e-50);
        // Simpson's own error on the panel is (2h)⁵ π⁴ / 2880 ≈ 1.08e-15
        let predicted = 0.002f64.powi(5) * std::f64::consts::PI.powi(4) / 2880.0;
        let gap = dist(&c, &filon, &simpson.value);
        assert!((gap / predicted - 1.0).abs() < 0.01, "{gap:e}");
    }

    #[test]
    fn filon_composite_exact_for_linear() {
        let c = ctx();
        let (zero, one) = (c.real(0), c.real(1));
        let g = |y: &Real| c.complex(y.clone());
        let a = filon_simpson_composite(&c, g, &zero, &one, 1).unwrap();
        let b = filon_simpson_composite(&c, g, &zero, &one, 64).unwrap();
        assert!(dist(&c, &a.value, &b.value) < 1e-45);
        let k = filon_simpson_composite(&c, |_| c.complex(1), &zero, &one, 7).unwrap();
        assert!(dist(&c, &k.value, &two_i_over_pi(&c)) < 1e-50);
    }

    #[test]
    fn gauss_legendre_polynomials() {
        let c = ctx();
        let rule = gauss_legendre(&c, 10).unwrap();
        let wsum = rule.weights.iter().fold(c.real(0), |acc, w| acc + w);
        assert!(Real::with_val(c.prec(), wsum - 2u32).abs() < 1e-55);
        // ∫₀¹ y^19 dy = 1/20 (degree 2n − 1)
        let r = gauss_legendre_composite(
            &c,
            |y| c.complex(Real::with_val(c.prec(), y.pow(19u32))),
            &c.real(0),
            &c.real(1),
            1,
            10,
        )
        .unwrap();
        let want = c.complex(Real::with_val(c.prec(), 20u32).recip());
        assert!(dist(&c, &r.value, &want) < 1e-55);
        let r = gauss_legendre_composite(&c, |y| c.exp_i_pi(y), &c.real(0), &c.real(1), 4, 30).unwrap();
        assert!(dist(&c, &r.value, &two_i_over_pi(&c)) < 1e-55);
    }
}
