//! Derivatives of f(x) = x^{1/x} and the mapped integrands built from them.
//!
//! f^{(n)}(x) = x^{1/x} Σ α_{n,r,s} log^s(x) / x^r, where the integer table
//! α is generated by applying the chain-rule recurrence n times to the seed
//! {(0,0): 1}. The z-domain tables β use the same recurrence with seed
//! {(2,0): 1, (2,1): −1}.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rug::Integer;

use crate::error::{Error, Result};
use crate::precision::{Complex, PrecisionContext, Real};

/// Largest order served by the cached tables.
pub const MAX_ORDER: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableKind {
    Alpha,
    Beta,
}

/// Sparse exact table (r, s) → coefficient of log^s / x^r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    order: u32,
    entries: BTreeMap<(u32, u32), Integer>,
}

impl CoefficientTable {
    pub fn alpha_seed() -> BTreeMap<(u32, u32), Integer> {
        BTreeMap::from([((0, 0), Integer::from(1))])
    }

    pub fn beta_seed() -> BTreeMap<(u32, u32), Integer> {
        BTreeMap::from([((2, 0), Integer::from(1)), ((2, 1), Integer::from(-1))])
    }

    /// Applies the recurrence `order` times to `seed`.
    pub fn from_seed(seed: BTreeMap<(u32, u32), Integer>, order: u32) -> Self {
        let mut table = Self {
            order: 0,
            entries: seed,
        };
        table.entries.retain(|_, c| *c != 0);
        for _ in 0..order {
            table = table.step();
        }
        table
    }

    /// One application of
    /// α_{n+1,r,s} = α_{n,r−2,s} − α_{n,r−2,s−1} + (s+1)α_{n,r−1,s+1} − (r−1)α_{n,r−1,s}.
    pub fn step(&self) -> Self {
        let mut next: BTreeMap<(u32, u32), Integer> = BTreeMap::new();
        let mut add = |key: (u32, u32), val: Integer| {
            *next.entry(key).or_default() += val;
        };
        for (&(r, s), c) in &self.entries {
            add((r + 2, s), c.clone());
            add((r + 2, s + 1), Integer::from(-c));
            if s > 0 {
                add((r + 1, s - 1), Integer::from(c * s));
            }
            if r > 0 {
                add((r + 1, s), -Integer::from(c * r));
            }
        }
        next.retain(|_, c| *c != 0);
        Self {
            order: self.order + 1,
            entries: next,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, r: u32, s: u32) -> Integer {
        self.entries.get(&(r, s)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> &BTreeMap<(u32, u32), Integer> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_r(&self) -> u32 {
        self.entries.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn min_r(&self) -> u32 {
        self.entries.keys().map(|k| k.0).min().unwrap_or(0)
    }

    pub fn max_s(&self) -> u32 {
        self.entries.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Σ_r c_{r,0}: the value of the sum at log = 0, t = 1.
    pub fn sum_log_free(&self) -> Integer {
        self.entries
            .iter()
            .filter(|((_, s), _)| *s == 0)
            .map(|(_, c)| c)
            .sum()
    }

    /// Σ c_{r,s} ℓ^s t^r by nested Horner schemes.
    pub fn eval(&self, ctx: &PrecisionContext, ell: &Real, t: &Real) -> Real {
        let prec = ctx.prec();
        let max_r = self.max_r();
        let max_s = self.max_s() as usize;
        let mut rows: Vec<Vec<Option<&Integer>>> = vec![vec![None; max_s + 1]; max_r as usize + 1];
        for (&(r, s), c) in &self.entries {
            rows[r as usize][s as usize] = Some(c);
        }
        let mut outer = Real::new(prec);
        for row in rows.iter().rev() {
            let mut inner = Real::new(prec);
            for c in row.iter().rev() {
                inner *= ell;
                if let Some(c) = c {
                    inner += *c;
                }
            }
            outer *= t;
            outer += &inner;
        }
        outer
    }
}

type TableCache = Mutex<HashMap<(TableKind, u32), Arc<CoefficientTable>>>;

fn cache() -> &'static TableCache {
    static CACHE: std::sync::OnceLock<TableCache> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_table(kind: TableKind, n: u32) -> Result<Arc<CoefficientTable>> {
    if n > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: format!("coefficient tables are capped at order {MAX_ORDER}"),
        });
    }
    if let Some(t) = cache().lock().expect("table cache poisoned").get(&(kind, n)) {
        return Ok(Arc::clone(t));
    }
    let table = if n == 0 {
        let seed = match kind {
            TableKind::Alpha => CoefficientTable::alpha_seed(),
            TableKind::Beta => CoefficientTable::beta_seed(),
        };
        CoefficientTable::from_seed(seed, 0)
    } else {
        cached_table(kind, n - 1)?.step()
    };
    let table = Arc::new(table);
    cache()
        .lock()
        .expect("table cache poisoned")
        .insert((kind, n), Arc::clone(&table));
    Ok(table)
}

/// α_{n,·,·}, the coefficients of f^{(n)}.
pub fn alpha_table(n: u32) -> Result<Arc<CoefficientTable>> {
    cached_table(TableKind::Alpha, n)
}

/// β_{n,·,·}, the coefficients of h_n(z) = e^{z e^{−z}} Σ β z^s e^{−rz}.
pub fn beta_table(n: u32) -> Result<Arc<CoefficientTable>> {
    cached_table(TableKind::Beta, n)
}

pub fn table(kind: TableKind, n: u32) -> Result<Arc<CoefficientTable>> {
    cached_table(kind, n)
}

/// Evaluates f^{(n)}(x) with a caller-held table.
pub fn f_derivative_with(ctx: &PrecisionContext, table: &CoefficientTable, x: &Real) -> Real {
    let prec = ctx.prec();
    let ell = Real::with_val(prec, x.ln_ref());
    let t = Real::with_val(prec, x.recip_ref());
    let amp = Real::with_val(prec, &ell * &t).exp();
    amp * table.eval(ctx, &ell, &t)
}

/// n-th derivative of x^{1/x}.
pub fn f_derivative(ctx: &PrecisionContext, n: u32, x: &Real) -> Result<Real> {
    if *x <= 0 {
        return Err(Error::Domain(format!(
            "f^({n})(x) requires x > 0, got {}",
            x.to_f64()
        )));
    }
    let table = alpha_table(n)?;
    Ok(f_derivative_with(ctx, &table, x))
}

/// Pre-integrated boundary value b(n) of the partial-integration ladder.
#[derive(Clone, Debug)]
pub struct BoundaryTerms {
    pub order: u32,
    pub value: Complex,
}

/// b(0) = 0, b(1) = −2i/π, b(n+1) = b(n) − (i/π)^{n+1} f^{(n)}(1).
pub fn boundary_terms(ctx: &PrecisionContext, n: u32) -> Result<BoundaryTerms> {
    if n > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: format!("boundary terms are capped at order {MAX_ORDER}"),
        });
    }
    let mut value = ctx.zero();
    if n >= 1 {
        let i_pi = ctx.i_over_pi();
        value = Complex::with_val(ctx.prec(), &i_pi * -2i32);
        let mut power = Complex::with_val(ctx.prec(), &i_pi * &i_pi);
        for j in 1..n {
            // f^{(j)}(1) = Σ_r α_{j,r,0}
            let fj = alpha_table(j)?.sum_log_free();
            value -= Complex::with_val(ctx.prec(), &power * &fj);
            power *= &i_pi;
        }
    }
    Ok(BoundaryTerms { order: n, value })
}

/// (i/π)^n
pub fn i_over_pi_pow(ctx: &PrecisionContext, n: u32) -> Complex {
    let mut p = ctx.complex(1);
    let i_pi = ctx.i_over_pi();
    for _ in 0..n {
        p *= &i_pi;
    }
    p
}

/// Integrand of the first partial-integration algorithm on y ∈ [0, 1/2]:
/// e^{iπx} f^{(n)}(x) / y² with x = 1/y − 1, and 0 at y = 0.
pub fn mapped_integrand_pi(ctx: &PrecisionContext, n: u32, y: &Real) -> Result<Complex> {
    if n < 2 {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: "the y-mapped integrand diverges at y = 0 for n < 2".into(),
        });
    }
    let table = alpha_table(n)?;
    Ok(mapped_pi_with(ctx, &table, y))
}

pub fn mapped_pi_with(ctx: &PrecisionContext, table: &CoefficientTable, y: &Real) -> Complex {
    if y.is_zero() {
        return ctx.zero();
    }
    let prec = ctx.prec();
    let mut x = Real::with_val(prec, y.recip_ref());
    x -= 1u32;
    let amp = f_derivative_with(ctx, table, &x) / Real::with_val(prec, y.square_ref());
    let mut z = ctx.exp_i_pi(&x);
    z *= &amp;
    z
}

/// Integrand of the inverse map x = 1/u on u ∈ [0, 1]:
/// e^{iπ/u} f^{(n)}(1/u) / u², and 0 at u = 0.
pub fn inverse_map_with(ctx: &PrecisionContext, table: &CoefficientTable, u: &Real) -> Complex {
    if u.is_zero() {
        return ctx.zero();
    }
    let prec = ctx.prec();
    let x = Real::with_val(prec, u.recip_ref());
    let amp = f_derivative_with(ctx, table, &x) / Real::with_val(prec, u.square_ref());
    let mut z = ctx.exp_i_pi(&x);
    z *= &amp;
    z
}

/// Integrand of the exponential-scaling algorithm on u = e^{−z} ∈ [0, 1]:
/// e^{iπ/u} u^{−u} Σ β_{n,r,s} (−log u)^s u^{r−2}, and 0 at u = 0.
pub fn mapped_integrand_esc(ctx: &PrecisionContext, n: u32, u: &Real) -> Result<Complex> {
    if n < 1 {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: "the u-mapped integrand needs at least one partial integration".into(),
        });
    }
    let table = beta_table(n)?;
    Ok(mapped_esc_with(ctx, &table, u))
}

pub fn mapped_esc_with(ctx: &PrecisionContext, table: &CoefficientTable, u: &Real) -> Complex {
    if u.is_zero() {
        return ctx.zero();
    }
    let prec = ctx.prec();
    let z = -Real::with_val(prec, u.ln_ref());
    let sum = table.eval(ctx, &z, u);
    let amp = Real::with_val(prec, &z * u).exp() * sum / Real::with_val(prec, u.square_ref());
    let x = Real::with_val(prec, u.recip_ref());
    let mut w = ctx.exp_i_pi(&x);
    w *= &amp;
    w
}

/// h_n(z) = e^{z e^{−z}} Σ β_{n,r,s} z^s e^{−rz}.
pub fn h_beta(ctx: &PrecisionContext, n: u32, z: &Real) -> Result<Real> {
    let table = beta_table(n)?;
    let prec = ctx.prec();
    let u = Real::with_val(prec, -z).exp();
    let amp = Real::with_val(prec, z * &u).exp();
    Ok(amp * table.eval(ctx, z, &u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn table_of(pairs: &[((u32, u32), i64)]) -> BTreeMap<(u32, u32), Integer> {
        pairs.iter().map(|&(k, v)| (k, Integer::from(v))).collect()
    }

    fn close(a: &Real, b: &Real, tol: f64) -> bool {
        Real::with_val(a.prec(), a - b).abs() < tol
    }

    #[test]
    fn alpha_low_orders() {
        assert_eq!(alpha_table(0).unwrap().entries(), &table_of(&[((0, 0), 1)]));
        assert_eq!(
            alpha_table(1).unwrap().entries(),
            &table_of(&[((2, 0), 1), ((2, 1), -1)])
        );
        // (1 − 3x + 2(x−1) log x + log² x) / x⁴
        assert_eq!(
            alpha_table(2).unwrap().entries(),
            &table_of(&[((3, 0), -3), ((3, 1), 2), ((4, 0), 1), ((4, 1), -2), ((4, 2), 1)])
        );
    }

    #[test]
    fn beta_low_orders() {
        let b0 = beta_table(0).unwrap();
        assert_eq!(b0.entries(), &table_of(&[((2, 0), 1), ((2, 1), -1)]));
        assert_eq!(b0.min_r(), 2);
        assert_eq!(
            beta_table(1).unwrap().entries(),
            &table_of(&[((3, 0), -3), ((3, 1), 2), ((4, 0), 1), ((4, 1), -2), ((4, 2), 1)])
        );
        for n in 0..=12 {
            assert_eq!(beta_table(n).unwrap().min_r(), n + 2);
        }
    }

    #[test]
    fn index_bounds() {
        for n in 0..=12 {
            let a = alpha_table(n).unwrap();
            assert!(a.max_r() <= 2 * n && a.max_s() <= n);
            let b = beta_table(n).unwrap();
            assert!(b.max_r() <= 2 * n + 2 && b.max_s() <= n + 1);
        }
    }

    #[test]
    fn cache_rejects_large_orders() {
        assert!(matches!(
            alpha_table(MAX_ORDER + 1),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn derivative_values() {
        let c = ctx();
        let four = f_derivative(&c, 0, &c.real(4)).unwrap();
        assert!(close(&four, &c.real(2).sqrt(), 1e-55));
        assert_eq!(f_derivative(&c, 1, &c.real(1)).unwrap(), 1);
        let e = c.real(1).exp();
        assert!(f_derivative(&c, 1, &e).unwrap().abs() < 1e-55);
        assert!(f_derivative(&c, 2, &e).unwrap() < 0);
        assert!(matches!(
            f_derivative(&c, 1, &c.real(0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn boundary_values() {
        let c = ctx();
        assert!(boundary_terms(&c, 0).unwrap().value.is_zero());
        let b1 = boundary_terms(&c, 1).unwrap().value;
        let two_over_pi = Real::with_val(c.prec(), 2u32) / c.pi();
        assert!(b1.real().is_zero());
        assert!(close(b1.imag(), &-two_over_pi.clone(), 1e-58));
        let b2 = boundary_terms(&c, 2).unwrap().value;
        let inv_pi2 = Real::with_val(c.prec(), c.pi().square()).recip();
        assert!(close(b2.real(), &inv_pi2, 1e-58));
        assert!(close(b2.imag(), &-two_over_pi, 1e-58));
    }

    #[test]
    fn boundary_terms_approach_target() {
        let c = ctx();
        let reference = c.complex((
            c.parse_real("0.0707760393115288035395336").unwrap(),
            c.parse_real("-0.6840003894379321291827445").unwrap(),
        ));
        let dist = |n| {
            let b = boundary_terms(&c, n).unwrap().value;
            Complex::with_val(c.prec(), &b - &reference).abs().real().to_f64()
        };
        // distances for n = 1..9: .085 .056 .035 .017 .030 .099 .25 .55 1.06
        let d: Vec<f64> = (1..=9).map(dist).collect();
        let best = (0..d.len()).min_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap() + 1;
        assert_eq!(best, 4);
        assert!(dist(5) < dist(2));
        assert!(dist(6) > dist(2));
    }

    #[test]
    fn mapped_pi_values() {
        let c = ctx();
        let half = c.parse_real("0.5").unwrap();
        for n in [2, 4, 6] {
            let v = mapped_integrand_pi(&c, n, &half).unwrap();
            let f1 = f_derivative(&c, n, &c.real(1)).unwrap();
            assert!(close(v.real(), &Real::with_val(c.prec(), &f1 * -4i32), 1e-50));
            assert!(v.imag().clone().abs() < 1e-50);
        }
        assert!(mapped_integrand_pi(&c, 2, &c.real(0)).unwrap().is_zero());
        let tiny = c.parse_real("1e-8").unwrap();
        let v = mapped_integrand_pi(&c, 2, &tiny).unwrap();
        assert!(v.abs().real().clone() < 1e-5);
        let quarter = c.parse_real("0.25").unwrap();
        let v = mapped_integrand_pi(&c, 6, &quarter).unwrap();
        let f6 = f_derivative(&c, 6, &c.real(3)).unwrap();
        assert!(close(v.real(), &Real::with_val(c.prec(), &f6 * -16i32), 1e-45));
        assert!(v.imag().clone().abs() < 1e-45);
        assert!(matches!(
            mapped_integrand_pi(&c, 1, &half),
            Err(Error::UnsupportedOrder { order: 1, .. })
        ));
    }

    #[test]
    fn mapped_esc_values() {
        let c = ctx();
        let one = c.real(1);
        for n in [1, 3, 6] {
            let v = mapped_integrand_esc(&c, n, &one).unwrap();
            let h0 = Real::with_val(c.prec(), &beta_table(n).unwrap().sum_log_free());
            // e^{iπ} = −1
            assert!(close(v.real(), &-h0, 1e-50));
        }
        assert!(mapped_integrand_esc(&c, 1, &c.real(0)).unwrap().is_zero());
        let tiny = c.parse_real("1e-8").unwrap();
        let v = mapped_integrand_esc(&c, 1, &tiny).unwrap();
        assert!(v.abs().real().clone() < 1e-6);
        // h₁(1) = e^{1/e}[e^{−3}(−3+2) + e^{−4}(1−2+1)] = −e^{1/e−3}
        let e = c.real(1).exp();
        let h1 = h_beta(&c, 1, &c.real(1)).unwrap();
        let expected = -Real::with_val(c.prec(), Real::with_val(c.prec(), e.recip_ref()) - 3u32).exp();
        assert!(close(&h1, &expected, 1e-55));
        let u = Real::with_val(c.prec(), e.recip_ref());
        let v = mapped_integrand_esc(&c, 1, &u).unwrap();
        let mut want = c.exp_i_pi(&e);
        want *= Real::with_val(c.prec(), &expected * &e) * &e;
        assert!(Complex::with_val(c.prec(), &v - &want).abs().real().clone() < 1e-50);
        assert!(mapped_integrand_esc(&c, 0, &u).is_err());
    }
}
