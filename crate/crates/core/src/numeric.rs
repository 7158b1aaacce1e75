//! Small numerical building blocks shared by the solver, the deviation DP and
//! the bound evaluators.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arithmetic used by the simplex tableau and the deviation DP.
///
/// `f64` compares against a tolerance of `1e-9`; [`BigRational`] is exact.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + Zero
    + One
{
    /// Exact conversion for rationals (every finite `f64` is a dyadic rational).
    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn tolerance() -> Self;

    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }
    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }
    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    fn is_exact() -> bool;
}

pub const FLOAT_TOLERANCE: f64 = 1e-9;

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value")
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
    fn tolerance() -> Self {
        BigRational::zero()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_exact() -> bool {
        true
    }
}

/// Result of a one-dimensional minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    /// The minimiser sits on the upper end of the searched interval.
    pub at_upper_boundary: bool,
}

/// Minimise a unimodal function on `[lo, hi]`: scan `grid` equispaced points,
/// then golden-section refine around the best one until the bracket is
/// narrower than `tol`.
pub fn grid_golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> Minimum {
    let grid = grid.max(3);
    let h = (hi - lo) / (grid - 1) as f64;
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..grid {
        let v = f(lo + h * i as f64);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut a = lo + h * best.saturating_sub(1) as f64;
    let mut b = lo + h * (best + 1).min(grid - 1) as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mut x = 0.5 * (a + b);
    let mut value = f(x);
    // the grid point itself may beat the refined interior point (flat or boundary minima)
    let grid_x = lo + h * best as f64;
    if best_val < value {
        x = grid_x;
        value = best_val;
    }
    Minimum {
        x,
        value,
        at_upper_boundary: best == grid - 1 || (hi - x) <= tol,
    }
}

/// Adaptive Simpson quadrature with a relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    // Seed with a composite rule so narrow peaks are not missed by the first
    // three-point estimate.
    const PANELS: usize = 64;
    const MAX_DEPTH: u32 = 40;
    let h = (b - a) / PANELS as f64;
    let mut coarse = 0.0;
    let mut panels = Vec::with_capacity(PANELS);
    for i in 0..PANELS {
        let x0 = a + h * i as f64;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        let s = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        coarse += s.abs();
        panels.push((x0, x1, f0, fm, f1, s));
    }
    let abs_tol = (rel_tol * coarse).max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for (x0, x1, f0, fm, f1, s) in panels {
        total += simpson_rec(&f, x0, x1, f0, fm, f1, s, abs_tol / PANELS as f64, MAX_DEPTH)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::QuadratureNonconvergence);
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonconvergence);
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Bisection for the supremum of `{x : pred(x)}` on `[lo, hi]`, assuming the
/// predicate holds on an initial segment. Fails when `pred(lo)` is false or
/// `pred(hi)` is true.
pub fn bisect_supremum<P: FnMut(f64) -> Result<bool>>(
    mut pred: P,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let holds_lo = pred(lo)?;
    let holds_hi = pred(hi)?;
    if !holds_lo || holds_hi {
        return Err(Error::BracketFailure {
            lo,
            hi,
            holds_lo,
            holds_hi,
        });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if pred(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `ln Σ exp(terms)`, ignoring `-inf` entries.
pub fn log_sum_exp<I: IntoIterator<Item = f64> + Clone>(terms: I) -> f64 {
    let max = terms
        .clone()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = terms.into_iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Standard normal c.d.f. and survival function scaled to `N(0, sigma^2)`.
pub fn normal_cdf(x: f64, sigma: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / (sigma * std::f64::consts::SQRT_2))
}

pub fn normal_sf(x: f64, sigma: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / (sigma * std::f64::consts::SQRT_2))
}

pub fn normal_pdf(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let m = grid_golden_min(|x| (x - 0.3).powi(2) + 1.0, 0.0, 2.0, 200, 1e-8);
        assert!((m.x - 0.3).abs() < 1e-6);
        assert!((m.value - 1.0).abs() < 1e-12);
        assert!(!m.at_upper_boundary);
    }

    #[test]
    fn golden_flags_upper_boundary() {
        let m = grid_golden_min(|x| -x, 0.0, 1.0, 50, 1e-8);
        assert!(m.at_upper_boundary);
    }

    #[test]
    fn simpson_integrates_gaussian() {
        let v = adaptive_simpson(|x| normal_pdf(x, 0.7), -8.4, 8.4, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisection_rejects_bad_bracket() {
        let r = bisect_supremum(|x| Ok(x < 0.5), 0.6, 1.0, 1e-3);
        assert!(matches!(r, Err(Error::BracketFailure { .. })));
        let r = bisect_supremum(|x| Ok(x < 0.5), 0.0, 1.0, 1e-6).unwrap();
        assert!((r - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rational_scalar_is_exact() {
        let a = <BigRational as Scalar>::from_f64(0.1);
        let b = <BigRational as Scalar>::from_f64(0.2);
        let c = <BigRational as Scalar>::from_f64(0.1 + 0.2);
        assert!(!(a + b - c).is_zero());
    }

    #[test]
    fn log_sum_exp_handles_large_terms() {
        let v = log_sum_exp([1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
