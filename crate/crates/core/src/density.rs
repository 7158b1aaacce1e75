//! Quantized densities of real random variables and the min/sum recursion of
//! the `(T, ω)` tree process.
//!
//! A [`QuantizedDensity`] stores probability masses at the grid points `δk`,
//! `k ∈ [lo, hi]`. Each mass is read as spread uniformly over its cell
//! `[δ(k-½), δ(k+½)]`, which makes the c.d.f. piecewise linear; re-gridding
//! (scaling, coarsening) redistributes masses by cell overlap and therefore
//! preserves total mass and mean exactly. Mass that falls off either end of
//! the grid is not discarded but booked as truncated lower / upper tail mass.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::numeric::{self, grid_golden_min, log_sum_exp};
use crate::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.005;
pub const DEFAULT_SPAN_SIGMAS: f64 = 12.0;
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;
/// Tail mass below which grid ends are trimmed after each operation.
pub const DEFAULT_TRIM_MASS: f64 = 1e-18;
/// Products cheaper than this many multiply-adds skip the FFT.
pub const DIRECT_CONVOLUTION_LIMIT: f64 = 1e9;

/// Grid `δ·[lo, hi]` plus the tail mass a density on it may lose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationSpec {
    pub delta: f64,
    pub lo: i64,
    pub hi: i64,
    pub tail_tolerance: f64,
}

impl QuantizationSpec {
    pub fn new(delta: f64, lo: i64, hi: i64, tail_tolerance: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        if lo >= hi {
            return Err(Error::InvalidArgument(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if !(0.0..=1.0).contains(&tail_tolerance) {
            return Err(Error::InvalidArgument(format!(
                "tail tolerance must lie in [0, 1], got {tail_tolerance}"
            )));
        }
        Ok(QuantizationSpec {
            delta,
            lo,
            hi,
            tail_tolerance,
        })
    }

    /// Smallest grid of step `delta` whose points cover `[a, b]`.
    pub fn covering(delta: f64, a: f64, b: f64, tail_tolerance: f64) -> Result<Self> {
        let lo = (a / delta).floor() as i64;
        let hi = ((b / delta).ceil() as i64).max(lo + 1);
        Self::new(delta, lo, hi, tail_tolerance)
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedDensity {
    delta: f64,
    offset: i64,
    pdf: Vec<f64>,
    cdf: Vec<f64>,
    lower_tail: f64,
    upper_tail: f64,
    tail_tolerance: f64,
}

/// `E e^{-tX}` together with the lower-tail mass it could not see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub value: f64,
    /// Truncated mass below the grid. Its true contribution is at least
    /// `lower_tail_mass · e^{-t x_min}`, so the estimate may be biased low.
    pub lower_tail_mass: f64,
    pub lower_tail_floor: f64,
}

impl LaplaceEstimate {
    pub fn possibly_biased(&self) -> bool {
        self.lower_tail_mass > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceMin {
    pub t_star: f64,
    pub value: f64,
    /// The minimiser hit `t_max`; the true minimum may lie further out.
    pub at_boundary: bool,
}

impl QuantizedDensity {
    /// Build from raw masses. Exact zeros at either end are dropped.
    pub fn from_masses(
        delta: f64,
        offset: i64,
        pdf: Vec<f64>,
        lower_tail: f64,
        upper_tail: f64,
        tail_tolerance: f64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        if pdf.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument("masses must be finite and non-negative".into()));
        }
        let mut d = QuantizedDensity {
            delta,
            offset,
            pdf,
            cdf: Vec::new(),
            lower_tail,
            upper_tail,
            tail_tolerance,
        };
        d.strip_zeros();
        d.refresh_cdf();
        Ok(d)
    }

    /// Quantize a distribution given by its c.d.f. and survival function:
    /// point `δk` receives the mass of its cell. Mass beyond the grid goes to
    /// the tails, which must stay within the spec's tolerance.
    pub fn from_distribution<F, S>(spec: &QuantizationSpec, cdf: F, sf: S) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        S: Fn(f64) -> f64,
    {
        let delta = spec.delta;
        let edge = |k: i64| (k as f64 - 0.5) * delta;
        let mut pdf = Vec::with_capacity(spec.len());
        for k in spec.lo..=spec.hi {
            let (a, b) = (edge(k), edge(k + 1));
            let fa = cdf(a);
            let m = if fa < 0.5 { cdf(b) - fa } else { sf(a) - sf(b) };
            pdf.push(m.max(0.0));
        }
        let lower = cdf(edge(spec.lo));
        let upper = sf(edge(spec.hi + 1));
        if lower + upper > spec.tail_tolerance {
            return Err(Error::GridTooSmall {
                mass: lower + upper,
                tolerance: spec.tail_tolerance,
            });
        }
        Self::from_masses(delta, spec.lo, pdf, lower, upper, spec.tail_tolerance)
    }

    /// `N(mean, sigma²)` quantized on `spec`.
    pub fn gaussian(mean: f64, sigma: f64, spec: &QuantizationSpec) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        Self::from_distribution(
            spec,
            |x| numeric::normal_cdf(x - mean, sigma),
            |x| numeric::normal_sf(x - mean, sigma),
        )
    }

    /// Point masses snapped to the nearest point of the grid `δℤ`.
    pub fn from_point_masses(delta: f64, points: &[(f64, f64)], tail_tolerance: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("no point masses given".into()));
        }
        let ks: Vec<i64> = points.iter().map(|(x, _)| (x / delta).round() as i64).collect();
        let lo = *ks.iter().min().unwrap();
        let hi = *ks.iter().max().unwrap();
        let mut pdf = vec![0.0; (hi - lo + 1) as usize];
        for (k, (_, p)) in ks.iter().zip(points) {
            pdf[(k - lo) as usize] += p;
        }
        let total: f64 = pdf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("point masses sum to {total}, not 1")));
        }
        Self::from_masses(delta, lo, pdf, 0.0, 0.0, tail_tolerance)
    }

    pub fn point_mass(delta: f64, x: f64) -> Self {
        Self::from_point_masses(delta, &[(x, 1.0)], DEFAULT_TAIL_TOLERANCE).expect("single point")
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Grid index of the first stored point.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn spec(&self) -> QuantizationSpec {
        QuantizationSpec {
            delta: self.delta,
            lo: self.offset,
            hi: self.offset + self.pdf.len() as i64 - 1,
            tail_tolerance: self.tail_tolerance,
        }
    }

    pub fn pdf(&self) -> &[f64] {
        &self.pdf
    }

    /// Running sum of masses including the lower tail.
    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    pub fn len(&self) -> usize {
        self.pdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pdf.is_empty()
    }

    pub fn lower_tail(&self) -> f64 {
        self.lower_tail
    }

    pub fn upper_tail(&self) -> f64 {
        self.upper_tail
    }

    pub fn truncated_mass(&self) -> f64 {
        self.lower_tail + self.upper_tail
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn retained_mass(&self) -> f64 {
        self.pdf.iter().sum()
    }

    pub fn x(&self, i: usize) -> f64 {
        (self.offset + i as i64) as f64 * self.delta
    }

    /// `(x, mass)` for every stored grid point.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pdf.iter().enumerate().map(move |(i, &p)| (self.x(i), p))
    }

    /// Mean of the retained (on-grid) part.
    pub fn mean(&self) -> f64 {
        let m: f64 = self.points().map(|(x, p)| x * p).sum();
        m / self.retained_mass()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let v: f64 = self.points().map(|(x, p)| (x - mu).powi(2) * p).sum();
        v / self.retained_mass()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Piecewise-linear c.d.f. at an arbitrary `x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let u = x / self.delta + 0.5 - self.offset as f64;
        if u <= 0.0 {
            return self.lower_tail;
        }
        let i = u.floor() as usize;
        if i >= self.pdf.len() {
            return 1.0 - self.upper_tail;
        }
        let before = if i == 0 { self.lower_tail } else { self.cdf[i - 1] };
        before + (u - i as f64) * self.pdf[i]
    }

    /// Kolmogorov–Smirnov distance between this density and the empirical
    /// distribution of `samples` (sorted in place).
    pub fn kolmogorov_distance(&self, samples: &mut [f64]) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &s) in samples.iter().enumerate() {
            let f = self.cdf_at(s);
            d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
        }
        d
    }

    fn refresh_cdf(&mut self) {
        let mut acc = self.lower_tail;
        self.cdf = self
            .pdf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
    }

    fn strip_zeros(&mut self) {
        let first = self.pdf.iter().position(|&p| p > 0.0);
        match first {
            None => {
                // keep a single zero cell so the grid stays well formed
                self.pdf = vec![0.0];
            }
            Some(f) => {
                let last = self.pdf.iter().rposition(|&p| p > 0.0).unwrap();
                self.pdf.truncate(last + 1);
                self.pdf.drain(..f);
                self.offset += f as i64;
            }
        }
    }

    /// Move end cells into the tails while the moved mass stays at or below
    /// `mass` on each side.
    pub fn trim(&mut self, mass: f64) {
        let mut moved = 0.0;
        let mut first = 0;
        while first + 1 < self.pdf.len() && moved + self.pdf[first] <= mass {
            moved += self.pdf[first];
            first += 1;
        }
        self.lower_tail += moved;
        let mut moved = 0.0;
        let mut last = self.pdf.len() - 1;
        while last > first && moved + self.pdf[last] <= mass {
            moved += self.pdf[last];
            last -= 1;
        }
        self.upper_tail += moved;
        self.pdf.truncate(last + 1);
        self.pdf.drain(..first);
        self.offset += first as i64;
        self.strip_zeros();
        self.refresh_cdf();
    }

    /// Density of `stretch · X` re-gridded onto step `target_delta`.
    fn resample(&self, stretch: f64, target_delta: f64) -> Self {
        let width = stretch * self.delta / target_delta;
        let start = stretch * (self.offset as f64 - 0.5) * self.delta / target_delta + 0.5;
        let aligned = (width - 1.0).abs() < 1e-12 && (start - start.round()).abs() < 1e-9;
        let (offset, pdf) = if aligned {
            (start.round() as i64, self.pdf.clone())
        } else {
            let offset = start.floor() as i64;
            let end = start + width * self.pdf.len() as f64;
            let len = (end.ceil() as i64 - offset).max(1) as usize;
            let mut out = vec![0.0; len];
            for (i, &p) in self.pdf.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let a = start + width * i as f64 - offset as f64;
                let b = a + width;
                let ja = (a.floor() as usize).min(len - 1);
                let jb = ((b.ceil() as usize).max(ja + 1)).min(len);
                let mut given = 0.0;
                for j in ja..jb {
                    if j + 1 == jb {
                        out[j] += p - given;
                    } else {
                        let overlap = (b.min(j as f64 + 1.0) - a.max(j as f64)).max(0.0);
                        let share = p * overlap / width;
                        out[j] += share;
                        given += share;
                    }
                }
            }
            (offset, out)
        };
        let mut d = QuantizedDensity {
            delta: target_delta,
            offset,
            pdf,
            cdf: Vec::new(),
            lower_tail: self.lower_tail,
            upper_tail: self.upper_tail,
            tail_tolerance: self.tail_tolerance,
        };
        d.strip_zeros();
        d.refresh_cdf();
        d
    }

    /// Density of `omega · X` on the stretched grid `omega·δ` (exact).
    pub fn scale(&self, omega: f64) -> Result<Self> {
        self.scale_to(omega, omega * self.delta)
    }

    /// Density of `omega · X`, re-gridded onto step `target_delta`.
    pub fn scale_to(&self, omega: f64, target_delta: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {omega}")));
        }
        if !(target_delta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "target step must be positive, got {target_delta}"
            )));
        }
        Ok(self.resample(omega, target_delta))
    }

    /// Density of `factor · X` when `X` lives on the points `δk` (a lattice
    /// variable such as a BSC LLR). Masses move to `δ·factor·k` without any
    /// smoothing, so the step is unchanged.
    pub fn scale_lattice(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("lattice scale must be positive".into()));
        }
        let mut pdf = vec![0.0; (self.pdf.len() - 1) * factor + 1];
        for (i, &p) in self.pdf.iter().enumerate() {
            pdf[i * factor] = p;
        }
        Self::from_masses(
            self.delta,
            self.offset * factor as i64,
            pdf,
            self.lower_tail,
            self.upper_tail,
            self.tail_tolerance,
        )
    }

    /// Same distribution on a grid of step `target_delta`.
    pub fn regrid(&self, target_delta: f64) -> Result<Self> {
        self.scale_to(1.0, target_delta)
    }

    /// Density of the minimum of `n` i.i.d. copies, with
    /// `F_min = 1 - (1 - F)^n` at every grid point.
    pub fn min_of(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("minimum of zero variables".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        // Survival S_k = P(X > x_k), accumulated from the top so the upper
        // tail keeps full precision. The mass S_{k-1}^n - S_k^n is expanded
        // as p_k · Σ_i S_{k-1}^i S_k^{n-1-i} to avoid cancellation where S≈1.
        let len = self.pdf.len();
        let mut pdf = vec![0.0; len];
        let mut s_k = self.upper_tail;
        for k in (0..len).rev() {
            let p = self.pdf[k];
            let s_prev = s_k + p;
            // acc = Σ_{i=0}^{n-1} s_prev^i s_k^{n-1-i}
            let mut acc = 0.0;
            let mut a = 1.0;
            for _ in 0..n {
                acc = acc * s_k + a;
                a *= s_prev;
            }
            pdf[k] = p * acc;
            s_k = s_prev;
        }
        let lower = -(n as f64 * (-self.lower_tail).ln_1p()).exp_m1();
        let upper = self.upper_tail.powi(n as i32);
        let mut d = QuantizedDensity {
            delta: self.delta,
            offset: self.offset,
            pdf,
            cdf: Vec::new(),
            lower_tail: lower,
            upper_tail: upper,
            tail_tolerance: self.tail_tolerance,
        };
        d.strip_zeros();
        d.refresh_cdf();
        Ok(d)
    }

    /// Density of the sum of `d` i.i.d. copies.
    pub fn convolve_power(&self, d: usize) -> Result<Self> {
        convolve_product(&[(self, d)])
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        convolve_product(&[(self, 1), (other, 1)])
    }

    /// Reference O(K²) convolution in the time domain.
    pub fn convolve_direct(&self, other: &Self) -> Result<Self> {
        check_same_step(self, other)?;
        let mut out = vec![0.0; self.pdf.len() + other.pdf.len() - 1];
        for (i, &a) in self.pdf.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.pdf.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let (lower, upper) = product_tails(&[(self, 1), (other, 1)], out.iter().sum());
        Self::from_masses(
            self.delta,
            self.offset + other.offset,
            out,
            lower,
            upper,
            self.tail_tolerance.max(other.tail_tolerance),
        )
    }

    pub fn ln_laplace(&self, t: f64) -> f64 {
        let terms: Vec<f64> = self
            .points()
            .filter(|(_, p)| *p > 0.0)
            .map(|(x, p)| p.ln() - t * x)
            .collect();
        log_sum_exp(terms)
    }

    /// Riemann sum `Σ_k p_k e^{-t δ k}` approximating `E e^{-tX}`.
    pub fn laplace(&self, t: f64) -> f64 {
        self.ln_laplace(t).exp()
    }

    pub fn laplace_estimate(&self, t: f64) -> LaplaceEstimate {
        let x_min = (self.offset as f64 - 0.5) * self.delta;
        LaplaceEstimate {
            value: self.laplace(t),
            lower_tail_mass: self.lower_tail,
            lower_tail_floor: self.lower_tail * (-t * x_min).exp(),
        }
    }

    /// Minimise `E e^{-tX}` over `t ∈ [0, t_max]`: 200-point scan, then
    /// golden-section refinement.
    pub fn min_laplace(&self, t_max: f64) -> Result<LaplaceMin> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
        }
        let tol = 1e-5 * t_max.min(1.0);
        let m = grid_golden_min(|t| self.ln_laplace(t), 0.0, t_max, 200, tol);
        Ok(LaplaceMin {
            t_star: m.x,
            value: m.value.exp(),
            at_boundary: m.at_upper_boundary,
        })
    }

    /// [`min_laplace`](Self::min_laplace) with `t_max` picked from the
    /// moments and widened until the minimiser is interior.
    pub fn min_laplace_auto(&self) -> Result<LaplaceMin> {
        let mean = self.mean();
        let var = self.variance().max(self.delta * self.delta);
        let mut t_max = if mean > 0.0 { 4.0 * mean / var } else { 1.0 / self.std_dev().max(self.delta) };
        let mut best = self.min_laplace(t_max)?;
        for _ in 0..12 {
            if !best.at_boundary {
                break;
            }
            t_max *= 4.0;
            best = self.min_laplace(t_max)?;
        }
        Ok(best)
    }
}

fn check_same_step(a: &QuantizedDensity, b: &QuantizedDensity) -> Result<()> {
    if ((a.delta - b.delta) / a.delta).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "grid steps differ: {} vs {}",
            a.delta, b.delta
        )));
    }
    Ok(())
}

/// Tails of a sum: any lower-truncated summand makes the sum's position
/// unknown, so that mass is booked as lower tail; the rest of the lost mass
/// is upper tail.
fn product_tails(factors: &[(&QuantizedDensity, usize)], retained: f64) -> (f64, f64) {
    let ln_keep_lower: f64 = factors
        .iter()
        .map(|(f, c)| *c as f64 * (-f.lower_tail).ln_1p())
        .sum();
    let lower = -ln_keep_lower.exp_m1();
    let upper = (1.0 - lower - retained).max(0.0);
    (lower, upper)
}

/// Multiply-adds of the time-domain chain for `factors`.
fn direct_cost(factors: &[(&QuantizedDensity, usize)]) -> f64 {
    let mut acc_len = 0usize;
    let mut cost = 0.0;
    for (f, c) in factors {
        for _ in 0..*c {
            if acc_len > 0 {
                cost += (acc_len * f.len()) as f64;
                acc_len += f.len() - 1;
            } else {
                acc_len = f.len();
            }
        }
    }
    cost
}

/// Density of `Σ_i (sum of c_i copies of f_i)`.
///
/// Small products are summed directly. Larger ones go through the frequency
/// domain in one pass, with enough zero padding to avoid wrap-around; the
/// round-off there leaves an absolute noise floor near `1e-17` on every
/// output cell.
pub fn convolve_product(factors: &[(&QuantizedDensity, usize)]) -> Result<QuantizedDensity> {
    let factors: Vec<(&QuantizedDensity, usize)> =
        factors.iter().copied().filter(|(_, c)| *c > 0).collect();
    let Some(&(first, _)) = factors.first() else {
        return Err(Error::InvalidArgument("empty convolution".into()));
    };
    for (f, _) in &factors {
        check_same_step(first, f)?;
    }
    if factors.len() == 1 && factors[0].1 == 1 {
        return Ok(first.clone());
    }
    if direct_cost(&factors) <= DIRECT_CONVOLUTION_LIMIT {
        let mut copies = factors.iter().flat_map(|(f, c)| std::iter::repeat_n(*f, *c));
        let mut acc = copies.next().expect("non-empty").clone();
        for f in copies {
            acc = acc.convolve_direct(f)?;
        }
        return Ok(acc);
    }
    let out_len: usize = 1 + factors.iter().map(|(f, c)| c * (f.len() - 1)).sum::<usize>();
    let offset: i64 = factors.iter().map(|(f, c)| *c as i64 * f.offset).sum();
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut acc = vec![Complex::new(1.0, 0.0); size];
    for (f, c) in &factors {
        let mut buf: Vec<Complex<f64>> = f
            .pdf
            .iter()
            .map(|&p| Complex::new(p, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(size)
            .collect();
        fwd.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a *= b.powu(*c as u32);
        }
    }
    inv.process(&mut acc);
    let scale = 1.0 / size as f64;
    let pdf: Vec<f64> = acc[..out_len].iter().map(|z| (z.re * scale).max(0.0)).collect();
    let (lower, upper) = product_tails(&factors, pdf.iter().sum());
    let tol = factors.iter().map(|(f, _)| f.tail_tolerance).fold(0.0, f64::max);
    QuantizedDensity::from_masses(first.delta, offset, pdf, lower, upper, tol)
}

/// How the grid step evolves with the level in [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridPolicy {
    /// Keep the base step; arrays grow with the support.
    Fixed,
    /// Step at level `l` is `δ·ω_l/ω_0`, so the array length stays roughly
    /// constant under geometric weights (step doubling for `ω_l = 2^l`).
    FollowWeights,
    /// Keep the base step and treat the base density as a lattice variable:
    /// weights must be integers and scaling moves point masses exactly.
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub grid: GridPolicy,
    pub trim_mass: f64,
    pub tail_tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            grid: GridPolicy::FollowWeights,
            trim_mass: DEFAULT_TRIM_MASS,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

impl EvolveOptions {
    pub fn fixed() -> Self {
        EvolveOptions {
            grid: GridPolicy::Fixed,
            ..Default::default()
        }
    }

    pub fn lattice() -> Self {
        EvolveOptions {
            grid: GridPolicy::Lattice,
            ..Default::default()
        }
    }
}

/// Densities of `Y_l` and `X_l` at one level of the recursion.
#[derive(Debug, Clone)]
pub struct Level {
    pub y: QuantizedDensity,
    pub x: QuantizedDensity,
}

/// Run the recursion
///
/// ```text
/// Y_0 = ω_0 γ
/// X_l = min(Y_l^(1), …, Y_l^(d_R - 1))
/// Y_l = ω_l γ + X_{l-1}^(1) + … + X_{l-1}^(d_L - 1)
/// ```
///
/// for `l = 0..=s` where `s = omegas.len() - 1` and `base` is the density of
/// `γ`. Returns every level.
pub fn evolve_levels(
    base: &QuantizedDensity,
    omegas: &[f64],
    d_l: usize,
    d_r: usize,
    opts: &EvolveOptions,
) -> Result<Vec<Level>> {
    if omegas.is_empty() {
        return Err(Error::InvalidArgument("need at least one level weight".into()));
    }
    if omegas.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument("level weights must be finite and non-negative".into()));
    }
    if d_l == 0 || d_r < 2 {
        return Err(Error::InvalidArgument(format!(
            "need d_L >= 1 and d_R >= 2, got ({d_l},{d_r})"
        )));
    }
    if opts.grid == GridPolicy::FollowWeights && omegas.iter().any(|w| *w == 0.0) {
        return Err(Error::InvalidArgument(
            "zero level weights need the fixed grid policy".into(),
        ));
    }
    if opts.grid == GridPolicy::Lattice && omegas.iter().any(|w| w.fract() != 0.0) {
        return Err(Error::InvalidArgument(
            "the lattice grid policy needs integer level weights".into(),
        ));
    }
    let step = |l: usize| match opts.grid {
        GridPolicy::Fixed | GridPolicy::Lattice => base.delta,
        GridPolicy::FollowWeights => base.delta * omegas[l] / omegas[0],
    };
    let weighted = |l: usize| -> Result<QuantizedDensity> {
        if omegas[l] == 0.0 {
            Ok(QuantizedDensity::point_mass(step(l), 0.0))
        } else if opts.grid == GridPolicy::Lattice {
            base.scale_lattice(omegas[l] as usize)
        } else {
            base.scale_to(omegas[l], step(l))
        }
    };
    let mut levels: Vec<Level> = Vec::with_capacity(omegas.len());
    for l in 0..omegas.len() {
        let mut y = if l == 0 {
            weighted(0)?
        } else {
            let g = weighted(l)?;
            let prev = levels[l - 1].x.regrid(step(l))?;
            convolve_product(&[(&g, 1), (&prev, d_l - 1)])?
        };
        y.trim(opts.trim_mass);
        let mut x = y.min_of(d_r - 1)?;
        x.trim(opts.trim_mass);
        let lost = x.truncated_mass();
        if lost > opts.tail_tolerance {
            return Err(Error::TailOverflow {
                level: l,
                mass: lost,
                tolerance: opts.tail_tolerance,
            });
        }
        levels.push(Level { y, x });
    }
    Ok(levels)
}

/// Density of `X_s` (see [`evolve_levels`]).
pub fn evolve(
    base: &QuantizedDensity,
    omegas: &[f64],
    d_l: usize,
    d_r: usize,
    opts: &EvolveOptions,
) -> Result<QuantizedDensity> {
    Ok(evolve_levels(base, omegas, d_l, d_r, opts)?
        .pop()
        .expect("at least one level")
        .x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn awgn_base(sigma: f64) -> QuantizedDensity {
        let spec = QuantizationSpec::covering(
            DEFAULT_DELTA,
            1.0 - DEFAULT_SPAN_SIGMAS * sigma,
            1.0 + DEFAULT_SPAN_SIGMAS * sigma,
            DEFAULT_TAIL_TOLERANCE,
        )
        .unwrap();
        QuantizedDensity::gaussian(1.0, sigma, &spec).unwrap()
    }

    fn l1(a: &QuantizedDensity, b: &QuantizedDensity) -> f64 {
        assert!((a.delta() - b.delta()).abs() < 1e-15);
        let lo = a.offset().min(b.offset());
        let hi = (a.offset() + a.len() as i64).max(b.offset() + b.len() as i64);
        let get = |d: &QuantizedDensity, k: i64| {
            let i = k - d.offset();
            if i < 0 || i >= d.len() as i64 {
                0.0
            } else {
                d.pdf()[i as usize]
            }
        };
        (lo..hi).map(|k| (get(a, k) - get(b, k)).abs()).sum()
    }

    fn mass_balance(d: &QuantizedDensity) -> f64 {
        (d.retained_mass() + d.truncated_mass() - 1.0).abs()
    }

    #[test]
    fn gaussian_moments() {
        let f = awgn_base(0.7);
        assert!((f.mean() - 1.0).abs() < 1e-3);
        assert!((f.std_dev() - 0.7).abs() < 1e-3);
        assert!(mass_balance(&f) < 1e-9);
    }

    #[test]
    fn grid_too_small_is_reported() {
        let spec = QuantizationSpec::covering(0.01, 0.0, 2.0, 1e-9).unwrap();
        assert!(matches!(
            QuantizedDensity::gaussian(1.0, 0.7, &spec),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn scale_by_one_is_identity() {
        let f = awgn_base(0.7);
        let g = f.scale(1.0).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn scaling_is_linear_in_mean() {
        let f = awgn_base(0.6);
        for omega in [2.0, 3.0, 0.5] {
            let g = f.scale_to(omega, f.delta()).unwrap();
            assert!((g.mean() - omega * f.mean()).abs() < f.delta());
            assert!(mass_balance(&g) < 1e-9);
        }
    }

    #[test]
    fn scaled_base_matches_direct_quantization() {
        let sigma = 0.7;
        let f = awgn_base(sigma);
        for omega in [2.0, 4.0, 8.0] {
            let scaled = f.scale(omega).unwrap();
            let spec = scaled.spec();
            let direct = QuantizedDensity::gaussian(omega, omega * sigma, &spec).unwrap();
            assert!(l1(&scaled, &direct) <= 1e-6, "omega {omega}");
        }
    }

    #[test]
    fn regrid_preserves_mass_and_mean() {
        let f = awgn_base(0.5);
        let g = f.regrid(2.0 * f.delta()).unwrap();
        assert!((g.retained_mass() - f.retained_mass()).abs() < 1e-12);
        assert!((g.mean() - f.mean()).abs() < 1e-12);
        let h = f.regrid(0.0123).unwrap();
        assert!((h.mean() - f.mean()).abs() < 1e-9);
    }

    #[test]
    fn min_of_one_is_identity() {
        let f = awgn_base(0.7);
        assert_eq!(f.min_of(1).unwrap(), f);
    }

    #[test]
    fn min_cdf_identity_holds_pointwise() {
        let f = awgn_base(0.7);
        for n in [2usize, 5, 11] {
            let g = f.min_of(n).unwrap();
            for (i, (&fx, &gx)) in f.cdf().iter().zip(g.cdf().iter()).enumerate() {
                let expect = 1.0 - (1.0 - fx).powi(n as i32);
                assert!((gx - expect).abs() < 1e-12, "n={n} i={i}");
            }
            assert!(mass_balance(&g) < 1e-9);
        }
    }

    #[test]
    fn min_shifts_mass_left() {
        let f = awgn_base(0.7);
        let g = f.min_of(5).unwrap();
        assert!(g.mean() < 1.0);
        for (fx, gx) in f.cdf().iter().zip(g.cdf()) {
            assert!(gx + 1e-15 >= *fx);
        }
    }

    #[test]
    fn bernoulli_convolution() {
        let f = QuantizedDensity::from_point_masses(0.5, &[(0.0, 0.5), (0.5, 0.5)], 0.0).unwrap();
        let g = f.convolve_power(2).unwrap();
        assert_eq!(g.offset(), 0);
        let expect = [0.25, 0.5, 0.25];
        for (a, b) in g.pdf().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(f.convolve_power(1).unwrap(), f);
    }

    #[test]
    fn convolution_adds_cumulants() {
        let f = awgn_base(0.7).min_of(5).unwrap();
        for d in [2usize, 3, 5] {
            let g = f.convolve_power(d).unwrap();
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            assert!(rel(g.mean(), d as f64 * f.mean()) < 1e-6);
            assert!(rel(g.variance(), d as f64 * f.variance()) < 1e-6);
            assert!(mass_balance(&g) < 1e-9);
        }
    }

    #[test]
    fn fft_matches_direct_convolution() {
        let spec = QuantizationSpec::covering(0.05, -6.0, 8.0, 1e-9).unwrap();
        let f = QuantizedDensity::gaussian(1.0, 0.7, &spec).unwrap().min_of(3).unwrap();
        let g = QuantizedDensity::gaussian(2.0, 1.1, &QuantizationSpec::covering(0.05, -12.0, 16.0, 1e-9).unwrap())
            .unwrap();
        let fast = f.convolve(&g).unwrap();
        let slow = f.convolve_direct(&g).unwrap();
        assert!(l1(&fast, &slow) < 1e-12);
        let fast3 = f.convolve_power(3).unwrap();
        let slow3 = f.convolve_direct(&f).unwrap().convolve_direct(&f).unwrap();
        assert!(l1(&fast3, &slow3) < 1e-12);
    }

    #[test]
    fn laplace_basics() {
        let f = awgn_base(0.7);
        assert!((f.laplace(0.0) - 1.0).abs() < 1e-9);
        let p = QuantizedDensity::point_mass(0.01, 1.5);
        for t in [0.0, 0.3, 2.0] {
            assert!((p.laplace(t) - (-t * 1.5f64).exp()).abs() < 1e-12);
        }
        let est = f.laplace_estimate(1.0);
        assert!(est.possibly_biased());
        assert!(est.lower_tail_floor < 1e-20);
    }

    #[test]
    fn gaussian_mgf_closed_form() {
        for sigma in [0.5, 0.7, 1.0] {
            let f = awgn_base(sigma);
            for i in 0..=20 {
                let t = i as f64 * 0.1;
                let exact = (-t + 0.5 * t * t * sigma * sigma).exp();
                assert!((f.laplace(t) - exact).abs() < 1e-4, "sigma {sigma} t {t}");
            }
        }
    }

    #[test]
    fn gaussian_laplace_minimiser() {
        let sigma = 0.7;
        let f = awgn_base(sigma);
        let m = f.min_laplace(5.0).unwrap();
        assert!((m.t_star - 1.0 / (sigma * sigma)).abs() < 1e-3);
        assert!((m.value - (-1.0 / (2.0 * sigma * sigma)).exp()).abs() < 1e-5);
        assert!(!m.at_boundary);
        let b = f.min_laplace(1.0).unwrap();
        assert!(b.at_boundary);
        let auto = f.min_laplace_auto().unwrap();
        assert!((auto.t_star - m.t_star).abs() < 1e-3);
    }

    #[test]
    fn lattice_scaling_moves_point_masses() {
        let f = QuantizedDensity::from_point_masses(1.0, &[(-1.0, 0.2), (1.0, 0.8)], 1e-9).unwrap();
        let g = f.scale_lattice(4).unwrap();
        let pts: Vec<(f64, f64)> = g.points().filter(|(_, p)| *p > 0.0).collect();
        assert_eq!(pts, vec![(-4.0, 0.2), (4.0, 0.8)]);
        let levels = evolve_levels(&f, &[1.0, 2.0], 3, 6, &EvolveOptions::lattice()).unwrap();
        // Y_1 = 2γ + X_0 + X_0' only takes even values.
        for (x, p) in levels[1].y.points() {
            if p > 0.0 {
                assert_eq!(x.rem_euclid(2.0), 0.0, "x = {x}");
            }
        }
        assert!(evolve(&f, &[1.0, 1.5], 3, 6, &EvolveOptions::lattice()).is_err());
    }

    #[test]
    fn evolve_level_zero_is_min_of_base() {
        let base = awgn_base(0.7);
        let x0 = evolve(&base, &[1.0], 3, 6, &EvolveOptions::default()).unwrap();
        let mut y = base.clone();
        y.trim(DEFAULT_TRIM_MASS);
        let mut direct = y.min_of(5).unwrap();
        direct.trim(DEFAULT_TRIM_MASS);
        assert_eq!(x0, direct);
    }

    #[test]
    fn evolve_means_and_spreads_grow() {
        let base = awgn_base(0.7);
        let omegas: Vec<f64> = (0..5).map(|l| 2f64.powi(l)).collect();
        let levels = evolve_levels(&base, &omegas, 3, 6, &EvolveOptions::default()).unwrap();
        for w in levels.windows(2) {
            assert!(w[1].x.mean() > w[0].x.mean());
            assert!(w[1].x.std_dev() > w[0].x.std_dev());
            assert!(w[1].y.mean() > w[0].y.mean());
        }
        for l in &levels {
            assert!(mass_balance(&l.x) < 1e-9);
            assert!(mass_balance(&l.y) < 1e-9);
        }
        // step doubling keeps the arrays bounded
        assert!(levels[4].x.len() < 6 * levels[0].x.len());
    }

    #[test]
    fn tail_overflow_is_reported() {
        let spec = QuantizationSpec::covering(0.01, -1.0, 3.0, 1e-2).unwrap();
        let base = QuantizedDensity::gaussian(1.0, 0.7, &spec).unwrap();
        let opts = EvolveOptions {
            tail_tolerance: 1e-6,
            ..Default::default()
        };
        assert!(matches!(
            evolve(&base, &[1.0, 2.0], 3, 6, &opts),
            Err(Error::TailOverflow { level: 0, .. })
        ));
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn operations_conserve_mass(
            masses in proptest::collection::vec(0.0f64..1.0, 2..40),
            offset in -30i64..30,
            n in 1usize..8,
            d in 1usize..4,
            omega in 0.2f64..5.0,
        ) {
            let total: f64 = masses.iter().sum();
            prop_assume!(total > 1e-3);
            let pdf: Vec<f64> = masses.iter().map(|m| m / total).collect();
            let f = QuantizedDensity::from_masses(0.1, offset, pdf, 0.0, 0.0, 1e-9).unwrap();
            let g = f.min_of(n).unwrap();
            prop_assert!(mass_balance(&g) < 1e-9);
            for (a, b) in f.cdf().iter().zip(g.cdf()) {
                prop_assert!(*b + 1e-12 >= *a);
            }
            prop_assert!(mass_balance(&f.convolve_power(d).unwrap()) < 1e-9);
            prop_assert!(mass_balance(&f.scale_to(omega, 0.1).unwrap()) < 1e-9);
            let h = f.convolve_power(d).unwrap();
            prop_assert!((h.mean() - d as f64 * f.mean()).abs() < 1e-9);
        }
    }
}
