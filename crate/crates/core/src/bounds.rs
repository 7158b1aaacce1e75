//! Contraction conditions, `σ₀` thresholds and word-error bounds for the
//! `(T, ω)` tree process.
//!
//! Two routes evaluate the uniform-weight constant: closed-form Gaussian
//! quadrature ([`uniform_condition`]) and the quantized density engine
//! ([`mbios_condition`]). The non-uniform route evolves the density of `X_s`
//! under geometric prefix weights and uses the optimal suffix weight `ρ`.

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::density::{
    evolve, EvolveOptions, GridPolicy, QuantizationSpec, QuantizedDensity, DEFAULT_DELTA,
    DEFAULT_SPAN_SIGMAS, DEFAULT_TAIL_TOLERANCE, DEFAULT_TRIM_MASS,
};
use crate::deviation::WeightVector;
use crate::numeric::{adaptive_simpson, bisect_supremum, grid_golden_min, normal_pdf, normal_sf};
use crate::{Error, Result};

/// Initial bisection bracket for `σ`.
pub const SIGMA_BRACKET: (f64, f64) = (0.3, 1.0);
pub const SIGMA_TOLERANCE: f64 = 0.002;
/// Granularity of reported thresholds.
pub const SIGMA_REPORT_STEP: f64 = 0.005;
pub const QUADRATURE_REL_TOL: f64 = 1e-8;
/// Quadrature range for `c₁`, in units of `σ`.
pub const QUADRATURE_SPAN_SIGMAS: f64 = 12.0;

const T_GRID: usize = 200;
const T_WIDENINGS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Uniform,
    NonUniform { s: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub regime: Regime,
    pub channel: Option<Channel>,
    pub d_l: usize,
    pub d_r: usize,
    /// Contraction constant; the condition holds iff `c < 1`.
    pub c: f64,
    /// `E e^{-t X_0}` at `t_star` (uniform regime).
    pub c1: Option<f64>,
    /// `(d_R − 1) E e^{-t λ}` at `t_star` (uniform regime).
    pub c2: Option<f64>,
    pub t_star: f64,
    /// Suffix weight `1/(t σ²)` (non-uniform regime, BI-AWGN).
    pub rho: Option<f64>,
    /// Multiplicative constant in front of the doubly exponential term.
    pub prefactor: f64,
    pub condition_holds: bool,
}

/// Quantization settings for the density route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantConfig {
    pub delta: f64,
    pub span_sigmas: f64,
    pub tail_tolerance: f64,
    pub trim_mass: f64,
}

impl Default for QuantConfig {
    fn default() -> Self {
        QuantConfig {
            delta: DEFAULT_DELTA,
            span_sigmas: DEFAULT_SPAN_SIGMAS,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            trim_mass: DEFAULT_TRIM_MASS,
        }
    }
}

impl QuantConfig {
    /// Scaled LLR density of `ch`. The BSC always uses unit step so that its
    /// lattice is represented exactly.
    pub fn base_density(&self, ch: &Channel) -> Result<QuantizedDensity> {
        let delta = match ch {
            Channel::Bsc { .. } => 1.0,
            Channel::BiAwgn { .. } => self.delta,
        };
        ch.llr_density(&ch.default_grid(delta, self.span_sigmas, self.tail_tolerance)?)
    }

    /// Evolution options suited to `ch`: weight-following steps for the
    /// Gaussian, exact lattice scaling for the BSC.
    pub fn evolve_options(&self, ch: &Channel) -> EvolveOptions {
        EvolveOptions {
            grid: match ch {
                Channel::Bsc { .. } => GridPolicy::Lattice,
                Channel::BiAwgn { .. } => GridPolicy::FollowWeights,
            },
            trim_mass: self.trim_mass,
            tail_tolerance: self.tail_tolerance,
        }
    }
}

fn check_degrees(d_l: usize, d_r: usize) -> Result<()> {
    if d_l <= 2 || d_r <= 2 {
        return Err(Error::InvalidArgument(format!(
            "the bounds need d_L, d_R > 2, got ({d_l},{d_r})"
        )));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// Minimise `f` (a log-value) over `t ≥ 0`, widening `[0, t_max]` until the
/// minimiser is interior. Errors raised inside `f` are surfaced.
fn minimize_t<F: FnMut(f64) -> Result<f64>>(mut f: F, mut t_max: f64) -> Result<(f64, f64)> {
    let mut err = None;
    let mut eval = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    let mut best = grid_golden_min(&mut eval, 0.0, t_max, T_GRID, 1e-7 * t_max.max(1.0));
    for _ in 0..T_WIDENINGS {
        if !best.at_upper_boundary {
            break;
        }
        t_max *= 2.0;
        best = grid_golden_min(&mut eval, 0.0, t_max, T_GRID, 1e-7 * t_max.max(1.0));
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok((best.x, best.value))
}

/// `c₁(t) = d'_R e^{-t} ∫ (1 − F(x))^{d'_R − 1} f(x) e^{-tx} dx` with
/// `F, f` the `N(0, σ²)` c.d.f. and p.d.f. and `d'_R = d_R − 1`.
pub fn uniform_c1(sigma: f64, d_r: usize, t: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let dr1 = (d_r - 1) as f64;
    let span = QUADRATURE_SPAN_SIGMAS * sigma;
    let integral = adaptive_simpson(
        |x| normal_sf(x, sigma).powf(dr1 - 1.0) * normal_pdf(x, sigma) * (-t * x).exp(),
        -span,
        span,
        QUADRATURE_REL_TOL,
    )?;
    Ok(dr1 * (-t).exp() * integral)
}

/// `c₂(t) = d'_R e^{t²σ²/2 − t}`.
pub fn uniform_c2(sigma: f64, d_r: usize, t: f64) -> f64 {
    (d_r - 1) as f64 * (0.5 * t * t * sigma * sigma - t).exp()
}

/// Uniform-weight condition for the BI-AWGN channel:
/// `c = min_t c₁(t)·c₂(t)^{1/(d_L−2)} < 1`, with `c₁` by quadrature and `c₂`
/// in closed form. The probability bound is `Π ≤ c^{-d_L}·c^{d_L d'_L^{T−1}}`,
/// so the reported prefactor is `c^{-d_L}`.
pub fn uniform_condition(sigma: f64, d_l: usize, d_r: usize) -> Result<BoundReport> {
    check_degrees(d_l, d_r)?;
    check_sigma(sigma)?;
    let k = 1.0 / (d_l - 2) as f64;
    let (t_star, ln_c) = minimize_t(
        |t| Ok(uniform_c1(sigma, d_r, t)?.ln() + k * uniform_c2(sigma, d_r, t).ln()),
        2.0 / (sigma * sigma),
    )?;
    let c = ln_c.exp();
    Ok(BoundReport {
        regime: Regime::Uniform,
        channel: Some(Channel::BiAwgn { sigma }),
        d_l,
        d_r,
        c,
        c1: Some(uniform_c1(sigma, d_r, t_star)?),
        c2: Some(uniform_c2(sigma, d_r, t_star)),
        t_star,
        rho: None,
        prefactor: c.powi(-(d_l as i32)),
        condition_holds: c < 1.0,
    })
}

/// Supremum `σ` at which [`uniform_condition`] holds, to `tol`.
pub fn uniform_threshold(d_l: usize, d_r: usize, tol: f64) -> Result<f64> {
    bisect_supremum(
        |s| Ok(uniform_condition(s, d_l, d_r)?.condition_holds),
        SIGMA_BRACKET.0,
        SIGMA_BRACKET.1,
        tol,
    )
}

/// A `t` range that comfortably contains the minimiser of `E e^{-tX}`.
fn t_scale(d: &QuantizedDensity) -> f64 {
    let sd = d.std_dev().max(d.delta());
    let mean = d.mean().abs().max(d.delta());
    (4.0 * mean / (sd * sd)).max(1.0 / sd)
}

/// Uniform-weight condition for an arbitrary MBIOS channel given the
/// quantized density of its (scaled) LLR:
///
/// ```text
/// c = min_t E e^{-t X_0} · ((d_R − 1) E e^{-tλ})^{1/(d_L−2)},   X_0 = min of d_R − 1 copies of λ
/// ```
pub fn mbios_condition(base: &QuantizedDensity, d_l: usize, d_r: usize) -> Result<BoundReport> {
    check_degrees(d_l, d_r)?;
    let k = 1.0 / (d_l - 2) as f64;
    let x0 = base.min_of(d_r - 1)?;
    let ln_dr1 = ((d_r - 1) as f64).ln();
    let (t_star, ln_c) = minimize_t(
        |t| Ok(x0.ln_laplace(t) + k * (ln_dr1 + base.ln_laplace(t))),
        t_scale(base),
    )?;
    let c = ln_c.exp();
    Ok(BoundReport {
        regime: Regime::Uniform,
        channel: None,
        d_l,
        d_r,
        c,
        c1: Some(x0.laplace(t_star)),
        c2: Some((d_r - 1) as f64 * base.laplace(t_star)),
        t_star,
        rho: None,
        prefactor: c.powi(-(d_l as i32)),
        condition_holds: c < 1.0,
    })
}

/// Non-uniform condition for an arbitrary MBIOS channel: prefix weights
/// `omegas` (levels `0..=s`), then a constant suffix weight chosen to
/// minimise `E e^{-ρ t λ}`. With `κ = min_u E e^{-uλ}`,
///
/// ```text
/// c = min_t E e^{-t X_s} · ((d_R − 1) κ)^{1/(d_L−2)},   prefactor = ((d_R − 1) κ)^{-d_L/(d_L−2)}
/// ```
///
/// For the BI-AWGN channel `κ = e^{-1/(2σ²)}`.
pub fn mbios_condition_nonuniform(
    base: &QuantizedDensity,
    omegas: &[f64],
    d_l: usize,
    d_r: usize,
    opts: &EvolveOptions,
) -> Result<BoundReport> {
    check_degrees(d_l, d_r)?;
    let s = omegas.len().checked_sub(1).ok_or_else(|| {
        Error::InvalidArgument("need at least one prefix weight".into())
    })?;
    let xs = evolve(base, omegas, d_l, d_r, opts)?;
    let m = xs.min_laplace_auto()?;
    let kappa = base.min_laplace_auto()?.value;
    Ok(nonuniform_report(s, None, d_l, d_r, m.value, m.t_star, kappa, None))
}

#[allow(clippy::too_many_arguments)]
fn nonuniform_report(
    s: usize,
    channel: Option<Channel>,
    d_l: usize,
    d_r: usize,
    min_laplace: f64,
    t_star: f64,
    kappa: f64,
    rho: Option<f64>,
) -> BoundReport {
    let k = 1.0 / (d_l - 2) as f64;
    let base = (d_r - 1) as f64 * kappa;
    let c = min_laplace * base.powf(k);
    BoundReport {
        regime: Regime::NonUniform { s },
        channel,
        d_l,
        d_r,
        c,
        c1: None,
        c2: None,
        t_star,
        rho,
        prefactor: base.powf(-(d_l as f64) * k),
        condition_holds: c < 1.0,
    }
}

/// Level weights `ω_0..ω_s` for a named preset.
pub fn preset_levels(preset: &str, s: usize, d_l: usize) -> Result<Vec<f64>> {
    Ok(WeightVector::preset(preset, s + 1, d_l)?.levels())
}

/// Non-uniform BI-AWGN condition at level `s`, evaluated on demand for any
/// `σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonUniformCondition {
    pub d_l: usize,
    pub d_r: usize,
    pub s: usize,
    pub omegas: Vec<f64>,
    pub quant: QuantConfig,
}

impl NonUniformCondition {
    pub fn new(d_l: usize, d_r: usize, s: usize, preset: &str, quant: QuantConfig) -> Result<Self> {
        check_degrees(d_l, d_r)?;
        Ok(NonUniformCondition {
            d_l,
            d_r,
            s,
            omegas: preset_levels(preset, s, d_l)?,
            quant,
        })
    }

    /// `c(σ) = min_t E e^{-t X_s} · ((d_R − 1) e^{-1/(2σ²)})^{1/(d_L−2)}`, with
    /// `ρ = 1/(t* σ²)`.
    pub fn c_at(&self, sigma: f64) -> Result<BoundReport> {
        check_sigma(sigma)?;
        let ch = Channel::bi_awgn(sigma)?;
        let base = self.quant.base_density(&ch)?;
        let xs = evolve(&base, &self.omegas, self.d_l, self.d_r, &self.quant.evolve_options(&ch))?;
        let m = xs.min_laplace_auto()?;
        let kappa = (-0.5 / (sigma * sigma)).exp();
        let rho = 1.0 / (m.t_star * sigma * sigma);
        Ok(nonuniform_report(
            self.s,
            Some(ch),
            self.d_l,
            self.d_r,
            m.value,
            m.t_star,
            kappa,
            Some(rho),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sigma0 {
    /// Threshold rounded to [`SIGMA_REPORT_STEP`].
    pub sigma0: f64,
    /// Midpoint of the final bisection bracket.
    pub sigma0_raw: f64,
    pub eb_n0_db: f64,
    /// Condition evaluated at the largest probed `σ` where it held.
    pub report: BoundReport,
    pub condition: NonUniformCondition,
}

impl Sigma0 {
    pub fn c_at(&self, sigma: f64) -> Result<BoundReport> {
        self.condition.c_at(sigma)
    }
}

/// Supremum `σ` with `c(σ) < 1` for the non-uniform condition at level `s`.
pub fn sigma0_search(d_l: usize, d_r: usize, s: usize, preset: &str) -> Result<Sigma0> {
    sigma0_search_with(d_l, d_r, s, preset, QuantConfig::default())
}

pub fn sigma0_search_with(
    d_l: usize,
    d_r: usize,
    s: usize,
    preset: &str,
    quant: QuantConfig,
) -> Result<Sigma0> {
    let condition = NonUniformCondition::new(d_l, d_r, s, preset, quant)?;
    let mut last_ok: Option<BoundReport> = None;
    let raw = bisect_supremum(
        |sigma| {
            let r = condition.c_at(sigma)?;
            let holds = r.condition_holds;
            if holds {
                last_ok = Some(r);
            }
            Ok(holds)
        },
        SIGMA_BRACKET.0,
        SIGMA_BRACKET.1,
        SIGMA_TOLERANCE,
    )?;
    let report = last_ok.expect("bracket check saw the condition hold");
    Ok(Sigma0 {
        sigma0: round_to(raw, SIGMA_REPORT_STEP),
        sigma0_raw: raw,
        eb_n0_db: eb_n0_db(raw, d_l, d_r),
        report,
        condition,
    })
}

fn round_to(x: f64, step: f64) -> f64 {
    ((x / step).round() * step * 1e9).round() / 1e9
}

/// `E_b/N_0` in dB for noise level `σ` at design rate `R = 1 − d_L/d_R`:
/// `−20 log10(σ √(2R))`.
pub fn eb_n0_db(sigma: f64, d_l: usize, d_r: usize) -> f64 {
    let rate = 1.0 - d_l as f64 / d_r as f64;
    -20.0 * (sigma * (2.0 * rate).sqrt()).log10()
}

/// Largest `p` at which the BSC condition holds, bisected on
/// `[1e-4, 0.25]`.
pub fn bsc_threshold(d_l: usize, d_r: usize, regime: Regime, tol: f64) -> Result<f64> {
    check_degrees(d_l, d_r)?;
    let quant = QuantConfig::default();
    bisect_supremum(
        |p| {
            let ch = Channel::bsc(p)?;
            let base = quant.base_density(&ch)?;
            let r = match regime {
                Regime::Uniform => mbios_condition(&base, d_l, d_r)?,
                Regime::NonUniform { s } => mbios_condition_nonuniform(
                    &base,
                    &preset_levels("geometric", s, d_l)?,
                    d_l,
                    d_r,
                    &quant.evolve_options(&ch),
                )?,
            };
            Ok(r.condition_holds)
        },
        1e-4,
        0.25,
        tol,
    )
}

/// `T = ⌊(g − 1)/4⌋`, the largest depth with `4T < g`.
pub fn depth_from_girth(girth: usize) -> usize {
    girth.saturating_sub(1) / 4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub n: usize,
    pub girth: usize,
    pub depth: usize,
    /// Upper bound on the word-error probability, clipped to 1.
    pub bound: f64,
    /// Natural log of the unclipped bound.
    pub ln_bound: f64,
    pub report: BoundReport,
}

fn clip(ln_bound: f64) -> f64 {
    ln_bound.min(0.0).exp()
}

/// Word-error bound with non-uniform weights at level `s`:
/// `min(1, prefactor · n · c^{(d_L−1)^{T−s}})`.
pub fn error_bound(
    n: usize,
    girth: usize,
    sigma: f64,
    d_l: usize,
    d_r: usize,
    s: usize,
) -> Result<ErrorBound> {
    let cond = NonUniformCondition::new(d_l, d_r, s, "geometric", QuantConfig::default())?;
    error_bound_with(n, girth, sigma, &cond)
}

pub fn error_bound_with(
    n: usize,
    girth: usize,
    sigma: f64,
    cond: &NonUniformCondition,
) -> Result<ErrorBound> {
    let depth = depth_from_girth(girth);
    if depth <= cond.s {
        return Err(Error::GirthTooSmallForS { girth, depth, s: cond.s });
    }
    let report = cond.c_at(sigma)?;
    if !report.condition_holds {
        return Err(Error::SigmaAboveThreshold { sigma, c: report.c });
    }
    let exponent = ((cond.d_l - 1) as f64).powi((depth - cond.s) as i32);
    let ln_bound = report.prefactor.ln() + (n as f64).ln() + exponent * report.c.ln();
    Ok(ErrorBound {
        n,
        girth,
        depth,
        bound: clip(ln_bound),
        ln_bound,
        report,
    })
}

/// Word-error bound with uniform weights from an evaluated uniform
/// condition: `min(1, n · c^{d_L (d_L−1)^{T−1} − d_L})`.
pub fn general_error_bound(report: &BoundReport, n: usize, girth: usize) -> Result<ErrorBound> {
    if report.regime != Regime::Uniform {
        return Err(Error::InvalidArgument("general_error_bound needs a uniform-regime report".into()));
    }
    if !report.condition_holds {
        return Err(Error::ConditionFails { c: report.c });
    }
    let depth = depth_from_girth(girth);
    if depth == 0 {
        return Err(Error::GirthTooSmallForS { girth, depth, s: 0 });
    }
    let d_l = report.d_l as f64;
    let exponent = d_l * (d_l - 1.0).powi(depth as i32 - 1) - d_l;
    let ln_bound = (n as f64).ln() + exponent * report.c.ln();
    Ok(ErrorBound {
        n,
        girth,
        depth,
        bound: clip(ln_bound),
        ln_bound,
        report: report.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeBound {
    /// `min(1, min_t (E e^{-t X_{T−1}})^{d_L})`.
    pub bound: f64,
    pub t_star: f64,
}

/// Chernoff bound on the tree-process failure probability
/// `P(Σ_{i=1}^{d_L} X_{T−1}^{(i)} ≤ 0)` for level weights `omegas`
/// (`T = omegas.len()`).
pub fn tree_failure_bound(
    base: &QuantizedDensity,
    omegas: &[f64],
    d_l: usize,
    d_r: usize,
    opts: &EvolveOptions,
) -> Result<TreeBound> {
    let x = evolve(base, omegas, d_l, d_r, opts)?;
    let m = x.min_laplace_auto()?;
    Ok(TreeBound {
        bound: m.value.powi(d_l as i32).min(1.0),
        t_star: m.t_star,
    })
}

/// Two-point BSC density on the unit lattice; convenience for callers that
/// do not go through [`QuantConfig`].
pub fn bsc_density(p: f64) -> Result<QuantizedDensity> {
    let ch = Channel::bsc(p)?;
    ch.llr_density(&QuantizationSpec::covering(1.0, -1.0, 1.0, DEFAULT_TAIL_TOLERANCE)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_and_c2_at_zero() {
        for d_r in [4, 6, 8] {
            let c1 = uniform_c1(0.6, d_r, 0.0).unwrap();
            assert!((c1 - 1.0).abs() < 1e-7, "c1 = {c1}");
            assert_eq!(uniform_c2(0.6, d_r, 0.0), (d_r - 1) as f64);
        }
    }

    #[test]
    fn c1_matches_min_laplace_of_quantized_density() {
        let sigma = 0.6;
        let base = QuantConfig::default()
            .base_density(&Channel::bi_awgn(sigma).unwrap())
            .unwrap();
        let x0 = base.min_of(5).unwrap();
        for t in [0.3, 1.0, 2.5] {
            let q = uniform_c1(sigma, 6, t).unwrap();
            assert!((q - x0.laplace(t)).abs() < 1e-4 * q, "t = {t}");
        }
    }

    #[test]
    fn uniform_condition_at_055_holds() {
        let r = uniform_condition(0.55, 3, 6).unwrap();
        assert!(r.condition_holds, "c = {}", r.c);
        assert!(r.c > 0.0 && r.c1.unwrap() > 0.0 && r.c2.unwrap() > 0.0);
        assert!((r.c - r.c1.unwrap() * r.c2.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn uniform_c_is_nondecreasing_in_sigma() {
        let cs: Vec<f64> = (0..20)
            .map(|i| uniform_condition(0.3 + 0.035 * i as f64, 3, 6).unwrap().c)
            .collect();
        for w in cs.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{cs:?}");
        }
    }

    #[test]
    fn quadrature_and_quantized_routes_agree() {
        for sigma in [0.5, 0.59] {
            let u = uniform_condition(sigma, 3, 6).unwrap();
            let base = QuantConfig::default()
                .base_density(&Channel::bi_awgn(sigma).unwrap())
                .unwrap();
            let m = mbios_condition(&base, 3, 6).unwrap();
            assert!((u.c - m.c).abs() < 1e-3, "sigma {sigma}: {} vs {}", u.c, m.c);
        }
    }

    #[test]
    fn bsc_closed_form_agrees_with_density_route() {
        let p: f64 = 0.015;
        let q = (1.0 - p).powi(5);
        let closed = |t: f64| {
            let f1 = q * (-t).exp() + (1.0 - q) * t.exp();
            let f2 = 5.0 * ((1.0 - p) * (-t).exp() + p * t.exp());
            f1 * f2
        };
        let m = grid_golden_min(|t| closed(t).ln(), 0.0, 10.0, 2000, 1e-10);
        let r = mbios_condition(&bsc_density(p).unwrap(), 3, 6).unwrap();
        assert!((m.value.exp() - r.c).abs() < 1e-3);
    }

    #[test]
    fn bsc_nonuniform_uses_exact_lattice() {
        let p = 0.03;
        let ch = Channel::bsc(p).unwrap();
        let q = QuantConfig::default();
        let base = q.base_density(&ch).unwrap();
        let r = mbios_condition_nonuniform(&base, &[1.0], 3, 6, &q.evolve_options(&ch)).unwrap();
        let kappa = 2.0 * (p * (1.0 - p)).sqrt();
        assert!((r.prefactor - (5.0 * kappa).powi(-3)).abs() < 1e-9 * r.prefactor);
        let uniform = mbios_condition(&base, 3, 6).unwrap();
        assert!(r.c <= uniform.c + 1e-9);
    }

    #[test]
    fn noiseless_point_mass_satisfies_condition() {
        let base = QuantizedDensity::point_mass(0.01, 1.0);
        let r = mbios_condition(&base, 3, 6).unwrap();
        assert!(r.condition_holds && r.c < 1e-3, "c = {}", r.c);
    }

    #[test]
    fn degrees_must_exceed_two() {
        assert!(uniform_condition(0.5, 2, 6).is_err());
        assert!(NonUniformCondition::new(3, 2, 0, "geometric", QuantConfig::default()).is_err());
    }

    #[test]
    fn eb_n0_conversion() {
        assert!((eb_n0_db(0.735, 3, 6) - 2.67).abs() < 0.01);
        assert!((eb_n0_db(0.605, 3, 6) - 4.36).abs() < 0.01);
    }

    #[test]
    fn nonuniform_s0_prefactor_and_rho() {
        let cond = NonUniformCondition::new(3, 6, 0, "geometric", QuantConfig::default()).unwrap();
        let sigma = 0.55;
        let r = cond.c_at(sigma).unwrap();
        let pref = (1.5 / (sigma * sigma)).exp() / 125.0;
        assert!((r.prefactor - pref).abs() < 1e-9 * pref);
        assert!((r.rho.unwrap() * r.t_star * sigma * sigma - 1.0).abs() < 1e-12);
        assert!(r.condition_holds);
    }

    #[test]
    fn depth_is_strictly_below_quarter_girth() {
        assert_eq!(depth_from_girth(8), 1);
        assert_eq!(depth_from_girth(9), 2);
        assert_eq!(depth_from_girth(12), 2);
        assert_eq!(depth_from_girth(13), 3);
    }

    #[test]
    fn error_bound_decreases_with_girth_and_rejects_small_girth() {
        let cond = NonUniformCondition::new(3, 6, 0, "geometric", QuantConfig::default()).unwrap();
        let a = error_bound_with(1000, 40, 0.5, &cond).unwrap();
        let b = error_bound_with(1000, 48, 0.5, &cond).unwrap();
        assert!(b.ln_bound < a.ln_bound);
        assert!(matches!(
            error_bound_with(1000, 4, 0.5, &cond),
            Err(Error::GirthTooSmallForS { .. })
        ));
        assert!(matches!(
            error_bound_with(1000, 40, 0.9, &cond),
            Err(Error::SigmaAboveThreshold { .. })
        ));
    }

    #[test]
    fn general_bound_monotone_in_girth() {
        let r = uniform_condition(0.55, 3, 6).unwrap();
        let a = general_error_bound(&r, 10_000, 24).unwrap();
        let b = general_error_bound(&r, 10_000, 28).unwrap();
        assert!(a.bound > 0.0 && a.bound < 1.0, "{}", a.bound);
        assert!(b.bound > 0.0 && b.bound < 1.0, "{}", b.bound);
        assert!(b.bound < a.bound);
        let far = general_error_bound(&r, 10_000, 200).unwrap();
        assert_eq!(far.bound, 0.0);
    }
}
