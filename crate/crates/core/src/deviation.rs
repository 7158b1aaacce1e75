//! Minimal local deviations (skinny trees), local-optimality certificates and
//! graph covers.
//!
//! A skinny tree rooted at variable `i0` lives in the depth-`2T` ball around
//! `i0`, which is a tree whenever `4T < girth`. Every selected variable keeps
//! all of its checks inside the ball and every selected check keeps exactly
//! two selected neighbours; so below the root each check picks one child.
//! The variable at depth `2t` carries weight `w_t`; the root carries none.

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::LlrVector;
use crate::numeric::Scalar;
use crate::tanner::{Codeword, TannerGraph};
use crate::{Error, Result};

/// Cap on the number of skinny trees [`enumerate_deviations`] will list.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Weights `w_1..w_T` by depth; `omega(l) = w_{T-l}` is the level view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("weight vector needs T >= 1".into()));
        }
        if w.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidArgument("weights must not all be zero".into()));
        }
        Ok(WeightVector { w })
    }

    pub fn uniform(t: usize) -> Result<Self> {
        Self::new(vec![1.0; t])
    }

    /// `ω_l = (d_L − 1)^l`.
    pub fn geometric(t: usize, d_l: usize) -> Result<Self> {
        let base = d_l.saturating_sub(1).max(1) as f64;
        Self::from_levels(&(0..t).map(|l| base.powi(l as i32)).collect::<Vec<_>>())
    }

    /// Build from the level view `ω_0..ω_{T-1}`.
    pub fn from_levels(omegas: &[f64]) -> Result<Self> {
        Self::new(omegas.iter().rev().copied().collect())
    }

    pub fn preset(name: &str, t: usize, d_l: usize) -> Result<Self> {
        match name {
            "uniform" => Self::uniform(t),
            "geometric" => Self::geometric(t, d_l),
            other => Err(Error::Parse(format!("unknown weight preset `{other}`"))),
        }
    }

    pub fn depth(&self) -> usize {
        self.w.len()
    }

    /// Weight of a variable at distance `2t` from the root, `t ∈ 1..=T`.
    pub fn w(&self, t: usize) -> f64 {
        self.w[t - 1]
    }

    pub fn omega(&self, l: usize) -> f64 {
        self.w[self.w.len() - 1 - l]
    }

    pub fn levels(&self) -> Vec<f64> {
        (0..self.depth()).map(|l| self.omega(l)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.w.iter().map(|v| v * c).collect())
    }
}

/// A skinny tree: the selected variables with their depth `t` (distance `2t`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub root: usize,
    pub depth: usize,
    /// `(variable, t)` pairs, root first with `t = 0`.
    pub nodes: Vec<(usize, usize)>,
}

impl Deviation {
    pub fn support(&self) -> BTreeSet<usize> {
        self.nodes.iter().map(|&(v, _)| v).collect()
    }

    /// `Σ_{v ≠ root} w_t (−1)^{x_v} λ_v`.
    pub fn cost<S: Scalar>(&self, lambda: &[S], x: &[u8], wv: &WeightVector) -> S {
        let mut acc = S::zero();
        for &(v, t) in &self.nodes {
            if t == 0 {
                continue;
            }
            let term = S::from_f64(wv.w(t)) * lambda[v].clone();
            acc += if x[v] == 1 { -term } else { term };
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Certificate {
    Certified,
    Refuted {
        root: usize,
        cost: f64,
        witness: Deviation,
    },
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified)
    }
}

fn check_depth(g: &TannerGraph, t: usize) -> Result<()> {
    if let Some(girth) = g.girth() {
        if 4 * t >= girth {
            return Err(Error::GirthViolation { depth: t, girth });
        }
    }
    Ok(())
}

fn check_lengths(g: &TannerGraph, lambda: usize, x: usize, root: usize) -> Result<()> {
    for len in [lambda, x] {
        if len != g.n() {
            return Err(Error::LengthMismatch {
                expected: g.n(),
                actual: len,
            });
        }
    }
    if root >= g.n() {
        return Err(Error::InvalidArgument(format!("root {root} out of range")));
    }
    Ok(())
}

struct Dp<'a, S> {
    g: &'a TannerGraph,
    signed: Vec<S>,
    w: Vec<S>,
    t_max: usize,
}

impl<'a, S: Scalar> Dp<'a, S> {
    fn new(g: &'a TannerGraph, lambda: &[f64], x: &[u8], wv: &WeightVector) -> Self {
        let signed = lambda
            .iter()
            .zip(x)
            .map(|(&l, &b)| {
                let v = S::from_f64(l);
                if b == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        Dp {
            g,
            signed,
            w: wv.as_slice().iter().map(|&v| S::from_f64(v)).collect(),
            t_max: wv.depth(),
        }
    }

    fn var(&self, v: usize, parent: usize, t: usize) -> S {
        let mut acc = self.w[t - 1].clone() * self.signed[v].clone();
        if t < self.t_max {
            for &c in self.g.var_neighbors(v) {
                if c != parent {
                    acc += self.check(c, v, t).0;
                }
            }
        }
        acc
    }

    /// Best child below check `c` entered from a variable at depth `t`.
    fn check(&self, c: usize, parent: usize, t: usize) -> (S, usize) {
        let mut best: Option<(S, usize)> = None;
        for &u in self.g.check_neighbors(c) {
            if u == parent {
                continue;
            }
            let v = self.var(u, c, t + 1);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, u));
            }
        }
        best.expect("checks have degree >= 2 inside a tree ball")
    }

    fn root(&self, i0: usize) -> S {
        let mut acc = S::zero();
        for &c in self.g.var_neighbors(i0) {
            acc += self.check(c, i0, 0).0;
        }
        acc
    }

    fn witness(&self, i0: usize) -> Deviation {
        let mut nodes = vec![(i0, 0)];
        let mut stack: Vec<(usize, usize, usize)> =
            self.g.var_neighbors(i0).iter().map(|&c| (c, i0, 0)).collect();
        while let Some((c, parent, t)) = stack.pop() {
            let (_, u) = self.check(c, parent, t);
            nodes.push((u, t + 1));
            if t + 1 < self.t_max {
                for &c2 in self.g.var_neighbors(u) {
                    if c2 != c {
                        stack.push((c2, u, t + 1));
                    }
                }
            }
        }
        Deviation {
            root: i0,
            depth: self.t_max,
            nodes,
        }
    }
}

fn min_cost_generic<S: Scalar>(
    g: &TannerGraph,
    lambda: &LlrVector,
    x: &[u8],
    i0: usize,
    wv: &WeightVector,
) -> Result<S> {
    check_lengths(g, lambda.len(), x.len(), i0)?;
    check_depth(g, wv.depth())?;
    Ok(Dp::<S>::new(g, lambda.values(), x, wv).root(i0))
}

/// Minimum of `⟨λ, x ⊕ β⟩ − ⟨λ, x⟩` over `w`-weighted skinny trees `β`
/// rooted at `i0`, by leaf-to-root min-sum.
pub fn min_deviation_cost(
    g: &TannerGraph,
    lambda: &LlrVector,
    x: &Codeword,
    i0: usize,
    wv: &WeightVector,
) -> Result<f64> {
    min_cost_generic::<f64>(g, lambda, x.bits(), i0, wv)
}

/// [`min_deviation_cost`] in rational arithmetic.
pub fn min_deviation_cost_exact(
    g: &TannerGraph,
    lambda: &LlrVector,
    x: &Codeword,
    i0: usize,
    wv: &WeightVector,
) -> Result<BigRational> {
    min_cost_generic::<BigRational>(g, lambda, x.bits(), i0, wv)
}

/// Number of skinny trees of depth `t` rooted at `i0`, saturating.
pub fn count_deviations(g: &TannerGraph, i0: usize, t: usize) -> Result<u128> {
    check_depth(g, t)?;
    fn var(g: &TannerGraph, v: usize, parent: usize, t: usize, t_max: usize) -> u128 {
        if t == t_max {
            return 1;
        }
        g.var_neighbors(v)
            .iter()
            .filter(|&&c| c != parent)
            .map(|&c| check(g, c, v, t, t_max))
            .fold(1u128, u128::saturating_mul)
    }
    fn check(g: &TannerGraph, c: usize, parent: usize, t: usize, t_max: usize) -> u128 {
        g.check_neighbors(c)
            .iter()
            .filter(|&&u| u != parent)
            .map(|&u| var(g, u, c, t + 1, t_max))
            .fold(0u128, u128::saturating_add)
    }
    Ok(g.var_neighbors(i0)
        .iter()
        .map(|&c| check(g, c, i0, 0, t))
        .fold(1u128, u128::saturating_mul))
}

/// List every skinny tree of depth `t` rooted at `i0`.
pub fn enumerate_deviations(g: &TannerGraph, i0: usize, t: usize) -> Result<Vec<Deviation>> {
    if i0 >= g.n() {
        return Err(Error::InvalidArgument(format!("root {i0} out of range")));
    }
    let count = count_deviations(g, i0, t)?;
    if count > ENUMERATION_CAP {
        return Err(Error::ExplosionGuard {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    type Partial = Vec<(usize, usize)>;
    fn product(parts: Vec<Vec<Partial>>) -> Vec<Partial> {
        parts.into_iter().fold(vec![Vec::new()], |acc, options| {
            let mut out = Vec::with_capacity(acc.len() * options.len());
            for a in &acc {
                for o in &options {
                    let mut v = a.clone();
                    v.extend_from_slice(o);
                    out.push(v);
                }
            }
            out
        })
    }
    fn var(g: &TannerGraph, v: usize, parent: usize, t: usize, t_max: usize) -> Vec<Partial> {
        let mut below: Vec<Vec<Partial>> = vec![vec![vec![(v, t)]]];
        if t < t_max {
            for &c in g.var_neighbors(v) {
                if c != parent {
                    below.push(check(g, c, v, t, t_max));
                }
            }
        }
        product(below)
    }
    fn check(g: &TannerGraph, c: usize, parent: usize, t: usize, t_max: usize) -> Vec<Partial> {
        g.check_neighbors(c)
            .iter()
            .filter(|&&u| u != parent)
            .flat_map(|&u| var(g, u, c, t + 1, t_max))
            .collect()
    }
    Ok(var(g, i0, usize::MAX, 0, t)
        .into_iter()
        .map(|nodes| Deviation {
            root: i0,
            depth: t,
            nodes,
        })
        .collect())
}

fn certify_generic<S: Scalar + Send + Sync>(
    g: &TannerGraph,
    x: &Codeword,
    lambda: &LlrVector,
    wv: &WeightVector,
) -> Result<Certificate> {
    check_lengths(g, lambda.len(), x.bits().len(), 0)?;
    if !g.is_codeword(x.bits())? {
        return Err(Error::NotACodeword);
    }
    check_depth(g, wv.depth())?;
    let dp = Dp::<S>::new(g, lambda.values(), x.bits(), wv);
    let refuted = (0..g.n())
        .into_par_iter()
        .map(|i| (i, dp.root(i)))
        .find_first(|(_, c)| !c.is_pos());
    Ok(match refuted {
        None => Certificate::Certified,
        Some((root, cost)) => Certificate::Refuted {
            root,
            cost: cost.to_f64(),
            witness: dp.witness(root),
        },
    })
}

/// `x` is `(T, w)`-locally optimal for `λ` iff every root's minimum
/// deviation cost is strictly positive. In floating point "strictly" means
/// above `1e-9`, which errs towards refusing a certificate.
pub fn certify_local_optimality(
    g: &TannerGraph,
    x: &Codeword,
    lambda: &LlrVector,
    wv: &WeightVector,
) -> Result<Certificate> {
    certify_generic::<f64>(g, x, lambda, wv)
}

pub fn certify_local_optimality_exact(
    g: &TannerGraph,
    x: &Codeword,
    lambda: &LlrVector,
    wv: &WeightVector,
) -> Result<Certificate> {
    certify_generic::<BigRational>(g, x, lambda, wv)
}

/// An `M`-fold cover: one permutation of `0..M` per edge, edges ordered by
/// check and then by position within the check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub fold: usize,
    pub perms: Vec<Vec<usize>>,
}

impl CoverSpec {
    pub fn new(g: &TannerGraph, fold: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        if fold == 0 {
            return Err(Error::InvalidCover("fold must be at least 1".into()));
        }
        if perms.len() != g.edge_count() {
            return Err(Error::InvalidCover(format!(
                "expected {} matchings, got {}",
                g.edge_count(),
                perms.len()
            )));
        }
        for (e, p) in perms.iter().enumerate() {
            let mut seen = vec![false; fold];
            if p.len() != fold || p.iter().any(|&a| a >= fold || std::mem::replace(&mut seen[a], true)) {
                return Err(Error::InvalidCover(format!("matching {e} is not a permutation")));
            }
        }
        Ok(CoverSpec { fold, perms })
    }

    pub fn identity(g: &TannerGraph, fold: usize) -> Result<Self> {
        Self::new(g, fold, vec![(0..fold).collect(); g.edge_count()])
    }

    pub fn random(g: &TannerGraph, fold: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms = (0..g.edge_count())
            .map(|_| {
                let mut p: Vec<usize> = (0..fold).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        Self::new(g, fold, perms)
    }
}

/// Cover variable `v·M + a` meets cover check `j·M + π_e(a)` for the base edge
/// `e = (j, v)`.
pub fn lift_graph(g: &TannerGraph, spec: &CoverSpec) -> Result<TannerGraph> {
    if spec.perms.len() != g.edge_count() {
        return Err(Error::InvalidCover("cover does not match the graph".into()));
    }
    let m = spec.fold;
    let mut chk_adj = vec![Vec::new(); g.m() * m];
    let mut e = 0;
    for (j, nbrs) in g.checks().iter().enumerate() {
        for &v in nbrs {
            for a in 0..m {
                chk_adj[j * m + spec.perms[e][a]].push(v * m + a);
            }
            e += 1;
        }
    }
    TannerGraph::from_checks(g.n() * m, chk_adj)
}

/// Repeat every coordinate across its fiber.
pub fn lift_vector<T: Clone>(v: &[T], fold: usize) -> Vec<T> {
    v.iter()
        .flat_map(|x| std::iter::repeat_n(x.clone(), fold))
        .collect()
}

/// Fiber averages of a cover codeword.
pub fn project_pseudocodeword(
    g: &TannerGraph,
    spec: &CoverSpec,
    cover_word: &[u8],
) -> Result<Vec<BigRational>> {
    let cover = lift_graph(g, spec)?;
    if cover_word.len() != cover.n() {
        return Err(Error::LengthMismatch {
            expected: cover.n(),
            actual: cover_word.len(),
        });
    }
    if !cover.is_codeword(cover_word)? {
        return Err(Error::NotACoverCodeword);
    }
    let m = spec.fold as i64;
    Ok(cover_word
        .chunks(spec.fold)
        .map(|fiber| {
            let ones = fiber.iter().filter(|&&b| b == 1).count() as i64;
            BigRational::new(ones.into(), m.into())
        })
        .collect())
}
