//! LP decoding over the fundamental polytope.
//!
//! The polytope is described by the box `0 ≤ x ≤ 1` and, for every check `j`
//! and odd subset `S ⊆ N(j)`, the forbidden-set inequality
//! `Σ_{i∈S} x_i − Σ_{i∈N(j)∖S} x_i ≤ |S| − 1`. Every right-hand side is
//! non-negative, so the origin is a feasible starting vertex.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, LlrVector};
use crate::numeric::Scalar;
use crate::tanner::TannerGraph;
use crate::{Error, Result};

/// Largest check degree for which the odd-subset rows are generated.
pub const MAX_CHECK_DEGREE: usize = 12;
const MAX_PIVOTS: usize = 200_000;
const GENERIC_OBJECTIVE_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    /// Sparse `(variable, ±1)` coefficients.
    pub coeffs: Vec<(usize, i8)>,
    pub relation: Relation,
    pub bound: i64,
}

impl Row {
    fn lhs<S: Scalar>(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for &(i, c) in &self.coeffs {
            if c > 0 {
                acc += x[i].clone();
            } else {
                acc = acc - x[i].clone();
            }
        }
        acc
    }

    /// Amount by which `x` violates the row (non-positive when satisfied).
    pub fn violation<S: Scalar>(&self, x: &[S]) -> S {
        let lhs = self.lhs(x);
        let b = S::from_i64(self.bound);
        match self.relation {
            Relation::Le => lhs - b,
            Relation::Ge => b - lhs,
        }
    }
}

/// `min ⟨λ, x⟩` over the fundamental polytope of a Tanner graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    n: usize,
    rows: Vec<Row>,
    /// Index of the first parity row; rows before it are box rows.
    parity_start: usize,
}

impl LpProblem {
    pub fn build_polytope(g: &TannerGraph) -> Result<Self> {
        let d_max = g.max_check_degree();
        if d_max > MAX_CHECK_DEGREE {
            return Err(Error::DegreeTooLarge(d_max));
        }
        let n = g.n();
        let mut rows = Vec::new();
        for i in 0..n {
            rows.push(Row {
                coeffs: vec![(i, 1)],
                relation: Relation::Ge,
                bound: 0,
            });
            rows.push(Row {
                coeffs: vec![(i, 1)],
                relation: Relation::Le,
                bound: 1,
            });
        }
        let parity_start = rows.len();
        for nbrs in g.checks() {
            let d = nbrs.len();
            for mask in 0u32..(1 << d) {
                let size = mask.count_ones();
                if size % 2 == 0 {
                    continue;
                }
                let coeffs = nbrs
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| (v, if mask >> k & 1 == 1 { 1 } else { -1 }))
                    .collect();
                rows.push(Row {
                    coeffs,
                    relation: Relation::Le,
                    bound: size as i64 - 1,
                });
            }
        }
        Ok(LpProblem { n, rows, parity_start })
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn parity_rows(&self) -> &[Row] {
        &self.rows[self.parity_start..]
    }

    /// Largest violation over all rows (non-positive iff feasible).
    pub fn max_violation<S: Scalar>(&self, x: &[S]) -> Result<S> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let mut worst: Option<S> = None;
        for r in &self.rows {
            let v = r.violation(x);
            if worst.as_ref().is_none_or(|w| v > *w) {
                worst = Some(v);
            }
        }
        Ok(worst.unwrap_or_else(S::zero))
    }

    /// Membership with exact comparison for rationals and a `1e-9` slack for floats.
    pub fn contains<S: Scalar>(&self, x: &[S]) -> Result<bool> {
        Ok(!self.max_violation(x)?.is_pos())
    }

    /// Solve with the given objective.
    pub fn solve(&self, lambda: &[f64], mode: LpMode) -> Result<LpSolution> {
        if lambda.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: lambda.len(),
            });
        }
        match mode {
            LpMode::Float => {
                let sol = solve_generic::<f64>(self, lambda)?;
                let viol = self.max_violation(&sol.point)?;
                if viol > crate::numeric::FLOAT_TOLERANCE {
                    return Err(Error::NumericalFailure(format!(
                        "solution violates a constraint by {viol:e}"
                    )));
                }
                Ok(LpSolution {
                    point: sol.point,
                    exact_point: None,
                    objective_value: sol.value,
                    is_integral: sol.integral,
                    is_unique: sol.unique,
                    status: LpStatus::Optimal,
                    pivots: sol.pivots,
                })
            }
            LpMode::Exact => {
                let sol = solve_generic::<BigRational>(self, lambda)?;
                debug_assert!(self.contains(&sol.point).unwrap());
                Ok(LpSolution {
                    point: sol.point.iter().map(Scalar::to_f64).collect(),
                    exact_point: Some(sol.point),
                    objective_value: sol.value.to_f64(),
                    is_integral: sol.integral,
                    is_unique: sol.unique,
                    status: LpStatus::Optimal,
                    pivots: sol.pivots,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LpMode {
    /// Rational arithmetic; decisions are exact.
    Exact,
    /// `f64` with `1e-9` tolerances.
    #[default]
    Float,
}

impl std::str::FromStr for LpMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(LpMode::Exact),
            "float" => Ok(LpMode::Float),
            _ => Err(Error::Parse(format!("unknown LP mode `{s}`"))),
        }
    }
}

/// The polytope is bounded and contains the origin, so the two other
/// outcomes exist only for completeness of the status type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    UnboundedImpossible,
    InfeasibleImpossible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub point: Vec<f64>,
    #[serde(skip)]
    pub exact_point: Option<Vec<BigRational>>,
    pub objective_value: f64,
    pub is_integral: bool,
    pub is_unique: bool,
    pub status: LpStatus,
    pub pivots: usize,
}

impl LpSolution {
    /// The optimum as a binary word if it is integral.
    pub fn integral_word(&self) -> Option<Vec<u8>> {
        self.is_integral
            .then(|| self.point.iter().map(|&v| u8::from(v > 0.5)).collect())
    }

    /// Decoding succeeded iff the unique optimum is exactly `x`.
    pub fn decoded(&self, x: &[u8]) -> bool {
        self.is_unique && self.integral_word().as_deref() == Some(x)
    }
}

pub fn lp_decode(g: &TannerGraph, lambda: &LlrVector, mode: LpMode) -> Result<LpSolution> {
    LpProblem::build_polytope(g)?.solve(lambda.values(), mode)
}

pub fn decode_word(g: &TannerGraph, ch: &Channel, y: &[f64], mode: LpMode) -> Result<LpSolution> {
    lp_decode(g, &ch.llr(y), mode)
}

/// Decoder that builds the polytope once and reuses it across words.
#[derive(Debug, Clone)]
pub struct LpDecoder {
    problem: LpProblem,
    mode: LpMode,
}

impl LpDecoder {
    pub fn new(g: &TannerGraph, mode: LpMode) -> Result<Self> {
        Ok(LpDecoder {
            problem: LpProblem::build_polytope(g)?,
            mode,
        })
    }

    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    pub fn decode(&self, lambda: &LlrVector) -> Result<LpSolution> {
        self.problem.solve(lambda.values(), self.mode)
    }

    /// Float solve, falling back to exact arithmetic on numerical failure.
    pub fn decode_robust(&self, lambda: &LlrVector) -> Result<LpSolution> {
        match self.problem.solve(lambda.values(), self.mode) {
            Err(Error::NumericalFailure(_)) if self.mode == LpMode::Float => {
                self.problem.solve(lambda.values(), LpMode::Exact)
            }
            r => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlResult {
    pub word: Vec<u8>,
    pub cost: f64,
    pub unique: bool,
}

/// Maximum-likelihood decoding by enumerating every codeword (`n ≤ 20`).
pub fn exhaustive_ml(g: &TannerGraph, lambda: &LlrVector) -> Result<MlResult> {
    if g.n() > 20 {
        return Err(Error::InvalidArgument(format!(
            "exhaustive ML is limited to n <= 20, got {}",
            g.n()
        )));
    }
    if lambda.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            actual: lambda.len(),
        });
    }
    let cost = |w: &[u8]| -> f64 {
        w.iter()
            .zip(lambda.values())
            .filter(|(b, _)| **b == 1)
            .map(|(_, l)| l)
            .sum()
    };
    let mut best: Option<MlResult> = None;
    for w in g.codewords(20)? {
        let c = cost(&w);
        match &mut best {
            None => {
                best = Some(MlResult {
                    word: w,
                    cost: c,
                    unique: true,
                })
            }
            Some(b) if c < b.cost => {
                *b = MlResult {
                    word: w,
                    cost: c,
                    unique: true,
                }
            }
            Some(b) if c == b.cost => b.unique = false,
            _ => {}
        }
    }
    Ok(best.expect("the zero word is a codeword"))
}

struct RawSolution<S> {
    point: Vec<S>,
    value: S,
    integral: bool,
    unique: bool,
    pivots: usize,
}

/// Condensed simplex tableau. Row `i` reads
/// `basic_i = b_i − Σ_j a_ij · nonbasic_j`; the objective row has the same
/// form with `obj_j = −(reduced cost of column j)`.
struct Tableau<S> {
    a: Vec<Vec<S>>,
    b: Vec<S>,
    obj: Vec<S>,
    z: S,
    row_var: Vec<usize>,
    col_var: Vec<usize>,
    n: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    /// Slack basis for `Ax ≤ b` restricted to the `≤` rows.
    fn new(p: &LpProblem, c: &[S]) -> Self {
        let n = p.n;
        let le: Vec<&Row> = p.rows.iter().filter(|r| r.relation == Relation::Le).collect();
        let mut a = Vec::with_capacity(le.len());
        let mut b = Vec::with_capacity(le.len());
        for r in &le {
            let mut row = vec![S::zero(); n];
            for &(i, k) in &r.coeffs {
                row[i] = S::from_i64(k as i64);
            }
            a.push(row);
            b.push(S::from_i64(r.bound));
        }
        let m = a.len();
        Tableau {
            a,
            b,
            obj: c.iter().map(|v| -v.clone()).collect(),
            z: S::zero(),
            row_var: (n..n + m).collect(),
            col_var: (0..n).collect(),
            n,
            pivots: 0,
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.a[p][q].clone();
        let inv = S::one() / piv;
        let prow: Vec<S> = self.a[p].iter().map(|v| v.clone() * inv.clone()).collect();
        let pb = self.b[p].clone() * inv.clone();
        for i in 0..self.a.len() {
            if i == p {
                continue;
            }
            let f = self.a[i][q].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.a[i];
            for (j, pv) in prow.iter().enumerate() {
                if j != q && !pv.is_zero() {
                    row[j] = row[j].clone() - f.clone() * pv.clone();
                }
            }
            row[q] = -(f.clone() * inv.clone());
            self.b[i] = self.b[i].clone() - f * pb.clone();
        }
        let f = self.obj[q].clone();
        if !f.is_zero() {
            for (j, pv) in prow.iter().enumerate() {
                if j != q && !pv.is_zero() {
                    self.obj[j] = self.obj[j].clone() - f.clone() * pv.clone();
                }
            }
            self.obj[q] = -(f.clone() * inv.clone());
            self.z = self.z.clone() - f * pb.clone();
        }
        self.a[p] = prow;
        self.a[p][q] = inv;
        self.b[p] = pb;
        std::mem::swap(&mut self.row_var[p], &mut self.col_var[q]);
        self.pivots += 1;
    }

    /// Bland's rule simplex over the columns flagged in `allowed`.
    fn optimize(&mut self, allowed: &[bool]) -> Result<()> {
        loop {
            let entering = (0..self.col_var.len())
                .filter(|&j| allowed[self.col_var[j]] && self.obj[j].is_pos())
                .min_by_key(|&j| self.col_var[j]);
            let Some(q) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][q].is_pos() {
                    continue;
                }
                let ratio = self.b[i].clone() / self.a[i][q].clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        let diff = ratio.clone() - best.clone();
                        diff.is_neg() || (diff.is_negligible() && self.row_var[i] < self.row_var[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, _)) = leave else {
                return Err(Error::NumericalFailure("unbounded direction in a bounded polytope".into()));
            };
            self.pivot(p, q);
            if self.pivots > MAX_PIVOTS {
                return Err(Error::NumericalFailure("pivot limit exceeded".into()));
            }
        }
    }

    fn point(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.n];
        for (i, &v) in self.row_var.iter().enumerate() {
            if v < self.n {
                x[v] = self.b[i].clone();
            }
        }
        x
    }

    /// Replace the objective by `min ⟨c, x⟩` expressed in the current basis.
    fn set_objective(&mut self, c: &[S]) {
        let mut obj: Vec<S> = self
            .col_var
            .iter()
            .map(|&v| if v < self.n { -c[v].clone() } else { S::zero() })
            .collect();
        let mut z = S::zero();
        for (i, &v) in self.row_var.iter().enumerate() {
            if v >= self.n || c[v].is_zero() {
                continue;
            }
            z += c[v].clone() * self.b[i].clone();
            for (j, o) in obj.iter_mut().enumerate() {
                if !self.a[i][j].is_zero() {
                    *o = o.clone() + c[v].clone() * self.a[i][j].clone();
                }
            }
        }
        self.obj = obj;
        self.z = z;
    }
}

fn is_integral<S: Scalar>(x: &[S]) -> bool {
    x.iter()
        .all(|v| v.is_negligible() || (v.clone() - S::one()).is_negligible())
}

fn solve_generic<S: Scalar>(p: &LpProblem, lambda: &[f64]) -> Result<RawSolution<S>> {
    let c: Vec<S> = lambda.iter().map(|&v| S::from_f64(v)).collect();
    let mut t = Tableau::new(p, &c);
    let total_vars = t.n + t.row_var.len();
    t.optimize(&vec![true; total_vars])?;
    let point = t.point();
    let value = t.z.clone();
    let integral = is_integral(&point);

    // Columns with positive reduced cost stay at zero on the optimal face;
    // the face is a single point iff nothing else can move.
    let mut on_face = vec![true; total_vars];
    let mut degenerate = false;
    for (j, &v) in t.col_var.iter().enumerate() {
        if t.obj[j].is_neg() {
            on_face[v] = false;
        } else {
            degenerate = true;
        }
    }
    let unique = if !degenerate {
        true
    } else if integral {
        // Maximise the L1 distance to the integral optimum over the face.
        let dir: Vec<S> = point
            .iter()
            .map(|v| if v.is_negligible() { -S::one() } else { S::one() })
            .collect();
        let at_opt = t_objective(&dir, &point);
        t.set_objective(&dir);
        t.optimize(&on_face)?;
        !(at_opt - t.z.clone()).is_pos()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(GENERIC_OBJECTIVE_SEED);
        let r: Vec<S> = (0..t.n)
            .map(|_| S::from_i64(rng.random_range(1..=1_000_000)))
            .collect();
        let at_opt = t_objective(&r, &point);
        t.set_objective(&r);
        t.optimize(&on_face)?;
        let lo = t.z.clone();
        let neg: Vec<S> = r.iter().map(|v| -v.clone()).collect();
        t.set_objective(&neg);
        t.optimize(&on_face)?;
        let hi = -t.z.clone();
        !(at_opt.clone() - lo).is_pos() && !(hi - at_opt).is_pos()
    };
    Ok(RawSolution {
        point,
        value,
        integral,
        unique,
        pivots: t.pivots,
    })
}

fn t_objective<S: Scalar>(c: &[S], x: &[S]) -> S {
    let mut acc = S::zero();
    for (a, b) in c.iter().zip(x) {
        acc += a.clone() * b.clone();
    }
    acc
}
