//! Exact verification of the integral and explicit-sum identities relating
//! the noncentral Tanny-Dowling and Dowling polynomials to Bernoulli
//! polynomials, plus grid sweeps over `(m, a, n)`.
//!
//! Every check returns both sides as canonical rationals; `holds` is their
//! structural equality. The EGF identity is the one floating-point check and
//! returns a residual instead.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernoulli::{bernoulli_number, bernoulli_poly_eval};
use crate::error::{Error, Result};
use crate::exact_arith::{binomial, factorial_u, rat_pow, Integer, Rational};
use crate::poly::{dowling_poly, exponential_poly, geometric_poly, tanny_dowling_poly, Polynomial};
use crate::quadrature::{improper_integral_theorem4, tanny_dowling_egf_closed_form, theorem4_decay_rate};
use crate::triangles::{global_cache, stirling2_row, WhitneyParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    Theorem1,
    Corollary2,
    WorpitzkyGeneral,
    Theorem3Exact,
    Theorem4Series,
    Kellner,
    WorpitzkyClassic,
    Reduction,
}

/// One side of an identity: a scalar, or a coefficient vector for
/// coefficientwise polynomial identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Side {
    Scalar(Rational),
    Coefficients(Vec<Rational>),
}

impl From<Rational> for Side {
    fn from(q: Rational) -> Self {
        Side::Scalar(q)
    }
}

impl From<&Polynomial> for Side {
    fn from(p: &Polynomial) -> Self {
        Side::Coefficients(p.coeffs().to_vec())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub id: IdentityId,
    pub m: u32,
    pub a: Rational,
    pub n: usize,
    pub lhs: Side,
    pub rhs: Side,
    pub holds: bool,
    /// Distinguishes several checks sharing one id, e.g. the two classical
    /// Worpitzky forms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl IdentityCheck {
    fn new(id: IdentityId, p: &WhitneyParams, n: usize, lhs: impl Into<Side>, rhs: impl Into<Side>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        IdentityCheck { id, m: p.m(), a: p.a().clone(), n, holds: lhs == rhs, lhs, rhs, detail: None }
    }

    fn with_detail(mut self, detail: &str) -> Self {
        self.detail = Some(detail.to_string());
        self
    }

    pub fn params(&self) -> WhitneyParams {
        WhitneyParams::new(self.m as i64, self.a.clone()).expect("checks are built from valid params")
    }
}

fn minus_one_to(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `m^n B_n(-a/m)`.
fn scaled_bernoulli(p: &WhitneyParams, n: usize) -> Rational {
    rat_pow(&p.m_rational(), n as u32) * bernoulli_poly_eval(n, &p.bernoulli_arg())
}

/// `∫_{-1}^{0} F̃_{m,a}(n; m x) dx = m^n B_n(-a/m)`.
pub fn check_theorem1(p: &WhitneyParams, n: usize) -> IdentityCheck {
    let scaled = tanny_dowling_poly(p, n).scale_arg(&p.m_rational());
    let lhs = scaled.definite_integral(&-Rational::one(), &Rational::zero());
    IdentityCheck::new(IdentityId::Theorem1, p, n, lhs, scaled_bernoulli(p, n))
}

/// `Σ_k m^k k! W̃(n,k) (-1)^k / (k+1)`, i.e. `∫_{-1}^{0} F̃(n; m x) dx`
/// summed term by term without building the polynomial.
pub fn theorem1_termwise(p: &WhitneyParams, n: usize) -> Rational {
    let table = global_cache().get(p, n);
    let m = p.m_rational();
    table
        .row(n)
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let weight = rat_pow(&m, k as u32) * Rational::from(factorial_u(k as u64)) * minus_one_to(k);
            weight * w / Rational::from(k as i64 + 1)
        })
        .sum()
}

/// `B_n(-a/m) = Σ_k k! W̃(n,k) (-1)^k / (m^{n-k} (k+1))`.
pub fn check_corollary2(p: &WhitneyParams, n: usize) -> IdentityCheck {
    let table = global_cache().get(p, n);
    let m = p.m_rational();
    let lhs: Rational = table
        .row(n)
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let den = rat_pow(&m, (n - k) as u32) * Rational::from(k as i64 + 1);
            Rational::from(factorial_u(k as u64)) * w * minus_one_to(k) / den
        })
        .sum();
    IdentityCheck::new(IdentityId::Corollary2, p, n, lhs, bernoulli_poly_eval(n, &p.bernoulli_arg()))
}

/// `B_n(-a/m) = Σ_{k=0}^{n} Σ_{j=0}^{k} C(k,j) (mj - a)^n (-1)^j / (m^n (k+1))`.
pub fn check_worpitzky_general(p: &WhitneyParams, n: usize) -> IdentityCheck {
    let m = p.m_rational();
    // (-1)^j (mj - a)^n for j = 0..=n
    let signed_powers: Vec<Rational> = (0..=n)
        .map(|j| minus_one_to(j) * rat_pow(&(&m * Rational::from(j as i64) - p.a()), n as u32))
        .collect();
    let mut lhs = Rational::zero();
    for k in 0..=n {
        let inner: Rational = (0..=k)
            .map(|j| Rational::from(binomial(k as u64, j as i64)) * &signed_powers[j])
            .sum();
        lhs += inner / Rational::from(k as i64 + 1);
    }
    let lhs = lhs / rat_pow(&m, n as u32);
    IdentityCheck::new(IdentityId::WorpitzkyGeneral, p, n, lhs, bernoulli_poly_eval(n, &p.bernoulli_arg()))
}

/// `∫_0^∞ λ^k e^{-λ} dλ = k!`.
pub fn gamma_moment(k: usize) -> Integer {
    factorial_u(k as u64)
}

/// `F̃(n; x) = ∫_0^∞ D̃(n; xλ) e^{-λ} dλ`, coefficientwise: each `λ^k` in
/// `D̃(n; xλ)` integrates to `gamma_moment(k)`.
pub fn check_theorem3_exact(p: &WhitneyParams, n: usize) -> IdentityCheck {
    let dowling = dowling_poly(p, n);
    let transformed = Polynomial::new(
        dowling
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * Rational::from(gamma_moment(k)))
            .collect(),
    );
    IdentityCheck::new(IdentityId::Theorem3Exact, p, n, &transformed, &tanny_dowling_poly(p, n))
}

/// `∫_{-1}^{0} w_n(x) dx = B_n`, with `w_n` built from the Stirling row.
pub fn check_kellner(n: usize) -> IdentityCheck {
    let lhs = geometric_poly(n).definite_integral(&-Rational::one(), &Rational::zero());
    IdentityCheck::new(IdentityId::Kellner, &WhitneyParams::classical(), n, lhs, bernoulli_number(n))
}

/// `B_n = Σ_{k=0}^{n} Σ_{j=0}^{k} (-1)^j C(k,j) j^n / (k+1)`.
pub fn check_worpitzky_classic(n: usize) -> IdentityCheck {
    let mut lhs = Rational::zero();
    for k in 0..=n {
        let inner: Integer = (0..=k)
            .map(|j| {
                let term = binomial(k as u64, j as i64) * Integer::from(j).pow(n as u32);
                if j % 2 == 0 { term } else { -term }
            })
            .sum();
        lhs += Rational::from(inner) / Rational::from(k as i64 + 1);
    }
    IdentityCheck::new(IdentityId::WorpitzkyClassic, &WhitneyParams::classical(), n, lhs, bernoulli_number(n))
        .with_detail("double_sum")
}

/// `B_n = Σ_{k=1}^{n} (-1)^k k!/(k+1) S(n,k)`, valid for `n >= 1`.
pub fn check_bernoulli_stirling_form(n: usize) -> Result<IdentityCheck> {
    if n == 0 {
        return Err(Error::Domain("the Stirling form of B_n needs n >= 1".into()));
    }
    let row = stirling2_row(n);
    let lhs: Rational = (1..=n)
        .map(|k| {
            let c = Rational::from(factorial_u(k as u64)) * minus_one_to(k) / Rational::from(k as i64 + 1);
            c * Rational::from(row[k].clone())
        })
        .sum();
    Ok(IdentityCheck::new(IdentityId::WorpitzkyClassic, &WhitneyParams::classical(), n, lhs, bernoulli_number(n))
        .with_detail("stirling_form"))
}

/// At `m = 1, a = 0` the noncentral families collapse to `φ_n` and `w_n`.
pub fn check_reductions(n: usize) -> Vec<IdentityCheck> {
    let c = WhitneyParams::classical();
    vec![
        IdentityCheck::new(IdentityId::Reduction, &c, n, &dowling_poly(&c, n), &exponential_poly(n))
            .with_detail("dowling_exponential"),
        IdentityCheck::new(IdentityId::Reduction, &c, n, &tanny_dowling_poly(&c, n), &geometric_poly(n))
            .with_detail("tanny_dowling_geometric"),
    ]
}

/// The three evaluations of the Tanny-Dowling EGF at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theorem4Residual {
    /// `Σ_{n<=N} F̃(n; x) z^n / n!`
    pub series: f64,
    /// `m e^{-az} / (m - x(e^{mz} - 1))`
    pub closed_form: f64,
    /// The improper `λ`-integral evaluated numerically.
    pub integral: f64,
    /// Largest pairwise absolute difference.
    pub residual: f64,
}

/// Compares truncated series, closed form, and improper integral.
///
/// Rejects points where `x(e^{mz} - 1)/m >= 1` with [`Error::Divergent`].
pub fn check_theorem4_series(p: &WhitneyParams, x: &Rational, z: &Rational, terms: usize) -> Result<Theorem4Residual> {
    let (mf, af, xf, zf) = (p.m() as f64, p.a().to_f64(), x.to_f64(), z.to_f64());
    if !(theorem4_decay_rate(mf, xf, zf) > 0.0) {
        return Err(Error::Divergent(format!(
            "x(e^(mz)-1)/m must be below 1 (m={}, x={x}, z={z})",
            p.m()
        )));
    }
    let mut series = 0.0;
    let mut z_pow_over_fact = Rational::one();
    for n in 0..=terms {
        if n > 0 {
            z_pow_over_fact = z_pow_over_fact * z / Rational::from(n as i64);
        }
        series += (tanny_dowling_poly(p, n).eval(x) * &z_pow_over_fact).to_f64();
    }
    let closed_form = tanny_dowling_egf_closed_form(mf, af, xf, zf)?;
    let integral = improper_integral_theorem4(p, xf, zf)?;
    let residual = (series - closed_form)
        .abs()
        .max((series - integral).abs())
        .max((closed_form - integral).abs());
    Ok(Theorem4Residual { series, closed_form, integral, residual })
}

/// Which identity families a sweep evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    All,
    Theorem1,
    Corollary2,
    Worpitzky,
    Theorem3,
    Reductions,
}

impl Selection {
    fn includes(self, id: IdentityId) -> bool {
        use IdentityId::*;
        match self {
            Selection::All => id != Theorem4Series,
            Selection::Theorem1 => matches!(id, Theorem1 | Kellner),
            Selection::Corollary2 => id == Corollary2,
            Selection::Worpitzky => matches!(id, WorpitzkyGeneral | WorpitzkyClassic),
            Selection::Theorem3 => id == Theorem3Exact,
            Selection::Reductions => matches!(id, Reduction | Kellner | WorpitzkyClassic),
        }
    }
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Selection::All,
            "theorem1" => Selection::Theorem1,
            "corollary2" => Selection::Corollary2,
            "worpitzky" => Selection::Worpitzky,
            "theorem3" => Selection::Theorem3,
            "reductions" => Selection::Reductions,
            other => return Err(Error::InvalidParameter(format!("unknown identity selector {other:?}"))),
        })
    }
}

/// Cartesian grid `m × a × (0..=nmax)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub m: Vec<u32>,
    pub a: Vec<Rational>,
    pub nmax: usize,
}

impl Default for SweepGrid {
    /// `m ∈ 1..=5`, `a ∈ {-3, -5/2, ..., 3}`, `n <= 25`.
    fn default() -> Self {
        SweepGrid {
            m: (1..=5).collect(),
            a: (-6..=6).map(|t| Rational::new(t, 2).unwrap()).collect(),
            nmax: 25,
        }
    }
}

impl SweepGrid {
    pub fn empty() -> Self {
        SweepGrid { m: Vec::new(), a: Vec::new(), nmax: 0 }
    }

    /// `m ∈ mmin..=mmax`, `a` stepping from `amin` to at most `amax`.
    pub fn from_ranges(mmin: i64, mmax: i64, amin: &Rational, amax: &Rational, astep: &Rational, nmax: usize) -> Result<Self> {
        if mmin < 1 {
            return Err(Error::InvalidParameter(format!("m must be a positive integer, got {mmin}")));
        }
        if mmax < mmin || mmax > u32::MAX as i64 {
            return Err(Error::InvalidParameter(format!("empty or oversized m range {mmin}..={mmax}")));
        }
        if !(astep > &Rational::zero()) {
            return Err(Error::InvalidParameter(format!("a step must be positive, got {astep}")));
        }
        if amin > amax {
            return Err(Error::InvalidParameter(format!("a range is empty: {amin} > {amax}")));
        }
        let mut a = Vec::new();
        let mut cur = amin.clone();
        while &cur <= amax {
            a.push(cur.clone());
            cur += astep;
            if a.len() > 100_000 {
                return Err(Error::InvalidParameter("a grid exceeds 100000 points".into()));
            }
        }
        Ok(SweepGrid { m: (mmin as u32..=mmax as u32).collect(), a, nmax })
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty() || self.a.is_empty()
    }

    fn params(&self) -> Vec<WhitneyParams> {
        self.m
            .iter()
            .flat_map(|&m| self.a.iter().map(move |a| WhitneyParams::new(m as i64, a.clone())))
            .collect::<Result<Vec<_>>>()
            .expect("grid m values are positive")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub grid: SweepGrid,
    pub checks: Vec<IdentityCheck>,
    #[serde(rename = "pass")]
    pub pass_count: usize,
    #[serde(rename = "fail")]
    pub fail_count: usize,
    /// Not serialized so that identical sweeps give identical JSON.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn all_pass(&self) -> bool {
        self.fail_count == 0
    }
}

enum Task {
    Grid(WhitneyParams, usize),
    Classical(usize),
}

fn run_task(task: &Task, sel: Selection) -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    match task {
        Task::Grid(p, n) => {
            let n = *n;
            if sel.includes(IdentityId::Theorem1) {
                out.push(check_theorem1(p, n));
            }
            if sel.includes(IdentityId::Corollary2) {
                out.push(check_corollary2(p, n));
            }
            if sel.includes(IdentityId::WorpitzkyGeneral) {
                out.push(check_worpitzky_general(p, n));
            }
            if sel.includes(IdentityId::Theorem3Exact) {
                out.push(check_theorem3_exact(p, n));
            }
        }
        Task::Classical(n) => {
            let n = *n;
            if sel.includes(IdentityId::Kellner) {
                out.push(check_kellner(n));
            }
            if sel.includes(IdentityId::WorpitzkyClassic) {
                out.push(check_worpitzky_classic(n));
                if let Ok(c) = check_bernoulli_stirling_form(n) {
                    out.push(c);
                }
            }
            if sel.includes(IdentityId::Reduction) {
                out.extend(check_reductions(n));
            }
        }
    }
    out
}

/// Runs every selected exact check over the grid.
///
/// Grid points are evaluated in parallel; the report lists checks in grid
/// order (`m`, then `a`, then `n`), followed by the parameter-free classical
/// checks for `n = 0..=nmax`.
pub fn verify_sweep(grid: &SweepGrid, selection: Selection) -> VerificationReport {
    let start = Instant::now();
    if grid.is_empty() {
        return VerificationReport {
            grid: grid.clone(),
            checks: Vec::new(),
            pass_count: 0,
            fail_count: 0,
            wall_time: start.elapsed(),
        };
    }
    let params = grid.params();
    params.par_iter().for_each(|p| {
        global_cache().get(p, grid.nmax);
    });
    let mut tasks: Vec<Task> = params
        .into_iter()
        .flat_map(|p| (0..=grid.nmax).map(move |n| Task::Grid(p.clone(), n)))
        .collect();
    tasks.extend((0..=grid.nmax).map(Task::Classical));
    let checks: Vec<IdentityCheck> = tasks
        .par_iter()
        .map(|t| run_task(t, selection))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let pass_count = checks.iter().filter(|c| c.holds).count();
    let fail_count = checks.len() - pass_count;
    VerificationReport { grid: grid.clone(), checks, pass_count, fail_count, wall_time: start.elapsed() }
}
