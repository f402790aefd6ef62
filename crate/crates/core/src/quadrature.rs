//! Floating-point quadrature used to cross-check the exact engine.
//!
//! Finite intervals use adaptive Simpson; `∫_0^∞ f(λ) e^{-λ} dλ` uses a
//! Gauss-Laguerre rule whose nodes come from Newton iteration on the
//! three-term Laguerre recurrence, then polished to double-double so that
//! badly cancelling polynomial integrands still come out to full binary64
//! accuracy.
//!
//! Polynomial integrands are evaluated in double-double arithmetic from
//! exactly split coefficients. The families here have coefficients many
//! orders of magnitude larger than their values on the integration ranges,
//! so plain binary64 Horner loses every significant digit by `n ≈ 15`.

use crate::bernoulli::bernoulli_poly_eval;
use crate::error::{Error, Result};
use crate::exact_arith::Rational;
use crate::poly::{dowling_poly, tanny_dowling_poly, Polynomial};
use crate::triangles::WhitneyParams;

/// Relative threshold for numeric residuals.
pub const NUMERIC_REL_TOL: f64 = 1e-8;
/// Absolute threshold used instead when the target is exactly zero.
pub const NUMERIC_ABS_TOL_AT_ZERO: f64 = 1e-10;
/// Largest `n` for which numeric cross-checks are meaningful in binary64.
pub const NUMERIC_MAX_N: usize = 15;

const SIMPSON_MAX_DEPTH: u32 = 50;
const LAGUERRE_MAX_ORDER: usize = 128;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: u64,
}

/// Adaptive Simpson with Richardson correction.
///
/// Fails with [`Error::Convergence`] if any panel needs more than 50
/// bisections or the integrand returns a non-finite value.
pub fn adaptive_simpson<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter("integration bounds must be finite".into()));
    }
    let mut state = Simpson { f: &f, evaluations: 0, est_error: 0.0 };
    let fa = state.eval(lo)?;
    let fb = state.eval(hi)?;
    let mid = 0.5 * (lo + hi);
    let fm = state.eval(mid)?;
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    let value = state.refine(lo, hi, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)?;
    Ok(QuadratureResult { value, est_error: state.est_error, evaluations: state.evaluations })
}

struct Simpson<'a, F> {
    f: &'a F,
    evaluations: u64,
    est_error: f64,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        let y = (self.f)(x);
        if !y.is_finite() {
            return Err(Error::Convergence(format!("integrand is not finite at {x}")));
        }
        Ok(y)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            self.est_error += delta.abs() / 15.0;
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Convergence(format!(
                "adaptive Simpson exhausted its depth on [{a}, {b}] (panel error {:.3e})",
                delta.abs() / 15.0
            )));
        }
        Ok(self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
}

/// Gauss-Laguerre rule for the weight `e^{-λ}` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaguerreRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    nodes_dd: Vec<DoubleDouble>,
    weights_dd: Vec<DoubleDouble>,
}

impl LaguerreRule {
    pub fn new(order: usize) -> Result<Self> {
        laguerre_rule(order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_i w_i f(λ_i) ≈ ∫_0^∞ f(λ) e^{-λ} dλ`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `Σ_i w_i p(x λ_i)` with nodes, weights and accumulation all in
    /// double-double, for polynomials whose values cancel heavily.
    pub fn integrate_scaled_poly(&self, p: &FloatPolynomial, x: f64) -> f64 {
        self.nodes_dd
            .iter()
            .zip(&self.weights_dd)
            .fold(DoubleDouble::ZERO, |acc, (&lambda, &w)| acc.add(w.mul(p.eval_dd(lambda.mul_f64(x)))))
            .to_f64()
    }
}

/// Builds the `order`-point Gauss-Laguerre rule, `1 <= order <= 128`.
pub fn laguerre_rule(order: usize) -> Result<LaguerreRule> {
    if order == 0 || order > LAGUERRE_MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "Laguerre order must be in 1..={LAGUERRE_MAX_ORDER}, got {order}"
        )));
    }
    let n = order;
    let nf = n as f64;
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut z = 0.0f64;
    for i in 0..n {
        // asymptotic initial guesses for the i-th smallest root
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (ln, ln_1) = laguerre_pair(n, z);
            let step = ln / (nf * (ln - ln_1) / z);
            z -= step;
            if step.abs() <= 3e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !z.is_finite() {
            return Err(Error::Convergence(format!("Laguerre root {i} of order {n} did not converge")));
        }
        nodes.push(z);
        weights.push(christoffel_weight(n, z));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] <= 0.0 {
        return Err(Error::Convergence(format!("Laguerre roots of order {n} are not strictly increasing")));
    }
    let nodes_dd: Vec<DoubleDouble> = nodes.iter().map(|&z| polish_root_dd(n, z)).collect();
    let weights_dd = nodes_dd.iter().map(|&z| christoffel_weight_dd(n, z)).collect();
    Ok(LaguerreRule { order: n, nodes, weights, nodes_dd, weights_dd })
}

/// A few double-double Newton steps from a binary64 root.
fn polish_root_dd(n: usize, z0: f64) -> DoubleDouble {
    let mut z = DoubleDouble::from_f64(z0);
    for _ in 0..3 {
        let (ln, ln_1) = laguerre_pair_dd(n, z);
        let deriv = ln.sub(ln_1).mul_f64(n as f64).div(z);
        z = z.sub(ln.div(deriv));
    }
    z
}

fn laguerre_step_dd(j: usize, z: DoubleDouble, p2: DoubleDouble, p3: DoubleDouble) -> DoubleDouble {
    let jf = j as f64;
    DoubleDouble::from_f64(2.0 * jf - 1.0)
        .sub(z)
        .mul(p2)
        .sub(p3.mul_f64(jf - 1.0))
        .div_f64(jf)
}

fn laguerre_pair_dd(n: usize, z: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let mut p1 = DoubleDouble::ONE;
    let mut p2 = DoubleDouble::ZERO;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        p1 = laguerre_step_dd(j, z, p2, p3);
    }
    (p1, p2)
}

fn christoffel_weight_dd(n: usize, z: DoubleDouble) -> DoubleDouble {
    let mut p1 = DoubleDouble::ONE;
    let mut p2 = DoubleDouble::ZERO;
    let mut sum = DoubleDouble::ONE;
    for j in 1..n {
        let p3 = p2;
        p2 = p1;
        p1 = laguerre_step_dd(j, z, p2, p3);
        sum = sum.add(p1.mul(p1));
    }
    DoubleDouble::ONE.div(sum)
}

/// `1 / Σ_{k<n} L_k(z)^2`. The Laguerre polynomials are orthonormal for
/// `e^{-λ}`, and this form tolerates the last-ulp noise in the Newton roots
/// far better than the derivative formula `-1/(n L_n'(z) L_{n-1}(z))`.
fn christoffel_weight(n: usize, z: f64) -> f64 {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    let mut sum = 1.0;
    for j in 1..n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
        sum += p1 * p1;
    }
    1.0 / sum
}

/// `(L_n(z), L_{n-1}(z))` by the three-term recurrence.
fn laguerre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

/// Unevaluated sum `hi + lo` carrying roughly 106 bits.
#[derive(Clone, Copy, Debug, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn from_rational(q: &Rational) -> Self {
        let hi = q.to_f64();
        let lo = if hi.is_finite() {
            Rational::from_f64(hi).map(|h| (q - h).to_f64()).unwrap_or(0.0)
        } else {
            0.0
        };
        DoubleDouble { hi, lo }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn mul_f64(self, x: f64) -> Self {
        let p = self.hi * x;
        let e = self.hi.mul_add(x, -p);
        let (hi, lo) = Self::two_sum(p, e + self.lo * x);
        DoubleDouble { hi, lo }
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (hi, lo) = Self::two_sum(s, e + self.lo + o.lo);
        DoubleDouble { hi, lo }
    }

    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = Self::two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        DoubleDouble { hi, lo }
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = Self::two_sum(q1, q2);
        DoubleDouble { hi, lo }.add(Self::from_f64(q3))
    }

    fn div_f64(self, x: f64) -> Self {
        self.div(Self::from_f64(x))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// A polynomial prepared for accurate floating evaluation.
#[derive(Clone, Debug)]
pub struct FloatPolynomial {
    coeffs: Vec<DoubleDouble>,
}

impl FloatPolynomial {
    pub fn new(p: &Polynomial) -> Self {
        FloatPolynomial { coeffs: p.coeffs().iter().map(DoubleDouble::from_rational).collect() }
    }

    /// Double-double Horner evaluation, rounded once at the end.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(DoubleDouble::ZERO, |acc, &c| acc.mul_f64(x).add(c))
            .to_f64()
    }

    fn eval_dd(&self, x: DoubleDouble) -> DoubleDouble {
        self.coeffs.iter().rev().fold(DoubleDouble::ZERO, |acc, &c| acc.mul(x).add(c))
    }
}

/// A computed value next to its exact-engine target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericResidual {
    pub computed: f64,
    pub target: f64,
}

impl NumericResidual {
    pub fn abs(&self) -> f64 {
        (self.computed - self.target).abs()
    }

    /// Relative residual; equals [`abs`](Self::abs) when the target is zero.
    pub fn rel(&self) -> f64 {
        if self.target == 0.0 {
            self.abs()
        } else {
            self.abs() / self.target.abs()
        }
    }

    pub fn passes(&self, rel_tol: f64, abs_tol_at_zero: f64) -> bool {
        if self.target == 0.0 {
            self.abs() < abs_tol_at_zero
        } else {
            self.rel() < rel_tol
        }
    }

    /// Pass/fail at the default thresholds.
    pub fn passes_default(&self) -> bool {
        self.passes(NUMERIC_REL_TOL, NUMERIC_ABS_TOL_AT_ZERO)
    }
}

/// `Σ_i w_i D̃(n; x λ_i)` against `F̃(n; x)`.
pub fn check_theorem3_numeric(p: &WhitneyParams, n: usize, x: f64, order: usize) -> Result<NumericResidual> {
    let rule = laguerre_rule(order)?;
    let xq = Rational::from_f64(x).ok_or_else(|| Error::InvalidParameter(format!("x must be finite, got {x}")))?;
    let dowling = FloatPolynomial::new(&dowling_poly(p, n));
    let computed = rule.integrate_scaled_poly(&dowling, x);
    let target = tanny_dowling_poly(p, n).eval(&xq).to_f64();
    Ok(NumericResidual { computed, target })
}

/// `∫_{-1}^{0} F̃(n; m x) dx` by adaptive Simpson against `m^n B_n(-a/m)`.
///
/// `tol` is relative to the largest integrand magnitude on the interval.
pub fn check_theorem1_numeric(p: &WhitneyParams, n: usize, tol: f64) -> Result<NumericResidual> {
    let scaled = tanny_dowling_poly(p, n).scale_arg(&p.m_rational());
    let integrand = FloatPolynomial::new(&scaled);
    let scale = (0..=64)
        .map(|i| integrand.eval(-(i as f64) / 64.0).abs())
        .fold(1.0f64, f64::max);
    let result = adaptive_simpson(|x| integrand.eval(x), -1.0, 0.0, tol * scale)?;
    let target = p.m_rational().pow(n as u32) * bernoulli_poly_eval(n, &p.bernoulli_arg());
    Ok(NumericResidual { computed: result.value, target: target.to_f64() })
}

/// Decay rate `1 - (x/m)(e^{mz} - 1)` of the exponential in the Laplace-type integral for the EGF.
pub fn theorem4_decay_rate(m: f64, x: f64, z: f64) -> f64 {
    1.0 - x / m * (m * z).exp_m1()
}

/// Closed form `m e^{-az} / (m - x(e^{mz} - 1))` of the Tanny-Dowling EGF.
pub fn tanny_dowling_egf_closed_form(m: f64, a: f64, x: f64, z: f64) -> Result<f64> {
    let rate = theorem4_decay_rate(m, x, z);
    if !(rate > 0.0) {
        return Err(divergent(m, x, z));
    }
    Ok(m * (-a * z).exp() / (m - x * (m * z).exp_m1()))
}

/// `∫_0^∞ exp[-az - λ(1 - (x/m)(e^{mz} - 1))] dλ` by truncation and
/// adaptive Simpson.
pub fn improper_integral_theorem4(p: &WhitneyParams, x: f64, z: f64) -> Result<f64> {
    improper_integral_theorem4_f64(p.m() as f64, p.a().to_f64(), x, z)
}

/// Same as [`improper_integral_theorem4`] for a real (possibly irrational) `a`.
pub fn improper_integral_theorem4_f64(m: f64, a: f64, x: f64, z: f64) -> Result<f64> {
    let rate = theorem4_decay_rate(m, x, z);
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(divergent(m, x, z));
    }
    const EPS: f64 = 1e-16;
    let az = a * z;
    let upper = ((1.0 / EPS).ln() + az.abs()) / rate;
    let prefactor = (-az).exp();
    let tol = 1e-14 * prefactor / rate;
    let result = adaptive_simpson(|lambda| prefactor * (-rate * lambda).exp(), 0.0, upper, tol)?;
    Ok(result.value)
}

fn divergent(m: f64, x: f64, z: f64) -> Error {
    Error::Divergent(format!("x(e^(mz)-1)/m must be below 1 (m={m}, x={x}, z={z})"))
}
