//! Dense exact polynomials and the four polynomial families built on the
//! Whitney/Stirling triangles.

use serde::{Deserialize, Serialize};

use crate::exact_arith::Rational;
use crate::triangles::{global_cache, stirling2_row, WhitneyParams};

/// Dense univariate polynomial, `coeffs[k]` multiplies `x^k`.
///
/// Trailing zeros are trimmed; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// `p(c x)`: coefficient `k` is multiplied by `c^k`.
    pub fn scale_arg(&self, c: &Rational) -> Polynomial {
        let mut power = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for coeff in &self.coeffs {
            out.push(coeff * &power);
            power *= c;
        }
        Polynomial::new(out)
    }

    /// `∫_lo^hi p(x) dx`, exactly.
    pub fn definite_integral(&self, lo: &Rational, hi: &Rational) -> Rational {
        let mut hi_pow = hi.clone();
        let mut lo_pow = lo.clone();
        let mut total = Rational::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let width = &hi_pow - &lo_pow;
            total += c * width / Rational::from(k as i64 + 1);
            hi_pow *= hi;
            lo_pow *= lo;
        }
        total
    }

    /// Coefficients rounded to binary64.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(Rational::to_f64).collect()
    }
}

pub fn poly_eval(p: &Polynomial, x: &Rational) -> Rational {
    p.eval(x)
}

pub fn poly_scale_arg(p: &Polynomial, c: &Rational) -> Polynomial {
    p.scale_arg(c)
}

pub fn poly_definite_integral(p: &Polynomial, lo: &Rational, hi: &Rational) -> Rational {
    p.definite_integral(lo, hi)
}

/// Noncentral Dowling polynomial `D̃_{m,a}(n; x) = Σ_k W̃_{m,a}(n,k) x^k`.
pub fn dowling_poly(p: &WhitneyParams, n: usize) -> Polynomial {
    let table = global_cache().get(p, n);
    Polynomial::new(table.row(n).to_vec())
}

/// Noncentral Tanny-Dowling polynomial `F̃_{m,a}(n; x) = Σ_k k! W̃_{m,a}(n,k) x^k`.
pub fn tanny_dowling_poly(p: &WhitneyParams, n: usize) -> Polynomial {
    let table = global_cache().get(p, n);
    Polynomial::new(with_factorials(table.row(n).iter().cloned()))
}

/// Exponential (Bell) polynomial `φ_n`, built directly from the Stirling row.
pub fn exponential_poly(n: usize) -> Polynomial {
    Polynomial::new(stirling2_row(n).into_iter().map(Rational::from).collect())
}

/// Geometric (Fubini) polynomial `w_n`, built directly from the Stirling row.
pub fn geometric_poly(n: usize) -> Polynomial {
    Polynomial::new(with_factorials(stirling2_row(n).into_iter().map(Rational::from)))
}

/// Geometric number `w_n = w_n(1)`.
pub fn geometric_number(n: usize) -> Rational {
    geometric_poly(n).eval(&Rational::one())
}

fn with_factorials(row: impl Iterator<Item = Rational>) -> Vec<Rational> {
    let mut fact = Rational::one();
    row.enumerate()
        .map(|(k, v)| {
            if k > 0 {
                fact *= &Rational::from(k as i64);
            }
            v * &fact
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Dowling,
    TannyDowling,
    Exponential,
    Geometric,
    Bernoulli,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Dowling => "dowling",
            Family::TannyDowling => "tanny_dowling",
            Family::Exponential => "exponential",
            Family::Geometric => "geometric",
            Family::Bernoulli => "bernoulli",
        }
    }
}

/// JSON export shape of one polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialRecord {
    pub n: usize,
    pub family: Family,
    pub m: u32,
    pub a: Rational,
    pub coeffs: Vec<Rational>,
}

impl PolynomialRecord {
    /// Packs a polynomial of index `n`; `coeffs` is padded with zeros to
    /// length `n + 1` so every record lists `c0..cn`.
    pub fn new(family: Family, p: &WhitneyParams, n: usize, poly: &Polynomial) -> Self {
        let len = poly.coeffs().len().max(n + 1);
        PolynomialRecord {
            n,
            family,
            m: p.m(),
            a: p.a().clone(),
            coeffs: (0..len).map(|k| poly.coeff(k)).collect(),
        }
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }
}
