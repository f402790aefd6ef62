//! Stirling numbers of the second kind and noncentral Whitney numbers of the
//! second kind `W̃_{m,a}(n, k)`.
//!
//! Two routes compute `W̃`: the explicit alternating sum
//! `(1/(m^k k!)) Σ_j C(k,j) (-1)^{k-j} (mj - a)^n` and the triangular
//! recurrence `W̃(n+1, k) = W̃(n, k-1) + (mk - a) W̃(n, k)`. Tables are built
//! with the recurrence and cached per `(m, a)`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{binomial, factorial_u, Integer, Rational};

/// The pair `(m, a)` indexing the noncentral families; `m >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WhitneyParams {
    m: u32,
    a: Rational,
}

impl WhitneyParams {
    pub fn new(m: i64, a: Rational) -> Result<Self> {
        if m < 1 || m > u32::MAX as i64 {
            return Err(Error::InvalidParameter(format!("m must be a positive integer, got {m}")));
        }
        Ok(WhitneyParams { m: m as u32, a })
    }

    /// The classical case `m = 1, a = 0`.
    pub fn classical() -> Self {
        WhitneyParams { m: 1, a: Rational::zero() }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn m_rational(&self) -> Rational {
        Rational::from(self.m as i64)
    }

    /// `-a/m`, the Bernoulli-polynomial argument.
    pub fn bernoulli_arg(&self) -> Rational {
        -(&self.a / self.m_rational())
    }

    fn cache_key(&self) -> (u32, String) {
        (self.m, self.a.to_string())
    }
}

/// `S(n, k)`, zero outside `0..=n`.
pub fn stirling2(n: usize, k: i64) -> Integer {
    if k < 0 || k as usize > n {
        return Integer::zero();
    }
    stirling2_row(n).swap_remove(k as usize)
}

/// Row `n` of the Stirling triangle, `S(n, 0..=n)`.
pub fn stirling2_row(n: usize) -> Vec<Integer> {
    let mut row = vec![Integer::one()];
    for i in 0..n {
        let mut next = vec![Integer::zero(); i + 2];
        for (k, v) in row.iter().enumerate() {
            next[k + 1] += v;
            next[k] += v * k;
        }
        row = next;
    }
    row
}

/// `W̃_{m,a}(n, k)` by the explicit alternating sum.
pub fn whitney2_explicit(p: &WhitneyParams, n: usize, k: i64) -> Rational {
    if k < 0 || k as usize > n {
        return Rational::zero();
    }
    let powers = ExplicitPowers::new(p, n, k as usize);
    powers.entry(k as usize)
}

/// Row `W̃_{m,a}(n, 0..=n)` by the explicit sum, sharing the powers
/// `(mj - a)^n` across the row.
pub fn whitney2_explicit_row(p: &WhitneyParams, n: usize) -> Vec<Rational> {
    let powers = ExplicitPowers::new(p, n, n);
    (0..=n).map(|k| powers.entry(k)).collect()
}

/// With `a = r/s` in lowest terms, `(mj - a)^n = (mjs - r)^n / s^n`, so the
/// alternating sum runs over integers and is divided once at the end.
struct ExplicitPowers {
    m: u32,
    s_pow: Integer,
    numer_powers: Vec<Integer>,
}

impl ExplicitPowers {
    fn new(p: &WhitneyParams, n: usize, kmax: usize) -> Self {
        let (r, s) = (p.a().numer(), p.a().denom());
        let numer_powers = (0..=kmax)
            .map(|j| {
                let base = Integer::from(p.m()) * Integer::from(j) * s - r;
                base.pow(n as u32)
            })
            .collect();
        ExplicitPowers { m: p.m(), s_pow: s.pow(n as u32), numer_powers }
    }

    fn entry(&self, k: usize) -> Rational {
        let mut sum = Integer::zero();
        for j in 0..=k {
            let term = binomial(k as u64, j as i64) * &self.numer_powers[j];
            if (k - j).is_multiple_of(2) {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let den = &self.s_pow * factorial_u(k as u64) * Integer::from(self.m).pow(k as u32);
        Rational::new(sum, den).expect("denominator is a product of nonzero factors")
    }
}

/// Memoized triangle `rows[n][k] = W̃_{m,a}(n, k)` for `0 <= k <= n <= nmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct WhitneyTriangle {
    params: WhitneyParams,
    rows: Vec<Vec<Rational>>,
}

impl WhitneyTriangle {
    pub fn params(&self) -> &WhitneyParams {
        &self.params
    }

    pub fn nmax(&self) -> usize {
        self.rows.len() - 1
    }

    /// Row `n`, of length `n + 1`. Panics if `n > nmax`.
    pub fn row(&self, n: usize) -> &[Rational] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Entry `(n, k)`, zero when `k` is outside `0..=n`. Panics if `n > nmax`.
    pub fn get(&self, n: usize, k: i64) -> Rational {
        if k < 0 || k as usize > n {
            return Rational::zero();
        }
        self.rows[n][k as usize].clone()
    }

    /// `n,k,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,value\n");
        for (n, row) in self.rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{n},{k},{v}");
            }
        }
        out
    }
}

/// Builds the triangle up to `nmax` with the recurrence.
pub fn whitney2_table(p: &WhitneyParams, nmax: usize) -> WhitneyTriangle {
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(nmax + 1);
    rows.push(vec![Rational::one()]);
    let m = p.m_rational();
    // (mk - a) for k = 0..=nmax
    let weights: Vec<Rational> =
        (0..=nmax).map(|k| &m * Rational::from(k as i64) - p.a()).collect();
    for n in 0..nmax {
        let prev = &rows[n];
        let mut next = vec![Rational::zero(); n + 2];
        for (k, v) in prev.iter().enumerate() {
            next[k + 1] += v;
            next[k] += &weights[k] * v;
        }
        rows.push(next);
    }
    WhitneyTriangle { params: p.clone(), rows }
}

/// Concurrent lookup-or-build cache of triangles keyed by `(m, "p/q")`.
///
/// A request for a larger `nmax` than cached replaces the entry. Two threads
/// racing on the same key may both build; the results are identical.
#[derive(Default)]
pub struct TriangleCache {
    tables: RwLock<HashMap<(u32, String), Arc<WhitneyTriangle>>>,
}

impl TriangleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: &WhitneyParams, nmax: usize) -> Arc<WhitneyTriangle> {
        let key = p.cache_key();
        if let Some(t) = self.tables.read().unwrap().get(&key) {
            if t.nmax() >= nmax {
                return Arc::clone(t);
            }
        }
        let built = Arc::new(whitney2_table(p, nmax));
        let mut tables = self.tables.write().unwrap();
        let entry = tables.entry(key).or_insert_with(|| Arc::clone(&built));
        if entry.nmax() < nmax {
            *entry = Arc::clone(&built);
        }
        Arc::clone(entry)
    }

    pub fn len(&self) -> usize {
        self.tables.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Process-wide triangle cache.
pub fn global_cache() -> &'static TriangleCache {
    static CACHE: OnceLock<TriangleCache> = OnceLock::new();
    CACHE.get_or_init(TriangleCache::new)
}
