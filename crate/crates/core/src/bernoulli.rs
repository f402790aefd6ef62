//! Bernoulli numbers (convention `B_1 = -1/2`) and Bernoulli polynomials.

use std::sync::{OnceLock, RwLock};

use crate::exact_arith::{binomial, Rational};
use crate::poly::Polynomial;

/// Growable prefix `B_0..B_nmax` and `B_0(x)..B_nmax(x)`.
#[derive(Clone, Debug, Default)]
pub struct BernoulliCache {
    numbers: Vec<Rational>,
    polys: Vec<Polynomial>,
}

impl BernoulliCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Extends the cache so that index `nmax` is available.
    pub fn ensure(&mut self, nmax: usize) {
        while self.numbers.len() <= nmax {
            let n = self.numbers.len();
            // Σ_{k=0}^{n} C(n+1, k) B_k = 0
            let b = if n == 0 {
                Rational::one()
            } else {
                let partial: Rational = self
                    .numbers
                    .iter()
                    .enumerate()
                    .map(|(k, bk)| bk * Rational::from(binomial(n as u64 + 1, k as i64)))
                    .sum();
                -(partial / Rational::from(n as i64 + 1))
            };
            self.numbers.push(b);
        }
        while self.polys.len() <= nmax {
            let n = self.polys.len();
            // B_n(x) = Σ_k C(n,k) B_k x^{n-k}
            let coeffs = (0..=n)
                .map(|deg| &self.numbers[n - deg] * Rational::from(binomial(n as u64, deg as i64)))
                .collect();
            self.polys.push(Polynomial::new(coeffs));
        }
    }

    pub fn numbers(&self) -> &[Rational] {
        &self.numbers
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }
}

fn global() -> &'static RwLock<BernoulliCache> {
    static CACHE: OnceLock<RwLock<BernoulliCache>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(BernoulliCache::new()))
}

fn with_cache<T>(n: usize, f: impl Fn(&BernoulliCache) -> T) -> T {
    {
        let cache = global().read().unwrap();
        if cache.numbers.len() > n {
            return f(&cache);
        }
    }
    let mut cache = global().write().unwrap();
    cache.ensure(n);
    f(&cache)
}

pub fn bernoulli_number(n: usize) -> Rational {
    with_cache(n, |c| c.numbers[n].clone())
}

pub fn bernoulli_poly(n: usize) -> Polynomial {
    with_cache(n, |c| c.polys[n].clone())
}

pub fn bernoulli_poly_eval(n: usize, x: &Rational) -> Rational {
    with_cache(n, |c| c.polys[n].eval(x))
}
