//! Bernoulli numbers, Stirling numbers of the first kind, Pochhammer symbols
//! and binomial coefficients.
//!
//! The Bernoulli and Stirling tables are process-wide caches that only ever
//! grow. Readers share a lock; extension takes it exclusively.

use std::sync::{LazyLock, RwLock};

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

static BERNOULLI: LazyLock<RwLock<Vec<Rational>>> =
    LazyLock::new(|| RwLock::new(vec![Rational::from(1)]));

static STIRLING: LazyLock<RwLock<Vec<Vec<Integer>>>> =
    LazyLock::new(|| RwLock::new(vec![vec![Integer::from(1)]]));

/// Exact B_k with B₁ = -1/2, from Σ_{ν=0}^{n} C(n+1, ν) B_ν = 0 and B₀ = 1.
pub fn bernoulli_rational(k: usize) -> Rational {
    if let Some(b) = BERNOULLI.read().expect("bernoulli cache poisoned").get(k) {
        return b.clone();
    }
    let mut table = BERNOULLI.write().expect("bernoulli cache poisoned");
    while table.len() <= k {
        let n = table.len();
        // Σ_{ν<n} C(n+1, ν) B_ν + (n+1) B_n = 0
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (nu, b) in table.iter().enumerate() {
            acc += Rational::from(&binom * b.numer()) / b.denom();
            binom = binom * (n + 1 - nu) / (nu + 1);
        }
        let b_n = -acc / Rational::from(n + 1);
        if n >= 3 && n % 2 == 1 {
            assert!(b_n == 0, "B_{n} must vanish, got {b_n}");
        }
        table.push(b_n);
    }
    table[k].clone()
}

/// B_k as an exact scalar.
pub fn bernoulli(k: usize) -> Scalar {
    Scalar::Exact(bernoulli_rational(k))
}

/// Signed Stirling number of the first kind: the coefficient of z^k in
/// (z-n+1)_n = z(z-1)⋯(z-n+1).
pub fn stirling_first(n: usize, k: usize) -> Result<Integer> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "Stirling number with k = {k} > n = {n}"
        )));
    }
    if let Some(row) = STIRLING.read().expect("stirling cache poisoned").get(n) {
        return Ok(row[k].clone());
    }
    let mut table = STIRLING.write().expect("stirling cache poisoned");
    while table.len() <= n {
        // S(m+1, j) = S(m, j-1) - m·S(m, j)
        let m = table.len() - 1;
        let prev = &table[m];
        let row: Vec<Integer> = (0..=m + 1)
            .map(|j| {
                let left = if j > 0 {
                    prev[j - 1].clone()
                } else {
                    Integer::new()
                };
                let right = prev
                    .get(j)
                    .map(|s| Integer::from(s * m))
                    .unwrap_or_default();
                left - right
            })
            .collect();
        table.push(row);
    }
    Ok(table[n][k].clone())
}

/// Rising factorial x(x+1)⋯(x+m-1); 1 for m = 0.
pub fn pochhammer(x: &Scalar, m: usize) -> Scalar {
    let kind = x.kind();
    let mut acc = kind.one();
    for i in 0..m {
        acc = acc * (x + &kind.int(i as i64));
    }
    acc
}

pub fn factorial(k: usize) -> Integer {
    Integer::from(Integer::factorial(k as u32))
}

/// Generalized binomial coefficient (n-k+1)_k / k!.
pub fn binomial_coefficient(n: &Scalar, k: usize) -> Scalar {
    let kind = n.kind();
    let start = &(n - &kind.int(k as i64)) + &kind.one();
    pochhammer(&start, k) / kind.integer(&factorial(k))
}

/// Coefficients of Π_{i<n} (z + x_i) as a polynomial in z, lowest first.
#[cfg(test)]
fn expand_linear_product(shifts: &[i64]) -> Vec<Integer> {
    let mut poly = vec![Integer::from(1)];
    for &s in shifts {
        let mut next = vec![Integer::new(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] += Integer::from(c * s);
        }
        poly = next;
    }
    poly
}

/// Σ_{κ=0}^{terms-1} (-1)^κ S(k+κ, k) / (ζ)_{k+κ+1}: the factorial-series
/// reconstruction of 1/ζ^{k+1}, exact for rational ζ.
pub fn inverse_power_factorial_series(k: usize, zeta: &Scalar, terms: usize) -> Scalar {
    let kind = zeta.kind();
    let mut acc = kind.zero();
    let mut poch = pochhammer(zeta, k + 1);
    for kappa in 0..terms {
        let s = stirling_first(k + kappa, k).expect("k <= k + kappa");
        let signed = if kappa % 2 == 0 { s } else { -s };
        acc = acc + kind.integer(&signed) / &poch;
        poch = poch * (zeta + &kind.int((k + kappa + 1) as i64));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Kind;

    fn q(n: i64, d: i64) -> Scalar {
        Kind::Exact.ratio(n, d)
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(3), q(0, 1));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(12), q(-691, 2730));
    }

    #[test]
    fn bernoulli_odd_vanish_and_recurrence_holds() {
        for n in 1..=15 {
            assert!(bernoulli_rational(2 * n + 1) == 0);
        }
        for n in 1..=30usize {
            let mut acc = Rational::new();
            for nu in 0..=n {
                let c = binomial_coefficient(&q(n as i64 + 1, 1), nu);
                acc += c.as_rational().unwrap() * bernoulli_rational(nu);
            }
            assert!(acc == 0, "recurrence fails at n = {n}");
        }
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling_first(0, 0).unwrap(), 1);
        assert_eq!(stirling_first(2, 1).unwrap(), -1);
        assert_eq!(stirling_first(3, 1).unwrap(), 2);
        assert_eq!(stirling_first(3, 2).unwrap(), -3);
        assert!(stirling_first(2, 3).is_err());
        for n in 1..20 {
            assert_eq!(stirling_first(n, n).unwrap(), 1);
            assert_eq!(stirling_first(n, 0).unwrap(), 0);
        }
    }

    #[test]
    fn stirling_rows_expand_falling_factorial() {
        // (z-n+1)_n = z(z-1)⋯(z-n+1)
        for n in 0..=12usize {
            let shifts: Vec<i64> = (0..n as i64).map(|i| -i).collect();
            let poly = expand_linear_product(&shifts);
            for (k, c) in poly.iter().enumerate() {
                assert_eq!(&stirling_first(n, k).unwrap(), c, "S({n},{k})");
            }
        }
    }

    #[test]
    fn stirling_recurrence() {
        for n in 0..12usize {
            for k in 1..=n + 1 {
                let lhs = stirling_first(n + 1, k).unwrap();
                let left = stirling_first(n, k - 1).unwrap();
                let right = if k <= n {
                    stirling_first(n, k).unwrap()
                } else {
                    Integer::new()
                };
                assert_eq!(lhs, left - right * n);
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&q(7, 3), 0), q(1, 1));
        assert_eq!(pochhammer(&q(1, 1), 6), q(720, 1));
        assert_eq!(pochhammer(&q(1, 3), 2), q(4, 9));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_coefficient(&q(5, 1), 2), q(10, 1));
        assert_eq!(binomial_coefficient(&q(-7, 4), 0), q(1, 1));
        assert_eq!(binomial_coefficient(&q(1, 2), 2), q(-1, 8));
        assert_eq!(binomial_coefficient(&q(3, 1), 5), q(0, 1));
    }

    #[test]
    fn factorial_series_of_inverse_power_converges() {
        let zeta = q(10, 1);
        // k = 0 is exact after one term
        assert_eq!(inverse_power_factorial_series(0, &zeta, 30), q(1, 10));
        for k in 1..=5usize {
            let target = q(1, 10).powi(k as i64 + 1).unwrap();
            let short = inverse_power_factorial_series(k, &zeta, 31);
            let long = inverse_power_factorial_series(k, &zeta, 62);
            let e_short = ((&short - &target) / &target).abs();
            let e_long = ((&long - &target) / &target).abs();
            assert!(e_long < e_short);
            // partial sums approach from below
            assert!(short < target && long < target);
        }
    }
}
