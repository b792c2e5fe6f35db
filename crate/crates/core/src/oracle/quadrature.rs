//! Adaptive Gauss–Legendre quadrature at arbitrary precision.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
pub(crate) struct GaussLegendre {
    bits: u32,
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: &Float, bits: u32) -> (Float, Float) {
    let mut prev = Float::with_val(bits, 1);
    let mut cur = x.clone();
    for k in 1..n {
        let k = k as u32;
        let next = (Float::with_val(bits, x * &cur) * (2 * k + 1)
            - Float::with_val(bits, &prev * k))
            / (k + 1);
        prev = cur;
        cur = next;
    }
    let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
    let deriv = Float::with_val(bits, x * &cur) - &prev;
    let deriv = deriv * n as u32 / x2m1;
    (cur, deriv)
}

impl GaussLegendre {
    pub(crate) fn new(points: usize, bits: u32) -> Self {
        assert!(points >= 2);
        let mut nodes = Vec::with_capacity(points);
        let mut weights = Vec::with_capacity(points);
        let pi = Float::with_val(bits, Constant::Pi);
        let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 8));
        for i in 1..=points / 2 {
            let angle = Float::with_val(bits, &pi * (4 * i as u32 - 1)) / (4 * points as u32 + 2);
            let mut x = angle.cos();
            for _ in 0..200 {
                let (p, dp) = legendre(points, &x, bits);
                let dx = p / &dp;
                x -= &dx;
                if dx.abs() < tol {
                    break;
                }
            }
            let (_, dp) = legendre(points, &x, bits);
            let one_minus_x2 = Float::with_val(bits, 1) - Float::with_val(bits, x.square_ref());
            let w = Float::with_val(bits, 2) / (one_minus_x2 * dp.square());
            nodes.push(x);
            weights.push(w);
        }
        if points % 2 == 1 {
            let zero = Float::new(bits);
            let (_, dp) = legendre(points, &zero, bits);
            weights.push(Float::with_val(bits, 2) / dp.square());
            nodes.push(zero);
        }
        GaussLegendre {
            bits,
            nodes,
            weights,
        }
    }

    /// ∫_a^b f by the rule mapped onto [a, b].
    pub(crate) fn panel<F: Fn(&Float) -> Float>(&self, f: &F, a: &Float, b: &Float) -> Float {
        let bits = self.bits;
        let mid = Float::with_val(bits, a + b) / 2u32;
        let half = Float::with_val(bits, b - a) / 2u32;
        let mut acc = Float::new(bits);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let offset = Float::with_val(bits, &half * x);
            if x.is_zero() {
                acc += f(&mid) * w;
            } else {
                let left = Float::with_val(bits, &mid - &offset);
                let right = Float::with_val(bits, &mid + &offset);
                acc += (f(&left) + f(&right)) * w;
            }
        }
        acc * half
    }
}

pub(crate) struct Estimate {
    pub value: Float,
    pub error: Float,
}

/// Bisects [a, b] until each panel agrees with the sum of its halves to
/// within its share of `abs_tol`.
pub(crate) fn integrate<F: Fn(&Float) -> Float>(
    f: &F,
    a: &Float,
    b: &Float,
    abs_tol: &Float,
    rule: &GaussLegendre,
    initial_panels: usize,
    max_panels: usize,
) -> Result<Estimate> {
    let bits = rule.bits;
    let length = Float::with_val(bits, b - a);
    let mut stack = Vec::new();
    for i in (0..initial_panels).rev() {
        let lo = Float::with_val(bits, &length * i as u32) / initial_panels as u32 + a;
        let hi = Float::with_val(bits, &length * (i + 1) as u32) / initial_panels as u32 + a;
        let q = rule.panel(f, &lo, &hi);
        stack.push((lo, hi, q));
    }
    let mut panels = initial_panels;
    let mut value = Float::new(bits);
    let mut error = Float::new(bits);
    while let Some((lo, hi, coarse)) = stack.pop() {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let left = rule.panel(f, &lo, &mid);
        let right = rule.panel(f, &mid, &hi);
        let fine = Float::with_val(bits, &left + &right);
        let diff = Float::with_val(bits, &fine - &coarse).abs();
        let share = Float::with_val(bits, abs_tol * Float::with_val(bits, &hi - &lo)) / &length;
        if diff <= share {
            value += fine;
            error += diff;
            continue;
        }
        panels += 1;
        if panels > max_panels {
            return Err(Error::Oracle(format!(
                "quadrature did not converge within {max_panels} panels"
            )));
        }
        stack.push((mid.clone(), hi, right));
        stack.push((lo, mid, left));
    }
    Ok(Estimate { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let bits = 200;
        let rule = GaussLegendre::new(7, bits);
        let zero = Float::new(bits);
        let one = Float::with_val(bits, 1);
        for k in 0..14u32 {
            let q = rule.panel(&|t: &Float| Float::with_val(bits, (t).pow(k)), &zero, &one);
            let err = (q - Float::with_val(bits, 1) / (k + 1)).abs();
            assert!(err < 1e-55, "t^{k}: {err}");
        }
    }

    #[test]
    fn adaptive_exponential() {
        let bits = 350;
        let rule = GaussLegendre::new(40, bits);
        let a = Float::new(bits);
        let b = Float::with_val(bits, 30);
        let tol = Float::with_val(bits, Float::i_exp(1, -300));
        let est = integrate(
            &|t: &Float| Float::with_val(bits, -t).exp(),
            &a,
            &b,
            &tol,
            &rule,
            4,
            1000,
        )
        .unwrap();
        let exact = Float::with_val(bits, 1) - Float::with_val(bits, -&b).exp();
        assert!(
            Float::with_val(bits, &est.value - &exact).abs()
                < Float::with_val(bits, Float::i_exp(1, -290))
        );
        assert!(est.error <= tol);
    }

    #[test]
    fn panel_limit_is_reported() {
        let bits = 200;
        let rule = GaussLegendre::new(4, bits);
        let a = Float::with_val(bits, 1e-30);
        let b = Float::with_val(bits, 1);
        let tol = Float::with_val(bits, Float::i_exp(1, -150));
        let res = integrate(
            &|t: &Float| Float::with_val(bits, t.recip_ref()),
            &a,
            &b,
            &tol,
            &rule,
            1,
            16,
        );
        assert!(matches!(res, Err(Error::Oracle(_))));
    }
}
