//! Truncated Laurent series in ε = 1/(n+α).
//!
//! A series stores the coefficients of ε^base ..= ε^M, with base ∈ {-1, 0}.
//! The truncation order M is part of the value: every operation computes the
//! order through which its result is actually known and never reports
//! coefficients beyond it.

use crate::error::{Error, Result};
use crate::scalar::{Kind, Scalar};

/// Lowest base order any operation accepts.
pub const MIN_BASE_ORDER: i32 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedLaurentSeries {
    base: i32,
    coeffs: Vec<Scalar>,
}

impl TruncatedLaurentSeries {
    /// Series with coefficients of ε^base, ε^(base+1), ... in order.
    pub fn new(base: i32, coeffs: Vec<Scalar>) -> Result<Self> {
        if base < MIN_BASE_ORDER {
            return Err(Error::BaseOrderTooLow(base));
        }
        if base > 0 {
            return Err(Error::InvalidArgument(format!("base order {base} above 0")));
        }
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidArgument("series without coefficients".into()));
        };
        if base + coeffs.len() as i32 - 1 < 0 {
            return Err(Error::InvalidArgument("truncation order below 0".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.same_kind(first)) {
            return Err(Error::MixedKinds(
                first.kind().to_string(),
                bad.kind().to_string(),
            ));
        }
        Ok(Self { base, coeffs })
    }

    /// Power series (base order 0).
    pub fn power(coeffs: Vec<Scalar>) -> Result<Self> {
        Self::new(0, coeffs)
    }

    pub fn zero(kind: Kind, order: usize) -> Self {
        Self {
            base: 0,
            coeffs: vec![kind.zero(); order + 1],
        }
    }

    pub fn constant(c: Scalar, order: usize) -> Self {
        let mut coeffs = vec![c.kind().zero(); order + 1];
        coeffs[0] = c;
        Self { base: 0, coeffs }
    }

    /// `c·ε^power`, known through ε^order.
    pub fn monomial(c: Scalar, power: i32, order: usize) -> Result<Self> {
        if power < MIN_BASE_ORDER {
            return Err(Error::BaseOrderTooLow(power));
        }
        let base = power.min(0);
        let order = order as i32;
        if power > order {
            return Ok(Self::zero(c.kind(), order as usize));
        }
        let mut coeffs = vec![c.kind().zero(); (order - base + 1) as usize];
        coeffs[(power - base) as usize] = c;
        Ok(Self { base, coeffs })
    }

    pub fn base_order(&self) -> i32 {
        self.base
    }

    pub fn truncation_order(&self) -> i32 {
        self.base + self.coeffs.len() as i32 - 1
    }

    pub fn kind(&self) -> Kind {
        self.coeffs[0].kind()
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs[0].is_exact()
    }

    /// Stored coefficients, lowest power first.
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coefficient_at(&self, k: i32) -> Result<&Scalar> {
        let max = self.truncation_order();
        if k < self.base || k > max {
            return Err(Error::OrderOutOfRange {
                index: k,
                base: self.base,
                max,
            });
        }
        Ok(&self.coeffs[(k - self.base) as usize])
    }

    /// Coefficient of ε^k, treating positions below the base as zero.
    /// Panics above the truncation order.
    fn coeff(&self, k: i32) -> Scalar {
        assert!(
            k <= self.truncation_order(),
            "coefficient beyond truncation order"
        );
        if k < self.base {
            self.kind().zero()
        } else {
            self.coeffs[(k - self.base) as usize].clone()
        }
    }

    fn check_kinds(&self, other: &Self) -> Result<()> {
        if self.coeffs[0].same_kind(&other.coeffs[0]) {
            Ok(())
        } else {
            Err(Error::MixedKinds(
                self.kind().to_string(),
                other.kind().to_string(),
            ))
        }
    }

    /// Copy known only through ε^order. Fails when asked for more than is known.
    pub fn truncate(&self, order: i32) -> Result<Self> {
        if order > self.truncation_order() {
            return Err(Error::InvalidArgument(format!(
                "cannot extend truncation order {} to {order}",
                self.truncation_order()
            )));
        }
        Self::new(
            self.base,
            self.coeffs[..(order - self.base + 1) as usize].to_vec(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_kinds(other)?;
        let base = self.base.min(other.base);
        let top = self.truncation_order().min(other.truncation_order());
        let coeffs = (base..=top)
            .map(|k| &self.coeff(k) + &other.coeff(k))
            .collect();
        Self::new(base, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|x| x.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.base, coeffs)
    }

    /// Cauchy product.
    ///
    /// If x is known through ε^Mx and y through ε^My, the product is known
    /// through ε^min(Mx + base_y, My + base_x); for power series this is the
    /// common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_kinds(other)?;
        let base = self.base + other.base;
        if base < MIN_BASE_ORDER {
            return Err(Error::BaseOrderTooLow(base));
        }
        let top = (self.truncation_order() + other.base).min(other.truncation_order() + self.base);
        if top < 0 {
            return Err(Error::InvalidArgument(
                "product known below order 0 only".into(),
            ));
        }
        let coeffs = (base..=top)
            .map(|k| {
                let mut acc = self.kind().zero();
                for i in self.base..=(k - other.base) {
                    let j = k - i;
                    if j > other.truncation_order() || i > self.truncation_order() {
                        continue;
                    }
                    acc = acc + &(&self.coeff(i) * &other.coeff(j));
                }
                acc
            })
            .collect();
        Self::new(base, coeffs)
    }

    /// Reciprocal of a power series with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.base != 0 {
            return Err(Error::NotPowerSeries(self.base));
        }
        let d0 = &self.coeffs[0];
        if d0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let mut q: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        q.push(d0.recip()?);
        for k in 1..self.coeffs.len() {
            let mut acc = self.kind().zero();
            for i in 1..=k {
                acc = acc + &(&self.coeffs[i] * &q[k - i]);
            }
            q.push(-(acc / d0));
        }
        Self::new(0, q)
    }

    /// `self / den`; `den` must be a power series with nonzero constant term.
    pub fn div(&self, den: &Self) -> Result<Self> {
        self.check_kinds(den)?;
        if den.base != 0 {
            return Err(Error::NotPowerSeries(den.base));
        }
        self.mul(&den.inverse()?)
    }

    /// S(ε/(1+ε)) through ε^min(M_S, order): re-expands a function of
    /// 1/(n+α+1) in powers of 1/(n+α).
    pub fn shift_substitute(&self, order: usize) -> Result<Self> {
        self.substitute_mobius(order, 1)
    }

    /// S(ε/(1-ε)), the inverse of [`Self::shift_substitute`].
    pub fn unshift_substitute(&self, order: usize) -> Result<Self> {
        self.substitute_mobius(order, -1)
    }

    // S(ε/(1 + sign·ε)) by Horner's scheme in the substituted variable.
    fn substitute_mobius(&self, order: usize, sign: i64) -> Result<Self> {
        if self.base != 0 {
            return Err(Error::NotPowerSeries(self.base));
        }
        let top = (self.truncation_order() as usize).min(order);
        let kind = self.kind();
        let mut acc = vec![kind.zero(); top + 1];
        for k in (0..=top).rev() {
            // acc <- acc·ε/(1 + sign·ε) + s_k
            let mut next = vec![kind.zero(); top + 1];
            for j in 1..=top {
                let shifted = acc[j - 1].clone();
                let prev = &next[j - 1];
                next[j] = if sign > 0 {
                    shifted - prev
                } else {
                    shifted + prev
                };
            }
            next[0] = &next[0] + &self.coeffs[k];
            acc = next;
        }
        Self::new(0, acc)
    }

    /// Horner evaluation at ε = eps0, in the kind of `eps0`.
    ///
    /// Exact coefficients are promoted when `eps0` is real; real coefficients
    /// with an exact `eps0` are rejected.
    pub fn evaluate(&self, eps0: &Scalar) -> Result<Scalar> {
        let kind = eps0.kind();
        if !self.is_exact() && eps0.is_exact() {
            return Err(Error::MixedKinds(self.kind().to_string(), kind.to_string()));
        }
        if self.base < 0 && eps0.is_zero() {
            return Err(Error::LaurentAtZero);
        }
        let mut acc = kind.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * eps0) + &c.to_kind(kind)?;
        }
        if self.base < 0 {
            acc = acc.try_div(eps0)?;
        }
        Ok(acc)
    }

    /// True when every stored coefficient below ε^0 is zero.
    pub fn laurent_part_vanishes(&self) -> bool {
        (self.base..0).all(|k| self.coeff(k).is_zero())
    }

    /// Drops the (vanishing) negative-power part.
    pub fn into_power_series(self) -> Result<Self> {
        if !self.laurent_part_vanishes() {
            return Err(Error::Internal("nonvanishing Laurent part".into()));
        }
        let skip = (-self.base) as usize;
        Self::new(0, self.coeffs[skip..].to_vec())
    }
}

/// Coefficients of (1+ε)^a through ε^order: binomial(a, k).
pub fn binomial_series(exponent: &Scalar, order: usize) -> TruncatedLaurentSeries {
    let kind = exponent.kind();
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = kind.one();
    coeffs.push(c.clone());
    for k in 1..=order as i64 {
        c = c * (exponent - &kind.int(k - 1)) / kind.int(k);
        coeffs.push(c.clone());
    }
    TruncatedLaurentSeries { base: 0, coeffs }
}
