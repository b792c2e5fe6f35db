//! Series families and their residual operators.
//!
//! Each family fixes a scale ρₙ and an offset α so that the remainder
//! approximant is r̂ₙ = ρₙ·S(ε) with ε = 1/(n+α). Dividing the difference
//! equation r̂ₙ₊₁ - r̂ₙ = aₙ₊₁ by aₙ₊₁ turns it into
//!
//! ```text
//! U(ε)·S(ε) + V(ε)·S(ε/(1+ε)) = 1 + O(ε^{m+1})
//! ```
//!
//! with U = -ρₙ/aₙ₊₁ and V = ρₙ₊₁/aₙ₊₁ expanded in ε.
//!
//! | family | α | ρₙ          | U      | V                                   |
//! |--------|---|-------------|--------|-------------------------------------|
//! | zeta   | 2 | (n+2)^(1-s) | -ε⁻¹   | ε⁻¹(1+ε)^(1-s)                      |
//! | 2f1    | 1 | aₙ₊₁        | -1     | z(1+aε)(1+bε)/((1+cε)(1+ε))         |
//! | pfq    | 1 | aₙ₊₁        | -1     | z·Π(1+αᵢε)/(Π(1+βⱼε)·(1+ε))         |
//! | e1     | 1 | (-1/z)ⁿ n!  | zε     | 1                                   |

use std::fmt;
use std::str::FromStr;

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::scalar::{Kind, Scalar};
use crate::series::{binomial_series, TruncatedLaurentSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyName {
    Zeta,
    Gauss2F1,
    Pfq,
    E1,
}

impl FamilyName {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::Zeta => "zeta",
            FamilyName::Gauss2F1 => "2f1",
            FamilyName::Pfq => "pfq",
            FamilyName::E1 => "e1",
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zeta" => Ok(FamilyName::Zeta),
            "2f1" => Ok(FamilyName::Gauss2F1),
            "pfq" => Ok(FamilyName::Pfq),
            "e1" => Ok(FamilyName::E1),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    Zeta {
        s: Scalar,
    },
    Hypergeometric {
        alphas: Vec<Scalar>,
        betas: Vec<Scalar>,
        z: Scalar,
    },
    E1 {
        z: Scalar,
    },
}

/// One concrete series with its ansatz data. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    name: FamilyName,
    params: Params,
}

fn ensure_one_kind(values: &[&Scalar]) -> Result<Kind> {
    let first = values[0];
    for v in &values[1..] {
        if !v.same_kind(first) {
            return Err(Error::MixedKinds(
                first.kind().to_string(),
                v.kind().to_string(),
            ));
        }
    }
    Ok(first.kind())
}

fn is_one(x: &Scalar) -> bool {
    (x - &x.kind().one()).is_zero()
}

/// Dirichlet series Σ (ν+1)^(-s).
pub fn make_zeta(s: Scalar) -> Result<FamilySpec> {
    if is_one(&s) {
        return Err(Error::Degenerate {
            family: "zeta".into(),
            parameter: "s=1".into(),
        });
    }
    Ok(FamilySpec {
        name: FamilyName::Zeta,
        params: Params::Zeta { s },
    })
}

/// Gauss series ₂F₁(a, b; c; z).
pub fn make_2f1(a: Scalar, b: Scalar, c: Scalar, z: Scalar) -> Result<FamilySpec> {
    make_hypergeometric(vec![a, b], vec![c], z, FamilyName::Gauss2F1)
}

/// Generalized series ₚ₊₁Fₚ(α₁..αₚ₊₁; β₁..βₚ; z).
pub fn make_pfq(alphas: Vec<Scalar>, betas: Vec<Scalar>, z: Scalar) -> Result<FamilySpec> {
    make_hypergeometric(alphas, betas, z, FamilyName::Pfq)
}

fn make_hypergeometric(
    alphas: Vec<Scalar>,
    betas: Vec<Scalar>,
    z: Scalar,
    name: FamilyName,
) -> Result<FamilySpec> {
    if alphas.len() != betas.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "{name}: need p+1 numerator and p denominator parameters, got {} and {}",
            alphas.len(),
            betas.len()
        )));
    }
    let all: Vec<&Scalar> = alphas
        .iter()
        .chain(&betas)
        .chain(std::iter::once(&z))
        .collect();
    ensure_one_kind(&all)?;
    if is_one(&z) {
        return Err(Error::Degenerate {
            family: name.to_string(),
            parameter: "z=1".into(),
        });
    }
    if z.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "{name}: z=0 gives a terminating series"
        )));
    }
    if let Some(b) = betas.iter().find(|b| b.is_nonpositive_integer()) {
        return Err(Error::InvalidArgument(format!(
            "{name}: denominator parameter {b} is a nonpositive integer"
        )));
    }
    if let Some(a) = alphas.iter().find(|a| a.is_nonpositive_integer()) {
        return Err(Error::InvalidArgument(format!(
            "{name}: numerator parameter {a} makes the series terminate"
        )));
    }
    Ok(FamilySpec {
        name,
        params: Params::Hypergeometric { alphas, betas, z },
    })
}

/// Asymptotic series Σ (-1/z)^ν ν! of z·e^z·E₁(z).
pub fn make_e1(z: Scalar) -> Result<FamilySpec> {
    if z.is_zero() {
        return Err(Error::InvalidArgument("e1: z must be nonzero".into()));
    }
    Ok(FamilySpec {
        name: FamilyName::E1,
        params: Params::E1 { z },
    })
}

impl FamilySpec {
    pub fn name(&self) -> FamilyName {
        self.name
    }

    pub fn kind(&self) -> Kind {
        match &self.params {
            Params::Zeta { s } => s.kind(),
            Params::Hypergeometric { z, .. } | Params::E1 { z } => z.kind(),
        }
    }

    /// Shift offset α in ε = 1/(n+α).
    pub fn alpha(&self) -> u32 {
        match self.name {
            FamilyName::Zeta => 2,
            _ => 1,
        }
    }

    /// Named parameters in a fixed order.
    pub fn params(&self) -> Vec<(String, Scalar)> {
        match &self.params {
            Params::Zeta { s } => vec![("s".into(), s.clone())],
            Params::E1 { z } => vec![("z".into(), z.clone())],
            Params::Hypergeometric { alphas, betas, z } => {
                if self.name == FamilyName::Gauss2F1 {
                    vec![
                        ("a".into(), alphas[0].clone()),
                        ("b".into(), alphas[1].clone()),
                        ("c".into(), betas[0].clone()),
                        ("z".into(), z.clone()),
                    ]
                } else {
                    let mut out: Vec<(String, Scalar)> = alphas
                        .iter()
                        .enumerate()
                        .map(|(i, a)| (format!("alpha{}", i + 1), a.clone()))
                        .collect();
                    out.extend(
                        betas
                            .iter()
                            .enumerate()
                            .map(|(i, b)| (format!("beta{}", i + 1), b.clone())),
                    );
                    out.push(("z".into(), z.clone()));
                    out
                }
            }
        }
    }

    /// The same family with parameters converted to `kind`.
    pub fn with_kind(&self, kind: Kind) -> Result<FamilySpec> {
        let conv = |x: &Scalar| x.to_kind(kind);
        let params = match &self.params {
            Params::Zeta { s } => Params::Zeta { s: conv(s)? },
            Params::E1 { z } => Params::E1 { z: conv(z)? },
            Params::Hypergeometric { alphas, betas, z } => Params::Hypergeometric {
                alphas: alphas.iter().map(conv).collect::<Result<_>>()?,
                betas: betas.iter().map(conv).collect::<Result<_>>()?,
                z: conv(z)?,
            },
        };
        Ok(FamilySpec {
            name: self.name,
            params,
        })
    }

    /// Text naming the parameter responsible for a vanishing pivot.
    pub fn degenerate_parameter(&self) -> String {
        match &self.params {
            Params::Zeta { s } => format!("s={s}"),
            Params::Hypergeometric { z, .. } | Params::E1 { z } => format!("z={z}"),
        }
    }

    /// Argument z of the hypergeometric and E₁ families.
    pub fn z(&self) -> Option<&Scalar> {
        match &self.params {
            Params::Hypergeometric { z, .. } | Params::E1 { z } => Some(z),
            Params::Zeta { .. } => None,
        }
    }

    /// Exponent s of the zeta family.
    pub fn s(&self) -> Option<&Scalar> {
        match &self.params {
            Params::Zeta { s } => Some(s),
            _ => None,
        }
    }

    fn int(&self, v: u64) -> Scalar {
        self.kind().int(v as i64)
    }

    /// aₙ₊₁/aₙ for the hypergeometric families.
    fn hyper_ratio(alphas: &[Scalar], betas: &[Scalar], z: &Scalar, n: u64) -> Scalar {
        let kind = z.kind();
        let nk = kind.int(n as i64);
        let mut num = z.clone();
        for a in alphas {
            num = num * (a + &nk);
        }
        let mut den = kind.int(n as i64 + 1);
        for b in betas {
            den = den * (b + &nk);
        }
        num / den
    }

    /// aₙ₊₁/aₙ.
    pub fn term_ratio(&self, n: u64) -> Result<Scalar> {
        match &self.params {
            Params::Hypergeometric { alphas, betas, z } => {
                Ok(Self::hyper_ratio(alphas, betas, z, n))
            }
            _ => self.term(n + 1)?.try_div(&self.term(n)?),
        }
    }

    /// Term aₙ.
    pub fn term(&self, n: u64) -> Result<Scalar> {
        match &self.params {
            Params::Zeta { s } => self.int(n + 1).pow(&-s),
            Params::Hypergeometric { alphas, betas, z } => {
                let mut t = self.kind().one();
                for k in 0..n {
                    t = t * Self::hyper_ratio(alphas, betas, z, k);
                }
                Ok(t)
            }
            Params::E1 { z } => {
                let base = (-&self.kind().one()).try_div(z)?;
                Ok(base.powi(n as i64)? * self.kind().integer(&factorial(n as usize)))
            }
        }
    }

    /// Partial sum Σ_{ν=0}^{n} a_ν.
    pub fn partial_sum(&self, n: u64) -> Result<Scalar> {
        let kind = self.kind();
        match &self.params {
            Params::Zeta { .. } => {
                let mut acc = kind.zero();
                for nu in 0..=n {
                    acc = acc + self.term(nu)?;
                }
                Ok(acc)
            }
            Params::Hypergeometric { alphas, betas, z } => {
                let mut t = kind.one();
                let mut acc = kind.one();
                for k in 0..n {
                    t = t * Self::hyper_ratio(alphas, betas, z, k);
                    acc = acc + &t;
                }
                Ok(acc)
            }
            Params::E1 { z } => {
                let step = (-&kind.one()).try_div(z)?;
                let mut t = kind.one();
                let mut acc = kind.one();
                for k in 1..=n {
                    t = t * &step * self.int(k);
                    acc = acc + &t;
                }
                Ok(acc)
            }
        }
    }

    /// Ansatz prefactor ρₙ.
    pub fn scale_at(&self, n: u64) -> Result<Scalar> {
        match &self.params {
            Params::Zeta { s } => self.int(n + 2).pow(&(&self.kind().one() - s)),
            Params::Hypergeometric { .. } => self.term(n + 1),
            Params::E1 { .. } => self.term(n),
        }
    }

    /// U and V truncated at ε^order, with the ε⁻¹ part of U + V checked to vanish.
    pub fn residual_operators(
        &self,
        order: usize,
    ) -> Result<(TruncatedLaurentSeries, TruncatedLaurentSeries)> {
        let kind = self.kind();
        let (u, v) = match &self.params {
            Params::Zeta { s } => {
                let u = TruncatedLaurentSeries::monomial(-kind.one(), -1, order)?;
                let inner = binomial_series(&(&kind.one() - s), order + 1);
                let v = TruncatedLaurentSeries::new(-1, inner.coeffs().to_vec())?;
                (u, v)
            }
            Params::Hypergeometric { alphas, betas, z } => {
                let linear = |c: &Scalar| -> Result<TruncatedLaurentSeries> {
                    let mut coeffs = vec![kind.zero(); order + 1];
                    coeffs[0] = kind.one();
                    if order >= 1 {
                        coeffs[1] = c.clone();
                    }
                    TruncatedLaurentSeries::power(coeffs)
                };
                let mut num = TruncatedLaurentSeries::constant(z.clone(), order);
                for a in alphas {
                    num = num.mul(&linear(a)?)?;
                }
                let mut den = linear(&kind.one())?;
                for b in betas {
                    den = den.mul(&linear(b)?)?;
                }
                let u = TruncatedLaurentSeries::constant(-kind.one(), order);
                (u, num.div(&den)?)
            }
            Params::E1 { z } => {
                let u = TruncatedLaurentSeries::monomial(z.clone(), 1, order)?;
                let v = TruncatedLaurentSeries::constant(kind.one(), order);
                (u, v)
            }
        };
        if !u.add(&v)?.laurent_part_vanishes() {
            return Err(Error::Internal(format!(
                "{}: ε⁻¹ parts of U and V do not cancel",
                self.name
            )));
        }
        Ok((u, v))
    }

    /// Parameter listing such as `a=1/3;b=7/5;c=9/2;z=-17/20`.
    pub fn params_label(&self) -> String {
        self.params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::pochhammer;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Kind::Exact.ratio(n, d)
    }

    fn paper_2f1() -> FamilySpec {
        make_2f1(q(1, 3), q(7, 5), q(9, 2), q(-17, 20)).unwrap()
    }

    #[test]
    fn zeta_basics() {
        let f = make_zeta(q(2, 1)).unwrap();
        assert_eq!(f.alpha(), 2);
        assert_eq!(f.term(3).unwrap(), q(1, 16));
        assert_eq!(f.partial_sum(1).unwrap(), q(5, 4));
        assert_eq!(f.scale_at(3).unwrap(), q(1, 5));
        let (u, v) = f.residual_operators(3).unwrap();
        assert_eq!(u.base_order(), -1);
        assert!(u.add(&v).unwrap().laurent_part_vanishes());
        // non-integer s has no exact terms
        let g = make_zeta(q(3, 2)).unwrap();
        assert!(matches!(g.term(1), Err(Error::Inexact(_))));
        assert!(matches!(make_zeta(q(1, 1)), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn zeta_constant_residual_coefficient() {
        // With S = γ₀ the ε⁰ coefficient of U·S + V·S(φ) is (1-s)γ₀.
        let s = q(7, 3);
        let (u, v) = make_zeta(s.clone()).unwrap().residual_operators(2).unwrap();
        let total = u.add(&v).unwrap();
        assert_eq!(total.coefficient_at(0).unwrap(), &(&q(1, 1) - &s));
    }

    #[test]
    fn gauss_basics() {
        let f = paper_2f1();
        assert_eq!(f.alpha(), 1);
        assert_eq!(f.term(0).unwrap(), q(1, 1));
        assert_eq!(f.partial_sum(0).unwrap(), q(1, 1));
        let (u, v) = f.residual_operators(3).unwrap();
        assert_eq!(u.coeffs()[0], q(-1, 1));
        let z = q(-17, 20);
        assert_eq!(v.coefficient_at(0).unwrap(), &z);
        let lin = &z * &(&(&q(1, 3) + &q(7, 5)) - &q(11, 2));
        assert_eq!(v.coefficient_at(1).unwrap(), &lin);
        let (u0, v0) = f.residual_operators(0).unwrap();
        assert_eq!(
            (u0.coeffs()[0].clone(), v0.coeffs()[0].clone()),
            (q(-1, 1), z)
        );
    }

    #[test]
    fn gauss_rejections() {
        let one = q(1, 1);
        assert!(matches!(
            make_2f1(one.clone(), one.clone(), one.clone(), one.clone()),
            Err(Error::Degenerate { parameter, .. }) if parameter == "z=1"
        ));
        assert!(make_2f1(q(1, 2), q(1, 3), q(-2, 1), q(1, 2)).is_err());
        assert!(make_2f1(q(-3, 1), q(1, 3), q(1, 2), q(1, 2)).is_err());
        assert!(make_2f1(q(1, 2), Kind::real(30).ratio(1, 3), q(1, 2), q(1, 2)).is_err());
        assert!(make_pfq(vec![q(1, 2)], vec![q(1, 2)], q(1, 2)).is_err());
    }

    #[test]
    fn pfq_with_p_one_matches_gauss() {
        let f = paper_2f1();
        let g = make_pfq(vec![q(1, 3), q(7, 5)], vec![q(9, 2)], q(-17, 20)).unwrap();
        assert_eq!(
            f.residual_operators(6).unwrap(),
            g.residual_operators(6).unwrap()
        );
        for n in 0..8 {
            assert_eq!(f.term(n).unwrap(), g.term(n).unwrap());
            assert_eq!(f.partial_sum(n).unwrap(), g.partial_sum(n).unwrap());
            assert_eq!(f.scale_at(n).unwrap(), g.scale_at(n).unwrap());
        }
    }

    #[test]
    fn pfq_linear_ratio_coefficient() {
        let alphas = vec![q(1, 2), q(2, 3), q(5, 4)];
        let betas = vec![q(3, 2), q(7, 3)];
        let z = q(2, 5);
        let f = make_pfq(alphas.clone(), betas.clone(), z.clone()).unwrap();
        let (_, v) = f.residual_operators(2).unwrap();
        assert_eq!(v.coefficient_at(0).unwrap(), &z);
        let sa = alphas.iter().fold(q(0, 1), |acc, a| acc + a);
        let sb = betas.iter().fold(q(0, 1), |acc, b| acc + b);
        assert_eq!(
            v.coefficient_at(1).unwrap(),
            &(&z * &(&(&sa - &sb) - &q(1, 1)))
        );
        // numeric cross-check of the ratio at n = 200
        let n = 200u64;
        let ratio = f.term(n + 2).unwrap() / f.term(n + 1).unwrap();
        let series = v.evaluate(&q(1, n as i64 + 1)).unwrap();
        assert!((ratio - series).abs().to_f64() < 1e-6);
    }

    #[test]
    fn e1_basics() {
        let f = make_e1(q(5, 1)).unwrap();
        assert_eq!(f.term(2).unwrap(), q(2, 25));
        assert_eq!(f.partial_sum(2).unwrap(), q(22, 25));
        assert_eq!(f.scale_at(10).unwrap(), q(3628800, 9765625));
        let (u, v) = f.residual_operators(3).unwrap();
        assert_eq!(
            u,
            TruncatedLaurentSeries::power(vec![q(0, 1), q(5, 1), q(0, 1), q(0, 1)]).unwrap()
        );
        assert_eq!(v, TruncatedLaurentSeries::constant(q(1, 1), 3));
        assert!(make_e1(q(0, 1)).is_err());
    }

    #[test]
    fn terms_match_closed_forms() {
        let f = paper_2f1();
        for n in 0..10usize {
            let (a, b, c, z) = (q(1, 3), q(7, 5), q(9, 2), q(-17, 20));
            let direct = pochhammer(&a, n) * pochhammer(&b, n) * z.powi(n as i64).unwrap()
                / (pochhammer(&c, n) * pochhammer(&q(1, 1), n));
            assert_eq!(f.term(n as u64).unwrap(), direct);
        }
    }

    #[test]
    fn ratio_series_converges_at_full_order() {
        // |V(1/(n+1)) - a_{n+2}/a_{n+1}| decays like (n+1)^{-M-1}
        let f = paper_2f1().with_kind(Kind::real(60)).unwrap();
        for order in [1usize, 3, 5] {
            let (_, v) = f.residual_operators(order).unwrap();
            let gap = |n: u64| {
                let ratio = f.term(n + 2).unwrap() / f.term(n + 1).unwrap();
                let eps = Kind::real(60).ratio(1, n as i64 + 1);
                (v.evaluate(&eps).unwrap() - ratio).abs().to_f64()
            };
            let xs: Vec<f64> = (20..=60).map(|n| (n as f64 + 1.0).ln()).collect();
            let ys: Vec<f64> = (20..=60).map(|n| gap(n).ln()).collect();
            let slope = crate::stats::least_squares_slope(&xs, &ys);
            let expected = -(order as f64 + 1.0);
            assert!(
                (slope - expected).abs() < 0.3,
                "order {order}: slope {slope}"
            );
        }
    }

    #[test]
    fn with_kind_converts_parameters() {
        let f = paper_2f1().with_kind(Kind::real(40)).unwrap();
        assert_eq!(f.kind(), Kind::real(40));
        assert!(f.with_kind(Kind::Exact).is_err());
        assert_eq!(paper_2f1().params_label(), "a=1/3;b=7/5;c=9/2;z=-17/20");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn partial_sums_satisfy_difference_equation(
            n in 0u64..30,
            zn in -9i64..=9,
            sn in 2i64..6,
        ) {
            prop_assume!(zn != 0 && zn != 10);
            let families = vec![
                make_zeta(q(sn, 1)).unwrap(),
                paper_2f1(),
                make_pfq(vec![q(1, 2), q(2, 3), q(5, 4)], vec![q(3, 2), q(7, 3)], q(zn, 10)).unwrap(),
                make_e1(q(zn, 1)).unwrap(),
            ];
            for f in families {
                let lhs = f.partial_sum(n + 1).unwrap() - f.partial_sum(n).unwrap();
                prop_assert_eq!(lhs, f.term(n + 1).unwrap());
            }
        }
    }
}
