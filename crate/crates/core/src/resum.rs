//! Three evaluations of the remainder approximant ρₙ·S(1/(n+α)): the
//! truncated inverse-power series, its factorial-series transform, and a
//! Padé approximant in ε.

use std::fmt;
use std::str::FromStr;

use crate::combinatorics::{pochhammer, stirling_first};
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::scalar::{Kind, Scalar};
use crate::series::TruncatedLaurentSeries;
use crate::solver::{solve_gamma, GammaVector};

/// Coefficients γ̃ of the factorial series Σ γ̃_μ/(n+α)_μ.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialGamma {
    coeffs: Vec<Scalar>,
    source: GammaVector,
}

impl FactorialGamma {
    /// The power-series coefficients this was transformed from.
    pub fn source(&self) -> &GammaVector {
        &self.source
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn m(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// γ̃₀ = γ₀, γ̃₁ = γ₁ and, for μ ≥ 2,
/// γ̃_μ = Σ_{ν=1}^{μ} (-1)^{μ+ν} S⁽¹⁾(μ-1, ν-1) γ_ν.
pub fn gamma_to_factorial(g: &GammaVector) -> FactorialGamma {
    let gamma = g.coefficients();
    let kind = g.kind();
    let coeffs = (0..gamma.len())
        .map(|mu| {
            if mu < 2 {
                return gamma[mu].clone();
            }
            (1..=mu).fold(kind.zero(), |acc, nu| {
                let s = stirling_first(mu - 1, nu - 1).expect("nu <= mu");
                let signed = if (mu + nu) % 2 == 0 { s } else { -s };
                acc + kind.integer(&signed) * &gamma[nu]
            })
        })
        .collect();
    FactorialGamma {
        coeffs,
        source: g.clone(),
    }
}

fn epsilon(family: &FamilySpec, n: u64) -> Scalar {
    family.kind().ratio(1, n as i64 + i64::from(family.alpha()))
}

/// ρₙ·Σ γ_μ/(n+α)^μ.
pub fn remainder_power(family: &FamilySpec, g: &GammaVector, n: u64) -> Result<Scalar> {
    Ok(family.scale_at(n)? * g.series().evaluate(&epsilon(family, n))?)
}

/// ρₙ·Σ γ̃_μ/(n+α)_μ.
pub fn remainder_factorial(family: &FamilySpec, fg: &FactorialGamma, n: u64) -> Result<Scalar> {
    let kind = family.kind();
    let x = kind.int(n as i64 + i64::from(family.alpha()));
    let sum = fg
        .coeffs
        .iter()
        .enumerate()
        .fold(kind.zero(), |acc, (mu, c)| acc + c / &pochhammer(&x, mu));
    Ok(family.scale_at(n)? * sum)
}

/// [L/M] Padé approximant p(ε)/q(ε) with q₀ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeApproximant {
    pub l: usize,
    pub m: usize,
    pub numerator: Vec<Scalar>,
    pub denominator: Vec<Scalar>,
}

impl PadeApproximant {
    pub fn evaluate(&self, eps: &Scalar) -> Result<Scalar> {
        let horner = |coeffs: &[Scalar]| -> Result<Scalar> {
            TruncatedLaurentSeries::power(coeffs.to_vec())?.evaluate(eps)
        };
        let den = horner(&self.denominator)?;
        if den.is_zero() {
            return Err(Error::PadePole);
        }
        Ok(horner(&self.numerator)? / den)
    }

    /// Maclaurin expansion of p/q through ε^(L+M).
    pub fn expansion(&self) -> Result<TruncatedLaurentSeries> {
        let order = self.l + self.m;
        let pad = |coeffs: &[Scalar]| -> Result<TruncatedLaurentSeries> {
            let mut v = coeffs.to_vec();
            v.resize(order + 1, coeffs[0].kind().zero());
            TruncatedLaurentSeries::power(v)
        };
        pad(&self.numerator)?.div(&pad(&self.denominator)?)
    }
}

/// Solves Σ_{i=1}^{M} c_{L+j-i} q_i = -c_{L+j} (j = 1..M) for the
/// denominator, then p_i = Σ_{k ≤ min(i, M)} c_{i-k} q_k.
pub fn pade_from_series(coeffs: &[Scalar], l: usize, m: usize) -> Result<PadeApproximant> {
    if coeffs.len() < l + m + 1 {
        return Err(Error::InvalidArgument(format!(
            "[{l}/{m}] needs {} coefficients, got {}",
            l + m + 1,
            coeffs.len()
        )));
    }
    let kind = coeffs[0].kind();
    if let Some(bad) = coeffs.iter().find(|c| !c.same_kind(&coeffs[0])) {
        return Err(Error::MixedKinds(kind.to_string(), bad.kind().to_string()));
    }
    let c = |i: i64| -> Scalar {
        if i < 0 {
            kind.zero()
        } else {
            coeffs[i as usize].clone()
        }
    };
    let mut a: Vec<Vec<Scalar>> = (1..=m)
        .map(|j| (1..=m).map(|i| c((l + j) as i64 - i as i64)).collect())
        .collect();
    let mut b: Vec<Scalar> = (1..=m).map(|j| -c((l + j) as i64)).collect();
    let tail = solve_dense(&mut a, &mut b, kind).ok_or(Error::DegeneratePade { l, m })?;
    let mut denominator = vec![kind.one()];
    denominator.extend(tail);
    let numerator: Vec<Scalar> = (0..=l)
        .map(|i| {
            (0..=i.min(m)).fold(kind.zero(), |acc, k| {
                acc + c((i - k) as i64) * &denominator[k]
            })
        })
        .collect();
    let pade = PadeApproximant {
        l,
        m,
        numerator,
        denominator,
    };
    verify_matching(&pade, &coeffs[..=l + m])?;
    Ok(pade)
}

fn verify_matching(pade: &PadeApproximant, target: &[Scalar]) -> Result<()> {
    let expansion = pade.expansion()?;
    for (k, (got, want)) in expansion.coeffs().iter().zip(target).enumerate() {
        let ok = match want.kind() {
            Kind::Exact => got == want,
            Kind::Real { digits } => {
                let mag = target.iter().map(|c| c.abs().to_f64()).fold(1.0, f64::max);
                (got - want).abs().to_f64() <= 10f64.powi(12 - digits as i32) * mag
            }
        };
        if !ok {
            return Err(Error::Internal(format!(
                "[{}/{}] fails to match ε^{k}",
                pade.l, pade.m
            )));
        }
    }
    Ok(())
}

/// Gaussian elimination; exact mode takes the first nonzero pivot, real mode
/// the largest. Returns `None` for a singular system.
fn solve_dense(a: &mut [Vec<Scalar>], b: &mut [Scalar], kind: Kind) -> Option<Vec<Scalar>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .map(|x| x.abs().to_f64())
        .fold(0.0, f64::max);
    for col in 0..n {
        let pivot_row = match kind {
            Kind::Exact => (col..n).find(|&r| !a[r][col].is_zero())?,
            Kind::Real { digits } => {
                let (row, mag) = (col..n)
                    .map(|r| (r, a[r][col].abs().to_f64()))
                    .max_by(|x, y| x.1.total_cmp(&y.1))?;
                if mag == 0.0 || mag <= scale * 10f64.powi(5 - digits as i32) {
                    return None;
                }
                row
            }
        };
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            let (upper, lower) = a.split_at_mut(r);
            for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x = &*x - &(&factor * p);
            }
            let delta = &factor * &b[col];
            b[r] = &b[r] - &delta;
        }
    }
    let mut x = vec![kind.zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - &(&a[row][k] * &x[k]);
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// ρₙ·[L/M](1/(n+α)) built from γ₀..γ_{L+M}.
pub fn remainder_pade(
    family: &FamilySpec,
    g: &GammaVector,
    n: u64,
    l: usize,
    m: usize,
) -> Result<Scalar> {
    if l + m > g.m() {
        return Err(Error::InvalidArgument(format!(
            "[{l}/{m}] needs L+M <= m = {}",
            g.m()
        )));
    }
    let pade = pade_from_series(g.coefficients(), l, m)?;
    Ok(family.scale_at(n)? * pade.evaluate(&epsilon(family, n))?)
}

/// How the remainder approximant is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Power,
    Factorial,
    Pade { l: usize, m: usize },
}

impl Method {
    /// Centered diagonal [⌊m/2⌋/⌊m/2⌋].
    pub fn default_pade(m: usize) -> Method {
        Method::Pade { l: m / 2, m: m / 2 }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Power => f.write_str("power"),
            Method::Factorial => f.write_str("factorial"),
            Method::Pade { l, m } => write!(f, "pade[{l}/{m}]"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts `power`, `factorial`, and `pade[L/M]`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Method::Power),
            "factorial" => Ok(Method::Factorial),
            _ => {
                let inner = s
                    .strip_prefix("pade[")
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))?;
                let (l, m) = inner
                    .split_once('/')
                    .ok_or_else(|| Error::Parse(format!("bad Pade degrees {inner:?}")))?;
                let parse = |t: &str| t.parse::<usize>().map_err(|e| Error::Parse(e.to_string()));
                Ok(Method::Pade {
                    l: parse(l)?,
                    m: parse(m)?,
                })
            }
        }
    }
}

/// The remainder approximant by `method`, from already solved γ.
pub fn remainder(family: &FamilySpec, g: &GammaVector, n: u64, method: Method) -> Result<Scalar> {
    match method {
        Method::Power => remainder_power(family, g, n),
        Method::Factorial => remainder_factorial(family, &gamma_to_factorial(g), n),
        Method::Pade { l, m } => remainder_pade(family, g, n, l, m),
    }
}

/// sₙ - r̂ₙ: the partial sum corrected by the remainder approximant.
pub fn corrected_sum(family: &FamilySpec, n: u64, m: usize, method: Method) -> Result<Scalar> {
    let g = solve_gamma(family, m)?;
    Ok(family.partial_sum(n)? - remainder(family, &g, n, method)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_2f1, make_e1};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Kind::Exact.ratio(n, d)
    }

    #[test]
    fn factorial_transform_small_orders() {
        let f = make_e1(q(7, 2)).unwrap();
        let g = solve_gamma(&f, 1).unwrap();
        assert_eq!(gamma_to_factorial(&g).coefficients(), g.coefficients());
        let g = solve_gamma(&f, 3).unwrap();
        let t = gamma_to_factorial(&g);
        let gm = g.coefficients();
        assert_eq!(t.coefficients()[2], gm[2]);
        assert_eq!(t.coefficients()[3], &gm[2] + &gm[3]);
    }

    #[test]
    fn factorial_transform_is_integer_combination() {
        // γ̃_4 = γ_2·(-S(3,1)) + ... spelled out: S(3,·) = (0, 2, -3, 1)
        let f = make_e1(q(5, 1)).unwrap();
        let g = solve_gamma(&f, 4).unwrap();
        let gm = g.coefficients();
        let expected = q(2, 1) * &gm[2] + q(3, 1) * &gm[3] + gm[4].clone();
        assert_eq!(gamma_to_factorial(&g).coefficients()[4], expected);
    }

    #[test]
    fn pade_of_geometric_series() {
        let c: Vec<Scalar> = (0..4).map(|_| q(1, 1)).collect();
        let p = pade_from_series(&c, 0, 1).unwrap();
        assert_eq!(p.numerator, vec![q(1, 1)]);
        assert_eq!(p.denominator, vec![q(1, 1), q(-1, 1)]);
        let p0 = pade_from_series(&c, 0, 0).unwrap();
        assert_eq!(p0.numerator, vec![q(1, 1)]);
        assert_eq!(p0.evaluate(&q(1, 3)).unwrap(), q(1, 1));
    }

    #[test]
    fn degenerate_pade_fails_loudly() {
        // 1 + ε²: the [0/1] system has the single equation 1·q₁ = -c₁ with c₀ = 1,
        // fine; but c = (0, 0, 1) gives a zero matrix for [1/1].
        let c = vec![q(0, 1), q(0, 1), q(1, 1)];
        assert_eq!(
            pade_from_series(&c, 1, 1),
            Err(Error::DegeneratePade { l: 1, m: 1 })
        );
        assert!(pade_from_series(&c, 2, 2).is_err());
    }

    #[test]
    fn e1_two_two_in_epsilon() {
        let z = q(13, 7);
        let g = solve_gamma(&make_e1(z.clone()).unwrap(), 4).unwrap();
        let p = pade_from_series(g.coefficients(), 2, 2).unwrap();
        let one = q(1, 1);
        assert_eq!(p.numerator, vec![one.clone(), &z - &q(3, 1), q(2, 1)]);
        let den1 = &(&q(2, 1) * &z) - &q(3, 1);
        let den2 = &(&(&z * &z) - &(&q(2, 1) * &z)) + &q(2, 1);
        assert_eq!(p.denominator, vec![one, den1, den2]);
        // n-form (n²-n+zn+z)/(n²-n+2zn+z²) at ε = 1/(n+1)
        for n in 1..8i64 {
            let nn = q(n, 1);
            let base = &(&nn * &nn) - &nn;
            let num = &(&base + &(&z * &nn)) + &z;
            let den = &(&base + &(&q(2, 1) * &(&z * &nn))) + &(&z * &z);
            assert_eq!(p.evaluate(&q(1, n + 1)).unwrap(), num / den);
        }
    }

    #[test]
    fn pade_with_zero_denominator_degree_is_truncated_power() {
        let f = make_2f1(q(1, 3), q(7, 5), q(9, 2), q(-17, 20)).unwrap();
        let g = solve_gamma(&f, 6).unwrap();
        for n in [1u64, 5, 12] {
            let pade = remainder_pade(&f, &g, n, 4, 0).unwrap();
            let power = remainder_power(&f, &g.truncated(4).unwrap(), n).unwrap();
            assert_eq!(pade, power);
        }
        assert!(remainder_pade(&f, &g, 1, 4, 3).is_err());
    }

    #[test]
    fn method_round_trip() {
        for m in [
            Method::Power,
            Method::Factorial,
            Method::Pade { l: 4, m: 3 },
        ] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("pade".parse::<Method>().is_err());
        assert_eq!(Method::default_pade(9), Method::Pade { l: 4, m: 4 });
    }

    #[test]
    fn factorial_and_power_agree_asymptotically() {
        // |r̃ - r̂| / |ρₙ| = O((n+α)^{-m-1})
        let k = Kind::real(50);
        let f = make_e1(k.int(5)).unwrap();
        let m = 4;
        let g = solve_gamma(&f, m).unwrap();
        let fg = gamma_to_factorial(&g);
        let ns: Vec<u64> = (20..=60).collect();
        let xs: Vec<f64> = ns.iter().map(|&n| (n as f64 + 1.0).ln()).collect();
        let ys: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let gap =
                    remainder_factorial(&f, &fg, n).unwrap() - remainder_power(&f, &g, n).unwrap();
                (gap / f.scale_at(n).unwrap()).abs().to_f64().ln()
            })
            .collect();
        let slope = crate::stats::least_squares_slope(&xs, &ys);
        assert!((slope + (m as f64 + 1.0)).abs() < 0.3, "slope {slope}");
    }

    fn rational_series(len: usize) -> impl Strategy<Value = Vec<Scalar>> {
        prop::collection::vec((-6i64..=6, 1i64..=3), len)
            .prop_map(|v| v.into_iter().map(|(n, d)| q(n, d)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pade_matches_input_series(c in rational_series(9), l in 0usize..=4, m in 0usize..=4) {
            match pade_from_series(&c, l, m) {
                Ok(p) => {
                    let e = p.expansion().unwrap();
                    prop_assert_eq!(e.coeffs(), &c[..=l + m]);
                }
                Err(Error::DegeneratePade { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
