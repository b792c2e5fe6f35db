//! Assembly and forward solution of the triangular system for γ₀..γ_m.
//!
//! Column μ of the matrix is the series U·ε^μ + V·φ(ε)^μ with
//! φ(ε) = ε/(1+ε); row j holds its ε^j coefficient. The right-hand side is
//! (1, 0, …, 0). Row j never involves γ_{j+1}, …, so forward substitution
//! solves the system; the structure is checked, not assumed.

use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::scalar::{Kind, Scalar};
use crate::series::TruncatedLaurentSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSystem {
    /// `matrix[j][μ]`: coefficient of ε^j in U·ε^μ + V·φ^μ.
    pub matrix: Vec<Vec<Scalar>>,
    pub rhs: Vec<Scalar>,
    pub m: usize,
}

/// Solved ansatz coefficients for one family and expansion order.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaVector {
    family: FamilySpec,
    coeffs: Vec<Scalar>,
}

impl GammaVector {
    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    /// Expansion order m.
    pub fn m(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn kind(&self) -> Kind {
        self.coeffs[0].kind()
    }

    /// S(ε) = Σ γ_μ ε^μ as a power series.
    pub fn series(&self) -> TruncatedLaurentSeries {
        TruncatedLaurentSeries::power(self.coeffs.clone()).expect("coefficients share one kind")
    }

    /// The first `m + 1` coefficients.
    pub fn truncated(&self, m: usize) -> Result<GammaVector> {
        if m > self.m() {
            return Err(Error::InvalidArgument(format!(
                "order {m} exceeds solved order {}",
                self.m()
            )));
        }
        Ok(GammaVector {
            family: self.family.clone(),
            coeffs: self.coeffs[..=m].to_vec(),
        })
    }

    /// S(1/(n+α)).
    pub fn ansatz_sum(&self, n: u64) -> Result<Scalar> {
        let eps = self.kind().ratio(1, n as i64 + self.family.alpha() as i64);
        self.series().evaluate(&eps)
    }
}

/// Builds the (m+1)×(m+1) system by probing U·ε^μ + V·φ^μ.
pub fn build_system(family: &FamilySpec, m: usize) -> Result<ResidualSystem> {
    let (u, v) = family.residual_operators(m)?;
    let kind = family.kind();
    // A base-(-1) operator eats one order of its partner.
    let lift = (-u.base_order().min(v.base_order())).max(0) as usize;
    let inner = m + lift;
    let mut matrix = vec![vec![kind.zero(); m + 1]; m + 1];
    for mu in 0..=m {
        let power = TruncatedLaurentSeries::monomial(kind.one(), mu as i32, inner)?;
        let shifted = power.shift_substitute(inner)?;
        let column = u.mul(&power)?.add(&v.mul(&shifted)?)?.truncate(m as i32)?;
        if !column.laurent_part_vanishes() {
            return Err(Error::Internal(format!(
                "{}: ε⁻¹ row does not vanish in column {mu}",
                family.name()
            )));
        }
        let column = column.into_power_series()?;
        for (j, row) in matrix.iter_mut().enumerate() {
            row[mu] = column.coefficient_at(j as i32)?.clone();
        }
    }
    for (j, row) in matrix.iter().enumerate() {
        if let Some(mu) = (j + 1..=m).find(|&mu| !row[mu].is_zero()) {
            return Err(Error::Internal(format!(
                "{}: row {j} involves γ_{mu}; system is not triangular",
                family.name()
            )));
        }
    }
    let mut rhs = vec![kind.zero(); m + 1];
    rhs[0] = kind.one();
    Ok(ResidualSystem { matrix, rhs, m })
}

impl ResidualSystem {
    /// Forward substitution; the error is the row of the first zero pivot.
    pub fn forward_substitute(&self) -> std::result::Result<Vec<Scalar>, usize> {
        let mut gamma: Vec<Scalar> = Vec::with_capacity(self.m + 1);
        for j in 0..=self.m {
            let pivot = &self.matrix[j][j];
            if pivot.is_zero() {
                return Err(j);
            }
            let mut acc = self.rhs[j].clone();
            for (mu, g) in gamma.iter().enumerate() {
                acc = acc - &(&self.matrix[j][mu] * g);
            }
            gamma.push(acc / pivot);
        }
        Ok(gamma)
    }
}

/// γ₀..γ_m for `family`, verified against the residual identity.
pub fn solve_gamma(family: &FamilySpec, m: usize) -> Result<GammaVector> {
    let system = build_system(family, m)?;
    let coeffs = system.forward_substitute().map_err(|_| Error::Degenerate {
        family: family.name().to_string(),
        parameter: family.degenerate_parameter(),
    })?;
    let g = GammaVector {
        family: family.clone(),
        coeffs,
    };
    check_residual(&g)?;
    Ok(g)
}

/// Coefficients of U·S + V·S(φ) - 1 through ε^m, computed by direct
/// series composition (independent of the probed matrix).
pub fn residual_series(g: &GammaVector) -> Result<TruncatedLaurentSeries> {
    let m = g.m();
    let family = g.family();
    let (u, v) = family.residual_operators(m)?;
    let lift = (-u.base_order().min(v.base_order())).max(0) as usize;
    // Pad S with zeros: S is a polynomial, so it is known to every order.
    let mut padded = g.coefficients().to_vec();
    padded.extend(std::iter::repeat_n(g.kind().zero(), lift));
    let s = TruncatedLaurentSeries::power(padded)?;
    let lhs = u.mul(&s)?.add(&v.mul(&s.shift_substitute(m + lift)?)?)?;
    let one = TruncatedLaurentSeries::constant(g.kind().one(), m + lift);
    lhs.sub(&one)?.truncate(m as i32)?.into_power_series()
}

fn check_residual(g: &GammaVector) -> Result<()> {
    let residual = residual_series(g)?;
    match g.kind() {
        Kind::Exact => {
            if let Some(j) = residual.coeffs().iter().position(|c| !c.is_zero()) {
                return Err(Error::Internal(format!(
                    "residual coefficient of ε^{j} is nonzero"
                )));
            }
        }
        Kind::Real { digits } => {
            let scale = g
                .coefficients()
                .iter()
                .map(|c| c.abs().to_f64())
                .fold(1.0, f64::max);
            let tol = 10f64.powi(8 - digits as i32) * scale;
            if let Some(j) = residual
                .coeffs()
                .iter()
                .position(|c| c.abs().to_f64() > tol)
            {
                return Err(Error::Internal(format!(
                    "residual coefficient of ε^{j} exceeds {tol:e}"
                )));
            }
        }
    }
    Ok(())
}

/// (r̂ₙ₊₁ - r̂ₙ)/aₙ₊₁ - 1 with r̂ₖ = ρₖ·S(1/(k+α)), in plain scalar arithmetic.
pub fn residual_defect(family: &FamilySpec, g: &GammaVector, n: u64) -> Result<Scalar> {
    let r = |k: u64| -> Result<Scalar> { Ok(family.scale_at(k)? * g.ansatz_sum(k)?) };
    let diff = r(n + 1)? - r(n)?;
    Ok(diff.try_div(&family.term(n + 1)?)? - family.kind().one())
}

/// Least-squares slope of log|defect| against log(n+α) over `ns`; about -(m+1)
/// when the defect is O(ε^{m+1}).
pub fn residual_order_slope(
    family: &FamilySpec,
    m: usize,
    ns: std::ops::RangeInclusive<u64>,
) -> Result<f64> {
    let g = solve_gamma(family, m)?;
    let alpha = f64::from(family.alpha());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in ns {
        xs.push((n as f64 + alpha).ln());
        ys.push(residual_defect(family, &g, n)?.abs().to_f64().ln());
    }
    Ok(crate::stats::least_squares_slope(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{bernoulli, pochhammer};
    use crate::family::{make_2f1, make_e1, make_pfq, make_zeta};

    fn q(n: i64, d: i64) -> Scalar {
        Kind::Exact.ratio(n, d)
    }

    #[test]
    fn gauss_order_zero_system() {
        let z = q(-17, 20);
        let f = make_2f1(q(1, 3), q(7, 5), q(9, 2), z.clone()).unwrap();
        let sys = build_system(&f, 0).unwrap();
        assert_eq!(sys.matrix, vec![vec![&z - &q(1, 1)]]);
        let g = solve_gamma(&f, 2).unwrap();
        assert_eq!(g.coefficients()[0], q(-20, 37));
        assert!((g.coefficients()[2].to_f64() - 2.0947).abs() < 1e-4);
    }

    #[test]
    fn e1_order_one_system() {
        let z = q(5, 1);
        let sys = build_system(&make_e1(z.clone()).unwrap(), 1).unwrap();
        assert_eq!(sys.matrix, vec![vec![q(1, 1), q(0, 1)], vec![z, q(1, 1)]]);
        assert_eq!(sys.rhs, vec![q(1, 1), q(0, 1)]);
    }

    #[test]
    fn zeta_order_zero_system() {
        let s = q(5, 2);
        let sys = build_system(&make_zeta(s.clone()).unwrap(), 0).unwrap();
        assert_eq!(sys.matrix, vec![vec![&q(1, 1) - &s]]);
    }

    #[test]
    fn e1_coefficients_at_five() {
        let g = solve_gamma(&make_e1(q(5, 1)).unwrap(), 4).unwrap();
        let expected: Vec<Scalar> = [1, -5, 20, -55, 45].iter().map(|&v| q(v, 1)).collect();
        assert_eq!(g.coefficients(), expected.as_slice());
    }

    /// γ_μ = (-1)^{μ-1} (s)_{μ-1} B_μ / μ!, with (s)_{-1} = 1/(s-1).
    fn euler_maclaurin_gamma(s: &Scalar, mu: usize) -> Scalar {
        let poch = if mu == 0 {
            (s - &q(1, 1)).recip().unwrap()
        } else {
            pochhammer(s, mu - 1)
        };
        let sign = if mu % 2 == 1 { q(1, 1) } else { q(-1, 1) };
        let fact = pochhammer(&q(1, 1), mu);
        sign * poch * bernoulli(mu) / fact
    }

    #[test]
    fn zeta_coefficients_are_bernoulli_terms() {
        for s in [q(2, 1), q(11, 10), q(-7, 3), q(5, 2)] {
            let g = solve_gamma(&make_zeta(s.clone()).unwrap(), 20).unwrap();
            for (mu, gm) in g.coefficients().iter().enumerate() {
                assert_eq!(gm, &euler_maclaurin_gamma(&s, mu), "s={s}, μ={mu}");
            }
        }
    }

    #[test]
    fn zero_pivot_names_parameter() {
        // s = 0: the pivot 1-s-μ vanishes at μ = 1
        let err = solve_gamma(&make_zeta(q(0, 1)).unwrap(), 3).unwrap_err();
        assert_eq!(
            err,
            Error::Degenerate {
                family: "zeta".into(),
                parameter: "s=0".into()
            }
        );
        assert!(solve_gamma(&make_zeta(q(0, 1)).unwrap(), 0).is_ok());
    }

    #[test]
    fn coefficients_do_not_depend_on_m() {
        let families = [
            make_zeta(q(3, 2)).unwrap(),
            make_2f1(q(1, 3), q(7, 5), q(9, 2), q(-17, 20)).unwrap(),
            make_pfq(
                vec![q(1, 2), q(2, 3), q(5, 4)],
                vec![q(3, 2), q(7, 3)],
                q(2, 5),
            )
            .unwrap(),
            make_e1(q(7, 3)).unwrap(),
        ];
        for f in &families {
            let long = solve_gamma(f, 9).unwrap();
            for m in 0..9 {
                assert_eq!(solve_gamma(f, m).unwrap(), long.truncated(m).unwrap());
            }
        }
    }

    #[test]
    fn residual_vanishes_exactly() {
        let f = make_pfq(
            vec![q(1, 2), q(2, 3), q(5, 4)],
            vec![q(3, 2), q(7, 3)],
            q(2, 5),
        )
        .unwrap();
        let g = solve_gamma(&f, 7).unwrap();
        assert!(residual_series(&g)
            .unwrap()
            .coeffs()
            .iter()
            .all(Scalar::is_zero));
    }

    #[test]
    fn real_mode_matches_exact() {
        let f = make_2f1(q(1, 3), q(7, 5), q(9, 2), q(-17, 20)).unwrap();
        let exact = solve_gamma(&f, 8).unwrap();
        let real = solve_gamma(&f.with_kind(Kind::real(50)).unwrap(), 8).unwrap();
        for (e, r) in exact.coefficients().iter().zip(real.coefficients()) {
            let gap = (&e.to_real(50) - r).abs().to_f64();
            assert!(gap <= 1e-45 * e.abs().to_f64().max(1.0));
        }
    }

    fn defect_slope(f: &FamilySpec, m: usize) -> f64 {
        residual_order_slope(f, m, 20..=60).unwrap()
    }

    #[test]
    fn defect_decays_at_order_m_plus_one() {
        let k = Kind::real(50);
        let e1 = make_e1(k.int(5)).unwrap();
        assert!((defect_slope(&e1, 4) + 5.0).abs() < 0.3);
        let zeta = make_zeta(k.int(2)).unwrap();
        // B_{2j+1} = 0: odd m gives order m+1, even m gains one order
        assert!((defect_slope(&zeta, 5) + 6.0).abs() < 0.3);
        assert!((defect_slope(&zeta, 6) + 8.0).abs() < 0.3);
    }

    #[test]
    fn e1_defect_ratio() {
        let f = make_e1(Kind::real(50).int(5)).unwrap();
        let g = solve_gamma(&f, 4).unwrap();
        let d40 = residual_defect(&f, &g, 40).unwrap().to_f64();
        let d20 = residual_defect(&f, &g, 20).unwrap().to_f64();
        let expected = (21.0f64 / 41.0).powi(5);
        let ratio = d40 / d20;
        assert!(
            (ratio / expected - 1.0).abs() < 0.25,
            "ratio {ratio} vs {expected}"
        );
    }

    #[test]
    fn order_zero_defect_is_first_order() {
        let f = make_2f1(q(1, 2), q(1, 3), q(5, 2), q(1, 2)).unwrap();
        let g = solve_gamma(&f, 0).unwrap();
        let d = residual_defect(&f, &g, 400).unwrap().abs().to_f64();
        assert!(d < 10.0 / 400.0 && d > 0.0);
    }
}
