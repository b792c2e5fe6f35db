//! Independent high-precision reference values.
//!
//! Everything here runs in MPFR arithmetic with 20 guard digits above the
//! configured precision and returns real scalars at that precision. Each
//! reference is produced twice by different routes and the routes must agree
//! to `digits - 10` digits, otherwise the call fails with [`Error::Oracle`].

mod quadrature;

use rug::ops::Pow;
use rug::Float;

use crate::combinatorics::bernoulli_rational;
use crate::error::{Error, Result};
use crate::family::{FamilyName, FamilySpec};
use crate::scalar::{bits_for_digits, Kind, Scalar};

use quadrature::{integrate, GaussLegendre};

/// Euler–Mascheroni constant to 124 digits.
const EULER_GAMMA: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495146314472498070824809605";
const EULER_GAMMA_DIGITS: u32 = 124;

const GUARD_DIGITS: u32 = 20;
const AGREEMENT_SLACK: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Decimal digits of the returned values.
    pub digits: u32,
    /// Quadrature target: relative error below 10^-quadrature_digits.
    pub quadrature_digits: u32,
    /// Bisection budget per integral.
    pub max_subdivisions: usize,
    /// Tail sums stop once a term is below 10^-(digits + tail_margin) relative.
    pub tail_margin: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig::new(80)
    }
}

impl OracleConfig {
    pub fn new(digits: u32) -> Self {
        OracleConfig {
            digits,
            quadrature_digits: digits + 10,
            max_subdivisions: 20_000,
            tail_margin: 5,
        }
    }

    /// Smallest default-shaped config that may check a consumer running at `kind`.
    pub fn for_consumer(kind: Kind) -> Self {
        let floor = OracleConfig::default().digits;
        match kind.digits() {
            Some(p) => OracleConfig::new(floor.max(p + GUARD_DIGITS)),
            None => OracleConfig::default(),
        }
    }

    /// Rejects configs that do not carry 20 digits beyond the consumer.
    pub fn check_consumer(&self, kind: Kind) -> Result<()> {
        match kind.digits() {
            Some(p) if self.digits < p + GUARD_DIGITS => Err(Error::Oracle(format!(
                "oracle precision {} must be at least consumer precision {p} + {GUARD_DIGITS}",
                self.digits
            ))),
            _ => Ok(()),
        }
    }

    fn work_bits(&self) -> u32 {
        bits_for_digits(self.digits + GUARD_DIGITS)
    }

    fn finish(&self, x: &Float) -> Scalar {
        Scalar::Real(Float::with_val(bits_for_digits(self.digits), x))
    }

    fn agreement(&self, bits: u32) -> Float {
        Float::with_val(bits, 10).pow(-((self.digits - AGREEMENT_SLACK) as i32))
    }
}

fn pow10(bits: u32, exponent: i32) -> Float {
    Float::with_val(bits, 10).pow(exponent)
}

/// |a - b| <= tol·max(|a|, |b|).
fn agrees(a: &Float, b: &Float, tol: &Float) -> bool {
    let bits = a.prec();
    let scale = Float::with_val(bits, a.abs_ref()).max(&Float::with_val(bits, b.abs_ref()));
    Float::with_val(bits, a - b).abs() <= scale * tol
}

fn require_positive_real(x: &Scalar, what: &str, bits: u32) -> Result<Float> {
    let v = x.to_float(bits);
    if v.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument(format!(
            "{what} must be positive, got {x}"
        )));
    }
    Ok(v)
}

// Euler–Maclaurin for ζ(s), s > 1

/// Upper bound for log10 of the j-th correction (s)_{2j-1}|B_{2j}|/(2j)!·N^{-s-2j+1},
/// using |B_{2j}|/(2j)! <= 2ζ(2)/(2π)^{2j}.
fn em_term_log10(s: f64, big_n: f64, j: usize) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let poch: f64 = (0..2 * j - 1).map(|i| (s + i as f64).log10()).sum();
    poch + (std::f64::consts::PI.powi(2) / 3.0).log10()
        - 2.0 * j as f64 * two_pi.log10()
        - (s + 2.0 * j as f64 - 1.0) * big_n.log10()
}

/// Smallest k whose first omitted correction is below 10^-target, if the
/// corrections reach that level before they start to grow.
fn em_order(s: f64, big_n: f64, target: f64) -> Option<usize> {
    let mut previous = f64::INFINITY;
    for j in 1..10_000 {
        let t = em_term_log10(s, big_n, j);
        if t < -target {
            return Some(j - 1);
        }
        if t > previous {
            return None;
        }
        previous = t;
    }
    None
}

fn zeta_euler_maclaurin(s: &Float, n0: u64, k: usize, bits: u32) -> Float {
    let mut acc = Float::new(bits);
    for nu in 1..=n0 + 1 {
        acc += Float::with_val(bits, nu).pow(-Float::with_val(bits, s));
    }
    let big_n = Float::with_val(bits, n0 + 2);
    let one_minus_s = Float::with_val(bits, 1 - Float::with_val(bits, s));
    let mut npow = Float::with_val(bits, (&big_n).pow(&one_minus_s));
    acc += Float::with_val(bits, &npow / -one_minus_s);
    npow /= &big_n;
    acc += Float::with_val(bits, &npow / 2u32);
    npow /= &big_n;
    // npow tracks N^{-s-2j+1}, poch tracks (s)_{2j-1}
    let mut poch = s.clone();
    let n2 = Float::with_val(bits, big_n.square_ref());
    for j in 1..=k {
        let b = bernoulli_rational(2 * j);
        let fact = crate::combinatorics::factorial(2 * j);
        let coeff = Float::with_val(bits, &b / Float::with_val(bits, &fact));
        acc += Float::with_val(bits, &poch * &coeff) * &npow;
        poch *= Float::with_val(bits, s + (2 * j - 1) as u32)
            * Float::with_val(bits, s + (2 * j) as u32);
        npow /= &n2;
    }
    acc
}

/// ζ(s) for real s > 1, from the Euler–Maclaurin tail at two cut-offs.
pub fn zeta_reference(s: &Scalar, cfg: &OracleConfig) -> Result<Scalar> {
    let bits = cfg.work_bits();
    let sf = s.to_float(bits);
    if sf <= 1 {
        return Err(Error::InvalidArgument(format!(
            "zeta reference needs s > 1, got {s}"
        )));
    }
    let target = f64::from(cfg.digits + GUARD_DIGITS);
    let s64 = sf.to_f64();
    let mut values = Vec::new();
    let mut big_n = (0.5 * target).ceil() + 5.0;
    while values.len() < 2 {
        match em_order(s64, big_n, target) {
            Some(k) => {
                values.push(zeta_euler_maclaurin(&sf, big_n as u64 - 2, k, bits));
                big_n = (big_n * 4.0 / 3.0).ceil() + 7.0;
            }
            None => big_n = (big_n * 1.5).ceil(),
        }
    }
    if !agrees(&values[0], &values[1], &cfg.agreement(bits)) {
        return Err(Error::Oracle(format!("zeta({s}) cut-offs disagree")));
    }
    Ok(cfg.finish(&values[1]))
}

/// Σ_{μ=0}^{m} (-1)^{μ-1}(s)_{μ-1}B_μ/μ!·(n+2)^{1-s-μ}, with (s)_{-1} = 1/(s-1):
/// the Euler–Maclaurin approximation of sₙ - ζ(s), in the kind of `s`.
pub fn euler_maclaurin_zeta_tail(s: &Scalar, n: u64, m: usize) -> Result<Scalar> {
    let kind = s.kind();
    let one = kind.one();
    if *s == one {
        return Err(Error::Degenerate {
            family: "zeta".into(),
            parameter: "s=1".into(),
        });
    }
    let big_n = kind.int(n as i64 + 2);
    let mut poch = (s - &one).recip()?;
    let mut fact = one.clone();
    let mut npow = big_n.pow(&(&one - s))?;
    let inv_n = big_n.recip()?;
    let mut acc = kind.zero();
    for mu in 0..=m {
        if mu > 0 {
            fact = fact * kind.int(mu as i64);
            poch = if mu == 1 {
                one.clone()
            } else {
                poch * (s + &kind.int(mu as i64 - 2))
            };
        }
        let b = kind.rational(&bernoulli_rational(mu));
        let term = &poch * &b / &fact * &npow;
        acc = if mu % 2 == 0 { acc - term } else { acc + term };
        npow = npow * &inv_n;
    }
    Ok(acc)
}

// Stieltjes integrals for E₁

/// ∫₀^∞ t^k e^{-t}/(1 + t/z) dt for z > 0, to relative 10^-quadrature_digits.
fn stieltjes_moment(k: u32, z: &Float, cfg: &OracleConfig) -> Result<Float> {
    let bits = cfg.work_bits();
    let ln10 = std::f64::consts::LN_10;
    let kf = f64::from(k);
    let z64 = z.to_f64();
    // Jensen: the integral is at least k!/(1 + (k+1)/z)
    let ln_lower = (1..=k).map(|i| f64::from(i).ln()).sum::<f64>() - (1.0 + (kf + 1.0) / z64).ln();
    let ln_target = ln_lower - f64::from(cfg.quadrature_digits + 5) * ln10;
    // ∫_T^∞ t^k e^{-t} <= T^k e^{-T}/(1 - k/T) for T > k
    let ln_tail = |t: f64| kf * t.ln() - t - (1.0 - kf / t).ln();
    let mut upper = 2.0 * kf + 10.0;
    while ln_tail(upper) > ln_target {
        upper += 1.0 + upper / 16.0;
    }
    let tail_bound = Float::with_val(bits, ln_tail(upper)).exp();
    let points = (cfg.digits / 2 + 10) as usize;
    let rule = GaussLegendre::new(points, bits);
    let abs_tol =
        Float::with_val(bits, ln_lower).exp() * pow10(bits, -(cfg.quadrature_digits as i32));
    let integrand = |t: &Float| {
        let damp = Float::with_val(bits, -t).exp();
        let poly = Float::with_val(bits, (t).pow(k));
        let den = Float::with_val(bits, t / z) + 1u32;
        poly * damp / den
    };
    let a = Float::new(bits);
    let b = Float::with_val(bits, upper);
    let initial = (upper / 8.0).ceil() as usize;
    let est = integrate(
        &integrand,
        &a,
        &b,
        &abs_tol,
        &rule,
        initial,
        cfg.max_subdivisions,
    )?;
    if est.error + tail_bound > abs_tol {
        return Err(Error::Oracle(format!(
            "moment {k} error budget exceeded at z = {}",
            z64
        )));
    }
    Ok(est.value)
}

/// z·e^z·E₁(z) from -γ - ln z + Σ (-1)^{k+1} z^k/(k·k!).
fn e1_series(z: &Float, cfg: &OracleConfig) -> Result<Float> {
    let z64 = z.to_f64();
    let log10e = std::f64::consts::LOG10_E;
    // E₁(z) ~ e^{-z}/z: the embedded constant limits the reachable relative accuracy
    let reachable = f64::from(EULER_GAMMA_DIGITS) - z64 * log10e - (z64 + 1.0).log10();
    if reachable < f64::from(cfg.digits - 5) {
        return Err(Error::Oracle(format!(
            "series route for z = {z64} is limited to {reachable:.0} digits"
        )));
    }
    let guard = (2.0 * z64 * log10e + z64.max(1.0).log10()).ceil() as u32 + GUARD_DIGITS;
    let bits = bits_for_digits(cfg.digits + guard);
    let z = Float::with_val(bits, z);
    let stop = Float::with_val(bits, 2).pow(-(bits as i32));
    let mut power = z.clone();
    let mut sum = Float::with_val(bits, &z);
    let mut k = 1u32;
    loop {
        k += 1;
        power *= &z;
        power /= k;
        let term = Float::with_val(bits, &power / k);
        if k.is_multiple_of(2) {
            sum -= &term;
        } else {
            sum += &term;
        }
        if f64::from(k) > z64 && term <= Float::with_val(bits, sum.abs_ref()) * &stop {
            break;
        }
    }
    let gamma = Float::with_val(bits, Float::parse(EULER_GAMMA).expect("valid literal"));
    let e1 = sum - gamma - Float::with_val(bits, z.ln_ref());
    let scaled = e1 * Float::with_val(bits, z.exp_ref()) * &z;
    Ok(Float::with_val(cfg.work_bits(), scaled))
}

/// z·e^z·E₁(z) = ∫₀^∞ e^{-t}/(1 + t/z) dt for z > 0.
pub fn e1_reference(z: &Scalar, cfg: &OracleConfig) -> Result<Scalar> {
    let bits = cfg.work_bits();
    let zf = require_positive_real(z, "E1 argument", bits)?;
    let by_quadrature = stieltjes_moment(0, &zf, cfg)?;
    let by_series = e1_series(&zf, cfg)?;
    if !agrees(&by_quadrature, &by_series, &cfg.agreement(bits)) {
        return Err(Error::Oracle(format!("E1 routes disagree at z = {z}")));
    }
    Ok(cfg.finish(&by_quadrature))
}

// Exact remainders rₙ = sₙ - f

fn hypergeometric_tail(family: &FamilySpec, n: u64, cfg: &OracleConfig) -> Result<Float> {
    let bits = cfg.work_bits();
    let kind = Kind::real(cfg.digits + GUARD_DIGITS);
    let real = family.with_kind(kind)?;
    let z = real
        .z()
        .expect("hypergeometric family has z")
        .to_float(bits);
    let zabs = Float::with_val(bits, z.abs_ref());
    if zabs >= 1 {
        return Err(Error::InvalidArgument(format!(
            "tail summation needs |z| < 1, got {}",
            z.to_f64()
        )));
    }
    let q = Float::with_val(bits, &zabs + 1u32) / 2u32;
    let stop = pow10(
        bits,
        -((cfg.digits + GUARD_DIGITS + cfg.tail_margin) as i32),
    ) * Float::with_val(bits, 1 - Float::with_val(bits, &q));
    let mut term = real.term(n + 1)?.to_float(bits);
    let mut acc = Float::new(bits);
    let mut k = n + 1;
    loop {
        acc += &term;
        let next = real.term_ratio(k)?.to_float(bits);
        term *= &next;
        k += 1;
        let small =
            Float::with_val(bits, term.abs_ref()) <= Float::with_val(bits, acc.abs_ref()) * &stop;
        if small && Float::with_val(bits, next.abs_ref()) <= q {
            break;
        }
        if k - n > 50_000_000 {
            return Err(Error::Oracle("tail summation did not terminate".into()));
        }
    }
    Ok(-acc)
}

/// rₙ = sₙ - f to `cfg.digits`, checked by a second route.
pub fn remainder_exact(family: &FamilySpec, n: u64, cfg: &OracleConfig) -> Result<Scalar> {
    let bits = cfg.work_bits();
    let work = Kind::real(cfg.digits + GUARD_DIGITS);
    let value = match family.name() {
        FamilyName::Zeta => {
            let s = family.s().expect("zeta family has s");
            let inner = OracleConfig {
                digits: cfg.digits + GUARD_DIGITS,
                ..*cfg
            };
            let zeta = zeta_reference(s, &inner)?.to_float(bits);
            family.with_kind(work)?.partial_sum(n)?.to_float(bits) - zeta
        }
        FamilyName::Gauss2F1 | FamilyName::Pfq => hypergeometric_tail(family, n, cfg)?,
        FamilyName::E1 => {
            let z = family.z().expect("E1 family has z");
            let zf = require_positive_real(z, "E1 argument", bits)?;
            let inner = OracleConfig {
                digits: cfg.digits + GUARD_DIGITS,
                ..*cfg
            };
            let reference = e1_reference(z, &inner)?.to_float(bits);
            let direct = family.with_kind(work)?.partial_sum(n)?.to_float(bits) - reference;
            // rₙ = -(-z)^{-n-1} ∫ t^{n+1} e^{-t}/(1 + t/z)
            let moment = stieltjes_moment(n as u32 + 1, &zf, cfg)?;
            let factor = Float::with_val(bits, -Float::with_val(bits, &zf).recip()).pow(n + 1);
            let by_moment = -(moment * factor);
            if !agrees(&direct, &by_moment, &cfg.agreement(bits)) {
                return Err(Error::Oracle(format!(
                    "E1 remainder routes disagree at n = {n}"
                )));
            }
            direct
        }
    };
    Ok(cfg.finish(&value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_2f1, make_e1, make_pfq, make_zeta};
    use rug::float::Constant;

    fn q(n: i64, d: i64) -> Scalar {
        Kind::Exact.ratio(n, d)
    }

    fn close(a: &Scalar, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn embedded_euler_constant() {
        let bits = bits_for_digits(140);
        let lit = Float::with_val(bits, Float::parse(EULER_GAMMA).unwrap());
        let mpfr = Float::with_val(bits, Constant::Euler);
        assert!(Float::with_val(bits, lit - mpfr).abs() < 1e-123);
    }

    #[test]
    fn consumer_margin() {
        let cfg = OracleConfig::default();
        assert!(cfg.check_consumer(Kind::real(60)).is_ok());
        assert!(cfg.check_consumer(Kind::real(61)).is_err());
        assert!(cfg.check_consumer(Kind::Exact).is_ok());
        assert_eq!(OracleConfig::for_consumer(Kind::real(100)).digits, 120);
        assert_eq!(OracleConfig::for_consumer(Kind::real(30)).digits, 80);
    }

    #[test]
    fn zeta_two_is_pi_squared_over_six() {
        let cfg = OracleConfig::default();
        let z = zeta_reference(&q(2, 1), &cfg).unwrap();
        let bits = bits_for_digits(100);
        let pi = Float::with_val(bits, Constant::Pi);
        let expected = Float::with_val(bits, pi.square_ref()) / 6u32;
        let tol = pow10(bits, -75);
        assert!(agrees(&z.to_float(bits), &expected, &tol));
    }

    #[test]
    fn zeta_four_matches_closed_form() {
        // brute-force summation converges like K^-3, far too slowly for 50 digits
        let cfg = OracleConfig::new(60);
        let z = zeta_reference(&q(4, 1), &cfg).unwrap();
        let bits = bits_for_digits(80);
        let pi = Float::with_val(bits, Constant::Pi);
        let expected = Float::with_val(bits, (&pi).pow(4u32)) / 90u32;
        assert!(agrees(&z.to_float(bits), &expected, &pow10(bits, -55)));
    }

    #[test]
    fn zeta_near_one_and_domain() {
        let cfg = OracleConfig::default();
        let z = zeta_reference(&Kind::real(50).parse("1.1").unwrap(), &cfg).unwrap();
        assert!(close(&z, 10.584448464950809, 1e-12));
        assert!(zeta_reference(&q(1, 1), &cfg).is_err());
        assert!(zeta_reference(&q(1, 2), &cfg).is_err());
    }

    #[test]
    fn euler_maclaurin_tail_examples() {
        assert_eq!(euler_maclaurin_zeta_tail(&q(2, 1), 0, 0).unwrap(), q(-1, 2));
        // -1/N - 1/(2N²) - 1/(6N³) at N = 2
        assert_eq!(
            euler_maclaurin_zeta_tail(&q(2, 1), 0, 2).unwrap(),
            q(-1, 2) - q(1, 8) - q(1, 48)
        );
        assert!(euler_maclaurin_zeta_tail(&q(1, 1), 3, 2).is_err());
    }

    #[test]
    fn euler_maclaurin_tail_tracks_remainder() {
        let cfg = OracleConfig::default();
        let f = make_zeta(q(2, 1)).unwrap();
        let exact = remainder_exact(&f, 8, &cfg).unwrap().to_f64();
        let approx = euler_maclaurin_zeta_tail(&q(2, 1), 8, 10).unwrap().to_f64();
        // first omitted correction: |B_12|·10^{-13}
        assert!(
            (exact - approx).abs() < 2.6e-14,
            "{}",
            (exact - approx).abs()
        );
    }

    #[test]
    fn e1_reference_values() {
        let cfg = OracleConfig::default();
        let one = e1_reference(&q(1, 1), &cfg).unwrap().to_f64();
        assert!(one > 0.0 && one < 1.0);
        // e·E₁(1) = 0.596347362323194...
        assert!((one - 0.596_347_362_323_194).abs() < 1e-15);
        let big = e1_reference(&q(50, 1), &cfg).unwrap().to_f64();
        assert!((big - 1.0).abs() < 2.0 / 50.0);
        assert!(e1_reference(&q(-1, 1), &cfg).is_err());
        assert!(e1_reference(&q(0, 1), &cfg).is_err());
    }

    #[test]
    fn e1_series_range_is_reported() {
        let cfg = OracleConfig::new(100);
        assert!(matches!(
            e1_reference(&q(80, 1), &cfg),
            Err(Error::Oracle(_))
        ));
    }

    #[test]
    fn table_remainders() {
        let cfg = OracleConfig::default();
        let f = make_2f1(q(1, 3), q(7, 5), q(9, 2), q(-17, 20)).unwrap();
        assert!(close(
            &remainder_exact(&f, 1, &cfg).unwrap(),
            -0.016412471,
            1e-9
        ));
        assert!(close(
            &remainder_exact(&f, 10, &cfg).unwrap(),
            0.000031925482,
            1.5e-12
        ));
        let e = make_e1(q(5, 1)).unwrap();
        assert!(close(
            &remainder_exact(&e, 2, &cfg).unwrap(),
            0.027889,
            1e-6
        ));
        assert!(close(
            &remainder_exact(&e, 10, &cfg).unwrap(),
            0.250470879,
            1e-9
        ));
    }

    #[test]
    fn remainders_satisfy_difference_equation() {
        let cfg = OracleConfig::new(60);
        let families = [
            make_zeta(q(3, 2)).unwrap(),
            make_2f1(q(1, 2), q(1, 3), q(5, 2), q(1, 2)).unwrap(),
            make_pfq(
                vec![q(1, 2), q(2, 3), q(5, 4)],
                vec![q(3, 2), q(7, 3)],
                q(2, 5),
            )
            .unwrap(),
            make_e1(q(3, 1)).unwrap(),
        ];
        let bits = bits_for_digits(60);
        let tol = pow10(bits, -50);
        for f in &families {
            let real = f.with_kind(Kind::real(80)).unwrap();
            let mut prev = remainder_exact(f, 0, &cfg).unwrap().to_float(bits);
            for n in 1..=6u64 {
                let cur = remainder_exact(f, n, &cfg).unwrap().to_float(bits);
                let delta = Float::with_val(bits, &cur - &prev);
                let term = real.term(n).unwrap().to_float(bits);
                assert!(agrees(&delta, &term, &tol), "{} n = {n}", f.name());
                prev = cur;
            }
        }
    }
}
