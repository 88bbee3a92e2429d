//! Reduced fractions of integer Laurent polynomials: the scalar type `ℚ(v)`
//! with a decidable membership test for the local ring `𝒵_𝔭`.

use super::laurent::{normalize_primitive, poly_gcd, LaurentPoly};
use super::prime::PrimeConfig;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// An element of `ℚ(v)` as a reduced fraction `num/den` of integer Laurent
/// polynomials.
///
/// Canonical form: `den` is nonzero with minimal exponent 0 and positive
/// leading coefficient; `num` and `den` share no polynomial factor over
/// `ℚ[v]` and their integer contents are coprime. Equality of canonical
/// values is representation equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingFrac {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RingFrac {
    pub fn zero() -> Self {
        RingFrac { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        RingFrac { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RingFrac { num: p, den: LaurentPoly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    /// Builds `num/den` and reduces to canonical form.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = RingFrac { num, den };
        f.canonicalize();
        f
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        // Shift so den is an ordinary polynomial with nonzero constant term;
        // the compensating shift goes into num.
        let dshift = self.den.min_exp().unwrap();
        if dshift != 0 {
            self.den = self.den.shifted(-dshift);
            self.num = self.num.shifted(-dshift);
        }
        // Remove the common polynomial factor; only nonconstant parts on both
        // sides can share one.
        if !self.num.is_monomial() && !self.den.is_monomial() {
            let g = poly_gcd(&self.num, &self.den);
            if !g.is_one() && !g.is_zero() {
                self.num = self.num.divide_exact(&g).expect("gcd divides numerator");
                self.den = self.den.divide_exact(&g).expect("gcd divides denominator");
                let dshift = self.den.min_exp().unwrap();
                if dshift != 0 {
                    self.den = self.den.shifted(-dshift);
                    self.num = self.num.shifted(-dshift);
                }
            }
        }
        // Coprime integer contents.
        let cn = self.num.content();
        let cd = self.den.content();
        let g = cn.gcd(&cd);
        if !g.is_one() {
            self.num = self.num.div_content(&g);
            self.den = self.den.div_content(&g);
        }
        // Positive leading coefficient in the denominator.
        if self.den.leading_coeff().is_negative() {
            self.num = -&self.num;
            self.den = -&self.den;
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        RingFrac::new(self.den.clone(), self.num.clone())
    }

    /// Evaluates at `v = 1`; fails only when the denominator vanishes there.
    pub fn eval_at_one(&self) -> Option<(BigInt, BigInt)> {
        let d = self.den.eval_at_one();
        if d.is_zero() {
            return None;
        }
        Some((self.num.eval_at_one(), d))
    }

    /// The image in `𝔽_p` under `v ↦ 1` followed by reduction mod `p`.
    /// Defined exactly for elements of `𝒵_𝔭`.
    pub fn residue_fp(&self, cfg: &PrimeConfig) -> Result<u64> {
        let p = BigInt::from(cfg.p());
        let dn = self.den.eval_at_one().mod_floor(&p);
        if dn.is_zero() {
            return Err(Error::Internal("residue of an element outside Z_p".into()));
        }
        let nn = self.num.eval_at_one().mod_floor(&p);
        let d = dn.to_u64_digits().1.first().copied().unwrap_or(0);
        let n = nn.to_u64_digits().1.first().copied().unwrap_or(0);
        Ok((n * mod_inverse(d, cfg.p())) % cfg.p())
    }

    /// Canonical text form `num/den`.
    pub fn canonical_string(&self) -> String {
        format!("{}/{}", self.num.canonical_string(), self.den.canonical_string())
    }

    pub fn parse_canonical(s: &str) -> Option<Self> {
        let (n, d) = s.split_once('/')?;
        let num = LaurentPoly::parse_canonical(n)?;
        let den = LaurentPoly::parse_canonical(d)?;
        if den.is_zero() {
            return None;
        }
        Some(RingFrac::new(num, den))
    }
}

/// Classification of an element of `ℚ(v)` relative to `𝒵_𝔭`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZfpClass {
    /// In `𝒵_𝔭` and invertible there.
    Unit,
    /// In `𝒵_𝔭` but not invertible.
    NonUnit,
    /// Not in `𝒵_𝔭`.
    Outside,
}

/// Decides membership and invertibility in `𝒵_𝔭`: with `x = num/den` in
/// canonical form, `x ∈ 𝒵_𝔭` iff `den(1) ≢ 0 (mod p)`, and a member is a
/// unit iff additionally `num(1) ≢ 0 (mod p)`.
pub fn zfp_is_unit(x: &RingFrac, cfg: &PrimeConfig) -> ZfpClass {
    let p = BigInt::from(cfg.p());
    if x.den.eval_at_one().mod_floor(&p).is_zero() {
        return ZfpClass::Outside;
    }
    if x.num.eval_at_one().mod_floor(&p).is_zero() {
        ZfpClass::NonUnit
    } else {
        ZfpClass::Unit
    }
}

/// True when `x ∈ 𝒵_𝔭`.
pub fn zfp_member(x: &RingFrac, cfg: &PrimeConfig) -> bool {
    zfp_is_unit(x, cfg) != ZfpClass::Outside
}

/// The exponent of `τ_l` in the factorization of `x ≠ 0` over `ℚ[v]`,
/// computed by exact trial division of numerator and denominator.
pub fn tau_valuation(x: &RingFrac, cfg: &PrimeConfig, l: u32) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    let tau = super::quantum::cyclotomic_tau(cfg, l);
    Ok(poly_tau_valuation(&x.num, &tau) - poly_tau_valuation(&x.den, &tau))
}

pub fn poly_tau_valuation(p: &LaurentPoly, tau: &LaurentPoly) -> i64 {
    if p.is_zero() {
        return 0;
    }
    let mut v = 0;
    let mut cur = normalize_primitive(p);
    while let Some(q) = cur.divide_exact(tau) {
        v += 1;
        cur = q;
        if cur.is_monomial() {
            break;
        }
    }
    v
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is a small prime; Fermat.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl fmt::Debug for RingFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Display for RingFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

impl Add for &RingFrac {
    type Output = RingFrac;
    fn add(self, rhs: &RingFrac) -> RingFrac {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // Sums of polynomials stay canonical without a gcd pass.
        if self.den.is_one() && rhs.den.is_one() {
            return RingFrac { num: &self.num + &rhs.num, den: LaurentPoly::one() };
        }
        if self.den == rhs.den {
            return RingFrac::new(&self.num + &rhs.num, self.den.clone());
        }
        RingFrac::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RingFrac {
    type Output = RingFrac;
    fn sub(self, rhs: &RingFrac) -> RingFrac {
        if rhs.is_zero() {
            return self.clone();
        }
        self + &(-rhs)
    }
}

impl Neg for &RingFrac {
    type Output = RingFrac;
    fn neg(self) -> RingFrac {
        RingFrac { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RingFrac {
    type Output = RingFrac;
    fn mul(self, rhs: &RingFrac) -> RingFrac {
        if self.is_zero() || rhs.is_zero() {
            return RingFrac::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        // Products of polynomials stay canonical without a gcd pass.
        if self.den.is_one() && rhs.den.is_one() {
            return RingFrac { num: &self.num * &rhs.num, den: LaurentPoly::one() };
        }
        // Cross-reduce before multiplying to keep operands small.
        let a = RingFrac::new(self.num.clone(), rhs.den.clone());
        let b = RingFrac::new(rhs.num.clone(), self.den.clone());
        RingFrac { num: &a.num * &b.num, den: &a.den * &b.den }
    }
}

impl Div for &RingFrac {
    type Output = RingFrac;
    fn div(self, rhs: &RingFrac) -> RingFrac {
        self * &rhs.inv()
    }
}

#[cfg(test)]
mod tests {
    use super::super::quantum::{cyclotomic_tau, quantum_integer};
    use super::*;

    fn cfg3() -> PrimeConfig {
        PrimeConfig::new(3, false).unwrap()
    }

    #[test]
    fn canonical_fraction_reduction() {
        let q2 = quantum_integer(2, 1); // v + v⁻¹
        let q6 = quantum_integer(6, 1);
        let x = RingFrac::new(q6.clone(), q2.clone());
        // [6]/[2] = [3]_2 = v⁴ + 1 + v⁻⁴ ... as a fraction it must be a polynomial.
        assert!(x.den().is_one());
        assert_eq!(x.num(), &LaurentPoly::from_terms(vec![
            (4, 1.into()), (0, 1.into()), (-4, 1.into()),
        ]));
        // Rational constants stay representable.
        let half = RingFrac::new(LaurentPoly::one(), LaurentPoly::constant(2));
        assert_eq!(half.canonical_string(), "1*v^0/2*v^0");
        assert_eq!(&half + &half, RingFrac::one());
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let a = RingFrac::new(
            LaurentPoly::from_terms(vec![(1, 2.into()), (0, 2.into())]),
            LaurentPoly::constant(4),
        );
        let b = RingFrac::new(
            LaurentPoly::from_terms(vec![(1, 1.into()), (0, 1.into())]),
            LaurentPoly::constant(2),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn zfp_classification() {
        let cfg = cfg3();
        let vp1 = RingFrac::from_poly(LaurentPoly::from_terms(vec![(1, 1.into()), (0, 1.into())]));
        assert_eq!(zfp_is_unit(&vp1, &cfg), ZfpClass::Unit); // v+1 ↦ 2
        let vm1 = RingFrac::from_poly(LaurentPoly::from_terms(vec![(1, 1.into()), (0, (-1).into())]));
        assert_eq!(zfp_is_unit(&vm1, &cfg), ZfpClass::NonUnit); // v−1 ↦ 0
        for l in 1..=3 {
            let tau = RingFrac::from_poly(cyclotomic_tau(&cfg, l));
            assert_eq!(zfp_is_unit(&tau, &cfg), ZfpClass::NonUnit, "τ_{l}(1) = p");
        }
        let inv_tau = RingFrac::new(LaurentPoly::one(), cyclotomic_tau(&cfg, 1));
        assert_eq!(zfp_is_unit(&inv_tau, &cfg), ZfpClass::Outside);
        assert_eq!(zfp_is_unit(&RingFrac::zero(), &cfg), ZfpClass::NonUnit);
    }

    #[test]
    fn tau_valuations_of_quantum_integers() {
        let cfg = cfg3();
        let q3 = RingFrac::from_poly(quantum_integer(3, 1));
        assert_eq!(tau_valuation(&q3, &cfg, 1).unwrap(), 1);
        assert_eq!(tau_valuation(&q3, &cfg, 2).unwrap(), 0);
        let q9 = RingFrac::from_poly(quantum_integer(9, 1));
        assert_eq!(tau_valuation(&q9, &cfg, 1).unwrap(), 1);
        assert_eq!(tau_valuation(&q9, &cfg, 2).unwrap(), 1);
        let q2 = RingFrac::from_poly(quantum_integer(2, 1));
        assert_eq!(tau_valuation(&q2, &cfg, 1).unwrap(), 0);
        assert_eq!(tau_valuation(&q2, &cfg, 2).unwrap(), 0);
        assert!(tau_valuation(&RingFrac::zero(), &cfg, 1).is_err());
    }

    #[test]
    fn field_axioms_spot() {
        let x = RingFrac::new(quantum_integer(5, 1), quantum_integer(4, 2));
        let y = RingFrac::new(quantum_integer(3, 2), quantum_integer(7, 1));
        let z = RingFrac::new(
            LaurentPoly::from_terms(vec![(2, 3.into()), (0, (-1).into())]),
            LaurentPoly::from_terms(vec![(1, 5.into()), (0, 1.into())]),
        );
        let lhs = &x * &(&y + &z);
        let rhs = &(&x * &y) + &(&x * &z);
        assert_eq!(lhs, rhs);
        assert_eq!(&(&x / &y) * &y, x);
    }
}
