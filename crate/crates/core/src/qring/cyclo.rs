//! Arithmetic in the cyclotomic residue fields `ℚ[v]/(τ_l) = ℚ(ζ_{p^l})` and
//! the `(1−ζ)`-adic valuation used by lattice saturation.

use super::laurent::LaurentPoly;
use super::prime::PrimeConfig;
use super::quantum::cyclotomic_tau;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// An element of `ℚ[v]/(τ_l)` in the power basis `1, ζ, …, ζ^{φ(p^l)−1}`.
///
/// For `l = 0` the residue ring is `ℚ[v]/(v−1) = ℚ` and the basis has length 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycloElem {
    level: u32,
    coords: Vec<BigRational>,
}

impl CycloElem {
    pub fn zero(cfg: &PrimeConfig, level: u32) -> Self {
        CycloElem { level, coords: vec![BigRational::zero(); cfg.phi(level) as usize] }
    }

    pub fn one(cfg: &PrimeConfig, level: u32) -> Self {
        let mut x = Self::zero(cfg, level);
        x.coords[0] = BigRational::one();
        x
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, rhs: &CycloElem) -> CycloElem {
        assert_eq!(self.level, rhs.level);
        CycloElem {
            level: self.level,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &CycloElem) -> CycloElem {
        assert_eq!(self.level, rhs.level);
        CycloElem {
            level: self.level,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> CycloElem {
        CycloElem { level: self.level, coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, rhs: &CycloElem, cfg: &PrimeConfig) -> CycloElem {
        assert_eq!(self.level, rhs.level);
        let phi = self.coords.len();
        let mut raw = vec![BigRational::zero(); 2 * phi];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        reduce_raw(raw, cfg, self.level)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm modulo `τ_l`.
    pub fn inv(&self, cfg: &PrimeConfig) -> Result<CycloElem> {
        if self.is_zero() {
            return Err(Error::Internal("inverse of zero in cyclotomic field".into()));
        }
        let modulus = tau_rational(cfg, self.level);
        let a: Vec<BigRational> = self.coords.clone();
        let (g, s) = ext_gcd_poly(&a, &modulus);
        // g is a nonzero constant.
        debug_assert!(g.len() == 1 && !g[0].is_zero());
        let ginv = g[0].recip();
        let coords: Vec<BigRational> = s.iter().map(|c| c * &ginv).collect();
        let mut raw = coords;
        raw.resize(2 * cfg.phi(self.level) as usize, BigRational::zero());
        Ok(reduce_raw(raw, cfg, self.level))
    }

    /// The image under `ζ ↦ 1` (sum of coordinates).
    pub fn eval_zeta_one(&self) -> BigRational {
        self.coords.iter().sum()
    }
}

/// Reduces a Laurent polynomial modulo `τ_l`; a ring homomorphism
/// `ℤ[v,v⁻¹] → ℚ(ζ_{p^l})` (the image of `v` is invertible).
pub fn cyclo_reduce(x: &LaurentPoly, cfg: &PrimeConfig, l: u32) -> CycloElem {
    let phi = cfg.phi(l) as usize;
    if x.is_zero() {
        return CycloElem::zero(cfg, l);
    }
    let shift = x.min_exp().unwrap().min(0);
    // x = v^shift · poly with poly ordinary.
    let poly = x.shifted(-shift);
    let deg = poly.max_exp().unwrap() as usize;
    let mut raw = vec![BigRational::zero(); deg.max(phi) + 1 + phi];
    for (e, c) in poly.terms() {
        raw[*e as usize] = BigRational::from(c.clone());
    }
    let mut red = reduce_raw(raw, cfg, l);
    if shift < 0 {
        // Multiply by the inverse of v^{−shift}.
        let v = v_elem(cfg, l);
        let vinv = v.inv(cfg).expect("v is invertible modulo τ_l");
        for _ in 0..(-shift) {
            red = red.mul(&vinv, cfg);
        }
    }
    red
}

fn v_elem(cfg: &PrimeConfig, l: u32) -> CycloElem {
    let phi = cfg.phi(l) as usize;
    let mut x = CycloElem::zero(cfg, l);
    if phi == 1 {
        // Level 0: v ≡ 1.
        x.coords[0] = BigRational::one();
    } else {
        x.coords[1] = BigRational::one();
    }
    x
}

/// τ_l as a dense rational coefficient vector (degree φ(p^l)).
fn tau_rational(cfg: &PrimeConfig, l: u32) -> Vec<BigRational> {
    let tau = cyclotomic_tau(cfg, l);
    let deg = tau.max_exp().unwrap() as usize;
    let mut out = vec![BigRational::zero(); deg + 1];
    for (e, c) in tau.terms() {
        out[*e as usize] = BigRational::from(c.clone());
    }
    out
}

/// Reduces a dense coefficient vector modulo τ_l into power-basis coordinates.
fn reduce_raw(mut raw: Vec<BigRational>, cfg: &PrimeConfig, l: u32) -> CycloElem {
    let phi = cfg.phi(l) as usize;
    let modulus = tau_rational(cfg, l);
    // τ_l is monic of degree φ: v^φ = −(lower terms).
    for i in (phi..raw.len()).rev() {
        if raw[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut raw[i], BigRational::zero());
        for (j, m) in modulus.iter().enumerate().take(phi) {
            if !m.is_zero() {
                let delta = &c * m;
                raw[i - phi + j] -= delta;
            }
        }
    }
    raw.truncate(phi);
    raw.resize(phi, BigRational::zero());
    CycloElem { level: l, coords: raw }
}

/// Extended gcd of polynomials over ℚ (dense low-to-high coefficient vectors):
/// returns `(g, s)` with `g = gcd(a, m)` (a constant for coprime inputs) and
/// `s·a ≡ g (mod m)`.
fn ext_gcd_poly(a: &[BigRational], m: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = trim(m.to_vec());
    let mut r1 = trim(a.to_vec());
    let mut s0 = vec![BigRational::zero()];
    let mut s1 = vec![BigRational::one()];
    while !is_zero_poly(&r1) && deg(&r1) > 0 {
        let (q, r) = div_rem_poly(&r0, &r1);
        let s = sub_poly(&s0, &mul_poly(&q, &s1));
        r0 = r1;
        r1 = trim(r);
        s0 = s1;
        s1 = s;
    }
    if is_zero_poly(&r1) {
        (r0, s0)
    } else {
        (r1, s1)
    }
}

fn deg(p: &[BigRational]) -> usize {
    p.len().saturating_sub(1)
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn is_zero_poly(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn sub_poly(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim(out)
}

fn mul_poly(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if is_zero_poly(a) || is_zero_poly(b) {
        return vec![BigRational::zero()];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(out)
}

fn div_rem_poly(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim(b.to_vec());
    assert!(!is_zero_poly(&b));
    let mut rem = trim(a.to_vec());
    let db = deg(&b);
    let lead = b[db].clone();
    if deg(&rem) < db || is_zero_poly(&rem) {
        return (vec![BigRational::zero()], rem);
    }
    let mut quo = vec![BigRational::zero(); deg(&rem) - db + 1];
    while !is_zero_poly(&rem) && deg(&rem) >= db {
        let dr = deg(&rem);
        let c = &rem[dr] / &lead;
        quo[dr - db] = c.clone();
        for (j, bc) in b.iter().enumerate() {
            if !bc.is_zero() {
                let delta = &c * bc;
                rem[dr - db + j] -= delta;
            }
        }
        rem = trim(rem);
        if dr == 0 {
            break;
        }
    }
    (trim(quo), rem)
}

/// The `(1−ζ)`-adic valuation on `ℚ(ζ_{p^l})` for `l ≥ 1` (normalized so that
/// `val(1−ζ) = 1` and `val(p) = φ(p^l)`). For `l = 0` this degenerates to the
/// `p`-adic valuation of the rational value.
pub fn zeta_valuation(x: &CycloElem, cfg: &PrimeConfig) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    let p = BigInt::from(cfg.p());
    if x.level == 0 {
        // ℚ with the p-adic valuation.
        let q = &x.coords[0];
        let mut val = 0i64;
        let mut n = q.numer().clone();
        let mut d = q.denom().clone();
        while (&n % &p).is_zero() {
            n /= &p;
            val += 1;
        }
        while (&d % &p).is_zero() {
            d /= &p;
            val -= 1;
        }
        return Ok(val);
    }
    let phi = cfg.phi(x.level) as i64;
    // Clear denominators: x = y / c with y integral.
    let mut den_lcm = BigInt::one();
    for c in &x.coords {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut y: Vec<BigInt> = x
        .coords
        .iter()
        .map(|c| {
            let scaled = c * BigRational::from(den_lcm.clone());
            debug_assert!(scaled.denom().is_one());
            scaled.numer().clone()
        })
        .collect();
    let mut val: i64 = 0;
    // Subtract φ·v_p(denominator).
    let mut d = den_lcm.clone();
    while (&d % &p).is_zero() {
        d /= &p;
        val -= phi;
    }
    // Fast path: pull out integer factors of p (valuation φ each).
    loop {
        if y.iter().all(|c| (c % &p).is_zero()) {
            for c in &mut y {
                *c /= &p;
            }
            val += phi;
        } else {
            break;
        }
    }
    // Repeated exact division by (1 − ζ); divisibility test: image under
    // ζ ↦ 1 vanishes mod p.
    let tau = cyclotomic_tau(cfg, x.level);
    loop {
        let image: BigInt = y.iter().sum();
        if !(image % &p).is_zero() {
            break;
        }
        y = divide_by_one_minus_zeta(&y, &tau);
        val += 1;
        // Keep coordinates small when possible.
        if y.iter().all(|c| (c % &p).is_zero()) {
            for c in &mut y {
                *c /= &p;
            }
            val += phi;
        }
    }
    Ok(val)
}

/// Exact division of an integral cyclotomic element by `(1 − ζ)`, given in
/// power-basis integer coordinates.
fn divide_by_one_minus_zeta(y: &[BigInt], tau: &LaurentPoly) -> Vec<BigInt> {
    // Solve (1 − v)·z ≡ y (mod τ): synthetic division of y by (1 − v) after
    // adjusting by a multiple of τ so the division is exact.
    // (1 − v) z = y − c·τ where c = y(1)/τ(1) makes the right side vanish at 1.
    let phi = y.len();
    let p_val = tau.eval_at_one();
    let y1: BigInt = y.iter().sum();
    let (c, r) = y1.div_rem(&p_val);
    assert!(r.is_zero(), "element not divisible by (1 − ζ)");
    let mut adj: Vec<BigInt> = y.to_vec();
    for (e, t) in tau.terms() {
        let idx = *e as usize;
        if idx < adj.len() {
            adj[idx] -= &c * t;
        } else {
            // τ has degree φ; the top coefficient folds into the z-polynomial
            // space. Extend temporarily.
            adj.resize(idx + 1, BigInt::from(0));
            adj[idx] -= &c * t;
        }
    }
    // Now adj vanishes at v = 1; (1 − v)·z = adj gives adj_i = z_i − z_{i−1},
    // so z_i = adj_0 + … + adj_i.
    let mut z = vec![BigInt::from(0); adj.len().saturating_sub(1).max(phi)];
    let mut acc = BigInt::from(0);
    for i in 0..adj.len().saturating_sub(1) {
        acc += &adj[i];
        z[i] = acc.clone();
    }
    // Reduce degree back below φ using τ (monic).
    let tau_coeffs: Vec<(usize, BigInt)> =
        tau.terms().iter().map(|(e, c)| (*e as usize, c.clone())).collect();
    let deg_tau = tau_coeffs.last().unwrap().0;
    for i in (deg_tau..z.len()).rev() {
        if z[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut z[i], BigInt::from(0));
        for (e, t) in &tau_coeffs {
            if *e < deg_tau {
                z[i - deg_tau + e] -= &c * t;
            }
        }
    }
    z.truncate(phi);
    z.resize(phi, BigInt::from(0));
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg3() -> PrimeConfig {
        PrimeConfig::new(3, false).unwrap()
    }

    #[test]
    fn reduce_is_ring_hom() {
        let cfg = cfg3();
        let a = LaurentPoly::from_terms(vec![(3, 2.into()), (1, 1.into()), (-2, 5.into())]);
        let b = LaurentPoly::from_terms(vec![(4, 1.into()), (0, (-3).into()), (-1, 2.into())]);
        for l in 1..=2 {
            let ra = cyclo_reduce(&a, &cfg, l);
            let rb = cyclo_reduce(&b, &cfg, l);
            let rab = cyclo_reduce(&(&a * &b), &cfg, l);
            assert_eq!(ra.mul(&rb, &cfg), rab);
            let rsum = cyclo_reduce(&(&a + &b), &cfg, l);
            assert_eq!(ra.add(&rb), rsum);
        }
    }

    #[test]
    fn reduce_examples() {
        let cfg = cfg3();
        // τ_1 ↦ 0
        let tau1 = cyclotomic_tau(&cfg, 1);
        assert!(cyclo_reduce(&tau1, &cfg, 1).is_zero());
        // v³ ↦ 1 at level 1 (ζ³ = 1)
        let v3 = LaurentPoly::monomial(3, 1);
        assert_eq!(cyclo_reduce(&v3, &cfg, 1), CycloElem::one(&cfg, 1));
        // 1 ↦ 1
        assert_eq!(cyclo_reduce(&LaurentPoly::one(), &cfg, 1), CycloElem::one(&cfg, 1));
        // v⁻¹ · v = 1
        let vinv = cyclo_reduce(&LaurentPoly::monomial(-1, 1), &cfg, 1);
        let v = cyclo_reduce(&LaurentPoly::v(), &cfg, 1);
        assert_eq!(vinv.mul(&v, &cfg), CycloElem::one(&cfg, 1));
    }

    #[test]
    fn inverse_in_field() {
        let cfg = cfg3();
        for l in 1..=2 {
            let x = cyclo_reduce(
                &LaurentPoly::from_terms(vec![(1, 2.into()), (0, 1.into())]),
                &cfg,
                l,
            );
            let xinv = x.inv(&cfg).unwrap();
            assert_eq!(x.mul(&xinv, &cfg), CycloElem::one(&cfg, l));
        }
    }

    #[test]
    fn zeta_valuations() {
        let cfg = cfg3();
        // 1 − ζ has valuation 1.
        let one_minus_v = LaurentPoly::from_terms(vec![(0, 1.into()), (1, (-1).into())]);
        let x = cyclo_reduce(&one_minus_v, &cfg, 1);
        assert_eq!(zeta_valuation(&x, &cfg).unwrap(), 1);
        // p has valuation φ(p^l).
        for l in 1..=2u32 {
            let p_elem = cyclo_reduce(&LaurentPoly::constant(3), &cfg, l);
            assert_eq!(zeta_valuation(&p_elem, &cfg).unwrap(), cfg.phi(l) as i64);
        }
        // Integer units have valuation 0.
        let u = cyclo_reduce(&LaurentPoly::constant(2), &cfg, 1);
        assert_eq!(zeta_valuation(&u, &cfg).unwrap(), 0);
        // ζ is a unit.
        let z = cyclo_reduce(&LaurentPoly::v(), &cfg, 2);
        assert_eq!(zeta_valuation(&z, &cfg).unwrap(), 0);
        // Zero has no valuation.
        assert!(zeta_valuation(&CycloElem::zero(&cfg, 1), &cfg).is_err());
        // Rational coordinates: (1−ζ)²/3 is a unit at p=3, l=1.
        let sq = x.mul(&x, &cfg);
        let third = CycloElem {
            level: 1,
            coords: vec![
                BigRational::new(1.into(), 3.into()),
                BigRational::zero(),
            ],
        };
        let y = sq.mul(&third, &cfg);
        assert_eq!(zeta_valuation(&y, &cfg).unwrap(), 0);
    }
}
