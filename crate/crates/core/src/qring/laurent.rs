//! Sparse Laurent polynomials over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element of `ℤ[v, v⁻¹]` in canonical sparse form: terms sorted by
/// increasing exponent, no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: Vec<(i64, BigInt)>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        LaurentPoly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::constant_big(BigInt::from(c))
    }

    pub fn constant_big(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentPoly { terms: vec![(0, c)] }
        }
    }

    /// The monomial `c · v^e`.
    pub fn monomial(e: i64, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentPoly { terms: vec![(e, c)] }
        }
    }

    pub fn v() -> Self {
        Self::monomial(1, 1)
    }

    /// Builds a polynomial from arbitrary (exponent, coefficient) pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut terms: Vec<(i64, BigInt)> = pairs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|(e, _)| *e);
        let mut merged: Vec<(i64, BigInt)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        LaurentPoly { terms: merged }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// True when this is `c · v^e` for a single term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> &[(i64, BigInt)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.last().map(|(e, _)| *e)
    }

    /// Difference between highest and lowest exponent (0 for constants and zero).
    pub fn degree_span(&self) -> i64 {
        match (self.min_exp(), self.max_exp()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        match self.terms.binary_search_by_key(&e, |(x, _)| *x) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.terms.last().map(|(_, c)| c.clone()).unwrap_or_else(BigInt::zero)
    }

    /// Multiplies by `v^k`.
    pub fn shifted(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Substitutes `v ↦ v^k` for `k ≥ 1`.
    pub fn compose_v_power(&self, k: i64) -> Self {
        assert!(k >= 1);
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        }
    }

    /// Substitutes `v ↦ v⁻¹`.
    pub fn bar_involution(&self) -> Self {
        let mut terms: Vec<(i64, BigInt)> = self.terms.iter().map(|(e, c)| (-e, c.clone())).collect();
        terms.reverse();
        LaurentPoly { terms }
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c).sum()
    }

    /// Evaluates at a rational point `t ≠ 0`.
    pub fn eval_rational(&self, t: &BigRational) -> BigRational {
        assert!(!t.is_zero());
        let mut acc = BigRational::zero();
        let tinv = t.recip();
        for (e, c) in &self.terms {
            let p = if *e >= 0 {
                pow_rational(t, *e as u64)
            } else {
                pow_rational(&tinv, (-e) as u64)
            };
            acc += BigRational::from(c.clone()) * p;
        }
        acc
    }

    /// GCD of all coefficients (nonnegative); zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by `d` exactly.
    pub fn div_content(&self, d: &BigInt) -> Self {
        assert!(!d.is_zero());
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (q, r) = c.div_rem(d);
                    assert!(r.is_zero(), "content division not exact");
                    (*e, q)
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// Exact division; `None` when the division leaves a remainder.
    ///
    /// Works over ℚ internally and checks that the quotient is integral, so
    /// non-monic divisors are handled.
    pub fn divide_exact(&self, den: &LaurentPoly) -> Option<LaurentPoly> {
        assert!(!den.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if den.is_monomial() {
            let (de, dc) = (&den.terms[0].0, &den.terms[0].1);
            let mut out = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.push((e - de, q));
            }
            return Some(LaurentPoly { terms: out });
        }
        // Dense long division from the top over ℤ; leading coefficients must
        // divide at every step for the division to be exact.
        let lo = self.min_exp().unwrap();
        let hi = self.max_exp().unwrap();
        let width = (hi - lo + 1) as usize;
        let mut rem: Vec<BigInt> = vec![BigInt::zero(); width];
        for (e, c) in &self.terms {
            rem[(e - lo) as usize] = c.clone();
        }
        let den_lead_exp = den.max_exp().unwrap();
        let den_lead = den.leading_coeff();
        let den_dense: Vec<(i64, &BigInt)> =
            den.terms.iter().map(|(e, c)| (e - den_lead_exp, c)).collect();
        let mut quo: Vec<(i64, BigInt)> = Vec::new();
        let mut top = width as i64 - 1;
        while top >= 0 {
            if rem[top as usize].is_zero() {
                top -= 1;
                continue;
            }
            let re = lo + top;
            let qe = re - den_lead_exp;
            let (qc, r) = rem[top as usize].div_rem(&den_lead);
            if !r.is_zero() {
                return None;
            }
            for (off, c) in &den_dense {
                let idx = top + off;
                if idx < 0 {
                    return None;
                }
                let delta = &qc * *c;
                rem[idx as usize] -= delta;
            }
            debug_assert!(rem[top as usize].is_zero());
            quo.push((qe, qc));
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(LaurentPoly::from_terms(quo))
    }

    /// Canonical text form: terms by decreasing exponent, `c*v^e` joined by `+`.
    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| format!("{}*v^{}", c, e))
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Parses the canonical text form.
    pub fn parse_canonical(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "0" {
            return Some(Self::zero());
        }
        let mut terms = Vec::new();
        // Split on '+' only when it starts a new `c*v^e` item; coefficients may be
        // negative, exponents may be negative.
        for item in s.split('+') {
            let item = item.trim();
            if item.is_empty() {
                return None;
            }
            let (c, e) = item.split_once("*v^")?;
            let c: BigInt = c.parse().ok()?;
            let e: i64 = e.parse().ok()?;
            terms.push((e, c));
        }
        let p = LaurentPoly::from_terms(terms);
        Some(p)
    }
}

fn pow_rational(t: &BigRational, mut k: u64) -> BigRational {
    let mut base = t.clone();
    let mut acc = BigRational::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &rhs.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Less => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*eb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((*ea, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(rhs.terms[j..].iter().cloned());
        LaurentPoly { terms: out }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        if self.is_monomial() {
            let (e, c) = &self.terms[0];
            return rhs.shifted(*e).scale(c);
        }
        if rhs.is_monomial() {
            let (e, c) = &rhs.terms[0];
            return self.shifted(*e).scale(c);
        }
        // Dense accumulation over the exponent range; both operands stay sparse
        // in steps of 2 for quantum numbers, but a dense buffer is simplest.
        let lo = self.min_exp().unwrap() + rhs.min_exp().unwrap();
        let hi = self.max_exp().unwrap() + rhs.max_exp().unwrap();
        let width = (hi - lo + 1) as usize;
        let mut buf: Vec<BigInt> = vec![BigInt::zero(); width];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let idx = (ea + eb - lo) as usize;
                buf[idx] += ca * cb;
            }
        }
        let terms = buf
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (lo + i as i64, c))
            .collect();
        LaurentPoly { terms }
    }
}

/// GCD over ℤ[v] of the shift-normalized parts, returned primitive with
/// positive leading coefficient and minimal exponent 0. Monomial factors
/// (units of the Laurent ring) are not part of the result.
pub fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize_primitive(b);
    }
    if b.is_zero() {
        return normalize_primitive(a);
    }
    let mut f = normalize_primitive(a);
    let mut g = normalize_primitive(b);
    if f.degree_span() < g.degree_span() {
        std::mem::swap(&mut f, &mut g);
    }
    // Primitive pseudo-remainder sequence.
    loop {
        if g.is_one() {
            return g;
        }
        let r = pseudo_rem(&f, &g);
        if r.is_zero() {
            return g;
        }
        f = g;
        g = normalize_primitive(&r);
        if f.degree_span() < g.degree_span() {
            std::mem::swap(&mut f, &mut g);
        }
    }
}

/// Primitive part with minimal exponent 0 and positive leading coefficient.
pub fn normalize_primitive(a: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return LaurentPoly::zero();
    }
    let shifted = a.shifted(-a.min_exp().unwrap());
    let mut c = shifted.content();
    if shifted.leading_coeff().is_negative() {
        c = -c;
    }
    shifted.div_content(&c)
}

/// Pseudo-remainder of `f` by `g` (both shift-normalized, `deg f ≥ deg g`),
/// computed densely with periodic content stripping to bound coefficient
/// growth on long descents.
fn pseudo_rem(f: &LaurentPoly, g: &LaurentPoly) -> LaurentPoly {
    let lo = f.min_exp().unwrap().min(0);
    let hi = f.max_exp().unwrap();
    let width = (hi - lo + 1) as usize;
    let mut rem: Vec<BigInt> = vec![BigInt::zero(); width];
    for (e, c) in &f.terms {
        rem[(e - lo) as usize] = c.clone();
    }
    let ge = g.max_exp().unwrap();
    let gl = g.leading_coeff();
    let g_dense: Vec<(i64, &BigInt)> = g.terms.iter().map(|(e, c)| (e - ge, c)).collect();
    let gl_is_one = gl.is_one();
    let mut top = width as i64 - 1;
    let mut steps_since_strip = 0usize;
    while top >= 0 {
        let re = lo + top;
        if re < ge {
            break;
        }
        if rem[top as usize].is_zero() {
            top -= 1;
            continue;
        }
        let rl = rem[top as usize].clone();
        if !gl_is_one {
            for c in rem.iter_mut() {
                if !c.is_zero() {
                    *c *= &gl;
                }
            }
        }
        for (off, c) in &g_dense {
            let idx = (top + off) as usize;
            let delta = &rl * *c;
            rem[idx] -= delta;
        }
        debug_assert!(rem[top as usize].is_zero());
        if !gl_is_one {
            steps_since_strip += 1;
            if steps_since_strip >= 8 {
                steps_since_strip = 0;
                let mut content = BigInt::zero();
                for c in rem.iter() {
                    if !c.is_zero() {
                        content = content.gcd(c);
                        if content.is_one() {
                            break;
                        }
                    }
                }
                if content > BigInt::one() {
                    for c in rem.iter_mut() {
                        if !c.is_zero() {
                            *c /= &content;
                        }
                    }
                }
            }
        }
    }
    LaurentPoly::from_terms(rem.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(pairs.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    #[test]
    fn arithmetic_basics() {
        let a = p(&[(2, 1), (0, 1), (-2, 1)]);
        let b = p(&[(1, 1), (-1, 1)]);
        assert_eq!(&a + &b, p(&[(2, 1), (1, 1), (0, 1), (-1, 1), (-2, 1)]));
        assert_eq!(&a - &a, LaurentPoly::zero());
        // [2]·[2] = v² + 2 + v⁻²
        assert_eq!(&b * &b, p(&[(2, 1), (0, 2), (-2, 1)]));
    }

    #[test]
    fn canonical_form_has_no_zero_terms() {
        let a = LaurentPoly::from_terms(vec![
            (0, BigInt::from(3)),
            (0, BigInt::from(-3)),
            (5, BigInt::from(2)),
        ]);
        assert_eq!(a.num_terms(), 1);
        assert_eq!(a.coeff(5), BigInt::from(2));
    }

    #[test]
    fn exact_division() {
        let a = p(&[(1, 1), (-1, 1)]); // [2]
        let b = p(&[(2, 1), (0, 1), (-2, 1)]); // [3]
        let prod = &a * &b;
        assert_eq!(prod.divide_exact(&a), Some(b.clone()));
        assert_eq!(prod.divide_exact(&b), Some(a.clone()));
        let off = &prod + &LaurentPoly::one();
        assert_eq!(off.divide_exact(&a), None);
        // Non-monic divisor.
        let two = p(&[(0, 2)]);
        assert_eq!(p(&[(3, 4), (0, -2)]).divide_exact(&two), Some(p(&[(3, 2), (0, -1)])));
        assert_eq!(p(&[(3, 3)]).divide_exact(&two), None);
    }

    #[test]
    fn gcd_of_quantum_like_factors() {
        let q2 = p(&[(1, 1), (-1, 1)]);
        let q3 = p(&[(2, 1), (0, 1), (-2, 1)]);
        let a = &q2 * &q3;
        let b = &q2 * &q2;
        let g = poly_gcd(&a, &b);
        // gcd is [2] normalized to minimal exponent 0: v² + 1
        assert_eq!(g, p(&[(2, 1), (0, 1)]));
        assert_eq!(poly_gcd(&q3, &q2), LaurentPoly::one());
    }

    #[test]
    fn string_round_trip() {
        let a = p(&[(2, 1), (0, 1), (-2, 1)]);
        assert_eq!(a.canonical_string(), "1*v^2+1*v^0+1*v^-2");
        assert_eq!(LaurentPoly::parse_canonical("1*v^2+1*v^0+1*v^-2"), Some(a));
        let b = p(&[(1, -1), (-1, -1)]);
        let s = b.canonical_string();
        assert_eq!(s, "-1*v^1+-1*v^-1");
        assert_eq!(LaurentPoly::parse_canonical(&s), Some(b));
        assert_eq!(LaurentPoly::parse_canonical("0"), Some(LaurentPoly::zero()));
    }
}
