//! Quantum integers, factorials, binomials, and cyclotomic polynomials.

use super::laurent::LaurentPoly;
use super::prime::PrimeConfig;
use num_bigint::BigInt;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// The quantum integer `[n]_d = (v^{dn} − v^{−dn})/(v^d − v^{−d})`.
pub fn quantum_integer(n: i64, d: u32) -> LaurentPoly {
    assert!(d >= 1);
    let d = d as i64;
    if n == 0 {
        return LaurentPoly::zero();
    }
    let m = n.abs();
    let mut terms = Vec::with_capacity(m as usize);
    // v^{dn−d} + v^{dn−3d} + … + v^{−dn+d}
    let mut e = d * m - d;
    for _ in 0..m {
        terms.push((e, BigInt::from(1)));
        e -= 2 * d;
    }
    let p = LaurentPoly::from_terms(terms);
    if n > 0 {
        p
    } else {
        -&p
    }
}

/// The quantum factorial `[n]_d!` for `n ≥ 0`.
pub fn quantum_factorial(n: u32, d: u32) -> LaurentPoly {
    let mut acc = LaurentPoly::one();
    for k in 1..=n {
        acc = &acc * &quantum_integer(k as i64, d);
    }
    acc
}

fn binomial_cache() -> &'static Mutex<HashMap<(i64, u32, u32), LaurentPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, u32, u32), LaurentPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The quantum binomial `⟦n over r⟧_d = [n][n−1]⋯[n−r+1] / [r]!`, always a
/// Laurent polynomial; `⟦n over 0⟧ = 1` for all `n ∈ ℤ`.
pub fn quantum_binomial(n: i64, r: u32, d: u32) -> LaurentPoly {
    if r == 0 {
        return LaurentPoly::one();
    }
    if let Some(hit) = binomial_cache().lock().unwrap().get(&(n, r, d)) {
        return hit.clone();
    }
    // ⟦n over r⟧ = ⟦n over r−1⟧·[n−r+1]/[r]; the division is exact.
    let prev = quantum_binomial(n, r - 1, d);
    let num = &prev * &quantum_integer(n - r as i64 + 1, d);
    let out = num
        .divide_exact(&quantum_integer(r as i64, d))
        .expect("quantum binomial division is exact");
    binomial_cache().lock().unwrap().insert((n, r, d), out.clone());
    out
}

fn tau_cache() -> &'static Mutex<HashMap<(u64, u32), LaurentPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), LaurentPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The `p^l`-th cyclotomic polynomial `τ_l`: `τ_0 = v − 1`,
/// `τ_1 = v^{p−1} + ⋯ + 1`, `τ_{l+1}(v) = τ_l(v^p)`.
pub fn cyclotomic_tau(cfg: &PrimeConfig, l: u32) -> LaurentPoly {
    let p = cfg.p();
    if l == 0 {
        return LaurentPoly::from_terms(vec![(1, BigInt::from(1)), (0, BigInt::from(-1))]);
    }
    if let Some(hit) = tau_cache().lock().unwrap().get(&(p, l)) {
        return hit.clone();
    }
    let step = p.pow(l - 1) as i64;
    let out = LaurentPoly::from_terms((0..p as i64).map(|i| (i * step, BigInt::from(1))));
    tau_cache().lock().unwrap().insert((p, l), out.clone());
    out
}

/// The `m`-th cyclotomic polynomial `Φ_m` for `m ≥ 1`, by iterated exact
/// division of `v^m − 1` by the `Φ_d` for proper divisors `d | m`.
pub fn cyclotomic_polynomial(m: u64) -> LaurentPoly {
    assert!(m >= 1);
    static CACHE: OnceLock<Mutex<HashMap<u64, LaurentPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return hit.clone();
    }
    let mut acc = LaurentPoly::from_terms(vec![(m as i64, BigInt::from(1)), (0, BigInt::from(-1))]);
    for d in 1..m {
        if m % d == 0 {
            acc = acc
                .divide_exact(&cyclotomic_polynomial(d))
                .expect("cyclotomic division is exact");
        }
    }
    cache.lock().unwrap().insert(m, acc.clone());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantum_integer_cases() {
        // [3]_1 = v² + 1 + v⁻²
        assert_eq!(
            quantum_integer(3, 1),
            LaurentPoly::from_terms(vec![(2, 1.into()), (0, 1.into()), (-2, 1.into())])
        );
        assert!(quantum_integer(0, 2).is_zero());
        // [−2]_1 = −(v + v⁻¹)
        assert_eq!(
            quantum_integer(-2, 1),
            LaurentPoly::from_terms(vec![(1, (-1).into()), (-1, (-1).into())])
        );
        // [−n] = −[n]
        for n in 1..6 {
            for d in 1..4 {
                assert_eq!(quantum_integer(-n, d), -&quantum_integer(n, d));
            }
        }
    }

    #[test]
    fn specialization_at_one() {
        for n in -12..=12i64 {
            for d in 1..=3u32 {
                assert_eq!(quantum_integer(n, d).eval_at_one(), BigInt::from(n));
            }
        }
    }

    #[test]
    fn quantum_binomial_cases() {
        assert!(quantum_binomial(7, 0, 2).is_one());
        assert!(quantum_binomial(-4, 0, 1).is_one());
        // ⟦4 over 2⟧_1 = v⁴ + v² + 2 + v⁻² + v⁻⁴
        assert_eq!(
            quantum_binomial(4, 2, 1),
            LaurentPoly::from_terms(vec![
                (4, 1.into()),
                (2, 1.into()),
                (0, 2.into()),
                (-2, 1.into()),
                (-4, 1.into()),
            ])
        );
        // ⟦2 over 1⟧_2 = [2]_2 = v² + v⁻²
        assert_eq!(
            quantum_binomial(2, 1, 2),
            LaurentPoly::from_terms(vec![(2, 1.into()), (-2, 1.into())])
        );
        // 0 ≤ n < r gives 0.
        assert!(quantum_binomial(2, 3, 1).is_zero());
    }

    #[test]
    fn tau_cases() {
        let cfg = PrimeConfig::new(3, false).unwrap();
        assert_eq!(
            cyclotomic_tau(&cfg, 1),
            LaurentPoly::from_terms(vec![(2, 1.into()), (1, 1.into()), (0, 1.into())])
        );
        assert_eq!(
            cyclotomic_tau(&cfg, 2),
            LaurentPoly::from_terms(vec![(6, 1.into()), (3, 1.into()), (0, 1.into())])
        );
        assert_eq!(
            cyclotomic_tau(&cfg, 0),
            LaurentPoly::from_terms(vec![(1, 1.into()), (0, (-1).into())])
        );
        // τ_l = Φ_{p^l}
        assert_eq!(cyclotomic_tau(&cfg, 2), cyclotomic_polynomial(9));
        let cfg5 = PrimeConfig::new(5, false).unwrap();
        assert_eq!(cyclotomic_tau(&cfg5, 1), cyclotomic_polynomial(5));
        // τ_l(1) = p
        for l in 1..4 {
            assert_eq!(cyclotomic_tau(&cfg, l).eval_at_one(), BigInt::from(3));
        }
    }

    #[test]
    fn easypeasy_identity_sweep() {
        // [a]⟦b over c⟧ = [a−c]⟦b−1 over c⟧ + [a+b−c]⟦b−1 over c−1⟧
        for d in 1..=3u32 {
            for a in -8..=8i64 {
                for b in -8..=8i64 {
                    for c in 0..=8u32 {
                        let lhs = &quantum_integer(a, d) * &quantum_binomial(b, c, d);
                        let t1 = &quantum_integer(a - c as i64, d) * &quantum_binomial(b - 1, c, d);
                        let t2 = if c == 0 {
                            LaurentPoly::zero()
                        } else {
                            &quantum_integer(a + b - c as i64, d) * &quantum_binomial(b - 1, c - 1, d)
                        };
                        assert_eq!(lhs, &t1 + &t2, "a={a} b={b} c={c} d={d}");
                    }
                }
            }
        }
    }
}
