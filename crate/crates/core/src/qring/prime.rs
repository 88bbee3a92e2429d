//! The prime datum behind `𝒵_𝔭`.

use crate::error::{Error, Result};

/// An odd prime `p`, with the extra exclusion `p ≠ 3` when the root system
/// has a `G2` component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeConfig {
    p: u64,
    forbids_p3: bool,
}

impl PrimeConfig {
    pub fn new(p: u64, forbids_p3: bool) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::PrimeConstraint(format!("{p} is not prime")));
        }
        if p == 2 {
            return Err(Error::PrimeConstraint("p = 2 is excluded".into()));
        }
        if forbids_p3 && p == 3 {
            return Err(Error::PrimeConstraint(
                "p = 3 is excluded for root systems with a G2 component".into(),
            ));
        }
        Ok(PrimeConfig { p, forbids_p3 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn forbids_p3(&self) -> bool {
        self.forbids_p3
    }

    /// `φ(p^l)`, the degree of the `p^l`-th cyclotomic polynomial, for `l ≥ 1`;
    /// returns 1 for `l = 0`.
    pub fn phi(&self, l: u32) -> u64 {
        if l == 0 {
            1
        } else {
            self.p.pow(l - 1) * (self.p - 1)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraints() {
        assert!(PrimeConfig::new(3, false).is_ok());
        assert!(PrimeConfig::new(2, false).is_err());
        assert!(PrimeConfig::new(3, true).is_err());
        assert!(PrimeConfig::new(5, true).is_ok());
        assert!(PrimeConfig::new(9, false).is_err());
    }

    #[test]
    fn phi_values() {
        let cfg = PrimeConfig::new(3, false).unwrap();
        assert_eq!(cfg.phi(1), 2);
        assert_eq!(cfg.phi(2), 6);
        let cfg5 = PrimeConfig::new(5, false).unwrap();
        assert_eq!(cfg5.phi(2), 20);
    }
}
