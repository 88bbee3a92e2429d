//! Weights in fundamental-weight coordinates.

use super::system::RootSystem;
use std::fmt;
use std::ops::{Add, Sub};

/// An integral weight, stored as its vector of pairings `⟨μ, α∨⟩` over the
/// simple roots.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// `⟨μ, α_i∨⟩`.
    pub fn pairing(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// `μ + n·α_i` in weight coordinates.
    pub fn add_root(&self, rs: &RootSystem, i: usize, n: i64) -> Weight {
        let mut out = self.0.clone();
        for (j, c) in out.iter_mut().enumerate() {
            *c += n * rs.cartan()[i][j];
        }
        Weight(out)
    }

    /// The dominant representative of the Weyl orbit.
    pub fn dominant_representative(&self, rs: &RootSystem) -> Weight {
        let mut w = self.clone();
        'outer: loop {
            for i in 0..w.rank() {
                if w.0[i] < 0 {
                    w = w.reflect(rs, i);
                    continue 'outer;
                }
            }
            return w;
        }
    }

    /// Simple reflection `s_i(μ) = μ − ⟨μ,α_i∨⟩ α_i`.
    pub fn reflect(&self, rs: &RootSystem, i: usize) -> Weight {
        self.add_root(rs, i, -self.0[i])
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Decides `μ ≤ λ` in the dominance order: true iff `λ − μ` is a nonnegative
/// integer combination of simple roots.
pub fn dominance_leq(mu: &Weight, lambda: &Weight, rs: &RootSystem) -> bool {
    match rs.root_coordinates(&(lambda - mu)) {
        Some(c) => c.iter().all(|&x| x >= 0),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::super::system::RootSystemSpec;
    use super::*;

    #[test]
    fn dominance_a1() {
        let rs = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
        assert!(dominance_leq(&Weight(vec![1]), &Weight(vec![3]), &rs));
        assert!(!dominance_leq(&Weight(vec![2]), &Weight(vec![3]), &rs));
        assert!(dominance_leq(&Weight(vec![3]), &Weight(vec![3]), &rs));
        assert!(!dominance_leq(&Weight(vec![5]), &Weight(vec![3]), &rs));
    }

    #[test]
    fn dominance_a2() {
        let rs = RootSystem::new(RootSystemSpec::Label("A2".into())).unwrap();
        // 0 ≤ ϖ₁+ϖ₂ (difference α₁+α₂)
        assert!(dominance_leq(&Weight(vec![0, 0]), &Weight(vec![1, 1]), &rs));
        // ϖ₁ and ϖ₂ are incomparable with 0 in the root-lattice sense
        assert!(!dominance_leq(&Weight(vec![0, 0]), &Weight(vec![1, 0]), &rs));
    }

    #[test]
    fn dominance_partial_order_properties() {
        let rs = RootSystem::new(RootSystemSpec::Label("B2".into())).unwrap();
        let ws: Vec<Weight> = (-2..=2)
            .flat_map(|a| (-2..=2).map(move |b| Weight(vec![a, b])))
            .collect();
        for x in &ws {
            assert!(dominance_leq(x, x, &rs));
            for y in &ws {
                if dominance_leq(x, y, &rs) && dominance_leq(y, x, &rs) {
                    assert_eq!(x, y);
                }
                for z in &ws {
                    if dominance_leq(x, y, &rs) && dominance_leq(y, z, &rs) {
                        assert!(dominance_leq(x, z, &rs));
                    }
                }
            }
        }
    }

    #[test]
    fn orbit_representative() {
        let rs = RootSystem::new(RootSystemSpec::Label("A2".into())).unwrap();
        let w = Weight(vec![-1, -1]);
        let dom = w.dominant_representative(&rs);
        assert!(dom.is_dominant());
        // The orbit of a dominant weight maps to itself.
        let lam = Weight(vec![2, 1]);
        assert_eq!(lam.dominant_representative(&rs), lam);
    }
}
