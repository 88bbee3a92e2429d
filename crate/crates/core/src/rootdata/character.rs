//! Formal characters, Weyl characters by Freudenthal's recursion, and the
//! alternating-sum cross-check.

use super::system::RootSystem;
use super::weight::{dominance_leq, Weight};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap, VecDeque};

/// A finitely supported multiplicity function on the weight lattice.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Character {
    pub mults: BTreeMap<Weight, u64>,
}

impl Character {
    pub fn empty() -> Self {
        Character { mults: BTreeMap::new() }
    }

    pub fn dim(&self) -> u64 {
        self.mults.values().sum()
    }

    pub fn mult(&self, w: &Weight) -> u64 {
        self.mults.get(w).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = &Weight> {
        self.mults.keys()
    }

    /// Coefficientwise `self ≤ other`.
    pub fn leq(&self, other: &Character) -> bool {
        self.mults.iter().all(|(w, m)| other.mult(w) >= *m)
    }
}

/// All weights `μ` with `dom(μ) ≤ λ` in the root-lattice coset of `λ`,
/// topologically sorted: every `ν > μ` precedes `μ` (by increasing height of
/// `λ − μ`, ties broken lexicographically on coordinates, larger first).
pub fn candidate_support(lambda: &Weight, rs: &RootSystem) -> Result<Vec<Weight>> {
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(format!("{lambda}")));
    }
    let mut seen: HashMap<Weight, i64> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(lambda.clone(), 0);
    queue.push_back(lambda.clone());
    while let Some(mu) = queue.pop_front() {
        let h = seen[&mu];
        for i in 0..rs.rank() {
            let nu = mu.add_root(rs, i, -1);
            if seen.contains_key(&nu) {
                continue;
            }
            if dominance_leq(&nu.dominant_representative(rs), lambda, rs) {
                seen.insert(nu.clone(), h + 1);
                queue.push_back(nu);
            }
        }
    }
    let mut out: Vec<(i64, Weight)> = seen.into_iter().map(|(w, h)| (h, w)).collect();
    out.sort_by(|(ha, wa), (hb, wb)| ha.cmp(hb).then(wb.cmp(wa)));
    Ok(out.into_iter().map(|(_, w)| w).collect())
}

/// Exact weight multiplicities of the Weyl module `Δ(λ)` by Freudenthal's
/// recursion.
pub fn weyl_character(lambda: &Weight, rs: &RootSystem) -> Result<Character> {
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(format!("{lambda}")));
    }
    let support = candidate_support(lambda, rs)?;
    let rho = rs.rho();
    let lam_rho = lambda + &rho;
    let top_norm = rs.inner_product(&lam_rho, &lam_rho);
    let positive_roots: Vec<Weight> =
        rs.positive_roots().iter().map(|c| rs.root_to_weight(c)).collect();

    let mut mults: BTreeMap<Weight, BigInt> = BTreeMap::new();
    let index: HashMap<&Weight, usize> =
        support.iter().enumerate().map(|(i, w)| (w, i)).collect();
    for mu in &support {
        if mu == lambda {
            mults.insert(mu.clone(), BigInt::one());
            continue;
        }
        if !mu.is_dominant() {
            // Weyl-group invariance: copy from the dominant representative,
            // which is strictly higher in the topological order.
            let dom = mu.dominant_representative(rs);
            debug_assert!(index[&dom] < index[mu]);
            let m = mults.get(&dom).cloned().unwrap_or_else(BigInt::zero);
            mults.insert(mu.clone(), m);
            continue;
        }
        // Freudenthal: (|λ+ρ|² − |μ+ρ|²)·m_μ = 2 Σ_{α>0} Σ_{k≥1} (μ+kα, α)·m_{μ+kα}
        let mu_rho = mu + &rho;
        let denom = &top_norm - &rs.inner_product(&mu_rho, &mu_rho);
        assert!(
            denom.is_positive(),
            "Freudenthal denominator must be positive for dominant μ < λ"
        );
        let mut rhs = BigRational::zero();
        for alpha in &positive_roots {
            let mut k = 1i64;
            loop {
                let shifted = {
                    let mut coords = mu.0.clone();
                    for (j, c) in coords.iter_mut().enumerate() {
                        *c += k * alpha.0[j];
                    }
                    Weight(coords)
                };
                // Outside the hull the multiplicity is zero; stop once the
                // shifted weight leaves the candidate set.
                let Some(m) = lookup_orbit_mult(&shifted, rs, &mults, lambda) else {
                    break;
                };
                if !m.is_zero() {
                    rhs += rs.inner_product(&shifted, alpha) * BigRational::from(m);
                }
                k += 1;
            }
        }
        let value = rhs * BigRational::from(BigInt::from(2)) / denom;
        assert!(value.denom().is_one(), "Freudenthal multiplicity must be integral");
        mults.insert(mu.clone(), value.numer().clone());
    }
    let mut out = BTreeMap::new();
    for (w, m) in mults {
        assert!(!m.is_negative());
        if !m.is_zero() {
            let m_u64 = u64::try_from(m).expect("multiplicity fits in u64");
            out.insert(w, m_u64);
        }
    }
    Ok(Character { mults: out })
}

fn lookup_orbit_mult(
    w: &Weight,
    rs: &RootSystem,
    mults: &BTreeMap<Weight, BigInt>,
    lambda: &Weight,
) -> Option<BigInt> {
    let dom = w.dominant_representative(rs);
    if !dominance_leq(&dom, lambda, rs) {
        return None;
    }
    Some(mults.get(&dom).cloned().unwrap_or_else(BigInt::zero))
}

/// Dimension of `Δ(λ)` by the Weyl dimension formula.
pub fn weyl_dimension(lambda: &Weight, rs: &RootSystem) -> Result<u64> {
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(format!("{lambda}")));
    }
    let rho = rs.rho();
    let lam_rho = lambda + &rho;
    let mut val = BigRational::one();
    for c in rs.positive_roots() {
        let alpha = rs.root_to_weight(c);
        val *= rs.inner_product(&lam_rho, &alpha) / rs.inner_product(&rho, &alpha);
    }
    assert!(val.denom().is_one());
    Ok(u64::try_from(val.numer().clone()).expect("dimension fits in u64"))
}

/// Number of ways to write `μ` (root coordinates) as a nonnegative integer
/// combination of positive roots.
pub fn kostant_partition(rs: &RootSystem, mu_root_coords: &[i64]) -> u64 {
    fn rec(
        roots: &[Vec<i64>],
        idx: usize,
        target: &Vec<i64>,
        memo: &mut HashMap<(usize, Vec<i64>), u64>,
    ) -> u64 {
        if target.iter().all(|&x| x == 0) {
            return 1;
        }
        if idx == roots.len() {
            return 0;
        }
        if target.iter().any(|&x| x < 0) {
            return 0;
        }
        if let Some(&hit) = memo.get(&(idx, target.clone())) {
            return hit;
        }
        let mut total = 0;
        let mut t = target.clone();
        loop {
            total += rec(roots, idx + 1, &t, memo);
            if t.iter().zip(&roots[idx]).any(|(a, b)| a < b) {
                break;
            }
            for (a, b) in t.iter_mut().zip(&roots[idx]) {
                *a -= b;
            }
        }
        memo.insert((idx, target.clone()), total);
        total
    }
    if mu_root_coords.iter().any(|&x| x < 0) {
        return 0;
    }
    let mut memo = HashMap::new();
    rec(rs.positive_roots(), 0, &mu_root_coords.to_vec(), &mut memo)
}

/// Weyl-character multiplicities by the alternating Weyl sum
/// `m_μ = Σ_w (−1)^w P(w(λ+ρ) − (μ+ρ))`. Exponential in the Weyl group;
/// intended as an independent cross-check at rank ≤ 2.
pub fn weyl_character_alternating(lambda: &Weight, rs: &RootSystem) -> Result<Character> {
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(format!("{lambda}")));
    }
    let group = weyl_group_elements(rs);
    let rho = rs.rho();
    let lam_rho = lambda + &rho;
    let support = candidate_support(lambda, rs)?;
    let mut out = BTreeMap::new();
    for mu in support {
        let mu_rho = &mu + &rho;
        let mut acc: i64 = 0;
        for (mat, sign) in &group {
            let moved = apply_matrix(mat, &lam_rho);
            let diff = &moved - &mu_rho;
            if let Some(c) = rs.root_coordinates(&diff) {
                acc += sign * kostant_partition(rs, &c) as i64;
            }
        }
        assert!(acc >= 0, "alternating sum must be nonnegative");
        if acc > 0 {
            out.insert(mu, acc as u64);
        }
    }
    Ok(Character { mults: out })
}

/// All Weyl-group elements as matrices on weight coordinates, with signs.
fn weyl_group_elements(rs: &RootSystem) -> Vec<(Vec<Vec<i64>>, i64)> {
    let n = rs.rank();
    let id: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    // s_i = I − α_i ⊗ e_iᵀ acting on weight coordinates.
    let gens: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|i| {
            let mut m = id.clone();
            for j in 0..n {
                m[j][i] -= rs.cartan()[i][j];
            }
            m
        })
        .collect();
    let mut elems = vec![(id.clone(), 1i64)];
    let mut frontier = vec![(id, 1i64)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (m, s) in &frontier {
            for g in &gens {
                let prod = mat_mul(g, m);
                if !elems.iter().any(|(e, _)| e == &prod) {
                    let item = (prod, -s);
                    elems.push(item.clone());
                    next.push(item);
                }
            }
        }
        frontier = next;
    }
    elems
}

fn mat_mul(a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn apply_matrix(m: &Vec<Vec<i64>>, w: &Weight) -> Weight {
    let n = w.rank();
    Weight(
        (0..n)
            .map(|i| (0..n).map(|j| m[i][j] * w.0[j]).sum())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::super::system::RootSystemSpec;
    use super::*;

    fn rs(label: &str) -> RootSystem {
        RootSystem::new(RootSystemSpec::Label(label.into())).unwrap()
    }

    #[test]
    fn candidate_support_a1() {
        let a1 = rs("A1");
        let supp = candidate_support(&Weight(vec![2]), &a1).unwrap();
        assert_eq!(supp, vec![Weight(vec![2]), Weight(vec![0]), Weight(vec![-2])]);
        let supp = candidate_support(&Weight(vec![3]), &a1).unwrap();
        assert_eq!(
            supp,
            vec![Weight(vec![3]), Weight(vec![1]), Weight(vec![-1]), Weight(vec![-3])]
        );
    }

    #[test]
    fn candidate_support_a2_adjoint() {
        let a2 = rs("A2");
        let supp = candidate_support(&Weight(vec![1, 1]), &a2).unwrap();
        assert_eq!(supp.len(), 7);
        let zero_pos = supp.iter().position(|w| w == &Weight(vec![0, 0])).unwrap();
        let m_alpha1 = supp.iter().position(|w| w == &Weight(vec![-1, 2])).unwrap();
        let m_alpha2 = supp.iter().position(|w| w == &Weight(vec![2, -1])).unwrap();
        assert!(zero_pos > m_alpha1 && zero_pos > m_alpha2);
        // Topological: every ν > μ precedes μ.
        for (i, mu) in supp.iter().enumerate() {
            for nu in supp.iter().skip(i + 1) {
                assert!(!dominance_leq(mu, nu, &a2) || mu == nu);
            }
        }
    }

    #[test]
    fn weyl_character_a1() {
        let a1 = rs("A1");
        let ch = weyl_character(&Weight(vec![3]), &a1).unwrap();
        for w in [3, 1, -1, -3] {
            assert_eq!(ch.mult(&Weight(vec![w])), 1);
        }
        assert_eq!(ch.dim(), 4);
    }

    #[test]
    fn weyl_character_a2_standard_and_adjoint() {
        let a2 = rs("A2");
        let std = weyl_character(&Weight(vec![1, 0]), &a2).unwrap();
        assert_eq!(std.dim(), 3);
        assert!(std.mults.values().all(|&m| m == 1));
        let adj = weyl_character(&Weight(vec![1, 1]), &a2).unwrap();
        assert_eq!(adj.dim(), 8);
        assert_eq!(adj.mult(&Weight(vec![0, 0])), 2);
    }

    #[test]
    fn trivial_character() {
        let a2 = rs("A2");
        let ch = weyl_character(&Weight(vec![0, 0]), &a2).unwrap();
        assert_eq!(ch.dim(), 1);
        assert_eq!(ch.mult(&Weight(vec![0, 0])), 1);
    }

    #[test]
    fn dimension_formula_matches_character() {
        for label in ["A1", "A1xA1", "A2", "B2", "G2"] {
            let r = rs(label);
            let range: Vec<Vec<i64>> = if r.rank() == 1 {
                (0..=4).map(|a| vec![a]).collect()
            } else {
                (0..=3)
                    .flat_map(|a| (0..=3).map(move |b| vec![a, b]))
                    .collect()
            };
            for coords in range {
                let lam = Weight(coords);
                let ch = weyl_character(&lam, &r).unwrap();
                assert_eq!(ch.dim(), weyl_dimension(&lam, &r).unwrap(), "{label} {lam}");
            }
        }
    }

    #[test]
    fn freudenthal_matches_alternating_sum() {
        for (label, coords) in [
            ("A1", vec![vec![4]]),
            ("A2", vec![vec![1, 1], vec![2, 1]]),
            ("B2", vec![vec![1, 1], vec![0, 2]]),
            ("G2", vec![vec![1, 0], vec![0, 1]]),
        ] {
            let r = rs(label);
            for c in coords {
                let lam = Weight(c);
                let a = weyl_character(&lam, &r).unwrap();
                let b = weyl_character_alternating(&lam, &r).unwrap();
                assert_eq!(a, b, "{label} {lam}");
            }
        }
    }

    #[test]
    fn characters_are_weyl_invariant() {
        let b2 = rs("B2");
        let ch = weyl_character(&Weight(vec![2, 1]), &b2).unwrap();
        for (w, m) in &ch.mults {
            for i in 0..2 {
                assert_eq!(ch.mult(&w.reflect(&b2, i)), *m);
            }
        }
        // Multiplicity 1 on the orbit of λ.
        assert_eq!(ch.mult(&Weight(vec![2, 1])), 1);
    }

    #[test]
    fn support_contained_in_candidates() {
        let g2 = rs("G2");
        let lam = Weight(vec![1, 1]);
        let supp = candidate_support(&lam, &g2).unwrap();
        let ch = weyl_character(&lam, &g2).unwrap();
        for w in ch.support() {
            assert!(supp.contains(w));
        }
    }
}
