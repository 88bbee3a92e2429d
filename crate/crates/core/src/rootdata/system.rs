//! Cartan data of a finite root system, with symmetrizer and positive roots.

use super::weight::Weight;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// How a root system is specified externally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSystemSpec {
    /// One of `A1`, `A1xA1`, `A2`, `B2`, `G2`.
    Label(String),
    /// A raw Cartan matrix `(⟨α_i, α_j∨⟩)`.
    Cartan(Vec<Vec<i64>>),
}

/// A finite root system: Cartan matrix `A_{ij} = ⟨α_i, α_j∨⟩`, symmetrizer
/// `d` with entries in {1,2,3}, and derived combinatorial data.
///
/// The simple root `α_i` has weight coordinates given by row `i` of `A`.
#[derive(Clone, Debug)]
pub struct RootSystem {
    label: String,
    cartan: Vec<Vec<i64>>,
    sym: Vec<i64>,
    /// Half root lengths `(α_i, α_i)/2`, normalized to minimal value 1 per
    /// component; these drive the invariant bilinear form. (The operator
    /// symmetrizer `sym` is the transposed-matrix counterpart and the two
    /// differ on non-simply-laced systems.)
    geom: Vec<i64>,
    /// Positive roots in simple-root coordinates.
    positive_roots: Vec<Vec<i64>>,
    /// Inverse of `Aᵀ`, for converting weight coordinates to root coordinates.
    cartan_t_inv: Vec<Vec<BigRational>>,
    has_g2_component: bool,
}

impl RootSystem {
    pub fn new(spec: RootSystemSpec) -> Result<Self> {
        let (label, cartan) = match spec {
            RootSystemSpec::Label(name) => {
                let a: Vec<Vec<i64>> = match name.as_str() {
                    "A1" => vec![vec![2]],
                    "A1xA1" => vec![vec![2, 0], vec![0, 2]],
                    "A2" => vec![vec![2, -1], vec![-1, 2]],
                    "B2" => vec![vec![2, -1], vec![-2, 2]],
                    "G2" => vec![vec![2, -1], vec![-3, 2]],
                    _ => {
                        return Err(Error::InvalidRootSystem(format!(
                            "unknown label '{name}' (expected A1, A1xA1, A2, B2, G2)"
                        )))
                    }
                };
                (name, a)
            }
            RootSystemSpec::Cartan(a) => ("custom".to_string(), a),
        };
        let n = cartan.len();
        if n == 0 || cartan.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidRootSystem("Cartan matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            if cartan[i][i] != 2 {
                return Err(Error::InvalidRootSystem("diagonal entries must be 2".into()));
            }
            for j in 0..n {
                if i != j {
                    if cartan[i][j] > 0 {
                        return Err(Error::InvalidRootSystem("off-diagonal entries must be ≤ 0".into()));
                    }
                    if (cartan[i][j] == 0) != (cartan[j][i] == 0) {
                        return Err(Error::InvalidRootSystem("zero pattern must be symmetric".into()));
                    }
                }
            }
        }
        let sym = symmetrizer(&cartan, false)?;
        let geom = symmetrizer(&cartan, true)?;
        // Finite type: the symmetrized matrix must be positive definite.
        check_positive_definite(&cartan, &sym)?;
        let has_g2 = (0..n).any(|i| {
            (0..n).any(|j| i != j && cartan[i][j] * cartan[j][i] == 3)
        });
        let cartan_t_inv = invert_transpose(&cartan)?;
        let positive_roots = enumerate_positive_roots(&cartan);
        Ok(RootSystem {
            label,
            cartan,
            sym,
            geom,
            positive_roots,
            cartan_t_inv,
            has_g2_component: has_g2,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &Vec<Vec<i64>> {
        &self.cartan
    }

    /// Symmetrizer `d` with `d_i A_{ij}` symmetric, entries in {1,2,3};
    /// used in all quantum-binomial coefficients of the operator calculus.
    pub fn symmetrizer(&self) -> &[i64] {
        &self.sym
    }

    /// Half root lengths `(α_i, α_i)/2` of the invariant form.
    pub fn root_lengths(&self) -> &[i64] {
        &self.geom
    }

    pub fn has_g2_component(&self) -> bool {
        self.has_g2_component
    }

    /// `ρ`: all fundamental coordinates 1.
    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank()])
    }

    /// Positive roots in simple-root coordinates.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    /// Weight coordinates of a vector given in simple-root coordinates.
    pub fn root_to_weight(&self, c: &[i64]) -> Weight {
        let n = self.rank();
        let mut out = vec![0i64; n];
        for (i, ci) in c.iter().enumerate() {
            for j in 0..n {
                out[j] += ci * self.cartan[i][j];
            }
        }
        Weight(out)
    }

    /// Simple-root coordinates of a weight, when integral: solves `Aᵀ c = μ`.
    pub fn root_coordinates(&self, mu: &Weight) -> Option<Vec<i64>> {
        let n = self.rank();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = BigRational::zero();
            for j in 0..n {
                acc += &self.cartan_t_inv[i][j] * BigRational::from(BigInt::from(mu.0[j]));
            }
            if !acc.denom().is_one() {
                return None;
            }
            let v: BigInt = acc.numer().clone();
            let v_i64 = i64::try_from(v).ok()?;
            out.push(v_i64);
        }
        Some(out)
    }

    /// Height of a root-lattice element (sum of simple-root coordinates).
    pub fn height(&self, mu: &Weight) -> Option<i64> {
        self.root_coordinates(mu).map(|c| c.iter().sum())
    }

    /// The invariant symmetric bilinear form `(μ, ν)`, normalized so that
    /// short roots in each component satisfy `(α, α) = 2`.
    pub fn inner_product(&self, mu: &Weight, nu: &Weight) -> BigRational {
        // (μ, ν) = Σ_j c_j d_j ⟨μ, α_j∨⟩ where ν = Σ c_j α_j.
        let n = self.rank();
        let mut acc = BigRational::zero();
        for j in 0..n {
            let mut cj = BigRational::zero();
            for k in 0..n {
                cj += &self.cartan_t_inv[j][k] * BigRational::from(BigInt::from(nu.0[k]));
            }
            acc += cj * BigRational::from(BigInt::from(self.geom[j] * mu.0[j]));
        }
        acc
    }
}

fn symmetrizer(a: &Vec<Vec<i64>>, transpose: bool) -> Result<Vec<i64>> {
    let n = a.len();
    // Propagate d along edges of each component, then scale to minimal
    // positive integers. With `transpose` the ratios invert, giving the
    // symmetrizer of Aᵀ (the geometric root lengths).
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(BigRational::one());
        let mut stack = vec![start];
        let mut component = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i != j && a[i][j] != 0 && d[j].is_none() {
                    // d_i A_{ij} = d_j A_{ji} (or the transposed relation)
                    let ratio = if transpose {
                        BigRational::new(BigInt::from(a[j][i]), BigInt::from(a[i][j]))
                    } else {
                        BigRational::new(BigInt::from(a[i][j]), BigInt::from(a[j][i]))
                    };
                    d[j] = Some(d[i].clone().unwrap() * ratio);
                    stack.push(j);
                    component.push(j);
                }
            }
        }
        // Scale the component so the minimum is 1.
        let min = component
            .iter()
            .map(|&i| d[i].clone().unwrap())
            .min()
            .unwrap();
        for &i in &component {
            let v = d[i].clone().unwrap() / min.clone();
            d[i] = Some(v);
        }
    }
    let mut out = Vec::with_capacity(n);
    for (i, v) in d.into_iter().enumerate() {
        let v = v.unwrap();
        if !v.denom().is_one() || v.numer() <= &BigInt::zero() {
            return Err(Error::InvalidRootSystem(format!(
                "no integral symmetrizer at node {i}"
            )));
        }
        let vi = i64::try_from(v.numer().clone())
            .map_err(|_| Error::InvalidRootSystem("symmetrizer overflow".into()))?;
        if !(1..=3).contains(&vi) {
            return Err(Error::InvalidRootSystem(format!(
                "symmetrizer entry {vi} outside {{1,2,3}}"
            )));
        }
        out.push(vi);
    }
    // Cross-check symmetry.
    for i in 0..n {
        for j in 0..n {
            let ok = if transpose {
                out[j] * a[i][j] == out[i] * a[j][i]
            } else {
                out[i] * a[i][j] == out[j] * a[j][i]
            };
            if !ok {
                return Err(Error::InvalidRootSystem("Cartan matrix is not symmetrizable".into()));
            }
        }
    }
    Ok(out)
}

fn check_positive_definite(a: &Vec<Vec<i64>>, d: &[i64]) -> Result<()> {
    // Leading principal minors of (d_i A_{ij}) must be positive.
    let n = a.len();
    for k in 1..=n {
        let mut m: Vec<Vec<BigRational>> = (0..k)
            .map(|i| (0..k).map(|j| BigRational::from(BigInt::from(d[i] * a[i][j]))).collect())
            .collect();
        let det = det_rational(&mut m);
        if det <= BigRational::zero() {
            return Err(Error::InvalidRootSystem(
                "Cartan matrix is not of finite type".into(),
            ));
        }
    }
    Ok(())
}

fn det_rational(m: &mut Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { return BigRational::zero() };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

fn invert_transpose(a: &Vec<Vec<i64>>) -> Result<Vec<Vec<BigRational>>> {
    // Gauss-Jordan on Aᵀ augmented with I.
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from(BigInt::from(a[j][i])))
                .chain((0..n).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::InvalidRootSystem("singular Cartan matrix".into()))?;
        m.swap(pivot, col);
        let pv = m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] / &pv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Height-by-height closure for positive roots of a finite Cartan matrix.
fn enumerate_positive_roots(a: &Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut roots: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut c = vec![0i64; n];
            c[i] = 1;
            c
        })
        .collect();
    while !current.is_empty() {
        roots.extend(current.iter().cloned());
        let mut next: Vec<Vec<i64>> = Vec::new();
        for beta in &current {
            for i in 0..n {
                // ⟨β, α_i∨⟩ = Σ_k β_k A_{ki}
                let pairing: i64 = (0..n).map(|k| beta[k] * a[k][i]).sum();
                // Length q of the descending α_i-string from β inside the roots found so far.
                let mut q = 0i64;
                let mut probe = beta.clone();
                loop {
                    probe[i] -= 1;
                    if probe.iter().all(|&x| x == 0) || roots.contains(&probe) {
                        if probe.iter().all(|&x| x == 0) {
                            break;
                        }
                        q += 1;
                    } else {
                        break;
                    }
                }
                if q - pairing > 0 {
                    let mut gamma = beta.clone();
                    gamma[i] += 1;
                    if !roots.contains(&gamma) && !next.contains(&gamma) {
                        next.push(gamma);
                    }
                }
            }
        }
        current = next;
    }
    roots.sort();
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        let a1 = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
        assert_eq!(a1.cartan(), &vec![vec![2]]);
        assert_eq!(a1.symmetrizer(), &[1]);

        let a2 = RootSystem::new(RootSystemSpec::Label("A2".into())).unwrap();
        assert_eq!(a2.cartan(), &vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(a2.symmetrizer(), &[1, 1]);

        let g2 = RootSystem::new(RootSystemSpec::Label("G2".into())).unwrap();
        assert!(g2.symmetrizer().contains(&3));
        assert!(g2.symmetrizer().contains(&1));
        assert!(g2.has_g2_component());

        let b2 = RootSystem::new(RootSystemSpec::Label("B2".into())).unwrap();
        assert_eq!(b2.symmetrizer(), &[2, 1]);
        assert!(!b2.has_g2_component());
    }

    #[test]
    fn rejects_non_finite_type() {
        // Affine A1: not positive definite.
        let res = RootSystem::new(RootSystemSpec::Cartan(vec![vec![2, -2], vec![-2, 2]]));
        assert!(res.is_err());
        let res = RootSystem::new(RootSystemSpec::Cartan(vec![vec![2, -1], vec![-5, 2]]));
        assert!(res.is_err());
    }

    #[test]
    fn positive_root_counts() {
        for (label, count) in [("A1", 1), ("A1xA1", 2), ("A2", 3), ("B2", 4), ("G2", 6)] {
            let rs = RootSystem::new(RootSystemSpec::Label(label.into())).unwrap();
            assert_eq!(rs.positive_roots().len(), count, "{label}");
        }
    }

    #[test]
    fn root_coordinate_round_trip() {
        let rs = RootSystem::new(RootSystemSpec::Label("B2".into())).unwrap();
        for c in rs.positive_roots() {
            let w = rs.root_to_weight(c);
            assert_eq!(rs.root_coordinates(&w).unwrap(), *c);
        }
        // ϖ₁ is not in the root lattice of B2? (ϖ₁ = α₁ + α₂ actually is.)
        // Use A2 where fundamental weights are not in the root lattice.
        let a2 = RootSystem::new(RootSystemSpec::Label("A2".into())).unwrap();
        assert!(a2.root_coordinates(&Weight(vec![1, 0])).is_none());
    }

    #[test]
    fn inner_products() {
        let rs = RootSystem::new(RootSystemSpec::Label("G2".into())).unwrap();
        // (α_i, α_i) = 2 d_i
        for i in 0..2 {
            let alpha = rs.root_to_weight(&{
                let mut c = vec![0; 2];
                c[i] = 1;
                c
            });
            assert_eq!(
                rs.inner_product(&alpha, &alpha),
                BigRational::from(BigInt::from(2 * rs.root_lengths()[i]))
            );
        }
    }
}
