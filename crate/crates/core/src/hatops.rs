//! The hat-space calculus: assembling `Ê_μ` from the stratum above `μ`, plus
//! symbolic self-tests of the divided-power commutation identities.

use crate::lattice::QvMatrix;
use crate::qring::{quantum_binomial, quantum_factorial, quantum_integer, LaurentPoly, RingFrac};
use crate::rootdata::Weight;
use crate::xobj::{assemble_delta, DeltaBlock, GradedObject};

/// The hat space at `μ`: the free module `Ŵ_μ = ⊕ M_{μ+nβ}` (same graded
/// pieces as `M_δμ`, in the same block order) together with the assembled
/// map `Ê_μ: Ŵ_μ → M_δμ`. The map `F̂_μ` is the identity block assembly and
/// is not stored.
#[derive(Clone, Debug)]
pub struct HatSpace {
    pub mu: Weight,
    pub blocks: Vec<DeltaBlock>,
    pub dim: usize,
    pub ehat: QvMatrix,
}

/// Assembles the hat space at `μ` by the defining block formulas:
/// the block `(α,m') ← (β,n)` is `F_{β,n} E_{α,m'}` for `α ≠ β` and
/// `Σ_r ⟦⟨μ,α∨⟩+n+m' over r⟧_{d_α} F_{α,n−r} E_{α,m'−r}` for `α = β`,
/// with all operators taken from the strata above `μ`.
pub fn build_hat(m: &GradedObject, mu: &Weight) -> HatSpace {
    let delta = assemble_delta(m, mu);
    let mut ehat = QvMatrix::zero(delta.dim, delta.dim);
    for src in &delta.blocks {
        let col_block = hat_column_block_direct(m, mu, &delta.blocks, src);
        write_block_column(&mut ehat, &col_block, src);
    }
    HatSpace { mu: mu.clone(), blocks: delta.blocks, dim: delta.dim, ehat }
}

/// Assembles the hat space through the divided-power recursion
/// `Ê(β,n) = (1/[n]) · Ê(β,1) ∘ F_{μ+β,β,n−1}`, valid when the strata above
/// `μ` carry the operator calculus of an honest module (true for every
/// object this engine constructs). Output equals [`build_hat`].
pub fn build_hat_fast(m: &GradedObject, mu: &Weight) -> HatSpace {
    let heads = HatHeads::new(m, mu);
    let mut ehat = QvMatrix::zero(heads.dim, heads.dim);
    for src in heads.blocks.clone() {
        let col = heads.column_block(m, src.alpha, src.n);
        write_block_column(&mut ehat, &col, &src);
    }
    HatSpace { mu: mu.clone(), blocks: heads.blocks, dim: heads.dim, ehat }
}

/// One block column of `Ê_μ` (all targets, one source `(β,n)`), assembled by
/// the defining formula.
fn hat_column_block_direct(
    m: &GradedObject,
    mu: &Weight,
    blocks: &[DeltaBlock],
    src: &DeltaBlock,
) -> QvMatrix {
    let rs = m.rs();
    let dim: usize = blocks.iter().map(|b| b.rank).sum();
    let (beta, n) = (src.alpha, src.n);
    let src_w = mu.add_root(rs, beta, n as i64);
    let mut out = QvMatrix::zero(dim, src.rank);
    for tgt in blocks {
        let (alpha, mm) = (tgt.alpha, tgt.n);
        let tgt_w = mu.add_root(rs, alpha, mm as i64);
        let block = if alpha != beta {
            // F_{β,n} E_{α,m'}: M_{μ+nβ} → M_{μ+nβ+m'α} → M_{μ+m'α}
            m.f_op(&tgt_w, beta, n).mul(&m.e_op(&src_w, alpha, mm))
        } else {
            let d = rs.symmetrizer()[alpha] as u32;
            let z = mu.pairing(alpha) + n as i64 + mm as i64;
            let mut acc = QvMatrix::zero(tgt.rank, src.rank);
            for r in 0..=mm.min(n) {
                let coeff = RingFrac::from_poly(quantum_binomial(z, r, d));
                if coeff.is_zero() {
                    continue;
                }
                let e = m.e_op(&src_w, alpha, mm - r);
                let f = m.f_op(&tgt_w, alpha, n - r);
                acc = acc.add(&f.mul(&e).scale(&coeff));
            }
            acc
        };
        for i in 0..tgt.rank {
            for j in 0..src.rank {
                out[(tgt.offset + i, j)] = block[(i, j)].clone();
            }
        }
    }
    out
}

fn write_block_column(ehat: &mut QvMatrix, col: &QvMatrix, src: &DeltaBlock) {
    for i in 0..col.rows() {
        for j in 0..src.rank {
            ehat[(i, src.offset + j)] = col[(i, j)].clone();
        }
    }
}

/// The map `φ: Ŵ_μ → M_μ` (row vector of the `F_{μ,α,n}`), defined when
/// `M_μ` is populated. Its image equals `im F_μ` and its kernel equals
/// `ker Ê_μ`.
pub fn phi(m: &GradedObject, mu: &Weight) -> QvMatrix {
    assemble_delta(m, mu).f_mu
}

/// The `(β,1)` column blocks of `Ê_μ` ("heads"), from which every other
/// column block follows by the divided-power recursion. The concatenation of
/// the heads spans the full column space of the fast hat assembly.
pub struct HatHeads {
    pub mu: Weight,
    pub blocks: Vec<DeltaBlock>,
    pub dim: usize,
    /// `heads[β]` is the `(β,1)` column block (`dim × rank(μ+β)`).
    pub heads: Vec<Option<QvMatrix>>,
    /// Directly assembled blocks `(β, n ≥ 2)` whose `(β,1)` stratum is
    /// empty, where the recursion has no head to factor through.
    pub direct_blocks: Vec<(usize, u32, QvMatrix)>,
}

impl HatHeads {
    pub fn new(m: &GradedObject, mu: &Weight) -> Self {
        let delta = assemble_delta(m, mu);
        let mut heads: Vec<Option<QvMatrix>> = vec![None; m.rs().rank()];
        for src in delta.blocks.iter().filter(|b| b.n == 1) {
            heads[src.alpha] = Some(hat_column_block_direct(m, mu, &delta.blocks, src));
        }
        let mut direct_blocks = Vec::new();
        for src in delta.blocks.iter().filter(|b| b.n >= 2) {
            if heads[src.alpha].is_none() {
                direct_blocks.push((
                    src.alpha,
                    src.n,
                    hat_column_block_direct(m, mu, &delta.blocks, src),
                ));
            }
        }
        HatHeads { mu: mu.clone(), blocks: delta.blocks, dim: delta.dim, heads, direct_blocks }
    }

    /// The full column block `(β, n)` (`dim × rank(μ+nβ)`).
    pub fn column_block(&self, m: &GradedObject, beta: usize, n: u32) -> QvMatrix {
        if let Some((_, _, blk)) =
            self.direct_blocks.iter().find(|(b, k, _)| *b == beta && *k == n)
        {
            return blk.clone();
        }
        let head = self.heads[beta].as_ref().expect("head exists for populated blocks");
        if n == 1 {
            return head.clone();
        }
        let d = m.rs().symmetrizer()[beta] as u32;
        let mid = self.mu.add_root(m.rs(), beta, 1);
        let f_step = m.f_op(&mid, beta, n - 1);
        let inv_qn = RingFrac::from_poly(quantum_integer(n as i64, d)).inv();
        head.mul(&f_step).scale(&inv_qn)
    }

    /// A single ambient column of `Ê_μ`.
    pub fn column(&self, m: &GradedObject, ambient_col: usize) -> Vec<RingFrac> {
        let blk = self
            .blocks
            .iter()
            .find(|b| ambient_col >= b.offset && ambient_col < b.offset + b.rank)
            .expect("column inside a block");
        let local = ambient_col - blk.offset;
        let cb = self.column_block(m, blk.alpha, blk.n);
        cb.column(local)
    }

    /// The selected rows of `Ê_μ` as a `rows.len() × dim` matrix, assembled
    /// block column by block column.
    pub fn rows(&self, m: &GradedObject, rows: &[usize]) -> QvMatrix {
        let mut out = QvMatrix::zero(rows.len(), self.dim);
        for blk in &self.blocks {
            let seg = if let Some((_, _, direct)) = self
                .direct_blocks
                .iter()
                .find(|(b, k, _)| *b == blk.alpha && *k == blk.n)
            {
                let mut s = QvMatrix::zero(rows.len(), blk.rank);
                for (i, &ri) in rows.iter().enumerate() {
                    for j in 0..blk.rank {
                        s[(i, j)] = direct[(ri, j)].clone();
                    }
                }
                s
            } else {
                let head = self.heads[blk.alpha].as_ref().expect("head exists");
                let mut hrows = QvMatrix::zero(rows.len(), head.cols());
                for (i, &ri) in rows.iter().enumerate() {
                    for j in 0..head.cols() {
                        hrows[(i, j)] = head[(ri, j)].clone();
                    }
                }
                if blk.n == 1 {
                    hrows
                } else {
                    let d = m.rs().symmetrizer()[blk.alpha] as u32;
                    let mid = self.mu.add_root(m.rs(), blk.alpha, 1);
                    let f_step = m.f_op(&mid, blk.alpha, blk.n - 1);
                    let inv_qn = RingFrac::from_poly(quantum_integer(blk.n as i64, d)).inv();
                    hrows.mul(&f_step).scale(&inv_qn)
                }
            };
            for i in 0..rows.len() {
                for j in 0..blk.rank {
                    out[(i, blk.offset + j)] = seg[(i, j)].clone();
                }
            }
        }
        out
    }

    /// Rank over `ℚ(v)` of the fast hat assembly: every column block factors
    /// through a head (or is one of the directly assembled gap blocks).
    pub fn column_rank(&self) -> usize {
        let mut pieces: Vec<&QvMatrix> = self.heads.iter().flatten().collect();
        for (_, _, b) in &self.direct_blocks {
            pieces.push(b);
        }
        if pieces.is_empty() {
            return 0;
        }
        let mut concat = pieces[0].clone();
        for h in &pieces[1..] {
            concat = concat.hstack(h);
        }
        concat.rank()
    }
}

/// Checks the identity
/// `[a]⟦b over c⟧ = [a−c]⟦b−1 over c⟧ + [a+b−c]⟦b−1 over c−1⟧`
/// as Laurent polynomials.
pub fn verify_easypeasy(a: i64, b: i64, c: u32, d: u32) -> bool {
    let lhs = &quantum_integer(a, d) * &quantum_binomial(b, c, d);
    let t1 = &quantum_integer(a - c as i64, d) * &quantum_binomial(b - 1, c, d);
    let t2 = if c == 0 {
        LaurentPoly::zero()
    } else {
        &quantum_integer(a + b - c as i64, d) * &quantum_binomial(b - 1, c - 1, d)
    };
    lhs == &t1 + &t2
}

/// Checks the commutation identity
/// `e^m f^n |_{M_{l+2n}} = Σ_r ([m]![n]!/([m−r]![n−r]!)) ⟦l+m+n over r⟧ f^{n−r} e^{m−r}`
/// on a window of a generic graded string: `f` shifts down the string and
/// `e w_j = c_j w_{j−1}` with `c_{j+1} − c_j = [deg w_j]_d` and a free
/// parameter `c_0 = s`. Sweeping `s` over `m+1` rational values makes the
/// check a proof on all modules satisfying the commutator rule.
pub fn verify_comrel(m: u32, n: u32, l: i64, d: u32, depth: usize) -> bool {
    let window = depth.max((m + n + 1) as usize);
    let pos = m as usize; // index of the vector in M_{l+2n}
    let top_deg = l + 2 * n as i64 + 2 * m as i64; // degree of w_0
    for s in 0..=m as i64 {
        if !comrel_on_string(m, n, l, d, window, pos, top_deg, s) {
            return false;
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn comrel_on_string(
    m: u32,
    n: u32,
    l: i64,
    d: u32,
    window: usize,
    pos: usize,
    top_deg: i64,
    s: i64,
) -> bool {
    // e, f as window × window matrices.
    let mut f = QvMatrix::zero(window, window);
    for j in 0..window - 1 {
        f[(j + 1, j)] = RingFrac::one();
    }
    let mut e = QvMatrix::zero(window, window);
    let mut c = RingFrac::from_int(s);
    for j in 1..window {
        // c_j = c_{j−1} + [deg w_{j−1}]_d
        let deg = top_deg - 2 * (j as i64 - 1);
        c = &c + &RingFrac::from_poly(quantum_integer(deg, d));
        e[(j - 1, j)] = c.clone();
    }
    let mut w = vec![RingFrac::zero(); window];
    w[pos] = RingFrac::one();
    // LHS: e^m f^n w
    let mut lhs = w.clone();
    for _ in 0..n {
        lhs = f.mul_vec(&lhs);
    }
    for _ in 0..m {
        lhs = e.mul_vec(&lhs);
    }
    // RHS: Σ_r [m]![n]!/([m−r]![n−r]!) ⟦l+m+n over r⟧ f^{n−r} e^{m−r} w
    let mut rhs = vec![RingFrac::zero(); window];
    for r in 0..=m.min(n) {
        let num = &quantum_factorial(m, d) * &quantum_factorial(n, d);
        let den = &quantum_factorial(m - r, d) * &quantum_factorial(n - r, d);
        let scalar = &RingFrac::from_poly(&num * &quantum_binomial(l + m as i64 + n as i64, r, d))
            / &RingFrac::from_poly(den);
        let mut t = w.clone();
        for _ in 0..(m - r) {
            t = e.mul_vec(&t);
        }
        for _ in 0..(n - r) {
            t = f.mul_vec(&t);
        }
        for (acc, x) in rhs.iter_mut().zip(&t) {
            *acc = &*acc + &(x * &scalar);
        }
    }
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qring::PrimeConfig;
    use crate::xobj::test_support::weyl_string_a1;

    #[test]
    fn easypeasy_examples() {
        assert!(verify_easypeasy(1, 1, 1, 1));
        assert!(verify_easypeasy(3, 4, 2, 1));
        assert!(verify_easypeasy(-2, 5, 3, 2));
    }

    #[test]
    fn comrel_base_case_and_examples() {
        for l in -4..=4 {
            assert!(verify_comrel(1, 1, l, 1, 4));
        }
        assert!(verify_comrel(1, 2, 0, 1, 5));
        assert!(verify_comrel(2, 2, 3, 2, 6));
    }

    #[test]
    fn comrel_detects_wrong_coefficient() {
        // Perturb the identity: using ⟦l+m+n+1 over r⟧ must fail for some case.
        // Simulate by checking the identity at a shifted l and comparing.
        let ok = verify_comrel(2, 1, 3, 1, 5);
        assert!(ok);
        // The identity with mismatched l fails on the string model.
        assert!(!comrel_mismatch_probe());
    }

    fn comrel_mismatch_probe() -> bool {
        // e f on M_{l+2} with the coefficient of the wrong level l+1.
        let (m, n, l, d) = (1u32, 1u32, 2i64, 1u32);
        let window = 4;
        let pos = m as usize;
        let top_deg = l + 2 * n as i64 + 2 * m as i64;
        // Reuse the string but check against the l+1 coefficient.
        let mut f = QvMatrix::zero(window, window);
        for j in 0..window - 1 {
            f[(j + 1, j)] = RingFrac::one();
        }
        let mut e = QvMatrix::zero(window, window);
        let mut c = RingFrac::from_int(1);
        for j in 1..window {
            let deg = top_deg - 2 * (j as i64 - 1);
            c = &c + &RingFrac::from_poly(quantum_integer(deg, d));
            e[(j - 1, j)] = c.clone();
        }
        let mut w = vec![RingFrac::zero(); window];
        w[pos] = RingFrac::one();
        let lhs = e.mul_vec(&f.mul_vec(&w));
        // Wrong RHS: f e + [l+1+2]·id instead of [l+2].
        let mut rhs = f.mul_vec(&e.mul_vec(&w));
        let wrong = RingFrac::from_poly(quantum_integer(l + 3, d));
        for (acc, x) in rhs.iter_mut().zip(&w) {
            *acc = &*acc + &(x * &wrong);
        }
        lhs == rhs
    }

    #[test]
    fn hat_assembly_matches_x2_relations_on_string() {
        let cfg = PrimeConfig::new(3, false).unwrap();
        let obj = weyl_string_a1(3, &cfg);
        // μ = 1 inside the built object: Ê must reproduce E_μ ∘ F_μ relations;
        // numerically, the (1,1) block on the rank-one top space is [3].
        let mu = crate::rootdata::Weight(vec![1]);
        let hat = build_hat(&obj, &mu);
        assert_eq!(hat.dim, 1);
        assert_eq!(
            hat.ehat[(0, 0)],
            RingFrac::from_poly(quantum_integer(3, 1))
        );
        // Fast assembly agrees with the direct formula everywhere.
        for w in [3, 1, -1, -3, -5] {
            let mu = crate::rootdata::Weight(vec![w]);
            let a = build_hat(&obj, &mu);
            let b = build_hat_fast(&obj, &mu);
            assert_eq!(a.ehat, b.ehat, "at weight {w}");
        }
    }

    #[test]
    fn comrel_sweep_small() {
        for d in 1..=2u32 {
            for m in 1..=3u32 {
                for n in 1..=3u32 {
                    for l in -4..=4i64 {
                        assert!(
                            verify_comrel(m, n, l, d, (m + n + 2) as usize),
                            "comrel failed at m={m} n={n} l={l} d={d}"
                        );
                    }
                }
            }
        }
    }
}
