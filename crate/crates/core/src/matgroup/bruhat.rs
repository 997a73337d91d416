//! Bruhat factorization `g = n₁ · a w · n₂` by pivoting Gaussian elimination,
//! and characters of the upper unitriangular group.

use crate::error::{Error, Result};
use crate::field::{AdditiveCharacter, Fe, Field};

use super::Mat;

/// Result of [`bruhat_decompose`]: `g = n1 · aw · n2`, `aw` monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bruhat {
    pub n1: Mat,
    pub aw: Mat,
    pub n2: Mat,
    /// `perm[i]` is the column of the nonzero entry of `aw` in row `i`.
    pub perm: [u8; 4],
}

impl Bruhat {
    pub fn torus(&self) -> Vec<Fe> {
        let n = self.aw.dim();
        (0..n).map(|i| self.aw.get(i, self.perm[i] as usize)).collect()
    }

    pub fn weyl(&self) -> Mat {
        let n = self.aw.dim();
        Mat::perm(&self.perm[..n].iter().map(|&c| c as usize).collect::<Vec<_>>())
    }
}

/// Eliminates rows bottom-up, pivoting on the leftmost remaining nonzero entry.
/// Column operations clear the pivot row to the right, row operations clear the
/// pivot column above; both are upper unitriangular, so `L g R = aw`.
pub fn bruhat_decompose(g: &Mat, f: &Field) -> Bruhat {
    let n = g.dim();
    let mut m = *g;
    let mut l = Mat::identity(n);
    let mut r = Mat::identity(n);
    let mut used = [false; 4];
    let mut perm = [0u8; 4];
    for i in (0..n).rev() {
        let c = (0..n)
            .find(|&c| !used[c] && m.get(i, c) != 0)
            .expect("matrix is invertible");
        used[c] = true;
        perm[i] = c as u8;
        let inv = f.inv(m.get(i, c));
        for j in c + 1..n {
            let t = m.get(i, j);
            if t == 0 {
                continue;
            }
            // column_j -= s · column_c
            let s = f.mul(t, inv);
            for row in 0..n {
                m.set(row, j, f.sub(m.get(row, j), f.mul(s, m.get(row, c))));
                r.set(row, j, f.sub(r.get(row, j), f.mul(s, r.get(row, c))));
            }
        }
        for row in 0..i {
            let t = m.get(row, c);
            if t == 0 {
                continue;
            }
            // row_row -= s · row_i
            let s = f.mul(t, inv);
            for col in 0..n {
                m.set(row, col, f.sub(m.get(row, col), f.mul(s, m.get(i, col))));
                l.set(row, col, f.sub(l.get(row, col), f.mul(s, l.get(i, col))));
            }
        }
    }
    let n1 = l.inv(f).unwrap();
    let n2 = r.inv(f).unwrap();
    Bruhat { n1, aw: m, n2, perm }
}

/// Number of inversions of a permutation.
pub fn perm_length(perm: &[usize]) -> u32 {
    let mut l = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                l += 1;
            }
        }
    }
    l
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// Character `u ↦ ψ(Σ_i c_i u_{i,i+1})` of the upper unitriangular group.
#[derive(Clone, Debug)]
pub struct NCharacter {
    pub psi: AdditiveCharacter,
    pub slots: Vec<Fe>,
}

impl NCharacter {
    /// Rejects a zero slot (degenerate character).
    pub fn new(psi: AdditiveCharacter, slots: Vec<Fe>) -> Result<NCharacter> {
        if slots.iter().any(|&c| c == 0) {
            return Err(Error::DegenerateCharacter);
        }
        Ok(NCharacter { psi, slots })
    }

    pub fn standard(psi: AdditiveCharacter, n: usize) -> NCharacter {
        NCharacter { psi, slots: vec![1; n.saturating_sub(1)] }
    }

    pub fn p(&self) -> u32 {
        self.psi.p()
    }

    /// Exponent `c` with `ψ(u) = ζ_p^c`.
    #[inline]
    pub fn phase(&self, u: &Mat, f: &Field) -> u32 {
        self.psi.phase(u.superdiag_sum(&self.slots, f))
    }

    /// Phase of `ψ(n₁)ψ(n₂)` for a Bruhat factorization.
    pub fn bruhat_phase(&self, b: &Bruhat, f: &Field) -> u32 {
        (self.phase(&b.n1, f) + self.phase(&b.n2, f)) % self.p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::matgroup::FiniteGroup;
    use std::collections::HashSet;
    use std::sync::Arc;

    #[test]
    fn antidiagonal_is_its_own_cell() {
        let f = Field::new(2, 2).unwrap();
        let w0 = Mat::antidiag(2);
        let b = bruhat_decompose(&w0, &f);
        assert!(b.n1.is_identity() && b.n2.is_identity());
        assert_eq!(b.aw, w0);
    }

    #[test]
    fn borel_elements_have_trivial_weyl_part() {
        let f = Field::new(3, 2).unwrap();
        let g = Mat::from_rows(&[&[2, 5, 7], &[0, 3, 1], &[0, 0, 8]]);
        let b = bruhat_decompose(&g, &f);
        assert_eq!(b.weyl(), Mat::identity(3));
    }

    #[test]
    fn recomposition_over_gl3_f3() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        let g = FiniteGroup::general_linear(f.clone(), 3, 1 << 21).unwrap();
        for m in g.elements() {
            let b = bruhat_decompose(m, &f);
            assert!(b.n1.is_upper_unitriangular() && b.n2.is_upper_unitriangular());
            assert_eq!(b.n1.mul(&b.aw, &f).mul(&b.n2, &f), *m);
            let n = 3;
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(b.aw.get(i, j) != 0, b.perm[i] as usize == j);
                }
            }
        }
    }

    /// Oracle: all factorizations `n a w n'` of each element of GL_2(F_4) by
    /// exhaustive search; `(a, w)` must be unique and agree with elimination.
    #[test]
    fn uniqueness_against_exhaustive_search_gl2_f4() {
        let f = Arc::new(Field::new(2, 2).unwrap());
        let g = FiniteGroup::general_linear(f.clone(), 2, 1 << 21).unwrap();
        let units: Vec<Fe> = f.units().collect();
        let ns: Vec<Mat> = f.elements().map(|x| Mat::from_rows(&[&[1, x], &[0, 1]])).collect();
        let mut monomials = Vec::new();
        for p in permutations(2) {
            for &a in &units {
                for &b in &units {
                    monomials.push(Mat::diag(&[a, b]).mul(&Mat::perm(&p), &f));
                }
            }
        }
        let mut found: Vec<HashSet<Mat>> = vec![HashSet::new(); g.len()];
        for n1 in &ns {
            for aw in &monomials {
                for n2 in &ns {
                    let m = n1.mul(aw, &f).mul(n2, &f);
                    found[g.index_of(&m).unwrap() as usize].insert(*aw);
                }
            }
        }
        for (i, m) in g.elements().iter().enumerate() {
            assert_eq!(found[i].len(), 1);
            assert!(found[i].contains(&bruhat_decompose(m, &f).aw));
        }
    }

    #[test]
    fn permutation_lengths() {
        assert_eq!(perm_length(&[0, 1, 2]), 0);
        assert_eq!(perm_length(&[2, 1, 0]), 3);
        assert_eq!(permutations(3).len(), 6);
    }
}
