//! `GL_n(E)` together with the subgroups and norm-one sets attached to the
//! involutions `σ` and `τ`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{CharMode, FieldTower};

use super::bruhat::{bruhat_decompose, perm_length, permutations, NCharacter};
use super::{gl_order, unitary_order, FiniteGroup, Mat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Involution {
    Sigma,
    Tau,
}

impl Involution {
    pub fn opposite(self) -> Involution {
        match self {
            Involution::Sigma => Involution::Tau,
            Involution::Tau => Involution::Sigma,
        }
    }

    /// Mode of the additive character stable under this involution.
    pub fn char_mode(self) -> CharMode {
        match self {
            Involution::Sigma => CharMode::Sigma,
            Involution::Tau => CharMode::Tau,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Involution::Sigma => "sigma",
            Involution::Tau => "tau",
        }
    }
}

pub struct WeylElement {
    pub perm: Vec<usize>,
    pub mat: Mat,
    pub length: u32,
}

pub struct TowerContext {
    pub n: usize,
    pub tower: Arc<FieldTower>,
    pub g: FiniteGroup,
    pub g_sigma: FiniteGroup,
    pub g_tau: FiniteGroup,
    /// Index sets into `g`.
    pub n_e: Vec<u32>,
    pub torus: Vec<u32>,
    pub mirabolic: Vec<u32>,
    pub n_sigma: Vec<u32>,
    pub n_tau: Vec<u32>,
    pub p_f: Vec<u32>,
    pub x_sigma: Vec<u32>,
    pub x_tau: Vec<u32>,
    pub weyl: Vec<WeylElement>,
}

pub fn build_context(n: usize, tower: Arc<FieldTower>, budget: u64) -> Result<TowerContext> {
    let e = tower.ext().clone();
    let g = FiniteGroup::general_linear(e.clone(), n, budget)?;
    let t = tower.clone();
    let g_sigma =
        g.subgroup(&format!("GL_{}(F_{})", n, tower.q), |m| m.entries().iter().all(|&x| t.in_base(x)));
    let g_tau = g.subgroup(&format!("U({},F_{}/F_{})", n, tower.q_ext(), tower.q), |m| {
        involution_with(&t, m, Involution::Tau) == *m
    });
    let mut ctx = TowerContext {
        n,
        tower,
        g,
        g_sigma,
        g_tau,
        n_e: Vec::new(),
        torus: Vec::new(),
        mirabolic: Vec::new(),
        n_sigma: Vec::new(),
        n_tau: Vec::new(),
        p_f: Vec::new(),
        x_sigma: Vec::new(),
        x_tau: Vec::new(),
        weyl: Vec::new(),
    };
    let len = ctx.g.len() as u32;
    let elems = ctx.g.elements();
    let in_base = |m: &Mat| m.entries().iter().all(|&x| ctx.tower.in_base(x));
    ctx.n_e = (0..len).filter(|&i| elems[i as usize].is_upper_unitriangular()).collect();
    ctx.torus = (0..len).filter(|&i| elems[i as usize].is_diagonal()).collect();
    ctx.mirabolic = (0..len).filter(|&i| elems[i as usize].is_mirabolic()).collect();
    ctx.n_sigma = ctx.n_e.iter().copied().filter(|&i| in_base(&elems[i as usize])).collect();
    ctx.n_tau = ctx.n_e.iter().copied().filter(|&i| ctx.g_tau.contains(&elems[i as usize])).collect();
    ctx.p_f = ctx.mirabolic.iter().copied().filter(|&i| in_base(&elems[i as usize])).collect();
    ctx.x_sigma = ctx.norm_one_set(Involution::Sigma);
    ctx.x_tau = ctx.norm_one_set(Involution::Tau);
    ctx.weyl = permutations(n)
        .into_iter()
        .map(|perm| {
            let length = perm_length(&perm);
            WeylElement { mat: Mat::perm(&perm), perm, length }
        })
        .collect();
    Ok(ctx)
}

/// `g^σ` entrywise Frobenius; `g^τ = J ᵗ(g^{-1})^σ J^{-1}`.
pub fn involution_with(t: &FieldTower, g: &Mat, iota: Involution) -> Mat {
    let f = t.ext();
    match iota {
        Involution::Sigma => g.map(|x| t.frobenius(x)),
        Involution::Tau => {
            let n = g.dim();
            let gi = g.inv(f).expect("invertible");
            let mut out = Mat::zero(n);
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, t.frobenius(gi.get(n - 1 - j, n - 1 - i)));
                }
            }
            out
        }
    }
}

impl TowerContext {
    pub fn q(&self) -> u64 {
        self.tower.q as u64
    }

    pub fn involution(&self, g: &Mat, iota: Involution) -> Mat {
        involution_with(&self.tower, g, iota)
    }

    pub fn g_iota(&self, iota: Involution) -> &FiniteGroup {
        match iota {
            Involution::Sigma => &self.g_sigma,
            Involution::Tau => &self.g_tau,
        }
    }

    pub fn n_iota(&self, iota: Involution) -> &[u32] {
        match iota {
            Involution::Sigma => &self.n_sigma,
            Involution::Tau => &self.n_tau,
        }
    }

    /// Norm-one set `X_κ = {g : g g^κ = 1}` as indices into `g`.
    pub fn x_kappa(&self, kappa: Involution) -> &[u32] {
        match kappa {
            Involution::Sigma => &self.x_sigma,
            Involution::Tau => &self.x_tau,
        }
    }

    pub fn norm_one_set(&self, kappa: Involution) -> Vec<u32> {
        let f = self.tower.ext();
        (0..self.g.len() as u32)
            .filter(|&i| {
                let m = self.g.elem(i);
                m.mul(&self.involution(m, kappa), f).is_identity()
            })
            .collect()
    }

    /// Character of `N(E)` with `ψ = ψ^ι`, scaled on the simple-root slots.
    pub fn psi_on_n(&self, iota: Involution, slots: Option<Vec<u32>>) -> Result<NCharacter> {
        let psi = self.tower.additive_character(iota.char_mode());
        match slots {
            Some(s) => NCharacter::new(psi, s),
            None => Ok(NCharacter::standard(psi, self.n)),
        }
    }

    /// `ψ(u^ι) = ψ(u)` for every `u ∈ N(E)`.
    pub fn is_stable(&self, chi: &NCharacter, iota: Involution) -> bool {
        let f = self.tower.ext();
        self.n_e.iter().all(|&i| {
            let u = self.g.elem(i);
            chi.phase(u, f) == chi.phase(&self.involution(u, iota), f)
        })
    }

    /// `ψ` trivial on `N_ι`.
    pub fn is_trivial_on(&self, chi: &NCharacter, iota: Involution) -> bool {
        let f = self.tower.ext();
        self.n_iota(iota).iter().all(|&i| chi.phase(self.g.elem(i), f) == 0)
    }

    /// Closed-form orders of `G`, `G_σ`, `G_τ`, `N(E)`, `A`, `P` against the enumeration.
    pub fn check_orders(&self) -> bool {
        let n = self.n as u32;
        let q = self.q();
        let qq = q * q;
        self.g.order() == gl_order(n, qq)
            && self.g_sigma.order() == gl_order(n, q)
            && self.g_tau.order() == unitary_order(n, q)
            && self.n_e.len() as u64 == qq.pow(n * (n.saturating_sub(1)) / 2)
            && self.torus.len() as u64 == (qq - 1).pow(n)
            && self.mirabolic.len() as u64 == super::mirabolic_order(n, qq)
            && self.x_sigma.len() as u64 == self.g.order() / self.g_sigma.order()
            && self.x_tau.len() as u64 == self.g.order() / self.g_tau.order()
    }

    /// Permutation matrices with `w w^κ = 1`.
    pub fn weyl_kappa(&self, kappa: Involution) -> Vec<&WeylElement> {
        let f = self.tower.ext();
        self.weyl
            .iter()
            .filter(|w| w.mat.mul(&self.involution(&w.mat, kappa), f).is_identity())
            .collect()
    }

    /// `(|Stab_{N_ι×N_ι}(w)|, |Stab_{N(E)}(w)|)` for `ι` opposite to `κ`:
    /// pairs with `n₁ w n₂^{-1} = w`, and `n` with `n w n^{-κ} = w`.
    pub fn stabilizer_counts(&self, w: &Mat, kappa: Involution) -> (u64, u64) {
        let f = self.tower.ext();
        let iota = kappa.opposite();
        let n_i: Vec<Mat> = self.n_iota(iota).iter().map(|&i| *self.g.elem(i)).collect();
        let mut pairs = 0;
        for n1 in &n_i {
            let left = n1.mul(w, f);
            for n2 in &n_i {
                if left == w.mul(n2, f) {
                    pairs += 1;
                }
            }
        }
        let single = self
            .n_e
            .iter()
            .filter(|&&i| {
                let m = self.g.elem(i);
                let mk = self.involution(m, kappa);
                m.mul(w, f) == w.mul(&mk, f)
            })
            .count() as u64;
        (pairs, single)
    }

    /// Some `n ∈ N(E)` with `n^{-1} g n^ι ∈ A·W`, and the Weyl part of that monomial.
    pub fn norm_one_shape(&self, g: &Mat, iota: Involution) -> Option<(Mat, Mat)> {
        let f = self.tower.ext();
        self.n_e.iter().find_map(|&i| {
            let n = self.g.elem(i);
            let ni = self.g.elem(self.g.inv(i));
            let m = ni.mul(g, f).mul(&self.involution(n, iota), f);
            let monomial = (0..self.n).all(|r| (0..self.n).filter(|&c| m.get(r, c) != 0).count() == 1);
            monomial.then(|| (*n, bruhat_decompose(&m, f).weyl()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_tower;
    use crate::matgroup::DEFAULT_BUDGET;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: usize, p: u32) -> TowerContext {
        build_context(n, Arc::new(build_tower(p, 1).unwrap()), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn orders_gl2_f4() {
        let c = ctx(2, 2);
        assert_eq!(
            (c.g.order(), c.g_sigma.order(), c.g_tau.order(), c.n_e.len()),
            (180, 6, 18, 4)
        );
        assert!(c.check_orders());
        assert_eq!(c.x_tau.len(), 10);
        assert_eq!(c.x_sigma.len(), 30);
        assert!(c.x_sigma.contains(&c.g.identity()) && c.x_tau.contains(&c.g.identity()));
    }

    #[test]
    fn orders_gl2_f9() {
        let c = ctx(2, 3);
        assert_eq!((c.g.order(), c.g_sigma.order(), c.g_tau.order()), (5760, 48, 96));
        assert!(c.check_orders());
        assert_eq!(c.n_tau.len(), 3);
    }

    #[test]
    fn involutions_are_automorphisms() {
        let c = ctx(2, 3);
        let f = c.tower.ext().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = c.g.elem(rng.gen_range(0..c.g.len() as u32));
            let h = c.g.elem(rng.gen_range(0..c.g.len() as u32));
            for iota in [Involution::Sigma, Involution::Tau] {
                let gi = c.involution(g, iota);
                assert_eq!(c.involution(&gi, iota), *g);
                assert_eq!(
                    c.involution(&g.mul(h, &f), iota),
                    gi.mul(&c.involution(h, iota), &f)
                );
            }
        }
        for m in c.g_sigma.elements() {
            assert_eq!(c.involution(m, Involution::Sigma), *m);
        }
    }

    #[test]
    fn psi_stability_and_triviality() {
        let c = ctx(2, 2);
        for iota in [Involution::Sigma, Involution::Tau] {
            let chi = c.psi_on_n(iota, None).unwrap();
            assert!(c.is_stable(&chi, iota));
            // stable under ι ⇔ trivial on N of the opposite fixed group
            assert!(c.is_trivial_on(&chi, iota.opposite()));
        }
        assert!(c.psi_on_n(Involution::Tau, Some(vec![0])).is_err());
    }

    #[test]
    fn stabilizers_follow_q_power() {
        for (n, p) in [(2, 2), (2, 3)] {
            let c = ctx(n, p);
            let q = c.q();
            for kappa in [Involution::Sigma, Involution::Tau] {
                for w in c.weyl_kappa(kappa) {
                    let (a, b) = c.stabilizer_counts(&w.mat, kappa);
                    let expect = q.pow((n * (n - 1) / 2) as u32 - w.length);
                    assert_eq!((a, b), (expect, expect), "n={n} p={p} w={:?}", w.perm);
                }
            }
        }
    }

    #[test]
    fn norm_one_elements_have_involutive_weyl_part() {
        let c = ctx(2, 2);
        let f = c.tower.ext();
        for kappa in [Involution::Sigma, Involution::Tau] {
            for &i in c.x_kappa(kappa) {
                let g = c.g.elem(i);
                let (_, w) = c.norm_one_shape(g, kappa).expect("lemma shape");
                assert!(w.mul(&c.involution(&w, kappa), f).is_identity());
            }
        }
    }
}
