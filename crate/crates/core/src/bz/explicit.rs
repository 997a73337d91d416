//! Explicit matrix modules over `F_ℓ` for the functors at `n = 2`.
//!
//! Modules are given by one matrix per group element. Isomorphism is tested by
//! traces on every element and Hom spaces by solving the intertwining equations
//! on generators, so nothing here goes through the character-level transfers.

use crate::bz::{embed, top_left, BzTower};
use crate::matgroup::FiniteGroup;
use crate::modular::{add_mod, inv_mod, mul_mod, pow_mod, rref, sub_mod, ModMat};
use crate::report::{timed, VerificationReport};

#[derive(Clone, Debug)]
pub struct Module {
    pub act: Vec<ModMat>,
}

impl Module {
    pub fn dim(&self) -> usize {
        self.act[0].rows
    }

    pub fn trivial(g: &FiniteGroup, d: usize) -> Module {
        Module { act: vec![ModMat::identity(d); g.len()] }
    }

    pub fn regular(g: &FiniteGroup) -> Module {
        let n = g.len();
        let act = (0..n as u32)
            .map(|x| {
                let mut m = ModMat::zeros(n, n);
                for y in 0..n as u32 {
                    m.set(g.mul(x, y) as usize, y as usize, 1);
                }
                m
            })
            .collect();
        Module { act }
    }

    pub fn dual(&self, g: &FiniteGroup) -> Module {
        let act = (0..g.len() as u32).map(|x| transpose(&self.act[g.inv(x) as usize])).collect();
        Module { act }
    }

    pub fn traces(&self, l: u64) -> Vec<u64> {
        self.act.iter().map(|m| (0..m.rows).fold(0, |s, i| add_mod(s, m.get(i, i), l))).collect()
    }

    pub fn direct_sum(&self, other: &Module) -> Module {
        let (a, b) = (self.dim(), other.dim());
        let act = self
            .act
            .iter()
            .zip(&other.act)
            .map(|(x, y)| {
                let mut m = ModMat::zeros(a + b, a + b);
                for i in 0..a {
                    for j in 0..a {
                        m.set(i, j, x.get(i, j));
                    }
                }
                for i in 0..b {
                    for j in 0..b {
                        m.set(a + i, a + j, y.get(i, j));
                    }
                }
                m
            })
            .collect();
        Module { act }
    }

    /// Checks the homomorphism property on all pairs of generators and elements.
    pub fn is_representation(&self, g: &FiniteGroup, l: u64) -> bool {
        g.generators().iter().all(|&s| {
            (0..g.len() as u32).all(|x| self.act[s as usize].mul(&self.act[x as usize], l) == self.act[g.mul(s, x) as usize])
        })
    }
}

fn transpose(m: &ModMat) -> ModMat {
    let mut t = ModMat::zeros(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            t.set(j, i, m.get(i, j));
        }
    }
    t
}

fn inverse(m: &ModMat, l: u64) -> ModMat {
    let n = m.rows;
    let mut aug = ModMat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let (piv, r) = rref(&mut aug, l);
    assert!(r >= n && piv[..n].iter().enumerate().all(|(i, &c)| c == i), "singular matrix");
    let mut out = ModMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, aug.get(i, n + j));
        }
    }
    out
}

/// `dim Hom_G(A, B)`: solutions of `T A(s) = B(s) T` for the generators `s`.
pub fn hom_dim(g: &FiniteGroup, a: &Module, b: &Module, l: u64) -> usize {
    let (da, db) = (a.dim(), b.dim());
    let unknowns = da * db;
    if unknowns == 0 {
        return 0;
    }
    let gens = g.generators();
    let mut eq = ModMat::zeros(gens.len() * unknowns, unknowns);
    let mut row = 0;
    for &s in gens {
        let (sa, sb) = (&a.act[s as usize], &b.act[s as usize]);
        for i in 0..db {
            for j in 0..da {
                for k in 0..da {
                    let v = sa.get(k, j);
                    if v != 0 {
                        eq.set(row, i * da + k, add_mod(eq.get(row, i * da + k), v, l));
                    }
                }
                for k in 0..db {
                    let v = sb.get(i, k);
                    if v != 0 {
                        eq.set(row, k * da + j, sub_mod(eq.get(row, k * da + j), v, l));
                    }
                }
                row += 1;
            }
        }
    }
    unknowns - eq.rank(l)
}

/// Action of `sub[i] ∈ G` on the image of the idempotent `e`, in a basis of pivot columns.
fn on_image(v: &Module, e: &ModMat, sub: &[u32], l: u64) -> Module {
    let mut r = e.clone();
    let (cols, rank) = rref(&mut r, l);
    let d = v.dim();
    let mut basis = ModMat::zeros(d, rank);
    for (j, &c) in cols.iter().enumerate() {
        for i in 0..d {
            basis.set(i, j, e.get(i, c));
        }
    }
    if rank == 0 {
        return Module { act: vec![ModMat::zeros(0, 0); sub.len()] };
    }
    let mut bt = transpose(&basis);
    let (rows, _) = rref(&mut bt, l);
    let mut square = ModMat::zeros(rank, rank);
    for (i, &ri) in rows.iter().enumerate() {
        for j in 0..rank {
            square.set(i, j, basis.get(ri, j));
        }
    }
    let sinv = inverse(&square, l);
    let act = sub
        .iter()
        .map(|&x| {
            let img = v.act[x as usize].mul(&basis, l);
            let mut pick = ModMat::zeros(rank, rank);
            for (i, &ri) in rows.iter().enumerate() {
                for j in 0..rank {
                    pick.set(i, j, img.get(ri, j));
                }
            }
            sinv.mul(&pick, l)
        })
        .collect();
    Module { act }
}

/// Explicit functors between modules of `G_1`, `P_1` and `P_2`.
pub struct Explicit<'a> {
    pub t: &'a BzTower,
    pub l: u64,
    zeta_p: u64,
    units: Vec<u32>,
    u_elems: Vec<u32>,
    g1_in_p2: Vec<u32>,
    p1_in_p2: Vec<u32>,
}

impl<'a> Explicit<'a> {
    pub fn new(t: &'a BzTower) -> Explicit<'a> {
        assert!(t.n >= 2);
        let p2 = &t.p(2).group;
        let l = t.p(2).table.prime();
        let zeta_p = t.p(2).table.zeta_mod(t.psi.p());
        let g1 = &t.gl(1).group;
        let p1 = &t.p(1).group;
        let units = g1.elements().iter().map(|a| p2.index_of(&embed(a)).unwrap()).collect::<Vec<_>>();
        let u_elems = (0..p2.len() as u32).filter(|&x| p2.elem(x).is_upper_unitriangular()).collect();
        let p1_in_p2 = p1.elements().iter().map(|a| p2.index_of(&embed(a)).unwrap()).collect();
        Explicit { t, l, zeta_p, g1_in_p2: units.clone(), units, u_elems, p1_in_p2 }
    }

    fn theta(&self, x: u32) -> u64 {
        let m = self.t.p(2).group.elem(x);
        pow_mod(self.zeta_p, self.t.psi.phase(m.get(0, 1)) as u64, self.l)
    }

    /// A linear character of `E^×` from the table of `G_1`.
    pub fn character(&self, c: usize) -> Module {
        let g1 = self.t.gl(1);
        let pt = &self.t.p(2).table;
        let act = (0..g1.group.len() as u32)
            .map(|x| {
                let v = pt.cyclo_mod(&g1.table.chars[c].value(g1.group.class_of(x) as usize)).expect("values in the table field");
                let mut m = ModMat::zeros(1, 1);
                m.set(0, 0, v);
                m
            })
            .collect();
        Module { act }
    }

    pub fn psi_plus(&self, w: &Module) -> Module {
        let p2 = &self.t.p(2).group;
        let g1 = &self.t.gl(1).group;
        let act = p2.elements().iter().map(|x| w.act[g1.index_of(&top_left(x)).unwrap() as usize].clone()).collect();
        Module { act }
    }

    /// `Ind_{U_2}^{P_2}(W ⊗ θ)` with coset representatives `diag(a, 1)`.
    pub fn phi_plus(&self, w: &Module) -> Module {
        let p2 = &self.t.p(2).group;
        let p1 = &self.t.p(1).group;
        let l = self.l;
        let d = w.dim();
        let k = self.units.len();
        let act = (0..p2.len() as u32)
            .map(|x| {
                let mut m = ModMat::zeros(k * d, k * d);
                for (i, &r) in self.units.iter().enumerate() {
                    let xr = p2.mul(x, r);
                    let a = p2.elem(xr).get(0, 0);
                    let j = self.units.iter().position(|&s| p2.elem(s).get(0, 0) == a).unwrap();
                    let u = p2.mul(p2.inv(self.units[j]), xr);
                    debug_assert!(p2.elem(u).is_upper_unitriangular());
                    let th = self.theta(u);
                    let wu = &w.act[p1.index_of(&top_left(p2.elem(u))).unwrap() as usize];
                    for a in 0..d {
                        for b in 0..d {
                            m.set(j * d + a, i * d + b, mul_mod(th, wu.get(a, b), l));
                        }
                    }
                }
                m
            })
            .collect();
        Module { act }
    }

    fn average(&self, v: &Module, twisted: bool) -> ModMat {
        let l = self.l;
        let d = v.dim();
        let mut e = ModMat::zeros(d, d);
        for &u in &self.u_elems {
            let c = if twisted { inv_mod(self.theta(u), l) } else { 1 };
            let a = &v.act[u as usize];
            for i in 0..d * d {
                e.data[i] = add_mod(e.data[i], mul_mod(c, a.data[i], l), l);
            }
        }
        let s = inv_mod(self.u_elems.len() as u64 % l, l);
        e.data.iter_mut().for_each(|x| *x = mul_mod(*x, s, l));
        e
    }

    pub fn psi_minus(&self, v: &Module) -> Module {
        on_image(v, &self.average(v, false), &self.g1_in_p2, self.l)
    }

    pub fn phi_minus(&self, v: &Module) -> Module {
        on_image(v, &self.average(v, true), &self.p1_in_p2, self.l)
    }

    /// The five relations and contragredient commutation on explicit modules.
    pub fn report(&self) -> VerificationReport {
        let t = self.t;
        let l = self.l;
        let (p2, g1, p1) = (&t.p(2).group, &t.gl(1).group, &t.p(1).group);
        let label = format!("P_2(F_{}) explicit", t.q_ext());
        let mut rep = VerificationReport::new(label.clone());

        let mut g_inputs: Vec<(String, Module)> = (0..t.gl(1).table.len()).map(|c| (format!("chi{c}"), self.character(c))).collect();
        g_inputs.push(("regular".into(), Module::regular(g1)));
        let p1_inputs = vec![("trivial".to_string(), Module::trivial(p1, 1)), ("trivial^2".to_string(), Module::trivial(p1, 2))];
        let mut p2_inputs: Vec<(String, Module)> = vec![("regular".into(), Module::regular(p2))];
        p2_inputs.push(("phi_plus(1)".into(), self.phi_plus(&Module::trivial(p1, 1))));
        p2_inputs.push(("mixed".into(), self.psi_plus(&g_inputs[0].1).direct_sum(&p2_inputs[1].1)));

        let (ok, us) = timed(|| {
            g_inputs.iter().all(|(_, w)| self.psi_plus(w).is_representation(p2, l))
                && p1_inputs.iter().all(|(_, w)| self.phi_plus(w).is_representation(p2, l))
                && p2_inputs.iter().all(|(_, v)| self.psi_minus(v).is_representation(g1, l) && self.phi_minus(v).is_representation(p1, l))
        });
        rep.push("bz", "explicit-functors-give-representations", label.clone(), ok, true, ok, us);

        for (name, v) in &p2_inputs {
            let params = format!("{label} V={name}");
            let (ok, us) = timed(|| {
                let dual = v.dual(p2);
                self.psi_minus(&dual).traces(l) == self.psi_minus(v).dual(g1).traces(l)
                    && self.phi_minus(&dual).traces(l) == self.phi_minus(v).dual(p1).traces(l)
            });
            rep.push("bz", "explicit-minus-functors-commute-with-dual", params.clone(), ok, true, ok, us);
            let (ok, us) = timed(|| {
                let a = self.psi_plus(&self.psi_minus(v));
                let b = self.phi_plus(&self.phi_minus(v));
                a.direct_sum(&b).traces(l) == v.traces(l)
            });
            rep.push("bz", "explicit-mirabolic-splitting", params, ok, true, ok, us);
        }
        for (name, w) in &g_inputs {
            let params = format!("{label} W={name}");
            let (ok, us) = timed(|| {
                let up = self.psi_plus(w);
                self.psi_plus(&w.dual(g1)).traces(l) == up.dual(p2).traces(l)
                    && self.phi_minus(&up).dim() == 0
                    && self.psi_minus(&up).traces(l) == w.traces(l)
            });
            rep.push("bz", "explicit-psi-plus-relations", params.clone(), ok, true, ok, us);
            if w.dim() == 1 {
                for (vname, v) in &p2_inputs {
                    let (pair, us) = timed(|| (hom_dim(p2, &self.psi_plus(w), v, l), hom_dim(g1, w, &self.psi_minus(v), l)));
                    rep.check("bz", "explicit-psi-adjunction", format!("{params} V={vname}"), pair.0, pair.1, us);
                }
            }
        }
        for (name, w) in &p1_inputs {
            let params = format!("{label} W={name}");
            let (ok, us) = timed(|| {
                let up = self.phi_plus(w);
                self.phi_plus(&w.dual(p1)).traces(l) == up.dual(p2).traces(l)
                    && self.psi_minus(&up).dim() == 0
                    && self.phi_minus(&up).traces(l) == w.traces(l)
            });
            rep.push("bz", "explicit-phi-plus-relations", params.clone(), ok, true, ok, us);
            for (vname, v) in p2_inputs.iter().filter(|(n, _)| n != "regular" || w.dim() == 1) {
                let (pair, us) = timed(|| (hom_dim(p2, &self.phi_plus(w), v, l), hom_dim(p1, w, &self.phi_minus(v), l)));
                rep.check("bz", "explicit-phi-adjunction", format!("{params} V={vname}"), pair.0, pair.1, us);
            }
        }
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_tower;
    use crate::matgroup::DEFAULT_BUDGET;
    use std::sync::Arc;

    #[test]
    fn explicit_relations_f9() {
        let t = BzTower::new(Arc::new(build_tower(3, 1).unwrap()), 2, false, DEFAULT_BUDGET, 1).unwrap();
        let r = Explicit::new(&t).report();
        assert!(r.all_pass(), "{:#?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn explicit_relations_f4() {
        let t = BzTower::new(Arc::new(build_tower(2, 1).unwrap()), 2, false, DEFAULT_BUDGET, 1).unwrap();
        let x = Explicit::new(&t);
        let r = x.report();
        assert!(r.all_pass(), "{:#?}", r.failures().collect::<Vec<_>>());
        // the regular module of P_2 splits as (q̃-1) copies of Φ⁺(1) plus the regular module of E^×
        let reg = Module::regular(&t.p(2).group);
        assert_eq!(x.phi_minus(&reg).dim(), 3);
        assert_eq!(x.psi_minus(&reg).dim(), 3);
    }
}
