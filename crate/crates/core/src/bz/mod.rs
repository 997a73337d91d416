//! Bernstein–Zelevinsky functors on the mirabolic tower of `GL_n(E)`, at the
//! level of characters.
//!
//! `P_m = G_{m-1} ⋉ U_m` with `U_m` the last column; `θ_m(u) = ψ(u_{m-1,m})`.
//! Every functor is a linear map between class-function spaces and is stored
//! as one histogram per target class (source class, root-of-unity exponent)
//! with a rational scale.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cache;
use crate::chartable::{class_twist, fusion, genericity_multiplicity, parabolic_induce, restrict, CharacterTable};
use crate::classfn::{reduce_dense, ClassFn, Histogram};
use crate::error::{Error, Result};
use crate::field::{AdditiveCharacter, CharMode, FieldTower};
use crate::matgroup::{FiniteGroup, Mat};
use crate::report::{timed, VerificationReport};

/// Linear map `f ↦ (num_c/den_c) Σ count · f(src) · ζ_root^e` per target class `c`.
pub struct Transfer {
    rows: Vec<Histogram>,
    scale: Vec<(i64, i64)>,
}

impl Transfer {
    pub fn apply(&self, f: &ClassFn) -> ClassFn {
        let mut m = f.order();
        let mut nums = Vec::with_capacity(self.rows.len());
        let mut dens = Vec::with_capacity(self.rows.len());
        let dense: Vec<(u32, Vec<i128>)> = self.rows.iter().map(|h| h.pair_dense(f, 1)).collect();
        for (mm, _) in &dense {
            m = crate::cyclo::lcm(m, *mm);
        }
        for ((mm, acc), &(num, den)) in dense.into_iter().zip(&self.scale) {
            let mut wide = vec![0i128; m as usize];
            let s = (m / mm) as usize;
            for (k, c) in acc.into_iter().enumerate() {
                wide[k * s] += c;
            }
            nums.push(reduce_dense(m, &wide).into_iter().map(|x| x * num as i128).collect::<Vec<_>>());
            dens.push(den as i128 * f.den() as i128);
        }
        crate::chartable::from_canonical_rows(m, &nums, &dens).shrink()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub mod explicit;

pub(crate) fn embed(a: &Mat) -> Mat {
    let k = a.dim();
    let mut m = Mat::identity(k + 1);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, a.get(i, j));
        }
    }
    m
}

pub(crate) fn top_left(p: &Mat) -> Mat {
    let k = p.dim() - 1;
    let mut m = Mat::zero(k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, p.get(i, j));
        }
    }
    m
}

fn last_column_unipotent(m: usize, idx: usize, q: u32) -> Mat {
    let mut u = Mat::identity(m);
    let mut c = idx as u32;
    for i in 0..m - 1 {
        u.set(i, m - 1, c % q);
        c /= q;
    }
    u
}

pub struct GroupData {
    pub group: FiniteGroup,
    pub table: CharacterTable,
}

/// Mirabolic tower `P_1 ⊂ … ⊂ P_n` and `G_0, …, G_{n-1}` (and `G_n` if built) over `E`.
pub struct BzTower {
    pub tower: Arc<FieldTower>,
    pub n: usize,
    pub psi: AdditiveCharacter,
    gl: Vec<GroupData>,
    p: Vec<GroupData>,
    psi_plus: Vec<Transfer>,
    psi_minus: Vec<Transfer>,
    phi_plus: Vec<Option<Transfer>>,
    phi_minus: Vec<Option<Transfer>>,
    res_top: Option<Vec<u32>>,
    p_rational: Vec<OnceLock<Histogram>>,
    g_rational: Vec<OnceLock<Histogram>>,
}

impl BzTower {
    /// `θ` is trivial on the `F`-points, so that Kable's orbit argument applies.
    pub fn new(tower: Arc<FieldTower>, n: usize, with_top: bool, budget: u64, seed: u64) -> Result<BzTower> {
        BzTower::new_cached(tower, n, with_top, budget, seed, &Cache::disabled())
    }

    pub fn new_cached(tower: Arc<FieldTower>, n: usize, with_top: bool, budget: u64, seed: u64, cache: &Cache) -> Result<BzTower> {
        let e = tower.ext().clone();
        let psi = tower.additive_character(CharMode::Tau);
        let top = if with_top { n } else { n - 1 };
        let mut gl = Vec::new();
        for m in 0..=top {
            let group = FiniteGroup::general_linear(e.clone(), m, budget)?;
            let table = cache.character_table(&group, seed)?.0;
            gl.push(GroupData { group, table });
        }
        let mut p = Vec::new();
        for m in 1..=n {
            let group = FiniteGroup::mirabolic(e.clone(), m, budget)?;
            let table = cache.character_table(&group, seed)?.0;
            p.push(GroupData { group, table });
        }
        let mut t = BzTower {
            tower,
            n,
            psi,
            gl,
            p,
            psi_plus: Vec::new(),
            psi_minus: Vec::new(),
            phi_plus: Vec::new(),
            phi_minus: Vec::new(),
            res_top: None,
            p_rational: (0..n).map(|_| OnceLock::new()).collect(),
            g_rational: (0..=top).map(|_| OnceLock::new()).collect(),
        };
        for m in 1..=n {
            let pp = t.psi_plus_transfer(m);
            let pm = t.psi_minus_transfer(m);
            let fp = (m >= 2).then(|| t.phi_plus_transfer(m));
            let fm = (m >= 2).then(|| t.phi_minus_transfer(m));
            t.psi_plus.push(pp);
            t.psi_minus.push(pm);
            t.phi_plus.push(fp);
            t.phi_minus.push(fm);
        }
        if with_top {
            t.res_top = Some(fusion(&t.p(n).group, &t.gl(n).group)?);
        }
        Ok(t)
    }

    pub fn q_ext(&self) -> u32 {
        self.tower.q_ext()
    }

    /// `G_m`, `0 ≤ m ≤ n` (`m = n` only when built with the top group).
    pub fn gl(&self, m: usize) -> &GroupData {
        &self.gl[m]
    }

    pub fn has_top(&self) -> bool {
        self.res_top.is_some()
    }

    /// `P_m`, `1 ≤ m ≤ n`.
    pub fn p(&self, m: usize) -> &GroupData {
        &self.p[m - 1]
    }

    fn theta_phase(&self, u: &Mat) -> u32 {
        let m = u.dim();
        self.psi.phase(u.get(m - 2, m - 1))
    }

    fn psi_plus_transfer(&self, m: usize) -> Transfer {
        let (pg, gg) = (&self.p(m).group, &self.gl(m - 1).group);
        let rows = pg
            .classes()
            .reps
            .iter()
            .map(|&r| Histogram::collect(1, [(gg.class_of_mat(&top_left(pg.elem(r))).unwrap(), 0)]))
            .collect::<Vec<_>>();
        let scale = vec![(1, 1); rows.len()];
        Transfer { rows, scale }
    }

    fn psi_minus_transfer(&self, m: usize) -> Transfer {
        let (pg, gg) = (&self.p(m).group, &self.gl(m - 1).group);
        let f = self.tower.ext();
        let q = self.q_ext();
        let nu = (q as usize).pow(m as u32 - 1);
        let rows: Vec<Histogram> = gg
            .classes()
            .reps
            .par_iter()
            .map(|&r| {
                let g = embed(gg.elem(r));
                Histogram::collect(
                    1,
                    (0..nu).map(|i| (pg.class_of_mat(&g.mul(&last_column_unipotent(m, i, q), f)).unwrap(), 0)),
                )
            })
            .collect();
        let scale = vec![(1, nu as i64); rows.len()];
        Transfer { rows, scale }
    }

    fn phi_minus_transfer(&self, m: usize) -> Transfer {
        let (pg, lower) = (&self.p(m).group, &self.p(m - 1).group);
        let f = self.tower.ext();
        let q = self.q_ext();
        let pr = self.psi.p();
        let nu = (q as usize).pow(m as u32 - 1);
        let rows: Vec<Histogram> = lower
            .classes()
            .reps
            .par_iter()
            .map(|&r| {
                let g = embed(lower.elem(r));
                Histogram::collect(
                    pr,
                    (0..nu).map(|i| {
                        let u = last_column_unipotent(m, i, q);
                        (pg.class_of_mat(&g.mul(&u, f)).unwrap(), pr - self.theta_phase(&u))
                    }),
                )
            })
            .collect();
        let scale = vec![(1, nu as i64); rows.len()];
        Transfer { rows, scale }
    }

    /// `Ind_{P_{m-1}U_m}^{P_m}(V ⊗ θ_m)` by the induced-character formula over `K = P_{m-1}U_m`.
    fn phi_plus_transfer(&self, m: usize) -> Transfer {
        let (pg, lower) = (&self.p(m).group, &self.p(m - 1).group);
        let pr = self.psi.p();
        let in_k = |x: &Mat| (0..m - 2).all(|j| x.get(m - 2, j) == 0) && x.get(m - 2, m - 2) == 1;
        let items: Vec<(u32, u32, u32)> = pg
            .elements()
            .par_iter()
            .filter(|x| in_k(x))
            .map(|x| (pg.class_of_mat(x).unwrap(), lower.class_of_mat(&top_left(x)).unwrap(), self.theta_phase(x)))
            .collect();
        let k_order = items.len() as i64;
        let r = pg.num_classes();
        let mut per: Vec<Vec<(u32, u32)>> = vec![Vec::new(); r];
        for (c, s, e) in items {
            per[c as usize].push((s, e));
        }
        let sizes = &pg.classes().sizes;
        let rows = per.into_iter().map(|v| Histogram::collect(pr, v)).collect();
        let scale = (0..r).map(|c| (pg.order() as i64, k_order * sizes[c] as i64)).collect();
        Transfer { rows, scale }
    }

    /// `Ψ⁺ : R(G_{m-1}) → R(P_m)`.
    pub fn psi_plus(&self, m: usize, f: &ClassFn) -> ClassFn {
        self.psi_plus[m - 1].apply(f)
    }

    /// `Ψ⁻ : R(P_m) → R(G_{m-1})`.
    pub fn psi_minus(&self, m: usize, f: &ClassFn) -> ClassFn {
        self.psi_minus[m - 1].apply(f)
    }

    /// `Φ⁺ : R(P_{m-1}) → R(P_m)`.
    pub fn phi_plus(&self, m: usize, f: &ClassFn) -> ClassFn {
        self.phi_plus[m - 1].as_ref().expect("m >= 2").apply(f)
    }

    /// `Φ⁻ : R(P_m) → R(P_{m-1})`.
    pub fn phi_minus(&self, m: usize, f: &ClassFn) -> ClassFn {
        self.phi_minus[m - 1].as_ref().expect("m >= 2").apply(f)
    }

    pub fn restrict_top(&self, chi: &ClassFn) -> ClassFn {
        restrict(chi, self.res_top.as_ref().expect("top group"))
    }

    /// Character of `Ind_{N_m}^{P_m} ψ` for the standard non-degenerate `ψ`.
    pub fn ind_n_psi(&self, m: usize) -> ClassFn {
        let pg = &self.p(m).group;
        let pr = self.psi.p();
        let f = self.tower.ext();
        let slots = vec![1; m - 1];
        let r = pg.num_classes();
        let mut per: Vec<Vec<(u32, u32)>> = vec![Vec::new(); r];
        let mut n_order = 0i64;
        for x in pg.elements().iter().filter(|x| x.is_upper_unitriangular()) {
            per[pg.class_of_mat(x).unwrap() as usize].push((0, self.psi.phase(x.superdiag_sum(&slots, f))));
            n_order += 1;
        }
        let sizes = &pg.classes().sizes;
        let rows = per.into_iter().map(|v| Histogram::collect(pr, v)).collect();
        let scale = (0..r).map(|c| (pg.order() as i64, n_order * sizes[c] as i64)).collect();
        Transfer { rows, scale }.apply(&ClassFn::from_ints(&[1]))
    }

    /// `π^{(k)} = Ψ⁻ (Φ⁻)^{k-1} τ` for `k = 1..=m`, with `τ` on `P_m`.
    pub fn derivatives_of(&self, m: usize, tau: &ClassFn) -> Vec<ClassFn> {
        let mut out = Vec::with_capacity(m);
        let mut cur = tau.clone();
        for k in 1..=m {
            let level = m - k + 1;
            out.push(self.psi_minus(level, &cur));
            if level >= 2 {
                cur = self.phi_minus(level, &cur);
            }
        }
        out
    }

    /// `Σ_k (Φ⁺)^{k-1} Ψ⁺ (τ^{(k)})` on `P_m`.
    pub fn reassemble(&self, m: usize, derivs: &[ClassFn]) -> ClassFn {
        let mut total: Option<ClassFn> = None;
        for (i, d) in derivs.iter().enumerate() {
            let k = i + 1;
            let level = m - k + 1;
            let mut cur = self.psi_plus(level, d);
            for l in level + 1..=m {
                cur = self.phi_plus(l, &cur);
            }
            total = Some(match total {
                None => cur,
                Some(t) => t.add(&cur),
            });
        }
        total.unwrap()
    }

    fn rational_histogram(&self, g: &FiniteGroup) -> Histogram {
        Histogram::collect(
            1,
            g.elements().par_iter().filter(|x| self.is_rational(x)).map(|x| (g.class_of_mat(x).unwrap(), 0)).collect::<Vec<_>>(),
        )
    }

    /// `dim Hom_{P_m(F)}(τ, 1)`.
    pub fn p_invariants(&self, m: usize, tau: &ClassFn) -> BigRational {
        let h = self.p_rational[m - 1].get_or_init(|| self.rational_histogram(&self.p(m).group));
        CharacterTable::average(tau, h, 1).to_rational().expect("rational multiplicity")
    }

    /// `dim Hom_{G_m(F)}(ρ, 1)`.
    pub fn g_invariants(&self, m: usize, rho: &ClassFn) -> BigRational {
        let h = self.g_rational[m].get_or_init(|| self.rational_histogram(&self.gl(m).group));
        CharacterTable::average(rho, h, 1).to_rational().expect("rational multiplicity")
    }

    fn is_rational(&self, x: &Mat) -> bool {
        x.entries().iter().all(|&e| self.tower.in_base(e))
    }

    /// Invariants under the unipotent radical of every standard maximal parabolic vanish.
    pub fn is_cuspidal(&self, m: usize, chi: &ClassFn) -> bool {
        let gg = &self.gl(m).group;
        (1..m).all(|i| {
            let h = Histogram::collect(
                1,
                gg.elements()
                    .iter()
                    .filter(|x| {
                        (0..m).all(|r| {
                            (0..m).all(|c| {
                                let same_block = (r < i) == (c < i);
                                let v = x.get(r, c);
                                if same_block {
                                    v == (r == c) as u32
                                } else {
                                    r < i || v == 0
                                }
                            })
                        })
                    })
                    .map(|x| (gg.class_of_mat(x).unwrap(), 0)),
            );
            CharacterTable::average(chi, &h, 1).is_zero()
        })
    }

    /// Generic with respect to the standard `ψ` on `N_m`.
    pub fn is_generic(&self, m: usize, chi: &ClassFn) -> Result<bool> {
        let gg = &self.gl(m).group;
        let f = self.tower.ext();
        let slots = vec![1; m.saturating_sub(1)];
        let h = Histogram::collect(
            self.psi.p(),
            gg.elements()
                .iter()
                .filter(|x| x.is_upper_unitriangular())
                .map(|x| (gg.class_of_mat(x).unwrap(), self.psi.phase(x.superdiag_sum(&slots, f)))),
        );
        Ok(genericity_multiplicity(chi, &h)? == 1)
    }

    /// `Res_{P_m} χ = Ind_{N_m}^{P_m} ψ` (Kirillov model of a cuspidal).
    pub fn kirillov_check(&self, chi: &ClassFn) -> bool {
        self.restrict_top(chi) == self.ind_n_psi(self.n)
    }

    /// `χ₁ × … × χ_r` of characters of `G_1 = E^×`, by iterated parabolic induction.
    pub fn product_of_gl1(&self, chars: &[usize]) -> Result<ClassFn> {
        let g1 = self.gl(1);
        let mut cur = g1.table.chars[chars[0]].clone();
        for (i, &c) in chars.iter().enumerate().skip(1) {
            let a = i;
            let target = self.gl(a + 1);
            cur = parabolic_induce(&target.group, &target.table, &self.gl(a).group, &cur, &g1.group, &g1.table.chars[c])?;
        }
        Ok(cur)
    }

    /// Characters of `E^×` trivial on `F^×`.
    pub fn gl1_distinguished(&self) -> Vec<usize> {
        let g1 = self.gl(1);
        (0..g1.table.len()).filter(|&c| self.g_invariants(1, &g1.table.chars[c]).is_one()).collect()
    }

    /// Distinguished generic `π` of `G_n` with `dim Hom_{P_n(F)}(π, 1) = 1`, and the
    /// predicted set: distinguished cuspidals together with `ρ^∨ × ρ^σ`, `ρ^∨ ≇ ρ^σ`
    /// (`n = 2`, `ρ` running over characters of `E^×`).
    pub fn relative_cuspidal_classify(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        if self.n != 2 || !self.has_top() {
            return Err(Error::MissingContext("relative cuspidal classification needs n = 2 with the top group".into()));
        }
        let top = self.gl(2);
        let mut computed = Vec::new();
        let mut predicted = Vec::new();
        for (pi, chi) in top.table.chars.iter().enumerate() {
            let dist = self.g_invariants(2, chi).is_one();
            if dist && self.is_generic(2, chi)? {
                if self.p_invariants(2, &self.restrict_top(chi)).is_one() {
                    computed.push(pi);
                }
                if self.is_cuspidal(2, chi) {
                    predicted.push(pi);
                }
            }
        }
        let g1 = self.gl(1);
        let t = self.tower.clone();
        let sigma = class_twist(&g1.group, |m| m.map(|x| t.frobenius(x)))?;
        for rho in 0..g1.table.len() {
            let dual = g1.table.conj_index(rho);
            let twisted = g1.table.twist_index(rho, &sigma)?;
            if dual != twisted {
                let chi = self.product_of_gl1(&[dual, twisted])?;
                let pi = top.table.find(&chi).ok_or_else(|| Error::Mismatch("ρ^∨ × ρ^σ is reducible".into()))?;
                predicted.push(pi);
            }
        }
        computed.sort_unstable();
        predicted.sort_unstable();
        predicted.dedup();
        Ok((computed, predicted))
    }

    /// All five functor relations, exhaustively over `Irr(P_m)`, `Irr(P_{m-1})` and `Irr(G_{m-1})`.
    pub fn relations_report(&self, m: usize) -> VerificationReport {
        let label = format!("P_{}(F_{})", m, self.q_ext());
        let mut rep = VerificationReport::new(label.clone());
        let pt = &self.p(m).table;
        let gt = &self.gl(m - 1).table;
        let lower = (m >= 2).then(|| &self.p(m - 1).table);

        let (ok, us) = timed(|| {
            let mut ok = pt.chars.iter().all(|c| self.psi_minus(m, &c.conj()) == self.psi_minus(m, c).conj());
            ok &= gt.chars.iter().all(|c| self.psi_plus(m, &c.conj()) == self.psi_plus(m, c).conj());
            if let Some(lt) = lower {
                ok &= pt.chars.iter().all(|c| self.phi_minus(m, &c.conj()) == self.phi_minus(m, c).conj());
                ok &= lt.chars.iter().all(|c| self.phi_plus(m, &c.conj()) == self.phi_plus(m, c).conj());
            }
            ok
        });
        rep.push("bz", "functors-commute-with-contragredient", label.clone(), ok, true, ok, us);

        let (ok, us) = timed(|| {
            let minus: Vec<ClassFn> = pt.chars.par_iter().map(|b| self.psi_minus(m, b)).collect();
            let mut ok = gt.chars.par_iter().all(|a| {
                let pa = self.psi_plus(m, a);
                pt.chars.iter().zip(&minus).all(|(b, mb)| pt.inner(&pa, b) == gt.inner(a, mb))
            });
            if let Some(lt) = lower {
                let minus: Vec<ClassFn> = pt.chars.par_iter().map(|b| self.phi_minus(m, b)).collect();
                ok &= lt.chars.par_iter().all(|a| {
                    let pa = self.phi_plus(m, a);
                    pt.chars.iter().zip(&minus).all(|(b, mb)| pt.inner(&pa, b) == lt.inner(a, mb))
                });
            }
            ok
        });
        rep.push("bz", "adjoint-pairs", label.clone(), ok, true, ok, us);

        let (ok, us) = timed(|| {
            let mut ok = true;
            if let Some(lt) = lower {
                ok &= gt.chars.iter().all(|a| self.phi_minus(m, &self.psi_plus(m, a)).is_zero());
                ok &= lt.chars.iter().all(|a| self.psi_minus(m, &self.phi_plus(m, a)).is_zero());
            }
            ok
        });
        rep.push("bz", "mixed-compositions-vanish", label.clone(), ok, true, ok, us);

        let (ok, us) = timed(|| {
            let mut ok = gt.chars.iter().all(|a| self.psi_minus(m, &self.psi_plus(m, a)) == *a);
            if let Some(lt) = lower {
                ok &= lt.chars.iter().all(|a| self.phi_minus(m, &self.phi_plus(m, a)) == *a);
            }
            ok
        });
        rep.push("bz", "minus-after-plus-is-identity", label.clone(), ok, true, ok, us);

        let (res, us) = timed(|| {
            let mut ok = true;
            let mut one_part = true;
            for c in &pt.chars {
                let a = self.psi_plus(m, &self.psi_minus(m, c));
                let b = if m >= 2 { self.phi_plus(m, &self.phi_minus(m, c)) } else { ClassFn::zero(1, c.len()) };
                ok &= a.add(&b) == *c;
                one_part &= a.is_zero() != b.is_zero();
            }
            (ok, one_part)
        });
        rep.push("bz", "mirabolic-splitting", label.clone(), res.0, true, res.0, us);
        rep.push("bz", "irreducible-has-one-part", label.clone(), res.1, true, res.1, 0);

        let (ok, us) = timed(|| {
            let mut cur = self.psi_plus(1, &ClassFn::from_ints(&[1]));
            for l in 2..=m {
                cur = self.phi_plus(l, &cur);
            }
            cur == self.ind_n_psi(m)
        });
        rep.push("bz", "gelfand-graev-is-iterated-induction", label, ok, true, ok, us);
        rep
    }

    /// Derivatives are genuine characters, reassemble `Res_{P_n} χ`, and
    /// `dim π^{(n)}` is the genericity flag, for every irreducible of `G_n`.
    pub fn filtration_report(&self) -> Result<VerificationReport> {
        let n = self.n;
        let top = self.gl(n);
        let label = format!("GL_{}(F_{})", n, self.q_ext());
        let mut rep = VerificationReport::new(label.clone());
        for (pi, chi) in top.table.chars.iter().enumerate() {
            let params = format!("{label} pi={pi} dim={}", top.table.degrees[pi]);
            let ((res, derivs), us) = timed(|| {
                let tau = self.restrict_top(chi);
                let d = self.derivatives_of(n, &tau);
                (self.reassemble(n, &d) == tau, d)
            });
            rep.push("bz", "filtration-reassembles-restriction", params.clone(), res, true, res, us);
            let mut genuine = true;
            for (k, d) in derivs.iter().enumerate() {
                genuine &= self.gl(n - k - 1).table.decompose_character(d).is_ok();
            }
            rep.push("bz", "derivatives-are-characters", params.clone(), genuine, true, genuine, 0);
            let top_dim = derivs[n - 1].integer_at(0).unwrap_or(-1);
            let generic = self.is_generic(n, chi)?;
            let pass = top_dim == generic as i64;
            rep.push("bz", "top-derivative-detects-genericity", params, top_dim, generic as i64, pass, 0);
        }
        Ok(rep)
    }

    /// Kable's identity for `Φ⁺` over `Irr(P_{m-1})`, its `Ψ⁺` analogue over `Irr(G_{m-1})`,
    /// and multiplicity one for `Ind_{N_m}^{P_m} ψ`.
    pub fn kable_report(&self, m: usize) -> VerificationReport {
        let label = format!("P_{}(F_{})", m, self.q_ext());
        let mut rep = VerificationReport::new(label.clone());
        if m >= 2 {
            for (i, tau) in self.p(m - 1).table.chars.iter().enumerate() {
                let (v, us) = timed(|| (self.p_invariants(m, &self.phi_plus(m, tau)), self.p_invariants(m - 1, tau)));
                rep.check("bz", "kable-phi-plus", format!("{label} tau={i}"), v.0, v.1, us);
            }
        }
        for (i, rho) in self.gl(m - 1).table.chars.iter().enumerate() {
            let (v, us) = timed(|| (self.p_invariants(m, &self.psi_plus(m, rho)), self.g_invariants(m - 1, rho)));
            rep.check("bz", "kable-psi-plus", format!("{label} rho={i}"), v.0, v.1, us);
        }
        let (v, us) = timed(|| self.p_invariants(m, &self.ind_n_psi(m)));
        rep.check("bz", "kable-gelfand-graev-multiplicity-one", label, v, BigRational::one(), us);
        rep
    }

    /// `Ps(χ₁, χ₂)` with `χ₁ ≠ χ₂` trivial on `F^×`: `P(F)`-invariants 3,
    /// `GL_2(F)`-invariants 1, and derivative multiplicities `m₁ = 2`, `m₂ = 1`.
    pub fn counterexample_report(&self) -> Result<VerificationReport> {
        if self.n != 2 || !self.has_top() {
            return Err(Error::MissingContext("counterexample needs GL_2 with the top group".into()));
        }
        let label = format!("GL_2(F_{})", self.q_ext());
        let mut rep = VerificationReport::new(label.clone());
        let dist = self.gl1_distinguished();
        if dist.len() < 2 {
            return Err(Error::MissingContext("fewer than two characters of E^× trivial on F^×".into()));
        }
        let top = self.gl(2);
        let pairs: Vec<(usize, usize)> = subsets(dist.len(), 2).into_iter().map(|s| (dist[s[0]], dist[s[1]])).collect();
        for (a, b) in pairs {
            let params = format!("{label} chi1={a} chi2={b}");
            let (res, us) = timed(|| -> Result<_> {
                let chi = self.product_of_gl1(&[a, b])?;
                let p_inv = self.p_invariants(2, &self.restrict_top(&chi));
                let g_inv = self.g_invariants(2, &chi);
                Ok((chi, p_inv, g_inv))
            });
            let (chi, p_inv, g_inv) = res?;
            let irr = top.table.is_irreducible(&chi);
            rep.push("counterexample", "principal-series-irreducible", params.clone(), irr, true, irr, us);
            rep.check("counterexample", "mirabolic-invariants", params.clone(), p_inv.clone(), BigRational::from_integer(3.into()), 0);
            rep.check("counterexample", "subgroup-invariants", params.clone(), g_inv, BigRational::one(), 0);
            let d = self.derivatives_of(2, &self.restrict_top(&chi));
            let g1 = &self.gl(1).table;
            let m1 = g1.decompose_character(&d[0])?.iter().sum::<u64>();
            let m2 = d[1].integer_at(0).unwrap_or(-1);
            let first_ok = d[0] == g1.chars[a].add(&g1.chars[b]);
            rep.push("counterexample", "first-derivative-is-sum", params.clone(), first_ok, true, first_ok, 0);
            let sum = BigRational::from_integer(BigInt::from(m1 as i64 + m2));
            rep.check("counterexample", "invariants-equal-derivative-count", params, p_inv, sum, 0);
        }
        Ok(rep)
    }

    /// Derivatives of products of distinct characters of `E^×` follow the Leibniz rule.
    pub fn leibniz_report(&self) -> Result<VerificationReport> {
        let n = self.n;
        let label = format!("GL_{}(F_{})", n, self.q_ext());
        let mut rep = VerificationReport::new(label.clone());
        let g1 = self.gl(1);
        let r = g1.table.len();
        if r < n || !self.has_top() {
            return Ok(rep);
        }
        let chars: Vec<usize> = (0..n).collect();
        let (res, us) = timed(|| -> Result<bool> {
            let chi = self.product_of_gl1(&chars)?;
            let d = self.derivatives_of(n, &self.restrict_top(&chi));
            let mut ok = true;
            for k in 1..=n {
                let mut expect: Option<ClassFn> = None;
                for subset in subsets(n, k) {
                    let rest: Vec<usize> = chars.iter().copied().filter(|c| !subset.contains(c)).collect();
                    let term = if rest.is_empty() { ClassFn::from_ints(&[1]) } else { self.product_of_gl1(&rest)? };
                    expect = Some(match expect {
                        None => term,
                        Some(e) => e.add(&term),
                    });
                }
                ok &= d[k - 1] == expect.unwrap();
            }
            Ok(ok)
        });
        let res = res?;
        rep.push("bz", "leibniz-rule-for-characters", format!("{label} chars={chars:?}"), res, true, res, us);
        Ok(rep)
    }
}

/// Value at the identity.
pub fn degree(g: &FiniteGroup, f: &ClassFn) -> Option<i64> {
    f.integer_at(g.class_of(g.identity()) as usize)
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeEntry {
    pub k: usize,
    pub dim: i64,
    /// Multiplicities on `Irr(G_{n-k})` in table order.
    pub multiplicities: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeProfile {
    pub pi: usize,
    pub dim: u64,
    pub derivatives: Vec<DerivativeEntry>,
    /// Largest `k` with `π^{(k)} ≠ 0`.
    pub highest: usize,
}

impl BzTower {
    pub fn derivative_profile(&self, pi: usize) -> Result<DerivativeProfile> {
        let n = self.n;
        let top = self.gl(n);
        let d = self.derivatives_of(n, &self.restrict_top(&top.table.chars[pi]));
        let mut derivatives = Vec::with_capacity(n);
        for (i, f) in d.iter().enumerate() {
            let g = self.gl(n - i - 1);
            let multiplicities = g.table.decompose_character(f)?;
            derivatives.push(DerivativeEntry { k: i + 1, dim: degree(&g.group, f).unwrap_or(-1), multiplicities });
        }
        let highest = derivatives.iter().rev().find(|e| e.dim > 0).map_or(0, |e| e.k);
        Ok(DerivativeProfile { pi, dim: top.table.degrees[pi], derivatives, highest })
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Kirillov check for every cuspidal irreducible of `G_n`, and its failure for the non-cuspidal generic ones.
pub fn kirillov_report(t: &BzTower) -> Result<VerificationReport> {
    let n = t.n;
    let label = format!("GL_{}(F_{})", n, t.q_ext());
    let mut rep = VerificationReport::new(label.clone());
    let top = t.gl(n);
    for (pi, chi) in top.table.chars.iter().enumerate() {
        let cusp = t.is_cuspidal(n, chi);
        let generic = t.is_generic(n, chi)?;
        if !cusp && !generic {
            continue;
        }
        let (k, us) = timed(|| t.kirillov_check(chi));
        let params = format!("{label} pi={pi} dim={} cuspidal={cusp}", top.table.degrees[pi]);
        rep.push("bz", "restriction-to-mirabolic-is-kirillov-iff-cuspidal", params, k, cusp, k == cusp, us);
        if cusp {
            let d = t.derivatives_of(n, &t.restrict_top(chi));
            let shape = d[..n - 1].iter().all(|x| x.is_zero()) && d[n - 1].integer_at(0) == Some(1);
            rep.push("bz", "cuspidal-has-only-top-derivative", format!("{label} pi={pi}"), shape, true, shape, 0);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_tower;
    use crate::matgroup::DEFAULT_BUDGET;

    fn tower(p: u32, n: usize, top: bool) -> BzTower {
        BzTower::new(Arc::new(build_tower(p, 1).unwrap()), n, top, DEFAULT_BUDGET, 1).unwrap()
    }

    #[test]
    fn functor_dimensions() {
        let t = tower(2, 3, false);
        let q = 4i64;
        for m in 2..=3 {
            for a in &t.p(m - 1).table.chars {
                let d = degree(&t.p(m - 1).group, a).unwrap();
                assert_eq!(degree(&t.p(m).group, &t.phi_plus(m, a)).unwrap(), d * (q.pow(m as u32 - 1) - 1));
            }
        }
        for a in &t.gl(2).table.chars {
            assert_eq!(degree(&t.p(3).group, &t.psi_plus(3, a)), degree(&t.gl(2).group, a));
        }
    }

    #[test]
    fn relations_over_f4() {
        let t = tower(2, 3, false);
        for m in 1..=3 {
            let r = t.relations_report(m);
            assert!(r.all_pass(), "{:#?}", r.failures().collect::<Vec<_>>());
            let r = t.kable_report(m);
            assert!(r.all_pass(), "{:#?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn gl2_f4_filtration_and_kirillov() {
        let t = tower(2, 2, true);
        let r = t.filtration_report().unwrap();
        assert!(r.all_pass(), "{:#?}", r.failures().collect::<Vec<_>>());
        let k = kirillov_report(&t).unwrap();
        assert!(k.all_pass(), "{:#?}", k.failures().collect::<Vec<_>>());
        assert_eq!(k.suite("bz").filter(|r| r.params.contains("cuspidal=true") && r.anchor.starts_with("restriction")).count(), 6);
        assert!(t.leibniz_report().unwrap().all_pass());
    }

    #[test]
    fn counterexample_over_f9() {
        let t = tower(3, 2, true);
        let r = t.counterexample_report().unwrap();
        assert!(r.all_pass(), "{:#?}", r.rows);
        let (computed, predicted) = t.relative_cuspidal_classify().unwrap();
        assert_eq!(computed, predicted);
        assert!(!computed.is_empty());
    }
}
