//! Bessel functions of generic representations of `GL_n(K)`.
//!
//! A Bessel function is stored by its values on the relevant cells
//! `g_{n₁…n_k}(a)`; any other `g` is located by Bruhat factorization and picks
//! up the phase `ψ(n₁)ψ(n₂)`. Sums of Bessel values over a fixed set of group
//! elements only depend on the histogram of `(cell, phase)` over that set, which
//! is computed once and paired with every table.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chartable::CharacterTable;
use crate::classfn::{ClassFn, Histogram, Value};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::matgroup::bruhat::{bruhat_decompose, permutations, NCharacter};
use crate::matgroup::{FiniteGroup, Mat};
use crate::modular::{add_mod, common_eigenvectors, mul_mod, pow_mod, ModMat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevantCell {
    pub composition: Vec<usize>,
    pub torus: Vec<Fe>,
    pub mat: Mat,
}

/// Compositions of `n` (ordered, positive parts), fewest parts first.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for first in (1..=n).rev() {
            prefix.push(first);
            rec(n - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out.sort_by_key(|c| c.len());
    out
}

/// Anti-block-diagonal matrix with blocks `a_i I_{n_i}`, the first block top right.
pub fn cell_matrix(composition: &[usize], torus: &[Fe]) -> Mat {
    let n: usize = composition.iter().sum();
    let mut m = Mat::zero(n);
    let mut row = 0;
    for (&ni, &a) in composition.iter().zip(torus) {
        let col = n - row - ni;
        for t in 0..ni {
            m.set(row + t, col + t, a);
        }
        row += ni;
    }
    m
}

pub fn relevant_cells(n: usize, field: &Field) -> Vec<RelevantCell> {
    let units: Vec<Fe> = field.units().collect();
    let mut out = Vec::new();
    for comp in compositions(n) {
        let k = comp.len();
        let total = units.len().pow(k as u32);
        for mut idx in 0..total {
            let mut torus = Vec::with_capacity(k);
            for _ in 0..k {
                torus.push(units[idx % units.len()]);
                idx /= units.len();
            }
            out.push(RelevantCell { mat: cell_matrix(&comp, &torus), composition: comp.clone(), torus });
        }
    }
    out
}

/// Values of a Bessel function on the relevant cells.
#[derive(Clone, Debug)]
pub struct BesselTable {
    pub pi: usize,
    pub values: ClassFn,
}

impl BesselTable {
    pub fn at(&self, cell: usize) -> Cyclo {
        self.values.value(cell)
    }
}

/// The Gelfand–Graev data of an enumerated `GL_n(K)` with a fixed `ψ`.
pub struct GelfandGraev<'a> {
    pub group: &'a FiniteGroup,
    pub psi: NCharacter,
    pub n_idx: Vec<u32>,
    pub cells: Vec<RelevantCell>,
    pub identity_cell: usize,
    cell_index: HashMap<Mat, usize>,
    cell_hists: Vec<Histogram>,
}

impl<'a> GelfandGraev<'a> {
    pub fn new(group: &'a FiniteGroup, psi: NCharacter) -> Result<GelfandGraev<'a>> {
        let n = group.n();
        if psi.slots.len() != n.saturating_sub(1) {
            return Err(Error::Invalid("character slots do not match n".into()));
        }
        let field = group.field().clone();
        let n_idx: Vec<u32> =
            (0..group.len() as u32).filter(|&i| group.elem(i).is_upper_unitriangular()).collect();
        let q = field.size() as u64;
        if n_idx.len() as u64 != q.pow((n * n.saturating_sub(1) / 2) as u32) {
            return Err(Error::Invalid(format!("{} is not a full general linear group", group.name)));
        }
        let cells = relevant_cells(n, &field);
        let cell_index: HashMap<Mat, usize> = cells.iter().enumerate().map(|(i, c)| (c.mat, i)).collect();
        let identity_cell = cell_index[&Mat::identity(n)];
        let p = psi.p();
        let cell_hists = cells
            .iter()
            .map(|c| {
                Histogram::collect(
                    p,
                    n_idx.iter().map(|&u| {
                        let x = group.elem(u);
                        (group.class_of_mat(&c.mat.mul(x, &field)).unwrap(), psi.phase(x, &field))
                    }),
                )
            })
            .collect();
        Ok(GelfandGraev { group, psi, n_idx, cells, identity_cell, cell_index, cell_hists })
    }

    pub fn p(&self) -> u32 {
        self.psi.p()
    }

    pub fn field(&self) -> &Field {
        self.group.field()
    }

    pub fn n_order(&self) -> u64 {
        self.n_idx.len() as u64
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_of_monomial(&self, aw: &Mat) -> Option<usize> {
        self.cell_index.get(aw).copied()
    }

    /// `(cell, phase)` with `g = n₁ c n₂` and `ψ(n₁n₂) = ζ_p^phase`; `None` off the relevant cells.
    #[inline]
    pub fn locate(&self, g: &Mat) -> Option<(usize, u32)> {
        let b = bruhat_decompose(g, self.field());
        let c = *self.cell_index.get(&b.aw)?;
        Some((c, self.psi.bruhat_phase(&b, self.field())))
    }

    /// Histogram of `(cell, phase)` over a set of elements, and the number falling off the cells.
    pub fn histogram<'b>(&self, elems: impl IntoIterator<Item = &'b Mat>) -> (Histogram, u64) {
        let mut off = 0;
        let mut items = Vec::new();
        for g in elems {
            match self.locate(g) {
                Some(t) => items.push((t.0 as u32, t.1)),
                None => off += 1,
            }
        }
        (Histogram::collect(self.p(), items), off)
    }

    pub fn histogram_idx(&self, idx: &[u32]) -> (Histogram, u64) {
        self.histogram(idx.iter().map(|&i| self.group.elem(i)))
    }

    /// `Σ_g B(g)` over the set summarized by `h`.
    pub fn pair(&self, b: &BesselTable, h: &Histogram) -> Cyclo {
        h.pair(&b.values, 1)
    }

    pub fn eval(&self, b: &BesselTable, g: &Mat) -> Cyclo {
        match self.locate(g) {
            Some((c, ph)) => b.at(c).mul_root(self.p(), ph as i64),
            None => Cyclo::zero(),
        }
    }

    /// Cell values `(1/|N|) Σ_n ψ(n)⁻¹ χ(c n)` without the genericity check.
    pub fn bessel_values(&self, chi: &ClassFn) -> ClassFn {
        let m = crate::cyclo::lcm(chi.order(), self.p());
        let dens = vec![self.n_order() as i128 * chi.den() as i128; self.cells.len()];
        let rows: Vec<Vec<i128>> = self
            .cell_hists
            .iter()
            .map(|h| {
                let (mm, acc) = h.pair_dense(chi, -1);
                debug_assert_eq!(mm, m);
                crate::classfn::reduce_dense(m, &acc)
            })
            .collect();
        crate::chartable::from_canonical_rows(m, &rows, &dens)
    }

    /// Bessel function of an irreducible by the character sum.
    pub fn bessel_via_character(&self, table: &CharacterTable, pi: usize) -> Result<BesselTable> {
        let values = self.bessel_values(&table.chars[pi]);
        match values.rational_at(self.identity_cell) {
            Some(v) if v == num_rational::BigRational::from_integer(1.into()) => Ok(BesselTable { pi, values }),
            Some(v) if v == num_rational::BigRational::from_integer(0.into()) => Err(Error::NotGeneric),
            _ => Err(Error::Multiplicity(format!("Bessel value at identity of {pi} is not 0 or 1"))),
        }
    }

    /// Tables for every generic irreducible, in table order.
    pub fn all_bessel(&self, table: &CharacterTable) -> Result<Vec<BesselTable>> {
        let mut out = Vec::new();
        for pi in 0..table.len() {
            match self.bessel_via_character(table, pi) {
                Ok(b) => out.push(b),
                Err(Error::NotGeneric) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// `(1/|N|) Σ_n ψ(n)⁻¹ χ(g n)` at an arbitrary `g`, without using cells.
    pub fn bessel_direct(&self, chi: &ClassFn, g: &Mat) -> Cyclo {
        let f = self.field();
        let h = Histogram::collect(
            self.p(),
            self.n_idx.iter().map(|&u| {
                let x = self.group.elem(u);
                (self.group.class_of_mat(&g.mul(x, f)).unwrap(), self.psi.phase(x, f))
            }),
        );
        h.pair(chi, -1).scale_frac(1, self.n_order() as i64)
    }

    /// All monomial matrices `a w`.
    pub fn monomials(&self) -> Vec<Mat> {
        let n = self.group.n();
        let f = self.field();
        let units: Vec<Fe> = f.units().collect();
        let mut out = Vec::new();
        for perm in permutations(n) {
            let w = Mat::perm(&perm);
            for mut idx in 0..units.len().pow(n as u32) {
                let mut d = Vec::with_capacity(n);
                for _ in 0..n {
                    d.push(units[idx % units.len()]);
                    idx /= units.len();
                }
                out.push(Mat::diag(&d).mul(&w, f));
            }
        }
        out
    }

    /// Monomials `aw` whose stabilizer `{(n₁,n₂) : n₁ aw n₂ = aw}` lies in `ker ψ⊗ψ`,
    /// i.e. the double cosets carrying a nonzero `(N,ψ)`-bi-equivariant function.
    pub fn admissible_monomials(&self) -> Vec<Mat> {
        let f = self.field();
        self.monomials()
            .into_iter()
            .filter(|aw| {
                let awi = aw.inv(f).unwrap();
                self.n_idx.iter().all(|&u| {
                    let n2 = self.group.elem(u);
                    let n1 = aw.mul(&n2.inv(f).unwrap(), f).mul(&awi, f);
                    !n1.is_upper_unitriangular() || (self.psi.phase(&n1, f) + self.psi.phase(n2, f)) % self.p() == 0
                })
            })
            .collect()
    }

    /// Character-sum values at every monomial off the relevant cells; all must vanish.
    pub fn off_cell_values(&self, chi: &ClassFn) -> Vec<(Mat, Cyclo)> {
        self.monomials()
            .into_iter()
            .filter(|aw| !self.cell_index.contains_key(aw))
            .map(|aw| {
                let v = self.bessel_direct(chi, &aw);
                (aw, v)
            })
            .collect()
    }

    /// Number of elements in each double coset `N c N`.
    pub fn cell_sizes(&self) -> Vec<u64> {
        let mut out = vec![0; self.cells.len()];
        for g in self.group.elements() {
            if let Some((c, _)) = self.locate(g) {
                out[c] += 1;
            }
        }
        out
    }

    /// `|G| / Σ_g B(g)B(g⁻¹)`; the phases cancel so the sum is cell-wise.
    pub fn dim_from_bessel(&self, b: &BesselTable, cell_sizes: &[u64]) -> Result<u64> {
        let f = self.field();
        let mut total = Cyclo::zero();
        for (c, cell) in self.cells.iter().enumerate() {
            if cell_sizes[c] == 0 {
                continue;
            }
            let inv = self.eval(b, &cell.mat.inv(f).unwrap());
            total += &(&b.at(c) * &inv).scale_frac(cell_sizes[c] as i64, 1);
        }
        let r = total.to_rational().ok_or_else(|| Error::Mismatch("Σ B(g)B(g⁻¹) is irrational".into()))?;
        let d = num_rational::BigRational::from_integer(self.group.order().into()) / r;
        if !d.is_integer() {
            return Err(Error::Mismatch(format!("|G|/Σ B(g)B(g⁻¹) = {d} is not an integer")));
        }
        use num_traits::ToPrimitive;
        Ok(d.to_integer().to_u64().unwrap())
    }

    /// `(1/|G|) Σ_g |B(g)|²`; `|B|` is constant on each double coset.
    pub fn mean_square(&self, b: &BesselTable, cell_sizes: &[u64]) -> Cyclo {
        let mut total = Cyclo::zero();
        for c in 0..self.cells.len() {
            if cell_sizes[c] > 0 {
                let v = b.at(c);
                total += &(&v * &v.conj()).scale_frac(cell_sizes[c] as i64, 1);
            }
        }
        total.scale_frac(1, self.group.order() as i64)
    }

    /// Structure constants of the `(N,ψ)`-bi-equivariant convolution algebra.
    pub fn hecke_algebra(&self) -> HeckeAlgebra {
        let r = self.cells.len();
        let p = self.p() as usize;
        let f = self.field();
        let mut data = vec![0i64; r * r * r * p];
        for x in self.group.elements() {
            let Some((a, px)) = self.locate(x) else { continue };
            let xi = x.inv(f).unwrap();
            for (c, cell) in self.cells.iter().enumerate() {
                if let Some((b, py)) = self.locate(&xi.mul(&cell.mat, f)) {
                    data[((a * r + c) * r + b) * p + (px + py) as usize % p] += 1;
                }
            }
        }
        HeckeAlgebra { r, p: self.p(), data, identity: self.identity_cell }
    }

    /// Spectral projection `(d/|G|) Σ_g W(g) B(x g⁻¹)` at a point.
    pub fn project(&self, b: &BesselTable, degree: u64, w: &dyn Fn(&Mat) -> Cyclo, x: &Mat) -> Cyclo {
        let f = self.field();
        let mut acc = Cyclo::zero();
        for g in self.group.elements() {
            let wv = w(g);
            if wv.is_zero() {
                continue;
            }
            acc += &(&wv * &self.eval(b, &x.mul(&g.inv(f).unwrap(), f)));
        }
        acc.scale_frac(degree as i64, self.group.order() as i64)
    }

    /// `Tr[π(g)T] = (d/|G|) Σ_x B((xg)^κ x⁻¹)` for the intertwiner `T W = W∘κ`,
    /// as a histogram over `x` (independent of `π`).
    pub fn twisted_trace_histogram(&self, g: &Mat, kappa: &dyn Fn(&Mat) -> Mat) -> Histogram {
        let f = self.field();
        let items = self.group.elements().iter().filter_map(|x| {
            let y = kappa(&x.mul(g, f)).mul(&x.inv(f).unwrap(), f);
            self.locate(&y).map(|(c, ph)| (c as u32, ph))
        });
        Histogram::collect(self.p(), items.collect::<Vec<_>>())
    }

    pub fn twisted_trace(&self, b: &BesselTable, degree: u64, h: &Histogram) -> Cyclo {
        h.pair(&b.values, 1).scale_frac(degree as i64, self.group.order() as i64)
    }
}

/// Structure constants `L_a[c][b] = Σ_{x ∈ NaN, x⁻¹c ∈ NbN} ψ(x)ψ(x⁻¹c)`, so that
/// `(f_a * h)(c) = Σ_b L_a[c][b] h(b)` for bi-equivariant `h` given on cells.
pub struct HeckeAlgebra {
    pub r: usize,
    pub p: u32,
    data: Vec<i64>,
    pub identity: usize,
}

impl HeckeAlgebra {
    #[inline]
    fn entry(&self, a: usize, c: usize, b: usize) -> &[i64] {
        let p = self.p as usize;
        let i = ((a * self.r + c) * self.r + b) * p;
        &self.data[i..i + p]
    }

    fn is_zero_entry(v: &[i64]) -> bool {
        // Σ c_s ζ_p^s = 0 iff all c_s agree (p prime)
        v.iter().all(|&x| x == v[0])
    }

    /// `f_a * f_b = f_b * f_a` for all cells, exactly.
    pub fn is_commutative(&self) -> bool {
        let p = self.p as usize;
        let r = self.r;
        (0..r).all(|a| {
            (a + 1..r).all(|b| {
                (0..r).all(|c| {
                    let d: Vec<i64> = (0..p).map(|s| self.entry(a, c, b)[s] - self.entry(b, c, a)[s]).collect();
                    Self::is_zero_entry(&d)
                })
            })
        })
    }

    pub fn op_mod(&self, a: usize, l: u64, zp: u64) -> ModMat {
        let zs: Vec<u64> = (0..self.p).map(|s| pow_mod(zp, s as u64, l)).collect();
        let mut m = ModMat::zeros(self.r, self.r);
        for c in 0..self.r {
            for b in 0..self.r {
                let e = self.entry(a, c, b);
                let mut v = 0;
                for (s, &cnt) in e.iter().enumerate() {
                    if cnt != 0 {
                        v = add_mod(v, mul_mod(cnt as u64 % l, zs[s], l), l);
                    }
                }
                m.set(c, b, v);
            }
        }
        m
    }

    /// Common eigenvectors modulo the table prime, normalized at the identity cell.
    pub fn eigenvectors_mod(&self, table: &CharacterTable, seed: u64) -> Result<Vec<Vec<u64>>> {
        let l = table.prime();
        let zp = table.zeta_mod(self.p);
        let order: Vec<usize> = (0..self.r).filter(|&a| a != self.identity).collect();
        let vecs = if self.r == 1 {
            vec![vec![1]]
        } else {
            common_eigenvectors(self.r, &order, |a| self.op_mod(a, l, zp), l, seed)?
        };
        vecs.into_iter()
            .map(|v| {
                if v[self.identity] == 0 {
                    return Err(Error::EigenSeparation("Hecke eigenvector vanishes at identity".into()));
                }
                let s = crate::modular::inv_mod(v[self.identity], l);
                Ok(v.iter().map(|&x| mul_mod(x, s, l)).collect())
            })
            .collect()
    }

    /// `L = Σ_a r_a L_a` with seeded coefficients, as exact entries over `ζ_p`.
    pub fn generic_operator(&self, seed: u64) -> Vec<Vec<Value>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coef: Vec<i64> = (0..self.r).map(|_| rng.gen_range(1..=9)).collect();
        (0..self.r)
            .map(|c| {
                (0..self.r)
                    .map(|b| {
                        let mut v = vec![0i64; self.p as usize];
                        for (a, &ra) in coef.iter().enumerate() {
                            for (s, &x) in self.entry(a, c, b).iter().enumerate() {
                                v[s] += ra * x;
                            }
                        }
                        v.into_iter().enumerate().filter(|t| t.1 != 0).map(|(s, x)| (s as u32, x)).collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Applies an operator with entries over `ζ_p` to cell values.
pub fn apply_operator(op: &[Vec<Value>], p: u32, v: &ClassFn) -> ClassFn {
    let m = crate::cyclo::lcm(v.order(), p);
    let (sv, sp) = (m / v.order(), m / p);
    ClassFn::from_fn(m, v.den(), op.len(), |c| {
        let mut out = Vec::new();
        for (b, entry) in op[c].iter().enumerate() {
            for &(s, x) in entry {
                for &(e, a) in v.raw(b) {
                    out.push(((s * sp + e * sv) % m, x * a));
                }
            }
        }
        out
    })
}

/// Outcome of the Hecke-algebra route.
#[derive(Clone, Debug)]
pub struct HeckeReport {
    pub dimension: usize,
    pub commutative: bool,
    /// For each modular eigenvector, the index of the character-route table with the same image.
    pub matching: Vec<Option<usize>>,
    /// Character-route tables certified as exact eigenvectors of the generic operator.
    pub certified: Vec<bool>,
    /// Eigenvalues of the generic operator are pairwise distinct mod `l`.
    pub separated: bool,
}

impl HeckeReport {
    pub fn sets_equal(&self) -> bool {
        let mut seen: Vec<usize> = self.matching.iter().flatten().copied().collect();
        seen.sort_unstable();
        seen.dedup();
        self.commutative
            && self.separated
            && self.matching.iter().all(|m| m.is_some())
            && seen.len() == self.certified.len()
            && self.certified.iter().all(|&c| c)
    }
}

/// Bessel functions as common eigenvectors of the Hecke algebra, compared with
/// the character-route tables.
///
/// The eigenvectors are computed modulo the table prime, independently of the
/// characters. Exactness comes from a certificate: each character-route table is
/// checked exactly to be an eigenvector of one generic operator `L` whose
/// eigenvalues are pairwise distinct, so the exact eigenvectors of the
/// (verified commutative) algebra are exactly these tables.
pub fn bessel_via_hecke(
    gg: &GelfandGraev,
    table: &CharacterTable,
    tables: &[BesselTable],
    seed: u64,
) -> Result<HeckeReport> {
    let alg = gg.hecke_algebra();
    let commutative = alg.is_commutative();
    if !commutative {
        return Err(Error::Mismatch("Hecke algebra is not commutative".into()));
    }
    let vecs = alg.eigenvectors_mod(table, seed)?;
    let images: Vec<Vec<u64>> = tables.iter().map(|b| table.mod_image(&b.values)).collect::<Result<_>>()?;
    let matching = vecs.iter().map(|v| images.iter().position(|im| im == v)).collect();

    // a random combination can fail to separate; retry with derived seeds
    let l = table.prime();
    let mut certified = Vec::new();
    let mut separated = false;
    for attempt in 0..8u64 {
        let op = alg.generic_operator(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)));
        certified.clear();
        let mut eigen_mod = Vec::with_capacity(tables.len());
        for b in tables {
            let lb = apply_operator(&op, alg.p, &b.values);
            let lambda = ClassFn::new(lb.order(), lb.den(), vec![lb.raw(alg.identity).clone(); alg.r]);
            certified.push(lb.exact_eq(&b.values.mul_pointwise(&lambda)));
            eigen_mod.push(table.mod_image(&lambda)?[0]);
        }
        let mut sorted = eigen_mod.clone();
        sorted.sort_unstable();
        sorted.dedup();
        separated = sorted.len() == eigen_mod.len() && l > 0;
        if separated {
            break;
        }
    }
    Ok(HeckeReport { dimension: alg.r, commutative, matching, certified, separated })
}

/// A generic representation realized inside `Ind_N^G ψ`, spanned by right
/// translates `W_j = π(x_j) B` of its Bessel function.
pub struct WhittakerModel {
    pub dim: usize,
    pub basis: Vec<Mat>,
    pub points: Vec<Mat>,
    minv: Vec<Vec<Cyclo>>,
}

fn cyclo_inverse(m: &[Vec<Cyclo>]) -> Option<Vec<Vec<Cyclo>>> {
    let d = m.len();
    let mut a: Vec<Vec<Cyclo>> = m.to_vec();
    let mut inv: Vec<Vec<Cyclo>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { Cyclo::one() } else { Cyclo::zero() }).collect()).collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = a[col][col].inv()?;
        for j in 0..d {
            a[col][j] = (&a[col][j] * &s).reduce();
            inv[col][j] = (&inv[col][j] * &s).reduce();
        }
        for r in 0..d {
            if r != col && !a[r][col].is_zero() {
                let t = a[r][col].clone();
                for j in 0..d {
                    a[r][j] = (&a[r][j] - &(&t * &a[col][j])).reduce();
                    inv[r][j] = (&inv[r][j] - &(&t * &inv[col][j])).reduce();
                }
            }
        }
    }
    Some(inv)
}

impl WhittakerModel {
    /// Closes `{B}` under right translation by the group generators, tracking
    /// linear independence modulo the table prime, then inverts the evaluation
    /// matrix exactly.
    pub fn build(gg: &GelfandGraev, table: &CharacterTable, b: &BesselTable) -> Result<WhittakerModel> {
        let g = gg.group;
        let f = gg.field();
        let l = table.prime();
        let bmod = table.mod_image(&b.values)?;
        let zp = table.zeta_mod(gg.p());
        let eval_mod = |shift: &Mat| -> Vec<u64> {
            g.elements()
                .iter()
                .map(|y| match gg.locate(&y.mul(shift, f)) {
                    Some((c, ph)) => mul_mod(bmod[c], pow_mod(zp, ph as u64, l), l),
                    None => 0,
                })
                .collect()
        };
        let mut basis: Vec<Mat> = vec![Mat::identity(g.n())];
        let mut rows: Vec<Vec<u64>> = vec![eval_mod(&basis[0])];
        let mut queue = 0;
        while queue < basis.len() {
            let x = basis[queue];
            queue += 1;
            for &s in g.generators() {
                let y = x.mul(g.elem(s), f);
                let v = eval_mod(&y);
                let mut trial = rows.clone();
                trial.push(v.clone());
                if rank_mod(&trial, l) > rows.len() {
                    rows.push(v);
                    basis.push(y);
                }
            }
        }
        let d = basis.len();
        // pick evaluation points: pivot columns of the row space
        let mut mm = ModMat::zeros(d, g.len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                mm.set(i, j, v);
            }
        }
        let (pivots, _) = crate::modular::rref(&mut mm, l);
        let points: Vec<Mat> = pivots.iter().map(|&j| *g.elem(j as u32)).collect();
        let m: Vec<Vec<Cyclo>> =
            points.iter().map(|y| basis.iter().map(|x| gg.eval(b, &y.mul(x, f))).collect()).collect();
        let minv = cyclo_inverse(&m).ok_or_else(|| Error::Mismatch("evaluation matrix is singular".into()))?;
        Ok(WhittakerModel { dim: d, basis, points, minv })
    }

    /// Coordinates of a function in the model given its values at the evaluation points.
    pub fn coords(&self, values: &[Cyclo]) -> Vec<Cyclo> {
        self.minv
            .iter()
            .map(|row| row.iter().zip(values).map(|(a, v)| a * v).sum::<Cyclo>().reduce())
            .collect()
    }

    /// Matrix of `π(g)` (columns are images of basis vectors).
    pub fn action(&self, gg: &GelfandGraev, b: &BesselTable, g: &Mat) -> Vec<Vec<Cyclo>> {
        let f = gg.field();
        let cols: Vec<Vec<Cyclo>> = self
            .basis
            .iter()
            .map(|x| {
                let vals: Vec<Cyclo> = self.points.iter().map(|y| gg.eval(b, &y.mul(g, f).mul(x, f))).collect();
                self.coords(&vals)
            })
            .collect();
        transpose(&cols)
    }

    /// Matrix of `T W = W ∘ κ`.
    pub fn intertwiner(&self, gg: &GelfandGraev, b: &BesselTable, kappa: &dyn Fn(&Mat) -> Mat) -> Vec<Vec<Cyclo>> {
        let f = gg.field();
        let cols: Vec<Vec<Cyclo>> = self
            .basis
            .iter()
            .map(|x| {
                let vals: Vec<Cyclo> = self.points.iter().map(|y| gg.eval(b, &kappa(y).mul(x, f))).collect();
                self.coords(&vals)
            })
            .collect();
        transpose(&cols)
    }

    /// `W ∘ κ` lies in the model for every basis vector (checked on all of `G`).
    pub fn intertwiner_preserves_model(&self, gg: &GelfandGraev, b: &BesselTable, kappa: &dyn Fn(&Mat) -> Mat) -> bool {
        let f = gg.field();
        self.basis.iter().all(|x| {
            let target = |y: &Mat| gg.eval(b, &kappa(y).mul(x, f));
            let vals: Vec<Cyclo> = self.points.iter().map(&target).collect();
            let c = self.coords(&vals);
            gg.group.elements().iter().all(|y| {
                let rebuilt: Cyclo = self.basis.iter().zip(&c).map(|(xj, cj)| cj * &gg.eval(b, &y.mul(xj, f))).sum();
                rebuilt == target(y)
            })
        })
    }

    /// `W_j(n g) = ψ(n) W_j(g)` at the given pairs.
    pub fn left_equivariant(&self, gg: &GelfandGraev, b: &BesselTable, pairs: &[(Mat, Mat)]) -> bool {
        let f = gg.field();
        self.basis.iter().all(|x| {
            pairs.iter().all(|(n, g)| {
                let lhs = gg.eval(b, &n.mul(g, f).mul(x, f));
                let rhs = gg.eval(b, &g.mul(x, f)).mul_root(gg.p(), gg.psi.phase(n, f) as i64);
                lhs == rhs
            })
        })
    }
}

pub fn transpose(m: &[Vec<Cyclo>]) -> Vec<Vec<Cyclo>> {
    let d = m.len();
    (0..d).map(|i| (0..d).map(|j| m[j][i].clone()).collect()).collect()
}

pub fn mat_mul(a: &[Vec<Cyclo>], b: &[Vec<Cyclo>]) -> Vec<Vec<Cyclo>> {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| &a[i][k] * &b[k][j]).sum::<Cyclo>().reduce()).collect())
        .collect()
}

pub fn trace(a: &[Vec<Cyclo>]) -> Cyclo {
    (0..a.len()).map(|i| a[i][i].clone()).sum()
}

pub fn is_identity_matrix(a: &[Vec<Cyclo>]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i][j] == if i == j { Cyclo::one() } else { Cyclo::zero() }))
}

fn rank_mod(rows: &[Vec<u64>], l: u64) -> usize {
    let mut m = ModMat::zeros(rows.len(), rows[0].len());
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m.rank(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartable::{character_table, genericity_multiplicity};
    use crate::field::AdditiveCharacter;
    use std::sync::Arc;

    fn split(p: u32, d: u32, n: usize) -> (FiniteGroup, CharacterTable) {
        let f = Arc::new(Field::new(p, d).unwrap());
        let g = FiniteGroup::general_linear(f, n, 1 << 21).unwrap();
        let t = character_table(&g, 1).unwrap();
        (g, t)
    }

    fn gg_of(g: &FiniteGroup) -> GelfandGraev<'_> {
        let psi = AdditiveCharacter::on_field(g.field(), 1);
        GelfandGraev::new(g, NCharacter::standard(psi, g.n())).unwrap()
    }

    #[test]
    fn cell_counts() {
        let f2 = Field::new(2, 1).unwrap();
        let f4 = Field::new(2, 2).unwrap();
        assert_eq!(relevant_cells(2, &f2).len(), 2);
        assert_eq!(relevant_cells(2, &f4).len(), 12);
        assert_eq!(relevant_cells(3, &f4).len(), 48);
        let c = cell_matrix(&[1, 2], &[5, 7]);
        assert_eq!(c, Mat::from_rows(&[&[0u32, 0, 5][..], &[7, 0, 0], &[0, 7, 0]]));
    }

    #[test]
    fn s3_bessel_values_by_hand() {
        let (g, t) = split(2, 1, 2);
        let gg = gg_of(&g);
        let w0 = gg.cell_of_monomial(&Mat::antidiag(2)).unwrap();
        let tabs = gg.all_bessel(&t).unwrap();
        assert_eq!(tabs.len(), 2);
        for b in &tabs {
            let want = if t.degrees[b.pi] == 2 { Cyclo::from_frac(1, 2) } else { Cyclo::from_int(-1) };
            assert_eq!(b.at(w0), want);
            assert_eq!(b.at(gg.identity_cell), Cyclo::one());
        }
        let sizes = gg.cell_sizes();
        for b in &tabs {
            assert_eq!(gg.dim_from_bessel(b, &sizes).unwrap(), t.degrees[b.pi]);
        }
    }

    #[test]
    fn generic_counts_gl2_f4() {
        let (g, t) = split(2, 2, 2);
        let gg = gg_of(&g);
        let h = Histogram::collect(
            gg.p(),
            gg.n_idx.iter().map(|&u| (g.class_of(u), gg.psi.phase(g.elem(u), gg.field()))),
        );
        let mut generic = 0;
        let mut deg_sum = 0;
        for (i, ch) in t.chars.iter().enumerate() {
            if genericity_multiplicity(ch, &h).unwrap() == 1 {
                generic += 1;
                deg_sum += t.degrees[i];
            }
        }
        assert_eq!(generic, 12);
        assert_eq!(deg_sum, 180 / 4);
        assert_eq!(gg.all_bessel(&t).unwrap().len(), gg.num_cells());
    }

    #[test]
    fn evaluator_agrees_with_direct_sum_and_support() {
        let (g, t) = split(3, 1, 2);
        let gg = gg_of(&g);
        let tabs = gg.all_bessel(&t).unwrap();
        for b in &tabs {
            let chi = &t.chars[b.pi];
            for x in g.elements() {
                assert_eq!(gg.eval(b, x), gg.bessel_direct(chi, x));
            }
            assert!(gg.off_cell_values(chi).iter().all(|(_, v)| v.is_zero()));
        }
        let adm: Vec<Mat> = gg.admissible_monomials();
        assert_eq!(adm.len(), gg.num_cells());
        assert!(adm.iter().all(|m| gg.cell_of_monomial(m).is_some()));
    }

    #[test]
    fn hecke_route_matches_characters() {
        for (p, d, n) in [(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 3)] {
            let (g, t) = split(p, d, n);
            let gg = gg_of(&g);
            let tabs = gg.all_bessel(&t).unwrap();
            let rep = bessel_via_hecke(&gg, &t, &tabs, 7).unwrap();
            assert_eq!(rep.dimension, tabs.len());
            assert!(rep.sets_equal(), "{p} {d} {n}: {rep:?}");
        }
    }

    #[test]
    fn whittaker_model_of_steinberg_s3() {
        let (g, t) = split(2, 1, 2);
        let gg = gg_of(&g);
        let st = gg.all_bessel(&t).unwrap().into_iter().find(|b| t.degrees[b.pi] == 2).unwrap();
        let model = WhittakerModel::build(&gg, &t, &st).unwrap();
        assert_eq!(model.dim, 2);
        for (k, &rep) in g.classes().reps.iter().enumerate() {
            let tr = trace(&model.action(&gg, &st, g.elem(rep)));
            assert_eq!(tr, t.chars[st.pi].value(k));
        }
    }
}
