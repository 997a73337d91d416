//! Character tables by the Burnside–Dixon method.
//!
//! Class matrices are reduced modulo a prime `l ≡ 1 (mod m)` where `m` is the
//! exponent (times the characteristic); their common eigenvectors give the
//! central characters, degrees follow from the class-size relation and values
//! are lifted to `Z[ζ_m]` through the power maps.
//!
//! Exactness: every lifted character is Galois-consistent by construction, so
//! each Hermitian product `Σ|C_k| χ_a(g_k) conj(χ_b(g_k))` is a rational integer
//! bounded by `|G|²`. Since `l > 2|G|²`, the congruences checked mod `l` are
//! equalities.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use rayon::prelude::*;

use crate::classfn::{ClassFn, Histogram, Value};
use crate::cyclo::{lcm, Cyclo};
use crate::error::{Error, Result};
use crate::matgroup::{FiniteGroup, Mat};
use crate::modular::{add_mod, common_eigenvectors, inv_mod, mul_mod, prime_with_root, ModMat};

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub name: String,
    pub order: u64,
    /// Order of the roots of unity in which values live.
    pub m: u32,
    pub sizes: Vec<u64>,
    pub orders: Vec<u32>,
    pub inverse_class: Vec<u32>,
    pub identity_class: u32,
    /// `power_maps[k][j]` is the class of `g_k^j` for `j < orders[k]`.
    pub power_maps: Vec<Vec<u32>>,
    pub chars: Vec<ClassFn>,
    pub degrees: Vec<u64>,
    prime: u64,
    zpow: Arc<Vec<u64>>,
    modular: Vec<Vec<u64>>,
}

fn signed(x: u64, l: u64) -> i128 {
    if x > l / 2 {
        x as i128 - l as i128
    } else {
        x as i128
    }
}

fn to_mod_i(c: i64, l: u64) -> u64 {
    (c as i128).rem_euclid(l as i128) as u64
}

fn power_maps(g: &FiniteGroup) -> Vec<Vec<u32>> {
    let cl = g.classes();
    let f = g.field().clone();
    (0..cl.len())
        .into_par_iter()
        .map(|k| {
            let x = *g.elem(cl.reps[k]);
            let o = cl.orders[k] as usize;
            let mut out = Vec::with_capacity(o);
            let mut y = Mat::identity(g.n());
            for _ in 0..o {
                out.push(g.class_of_mat(&y).unwrap());
                y = y.mul(&x, &f);
            }
            out
        })
        .collect()
}

/// `(A_i)[j][k] = #{x ∈ C_i : x⁻¹ z_k ∈ C_j}` reduced mod `l`.
fn class_matrix(g: &FiniteGroup, members: &[u32], l: u64) -> ModMat {
    let cl = g.classes();
    let r = cl.len();
    let cols: Vec<Vec<u64>> = (0..r)
        .into_par_iter()
        .map(|k| {
            let z = cl.reps[k];
            let mut col = vec![0u64; r];
            for &x in members {
                col[g.class_of(g.mul(g.inv(x), z)) as usize] += 1;
            }
            col
        })
        .collect();
    let mut a = ModMat::zeros(r, r);
    for (k, col) in cols.iter().enumerate() {
        for (j, &c) in col.iter().enumerate() {
            a.set(j, k, c % l);
        }
    }
    a
}

/// Character table of an enumerated group.
pub fn character_table(g: &FiniteGroup, seed: u64) -> Result<CharacterTable> {
    let mut last = None;
    for attempt in 0..4 {
        match dixon(g, seed.wrapping_add(attempt)) {
            Ok(t) => return Ok(t),
            Err(e @ Error::EigenSeparation(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn dixon(g: &FiniteGroup, seed: u64) -> Result<CharacterTable> {
    let cl = g.classes();
    let r = cl.len();
    let order = g.order();
    let m = lcm(g.exponent() as u32, g.field().p());
    let lower = (1u64 << 40).max(order.saturating_mul(order).saturating_mul(2));
    let (l, z) = prime_with_root(m, lower);
    let zpow: Vec<u64> = (0..m).scan(1u64, |acc, _| {
        let v = *acc;
        *acc = mul_mod(*acc, z, l);
        Some(v)
    })
    .collect();
    let pmaps = power_maps(g);
    let id = g.class_of(g.identity()) as usize;
    let lists = g.class_lists();

    let mut op_order: Vec<usize> = (0..r).filter(|&i| i != id).collect();
    // larger classes first: they separate more characters per matrix
    op_order.sort_by_key(|&i| (std::cmp::Reverse(cl.sizes[i]), i));
    if seed % 2 == 1 {
        op_order.reverse();
    }
    let vecs = if r == 1 {
        vec![vec![1u64]]
    } else {
        common_eigenvectors(r, &op_order, |i| class_matrix(g, &lists[i], l), l, seed)?
    };
    if vecs.len() != r {
        return Err(Error::EigenSeparation(format!("{} eigenvectors for {} classes", vecs.len(), r)));
    }

    let size_inv: Vec<u64> = cl.sizes.iter().map(|&s| inv_mod(s % l, l)).collect();
    let mut rows: Vec<(u64, Vec<u64>)> = Vec::with_capacity(r);
    for v in vecs {
        if v[id] == 0 {
            return Err(Error::EigenSeparation("eigenvector vanishes at identity".into()));
        }
        let s = inv_mod(v[id], l);
        let w: Vec<u64> = v.iter().map(|&x| mul_mod(x, s, l)).collect();
        let mut sum = 0;
        for k in 0..r {
            let kk = cl.inverse_class[k] as usize;
            sum = add_mod(sum, mul_mod(mul_mod(w[k], w[kk], l), size_inv[k], l), l);
        }
        if sum == 0 {
            return Err(Error::EigenSeparation("degenerate norm".into()));
        }
        let d2 = mul_mod(order % l, inv_mod(sum, l), l);
        let d = d2.sqrt();
        if d == 0 || d * d != d2 || d2 > order {
            return Err(Error::EigenSeparation(format!("degree square {d2} is not a square divisor bound")));
        }
        let vals: Vec<u64> = (0..r).map(|k| mul_mod(mul_mod(d % l, w[k], l), size_inv[k], l)).collect();
        rows.push((d, vals));
    }

    let mut chars = Vec::with_capacity(r);
    for (d, vals) in &rows {
        chars.push(lift_character(*d, vals, &pmaps, &cl.orders, m, l, &zpow)?);
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let keys: Vec<(u64, Vec<Vec<i128>>)> = idx
        .iter()
        .map(|&i| (rows[i].0, (0..r).map(|k| chars[i].canonical(k)).map(|v| v.into_iter().map(|x| -x).collect()).collect()))
        .collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let chars: Vec<ClassFn> = idx.iter().map(|&i| chars[i].clone()).collect();
    let degrees: Vec<u64> = idx.iter().map(|&i| rows[i].0).collect();
    let modular: Vec<Vec<u64>> = idx.iter().map(|&i| rows[i].1.clone()).collect();

    let t = CharacterTable {
        name: g.name.clone(),
        order,
        m,
        sizes: cl.sizes.clone(),
        orders: cl.orders.clone(),
        inverse_class: cl.inverse_class.clone(),
        identity_class: id as u32,
        power_maps: pmaps,
        chars,
        degrees,
        prime: l,
        zpow: Arc::new(zpow),
        modular,
    };
    t.verify_orthogonality()?;
    Ok(t)
}

/// Rebuilds a table from stored characters, recomputing the modular data and
/// re-verifying both orthogonality relations.
pub(crate) fn assemble(g: &FiniteGroup, chars: Vec<ClassFn>, degrees: Vec<u64>) -> Result<CharacterTable> {
    let cl = g.classes();
    let order = g.order();
    let m = lcm(g.exponent() as u32, g.field().p());
    if chars.len() != cl.len() || degrees.len() != cl.len() || chars.iter().any(|c| c.len() != cl.len() || m % c.order() != 0) {
        return Err(Error::CacheCorrupt("stored table does not fit the class inventory".into()));
    }
    let lower = (1u64 << 40).max(order.saturating_mul(order).saturating_mul(2));
    let (l, z) = prime_with_root(m, lower);
    let zpow: Vec<u64> = (0..m).scan(1u64, |acc, _| {
        let v = *acc;
        *acc = mul_mod(*acc, z, l);
        Some(v)
    })
    .collect();
    let mut t = CharacterTable {
        name: g.name.clone(),
        order,
        m,
        sizes: cl.sizes.clone(),
        orders: cl.orders.clone(),
        inverse_class: cl.inverse_class.clone(),
        identity_class: g.class_of(g.identity()),
        power_maps: power_maps(g),
        chars,
        degrees,
        prime: l,
        zpow: Arc::new(zpow),
        modular: Vec::new(),
    };
    t.modular = t.chars.iter().map(|c| t.mod_image(c)).collect::<Result<_>>()?;
    let id = t.identity_class as usize;
    if t.chars.iter().zip(&t.degrees).any(|(c, &d)| c.integer_at(id) != Some(d as i64)) {
        return Err(Error::CacheCorrupt("stored degrees disagree with the characters".into()));
    }
    t.verify_orthogonality()?;
    Ok(t)
}

/// Eigenvalue multiplicities of `g_k` from the values on its powers.
fn lift_character(d: u64, vals: &[u64], pmaps: &[Vec<u32>], orders: &[u32], m: u32, l: u64, zpow: &[u64]) -> Result<ClassFn> {
    let mut out: Vec<Value> = Vec::with_capacity(vals.len());
    for k in 0..vals.len() {
        let o = orders[k] as usize;
        let step = (m as usize) / o;
        let o_inv = inv_mod(o as u64 % l, l);
        let mut terms = Vec::new();
        let mut total = 0u64;
        let mut check = 0u64;
        for s in 0..o {
            let mut acc = 0u64;
            for j in 0..o {
                let e = (o - (j * s) % o) % o;
                acc = add_mod(acc, mul_mod(vals[pmaps[k][j] as usize], zpow[e * step], l), l);
            }
            let mu = mul_mod(acc, o_inv, l);
            if mu > d {
                return Err(Error::EigenSeparation(format!("eigenvalue multiplicity {mu} exceeds degree {d}")));
            }
            if mu > 0 {
                terms.push(((s * step) as u32, mu as i64));
                total += mu;
                check = add_mod(check, mul_mod(mu, zpow[s * step], l), l);
            }
        }
        if total != d || check != vals[k] {
            return Err(Error::EigenSeparation("inconsistent lift through power maps".into()));
        }
        out.push(terms);
    }
    Ok(ClassFn::new(m, 1, out))
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.sizes.len()
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Image of `ζ_order` modulo the table prime (`order` divides `m`).
    pub fn zeta_mod(&self, order: u32) -> u64 {
        assert_eq!(self.m % order, 0);
        crate::modular::pow_mod(self.zpow[1 % self.zpow.len()], (self.m / order) as u64, self.prime)
    }

    pub fn cyclo_mod(&self, c: &Cyclo) -> Option<u64> {
        if self.m % c.order() != 0 {
            return None;
        }
        c.to_mod(self.prime, self.zpow[1 % self.zpow.len()], self.m)
    }

    pub fn trivial(&self) -> usize {
        self.chars.iter().position(|c| (0..self.num_classes()).all(|k| c.integer_at(k) == Some(1))).unwrap()
    }

    pub fn constant(&self, c: i64) -> ClassFn {
        ClassFn::from_ints(&vec![c; self.num_classes()])
    }

    fn verify_orthogonality(&self) -> Result<()> {
        let l = self.prime;
        let r = self.len();
        let deg2: u128 = self.degrees.iter().map(|&d| d as u128 * d as u128).sum();
        if deg2 != self.order as u128 {
            return Err(Error::Mismatch(format!("sum of squared degrees {deg2} != {}", self.order)));
        }
        let x = &self.modular;
        let ord = self.order % l;
        let bad_row = (0..r).into_par_iter().any(|a| {
            (0..r).any(|b| {
                let mut s = 0;
                for k in 0..r {
                    let t = mul_mod(x[a][k], x[b][self.inverse_class[k] as usize], l);
                    s = add_mod(s, mul_mod(t, self.sizes[k] % l, l), l);
                }
                s != if a == b { ord } else { 0 }
            })
        });
        let bad_col = (0..r).into_par_iter().any(|j| {
            (0..r).any(|k| {
                let mut s = 0;
                for a in 0..r {
                    s = add_mod(s, mul_mod(x[a][j], x[a][self.inverse_class[k] as usize], l), l);
                }
                let want = if j == k { (self.order / self.sizes[j]) % l } else { 0 };
                s != want
            })
        });
        if bad_row || bad_col {
            return Err(Error::Mismatch("orthogonality relations fail".into()));
        }
        Ok(())
    }

    /// Image of a class function under `ζ_m ↦ z` modulo the table prime.
    pub fn mod_image(&self, f: &ClassFn) -> Result<Vec<u64>> {
        if self.m % f.order() != 0 {
            let g = f.shrink();
            if g.order() != f.order() {
                return self.mod_image(&g);
            }
            return Err(Error::Invalid(format!("values of order {} outside Q(ζ_{})", f.order(), self.m)));
        }
        let l = self.prime;
        let step = (self.m / f.order()) as usize;
        let dinv = inv_mod(f.den() as u64 % l, l);
        Ok((0..f.len())
            .map(|k| {
                let mut s = 0;
                for &(e, c) in f.raw(k) {
                    s = add_mod(s, mul_mod(to_mod_i(c, l), self.zpow[e as usize * step], l), l);
                }
                mul_mod(s, dinv, l)
            })
            .collect())
    }

    /// Coefficients of `f` on the irreducibles, verified exactly.
    pub fn decompose(&self, f: &ClassFn) -> Result<Vec<BigRational>> {
        let l = self.prime;
        let r = self.len();
        let img = self.mod_image(f)?;
            let nums: Vec<i128> = (0..r)
            .map(|a| {
                let mut s = 0;
                for k in 0..r {
                    let t = mul_mod(img[k], self.modular[a][self.inverse_class[k] as usize], l);
                    s = add_mod(s, mul_mod(t, self.sizes[k] % l, l), l);
                }
                // Σ|C_k| f χ̄ = |G|⟨f,χ⟩; scaled by den to clear f's denominator
                signed(mul_mod(s, f.den() as u64 % l, l), l)
            })
            .collect();
        if nums.iter().any(|&x| x.abs() > i64::MAX as i128 / 4) {
            return Err(Error::Mismatch("decomposition coefficients out of range".into()));
        }
        let items: Vec<(i64, &ClassFn)> = nums.iter().zip(&self.chars).map(|(&c, ch)| (c as i64, ch)).collect();
        let comb = ClassFn::linear_combination(r, &items);
        let lhs = f.scale(self.order as i64 * f.den(), 1);
        if !comb.exact_eq(&lhs) {
            return Err(Error::Mismatch("class function is not in the span reconstructed mod l".into()));
        }
        let den = BigInt::from(self.order) * BigInt::from(f.den());
        Ok(nums.into_iter().map(|x| BigRational::new(BigInt::from(x), den.clone())).collect())
    }

    /// Integer multiplicities; errors unless `f` is a virtual character.
    pub fn decompose_virtual(&self, f: &ClassFn) -> Result<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.decompose(f)?
            .into_iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(x.to_integer().to_i64().unwrap())
                } else {
                    Err(Error::Mismatch(format!("non-integral multiplicity {x}")))
                }
            })
            .collect()
    }

    /// Multiplicities of a genuine character (non-negative integers).
    pub fn decompose_character(&self, f: &ClassFn) -> Result<Vec<u64>> {
        let v = self.decompose_virtual(f)?;
        if v.iter().any(|&x| x < 0) {
            return Err(Error::Mismatch("negative multiplicity in a character".into()));
        }
        Ok(v.into_iter().map(|x| x as u64).collect())
    }

    pub fn combine(&self, mults: &[i64]) -> ClassFn {
        let items: Vec<(i64, &ClassFn)> = mults.iter().copied().zip(&self.chars).collect();
        ClassFn::linear_combination(self.num_classes(), &items)
    }

    /// Index of the irreducible equal to `f`, if any.
    pub fn find(&self, f: &ClassFn) -> Option<usize> {
        let v = self.decompose_virtual(f).ok()?;
        let pos = v.iter().position(|&x| x == 1)?;
        (v.iter().filter(|&&x| x != 0).count() == 1).then_some(pos)
    }

    /// Exact `⟨f, g⟩`.
    pub fn inner(&self, f: &ClassFn, g: &ClassFn) -> Option<BigRational> {
        f.inner(g, &self.sizes, self.order)
    }

    pub fn is_irreducible(&self, f: &ClassFn) -> bool {
        self.find(f).is_some()
    }

    /// Index of `χ ∘ φ` for the class permutation `perm` induced by an automorphism.
    pub fn twist_index(&self, i: usize, perm: &[u32]) -> Result<usize> {
        let f = self.chars[i].pullback(perm);
        self.find(&f).ok_or_else(|| Error::Mismatch("twist is not irreducible".into()))
    }

    pub fn conj_index(&self, i: usize) -> usize {
        self.twist_index(i, &self.inverse_class).expect("complex conjugate is irreducible")
    }

    /// `(1/|S|) Σ c·f(k)·ζ^{sign·e}` for a histogram over a subset `S`.
    pub fn average(f: &ClassFn, h: &Histogram, sign: i64) -> Cyclo {
        h.pair(f, sign).scale_frac(1, h.total())
    }
}

/// Class of each class representative of `sub` inside `g`.
pub fn fusion(sub: &FiniteGroup, g: &FiniteGroup) -> Result<Vec<u32>> {
    sub.classes()
        .reps
        .iter()
        .map(|&x| g.class_of_mat(sub.elem(x)).ok_or_else(|| Error::Invalid(format!("{} is not inside {}", sub.name, g.name))))
        .collect()
}

/// Permutation of classes induced by an automorphism of `g`.
pub fn class_twist(g: &FiniteGroup, phi: impl Fn(&Mat) -> Mat) -> Result<Vec<u32>> {
    g.classes()
        .reps
        .iter()
        .map(|&x| g.class_of_mat(&phi(g.elem(x))).ok_or_else(|| Error::Invalid("map leaves the group".into())))
        .collect()
}

pub fn restrict(f: &ClassFn, fusion: &[u32]) -> ClassFn {
    f.pullback(fusion)
}

/// `Ind_S^G f`: `(|G|/|S|)(1/|C_k|) Σ_{c→k} |C_c^S| f(c)`.
pub fn induce(f: &ClassFn, sub: &CharacterTable, fusion: &[u32], g: &CharacterTable) -> ClassFn {
    let r = g.num_classes();
    let mut groups: Vec<Vec<(usize, i64)>> = vec![Vec::new(); r];
    for (c, &k) in fusion.iter().enumerate() {
        groups[k as usize].push((c, sub.sizes[c] as i64));
    }
    weighted_class_sums(f, &groups, g.order, sub.order, &g.sizes)
}

/// Per target class `k`: `(|G|/(|H||C_k|)) Σ w·f(c)` over `groups[k] = [(c, w)]`.
pub(crate) fn weighted_class_sums(f: &ClassFn, groups: &[Vec<(usize, i64)>], g_order: u64, h_order: u64, sizes: &[u64]) -> ClassFn {
    let m = f.order();
    let mut num_rows: Vec<Vec<i128>> = Vec::with_capacity(groups.len());
    let mut dens: Vec<i128> = Vec::with_capacity(groups.len());
    for (k, grp) in groups.iter().enumerate() {
        let mut acc = vec![0i128; m as usize];
        for &(c, w) in grp {
            for &(e, a) in f.raw(c) {
                acc[e as usize] += w as i128 * a as i128;
            }
        }
        let canon = crate::classfn::reduce_dense(m, &acc);
        let mut num: Vec<i128> = canon.iter().map(|&x| x * g_order as i128).collect();
        let mut den = h_order as i128 * sizes[k] as i128 * f.den() as i128;
        let g = num.iter().fold(den, |acc, &x| acc.gcd(&x));
        if g > 1 {
            num.iter_mut().for_each(|x| *x /= g);
            den /= g;
        }
        num_rows.push(num);
        dens.push(den);
    }
    from_canonical_rows(m, &num_rows, &dens)
}

/// Class function from power-basis numerators with per-class denominators.
pub(crate) fn from_canonical_rows(m: u32, nums: &[Vec<i128>], dens: &[i128]) -> ClassFn {
    let den = dens.iter().fold(1i128, |acc, &d| acc.lcm(&d));
    let vals = nums
        .iter()
        .zip(dens)
        .map(|(row, &d)| {
            let s = den / d;
            row.iter()
                .enumerate()
                .filter(|t| *t.1 != 0)
                .map(|(j, &c)| (j as u32, i64::try_from(c * s).expect("value fits in i64")))
                .collect()
        })
        .collect();
    ClassFn::new(m, i64::try_from(den).expect("denominator fits in i64"), vals)
}

/// Harish-Chandra induction `χ₁ × χ₂` from the block upper parabolic with
/// Levi `GL_a × GL_b`.
pub fn parabolic_induce(
    g: &FiniteGroup,
    gt: &CharacterTable,
    ga: &FiniteGroup,
    chi1: &ClassFn,
    gb: &FiniteGroup,
    chi2: &ClassFn,
) -> Result<ClassFn> {
    let (a, b, n) = (ga.n(), gb.n(), g.n());
    if a + b != n {
        return Err(Error::MissingContext(format!("GL_{a} x GL_{b} is not a Levi of GL_{n}")));
    }
    let r1 = ga.num_classes();
    let hist = parabolic_histogram(g, ga, gb)?;
    let m = lcm(chi1.order(), chi2.order());
    let (s1, s2) = (m / chi1.order(), m / chi2.order());
    let flat = ClassFn::from_fn(m, chi1.den() * chi2.den(), r1 * gb.num_classes(), |c| {
        let (c1, c2) = (c % r1, c / r1);
        let mut v = Vec::new();
        for &(e, a) in chi1.raw(c1) {
            for &(t, b) in chi2.raw(c2) {
                v.push(((e * s1 + t * s2) % m, a * b));
            }
        }
        v
    });
    let p_order = hist.iter().map(|v| v.iter().map(|t| t.1).sum::<i64>()).sum::<i64>() as u64;
    Ok(weighted_class_sums(&flat, &hist, gt.order, p_order, &gt.sizes))
}

/// For each class `k` of `g`: counts of parabolic elements in `C_k` by Levi class pair.
fn parabolic_histogram(g: &FiniteGroup, ga: &FiniteGroup, gb: &FiniteGroup) -> Result<Vec<Vec<(usize, i64)>>> {
    let (a, b, n) = (ga.n(), gb.n(), g.n());
    let r1 = ga.num_classes();
    let mut map = vec![std::collections::BTreeMap::<usize, i64>::new(); g.num_classes()];
    for (i, x) in g.elements().iter().enumerate() {
        if (a..n).any(|r| (0..a).any(|c| x.get(r, c) != 0)) {
            continue;
        }
        let mut top = Mat::identity(a);
        let mut bot = Mat::identity(b);
        for r in 0..a {
            for c in 0..a {
                top.set(r, c, x.get(r, c));
            }
        }
        for r in 0..b {
            for c in 0..b {
                bot.set(r, c, x.get(a + r, a + c));
            }
        }
        let c1 = ga.class_of_mat(&top).ok_or_else(|| Error::MissingContext("Levi block".into()))? as usize;
        let c2 = gb.class_of_mat(&bot).ok_or_else(|| Error::MissingContext("Levi block".into()))? as usize;
        *map[g.class_of(i as u32) as usize].entry(c1 + r1 * c2).or_insert(0) += 1;
    }
    Ok(map.into_iter().map(|m| m.into_iter().collect()).collect())
}

/// `⟨Res_S χ, θ⟩_S` from a histogram of `S` by (class of `g`, phase of `θ`).
pub fn restriction_multiplicity(chi: &ClassFn, h: &Histogram) -> Cyclo {
    CharacterTable::average(chi, h, -1)
}

/// `(1/|N|) Σ_n χ(n) ψ(n)⁻¹` as an integer in `{0, 1}`.
pub fn genericity_multiplicity(chi: &ClassFn, n_hist: &Histogram) -> Result<u32> {
    let v = restriction_multiplicity(chi, n_hist);
    match v.to_i64() {
        Some(0) => Ok(0),
        Some(1) => Ok(1),
        _ => Err(Error::Multiplicity(format!("Gelfand-Graev multiplicity {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use num_traits::One;

    fn table(p: u32, d: u32, n: usize) -> (FiniteGroup, CharacterTable) {
        let f = Arc::new(Field::new(p, d).unwrap());
        let g = FiniteGroup::general_linear(f, n, 1 << 21).unwrap();
        let t = character_table(&g, 1).unwrap();
        (g, t)
    }

    fn degree_profile(t: &CharacterTable) -> Vec<(u64, usize)> {
        let mut out: Vec<(u64, usize)> = Vec::new();
        for &d in &t.degrees {
            match out.last_mut() {
                Some(x) if x.0 == d => x.1 += 1,
                _ => out.push((d, 1)),
            }
        }
        out
    }

    #[test]
    fn s3_table() {
        let (_, t) = table(2, 1, 2);
        assert_eq!(t.degrees, vec![1, 1, 2]);
        // oracle: S_3 table by hand, classes identified by element order
        for (i, ch) in t.chars.iter().enumerate() {
            for k in 0..3 {
                let v = ch.integer_at(k).unwrap();
                let want = match (t.degrees[i], t.orders[k], i) {
                    (_, 1, _) => t.degrees[i] as i64,
                    (1, 2, 0) | (1, 3, _) => 1,
                    (1, 2, _) => -1,
                    (2, 2, _) => 0,
                    (2, 3, _) => -1,
                    _ => unreachable!(),
                };
                assert_eq!(v, want);
            }
        }
    }

    #[test]
    fn gl2_f4_degrees_and_exact_orthogonality() {
        let (_, t) = table(2, 2, 2);
        assert_eq!(degree_profile(&t), vec![(1, 3), (3, 6), (4, 3), (5, 3)]);
        for a in 0..t.len() {
            for b in 0..t.len() {
                let ip = t.inner(&t.chars[a], &t.chars[b]).unwrap();
                assert_eq!(ip.is_one(), a == b);
            }
        }
    }

    #[test]
    fn decomposition_is_exact() {
        let (_, t) = table(2, 2, 2);
        let reg = ClassFn::from_fn(1, 1, t.num_classes(), |k| {
            if k == t.identity_class as usize {
                vec![(0, t.order as i64)]
            } else {
                Vec::new()
            }
        });
        let mults = t.decompose_character(&reg).unwrap();
        assert_eq!(mults, t.degrees);
        let half = t.chars[3].scale(1, 2);
        assert!(t.decompose_virtual(&half).is_err());
        assert_eq!(t.decompose(&half).unwrap()[3], BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn harish_chandra_induction() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let g = FiniteGroup::general_linear(f.clone(), 2, 1 << 21).unwrap();
        let g1 = FiniteGroup::general_linear(f, 1, 1 << 21).unwrap();
        let t = character_table(&g, 1).unwrap();
        let t1 = character_table(&g1, 1).unwrap();
        let ind = parabolic_induce(&g, &t, &g1, &t1.chars[0], &g1, &t1.chars[0]).unwrap();
        let mults = t.decompose_character(&ind).unwrap();
        // triv + Steinberg
        assert_eq!(mults, vec![1, 0, 1]);
    }

    #[test]
    fn principal_series_of_gl2_f9() {
        let f = Arc::new(Field::new(3, 2).unwrap());
        let g = FiniteGroup::general_linear(f.clone(), 2, 1 << 21).unwrap();
        let g1 = FiniteGroup::general_linear(f, 1, 1 << 21).unwrap();
        let t = character_table(&g, 1).unwrap();
        assert_eq!(t.len(), 80);
        let t1 = character_table(&g1, 1).unwrap();
        let (a, b) = (&t1.chars[1], &t1.chars[2]);
        let ab = parabolic_induce(&g, &t, &g1, a, &g1, b).unwrap();
        let ba = parabolic_induce(&g, &t, &g1, b, &g1, a).unwrap();
        assert_eq!(ab, ba);
        let i = t.find(&ab).expect("irreducible");
        assert_eq!(t.degrees[i], 10);
    }
}
