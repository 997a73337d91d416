//! Enumerated matrix groups over a finite field.
//!
//! A [`FiniteGroup`] stores its elements sorted by [`Mat::key`], so the least
//! element of any subset in key order is its lexicographically least matrix
//! (row-major). Conjugacy classes come from orbits under conjugation by a
//! generating set; class representatives are least elements.

pub mod bruhat;
pub mod snf;
pub mod tower;

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

pub const MAX_N: usize = 4;
pub const DEFAULT_BUDGET: u64 = 1 << 21;

/// Square matrix of size `n ≤ 4` over field codes, row-major with stride `n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub n: u8,
    pub e: [Fe; 16],
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n as usize;
        write!(f, "[")?;
        for i in 0..n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zero(n: usize) -> Mat {
        assert!(n <= MAX_N);
        Mat { n: n as u8, e: [0; 16] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[&[Fe]]) -> Mat {
        let n = rows.len();
        let mut m = Mat::zero(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn diag(d: &[Fe]) -> Mat {
        let mut m = Mat::zero(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Permutation matrix with a 1 in row `i`, column `perm[i]`.
    pub fn perm(perm: &[usize]) -> Mat {
        let mut m = Mat::zero(perm.len());
        for (i, &j) in perm.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    /// Antidiagonal permutation matrix `J`.
    pub fn antidiag(n: usize) -> Mat {
        Mat::perm(&(0..n).rev().collect::<Vec<_>>())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.e[i * self.n as usize + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        let n = self.n as usize;
        self.e[i * n + j] = v;
    }

    pub fn entries(&self) -> &[Fe] {
        &self.e[..(self.n as usize).pow(2)]
    }

    /// Mixed-radix code with radix `q`, first entry most significant.
    pub fn key(&self, q: u32) -> u64 {
        self.entries().iter().fold(0u64, |acc, &x| acc * q as u64 + x as u64)
    }

    pub fn from_key(mut key: u64, n: usize, q: u32) -> Mat {
        let mut m = Mat::zero(n);
        for idx in (0..n * n).rev() {
            m.e[idx] = (key % q as u64) as Fe;
            key /= q as u64;
        }
        m
    }

    pub fn map(&self, f: impl Fn(Fe) -> Fe) -> Mat {
        let mut m = *self;
        for x in m.e[..(self.n as usize).pow(2)].iter_mut() {
            *x = f(*x);
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        let n = self.dim();
        let mut m = Mat::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat, f: &Field) -> Mat {
        let n = self.dim();
        debug_assert_eq!(n, other.dim());
        let mut m = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b != 0 {
                        let idx = i * n + j;
                        m.e[idx] = f.add(m.e[idx], f.mul(a, b));
                    }
                }
            }
        }
        m
    }

    pub fn pow(&self, mut e: u64, f: &Field) -> Mat {
        let mut r = Mat::identity(self.dim());
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, f);
            }
            b = b.mul(&b, f);
            e >>= 1;
        }
        r
    }

    pub fn det(&self, f: &Field) -> Fe {
        let n = self.dim();
        let mut m = *self;
        let mut det = 1;
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| m.get(r, c) != 0) else { return 0 };
            if p != c {
                for j in 0..n {
                    let t = m.get(p, j);
                    m.set(p, j, m.get(c, j));
                    m.set(c, j, t);
                }
                det = f.neg(det);
            }
            let piv = m.get(c, c);
            det = f.mul(det, piv);
            let inv = f.inv(piv);
            for r in c + 1..n {
                let t = f.mul(m.get(r, c), inv);
                if t != 0 {
                    for j in c..n {
                        let v = f.sub(m.get(r, j), f.mul(t, m.get(c, j)));
                        m.set(r, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn inv(&self, f: &Field) -> Option<Mat> {
        let n = self.dim();
        let mut a = *self;
        let mut b = Mat::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| a.get(r, c) != 0)?;
            if p != c {
                for j in 0..n {
                    let (x, y) = (a.get(p, j), a.get(c, j));
                    a.set(p, j, y);
                    a.set(c, j, x);
                    let (x, y) = (b.get(p, j), b.get(c, j));
                    b.set(p, j, y);
                    b.set(c, j, x);
                }
            }
            let inv = f.inv(a.get(c, c));
            for j in 0..n {
                a.set(c, j, f.mul(a.get(c, j), inv));
                b.set(c, j, f.mul(b.get(c, j), inv));
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let t = a.get(r, c);
                if t != 0 {
                    for j in 0..n {
                        a.set(r, j, f.sub(a.get(r, j), f.mul(t, a.get(c, j))));
                        b.set(r, j, f.sub(b.get(r, j), f.mul(t, b.get(c, j))));
                    }
                }
            }
        }
        Some(b)
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.dim())
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| self.get(i, i) == 1 && (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j) == 0))
    }

    /// Last row equal to `(0, …, 0, 1)`.
    pub fn is_mirabolic(&self) -> bool {
        let n = self.dim();
        n == 0 || (0..n).all(|j| self.get(n - 1, j) == if j == n - 1 { 1 } else { 0 })
    }

    /// `Σ_i c_i x_{i,i+1}` over the superdiagonal.
    pub fn superdiag_sum(&self, slots: &[Fe], f: &Field) -> Fe {
        let n = self.dim();
        let mut acc = 0;
        for i in 0..n.saturating_sub(1) {
            acc = f.add(acc, f.mul(slots[i], self.get(i, i + 1)));
        }
        acc
    }
}

/// `Π_{i<n} (Q^n - Q^i)`.
pub fn gl_order(n: u32, q: u64) -> u64 {
    (0..n).map(|i| q.pow(n) - q.pow(i)).product()
}

/// `q^{n(n-1)/2} Π_{i=1..n} (q^i - (-1)^i)`.
pub fn unitary_order(n: u32, q: u64) -> u64 {
    let mut r = q.pow(n * (n.saturating_sub(1)) / 2) as i128;
    for i in 1..=n {
        let sign: i128 = if i % 2 == 0 { 1 } else { -1 };
        r *= q.pow(i) as i128 - sign;
    }
    r as u64
}

/// `|P_n(Q)| = |GL_{n-1}(Q)| Q^{n-1}`.
pub fn mirabolic_order(n: u32, q: u64) -> u64 {
    if n == 0 {
        1
    } else {
        gl_order(n - 1, q) * q.pow(n - 1)
    }
}

/// Conjugacy-class data of an enumerated group.
#[derive(Clone, Debug)]
pub struct Classes {
    pub class_of: Vec<u32>,
    pub reps: Vec<u32>,
    pub sizes: Vec<u64>,
    pub orders: Vec<u32>,
    pub inverse_class: Vec<u32>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// A finite group of `n × n` matrices, fully enumerated.
pub struct FiniteGroup {
    pub name: String,
    field: Arc<Field>,
    n: usize,
    elems: Vec<Mat>,
    keys: Vec<u64>,
    inv: Vec<u32>,
    identity: u32,
    gens: Vec<u32>,
    classes: Classes,
    exponent: u64,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("order", &self.order())
            .field("classes", &self.classes.len())
            .finish()
    }
}

impl FiniteGroup {
    /// Builds the group from an element list (any order, no duplicates).
    pub fn from_elements(name: &str, field: Arc<Field>, n: usize, elems: Vec<Mat>) -> FiniteGroup {
        let q = field.size();
        let mut pairs: Vec<(u64, Mat)> = elems.into_iter().map(|m| (m.key(q), m)).collect();
        pairs.sort_unstable_by_key(|p| p.0);
        pairs.dedup_by_key(|p| p.0);
        let keys: Vec<u64> = pairs.iter().map(|p| p.0).collect();
        let elems: Vec<Mat> = pairs.into_iter().map(|p| p.1).collect();
        let mut g = FiniteGroup {
            name: name.to_string(),
            field,
            n,
            elems,
            keys,
            inv: Vec::new(),
            identity: 0,
            gens: Vec::new(),
            classes: Classes {
                class_of: Vec::new(),
                reps: Vec::new(),
                sizes: Vec::new(),
                orders: Vec::new(),
                inverse_class: Vec::new(),
            },
            exponent: 1,
        };
        g.identity = g.index_of(&Mat::identity(n)).expect("identity present");
        let f = g.field.clone();
        g.inv = g
            .elems
            .iter()
            .map(|m| g.index_of(&m.inv(&f).expect("invertible")).expect("closed under inverse"))
            .collect();
        g.gens = g.choose_generators(0x5eed);
        g.classes = g.compute_classes();
        g.exponent = g.classes.orders.iter().fold(1u64, |acc, &o| {
            let o = o as u64;
            acc / num_integer::gcd(acc, o) * o
        });
        g
    }

    /// `GL_n(K)` by filtering all matrices by determinant.
    pub fn general_linear(field: Arc<Field>, n: usize, budget: u64) -> Result<FiniteGroup> {
        let q = field.size() as u64;
        let order = gl_order(n as u32, q);
        if order > budget {
            return Err(Error::BudgetExceeded { order, budget });
        }
        let elems = all_invertible(&field, n);
        Ok(Self::from_elements(&format!("GL_{}(F_{})", n, q), field, n, elems))
    }

    /// Mirabolic `P_n(K)`: last row `e_n`.
    pub fn mirabolic(field: Arc<Field>, n: usize, budget: u64) -> Result<FiniteGroup> {
        let q = field.size() as u64;
        let order = mirabolic_order(n as u32, q);
        if order > budget {
            return Err(Error::BudgetExceeded { order, budget });
        }
        let mut elems = Vec::with_capacity(order as usize);
        if n == 0 {
            elems.push(Mat::identity(0));
        } else {
            let top = all_invertible(&field, n - 1);
            let cols = (q as u32).pow(n as u32 - 1);
            for a in &top {
                for c in 0..cols {
                    let mut m = Mat::identity(n);
                    for i in 0..n - 1 {
                        for j in 0..n - 1 {
                            m.set(i, j, a.get(i, j));
                        }
                    }
                    let mut cc = c;
                    for i in 0..n - 1 {
                        m.set(i, n - 1, cc % q as u32);
                        cc /= q as u32;
                    }
                    elems.push(m);
                }
            }
        }
        Ok(Self::from_elements(&format!("P_{}(F_{})", n, q), field, n, elems))
    }

    /// Subgroup of elements satisfying a predicate.
    pub fn subgroup(&self, name: &str, pred: impl Fn(&Mat) -> bool) -> FiniteGroup {
        let elems = self.elems.iter().filter(|m| pred(m)).copied().collect();
        Self::from_elements(name, self.field.clone(), self.n, elems)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elems
    }

    #[inline]
    pub fn elem(&self, i: u32) -> &Mat {
        &self.elems[i as usize]
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    #[inline]
    pub fn index_of(&self, m: &Mat) -> Option<u32> {
        let k = m.key(self.field.size());
        self.keys.binary_search(&k).ok().map(|i| i as u32)
    }

    #[inline]
    pub fn contains(&self, m: &Mat) -> bool {
        self.index_of(m).is_some()
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let m = self.elems[a as usize].mul(&self.elems[b as usize], &self.field);
        self.index_of(&m).expect("closed under multiplication")
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn mul_mat(&self, a: &Mat, b: &Mat) -> Mat {
        a.mul(b, &self.field)
    }

    pub fn classes(&self) -> &Classes {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    #[inline]
    pub fn class_of(&self, i: u32) -> u32 {
        self.classes.class_of[i as usize]
    }

    /// Class of an arbitrary matrix known to lie in the group.
    pub fn class_of_mat(&self, m: &Mat) -> Option<u32> {
        self.index_of(m).map(|i| self.class_of(i))
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Class of `g^j` for `g` in class `c`.
    pub fn power_class(&self, c: u32, j: i64) -> u32 {
        let o = self.classes.orders[c as usize] as i64;
        let e = j.rem_euclid(o) as u64;
        let g = self.elems[self.classes.reps[c as usize] as usize].pow(e, &self.field);
        self.class_of_mat(&g).unwrap()
    }

    /// Indices of elements of class `c`.
    pub fn class_members(&self, c: u32) -> Vec<u32> {
        (0..self.elems.len() as u32).filter(|&i| self.classes.class_of[i as usize] == c).collect()
    }

    pub fn class_lists(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.classes.len()];
        for (i, &c) in self.classes.class_of.iter().enumerate() {
            out[c as usize].push(i as u32);
        }
        out
    }

    fn choose_generators(&self, seed: u64) -> Vec<u32> {
        let total = self.elems.len();
        if total == 1 {
            return Vec::new();
        }
        let mut order: Vec<u32> = (0..total as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let mut gens = Vec::new();
        let mut inside = vec![false; total];
        inside[self.identity as usize] = true;
        let mut count = 1;
        for &cand in &order {
            if count == total {
                break;
            }
            if inside[cand as usize] {
                continue;
            }
            gens.push(cand);
            // closure of the enlarged generating set
            inside.iter_mut().for_each(|b| *b = false);
            inside[self.identity as usize] = true;
            let mut queue = vec![self.identity];
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head];
                head += 1;
                for &s in &gens {
                    let y = self.mul(x, s);
                    if !inside[y as usize] {
                        inside[y as usize] = true;
                        queue.push(y);
                    }
                }
            }
            count = queue.len();
        }
        gens
    }

    fn compute_classes(&self) -> Classes {
        let total = self.elems.len();
        let mut class_of = vec![u32::MAX; total];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let gens: Vec<(Mat, Mat)> = self
            .gens
            .iter()
            .map(|&s| (self.elems[s as usize], self.elems[self.inv(s) as usize]))
            .collect();
        for start in 0..total {
            if class_of[start] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(start as u32);
            class_of[start] = c;
            let mut queue = vec![start as u32];
            let mut head = 0;
            while head < queue.len() {
                let x = self.elems[queue[head] as usize];
                head += 1;
                for (s, si) in &gens {
                    let y = s.mul(&x, &self.field).mul(si, &self.field);
                    let yi = self.index_of(&y).unwrap();
                    if class_of[yi as usize] == u32::MAX {
                        class_of[yi as usize] = c;
                        queue.push(yi);
                    }
                }
            }
            sizes.push(queue.len() as u64);
        }
        let orders: Vec<u32> = reps
            .iter()
            .map(|&r| {
                let g = self.elems[r as usize];
                let mut x = g;
                let mut o = 1;
                while !x.is_identity() {
                    x = x.mul(&g, &self.field);
                    o += 1;
                }
                o
            })
            .collect();
        let inverse_class = reps.iter().map(|&r| class_of[self.inv[r as usize] as usize]).collect();
        Classes { class_of, reps, sizes, orders, inverse_class }
    }
}

fn all_invertible(field: &Field, n: usize) -> Vec<Mat> {
    if n == 0 {
        return vec![Mat::identity(0)];
    }
    let q = field.size();
    let total = (q as u64).pow((n * n) as u32);
    let mut out = Vec::new();
    for key in 0..total {
        let m = Mat::from_key(key, n, q);
        if m.det(field) != 0 {
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn order_formulas() {
        assert_eq!(gl_order(2, 4), 180);
        assert_eq!(gl_order(2, 9), 5760);
        assert_eq!(gl_order(3, 4), 181440);
        assert_eq!(unitary_order(2, 2), 18);
        assert_eq!(unitary_order(2, 3), 96);
        assert_eq!(unitary_order(3, 2), 648);
        assert_eq!(mirabolic_order(3, 4), 2880);
        assert_eq!(mirabolic_order(3, 9), 466560);
    }

    #[test]
    fn enumerated_orders_match() {
        let f = Arc::new(Field::new(2, 2).unwrap());
        let g = FiniteGroup::general_linear(f.clone(), 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.order(), 180);
        assert_eq!(g.num_classes(), 15);
        assert_eq!(g.classes().sizes.iter().sum::<u64>(), 180);
        let p = FiniteGroup::mirabolic(f, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(p.order(), 12);
    }

    #[test]
    fn s3_classes() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let g = FiniteGroup::general_linear(f, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.order(), 6);
        let mut sizes = g.classes().sizes.clone();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(g.exponent(), 6);
        // representatives are least in key order
        for (c, &r) in g.classes().reps.iter().enumerate() {
            assert_eq!(g.class_members(c as u32)[0], r);
        }
    }

    #[test]
    fn budget_guard() {
        let f = Arc::new(Field::new(3, 2).unwrap());
        assert!(matches!(
            FiniteGroup::general_linear(f, 3, DEFAULT_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn mat_inverse_and_det() {
        let f = Field::new(3, 2).unwrap();
        let g = FiniteGroup::general_linear(Arc::new(Field::new(3, 1).unwrap()), 3, DEFAULT_BUDGET)
            .unwrap();
        assert_eq!(g.order(), 11232);
        let m = Mat::from_rows(&[&[1, 2, 0], &[0, 5, 7], &[3, 0, 8]]);
        let mi = m.inv(&f).unwrap();
        assert!(m.mul(&mi, &f).is_identity());
        let d = f.mul(m.det(&f), mi.det(&f));
        assert_eq!(d, 1);
        assert_eq!(Mat::from_key(m.key(9), 3, 9), m);
    }
}
