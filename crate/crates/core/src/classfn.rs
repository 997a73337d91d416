//! Class functions with values in `(1/den)·Z[ζ_m]`.
//!
//! Each value is a sparse list of `(k, c)` meaning `Σ c ζ_m^k`, unreduced (the
//! representation in `Z[x]/(x^m - 1)` is not unique). Comparisons and inner
//! products reduce modulo `Φ_m` once, at the end, in `i128`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::cyclo::{euler_phi, lcm, reduction_table, Cyclo};

pub type Value = Vec<(u32, i64)>;

#[derive(Clone, Debug)]
pub struct ClassFn {
    m: u32,
    den: i64,
    vals: Vec<Value>,
}

fn normalize(v: &mut Value, m: u32) {
    for t in v.iter_mut() {
        t.0 %= m;
    }
    v.sort_unstable_by_key(|t| t.0);
    let mut out: Value = Vec::with_capacity(v.len());
    for &(k, c) in v.iter() {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|t| t.1 != 0);
    *v = out;
}

impl ClassFn {
    pub fn new(m: u32, den: i64, mut vals: Vec<Value>) -> ClassFn {
        assert!(den > 0 && m > 0);
        for v in vals.iter_mut() {
            normalize(v, m);
        }
        let mut f = ClassFn { m, den, vals };
        f.simplify();
        f
    }

    /// Values from dense coefficient vectors of length `m`.
    pub fn from_dense(m: u32, den: i64, dense: &[Vec<i64>]) -> ClassFn {
        let vals = dense
            .iter()
            .map(|d| d.iter().enumerate().filter(|t| *t.1 != 0).map(|(k, &c)| (k as u32, c)).collect())
            .collect();
        ClassFn::new(m, den, vals)
    }

    pub fn zero(m: u32, r: usize) -> ClassFn {
        ClassFn { m, den: 1, vals: vec![Vec::new(); r] }
    }

    pub fn from_ints(values: &[i64]) -> ClassFn {
        ClassFn::new(1, 1, values.iter().map(|&c| vec![(0, c)]).collect())
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Numerator terms of the value at class `k`.
    pub fn raw(&self, k: usize) -> &Value {
        &self.vals[k]
    }

    pub fn value(&self, k: usize) -> Cyclo {
        Cyclo::from_sparse(self.m, &self.vals[k], self.den)
    }

    pub fn values(&self) -> Vec<Cyclo> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }

    fn simplify(&mut self) {
        if self.den == 1 {
            return;
        }
        let mut g = self.den;
        for v in &self.vals {
            for &(_, c) in v {
                g = g.gcd(&c);
                if g == 1 {
                    return;
                }
            }
        }
        if g > 1 {
            self.den /= g;
            for v in self.vals.iter_mut() {
                for t in v.iter_mut() {
                    t.1 /= g;
                }
            }
        }
    }

    pub fn lift(&self, m: u32) -> ClassFn {
        assert_eq!(m % self.m, 0);
        let f = m / self.m;
        ClassFn {
            m,
            den: self.den,
            vals: self
                .vals
                .iter()
                .map(|v| {
                    let mut w: Value = v.iter().map(|&(k, c)| (k * f, c)).collect();
                    w.sort_unstable_by_key(|t| t.0);
                    w
                })
                .collect(),
        }
    }

    fn common(&self, other: &ClassFn) -> (ClassFn, ClassFn) {
        let m = lcm(self.m, other.m);
        (self.lift(m), other.lift(m))
    }

    fn combine(&self, other: &ClassFn, sign: i64) -> ClassFn {
        assert_eq!(self.len(), other.len());
        let (a, b) = self.common(other);
        let den = a.den.lcm(&b.den);
        let (fa, fb) = (den / a.den, den / b.den);
        let vals = a
            .vals
            .iter()
            .zip(&b.vals)
            .map(|(x, y)| {
                let mut v: Value = x.iter().map(|&(k, c)| (k, c * fa)).collect();
                v.extend(y.iter().map(|&(k, c)| (k, sign * c * fb)));
                v
            })
            .collect();
        ClassFn::new(a.m, den, vals)
    }

    pub fn add(&self, other: &ClassFn) -> ClassFn {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &ClassFn) -> ClassFn {
        self.combine(other, -1)
    }

    /// Multiplies by the rational `num/den`.
    pub fn scale(&self, num: i64, den: i64) -> ClassFn {
        assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let vals = self
            .vals
            .iter()
            .map(|v| v.iter().map(|&(k, c)| (k, c * num)).collect())
            .collect();
        ClassFn::new(self.m, self.den * den, vals)
    }

    /// Galois action `ζ_m ↦ ζ_m^a`.
    pub fn galois(&self, a: i64) -> ClassFn {
        let m = self.m as i64;
        let vals = self
            .vals
            .iter()
            .map(|v| v.iter().map(|&(k, c)| (((k as i64) * a).rem_euclid(m) as u32, c)).collect())
            .collect();
        ClassFn::new(self.m, self.den, vals)
    }

    pub fn conj(&self) -> ClassFn {
        self.galois(-1)
    }

    pub fn mul_pointwise(&self, other: &ClassFn) -> ClassFn {
        let (a, b) = self.common(other);
        let m = a.m;
        let vals = a
            .vals
            .iter()
            .zip(&b.vals)
            .map(|(x, y)| {
                let mut v = Vec::with_capacity(x.len() * y.len());
                for &(s, c) in x {
                    for &(t, d) in y {
                        v.push(((s + t) % m, c * d));
                    }
                }
                v
            })
            .collect();
        ClassFn::new(m, a.den * b.den, vals)
    }

    /// Reorders values: `out[k] = self[map[k]]`.
    pub fn pullback(&self, map: &[u32]) -> ClassFn {
        ClassFn {
            m: self.m,
            den: self.den,
            vals: map.iter().map(|&k| self.vals[k as usize].clone()).collect(),
        }
    }

    /// Numerators of the value at `k` in the power basis of `Q(ζ_m)`.
    pub fn canonical(&self, k: usize) -> Vec<i128> {
        canonical_of(self.m, &self.vals[k])
    }

    pub fn is_zero(&self) -> bool {
        (0..self.len()).all(|k| self.canonical(k).iter().all(|&c| c == 0))
    }

    pub fn value_eq(&self, k: usize, other: &ClassFn, j: usize) -> bool {
        let (a, b) = self.common(other);
        let ca = a.canonical(k);
        let cb = b.canonical(j);
        ca.iter().zip(&cb).all(|(&x, &y)| x * b.den as i128 == y * a.den as i128)
    }

    pub fn exact_eq(&self, other: &ClassFn) -> bool {
        self.len() == other.len() && (0..self.len()).all(|k| self.value_eq(k, other, k))
    }

    /// Same function over the smallest `ζ_d`, `d | m`, whose field contains every value.
    pub fn shrink(&self) -> ClassFn {
        let canon: Vec<Vec<i128>> = (0..self.len()).map(|k| self.canonical(k)).collect();
        for d in (1..self.m).filter(|d| self.m % d == 0) {
            if d % 4 == 2 {
                continue;
            }
            let proj = subfield_projection(self.m, d);
            let coefs: Option<Vec<Vec<Ratio<i128>>>> = canon.iter().map(|c| proj.coordinates(c)).collect();
            if let Some(coefs) = coefs {
                let den = coefs.iter().flatten().fold(1i128, |a, x| a.lcm(x.denom()));
                let vals = coefs
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|t| !t.1.is_zero())
                            .map(|(j, x)| (j as u32, i64::try_from(x.numer() * (den / x.denom())).expect("fits in i64")))
                            .collect()
                    })
                    .collect();
                let den = i64::try_from(den).expect("fits in i64") * self.den;
                return ClassFn::new(d, den, vals);
            }
        }
        self.clone()
    }

    /// Value at `k` if rational.
    pub fn rational_at(&self, k: usize) -> Option<BigRational> {
        let c = self.canonical(k);
        if c[1..].iter().all(|&x| x == 0) {
            Some(BigRational::new(BigInt::from(c[0]), BigInt::from(self.den)))
        } else {
            None
        }
    }

    pub fn integer_at(&self, k: usize) -> Option<i64> {
        self.rational_at(k).filter(|r| r.is_integer()).map(|r| {
            use num_traits::ToPrimitive;
            r.to_integer().to_i64().unwrap()
        })
    }

    /// `(1/|G|) Σ_k |C_k| f(k) conj(g(k))`; `None` if the result is irrational.
    pub fn inner(&self, other: &ClassFn, sizes: &[u64], order: u64) -> Option<BigRational> {
        assert_eq!(self.len(), other.len());
        let (a, b) = self.common(other);
        let m = a.m as usize;
        let mut acc = vec![0i128; m];
        for k in 0..a.len() {
            let s = sizes[k] as i128;
            for &(x, c) in &a.vals[k] {
                for &(y, d) in &b.vals[k] {
                    let e = (x as usize + m - y as usize) % m;
                    acc[e] += s * c as i128 * d as i128;
                }
            }
        }
        let canon = reduce_dense(a.m, &acc);
        if canon[1..].iter().any(|&x| x != 0) {
            return None;
        }
        let den = BigInt::from(order) * BigInt::from(a.den) * BigInt::from(b.den);
        Some(BigRational::new(BigInt::from(canon[0]), den))
    }

    /// Inner product asserted to be an integer.
    pub fn multiplicity(&self, other: &ClassFn, sizes: &[u64], order: u64) -> Option<i64> {
        use num_traits::ToPrimitive;
        self.inner(other, sizes, order).filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
    }

    pub fn is_all_zero_terms(&self) -> bool {
        self.vals.iter().all(|v| v.is_empty())
    }

    /// `Σ c_i f_i` for class functions on the same classes.
    pub fn linear_combination(r: usize, items: &[(i64, &ClassFn)]) -> ClassFn {
        let m = items.iter().fold(1, |acc, t| lcm(acc, t.1.m));
        let den = items.iter().fold(1i64, |acc, t| acc.lcm(&t.1.den));
        let mut vals: Vec<Value> = vec![Vec::new(); r];
        for &(c, f) in items {
            if c == 0 {
                continue;
            }
            let (step, scale) = (m / f.m, c * (den / f.den));
            for (k, v) in f.vals.iter().enumerate() {
                vals[k].extend(v.iter().map(|&(e, a)| (e * step, a * scale)));
            }
        }
        ClassFn::new(m, den, vals)
    }

    /// Values `c·ζ_m^e` given per class by a closure returning raw terms.
    pub fn from_fn(m: u32, den: i64, r: usize, f: impl Fn(usize) -> Value) -> ClassFn {
        ClassFn::new(m, den, (0..r).map(f).collect())
    }
}

/// Counts of pairs `(class, e)` standing for `ζ_root^e` weights, used to
/// evaluate sums `Σ_x f(class(x)) ζ_root^{e(x)}` for many class functions `f`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    pub root: u32,
    pub counts: Vec<(u32, u32, i64)>,
}

impl Histogram {
    pub fn collect(root: u32, items: impl IntoIterator<Item = (u32, u32)>) -> Histogram {
        let mut map: std::collections::BTreeMap<(u32, u32), i64> = Default::default();
        for (k, e) in items {
            *map.entry((k, e % root)).or_insert(0) += 1;
        }
        Histogram { root, counts: map.into_iter().map(|((k, e), c)| (k, e, c)).collect() }
    }

    pub fn merge(parts: impl IntoIterator<Item = Histogram>) -> Histogram {
        let mut map: std::collections::BTreeMap<(u32, u32), i64> = Default::default();
        let mut root = 1;
        for h in parts {
            root = h.root;
            for (k, e, c) in h.counts {
                *map.entry((k, e)).or_insert(0) += c;
            }
        }
        Histogram { root, counts: map.into_iter().map(|((k, e), c)| (k, e, c)).collect() }
    }

    pub fn total(&self) -> i64 {
        self.counts.iter().map(|t| t.2).sum()
    }

    /// Dense coefficients over `ζ_m` of `Σ c·f(k)·ζ_root^{sign·e}`; numerators over `f.den()`.
    pub fn pair_dense(&self, f: &ClassFn, sign: i64) -> (u32, Vec<i128>) {
        let m = lcm(f.m, self.root);
        let (sf, sr) = ((m / f.m) as i64, (m / self.root) as i64);
        let mi = m as i64;
        let mut acc = vec![0i128; m as usize];
        for &(k, e, c) in &self.counts {
            let shift = sign * e as i64 * sr;
            for &(t, a) in &f.vals[k as usize] {
                let idx = (t as i64 * sf + shift).rem_euclid(mi) as usize;
                acc[idx] += c as i128 * a as i128;
            }
        }
        (m, acc)
    }

    /// `Σ c·f(k)·ζ_root^{sign·e}`.
    pub fn pair(&self, f: &ClassFn, sign: i64) -> Cyclo {
        let (m, acc) = self.pair_dense(f, sign);
        dense_to_cyclo(m, &acc, f.den)
    }
}

/// Coordinates in the basis `ζ_d^j`, `j < φ(d)`, of elements of `Q(ζ_m)` lying in `Q(ζ_d)`.
struct SubfieldProjection {
    basis: Vec<Vec<i128>>,
    pivots: Vec<usize>,
    inv: Vec<Vec<Ratio<i128>>>,
}

impl SubfieldProjection {
    fn coordinates(&self, c: &[i128]) -> Option<Vec<Ratio<i128>>> {
        let x: Vec<Ratio<i128>> = self
            .inv
            .iter()
            .map(|row| row.iter().zip(&self.pivots).map(|(a, &i)| a * c[i]).sum())
            .collect();
        let ok = (0..c.len()).all(|i| {
            let s: Ratio<i128> = x.iter().zip(&self.basis).map(|(a, b)| a * b[i]).sum();
            s == Ratio::from_integer(c[i])
        });
        ok.then_some(x)
    }
}

fn subfield_projection(m: u32, d: u32) -> Arc<SubfieldProjection> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<SubfieldProjection>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&(m, d)) {
        return p.clone();
    }
    let table = reduction_table(m);
    let step = (m / d) as usize;
    let k = euler_phi(d) as usize;
    let basis: Vec<Vec<i128>> = (0..k).map(|j| table[j * step].iter().map(|&x| x as i128).collect()).collect();
    // pivot rows of the φ(m) × φ(d) matrix with columns `basis`
    let mut rows: Vec<Vec<Ratio<i128>>> = basis.iter().map(|b| b.iter().map(|&x| Ratio::from_integer(x)).collect()).collect();
    let mut pivots = Vec::with_capacity(k);
    let mut r = 0;
    for col in 0..euler_phi(m) as usize {
        if r == k {
            break;
        }
        let Some(p) = (r..k).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..k {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col] / rows[r][col];
                let pr = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&pr) {
                    *a -= f * b;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    // invert S[i][j] = basis[j][pivots[i]]
    let mut aug: Vec<Vec<Ratio<i128>>> = (0..k)
        .map(|i| {
            let mut row: Vec<Ratio<i128>> = (0..k).map(|j| Ratio::from_integer(basis[j][pivots[i]])).collect();
            row.extend((0..k).map(|j| Ratio::from_integer((i == j) as i128)));
            row
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !aug[i][c].is_zero()).expect("independent basis");
        aug.swap(c, p);
        let lead = aug[c][c];
        aug[c].iter_mut().for_each(|x| *x /= lead);
        let pr = aug[c].clone();
        for i in 0..k {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c];
                for (a, b) in aug[i].iter_mut().zip(&pr) {
                    *a -= f * b;
                }
            }
        }
    }
    let inv = aug.into_iter().map(|row| row[k..].to_vec()).collect();
    let p = Arc::new(SubfieldProjection { basis, pivots, inv });
    cache.lock().unwrap().insert((m, d), p.clone());
    p
}

pub fn canonical_of(m: u32, v: &Value) -> Vec<i128> {
    let table = reduction_table(m);
    let deg = euler_phi(m) as usize;
    let mut out = vec![0i128; deg];
    for &(k, c) in v {
        for (j, &r) in table[k as usize].iter().enumerate() {
            if r != 0 {
                out[j] += c as i128 * r as i128;
            }
        }
    }
    out
}

pub fn reduce_dense(m: u32, acc: &[i128]) -> Vec<i128> {
    let table = reduction_table(m);
    let deg = euler_phi(m) as usize;
    let mut out = vec![0i128; deg];
    for (k, &c) in acc.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (j, &r) in table[k].iter().enumerate() {
            if r != 0 {
                out[j] += c * r as i128;
            }
        }
    }
    out
}

/// Converts a dense `i128` coefficient vector over `ζ_m` (scaled by `1/den`) to a `Cyclo`.
pub fn dense_to_cyclo(m: u32, acc: &[i128], den: i64) -> Cyclo {
    let canon = reduce_dense(m, acc);
    let mut out = Cyclo::zero();
    for (j, &c) in canon.iter().enumerate() {
        if c != 0 {
            let r = BigRational::new(BigInt::from(c), BigInt::from(den));
            out += &Cyclo::root_of_unity(m, j as i64).scale(&r);
        }
    }
    out
}

impl PartialEq for ClassFn {
    fn eq(&self, other: &Self) -> bool {
        self.exact_eq(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unreduced_forms_compare_equal() {
        // 1 + ζ_3 + ζ_3^2 = 0
        let a = ClassFn::new(3, 1, vec![vec![(0, 1), (1, 1), (2, 1)]]);
        assert!(a.is_zero());
        let b = ClassFn::new(6, 2, vec![vec![(0, 2)]]);
        assert_eq!(b, ClassFn::from_ints(&[1]));
        assert_eq!(b.den(), 1);
    }

    #[test]
    fn histogram_pairing_matches_direct_sum() {
        // f(k) = ζ_3^k on three classes; Σ over items of f(k)·ζ_3^{-e}
        let f = ClassFn::new(3, 1, (0..3).map(|k| vec![(k, 1)]).collect());
        let items = [(0u32, 0u32), (1, 1), (1, 1), (2, 0)];
        let h = Histogram::collect(3, items);
        assert_eq!(h.total(), 4);
        let direct: Cyclo = items
            .iter()
            .map(|&(k, e)| Cyclo::root_of_unity(3, k as i64 - e as i64))
            .sum();
        assert_eq!(h.pair(&f, -1), direct);
        let lc = ClassFn::linear_combination(3, &[(2, &f), (-1, &f.conj())]);
        assert_eq!(lc.value(0), Cyclo::from_int(1));
    }

    #[test]
    fn inner_products_of_c3_characters() {
        // characters of Z/3: χ_j(k) = ζ_3^{jk}
        let chars: Vec<ClassFn> = (0..3)
            .map(|j| ClassFn::new(3, 1, (0..3).map(|k| vec![((j * k) % 3, 1)]).collect()))
            .collect();
        for a in 0..3 {
            for b in 0..3 {
                let ip = chars[a].inner(&chars[b], &[1, 1, 1], 3).unwrap();
                assert_eq!(ip, BigRational::from_integer(BigInt::from((a == b) as i64)));
            }
        }
        let reg = chars[0].add(&chars[1]).add(&chars[2]);
        assert_eq!(reg, ClassFn::from_ints(&[3, 0, 0]));
        assert_eq!(reg.value(0), Cyclo::from_int(3));
        assert_eq!(chars[1].conj(), chars[2]);
    }
}
