//! Prime-field arithmetic and the simultaneous-eigenspace splitter shared by
//! the character-table engine and the Hecke-algebra route to Bessel functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, l: u64) -> u64 {
    ((a as u128 * b as u128) % l as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, l: u64) -> u64 {
    let s = a + b;
    if s >= l {
        s - l
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, l: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + l - b
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, l: u64) -> u64 {
    let mut r = 1 % l;
    b %= l;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, l);
        }
        b = mul_mod(b, b, l);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, l: u64) -> u64 {
    assert!(a % l != 0, "inverse of zero mod {l}");
    pow_mod(a, l - 2, l)
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least prime `l > lower` with `l ≡ 1 (mod e)`, together with an element of
/// multiplicative order exactly `e`.
pub fn prime_with_root(e: u32, lower: u64) -> (u64, u64) {
    let e64 = e as u64;
    let mut l = (lower / e64 + 1) * e64 + 1;
    while !is_prime_u64(l) {
        l += e64;
    }
    let primes = prime_factors(e64);
    let mut a = 2;
    loop {
        let z = pow_mod(a, (l - 1) / e64, l);
        if primes.iter().all(|&r| pow_mod(z, e64 / r, l) != 1) {
            return (l, z);
        }
        a += 1;
    }
}

/// Dense square or rectangular matrix over `F_l`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl ModMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ModMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &ModMat, l: u64) -> ModMat {
        assert_eq!(self.cols, other.rows);
        let mut out = ModMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = add_mod(out.get(i, j), mul_mod(a, other.get(k, j), l), l);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64], l: u64) -> Vec<u64> {
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if a != 0 {
                        acc = add_mod(acc, mul_mod(a, v[j], l), l);
                    }
                }
                acc
            })
            .collect()
    }

    /// Basis of the right null space.
    pub fn kernel(&self, l: u64) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let (pivots, _) = rref(&mut m, l);
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; m.cols];
                v[f] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = sub_mod(0, m.get(r, f), l);
                }
                v
            })
            .collect()
    }

    pub fn rank(&self, l: u64) -> usize {
        let mut m = self.clone();
        rref(&mut m, l).0.len()
    }
}

/// In-place reduced row echelon form; returns pivot columns and rank.
pub fn rref(m: &mut ModMat, l: u64) -> (Vec<usize>, usize) {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| m.get(r, col) != 0) else { continue };
        if p != row {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, row * m.cols + j);
            }
        }
        let inv = inv_mod(m.get(row, col), l);
        for j in 0..m.cols {
            let v = mul_mod(m.get(row, j), inv, l);
            m.set(row, j, v);
        }
        for r in 0..m.rows {
            if r != row {
                let f = m.get(r, col);
                if f != 0 {
                    for j in 0..m.cols {
                        let v = sub_mod(m.get(r, j), mul_mod(f, m.get(row, j), l), l);
                        m.set(r, j, v);
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let r = pivots.len();
    (pivots, r)
}

// ---- polynomials over F_l, coefficient vectors lowest degree first ----

fn poly_trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn poly_rem(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let inv = inv_mod(b[db], l);
    while r.len() > db {
        let c = mul_mod(*r.last().unwrap(), inv, l);
        let shift = r.len() - 1 - db;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = sub_mod(r[shift + j], mul_mod(c, bj, l), l);
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], l: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, l), l);
        }
    }
    poly_rem(&out, m, l)
}

fn poly_pow_mod(base: &[u64], mut e: u64, m: &[u64], l: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = poly_rem(base, m, l);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul_mod(&result, &b, m, l);
        }
        b = poly_mul_mod(&b, &b, m, l);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, l);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let inv = inv_mod(lead, l);
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, l);
        }
    }
    x
}

fn poly_sub(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| sub_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), l))
        .collect();
    poly_trim(&mut out);
    out
}

fn poly_div_exact(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let inv = inv_mod(b[db], l);
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let c = mul_mod(*r.last().unwrap(), inv, l);
        let shift = r.len() - 1 - db;
        q[shift] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = sub_mod(r[shift + j], mul_mod(c, bj, l), l);
        }
        poly_trim(&mut r);
    }
    q
}

/// Distinct roots in `F_l` of a nonzero polynomial (Cantor–Zassenhaus splitting).
pub fn poly_roots(f: &[u64], l: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut f = f.to_vec();
    poly_trim(&mut f);
    if f.len() <= 1 {
        return Vec::new();
    }
    // product of distinct linear factors: gcd(f, x^l - x)
    let xl = poly_pow_mod(&[0, 1], l, &f, l);
    let g = poly_gcd(&f, &poly_sub(&xl, &[0, 1], l), l);
    let mut roots = Vec::new();
    split_linear(&g, l, rng, &mut roots);
    roots.sort_unstable();
    roots
}

fn split_linear(g: &[u64], l: u64, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    let deg = g.len().saturating_sub(1);
    if deg == 0 {
        return;
    }
    if deg == 1 {
        // g = x + c (monic)
        out.push(sub_mod(0, g[0], l));
        return;
    }
    loop {
        let a = rng.gen_range(0..l);
        let h = poly_pow_mod(&[a, 1], (l - 1) / 2, g, l);
        let d = poly_gcd(g, &poly_sub(&h, &[1], l), l);
        let dd = d.len().saturating_sub(1);
        if dd > 0 && dd < deg {
            let rest = poly_div_exact(g, &d, l);
            split_linear(&d, l, rng, out);
            split_linear(&rest, l, rng, out);
            return;
        }
    }
}

/// Characteristic polynomial via Hessenberg reduction.
pub fn charpoly(m: &ModMat, l: u64) -> Vec<u64> {
    let n = m.rows;
    let mut h = m.clone();
    // reduce to upper Hessenberg form by similarity
    for c in 0..n.saturating_sub(2) {
        let Some(p) = (c + 1..n).find(|&r| h.get(r, c) != 0) else { continue };
        if p != c + 1 {
            for j in 0..n {
                h.data.swap(p * n + j, (c + 1) * n + j);
            }
            for i in 0..n {
                h.data.swap(i * n + p, i * n + c + 1);
            }
        }
        let inv = inv_mod(h.get(c + 1, c), l);
        for r in c + 2..n {
            let f = mul_mod(h.get(r, c), inv, l);
            if f == 0 {
                continue;
            }
            for j in 0..n {
                let v = sub_mod(h.get(r, j), mul_mod(f, h.get(c + 1, j), l), l);
                h.set(r, j, v);
            }
            for i in 0..n {
                let v = add_mod(h.get(i, c + 1), mul_mod(f, h.get(i, r), l), l);
                h.set(i, c + 1, v);
            }
        }
    }
    // recurrence on leading principal submatrices
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        // p_{k+1} = (x - h_kk) p_k - Σ_{i<k} h_ik * (Π_{j=i+1..k} h_{j,j-1}) p_i
        let mut next = vec![0u64; k + 2];
        for (i, &c) in polys[k].iter().enumerate() {
            next[i + 1] = add_mod(next[i + 1], c, l);
            next[i] = sub_mod(next[i], mul_mod(h.get(k, k), c, l), l);
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = mul_mod(prod, h.get(i + 1, i), l);
            let coef = mul_mod(h.get(i, k), prod, l);
            if coef != 0 {
                for (j, &c) in polys[i].iter().enumerate() {
                    next[j] = sub_mod(next[j], mul_mod(coef, c, l), l);
                }
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Splits `F_l^dim` into common eigenspaces of a commuting family of operators.
///
/// Operators are requested lazily through `op(i)`, for `i` in `order`, only
/// while some space still has dimension above one. Returns one basis vector
/// per one-dimensional common eigenspace.
pub fn common_eigenvectors<F>(
    dim: usize,
    order: &[usize],
    mut op: F,
    l: u64,
    seed: u64,
) -> Result<Vec<Vec<u64>>>
where
    F: FnMut(usize) -> ModMat,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // each space stored as row basis in RREF
    let mut spaces: Vec<ModMat> = vec![ModMat::identity(dim)];
    for &i in order {
        if spaces.iter().all(|s| s.rows == 1) {
            break;
        }
        let m = op(i);
        let mut next = Vec::new();
        for s in spaces {
            if s.rows == 1 {
                next.push(s);
                continue;
            }
            next.extend(split_space(&s, &m, l, &mut rng)?);
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.rows != 1) {
        return Err(Error::EigenSeparation(format!(
            "{} of {} common eigenspaces remain degenerate",
            spaces.iter().filter(|s| s.rows > 1).count(),
            spaces.len()
        )));
    }
    Ok(spaces.into_iter().map(|s| s.data).collect())
}

/// Splits a row space `s` (RREF rows) into eigenspaces of the operator `m`
/// acting on column vectors.
fn split_space(s: &ModMat, m: &ModMat, l: u64, rng: &mut ChaCha8Rng) -> Result<Vec<ModMat>> {
    let d = s.rows;
    let pivots: Vec<usize> =
        (0..d).map(|r| (0..s.cols).find(|&c| s.get(r, c) != 0).unwrap()).collect();
    // restriction R: m * b_j = Σ_i R[i][j] b_i, coordinates read at pivot columns
    let mut r = ModMat::zeros(d, d);
    for j in 0..d {
        let b: Vec<u64> = (0..s.cols).map(|c| s.get(j, c)).collect();
        let img = m.mul_vec(&b, l);
        for (i, &pc) in pivots.iter().enumerate() {
            r.set(i, j, img[pc]);
        }
        // invariance check: img must equal Σ_i img[p_i] b_i
        for c in 0..s.cols {
            let mut acc = 0;
            for i in 0..d {
                acc = add_mod(acc, mul_mod(img[pivots[i]], s.get(i, c), l), l);
            }
            if acc != img[c] {
                return Err(Error::EigenSeparation("operator does not preserve eigenspace".into()));
            }
        }
    }
    let roots = poly_roots(&charpoly(&r, l), l, rng);
    if roots.len() == 1 {
        let mut shifted = r.clone();
        for i in 0..d {
            shifted.set(i, i, sub_mod(shifted.get(i, i), roots[0], l));
        }
        if shifted.data.iter().any(|&x| x != 0) {
            return Err(Error::EigenSeparation("defective eigenspace".into()));
        }
        return Ok(vec![s.clone()]);
    }
    let mut out = Vec::new();
    let mut total = 0;
    for &lam in &roots {
        let mut shifted = r.clone();
        for i in 0..d {
            shifted.set(i, i, sub_mod(shifted.get(i, i), lam, l));
        }
        let ker = shifted.kernel(l);
        total += ker.len();
        let mut sub = ModMat::zeros(ker.len(), s.cols);
        for (t, kv) in ker.iter().enumerate() {
            for c in 0..s.cols {
                let mut acc = 0;
                for i in 0..d {
                    if kv[i] != 0 {
                        acc = add_mod(acc, mul_mod(kv[i], s.get(i, c), l), l);
                    }
                }
                sub.set(t, c, acc);
            }
        }
        rref(&mut sub, l);
        out.push(sub);
    }
    if total != d {
        return Err(Error::EigenSeparation(format!(
            "eigenspaces of dimension {total} do not fill a space of dimension {d}"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: u64 = 1_000_000_007;

    #[test]
    fn primes_and_roots() {
        assert!(is_prime_u64(L));
        assert!(!is_prime_u64(L * 3));
        let (l, z) = prime_with_root(240, 1 << 40);
        assert!(is_prime_u64(l));
        assert_eq!((l - 1) % 240, 0);
        assert_eq!(pow_mod(z, 240, l), 1);
        assert_ne!(pow_mod(z, 120, l), 1);
        assert_ne!(pow_mod(z, 80, l), 1);
        assert_ne!(pow_mod(z, 48, l), 1);
    }

    #[test]
    fn charpoly_of_companion() {
        // companion of x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let mut m = ModMat::zeros(3, 3);
        m.set(1, 0, 1);
        m.set(2, 1, 1);
        m.set(0, 2, 6);
        m.set(1, 2, L - 11);
        m.set(2, 2, 6);
        let p = charpoly(&m, L);
        assert_eq!(p, vec![L - 6, 11, L - 6, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(poly_roots(&p, L, &mut rng), vec![1, 2, 3]);
    }

    #[test]
    fn roots_ignore_multiplicity_and_irreducibles() {
        // (x-5)^2 (x^2+1) over F_L with L ≡ 3 mod 4: only root 5
        let l = 1_000_000_007u64; // 1e9+7 ≡ 3 mod 4
        let a = vec![25, l - 10, 1];
        let b = vec![1, 0, 1];
        let mut prod = vec![0u64; 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] = add_mod(prod[i + j], mul_mod(a[i], b[j], l), l);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(poly_roots(&prod, l, &mut rng), vec![5]);
    }

    #[test]
    fn splits_diagonalizable_family() {
        // two commuting diagonal operators in a scrambled basis
        let p = {
            let mut p = ModMat::identity(3);
            p.set(0, 1, 2);
            p.set(2, 0, 5);
            p
        };
        let mut pinv = {
            let mut aug = ModMat::zeros(3, 6);
            for i in 0..3 {
                for j in 0..3 {
                    aug.set(i, j, p.get(i, j));
                }
                aug.set(i, 3 + i, 1);
            }
            rref(&mut aug, L);
            aug
        };
        let mut inv = ModMat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                inv.set(i, j, pinv.get(i, 3 + j));
            }
        }
        pinv = inv;
        let d1 = {
            let mut d = ModMat::zeros(3, 3);
            d.set(0, 0, 1);
            d.set(1, 1, 1);
            d.set(2, 2, 4);
            d
        };
        let d2 = {
            let mut d = ModMat::zeros(3, 3);
            d.set(0, 0, 2);
            d.set(1, 1, 3);
            d.set(2, 2, 3);
            d
        };
        let ops = [p.mul(&d1, L).mul(&pinv, L), p.mul(&d2, L).mul(&pinv, L)];
        let vecs = common_eigenvectors(3, &[0, 1], |i| ops[i].clone(), L, 3).unwrap();
        assert_eq!(vecs.len(), 3);
        for v in &vecs {
            for op in &ops {
                let w = op.mul_vec(v, L);
                let k = (0..3).find(|&i| v[i] != 0).unwrap();
                let lam = mul_mod(w[k], inv_mod(v[k], L), L);
                for i in 0..3 {
                    assert_eq!(w[i], mul_mod(lam, v[i], L));
                }
            }
        }
    }
}
