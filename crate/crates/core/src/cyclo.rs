//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! An element is stored as a sparse, unreduced combination `Σ c_k ζ_m^k` with
//! rational coefficients and exponents taken modulo `m`. Ring operations work in
//! `Q[x]/(x^m - 1)` which maps homomorphically onto `Q(ζ_m)`; only comparisons
//! reduce modulo the cyclotomic polynomial `Φ_m`. Elements of different orders
//! are combined in `Q(ζ_lcm)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Element of `Q(ζ_order)`.
#[derive(Clone, Debug)]
pub struct Cyclo {
    order: u32,
    terms: BTreeMap<u32, BigRational>,
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a / a.gcd(&b) * b
}

pub fn euler_phi(mut m: u32) -> u32 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Integer coefficients of `Φ_m`, lowest degree first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let den = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &den);
        }
    }
    cache.lock().unwrap().insert(m, num.clone());
    num
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Row `k` holds the coefficients of `x^k mod Φ_m` for `0 <= k < m`.
pub(crate) fn reduction_table(m: u32) -> Arc<Vec<Vec<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Vec<i64>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&m) {
        return t.clone();
    }
    let phi = cyclotomic_polynomial(m);
    let deg = phi.len() - 1;
    let mut rows = Vec::with_capacity(m as usize);
    let mut cur = vec![0i64; deg];
    cur[0] = 1;
    for _ in 0..m {
        rows.push(cur.clone());
        // multiply by x and reduce
        let top = cur[deg - 1];
        for j in (1..deg).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for j in 0..deg {
                cur[j] = cur[j]
                    .checked_sub(top.checked_mul(phi[j]).expect("reduction overflow"))
                    .expect("reduction overflow");
            }
        }
    }
    let t = Arc::new(rows);
    cache.lock().unwrap().insert(m, t.clone());
    t
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo { order: 1, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(v: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !v.is_zero() {
            terms.insert(0, v);
        }
        Cyclo { order: 1, terms }
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// `ζ_order^k`.
    pub fn root_of_unity(order: u32, k: i64) -> Self {
        assert!(order > 0);
        let e = k.rem_euclid(order as i64) as u32;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigRational::one());
        Cyclo { order, terms }
    }

    /// `Σ_j counts[j] ζ_order^j`.
    pub fn from_counts(order: u32, counts: &[i64]) -> Self {
        let mut terms = BTreeMap::new();
        for (j, &c) in counts.iter().enumerate() {
            if c != 0 {
                let e = (j as u32) % order;
                let entry = terms.entry(e).or_insert_with(BigRational::zero);
                *entry += BigRational::from_integer(c.into());
            }
        }
        terms.retain(|_, v: &mut BigRational| !v.is_zero());
        Cyclo { order, terms }
    }

    /// `(1/den) Σ c ζ_order^k` from sparse integer terms.
    pub fn from_sparse(order: u32, terms: &[(u32, i64)], den: i64) -> Self {
        let mut out = BTreeMap::new();
        for &(k, c) in terms {
            if c != 0 {
                let entry = out.entry(k % order).or_insert_with(BigRational::zero);
                *entry += BigRational::new(c.into(), den.into());
            }
        }
        out.retain(|_, v: &mut BigRational| !v.is_zero());
        Cyclo { order, terms: out }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Same element written over `ζ_m`, where `self.order` divides `m`.
    pub fn lift(&self, m: u32) -> Cyclo {
        assert!(m % self.order == 0, "order {} does not divide {}", self.order, m);
        if m == self.order {
            return self.clone();
        }
        let f = m / self.order;
        Cyclo {
            order: m,
            terms: self.terms.iter().map(|(k, v)| (k * f, v.clone())).collect(),
        }
    }

    /// Coefficients in the power basis `1, ζ_m, …, ζ_m^{φ(m)-1}` (m a multiple of the order).
    pub fn canonical(&self, m: u32) -> Vec<BigRational> {
        assert!(m % self.order == 0);
        let table = reduction_table(m);
        let deg = table[0].len();
        let f = m / self.order;
        let mut out = vec![BigRational::zero(); deg];
        for (k, c) in &self.terms {
            let row = &table[((k * f) % m) as usize];
            for (j, &r) in row.iter().enumerate() {
                if r != 0 {
                    out[j] += c * BigRational::from_integer(r.into());
                }
            }
        }
        out
    }

    /// Rewrites the element in the reduced power basis of its own order.
    pub fn reduce(&self) -> Cyclo {
        let coeffs = self.canonical(self.order);
        let terms = coeffs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u32, c))
            .collect();
        Cyclo { order: self.order, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.canonical(self.order).iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        let c = self.canonical(self.order);
        if c[1..].iter().all(|x| x.is_zero()) {
            Some(c[0].clone())
        } else {
            None
        }
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|i| i.to_i64())
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    /// Complex conjugate (`ζ ↦ ζ^{-1}`).
    pub fn conj(&self) -> Cyclo {
        self.galois(-1)
    }

    /// Galois automorphism `ζ_m ↦ ζ_m^a` (a coprime to m).
    pub fn galois(&self, a: i64) -> Cyclo {
        let m = self.order as i64;
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let e = ((*k as i64) * a).rem_euclid(m) as u32;
            let entry = terms.entry(e).or_insert_with(BigRational::zero);
            *entry += v;
        }
        terms.retain(|_, v: &mut BigRational| !v.is_zero());
        Cyclo { order: self.order, terms }
    }

    pub fn scale(&self, s: &BigRational) -> Cyclo {
        if s.is_zero() {
            return Cyclo::zero();
        }
        Cyclo {
            order: self.order,
            terms: self.terms.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn scale_frac(&self, num: i64, den: i64) -> Cyclo {
        self.scale(&BigRational::new(num.into(), den.into()))
    }

    /// Multiplies by `ζ_order^k` (order must divide `self.order` after lifting).
    pub fn mul_root(&self, order: u32, k: i64) -> Cyclo {
        let m = lcm(self.order, order);
        let base = self.lift(m);
        let shift = (k.rem_euclid(order as i64) as u32) * (m / order);
        Cyclo {
            order: m,
            terms: base.terms.into_iter().map(|(e, v)| ((e + shift) % m, v)).collect(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        let m = self.order as f64;
        self.terms
            .iter()
            .map(|(k, v)| {
                let ang = 2.0 * std::f64::consts::PI * (*k as f64) / m;
                Complex64::from_polar(v.to_f64().unwrap_or(f64::NAN), ang)
            })
            .sum()
    }

    /// Image under `ζ_order ↦ z^{modulus_order / order}` in `F_l`, where `z` has
    /// multiplicative order `modulus_order`. `None` if a denominator vanishes mod `l`.
    pub fn to_mod(&self, l: u64, z: u64, modulus_order: u32) -> Option<u64> {
        assert!(modulus_order % self.order == 0);
        let step = (modulus_order / self.order) as u64;
        let zl = crate::modular::pow_mod(z, step, l);
        let mut acc = 0u64;
        for (k, v) in &self.terms {
            let num = bigint_mod(v.numer(), l);
            let den = bigint_mod(v.denom(), l);
            if den == 0 {
                return None;
            }
            let c = crate::modular::mul_mod(num, crate::modular::inv_mod(den, l), l);
            let t = crate::modular::mul_mod(c, crate::modular::pow_mod(zl, *k as u64, l), l);
            acc = (acc + t) % l;
        }
        Some(acc)
    }

    fn combine(&self, other: &Cyclo, sign: bool) -> Cyclo {
        let m = lcm(self.order, other.order);
        let mut out = self.lift(m);
        let f = m / other.order;
        for (k, v) in &other.terms {
            let e = (k * f) % m;
            let entry = out.terms.entry(e).or_insert_with(BigRational::zero);
            if sign {
                *entry += v;
            } else {
                *entry -= v;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    fn product(&self, other: &Cyclo) -> Cyclo {
        if self.terms.is_empty() || other.terms.is_empty() {
            return Cyclo::zero();
        }
        let m = lcm(self.order, other.order);
        let fa = m / self.order;
        let fb = m / other.order;
        let mut terms: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let e = (ka * fa + kb * fb) % m;
                let entry = terms.entry(e).or_insert_with(BigRational::zero);
                *entry += va * vb;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        let out = Cyclo { order: m, terms };
        if out.terms.len() > euler_phi(m) as usize {
            out.reduce()
        } else {
            out
        }
    }

    /// Multiplicative inverse, computed as the product of the other Galois
    /// conjugates divided by the norm.
    pub fn inv(&self) -> Option<Cyclo> {
        let x = self.reduce();
        if x.terms.is_empty() {
            return None;
        }
        if let Some(r) = x.to_rational() {
            return Some(Cyclo::from_rational(r.recip()));
        }
        let m = x.order as i64;
        let mut prod = Cyclo::one();
        for a in 2..m {
            if a.gcd(&m) == 1 {
                prod = &prod * &x.galois(a);
            }
        }
        let norm = (&prod * &x).to_rational().expect("norm is rational");
        Some(prod.scale(&norm.recip()).reduce())
    }

    /// Canonical key usable for hashing and ordering at a fixed order `m`.
    pub fn key(&self, m: u32) -> Vec<BigRational> {
        self.canonical(m)
    }
}

fn bigint_mod(x: &BigInt, l: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(l));
    r.to_u64().unwrap()
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for Cyclo {}

impl Default for Cyclo {
    fn default() -> Self {
        Cyclo::zero()
    }
}

impl From<i64> for Cyclo {
    fn from(v: i64) -> Self {
        Cyclo::from_int(v)
    }
}

impl From<BigRational> for Cyclo {
    fn from(v: BigRational) -> Self {
        Cyclo::from_rational(v)
    }
}

impl<'a> Add<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &'a Cyclo) -> Cyclo {
        self.combine(rhs, true)
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        self.combine(&rhs, true)
    }
}

impl AddAssign<&Cyclo> for Cyclo {
    fn add_assign(&mut self, rhs: &Cyclo) {
        if self.order % rhs.order == 0 {
            let f = self.order / rhs.order;
            for (k, v) in &rhs.terms {
                let e = (k * f) % self.order;
                let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
                *entry += v;
                if entry.is_zero() {
                    self.terms.remove(&e);
                }
            }
        } else {
            *self = self.combine(rhs, true);
        }
    }
}

impl AddAssign for Cyclo {
    fn add_assign(&mut self, rhs: Cyclo) {
        *self += &rhs;
    }
}

impl<'a> Sub<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &'a Cyclo) -> Cyclo {
        self.combine(rhs, false)
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        self.combine(&rhs, false)
    }
}

impl<'a> Mul<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &'a Cyclo) -> Cyclo {
        self.product(rhs)
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        self.product(&rhs)
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            order: self.order,
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

impl std::iter::Sum for Cyclo {
    fn sum<I: Iterator<Item = Cyclo>>(iter: I) -> Cyclo {
        let mut acc = Cyclo::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl fmt::Display for Cyclo {
    /// Rationals print plainly; other values as `c*z{m}^k` over the reduced basis.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return write!(f, "{}", r);
        }
        let red = self.reduce();
        let mut first = true;
        for (k, c) in &red.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if *k == 0 {
                write!(f, "{}", a)?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", a)?;
                }
                write!(f, "z{}^{}", red.order, k)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12).len() - 1, 4);
        // Φ_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_polynomial(105).iter().any(|&c| c == -2));
    }

    #[test]
    fn sum_of_roots_vanishes() {
        for m in [2u32, 3, 5, 8, 12, 15, 240] {
            let s: Cyclo = (0..m as i64).map(|k| Cyclo::root_of_unity(m, k)).sum();
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn mixed_orders_and_rationality() {
        // ζ_3 + ζ_3^2 = -1
        let a = Cyclo::root_of_unity(3, 1) + Cyclo::root_of_unity(3, 2);
        assert_eq!(a.to_rational(), Some(BigRational::from_integer((-1).into())));
        // ζ_6^2 equals ζ_3
        assert_eq!(Cyclo::root_of_unity(6, 2), Cyclo::root_of_unity(3, 1));
        // i * i = -1
        let i = Cyclo::root_of_unity(4, 1);
        assert_eq!(&i * &i, Cyclo::from_int(-1));
        assert!(!i.is_rational());
    }

    #[test]
    fn inverse_in_q_zeta_15() {
        let x = Cyclo::from_int(2) + Cyclo::root_of_unity(15, 4) - Cyclo::root_of_unity(5, 1);
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Cyclo::one());
        assert!(Cyclo::zero().inv().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Cyclo::from_frac(5, 12).to_string(), "5/12");
        assert_eq!(Cyclo::root_of_unity(4, 1).to_string(), "z4^1");
    }

    #[test]
    fn modular_image_is_a_ring_map() {
        let l = 1_000_000_021u64; // 1 mod 4? checked below
        let (l, z) = crate::modular::prime_with_root(12, l);
        let a = Cyclo::root_of_unity(12, 5) + Cyclo::from_frac(1, 3);
        let b = Cyclo::root_of_unity(4, 3) - Cyclo::from_int(2);
        let ab = &a * &b;
        let ma = a.to_mod(l, z, 12).unwrap();
        let mb = b.to_mod(l, z, 12).unwrap();
        assert_eq!(ab.to_mod(l, z, 12).unwrap(), crate::modular::mul_mod(ma, mb, l));
    }

    fn arb_cyclo(m: u32) -> impl Strategy<Value = Cyclo> {
        proptest::collection::vec((0..m, -5i64..5), 0..6).prop_map(move |v| {
            v.into_iter()
                .map(|(k, c)| Cyclo::root_of_unity(m, k as i64).scale_frac(c, 1))
                .sum()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_cyclo(12), b in arb_cyclo(12), c in arb_cyclo(8)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn norm_is_rational(a in arb_cyclo(10)) {
            let n = &a * &a.conj();
            let red = n.reduce();
            // a * conj(a) is real; its Galois orbit product is rational
            prop_assert_eq!(red.conj(), red);
        }
    }
}
