//! Finite fields by exp/log tables, the quadratic tower `F_p ⊂ F_q ⊂ E`, and
//! additive characters.
//!
//! Elements are `u32` codes: the coefficient vector over `F_p` in the power
//! basis of the defining modulus, read as little-endian base-`p` digits. The
//! prime subfield therefore occupies codes `0..p`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclo::Cyclo;
use crate::error::{Error, Result};

pub type Fe = u32;

const ADD_TABLE_LIMIT: u32 = 1024;

pub fn is_prime_u32(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A finite field `F_{p^d}`.
#[derive(Debug)]
pub struct Field {
    p: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<Fe>,
    log: Vec<u32>,
    add: Option<Vec<Fe>>,
    neg: Vec<Fe>,
    frob: Vec<Fe>,
    abs_trace: Vec<u32>,
}

impl Field {
    /// `F_{p^d}` defined by the least primitive polynomial of degree `d`,
    /// ordered by reading coefficients from `x^{d-1}` down to the constant.
    pub fn new(p: u32, d: u32) -> Result<Field> {
        if !is_prime_u32(p) {
            return Err(Error::NonPrime(p));
        }
        let size = (p as u64).pow(d);
        if size > 1 << 20 {
            return Err(Error::FieldTooLarge(size));
        }
        let size = size as u32;
        for code in 0..size {
            let low = digits_of(code, p, d);
            if low[0] == 0 && d > 1 {
                continue;
            }
            if let Some(exp) = power_cycle(p, d, &low) {
                let mut modulus = low;
                modulus.push(1);
                return Ok(Self::from_exp(p, d, modulus, exp));
            }
        }
        unreachable!("primitive polynomials exist in every degree")
    }

    fn from_exp(p: u32, d: u32, modulus: Vec<u32>, exp_cycle: Vec<Fe>) -> Field {
        let size = p.pow(d);
        let mut log = vec![u32::MAX; size as usize];
        for (i, &e) in exp_cycle.iter().enumerate() {
            log[e as usize] = i as u32;
        }
        let mut exp = exp_cycle.clone();
        exp.extend_from_slice(&exp_cycle);
        let neg: Vec<Fe> = (0..size)
            .map(|a| {
                let dg = digits_of(a, p, d);
                code_of(&dg.iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p)
            })
            .collect();
        let add = if size <= ADD_TABLE_LIMIT {
            let mut t = vec![0; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = digit_add(a, b, p, d);
                }
            }
            Some(t)
        } else {
            None
        };
        let mut f = Field {
            p,
            degree: d,
            size,
            modulus,
            exp,
            log,
            add,
            neg,
            frob: Vec::new(),
            abs_trace: Vec::new(),
        };
        f.frob = (0..size).map(|a| f.pow(a, p as u64)).collect();
        f.abs_trace = (0..size)
            .map(|a| {
                let mut acc = 0;
                let mut x = a;
                for _ in 0..d {
                    acc = f.add(acc, x);
                    x = f.frob[x as usize];
                }
                assert!(acc < p, "absolute trace left the prime field");
                acc
            })
            .collect();
        f
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The fixed generator of the multiplicative group (the class of `x`).
    pub fn generator(&self) -> Fe {
        self.exp[1 % (self.size as usize - 1).max(1)]
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.add {
            Some(t) => t[(a * self.size + b) as usize],
            None if self.p == 2 => a ^ b,
            None => digit_add(a, b, self.p, self.degree),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "inverse of zero");
        let m = self.size - 1;
        self.exp[((m - self.log[a as usize]) % m) as usize]
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let m = (self.size - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % m)) % m) as usize]
    }

    /// `g^i` for the fixed generator `g`.
    #[inline]
    pub fn exp(&self, i: u64) -> Fe {
        self.exp[(i % (self.size as u64 - 1)) as usize]
    }

    /// Discrete log base the fixed generator; `None` at zero.
    #[inline]
    pub fn log(&self, a: Fe) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    /// `a^p`.
    #[inline]
    pub fn frob_p(&self, a: Fe) -> Fe {
        self.frob[a as usize]
    }

    /// `Tr_{F/F_p}(a)` as an integer in `0..p`.
    #[inline]
    pub fn abs_trace(&self, a: Fe) -> u32 {
        self.abs_trace[a as usize]
    }

    pub fn digits(&self, a: Fe) -> Vec<u32> {
        digits_of(a, self.p, self.degree)
    }

    pub fn from_digits(&self, d: &[u32]) -> Fe {
        code_of(d, self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.size
    }

    pub fn units(&self) -> impl Iterator<Item = Fe> {
        1..self.size
    }
}

fn digits_of(mut a: u32, p: u32, d: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(d as usize);
    for _ in 0..d {
        out.push(a % p);
        a /= p;
    }
    out
}

fn code_of(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn digit_add(a: u32, b: u32, p: u32, d: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    for _ in 0..d {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// Powers of `x` modulo the monic polynomial with low coefficients `low`, if
/// `x` has multiplicative order exactly `p^d - 1`.
fn power_cycle(p: u32, d: u32, low: &[u32]) -> Option<Vec<Fe>> {
    let size = p.pow(d);
    let m = size - 1;
    let mut cur = vec![0u32; d as usize];
    cur[0] = 1;
    let mut out = Vec::with_capacity(m as usize);
    for i in 0..m {
        let code = code_of(&cur, p);
        if i > 0 && code == 1 {
            return None;
        }
        out.push(code);
        // multiply by x
        let top = cur[d as usize - 1];
        for j in (1..d as usize).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for j in 0..d as usize {
                cur[j] = (cur[j] + p * p - top * low[j] % p) % p;
            }
        }
    }
    if code_of(&cur, p) == 1 {
        Some(out)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Base,
    Ext,
}

/// Element of the tower together with the level it is declared at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub level: Level,
    /// Code in `E`; base-level elements are stored through the embedding.
    pub code: Fe,
}

/// `F_p ⊂ F_q ⊂ E = F_{q^2}`.
#[derive(Debug)]
pub struct FieldTower {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    base: Arc<Field>,
    ext: Arc<Field>,
    embed: Vec<Fe>,
    restrict: Vec<u32>,
    frob_q: Vec<Fe>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDescriptor {
    pub p: u32,
    pub k: u32,
    pub base_modulus: Vec<u32>,
    pub ext_modulus: Vec<u32>,
}

pub fn build_tower(p: u32, k: u32) -> Result<FieldTower> {
    if !is_prime_u32(p) {
        return Err(Error::NonPrime(p));
    }
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let big = (p as u64).checked_pow(2 * k).unwrap_or(u64::MAX);
    if big > 1 << 20 {
        return Err(Error::FieldTooLarge(big));
    }
    let base = Arc::new(Field::new(p, k)?);
    let ext = Arc::new(Field::new(p, 2 * k)?);
    let q = p.pow(k);
    // image of the base generator: a root of the base modulus in E
    let root = ext
        .elements()
        .find(|&r| {
            let mut acc = 0;
            for &c in base.modulus().iter().rev() {
                acc = ext.add(ext.mul(acc, r), c);
            }
            acc == 0
        })
        .expect("base modulus splits in E");
    let mut embed = vec![0; base.size() as usize];
    for i in 0..(q - 1) as u64 {
        embed[base.exp(i) as usize] = ext.pow(root, i);
    }
    let mut restrict = vec![u32::MAX; ext.size() as usize];
    for (b, &e) in embed.iter().enumerate() {
        restrict[e as usize] = b as u32;
    }
    let frob_q = ext.elements().map(|a| ext.pow(a, q as u64)).collect();
    let t = FieldTower { p, k, q, base, ext, embed, restrict, frob_q };
    debug_assert!(t.check_embedding());
    Ok(t)
}

impl FieldTower {
    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<Field> {
        &self.ext
    }

    pub fn q_ext(&self) -> u32 {
        self.q * self.q
    }

    pub fn descriptor(&self) -> TowerDescriptor {
        TowerDescriptor {
            p: self.p,
            k: self.k,
            base_modulus: self.base.modulus().to_vec(),
            ext_modulus: self.ext.modulus().to_vec(),
        }
    }

    /// Base-field code to `E` code.
    #[inline]
    pub fn embed(&self, b: Fe) -> Fe {
        self.embed[b as usize]
    }

    /// `E` code to base-field code, if the element lies in `F_q`.
    #[inline]
    pub fn restrict(&self, e: Fe) -> Option<Fe> {
        let r = self.restrict[e as usize];
        (r != u32::MAX).then_some(r)
    }

    #[inline]
    pub fn in_base(&self, e: Fe) -> bool {
        self.restrict[e as usize] != u32::MAX
    }

    /// `σ(x) = x^q` on `E`.
    #[inline]
    pub fn frobenius(&self, e: Fe) -> Fe {
        self.frob_q[e as usize]
    }

    pub fn elem_ext(&self, code: Fe) -> FieldElem {
        FieldElem { level: Level::Ext, code }
    }

    pub fn elem_base(&self, base_code: Fe) -> FieldElem {
        FieldElem { level: Level::Base, code: self.embed(base_code) }
    }

    /// Coefficients over `F_p` in the canonical basis of the element's level.
    pub fn coefficients(&self, x: FieldElem) -> Vec<u32> {
        match x.level {
            Level::Ext => self.ext.digits(x.code),
            Level::Base => self.base.digits(self.restrict(x.code).unwrap()),
        }
    }

    pub fn trace_e_f(&self, x: FieldElem) -> Result<FieldElem> {
        if x.level != Level::Ext {
            return Err(Error::LevelMismatch);
        }
        let t = self.ext.add(x.code, self.frobenius(x.code));
        debug_assert!(self.in_base(t));
        Ok(FieldElem { level: Level::Base, code: t })
    }

    pub fn norm_e_f(&self, x: FieldElem) -> Result<FieldElem> {
        if x.level != Level::Ext {
            return Err(Error::LevelMismatch);
        }
        let t = self.ext.mul(x.code, self.frobenius(x.code));
        debug_assert!(self.in_base(t));
        Ok(FieldElem { level: Level::Base, code: t })
    }

    /// Least power of the generator of `E^×` with `Tr_{E/F} = 0`.
    pub fn trace_zero_delta(&self) -> FieldElem {
        let e = &self.ext;
        let code = (0..(e.size() - 1) as u64)
            .map(|i| e.exp(i))
            .find(|&x| e.add(x, self.frobenius(x)) == 0)
            .expect("trace kernel is nonzero");
        FieldElem { level: Level::Ext, code }
    }

    pub fn additive_character(&self, mode: CharMode) -> AdditiveCharacter {
        let twist = match mode {
            CharMode::Sigma => 1,
            CharMode::Tau => self.trace_zero_delta().code,
        };
        let mut chi = AdditiveCharacter::on_field(&self.ext, twist);
        chi.mode = Some(mode);
        chi
    }

    fn check_embedding(&self) -> bool {
        let b = &self.base;
        let e = &self.ext;
        b.elements().all(|x| {
            b.elements().all(|y| {
                self.embed(b.add(x, y)) == e.add(self.embed(x), self.embed(y))
                    && self.embed(b.mul(x, y)) == e.mul(self.embed(x), self.embed(y))
            })
        }) && (0..self.p).all(|c| self.embed(c) == c)
    }
}

/// The involution for which a character is stable: `ψ = ψ^σ` or `ψ = ψ^τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CharMode {
    Sigma,
    Tau,
}

/// `ψ(x) = ψ₀(Tr_{K/F_p}(t·x))` with `ψ₀(c) = ζ_p^c`.
#[derive(Clone, Debug)]
pub struct AdditiveCharacter {
    p: u32,
    twist: Fe,
    pub mode: Option<CharMode>,
    phase: Vec<u32>,
}

impl AdditiveCharacter {
    pub fn on_field(field: &Field, twist: Fe) -> AdditiveCharacter {
        assert!(twist != 0, "degenerate additive character");
        let phase = field.elements().map(|x| field.abs_trace(field.mul(twist, x))).collect();
        AdditiveCharacter { p: field.p(), twist, mode: None, phase }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn twist(&self) -> Fe {
        self.twist
    }

    /// Exponent `c` with `ψ(x) = ζ_p^c`.
    #[inline]
    pub fn phase(&self, x: Fe) -> u32 {
        self.phase[x as usize]
    }

    pub fn value(&self, x: Fe) -> Cyclo {
        Cyclo::root_of_unity(self.p, self.phase(x) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tower_sizes_and_frobenius() {
        let t = build_tower(2, 1).unwrap();
        assert_eq!(t.ext().size() - 1, 3);
        let t = build_tower(3, 1).unwrap();
        assert_eq!(t.ext().size() - 1, 8);
        let t = build_tower(2, 2).unwrap();
        let e = t.ext();
        for x in e.elements() {
            assert_eq!(t.frobenius(x), e.pow(x, 4));
            assert_eq!(t.frobenius(t.frobenius(x)), x);
            assert_eq!(t.frobenius(x) == x, t.in_base(x));
        }
        assert_eq!(e.elements().filter(|&x| t.in_base(x)).count(), 4);
    }

    #[test]
    fn guards() {
        assert!(matches!(build_tower(4, 1), Err(Error::NonPrime(4))));
        assert!(matches!(build_tower(2, 11), Err(Error::FieldTooLarge(_))));
        assert!(build_tower(2, 10).is_ok());
    }

    #[test]
    fn moduli_are_primitive() {
        for (p, d) in [(2, 1), (2, 2), (2, 4), (3, 1), (3, 2), (5, 2), (7, 2)] {
            let f = Field::new(p, d).unwrap();
            let g = f.generator();
            let mut x = g;
            let mut order = 1;
            while x != 1 {
                x = f.mul(x, g);
                order += 1;
            }
            assert_eq!(order, f.size() - 1);
        }
    }

    #[test]
    fn trace_of_generator_in_f4() {
        let t = build_tower(2, 1).unwrap();
        let e = t.ext();
        let w = e.generator();
        // direct polynomial arithmetic: ω^2 = ω + 1 over F_2
        assert_eq!(e.mul(w, w), e.add(w, 1));
        let tr = t.trace_e_f(t.elem_ext(w)).unwrap();
        assert_eq!(tr.level, Level::Base);
        assert_eq!(tr.code, 1);
    }

    #[test]
    fn trace_and_norm_on_base() {
        let t = build_tower(3, 1).unwrap();
        let e = t.ext();
        for b in t.base().elements() {
            let x = t.elem_base(b);
            assert!(t.trace_e_f(x).is_err());
            let xe = t.elem_ext(x.code);
            assert_eq!(t.trace_e_f(xe).unwrap().code, e.add(x.code, x.code));
            assert_eq!(t.norm_e_f(xe).unwrap().code, e.mul(x.code, x.code));
        }
    }

    #[test]
    fn trace_f9_is_linear_and_onto() {
        let t = build_tower(3, 1).unwrap();
        let e = t.ext();
        let tr = |x| t.trace_e_f(t.elem_ext(x)).unwrap().code;
        let mut hit = [0; 3];
        for x in e.elements() {
            hit[tr(x) as usize] += 1;
            for y in e.elements() {
                assert_eq!(tr(e.add(x, y)), e.add(tr(x), tr(y)));
            }
            for c in 0..3 {
                assert_eq!(tr(e.mul(c, x)), e.mul(c, tr(x)));
            }
        }
        assert_eq!(hit, [3, 3, 3]);
    }

    #[test]
    fn delta_choices() {
        let t = build_tower(2, 1).unwrap();
        assert_eq!(t.trace_zero_delta().code, 1);
        let t = build_tower(3, 1).unwrap();
        let e = t.ext();
        let d = t.trace_zero_delta().code;
        assert_ne!(d, 0);
        assert_eq!(e.mul(d, d), e.neg(1));
        let sq_minus_one: Vec<_> = e.units().filter(|&x| e.mul(x, x) == e.neg(1)).collect();
        assert!(sq_minus_one.contains(&d));
        assert_eq!(e.add(d, t.frobenius(d)), 0);
    }

    #[test]
    fn sigma_character_on_f4() {
        let t = build_tower(2, 1).unwrap();
        let psi = t.additive_character(CharMode::Sigma);
        let w = t.ext().generator();
        assert_eq!(psi.value(w), Cyclo::from_int(-1));
        assert_eq!(psi.value(0), Cyclo::one());
    }

    #[test]
    fn characters_sum_to_zero_and_are_stable() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let t = build_tower(p, k).unwrap();
            let e = t.ext();
            for mode in [CharMode::Sigma, CharMode::Tau] {
                let psi = t.additive_character(mode);
                let mut counts = vec![0i64; p as usize];
                for x in e.elements() {
                    counts[psi.phase(x) as usize] += 1;
                }
                assert!(Cyclo::from_counts(p, &counts).is_zero());
                for x in e.elements() {
                    let y = match mode {
                        CharMode::Sigma => t.frobenius(x),
                        CharMode::Tau => e.neg(t.frobenius(x)),
                    };
                    assert_eq!(psi.phase(x), psi.phase(y));
                }
                if mode == CharMode::Tau {
                    for b in t.base().elements() {
                        assert_eq!(psi.phase(t.embed(b)), 0);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn psi_is_additive(a in 0u32..81, b in 0u32..81) {
            let t = build_tower(3, 2).unwrap();
            let e = t.ext();
            let (a, b) = (a % e.size(), b % e.size());
            for mode in [CharMode::Sigma, CharMode::Tau] {
                let psi = t.additive_character(mode);
                prop_assert_eq!((psi.phase(a) + psi.phase(b)) % 3, psi.phase(e.add(a, b)));
            }
        }

        #[test]
        fn field_axioms(a in 0u32..625, b in 0u32..625, c in 0u32..625) {
            let f = Field::new(5, 4).unwrap();
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            prop_assert_eq!(f.frob_p(f.mul(a, b)), f.mul(f.frob_p(a), f.frob_p(b)));
        }
    }
}
