//! Invariant factors of `xI - g` over `K[x]` via Smith normal form.
//!
//! Two elements of `GL_n(K)` are conjugate iff their invariant factors agree,
//! which gives an independent check on the orbit-based class computation.

use serde::{Deserialize, Serialize};

use crate::field::{Fe, Field};

use super::Mat;

type Poly = Vec<Fe>;

fn trim(p: &mut Poly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn deg(p: &Poly) -> usize {
    p.len().saturating_sub(1)
}

fn sub_scaled(a: &Poly, b: &Poly, c: Fe, shift: usize, f: &Field) -> Poly {
    let mut out = a.clone();
    if out.len() < b.len() + shift {
        out.resize(b.len() + shift, 0);
    }
    for (i, &x) in b.iter().enumerate() {
        out[i + shift] = f.sub(out[i + shift], f.mul(c, x));
    }
    trim(&mut out);
    out
}

fn divrem(a: &Poly, b: &Poly, f: &Field) -> (Poly, Poly) {
    let mut r = a.clone();
    trim(&mut r);
    let lead_inv = f.inv(*b.last().unwrap());
    let mut q = vec![0; r.len().saturating_sub(b.len()) + 1];
    while !r.is_empty() && r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = f.mul(*r.last().unwrap(), lead_inv);
        q[shift] = c;
        r = sub_scaled(&r, b, c, shift, f);
    }
    trim(&mut q);
    (q, r)
}

fn mul(a: &Poly, b: &Poly, f: &Field) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

fn monic(p: &Poly, f: &Field) -> Poly {
    let inv = f.inv(*p.last().unwrap());
    p.iter().map(|&x| f.mul(x, inv)).collect()
}

/// Monic invariant factors of positive degree, each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassInvariant {
    pub factors: Vec<Vec<Fe>>,
}

pub fn class_invariant(g: &Mat, f: &Field) -> ClassInvariant {
    let n = g.dim();
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut p = vec![f.neg(g.get(i, j))];
                    if i == j {
                        p.push(1);
                    }
                    trim(&mut p);
                    p
                })
                .collect()
        })
        .collect();
    let mut diag = Vec::new();
    for t in 0..n {
        loop {
            // move an entry of least degree to (t, t)
            let mut best = None;
            for i in t..n {
                for j in t..n {
                    if !m[i][j].is_empty() {
                        let d = deg(&m[i][j]);
                        if best.map_or(true, |(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let Some((_, bi, bj)) = best else { break };
            m.swap(t, bi);
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            let piv = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..n {
                let (q, r) = divrem(&m[i][t], &piv, f);
                for j in t..n {
                    let prod = mul(&q, &m[t][j], f);
                    m[i][j] = sub_scaled(&m[i][j], &prod, 1, 0, f);
                }
                if !r.is_empty() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let (q, r) = divrem(&m[t][j], &piv, f);
                for i in t..n {
                    let prod = mul(&q, &m[i][t], f);
                    m[i][j] = sub_scaled(&m[i][j], &prod, 1, 0, f);
                }
                if !r.is_empty() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the remaining block
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !divrem(&m[i][j], &piv, f).1.is_empty());
            match bad {
                Some((i, _)) => {
                    for j in t..n {
                        let v = m[i][j].clone();
                        m[t][j] = sub_scaled(&m[t][j], &v, f.neg(1), 0, f);
                    }
                }
                None => break,
            }
        }
        diag.push(monic(&m[t][t], f));
    }
    diag.sort_by_key(|p| p.len());
    ClassInvariant { factors: diag.into_iter().filter(|p| p.len() > 1).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::matgroup::FiniteGroup;
    use std::collections::HashMap;
    use std::sync::Arc;

    #[test]
    fn scalar_matrix_has_repeated_linear_factor() {
        let f = Field::new(3, 2).unwrap();
        let a = 5;
        let inv = class_invariant(&Mat::diag(&[a, a]), &f);
        let lin = vec![f.neg(a), 1];
        assert_eq!(inv.factors, vec![lin.clone(), lin]);
    }

    fn check_complete(p: u32, d: u32, n: usize, expect: usize) {
        let f = Arc::new(Field::new(p, d).unwrap());
        let g = FiniteGroup::general_linear(f.clone(), n, 1 << 21).unwrap();
        let mut by_inv: HashMap<ClassInvariant, u32> = HashMap::new();
        for (i, m) in g.elements().iter().enumerate() {
            let c = g.class_of(i as u32);
            let inv = class_invariant(m, &f);
            let prev = *by_inv.entry(inv).or_insert(c);
            assert_eq!(prev, c, "invariant spans two orbit classes");
        }
        assert_eq!(by_inv.len(), g.num_classes());
        assert_eq!(g.num_classes(), expect);
    }

    #[test]
    fn invariants_match_orbits_gl2_f4() {
        check_complete(2, 2, 2, 15);
    }

    #[test]
    fn invariants_match_orbits_gl2_f9() {
        check_complete(3, 2, 2, 80);
    }

    #[test]
    fn invariants_match_orbits_gl3_f2() {
        check_complete(2, 1, 3, 6);
    }
}
