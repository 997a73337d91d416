//! Period functionals on Whittaker models:
//! `λ_ι(W) = (1/|G_ι|) Σ_{h∈G_ι} W(h)`, `μ_κ(W) = (1/|G_ι|) Σ_{g∈X_κ} W(g)` and
//! `ℓ(W) = (1/|GL_n(F)|) Σ_{p∈P(F)} W(p)`, together with the verification suites.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basechange::{
    generic_on_sub, infer_dim_rho, match_by_twisted_trace, trace_histograms, twisted_classes, twisted_traces,
    BaseChangePair, MatchStatus,
};
use crate::chartable::{character_table, CharacterTable};
use crate::classfn::{ClassFn, Histogram};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::field::{AdditiveCharacter, Field};
use crate::gelfand_graev::GelfandGraev;
use crate::matgroup::bruhat::NCharacter;
use crate::matgroup::tower::Involution;
use crate::matgroup::{FiniteGroup, Mat};
use crate::report::{timed, VerificationReport};
use crate::setting::{BesselSet, Setting};

/// Exact or floating-point evaluation of the period sums.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Exact,
    Float { tol: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodValue {
    pub pi: usize,
    pub iota: Involution,
    pub lambda: BigRational,
    pub mu: BigRational,
    pub ell: Option<BigRational>,
    pub predicted: Option<BigRational>,
    pub matches: bool,
}

pub fn rational(c: &Cyclo, what: &str) -> Result<BigRational> {
    c.to_rational().ok_or_else(|| Error::Mismatch(format!("{what} = {c} is not rational")))
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Best rational approximation with denominator at most `bound` (continued fractions).
pub fn reconstruct(x: f64, bound: u64) -> BigRational {
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(bound) {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    BigRational::new(h1, k1)
}

/// Compares a period in the requested mode against an exact target.
pub fn compare(value: &Cyclo, target: &BigRational, mode: Mode, bound: u64) -> (String, bool) {
    match mode {
        Mode::Exact => {
            let pass = value.to_rational().as_ref() == Some(target);
            (value.to_string(), pass)
        }
        Mode::Float { tol } => {
            let z = value.to_c64();
            let t = target.to_f64().unwrap();
            let close = (z.re - t).abs() <= tol * t.abs().max(1.0) && z.im.abs() <= tol;
            let back = reconstruct(z.re, bound);
            (format!("{:.12e}", z.re), close && back == *target)
        }
    }
}

/// Histograms of `G_ι`, `X_κ` and `P(F)` under one `ψ`.
pub struct PeriodSums {
    pub iota: Involution,
    h: Histogram,
    x: Histogram,
    p: Option<Histogram>,
    h_order: u64,
    gl_f_order: u64,
}

impl PeriodSums {
    pub fn new(s: &Setting, gg: &GelfandGraev, iota: Involution) -> Result<PeriodSums> {
        let kappa = iota.opposite();
        if !s.ctx.is_stable(&gg.psi, kappa) || !s.ctx.is_trivial_on(&gg.psi, iota) {
            return Err(Error::Invalid(format!("ψ mode does not fit λ_{}", iota.symbol())));
        }
        let h = gg.histogram(s.sub_group(iota).elements()).0;
        let x = gg.histogram_idx(s.ctx.x_kappa(kappa)).0;
        let p = (iota == Involution::Sigma).then(|| gg.histogram_idx(&s.ctx.p_f).0);
        Ok(PeriodSums { iota, h, x, p, h_order: s.sub_group(iota).order(), gl_f_order: s.ctx.g_sigma.order() })
    }

    pub fn lambda(&self, values: &ClassFn) -> Cyclo {
        self.h.pair(values, 1).scale_frac(1, self.h_order as i64)
    }

    pub fn mu(&self, values: &ClassFn) -> Cyclo {
        self.x.pair(values, 1).scale_frac(1, self.h_order as i64)
    }

    /// Defined when `ψ` is trivial on `N(F)`.
    pub fn ell(&self, values: &ClassFn) -> Option<Cyclo> {
        self.p.as_ref().map(|p| p.pair(values, 1).scale_frac(1, self.gl_f_order as i64))
    }

    pub fn h_order(&self) -> u64 {
        self.h_order
    }
}

/// Everything computed for one side `ι`: periods, distinction and the base-change match.
pub struct Side<'a> {
    pub iota: Involution,
    pub set: BesselSet<'a>,
    pub sums: PeriodSums,
    pub values: Vec<PeriodValue>,
    pub distinguished: Vec<bool>,
    pub pairs: Vec<BaseChangePair>,
    pub rho_generic: Vec<bool>,
    pub micros: u64,
}

pub fn side(s: &Setting, iota: Involution) -> Result<Side<'_>> {
    let kappa = iota.opposite();
    let t0 = std::time::Instant::now();
    let set = BesselSet::new(s.gelfand_graev(iota, None)?, &s.table)?;
    let sums = PeriodSums::new(s, &set.gg, iota)?;
    let tc = twisted_classes(s, kappa)?;
    let hists = trace_histograms(s, &set.gg, &tc);
    let konst = s.main_constant();
    let mut values = Vec::new();
    let mut pairs = Vec::new();
    let mut distinguished = vec![false; s.table.len()];
    for pi in 0..s.table.len() {
        distinguished[pi] = s.distinction(pi, iota)? > 0;
    }
    for b in set.generic() {
        let d = s.table.degrees[b.pi];
        let lambda = rational(&sums.lambda(&b.values), "λ")?;
        let mu = rational(&sums.mu(&b.values), "μ")?;
        let ell = sums.ell(&b.values).map(|c| rational(&c, "ℓ")).transpose()?;
        let mut predicted = Some(BigRational::zero());
        if distinguished[b.pi] {
            let inferred = infer_dim_rho(s, &lambda, d);
            let tr = twisted_traces(&set, &hists, b.pi, d)?;
            let m = match_by_twisted_trace(s, &tc, &tr, b.pi, Some(inferred));
            predicted = m.rho.map(|r| ratio(s.sub_table(kappa).degrees[r], d) * &konst);
            pairs.push(m);
        }
        let matches = predicted.as_ref() == Some(&lambda);
        values.push(PeriodValue { pi: b.pi, iota, lambda, mu, ell, predicted, matches });
    }
    let rho_generic = generic_on_sub(s, kappa).unwrap_or_default();
    Ok(Side { iota, set, sums, values, distinguished, pairs, rho_generic, micros: t0.elapsed().as_micros() as u64 })
}

fn params(s: &Setting, iota: Involution, pi: usize) -> String {
    format!("{} H={} pi={} dim={}", s.label(), iota.symbol(), pi, s.table.degrees[pi])
}

/// `λ(B_π) · dim π / (|G|/(|G_σ||G_τ|))` against `dim ρ` of the twisted-trace match.
pub fn verify_main_theorem(s: &Setting, sd: &Side, mode: Mode, rep: &mut VerificationReport) {
    let kappa = sd.iota.opposite();
    let konst = s.main_constant();
    let per = sd.values.len().max(1) as u64;
    for v in &sd.values {
        let p = params(s, sd.iota, v.pi);
        let d = s.table.degrees[v.pi];
        let b = sd.set.get(v.pi).unwrap();
        let lam = sd.sums.lambda(&b.values);
        if !sd.distinguished[v.pi] {
            let (lhs, pass) = compare(&lam, &BigRational::zero(), mode, sd.sums.h_order());
            rep.push("main", "period-vanishes-off-distinction", p, lhs, 0, pass, sd.micros / per);
            continue;
        }
        let pair = sd.pairs.iter().find(|m| m.pi == v.pi).unwrap();
        let inferred = infer_dim_rho(s, &v.lambda, d);
        let rho_dim = pair.rho.map(|r| s.sub_table(kappa).degrees[r]);
        let pass = pair.status == MatchStatus::Unique
            && inferred.is_integer()
            && inferred.is_positive()
            && rho_dim.map(|r| BigRational::from_integer(r.into())) == Some(inferred.clone());
        rep.push(
            "main",
            "period-times-degree-is-matched-degree",
            format!("{p} rho={:?} status={:?}", pair.rho, pair.status),
            &inferred,
            rho_dim.map_or("none".to_string(), |x| x.to_string()),
            pass,
            sd.micros / per,
        );
        if let Some(target) = &v.predicted {
            let (lhs, pass) = compare(&lam, target, mode, sd.sums.h_order());
            rep.push("main", "period-equals-degree-ratio-times-constant", p.clone(), lhs, target, pass, 0);
        }
        if let Some(r) = pair.rho {
            let g = sd.rho_generic.get(r).copied().unwrap_or(false);
            rep.push("main", "matched-source-is-generic", p.clone(), g, true, g, 0);
        }
        // the invariant vector Σ_h π(h)B_π has Whittaker functional Σ_h B_π(h)
        let ((w_at_1, invariant), us) = timed(|| invariant_vector_check(s, &sd.set.gg, b, sd.iota));
        let target = &v.lambda * BigRational::from_integer(sd.sums.h_order().into());
        let pass = !w_at_1.is_zero() && w_at_1.to_rational() == Some(target.clone()) && invariant;
        rep.push("main", "invariant-vector-has-nonzero-whittaker-value", p, &w_at_1, target, pass, us);
    }
    rep.check(
        "main",
        "group-order-constant",
        s.label(),
        konst.clone(),
        ratio(s.group().order(), s.ctx.g_sigma.order() * s.ctx.g_tau.order()),
        0,
    );
}

/// `W_π(1) = Σ_h B(h)` by direct evaluation, and `W_π(x h') = W_π(x)` at a few points.
fn invariant_vector_check(
    s: &Setting,
    gg: &GelfandGraev,
    b: &crate::gelfand_graev::BesselTable,
    iota: Involution,
) -> (Cyclo, bool) {
    let f = s.ctx.tower.ext();
    let h = s.sub_group(iota);
    let w = |x: &Mat| -> Cyclo { h.elements().iter().map(|y| gg.eval(b, &x.mul(y, f))).sum() };
    let at1 = w(&Mat::identity(s.ctx.n));
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let ok = (0..3).all(|_| {
        let x = *s.group().elem(rng.gen_range(0..s.group().len() as u32));
        let hp = *h.elem(rng.gen_range(0..h.len() as u32));
        w(&x.mul(&hp, f)) == w(&x)
    });
    (at1, ok)
}

/// `(dim π/dim ρ_κ) λ_ι = (dim π/dim ρ_ι) λ_κ = |G|/(|G_ι||G_κ|)` for π distinguished on both sides.
pub fn verify_symmetric_form(s: &Setting, a: &Side, b: &Side, rep: &mut VerificationReport) {
    let konst = s.main_constant();
    for va in &a.values {
        let Some(vb) = b.values.iter().find(|v| v.pi == va.pi) else { continue };
        let (Some(pa), Some(pb)) =
            (a.pairs.iter().find(|m| m.pi == va.pi), b.pairs.iter().find(|m| m.pi == va.pi))
        else {
            continue;
        };
        let (Some(ra), Some(rb)) = (pa.rho, pb.rho) else { continue };
        let d = s.table.degrees[va.pi];
        let lhs = ratio(d, s.sub_table(a.iota.opposite()).degrees[ra]) * &va.lambda;
        let rhs = ratio(d, s.sub_table(b.iota.opposite()).degrees[rb]) * &vb.lambda;
        let pass = lhs == rhs && lhs == konst;
        rep.push("main", "symmetric-form", params(s, a.iota, va.pi), &lhs, &rhs, pass, 0);
    }
}

/// `λ_ι(B_π) = μ_κ(B_π)`, support sets on monomials, stabilizer counts, and
/// `μ_κ(π(n)W) = ψ(n) μ_κ(W)`.
pub fn verify_lemmas(s: &Setting, sd: &Side, rep: &mut VerificationReport) {
    let iota = sd.iota;
    let kappa = iota.opposite();
    let f = s.ctx.tower.ext();
    let gg = &sd.set.gg;
    for v in &sd.values {
        rep.check("lemma", "lambda-equals-mu", params(s, iota, v.pi), v.lambda.clone(), v.mu.clone(), 0);
    }
    let monomials = gg.monomials();
    let in_h: Vec<bool> = monomials.iter().map(|m| s.sub_group(iota).contains(m)).collect();
    let in_x: Vec<bool> = monomials.iter().map(|m| m.mul(&s.ctx.involution(m, kappa), f).is_identity()).collect();
    for b in sd.set.generic() {
        let ((left, right), us) = timed(|| {
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for (i, m) in monomials.iter().enumerate() {
                if (in_h[i] || in_x[i]) && !gg.eval(b, m).is_zero() {
                    if in_h[i] {
                        left.insert(*m);
                    }
                    if in_x[i] {
                        right.insert(*m);
                    }
                }
            }
            (left, right)
        });
        let pass = left == right;
        rep.push("lemma", "support-sets-agree", params(s, iota, b.pi), left.len(), right.len(), pass, us);
    }
    let q = s.ctx.q();
    let n = s.ctx.n as u32;
    for w in s.ctx.weyl_kappa(kappa) {
        let ((pairs, single), us) = timed(|| s.ctx.stabilizer_counts(&w.mat, kappa));
        let expect = q.pow(n * (n - 1) / 2 - w.length);
        let p = format!("{} kappa={} w={:?}", s.label(), kappa.symbol(), w.perm);
        rep.push("lemma", "stabilizer-counts", p, format!("{pairs},{single}"), expect, pairs == expect && single == expect, us);
    }
    mu_is_whittaker(s, sd, rep);
}

/// 50 random pairs `(n, W = π(x)B)` per generic π.
fn mu_is_whittaker(s: &Setting, sd: &Side, rep: &mut VerificationReport) {
    let f = s.ctx.tower.ext();
    let gg = &sd.set.gg;
    let kappa = sd.iota.opposite();
    let xs: Vec<Mat> = s.ctx.x_kappa(kappa).iter().map(|&i| *s.group().elem(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x6d75);
    let trials: Vec<(Mat, Mat)> = (0..50)
        .map(|_| {
            let n = *s.group().elem(s.ctx.n_e[rng.gen_range(0..s.ctx.n_e.len())]);
            let x = *s.group().elem(rng.gen_range(0..s.group().len() as u32));
            (n, x)
        })
        .collect();
    for b in sd.set.generic() {
        let (ok, us) = timed(|| {
            trials.iter().filter(|(n, x)| {
                let mu_w: Cyclo = xs.iter().map(|g| gg.eval(b, &g.mul(x, f))).sum();
                let mu_nw: Cyclo = xs.iter().map(|g| gg.eval(b, &g.mul(n, f).mul(x, f))).sum();
                mu_nw == mu_w.mul_root(gg.p(), gg.psi.phase(n, f) as i64)
            })
            .count()
        });
        rep.check("lemma", "mu-is-whittaker-functional", params(s, sd.iota, b.pi), ok, trials.len(), us);
    }
}

/// `Σ_π dim π · λ_ι(B_π) = |G|/(|G_ι||N_ι|)` over all of `Irr(G)`.
pub fn verify_reg_sum(s: &Setting, sd: &Side, rep: &mut VerificationReport) -> Result<()> {
    let iota = sd.iota;
    let gg = &sd.set.gg;
    let (total, us) = timed(|| -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (pi, ch) in s.table.chars.iter().enumerate() {
            let raw = gg.bessel_values(ch);
            let lam = rational(&sd.sums.lambda(&raw), "λ")?;
            if sd.set.get(pi).is_none() {
                let vanish = raw.is_zero();
                rep.push("reg", "character-sum-vanishes-off-generic", params(s, iota, pi), vanish, true, vanish, 0);
            }
            total += lam * BigRational::from_integer(s.table.degrees[pi].into());
        }
        Ok(total)
    });
    let total = total?;
    let rhs = ratio(s.group().order(), s.sub_group(iota).order() * s.ctx.n_iota(iota).len() as u64);
    rep.check("reg", "degree-weighted-period-sum", format!("{} H={}", s.label(), iota.symbol()), total, rhs, us);
    Ok(())
}

/// `λ = (|G/N(E)| / |U/N(F)|) · (dim ρ/dim π) · ℓ` for relatively cuspidal π, with `ℓ(B_π) = |N(F)|/|GL_n(F)|`.
pub fn verify_scalar_theorem(s: &Setting, sd: &Side, rel_cusp: &[usize], rep: &mut VerificationReport) {
    if sd.iota != Involution::Sigma {
        return;
    }
    let n_e = s.ctx.n_e.len() as u64;
    let n_f = s.ctx.n_sigma.len() as u64;
    let scale = ratio(s.group().order() / n_e, 1) / ratio(s.ctx.g_tau.order(), n_f);
    rep.check(
        "scalar",
        "orbit-ratio",
        s.label(),
        scale.clone(),
        ratio(s.group().order(), n_f * s.ctx.g_tau.order()),
        0,
    );
    let ell_expect = ratio(n_f, s.ctx.g_sigma.order());
    for &pi in rel_cusp {
        let p = params(s, sd.iota, pi);
        let Some(v) = sd.values.iter().find(|v| v.pi == pi) else {
            rep.push("scalar", "relatively-cuspidal-is-generic", p, false, true, false, 0);
            continue;
        };
        let ell = v.ell.clone().unwrap_or_default();
        rep.check("scalar", "mirabolic-period-of-bessel", p.clone(), ell.clone(), ell_expect.clone(), 0);
        let rho = sd.pairs.iter().find(|m| m.pi == pi).and_then(|m| m.rho);
        let rhs = rho.map(|r| &scale * ratio(s.t_tau.degrees[r], s.table.degrees[pi]) * &ell);
        let pass = rhs.as_ref() == Some(&v.lambda);
        rep.push(
            "scalar",
            "period-is-scaled-mirabolic-period",
            p,
            &v.lambda,
            rhs.map_or("none".into(), |r| r.to_string()),
            pass,
            0,
        );
    }
}

/// `λ(B_π)` unchanged across every admissible `ψ`.
pub fn verify_psi_independence(s: &Setting, sd: &Side, rep: &mut VerificationReport) -> Result<()> {
    let base: HashMap<usize, BigRational> = sd.values.iter().map(|v| (v.pi, v.lambda.clone())).collect();
    for slots in s.slot_sweep(sd.iota) {
        let (res, us) = timed(|| -> Result<Vec<(usize, BigRational)>> {
            let set = BesselSet::new(s.gelfand_graev(sd.iota, Some(slots.clone()))?, &s.table)?;
            let sums = PeriodSums::new(s, &set.gg, sd.iota)?;
            set.generic().map(|b| Ok((b.pi, rational(&sums.lambda(&b.values), "λ")?))).collect()
        });
        let res = res?;
        let per = res.len().max(1) as u64;
        if res.len() != base.len() {
            rep.check("psi", "generic-set-independent-of-psi", format!("slots={slots:?}"), res.len(), base.len(), us);
        }
        for (pi, lam) in res {
            let want = base.get(&pi).cloned().unwrap_or_default();
            rep.check("psi", "period-independent-of-psi", format!("{} slots={slots:?}", params(s, sd.iota, pi)), lam, want, us / per);
        }
    }
    Ok(())
}

/// The spectral projection of `W₁` (supported on `N G_ι`, `W₁(nh) = ψ(n)`).
///
/// First form `(dim π |N_ι|/|G|) Σ_h π(h)B_π`; second form with the average
/// `(1/|G_ι|) Σ_h π(h)B_π` in place of `W_π`.
pub fn verify_spectral(s: &Setting, sd: &Side, points: usize, rep: &mut VerificationReport) -> Result<()> {
    let iota = sd.iota;
    let f = s.ctx.tower.ext();
    let gg = &sd.set.gg;
    let h = s.sub_group(iota);
    let mut w1: HashMap<u32, u32> = HashMap::new();
    for &u in &s.ctx.n_e {
        let nu = s.group().elem(u);
        let ph = gg.psi.phase(nu, f);
        for y in h.elements() {
            let idx = s.group().index_of(&nu.mul(y, f)).unwrap();
            if *w1.entry(idx).or_insert(ph) != ph {
                return Err(Error::Mismatch("W₁ is not well defined on N G_ι".into()));
            }
        }
    }
    let w1f = |g: &Mat| -> Cyclo {
        match w1.get(&s.group().index_of(g).unwrap()) {
            Some(&ph) => Cyclo::root_of_unity(gg.p(), ph as i64),
            None => Cyclo::zero(),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x7370);
    let mut xs = vec![Mat::identity(s.ctx.n)];
    xs.extend((1..points).map(|_| *s.group().elem(rng.gen_range(0..s.group().len() as u32))));
    let n_iota = s.ctx.n_iota(iota).len() as i64;
    let order = s.group().order() as i64;
    for b in sd.set.generic() {
        let d = s.table.degrees[b.pi] as i64;
        let p = params(s, iota, b.pi);
        let ((first, second, nonzero), us) = timed(|| {
            let mut first = true;
            let mut second = true;
            let mut nonzero = false;
            for x in &xs {
                let proj = gg.project(b, d as u64, &w1f, x);
                let sum_h: Cyclo = h.elements().iter().map(|y| gg.eval(b, &x.mul(y, f))).sum();
                first &= proj == sum_h.scale_frac(d * n_iota, order);
                let avg = sum_h.scale_frac(1, h.order() as i64);
                second &= proj == avg.scale_frac(d * n_iota * h.order() as i64, order);
                nonzero |= !proj.is_zero();
            }
            (first, second, nonzero)
        });
        rep.push("spectral", "projection-first-form", p.clone(), first, true, first, us);
        rep.push("spectral", "projection-second-form-averaged", p.clone(), second, true, second, 0);
        let dist = sd.distinguished[b.pi];
        rep.push("spectral", "projection-nonzero-iff-distinguished", p, nonzero, dist, nonzero == dist, 0);
    }
    Ok(())
}

/// `(1/|G|) Σ_g |B_π(g)|² = 1/dim π` on a single `GL_n(F_q)`, and
/// `B_π(w ᵗg⁻¹ w⁻¹) = conj B_π(g)`.
pub fn verify_split_identity(p: u32, d: u32, n: usize, budget: u64, seed: u64) -> Result<VerificationReport> {
    let field = std::sync::Arc::new(Field::new(p, d)?);
    let g = FiniteGroup::general_linear(field.clone(), n, budget)?;
    let t = character_table(&g, seed)?;
    split_identity_on(&g, &t, seed)
}

pub fn split_identity_on(g: &FiniteGroup, t: &CharacterTable, seed: u64) -> Result<VerificationReport> {
    let f = g.field();
    let label = format!("GL_{}(F_{})", g.n(), f.size());
    let mut rep = VerificationReport::new(label.clone());
    let psi = AdditiveCharacter::on_field(f, 1);
    let gg = GelfandGraev::new(g, NCharacter::standard(psi, g.n()))?;
    let sizes = gg.cell_sizes();
    let w = Mat::antidiag(g.n());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for b in gg.all_bessel(t)? {
        let deg = t.degrees[b.pi];
        let (ms, us) = timed(|| gg.mean_square(&b, &sizes));
        let params = format!("{label} pi={} dim={deg}", b.pi);
        rep.check("split", "mean-square-is-inverse-degree", params.clone(), ms, Cyclo::from_frac(1, deg as i64), us);
        let (ok, us) = timed(|| {
            (0..20).all(|_| {
                let x = g.elem(rng.gen_range(0..g.len() as u32));
                let y = w.mul(&x.inv(f).unwrap().transpose(), f).mul(&w.inv(f).unwrap(), f);
                gg.eval(&b, &y) == gg.eval(&b, x).conj()
            })
        });
        rep.push("split", "transpose-inverse-conjugates", params.clone(), ok, true, ok, us);
        let dim = gg.dim_from_bessel(&b, &sizes);
        let pass = dim.as_ref().ok() == Some(&deg);
        rep.push("split", "degree-from-bessel", params, dim.map_or("err".into(), |x| x.to_string()), deg, pass, 0);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::DEFAULT_BUDGET;

    #[test]
    fn continued_fraction_reconstruction() {
        assert_eq!(reconstruct(5.0 / 12.0 + 1e-13, 48), BigRational::new(5.into(), 12.into()));
        assert_eq!(reconstruct(-1.0 / 3.0, 10), BigRational::new((-1).into(), 3.into()));
        assert_eq!(reconstruct(15.0, 1), BigRational::from_integer(15.into()));
    }

    #[test]
    fn f4_sides() {
        let s = Setting::build(2, 2, 1, DEFAULT_BUDGET, 1).unwrap();
        let mut rep = VerificationReport::new(s.label());
        for iota in [Involution::Sigma, Involution::Tau] {
            let sd = side(&s, iota).unwrap();
            verify_lemmas(&s, &sd, &mut rep);
            verify_reg_sum(&s, &sd, &mut rep).unwrap();
            verify_psi_independence(&s, &sd, &mut rep).unwrap();
            verify_spectral(&s, &sd, 4, &mut rep).unwrap();
        }
        let fails: Vec<_> = rep.failures().collect();
        assert!(fails.is_empty(), "{fails:#?}");
        let reg: Vec<_> = rep.suite("reg").filter(|r| r.anchor == "degree-weighted-period-sum").collect();
        assert_eq!(reg[0].rhs, "15");
    }

    #[test]
    fn split_gl2_f2_by_hand() {
        let r = verify_split_identity(2, 1, 2, DEFAULT_BUDGET, 1).unwrap();
        assert!(r.all_pass());
        let ms: Vec<&str> = r.suite("split").filter(|x| x.anchor.starts_with("mean")).map(|x| x.lhs.as_str()).collect();
        assert_eq!(ms, ["1", "1/2"]);
    }
}
