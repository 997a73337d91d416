//! Verification suites over one context, as run by the command-line front end.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basechange::{gow_distinction_equivalences, MatchStatus};
use crate::bz::explicit::Explicit;
use crate::bz::{kirillov_report, BzTower};
use crate::cache::Cache;
use crate::chartable::{fusion, restrict};
use crate::error::{Error, Result};
use crate::field::build_tower;
use crate::gelfand_graev::{bessel_via_hecke, BesselTable, GelfandGraev};
use crate::matgroup::tower::Involution;
use crate::matgroup::{gl_order, FiniteGroup};
use crate::periods::{
    side, split_identity_on, verify_lemmas, verify_main_theorem, verify_psi_independence, verify_reg_sum,
    verify_scalar_theorem, verify_spectral, verify_symmetric_form, Mode, Side,
};
use crate::report::{timed, VerificationReport};
use crate::setting::Setting;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Main,
    Lemma,
    Reg,
    Scalar,
    Psi,
    Spectral,
    Split,
    Gow,
    Basechange,
    Engine,
    Bz,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Main,
        Suite::Lemma,
        Suite::Reg,
        Suite::Scalar,
        Suite::Psi,
        Suite::Spectral,
        Suite::Split,
        Suite::Gow,
        Suite::Basechange,
        Suite::Engine,
        Suite::Bz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Main => "main",
            Suite::Lemma => "lemma",
            Suite::Reg => "reg",
            Suite::Scalar => "scalar",
            Suite::Psi => "psi",
            Suite::Spectral => "spectral",
            Suite::Split => "split",
            Suite::Gow => "gow",
            Suite::Basechange => "basechange",
            Suite::Engine => "engine",
            Suite::Bz => "bz",
        }
    }

    /// Comma-separated names, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Suite::ALL);
                continue;
            }
            let suite = Suite::ALL
                .into_iter()
                .find(|x| x.name() == part)
                .ok_or_else(|| Error::Invalid(format!("unknown suite {part:?}")))?;
            out.push(suite);
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::Invalid("no suite selected".into()));
        }
        Ok(out)
    }

    fn needs_setting(self) -> bool {
        !matches!(self, Suite::Split | Suite::Bz)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub p: u32,
    pub k: u32,
    pub mode: Mode,
    pub suites: Vec<Suite>,
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: u64,
    pub exploratory: bool,
    pub budget: u64,
}

impl RunConfig {
    pub fn new(n: usize, p: u32, k: u32) -> RunConfig {
        RunConfig {
            n,
            p,
            k,
            mode: Mode::Exact,
            suites: Suite::ALL.to_vec(),
            cache_dir: None,
            threads: None,
            seed: 1,
            exploratory: false,
            budget: crate::matgroup::DEFAULT_BUDGET,
        }
    }

    pub fn cache(&self) -> Cache {
        Cache::new(self.cache_dir.clone())
    }

    fn wants(&self, s: Suite) -> bool {
        self.suites.contains(&s)
    }

    /// The unitary side needs odd `p` unless running exploratory.
    pub fn sides(&self) -> Vec<Involution> {
        if self.p % 2 == 1 || self.exploratory {
            vec![Involution::Sigma, Involution::Tau]
        } else {
            vec![Involution::Sigma]
        }
    }

    fn flagged(&self, iota: Involution) -> bool {
        iota == Involution::Tau && self.p % 2 == 0
    }
}

/// Runs every selected suite and collects the rows.
pub fn run(cfg: &RunConfig) -> Result<VerificationReport> {
    let cache = cfg.cache();
    let mut rep = VerificationReport::new(format!("n={} p={} k={} seed={}", cfg.n, cfg.p, cfg.k, cfg.seed));
    if cfg.suites.iter().any(|s| s.needs_setting()) {
        let s = Setting::build_cached(cfg.n, cfg.p, cfg.k, cfg.budget, cfg.seed, &cache)?;
        rep.extend(context_suites(cfg, &s, &cache)?);
    }
    if cfg.wants(Suite::Split) {
        rep.extend(split_suite(cfg, &cache)?);
    }
    if cfg.wants(Suite::Bz) {
        rep.extend(bz_suite(cfg, &cache)?);
    }
    Ok(rep)
}

fn context_suites(cfg: &RunConfig, s: &Setting, cache: &Cache) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(s.label());
    let needs_sides = cfg.suites.iter().any(|x| {
        matches!(x, Suite::Main | Suite::Lemma | Suite::Reg | Suite::Scalar | Suite::Psi | Suite::Spectral | Suite::Basechange | Suite::Engine)
    });
    let mut sides: Vec<Side> = Vec::new();
    if needs_sides {
        for iota in cfg.sides() {
            sides.push(side(s, iota)?);
        }
    }
    for sd in &sides {
        let mut part = VerificationReport::new(s.label());
        if cfg.wants(Suite::Main) {
            verify_main_theorem(s, sd, cfg.mode, &mut part);
        }
        if cfg.wants(Suite::Lemma) {
            verify_lemmas(s, sd, &mut part);
        }
        if cfg.wants(Suite::Reg) {
            verify_reg_sum(s, sd, &mut part)?;
        }
        if cfg.wants(Suite::Psi) {
            verify_psi_independence(s, sd, &mut part)?;
        }
        if cfg.wants(Suite::Spectral) {
            verify_spectral(s, sd, 6, &mut part)?;
        }
        if cfg.wants(Suite::Basechange) {
            basechange_rows(s, sd, cfg.seed, &mut part);
        }
        if cfg.wants(Suite::Engine) {
            engine_rows(s, sd, cfg.seed, cache, &mut part)?;
        }
        if cfg.flagged(sd.iota) {
            part.rows.iter_mut().for_each(|r| r.params.push_str(" exploratory"));
        }
        rep.extend(part);
    }
    if cfg.wants(Suite::Main) && sides.len() == 2 {
        verify_symmetric_form(s, &sides[0], &sides[1], &mut rep);
    }
    if cfg.wants(Suite::Scalar) && cfg.n == 2 {
        let sigma = sides.iter().find(|x| x.iota == Involution::Sigma).unwrap();
        let rel = relative_cuspidal_on(cfg, s, cache, &mut rep)?;
        verify_scalar_theorem(s, sigma, &rel, &mut rep);
    }
    if cfg.wants(Suite::Gow) {
        rep.extend(gow_distinction_equivalences(s)?);
    }
    Ok(rep)
}

/// Relatively cuspidal set of `GL_2(E)` from the mirabolic tower, in the indexing of `s.table`.
fn relative_cuspidal_on(cfg: &RunConfig, s: &Setting, cache: &Cache, rep: &mut VerificationReport) -> Result<Vec<usize>> {
    let (res, us) = timed(|| -> Result<_> {
        let t = BzTower::new_cached(s.ctx.tower.clone(), 2, true, cfg.budget, cfg.seed, cache)?;
        let (c, p) = t.relative_cuspidal_classify()?;
        let top = t.gl(2);
        let fuse = fusion(s.group(), &top.group)?;
        let to_s = |pi: usize| {
            s.table.find(&restrict(&top.table.chars[pi], &fuse)).ok_or_else(|| Error::Mismatch("tables disagree".into()))
        };
        let mut map = Vec::new();
        for &pi in &c {
            map.push(to_s(pi)?);
        }
        Ok((c, p, map))
    });
    let (computed, predicted, map) = res?;
    rep.push(
        "scalar",
        "relatively-cuspidal-set-matches-prediction",
        format!("{} relatively-cuspidal={map:?}", s.label()),
        format!("{computed:?}"),
        format!("{predicted:?}"),
        computed == predicted,
        us,
    );
    Ok(map)
}

fn basechange_rows(s: &Setting, sd: &Side, seed: u64, rep: &mut VerificationReport) {
    let kappa = sd.iota.opposite();
    let mut matched: Vec<usize> = Vec::new();
    for pair in &sd.pairs {
        let p = format!(
            "{} kappa={} pi={} rho={:?} candidates={:?} samples={}",
            s.label(),
            kappa.symbol(),
            pair.pi,
            pair.rho,
            pair.candidates,
            pair.samples
        );
        let unique = pair.status == MatchStatus::Unique;
        rep.push("basechange", "twisted-trace-match-is-unique", p, format!("{:?}", pair.status), "Unique", unique, 0);
        matched.extend(pair.rho);
    }
    let distinct = {
        let mut m = matched.clone();
        m.sort_unstable();
        m.dedup();
        m.len() == matched.len()
    };
    rep.push(
        "basechange",
        "matched-sources-are-distinct",
        format!("{} kappa={}", s.label(), kappa.symbol()),
        matched.len(),
        "distinct",
        distinct,
        0,
    );
    // Tr[π((h^κ)⁻¹ g h) T_κ] = Tr[π(g) T_κ] at random points
    let gg = &sd.set.gg;
    let g = s.group();
    let f = s.ctx.tower.ext();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6263);
    let kfn = |m: &crate::matgroup::Mat| s.ctx.involution(m, kappa);
    let points: Vec<_> = (0..3)
        .map(|_| {
            let x = *g.elem(rng.gen_range(0..g.len() as u32));
            let h = *g.elem(rng.gen_range(0..g.len() as u32));
            (x, kfn(&h).inv(f).unwrap().mul(&x, f).mul(&h, f))
        })
        .collect();
    let hists: Vec<_> = points.iter().map(|(a, b)| (gg.twisted_trace_histogram(a, &kfn), gg.twisted_trace_histogram(b, &kfn))).collect();
    for pair in &sd.pairs {
        let b = sd.set.get(pair.pi).unwrap();
        let d = s.table.degrees[pair.pi];
        let ok = hists.iter().all(|(a, c)| gg.twisted_trace(b, d, a) == gg.twisted_trace(b, d, c));
        rep.push("basechange", "twisted-trace-is-twisted-class-function", format!("{} pi={}", s.label(), pair.pi), ok, true, ok, 0);
    }
}

fn hecke_rows(label: &str, gg: &GelfandGraev, t: &crate::chartable::CharacterTable, tables: &[BesselTable], seed: u64, rep: &mut VerificationReport) -> Result<()> {
    let (h, us) = timed(|| bessel_via_hecke(gg, t, tables, seed));
    let h = h?;
    let ok = h.sets_equal();
    let matched = h.matching.iter().flatten().count();
    rep.push("engine", "hecke-eigenvectors-equal-character-route", format!("{label} dim={}", h.dimension), matched, tables.len(), ok, us);
    let sizes = gg.cell_sizes();
    for b in tables {
        let d = gg.dim_from_bessel(b, &sizes);
        let pass = d.as_ref().ok() == Some(&t.degrees[b.pi]);
        rep.push("engine", "degree-from-bessel", format!("{label} pi={}", b.pi), d.map_or("err".into(), |x| x.to_string()), t.degrees[b.pi], pass, 0);
    }
    Ok(())
}

fn engine_rows(s: &Setting, sd: &Side, seed: u64, cache: &Cache, rep: &mut VerificationReport) -> Result<()> {
    let label = format!("{} psi={}", s.label(), sd.iota.opposite().symbol());
    let tables: Vec<BesselTable> = sd.set.generic().cloned().collect();
    hecke_rows(&label, &sd.set.gg, &s.table, &tables, seed, rep)?;
    let psi_label = format!("psi-{}", sd.iota.opposite().symbol());
    match cache.load_bessel(s.group(), &psi_label)? {
        Some(stored) => {
            let same = stored.len() == tables.len()
                && stored.iter().zip(&tables).all(|(a, b)| a.pi == b.pi && a.values.exact_eq(&b.values));
            rep.push("engine", "cached-bessel-tables-agree", label, same, true, same, 0);
        }
        None => cache.store_bessel(s.group(), &psi_label, &tables)?,
    }
    Ok(())
}

/// The split contexts `GL_2(F_2)`, `GL_2(F_3)`, `GL_2(F_4)`, `GL_3(F_2)`.
pub const SPLIT_CONTEXTS: [(u32, u32, usize); 4] = [(2, 1, 2), (3, 1, 2), (2, 2, 2), (2, 1, 3)];

fn split_suite(cfg: &RunConfig, cache: &Cache) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("split");
    for (p, d, n) in SPLIT_CONTEXTS {
        let field = Arc::new(crate::field::Field::new(p, d)?);
        let g = FiniteGroup::general_linear(field, n, cfg.budget)?;
        let t = cache.character_table(&g, cfg.seed)?.0;
        rep.extend(split_identity_on(&g, &t, cfg.seed)?);
        if cfg.wants(Suite::Engine) {
            let f = g.field();
            let psi = crate::field::AdditiveCharacter::on_field(f, 1);
            let gg = GelfandGraev::new(&g, crate::matgroup::bruhat::NCharacter::standard(psi, n))?;
            let tables = gg.all_bessel(&t)?;
            hecke_rows(&format!("GL_{n}(F_{})", f.size()), &gg, &t, &tables, cfg.seed, &mut rep)?;
        }
    }
    Ok(rep)
}

fn bz_suite(cfg: &RunConfig, cache: &Cache) -> Result<VerificationReport> {
    let tower = Arc::new(build_tower(cfg.p, cfg.k)?);
    let q = tower.q_ext() as u64;
    let mut rep = VerificationReport::new(format!("bz E=F_{q}"));
    let top3 = gl_order(3, q) <= cfg.budget;
    let t3 = BzTower::new_cached(tower.clone(), 3, top3, cfg.budget, cfg.seed, cache)?;
    for m in 1..=3 {
        rep.extend(t3.relations_report(m));
        rep.extend(t3.kable_report(m));
    }
    if top3 {
        rep.extend(t3.filtration_report()?);
        rep.extend(kirillov_report(&t3)?);
        rep.extend(t3.leibniz_report()?);
    }
    drop(t3);
    let t2 = BzTower::new_cached(tower, 2, true, cfg.budget, cfg.seed, cache)?;
    rep.extend(t2.filtration_report()?);
    rep.extend(kirillov_report(&t2)?);
    rep.extend(t2.leibniz_report()?);
    rep.extend(Explicit::new(&t2).report());
    if t2.gl1_distinguished().len() >= 2 {
        rep.extend(t2.counterexample_report()?);
    }
    let (res, us) = timed(|| t2.relative_cuspidal_classify());
    let (computed, predicted) = res?;
    rep.push(
        "bz",
        "relatively-cuspidal-set-matches-prediction",
        format!("GL_2(F_{q})"),
        format!("{computed:?}"),
        format!("{predicted:?}"),
        computed == predicted,
        us,
    );
    Ok(rep)
}
