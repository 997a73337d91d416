//! One line per acceptance criterion; the test fails if any criterion fails.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use whittaker_bench::basechange::MatchStatus;
use whittaker_bench::matgroup::tower::Involution;
use whittaker_bench::matgroup::DEFAULT_BUDGET;
use whittaker_bench::periods::{side, Mode};
use whittaker_bench::report::{ReportRow, VerificationReport};
use whittaker_bench::setting::Setting;
use whittaker_bench::suites::{run, RunConfig, Suite};

const SEED: u64 = 1;
/// Relative tolerance for float-mode rows; exact rows compare with tolerance 0.
const FLOAT_TOL: f64 = 1e-9;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn run_suites(p: u32, suites: &[Suite], mode: Mode, exploratory: bool) -> VerificationReport {
    let mut cfg = RunConfig::new(2, p, 1);
    cfg.suites = suites.to_vec();
    cfg.mode = mode;
    cfg.exploratory = exploratory;
    cfg.seed = SEED;
    run(&cfg).expect("suite run")
}

fn rows<'a>(rep: &'a VerificationReport, suite: &'a str, anchor: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
    rep.rows.iter().filter(move |r| r.suite == suite && r.anchor == anchor)
}

fn all_pass<'a>(mut it: impl Iterator<Item = &'a ReportRow>) -> (bool, usize) {
    let mut n = 0;
    let ok = it.all(|r| {
        n += 1;
        r.pass
    });
    (ok && n > 0, n)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(id: u32, name: &str, o: &Outcome) {
    println!("criterion {id:>2} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

/// `λ·dimπ / (|G|/(|G_ι||G_κ|))` equals `dim ρ` of the unique twisted-trace match.
fn main_theorem(s: &Setting, iota: Involution, expect_count: usize) -> Outcome {
    let sd = side(s, iota).expect("side");
    let kappa = iota.opposite();
    let konst = s.main_constant();
    let mut count = 0;
    let mut ok = konst == q(5, 4);
    for v in &sd.values {
        if !sd.distinguished[v.pi] {
            ok &= v.lambda.is_zero();
            continue;
        }
        count += 1;
        let pair = sd.pairs.iter().find(|m| m.pi == v.pi).unwrap();
        let lhs = &v.lambda * BigRational::from_integer(s.table.degrees[v.pi].into()) / &konst;
        let rho_dim = pair.rho.map(|r| s.sub_table(kappa).degrees[r]);
        ok &= pair.status == MatchStatus::Unique
            && lhs.is_integer()
            && lhs.is_positive()
            && rho_dim.map(|d| BigRational::from_integer(d.into())) == Some(lhs);
    }
    ok &= count == expect_count;
    Outcome { pass: ok, detail: format!("{count} distinguished generic pi (expected {expect_count}), constant {konst}") }
}

#[test]
fn acceptance() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    let t0 = Instant::now();
    let s9 = Setting::build(2, 3, 1, DEFAULT_BUDGET, SEED).unwrap();
    let rep9 = run_suites(3, &Suite::ALL, Mode::Exact, false);
    let rep4 = run_suites(2, &[Suite::Main, Suite::Lemma, Suite::Reg, Suite::Psi, Suite::Engine, Suite::Bz], Mode::Exact, true);
    let float9 = run_suites(3, &[Suite::Main], Mode::Float { tol: FLOAT_TOL }, false);
    let setup = t0.elapsed();

    // 1 and 2: main theorem on both sides over F_9/F_3
    for (id, iota, expect, name) in
        [(1, Involution::Sigma, 12, "main theorem, GL_2(F_3)-periods"), (2, Involution::Tau, 6, "main theorem, U(2)-periods")]
    {
        let mut o = main_theorem(&s9, iota, expect);
        let tag = format!("H={}", iota.symbol());
        let (fl, nf) = all_pass(float9.rows.iter().filter(|r| r.suite == "main" && r.params.contains(&tag)));
        let (ex, ne) = all_pass(rep9.rows.iter().filter(|r| r.suite == "main" && r.params.contains(&tag)));
        o.pass &= fl && ex;
        o.detail += &format!("; suite rows exact {ne} ok={ex}, float {nf} ok={fl}");
        results.push((id, name, o));
    }
    {
        let sd = side(&s9, Involution::Sigma).unwrap();
        let mut lam: Vec<BigRational> = sd.values.iter().filter(|v| sd.distinguished[v.pi]).map(|v| v.lambda.clone()).collect();
        lam.sort();
        let mut want = [vec![q(1, 4); 6], vec![q(5, 12); 4], vec![q(1, 2); 2]].concat();
        want.sort();
        let o = &mut results[0].2;
        o.pass &= lam == want;
        o.detail += &format!("; lambda multiset pinned={}", lam == want);
    }

    // 3: scalar theorem on the relatively cuspidal set
    {
        let set_row: Vec<_> = rows(&rep9, "scalar", "relatively-cuspidal-set-matches-prediction").collect();
        let ell_rows: Vec<_> = rows(&rep9, "scalar", "mirabolic-period-of-bessel").collect();
        let sd = side(&s9, Involution::Sigma).unwrap();
        let mut ok = set_row.len() == 1 && set_row[0].pass && set_row[0].lhs != "[]";
        let mut checked = 0;
        for r in &ell_rows {
            let pi: usize = r.params.split("pi=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
            let v = sd.values.iter().find(|v| v.pi == pi).unwrap();
            let pair = sd.pairs.iter().find(|m| m.pi == pi).unwrap();
            let ell = v.ell.clone();
            let dim_rho = pair.rho.map(|r| s9.t_tau.degrees[r]).unwrap_or(0);
            let dim_pi = s9.table.degrees[pi];
            let rhs = q(20, 1) * q(dim_rho as i64, dim_pi as i64) * q(1, 16);
            ok &= ell == Some(q(1, 16)) && r.lhs == "1/16" && v.lambda == rhs;
            checked += 1;
        }
        ok &= checked >= 1 && checked == ell_rows.len();
        let detail = format!("set {} (predicted {}), {checked} pi with l = 1/16 and lambda = 20 dimrho/dimpi l", set_row.first().map_or("-", |r| &r.lhs), set_row.first().map_or("-", |r| &r.rhs));
        results.push((3, "scalar theorem", Outcome { pass: ok, detail }));
    }

    // 4: lemma suite over F_4/F_2 and F_9/F_3, both involutions
    {
        let mut ok = true;
        let mut parts = Vec::new();
        for (label, rep) in [("F_4", &rep4), ("F_9", &rep9)] {
            for anchor in ["lambda-equals-mu", "support-sets-agree", "stabilizer-counts"] {
                let (pass, n) = all_pass(rows(rep, "lemma", anchor));
                ok &= pass;
                parts.push(format!("{label} {anchor} {n}"));
            }
            for iota in ["sigma", "tau"] {
                ok &= rows(rep, "lemma", "lambda-equals-mu").any(|r| r.params.contains(&format!("H={iota}")));
            }
        }
        results.push((4, "lemmas", Outcome { pass: ok, detail: parts.join(", ") }));
    }

    // 5: degree-weighted period sums
    {
        let get = |rep: &VerificationReport| {
            rows(rep, "reg", "degree-weighted-period-sum").find(|r| r.params.ends_with("H=sigma")).map(|r| (r.lhs.clone(), r.pass))
        };
        let (a, b) = (get(&rep4), get(&rep9));
        let ok = a == Some(("15".into(), true)) && b == Some(("40".into(), true));
        results.push((5, "degree-weighted period sum", Outcome { pass: ok, detail: format!("F_4/F_2 {a:?}, F_9/F_3 {b:?}") }));
    }

    // 6: split identity, timed on its own
    {
        let t = Instant::now();
        let rep = run_suites(3, &[Suite::Split], Mode::Exact, false);
        let secs = t.elapsed().as_secs_f64();
        let (ok, n) = all_pass(rows(&rep, "split", "mean-square-is-inverse-degree"));
        let mut f2: Vec<&str> = rows(&rep, "split", "mean-square-is-inverse-degree").filter(|r| r.params.starts_with("GL_2(F_2)")).map(|r| r.lhs.as_str()).collect();
        f2.sort();
        let contexts = ["GL_2(F_2)", "GL_2(F_3)", "GL_2(F_4)", "GL_3(F_2)"].iter().all(|c| rep.rows.iter().any(|r| r.params.starts_with(c)));
        let pass = ok && f2 == ["1", "1/2"] && contexts && secs < 60.0;
        results.push((6, "split mean-square identity", Outcome { pass, detail: format!("{n} rows, GL_2(F_2) values {f2:?}, {secs:.1}s (limit 60s)") }));
    }

    // 7: mirabolic versus full invariants of the principal series
    {
        let p = rows(&rep9, "counterexample", "mirabolic-invariants").next().map(|r| r.lhs.clone());
        let g = rows(&rep9, "counterexample", "subgroup-invariants").next().map(|r| r.lhs.clone());
        let (all, _) = all_pass(rep9.rows.iter().filter(|r| r.suite == "counterexample"));
        let pass = all && p.as_deref() == Some("3") && g.as_deref() == Some("1");
        results.push((7, "P(F)- versus GL_2(F)-invariants", Outcome { pass, detail: format!("dim Hom_P = {p:?}, dim Hom_G = {g:?}") }));
    }

    // 8: mirabolic tower battery
    {
        let required = [
            "functors-commute-with-contragredient",
            "adjoint-pairs",
            "mixed-compositions-vanish",
            "minus-after-plus-is-identity",
            "mirabolic-splitting",
            "filtration-reassembles-restriction",
            "kable-psi-plus",
            "kable-phi-plus",
            "kable-gelfand-graev-multiplicity-one",
        ];
        let mut ok = true;
        let mut n = 0;
        for rep in [&rep4, &rep9] {
            let (pass, k) = all_pass(rep.rows.iter().filter(|r| r.suite == "bz"));
            ok &= pass && required.iter().all(|a| rows(rep, "bz", a).next().is_some());
            n += k;
        }
        let gl3 = rows(&rep4, "bz", "filtration-reassembles-restriction").any(|r| r.params.contains("GL_3"));
        ok &= gl3;
        let (ce, _) = all_pass(rep9.rows.iter().filter(|r| r.suite == "counterexample"));
        ok &= ce;
        results.push((8, "derivative battery", Outcome { pass: ok, detail: format!("{n} rows over F_4 and F_9, GL_3(F_4) filtration present={gl3}") }));
    }

    // 9: Hecke route against character route, degrees from Bessel values
    {
        let mut ok = true;
        let mut parts = Vec::new();
        for (label, rep) in [("F_4", &rep4), ("F_9", &rep9)] {
            let (h, nh) = all_pass(rows(rep, "engine", "hecke-eigenvectors-equal-character-route"));
            let (d, nd) = all_pass(rows(rep, "engine", "degree-from-bessel"));
            ok &= h && d;
            parts.push(format!("{label}: hecke {nh}, degree {nd}"));
        }
        let (h, nh) = all_pass(rows(&rep9, "split", "degree-from-bessel"));
        ok &= h && rows(&rep9, "engine", "hecke-eigenvectors-equal-character-route").any(|r| r.params.starts_with("GL_3(F_2)"));
        parts.push(format!("split: degree {nh}"));
        results.push((9, "engine cross-validation", Outcome { pass: ok, detail: parts.join(", ") }));
    }

    // 10: independence of ψ
    {
        let (a, na) = all_pass(rows(&rep4, "psi", "period-independent-of-psi"));
        let (b, nb) = all_pass(rows(&rep9, "psi", "period-independent-of-psi"));
        results.push((10, "independence of psi", Outcome { pass: a && b, detail: format!("{na} rows over F_4, {nb} over F_9") }));
    }

    println!("setup {:.1}s", setup.as_secs_f64());
    for (id, name, o) in &results {
        line(*id, name, o);
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
