use std::path::PathBuf;

use whittaker_bench::cache::{Cache, CacheStatus};
use whittaker_bench::error::Error;
use whittaker_bench::matgroup::DEFAULT_BUDGET;
use whittaker_bench::report::VerificationReport;
use whittaker_bench::setting::Setting;
use whittaker_bench::suites::{run, RunConfig, Suite};

fn tmpdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("wb-repro-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn cfg(cache_dir: Option<PathBuf>) -> RunConfig {
    let mut c = RunConfig::new(2, 2, 1);
    c.suites = vec![Suite::Main, Suite::Lemma, Suite::Reg, Suite::Basechange, Suite::Engine];
    c.cache_dir = cache_dir;
    c
}

fn csv_bytes(rep: &VerificationReport) -> Vec<u8> {
    let mut out = Vec::new();
    rep.without_timings().write_csv(&mut out).unwrap();
    out
}

#[test]
fn reruns_are_identical_up_to_timings() {
    let a = run(&cfg(None)).unwrap();
    let b = run(&cfg(None)).unwrap();
    assert!(a.all_pass());
    assert_eq!(csv_bytes(&a), csv_bytes(&b));
}

#[test]
fn warm_cache_gives_the_same_report() {
    let dir = tmpdir("warm");
    let cold = run(&cfg(Some(dir.clone()))).unwrap();
    let warm = run(&cfg(Some(dir.clone()))).unwrap();
    let plain = run(&cfg(None)).unwrap();
    assert!(warm.all_pass());
    // the warm run adds comparisons against the stored Bessel tables
    assert!(warm.rows.iter().any(|r| r.anchor == "cached-bessel-tables-agree" && r.pass));
    let strip = |r: &VerificationReport| {
        let mut r = r.without_timings();
        r.rows.retain(|x| x.anchor != "cached-bessel-tables-agree");
        csv_bytes(&r)
    };
    assert_eq!(strip(&cold), strip(&plain));
    assert_eq!(strip(&warm), strip(&plain));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn corrupted_cache_is_reported() {
    let dir = tmpdir("corrupt");
    let cache = Cache::new(Some(dir.clone()));
    let s = Setting::build_cached(2, 2, 1, DEFAULT_BUDGET, 1, &cache).unwrap();
    assert_eq!(cache.character_table(s.group(), 1).unwrap().1, CacheStatus::Hit);
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        if p.file_name().unwrap().to_string_lossy().starts_with("table-GL_2_F_4") {
            let text = std::fs::read_to_string(&p).unwrap();
            let i = text.find("\"sha256\":\"").unwrap() + 10;
            let flipped = if &text[i..i + 1] == "0" { "1" } else { "0" };
            std::fs::write(&p, format!("{}{}{}", &text[..i], flipped, &text[i + 1..])).unwrap();
        }
    }
    assert!(matches!(Setting::build_cached(2, 2, 1, DEFAULT_BUDGET, 1, &cache), Err(Error::CacheCorrupt(_))));
    std::fs::remove_dir_all(dir).unwrap();
}
