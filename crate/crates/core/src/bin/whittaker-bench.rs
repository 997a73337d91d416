use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use whittaker_bench::basechange::MatchStatus;
use whittaker_bench::error::{Error, Result};
use whittaker_bench::field::{build_tower, AdditiveCharacter, Fe, Field};
use whittaker_bench::gelfand_graev::GelfandGraev;
use whittaker_bench::matgroup::bruhat::NCharacter;
use whittaker_bench::matgroup::tower::{build_context, Involution};
use whittaker_bench::matgroup::FiniteGroup;
use whittaker_bench::periods::{side, Mode};
use whittaker_bench::report::{ReportRow, VerificationReport};
use whittaker_bench::setting::Setting;
use whittaker_bench::suites::{run, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "whittaker-bench", version, about = "Bessel functions, periods and base change for GL_n over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field tower, group orders and class counts.
    GroupInfo(Common),
    /// Character table of GL_n(E), GL_n(F) or U(n).
    CharTable {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum, default_value = "g")]
        which: Which,
        /// Directory for the machine-readable table.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Bessel function values on the relevant cells.
    Bessel {
        #[command(flatten)]
        c: Common,
        /// `f`: the split group GL_n(F_{p^k}); `sigma`/`tau`: GL_n(E) with the ψ used for that period.
        #[arg(long, value_enum, default_value = "f")]
        over: Over,
    },
    /// Base-change matches from the twisted trace.
    Basechange(Common),
    /// Runs verification suites; exits 0 iff every row passes.
    Verify {
        #[command(flatten)]
        c: Common,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Summarizes a report CSV written by `verify`.
    Report {
        #[command(flatten)]
        c: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ArithMode,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also run the unitary side in characteristic 2.
    #[arg(long)]
    exploratory: bool,
    #[arg(long, default_value_t = whittaker_bench::matgroup::DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArithMode {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    G,
    Sigma,
    Tau,
}

#[derive(Clone, Copy, ValueEnum)]
enum Over {
    F,
    Sigma,
    Tau,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.n, self.p, self.k);
        cfg.mode = match self.mode {
            ArithMode::Exact => Mode::Exact,
            ArithMode::Float => Mode::Float { tol: self.tol },
        };
        cfg.suites = Suite::parse_list(&self.suite)?;
        cfg.cache_dir = self.cache_dir.clone();
        cfg.threads = self.threads;
        cfg.seed = self.seed;
        cfg.exploratory = self.exploratory;
        cfg.budget = self.budget;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.cmd {
        Cmd::GroupInfo(c) | Cmd::Basechange(c) => c,
        Cmd::CharTable { c, .. } | Cmd::Bessel { c, .. } | Cmd::Verify { c, .. } | Cmd::Report { c, .. } => c,
    };
    if let Some(t) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let res = match cli.cmd {
        Cmd::GroupInfo(c) => group_info(&c),
        Cmd::CharTable { c, which, out } => char_table(&c, which, &out),
        Cmd::Bessel { c, over } => bessel(&c, over),
        Cmd::Basechange(c) => basechange(&c),
        Cmd::Verify { c, out } => return verify(&c, &out),
        Cmd::Report { c, input } => report(&c, input.as_deref()),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn show_fe(f: &Field, x: Fe) -> String {
    if f.degree() == 1 {
        return f.digits(x)[0].to_string();
    }
    match f.log(x) {
        None => "0".into(),
        Some(0) => "1".into(),
        Some(1) => "z".into(),
        Some(i) => format!("z^{i}"),
    }
}

fn group_info(c: &Common) -> Result<()> {
    let tower = Arc::new(build_tower(c.p, c.k)?);
    let ctx = build_context(c.n, tower.clone(), c.budget)?;
    let d = tower.descriptor();
    println!("F = F_{}  modulus {:?}", tower.q, d.base_modulus);
    println!("E = F_{}  modulus {:?}", tower.q_ext(), d.ext_modulus);
    let rows: [(&str, &FiniteGroup); 3] = [("G = GL_n(E)", &ctx.g), ("G_sigma = GL_n(F)", &ctx.g_sigma), ("G_tau = U(n)", &ctx.g_tau)];
    println!("{:<20} {:>12} {:>8}", "group", "order", "classes");
    for (name, g) in rows {
        println!("{:<20} {:>12} {:>8}", name, g.order(), g.num_classes());
    }
    println!("|P(E)| = {}", ctx.mirabolic.len());
    println!("|N(E)| = {}  |N_sigma| = {}  |N_tau| = {}", ctx.n_e.len(), ctx.n_sigma.len(), ctx.n_tau.len());
    println!("|X_sigma| = {}  |X_tau| = {}", ctx.x_sigma.len(), ctx.x_tau.len());
    println!("order formulas and Lang counts agree: {}", ctx.check_orders());
    Ok(())
}

fn char_table(c: &Common, which: Which, out: &Path) -> Result<()> {
    let cfg = c.config()?;
    let cache = cfg.cache();
    let tower = Arc::new(build_tower(c.p, c.k)?);
    let ctx = build_context(c.n, tower, c.budget)?;
    let g = match which {
        Which::G => &ctx.g,
        Which::Sigma => &ctx.g_sigma,
        Which::Tau => &ctx.g_tau,
    };
    let (t, status) = cache.character_table(g, c.seed)?;
    println!("{}  order {}  {} classes  (cache: {:?})", g.name, g.order(), t.len(), status);
    let sizes: Vec<String> = t.sizes.iter().map(|s| s.to_string()).collect();
    println!("{:>6} | {}", "size", sizes.join("  "));
    for (i, ch) in t.chars.iter().enumerate() {
        let vals: Vec<String> = (0..t.num_classes()).map(|k| ch.value(k).to_string()).collect();
        println!("{:>6} | {}", format!("x{i}"), vals.join("  "));
    }
    std::fs::create_dir_all(out)?;
    let path = out.join(format!("char-table-{}.json", g.name.replace(|ch: char| !ch.is_ascii_alphanumeric(), "_")));
    let json = serde_json::json!({
        "group": g.name,
        "order": g.order(),
        "class_sizes": t.sizes,
        "degrees": t.degrees,
        "values": t.chars.iter().map(|ch| (0..t.num_classes()).map(|k| ch.value(k).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    std::fs::write(&path, serde_json::to_string_pretty(&json)?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn bessel(c: &Common, over: Over) -> Result<()> {
    let cache = c.config()?.cache();
    let print = |gg: &GelfandGraev, tables: &[whittaker_bench::gelfand_graev::BesselTable], degrees: &[u64]| {
        let f = gg.field();
        println!("pi,dim,composition,torus,value");
        for b in tables {
            for (i, cell) in gg.cells.iter().enumerate() {
                let torus: Vec<String> = cell.torus.iter().map(|&x| show_fe(f, x)).collect();
                println!("{},{},{:?},({}),{}", b.pi, degrees[b.pi], cell.composition, torus.join(" "), b.at(i));
            }
        }
    };
    match over {
        Over::F => {
            let field = Arc::new(Field::new(c.p, c.k)?);
            let g = FiniteGroup::general_linear(field.clone(), c.n, c.budget)?;
            let t = cache.character_table(&g, c.seed)?.0;
            let gg = GelfandGraev::new(&g, NCharacter::standard(AdditiveCharacter::on_field(&field, 1), c.n))?;
            let tables = gg.all_bessel(&t)?;
            cache.store_bessel(&g, "psi-standard", &tables)?;
            print(&gg, &tables, &t.degrees);
        }
        Over::Sigma | Over::Tau => {
            let iota = if matches!(over, Over::Sigma) { Involution::Sigma } else { Involution::Tau };
            let s = Setting::build_cached(c.n, c.p, c.k, c.budget, c.seed, &cache)?;
            let gg = s.gelfand_graev(iota, None)?;
            let tables = gg.all_bessel(&s.table)?;
            cache.store_bessel(s.group(), &format!("psi-{}", iota.opposite().symbol()), &tables)?;
            print(&gg, &tables, &s.table.degrees);
        }
    }
    Ok(())
}

fn basechange(c: &Common) -> Result<()> {
    let cfg = c.config()?;
    let s = Setting::build_cached(c.n, c.p, c.k, c.budget, c.seed, &cfg.cache())?;
    println!("{}  |G|/(|G_sigma||G_tau|) = {}", s.label(), s.main_constant());
    for iota in cfg.sides() {
        let sd = side(&s, iota)?;
        let kappa = iota.opposite();
        println!("\ndistinguished by G_{}; rho on G_{}", iota.symbol(), kappa.symbol());
        println!("{:>4} {:>6} {:>10} {:>5} {:>6} {:>10}", "pi", "dim", "lambda", "rho", "dim", "status");
        for pair in &sd.pairs {
            let v = sd.values.iter().find(|v| v.pi == pair.pi).unwrap();
            let rho_dim = pair.rho.map_or("-".into(), |r| s.sub_table(kappa).degrees[r].to_string());
            let rho = pair.rho.map_or("-".into(), |r| r.to_string());
            let status = match pair.status {
                MatchStatus::Unique => "unique".to_string(),
                MatchStatus::Ambiguous => format!("ambiguous {:?}", pair.candidates),
                MatchStatus::Failed => "failed".to_string(),
            };
            println!("{:>4} {:>6} {:>10} {:>5} {:>6} {:>10}", pair.pi, s.table.degrees[pair.pi], v.lambda, rho, rho_dim, status);
        }
    }
    Ok(())
}

fn verify(c: &Common, out: &Path) -> ExitCode {
    let go = || -> Result<VerificationReport> {
        let cfg = c.config()?;
        let rep = run(&cfg)?;
        let stem = format!("verify-n{}-p{}-k{}", c.n, c.p, c.k);
        rep.write_files(out, &stem, serde_json::to_value(&cfg)?)?;
        println!("wrote {}", out.join(format!("{stem}.csv")).display());
        Ok(rep)
    };
    match go() {
        Ok(rep) => {
            print_summary(&rep.rows);
            if rep.all_pass() {
                ExitCode::SUCCESS
            } else {
                for r in rep.failures() {
                    eprintln!("FAIL [{}] {} | {}\n    lhs: {}\n    rhs: {}", r.suite, r.anchor, r.params, r.lhs, r.rhs);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn print_summary(rows: &[ReportRow]) {
    let mut suites: Vec<(&str, usize, usize)> = Vec::new();
    for r in rows {
        match suites.iter_mut().find(|s| s.0 == r.suite) {
            Some(s) => {
                s.1 += 1;
                s.2 += r.pass as usize;
            }
            None => suites.push((&r.suite, 1, r.pass as usize)),
        }
    }
    for (name, total, pass) in &suites {
        println!("{name:<12} {pass:>6}/{total:<6} {}", if pass == total { "ok" } else { "FAILED" });
    }
}

fn report(c: &Common, input: Option<&Path>) -> Result<()> {
    let path = match input {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from("reports").join(format!("verify-n{}-p{}-k{}.csv", c.n, c.p, c.k)),
    };
    let mut rd = csv::Reader::from_path(&path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let rows: Vec<ReportRow> =
        rd.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    println!("{}: {} rows", path.display(), rows.len());
    print_summary(&rows);
    let mut anchors: Vec<(&str, &str, usize)> = Vec::new();
    for r in &rows {
        match anchors.iter_mut().find(|a| a.0 == r.suite && a.1 == r.anchor) {
            Some(a) => a.2 += 1,
            None => anchors.push((&r.suite, &r.anchor, 1)),
        }
    }
    for (suite, anchor, count) in anchors {
        println!("  {suite:<12} {anchor:<55} {count:>5}");
    }
    for r in rows.iter().filter(|r| !r.pass) {
        println!("FAIL [{}] {} | {} : {} vs {}", r.suite, r.anchor, r.params, r.lhs, r.rhs);
    }
    Ok(())
}
