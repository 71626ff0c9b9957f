//! `guekdv`: exact GUE map-count correlators, Toda/Volterra/KdV
//! verification suites, Witten intersection numbers, and scaling-limit
//! probes.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use guekdv_cli::backend::MapBackend;
use guekdv_cli::cachefile;
use guekdv_cli::config::{Config, Format};
use guekdv_cli::hp::HpCtx;
use guekdv_cli::limit::{convergence_report, identity_demo, Parity};
use guekdv_cli::output::{
    demo_csv, ladder_csv, verify_doc, verify_table, DemoRowJson, LadderRowJson,
};
use guekdv_cli::verify;
use guekdv_core::identities::MapSource;
use guekdv_core::rat::Rat;
use guekdv_core::report::ResidualReport;
use guekdv_core::wick::WickOracle;
use guekdv_core::witten::{witten_free_energy, WittenBudget, WittenTable};

#[derive(Parser)]
#[command(
    name = "guekdv",
    about = "Exact GUE correlators, Toda/Volterra/KdV machinery, Witten intersection numbers, and their verification suites",
    version
)]
struct Cli {
    /// Flat key=value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Map-count cache (read on start, written on exit).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Output format: json, csv, or table.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads for parallel grids (output is identical for any
    /// value).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One map count Map_g(i).
    Map {
        #[arg(long)]
        g: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        i: Vec<u32>,
    },
    /// Full or connected GUE correlator as a polynomial in N.
    Correlator {
        #[arg(long, value_delimiter = ',', required = true)]
        i: Vec<u32>,
        #[arg(long)]
        connected: bool,
    },
    /// Intersection number <tau_{d_1} ... tau_{d_n}>_g, or with
    /// --free-energy the truncated Witten free energy table.
    Witten {
        #[arg(long)]
        g: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        d: Vec<u32>,
        #[arg(long)]
        free_energy: bool,
        #[arg(long, default_value_t = 5)]
        deg: u32,
    },
    /// The n-point polynomial Q_g(x_1..x_n).
    Qpoly {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
    },
    /// Scaling-limit ladder for rescaled map counts, or the scaled
    /// identity demo with --demo.
    Limit {
        #[arg(long, default_value_t = 0)]
        g: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<String>,
        #[arg(long = "kappa-list", value_delimiter = ',', required = true)]
        kappa_list: Vec<u64>,
        #[arg(long, default_value = "even")]
        parity: String,
        #[arg(long)]
        demo: bool,
        #[arg(long)]
        h: Option<u32>,
    },
    /// Verification suites; exit code 1 when any residual fails.
    Verify {
        /// closed-forms | dilation | gue-pdes | resolvent | toda |
        /// volterra | central | eq56 | witten | kdv | all
        suite: String,
        #[arg(long)]
        h: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        jmax: Option<u32>,
    },
    /// Cache maintenance.
    Cache {
        #[command(subcommand)]
        op: CacheOp,
    },
}

#[derive(Subcommand)]
enum CacheOp {
    /// Union several caches (values must agree) into one.
    Merge {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print summary of a cache file.
    Show { path: PathBuf },
}

#[derive(Serialize)]
struct ValueDoc {
    value: String,
}

fn emit<T: Serialize>(doc: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(doc)?);
    Ok(())
}

fn parse_rats(xs: &[String]) -> Result<Vec<Rat>> {
    xs.iter()
        .map(|s| s.parse::<Rat>().map_err(|e| anyhow!("bad rational {s:?}: {e}")))
        .collect()
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    let mut cfg = Config::default();
    if let Some(p) = &cli.config {
        cfg.load_file(p)?;
    }
    if let Some(c) = &cli.cache {
        cfg.cache = Some(c.clone());
    }
    if let Some(f) = &cli.format {
        cfg.format = Format::parse(f)?;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    cfg.validate()?;

    match cli.cmd {
        Cmd::Map { g, i } => {
            let mut backend = MapBackend::new(cfg.wick_bound);
            if let Some(path) = &cfg.cache {
                if path.exists() {
                    backend.store = cachefile::load(path)?;
                }
            }
            let total: u32 = i.iter().sum();
            if i.len() <= 2 && total > cfg.wick_bound {
                backend.ensure_resolvent(total as usize + 1, 2 * ((total + 2) / 4).min(8))
                    .map_err(|e| anyhow!("{e}"))?;
            }
            let v = backend.map(g, &i).map_err(|e| anyhow!("{e}"))?;
            if let Some(path) = &cfg.cache {
                cachefile::save(&backend.store, path)?;
            }
            emit(&ValueDoc {
                value: v.to_string(),
            })?;
            Ok(0)
        }
        Cmd::Correlator { i, connected } => {
            let mut o = WickOracle::new(cfg.wick_bound);
            let im = guekdv_core::wick::IndexMultiset::new(i);
            let c = if connected {
                o.connected_correlator(&im)
            } else {
                o.full_correlator(&im)
            }
            .map_err(|e| anyhow!("{e}"))?;
            #[derive(Serialize)]
            struct CorrDoc {
                polynomial: String,
                coefficients: std::collections::BTreeMap<String, String>,
            }
            emit(&CorrDoc {
                polynomial: c.to_string_in_n(),
                coefficients: c
                    .terms()
                    .map(|(e, v)| (format!("N^{e}"), v.to_string()))
                    .collect(),
            })?;
            Ok(0)
        }
        Cmd::Witten {
            g,
            d,
            free_energy,
            deg,
        } => {
            let mut t = WittenTable::new(WittenBudget::default());
            if free_energy {
                let f = witten_free_energy(&mut t, deg, cfg.g_max).map_err(|e| anyhow!("{e}"))?;
                let doc: std::collections::BTreeMap<String, String> = f
                    .iter()
                    .map(|(ds, c)| {
                        let names: Vec<String> =
                            ds.iter().map(|v| format!("t{v}")).collect();
                        (names.join("*"), c.to_string())
                    })
                    .collect();
                emit(&doc)?;
                return Ok(0);
            }
            let g = g.ok_or_else(|| anyhow!("--g is required without --free-energy"))?;
            let v = t.intersection_number(g, &d).map_err(|e| anyhow!("{e}"))?;
            emit(&ValueDoc {
                value: v.to_string(),
            })?;
            Ok(0)
        }
        Cmd::Qpoly { g, n } => {
            let mut t = WittenTable::new(WittenBudget::default());
            let q = t.q_polynomial(g, n).map_err(|e| anyhow!("{e}"))?;
            let doc: std::collections::BTreeMap<String, String> = q
                .terms()
                .map(|(e, c)| {
                    let key: Vec<String> = e.iter().map(|v| v.to_string()).collect();
                    (key.join(","), c.to_string())
                })
                .collect();
            emit(&doc)?;
            Ok(0)
        }
        Cmd::Limit {
            g,
            x,
            kappa_list,
            parity,
            demo,
            h,
        } => {
            let xs = parse_rats(&x)?;
            let parity = match parity.as_str() {
                "even" => Parity::Even,
                "odd" => Parity::Odd,
                other => bail!("unknown parity {other:?}"),
            };
            let mut cx = HpCtx::new();
            let mut backend = MapBackend::new(cfg.wick_bound);
            if let Some(path) = &cfg.cache {
                if path.exists() {
                    backend.store = cachefile::load(path)?;
                }
            }
            let mut table = WittenTable::new(WittenBudget::default());
            // resolvent coverage for one/two-point ladders
            let kmax = kappa_list.iter().max().copied().unwrap_or(0);
            if xs.len() <= 2 && !demo {
                let xsum: Rat = xs.iter().fold(Rat::zero(), |a, b| a + b.clone());
                let need = &xsum * &Rat::from(kmax as i64) + Rat::from(4);
                let depth = (need.numer() / need.denom()).to_string().parse::<usize>()
                    .unwrap_or(usize::MAX);
                if depth > cfg.wick_bound as usize && g >= 1 {
                    backend
                        .ensure_resolvent(depth + 2, 2 * g.min(4))
                        .map_err(|e| anyhow!("{e}"))?;
                }
            }
            if demo {
                let h = h.ok_or_else(|| anyhow!("--h is required with --demo"))?;
                // the demo needs map counts at 2j ~ kappa x
                let xsum: Rat = xs.iter().fold(Rat::zero(), |a, b| a + b.clone());
                let need = &xsum * &Rat::from(kmax as i64) + Rat::from(6);
                let depth = (need.numer() / need.denom()).to_string().parse::<usize>()
                    .unwrap_or(usize::MAX);
                if xs.len() <= 2 && depth > cfg.wick_bound as usize {
                    backend
                        .ensure_resolvent(depth + 2, (2 * h + 2).min(8))
                        .map_err(|e| anyhow!("{e}"))?;
                }
                let rows = identity_demo(&mut cx, &mut backend, &mut table, h, &xs, &kappa_list)?;
                match cfg.format {
                    Format::Csv | Format::Table => print!("{}", demo_csv(&rows)),
                    Format::Json => {
                        let doc: Vec<DemoRowJson> = rows.iter().map(DemoRowJson::from).collect();
                        emit(&doc)?;
                    }
                }
            } else {
                let rows =
                    convergence_report(&mut cx, &mut backend, &mut table, g, &xs, &kappa_list, parity)?;
                match cfg.format {
                    Format::Csv | Format::Table => print!("{}", ladder_csv(&rows)),
                    Format::Json => {
                        let doc: Vec<LadderRowJson> =
                            rows.iter().map(LadderRowJson::from).collect();
                        emit(&doc)?;
                    }
                }
            }
            if let Some(path) = &cfg.cache {
                cachefile::save(&backend.store, path)?;
            }
            Ok(0)
        }
        Cmd::Verify { suite, h, n, jmax } => {
            let t = cfg.threads;
            let reports: Vec<ResidualReport> = match suite.as_str() {
                "closed-forms" => verify::closed_forms(t)?,
                "dilation" => verify::dilation(t)?,
                "gue-pdes" => verify::gue_pdes(cfg.wick_bound, cfg.i_max, cfg.eps_order, t)?,
                "resolvent" => verify::resolvent_suite(t)?,
                "toda" => verify::toda_suite(cfg.wick_bound, cfg.i_max, 8, cfg.eps_order, t)?,
                "volterra" => verify::volterra_suite(cfg.wick_bound, cfg.i_max, cfg.eps_order, t)?,
                "central" => verify::central_suite(t, h.unwrap_or(3), h.unwrap_or(1).min(1), 12)?,
                "eq56" => verify::eq56_suite(t, h.unwrap_or(1), n.unwrap_or(2), jmax.unwrap_or(5))?,
                "witten" => verify::witten_suite()?,
                "kdv" => verify::kdv_suite(cfg.deg, cfg.g_max)?,
                "all" => {
                    let mut all = Vec::new();
                    all.extend(verify::closed_forms(t)?);
                    all.extend(verify::dilation(t)?);
                    all.extend(verify::gue_pdes(cfg.wick_bound, cfg.i_max, cfg.eps_order, t)?);
                    all.extend(verify::resolvent_suite(t)?);
                    all.extend(verify::toda_suite(cfg.wick_bound, cfg.i_max, 8, cfg.eps_order, t)?);
                    all.extend(verify::volterra_suite(cfg.wick_bound, cfg.i_max, cfg.eps_order, t)?);
                    all.extend(verify::central_suite(t, 3, 1, 12)?);
                    all.extend(verify::witten_suite()?);
                    all.extend(verify::kdv_suite(cfg.deg, cfg.g_max)?);
                    all
                }
                other => bail!("unknown suite {other:?}"),
            };
            let doc = verify_doc(&suite, &reports);
            match cfg.format {
                Format::Json | Format::Csv => emit(&doc)?,
                Format::Table => print!("{}", verify_table(&doc)),
            }
            Ok(if doc.total_failures == 0 { 0 } else { 1 })
        }
        Cmd::Cache { op } => match op {
            CacheOp::Merge { inputs, out } => {
                let merged = cachefile::merge(&inputs)?;
                cachefile::save(&merged, &out)?;
                #[derive(Serialize)]
                struct MergeDoc {
                    entries: usize,
                }
                emit(&MergeDoc {
                    entries: merged.len(),
                })?;
                Ok(0)
            }
            CacheOp::Show { path } => {
                let s = cachefile::load(&path)?;
                #[derive(Serialize)]
                struct ShowDoc {
                    entries: usize,
                    sample: Vec<String>,
                }
                emit(&ShowDoc {
                    entries: s.len(),
                    sample: s
                        .iter()
                        .take(10)
                        .map(|((g, i), (v, p))| format!("g={g} i={i:?} -> {v} ({})", p.tag()))
                        .collect(),
                })?;
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
