//! Cross-product parameter sweep: the inner subcommand runs at every grid
//! point concurrently, output partitions into one directory per point, and
//! the aggregate CSV is ordered lexicographically by (n, p, a) no matter
//! how the workers were scheduled.

use rayon::prelude::*;
use serde_json::json;

use henon_core::{Error, Result};

use crate::config::{parse_axis, resolve, CommonOpts, ParamOpts, Resolved};
use crate::run::{self, config_echo, Artifacts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Inner {
    Sequences,
    Solve,
    Verify,
    Blowup,
    Oracle,
    Decay,
}

impl Inner {
    fn name(self) -> &'static str {
        match self {
            Inner::Sequences => "sequences",
            Inner::Solve => "solve",
            Inner::Verify => "verify",
            Inner::Blowup => "blowup",
            Inner::Oracle => "oracle",
            Inner::Decay => "decay",
        }
    }

    fn columns(self) -> &'static str {
        match self {
            Inner::Sequences => run::SEQUENCES_COLUMNS,
            Inner::Solve => run::SOLVE_COLUMNS,
            Inner::Verify => run::VERIFY_COLUMNS,
            Inner::Blowup => run::BLOWUP_COLUMNS,
            Inner::Oracle => run::ORACLE_COLUMNS,
            Inner::Decay => run::DECAY_COLUMNS,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    /// Inner subcommand to run at every grid point
    #[arg(long, value_enum, default_value = "verify")]
    pub inner: Inner,
    /// Dimension axis: value, comma list, or lo:hi[:step]
    #[arg(long, default_value = "8")]
    pub n: String,
    /// Exponent axis: value, comma list, or lo:hi[:step]
    #[arg(long, default_value = "5")]
    pub p: String,
    /// Weight axis: value, comma list, or lo:hi[:step]
    #[arg(long, default_value = "0")]
    pub a: String,
    /// Largest admissible cross-product size
    #[arg(long, default_value_t = 500)]
    pub cap: usize,
    #[command(flatten)]
    pub common: CommonOpts,
}

/// The dimension axis must hold integers.
fn int_axis(raw: &str) -> Result<Vec<u32>> {
    parse_axis(raw)?
        .into_iter()
        .map(|x| {
            let rounded = x.round();
            if (x - rounded).abs() > 1e-9 || !(0.0..=1e9).contains(&rounded) {
                Err(Error::Invalid(format!("dimension axis needs integers, got {x}")))
            } else {
                Ok(rounded as u32)
            }
        })
        .collect()
}

/// Inline messages occupy one CSV cell, so separators are rewritten.
fn inline(msg: &str) -> String {
    msg.replace(',', ";").replace('\n', " ")
}

struct PointResult {
    n: u32,
    p: f64,
    a: f64,
    status: &'static str,
    cells: Vec<String>,
    pass: bool,
    message: String,
    /// Artifact records relative to the point directory.
    records: Vec<(String, String)>,
    dir: String,
}

fn run_point(base: &Resolved, inner: Inner, n: u32, p: f64, a: f64) -> PointResult {
    let mut cfg = base.clone();
    cfg.n = n;
    cfg.p = p;
    cfg.a = a;
    let dir = format!("points/n{n}_p{p}_a{a}");
    let sub = inner.name();
    let empty_cells = vec![String::new(); inner.columns().split(',').count()];

    let mut art = match Artifacts::create(&base.out.join(&dir)) {
        Ok(art) => art,
        Err(e) => {
            return PointResult {
                n,
                p,
                a,
                status: "error",
                cells: empty_cells,
                pass: false,
                message: inline(&e.to_string()),
                records: Vec::new(),
                dir,
            };
        }
    };
    let (status, pass, cells, message) = match run::dispatch(sub, &cfg, &mut art) {
        Ok(out) => ("ok", out.pass, out.row, String::new()),
        Err(e) => {
            let msg = e.to_string();
            let record = json!({ "subcommand": sub, "error": msg, "pass": false });
            let _ = art.write_json("error.json", &record);
            ("error", false, empty_cells, inline(&msg))
        }
    };
    if let Err(e) = art.finish(config_echo(sub, &cfg)) {
        return PointResult {
            n,
            p,
            a,
            status: "error",
            cells,
            pass: false,
            message: inline(&e.to_string()),
            records: art.records.clone(),
            dir,
        };
    }
    PointResult { n, p, a, status, cells, pass, message, records: art.records.clone(), dir }
}

pub fn run_sweep(args: &SweepArgs) -> Result<bool> {
    let base = resolve(&args.common, &ParamOpts::default())?;
    let ns = int_axis(&args.n)?;
    let ps = parse_axis(&args.p)?;
    let aa = parse_axis(&args.a)?;

    let mut points: Vec<(u32, f64, f64)> = Vec::new();
    for &n in &ns {
        for &p in &ps {
            for &a in &aa {
                points.push((n, p, a));
            }
        }
    }
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    if points.len() > args.cap {
        return Err(Error::Invalid(format!(
            "sweep grid has {} points, above the cap of {}; raise --cap for larger grids",
            points.len(),
            args.cap
        )));
    }

    let inner = args.inner;
    // Indexed parallel collect keeps the input (lexicographic) order, so the
    // aggregate below never depends on completion order.
    let outcomes: Vec<PointResult> =
        points.par_iter().map(|&(n, p, a)| run_point(&base, inner, n, p, a)).collect();

    let mut art = Artifacts::create(&base.out)?;
    let mut csv = format!("n,p,a,status,{},pass,message\n", inner.columns());
    let mut all_pass = true;
    let mut errors = 0usize;
    for pt in &outcomes {
        all_pass &= pt.pass;
        if pt.status == "error" {
            errors += 1;
        }
        let mut cells =
            vec![pt.n.to_string(), pt.p.to_string(), pt.a.to_string(), pt.status.to_string()];
        cells.extend(pt.cells.iter().cloned());
        cells.push(pt.pass.to_string());
        cells.push(pt.message.clone());
        csv.push_str(&cells.join(","));
        csv.push('\n');
        for (rel, sha) in &pt.records {
            art.records.push((format!("{}/{rel}", pt.dir), sha.clone()));
        }
    }
    art.write_text("sweep.csv", &csv)?;
    art.write_json(
        "sweep.json",
        &json!({
            "inner": inner.name(),
            "points": outcomes.len(),
            "errors": errors,
            "pass": all_pass,
        }),
    )?;
    let mut echo = config_echo("sweep", &base);
    echo["axes"] =
        json!({ "inner": inner.name(), "n": args.n, "p": args.p, "a": args.a, "cap": args.cap });
    art.finish(echo)?;
    println!(
        "sweep {}: {} points, {} errors, {}",
        inner.name(),
        outcomes.len(),
        errors,
        if all_pass { "pass" } else { "fail" }
    );
    Ok(all_pass)
}
