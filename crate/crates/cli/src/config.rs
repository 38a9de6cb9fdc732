//! Configuration resolution: documented defaults, then a key=value config
//! file, then command-line flags, in increasing precedence.

use std::collections::BTreeMap;
use std::path::PathBuf;

use henon_core::params::ProblemParams;
use henon_core::{Error, Result};

/// Tolerance keys, their defaults, and what they gate.
pub const TOLERANCE_DEFAULTS: &[(&str, f64, &str)] = &[
    ("margin_rel", 1e-6, "relative tolerance on the minimum inequality margin"),
    ("shoot", 1e-15, "shooting bisection bracket tolerance, relative to v0"),
    ("seq_limit", 1e-10, "sequence limit residual gate for pass verdicts"),
    ("slope_band", 0.2, "two-sided band around predicted decay slopes"),
];

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "HENON_LAB_OUT";

/// Every knob a run can depend on, fully resolved. Unused fields keep their
/// defaults so the manifest echo is the same shape for every subcommand.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub n: u32,
    pub p: f64,
    pub a: f64,
    pub u0: f64,
    pub k: usize,
    pub seed: u64,
    pub exploratory: bool,
    pub r_max: f64,
    pub v0: f64,
    pub escape: f64,
    pub trials: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub out: PathBuf,
}

impl Default for Resolved {
    fn default() -> Self {
        Resolved {
            n: 8,
            p: 5.0,
            a: 0.0,
            u0: 1.0,
            k: 200,
            seed: 0,
            exploratory: false,
            r_max: 1e3,
            v0: -1.0,
            escape: 1e6,
            trials: 10_000,
            tolerances: TOLERANCE_DEFAULTS
                .iter()
                .map(|&(k, v, _)| (k.to_string(), v))
                .collect(),
            out: PathBuf::new(),
        }
    }
}

impl Resolved {
    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances[key]
    }

    pub fn params(&self) -> Result<ProblemParams<f64>> {
        if self.exploratory {
            ProblemParams::exploratory(self.n, self.p, self.a)
        } else {
            ProblemParams::strict(self.n, self.p, self.a)
        }
    }
}

/// Problem-parameter flags for the single-point subcommands. Sweep replaces
/// these with axis strings, so they live apart from the shared options.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ParamOpts {
    /// Dimension n >= 5
    #[arg(long)]
    pub n: Option<u32>,
    /// Nonlinearity exponent p > 1
    #[arg(long)]
    pub p: Option<f64>,
    /// Weight exponent a >= 0
    #[arg(long)]
    pub a: Option<f64>,
}

/// Flag values shared by every subcommand; `None` means "not given", so the
/// config file or the default shows through.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonOpts {
    /// Origin value u(0)
    #[arg(long)]
    pub u0: Option<f64>,
    /// Iteration depth K
    #[arg(long)]
    pub k: Option<usize>,
    /// Seed for randomized oracle trials
    #[arg(long)]
    pub seed: Option<u64>,
    /// Accept parameters outside the supercritical regime (report-only)
    #[arg(long)]
    pub exploratory: bool,
    /// Radial horizon for solving and decay fits
    #[arg(long)]
    pub r_max: Option<f64>,
    /// key=value config file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $HENON_LAB_OUT, then ./henon-lab-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance override name=value; repeatable. Known names:
    /// margin_rel, shoot, seq_limit, slope_band
    #[arg(long = "tol")]
    pub tol: Vec<String>,
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("malformed number for '{key}': '{raw}'")))
}

fn set_tolerance(map: &mut BTreeMap<String, f64>, name: &str, value: f64) -> Result<()> {
    if !map.contains_key(name) {
        let known: Vec<&str> = TOLERANCE_DEFAULTS.iter().map(|&(k, _, _)| k).collect();
        return Err(Error::Invalid(format!(
            "unknown tolerance '{name}'; known tolerances: {}",
            known.join(", ")
        )));
    }
    map.insert(name.to_string(), value);
    Ok(())
}

fn apply_file(resolved: &mut Resolved, path: &PathBuf) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read config file: {e}")))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Invalid(format!("config line {} is not key=value: '{line}'", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n" => {
                resolved.n = value
                    .parse()
                    .map_err(|_| Error::Invalid(format!("malformed integer for 'n': '{value}'")))?
            }
            "p" => resolved.p = parse_f64(key, value)?,
            "a" => resolved.a = parse_f64(key, value)?,
            "u0" => resolved.u0 = parse_f64(key, value)?,
            "k" => {
                resolved.k = value
                    .parse()
                    .map_err(|_| Error::Invalid(format!("malformed integer for 'k': '{value}'")))?
            }
            "seed" => {
                resolved.seed = value.parse().map_err(|_| {
                    Error::Invalid(format!("malformed integer for 'seed': '{value}'"))
                })?
            }
            "exploratory" => {
                resolved.exploratory = value.parse().map_err(|_| {
                    Error::Invalid(format!("malformed bool for 'exploratory': '{value}'"))
                })?
            }
            "r_max" => resolved.r_max = parse_f64(key, value)?,
            "v0" => resolved.v0 = parse_f64(key, value)?,
            "escape" => resolved.escape = parse_f64(key, value)?,
            "trials" => {
                resolved.trials = value.parse().map_err(|_| {
                    Error::Invalid(format!("malformed integer for 'trials': '{value}'"))
                })?
            }
            "out" => resolved.out = PathBuf::from(value),
            _ => {
                if let Some(name) = key.strip_prefix("tol.") {
                    set_tolerance(&mut resolved.tolerances, name, parse_f64(key, value)?)?;
                } else {
                    return Err(Error::Invalid(format!("unknown config key '{key}'")));
                }
            }
        }
    }
    Ok(())
}

/// Defaults, then the config file, then flags.
pub fn resolve(opts: &CommonOpts, params: &ParamOpts) -> Result<Resolved> {
    let mut r = Resolved::default();
    if let Some(path) = &opts.config {
        apply_file(&mut r, path)?;
    }
    if let Some(n) = params.n {
        r.n = n;
    }
    if let Some(p) = params.p {
        r.p = p;
    }
    if let Some(a) = params.a {
        r.a = a;
    }
    if let Some(u0) = opts.u0 {
        r.u0 = u0;
    }
    if let Some(k) = opts.k {
        r.k = k;
    }
    if let Some(seed) = opts.seed {
        r.seed = seed;
    }
    if opts.exploratory {
        r.exploratory = true;
    }
    if let Some(r_max) = opts.r_max {
        r.r_max = r_max;
    }
    for entry in &opts.tol {
        let (name, value) = entry.split_once('=').ok_or_else(|| {
            Error::Invalid(format!("--tol expects name=value, got '{entry}'"))
        })?;
        set_tolerance(&mut r.tolerances, name.trim(), parse_f64(name, value)?)?;
    }
    if let Some(out) = &opts.out {
        r.out = out.clone();
    }
    if r.out.as_os_str().is_empty() {
        r.out = std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("henon-lab-out"));
    }
    Ok(r)
}

/// One axis of a sweep grid: `lo:hi` or `lo:hi:step` ranges, comma lists,
/// single values, or the empty string for an empty axis.
pub fn parse_axis(raw: &str) -> Result<Vec<f64>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    if raw.contains(',') {
        return raw.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_f64("axis", s)).collect();
    }
    let parts: Vec<&str> = raw.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parse_f64("axis", parts[0])?]),
        2 | 3 => {
            let lo = parse_f64("axis", parts[0])?;
            let hi = parse_f64("axis", parts[1])?;
            let step = if parts.len() == 3 { parse_f64("axis", parts[2])? } else { 1.0 };
            if !(step > 0.0) {
                return Err(Error::Invalid(format!("axis step must be positive: '{raw}'")));
            }
            if hi < lo {
                return Err(Error::Invalid(format!("axis range is empty: '{raw}'")));
            }
            let mut vals = Vec::new();
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            for i in 0..=count {
                vals.push(lo + step * i as f64);
            }
            Ok(vals)
        }
        _ => Err(Error::Invalid(format!("malformed axis '{raw}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_which_overrides_defaults() {
        let dir = std::env::temp_dir().join("henon-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("lab.conf");
        std::fs::write(&path, "n = 10\np = 6\ntol.margin_rel = 1e-8\n# comment\n").unwrap();
        let opts = CommonOpts {
            config: Some(path),
            out: Some(PathBuf::from("x")),
            ..Default::default()
        };
        let params = ParamOpts { p: Some(7.0), ..Default::default() };
        let r = resolve(&opts, &params).unwrap();
        assert_eq!(r.n, 10);
        assert_eq!(r.p, 7.0);
        assert_eq!(r.a, 0.0);
        assert_eq!(r.tol("margin_rel"), 1e-8);
        assert_eq!(r.tol("shoot"), 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = std::env::temp_dir().join("henon-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.conf");
        std::fs::write(&path, "np = 8\n").unwrap();
        let params = ParamOpts::default();
        let opts = CommonOpts { config: Some(path), ..Default::default() };
        let err = resolve(&opts, &params).unwrap_err();
        assert!(err.to_string().contains("unknown config key"));

        let opts = CommonOpts { tol: vec!["margin=1".into()], ..Default::default() };
        let err = resolve(&opts, &params).unwrap_err();
        assert!(err.to_string().contains("unknown tolerance"));
    }

    #[test]
    fn axis_forms_parse() {
        assert_eq!(parse_axis("5:12").unwrap().len(), 8);
        assert_eq!(parse_axis("3.5:8:0.5").unwrap().len(), 10);
        assert_eq!(parse_axis("5").unwrap(), vec![5.0]);
        assert_eq!(parse_axis("1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(parse_axis("").unwrap().is_empty());
        assert!(parse_axis("2:1").is_err());
        assert!(parse_axis("1:2:0").is_err());
    }
}
