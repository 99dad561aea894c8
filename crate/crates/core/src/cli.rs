//! The `opk` command-line front end.
//!
//! Every option can come from a flag or from a `key = value` config file
//! (`--config`); flags win. Config keys are the long flag names, and
//! tolerances use `tol.<name>` (`--tol <name>=<value>` on the command line).
//!
//! Exit codes: 0 all checks pass, 1 a certificate or check failed,
//! 2 configuration error, 3 numerical failure (weight truncation).

use crate::bounds::{Certifier, DerivativeBound, TheoremId};
use crate::charlier::weight_sequence;
use crate::moments::{central_moment_closed, moment_report_with};
use crate::operators::{
    apply_discrete, charlier_kantorovich_szasz, domain_min_x, large_a_diagnostic, weight_exponent,
    CenterMap, Evaluator, OperatorParams, TestFunction,
};
use crate::report::{Cell, Format, Report};
use crate::{library, CompensatedSum, Error, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "opk",
    version,
    about = "Charlier Szász–Kantorovich operators: moments, sweeps and error-bound certificates"
)]
pub struct Cli {
    /// `key = value` file supplying defaults for any option
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump weight sequences `p_k` with cumulative mass
    Weights(Options),
    /// Closed-form moments next to their series values
    Moments(Options),
    /// Certify an error bound on a grid
    Certify(Options),
    /// Sup-norm error and weighted norms along an `n` sweep
    Converge(Options),
    /// The four operator families side by side
    Compare(Options),
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Library function id
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Comma-separated list of n
    #[arg(long)]
    pub n: Option<String>,
    /// Comma-separated list of a > 1
    #[arg(long)]
    pub a: Option<String>,
    /// Semicolon-separated α,β pairs, e.g. `0,0;1,2`
    #[arg(long)]
    pub ab: Option<String>,
    /// Uniform grid `lo:hi:count`, endpoints included
    #[arg(long)]
    pub x: Option<String>,
    /// Theorem id: 3.1, 3.2, 3.3, remark, 4.1, 4.2, 4.3
    #[arg(long)]
    pub theorem: Option<String>,
    /// Comma-separated Ditzian–Totik exponents in [0, 1]
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long = "tail-tol")]
    pub tail_tol: Option<String>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Weight exponents for `weights` (bypasses n, x)
    #[arg(long)]
    pub m: Option<String>,
    /// Center map for `weights`: identity, szasz or kantorovich
    #[arg(long)]
    pub map: Option<String>,
    /// Gauss–Legendre order per Kantorovich cell
    #[arg(long = "quad-order")]
    pub quad_order: Option<String>,
    /// Right end of the Korovkin sup grid
    #[arg(long = "x-max")]
    pub x_max: Option<String>,
    /// First-derivative bound form: stated or drift
    #[arg(long = "bound-form")]
    pub bound_form: Option<String>,
    /// Hard cap on the number of weights per sequence
    #[arg(long = "k-cap")]
    pub k_cap: Option<String>,
    /// Tolerance override `name=value` (repeatable)
    #[arg(long = "tol")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Weights,
    Moments,
    Certify,
    Converge,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / last)
            .collect()
    }
}

/// A fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub command: CommandKind,
    pub function_id: String,
    pub n_list: Vec<u32>,
    pub a_list: Vec<f64>,
    pub ab_pairs: Vec<(f64, f64)>,
    pub x_grid: GridSpec,
    pub theorem: TheoremId,
    pub lambdas: Vec<f64>,
    pub tail_tol: f64,
    pub quad_order: usize,
    pub k_cap: Option<usize>,
    pub m_list: Option<Vec<f64>>,
    pub map: CenterMap,
    pub x_max: f64,
    pub bound_form: DerivativeBound,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub tolerances: BTreeMap<String, f64>,
    /// Resolved key/value pairs echoed into JSON output.
    pub echo: Vec<(String, String)>,
}

const DEFAULTS: [(&str, &str); 16] = [
    ("fn", "exp-neg"),
    ("n", "100"),
    ("a", "2"),
    ("ab", "0,0"),
    ("x", "0.5:10:20"),
    ("theorem", "3.1"),
    ("lambda", "0,0.5,1"),
    ("tail-tol", "1e-14"),
    ("format", "csv"),
    ("map", "kantorovich"),
    ("quad-order", "5"),
    ("x-max", "1000"),
    ("bound-form", "stated"),
    ("tol.moments", "1e-9"),
    ("tol.slack", "0.1"),
    ("tol.margin", "1e-12"),
];

const EXTRA_TOLERANCES: [(&str, &str); 4] = [
    ("tol.reduction", "1e-12"),
    ("tol.korovkin-points", "2000"),
    ("tol.large-a", "1e6"),
    ("tol.lip-pairs", "10000"),
];

const OPTIONAL_KEYS: [&str; 3] = ["m", "out", "k-cap"];

fn known_key(key: &str) -> bool {
    DEFAULTS
        .iter()
        .chain(EXTRA_TOLERANCES.iter())
        .any(|(k, _)| *k == key)
        || OPTIONAL_KEYS.contains(&key)
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_owned();
        if !known_key(&key) {
            return Err(Error::Config(format!(
                "line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_owned());
    }
    Ok(map)
}

fn config_error(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("{key} = `{value}`: {what}"))
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| config_error(key, s, "expected a number"))
}

fn parse_list<T, F>(key: &str, s: &str, item: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Result<T>,
{
    let items: Vec<T> = s
        .split(',')
        .map(|t| item(t.trim()))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(config_error(key, s, "empty list"));
    }
    Ok(items)
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(config_error("x", s, "expected lo:hi:count"));
    }
    let lo = parse_f64("x", parts[0])?;
    let hi = parse_f64("x", parts[1])?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| config_error("x", s, "count must be a positive integer"))?;
    if count == 0 || !(lo <= hi) || lo < 0.0 || !hi.is_finite() {
        return Err(config_error("x", s, "need 0 <= lo <= hi and count >= 1"));
    }
    Ok(GridSpec { lo, hi, count })
}

fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(';')
        .map(|pair| {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| config_error("ab", s, "expected α,β pairs"))?;
            let (alpha, beta) = (parse_f64("ab", a)?, parse_f64("ab", b)?);
            if !(0.0 <= alpha && alpha <= beta) {
                return Err(config_error("ab", s, "each pair needs 0 <= α <= β"));
            }
            Ok((alpha, beta))
        })
        .collect()
}

fn parse_map(s: &str) -> Result<CenterMap> {
    match s.trim().to_ascii_lowercase().as_str() {
        "identity" => Ok(CenterMap::Identity),
        "szasz" => Ok(CenterMap::Szasz),
        "kantorovich" => Ok(CenterMap::Kantorovich),
        _ => Err(config_error(
            "map",
            s,
            "expected identity, szasz or kantorovich",
        )),
    }
}

impl Options {
    fn entries(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        let flags: [(&str, &Option<String>); 15] = [
            ("fn", &self.function),
            ("n", &self.n),
            ("a", &self.a),
            ("ab", &self.ab),
            ("x", &self.x),
            ("theorem", &self.theorem),
            ("lambda", &self.lambda),
            ("tail-tol", &self.tail_tol),
            ("format", &self.format),
            ("m", &self.m),
            ("map", &self.map),
            ("quad-order", &self.quad_order),
            ("x-max", &self.x_max),
            ("bound-form", &self.bound_form),
            ("k-cap", &self.k_cap),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                out.push((k.to_owned(), v.clone()));
            }
        }
        if let Some(p) = &self.out {
            out.push(("out".into(), p.display().to_string()));
        }
        for t in &self.tol {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| config_error("tol", t, "expected name=value"))?;
            let key = format!("tol.{}", k.trim());
            if !known_key(&key) {
                return Err(Error::Config(format!("unknown tolerance `{}`", k.trim())));
            }
            out.push((key, v.trim().to_owned()));
        }
        Ok(out)
    }
}

impl SweepConfig {
    /// Resolves a configuration from defaults, then `file`, then `flags`.
    pub fn resolve(
        command: CommandKind,
        file: &BTreeMap<String, String>,
        flags: &Options,
    ) -> Result<Self> {
        let mut map: BTreeMap<String, String> = DEFAULTS
            .iter()
            .chain(EXTRA_TOLERANCES.iter())
            .map(|(k, v)| ((*k).to_owned(), (*v).to_owned()))
            .collect();
        map.extend(file.iter().map(|(k, v)| (k.clone(), v.clone())));
        map.extend(flags.entries()?);
        Self::from_map(command, &map)
    }

    pub fn from_map(command: CommandKind, map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| {
            map.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Config(format!("missing key `{k}`")))
        };
        let function_id = get("fn")?.trim().to_owned();
        library::get(&function_id)?;
        let n_list = parse_list("n", get("n")?, |t| {
            t.parse::<u32>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| config_error("n", t, "expected a positive integer"))
        })?;
        let a_list = parse_list("a", get("a")?, |t| parse_f64("a", t))?;
        let lambdas = parse_list("lambda", get("lambda")?, |t| {
            let l = parse_f64("lambda", t)?;
            if (0.0..=1.0).contains(&l) {
                Ok(l)
            } else {
                Err(config_error("lambda", t, "must lie in [0, 1]"))
            }
        })?;
        let tail_tol = parse_f64("tail-tol", get("tail-tol")?)?;
        let quad_order: usize = get("quad-order")?.trim().parse().map_err(|_| {
            config_error(
                "quad-order",
                get("quad-order").unwrap_or(""),
                "expected an integer",
            )
        })?;
        let format = match get("format")?.trim() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(config_error("format", other, "expected csv or json")),
        };
        let k_cap = map
            .get("k-cap")
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| config_error("k-cap", s, "expected an integer"))
            })
            .transpose()?;
        let m_list = map
            .get("m")
            .map(|s| parse_list("m", s, |t| parse_f64("m", t)))
            .transpose()?;
        let bound_form = match get("bound-form")?.trim() {
            "stated" => DerivativeBound::AsStated,
            "drift" => DerivativeBound::WithDrift,
            other => {
                return Err(config_error(
                    "bound-form",
                    other,
                    "expected stated or drift",
                ))
            }
        };
        let tolerances = map
            .iter()
            .filter_map(|(k, v)| {
                k.strip_prefix("tol.")
                    .map(|name| Ok((name.to_owned(), parse_f64(k, v)?)))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let echo = map
            .iter()
            .filter(|(k, _)| k.as_str() != "out")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let cfg = Self {
            command,
            function_id,
            n_list,
            a_list,
            ab_pairs: parse_pairs(get("ab")?)?,
            x_grid: parse_grid(get("x")?)?,
            theorem: get("theorem")?.parse()?,
            lambdas,
            tail_tol,
            quad_order,
            k_cap,
            m_list,
            map: parse_map(get("map")?)?,
            x_max: parse_f64("x-max", get("x-max")?)?,
            bound_form,
            output: map.get("out").map(PathBuf::from),
            format,
            tolerances,
            echo,
        };
        // surface parameter errors before any work starts
        cfg.evaluator()?;
        cfg.param_combos(&cfg.n_list)?;
        Ok(cfg)
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn evaluator(&self) -> Result<Evaluator> {
        let ev = Evaluator::new(self.tail_tol, self.quad_order)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(match self.k_cap {
            Some(cap) => ev.with_k_cap(cap),
            None => ev,
        })
    }

    fn certifier(&self) -> Result<Certifier> {
        Ok(Certifier {
            evaluator: self.evaluator()?,
            margin_tol: self.tol("margin"),
            slack: self.tol("slack"),
            ..Certifier::default()
        })
    }

    fn function(&self) -> TestFunction {
        library::get(&self.function_id).expect("function id validated at resolve time")
    }

    /// Parameter combinations ordered by `n`, then `a`, then `(α, β)`.
    fn param_combos(&self, n_list: &[u32]) -> Result<Vec<OperatorParams>> {
        let mut out = Vec::new();
        for &n in n_list {
            for &a in &self.a_list {
                for &(alpha, beta) in &self.ab_pairs {
                    out.push(
                        OperatorParams::new(n, a, alpha, beta)
                            .map_err(|e| Error::Config(e.to_string()))?,
                    );
                }
            }
        }
        Ok(out)
    }
}

fn skip_reason(min: f64) -> String {
    format!("skipped:x below domain_min_x={min:.16e}")
}

fn param_cells(p: &OperatorParams) -> Vec<Cell> {
    vec![p.n.into(), p.a.into(), p.alpha.into(), p.beta.into()]
}

fn with_prefix(prefix: &[Cell], rest: Vec<Cell>) -> Vec<Cell> {
    prefix.iter().cloned().chain(rest).collect()
}

/// `(k, p_k, cumulative)` rows for one weight sequence.
fn weight_rows(cfg: &SweepConfig, prefix: &[Cell], m: f64, a: f64, out: &mut Report) -> Result<()> {
    let ws = weight_sequence(m, a, cfg.tail_tol, cfg.k_cap)?;
    let mut cum = CompensatedSum::new();
    for (k, pk) in ws.iter() {
        cum.add(pk);
        out.push(with_prefix(
            prefix,
            vec![
                m.into(),
                k.into(),
                pk.into(),
                cum.value().into(),
                "ok".into(),
            ],
        ));
    }
    Ok(())
}

pub fn run_weights(cfg: &SweepConfig) -> Result<Report> {
    let mut report = Report::new([
        "n",
        "a",
        "alpha",
        "beta",
        "x",
        "m",
        "k",
        "p_k",
        "cumulative",
        "status",
    ]);
    if let Some(ms) = &cfg.m_list {
        for &a in &cfg.a_list {
            for &m in ms {
                let prefix = [Cell::Empty, a.into(), Cell::Empty, Cell::Empty, Cell::Empty];
                weight_rows(cfg, &prefix, m, a, &mut report)?;
            }
        }
        return Ok(report);
    }
    for p in cfg.param_combos(&cfg.n_list)? {
        let min = domain_min_x(&p, cfg.map);
        for x in cfg.x_grid.points() {
            let mut prefix = param_cells(&p);
            prefix.push(x.into());
            if x < min {
                report.push(with_prefix(
                    &prefix,
                    vec![
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        skip_reason(min).into(),
                    ],
                ));
                continue;
            }
            let m = weight_exponent(x, &p, cfg.map)?;
            weight_rows(cfg, &prefix, m, p.a, &mut report)?;
        }
    }
    Ok(report)
}

pub fn run_moments(cfg: &SweepConfig) -> Result<Report> {
    let mut columns: Vec<String> = ["n", "a", "alpha", "beta", "x"].map(String::from).to_vec();
    for kind in ["raw", "central"] {
        for i in 0..3 {
            columns.push(format!("{kind}{i}_closed"));
            columns.push(format!("{kind}{i}_series"));
        }
    }
    columns.extend(["max_rel_err", "status"].map(String::from));
    let mut report = Report::new(columns);
    let ev = cfg.evaluator()?;
    let tol = cfg.tol("moments");
    for p in cfg.param_combos(&cfg.n_list)? {
        let min = domain_min_x(&p, CenterMap::Kantorovich);
        let xs = cfg.x_grid.points();
        let rows: Vec<Vec<Cell>> = xs
            .par_iter()
            .map(|&x| {
                let mut row = param_cells(&p);
                row.push(x.into());
                if x < min {
                    row.extend(std::iter::repeat_n(Cell::Empty, 13));
                    row.push(skip_reason(min).into());
                    return Ok(row);
                }
                let r = moment_report_with(&ev, x, &p)?;
                for (closed, series) in [
                    (r.raw_closed, r.raw_series),
                    (r.central_closed, r.central_series),
                ] {
                    for i in 0..3 {
                        row.push(closed[i].into());
                        row.push(series[i].into());
                    }
                }
                row.push(r.max_rel_err.into());
                row.push("ok".into());
                Ok(row)
            })
            .collect::<Result<_>>()?;
        for row in rows {
            if let Cell::Float(err) = row[row.len() - 2] {
                report.failed |= !(err <= tol);
            }
            report.push(row);
        }
    }
    Ok(report)
}

const CERTIFY_COLUMNS: [&str; 14] = [
    "theorem", "kind", "n", "a", "alpha", "beta", "lambda", "x", "observed", "bound", "margin",
    "ratio", "passed", "status",
];

fn split_domain(xs: &[f64], min: f64) -> Vec<f64> {
    xs.iter().copied().filter(|&x| x >= min).collect()
}

pub fn run_certify(cfg: &SweepConfig) -> Result<Report> {
    let mut report = Report::new(CERTIFY_COLUMNS);
    let cert = cfg.certifier()?;
    let f = cfg.function();
    let xs = cfg.x_grid.points();
    let theorem = cfg.theorem;
    let id: Cell = theorem.to_string().into();

    let point_row = |p: &OperatorParams,
                     lambda: Option<f64>,
                     x: f64,
                     pt: Option<&crate::bounds::CertificatePoint>,
                     min: f64| {
        let mut row = vec![id.clone(), "point".into()];
        row.extend(param_cells(p));
        row.push(lambda.into());
        row.push(x.into());
        match pt {
            Some(pt) => row.extend([
                pt.observed.into(),
                pt.bound.into(),
                pt.margin.into(),
                pt.ratio.into(),
                pt.passed.into(),
                "ok".into(),
            ]),
            None => row.extend([
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                skip_reason(min).into(),
            ]),
        }
        row
    };

    match theorem {
        TheoremId::T3_1 | TheoremId::T3_2 | TheoremId::RemarkCompare | TheoremId::T4_3 => {
            for p in cfg.param_combos(&cfg.n_list)? {
                let min = domain_min_x(&p, CenterMap::Kantorovich);
                let valid = split_domain(&xs, min);
                let certificate = if valid.is_empty() {
                    None
                } else {
                    Some(match theorem {
                        TheoremId::T3_1 => cert.theorem_3_1(&f, &p, &valid)?,
                        TheoremId::T3_2 => {
                            let fprime = library::derivative(&cfg.function_id)?;
                            cert.theorem_3_2(&f, &fprime, &p, &valid, cfg.bound_form)?
                        }
                        TheoremId::RemarkCompare => cert.remark(&p, &valid)?,
                        _ => {
                            let lip =
                                library::entry(&cfg.function_id)?.lip_star.ok_or_else(|| {
                                    Error::Config(format!(
                                        "function `{}` has no Lip* membership data",
                                        cfg.function_id
                                    ))
                                })?;
                            let pairs = cfg.tol("lip-pairs") as usize;
                            cert.theorem_4_3(&f, &p, &valid, lip.alpha, lip.m, pairs)?
                        }
                    })
                };
                if let Some(c) = &certificate {
                    report.failed |= !c.passed;
                }
                let mut pts = certificate.iter().flat_map(|c| c.points.iter());
                for &x in &xs {
                    let pt = if x >= min { pts.next() } else { None };
                    report.push(point_row(&p, None, x, pt, min));
                }
            }
        }
        TheoremId::T4_1 | TheoremId::T4_2 => {
            let lambdas: Vec<Option<f64>> = match theorem {
                TheoremId::T4_1 => cfg.lambdas.iter().copied().map(Some).collect(),
                _ => vec![None],
            };
            let n0 = cfg.n_list[0];
            for base in cfg.param_combos(&[n0])? {
                let min = domain_min_x(&base, CenterMap::Kantorovich);
                let valid = split_domain(&xs, min);
                for &lambda in &lambdas {
                    if valid.is_empty() {
                        for &n in &cfg.n_list {
                            for &x in &xs {
                                report.push(point_row(&base.with_n(n)?, lambda, x, None, min));
                            }
                        }
                        continue;
                    }
                    let c = match lambda {
                        Some(l) => cert.theorem_4_1(&f, &base, &cfg.n_list, l, &valid)?,
                        None => cert.theorem_4_2(&f, &base, &cfg.n_list, &valid)?,
                    };
                    report.failed |= !c.passed;
                    let mut pts = c.points.iter();
                    for &n in &cfg.n_list {
                        let q = base.with_n(n)?;
                        for &x in &xs {
                            let pt = if x >= min { pts.next() } else { None };
                            report.push(point_row(&q, lambda, x, pt, min));
                        }
                    }
                    for s in &c.sweep {
                        let mut row = vec![id.clone(), "sweep".into()];
                        row.extend(param_cells(&base.with_n(s.n)?));
                        row.extend([
                            lambda.into(),
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            s.value.into(),
                            c.passed.into(),
                            "ok".into(),
                        ]);
                        report.push(row);
                    }
                }
            }
        }
        TheoremId::Korovkin3_3 => {
            let count = cfg.tol("korovkin-points") as usize;
            for base in cfg.param_combos(&cfg.n_list[..1])? {
                let c = cert.korovkin(&base, &cfg.n_list, cfg.x_max, count)?;
                report.failed |= !c.passed;
                for pt in &c.points {
                    let mut row = vec![id.clone(), "sweep".into()];
                    row.extend(param_cells(&base.with_n(pt.n)?));
                    row.extend([
                        Cell::Empty,
                        pt.x.into(),
                        pt.observed.into(),
                        pt.bound.into(),
                        pt.margin.into(),
                        Cell::Empty,
                        c.passed.into(),
                        "ok".into(),
                    ]);
                    report.push(row);
                }
            }
        }
    }
    Ok(report)
}

pub fn run_converge(cfg: &SweepConfig) -> Result<Report> {
    let mut report = Report::new([
        "n",
        "a",
        "alpha",
        "beta",
        "points",
        "skipped",
        "sup_error",
        "weighted_error",
        "korovkin_e1",
        "trend_ok",
        "status",
    ]);
    let ev = cfg.evaluator()?;
    let f = cfg.function();
    let xs = cfg.x_grid.points();
    let slack = cfg.tol("slack");
    let floor = cfg.tol("margin");
    for base in cfg.param_combos(&cfg.n_list[..1])? {
        let mut prev: Option<f64> = None;
        for &n in &cfg.n_list {
            let p = base.with_n(n)?;
            let min = domain_min_x(&p, CenterMap::Kantorovich);
            let valid = split_domain(&xs, min);
            let mut row = param_cells(&p);
            row.push(valid.len().into());
            row.push((xs.len() - valid.len()).into());
            if valid.is_empty() {
                row.extend([
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    skip_reason(min).into(),
                ]);
                report.push(row);
                continue;
            }
            let errors: Vec<(f64, f64)> = valid
                .par_iter()
                .map(|&x| {
                    let fx = f.eval(x)?;
                    let err = (ev.kantorovich(&f, x, &p, CenterMap::Kantorovich)? - fx).abs();
                    Ok((err, err / (1.0 + x * x)))
                })
                .collect::<Result<_>>()?;
            let sup = errors.iter().map(|e| e.0).fold(0.0, f64::max);
            let weighted = errors.iter().map(|e| e.1).fold(0.0, f64::max);
            let korovkin = valid.iter().try_fold(0.0f64, |acc, &x| {
                Ok::<_, Error>(acc.max(central_moment_closed(1, x, &p)?.abs() / (1.0 + x * x)))
            })?;
            let trend_ok = prev.is_none_or(|q| sup <= (1.0 + slack) * q || sup <= floor);
            report.failed |= !trend_ok;
            prev = Some(sup);
            row.extend([
                sup.into(),
                weighted.into(),
                korovkin.into(),
                trend_ok.into(),
                "ok".into(),
            ]);
            report.push(row);
        }
    }
    Ok(report)
}

pub fn run_compare(cfg: &SweepConfig) -> Result<Report> {
    let mut report = Report::new([
        "n",
        "a",
        "alpha",
        "beta",
        "x",
        "f",
        "L",
        "Lstar",
        "T",
        "K",
        "err_L",
        "err_Lstar",
        "err_T",
        "err_K",
        "reduction_diff",
        "large_a_charlier",
        "large_a_classical",
        "large_a_diff",
        "status",
    ]);
    let ev = cfg.evaluator()?;
    let f = cfg.function();
    let xs = cfg.x_grid.points();
    let big_a = cfg.tol("large-a");
    let reduction_tol = cfg.tol("reduction");
    for p in cfg.param_combos(&cfg.n_list)? {
        let plain = OperatorParams::new(p.n, p.a, 0.0, 0.0)?;
        let min = domain_min_x(&p, CenterMap::Kantorovich).max(domain_min_x(&p, CenterMap::Szasz));
        let rows: Vec<(Vec<Cell>, bool)> = xs
            .par_iter()
            .map(|&x| {
                let mut row = param_cells(&p);
                row.push(x.into());
                if x < min {
                    row.extend(std::iter::repeat_n(Cell::Empty, 13));
                    row.push(skip_reason(min).into());
                    return Ok((row, true));
                }
                let fx = f.eval(x)?;
                let l = apply_discrete(&f, x, &plain, CenterMap::Identity)?;
                let lstar = charlier_kantorovich_szasz(&ev, &f, x, p.n, p.a)?;
                let t = ev.discrete(&f, x, &p, CenterMap::Szasz)?;
                let k = ev.kantorovich(&f, x, &p, CenterMap::Kantorovich)?;
                let reduced = ev.kantorovich(&f, x, &plain, CenterMap::Identity)?;
                let diff = (reduced - lstar).abs();
                let ok = diff <= reduction_tol * lstar.abs().max(1.0);
                let large = large_a_diagnostic(&ev, &f, x, p.n, big_a).ok();
                row.extend([
                    fx.into(),
                    l.into(),
                    lstar.into(),
                    t.into(),
                    k.into(),
                    (l - fx).abs().into(),
                    (lstar - fx).abs().into(),
                    (t - fx).abs().into(),
                    (k - fx).abs().into(),
                    diff.into(),
                    large.map(|v| v.0).into(),
                    large.map(|v| v.1).into(),
                    large.map(|v| (v.0 - v.1).abs()).into(),
                    "ok".into(),
                ]);
                Ok((row, ok))
            })
            .collect::<Result<_>>()?;
        for (row, ok) in rows {
            report.failed |= !ok;
            report.push(row);
        }
    }
    Ok(report)
}

pub fn run(cfg: &SweepConfig) -> Result<Report> {
    let mut report = match cfg.command {
        CommandKind::Weights => run_weights(cfg),
        CommandKind::Moments => run_moments(cfg),
        CommandKind::Certify => run_certify(cfg),
        CommandKind::Converge => run_converge(cfg),
        CommandKind::Compare => run_compare(cfg),
    }?;
    report.config = cfg.echo.clone();
    Ok(report)
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::TruncationFailure { .. } => 3,
        _ => 2,
    }
}

fn resolve(cli: &Cli) -> Result<SweepConfig> {
    let file = match &cli.config {
        Some(path) => parse_config_text(&read_config(path)?)?,
        None => BTreeMap::new(),
    };
    let (kind, opts) = match &cli.command {
        Command::Weights(o) => (CommandKind::Weights, o),
        Command::Moments(o) => (CommandKind::Moments, o),
        Command::Certify(o) => (CommandKind::Certify, o),
        Command::Converge(o) => (CommandKind::Converge, o),
        Command::Compare(o) => (CommandKind::Compare, o),
    };
    SweepConfig::resolve(kind, &file, opts)
}

fn read_config(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = resolve(cli)?;
    let report = run(&cfg)?;
    match &cfg.output {
        Some(path) => {
            let mut buf = Vec::new();
            report.write(cfg.format, &mut buf)?;
            fs::write(path, buf)?;
        }
        None => report.write(cfg.format, std::io::stdout().lock())?,
    }
    Ok(!report.failed)
}

/// Entry point for the `opk` binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("opk: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
