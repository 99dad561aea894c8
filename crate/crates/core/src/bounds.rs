//! Moduli of continuity and smoothness, and certificates for the
//! approximation-error bounds of `K_{n,a}`.
//!
//! Grid moduli are lower estimates of the true suprema. A certificate built
//! on one is marked non-rigorous; the library functions carry analytic moduli
//! so their certificates are rigorous.
//!
//! Bounds with explicit constants pass when `bound - observed >= -1e-12` at
//! every grid point. The direct estimates with unspecified constants
//! (Ditzian–Totik and the `ω₂`/`ω` estimate) are certified by ratio
//! boundedness along an increasing-`n` sweep instead.

use crate::moments::{central_moment_closed, raw_moment_closed};
use crate::operators::{domain_min_x, CenterMap, Evaluator, OperatorParams, TestFunction};
use crate::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn grid(&self, step: f64) -> impl Iterator<Item = f64> + '_ {
        let count = ((self.hi - self.lo) / step + 1e-9).floor() as usize;
        (0..=count).map(move |i| self.lo + i as f64 * step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModulusKind {
    /// `ω(f; δ)`
    Omega,
    /// `ω₁`, the modulus of continuity of `f'`
    Omega1,
    /// `ω₂(f; δ)`
    Omega2,
    /// `ω²_{φ^λ}(f; δ)` with `φ(x) = sqrt(x)`
    DitzianTotik { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub kind: ModulusKind,
    pub delta: f64,
    pub value: f64,
    /// Zero when the value came from an analytic modulus.
    pub grid_step: f64,
    pub is_lower_estimate: bool,
}

fn effective_step(delta: f64, step: f64) -> f64 {
    step.min(delta / 8.0)
}

/// `sup |f(t) - f(y)|` over grid pairs with `|t - y| <= delta`.
pub fn grid_modulus(f: &TestFunction, delta: f64, domain: Interval, step: f64) -> f64 {
    let step = effective_step(delta, step);
    let values: Vec<f64> = domain.grid(step).map(|t| f.value(t)).collect();
    let width = (delta / step + 1e-9).floor() as usize;
    let mut best = 0.0f64;
    for i in 0..values.len() {
        for j in (i + 1)..values.len().min(i + width + 1) {
            best = best.max((values[j] - values[i]).abs());
        }
    }
    best
}

/// Step sizes `h` in `(0, delta]` scanned by the second-order moduli.
fn h_grid(delta: f64, step: f64) -> Vec<f64> {
    let count = (delta / step + 1e-9).floor() as usize;
    let mut hs: Vec<f64> = (1..=count).map(|j| j as f64 * step).collect();
    if hs.last().is_none_or(|&h| h < delta) {
        hs.push(delta);
    }
    hs
}

/// `sup_{0<h<=delta} sup_x |f(x-h) - 2f(x) + f(x+h)|` over grid centers `x`
/// with `x - h` inside the domain.
pub fn grid_second_modulus(f: &TestFunction, delta: f64, domain: Interval, step: f64) -> f64 {
    let step = effective_step(delta, step);
    let hs = h_grid(delta, step);
    let mut best = 0.0f64;
    for x in domain.grid(step) {
        let fx = f.value(x);
        for &h in &hs {
            if x - h < domain.lo {
                break;
            }
            best = best.max((f.value(x - h) - 2.0 * fx + f.value(x + h)).abs());
        }
    }
    best
}

/// `ω(f; δ)`: the analytic modulus when `f` carries one, otherwise a grid
/// lower estimate.
pub fn modulus_estimate(
    f: &TestFunction,
    delta: f64,
    domain: Interval,
    step: f64,
) -> ModulusEstimate {
    match f.analytic_modulus(delta) {
        Some(value) => ModulusEstimate {
            kind: ModulusKind::Omega,
            delta,
            value,
            grid_step: 0.0,
            is_lower_estimate: false,
        },
        None => ModulusEstimate {
            kind: ModulusKind::Omega,
            delta,
            value: grid_modulus(f, delta, domain, step),
            grid_step: effective_step(delta, step),
            is_lower_estimate: true,
        },
    }
}

pub fn second_modulus_estimate(
    f: &TestFunction,
    delta: f64,
    domain: Interval,
    step: f64,
) -> ModulusEstimate {
    match f.analytic_second_modulus(delta) {
        Some(value) => ModulusEstimate {
            kind: ModulusKind::Omega2,
            delta,
            value,
            grid_step: 0.0,
            is_lower_estimate: false,
        },
        None => ModulusEstimate {
            kind: ModulusKind::Omega2,
            delta,
            value: grid_second_modulus(f, delta, domain, step),
            grid_step: effective_step(delta, step),
            is_lower_estimate: true,
        },
    }
}

/// Grid estimate of the Ditzian–Totik modulus
/// `sup_{0<h<=δ} sup_x |f(x - hφ^λ(x)) - 2f(x) + f(x + hφ^λ(x))|`, `φ(x) = sqrt(x)`,
/// over centers whose left point stays inside the domain.
pub fn dt_modulus_estimate(
    f: &TestFunction,
    delta: f64,
    lambda: f64,
    domain: Interval,
    step: f64,
) -> Result<ModulusEstimate> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} must lie in [0, 1]"
        )));
    }
    let step = effective_step(delta, step);
    let hs = h_grid(delta, step);
    let mut best = 0.0f64;
    for x in domain.grid(step) {
        let fx = f.value(x);
        let phi = if lambda == 0.0 {
            1.0
        } else {
            x.powf(0.5 * lambda)
        };
        for &h in &hs {
            let s = h * phi;
            if x - s < domain.lo {
                break;
            }
            best = best.max((f.value(x - s) - 2.0 * fx + f.value(x + s)).abs());
        }
    }
    Ok(ModulusEstimate {
        kind: ModulusKind::DitzianTotik { lambda },
        delta,
        value: best,
        grid_step: step,
        is_lower_estimate: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremId {
    /// `|Kf - f| <= 2 ω(f; δ)`
    T3_1,
    /// first-derivative estimate with `ω₁((n+β)^{-1})`
    T3_2,
    /// Ditzian–Totik direct estimate
    T4_1,
    /// `ω₂` / `ω` estimate via the auxiliary operator
    T4_2,
    /// `Lip*` class estimate
    T4_3,
    /// comparison of `δ_{n,a}^{α,β}` against the `L*_n` rate
    RemarkCompare,
    /// weighted Korovkin convergence
    Korovkin3_3,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TheoremId::T3_1 => "3.1",
            TheoremId::T3_2 => "3.2",
            TheoremId::T4_1 => "4.1",
            TheoremId::T4_2 => "4.2",
            TheoremId::T4_3 => "4.3",
            TheoremId::RemarkCompare => "remark",
            TheoremId::Korovkin3_3 => "3.3",
        };
        f.write_str(s)
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "3.1" => Ok(TheoremId::T3_1),
            "3.2" => Ok(TheoremId::T3_2),
            "3.3" | "korovkin" => Ok(TheoremId::Korovkin3_3),
            "4.1" => Ok(TheoremId::T4_1),
            "4.2" => Ok(TheoremId::T4_2),
            "4.3" => Ok(TheoremId::T4_3),
            "remark" => Ok(TheoremId::RemarkCompare),
            other => Err(Error::Config(format!("unknown theorem id `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificatePoint {
    pub n: u32,
    pub x: f64,
    pub observed: f64,
    pub bound: f64,
    /// `bound - observed`
    pub margin: f64,
    /// `observed / bound` for the constant-free certificates.
    pub ratio: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepStep {
    pub n: u32,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub theorem: TheoremId,
    pub params: OperatorParams,
    pub points: Vec<CertificatePoint>,
    /// Per-`n` summary for sweep certificates (max ratio, or Korovkin norm).
    pub sweep: Vec<SweepStep>,
    pub passed: bool,
    /// False when any bound used a grid (lower) modulus estimate.
    pub rigorous: bool,
    pub notes: Vec<String>,
}

impl BoundCertificate {
    pub fn min_margin(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn x_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
}

/// Which right-hand side to use for the first-derivative estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DerivativeBound {
    /// `ω₁((n+β)^{-1}) δ (1 + sqrt(n+β) δ)` exactly as stated.
    #[default]
    AsStated,
    /// `|f'(x)| |K(t-x;x)| + ω₁((n+β)^{-1}) δ (1 + (n+β) δ)`: the first-order
    /// drift term is kept and `δ_n = (n+β)^{-1}` is substituted into
    /// `1 + δ/δ_n`. This form is a valid upper bound for every `C¹` function.
    WithDrift,
}

/// Settings shared by every certificate.
#[derive(Debug, Clone)]
pub struct Certifier {
    pub evaluator: Evaluator,
    /// Margin below which a point fails (`margin >= -margin_tol` passes).
    pub margin_tol: f64,
    /// Allowed growth of the max ratio between consecutive `n`.
    pub slack: f64,
    /// Grid moduli are taken over `[0, max(x_grid) + domain_pad]`.
    pub domain_pad: f64,
    /// Grid step as a fraction of `δ`.
    pub step_fraction: f64,
}

impl Default for Certifier {
    fn default() -> Self {
        Self {
            evaluator: Evaluator::default(),
            margin_tol: 1e-12,
            slack: 0.10,
            domain_pad: 1.0,
            step_fraction: 0.125,
        }
    }
}

fn check_grid(x_grid: &[f64], p: &OperatorParams) -> Result<()> {
    if x_grid.is_empty() {
        return Err(Error::InvalidParameter("empty x grid".into()));
    }
    let min = domain_min_x(p, CenterMap::Kantorovich);
    match x_grid.iter().find(|&&x| !(x >= min) || !x.is_finite()) {
        Some(&x) => Err(Error::OutOfDomain { x, min }),
        None => Ok(()),
    }
}

fn sweep_params(p: &OperatorParams, n_list: &[u32]) -> Result<Vec<OperatorParams>> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty n sweep".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "n sweep must be strictly increasing".into(),
        ));
    }
    n_list.iter().map(|&n| p.with_n(n)).collect()
}

/// `max_n` ratios must not grow by more than `slack` from one `n` to the next.
fn ratios_bounded(sweep: &[SweepStep], slack: f64) -> bool {
    sweep
        .windows(2)
        .all(|w| w[1].value <= (1.0 + slack) * w[0].value)
}

/// `K̂(f; x) = K(f; x) + f(x) - f(K(t; x))`; fixes constants and makes the
/// first central moment vanish.
pub fn auxiliary_operator(f: &TestFunction, x: f64, p: &OperatorParams) -> Result<f64> {
    auxiliary_operator_with(&Evaluator::default(), f, x, p)
}

pub fn auxiliary_operator_with(
    ev: &Evaluator,
    f: &TestFunction,
    x: f64,
    p: &OperatorParams,
) -> Result<f64> {
    let k = ev.kantorovich(f, x, p, CenterMap::Kantorovich)?;
    let shift = raw_moment_closed(1, x, p)?;
    Ok(k + f.eval(x)? - f.eval(shift)?)
}

/// `sup_x |K(t^i; x) - x^i| / (1 + x²)` over `x_grid`, from the closed forms.
pub fn korovkin_rho_norm(i: u32, p: &OperatorParams, x_grid: &[f64]) -> Result<f64> {
    if i > 2 {
        return Err(Error::UnsupportedOrder(i));
    }
    check_grid(x_grid, p)?;
    if i != 1 {
        return Ok(0.0);
    }
    x_grid.iter().try_fold(0.0f64, |best, &x| {
        Ok(best.max(central_moment_closed(1, x, p)?.abs() / (1.0 + x * x)))
    })
}

/// Geometric grid of `count` points from the domain minimum up to `x_max`,
/// dense where `|K(t;x) - x| / (1 + x²)` peaks.
pub fn korovkin_grid(p: &OperatorParams, x_max: f64, count: usize) -> Vec<f64> {
    let lo = domain_min_x(p, CenterMap::Kantorovich);
    let count = count.max(2);
    let ratio = (x_max / lo).powf(1.0 / (count - 1) as f64);
    (0..count)
        .map(|i| {
            if i + 1 == count {
                x_max
            } else {
                lo * ratio.powi(i as i32)
            }
        })
        .collect()
}

impl Certifier {
    fn modulus_domain(&self, x_grid: &[f64]) -> Interval {
        let hi = x_grid.iter().copied().fold(0.0, f64::max) + self.domain_pad;
        Interval::new(0.0, hi)
    }

    fn point(&self, n: u32, x: f64, observed: f64, bound: f64) -> CertificatePoint {
        let margin = bound - observed;
        CertificatePoint {
            n,
            x,
            observed,
            bound,
            margin,
            ratio: None,
            passed: margin >= -self.margin_tol,
        }
    }

    fn error_at(&self, f: &TestFunction, x: f64, p: &OperatorParams) -> Result<f64> {
        Ok((self
            .evaluator
            .kantorovich(f, x, p, CenterMap::Kantorovich)?
            - f.eval(x)?)
        .abs())
    }

    /// `|K(f;x) - f(x)| <= 2 ω(f; δ_{n,a}^{α,β}(x))`.
    pub fn theorem_3_1(
        &self,
        f: &TestFunction,
        p: &OperatorParams,
        x_grid: &[f64],
    ) -> Result<BoundCertificate> {
        check_grid(x_grid, p)?;
        let domain = self.modulus_domain(x_grid);
        let rows: Vec<(CertificatePoint, bool)> = x_grid
            .par_iter()
            .map(|&x| {
                let observed = self.error_at(f, x, p)?;
                let delta = central_moment_closed(2, x, p)?.sqrt();
                let omega = modulus_estimate(f, delta, domain, delta * self.step_fraction);
                Ok((
                    self.point(p.n, x, observed, 2.0 * omega.value),
                    omega.is_lower_estimate,
                ))
            })
            .collect::<Result<_>>()?;
        let rigorous = rows.iter().all(|(_, lower)| !lower);
        let points: Vec<_> = rows.into_iter().map(|(pt, _)| pt).collect();
        let mut notes = Vec::new();
        if !rigorous {
            notes.push(format!(
                "ω({}) estimated on a grid over [0, {}]; lower estimate",
                f.name(),
                domain.hi
            ));
        }
        Ok(BoundCertificate {
            theorem: TheoremId::T3_1,
            params: *p,
            passed: points.iter().all(|pt| pt.passed),
            points,
            sweep: Vec::new(),
            rigorous,
            notes,
        })
    }

    /// Strict comparison `δ_{n,a}^{α,β}(x) < sqrt(x(1 + 1/(a-1))/n + 10/(3n²))`.
    pub fn remark(&self, p: &OperatorParams, x_grid: &[f64]) -> Result<BoundCertificate> {
        check_grid(x_grid, p)?;
        let n = p.n_f64();
        let points = x_grid
            .iter()
            .map(|&x| {
                let ours = central_moment_closed(2, x, p)?.sqrt();
                let reference = (x * (1.0 + p.c()) / n + 10.0 / (3.0 * n * n)).sqrt();
                let mut pt = self.point(p.n, x, ours, reference);
                pt.passed = ours < reference;
                Ok(pt)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundCertificate {
            theorem: TheoremId::RemarkCompare,
            params: *p,
            passed: points.iter().all(|pt| pt.passed),
            points,
            sweep: Vec::new(),
            rigorous: true,
            notes: vec!["observed = δ of K, bound = δ of L*_n; strict inequality required".into()],
        })
    }

    /// First-derivative estimate with `δ_n = (n+β)^{-1}`.
    ///
    /// When `ω₁ = 0` (affine `f`) the stated right-hand side vanishes while
    /// `K f - f = f'(x) K(t - x; x)` does not; such points are compared
    /// against that exact drift and flagged in the notes.
    pub fn theorem_3_2(
        &self,
        f: &TestFunction,
        fprime: &TestFunction,
        p: &OperatorParams,
        x_grid: &[f64],
        form: DerivativeBound,
    ) -> Result<BoundCertificate> {
        check_grid(x_grid, p)?;
        let domain = self.modulus_domain(x_grid);
        let scale = p.scale();
        let delta_n = 1.0 / scale;
        let mut omega1 = modulus_estimate(fprime, delta_n, domain, delta_n * self.step_fraction);
        omega1.kind = ModulusKind::Omega1;
        let rows: Vec<(CertificatePoint, bool)> = x_grid
            .par_iter()
            .map(|&x| {
                let observed = self.error_at(f, x, p)?;
                let delta = central_moment_closed(2, x, p)?.sqrt();
                let drift = (fprime.eval(x)? * central_moment_closed(1, x, p)?).abs();
                let (bound, boundary) = match form {
                    DerivativeBound::AsStated if omega1.value == 0.0 => (drift, true),
                    DerivativeBound::AsStated => {
                        (omega1.value * delta * (1.0 + scale.sqrt() * delta), false)
                    }
                    DerivativeBound::WithDrift => {
                        (drift + omega1.value * delta * (1.0 + scale * delta), false)
                    }
                };
                Ok((self.point(p.n, x, observed, bound), boundary))
            })
            .collect::<Result<_>>()?;
        let mut notes = vec![format!(
            "form = {form:?}, ω₁((n+β)^-1) = {:e}",
            omega1.value
        )];
        if rows.iter().any(|(_, boundary)| *boundary) {
            notes.push(
                "ω₁ = 0: boundary case, compared against the exact drift |f'(x) K(t-x;x)|".into(),
            );
        }
        if omega1.is_lower_estimate {
            notes.push(format!(
                "ω₁ of {} estimated on a grid; lower estimate",
                fprime.name()
            ));
        }
        let points: Vec<_> = rows.into_iter().map(|(pt, _)| pt).collect();
        Ok(BoundCertificate {
            theorem: TheoremId::T3_2,
            params: *p,
            passed: points.iter().all(|pt| pt.passed),
            points,
            sweep: Vec::new(),
            rigorous: !omega1.is_lower_estimate,
            notes,
        })
    }

    /// Weighted Korovkin test: the `e₁` norm must decrease strictly along the
    /// sweep. `e₀` and `e₂` are reproduced exactly by construction.
    pub fn korovkin(
        &self,
        p: &OperatorParams,
        n_list: &[u32],
        x_max: f64,
        count: usize,
    ) -> Result<BoundCertificate> {
        let sweep_p = sweep_params(p, n_list)?;
        let mut sweep = Vec::with_capacity(sweep_p.len());
        let mut points = Vec::new();
        for q in &sweep_p {
            let grid = korovkin_grid(q, x_max, count);
            let norm = korovkin_rho_norm(1, q, &grid)?;
            for i in [0u32, 2] {
                debug_assert_eq!(korovkin_rho_norm(i, q, &grid)?, 0.0);
            }
            // |K(t;x) - x| <= (1 + c) / (2(n+β)) for every x, so the part of
            // the sup beyond x_max is at most that over 1 + x_max².
            let tail = (1.0 + q.c()) / (2.0 * q.scale() * (1.0 + x_max * x_max));
            points.push(CertificatePoint {
                n: q.n,
                x: x_max,
                observed: norm,
                bound: norm.max(tail),
                margin: 0.0,
                ratio: None,
                passed: tail <= norm,
            });
            sweep.push(SweepStep {
                n: q.n,
                value: norm,
            });
        }
        let decreasing = sweep.windows(2).all(|w| w[1].value < w[0].value);
        let notes = vec![
            format!("sup over a {count}-point geometric grid on [domain_min_x, {x_max}]"),
            format!(
                "tail beyond x_max bounded by (1 + 1/(a-1)) / (2(n+β)(1 + x_max²)) <= {:e}",
                points[0].bound
            ),
        ];
        Ok(BoundCertificate {
            theorem: TheoremId::Korovkin3_3,
            params: *p,
            passed: decreasing && points.iter().all(|pt| pt.passed),
            points,
            sweep,
            rigorous: true,
            notes,
        })
    }

    /// Ratio row with a rounding floor `margin_tol * max(1, |f(x)|)`: an
    /// observed error below it counts as zero, and so does a modulus below it.
    fn ratio_point(
        &self,
        n: u32,
        x: f64,
        observed: f64,
        modulus: f64,
        fx: f64,
    ) -> CertificatePoint {
        let floor = self.margin_tol * fx.abs().max(1.0);
        let resolved = modulus > floor;
        let ratio = match (observed <= floor, resolved) {
            (true, _) => Some(0.0),
            (false, true) => Some(observed / modulus),
            (false, false) => None,
        };
        CertificatePoint {
            n,
            x,
            observed,
            bound: modulus,
            margin: modulus - observed,
            ratio,
            passed: ratio.is_some(),
        }
    }

    fn sweep_certificate(
        &self,
        theorem: TheoremId,
        p: &OperatorParams,
        points: Vec<CertificatePoint>,
        n_list: &[u32],
        mut notes: Vec<String>,
    ) -> BoundCertificate {
        let sweep: Vec<SweepStep> = n_list
            .iter()
            .map(|&n| SweepStep {
                n,
                value: points
                    .iter()
                    .filter(|pt| pt.n == n)
                    .filter_map(|pt| pt.ratio)
                    .fold(0.0, f64::max),
            })
            .collect();
        let bounded = ratios_bounded(&sweep, self.slack);
        let guards = points.iter().all(|pt| pt.passed);
        notes.push(format!(
            "max ratio may grow by at most {}% between consecutive n",
            self.slack * 100.0
        ));
        BoundCertificate {
            theorem,
            params: *p,
            points,
            sweep,
            passed: bounded && guards,
            rigorous: false,
            notes,
        }
    }

    /// Ditzian–Totik direct estimate, certified by boundedness of
    /// `|Kf - f| / ω²_{φ^λ}(f, (n+β)^{-1/2} φ(x)^{1-λ})` along `n_list`.
    pub fn theorem_4_1(
        &self,
        f: &TestFunction,
        p: &OperatorParams,
        n_list: &[u32],
        lambda: f64,
        x_grid: &[f64],
    ) -> Result<BoundCertificate> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} must lie in [0, 1]"
            )));
        }
        let sweep_p = sweep_params(p, n_list)?;
        check_grid(x_grid, &sweep_p[0])?;
        let domain = self.modulus_domain(x_grid);
        let mut points = Vec::with_capacity(sweep_p.len() * x_grid.len());
        for q in &sweep_p {
            let rows: Vec<CertificatePoint> = x_grid
                .par_iter()
                .map(|&x| {
                    let observed = self.error_at(f, x, q)?;
                    let delta = q.scale().powf(-0.5) * x.powf(0.5 * (1.0 - lambda));
                    let dt =
                        dt_modulus_estimate(f, delta, lambda, domain, delta * self.step_fraction)?;
                    Ok(self.ratio_point(q.n, x, observed, dt.value, f.value(x)))
                })
                .collect::<Result<_>>()?;
            points.extend(rows);
        }
        let notes = vec![format!(
            "λ = {lambda}; ω²_φλ estimated on a grid over [0, {}]",
            domain.hi
        )];
        Ok(self.sweep_certificate(TheoremId::T4_1, p, points, n_list, notes))
    }

    /// `ω₂`/`ω` estimate, certified by boundedness of
    /// `(|Kf - f| - ω(f; |Λ|)) / ω₂(f; sqrt(Π))` along `n_list`, where
    /// `Λ = K(t - x; x)` and `Π = K((t-x)²; x) + Λ²`.
    pub fn theorem_4_2(
        &self,
        f: &TestFunction,
        p: &OperatorParams,
        n_list: &[u32],
        x_grid: &[f64],
    ) -> Result<BoundCertificate> {
        let sweep_p = sweep_params(p, n_list)?;
        check_grid(x_grid, &sweep_p[0])?;
        let domain = self.modulus_domain(x_grid);
        let mut points = Vec::with_capacity(sweep_p.len() * x_grid.len());
        let mut lower = false;
        for q in &sweep_p {
            let rows: Vec<(CertificatePoint, bool)> = x_grid
                .par_iter()
                .map(|&x| {
                    let observed = self.error_at(f, x, q)?;
                    let shift = central_moment_closed(1, x, q)?;
                    let pi = central_moment_closed(2, x, q)? + shift * shift;
                    let omega =
                        modulus_estimate(f, shift.abs(), domain, shift.abs() * self.step_fraction);
                    let omega2 = second_modulus_estimate(
                        f,
                        pi.sqrt(),
                        domain,
                        pi.sqrt() * self.step_fraction,
                    );
                    let excess = (observed - omega.value).max(0.0);
                    let pt = self.ratio_point(q.n, x, excess, omega2.value, f.value(x));
                    Ok((pt, omega.is_lower_estimate || omega2.is_lower_estimate))
                })
                .collect::<Result<_>>()?;
            lower |= rows.iter().any(|(_, l)| *l);
            points.extend(rows.into_iter().map(|(pt, _)| pt));
        }
        let mut notes = vec!["observed column holds max(|Kf - f| - ω(f;|Λ|), 0)".to_string()];
        if lower {
            notes.push("some moduli estimated on a grid; lower estimates".into());
        }
        Ok(self.sweep_certificate(TheoremId::T4_2, p, points, n_list, notes))
    }

    /// `Lip*` estimate `|Kf - f| <= M (Θ/x)^{α/2}` with `Θ = K((t-x)²; x)`.
    ///
    /// Membership of `f` in `Lip*_M(α)` is first checked on `pairs` random
    /// pairs from `(0, max(x_grid) + domain_pad]`.
    pub fn theorem_4_3(
        &self,
        f: &TestFunction,
        p: &OperatorParams,
        x_grid: &[f64],
        alpha_lip: f64,
        m_lip: f64,
        pairs: usize,
    ) -> Result<BoundCertificate> {
        if !(alpha_lip > 0.0 && alpha_lip <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz order {alpha_lip} must lie in (0, 1]"
            )));
        }
        check_grid(x_grid, p)?;
        let domain = self.modulus_domain(x_grid);
        verify_lip_star(f, alpha_lip, m_lip, domain.hi, pairs, 0x5EED)?;
        let points = x_grid
            .par_iter()
            .map(|&x| {
                let observed = self.error_at(f, x, p)?;
                let theta = central_moment_closed(2, x, p)?;
                Ok(self.point(p.n, x, observed, m_lip * (theta / x).powf(0.5 * alpha_lip)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundCertificate {
            theorem: TheoremId::T4_3,
            params: *p,
            passed: points.iter().all(|pt| pt.passed),
            points,
            sweep: Vec::new(),
            rigorous: true,
            notes: vec![format!(
                "Lip* order {alpha_lip}, M = {m_lip}; membership checked on {pairs} random pairs in (0, {}]",
                domain.hi
            )],
        })
    }
}

/// Checks `|f(t) - f(x)| <= M |t - x|^α / (t + x)^{α/2}` on `pairs` seeded
/// random pairs in `(0, hi]`.
pub fn verify_lip_star(
    f: &TestFunction,
    alpha: f64,
    m: f64,
    hi: f64,
    pairs: usize,
    seed: u64,
) -> Result<()> {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..pairs {
        let t: f64 = hi * (1.0 - rng.gen::<f64>());
        let x: f64 = hi * (1.0 - rng.gen::<f64>());
        let lhs = (f.value(t) - f.value(x)).abs();
        let rhs = m * (t - x).abs().powf(alpha) / (t + x).powf(0.5 * alpha);
        if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::MembershipViolation {
                name: f.name().to_owned(),
                t,
                x,
            });
        }
    }
    Ok(())
}

pub fn certify_theorem_3_1(
    f: &TestFunction,
    p: &OperatorParams,
    x_grid: &[f64],
) -> Result<BoundCertificate> {
    Certifier::default().theorem_3_1(f, p, x_grid)
}

pub fn certify_remark(p: &OperatorParams, x_grid: &[f64]) -> Result<BoundCertificate> {
    Certifier::default().remark(p, x_grid)
}

pub fn certify_theorem_3_2(
    f: &TestFunction,
    fprime: &TestFunction,
    p: &OperatorParams,
    x_grid: &[f64],
) -> Result<BoundCertificate> {
    Certifier::default().theorem_3_2(f, fprime, p, x_grid, DerivativeBound::AsStated)
}

pub fn certify_theorem_4_1(
    f: &TestFunction,
    p: &OperatorParams,
    n_list: &[u32],
    lambda: f64,
    x_grid: &[f64],
) -> Result<BoundCertificate> {
    Certifier::default().theorem_4_1(f, p, n_list, lambda, x_grid)
}

pub fn certify_theorem_4_2(
    f: &TestFunction,
    p: &OperatorParams,
    n_list: &[u32],
    x_grid: &[f64],
) -> Result<BoundCertificate> {
    Certifier::default().theorem_4_2(f, p, n_list, x_grid)
}

pub fn certify_theorem_4_3(
    f: &TestFunction,
    p: &OperatorParams,
    x_grid: &[f64],
    alpha_lip: f64,
    m_lip: f64,
) -> Result<BoundCertificate> {
    Certifier::default().theorem_4_3(f, p, x_grid, alpha_lip, m_lip, 10_000)
}
