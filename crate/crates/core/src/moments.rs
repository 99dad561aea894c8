//! Closed-form moments of the weight law and of `K_{n,a}`, next to their
//! series counterparts.

use crate::charlier;
use crate::operators::{scaled_center, CenterMap, Evaluator, OperatorParams};
use crate::{CompensatedSum, Error, Result};
use serde::Serialize;

/// Closed form of `sum_k k^j p_k` for the weight law with exponent `m`.
///
/// With `N = m/(a-1)` and `c = 1/(a-1)` the weights are Poisson(1) plus a
/// negative binomial of mean `N` and variance `N(1+c)`; the moments below are
/// assembled from the cumulants of that sum.
pub fn weight_moment_closed(j: u32, m: f64, a: f64) -> Result<f64> {
    if !(m >= 0.0) || !(a > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need m >= 0 and a > 1, got m = {m}, a = {a}"
        )));
    }
    let c = 1.0 / (a - 1.0);
    let n = m * c;
    let value = match j {
        0 => 1.0,
        1 => 1.0 + n,
        2 => 2.0 + (3.0 + c) * n + n * n,
        3 => 5.0 + (10.0 + 6.0 * c + 2.0 * c * c) * n + (6.0 + 3.0 * c) * n * n + n.powi(3),
        4 => {
            15.0 + (37.0 + 31.0 * c + 20.0 * c * c + 6.0 * c.powi(3)) * n
                + (31.0 + 30.0 * c + 11.0 * c * c) * n * n
                + (10.0 + 6.0 * c) * n.powi(3)
                + n.powi(4)
        }
        _ => return Err(Error::UnsupportedOrder(j)),
    };
    Ok(value)
}

/// Quantities shared by the closed-form moments of `K_{n,a}` at one `x`.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    x: f64,
    /// `n + β`
    scale: f64,
    c: f64,
    /// `sqrt(D)`, the square root of the `r*` radicand.
    sqrt_d: f64,
    /// `D - 4(n+β)²x² = 8/3 + 4α + (8 + 4α)c + c²`.
    excess: f64,
}

impl Geometry {
    fn new(x: f64, p: &OperatorParams) -> Result<Self> {
        // validates the domain and gives N = n r*(x)
        let nr = scaled_center(x, p, CenterMap::Kantorovich)?;
        let c = p.c();
        let alpha = p.alpha;
        let b = 4.0 + 2.0 * alpha + c;
        Ok(Self {
            x,
            scale: p.scale(),
            c,
            sqrt_d: 2.0 * nr + b,
            excess: 8.0 / 3.0 + 4.0 * alpha + (8.0 + 4.0 * alpha) * c + c * c,
        })
    }

    /// `sqrt(D) + 2(n+β)x`
    fn denom(&self) -> f64 {
        self.sqrt_d + 2.0 * self.scale * self.x
    }

    fn raw1(&self) -> f64 {
        (self.sqrt_d - (1.0 + self.c)) / (2.0 * self.scale)
    }

    /// `K(t - x; x)` as a single quotient; the numerator is bounded away from
    /// zero on the whole domain.
    fn central1(&self) -> f64 {
        let d = self.denom();
        (self.excess - (1.0 + self.c) * d) / (2.0 * self.scale * d)
    }

    fn central2(&self) -> f64 {
        let d = self.denom();
        self.x * ((1.0 + self.c) * d - self.excess) / (self.scale * d)
    }
}

fn check_order(i: u32) -> Result<()> {
    if i > 2 {
        return Err(Error::UnsupportedOrder(i));
    }
    Ok(())
}

/// `K_{n,a}(t^i; x)` for `i = 0, 1, 2`.
pub fn raw_moment_closed(i: u32, x: f64, p: &OperatorParams) -> Result<f64> {
    check_order(i)?;
    let g = Geometry::new(x, p)?;
    Ok(match i {
        0 => 1.0,
        1 => g.raw1(),
        _ => x * x,
    })
}

/// `K_{n,a}((t - x)^i; x)` for `i = 0, 1, 2`.
pub fn central_moment_closed(i: u32, x: f64, p: &OperatorParams) -> Result<f64> {
    check_order(i)?;
    let g = Geometry::new(x, p)?;
    Ok(match i {
        0 => 1.0,
        1 => g.central1(),
        _ => g.central2(),
    })
}

/// `δ_{n,a}^{α,β}(x) = sqrt(K((t - x)²; x))`.
pub fn delta(x: f64, p: &OperatorParams) -> Result<f64> {
    Ok(central_moment_closed(2, x, p)?.sqrt())
}

pub fn moment_series(i: u32, x: f64, p: &OperatorParams, central: bool) -> Result<f64> {
    moment_series_with(&Evaluator::default(), i, x, p, central)
}

/// Series value of `K(t^i; x)` (or `K((t-x)^i; x)`) from the truncated weight
/// law, with the cell integrals of the monomials done symbolically.
pub fn moment_series_with(
    ev: &Evaluator,
    i: u32,
    x: f64,
    p: &OperatorParams,
    central: bool,
) -> Result<f64> {
    check_order(i)?;
    let w = ev.weights(x, p, CenterMap::Kantorovich)?;
    let scale = p.scale();
    let mut acc = CompensatedSum::new();
    for (k, pk) in w.iter() {
        let u = k as f64 + p.alpha;
        // (n+β) ∫ over [u/(n+β), (u+1)/(n+β)]
        let cell = if central {
            let lo = u / scale - x;
            let hi = (u + 1.0) / scale - x;
            match i {
                0 => 1.0,
                1 => 0.5 * (lo + hi),
                _ => (lo * lo + lo * hi + hi * hi) / 3.0,
            }
        } else {
            match i {
                0 => 1.0,
                1 => (2.0 * u + 1.0) / (2.0 * scale),
                _ => (3.0 * u * u + 3.0 * u + 1.0) / (3.0 * scale * scale),
            }
        };
        acc.add(pk * cell);
    }
    Ok(acc.value())
}

/// Closed-form against series moments at one point.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub params: OperatorParams,
    pub x: f64,
    pub raw_closed: [f64; 3],
    pub raw_series: [f64; 3],
    pub central_closed: [f64; 3],
    pub central_series: [f64; 3],
    pub max_rel_err: f64,
}

pub fn moment_report(x: f64, p: &OperatorParams) -> Result<MomentReport> {
    moment_report_with(&Evaluator::default(), x, p)
}

pub fn moment_report_with(ev: &Evaluator, x: f64, p: &OperatorParams) -> Result<MomentReport> {
    let mut report = MomentReport {
        params: *p,
        x,
        raw_closed: [0.0; 3],
        raw_series: [0.0; 3],
        central_closed: [0.0; 3],
        central_series: [0.0; 3],
        max_rel_err: 0.0,
    };
    for i in 0..3u32 {
        let idx = i as usize;
        report.raw_closed[idx] = raw_moment_closed(i, x, p)?;
        report.raw_series[idx] = moment_series_with(ev, i, x, p, false)?;
        report.central_closed[idx] = central_moment_closed(i, x, p)?;
        report.central_series[idx] = moment_series_with(ev, i, x, p, true)?;
    }
    let pairs = report
        .raw_closed
        .iter()
        .zip(&report.raw_series)
        .chain(report.central_closed.iter().zip(&report.central_series));
    report.max_rel_err = pairs
        .map(|(&closed, &series)| (series - closed).abs() / closed.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(report)
}

/// Series moment `sum_k k^j p_k` of a freshly built weight law, for
/// comparison with [`weight_moment_closed`].
pub fn weight_moment_series(j: u32, m: f64, a: f64, tail_tol: f64) -> Result<f64> {
    Ok(charlier::weight_sequence(m, a, tail_tol, None)?.moment(j))
}
