//! Center maps and the Charlier–Szász operator families.
//!
//! All four families share the weight law of [`crate::charlier`] with exponent
//! `m = (a - 1) n rho(x)`, where `rho` is one of the center maps:
//!
//! | family | samples | center map |
//! |---|---|---|
//! | `L_n` | `f(k/n)` | identity |
//! | `L*_n` | `n ∫_{k/n}^{(k+1)/n} f` | identity |
//! | `T_{n,a}` | `f((k+α)/(n+β))` | [`CenterMap::Szasz`], preserves `t²` |
//! | `K_{n,a}` | `(n+β) ∫ f` over `[(k+α)/(n+β), (k+α+1)/(n+β)]` | [`CenterMap::Kantorovich`], preserves `t²` |

use crate::charlier::{self, WeightSeries, DEFAULT_TAIL_TOL};
use crate::quadrature::{GaussLegendre, DEFAULT_ORDER};
use crate::{CompensatedSum, Error, Result};
use std::fmt;
use std::sync::{Arc, OnceLock};

/// `(n, a, alpha, beta)` for one operator instance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OperatorParams {
    pub n: u32,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl OperatorParams {
    pub fn new(n: u32, a: f64, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "operator index n must be >= 1".into(),
            ));
        }
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a = {a} must exceed 1")));
        }
        if !(alpha >= 0.0 && alpha <= beta) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Stancu parameters must satisfy 0 <= alpha <= beta, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { n, a, alpha, beta })
    }

    /// Same `a`, `alpha`, `beta` with a different operator index.
    pub fn with_n(&self, n: u32) -> Result<Self> {
        Self::new(n, self.a, self.alpha, self.beta)
    }

    pub fn n_f64(&self) -> f64 {
        f64::from(self.n)
    }

    /// `n + beta`.
    pub fn scale(&self) -> f64 {
        f64::from(self.n) + self.beta
    }

    /// `1 / (a - 1)`.
    pub fn c(&self) -> f64 {
        1.0 / (self.a - 1.0)
    }
}

impl fmt::Display for OperatorParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} a={} alpha={} beta={}",
            self.n, self.a, self.alpha, self.beta
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum CenterMap {
    Identity,
    /// `r_{n,a}(x; α, β)`, chosen so that the sampling operator keeps `t²`.
    Szasz,
    /// `r*_{n,a}(x; α, β)`, chosen so that the Kantorovich operator keeps `t²`.
    Kantorovich,
}

impl CenterMap {
    /// Linear coefficient `b` and constant `s²` of the quadratic
    /// `N² + b N + s² = (n+β)² x²` solved for `N = n rho(x)`.
    fn quadratic(self, p: &OperatorParams) -> (f64, f64) {
        let (alpha, c) = (p.alpha, p.c());
        match self {
            CenterMap::Szasz => (3.0 + 2.0 * alpha + c, 2.0 + 2.0 * alpha + alpha * alpha),
            CenterMap::Kantorovich => (
                4.0 + 2.0 * alpha + c,
                10.0 / 3.0 + 3.0 * alpha + alpha * alpha,
            ),
            CenterMap::Identity => unreachable!("identity map has no quadratic"),
        }
    }
}

/// Smallest `x` at which the center map is real and nonnegative.
pub fn domain_min_x(p: &OperatorParams, kind: CenterMap) -> f64 {
    match kind {
        CenterMap::Identity => 0.0,
        _ => kind.quadratic(p).1.sqrt() / p.scale(),
    }
}

/// `n rho(x)`, the mean shift of the negative-binomial factor of the weights.
///
/// For the King-type maps this is the positive root of the moment-matching
/// quadratic, evaluated as `2C / (b + sqrt(b² + 4C))` with
/// `C = ((n+β)x - s)((n+β)x + s)` so that neither end of the domain cancels.
pub fn scaled_center(x: f64, p: &OperatorParams, kind: CenterMap) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x = {x} is not finite")));
    }
    if kind == CenterMap::Identity {
        if x < 0.0 {
            return Err(Error::OutOfDomain { x, min: 0.0 });
        }
        return Ok(p.n_f64() * x);
    }
    let (b, s2) = kind.quadratic(p);
    let s = s2.sqrt();
    let y = p.scale() * x;
    let mut c = (y - s) * (y + s);
    if c < 0.0 {
        // x == domain_min_x up to the rounding of sqrt(s²)/(n+β).
        if c >= -8.0 * f64::EPSILON * s2 {
            c = 0.0;
        } else {
            return Err(Error::OutOfDomain {
                x,
                min: domain_min_x(p, kind),
            });
        }
    }
    Ok(2.0 * c / (b + (b * b + 4.0 * c).sqrt()))
}

/// `r_{n,a}(x; α, β)`.
pub fn center_map_r(x: f64, p: &OperatorParams) -> Result<f64> {
    Ok(scaled_center(x, p, CenterMap::Szasz)? / p.n_f64())
}

/// `r*_{n,a}(x; α, β)`.
pub fn center_map_r_star(x: f64, p: &OperatorParams) -> Result<f64> {
    Ok(scaled_center(x, p, CenterMap::Kantorovich)? / p.n_f64())
}

/// Exponent `m = (a - 1) n rho(x)` of the weight law.
pub fn weight_exponent(x: f64, p: &OperatorParams, kind: CenterMap) -> Result<f64> {
    Ok((p.a - 1.0) * scaled_center(x, p, kind)?)
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Growth class of a test function on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Growth {
    Bounded,
    /// `|f(x)| <= M e^{Ax}`.
    Exponential,
}

/// A target function with its evaluation cap and whatever analytic moduli
/// are known for it.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: RealFn,
    domain_hi: f64,
    growth: Growth,
    lipschitz: Option<f64>,
    modulus: Option<RealFn>,
    second_modulus: Option<RealFn>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("domain_hi", &self.domain_hi)
            .field("growth", &self.growth)
            .field("lipschitz", &self.lipschitz)
            .field("modulus", &self.modulus.is_some())
            .field("second_modulus", &self.second_modulus.is_some())
            .finish()
    }
}

impl TestFunction {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            domain_hi: f64::INFINITY,
            growth: Growth::Exponential,
            lipschitz: None,
            modulus: None,
            second_modulus: None,
        }
    }

    pub fn with_domain_hi(mut self, hi: f64) -> Self {
        self.domain_hi = hi;
        self
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_lipschitz(mut self, constant: f64) -> Self {
        self.lipschitz = Some(constant);
        self
    }

    /// Analytic `ω(f; δ)` over `[0, ∞)`.
    pub fn with_modulus<F>(mut self, omega: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.modulus = Some(Arc::new(omega));
        self
    }

    /// Analytic `ω₂(f; δ)` over `[0, ∞)`.
    pub fn with_second_modulus<F>(mut self, omega2: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.second_modulus = Some(Arc::new(omega2));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_hi(&self) -> f64 {
        self.domain_hi
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Analytic modulus of continuity, falling back to `L δ` for a declared
    /// Lipschitz constant.
    pub fn analytic_modulus(&self, delta: f64) -> Option<f64> {
        match (&self.modulus, self.lipschitz) {
            (Some(w), _) => Some(w(delta)),
            (None, Some(l)) => Some(l * delta),
            (None, None) => None,
        }
    }

    pub fn analytic_second_modulus(&self, delta: f64) -> Option<f64> {
        self.second_modulus.as_ref().map(|w| w(delta))
    }

    /// Unchecked evaluation.
    pub fn value(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// Evaluation that refuses arguments past the evaluation cap.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t > self.domain_hi {
            return Err(Error::EvaluationOutOfRange {
                name: self.name.clone(),
                t,
                hi: self.domain_hi,
            });
        }
        Ok((self.eval)(t))
    }
}

/// Truncation and quadrature settings shared by all operator evaluations.
#[derive(Debug, Clone)]
pub struct Evaluator {
    tail_tol: f64,
    k_cap: Option<usize>,
    rule: GaussLegendre,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self::new(DEFAULT_TAIL_TOL, DEFAULT_ORDER).expect("default evaluator settings are valid")
    }
}

fn default_evaluator() -> &'static Evaluator {
    static DEFAULT: OnceLock<Evaluator> = OnceLock::new();
    DEFAULT.get_or_init(Evaluator::default)
}

impl Evaluator {
    pub fn new(tail_tol: f64, quadrature_order: usize) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance {tail_tol} must lie in (0, 1)"
            )));
        }
        Ok(Self {
            tail_tol,
            k_cap: None,
            rule: GaussLegendre::new(quadrature_order)?,
        })
    }

    pub fn with_k_cap(mut self, k_cap: usize) -> Self {
        self.k_cap = Some(k_cap);
        self
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Weight law of the operator at `x` under `kind`.
    pub fn weights(&self, x: f64, p: &OperatorParams, kind: CenterMap) -> Result<WeightSeries> {
        let m = weight_exponent(x, p, kind)?;
        charlier::weight_sequence(m, p.a, self.tail_tol, self.k_cap)
    }

    /// `∫ f` over `[(k+α)/(n+β), (k+α+1)/(n+β)]`.
    pub fn interval_integral(&self, f: &TestFunction, k: usize, p: &OperatorParams) -> Result<f64> {
        let scale = p.scale();
        let lo = (k as f64 + p.alpha) / scale;
        let hi = (k as f64 + p.alpha + 1.0) / scale;
        if hi > f.domain_hi() {
            return Err(Error::EvaluationOutOfRange {
                name: f.name().to_owned(),
                t: hi,
                hi: f.domain_hi(),
            });
        }
        self.rule.try_integrate(lo, hi, |t| f.eval(t))
    }

    /// `sum_k p_k f((k+α)/(n+β))`.
    pub fn discrete(
        &self,
        f: &TestFunction,
        x: f64,
        p: &OperatorParams,
        kind: CenterMap,
    ) -> Result<f64> {
        let w = self.weights(x, p, kind)?;
        let scale = p.scale();
        let mut acc = CompensatedSum::new();
        for (k, pk) in w.iter() {
            acc.add(pk * f.eval((k as f64 + p.alpha) / scale)?);
        }
        Ok(acc.value())
    }

    /// `(n+β) sum_k p_k ∫_{cell k} f`.
    pub fn kantorovich(
        &self,
        f: &TestFunction,
        x: f64,
        p: &OperatorParams,
        kind: CenterMap,
    ) -> Result<f64> {
        let w = self.weights(x, p, kind)?;
        let mut acc = CompensatedSum::new();
        for (k, pk) in w.iter() {
            acc.add(pk * self.interval_integral(f, k, p)?);
        }
        Ok(p.scale() * acc.value())
    }
}

pub fn interval_integral(f: &TestFunction, k: usize, p: &OperatorParams) -> Result<f64> {
    default_evaluator().interval_integral(f, k, p)
}

/// Sampling operator; `T_{n,a}` for [`CenterMap::Szasz`] and `L_n` for the
/// identity map with `α = β = 0`.
pub fn apply_discrete(
    f: &TestFunction,
    x: f64,
    p: &OperatorParams,
    kind: CenterMap,
) -> Result<f64> {
    default_evaluator().discrete(f, x, p, kind)
}

/// Kantorovich operator; `K_{n,a}` for [`CenterMap::Kantorovich`] and `L*_n`
/// for the identity map with `α = β = 0`.
pub fn apply_kantorovich(
    f: &TestFunction,
    x: f64,
    p: &OperatorParams,
    kind: CenterMap,
) -> Result<f64> {
    default_evaluator().kantorovich(f, x, p, kind)
}

/// `K_{n,a}(f; x)`, the t²-preserving Kantorovich operator.
pub fn kantorovich_operator(f: &TestFunction, x: f64, p: &OperatorParams) -> Result<f64> {
    apply_kantorovich(f, x, p, CenterMap::Kantorovich)
}

/// `L*_n(f; x, a)` written directly on the cells `[k/n, (k+1)/n]`.
pub fn charlier_kantorovich_szasz(
    ev: &Evaluator,
    f: &TestFunction,
    x: f64,
    n: u32,
    a: f64,
) -> Result<f64> {
    let n_f = f64::from(n);
    let w = charlier::weight_sequence((a - 1.0) * n_f * x, a, ev.tail_tol, ev.k_cap)?;
    let mut acc = CompensatedSum::new();
    for (k, pk) in w.iter() {
        let lo = k as f64 / n_f;
        let hi = (k as f64 + 1.0) / n_f;
        acc.add(pk * ev.rule.try_integrate(lo, hi, |t| f.eval(t))?);
    }
    Ok(n_f * acc.value())
}

/// Classical Kantorovich–Szász operator
/// `n sum_k e^{-nx} (nx)^k / k! ∫_{k/n}^{(k+1)/n} f`.
pub fn classical_kantorovich_szasz(
    ev: &Evaluator,
    f: &TestFunction,
    x: f64,
    n: u32,
) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::OutOfDomain { x, min: 0.0 });
    }
    let n_f = f64::from(n);
    let w = charlier::poisson_weights(n_f * x, ev.tail_tol)?;
    let mut acc = CompensatedSum::new();
    for (k, pk) in w.into_iter().enumerate() {
        let lo = k as f64 / n_f;
        let hi = (k as f64 + 1.0) / n_f;
        acc.add(pk * ev.rule.try_integrate(lo, hi, |t| f.eval(t))?);
    }
    Ok(n_f * acc.value())
}

/// Large-`a` limit check: `L*_n(f; x - 1/n, a)` against the classical
/// Kantorovich–Szász value at `x`. Returns `(charlier_value, classical_value)`.
pub fn large_a_diagnostic(
    ev: &Evaluator,
    f: &TestFunction,
    x: f64,
    n: u32,
    a: f64,
) -> Result<(f64, f64)> {
    let shifted = x - 1.0 / f64::from(n);
    if shifted < 0.0 {
        return Err(Error::OutOfDomain {
            x,
            min: 1.0 / f64::from(n),
        });
    }
    let charlier = charlier_kantorovich_szasz(ev, f, shifted, n, a)?;
    let classical = classical_kantorovich_szasz(ev, f, x, n)?;
    Ok((charlier, classical))
}
