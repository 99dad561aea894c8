//! Charlier polynomials and the weight law of the operators.
//!
//! The weights `p_k = e^{-1} (1 - 1/a)^m C_k^{(a)}(-m) / k!` are the
//! probability mass function of `X + Y` with `X ~ Poisson(1)` and `Y` a
//! negative binomial with (possibly non-integer) shape `m` and ratio `1/a`.
//! This follows from splitting the generating function
//! `e^t (1 - t/a)^{-m}` into its two factors. Production weights are built
//! from that convolution with forward ratio recurrences; the explicit
//! Charlier sum is kept as an independent small-`k` path.

use crate::{CompensatedSum, Error, Result};

/// Default truncation tolerance on the neglected probability mass.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Arguments of `C_k^{(a)}(u)` in the positivity regime `a > 1`, `u <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharlierArgs {
    pub degree: u32,
    pub a: f64,
    pub u: f64,
}

impl CharlierArgs {
    pub fn new(degree: u32, a: f64, u: f64) -> Result<Self> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Charlier parameter a = {a} must exceed 1"
            )));
        }
        if !(u <= 0.0) || !u.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Charlier argument u = {u} must be <= 0"
            )));
        }
        Ok(Self { degree, a, u })
    }
}

/// Rising factorial `(base)_count`.
pub fn pochhammer(base: f64, count: u32) -> f64 {
    (0..count).fold(1.0, |acc, i| acc * (base + f64::from(i)))
}

fn binomial(n: u32, r: u32) -> f64 {
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `C_k^{(a)}(u) = sum_r binom(k, r) (-u)_r a^{-r}`.
///
/// Every term is nonnegative for `u <= 0`, so the result is at least 1.
/// Intended for small degrees; the weight law uses [`weight_sequence`].
pub fn charlier_explicit(args: &CharlierArgs) -> f64 {
    let k = args.degree;
    let mut acc = CompensatedSum::new();
    for r in 0..=k {
        acc.add(binomial(k, r) * pochhammer(-args.u, r) * args.a.powi(-(r as i32)));
    }
    acc.value()
}

/// Truncated operator weights `p_0..p_K` together with the neglected mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSeries {
    m: f64,
    a: f64,
    weights: Vec<f64>,
    tail_mass: f64,
}

impl WeightSeries {
    /// Exponent `m = (a - 1) n rho(x)` of the generating function.
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `1 - sum p_k` over the retained range.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Index `K` of the last retained weight.
    pub fn k_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn total_mass(&self) -> f64 {
        self.weights
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }

    /// Truncated series moment `sum_k k^j p_k`.
    pub fn moment(&self, j: u32) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, &p)| (k as f64).powi(j as i32) * p)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().copied().enumerate()
    }
}

/// Mean and standard deviation of the weight law, from the first two
/// closed-form weight moments.
pub fn law_mean_sd(m: f64, a: f64) -> (f64, f64) {
    let c = 1.0 / (a - 1.0);
    let nr = m * c;
    (1.0 + nr, (1.0 + nr * (1.0 + c)).sqrt())
}

/// Default hard cap `mean + 40 sd + 64` on the retained index.
pub fn default_k_cap(m: f64, a: f64) -> usize {
    let (mean, sd) = law_mean_sd(m, a);
    (mean + 40.0 * sd + 64.0).ceil() as usize
}

/// `e^{-1} / j!` until it underflows.
fn poisson_one() -> Vec<f64> {
    let mut out = Vec::with_capacity(180);
    let mut p = (-1.0f64).exp();
    let mut j = 0u32;
    while p > 0.0 {
        out.push(p);
        j += 1;
        p /= f64::from(j);
    }
    out
}

/// Generalized negative binomial pmf with shape `m` and ratio `q = 1/a`,
/// `nb_i ∝ (m)_i q^i / i!`.
///
/// The recurrence starts from the mode with value 1 and walks outwards, so
/// neither the rising factorials nor `(1 - 1/a)^m` are formed explicitly and
/// large shapes cannot underflow the head of the law. Values past the
/// normalisation range are produced on demand by the same recurrence.
struct NegativeBinomial {
    m: f64,
    a: f64,
    w: Vec<f64>,
}

/// Relative mass left out of the negative-binomial normalisation.
const NB_NORMALIZATION_TAIL: f64 = 1e-20;

impl NegativeBinomial {
    fn new(m: f64, a: f64) -> Self {
        if m == 0.0 {
            return Self { m, a, w: vec![1.0] };
        }
        let mut nb = Self {
            m,
            a,
            w: Vec::new(),
        };

        let mut mode = if m <= a {
            0
        } else {
            ((m - a) / (a - 1.0)).floor() as usize + 1
        };
        while mode > 0 && nb.ratio(mode - 1) < 1.0 {
            mode -= 1;
        }
        while nb.ratio(mode) >= 1.0 {
            mode += 1;
        }

        nb.w = vec![0.0; mode + 1];
        nb.w[mode] = 1.0;
        for i in (0..mode).rev() {
            nb.w[i] = nb.w[i + 1] / nb.ratio(i);
        }

        let mut mass: CompensatedSum = nb.w.iter().copied().collect();
        let inv_a = 1.0 / a;
        let mut i = mode;
        loop {
            // sup of the remaining ratios is max(ratio(i), 1/a): the ratio
            // tends monotonically to 1/a from either side.
            let q = nb.ratio(i).max(inv_a);
            if nb.w[i] * q / (1.0 - q) <= NB_NORMALIZATION_TAIL * mass.value() {
                break;
            }
            let next = nb.w[i] * nb.ratio(i);
            nb.w.push(next);
            mass.add(next);
            i += 1;
        }

        let total = mass.value();
        for v in &mut nb.w {
            *v /= total;
        }
        nb
    }

    #[inline]
    fn ratio(&self, i: usize) -> f64 {
        (self.m + i as f64) / ((i as f64 + 1.0) * self.a)
    }

    fn extend_to(&mut self, i: usize) {
        while self.w.len() <= i {
            let last = self.w.len() - 1;
            let next = if self.m == 0.0 {
                0.0
            } else {
                self.w[last] * self.ratio(last)
            };
            self.w.push(next);
        }
    }
}

/// Poisson(`mean`) masses `0..K`, truncated once the retained mass reaches
/// `1 - tail_tol`. Started from the mode like [`negative_binomial`].
pub(crate) fn poisson_weights(mean: f64, tail_tol: f64) -> Result<Vec<f64>> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Poisson mean {mean} must be finite and >= 0"
        )));
    }
    if mean == 0.0 {
        return Ok(vec![1.0]);
    }
    let mode = mean.floor() as usize;
    let mut w = vec![0.0; mode + 1];
    w[mode] = 1.0;
    for i in (0..mode).rev() {
        w[i] = w[i + 1] * (i as f64 + 1.0) / mean;
    }
    let mut mass: CompensatedSum = w.iter().copied().collect();
    let mut i = mode;
    loop {
        let q = mean / (i as f64 + 1.0);
        if q < 1.0 && w[i] * q / (1.0 - q) <= NB_NORMALIZATION_TAIL * mass.value() {
            break;
        }
        w.push(w[i] * q);
        mass.add(w[i + 1]);
        i += 1;
    }
    let total = mass.value();
    let mut kept = CompensatedSum::new();
    let mut out = Vec::with_capacity(w.len());
    for v in w {
        let v = v / total;
        out.push(v);
        kept.add(v);
        if kept.value() >= 1.0 - tail_tol {
            break;
        }
    }
    Ok(out)
}

/// Builds the weight law for exponent `m` and parameter `a`, truncated at the
/// smallest `K` with accumulated mass `>= 1 - tail_tol`.
///
/// `k_cap` defaults to [`default_k_cap`]; reaching it before the target mass
/// is a [`Error::TruncationFailure`].
pub fn weight_sequence(
    m: f64,
    a: f64,
    tail_tol: f64,
    k_cap: Option<usize>,
) -> Result<WeightSeries> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "weight exponent m = {m} must be finite and >= 0"
        )));
    }
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Charlier parameter a = {a} must exceed 1"
        )));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance {tail_tol} must lie in (0, 1)"
        )));
    }
    let k_cap = k_cap.unwrap_or_else(|| default_k_cap(m, a));
    let target = 1.0 - tail_tol;

    let poisson = poisson_one();
    let mut nb = NegativeBinomial::new(m, a);

    let mut weights = Vec::new();
    let mut mass = CompensatedSum::new();
    for k in 0..=k_cap {
        nb.extend_to(k);
        let hi = k.min(poisson.len() - 1);
        let pk = (0..=hi).map(|j| poisson[j] * nb.w[k - j]).sum::<f64>();
        weights.push(pk);
        mass.add(pk);
        if mass.value() >= target {
            let tail_mass = (1.0 - mass.value()).max(0.0);
            return Ok(WeightSeries {
                m,
                a,
                weights,
                tail_mass,
            });
        }
    }
    Err(Error::TruncationFailure {
        k_cap,
        mass: mass.value(),
        target,
    })
}
