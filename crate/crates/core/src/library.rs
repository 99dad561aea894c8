//! Built-in test functions with their analytic moduli.
//!
//! Every modulus here is the exact supremum over `[0, ∞)`, or an upper
//! envelope of it, so certificates built from these entries are rigorous.

use crate::operators::{Growth, TestFunction};
use crate::{Error, Result};

/// `Lip*_M(α)` membership data: `|f(t) - f(x)| <= M |t-x|^α / (t+x)^{α/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipStar {
    pub alpha: f64,
    pub m: f64,
}

#[derive(Debug, Clone)]
pub struct FunctionLibraryEntry {
    pub id: String,
    pub function: TestFunction,
    pub derivative: Option<TestFunction>,
    /// `sup |f|` on `[0, ∞)` for bounded entries.
    pub sup_norm: Option<f64>,
    pub lip_star: Option<LipStar>,
}

pub const IDS: [&str; 8] = [
    "const",
    "affine",
    "square",
    "half-square",
    "exp-neg",
    "sin",
    "abs-shift",
    "sqrt",
];

fn sine_modulus(delta: f64) -> f64 {
    2.0 * (0.5 * delta.min(std::f64::consts::PI)).sin()
}

pub fn constant() -> TestFunction {
    TestFunction::new("const", |_| 1.0)
        .with_growth(Growth::Bounded)
        .with_modulus(|_| 0.0)
        .with_second_modulus(|_| 0.0)
}

/// `2t + 1`
pub fn affine() -> TestFunction {
    TestFunction::new("affine", |t| 2.0 * t + 1.0)
        .with_lipschitz(2.0)
        .with_second_modulus(|_| 0.0)
}

/// `t²`; not uniformly continuous on `[0, ∞)`, so no `ω` is attached.
pub fn square() -> TestFunction {
    TestFunction::new("square", |t| t * t).with_second_modulus(|d| 2.0 * d * d)
}

/// `t²/2`, whose derivative `t` has `ω₁(δ) = δ`.
pub fn half_square() -> TestFunction {
    TestFunction::new("half-square", |t| 0.5 * t * t).with_second_modulus(|d| d * d)
}

pub fn exp_neg() -> TestFunction {
    TestFunction::new("exp-neg", |t| (-t).exp())
        .with_growth(Growth::Bounded)
        .with_modulus(|d| -(-d).exp_m1())
        .with_second_modulus(|d| (-d).exp_m1().powi(2))
}

pub fn sine() -> TestFunction {
    TestFunction::new("sin", f64::sin)
        .with_growth(Growth::Bounded)
        .with_modulus(sine_modulus)
        .with_second_modulus(|d| sine_modulus(d).powi(2))
}

/// `|t - 1|`
pub fn abs_shift() -> TestFunction {
    TestFunction::new("abs-shift", |t| (t - 1.0).abs())
        .with_lipschitz(1.0)
        .with_second_modulus(|d| 2.0 * d.min(1.0))
}

pub fn sqrt() -> TestFunction {
    TestFunction::new("sqrt", |t| t.max(0.0).sqrt())
        .with_modulus(f64::sqrt)
        .with_second_modulus(|d| (2.0 - std::f64::consts::SQRT_2) * d.sqrt())
}

/// Looks up a function by id.
pub fn get(id: &str) -> Result<TestFunction> {
    entry(id).map(|e| e.function)
}

/// `f'` for the continuously differentiable entries.
pub fn derivative(id: &str) -> Result<TestFunction> {
    entry(id)?.derivative.ok_or_else(|| {
        Error::Config(format!(
            "function `{id}` has no continuous derivative in the library"
        ))
    })
}

pub fn entry(id: &str) -> Result<FunctionLibraryEntry> {
    let e = |function, derivative, sup_norm, lip_star| FunctionLibraryEntry {
        id: id.to_owned(),
        function,
        derivative,
        sup_norm,
        lip_star,
    };
    let entry = match id {
        "const" => e(
            constant(),
            Some(TestFunction::new("const'", |_| 0.0).with_modulus(|_| 0.0)),
            Some(1.0),
            Some(LipStar { alpha: 1.0, m: 0.0 }),
        ),
        "affine" => e(
            affine(),
            Some(TestFunction::new("affine'", |_| 2.0).with_modulus(|_| 0.0)),
            None,
            None,
        ),
        "square" => e(
            square(),
            Some(TestFunction::new("square'", |t| 2.0 * t).with_lipschitz(2.0)),
            None,
            None,
        ),
        "half-square" => e(
            half_square(),
            Some(TestFunction::new("half-square'", |t| t).with_lipschitz(1.0)),
            None,
            None,
        ),
        "exp-neg" => e(
            exp_neg(),
            Some(TestFunction::new("exp-neg'", |t| -(-t).exp()).with_modulus(|d| -(-d).exp_m1())),
            Some(1.0),
            None,
        ),
        "sin" => e(
            sine(),
            Some(TestFunction::new("sin'", f64::cos).with_modulus(sine_modulus)),
            Some(1.0),
            None,
        ),
        "abs-shift" => e(abs_shift(), None, None, None),
        // |√t - √x| = |t - x| / (√t + √x) <= |t - x| / sqrt(t + x)
        "sqrt" => e(sqrt(), None, None, Some(LipStar { alpha: 1.0, m: 1.0 })),
        other => {
            return Err(Error::Config(format!(
                "unknown function id `{other}`; expected one of {}",
                IDS.join(", ")
            )))
        }
    };
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{grid_modulus, grid_second_modulus, Interval};

    #[test]
    fn every_id_resolves() {
        for id in IDS {
            let e = entry(id).unwrap();
            assert_eq!(e.id, id);
            assert_eq!(e.function.name(), id);
        }
        assert!(matches!(get("cosh"), Err(Error::Config(_))));
        assert!(derivative("abs-shift").is_err());
    }

    #[test]
    fn analytic_moduli_dominate_grid_estimates() {
        let dom = Interval::new(0.0, 12.0);
        for id in IDS {
            let f = get(id).unwrap();
            for delta in [0.01, 0.1, 0.5, 1.0, 2.5, 4.0] {
                let step = delta / 8.0;
                if let Some(w) = f.analytic_modulus(delta) {
                    let g = grid_modulus(&f, delta, dom, step);
                    assert!(w >= g - 1e-9, "{id} ω({delta}): {w} < {g}");
                }
                if let Some(w2) = f.analytic_second_modulus(delta) {
                    let g = grid_second_modulus(&f, delta, dom, step);
                    assert!(w2 >= g - 1e-9, "{id} ω₂({delta}): {w2} < {g}");
                }
            }
            if let Ok(fp) = derivative(id) {
                for delta in [0.01, 0.1, 1.0] {
                    let w = fp.analytic_modulus(delta).expect("derivatives carry ω₁");
                    assert!(w >= grid_modulus(&fp, delta, dom, delta / 8.0) - 1e-14);
                }
            }
        }
    }

    #[test]
    fn moduli_are_attained_where_expected() {
        let dom = Interval::new(0.0, 12.0);
        let e = exp_neg();
        let g = grid_modulus(&e, 0.25, dom, 0.25 / 8.0);
        assert!((e.analytic_modulus(0.25).unwrap() - g).abs() < 1e-14);
        let s = sqrt();
        let g = grid_modulus(&s, 0.5, dom, 0.5 / 8.0);
        assert!((s.analytic_modulus(0.5).unwrap() - g).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for id in IDS {
            if let Ok(fp) = derivative(id) {
                let f = get(id).unwrap();
                for x in [0.3, 1.7, 4.0] {
                    let h = 1e-5;
                    let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                    assert!((fd - fp.value(x)).abs() < 1e-6, "{id} at {x}");
                }
            }
        }
    }

    #[test]
    fn sup_norms_hold_on_a_grid() {
        for id in IDS {
            let e = entry(id).unwrap();
            if let Some(sup) = e.sup_norm {
                assert_eq!(e.function.growth(), Growth::Bounded);
                assert!((0..2000).all(|i| e.function.value(i as f64 * 0.01).abs() <= sup));
            }
        }
    }
}
