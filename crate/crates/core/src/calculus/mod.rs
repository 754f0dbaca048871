//! Differentiation: hyper-dual numbers for exact partials, and Richardson
//! extrapolated finite differences for scalar functions and for directional
//! (Gâteaux) derivatives of functionals over field space.

mod dual;

pub use dual::{Dual2, Scalar};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::StateFields;

/// A finite-difference result together with the gap between the two
/// Richardson levels, used as an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// Maximum number of step halvings when a probe leaves the admissible set.
const MAX_SHRINK: usize = 20;

fn base_step(order: Order) -> f64 {
    match order {
        Order::First => f64::EPSILON.cbrt(),
        Order::Second => f64::EPSILON.powf(0.25),
    }
}

fn is_domain(err: &Error) -> bool {
    matches!(err, Error::Domain(_))
}

/// Central difference of `curve` at zero with step `h` and one Richardson
/// level. Domain errors at the probe points shrink `h`.
fn richardson<F>(curve: F, order: Order, mut h: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let eval = |s: f64| -> Result<f64> {
        let y = curve(s)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Evaluation { at: s })
        }
    };

    let center = match order {
        Order::First => 0.0,
        Order::Second => eval(0.0)?,
    };
    let stencil = |h: f64| -> Result<f64> {
        let plus = eval(h)?;
        let minus = eval(-h)?;
        Ok(match order {
            Order::First => (plus - minus) / (2.0 * h),
            Order::Second => (plus - 2.0 * center + minus) / (h * h),
        })
    };

    let mut last_err = None;
    for _ in 0..=MAX_SHRINK {
        match stencil(h).and_then(|coarse| Ok((coarse, stencil(0.5 * h)?))) {
            Ok((coarse, fine)) => {
                let value = (4.0 * fine - coarse) / 3.0;
                return Ok(Estimate {
                    value,
                    error: (value - fine).abs(),
                });
            }
            Err(e) if is_domain(&e) => {
                last_err = Some(e);
                h *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Domain("probe steps never admissible".into())))
}

/// Finite-difference derivative of a scalar function.
pub fn fd_derivative<F>(f: F, x: f64, order: Order) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let h = base_step(order) * (1.0 + x.abs());
    richardson(|s| Ok(f(x + s)), order, h)
}

/// Fallible variant of [`fd_derivative`]; domain errors shrink the step.
pub fn try_fd_derivative<F>(f: F, x: f64, order: Order) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = base_step(order) * (1.0 + x.abs());
    richardson(|s| f(x + s), order, h)
}

/// A real-valued functional over [`StateFields`].
#[derive(Clone)]
pub struct FunctionalHandle {
    eval: Arc<dyn Fn(&StateFields) -> Result<f64> + Send + Sync>,
}

impl FunctionalHandle {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&StateFields) -> Result<f64> + Send + Sync + 'static,
    {
        Self { eval: Arc::new(f) }
    }

    pub fn eval(&self, fields: &StateFields) -> Result<f64> {
        (self.eval)(fields)
    }
}

impl fmt::Debug for FunctionalHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FunctionalHandle(..)")
    }
}

/// Estimate of `d^k/ds^k F(base + s·dir)` at `s = 0`, with the probe step
/// scaled so that `s·dir` has sup-norm `base_step·(1 + ‖base‖∞)`.
pub fn gateaux(
    functional: &FunctionalHandle,
    base: &StateFields,
    dir: &StateFields,
    order: Order,
) -> Result<Estimate> {
    if base.len() != dir.len() {
        return Err(Error::Shape {
            expected: base.len(),
            actual: dir.len(),
        });
    }
    let dir_norm = dir.max_abs();
    if dir_norm == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let h = base_step(order) * (1.0 + base.max_abs()) / dir_norm;
    richardson(|s| functional.eval(&base.axpy(s, dir)), order, h)
}

/// First Gâteaux derivative `D F(base)[dir]`.
pub fn gateaux_first(
    functional: &FunctionalHandle,
    base: &StateFields,
    dir: &StateFields,
) -> Result<f64> {
    gateaux(functional, base, dir, Order::First).map(|e| e.value)
}

/// Second Gâteaux derivative `D² F(base)[dir]`.
pub fn gateaux_second(
    functional: &FunctionalHandle,
    base: &StateFields,
    dir: &StateFields,
) -> Result<f64> {
    gateaux(functional, base, dir, Order::Second).map(|e| e.value)
}
