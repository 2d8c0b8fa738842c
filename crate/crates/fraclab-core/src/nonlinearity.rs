//! The nonlinearity family f(u) = sign |u|^{m-1} u e^{lambda |u|^p} and its
//! empirical Lipschitz calibration.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Overflow guard for exponent arguments; beyond this f is treated as a
/// divergence signal rather than a silent infinity.
const EXP_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    /// Polynomial order at the origin, m >= 1.
    pub m: f64,
    /// Exponential order, p > 1.
    pub p: f64,
    /// Exponential rate, lambda > 0.
    pub lambda: f64,
    /// +1 or -1.
    pub sign: f64,
}

impl Nonlinearity {
    pub fn new(m: f64, p: f64, lambda: f64, sign: f64) -> Result<Self> {
        if !(m >= 1.0 && m.is_finite()) {
            return Err(Error::InvalidParam(format!("m = {m} must satisfy m >= 1")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParam(format!("p = {p} must satisfy p > 1")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParam(format!("lambda = {lambda} must be > 0")));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidParam(format!("sign = {sign} must be +1 or -1")));
        }
        Ok(Self { m, p, lambda, sign })
    }

    /// f at a scalar; None signals exponential overflow.
    pub fn eval_scalar(&self, u: f64) -> Option<f64> {
        let a = self.lambda * u.abs().powf(self.p);
        if a > EXP_CAP {
            return None;
        }
        Some(self.sign * u.abs().powf(self.m - 1.0) * u * a.exp())
    }

    /// |f'(u)|, used to monitor explicit-step admissibility.
    pub fn derivative_bound(&self, u: f64) -> f64 {
        let au = u.abs();
        let a = self.lambda * au.powf(self.p);
        if a > EXP_CAP {
            return f64::INFINITY;
        }
        a.exp() * (self.m * au.powf(self.m - 1.0) + self.lambda * self.p * au.powf(self.p + self.m - 1.0))
    }
}

/// Nodewise f(u); exponential overflow is reported, never propagated as Inf.
pub fn eval_f(f: &Nonlinearity, u: &GridFunction) -> Result<GridFunction> {
    let mut values = Vec::with_capacity(u.values().len());
    for &v in u.values() {
        match f.eval_scalar(v) {
            Some(w) => values.push(w),
            None => return Err(Error::Overflow),
        }
    }
    GridFunction::from_values(*u.spec(), values)
}

/// Best constant C over a dense scan of [-a, a] x [-a, a] for
/// |f(x) - f(y)| <= C |x - y| (|x|^{m-1} e^{lambda|x|^p} + |y|^{m-1} e^{lambda|y|^p}).
pub fn lipschitz_scan(f: &Nonlinearity, a: f64, samples: usize) -> f64 {
    let k = samples.max(3);
    let grid: Vec<f64> = (0..k).map(|i| -a + 2.0 * a * i as f64 / (k - 1) as f64).collect();
    let weight = |x: f64| x.abs().powf(f.m - 1.0) * (f.lambda * x.abs().powf(f.p)).exp();
    let mut c = 0.0f64;
    for (i, &x) in grid.iter().enumerate() {
        // Diagonal limit via the derivative.
        let den_diag = 2.0 * weight(x);
        if den_diag > 0.0 {
            c = c.max(f.derivative_bound(x) / den_diag);
        }
        for &y in grid.iter().skip(i + 1) {
            let (fx, fy) = match (f.eval_scalar(x), f.eval_scalar(y)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            let den = (x - y).abs() * (weight(x) + weight(y));
            if den > 0.0 {
                c = c.max((fx - fy).abs() / den);
            }
        }
    }
    c
}

/// Nodewise witness of the growth-condition inequality with a scanned C.
#[derive(Debug, Clone)]
pub struct LipschitzWitness {
    pub lhs: GridFunction,
    pub rhs: GridFunction,
    pub constant: f64,
}

pub fn lipschitz_witness(
    f: &Nonlinearity,
    u: &GridFunction,
    v: &GridFunction,
) -> Result<LipschitzWitness> {
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::NonFinite);
    }
    let a = u
        .values()
        .iter()
        .chain(v.values())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1e-6);
    let c = lipschitz_scan(f, a, 600);
    let fu = eval_f(f, u)?;
    let fv = eval_f(f, v)?;
    let lhs = fu.zip(&fv, |a, b| (a - b).abs())?;
    let weight = |x: f64| x.abs().powf(f.m - 1.0) * (f.lambda * x.abs().powf(f.p)).exp();
    let rhs = u.zip(v, |x, y| c * (x - y).abs() * (weight(x) + weight(y)))?;
    Ok(LipschitzWitness { lhs, rhs, constant: c })
}
