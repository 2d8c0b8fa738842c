//! Orlicz gauges, the Luxemburg norm, and embedding/moment inequalities
//! between exponential Orlicz and Lebesgue norms.

use crate::error::{Error, Result};
use crate::grid::{lq_norm, GridFunction};

/// Cap on exponent arguments; beyond this the gauge value is treated as +inf,
/// which is a valid "integral exceeds 1" answer for the bisection.
const EXP_CAP: f64 = 700.0;

/// Convex gauge defining a Luxemburg norm.
///
/// * `ExpLp`: phi(s) = e^{s^p} - 1, the exp L^p gauge.
/// * `ExpLpReduced`: phi(s) = e^{s^p} - 1 - s^p, the reduced gauge used at the
///   regime boundary.
/// * `Power`: phi(s) = s^p, collapsing to the ordinary L^p norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrliczGauge {
    ExpLp { p: f64 },
    ExpLpReduced { p: f64 },
    Power { p: f64 },
}

impl OrliczGauge {
    pub fn exp_lp(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self::ExpLp { p })
    }

    pub fn exp_lp_reduced(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self::ExpLpReduced { p })
    }

    pub fn power(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self::Power { p })
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            Self::ExpLp { p } | Self::ExpLpReduced { p } | Self::Power { p } => p,
        }
    }

    /// phi(s) for s >= 0; +inf once the exponent argument exceeds the cap.
    pub fn phi(&self, s: f64) -> f64 {
        match *self {
            Self::ExpLp { p } => {
                let a = s.powf(p);
                if a > EXP_CAP {
                    f64::INFINITY
                } else {
                    a.exp_m1()
                }
            }
            Self::ExpLpReduced { p } => {
                let a = s.powf(p);
                if a > EXP_CAP {
                    f64::INFINITY
                } else {
                    a.exp_m1() - a
                }
            }
            Self::Power { p } => s.powf(p),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParam(format!("gauge exponent p = {p} must satisfy p >= 1")));
    }
    Ok(())
}

/// h^n sum_j phi(|u_j| / lambda); strictly decreasing in lambda for u != 0.
pub fn gauge_integral(u: &GridFunction, gauge: OrliczGauge, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParam(format!("lambda = {lambda} must be > 0")));
    }
    let h_n = u.spec().node_measure();
    let mut sum = 0.0;
    for &v in u.values() {
        let term = gauge.phi(v.abs() / lambda);
        if term.is_infinite() {
            return Ok(f64::INFINITY);
        }
        sum += term;
    }
    Ok(h_n * sum)
}

/// Outcome of the Luxemburg-norm bisection.
#[derive(Debug, Clone)]
pub struct LuxemburgResult {
    /// inf { lambda > 0 : gauge integral <= 1 }, zero for the zero field.
    pub norm: f64,
    pub iterations: usize,
    /// Final bracket (lambda_lo, lambda_hi) with integral > 1 at lo, <= 1 at hi.
    pub bracket: (f64, f64),
}

/// Luxemburg norm by bracketing + bisection on the monotone map
/// lambda -> gauge_integral(u, gauge, lambda).
pub fn luxemburg_norm(u: &GridFunction, gauge: OrliczGauge, tol: f64) -> Result<LuxemburgResult> {
    if !(tol > 1e-14 && tol < 1e-2) {
        return Err(Error::InvalidParam(format!("tol = {tol} outside (1e-14, 1e-2)")));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let sup = lq_norm(u, f64::INFINITY)?;
    if sup == 0.0 {
        return Ok(LuxemburgResult { norm: 0.0, iterations: 0, bracket: (0.0, 0.0) });
    }
    let p = gauge.exponent();
    // This start is sharp for a measure-1 indicator; doubling covers the rest.
    let mut hi = sup * 1f64.max(std::f64::consts::LN_2.powf(-1.0 / p));
    let mut iterations = 0usize;
    while gauge_integral(u, gauge, hi)? > 1.0 {
        hi *= 2.0;
        iterations += 1;
        if iterations > 2100 {
            return Err(Error::InvalidParam("luxemburg bracket search failed upward".into()));
        }
    }
    let mut lo = hi / 2.0;
    while gauge_integral(u, gauge, lo)? <= 1.0 {
        lo /= 2.0;
        iterations += 1;
        if lo < f64::MIN_POSITIVE {
            // Integral never exceeds 1: the norm is numerically zero.
            return Ok(LuxemburgResult { norm: 0.0, iterations, bracket: (0.0, 0.0) });
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if gauge_integral(u, gauge, mid)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(LuxemburgResult { norm: 0.5 * (lo + hi), iterations, bracket: (lo, hi) })
}

/// Default tolerance for norms entering inequality checks.
pub const NORM_TOL: f64 = 1e-10;

/// Luxemburg exp L^p norm with the default inequality tolerance.
pub fn exp_lp_norm(u: &GridFunction, p: f64) -> Result<f64> {
    Ok(luxemburg_norm(u, OrliczGauge::exp_lp(p)?, NORM_TOL)?.norm)
}

/// ||u||_q <= Gamma(q/p + 1)^{1/q} ||u||_{exp L^p} for p <= q < inf.
/// Returns (lhs, rhs).
pub fn embedding_lq_bound(u: &GridFunction, p: f64, q: f64) -> Result<(f64, f64)> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParam(format!("p = {p} must be >= 1")));
    }
    if !(q >= p && q.is_finite()) {
        return Err(Error::Hypothesis(format!("embedding needs p <= q < inf, got p = {p}, q = {q}")));
    }
    let lhs = lq_norm(u, q)?;
    let gamma_factor = (libm::lgamma(q / p + 1.0) / q).exp();
    let rhs = gamma_factor * exp_lp_norm(u, p)?;
    Ok((lhs, rhs))
}

/// ||u||_{exp L^p} <= (ln 2)^{-1/p} (||u||_q + ||u||_inf) for 1 <= q <= p.
/// Returns (lhs, rhs).
pub fn embedding_exp_bound(u: &GridFunction, p: f64, q: f64) -> Result<(f64, f64)> {
    if !(q >= 1.0 && q <= p) {
        return Err(Error::Hypothesis(format!("embedding needs 1 <= q <= p, got q = {q}, p = {p}")));
    }
    let lhs = exp_lp_norm(u, p)?;
    let rhs = std::f64::consts::LN_2.powf(-1.0 / p)
        * (lq_norm(u, q)? + lq_norm(u, f64::INFINITY)?);
    Ok((lhs, rhs))
}

/// The constant C(p) = 1/s* where s* solves e^{s^p} - s^p = 2; it turns
/// ||u||_q + ||u||_inf into a bound for the reduced-gauge norm.
pub fn reduced_gauge_constant(p: f64) -> Result<f64> {
    check_p(p)?;
    let g = |s: f64| {
        let a = s.powf(p);
        a.exp() - a
    };
    let mut hi = 1.0;
    while g(hi) < 2.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(1.0 / (0.5 * (lo + hi)))
}

/// Exponential moment bound: when lambda q K^p <= 1 with K = ||u||_{exp L^p},
/// ||e^{lambda |u|^p} - 1||_q <= (lambda q K^p)^{1/q}.
#[derive(Debug, Clone)]
pub struct ExpMomentBound {
    pub lhs: f64,
    pub rhs: f64,
    pub applicable: bool,
    pub exp_lp_norm: f64,
}

pub fn exp_moment_bound(u: &GridFunction, p: f64, lambda: f64, q: f64) -> Result<ExpMomentBound> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParam(format!("lambda = {lambda} must be > 0")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParam(format!("q = {q} must satisfy 1 <= q < inf")));
    }
    let k = exp_lp_norm(u, p)?;
    let gate = lambda * q * k.powf(p);
    let moment = u.map(|v| {
        let a = lambda * v.abs().powf(p);
        if a > EXP_CAP {
            f64::INFINITY
        } else {
            a.exp_m1()
        }
    });
    let lhs = if moment.is_finite() { lq_norm(&moment, q)? } else { f64::INFINITY };
    Ok(ExpMomentBound { lhs, rhs: gate.powf(1.0 / q), applicable: gate <= 1.0, exp_lp_norm: k })
}

/// (||u||_p + ||u||_{reduced gauge}) / ||u||_{exp L^p}; scale-invariant, and
/// bounded above and below across fields (equivalence of the two norms).
pub fn norm_equivalence_reduced(u: &GridFunction, p: f64) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::InvalidParam("norm equivalence ratio needs u != 0".into()));
    }
    let num = lq_norm(u, p)?
        + luxemburg_norm(u, OrliczGauge::exp_lp_reduced(p)?, NORM_TOL)?.norm;
    let den = exp_lp_norm(u, p)?;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridFunction, GridSpec};

    /// 1D grid with h = 1/64, so a measure-1 indicator is exactly 64 nodes.
    fn unit_grid() -> GridSpec {
        make_grid(1, 8.0, 1024).unwrap()
    }

    fn unit_indicator() -> GridFunction {
        let u = GridFunction::indicator(unit_grid(), 1.0, 1.0).unwrap();
        assert_eq!(u.support_measure(), 1.0);
        u
    }

    #[test]
    fn gauge_integral_closed_forms() {
        let u = unit_indicator();
        let zero = GridFunction::zeros(unit_grid());
        let e = std::f64::consts::E;
        assert_eq!(gauge_integral(&zero, OrliczGauge::exp_lp(1.0).unwrap(), 1.0).unwrap(), 0.0);
        let g1 = gauge_integral(&u, OrliczGauge::exp_lp(1.0).unwrap(), 1.0).unwrap();
        assert!((g1 - (e - 1.0)).abs() < 1e-12);
        let g2 = gauge_integral(&u, OrliczGauge::exp_lp_reduced(1.0).unwrap(), 1.0).unwrap();
        assert!((g2 - (e - 2.0)).abs() < 1e-12);
        assert!(gauge_integral(&u, OrliczGauge::exp_lp(1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn gauge_integral_overflow_reports_infinity() {
        let u = unit_indicator().scale(1e6);
        let v = gauge_integral(&u, OrliczGauge::exp_lp(2.0).unwrap(), 1.0).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn luxemburg_indicator_closed_form() {
        // V (e^{(1/lambda)^p} - 1) = 1 with V = 1 gives lambda = (ln 2)^{-1/p}.
        let u = unit_indicator();
        let ln2 = std::f64::consts::LN_2;
        for (p, expected) in [(1.0, ln2.recip()), (2.0, 1.2011224087864498)] {
            let r = luxemburg_norm(&u, OrliczGauge::exp_lp(p).unwrap(), 1e-12).unwrap();
            assert!((r.norm - expected).abs() < 1e-9, "p={p}: {} vs {expected}", r.norm);
            assert!(r.bracket.1 - r.bracket.0 <= 1e-12 * r.bracket.1.max(1.0));
        }
    }

    #[test]
    fn luxemburg_zero_field() {
        let r = luxemburg_norm(
            &GridFunction::zeros(unit_grid()),
            OrliczGauge::exp_lp(2.0).unwrap(),
            1e-10,
        )
        .unwrap();
        assert_eq!(r.norm, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn luxemburg_power_gauge_collapses_to_lq() {
        let g = unit_grid();
        let u = GridFunction::from_fn(g, |x| (-x[0] * x[0]).exp() + 0.3 * (x[0] * 0.7).cos());
        let tol = 1e-12;
        let r = luxemburg_norm(&u, OrliczGauge::power(2.0).unwrap(), tol).unwrap();
        let l2 = lq_norm(&u, 2.0).unwrap();
        assert!((r.norm - l2).abs() < tol * l2 * 2.0, "{} vs {l2}", r.norm);
    }

    #[test]
    fn luxemburg_rejects_bad_inputs() {
        let u = unit_indicator();
        assert!(luxemburg_norm(&u, OrliczGauge::exp_lp(2.0).unwrap(), 1e-1).is_err());
        let bad = u.map(|_| f64::NAN);
        assert!(luxemburg_norm(&bad, OrliczGauge::exp_lp(2.0).unwrap(), 1e-10).is_err());
        assert!(OrliczGauge::exp_lp(0.5).is_err());
    }

    #[test]
    fn closed_set_property_at_the_norm() {
        let u = unit_indicator();
        for p in [1.0, 1.5, 2.0] {
            let gauge = OrliczGauge::exp_lp(p).unwrap();
            let r = luxemburg_norm(&u, gauge, 1e-12).unwrap();
            assert!(gauge_integral(&u, gauge, r.norm).unwrap() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn gauge_integral_strictly_decreasing() {
        let u = unit_indicator();
        let gauge = OrliczGauge::exp_lp(2.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=20 {
            let lambda = 0.2 * i as f64;
            let v = gauge_integral(&u, gauge, lambda).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn embedding_lq_indicator_closed_form() {
        let u = unit_indicator();
        let (lhs, rhs) = embedding_lq_bound(&u, 2.0, 2.0).unwrap();
        assert!((lhs - 1.0).abs() < 1e-12);
        let expected = std::f64::consts::LN_2.powf(-0.5); // Gamma(2)^{1/2} = 1
        assert!((rhs - expected).abs() < 1e-8, "{rhs} vs {expected}");
        assert!(lhs <= rhs * (1.0 + 1e-8));
        assert!(embedding_lq_bound(&u, 2.0, 1.5).is_err());
    }

    #[test]
    fn embedding_exp_indicator_closed_form() {
        let u = unit_indicator();
        let (lhs, rhs) = embedding_exp_bound(&u, 2.0, 2.0).unwrap();
        let c = std::f64::consts::LN_2.powf(-0.5);
        assert!((lhs - c).abs() < 1e-8);
        assert!((rhs - 2.0 * c).abs() < 1e-8);
        assert!(embedding_exp_bound(&u, 2.0, 3.0).is_err());
        let zero = GridFunction::zeros(unit_grid());
        let (l0, r0) = embedding_exp_bound(&zero, 2.0, 2.0).unwrap();
        assert_eq!((l0, r0), (0.0, 0.0));
    }

    #[test]
    fn reduced_gauge_constant_matches_root() {
        // p = 1: solve e^s - s = 2, s* ~ 1.1462, C ~ 0.8724.
        let c1 = reduced_gauge_constant(1.0).unwrap();
        assert!((c1 - 0.8724).abs() < 5e-4, "C(1) = {c1}");
        for p in [1.0, 1.5, 2.0] {
            let c = reduced_gauge_constant(p).unwrap();
            let s = 1.0 / c;
            let g = s.powf(p).exp() - s.powf(p);
            assert!((g - 2.0).abs() < 1e-10, "p={p}: g(1/C) = {g}");
        }
    }

    #[test]
    fn exp_moment_indicator_closed_form() {
        // c 1_E with |E| = 1: lhs = e^{lambda c^p} - 1, K = c (ln 2)^{-1/p}.
        let u = unit_indicator().scale(0.5);
        let (p, lambda, q) = (2.0, 0.1, 2.0);
        let b = exp_moment_bound(&u, p, lambda, q).unwrap();
        let k = 0.5 * std::f64::consts::LN_2.powf(-0.5);
        assert!((b.exp_lp_norm - k).abs() < 1e-8);
        assert!(b.applicable);
        let lhs_expected = (lambda * 0.25f64).exp_m1();
        assert!((b.lhs - lhs_expected).abs() < 1e-12);
        let rhs_expected = (lambda * q * k * k).sqrt();
        assert!((b.rhs - rhs_expected).abs() < 1e-8);
        assert!(b.lhs <= b.rhs * (1.0 + 1e-8));
    }

    #[test]
    fn exp_moment_zero_field_applicable() {
        let b = exp_moment_bound(&GridFunction::zeros(unit_grid()), 2.0, 1.0, 2.0).unwrap();
        assert!(b.applicable);
        assert_eq!(b.lhs, 0.0);
        assert_eq!(b.rhs, 0.0);
    }

    #[test]
    fn exp_moment_gate_can_close() {
        let u = unit_indicator().scale(3.0);
        let b = exp_moment_bound(&u, 2.0, 1.0, 2.0).unwrap();
        assert!(!b.applicable);
    }

    #[test]
    fn norm_equivalence_ratio_scale_invariant() {
        let u = unit_indicator();
        let base = norm_equivalence_reduced(&u, 2.0).unwrap();
        println!("measure-1 indicator equivalence ratio at p = 2: {base}");
        assert!(base.is_finite() && base > 0.0);
        for alpha in [0.1, 2.0, 10.0] {
            let r = norm_equivalence_reduced(&u.scale(alpha), 2.0).unwrap();
            assert!((r - base).abs() <= 1e-8 * base, "alpha={alpha}: {r} vs {base}");
        }
        assert!(norm_equivalence_reduced(&GridFunction::zeros(unit_grid()), 2.0).is_err());
    }

    #[test]
    fn reduced_norm_below_exp_norm() {
        let g = unit_grid();
        let u = GridFunction::from_fn(g, |x| 1.3 * (-x[0] * x[0] / 2.0).exp());
        let reduced =
            luxemburg_norm(&u, OrliczGauge::exp_lp_reduced(2.0).unwrap(), NORM_TOL).unwrap().norm;
        let full = exp_lp_norm(&u, 2.0).unwrap();
        assert!(reduced <= full * (1.0 + 1e-10), "{reduced} vs {full}");
    }
}
