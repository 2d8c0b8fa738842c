//! Min-of-two-branches kernel bounds kappa(t) and their integrability over
//! (0, infinity), which drives the global-in-time Duhamel estimate.
//!
//! Two regimes are covered: the subcritical one beta < n(p-1)/p (any
//! auxiliary index r > n/beta) and the critical boundary beta = n(p-1)/p,
//! where the reduced gauge takes over and the exponent 1/p becomes 1/(2p).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaRegime {
    /// beta < n(p-1)/p; requires r > n/beta.
    Subcritical,
    /// beta = n(p-1)/p exactly (choose rational parameters so this is
    /// machine-exact).
    Critical,
}

#[derive(Debug, Clone, Copy)]
pub struct KappaProfile {
    pub regime: KappaRegime,
    pub n: usize,
    pub beta: f64,
    pub p: f64,
    /// Auxiliary integrability index; only meaningful in the subcritical regime.
    pub r: f64,
    pub c: f64,
}

impl KappaProfile {
    pub fn new(regime: KappaRegime, n: usize, beta: f64, p: f64, r: f64, c: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::InvalidParam(format!("beta = {beta} must lie in (0, 2]")));
        }
        if !(p > 1.0) {
            return Err(Error::InvalidParam(format!("p = {p} must be > 1")));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidParam(format!("C = {c} must be > 0")));
        }
        let nf = n as f64;
        let crit = nf * (p - 1.0) / p;
        match regime {
            KappaRegime::Subcritical => {
                if !(beta < crit) {
                    return Err(Error::Hypothesis(format!(
                        "beta < n(p-1)/p violated: beta = {beta}, n(p-1)/p = {crit}"
                    )));
                }
                if !(r > nf / beta) {
                    return Err(Error::Hypothesis(format!(
                        "r > n/beta violated: r = {r}, n/beta = {}",
                        nf / beta
                    )));
                }
            }
            KappaRegime::Critical => {
                if beta != crit {
                    return Err(Error::Hypothesis(format!(
                        "beta = n(p-1)/p violated: beta = {beta}, n(p-1)/p = {crit}"
                    )));
                }
            }
        }
        Ok(Self { regime, n, beta, p, r, c })
    }

    /// Exponent of the small-t branch C (t^{-gamma0} + 1).
    fn small_t_exponent(&self) -> f64 {
        match self.regime {
            KappaRegime::Subcritical => self.n as f64 / (self.beta * self.r),
            KappaRegime::Critical => 0.5,
        }
    }

    /// Exponent on the log factor in the large-t branch.
    fn log_exponent(&self) -> f64 {
        match self.regime {
            KappaRegime::Subcritical => self.p,
            KappaRegime::Critical => 2.0 * self.p,
        }
    }

    /// Pointwise kappa(t) = min of the two branches.
    pub fn eval(&self, t: f64) -> f64 {
        let nb = self.n as f64 / self.beta;
        let first = self.c * (t.powf(-self.small_t_exponent()) + 1.0);
        let x = t.powf(-nb);
        let second = self.c * x * x.ln_1p().powf(-1.0 / self.log_exponent());
        first.min(second)
    }

    /// Analytic bound on the integral of kappa over [t_max, infinity), from
    /// the large-t branch and ln(1+x) >= x/(1+x).
    pub fn tail_bound(&self, t_max: f64) -> f64 {
        let nb = self.n as f64 / self.beta;
        let pp = self.log_exponent();
        let gamma = nb * (1.0 - 1.0 / pp);
        debug_assert!(gamma > 1.0, "tail exponent must exceed 1 in regime");
        let x_max = t_max.powf(-nb);
        self.c * (1.0 + x_max).powf(1.0 / pp) * t_max.powf(1.0 - gamma) / (gamma - 1.0)
    }

    /// Bound on the integral over (0, t_min] from the small-t branch.
    pub fn head_bound(&self, t_min: f64) -> f64 {
        let g0 = self.small_t_exponent();
        self.c * (t_min.powf(1.0 - g0) / (1.0 - g0) + t_min)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KappaIntegral {
    /// head + quadrature + tail: an upper-biased estimate of the full integral.
    pub total: f64,
    pub head: f64,
    pub quadrature: f64,
    pub tail: f64,
}

/// Integrates kappa on a geometric grid (ratio 1.05) over [t_min, t_max],
/// adding analytic head and tail bounds. Totals for growing t_max form a
/// Cauchy sequence; the increments certify integrability.
pub fn kappa_integral(profile: &KappaProfile, t_min: f64, t_max: f64) -> Result<KappaIntegral> {
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::InvalidParam(format!(
            "integration bounds need 0 < t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    let ratio = 1.05f64;
    let mut quadrature = 0.0;
    let mut t = t_min;
    // Two-point Gauss per geometric cell: cheap, and accurate enough that the
    // increments between growing t_max values are dominated by the (tiny)
    // slack of the analytic tail bound.
    let offset = 0.5 / 3.0f64.sqrt();
    while t < t_max {
        let t_next = (t * ratio).min(t_max);
        let width = t_next - t;
        let mid = 0.5 * (t + t_next);
        quadrature += 0.5
            * width
            * (profile.eval(mid - offset * width) + profile.eval(mid + offset * width));
        t = t_next;
    }
    let head = profile.head_bound(t_min);
    let tail = profile.tail_bound(t_max);
    Ok(KappaIntegral { total: head + quadrature + tail, head, quadrature, tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subcritical_example() -> KappaProfile {
        // n = 3, beta = 1, p = 2, r = 4: n(p-1)/p = 1.5 > 1, n/beta = 3 < 4.
        KappaProfile::new(KappaRegime::Subcritical, 3, 1.0, 2.0, 4.0, 1.0).unwrap()
    }

    #[test]
    fn constructor_gates_each_inequality() {
        assert!(KappaProfile::new(KappaRegime::Subcritical, 3, 1.6, 2.0, 4.0, 1.0).is_err());
        assert!(KappaProfile::new(KappaRegime::Subcritical, 3, 1.0, 2.0, 2.5, 1.0).is_err());
        assert!(KappaProfile::new(KappaRegime::Critical, 2, 1.1, 2.0, 0.0, 1.0).is_err());
        assert!(KappaProfile::new(KappaRegime::Critical, 2, 1.0, 2.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn pointwise_min_of_branches() {
        let k = subcritical_example();
        // At t = 1: min(2, (ln 2)^{-1/2}) = 1.2011...
        let expected = std::f64::consts::LN_2.powf(-0.5);
        assert!((k.eval(1.0) - expected).abs() < 1e-12);
        // Small t: the first branch wins and behaves like t^{-3/4}.
        let t = 1e-6;
        assert!((k.eval(t) - (t.powf(-0.75) + 1.0)).abs() < 1e-9 * t.powf(-0.75));
    }

    #[test]
    fn integral_converges_subcritical() {
        let k = subcritical_example();
        let a = kappa_integral(&k, 1e-8, 1e5).unwrap();
        let b = kappa_integral(&k, 1e-8, 1e6).unwrap();
        let c = kappa_integral(&k, 1e-8, 1e7).unwrap();
        assert!(a.total.is_finite() && a.total > 0.0);
        assert!((b.total - a.total).abs() < 1e-6, "increment {}", b.total - a.total);
        assert!((c.total - b.total).abs() < 1e-6);
    }

    #[test]
    fn integral_converges_critical() {
        let k = KappaProfile::new(KappaRegime::Critical, 2, 1.0, 2.0, 0.0, 1.0).unwrap();
        let a = kappa_integral(&k, 1e-8, 1e5).unwrap();
        let b = kappa_integral(&k, 1e-8, 1e6).unwrap();
        assert!(a.total.is_finite());
        assert!((b.total - a.total).abs() < 1e-6);
    }

    #[test]
    fn integral_rejects_bad_bounds() {
        let k = subcritical_example();
        assert!(kappa_integral(&k, 0.0, 1.0).is_err());
        assert!(kappa_integral(&k, 1.0, 0.5).is_err());
    }
}
