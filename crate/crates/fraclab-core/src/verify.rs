//! Theorem-level checks: regime classification, admissible decay indices,
//! log-log decay fitting, smallness budgets, and the auxiliary exponent
//! selection (theta_k, rho_k, a, r) with its beta-function constraints.

use crate::error::{Error, Result};

/// Position of beta relative to the critical value n(p-1)/p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Below,
    Equal,
    Above,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Below => write!(f, "below"),
            Regime::Equal => write!(f, "equal"),
            Regime::Above => write!(f, "above"),
        }
    }
}

/// Open interval of admissible decay indices q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QInterval {
    pub lo: f64,
    /// Infinity when the upper constraint is vacuous (m >= 2).
    pub hi: f64,
}

impl QInterval {
    pub fn contains(&self, q: f64) -> bool {
        q > self.lo && q < self.hi
    }
}

/// Classifies beta against n(p-1)/p and returns the admissible q interval.
///
/// Standing hypotheses: n >= 1, beta in (0, 2], p > 1, m >= p, and
/// n(m-1)/beta >= p. The `Above` regime additionally needs m > p and
/// (2-m)_+ < n(p-1)/(p beta); violations are rejected naming the inequality.
pub fn regime_classify(n: usize, beta: f64, p: f64, m: f64) -> Result<(Regime, QInterval)> {
    if n < 1 {
        return Err(Error::Hypothesis(format!("n >= 1 violated: n = {n}")));
    }
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::Hypothesis(format!("beta in (0, 2] violated: beta = {beta}")));
    }
    if !(p > 1.0) {
        return Err(Error::Hypothesis(format!("p > 1 violated: p = {p}")));
    }
    let nf = n as f64;
    let crit = nf * (p - 1.0) / p;
    // With m = p above the critical line, n(m-1)/beta < p always: the regime
    // forces m > p, so reject this combination with both facts named.
    if beta > crit && m == p {
        return Err(Error::Hypothesis(format!(
            "beta > n(p-1)/p requires m > p: with m = p = {p}, n(m-1)/beta = {} < p",
            nf * (m - 1.0) / beta
        )));
    }
    if !(m >= p) {
        return Err(Error::Hypothesis(format!("m >= p violated: m = {m}, p = {p}")));
    }
    if !(nf * (m - 1.0) / beta >= p) {
        return Err(Error::Hypothesis(format!(
            "n(m-1)/beta >= p violated: n(m-1)/beta = {}, p = {p}",
            nf * (m - 1.0) / beta
        )));
    }
    let two_minus_m = (2.0 - m).max(0.0);
    let hi = if two_minus_m == 0.0 {
        f64::INFINITY
    } else {
        nf * (m - 1.0) / (beta * two_minus_m)
    };
    if beta > crit {
        if !(two_minus_m < crit / beta) {
            return Err(Error::Hypothesis(format!(
                "(2-m)_+ < n(p-1)/(p beta) violated: (2-m)_+ = {two_minus_m}, n(p-1)/(p beta) = {}",
                crit / beta
            )));
        }
        let lo = (m - 1.0) * p / (p - 1.0);
        if !(lo < hi) {
            return Err(Error::Hypothesis(format!("empty q interval ({lo}, {hi})")));
        }
        return Ok((Regime::Above, QInterval { lo, hi }));
    }
    let lo = nf * (m - 1.0) / beta;
    let regime = if beta == crit { Regime::Equal } else { Regime::Below };
    Ok((regime, QInterval { lo, hi }))
}

/// Decay exponent sigma = 1/(m-1) - n/(beta q).
pub fn decay_exponent(n: usize, beta: f64, m: f64, q: f64) -> f64 {
    1.0 / (m - 1.0) - n as f64 / (beta * q)
}

/// A validated decay claim: parameters, index q, and its exponent sigma.
#[derive(Debug, Clone, Copy)]
pub struct DecayTarget {
    pub n: usize,
    pub beta: f64,
    pub p: f64,
    pub m: f64,
    pub q: f64,
    pub regime: Regime,
    pub sigma: f64,
}

impl DecayTarget {
    pub fn new(n: usize, beta: f64, p: f64, m: f64, q: f64) -> Result<Self> {
        let (regime, interval) = regime_classify(n, beta, p, m)?;
        if !interval.contains(q) {
            return Err(Error::Hypothesis(format!(
                "q = {q} outside the admissible interval ({}, {})",
                interval.lo, interval.hi
            )));
        }
        let sigma = decay_exponent(n, beta, m, q);
        if !(sigma > 0.0) {
            return Err(Error::Hypothesis(format!("sigma > 0 violated: sigma = {sigma}")));
        }
        Ok(Self { n, beta, p, m, q, regime, sigma })
    }
}

pub fn sigma_of(target: &DecayTarget) -> f64 {
    target.sigma
}

/// Least-squares slope of log ||u||_q against log t inside the window.
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .map(|&(t, y)| (t, y))
        .collect();
    if pts.len() < 8 {
        return Err(Error::InvalidParam(format!(
            "decay window [{}, {}] holds {} points; need at least 8",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if pts.iter().any(|(t, y)| !(*t > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidParam("decay fit needs positive times and norms".into()));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(t, y)| (t.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if logs.len() > 2 { (ss_res / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok((slope, stderr))
}

/// One-sided envelope check: with C fixed from the first in-window sample,
/// every later sample must satisfy y <= C t^{-sigma} (up to tiny rounding).
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeReport {
    pub c_at_start: f64,
    /// max over the window of y / (C t^{-sigma}).
    pub max_ratio: f64,
    pub ok: bool,
}

pub fn envelope_check(series: &[(f64, f64)], window: (f64, f64), sigma: f64) -> Result<EnvelopeReport> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .copied()
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidParam("empty envelope window".into()));
    }
    let (t0, y0) = pts[0];
    let c = y0 * t0.powf(sigma);
    let mut max_ratio = 0.0f64;
    for &(t, y) in &pts {
        max_ratio = max_ratio.max(y / (c * t.powf(-sigma)));
    }
    Ok(EnvelopeReport { c_at_start: c, max_ratio, ok: max_ratio <= 1.0 + 1e-9 })
}

/// Data for the smallness gate 2^p lambda q (2 eps)^p <= 1.
#[derive(Debug, Clone, Copy)]
pub struct SmallnessBudget {
    /// Data size: ||u0||_{exp L^p} <= eps.
    pub epsilon: f64,
    /// Ball radius of the fixed-point argument (2 eps there).
    pub bulk: f64,
    pub q_aux: f64,
    pub lambda: f64,
    pub p: f64,
}

pub fn smallness_check(budget: &SmallnessBudget) -> Result<bool> {
    if budget.epsilon < 0.0
        || !(budget.q_aux >= 1.0)
        || !(budget.lambda > 0.0)
        || !(budget.p > 0.0)
    {
        return Err(Error::InvalidParam("smallness budget fields must be positive".into()));
    }
    let value = 2f64.powf(budget.p)
        * budget.lambda
        * budget.q_aux
        * (2.0 * budget.epsilon).powf(budget.p);
    Ok(value <= 1.0)
}

/// Which fixed-point estimate the exponents are selected for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionVariant {
    /// Self-map bound in the exp L^p norm (target index p).
    Bound,
    /// Contraction in the weighted L^q metric (target index q).
    Contraction,
}

/// Auxiliary exponents for the k-th term of the power-series estimate.
#[derive(Debug, Clone, Copy)]
pub struct ParameterSelection {
    pub k: usize,
    pub theta: f64,
    pub rho: f64,
    pub a: f64,
    pub r: f64,
    /// 1 - (n/beta)(1/r - 1/target) - sigma (kp+m-1) theta; zero by construction.
    pub identity_residual: f64,
}

/// Picks theta_k at the midpoint of its admissible window (clipped to (0,1)),
/// then derives rho_k, a, r from the defining relations and verifies every
/// constraint the beta-function estimate needs.
pub fn select_parameters(
    target: &DecayTarget,
    k: usize,
    variant: SelectionVariant,
) -> Result<ParameterSelection> {
    let (n, beta, p, m, q, sigma) =
        (target.n as f64, target.beta, target.p, target.m, target.q, target.sigma);
    let kpm = k as f64 * p + m - 1.0;
    let (raw_lo, raw_hi, target_index) = match variant {
        SelectionVariant::Bound => {
            let lo = (1.0 - n * (p - 1.0) / (p * beta)) / (sigma * kpm);
            let hi = (m - 1.0) / kpm;
            (lo, hi, p)
        }
        SelectionVariant::Contraction => {
            let q_floor = (m - 1.0) * p / (p - 1.0);
            if !(q > q_floor) {
                return Err(Error::Hypothesis(format!(
                    "contraction selection needs q > (m-1)p/(p-1): q = {q}, floor = {q_floor}"
                )));
            }
            let lo = (1.0 - n * (q - 1.0) / (q * beta)) / (sigma * kpm);
            let hi = (m - 1.0).min((1.0 - sigma) / sigma) / kpm;
            (lo, hi, q)
        }
    };
    let lo = raw_lo.max(0.0);
    let hi = raw_hi.min(1.0);
    if !(lo < hi) {
        return Err(Error::EmptyWindow(format!(
            "theta window for k = {k} is empty: ({raw_lo}, {raw_hi})"
        )));
    }
    let theta = 0.5 * (lo + hi);
    let inv_rho_scaled = beta / (n * kpm) - beta * theta / (n * (m - 1.0));
    if !(inv_rho_scaled > 0.0) {
        return Err(Error::EmptyWindow(format!(
            "rho is not positive at k = {k}: (1-theta)/rho = {inv_rho_scaled}"
        )));
    }
    let rho = (1.0 - theta) / inv_rho_scaled;
    let a = 1.0 / (kpm * (theta / q + (1.0 - theta) / rho));
    let r = 1.0 / (1.0 / target_index + 1.0 / a);

    // Constraint sweep; each failure names its inequality.
    let rho_floor = n * (m - 1.0) / beta;
    if !(rho >= rho_floor - 1e-9) {
        return Err(Error::Hypothesis(format!(
            "rho_k >= n(m-1)/beta violated at k = {k}: rho = {rho}, floor = {rho_floor}"
        )));
    }
    if !(r >= 1.0 - 1e-12) {
        return Err(Error::Hypothesis(format!("r >= 1 violated at k = {k}: r = {r}")));
    }
    let smoothing_arg = (n / beta) * (1.0 / r - 1.0 / target_index);
    if !(smoothing_arg < 1.0) {
        return Err(Error::Hypothesis(format!(
            "(n/beta)(1/r - 1/target) < 1 violated at k = {k}: {smoothing_arg}"
        )));
    }
    if !(sigma * kpm * theta < 1.0) {
        return Err(Error::Hypothesis(format!(
            "sigma (kp+m-1) theta < 1 violated at k = {k}: {}",
            sigma * kpm * theta
        )));
    }
    if variant == SelectionVariant::Contraction && !(sigma * (1.0 + kpm * theta) < 1.0) {
        return Err(Error::Hypothesis(format!(
            "sigma (1 + (kp+m-1) theta) < 1 violated at k = {k}: {}",
            sigma * (1.0 + kpm * theta)
        )));
    }
    let identity_residual = 1.0 - smoothing_arg - sigma * kpm * theta;
    Ok(ParameterSelection { k, theta, rho, a, r, identity_residual })
}

/// Growth certificate for the Gamma-power factors in the series estimate.
#[derive(Debug, Clone, Copy)]
pub struct GammaGrowthReport {
    /// Smallest C with term_0 <= C and term_k <= C^k k! for 1 <= k <= k_max.
    pub constant: f64,
    /// Ratio of successive series terms, C lambda eps^p.
    pub series_ratio: f64,
    pub converges: bool,
}

/// Finds an empirical C bounding Gamma(rho_k/p + 1)^{(kp+m-1)(1-theta_k)/rho_k}
/// by C^k k! and runs the ratio test for the series sum_k (C lambda)^k eps^{kp}.
pub fn gamma_growth_check(
    selections: &[ParameterSelection],
    p: f64,
    m: f64,
    lambda: f64,
    epsilon: f64,
) -> Result<GammaGrowthReport> {
    if selections.is_empty() {
        return Err(Error::InvalidParam("gamma growth check needs selections".into()));
    }
    let mut constant = 0.0f64;
    for sel in selections {
        let kpm = sel.k as f64 * p + m - 1.0;
        let exponent = kpm * (1.0 - sel.theta) / sel.rho;
        let log_term = exponent * libm::lgamma(sel.rho / p + 1.0);
        if sel.k == 0 {
            // The k = 0 factor is a plain constant prefactor.
            constant = constant.max(log_term.exp());
        } else {
            let log_c = (log_term - libm::lgamma(sel.k as f64 + 1.0)) / sel.k as f64;
            constant = constant.max(log_c.exp());
        }
    }
    let series_ratio = constant * lambda * epsilon.powf(p);
    Ok(GammaGrowthReport { constant, series_ratio, converges: series_ratio < 1.0 })
}
