//! The fractional heat semigroup e^{-t(-Delta)^{beta/2}} as a spectral
//! multiplier, its real-space kernel, and the smoothing estimates it obeys.

use crate::error::{Error, Result};
use crate::grid::{lq_norm, GridFunction, GridSpec};
use crate::orlicz::{exp_lp_norm, NORM_TOL};
use crate::spectral::{dft_forward, dft_inverse_real, from_spectrum, spectrum_from_fn};

/// Fractional order and time of one semigroup application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub beta: f64,
    pub t: f64,
}

impl EvolutionParams {
    pub fn new(beta: f64, t: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::InvalidParam(format!("beta = {beta} must lie in (0, 2]")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParam(format!("t = {t} must be finite and >= 0")));
        }
        Ok(Self { beta, t })
    }
}

/// The multiplier e^{-t |xi|^beta} sampled on a grid's frequency nodes.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    params: EvolutionParams,
    spec: GridSpec,
    multiplier: Vec<f64>,
}

/// Builds the semigroup multiplier; at t = 0 every entry is exactly 1.
pub fn build_kernel(spec: &GridSpec, beta: f64, t: f64) -> Result<SpectralKernel> {
    let params = EvolutionParams::new(beta, t)?;
    let multiplier = (0..spec.total_nodes())
        .map(|flat| (-t * spec.freq_norm(flat).powf(beta)).exp())
        .collect();
    Ok(SpectralKernel { params, spec: *spec, multiplier })
}

impl SpectralKernel {
    pub fn params(&self) -> EvolutionParams {
        self.params
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// Applies the semigroup spectrally; the identity at t = 0 is exact.
    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        if *u.spec() != self.spec {
            return Err(Error::GridMismatch);
        }
        if self.params.t == 0.0 {
            return Ok(u.clone());
        }
        let mut data = dft_forward(&self.spec, u.values());
        for (c, m) in data.iter_mut().zip(self.multiplier.iter()) {
            *c *= m;
        }
        let values = dft_inverse_real(&self.spec, data);
        GridFunction::from_values(self.spec, values)
    }
}

/// e^{-t(-Delta)^{beta/2}} u0, building the kernel on the fly.
pub fn apply_semigroup(u0: &GridFunction, beta: f64, t: f64) -> Result<GridFunction> {
    build_kernel(u0.spec(), beta, t)?.apply(u0)
}

/// Discrete fundamental solution S_beta(. , t) on the grid; rejects t = 0
/// (the delta is not representable).
pub fn kernel_realspace(spec: &GridSpec, beta: f64, t: f64) -> Result<GridFunction> {
    if t <= 0.0 {
        return Err(Error::InvalidParam(format!("kernel sampling needs t > 0, got t = {t}")));
    }
    let kernel = build_kernel(spec, beta, t)?;
    let spectrum = spectrum_from_fn(*spec, |flat| kernel.multiplier[flat].into());
    Ok(from_spectrum(&spectrum))
}

/// Self-similarity checked in the multiplier domain, where it is exact:
/// e^{-t |xi|^beta} = m_1(t^{1/beta} xi). Returns the max absolute deviation.
pub fn check_self_similarity(spec: &GridSpec, beta: f64, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::InvalidParam("self-similarity check needs t > 0".into()));
    }
    let kernel = build_kernel(spec, beta, t)?;
    let scale = t.powf(1.0 / beta);
    let mut max_dev = 0.0f64;
    for flat in 0..spec.total_nodes() {
        let rescaled = (-(scale * spec.freq_norm(flat)).powf(beta)).exp();
        max_dev = max_dev.max((kernel.multiplier[flat] - rescaled).abs());
    }
    Ok(max_dev)
}

/// Enforces the domain-truncation window t^{1/beta} <= L/4.
fn check_time_window(spec: &GridSpec, beta: f64, ts: &[f64]) -> Result<()> {
    for &t in ts {
        if !(t > 0.0) {
            return Err(Error::InvalidParam(format!("time grid entries must be > 0, got {t}")));
        }
        if t.powf(1.0 / beta) > spec.half_width() / 4.0 {
            return Err(Error::Hypothesis(format!(
                "t^{{1/beta}} <= L/4 violated: t = {t}, beta = {beta}, L = {}",
                spec.half_width()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SmoothingRow {
    pub t: f64,
    /// ||e^{-tA} v||_q
    pub lhs: f64,
    /// t^{-(n/beta)(1/r - 1/q)} ||v||_r
    pub bound_shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SmoothingEstimate {
    /// Log-log slope of t -> ||e^{-tA} v||_q.
    pub slope: f64,
    pub rows: Vec<SmoothingRow>,
}

/// L^r -> L^q smoothing: the norm decays like t^{-(n/beta)(1/r-1/q)} for
/// concentrated data, with per-time constants bounded over the window.
pub fn smoothing_estimate(
    v: &GridFunction,
    beta: f64,
    r: f64,
    q: f64,
    t_grid: &[f64],
) -> Result<SmoothingEstimate> {
    if !(1.0 <= r && r <= q) {
        return Err(Error::Hypothesis(format!("smoothing needs 1 <= r <= q, got r = {r}, q = {q}")));
    }
    let spec = v.spec();
    check_time_window(spec, beta, t_grid)?;
    let n = spec.dim() as f64;
    let exponent = (n / beta) * (1.0 / r - 1.0 / q);
    let vr = lq_norm(v, r)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let lhs = lq_norm(&apply_semigroup(v, beta, t)?, q)?;
        let bound_shape = t.powf(-exponent) * vr;
        rows.push(SmoothingRow { t, lhs, bound_shape, ratio: lhs / bound_shape });
    }
    let slope = loglog_slope(rows.iter().map(|r| (r.t, r.lhs)));
    Ok(SmoothingEstimate { slope, rows })
}

/// Least-squares slope of log y against log x.
fn loglog_slope(points: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points.map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}

/// Counts violations of ||e^{-tA} phi||_{exp L^p} <= ||phi||_{exp L^p}
/// beyond a 1e-8 relative slack (expected zero).
pub fn exp_norm_nonexpansive(
    phi: &GridFunction,
    beta: f64,
    p: f64,
    t_grid: &[f64],
) -> Result<usize> {
    let base = exp_lp_norm(phi, p)?;
    let mut violations = 0;
    for &t in t_grid {
        let evolved = apply_semigroup(phi, beta, t)?;
        if exp_lp_norm(&evolved, p)? > base * (1.0 + 1e-8) + 1e-300 {
            violations += 1;
        }
    }
    Ok(violations)
}

#[derive(Debug, Clone)]
pub struct ExpSmoothingProfile {
    /// Fitted constant: the max of the per-time ratios.
    pub constant: f64,
    pub rows: Vec<(f64, f64)>,
}

/// Ratio profile for ||e^{-tA} phi||_{exp L^p} against the bound shape
/// t^{-n/(beta q)} (ln(t^{-n/beta} + 1))^{-1/p} ||phi||_q, 1 <= q <= p.
pub fn exp_smoothing_profile(
    phi: &GridFunction,
    beta: f64,
    p: f64,
    q: f64,
    t_grid: &[f64],
) -> Result<ExpSmoothingProfile> {
    if !(1.0 <= q && q <= p) {
        return Err(Error::Hypothesis(format!("profile needs 1 <= q <= p, got q = {q}, p = {p}")));
    }
    if phi.is_zero() {
        return Err(Error::InvalidParam("smoothing profile is undefined for the zero field".into()));
    }
    let spec = phi.spec();
    check_time_window(spec, beta, t_grid)?;
    let n = spec.dim() as f64;
    let phi_q = lq_norm(phi, q)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut constant = 0.0f64;
    for &t in t_grid {
        let lhs = exp_lp_norm(&apply_semigroup(phi, beta, t)?, p)?;
        let shape = t.powf(-n / (beta * q)) * (t.powf(-n / beta) + 1.0).ln().powf(-1.0 / p) * phi_q;
        let ratio = lhs / shape;
        constant = constant.max(ratio);
        rows.push((t, ratio));
    }
    Ok(ExpSmoothingProfile { constant, rows })
}

/// ||e^{-tA} phi - phi||_{exp L^p} along a sequence of times; for smooth
/// compactly supported data this decreases to zero with t.
pub fn continuity_at_zero(
    phi: &GridFunction,
    beta: f64,
    p: f64,
    t_seq: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(t_seq.len());
    for &t in t_seq {
        let evolved = apply_semigroup(phi, beta, t)?;
        let gap = evolved.zip(phi, |a, b| a - b)?;
        out.push((t, exp_lp_norm(&gap, p)?));
    }
    Ok(out)
}

/// Tolerance used when Luxemburg norms feed inequality checks.
pub const EXP_NORM_TOL: f64 = NORM_TOL;
