//! Forward/inverse spectral transforms on periodic grids.
//!
//! Conventions: the forward transform approximates the continuous Fourier
//! integral without any 2π prefactor,
//!
//!   u_hat(xi_k) = h^n sum_j u_j exp(-i xi_k . x_j),
//!
//! so the zero mode equals the discrete integral h^n sum_j u_j exactly
//! (documented constant = 1). The inverse is
//!
//!   u_j = (2L)^{-n} sum_k u_hat(xi_k) exp(i xi_k . x_j),
//!
//! and Parseval reads h^n sum |u_j|^2 = (2L)^{-n} sum |u_hat_k|^2.
//! Spectra are stored in FFT index order per axis: index k maps to the signed
//! frequency pi k'/L with k' = k for k < N/2 and k' = k - N otherwise.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};

/// Complex spectrum of a real field, in FFT index layout.
#[derive(Debug, Clone)]
pub struct SpectrumFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl SpectrumFunction {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The zero mode, equal to h^n sum_j u_j for spectra of real fields.
    pub fn zero_mode(&self) -> Complex64 {
        self.values[0]
    }

    /// (2L)^{-n} sum_k |u_hat_k|^2, the spectral side of Parseval.
    pub fn l2_sum(&self) -> f64 {
        let box_volume = (2.0 * self.spec.half_width()).powi(self.spec.dim() as i32);
        self.values.iter().map(|c| c.norm_sqr()).sum::<f64>() / box_volume
    }
}

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// In-place unnormalized DFT along every axis of a row-major n-d buffer.
fn fft_nd(spec: &GridSpec, data: &mut [Complex64], forward: bool) {
    let n = spec.dim();
    let len = spec.points_per_axis();
    let fft = plan(len, forward);
    let mut line = vec![Complex64::default(); len];
    for axis in 0..n {
        let stride = len.pow((n - 1 - axis) as u32);
        let block = stride * len;
        let blocks = data.len() / block;
        for b in 0..blocks {
            for off in 0..stride {
                let base = b * block + off;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, slot) in line.iter().enumerate() {
                    data[base + i * stride] = *slot;
                }
            }
        }
    }
}

/// Unnormalized forward DFT of a real field (no phase or h^n factors).
pub(crate) fn dft_forward(spec: &GridSpec, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(spec, &mut data, true);
    data
}

/// Inverse of [`dft_forward`]: normalizes by N^n and returns real parts.
pub(crate) fn dft_inverse_real(spec: &GridSpec, mut data: Vec<Complex64>) -> Vec<f64> {
    fft_nd(spec, &mut data, false);
    let scale = 1.0 / spec.total_nodes() as f64;
    data.iter().map(|c| c.re * scale).collect()
}

/// Parity of the sum of axis indices; carries the phase factor (-1)^{k1+..+kn}
/// relating grid coordinates starting at -L to the DFT's 0-based indexing.
fn sign_at(spec: &GridSpec, flat: usize) -> f64 {
    let idx = spec.axis_indices(flat);
    let s: usize = idx[..spec.dim()].iter().sum();
    if s.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform with the documented physical convention.
pub fn to_spectrum(u: &GridFunction) -> Result<SpectrumFunction> {
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let spec = *u.spec();
    let mut data = dft_forward(&spec, u.values());
    let h_n = spec.node_measure();
    for (flat, c) in data.iter_mut().enumerate() {
        *c *= h_n * sign_at(&spec, flat);
    }
    Ok(SpectrumFunction { spec, values: data })
}

/// Inverse transform; returns the real part of the reconstruction.
pub fn from_spectrum(s: &SpectrumFunction) -> GridFunction {
    let spec = s.spec;
    let h_n = spec.node_measure();
    let data: Vec<Complex64> = s
        .values
        .iter()
        .enumerate()
        .map(|(flat, c)| c * (sign_at(&spec, flat) / h_n))
        .collect();
    let values = dft_inverse_real(&spec, data);
    GridFunction::from_values(spec, values).expect("length preserved by transform")
}

/// Builds a spectrum directly from per-frequency values (FFT layout).
pub fn spectrum_from_fn(spec: GridSpec, f: impl Fn(usize) -> Complex64) -> SpectrumFunction {
    let values = (0..spec.total_nodes()).map(f).collect();
    SpectrumFunction { spec, values }
}
