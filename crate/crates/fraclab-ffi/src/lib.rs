//! C ABI for fraclab: opaque handles for grids and fields, status codes for
//! every fallible call, and plain doubles for scalars. All handles are owned
//! by the caller and released with the matching `_free` function.
//!
//! The generated header lives at `include/fraclab.h`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use fraclab_core::{
    apply_semigroup, decay_exponent, kernel_realspace, local_time_estimate, lq_norm,
    luxemburg_norm, regime_classify, step_evolve, EtdOptions, Error, GridFunction, GridSpec,
    Nonlinearity, OrliczGauge, Outcome,
};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FraclabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    HypothesisViolated = 3,
    NonFinite = 4,
    Overflow = 5,
    Diverged = 6,
    IoError = 7,
    Panic = 8,
}

fn status_of(err: &Error) -> FraclabStatus {
    match err {
        Error::InvalidGrid(_) | Error::InvalidParam(_) | Error::Parse(_) => {
            FraclabStatus::InvalidArgument
        }
        Error::Hypothesis(_) | Error::EmptyWindow(_) => FraclabStatus::HypothesisViolated,
        Error::GridMismatch | Error::NonFinite => FraclabStatus::NonFinite,
        Error::Overflow => FraclabStatus::Overflow,
        Error::Diverged { .. } => FraclabStatus::Diverged,
        Error::Io(_) => FraclabStatus::IoError,
    }
}

/// Orlicz gauge selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FraclabGauge {
    ExpLp = 0,
    ExpLpReduced = 1,
    Power = 2,
}

/// Terminal state of an evolution run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FraclabOutcome {
    Converged = 0,
    IterationCap = 1,
    Diverged = 2,
}

/// Opaque grid handle.
pub struct FraclabGrid {
    spec: GridSpec,
}

/// Opaque field handle.
pub struct FraclabField {
    field: GridFunction,
}

fn guard<F: FnOnce() -> FraclabStatus>(f: F) -> FraclabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => FraclabStatus::Panic,
    }
}

/// Creates a periodic grid on [-half_width, half_width)^n with
/// points_per_axis nodes per axis (a power of two, at least 8).
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fraclab_grid_new(
    n: usize,
    half_width: f64,
    points_per_axis: usize,
    out: *mut *mut FraclabGrid,
) -> FraclabStatus {
    if out.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| match GridSpec::new(n, half_width, points_per_axis) {
        Ok(spec) => {
            unsafe { *out = Box::into_raw(Box::new(FraclabGrid { spec })) };
            FraclabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a grid handle; a null pointer is a no-op.
///
/// # Safety
/// `grid` must be null or a pointer returned by `fraclab_grid_new`.
#[no_mangle]
pub unsafe extern "C" fn fraclab_grid_free(grid: *mut FraclabGrid) {
    if !grid.is_null() {
        drop(unsafe { Box::from_raw(grid) });
    }
}

/// Total node count N^n of the grid.
///
/// # Safety
/// `grid` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fraclab_grid_node_count(
    grid: *const FraclabGrid,
    out: *mut usize,
) -> FraclabStatus {
    if grid.is_null() || out.is_null() {
        return FraclabStatus::NullPointer;
    }
    unsafe { *out = (*grid).spec.total_nodes() };
    FraclabStatus::Ok
}

/// Wraps caller-provided values (row-major node order, length N^n) as a field.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fraclab_field_from_values(
    grid: *const FraclabGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut FraclabField,
) -> FraclabStatus {
    if grid.is_null() || values.is_null() || out.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| {
        let spec = unsafe { (*grid).spec };
        let data = unsafe { std::slice::from_raw_parts(values, len) }.to_vec();
        match GridFunction::from_values(spec, data) {
            Ok(field) => {
                unsafe { *out = Box::into_raw(Box::new(FraclabField { field })) };
                FraclabStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a field handle; a null pointer is a no-op.
///
/// # Safety
/// `field` must be null or a pointer returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fraclab_field_free(field: *mut FraclabField) {
    if !field.is_null() {
        drop(unsafe { Box::from_raw(field) });
    }
}

/// Copies the field's values into the caller's buffer of length `len` (= N^n).
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fraclab_field_copy_values(
    field: *const FraclabField,
    out: *mut f64,
    len: usize,
) -> FraclabStatus {
    if field.is_null() || out.is_null() {
        return FraclabStatus::NullPointer;
    }
    let values = unsafe { &(*field).field }.values();
    if values.len() != len {
        return FraclabStatus::InvalidArgument;
    }
    unsafe { std::ptr::copy_nonoverlapping(values.as_ptr(), out, len) };
    FraclabStatus::Ok
}

/// Discrete L^q norm; pass q = INFINITY for the sup norm.
///
/// # Safety
/// `field` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fraclab_field_lq_norm(
    field: *const FraclabField,
    q: f64,
    out: *mut f64,
) -> FraclabStatus {
    if field.is_null() || out.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| match lq_norm(unsafe { &(*field).field }, q) {
        Ok(v) => {
            unsafe { *out = v };
            FraclabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Luxemburg norm for the selected gauge with exponent p.
///
/// # Safety
/// `field`, `out_norm` must be valid; `out_iterations` may be null.
#[no_mangle]
pub unsafe extern "C" fn fraclab_luxemburg_norm(
    field: *const FraclabField,
    gauge: FraclabGauge,
    p: f64,
    tol: f64,
    out_norm: *mut f64,
    out_iterations: *mut usize,
) -> FraclabStatus {
    if field.is_null() || out_norm.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| {
        let gauge = match gauge {
            FraclabGauge::ExpLp => OrliczGauge::exp_lp(p),
            FraclabGauge::ExpLpReduced => OrliczGauge::exp_lp_reduced(p),
            FraclabGauge::Power => OrliczGauge::power(p),
        };
        let gauge = match gauge {
            Ok(g) => g,
            Err(e) => return status_of(&e),
        };
        match luxemburg_norm(unsafe { &(*field).field }, gauge, tol) {
            Ok(result) => {
                unsafe {
                    *out_norm = result.norm;
                    if !out_iterations.is_null() {
                        *out_iterations = result.iterations;
                    }
                }
                FraclabStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Applies e^{-t(-Delta)^{beta/2}} and returns a new field handle.
///
/// # Safety
/// `field` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fraclab_apply_semigroup(
    field: *const FraclabField,
    beta: f64,
    t: f64,
    out: *mut *mut FraclabField,
) -> FraclabStatus {
    if field.is_null() || out.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| match apply_semigroup(unsafe { &(*field).field }, beta, t) {
        Ok(v) => {
            unsafe { *out = Box::into_raw(Box::new(FraclabField { field: v })) };
            FraclabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Samples the real-space kernel S_beta(., t) on the grid (t > 0).
///
/// # Safety
/// `grid` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fraclab_kernel_realspace(
    grid: *const FraclabGrid,
    beta: f64,
    t: f64,
    out: *mut *mut FraclabField,
) -> FraclabStatus {
    if grid.is_null() || out.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| match kernel_realspace(unsafe { &(*grid).spec }, beta, t) {
        Ok(v) => {
            unsafe { *out = Box::into_raw(Box::new(FraclabField { field: v })) };
            FraclabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Local existence time 1/(4 C e^{lambda (2K)^p}).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fraclab_local_time_estimate(
    k_norm: f64,
    m: f64,
    p: f64,
    lambda: f64,
    c: f64,
    out: *mut f64,
) -> FraclabStatus {
    if out.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| match Nonlinearity::new(m, p, lambda, 1.0) {
        Ok(f) => {
            unsafe { *out = local_time_estimate(k_norm, &f, c) };
            FraclabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Decay exponent sigma = 1/(m-1) - n/(beta q).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fraclab_decay_exponent(
    n: usize,
    beta: f64,
    m: f64,
    q: f64,
    out: *mut f64,
) -> FraclabStatus {
    if out.is_null() {
        return FraclabStatus::NullPointer;
    }
    unsafe { *out = decay_exponent(n, beta, m, q) };
    FraclabStatus::Ok
}

/// Classifies beta against n(p-1)/p: 0 = below, 1 = equal, 2 = above.
/// The admissible q interval is written to (out_q_lo, out_q_hi); the upper
/// endpoint is +infinity when unconstrained.
///
/// # Safety
/// All out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fraclab_regime_classify(
    n: usize,
    beta: f64,
    p: f64,
    m: f64,
    out_regime: *mut i32,
    out_q_lo: *mut f64,
    out_q_hi: *mut f64,
) -> FraclabStatus {
    if out_regime.is_null() || out_q_lo.is_null() || out_q_hi.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| match regime_classify(n, beta, p, m) {
        Ok((regime, interval)) => {
            unsafe {
                *out_regime = match regime {
                    fraclab_core::Regime::Below => 0,
                    fraclab_core::Regime::Equal => 1,
                    fraclab_core::Regime::Above => 2,
                };
                *out_q_lo = interval.lo;
                *out_q_hi = interval.hi;
            }
            FraclabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Runs the first-order exponential integrator for
/// u_t + (-Delta)^{beta/2} u = sign |u|^{m-1} u e^{lambda |u|^p}
/// from the given field, writing the final state, outcome, and (on
/// divergence) the crossing time.
///
/// # Safety
/// `field`, `out_final`, and `out_outcome` must be valid; `out_t_max` may be
/// null.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn fraclab_etd_evolve(
    field: *const FraclabField,
    m: f64,
    p: f64,
    lambda: f64,
    sign: f64,
    beta: f64,
    dt: f64,
    steps: usize,
    blow_threshold: f64,
    out_final: *mut *mut FraclabField,
    out_outcome: *mut FraclabOutcome,
    out_t_max: *mut f64,
) -> FraclabStatus {
    if field.is_null() || out_final.is_null() || out_outcome.is_null() {
        return FraclabStatus::NullPointer;
    }
    guard(|| {
        let f = match Nonlinearity::new(m, p, lambda, sign) {
            Ok(f) => f,
            Err(e) => return status_of(&e),
        };
        let opts = EtdOptions {
            blow_threshold,
            record_stride: usize::MAX,
            snapshot_stride: usize::MAX,
            norm_q: 2.0,
            exp_p: p,
            record_exp_norm: false,
        };
        match step_evolve(unsafe { &(*field).field }, &f, beta, dt, steps, &opts) {
            Ok(run) => {
                let last = run.trajectory.states.last().expect("trajectory has states").clone();
                unsafe {
                    *out_final = Box::into_raw(Box::new(FraclabField { field: last }));
                    *out_outcome = match run.status.outcome {
                        Outcome::Converged => FraclabOutcome::Converged,
                        Outcome::IterationCap => FraclabOutcome::IterationCap,
                        Outcome::Diverged => FraclabOutcome::Diverged,
                    };
                    if !out_t_max.is_null() {
                        *out_t_max = run.status.t_max_estimate;
                    }
                }
                FraclabStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_field_round_trip() {
        unsafe {
            let mut grid: *mut FraclabGrid = std::ptr::null_mut();
            assert_eq!(fraclab_grid_new(1, 10.0, 64, &mut grid), FraclabStatus::Ok);
            let mut count = 0usize;
            assert_eq!(fraclab_grid_node_count(grid, &mut count), FraclabStatus::Ok);
            assert_eq!(count, 64);

            let values: Vec<f64> = (0..64).map(|i| (i as f64 * 0.1).sin()).collect();
            let mut field: *mut FraclabField = std::ptr::null_mut();
            assert_eq!(
                fraclab_field_from_values(grid, values.as_ptr(), values.len(), &mut field),
                FraclabStatus::Ok
            );
            let mut back = vec![0.0f64; 64];
            assert_eq!(
                fraclab_field_copy_values(field, back.as_mut_ptr(), back.len()),
                FraclabStatus::Ok
            );
            assert_eq!(values, back);

            let mut norm = 0.0f64;
            assert_eq!(fraclab_field_lq_norm(field, f64::INFINITY, &mut norm), FraclabStatus::Ok);
            assert!(norm > 0.0);

            fraclab_field_free(field);
            fraclab_grid_free(grid);
        }
    }

    #[test]
    fn invalid_grid_is_reported() {
        unsafe {
            let mut grid: *mut FraclabGrid = std::ptr::null_mut();
            assert_eq!(fraclab_grid_new(1, 10.0, 17, &mut grid), FraclabStatus::InvalidArgument);
            assert_eq!(fraclab_grid_new(9, 10.0, 16, &mut grid), FraclabStatus::InvalidArgument);
            assert_eq!(
                fraclab_grid_new(1, 10.0, 16, std::ptr::null_mut()),
                FraclabStatus::NullPointer
            );
        }
    }

    #[test]
    fn semigroup_preserves_mass_through_the_abi() {
        unsafe {
            let mut grid: *mut FraclabGrid = std::ptr::null_mut();
            assert_eq!(fraclab_grid_new(1, 20.0, 256, &mut grid), FraclabStatus::Ok);
            let h = 40.0 / 256.0;
            let values: Vec<f64> =
                (0..256).map(|i| (-(-20.0 + i as f64 * h).powi(2)).exp()).collect();
            let mut field: *mut FraclabField = std::ptr::null_mut();
            assert_eq!(
                fraclab_field_from_values(grid, values.as_ptr(), values.len(), &mut field),
                FraclabStatus::Ok
            );
            let mut evolved: *mut FraclabField = std::ptr::null_mut();
            assert_eq!(fraclab_apply_semigroup(field, 1.5, 0.3, &mut evolved), FraclabStatus::Ok);
            let mut n1_before = 0.0;
            let mut n1_after = 0.0;
            assert_eq!(fraclab_field_lq_norm(field, 1.0, &mut n1_before), FraclabStatus::Ok);
            assert_eq!(fraclab_field_lq_norm(evolved, 1.0, &mut n1_after), FraclabStatus::Ok);
            assert!((n1_before - n1_after).abs() < 1e-10);
            assert_eq!(
                fraclab_apply_semigroup(field, 3.0, 0.3, &mut evolved),
                FraclabStatus::InvalidArgument
            );
            fraclab_field_free(evolved);
            fraclab_field_free(field);
            fraclab_grid_free(grid);
        }
    }

    #[test]
    fn luxemburg_norm_through_the_abi() {
        unsafe {
            let mut grid: *mut FraclabGrid = std::ptr::null_mut();
            // h = 1/64: a measure-1 indicator is 64 nodes.
            assert_eq!(fraclab_grid_new(1, 8.0, 1024, &mut grid), FraclabStatus::Ok);
            let mut values = vec![0.0f64; 1024];
            for slot in values.iter_mut().skip(480).take(64) {
                *slot = 1.0;
            }
            let mut field: *mut FraclabField = std::ptr::null_mut();
            assert_eq!(
                fraclab_field_from_values(grid, values.as_ptr(), values.len(), &mut field),
                FraclabStatus::Ok
            );
            let mut norm = 0.0;
            let mut iterations = 0usize;
            assert_eq!(
                fraclab_luxemburg_norm(field, FraclabGauge::ExpLp, 1.0, 1e-10, &mut norm, &mut iterations),
                FraclabStatus::Ok
            );
            let expected = std::f64::consts::LN_2.recip();
            assert!((norm - expected).abs() < 1e-8, "{norm}");
            assert!(iterations > 0);
            fraclab_field_free(field);
            fraclab_grid_free(grid);
        }
    }

    #[test]
    fn regime_and_sigma_through_the_abi() {
        unsafe {
            let (mut regime, mut lo, mut hi) = (0i32, 0.0f64, 0.0f64);
            assert_eq!(
                fraclab_regime_classify(1, 2.0, 1.2, 4.0, &mut regime, &mut lo, &mut hi),
                FraclabStatus::Ok
            );
            assert_eq!(regime, 2);
            assert!((lo - 18.0).abs() < 1e-12);
            assert!(hi.is_infinite());
            assert_eq!(
                fraclab_regime_classify(1, 2.0, 2.0, 2.0, &mut regime, &mut lo, &mut hi),
                FraclabStatus::HypothesisViolated
            );
            let mut sigma = 0.0;
            assert_eq!(fraclab_decay_exponent(1, 2.0, 4.0, 24.0, &mut sigma), FraclabStatus::Ok);
            assert!((sigma - 0.3125).abs() < 1e-15);
            let mut t = 0.0;
            assert_eq!(
                fraclab_local_time_estimate(0.5, 1.0, 2.0, 1.0, 1.0, &mut t),
                FraclabStatus::Ok
            );
            assert!((t - 0.25 / std::f64::consts::E).abs() < 1e-12);
        }
    }

    #[test]
    fn header_is_generated() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fraclab.h");
        let text = std::fs::read_to_string(header).expect("header generated by build.rs");
        assert!(text.contains("fraclab_luxemburg_norm"));
        assert!(text.contains("FraclabStatus"));
        assert!(text.contains("struct FraclabField"));
    }
}
