//! Uniform periodic grids on the box [-L, L)^n and discrete L^q norms.
//!
//! Every field in the crate is a real scalar sampled on such a grid; the
//! discrete measure assigns mass h^n to each node, so Riemann sums stand in
//! for integrals over R^n.

use crate::error::{Error, Result};

/// Uniform periodic grid on [-L, L)^n with N nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    half_width: f64,
    points_per_axis: usize,
}

/// Builds a grid spec, rejecting non-power-of-two N, n outside 1..=3, L <= 0.
pub fn make_grid(n: usize, half_width: f64, points_per_axis: usize) -> Result<GridSpec> {
    GridSpec::new(n, half_width, points_per_axis)
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension n = {n} not in {{1, 2, 3}}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width L = {half_width} must be > 0")));
        }
        if !points_per_axis.is_power_of_two() || points_per_axis < 8 {
            return Err(Error::InvalidGrid(format!(
                "N = {points_per_axis} must be a power of two with N >= 8"
            )));
        }
        Ok(Self { n, half_width, points_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Half-width L of the box [-L, L)^n.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Grid spacing h = 2L/N.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Node measure h^n.
    pub fn node_measure(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    pub fn total_nodes(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    /// Coordinate of axis index i: x_i = -L + i h.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Signed frequency of axis index k: xi = pi k'/L with k' in [-N/2, N/2).
    pub fn axis_freq(&self, k: usize) -> f64 {
        let half = self.points_per_axis / 2;
        let signed = if k < half { k as i64 } else { k as i64 - self.points_per_axis as i64 };
        std::f64::consts::PI * signed as f64 / self.half_width
    }

    /// Decomposes a flat row-major node index into per-axis indices.
    pub fn axis_indices(&self, flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rem = flat;
        for slot in out[..self.n].iter_mut().rev() {
            *slot = rem % self.points_per_axis;
            rem /= self.points_per_axis;
        }
        out
    }

    /// Euclidean |xi| at the flat spectral index (FFT layout per axis).
    pub fn freq_norm(&self, flat: usize) -> f64 {
        let idx = self.axis_indices(flat);
        let mut sq = 0.0;
        for &k in &idx[..self.n] {
            let f = self.axis_freq(k);
            sq += f * f;
        }
        sq.sqrt()
    }

    /// Node coordinates at the flat index.
    pub fn node_coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.axis_indices(flat);
        let mut out = [0.0f64; 3];
        for axis in 0..self.n {
            out[axis] = self.axis_coord(idx[axis]);
        }
        out
    }
}

/// Real scalar field sampled on a [`GridSpec`]; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps raw values; the length must equal N^n.
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.total_nodes() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match N^n = {}",
                values.len(),
                spec.total_nodes()
            )));
        }
        Ok(Self { spec, values })
    }

    /// Samples a function of the node coordinates.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..spec.total_nodes())
            .map(|j| {
                let c = spec.node_coords(j);
                f(&c[..spec.dim()])
            })
            .collect();
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![0.0; spec.total_nodes()] }
    }

    /// Constant amplitude on the k nodes nearest the origin (a centered cube
    /// in axis-index space), approximating an indicator of the given measure.
    /// The realized measure is round(measure / h^n) * h^n.
    pub fn indicator(spec: GridSpec, measure: f64, amplitude: f64) -> Result<Self> {
        if !(measure > 0.0) {
            return Err(Error::InvalidParam(format!("indicator measure {measure} must be > 0")));
        }
        let node_measure = spec.node_measure();
        let want = (measure / node_measure).round().max(1.0) as usize;
        if want > spec.total_nodes() {
            return Err(Error::InvalidParam(
                "indicator measure exceeds the box volume".into(),
            ));
        }
        // Edge length per axis: the largest odd-ish cube not exceeding `want`,
        // then pad remaining nodes along the first axis rows.
        let n = spec.dim();
        let side = (want as f64).powf(1.0 / n as f64).floor().max(1.0) as usize;
        let mut chosen: Vec<usize> = cube_near_origin(&spec, side);
        // Rank all nodes by distance from the origin and top up / trim.
        if chosen.len() != want {
            let mut by_dist: Vec<usize> = (0..spec.total_nodes()).collect();
            by_dist.sort_by(|&a, &b| {
                let da = dist2(&spec, a);
                let db = dist2(&spec, b);
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            });
            chosen = by_dist.into_iter().take(want).collect();
        }
        let mut values = vec![0.0; spec.total_nodes()];
        for j in chosen {
            values[j] = amplitude;
        }
        Ok(Self { spec, values })
    }

    /// Realized measure of the support (h^n times the nonzero-node count).
    pub fn support_measure(&self) -> f64 {
        let nz = self.values.iter().filter(|v| **v != 0.0).count();
        nz as f64 * self.spec.node_measure()
    }

    /// Radial Gaussian bump amp * exp(-|x - c|^2 / width^2).
    pub fn bump(spec: GridSpec, amplitude: f64, width: f64, center: &[f64]) -> Self {
        let n = spec.dim();
        let mut c = [0.0f64; 3];
        c[..center.len().min(n)].copy_from_slice(&center[..center.len().min(n)]);
        Self::from_fn(spec, |x| {
            let mut r2 = 0.0;
            for (axis, xi) in x.iter().enumerate() {
                let d = xi - c[axis];
                r2 += d * d;
            }
            amplitude * (-r2 / (width * width)).exp()
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Nodewise map into a new field on the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Nodewise combination of two fields on the same grid.
    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self { spec: self.spec, values })
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }
}

fn dist2(spec: &GridSpec, flat: usize) -> f64 {
    let c = spec.node_coords(flat);
    c[..spec.dim()].iter().map(|x| x * x).sum()
}

fn cube_near_origin(spec: &GridSpec, side: usize) -> Vec<usize> {
    let n = spec.dim();
    let np = spec.points_per_axis();
    let origin = np / 2; // axis index of x = 0
    let lo = origin - side / 2;
    let mut out = Vec::with_capacity(side.pow(n as u32));
    let mut idx = [0usize; 3];
    collect_cube(spec, n, 0, lo, side, &mut idx, &mut out);
    out
}

fn collect_cube(
    spec: &GridSpec,
    n: usize,
    axis: usize,
    lo: usize,
    side: usize,
    idx: &mut [usize; 3],
    out: &mut Vec<usize>,
) {
    if axis == n {
        let mut flat = 0usize;
        for &i in &idx[..n] {
            flat = flat * spec.points_per_axis() + i;
        }
        out.push(flat);
        return;
    }
    for i in lo..lo + side {
        idx[axis] = i;
        collect_cube(spec, n, axis + 1, lo, side, idx, out);
    }
}

/// Discrete L^q norm: (h^n sum |u_j|^q)^{1/q} for finite q, max |u_j| for
/// q = infinity. Rejects q < 1.
pub fn lq_norm(u: &GridFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParam(format!("norm index q = {q} must satisfy q >= 1")));
    }
    if q.is_infinite() {
        return Ok(u.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let h_n = u.spec().node_measure();
    if q == 1.0 {
        return Ok(h_n * u.values().iter().map(|v| v.abs()).sum::<f64>());
    }
    if q == 2.0 {
        return Ok((h_n * u.values().iter().map(|v| v * v).sum::<f64>()).sqrt());
    }
    // Factor out the max to avoid overflow for large q.
    let peak = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = u.values().iter().map(|v| (v.abs() / peak).powf(q)).sum();
    Ok(peak * (h_n * sum).powf(1.0 / q))
}

/// ||u||_p + ||u||_infinity, the norm controlling local existence times.
pub fn lp_linf_norm(u: &GridFunction, p: f64) -> Result<f64> {
    Ok(lq_norm(u, p)? + lq_norm(u, f64::INFINITY)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_grid_accepts_and_derives_spacing() {
        let g = make_grid(1, 10.0, 16).unwrap();
        assert_eq!(g.spacing(), 1.25);
        let g2 = make_grid(2, 1.0, 8).unwrap();
        assert_eq!(g2.spacing(), 0.25);
        // h * N = 2L exactly
        assert_eq!(g.spacing() * 16.0, 20.0);
    }

    #[test]
    fn make_grid_rejects_bad_inputs() {
        assert!(make_grid(1, 10.0, 17).is_err());
        assert!(make_grid(0, 10.0, 16).is_err());
        assert!(make_grid(4, 10.0, 16).is_err());
        assert!(make_grid(1, 0.0, 16).is_err());
        assert!(make_grid(1, -1.0, 16).is_err());
        assert!(make_grid(1, 10.0, 4).is_err());
    }

    #[test]
    fn frequencies_cover_symmetric_range() {
        let g = make_grid(1, 10.0, 16).unwrap();
        assert_eq!(g.axis_freq(0), 0.0);
        let fundamental = std::f64::consts::PI / 10.0;
        assert!((g.axis_freq(1) - fundamental).abs() < 1e-15);
        assert!((g.axis_freq(8) + 8.0 * fundamental).abs() < 1e-15);
        assert!((g.axis_freq(15) + fundamental).abs() < 1e-15);
    }

    #[test]
    fn lq_norm_zero_field() {
        let g = make_grid(1, 10.0, 64).unwrap();
        let u = GridFunction::zeros(g);
        assert_eq!(lq_norm(&u, 2.0).unwrap(), 0.0);
        assert_eq!(lq_norm(&u, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn lq_norm_indicator_unit_mass() {
        // Indicator of [0,1): L2 norm 1 within O(h).
        let g = make_grid(1, 10.0, 1024).unwrap();
        let u = GridFunction::from_fn(g, |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 });
        let n2 = lq_norm(&u, 2.0).unwrap();
        assert!((n2 - 1.0).abs() < g.spacing(), "norm {n2}");
    }

    #[test]
    fn lq_norm_gaussian_matches_quadrature_oracle() {
        // ||e^{-x^2}||_2 = (pi/2)^{1/4}; the Riemann sum is spectrally exact here.
        let g = make_grid(1, 10.0, 1024).unwrap();
        let u = GridFunction::from_fn(g, |x| (-x[0] * x[0]).exp());
        let expected = (std::f64::consts::PI / 2.0).powf(0.25);
        assert!((lq_norm(&u, 2.0).unwrap() - expected).abs() < 1e-6);
    }

    #[test]
    fn lq_norm_rejects_q_below_one() {
        let g = make_grid(1, 10.0, 64).unwrap();
        let u = GridFunction::zeros(g);
        assert!(lq_norm(&u, 0.5).is_err());
    }

    #[test]
    fn indicator_measures_quantize_to_nodes() {
        let g = make_grid(1, 8.0, 1024).unwrap(); // h = 1/64 exactly
        let u = GridFunction::indicator(g, 1.0, 1.0).unwrap();
        assert_eq!(u.support_measure(), 1.0);
        let one_node = GridFunction::indicator(g, g.node_measure() / 2.0, 1.0).unwrap();
        assert_eq!(one_node.support_measure(), g.node_measure());
    }

    #[test]
    fn indicator_2d_measure() {
        let g = make_grid(2, 4.0, 64).unwrap(); // h = 1/8, h^2 = 1/64
        let u = GridFunction::indicator(g, 1.0, 2.0).unwrap();
        assert!((u.support_measure() - 1.0).abs() < 1e-12);
        assert_eq!(lq_norm(&u, f64::INFINITY).unwrap(), 2.0);
    }

    #[test]
    fn interpolation_inequality_holds() {
        // ||u||_r <= ||u||_q^{q/r} ||u||_inf^{1-q/r} for q <= r.
        let g = make_grid(1, 10.0, 256).unwrap();
        let u = GridFunction::from_fn(g, |x| (1.3 * x[0]).sin() + 0.4 * (0.31 * x[0]).cos());
        for (q, r) in [(1.0, 2.0), (2.0, 5.0), (1.0, 7.0), (2.5, 2.5)] {
            let lhs = lq_norm(&u, r).unwrap();
            let rhs = lq_norm(&u, q).unwrap().powf(q / r)
                * lq_norm(&u, f64::INFINITY).unwrap().powf(1.0 - q / r);
            assert!(lhs <= rhs * (1.0 + 1e-12), "q={q} r={r}: {lhs} vs {rhs}");
        }
    }
}
