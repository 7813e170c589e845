//! Identity tests and classification of the second fundamental form.
//!
//! Everything here consumes the pointwise output of
//! [`GeometryEngine`](crate::tensors::GeometryEngine) and reduces it to
//! scalar residuals and discrete labels:
//!
//! * structural identities every immersion must satisfy (the Gauss, Codazzi,
//!   and Ricci equations), reported as normalized residuals,
//! * how the second fundamental form varies from point to point: vanishing,
//!   parallel, recurrent with an extracted coefficient one-form, or none of
//!   those,
//! * spectral structure of shape operators, the first normal space, product
//!   splitting of the metric, and the span actually filled by the immersion.
//!
//! Residuals are dimensionless: differences are divided by the magnitude of
//! the tensors entering the identity, with a `1 +` guard so that identically
//! small data does not inflate the quotient.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jets::ImmersionChart;
use crate::tensors::{metric_sqrt_pair, DerivedTensors, GeometryEngine, PointGeometry};

/// Thresholds used by the classification and identity checks. All are
/// relative unless stated otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// `|nabla_bar b|` below `parallel * (1 + |b|)` counts as parallel.
    pub parallel: f64,
    /// Relative best-fit residual below which `b` counts as recurrent.
    pub recurrent: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Absolute cutoff below which `b` counts as identically zero.
    pub b_zero: f64,
    /// Absolute cutoff for membership in the curved model spaces.
    pub on_model: f64,
    /// Ceiling for the structural identity residuals.
    pub identity: f64,
    /// Relative cutoff for the single-eigenvalue spectrum pattern.
    pub pattern: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            parallel: 1e-4,
            recurrent: 1e-2,
            rank: 1e-6,
            b_zero: 1e-8,
            on_model: 1e-9,
            identity: 1e-3,
            pattern: 1e-4,
        }
    }
}

impl Tolerances {
    /// Override one threshold by name; names match the field names.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value <= 0.0 {
            return Err(GeomError::Config(format!(
                "tolerance {name} must be a positive number, got {value}"
            )));
        }
        match name {
            "parallel" => self.parallel = value,
            "recurrent" => self.recurrent = value,
            "rank" => self.rank = value,
            "b_zero" => self.b_zero = value,
            "on_model" => self.on_model = value,
            "identity" => self.identity = value,
            "pattern" => self.pattern = value,
            _ => {
                return Err(GeomError::Config(format!(
                    "unknown tolerance {name}; known: parallel, recurrent, rank, b_zero, on_model, identity, pattern"
                )))
            }
        }
        Ok(())
    }
}

/// Rectangular sample grid in chart coordinates.
#[derive(Debug, Clone)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

impl Grid {
    /// Evenly spaced samples of `bounds`, `counts[k]` per axis.
    pub fn linspace(bounds: &[[f64; 2]], counts: &[usize]) -> Result<Self> {
        if bounds.len() != counts.len() {
            return Err(GeomError::Config(
                "grid bounds and counts must have matching lengths".into(),
            ));
        }
        let mut axes = Vec::with_capacity(bounds.len());
        for (b, &m) in bounds.iter().zip(counts) {
            if m < 3 {
                return Err(GeomError::Config(format!(
                    "each grid axis needs at least 3 samples, got {m}"
                )));
            }
            if !(b[1] > b[0]) {
                return Err(GeomError::Config("grid bounds must be increasing".into()));
            }
            let step = (b[1] - b[0]) / (m - 1) as f64;
            axes.push((0..m).map(|i| b[0] + step * i as f64).collect());
        }
        Ok(Self { axes })
    }

    /// Evenly spaced grid over the chart domain, shrunk by three default
    /// difference steps per side so every stencil stays inside the domain.
    pub fn interior(chart: &ImmersionChart, counts: &[usize]) -> Result<Self> {
        if counts.len() != chart.n() {
            return Err(GeomError::Config(format!(
                "grid needs {} axis counts, got {}",
                chart.n(),
                counts.len()
            )));
        }
        let steps = chart.default_steps();
        let bounds: Vec<[f64; 2]> = chart
            .domain()
            .iter()
            .zip(&steps)
            .map(|(d, h)| [d[0] + 3.0 * h, d[1] - 3.0 * h])
            .collect();
        Self::linspace(&bounds, counts)
    }

    pub fn from_axes(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.iter().any(|a| a.is_empty()) {
            return Err(GeomError::Config("grid axes must be nonempty".into()));
        }
        Ok(Self { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    /// All grid points, last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut pts = vec![Vec::new()];
        for axis in &self.axes {
            let mut next = Vec::with_capacity(pts.len() * axis.len());
            for head in &pts {
                for &x in axis {
                    let mut q = head.clone();
                    q.push(x);
                    next.push(q);
                }
            }
            pts = next;
        }
        pts
    }
}

/// How the second fundamental form varies along the submanifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecurrenceStatus {
    /// `b` vanishes identically (totally geodesic).
    BZero,
    /// `nabla_bar b` vanishes (parallel second fundamental form).
    Parallel,
    /// `nabla_bar b = mu (x) b` with `mu` nonzero.
    RecurrentNonparallel,
    /// No recurrence relation fits.
    NotRecurrent,
}

impl fmt::Display for RecurrenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RecurrenceStatus::BZero => "b_zero",
            RecurrenceStatus::Parallel => "parallel",
            RecurrenceStatus::RecurrentNonparallel => "recurrent_nonparallel",
            RecurrenceStatus::NotRecurrent => "not_recurrent",
        };
        f.write_str(s)
    }
}

/// Outcome of the pointwise recurrence fit.
#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub status: RecurrenceStatus,
    /// Best-fit coefficients of the recurrence one-form, one per chart axis.
    pub mu: Option<Vec<f64>>,
    /// `|nabla_bar b - mu (x) b| / |b|`, absent when `b` vanishes.
    pub residual: Option<f64>,
    pub b_norm: f64,
    pub nabla_b_norm: f64,
}

/// Least-squares fit of `nabla_bar b = mu (x) b` one derivative slot at a
/// time, then a status from the fit quality.
pub fn extract_recurrence(
    pt: &PointGeometry,
    der: &DerivedTensors,
    tol: &Tolerances,
) -> RecurrenceReport {
    let b_norm = pt.b_norm();
    let nabla_b_norm = der.nabla_bar_b_norm();
    if b_norm <= tol.b_zero {
        return RecurrenceReport {
            status: RecurrenceStatus::BZero,
            mu: None,
            residual: None,
            b_norm,
            nabla_b_norm,
        };
    }

    let n = pt.n();
    let p = pt.p();
    let bb = b_norm * b_norm;
    let mut mu = Vec::with_capacity(n);
    for k in 0..n {
        let mut dot = 0.0;
        for sigma in 0..p {
            dot += der.nabla_bar_b[k][sigma]
                .iter()
                .zip(pt.fund.b[sigma].iter())
                .map(|(x, y)| x * y)
                .sum::<f64>();
        }
        mu.push(dot / bb);
    }

    let mut misfit2 = 0.0;
    for k in 0..n {
        for sigma in 0..p {
            misfit2 += der.nabla_bar_b[k][sigma]
                .iter()
                .zip(pt.fund.b[sigma].iter())
                .map(|(x, y)| {
                    let r = x - mu[k] * y;
                    r * r
                })
                .sum::<f64>();
        }
    }
    let residual = misfit2.sqrt() / b_norm;

    let status = if nabla_b_norm <= tol.parallel * (1.0 + b_norm) {
        RecurrenceStatus::Parallel
    } else if residual <= tol.recurrent {
        RecurrenceStatus::RecurrentNonparallel
    } else {
        RecurrenceStatus::NotRecurrent
    };
    RecurrenceReport {
        status,
        mu: Some(mu),
        residual: Some(residual),
        b_norm,
        nabla_b_norm,
    }
}

/// First normal space: the span of the values of `b` inside the normal bundle.
#[derive(Debug, Clone, Serialize)]
pub struct FirstNormalSpace {
    pub dim: usize,
    /// Frame coefficients of the dominant direction, absent when `b` vanishes.
    /// The largest-magnitude coefficient is normalized to be positive.
    pub xi: Option<Vec<f64>>,
    /// Frame coefficients of an orthonormal basis, `dim` entries.
    pub basis: Vec<Vec<f64>>,
}

/// Rank and dominant direction of the value span of `b` via singular values
/// of the `p x n(n+1)/2` component matrix.
pub fn first_normal_space(pt: &PointGeometry, tol: &Tolerances) -> FirstNormalSpace {
    let n = pt.n();
    let p = pt.p();
    let mut cols = Vec::new();
    for i in 0..n {
        for j in i..n {
            cols.push((i, j));
        }
    }
    let m = DMatrix::from_fn(p, cols.len(), |sigma, c| {
        let (i, j) = cols[c];
        pt.fund.b[sigma][(i, j)]
    });
    let svd = m.svd(true, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if smax <= tol.b_zero {
        return FirstNormalSpace {
            dim: 0,
            xi: None,
            basis: Vec::new(),
        };
    }
    let dim = svd
        .singular_values
        .iter()
        .filter(|&&s| s > tol.rank * smax)
        .count();
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let mut basis = Vec::with_capacity(dim);
    for c in 0..dim {
        basis.push(u.column(c).iter().cloned().collect::<Vec<f64>>());
    }
    let mut xi = basis[0].clone();
    let lead = xi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    if xi[lead] < 0.0 {
        for x in &mut xi {
            *x = -*x;
        }
    }
    FirstNormalSpace {
        dim,
        xi: Some(xi),
        basis,
    }
}

/// Residual of the Gauss equation: the intrinsic curvature against the
/// constant-curvature term plus the quadratic in `b`.
pub fn gauss_residual(pt: &PointGeometry, der: &DerivedTensors, c: f64) -> f64 {
    let n = pt.n();
    let g = &pt.frame.g;
    let bdot = |i: usize, j: usize, k: usize, l: usize| -> f64 {
        pt.fund
            .b
            .iter()
            .map(|bs| bs[(i, j)] * bs[(k, l)])
            .sum::<f64>()
    };
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    // g(R(d_i, d_j) d_k, d_l)
                    let lhs = der.riemann.get(l, k, i, j);
                    let rhs = c * (g[(j, k)] * g[(i, l)] - g[(i, k)] * g[(j, l)])
                        + bdot(i, l, j, k)
                        - bdot(i, k, j, l);
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
    }
    worst / (1.0 + der.riemann.max_abs())
}

/// Residual of the Codazzi equation: in a constant-curvature ambient space
/// `nabla_bar b` must be symmetric in the derivative slot against the first
/// form slot.
pub fn codazzi_residual(pt: &PointGeometry, der: &DerivedTensors) -> f64 {
    let n = pt.n();
    let p = pt.p();
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for k in 0..n {
        for sigma in 0..p {
            scale = scale.max(der.nabla_bar_b[k][sigma].abs().max());
            for i in 0..n {
                for j in 0..n {
                    let d = der.nabla_bar_b[k][sigma][(i, j)] - der.nabla_bar_b[i][sigma][(k, j)];
                    worst = worst.max(d.abs());
                }
            }
        }
    }
    worst / (1.0 + scale)
}

/// Residual of the Ricci equation: the normal curvature paired with two
/// normals against the commutator of their shape operators.
pub fn ricci_equation_residual(pt: &PointGeometry, der: &DerivedTensors) -> f64 {
    let n = pt.n();
    let p = pt.p();
    let g = &pt.frame.g;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for sigma in 0..p {
        for tau in 0..p {
            let comm = &pt.fund.shape_ops[sigma] * &pt.fund.shape_ops[tau]
                - &pt.fund.shape_ops[tau] * &pt.fund.shape_ops[sigma];
            let rhs_mat = g * &comm;
            for i in 0..n {
                for j in 0..n {
                    let lhs = der.normal_curvature.get(tau, sigma, i, j);
                    let rhs = rhs_mat[(j, i)];
                    scale = scale.max(lhs.abs()).max(rhs.abs());
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
    }
    worst / (1.0 + scale)
}

/// Deviation of the Ricci tensor from the Einstein form `c (n - 1) g` taken
/// by totally geodesic submanifolds of the model space.
pub fn einstein_residual(pt: &PointGeometry, der: &DerivedTensors, c: f64) -> f64 {
    let n = pt.n();
    let g = &pt.frame.g;
    let factor = c * (n as f64 - 1.0);
    let mut worst = 0.0_f64;
    let mut gmax = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((der.ricci[(i, j)] - factor * g[(i, j)]).abs());
            gmax = gmax.max(g[(i, j)].abs());
        }
    }
    worst / gmax
}

/// Residual of `sum_sigma b^sigma g^{-1} b^sigma = n sum_sigma H^sigma b^sigma`,
/// the quadratic identity satisfied when every shape operator has at most one
/// nonzero eigenvalue.
pub fn squared_form_residual(pt: &PointGeometry) -> f64 {
    let n = pt.n();
    let p = pt.p();
    let mut lhs = DMatrix::zeros(n, n);
    let mut rhs = DMatrix::zeros(n, n);
    for sigma in 0..p {
        lhs += &pt.fund.b[sigma] * &pt.frame.g_inv * &pt.fund.b[sigma];
        rhs += &pt.fund.b[sigma] * (n as f64 * pt.fund.mean_curvature[sigma]);
    }
    let scale = lhs.abs().max().max(rhs.abs().max());
    (lhs - rhs).abs().max() / (1.0 + scale)
}

/// Spectrum of the shape operator in a chosen normal direction.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeSpectrumReport {
    /// `|trace(A) A - A^2| / (1 + |A|^2)` in Frobenius norms.
    pub proportionality_residual: f64,
    /// Eigenvalues sorted by decreasing magnitude.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    /// One eigenvalue equals the trace, the rest vanish.
    pub single_eigenvalue_pattern: bool,
    /// Dominant eigenvalue magnitude over the largest of the rest, capped.
    pub gap_ratio: f64,
}

/// Spectral test of `A_xi` for the normal direction with frame coefficients
/// `xi`: a shape operator of rank one satisfies `A^2 = trace(A) A`.
pub fn shape_spectrum(
    pt: &PointGeometry,
    xi: &[f64],
    tol: &Tolerances,
) -> Result<ShapeSpectrumReport> {
    let n = pt.n();
    let p = pt.p();
    if xi.len() != p {
        return Err(GeomError::DimensionMismatch {
            expected: p,
            got: xi.len(),
        });
    }
    let mut a = DMatrix::zeros(n, n);
    for sigma in 0..p {
        a += &pt.fund.shape_ops[sigma] * xi[sigma];
    }
    let tr = a.trace();
    let a2 = &a * &a;
    let defect = (&a * tr) - &a2;
    let norm2 = a.iter().map(|x| x * x).sum::<f64>();
    let residual = defect.iter().map(|x| x * x).sum::<f64>().sqrt() / (1.0 + norm2);

    // similar symmetric matrix g^{1/2} A g^{-1/2} has the same spectrum
    let (s, si) = metric_sqrt_pair(&pt.frame.g)?;
    let sym = &s * &a * &si;
    let sym = (&sym + &sym.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().cloned().collect();
    eigenvalues.sort_by(|x, y| y.abs().partial_cmp(&x.abs()).unwrap());

    let lead = eigenvalues[0];
    let tail = eigenvalues[1..]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    let band = tol.pattern * (1.0 + tr.abs());
    let single_eigenvalue_pattern = (lead - tr).abs() <= band && tail <= band;
    let gap_ratio = if tail > 0.0 {
        (lead.abs() / tail).min(1e15)
    } else {
        1e15
    };
    Ok(ShapeSpectrumReport {
        proportionality_residual: residual,
        eigenvalues,
        trace: tr,
        single_eigenvalue_pattern,
        gap_ratio,
    })
}

/// Pointwise test of an orthogonal product splitting in adapted coordinates
/// (surfaces only): block metric with each block constant across the other
/// factor, no mixed second fundamental form, straight second factor.
#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub metric_off_diag: f64,
    pub g11_cross_derivative: f64,
    pub g22_cross_derivative: f64,
    pub b_off_diag: f64,
    pub b_second_factor: f64,
    pub max_residual: f64,
}

pub fn product_structure_check(engine: &GeometryEngine, u: &[f64]) -> Result<ProductReport> {
    if u.len() != 2 {
        return Err(GeomError::Config(
            "product splitting check is defined for two-dimensional charts".into(),
        ));
    }
    let pt = engine.point_geometry(u)?;
    let steps = engine.steps();
    let dg = |axis: usize, comp: (usize, usize)| -> Result<f64> {
        let h = steps[axis];
        let mut up = u.to_vec();
        up[axis] += h;
        let mut um = u.to_vec();
        um[axis] -= h;
        let gp = engine.metric_at(&up)?;
        let gm = engine.metric_at(&um)?;
        Ok((gp[comp] - gm[comp]) / (2.0 * h))
    };
    let metric_off_diag = pt.frame.g[(0, 1)].abs();
    let g11_cross_derivative = dg(1, (0, 0))?.abs();
    let g22_cross_derivative = dg(0, (1, 1))?.abs();
    let b_off_diag = pt
        .fund
        .b
        .iter()
        .fold(0.0_f64, |m, bs| m.max(bs[(0, 1)].abs()));
    let b_second_factor = pt
        .fund
        .b
        .iter()
        .fold(0.0_f64, |m, bs| m.max(bs[(1, 1)].abs()));
    let max_residual = metric_off_diag
        .max(g11_cross_derivative)
        .max(g22_cross_derivative)
        .max(b_off_diag)
        .max(b_second_factor);
    Ok(ProductReport {
        metric_off_diag,
        g11_cross_derivative,
        g22_cross_derivative,
        b_off_diag,
        b_second_factor,
        max_residual,
    })
}

/// Worst deviation of the recurrence coefficients from the logarithmic
/// derivative of the mean curvature length, `None` when the mean curvature
/// is too small to difference stably.
pub fn mu_log_h_residual(
    engine: &GeometryEngine,
    pt: &PointGeometry,
    mu: &[f64],
) -> Result<Option<f64>> {
    let steps = engine.steps();
    let order = &pt.frame.seed_order;
    let mut worst = 0.0_f64;
    for (k, &m) in mu.iter().enumerate() {
        let h = steps[k];
        let mut up = pt.u.clone();
        up[k] += h;
        let mut um = pt.u.clone();
        um[k] -= h;
        let hp = engine.mean_curvature_norm_at(&up, order)?;
        let hm = engine.mean_curvature_norm_at(&um, order)?;
        if hp <= 1e-12 || hm <= 1e-12 {
            return Ok(None);
        }
        let d = (hp.ln() - hm.ln()) / (2.0 * h);
        worst = worst.max((m - d).abs());
    }
    Ok(Some(worst))
}

/// Dimension of the smallest totally geodesic subspace of the model that
/// contains the sampled immersion.
#[derive(Debug, Clone, Serialize)]
pub struct CodimReductionReport {
    pub samples: usize,
    /// Rank of the collected span: affine for flat ambient, linear through
    /// the origin for the curved models.
    pub span_rank: usize,
    /// Dimension of the totally geodesic subspace the rank corresponds to.
    pub substrate_dim: usize,
}

/// Rank of the span of positions, tangent spaces, and first normal spaces
/// over the sample points. A submanifold reducible to a lower-dimensional
/// totally geodesic subspace leaves this rank below the model dimension.
pub fn codimension_reduction(
    engine: &GeometryEngine,
    points: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<CodimReductionReport> {
    let n = engine.chart().n();
    let need = 2 * n + 2;
    if points.len() < need {
        return Err(GeomError::TooFewSamples {
            need,
            got: points.len(),
        });
    }
    let flat = engine.ambient().c() == 0.0;
    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut base: Option<DVector<f64>> = None;
    for u in points {
        let pt = engine.point_geometry(u)?;
        if flat {
            match &base {
                None => base = Some(pt.jet.value.clone()),
                Some(b) => cols.push(&pt.jet.value - b),
            }
        } else {
            cols.push(pt.jet.value.clone());
        }
        for d in &pt.jet.d1 {
            cols.push(d.clone());
        }
        let fns = first_normal_space(&pt, tol);
        for coeffs in &fns.basis {
            let mut v = DVector::zeros(pt.jet.value.len());
            for (sigma, &c) in coeffs.iter().enumerate() {
                v += &pt.frame.normals[sigma] * c;
            }
            cols.push(v);
        }
    }
    let rows = cols[0].len();
    let m = DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r]);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let span_rank = if smax <= 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > tol.rank * smax)
            .count()
    };
    let substrate_dim = if flat {
        span_rank
    } else {
        span_rank.saturating_sub(1)
    };
    Ok(CodimReductionReport {
        samples: points.len(),
        span_rank,
        substrate_dim,
    })
}

/// Worst structural-identity residuals over a set of grid points.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub points: usize,
    pub max_gauss: f64,
    pub max_codazzi: f64,
    pub max_ricci: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.max_gauss.max(self.max_codazzi).max(self.max_ricci)
    }
}

pub fn identities(engine: &GeometryEngine, grid: &Grid) -> Result<IdentityReport> {
    let c = engine.ambient().c();
    let mut report = IdentityReport {
        points: 0,
        max_gauss: 0.0,
        max_codazzi: 0.0,
        max_ricci: 0.0,
    };
    for u in grid.points() {
        let (pt, der) = engine.derived(&u)?;
        report.points += 1;
        report.max_gauss = report.max_gauss.max(gauss_residual(&pt, &der, c));
        report.max_codazzi = report.max_codazzi.max(codazzi_residual(&pt, &der));
        report.max_ricci = report.max_ricci.max(ricci_equation_residual(&pt, &der));
    }
    Ok(report)
}

/// Everything classify computes at one grid point.
#[derive(Debug, Clone, Serialize)]
pub struct PointClassification {
    pub u: Vec<f64>,
    pub status: RecurrenceStatus,
    pub mu: Option<Vec<f64>>,
    pub recurrence_residual: Option<f64>,
    pub b_norm: f64,
    pub nabla_b_norm: f64,
    pub mean_curvature_norm: f64,
    pub dim_first_normal: usize,
    pub xi: Option<Vec<f64>>,
    pub einstein_residual: f64,
    pub squared_form_residual: f64,
    pub spectrum: Option<ShapeSpectrumReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationSummary {
    pub points: usize,
    pub status_counts: BTreeMap<String, usize>,
    pub dim_first_normal_mode: usize,
    pub max_recurrence_residual: Option<f64>,
    pub max_einstein_residual: f64,
    pub max_squared_form_residual: f64,
    pub min_b_norm: f64,
    pub max_b_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub per_point: Vec<PointClassification>,
    pub summary: ClassificationSummary,
}

pub fn classify(engine: &GeometryEngine, grid: &Grid, tol: &Tolerances) -> Result<ClassificationReport> {
    let c = engine.ambient().c();
    let mut per_point = Vec::new();
    for u in grid.points() {
        let (pt, der) = engine.derived(&u)?;
        let rec = extract_recurrence(&pt, &der, tol);
        let fns = first_normal_space(&pt, tol);
        let spectrum = match &fns.xi {
            Some(xi) => Some(shape_spectrum(&pt, xi, tol)?),
            None => None,
        };
        per_point.push(PointClassification {
            u,
            status: rec.status,
            mu: rec.mu,
            recurrence_residual: rec.residual,
            b_norm: rec.b_norm,
            nabla_b_norm: rec.nabla_b_norm,
            mean_curvature_norm: pt.mean_curvature_norm(),
            dim_first_normal: fns.dim,
            xi: fns.xi,
            einstein_residual: einstein_residual(&pt, &der, c),
            squared_form_residual: squared_form_residual(&pt),
            spectrum,
        });
    }

    let mut status_counts = BTreeMap::new();
    let mut dim_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut max_recurrence_residual: Option<f64> = None;
    let mut max_einstein_residual = 0.0_f64;
    let mut max_squared_form_residual = 0.0_f64;
    let mut min_b_norm = f64::INFINITY;
    let mut max_b_norm = 0.0_f64;
    for pc in &per_point {
        *status_counts.entry(pc.status.to_string()).or_insert(0) += 1;
        *dim_counts.entry(pc.dim_first_normal).or_insert(0) += 1;
        if let Some(r) = pc.recurrence_residual {
            max_recurrence_residual = Some(max_recurrence_residual.map_or(r, |m| m.max(r)));
        }
        max_einstein_residual = max_einstein_residual.max(pc.einstein_residual);
        max_squared_form_residual = max_squared_form_residual.max(pc.squared_form_residual);
        min_b_norm = min_b_norm.min(pc.b_norm);
        max_b_norm = max_b_norm.max(pc.b_norm);
    }
    let dim_first_normal_mode = dim_counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1))
        .map(|(d, _)| *d)
        .unwrap_or(0);
    let summary = ClassificationSummary {
        points: per_point.len(),
        status_counts,
        dim_first_normal_mode,
        max_recurrence_residual,
        max_einstein_residual,
        max_squared_form_residual,
        min_b_norm: if min_b_norm.is_finite() { min_b_norm } else { 0.0 },
        max_b_norm,
    };
    Ok(ClassificationReport { per_point, summary })
}
