//! Induced metric and adapted normal frames.
//!
//! At a chart point the tangent vectors `d1[i]` span the tangent space; the
//! normal space inside the ambient space form is everything orthogonal to
//! them and, for curved ambients, to the radial direction of the model
//! quadric. Normal frames are built by Gram-Schmidt against the model inner
//! product from a deterministic seed basis.
//!
//! Seed selection pivots on the largest projection residual, which keeps the
//! construction well conditioned, and each produced normal keeps a positive
//! inner product with the seed that generated it, which fixes its sign. For
//! finite-difference work the pivot order chosen at the stencil center is
//! reused at the shifted points, so the local frame field is smooth wherever
//! the seeds stay transverse; a sign check across each stencil reports the
//! residual failure mode instead of silently differencing a flipped frame.

use nalgebra::{DMatrix, DVector};

use crate::ambient::AmbientModel;
use crate::error::{GeomError, Result};
use crate::jets::{eval_jet3, ImmersionChart, Jet3, Step};

/// Maximum accepted condition number of the induced metric.
pub const METRIC_COND_MAX: f64 = 1e8;
/// Minimum squared residual for a seed to count as transverse.
pub const SEED_RESIDUAL_TOL: f64 = 1e-10;

/// Metric and adapted normal frame at one chart point.
#[derive(Debug, Clone)]
pub struct FrameData {
    /// Induced metric `g_ij = <d1_i, d1_j>`.
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// Condition number of `g`.
    pub cond: f64,
    /// Orthonormal normals inside the space form, `p = ambient_dim - n` of them.
    pub normals: Vec<DVector<f64>>,
    /// Unit radial normal of the model quadric, `None` for flat ambients.
    pub radial: Option<DVector<f64>>,
    /// Seed indices that produced `normals`, in production order.
    pub seed_order: Vec<usize>,
}

/// Coordinate axes of the model space, the default seed basis.
pub fn standard_seed_basis(model_dim: usize) -> Vec<DVector<f64>> {
    (0..model_dim)
        .map(|i| {
            let mut v = DVector::zeros(model_dim);
            v[i] = 1.0;
            v
        })
        .collect()
}

/// Induced metric, its inverse, and its condition number.
pub fn induced_metric(
    jet: &Jet3,
    a: &AmbientModel,
) -> Result<(DMatrix<f64>, DMatrix<f64>, f64)> {
    let n = jet.d1.len();
    for t in &jet.d1 {
        if t.len() != a.model_dim() {
            return Err(GeomError::DimensionMismatch {
                expected: a.model_dim(),
                got: t.len(),
            });
        }
    }
    let g = DMatrix::from_fn(n, n, |i, j| a.ip(&jet.d1[i], &jet.d1[j]));
    let svals = g.clone().svd(false, false).singular_values;
    let smax = svals.iter().cloned().fold(0.0_f64, f64::max);
    let smin = svals.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !cond.is_finite() || cond > METRIC_COND_MAX {
        return Err(GeomError::DegenerateMetric { cond });
    }
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or(GeomError::DegenerateMetric { cond })?;
    Ok((g, g_inv, cond))
}

/// An orthogonal set with the sign of each member's squared norm, so that
/// projections stay correct in Lorentzian models.
struct OrthoSet {
    vecs: Vec<DVector<f64>>,
    eps: Vec<f64>,
}

impl OrthoSet {
    fn project_out(&self, a: &AmbientModel, v: &DVector<f64>) -> DVector<f64> {
        let mut w = v.clone();
        for (e, &eps) in self.vecs.iter().zip(&self.eps) {
            let coeff = eps * a.ip(&w, e);
            w -= e * coeff;
        }
        w
    }

    fn push(&mut self, v: DVector<f64>, eps: f64) {
        self.vecs.push(v);
        self.eps.push(eps);
    }
}

/// Build the adapted normal frame, choosing seeds by largest residual.
pub fn normal_frame(
    jet: &Jet3,
    a: &AmbientModel,
    seeds: &[DVector<f64>],
    on_model_tol: f64,
) -> Result<FrameData> {
    build_frame(jet, a, seeds, None, on_model_tol)
}

/// Build the adapted normal frame using a fixed, previously pivoted seed order.
pub fn normal_frame_with_order(
    jet: &Jet3,
    a: &AmbientModel,
    seeds: &[DVector<f64>],
    order: &[usize],
    on_model_tol: f64,
) -> Result<FrameData> {
    build_frame(jet, a, seeds, Some(order), on_model_tol)
}

fn build_frame(
    jet: &Jet3,
    a: &AmbientModel,
    seeds: &[DVector<f64>],
    order: Option<&[usize]>,
    on_model_tol: f64,
) -> Result<FrameData> {
    let n = jet.d1.len();
    let m = a.model_dim();
    if n >= a.ambient_dim() {
        return Err(GeomError::Config(
            "chart dimension must be strictly below the ambient dimension".into(),
        ));
    }
    if jet.value.len() != m {
        return Err(GeomError::DimensionMismatch {
            expected: m,
            got: jet.value.len(),
        });
    }
    for s in seeds {
        if s.len() != m {
            return Err(GeomError::DimensionMismatch {
                expected: m,
                got: s.len(),
            });
        }
    }
    let (g, g_inv, cond) = induced_metric(jet, a)?;

    let mut known = OrthoSet {
        vecs: Vec::new(),
        eps: Vec::new(),
    };
    let radial = if a.c() != 0.0 {
        let r = a.radial_normal_with_tol(&jet.value, on_model_tol)?;
        let eps = if a.c() > 0.0 { 1.0 } else { -1.0 };
        known.push(r.clone(), eps);
        Some(r)
    } else {
        None
    };
    for t in &jet.d1 {
        let w = known.project_out(a, t);
        let nrm2 = a.norm2(&w);
        if nrm2 <= SEED_RESIDUAL_TOL {
            return Err(GeomError::DegenerateMetric { cond });
        }
        known.push(w / nrm2.sqrt(), 1.0);
    }

    let p = a.ambient_dim() - n;
    let mut normals = Vec::with_capacity(p);
    let mut seed_order = Vec::with_capacity(p);

    // A produced normal is the normalized projection residual of its seed, so
    // <normal, seed> = |residual| > 0 and the orientation is pinned by the
    // seed itself.
    let mut take = |known: &mut OrthoSet, idx: usize| -> Result<()> {
        let w = known.project_out(a, &seeds[idx]);
        let nrm2 = a.norm2(&w);
        if nrm2 <= SEED_RESIDUAL_TOL {
            return Err(GeomError::SeedSpanDeficient);
        }
        let e = w / nrm2.sqrt();
        known.push(e.clone(), 1.0);
        normals.push(e);
        seed_order.push(idx);
        Ok(())
    };

    match order {
        Some(order) => {
            if order.len() != p {
                return Err(GeomError::Config(format!(
                    "seed order must list exactly {p} seeds"
                )));
            }
            for &idx in order {
                if idx >= seeds.len() {
                    return Err(GeomError::Config("seed order index out of range".into()));
                }
                take(&mut known, idx)?;
            }
        }
        None => {
            let mut used = vec![false; seeds.len()];
            for _ in 0..p {
                let mut best: Option<(usize, f64)> = None;
                for (idx, seed) in seeds.iter().enumerate() {
                    if used[idx] {
                        continue;
                    }
                    let w = known.project_out(a, seed);
                    let nrm2 = a.norm2(&w);
                    if nrm2 > best.map_or(SEED_RESIDUAL_TOL, |(_, b)| b) {
                        best = Some((idx, nrm2));
                    }
                }
                let (idx, _) = best.ok_or(GeomError::SeedSpanDeficient)?;
                used[idx] = true;
                take(&mut known, idx)?;
            }
        }
    }

    Ok(FrameData {
        g,
        g_inv,
        cond,
        normals,
        radial,
        seed_order,
    })
}

/// Centered-difference derivatives of the normal frame field along every
/// chart axis: result`[axis][sigma]` approximates the model-space derivative
/// of `n_sigma`. The frames at the shifted points reuse `order`, and a sign
/// flip between the two sides of any stencil is reported as a gauge error.
pub fn frame_derivative(
    chart: &ImmersionChart,
    a: &AmbientModel,
    u: &[f64],
    seeds: &[DVector<f64>],
    order: &[usize],
    steps: &[f64],
    on_model_tol: f64,
) -> Result<Vec<Vec<DVector<f64>>>> {
    let n = chart.n();
    if steps.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: steps.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    for axis in 0..n {
        let h = steps[axis];
        let frame_at = |sign: f64| -> Result<FrameData> {
            let mut pt = u.to_vec();
            pt[axis] += sign * h;
            let jet = eval_jet3(chart, &pt, Step::Auto)?;
            normal_frame_with_order(&jet, a, seeds, order, on_model_tol)
        };
        let plus = frame_at(1.0)?;
        let minus = frame_at(-1.0)?;
        let mut per_sigma = Vec::with_capacity(plus.normals.len());
        for (np, nm) in plus.normals.iter().zip(&minus.normals) {
            if a.ip(np, nm) < 0.0 {
                return Err(GeomError::GaugeDiscontinuity);
            }
            per_sigma.push((np - nm) / (2.0 * h));
        }
        out.push(per_sigma);
    }
    Ok(out)
}
