//! Chart evaluation and derivative jets up to order three.
//!
//! An [`ImmersionChart`] maps an `n`-dimensional parameter box into model
//! coordinates. Jets come from one of two paths:
//!
//! * an exact path, when the chart was built from [`Taylor3`] arithmetic
//!   (every catalog chart is), and
//! * a centered finite-difference path over plain evaluations, used for
//!   user-supplied charts and for cross-checking the exact path.
//!
//! Finite differences are second order: first derivatives by centered
//! differences, diagonal second derivatives by the three-point stencil, mixed
//! ones by the four-corner stencil, and third derivatives by nested centered
//! differencing of second-derivative stencils, symmetrized over index
//! permutations.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{GeomError, Result};
use crate::taylor::Taylor3;

/// Lower and upper clamp for the automatic step policy.
pub const STEP_MIN: f64 = 1e-5;
pub const STEP_MAX: f64 = 1e-2;
/// Automatic step: `STEP_SCALE * (domain width)` per axis, clamped.
pub const STEP_SCALE: f64 = 1e-3;

/// All chart derivatives at a point, up to order three.
///
/// `d2` is symmetric in its two axis indices and `d3` fully symmetric in its
/// three; both are stored dense.
#[derive(Debug, Clone)]
pub struct Jet3 {
    pub value: DVector<f64>,
    pub d1: Vec<DVector<f64>>,
    pub d2: Vec<Vec<DVector<f64>>>,
    pub d3: Vec<Vec<Vec<DVector<f64>>>>,
    /// Largest finite-difference step used; `0.0` on the exact path.
    pub step_used: f64,
}

/// Step selection for the finite-difference path.
#[derive(Debug, Clone, Copy)]
pub enum Step {
    /// Per-axis default: `STEP_SCALE * width`, clamped to `[STEP_MIN, STEP_MAX]`.
    Auto,
    /// One explicit step for every axis.
    Fixed(f64),
}

type TaylorFn = dyn Fn(&[Taylor3]) -> Vec<Taylor3> + Send + Sync;
type ValueFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A parametrized piece of submanifold: a map from a closed parameter box
/// into model coordinates.
#[derive(Clone)]
pub struct ImmersionChart {
    n: usize,
    model_dim: usize,
    domain: Vec<[f64; 2]>,
    value_fn: Arc<ValueFn>,
    taylor_fn: Option<Arc<TaylorFn>>,
    use_exact: bool,
}

impl std::fmt::Debug for ImmersionChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImmersionChart")
            .field("n", &self.n)
            .field("model_dim", &self.model_dim)
            .field("domain", &self.domain)
            .field("exact_jet", &self.use_exact)
            .finish()
    }
}

fn validate_shape(n: usize, model_dim: usize, domain: &[[f64; 2]]) -> Result<()> {
    if n == 0 {
        return Err(GeomError::Config("chart needs at least one parameter".into()));
    }
    if model_dim < 2 {
        return Err(GeomError::Config("model dimension must be at least 2".into()));
    }
    if domain.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: domain.len(),
        });
    }
    for d in domain {
        if !d[0].is_finite() || !d[1].is_finite() || d[0] >= d[1] {
            return Err(GeomError::Config(
                "each domain interval must be a finite [lo, hi] with lo < hi".into(),
            ));
        }
    }
    Ok(())
}

impl ImmersionChart {
    /// Chart from third-order jet arithmetic; supplies exact jets.
    pub fn from_taylor<F>(n: usize, domain: Vec<[f64; 2]>, model_dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&[Taylor3]) -> Vec<Taylor3> + Send + Sync + 'static,
    {
        validate_shape(n, model_dim, &domain)?;
        let f = Arc::new(f);
        let fv = Arc::clone(&f);
        let value_fn = move |u: &[f64]| -> Vec<f64> {
            let consts: Vec<Taylor3> = u.iter().map(|&x| Taylor3::constant(n, x)).collect();
            fv(&consts).iter().map(|t| t.value()).collect()
        };
        Ok(Self {
            n,
            model_dim,
            domain,
            value_fn: Arc::new(value_fn),
            taylor_fn: Some(f),
            use_exact: true,
        })
    }

    /// Chart from a plain evaluation closure; jets are finite-difference only.
    pub fn from_value_fn<F>(n: usize, domain: Vec<[f64; 2]>, model_dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        validate_shape(n, model_dim, &domain)?;
        Ok(Self {
            n,
            model_dim,
            domain,
            value_fn: Arc::new(f),
            taylor_fn: None,
            use_exact: false,
        })
    }

    /// Same chart with the exact-jet path switched off, so every jet is
    /// produced by finite differences. Used to cross-validate the two paths.
    pub fn without_exact_jet(&self) -> Self {
        let mut c = self.clone();
        c.use_exact = false;
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model_dim(&self) -> usize {
        self.model_dim
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }

    pub fn has_exact_jet(&self) -> bool {
        self.use_exact && self.taylor_fn.is_some()
    }

    /// Per-axis automatic finite-difference steps for this chart.
    pub fn default_steps(&self) -> Vec<f64> {
        self.domain
            .iter()
            .map(|d| (STEP_SCALE * (d[1] - d[0])).clamp(STEP_MIN, STEP_MAX))
            .collect()
    }

    fn check_point(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                got: u.len(),
            });
        }
        for (i, (&x, d)) in u.iter().zip(&self.domain).enumerate() {
            let slack = 1e-12 * (1.0 + d[0].abs() + d[1].abs());
            if x < d[0] - slack || x > d[1] + slack {
                return Err(GeomError::StencilOutOfDomain { axis: i });
            }
        }
        Ok(())
    }

    /// Evaluate the chart, checking domain membership and finiteness.
    pub fn eval(&self, u: &[f64]) -> Result<DVector<f64>> {
        self.check_point(u)?;
        self.eval_unchecked(u)
    }

    fn eval_unchecked(&self, u: &[f64]) -> Result<DVector<f64>> {
        let out = (self.value_fn)(u);
        if out.len() != self.model_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.model_dim,
                got: out.len(),
            });
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::NonFiniteEval);
        }
        Ok(DVector::from_vec(out))
    }
}

/// Evaluate the full jet of `chart` at `u`.
///
/// Uses the exact path when the chart has one; otherwise centered finite
/// differences with the requested step. The finite-difference path needs the
/// stencil, which spans two steps per axis, to stay inside the domain.
pub fn eval_jet3(chart: &ImmersionChart, u: &[f64], step: Step) -> Result<Jet3> {
    chart.check_point(u)?;
    if chart.has_exact_jet() {
        return exact_jet(chart, u);
    }
    let h = match step {
        Step::Auto => chart.default_steps(),
        Step::Fixed(s) => {
            if !(s.is_finite() && s > 0.0) {
                return Err(GeomError::Config("finite-difference step must be positive".into()));
            }
            vec![s; chart.n]
        }
    };
    fd_jet(chart, u, &h)
}

fn exact_jet(chart: &ImmersionChart, u: &[f64]) -> Result<Jet3> {
    let n = chart.n;
    let f = chart.taylor_fn.as_ref().expect("exact path requires taylor closure");
    let vars: Vec<Taylor3> = u
        .iter()
        .enumerate()
        .map(|(i, &x)| Taylor3::variable(n, i, x))
        .collect();
    let out = f(&vars);
    if out.len() != chart.model_dim {
        return Err(GeomError::DimensionMismatch {
            expected: chart.model_dim,
            got: out.len(),
        });
    }
    let m = chart.model_dim;
    let comp = |pick: &dyn Fn(&Taylor3) -> f64| -> DVector<f64> {
        DVector::from_iterator(m, out.iter().map(pick))
    };
    let value = comp(&|t| t.value());
    if value.iter().any(|x| !x.is_finite()) {
        return Err(GeomError::NonFiniteEval);
    }
    let d1: Vec<_> = (0..n).map(|i| comp(&|t| t.grad(i))).collect();
    let d2: Vec<Vec<_>> = (0..n)
        .map(|i| (0..n).map(|j| comp(&|t| t.hess(i, j))).collect())
        .collect();
    let d3: Vec<Vec<Vec<_>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| comp(&|t| t.third(i, j, k))).collect())
                .collect()
        })
        .collect();
    Ok(Jet3 {
        value,
        d1,
        d2,
        d3,
        step_used: 0.0,
    })
}

fn fd_jet(chart: &ImmersionChart, u: &[f64], h: &[f64]) -> Result<Jet3> {
    let n = chart.n;
    for (i, d) in chart.domain.iter().enumerate() {
        let slack = 1e-12 * (1.0 + d[0].abs() + d[1].abs());
        if u[i] - 2.0 * h[i] < d[0] - slack || u[i] + 2.0 * h[i] > d[1] + slack {
            return Err(GeomError::StencilOutOfDomain { axis: i });
        }
    }

    let at = |offsets: &[(usize, f64)]| -> Result<DVector<f64>> {
        let mut pt = u.to_vec();
        for &(axis, off) in offsets {
            pt[axis] += off;
        }
        chart.eval_unchecked(&pt)
    };

    let value = at(&[])?;
    let mut d1 = Vec::with_capacity(n);
    for i in 0..n {
        let plus = at(&[(i, h[i])])?;
        let minus = at(&[(i, -h[i])])?;
        d1.push((plus - minus) / (2.0 * h[i]));
    }

    // Second-derivative stencil of axes (j, k) evaluated at an offset base point.
    let d2_at = |base: &[(usize, f64)], j: usize, k: usize| -> Result<DVector<f64>> {
        let with = |extra: &[(usize, f64)]| -> Result<DVector<f64>> {
            let mut offs = base.to_vec();
            offs.extend_from_slice(extra);
            at(&offs)
        };
        if j == k {
            let plus = with(&[(j, h[j])])?;
            let center = with(&[])?;
            let minus = with(&[(j, -h[j])])?;
            Ok((plus - center * 2.0 + minus) / (h[j] * h[j]))
        } else {
            let pp = with(&[(j, h[j]), (k, h[k])])?;
            let pm = with(&[(j, h[j]), (k, -h[k])])?;
            let mp = with(&[(j, -h[j]), (k, h[k])])?;
            let mm = with(&[(j, -h[j]), (k, -h[k])])?;
            Ok((pp - pm - mp + mm) / (4.0 * h[j] * h[k]))
        }
    };

    let mut d2 = vec![vec![DVector::zeros(chart.model_dim); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = d2_at(&[], i, j)?;
            d2[i][j] = v.clone();
            d2[j][i] = v;
        }
    }

    // Nested centered difference of a d2 stencil along an outer axis.
    let raw3 = |outer: usize, j: usize, k: usize| -> Result<DVector<f64>> {
        let plus = d2_at(&[(outer, h[outer])], j, k)?;
        let minus = d2_at(&[(outer, -h[outer])], j, k)?;
        Ok((plus - minus) / (2.0 * h[outer]))
    };

    let mut d3 = vec![vec![vec![DVector::zeros(chart.model_dim); n]; n]; n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                // Average the distinct outer-axis choices for the multiset
                // {i, j, k}; each raw estimate differs only by stencil error.
                let mut outers: Vec<(usize, usize, usize)> = vec![(i, j, k)];
                if j != i {
                    outers.push((j, i, k));
                }
                if k != i && k != j {
                    outers.push((k, i, j));
                }
                let mut acc = DVector::zeros(chart.model_dim);
                for &(o, a, b) in &outers {
                    acc += raw3(o, a, b)?;
                }
                acc /= outers.len() as f64;
                for perm in [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ] {
                    d3[perm.0][perm.1][perm.2] = acc.clone();
                }
            }
        }
    }

    let step_used = h.iter().cloned().fold(0.0_f64, f64::max);
    Ok(Jet3 {
        value,
        d1,
        d2,
        d3,
        step_used,
    })
}

/// Largest absolute entry-wise differences `(d1, d2, d3)` between two jets at
/// the same point. Used to cross-validate the exact and finite-difference paths.
pub fn max_jet_errors(a: &Jet3, b: &Jet3) -> (f64, f64, f64) {
    let n = a.d1.len();
    let mut e1 = 0.0_f64;
    let mut e2 = 0.0_f64;
    let mut e3 = 0.0_f64;
    for i in 0..n {
        e1 = e1.max((&a.d1[i] - &b.d1[i]).abs().max());
        for j in 0..n {
            e2 = e2.max((&a.d2[i][j] - &b.d2[i][j]).abs().max());
            for k in 0..n {
                e3 = e3.max((&a.d3[i][j][k] - &b.d3[i][j][k]).abs().max());
            }
        }
    }
    (e1, e2, e3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn parabola_1d() -> ImmersionChart {
        ImmersionChart::from_taylor(1, vec![[-2.0, 2.0]], 2, |u| {
            let x = &u[0];
            vec![x.clone(), x.mul(x).scale(0.5)]
        })
        .unwrap()
    }

    /// Patch of the unit sphere with closed-form jets.
    fn sphere_patch() -> ImmersionChart {
        ImmersionChart::from_taylor(2, vec![[-0.45, 0.45], [0.3, 1.2]], 3, |uv| {
            let (u, v) = (&uv[0], &uv[1]);
            vec![
                u.cos().mul(&v.cos()),
                u.cos().mul(&v.sin()),
                u.sin(),
            ]
        })
        .unwrap()
    }

    #[test]
    fn plane_parabola_jet_at_one() {
        let chart = parabola_1d();
        let jet = eval_jet3(&chart, &[1.0], Step::Auto).unwrap();
        assert_relative_eq!(jet.d1[0][0], 1.0);
        assert_relative_eq!(jet.d1[0][1], 1.0);
        assert_relative_eq!(jet.d2[0][0][0], 0.0);
        assert_relative_eq!(jet.d2[0][0][1], 1.0);
        assert_relative_eq!(jet.d3[0][0][0].abs().max(), 0.0);
        assert_eq!(jet.step_used, 0.0);

        let fd = eval_jet3(&chart.without_exact_jet(), &[1.0], Step::Auto).unwrap();
        let (e1, e2, e3) = max_jet_errors(&jet, &fd);
        assert!(e1 < 1e-9 && e2 < 1e-8 && e3 < 1e-6, "{e1} {e2} {e3}");
        assert!(fd.step_used > 0.0);
    }

    #[test]
    fn finite_differences_match_exact_jets_on_a_curved_patch() {
        let chart = sphere_patch();
        let fd_chart = chart.without_exact_jet();
        for &u in &[[-0.3, 0.5], [0.0, 0.7], [0.25, 1.0]] {
            let exact = eval_jet3(&chart, &u, Step::Auto).unwrap();
            let fd = eval_jet3(&fd_chart, &u, Step::Auto).unwrap();
            let (e1, e2, e3) = max_jet_errors(&exact, &fd);
            assert!(e1 <= 1e-6, "d1 error {e1}");
            assert!(e2 <= 1e-7, "d2 error {e2}");
            assert!(e3 <= 1e-4, "d3 error {e3}");
        }
    }

    #[test]
    fn halving_the_step_quarters_second_derivative_error() {
        // sinh has non-vanishing fourth derivative, so truncation dominates.
        let chart = ImmersionChart::from_taylor(2, vec![[-1.5, 1.5], [-1.5, 1.5]], 2, |uv| {
            let (u, v) = (&uv[0], &uv[1]);
            vec![u.sinh().add(&v.cosh()), u.mul(v).sinh()]
        })
        .unwrap();
        let fd_chart = chart.without_exact_jet();
        let u = [0.8, 0.9];
        let exact = eval_jet3(&chart, &u, Step::Auto).unwrap();
        let coarse = eval_jet3(&fd_chart, &u, Step::Fixed(2e-3)).unwrap();
        let fine = eval_jet3(&fd_chart, &u, Step::Fixed(1e-3)).unwrap();
        let (_, e2c, _) = max_jet_errors(&exact, &coarse);
        let (_, e2f, _) = max_jet_errors(&exact, &fine);
        let ratio = e2c / e2f;
        assert!((3.0..=5.0).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn fd_derivative_arrays_are_symmetric() {
        let chart = sphere_patch().without_exact_jet();
        let jet = eval_jet3(&chart, &[0.1, 0.8], Step::Auto).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(jet.d2[i][j], jet.d2[j][i]);
                for k in 0..2 {
                    assert_eq!(jet.d3[i][j][k], jet.d3[k][j][i]);
                    assert_eq!(jet.d3[i][j][k], jet.d3[j][i][k]);
                }
            }
        }
    }

    #[test]
    fn default_steps_follow_the_clamped_width_rule() {
        let chart = ImmersionChart::from_taylor(
            2,
            vec![[0.0, 2.0], [0.0, 200.0]],
            2,
            |uv| vec![uv[0].clone(), uv[1].clone()],
        )
        .unwrap();
        let steps = chart.default_steps();
        assert_relative_eq!(steps[0], 2e-3);
        assert_relative_eq!(steps[1], STEP_MAX);
    }

    #[test]
    fn stencil_near_the_boundary_is_rejected() {
        let chart = parabola_1d().without_exact_jet();
        let err = eval_jet3(&chart, &[-1.9999], Step::Fixed(1e-3));
        assert!(matches!(err, Err(GeomError::StencilOutOfDomain { axis: 0 })));
        let err = eval_jet3(&chart, &[2.5], Step::Auto);
        assert!(matches!(err, Err(GeomError::StencilOutOfDomain { axis: 0 })));
    }

    #[test]
    fn non_finite_chart_values_are_reported() {
        let chart = ImmersionChart::from_value_fn(1, vec![[-1.0, 1.0]], 2, |u| {
            vec![1.0 / u[0], u[0]]
        })
        .unwrap();
        assert!(matches!(chart.eval(&[0.0]), Err(GeomError::NonFiniteEval)));
    }
}
