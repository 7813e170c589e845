//! Flat models of the constant-curvature ambient spaces.
//!
//! A space form of curvature `c` and dimension `m = n + p` is realised inside
//! a flat model space:
//!
//! * `c = 0`: Euclidean space, model dimension `m`, Euclidean inner product;
//! * `c > 0`: the sphere `<x, x> = 1/c` inside Euclidean space of dimension
//!   `m + 1`;
//! * `c < 0`: the pseudosphere `<x, x> = 1/c` (upper sheet, `x_0 > 0`) inside
//!   Minkowski space of dimension `m + 1` with signature `(-, +, ..., +)`.
//!
//! All downstream tensor work happens in model coordinates; this module owns
//! the signature bookkeeping, the on-model residual, and the radial unit
//! normal of the model quadric.

use nalgebra::DVector;

use crate::error::{GeomError, Result};

/// Default acceptance tolerance for `|<x,x> - 1/c|` when a point must lie on
/// the model quadric.
pub const DEFAULT_ON_MODEL_TOL: f64 = 1e-9;

/// A constant-curvature ambient space `M^{n+p}(c)` together with its flat model.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientModel {
    c: f64,
    ambient_dim: usize,
    model_dim: usize,
    signature: Vec<f64>,
}

impl AmbientModel {
    /// Build the model for curvature `c` and ambient dimension `n + p >= 2`.
    pub fn new(c: f64, ambient_dim: usize) -> Result<Self> {
        if !c.is_finite() {
            return Err(GeomError::Config("curvature must be finite".into()));
        }
        if ambient_dim < 2 {
            return Err(GeomError::Config(
                "ambient dimension must be at least 2".into(),
            ));
        }
        let model_dim = if c == 0.0 { ambient_dim } else { ambient_dim + 1 };
        let mut signature = vec![1.0; model_dim];
        if c < 0.0 {
            signature[0] = -1.0;
        }
        Ok(Self {
            c,
            ambient_dim,
            model_dim,
            signature,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Dimension of the ambient space form itself.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the flat model space the computation lives in.
    pub fn model_dim(&self) -> usize {
        self.model_dim
    }

    /// Diagonal of the model inner product, `+1` or `-1` per coordinate.
    pub fn signature(&self) -> &[f64] {
        &self.signature
    }

    /// Model inner product. Euclidean for `c >= 0`, Lorentzian for `c < 0`.
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        if u.len() != self.model_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.model_dim,
                got: u.len(),
            });
        }
        if v.len() != self.model_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.model_dim,
                got: v.len(),
            });
        }
        Ok(self.ip(u, v))
    }

    /// Inner product without dimension checks, for hot internal paths.
    pub(crate) fn ip(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        debug_assert_eq!(u.len(), self.model_dim);
        debug_assert_eq!(v.len(), self.model_dim);
        let mut acc = 0.0;
        for a in 0..self.model_dim {
            acc += self.signature[a] * u[a] * v[a];
        }
        acc
    }

    /// Squared model norm `<v, v>`; may be negative for `c < 0`.
    pub(crate) fn norm2(&self, v: &DVector<f64>) -> f64 {
        self.ip(v, v)
    }

    /// How far `x` is from the model quadric: `|<x,x> - 1/c|`, or `0` when `c = 0`
    /// (every point of the flat model is on the model).
    pub fn on_model_residual(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.model_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.model_dim,
                got: x.len(),
            });
        }
        if self.c == 0.0 {
            return Ok(0.0);
        }
        Ok((self.ip(x, x) - 1.0 / self.c).abs())
    }

    /// Unit normal of the model quadric at `x`, oriented toward the center:
    /// `-sqrt(c) x` for `c > 0` and `sqrt(-c) x` for `c < 0`. Spacelike
    /// (`<n,n> = 1`) on the sphere, timelike (`<n,n> = -1`) on the pseudosphere.
    pub fn radial_normal(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.radial_normal_with_tol(x, DEFAULT_ON_MODEL_TOL)
    }

    /// `radial_normal` with an explicit on-model tolerance.
    pub fn radial_normal_with_tol(&self, x: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        if self.c == 0.0 {
            return Err(GeomError::FlatAmbient);
        }
        let residual = self.on_model_residual(x)?;
        if residual > tol {
            return Err(GeomError::OffModel { residual, tol });
        }
        let scale = if self.c > 0.0 {
            -self.c.sqrt()
        } else {
            (-self.c).sqrt()
        };
        Ok(x * scale)
    }
}
