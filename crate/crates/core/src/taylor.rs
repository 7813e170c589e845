//! Third-order forward-mode scalar jets.
//!
//! `Taylor3` carries a value together with all partial derivatives up to
//! order three with respect to `n` independent variables. Charts written
//! against this type get machine-precision jets for free, which the
//! finite-difference evaluator is then cross-checked against.
//!
//! Second and third derivative arrays are stored dense and kept symmetric by
//! construction, so consumers never need to symmetrize.

/// Value plus derivatives up to order three in `n` variables.
#[derive(Debug, Clone)]
pub struct Taylor3 {
    n: usize,
    v: f64,
    /// Gradient, length `n`.
    g: Vec<f64>,
    /// Hessian, row-major `n x n`, symmetric.
    h: Vec<f64>,
    /// Third derivatives, `n x n x n`, fully symmetric.
    t: Vec<f64>,
}

impl Taylor3 {
    pub fn constant(n: usize, v: f64) -> Self {
        Self {
            n,
            v,
            g: vec![0.0; n],
            h: vec![0.0; n * n],
            t: vec![0.0; n * n * n],
        }
    }

    /// The coordinate function `u_idx`, seeded at value `v`.
    pub fn variable(n: usize, idx: usize, v: f64) -> Self {
        assert!(idx < n, "variable index out of range");
        let mut x = Self::constant(n, v);
        x.g[idx] = 1.0;
        x
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.g[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.n + j]
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        self.t[(i * self.n + j) * self.n + k]
    }

    fn binary_check(&self, rhs: &Self) {
        assert_eq!(self.n, rhs.n, "mixed jet arities");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.binary_check(rhs);
        let mut out = self.clone();
        out.v += rhs.v;
        for (a, b) in out.g.iter_mut().zip(&rhs.g) {
            *a += b;
        }
        for (a, b) in out.h.iter_mut().zip(&rhs.h) {
            *a += b;
        }
        for (a, b) in out.t.iter_mut().zip(&rhs.t) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.v *= s;
        for a in out.g.iter_mut() {
            *a *= s;
        }
        for a in out.h.iter_mut() {
            *a *= s;
        }
        for a in out.t.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn shift(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.v += s;
        out
    }

    /// Leibniz product rule pushed to order three.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.binary_check(rhs);
        let n = self.n;
        let a = self;
        let b = rhs;
        let mut out = Self::constant(n, a.v * b.v);
        for i in 0..n {
            out.g[i] = a.g[i] * b.v + a.v * b.g[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.h[i * n + j] = a.hess(i, j) * b.v
                    + a.g[i] * b.g[j]
                    + a.g[j] * b.g[i]
                    + a.v * b.hess(i, j);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.t[(i * n + j) * n + k] = a.third(i, j, k) * b.v
                        + a.hess(i, j) * b.g[k]
                        + a.hess(i, k) * b.g[j]
                        + a.hess(j, k) * b.g[i]
                        + a.g[i] * b.hess(j, k)
                        + a.g[j] * b.hess(i, k)
                        + a.g[k] * b.hess(i, j)
                        + a.v * b.third(i, j, k);
                }
            }
        }
        out
    }

    /// Chain rule for a scalar function with derivatives `d = [f, f', f'', f''']`
    /// evaluated at `self.value()` (Faa di Bruno up to order three).
    pub fn compose(&self, d: [f64; 4]) -> Self {
        let n = self.n;
        let u = self;
        let mut out = Self::constant(n, d[0]);
        for i in 0..n {
            out.g[i] = d[1] * u.g[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.h[i * n + j] = d[2] * u.g[i] * u.g[j] + d[1] * u.hess(i, j);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.t[(i * n + j) * n + k] = d[3] * u.g[i] * u.g[j] * u.g[k]
                        + d[2]
                            * (u.hess(i, j) * u.g[k]
                                + u.hess(i, k) * u.g[j]
                                + u.hess(j, k) * u.g[i])
                        + d[1] * u.third(i, j, k);
                }
            }
        }
        out
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.compose([c, s, c, s])
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.compose([e, e, e, e])
    }

    pub fn recip(&self) -> Self {
        let x = self.v;
        self.compose([
            1.0 / x,
            -1.0 / (x * x),
            2.0 / (x * x * x),
            -6.0 / (x * x * x * x),
        ])
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.recip())
    }

    pub fn sqrt(&self) -> Self {
        let r = self.v.sqrt();
        self.compose([
            r,
            0.5 / r,
            -0.25 / (r * self.v),
            0.375 / (r * self.v * self.v),
        ])
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// f(u, v) = sin(u v) + u^3 - v / u at (u, v) = (0.7, -0.4).
    /// All partials below are closed forms differentiated by hand.
    #[test]
    fn matches_hand_derivatives_of_a_mixed_expression() {
        let (u0, v0) = (0.7_f64, -0.4_f64);
        let u = Taylor3::variable(2, 0, u0);
        let v = Taylor3::variable(2, 1, v0);
        let f = u
            .mul(&v)
            .sin()
            .add(&u.mul(&u).mul(&u))
            .sub(&v.div(&u));

        let s = (u0 * v0).sin();
        let c = (u0 * v0).cos();
        assert_relative_eq!(f.value(), s + u0.powi(3) - v0 / u0, epsilon = 1e-14);
        // f_u = v cos(uv) + 3u^2 + v/u^2
        assert_relative_eq!(
            f.grad(0),
            v0 * c + 3.0 * u0 * u0 + v0 / (u0 * u0),
            epsilon = 1e-13
        );
        // f_v = u cos(uv) - 1/u
        assert_relative_eq!(f.grad(1), u0 * c - 1.0 / u0, epsilon = 1e-13);
        // f_uu = -v^2 sin(uv) + 6u - 2v/u^3
        assert_relative_eq!(
            f.hess(0, 0),
            -v0 * v0 * s + 6.0 * u0 - 2.0 * v0 / u0.powi(3),
            epsilon = 1e-13
        );
        // f_uv = cos(uv) - uv sin(uv) + 1/u^2
        assert_relative_eq!(
            f.hess(0, 1),
            c - u0 * v0 * s + 1.0 / (u0 * u0),
            epsilon = 1e-13
        );
        // f_uuv = -2v sin(uv) - u v^2 cos(uv) - 2/u^3
        assert_relative_eq!(
            f.third(0, 0, 1),
            -2.0 * v0 * s - u0 * v0 * v0 * c - 2.0 / u0.powi(3),
            epsilon = 1e-13
        );
        // f_vvv = -u^3 cos(uv)
        assert_relative_eq!(f.third(1, 1, 1), -u0.powi(3) * c, epsilon = 1e-13);
    }

    #[test]
    fn derivative_arrays_are_symmetric() {
        let u = Taylor3::variable(2, 0, 1.2);
        let v = Taylor3::variable(2, 1, 0.3);
        let f = u.sinh().mul(&v.cos()).add(&u.mul(&v).exp());
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(f.hess(i, j), f.hess(j, i));
                for k in 0..2 {
                    assert_relative_eq!(f.third(i, j, k), f.third(k, j, i));
                    assert_relative_eq!(f.third(i, j, k), f.third(j, i, k));
                }
            }
        }
    }

    #[test]
    fn sqrt_and_recip_agree_with_closed_forms() {
        let x0 = 2.3_f64;
        let x = Taylor3::variable(1, 0, x0);
        let r = x.sqrt();
        assert_relative_eq!(r.grad(0), 0.5 / x0.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r.hess(0, 0), -0.25 * x0.powf(-1.5), epsilon = 1e-14);
        assert_relative_eq!(r.third(0, 0, 0), 0.375 * x0.powf(-2.5), epsilon = 1e-14);
        let q = x.recip();
        assert_relative_eq!(q.third(0, 0, 0), -6.0 / x0.powi(4), epsilon = 1e-13);
    }
}
