use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::arith::{infinite_order, q_pochhammer, PochhammerOrder};
use super::context::QContext;

/// Density of the q-Gaussian law `nu_q` with unit variance.
///
/// With `2 cos(theta) = x sqrt(1 - q)` the density reads
/// `(1/pi) sqrt(1-q) sin(theta) (q; q)_inf |(q e^{2 i theta}; q)_inf|^2`
/// on `|x| < L` and vanishes outside. The complex pair
/// `(q v^2, q v^-2; q)_inf` is a product of conjugates and is evaluated as a
/// squared modulus, factor by factor.
#[derive(Clone, Debug, Serialize)]
pub struct DensityModel {
    ctx: QContext,
    product_order: usize,
    euler: f64,
}

impl DensityModel {
    pub fn new(ctx: &QContext) -> Self {
        let q = ctx.q();
        let product_order = infinite_order(q, q, ctx.tol_product());
        let euler = q_pochhammer(
            Complex64::new(q, 0.0),
            q,
            PochhammerOrder::Finite(product_order),
            ctx.tol_product(),
        )
        .map(|p| p.value.re)
        .unwrap_or(f64::NAN);
        Self {
            ctx: ctx.clone(),
            product_order,
            euler,
        }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    /// Number of factors `M` kept in each infinite product.
    pub fn product_order(&self) -> usize {
        self.product_order
    }

    /// `nu_q'(x)`; zero for `|x| >= L`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let l = self.ctx.support();
        if !(x.abs() < l) {
            return 0.0;
        }
        let theta = (x / l).acos();
        (1.0 - self.ctx.q()).sqrt() / PI * theta.sin() * self.theta_product(theta)
    }

    /// Density of the pushed-forward law in the angle variable,
    /// `nu_q(dx) = (2/pi) sin^2(theta) rho(theta) d theta` on `[0, pi]`.
    pub fn theta_density(&self, theta: f64) -> f64 {
        let s = theta.sin();
        2.0 / PI * s * s * self.theta_product(theta)
    }

    /// `rho(theta) = (q; q)_inf |(q e^{2 i theta}; q)_inf|^2`.
    pub fn theta_product(&self, theta: f64) -> f64 {
        let q = self.ctx.q();
        let c = 2.0 * (2.0 * theta).cos();
        let mut acc = self.euler;
        let mut qk = q;
        for _ in 0..self.product_order {
            // |1 - q^k e^{2 i theta}|^2
            acc *= 1.0 - qk * (c - qk);
            qk *= q;
        }
        acc
    }

    /// Maps `x` in `[-L, L]` to the angle `theta` in `[0, pi]`.
    pub fn theta_of(&self, x: f64) -> f64 {
        (x / self.ctx.support()).clamp(-1.0, 1.0).acos()
    }

    pub fn x_of(&self, theta: f64) -> f64 {
        self.ctx.support() * theta.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::GaussPanels;
    use approx::assert_abs_diff_eq;

    /// Jacobi triple product form of the same density:
    /// `sin(theta) rho(theta) = sum_m (-1)^m q^{m(m+1)/2} sin((2m+1) theta)`.
    fn theta_series(q: f64, theta: f64) -> f64 {
        let mut acc = 0.0;
        for m in 0..200 {
            let c = q.powf((m * (m + 1)) as f64 / 2.0);
            if c < 1e-300 {
                break;
            }
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            acc += s * c * ((2 * m + 1) as f64 * theta).sin();
        }
        2.0 / PI * theta.sin() * acc
    }

    #[test]
    fn product_agrees_with_triple_product_series() {
        for q in [0.1, 0.5, 0.9, 0.98] {
            let model = DensityModel::new(&QContext::new(q).unwrap());
            for i in 1..100 {
                let theta = PI * i as f64 / 100.0;
                assert_abs_diff_eq!(model.theta_density(theta), theta_series(q, theta), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn vanishes_outside_support_and_is_even() {
        let ctx = QContext::new(0.5).unwrap();
        let model = DensityModel::new(&ctx);
        let l = ctx.support();
        assert_eq!(model.evaluate(l + 0.1), 0.0);
        assert_eq!(model.evaluate(l), 0.0);
        assert_eq!(model.evaluate(-l), 0.0);
        for i in 0..50 {
            let x = l * i as f64 / 50.0;
            let (a, b) = (model.evaluate(x), model.evaluate(-x));
            assert!(a >= 0.0);
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn integrates_to_one_and_low_moments() {
        let panels = GaussPanels::new(16, 32);
        for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let ctx = QContext::new(q).unwrap();
            let model = DensityModel::new(&ctx);
            let m = |p: i32| {
                panels.integrate(0.0, PI, |t| model.theta_density(t) * model.x_of(t).powi(p))
            };
            assert_abs_diff_eq!(m(0), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m(1), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m(2), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m(4), 2.0 + q, epsilon = 1e-12);
        }
    }

    #[test]
    fn positive_inside_support() {
        for q in [0.05, 0.5, 0.95] {
            let model = DensityModel::new(&QContext::new(q).unwrap());
            for i in 1..400 {
                let theta = PI * i as f64 / 400.0;
                assert!(model.theta_product(theta) > 0.0);
            }
        }
    }
}
