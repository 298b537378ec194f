use std::f64::consts::{FRAC_PI_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use super::context::QContext;
use super::density::DensityModel;
use crate::error::{Error, Result};

const GRID: usize = 4096;
const LOCAL_ORDER: usize = 12;
const MAX_ITER: usize = 100;

/// Cumulative distribution of `nu_q` and its inverse.
///
/// Built once on a uniform grid of `GRID` panels in the angle variable
/// `theta = acos(x / L)`, where the density is an entire function. Two running
/// sums are stored, one from each end of the support, so both tails keep full
/// relative precision. Off-grid values add a local Gauss-Legendre integral
/// from the nearest grid node on the side of the stored tail.
#[derive(Clone, Debug)]
pub struct CdfModel {
    density: DensityModel,
    step: f64,
    /// `upper[i]`: mass of `x >= L cos(theta_i)`, i.e. of `theta <= theta_i`.
    upper: Vec<f64>,
    /// `lower[i]`: mass of `x <= L cos(theta_i)`.
    lower: Vec<f64>,
    local: Vec<(f64, f64)>,
}

impl CdfModel {
    pub fn new(ctx: &QContext) -> Self {
        Self::from_density(DensityModel::new(ctx))
    }

    pub fn from_density(density: DensityModel) -> Self {
        let local = GaussLegendre::new(NonZeroUsize::new(LOCAL_ORDER).unwrap())
            .as_node_weight_pairs()
            .to_vec();
        let step = PI / GRID as f64;
        let mut model = Self {
            density,
            step,
            upper: Vec::new(),
            lower: Vec::new(),
            local,
        };
        let panels: Vec<f64> = (0..GRID)
            .map(|i| model.local_integral(step * i as f64, step * (i + 1) as f64))
            .collect();
        model.upper = running_sum(panels.iter().copied());
        let mut lower = running_sum(panels.iter().rev().copied());
        lower.reverse();
        model.lower = lower;
        model
    }

    pub fn density(&self) -> &DensityModel {
        &self.density
    }

    pub fn ctx(&self) -> &QContext {
        self.density.ctx()
    }

    /// Total mass of the grid sums; equals one up to the density accuracy.
    pub fn total_mass(&self) -> f64 {
        self.upper[GRID]
    }

    /// `F(x) = nu_q((-inf, x])` for `x` in `[-L, L]`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.lower_theta(self.density.theta_of(x)).clamp(0.0, 1.0))
    }

    /// `1 - F(x)`, accurate near the right end.
    pub fn sf(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.upper_theta(self.density.theta_of(x)).clamp(0.0, 1.0))
    }

    /// `F^{-1}(p)` for `p` in `[0, 1]`.
    pub fn inv_cdf(&self, p: f64) -> Result<f64> {
        check_prob("p", p)?;
        let theta = if p <= 0.5 {
            self.theta_for_lower(p)
        } else {
            self.theta_for_upper(1.0 - p)
        };
        Ok(self.density.x_of(theta))
    }

    /// Inverse of [`CdfModel::sf`].
    pub fn inv_sf(&self, s: f64) -> Result<f64> {
        check_prob("s", s)?;
        let theta = if s <= 0.5 {
            self.theta_for_upper(s)
        } else {
            self.theta_for_lower(1.0 - s)
        };
        Ok(self.density.x_of(theta))
    }

    fn check_x(&self, x: f64) -> Result<()> {
        let l = self.ctx().support();
        if x.abs() <= l {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                name: "x",
                value: x,
                lo: -l,
                hi: l,
            })
        }
    }

    fn panel(&self, theta: f64) -> usize {
        ((theta / self.step) as usize).min(GRID - 1)
    }

    fn node(&self, i: usize) -> f64 {
        self.step * i as f64
    }

    /// Mass of `[0, theta]` in the angle variable.
    pub(crate) fn upper_theta(&self, theta: f64) -> f64 {
        let i = self.panel(theta);
        self.upper[i] + self.local_integral(self.node(i), theta)
    }

    /// Mass of `[theta, pi]`.
    pub(crate) fn lower_theta(&self, theta: f64) -> f64 {
        let j = self.panel(theta) + 1;
        self.lower[j] + self.local_integral(theta, self.node(j))
    }

    /// Mass of `[a, b]` in the angle variable, `a <= b`. Short intervals are
    /// integrated directly so small masses keep their relative precision.
    fn local_integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self
            .local
            .iter()
            .map(|&(t, w)| w * self.density.theta_density(mid + half * t))
            .sum::<f64>()
    }

    /// Solves `upper_theta(theta) = t`.
    pub(crate) fn theta_for_upper(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.upper[GRID] {
            return PI;
        }
        let i = self.upper.partition_point(|&u| u <= t).saturating_sub(1).min(GRID - 1);
        let slope = |th: f64| self.density.theta_density(th);
        self.newton_bisect(self.node(i), self.node(i + 1), f64::NAN, |th| self.upper_theta(th) - t, slope)
    }

    /// Solves `lower_theta(theta) = t`.
    pub(crate) fn theta_for_lower(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return PI;
        }
        if t >= self.lower[0] {
            return 0.0;
        }
        // lower is decreasing: first index with lower[i] < t, minus one.
        let i = self.lower.partition_point(|&v| v >= t).saturating_sub(1).min(GRID - 1);
        let slope = |th: f64| -self.density.theta_density(th);
        self.newton_bisect(self.node(i), self.node(i + 1), f64::NAN, |th| self.lower_theta(th) - t, slope)
    }

    /// Root of a monotone `f` on `[lo, hi]`; `slope` gives `f'`.
    fn newton_bisect<F, D>(&self, mut lo: f64, mut hi: f64, guess: f64, f: F, slope: D) -> f64
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let increasing = f(hi) > f(lo);
        let mut theta = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
        for _ in 0..MAX_ITER {
            let r = f(theta);
            if r == 0.0 {
                return theta;
            }
            if (r > 0.0) == increasing {
                hi = theta;
            } else {
                lo = theta;
            }
            let mut next = theta - r / slope(theta);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - theta).abs() <= 4.0 * f64::EPSILON * theta.abs().max(f64::MIN_POSITIVE)
                || hi - lo <= 2.0 * f64::EPSILON * hi
            {
                return next;
            }
            theta = next;
        }
        theta
    }

    /// Mass of `[pi/2 - delta, pi/2]`, equal by symmetry to that of
    /// `[pi/2, pi/2 + delta]`, for `delta` in `[0, pi/2]`.
    pub(crate) fn mass_from_mid(&self, delta: f64) -> f64 {
        if delta <= 4.0 * self.step {
            let h = 0.25 * delta;
            (0..4)
                .map(|i| self.local_offset_integral(h * i as f64, h * (i + 1) as f64))
                .sum()
        } else {
            self.upper_theta(FRAC_PI_2) - self.upper_theta(FRAC_PI_2 - delta)
        }
    }

    /// Solves `mass_from_mid(delta) = t`.
    pub(crate) fn delta_for_mid(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let mid = self.density.theta_density(FRAC_PI_2);
        self.newton_bisect(
            0.0,
            FRAC_PI_2,
            t / mid,
            |d| self.mass_from_mid(d) - t,
            |d| self.density.theta_density(FRAC_PI_2 - d),
        )
    }

    fn local_offset_integral(&self, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self
            .local
            .iter()
            .map(|&(t, w)| w * self.density.theta_density(FRAC_PI_2 - (mid + half * t)))
            .sum::<f64>()
    }
}

fn check_prob(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name,
            value: p,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// Prefix sums with a leading zero, Neumaier-compensated.
fn running_sum(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn endpoints_and_median() {
        for q in [0.1, 0.5, 0.9] {
            let ctx = QContext::new(q).unwrap();
            let cdf = CdfModel::new(&ctx);
            let l = ctx.support();
            assert_abs_diff_eq!(cdf.cdf(-l).unwrap(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(cdf.cdf(l).unwrap(), 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(cdf.cdf(0.0).unwrap(), 0.5, epsilon = 1e-9);
            assert_abs_diff_eq!(cdf.total_mass(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn monotone_on_interior() {
        let ctx = QContext::new(0.6).unwrap();
        let cdf = CdfModel::new(&ctx);
        let l = ctx.support();
        let vals: Vec<f64> = (1..1000).map(|i| cdf.cdf(-l + 2.0 * l * i as f64 / 1000.0).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn inverse_roundtrip() {
        for q in [0.1, 0.5, 0.9] {
            let ctx = QContext::new(q).unwrap();
            let cdf = CdfModel::new(&ctx);
            let l = ctx.support();
            for i in 1..400 {
                let x = -l + 2.0 * l * i as f64 / 400.0;
                if x <= 0.5 * l {
                    let back = cdf.inv_cdf(cdf.cdf(x).unwrap()).unwrap();
                    assert_abs_diff_eq!(back, x, epsilon = 1e-9);
                }
                if x >= -0.5 * l {
                    let back = cdf.inv_sf(cdf.sf(x).unwrap()).unwrap();
                    assert_abs_diff_eq!(back, x, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn tails_sum_to_one() {
        let ctx = QContext::new(0.4).unwrap();
        let cdf = CdfModel::new(&ctx);
        for i in 0..=100 {
            let x = ctx.support() * (i as f64 / 50.0 - 1.0);
            assert_abs_diff_eq!(cdf.cdf(x).unwrap() + cdf.sf(x).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let ctx = QContext::new(0.4).unwrap();
        let cdf = CdfModel::new(&ctx);
        assert!(cdf.inv_cdf(1.5).is_err());
        assert!(cdf.inv_cdf(-0.1).is_err());
        assert!(cdf.cdf(ctx.support() + 1.0).is_err());
        assert_eq!(cdf.inv_cdf(0.0).unwrap(), -ctx.support());
        assert_eq!(cdf.inv_cdf(1.0).unwrap(), ctx.support());
    }
}
