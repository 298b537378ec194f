//! The orientation-reversing involution `gamma` that preserves `nu_q`.
//!
//! On each half of the support, `gamma` swaps the mass between `0` and `x`
//! with the mass between `gamma(x)` and the nearer endpoint, so that
//! `F(gamma(x)) + F(x) = 3/2` for `x > 0` and `= 1/2` for `x < 0`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::TanhSinh;
use crate::qspecial::{quadrature, CdfModel, QContext};

/// Step of the tanh-sinh rule used for integrals of functions of `gamma`.
pub const DIRECT_STEP: f64 = 1.0 / 32.0;

const MAX_PUSHFORWARD_ORDER: usize = 12;

#[derive(Clone, Debug)]
pub struct GammaMap {
    cdf: CdfModel,
}

#[derive(Clone, Debug, Serialize)]
pub struct PushforwardRow {
    pub m: usize,
    pub gamma_moment: f64,
    pub reference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PushforwardReport {
    pub rows: Vec<PushforwardRow>,
    pub max_discrepancy: f64,
}

impl GammaMap {
    pub fn new(ctx: &QContext) -> Self {
        Self::from_cdf(CdfModel::new(ctx))
    }

    pub fn from_cdf(cdf: CdfModel) -> Self {
        Self { cdf }
    }

    pub fn ctx(&self) -> &QContext {
        self.cdf.ctx()
    }

    pub fn cdf(&self) -> &CdfModel {
        &self.cdf
    }

    /// `gamma(x)`, with `gamma(0) = gamma(+-L) = 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let l = self.ctx().support();
        if !(x.abs() <= l) {
            return Err(Error::OutOfDomain {
                name: "x",
                value: x,
                lo: -l,
                hi: l,
            });
        }
        if x == 0.0 || x.abs() == l {
            return Ok(0.0);
        }
        let r = x.abs() / l;
        Ok(x.signum() * self.positive_branch(r.acos(), r.asin()))
    }

    /// `gamma(x)` for `x = L cos(theta) = L sin(delta) > 0`, where
    /// `theta + delta = pi/2`. Both angles are passed so that points near
    /// either end of the half-support keep their relative precision.
    ///
    /// The smaller of the two masses on either side of `x` decides which
    /// end the image is measured from.
    pub(crate) fn positive_branch(&self, theta: f64, delta: f64) -> f64 {
        let l = self.ctx().support();
        let inner = self.cdf.mass_from_mid(delta);
        let outer = self.cdf.upper_theta(theta);
        if inner <= outer {
            l * self.cdf.theta_for_upper(inner).cos()
        } else {
            l * self.cdf.delta_for_mid(outer).sin()
        }
    }

    /// The fixed point `x*` on the right half, where `F(x*) = 3/4`.
    pub fn fixed_point(&self) -> f64 {
        self.cdf.inv_sf(0.25).expect("0.25 is a probability")
    }

    /// `nu'(x) + nu'(gamma(x)) gamma'(x)` with `gamma'` by central difference.
    pub fn ode_residual(&self, x: f64, h: f64) -> Result<f64> {
        let l = self.ctx().support();
        let (a, b) = (x - h, x + h);
        if !(h > 0.0) || x == 0.0 || a.abs() >= l || b.abs() >= l || a.signum() != b.signum() {
            return Err(Error::BadStep { x, step: h });
        }
        let density = self.cdf.density();
        let slope = (self.eval(b)? - self.eval(a)?) / (2.0 * h);
        Ok(density.evaluate(x) + density.evaluate(self.eval(x)?) * slope)
    }

    /// Weighted samples `(w, x, gamma(x))` of a tanh-sinh rule for `nu_q`,
    /// applied on the right half of the support and mirrored.
    ///
    /// Works in the angle variable with `s` measured from `x = 0`, so both the
    /// cusp of `gamma` at the origin and its endpoint behaviour sit at the
    /// ends of the unit interval.
    pub fn direct_samples(&self, rule: &TanhSinh) -> Vec<(f64, f64, f64)> {
        let density = self.cdf.density();
        let l = self.ctx().support();
        let mut out = Vec::with_capacity(2 * rule.nodes().len());
        for node in rule.nodes() {
            let theta = FRAC_PI_2 * node.s_complement;
            let delta = FRAC_PI_2 * node.s;
            let w = FRAC_PI_2 * node.weight * density.theta_density(theta);
            let x = l * delta.sin();
            let y = self.positive_branch(theta, delta);
            out.push((w, x, y));
            out.push((w, -x, -y));
        }
        out
    }

    /// Compares `int gamma^m dnu_q` with `int x^m dnu_q` for `m <= m_max`.
    pub fn check_pushforward(&self, m_max: usize) -> Result<PushforwardReport> {
        if m_max > MAX_PUSHFORWARD_ORDER {
            return Err(Error::Config(format!(
                "pushforward order {m_max} exceeds {MAX_PUSHFORWARD_ORDER}"
            )));
        }
        let samples = self.direct_samples(&TanhSinh::new(DIRECT_STEP));
        let exact = quadrature(self.ctx(), MAX_PUSHFORWARD_ORDER)?;
        let mut sums = vec![0.0; m_max + 1];
        for &(w, _, y) in &samples {
            let mut p = w;
            for s in sums.iter_mut() {
                *s += p;
                p *= y;
            }
        }
        let rows: Vec<PushforwardRow> = sums
            .into_iter()
            .enumerate()
            .map(|(m, gamma_moment)| PushforwardRow {
                m,
                gamma_moment,
                reference: exact.integrate(|x| x.powi(m as i32)),
            })
            .collect();
        let max_discrepancy = rows
            .iter()
            .map(|r| (r.gamma_moment - r.reference).abs())
            .fold(0.0, f64::max);
        Ok(PushforwardReport {
            rows,
            max_discrepancy,
        })
    }
}
