// SPDX-License-Identifier: Apache-2.0

//! Ginzburg–Landau free-profit utilities.
//!
//! The free profit is expanded in the order parameter `o` as
//! `F(o) = C + a·o + α·o² + b·o³ + (β/2)·o⁴`. In the symmetric case
//! `a = b = 0`, and the stationary points solve `o·(α + β·o²) = 0`.
//!
//! Sign convention: functions here return stationary points without
//! classifying them. Whether the relevant extrema are maxima (free profit)
//! or minima (free energy, fitted landscapes) is up to the caller; use
//! [`GLPolynomial::second_derivative`] to tell them apart.

mod exponent;
mod landscape;

pub use exponent::{exponent_fit, ExponentFit, MAX_ITERATIONS};
pub use landscape::{
    empirical_landscape, fit_landscape, order_parameter_samples, Landscape, SampleMode, MIN_BINS, MIN_SAMPLES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GLPolynomial {
    pub c: f64,
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
}

impl GLPolynomial {
    /// The symmetric polynomial `C + α·o² + (β/2)·o⁴`.
    pub fn symmetric(c: f64, alpha: f64, beta: f64) -> Self {
        GLPolynomial { c, a: 0.0, alpha, b: 0.0, beta }
    }

    pub fn evaluate(&self, o: f64) -> f64 {
        let o2 = o * o;
        self.c + self.a * o + self.alpha * o2 + self.b * o2 * o + 0.5 * self.beta * o2 * o2
    }

    pub fn derivative(&self, o: f64) -> f64 {
        let o2 = o * o;
        self.a + 2.0 * self.alpha * o + 3.0 * self.b * o2 + 2.0 * self.beta * o2 * o
    }

    pub fn second_derivative(&self, o: f64) -> f64 {
        2.0 * self.alpha + 6.0 * self.b * o + 6.0 * self.beta * o * o
    }

    pub fn is_symmetric(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }
}

pub fn evaluate(poly: &GLPolynomial, o: f64) -> f64 {
    poly.evaluate(o)
}

/// Real stationary points of the symmetric polynomial, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySet {
    pub alpha: f64,
    pub beta: f64,
    pub roots: Vec<f64>,
}

impl StationarySet {
    /// `o·(α + β·o²)` at each root.
    pub fn residuals(&self) -> Vec<f64> {
        self.roots
            .iter()
            .map(|&o| o * (self.alpha + self.beta * o * o))
            .collect()
    }
}

/// `{0}` when `α/β ≥ 0`, otherwise `{−√(−α/β), 0, +√(−α/β)}`.
pub fn stationary_points(alpha: f64, beta: f64) -> Result<StationarySet> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::DegeneratePolynomial(format!(
            "quartic coefficient must be finite and non-zero, got {beta}"
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::DegeneratePolynomial(format!("quadratic coefficient is {alpha}")));
    }
    let ratio = -alpha / beta;
    let roots = if ratio <= 0.0 {
        vec![0.0]
    } else {
        let mut r = ratio.sqrt();
        // One Newton step on α + β·o² removes the rounding of the quotient.
        r -= (alpha + beta * r * r) / (2.0 * beta * r);
        vec![-r, 0.0, r]
    };
    Ok(StationarySet { alpha, beta, roots })
}

/// Mean-field order parameter `|o*| = √((T_c − T)/β)` below `T_c`, zero at
/// and above it.
pub fn order_parameter_curve(temperatures: &[f64], t_c: f64, beta: f64) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::parameter("beta", format!("must be > 0, got {beta}")));
    }
    Ok(temperatures
        .iter()
        .map(|&t| if t < t_c { ((t_c - t) / beta).sqrt() } else { 0.0 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluate_examples() {
        let p = GLPolynomial::symmetric(0.0, -1.0, 1.0);
        assert_eq!(evaluate(&p, 0.0), 0.0);
        assert_eq!(evaluate(&p, 1.0), -0.5);
        let k = GLPolynomial::symmetric(2.0, 0.0, 0.0);
        for o in [-3.0, 0.0, 0.7, 10.0] {
            assert_eq!(k.evaluate(o), 2.0);
        }
    }

    #[test]
    fn stationary_examples() {
        assert_eq!(stationary_points(1.0, 1.0).unwrap().roots, vec![0.0]);
        assert_eq!(stationary_points(-1.0, 1.0).unwrap().roots, vec![-1.0, 0.0, 1.0]);
        assert_eq!(stationary_points(-2.0, 8.0).unwrap().roots, vec![-0.5, 0.0, 0.5]);
        assert_eq!(stationary_points(0.0, 3.0).unwrap().roots, vec![0.0]);
        assert!(matches!(stationary_points(1.0, 0.0), Err(Error::DegeneratePolynomial(_))));
    }

    #[test]
    fn curve_examples() {
        let o = order_parameter_curve(&[1.0, 0.0, 2.0], 1.0, 1.0).unwrap();
        assert_eq!(o, vec![0.0, 1.0, 0.0]);
        assert!(order_parameter_curve(&[0.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn curve_log_slope_is_one_half() {
        let t_c = 0.8;
        let ts: Vec<f64> = (1..=50).map(|k| t_c - 0.01 * k as f64).collect();
        let o = order_parameter_curve(&ts, t_c, 2.0).unwrap();
        let xs: Vec<f64> = ts.iter().map(|t| (t_c - t).ln()).collect();
        let ys: Vec<f64> = o.iter().map(|v| v.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        assert!((sxy / sxx - 0.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn residuals_vanish(alpha in -20.0f64..20.0, beta in prop_oneof![-20.0f64..-0.05, 0.05f64..20.0]) {
            let set = stationary_points(alpha, beta).unwrap();
            for r in set.residuals() {
                prop_assert!(r.abs() < 1e-12, "{r}");
            }
        }

        #[test]
        fn symmetric_is_even(c in -5.0f64..5.0, alpha in -5.0f64..5.0, beta in -5.0f64..5.0, o in -2.0f64..2.0) {
            let p = GLPolynomial::symmetric(c, alpha, beta);
            prop_assert_eq!(p.evaluate(o), p.evaluate(-o));
        }

        #[test]
        fn curve_continuous_and_zero_above(t_c in -1.0f64..1.0, beta in 0.1f64..10.0, dt in 0.0f64..3.0) {
            let o = order_parameter_curve(&[t_c + dt, t_c - 1e-12], t_c, beta).unwrap();
            prop_assert_eq!(o[0], 0.0);
            prop_assert!(o[1] < 1e-5);
        }
    }
}
