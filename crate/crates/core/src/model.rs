//! Nonlinearity data: dispersion coefficient κ(α), potential W(α) and the
//! optional transverse coefficient, all polynomial in α = ‖U‖².

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::poly::Poly;
use serde::{Deserialize, Serialize};

pub const MAX_DERIVATIVE_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    Kappa,
    W,
    KappaTransverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    kappa: Poly,
    w: Poly,
    kappa_transverse: Poly,
    alpha_max: f64,
    max_derivative_order: usize,
}

/// Builds a model from low-degree-first coefficient lists and checks κ > 0 on
/// `[0, alpha_max]`.
pub fn make_model(
    kappa_coeffs: &[f64],
    w_coeffs: &[f64],
    kappa_transverse_coeffs: Option<&[f64]>,
    alpha_max: f64,
) -> Result<ModelSpec> {
    if kappa_coeffs.is_empty() || w_coeffs.is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    if let Some(t) = kappa_transverse_coeffs {
        if t.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
    }
    let all = kappa_coeffs
        .iter()
        .chain(w_coeffs)
        .chain(kappa_transverse_coeffs.unwrap_or(&[]));
    if all.clone().any(|c| !c.is_finite()) || !(alpha_max.is_finite() && alpha_max > 0.0) {
        return Err(Error::InvalidInput(
            "coefficients must be finite and alpha_max positive".into(),
        ));
    }
    let kappa = Poly::new(kappa_coeffs);
    check_positive(&kappa, alpha_max)?;
    let w = Poly::new(w_coeffs);
    let kappa_transverse = kappa_transverse_coeffs
        .map(Poly::new)
        .unwrap_or_else(|| kappa.clone());
    Ok(ModelSpec {
        kappa,
        w,
        kappa_transverse,
        alpha_max,
        max_derivative_order: MAX_DERIVATIVE_ORDER,
    })
}

fn check_positive(kappa: &Poly, alpha_max: f64) -> Result<()> {
    const SAMPLES: usize = 4096;
    for i in 0..=SAMPLES {
        let a = alpha_max * i as f64 / SAMPLES as f64;
        let v = kappa.eval(a);
        if !(v > 0.0) {
            return Err(Error::KappaNotPositive { alpha: a, value: v });
        }
    }
    // Sign changes between samples can only happen at real roots.
    for z in kappa.roots() {
        if z.im.abs() <= 1e-10 * (1.0 + z.re.abs()) && (0.0..=alpha_max).contains(&z.re) {
            let v = kappa.eval(z.re);
            if v <= 0.0 {
                return Err(Error::KappaNotPositive { alpha: z.re, value: v });
            }
        }
    }
    Ok(())
}

impl ModelSpec {
    /// Builds a model without the positivity check on κ. Intended for
    /// polynomial manipulations where κ is allowed to touch zero.
    pub fn new_unchecked(kappa: Poly, w: Poly, kappa_transverse: Option<Poly>, alpha_max: f64) -> Self {
        let kappa_transverse = kappa_transverse.unwrap_or_else(|| kappa.clone());
        ModelSpec {
            kappa,
            w,
            kappa_transverse,
            alpha_max,
            max_derivative_order: MAX_DERIVATIVE_ORDER,
        }
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    pub fn max_derivative_order(&self) -> usize {
        self.max_derivative_order
    }

    pub fn poly(&self, which: Coefficient) -> &Poly {
        match which {
            Coefficient::Kappa => &self.kappa,
            Coefficient::W => &self.w,
            Coefficient::KappaTransverse => &self.kappa_transverse,
        }
    }

    /// Exact derivative of order `order` of the selected coefficient at `alpha`.
    pub fn eval(&self, which: Coefficient, alpha: f64, order: usize) -> Result<f64> {
        if order > self.max_derivative_order {
            return Err(Error::OrderTooHigh {
                order,
                max: self.max_derivative_order,
            });
        }
        Ok(self.poly(which).nth_derivative(order).eval(alpha))
    }

    pub fn kappa(&self, alpha: f64) -> f64 {
        self.kappa.eval(alpha)
    }

    pub fn w(&self, alpha: f64) -> f64 {
        self.w.eval(alpha)
    }

    /// κ(α), κ'(α), κ''(α).
    pub fn kappa_derivs(&self, alpha: f64) -> [f64; 3] {
        let j = self.kappa.eval_jet(&Jet::variable(alpha));
        [j.deriv(0), j.deriv(1), j.deriv(2)]
    }

    /// W(α) and its derivatives through order 4.
    pub fn w_derivs(&self, alpha: f64) -> [f64; 5] {
        let j = self.w.eval_jet(&Jet::variable(alpha));
        [j.deriv(0), j.deriv(1), j.deriv(2), j.deriv(3), j.deriv(4)]
    }

    pub fn kappa_transverse(&self, alpha: f64) -> f64 {
        self.kappa_transverse.eval(alpha)
    }

    /// Replaces `W` with `W + ½‖k̃‖² α κ(α)`, the effective potential felt by a
    /// wave carrying a transverse phase wavevector of squared norm `ktil_norm_sq`.
    pub fn shift_transverse_phase(&self, ktil_norm_sq: f64) -> ModelSpec {
        let shift = Poly::monomial(0.5 * ktil_norm_sq, 1).mul(&self.kappa);
        ModelSpec {
            w: self.w.add(&shift),
            ..self.clone()
        }
    }

    pub fn check_alpha(&self, alpha: f64) -> Result<()> {
        if alpha < 0.0 || alpha > self.alpha_max * (1.0 + 1e-12) {
            return Err(Error::ModelRangeExceeded {
                alpha,
                alpha_max: self.alpha_max,
            });
        }
        Ok(())
    }
}

/// Focusing cubic reference model: κ ≡ 1, W(α) = −α²/8.
pub fn reference_focusing() -> ModelSpec {
    make_model(&[1.0], &[0.0, 0.0, -0.125], None, 100.0).expect("valid model")
}

/// Defocusing cubic reference model: κ ≡ 1, W(α) = α²/8.
pub fn reference_defocusing() -> ModelSpec {
    make_model(&[1.0], &[0.0, 0.0, 0.125], None, 100.0).expect("valid model")
}
