//! Thomas-Fermi and subtracted Coulombic radial potentials in atomic units
//! (hbar = m = e = 1), with gradients, smooth Laplacians and explicit
//! point-charge bookkeeping.

use crate::error::{Result, TfError};
use crate::tf_solver::{series_excess, TfSolution};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// a = (3 pi / 4)^{2/3} * (1/2) * Z^{-1/3} in Bohr radii: the standard
/// Thomas-Fermi screening length with the hbar^2/(2 m e^2) factor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AtomicModel {
    pub z: f64,
    pub a: f64,
}

impl AtomicModel {
    pub fn new(z: f64) -> Result<Self> {
        if z < 1.0 {
            return Err(TfError::InvalidInput(format!("Z must be >= 1, got {z}")));
        }
        let a = (3.0 * PI / 4.0).powf(2.0 / 3.0) * 0.5 * z.powf(-1.0 / 3.0);
        Ok(Self { z, a })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialKind {
    ThomasFermi,
    Coulombic,
}

/// Radial potential: screened Thomas-Fermi -Z f(r/a)/r or the subtracted
/// Coulombic -Z/r - Z B/a describing the tightly bound core.
#[derive(Clone, Copy)]
pub struct PotentialField<'a> {
    pub kind: PotentialKind,
    pub model: AtomicModel,
    pub sol: &'a TfSolution,
}

impl<'a> PotentialField<'a> {
    pub fn new(kind: PotentialKind, model: AtomicModel, sol: &'a TfSolution) -> Self {
        Self { kind, model, sol }
    }

    fn check_r(&self, r: f64) -> Result<()> {
        if r <= 0.0 {
            return Err(TfError::Domain(format!("require r > 0, got {r}")));
        }
        Ok(())
    }

    /// V(r) in hartree.
    pub fn value(&self, r: f64) -> Result<f64> {
        self.check_r(r)?;
        let z = self.model.z;
        Ok(match self.kind {
            PotentialKind::ThomasFermi => {
                let (f, _) = self.sol.eval(r / self.model.a);
                -z * f / r
            }
            PotentialKind::Coulombic => -z / r - z * self.sol.b / self.model.a,
        })
    }

    /// Signed radial derivative dV/dr.
    pub fn dv_dr(&self, r: f64) -> Result<f64> {
        self.check_r(r)?;
        let z = self.model.z;
        let a = self.model.a;
        Ok(match self.kind {
            PotentialKind::ThomasFermi => {
                let (f, fp) = self.sol.eval(r / a);
                z * f / (r * r) - z * fp / (a * r)
            }
            PotentialKind::Coulombic => z / (r * r),
        })
    }

    /// |dV/dr|.
    pub fn gradient_magnitude(&self, r: f64) -> Result<f64> {
        Ok(self.dv_dr(r)?.abs())
    }

    /// Smooth part of the Laplacian; the 4 pi Z delta^3 point-charge part is
    /// carried separately by [`point_charge_strength`](Self::point_charge_strength).
    pub fn laplacian_smooth(&self, r: f64) -> Result<f64> {
        self.check_r(r)?;
        Ok(match self.kind {
            PotentialKind::ThomasFermi => {
                let (f, _) = self.sol.eval(r / self.model.a);
                let f = f.max(0.0);
                -(4.0 / (3.0 * PI)) * (2.0 * self.model.z / r).powf(1.5) * f.powf(1.5)
            }
            PotentialKind::Coulombic => 0.0,
        })
    }

    /// Coefficient of delta^3(r): 4 pi Z for both kinds, which is what makes
    /// the Thomas-Fermi minus Coulombic subtraction finite.
    pub fn point_charge_strength(&self) -> f64 {
        4.0 * PI * self.model.z
    }
}

/// Samples of the square-root bracket near the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OriginCancellation {
    /// (r, |sqrt(-2 V_TF) - sqrt(-2 V_C)|, scaled deviation) triples.
    pub samples: Vec<(f64, f64, f64)>,
    /// Maximum of the scaled deviation |bracket| * r^{-1/2} normalized by
    /// sqrt(2Z/a); its r -> 0 limit is 0 and it decays like sqrt(r).
    pub max_scaled_deviation: f64,
    /// Log-log slope of the scaled deviation against r.
    pub fitted_exponent: Option<f64>,
}

/// Verifies the origin cancellation of the square-root bracket
/// sqrt(-2 V_TF) - sqrt(-2 V_C): both potentials share the -Z/r pole, and
/// f(0) = 1 with matched slope kills the difference at leading and
/// subleading order, leaving the (4/3) x^{3/2} series excess.
pub fn origin_cancellation_check(
    model: &AtomicModel,
    sol: &TfSolution,
    r_samples: &[f64],
) -> Result<OriginCancellation> {
    let mut samples = Vec::with_capacity(r_samples.len());
    let tf = PotentialField::new(PotentialKind::ThomasFermi, *model, sol);
    let c = PotentialField::new(PotentialKind::Coulombic, *model, sol);
    let norm = (2.0 * model.z / model.a).sqrt();
    for &r in r_samples {
        let v_tf = tf.value(r)?;
        let v_c = c.value(r)?;
        if v_tf >= 0.0 || v_c >= 0.0 {
            return Err(TfError::Domain(format!(
                "potential nonnegative at sample r = {r}"
            )));
        }
        let x = r / model.a;
        // Cancellation-safe form: the bracket equals
        // sqrt(2Z/r) * (f - 1 - Bx) / (sqrt(f) + sqrt(1 + Bx)),
        // and f - 1 - Bx is summed directly from the k >= 3 series terms
        // where the series applies.
        let (f, _) = sol.eval(x);
        let excess = if x < sol.params.x_switch {
            series_excess(sol.b, x, sol.params.series_order)
        } else {
            f - 1.0 - sol.b * x
        };
        let denom = f.sqrt() + (1.0 + sol.b * x).max(0.0).sqrt();
        let bracket = (2.0 * model.z / r).sqrt() * excess / denom;
        let scaled = bracket.abs() / (norm * x.sqrt());
        samples.push((r, bracket.abs(), scaled));
    }
    let max_scaled_deviation = samples.iter().map(|s| s.2).fold(0.0f64, f64::max);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.2 > 0.0)
        .map(|s| (s.0.ln(), s.2.ln()))
        .collect();
    let fitted_exponent = if pts.len() >= 2 {
        Some(least_squares_slope(&pts))
    } else {
        None
    };
    Ok(OriginCancellation {
        samples,
        max_scaled_deviation,
        fitted_exponent,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
