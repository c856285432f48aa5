//! Assembly of the Schwinger quantum correction: local correction densities
//! in their two algebraically equivalent forms, delta-term bookkeeping,
//! surface-flux checks, the closed-form coefficient from int f^2, and an
//! independent direct radial-integration oracle.

use crate::error::{Result, TfError};
use crate::potentials::{origin_cancellation_check, AtomicModel, PotentialField, PotentialKind};
use crate::quadrature::{adaptive, TfMoments};
use crate::tf_solver::TfSolution;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectionMethod {
    ClosedForm,
    DirectOracle,
}

/// Schwinger coefficient c and the per-Z energy corrections, in units of
/// m e^4 / hbar^2 (hartree).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub c: f64,
    pub method: CorrectionMethod,
    /// (Z, delta E_Qua) pairs, sorted by Z.
    pub delta_e: Vec<(f64, f64)>,
    pub est_error: f64,
}

/// Momentum states per volume per energy on the zero-energy shell:
/// sqrt(-2V) / (2 pi^2) for V < 0, zero otherwise.
pub fn phase_space_density(v: f64) -> f64 {
    if v < 0.0 {
        (-2.0 * v).sqrt() / (2.0 * PI * PI)
    } else {
        0.0
    }
}

/// dg/dV in closed form: -1 / (2 pi^2 sqrt(-2V)).
fn phase_space_density_dv(v: f64) -> f64 {
    -1.0 / (2.0 * PI * PI * (-2.0 * v).sqrt())
}

/// Local correction density via the single-V-derivative form:
/// (1/6) [ lap_smooth * g(V) + (1/2) (dV/dr)^2 * g'(V) ].
pub fn eq9_density(field: &PotentialField, r: f64) -> Result<f64> {
    let v = field.value(r)?;
    if v >= 0.0 {
        return Err(TfError::Domain(format!(
            "potential nonnegative at r = {r}; density undefined"
        )));
    }
    let lap = field.laplacian_smooth(r)?;
    let dv = field.dv_dr(r)?;
    Ok((lap * phase_space_density(v) + 0.5 * dv * dv * phase_space_density_dv(v)) / 6.0)
}

/// Local correction density via the Laplacian-of-(-2V)^{3/2} form:
/// (1/24 pi^2) [ lap_smooth * sqrt(-2V) - (1/3) div grad (-2V)^{3/2} ],
/// with the divergence expanded by the chain rule for radial fields.
/// Smooth parts only; delta parts are handled by
/// [`delta_term_contribution`].
pub fn eq10_density(field: &PotentialField, r: f64) -> Result<f64> {
    let v = field.value(r)?;
    if v >= 0.0 {
        return Err(TfError::Domain(format!(
            "potential nonnegative at r = {r}; density undefined"
        )));
    }
    let lap = field.laplacian_smooth(r)?;
    let dv = field.dv_dr(r)?;
    let vpp = lap - 2.0 * dv / r;
    let w = (-2.0 * v).sqrt();
    // W = (-2V)^{3/2}: W' = -3 V' W^{1/3}... expanded radially:
    let dw = -3.0 * dv * w;
    let d2w = -3.0 * vpp * w + 3.0 * dv * dv / w;
    let lap_w = d2w + 2.0 * dw / r;
    Ok((lap * w - lap_w / 3.0) / (24.0 * PI * PI))
}

/// The delta-function bookkeeping of the subtraction: the point-charge
/// strengths cancel identically and the square-root bracket vanishes at the
/// origin, so the contribution is exactly zero. Returns an error when the
/// solution is inconsistent with that cancellation.
pub fn delta_term_contribution(model: &AtomicModel, sol: &TfSolution) -> Result<f64> {
    if sol.f_origin != 1.0 {
        return Err(TfError::Inconsistency(format!(
            "stored boundary value f(0) = {} != 1; origin cancellation broken",
            sol.f_origin
        )));
    }
    let tf = PotentialField::new(PotentialKind::ThomasFermi, *model, sol);
    let c = PotentialField::new(PotentialKind::Coulombic, *model, sol);
    let strength_diff = tf.point_charge_strength() - c.point_charge_strength();
    if strength_diff != 0.0 {
        return Err(TfError::Inconsistency(
            "point-charge strengths differ between kinds".into(),
        ));
    }
    let rs: Vec<f64> = (0..5).map(|i| model.a * 1e-8 * 10f64.powi(i)).collect();
    let check = origin_cancellation_check(model, sol, &rs)?;
    if check.max_scaled_deviation > 1e-2 {
        return Err(TfError::Inconsistency(format!(
            "origin bracket deviation {} above tolerance",
            check.max_scaled_deviation
        )));
    }
    Ok(0.0)
}

/// Surface fluxes of the (-2V)^{3/2}-bracket difference at the outer and
/// inner radii; both vanish in the respective limits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SurfaceFlux {
    pub outer: f64,
    pub inner: f64,
}

impl SurfaceFlux {
    pub fn net(&self) -> f64 {
        self.outer - self.inner
    }
}

/// Flux 4 pi r^2 d/dr[(-2 V_TF)^{3/2} - (-2 V_C)^{3/2}] * (-1/(72 pi^2))
/// evaluated at R (outer) and r0 (inner). The Coulombic bracket is taken as
/// zero where V_C >= 0, consistent with its vanishing correction density.
pub fn surface_flux(
    sol: &TfSolution,
    model: &AtomicModel,
    r_outer: f64,
    r_inner: f64,
) -> Result<SurfaceFlux> {
    if !(r_inner > 0.0 && r_inner < r_outer) {
        return Err(TfError::InvalidInput(format!(
            "require 0 < r0 < R, got {r_inner} and {r_outer}"
        )));
    }
    let tf = PotentialField::new(PotentialKind::ThomasFermi, *model, sol);
    let c = PotentialField::new(PotentialKind::Coulombic, *model, sol);
    if c.value(r_inner)? >= 0.0 {
        return Err(TfError::Domain(format!(
            "Coulombic potential nonnegative at inner radius {r_inner}"
        )));
    }
    let flux_at = |r: f64| -> Result<f64> {
        // d/dr (-2V)^{3/2} = 3 sqrt(-2V) * (-V').
        let mut d = {
            let v = tf.value(r)?;
            3.0 * (-2.0 * v).max(0.0).sqrt() * (-tf.dv_dr(r)?)
        };
        let vc = c.value(r)?;
        if vc < 0.0 {
            d -= 3.0 * (-2.0 * vc).sqrt() * (-c.dv_dr(r)?);
        }
        Ok(4.0 * PI * r * r * d * (-1.0 / (72.0 * PI * PI)))
    };
    Ok(SurfaceFlux {
        outer: flux_at(r_outer)?,
        inner: flux_at(r_inner)?,
    })
}

/// Closed-form Schwinger coefficient c = (4 / 9 pi^2) (3 pi / 4)^{2/3} * int f^2.
pub fn schwinger_coefficient(moments: &TfMoments) -> f64 {
    4.0 / (9.0 * PI * PI) * (3.0 * PI / 4.0).powf(2.0 / 3.0) * moments.m_f2
}

/// delta E_Qua(Z) = -c Z^{5/3} for each requested Z.
pub fn delta_e_closed(z_list: &[f64], c: f64) -> CorrectionResult {
    let mut delta_e: Vec<(f64, f64)> = z_list
        .iter()
        .map(|&z| (z, -c * z.powf(5.0 / 3.0)))
        .collect();
    delta_e.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    CorrectionResult {
        c,
        method: CorrectionMethod::ClosedForm,
        delta_e,
        est_error: 0.0,
    }
}

/// Direct radial-integration oracle for delta E_Qua at one Z:
/// int 4 pi r^2 [density_TF - density_C] dr with the difference regrouped so
/// that every piece is individually finite:
///   - Laplacian term: Thomas-Fermi only (the Coulombic smooth Laplacian
///     vanishes identically), over (0, infinity).
///   - (grad V)^2 term: TF - C difference on (0, r_star) where both
///     potentials are negative (the individually divergent r^{-3/2} origin
///     pieces cancel), plus the TF term alone beyond r_star where the
///     Coulombic density is zero.
pub fn delta_e_oracle_single(sol: &TfSolution, model: &AtomicModel, tol: f64) -> Result<(f64, f64)> {
    delta_term_contribution(model, sol)?;
    let tf = PotentialField::new(PotentialKind::ThomasFermi, *model, sol);
    let c = PotentialField::new(PotentialKind::Coulombic, *model, sol);
    let a = model.a;
    let r_star = -a / sol.b; // Coulombic zero crossing
    let r_split = sol.params.x_max * a;
    let r_far = 2e5 * a;

    // 4 pi r^2 * (1/24pi^2) * 2 * lap * sqrt(-2V), Thomas-Fermi only.
    let lap_term = |r: f64| {
        let v = tf.value(r).unwrap();
        let lap = tf.laplacian_smooth(r).unwrap();
        4.0 * PI * r * r / (24.0 * PI * PI) * 2.0 * lap * (-2.0 * v).max(0.0).sqrt()
    };
    // -4 pi r^2 * (1/24pi^2) * (V')^2 / sqrt(-2V) for one field.
    let grad_term = |field: &PotentialField, r: f64| {
        let v = field.value(r).unwrap();
        let dv = field.dv_dr(r).unwrap();
        -4.0 * PI * r * r / (24.0 * PI * PI) * dv * dv / (-2.0 * v).sqrt()
    };

    // Laplacian term: core with x = u^2 substitution, then 1/r out to r_far.
    let (lap_core, e1) = adaptive(&|u: f64| 2.0 * u * lap_term(u * u), 0.0, r_split.sqrt(), tol)?;
    let (lap_far, e2) = adaptive(&|t: f64| lap_term(1.0 / t) / (t * t), 1.0 / r_far, 1.0 / r_split, tol)?;
    let lap_rem = lap_term(r_far) * r_far / 5.0; // integrand ~ r^-6 beyond r_far

    // Gradient-term difference on (0, r_star): substitute r = r_star - t^2 to
    // absorb the (r_star - r)^{-1/2} Coulombic endpoint singularity.
    let diff = |r: f64| grad_term(&tf, r) - grad_term(&c, r);
    let (grad_diff, e3) = adaptive(
        &|t: f64| 2.0 * t * diff(r_star - t * t),
        0.0,
        r_star.sqrt() * (1.0 - 1e-12),
        tol,
    )?;
    // TF gradient term beyond r_star.
    let (grad_tf_mid, e4) = adaptive(&|r: f64| grad_term(&tf, r), r_star, r_split, tol)?;
    let (grad_tf_far, e5) = adaptive(
        &|t: f64| grad_term(&tf, 1.0 / t) / (t * t),
        1.0 / r_far,
        1.0 / r_split,
        tol,
    )?;
    let grad_rem = grad_term(&tf, r_far) * r_far / 5.0;

    let total = lap_core + lap_far + lap_rem + grad_diff + grad_tf_mid + grad_tf_far + grad_rem;
    let err = e1 + e2 + e3 + e4 + e5 + (lap_rem.abs() + grad_rem.abs()) * 0.5;
    Ok((total, err))
}

/// Oracle over a Z list.
pub fn delta_e_oracle(sol: &TfSolution, z_list: &[f64], tol: f64) -> Result<CorrectionResult> {
    let mut entries = crate::parallel::try_par_map(z_list, |&z| {
        let model = AtomicModel::new(z)?;
        let (de, err) = delta_e_oracle_single(sol, &model, tol)?;
        Ok::<(f64, f64, f64), TfError>((z, de, err))
    })?;
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let est_error = entries.iter().map(|e| e.2).fold(0.0f64, f64::max);
    let delta_e = entries.iter().map(|e| (e.0, e.1)).collect();
    // Report c implied by the oracle at the smallest Z.
    let c = entries
        .first()
        .map(|e| -e.1 / e.0.powf(5.0 / 3.0))
        .unwrap_or(0.0);
    Ok(CorrectionResult {
        c,
        method: CorrectionMethod::DirectOracle,
        delta_e,
        est_error,
    })
}

/// Hartree-to-eV display conversion.
pub const HARTREE_EV: f64 = 27.211386;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::tf_moments;
    use crate::tf_solver::{solve_tf, TfParams};
    use rand::{Rng, SeedableRng};
    use std::sync::OnceLock;

    fn sol() -> &'static TfSolution {
        static SOL: OnceLock<TfSolution> = OnceLock::new();
        SOL.get_or_init(|| solve_tf(&TfParams::default()).unwrap())
    }

    #[test]
    fn phase_space_density_cases() {
        assert_eq!(phase_space_density(0.0), 0.0);
        assert_eq!(phase_space_density(1.0), 0.0);
        let g = phase_space_density(-0.5);
        assert!((g - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
        assert!((g - 0.050660).abs() < 1e-6);
    }

    #[test]
    fn eq9_eq10_pointwise_identity() {
        let model = AtomicModel::new(1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for kind in [PotentialKind::ThomasFermi, PotentialKind::Coulombic] {
            let field = PotentialField::new(kind, model, sol());
            let mut n = 0;
            while n < 1000 {
                let r = model.a * 10f64.powf(rng.gen_range(-3.0..3.0));
                if field.value(r).unwrap() >= 0.0 {
                    continue;
                }
                n += 1;
                let d9 = eq9_density(&field, r).unwrap();
                let d10 = eq10_density(&field, r).unwrap();
                let rel = (d9 - d10).abs() / d9.abs().max(1e-300);
                assert!(rel < 1e-10, "{kind:?} r={r}: rel diff {rel}");
            }
        }
    }

    #[test]
    fn coulombic_density_closed_form() {
        let model = AtomicModel::new(1.0).unwrap();
        let field = PotentialField::new(PotentialKind::Coulombic, model, sol());
        let r = 0.1 * model.a;
        let v = field.value(r).unwrap();
        let expect = -0.5 / 6.0 * (model.z / (r * r)).powi(2)
            / (2.0 * PI * PI * (-2.0 * v).sqrt());
        let got = eq9_density(&field, r).unwrap();
        assert!((got - expect).abs() < 1e-12 * expect.abs());
        assert!(got < 0.0);
    }

    #[test]
    fn density_domain_edge() {
        let model = AtomicModel::new(1.0).unwrap();
        let field = PotentialField::new(PotentialKind::Coulombic, model, sol());
        let r_star = -model.a / sol().b;
        assert!(eq9_density(&field, r_star * 1.01).is_err());
        assert!(eq10_density(&field, r_star * 1.01).is_err());
    }

    #[test]
    fn tf_density_integrand_negative_at_screening_length() {
        let model = AtomicModel::new(1.0).unwrap();
        let field = PotentialField::new(PotentialKind::ThomasFermi, model, sol());
        assert!(eq10_density(&field, model.a).unwrap() < 0.0);
    }

    #[test]
    fn delta_bookkeeping_zero_for_any_z() {
        for z in [1.0, 92.0] {
            let model = AtomicModel::new(z).unwrap();
            assert_eq!(delta_term_contribution(&model, sol()).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_bookkeeping_flags_corrupted_solution() {
        let mut bad = sol().clone();
        bad.f_origin = 1.001;
        let model = AtomicModel::new(1.0).unwrap();
        assert!(delta_term_contribution(&model, &bad).is_err());
    }

    #[test]
    fn coefficient_linearity() {
        let m = tf_moments(sol(), 1e-9).unwrap();
        let c = schwinger_coefficient(&m);
        let mut zero = m;
        zero.m_f2 = 0.0;
        assert_eq!(schwinger_coefficient(&zero), 0.0);
        let mut double = m;
        double.m_f2 *= 2.0;
        assert!((schwinger_coefficient(&double) - 2.0 * c).abs() < 1e-15);
    }

    #[test]
    fn headline_coefficient() {
        let m = tf_moments(sol(), 1e-9).unwrap();
        let c = schwinger_coefficient(&m);
        assert!((c - 0.04907).abs() < 5e-5, "c = {c}");
    }

    #[test]
    fn closed_form_scaling() {
        let res = delta_e_closed(&[1.0, 2.0, 8.0], 0.04907);
        assert!((res.delta_e[0].1 + 0.04907).abs() < 1e-12);
        assert!((res.delta_e[1].1 + 0.04907 * 2f64.powf(5.0 / 3.0)).abs() < 1e-12);
        // 8^{5/3} = 32 exactly.
        assert!((res.delta_e[2].1 - 32.0 * res.delta_e[0].1).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_closed_form() {
        let m = tf_moments(sol(), 1e-9).unwrap();
        let c = schwinger_coefficient(&m);
        let oracle = delta_e_oracle(sol(), &[1.0, 10.0], 1e-8).unwrap();
        for &(z, de) in &oracle.delta_e {
            let closed = -c * z.powf(5.0 / 3.0);
            let ratio = de / closed;
            assert!((ratio - 1.0).abs() < 1e-3, "Z={z}: ratio {ratio}");
        }
    }

    #[test]
    fn surface_flux_small_and_decaying() {
        let model = AtomicModel::new(1.0).unwrap();
        let a = model.a;
        let de = 0.04907;
        let f = surface_flux(sol(), &model, 100.0 * a, 1e-6 * a).unwrap();
        assert!(f.outer.abs() < 1e-4 * de, "outer {}", f.outer);
        assert!(f.inner.abs() < 1e-3 * de, "inner {}", f.inner);
        let f2 = surface_flux(sol(), &model, 200.0 * a, 1e-6 * a).unwrap();
        assert!(f2.outer.abs() < 0.5 * f.outer.abs());
    }

    #[test]
    fn surface_flux_domain_checks() {
        let model = AtomicModel::new(1.0).unwrap();
        assert!(surface_flux(sol(), &model, 1.0, 2.0).is_err());
        // inner radius beyond the Coulombic zero crossing
        let r_star = -model.a / sol().b;
        assert!(surface_flux(sol(), &model, 100.0, r_star * 1.5).is_err());
    }

    proptest::proptest! {
        #[test]
        fn eq9_eq10_agree_everywhere(logx in -3.0f64..3.0, z in 1.0f64..40.0) {
            let model = AtomicModel::new(z).unwrap();
            let r = model.a * 10f64.powf(logx);
            let tf = PotentialField::new(PotentialKind::ThomasFermi, model, sol());
            let d9 = eq9_density(&tf, r).unwrap();
            let d10 = eq10_density(&tf, r).unwrap();
            proptest::prop_assert!((d9 - d10).abs() <= 1e-10 * d9.abs().max(1e-300));
        }
    }
}
