//! Solver for the singular two-point boundary-value problem
//! f''(x) = f(x)^{3/2} / sqrt(x),  f(0) = 1,  f(infinity) = 0,
//! by bisection shooting on the initial slope B = f'(0).
//!
//! The equation has a sqrt(x) branch point at the origin, handled by a
//! half-integer power series, and an unstable separatrix: slope errors
//! are amplified by roughly 1e8 at x = 50, so the bracket is refined far
//! below the user tolerance before the trajectory is stored.

use crate::error::{Result, TfError};
use crate::ode::{hermite, integrate, Dopri5Options, Halt, Node};
use serde::{Deserialize, Serialize};

/// Decay exponent of the subleading tail correction x^{-SIGMA} relative to
/// the exact particular solution 144/x^3 (root of s(s+7) = 6 shifted; the
/// linearization of the ODE about 144/x^3 has modes x^{(1 +- sqrt(73))/2}).
pub const TAIL_SIGMA: f64 = 0.772001872658765; // (sqrt(73) - 7) / 2

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TfParams {
    /// Hand-off abscissa between the origin series and the integrator.
    pub x_switch: f64,
    /// Outer boundary of the stored grid.
    pub x_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial bracket (low, high) for the slope B, both negative.
    pub slope_bracket: (f64, f64),
    pub max_shoot_iters: usize,
    /// Number of half-integer series terms kept at the origin.
    pub series_order: usize,
}

impl Default for TfParams {
    fn default() -> Self {
        Self {
            x_switch: 0.05,
            x_max: 50.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            slope_bracket: (-2.0, -1.0),
            max_shoot_iters: 200,
            series_order: 24,
        }
    }
}

impl TfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_switch > 0.0 && self.x_switch < self.x_max) {
            return Err(TfError::InvalidInput(format!(
                "require 0 < x_switch < x_max, got {} and {}",
                self.x_switch, self.x_max
            )));
        }
        let (lo, hi) = self.slope_bracket;
        if !(lo < hi && lo < 0.0 && hi < 0.0) {
            return Err(TfError::InvalidInput(format!(
                "slope bracket must satisfy low < high < 0, got ({lo}, {hi})"
            )));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(TfError::InvalidInput("tolerances must be positive".into()));
        }
        if self.max_shoot_iters == 0 {
            return Err(TfError::InvalidInput("max_shoot_iters must be positive".into()));
        }
        if self.series_order < 4 {
            return Err(TfError::InvalidInput(
                "series_order must be at least 4".into(),
            ));
        }
        Ok(())
    }
}

/// Two-term asymptotic tail model fitted at `x_tail`:
/// f(x) = amplitude * x^-3 * (1 + subleading * x^-TAIL_SIGMA).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailModel {
    pub x_tail: f64,
    /// Coefficient of the leading x^-3 branch (144 for the exact particular
    /// solution; the neutral-atom separatrix approaches it slowly from below).
    pub amplitude: f64,
    pub subleading: f64,
}

impl TailModel {
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let a = self.amplitude;
        let aq = self.amplitude * self.subleading;
        let s = TAIL_SIGMA;
        let f = a * x.powi(-3) + aq * x.powf(-3.0 - s);
        let fp = -3.0 * a * x.powi(-4) - (3.0 + s) * aq * x.powf(-4.0 - s);
        (f, fp)
    }
}

/// Solved Thomas-Fermi function on a grid with dense evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfSolution {
    pub params: TfParams,
    /// Initial slope f'(0).
    pub b: f64,
    /// Stored boundary value f(0); exactly 1 for a healthy solution.
    pub f_origin: f64,
    pub grid: Vec<f64>,
    pub f_values: Vec<f64>,
    pub fprime_values: Vec<f64>,
    /// f'' at the grid nodes, from the right-hand side of the ODE.
    pub fsecond_values: Vec<f64>,
    pub tail: TailModel,
}

/// Truncated half-integer power series at the origin,
/// f(x) = sum_k a_k x^{k/2} with a_0 = 1, a_2 = B.
///
/// The coefficients follow from matching f'' = f^{3/2}/sqrt(x) term by
/// term; the leading nonanalytic coefficient is a_3 = 4/3.
pub fn origin_series(b: f64, x: f64, order: usize) -> Result<(f64, f64)> {
    if order < 4 {
        return Err(TfError::InvalidInput(format!(
            "series order {order} below minimum 4"
        )));
    }
    if !(0.0..=0.5).contains(&x) {
        return Err(TfError::Domain(format!(
            "origin series valid only for 0 <= x <= 0.5, got {x}"
        )));
    }
    let a = series_coefficients(b, order);
    if x == 0.0 {
        return Ok((1.0, b));
    }
    let sq = x.sqrt();
    let mut f = 0.0;
    let mut fp = 0.0;
    let mut pw = 1.0; // sq^k
    for (k, &ak) in a.iter().enumerate() {
        f += ak * pw;
        if k >= 1 {
            fp += ak * (k as f64 / 2.0) * pw / x;
        }
        pw *= sq;
    }
    Ok((f, fp))
}

/// Series coefficients a_k of f(x) = sum a_k x^{k/2}, generated by the
/// recurrence a_k = g_{k-3} / ((k/2)(k/2 - 1)) where g is the half-integer
/// series of f^{3/2} (computed through s = sqrt(f), g = f * s).
pub fn series_coefficients(b: f64, order: usize) -> Vec<f64> {
    let n = order;
    let mut a = vec![0.0f64; n + 1];
    let mut s = vec![0.0f64; n + 1];
    let mut g = vec![0.0f64; n + 1];
    a[0] = 1.0;
    if n >= 2 {
        a[2] = b;
    }
    s[0] = 1.0;
    g[0] = 1.0;
    for k in 1..=n {
        if k >= 3 {
            let kk = k as f64 / 2.0;
            a[k] = g[k - 3] / (kk * (kk - 1.0));
        }
        let acc: f64 = (1..k).map(|i| s[i] * s[k - i]).sum();
        s[k] = (a[k] - acc) / 2.0;
        g[k] = (0..=k).map(|i| a[i] * s[k - i]).sum();
    }
    a
}

/// The nonlinear excess f(x) - 1 - B x of the origin series, i.e. the sum
/// of the k >= 3 terms only. Cancellation-safe for the origin bracket check.
pub fn series_excess(b: f64, x: f64, order: usize) -> f64 {
    let a = series_coefficients(b, order);
    let sq = x.sqrt();
    let mut acc = 0.0;
    for k in (3..=order).rev() {
        acc = acc * sq + a[k];
    }
    acc * sq * sq * sq // * x^{3/2}
}

fn rhs(x: f64, y: [f64; 2]) -> [f64; 2] {
    // Clamp f^{3/2} for trial trajectories that dip below zero.
    let f = y[0].max(0.0);
    [y[1], f * f.sqrt() / x.sqrt()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Undershoot,
    Overshoot,
    /// Reached the far boundary still positive and decreasing.
    Ambiguous,
}

fn classify(b: f64, params: &TfParams, x_class: f64) -> Result<Shot> {
    let (f0, fp0) = origin_series(b, params.x_switch, params.series_order)?;
    let opts = Dopri5Options {
        rel_tol: params.rel_tol.min(1e-12),
        abs_tol: params.abs_tol.min(1e-14),
        max_step: f64::INFINITY,
        store: false,
    };
    let res = integrate(
        rhs,
        params.x_switch,
        x_class,
        [f0, fp0],
        &opts,
        |_, y| y[0] <= 0.0 || y[1] >= 0.0,
    )?;
    Ok(match res.halt {
        Halt::Event => {
            if res.y_end[0] <= 0.0 {
                Shot::Undershoot
            } else {
                Shot::Overshoot
            }
        }
        Halt::Reached => Shot::Ambiguous,
    })
}

/// Classify with an extending far boundary: near the separatrix a trajectory
/// can reach x_max event-free, but the instability always reveals the side
/// somewhat further out.
fn classify_extending(b: f64, params: &TfParams, x_class_cap: f64) -> Result<Shot> {
    let mut x_class = params.x_max;
    loop {
        let shot = classify(b, params, x_class)?;
        if shot != Shot::Ambiguous || x_class >= x_class_cap {
            return Ok(shot);
        }
        x_class *= 2.0;
    }
}

/// Bisection shooting for the critical slope B, refined until the bracket
/// width drops below `width_rel * |B|`.
fn shoot_to_width(params: &TfParams, width_rel: f64) -> Result<f64> {
    params.validate()?;
    let cap = 32.0 * params.x_max;
    let (mut lo, mut hi) = params.slope_bracket;
    let s_lo = classify_extending(lo, params, cap)?;
    let s_hi = classify_extending(hi, params, cap)?;
    match (s_lo, s_hi) {
        (Shot::Undershoot, Shot::Overshoot) => {}
        (Shot::Undershoot, Shot::Undershoot) => {
            return Err(TfError::Bracket("both endpoints undershoot".into()))
        }
        (Shot::Overshoot, Shot::Overshoot) => {
            return Err(TfError::Bracket("both endpoints overshoot".into()))
        }
        _ => {
            return Err(TfError::Bracket(format!(
                "endpoints classify as {s_lo:?} and {s_hi:?}"
            )))
        }
    }
    let mut iters = 0usize;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || (hi - lo) < width_rel * mid.abs() {
            return Ok(0.5 * (lo + hi));
        }
        iters += 1;
        if iters > params.max_shoot_iters {
            return Err(TfError::MaxIterations(params.max_shoot_iters));
        }
        match classify_extending(mid, params, cap)? {
            Shot::Undershoot => lo = mid,
            Shot::Overshoot => hi = mid,
            // Indistinguishable from the separatrix even far out: converged.
            Shot::Ambiguous => return Ok(mid),
        }
    }
}

/// Bisection shooting at the requested relative tolerance.
pub fn shoot(params: &TfParams) -> Result<f64> {
    shoot_to_width(params, params.rel_tol)
}

/// Solve the boundary-value problem and store a densely evaluable solution.
pub fn solve_tf(params: &TfParams) -> Result<TfSolution> {
    params.validate()?;
    // The separatrix amplifies slope error by ~1e8 over [0, 50], so the
    // stored trajectory needs B at machine precision regardless of rel_tol.
    let b = shoot_to_width(params, 4.0 * f64::EPSILON)?;
    let (f0, fp0) = origin_series(b, params.x_switch, params.series_order)?;
    let opts = Dopri5Options {
        rel_tol: params.rel_tol.min(1e-12),
        abs_tol: params.abs_tol.min(1e-14),
        max_step: 0.1,
        store: true,
    };
    let res = integrate(rhs, params.x_switch, params.x_max, [f0, fp0], &opts, |_, _| false)?;
    if res.halt != Halt::Reached {
        return Err(TfError::Inconsistency(
            "refined trajectory left the positive decreasing branch".into(),
        ));
    }
    let tail = fit_tail(params.x_max, res.y_end[0], res.y_end[1])?;
    let (grid, f_values, fprime_values, fsecond_values) = unpack(&res.nodes);
    let sol = TfSolution {
        params: *params,
        b,
        f_origin: 1.0,
        grid,
        f_values,
        fprime_values,
        fsecond_values,
        tail,
    };
    sol.check_monotone()?;
    Ok(sol)
}

fn unpack(nodes: &[Node]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(nodes.len());
    let mut f = Vec::with_capacity(nodes.len());
    let mut fp = Vec::with_capacity(nodes.len());
    let mut fpp = Vec::with_capacity(nodes.len());
    for n in nodes {
        x.push(n.x);
        f.push(n.y[0]);
        fp.push(n.y[1]);
        fpp.push(n.dy[1]);
    }
    (x, f, fp, fpp)
}

/// Fit the two-term tail model to (f, f') at x_tail. Linear 2x2 solve for
/// (amplitude, amplitude * subleading).
fn fit_tail(x_tail: f64, f: f64, fp: f64) -> Result<TailModel> {
    if f <= 0.0 || fp >= 0.0 {
        return Err(TfError::Inconsistency(format!(
            "cannot fit decaying tail to f = {f}, f' = {fp}"
        )));
    }
    let s = TAIL_SIGMA;
    // [x^-3, x^-3-s; -3 x^-4, -(3+s) x^-4-s] * [A; A q] = [f; f']
    let det = -s * x_tail.powf(-7.0 - s);
    let a = (-(3.0 + s) * x_tail.powf(-4.0 - s) * f - x_tail.powf(-3.0 - s) * fp) / det;
    let aq = (x_tail.powi(-3) * fp + 3.0 * x_tail.powi(-4) * f) / det;
    if a <= 0.0 {
        return Err(TfError::Inconsistency(format!(
            "tail amplitude came out nonpositive ({a})"
        )));
    }
    Ok(TailModel {
        x_tail,
        amplitude: a,
        subleading: aq / a,
    })
}

impl TfSolution {
    /// Dense evaluation of (f, f') for any x >= 0. Uses the origin series
    /// below x_switch, Hermite interpolation of the stored grid in between,
    /// and the tail model beyond x_max.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let x = x.max(0.0);
        if x == 0.0 {
            return (self.f_origin, self.b);
        }
        if x < self.params.x_switch {
            return origin_series(self.b, x, self.params.series_order)
                .expect("series domain covers [0, x_switch]");
        }
        if x > self.params.x_max {
            return self.tail.eval(x);
        }
        let i = match self.grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
            Ok(i) => return (self.f_values[i], self.fprime_values[i]),
            Err(i) => i.clamp(1, self.grid.len() - 1),
        };
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let (f, _) = hermite(
            x,
            x0,
            x1,
            self.f_values[i - 1],
            self.f_values[i],
            self.fprime_values[i - 1],
            self.fprime_values[i],
        );
        let (fp, _) = hermite(
            x,
            x0,
            x1,
            self.fprime_values[i - 1],
            self.fprime_values[i],
            self.fsecond_values[i - 1],
            self.fsecond_values[i],
        );
        (f, fp)
    }

    fn check_monotone(&self) -> Result<()> {
        for i in 0..self.grid.len() {
            if self.f_values[i] <= 0.0 || self.fprime_values[i] >= 0.0 {
                return Err(TfError::Inconsistency(format!(
                    "solution not strictly decreasing/positive at x = {}",
                    self.grid[i]
                )));
            }
            if i > 0 && self.f_values[i] >= self.f_values[i - 1] {
                return Err(TfError::Inconsistency(format!(
                    "f not strictly decreasing at x = {}",
                    self.grid[i]
                )));
            }
        }
        Ok(())
    }
}
