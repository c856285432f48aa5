//! Adaptive Dormand-Prince 5(4) integrator for two-component first-order
//! systems, with dense node storage for Hermite interpolation.

use crate::error::{Result, TfError};

/// One accepted step: abscissa, state and state derivative.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: f64,
    pub y: [f64; 2],
    pub dy: [f64; 2],
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    Reached,
    Event,
}

pub struct Dopri5Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub store: bool,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            store: true,
        }
    }
}

pub struct Integration {
    pub nodes: Vec<Node>,
    pub halt: Halt,
    pub x_end: f64,
    pub y_end: [f64; 2],
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate dy/dx = rhs(x, y) from `x0` to `x1` (either direction).
///
/// After each accepted step `event(x, y)` is consulted; returning `true`
/// halts the integration at that node.
pub fn integrate<F, E>(
    rhs: F,
    x0: f64,
    x1: f64,
    y0: [f64; 2],
    opts: &Dopri5Options,
    mut event: E,
) -> Result<Integration>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
    E: FnMut(f64, [f64; 2]) -> bool,
{
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = rhs(x, y);
    let mut nodes = Vec::new();
    if opts.store {
        nodes.push(Node { x, y, dy: k1 });
    }

    let mut h = (span * 1e-4).min(opts.max_step).max(1e-10) * dir;
    let h_floor = span * 1e-15 + 1e-300;

    loop {
        if (x - x1).abs() <= h_floor || (x1 - x) * dir <= 0.0 {
            break;
        }
        if ((x1 - x) * dir) < h.abs() {
            h = x1 - x;
        }
        if h.abs() < h_floor {
            return Err(TfError::StepUnderflow(x));
        }

        let k2 = rhs(x + A21 * h, add(y, h, [(A21, k1)].as_slice()));
        let k3 = rhs(x + 0.3 * h, add(y, h, &[(A31, k1), (A32, k2)]));
        let k4 = rhs(x + 0.8 * h, add(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = rhs(
            x + 8.0 / 9.0 * h,
            add(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]),
        );
        let k6 = rhs(
            x + h,
            add(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]),
        );
        let y_new = add(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        let k7 = rhs(x + h, y_new);

        let mut err = 0.0f64;
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }

        if err <= 1.0 {
            x += h;
            y = y_new;
            k1 = k7;
            if opts.store {
                nodes.push(Node { x, y, dy: k1 });
            }
            if event(x, y) {
                return Ok(Integration {
                    nodes,
                    halt: Halt::Event,
                    x_end: x,
                    y_end: y,
                });
            }
        }

        let fac = (0.9 * err.max(1e-30).powf(-0.2)).clamp(0.2, 5.0);
        h = (h * fac).clamp(-opts.max_step, opts.max_step);
        if h == 0.0 {
            h = h_floor * dir;
        }
    }

    Ok(Integration {
        nodes,
        halt: Halt::Reached,
        x_end: x,
        y_end: y,
    })
}

fn add(y: [f64; 2], h: f64, terms: &[(f64, [f64; 2])]) -> [f64; 2] {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Cubic Hermite evaluation of value and first derivative on [x0, x1]
/// given endpoint values and endpoint derivatives.
pub fn hermite(x: f64, x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1;
    let dh00 = 6.0 * t2 - 6.0 * t;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = -dh00;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let d = (dh00 * y0 + h * dh10 * d0 + dh01 * y1 + h * dh11 * d1) / h;
    (v, d)
}
