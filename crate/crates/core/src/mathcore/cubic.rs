use std::f64::consts::PI;

use super::MathError;

/// Three real roots, ascending, of `x³ + c2·x² + c1·x + c0`.
///
/// The cubic is depressed to `t³ + p·t + q` and solved with the
/// trigonometric formula; each root then gets guarded Newton polishing.
/// A negative discriminant beyond rounding level means a complex pair and is
/// rejected.
pub fn real_cubic_roots(c2: f64, c1: f64, c0: f64) -> Result<[f64; 3], MathError> {
    if !(c2.is_finite() && c1.is_finite() && c0.is_finite()) {
        return Err(MathError::NonFinite);
    }
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;

    // disc = -(4p³ + 27q²); compare against the size of its two terms
    let four_p3 = 4.0 * p * p * p;
    let q2 = 27.0 * q * q;
    let discriminant = -(four_p3 + q2);
    let scale = four_p3.abs() + q2 + f64::MIN_POSITIVE;
    if discriminant < -1e-10 * scale {
        return Err(MathError::ComplexRoots { discriminant });
    }

    let mut roots = if p >= 0.0 {
        // only reachable with p ≈ q ≈ 0: a triple root
        let t = -q.cbrt();
        [t, t, t]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        [r * theta.cos(), r * (theta - 2.0 * PI / 3.0).cos(), r * (theta - 4.0 * PI / 3.0).cos()]
    };
    for t in roots.iter_mut() {
        *t -= shift;
        *t = polish(*t, c2, c1, c0);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn eval(x: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    ((x + c2) * x + c1) * x + c0
}

fn polish(mut x: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    for _ in 0..4 {
        let f = eval(x, c2, c1, c0);
        let df = (3.0 * x + 2.0 * c2) * x + c1;
        if f == 0.0 || df == 0.0 {
            break;
        }
        let next = x - f / df;
        if eval(next, c2, c1, c0).abs() < f.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}
