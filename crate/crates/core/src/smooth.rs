//! C∞ transitions built from `e^{-1/t}`.

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, C∞ in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = psi(t);
    let b = psi(1.0 - t);
    a / (a + b)
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = psi(t);
    let b = psi(1.0 - t);
    let s = a + b;
    a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s)
}

/// Plateau function: 1 on `[-inner, inner]`, 0 outside `(-outer, outer)`.
pub fn plateau(x: f64, inner: f64, outer: f64) -> f64 {
    smooth_step((outer - x.abs()) / (outer - inner))
}

/// Derivative of [`plateau`] in `x`.
pub fn plateau_deriv(x: f64, inner: f64, outer: f64) -> f64 {
    let w = outer - inner;
    -x.signum() * smooth_step_deriv((outer - x.abs()) / w) / w
}
