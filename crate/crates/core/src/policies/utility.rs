//! The alpha-fair utility family and its virtual-arrival maximizer.

/// `(d+x)^(1-α)/(1-α)` for `α ≠ 1`, `ln(1 + x/d)` for `α = 1`.
pub fn g_utility(x: f64, alpha: f64, shift: f64) -> f64 {
    if alpha == 1.0 {
        (x / shift).ln_1p()
    } else {
        (shift + x).powf(1.0 - alpha) / (1.0 - alpha)
    }
}

/// `g'(x) = (d+x)^(-α)`.
pub fn g_derivative(x: f64, alpha: f64, shift: f64) -> f64 {
    (shift + x).powf(-alpha)
}

/// Maximizer of `V g(x) - U x` over `[0, γ_max]`.
pub fn gamma_opt(virtual_backlog: f64, alpha: f64, shift: f64, tradeoff: f64, gamma_max: f64) -> f64 {
    if virtual_backlog <= 0.0 {
        return gamma_max;
    }
    if alpha == 0.0 {
        return if virtual_backlog <= tradeoff { gamma_max } else { 0.0 };
    }
    let ratio = tradeoff / virtual_backlog;
    let x = if alpha == 1.0 {
        ratio - shift
    } else {
        ratio.powf(1.0 / alpha) - shift
    };
    x.clamp(0.0, gamma_max)
}
