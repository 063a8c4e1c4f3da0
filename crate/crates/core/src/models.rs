//! Built-in systems and their Lyapunov functions.

use std::sync::Arc;

use crate::fde::{FdeSystem, FirstOrder, LienardSystem};
use crate::lyapunov::LyapunovFunction;

/// `D^α h = -h`; the solution from `h(t0) = c` is `c exp(-S(t))`.
pub fn exponential_decay() -> FirstOrder<fn(f64) -> f64> {
    FirstOrder(|h| -h)
}

/// `L = h²`, so that `D^α L = -2 h²` along `exponential_decay`.
pub fn decay_energy() -> LyapunovFunction {
    LyapunovFunction::new(|_, y, _| y * y).with_gradient(|_, y, _| [0.0, 2.0 * y, 0.0])
}

/// `(D^α)² y + y² D^α y + y = 0` in Liénard form, `F(y) = y³ / 3`.
pub fn cubic_lienard() -> LienardSystem {
    LienardSystem {
        friction: Arc::new(|y: f64| y * y * y / 3.0),
        restoring: Arc::new(|y| y),
    }
}

/// `L = H(y) + z² / 2` with `H(y) = y² / 2`; along `cubic_lienard`,
/// `D^α L = -h(y) F(y) = -y⁴ / 3`.
pub fn lienard_energy() -> LyapunovFunction {
    LyapunovFunction::new(|_, y, z| 0.5 * y * y + 0.5 * z * z).with_gradient(|_, y, z| [0.0, y, z])
}

/// `(D^α)² y + c y = 0`.
pub fn harmonic_oscillator(c: f64) -> LienardSystem {
    LienardSystem {
        friction: Arc::new(|_| 0.0),
        restoring: Arc::new(move |y| c * y),
    }
}

/// `L = c y² / 2 + z² / 2`, conserved along `harmonic_oscillator(c)`.
pub fn oscillator_energy(c: f64) -> LyapunovFunction {
    LyapunovFunction::new(move |_, y, z| 0.5 * c * y * y + 0.5 * z * z).with_gradient(move |_, y, z| [0.0, c * y, z])
}

/// `u = v = f = 1`, `h(y) = y`, `q = 0`, with exact `D v`, `D h` and `H`.
pub fn unit_damped_oscillator() -> FdeSystem {
    FdeSystem::new(|_| 1.0, |_| 1.0, |_, _| 1.0, |y| y)
        .with_v_rate(|_| 0.0)
        .with_h_slope(|_| 1.0)
        .with_potential(|y| 0.5 * y * y)
}

/// `unit_damped_oscillator` forced by `q = e^{-τ}`, with
/// `r1 = r2 = e^{-τ}`.
pub fn forced_damped_oscillator() -> FdeSystem {
    unit_damped_oscillator()
        .with_forcing(|tau, _, _| (-tau).exp())
        .with_forcing_bounds(|tau| (-tau).exp(), |tau| (-tau).exp())
}
