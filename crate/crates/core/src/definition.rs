//! Systems described as JSON data with expression-valued coefficients.
//!
//! ```json
//! {"kind": "second_order", "u": "1", "v": "2 - exp(-tau)", "f": "1", "h": "y",
//!  "q": "exp(-tau)", "r1": "exp(-tau)", "r2": "exp(-tau)", "y0": 1, "z0": 0}
//! ```
//!
//! | kind           | fields (variables)                                                    |
//! |----------------|-----------------------------------------------------------------------|
//! | `first_order`  | `g` (`y`)                                                             |
//! | `second_order` | `u`, `v`, `r1`, `r2` (`tau`); `f` (`y`, `z`); `h`, `potential` (`y`); `q` (`tau`, `y`, `z`) |
//! | `lienard`      | `friction`, `h` (`y`)                                                 |
//!
//! Every kind also accepts `y0`, `z0`, `equilibrium` (`[y, z]`), and
//! `lyapunov` (`tau`, `y`, `z`). Derivatives of `v`, `h` and the Lyapunov
//! function are taken symbolically. `second_order` takes an optional
//! `constants` object (see `SystemConstants`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Compiled, Expr};
use crate::fde::{FdeSystem, FirstOrder, LienardSystem, PlanarField, SystemConstants};
use crate::lyapunov::{forced_energy, LyapunovFunction};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    FirstOrder {
        g: String,
    },
    SecondOrder {
        u: String,
        v: String,
        f: String,
        h: String,
        #[serde(default)]
        q: Option<String>,
        #[serde(default)]
        potential: Option<String>,
        #[serde(default)]
        r1: Option<String>,
        #[serde(default)]
        r2: Option<String>,
        #[serde(default)]
        constants: SystemConstants,
    },
    Lienard {
        friction: String,
        h: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDefinition {
    #[serde(flatten)]
    pub model: ModelSpec,
    #[serde(default = "one")]
    pub y0: f64,
    #[serde(default)]
    pub z0: f64,
    #[serde(default)]
    pub equilibrium: [f64; 2],
    #[serde(default)]
    pub lyapunov: Option<String>,
}

fn one() -> f64 {
    1.0
}

pub type BoxedScalar = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A compiled definition.
pub enum System {
    FirstOrder(FirstOrder<BoxedScalar>),
    SecondOrder(FdeSystem),
    Lienard(LienardSystem),
}

impl PlanarField for System {
    fn rates(&self, tau: f64, y: f64, z: f64) -> (f64, f64) {
        match self {
            System::FirstOrder(s) => s.rates(tau, y, z),
            System::SecondOrder(s) => s.rates(tau, y, z),
            System::Lienard(s) => s.rates(tau, y, z),
        }
    }

    fn state_dim(&self) -> usize {
        match self {
            System::FirstOrder(s) => s.state_dim(),
            _ => 2,
        }
    }
}

fn compile(field: &str, src: &str, vars: &[&str]) -> Result<Compiled> {
    Expr::parse(src)
        .and_then(|e| e.bind(vars))
        .map_err(|e| Error::Expr(format!("field '{field}': {}", strip(e))))
}

fn compile_derivative(field: &str, src: &str, vars: &[&str], wrt: &str) -> Result<Compiled> {
    Expr::parse(src)
        .and_then(|e| e.derivative(wrt).bind(vars))
        .map_err(|e| Error::Expr(format!("field '{field}': {}", strip(e))))
}

fn strip(e: Error) -> String {
    match e {
        Error::Expr(msg) => msg,
        other => other.to_string(),
    }
}

fn scalar(c: Compiled) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    move |x| c.eval(&[x])
}

impl SystemDefinition {
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Parameter(format!("system definition: {e}")))
    }

    pub fn build(&self) -> Result<System> {
        Ok(match &self.model {
            ModelSpec::FirstOrder { g } => {
                let g = compile("g", g, &["y"])?;
                System::FirstOrder(FirstOrder(Box::new(scalar(g))))
            }
            ModelSpec::SecondOrder {
                u,
                v,
                f,
                h,
                q,
                potential,
                r1,
                r2,
                constants,
            } => {
                let uc = compile("u", u, &["tau"])?;
                let vc = compile("v", v, &["tau"])?;
                let dv = compile_derivative("v", v, &["tau"], "tau")?;
                let fc = compile("f", f, &["y", "z"])?;
                let hc = compile("h", h, &["y"])?;
                let dh = compile_derivative("h", h, &["y"], "y")?;
                let mut sys = FdeSystem::new(scalar(uc), scalar(vc), move |y, z| fc.eval(&[y, z]), scalar(hc))
                    .with_v_rate(scalar(dv))
                    .with_h_slope(scalar(dh))
                    .with_constants(*constants);
                if let Some(q) = q {
                    let qc = compile("q", q, &["tau", "y", "z"])?;
                    sys = sys.with_forcing(move |t, y, z| qc.eval(&[t, y, z]));
                }
                if let Some(p) = potential {
                    sys = sys.with_potential(scalar(compile("potential", p, &["y"])?));
                }
                match (r1, r2) {
                    (Some(a), Some(b)) => {
                        let a = compile("r1", a, &["tau"])?;
                        let b = compile("r2", b, &["tau"])?;
                        sys = sys.with_forcing_bounds(scalar(a), scalar(b));
                    }
                    (None, None) => {}
                    _ => return Err(Error::Parameter("r1 and r2 must be given together".into())),
                }
                System::SecondOrder(sys)
            }
            ModelSpec::Lienard { friction, h } => System::Lienard(LienardSystem {
                friction: Arc::new(scalar(compile("friction", friction, &["y"])?)),
                restoring: Arc::new(scalar(compile("h", h, &["y"])?)),
            }),
        })
    }

    /// The supplied `lyapunov` expression, or a default: the squared
    /// distance to the equilibrium for first-order systems, `v H + z²/2 + k`
    /// for second-order ones and `∫h + z²/2` for Liénard systems.
    pub fn lyapunov(&self, system: &System) -> Result<LyapunovFunction> {
        if let Some(src) = &self.lyapunov {
            let vars = ["tau", "y", "z"];
            let value = compile("lyapunov", src, &vars)?;
            let grad: Vec<Compiled> = vars
                .iter()
                .map(|v| compile_derivative("lyapunov", src, &vars, v))
                .collect::<Result<_>>()?;
            return Ok(LyapunovFunction::new(move |t, y, z| value.eval(&[t, y, z]))
                .with_gradient(move |t, y, z| {
                    let x = [t, y, z];
                    [grad[0].eval(&x), grad[1].eval(&x), grad[2].eval(&x)]
                }));
        }
        let [ye, ze] = self.equilibrium;
        Ok(match system {
            System::FirstOrder(_) => {
                LyapunovFunction::new(move |_, y, _| (y - ye) * (y - ye)).with_gradient(move |_, y, _| [0.0, 2.0 * (y - ye), 0.0])
            }
            System::SecondOrder(sys) => forced_energy(sys),
            System::Lienard(sys) => {
                let (a, b) = (sys.restoring.clone(), sys.restoring.clone());
                LyapunovFunction::new(move |_, y, z| crate::fde::integrate_gl(|x| a(x), ye, y) + 0.5 * (z - ze) * (z - ze))
                    .with_gradient(move |_, y, z| [0.0, b(y), z - ze])
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parses_each_kind() {
        let d = SystemDefinition::from_json(r#"{"kind": "first_order", "g": "-y", "y0": 0.5}"#).unwrap();
        assert_eq!(d.y0, 0.5);
        let s = d.build().unwrap();
        assert_eq!(s.state_dim(), 1);
        assert_eq!(s.rates(0.0, 2.0, 0.0), (-2.0, 0.0));

        let d = SystemDefinition::from_json(
            r#"{"kind": "second_order", "u": "1", "v": "2 - exp(-tau)", "f": "1", "h": "y^3 + y",
                "q": "exp(-tau)", "r1": "exp(-tau)", "r2": "exp(-tau)", "constants": {"Q": 3}}"#,
        )
        .unwrap();
        assert_eq!(d.y0, 1.0);
        let System::SecondOrder(sys) = d.build().unwrap() else {
            panic!("wrong kind")
        };
        assert_eq!(sys.constants.q, 3.0);
        assert_eq!(sys.v_rate(0.0), 1.0);
        assert_eq!(sys.h_slope(1.0), 4.0);
        assert_relative_eq!(sys.potential(1.0), 0.75, max_relative = 1e-13);
        let (dy, dz) = sys.rates(0.0, 1.0, 2.0);
        assert_eq!(dy, 2.0);
        assert_relative_eq!(dz, -2.0 - 2.0 + 1.0);

        let d = SystemDefinition::from_json(r#"{"kind": "lienard", "friction": "y^3/3", "h": "y", "z0": 1}"#).unwrap();
        let s = d.build().unwrap();
        assert_eq!(s.rates(0.0, 3.0, 1.0), (1.0 - 9.0, -3.0));
    }

    #[test]
    fn malformed_definitions() {
        assert!(SystemDefinition::from_json(r#"{"kind": "cubic"}"#).is_err());
        assert!(SystemDefinition::from_json(r#"{"kind": "first_order"}"#).is_err());
        let bad_var = SystemDefinition::from_json(r#"{"kind": "first_order", "g": "-z"}"#).unwrap();
        let err = bad_var.build().err().unwrap();
        assert!(err.to_string().contains("'g'"), "{err}");
        let bad_syntax = SystemDefinition::from_json(r#"{"kind": "lienard", "friction": "y^", "h": "y"}"#).unwrap();
        assert!(bad_syntax.build().is_err());
        let half = SystemDefinition::from_json(
            r#"{"kind": "second_order", "u": "1", "v": "1", "f": "1", "h": "y", "r1": "1"}"#,
        )
        .unwrap();
        assert!(half.build().is_err());
    }

    #[test]
    fn lyapunov_expression_gets_symbolic_gradient() {
        let d = SystemDefinition::from_json(
            r#"{"kind": "lienard", "friction": "0", "h": "2*y", "lyapunov": "y^2 + z^2/2 + tau*0"}"#,
        )
        .unwrap();
        let s = d.build().unwrap();
        let l = d.lyapunov(&s).unwrap();
        assert_eq!(l.gradient(0.0, 1.5, -1.0).unwrap(), [0.0, 3.0, -1.0]);
        let dl = crate::lyapunov::lyapunov_derivative(&l, &s, 0.0, 1.5, -1.0).unwrap();
        assert_eq!(dl, 0.0);
    }

    #[test]
    fn default_lyapunov_functions_vanish_at_equilibrium() {
        for src in [
            r#"{"kind": "first_order", "g": "1 - y", "equilibrium": [1, 0]}"#,
            r#"{"kind": "lienard", "friction": "y", "h": "y"}"#,
        ] {
            let d = SystemDefinition::from_json(src).unwrap();
            let s = d.build().unwrap();
            let l = d.lyapunov(&s).unwrap();
            let [ye, ze] = d.equilibrium;
            assert_eq!(l.value(0.0, ye, ze), 0.0);
            assert!(l.value(0.0, ye + 0.5, ze) > 0.0);
        }
    }
}
