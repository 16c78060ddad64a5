//! Explicit Runge-Kutta time stepping on flat state vectors.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Three-stage, third-order strong-stability-preserving scheme.
    Ssprk33,
    /// Classical four-stage Runge-Kutta.
    Rk4,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ssprk33" | "ssprk3" => Ok(Method::Ssprk33),
            "rk4" => Ok(Method::Rk4),
            other => Err(Error::Config(format!("unknown time integrator '{other}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ssprk33 => "ssprk33",
            Method::Rk4 => "rk4",
        })
    }
}

/// A method with a fixed step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepper {
    pub method: Method,
    pub dt: f64,
}

/// Stage buffers reused across steps.
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    stage: Vec<f64>,
    rate: Vec<f64>,
    acc: Vec<f64>,
}

impl Workspace {
    fn resize(&mut self, n: usize) {
        self.stage.resize(n, 0.0);
        self.rate.resize(n, 0.0);
        self.acc.resize(n, 0.0);
    }
}

impl Stepper {
    pub fn new(method: Method, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param(
                "dt",
                format!("{dt} must be positive and finite"),
            ));
        }
        Ok(Stepper { method, dt })
    }

    /// Advances `u` by one step of the ODE `u' = L(u)`.
    ///
    /// `rhs(state, out)` writes `L(state)` into `out`.
    pub fn step<F>(&self, u: &mut [f64], ws: &mut Workspace, mut rhs: F) -> Result<()>
    where
        F: FnMut(&[f64], &mut [f64]) -> Result<()>,
    {
        let n = u.len();
        ws.resize(n);
        let dt = self.dt;
        match self.method {
            Method::Ssprk33 => {
                rhs(u, &mut ws.rate)?;
                for i in 0..n {
                    ws.stage[i] = u[i] + dt * ws.rate[i];
                }
                rhs(&ws.stage, &mut ws.rate)?;
                for i in 0..n {
                    ws.stage[i] = 0.75 * u[i] + 0.25 * (ws.stage[i] + dt * ws.rate[i]);
                }
                rhs(&ws.stage, &mut ws.rate)?;
                for i in 0..n {
                    u[i] = u[i] / 3.0 + 2.0 / 3.0 * (ws.stage[i] + dt * ws.rate[i]);
                }
            }
            Method::Rk4 => {
                rhs(u, &mut ws.rate)?;
                for i in 0..n {
                    ws.acc[i] = ws.rate[i];
                    ws.stage[i] = u[i] + 0.5 * dt * ws.rate[i];
                }
                rhs(&ws.stage, &mut ws.rate)?;
                for i in 0..n {
                    ws.acc[i] += 2.0 * ws.rate[i];
                    ws.stage[i] = u[i] + 0.5 * dt * ws.rate[i];
                }
                rhs(&ws.stage, &mut ws.rate)?;
                for i in 0..n {
                    ws.acc[i] += 2.0 * ws.rate[i];
                    ws.stage[i] = u[i] + dt * ws.rate[i];
                }
                rhs(&ws.stage, &mut ws.rate)?;
                for i in 0..n {
                    u[i] += dt / 6.0 * (ws.acc[i] + ws.rate[i]);
                }
            }
        }
        Ok(())
    }
}
