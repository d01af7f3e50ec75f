//! Named superpotentials `W(x)` and the bundled registry.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `W(-x) = -W(x)`.
    Odd,
    None,
}

type WFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Superpotential {
    name: String,
    params: Vec<f64>,
    func: WFn,
    asymptotic_signs: (i8, i8),
    parity: Parity,
}

impl fmt::Debug for Superpotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Superpotential")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("asymptotic_signs", &self.asymptotic_signs)
            .field("parity", &self.parity)
            .finish()
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

impl Superpotential {
    pub fn custom(
        name: impl Into<String>,
        func: impl Fn(f64) -> f64 + Send + Sync + 'static,
        asymptotic_signs: (i8, i8),
        parity: Parity,
    ) -> Self {
        Self {
            name: name.into(),
            params: Vec::new(),
            func: Arc::new(func),
            asymptotic_signs,
            parity,
        }
    }

    /// `W(x) = slope * x + offset`.
    pub fn linear(slope: f64, offset: f64) -> Self {
        Self {
            name: "linear".into(),
            params: vec![slope, offset],
            func: Arc::new(move |x| slope * x + offset),
            asymptotic_signs: (-sign_of(slope), sign_of(slope)),
            parity: if offset == 0.0 { Parity::Odd } else { Parity::None },
        }
    }

    /// `W(x) = x`, the harmonic oscillator.
    pub fn harmonic() -> Self {
        Self {
            name: "harmonic".into(),
            ..Self::linear(1.0, 0.0)
        }
    }

    /// `W(x) = x^3`.
    pub fn cubic() -> Self {
        Self {
            name: "cubic".into(),
            params: Vec::new(),
            func: Arc::new(|x| x * x * x),
            asymptotic_signs: (-1, 1),
            parity: Parity::Odd,
        }
    }

    /// `W(x) = x^3 + a`.
    pub fn cubic_shifted(a: f64) -> Self {
        Self {
            name: "cubic_shifted".into(),
            params: vec![a],
            func: Arc::new(move |x| x * x * x + a),
            asymptotic_signs: (-1, 1),
            parity: if a == 0.0 { Parity::Odd } else { Parity::None },
        }
    }

    /// `W(x) = tanh(x)`.
    pub fn tanh() -> Self {
        Self {
            name: "tanh".into(),
            params: Vec::new(),
            func: Arc::new(f64::tanh),
            asymptotic_signs: (-1, 1),
            parity: Parity::Odd,
        }
    }

    /// `W(x) = 0`, the free particle.
    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            params: Vec::new(),
            func: Arc::new(|_| 0.0),
            asymptotic_signs: (0, 0),
            parity: Parity::Odd,
        }
    }

    /// Registry lookup. Missing trailing parameters take their defaults:
    /// `linear [slope = 1, offset = 0]`, `cubic_shifted [a = 0.5]`.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let too_many = |max: usize| {
            Error::InvalidParameter(format!(
                "`{name}` takes at most {max} parameter(s), got {}",
                params.len()
            ))
        };
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "superpotential parameter {p} is not finite"
            )));
        }
        match name {
            "harmonic" | "cubic" | "tanh" | "zero" if !params.is_empty() => Err(too_many(0)),
            "harmonic" => Ok(Self::harmonic()),
            "cubic" => Ok(Self::cubic()),
            "tanh" => Ok(Self::tanh()),
            "zero" => Ok(Self::zero()),
            "linear" => match params {
                [] => Ok(Self::linear(1.0, 0.0)),
                [s] => Ok(Self::linear(*s, 0.0)),
                [s, o] => Ok(Self::linear(*s, *o)),
                _ => Err(too_many(2)),
            },
            "cubic_shifted" => match params {
                [] => Ok(Self::cubic_shifted(0.5)),
                [a] => Ok(Self::cubic_shifted(*a)),
                _ => Err(too_many(1)),
            },
            other => Err(Error::UnknownSuperpotential(other.to_string())),
        }
    }

    /// Names accepted by [`Superpotential::from_name`].
    pub fn registry() -> &'static [&'static str] {
        &["harmonic", "linear", "cubic", "cubic_shifted", "tanh", "zero"]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn asymptotic_signs(&self) -> (i8, i8) {
        self.asymptotic_signs
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        (self.func)(x)
    }

    /// Values on every grid node; errors on the first non-finite one.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        grid.nodes()
            .map(|x| {
                let w = self.evaluate(x);
                if w.is_finite() {
                    Ok(w)
                } else {
                    Err(Error::NonFiniteSuperpotential {
                        name: self.name.clone(),
                        x,
                    })
                }
            })
            .collect()
    }

    /// Whether `W(-x) = -W(x)` holds on mirrored node pairs of `grid`.
    pub fn is_odd_on(&self, grid: &Grid, tol: f64) -> bool {
        let n = grid.n_points();
        (0..n).all(|i| {
            let x = grid.x(i);
            (self.evaluate(-x) + self.evaluate(x)).abs() <= tol * self.evaluate(x).abs().max(1.0)
        })
    }
}
