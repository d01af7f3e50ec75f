//! Uniform one-dimensional grids and the amplitude vectors that live on them.
//!
//! Inner products use a uniform-weight Riemann sum: every node carries weight
//! `dx`. With that weight the discrete adjoint of a difference operator is its
//! plain matrix transpose, which the partner construction relies on. Fock-space
//! states share the same type with unit weight.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform mesh `x_i = x_min + i * dx`, `i = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite (got [{x_min}, {x_max}])"
            )));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min must be below x_max (got [{x_min}, {x_max}])"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "at least 3 points required (got {n_points})"
            )));
        }
        let dx = (x_max - x_min) / (n_points - 1) as f64;
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Coordinate of node `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.x(i))
    }
}

/// Free-function form of [`Grid::new`].
pub fn make_grid(x_min: f64, x_max: f64, n_points: usize) -> Result<Grid> {
    Grid::new(x_min, x_max, n_points)
}

/// Index set an amplitude vector is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Support {
    /// Spatial grid, quadrature weight `dx`.
    Grid(Grid),
    /// Photon-number states `|0>, ..., |dimension - 1>`, unit weight.
    Fock { dimension: usize },
}

impl Support {
    pub fn len(&self) -> usize {
        match self {
            Support::Grid(g) => g.n_points(),
            Support::Fock { dimension } => *dimension,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight carried by every index.
    pub fn weight(&self) -> f64 {
        match self {
            Support::Grid(g) => g.dx(),
            Support::Fock { .. } => 1.0,
        }
    }

    /// Position of index `i`: the node coordinate, or the photon number.
    pub fn coordinate(&self, i: usize) -> f64 {
        match self {
            Support::Grid(g) => g.x(i),
            Support::Fock { .. } => i as f64,
        }
    }
}

impl From<Grid> for Support {
    fn from(grid: Grid) -> Self {
        Support::Grid(grid)
    }
}

/// Complex amplitudes over a [`Support`].
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    support: Support,
    amplitudes: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(support: impl Into<Support>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let support = support.into();
        if amplitudes.len() != support.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            support,
            amplitudes,
        })
    }

    pub fn from_real(support: impl Into<Support>, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            support,
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    /// Samples `f` on every grid node.
    pub fn sample(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            support: Support::Grid(*grid),
            amplitudes: grid.nodes().map(f).collect(),
        }
    }

    pub fn sample_real(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::sample(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(support: impl Into<Support>) -> Self {
        let support = support.into();
        Self {
            support,
            amplitudes: vec![Complex64::new(0.0, 0.0); support.len()],
        }
    }

    /// Fock basis vector `|n>` in a space of the given dimension.
    pub fn fock_state(dimension: usize, n: usize) -> Result<Self> {
        if n >= dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: n + 1,
            });
        }
        let mut psi = Self::zeros(Support::Fock { dimension });
        psi.amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.support.weight() * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            support: self.support,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: Complex64, other: &Self) -> Result<Self> {
        if self.support != other.support {
            return Err(Error::SupportMismatch);
        }
        Ok(Self {
            support: self.support,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    /// Rescales to unit norm without touching the global phase.
    pub fn rescaled_to_unit(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    /// Rotates the global phase so the largest-modulus amplitude (first one on
    /// ties) is real and positive.
    pub fn with_phase_convention(&self) -> Self {
        let mut best = 0usize;
        let mut best_mod = -1.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let m = a.norm();
            if m > best_mod {
                best_mod = m;
                best = i;
            }
        }
        if best_mod <= 0.0 {
            return self.clone();
        }
        let pivot = self.amplitudes[best];
        self.scaled(pivot.conj() / pivot.norm())
    }

    /// Writes `x,re,im` rows with 17 significant digits. For Fock supports the
    /// first column is the photon number.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,re,im")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let x = self.support.coordinate(i);
            writeln!(out, "{},{},{}", fmt_sig17(x), fmt_sig17(a.re), fmt_sig17(a.im))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }
}

/// `sum_i conj(f_i) g_i w` with the support's uniform weight `w`.
pub fn inner_product(f: &Wavefunction, g: &Wavefunction) -> Result<Complex64> {
    if f.support != g.support {
        return Err(Error::SupportMismatch);
    }
    let sum: Complex64 = f
        .amplitudes
        .iter()
        .zip(&g.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * f.support.weight())
}

/// Unit-norm copy of `f` with the largest-modulus amplitude made real positive.
pub fn normalize(f: &Wavefunction) -> Result<Wavefunction> {
    Ok(f.rescaled_to_unit()?.with_phase_convention())
}

/// `|<f|g>|^2 / (<f|f><g|g>)`.
pub fn fidelity(f: &Wavefunction, g: &Wavefunction) -> Result<f64> {
    let fg = inner_product(f, g)?;
    let denom = f.norm_sqr() * g.norm_sqr();
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(fg.norm_sqr() / denom)
}

/// Fixed 17-significant-digit scientific rendering used by every report.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}
