//! Discrete factorization `H+ = B B^+`, `H- = B^+ B` and the supercharges.
//!
//! `B = (D + W) / sqrt(2)` with `D` the forward difference
//! `(D psi)_i = (psi_{i+1} - psi_i) / dx` and `psi_n = 0` beyond the last
//! node. `B^+` is the literal transpose, so both partners are built from the
//! same bidiagonal factor and share every eigenvalue at matrix level.
//!
//! Spinor components are ordered spin-up block first, `|up> = (1, 0)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, Support};
use crate::operator::OperatorMatrix;
use crate::superpotential::Superpotential;

/// Which partner Hamiltonian a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Partner {
    /// `H+ = B B^+`, spin up.
    Plus,
    /// `H- = B^+ B`, spin down.
    Minus,
}

/// The discrete annihilator `B = (D_fwd + diag(W(x_i))) / sqrt(2)`.
pub fn build_annihilator(w: &Superpotential, grid: &Grid) -> Result<OperatorMatrix> {
    let values = w.sample(grid)?;
    let n = grid.n_points();
    let inv_dx = 1.0 / grid.dx();
    let re = |v: f64| Complex64::new(v, 0.0);
    let diag = values
        .iter()
        .enumerate()
        .map(|(i, &wi)| (i, i, re((wi - inv_dx) * FRAC_1_SQRT_2)));
    let upper = (0..n - 1).map(|i| (i, i + 1, re(inv_dx * FRAC_1_SQRT_2)));
    Ok(OperatorMatrix::from_triplets(n, diag.chain(upper)))
}

/// `true` iff `W(x_min) < 0` and `W(x_max) > 0`; a vanishing boundary value is
/// indeterminate.
pub fn check_sign_condition(w: &Superpotential, grid: &Grid) -> Result<bool> {
    let left = w.evaluate(grid.x_min());
    let right = w.evaluate(grid.x(grid.n_points() - 1));
    for (x, v) in [(grid.x_min(), left), (grid.x(grid.n_points() - 1), right)] {
        if !v.is_finite() {
            return Err(Error::NonFiniteSuperpotential {
                name: w.name().to_string(),
                x,
            });
        }
        if v == 0.0 {
            return Err(Error::IndeterminateSign { x });
        }
    }
    Ok(left < 0.0 && right > 0.0)
}

#[derive(Debug, Clone)]
pub struct SusySystem {
    grid: Grid,
    superpotential: Superpotential,
    b: OperatorMatrix,
    b_adj: OperatorMatrix,
    h_plus: OperatorMatrix,
    h_minus: OperatorMatrix,
}

impl SusySystem {
    pub fn new(superpotential: Superpotential, grid: Grid) -> Result<Self> {
        let b = build_annihilator(&superpotential, &grid)?;
        let b_adj = b.transpose();
        let h_plus = b.matmul(&b_adj);
        let h_minus = b_adj.matmul(&b);
        Ok(Self {
            grid,
            superpotential,
            b,
            b_adj,
            h_plus,
            h_minus,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn support(&self) -> Support {
        Support::Grid(self.grid)
    }

    pub fn superpotential(&self) -> &Superpotential {
        &self.superpotential
    }

    /// `B`.
    pub fn annihilator(&self) -> &OperatorMatrix {
        &self.b
    }

    /// `B^+`.
    pub fn creator(&self) -> &OperatorMatrix {
        &self.b_adj
    }

    pub fn h_plus(&self) -> &OperatorMatrix {
        &self.h_plus
    }

    pub fn h_minus(&self) -> &OperatorMatrix {
        &self.h_minus
    }

    pub fn partner(&self, which: Partner) -> &OperatorMatrix {
        match which {
            Partner::Plus => &self.h_plus,
            Partner::Minus => &self.h_minus,
        }
    }

    /// `diag(H+, H-)`.
    pub fn hamiltonian(&self) -> OperatorMatrix {
        build_susy_hamiltonian(self)
    }

    /// `(Q1, Q2)`.
    pub fn supercharges(&self) -> (OperatorMatrix, OperatorMatrix) {
        build_supercharges(self)
    }

    /// `Q+ = B f^+ = [[0, B], [0, 0]]`.
    pub fn q_plus(&self) -> OperatorMatrix {
        OperatorMatrix::block2x2(None, Some(&self.b), None, None)
    }

    /// `Q- = B^+ f = [[0, 0], [B^+, 0]]`.
    pub fn q_minus(&self) -> OperatorMatrix {
        OperatorMatrix::block2x2(None, None, Some(&self.b_adj), None)
    }

    /// Witten parity `diag(I, -I)`.
    pub fn witten_parity(&self) -> OperatorMatrix {
        let n = self.grid.n_points();
        let id = OperatorMatrix::identity(n);
        OperatorMatrix::block2x2(Some(&id), None, None, Some(&id.scale_real(-1.0)))
    }
}

/// Block-diagonal `diag(H+, H-)` of dimension `2n`, spin-up block first.
pub fn build_susy_hamiltonian(sys: &SusySystem) -> OperatorMatrix {
    OperatorMatrix::block2x2(Some(&sys.h_plus), None, None, Some(&sys.h_minus))
}

/// `Q1 = [[0, B], [B^+, 0]]` and `Q2 = (Q+ - Q-)/i = [[0, -iB], [iB^+, 0]]`.
pub fn build_supercharges(sys: &SusySystem) -> (OperatorMatrix, OperatorMatrix) {
    let q1 = OperatorMatrix::block2x2(None, Some(&sys.b), Some(&sys.b_adj), None);
    let i = Complex64::new(0.0, 1.0);
    let q2 = OperatorMatrix::block2x2(
        None,
        Some(&sys.b.scale(-i)),
        Some(&sys.b_adj.scale(i)),
        None,
    );
    (q1, q2)
}
