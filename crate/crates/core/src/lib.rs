//! Numerical N=2 supersymmetric quantum mechanics.
//!
//! Partner Hamiltonians `H+- ` are built from a superpotential on a uniform
//! grid through an exact bidiagonal factorization, so the two spectra agree
//! at matrix level. On top of that sit the supercharges, the zero mode, the
//! intertwining maps, spin-mode entanglement measures and the Jaynes-Cummings
//! model on a truncated Fock space.
//!
//! ```
//! use susyqm::{make_grid, solve_partners, Superpotential, SusySystem};
//!
//! let grid = make_grid(-10.0, 10.0, 2001).unwrap();
//! let sys = SusySystem::new(Superpotential::harmonic(), grid).unwrap();
//! let spectrum = solve_partners(&sys, 3, 1e-10).unwrap();
//! let (plus, minus) = spectrum.level(1).unwrap();
//! assert!((plus.energy - minus.energy).abs() <= 1e-10);
//! ```

pub mod entanglement;
pub mod error;
pub mod grid;
pub mod jaynes_cummings;
pub mod operator;
pub mod spectral;
pub mod superpotential;
pub mod susy;
pub mod tridiagonal;

pub use entanglement::{
    build_energy_eigenstate, c_max, coefficients, concurrence_from_spin, concurrence_overlap,
    entanglement_report, schmidt_coefficients, schmidt_svd_oracle, spin_expectation,
    supercharge_eigenstates, EntanglementReport, SpinorState, SuperchargeEigenstates,
};
pub use error::{Error, Result};
pub use grid::{fidelity, fmt_sig17, inner_product, make_grid, normalize, Grid, Support, Wavefunction};
pub use jaynes_cummings::{
    build_jc, compare_spectrum, numeric_vs_analytic, verify_susy_algebra, AlgebraReport, Branch,
    FockSpace, JcComparison, JcLevel, JcSystem,
};
pub use operator::OperatorMatrix;
pub use spectral::{
    align_phase, analytic_zero_mode, intertwine_down, intertwine_up, pair_partner_levels,
    residual_norm, solve_partner, solve_partners, solve_spectrum, zero_mode, DegeneracyReport,
    EigenPair, LevelPair, PartnerSpectrum, PAIRING_TOLERANCE, ZERO_MODE_THRESHOLD,
};
pub use superpotential::{Parity, Superpotential};
pub use susy::{build_annihilator, build_supercharges, build_susy_hamiltonian, check_sign_condition, Partner, SusySystem};
pub use tridiagonal::SymmetricTridiagonal;
