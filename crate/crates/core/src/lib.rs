//! Landau-de Gennes Q-tensor energy minimization on a cube with Dirichlet
//! boundary data, together with the diagnostics needed to tell isotropic
//! melting apart from biaxial escape at low temperature.

pub mod config;
pub mod diagnostics;
pub mod eigen;
pub mod energy;
pub mod error;
pub mod field;
pub mod minimize;
pub mod output;
pub mod sweep;
pub mod tensor;

pub use diagnostics::{biaxiality, beta_field, blow_up_extract, classify, h_mass, min_norm, Classification, EscapeReport, Thresholds};
pub use eigen::{eigensystem, Eigensystem};
pub use energy::{energy, gradient, residual_norm, EnergyBreakdown, PotentialMode};
pub use error::{Error, Result};
pub use field::{constant_boundary, hedgehog_boundary, init_radial_ansatz, init_random, DirectorField, Grid, QField};
pub use minimize::{check_maximum_principle, minimize, MinimizeOptions, MinimizeReport, StepRule};
pub use tensor::{bulk_f, grad_reduced_h, lambda_of_t, reduce, reduced_h, s_star, MaterialParams, QTensor, ReducedParams};
