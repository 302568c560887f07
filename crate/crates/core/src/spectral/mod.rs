//! Discrete function space on the periodic channel and its elliptic solvers.

pub mod elliptic;
pub mod field;
pub mod grid;
pub mod quadrature;
pub mod ultraspherical;

pub use elliptic::{
    solve_clamped_second_grade, solve_clamped_second_grade_walls, solve_helmholtz_influence,
    solve_poisson_dirichlet, ModeSolver,
};
pub use field::SpectralScalarField;
pub use grid::{ChannelGrid, Resolution};
