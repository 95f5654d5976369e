pub mod distributions;
pub mod error;
pub mod harness;
pub mod exchangeable;
pub mod normal;
pub mod quadrature;
pub mod rng;
pub mod stein_equation;
pub mod bounds;
pub mod couplings;
pub mod distances;
