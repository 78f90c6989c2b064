pub mod exponents;
pub mod integrator;
pub mod morawetz;
pub mod runner;
pub mod scattering;
pub mod spectral;
