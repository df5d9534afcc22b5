//! Comparison methods: softened point masses and the logarithmic-spiral
//! (Kalnajs) potential.

pub mod gamma;
pub mod kalnajs;
pub mod softening;

pub use gamma::ln_gamma;
pub use kalnajs::{kalnajs_gamma_kernel, kalnajs_potential_axisym, KalnajsConfig};
pub use softening::{point_mass_force, softened_potential, solve_softened_cartesian, ForceRoute, SoftenedKernel, SofteningConfig};
