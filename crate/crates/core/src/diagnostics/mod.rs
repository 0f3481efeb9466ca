//! Measured functionals of states and snapshot series.

mod constraints;
mod energy;
mod flux;
mod record;
mod renorm;
mod reports;

pub use constraints::{
    constraint_residuals, gradient_norm_margin, moment, pi_identity_residual,
    pi_identity_residual_with, tau_evolution_residual, ConstraintReport, PiProducts,
};
pub use energy::{
    energy_balance_residual, energy_report, exact_energy_balance_residual, EnergyReport,
};
pub use flux::{
    advection, curl, effective_flux, flux_identity_residual, flux_identity_residual_instant,
    hopf_bracket, rotated_hopf_bracket, FluxSet,
};
pub use record::{
    csv_header, read_records_csv, renorm_column, write_records_csv, DiagnosticsRecord,
    RECORD_COLUMNS,
};
pub use renorm::{renorm_residual, renorm_residual_tau};
pub use reports::{
    detf_uniform_report, integrability_report, perturbation_report, DetfReport,
    IntegrabilityReport, PerturbationReport,
};
