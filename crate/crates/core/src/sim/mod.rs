//! Simulation scenarios, Monte Carlo studies, and baseline envelopes.

mod envelope;
pub mod generate;
mod monte_carlo;

pub use envelope::{default_grid, lambda_envelope, quantile_sorted, EnvelopeRow, DEFAULT_GRID_POINTS, MIN_REPLICATES};
pub use generate::{gen_scenario, gen_scenario1, gen_scenario2, Scenario};
pub use monte_carlo::{monte_carlo, McStudy, McSummary, Replicate, ReplicateFit, ScenarioConfig};
