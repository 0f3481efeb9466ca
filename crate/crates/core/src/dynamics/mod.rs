//! Time integration of the regularized system and its initial data.

mod flow_map;
mod init;
mod model;
mod pressure;
mod snapshot;
mod solver;

pub use flow_map::{flow_map_oracle, FlowMap, FlowMapOptions, SeedGrid};
pub use init::{
    curl_potential_f, init, seeded_stream, stream_velocity, taylor_green_velocity,
    warm_deformation, WARM_START_DET_TOL,
};
pub use model::{InitSpec, InitVariant, ModelParams, RunConfig, State, DEFAULT_CFL};
pub use pressure::{pi_fields, pressure};
pub use snapshot::{
    decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, SNAPSHOT_MAGIC,
    SNAPSHOT_VERSION,
};
pub use solver::{cfl_limit, elastic_stress, rhs, step, Integrator};
