use serde::{Deserialize, Serialize};

use crate::dynamics::{flow_map_oracle, init, FlowMapOptions, Integrator, RunConfig, SeedGrid};
use crate::error::{Error, Result};
use crate::spectral::VectorField2;

/// PDE-evolved `F` against the Lagrangian deformation gradient of the same
/// velocity history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub t: f64,
    pub n: usize,
    /// `(∫|F_pde(x(X,t)) − ∇_X x · F₀(X)|² dX)^{1/2}`
    pub l2_error: f64,
    /// `(∫|∇_X x · F₀(X)|² dX)^{1/2}`
    pub l2_norm: f64,
    pub linf_error: f64,
}

/// Runs `config` (which must have `η = 0`, so that `F` is purely transported),
/// keeps every velocity field, and compares the final `F` with the flow-map
/// oracle seeded at the grid points.
pub fn oracle_check(config: &RunConfig, opts: FlowMapOptions) -> Result<OracleReport> {
    config.validate()?;
    if config.params.eta != 0.0 {
        return Err(Error::Config(format!(
            "the flow-map comparison needs params.eta = 0, got {}",
            config.params.eta
        )));
    }
    let grid = config.grid()?;
    let s0 = init(&config.init, &grid)?;
    let integ = Integrator::new(&grid, config.params, config.dt).with_cfl(config.cfl);
    let mut series: Vec<(f64, VectorField2)> = vec![(s0.t, s0.u.clone())];
    let last = integ.advance(&s0, config.steps(), |_, s| {
        series.push((s.t, s.u.clone()));
        Ok(())
    })?;
    let seeds = SeedGrid::periodic(&grid);
    let map = flow_map_oracle(&series, s0.t, last.t, &seeds, opts)?;
    let pde = map.sample_at_endpoints(&last.f);
    let da = grid.cell_area();
    let (mut err2, mut norm2, mut linf) = (0.0, 0.0, 0.0f64);
    for (idx, (j, fp)) in map.jacobian.iter().zip(&pde).enumerate() {
        let lag = *j * s0.f.at(idx);
        let d = (*fp - lag).norm();
        err2 += d * d * da;
        norm2 += lag.norm_sq() * da;
        linf = linf.max(d);
    }
    Ok(OracleReport {
        t: last.t,
        n: grid.n(),
        l2_error: err2.sqrt(),
        l2_norm: norm2.sqrt(),
        linf_error: linf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{InitSpec, ModelParams};

    #[test]
    fn small_taylor_green_matches_the_flow_map() {
        let cfg = RunConfig {
            n: 32,
            dt: 2e-3,
            t_end: 0.05,
            init: InitSpec::taylor_green(1.0, 1),
            ..RunConfig::default()
        };
        let r = oracle_check(
            &cfg,
            FlowMapOptions {
                substeps: 2,
                upsample: 4,
            },
        )
        .unwrap();
        assert!(r.l2_error < 1e-2 * r.l2_norm, "{r:?}");
    }

    #[test]
    fn rejects_diffusive_transport() {
        let cfg = RunConfig {
            n: 16,
            params: ModelParams::regularized(0.1, 0.0),
            ..RunConfig::default()
        };
        assert!(matches!(
            oracle_check(&cfg, FlowMapOptions::default()),
            Err(Error::Config(_))
        ));
    }
}
