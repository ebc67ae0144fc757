//! Trajectory dumps for `relstab simulate`.

use crate::error::CliError;
use crate::request::ResolvedCase;
use relstab_core::dynamics::dominant_mode;
use relstab_core::RotatingFrame;
use serde::{Deserialize, Serialize};

pub const TRAJECTORY_SCHEMA: &str = "relstab.trajectory/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub periods: f64,
    pub steps_per_period: f64,
    /// Initial displacement along the dominant mode, relative to the
    /// configuration radius. Zero integrates the bare equilibrium.
    pub epsilon: f64,
    /// Keep every `stride`-th step.
    pub stride: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { periods: 10.0, steps_per_period: 1e4, epsilon: 0.0, stride: 100 }
    }
}

/// One sample: rotating-frame positions and velocities, flattened as
/// `x1, y1, x2, y2, ...`, and the Jacobi energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub schema: String,
    pub case: String,
    pub potential: String,
    pub masses: Vec<f64>,
    pub omega: f64,
    pub period: f64,
    pub dt: f64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_time: Option<f64>,
}

pub fn simulate(case: &ResolvedCase, opts: SimulationOptions) -> Result<(TrajectoryHeader, Vec<TrajectoryRecord>), CliError> {
    if !(opts.periods > 0.0 && opts.steps_per_period >= 1.0 && opts.epsilon >= 0.0 && opts.stride > 0) {
        return Err(CliError::Input("periods and steps per period must be positive, epsilon non-negative".into()));
    }
    let frame = RotatingFrame::new(&case.config, &case.spec).map_err(CliError::from_core)?;
    let period = frame.period();
    let dt = period / opts.steps_per_period;
    let mut z0 = frame.equilibrium().to_vec();
    if opts.epsilon > 0.0 {
        let (_, direction) = dominant_mode(&case.config, &case.spec).map_err(CliError::from_core)?;
        let eps = opts.epsilon * case.config.radius();
        for (z, d) in z0.iter_mut().zip(&direction) {
            *z += eps * d;
        }
    }
    let v0 = vec![0.0; z0.len()];
    let mut records = vec![TrajectoryRecord { t: 0.0, positions: z0.clone(), velocities: v0.clone(), energy: frame.jacobi_energy(&z0, &v0) }];
    let mut step = 0usize;
    let traj = frame
        .run(&z0, &v0, opts.periods * period, dt, usize::MAX, |t, z, v| {
            step += 1;
            if step % opts.stride == 0 {
                records.push(TrajectoryRecord { t, positions: z.to_vec(), velocities: v.to_vec(), energy: frame.jacobi_energy(z, v) });
            }
            true
        })
        .map_err(CliError::from_core)?;
    let header = TrajectoryHeader {
        schema: TRAJECTORY_SCHEMA.into(),
        case: case.name.clone(),
        potential: case.spec.to_string(),
        masses: case.config.masses().to_vec(),
        omega: frame.omega(),
        period,
        dt,
        epsilon: opts.epsilon,
        collision_time: traj.blow_up.map(|b| b.time),
    };
    Ok((header, records))
}

/// JSON Lines: the header, then one record per line.
pub fn to_json_lines(header: &TrajectoryHeader, records: &[TrajectoryRecord]) -> Result<String, CliError> {
    let mut out = serde_json::to_string(header)?;
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::request::AnalysisRequest;

    #[test]
    fn equilibrium_stays_put() {
        let case = AnalysisRequest::preset("triangle-homogeneous").resolve().unwrap();
        let opts = SimulationOptions { periods: 1.0, steps_per_period: 1e3, ..Default::default() };
        let (h, recs) = simulate(&case, opts).unwrap();
        assert_eq!(recs.len(), 11);
        assert!(h.collision_time.is_none());
        let drift = recs.iter().flat_map(|r| r.positions.iter().zip(&recs[0].positions).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        assert!(drift < 1e-10, "{drift}");
        let text = to_json_lines(&h, &recs).unwrap();
        assert_eq!(text.lines().count(), 12);
    }

    #[test]
    fn rejects_bad_options() {
        let case = AnalysisRequest::preset("square-homogeneous").resolve().unwrap();
        assert!(simulate(&case, SimulationOptions { stride: 0, ..Default::default() }).is_err());
        assert!(simulate(&case, SimulationOptions { epsilon: -1.0, ..Default::default() }).is_err());
    }
}
