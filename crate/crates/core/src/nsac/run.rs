use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::energy::energy;
use super::interface::extract_interface;
use super::state::{init_state, SimState};
use super::step::Stepper;
use crate::io::csv;
use crate::{Error, Profile, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub gradient: f64,
    pub potential: f64,
    pub div_max: f64,
    pub c_max: f64,
    /// Fitted radius of the main interface loop, NaN when not circular.
    pub radius: f64,
    pub cx: f64,
    pub cy: f64,
    pub mass: f64,
}

/// Phase field at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub diagnostics: Vec<DiagRow>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: SimState,
    pub config: SimConfig,
}

impl RunOutput {
    pub fn max_divergence(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.div_max).fold(0.0, f64::max)
    }

    /// `max_n E(t_n) / E(0) − 1`.
    pub fn energy_excess(&self) -> f64 {
        let e0 = self.diagnostics[0].energy;
        self.diagnostics
            .iter()
            .map(|d| d.energy / e0 - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn diagnostics_csv(&self) -> Result<String> {
        let header = [
            "step", "t", "dt", "E", "Ekin", "Egrad", "Epot", "divmax", "cmax", "radius", "cx", "cy", "mass",
        ];
        let d = &self.diagnostics;
        let col = |f: fn(&DiagRow) -> f64| d.iter().map(f).collect::<Vec<f64>>();
        let cols = [
            col(|d| d.step as f64),
            col(|d| d.t),
            col(|d| d.dt),
            col(|d| d.energy),
            col(|d| d.kinetic),
            col(|d| d.gradient),
            col(|d| d.potential),
            col(|d| d.div_max),
            col(|d| d.c_max),
            col(|d| d.radius),
            col(|d| d.cx),
            col(|d| d.cy),
            col(|d| d.mass),
        ];
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        csv::render(&header, &refs)
    }

    /// Writes `diagnostics.csv`, the final fields and, with
    /// `output.write_fields`, every kept snapshot.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<String>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut written = vec!["diagnostics.csv".to_string()];
        fs::write(dir.join("diagnostics.csv"), self.diagnostics_csv()?)?;
        write_fields(dir, "final", &self.final_state, &self.config)?;
        written.push("final.bin".into());
        written.push("final.json".into());
        if self.config.output.write_fields {
            for (k, snap) in self.snapshots.iter().enumerate() {
                let name = format!("c_{k:05}");
                let meta = FieldMeta::new(&self.final_state, &self.config, snap.t, vec!["c".into()]);
                write_binary(dir, &name, &meta, &[&snap.c])?;
                written.push(format!("{name}.bin"));
                written.push(format!("{name}.json"));
            }
        }
        Ok(written)
    }
}

fn diag_row(state: &SimState, config: &SimConfig, dt: f64, div_max: f64) -> DiagRow {
    let e = energy(state, config);
    let circle = extract_interface(&state.c, &state.grid).ok().and_then(|i| i.circle);
    DiagRow {
        step: state.step,
        t: state.t,
        dt,
        energy: e.total,
        kinetic: e.kinetic,
        gradient: e.gradient,
        potential: e.potential,
        div_max,
        c_max: state.c_max(),
        radius: circle.map_or(f64::NAN, |c| c.radius),
        cx: circle.map_or(f64::NAN, |c| c.center[0]),
        cy: circle.map_or(f64::NAN, |c| c.center[1]),
        mass: state.grid.integrate(&state.c),
    }
}

/// Steps from the initial condition to `t_end`, recording diagnostics every
/// `output.diagnostics_every` steps and `c` every `output.snapshot_every`
/// steps (plus the first and last state in both cases).
pub fn run(config: &SimConfig, profile: &Profile) -> Result<RunOutput> {
    let mut state = init_state(config, profile)?;
    run_from(config, &mut state)
}

pub fn run_from(config: &SimConfig, state: &mut SimState) -> Result<RunOutput> {
    let stepper = Stepper::new(config)?;
    let out = &config.output;
    let mut diagnostics = vec![diag_row(state, config, 0.0, state.max_divergence())];
    let keep = out.snapshot_every > 0;
    let mut snapshots = Vec::new();
    if keep {
        snapshots.push(Snapshot {
            t: state.t,
            c: state.c.clone(),
        });
    }
    let mut last_dt = 0.0;
    let mut last_div = 0.0;
    let mut recorded = true;
    while state.t < config.t_end * (1.0 - 1e-12) {
        let info = stepper.step(state)?;
        last_dt = info.dt;
        last_div = info.div_max;
        recorded = false;
        if state.step % out.diagnostics_every == 0 {
            diagnostics.push(diag_row(state, config, info.dt, info.div_max));
            recorded = true;
        }
        if keep && state.step % out.snapshot_every == 0 {
            snapshots.push(Snapshot {
                t: state.t,
                c: state.c.clone(),
            });
        }
    }
    if !recorded {
        diagnostics.push(diag_row(state, config, last_dt, last_div));
    }
    if keep && snapshots.last().is_some_and(|s| s.t < state.t) {
        snapshots.push(Snapshot {
            t: state.t,
            c: state.c.clone(),
        });
    }
    Ok(RunOutput {
        diagnostics,
        snapshots,
        final_state: state.clone(),
        config: config.clone(),
    })
}

/// JSON sidecar of a binary field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub t: f64,
    pub eps: f64,
    pub alpha: f64,
    pub origin: [f64; 2],
    /// Field names in file order; each is `nx·ny` little-endian f64, x fastest.
    pub fields: Vec<String>,
}

impl FieldMeta {
    fn new(state: &SimState, config: &SimConfig, t: f64, fields: Vec<String>) -> Self {
        let g = &state.grid;
        Self {
            nx: g.nx,
            ny: g.ny,
            h: g.h,
            t,
            eps: config.eps,
            alpha: config.alpha,
            origin: g.origin,
            fields,
        }
    }
}

fn write_binary(dir: &Path, name: &str, meta: &FieldMeta, fields: &[&[f64]]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 * fields.iter().map(|f| f.len()).sum::<usize>());
    for f in fields {
        for x in f.iter() {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    fs::write(dir.join(format!("{name}.bin")), bytes)?;
    fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}

pub fn write_fields(dir: &Path, name: &str, state: &SimState, config: &SimConfig) -> Result<()> {
    let meta = FieldMeta::new(state, config, state.t, ["c", "u", "v", "p"].map(String::from).to_vec());
    write_binary(dir, name, &meta, &[&state.c, &state.u, &state.v, &state.p])
}

/// Reads a dump written by [`RunOutput::write`]; returns the sidecar and
/// one vector per field.
pub fn read_fields(dir: impl AsRef<Path>, name: &str) -> Result<(FieldMeta, Vec<Vec<f64>>)> {
    let dir = dir.as_ref();
    let meta: FieldMeta = serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.json")))?)?;
    let bytes = fs::read(dir.join(format!("{name}.bin")))?;
    let n = meta.nx * meta.ny;
    if bytes.len() != 8 * n * meta.fields.len() {
        return Err(Error::GridMismatch {
            expected: 8 * n * meta.fields.len(),
            found: bytes.len(),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    let fields = values.chunks(n).map(|c| c.to_vec()).collect();
    Ok((meta, fields))
}
