//! CSV files for trajectories and ε-sweeps.
//!
//! Floats are written with 17 significant digits so that every value reads
//! back to the identical double.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::analysis::{relative_phase, SweepRow, SweepTable};
use crate::error::{Error, Result};
use crate::levelsys::Model;
use crate::propagator::Trajectory;

pub const TRAJECTORY_COLUMNS: [&str; 19] = [
    "zeta", "om1_re", "om1_im", "om2_re", "om2_im", "e1_re", "e1_im", "e2_re", "e2_im", "I_om1", "I_om2", "I_e1", "I_e2",
    "phi", "c1", "c2", "c3", "c4", "lambda0",
];

pub const SWEEP_COLUMNS: [&str; 8] =
    ["epsilon", "model", "phase_terms", "L_measured", "e_measured", "L_analytic", "e_analytic", "validity_flag"];

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// One trajectory CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub zeta: f64,
    pub om1_re: f64,
    pub om1_im: f64,
    pub om2_re: f64,
    pub om2_im: f64,
    pub e1_re: f64,
    pub e1_im: f64,
    pub e2_re: f64,
    pub e2_im: f64,
    #[serde(rename = "I_om1")]
    pub i_om1: f64,
    #[serde(rename = "I_om2")]
    pub i_om2: f64,
    #[serde(rename = "I_e1")]
    pub i_e1: f64,
    #[serde(rename = "I_e2")]
    pub i_e2: f64,
    /// NaN where the relative phase is undefined.
    pub phi: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub lambda0: f64,
}

impl TrajectoryRecord {
    fn values(&self) -> [f64; 19] {
        [
            self.zeta, self.om1_re, self.om1_im, self.om2_re, self.om2_im, self.e1_re, self.e1_im, self.e2_re, self.e2_im,
            self.i_om1, self.i_om2, self.i_e1, self.i_e2, self.phi, self.c1, self.c2, self.c3, self.c4, self.lambda0,
        ]
    }
}

pub fn trajectory_records(traj: &Trajectory) -> Vec<TrajectoryRecord> {
    traj.samples
        .iter()
        .map(|s| {
            let st = &s.state;
            let [i_om1, i_om2, i_e1, i_e2] = st.intensities();
            let c = &s.invariants;
            TrajectoryRecord {
                zeta: s.zeta,
                om1_re: st.omega1.re,
                om1_im: st.omega1.im,
                om2_re: st.omega2.re,
                om2_im: st.omega2.im,
                e1_re: st.e1.re,
                e1_im: st.e1.im,
                e2_re: st.e2.re,
                e2_im: st.e2.im,
                i_om1,
                i_om2,
                i_e1,
                i_e2,
                phi: relative_phase(st).unwrap_or(f64::NAN),
                c1: c.c1,
                c2: c.c2,
                c3: c.c3,
                c4: c.c4,
                lambda0: s.lambda0,
            }
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_COLUMNS).map_err(io_err)?;
    for rec in trajectory_records(traj) {
        w.write_record(rec.values().map(format_float)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(io_err)?;
    if headers.iter().ne(TRAJECTORY_COLUMNS) {
        return Err(Error::Io(format!("unexpected trajectory header: {headers:?}")));
    }
    r.deserialize().map(|rec| rec.map_err(io_err)).collect()
}

pub fn write_sweep_csv<W: Write>(table: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(io_err)?;
    for row in &table.rows {
        w.write_record([
            format_float(row.epsilon),
            row.model.label().to_string(),
            row.phase_terms.to_string(),
            format_float(row.l_measured),
            format_float(row.e_measured),
            format_float(row.l_analytic),
            format_float(row.e_analytic),
            row.validity_flag.clone(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Deserialize)]
struct SweepRecord {
    epsilon: f64,
    model: Model,
    phase_terms: bool,
    #[serde(rename = "L_measured")]
    l_measured: f64,
    e_measured: f64,
    #[serde(rename = "L_analytic")]
    l_analytic: f64,
    e_analytic: f64,
    validity_flag: String,
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<SweepTable> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(io_err)?;
    if headers.iter().ne(SWEEP_COLUMNS) {
        return Err(Error::Io(format!("unexpected sweep header: {headers:?}")));
    }
    let rows = r
        .deserialize::<SweepRecord>()
        .map(|rec| {
            rec.map_err(io_err).map(|s| SweepRow {
                epsilon: s.epsilon,
                model: s.model,
                phase_terms: s.phase_terms,
                l_measured: s.l_measured,
                e_measured: s.e_measured,
                l_analytic: s.l_analytic,
                e_analytic: s.e_analytic,
                validity_flag: s.validity_flag,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}
