use std::io::{self, Write};

use serde::Serialize;

use crate::observables::{bloch_to_density_unchecked, ConservationReport};
use crate::weinorman::WeiNormanParams;

use super::Format;

/// Shortest round-trip representation, scientific outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let x = x + 0.0;
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub const TRAJECTORY_HEADER: &str = "t,G1,G2,G3,rho00,rho11,re01,im01";

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    #[serde(rename = "G1")]
    g1: f64,
    #[serde(rename = "G2")]
    g2: f64,
    #[serde(rename = "G3")]
    g3: f64,
    rho00: f64,
    rho11: f64,
    re01: f64,
    im01: f64,
}

fn json<W: Write + ?Sized, S: Serialize>(w: &mut W, value: &S) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::other)?;
    writeln!(w)
}

pub fn write_trajectory(
    w: &mut dyn Write,
    format: Format,
    traj: &[(f64, crate::state::CoherenceVector<f64>)],
) -> io::Result<()> {
    let rows: Vec<TrajectoryRow> = traj
        .iter()
        .map(|(t, g)| {
            let rho = bloch_to_density_unchecked(g);
            TrajectoryRow {
                t: *t,
                g1: g.g1,
                g2: g.g2,
                g3: g.g3,
                rho00: rho.rho00,
                rho11: rho.rho11,
                re01: rho.rho01.re,
                im01: rho.rho01.im,
            }
        })
        .collect();
    match format {
        Format::Json => json(w, &rows),
        Format::Csv => {
            writeln!(w, "{TRAJECTORY_HEADER}")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    num(r.t),
                    num(r.g1),
                    num(r.g2),
                    num(r.g3),
                    num(r.rho00),
                    num(r.rho11),
                    num(r.re01),
                    num(r.im01)
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareEntry {
    pub method: &'static str,
    pub max_deviation: f64,
    pub endpoint_deviation: f64,
}

#[derive(Serialize)]
struct CompareReport<'a> {
    detuning_ratio: f64,
    magnus_grid: usize,
    methods: &'a [CompareEntry],
}

pub fn write_compare(
    w: &mut dyn Write,
    format: Format,
    detuning_ratio: f64,
    magnus_grid: usize,
    entries: &[CompareEntry],
) -> io::Result<()> {
    match format {
        Format::Json => json(
            w,
            &CompareReport {
                detuning_ratio,
                magnus_grid,
                methods: entries,
            },
        ),
        Format::Csv => {
            writeln!(w, "method,max_deviation,endpoint_deviation")?;
            for e in entries {
                writeln!(
                    w,
                    "{},{},{}",
                    e.method,
                    num(e.max_deviation),
                    num(e.endpoint_deviation)
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ConservationRow {
    t: f64,
    #[serde(rename = "F1")]
    f1: f64,
    #[serde(rename = "F2")]
    f2: f64,
    #[serde(rename = "F3")]
    f3: f64,
    c1: f64,
    c23: f64,
    total: f64,
}

#[derive(Serialize)]
struct ConservationOut<'a> {
    drift_c1: f64,
    drift_c23: f64,
    drift_total: f64,
    samples: &'a [ConservationRow],
}

pub fn write_conservation(
    w: &mut dyn Write,
    format: Format,
    frame: &[(f64, crate::state::CoherenceVector<f64>)],
    report: &ConservationReport<f64>,
) -> io::Result<()> {
    let rows: Vec<ConservationRow> = frame
        .iter()
        .zip(&report.samples)
        .map(|((t, f), s)| ConservationRow {
            t: *t,
            f1: f.g1,
            f2: f.g2,
            f3: f.g3,
            c1: s.c1,
            c23: s.c23,
            total: s.total,
        })
        .collect();
    match format {
        Format::Json => json(
            w,
            &ConservationOut {
                drift_c1: report.drift_c1,
                drift_c23: report.drift_c23,
                drift_total: report.drift_total,
                samples: &rows,
            },
        ),
        Format::Csv => {
            writeln!(w, "t,F1,F2,F3,c1,c23,total")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    num(r.t),
                    num(r.f1),
                    num(r.f2),
                    num(r.f3),
                    num(r.c1),
                    num(r.c23),
                    num(r.total)
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct WeiNormanRow {
    t: f64,
    #[serde(rename = "Y1")]
    y1: f64,
    #[serde(rename = "Y2")]
    y2: f64,
    #[serde(rename = "Y3")]
    y3: f64,
    residual: f64,
}

pub fn write_weinorman(
    w: &mut dyn Write,
    format: Format,
    rows: &[(f64, WeiNormanParams<f64>, f64)],
) -> io::Result<()> {
    let rows: Vec<WeiNormanRow> = rows
        .iter()
        .map(|(t, y, r)| WeiNormanRow {
            t: *t,
            y1: y.y1,
            y2: y.y2,
            y3: y.y3,
            residual: *r,
        })
        .collect();
    match format {
        Format::Json => json(w, &rows),
        Format::Csv => {
            writeln!(w, "t,Y1,Y2,Y3,residual")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    num(r.t),
                    num(r.y1),
                    num(r.y2),
                    num(r.y3),
                    num(r.residual)
                )?;
            }
            Ok(())
        }
    }
}
