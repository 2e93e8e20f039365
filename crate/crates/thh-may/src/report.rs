//! Machine-readable reports: a self-describing JSON document per scenario
//! run, and a CSV dimension table. Serialization is deterministic and
//! round-trips.

use crate::chart::ChartModel;
use crate::scenarios::{ScenarioResult, Verdict};
use crate::sseq::Obstruction;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub s: u32,
    pub t: u32,
    pub dim: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrokeEntry {
    pub from: [u32; 2],
    pub to: [u32; 2],
    pub r: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Renaming {
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub scenario: String,
    pub prime: u32,
    pub cutoff: u32,
    pub version: String,
    pub convention: Option<String>,
    pub resolved_max: u32,
    pub ok: bool,
    pub columns: Vec<Column>,
    pub strokes: Vec<StrokeEntry>,
    pub verdicts: Vec<Verdict>,
    pub renamings: Vec<Renaming>,
    pub obstructions: Vec<StrokeEntry>,
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn from_result(result: &ScenarioResult) -> ReportDocument {
        let (columns, strokes) = match &result.chart {
            Some(chart) => (
                chart
                    .dots
                    .iter()
                    .map(|d| Column {
                        s: d.s,
                        t: d.t,
                        dim: d.multiplicity as u64,
                    })
                    .collect(),
                chart
                    .strokes
                    .iter()
                    .map(|st| StrokeEntry {
                        from: [st.from.0, st.from.1],
                        to: [st.to.0, st.to.1],
                        r: st.r,
                    })
                    .collect(),
            ),
            None => (
                // degree dims on the t = 0 line when no bigraded chart exists
                result
                    .verdicts
                    .iter()
                    .filter(|v| v.got > 0)
                    .map(|v| Column {
                        s: v.degree,
                        t: 0,
                        dim: v.got,
                    })
                    .collect(),
                Vec::new(),
            ),
        };
        ReportDocument {
            scenario: result.scenario.as_str().to_string(),
            prime: result.prime,
            cutoff: result.cutoff,
            version: ARTIFACT_VERSION.to_string(),
            convention: result.convention.map(|c| format!("{c:?}")),
            resolved_max: result.resolved_max,
            ok: result.ok,
            columns,
            strokes,
            verdicts: result.verdicts.clone(),
            renamings: result
                .renamings
                .iter()
                .map(|(from, to)| Renaming {
                    from: from.clone(),
                    to: to.clone(),
                })
                .collect(),
            obstructions: result
                .obstructions
                .iter()
                .map(|ob: &Obstruction| StrokeEntry {
                    from: [ob.from.0, ob.from.1],
                    to: [ob.to.0, ob.to.1],
                    r: ob.r,
                })
                .collect(),
            notes: result.notes.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ReportDocument, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The per-degree dimension table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,computed,target,ok\n");
        for v in &self.verdicts {
            let _ = writeln!(out, "{},{},{},{}", v.degree, v.got, v.expected, v.ok);
        }
        out
    }

    /// The chart encoded by the columns/strokes of this report.
    pub fn chart(&self) -> ChartModel {
        use crate::chart::{Dot, Stroke};
        let dots: Vec<Dot> = self
            .columns
            .iter()
            .map(|c| Dot {
                s: c.s,
                t: c.t,
                label: String::new(),
                multiplicity: c.dim as u32,
            })
            .collect();
        let strokes = self
            .strokes
            .iter()
            .map(|s| Stroke {
                from: (s.from[0], s.from[1]),
                to: (s.to[0], s.to[1]),
                r: s.r,
            })
            .collect();
        let s_max = dots.iter().map(|d| d.s).max().unwrap_or(0);
        let t_max = dots.iter().map(|d| d.t).max().unwrap_or(0);
        ChartModel {
            dots,
            strokes,
            window: (s_max, t_max),
        }
    }
}
