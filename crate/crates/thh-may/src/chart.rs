//! Chart models for spectral-sequence pages, with ASCII and SVG renderers.
//!
//! A chart is a set of dots at (s, t) with multiplicities and labels, plus
//! differential strokes. Rendering is deterministic byte for byte: all
//! geometry is integral and iteration order is fixed.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dot {
    pub s: u32,
    pub t: u32,
    pub label: String,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stroke {
    pub from: (u32, u32),
    pub to: (u32, u32),
    pub r: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartModel {
    pub dots: Vec<Dot>,
    pub strokes: Vec<Stroke>,
    /// Inclusive display window (s_max, t_max).
    pub window: (u32, u32),
}

impl ChartModel {
    /// Total multiplicity in column s.
    pub fn column_multiplicity(&self, s: u32) -> u32 {
        self.dots
            .iter()
            .filter(|d| d.s == s)
            .map(|d| d.multiplicity)
            .sum()
    }

    pub fn validate(&self) -> Result<(), String> {
        for st in &self.strokes {
            let has = |pos: (u32, u32)| self.dots.iter().any(|d| (d.s, d.t) == pos);
            if !has(st.from) || !has(st.to) {
                return Err(format!(
                    "stroke ({},{}) -> ({},{}) does not connect existing dots",
                    st.from.0, st.from.1, st.to.0, st.to.1
                ));
            }
        }
        Ok(())
    }
}

/// One character cell per (s, t); multiplicities above one render as the
/// digit, ten or more as '+'. Strokes are listed under the grid. Wide
/// windows wrap into bands of `wrap` columns.
pub fn render_ascii(chart: &ChartModel) -> String {
    let (s_max, t_max) = chart.window;
    let wrap = 100usize;
    let mut grid = vec![vec![b' '; s_max as usize + 1]; t_max as usize + 1];
    for d in &chart.dots {
        let ch = match d.multiplicity {
            0 => b' ',
            1 => b'*',
            m @ 2..=9 => b'0' + m as u8,
            _ => b'+',
        };
        grid[d.t as usize][d.s as usize] = ch;
    }
    let mut out = String::new();
    let mut band_start = 0usize;
    while band_start <= s_max as usize {
        let band_end = (band_start + wrap - 1).min(s_max as usize);
        for t in (0..=t_max as usize).rev() {
            let _ = write!(out, "{:>3} |", t);
            for s in band_start..=band_end {
                out.push(grid[t][s] as char);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "    +{}", "-".repeat(band_end - band_start + 1));
        let _ = write!(out, "     ");
        for s in band_start..=band_end {
            if s % 4 == 0 {
                let label = s.to_string();
                out.push_str(&label);
                for _ in 0..(4usize.saturating_sub(label.len())) {
                    if s < band_end {
                        out.push(' ');
                    }
                }
            }
        }
        out.push('\n');
        band_start = band_end + 1;
    }
    if !chart.strokes.is_empty() {
        out.push('\n');
        for st in &chart.strokes {
            let _ = writeln!(
                out,
                "d_{}: ({},{}) -> ({},{})",
                st.r, st.from.0, st.from.1, st.to.0, st.to.1
            );
        }
    }
    out
}

/// SVG 1.1 document: dots as circles at integrally mapped coordinates,
/// strokes as line segments. Identical inputs give identical bytes.
pub fn render_svg(chart: &ChartModel) -> String {
    let (s_max, t_max) = chart.window;
    let unit = 16u32;
    let margin = 24u32;
    let width = margin * 2 + unit * (s_max + 1);
    let height = margin * 2 + unit * (t_max + 1);
    let x = |s: u32| margin + unit / 2 + s * unit;
    let y = |t: u32| height - margin - unit / 2 - t * unit;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        r#"  <rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#
    );
    // axes
    let _ = writeln!(
        out,
        r#"  <line x1="{m}" y1="{h}" x2="{w}" y2="{h}" stroke="black" stroke-width="1"/>"#,
        m = margin,
        h = height - margin,
        w = width - margin
    );
    let _ = writeln!(
        out,
        r#"  <line x1="{m}" y1="{h}" x2="{m}" y2="{t}" stroke="black" stroke-width="1"/>"#,
        m = margin,
        h = height - margin,
        t = margin
    );
    for s in (0..=s_max).step_by(4) {
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-size="8" text-anchor="middle">{}</text>"#,
            x(s),
            height - margin + 10,
            s
        );
    }
    for t in (0..=t_max).step_by(2) {
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-size="8" text-anchor="end">{}</text>"#,
            margin - 4,
            y(t) + 3,
            t
        );
    }
    for st in &chart.strokes {
        let _ = writeln!(
            out,
            r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" stroke-width="1"/>"#,
            x(st.from.0),
            y(st.from.1),
            x(st.to.0),
            y(st.to.1)
        );
    }
    for d in &chart.dots {
        let _ = writeln!(
            out,
            r#"  <circle cx="{}" cy="{}" r="3" fill="black"><title>{}</title></circle>"#,
            x(d.s),
            y(d.t),
            xml_escape(&d.label)
        );
        if d.multiplicity > 1 {
            let _ = writeln!(
                out,
                r#"  <text x="{}" y="{}" font-size="8" text-anchor="start">{}</text>"#,
                x(d.s) + 4,
                y(d.t) - 4,
                d.multiplicity
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
