//! Result serialization: trajectory/event/metric CSV tables and static SVG
//! frequency plots.
//!
//! All writers are pure string builders so they can be golden-tested
//! byte-for-byte; file I/O lives with the orchestration layer. Floats are
//! rendered with the shortest round-trip representation, which is a pure
//! function of the value, so identical runs serialize identically.

use std::fmt::Write as _;

use crate::net::Network;
use crate::solver::{ChatterBus, DwellBus, Trajectory};
use crate::analysis::OvershootBus;

/// Canonical float rendering: shortest string that parses back exactly,
/// with negative zero normalized away.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

/// Per-sample table. Columns: time, jump counter, one frequency column per
/// bus, one angle column per line, controllable demand and discrete state
/// per bus, and optionally the monitored energy value.
pub fn trajectory_csv(network: &Network, traj: &Trajectory, energy: Option<&[f64]>) -> String {
    if let Some(e) = energy {
        assert_eq!(
            e.len(),
            traj.samples.len(),
            "energy column length must match sample count"
        );
    }
    let mut out = String::new();
    out.push_str("t,ell");
    for b in &network.buses {
        let _ = write!(out, ",omega_{}", b.id);
    }
    for l in &network.lines {
        let _ = write!(
            out,
            ",eta_{}_{}",
            network.buses[l.from].id, network.buses[l.to].id
        );
    }
    for b in &network.buses {
        let _ = write!(out, ",d_c_{}", b.id);
    }
    for b in &network.buses {
        let _ = write!(out, ",sigma_{}", b.id);
    }
    if energy.is_some() {
        out.push_str(",V");
    }
    out.push('\n');

    for (k, s) in traj.samples.iter().enumerate() {
        let _ = write!(out, "{},{}", fmt_f64(s.t), s.ell);
        for &w in &s.state.omega {
            let _ = write!(out, ",{}", fmt_f64(w));
        }
        for &e in &s.state.eta {
            let _ = write!(out, ",{}", fmt_f64(e));
        }
        for &d in &s.demand {
            let _ = write!(out, ",{}", fmt_f64(d));
        }
        for &sg in &s.sigma {
            let _ = write!(out, ",{sg}");
        }
        if let Some(e) = energy {
            let _ = write!(out, ",{}", fmt_f64(e[k]));
        }
        out.push('\n');
    }
    out
}

/// Event log. Columns: time, jump counter after the event, external bus id,
/// event kind.
pub fn events_csv(network: &Network, traj: &Trajectory) -> String {
    let mut out = String::from("t,ell,bus,kind\n");
    for e in &traj.events {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(e.t),
            e.ell,
            network.buses[e.bus].id,
            e.kind.as_str()
        );
    }
    out
}

/// Long-form metrics table: one row per (metric, bus) pair. Buses are
/// external ids; network-wide rows leave the bus column empty.
#[derive(Debug, Default, Clone)]
pub struct MetricsTable {
    rows: Vec<(String, String, String)>,
}

impl MetricsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, metric: &str, bus: Option<u32>, value: String) {
        let bus = bus.map(|b| b.to_string()).unwrap_or_default();
        self.rows.push((metric.to_string(), bus, value));
    }

    pub fn push_f64(&mut self, metric: &str, bus: Option<u32>, value: f64) {
        self.push(metric, bus, fmt_f64(value));
    }

    pub fn add_overshoot(&mut self, network: &Network, rows: &[OvershootBus]) {
        for r in rows {
            let id = network.buses[r.bus].id;
            self.push_f64("peak_abs_omega", Some(id), r.peak_abs_omega);
            if let Some(t) = r.settling_time {
                self.push_f64("settling_time", Some(id), t);
            }
            if let Some(t) = r.last_switch_off {
                self.push_f64("last_switch_off", Some(id), t);
            }
        }
    }

    pub fn add_dwell(&mut self, network: &Network, rows: &[DwellBus]) {
        for r in rows {
            let id = network.buses[r.bus].id;
            self.push_f64("min_dwell_gap", Some(id), r.min_gap);
            self.push_f64("dwell_bound", Some(id), r.analytic_bound);
            self.push("switch_count", Some(id), r.switch_count.to_string());
        }
    }

    pub fn add_chatter(&mut self, network: &Network, rows: &[ChatterBus]) {
        for r in rows {
            let id = network.buses[r.bus].id;
            self.push("chattering", Some(id), (r.flagged as u8).to_string());
            self.push(
                "sliding_intervals",
                Some(id),
                r.sliding_intervals.to_string(),
            );
            self.push(
                "max_switches_in_window",
                Some(id),
                r.max_switches_in_window.to_string(),
            );
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,bus,value\n");
        for (m, b, v) in &self.rows {
            let _ = writeln!(out, "{m},{b},{v}");
        }
        out
    }
}

const SVG_W: f64 = 900.0;
const SVG_H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
    "#7f7f7f",
];

/// Static plot of every bus frequency trace against time, one polyline per
/// bus, with a zero axis and min/max tick labels.
pub fn omega_svg(network: &Network, traj: &Trajectory, title: &str) -> String {
    let n = network.n_buses();
    let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut w_min, mut w_max) = (0.0_f64, 0.0_f64);
    for s in &traj.samples {
        t_min = t_min.min(s.t);
        t_max = t_max.max(s.t);
        for &w in &s.state.omega {
            w_min = w_min.min(w);
            w_max = w_max.max(w);
        }
    }
    if !t_min.is_finite() {
        t_min = 0.0;
        t_max = 1.0;
    }
    if t_max - t_min < 1e-12 {
        t_max = t_min + 1.0;
    }
    let pad = 0.05 * (w_max - w_min).max(1e-9);
    w_min -= pad;
    w_max += pad;

    let px = |t: f64| MARGIN_L + (t - t_min) / (t_max - t_min) * (SVG_W - MARGIN_L - MARGIN_R);
    let py = |w: f64| MARGIN_T + (w_max - w) / (w_max - w_min) * (SVG_H - MARGIN_T - MARGIN_B);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        (MARGIN_L + SVG_W - MARGIN_R) / 2.0,
        title
    );
    // frame and zero line
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#333\"/>",
        SVG_W - MARGIN_L - MARGIN_R,
        SVG_H - MARGIN_T - MARGIN_B
    );
    if w_min < 0.0 && w_max > 0.0 {
        let y0 = py(0.0);
        let _ = writeln!(
            out,
            "<line x1=\"{MARGIN_L}\" y1=\"{y0:.2}\" x2=\"{:.1}\" y2=\"{y0:.2}\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>",
            SVG_W - MARGIN_R
        );
    }
    // axis labels
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">t (s)</text>",
        (MARGIN_L + SVG_W - MARGIN_R) / 2.0,
        SVG_H - 12.0
    );
    for (t, anchor) in [(t_min, "start"), (t_max, "end")] {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{:.3}</text>",
            px(t),
            SVG_H - MARGIN_B + 16.0,
            t
        );
    }
    for w in [w_min, w_max] {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.4}</text>",
            MARGIN_L - 6.0,
            py(w) + 4.0,
            w
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {:.1})\" text-anchor=\"middle\">omega (rad/s)</text>",
        (MARGIN_T + SVG_H - MARGIN_B) / 2.0,
        (MARGIN_T + SVG_H - MARGIN_B) / 2.0
    );

    for bus in 0..n {
        let color = PALETTE[bus % PALETTE.len()];
        let mut points = String::new();
        for s in &traj.samples {
            let _ = write!(points, "{:.2},{:.2} ", px(s.t), py(s.state.omega[bus]));
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>",
            points.trim_end()
        );
        // legend entry
        let ly = MARGIN_T + 14.0 * (bus as f64 + 1.0);
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            SVG_W - MARGIN_R - 90.0,
            SVG_W - MARGIN_R - 70.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">bus {}</text>",
            SVG_W - MARGIN_R - 64.0,
            ly + 4.0,
            network.buses[bus].id
        );
    }
    out.push_str("</svg>\n");
    out
}
