//! Minimal grouped bar charts: one panel per distribution, one bar group
//! per source-set size, one bar per solver.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::SummaryRow;
use crate::generate::Distribution;
use crate::solver::SolverKind;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const LEGEND_W: f64 = 170.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

type Panels = BTreeMap<Distribution, BTreeMap<usize, Vec<(SolverKind, f64)>>>;

fn panels(summary: &[SummaryRow], value: impl Fn(&SummaryRow) -> f64) -> (Panels, Vec<SolverKind>) {
    let mut p: Panels = BTreeMap::new();
    let mut solvers = Vec::new();
    for row in summary {
        if !solvers.contains(&row.solver) {
            solvers.push(row.solver);
        }
        p.entry(row.distribution)
            .or_default()
            .entry(row.s_size)
            .or_default()
            .push((row.solver, value(row)));
    }
    (p, solvers)
}

pub fn relative_cost_chart(summary: &[SummaryRow]) -> String {
    let (p, solvers) = panels(summary, |r| r.mean_relative_cost);
    chart("Mean cost relative to cover_and_grow", "relative cost", &p, &solvers, false)
}

/// Mean runtime in seconds on a logarithmic axis.
pub fn runtime_chart(summary: &[SummaryRow]) -> String {
    let (p, solvers) = panels(summary, |r| r.mean_runtime_ns * 1e-9);
    chart("Mean runtime", "seconds (log scale)", &p, &solvers, true)
}

fn chart(title: &str, y_label: &str, p: &Panels, solvers: &[SolverKind], log_y: bool) -> String {
    let values: Vec<f64> = p
        .values()
        .flat_map(|g| g.values().flatten().map(|&(_, v)| v))
        .filter(|v| v.is_finite() && (!log_y || *v > 0.0))
        .collect();
    let (lo, hi) = if log_y {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min.is_finite() {
            (min.log10().floor(), max.log10().ceil().max(min.log10().floor() + 1.0))
        } else {
            (0.0, 1.0)
        }
    } else {
        let max = values.iter().copied().fold(0.0, f64::max);
        (0.0, if max > 0.0 { max * 1.1 } else { 1.0 })
    };
    let scale = |v: f64| -> f64 {
        let t = if log_y { (v.max(1e-300).log10() - lo) / (hi - lo) } else { (v - lo) / (hi - lo) };
        PANEL_H * t.clamp(0.0, 1.0)
    };

    let n_panels = p.len().max(1) as f64;
    let width = n_panels * (PANEL_W + MARGIN_L) + LEGEND_W;
    let height = PANEL_H + MARGIN_T + MARGIN_B + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" font-size="14" text-anchor="middle">{title}</text>"#, width / 2.0);

    for (k, (dist, groups)) in p.iter().enumerate() {
        let x0 = MARGIN_L + k as f64 * (PANEL_W + MARGIN_L);
        let y0 = MARGIN_T + PANEL_H;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{dist}</text>"#, x0 + PANEL_W / 2.0, MARGIN_T - 6.0);
        let _ = writeln!(s, r#"<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>"#);
        let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#, x0 + PANEL_W);
        let ticks: Vec<f64> = if log_y {
            (lo as i32..=hi as i32).map(|e| 10f64.powi(e)).collect()
        } else {
            (0..=5).map(|i| lo + (hi - lo) * i as f64 / 5.0).collect()
        };
        for t in ticks {
            let y = y0 - scale(t);
            let label = if log_y { format!("1e{}", t.log10().round()) } else { format!("{t:.2}") };
            let _ = writeln!(s, r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/>"##, x0, x0 + PANEL_W);
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#, x0 - 4.0, y + 4.0);
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{y_label}</text>"#,
            x0 - 45.0,
            MARGIN_T + PANEL_H / 2.0,
            x0 - 45.0,
            MARGIN_T + PANEL_H / 2.0
        );
        let group_w = PANEL_W / groups.len().max(1) as f64;
        let bar_w = group_w * 0.8 / solvers.len().max(1) as f64;
        for (g, (size, bars)) in groups.iter().enumerate() {
            let gx = x0 + g as f64 * group_w + group_w * 0.1;
            for &(solver, v) in bars {
                let i = solvers.iter().position(|&x| x == solver).unwrap_or(0);
                if !v.is_finite() {
                    continue;
                }
                let h = scale(v);
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{solver}: {v}</title></rect>"#,
                    gx + i as f64 * bar_w,
                    y0 - h,
                    bar_w,
                    h,
                    COLORS[i % COLORS.len()]
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">|S|={size}</text>"#,
                gx + group_w * 0.4,
                y0 + 16.0
            );
        }
    }

    let lx = n_panels * (PANEL_W + MARGIN_L) + 10.0;
    for (i, solver) in solvers.iter().enumerate() {
        let y = MARGIN_T + 18.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{lx}" y="{y}" width="12" height="12" fill="{}"/>"#, COLORS[i % COLORS.len()]);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{solver}</text>"#, lx + 18.0, y + 10.0);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(solver: SolverKind, s_size: usize, rel: f64, ns: f64) -> SummaryRow {
        SummaryRow {
            solver,
            distribution: Distribution::Uniform,
            s_size,
            runs: 1,
            failures: 0,
            mean_relative_cost: rel,
            var_relative_cost: 0.0,
            mean_runtime_ns: ns,
        }
    }

    #[test]
    fn one_bar_per_row() {
        let rows = vec![
            row(SolverKind::CoverAndGrow, 1, 1.0, 1e6),
            row(SolverKind::TCentric, 1, 1.2, 1e4),
            row(SolverKind::CoverAndGrow, 4, 1.0, 2e6),
            row(SolverKind::TCentric, 4, 0.9, 2e4),
        ];
        let svg = relative_cost_chart(&rows);
        assert_eq!(svg.matches("<title>").count(), 4);
        assert!(svg.contains("|S|=4"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn log_axis_spans_decades() {
        let rows = vec![row(SolverKind::CoverAndGrow, 1, 1.0, 1e3), row(SolverKind::TCentric, 1, 1.0, 1e7)];
        let svg = runtime_chart(&rows);
        // 1e-6 s up to 1e-2 s.
        for e in ["1e-6", "1e-4", "1e-2"] {
            assert!(svg.contains(&format!(">{e}<")), "{e}");
        }
    }
}
