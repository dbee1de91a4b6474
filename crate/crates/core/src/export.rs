//! Artifact emission: CSV, DOT, SVG, and rounded JSON.
//!
//! Every float is printed with 12 significant digits so that repeated runs
//! diff byte-for-byte. Nothing here embeds timestamps or hostnames.

use serde::Serialize;
use serde_json::Value;

use crate::chains::{ChainGraph, ChainSetResult, SweepReport};
use crate::graph::{CommClass, DirectedGraph};
use crate::hybrid::TrajectorySample;

/// Formats with 12 significant digits in scientific notation.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rounds to 12 significant digits (the value `fmt_sig` prints).
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().expect("round-trip of finite float")
    } else {
        x
    }
}

/// Rounds every non-integer number in a JSON tree to 12 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if !n.is_i64() && !n.is_u64() {
                if let Some(f) = n.as_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serializes to pretty JSON with floats rounded to 12 significant digits
/// and a trailing newline.
pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable report");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("JSON tree renders");
    s.push('\n');
    s
}

/// CSV of trajectory samples: `t,x,vertex`.
pub fn trajectory_csv(samples: &[TrajectorySample]) -> String {
    let mut out = String::from("t,x,vertex\n");
    for s in samples {
        out.push_str(&format!("{},{},{}\n", fmt_sig(s.t), fmt_sig(s.x), s.vertex));
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// DOT rendering of a graph with one cluster per communicating class.
pub fn graph_dot(g: &DirectedGraph, classes: &[CommClass]) -> String {
    let mut out = String::from("digraph system {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (i, class) in classes.iter().enumerate() {
        let kind = if class.is_invariant() {
            "invariant"
        } else {
            "variant"
        };
        out.push_str(&format!(
            "  subgraph cluster_{i} {{\n    label=\"class {i} ({kind})\";\n"
        ));
        for &v in &class.members {
            out.push_str(&format!("    v{v};\n"));
        }
        out.push_str("  }\n");
    }
    let classed: Vec<usize> = classes.iter().flat_map(|c| c.members.clone()).collect();
    for v in 0..g.n_vertices() {
        if !classed.contains(&v) {
            out.push_str(&format!("  v{v};\n"));
        }
    }
    for (a, b) in g.edges() {
        out.push_str(&format!("  v{a} -> v{b};\n"));
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of a hop graph with one cluster per recurrent component.
/// Transient nodes are omitted; hop edges between drawn nodes are kept.
pub fn chain_dot(cg: &ChainGraph, sets: &ChainSetResult) -> String {
    let mut out = String::from("digraph chains {\n  node [shape=box];\n");
    let mut drawn = vec![false; cg.n_nodes()];
    for (i, comp) in sets.components.iter().enumerate() {
        out.push_str(&format!(
            "  subgraph cluster_{i} {{\n    label=\"component {i}\";\n"
        ));
        for &n in &comp.nodes {
            drawn[n] = true;
            out.push_str(&format!(
                "    n{n} [label=\"{n}: {}\"];\n",
                fmt_sig(cg.grid()[n])
            ));
        }
        out.push_str("  }\n");
    }
    for e in cg.edges() {
        if drawn[e.from] && drawn[e.to] {
            out.push_str(&format!("  n{} -> n{};\n", e.from, e.to));
        }
    }
    out.push_str("}\n");
    out
}

/// CSV of recurrent components: `component,node,x,witness_node,witness_signal`.
pub fn components_csv(cg: &ChainGraph, sets: &ChainSetResult) -> String {
    let mut out = String::from("component,node,x,witness_node,witness_signal\n");
    for (i, comp) in sets.components.iter().enumerate() {
        let (wn, ws) = match comp.witness {
            Some(w) => (w.node.to_string(), w.signal.to_string()),
            None => (String::new(), String::new()),
        };
        for &n in &comp.nodes {
            out.push_str(&format!("{i},{n},{},{wn},{ws}\n", fmt_sig(cg.grid()[n])));
        }
    }
    out
}

/// CSV of a perturbation sweep: one row per (level, component).
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out =
        String::from("rho,component,n_nodes,min_x,max_x,matched,hausdorff\n");
    for level in &report.levels {
        for (i, states) in level.component_states.iter().enumerate() {
            let min = states.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = states.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let matched = level.matched[i]
                .map(|m| m.to_string())
                .unwrap_or_default();
            let hausdorff = level.hausdorff[i].map(fmt_sig).unwrap_or_default();
            out.push_str(&format!(
                "{},{i},{},{},{},{matched},{hausdorff}\n",
                fmt_sig(level.rho),
                states.len(),
                fmt_sig(min),
                fmt_sig(max),
            ));
        }
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Hand-rolled SVG line plot of trajectories (state over time).
///
/// `guides` draws dashed horizontal lines at the given states. The output
/// contains no timestamps; identical inputs give identical bytes.
pub fn svg_trajectories(
    title: &str,
    series: &[(String, Vec<TrajectorySample>)],
    guides: &[f64],
) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;

    let mut t_lo = f64::INFINITY;
    let mut t_hi = f64::NEG_INFINITY;
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    for (_, samples) in series {
        for s in samples {
            t_lo = t_lo.min(s.t);
            t_hi = t_hi.max(s.t);
            x_lo = x_lo.min(s.x);
            x_hi = x_hi.max(s.x);
        }
    }
    for &g in guides {
        x_lo = x_lo.min(g);
        x_hi = x_hi.max(g);
    }
    if !t_lo.is_finite() || !t_hi.is_finite() {
        t_lo = 0.0;
        t_hi = 1.0;
    } else if t_hi <= t_lo {
        t_hi = t_lo + 1.0;
    }
    if !x_lo.is_finite() || !x_hi.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
    } else if x_hi <= x_lo {
        x_hi = x_lo + 1.0;
    }
    let pad = 0.05 * (x_hi - x_lo);
    x_lo -= pad;
    x_hi += pad;

    let px = |t: f64| M + (t - t_lo) / (t_hi - t_lo) * (W - 2.0 * M);
    let py = |x: f64| H - M - (x - x_lo) / (x_hi - x_lo) * (H - 2.0 * M);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\"/>\n\
         <text x=\"{M}\" y=\"30\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        W - 2.0 * M,
        H - 2.0 * M,
        xml_escape(title)
    );
    for &g in guides {
        out.push_str(&format!(
            "<line x1=\"{M}\" y1=\"{0:.2}\" x2=\"{1}\" y2=\"{0:.2}\" stroke=\"#aaaaaa\" \
             stroke-dasharray=\"6 4\"/>\n\
             <text x=\"{2}\" y=\"{3:.2}\" font-family=\"monospace\" font-size=\"10\" \
             fill=\"#555555\">{4}</text>\n",
            py(g),
            W - M,
            W - M + 4.0,
            py(g) + 3.0,
            format!("{g:.3}"),
        ));
    }
    for (i, (label, samples)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for s in samples {
            points.push_str(&format!("{:.2},{:.2} ", px(s.t), py(s.x)));
        }
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" \
             points=\"{}\"/>\n",
            points.trim_end()
        ));
        if series.len() <= PALETTE.len() {
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"10\" \
                 fill=\"{color}\">{}</text>\n",
                M + 6.0,
                M + 14.0 + 12.0 * i as f64,
                xml_escape(label)
            ));
        }
    }
    out.push_str(&format!(
        "<text x=\"{M}\" y=\"{0}\" font-family=\"monospace\" font-size=\"10\">t in [{1}, {2}], \
         x in [{3}, {4}]</text>\n</svg>\n",
        H - M + 24.0,
        fmt_sig(t_lo),
        fmt_sig(t_hi),
        fmt_sig(x_lo),
        fmt_sig(x_hi),
    ));
    out
}
