//! Graphviz output for a single diagram.
//!
//! Roots are double circles, free vertices circles, satellites boxes.
//! Free successors hang from their predecessor on a smooth edge. A
//! satellite continues the segment of vertices proximate to the same
//! vertex, drawn as a straight bold edge. The second proximity of a
//! satellite is a dotted edge that does not constrain the layout.

use std::fmt::Write as _;

use crate::diagram::{OrderedDiagram, VertexClass};

/// One-line text form, e.g. `1 2<1 3<2,1`.
pub fn compact_label(d: &OrderedDiagram) -> String {
    (1..=d.r())
        .map(|i| match (d.pred(i), d.second(i)) {
            (None, _) => i.to_string(),
            (Some(p), None) => format!("{i}<{p}"),
            (Some(p), Some(s)) => format!("{i}<{p},{s}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// First vertex of the straight segment containing satellite `j`: walking
/// back through predecessors while they are still proximate to the same
/// vertex `second(j)`.
fn segment_start(d: &OrderedDiagram, j: usize) -> usize {
    let target = d.second(j).expect("satellite");
    let mut first = j;
    while let Some(p) = d.pred(first) {
        if p == target || !d.is_proximate(p, target) {
            break;
        }
        first = p;
    }
    first
}

pub fn to_dot(d: &OrderedDiagram) -> String {
    let mut out = String::new();
    out.push_str("digraph enriques {\n");
    out.push_str("  node [fontname=\"monospace\"];\n");
    writeln!(out, "  label=\"{}\";", compact_label(d)).unwrap();
    for i in 1..=d.r() {
        let shape = match d.class(i) {
            VertexClass::Root => "doublecircle",
            VertexClass::Free => "circle",
            VertexClass::Satellite => "box",
        };
        writeln!(out, "  v{i} [label=\"{i}\", shape={shape}];").unwrap();
    }
    for j in 1..=d.r() {
        let Some(p) = d.pred(j) else { continue };
        match d.second(j) {
            None => writeln!(
                out,
                "  v{p} -> v{j} [kind=free, style=solid, splines=curved];"
            )
            .unwrap(),
            Some(s) => {
                let first = segment_start(d, j);
                writeln!(
                    out,
                    "  v{p} -> v{j} [kind=satellite, style=bold, arrowhead=none, segment=\"{s}:{first}\"];"
                )
                .unwrap();
                writeln!(
                    out,
                    "  v{j} -> v{s} [kind=proximity, style=dotted, constraint=false];"
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_dot() {
        let dot = to_dot(&OrderedDiagram::cusp());
        assert!(dot.contains("v1 [label=\"1\", shape=doublecircle];"));
        assert!(dot.contains("v3 [label=\"3\", shape=box];"));
        assert!(dot.contains("v1 -> v2 [kind=free"));
        assert!(dot.contains("v2 -> v3 [kind=satellite"));
        assert!(dot.contains("v3 -> v1 [kind=proximity, style=dotted"));
        assert_eq!(compact_label(&OrderedDiagram::cusp()), "1 2<1 3<2,1");
    }

    #[test]
    fn satellite_segment_runs_back() {
        // 2, 3, 4 are all proximate to 1, so the segment starts at its free successor
        let d = OrderedDiagram::new(
            vec![None, Some(1), Some(2), Some(3)],
            vec![None, None, Some(1), Some(1)],
        )
        .unwrap();
        assert_eq!(segment_start(&d, 4), 2);
        assert_eq!(segment_start(&d, 3), 2);
    }
}
