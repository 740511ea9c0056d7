//! DOT rendering of Hasse diagrams.

use std::collections::BTreeMap;

use crate::lattice::FiniteLattice;

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A deterministic DOT digraph of the cover relation, edges pointing from
/// lower to upper element. Nodes are labeled `name` or `name : annotation`.
pub fn render_hasse(
    lattice: &FiniteLattice,
    annotations: Option<&BTreeMap<String, String>>,
) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir = BT;\n");
    for i in 0..lattice.len() {
        let name = lattice.element(i);
        let label = match annotations.and_then(|a| a.get(name)) {
            Some(note) => format!("{name} : {note}"),
            None => name.to_string(),
        };
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\"];\n",
            escape(name),
            escape(&label)
        ));
    }
    for &(lo, hi) in lattice.covers() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            escape(lattice.element(lo)),
            escape(lattice.element(hi))
        ));
    }
    out.push_str("}\n");
    out
}
