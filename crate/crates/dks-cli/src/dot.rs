use dks::{KripkeGraph, TokenUniverse};

/// Graphviz DOT rendering of the extension graph. Node order follows the
/// canonical state order, so output is stable. Stable states, the ones whose
/// only extension is themselves, get a double border.
pub fn render(graph: &KripkeGraph, universe: &TokenUniverse) -> String {
    let mut out = String::from("digraph kripke {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    for (i, state) in graph.states.iter().enumerate() {
        let label = escape(&universe.render_set(state));
        if graph.stable[i] {
            out.push_str(&format!("  s{i} [label=\"{label}\", peripheries=2];\n"));
        } else {
            out.push_str(&format!("  s{i} [label=\"{label}\"];\n"));
        }
    }
    for (i, targets) in graph.edges.iter().enumerate() {
        for t in targets {
            out.push_str(&format!("  s{i} -> s{t};\n"));
        }
    }
    out.push_str("}\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}
