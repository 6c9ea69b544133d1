use std::fmt::Write as _;

use super::net::{Link, Origin, ProofNet, VertexKind};
use crate::formula::Polarity;

/// Renders a net in Graphviz DOT. Tensor links are filled junctions,
/// par links are circled junctions, and withdrawn edges are dashed.
pub fn to_dot(net: &ProofNet, words: Option<&[String]>) -> String {
    let mut out = String::from("digraph proofnet {\n  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n");
    for (id, v) in net.vertices() {
        let mut label = match &v.kind {
            VertexKind::Atom { atom, polarity } => match polarity {
                Some(Polarity::Negative) => format!("{atom}⁻"),
                Some(Polarity::Positive) => format!("{atom}⁺"),
                None => atom.to_string(),
            },
            VertexKind::Internal => String::new(),
        };
        match v.origin {
            Some(Origin::Word(i)) => {
                let w = words.and_then(|ws| ws.get(i)).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                label = if label.is_empty() { w } else { format!("{w}: {label}") };
            }
            Some(Origin::Goal) if label.is_empty() => label = "goal".into(),
            _ => {}
        }
        if label.is_empty() {
            label = format!("v{id}");
        }
        let _ = writeln!(out, "  v{id} [shape=plaintext, label=\"{}\"];", label.replace('"', "\\\""));
    }
    for (lid, link) in net.links() {
        let l = lid.0;
        match *link {
            Link::Tensor { mode, tag, left, right, conclusion } => {
                let tag = tag.map_or("", |t| t.tag(true));
                let mode = if mode.0 == 0 { String::new() } else { mode.0.to_string() };
                let _ = writeln!(
                    out,
                    "  l{l} [shape=circle, style=filled, fillcolor=black, width=0.12, label=\"\", xlabel=\"{}{mode}\"];",
                    tag.replace('\\', "\\\\")
                );
                let _ = writeln!(out, "  v{left} -> l{l} [arrowhead=none, taillabel=\"l\"];");
                let _ = writeln!(out, "  v{right} -> l{l} [arrowhead=none, taillabel=\"r\"];");
                let _ = writeln!(out, "  l{l} -> v{conclusion} [arrowhead=none];");
            }
            Link::Par { mode, tag, premise, arrow, withdrawn } => {
                let tag = tag.map_or("", |t| t.tag(false));
                let mode = if mode.0 == 0 { String::new() } else { mode.0.to_string() };
                let _ = writeln!(
                    out,
                    "  l{l} [shape=circle, width=0.2, label=\"\", xlabel=\"{}{mode}\"];",
                    tag.replace('\\', "\\\\")
                );
                let _ = writeln!(out, "  v{premise} -> l{l} [arrowhead=none];");
                let _ = writeln!(out, "  l{l} -> v{arrow};");
                let _ = writeln!(out, "  l{l} -> v{withdrawn} [style=dashed, constraint=false, arrowhead=none];");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Lexicon;
    use crate::frame::unfold;

    #[test]
    fn renders_links() {
        let net = unfold(&Lexicon::parse(&[("x", "a/b")], "a/b").unwrap());
        let dot = to_dot(&net, Some(&["x".to_string()]));
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("style=filled"));
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("label=\"x\""), "{dot}");
    }
}
