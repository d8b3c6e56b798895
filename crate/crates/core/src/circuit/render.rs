use super::{CircuitError, DiscourseSession, GateKind};
use crate::diagram::{centred, Canvas, Format};
use std::fmt::Write as _;
use unicode_width::UnicodeWidthStr;

/// Renders a session as json, dot or ascii. Wires run downwards; effects
/// are drawn as inverted boxes and their last wire stops there.
pub fn render_circuit(s: &DiscourseSession, format: Format) -> Result<Vec<u8>, CircuitError> {
    match format {
        Format::Json => Ok(s.to_json().into_bytes()),
        Format::Dot => Ok(dot(s).into_bytes()),
        Format::Ascii => Ok(ascii(s).into_bytes()),
        other => Err(CircuitError::UnsupportedFormat(other.to_string())),
    }
}

fn ascii(s: &DiscourseSession) -> String {
    if s.wires.is_empty() && s.layers.is_empty() {
        return String::new();
    }
    let spacing = s
        .wires
        .iter()
        .map(|w| w.label.width() + 4)
        .max()
        .unwrap_or(8)
        .max(8);
    let col = |w: usize| w * spacing + spacing / 2;
    let mut canvas = Canvas::default();
    let mut live: Vec<bool> = s
        .wires
        .iter()
        .map(|w| !w.transient && w.created == 0)
        .collect();
    let mut row = 0;
    for w in s.wires.iter().filter(|w| live[w.id]) {
        canvas.put(row, centred(col(w.id), w.label.width()), &w.label);
    }
    row += 1;
    let wires_row = |canvas: &mut Canvas, row: usize, live: &[bool]| {
        for (w, _) in live.iter().enumerate().filter(|(_, &l)| l) {
            canvas.put(row, col(w), "|");
        }
    };
    wires_row(&mut canvas, row, &live);
    row += 1;

    for (li, layer) in s.layers.iter().enumerate() {
        let fresh: Vec<usize> = s
            .wires
            .iter()
            .filter(|w| w.transient && w.created == li)
            .map(|w| w.id)
            .collect();
        if !fresh.is_empty() {
            for &w in &fresh {
                let label = &s.wires[w].label;
                canvas.put(row, centred(col(w), label.width()), label);
                live[w] = true;
            }
            row += 1;
            wires_row(&mut canvas, row, &live);
            row += 1;
        }
        for g in &layer.gates {
            let lo = g.wires.iter().map(|&w| col(w)).min().unwrap_or(0);
            let hi = g.wires.iter().map(|&w| col(w)).max().unwrap_or(0);
            let label_w = g.label.width();
            let mut left = lo.saturating_sub(3);
            let mut right = hi + 3;
            let need = label_w + 4;
            if right - left < need {
                let extra = need - (right - left);
                let grow = (extra / 2).min(left);
                left -= grow;
                right += extra - grow;
            }
            let ends = g.terminated();
            // wires passing outside the box
            for r in row..row + 3 {
                for (w, _) in live.iter().enumerate().filter(|(_, &l)| l) {
                    let c = col(w);
                    if c < left || c > right {
                        canvas.put(r, c, "|");
                    }
                }
            }
            canvas.put(row, left, "+");
            canvas.hline(row, left + 1, right - 1, '-');
            canvas.put(row, right, "+");
            for &w in &g.wires {
                canvas.put(row, col(w), "+");
            }
            let mid = row + 1;
            let (l, r) = match g.kind {
                GateKind::Effect => ("\\", "/"),
                _ => ("|", "|"),
            };
            canvas.put(mid, left, l);
            canvas.put(mid, left + 1 + (right - left - 1 - label_w) / 2, &g.label);
            canvas.put(mid, right, r);
            let bottom = row + 2;
            match g.kind {
                GateKind::Effect => {
                    canvas.put(bottom, left + 1, "+");
                    canvas.hline(bottom, left + 2, right - 2, '-');
                    canvas.put(bottom, right - 1, "+");
                }
                _ => {
                    canvas.put(bottom, left, "+");
                    canvas.hline(bottom, left + 1, right - 1, '-');
                    canvas.put(bottom, right, "+");
                }
            }
            for &w in &g.wires {
                if Some(w) != ends {
                    canvas.put(bottom, col(w), "+");
                }
            }
            if let Some(w) = ends {
                live[w] = false;
            }
            row += 3;
            wires_row(&mut canvas, row, &live);
            row += 1;
        }
    }
    canvas.finish()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot(s: &DiscourseSession) -> String {
    let mut out = String::from("digraph circuit {\n");
    if s.wires.is_empty() && s.layers.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push_str("  rankdir=TB;\n  node [fontname=\"monospace\"];\n");
    let mut last: Vec<String> = Vec::new();
    for w in &s.wires {
        let name = format!("w{}", w.id);
        let _ = writeln!(
            out,
            "  {name} [shape=plaintext, label=\"{}\"];",
            dot_escape(&w.label)
        );
        last.push(name);
    }
    for (li, layer) in s.layers.iter().enumerate() {
        for (gi, g) in layer.gates.iter().enumerate() {
            let name = format!("g{li}_{gi}");
            let shape = match g.kind {
                GateKind::Effect => "invtrapezium",
                _ => "box",
            };
            let style = if g.provisional { ", style=dashed" } else { "" };
            let _ = writeln!(
                out,
                "  {name} [shape={shape}, label=\"{}\"{style}];",
                dot_escape(&g.label)
            );
            for &w in &g.wires {
                let _ = writeln!(out, "  {} -> {name} [arrowhead=none];", last[w]);
                last[w] = name.clone();
            }
        }
    }
    for w in s.live_wires() {
        let _ = writeln!(out, "  {}_end [shape=point];", format_args!("w{w}"));
        let _ = writeln!(out, "  {} -> w{w}_end [arrowhead=none];", last[w]);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, Layer, Wire};

    fn one_wire() -> DiscourseSession {
        DiscourseSession {
            wires: vec![Wire {
                id: 0,
                label: "彼".into(),
                transient: false,
                created: 0,
            }],
            primary: vec!["彼".into()],
            layers: vec![Layer {
                sentence: 0,
                topic: None,
                gates: vec![Gate {
                    label: "走った".into(),
                    kind: GateKind::UnaryUpdate,
                    wires: vec![0],
                    provisional: false,
                }],
            }],
            ..DiscourseSession::empty()
        }
    }

    #[test]
    fn empty_session_documents() {
        let e = DiscourseSession::empty();
        assert_eq!(render_circuit(&e, Format::Ascii).unwrap(), b"");
        assert_eq!(
            render_circuit(&e, Format::Dot).unwrap(),
            b"digraph circuit {\n}\n"
        );
        let j = render_circuit(&e, Format::Json).unwrap();
        assert_eq!(
            DiscourseSession::from_json(std::str::from_utf8(&j).unwrap()).unwrap(),
            e
        );
        assert!(render_circuit(&e, Format::Svg).is_err());
    }

    #[test]
    fn one_wire_one_box() {
        let text = String::from_utf8(render_circuit(&one_wire(), Format::Ascii).unwrap()).unwrap();
        assert_eq!(text.matches("走った").count(), 1);
        assert_eq!(text.lines().next().unwrap().trim(), "彼");
        let dot = String::from_utf8(render_circuit(&one_wire(), Format::Dot).unwrap()).unwrap();
        assert_eq!(dot.matches("shape=box").count(), 1);
    }
}
