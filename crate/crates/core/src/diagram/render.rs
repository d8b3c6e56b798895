use super::{BoxKind, Diagram, DiagramError, Source};
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use unicode_width::{UnicodeWidthChar, UnicodeWidthStr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Json,
    Dot,
    Ascii,
    Svg,
}

impl FromStr for Format {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "ascii" | "text" => Ok(Format::Ascii),
            "svg" => Ok(Format::Svg),
            _ => Err(DiagramError::UnsupportedFormat(s.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Dot => "dot",
            Format::Ascii => "ascii",
            Format::Svg => "svg",
        })
    }
}

pub(super) fn render(d: &Diagram, format: Format) -> Vec<u8> {
    match format {
        Format::Json => d.to_json(),
        Format::Dot => dot(d),
        Format::Ascii => ascii(d),
        Format::Svg => svg(d),
    }
    .into_bytes()
}

/// Grid of terminal cells. Wide characters occupy two cells; zero-width
/// marks attach to the preceding cell.
#[derive(Default)]
pub(crate) struct Canvas {
    rows: Vec<Vec<Cell>>,
}

#[derive(Clone)]
enum Cell {
    Text(String),
    Cont,
}

impl Canvas {
    fn cell(&mut self, row: usize, col: usize) -> &mut Cell {
        if self.rows.len() <= row {
            self.rows.resize(row + 1, Vec::new());
        }
        let r = &mut self.rows[row];
        if r.len() <= col {
            r.resize(col + 1, Cell::Text(" ".into()));
        }
        &mut r[col]
    }

    pub(crate) fn put(&mut self, row: usize, col: usize, s: &str) {
        let mut c = col;
        let mut last: Option<usize> = None;
        for ch in s.chars() {
            match ch.width().unwrap_or(0) {
                0 => match last {
                    Some(l) => {
                        if let Cell::Text(t) = self.cell(row, l) {
                            t.push(ch);
                        }
                    }
                    None => {
                        *self.cell(row, c) = Cell::Text(ch.to_string());
                        last = Some(c);
                        c += 1;
                    }
                },
                w => {
                    *self.cell(row, c) = Cell::Text(ch.to_string());
                    for k in 1..w {
                        *self.cell(row, c + k) = Cell::Cont;
                    }
                    last = Some(c);
                    c += w;
                }
            }
        }
    }

    pub(crate) fn hline(&mut self, row: usize, from: usize, to: usize, ch: char) {
        for c in from..=to {
            *self.cell(row, c) = Cell::Text(ch.to_string());
        }
    }

    pub(crate) fn finish(self) -> String {
        let mut out = String::new();
        for r in self.rows {
            let mut line = String::new();
            for c in r {
                if let Cell::Text(t) = c {
                    line.push_str(&t);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// Column where a label of display width `w` starts when centred on `col`.
pub(crate) fn centred(col: usize, w: usize) -> usize {
    col.saturating_sub(w.saturating_sub(1) / 2)
}

fn is_state_only(d: &Diagram) -> bool {
    d.dom.is_empty() && d.caps.is_empty() && d.boxes.iter().all(|b| b.inputs.is_empty())
}

fn ascii(d: &Diagram) -> String {
    if is_state_only(d) {
        ascii_states(d)
    } else {
        ascii_listing(d)
    }
}

/// Boxes in one row, outputs along the bottom edge, cups as arcs below,
/// open wires hanging to the bottom.
fn ascii_states(d: &Diagram) -> String {
    let mut canvas = Canvas::default();
    let mut port_col: BTreeMap<Source, usize> = BTreeMap::new();
    let mut x = 0;
    for (node, b) in d.boxes.iter().enumerate() {
        let labels: Vec<String> = b.outputs.iter().map(|t| t.to_string()).collect();
        let slots: Vec<usize> = labels.iter().map(|l| l.width().max(1) + 3).collect();
        let ports_w: usize = slots.iter().sum();
        let label_w = b.label.width();
        let inner = ports_w.max(label_w + 4);
        let pad = (inner - ports_w) / 2;
        canvas.put(0, x, "+");
        canvas.hline(0, x + 1, x + inner, '-');
        canvas.put(0, x + inner + 1, "+");
        canvas.put(1, x, "|");
        canvas.put(1, x + 1 + (inner - label_w) / 2, &b.label);
        canvas.put(1, x + inner + 1, "|");
        canvas.put(2, x, "+");
        canvas.hline(2, x + 1, x + inner, '-');
        canvas.put(2, x + inner + 1, "+");
        let mut off = x + 1 + pad;
        for (port, (l, w)) in labels.iter().zip(&slots).enumerate() {
            let col = off + w / 2;
            canvas.put(2, col, "+");
            canvas.put(3, centred(col, l.width()), l);
            port_col.insert(Source::Out { node, port }, col);
            off += w;
        }
        x += inner + 3;
    }
    if d.boxes.is_empty() {
        return String::new();
    }

    let spans: Vec<(usize, usize)> = d
        .cups
        .iter()
        .map(|(a, b)| {
            let (p, q) = (port_col[a], port_col[b]);
            (p.min(q), p.max(q))
        })
        .collect();
    let depth = cup_depths(&spans);
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let mut cup_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &(a, b)) in spans.iter().enumerate() {
        cup_of.insert(a, depth[i]);
        cup_of.insert(b, depth[i]);
    }
    let open_cols: Vec<usize> = d.open.iter().map(|s| port_col[s]).collect();

    let wire_row = 4;
    for &col in cup_of.keys() {
        canvas.put(wire_row, col, "|");
    }
    for &col in &open_cols {
        canvas.put(wire_row, col, "|");
    }
    for level in 1..=max_depth {
        let row = wire_row + level;
        for (&col, &dep) in &cup_of {
            if dep > level {
                canvas.put(row, col, "|");
            }
        }
        for &col in &open_cols {
            canvas.put(row, col, "|");
        }
        for (i, &(a, b)) in spans.iter().enumerate() {
            if depth[i] == level {
                canvas.hline(row, a, b, '-');
                canvas.put(row, a, "+");
                canvas.put(row, b, "+");
            }
        }
    }
    if !open_cols.is_empty() {
        let row = wire_row + max_depth + 1;
        for &col in &open_cols {
            canvas.put(row, col, "|");
        }
        for (&s, &col) in d.open.iter().zip(&open_cols) {
            let l = d.source_type(s).to_string();
            canvas.put(row + 1, centred(col, l.width()), &l);
        }
    }
    canvas.finish()
}

/// Nesting depth of each span: 1 plus the deepest span strictly inside it.
fn cup_depths(spans: &[(usize, usize)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_by_key(|&i| spans[i].1 - spans[i].0);
    let mut depth = vec![1; spans.len()];
    for (k, &i) in order.iter().enumerate() {
        let (a, b) = spans[i];
        for &j in &order[..k] {
            let (c, e) = spans[j];
            if a < c && e < b {
                depth[i] = depth[i].max(depth[j] + 1);
            }
        }
    }
    depth
}

fn source_name(s: Source) -> String {
    match s {
        Source::Dom(i) => format!("dom{i}"),
        Source::Out { node, port } => format!("b{node}.{port}"),
        Source::Cap { cap, end } => format!("cap{cap}.{end}"),
    }
}

fn join_types(ts: &[crate::pregroup::SimpleType]) -> String {
    if ts.is_empty() {
        "1".into()
    } else {
        ts.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Text listing for diagrams with inputs or caps.
fn ascii_listing(d: &Diagram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dom: {}", join_types(&d.dom));
    for (k, [l, r]) in d.caps.iter().enumerate() {
        let _ = writeln!(out, "cap{k}: {l} {r}");
    }
    for (n, (b, feeds)) in d.boxes.iter().zip(&d.feeds).enumerate() {
        let from: Vec<String> = feeds.iter().map(|&s| source_name(s)).collect();
        let _ = write!(
            out,
            "b{n} [{}] {}: {} -> {}",
            b.kind,
            b.label,
            join_types(&b.inputs),
            join_types(&b.outputs)
        );
        if !from.is_empty() {
            let _ = write!(out, " <- {}", from.join(" "));
        }
        out.push('\n');
    }
    for &(a, b) in &d.cups {
        let _ = writeln!(out, "cup: {} {}", source_name(a), source_name(b));
    }
    let open: Vec<String> = d.open.iter().map(|&s| source_name(s)).collect();
    let _ = writeln!(out, "open: {}", open.join(" "));
    out
}

fn dot_escape(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        if matches!(ch, '{' | '}' | '|' | '<' | '>' | '"' | '\\' | ' ') {
            out.push('\\');
        }
        out.push(ch);
    }
    out
}

fn dot_end(s: Source) -> String {
    match s {
        Source::Dom(i) => format!("dom{i}"),
        Source::Out { node, port } => format!("b{node}:o{port}:s"),
        Source::Cap { cap, end } => format!("cap{cap}_{end}"),
    }
}

fn dot(d: &Diagram) -> String {
    let mut out = String::from("graph diagram {\n");
    if d.boxes.is_empty() && d.dom.is_empty() && d.caps.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push_str("  splines=curved;\n  node [shape=record, fontname=\"monospace\"];\n");
    for (i, t) in d.dom.iter().enumerate() {
        let _ = writeln!(
            out,
            "  dom{i} [shape=plaintext, label=\"{}\"];",
            dot_escape(&t.to_string())
        );
    }
    for (k, [l, r]) in d.caps.iter().enumerate() {
        let _ = writeln!(
            out,
            "  cap{k}_0 [shape=point, xlabel=\"{}\"];",
            dot_escape(&l.to_string())
        );
        let _ = writeln!(
            out,
            "  cap{k}_1 [shape=point, xlabel=\"{}\"];",
            dot_escape(&r.to_string())
        );
        let _ = writeln!(out, "  cap{k}_0 -- cap{k}_1 [style=dashed];");
    }
    let _ = writeln!(out, "  subgraph boxes {{");
    out.push_str("    rank=same;\n");
    for (n, b) in d.boxes.iter().enumerate() {
        let ports = |prefix: char, ts: &[crate::pregroup::SimpleType]| {
            ts.iter()
                .enumerate()
                .map(|(p, t)| format!("<{prefix}{p}>{}", dot_escape(&t.to_string())))
                .collect::<Vec<_>>()
                .join("|")
        };
        let mut label = String::from("{");
        if !b.inputs.is_empty() {
            let _ = write!(label, "{{{}}}|", ports('i', &b.inputs));
        }
        label.push_str(&dot_escape(&b.label));
        if !b.outputs.is_empty() {
            let _ = write!(label, "|{{{}}}", ports('o', &b.outputs));
        }
        label.push('}');
        let style = match b.kind {
            BoxKind::Effect => ", style=rounded",
            _ => "",
        };
        let _ = writeln!(out, "    b{n} [label=\"{label}\"{style}];");
    }
    out.push_str("  }\n");
    for (n, feeds) in d.feeds.iter().enumerate() {
        for (p, &s) in feeds.iter().enumerate() {
            let _ = writeln!(out, "  {} -- b{n}:i{p}:n;", dot_end(s));
        }
    }
    for &(a, b) in &d.cups {
        let _ = writeln!(out, "  {} -- {} [penwidth=2];", dot_end(a), dot_end(b));
    }
    for (i, &s) in d.open.iter().enumerate() {
        let t = d.source_type(s).to_string();
        let _ = writeln!(
            out,
            "  open{i} [shape=plaintext, label=\"{}\"];",
            dot_escape(&t)
        );
        let _ = writeln!(out, "  {} -- open{i};", dot_end(s));
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg(d: &Diagram) -> String {
    const PORT: f64 = 56.0;
    const BOX_H: f64 = 36.0;
    const TOP: f64 = 60.0;
    const GAP: f64 = 16.0;

    let mut anchor: BTreeMap<Source, (f64, f64)> = BTreeMap::new();
    let mut inputs: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut body = String::new();
    let mut x = 10.0;
    for (i, _) in d.dom.iter().enumerate() {
        anchor.insert(Source::Dom(i), (x + PORT * i as f64 + PORT / 2.0, 10.0));
    }
    x += PORT * d.dom.len() as f64;
    for (k, _) in d.caps.iter().enumerate() {
        let a = (x + PORT / 2.0, 40.0);
        let b = (x + PORT * 1.5, 40.0);
        anchor.insert(Source::Cap { cap: k, end: 0 }, a);
        anchor.insert(Source::Cap { cap: k, end: 1 }, b);
        let _ = writeln!(
            body,
            "  <path d=\"M {:.1} {:.1} Q {:.1} {:.1} {:.1} {:.1}\" fill=\"none\" stroke=\"black\"/>",
            a.0,
            a.1,
            (a.0 + b.0) / 2.0,
            a.1 - 30.0,
            b.0,
            b.1
        );
        x += PORT * 2.0;
    }
    let mut bx = 10.0;
    for (n, b) in d.boxes.iter().enumerate() {
        let ports = b.inputs.len().max(b.outputs.len()).max(1) as f64;
        let w = (PORT * ports).max(b.label.width() as f64 * 9.0 + 20.0);
        let _ = writeln!(
            body,
            "  <rect x=\"{bx:.1}\" y=\"{TOP:.1}\" width=\"{w:.1}\" height=\"{BOX_H:.1}\" fill=\"white\" stroke=\"black\"/>"
        );
        let _ = writeln!(
            body,
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            bx + w / 2.0,
            TOP + BOX_H / 2.0 + 5.0,
            xml_escape(&b.label)
        );
        let step = |count: usize, p: usize| bx + w * (p as f64 + 0.5) / count as f64;
        inputs.push(
            (0..b.inputs.len())
                .map(|p| (step(b.inputs.len(), p), TOP))
                .collect(),
        );
        for (p, t) in b.outputs.iter().enumerate() {
            let px = step(b.outputs.len(), p);
            anchor.insert(Source::Out { node: n, port: p }, (px, TOP + BOX_H));
            let _ = writeln!(
                body,
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>",
                px + 3.0,
                TOP + BOX_H + 12.0,
                xml_escape(&t.to_string())
            );
        }
        bx += w + GAP;
    }
    let width = bx.max(x) + 10.0;
    let mut bottom = TOP + BOX_H + 30.0;
    for (n, ins) in inputs.iter().enumerate() {
        for (p, &(ix, iy)) in ins.iter().enumerate() {
            let (sx, sy) = anchor[&d.feeds[n][p]];
            let _ = writeln!(
                body,
                "  <line x1=\"{sx:.1}\" y1=\"{sy:.1}\" x2=\"{ix:.1}\" y2=\"{iy:.1}\" stroke=\"black\"/>"
            );
        }
    }
    for (a, b) in &d.cups {
        let (ax, ay) = anchor[a];
        let (bxp, byp) = anchor[b];
        let dip = 20.0 + (ax - bxp).abs() / 4.0;
        let low = ay.max(byp) + dip;
        bottom = bottom.max(low + 10.0);
        let _ = writeln!(
            body,
            "  <path d=\"M {ax:.1} {ay:.1} C {ax:.1} {low:.1} {bxp:.1} {low:.1} {bxp:.1} {byp:.1}\" fill=\"none\" stroke=\"black\"/>"
        );
    }
    let open_y = bottom + 20.0;
    for &s in &d.open {
        let (sx, sy) = anchor[&s];
        let _ = writeln!(
            body,
            "  <line x1=\"{sx:.1}\" y1=\"{sy:.1}\" x2=\"{sx:.1}\" y2=\"{open_y:.1}\" stroke=\"black\"/>"
        );
        let _ = writeln!(
            body,
            "  <text x=\"{sx:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            open_y + 14.0,
            xml_escape(&d.source_type(s).to_string())
        );
    }
    let height = if d.boxes.is_empty() && d.dom.is_empty() && d.caps.is_empty() {
        0.0
    } else {
        open_y + 24.0
    };
    let width = if height == 0.0 { 0.0 } else { width };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"monospace\" font-size=\"14\">\n{body}</svg>\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tests::snake;
    use crate::pregroup::SimpleType;

    #[test]
    fn format_names() {
        assert_eq!("ASCII".parse::<Format>().unwrap(), Format::Ascii);
        assert!(matches!(
            "png".parse::<Format>(),
            Err(DiagramError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn empty_diagram_documents() {
        let e = Diagram::empty();
        assert_eq!(render(&e, Format::Ascii), b"");
        assert_eq!(render(&e, Format::Dot), b"graph diagram {\n}\n");
        let svg = String::from_utf8(render(&e, Format::Svg)).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        let json = String::from_utf8(render(&e, Format::Json)).unwrap();
        assert_eq!(Diagram::from_json(&json).unwrap(), e);
    }

    #[test]
    fn canvas_handles_wide_and_combining() {
        let mut c = Canvas::default();
        c.put(0, 0, "彼x");
        c.put(1, 0, "n\u{304}|");
        c.put(1, 3, "+");
        assert_eq!(c.finish(), "彼x\nn\u{304}| +\n");
    }

    #[test]
    fn cup_depth_nesting() {
        assert_eq!(
            cup_depths(&[(0, 9), (1, 2), (3, 6), (4, 5)]),
            vec![3, 1, 2, 1]
        );
    }

    #[test]
    fn non_state_diagrams_list() {
        let s = String::from_utf8(render(&snake(&SimpleType::from("n")), Format::Ascii)).unwrap();
        assert!(s.starts_with("dom: n\n"));
        assert!(s.contains("cap0: n^r n"));
    }
}
