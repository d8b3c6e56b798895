use super::{BoxKind, Diagram, DiagramBox, DiagramError, Source};
use crate::pregroup::SimpleType;
use serde::{Deserialize, Serialize};

pub const DIAGRAM_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    #[serde(default = "default_version")]
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dom: Vec<SimpleType>,
    boxes: Vec<BoxJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    caps: Vec<[SimpleType; 2]>,
    #[serde(default)]
    cups: Vec<CupJson>,
    /// Absent means every uncupped box output, left to right.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    open: Option<Vec<RefJson>>,
}

fn default_version() -> u32 {
    DIAGRAM_SCHEMA_VERSION
}

#[derive(Serialize, Deserialize)]
struct BoxJson {
    label: String,
    kind: BoxKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<InputJson>,
    #[serde(default)]
    ports: Vec<SimpleType>,
}

#[derive(Serialize, Deserialize)]
struct InputJson {
    #[serde(flatten)]
    ty: SimpleType,
    from: RefJson,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum RefJson {
    /// `[box, port]`
    Port([usize; 2]),
    Dom {
        dom: usize,
    },
    Cap {
        cap: usize,
        end: usize,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CupJson {
    /// `[box, port, box, port]`
    Ports([usize; 4]),
    Refs([RefJson; 2]),
}

impl From<Source> for RefJson {
    fn from(s: Source) -> Self {
        match s {
            Source::Dom(dom) => RefJson::Dom { dom },
            Source::Out { node, port } => RefJson::Port([node, port]),
            Source::Cap { cap, end } => RefJson::Cap { cap, end },
        }
    }
}

impl From<RefJson> for Source {
    fn from(r: RefJson) -> Self {
        match r {
            RefJson::Port([node, port]) => Source::Out { node, port },
            RefJson::Dom { dom } => Source::Dom(dom),
            RefJson::Cap { cap, end } => Source::Cap { cap, end },
        }
    }
}

pub(super) fn to_json(d: &Diagram) -> String {
    let boxes = d
        .boxes
        .iter()
        .zip(&d.feeds)
        .map(|(b, feeds)| BoxJson {
            label: b.label.clone(),
            kind: b.kind,
            inputs: b
                .inputs
                .iter()
                .zip(feeds)
                .map(|(ty, &s)| InputJson {
                    ty: ty.clone(),
                    from: s.into(),
                })
                .collect(),
            ports: b.outputs.clone(),
        })
        .collect();
    let cups = d
        .cups
        .iter()
        .map(|&(a, b)| match (a, b) {
            (Source::Out { node: n1, port: p1 }, Source::Out { node: n2, port: p2 }) => {
                CupJson::Ports([n1, p1, n2, p2])
            }
            _ => CupJson::Refs([a.into(), b.into()]),
        })
        .collect();
    let doc = DiagramJson {
        schema_version: DIAGRAM_SCHEMA_VERSION,
        dom: d.dom.clone(),
        boxes,
        caps: d.caps.clone(),
        cups,
        open: Some(d.open.iter().map(|&s| s.into()).collect()),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("diagram serializes");
    out.push('\n');
    out
}

pub(super) fn from_json(text: &str) -> Result<Diagram, DiagramError> {
    let doc: DiagramJson =
        serde_json::from_str(text).map_err(|e| DiagramError::Json(e.to_string()))?;
    if doc.schema_version != DIAGRAM_SCHEMA_VERSION {
        return Err(DiagramError::Json(format!(
            "unsupported schema_version {}",
            doc.schema_version
        )));
    }
    let mut boxes = Vec::with_capacity(doc.boxes.len());
    let mut feeds = Vec::with_capacity(doc.boxes.len());
    for b in doc.boxes {
        feeds.push(b.inputs.iter().map(|i| Source::from(i.from)).collect());
        boxes.push(DiagramBox {
            label: b.label,
            kind: b.kind,
            inputs: b.inputs.into_iter().map(|i| i.ty).collect(),
            outputs: b.ports,
        });
    }
    let cups: Vec<(Source, Source)> = doc
        .cups
        .into_iter()
        .map(|c| match c {
            CupJson::Ports([n1, p1, n2, p2]) => (
                Source::Out { node: n1, port: p1 },
                Source::Out { node: n2, port: p2 },
            ),
            CupJson::Refs([a, b]) => (a.into(), b.into()),
        })
        .collect();
    let mut d = Diagram {
        dom: doc.dom,
        boxes,
        feeds,
        caps: doc.caps,
        cups,
        open: Vec::new(),
    };
    d.open = match doc.open {
        Some(open) => open.into_iter().map(Source::from).collect(),
        None => {
            let used: std::collections::BTreeSet<Source> = d
                .cups
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .chain(d.feeds.iter().flatten().copied())
                .collect();
            d.all_sources()
                .into_iter()
                .filter(|s| !used.contains(s))
                .collect()
        }
    };
    d.check_structure()?;
    Ok(d)
}
