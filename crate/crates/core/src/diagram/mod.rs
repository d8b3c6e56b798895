//! String diagrams over pregroup types.
//!
//! A [`Diagram`] is stored flat. Every wire segment starts at a [`Source`]
//! (a domain wire entering from the top, a box output, or one end of a cap)
//! and is consumed exactly once: fed into a box input, joined to another
//! source by a cup, or left open at the bottom. Open sources, in order, are
//! the codomain. Grammar-derived diagrams have an empty domain, only state
//! boxes and only cups.

mod json;
mod render;

pub use json::DIAGRAM_SCHEMA_VERSION;
pub use render::Format;
pub(crate) use render::{centred, Canvas};

use crate::parser::Parse;
use crate::pregroup::{GrammarSignature, SimpleType};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error(
        "composition type mismatch at position {position}: expected {expected}, found {found}"
    )]
    TypeMismatch {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("composition arity mismatch: {left} outputs against {right} inputs")]
    ArityMismatch { left: usize, right: usize },
    #[error("{0} cannot be cupped with {1}")]
    BadCup(SimpleType, SimpleType),
    #[error("{0} and {1} cannot form a cap")]
    BadCap(SimpleType, SimpleType),
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),
    #[error("diagram json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxKind {
    /// Outputs only.
    State,
    Process,
    /// Inputs only.
    Effect,
}

impl fmt::Display for BoxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoxKind::State => "state",
            BoxKind::Process => "process",
            BoxKind::Effect => "effect",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagramBox {
    pub label: String,
    pub kind: BoxKind,
    pub inputs: Vec<SimpleType>,
    pub outputs: Vec<SimpleType>,
}

impl DiagramBox {
    pub fn new(
        label: impl Into<String>,
        inputs: Vec<SimpleType>,
        outputs: Vec<SimpleType>,
    ) -> Self {
        let kind = match (inputs.is_empty(), outputs.is_empty()) {
            (true, _) => BoxKind::State,
            (false, true) => BoxKind::Effect,
            (false, false) => BoxKind::Process,
        };
        DiagramBox {
            label: label.into(),
            kind,
            inputs,
            outputs,
        }
    }

    pub fn state(label: impl Into<String>, outputs: Vec<SimpleType>) -> Self {
        Self::new(label, Vec::new(), outputs)
    }
}

/// Where a wire segment starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Dom(usize),
    Out { node: usize, port: usize },
    Cap { cap: usize, end: usize },
}

/// Where a source is consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Use {
    Feed { node: usize, port: usize },
    Cup { cup: usize, side: usize },
    Open(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    pub(crate) dom: Vec<SimpleType>,
    pub(crate) boxes: Vec<DiagramBox>,
    /// Per box, per input port: the source feeding it.
    pub(crate) feeds: Vec<Vec<Source>>,
    /// Types of the left and right end of each cap.
    pub(crate) caps: Vec<[SimpleType; 2]>,
    /// Left source, right source.
    pub(crate) cups: Vec<(Source, Source)>,
    pub(crate) open: Vec<Source>,
}

fn exact_cup(left: &SimpleType, right: &SimpleType) -> bool {
    left.base == right.base && right.z == left.z + 1
}

fn exact_cap(left: &SimpleType, right: &SimpleType) -> bool {
    left.base == right.base && right.z == left.z - 1
}

impl Diagram {
    /// The empty diagram (monoidal unit).
    pub fn empty() -> Self {
        Diagram {
            dom: Vec::new(),
            boxes: Vec::new(),
            feeds: Vec::new(),
            caps: Vec::new(),
            cups: Vec::new(),
            open: Vec::new(),
        }
    }

    /// Identity wires on `types`.
    pub fn identity(types: Vec<SimpleType>) -> Self {
        let open = (0..types.len()).map(Source::Dom).collect();
        Diagram {
            dom: types,
            open,
            ..Self::empty()
        }
    }

    /// A single box with its inputs as domain and outputs as codomain.
    pub fn from_box(b: DiagramBox) -> Self {
        let feeds = vec![(0..b.inputs.len()).map(Source::Dom).collect()];
        let open = (0..b.outputs.len())
            .map(|port| Source::Out { node: 0, port })
            .collect();
        Diagram {
            dom: b.inputs.clone(),
            boxes: vec![b],
            feeds,
            open,
            ..Self::empty()
        }
    }

    /// Cup consuming `left · right`; requires `right = left^r`.
    pub fn cup(left: SimpleType, right: SimpleType) -> Result<Self, DiagramError> {
        if !exact_cup(&left, &right) {
            return Err(DiagramError::BadCup(left, right));
        }
        Ok(Diagram {
            dom: vec![left, right],
            cups: vec![(Source::Dom(0), Source::Dom(1))],
            ..Self::empty()
        })
    }

    /// Cap producing `left · right`; requires `right = left^l`.
    pub fn cap(left: SimpleType, right: SimpleType) -> Result<Self, DiagramError> {
        if !exact_cap(&left, &right) {
            return Err(DiagramError::BadCap(left, right));
        }
        Ok(Diagram {
            caps: vec![[left, right]],
            open: vec![
                Source::Cap { cap: 0, end: 0 },
                Source::Cap { cap: 0, end: 1 },
            ],
            ..Self::empty()
        })
    }

    /// Build a diagram from state boxes and cups between their outputs.
    /// Outputs not in any cup become open, left to right.
    pub fn from_states(
        boxes: Vec<DiagramBox>,
        cups: Vec<((usize, usize), (usize, usize))>,
    ) -> Result<Self, DiagramError> {
        let mut used = BTreeMap::new();
        let mut out_cups = Vec::with_capacity(cups.len());
        for ((b1, p1), (b2, p2)) in cups {
            let a = Source::Out { node: b1, port: p1 };
            let b = Source::Out { node: b2, port: p2 };
            for s in [a, b] {
                if used.insert(s, ()).is_some() {
                    return Err(DiagramError::Malformed(format!("{s:?} in two cups")));
                }
            }
            out_cups.push((a, b));
        }
        let mut open = Vec::new();
        for (node, b) in boxes.iter().enumerate() {
            if !b.inputs.is_empty() {
                return Err(DiagramError::Malformed(format!(
                    "`{}` is not a state",
                    b.label
                )));
            }
            for port in 0..b.outputs.len() {
                let s = Source::Out { node, port };
                if !used.contains_key(&s) {
                    open.push(s);
                }
            }
        }
        let d = Diagram {
            feeds: vec![Vec::new(); boxes.len()],
            boxes,
            cups: out_cups,
            open,
            ..Self::empty()
        };
        d.check_structure()?;
        Ok(d)
    }

    /// One state per token, one cup per reduction link, open wires for the
    /// residue.
    pub fn from_parse(p: &Parse) -> Self {
        let mut offsets = Vec::with_capacity(p.len());
        let mut boxes = Vec::with_capacity(p.len());
        for (t, chosen) in p.token_usages.iter().enumerate() {
            offsets.push(p.type_range(t).start);
            boxes.push(DiagramBox::state(
                chosen.token.clone(),
                chosen.usage.assignment.0.clone(),
            ));
        }
        let port_of = |i: usize| {
            let node = p.owners[i];
            Source::Out {
                node,
                port: i - offsets[node],
            }
        };
        let cups = p
            .reduction
            .links
            .iter()
            .map(|&(i, j)| (port_of(i), port_of(j)))
            .collect();
        let open = p.reduction.residue.iter().map(|&i| port_of(i)).collect();
        Diagram {
            feeds: vec![Vec::new(); boxes.len()],
            boxes,
            cups,
            open,
            ..Self::empty()
        }
    }

    pub fn boxes(&self) -> &[DiagramBox] {
        &self.boxes
    }

    pub fn dom(&self) -> &[SimpleType] {
        &self.dom
    }

    pub fn cups(&self) -> &[(Source, Source)] {
        &self.cups
    }

    pub fn caps(&self) -> &[[SimpleType; 2]] {
        &self.caps
    }

    pub fn open_ports(&self) -> &[Source] {
        &self.open
    }

    pub fn feeds(&self) -> &[Vec<Source>] {
        &self.feeds
    }

    pub fn source_type(&self, s: Source) -> &SimpleType {
        match s {
            Source::Dom(i) => &self.dom[i],
            Source::Out { node, port } => &self.boxes[node].outputs[port],
            Source::Cap { cap, end } => &self.caps[cap][end],
        }
    }

    /// Codomain types.
    pub fn cod(&self) -> Vec<SimpleType> {
        self.open
            .iter()
            .map(|&s| self.source_type(s).clone())
            .collect()
    }

    fn all_sources(&self) -> Vec<Source> {
        let mut v: Vec<Source> = (0..self.dom.len()).map(Source::Dom).collect();
        for (node, b) in self.boxes.iter().enumerate() {
            v.extend((0..b.outputs.len()).map(|port| Source::Out { node, port }));
        }
        for cap in 0..self.caps.len() {
            v.push(Source::Cap { cap, end: 0 });
            v.push(Source::Cap { cap, end: 1 });
        }
        v
    }

    fn uses(&self) -> BTreeMap<Source, Use> {
        let mut m = BTreeMap::new();
        for (node, f) in self.feeds.iter().enumerate() {
            for (port, &s) in f.iter().enumerate() {
                m.insert(s, Use::Feed { node, port });
            }
        }
        for (cup, &(a, b)) in self.cups.iter().enumerate() {
            m.insert(a, Use::Cup { cup, side: 0 });
            m.insert(b, Use::Cup { cup, side: 1 });
        }
        for (i, &s) in self.open.iter().enumerate() {
            m.insert(s, Use::Open(i));
        }
        m
    }

    /// Every source consumed exactly once; box kinds and feed types agree.
    pub fn check_structure(&self) -> Result<(), DiagramError> {
        let bad = |m: String| Err(DiagramError::Malformed(m));
        if self.feeds.len() != self.boxes.len() {
            return bad("feeds do not match boxes".into());
        }
        let sources = self.all_sources();
        let mut count: BTreeMap<Source, usize> = sources.iter().map(|&s| (s, 0)).collect();
        let mut consumed = |s: Source| -> Result<(), DiagramError> {
            match count.get_mut(&s) {
                Some(c) => {
                    *c += 1;
                    Ok(())
                }
                None => Err(DiagramError::Malformed(format!("dangling source {s:?}"))),
            }
        };
        for (node, (b, f)) in self.boxes.iter().zip(&self.feeds).enumerate() {
            if f.len() != b.inputs.len() {
                return bad(format!(
                    "box {node} has {} feeds for {} inputs",
                    f.len(),
                    b.inputs.len()
                ));
            }
            let expected_kind = DiagramBox::new("", b.inputs.clone(), b.outputs.clone()).kind;
            if b.kind != expected_kind && !(b.inputs.is_empty() && b.outputs.is_empty()) {
                return bad(format!("box {node} `{}` is not a {}", b.label, b.kind));
            }
            for (port, &s) in f.iter().enumerate() {
                consumed(s)?;
                if let Source::Out { node: from, .. } = s {
                    if from >= node {
                        return bad(format!("box {node} is fed by a later box {from}"));
                    }
                }
                if self.source_type(s) != &b.inputs[port] {
                    return bad(format!(
                        "box {node} input {port} expects {} but is fed {}",
                        b.inputs[port],
                        self.source_type(s)
                    ));
                }
            }
        }
        for &(a, b) in &self.cups {
            consumed(a)?;
            consumed(b)?;
        }
        for &s in &self.open {
            consumed(s)?;
        }
        if let Some((s, c)) = count.iter().find(|(_, &c)| c != 1) {
            return bad(format!("source {s:?} consumed {c} times"));
        }
        Ok(())
    }

    /// Structure plus cup and cap typing. With a signature, cups may use the
    /// order (`n` against `π^r`); without one they must be exact adjoints.
    pub fn validate(&self, sig: Option<&GrammarSignature>) -> Result<(), DiagramError> {
        self.check_structure()?;
        for &(a, b) in &self.cups {
            let (l, r) = (self.source_type(a), self.source_type(b));
            let ok = match sig {
                Some(sig) => sig.contracts(l, r),
                None => exact_cup(l, r),
            };
            if !ok {
                return Err(DiagramError::BadCup(l.clone(), r.clone()));
            }
        }
        for [l, r] in &self.caps {
            if !exact_cap(l, r) {
                return Err(DiagramError::BadCap(l.clone(), r.clone()));
            }
        }
        Ok(())
    }

    fn shifted(&self, dom: usize, node: usize, cap: usize) -> impl Fn(Source) -> Source {
        move |s| match s {
            Source::Dom(i) => Source::Dom(i + dom),
            Source::Out { node: n, port } => Source::Out {
                node: n + node,
                port,
            },
            Source::Cap { cap: k, end } => Source::Cap { cap: k + cap, end },
        }
    }

    /// `g ∘ self`: feed this diagram's open wires into `g`'s domain.
    pub fn then(&self, g: &Diagram) -> Result<Diagram, DiagramError> {
        compose_seq(self, g)
    }

    /// `self ⊗ g`.
    pub fn tensor(&self, g: &Diagram) -> Diagram {
        compose_par(self, g)
    }

    /// Left-to-right rank of every source: domain wires, then box outputs in
    /// box order, then cap ends.
    pub fn port_positions(&self) -> BTreeMap<Source, usize> {
        self.all_sources()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect()
    }

    /// Cups pairwise non-crossing in the left-to-right port order.
    pub fn is_planar(&self) -> bool {
        let pos = self.port_positions();
        let spans: Vec<(usize, usize)> = self
            .cups
            .iter()
            .map(|(a, b)| {
                let (x, y) = (pos[a], pos[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        for (i, &(a, b)) in spans.iter().enumerate() {
            for &(c, d) in &spans[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return false;
                }
            }
        }
        true
    }

    /// Removes every cap whose end runs straight into a cup, rejoining the
    /// wire. Only zigzags (cap end and cup side facing each other) are
    /// straightened; loops (a cap cupped to itself) are left alone.
    pub fn yank(&self) -> Diagram {
        let mut d = self.clone();
        while let Some((cup_ix, cap, end, other)) = d.find_zigzag() {
            let free_end = Source::Cap { cap, end: 1 - end };
            d.cups.remove(cup_ix);
            d.replace_use(free_end, other);
            d.remove_cap(cap);
        }
        d
    }

    fn find_zigzag(&self) -> Option<(usize, usize, usize, Source)> {
        for (i, &(a, b)) in self.cups.iter().enumerate() {
            // a cap's right end must be the cup's left side, or vice versa
            for (side, here, there) in [(0, a, b), (1, b, a)] {
                if let Source::Cap { cap, end } = here {
                    if end != side && there != (Source::Cap { cap, end: 1 - end }) {
                        return Some((i, cap, end, there));
                    }
                }
            }
        }
        None
    }

    fn map_sources(&mut self, f: impl Fn(Source) -> Source) {
        for feed in &mut self.feeds {
            for s in feed.iter_mut() {
                *s = f(*s);
            }
        }
        for (a, b) in &mut self.cups {
            *a = f(*a);
            *b = f(*b);
        }
        for s in &mut self.open {
            *s = f(*s);
        }
    }

    fn replace_use(&mut self, old: Source, new: Source) {
        self.map_sources(|s| if s == old { new } else { s });
    }

    fn remove_cap(&mut self, cap: usize) {
        self.caps.remove(cap);
        self.map_sources(|s| match s {
            Source::Cap { cap: k, end } if k > cap => Source::Cap { cap: k - 1, end },
            other => other,
        });
    }

    /// Relabels boxes and caps in order of discovery from the boundary, so
    /// that diagrams equal up to the order boxes were added compare equal.
    pub fn canonical(&self) -> Diagram {
        #[derive(Clone, Copy)]
        enum Item {
            Node(usize),
            Cap(usize),
        }
        let uses = self.uses();
        let owner = |s: Source| match s {
            Source::Dom(_) => None,
            Source::Out { node, .. } => Some(Item::Node(node)),
            Source::Cap { cap, .. } => Some(Item::Cap(cap)),
        };
        let consumer = |s: Source| match uses.get(&s) {
            Some(Use::Feed { node, .. }) => Some(Item::Node(*node)),
            Some(Use::Cup { cup, side }) => {
                let (a, b) = self.cups[*cup];
                owner(if *side == 0 { b } else { a })
            }
            _ => None,
        };
        let neighbours = |item: Item| -> Vec<Option<Item>> {
            match item {
                Item::Node(n) => {
                    let mut v: Vec<_> = self.feeds[n].iter().map(|&s| owner(s)).collect();
                    v.extend(
                        (0..self.boxes[n].outputs.len())
                            .map(|port| consumer(Source::Out { node: n, port })),
                    );
                    v
                }
                Item::Cap(k) => (0..2)
                    .map(|end| consumer(Source::Cap { cap: k, end }))
                    .collect(),
            }
        };
        // boundary first; closed components fall back to original order
        let roots: Vec<Option<Item>> = (0..self.dom.len())
            .map(|i| consumer(Source::Dom(i)))
            .chain(self.open.iter().map(|&s| owner(s)))
            .chain((0..self.boxes.len()).map(|n| Some(Item::Node(n))))
            .chain((0..self.caps.len()).map(|k| Some(Item::Cap(k))))
            .collect();

        let mut box_order: Vec<usize> = Vec::new();
        let mut cap_order: Vec<usize> = Vec::new();
        let mut seen_box = vec![false; self.boxes.len()];
        let mut seen_cap = vec![false; self.caps.len()];
        let mut queue: VecDeque<Item> = VecDeque::new();
        let mut visit = |item: Option<Item>, queue: &mut VecDeque<Item>| match item {
            Some(Item::Node(n)) if !seen_box[n] => {
                seen_box[n] = true;
                box_order.push(n);
                queue.push_back(Item::Node(n));
            }
            Some(Item::Cap(k)) if !seen_cap[k] => {
                seen_cap[k] = true;
                cap_order.push(k);
                queue.push_back(Item::Cap(k));
            }
            _ => {}
        };
        for root in roots {
            visit(root, &mut queue);
            while let Some(item) = queue.pop_front() {
                for nb in neighbours(item) {
                    visit(nb, &mut queue);
                }
            }
        }

        let mut box_map = vec![0; self.boxes.len()];
        for (new, &old) in box_order.iter().enumerate() {
            box_map[old] = new;
        }
        let mut cap_map = vec![0; self.caps.len()];
        for (new, &old) in cap_order.iter().enumerate() {
            cap_map[old] = new;
        }
        let remap = |s: Source| match s {
            Source::Dom(i) => Source::Dom(i),
            Source::Out { node, port } => Source::Out {
                node: box_map[node],
                port,
            },
            Source::Cap { cap, end } => Source::Cap {
                cap: cap_map[cap],
                end,
            },
        };
        let boxes = box_order.iter().map(|&b| self.boxes[b].clone()).collect();
        let feeds = box_order
            .iter()
            .map(|&b| self.feeds[b].iter().map(|&s| remap(s)).collect())
            .collect();
        let caps = cap_order.iter().map(|&k| self.caps[k].clone()).collect();
        let mut cups: Vec<(Source, Source)> = self
            .cups
            .iter()
            .map(|&(a, b)| (remap(a), remap(b)))
            .collect();
        cups.sort();
        let open = self.open.iter().map(|&s| remap(s)).collect();
        Diagram {
            dom: self.dom.clone(),
            boxes,
            feeds,
            caps,
            cups,
            open,
        }
    }

    /// Equality up to the order boxes and caps were introduced.
    pub fn structurally_eq(&self, other: &Diagram) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        render::render(self, format)
    }

    pub fn to_json(&self) -> String {
        json::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        json::from_json(text)
    }
}

/// `g ∘ f`: `f` on top, its open wires feeding `g`'s domain.
pub fn compose_seq(f: &Diagram, g: &Diagram) -> Result<Diagram, DiagramError> {
    let cod = f.cod();
    if cod.len() != g.dom.len() {
        return Err(DiagramError::ArityMismatch {
            left: cod.len(),
            right: g.dom.len(),
        });
    }
    for (position, (a, b)) in cod.iter().zip(&g.dom).enumerate() {
        if a != b {
            return Err(DiagramError::TypeMismatch {
                position,
                expected: b.to_string(),
                found: a.to_string(),
            });
        }
    }
    let shift = g.shifted(0, f.boxes.len(), f.caps.len());
    let join = |s: Source| match s {
        Source::Dom(i) => f.open[i],
        other => shift(other),
    };
    let mut out = f.clone();
    out.open.clear();
    out.boxes.extend(g.boxes.iter().cloned());
    out.feeds.extend(
        g.feeds
            .iter()
            .map(|fd| fd.iter().map(|&s| join(s)).collect::<Vec<_>>()),
    );
    out.caps.extend(g.caps.iter().cloned());
    out.cups
        .extend(g.cups.iter().map(|&(a, b)| (join(a), join(b))));
    out.open = g.open.iter().map(|&s| join(s)).collect();
    Ok(out)
}

/// `f ⊗ g`: side by side, `f`'s wires first.
pub fn compose_par(f: &Diagram, g: &Diagram) -> Diagram {
    let shift = g.shifted(f.dom.len(), f.boxes.len(), f.caps.len());
    let mut out = f.clone();
    out.dom.extend(g.dom.iter().cloned());
    out.boxes.extend(g.boxes.iter().cloned());
    out.feeds.extend(
        g.feeds
            .iter()
            .map(|fd| fd.iter().map(|&s| shift(s)).collect::<Vec<_>>()),
    );
    out.caps.extend(g.caps.iter().cloned());
    out.cups
        .extend(g.cups.iter().map(|&(a, b)| (shift(a), shift(b))));
    out.open.extend(g.open.iter().map(|&s| shift(s)));
    out
}
