//! Discourse circuits: one persistent wire per primary noun, one layer of
//! gates per sentence.
//!
//! Each sentence's role frame becomes gates on noun wires. Self-move
//! predicates and adjectives update one wire, other-move verbs join two,
//! and a verb acting on a noun that does not persist (a nominalizer, or a
//! noun outside the primary list) ends that wire with an effect. The topic
//! marker is drawn as a two-wire gate between the topic and the subject of
//! the comment; that encoding is marked provisional in the output.

mod render;

pub use render::render_circuit;

use crate::lexicon::{Category, Lexicon};
use crate::parser::{Case, ChosenUsage, Parse, ParseError, RoleFrame, TOPIC_PARTICLE};
use crate::pregroup::BaseSymbol;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const CIRCUIT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error(
        "sentence {sentence}: `{noun}` has no wire (not primary and transient wires are disabled)"
    )]
    NoWire { sentence: usize, noun: String },
    #[error("sentence {sentence}: wire for `{noun}` was already terminated")]
    Terminated { sentence: usize, noun: String },
    #[error("sentence {sentence}: no {role} for `{predicate}`")]
    MissingRole {
        sentence: usize,
        role: String,
        predicate: String,
    },
    #[error("primary noun `{0}` does not occur in the discourse")]
    UnknownPrimary(String),
    #[error("sentence {sentence}: {source}")]
    Roles {
        sentence: usize,
        #[source]
        source: ParseError,
    },
    #[error("unsupported circuit format `{0}`")]
    UnsupportedFormat(String),
    #[error("circuit json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    UnaryUpdate,
    BinaryUpdate,
    /// Ends the last of its wires; any earlier wire is updated.
    Effect,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub label: String,
    pub kind: GateKind,
    pub wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub provisional: bool,
}

impl Gate {
    /// The wire an effect terminates.
    pub fn terminated(&self) -> Option<usize> {
        match self.kind {
            GateKind::Effect => self.wires.last().copied(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub id: usize,
    pub label: String,
    /// Created for a single non-primary mention.
    #[serde(default, skip_serializing_if = "is_false")]
    pub transient: bool,
    /// Layer in which the wire appears.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub created: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub sentence: usize,
    /// Topic in force after this sentence, carried from earlier ones when
    /// the sentence has no topic marker.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscourseSession {
    pub schema_version: u32,
    pub wires: Vec<Wire>,
    /// Primary nouns in wire order.
    pub primary: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_topic: Option<String>,
    pub layers: Vec<Layer>,
    /// Set when any topic gate is present.
    pub provisional: bool,
}

/// Which nouns get persistent wires.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PrimarySelection {
    /// Nouns whose single type sits at or below `π`, minus nominalizers, in
    /// order of first mention.
    #[default]
    Default,
    /// Exactly these nouns, in this order (surface or reading).
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    pub primary: PrimarySelection,
    /// Give non-primary nouns a wire of their own within their sentence.
    pub transient_wires: bool,
    /// Surfaces treated as nominalizers besides usages labelled
    /// `nominalizer`.
    pub nominalizers: Vec<String>,
    /// Allow nominalizers in the default primary list.
    pub nominalizers_primary: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            primary: PrimarySelection::Default,
            transient_wires: true,
            nominalizers: vec!["こと".into(), "の".into()],
            nominalizers_primary: false,
        }
    }
}

impl CompileOptions {
    fn is_nominalizer(&self, c: &ChosenUsage) -> bool {
        c.usage.label == "nominalizer" || self.nominalizers.contains(&c.surface)
    }
}

fn is_noun(c: &ChosenUsage) -> bool {
    c.usage.category == Category::Noun
}

/// The default primary list for a discourse.
pub fn default_primary(lex: &Lexicon, parses: &[Parse], opts: &CompileOptions) -> Vec<String> {
    let sig = lex.signature();
    let pi = BaseSymbol::from("π");
    let mut out: Vec<String> = Vec::new();
    for p in parses {
        for c in &p.token_usages {
            let a = &c.usage.assignment;
            let below_pi = a.len() == 1
                && a[0].z == 0
                && (a[0].base == pi || sig.leq(&a[0].base, &pi).unwrap_or(false));
            if is_noun(c)
                && below_pi
                && (opts.nominalizers_primary || !opts.is_nominalizer(c))
                && !out.contains(&c.surface)
            {
                out.push(c.surface.clone());
            }
        }
    }
    out
}

struct Builder<'a> {
    opts: &'a CompileOptions,
    wires: Vec<Wire>,
    /// Primary surface to wire id.
    primary: BTreeMap<String, usize>,
    terminated: Vec<bool>,
    layer: usize,
    /// Transient wires created in the current layer, by surface.
    transient: BTreeMap<String, usize>,
}

impl Builder<'_> {
    fn wire_for(&mut self, c: &ChosenUsage) -> Result<usize, CircuitError> {
        let id = if let Some(&id) = self.primary.get(&c.surface) {
            id
        } else if let Some(&id) = self.transient.get(&c.surface) {
            id
        } else if self.opts.transient_wires {
            let id = self.wires.len();
            self.wires.push(Wire {
                id,
                label: c.surface.clone(),
                transient: true,
                created: self.layer,
            });
            self.terminated.push(false);
            self.transient.insert(c.surface.clone(), id);
            id
        } else {
            return Err(CircuitError::NoWire {
                sentence: self.layer,
                noun: c.surface.clone(),
            });
        };
        if self.terminated[id] {
            return Err(CircuitError::Terminated {
                sentence: self.layer,
                noun: c.surface.clone(),
            });
        }
        Ok(id)
    }

    fn is_primary(&self, c: &ChosenUsage) -> bool {
        self.primary.contains_key(&c.surface)
    }
}

/// Compiles parsed sentences into a discourse session.
pub fn compile(
    lex: &Lexicon,
    parses: &[Parse],
    opts: &CompileOptions,
) -> Result<DiscourseSession, CircuitError> {
    let frames = parses
        .iter()
        .enumerate()
        .map(|(sentence, p)| {
            p.extract_roles()
                .map_err(|source| CircuitError::Roles { sentence, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(&Parse, &RoleFrame)> = parses.iter().zip(frames.iter()).collect();
    compile_frames(lex, &pairs, opts)
}

/// As [`compile`], with role frames already extracted.
pub fn compile_frames(
    lex: &Lexicon,
    sentences: &[(&Parse, &RoleFrame)],
    opts: &CompileOptions,
) -> Result<DiscourseSession, CircuitError> {
    let parses: Vec<Parse> = sentences.iter().map(|(p, _)| (*p).clone()).collect();
    let primary_list = match &opts.primary {
        PrimarySelection::Default => default_primary(lex, &parses, opts),
        PrimarySelection::Explicit(list) => {
            let mut out = Vec::new();
            for want in list {
                let surface = parses
                    .iter()
                    .flat_map(|p| &p.token_usages)
                    .find(|c| {
                        is_noun(c) && (&c.surface == want || &c.reading == want || &c.token == want)
                    })
                    .map(|c| c.surface.clone())
                    .ok_or_else(|| CircuitError::UnknownPrimary(want.clone()))?;
                if !out.contains(&surface) {
                    out.push(surface);
                }
            }
            out
        }
    };

    let mut b = Builder {
        opts,
        wires: Vec::new(),
        primary: BTreeMap::new(),
        terminated: Vec::new(),
        layer: 0,
        transient: BTreeMap::new(),
    };
    for (id, label) in primary_list.iter().enumerate() {
        b.wires.push(Wire {
            id,
            label: label.clone(),
            transient: false,
            created: 0,
        });
        b.terminated.push(false);
        b.primary.insert(label.clone(), id);
    }

    let mut current_topic: Option<String> = None;
    let mut layers = Vec::with_capacity(sentences.len());
    let mut provisional = false;
    for (sentence, (p, roles)) in sentences.iter().enumerate() {
        b.layer = sentence;
        b.transient.clear();
        let gates = layer_gates(&mut b, p, roles, current_topic.as_deref())?;
        for g in &gates {
            if let Some(w) = g.terminated() {
                b.terminated[w] = true;
            }
            provisional |= g.provisional;
        }
        if let Some(t) = roles.topic {
            current_topic = Some(p.token_usages[t].surface.clone());
        }
        layers.push(Layer {
            sentence,
            topic: current_topic.clone(),
            gates,
        });
    }

    Ok(DiscourseSession {
        schema_version: CIRCUIT_SCHEMA_VERSION,
        wires: b.wires,
        primary: primary_list,
        current_topic,
        layers,
        provisional,
    })
}

fn layer_gates(
    b: &mut Builder<'_>,
    p: &Parse,
    roles: &RoleFrame,
    carried_topic: Option<&str>,
) -> Result<Vec<Gate>, CircuitError> {
    let sentence = b.layer;
    let tok = |i: usize| &p.token_usages[i];
    let mut gates = Vec::new();

    // relative clauses first: their head noun feeds the main clause
    for &(m, head) in &roles.modifiers {
        if !tok(m).usage.category.is_verb() || !is_noun(tok(head)) {
            continue;
        }
        let arg = roles
            .relations
            .iter()
            .filter(|r| r.predicate == m)
            .min_by_key(|r| (r.case != Case::Object, r.noun))
            .map(|r| r.noun);
        let head_wire = b.wire_for(tok(head))?;
        match arg {
            Some(a) if is_noun(tok(a)) => {
                let aw = b.wire_for(tok(a))?;
                gates.push(Gate {
                    label: tok(m).token.clone(),
                    kind: GateKind::BinaryUpdate,
                    wires: vec![aw, head_wire],
                    provisional: false,
                });
            }
            _ => gates.push(unary(&tok(m).token, head_wire)),
        }
    }
    for &(m, head) in &roles.modifiers {
        if tok(m).usage.category.is_verb() || !is_noun(tok(head)) {
            continue;
        }
        let w = b.wire_for(tok(head))?;
        gates.push(unary(&tok(m).token, w));
    }

    // the engine
    let engine = tok(roles.engine);
    let subject_wire = |b: &mut Builder<'_>| -> Result<Option<usize>, CircuitError> {
        if let Some(s) = roles.subject {
            return b.wire_for(tok(s)).map(Some);
        }
        if let Some(t) = carried_topic {
            if let Some(c) = p.token_usages.iter().find(|c| c.surface == t) {
                return b.wire_for(c).map(Some);
            }
            if let Some(&id) = b.primary.get(t) {
                if b.terminated[id] {
                    return Err(CircuitError::Terminated {
                        sentence,
                        noun: t.to_string(),
                    });
                }
                return Ok(Some(id));
            }
        }
        Ok(None)
    };
    let missing = |role: &str| CircuitError::MissingRole {
        sentence,
        role: role.into(),
        predicate: engine.token.clone(),
    };
    let mut engine_subject = None;
    match engine.usage.category {
        Category::VerbOtherMove => {
            let object = roles
                .relations
                .iter()
                .find(|r| r.predicate == roles.engine && r.case == Case::Object)
                .map(|r| r.noun);
            let subj = subject_wire(b)?;
            engine_subject = subj;
            match (subj, object) {
                (Some(s), Some(o)) => {
                    let obj = tok(o);
                    let ends = b.opts.is_nominalizer(obj) || !b.is_primary(obj);
                    let ow = b.wire_for(obj)?;
                    gates.push(Gate {
                        label: engine.token.clone(),
                        kind: if ends {
                            GateKind::Effect
                        } else {
                            GateKind::BinaryUpdate
                        },
                        wires: vec![s, ow],
                        provisional: false,
                    });
                }
                (Some(s), None) => gates.push(unary(&engine.token, s)),
                (None, Some(o)) => {
                    let ow = b.wire_for(tok(o))?;
                    gates.push(unary(&engine.token, ow));
                }
                (None, None) => return Err(missing("subject")),
            }
        }
        Category::VerbSelfMove | Category::Adjective | Category::AdjectivalNoun => {
            let s = subject_wire(b)?.ok_or_else(|| missing("subject"))?;
            engine_subject = Some(s);
            gates.push(unary(&engine.token, s));
        }
        Category::Copula => {
            let s = subject_wire(b)?.ok_or_else(|| missing("subject"))?;
            engine_subject = Some(s);
            let label = roles
                .complement
                .map(|c| tok(c).token.clone())
                .unwrap_or_else(|| engine.token.clone());
            gates.push(unary(&label, s));
        }
        _ => {}
    }

    // the topic marker joins the topic to the comment's subject
    if let Some(t) = roles.topic {
        if roles.subject != Some(t) {
            let tw = b.wire_for(tok(t))?;
            if let Some(s) = engine_subject.filter(|&s| s != tw) {
                let label = p
                    .token_usages
                    .iter()
                    .find(|c| c.surface == TOPIC_PARTICLE)
                    .map(|c| c.token.clone())
                    .unwrap_or_else(|| TOPIC_PARTICLE.to_string());
                gates.push(Gate {
                    label,
                    kind: GateKind::BinaryUpdate,
                    wires: vec![tw, s],
                    provisional: true,
                });
            }
        }
    }
    Ok(gates)
}

fn unary(label: &str, wire: usize) -> Gate {
    Gate {
        label: label.to_string(),
        kind: GateKind::UnaryUpdate,
        wires: vec![wire],
        provisional: false,
    }
}

impl DiscourseSession {
    pub fn empty() -> Self {
        DiscourseSession {
            schema_version: CIRCUIT_SCHEMA_VERSION,
            wires: Vec::new(),
            primary: Vec::new(),
            current_topic: None,
            layers: Vec::new(),
            provisional: false,
        }
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| &l.gates)
    }

    /// Wires not terminated by any effect, in id order.
    pub fn live_wires(&self) -> Vec<usize> {
        let dead: Vec<usize> = self.gates().filter_map(Gate::terminated).collect();
        (0..self.wires.len())
            .filter(|w| !dead.contains(w))
            .collect()
    }

    pub fn wire_by_label(&self, label: &str) -> Option<usize> {
        self.wires.iter().position(|w| w.label == label)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("session serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitError> {
        serde_json::from_str(text).map_err(|e| CircuitError::Json(e.to_string()))
    }
}

/// True when renaming the wires of `a` turns it into `b` gate for gate.
pub fn wire_permutation_equivalence(a: &DiscourseSession, b: &DiscourseSession) -> bool {
    if a.wires.len() != b.wires.len() || a.layers.len() != b.layers.len() {
        return false;
    }
    let mut fwd: Vec<Option<usize>> = vec![None; a.wires.len()];
    let mut back: Vec<Option<usize>> = vec![None; b.wires.len()];
    let bind =
        |x: usize, y: usize, fwd: &mut Vec<Option<usize>>, back: &mut Vec<Option<usize>>| -> bool {
            if x >= fwd.len() || y >= back.len() {
                return false;
            }
            match (fwd[x], back[y]) {
                (None, None) => {
                    let (wa, wb) = (&a.wires[x], &b.wires[y]);
                    if wa.label != wb.label
                        || wa.transient != wb.transient
                        || wa.created != wb.created
                    {
                        return false;
                    }
                    fwd[x] = Some(y);
                    back[y] = Some(x);
                    true
                }
                (Some(fy), Some(bx)) => fy == y && bx == x,
                _ => false,
            }
        };
    for (la, lb) in a.layers.iter().zip(&b.layers) {
        if la.topic != lb.topic || la.gates.len() != lb.gates.len() {
            return false;
        }
        for (ga, gb) in la.gates.iter().zip(&lb.gates) {
            if ga.label != gb.label
                || ga.kind != gb.kind
                || ga.provisional != gb.provisional
                || ga.wires.len() != gb.wires.len()
            {
                return false;
            }
            for (&x, &y) in ga.wires.iter().zip(&gb.wires) {
                if !bind(x, y, &mut fwd, &mut back) {
                    return false;
                }
            }
        }
    }
    // idle wires pair up by label
    for x in 0..a.wires.len() {
        if fwd[x].is_some() {
            continue;
        }
        let Some(y) =
            (0..b.wires.len()).find(|&y| back[y].is_none() && b.wires[y].label == a.wires[x].label)
        else {
            return false;
        };
        if !bind(x, y, &mut fwd, &mut back) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{analyze, ParseOptions, Sentence};

    fn parse(s: &str) -> Parse {
        analyze(
            &Lexicon::jp_core(),
            &Sentence::from_line(s),
            &ParseOptions::default(),
        )
        .unwrap()
        .parses
        .remove(0)
    }

    fn session(sentences: &[&str], primary: Option<&[&str]>) -> DiscourseSession {
        let parses: Vec<Parse> = sentences.iter().map(|s| parse(s)).collect();
        let opts = CompileOptions {
            primary: match primary {
                Some(p) => PrimarySelection::Explicit(p.iter().map(|s| s.to_string()).collect()),
                None => PrimarySelection::Default,
            },
            ..CompileOptions::default()
        };
        compile(&Lexicon::jp_core(), &parses, &opts).unwrap()
    }

    fn gate(label: &str, kind: GateKind, wires: &[usize]) -> Gate {
        Gate {
            label: label.into(),
            kind,
            wires: wires.to_vec(),
            provisional: false,
        }
    }

    #[test]
    fn self_move_is_one_unary_gate() {
        let s = session(&["彼 が 走った"], Some(&["彼"]));
        assert_eq!(s.wires.len(), 1);
        assert_eq!(
            s.layers[0].gates,
            vec![gate("走った", GateKind::UnaryUpdate, &[0])]
        );
        assert!(!s.provisional);
    }

    #[test]
    fn topic_sentence_gates() {
        let s = session(&["私 は オレンジ 色 が 好き だ"], Some(&["私", "色"]));
        assert_eq!(s.wires.len(), 2);
        let g = &s.layers[0].gates;
        assert_eq!(g[0], gate("オレンジ", GateKind::UnaryUpdate, &[1]));
        assert_eq!(g[1], gate("好き", GateKind::UnaryUpdate, &[1]));
        assert_eq!(g[2].label, "は");
        assert_eq!(g[2].kind, GateKind::BinaryUpdate);
        assert_eq!(g[2].wires, vec![0, 1]);
        assert!(g[2].provisional && s.provisional);
        assert_eq!(s.current_topic.as_deref(), Some("私"));
    }

    #[test]
    fn default_primary_skips_nominalizers() {
        let s = session(&["私 は オレンジ 色 が 好き だ"], None);
        assert_eq!(s.primary, vec!["私", "色"]);
        let s = session(&["かれ は 薬 を 付ける こと を 決めた"], None);
        assert_eq!(s.primary, vec!["かれ", "薬"]);
        // こと gets a transient wire that the effect ends
        assert_eq!(s.wires.len(), 3);
        assert!(s.wires[2].transient);
        assert_eq!(s.live_wires(), vec![0, 1]);
    }

    #[test]
    fn relative_clause_and_effect() {
        let s = session(
            &["かれ は 薬 を 付ける こと を 決めた"],
            Some(&["かれ", "薬", "こと"]),
        );
        assert_eq!(s.wires.len(), 3);
        assert_eq!(
            s.layers[0].gates,
            vec![
                gate("付ける", GateKind::BinaryUpdate, &[1, 2]),
                gate("決めた", GateKind::Effect, &[0, 2]),
            ]
        );
        assert_eq!(s.live_wires(), vec![0, 1]);
    }

    #[test]
    fn topic_carries_to_following_sentences() {
        let s = session(
            &["私 は オレンジ 色 が 好き だ", "ほら", "彼 が 走った"],
            None,
        );
        assert_eq!(s.layers.len(), 3);
        for l in &s.layers {
            assert_eq!(l.topic.as_deref(), Some("私"));
        }
        assert!(s.layers[1].gates.is_empty());
    }

    #[test]
    fn missing_wire_without_transients() {
        let parses = vec![parse("かれ は 薬 を 付ける こと を 決めた")];
        let opts = CompileOptions {
            transient_wires: false,
            ..CompileOptions::default()
        };
        assert!(matches!(
            compile(&Lexicon::jp_core(), &parses, &opts),
            Err(CircuitError::NoWire { .. })
        ));
        let opts = CompileOptions {
            primary: PrimarySelection::Explicit(vec!["猫".into()]),
            ..CompileOptions::default()
        };
        assert_eq!(
            compile(&Lexicon::jp_core(), &parses, &opts),
            Err(CircuitError::UnknownPrimary("猫".into()))
        );
    }

    #[test]
    fn permutation_equivalence() {
        let a = session(&["私 は オレンジ 色 が 好き だ"], Some(&["私", "色"]));
        let b = session(&["私 は オレンジ 色 が 好き だ"], Some(&["色", "私"]));
        assert_ne!(a, b);
        assert!(wire_permutation_equivalence(&a, &b));
        assert!(wire_permutation_equivalence(&a, &a));
        let mut c = a.clone();
        c.layers[0].gates[2].wires.reverse();
        assert!(!wire_permutation_equivalence(&a, &c));
    }

    #[test]
    fn json_round_trip() {
        let s = session(&["かれ は 薬 を 付ける こと を 決めた"], None);
        assert_eq!(DiscourseSession::from_json(&s.to_json()).unwrap(), s);
    }
}
