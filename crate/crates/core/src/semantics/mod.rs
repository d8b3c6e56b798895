//! Tensor-network semantics for diagrams and discourse circuits.
//!
//! Every connected component of the base order gets one vector space, so a
//! cup between `n` and `π^r` is a plain delta pairing. Word tensors are
//! pseudo-random unit tensors derived from a seed, the box label and its
//! port types; they carry no trained meaning.

mod tensor;

pub use tensor::Tensor;

use crate::circuit::{DiscourseSession, GateKind};
use crate::diagram::{Diagram, Source};
use crate::lexicon::Lexicon;
use crate::pregroup::{BaseSymbol, GrammarSignature, SimpleType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_DIM: usize = 4;
pub const MAX_DIM: usize = 8;
pub const DEFAULT_SEED: u64 = 0;
pub const TENSOR_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    DimensionOutOfRange(usize),
    #[error("base `{0}` is not in the signature")]
    UnknownBase(String),
    #[error("no tensor for box {index} `{label}`")]
    MissingTensor { index: usize, label: String },
    #[error("box {index} `{label}` port {port}: expected {expected}, tensor has {found}")]
    ShapeMismatch {
        index: usize,
        label: String,
        port: usize,
        expected: String,
        found: String,
    },
    #[error("wire joins spaces of dimension {0} and {1}")]
    DimensionClash(usize, usize),
    #[error("tensor shapes differ: {0:?} vs {1:?}")]
    ShapeDiffers(Vec<usize>, Vec<usize>),
    #[error("zero-norm tensor")]
    ZeroNorm,
}

/// One dimension per connected component of the base order, plus the seed
/// word tensors are drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceAssignment {
    components: BTreeMap<BaseSymbol, usize>,
    dims: Vec<usize>,
    default_dim: usize,
    seed: u64,
}

fn check_dim(d: usize) -> Result<usize, SemanticsError> {
    if (1..=MAX_DIM).contains(&d) {
        Ok(d)
    } else {
        Err(SemanticsError::DimensionOutOfRange(d))
    }
}

impl SpaceAssignment {
    /// Every component gets `dim`. Bases outside the signature also get
    /// `dim`.
    pub fn new(sig: &GrammarSignature, dim: usize, seed: u64) -> Result<Self, SemanticsError> {
        check_dim(dim)?;
        let components = sig.components();
        let count = components.values().max().map_or(0, |m| m + 1);
        Ok(SpaceAssignment {
            components,
            dims: vec![dim; count],
            default_dim: dim,
            seed,
        })
    }

    /// No signature: every base has dimension `dim`.
    pub fn uniform(dim: usize, seed: u64) -> Result<Self, SemanticsError> {
        check_dim(dim)?;
        Ok(SpaceAssignment {
            components: BTreeMap::new(),
            dims: Vec::new(),
            default_dim: dim,
            seed,
        })
    }

    /// Sets the dimension of the component containing `base`.
    pub fn with_dim(mut self, base: &BaseSymbol, dim: usize) -> Result<Self, SemanticsError> {
        check_dim(dim)?;
        let c = *self
            .components
            .get(base)
            .ok_or_else(|| SemanticsError::UnknownBase(base.to_string()))?;
        self.dims[c] = dim;
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn default_dim(&self) -> usize {
        self.default_dim
    }

    pub fn dim_of_base(&self, base: &BaseSymbol) -> usize {
        self.components
            .get(base)
            .map_or(self.default_dim, |&c| self.dims[c])
    }

    /// Adjoints share their base's dimension.
    pub fn dim(&self, t: &SimpleType) -> usize {
        self.dim_of_base(&t.base)
    }

    /// Deterministic unit-norm tensor for `key` with the given shape.
    pub fn random_tensor(&self, key: &str, shape: Vec<usize>) -> Tensor {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(key.as_bytes());
        let digest = h.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha20Rng::from_seed(seed);
        let n: usize = shape.iter().product();
        let mut data: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = data.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            data.iter_mut().for_each(|x| *x /= norm);
        }
        Tensor::new(shape, data).expect("shape product matches")
    }
}

/// A word meaning: one tensor index per port, inputs first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordTensor {
    pub label: String,
    pub ports: Vec<SimpleType>,
    pub tensor: Tensor,
}

fn ports_key(ports: &[SimpleType]) -> String {
    ports
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl WordTensor {
    pub fn random(label: &str, ports: Vec<SimpleType>, sa: &SpaceAssignment) -> Self {
        let shape = ports.iter().map(|t| sa.dim(t)).collect();
        let key = format!("word\0{label}\0{}", ports_key(&ports));
        WordTensor {
            label: label.to_string(),
            tensor: sa.random_tensor(&key, shape),
            ports,
        }
    }
}

/// Word tensors keyed by label and port types.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorStore {
    map: BTreeMap<(String, Vec<SimpleType>), WordTensor>,
}

#[derive(Serialize, Deserialize)]
struct StoreJson {
    schema_version: u32,
    seed: u64,
    tensors: Vec<WordTensor>,
}

impl TensorStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, w: WordTensor) {
        self.map.insert((w.label.clone(), w.ports.clone()), w);
    }

    pub fn get(&self, label: &str, ports: &[SimpleType]) -> Option<&WordTensor> {
        self.map.get(&(label.to_string(), ports.to_vec()))
    }

    /// Any tensor for `label`, whatever its ports.
    pub fn any_for(&self, label: &str) -> Option<&WordTensor> {
        self.map
            .range((label.to_string(), Vec::new())..)
            .next()
            .map(|(_, w)| w)
            .filter(|w| w.label == label)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &WordTensor> {
        self.map.values()
    }

    /// A fresh random tensor for every box of `d`.
    pub fn for_diagram(d: &Diagram, sa: &SpaceAssignment) -> Self {
        let mut s = Self::new();
        for b in d.boxes() {
            let ports = [b.inputs.clone(), b.outputs.clone()].concat();
            if s.get(&b.label, &ports).is_none() {
                s.insert(WordTensor::random(&b.label, ports, sa));
            }
        }
        s
    }

    /// JSON dump: label, ports, shape and flat row-major data.
    pub fn to_json(&self, sa: &SpaceAssignment) -> String {
        let doc = StoreJson {
            schema_version: TENSOR_SCHEMA_VERSION,
            seed: sa.seed(),
            tensors: self.map.values().cloned().collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("tensors serialize");
        s.push('\n');
        s
    }
}

/// Random tensors for every usage in the lexicon, under the surface form
/// and, when not taken, the reading.
pub fn assign(lex: &Lexicon, sa: &SpaceAssignment) -> TensorStore {
    let mut store = TensorStore::new();
    for e in lex.entries() {
        for u in &e.usages {
            let w = WordTensor::random(&e.surface, u.assignment.0.clone(), sa);
            store.insert(w);
        }
    }
    for e in lex.entries() {
        if e.reading.is_empty() {
            continue;
        }
        for u in &e.usages {
            if store.get(&e.reading, &u.assignment.0).is_none() {
                let mut w = store
                    .get(&e.surface, &u.assignment.0)
                    .cloned()
                    .expect("inserted above");
                w.label = e.reading.clone();
                store.insert(w);
            }
        }
    }
    store
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

struct Factor {
    labels: Vec<usize>,
    tensor: Tensor,
}

/// Evaluates `d`, contracting cups in diagram order. The result has one
/// index per domain wire followed by one per open wire.
pub fn evaluate(
    d: &Diagram,
    store: &TensorStore,
    sa: &SpaceAssignment,
) -> Result<Tensor, SemanticsError> {
    let order: Vec<usize> = (0..d.cups().len()).collect();
    evaluate_with_order(d, store, sa, &order)
}

/// As [`evaluate`], contracting cups in the order given (indices into
/// `d.cups()`); remaining wires follow in source order.
pub fn evaluate_with_order(
    d: &Diagram,
    store: &TensorStore,
    sa: &SpaceAssignment,
    cup_order: &[usize],
) -> Result<Tensor, SemanticsError> {
    // one index variable per class of sources joined by cups and caps
    let mut ids: BTreeMap<Source, usize> = BTreeMap::new();
    let mut dims: Vec<usize> = Vec::new();
    let mut register = |s: Source, t: &SimpleType, ids: &mut BTreeMap<Source, usize>| {
        ids.insert(s, dims.len());
        dims.push(sa.dim(t));
    };
    for (i, t) in d.dom().iter().enumerate() {
        register(Source::Dom(i), t, &mut ids);
    }
    for (node, b) in d.boxes().iter().enumerate() {
        for (port, t) in b.outputs.iter().enumerate() {
            register(Source::Out { node, port }, t, &mut ids);
        }
    }
    for (cap, ends) in d.caps().iter().enumerate() {
        for (end, t) in ends.iter().enumerate() {
            register(Source::Cap { cap, end }, t, &mut ids);
        }
    }
    let mut uf = UnionFind((0..dims.len()).collect());
    let join = |a: usize, b: usize, uf: &mut UnionFind| -> Result<(), SemanticsError> {
        if dims[a] != dims[b] {
            return Err(SemanticsError::DimensionClash(dims[a], dims[b]));
        }
        uf.union(a, b);
        Ok(())
    };
    for &(a, b) in d.cups() {
        join(ids[&a], ids[&b], &mut uf)?;
    }
    for cap in 0..d.caps().len() {
        join(
            ids[&Source::Cap { cap, end: 0 }],
            ids[&Source::Cap { cap, end: 1 }],
            &mut uf,
        )?;
    }
    let class = |s: &Source, uf: &mut UnionFind| uf.find(ids[s]);

    let mut factors: Vec<Option<Factor>> = Vec::with_capacity(d.boxes().len());
    let mut endpoints = vec![0usize; dims.len()];
    for (index, (b, feeds)) in d.boxes().iter().zip(d.feeds()).enumerate() {
        let ports = [b.inputs.clone(), b.outputs.clone()].concat();
        let w = store
            .get(&b.label, &ports)
            .ok_or_else(|| match store.any_for(&b.label) {
                Some(other) => {
                    let port = ports
                        .iter()
                        .zip(&other.ports)
                        .position(|(x, y)| x != y)
                        .unwrap_or(ports.len().min(other.ports.len()));
                    SemanticsError::ShapeMismatch {
                        index,
                        label: b.label.clone(),
                        port,
                        expected: ports.get(port).map_or("nothing".into(), |t| t.to_string()),
                        found: other
                            .ports
                            .get(port)
                            .map_or("nothing".into(), |t| t.to_string()),
                    }
                }
                None => SemanticsError::MissingTensor {
                    index,
                    label: b.label.clone(),
                },
            })?;
        let shape = w.tensor.shape();
        for (port, t) in ports.iter().enumerate() {
            let want = sa.dim(t);
            if shape.get(port) != Some(&want) || shape.len() != ports.len() {
                return Err(SemanticsError::ShapeMismatch {
                    index,
                    label: b.label.clone(),
                    port,
                    expected: format!("dimension {want}"),
                    found: shape
                        .get(port)
                        .map_or("no index".into(), |d| format!("dimension {d}")),
                });
            }
        }
        let mut labels: Vec<usize> = feeds.iter().map(|s| class(s, &mut uf)).collect();
        labels.extend(
            (0..b.outputs.len()).map(|port| class(&Source::Out { node: index, port }, &mut uf)),
        );
        for &l in &labels {
            endpoints[l] += 1;
        }
        factors.push(Some(Factor {
            labels,
            tensor: w.tensor.clone(),
        }));
    }
    let mut out_labels: Vec<usize> = (0..d.dom().len())
        .map(|i| class(&Source::Dom(i), &mut uf))
        .collect();
    out_labels.extend(d.open_ports().iter().map(|s| class(s, &mut uf)));
    for &l in &out_labels {
        endpoints[l] += 1;
    }

    // closed loops contribute their dimension
    let mut loop_factor = 1.0;
    for root in 0..dims.len() {
        if uf.find(root) == root && endpoints[root] == 0 {
            loop_factor *= dims[root] as f64;
        }
    }

    let mut order: Vec<usize> = cup_order
        .iter()
        .filter_map(|&k| d.cups().get(k))
        .map(|(a, _)| class(a, &mut uf))
        .collect();
    order.extend((0..dims.len()).map(|x| uf.find(x)));
    for l in order {
        let holders: Vec<usize> = factors
            .iter()
            .enumerate()
            .filter(|(_, f)| f.as_ref().is_some_and(|f| f.labels.contains(&l)))
            .map(|(i, _)| i)
            .collect();
        match holders.as_slice() {
            [one] => {
                let f = factors[*one].as_mut().expect("holder");
                let pos: Vec<usize> = f
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x == l)
                    .map(|(i, _)| i)
                    .collect();
                if pos.len() == 2 {
                    f.tensor = f.tensor.trace(pos[0], pos[1]);
                    f.labels.retain(|&x| x != l);
                }
            }
            [a, b] => {
                let fb = factors[*b].take().expect("holder");
                let fa = factors[*a].take().expect("holder");
                factors[*a] = Some(merge(fa, fb));
            }
            _ => {}
        }
    }

    let mut acc = Factor {
        labels: Vec::new(),
        tensor: Tensor::scalar(loop_factor),
    };
    for f in factors.into_iter().flatten() {
        acc = merge(acc, f);
    }
    Ok(gather(&acc, &out_labels, &dims))
}

/// Contracts every label the two factors share.
fn merge(a: Factor, b: Factor) -> Factor {
    let pairs: Vec<(usize, usize)> = a
        .labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| b.labels.iter().position(|m| m == l).map(|j| (i, j)))
        .collect();
    let tensor = a.tensor.contract(&b.tensor, &pairs);
    let mut labels: Vec<usize> = a
        .labels
        .iter()
        .enumerate()
        .filter(|(i, _)| !pairs.iter().any(|p| p.0 == *i))
        .map(|(_, &l)| l)
        .collect();
    labels.extend(
        b.labels
            .iter()
            .enumerate()
            .filter(|(j, _)| !pairs.iter().any(|p| p.1 == *j))
            .map(|(_, &l)| l),
    );
    Factor { labels, tensor }
}

/// Lays the final factor out over the output slots. A class appearing in
/// two slots (a bare wire, or a cup or cap between boundary wires) is a
/// delta between them.
fn gather(f: &Factor, out: &[usize], dims: &[usize]) -> Tensor {
    let shape: Vec<usize> = out.iter().map(|&l| dims[l]).collect();
    let n: usize = shape.iter().product();
    let mut data = Vec::with_capacity(n);
    let mut idx = vec![0usize; out.len()];
    let mut fidx = vec![0usize; f.labels.len()];
    for _ in 0..n {
        let mut value: BTreeMap<usize, usize> = BTreeMap::new();
        let mut consistent = true;
        for (&l, &i) in out.iter().zip(&idx) {
            if *value.entry(l).or_insert(i) != i {
                consistent = false;
                break;
            }
        }
        if consistent {
            for (k, l) in f.labels.iter().enumerate() {
                fidx[k] = value[l];
            }
            data.push(f.tensor.get(&fidx));
        } else {
            data.push(0.0);
        }
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Tensor::new(shape, data).expect("gathered shape")
}

/// Cosine similarity of two equally shaped tensors.
pub fn similarity(a: &Tensor, b: &Tensor) -> Result<f64, SemanticsError> {
    if a.shape() != b.shape() {
        return Err(SemanticsError::ShapeDiffers(
            a.shape().to_vec(),
            b.shape().to_vec(),
        ));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(SemanticsError::ZeroNorm);
    }
    Ok((a.inner(b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Runs a discourse session: each wire starts as a noun vector, gates act
/// as matrices, effects contract their last wire away. The result has one
/// index per surviving wire, in wire order.
pub fn evaluate_session(s: &DiscourseSession, sa: &SpaceAssignment) -> Tensor {
    let d = sa.dim_of_base(&BaseSymbol::from("π"));
    let mut state = Tensor::scalar(1.0);
    let mut axes: Vec<usize> = Vec::new();
    for w in &s.wires {
        state = state.outer(&sa.random_tensor(&format!("noun\0{}", w.label), vec![d]));
        axes.push(w.id);
    }
    for g in s.gates() {
        let pos: Vec<usize> = g
            .wires
            .iter()
            .map(|w| axes.iter().position(|a| a == w).expect("live wire"))
            .collect();
        let arity = g.wires.len();
        let (outs, key) = match g.kind {
            GateKind::UnaryUpdate | GateKind::BinaryUpdate => (arity, "update"),
            GateKind::Effect => (arity - 1, "effect"),
        };
        let shape = vec![d; outs + arity];
        let gate = sa.random_tensor(&format!("gate\0{key}\0{}\0{arity}", g.label), shape);
        // gate indices: outputs, then inputs
        let pairs: Vec<(usize, usize)> = (0..arity).map(|k| (outs + k, pos[k])).collect();
        let next = gate.contract(&state, &pairs);
        let mut rest: Vec<usize> = axes
            .iter()
            .enumerate()
            .filter(|(i, _)| !pos.contains(i))
            .map(|(_, &a)| a)
            .collect();
        let mut new_axes: Vec<usize> = g.wires[..outs].to_vec();
        new_axes.append(&mut rest);
        state = next;
        axes = new_axes;
    }
    let mut perm: Vec<usize> = (0..axes.len()).collect();
    perm.sort_by_key(|&i| axes[i]);
    state.permute(&perm)
}
