//! Pregroup type algebra.
//!
//! A [`SimpleType`] is a base symbol decorated with an integer adjoint order
//! `z`: `z = 0` is the bare base, `z = +1` its right adjoint (`t^r`) and
//! `z = -1` its left adjoint (`t^l`). A [`TypeString`] is a juxtaposition of
//! simple types; the empty string is the monoidal unit.
//!
//! Base symbols are partially ordered by a [`GrammarSignature`]. Contraction
//! is order-aware: `a · b^r → 1` whenever `a ≤ b`, and `b^l · a → 1` whenever
//! `a ≤ b`, generalised to iterated adjoints by parity of the left order.

mod oracle;
mod reduce;

pub use oracle::{oracle_reduce, ORACLE_MAX_LEN};
pub use reduce::{
    best_grammatical, grammatical_reductions, is_grammatical, reduce, Grammaticality, Reduction,
    ReductionSet, DEFAULT_REDUCTION_CAP,
};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("unknown base symbol `{0}`")]
    UnknownBase(String),
    #[error("base symbol `{0}` declared twice")]
    DuplicateBase(String),
    #[error("order postulates form a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("empty base symbol name")]
    EmptyName,
    #[error("oracle refuses strings longer than {max} simple types (got {len})")]
    OracleTooLong { len: usize, max: usize },
    #[error("cannot parse simple type `{0}`")]
    BadTypeSyntax(String),
}

/// Name of an atomic grammatical category (`π`, `n`, `s_2`, `c_4`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BaseSymbol(String);

impl BaseSymbol {
    pub fn new(name: impl Into<String>) -> Self {
        BaseSymbol(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for BaseSymbol {
    fn from(s: &str) -> Self {
        BaseSymbol::new(s)
    }
}

impl From<String> for BaseSymbol {
    fn from(s: String) -> Self {
        BaseSymbol(s)
    }
}

/// Direction of an adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A base symbol with an adjoint order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimpleType {
    pub base: BaseSymbol,
    pub z: i64,
}

impl SimpleType {
    pub fn new(base: impl Into<BaseSymbol>, z: i64) -> Self {
        SimpleType {
            base: base.into(),
            z,
        }
    }

    pub fn base(base: impl Into<BaseSymbol>) -> Self {
        Self::new(base, 0)
    }

    pub fn adjoint(&self, side: Side) -> Self {
        match side {
            Side::Left => self.left(),
            Side::Right => self.right(),
        }
    }

    /// `t^r`
    pub fn right(&self) -> Self {
        SimpleType::new(self.base.clone(), self.z + 1)
    }

    /// `t^l`
    pub fn left(&self) -> Self {
        SimpleType::new(self.base.clone(), self.z - 1)
    }
}

impl From<&str> for SimpleType {
    /// Panics on malformed input; meant for literals in code and tests.
    fn from(s: &str) -> Self {
        s.parse().expect("malformed simple type literal")
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if self.z > 0 {
            write!(f, "^{}", "r".repeat(self.z as usize))?;
        } else if self.z < 0 {
            write!(f, "^{}", "l".repeat(self.z.unsigned_abs() as usize))?;
        }
        Ok(())
    }
}

impl FromStr for SimpleType {
    type Err = SignatureError;

    /// Accepts `base`, `base^r`, `base^rr`, `base^l`, ... and the ASCII
    /// aliases understood by [`canonical_base_name`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (base, suffix) = match s.split_once('^') {
            Some((b, suf)) => (b, suf),
            None => (s, ""),
        };
        if base.is_empty() {
            return Err(SignatureError::BadTypeSyntax(s.to_string()));
        }
        let z = if suffix.is_empty() {
            0
        } else if suffix.chars().all(|c| c == 'r') {
            suffix.len() as i64
        } else if suffix.chars().all(|c| c == 'l') {
            -(suffix.len() as i64)
        } else {
            return Err(SignatureError::BadTypeSyntax(s.to_string()));
        };
        Ok(SimpleType::new(canonical_base_name(base), z))
    }
}

/// Maps ASCII spellings (`pi`, `nbar`, `sbar`, `alpha`) to the symbols used
/// by the bundled Japanese signature. Other names pass through unchanged.
pub fn canonical_base_name(name: &str) -> String {
    match name {
        "pi" => "π".to_string(),
        "nbar" => "n\u{304}".to_string(),
        "sbar" => "s\u{304}".to_string(),
        "alpha" => "α".to_string(),
        other => other.to_string(),
    }
}

/// An ordered juxtaposition of simple types.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeString(pub Vec<SimpleType>);

impl TypeString {
    pub fn unit() -> Self {
        TypeString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SimpleType> {
        self.0.iter()
    }

    pub fn concat(&self, other: &TypeString) -> TypeString {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        TypeString(items)
    }
}

impl std::ops::Index<usize> for TypeString {
    type Output = SimpleType;
    fn index(&self, i: usize) -> &SimpleType {
        &self.0[i]
    }
}

impl FromIterator<SimpleType> for TypeString {
    fn from_iter<I: IntoIterator<Item = SimpleType>>(iter: I) -> Self {
        TypeString(iter.into_iter().collect())
    }
}

impl FromStr for TypeString {
    type Err = SignatureError;

    /// Parses whitespace- or `·`-separated simple types: `"π^r · c_1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(|c: char| c.is_whitespace() || c == '·')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl From<&str> for TypeString {
    fn from(s: &str) -> Self {
        s.parse().expect("malformed type string literal")
    }
}

impl fmt::Display for TypeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A set of base symbols together with a partial order on them.
///
/// The postulates are kept as given; the reflexive-transitive closure is
/// computed once at construction. Immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarSignature {
    bases: Vec<BaseSymbol>,
    index: BTreeMap<BaseSymbol, usize>,
    postulates: Vec<(BaseSymbol, BaseSymbol)>,
    closure: Vec<Vec<bool>>,
}

impl GrammarSignature {
    pub fn new<B, P>(bases: B, postulates: P) -> Result<Self, SignatureError>
    where
        B: IntoIterator,
        B::Item: Into<BaseSymbol>,
        P: IntoIterator<Item = (BaseSymbol, BaseSymbol)>,
    {
        let bases: Vec<BaseSymbol> = bases.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, b) in bases.iter().enumerate() {
            if b.as_str().is_empty() {
                return Err(SignatureError::EmptyName);
            }
            if index.insert(b.clone(), i).is_some() {
                return Err(SignatureError::DuplicateBase(b.to_string()));
            }
        }
        let postulates: Vec<_> = postulates.into_iter().collect();
        let n = bases.len();
        let mut closure = vec![vec![false; n]; n];
        for (i, row) in closure.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in &postulates {
            let ia = *index
                .get(a)
                .ok_or_else(|| SignatureError::UnknownBase(a.to_string()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| SignatureError::UnknownBase(b.to_string()))?;
            closure[ia][ib] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if closure[i][k] {
                    for j in 0..n {
                        if closure[k][j] {
                            closure[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if closure[i][j] && closure[j][i] {
                    return Err(SignatureError::Cycle(
                        bases[i].to_string(),
                        bases[j].to_string(),
                    ));
                }
            }
        }
        Ok(GrammarSignature {
            bases,
            index,
            postulates,
            closure,
        })
    }

    /// The Japanese alphabet with its order postulates:
    /// `s_i ≤ s ≤ q`, `s̄ ≤ s`, `n_v ≤ n ≤ n̄ ≤ π`, `a_v ≤ a`, `a_v ≤ s_1`,
    /// `a_n ≤ a` and `a_n ≤ n`.
    pub fn japanese() -> Self {
        let bases = [
            "π", "n\u{304}", "n", "n_v", "a", "a_n", "a_v", "α", "s", "s\u{304}", "s_1", "s_2",
            "q", "c_1", "c_2", "c_3", "c_4", "c_5", "c_6",
        ];
        let order = [
            ("s_1", "s"),
            ("s_2", "s"),
            ("s", "q"),
            ("s\u{304}", "s"),
            ("n_v", "n"),
            ("n", "n\u{304}"),
            ("n\u{304}", "π"),
            ("a_v", "a"),
            ("a_v", "s_1"),
            ("a_n", "a"),
            ("a_n", "n"),
        ];
        GrammarSignature::new(
            bases,
            order
                .iter()
                .map(|(a, b)| (BaseSymbol::from(*a), BaseSymbol::from(*b))),
        )
        .expect("built-in signature is acyclic")
    }

    /// Two unordered bases, `n` and `s`.
    pub fn english() -> Self {
        GrammarSignature::new(["n", "s"], std::iter::empty()).expect("built-in signature")
    }

    pub fn bases(&self) -> &[BaseSymbol] {
        &self.bases
    }

    pub fn postulates(&self) -> &[(BaseSymbol, BaseSymbol)] {
        &self.postulates
    }

    pub fn contains(&self, b: &BaseSymbol) -> bool {
        self.index.contains_key(b)
    }

    fn idx(&self, b: &BaseSymbol) -> Result<usize, SignatureError> {
        self.index
            .get(b)
            .copied()
            .ok_or_else(|| SignatureError::UnknownBase(b.to_string()))
    }

    /// `a ≤ b` in the reflexive-transitive closure of the postulates.
    pub fn leq(&self, a: &BaseSymbol, b: &BaseSymbol) -> Result<bool, SignatureError> {
        Ok(self.closure[self.idx(a)?][self.idx(b)?])
    }

    /// Like [`leq`](Self::leq) but unknown symbols only compare equal to
    /// themselves.
    fn leq_lenient(&self, a: &BaseSymbol, b: &BaseSymbol) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.closure[i][j],
            _ => a == b,
        }
    }

    /// Whether `left · right → 1` is a legal contraction.
    pub fn contracts(&self, left: &SimpleType, right: &SimpleType) -> bool {
        if right.z != left.z + 1 {
            return false;
        }
        if left.z.rem_euclid(2) == 0 {
            self.leq_lenient(&left.base, &right.base)
        } else {
            self.leq_lenient(&right.base, &left.base)
        }
    }

    /// Every base `b` with `a ≤ b`: the receptacles `a` can plug into.
    pub fn interfaces(&self, a: &BaseSymbol) -> Result<BTreeSet<BaseSymbol>, SignatureError> {
        let i = self.idx(a)?;
        Ok(self
            .bases
            .iter()
            .enumerate()
            .filter(|(j, _)| self.closure[i][*j])
            .map(|(_, b)| b.clone())
            .collect())
    }

    /// Partition of the bases into connected components of the order
    /// (ignoring direction). Component ids follow first appearance in
    /// declaration order.
    pub fn components(&self) -> BTreeMap<BaseSymbol, usize> {
        let n = self.bases.len();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if comp[j] == usize::MAX && (self.closure[i][j] || self.closure[j][i]) {
                        comp[j] = next;
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        self.bases
            .iter()
            .cloned()
            .zip(comp)
            .collect::<BTreeMap<_, _>>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BaseSymbol {
        BaseSymbol::from(s)
    }

    #[test]
    fn adjoint_examples() {
        let n = SimpleType::base("n");
        assert_eq!(n.adjoint(Side::Right), SimpleType::new("n", 1));
        let pi = SimpleType::base("π");
        assert_eq!(pi.right().left(), pi);
        assert_eq!(SimpleType::base("s").left(), SimpleType::new("s", -1));
    }

    #[test]
    fn leq_examples() {
        let sig = GrammarSignature::japanese();
        assert!(sig.leq(&b("n"), &b("π")).unwrap());
        assert!(sig.leq(&b("π"), &b("π")).unwrap());
        assert!(sig.leq(&b("s_2"), &b("q")).unwrap());
        assert!(!sig.leq(&b("π"), &b("n")).unwrap());
        assert_eq!(
            sig.leq(&b("zz"), &b("π")),
            Err(SignatureError::UnknownBase("zz".into()))
        );
    }

    #[test]
    fn contraction_examples() {
        let sig = GrammarSignature::japanese();
        let t = |s: &str| SimpleType::from(s);
        assert!(sig.contracts(&t("n"), &t("π^r")));
        assert!(sig.contracts(&t("s^l"), &t("s_2")));
        assert!(!sig.contracts(&t("c_1"), &t("c_4^r")));
        assert!(!sig.contracts(&t("n^r"), &t("n")));
        assert!(!sig.contracts(&t("π"), &t("n^r")));
        // second adjoints: z = 1 is odd so the order flips back
        assert!(sig.contracts(&t("π^r"), &t("n^rr")));
        assert!(!sig.contracts(&t("n^r"), &t("π^rr")));
    }

    #[test]
    fn interfaces_examples() {
        let sig = GrammarSignature::japanese();
        let set = |names: &[&str]| names.iter().map(|s| b(s)).collect::<BTreeSet<_>>();
        assert_eq!(
            sig.interfaces(&b("n")).unwrap(),
            set(&["n", "n\u{304}", "π"])
        );
        assert_eq!(sig.interfaces(&b("q")).unwrap(), set(&["q"]));
        assert_eq!(
            sig.interfaces(&b("a_v")).unwrap(),
            set(&["a_v", "a", "s_1", "s", "q"])
        );
        assert!(sig.interfaces(&b("?")).is_err());
    }

    #[test]
    fn signature_rejects_cycles_and_duplicates() {
        let cyc = GrammarSignature::new(["x", "y"], [(b("x"), b("y")), (b("y"), b("x"))]);
        assert!(matches!(cyc, Err(SignatureError::Cycle(..))));
        let dup = GrammarSignature::new(["x", "x"], std::iter::empty());
        assert!(matches!(dup, Err(SignatureError::DuplicateBase(_))));
        let unk = GrammarSignature::new(["x"], [(b("x"), b("w"))]);
        assert!(matches!(unk, Err(SignatureError::UnknownBase(_))));
    }

    #[test]
    fn type_syntax() {
        let ts: TypeString = "π^r · s\u{304} · s^l".parse().unwrap();
        assert_eq!(ts.to_string(), "π^r·s\u{304}·s^l");
        assert_eq!(SimpleType::from("sbar"), SimpleType::base("s\u{304}"));
        assert_eq!(SimpleType::from("n^ll").z, -2);
        assert!("n^rl".parse::<SimpleType>().is_err());
        assert_eq!(TypeString::unit().to_string(), "1");
    }

    #[test]
    fn japanese_components() {
        let comps = GrammarSignature::japanese().components();
        assert_eq!(comps[&b("n")], comps[&b("π")]);
        assert_eq!(comps[&b("a_n")], comps[&b("s")]);
        assert_ne!(comps[&b("c_1")], comps[&b("c_4")]);
        assert_ne!(comps[&b("α")], comps[&b("q")]);
    }
}
