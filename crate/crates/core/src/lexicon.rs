//! Token → type-assignment lexicon, loaded from JSON.
//!
//! A [`LexEntry`] carries one [`Usage`] per grammatical usage of the token.
//! Files hold the grammar signature too, so a lexicon is self-contained.

use crate::pregroup::{BaseSymbol, GrammarSignature, SignatureError, TypeString};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Current version of the lexicon file layout.
pub const LEXICON_SCHEMA_VERSION: u32 = 1;

/// The bundled Japanese lexicon, as shipped in `data/jp-core.json`.
pub const JP_CORE_JSON: &str = include_str!("../data/jp-core.json");
/// The bundled English SVO demo lexicon.
pub const EN_DEMO_JSON: &str = include_str!("../data/en-demo.json");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid signature: {0}")]
    Signature(#[from] SignatureError),
    #[error("entry `{entry}`: {reason}")]
    Validation { entry: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Noun,
    Particle,
    VerbSelfMove,
    VerbOtherMove,
    Adjective,
    AdjectivalNoun,
    Adverb,
    Copula,
    Interjection,
}

impl Category {
    pub fn is_verb(self) -> bool {
        matches!(self, Category::VerbSelfMove | Category::VerbOtherMove)
    }

    /// Categories whose sentence-final usages carry the sentence type.
    pub fn is_predicate(self) -> bool {
        self.is_verb() || self == Category::Copula
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("category serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

/// One grammatical usage of a token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Usage {
    pub label: String,
    pub category: Category,
    pub assignment: TypeString,
}

impl Usage {
    /// Usages ending in a left adjoint modify the word that follows them
    /// (`n·n^l` noun modifiers, relative-clause verbs).
    pub fn is_prenominal(&self) -> bool {
        self.assignment.iter().last().is_some_and(|t| t.z < 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub surface: String,
    pub reading: String,
    pub gloss: String,
    pub usages: Vec<Usage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SignatureFile {
    bases: Vec<BaseSymbol>,
    order: Vec<(BaseSymbol, BaseSymbol)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct LexiconFile {
    #[serde(default = "default_schema_version")]
    schema_version: u32,
    signature: SignatureFile,
    entries: Vec<LexEntry>,
}

fn default_schema_version() -> u32 {
    LEXICON_SCHEMA_VERSION
}

/// A validated, immutable lexicon.
#[derive(Debug, Clone)]
pub struct Lexicon {
    signature: GrammarSignature,
    entries: Vec<LexEntry>,
    by_surface: BTreeMap<String, Vec<usize>>,
    by_reading: BTreeMap<String, Vec<usize>>,
}

impl Lexicon {
    pub fn new(signature: GrammarSignature, entries: Vec<LexEntry>) -> Result<Self, LexiconError> {
        let predicate_target = BaseSymbol::from("q");
        let check_predicates = signature.contains(&predicate_target);
        let mut seen = BTreeSet::new();
        for e in &entries {
            let invalid = |reason: String| LexiconError::Validation {
                entry: e.surface.clone(),
                reason,
            };
            if e.surface.is_empty() {
                return Err(invalid("surface must not be empty".into()));
            }
            if e.usages.is_empty() {
                return Err(invalid("at least one usage is required".into()));
            }
            for u in &e.usages {
                if !seen.insert((e.surface.clone(), u.label.clone())) {
                    return Err(invalid(format!("duplicate usage label `{}`", u.label)));
                }
                if u.assignment.is_empty() {
                    return Err(invalid(format!(
                        "usage `{}` has an empty assignment",
                        u.label
                    )));
                }
                if let Some(t) = u.assignment.iter().find(|t| !signature.contains(&t.base)) {
                    return Err(invalid(format!(
                        "usage `{}` uses base `{}` missing from the signature",
                        u.label, t.base
                    )));
                }
                if u.category == Category::Particle && u.assignment[0].z != 1 {
                    return Err(invalid("particle must open with a right adjoint".into()));
                }
                if check_predicates && u.category.is_predicate() && !u.is_prenominal() {
                    let last = u.assignment.iter().last().expect("non-empty");
                    let ok = last.z == 0 && signature.leq(&last.base, &predicate_target)?;
                    if !ok {
                        return Err(invalid(format!(
                            "predicate usage `{}` must end with a sentence type, found `{}`",
                            u.label, last
                        )));
                    }
                }
            }
        }
        let mut by_surface: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut by_reading: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_surface.entry(e.surface.clone()).or_default().push(i);
            by_reading.entry(e.reading.clone()).or_default().push(i);
        }
        Ok(Lexicon {
            signature,
            entries,
            by_surface,
            by_reading,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = serde_json::from_str(text).map_err(|e| LexiconError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let signature = GrammarSignature::new(file.signature.bases, file.signature.order)?;
        Self::new(signature, file.entries)
    }

    /// Pretty JSON with a trailing newline; the bundled files are stored in
    /// exactly this form.
    pub fn to_json(&self) -> String {
        let file = LexiconFile {
            schema_version: LEXICON_SCHEMA_VERSION,
            signature: SignatureFile {
                bases: self.signature.bases().to_vec(),
                order: self.signature.postulates().to_vec(),
            },
            entries: self.entries.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("lexicon serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn jp_core() -> Self {
        Self::from_json(JP_CORE_JSON).expect("bundled jp-core lexicon is valid")
    }

    pub fn en_demo() -> Self {
        Self::from_json(EN_DEMO_JSON).expect("bundled en-demo lexicon is valid")
    }

    pub fn signature(&self) -> &GrammarSignature {
        &self.signature
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries whose surface form is `token`; failing that, entries whose
    /// romaji reading is `token`.
    pub fn lookup(&self, token: &str) -> Vec<&LexEntry> {
        let hits = self
            .by_surface
            .get(token)
            .or_else(|| self.by_reading.get(token));
        hits.map(|ix| ix.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    /// Whether any entry for `token` has the given surface form.
    pub fn token_is(&self, token: &str, surface: &str) -> bool {
        self.lookup(token).iter().any(|e| e.surface == surface)
    }

    /// Whether any usage of `token` has the given category.
    pub fn token_has_category(&self, token: &str, category: Category) -> bool {
        self.lookup(token)
            .iter()
            .any(|e| e.usages.iter().any(|u| u.category == category))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> TypeString {
        TypeString::from(s)
    }

    #[test]
    fn bundled_lexicons_load() {
        let jp = Lexicon::jp_core();
        assert!(jp.len() >= 20);
        let en = Lexicon::en_demo();
        assert!(!en.is_empty());
    }

    #[test]
    fn lookup_examples() {
        let lex = Lexicon::jp_core();
        let ga = lex.lookup("が");
        assert_eq!(ga.len(), 1);
        assert_eq!(ga[0].usages[0].assignment, ts("π^r c_1"));
        let ha = lex.lookup("は");
        assert_eq!(ha[0].usages[0].assignment, ts("π^r s\u{304} s^l"));
        assert!(lex.lookup("xyzzy").is_empty());
        // reading fallback
        assert_eq!(lex.lookup("ga")[0].surface, "が");
        assert_eq!(lex.lookup("kare").len(), 2);
    }

    #[test]
    fn particle_must_open_with_right_adjoint() {
        let text = r#"{"signature":{"bases":["c_1"],"order":[]},
            "entries":[{"surface":"が","reading":"ga","gloss":"","usages":[
              {"label":"x","category":"particle","assignment":[{"base":"c_1","z":0}]}]}]}"#;
        let err = Lexicon::from_json(text).unwrap_err();
        assert!(
            err.to_string()
                .contains("particle must open with a right adjoint"),
            "{err}"
        );
    }

    #[test]
    fn empty_entries_are_valid() {
        let lex =
            Lexicon::from_json(r#"{"signature":{"bases":["n"],"order":[]},"entries":[]}"#).unwrap();
        assert!(lex.is_empty());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let text = r#"{"signature":{"bases":["n"],"order":[]},
            "entries":[
              {"surface":"x","reading":"x","gloss":"","usages":[{"label":"a","category":"noun","assignment":[{"base":"n","z":0}]}]},
              {"surface":"x","reading":"x","gloss":"","usages":[{"label":"a","category":"noun","assignment":[{"base":"n","z":0}]}]}]}"#;
        let err = Lexicon::from_json(text).unwrap_err();
        assert!(err.to_string().contains("duplicate usage label"), "{err}");
    }

    #[test]
    fn unknown_base_rejected() {
        let text = r#"{"signature":{"bases":["n"],"order":[]},
            "entries":[{"surface":"x","reading":"x","gloss":"","usages":[{"label":"a","category":"noun","assignment":[{"base":"m","z":0}]}]}]}"#;
        let err = Lexicon::from_json(text).unwrap_err();
        assert!(
            err.to_string().contains("missing from the signature"),
            "{err}"
        );
    }

    #[test]
    fn verb_must_end_in_sentence_type() {
        let text = r#"{"signature":{"bases":["c_1","s","q"],"order":[["s","q"]]},
            "entries":[{"surface":"x","reading":"x","gloss":"","usages":[{"label":"a","category":"verb-self-move","assignment":[{"base":"s","z":0},{"base":"c_1","z":1}]}]}]}"#;
        let err = Lexicon::from_json(text).unwrap_err();
        assert!(
            err.to_string().contains("must end with a sentence type"),
            "{err}"
        );
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = Lexicon::from_json("{\n  \"signature\": [,\n}").unwrap_err();
        match err {
            LexiconError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            Lexicon::load("/nonexistent/lexicon.json"),
            Err(LexiconError::Io { .. })
        ));
    }
}
