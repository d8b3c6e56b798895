//! Sentence analysis: usage selection, normalization, reduction and roles.
//!
//! Sentences arrive pre-segmented. [`analyze`] tries every combination of
//! token usages, keeps the reductions that leave a single sentence-family
//! type and ranks them by how many links jump over more than one token.

use crate::lexicon::{Category, Lexicon, Usage};
use crate::pregroup::{grammatical_reductions, BaseSymbol, Reduction, SimpleType, TypeString};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

pub const TOPIC_PARTICLE: &str = "は";
pub const SUBJECT_PARTICLE: &str = "が";
pub const COPULA: &str = "だ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown token `{token}` at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error("empty sentence")]
    EmptySentence,
    #[error("ambiguous {role}: candidates {candidates:?}")]
    Ambiguous {
        role: String,
        candidates: Vec<String>,
    },
    #[error("parse is not grammatical")]
    NotGrammatical,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Sentence {
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Sentence {
            tokens: tokens.into_iter().map(Into::into).collect(),
        }
    }

    /// Whitespace-separated tokens.
    pub fn from_line(line: &str) -> Self {
        Self::new(line.split_whitespace())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOptions {
    /// Defaults to `q` when the signature has it, else `s`.
    pub target: Option<BaseSymbol>,
    pub insert_copula: bool,
    pub insert_topic: bool,
    /// Topic carried over from earlier discourse, used by `insert_topic`.
    pub carried_topic: Option<String>,
    pub max_combinations: usize,
    pub max_parses: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            target: None,
            insert_copula: false,
            insert_topic: false,
            carried_topic: None,
            max_combinations: 4096,
            max_parses: 64,
        }
    }
}

impl ParseOptions {
    pub fn resolve_target(&self, lex: &Lexicon) -> BaseSymbol {
        if let Some(t) = &self.target {
            return t.clone();
        }
        let q = BaseSymbol::from("q");
        if lex.signature().contains(&q) {
            q
        } else {
            BaseSymbol::from("s")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InsertionKind {
    Copula,
    Topic,
    SubjectMarker,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Insertion {
    /// Position in the normalized sentence.
    pub position: usize,
    pub token: String,
    pub kind: InsertionKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NormalizationReport {
    pub insertions: Vec<Insertion>,
}

impl NormalizationReport {
    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
    }
}

/// Applies the enabled insertion passes. Unknown tokens never trigger them.
pub fn normalize(
    lex: &Lexicon,
    s: &Sentence,
    opts: &ParseOptions,
) -> (Sentence, NormalizationReport) {
    let mut tokens = s.tokens.clone();
    let mut report = NormalizationReport::default();
    if opts.insert_topic {
        if let Some(topic) = &opts.carried_topic {
            let has_marker = tokens
                .iter()
                .any(|t| lex.token_is(t, TOPIC_PARTICLE) || lex.token_is(t, SUBJECT_PARTICLE));
            if !has_marker && !tokens.is_empty() {
                tokens.insert(0, SUBJECT_PARTICLE.to_string());
                tokens.insert(0, topic.clone());
                report.insertions.push(Insertion {
                    position: 0,
                    token: topic.clone(),
                    kind: InsertionKind::Topic,
                });
                report.insertions.push(Insertion {
                    position: 1,
                    token: SUBJECT_PARTICLE.to_string(),
                    kind: InsertionKind::SubjectMarker,
                });
            }
        }
    }
    if opts.insert_copula {
        if let Some(last) = tokens.last() {
            if lex.token_has_category(last, Category::AdjectivalNoun) {
                tokens.push(COPULA.to_string());
                report.insertions.push(Insertion {
                    position: tokens.len() - 1,
                    token: COPULA.to_string(),
                    kind: InsertionKind::Copula,
                });
            }
        }
    }
    (Sentence { tokens }, report)
}

/// The usage chosen for one token, with the entry it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChosenUsage {
    pub token: String,
    pub surface: String,
    pub reading: String,
    pub usage: Usage,
}

/// A grammatical reading of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Parse {
    pub token_usages: Vec<ChosenUsage>,
    pub concatenated: TypeString,
    /// Token index owning each simple type of `concatenated`.
    pub owners: Vec<usize>,
    pub reduction: Reduction,
    pub residue_type: SimpleType,
    pub topical: bool,
}

/// How a link sits relative to the token sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// Between simple types of the same or neighbouring tokens.
    Adjacent,
    /// From the topic particle's left adjoint to the engine.
    TopicToEngine,
    /// A prenominal `n` skipping over its head noun to the next particle.
    ModifierSkip,
    /// A case complement reaching its predicate over intervening arguments
    /// and adverbs.
    CaseFrame,
    Other,
}

impl Parse {
    pub fn len(&self) -> usize {
        self.token_usages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_usages.is_empty()
    }

    pub fn residue_index(&self) -> usize {
        self.reduction.residue[0]
    }

    pub fn residue_owner(&self) -> usize {
        self.owners[self.residue_index()]
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.reduction.links.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Range of `concatenated` owned by `token`.
    pub fn type_range(&self, token: usize) -> std::ops::Range<usize> {
        let start = self.owners.iter().position(|&o| o == token).unwrap_or(0);
        let len = self.token_usages[token].usage.assignment.len();
        start..start + len
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.token_usages.iter().map(|c| c.token.as_str()).collect()
    }

    /// Links whose endpoints belong to tokens more than one position apart.
    pub fn long_links(&self) -> usize {
        self.reduction
            .links
            .iter()
            .filter(|&&(i, j)| self.owners[j] - self.owners[i] > 1)
            .count()
    }

    fn topic_particle(&self) -> Option<usize> {
        let sbar = BaseSymbol::from("s\u{304}");
        self.token_usages.iter().position(|c| {
            c.usage.category == Category::Particle
                && c.usage
                    .assignment
                    .iter()
                    .any(|t| t.base == sbar && t.z == 0)
        })
    }

    pub fn link_kind(&self, (i, j): (usize, usize)) -> LinkKind {
        let (ti, tj) = (self.owners[i], self.owners[j]);
        if tj - ti <= 1 {
            return LinkKind::Adjacent;
        }
        let left = &self.concatenated[i];
        let right = &self.concatenated[j];
        if Some(ti) == self.topic_particle() && left.z < 0 {
            return LinkKind::TopicToEngine;
        }
        let left_usage = &self.token_usages[ti].usage;
        if left.z == 0 && left_usage.is_prenominal() && tj - ti == 2 {
            let next = i + 1;
            if next < self.concatenated.len()
                && self.owners[next] == ti
                && self.partner(next).map(|p| self.owners[p]) == Some(ti + 1)
                && self.token_usages[tj].usage.category == Category::Particle
            {
                return LinkKind::ModifierSkip;
            }
        }
        let is_case = left.base.as_str().starts_with("c_")
            && self.token_usages[ti].usage.category == Category::Particle
            && right.z == 1;
        if is_case {
            // everything strictly between is linked inside the span
            let inside = (i + 1..j).all(|k| self.partner(k).is_some_and(|p| p > i && p < j));
            if inside {
                return LinkKind::CaseFrame;
            }
        }
        LinkKind::Other
    }
}

/// Result of [`analyze`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Analysis {
    pub sentence: Sentence,
    pub report: NormalizationReport,
    pub parses: Vec<Parse>,
    /// Some combination or reduction enumeration hit its cap.
    pub truncated: bool,
}

fn candidate_usages<'a>(lex: &'a Lexicon, token: &str) -> Vec<(&'a str, &'a str, &'a Usage)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in lex.lookup(token) {
        for u in &e.usages {
            if seen.insert((u.label.as_str(), u.category, &u.assignment)) {
                out.push((e.surface.as_str(), e.reading.as_str(), u));
            }
        }
    }
    out
}

/// All grammatical parses of `s`, best first.
pub fn analyze(lex: &Lexicon, s: &Sentence, opts: &ParseOptions) -> Result<Analysis, ParseError> {
    for (position, token) in s.tokens.iter().enumerate() {
        if lex.lookup(token).is_empty() {
            return Err(ParseError::UnknownToken {
                token: token.clone(),
                position,
            });
        }
    }
    let (sentence, report) = normalize(lex, s, opts);
    if sentence.is_empty() {
        return Err(ParseError::EmptySentence);
    }
    let candidates: Vec<_> = sentence
        .tokens
        .iter()
        .enumerate()
        .map(|(position, t)| {
            let c = candidate_usages(lex, t);
            if c.is_empty() {
                Err(ParseError::UnknownToken {
                    token: t.clone(),
                    position,
                })
            } else {
                Ok(c)
            }
        })
        .collect::<Result<_, _>>()?;
    let target = opts.resolve_target(lex);
    let sig = lex.signature();

    let mut truncated = false;
    let mut ranked: Vec<(usize, Vec<usize>, Parse)> = Vec::new();
    let mut choice = vec![0usize; candidates.len()];
    let mut combinations = 0usize;
    loop {
        if combinations >= opts.max_combinations {
            truncated = true;
            break;
        }
        combinations += 1;

        let mut token_usages = Vec::with_capacity(choice.len());
        let mut types = Vec::new();
        let mut owners = Vec::new();
        for (t, &c) in choice.iter().enumerate() {
            let (surface, reading, usage) = candidates[t][c];
            token_usages.push(ChosenUsage {
                token: sentence.tokens[t].clone(),
                surface: surface.to_string(),
                reading: reading.to_string(),
                usage: usage.clone(),
            });
            for ty in usage.assignment.iter() {
                types.push(ty.clone());
                owners.push(t);
            }
        }
        let concatenated = TypeString(types);
        let set = grammatical_reductions(sig, &concatenated, &target, opts.max_parses);
        truncated |= set.truncated;
        let sbar = BaseSymbol::from("s\u{304}");
        let topical = token_usages
            .iter()
            .any(|c| c.usage.assignment.iter().any(|t| t.base == sbar));
        for reduction in set.reductions {
            let residue_type = concatenated[reduction.residue[0]].clone();
            let parse = Parse {
                token_usages: token_usages.clone(),
                concatenated: concatenated.clone(),
                owners: owners.clone(),
                reduction,
                residue_type,
                topical,
            };
            ranked.push((parse.long_links(), choice.clone(), parse));
        }

        // odometer over usage choices
        let mut exhausted = true;
        for k in (0..choice.len()).rev() {
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                exhausted = false;
                break;
            }
            choice[k] = 0;
        }
        if exhausted {
            break;
        }
    }
    ranked
        .sort_by(|a, b| (a.0, &a.1, &a.2.reduction.links).cmp(&(b.0, &b.1, &b.2.reduction.links)));
    if ranked.len() > opts.max_parses {
        truncated = true;
        ranked.truncate(opts.max_parses);
    }
    Ok(Analysis {
        sentence,
        report,
        parses: ranked.into_iter().map(|(_, _, p)| p).collect(),
        truncated,
    })
}

/// Grammatical role a noun plays for a predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    Subject,
    Object,
    /// Any other complement, named by its base (`c_3`, ...).
    Oblique(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub predicate: usize,
    pub case: Case,
    pub noun: usize,
}

/// Who does what in a parse, by token index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleFrame {
    pub topic: Option<usize>,
    pub subject: Option<usize>,
    pub objects: Vec<usize>,
    /// The sentence-final mover; for topical sentences the word the topic
    /// particle's left adjoint reaches.
    pub engine: usize,
    pub adverbs: Vec<usize>,
    /// Word feeding a copula (the adjectival noun under `だ`).
    pub complement: Option<usize>,
    pub relations: Vec<Relation>,
    /// `(modifier, head)` pairs for prenominal words.
    pub modifiers: Vec<(usize, usize)>,
}

impl Parse {
    /// Follows a prenominal `n·n^l` onto the noun it modifies.
    fn head_noun(&self, token: usize, type_index: usize) -> usize {
        let next = type_index + 1;
        if next < self.concatenated.len()
            && self.owners[next] == token
            && self.concatenated[next].z < 0
        {
            if let Some(p) = self.partner(next) {
                if self.owners[p] != token {
                    return self.head_noun(self.owners[p], p);
                }
            }
        }
        token
    }

    /// Noun phrase a particle attaches to, through its opening right adjoint.
    fn particle_noun(&self, particle: usize) -> Option<usize> {
        let first = self.type_range(particle).start;
        self.partner(first)
            .map(|p| self.head_noun(self.owners[p], p))
    }

    /// Extracts the role frame. Fails on an ungrammatical witness or when a
    /// predicate receives two subjects.
    pub fn extract_roles(&self) -> Result<RoleFrame, ParseError> {
        if self.reduction.residue.len() != 1 {
            return Err(ParseError::NotGrammatical);
        }
        let topic_particle = self.topic_particle();
        let topic = topic_particle.and_then(|t| self.particle_noun(t));
        let owner = self.residue_owner();
        let mut engine = owner;
        if Some(owner) == topic_particle {
            let range = self.type_range(owner);
            if let Some(p) = range
                .filter(|&i| self.concatenated[i].z < 0)
                .find_map(|i| self.partner(i))
            {
                engine = self.owners[p];
            }
        }

        let mut relations = Vec::new();
        let mut adverbs = BTreeSet::new();
        let mut complement = None;
        for (t, chosen) in self.token_usages.iter().enumerate() {
            let u = &chosen.usage;
            if u.assignment
                .iter()
                .all(|ty| ty.base.as_str() == "α" && ty.z == 0)
            {
                adverbs.insert(t);
            }
            if !u.category.is_predicate() {
                continue;
            }
            for i in self.type_range(t) {
                if self.concatenated[i].z != 1 {
                    continue;
                }
                let Some(p) = self.partner(i) else { continue };
                let from = self.owners[p];
                let from_usage = &self.token_usages[from].usage;
                let base = self.concatenated[p].base.as_str();
                if from_usage.category == Category::Particle && base.starts_with("c_") {
                    let case = match base {
                        "c_1" => Case::Subject,
                        "c_4" => Case::Object,
                        other => Case::Oblique(other.to_string()),
                    };
                    if let Some(noun) = self.particle_noun(from) {
                        relations.push(Relation {
                            predicate: t,
                            case,
                            noun,
                        });
                    }
                } else if u.category == Category::Copula && from_usage.category != Category::Adverb
                {
                    complement = Some(from);
                }
            }
        }

        let engine_subjects: Vec<usize> = relations
            .iter()
            .filter(|r| r.predicate == engine && r.case == Case::Subject)
            .map(|r| r.noun)
            .collect();
        if engine_subjects.len() > 1 {
            return Err(ParseError::Ambiguous {
                role: "subject".into(),
                candidates: engine_subjects
                    .iter()
                    .map(|&i| self.token_usages[i].token.clone())
                    .collect(),
            });
        }
        let has_subject_marker = relations.iter().any(|r| r.case == Case::Subject);
        let subject =
            engine_subjects
                .first()
                .copied()
                .or(if has_subject_marker { None } else { topic });
        let mut objects: Vec<usize> = relations
            .iter()
            .filter(|r| r.case == Case::Object)
            .map(|r| r.noun)
            .collect();
        objects.sort_unstable();
        objects.dedup();

        let mut modifiers = Vec::new();
        for (t, chosen) in self.token_usages.iter().enumerate() {
            if !chosen.usage.is_prenominal() || chosen.usage.category == Category::Particle {
                continue;
            }
            let range = self.type_range(t);
            let last = range.end - 1;
            if let Some(p) = self.partner(last) {
                modifiers.push((t, self.head_noun(self.owners[p], p)));
            }
        }

        Ok(RoleFrame {
            topic,
            subject,
            objects,
            engine,
            adverbs: adverbs.into_iter().collect(),
            complement,
            relations,
            modifiers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(s: &str) -> Sentence {
        Sentence::from_line(s)
    }

    fn parses(s: &str) -> Vec<Parse> {
        analyze(&Lexicon::jp_core(), &sent(s), &ParseOptions::default())
            .unwrap()
            .parses
    }

    #[test]
    fn self_move_sentence() {
        let p = parses("彼 が 走った");
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].residue_type, SimpleType::from("s_2"));
        assert_eq!(p[0].reduction.links, vec![(0, 1), (2, 3)]);
        assert!(!p[0].topical);
    }

    #[test]
    fn other_move_sentence() {
        let p = parses("私 が 猫 を 渡す");
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].residue_type, SimpleType::from("s_1"));
    }

    #[test]
    fn engine_not_final_is_rejected() {
        assert!(parses("走った 彼 が").is_empty());
    }

    #[test]
    fn unknown_token_is_named() {
        let err = analyze(
            &Lexicon::jp_core(),
            &sent("彼 が よ"),
            &ParseOptions::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownToken {
                token: "よ".into(),
                position: 2
            }
        );
    }

    #[test]
    fn romaji_readings_are_accepted() {
        let p = parses("kare ga hashitta");
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].token_usages[0].surface, "彼");
    }

    #[test]
    fn copula_insertion() {
        let lex = Lexicon::jp_core();
        let opts = ParseOptions {
            insert_copula: true,
            ..Default::default()
        };
        let (s, report) = normalize(&lex, &sent("オレンジ 色 が 好き"), &opts);
        assert_eq!(s.tokens, vec!["オレンジ", "色", "が", "好き", "だ"]);
        assert_eq!(report.insertions.len(), 1);
        assert_eq!(report.insertions[0].kind, InsertionKind::Copula);
        let (again, r2) = normalize(&lex, &s, &opts);
        assert_eq!(again, s);
        assert!(r2.is_empty());
    }

    #[test]
    fn topic_insertion() {
        let lex = Lexicon::jp_core();
        let opts = ParseOptions {
            insert_topic: true,
            carried_topic: Some("彼".into()),
            ..Default::default()
        };
        let (s, report) = normalize(&lex, &sent("走った"), &opts);
        assert_eq!(s.tokens, vec!["彼", "が", "走った"]);
        assert_eq!(report.insertions.len(), 2);
        let a = analyze(&lex, &sent("走った"), &opts).unwrap();
        assert_eq!(a.parses[0].reduction.links, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn complete_sentence_unchanged() {
        let lex = Lexicon::jp_core();
        let opts = ParseOptions {
            insert_copula: true,
            insert_topic: true,
            carried_topic: Some("彼".into()),
            ..Default::default()
        };
        let (s, report) = normalize(&lex, &sent("彼 が 走った"), &opts);
        assert_eq!(s, sent("彼 が 走った"));
        assert!(report.is_empty());
    }

    #[test]
    fn roles_self_move() {
        let p = &parses("彼 が 走った")[0];
        let r = p.extract_roles().unwrap();
        assert_eq!(r.subject, Some(0));
        assert_eq!(r.engine, 2);
        assert_eq!(r.topic, None);
    }

    #[test]
    fn roles_topical_adverb() {
        let p = &parses("それ は もう 決まった")[0];
        let r = p.extract_roles().unwrap();
        assert_eq!(r.topic, Some(0));
        assert_eq!(r.adverbs, vec![2]);
        assert_eq!(r.engine, 3);
        assert_eq!(r.subject, Some(0));
    }

    #[test]
    fn roles_relative_clause() {
        let p = &parses("かれ は 薬 を 付ける こと を 決めた")[0];
        let r = p.extract_roles().unwrap();
        assert_eq!(r.topic, Some(0));
        assert_eq!(r.objects, vec![2, 5]);
        assert_eq!(r.engine, 7);
        assert_eq!(r.modifiers, vec![(4, 5)]);
    }

    #[test]
    fn roles_predicate_adjective() {
        let p = &parses("私 は オレンジ 色 が 好き だ")[0];
        let r = p.extract_roles().unwrap();
        assert_eq!(r.topic, Some(0));
        assert_eq!(r.subject, Some(3));
        assert_eq!(r.engine, 6);
        assert_eq!(r.complement, Some(5));
        assert_eq!(r.modifiers, vec![(2, 3)]);
    }

    #[test]
    fn two_subjects_are_ambiguous() {
        // a verb demanding two nominative complements
        let text = r#"{"signature":{"bases":["π","c_1","s","q"],"order":[["s","q"]]},
          "entries":[
            {"surface":"A","reading":"a","gloss":"","usages":[{"label":"n","category":"noun","assignment":[{"base":"π","z":0}]}]},
            {"surface":"B","reading":"b","gloss":"","usages":[{"label":"n","category":"noun","assignment":[{"base":"π","z":0}]}]},
            {"surface":"が","reading":"ga","gloss":"","usages":[{"label":"subj","category":"particle","assignment":[{"base":"π","z":1},{"base":"c_1","z":0}]}]},
            {"surface":"V","reading":"v","gloss":"","usages":[{"label":"v","category":"verb-self-move","assignment":[{"base":"c_1","z":1},{"base":"c_1","z":1},{"base":"s","z":0}]}]}]}"#;
        let lex = Lexicon::from_json(text).unwrap();
        let a = analyze(&lex, &sent("A が B が V"), &ParseOptions::default()).unwrap();
        assert_eq!(a.parses.len(), 1);
        assert!(matches!(
            a.parses[0].extract_roles(),
            Err(ParseError::Ambiguous { .. })
        ));
    }

    #[test]
    fn analysis_is_deterministic() {
        let lex = Lexicon::jp_core();
        let s = sent("私 は オレンジ 色 が 好き だ");
        let a = analyze(&lex, &s, &ParseOptions::default()).unwrap();
        let b = analyze(&lex, &s, &ParseOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
