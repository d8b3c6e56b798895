#![allow(dead_code)]

pub mod diagrams;
pub mod strings;

use disco_jp::lexicon::Lexicon;
use disco_jp::parser::{analyze, Parse, ParseOptions, Sentence};
use disco_jp::pregroup::{oracle_reduce, BaseSymbol, TypeString};

/// Example sentences with their expected residue and whether they are
/// topical.
pub const FIXTURES: &[(&str, &str, bool)] = &[
    ("かれ が 走った", "s_2", false),
    ("猫 が 渡る", "s_1", false),
    ("私 が 猫 を 渡す", "s_1", false),
    ("私 は オレンジ 色 が 好き だ", "s\u{304}", true),
    ("それ は もう 決まった", "s\u{304}", true),
    ("それ が もう 決まった", "s_2", false),
    ("かれ は 薬 を 付ける こと を 決めた", "s\u{304}", true),
];

/// The two fixtures built around a prenominal `n·n^l` modifier.
pub const SANDWICH_FIXTURES: &[&str] = &[
    "私 は オレンジ 色 が 好き だ",
    "かれ は 薬 を 付ける こと を 決めた",
];

pub fn parses(lex: &Lexicon, line: &str) -> Vec<Parse> {
    analyze(lex, &Sentence::from_line(line), &ParseOptions::default())
        .unwrap()
        .parses
}

/// Grammaticality decided by brute force: some combination of usages has
/// an exhaustively enumerated reduction leaving one unadjoined type below
/// the target.
pub fn oracle_grammatical(lex: &Lexicon, tokens: &[&str], target: &BaseSymbol) -> bool {
    let sig = lex.signature();
    let options: Vec<Vec<TypeString>> = tokens
        .iter()
        .map(|t| {
            lex.lookup(t)
                .iter()
                .flat_map(|e| e.usages.iter().map(|u| u.assignment.clone()))
                .collect()
        })
        .collect();
    let mut combos: Vec<TypeString> = vec![TypeString::unit()];
    for opts in &options {
        combos = combos
            .iter()
            .flat_map(|prefix| opts.iter().map(move |a| prefix.concat(a)))
            .collect();
    }
    combos.iter().any(|ts| {
        oracle_reduce(sig, ts).unwrap().iter().any(|r| {
            r.residue.len() == 1 && {
                let x = &ts[r.residue[0]];
                x.z == 0 && sig.leq(&x.base, target).unwrap()
            }
        })
    })
}

pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}
