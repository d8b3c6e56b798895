//! Interval dynamic program over a type string.
//!
//! A link `(i, j)` is licensed when `ts[i] · ts[j]` contracts and every
//! position strictly between them is itself linked inside `(i, j)`; this is
//! contraction of adjacent types repeated to a fixed point, so links are
//! non-crossing and never enclose residue. `full[i][j]` counts the perfect
//! matchings of the half-open interval `[i, j)`; every enumeration below is
//! driven by those counts.

use super::{BaseSymbol, GrammarSignature, TypeString};
use serde::Serialize;
use std::collections::HashMap;
use std::rc::Rc;

/// Enumeration cap used when callers do not supply one.
pub const DEFAULT_REDUCTION_CAP: usize = 10_000;

pub type Link = (usize, usize);

/// A reduction witness: a set of contraction links plus the unlinked residue.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Reduction {
    /// Sorted ascending.
    pub links: Vec<Link>,
    /// Unlinked positions in original order.
    pub residue: Vec<usize>,
}

impl Reduction {
    /// Builds a reduction over a string of `len` types from its links.
    pub fn from_links(len: usize, mut links: Vec<Link>) -> Self {
        links.sort_unstable();
        let mut linked = vec![false; len];
        for &(i, j) in &links {
            linked[i] = true;
            linked[j] = true;
        }
        let residue = (0..len).filter(|&i| !linked[i]).collect();
        Reduction { links, residue }
    }

    pub fn residue_types(&self, ts: &TypeString) -> TypeString {
        self.residue.iter().map(|&i| ts[i].clone()).collect()
    }

    /// Sum of `j - i` over all links.
    pub fn span_sum(&self) -> usize {
        self.links.iter().map(|&(i, j)| j - i).sum()
    }

    /// Re-checks every structural condition on this witness against `ts`.
    pub fn verify(&self, sig: &GrammarSignature, ts: &TypeString) -> Result<(), String> {
        let n = ts.len();
        let mut partner = vec![None; n];
        for &(i, j) in &self.links {
            if !(i < j && j < n) {
                return Err(format!("link ({i}, {j}) out of range"));
            }
            if partner[i].is_some() || partner[j].is_some() {
                return Err(format!("link ({i}, {j}) reuses an index"));
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
            if !sig.contracts(&ts[i], &ts[j]) {
                return Err(format!("{} · {} does not contract", ts[i], ts[j]));
            }
        }
        for &(i, j) in &self.links {
            for k in (i + 1)..j {
                match partner[k] {
                    None => return Err(format!("link ({i}, {j}) encloses residue {k}")),
                    Some(p) if p < i || p > j => {
                        return Err(format!("link ({i}, {j}) crosses a link at {k}"))
                    }
                    _ => {}
                }
            }
        }
        let expected: Vec<usize> = (0..n).filter(|&i| partner[i].is_none()).collect();
        if expected != self.residue {
            return Err("residue does not match the unlinked positions".into());
        }
        for w in self.residue.windows(2) {
            if sig.contracts(&ts[w[0]], &ts[w[1]]) {
                return Err(format!("residue {} · {} still contracts", w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// The outcome of an enumeration, never silently truncated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionSet {
    /// Sorted lexicographically by link set.
    pub reductions: Vec<Reduction>,
    /// Exact number of reductions that exist (saturating).
    pub total: u128,
    /// `true` when `total` exceeds the enumeration cap.
    pub truncated: bool,
}

/// Result of a grammaticality check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grammaticality {
    pub grammatical: bool,
    pub witness: Option<Reduction>,
}

type Matchings = Rc<Vec<Vec<Link>>>;

struct Table {
    n: usize,
    contract: Vec<Vec<bool>>,
    full: Vec<Vec<u128>>,
    memo: HashMap<(usize, usize), Matchings>,
}

impl Table {
    fn new(sig: &GrammarSignature, ts: &TypeString) -> Self {
        let n = ts.len();
        let contract: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| i < j && sig.contracts(&ts[i], &ts[j]))
                    .collect()
            })
            .collect();
        let mut full = vec![vec![0u128; n + 1]; n + 1];
        for (i, row) in full.iter_mut().enumerate() {
            row[i] = 1;
        }
        for len in (2..=n).step_by(2) {
            for i in 0..=(n - len) {
                let j = i + len;
                let mut total = 0u128;
                for k in ((i + 1)..j).step_by(2) {
                    if contract[i][k] {
                        total = total.saturating_add(full[i + 1][k].saturating_mul(full[k + 1][j]));
                    }
                }
                full[i][j] = total;
            }
        }
        Table {
            n,
            contract,
            full,
            memo: HashMap::new(),
        }
    }

    fn reducible(&self, i: usize, j: usize) -> bool {
        self.full[i][j] > 0
    }

    /// Perfect matchings of `[i, j)`, at most `cap` of them.
    fn matchings(&mut self, i: usize, j: usize, cap: usize) -> Matchings {
        if let Some(m) = self.memo.get(&(i, j)) {
            return m.clone();
        }
        let mut out: Vec<Vec<Link>> = Vec::new();
        if i == j {
            out.push(Vec::new());
        } else if self.reducible(i, j) {
            'outer: for k in ((i + 1)..j).step_by(2) {
                if !(self.contract[i][k] && self.reducible(i + 1, k) && self.reducible(k + 1, j)) {
                    continue;
                }
                let inner = self.matchings(i + 1, k, cap);
                let rest = self.matchings(k + 1, j, cap);
                for a in inner.iter() {
                    for b in rest.iter() {
                        if out.len() >= cap {
                            break 'outer;
                        }
                        let mut links = Vec::with_capacity(1 + a.len() + b.len());
                        links.push((i, k));
                        links.extend_from_slice(a);
                        links.extend_from_slice(b);
                        out.push(links);
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((i, j), out.clone());
        out
    }

    /// Number of maximal reductions.
    fn count_maximal(&self) -> u128 {
        let n = self.n;
        // chain[r]: ways to fix [0, r] with r the last residue item so far
        let mut chain = vec![0u128; n];
        for r in 0..n {
            let mut c = self.full[0][r];
            for p in 0..r {
                if chain[p] > 0 && !self.contract[p][r] {
                    c = c.saturating_add(chain[p].saturating_mul(self.full[p + 1][r]));
                }
            }
            chain[r] = c;
        }
        let mut total = self.full[0][n];
        for (r, c) in chain.iter().enumerate() {
            total = total.saturating_add(c.saturating_mul(self.full[r + 1][n]));
        }
        total
    }

    /// Residue chains whose gaps are all reducible and whose neighbours do
    /// not contract.
    fn residue_chains(&self, cap: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut chain = Vec::new();
        self.extend_chain(0, &mut chain, &mut out, cap);
        out
    }

    fn extend_chain(
        &self,
        pos: usize,
        chain: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if self.reducible(pos, self.n) {
            out.push(chain.clone());
        }
        for r in pos..self.n {
            if !self.reducible(pos, r) {
                continue;
            }
            if let Some(&p) = chain.last() {
                if self.contract[p][r] {
                    continue;
                }
            }
            chain.push(r);
            self.extend_chain(r + 1, chain, out, cap);
            chain.pop();
            if out.len() >= cap {
                return;
            }
        }
    }

    /// All reductions with the given residue, at most `cap`.
    fn fill_gaps(&mut self, residue: &[usize], cap: usize, out: &mut Vec<Reduction>) {
        let mut bounds = Vec::with_capacity(residue.len() + 1);
        let mut start = 0;
        for &r in residue {
            bounds.push((start, r));
            start = r + 1;
        }
        bounds.push((start, self.n));
        let gaps: Vec<Matchings> = bounds
            .iter()
            .map(|&(i, j)| self.matchings(i, j, cap))
            .collect();
        let mut acc = Vec::new();
        product(&gaps, 0, &mut acc, &mut |links: &[Link]| {
            if out.len() >= cap {
                return false;
            }
            let mut links = links.to_vec();
            links.sort_unstable();
            out.push(Reduction {
                links,
                residue: residue.to_vec(),
            });
            true
        });
    }

    /// Minimum span-sum perfect matching of every interval, ties broken by
    /// the smallest partner of the interval's first element.
    fn min_span(&self) -> Vec<Vec<Option<(usize, usize)>>> {
        let n = self.n;
        let mut best: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; n + 1]; n + 1];
        for i in 0..=n {
            best[i][i] = Some((0, usize::MAX));
        }
        for len in (2..=n).step_by(2) {
            for i in 0..=(n - len) {
                let j = i + len;
                let mut cur: Option<(usize, usize)> = None;
                for k in ((i + 1)..j).step_by(2) {
                    if !self.contract[i][k] {
                        continue;
                    }
                    if let (Some((a, _)), Some((b, _))) = (best[i + 1][k], best[k + 1][j]) {
                        let cost = (k - i) + a + b;
                        if cur.is_none_or(|(c, _)| cost < c) {
                            cur = Some((cost, k));
                        }
                    }
                }
                best[i][j] = cur;
            }
        }
        best
    }
}

fn product(
    gaps: &[Matchings],
    depth: usize,
    acc: &mut Vec<Link>,
    emit: &mut dyn FnMut(&[Link]) -> bool,
) -> bool {
    if depth == gaps.len() {
        return emit(acc);
    }
    for m in gaps[depth].iter() {
        let before = acc.len();
        acc.extend_from_slice(m);
        let go_on = product(gaps, depth + 1, acc, emit);
        acc.truncate(before);
        if !go_on {
            return false;
        }
    }
    true
}

fn rebuild(best: &[Vec<Option<(usize, usize)>>], i: usize, j: usize, out: &mut Vec<Link>) {
    if i >= j {
        return;
    }
    let (_, k) = best[i][j].expect("interval known to be reducible");
    out.push((i, k));
    rebuild(best, i + 1, k, out);
    rebuild(best, k + 1, j, out);
}

fn finish(mut reductions: Vec<Reduction>, total: u128, cap: usize) -> ReductionSet {
    reductions.sort();
    reductions.dedup();
    reductions.truncate(cap);
    ReductionSet {
        reductions,
        total,
        truncated: total > cap as u128,
    }
}

/// All maximal reductions of `ts`, at most `cap` of them.
pub fn reduce(sig: &GrammarSignature, ts: &TypeString, cap: usize) -> ReductionSet {
    let mut table = Table::new(sig, ts);
    let total = table.count_maximal();
    let mut out = Vec::new();
    for residue in table.residue_chains(cap) {
        if out.len() >= cap {
            break;
        }
        table.fill_gaps(&residue, cap, &mut out);
    }
    finish(out, total, cap)
}

fn accepts(sig: &GrammarSignature, ts: &TypeString, r: usize, target: &BaseSymbol) -> bool {
    let t = &ts[r];
    t.z == 0
        && match sig.leq(&t.base, target) {
            Ok(v) => v,
            Err(_) => &t.base == target,
        }
}

/// Reductions leaving a single `z = 0` type whose base is `≤ target`.
pub fn grammatical_reductions(
    sig: &GrammarSignature,
    ts: &TypeString,
    target: &BaseSymbol,
    cap: usize,
) -> ReductionSet {
    let mut table = Table::new(sig, ts);
    let n = ts.len();
    let mut total = 0u128;
    let mut out = Vec::new();
    for r in 0..n {
        if !accepts(sig, ts, r, target) {
            continue;
        }
        total = total.saturating_add(table.full[0][r].saturating_mul(table.full[r + 1][n]));
        if table.reducible(0, r) && table.reducible(r + 1, n) && out.len() < cap {
            table.fill_gaps(&[r], cap, &mut out);
        }
    }
    finish(out, total, cap)
}

/// The grammatical reduction with the smallest link-span sum, if any.
pub fn best_grammatical(
    sig: &GrammarSignature,
    ts: &TypeString,
    target: &BaseSymbol,
) -> Option<Reduction> {
    let table = Table::new(sig, ts);
    let best = table.min_span();
    let n = ts.len();
    let mut winner: Option<(usize, Reduction)> = None;
    for r in 0..n {
        if !accepts(sig, ts, r, target) {
            continue;
        }
        let (Some((a, _)), Some((b, _))) = (best[0][r], best[r + 1][n]) else {
            continue;
        };
        let mut links = Vec::new();
        rebuild(&best, 0, r, &mut links);
        rebuild(&best, r + 1, n, &mut links);
        let red = Reduction::from_links(n, links);
        let cost = a + b;
        let better = match &winner {
            None => true,
            Some((c, w)) => cost < *c || (cost == *c && red.links < w.links),
        };
        if better {
            winner = Some((cost, red));
        }
    }
    winner.map(|(_, r)| r)
}

/// `true` iff some reduction leaves exactly one `z = 0` type below `target`.
pub fn is_grammatical(
    sig: &GrammarSignature,
    ts: &TypeString,
    target: &BaseSymbol,
) -> Grammaticality {
    let witness = best_grammatical(sig, ts, target);
    Grammaticality {
        grammatical: witness.is_some(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> BaseSymbol {
        BaseSymbol::from("q")
    }

    #[test]
    fn self_move_sentence_reduces_to_perfective() {
        let sig = GrammarSignature::japanese();
        let ts = TypeString::from("π π^r c_1 c_1^r s_2");
        let set = reduce(&sig, &ts, DEFAULT_REDUCTION_CAP);
        assert!(!set.truncated);
        assert_eq!(set.reductions.len(), 1);
        assert_eq!(set.reductions[0].links, vec![(0, 1), (2, 3)]);
        assert_eq!(
            set.reductions[0].residue_types(&ts),
            TypeString::from("s_2")
        );
    }

    #[test]
    fn nothing_to_contract() {
        let sig = GrammarSignature::japanese();
        let ts = TypeString::from("s_2");
        let set = reduce(&sig, &ts, 10);
        assert_eq!(set.reductions, vec![Reduction::from_links(1, vec![])]);
    }

    #[test]
    fn other_move_sentence_links() {
        let sig = GrammarSignature::japanese();
        let ts = TypeString::from("π π^r c_1 n π^r c_4 c_4^r c_1^r s_1");
        let g = is_grammatical(&sig, &ts, &q());
        let w = g.witness.unwrap();
        assert_eq!(w.links, vec![(0, 1), (2, 7), (3, 4), (5, 6)]);
        assert_eq!(w.residue_types(&ts), TypeString::from("s_1"));
    }

    #[test]
    fn grammaticality_examples() {
        let sig = GrammarSignature::japanese();
        assert!(is_grammatical(&sig, &"π π^r c_1 c_1^r s_2".into(), &q()).grammatical);
        assert!(!is_grammatical(&sig, &"c_1^r s_2 π π^r c_1".into(), &q()).grammatical);
        assert!(is_grammatical(&sig, &"s".into(), &q()).grammatical);
        assert!(!is_grammatical(&sig, &TypeString::unit(), &q()).grammatical);
        // residue below the target only
        assert!(!is_grammatical(&sig, &"s".into(), &"s_1".into()).grammatical);
    }

    #[test]
    fn truncation_is_flagged() {
        let sig = GrammarSignature::english();
        // n n^r repeated: many maximal reductions once nesting is possible
        let ts = TypeString::from("n n^l n n^l n n^l n n n^r n^r n^r n^r");
        let all = reduce(&sig, &ts, usize::MAX);
        assert!(all.total > 2);
        let capped = reduce(&sig, &ts, 2);
        assert!(capped.truncated);
        assert_eq!(capped.reductions.len(), 2);
        assert_eq!(capped.total, all.total);
    }

    #[test]
    fn every_result_verifies() {
        let sig = GrammarSignature::japanese();
        let ts = TypeString::from("π π^r s\u{304} s^l n n^l n π^r c_1 a_n a_n^r c_1^r s");
        let set = reduce(&sig, &ts, DEFAULT_REDUCTION_CAP);
        assert_eq!(set.total as usize, set.reductions.len());
        for r in &set.reductions {
            r.verify(&sig, &ts).unwrap();
        }
        let mut sorted = set.reductions.clone();
        sorted.sort();
        assert_eq!(sorted, set.reductions);
    }
}
