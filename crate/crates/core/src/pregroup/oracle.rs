//! Brute-force ground truth for [`reduce`](super::reduce).
//!
//! Enumerates every non-crossing partial matching of the string and filters
//! by the definition of a reduction. Exponential; bounded to short strings.

use super::{GrammarSignature, Reduction, SignatureError, TypeString};

/// Longest string the oracle will enumerate.
pub const ORACLE_MAX_LEN: usize = 16;

fn all_noncrossing(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    if lo >= hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // lo left unmatched
    for rest in all_noncrossing(lo + 1, hi) {
        out.push(rest);
    }
    // lo matched with k
    for k in (lo + 1)..hi {
        let inner = all_noncrossing(lo + 1, k);
        let after = all_noncrossing(k + 1, hi);
        for a in &inner {
            for b in &after {
                let mut m = vec![(lo, k)];
                m.extend(a.iter().copied());
                m.extend(b.iter().copied());
                out.push(m);
            }
        }
    }
    out
}

fn is_valid(sig: &GrammarSignature, ts: &TypeString, links: &[(usize, usize)]) -> bool {
    let mut linked = vec![false; ts.len()];
    for &(i, j) in links {
        linked[i] = true;
        linked[j] = true;
    }
    links
        .iter()
        .all(|&(i, j)| sig.contracts(&ts[i], &ts[j]) && ((i + 1)..j).all(|k| linked[k]))
}

/// Every maximal reduction of `ts`, by exhaustive search.
pub fn oracle_reduce(
    sig: &GrammarSignature,
    ts: &TypeString,
) -> Result<Vec<Reduction>, SignatureError> {
    let n = ts.len();
    if n > ORACLE_MAX_LEN {
        return Err(SignatureError::OracleTooLong {
            len: n,
            max: ORACLE_MAX_LEN,
        });
    }
    let mut out = Vec::new();
    for links in all_noncrossing(0, n) {
        if !is_valid(sig, ts, &links) {
            continue;
        }
        let mut linked = vec![false; n];
        for &(i, j) in &links {
            linked[i] = true;
            linked[j] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !linked[i]).collect();
        let mut extendable = false;
        'search: for (x, &a) in free.iter().enumerate() {
            for &b in &free[x + 1..] {
                let mut bigger = links.clone();
                bigger.push((a, b));
                let crossing = links
                    .iter()
                    .any(|&(i, j)| (i < a && a < j && j < b) || (a < i && i < b && b < j));
                if !crossing && is_valid(sig, ts, &bigger) {
                    extendable = true;
                    break 'search;
                }
            }
        }
        if !extendable {
            out.push(Reduction::from_links(n, links));
        }
    }
    out.sort();
    Ok(out)
}
