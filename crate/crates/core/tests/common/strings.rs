use disco_jp::pregroup::{BaseSymbol, GrammarSignature, SimpleType, TypeString};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Five bases with a random acyclic order: each pair in a random
/// topological order is related with probability 0.3.
pub fn random_signature(rng: &mut ChaCha8Rng) -> GrammarSignature {
    let mut names: Vec<String> = (0..5).map(|i| format!("b{i}")).collect();
    for i in (1..names.len()).rev() {
        names.swap(i, rng.random_range(0..=i));
    }
    let mut order = Vec::new();
    for i in 0..5 {
        for j in (i + 1)..5 {
            if rng.random_bool(0.3) {
                order.push((
                    BaseSymbol::from(names[i].as_str()),
                    BaseSymbol::from(names[j].as_str()),
                ));
            }
        }
    }
    let mut bases: Vec<String> = names.clone();
    bases.sort();
    GrammarSignature::new(bases, order).unwrap()
}

/// Random simple types, biased so that a type is often followed by its
/// right adjoint and contractions actually occur.
pub fn random_string(rng: &mut ChaCha8Rng, sig: &GrammarSignature, max_len: usize) -> TypeString {
    let len = rng.random_range(0..=max_len);
    let mut out: Vec<SimpleType> = Vec::with_capacity(len);
    for _ in 0..len {
        if let Some(prev) = out.last() {
            if rng.random_bool(0.35) {
                let next = prev.right();
                out.push(next);
                continue;
            }
        }
        let base = sig.bases()[rng.random_range(0..sig.bases().len())].clone();
        let z = match rng.random_range(0..10) {
            0 => -2,
            1 => 2,
            2..=4 => -1,
            5..=7 => 1,
            _ => 0,
        };
        out.push(SimpleType::new(base, z));
    }
    TypeString(out)
}
