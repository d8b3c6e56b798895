use disco_jp::diagram::{Diagram, DiagramBox};
use disco_jp::pregroup::SimpleType;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_type(rng: &mut ChaCha8Rng) -> SimpleType {
    let base = ["x", "y"][rng.random_range(0..2)];
    SimpleType::new(base, rng.random_range(-1..=1))
}

fn random_types(rng: &mut ChaCha8Rng, max: usize) -> Vec<SimpleType> {
    let n = rng.random_range(0..=max);
    (0..n).map(|_| random_type(rng)).collect()
}

/// `(cup ⊗ id) ∘ (id ⊗ cap)` or its mirror image, on one wire of type `t`.
pub fn snake(t: &SimpleType, mirrored: bool) -> Diagram {
    let id = || Diagram::identity(vec![t.clone()]);
    if mirrored {
        let top = Diagram::cap(t.clone(), t.left()).unwrap().tensor(&id());
        let bottom = id().tensor(&Diagram::cup(t.left(), t.clone()).unwrap());
        top.then(&bottom).unwrap()
    } else {
        let top = id().tensor(&Diagram::cap(t.right(), t.clone()).unwrap());
        let bottom = Diagram::cup(t.clone(), t.right()).unwrap().tensor(&id());
        top.then(&bottom).unwrap()
    }
}

/// One random layer acting on `cod`, padded with identities.
fn random_layer(rng: &mut ChaCha8Rng, cod: &[SimpleType], label: usize) -> Diagram {
    let n = cod.len();
    loop {
        let at = rng.random_range(0..=n);
        let (op, width): (Diagram, usize) = match rng.random_range(0..5) {
            0 => {
                let k = rng.random_range(0..=2.min(n - at));
                let inputs = cod[at..at + k].to_vec();
                let outputs = random_types(rng, 2);
                if inputs.is_empty() && outputs.is_empty() {
                    continue;
                }
                (
                    Diagram::from_box(DiagramBox::new(format!("f{label}"), inputs, outputs)),
                    k,
                )
            }
            1 => {
                if at + 1 >= n || cod[at + 1] != cod[at].right() {
                    continue;
                }
                (
                    Diagram::cup(cod[at].clone(), cod[at + 1].clone()).unwrap(),
                    2,
                )
            }
            2 => {
                let t = random_type(rng);
                (Diagram::cap(t.clone(), t.left()).unwrap(), 0)
            }
            _ => {
                if at >= n {
                    continue;
                }
                (snake(&cod[at], rng.random_bool(0.5)), 1)
            }
        };
        let left = Diagram::identity(cod[..at].to_vec());
        let right = Diagram::identity(cod[at + width..].to_vec());
        return left.tensor(&op).tensor(&right);
    }
}

/// A random well-formed diagram with the given domain, built from up to
/// `layers` layers of boxes, cups, caps and snakes.
pub fn random_diagram(rng: &mut ChaCha8Rng, dom: Vec<SimpleType>, layers: usize) -> Diagram {
    let mut d = Diagram::identity(dom);
    for k in 0..rng.random_range(0..=layers) {
        let layer = random_layer(rng, &d.cod(), k);
        d = d.then(&layer).unwrap();
    }
    d
}

pub fn random_dom(rng: &mut ChaCha8Rng) -> Vec<SimpleType> {
    random_types(rng, 3)
}
