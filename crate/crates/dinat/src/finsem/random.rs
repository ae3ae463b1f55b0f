use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::enumerate::{search_composition_failure, CompositionWitness};
use super::eval::Evaluator;
use super::fincat::FinCat;
use super::model::{Model, Shape};
use super::EvalError;
use crate::par::Exec;
use crate::syntax::{CatExpr, Formula, Polarity, Slot, TermExpr};

/// A preorder on `n` objects: a random relation closed under reflexivity
/// and transitivity.
pub fn random_preorder(rng: &mut impl Rng, n: usize) -> FinCat {
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = i == j || rng.gen_bool(0.4);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let names: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
    let arrow = |i: usize, j: usize| format!("u{i}{j}");
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && le[i][j] {
                arrows.push((arrow(i, j), names[i].clone(), names[j].clone()));
            }
        }
    }
    let name_of = |i: usize, j: usize| if i == j { format!("id_{}", names[i]) } else { arrow(i, j) };
    let mut comps = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && le[i][j] && le[j][k] {
                    comps.push((arrow(i, j), arrow(j, k), name_of(i, k)));
                }
            }
        }
    }
    let objs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let arrows: Vec<(&str, &str, &str)> = arrows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    let comps: Vec<(&str, &str, &str)> = comps.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    FinCat::new("preorder", &objs, &arrows, &comps).expect("preorders are categories")
}

/// A one-object category from a random associative multiplication on
/// `k` non-identity elements, found by rejection sampling.
pub fn random_monoid(rng: &mut impl Rng, k: usize) -> FinCat {
    let names: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
    let all: Vec<String> = std::iter::once("id_o".to_string()).chain(names.iter().cloned()).collect();
    loop {
        let mut comps = Vec::new();
        for a in &names {
            for b in &names {
                comps.push((a.clone(), b.clone(), all[rng.gen_range(0..all.len())].clone()));
            }
        }
        let arrows: Vec<(&str, &str, &str)> = names.iter().map(|n| (n.as_str(), "o", "o")).collect();
        let comps: Vec<(&str, &str, &str)> = comps.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        if let Ok(c) = FinCat::new("monoid", &["o"], &arrows, &comps) {
            return c;
        }
    }
}

/// Two objects with `k` parallel arrows between them.
pub fn parallel(k: usize) -> FinCat {
    let names: Vec<String> = (0..k).map(|i| format!("f{i}")).collect();
    let arrows: Vec<(&str, &str, &str)> = names.iter().map(|n| (n.as_str(), "a", "b")).collect();
    FinCat::new("parallel", &["a", "b"], &arrows, &[]).expect("parallel arrows form a category")
}

pub fn random_category(rng: &mut impl Rng) -> FinCat {
    match rng.gen_range(0..4) {
        0 | 1 => {
            let n = rng.gen_range(2..=3);
            random_preorder(rng, n)
        }
        2 => {
            let k = rng.gen_range(1..=2);
            random_monoid(rng, k)
        }
        _ => {
            let k = rng.gen_range(1..=2);
            parallel(k)
        }
    }
}

/// A random shape over slots `(-C, +C)`.
pub fn random_shape(rng: &mut impl Rng, n_obj: usize, depth: usize) -> Shape {
    let leaf = |rng: &mut dyn rand::RngCore| -> Shape {
        match rng.gen_range(0..4) {
            0 => Shape::Const(rng.gen_range(0..=2)),
            1 => Shape::Hom(0, 1),
            2 => Shape::From(rng.gen_range(0..n_obj), 1),
            _ => Shape::To(0, rng.gen_range(0..n_obj)),
        }
    };
    if depth == 0 || rng.gen_bool(0.5) {
        return leaf(rng);
    }
    let (a, b) = (random_shape(rng, n_obj, depth - 1), random_shape(rng, n_obj, depth - 1));
    if rng.gen_bool(0.5) {
        Shape::prod(a, b)
    } else {
        Shape::sum(a, b)
    }
}

/// A model over a random category with two random mixed-variance atoms
/// `R` and `S` whose sets have at most `max_set` elements.
pub fn random_model(rng: &mut impl Rng, name: &str, max_set: usize) -> Model {
    let cat = random_category(rng);
    let n = cat.n_obj();
    let mut m = Model::new(name).with_cat("C", cat);
    let slots = vec![Slot::new(CatExpr::base("C"), Polarity::Neg), Slot::new(CatExpr::base("C"), Polarity::Pos)];
    for atom in ["R", "S"] {
        loop {
            let t = random_shape(rng, n, 2).table(&m, slots.clone()).expect("shapes tabulate");
            if t.elems.iter().all(|e| e.len() <= max_set) {
                m = m.with_atom(atom, t);
                break;
            }
        }
    }
    m
}

/// Single-variable formulas the composition search draws from.
pub fn composition_pool() -> Vec<Formula> {
    let c = CatExpr::base("C");
    let hom = Formula::hom(c, TermExpr::neg("x"), TermExpr::var("x"));
    let atom = |n: &str| Formula::atom(n, vec![TermExpr::neg("x"), TermExpr::var("x")]);
    let mut pool = vec![Formula::Top, hom.clone(), atom("R"), atom("S"), Formula::imp(hom.clone(), hom)];
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
    pool.sort_by_key(|f| f.size());
    pool
}

/// `count` random models from `seed`, named `random-<seed>-<i>`.
pub fn random_models(seed: u64, count: usize) -> Vec<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_model(&mut rng, &format!("random-{seed}-{i}"), 3)).collect()
}

/// Outcome of the composition search over a batch of random models.
#[derive(Clone, Debug)]
pub struct SearchSummary {
    pub tried: usize,
    /// Models on which some composite fails the hexagon.
    pub with_witness: usize,
    /// The witness on the first such model, in seed order.
    pub first: Option<(Model, CompositionWitness)>,
}

/// Runs the composition search on every model of `random_models(seed, count)`.
/// The result does not depend on `exec`.
pub fn random_composition_search(seed: u64, count: usize, limit: usize, exec: Exec) -> Result<SearchSummary, EvalError> {
    let models = random_models(seed, count);
    let pool = composition_pool();
    let found = exec.map(&models, |m| search_composition_failure(&Evaluator::with_limit(m, limit), &pool));
    let mut summary = SearchSummary { tried: count, with_witness: 0, first: None };
    for (m, r) in models.into_iter().zip(found) {
        if let Some(w) = r? {
            summary.with_witness += 1;
            if summary.first.is_none() {
                summary.first = Some((m, w));
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_models_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..30 {
            random_model(&mut rng, &format!("m{i}"), 3).validate().unwrap();
        }
    }
}
