//! Seeded generators for models and formulas, and small exhaustive corpora
//! of posets and frames.

use std::collections::HashSet;

use rand::Rng;

use crate::formula::Formula;
use crate::kripke::{mask, Colour, ColouredModel, Poset, UpSet};

/// Grows a model by repeatedly adding a point below a random up-set of the
/// current model, with a random colour below the colours of that up-set.
/// Points already present keep their up-sets, so `base` stays a generated
/// submodel of the result.
pub fn random_extension<R: Rng>(rng: &mut R, base: &ColouredModel, extra: usize) -> ColouredModel {
    let n = base.num_vars();
    let mut model = base.clone();
    for _ in 0..extra {
        let len = model.len();
        let seeds: Vec<usize> = (0..len).filter(|_| rng.gen_bool(0.35)).collect();
        let above = model.poset().up_closure(seeds);
        let ceiling = above.points().fold(Colour::all_ones(n), |acc, y| acc.meet(model.colour(y)));
        let colour = Colour(random_submask(rng, ceiling.0));
        let mut pairs: Vec<(usize, usize)> = model.poset().cover_pairs();
        pairs.extend(model.poset().minimal_in(above.bits()).into_iter().map(|y| (len, y)));
        let poset = Poset::from_covers(len + 1, &pairs).expect("new point sits below an up-set");
        let mut colours = model.colours().to_vec();
        colours.push(colour);
        model = ColouredModel::new(poset, n, colours).expect("colour is below its successors");
    }
    model
}

fn random_submask<R: Rng>(rng: &mut R, ceiling: u64) -> u64 {
    let mut out = 0;
    for j in 0..64 {
        if ceiling >> j & 1 == 1 && rng.gen_bool(0.5) {
            out |= 1 << j;
        }
    }
    out
}

/// A random model on `1..=max_points` points over `n` variables.
pub fn random_model<R: Rng>(rng: &mut R, max_points: usize, n: usize) -> ColouredModel {
    let len = rng.gen_range(1..=max_points.max(1));
    random_extension(rng, &ColouredModel::empty(n), len)
}

/// A random up-set of `p`: the up-closure of independently chosen points.
pub fn random_upset<R: Rng>(rng: &mut R, p: &Poset) -> UpSet {
    let density = rng.gen_range(0.05..0.6);
    p.up_closure((0..p.len()).filter(|_| rng.gen_bool(density)))
}

/// A random formula of depth at most `depth` over `p1..pn`. With
/// `meet_implication` set, only `T`, variables, `∧` and `→` occur.
pub fn random_formula<R: Rng>(rng: &mut R, n: usize, depth: usize, meet_implication: bool) -> Formula {
    let leaf = |rng: &mut R| -> Formula {
        let roll = rng.gen_range(0..n + 2);
        if roll < n {
            Formula::var(u32::try_from(roll + 1).expect("variable index fits in u32"))
        } else if roll == n || meet_implication {
            Formula::top()
        } else {
            Formula::bot()
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let ops = if meet_implication { 2 } else { 3 };
    let a = random_formula(rng, n, depth - 1, meet_implication);
    let b = random_formula(rng, n, depth - 1, meet_implication);
    match rng.gen_range(0..ops) {
        0 => Formula::and(a, b),
        1 => Formula::imp(a, b),
        _ => Formula::or(a, b),
    }
}

/// All colourings of a poset with `n` variables, for tiny posets.
pub fn all_colourings(p: &Poset, n: usize) -> Vec<ColouredModel> {
    let mut out = Vec::new();
    let mut colours = vec![Colour(0); p.len()];
    colourings_from(p, n, 0, &mut colours, &mut out);
    out
}

fn colourings_from(p: &Poset, n: usize, i: usize, colours: &mut Vec<Colour>, out: &mut Vec<ColouredModel>) {
    let order = p.top_down();
    if i == order.len() {
        out.push(ColouredModel::new(p.clone(), n, colours.clone()).expect("monotone by construction"));
        return;
    }
    let x = order[i];
    let ceiling = p.upper_covers(x).iter().fold(mask(n), |acc, &y| acc & colours[y].0);
    let mut sub = ceiling;
    loop {
        colours[x] = Colour(sub);
        colourings_from(p, n, i + 1, colours, out);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & ceiling;
    }
}

/// One representative of every isomorphism class of posets on `len` points.
pub fn posets_up_to_iso(len: usize) -> Vec<Poset> {
    let mut classes: Vec<Poset> = vec![Poset::antichain(0)];
    for k in 1..=len {
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut next = Vec::new();
        for p in &classes {
            // the new point is maximal and lies above exactly the down-set `d`
            for d in p.dual().all_upsets() {
                let q = Poset::from_relation(k, |a, b| {
                    if b == k - 1 {
                        a == k - 1 || d.contains(a)
                    } else {
                        a != k - 1 && p.leq(a, b)
                    }
                })
                .expect("one-point extension of a partial order");
                if seen.insert(canonical_form(&q)) {
                    next.push(q);
                }
            }
        }
        classes = next;
    }
    classes
}

/// Lexicographically least adjacency rows over all relabellings that keep
/// points sorted by (down-set size, up-set size).
fn canonical_form(p: &Poset) -> Vec<u64> {
    let k = p.len();
    let key = |x: usize| (p.down_row(x).count_ones(..), p.up_row(x).count_ones(..));
    let mut points: Vec<usize> = (0..k).collect();
    points.sort_by_key(|&x| key(x));
    let mut best: Option<Vec<u64>> = None;
    let mut perm = Vec::with_capacity(k);
    let mut used = vec![false; k];
    canonical_from(p, &points, &key, &mut perm, &mut used, &mut best);
    best.expect("at least one labelling")
}

fn canonical_from<K: Fn(usize) -> (usize, usize)>(
    p: &Poset,
    points: &[usize],
    key: &K,
    perm: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<Vec<u64>>,
) {
    let k = points.len();
    if perm.len() == k {
        let rows: Vec<u64> = perm
            .iter()
            .map(|&a| perm.iter().enumerate().fold(0u64, |acc, (j, &b)| acc | (u64::from(p.leq(a, b)) << j)))
            .collect();
        if best.as_ref().is_none_or(|b| rows < *b) {
            *best = Some(rows);
        }
        return;
    }
    let want = key(points[perm.len()]);
    for i in 0..k {
        let x = points[i];
        if used[i] || key(x) != want {
            continue;
        }
        used[i] = true;
        perm.push(x);
        canonical_from(p, points, key, perm, used, best);
        perm.pop();
        used[i] = false;
    }
}

/// Rooted frames on `1..=max_len` points up to isomorphism: every poset on
/// fewer points with a new least element added.
pub fn rooted_frames_up_to_iso(max_len: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    for k in 0..max_len {
        for p in posets_up_to_iso(k) {
            out.push(
                Poset::from_relation(k + 1, |a, b| a == 0 || (a > 0 && b > 0 && p.leq(a - 1, b - 1)))
                    .expect("adding a root"),
            );
        }
    }
    out
}

/// The named frames used throughout the tests and the CLI.
pub fn frame_corpus() -> Vec<(&'static str, Poset)> {
    let cover = |len, pairs: &[(usize, usize)]| Poset::from_covers(len, pairs).expect("corpus frames are posets");
    vec![
        ("1-point", Poset::chain(1)),
        ("2-chain", Poset::chain(2)),
        ("3-chain", Poset::chain(3)),
        ("V", cover(3, &[(0, 1), (0, 2)])),
        ("3-fork", cover(4, &[(0, 1), (0, 2), (0, 3)])),
    ]
}
