//! End-to-end acceptance suite. Runs as a plain binary so that every
//! criterion prints its own PASS/FAIL line with the elapsed time, whether or
//! not it succeeds.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use meetimp::algebra::{
    count_upsets, dual_poset_of_lattice, eta_check, free_meet_impl_algebra, generated_elements, FiniteLattice,
};
use meetimp::definability::{
    definable_family, is_meet_impl_definable, rieger_nishimura_report, DefinabilityVerdict, Violation,
};
use meetimp::dejongh::dejongh_formulas;
use meetimp::sample::{frame_corpus, posets_up_to_iso, random_extension, random_model};
use meetimp::selftest::{run_selftest, SelfTestConfig};
use meetimp::subframe::{
    is_pmorphic_image, is_pmorphic_image_of_generated, subframe_model, subframe_refutation_check, subframe_report,
    ColouringVariant,
};
use meetimp::universal::{build_meet_impl_universal, build_truncated_universal, DEFAULT_POINT_BUDGET};
use meetimp::{Colour, ColouredModel, Poset, UniverseStore};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    number: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { number: 1, title: "free algebra sizes", limit: Duration::from_secs(1), run: free_algebra_sizes },
        Criterion {
            number: 2,
            title: "U(2) meet-implication part",
            limit: Duration::from_secs(1),
            run: meet_impl_universal_two,
        },
        Criterion {
            number: 3,
            title: "double negation on the ladder",
            limit: Duration::from_secs(1),
            run: ladder_reproduction,
        },
        Criterion { number: 4, title: "de Jongh formulas", limit: Duration::from_secs(5), run: de_jongh_formulas },
        Criterion { number: 5, title: "seeded property suite", limit: Duration::from_secs(60), run: property_suite },
        Criterion {
            number: 6,
            title: "definability oracle vs family",
            limit: Duration::from_secs(60),
            run: definability_oracle,
        },
        Criterion {
            number: 7,
            title: "subframe refutation biconditional",
            limit: Duration::from_secs(120),
            run: subframe_biconditional,
        },
        Criterion { number: 8, title: "Birkhoff round trip", limit: Duration::from_secs(10), run: birkhoff_round_trip },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= c.limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over the time limit")),
            Err(detail) => ("FAIL", detail),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {} {status} {} ({:.2}s of {}s): {detail}",
            c.number,
            c.title,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn free_algebra_sizes() -> Outcome {
    let mut found = Vec::new();
    for (n, expected) in [(1usize, 2u32), (2, 18)] {
        let alg = free_meet_impl_algebra(n, DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
        let by_counting = alg.element_count();
        let by_closure = generated_elements(&alg).len();
        ensure(by_counting == expected.into(), || format!("n = {n}: counted {by_counting} up-sets"))?;
        ensure(by_closure == expected as usize, || format!("n = {n}: closure reached {by_closure} elements"))?;
        found.push(format!("n = {n}: {by_counting}"));
    }
    Ok(found.join(", "))
}

/// Separatedness straight from the definition: some variable is false here
/// and true at every upper cover.
fn separated_by_definition(m: &ColouredModel, x: usize) -> bool {
    (0..m.num_vars()).any(|j| !m.colour(x).bit(j) && m.poset().upper_covers(x).iter().all(|&y| m.colour(y).bit(j)))
}

fn meet_impl_universal_two() -> Outcome {
    let mut store = UniverseStore::new(2).map_err(|e| e.to_string())?;
    let direct = build_meet_impl_universal(&mut store, DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
    let truncation = build_truncated_universal(&mut store, 2, DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
    let m = truncation.model();
    let filtered: BTreeSet<u32> = (0..m.len())
        .filter(|&x| m.poset().up_row(x).ones().all(|y| separated_by_definition(m, y)))
        .map(|x| truncation.ids()[x].0)
        .collect();
    let built: BTreeSet<u32> = direct.ids().iter().map(|id| id.0).collect();
    ensure(built.len() == 5, || format!("direct rule built {} points", built.len()))?;
    ensure(built == filtered, || format!("direct rule {built:?} but filter of the truncation {filtered:?}"))?;
    Ok(format!("5 points, equal to the filter of the {}-point truncation", m.len()))
}

/// The ladder drawn row by row: `left[0]` is the true maximal point and
/// `right[0]` the false one; `left[1]` sees only `left[0]`; below that
/// `left[k]` covers `left[k-1]` and `right[k-2]`, `right[k]` covers
/// `left[k-1]` and `right[k-1]`.
fn ladder(rows: usize) -> (Poset, Vec<Colour>) {
    let left = |k: usize| 2 * k;
    let right = |k: usize| 2 * k + 1;
    let mut covers = vec![(left(1), left(0)), (right(1), left(0)), (right(1), right(0))];
    for k in 2..rows {
        covers.extend([
            (left(k), left(k - 1)),
            (left(k), right(k - 2)),
            (right(k), left(k - 1)),
            (right(k), right(k - 1)),
        ]);
    }
    let poset = Poset::from_covers(2 * rows, &covers).expect("the ladder is a poset");
    let colours = (0..2 * rows).map(|x| Colour(u64::from(x == left(0)))).collect();
    (poset, colours)
}

fn ladder_reproduction() -> Outcome {
    let report = rieger_nishimura_report(6).map_err(|e| e.to_string())?;
    let m = report.model();
    ensure(m.len() == 12, || format!("truncation has {} points", m.len()))?;
    let (poset, colours) = ladder(6);
    let drawn = ColouredModel::new(poset, 1, colours).map_err(|e| e.to_string())?;
    ensure(m.poset().is_isomorphic(drawn.poset()), || "cover relation differs from the drawing".into())?;
    // the ladder has no symmetry, so the colour of the named top point settles the match
    for x in 0..m.len() {
        let top_left = report.name(x) == "m1";
        ensure(m.colour(x).bit(0) == top_left, || format!("point {} has colour {:?}", report.name(x), m.colour(x)))?;
    }
    ensure(drawn.colours().iter().filter(|c| c.bit(0)).count() == 1, || "drawing should colour one point".into())?;
    let value = m.evaluate(&meetimp::parse("~~p1").map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut names = report.names_of(&value);
    names.sort();
    ensure(names == ["m1", "x2"], || format!("v(~~p1) = {names:?}"))?;
    match report.verdict {
        DefinabilityVerdict::NotDefinable(Violation::Bisimilar { outside, inside }) => {
            let pair = (report.name(outside), report.name(inside));
            ensure(pair == ("x1".into(), "x2".into()), || format!("witness pair {pair:?}"))?;
        }
        ref other => return Err(format!("verdict {other:?}")),
    }
    ensure(report.closure.is_full(), || format!("closure has {} points", report.closure.len()))?;
    let family: Vec<Vec<String>> = report.family.iter().map(|u| report.names_of(u)).collect();
    ensure(family.len() == 2 && family[0] == ["m1"] && report.family[1].is_full(), || format!("family {family:?}"))?;
    ensure(report.passed(), || report.render())?;
    Ok("12 points, v(~~p1) = {m1, x2}, bisimilar pair (x1, x2), closure = carrier, family = {{m1}, carrier}".into())
}

fn de_jongh_formulas() -> Outcome {
    let mut store_two = UniverseStore::new(2).map_err(|e| e.to_string())?;
    let meet_impl = build_meet_impl_universal(&mut store_two, DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
    let mut store_one = UniverseStore::new(1).map_err(|e| e.to_string())?;
    let depth_four = build_truncated_universal(&mut store_one, 4, DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for (store, t) in [(&store_two, &meet_impl), (&store_one, &depth_four)] {
        let m = t.model();
        for (x, &w) in t.ids().iter().enumerate() {
            let triple = dejongh_formulas(store, w);
            let eval = |f| m.evaluate(f).map(|u| u.to_vec()).map_err(|e| e.to_string());
            let above: Vec<usize> = (0..m.len()).filter(|&y| m.poset().leq(x, y)).collect();
            let strictly_above: Vec<usize> = above.iter().copied().filter(|&y| y != x).collect();
            let not_below: Vec<usize> = (0..m.len()).filter(|&y| !m.poset().leq(y, x)).collect();
            ensure(eval(&triple.phi)? == above, || format!("phi of store point {w} is {}", triple.phi))?;
            ensure(eval(&triple.theta)? == strictly_above, || format!("theta of store point {w} is {}", triple.theta))?;
            ensure(eval(&triple.psi)? == not_below, || format!("psi of store point {w} is {}", triple.psi))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} points"))
}

fn property_suite() -> Outcome {
    let algebras = (1..=3)
        .map(|n| free_meet_impl_algebra(n, DEFAULT_POINT_BUDGET))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let config = SelfTestConfig::default();
    let report = run_selftest(&config, &algebras);
    for o in &report.outcomes {
        println!("    {o}");
    }
    ensure(config.models >= 500 && config.max_points <= 8 && config.formula_depth <= 5, || "suite too small".into())?;
    ensure(report.passed(), || "some properties failed".into())?;
    let cases: usize = report.outcomes.iter().map(|o| o.cases).sum();
    Ok(format!("{} models, {cases} checks, seed {}", config.models, config.seed))
}

fn definability_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut upsets = 0;
    let mut definable = 0;
    for i in 0..150 {
        let n = rng.gen_range(1..=2);
        let m = random_model(&mut rng, 7, n);
        let family = definable_family(&m).map_err(|e| e.to_string())?;
        for u in m.poset().all_upsets() {
            let verdict = is_meet_impl_definable(&m, &u).is_definable();
            ensure(verdict == family.contains(&u), || {
                format!("model {i}: verdict {verdict} disagrees with the family on {:?}", u.to_vec())
            })?;
            upsets += 1;
            definable += usize::from(verdict);
        }
    }
    Ok(format!("150 models, {upsets} up-sets, {definable} definable"))
}

fn subframe_biconditional() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let variant = ColouringVariant::Combined;
    let mut literal_misses = Vec::new();
    let mut generated_misses = 0;
    let mut total = 0;
    let mut refuted = 0;
    for (name, frame) in frame_corpus() {
        let n = variant.num_vars(frame.len());
        let mut store = UniverseStore::new(n).map_err(|e| e.to_string())?;
        let coloured = subframe_model(&frame, variant).map_err(|e| e.to_string())?;
        for i in 0..200 {
            let n_model = if i % 2 == 0 {
                let extra = rng.gen_range(0..=6 - frame.len());
                random_extension(&mut rng, &coloured, extra)
            } else {
                random_model(&mut rng, 6, n)
            };
            let refutes =
                subframe_refutation_check(&frame, variant, &n_model, &mut store).map_err(|e| e.to_string())?;
            let separated = n_model.separated_submodel().model;
            let onto = is_pmorphic_image(&separated, &coloured).map_err(|e| e.to_string())?;
            let onto_generated = is_pmorphic_image_of_generated(&separated, &coloured).map_err(|e| e.to_string())?;
            total += 1;
            refuted += usize::from(refutes);
            if refutes != onto {
                literal_misses.push(format!("{name} #{i} (refutes {refutes}, onto {onto})"));
            }
            generated_misses += usize::from(refutes != onto_generated);
        }
    }
    // the reflexive colouring is expected to lose separatedness on these frames
    let mut reflexive = Vec::new();
    for (name, frame) in frame_corpus() {
        if name == "2-chain" || name == "V" {
            let mut store =
                UniverseStore::new(ColouringVariant::Reflexive.num_vars(frame.len())).map_err(|e| e.to_string())?;
            let report = subframe_report(&frame, ColouringVariant::Reflexive, &mut store).map_err(|e| e.to_string())?;
            reflexive.push(format!("{name}: all separated {}", report.flags.all_separated));
        }
    }
    let summary = format!(
        "{total} models, {refuted} refute; onto a generated submodel of N^s: {generated_misses} discrepancies; reflexive colouring: {}",
        reflexive.join(", ")
    );
    if literal_misses.is_empty() {
        Ok(format!("{summary}; literal surjection onto the frame: 0 discrepancies"))
    } else {
        Err(format!(
            "{summary}; literal surjection from all of N^s: {} discrepancies, first {}",
            literal_misses.len(),
            literal_misses[0]
        ))
    }
}

fn birkhoff_round_trip() -> Outcome {
    let mut posets = 0;
    for k in 0..=5 {
        for p in posets_up_to_iso(k) {
            let (lattice, _) = FiniteLattice::of_upsets(&p);
            let dual = dual_poset_of_lattice(&lattice).map_err(|e| e.to_string())?;
            let (again, _) = FiniteLattice::of_upsets(&dual.poset);
            ensure(eta_check(&lattice).map_err(|e| e.to_string())?, || format!("eta fails on a {k}-point poset"))?;
            ensure(again.order().is_isomorphic(lattice.order()), || {
                format!("up-set lattices differ on a {k}-point poset")
            })?;
            ensure(dual.poset.is_isomorphic(&p), || format!("dual differs from a {k}-point poset"))?;
            ensure(count_upsets(&p) == lattice.len().into(), || {
                format!("up-set count disagrees on a {k}-point poset")
            })?;
            posets += 1;
        }
    }
    Ok(format!("{posets} posets"))
}
