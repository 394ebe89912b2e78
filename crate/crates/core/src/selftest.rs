//! A seeded property suite over random models and formulas.
//!
//! Each check compares two independent routes to the same set of points and
//! reports the first disagreement as a message.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{restriction_adjoints, s_translate, AdjointBundle, FreeMeetImpAlgebra};
use crate::definability::{family_in, verdict_in};
use crate::dejongh::DeJonghBuilder;
use crate::formula::Formula;
use crate::kripke::{ColouredModel, UpSet};
use crate::sample::{random_formula, random_model, random_upset};
use crate::universal::{map_to_universal, TruncatedUniversalModel, UniverseStore};

pub type CheckResult = Result<(), String>;

fn show(u: &UpSet) -> String {
    format!("{:?}", u.to_vec())
}

/// `v_M(φ) = r(v_{M^s}(φ))` for a `(∧,→)`-formula `φ`.
pub fn check_restriction_law(bundle: &AdjointBundle, phi: &Formula) -> CheckResult {
    let direct = bundle.model().evaluate(phi).map_err(|e| e.to_string())?;
    let on_sep = bundle.separated().model.evaluate(phi).map_err(|e| e.to_string())?;
    let lifted = bundle.r(&on_sep);
    if direct != lifted {
        return Err(format!("{phi}: v_M = {} but r(v_Ms) = {}", show(&direct), show(&lifted)));
    }
    Ok(())
}

/// `M^s, x ⊨ φ` iff the image of `x` lies in `s(φ)`, for any formula `φ`.
/// The bundle must have been built in a clone of the algebra's store.
pub fn check_separated_translation(bundle: &AdjointBundle, alg: &FreeMeetImpAlgebra, phi: &Formula) -> CheckResult {
    let on_sep = bundle.separated().model.evaluate(phi).map_err(|e| e.to_string())?;
    let translated = s_translate(phi, alg).map_err(|e| e.to_string())?;
    let carrier = &alg.universal().submodel;
    for (x, id) in bundle.image().ids.iter().enumerate() {
        let Some(pos) = carrier.index_of(*id) else {
            return Err(format!("image point {id} of M^s is not in U(n)∧,→"));
        };
        if on_sep.contains(x) != translated.contains(pos) {
            return Err(format!("{phi}: separated point {x} disagrees with its translation"));
        }
    }
    Ok(())
}

/// `M, w ⊨ φ` iff `M∧,→, f(w) ⊨ φ` for separated `w` and `(∧,→)`-formula `φ`.
pub fn check_transfer(bundle: &AdjointBundle, phi: &Formula) -> CheckResult {
    let on_m = bundle.model().evaluate(phi).map_err(|e| e.to_string())?;
    let on_image = bundle.meet_impl_model().evaluate(phi).map_err(|e| e.to_string())?;
    let sep = bundle.separated();
    for (i, &w) in sep.embedding.iter().enumerate() {
        if on_m.contains(w) != on_image.contains(bundle.image().map[i]) {
            return Err(format!("{phi}: point {w} disagrees with its image"));
        }
    }
    Ok(())
}

/// p-morphisms send separated points to separated points. Checked for the
/// map of `M` into `U(n)` and for the map of `M^s` onto `M∧,→`.
pub fn check_separated_preserved(
    model: &ColouredModel,
    store: &mut UniverseStore,
    bundle: &AdjointBundle,
) -> CheckResult {
    let f = map_to_universal(model, store).map_err(|e| e.to_string())?;
    let image = f.image(store);
    let map = f.as_model_map(model, &image);
    map.check_pmorphism().map_err(|v| format!("map into U(n) is not a p-morphism: {v:?}"))?;
    for x in (0..model.len()).filter(|&x| model.is_separated(x)) {
        if !image.model.is_separated(map.map[x]) {
            return Err(format!("separated point {x} maps to a non-separated point"));
        }
    }
    let onto = bundle.image().model_map();
    onto.check_pmorphism().map_err(|v| format!("M^s → M∧,→ is not a p-morphism: {v:?}"))?;
    if !onto.is_surjective() {
        return Err("M^s → M∧,→ is not surjective".into());
    }
    for x in 0..onto.source.len() {
        if !onto.target.is_separated(onto.map[x]) {
            return Err(format!("separated point {x} of M^s maps to a non-separated point"));
        }
    }
    Ok(())
}

/// `q ∘ r = id`, the Frobenius law `a → r(b) = r(q(a) → b)`, and `rh`
/// preserving `∧` and `→`. Pairs are sampled when the up-set lattices are
/// large.
pub fn check_adjoint_laws<R: Rng>(bundle: &AdjointBundle, rng: &mut R, max_pairs: usize) -> CheckResult {
    let m = bundle.model();
    let sep = &bundle.separated().model;
    let sep_upsets = sep.poset().all_upsets();
    for v in &sep_upsets {
        let back = bundle.q(&bundle.r(v));
        if back != *v {
            return Err(format!("q(r({})) = {}", show(v), show(&back)));
        }
    }
    let m_upsets = m.poset().all_upsets();
    let pairs = pick_pairs(rng, m_upsets.len(), sep_upsets.len(), max_pairs);
    for (i, j) in pairs {
        let (a, b) = (&m_upsets[i], &sep_upsets[j]);
        let left = m.poset().implication(a, &bundle.r(b));
        let right = bundle.r(&sep.poset().implication(&bundle.q(a), b));
        if left != right {
            return Err(format!("Frobenius fails at a = {}, b = {}", show(a), show(b)));
        }
    }
    let image = bundle.meet_impl_model();
    let image_upsets = image.poset().all_upsets();
    for (i, j) in pick_pairs(rng, image_upsets.len(), image_upsets.len(), max_pairs) {
        let (u, v) = (&image_upsets[i], &image_upsets[j]);
        let imp = bundle.rh(&image.poset().implication(u, v));
        if imp != m.poset().implication(&bundle.rh(u), &bundle.rh(v)) {
            return Err(format!("rh does not preserve → at {}, {}", show(u), show(v)));
        }
        if bundle.rh(&u.intersection(v)) != bundle.rh(u).intersection(&bundle.rh(v)) {
            return Err(format!("rh does not preserve ∧ at {}, {}", show(u), show(v)));
        }
    }
    Ok(())
}

fn pick_pairs<R: Rng>(rng: &mut R, a: usize, b: usize, max_pairs: usize) -> Vec<(usize, usize)> {
    if a * b <= max_pairs {
        (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect()
    } else {
        (0..max_pairs).map(|_| (rng.gen_range(0..a), rng.gen_range(0..b))).collect()
    }
}

/// Each up-set is judged definable exactly when it lies in the family of
/// definable up-sets.
pub fn check_definability_oracle(bundle: &AdjointBundle) -> CheckResult {
    let family = family_in(bundle).map_err(|e| e.to_string())?;
    let mut result = Ok(());
    bundle.model().poset().for_each_upset(|u| {
        if result.is_ok() && verdict_in(bundle, u).is_definable() != family.contains(u) {
            result = Err(format!("verdict and family disagree on {}", show(u)));
        }
    });
    result
}

/// `φ_w`, `θ_w` and `ψ_w` define `↑w`, `↑w ∖ {w}` and the complement of
/// `↓w` at every point of a store submodel.
pub fn check_dejongh(store: &UniverseStore, model: &TruncatedUniversalModel) -> CheckResult {
    let m = model.model();
    let mut builder = DeJonghBuilder::new(store);
    for (x, &w) in model.ids().iter().enumerate() {
        let triple = builder.triple(w).clone();
        let up = m.poset().principal_upset(x);
        let strict: Vec<usize> = up.points().filter(|&y| y != x).collect();
        let outside: Vec<usize> = (0..m.len()).filter(|&y| !m.poset().leq(y, x)).collect();
        let eval = |f: &Formula| m.evaluate(f).map(|u| u.to_vec()).map_err(|e| e.to_string());
        if eval(&triple.phi)? != up.to_vec() {
            return Err(format!("φ fails at point {w}"));
        }
        if eval(&triple.theta)? != strict {
            return Err(format!("θ fails at point {w}"));
        }
        if eval(&triple.psi)? != outside {
            return Err(format!("ψ fails at point {w}"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl PropertyOutcome {
    fn new(name: &'static str) -> PropertyOutcome {
        PropertyOutcome { name, cases: 0, failures: 0, first_failure: None }
    }

    pub fn record(&mut self, result: CheckResult) {
        self.cases += 1;
        if let Err(msg) = result {
            self.failures += 1;
            self.first_failure.get_or_insert(msg);
        }
    }
}

impl fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.failures == 0 { "ok" } else { "FAIL" };
        write!(f, "{status:4} {:<28} {} cases, {} failures", self.name, self.cases, self.failures)?;
        if let Some(msg) = &self.first_failure {
            write!(f, " (first: {msg})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SelfTestConfig {
    pub seed: u64,
    pub models: usize,
    pub max_points: usize,
    pub max_vars: usize,
    pub formula_depth: usize,
    pub formulas_per_model: usize,
}

impl Default for SelfTestConfig {
    fn default() -> SelfTestConfig {
        SelfTestConfig { seed: 2024, models: 500, max_points: 8, max_vars: 3, formula_depth: 5, formulas_per_model: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct SelfTestReport {
    pub outcomes: Vec<PropertyOutcome>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failures == 0)
    }
}

/// Runs every property on seeded random models.
pub fn run_selftest(config: &SelfTestConfig, algebras: &[FreeMeetImpAlgebra]) -> SelfTestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut restriction = PropertyOutcome::new("restriction law");
    let mut translation = PropertyOutcome::new("separated translation");
    let mut transfer = PropertyOutcome::new("transfer along f");
    let mut preserved = PropertyOutcome::new("separated preservation");
    let mut adjoints = PropertyOutcome::new("adjoint laws");
    let mut oracle = PropertyOutcome::new("definability oracle");
    let mut upset_checks = PropertyOutcome::new("closure of random up-sets");
    for _ in 0..config.models {
        let n = rng.gen_range(1..=config.max_vars.min(algebras.len()));
        let alg = &algebras[n - 1];
        let m = random_model(&mut rng, config.max_points, n);
        let mut store = alg.store().clone();
        let bundle = restriction_adjoints(&m, &mut store).expect("store matches the model");
        for _ in 0..config.formulas_per_model {
            let frag = random_formula(&mut rng, n, config.formula_depth, true);
            let full = random_formula(&mut rng, n, config.formula_depth, false);
            restriction.record(check_restriction_law(&bundle, &frag));
            translation.record(check_separated_translation(&bundle, alg, &full));
            transfer.record(check_transfer(&bundle, &frag));
        }
        preserved.record(check_separated_preserved(&m, &mut store, &bundle));
        adjoints.record(check_adjoint_laws(&bundle, &mut rng, 4096));
        if bundle.meet_impl_model().len() <= crate::definability::FAMILY_CARRIER_CAP {
            oracle.record(check_definability_oracle(&bundle));
        }
        let u = random_upset(&mut rng, m.poset());
        let closure = bundle.closure(&u);
        upset_checks.record(if u.is_subset(&closure) && verdict_in(&bundle, &closure).is_definable() {
            Ok(())
        } else {
            Err(format!("closure of {} is {}", show(&u), show(&closure)))
        });
    }
    let mut dejongh = PropertyOutcome::new("de Jongh formulas");
    for alg in algebras.iter().take(2) {
        dejongh.record(check_dejongh(alg.store(), alg.universal()));
    }
    let outcomes = vec![restriction, translation, transfer, preserved, adjoints, oracle, upset_checks, dejongh];
    SelfTestReport { outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::free_meet_impl_algebra;
    use crate::universal::DEFAULT_POINT_BUDGET;

    #[test]
    fn small_suite_passes() {
        let algebras: Vec<_> = (1..=2).map(|n| free_meet_impl_algebra(n, DEFAULT_POINT_BUDGET).unwrap()).collect();
        let config = SelfTestConfig { models: 40, max_points: 5, max_vars: 2, ..SelfTestConfig::default() };
        let report = run_selftest(&config, &algebras);
        for o in &report.outcomes {
            assert_eq!(o.failures, 0, "{o}");
        }
        assert!(report.outcomes.iter().all(|o| o.cases > 0));
    }
}
