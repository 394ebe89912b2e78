//! Subframe formulas of finite rooted frames.
//!
//! A rooted frame `F` with points `x_0, …, x_{k-1}` is coloured so that the
//! model `M = (F, c)` consists of separated points with pairwise distinct
//! colours. Then `M` sits inside `U(n)∧,→` as the up-set of a point `w`,
//! and `β(F) = s(φ_w) → s(θ_w)` is refuted by a model `N` exactly when `w`
//! is the image of some separated point of `N`.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::algebra::{closure_search, free_meet_impl_algebra, s_translate, ExtractionError, SearchBudget};
use crate::dejongh::dejongh_formulas;
use crate::formula::Formula;
use crate::kripke::{Colour, ColouredModel, Poset, MAX_VARS};
use crate::universal::{map_to_universal, meet_impl_image, PointId, UniversalError, UniversalMap, UniverseStore};

/// Largest source model accepted by the brute-force image search.
pub const PMORPHIC_SEARCH_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColouringVariant {
    /// Bit `j` of `c(x_i)` is set iff `x_i ≥ x_j`.
    Reflexive,
    /// Bit `j` of `c(x_i)` is set iff `x_i > x_j`.
    Strict,
    /// The strict bits followed by the reflexive bits.
    Combined,
}

impl ColouringVariant {
    pub const ALL: [ColouringVariant; 3] =
        [ColouringVariant::Reflexive, ColouringVariant::Strict, ColouringVariant::Combined];

    pub fn num_vars(self, frame_len: usize) -> usize {
        match self {
            ColouringVariant::Reflexive | ColouringVariant::Strict => frame_len,
            ColouringVariant::Combined => 2 * frame_len,
        }
    }

    fn colour(self, frame: &Poset, x: usize) -> Colour {
        let k = frame.len();
        let mut c = Colour(0);
        for j in 0..k {
            let (strict, reflexive) = (frame.lt(j, x), frame.leq(j, x));
            match self {
                ColouringVariant::Reflexive => c = c.with_bit(j, reflexive),
                ColouringVariant::Strict => c = c.with_bit(j, strict),
                ColouringVariant::Combined => c = c.with_bit(j, strict).with_bit(k + j, reflexive),
            }
        }
        c
    }
}

impl fmt::Display for ColouringVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColouringVariant::Reflexive => "reflexive",
            ColouringVariant::Strict => "strict",
            ColouringVariant::Combined => "combined",
        })
    }
}

impl FromStr for ColouringVariant {
    type Err = SubframeError;

    fn from_str(s: &str) -> Result<ColouringVariant, SubframeError> {
        match s {
            "reflexive" => Ok(ColouringVariant::Reflexive),
            "strict" => Ok(ColouringVariant::Strict),
            "combined" => Ok(ColouringVariant::Combined),
            other => Err(SubframeError::UnknownVariant(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubframeError {
    #[error("frame is not rooted")]
    NotRooted,
    #[error("unknown colouring variant {0:?}; expected reflexive, strict or combined")]
    UnknownVariant(String),
    #[error("the colouring needs {0} variables, more than the supported 64")]
    TooManyVariables(usize),
    #[error("verification failed: {0}")]
    VerificationFailed(SubframeFlags),
    #[error("model has {model} variables but the coloured frame has {frame}")]
    VariableMismatch { frame: usize, model: usize },
    #[error("image search is capped at {cap} source points, got {points}")]
    SizeCap { points: usize, cap: usize },
    #[error(transparent)]
    Universal(#[from] UniversalError),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubframeFlags {
    /// Every point of `(F, c)` is separated.
    pub all_separated: bool,
    /// The map into the universal model is injective.
    pub injective: bool,
    /// The image is exactly the up-set of the root's image.
    pub image_is_principal: bool,
}

impl SubframeFlags {
    pub fn all(&self) -> bool {
        self.all_separated && self.injective && self.image_is_principal
    }
}

impl fmt::Display for SubframeFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |b: bool| if b { "ok" } else { "FAIL" };
        write!(
            f,
            "all separated: {}, injective: {}, image is principal: {}",
            mark(self.all_separated),
            mark(self.injective),
            mark(self.image_is_principal)
        )
    }
}

pub fn subframe_model(frame: &Poset, variant: ColouringVariant) -> Result<ColouredModel, SubframeError> {
    if frame.root().is_none() {
        return Err(SubframeError::NotRooted);
    }
    let n = variant.num_vars(frame.len());
    if n > MAX_VARS {
        return Err(SubframeError::TooManyVariables(n));
    }
    let colours = (0..frame.len()).map(|x| variant.colour(frame, x)).collect();
    Ok(ColouredModel::new(frame.clone(), n, colours).expect("subframe colourings are order-preserving"))
}

/// The coloured frame, its map into `U(n)` and the verification outcome.
#[derive(Clone, Debug)]
pub struct SubframeReport {
    pub frame: Poset,
    pub variant: ColouringVariant,
    pub model: ColouredModel,
    pub map: UniversalMap,
    /// Image of the root.
    pub point: PointId,
    pub flags: SubframeFlags,
    /// `β(F)`, when requested and found.
    pub formula: Option<Formula>,
}

pub fn subframe_report(
    frame: &Poset,
    variant: ColouringVariant,
    store: &mut UniverseStore,
) -> Result<SubframeReport, SubframeError> {
    let model = subframe_model(frame, variant)?;
    if store.num_vars() != model.num_vars() {
        return Err(SubframeError::VariableMismatch { frame: model.num_vars(), model: store.num_vars() });
    }
    let map = map_to_universal(&model, store)?;
    let root = frame.root().expect("rooted");
    let point = map.ids[root];
    let all_separated = (0..model.len()).all(|x| model.is_separated(x));
    let mut image = map.ids.clone();
    image.sort_unstable();
    image.dedup();
    let injective = image.len() == model.len();
    let image_is_principal = image == store.up_set(point);
    let flags = SubframeFlags { all_separated, injective, image_is_principal };
    Ok(SubframeReport { frame: frame.clone(), variant, model, map, point, flags, formula: None })
}

pub fn subframe_point(
    frame: &Poset,
    variant: ColouringVariant,
    store: &mut UniverseStore,
) -> Result<(PointId, SubframeFlags), SubframeError> {
    let report = subframe_report(frame, variant, store)?;
    Ok((report.point, report.flags))
}

/// `β(F) = s(φ_w) → s(θ_w)`, with both translations extracted as
/// `(∧,→)`-formulas over `U(n)∧,→`.
pub fn subframe_formula(
    frame: &Poset,
    variant: ColouringVariant,
    point_budget: usize,
    search: SearchBudget,
) -> Result<Formula, SubframeError> {
    let n = variant.num_vars(frame.len());
    let mut store = UniverseStore::new(n)?;
    let report = subframe_report(frame, variant, &mut store)?;
    if !report.flags.all() {
        return Err(SubframeError::VerificationFailed(report.flags));
    }
    let triple = dejongh_formulas(&store, report.point);
    let alg = free_meet_impl_algebra(n, point_budget)?;
    let phi = s_translate(&triple.phi, &alg).expect("variables in range");
    let theta = s_translate(&triple.theta, &alg).expect("variables in range");
    let carrier = alg.carrier();
    let mut closure = closure_search(carrier, Some(&phi), search);
    if closure.get(&theta).is_none() {
        closure = closure_search(carrier, Some(&theta), search);
    }
    let miss = |c: &crate::algebra::FormulaClosure| ExtractionError::BudgetExhausted {
        explored_size: c.explored_size(),
        elements: c.len(),
    };
    let theta_f = closure.get(&theta).cloned().ok_or_else(|| miss(&closure))?;
    let phi_f = match closure.get(&phi) {
        Some(f) => f.clone(),
        None => {
            let again = closure_search(carrier, Some(&phi), search);
            again.get(&phi).cloned().ok_or_else(|| miss(&again))?
        }
    };
    Ok(Formula::imp(phi_f, theta_f))
}

/// Does `n_model` refute `β(F)`? Decided without the formula: true iff the
/// map of `N^s` into `U(n)` sends some point below `w`.
pub fn subframe_refutation_check(
    frame: &Poset,
    variant: ColouringVariant,
    n_model: &ColouredModel,
    store: &mut UniverseStore,
) -> Result<bool, SubframeError> {
    let n = variant.num_vars(frame.len());
    if n_model.num_vars() != n {
        return Err(SubframeError::VariableMismatch { frame: n, model: n_model.num_vars() });
    }
    let report = subframe_report(frame, variant, store)?;
    if !report.flags.all() {
        return Err(SubframeError::VerificationFailed(report.flags));
    }
    let image = meet_impl_image(n_model, store)?;
    Ok(image.ids.iter().any(|&y| store.leq(y, report.point)))
}

/// Is there a surjective p-morphism from `source` onto `target`?
pub fn is_pmorphic_image(source: &ColouredModel, target: &ColouredModel) -> Result<bool, SubframeError> {
    if source.len() > PMORPHIC_SEARCH_CAP {
        return Err(SubframeError::SizeCap { points: source.len(), cap: PMORPHIC_SEARCH_CAP });
    }
    if source.num_vars() != target.num_vars() {
        return Err(SubframeError::VariableMismatch { frame: target.num_vars(), model: source.num_vars() });
    }
    if source.len() < target.len() {
        return Ok(false);
    }
    let mut search = ImageSearch { source, target, map: vec![usize::MAX; source.len()] };
    Ok(search.extend(0))
}

/// Is `target` a p-morphic image of some generated submodel `↑y` of
/// `source`?
pub fn is_pmorphic_image_of_generated(source: &ColouredModel, target: &ColouredModel) -> Result<bool, SubframeError> {
    for y in 0..source.len() {
        let (sub, _) = source.generated(&source.poset().principal_upset(y));
        if is_pmorphic_image(&sub, target)? {
            return Ok(true);
        }
    }
    Ok(target.is_empty())
}

struct ImageSearch<'a> {
    source: &'a ColouredModel,
    target: &'a ColouredModel,
    map: Vec<usize>,
}

impl ImageSearch<'_> {
    // Points are assigned maximal-first, so all of ↑x is mapped when x is.
    fn extend(&mut self, i: usize) -> bool {
        let order = self.source.poset().top_down();
        if i == order.len() {
            let mut hit = vec![false; self.target.len()];
            for &y in &self.map {
                hit[y] = true;
            }
            return hit.into_iter().all(|h| h);
        }
        let x = order[i];
        for y in 0..self.target.len() {
            if self.source.colour(x) != self.target.colour(y) || !self.fits(x, y) {
                continue;
            }
            self.map[x] = y;
            if self.extend(i + 1) {
                return true;
            }
        }
        self.map[x] = usize::MAX;
        false
    }

    fn fits(&self, x: usize, y: usize) -> bool {
        let (sp, tp) = (self.source.poset(), self.target.poset());
        let mut hit = FixedBitSet::with_capacity(self.target.len());
        hit.insert(y);
        for z in sp.up_row(x).ones().filter(|&z| z != x) {
            let fz = self.map[z];
            if !tp.leq(y, fz) {
                return false;
            }
            hit.insert(fz);
        }
        tp.up_row(y).is_subset(&hit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::ModelMap;

    fn v_frame() -> Poset {
        Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap()
    }

    fn bits(m: &ColouredModel) -> Vec<String> {
        (0..m.len()).map(|x| m.colour(x).to_bitstring(m.num_vars())).collect()
    }

    #[test]
    fn colourings() {
        let single = Poset::chain(1);
        assert_eq!(bits(&subframe_model(&single, ColouringVariant::Combined).unwrap()), vec!["01"]);
        let chain = Poset::chain(2);
        assert_eq!(bits(&subframe_model(&chain, ColouringVariant::Reflexive).unwrap()), vec!["10", "11"]);
        assert_eq!(bits(&subframe_model(&v_frame(), ColouringVariant::Strict).unwrap()), vec!["000", "100", "100"]);
        assert_eq!(subframe_model(&Poset::antichain(2), ColouringVariant::Strict), Err(SubframeError::NotRooted));
        assert_eq!("combined".parse::<ColouringVariant>().unwrap(), ColouringVariant::Combined);
        assert!("fancy".parse::<ColouringVariant>().is_err());
    }

    #[test]
    fn verification_flags() {
        let single = Poset::chain(1);
        let mut store = UniverseStore::new(2).unwrap();
        let (w, flags) = subframe_point(&single, ColouringVariant::Combined, &mut store).unwrap();
        assert!(flags.all());
        assert_eq!(store.colour(w), Colour(0b10));
        assert!(store.successors(w).is_empty());

        let mut store = UniverseStore::new(1).unwrap();
        let (_, flags) = subframe_point(&single, ColouringVariant::Reflexive, &mut store).unwrap();
        assert!(!flags.all_separated);

        let mut store = UniverseStore::new(3).unwrap();
        let (_, flags) = subframe_point(&v_frame(), ColouringVariant::Strict, &mut store).unwrap();
        assert!(!flags.injective);
    }

    #[test]
    fn formulas_for_small_frames() {
        let single = Poset::chain(1);
        let beta = subframe_formula(&single, ColouringVariant::Combined, 1000, SearchBudget::default()).unwrap();
        let m = subframe_model(&single, ColouringVariant::Combined).unwrap();
        assert!(!m.evaluate(&beta).unwrap().is_full());
        let beta1 = subframe_formula(&single, ColouringVariant::Strict, 1000, SearchBudget::default()).unwrap();
        let m1 = subframe_model(&single, ColouringVariant::Strict).unwrap();
        assert!(m1.evaluate(&beta1).unwrap().is_empty());
        assert!(matches!(
            subframe_formula(&single, ColouringVariant::Reflexive, 1000, SearchBudget::default()),
            Err(SubframeError::VerificationFailed(_))
        ));
    }

    #[test]
    fn refutation_examples() {
        let chain = Poset::chain(2);
        let m = subframe_model(&chain, ColouringVariant::Combined).unwrap();
        let mut store = UniverseStore::new(4).unwrap();
        assert!(subframe_refutation_check(&chain, ColouringVariant::Combined, &m, &mut store).unwrap());
        let zeros = ColouredModel::new(Poset::chain(1), 4, vec![Colour(0)]).unwrap();
        assert!(!subframe_refutation_check(&chain, ColouringVariant::Combined, &zeros, &mut store).unwrap());

        let single = Poset::chain(1);
        let m = subframe_model(&single, ColouringVariant::Combined).unwrap();
        let mut store = UniverseStore::new(2).unwrap();
        assert!(subframe_refutation_check(&single, ColouringVariant::Combined, &m, &mut store).unwrap());
        assert!(matches!(
            subframe_refutation_check(&single, ColouringVariant::Combined, &zeros, &mut store),
            Err(SubframeError::VariableMismatch { .. })
        ));
    }

    #[test]
    fn image_search() {
        let chain = ColouredModel::new(Poset::chain(2), 1, vec![Colour(0), Colour(1)]).unwrap();
        assert!(is_pmorphic_image(&chain, &chain).unwrap());
        let anti = ColouredModel::new(Poset::antichain(2), 1, vec![Colour(1), Colour(1)]).unwrap();
        let point = ColouredModel::new(Poset::chain(1), 1, vec![Colour(1)]).unwrap();
        assert!(is_pmorphic_image(&anti, &point).unwrap());
        assert!(!is_pmorphic_image(&point, &chain).unwrap());
        // a 3-chain 0 < 0 < 1 collapses onto the 2-chain
        let long = ColouredModel::new(Poset::chain(3), 1, vec![Colour(0), Colour(0), Colour(1)]).unwrap();
        assert!(is_pmorphic_image(&long, &chain).unwrap());
        let map = ModelMap { source: &long, target: &chain, map: vec![0, 0, 1] };
        assert_eq!(map.check_pmorphism(), Ok(()));
        let big = ColouredModel::new(Poset::antichain(11), 1, vec![Colour(0); 11]).unwrap();
        assert!(matches!(is_pmorphic_image(&big, &point), Err(SubframeError::SizeCap { .. })));
    }

    #[test]
    fn global_image_versus_generated_image() {
        let n = ColouredModel::new(Poset::antichain(2), 2, vec![Colour(0b10), Colour(0b01)]).unwrap();
        let single = Poset::chain(1);
        let m = subframe_model(&single, ColouringVariant::Combined).unwrap();
        let mut store = UniverseStore::new(2).unwrap();
        assert!(subframe_refutation_check(&single, ColouringVariant::Combined, &n, &mut store).unwrap());
        let ns = n.separated_submodel().model;
        assert!(!is_pmorphic_image(&ns, &m).unwrap());
        assert!(is_pmorphic_image_of_generated(&ns, &m).unwrap());
    }
}
