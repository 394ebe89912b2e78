//! Hash-consed points of the universal model `U(n)`.
//!
//! A point of `U(n)` is determined by its colour and the antichain of its
//! immediate successors. The store interns points under that key, so the
//! same point is never created twice and a store id names a unique
//! bisimulation class of finite-depth models. Truncations of `U(n)`, the
//! model `U(n)∧,→` and images of arbitrary finite models under their unique
//! p-morphism into `U(n)` all live in a shared store.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::kripke::{mask, Colour, ColouredModel, ModelMap, Poset, SeparatedSubmodel, MAX_VARS};

/// Default cap on the number of points a construction may create.
pub const DEFAULT_POINT_BUDGET: usize = 200_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PointId(pub u32);

impl PointId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalPoint {
    pub id: PointId,
    pub colour: Colour,
    /// Immediate successors, sorted by id; empty for maximal points.
    pub successors: Vec<PointId>,
    pub depth: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub points_per_layer: Vec<usize>,
    pub antichains_examined: u64,
}

impl BuildStats {
    pub fn total_points(&self) -> usize {
        self.points_per_layer.iter().sum()
    }
}

impl fmt::Display for BuildStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let layers: Vec<String> = self.points_per_layer.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "points per layer: [{}], total {}, antichains examined {}",
            layers.join(", "),
            self.total_points(),
            self.antichains_examined
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniversalError {
    #[error("{0} variables exceed the supported maximum of 64")]
    TooManyVariables(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("colour {colour:?} is not below the colours of its successors")]
    NotMonotone { colour: Colour },
    #[error("model has {model} variables but the store has {store}")]
    VariableMismatch { store: usize, model: usize },
    #[error("point budget {budget} exceeded ({stats})")]
    BudgetExceeded { budget: usize, stats: BuildStats },
}

/// Append-only table of universal points keyed by (colour, successors).
#[derive(Clone)]
pub struct UniverseStore {
    n: usize,
    points: Vec<UniversalPoint>,
    index: HashMap<(Colour, Vec<PointId>), PointId>,
    // sorted ↑x, including x
    up: Vec<Vec<PointId>>,
}

impl UniverseStore {
    pub fn new(n: usize) -> Result<UniverseStore, UniversalError> {
        if n > MAX_VARS {
            return Err(UniversalError::TooManyVariables(n));
        }
        Ok(UniverseStore { n, points: Vec::new(), index: HashMap::new(), up: Vec::new() })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: PointId) -> &UniversalPoint {
        &self.points[id.index()]
    }

    pub fn points(&self) -> &[UniversalPoint] {
        &self.points
    }

    pub fn colour(&self, id: PointId) -> Colour {
        self.points[id.index()].colour
    }

    pub fn successors(&self, id: PointId) -> &[PointId] {
        &self.points[id.index()].successors
    }

    pub fn depth(&self, id: PointId) -> usize {
        self.points[id.index()].depth
    }

    /// `↑x`, sorted by id.
    pub fn up_set(&self, id: PointId) -> &[PointId] {
        &self.up[id.index()]
    }

    pub fn leq(&self, a: PointId, b: PointId) -> bool {
        a == b || self.up[a.index()].binary_search(&b).is_ok()
    }

    pub fn lt(&self, a: PointId, b: PointId) -> bool {
        a != b && self.leq(a, b)
    }

    fn comparable(&self, a: PointId, b: PointId) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Minimal elements of a set of points, sorted and deduplicated.
    pub fn minimal(&self, ids: &[PointId]) -> Vec<PointId> {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.iter().copied().filter(|&s| !sorted.iter().any(|&t| self.lt(t, s))).collect()
    }

    pub fn lookup(&self, colour: Colour, successors: &[PointId]) -> Option<PointId> {
        let reduced = self.minimal(successors);
        if let [only] = reduced[..] {
            if self.colour(only) == colour {
                return Some(only);
            }
        }
        self.index.get(&(colour, reduced)).copied()
    }

    /// The unique point with the given colour whose proper successors are
    /// `↑successors`. When the successors reduce to a single point of the
    /// same colour, that point itself is returned.
    pub fn intern(&mut self, colour: Colour, successors: &[PointId]) -> Result<PointId, UniversalError> {
        if colour.0 & !mask(self.n) != 0 {
            return Err(UniversalError::NotMonotone { colour });
        }
        let reduced = self.minimal(successors);
        if reduced.iter().any(|&s| !colour.leq(self.colour(s))) {
            return Err(UniversalError::NotMonotone { colour });
        }
        if let [only] = reduced[..] {
            if self.colour(only) == colour {
                return Ok(only);
            }
        }
        let key = (colour, reduced);
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        let id = PointId(u32::try_from(self.points.len()).expect("store ids fit in u32"));
        let successors = key.1.clone();
        let depth = 1 + successors.iter().map(|&s| self.depth(s)).max().unwrap_or(0);
        let mut up = vec![id];
        for &s in &successors {
            up.extend_from_slice(&self.up[s.index()]);
        }
        up.sort_unstable();
        up.dedup();
        self.points.push(UniversalPoint { id, colour, successors, depth });
        self.up.push(up);
        self.index.insert(key, id);
        Ok(id)
    }

    /// Is the point a `q`-border point for some variable `q`?
    pub fn is_separated(&self, id: PointId) -> bool {
        !self.border_vars(id).is_empty()
    }

    /// Variables `q` (1-based) false at the point and true at every proper
    /// successor.
    pub fn border_vars(&self, id: PointId) -> Vec<usize> {
        let p = self.point(id);
        let above = p.successors.iter().fold(Colour::all_ones(self.n), |acc, &s| acc.meet(self.colour(s)));
        (0..self.n).filter(|&j| !p.colour.bit(j) && above.bit(j)).map(|j| j + 1).collect()
    }

    /// The generated submodel on the up-closure of `ids`.
    pub fn submodel<I: IntoIterator<Item = PointId>>(&self, ids: I) -> UniversalSubmodel {
        let mut members: Vec<PointId> = Vec::new();
        for id in ids {
            members.extend_from_slice(self.up_set(id));
        }
        members.sort_unstable();
        members.dedup();
        let index: HashMap<PointId, usize> = members.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut pairs = Vec::new();
        for (i, &id) in members.iter().enumerate() {
            for s in self.successors(id) {
                pairs.push((i, index[s]));
            }
        }
        let poset = Poset::from_covers(members.len(), &pairs).expect("store order is a partial order");
        let colours = members.iter().map(|&id| self.colour(id)).collect();
        let model = ColouredModel::new(poset, self.n, colours).expect("store colouring is monotone");
        UniversalSubmodel { model, ids: members, index }
    }
}

impl fmt::Debug for UniverseStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UniverseStore").field("n", &self.n).field("points", &self.points.len()).finish()
    }
}

/// An up-closed set of store points, materialized as a concrete model.
#[derive(Clone, Debug)]
pub struct UniversalSubmodel {
    pub model: ColouredModel,
    /// Store id of each model point, ascending.
    pub ids: Vec<PointId>,
    index: HashMap<PointId, usize>,
}

impl UniversalSubmodel {
    pub fn index_of(&self, id: PointId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Store ids as labels for the JSON and DOT writers.
    pub fn labels(&self) -> Vec<i64> {
        self.ids.iter().map(|id| i64::from(id.0)).collect()
    }
}

/// A depth-bounded piece of `U(n)` (or of `U(n)∧,→`) in a store.
#[derive(Clone, Debug)]
pub struct TruncatedUniversalModel {
    pub submodel: UniversalSubmodel,
    pub depth_bound: usize,
    pub stats: BuildStats,
}

impl TruncatedUniversalModel {
    pub fn model(&self) -> &ColouredModel {
        &self.submodel.model
    }

    pub fn ids(&self) -> &[PointId] {
        &self.submodel.ids
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LayerRule {
    /// Every admissible colour below the meet of the antichain.
    Universal,
    /// Only colours strictly below the meet, so the new point is a border
    /// point for some variable true on the whole antichain.
    Separated,
}

/// Maximal colours in descending bitstring order (`p1` most significant).
fn maximal_colours(n: usize, include_all_ones: bool) -> Vec<Colour> {
    let mut colours: Vec<Colour> = (0..=mask(n)).map(Colour).collect();
    if !include_all_ones {
        colours.pop();
    }
    colours.sort_by_key(|c| Reverse(c.to_bitstring(n)));
    colours
}

struct LayerBuilder<'s> {
    store: &'s mut UniverseStore,
    rule: LayerRule,
    budget: usize,
    created: usize,
    stats: BuildStats,
}

impl LayerBuilder<'_> {
    fn check_budget(&self) -> Result<(), UniversalError> {
        if self.created >= self.budget {
            let mut stats = self.stats.clone();
            stats.points_per_layer.push(0);
            return Err(UniversalError::BudgetExceeded { budget: self.budget, stats });
        }
        Ok(())
    }

    fn seed(&mut self, colours: &[Colour]) -> Result<Vec<PointId>, UniversalError> {
        let mut layer = Vec::new();
        for &c in colours {
            self.check_budget()?;
            layer.push(self.store.intern(c, &[])?);
            self.created += 1;
        }
        self.stats.points_per_layer.push(layer.len());
        Ok(layer)
    }

    /// Points of depth `k + 1` over the given layers `1..=k`: one point per
    /// antichain meeting layer `k` and per admissible colour.
    fn next_layer(&mut self, layers: &[Vec<PointId>]) -> Result<Vec<PointId>, UniversalError> {
        let top = layers.last().expect("at least one layer");
        let mut candidates: Vec<PointId> = top.clone();
        candidates.sort_unstable();
        let num_top = candidates.len();
        let mut rest: Vec<PointId> = layers[..layers.len() - 1].iter().flatten().copied().collect();
        rest.sort_unstable();
        candidates.extend(rest);

        let mut layer = Vec::new();
        let mut chosen = Vec::new();
        let start_meet = Colour::all_ones(self.store.num_vars());
        self.antichains(&candidates, num_top, 0, &mut chosen, start_meet, &mut layer)?;
        self.stats.points_per_layer.push(layer.len());
        Ok(layer)
    }

    fn antichains(
        &mut self,
        candidates: &[PointId],
        num_top: usize,
        start: usize,
        chosen: &mut Vec<PointId>,
        meet: Colour,
        out: &mut Vec<PointId>,
    ) -> Result<(), UniversalError> {
        for i in start..candidates.len() {
            // Every emitted antichain must contain a point of the top layer,
            // and those come first.
            if chosen.is_empty() && i >= num_top {
                break;
            }
            let c = candidates[i];
            if chosen.iter().any(|&s| self.store.comparable(s, c)) {
                continue;
            }
            let new_meet = meet.meet(self.store.colour(c));
            if self.rule == LayerRule::Separated && new_meet.0 == 0 {
                continue;
            }
            chosen.push(c);
            self.stats.antichains_examined += 1;
            self.emit(chosen, new_meet, out)?;
            self.antichains(candidates, num_top, i + 1, chosen, new_meet, out)?;
            chosen.pop();
        }
        Ok(())
    }

    fn emit(&mut self, antichain: &[PointId], meet: Colour, out: &mut Vec<PointId>) -> Result<(), UniversalError> {
        let mut sub = meet.0;
        loop {
            let strict_only = self.rule == LayerRule::Separated || antichain.len() == 1;
            if !(strict_only && sub == meet.0) {
                self.check_budget()?;
                let id = self.store.intern(Colour(sub), antichain)?;
                out.push(id);
                self.created += 1;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & meet.0;
        }
        Ok(())
    }
}

fn check_enumerable(n: usize, budget: usize) -> Result<(), UniversalError> {
    if n == 0 {
        return Err(UniversalError::InvalidArgument("at least one variable is required".into()));
    }
    if n >= 32 || (1usize << n) > budget {
        return Err(UniversalError::BudgetExceeded { budget, stats: BuildStats::default() });
    }
    Ok(())
}

/// The points of `U(n)` of depth at most `depth_bound`, built layer by layer:
/// `2^n` maximal points, then for each antichain `S` reaching the previous
/// layer and each colour `c ≤ ⋀ c(S)` (strictly below when `|S| = 1`) one
/// new point.
pub fn build_truncated_universal(
    store: &mut UniverseStore,
    depth_bound: usize,
    budget: usize,
) -> Result<TruncatedUniversalModel, UniversalError> {
    let n = store.num_vars();
    if depth_bound == 0 {
        return Err(UniversalError::InvalidArgument("depth bound must be at least 1".into()));
    }
    check_enumerable(n, budget)?;
    let mut builder =
        LayerBuilder { store, rule: LayerRule::Universal, budget, created: 0, stats: BuildStats::default() };
    let mut layers = vec![builder.seed(&maximal_colours(n, true))?];
    while layers.len() < depth_bound {
        let next = builder.next_layer(&layers)?;
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    let stats = builder.stats;
    let submodel = store.submodel(layers.into_iter().flatten());
    Ok(TruncatedUniversalModel { submodel, depth_bound, stats })
}

/// `U(n)∧,→` built directly: the maximal points of colour other than
/// all-ones, closed under adding a point of colour `c` below an antichain
/// `S` whenever `c` lies strictly below `⋀ c(S)`. Colours strictly increase
/// along chains, so at most `n` layers arise.
pub fn build_meet_impl_universal(
    store: &mut UniverseStore,
    budget: usize,
) -> Result<TruncatedUniversalModel, UniversalError> {
    let n = store.num_vars();
    check_enumerable(n, budget)?;
    let mut builder =
        LayerBuilder { store, rule: LayerRule::Separated, budget, created: 0, stats: BuildStats::default() };
    let mut layers = vec![builder.seed(&maximal_colours(n, false))?];
    loop {
        let next = builder.next_layer(&layers)?;
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    let stats = builder.stats;
    let depth_bound = layers.len();
    let submodel = store.submodel(layers.into_iter().flatten());
    Ok(TruncatedUniversalModel { submodel, depth_bound, stats })
}

/// The unique p-morphism of a finite model into `U(n)`, as store ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalMap {
    pub ids: Vec<PointId>,
}

impl UniversalMap {
    /// The image, which is a generated submodel of `U(n)`.
    pub fn image(&self, store: &UniverseStore) -> UniversalSubmodel {
        store.submodel(self.ids.iter().copied())
    }

    /// Point indices in a submodel containing the image.
    pub fn indices_in(&self, target: &UniversalSubmodel) -> Vec<usize> {
        self.ids.iter().map(|&id| target.index_of(id).expect("target contains the image")).collect()
    }

    pub fn as_model_map<'a>(&self, source: &'a ColouredModel, target: &'a UniversalSubmodel) -> ModelMap<'a> {
        ModelMap { source, target: &target.model, map: self.indices_in(target) }
    }
}

/// Computes `f(x)` bottom-up from the maximal points: a point goes to the
/// store point keyed by its colour and the minimal images of its upper
/// covers, collapsing onto the single minimal image when the colours agree.
pub fn map_to_universal(m: &ColouredModel, store: &mut UniverseStore) -> Result<UniversalMap, UniversalError> {
    if m.num_vars() != store.num_vars() {
        return Err(UniversalError::VariableMismatch { store: store.num_vars(), model: m.num_vars() });
    }
    let mut ids = vec![PointId(u32::MAX); m.len()];
    let mut succ = Vec::new();
    for &x in m.poset().top_down() {
        succ.clear();
        succ.extend(m.poset().upper_covers(x).iter().map(|&y| ids[y]));
        ids[x] = store.intern(m.colour(x), &succ)?;
    }
    Ok(UniversalMap { ids })
}

/// Are two points of a finite model bisimilar?
pub fn bisimilar(m: &ColouredModel, x: usize, y: usize) -> bool {
    let mut store = UniverseStore::new(m.num_vars()).expect("model variable count is supported");
    let f = map_to_universal(m, &mut store).expect("store matches the model");
    f.ids[x] == f.ids[y]
}

/// `M^s`, the unique p-morphism `f : M^s → U(n)` and its image `M∧,→`.
#[derive(Clone, Debug)]
pub struct MeetImpImage {
    pub separated: SeparatedSubmodel,
    /// Store id of `f(x)` for each point of `M^s`.
    pub ids: Vec<PointId>,
    pub image: UniversalSubmodel,
    /// Index in `image` of `f(x)` for each point of `M^s`.
    pub map: Vec<usize>,
}

impl MeetImpImage {
    pub fn model_map(&self) -> ModelMap<'_> {
        ModelMap { source: &self.separated.model, target: &self.image.model, map: self.map.clone() }
    }
}

pub fn meet_impl_image(m: &ColouredModel, store: &mut UniverseStore) -> Result<MeetImpImage, UniversalError> {
    let separated = m.separated_submodel();
    let f = map_to_universal(&separated.model, store)?;
    let image = f.image(store);
    let map = f.indices_in(&image);
    Ok(MeetImpImage { separated, ids: f.ids, image, map })
}
