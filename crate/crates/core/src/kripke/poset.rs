use std::fmt;

use fixedbitset::FixedBitSet;

use super::KripkeError;

/// A finite partial order on the points `0..len`.
///
/// The order is stored as a full table of principal up-sets and down-sets;
/// covers and depths are computed once on construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
    depth: Vec<usize>,
    /// Points ordered so that every point comes after all of its strict
    /// successors (maximal points first).
    top_down: Vec<usize>,
}

impl Poset {
    /// Builds a poset from an order predicate, validating the partial order
    /// laws.
    pub fn from_relation<F>(len: usize, leq: F) -> Result<Poset, KripkeError>
    where
        F: Fn(usize, usize) -> bool,
    {
        let mut up = vec![FixedBitSet::with_capacity(len); len];
        for (x, row) in up.iter_mut().enumerate() {
            for y in 0..len {
                if leq(x, y) {
                    row.insert(y);
                }
            }
        }
        for (x, row) in up.iter().enumerate() {
            if !row.contains(x) {
                return Err(KripkeError::NotAPartialOrder(format!("{x} is not below itself")));
            }
            for y in row.ones() {
                if y != x && up[y].contains(x) {
                    return Err(KripkeError::NotAPartialOrder(format!("{x} and {y} are below each other")));
                }
                if !up[y].is_subset(row) {
                    return Err(KripkeError::NotAPartialOrder(format!("order is not transitive through {x} <= {y}")));
                }
            }
        }
        Ok(Poset::from_up_table(up))
    }

    /// Builds a poset as the reflexive transitive closure of the given
    /// `(lower, upper)` pairs. Cycles are rejected.
    pub fn from_covers(len: usize, pairs: &[(usize, usize)]) -> Result<Poset, KripkeError> {
        let mut up = vec![FixedBitSet::with_capacity(len); len];
        for (x, row) in up.iter_mut().enumerate() {
            row.insert(x);
        }
        for &(a, b) in pairs {
            if a >= len || b >= len {
                return Err(KripkeError::UnknownPoint(a.max(b)));
            }
            up[a].insert(b);
        }
        // Warshall on bit rows.
        for k in 0..len {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for x in 0..len {
            for y in up[x].ones() {
                if y != x && up[y].contains(x) {
                    return Err(KripkeError::NotAPartialOrder(format!("cycle through {x} and {y}")));
                }
            }
        }
        Ok(Poset::from_up_table(up))
    }

    /// The discrete order on `len` points.
    pub fn antichain(len: usize) -> Poset {
        Poset::from_covers(len, &[]).expect("antichain")
    }

    /// The chain `0 < 1 < ... < len-1`.
    pub fn chain(len: usize) -> Poset {
        let pairs: Vec<_> = (1..len).map(|i| (i - 1, i)).collect();
        Poset::from_covers(len, &pairs).expect("chain")
    }

    fn from_up_table(up: Vec<FixedBitSet>) -> Poset {
        let len = up.len();
        let mut down = vec![FixedBitSet::with_capacity(len); len];
        for (x, row) in up.iter().enumerate() {
            for y in row.ones() {
                down[y].insert(x);
            }
        }
        let mut upper_covers = vec![Vec::new(); len];
        let mut lower_covers = vec![Vec::new(); len];
        for x in 0..len {
            for y in up[x].ones() {
                if y == x {
                    continue;
                }
                // y covers x iff nothing strictly between
                let mut between = up[x].clone();
                between.intersect_with(&down[y]);
                if between.count_ones(..) == 2 {
                    upper_covers[x].push(y);
                    lower_covers[y].push(x);
                }
            }
        }
        let mut top_down: Vec<usize> = (0..len).collect();
        top_down.sort_by_key(|&x| (up[x].count_ones(..), x));
        let mut depth = vec![0; len];
        for &x in &top_down {
            depth[x] = 1 + upper_covers[x].iter().map(|&y| depth[y]).max().unwrap_or(0);
        }
        Poset { up, down, upper_covers, lower_covers, depth, top_down }
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// `↑x` as a raw bit row.
    pub fn up_row(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    /// `↓x` as a raw bit row.
    pub fn down_row(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper_covers[x]
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower_covers[x]
    }

    /// All cover pairs `(lower, upper)` in lexicographic order.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for x in 0..self.len() {
            for &y in &self.upper_covers[x] {
                pairs.push((x, y));
            }
        }
        pairs
    }

    /// Length of the longest chain in `↑x`; maximal points have depth 1.
    pub fn depth(&self, x: usize) -> usize {
        self.depth[x]
    }

    /// Maximum depth over all points, 0 for the empty poset.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Points listed maximal-first: each point appears after all points
    /// strictly above it.
    pub fn top_down(&self) -> &[usize] {
        &self.top_down
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.upper_covers[x].is_empty()
    }

    /// The least element, if there is one.
    pub fn root(&self) -> Option<usize> {
        (0..self.len()).find(|&x| self.up[x].count_ones(..) == self.len())
    }

    pub fn is_upset(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|x| self.up[x].is_subset(set))
    }

    pub fn empty_upset(&self) -> UpSet {
        UpSet { bits: FixedBitSet::with_capacity(self.len()) }
    }

    pub fn full_upset(&self) -> UpSet {
        let mut bits = FixedBitSet::with_capacity(self.len());
        bits.insert_range(..);
        UpSet { bits }
    }

    pub fn principal_upset(&self, x: usize) -> UpSet {
        UpSet { bits: self.up[x].clone() }
    }

    /// Smallest up-set containing the given points.
    pub fn up_closure<I: IntoIterator<Item = usize>>(&self, points: I) -> UpSet {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for x in points {
            bits.union_with(&self.up[x]);
        }
        UpSet { bits }
    }

    /// Down-closure of a set of points, as a raw bit row.
    pub fn down_closure(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for x in set.ones() {
            bits.union_with(&self.down[x]);
        }
        bits
    }

    /// Wraps a point set after checking that it is upward closed.
    pub fn upset_from_points<I: IntoIterator<Item = usize>>(&self, points: I) -> Result<UpSet, KripkeError> {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for x in points {
            if x >= self.len() {
                return Err(KripkeError::UnknownPoint(x));
            }
            bits.insert(x);
        }
        if !self.is_upset(&bits) {
            return Err(KripkeError::NotAnUpSet);
        }
        Ok(UpSet { bits })
    }

    pub(crate) fn upset_from_bits_unchecked(&self, bits: FixedBitSet) -> UpSet {
        debug_assert_eq!(bits.len(), self.len());
        debug_assert!(self.is_upset(&bits));
        UpSet { bits }
    }

    /// Heyting implication in the algebra of up-sets: the points all of
    /// whose successors in `u` lie in `v`.
    pub fn implication(&self, u: &UpSet, v: &UpSet) -> UpSet {
        let mut bad = u.bits.clone();
        bad.difference_with(&v.bits);
        let mut bits = self.down_closure(&bad);
        bits.toggle_range(..);
        UpSet { bits }
    }

    /// Maximal elements of the complement of `a`.
    pub fn border_points(&self, a: &UpSet) -> Vec<usize> {
        (0..self.len()).filter(|&x| !a.contains(x) && self.upper_covers[x].iter().all(|&y| a.contains(y))).collect()
    }

    /// Minimal elements of a point set.
    pub fn minimal_in(&self, set: &FixedBitSet) -> Vec<usize> {
        set.ones().filter(|&x| self.is_minimal_in(x, set)).collect()
    }

    fn is_minimal_in(&self, x: usize, set: &FixedBitSet) -> bool {
        self.down[x].ones().all(|y| y == x || !set.contains(y))
    }

    /// Calls `visit` on every up-set. The number of calls is the number of
    /// up-sets, so this is only usable on small posets.
    pub fn for_each_upset<F: FnMut(&UpSet)>(&self, mut visit: F) {
        let mut current = self.empty_upset();
        self.upsets_from(0, &mut current, &mut visit);
    }

    fn upsets_from<F: FnMut(&UpSet)>(&self, i: usize, current: &mut UpSet, visit: &mut F) {
        if i == self.top_down.len() {
            visit(current);
            return;
        }
        let x = self.top_down[i];
        self.upsets_from(i + 1, current, visit);
        if self.upper_covers[x].iter().all(|&y| current.contains(y)) {
            current.bits.insert(x);
            self.upsets_from(i + 1, current, visit);
            current.bits.set(x, false);
        }
    }

    pub fn all_upsets(&self) -> Vec<UpSet> {
        let mut out = Vec::new();
        self.for_each_upset(|u| out.push(u.clone()));
        out
    }

    /// Induced order on a subset of points, listed in the given order.
    pub fn induced(&self, points: &[usize]) -> Poset {
        Poset::from_relation(points.len(), |i, j| self.leq(points[i], points[j]))
            .expect("restriction of a partial order")
    }

    /// The same order with the direction reversed.
    pub fn dual(&self) -> Poset {
        Poset::from_relation(self.len(), |x, y| self.leq(y, x)).expect("dual order")
    }

    /// Brute-force isomorphism test; intended for posets of at most a
    /// handful of points.
    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut sig_a: Vec<_> = (0..self.len()).map(|x| self.signature(x)).collect();
        let mut sig_b: Vec<_> = (0..other.len()).map(|x| other.signature(x)).collect();
        sig_a.sort_unstable();
        sig_b.sort_unstable();
        if sig_a != sig_b {
            return false;
        }
        let mut image = vec![usize::MAX; self.len()];
        let mut used = vec![false; other.len()];
        self.extend_iso(other, 0, &mut image, &mut used)
    }

    fn signature(&self, x: usize) -> (usize, usize, usize) {
        (self.up[x].count_ones(..), self.down[x].count_ones(..), self.depth[x])
    }

    fn extend_iso(&self, other: &Poset, x: usize, image: &mut [usize], used: &mut [bool]) -> bool {
        if x == self.len() {
            return true;
        }
        for y in 0..other.len() {
            if used[y] || self.signature(x) != other.signature(y) {
                continue;
            }
            let consistent =
                (0..x).all(|z| self.leq(z, x) == other.leq(image[z], y) && self.leq(x, z) == other.leq(y, image[z]));
            if consistent {
                image[x] = y;
                used[y] = true;
                if self.extend_iso(other, x + 1, image, used) {
                    return true;
                }
                used[y] = false;
            }
        }
        false
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset").field("len", &self.len()).field("covers", &self.cover_pairs()).finish()
    }
}

/// An upward-closed set of points of some poset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpSet {
    bits: FixedBitSet,
}

impl UpSet {
    /// Size of the carrier the set lives in.
    pub fn carrier_len(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits.contains(x)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.carrier_len()
    }

    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.bits.ones().collect()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn is_subset(&self, other: &UpSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersection(&self, other: &UpSet) -> UpSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        UpSet { bits }
    }

    pub fn union(&self, other: &UpSet) -> UpSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        UpSet { bits }
    }
}

impl fmt::Debug for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}

/// Checked Heyting implication of up-sets: `{x | ∀y ≥ x. y ∈ u ⇒ y ∈ v}`.
pub fn upset_implication(p: &Poset, u: &UpSet, v: &UpSet) -> Result<UpSet, KripkeError> {
    for w in [u, v] {
        if w.carrier_len() != p.len() {
            return Err(KripkeError::CarrierMismatch { expected: p.len(), found: w.carrier_len() });
        }
    }
    Ok(p.implication(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_structure() {
        let p = Poset::chain(3);
        assert_eq!(p.upper_covers(0), &[1]);
        assert_eq!(p.depth(0), 3);
        assert_eq!(p.depth(2), 1);
        assert_eq!(p.root(), Some(0));
        assert_eq!(p.top_down(), &[2, 1, 0]);
        assert_eq!(p.cover_pairs(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn rejects_non_orders() {
        assert!(Poset::from_covers(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Poset::from_relation(2, |x, y| x != y).is_err());
        assert!(Poset::from_relation(3, |x, y| x == y || (x, y) == (0, 1) || (x, y) == (1, 2)).is_err());
    }

    #[test]
    fn covers_are_the_transitive_reduction() {
        let p = Poset::from_covers(4, &[(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        assert_eq!(p.upper_covers(0), &[1, 3]);
        assert_eq!(p.lower_covers(2), &[1]);
    }

    #[test]
    fn implication_on_two_chain() {
        // x = 0 < y = 1; u = {y}, v = ∅: checked point by point, neither
        // x nor y has all its u-successors in v.
        let p = Poset::chain(2);
        let u = p.upset_from_points([1]).unwrap();
        let v = p.empty_upset();
        assert!(upset_implication(&p, &u, &v).unwrap().is_empty());
        assert!(p.implication(&u, &u).is_full());
        assert_eq!(p.implication(&p.full_upset(), &u), u);
    }

    #[test]
    fn implication_is_largest_residual() {
        let p = Poset::from_covers(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (4, 3)]).unwrap();
        let ups = p.all_upsets();
        for u in &ups {
            for v in &ups {
                let w = p.implication(u, v);
                assert!(w.intersection(u).is_subset(v));
                for z in &ups {
                    if z.intersection(u).is_subset(v) {
                        assert!(z.is_subset(&w));
                    }
                }
            }
        }
    }

    #[test]
    fn mismatched_carriers_are_rejected() {
        let p = Poset::chain(2);
        let q = Poset::chain(3);
        assert!(matches!(
            upset_implication(&p, &q.full_upset(), &p.full_upset()),
            Err(KripkeError::CarrierMismatch { .. })
        ));
    }

    #[test]
    fn upset_enumeration_counts() {
        assert_eq!(Poset::antichain(2).all_upsets().len(), 4);
        assert_eq!(Poset::chain(4).all_upsets().len(), 5);
        assert_eq!(Poset::antichain(0).all_upsets().len(), 1);
        for u in Poset::from_covers(4, &[(0, 1), (0, 2), (3, 2)]).unwrap().all_upsets() {
            assert!(u.carrier_len() == 4);
        }
    }

    #[test]
    fn isomorphism_check() {
        let v = Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap();
        let v2 = Poset::from_covers(3, &[(2, 0), (2, 1)]).unwrap();
        assert!(v.is_isomorphic(&v2));
        assert!(!v.is_isomorphic(&v.dual()));
        assert!(!v.is_isomorphic(&Poset::chain(3)));
    }

    #[test]
    fn border_points_of_upsets() {
        let p = Poset::chain(2);
        assert_eq!(p.border_points(&p.upset_from_points([1]).unwrap()), vec![0]);
        assert!(p.border_points(&p.full_upset()).is_empty());
        assert_eq!(p.border_points(&p.empty_upset()), vec![1]);
    }
}
