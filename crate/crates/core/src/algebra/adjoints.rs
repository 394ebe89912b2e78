use crate::kripke::{ColouredModel, KripkeError, SeparatedSubmodel, UpSet};
use crate::universal::{meet_impl_image, MeetImpImage, UniversalError, UniversalSubmodel, UniverseStore};

/// The maps relating the up-sets of a model `M`, of `M^s` and of `M∧,→`:
///
/// ```text
///   q : U(M) → U(M^s)        restriction,         q ⊣ r
///   r : U(M^s) → U(M)        r(V) = {x | ↑x ∩ M^s ⊆ V}
///   h : U(M∧,→) → U(M^s)     preimage under f,    h♭ ⊣ h
///   h♭ : U(M^s) → U(M∧,→)    image under f
///   t : U(T) → U(M∧,→)       restriction from a store submodel T ⊇ M∧,→
/// ```
#[derive(Clone, Debug)]
pub struct AdjointBundle {
    model: ColouredModel,
    image: MeetImpImage,
}

pub fn restriction_adjoints(m: &ColouredModel, store: &mut UniverseStore) -> Result<AdjointBundle, UniversalError> {
    let image = meet_impl_image(m, store)?;
    Ok(AdjointBundle { model: m.clone(), image })
}

fn expect_carrier(u: &UpSet, len: usize, what: &str) {
    assert_eq!(u.carrier_len(), len, "{what} expects an up-set of a {len}-point model");
}

impl AdjointBundle {
    pub fn model(&self) -> &ColouredModel {
        &self.model
    }

    pub fn separated(&self) -> &SeparatedSubmodel {
        &self.image.separated
    }

    pub fn image(&self) -> &MeetImpImage {
        &self.image
    }

    /// The model `M∧,→`.
    pub fn meet_impl_model(&self) -> &ColouredModel {
        &self.image.image.model
    }

    pub fn q(&self, u: &UpSet) -> UpSet {
        expect_carrier(u, self.model.len(), "q");
        let s = &self.image.separated;
        s.model.poset().up_closure(s.embedding.iter().enumerate().filter(|&(_, &x)| u.contains(x)).map(|(i, _)| i))
    }

    pub fn r(&self, v: &UpSet) -> UpSet {
        let s = &self.image.separated;
        expect_carrier(v, s.model.len(), "r");
        let mut outside = fixedbitset::FixedBitSet::with_capacity(self.model.len());
        for (i, &x) in s.embedding.iter().enumerate() {
            if !v.contains(i) {
                outside.insert(x);
            }
        }
        let mut bits = self.model.poset().down_closure(&outside);
        bits.toggle_range(..);
        self.model.poset().upset_from_bits_unchecked(bits)
    }

    pub fn h(&self, w: &UpSet) -> UpSet {
        expect_carrier(w, self.meet_impl_model().len(), "h");
        let s = &self.image.separated;
        let mut bits = fixedbitset::FixedBitSet::with_capacity(s.model.len());
        for (i, &fx) in self.image.map.iter().enumerate() {
            if w.contains(fx) {
                bits.insert(i);
            }
        }
        s.model.poset().upset_from_bits_unchecked(bits)
    }

    pub fn h_flat(&self, v: &UpSet) -> UpSet {
        expect_carrier(v, self.image.separated.model.len(), "h♭");
        let target = self.meet_impl_model();
        let mut bits = fixedbitset::FixedBitSet::with_capacity(target.len());
        for i in v.points() {
            bits.insert(self.image.map[i]);
        }
        target.poset().upset_from_bits_unchecked(bits)
    }

    /// Restricts an up-set of a store submodel containing `M∧,→`.
    pub fn t(&self, sub: &UniversalSubmodel, u: &UpSet) -> Result<UpSet, KripkeError> {
        if u.carrier_len() != sub.len() {
            return Err(KripkeError::CarrierMismatch { expected: sub.len(), found: u.carrier_len() });
        }
        let image = &self.image.image;
        let mut bits = fixedbitset::FixedBitSet::with_capacity(image.len());
        for (i, &id) in image.ids.iter().enumerate() {
            let j = sub.index_of(id).ok_or(KripkeError::CarrierMismatch { expected: image.len(), found: sub.len() })?;
            if u.contains(j) {
                bits.insert(i);
            }
        }
        Ok(image.model.poset().upset_from_bits_unchecked(bits))
    }

    pub fn rh(&self, w: &UpSet) -> UpSet {
        self.r(&self.h(w))
    }

    /// `r h h♭ q (u)`, the least `(∧,→)`-definable up-set containing `u`.
    pub fn closure(&self, u: &UpSet) -> UpSet {
        self.rh(&self.h_flat(&self.q(u)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{Colour, Poset};
    use crate::universal::{build_truncated_universal, DEFAULT_POINT_BUDGET};

    #[test]
    fn ladder_maps() {
        let mut store = UniverseStore::new(1).unwrap();
        let t = build_truncated_universal(&mut store, 6, DEFAULT_POINT_BUDGET).unwrap();
        let bundle = restriction_adjoints(t.model(), &mut store).unwrap();
        assert_eq!(bundle.separated().model.len(), 2);
        assert_eq!(bundle.meet_impl_model().len(), 1);
        let empty_s = bundle.separated().model.poset().empty_upset();
        // r(∅): only m1 (index 0) has no separated point above it.
        assert_eq!(bundle.r(&empty_s).to_vec(), vec![0]);
        let full = bundle.meet_impl_model().poset().full_upset();
        assert!(bundle.rh(&full).is_full());
        let t_full = bundle.t(&t.submodel, &t.model().poset().full_upset()).unwrap();
        assert!(t_full.is_full());
    }

    #[test]
    fn q_after_r_is_identity() {
        let p = Poset::from_covers(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        let m = ColouredModel::new(p, 2, vec![Colour(0), Colour(0b01), Colour(0b10), Colour(0b11)]).unwrap();
        let mut store = UniverseStore::new(2).unwrap();
        let bundle = restriction_adjoints(&m, &mut store).unwrap();
        for v in bundle.separated().model.poset().all_upsets() {
            assert_eq!(bundle.q(&bundle.r(&v)), v);
        }
        for u in m.poset().all_upsets() {
            let c = bundle.closure(&u);
            assert!(u.is_subset(&c));
            assert_eq!(bundle.closure(&c), c);
        }
    }
}
