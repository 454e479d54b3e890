//! Index-level maps between covers and cochain pullback along them.
//!
//! Every structural map used by the pipelines (endpoint map, product
//! projections, fiber-power faces, join, constant-path and basepoint
//! inclusions, cylinder slices) acts index by index, so a morphism is a
//! total function on cover indices applied entrywise to tuples.  The
//! morphism is consistent when it sends nonempty tuples to nonempty
//! tuples; `pullback` reports the witness tuple when that fails.

use std::sync::Arc;

use crate::cochain::Cochain;
use crate::cover::Nerve;
use crate::error::{LofuError, Result};

pub struct CoverMorphism {
    pub name: String,
    pub source: Arc<Nerve>,
    pub target: Arc<Nerve>,
    map: Vec<u32>,
}

impl CoverMorphism {
    pub fn new(
        name: impl Into<String>,
        source: &Arc<Nerve>,
        target: &Arc<Nerve>,
        map: Vec<u32>,
    ) -> Result<Self> {
        if map.len() != source.cover().len() {
            return Err(LofuError::invalid(
                "morphism map length differs from source cover size",
            ));
        }
        Ok(CoverMorphism {
            name: name.into(),
            source: source.clone(),
            target: target.clone(),
            map,
        })
    }

    pub fn apply_index(&self, i: u32) -> u32 {
        self.map[i as usize]
    }

    pub fn apply_tuple(&self, t: &[u32], buf: &mut Vec<u32>) {
        buf.clear();
        buf.extend(t.iter().map(|&i| self.map[i as usize]));
    }

    /// `(m^* f)(t) = f(m(t))` for a cochain `f` on the target nerve.
    pub fn pullback(&self, f: &Cochain) -> Result<Cochain> {
        if !Arc::ptr_eq(&f.nerve, &self.target) {
            return Err(LofuError::invalid(format!(
                "pullback along {}: cochain lives on {}, expected {}",
                self.name,
                f.nerve.name(),
                self.target.name()
            )));
        }
        let k = f.degree;
        let mut out = Cochain::zero(&self.source, &f.group, k)?;
        let mut image = Vec::with_capacity(k + 1);
        for i in 0..self.source.count(k + 1) as u32 {
            let t = self.source.tuple(k + 1, i);
            self.apply_tuple(t, &mut image);
            let id = self.target.tuple_id(&image).ok_or_else(|| {
                LofuError::invalid(format!(
                    "morphism {} maps tuple {:?} to {:?}, absent from {}",
                    self.name,
                    t,
                    image,
                    self.target.name()
                ))
            })?;
            out.set_value(i, f.value(id));
        }
        Ok(out)
    }

    /// Checks that every stored source tuple maps to a target tuple,
    /// through the stored depths.
    pub fn verify_consistency(&self, max_degree: usize) -> Result<()> {
        let mut image = Vec::new();
        for d in 1..=max_degree.min(self.source.depth()) {
            for i in 0..self.source.count(d) as u32 {
                let t = self.source.tuple(d, i);
                self.apply_tuple(t, &mut image);
                if self.target.tuple_id(&image).is_none() {
                    return Err(LofuError::verification(
                        format!("morphism {} preserves nonemptiness", self.name),
                        t,
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::Cochain;
    use crate::cover::tests::PointCover;
    use crate::cover::{Cover, Nerve, DEFAULT_TUPLE_CAP};
    use rand::SeedableRng;

    struct TwoPoints;
    impl Cover for TwoPoints {
        fn len(&self) -> usize {
            2
        }
        fn tuple_nonempty(&self, t: &[u32]) -> bool {
            t.iter().all(|&i| i == t[0])
        }
        fn name(&self) -> String {
            "two-points".into()
        }
    }

    #[test]
    fn identity_pullback_is_identity() {
        let nerve = Nerve::build(Arc::new(TwoPoints), 3, DEFAULT_TUPLE_CAP).unwrap();
        let g = crate::group::parse_group_spec("Z/6").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let f = Cochain::random(&nerve, &g, 1, &mut rng).unwrap();
        let id = CoverMorphism::new("id", &nerve, &nerve, vec![0, 1]).unwrap();
        assert!(id.pullback(&f).unwrap().values_eq(&f));
    }

    #[test]
    fn collapse_pullback_is_constant() {
        let two = Nerve::build(Arc::new(TwoPoints), 2, DEFAULT_TUPLE_CAP).unwrap();
        let pt = Nerve::build(Arc::new(PointCover), 2, DEFAULT_TUPLE_CAP).unwrap();
        let g = crate::group::parse_group_spec("Z").unwrap();
        let mut f = Cochain::zero(&pt, &g, 0).unwrap();
        f.set_value(0, &[7]);
        let collapse = CoverMorphism::new("collapse", &two, &pt, vec![0, 0]).unwrap();
        let pulled = collapse.pullback(&f).unwrap();
        assert_eq!(pulled.value(0), &[7]);
        assert_eq!(pulled.value(1), &[7]);
    }

    #[test]
    fn pullback_commutes_with_delta() {
        let two = Nerve::build(Arc::new(TwoPoints), 4, DEFAULT_TUPLE_CAP).unwrap();
        let pt = Nerve::build(Arc::new(PointCover), 4, DEFAULT_TUPLE_CAP).unwrap();
        let g = crate::group::parse_group_spec("Z/6").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let f = Cochain::random(&pt, &g, 1, &mut rng).unwrap();
        let m = CoverMorphism::new("collapse", &two, &pt, vec![0, 0]).unwrap();
        let lhs = m.pullback(&f).unwrap().delta().unwrap();
        let rhs = m.pullback(&f.delta().unwrap()).unwrap();
        assert!(lhs.values_eq(&rhs));
    }
}
