//! Covers and their nerves.
//!
//! A cover is a finite index set together with a decision procedure for
//! whether an ordered tuple of indices (repetition allowed) has nonempty
//! common intersection.  The emptiness verdict must be permutation
//! invariant and closed under sub-tuples; every concrete cover in this
//! crate establishes these by exhibiting a witness point.
//!
//! The nerve materializes the nonempty tuples degree by degree in
//! lexicographic order.  Degrees beyond the stored depth can still be
//! traversed by streaming, which is how the large identity checks run
//! without holding tens of millions of tuples in memory.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{LofuError, Result};

/// Default cap on materialized tuples per nerve.
pub const DEFAULT_TUPLE_CAP: usize = 5_000_000;

pub trait Cover {
    fn len(&self) -> usize;
    /// Nonemptiness of the intersection indexed by the ordered tuple.
    fn tuple_nonempty(&self, t: &[u32]) -> bool;
    fn name(&self) -> String;
}

struct Level {
    width: usize,
    flat: Vec<u32>,
    index: HashMap<u128, u32>,
}

impl Level {
    fn count(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.flat.len() / self.width
        }
    }
}

fn pack(t: &[u32]) -> u128 {
    debug_assert!(t.len() <= 5);
    let mut key: u128 = t.len() as u128;
    for &x in t {
        debug_assert!(x < (1 << 24));
        key = (key << 25) | ((x as u128) + 1);
    }
    key
}

/// The nerve of a cover: all nonempty ordered tuples up to a depth, in
/// lexicographic order, with constant-time lookup.
pub struct Nerve {
    cover: Arc<dyn Cover>,
    levels: Vec<Level>,
}

impl std::fmt::Debug for Nerve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let counts: Vec<usize> = (1..=self.depth()).map(|d| self.count(d)).collect();
        f.debug_struct("Nerve")
            .field("cover", &self.name())
            .field("counts", &counts)
            .finish()
    }
}

impl Nerve {
    /// Enumerates all nonempty tuples of length `1..=depth`.
    pub fn build(cover: Arc<dyn Cover>, depth: usize, cap: usize) -> Result<Arc<Nerve>> {
        let mut levels = Vec::with_capacity(depth);
        let mut total = 0usize;
        for d in 1..=depth {
            let mut flat = Vec::new();
            let mut index = HashMap::new();
            let mut count = 0usize;
            enumerate(cover.as_ref(), d, &mut |t| {
                if total + count >= cap {
                    return Err(LofuError::EnumerationOverflow {
                        what: cover.name(),
                        cap,
                    });
                }
                index.insert(pack(t), count as u32);
                flat.extend_from_slice(t);
                count += 1;
                Ok(())
            })?;
            total += count;
            levels.push(Level { width: d, flat, index });
        }
        Ok(Arc::new(Nerve { cover, levels }))
    }

    pub fn cover(&self) -> &Arc<dyn Cover> {
        &self.cover
    }

    pub fn name(&self) -> String {
        self.cover.name()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Number of stored tuples of length `d`.
    pub fn count(&self, d: usize) -> usize {
        self.levels[d - 1].count()
    }

    pub fn tuple(&self, d: usize, i: u32) -> &[u32] {
        let level = &self.levels[d - 1];
        let i = i as usize;
        &level.flat[i * level.width..(i + 1) * level.width]
    }

    pub fn tuple_id(&self, t: &[u32]) -> Option<u32> {
        let level = self.levels.get(t.len() - 1)?;
        level.index.get(&pack(t)).copied()
    }

    /// Id lookup that reports a morphism/nerve inconsistency on a miss.
    pub fn require_tuple_id(&self, t: &[u32]) -> Result<u32> {
        if t.len() > self.levels.len() {
            return Err(LofuError::invalid(format!(
                "nerve depth insufficient: {} has depth {}, tuple length {}",
                self.name(),
                self.levels.len(),
                t.len()
            )));
        }
        self.tuple_id(t).ok_or_else(|| {
            LofuError::invalid(format!(
                "tuple {:?} absent from nerve of {}",
                t,
                self.name()
            ))
        })
    }

    /// Visits tuples of length `d` in lexicographic order, from storage
    /// when available and by streaming enumeration otherwise.
    pub fn for_each_tuple(
        &self,
        d: usize,
        mut f: impl FnMut(&[u32]) -> Result<()>,
    ) -> Result<()> {
        if d <= self.levels.len() {
            let level = &self.levels[d - 1];
            for i in 0..level.count() {
                f(&level.flat[i * d..(i + 1) * d])?;
            }
            Ok(())
        } else {
            enumerate(self.cover.as_ref(), d, &mut f)
        }
    }
}

/// Depth-first lexicographic enumeration of nonempty length-`d` tuples.
/// Prefix pruning is sound because nonemptiness is closed under
/// sub-tuples.
fn enumerate(
    cover: &dyn Cover,
    d: usize,
    f: &mut impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    fn rec(
        cover: &dyn Cover,
        n: u32,
        d: usize,
        t: &mut Vec<u32>,
        f: &mut impl FnMut(&[u32]) -> Result<()>,
    ) -> Result<()> {
        if t.len() == d {
            return f(t);
        }
        for i in 0..n {
            t.push(i);
            if cover.tuple_nonempty(t) {
                rec(cover, n, d, t, f)?;
            }
            t.pop();
        }
        Ok(())
    }
    let n = cover.len() as u32;
    let mut t: Vec<u32> = Vec::with_capacity(d);
    rec(cover, n, d, &mut t, f)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Cover with one element; every tuple is nonempty.
    pub struct PointCover;
    impl Cover for PointCover {
        fn len(&self) -> usize {
            1
        }
        fn tuple_nonempty(&self, _t: &[u32]) -> bool {
            true
        }
        fn name(&self) -> String {
            "point".into()
        }
    }

    #[test]
    fn single_element_cover_nerve() {
        let nerve = Nerve::build(Arc::new(PointCover), 4, DEFAULT_TUPLE_CAP).unwrap();
        for d in 1..=4 {
            assert_eq!(nerve.count(d), 1);
            assert_eq!(nerve.tuple(d, 0), vec![0; d].as_slice());
        }
    }

    #[test]
    fn cap_triggers_overflow_error() {
        let err = Nerve::build(Arc::new(PointCover), 4, 2).unwrap_err();
        assert!(matches!(err, LofuError::EnumerationOverflow { .. }));
        assert_eq!(err.exit_code(), 2);
    }
}
