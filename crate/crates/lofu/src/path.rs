//! The discrete path space and its tube cover.
//!
//! A path is a vertex sequence `(v_0, ..., v_L)` with `L >= 1` steps in
//! which consecutive vertices span a simplex (lazy steps allowed), and
//! the path space is the disjoint union over lengths `1..=L_max`.
//!
//! A tuple of tube indices is nonempty when the union of the members'
//! step sweeps spans a simplex at every step, and the endpoint tuples
//! are compatible under the endpoint map (their vertex sets span), so
//! that the endpoint map is a genuine morphism onto the cover of `M^2`.
//! The joint-sweep rule is the combinatorial stand-in for tubes staying
//! uniformly one cover element apart through the whole sweep; with it,
//! every member of a nonempty tuple is itself a witness path, and the
//! stop-at-s retraction onto constant paths carries all prism cells of
//! the nerve, which is what makes the pinned subcomplex acyclic in
//! every degree rather than only degree zero.

use std::collections::HashMap;
use std::sync::Arc;

use crate::base::{BaseSpaces, ProductCover};
use crate::complex::SimplicialComplex;
use crate::cover::{Cover, Nerve};
use crate::error::{LofuError, Result};
use crate::morphism::CoverMorphism;

/// Largest vertex count for which endpoint-pair masks fit in a `u128`.
pub const MAX_PATH_VERTICES: usize = 11;

pub struct PathSpace {
    pub complex: Arc<SimplicialComplex>,
    pub l_max: usize,
    paths: Vec<Vec<u8>>,
    offsets: Vec<usize>, // offsets[l] = first id of length-l paths, 1-indexed
    ids: HashMap<Vec<u8>, u32>,
    eps: Vec<u16>, // endpoint pair s*V + e per path
    close_rows: Vec<Vec<u64>>,
    stratum_words: Vec<usize>,
    constants: Vec<Vec<u32>>, // constants[l-1][v]
    by_eps: Vec<Vec<u32>>,    // ascending path ids per endpoint pair
}

impl PathSpace {
    pub fn enumerate(complex: &Arc<SimplicialComplex>, l_max: usize) -> Result<Arc<PathSpace>> {
        if l_max < 1 {
            return Err(LofuError::invalid("l_max must be at least 1"));
        }
        let v = complex.vertex_count();
        if v > MAX_PATH_VERTICES {
            return Err(LofuError::invalid(format!(
                "path space supports at most {MAX_PATH_VERTICES} vertices, complex has {v}"
            )));
        }
        let mut paths: Vec<Vec<u8>> = Vec::new();
        let mut offsets = vec![0usize; l_max + 2];
        for l in 1..=l_max {
            offsets[l] = paths.len();
            let mut cur: Vec<u8> = Vec::with_capacity(l + 1);
            enumerate_paths_rec(complex, l, &mut cur, &mut paths);
        }
        offsets[l_max + 1] = paths.len();
        // fix up: offsets[l] should point at the first length-l path
        let mut ids = HashMap::new();
        for (i, p) in paths.iter().enumerate() {
            ids.insert(p.clone(), i as u32);
        }
        let eps: Vec<u16> = paths
            .iter()
            .map(|p| (p[0] as u16) * v as u16 + *p.last().unwrap() as u16)
            .collect();

        // Two same-length paths are close when every step sweep spans a
        // simplex: the union of the two step edges, not just positions
        // pairwise.  The sweep accounts for where the paths travel
        // between samples; with positions alone, tubes on the circle
        // overlap "across the far side" and the pinned coboundary
        // systems of nontrivial classes become inconsistent.
        let mut close_rows = Vec::with_capacity(l_max);
        let mut stratum_words = Vec::with_capacity(l_max);
        for l in 1..=l_max {
            let lo = offsets[l];
            let hi = offsets[l + 1];
            let s = hi - lo;
            let w = s.div_ceil(64);
            let mut rows = vec![0u64; s * w];
            for a in 0..s {
                for b in a..s {
                    let pa = &paths[lo + a];
                    let pb = &paths[lo + b];
                    let close = (0..l).all(|i| {
                        let mask = (1u32 << pa[i])
                            | (1 << pa[i + 1])
                            | (1 << pb[i])
                            | (1 << pb[i + 1]);
                        complex.spans_mask(mask)
                    });
                    if close {
                        rows[a * w + b / 64] |= 1 << (b % 64);
                        rows[b * w + a / 64] |= 1 << (a % 64);
                    }
                }
            }
            close_rows.push(rows);
            stratum_words.push(w);
        }

        let mut constants = Vec::with_capacity(l_max);
        for l in 1..=l_max {
            let row: Vec<u32> = (0..v as u8)
                .map(|x| ids[&vec![x; l + 1]])
                .collect();
            constants.push(row);
        }
        let mut by_eps = vec![Vec::new(); v * v];
        for (i, &pair) in eps.iter().enumerate() {
            by_eps[pair as usize].push(i as u32);
        }

        Ok(Arc::new(PathSpace {
            complex: complex.clone(),
            l_max,
            paths,
            offsets,
            ids,
            eps,
            close_rows,
            stratum_words,
            constants,
            by_eps,
        }))
    }

    pub fn count(&self) -> usize {
        self.paths.len()
    }

    pub fn path(&self, id: u32) -> &[u8] {
        &self.paths[id as usize]
    }

    pub fn path_id(&self, p: &[u8]) -> Option<u32> {
        self.ids.get(p).copied()
    }

    pub fn length(&self, id: u32) -> usize {
        self.paths[id as usize].len() - 1
    }

    pub fn eps_pair(&self, id: u32) -> u16 {
        self.eps[id as usize]
    }

    pub fn start(&self, id: u32) -> u8 {
        self.paths[id as usize][0]
    }

    pub fn end(&self, id: u32) -> u8 {
        *self.paths[id as usize].last().unwrap()
    }

    pub fn constant(&self, v: u8, l: usize) -> u32 {
        self.constants[l - 1][v as usize]
    }

    /// Ascending path ids with the given endpoint pair.
    pub fn paths_with_eps(&self, pair: u16) -> &[u32] {
        &self.by_eps[pair as usize]
    }

    /// Join product: concatenation when the endpoints meet and the
    /// length budget allows it.
    pub fn join(&self, p: u32, q: u32) -> Result<u32> {
        if self.end(p) != self.start(q) {
            return Err(LofuError::invalid(format!(
                "join endpoint mismatch: {:?} then {:?}",
                self.path(p),
                self.path(q)
            )));
        }
        let lp = self.length(p);
        let lq = self.length(q);
        if lp + lq > self.l_max {
            return Err(LofuError::truncation(
                "join",
                format!("length {}+{} exceeds L_max {}", lp, lq, self.l_max),
            ));
        }
        let mut joined = self.path(p).to_vec();
        joined.extend_from_slice(&self.path(q)[1..]);
        Ok(self.ids[&joined])
    }

    pub fn joinable(&self, p: u32, q: u32) -> bool {
        self.end(p) == self.start(q) && self.length(p) + self.length(q) <= self.l_max
    }

    /// Are two same-length paths close (every step sweep spans)?
    pub fn pair_close(&self, a: u32, b: u32) -> bool {
        let l = self.length(a);
        if self.length(b) != l {
            return false;
        }
        let lo = self.offsets[l];
        let w = self.stratum_words[l - 1];
        let (ai, bi) = (a as usize - lo, b as usize - lo);
        self.close_rows[l - 1][ai * w + bi / 64] >> (bi % 64) & 1 == 1
    }

    /// Joint tube test for one slot: the union of all members' step
    /// sweeps must span a simplex at every step.  Every member is then a
    /// witness path of the common intersection, so the returned endpoint
    /// mask is the members' own endpoint pair.
    pub fn slot_info(&self, sorted_paths: &[u32]) -> (bool, u128) {
        if !self.joint_close(sorted_paths) {
            return (false, 0);
        }
        let mut eps_mask = 0u128;
        for &p in sorted_paths {
            eps_mask |= 1 << self.eps[p as usize];
        }
        (true, eps_mask)
    }

    /// Do the given same-length paths jointly sweep within one simplex
    /// at every step?
    pub fn joint_close(&self, paths: &[u32]) -> bool {
        let l = self.length(paths[0]);
        if paths.iter().any(|&p| self.length(p) != l) {
            return false;
        }
        for i in 0..l {
            let mut mask = 0u32;
            for &p in paths {
                let path = self.path(p);
                mask |= (1 << path[i]) | (1 << path[i + 1]);
            }
            if !self.complex.spans_mask(mask) {
                return false;
            }
        }
        true
    }

    /// Vertex mask of the start (resp. end) vertices of an endpoint-pair
    /// mask.
    pub fn eps_mask_starts(&self, mask: u128) -> u32 {
        let v = self.complex.vertex_count() as u32;
        let mut out = 0u32;
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros();
            m &= m - 1;
            out |= 1 << (b / v);
        }
        out
    }

    pub fn eps_mask_ends(&self, mask: u128) -> u32 {
        let v = self.complex.vertex_count() as u32;
        let mut out = 0u32;
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros();
            m &= m - 1;
            out |= 1 << (b % v);
        }
        out
    }
}

fn enumerate_paths_rec(
    complex: &SimplicialComplex,
    l: usize,
    cur: &mut Vec<u8>,
    out: &mut Vec<Vec<u8>>,
) {
    if cur.len() == l + 1 {
        out.push(cur.clone());
        return;
    }
    let v = complex.vertex_count() as u8;
    for x in 0..v {
        if let Some(&last) = cur.last() {
            if !complex.close(last, x) {
                continue;
            }
        }
        cur.push(x);
        enumerate_paths_rec(complex, l, cur, out);
        cur.pop();
    }
}

/// Tube cover of the path space: one element per enumerated path.
pub struct TubeCover {
    pub space: Arc<PathSpace>,
}

impl Cover for TubeCover {
    fn len(&self) -> usize {
        self.space.count()
    }

    fn tuple_nonempty(&self, t: &[u32]) -> bool {
        let sp = &self.space;
        let l = sp.length(t[0]);
        if t.iter().any(|&p| sp.length(p) != l) {
            return false; // length stratification
        }
        let mut starts = 0u32;
        let mut ends = 0u32;
        for &p in t {
            starts |= 1 << sp.start(p);
            ends |= 1 << sp.end(p);
        }
        if !sp.complex.spans_mask(starts) || !sp.complex.spans_mask(ends) {
            return false;
        }
        sp.joint_close(t)
    }

    fn name(&self) -> String {
        format!("{}-tube(L{})", self.space.complex.name(), self.space.l_max)
    }
}

/// Endpoint morphism from the tube nerve to the nerve of the `M^2`
/// product cover.
pub fn epsilon_morphism(
    space: &Arc<PathSpace>,
    tube: &Arc<Nerve>,
    base: &BaseSpaces,
) -> Result<CoverMorphism> {
    let m2: &Arc<ProductCover> = base.cover(2);
    let map: Vec<u32> = (0..space.count() as u32)
        .map(|p| m2.encode(&[space.start(p), space.end(p)]))
        .collect();
    CoverMorphism::new("epsilon", tube, base.nerve(2), map)
}

/// Constant-path inclusion at length `l`, from the star cover of `M`
/// into the tube cover.
pub fn constant_morphism(
    space: &Arc<PathSpace>,
    star: &Arc<Nerve>,
    tube: &Arc<Nerve>,
    l: usize,
) -> Result<CoverMorphism> {
    let map: Vec<u32> = (0..space.complex.vertex_count() as u8)
        .map(|v| space.constant(v, l))
        .collect();
    CoverMorphism::new(format!("const(L{l})"), star, tube, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixture;
    use crate::cover::DEFAULT_TUPLE_CAP;

    #[test]
    fn point_complex_paths() {
        let c = fixture("point").unwrap();
        let sp = PathSpace::enumerate(&c, 2).unwrap();
        assert_eq!(sp.count(), 2); // (0,0) and (0,0,0)
    }

    #[test]
    fn interval_length_one_paths() {
        let c = fixture("interval").unwrap();
        let sp = PathSpace::enumerate(&c, 1).unwrap();
        assert_eq!(sp.count(), 4);
    }

    #[test]
    fn circle_length_one_paths() {
        let c = fixture("circle").unwrap();
        let sp = PathSpace::enumerate(&c, 1).unwrap();
        assert_eq!(sp.count(), 9); // 3 constants + 6 edge steps
    }

    #[test]
    fn tube_overlap_basics() {
        let c = fixture("circle").unwrap();
        let sp = PathSpace::enumerate(&c, 2).unwrap();
        let tube = TubeCover { space: sp.clone() };
        let p01 = sp.path_id(&[0, 1]).unwrap();
        let p02 = sp.path_id(&[0, 2]).unwrap();
        let c00 = sp.path_id(&[0, 0]).unwrap();
        // self-overlap with witness = the path itself
        assert!(tube.tuple_nonempty(&[p01, p01]));
        // witness search decides ((0,1),(0,2)): the step sweeps cover
        // all three vertices, which span no simplex, so it is empty;
        // the lazy step (0,0) stays one sweep away from either
        assert!(!tube.tuple_nonempty(&[p01, p02]));
        assert!(tube.tuple_nonempty(&[c00, p01]));
        assert!(tube.tuple_nonempty(&[c00, p02]));
        // mixed lengths are empty
        let c00 = sp.path_id(&[0, 0]).unwrap();
        let c000 = sp.path_id(&[0, 0, 0]).unwrap();
        assert!(!tube.tuple_nonempty(&[c00, c000]));
    }

    #[test]
    fn join_and_errors() {
        let c = fixture("circle").unwrap();
        let sp = PathSpace::enumerate(&c, 2).unwrap();
        let p01 = sp.path_id(&[0, 1]).unwrap();
        let p12 = sp.path_id(&[1, 2]).unwrap();
        let p20 = sp.path_id(&[2, 0]).unwrap();
        let j = sp.join(p01, p12).unwrap();
        assert_eq!(sp.path(j), &[0, 1, 2]);
        assert!(sp.join(p01, p20).is_err()); // endpoint mismatch
        let c00_2 = sp.path_id(&[0, 0, 0]).unwrap();
        // budget: 2 + 1 > 2
        assert!(matches!(
            sp.join(c00_2, sp.path_id(&[0, 0]).unwrap()),
            Err(LofuError::Truncation { .. })
        ));
        // joining constants gives the longer constant
        let c00 = sp.path_id(&[0, 0]).unwrap();
        assert_eq!(sp.join(c00, c00).unwrap(), c00_2);
    }

    #[test]
    fn epsilon_and_constant_morphisms_are_consistent() {
        let c = fixture("circle").unwrap();
        let sp = PathSpace::enumerate(&c, 2).unwrap();
        let base = BaseSpaces::build(&c, &[3, 3], DEFAULT_TUPLE_CAP).unwrap();
        let tube: Arc<dyn Cover> = Arc::new(TubeCover { space: sp.clone() });
        let nerve = Nerve::build(tube, 2, DEFAULT_TUPLE_CAP).unwrap();
        let eps = epsilon_morphism(&sp, &nerve, &base).unwrap();
        eps.verify_consistency(2).unwrap();
        for l in 1..=2 {
            let cm = constant_morphism(&sp, base.nerve(1), &nerve, l).unwrap();
            cm.verify_consistency(2).unwrap();
        }
    }

    #[test]
    fn length_stratification_of_nerve_tuples() {
        let c = fixture("circle").unwrap();
        let sp = PathSpace::enumerate(&c, 2).unwrap();
        let tube: Arc<dyn Cover> = Arc::new(TubeCover { space: sp.clone() });
        let nerve = Nerve::build(tube, 2, DEFAULT_TUPLE_CAP).unwrap();
        for i in 0..nerve.count(2) as u32 {
            let t = nerve.tuple(2, i);
            assert_eq!(sp.length(t[0]), sp.length(t[1]));
        }
    }
}
