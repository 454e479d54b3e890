//! Fiber powers of the tube cover, the loop cover, and the
//! figure-of-eight covers of composable pairs.
//!
//! An index of the l-th fiber power is an l-tuple of paths sharing both
//! endpoint vertices; the case l = 2 is the loop cover.  A tuple of such
//! indices is nonempty when each slot admits a common close witness path
//! and the witnesses can be chosen with one shared endpoint pair across
//! slots; on top of that the endpoint tuples themselves must span, so
//! the projection to the base covers stays a morphism.
//!
//! A figure-of-eight index at level l is a composable pair of level-l
//! indices whose slotwise joins fit the length budget; these covers are
//! exactly the sub-nerves on which the figure-of-eight operator is
//! defined.

use std::collections::HashMap;
use std::sync::Arc;

use crate::base::BaseSpaces;
use crate::complex::SimplicialComplex;
use crate::cover::{Cover, Nerve};
use crate::error::{LofuError, Result};
use crate::group::AbelianGroup;
use crate::morphism::CoverMorphism;
use crate::path::{constant_morphism, epsilon_morphism, PathSpace, TubeCover};

/// The cover `Γ^[l]` of tuples of paths with common endpoints.
pub struct FiberPowerCover {
    pub space: Arc<PathSpace>,
    pub l: usize,
    flat: Vec<u32>,
    ids: HashMap<u128, u32>,
    eps: Vec<u16>,
}

fn pack_paths(paths: &[u32]) -> u128 {
    debug_assert!(paths.len() <= 6);
    let mut key: u128 = paths.len() as u128;
    for &p in paths {
        key = (key << 21) | (p as u128 + 1);
    }
    key
}

impl FiberPowerCover {
    pub fn build(space: &Arc<PathSpace>, l: usize) -> Arc<FiberPowerCover> {
        assert!(l >= 1);
        let mut flat = Vec::new();
        let mut count = 0u32;
        let mut ids = HashMap::new();
        let mut eps = Vec::new();
        let mut cur: Vec<u32> = Vec::with_capacity(l);
        fn rec(
            space: &PathSpace,
            l: usize,
            cur: &mut Vec<u32>,
            flat: &mut Vec<u32>,
            ids: &mut HashMap<u128, u32>,
            eps: &mut Vec<u16>,
            count: &mut u32,
        ) {
            if cur.len() == l {
                ids.insert(pack_paths(cur), *count);
                flat.extend_from_slice(cur);
                eps.push(space.eps_pair(cur[0]));
                *count += 1;
                return;
            }
            for p in 0..space.count() as u32 {
                if let Some(&first) = cur.first() {
                    if space.eps_pair(p) != space.eps_pair(first) {
                        continue;
                    }
                }
                cur.push(p);
                rec(space, l, cur, flat, ids, eps, count);
                cur.pop();
            }
        }
        rec(space, l, &mut cur, &mut flat, &mut ids, &mut eps, &mut count);
        Arc::new(FiberPowerCover {
            space: space.clone(),
            l,
            flat,
            ids,
            eps,
        })
    }

    pub fn count(&self) -> usize {
        self.eps.len()
    }

    pub fn slots(&self, idx: u32) -> &[u32] {
        &self.flat[idx as usize * self.l..(idx as usize + 1) * self.l]
    }

    pub fn id_of(&self, paths: &[u32]) -> Option<u32> {
        self.ids.get(&pack_paths(paths)).copied()
    }

    pub fn eps_pair(&self, idx: u32) -> u16 {
        self.eps[idx as usize]
    }

    pub fn start(&self, idx: u32) -> u8 {
        self.space.start(self.slots(idx)[0])
    }

    pub fn end(&self, idx: u32) -> u8 {
        self.space.end(self.slots(idx)[0])
    }

    /// Witness test shared with the figure-of-eight covers: common
    /// close paths per slot, linked through one endpoint pair.
    fn witness_eps_mask(&self, t: &[u32]) -> u128 {
        let mut inter = u128::MAX;
        let mut sorted: Vec<u32> = Vec::with_capacity(t.len());
        for slot in 0..self.l {
            sorted.clear();
            sorted.extend(t.iter().map(|&idx| self.slots(idx)[slot]));
            sorted.sort_unstable();
            sorted.dedup();
            let (ok, mask) = self.space.slot_info(&sorted);
            if !ok {
                return 0;
            }
            inter &= mask;
            if inter == 0 {
                return 0;
            }
        }
        inter
    }

    fn base_compatible(&self, t: &[u32]) -> bool {
        let complex = &self.space.complex;
        let mut starts = 0u32;
        let mut ends = 0u32;
        for &idx in t {
            starts |= 1 << self.start(idx);
            ends |= 1 << self.end(idx);
        }
        complex.spans_mask(starts) && complex.spans_mask(ends)
    }
}

impl Cover for FiberPowerCover {
    fn len(&self) -> usize {
        self.count()
    }

    fn tuple_nonempty(&self, t: &[u32]) -> bool {
        self.base_compatible(t) && self.witness_eps_mask(t) != 0
    }

    fn name(&self) -> String {
        format!(
            "{}-gamma[{}](L{})",
            self.space.complex.name(),
            self.l,
            self.space.l_max
        )
    }
}

/// Figure-of-eight cover at level `l`: composable, joinable pairs.
/// Members reference level-l indices (path ids when l = 1, fiber-power
/// ids otherwise).
pub struct F8Cover {
    pub space: Arc<PathSpace>,
    pub l: usize,
    fiber: Option<Arc<FiberPowerCover>>,
    members: Vec<(u32, u32, u32)>, // (x, y, joined)
    ids: HashMap<u64, u32>,
}

impl F8Cover {
    pub fn build(
        space: &Arc<PathSpace>,
        l: usize,
        fiber: Option<&Arc<FiberPowerCover>>,
    ) -> Arc<F8Cover> {
        let level_count = match fiber {
            None => space.count(),
            Some(f) => {
                assert_eq!(f.l, l);
                f.count()
            }
        };
        // group level indices by (start, end) to pair composable ones
        let v = space.complex.vertex_count();
        let mut by_se: Vec<Vec<u32>> = vec![Vec::new(); v * v];
        for i in 0..level_count as u32 {
            let pair = match fiber {
                None => space.eps_pair(i),
                Some(f) => f.eps_pair(i),
            };
            by_se[pair as usize].push(i);
        }
        let slot_paths = |i: u32, buf: &mut Vec<u32>| {
            buf.clear();
            match fiber {
                None => buf.push(i),
                Some(f) => buf.extend_from_slice(f.slots(i)),
            }
        };
        let mut members = Vec::new();
        let mut xbuf = Vec::new();
        let mut ybuf = Vec::new();
        let mut jbuf = Vec::new();
        for s in 0..v {
            for m in 0..v {
                for e in 0..v {
                    let xs = &by_se[s * v + m];
                    let ys = &by_se[m * v + e];
                    for &x in xs {
                        slot_paths(x, &mut xbuf);
                        for &y in ys {
                            slot_paths(y, &mut ybuf);
                            if !xbuf
                                .iter()
                                .zip(&ybuf)
                                .all(|(&p, &q)| space.joinable(p, q))
                            {
                                continue;
                            }
                            jbuf.clear();
                            for (&p, &q) in xbuf.iter().zip(&ybuf) {
                                jbuf.push(space.join(p, q).expect("joinable"));
                            }
                            let joined = match fiber {
                                None => jbuf[0],
                                Some(f) => f.id_of(&jbuf).expect("joined index exists"),
                            };
                            members.push((x, y, joined));
                        }
                    }
                }
            }
        }
        members.sort_unstable();
        let ids = members
            .iter()
            .enumerate()
            .map(|(i, &(x, y, _))| (((x as u64) << 32) | y as u64, i as u32))
            .collect();
        Arc::new(F8Cover {
            space: space.clone(),
            l,
            fiber: fiber.cloned(),
            members,
            ids,
        })
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn member(&self, i: u32) -> (u32, u32, u32) {
        self.members[i as usize]
    }

    pub fn id_of(&self, x: u32, y: u32) -> Option<u32> {
        self.ids.get(&(((x as u64) << 32) | y as u64)).copied()
    }

    fn slot_path(&self, level_idx: u32, slot: usize) -> u32 {
        match &self.fiber {
            None => level_idx,
            Some(f) => f.slots(level_idx)[slot],
        }
    }

    /// (start, middle, end) vertices of a member.
    pub fn vertices(&self, i: u32) -> (u8, u8, u8) {
        let (x, y, _) = self.members[i as usize];
        let p = self.slot_path(x, 0);
        let q = self.slot_path(y, 0);
        (
            self.space.start(p),
            self.space.end(p),
            self.space.end(q),
        )
    }
}

impl Cover for F8Cover {
    fn len(&self) -> usize {
        self.members.len()
    }

    fn tuple_nonempty(&self, t: &[u32]) -> bool {
        let space = &self.space;
        let complex = &space.complex;
        let mut starts = 0u32;
        let mut mids = 0u32;
        let mut ends = 0u32;
        for &i in t {
            let (s, m, e) = self.vertices(i);
            starts |= 1 << s;
            mids |= 1 << m;
            ends |= 1 << e;
        }
        if !complex.spans_mask(starts) || !complex.spans_mask(mids) || !complex.spans_mask(ends) {
            return false;
        }
        // per-side witnesses linked through a shared middle vertex
        let mut sorted: Vec<u32> = Vec::with_capacity(t.len());
        let mut side_mask = |pick_y: bool| -> u128 {
            let mut inter = u128::MAX;
            for slot in 0..self.l {
                sorted.clear();
                sorted.extend(t.iter().map(|&i| {
                    let (x, y, _) = self.members[i as usize];
                    self.slot_path(if pick_y { y } else { x }, slot)
                }));
                sorted.sort_unstable();
                sorted.dedup();
                let (ok, mask) = space.slot_info(&sorted);
                if !ok {
                    return 0;
                }
                inter &= mask;
                if inter == 0 {
                    return 0;
                }
            }
            inter
        };
        let x_mask = side_mask(false);
        if x_mask == 0 {
            return false;
        }
        let y_mask = side_mask(true);
        if y_mask == 0 {
            return false;
        }
        space.eps_mask_ends(x_mask) & space.eps_mask_starts(y_mask) != 0
    }

    fn name(&self) -> String {
        format!(
            "{}-eight[{}](L{})",
            self.space.complex.name(),
            self.l,
            self.space.l_max
        )
    }
}

/// All covers, nerves and structural morphisms needed by the loop-side
/// pipelines for one fixture, coefficient group and cocycle degree.
pub struct LoopSystem {
    pub group: AbelianGroup,
    pub k: usize,
    pub basepoint: u8,
    pub seed: u64,
    pub base: BaseSpaces,
    pub space: Arc<PathSpace>,
    pub tube_cover: Arc<TubeCover>,
    pub tube: Arc<Nerve>,
    pub lambda_cover: Arc<FiberPowerCover>,
    pub lambda: Arc<Nerve>,
    pub gamma3_cover: Arc<FiberPowerCover>,
    pub gamma3: Arc<Nerve>,
    pub f8_1_cover: Arc<F8Cover>,
    pub f8_1: Arc<Nerve>,
    pub f8_2_cover: Arc<F8Cover>,
    pub f8_2: Arc<Nerve>,
    pub f8_3_cover: Arc<F8Cover>,
    pub f8_3: Arc<Nerve>,
}

impl LoopSystem {
    pub fn build(
        complex: &Arc<SimplicialComplex>,
        group: &AbelianGroup,
        k: usize,
        l_max: usize,
        basepoint: u8,
        seed: u64,
        cap: usize,
    ) -> Result<LoopSystem> {
        if k < 1 {
            return Err(LofuError::invalid("degree must be at least 1"));
        }
        if (basepoint as usize) >= complex.vertex_count() {
            return Err(LofuError::invalid("basepoint out of range"));
        }
        let base = BaseSpaces::build(complex, &[k + 2, k + 2, (k + 1).max(2)], cap)?;
        let space = PathSpace::enumerate(complex, l_max)?;
        let tube_cover = Arc::new(TubeCover { space: space.clone() });
        let tube = Nerve::build(tube_cover.clone() as Arc<dyn Cover>, k + 1, cap)?;
        let lambda_cover = FiberPowerCover::build(&space, 2);
        let lambda = Nerve::build(lambda_cover.clone() as Arc<dyn Cover>, k, cap)?;
        let gamma3_cover = FiberPowerCover::build(&space, 3);
        let gamma3 = Nerve::build(
            gamma3_cover.clone() as Arc<dyn Cover>,
            (k - 1).max(1),
            cap,
        )?;
        let f8_1_cover = F8Cover::build(&space, 1, None);
        let f8_1 = Nerve::build(f8_1_cover.clone() as Arc<dyn Cover>, k, cap)?;
        let f8_2_cover = F8Cover::build(&space, 2, Some(&lambda_cover));
        let f8_2 = Nerve::build(f8_2_cover.clone() as Arc<dyn Cover>, k, cap)?;
        let f8_3_cover = F8Cover::build(&space, 3, Some(&gamma3_cover));
        let f8_3 = Nerve::build(
            f8_3_cover.clone() as Arc<dyn Cover>,
            (k - 1).max(1),
            cap,
        )?;
        Ok(LoopSystem {
            group: group.clone(),
            k,
            basepoint,
            seed,
            base,
            space,
            tube_cover,
            tube,
            lambda_cover,
            lambda,
            gamma3_cover,
            gamma3,
            f8_1_cover,
            f8_1,
            f8_2_cover,
            f8_2,
            f8_3_cover,
            f8_3,
        })
    }

    pub fn epsilon(&self) -> Result<CoverMorphism> {
        epsilon_morphism(&self.space, &self.tube, &self.base)
    }

    pub fn constant(&self, l: usize) -> Result<CoverMorphism> {
        constant_morphism(&self.space, self.base.nerve(1), &self.tube, l)
    }

    /// Fiber-power face `ϱ_j : Γ^[2] → Γ` (omit slot j, 1-indexed).
    pub fn rho_lambda(&self, j: usize) -> Result<CoverMorphism> {
        assert!((1..=2).contains(&j));
        let map: Vec<u32> = (0..self.lambda_cover.count() as u32)
            .map(|i| self.lambda_cover.slots(i)[2 - j])
            .collect();
        CoverMorphism::new(format!("rho_{j}[2]"), &self.lambda, &self.tube, map)
    }

    /// Fiber-power face `ϱ_j : Γ^[3] → Γ^[2]`.
    pub fn rho_gamma3(&self, j: usize) -> Result<CoverMorphism> {
        assert!((1..=3).contains(&j));
        let mut map = Vec::with_capacity(self.gamma3_cover.count());
        let mut buf = Vec::with_capacity(2);
        for i in 0..self.gamma3_cover.count() as u32 {
            let slots = self.gamma3_cover.slots(i);
            buf.clear();
            for (s, &p) in slots.iter().enumerate() {
                if s != j - 1 {
                    buf.push(p);
                }
            }
            map.push(self.lambda_cover.id_of(&buf).expect("face index exists"));
        }
        CoverMorphism::new(format!("rho_{j}[3]"), &self.gamma3, &self.lambda, map)
    }

    fn f8_parts(&self, l: usize) -> (&Arc<F8Cover>, &Arc<Nerve>, &Arc<Nerve>) {
        match l {
            1 => (&self.f8_1_cover, &self.f8_1, &self.tube),
            2 => (&self.f8_2_cover, &self.f8_2, &self.lambda),
            3 => (&self.f8_3_cover, &self.f8_3, &self.gamma3),
            _ => panic!("figure-of-eight level {l} not built"),
        }
    }

    /// Projection of a figure-of-eight index to its first factor
    /// (the loop over the first two base points).
    pub fn f8_pi3(&self, l: usize) -> Result<CoverMorphism> {
        let (cover, nerve, target) = self.f8_parts(l);
        let map: Vec<u32> = (0..cover.count() as u32).map(|i| cover.member(i).0).collect();
        CoverMorphism::new(format!("pi3-eight[{l}]"), nerve, target, map)
    }

    /// Projection to the second factor.
    pub fn f8_pi1(&self, l: usize) -> Result<CoverMorphism> {
        let (cover, nerve, target) = self.f8_parts(l);
        let map: Vec<u32> = (0..cover.count() as u32).map(|i| cover.member(i).1).collect();
        CoverMorphism::new(format!("pi1-eight[{l}]"), nerve, target, map)
    }

    /// Slotwise join of a figure-of-eight index.
    pub fn f8_join(&self, l: usize) -> Result<CoverMorphism> {
        let (cover, nerve, target) = self.f8_parts(l);
        let map: Vec<u32> = (0..cover.count() as u32).map(|i| cover.member(i).2).collect();
        CoverMorphism::new(format!("join-eight[{l}]"), nerve, target, map)
    }

    /// Face `ϱ_j` on figure-of-eight covers, dropping slot j on both
    /// sides of the pair.
    pub fn rho_f8(&self, l: usize, j: usize) -> Result<CoverMorphism> {
        assert!((2..=3).contains(&l) && (1..=l).contains(&j));
        let (cover, nerve, _) = self.f8_parts(l);
        let (lower_cover, lower_nerve, _) = self.f8_parts(l - 1);
        let mut map = Vec::with_capacity(cover.count());
        let mut xbuf = Vec::new();
        let mut ybuf = Vec::new();
        for i in 0..cover.count() as u32 {
            let (x, y, _) = cover.member(i);
            let higher = cover.fiber.as_ref().expect("l >= 2");
            xbuf.clear();
            ybuf.clear();
            for (s, (&p, &q)) in higher
                .slots(x)
                .iter()
                .zip(higher.slots(y))
                .enumerate()
            {
                if s != j - 1 {
                    xbuf.push(p);
                    ybuf.push(q);
                }
            }
            let (lx, ly) = match &lower_cover.fiber {
                None => (xbuf[0], ybuf[0]),
                Some(f) => (
                    f.id_of(&xbuf).expect("face exists"),
                    f.id_of(&ybuf).expect("face exists"),
                ),
            };
            map.push(lower_cover.id_of(lx, ly).expect("face pair is joinable"));
        }
        CoverMorphism::new(format!("rho_{j}-eight[{l}]"), nerve, lower_nerve, map)
    }

    /// Constant-pair inclusions into the level-1 figure-of-eight cover,
    /// one per length split.
    pub fn f8_constant(&self, l1: usize, l2: usize) -> Result<CoverMorphism> {
        let map: Vec<u32> = (0..self.space.complex.vertex_count() as u8)
            .map(|v| {
                let p = self.space.constant(v, l1);
                let q = self.space.constant(v, l2);
                self.f8_1_cover.id_of(p, q).expect("constant pair exists")
            })
            .collect();
        CoverMorphism::new(
            format!("const-eight({l1},{l2})"),
            self.base.nerve(1),
            &self.f8_1,
            map,
        )
    }

    /// All length splits admitted by the budget.
    pub fn f8_constant_splits(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l1 in 1..self.space.l_max {
            for l2 in 1..=self.space.l_max - l1 {
                out.push((l1, l2));
            }
        }
        out
    }
}
