//! The cylinder over loop space, ordinary transgression through it, and
//! the compatibility check against the enhanced route.
//!
//! The time axis is a grid of `T = lcm(1..=L_max)` steps per unit, so
//! that every path's vertex times land on grid points.  A cylinder cover
//! element is indexed by a grid time, a loop-tube index and a base
//! vertex; it contains the loops of the tube whose position near that
//! time stays close to the base vertex, with closed windows of one grid
//! step on each side.  The analogous parameterized path cover over
//! `[0,1]` carries the modified endpoint map.

use std::collections::HashMap;
use std::sync::Arc;

use crate::base::BaseSpaces;
use crate::c0::{marked_zero_tuples, solve_delta_pinned, solve_in_c0, vanishes_on};
use crate::cochain::Cochain;
use crate::cover::{Cover, Nerve};
use crate::error::{LofuError, Result};
use crate::fiber::{FiberPowerCover, LoopSystem};
use crate::homology::coboundary_witness;
use crate::lf::IdentityReport;
use crate::morphism::CoverMorphism;
use crate::path::PathSpace;

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Site tables: for each path and each half-grid position slot, the
/// vertex mask of the carrier simplex of the swept position.
struct SiteTables {
    t: usize,
    per_path: Vec<u32>, // path * (2T+1) + pos_slot
}

impl SiteTables {
    fn build(space: &PathSpace, t: usize) -> SiteTables {
        let slots = 2 * t + 1;
        let mut per_path = vec![0u32; space.count() * slots];
        for p in 0..space.count() as u32 {
            let path = space.path(p);
            let len = path.len() - 1;
            for q in 0..slots {
                // position along the path in units of 1/(2T)
                let num = q * len;
                let den = 2 * t;
                let site: u32 = if num % den == 0 {
                    1 << path[num / den]
                } else {
                    let i = num / den;
                    (1 << path[i]) | (1 << path[i + 1])
                };
                per_path[p as usize * slots + q] = site;
            }
        }
        SiteTables { t, per_path }
    }

    fn site(&self, path: u32, pos_slot: usize) -> u32 {
        self.per_path[path as usize * (2 * self.t + 1) + pos_slot]
    }
}

/// Absolute slot numbers `0..=4T` covered by the closed one-step window
/// of grid time `j` on `[-1,1]`.  The seam time 0 carries the degenerate
/// window {0}: its elements sit on the shared start vertex, which is
/// what makes the leg decomposition exact across the seam.
fn window_mask(t: usize, j: i32) -> u32 {
    if j == 0 {
        return 1 << (2 * t);
    }
    let lo = (((j - 1 + t as i32) * 2).max(0)) as usize;
    let hi = (((j + 1 + t as i32) * 2) as usize).min(4 * t);
    let mut m = 0u32;
    for q in lo..=hi {
        m |= 1 << q;
    }
    m
}

/// Cover of `[−1,1] × loops`: indices `(grid time j, loop index, base
/// vertex u)`.  An element is the set of pairs (t', loop in the tube)
/// with t' in the closed window of j and u on the carrier of the center
/// loop's position at t'; this couples u to the center's own track.
pub struct CylinderCover {
    space: Arc<PathSpace>,
    lambda: Arc<FiberPowerCover>,
    pub t: usize,
    indices: Vec<(i32, u32, u8)>,
    slot_masks: Vec<u32>, // per index: slots where u is on the center site
    ids: HashMap<u64, u32>,
}

impl CylinderCover {
    pub fn build(space: &Arc<PathSpace>, lambda: &Arc<FiberPowerCover>) -> Arc<CylinderCover> {
        let t = (1..=space.l_max).fold(1, lcm);
        let sites = SiteTables::build(space, t);
        let v = space.complex.vertex_count() as u8;
        let mut indices = Vec::new();
        let mut slot_masks = Vec::new();
        for j in -(t as i32)..=t as i32 {
            let wmask = window_mask(t, j);
            for lam in 0..lambda.count() as u32 {
                let slots = lambda.slots(lam);
                for u in 0..v {
                    let mut smask = 0u32;
                    for q in 0..=4 * t {
                        if wmask & (1 << q) == 0 {
                            continue;
                        }
                        let (own, pos) = if q >= 2 * t {
                            (slots[0], q - 2 * t)
                        } else {
                            (slots[1], 2 * t - q)
                        };
                        if sites.site(own, pos) & (1 << u) != 0 {
                            smask |= 1 << q;
                        }
                    }
                    if smask != 0 {
                        indices.push((j, lam, u));
                        slot_masks.push(smask);
                    }
                }
            }
        }
        let ids = indices
            .iter()
            .enumerate()
            .map(|(i, &(j, lam, u))| (Self::key(j, lam, u), i as u32))
            .collect();
        Arc::new(CylinderCover {
            space: space.clone(),
            lambda: lambda.clone(),
            t,
            indices,
            slot_masks,
            ids,
        })
    }

    fn key(j: i32, lam: u32, u: u8) -> u64 {
        (((j + 64) as u64) << 40) | ((lam as u64) << 8) | u as u64
    }

    pub fn id_of(&self, j: i32, lam: u32, u: u8) -> Option<u32> {
        self.ids.get(&Self::key(j, lam, u)).copied()
    }

    pub fn index(&self, i: u32) -> (i32, u32, u8) {
        self.indices[i as usize]
    }
}

impl Cover for CylinderCover {
    fn len(&self) -> usize {
        self.indices.len()
    }

    fn tuple_nonempty(&self, tup: &[u32]) -> bool {
        // shared time slot with every u on its own center's carrier
        let mut slots = u32::MAX;
        let mut u_set = 0u32;
        for &i in tup {
            slots &= self.slot_masks[i as usize];
            u_set |= 1 << self.indices[i as usize].2;
        }
        if slots == 0 {
            return false;
        }
        // the evaluation morphism must stay a morphism
        if !self.space.complex.spans_mask(u_set) {
            return false;
        }
        // the projection to the loop cover must stay a morphism
        let lams: Vec<u32> = tup.iter().map(|&i| self.indices[i as usize].1).collect();
        self.lambda.tuple_nonempty(&lams)
    }

    fn name(&self) -> String {
        format!("{}-cylinder(T{})", self.space.complex.name(), self.t)
    }
}

/// Cover of `[0,1] × paths`, the parameterized analog with one path
/// component.
pub struct ParamPathCover {
    space: Arc<PathSpace>,
    pub t: usize,
    indices: Vec<(u32, u32, u8)>,
    slot_masks: Vec<u32>,
    ids: HashMap<u64, u32>,
}

impl ParamPathCover {
    pub fn build(space: &Arc<PathSpace>) -> Arc<ParamPathCover> {
        let t = (1..=space.l_max).fold(1, lcm);
        let sites = SiteTables::build(space, t);
        let v = space.complex.vertex_count() as u8;
        let mut indices = Vec::new();
        let mut slot_masks = Vec::new();
        for j in 0..=t as u32 {
            let lo = (j.saturating_sub(1) * 2) as usize;
            let hi = (((j + 1) * 2) as usize).min(2 * t);
            for p in 0..space.count() as u32 {
                for u in 0..v {
                    let mut smask = 0u32;
                    for q in lo..=hi {
                        if sites.site(p, q) & (1 << u) != 0 {
                            smask |= 1 << q;
                        }
                    }
                    if smask != 0 {
                        indices.push((j, p, u));
                        slot_masks.push(smask);
                    }
                }
            }
        }
        let ids = indices
            .iter()
            .enumerate()
            .map(|(i, &(j, p, u))| (Self::key(j, p, u), i as u32))
            .collect();
        Arc::new(ParamPathCover {
            space: space.clone(),
            t,
            indices,
            slot_masks,
            ids,
        })
    }

    fn key(j: u32, p: u32, u: u8) -> u64 {
        ((j as u64) << 40) | ((p as u64) << 8) | u as u64
    }

    pub fn id_of(&self, j: u32, p: u32, u: u8) -> Option<u32> {
        self.ids.get(&Self::key(j, p, u)).copied()
    }

    pub fn index(&self, i: u32) -> (u32, u32, u8) {
        self.indices[i as usize]
    }
}

impl Cover for ParamPathCover {
    fn len(&self) -> usize {
        self.indices.len()
    }

    fn tuple_nonempty(&self, tup: &[u32]) -> bool {
        let mut slots = u32::MAX;
        let mut u_set = 0u32;
        let mut paths: Vec<u32> = Vec::with_capacity(tup.len());
        for &i in tup {
            let (_, p, u) = self.indices[i as usize];
            slots &= self.slot_masks[i as usize];
            u_set |= 1 << u;
            paths.push(p);
        }
        if slots == 0 {
            return false;
        }
        let complex = &self.space.complex;
        let mut starts = 0u32;
        let mut ends = 0u32;
        for &p in &paths {
            starts |= 1 << self.space.start(p);
            ends |= 1 << self.space.end(p);
        }
        if !complex.spans_mask(u_set)
            || !complex.spans_mask(starts)
            || !complex.spans_mask(ends)
        {
            return false;
        }
        paths.sort_unstable();
        paths.dedup();
        self.space.joint_close(&paths)
    }

    fn name(&self) -> String {
        format!("{}-param-paths(T{})", self.space.complex.name(), self.t)
    }
}

/// Cylinder-side systems for one loop system.
pub struct CylinderSystem {
    pub cover: Arc<CylinderCover>,
    pub nerve: Arc<Nerve>,
    pub param_cover: Arc<ParamPathCover>,
    pub param_nerve: Arc<Nerve>,
}

impl CylinderSystem {
    pub fn build(sys: &LoopSystem, cap: usize) -> Result<CylinderSystem> {
        let k = sys.k;
        let cover = CylinderCover::build(&sys.space, &sys.lambda_cover);
        let nerve = Nerve::build(cover.clone() as Arc<dyn Cover>, k + 1, cap)?;
        let param_cover = ParamPathCover::build(&sys.space);
        let param_nerve = Nerve::build(param_cover.clone() as Arc<dyn Cover>, k + 1, cap)?;
        Ok(CylinderSystem {
            cover,
            nerve,
            param_cover,
            param_nerve,
        })
    }

    /// Evaluation morphism onto the base star cover.
    pub fn ev(&self, base: &BaseSpaces) -> Result<CoverMorphism> {
        let map: Vec<u32> = (0..self.cover.len() as u32)
            .map(|i| self.cover.index(i).2 as u32)
            .collect();
        CoverMorphism::new("ev", &self.nerve, base.nerve(1), map)
    }

    /// Evaluation at time zero: the shared start vertex of the loop.
    pub fn ev0(&self, sys: &LoopSystem) -> Result<CoverMorphism> {
        let map: Vec<u32> = (0..self.cover.len() as u32)
            .map(|i| {
                let (_, lam, _) = self.cover.index(i);
                sys.lambda_cover.start(lam) as u32
            })
            .collect();
        CoverMorphism::new("ev0", &self.nerve, sys.base.nerve(1), map)
    }

    /// Slice inclusion of the loop cover at grid time `j` (−T, 0 or T);
    /// the base vertex is the loop's start at time 0 and its end at the
    /// outer slices.
    pub fn slice(&self, sys: &LoopSystem, j: i32) -> Result<CoverMorphism> {
        let map: Vec<u32> = (0..sys.lambda_cover.count() as u32)
            .map(|lam| {
                let u = if j == 0 {
                    sys.lambda_cover.start(lam)
                } else {
                    sys.lambda_cover.end(lam)
                };
                self.cover.id_of(j, lam, u).ok_or_else(|| {
                    LofuError::invalid(format!("slice index ({j},{lam}) missing"))
                })
            })
            .collect::<Result<_>>()?;
        CoverMorphism::new(format!("slice@{j}"), &sys.lambda, &self.nerve, map)
    }

    /// Slice inclusions of the tube cover into the parameterized cover.
    pub fn param_slice(&self, sys: &LoopSystem, j: u32) -> Result<CoverMorphism> {
        let t = self.param_cover.t as u32;
        let map: Vec<u32> = (0..sys.space.count() as u32)
            .map(|p| {
                let u = if j == 0 {
                    sys.space.start(p)
                } else if j == t {
                    sys.space.end(p)
                } else {
                    unreachable!("only the boundary slices are used")
                };
                self.param_cover.id_of(j, p, u).ok_or_else(|| {
                    LofuError::invalid(format!("param slice index ({j},{p}) missing"))
                })
            })
            .collect::<Result<_>>()?;
        CoverMorphism::new(
            format!("param-slice@{j}"),
            &sys.tube,
            &self.param_nerve,
            map,
        )
    }

    /// Parameterized endpoint map `(t, γ) ↦ (γ(0), γ(t))` at the index
    /// level: the second component is the base vertex of the cover
    /// element.
    pub fn eps_tilde(&self, sys: &LoopSystem) -> Result<CoverMorphism> {
        let m2 = sys.base.cover(2);
        let map: Vec<u32> = (0..self.param_cover.len() as u32)
            .map(|i| {
                let (_, p, u) = self.param_cover.index(i);
                m2.encode(&[sys.space.start(p), u])
            })
            .collect();
        CoverMorphism::new("eps~", &self.param_nerve, sys.base.nerve(2), map)
    }

    /// The two leg maps from the cylinder to the parameterized path
    /// space: leg 1 follows the first path on `t ≥ 0` and sits at time 0
    /// otherwise; leg 2 mirrors with the second path.
    pub fn varsigma(&self, sys: &LoopSystem, leg: usize) -> Result<CoverMorphism> {
        let map: Vec<u32> = (0..self.cover.len() as u32)
            .map(|i| {
                let (j, lam, u) = self.cover.index(i);
                let slots = sys.lambda_cover.slots(lam);
                let (path, jj, uu) = if leg == 1 {
                    if j >= 1 {
                        (slots[0], j as u32, u)
                    } else {
                        (slots[0], 0, sys.lambda_cover.start(lam))
                    }
                } else if j <= -1 {
                    (slots[1], (-j) as u32, u)
                } else {
                    (slots[1], 0, sys.lambda_cover.start(lam))
                };
                self.param_cover.id_of(jj, path, uu).ok_or_else(|| {
                    LofuError::invalid(format!("leg image ({jj},{path},{uu}) missing"))
                })
            })
            .collect::<Result<_>>()?;
        CoverMorphism::new(format!("varsigma{leg}"), &self.nerve, &self.param_nerve, map)
    }
}

/// Ordinary transgression through the cylinder: forms the modified
/// pullback `α' = −ev₀^*α + ev^*α`, solves `δσ = α'` in the subcomplex
/// trivial on the time-zero slice, and returns the difference of σ at
/// the two end slices, a cocycle on the loop nerve.
pub fn standard_transgression(
    sys: &LoopSystem,
    cyl: &CylinderSystem,
    alpha: &Cochain,
) -> Result<Cochain> {
    let k = sys.k;
    if let Some(w) = alpha.delta_matches(None)?.violation {
        return Err(LofuError::invalid(format!(
            "standard_transgression: input not a cocycle at {w:?}"
        )));
    }
    let ev = cyl.ev(&sys.base)?;
    let ev0 = cyl.ev0(sys)?;
    let alpha_prime = {
        let mut a = ev.pullback(alpha)?;
        a.add_scaled(&ev0.pullback(alpha)?, -1)?;
        a
    };
    let slice0 = cyl.slice(sys, 0)?;
    if !vanishes_on(&alpha_prime, std::slice::from_ref(&slice0))? {
        return Err(LofuError::verification(
            "α' vanishes on the time-zero slice",
            "nonzero restriction",
        ));
    }
    let marked = marked_zero_tuples(std::slice::from_ref(&slice0), k)?;
    let sigma = solve_delta_pinned(&alpha_prime, &marked, sys.seed, "compat/sigma")?;
    let t = cyl.cover.t as i32;
    let top = cyl.slice(sys, t)?.pullback(&sigma)?;
    let bottom = cyl.slice(sys, -t)?.pullback(&sigma)?;
    let mut out = top;
    out.add_scaled(&bottom, -1)?;
    if let Some(w) = out.delta_matches(None)?.violation {
        return Err(LofuError::verification(
            "standard transgression output is a cocycle",
            w,
        ));
    }
    Ok(out)
}

/// The leg-built σ: solves the parameterized endpoint system for `β̃`
/// and assembles `σ = −(leg₁^*β̃ + leg₂^*β̃)`, whose end-slice difference
/// is `−dβ` on the nose.  Returns (end-slice difference, σ).
pub fn varsigma_transgression(
    sys: &LoopSystem,
    cyl: &CylinderSystem,
    alpha: &Cochain,
) -> Result<(Cochain, Cochain)> {
    let eps_tilde = cyl.eps_tilde(sys)?;
    let partial_alpha = sys.base.partial(alpha, 1)?;
    let target = eps_tilde.pullback(&partial_alpha)?;
    let slice0 = cyl.param_slice(sys, 0)?;
    let beta_tilde = solve_in_c0(
        &target,
        std::slice::from_ref(&slice0),
        sys.seed,
        "compat/beta~",
    )?;
    let s1 = cyl.varsigma(sys, 1)?;
    let s2 = cyl.varsigma(sys, 2)?;
    let mut sigma = s1.pullback(&beta_tilde)?;
    sigma.add_scaled(&s2.pullback(&beta_tilde)?, 1)?;
    let sigma = sigma.negated();
    let t = cyl.cover.t as i32;
    let top = cyl.slice(sys, t)?.pullback(&sigma)?;
    let bottom = cyl.slice(sys, -t)?.pullback(&sigma)?;
    let mut diff = top;
    diff.add_scaled(&bottom, -1)?;
    Ok((diff, sigma))
}

pub struct CompatOutcome {
    pub standard: Cochain,
    pub identities: Vec<IdentityReport>,
}

/// Verifies that the cylinder route and the enhanced route agree: the
/// standard representative differs from `−ω` by an exact coboundary,
/// and the leg-built end-slice difference equals `−ω` outright.
pub fn diagram_check(
    sys: &LoopSystem,
    cyl: &CylinderSystem,
    alpha: &Cochain,
    omega: &Cochain,
) -> Result<CompatOutcome> {
    let mut identities = Vec::new();

    let standard = standard_transgression(sys, cyl, alpha)?;
    let minus_omega = omega.negated();
    let diff = Cochain::combine(&[(&standard, 1), (&minus_omega, -1)])?;
    let witness = coboundary_witness(&diff, sys.seed)?;
    if witness.is_none() {
        return Err(LofuError::verification(
            "standard − (−ω) is a coboundary",
            "difference represents a nonzero class",
        ));
    }
    identities.push(IdentityReport {
        name: "standard − (−ω) is a coboundary".into(),
        holds: true,
        witness: None,
        domain: diff.len(),
    });

    let (leg_diff, sigma) = varsigma_transgression(sys, cyl, alpha)?;
    // δσ = α' pointwise for the leg-built σ
    let ev = cyl.ev(&sys.base)?;
    let ev0 = cyl.ev0(sys)?;
    let mut alpha_prime = ev.pullback(alpha)?;
    alpha_prime.add_scaled(&ev0.pullback(alpha)?, -1)?;
    let sig_check = sigma.delta_matches(Some(&alpha_prime))?;
    if let Some(w) = sig_check.violation {
        return Err(LofuError::verification("δσ = α' (leg construction)", w));
    }
    identities.push(IdentityReport {
        name: "δσ = α' (leg construction)".into(),
        holds: true,
        witness: None,
        domain: sig_check.domain,
    });
    let exact = leg_diff.values_eq(&minus_omega);
    if !exact {
        return Err(LofuError::verification(
            "end-slice difference equals −ω",
            "pointwise mismatch",
        ));
    }
    identities.push(IdentityReport {
        name: "end-slice difference = −ω exactly".into(),
        holds: true,
        witness: None,
        domain: leg_diff.len(),
    });
    Ok(CompatOutcome {
        standard,
        identities,
    })
}
