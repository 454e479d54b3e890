//! Regression: from a certified loop-fusion cocycle back to a cocycle
//! on the base.
//!
//! The loop cocycle is descent data for a bundle over the overlaps of
//! the `M^2` cover; sections are encoded as reference path tuples, and
//! comparing the section across faces produces the descended cocycle κ.
//! A primitive τ of ∂κ is then solved for, and the basepoint homotopy
//! turns (κ, τ) into an explicit pair (α, μ) with `κ = ∂α + δμ` and
//! `δα = 0`; a residual solve keeps the construction honest when the
//! homotopy is not exact.  The regression class is `−[α]`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cochain::{write_face, Cochain};
use crate::cover::Cover;
use crate::error::{LofuError, Result};
use crate::fiber::LoopSystem;
use crate::lf::{lf_certificate, IdentityReport, LfCertificate};
use crate::solve::SystemBuilder;

/// How reference path tuples and frames are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameChoice {
    /// Lexicographically least admissible tuple.
    Lex,
    /// Lexicographically greatest (reversed tie-break).
    Reverse,
    /// Seeded shuffle of the candidate order.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct RegressOptions {
    pub refs: FrameChoice,
    pub frames: FrameChoice,
}

impl Default for RegressOptions {
    fn default() -> Self {
        RegressOptions {
            refs: FrameChoice::Lex,
            frames: FrameChoice::Lex,
        }
    }
}

#[derive(Debug)]
pub struct RegressionCertificate {
    pub omega: Cochain,
    pub lf: LfCertificate,
    pub kappa: Cochain,
    pub tau: Cochain,
    pub alpha: Cochain,
    pub mu: Cochain,
    pub reports: Vec<IdentityReport>,
}

/// Candidate path ids for one slot, ordered per the frame choice.
fn ordered_candidates(sys: &LoopSystem, eps: u16, choice: FrameChoice, salt: u64) -> Vec<u32> {
    let mut c: Vec<u32> = sys.space.paths_with_eps(eps).to_vec();
    match choice {
        FrameChoice::Lex => {}
        FrameChoice::Reverse => c.reverse(),
        FrameChoice::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15));
            c.shuffle(&mut rng);
        }
    }
    c
}

/// First admissible tube tuple over the given endpoint pairs, searching
/// slots left to right with prefix pruning.
fn search_frame(
    sys: &LoopSystem,
    eps_list: &[u16],
    choice: FrameChoice,
    salt: u64,
) -> Option<Vec<u32>> {
    fn rec(
        sys: &LoopSystem,
        eps_list: &[u16],
        choice: FrameChoice,
        salt: u64,
        acc: &mut Vec<u32>,
    ) -> bool {
        if acc.len() == eps_list.len() {
            return true;
        }
        let slot = acc.len();
        for p in ordered_candidates(sys, eps_list[slot], choice, salt ^ (slot as u64) << 32) {
            acc.push(p);
            if sys.tube_cover.tuple_nonempty(acc) && rec(sys, eps_list, choice, salt, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::with_capacity(eps_list.len());
    if rec(sys, eps_list, choice, salt, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

// the product-cover index of M^2 encodes (s, e) as s*V + e, which is
// exactly the endpoint-pair id used by the path space
fn eps_of_m2_tuple(_sys: &LoopSystem, u: &[u32]) -> Vec<u16> {
    u.iter().map(|&idx| idx as u16).collect()
}

/// Deterministic section: for each level-`level` tuple of the `M^2`
/// nerve, the chosen tube tuple over it.
pub fn reference_paths(
    sys: &LoopSystem,
    level: usize,
    choice: FrameChoice,
) -> Result<Vec<Vec<u32>>> {
    let m2 = sys.base.nerve(2);
    let mut out = Vec::with_capacity(m2.count(level));
    for u_id in 0..m2.count(level) as u32 {
        let u = m2.tuple(level, u_id);
        let eps = eps_of_m2_tuple(sys, u);
        let frame = search_frame(sys, &eps, choice, u_id as u64).ok_or_else(|| {
            LofuError::truncation(
                "reference_paths",
                format!("no path tuple over {u:?} within L_max {}", sys.space.l_max),
            )
        })?;
        out.push(frame);
    }
    Ok(out)
}

/// Loop-nerve tuple id of the slotwise pairing of two path tuples over
/// the same endpoint data.
fn pairing_id(sys: &LoopSystem, a: &[u32], b: &[u32]) -> Result<u32> {
    let mut lam = Vec::with_capacity(a.len());
    for (&p, &q) in a.iter().zip(b) {
        let id = sys.lambda_cover.id_of(&[p, q]).ok_or_else(|| {
            LofuError::truncation("descent", "paths do not share endpoint stars")
        })?;
        lam.push(id);
    }
    sys.lambda.tuple_id(&lam).ok_or_else(|| {
        LofuError::truncation("descent", format!("frame pairing {lam:?} outside the loop nerve"))
    })
}

/// The descended cocycle: for each (k+1)-tuple `w` of the `M^2` nerve,
/// `κ(w) = Σ_j (−1)^j ω(pair(∂_j γ_w, γ_{∂_j w}))` with `γ_w` a frame
/// over `w` and `γ_u` the reference section.  The value is independent
/// of the frame choice because `δω = 0` and `dω = 0`.
pub fn descent_kappa(
    sys: &LoopSystem,
    omega: &Cochain,
    refs: &[Vec<u32>],
    frames: FrameChoice,
) -> Result<Cochain> {
    let k = sys.k;
    let m2 = sys.base.nerve(2);
    let mut kappa = Cochain::zero(m2, &sys.group, k)?;
    let dim = sys.group.dim();
    let mut acc = vec![0i64; dim];
    let mut face_w = vec![0u32; k];
    let mut face_frame = vec![0u32; k];
    for w_id in 0..m2.count(k + 1) as u32 {
        let w = m2.tuple(k + 1, w_id);
        let eps = eps_of_m2_tuple(sys, w);
        let frame = search_frame(sys, &eps, frames, w_id as u64).ok_or_else(|| {
            LofuError::truncation(
                "descent_kappa",
                format!("no frame over {w:?} within L_max {}", sys.space.l_max),
            )
        })?;
        acc.iter_mut().for_each(|v| *v = 0);
        for j in 0..k + 1 {
            write_face(w, j, &mut face_w);
            write_face(&frame, j, &mut face_frame);
            let u_id = m2.require_tuple_id(&face_w)?;
            let lam = pairing_id(sys, &face_frame, &refs[u_id as usize])?;
            let sign = if j % 2 == 0 { 1 } else { -1 };
            for (a, b) in acc.iter_mut().zip(omega.value(lam)) {
                *a += sign * b;
            }
        }
        kappa.set_value(w_id, &acc);
    }
    if let Some(wtn) = kappa.delta_matches(None)?.violation {
        return Err(LofuError::verification("δκ = 0", wtn));
    }
    Ok(kappa)
}

/// Default strategy for τ: solve `δτ = ∂κ` on the `M^3` nerve.  At
/// degree k = 1 the solution is gauge-fixed to vanish on the diagonal
/// basepoint index, which is the value the section strategy assigns.
pub fn descent_tau(sys: &LoopSystem, kappa: &Cochain) -> Result<Cochain> {
    let k = sys.k;
    let m3 = sys.base.nerve(3);
    let partial_kappa = sys.base.partial(kappa, 2)?;
    let n_vars = m3.count(k);
    let mut builder = SystemBuilder::new(&sys.group, n_vars);
    let mut face = vec![0u32; k];
    let mut row: Vec<(u32, i64)> = Vec::new();
    for w_id in 0..m3.count(k + 1) as u32 {
        let w = m3.tuple(k + 1, w_id);
        row.clear();
        for j in 0..k + 1 {
            write_face(w, j, &mut face);
            row.push((
                m3.require_tuple_id(&face)?,
                if j % 2 == 0 { 1 } else { -1 },
            ));
        }
        builder.push_row(row.clone(), partial_kappa.value(w_id));
    }
    if k == 1 {
        let b = sys.basepoint;
        let diag = sys.base.cover(3).encode(&[b, b, b]);
        let id = m3.require_tuple_id(&[diag])?;
        builder.push_row(vec![(id, 1)], &vec![0; sys.group.dim()]);
    }
    let flat = builder.solve(sys.seed).ok_or_else(|| {
        LofuError::truncation("descent_tau", "∂κ = δτ unsolvable at this truncation")
    })?;
    let dim = sys.group.dim();
    let mut tau = Cochain::zero(m3, &sys.group, k - 1)?;
    for i in 0..n_vars as u32 {
        tau.set_value(i, &flat[i as usize * dim..(i as usize + 1) * dim]);
    }
    if let Some(w) = tau.delta_matches(Some(&partial_kappa))?.violation {
        return Err(LofuError::verification("δτ = ∂κ", w));
    }
    Ok(tau)
}

/// Composable master frame over a tuple of `M^3` indices: slotwise
/// composable-joinable path pairs whose two sides form admissible tube
/// tuples.
fn search_composable_frame(
    sys: &LoopSystem,
    v: &[u32],
    choice: FrameChoice,
    salt: u64,
) -> Option<(Vec<u32>, Vec<u32>)> {
    let m3 = sys.base.cover(3);
    let mut triples = vec![[0u8; 3]; v.len()];
    for (i, &idx) in v.iter().enumerate() {
        let mut d = [0u8; 3];
        m3.decode(idx, &mut d);
        triples[i] = d;
    }
    fn rec(
        sys: &LoopSystem,
        triples: &[[u8; 3]],
        choice: FrameChoice,
        salt: u64,
        xs: &mut Vec<u32>,
        ys: &mut Vec<u32>,
    ) -> bool {
        if xs.len() == triples.len() {
            return true;
        }
        let slot = xs.len();
        let [s, m, e] = triples[slot];
        let v = sys.space.complex.vertex_count() as u16;
        let x_cands = ordered_candidates(
            sys,
            s as u16 * v + m as u16,
            choice,
            salt ^ (slot as u64) << 32,
        );
        for x in x_cands {
            xs.push(x);
            if sys.tube_cover.tuple_nonempty(xs) {
                let y_cands = ordered_candidates(
                    sys,
                    m as u16 * v + e as u16,
                    choice,
                    salt ^ (slot as u64) << 32 ^ 0xabcd,
                );
                for y in y_cands {
                    if !sys.space.joinable(x, y) {
                        continue;
                    }
                    ys.push(y);
                    if sys.tube_cover.tuple_nonempty(ys)
                        && rec(sys, triples, choice, salt, xs, ys)
                    {
                        return true;
                    }
                    ys.pop();
                }
            }
            xs.pop();
        }
        false
    }
    let mut xs = Vec::with_capacity(v.len());
    let mut ys = Vec::with_capacity(v.len());
    if rec(sys, &triples, choice, salt, &mut xs, &mut ys) {
        Some((xs, ys))
    } else {
        None
    }
}

/// Figure-of-eight nerve tuple id of the interleaved pairing of two
/// composable frames.
fn f8_pairing_id(
    sys: &LoopSystem,
    first: &(Vec<u32>, Vec<u32>),
    second: &(Vec<u32>, Vec<u32>),
) -> Result<u32> {
    let mut idxs = Vec::with_capacity(first.0.len());
    for i in 0..first.0.len() {
        let lam_x = sys
            .lambda_cover
            .id_of(&[first.0[i], second.0[i]])
            .ok_or_else(|| LofuError::truncation("descent_tau_sections", "x-pairing invalid"))?;
        let lam_y = sys
            .lambda_cover
            .id_of(&[first.1[i], second.1[i]])
            .ok_or_else(|| LofuError::truncation("descent_tau_sections", "y-pairing invalid"))?;
        let f8 = sys
            .f8_2_cover
            .id_of(lam_x, lam_y)
            .ok_or_else(|| LofuError::truncation("descent_tau_sections", "pairing not joinable"))?;
        idxs.push(f8);
    }
    sys.f8_2.tuple_id(&idxs).ok_or_else(|| {
        LofuError::truncation(
            "descent_tau_sections",
            format!("figure-of-eight pairing {idxs:?} outside the nerve"),
        )
    })
}

/// Section strategy for τ: compare the descended section across the
/// three product projections against the join-side reference sections,
/// with the figure-of-eight witness correcting the frame change in
/// degrees k ≥ 2.  Agrees with the solver strategy up to a coboundary.
pub fn descent_tau_sections(
    sys: &LoopSystem,
    omega: &Cochain,
    nu: Option<&Cochain>,
    refs: &[Vec<u32>],
    choice: FrameChoice,
) -> Result<Cochain> {
    let k = sys.k;
    let m3 = sys.base.nerve(3);
    let dim = sys.group.dim();
    // reference composable frames one level down (vacuous at k = 1)
    let r_refs: Vec<(Vec<u32>, Vec<u32>)> = if k >= 2 {
        let mut out = Vec::with_capacity(m3.count(k - 1));
        for q_id in 0..m3.count(k - 1) as u32 {
            let q = m3.tuple(k - 1, q_id);
            let frame = search_composable_frame(sys, q, choice, 0x5eed ^ q_id as u64)
                .ok_or_else(|| {
                    LofuError::truncation(
                        "descent_tau_sections",
                        format!("no composable frame over {q:?}"),
                    )
                })?;
            out.push(frame);
        }
        out
    } else {
        Vec::new()
    };

    let pi = |i: usize| sys.base.pi(3, i);
    let pi1 = pi(1)?;
    let pi2 = pi(2)?;
    let pi3 = pi(3)?;
    let m2 = sys.base.nerve(2);

    let mut tau = Cochain::zero(m3, &sys.group, k - 1)?;
    let mut acc = vec![0i64; dim];
    let mut image = Vec::new();
    let mut face = vec![0u32; k.saturating_sub(1)];
    for v_id in 0..m3.count(k) as u32 {
        let v = m3.tuple(k, v_id);
        let (xs, ys) = search_composable_frame(sys, v, choice, v_id as u64).ok_or_else(|| {
            LofuError::truncation(
                "descent_tau_sections",
                format!("no composable frame over {v:?}"),
            )
        })?;
        let joins: Vec<u32> = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| sys.space.join(x, y))
            .collect::<Result<_>>()?;
        acc.iter_mut().for_each(|a| *a = 0);
        // ∂s expressed in the master frames
        for (morph, tuple, sign) in [(&pi1, &ys, -1i64), (&pi2, &joins, 1), (&pi3, &xs, -1)] {
            morph.apply_tuple(v, &mut image);
            let u_id = m2.require_tuple_id(&image)?;
            let lam = pairing_id(sys, tuple, &refs[u_id as usize])?;
            for (a, b) in acc.iter_mut().zip(omega.value(lam)) {
                *a += sign * b;
            }
        }
        // δr expressed in the same frames, transported by ν
        if k >= 2 {
            let nu = nu.ok_or_else(|| {
                LofuError::invalid("descent_tau_sections needs the figure-of-eight witness")
            })?;
            for j in 0..k {
                write_face(v, j, &mut face);
                let q_id = m3.require_tuple_id(&face)?;
                let sub_frame = (
                    drop_at(&xs, j),
                    drop_at(&ys, j),
                );
                let f8t = f8_pairing_id(sys, &r_refs[q_id as usize], &sub_frame)?;
                let sign = if j % 2 == 0 { 1 } else { -1 };
                for (a, b) in acc.iter_mut().zip(nu.value(f8t)) {
                    *a -= sign * b;
                }
            }
        }
        tau.set_value(v_id, &acc);
    }
    Ok(tau)
}

fn drop_at(v: &[u32], j: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(v.len() - 1);
    out.extend_from_slice(&v[..j]);
    out.extend_from_slice(&v[j + 1..]);
    out
}

pub fn regress(sys: &LoopSystem, omega: &Cochain) -> Result<RegressionCertificate> {
    regress_with(sys, omega, RegressOptions::default())
}

pub fn regress_with(
    sys: &LoopSystem,
    omega: &Cochain,
    opts: RegressOptions,
) -> Result<RegressionCertificate> {
    let k = sys.k;
    if omega.degree + 1 != k {
        return Err(LofuError::invalid(format!(
            "regress: ω has degree {}, expected {}",
            omega.degree,
            k - 1
        )));
    }
    let lf = lf_certificate(sys, omega, None)?;
    let refs = reference_paths(sys, k, opts.refs)?;
    let kappa = descent_kappa(sys, omega, &refs, opts.frames)?;
    let tau = descent_tau(sys, &kappa)?;

    // basepoint homotopy warm start: α₀ = −i₁^*κ, μ₀ = −i₂^*τ solve
    // κ = ∂α + δμ exactly; a residual solve keeps the contract honest
    let i1 = sys.base.inclusion(1, sys.basepoint)?;
    let i2 = sys.base.inclusion(2, sys.basepoint)?;
    let alpha0 = i1.pullback(&kappa)?.negated();
    let mu0 = i2.pullback(&tau)?.negated();
    let mut residual = kappa.clone();
    residual.add_scaled(&sys.base.partial(&alpha0, 1)?, -1)?;
    residual.add_scaled(&mu0.delta()?, -1)?;

    let (alpha_t, mu_t) = solve_alpha_mu(sys, &residual)?;
    let mut alpha = alpha0;
    alpha.add_scaled(&alpha_t, 1)?;
    let mut mu = mu0;
    mu.add_scaled(&mu_t, 1)?;

    let mut reports = Vec::new();
    let da = alpha.delta_matches(None)?;
    if let Some(w) = da.violation {
        // internal-consistency failure: the combined system constrains
        // δα = 0, so this must not occur
        return Err(LofuError::verification("δα = 0 (regression sentinel)", w));
    }
    reports.push(IdentityReport {
        name: "δα = 0".into(),
        holds: true,
        witness: None,
        domain: da.domain,
    });
    let mut recomposed = sys.base.partial(&alpha, 1)?;
    recomposed.add_scaled(&mu.delta()?, 1)?;
    let holds = recomposed.values_eq(&kappa);
    if !holds {
        return Err(LofuError::verification("κ = ∂α + δμ", "mismatch"));
    }
    reports.push(IdentityReport {
        name: "κ = ∂α + δμ".into(),
        holds: true,
        witness: None,
        domain: kappa.len(),
    });

    Ok(RegressionCertificate {
        omega: omega.clone(),
        lf,
        kappa,
        tau,
        alpha,
        mu,
        reports,
    })
}

/// Solves the combined system `∂α + δμ = ρ`, `δα = 0` for cochains α on
/// the base nerve and μ on the `M^2` nerve.
fn solve_alpha_mu(sys: &LoopSystem, rho: &Cochain) -> Result<(Cochain, Cochain)> {
    let k = sys.k;
    let m1 = sys.base.nerve(1);
    let m2 = sys.base.nerve(2);
    let n_alpha = m1.count(k + 1);
    let n_mu = m2.count(k);
    let mut builder = SystemBuilder::new(&sys.group, n_alpha + n_mu);
    let pi1 = sys.base.pi(2, 1)?;
    let pi2 = sys.base.pi(2, 2)?;
    let mut image = Vec::new();
    let mut face = vec![0u32; k];
    let mut row: Vec<(u32, i64)> = Vec::new();
    for w_id in 0..m2.count(k + 1) as u32 {
        let w = m2.tuple(k + 1, w_id);
        row.clear();
        for (m, sign) in [(&pi1, -1i64), (&pi2, 1)] {
            m.apply_tuple(w, &mut image);
            row.push((m1.require_tuple_id(&image)?, sign));
        }
        for j in 0..k + 1 {
            write_face(w, j, &mut face);
            row.push((
                n_alpha as u32 + m2.require_tuple_id(&face)?,
                if j % 2 == 0 { 1 } else { -1 },
            ));
        }
        builder.push_row(row.clone(), rho.value(w_id));
    }
    // cocycle rows δα = 0
    let zero = vec![0i64; sys.group.dim()];
    let mut face1 = vec![0u32; k + 1];
    for w_id in 0..m1.count(k + 2) as u32 {
        let w = m1.tuple(k + 2, w_id);
        row.clear();
        for j in 0..k + 2 {
            write_face(w, j, &mut face1);
            row.push((
                m1.require_tuple_id(&face1)?,
                if j % 2 == 0 { 1 } else { -1 },
            ));
        }
        builder.push_row(row.clone(), &zero);
    }
    let flat = builder.solve(sys.seed).ok_or_else(|| {
        LofuError::truncation("regress", "κ = ∂α + δμ unsolvable at this truncation")
    })?;
    let dim = sys.group.dim();
    let mut alpha = Cochain::zero(m1, &sys.group, k)?;
    for i in 0..n_alpha as u32 {
        alpha.set_value(i, &flat[i as usize * dim..(i as usize + 1) * dim]);
    }
    let mut mu = Cochain::zero(m2, &sys.group, k - 1)?;
    for i in 0..n_mu as u32 {
        let off = (n_alpha + i as usize) * dim;
        mu.set_value(i, &flat[off..off + dim]);
    }
    Ok((alpha, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixture;
    use crate::cover::DEFAULT_TUPLE_CAP;
    use crate::group::parse_group_spec;
    use crate::homology::{class_equal, cohomology};
    use crate::lf::lf_class_equal;
    use crate::transgression::transgress;

    fn circle_sys(spec: &str) -> LoopSystem {
        let c = fixture("circle").unwrap();
        let g = parse_group_spec(spec).unwrap();
        LoopSystem::build(&c, &g, 1, 2, 0, 0, DEFAULT_TUPLE_CAP).unwrap()
    }

    #[test]
    fn zero_regresses_to_zero_class() {
        let sys = circle_sys("Z");
        let omega = Cochain::zero(&sys.lambda, &sys.group, 0).unwrap();
        let cert = regress(&sys, &omega).unwrap();
        assert!(cert.kappa.is_zero());
        assert!(class_equal(
            &cert.alpha,
            &Cochain::zero(sys.base.nerve(1), &sys.group, 1).unwrap(),
            0
        )
        .unwrap()
        .is_some());
    }

    #[test]
    fn reference_paths_prefer_short_tuples() {
        let sys = circle_sys("Z");
        let refs = reference_paths(&sys, 1, FrameChoice::Lex).unwrap();
        // over the diagonal pair (0,0) the constant path is least
        let m2 = sys.base.nerve(2);
        for u_id in 0..m2.count(1) as u32 {
            let u = m2.tuple(1, u_id);
            let frame = &refs[u_id as usize];
            assert_eq!(sys.space.eps_pair(frame[0]) as u32, u[0]);
            assert_eq!(sys.space.length(frame[0]), 1, "length-1 tuples come first");
        }
    }

    #[test]
    fn kappa_is_frame_independent() {
        let sys = circle_sys("Z");
        let h1 = cohomology(sys.base.nerve(1), &sys.group, 1).unwrap();
        let cert = transgress(&sys, &h1.generators[0]).unwrap();
        let refs = reference_paths(&sys, 1, FrameChoice::Lex).unwrap();
        let k0 = descent_kappa(&sys, &cert.omega, &refs, FrameChoice::Lex).unwrap();
        for seed in [1u64, 2, 3] {
            let k1 =
                descent_kappa(&sys, &cert.omega, &refs, FrameChoice::Seeded(seed)).unwrap();
            assert!(k0.values_eq(&k1), "κ must not depend on the frame choice");
        }
    }

    #[test]
    fn reference_change_shifts_kappa_by_a_coboundary() {
        let sys = circle_sys("Z");
        let h1 = cohomology(sys.base.nerve(1), &sys.group, 1).unwrap();
        let cert = transgress(&sys, &h1.generators[0]).unwrap();
        let refs_a = reference_paths(&sys, 1, FrameChoice::Lex).unwrap();
        let refs_b = reference_paths(&sys, 1, FrameChoice::Reverse).unwrap();
        let ka = descent_kappa(&sys, &cert.omega, &refs_a, FrameChoice::Lex).unwrap();
        let kb = descent_kappa(&sys, &cert.omega, &refs_b, FrameChoice::Lex).unwrap();
        assert!(class_equal(&ka, &kb, 0).unwrap().is_some());
    }

    #[test]
    fn kappa_recovers_partial_alpha_up_to_coboundary() {
        let sys = circle_sys("Z");
        let h1 = cohomology(sys.base.nerve(1), &sys.group, 1).unwrap();
        let alpha = &h1.generators[0];
        let cert = transgress(&sys, alpha).unwrap();
        let refs = reference_paths(&sys, 1, FrameChoice::Lex).unwrap();
        let kappa = descent_kappa(&sys, &cert.omega, &refs, FrameChoice::Lex).unwrap();
        let pa = sys.base.partial(alpha, 1).unwrap();
        assert!(class_equal(&kappa, &pa, 0).unwrap().is_some());
    }

    #[test]
    fn tau_strategies_agree_exactly_at_degree_one() {
        let sys = circle_sys("Z");
        let h1 = cohomology(sys.base.nerve(1), &sys.group, 1).unwrap();
        let cert = transgress(&sys, &h1.generators[0]).unwrap();
        let refs = reference_paths(&sys, 1, FrameChoice::Lex).unwrap();
        let kappa = descent_kappa(&sys, &cert.omega, &refs, FrameChoice::Lex).unwrap();
        let tau_solver = descent_tau(&sys, &kappa).unwrap();
        let tau_sections =
            descent_tau_sections(&sys, &cert.omega, None, &refs, FrameChoice::Lex).unwrap();
        // both satisfy δτ = ∂κ ...
        let pk = sys.base.partial(&kappa, 2).unwrap();
        assert!(tau_sections
            .delta_matches(Some(&pk))
            .unwrap()
            .violation
            .is_none());
        // ... and in degree one they must agree exactly
        assert!(tau_solver.values_eq(&tau_sections));
    }

    #[test]
    fn round_trip_on_the_winding_class() {
        for spec in ["Z", "Z/2"] {
            let sys = circle_sys(spec);
            let h1 = cohomology(sys.base.nerve(1), &sys.group, 1).unwrap();
            for alpha in &h1.generators {
                let t = transgress(&sys, alpha).unwrap();
                let r = regress(&sys, &t.omega).unwrap();
                assert!(
                    class_equal(&r.alpha, alpha, 0).unwrap().is_some(),
                    "regress(transgress(α)) must be class-equal to α over {spec}"
                );
                // converse: transgressing the regressed class gives ω
                // back exactly in degree zero
                let t2 = transgress(&sys, &r.alpha).unwrap();
                assert!(
                    lf_class_equal(&sys, &t.omega, &t2.omega).unwrap().is_some(),
                    "transgress(regress(ω)) must be lf-class-equal to ω over {spec}"
                );
            }
        }
    }
}
