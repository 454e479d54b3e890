//! The fusion differential, the figure-of-eight operator, loop-fusion
//! membership certificates and loop-fusion class equality.
//!
//! All identity checks stream over the relevant tuple domain and record
//! its size, so truncation effects stay visible in certificates.

use serde::Serialize;

use crate::cochain::{write_face, Cochain};
use crate::cover::Nerve;
use crate::error::{LofuError, Result};
use crate::fiber::LoopSystem;
use crate::morphism::CoverMorphism;
use crate::solve::SystemBuilder;

/// One verified identity with the size of the domain it was checked on.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub holds: bool,
    pub witness: Option<Vec<u32>>,
    pub domain: usize,
}

impl IdentityReport {
    fn require(self) -> Result<IdentityReport> {
        if self.holds {
            Ok(self)
        } else {
            Err(LofuError::Verification {
                identity: self.name.clone(),
                witness: format!("{:?}", self.witness),
            })
        }
    }
}

/// Streaming check that a signed sum of pullbacks vanishes (or matches
/// `rhs`) on every `width`-tuple of `nerve`.  Each part contributes
/// `sign * f(m(tuple))`.
pub fn morphism_sum_check(
    name: impl Into<String>,
    nerve: &Nerve,
    width: usize,
    parts: &[(&CoverMorphism, i64, &Cochain)],
    rhs: Option<&Cochain>,
) -> Result<IdentityReport> {
    let group = &parts
        .first()
        .ok_or_else(|| LofuError::invalid("empty morphism sum"))?
        .2
        .group;
    let dim = group.dim();
    let mut acc = vec![0i64; dim];
    let mut image = Vec::with_capacity(width);
    let mut report = IdentityReport {
        name: name.into(),
        holds: true,
        witness: None,
        domain: 0,
    };
    let res = nerve.for_each_tuple(width, |t| {
        report.domain += 1;
        acc.iter_mut().for_each(|v| *v = 0);
        for &(m, sign, f) in parts {
            m.apply_tuple(t, &mut image);
            let id = f.nerve.require_tuple_id(&image)?;
            for (a, b) in acc.iter_mut().zip(f.value(id)) {
                *a += sign * b;
            }
        }
        if let Some(r) = rhs {
            let rv = r.value_at(t)?;
            for (a, b) in acc.iter_mut().zip(rv) {
                *a -= b;
            }
        }
        if !acc
            .iter()
            .enumerate()
            .all(|(q, &v)| group.reduce_coord(q, v) == 0)
        {
            report.holds = false;
            report.witness = Some(t.to_vec());
            return Err(LofuError::invalid("__stop__"));
        }
        Ok(())
    });
    match res {
        Ok(()) => Ok(report),
        Err(LofuError::InvalidInput(s)) if s == "__stop__" => Ok(report),
        Err(e) => Err(e),
    }
}

/// Materialized signed sum of pullbacks on the source nerve of the
/// morphisms.
pub fn morphism_sum(parts: &[(&CoverMorphism, i64, &Cochain)]) -> Result<Cochain> {
    let (first, _, f0) = parts
        .first()
        .ok_or_else(|| LofuError::invalid("empty morphism sum"))?;
    let mut acc = Cochain::zero(&first.source, &f0.group, f0.degree)?;
    for &(m, sign, f) in parts {
        let pulled = m.pullback(f)?;
        acc.add_scaled(&pulled, sign)?;
    }
    Ok(acc)
}

/// Fusion differential `df = Σ_{j=1}^{l+1} (−1)^j ϱ_j^* f` between
/// fiber-power levels.  `level` names the source of `f`: 1 for the tube,
/// 2 for the loop cover.
pub fn fusion_d(sys: &LoopSystem, f: &Cochain, level: usize) -> Result<Cochain> {
    let rhos = fusion_faces(sys, level)?;
    let parts: Vec<(&CoverMorphism, i64, &Cochain)> = rhos
        .iter()
        .enumerate()
        .map(|(i, m)| (m, if (i + 1) % 2 == 0 { 1i64 } else { -1 }, f))
        .collect();
    morphism_sum(&parts)
}

/// Same sign pattern on the figure-of-eight covers (interleaved faces).
pub fn fusion_d_eight(sys: &LoopSystem, f: &Cochain, level: usize) -> Result<Cochain> {
    let rhos = eight_fusion_faces(sys, level)?;
    let parts: Vec<(&CoverMorphism, i64, &Cochain)> = rhos
        .iter()
        .enumerate()
        .map(|(i, m)| (m, if (i + 1) % 2 == 0 { 1i64 } else { -1 }, f))
        .collect();
    morphism_sum(&parts)
}

fn fusion_faces(sys: &LoopSystem, level: usize) -> Result<Vec<CoverMorphism>> {
    match level {
        1 => Ok(vec![sys.rho_lambda(1)?, sys.rho_lambda(2)?]),
        2 => Ok(vec![
            sys.rho_gamma3(1)?,
            sys.rho_gamma3(2)?,
            sys.rho_gamma3(3)?,
        ]),
        _ => Err(LofuError::invalid("fusion_d supports levels 1 and 2")),
    }
}

fn eight_fusion_faces(sys: &LoopSystem, level: usize) -> Result<Vec<CoverMorphism>> {
    match level {
        1 => Ok(vec![sys.rho_f8(2, 1)?, sys.rho_f8(2, 2)?]),
        2 => Ok(vec![
            sys.rho_f8(3, 1)?,
            sys.rho_f8(3, 2)?,
            sys.rho_f8(3, 3)?,
        ]),
        _ => Err(LofuError::invalid("fusion_d_eight supports levels 1 and 2")),
    }
}

/// Figure-of-eight operator
/// `(∂̄f)(x) = −(π₃^*f)(x) − (π₁^*f)(x) + (join^*f)(x)` on the level-l
/// figure-of-eight nerve (l = 1 for path cochains, 2 for loop cochains,
/// 3 for the fused-triple analog).
pub fn eight_partial(sys: &LoopSystem, f: &Cochain, level: usize) -> Result<Cochain> {
    let pi3 = sys.f8_pi3(level)?;
    let pi1 = sys.f8_pi1(level)?;
    let join = sys.f8_join(level)?;
    morphism_sum(&[(&pi3, -1, f), (&pi1, -1, f), (&join, 1, f)])
}

/// A loop-fusion membership certificate: `δω = 0`, `dω = 0`, and
/// `∂̄ω = δg` with `dg = 0` witnessed by `g` (absent in degree 0, where
/// `∂̄ω = 0` must hold exactly).
#[derive(Debug)]
pub struct LfCertificate {
    pub omega: Cochain,
    pub g: Option<Cochain>,
    pub reports: Vec<IdentityReport>,
}

/// Verifies (or solves for) the loop-fusion certificate of `ω`.
/// When `g_hint` is supplied its identities are verified as given;
/// otherwise the block system `δg = ∂̄ω`, `dg = 0` is solved.
pub fn lf_certificate(
    sys: &LoopSystem,
    omega: &Cochain,
    g_hint: Option<Cochain>,
) -> Result<LfCertificate> {
    let k0 = omega.degree;
    let mut reports = Vec::new();

    let dc = omega.delta_matches(None)?;
    reports.push(
        IdentityReport {
            name: "δω = 0".into(),
            holds: dc.violation.is_none(),
            witness: dc.violation,
            domain: dc.domain,
        }
        .require()?,
    );

    let rhos = fusion_faces(sys, 2)?;
    let d_parts: Vec<(&CoverMorphism, i64, &Cochain)> = rhos
        .iter()
        .enumerate()
        .map(|(i, m)| (m, if (i + 1) % 2 == 0 { 1i64 } else { -1 }, omega))
        .collect();
    reports.push(morphism_sum_check("dω = 0", &sys.gamma3, k0 + 1, &d_parts, None)?.require()?);

    let pi3 = sys.f8_pi3(2)?;
    let pi1 = sys.f8_pi1(2)?;
    let join = sys.f8_join(2)?;
    let eight_parts: Vec<(&CoverMorphism, i64, &Cochain)> =
        vec![(&pi3, -1, omega), (&pi1, -1, omega), (&join, 1, omega)];

    let g = if k0 == 0 {
        // degree edge case: no degree −1 witnesses exist, so the
        // figure-of-eight defect must vanish on the nose
        reports.push(
            morphism_sum_check("∂̄ω = 0", &sys.f8_2, 1, &eight_parts, None)?.require()?,
        );
        None
    } else {
        let eight_omega = eight_partial(sys, omega, 2)?;
        let g = match g_hint {
            Some(g) => g,
            None => solve_g(sys, &eight_omega, k0)?,
        };
        let check = g.delta_matches(Some(&eight_omega))?;
        reports.push(
            IdentityReport {
                name: "∂̄ω = δg".into(),
                holds: check.violation.is_none(),
                witness: check.violation,
                domain: check.domain,
            }
            .require()?,
        );
        let dg_check = {
            let faces = eight_fusion_faces(sys, 2)?;
            let parts: Vec<(&CoverMorphism, i64, &Cochain)> = faces
                .iter()
                .enumerate()
                .map(|(i, m)| (m, if (i + 1) % 2 == 0 { 1i64 } else { -1 }, &g))
                .collect();
            morphism_sum_check("dg = 0", &sys.f8_3, k0, &parts, None)?
        };
        reports.push(dg_check.require()?);
        Some(g)
    };

    Ok(LfCertificate {
        omega: omega.clone(),
        g,
        reports,
    })
}

/// Solves the block system `δg = ∂̄ω`, `dg = 0` for `g` of degree
/// `k0 − 1` on the figure-of-eight nerve.
fn solve_g(sys: &LoopSystem, eight_omega: &Cochain, k0: usize) -> Result<Cochain> {
    let nerve = &sys.f8_2;
    let n_vars = nerve.count(k0);
    let mut builder = SystemBuilder::new(&sys.group, n_vars);
    // δg = ∂̄ω rows
    let mut face = vec![0u32; k0];
    let mut row: Vec<(u32, i64)> = Vec::new();
    for w_id in 0..nerve.count(k0 + 1) as u32 {
        let w = nerve.tuple(k0 + 1, w_id);
        row.clear();
        for j in 0..k0 + 1 {
            write_face(w, j, &mut face);
            row.push((
                nerve.require_tuple_id(&face)?,
                if j % 2 == 0 { 1 } else { -1 },
            ));
        }
        builder.push_row(row.clone(), eight_omega.value(w_id));
    }
    // dg = 0 rows on the level-3 figure-of-eight nerve
    let faces = eight_fusion_faces(sys, 2)?;
    let zero = vec![0i64; sys.group.dim()];
    let mut image = Vec::new();
    for t_id in 0..sys.f8_3.count(k0) as u32 {
        let t = sys.f8_3.tuple(k0, t_id);
        row.clear();
        for (i, m) in faces.iter().enumerate() {
            m.apply_tuple(t, &mut image);
            row.push((
                nerve.require_tuple_id(&image)?,
                if (i + 1) % 2 == 0 { 1 } else { -1 },
            ));
        }
        builder.push_row(row.clone(), &zero);
    }
    let flat = builder.solve(sys.seed).ok_or_else(|| {
        LofuError::truncation("lf_certificate", "no fusion g with δg = ∂̄ω at this truncation")
    })?;
    let dim = sys.group.dim();
    let mut g = Cochain::zero(nerve, &sys.group, k0 - 1)?;
    for i in 0..n_vars as u32 {
        g.set_value(i, &flat[i as usize * dim..(i as usize + 1) * dim]);
    }
    Ok(g)
}

/// Witness for loop-fusion class equality `ω' − ω = δμ` with `dμ = 0`
/// and `∂̄μ = δg_μ`, `d g_μ = 0`.  In degree 0 classes are the cochains
/// themselves and the witness is empty.
#[derive(Debug)]
pub struct LfClassWitness {
    pub mu: Option<Cochain>,
    pub g_mu: Option<Cochain>,
}

pub fn lf_class_equal(
    sys: &LoopSystem,
    omega: &Cochain,
    omega2: &Cochain,
) -> Result<Option<LfClassWitness>> {
    let k0 = omega.degree;
    if omega2.degree != k0 {
        return Err(LofuError::invalid("lf_class_equal: degree mismatch"));
    }
    if k0 == 0 {
        return Ok(if omega.values_eq(omega2) {
            Some(LfClassWitness {
                mu: None,
                g_mu: None,
            })
        } else {
            None
        });
    }

    let diff = Cochain::combine(&[(omega2, 1), (omega, -1)])?;
    let n_mu = sys.lambda.count(k0);
    let n_gmu = if k0 >= 2 { sys.f8_2.count(k0 - 1) } else { 0 };
    let mut builder = SystemBuilder::new(&sys.group, n_mu + n_gmu);

    // δμ = ω' − ω
    let mut face = vec![0u32; k0];
    let mut row: Vec<(u32, i64)> = Vec::new();
    for w_id in 0..sys.lambda.count(k0 + 1) as u32 {
        let w = sys.lambda.tuple(k0 + 1, w_id);
        row.clear();
        for j in 0..k0 + 1 {
            write_face(w, j, &mut face);
            row.push((
                sys.lambda.require_tuple_id(&face)?,
                if j % 2 == 0 { 1 } else { -1 },
            ));
        }
        builder.push_row(row.clone(), diff.value(w_id));
    }
    let zero = vec![0i64; sys.group.dim()];
    // dμ = 0
    let rhos = fusion_faces(sys, 2)?;
    let mut image = Vec::new();
    for t_id in 0..sys.gamma3.count(k0) as u32 {
        let t = sys.gamma3.tuple(k0, t_id);
        row.clear();
        for (i, m) in rhos.iter().enumerate() {
            m.apply_tuple(t, &mut image);
            row.push((
                sys.lambda.require_tuple_id(&image)?,
                if (i + 1) % 2 == 0 { 1 } else { -1 },
            ));
        }
        builder.push_row(row.clone(), &zero);
    }
    // ∂̄μ = δ g_μ (or ∂̄μ = 0 when k0 = 1)
    let pi3 = sys.f8_pi3(2)?;
    let pi1 = sys.f8_pi1(2)?;
    let join = sys.f8_join(2)?;
    let mut face_lo = vec![0u32; k0.saturating_sub(1)];
    for t_id in 0..sys.f8_2.count(k0) as u32 {
        let t = sys.f8_2.tuple(k0, t_id);
        row.clear();
        for (m, sign) in [(&pi3, -1i64), (&pi1, -1), (&join, 1)] {
            m.apply_tuple(t, &mut image);
            row.push((sys.lambda.require_tuple_id(&image)?, sign));
        }
        if k0 >= 2 {
            for j in 0..k0 {
                write_face(t, j, &mut face_lo);
                let id = sys.f8_2.require_tuple_id(&face_lo)?;
                // −δg_μ on the left-hand side
                row.push((
                    n_mu as u32 + id,
                    if j % 2 == 0 { -1 } else { 1 },
                ));
            }
        }
        builder.push_row(row.clone(), &zero);
    }
    // d g_μ = 0
    if k0 >= 2 {
        let faces = eight_fusion_faces(sys, 2)?;
        for t_id in 0..sys.f8_3.count(k0 - 1) as u32 {
            let t = sys.f8_3.tuple(k0 - 1, t_id);
            row.clear();
            for (i, m) in faces.iter().enumerate() {
                m.apply_tuple(t, &mut image);
                row.push((
                    n_mu as u32 + sys.f8_2.require_tuple_id(&image)?,
                    if (i + 1) % 2 == 0 { 1 } else { -1 },
                ));
            }
            builder.push_row(row.clone(), &zero);
        }
    }

    let Some(flat) = builder.solve(sys.seed) else {
        return Ok(None);
    };
    let dim = sys.group.dim();
    let mut mu = Cochain::zero(&sys.lambda, &sys.group, k0 - 1)?;
    for i in 0..n_mu as u32 {
        mu.set_value(i, &flat[i as usize * dim..(i as usize + 1) * dim]);
    }
    let g_mu = if k0 >= 2 {
        let mut g = Cochain::zero(&sys.f8_2, &sys.group, k0 - 2)?;
        for i in 0..n_gmu as u32 {
            let off = (n_mu + i as usize) * dim;
            g.set_value(i, &flat[off..off + dim]);
        }
        Some(g)
    } else {
        None
    };
    Ok(Some(LfClassWitness { mu: Some(mu), g_mu }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixture;
    use crate::cover::DEFAULT_TUPLE_CAP;
    use crate::group::parse_group_spec;
    use rand::SeedableRng;

    fn system(spec: &str, k: usize, l_max: usize) -> LoopSystem {
        let c = fixture("circle").unwrap();
        let g = parse_group_spec(spec).unwrap();
        LoopSystem::build(&c, &g, k, l_max, 0, 0, DEFAULT_TUPLE_CAP).unwrap()
    }

    #[test]
    fn d_squared_vanishes() {
        let sys = system("Z/6", 1, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let beta = Cochain::random(&sys.tube, &sys.group, 0, &mut rng).unwrap();
        let d1 = fusion_d(&sys, &beta, 1).unwrap();
        let d2 = fusion_d(&sys, &d1, 2).unwrap();
        assert!(d2.is_zero());
    }

    #[test]
    fn zero_certificate() {
        let sys = system("Z", 1, 2);
        let omega = Cochain::zero(&sys.lambda, &sys.group, 0).unwrap();
        let cert = lf_certificate(&sys, &omega, None).unwrap();
        assert!(cert.reports.iter().all(|r| r.holds));
    }

    #[test]
    fn random_cochains_fail_the_fusion_condition() {
        let sys = system("Z", 1, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let omega = Cochain::random(&sys.lambda, &sys.group, 0, &mut rng).unwrap();
        match lf_certificate(&sys, &omega, None) {
            Err(LofuError::Verification { identity, .. }) => {
                assert!(identity.contains("δω") || identity.contains("dω"));
            }
            other => panic!("expected a named failing identity, got {other:?}"),
        }
    }

    #[test]
    fn class_equality_at_degree_zero_is_pointwise() {
        let sys = system("Z", 1, 2);
        let beta = {
            // any fusion cochain: d of a path cochain
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
            Cochain::random(&sys.tube, &sys.group, 0, &mut rng).unwrap()
        };
        let omega = fusion_d(&sys, &beta, 1).unwrap();
        assert!(lf_class_equal(&sys, &omega, &omega).unwrap().is_some());
        let doubled = Cochain::combine(&[(&omega, 2)]).unwrap();
        if !doubled.values_eq(&omega) {
            assert!(lf_class_equal(&sys, &omega, &doubled).unwrap().is_none());
        }
    }
}
