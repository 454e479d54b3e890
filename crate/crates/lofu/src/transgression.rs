//! Enhanced transgression: from a cocycle on the base to a loop-fusion
//! cocycle on the loop cover, with a fully re-verifiable certificate.
//!
//! The pipeline pulls the simplicial differential of the input back to
//! the path cover through the endpoint map, solves for a primitive in
//! the subcomplex vanishing on constants, and takes its fusion
//! differential.  The transgression class is `−[ω]`; the sign lives only
//! in documentation since all downstream comparisons are class-level.

use crate::c0::solve_in_c0;
use crate::cochain::Cochain;
use crate::error::{LofuError, Result};
use crate::fiber::LoopSystem;
use crate::lf::{
    eight_partial, fusion_d, fusion_d_eight, lf_certificate, IdentityReport, LfCertificate,
};
use crate::morphism::CoverMorphism;

#[derive(Debug)]
pub struct TransgressionCertificate {
    pub alpha: Cochain,
    pub beta: Cochain,
    pub omega: Cochain,
    pub eta: Option<Cochain>,
    pub lf: LfCertificate,
    pub reports: Vec<IdentityReport>,
}

pub fn constant_inclusions(sys: &LoopSystem) -> Result<Vec<CoverMorphism>> {
    (1..=sys.space.l_max).map(|l| sys.constant(l)).collect()
}

pub fn f8_constant_inclusions(sys: &LoopSystem) -> Result<Vec<CoverMorphism>> {
    sys.f8_constant_splits()
        .into_iter()
        .map(|(l1, l2)| sys.f8_constant(l1, l2))
        .collect()
}

pub fn transgress(sys: &LoopSystem, alpha: &Cochain) -> Result<TransgressionCertificate> {
    let k = sys.k;
    if alpha.degree != k {
        return Err(LofuError::invalid(format!(
            "transgress: cocycle degree {} does not match configured degree {k}",
            alpha.degree
        )));
    }
    if let Some(w) = alpha.delta_matches(None)?.violation {
        return Err(LofuError::invalid(format!(
            "transgress: input is not a cocycle (δα ≠ 0 at {w:?})"
        )));
    }
    let mut reports = Vec::new();

    // ε^*∂α on the tube nerve, a pinned-subcomplex cocycle
    let partial_alpha = sys.base.partial(alpha, 1)?;
    let eps = sys.epsilon()?;
    let target = eps.pullback(&partial_alpha)?;
    let inclusions = constant_inclusions(sys)?;
    let beta = solve_in_c0(&target, &inclusions, sys.seed, "transgress/beta")?;
    let beta_check = beta.delta_matches(Some(&target))?;
    reports.push(IdentityReport {
        name: "δβ = ε^*∂α".into(),
        holds: beta_check.violation.is_none(),
        witness: beta_check.violation,
        domain: beta_check.domain,
    });

    let omega = fusion_d(sys, &beta, 1)?;

    // figure-of-eight side: ∂̄β is a pinned cocycle; in degree k = 1 it
    // must vanish outright, otherwise it has a pinned primitive η and
    // g = dη witnesses the loop-fusion condition
    let eight_beta = eight_partial(sys, &beta, 1)?;
    let (eta, g) = if k == 1 {
        if !eight_beta.is_zero() {
            return Err(LofuError::verification(
                "∂̄β = 0 (degree-1 edge case)",
                "nonzero figure-of-eight defect",
            ));
        }
        reports.push(IdentityReport {
            name: "∂̄β = 0".into(),
            holds: true,
            witness: None,
            domain: eight_beta.len(),
        });
        (None, None)
    } else {
        let f8_inclusions = f8_constant_inclusions(sys)?;
        let eta = solve_in_c0(&eight_beta, &f8_inclusions, sys.seed, "transgress/eta")?;
        let eta_check = eta.delta_matches(Some(&eight_beta))?;
        reports.push(IdentityReport {
            name: "∂̄β = δη".into(),
            holds: eta_check.violation.is_none(),
            witness: eta_check.violation,
            domain: eta_check.domain,
        });
        let g = fusion_d_eight(sys, &eta, 1)?;
        (Some(eta), Some(g))
    };

    let lf = lf_certificate(sys, &omega, g)?;
    Ok(TransgressionCertificate {
        alpha: alpha.clone(),
        beta,
        omega,
        eta,
        lf,
        reports,
    })
}
