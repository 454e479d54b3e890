//! Certificate documents: the structured text emitted by the CLI.
//!
//! A certificate records the run parameters, the named identities with
//! their verification status and witnesses, and the intermediate
//! cochains as (tuple, coordinate-vector) lists in lexicographic tuple
//! order, so equal inputs produce byte-identical files.

use serde::{Deserialize, Serialize};

use crate::cochain::Cochain;
use crate::error::{LofuError, Result};
use crate::lf::IdentityReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub command: String,
    pub complex: String,
    pub group: String,
    pub degree: usize,
    pub lmax: usize,
    pub basepoint: u8,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityDoc {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
    pub domain: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainDoc {
    pub name: String,
    pub cover: String,
    pub degree: usize,
    pub values: Vec<(Vec<u32>, Vec<i64>)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub params: ParamsDoc,
    pub identities: Vec<IdentityDoc>,
    pub cochains: Vec<CochainDoc>,
}

impl CertificateDoc {
    pub fn new(params: ParamsDoc) -> Self {
        CertificateDoc {
            params,
            identities: Vec::new(),
            cochains: Vec::new(),
        }
    }

    pub fn push_identities(&mut self, reports: &[IdentityReport]) {
        for r in reports {
            self.identities.push(IdentityDoc {
                name: r.name.clone(),
                status: if r.holds { "verified" } else { "failed" }.into(),
                witness: r.witness.clone(),
                domain: r.domain,
            });
        }
    }

    pub fn push_cochain(&mut self, name: &str, c: &Cochain) {
        self.cochains.push(CochainDoc {
            name: name.into(),
            cover: c.nerve.name(),
            degree: c.degree,
            values: c.export(),
        });
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("certificate serialization");
        out.push(b'\n');
        out
    }
}

/// Document format for a cochain supplied on the command line (the
/// `--omega` input): degree plus the full lexicographic value list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainFileDoc {
    pub degree: usize,
    pub values: Vec<(Vec<u32>, Vec<i64>)>,
}

pub fn parse_cochain_doc(text: &str) -> Result<CochainFileDoc> {
    serde_json::from_str(text).map_err(|e| LofuError::invalid(format!("cochain document: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cochain_doc_round_trips() {
        let doc = CochainFileDoc {
            degree: 1,
            values: vec![(vec![0, 1], vec![2]), (vec![1, 0], vec![-2])],
        };
        let text = serde_json::to_string(&doc).unwrap();
        let back = parse_cochain_doc(&text).unwrap();
        assert_eq!(back.degree, 1);
        assert_eq!(back.values.len(), 2);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(parse_cochain_doc("{").is_err());
        assert!(parse_cochain_doc(r#"{"degree": "x"}"#).is_err());
    }
}
