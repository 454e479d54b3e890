//! Cochains on nerves: one coefficient-group element per ordered tuple.
//!
//! Values are stored flattened (`count * group.dim()` integers) in the
//! lexicographic tuple order of the nerve level, always canonically
//! reduced.

use std::sync::Arc;

use rand::Rng;

use crate::cover::Nerve;
use crate::error::{LofuError, Result};
use crate::group::AbelianGroup;

#[derive(Clone)]
pub struct Cochain {
    pub nerve: Arc<Nerve>,
    pub group: AbelianGroup,
    pub degree: usize,
    values: Vec<i64>,
}

/// Outcome of a streaming differential check.
#[derive(Debug)]
pub struct DeltaCheck {
    pub violation: Option<Vec<u32>>,
    pub domain: usize,
}

impl std::fmt::Debug for Cochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cochain")
            .field("nerve", &self.nerve.name())
            .field("degree", &self.degree)
            .field("tuples", &self.len())
            .finish()
    }
}

impl Cochain {
    pub fn zero(nerve: &Arc<Nerve>, group: &AbelianGroup, degree: usize) -> Result<Cochain> {
        if nerve.depth() < degree + 1 {
            return Err(LofuError::invalid(format!(
                "nerve {} depth {} cannot carry a degree-{} cochain",
                nerve.name(),
                nerve.depth(),
                degree
            )));
        }
        let count = nerve.count(degree + 1);
        Ok(Cochain {
            nerve: nerve.clone(),
            group: group.clone(),
            degree,
            values: vec![0; count * group.dim()],
        })
    }

    /// Number of tuples carrying a value.
    pub fn len(&self) -> usize {
        self.nerve.count(self.degree + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: u32) -> &[i64] {
        let d = self.group.dim();
        &self.values[i as usize * d..(i as usize + 1) * d]
    }

    pub fn value_at(&self, tuple: &[u32]) -> Result<&[i64]> {
        let id = self.nerve.require_tuple_id(tuple)?;
        Ok(self.value(id))
    }

    pub fn set_value(&mut self, i: u32, coords: &[i64]) {
        let d = self.group.dim();
        let dst = &mut self.values[i as usize * d..(i as usize + 1) * d];
        dst.copy_from_slice(coords);
        for (q, v) in dst.iter_mut().enumerate() {
            *v = self.group.reduce_coord(q, *v);
        }
    }

    /// In-place `self += c * other`; nerve and degree must agree.
    pub fn add_scaled(&mut self, other: &Cochain, c: i64) -> Result<()> {
        self.compatible(other)?;
        let d = self.group.dim();
        for (i, v) in self.values.iter_mut().enumerate() {
            *v = self
                .group
                .reduce_coord(i % d, *v + c * other.values[i]);
        }
        Ok(())
    }

    pub fn negated(&self) -> Cochain {
        let mut out = self.clone();
        let d = self.group.dim();
        for (i, v) in out.values.iter_mut().enumerate() {
            *v = self.group.reduce_coord(i % d, -*v);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn values_eq(&self, other: &Cochain) -> bool {
        self.degree == other.degree && self.values == other.values
    }

    fn compatible(&self, other: &Cochain) -> Result<()> {
        if !Arc::ptr_eq(&self.nerve, &other.nerve) || self.degree != other.degree {
            return Err(LofuError::invalid(format!(
                "cochain mismatch: {}/deg{} vs {}/deg{}",
                self.nerve.name(),
                self.degree,
                other.nerve.name(),
                other.degree
            )));
        }
        if self.group != other.group {
            return Err(LofuError::invalid("coefficient group mismatch"));
        }
        Ok(())
    }

    /// Čech differential, materialized on the next degree:
    /// `(δf)(w) = Σ_j (−1)^j f(w \ j)`.
    pub fn delta(&self) -> Result<Cochain> {
        let k = self.degree;
        let mut out = Cochain::zero(&self.nerve, &self.group, k + 1)?;
        let dim = self.group.dim();
        let mut face = vec![0u32; k + 1];
        let mut w_id = 0u32;
        let mut acc = vec![0i64; dim];
        self.nerve.for_each_tuple(k + 2, |w| {
            acc.iter_mut().for_each(|v| *v = 0);
            for j in 0..k + 2 {
                write_face(w, j, &mut face);
                let fid = self.nerve.require_tuple_id(&face)?;
                let sign = if j % 2 == 0 { 1 } else { -1 };
                for (a, b) in acc.iter_mut().zip(self.value(fid)) {
                    *a += sign * b;
                }
            }
            out.set_value(w_id, &acc);
            w_id += 1;
            Ok(())
        })?;
        Ok(out)
    }

    /// Streaming check that `δ(self)` equals `target` (or zero when
    /// `target` is `None`) on every tuple of the next degree.
    pub fn delta_matches(&self, target: Option<&Cochain>) -> Result<DeltaCheck> {
        let k = self.degree;
        let dim = self.group.dim();
        let mut face = vec![0u32; k + 1];
        let mut acc = vec![0i64; dim];
        let mut check = DeltaCheck {
            violation: None,
            domain: 0,
        };
        let res = self.nerve.for_each_tuple(k + 2, |w| {
            check.domain += 1;
            acc.iter_mut().for_each(|v| *v = 0);
            for j in 0..k + 2 {
                write_face(w, j, &mut face);
                let fid = self.nerve.require_tuple_id(&face)?;
                let sign = if j % 2 == 0 { 1 } else { -1 };
                for (a, b) in acc.iter_mut().zip(self.value(fid)) {
                    *a += sign * b;
                }
            }
            let ok = match target {
                None => acc
                    .iter()
                    .enumerate()
                    .all(|(q, &v)| self.group.reduce_coord(q, v) == 0),
                Some(t) => {
                    let tv = t.value_at(w)?;
                    acc.iter()
                        .zip(tv)
                        .enumerate()
                        .all(|(q, (&a, &b))| self.group.reduce_coord(q, a - b) == 0)
                }
            };
            if !ok {
                check.violation = Some(w.to_vec());
                return Err(LofuError::invalid("__stop__"));
            }
            Ok(())
        });
        match res {
            Ok(()) => Ok(check),
            Err(LofuError::InvalidInput(s)) if s == "__stop__" => Ok(check),
            Err(e) => Err(e),
        }
    }

    /// Deterministic pseudo-random cochain for property tests.
    pub fn random(
        nerve: &Arc<Nerve>,
        group: &AbelianGroup,
        degree: usize,
        rng: &mut impl Rng,
    ) -> Result<Cochain> {
        let mut out = Cochain::zero(nerve, group, degree)?;
        for v in out.values.iter_mut() {
            *v = rng.random_range(-9..10);
        }
        let d = group.dim();
        for (i, v) in out.values.iter_mut().enumerate() {
            *v = group.reduce_coord(i % d, *v);
        }
        Ok(out)
    }

    /// Pointwise integer-weighted sum of cochains on one nerve/degree.
    pub fn combine(parts: &[(&Cochain, i64)]) -> Result<Cochain> {
        let (first, _) = parts
            .first()
            .ok_or_else(|| LofuError::invalid("combine of nothing"))?;
        let mut out = Cochain::zero(&first.nerve, &first.group, first.degree)?;
        for &(f, c) in parts {
            out.add_scaled(f, c)?;
        }
        Ok(out)
    }

    /// Serializable view: (tuple, coordinates) in lexicographic order.
    pub fn export(&self) -> Vec<(Vec<u32>, Vec<i64>)> {
        (0..self.len() as u32)
            .map(|i| {
                (
                    self.nerve.tuple(self.degree + 1, i).to_vec(),
                    self.value(i).to_vec(),
                )
            })
            .collect()
    }
}

/// Writes `w` with entry `j` omitted into `buf`.
pub fn write_face(w: &[u32], j: usize, buf: &mut [u32]) {
    debug_assert_eq!(buf.len() + 1, w.len());
    buf[..j].copy_from_slice(&w[..j]);
    buf[j..].copy_from_slice(&w[j + 1..]);
}
