//! Star covers of the base complex, product covers of its powers, the
//! simplicial differential between them and the basepoint contraction.

use std::sync::Arc;

use crate::cochain::Cochain;
use crate::complex::SimplicialComplex;
use crate::cover::{Cover, Nerve};
use crate::error::{LofuError, Result};
use crate::morphism::CoverMorphism;

/// Cover of `M^n` by products of vertex stars.  Indices are n-digit
/// numbers base `V` (big-endian), so index order is the lexicographic
/// order of vertex tuples.  A tuple of indices is nonempty exactly when
/// every factor's digit set spans a simplex.
pub struct ProductCover {
    complex: Arc<SimplicialComplex>,
    n: usize,
}

impl ProductCover {
    pub fn new(complex: &Arc<SimplicialComplex>, n: usize) -> Self {
        assert!(n >= 1);
        ProductCover {
            complex: complex.clone(),
            n,
        }
    }

    pub fn factors(&self) -> usize {
        self.n
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn encode(&self, digits: &[u8]) -> u32 {
        debug_assert_eq!(digits.len(), self.n);
        let v = self.complex.vertex_count() as u32;
        digits.iter().fold(0u32, |acc, &d| acc * v + d as u32)
    }

    pub fn decode(&self, mut idx: u32, out: &mut [u8]) {
        let v = self.complex.vertex_count() as u32;
        for i in (0..self.n).rev() {
            out[i] = (idx % v) as u8;
            idx /= v;
        }
    }
}

impl Cover for ProductCover {
    fn len(&self) -> usize {
        self.complex.vertex_count().pow(self.n as u32)
    }

    fn tuple_nonempty(&self, t: &[u32]) -> bool {
        let v = self.complex.vertex_count() as u32;
        for factor in 0..self.n {
            let shift = self.n - 1 - factor;
            let mut mask = 0u32;
            for &idx in t {
                let mut x = idx;
                for _ in 0..shift {
                    x /= v;
                }
                mask |= 1 << (x % v);
            }
            if !self.complex.spans_mask(mask) {
                return false;
            }
        }
        true
    }

    fn name(&self) -> String {
        if self.n == 1 {
            format!("{}-star", self.complex.name())
        } else {
            format!("{}^{}-star", self.complex.name(), self.n)
        }
    }
}

/// The base spaces `M, M^2, ..., M^nmax` with their nerves.
pub struct BaseSpaces {
    pub complex: Arc<SimplicialComplex>,
    covers: Vec<Arc<ProductCover>>,
    nerves: Vec<Arc<Nerve>>,
}

impl BaseSpaces {
    /// Builds nerves of `M^1..M^nmax`, with `depths[i]` the stored tuple
    /// depth of `M^(i+1)`.
    pub fn build(
        complex: &Arc<SimplicialComplex>,
        depths: &[usize],
        cap: usize,
    ) -> Result<BaseSpaces> {
        let mut covers = Vec::new();
        let mut nerves = Vec::new();
        for (i, &depth) in depths.iter().enumerate() {
            let cover = Arc::new(ProductCover::new(complex, i + 1));
            let nerve = Nerve::build(cover.clone() as Arc<dyn Cover>, depth, cap)?;
            covers.push(cover);
            nerves.push(nerve);
        }
        Ok(BaseSpaces {
            complex: complex.clone(),
            covers,
            nerves,
        })
    }

    pub fn nmax(&self) -> usize {
        self.nerves.len()
    }

    pub fn nerve(&self, n: usize) -> &Arc<Nerve> {
        &self.nerves[n - 1]
    }

    pub fn cover(&self, n: usize) -> &Arc<ProductCover> {
        &self.covers[n - 1]
    }

    /// `π_j : M^n → M^(n−1)` omitting the j-th factor (1-indexed), as a
    /// morphism for pullback.
    pub fn pi(&self, n: usize, j: usize) -> Result<CoverMorphism> {
        assert!(n >= 2 && 1 <= j && j <= n);
        let src = self.cover(n);
        let mut map = Vec::with_capacity(src.len());
        let mut digits = vec![0u8; n];
        let mut out = vec![0u8; n - 1];
        for idx in 0..src.len() as u32 {
            src.decode(idx, &mut digits);
            out[..j - 1].copy_from_slice(&digits[..j - 1]);
            out[j - 1..].copy_from_slice(&digits[j..]);
            map.push(self.cover(n - 1).encode(&out));
        }
        CoverMorphism::new(
            format!("pi_{j}^{n}"),
            self.nerve(n),
            self.nerve(n - 1),
            map,
        )
    }

    /// Basepoint inclusion `i_n : M^n → M^(n+1)`, prepending the star of
    /// the basepoint vertex.
    pub fn inclusion(&self, n: usize, basepoint: u8) -> Result<CoverMorphism> {
        assert!(n + 1 <= self.nmax());
        let src = self.cover(n);
        let mut map = Vec::with_capacity(src.len());
        let mut digits = vec![0u8; n];
        let mut out = vec![0u8; n + 1];
        for idx in 0..src.len() as u32 {
            src.decode(idx, &mut digits);
            out[0] = basepoint;
            out[1..].copy_from_slice(&digits);
            map.push(self.cover(n + 1).encode(&out));
        }
        CoverMorphism::new(
            format!("i_{n}@{basepoint}"),
            self.nerve(n),
            self.nerve(n + 1),
            map,
        )
    }

    /// Simplicial differential `∂f = Σ_{j=1}^{n+1} (−1)^j π_j^* f` from
    /// cochains on `M^n` to cochains on `M^(n+1)`.
    pub fn partial(&self, f: &Cochain, n: usize) -> Result<Cochain> {
        if !Arc::ptr_eq(&f.nerve, self.nerve(n)) {
            return Err(LofuError::invalid("partial: cochain is not on M^n"));
        }
        let mut acc = Cochain::zero(self.nerve(n + 1), &f.group, f.degree)?;
        for j in 1..=n + 1 {
            let pulled = self.pi(n + 1, j)?.pullback(f)?;
            let sign = if j % 2 == 0 { 1 } else { -1 };
            acc.add_scaled(&pulled, sign)?;
        }
        Ok(acc)
    }

    /// Basepoint contraction: for `∂f = 0` on `M^n` (n ≥ 2) returns
    /// `g = −i_{n−1}^* f` with `∂g = f` exactly.
    pub fn partial_contract(&self, f: &Cochain, n: usize, basepoint: u8) -> Result<Cochain> {
        if n < 2 {
            return Err(LofuError::invalid("partial_contract needs n >= 2"));
        }
        let df = self.partial(f, n)?;
        if !df.is_zero() {
            return Err(LofuError::verification(
                "partial_contract precondition ∂f = 0",
                "nonzero ∂f",
            ));
        }
        Ok(self.inclusion(n - 1, basepoint)?.pullback(f)?.negated())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixture;
    use crate::cover::DEFAULT_TUPLE_CAP;
    use crate::group::parse_group_spec;
    use rand::SeedableRng;

    fn circle_base(nmax: usize, depth: usize) -> BaseSpaces {
        let c = fixture("circle").unwrap();
        BaseSpaces::build(&c, &vec![depth; nmax], DEFAULT_TUPLE_CAP).unwrap()
    }

    #[test]
    fn star_nerve_sizes() {
        let c = fixture("circle").unwrap();
        let base = BaseSpaces::build(&c, &[3], DEFAULT_TUPLE_CAP).unwrap();
        // degree-2 level: (i,i) for 3 vertices plus (i,j),(j,i) per edge
        assert_eq!(base.nerve(1).count(2), 9);

        let tri = fixture("triangle").unwrap();
        let base = BaseSpaces::build(&tri, &[3], DEFAULT_TUPLE_CAP).unwrap();
        assert_eq!(base.nerve(1).count(3), 27);

        let iv = fixture("interval").unwrap();
        let base = BaseSpaces::build(&iv, &[3], DEFAULT_TUPLE_CAP).unwrap();
        assert_eq!(base.nerve(1).count(3), 8);
    }

    #[test]
    fn product_cover_sizes_and_projections() {
        let base = circle_base(2, 2);
        assert_eq!(base.cover(2).len(), 9);
        assert_eq!(base.nerve(2).count(2), 81);
        // π_1 omits the first factor: (a,b) -> b
        let pi1 = base.pi(2, 1).unwrap();
        let ab = base.cover(2).encode(&[1, 2]);
        assert_eq!(pi1.apply_index(ab), 2);
        let pi2 = base.pi(2, 2).unwrap();
        assert_eq!(pi2.apply_index(ab), 1);
    }

    #[test]
    fn partial_squared_vanishes() {
        let base = circle_base(3, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for spec in ["Z", "Z/2", "Z/6"] {
            let g = parse_group_spec(spec).unwrap();
            for deg in 0..2 {
                let f = Cochain::random(base.nerve(1), &g, deg, &mut rng).unwrap();
                let ddf = base.partial(&base.partial(&f, 1).unwrap(), 2).unwrap();
                assert!(ddf.is_zero(), "∂²≠0 over {spec} deg {deg}");
            }
        }
    }

    #[test]
    fn constant_degree_zero_has_zero_partial() {
        let base = circle_base(2, 2);
        let g = parse_group_spec("Z").unwrap();
        let mut f = Cochain::zero(base.nerve(1), &g, 0).unwrap();
        for i in 0..f.len() as u32 {
            f.set_value(i, &[5]);
        }
        assert!(base.partial(&f, 1).unwrap().is_zero());
    }

    #[test]
    fn contraction_inverts_partial() {
        let base = circle_base(4, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = parse_group_spec("Z/6").unwrap();
        for n in 2..=3usize {
            for _ in 0..10 {
                let h = Cochain::random(base.nerve(n - 1), &g, 0, &mut rng).unwrap();
                let f = base.partial(&h, n - 1).unwrap();
                let gcon = base.partial_contract(&f, n, 0).unwrap();
                let dg = base.partial(&gcon, n - 1).unwrap();
                assert!(dg.values_eq(&f), "∂g ≠ f at n={n}");
            }
        }
    }

    #[test]
    fn contraction_rejects_non_cocycles() {
        let base = circle_base(3, 2);
        let g = parse_group_spec("Z").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // a random degree-0 cochain on M^2 is almost surely not ∂-closed
        let f = Cochain::random(base.nerve(2), &g, 0, &mut rng).unwrap();
        if !base.partial(&f, 2).unwrap().is_zero() {
            assert!(base.partial_contract(&f, 2, 0).is_err());
        }
    }

    #[test]
    fn projection_composition_identities() {
        // π_1 ∘ i_1 = id and π_2 ∘ i_1 = constant basepoint, at the
        // index level
        let base = circle_base(2, 2);
        let i1 = base.inclusion(1, 0).unwrap();
        let pi1 = base.pi(2, 1).unwrap();
        let pi2 = base.pi(2, 2).unwrap();
        for v in 0..3u32 {
            let up = i1.apply_index(v);
            assert_eq!(pi1.apply_index(up), v);
            assert_eq!(pi2.apply_index(up), 0);
        }
    }
}
