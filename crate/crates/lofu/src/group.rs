//! Finitely generated abelian coefficient groups and their elements.
//!
//! A group is presented canonically as `Z^rank + Z/d_1 + ... + Z/d_t` with
//! `2 <= d_1 | d_2 | ... | d_t`.  All cochain values in the engine are
//! elements of such a group, written additively.  Elements are integer
//! coordinate vectors of length `rank + t`, with the torsion coordinates
//! kept as canonical residues `0 <= c < d_i`.

use std::fmt;

use crate::error::{LofuError, Result};

/// Canonical presentation of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct AbelianGroup {
    rank: usize,
    torsion: Vec<i64>,
}

impl AbelianGroup {
    /// Builds a group from a free rank and an arbitrary list of cyclic
    /// orders, normalizing to the canonical invariant-factor form.
    pub fn new(rank: usize, torsion: &[i64]) -> Result<Self> {
        for &d in torsion {
            if d < 2 {
                return Err(LofuError::invalid(format!(
                    "torsion order {d} is below 2"
                )));
            }
        }
        Ok(AbelianGroup {
            rank,
            torsion: invariant_factors(torsion),
        })
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        AbelianGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    /// Number of coordinates of an element.
    pub fn dim(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Modulus of coordinate `i`: 0 for a free coordinate, `d` for Z/d.
    pub fn modulus(&self, i: usize) -> i64 {
        if i < self.rank {
            0
        } else {
            self.torsion[i - self.rank]
        }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.dim()],
        }
    }

    /// Canonical residue reduction, coordinate by coordinate.
    pub fn reduce_coord(&self, i: usize, v: i64) -> i64 {
        let m = self.modulus(i);
        if m == 0 {
            v
        } else {
            v.rem_euclid(m)
        }
    }

    pub fn reduce_slice(&self, coords: &mut [i64]) {
        debug_assert_eq!(coords.len(), self.dim());
        for (i, c) in coords.iter_mut().enumerate() {
            *c = self.reduce_coord(i, *c);
        }
    }

    pub fn element(&self, coords: Vec<i64>) -> Result<GroupElement> {
        if coords.len() != self.dim() {
            return Err(LofuError::invalid(format!(
                "element has {} coordinates, group has {}",
                coords.len(),
                self.dim()
            )));
        }
        let mut coords = coords;
        self.reduce_slice(&mut coords);
        Ok(GroupElement { coords })
    }

    /// Number of elements, when finite and small enough to enumerate.
    pub fn order(&self) -> Option<u64> {
        if self.rank > 0 {
            return None;
        }
        let mut n: u64 = 1;
        for &d in &self.torsion {
            n = n.checked_mul(d as u64)?;
        }
        Some(n)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for &d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// An element of an [`AbelianGroup`], stored as reduced coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct GroupElement {
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// Normalizes a list of cyclic orders to invariant factors
/// `d_1 | d_2 | ... | d_t`, dropping factors of 1.
///
/// Works prime by prime: for each prime the multiset of prime-power
/// exponents is sorted and the largest powers of every prime are merged
/// into the last invariant factor, the next largest into the one before,
/// and so on.
pub fn invariant_factors(orders: &[i64]) -> Vec<i64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
    for &d in orders {
        let mut d = d;
        let mut p = 2;
        while p * p <= d {
            if d % p == 0 {
                let mut e = 0;
                while d % p == 0 {
                    d /= p;
                    e += 1;
                }
                by_prime.entry(p).or_default().push(e);
            }
            p += 1;
        }
        if d > 1 {
            by_prime.entry(d).or_default().push(1);
        }
    }
    let slots = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut factors = vec![1i64; slots];
    for (p, mut exps) in by_prime {
        exps.sort_unstable();
        // largest exponent goes into the last (largest) invariant factor
        for (k, &e) in exps.iter().rev().enumerate() {
            let slot = slots - 1 - k;
            factors[slot] *= p.pow(e);
        }
    }
    factors.retain(|&d| d > 1);
    factors
}

/// Parses the group grammar `Z(^n)? ( '+' Z/d )*`, with the terms allowed
/// in any order, and returns the canonical presentation.  The trivial
/// group renders and parses as `0`.
pub fn parse_group_spec(text: &str) -> Result<AbelianGroup> {
    let text = text.trim();
    if text == "0" {
        return Ok(AbelianGroup::trivial());
    }
    if text.is_empty() {
        return Err(LofuError::invalid("empty group spec"));
    }
    let mut rank = 0usize;
    let mut torsion = Vec::new();
    for term in text.split('+') {
        let term = term.trim();
        if term == "Z" {
            rank += 1;
        } else if let Some(rest) = term.strip_prefix("Z^") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| LofuError::invalid(format!("bad exponent in `{term}`")))?;
            if n == 0 {
                return Err(LofuError::invalid("Z^0 is not a valid term"));
            }
            rank += n;
        } else if let Some(rest) = term.strip_prefix("Z/") {
            let d: i64 = rest
                .trim()
                .parse()
                .map_err(|_| LofuError::invalid(format!("bad torsion order in `{term}`")))?;
            if d < 2 {
                return Err(LofuError::invalid(format!(
                    "torsion order {d} is below 2"
                )));
            }
            torsion.push(d);
        } else {
            return Err(LofuError::invalid(format!("unrecognized term `{term}`")));
        }
    }
    AbelianGroup::new(rank, &torsion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_free_rank_one() {
        let g = parse_group_spec("Z").unwrap();
        assert_eq!(g.rank(), 1);
        assert!(g.torsion().is_empty());
    }

    #[test]
    fn parse_klein_four_is_already_canonical() {
        let g = parse_group_spec("Z/2+Z/2").unwrap();
        assert_eq!(g.rank(), 0);
        assert_eq!(g.torsion(), &[2, 2]);
    }

    #[test]
    fn parse_z4_plus_z6_normalizes() {
        // Elementary-divisor oracle: Z/4 x Z/6 has 24 elements, maximal
        // element order lcm(4,6) = 12, and 24/12 = 2 elements per coset,
        // so the invariant factors are [2, 12].
        let max_order = brute_force_max_order(&[4, 6]);
        assert_eq!(max_order, 12);
        let g = parse_group_spec("Z/4+Z/6").unwrap();
        assert_eq!(g.rank(), 0);
        assert_eq!(g.torsion(), &[2, 12]);
        assert_eq!(g.order(), Some(24));
    }

    fn brute_force_max_order(orders: &[i64]) -> i64 {
        // order of (a_1, ..., a_k) in prod Z/d_i is lcm of d_i/gcd(a_i,d_i)
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let mut best = 1;
        let mut idx = vec![0i64; orders.len()];
        loop {
            let mut ord = 1i64;
            for (a, &d) in idx.iter().zip(orders) {
                let o = d / gcd(*a, d);
                ord = ord / gcd(ord, o) * o;
            }
            best = best.max(ord);
            let mut i = 0;
            loop {
                if i == orders.len() {
                    return best;
                }
                idx[i] += 1;
                if idx[i] < orders[i] {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn divisibility_chain_holds() {
        let g = parse_group_spec("Z/8+Z/12+Z/3+Z/2").unwrap();
        let t = g.torsion();
        for w in t.windows(2) {
            assert_eq!(w[1] % w[0], 0, "chain broken in {t:?}");
        }
        assert_eq!(
            t.iter().product::<i64>(),
            8 * 12 * 3 * 2,
            "order must be preserved"
        );
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(parse_group_spec("Z/1").is_err());
        assert!(parse_group_spec("Z/0").is_err());
        assert!(parse_group_spec("").is_err());
        assert!(parse_group_spec("Q").is_err());
        assert!(parse_group_spec("Z^0").is_err());
    }

    #[test]
    fn trivial_round_trips() {
        let g = parse_group_spec("0").unwrap();
        assert!(g.is_trivial());
        assert_eq!(g.to_string(), "0");
    }

    #[test]
    fn element_reduction() {
        let g = parse_group_spec("Z+Z/4").unwrap();
        let e = g.element(vec![-3, 7]).unwrap();
        assert_eq!(e.coords(), &[-3, 3]);
    }

    proptest! {
        #[test]
        fn parse_is_idempotent_on_canonical_rendering(
            rank in 0usize..4,
            orders in proptest::collection::vec(2i64..40, 0..5),
        ) {
            let g = AbelianGroup::new(rank, &orders).unwrap();
            let reparsed = parse_group_spec(&g.to_string()).unwrap();
            prop_assert_eq!(g, reparsed);
        }

        #[test]
        fn invariant_factors_preserve_order_and_chain(
            orders in proptest::collection::vec(2i64..60, 0..6),
        ) {
            let f = invariant_factors(&orders);
            let before: i128 = orders.iter().map(|&d| d as i128).product();
            let after: i128 = f.iter().map(|&d| d as i128).product();
            prop_assert_eq!(before, after);
            for w in f.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
        }
    }
}
