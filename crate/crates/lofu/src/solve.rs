//! Sparse exact linear solving over a coefficient group.
//!
//! Systems are solved coordinate by coordinate of the group's canonical
//! decomposition.  Each cyclic coordinate runs a sparse elimination that
//! pivots on unit coefficients; anything it cannot pivot (non-unit
//! residue classes) is collected into a small dense core and finished by
//! Smith normal form.  The modulus-2 coordinate has a bitset fast path,
//! which carries the large solves in the acceptance runs.
//!
//! Column preference is controlled by a seeded permutation so that
//! variable-order independence of downstream classes can be exercised;
//! seed 0 is the identity order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::AbelianGroup;
use crate::matrix::{mod_inverse, smith_normal_form, solve_cyclic_with, IntMatrix};

/// Sparse row: merged terms plus one right-hand group element.
#[derive(Debug, Clone)]
struct Row {
    terms: Vec<(u32, i64)>,
    rhs: Vec<i64>,
}

/// A sparse system `sum coeff * x_col = rhs` over a coefficient group.
#[derive(Debug)]
pub struct SystemBuilder {
    group: AbelianGroup,
    cols: usize,
    rows: Vec<Row>,
}

impl SystemBuilder {
    pub fn new(group: &AbelianGroup, cols: usize) -> Self {
        SystemBuilder {
            group: group.clone(),
            cols,
            rows: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; duplicate columns are merged, zero terms dropped.
    pub fn push_row(&mut self, mut terms: Vec<(u32, i64)>, rhs: &[i64]) {
        debug_assert_eq!(rhs.len(), self.group.dim());
        terms.sort_unstable_by_key(|&(c, _)| c);
        let mut merged: Vec<(u32, i64)> = Vec::with_capacity(terms.len());
        for (c, v) in terms {
            debug_assert!((c as usize) < self.cols);
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0);
        self.rows.push(Row {
            terms: merged,
            rhs: rhs.to_vec(),
        });
    }

    /// Solves the system, returning flattened coordinates
    /// (`cols * group.dim()`, canonically reduced) or `None`.
    pub fn solve(&self, seed: u64) -> Option<Vec<i64>> {
        let dim = self.group.dim();
        let priority = column_priority(self.cols, seed);
        let mut out = vec![0i64; self.cols * dim];
        for q in 0..dim {
            let n = self.group.modulus(q);
            let xq = self.solve_coordinate(q, n, &priority)?;
            for (j, v) in xq.into_iter().enumerate() {
                out[j * dim + q] = v;
            }
        }
        Some(out)
    }

    fn solve_coordinate(&self, q: usize, modulus: i64, priority: &[u32]) -> Option<Vec<i64>> {
        if modulus == 0 {
            return self.eliminate_int(q, 0, priority);
        }
        // split a composite modulus into prime powers and recombine
        let pps = prime_power_factors(modulus);
        let mut combined: Option<(Vec<i64>, i64)> = None;
        for &pe in &pps {
            let x = if pe == 2 {
                self.eliminate_mod2(q, priority)?
            } else {
                self.eliminate_int(q, pe, priority)?
            };
            combined = Some(match combined {
                None => (x, pe),
                Some((acc, m)) => (crt_combine(&acc, m, &x, pe), m * pe),
            });
        }
        combined.map(|(x, _)| x)
    }

    /// Unit-pivot sparse elimination with integer coefficients, modulus
    /// `n` (0 for Z).  Rows the elimination cannot pivot are finished by
    /// a dense Smith solve on their residual column support.
    fn eliminate_int(&self, q: usize, n: i64, priority: &[u32]) -> Option<Vec<i64>> {
        let is_unit = |v: i64| -> bool {
            if n == 0 {
                v == 1 || v == -1
            } else {
                gcd(v.rem_euclid(n), n) == 1
            }
        };
        let md = |v: i64| -> i64 {
            if n == 0 {
                v
            } else {
                v.rem_euclid(n)
            }
        };

        // pivot rows kept sparse, normalized to coefficient 1 at the
        // pivot column and fully reduced against one another
        let mut pivots: Vec<(u32, Vec<(u32, i64)>, i64)> = Vec::new();
        let mut pivot_of: Vec<Option<u32>> = vec![None; self.cols];

        // pivot rows are stored as tails: the pivot column itself is
        // implied with coefficient 1, so eliminating `coeff * e_c`
        // means dropping the hit column and subtracting the tail
        let reduce = |terms: &mut Vec<(u32, i64)>,
                      rhs: &mut i64,
                      pivots: &Vec<(u32, Vec<(u32, i64)>, i64)>,
                      pivot_of: &Vec<Option<u32>>| {
            loop {
                let hit = terms
                    .iter()
                    .find(|&&(c, _)| pivot_of[c as usize].is_some())
                    .copied();
                let Some((c, coeff)) = hit else { break };
                let pi = pivot_of[c as usize].unwrap() as usize;
                let (_, prow, prhs) = &pivots[pi];
                *terms = merge_scaled(terms, prow, c, coeff, &md);
                *rhs = md(*rhs - coeff * prhs);
            }
        };

        let mut queue: Vec<(Vec<(u32, i64)>, i64)> = self
            .rows
            .iter()
            .map(|r| {
                let terms: Vec<(u32, i64)> = r
                    .terms
                    .iter()
                    .map(|&(c, v)| (c, md(v)))
                    .filter(|&(_, v)| v != 0)
                    .collect();
                (terms, md(r.rhs[q]))
            })
            .collect();

        let residual: Vec<(Vec<(u32, i64)>, i64)> = loop {
            let mut progressed = false;
            let mut next_queue = Vec::new();
            for (mut terms, mut rhs) in queue {
                reduce(&mut terms, &mut rhs, &pivots, &pivot_of);
                if terms.is_empty() {
                    if rhs != 0 {
                        return None;
                    }
                    continue;
                }
                // choose the unit column minimal in the seeded order
                let unit = terms
                    .iter()
                    .filter(|&&(_, v)| is_unit(v))
                    .min_by_key(|&&(c, _)| priority[c as usize])
                    .copied();
                match unit {
                    Some((pc, pcoeff)) => {
                        let inv = if n == 0 {
                            pcoeff // +-1
                        } else {
                            mod_inverse(pcoeff, n).expect("unit coefficient")
                        };
                        let mut row: Vec<(u32, i64)> = terms
                            .iter()
                            .filter(|&&(c, _)| c != pc)
                            .map(|&(c, v)| (c, md(v * inv)))
                            .filter(|&(_, v)| v != 0)
                            .collect();
                        row.sort_unstable_by_key(|&(c, _)| c);
                        let prhs = md(rhs * inv);
                        // keep earlier pivot rows reduced at the new column
                        let new_idx = pivots.len() as u32;
                        for k in 0..pivots.len() {
                            let coeff = pivots[k]
                                .1
                                .iter()
                                .find(|&&(c, _)| c == pc)
                                .map(|&(_, v)| v)
                                .unwrap_or(0);
                            if coeff != 0 {
                                let rw = merge_scaled(&pivots[k].1, &row, pc, coeff, &md);
                                pivots[k].1 = rw;
                                pivots[k].2 = md(pivots[k].2 - coeff * prhs);
                            }
                        }
                        pivot_of[pc as usize] = Some(new_idx);
                        pivots.push((pc, row, prhs));
                        progressed = true;
                    }
                    None => next_queue.push((terms, rhs)),
                }
            }
            queue = next_queue;
            if queue.is_empty() || !progressed {
                break queue;
            }
        };

        let mut x = vec![0i64; self.cols];
        if !residual.is_empty() {
            // dense core on the residual support
            let mut support: Vec<u32> = residual
                .iter()
                .flat_map(|(t, _)| t.iter().map(|&(c, _)| c))
                .collect();
            support.sort_unstable();
            support.dedup();
            let col_of: std::collections::HashMap<u32, usize> = support
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i))
                .collect();
            let mut m = IntMatrix::zero(residual.len(), support.len());
            let mut b = vec![0i64; residual.len()];
            for (i, (terms, rhs)) in residual.iter().enumerate() {
                for &(c, v) in terms {
                    m[(i, col_of[&c])] = v;
                }
                b[i] = *rhs;
            }
            let smith = smith_normal_form(&m);
            let core = solve_cyclic_with(&smith, &b, n)?;
            for (i, &c) in support.iter().enumerate() {
                x[c as usize] = md(core[i]);
            }
        }
        // back-substitution: pivot rows only reference non-pivot columns
        for &(pc, ref row, rhs) in &pivots {
            let mut v = rhs;
            for &(c, coeff) in row {
                v = md(v - coeff * x[c as usize]);
            }
            x[pc as usize] = v;
        }
        Some(x)
    }

    /// Bitset elimination for modulus 2.
    fn eliminate_mod2(&self, q: usize, priority: &[u32]) -> Option<Vec<i64>> {
        let cols = self.cols;
        let words = cols / 64 + 1; // one extra bit for the rhs
        let rhs_bit = cols;
        let get = |row: &[u64], c: usize| (row[c / 64] >> (c % 64)) & 1 == 1;
        let flip = |row: &mut [u64], c: usize| row[c / 64] ^= 1 << (c % 64);
        let xor = |dst: &mut [u64], src: &[u64]| {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= s;
            }
        };
        // mask out the rhs bit when scanning column words
        let col_word = |row: &[u64], w: usize| -> u64 {
            let mut x = row[w];
            if w == cols / 64 {
                x &= (1u64 << (cols % 64)).wrapping_sub(1);
            }
            x
        };

        // pivot rows are stored as tails: own pivot bit cleared, and they
        // contain no other pivot columns (reduced against each other)
        let mut pivots: Vec<(u32, Vec<u64>)> = Vec::new();
        let mut pivot_of: Vec<Option<u32>> = vec![None; cols];
        let mut scratch = vec![0u64; words];

        for r in &self.rows {
            scratch.iter_mut().for_each(|w| *w = 0);
            for &(c, v) in &r.terms {
                if v.rem_euclid(2) == 1 {
                    flip(&mut scratch, c as usize);
                }
            }
            if r.rhs[q].rem_euclid(2) == 1 {
                flip(&mut scratch, rhs_bit);
            }
            // ascending scan eliminating pivot columns; xors only ever
            // introduce non-pivot columns, so one pass per word suffices
            for w in 0..words {
                let mut done: u64 = 0;
                loop {
                    let bits = col_word(&scratch, w) & !done;
                    if bits == 0 {
                        break;
                    }
                    let b = bits.trailing_zeros() as usize;
                    done |= 1u64 << b;
                    let c = w * 64 + b;
                    if let Some(pi) = pivot_of[c] {
                        scratch[w] ^= 1u64 << b;
                        xor(&mut scratch, &pivots[pi as usize].1);
                    }
                }
            }
            let empty = (0..words).all(|w| col_word(&scratch, w) == 0);
            if empty {
                if get(&scratch, rhs_bit) {
                    return None;
                }
                continue;
            }
            // pick the set column minimal in the seeded order
            let mut best: Option<u32> = None;
            for w in 0..words {
                let mut bits = col_word(&scratch, w);
                while bits != 0 {
                    let c = (w * 64 + bits.trailing_zeros() as usize) as u32;
                    bits &= bits - 1;
                    best = match best {
                        Some(b) if priority[b as usize] <= priority[c as usize] => Some(b),
                        _ => Some(c),
                    };
                }
            }
            let pc = best.expect("nonempty row");
            flip(&mut scratch, pc as usize); // store the tail only
            let row = scratch.clone();
            for k in 0..pivots.len() {
                if get(&pivots[k].1, pc as usize) {
                    flip(&mut pivots[k].1, pc as usize);
                    xor(&mut pivots[k].1, &row);
                }
            }
            pivot_of[pc as usize] = Some(pivots.len() as u32);
            pivots.push((pc, row));
        }

        let mut x = vec![0i64; cols];
        for &(pc, ref row) in &pivots {
            let mut v = if get(row, rhs_bit) { 1i64 } else { 0 };
            for w in 0..words {
                let mut bits = col_word(row, w);
                while bits != 0 {
                    let c = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    v ^= x[c];
                }
            }
            x[pc as usize] = v;
        }
        Some(x)
    }
}

fn merge_scaled(
    base: &[(u32, i64)],
    sub: &[(u32, i64)],
    drop_col: u32,
    coeff: i64,
    md: impl Fn(i64) -> i64,
) -> Vec<(u32, i64)> {
    // base - coeff * (e_drop + sub): removes drop_col, merges the rest
    let mut out = Vec::with_capacity(base.len() + sub.len());
    let (mut a, mut b) = (base.iter().peekable(), sub.iter().peekable());
    loop {
        match (a.peek(), b.peek()) {
            (Some(&&(ca, va)), Some(&&(cb, vb))) => {
                if ca < cb {
                    if ca != drop_col {
                        out.push((ca, va));
                    }
                    a.next();
                } else if cb < ca {
                    let v = md(-coeff * vb);
                    if v != 0 {
                        out.push((cb, v));
                    }
                    b.next();
                } else {
                    let v = md(va - coeff * vb);
                    if v != 0 && ca != drop_col {
                        out.push((ca, v));
                    }
                    a.next();
                    b.next();
                }
            }
            (Some(&&(ca, va)), None) => {
                if ca != drop_col {
                    out.push((ca, va));
                }
                a.next();
            }
            (None, Some(&&(cb, vb))) => {
                let v = md(-coeff * vb);
                if v != 0 {
                    out.push((cb, v));
                }
                b.next();
            }
            (None, None) => break,
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn prime_power_factors(n: i64) -> Vec<i64> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut pe = 1;
            while n % p == 0 {
                n /= p;
                pe *= p;
            }
            out.push(pe);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn crt_combine(x1: &[i64], m1: i64, x2: &[i64], m2: i64) -> Vec<i64> {
    let inv = mod_inverse(m1.rem_euclid(m2), m2).expect("coprime moduli");
    x1.iter()
        .zip(x2)
        .map(|(&a, &b)| {
            let t = ((b - a).rem_euclid(m2) * inv).rem_euclid(m2);
            a + m1 * t
        })
        .collect()
}

/// Deterministic column priority for a seed; seed 0 is the identity.
pub fn column_priority(cols: usize, seed: u64) -> Vec<u32> {
    let mut order: Vec<u32> = (0..cols as u32).collect();
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
    }
    let mut priority = vec![0u32; cols];
    for (rank, &c) in order.iter().enumerate() {
        priority[c as usize] = rank as u32;
    }
    priority
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;
    use rand::Rng;

    fn verify(sys: &SystemBuilder, x: &[i64], group: &AbelianGroup) {
        let dim = group.dim();
        for row in &sys.rows {
            for q in 0..dim {
                let n = group.modulus(q);
                let mut s: i64 = 0;
                for &(c, v) in &row.terms {
                    s += v * x[c as usize * dim + q];
                }
                let diff = s - row.rhs[q];
                if n == 0 {
                    assert_eq!(diff, 0);
                } else {
                    assert_eq!(diff.rem_euclid(n), 0);
                }
            }
        }
    }

    #[test]
    fn trivial_and_inconsistent() {
        let g = parse_group_spec("Z").unwrap();
        let mut sys = SystemBuilder::new(&g, 2);
        sys.push_row(vec![(0, 1), (1, -1)], &[3]);
        let x = sys.solve(0).unwrap();
        verify(&sys, &x, &g);

        let mut bad = SystemBuilder::new(&g, 1);
        bad.push_row(vec![(0, 1)], &[1]);
        bad.push_row(vec![(0, 1)], &[2]);
        assert!(bad.solve(0).is_none());
    }

    #[test]
    fn non_unit_pivot_falls_back_to_snf() {
        let g = parse_group_spec("Z").unwrap();
        let mut sys = SystemBuilder::new(&g, 2);
        sys.push_row(vec![(0, 2)], &[4]);
        sys.push_row(vec![(1, 3)], &[9]);
        let x = sys.solve(0).unwrap();
        assert_eq!(x, vec![2, 3]);

        let mut bad = SystemBuilder::new(&g, 1);
        bad.push_row(vec![(0, 2)], &[1]);
        assert!(bad.solve(0).is_none());
    }

    #[test]
    fn mod2_and_mod6_paths() {
        let g2 = parse_group_spec("Z/2").unwrap();
        let mut sys = SystemBuilder::new(&g2, 3);
        sys.push_row(vec![(0, 1), (1, 1)], &[1]);
        sys.push_row(vec![(1, 1), (2, 1)], &[0]);
        sys.push_row(vec![(0, 1), (2, 1)], &[1]);
        let x = sys.solve(0).unwrap();
        verify(&sys, &x, &g2);

        let g6 = parse_group_spec("Z/6").unwrap();
        let mut sys = SystemBuilder::new(&g6, 2);
        sys.push_row(vec![(0, 1), (1, 2)], &[5]);
        sys.push_row(vec![(0, 3)], &[3]);
        let x = sys.solve(0).unwrap();
        verify(&sys, &x, &g6);
    }

    #[test]
    fn random_consistent_systems_solve_under_any_seed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for group_spec in ["Z", "Z/2", "Z/6", "Z+Z/4"] {
            let g = parse_group_spec(group_spec).unwrap();
            for trial in 0..20 {
                let cols = rng.random_range(1..10usize);
                let rows = rng.random_range(1..15usize);
                // plant a solution and generate consistent rows
                let planted: Vec<i64> = (0..cols * g.dim())
                    .map(|_| rng.random_range(-4..5))
                    .collect();
                let mut sys = SystemBuilder::new(&g, cols);
                for _ in 0..rows {
                    let nnz = rng.random_range(1..=cols.min(4));
                    let mut terms = Vec::new();
                    for _ in 0..nnz {
                        terms.push((
                            rng.random_range(0..cols) as u32,
                            rng.random_range(-3i64..4),
                        ));
                    }
                    let mut rhs = vec![0i64; g.dim()];
                    let mut merged = terms.clone();
                    merged.sort_unstable_by_key(|&(c, _)| c);
                    for q in 0..g.dim() {
                        let mut s = 0i64;
                        for &(c, v) in &merged {
                            s += v * planted[c as usize * g.dim() + q];
                        }
                        rhs[q] = g.reduce_coord(q, s);
                    }
                    sys.push_row(terms, &rhs);
                }
                for seed in [0u64, 1, trial as u64 + 100] {
                    let x = sys
                        .solve(seed)
                        .unwrap_or_else(|| panic!("consistent system unsolved ({group_spec})"));
                    verify(&sys, &x, &g);
                }
            }
        }
    }
}
