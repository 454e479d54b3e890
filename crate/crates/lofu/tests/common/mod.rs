//! Test-support oracles, independent of the library's linear algebra.
//!
//! The simplicial oracle computes cohomology of a complex from ordered
//! simplicial cochains with its own textbook Smith reduction, and Z/d
//! answers are assembled through universal coefficients; none of the
//! nerve or solver machinery is reused.

use lofu::complex::SimplicialComplex;

/// A cohomology answer as (free rank, multiset of prime-power torsion
/// orders), which is a complete isomorphism invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupShape {
    pub rank: usize,
    pub prime_powers: Vec<i64>,
}

impl GroupShape {
    pub fn new(rank: usize, orders: &[i64]) -> GroupShape {
        let mut pp = Vec::new();
        for &d in orders {
            let mut d = d;
            let mut p = 2;
            while p * p <= d {
                if d % p == 0 {
                    let mut q = 1;
                    while d % p == 0 {
                        d /= p;
                        q *= p;
                    }
                    pp.push(q);
                }
                p += 1;
            }
            if d > 1 {
                pp.push(d);
            }
        }
        pp.sort_unstable();
        GroupShape {
            rank,
            prime_powers: pp,
        }
    }

    pub fn of_group(g: &lofu::group::AbelianGroup) -> GroupShape {
        GroupShape::new(g.rank(), g.torsion())
    }
}

/// Plain dense Smith reduction: returns the diagonal entries (no
/// transforms), with naive first-nonzero pivoting.
fn smith_diagonal(mut m: Vec<Vec<i64>>) -> Vec<i64> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let n = rows.min(cols);
    let mut diag = Vec::with_capacity(n);
    let mut t = 0;
    while t < n {
        // find any nonzero entry
        let mut pivot = None;
        'find: for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 {
                    pivot = Some((i, j));
                    break 'find;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            // reduce column
            let mut again = false;
            for i in t + 1..rows {
                while m[i][t] != 0 {
                    let q = m[i][t] / m[t][t];
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                    if m[i][t] != 0 {
                        m.swap(t, i);
                        again = true;
                    }
                }
            }
            for j in t + 1..cols {
                while m[t][j] != 0 {
                    let q = m[t][j] / m[t][t];
                    for row in m.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    if m[t][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        again = true;
                    }
                }
            }
            if !again {
                break;
            }
        }
        // divisibility fix-up
        let p = m[t][t].abs();
        let mut fixed = true;
        'div: for i in t + 1..rows {
            for j in t + 1..cols {
                if m[i][j] % p != 0 {
                    for jj in t..cols {
                        let add = m[i][jj];
                        m[t][jj] += add;
                    }
                    fixed = false;
                    break 'div;
                }
            }
        }
        if fixed {
            diag.push(p);
            t += 1;
        }
    }
    diag
}

/// Integral simplicial cohomology H^k(K; Z) as a group shape.
pub fn integral_cohomology(complex: &SimplicialComplex, k: usize) -> GroupShape {
    let by_dim = |d: usize| -> Vec<Vec<u8>> {
        complex
            .all_simplices()
            .into_iter()
            .filter(|s| s.len() == d + 1)
            .collect()
    };
    // coboundary matrix C^k -> C^{k+1}: transpose of the boundary
    let cob = |d: usize| -> Vec<Vec<i64>> {
        let lo = by_dim(d);
        let hi = by_dim(d + 1);
        let index: std::collections::HashMap<Vec<u8>, usize> = lo
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut m = vec![vec![0i64; lo.len()]; hi.len()];
        for (r, tau) in hi.iter().enumerate() {
            for (omit, _) in tau.iter().enumerate() {
                let mut face = tau.clone();
                face.remove(omit);
                let c = index[&face];
                m[r][c] += if omit % 2 == 0 { 1 } else { -1 };
            }
        }
        m
    };
    let n_k = by_dim(k).len();
    if n_k == 0 {
        return GroupShape::new(0, &[]);
    }
    let d_k = cob(k);
    let rank_k = smith_diagonal(d_k.clone())
        .iter()
        .filter(|&&x| x != 0)
        .count();
    let (rank_prev, torsion): (usize, Vec<i64>) = if k == 0 {
        (0, Vec::new())
    } else {
        // express the image of the previous coboundary inside the
        // kernel lattice of d_k and read off the quotient
        let d_prev = cob(k - 1);
        let diag_prev = smith_diagonal(d_prev.clone());
        let rank_prev = diag_prev.iter().filter(|&&x| x != 0).count();
        // torsion of H^k = nontrivial invariant factors of d_{k-1}
        // after saturation: for simplicial cochain complexes these are
        // exactly the invariant factors of d_{k-1} greater than 1
        let torsion: Vec<i64> = diag_prev.into_iter().filter(|&x| x > 1).collect();
        (rank_prev, torsion)
    };
    let free_rank = n_k - rank_k - rank_prev;
    GroupShape::new(free_rank, &torsion)
}

/// H^k(K; Z/d) through universal coefficients:
/// `H^k ⊗ Z/d ⊕ Tor(H^{k+1}, Z/d)`.
pub fn modular_cohomology(complex: &SimplicialComplex, k: usize, d: i64) -> GroupShape {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let hk = integral_cohomology(complex, k);
    let hk1 = integral_cohomology(complex, k + 1);
    let mut orders: Vec<i64> = Vec::new();
    // H^k ⊗ Z/d
    for _ in 0..hk.rank {
        orders.push(d);
    }
    for &q in &hk.prime_powers {
        let g = gcd(q, d);
        if g > 1 {
            orders.push(g);
        }
    }
    // Tor(H^{k+1}, Z/d)
    for &q in &hk1.prime_powers {
        let g = gcd(q, d);
        if g > 1 {
            orders.push(g);
        }
    }
    GroupShape::new(0, &orders)
}

/// Signed generator-edge crossing count of a vertex path against a
/// degree-1 cochain on the base nerve, evaluated step by step.
pub fn crossing_count(alpha: &lofu::cochain::Cochain, path: &[u8]) -> Vec<i64> {
    let dim = alpha.group.dim();
    let mut acc = vec![0i64; dim];
    for s in path.windows(2) {
        if let Ok(v) = alpha.value_at(&[s[0] as u32, s[1] as u32]) {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
    }
    for (q, v) in acc.iter_mut().enumerate() {
        *v = alpha.group.reduce_coord(q, *v);
    }
    acc
}

/// Discrete winding of a loop index (pair of paths with shared
/// endpoints) against a degree-1 cochain: crossings of the first leg
/// minus crossings of the second.
pub fn winding(alpha: &lofu::cochain::Cochain, first: &[u8], second: &[u8]) -> Vec<i64> {
    let a = crossing_count(alpha, first);
    let b = crossing_count(alpha, second);
    a.iter()
        .zip(&b)
        .enumerate()
        .map(|(q, (x, y))| alpha.group.reduce_coord(q, x - y))
        .collect()
}
