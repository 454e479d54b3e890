//! Dense integer matrices, Smith normal form and exact linear solving
//! over finitely generated abelian groups.
//!
//! The Smith routine uses a fixed pivot rule (smallest-magnitude nonzero
//! entry, ties broken by lowest row-major index) so that all downstream
//! computations are deterministic for a given input.

use crate::error::{LofuError, Result};
use crate::group::{AbelianGroup, GroupElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("integer overflow in matrix arithmetic")
}

fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("integer overflow in matrix arithmetic")
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = ck_add(out[(i, j)], ck_mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = 0i64;
                for j in 0..self.cols {
                    s = ck_add(s, ck_mul(self[(i, j)], v[j]));
                }
                s
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[i] += q * row[t]
    fn add_row(&mut self, i: usize, t: usize, q: i64) {
        for j in 0..self.cols {
            let v = ck_add(self[(i, j)], ck_mul(q, self[(t, j)]));
            self[(i, j)] = v;
        }
    }

    /// col[j] += q * col[t]
    fn add_col(&mut self, j: usize, t: usize, q: i64) {
        for i in 0..self.rows {
            let v = ck_add(self[(i, j)], ck_mul(q, self[(i, t)]));
            self[(i, j)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of `smith_normal_form`: `u * m * v = d` with `u`, `v`
/// unimodular and `d` diagonal with a divisibility chain.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    /// Diagonal entries, including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<i64> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&x| x != 0).count()
    }
}

/// Smallest-magnitude nonzero entry of the trailing submatrix starting at
/// `t`, ties broken by the lowest row-major position.
fn select_pivot(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for i in t..m.rows {
        for j in t..m.cols {
            let v = m[(i, j)].abs();
            if v == 0 {
                continue;
            }
            match best {
                Some((bv, _, _)) if bv <= v => {}
                _ => best = Some((v, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut u_inv = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let mut v_inv = IntMatrix::identity(m.cols);

    // elementary operations, mirrored on the transformation matrices
    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }
    macro_rules! row_add {
        ($i:expr, $t:expr, $q:expr) => {{
            d.add_row($i, $t, $q);
            u.add_row($i, $t, $q);
            u_inv.add_col($t, $i, -$q);
        }};
    }
    macro_rules! col_add {
        ($j:expr, $t:expr, $q:expr) => {{
            d.add_col($j, $t, $q);
            v.add_col($j, $t, $q);
            v_inv.add_row($t, $j, -$q);
        }};
    }

    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        let Some((pi, pj)) = select_pivot(&d, t) else {
            break;
        };
        row_swap!(t, pi);
        col_swap!(t, pj);
        if d[(t, t)] < 0 {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }

        'reduce: loop {
            let p = d[(t, t)];
            debug_assert!(p > 0);
            // clear the pivot column
            for i in t + 1..d.rows {
                let a = d[(i, t)];
                if a != 0 {
                    let q = a.div_euclid(p);
                    if q != 0 {
                        row_add!(i, t, -q);
                    }
                    if d[(i, t)] != 0 {
                        // remainder is a strictly smaller pivot
                        row_swap!(t, i);
                        continue 'reduce;
                    }
                }
            }
            // clear the pivot row
            for j in t + 1..d.cols {
                let a = d[(t, j)];
                if a != 0 {
                    let q = a.div_euclid(p);
                    if q != 0 {
                        col_add!(j, t, -q);
                    }
                    if d[(t, j)] != 0 {
                        col_swap!(t, j);
                        continue 'reduce;
                    }
                }
            }
            // enforce divisibility of the remaining block
            for i in t + 1..d.rows {
                for j in t + 1..d.cols {
                    if d[(i, j)] % p != 0 {
                        row_add!(t, i, 1);
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        t += 1;
    }
    Smith { u, u_inv, d, v, v_inv }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `n > 0`; `a` must be coprime to `n`.
pub fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let (g, x, _) = ext_gcd(a.rem_euclid(n), n);
    if g != 1 {
        None
    } else {
        Some(x.rem_euclid(n))
    }
}

/// Solves the congruence `d * y = c (mod n)`, where `n = 0` means over Z.
/// Returns the canonical representative or `None` when unsolvable.
fn solve_congruence(d: i64, c: i64, n: i64) -> Option<i64> {
    if n == 0 {
        if d == 0 {
            return if c == 0 { Some(0) } else { None };
        }
        if c % d == 0 {
            Some(c / d)
        } else {
            None
        }
    } else {
        let d = d.rem_euclid(n);
        let c = c.rem_euclid(n);
        if d == 0 {
            return if c == 0 { Some(0) } else { None };
        }
        let g = {
            let (g, _, _) = ext_gcd(d, n);
            g
        };
        if c % g != 0 {
            return None;
        }
        let inv = mod_inverse(d / g, n / g)?;
        Some(((c / g) % (n / g)).checked_mul(inv)?.rem_euclid(n / g))
    }
}

/// Solves `m * x = b` in a single cyclic coordinate with modulus `n`
/// (`n = 0` for Z), using a precomputed Smith decomposition of `m`.
pub fn solve_cyclic_with(smith: &Smith, b: &[i64], n: i64) -> Option<Vec<i64>> {
    let rows = smith.u.rows;
    let cols = smith.v.rows;
    assert_eq!(b.len(), rows);
    let c = smith.u.mul_vec(b);
    let diag = smith.diagonal();
    let mut y = vec![0i64; cols];
    for i in 0..rows {
        let di = if i < diag.len() { diag[i] } else { 0 };
        let yi = solve_congruence(di, c[i], n)?;
        if i < cols {
            y[i] = yi;
        } else if yi != 0 {
            return None;
        } else if solve_congruence(0, c[i], n).is_none() {
            return None;
        }
    }
    let mut x = smith.v.mul_vec(&y);
    if n != 0 {
        for v in &mut x {
            *v = v.rem_euclid(n);
        }
    }
    Some(x)
}

/// Solves `m * x = b` where `b` is a vector of group elements and the
/// integer matrix acts coordinate-wise through the module structure of
/// the coefficient group.  Deterministic representative; `None` when no
/// solution exists.
pub fn solve_linear(
    m: &IntMatrix,
    b: &[GroupElement],
    group: &AbelianGroup,
) -> Result<Option<Vec<GroupElement>>> {
    if b.len() != m.rows {
        return Err(LofuError::invalid(format!(
            "solve_linear: {} rows but {} right-hand entries",
            m.rows,
            b.len()
        )));
    }
    let smith = smith_normal_form(m);
    let mut sol_coords = vec![vec![0i64; group.dim()]; m.cols];
    for q in 0..group.dim() {
        let n = group.modulus(q);
        let bq: Vec<i64> = b.iter().map(|e| e.coords()[q]).collect();
        match solve_cyclic_with(&smith, &bq, n) {
            None => return Ok(None),
            Some(x) => {
                for (j, v) in x.into_iter().enumerate() {
                    sol_coords[j][q] = v;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(m.cols);
    for coords in sol_coords {
        out.push(group.element(coords)?);
    }
    Ok(Some(out))
}
