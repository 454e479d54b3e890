//! Čech cohomology of a nerve over a coefficient group, and coboundary
//! witnesses for class-equality checks.
//!
//! For each cyclic factor of the coefficient group the kernel of the
//! degree-k differential is computed as an integer lattice via Smith
//! normal form, the image of the previous differential (plus the modulus
//! relations) is expressed in that lattice, and the quotient presentation
//! is read off a second Smith form.  Representative cocycles are pulled
//! back from the cokernel generators.

use std::sync::Arc;

use crate::cochain::{write_face, Cochain};
use crate::cover::Nerve;
use crate::error::{LofuError, Result};
use crate::group::{invariant_factors, AbelianGroup};
use crate::matrix::{smith_normal_form, IntMatrix, Smith};
use crate::solve::SystemBuilder;

/// The matrix of `δ_k : C^k → C^(k+1)` in the tuple bases.
pub fn delta_matrix(nerve: &Nerve, k: usize) -> Result<IntMatrix> {
    let cols = nerve.count(k + 1);
    let rows = nerve.count(k + 2);
    let mut m = IntMatrix::zero(rows, cols);
    let mut face = vec![0u32; k + 1];
    let mut r = 0usize;
    nerve.for_each_tuple(k + 2, |w| {
        for j in 0..k + 2 {
            write_face(w, j, &mut face);
            let c = nerve.require_tuple_id(&face)? as usize;
            m[(r, c)] += if j % 2 == 0 { 1 } else { -1 };
        }
        r += 1;
        Ok(())
    })?;
    Ok(m)
}

/// Cohomology presentation plus representative cocycles, one per listed
/// generator order (0 meaning infinite order).
pub struct Cohomology {
    pub group: AbelianGroup,
    pub generators: Vec<Cochain>,
    pub orders: Vec<i64>,
}

pub fn cohomology(nerve: &Arc<Nerve>, coeff: &AbelianGroup, k: usize) -> Result<Cohomology> {
    if nerve.depth() < k + 2 {
        return Err(LofuError::invalid(format!(
            "cohomology at degree {k} needs nerve depth {} on {}",
            k + 2,
            nerve.name()
        )));
    }
    let m_k = delta_matrix(nerve, k)?;
    let m_prev = if k == 0 {
        IntMatrix::zero(nerve.count(1), 0)
    } else {
        delta_matrix(nerve, k - 1)?
    };
    let n_k = nerve.count(k + 1);

    let mut orders: Vec<i64> = Vec::new();
    let mut generators: Vec<Cochain> = Vec::new();
    for q in 0..coeff.dim() {
        let n = coeff.modulus(q);
        let (gen_vecs, gen_orders) = cyclic_cohomology(&m_k, &m_prev, n_k, n);
        for (vec, ord) in gen_vecs.into_iter().zip(gen_orders) {
            let mut c = Cochain::zero(nerve, coeff, k)?;
            let mut coords = vec![0i64; coeff.dim()];
            for (i, &v) in vec.iter().enumerate() {
                coords[q] = v;
                if v != 0 {
                    c.set_value(i as u32, &coords);
                }
                coords[q] = 0;
            }
            generators.push(c);
            orders.push(ord);
        }
    }
    let rank = orders.iter().filter(|&&o| o == 0).count();
    let torsion: Vec<i64> = orders.iter().copied().filter(|&o| o >= 2).collect();
    let group = AbelianGroup::new(rank, &invariant_factors(&torsion))?;
    Ok(Cohomology {
        group,
        generators,
        orders,
    })
}

/// Kernel/image quotient for one cyclic coefficient `Z` (n = 0) or
/// `Z/n`: returns generator coordinate vectors and their orders.
fn cyclic_cohomology(
    m_k: &IntMatrix,
    m_prev: &IntMatrix,
    n_k: usize,
    n: i64,
) -> (Vec<Vec<i64>>, Vec<i64>) {
    let smith_k = smith_normal_form(m_k);
    let diag = smith_k.diagonal();
    // kernel lattice basis as columns of B
    let mut scales: Vec<i64> = Vec::new();
    let mut kernel_cols: Vec<usize> = Vec::new();
    for j in 0..n_k {
        let d = if j < diag.len() { diag[j] } else { 0 };
        if n == 0 {
            if d == 0 {
                kernel_cols.push(j);
                scales.push(1);
            }
        } else {
            let g = if d == 0 { n } else { gcd(d, n) };
            kernel_cols.push(j);
            scales.push(n / g);
        }
    }
    let t = kernel_cols.len();
    if t == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut b = IntMatrix::zero(n_k, t);
    for (col, (&j, &s)) in kernel_cols.iter().zip(&scales).enumerate() {
        for i in 0..n_k {
            b[(i, col)] = smith_k.v[(i, j)] * s;
        }
    }
    // relations: image of the previous differential, plus n * identity
    let extra = if n == 0 { 0 } else { n_k };
    let rel_cols = m_prev.cols + extra;
    let smith_b = smith_normal_form(&b);
    let mut x = IntMatrix::zero(t, rel_cols);
    for c in 0..rel_cols {
        let target: Vec<i64> = (0..n_k)
            .map(|i| {
                if c < m_prev.cols {
                    m_prev[(i, c)]
                } else {
                    if i == c - m_prev.cols {
                        n
                    } else {
                        0
                    }
                }
            })
            .collect();
        let sol = solve_in_lattice(&smith_b, &target)
            .expect("relation must lie in the kernel lattice");
        for (r, v) in sol.into_iter().enumerate() {
            x[(r, c)] = v;
        }
    }
    // cokernel of x: invariant factors and generators via u_inv columns
    let sx = smith_normal_form(&x);
    let dx = sx.diagonal();
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for i in 0..t {
        let d = if i < dx.len() { dx[i] } else { 0 };
        let order = if d == 0 { if n == 0 { 0 } else { n } } else { d };
        if order == 1 {
            continue;
        }
        // generator: B * (column i of U^-1), reduced mod n
        let mut vec = vec![0i64; n_k];
        for r in 0..n_k {
            let mut s: i64 = 0;
            for j in 0..t {
                s += b[(r, j)] * sx.u_inv[(j, i)];
            }
            vec[r] = if n == 0 { s } else { s.rem_euclid(n) };
        }
        gens.push(vec);
        orders.push(order);
    }
    (gens, orders)
}

fn solve_in_lattice(smith_b: &Smith, target: &[i64]) -> Option<Vec<i64>> {
    crate::matrix::solve_cyclic_with(smith_b, target, 0)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Returns `β` with `δβ = f` when the class of the cocycle `f` is
/// trivial, and `None` otherwise.  For a degree-0 cochain the class is
/// trivial only when `f` itself vanishes; the returned witness is then a
/// zero cochain of degree 0 standing in for the empty degree.
pub fn coboundary_witness(f: &Cochain, seed: u64) -> Result<Option<Cochain>> {
    if f.delta_matches(None)?.violation.is_some() {
        return Err(LofuError::invalid(
            "coboundary_witness: input is not a cocycle",
        ));
    }
    let k = f.degree;
    if k == 0 {
        return Ok(if f.is_zero() {
            Some(Cochain::zero(&f.nerve, &f.group, 0)?)
        } else {
            None
        });
    }
    let cols = f.nerve.count(k);
    let mut sys = SystemBuilder::new(&f.group, cols);
    let mut face = vec![0u32; k];
    let mut row = Vec::with_capacity(k + 1);
    for i in 0..f.nerve.count(k + 1) as u32 {
        let w = f.nerve.tuple(k + 1, i);
        row.clear();
        for j in 0..k + 1 {
            write_face(w, j, &mut face);
            let c = f.nerve.require_tuple_id(&face)?;
            row.push((c, if j % 2 == 0 { 1i64 } else { -1 }));
        }
        sys.push_row(row.clone(), f.value(i));
    }
    match sys.solve(seed) {
        None => Ok(None),
        Some(flat) => {
            let mut beta = Cochain::zero(&f.nerve, &f.group, k - 1)?;
            let dim = f.group.dim();
            for i in 0..cols as u32 {
                beta.set_value(i, &flat[i as usize * dim..(i as usize + 1) * dim]);
            }
            debug_assert!(beta.delta().unwrap().values_eq(f));
            Ok(Some(beta))
        }
    }
}

/// Class equality `[f] = [g]` via a coboundary witness on `f − g`.
pub fn class_equal(f: &Cochain, g: &Cochain, seed: u64) -> Result<Option<Cochain>> {
    let diff = Cochain::combine(&[(f, 1), (g, -1)])?;
    coboundary_witness(&diff, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseSpaces;
    use crate::complex::fixture;
    use crate::cover::DEFAULT_TUPLE_CAP;
    use crate::group::parse_group_spec;
    use rand::SeedableRng;

    fn star_nerve(name: &str, depth: usize) -> Arc<Nerve> {
        let c = fixture(name).unwrap();
        BaseSpaces::build(&c, &[depth], DEFAULT_TUPLE_CAP)
            .unwrap()
            .nerve(1)
            .clone()
    }

    #[test]
    fn point_h0_is_z() {
        let nerve = star_nerve("point", 2);
        let g = parse_group_spec("Z").unwrap();
        let h = cohomology(&nerve, &g, 0).unwrap();
        assert_eq!(h.group.to_string(), "Z");
    }

    #[test]
    fn circle_h1_is_z() {
        let nerve = star_nerve("circle", 3);
        let g = parse_group_spec("Z").unwrap();
        let h = cohomology(&nerve, &g, 1).unwrap();
        assert_eq!(h.group.to_string(), "Z");
        // the representative is a genuine cocycle and not a coboundary
        let gen = &h.generators[0];
        assert!(gen.delta_matches(None).unwrap().violation.is_none());
        assert!(coboundary_witness(gen, 0).unwrap().is_none());
    }

    #[test]
    fn sphere_h2_mod2() {
        let nerve = star_nerve("sphere2", 4);
        let g = parse_group_spec("Z/2").unwrap();
        let h = cohomology(&nerve, &g, 2).unwrap();
        assert_eq!(h.group.to_string(), "Z/2");
        assert_eq!(cohomology(&nerve, &g, 1).unwrap().group.to_string(), "0");
    }

    #[test]
    fn witness_for_constructed_coboundaries() {
        let nerve = star_nerve("circle", 3);
        let g = parse_group_spec("Z/6").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let gamma = Cochain::random(&nerve, &g, 0, &mut rng).unwrap();
            let f = gamma.delta().unwrap();
            let beta = coboundary_witness(&f, 0).unwrap().expect("trivial class");
            assert!(beta.delta().unwrap().values_eq(&f));
        }
        let zero = Cochain::zero(&nerve, &g, 1).unwrap();
        assert!(coboundary_witness(&zero, 0).unwrap().is_some());
    }

    #[test]
    fn witness_rejects_non_cocycles() {
        let nerve = star_nerve("circle", 3);
        let g = parse_group_spec("Z").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        let f = Cochain::random(&nerve, &g, 1, &mut rng).unwrap();
        if f.delta_matches(None).unwrap().violation.is_some() {
            assert!(coboundary_witness(&f, 0).is_err());
        }
    }
}
