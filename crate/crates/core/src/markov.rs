//! Markov partitions from finite breakpoint orbits, transition graphs, and
//! Perron eigenvalues with exact rational certification.

use crate::error::{CoreError, Result};
use crate::maps::PiecewiseAffineMap;
use crate::rat::{q_from_f64, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// Transition graph of a Markov partition: vertices are partition intervals,
/// v -> w when the image of v covers w. Constant (plateau) intervals collapse
/// to points and cover nothing.
#[derive(Debug, Clone)]
pub struct TransitionGraph {
    pub points: Vec<Q>,
    pub vertices: Vec<(Q, Q)>,
    pub matrix: Vec<Vec<u64>>,
}

impl TransitionGraph {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// `markov_graph`: detect whether all breakpoint orbits are finite within
/// `budget` points; if so return the partition by the orbit points and the
/// covering graph. `Err(NotMarkovWithinBudget)` is a statement about the
/// budget, not a claim of non-Markovness.
pub fn markov_graph(map: &PiecewiseAffineMap, budget: usize) -> Result<TransitionGraph> {
    let mut points: BTreeSet<Q> = BTreeSet::new();
    let (lo, hi) = map.domain();
    points.insert(lo);
    points.insert(hi);
    for x in map.breakpoints() {
        points.insert(x.clone());
    }
    let mut frontier: Vec<Q> = points.iter().cloned().collect();
    while !frontier.is_empty() {
        if points.len() > budget {
            return Err(CoreError::NotMarkovWithinBudget(points.len()));
        }
        let mut next = Vec::new();
        for x in frontier {
            let y = map.eval(&x)?;
            if points.insert(y.clone()) {
                next.push(y);
            }
        }
        frontier = next;
    }
    let pts: Vec<Q> = points.into_iter().collect();
    let n = pts.len() - 1;
    let mut vertices = Vec::with_capacity(n);
    let mut matrix = vec![vec![0u64; n]; n];
    for i in 0..n {
        vertices.push((pts[i].clone(), pts[i + 1].clone()));
    }
    for (i, (a, b)) in vertices.iter().enumerate() {
        let va = map.eval(a).unwrap();
        let vb = map.eval(b).unwrap();
        if va == vb {
            continue; // constant interval: image is a point
        }
        let (ilo, ihi) = if va < vb { (va, vb) } else { (vb, va) };
        for (j, (c, d)) in vertices.iter().enumerate() {
            if *c >= ilo && *d <= ihi {
                matrix[i][j] = 1;
            }
        }
    }
    Ok(TransitionGraph {
        points: pts,
        vertices,
        matrix,
    })
}

/// `leading_eigenvalue`: spectral radius of a nonnegative integer matrix by
/// power iteration on A + I (the shift makes the iteration converge for
/// periodic classes), tolerance ~1e-12. Zero matrix gives 0.
pub fn leading_eigenvalue(matrix: &[Vec<u64>]) -> f64 {
    let n = matrix.len();
    if n == 0 {
        return 0.0;
    }
    leading_eigenvalue_sparse(&dense_to_sparse(matrix), n)
}

pub(crate) fn dense_to_sparse(matrix: &[Vec<u64>]) -> Vec<Vec<(usize, u64)>> {
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v > 0)
                .map(|(j, v)| (j, *v))
                .collect()
        })
        .collect()
}

pub(crate) fn leading_eigenvalue_sparse(adj: &[Vec<(usize, u64)>], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut v = vec![1.0f64; n];
    let mut rho_shifted = 1.0f64;
    for iter in 0..20_000 {
        let mut w = v.clone(); // the +I part
        for (i, row) in adj.iter().enumerate() {
            for (j, m) in row {
                w[*j] += v[i] * (*m as f64);
            }
        }
        // transpose-free: we iterate x -> x(A+I) via rows; growth rate equal
        let norm = w.iter().fold(0.0f64, |a, b| a.max(*b));
        if norm == 0.0 {
            return 0.0;
        }
        for x in &mut w {
            *x /= norm;
        }
        let diff: f64 = w
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = w;
        if diff < 1e-15 && iter > 8 {
            rho_shifted = norm;
            break;
        }
        rho_shifted = norm;
    }
    (rho_shifted - 1.0).max(0.0)
}

/// Iteratively remove vertices with no outgoing edges; the spectral radius
/// is unchanged (each removal deletes a zero row, contributing a factor x to
/// the characteristic polynomial). Returns the pruned sparse graph.
fn prune_dead_ends(adj: &[Vec<(usize, u64)>], n: usize) -> (Vec<Vec<(usize, u64)>>, usize) {
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if alive[i] && adj[i].iter().all(|(j, _)| !alive[*j]) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut remap = vec![usize::MAX; n];
    let mut m = 0usize;
    for i in 0..n {
        if alive[i] {
            remap[i] = m;
            m += 1;
        }
    }
    let mut out = vec![Vec::new(); m];
    for i in 0..n {
        if alive[i] {
            out[remap[i]] = adj[i]
                .iter()
                .filter(|(j, _)| alive[*j])
                .map(|(j, c)| (remap[*j], *c))
                .collect();
        }
    }
    (out, m)
}

/// Certified rational bounds on the spectral radius of a nonnegative integer
/// matrix, via Collatz-Wielandt quotients with an exact rational test
/// vector: if Av >= c v then rho >= c; if Av <= C v with v > 0 then
/// rho <= C. Dead-end vertices are pruned first (they do not change rho but
/// would wreck the lower quotient).
pub fn spectral_radius_bounds(adj: &[Vec<(usize, u64)>], n: usize) -> (Q, Q) {
    let (adj, n) = prune_dead_ends(adj, n);
    let adj = &adj;
    if n == 0 {
        return (Q::zero(), Q::zero());
    }
    // Build a positive rational test vector from the float eigenvector of
    // A + I.
    let mut v = vec![1.0f64; n];
    for _ in 0..400 {
        let mut w = v.clone();
        for (i, row) in adj.iter().enumerate() {
            for (j, m) in row {
                w[*j] += v[i] * (*m as f64);
            }
        }
        let norm = w.iter().fold(0.0f64, |a, b| a.max(*b));
        if norm == 0.0 {
            return (Q::zero(), Q::zero());
        }
        for x in &mut w {
            *x /= norm;
        }
        v = w;
    }
    // Lower bound: v restricted to its significant support (vA >= c v only
    // needs checking on the support). Upper bound: v padded strictly
    // positive (vA <= C v needs v > 0).
    let vmax = v.iter().fold(0.0f64, |a, b| a.max(*b));
    let cutoff = vmax * 1e-9;
    let quotient = |vq: &[Q], support_only: bool| -> (Option<Q>, Option<Q>) {
        let mut av = vec![Q::zero(); n];
        for (i, row) in adj.iter().enumerate() {
            if vq[i].is_zero() {
                continue;
            }
            for (j, m) in row {
                av[*j] += &vq[i] * Q::from_integer(BigInt::from(*m));
            }
        }
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for j in 0..n {
            if support_only && vq[j].is_zero() {
                continue;
            }
            let ratio = &av[j] / &vq[j];
            if lo.as_ref().map_or(true, |l| ratio < *l) {
                lo = Some(ratio.clone());
            }
            if hi.as_ref().map_or(true, |h| ratio > *h) {
                hi = Some(ratio);
            }
        }
        (lo, hi)
    };
    let v_supp: Vec<Q> = v
        .iter()
        .map(|x| {
            if *x >= cutoff {
                q_from_f64(*x).unwrap_or_else(Q::zero)
            } else {
                Q::zero()
            }
        })
        .collect();
    let eps = q_from_f64((vmax * 1e-14).max(1e-300)).unwrap();
    let v_pos: Vec<Q> = v
        .iter()
        .map(|x| q_from_f64(x.max(0.0)).unwrap_or_else(Q::zero) + &eps)
        .collect();
    let (lo, _) = quotient(&v_supp, true);
    let (_, hi) = quotient(&v_pos, false);
    let lo = lo.unwrap_or_else(Q::zero);
    let hi = hi.unwrap_or_else(Q::zero);
    (if lo.is_negative() { Q::zero() } else { lo }, hi)
}

/// Exact rational determinant (fraction elimination with pivoting).
pub fn det_q(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for col in 0..n {
        let mut pivot = None;
        for row in col..n {
            if !m[row][col].is_zero() {
                pivot = Some(row);
                break;
            }
        }
        let Some(p) = pivot else {
            return Q::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pv;
            for k in col..n {
                let sub = &factor * &m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

/// Exact characteristic polynomial det(xI - A) of an integer matrix, by the
/// Faddeev-LeVerrier recursion over rationals. Returned coefficients are
/// ascending in x and integral.
pub fn char_poly(matrix: &[Vec<u64>]) -> Vec<BigInt> {
    let n = matrix.len();
    let a: Vec<Vec<Q>> = matrix
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| Q::from_integer(BigInt::from(*v)))
                .collect()
        })
        .collect();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m = vec![vec![Q::zero(); n]; n]; // M_0 = 0
    let mut c = Q::one();
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut am = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() && !m[l][j].is_zero() {
                        s += &a[i][l] * &m[l][j];
                    }
                }
                am[i][j] = s;
            }
        }
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &c;
        }
        m = am;
        // c_{n-k} = -tr(A M_k)/k
        let mut tr = Q::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() {
                    tr += &a[i][l] * &m[l][i];
                }
            }
        }
        c = -tr / Q::from_integer(BigInt::from(k as i64));
        coeffs[n - k] = c.clone();
    }
    coeffs
        .into_iter()
        .map(|q| {
            debug_assert!(q.is_integer());
            q.to_integer()
        })
        .collect()
}

/// Exact check that `x > rho(A)` for a nonnegative integer matrix: xI - A is
/// then a nonsingular M-matrix, equivalently all leading principal minors of
/// xI - A are positive.
pub fn exceeds_spectral_radius(matrix: &[Vec<u64>], x: &Q) -> bool {
    let n = matrix.len();
    for k in 1..=n {
        let mut sub = vec![vec![Q::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let a = Q::from_integer(BigInt::from(matrix[i][j]));
                sub[i][j] = if i == j { x - a } else { -a };
            }
        }
        if !det_q(sub).is_positive() {
            return false;
        }
    }
    true
}

/// Exact certificate that `rho(A) >= c`: exhibits Av >= c v for the rational
/// rounding of the float eigenvector.
pub fn spectral_radius_at_least(matrix: &[Vec<u64>], c: &Q) -> bool {
    let adj = dense_to_sparse(matrix);
    let (lo, _) = spectral_radius_bounds(&adj, matrix.len());
    lo >= *c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_geometry, Shape, StuntedParams};
    use crate::rat::{q_to_f64, qi, qr};

    fn tent() -> PiecewiseAffineMap {
        PiecewiseAffineMap::new(vec![qi(0), qr(1, 2), qi(1)], vec![qi(0), qi(1), qi(0)]).unwrap()
    }

    #[test]
    fn full_tent_graph() {
        let g = markov_graph(&tent(), 100).unwrap();
        assert_eq!(g.matrix, vec![vec![1, 1], vec![1, 1]]);
        assert!((leading_eigenvalue(&g.matrix) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn plateau_on_fixed_point_has_radius_one() {
        let geom = make_geometry(1, Shape::Plus).unwrap();
        let m = StuntedParams::new(geom, vec![qr(3, 4)]).unwrap().to_map();
        let g = markov_graph(&m, 100).unwrap();
        let rho = leading_eigenvalue(&g.matrix);
        assert!((rho - 1.0).abs() < 1e-10, "rho = {rho}");
    }

    #[test]
    fn golden_mean_fixture_char_poly() {
        // Plateau value eventually on the sawtooth 3-cycle through the
        // plateau edge: zeta = 33/26 realizes the golden-mean kneading.
        let geom = make_geometry(1, Shape::Plus).unwrap();
        let m = StuntedParams::new(geom, vec![qr(33, 26)])
            .unwrap()
            .to_map();
        let g = markov_graph(&m, 1000).unwrap();
        let rho = leading_eigenvalue(&g.matrix);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((rho - phi).abs() < 1e-9, "rho = {rho}");
        // the characteristic polynomial carries the x^2 - x - 1 factor:
        // phi is certified between rationals via exact minors
        assert!(exceeds_spectral_radius(&g.matrix, &qr(165, 100)));
        assert!(!exceeds_spectral_radius(&g.matrix, &qr(160, 100)));
    }

    #[test]
    fn eigenvalue_examples() {
        assert!((leading_eigenvalue(&[vec![1, 1], vec![1, 1]]) - 2.0).abs() < 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((leading_eigenvalue(&[vec![1, 1], vec![1, 0]]) - phi).abs() < 1e-12);
        assert!(
            (leading_eigenvalue(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]) - 1.0).abs()
                < 1e-12
        );
        assert_eq!(leading_eigenvalue(&[vec![0, 0], vec![0, 0]]), 0.0);
    }

    #[test]
    fn certified_bounds_bracket_float_value() {
        let m = vec![vec![1, 1], vec![1, 0]];
        let (lo, hi) = spectral_radius_bounds(&dense_to_sparse(&m), 2);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(q_to_f64(&lo) <= phi && phi <= q_to_f64(&hi));
        assert!(q_to_f64(&hi) - q_to_f64(&lo) < 1e-9);
    }

    #[test]
    fn char_poly_of_golden_matrix() {
        let p = char_poly(&[vec![1, 1], vec![1, 0]]);
        // x^2 - x - 1
        assert_eq!(p, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
    }

    #[test]
    fn not_markov_within_budget_is_tristate() {
        // a tent of non-integer slope has exploding orbit denominators
        let m = PiecewiseAffineMap::new(
            vec![qi(0), qr(1, 2), qi(1)],
            vec![qi(0), qr(7071, 10000), qi(0)],
        )
        .unwrap();
        assert!(matches!(
            markov_graph(&m, 50),
            Err(CoreError::NotMarkovWithinBudget(_))
        ));
    }

    #[test]
    fn det_exact() {
        let m = vec![
            vec![qi(2), qi(1)],
            vec![qi(1), qi(1)],
        ];
        assert_eq!(det_q(m), qi(1));
        let singular = vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]];
        assert_eq!(det_q(singular), qi(0));
    }
}
