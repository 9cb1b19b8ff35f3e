//! Rome reduction of transition graphs: a_{i,j}(x) = sum over simple paths
//! p from rome vertex i to rome vertex j (interior outside the rome) of
//! x^{1 - l(p)}, and the exact determinant identity
//! det(A - xI) = (-x)^{#G - #R} det(A_R(x) - xI_R).

use crate::error::{CoreError, Result};
use crate::markov::{det_q, TransitionGraph};
use crate::rat::Q;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Laurent polynomial in x with integer coefficients, exponent -> coefficient.
pub type LaurentPoly = BTreeMap<i64, BigInt>;

fn poly_add_scaled(dst: &mut LaurentPoly, src: &LaurentPoly, mult: &BigInt, shift: i64) {
    for (e, c) in src {
        let entry = dst.entry(e + shift).or_insert_with(BigInt::zero);
        *entry += c * mult;
    }
}

pub fn eval_laurent(p: &LaurentPoly, x: &Q) -> Q {
    let mut acc = Q::zero();
    for (e, c) in p {
        let mut term = Q::from_integer(c.clone());
        if *e >= 0 {
            term *= x.pow(*e as i32);
        } else {
            term /= x.pow((-e) as i32);
        }
        acc += term;
    }
    acc
}

/// Rome matrix with Laurent-polynomial entries.
#[derive(Debug, Clone)]
pub struct RomeMatrix {
    pub rome: Vec<usize>,
    pub entries: Vec<Vec<LaurentPoly>>,
}

/// `rome_reduce`: enumerate simple paths between rome vertices with interior
/// outside the rome. Fails with `RomeInvalid` when the complement has a loop.
pub fn rome_reduce(graph: &TransitionGraph, rome: &[usize]) -> Result<RomeMatrix> {
    let n = graph.size();
    let in_rome = {
        let mut v = vec![false; n];
        for r in rome {
            if *r >= n {
                return Err(CoreError::InvalidParameter(format!(
                    "rome vertex {r} out of range"
                )));
            }
            v[*r] = true;
        }
        v
    };
    // Check G \ R is acyclic (Kahn on the complement).
    let comp: Vec<usize> = (0..n).filter(|v| !in_rome[*v]).collect();
    {
        let mut indeg: BTreeMap<usize, usize> = comp.iter().map(|v| (*v, 0)).collect();
        for &u in &comp {
            for &v in &comp {
                if graph.matrix[u][v] > 0 {
                    *indeg.get_mut(&v).unwrap() += 1;
                }
            }
        }
        let mut queue: Vec<usize> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(v, _)| *v)
            .collect();
        let mut seen = 0usize;
        while let Some(u) = queue.pop() {
            seen += 1;
            for &v in &comp {
                if graph.matrix[u][v] > 0 {
                    let d = indeg.get_mut(&v).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        queue.push(v);
                    }
                }
            }
        }
        if seen != comp.len() {
            let bad = comp
                .iter()
                .find(|v| indeg[v] > 0)
                .copied()
                .unwrap_or(0);
            return Err(CoreError::RomeInvalid(bad));
        }
    }
    // h[u][j]: generating polynomial of paths u -> ... -> rome_j with all
    // intermediate vertices in the complement, exponent = -(edges used),
    // starting from complement vertex u. Computed by DFS with memoization
    // (the complement is a DAG, so recursion terminates).
    let rome_pos: BTreeMap<usize, usize> = rome.iter().enumerate().map(|(k, r)| (*r, k)).collect();
    let mut memo: BTreeMap<usize, Vec<LaurentPoly>> = BTreeMap::new();
    fn paths_from(
        u: usize,
        graph: &TransitionGraph,
        in_rome: &[bool],
        rome_pos: &BTreeMap<usize, usize>,
        memo: &mut BTreeMap<usize, Vec<LaurentPoly>>,
    ) -> Vec<LaurentPoly> {
        if let Some(v) = memo.get(&u) {
            return v.clone();
        }
        let r = rome_pos.len();
        let mut out: Vec<LaurentPoly> = vec![LaurentPoly::new(); r];
        let n = graph.size();
        for v in 0..n {
            let mult = graph.matrix[u][v];
            if mult == 0 {
                continue;
            }
            let mult = BigInt::from(mult);
            if in_rome[v] {
                // one edge u -> rome v: exponent -1
                let j = rome_pos[&v];
                let entry = out[j].entry(-1).or_insert_with(BigInt::zero);
                *entry += &mult;
            } else {
                let sub = paths_from(v, graph, in_rome, rome_pos, memo);
                for (j, poly) in sub.iter().enumerate() {
                    poly_add_scaled(&mut out[j], poly, &mult, -1);
                }
            }
        }
        memo.insert(u, out.clone());
        out
    }
    let r = rome.len();
    let mut entries = vec![vec![LaurentPoly::new(); r]; r];
    for (i, &ri) in rome.iter().enumerate() {
        for v in 0..n {
            let mult = graph.matrix[ri][v];
            if mult == 0 {
                continue;
            }
            let mult = BigInt::from(mult);
            if in_rome[v] {
                // direct edge: length 1, term x^{1-1} = x^0
                let j = rome_pos[&v];
                let entry = entries[i][j].entry(0).or_insert_with(BigInt::zero);
                *entry += &mult;
            } else {
                // edge into the complement then a complement path: the
                // sub-polynomial has exponent -(edges after the first); the
                // total path length l gives x^{1-l} = x^{1} * x^{-l}.
                let sub = paths_from(v, graph, &in_rome, &rome_pos, &mut memo);
                for (j, poly) in sub.iter().enumerate() {
                    poly_add_scaled(&mut entries[i][j], poly, &mult, 0);
                }
            }
        }
    }
    Ok(RomeMatrix {
        rome: rome.to_vec(),
        entries,
    })
}

/// `rome_identity_check`: evaluate det(A - xI) and
/// (-x)^{#G-#R} det(A_R(x) - xI_R) exactly at a nonzero rational x.
pub fn rome_identity_check(graph: &TransitionGraph, rome: &[usize], x: &Q) -> Result<bool> {
    if x.is_zero() {
        return Err(CoreError::InvalidParameter(
            "evaluation point must be nonzero".into(),
        ));
    }
    let rm = rome_reduce(graph, rome)?;
    let n = graph.size();
    let r = rome.len();
    // LHS: det(A - xI)
    let mut lhs_m = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            lhs_m[i][j] = Q::from_integer(BigInt::from(graph.matrix[i][j]));
            if i == j {
                lhs_m[i][j] -= x;
            }
        }
    }
    let lhs = det_q(lhs_m);
    // RHS
    let mut rhs_m = vec![vec![Q::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            rhs_m[i][j] = eval_laurent(&rm.entries[i][j], x);
            if i == j {
                rhs_m[i][j] -= x;
            }
        }
    }
    let mut rhs = det_q(rhs_m);
    let sign_pow = (n - r) as i32;
    let factor = (-x.clone()).pow(sign_pow);
    rhs *= factor;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qi, qr};

    fn graph(matrix: Vec<Vec<u64>>) -> TransitionGraph {
        let n = matrix.len();
        let pts: Vec<Q> = (0..=n as i64).map(qi).collect();
        let vertices = (0..n).map(|i| (qi(i as i64), qi(i as i64 + 1))).collect();
        TransitionGraph {
            points: pts,
            vertices,
            matrix,
        }
    }

    #[test]
    fn loop_plus_detour() {
        // 1->1, 1->2, 2->1 with rome {1}: a_11(x) = 1 + x^{-1}
        let g = graph(vec![vec![1, 1], vec![1, 0]]);
        let rm = rome_reduce(&g, &[0]).unwrap();
        let poly = &rm.entries[0][0];
        assert_eq!(poly.get(&0), Some(&BigInt::from(1)));
        assert_eq!(poly.get(&-1), Some(&BigInt::from(1)));
        assert_eq!(poly.len(), 2);
        // identity at x=2: both sides equal x^2-x-1 evaluated: 1
        assert!(rome_identity_check(&g, &[0], &qi(2)).unwrap());
        assert!(rome_identity_check(&g, &[0], &qr(-7, 3)).unwrap());
    }

    #[test]
    fn rome_of_everything_is_adjacency() {
        let g = graph(vec![vec![1, 1], vec![1, 1]]);
        let rm = rome_reduce(&g, &[0, 1]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(rm.entries[i][j].get(&0), Some(&BigInt::from(1)));
            }
        }
        assert!(rome_identity_check(&g, &[0, 1], &qr(5, 2)).unwrap());
    }

    #[test]
    fn chain_path_of_length_two() {
        // 1->2->3, rome {1,3}: a_{1,3} = x^{-1}
        let g = graph(vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        let rm = rome_reduce(&g, &[0, 2]).unwrap();
        assert_eq!(rm.entries[0][1].get(&-1), Some(&BigInt::from(1)));
        assert!(rm.entries[0][0].is_empty());
        assert!(rome_identity_check(&g, &[0, 2], &qi(3)).unwrap());
    }

    #[test]
    fn invalid_rome_detected() {
        // 2-cycle outside the rome
        let g = graph(vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        assert!(matches!(
            rome_reduce(&g, &[0]),
            Err(CoreError::RomeInvalid(_))
        ));
    }
}
