//! Topological entropy estimates with certified brackets.
//!
//! Upper bounds come from subadditivity of the refined lap counts:
//! (1/n) log l(T^n) >= h for every n. Lower bounds come from the spectral
//! radius of any fully-expanded subgraph of the census tower (paths in the
//! subgraph inject into monotone pieces). When the tower closes the two meet
//! and the entropy is log of an exactly certified Perron eigenvalue.

use crate::census::CensusEngine;
use crate::error::{CoreError, Result};
use crate::maps::{PiecewiseAffineMap, PolynomialMap};
use crate::markov::{leading_eigenvalue_sparse, spectral_radius_bounds};
use crate::rat::{ln_ratio, q_to_f64, Q};
use num_bigint::BigUint;
use num_traits::One;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    LapGrowth,
    Markov,
    StPipeline,
}

/// Entropy bracket: lower <= value <= upper, both bounds certified.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: EntropyMethod,
    pub depth: usize,
}

impl EntropyEstimate {
    pub fn err(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Tuning knobs for the census-based estimator.
#[derive(Debug, Clone, Copy)]
pub struct EntropyOptions {
    /// Cap on distinct image intervals in the tower.
    pub max_nodes: usize,
    /// Node budget for the closure attempt.
    pub closure_nodes: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            max_nodes: 200_000,
            closure_nodes: 20_000,
        }
    }
}

/// `entropy_lap`: census-based entropy of a piecewise-affine map.
/// Stops as soon as upper - lower < tol; returns `NoConvergence` carrying
/// the bracket when the tolerance is unreachable within `n_max` levels.
pub fn entropy_lap(
    map: &PiecewiseAffineMap,
    n_max: usize,
    tol: f64,
) -> std::result::Result<EntropyEstimate, CoreError> {
    entropy_lap_with(map, n_max, tol, EntropyOptions::default())
}

pub fn entropy_lap_with(
    map: &PiecewiseAffineMap,
    n_max: usize,
    tol: f64,
    opts: EntropyOptions,
) -> std::result::Result<EntropyEstimate, CoreError> {
    if n_max < 2 {
        return Err(CoreError::InvalidParameter("n_max must be >= 2".into()));
    }
    let mut engine = CensusEngine::new(map);
    let state0 = engine.initial_state();

    // Attempt to close the reachable tower: exact Perron value.
    if engine.close_graph(&state0, opts.closure_nodes) {
        let adj = engine.full_graph();
        let n = engine.node_count();
        let (lo, hi) = spectral_radius_bounds(&adj, n);
        let lo = q_to_f64(&lo).max(1.0).ln();
        let hi = q_to_f64(&hi).max(1.0).ln();
        let value = leading_eigenvalue_sparse(&adj, n).max(1.0).ln();
        let value = value.clamp(lo, hi);
        return Ok(EntropyEstimate {
            value,
            lower: lo,
            upper: hi,
            method: EntropyMethod::Markov,
            depth: n,
        });
    }

    // Open tower: run census levels, keep the best subadditive upper bound
    // and refresh the expanded-subgraph lower bound as the tower grows.
    let mut state = state0;
    let mut counts: Vec<BigUint> = vec![state.total()];
    let mut upper = f64::INFINITY;
    let mut lower = 0.0f64;
    let mut depth = 1usize;
    let one = BigUint::one();
    for n in 2..=n_max {
        state = engine.step(&state);
        counts.push(state.total());
        depth = n;
        let ln_l = crate::rat::ln_biguint(counts.last().unwrap());
        upper = upper.min(ln_l / n as f64);
        if engine.node_count() > opts.max_nodes {
            break;
        }
        // Periodically refresh the certified lower bound (it only improves
        // as more of the tower is expanded).
        if n % 8 == 0 || n == n_max {
            lower = lower.max(subgraph_lower_bound(&engine));
            if upper - lower < tol {
                break;
            }
        }
    }
    lower = lower.max(subgraph_lower_bound(&engine));
    let ratio = if counts.len() >= 2 {
        let a = counts.last().unwrap();
        let b = &counts[counts.len() - 2];
        if *b > one {
            ln_ratio(a, b)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let value = ratio.clamp(lower, upper.max(lower));
    let est = EntropyEstimate {
        value,
        lower,
        upper: upper.max(lower),
        method: EntropyMethod::LapGrowth,
        depth,
    };
    if est.upper - est.lower < tol {
        Ok(est)
    } else {
        Err(CoreError::NoConvergence {
            value: est.value,
            lower: est.lower,
            upper: est.upper,
        })
    }
}

/// Certified lower bound: log spectral radius of the subgraph induced on
/// fully-expanded tower vertices.
fn subgraph_lower_bound(engine: &CensusEngine) -> f64 {
    let adj = engine.expanded_subgraph();
    let (lo, _) = spectral_radius_bounds(&adj, adj.len());
    q_to_f64(&lo).max(1.0).ln()
}

/// Extract the estimate whether or not the tolerance was reached.
pub fn entropy_lap_best(map: &PiecewiseAffineMap, n_max: usize, tol: f64) -> EntropyEstimate {
    match entropy_lap(map, n_max, tol) {
        Ok(e) => e,
        Err(CoreError::NoConvergence {
            value,
            lower,
            upper,
        }) => EntropyEstimate {
            value,
            lower,
            upper,
            method: EntropyMethod::LapGrowth,
            depth: n_max,
        },
        Err(e) => panic!("entropy_lap failed: {e}"),
    }
}

/// `entropy_poly`: kneading -> ST -> stunted census pipeline.
pub fn entropy_poly(
    f: &PolynomialMap,
    depth: usize,
    tol: f64,
) -> std::result::Result<EntropyEstimate, CoreError> {
    let st = crate::correspondence::st_map(f, depth)?;
    let map = st.params.to_map();
    let mut est = match entropy_lap(&map, depth.max(24) * 3, tol) {
        Ok(e) => e,
        Err(CoreError::NoConvergence {
            value,
            lower,
            upper,
        }) => {
            return Err(CoreError::NoConvergence {
                value,
                lower,
                upper,
            })
        }
        Err(e) => return Err(e),
    };
    est.method = EntropyMethod::StPipeline;
    Ok(est)
}

/// Best-effort variant that keeps the bracket on no-convergence.
pub fn entropy_poly_best(f: &PolynomialMap, depth: usize, tol: f64) -> Result<EntropyEstimate> {
    match entropy_poly(f, depth, tol) {
        Ok(e) => Ok(e),
        Err(CoreError::NoConvergence {
            value,
            lower,
            upper,
        }) => Ok(EntropyEstimate {
            value,
            lower,
            upper,
            method: EntropyMethod::StPipeline,
            depth,
        }),
        Err(e) => Err(e),
    }
}

/// Direct float lap counting for polynomials: the breakpoints of f^n are the
/// preimages of the critical points; they are located by bisection on the
/// monotone pieces of the previous level. Returns l(f^1), ..., l(f^n).
pub fn float_lap_counts(f: &PolynomialMap, n: usize) -> Vec<usize> {
    let (lo, hi) = f.domain;
    // breakpoints of f^k, including the endpoints, sorted
    let mut pts: Vec<f64> = vec![lo, hi];
    pts.extend_from_slice(&f.critical_points);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = vec![pts.len() - 1];
    // monotone pieces of f itself, delimited by the critical points
    let mut base = vec![lo];
    base.extend_from_slice(&f.critical_points);
    base.push(hi);
    for _ in 1..n {
        // B_{k+1} = Crit union f^{-1}(B_k): pull the whole breakpoint set
        // back through each monotone piece of f by bisection
        let mut next: Vec<f64> = base.clone();
        for w in base.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (f.eval_unchecked(a), f.eval_unchecked(b));
            let flo = fa.min(fb);
            let fhi = fa.max(fb);
            for target in &pts {
                let target = *target;
                if target <= flo || target >= fhi {
                    continue;
                }
                let (mut x, mut y, fx) = if fa <= fb { (a, b, fa) } else { (b, a, fb) };
                let mut fx = fx;
                for _ in 0..80 {
                    let m = 0.5 * (x + y);
                    let fm = f.eval_unchecked(m);
                    if (fm < target) == (fx < target) {
                        x = m;
                        fx = fm;
                    } else {
                        y = m;
                    }
                    if (y - x).abs() < 1e-14 {
                        break;
                    }
                }
                next.push(0.5 * (x + y));
            }
        }
        next.sort_by(|a, b| a.partial_cmp(b).unwrap());
        next.dedup_by(|a, b| (*a - *b).abs() < 5e-12);
        pts = next;
        out.push(pts.len() - 1);
    }
    out
}

/// Growth-rate estimate from float lap counts (last-ratio).
pub fn float_lap_growth(f: &PolynomialMap, n: usize) -> f64 {
    let counts = float_lap_counts(f, n);
    if counts.len() < 2 {
        return 0.0;
    }
    let a = counts[counts.len() - 1] as f64;
    let b = counts[counts.len() - 2] as f64;
    if b <= 0.0 {
        0.0
    } else {
        (a / b).ln().max(0.0)
    }
}

/// Convenience: exact-census entropy of a stunted parameter point.
pub fn entropy_of_params(
    params: &crate::maps::StuntedParams,
    n_max: usize,
    tol: f64,
) -> EntropyEstimate {
    entropy_lap_best(&params.to_map(), n_max, tol)
}

/// Bracket-aware comparison: returns true when `a <= b` is consistent with
/// the brackets, i.e. a.value <= b.value + err(a) + err(b).
pub fn bracket_le(a: &EntropyEstimate, b: &EntropyEstimate) -> bool {
    a.value <= b.value + a.err() + b.err() + 1e-12
}

/// Horseshoe-style lower bound (kept for diagnostics): k monotone branches
/// of T^n covering a common interval give h >= (1/n) log k. The
/// tower-subgraph bound subsumes this; exposed for tests.
pub fn horseshoe_lower_bound(q: &Q, _n: usize) -> f64 {
    q_to_f64(q).max(1.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{family_member, make_geometry, Shape, StuntedParams};
    use crate::rat::{qi, qr};

    fn stunted(d: usize, zeta: Vec<Q>) -> PiecewiseAffineMap {
        let g = make_geometry(d, Shape::Plus).unwrap();
        StuntedParams::new(g, zeta).unwrap().to_map()
    }

    #[test]
    fn corner_entropies_are_log_d_plus_one() {
        for d in 1..=3usize {
            let g = make_geometry(d, Shape::Plus).unwrap();
            let zeta = vec![g.e.clone(); d];
            let m = StuntedParams::new(g, zeta).unwrap().to_map();
            let est = entropy_lap(&m, 20, 1e-9).unwrap();
            let target = ((d + 1) as f64).ln();
            assert!(
                (est.value - target).abs() < 1e-9,
                "d={d}: value {} vs {target}",
                est.value
            );
            assert_eq!(est.method, EntropyMethod::Markov);
        }
    }

    #[test]
    fn zero_corner_is_exact_zero() {
        let m = stunted(1, vec![qr(-3, 2)]);
        let est = entropy_lap(&m, 10, 1e-12).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.lower, 0.0);
        assert_eq!(est.upper, 0.0);
    }

    #[test]
    fn plateau_on_fixed_point_gives_zero() {
        let m = stunted(1, vec![qr(3, 4)]);
        let est = entropy_lap(&m, 20, 1e-9).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn golden_mean_entropy() {
        let m = stunted(1, vec![qr(33, 26)]);
        let est = entropy_lap(&m, 30, 1e-9).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((est.value - phi.ln()).abs() < 1e-9);
    }

    #[test]
    fn logistic_pipeline_entropies() {
        let f4 = family_member("logistic", &[("lambda".to_string(), 4.0)].into()).unwrap();
        let est = entropy_poly_best(&f4, 30, 1e-3).unwrap();
        assert!((est.value - 2f64.ln()).abs() < 1e-3, "got {}", est.value);

        let f2 = family_member("logistic", &[("lambda".to_string(), 2.0)].into()).unwrap();
        let est = entropy_poly_best(&f2, 24, 1e-3).unwrap();
        assert!(est.value.abs() < 1e-9);

        let cheb = family_member("chebyshev-3", &std::collections::BTreeMap::new()).unwrap();
        let est = entropy_poly_best(&cheb, 30, 1e-3).unwrap();
        assert!((est.value - 3f64.ln()).abs() < 1e-3, "got {}", est.value);
    }

    #[test]
    fn pipeline_agrees_with_float_laps_on_logistic() {
        for k in 0..5 {
            let lam = 3.6 + 0.1 * k as f64;
            let f = family_member("logistic", &[("lambda".to_string(), lam)].into()).unwrap();
            let est = entropy_poly_best(&f, 26, 5e-3).unwrap();
            let direct = float_lap_growth(&f, 14);
            assert!(
                (est.value - direct).abs() < 0.08,
                "lambda={lam}: pipeline {} vs float {direct}",
                est.value
            );
        }
    }

    #[test]
    fn monotone_in_zeta() {
        let g = make_geometry(2, Shape::Plus).unwrap();
        let lo = StuntedParams::new(g.clone(), vec![qi(0), qi(1)]).unwrap();
        let hi = StuntedParams::new(g, vec![qi(1), qi(2)]).unwrap();
        let a = entropy_of_params(&lo, 40, 1e-6);
        let b = entropy_of_params(&hi, 40, 1e-6);
        assert!(bracket_le(&a, &b));
    }
}
