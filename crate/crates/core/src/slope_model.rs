//! Semi-conjugacy of a positive-entropy map onto a piecewise-affine map with
//! constant slopes +-theta, via the normalized lap generating functions
//! Lambda(J) = lim_{t->1/theta} sum l(T^n|J) t^n / sum l(T^n|I) t^n.

use crate::census::{census_on_interval, CensusEngine};
use crate::error::{CoreError, Result};
use crate::maps::PiecewiseAffineMap;
use crate::rat::{ln_ratio, q_from_f64, Q};
use num_bigint::BigUint;
use num_traits::{Signed, Zero};

/// Constant-slope model: theta = exp(h), the model map F with slopes close
/// to +-theta, and a monotone sample table of the semi-conjugacy lambda.
#[derive(Debug, Clone)]
pub struct ConstantSlopeModel {
    pub theta: f64,
    pub f_model: PiecewiseAffineMap,
    /// (x, lambda(x)) samples, monotone nondecreasing in both coordinates.
    pub lambda_samples: Vec<(Q, f64)>,
    /// sup |lambda(T x) - F(lambda x)| over the sample grid.
    pub residual: f64,
    /// heuristic truncation error: drift of the deepest-level ratios.
    pub truncation_error: f64,
}

/// Normalized lap-count ratio lambda(x) = l(T^N | [lo, x]) / l(T^N | I).
///
/// The limit in the defining generating-function expression is dominated by
/// the top coefficient; the deepest-level ratio realizes it with error
/// O((rho_2/theta)^N) instead of the O(1/N) of an Abel-type partial sum, so
/// the residual tolerance is reachable at N = 40. `eps` is kept as a guard
/// band: levels N and N-1 are compared and their drift reported.
fn lambda_of(engine: &mut CensusEngine, lo: &Q, x: &Q, total: &[BigUint], n: usize) -> (f64, f64) {
    if x <= lo {
        return (0.0, 0.0);
    }
    let counts = census_on_interval(engine, lo, x, n);
    let v = ratio(&counts[n - 1], &total[n - 1]);
    let v_prev = ratio(&counts[n - 2], &total[n - 2]);
    (v, (v - v_prev).abs())
}

fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    if b.is_zero() {
        return 0.0;
    }
    ln_ratio(a, b).exp()
}

/// `constant_slope_model`: build (lambda, F) for a map with entropy h > 0.
///
/// * lambda is sampled on the breakpoints of T plus a uniform grid of
///   `grid` points;
/// * F is the piecewise-affine interpolation of the pushed breakpoints
///   (lambda(x_j), lambda(T x_j));
/// * the semi-conjugacy residual sup |lambda(Tx) - F(lambda x)| on the grid
///   is reported, not fatal.
pub fn constant_slope_model(
    map: &PiecewiseAffineMap,
    h: f64,
    n_trunc: usize,
    grid: usize,
) -> Result<ConstantSlopeModel> {
    if h <= 0.0 {
        return Err(CoreError::EntropyZero(h));
    }
    if n_trunc < 3 {
        return Err(CoreError::InvalidParameter("need truncation >= 3".into()));
    }
    let theta = h.exp();
    let (lo, hi) = map.domain();
    let mut engine = CensusEngine::new(map);
    let total = census_on_interval(&mut engine, &lo, &hi, n_trunc);

    let mut trunc_err = 0.0f64;
    let mut lam = |x: &Q, engine: &mut CensusEngine| -> f64 {
        if *x >= hi {
            return 1.0;
        }
        let (v, drift) = lambda_of(engine, &lo, x, &total, n_trunc);
        trunc_err = trunc_err.max(drift);
        v.clamp(0.0, 1.0)
    };

    // Push breakpoints through lambda.
    let bps: Vec<Q> = map.breakpoints().to_vec();
    let mut model_pts: Vec<(f64, f64)> = Vec::new();
    let mut lam_cache: Vec<(Q, f64)> = Vec::new();
    for x in &bps {
        let u = lam(x, &mut engine);
        let tx = map.eval(x).unwrap();
        let v = lam(&tx, &mut engine);
        model_pts.push((u, v));
        lam_cache.push((x.clone(), u));
    }
    model_pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    model_pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
    if model_pts.len() < 2 {
        // lambda collapsed everything; synthesize the trivial model
        model_pts = vec![(0.0, 0.0), (1.0, 0.0)];
    }
    if model_pts.first().unwrap().0 > 0.0 {
        let v0 = model_pts.first().unwrap().1;
        model_pts.insert(0, (0.0, v0));
    }
    if model_pts.last().unwrap().0 < 1.0 {
        let v1 = model_pts.last().unwrap().1;
        model_pts.push((1.0, v1));
    }
    let xs: Vec<Q> = model_pts
        .iter()
        .map(|(u, _)| q_from_f64(*u).unwrap())
        .collect();
    let ys: Vec<Q> = model_pts
        .iter()
        .map(|(_, v)| q_from_f64(v.clamp(0.0, 1.0)).unwrap())
        .collect();
    let f_model = PiecewiseAffineMap::new(xs, ys)?;

    // Residual on the sample grid, and lambda table.
    let mut samples = lam_cache.clone();
    let mut residual = 0.0f64;
    let span = &hi - &lo;
    for k in 0..=grid {
        let x = &lo + &span * Q::new(k.into(), (grid.max(1)).into());
        let u = lam(&x, &mut engine);
        let tx = map.eval(&x).unwrap();
        let v = lam(&tx, &mut engine);
        let fu = crate::rat::q_to_f64(&f_model.eval(&q_from_f64(u).unwrap()).unwrap());
        residual = residual.max((v - fu).abs());
        samples.push((x, u));
    }
    samples.sort_by(|a, b| a.0.cmp(&b.0));
    samples.dedup_by(|a, b| a.0 == b.0);

    Ok(ConstantSlopeModel {
        theta,
        f_model,
        lambda_samples: samples,
        residual,
        truncation_error: trunc_err,
    })
}

/// Check the model invariants: lambda nondecreasing with endpoints 0 and 1,
/// and slopes of F within `tol` of +-theta (flat stretches allowed where
/// lambda collapses an interval).
pub fn model_invariants_ok(m: &ConstantSlopeModel, tol: f64) -> bool {
    let mono = m
        .lambda_samples
        .windows(2)
        .all(|w| w[0].1 <= w[1].1 + 1e-12);
    let first = m.lambda_samples.first().map(|p| p.1).unwrap_or(0.0);
    let last = m.lambda_samples.last().map(|p| p.1).unwrap_or(1.0);
    let ends = first.abs() < 1e-9 && (last - 1.0).abs() < 1e-9;
    let slopes_ok = m.f_model.slopes().iter().all(|s| {
        let s = crate::rat::q_to_f64(&s.abs());
        s < tol || (s - m.theta).abs() < tol * m.theta
    });
    mono && ends && slopes_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_geometry, Shape, StuntedParams};
    use crate::rat::{q_to_f64, qi, qr};

    fn stunted(d: usize, zeta: Vec<Q>) -> PiecewiseAffineMap {
        let g = make_geometry(d, Shape::Plus).unwrap();
        StuntedParams::new(g, zeta).unwrap().to_map()
    }

    #[test]
    fn full_stunted_model_is_identity_conjugacy() {
        // Full d=1 stunted map: lambda is affine, F is tent-with-plateau of
        // slope +-2 (entropy log 2).
        let m = stunted(1, vec![qr(3, 2)]);
        let model = constant_slope_model(&m, 2f64.ln(), 40, 60).unwrap();
        assert!(model.residual < 1e-6, "residual {}", model.residual);
        assert!(model_invariants_ok(&model, 1e-6));
        for s in model.f_model.slopes() {
            let s = q_to_f64(&s.abs());
            assert!(s < 1e-9 || (s - 2.0).abs() < 1e-6, "slope {s}");
        }
    }

    #[test]
    fn golden_mean_model_has_phi_slopes() {
        let m = stunted(1, vec![qr(33, 26)]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let model = constant_slope_model(&m, phi.ln(), 40, 60).unwrap();
        assert!(model.residual < 1e-5, "residual {}", model.residual);
        let mut nontrivial = 0;
        for s in model.f_model.slopes() {
            let s = q_to_f64(&s.abs());
            if s > 1e-9 {
                assert!((s - phi).abs() < 1e-4 * phi, "slope {s}");
                nontrivial += 1;
            }
        }
        assert!(nontrivial >= 2);
    }

    #[test]
    fn renormalized_half_collapses_to_three_laps() {
        // T: each half [-e,0], [0,e] carries 3 full laps onto itself; the
        // perturbed version maps the interior maximum of the left half into
        // the right half, collapsing it: the model has 3 laps of slope +-3.
        let e = qr(3, 2);
        let h = qr(1, 2); // e/3
        let xs = vec![
            -e.clone(),
            -&e + &h,
            -&e + qi(2) * &h,
            qi(0),
            h.clone(),
            qi(2) * &h,
            e.clone(),
        ];
        let ys_perturbed = vec![
            -e.clone(),
            qr(1, 4), // interior max of the left half pushed into (0, e]
            -e.clone(),
            qi(0),
            e.clone(),
            qi(0),
            e.clone(),
        ];
        let t = PiecewiseAffineMap::new(xs, ys_perturbed).unwrap();
        // The right half feeds no mass back while the left half funnels
        // into it, so the lap series of the left half carries an extra
        // factor n and the semi-conjugacy collapses J_+ in the limit. At
        // finite truncation the J_+ image keeps ~1/N of the total lambda
        // mass; assert the collapse by its decay and check the three
        // surviving laps carry slope close to +-3.
        let width_at = |n: usize| -> f64 {
            let model = constant_slope_model(&t, 3f64.ln(), n, 40).unwrap();
            // lambda mass of J_+ = 1 - lambda(0)
            let lam0 = model
                .lambda_samples
                .iter()
                .find(|(x, _)| *x == qi(0))
                .map(|(_, v)| *v)
                .unwrap();
            1.0 - lam0
        };
        let w24 = width_at(24);
        let w48 = width_at(48);
        assert!(w48 < 0.66 * w24, "no collapse: w24={w24}, w48={w48}");
        // Laps inside the collapsing region have widths O(1/N); the three
        // surviving laps have macroscopic width and slope close to +-3.
        let model = constant_slope_model(&t, 3f64.ln(), 48, 40).unwrap();
        let f = &model.f_model;
        let mut big_laps = Vec::new();
        for k in 0..f.lap_count() {
            let width = q_to_f64(&(&f.breakpoints()[k + 1] - &f.breakpoints()[k]));
            if width > 0.05 {
                big_laps.push(q_to_f64(&f.slope(k).abs()));
            }
        }
        assert_eq!(big_laps.len(), 3, "main laps: {big_laps:?}");
        for s in big_laps {
            assert!((s - 3.0).abs() < 0.2, "slope {s}");
        }
    }

    #[test]
    fn zero_entropy_rejected() {
        let m = stunted(1, vec![qr(3, 2)]);
        assert!(matches!(
            constant_slope_model(&m, 0.0, 40, 10),
            Err(CoreError::EntropyZero(_))
        ));
    }
}
