//! Map families: d-modal polynomials, the sawtooth S, and stunted sawtooth
//! maps T_zeta, with exact rational arithmetic for the piecewise-affine side.

use crate::error::{CoreError, Result};
use crate::rat::{fmt_q, qi, Q};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// Whether the first lap increases (`Plus`) or decreases (`Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Shape {
    Plus,
    Minus,
}

impl Shape {
    /// Lap `j` (0-based) is orientation reversing?
    pub fn lap_reversing(self, j: usize) -> bool {
        match self {
            Shape::Plus => j % 2 == 1,
            Shape::Minus => j % 2 == 0,
        }
    }

    /// Turning point `i` (1-based) is a local maximum?
    pub fn turn_is_max(self, i: usize) -> bool {
        // c_i is a max iff the lap to its left increases.
        !self.lap_reversing(i - 1)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Plus => "+",
            Shape::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Result<Shape> {
        match s {
            "+" | "plus" => Ok(Shape::Plus),
            "-" | "minus" => Ok(Shape::Minus),
            _ => Err(CoreError::Parse(format!("bad shape {s:?}"))),
        }
    }
}

/// Geometry of the sawtooth map S on [-e, e]: slope lambda = d + 2,
/// e = d*lambda/(lambda - 1), turning points in arithmetic progression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SawtoothGeometry {
    pub d: usize,
    pub shape: Shape,
    pub lambda: Q,
    pub e: Q,
    pub turning: Vec<Q>,
    /// |S(c_i)| = lambda for every turning point.
    pub peak: Q,
}

/// `make_geometry`: build the sawtooth geometry for `d` turning points.
pub fn make_geometry(d: usize, shape: Shape) -> Result<SawtoothGeometry> {
    if d == 0 {
        return Err(CoreError::InvalidParameter("d must be >= 1".into()));
    }
    let lambda = qi(d as i64 + 2);
    let e = qi(d as i64) * &lambda / (&lambda - qi(1));
    let turning = (1..=d).map(|i| qi(-(d as i64) - 1 + 2 * i as i64)).collect();
    Ok(SawtoothGeometry {
        d,
        shape,
        lambda: lambda.clone(),
        e,
        turning,
        peak: lambda,
    })
}

impl SawtoothGeometry {
    /// Value of S at turning point `i` (1-based): +lambda at maxima,
    /// -lambda at minima.
    pub fn turn_value(&self, i: usize) -> Q {
        if self.shape.turn_is_max(i) {
            self.lambda.clone()
        } else {
            -self.lambda.clone()
        }
    }

    /// Lap boundaries including the domain endpoints: c_0 = -e, c_{d+1} = e.
    pub fn lap_bound(&self, i: usize) -> Q {
        if i == 0 {
            -self.e.clone()
        } else if i == self.d + 1 {
            self.e.clone()
        } else {
            self.turning[i - 1].clone()
        }
    }

    /// S at the left boundary of lap `i` (0 <= i <= d), exact.
    fn bound_value(&self, i: usize) -> Q {
        if i >= 1 {
            self.turn_value(i)
        } else {
            // S(-e) = -e for shape +, +e for shape -.
            match self.shape {
                Shape::Plus => -self.e.clone(),
                Shape::Minus => self.e.clone(),
            }
        }
    }

    /// Index of the lap containing x (0-based, ties resolved to the left lap).
    pub fn lap_of(&self, x: &Q) -> usize {
        let mut j = 0usize;
        while j < self.d && *x > self.turning[j] {
            j += 1;
        }
        j
    }

    /// Slope of S on lap j.
    pub fn lap_slope(&self, j: usize) -> Q {
        if self.shape.lap_reversing(j) {
            -self.lambda.clone()
        } else {
            self.lambda.clone()
        }
    }

    /// `eval_sawtooth`: S(x), exact. The result may leave [-e, e] near
    /// turning points (|S(c_i)| = lambda > e).
    pub fn eval(&self, x: &Q) -> Result<Q> {
        if *x < -self.e.clone() || *x > self.e {
            return Err(CoreError::DomainViolation {
                x: fmt_q(x),
                lo: fmt_q(&-self.e.clone()),
                hi: fmt_q(&self.e),
            });
        }
        let j = self.lap_of(x);
        let left = self.lap_bound(j);
        let base = self.bound_value(j);
        Ok(base + self.lap_slope(j) * (x - left))
    }
}

/// Free function mirroring the operation name in the public API.
pub fn eval_sawtooth(g: &SawtoothGeometry, x: &Q) -> Result<Q> {
    g.eval(x)
}

/// A point zeta in [-e,e]^d with zeta_i >= -zeta_{i+1}; determines T_zeta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuntedParams {
    pub geometry: SawtoothGeometry,
    pub zeta: Vec<Q>,
}

impl StuntedParams {
    pub fn new(geometry: SawtoothGeometry, zeta: Vec<Q>) -> Result<Self> {
        if zeta.len() != geometry.d {
            return Err(CoreError::InvalidParameter(format!(
                "expected {} parameters, got {}",
                geometry.d,
                zeta.len()
            )));
        }
        for (i, z) in zeta.iter().enumerate() {
            if z.abs() > geometry.e {
                return Err(CoreError::ConstraintViolation {
                    index: i + 1,
                    msg: format!("zeta_{} = {} outside [-e, e]", i + 1, fmt_q(z)),
                });
            }
        }
        for i in 0..zeta.len().saturating_sub(1) {
            if &zeta[i] + &zeta[i + 1] < Q::zero() {
                return Err(CoreError::ConstraintViolation {
                    index: i + 1,
                    msg: format!(
                        "oblique constraint zeta_{} >= -zeta_{} violated ({} < {})",
                        i + 1,
                        i + 2,
                        fmt_q(&zeta[i]),
                        fmt_q(&-zeta[i + 1].clone())
                    ),
                });
            }
        }
        Ok(StuntedParams { geometry, zeta })
    }

    /// Plateau half-width w_i = 1 - zeta_i / lambda (1-based index).
    pub fn half_width(&self, i: usize) -> Q {
        qi(1) - &self.zeta[i - 1] / &self.geometry.lambda
    }

    /// Plateau Z_i = [c_i - w_i, c_i + w_i].
    pub fn plateau(&self, i: usize) -> (Q, Q) {
        let w = self.half_width(i);
        let c = &self.geometry.turning[i - 1];
        (c - &w, c + &w)
    }

    /// Constant value of T on Z_i: +zeta_i at maxima, -zeta_i at minima.
    pub fn plateau_value(&self, i: usize) -> Q {
        if self.geometry.shape.turn_is_max(i) {
            self.zeta[i - 1].clone()
        } else {
            -self.zeta[i - 1].clone()
        }
    }

    /// Z_i and Z_{i+1} touch exactly when zeta_i = -zeta_{i+1}.
    pub fn touching(&self, i: usize) -> bool {
        (&self.zeta[i - 1] + &self.zeta[i]).is_zero()
    }

    /// Maximal blocks of pairwise-touching plateaus, as (first, last) 1-based.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 1usize;
        for i in 1..=self.geometry.d {
            if i == self.geometry.d || !self.touching(i) {
                out.push((start, i));
                start = i + 1;
            }
        }
        out
    }

    /// Exact evaluation of T_zeta.
    pub fn eval(&self, x: &Q) -> Result<Q> {
        if *x < -self.geometry.e.clone() || *x > self.geometry.e {
            return Err(CoreError::DomainViolation {
                x: fmt_q(x),
                lo: fmt_q(&-self.geometry.e.clone()),
                hi: fmt_q(&self.geometry.e),
            });
        }
        for i in 1..=self.geometry.d {
            let (lo, hi) = self.plateau(i);
            if *x >= lo && *x <= hi {
                return Ok(self.plateau_value(i));
            }
        }
        self.geometry.eval(x)
    }

    /// `build_stunted`: the piecewise-affine realization of T_zeta.
    pub fn to_map(&self) -> PiecewiseAffineMap {
        let mut pts: Vec<Q> = Vec::new();
        pts.push(-self.geometry.e.clone());
        for i in 1..=self.geometry.d {
            let (lo, hi) = self.plateau(i);
            pts.push(lo);
            pts.push(hi);
        }
        pts.push(self.geometry.e.clone());
        pts.sort();
        pts.dedup();
        pts.retain(|p| *p >= -self.geometry.e.clone() && *p <= self.geometry.e);
        let ys: Vec<Q> = pts.iter().map(|p| self.eval(p).unwrap()).collect();
        PiecewiseAffineMap::new(pts, ys).expect("stunted map is always valid")
    }
}

/// Convenience constructor from integers-and-rationals.
pub fn build_stunted(params: &StuntedParams) -> PiecewiseAffineMap {
    params.to_map()
}

/// A continuous piecewise-affine self-map of an interval, stored as maximal
/// laps: strictly increasing breakpoints with values, collinear segments
/// merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseAffineMap {
    xs: Vec<Q>,
    ys: Vec<Q>,
}

impl PiecewiseAffineMap {
    pub fn new(xs: Vec<Q>, ys: Vec<Q>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(CoreError::InvalidParameter(
                "need matching breakpoint/value lists of length >= 2".into(),
            ));
        }
        for w in xs.windows(2) {
            if w[0] >= w[1] {
                return Err(CoreError::InvalidParameter(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
        }
        let lo = xs.first().unwrap().clone();
        let hi = xs.last().unwrap().clone();
        for y in &ys {
            if *y < lo || *y > hi {
                return Err(CoreError::InvalidParameter(format!(
                    "value {} leaves the domain [{}, {}]",
                    fmt_q(y),
                    fmt_q(&lo),
                    fmt_q(&hi)
                )));
            }
        }
        let mut m = PiecewiseAffineMap { xs, ys };
        m.normalize();
        Ok(m)
    }

    /// Merge adjacent collinear segments so laps are maximal.
    fn normalize(&mut self) {
        let mut xs = vec![self.xs[0].clone()];
        let mut ys = vec![self.ys[0].clone()];
        for k in 1..self.xs.len() - 1 {
            let s1 = (&self.ys[k] - ys.last().unwrap()) * (&self.xs[k + 1] - &self.xs[k]);
            let s2 = (&self.ys[k + 1] - &self.ys[k]) * (&self.xs[k] - xs.last().unwrap());
            if s1 != s2 {
                xs.push(self.xs[k].clone());
                ys.push(self.ys[k].clone());
            }
        }
        xs.push(self.xs.last().unwrap().clone());
        ys.push(self.ys.last().unwrap().clone());
        self.xs = xs;
        self.ys = ys;
    }

    pub fn domain(&self) -> (Q, Q) {
        (self.xs[0].clone(), self.xs.last().unwrap().clone())
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.xs
    }

    pub fn values(&self) -> &[Q] {
        &self.ys
    }

    /// Number of laps (maximal monotonicity/constancy intervals).
    pub fn lap_count(&self) -> usize {
        self.xs.len() - 1
    }

    /// Slope of lap k.
    pub fn slope(&self, k: usize) -> Q {
        (&self.ys[k + 1] - &self.ys[k]) / (&self.xs[k + 1] - &self.xs[k])
    }

    pub fn slopes(&self) -> Vec<Q> {
        (0..self.lap_count()).map(|k| self.slope(k)).collect()
    }

    /// Lap index containing x (ties to the left lap).
    pub fn lap_of(&self, x: &Q) -> usize {
        // binary search over breakpoints
        let mut lo = 0usize;
        let mut hi = self.lap_count() - 1;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if *x >= self.xs[mid] {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let (lo, hi) = self.domain();
        if *x < lo || *x > hi {
            return Err(CoreError::DomainViolation {
                x: fmt_q(x),
                lo: fmt_q(&lo),
                hi: fmt_q(&hi),
            });
        }
        let k = self.lap_of(x);
        Ok(&self.ys[k] + self.slope(k) * (x - &self.xs[k]))
    }

    /// Exact image of a closed interval (hull of endpoint images and the
    /// breakpoint values inside).
    pub fn image_of_interval(&self, a: &Q, b: &Q) -> Result<(Q, Q)> {
        let va = self.eval(a)?;
        let vb = self.eval(b)?;
        let (mut lo, mut hi) = if va <= vb { (va, vb) } else { (vb, va) };
        for k in 0..self.xs.len() {
            if self.xs[k] > *a && self.xs[k] < *b {
                let v = &self.ys[k];
                if *v < lo {
                    lo = v.clone();
                }
                if *v > hi {
                    hi = v.clone();
                }
            }
        }
        Ok((lo, hi))
    }

    /// Interior turning points: midpoints of extremal plateaus and strict
    /// extremum breakpoints (slope sign change).
    pub fn interior_turning_points(&self) -> Vec<Q> {
        let mut out = Vec::new();
        let slopes = self.slopes();
        // Walk runs of zero slope as single flat stretches.
        let mut k = 0usize;
        let mut last_sign: Option<bool> = None; // true = increasing
        while k < slopes.len() {
            if slopes[k].is_zero() {
                let start = k;
                while k < slopes.len() && slopes[k].is_zero() {
                    k += 1;
                }
                let next_sign = if k < slopes.len() {
                    Some(slopes[k].is_positive())
                } else {
                    None
                };
                if let (Some(a), Some(b)) = (last_sign, next_sign) {
                    if a != b {
                        let mid = (&self.xs[start] + &self.xs[k]) / qi(2);
                        out.push(mid);
                    }
                }
            } else {
                let s = slopes[k].is_positive();
                if let Some(prev) = last_sign {
                    if prev != s {
                        out.push(self.xs[k].clone());
                    }
                }
                last_sign = Some(s);
                k += 1;
            }
        }
        out
    }

    /// Modality: number of interior extrema (flat stretches counted once).
    pub fn modality(&self) -> usize {
        self.interior_turning_points().len()
    }

    /// Restrict-and-flatten: equal to `self` off `[jl, jr]`, constant
    /// `self(jl)` on it. Requires the two endpoint values to agree.
    pub fn stun_interval(&self, jl: &Q, jr: &Q) -> Result<PiecewiseAffineMap> {
        if jl > jr {
            return Err(CoreError::InvalidParameter("empty interval".into()));
        }
        if jl == jr {
            return Ok(self.clone());
        }
        let vl = self.eval(jl)?;
        let vr = self.eval(jr)?;
        if vl != vr {
            return Err(CoreError::InvalidParameter(
                "boundary of the flattened interval must map to a single point".into(),
            ));
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (x, y) in self.xs.iter().zip(self.ys.iter()) {
            if x < jl || x > jr {
                xs.push(x.clone());
                ys.push(y.clone());
            }
        }
        xs.push(jl.clone());
        ys.push(vl.clone());
        xs.push(jr.clone());
        ys.push(vl.clone());
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|&a, &b| xs[a].cmp(&xs[b]));
        let xs: Vec<Q> = idx.iter().map(|&i| xs[i].clone()).collect();
        let ys: Vec<Q> = idx.iter().map(|&i| ys[i].clone()).collect();
        PiecewiseAffineMap::new(xs, ys)
    }
}

/// A d-modal real polynomial on a compact interval, with located critical
/// points. Coefficients are ascending: f(x) = c0 + c1 x + c2 x^2 + ...
#[derive(Debug, Clone)]
pub struct PolynomialMap {
    pub coeffs: Vec<f64>,
    pub domain: (f64, f64),
    pub shape: Shape,
    pub critical_points: Vec<f64>,
    pub anchored: bool,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Isolate simple roots of `p` in (lo, hi) by sign changes on a fine grid
/// followed by bisection to ~1e-12 absolute.
fn isolate_roots(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    const GRID: usize = 4096;
    let mut roots = Vec::new();
    let h = (hi - lo) / GRID as f64;
    let mut xa = lo;
    let mut fa = horner(p, xa);
    for k in 1..=GRID {
        let xb = lo + h * k as f64;
        let fb = horner(p, xb);
        if fa == 0.0 && k > 1 {
            roots.push(xa);
        }
        if fa * fb < 0.0 {
            let (mut a, mut b) = (xa, xb);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = horner(p, m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if horner(p, a) * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                }
                if (b - a).abs() < 1e-13 {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
        xa = xb;
        fa = fb;
    }
    roots
}

impl PolynomialMap {
    /// Validates modality, simple interior critical points, and that the map
    /// sends its domain into itself (endpoint anchoring when requested).
    pub fn new(coeffs: Vec<f64>, domain: (f64, f64), anchored: bool) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(CoreError::InvalidParameter("bad domain".into()));
        }
        let deg = coeffs.len().saturating_sub(1);
        if deg < 2 {
            return Err(CoreError::InvalidParameter(
                "polynomial degree must be at least 2".into(),
            ));
        }
        let dp = derivative(&coeffs);
        let crit = isolate_roots(&dp, lo, hi);
        let d = deg - 1;
        if crit.len() != d {
            return Err(CoreError::InvalidParameter(format!(
                "expected {d} simple interior critical points, found {}",
                crit.len()
            )));
        }
        let ddp = derivative(&dp);
        for c in &crit {
            if horner(&ddp, *c).abs() < 1e-9 {
                return Err(CoreError::InvalidParameter(format!(
                    "critical point {c} is not simple"
                )));
            }
        }
        for w in crit.windows(2) {
            if w[1] - w[0] < 1e-9 {
                return Err(CoreError::InvalidParameter(
                    "critical points are not distinct".into(),
                ));
            }
        }
        // Range check at extrema and endpoints.
        let tol = 1e-9 * (1.0 + hi.abs().max(lo.abs()));
        let mut probe = vec![lo, hi];
        probe.extend_from_slice(&crit);
        for x in &probe {
            let v = horner(&coeffs, *x);
            if v < lo - tol || v > hi + tol {
                return Err(CoreError::InvalidParameter(format!(
                    "map does not send its domain into itself: f({x}) = {v}"
                )));
            }
        }
        if anchored {
            for x in [lo, hi] {
                let v = horner(&coeffs, x);
                if (v - lo).abs() > 1e-7 && (v - hi).abs() > 1e-7 {
                    return Err(CoreError::InvalidParameter(format!(
                        "anchoring failed: f({x}) = {v}"
                    )));
                }
            }
        }
        // Shape from the derivative sign on the first lap.
        let probe_x = 0.5 * (lo + crit[0]);
        let shape = if horner(&dp, probe_x) > 0.0 {
            Shape::Plus
        } else {
            Shape::Minus
        };
        Ok(PolynomialMap {
            coeffs,
            domain,
            shape,
            critical_points: crit,
            anchored,
        })
    }

    pub fn modality(&self) -> usize {
        self.critical_points.len()
    }

    /// `eval_poly`: Horner evaluation with a domain check.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain;
        let tol = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
        if x < lo - tol || x > hi + tol {
            return Err(CoreError::DomainViolation {
                x: format!("{x}"),
                lo: format!("{lo}"),
                hi: format!("{hi}"),
            });
        }
        Ok(horner(&self.coeffs, x))
    }

    pub fn eval_unchecked(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        horner(&derivative(&self.coeffs), x)
    }

    /// Second derivative sign at a critical point: true for local maximum.
    pub fn critical_is_max(&self, i: usize) -> bool {
        let ddp = derivative(&derivative(&self.coeffs));
        horner(&ddp, self.critical_points[i]) < 0.0
    }
}

pub fn eval_poly(f: &PolynomialMap, x: f64) -> Result<f64> {
    f.eval(x)
}

/// Chebyshev polynomial coefficients (ascending), T_k on [-1, 1].
fn chebyshev_coeffs(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0]; // T_0
    let mut cur = vec![0.0, 1.0]; // T_1
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `family_member`: named polynomial families.
///
/// * `logistic` with parameter `lambda`: lambda*x*(1-x) on [0, 1].
/// * `cubic-fig4` with parameter `b`: an anchored bimodal cubic slice
///   s(b)*x^3 + (1 - s(b))*x on [-1, 1] whose entropy profile over
///   b in [0.55, 1] is non-monotone (s dips from 4 at the ends to 2.6
///   in the middle of the sweep range).
/// * `chebyshev-k` with parameter `k`: T_k on [-1, 1].
pub fn family_member(name: &str, params: &BTreeMap<String, f64>) -> Result<PolynomialMap> {
    match name {
        "logistic" => {
            let lam = *params
                .get("lambda")
                .ok_or_else(|| CoreError::InvalidParameter("logistic needs lambda".into()))?;
            if lam <= 0.0 || lam > 4.0 {
                return Err(CoreError::InvalidParameter(
                    "logistic lambda must lie in (0, 4]".into(),
                ));
            }
            PolynomialMap::new(vec![0.0, lam, -lam], (0.0, 1.0), false)
        }
        "cubic-fig4" => {
            let b = *params
                .get("b")
                .ok_or_else(|| CoreError::InvalidParameter("cubic-fig4 needs b".into()))?;
            let s = cubic_fig4_s(b);
            if !(1.0 < s && s <= 4.0) {
                return Err(CoreError::InvalidParameter(format!(
                    "cubic-fig4 parameter b = {b} gives cubic coefficient s = {s} outside (1, 4]"
                )));
            }
            PolynomialMap::new(vec![0.0, 1.0 - s, 0.0, s], (-1.0, 1.0), true)
        }
        _ if name.starts_with("chebyshev-") => {
            let k: usize = name["chebyshev-".len()..]
                .parse()
                .map_err(|_| CoreError::Parse(format!("bad family {name:?}")))?;
            if !(2..=8).contains(&k) {
                return Err(CoreError::InvalidParameter(
                    "chebyshev order must be in 2..=8".into(),
                ));
            }
            PolynomialMap::new(chebyshev_coeffs(k), (-1.0, 1.0), true)
        }
        _ => Err(CoreError::Parse(format!("unknown family {name:?}"))),
    }
}

/// Leading coefficient of the cubic-fig4 slice: 4 at both ends of the sweep
/// range, dipping to 2.6 at b = 0.775.
pub fn cubic_fig4_s(b: f64) -> f64 {
    4.0 - (1.4 / 0.050625) * (b - 0.55) * (1.0 - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    #[test]
    fn geometry_examples() {
        let g = make_geometry(1, Shape::Plus).unwrap();
        assert_eq!(g.lambda, qi(3));
        assert_eq!(g.e, qr(3, 2));
        assert_eq!(g.turning, vec![qi(0)]);
        assert_eq!(g.peak, qi(3));

        let g = make_geometry(2, Shape::Plus).unwrap();
        assert_eq!(g.lambda, qi(4));
        assert_eq!(g.e, qr(8, 3));
        assert_eq!(g.turning, vec![qi(-1), qi(1)]);

        let g = make_geometry(3, Shape::Minus).unwrap();
        assert_eq!(g.lambda, qi(5));
        assert_eq!(g.e, qr(15, 4));
        assert_eq!(g.turning, vec![qi(-2), qi(0), qi(2)]);

        assert!(make_geometry(0, Shape::Plus).is_err());
    }

    #[test]
    fn sawtooth_evaluation() {
        let g = make_geometry(1, Shape::Plus).unwrap();
        assert_eq!(g.eval(&qi(0)).unwrap(), qi(3)); // S(c_1) = 2e = 3
        assert_eq!(g.eval(&qr(-3, 2)).unwrap(), qr(-3, 2)); // anchored endpoint
        let g2 = make_geometry(2, Shape::Plus).unwrap();
        assert_eq!(g2.eval(&qi(-1)).unwrap(), qi(4));
        assert_eq!(g2.eval(&qr(8, 3)).unwrap(), qr(8, 3));
        assert_eq!(g2.eval(&qi(1)).unwrap(), qi(-4));
        assert!(g.eval(&qi(2)).is_err());
    }

    #[test]
    fn turning_points_map_outside() {
        for d in 1..=4 {
            for shape in [Shape::Plus, Shape::Minus] {
                let g = make_geometry(d, shape).unwrap();
                for i in 1..=d {
                    let v = g.eval(&g.turning[i - 1]).unwrap();
                    assert_eq!(v.abs(), g.lambda);
                    assert!(v.abs() > g.e);
                }
            }
        }
    }

    #[test]
    fn stunted_examples() {
        let g = make_geometry(1, Shape::Plus).unwrap();
        // zeta = 3/2: plateau [-1/2, 1/2], value 3/2.
        let p = StuntedParams::new(g.clone(), vec![qr(3, 2)]).unwrap();
        assert_eq!(p.plateau(1), (qr(-1, 2), qr(1, 2)));
        assert_eq!(p.plateau_value(1), qr(3, 2));
        let m = p.to_map();
        assert_eq!(m.lap_count(), 3);
        assert_eq!(m.eval(&qi(0)).unwrap(), qr(3, 2));

        // zeta = -3/2: maximal plateau, constant map.
        let p = StuntedParams::new(g.clone(), vec![qr(-3, 2)]).unwrap();
        assert_eq!(p.plateau(1), (qr(-3, 2), qr(3, 2)));
        let m = p.to_map();
        assert_eq!(m.lap_count(), 1);
        assert_eq!(m.eval(&qi(1)).unwrap(), qr(-3, 2));

        // d=2, zeta = (1/2, -1/2): plateaus touch at -zeta_1/lambda = -1/8.
        let g2 = make_geometry(2, Shape::Plus).unwrap();
        let p = StuntedParams::new(g2.clone(), vec![qr(1, 2), qr(-1, 2)]).unwrap();
        let (_, hi1) = p.plateau(1);
        let (lo2, _) = p.plateau(2);
        assert_eq!(hi1, lo2);
        assert_eq!(hi1, qr(-1, 8));
        assert!(p.touching(1));

        // violated oblique constraint reports the offending index
        let err = StuntedParams::new(g2, vec![qr(-1, 2), qr(1, 4)]).unwrap_err();
        match err {
            CoreError::ConstraintViolation { index, .. } => assert_eq!(index, 1),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn stunted_map_matches_sawtooth_off_plateaus() {
        let g = make_geometry(2, Shape::Plus).unwrap();
        let p = StuntedParams::new(g.clone(), vec![qi(1), qi(2)]).unwrap();
        let m = p.to_map();
        // dense rational sampling
        for k in -64..=64i64 {
            let x = qr(k, 24);
            if x.abs() > g.e {
                continue;
            }
            let inside = (1..=2).any(|i| {
                let (lo, hi) = p.plateau(i);
                x >= lo && x <= hi
            });
            let got = m.eval(&x).unwrap();
            if inside {
                assert!(got == p.eval(&x).unwrap());
            } else {
                assert_eq!(got, g.eval(&x).unwrap());
            }
        }
        for s in m.slopes() {
            assert!(s.is_zero() || s.abs() == g.lambda);
        }
        // fixed-boundary behavior
        let (lo, hi) = m.domain();
        for x in [lo.clone(), hi.clone()] {
            let v = m.eval(&x).unwrap();
            assert!(v == lo || v == hi);
        }
    }

    #[test]
    fn eval_poly_examples() {
        let logistic = family_member("logistic", &[("lambda".to_string(), 4.0)].into()).unwrap();
        assert!((logistic.eval(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(logistic.critical_points.len(), 1);
        assert!((logistic.critical_points[0] - 0.5).abs() < 1e-11);

        // Cubic of the non-monotonicity discussion: f(x) = 2a x^3 - 3a x^2 + b
        // with a = b - 0.515, evaluated on a domain making 0 and 1 interior.
        let b = 0.8;
        let a = b - 0.515;
        let f = PolynomialMap::new(vec![b, 0.0, -3.0 * a, 2.0 * a], (-0.2, 1.05), false).unwrap();
        assert!((f.eval(1.0).unwrap() - 0.515).abs() < 1e-12); // b - a
        assert!((f.eval(0.0).unwrap() - b).abs() < 1e-15);
        assert_eq!(f.modality(), 2);

        let cheb = family_member("chebyshev-3", &BTreeMap::new()).unwrap();
        assert_eq!(cheb.modality(), 2);
        assert!((cheb.eval(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((cheb.critical_points[0] + 0.5).abs() < 1e-10);
        assert!((cheb.critical_points[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn logistic_two_has_attracting_critical_fixed_point() {
        let f = family_member("logistic", &[("lambda".to_string(), 2.0)].into()).unwrap();
        assert_eq!(f.shape, Shape::Plus);
        assert!((f.eval(0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cubic_fig4_family_is_valid_over_sweep() {
        for k in 0..=20 {
            let b = 0.55 + 0.45 * (k as f64) / 20.0;
            let f = family_member("cubic-fig4", &[("b".to_string(), b)].into()).unwrap();
            assert_eq!(f.modality(), 2);
            assert_eq!(f.shape, Shape::Plus);
            assert!(f.anchored);
        }
        // ends of the range are the full cubic Chebyshev map
        let f = family_member("cubic-fig4", &[("b".to_string(), 1.0)].into()).unwrap();
        assert!((f.coeffs[3] - 4.0).abs() < 1e-12);
        assert!((f.coeffs[1] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn stun_interval_flattens() {
        // tent slope 2 on [0,1]
        let tent = PiecewiseAffineMap::new(
            vec![qi(0), qr(1, 2), qi(1)],
            vec![qi(0), qi(1), qi(0)],
        )
        .unwrap();
        let st = tent.stun_interval(&qr(3, 8), &qr(5, 8)).unwrap();
        assert_eq!(st.eval(&qr(1, 2)).unwrap(), qr(3, 4));
        assert_eq!(st.eval(&qr(1, 4)).unwrap(), qr(1, 2));
        assert_eq!(st.lap_count(), 3);
        // degenerate interval -> unchanged
        let same = tent.stun_interval(&qr(1, 2), &qr(1, 2)).unwrap();
        assert_eq!(same, tent);
    }
}
