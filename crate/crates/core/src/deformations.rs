//! Event-driven parameter deformations on the stunted sawtooth space:
//! entropy-raising gamma/Gamma, entropy-lowering delta/hat-delta with the
//! block sign rules, the monotone-simplex retract, the zero-entropy retract,
//! and the entropy-preserving beta flow.
//!
//! All event times are roots of linear equations with rational coefficients,
//! so traces are exact.

use crate::correspondence::{plateau_periodicity, TriState};
use crate::entropy::{entropy_lap_best, EntropyEstimate};
use crate::error::{CoreError, Result};
use crate::maps::{StuntedParams};
use crate::rat::{fmt_q, qi, qr, Q};
use crate::symbolic::StuntedMap;
use num_traits::{Signed, Zero};

/// Event kinds recorded on a flow trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    ClipAtE,
    Touch,
    SignChange,
    BlockMerge,
    FlowEnd,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ClipAtE => "clip-at-e",
            EventKind::Touch => "touch",
            EventKind::SignChange => "sign-change",
            EventKind::BlockMerge => "block-merge",
            EventKind::FlowEnd => "flow-end",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowEvent {
    pub time: Q,
    pub kind: EventKind,
    pub indices: Vec<usize>,
}

/// Piecewise-linear parameter path with its event log.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub d: usize,
    /// (time, zeta) at flow start, every event, and flow end.
    pub path: Vec<(Q, Vec<Q>)>,
    pub events: Vec<FlowEvent>,
}

impl FlowTrace {
    /// Linear interpolation of the parameter path.
    pub fn sample(&self, t: &Q) -> Vec<Q> {
        if self.path.is_empty() {
            return Vec::new();
        }
        if *t <= self.path[0].0 {
            return self.path[0].1.clone();
        }
        for w in self.path.windows(2) {
            let (t0, z0) = &w[0];
            let (t1, z1) = &w[1];
            if *t <= *t1 {
                if t1 == t0 {
                    continue;
                }
                let s = (t - t0) / (t1 - t0);
                return z0
                    .iter()
                    .zip(z1.iter())
                    .map(|(a, b)| a + (b - a) * &s)
                    .collect();
            }
        }
        self.path.last().unwrap().1.clone()
    }

    pub fn end_params(&self) -> Vec<Q> {
        self.path.last().unwrap().1.clone()
    }

    /// CSV rendering: time, zeta_1..zeta_d, event kind.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for i in 1..=self.d {
            out.push_str(&format!(",zeta_{i}"));
        }
        out.push_str(",event\n");
        for (t, z) in &self.path {
            let kind = self
                .events
                .iter()
                .find(|e| e.time == *t)
                .map(|e| e.kind.as_str())
                .unwrap_or("");
            out.push_str(&fmt_q(t));
            for v in z {
                out.push(',');
                out.push_str(&fmt_q(v));
            }
            out.push(',');
            out.push_str(kind);
            out.push('\n');
        }
        out
    }
}

/// Sign vectors of eq. (7) and (8): sgn is 0 on touching plateaus, 1
/// otherwise; hsgn is 0 on even blocks and alternates +1/-1 inside odd
/// blocks starting at +1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    pub sgn: Vec<i8>,
    pub hsgn: Vec<i8>,
}

/// `signs`: exact touching detection plus block parity.
pub fn signs(t: &StuntedParams) -> SignVector {
    let d = t.geometry.d;
    let blocks = t.blocks();
    let mut sgn = vec![1i8; d];
    let mut hsgn = vec![0i8; d];
    for (a, b) in &blocks {
        let len = b - a + 1;
        for i in *a..=*b {
            sgn[i - 1] = if len == 1 { 1 } else { 0 };
            hsgn[i - 1] = if len % 2 == 0 {
                0
            } else if (i - a) % 2 == 0 {
                1
            } else {
                -1
            };
        }
    }
    SignVector { sgn, hsgn }
}

/// `gamma`: raise all parameters linearly, clipped at e.
pub fn gamma(t: &StuntedParams, time: &Q) -> StuntedParams {
    let e = &t.geometry.e;
    let two_e = qi(2) * e;
    let zeta = t
        .zeta
        .iter()
        .map(|z| {
            let raised = z + &two_e * time;
            if raised > *e {
                e.clone()
            } else {
                raised
            }
        })
        .collect();
    StuntedParams::new(t.geometry.clone(), zeta).expect("gamma preserves the constraints")
}

/// Trace of gamma on [0, t] with exact clip events.
pub fn gamma_trace(t: &StuntedParams, time: &Q) -> FlowTrace {
    let d = t.geometry.d;
    let e = &t.geometry.e;
    let two_e = qi(2) * e;
    let mut events = Vec::new();
    let mut times: Vec<Q> = vec![Q::zero(), time.clone()];
    for (i, z) in t.zeta.iter().enumerate() {
        if z < e {
            let hit = (e - z) / &two_e;
            if hit > Q::zero() && hit < *time {
                events.push(FlowEvent {
                    time: hit.clone(),
                    kind: EventKind::ClipAtE,
                    indices: vec![i + 1],
                });
                times.push(hit);
            }
        }
    }
    times.sort();
    times.dedup();
    events.push(FlowEvent {
        time: time.clone(),
        kind: EventKind::FlowEnd,
        indices: vec![],
    });
    let path = times
        .iter()
        .map(|s| (s.clone(), gamma(t, s).zeta))
        .collect();
    FlowTrace { d, path, events }
}

/// Generic event-driven descent engine shared by delta and hat-delta: each
/// coordinate moves with velocity -2e * sign_i (sign recomputed by
/// `sign_of` at every event), frozen at the +-e boundary it is moving
/// toward. Returns the exact trace on [0, t].
fn descent_flow<F>(t0: &StuntedParams, time: &Q, sign_of: F, merge_kind: EventKind) -> FlowTrace
where
    F: Fn(&StuntedParams) -> Vec<i8>,
{
    let d = t0.geometry.d;
    let e = t0.geometry.e.clone();
    let two_e = qi(2) * &e;
    let mut cur = t0.clone();
    let mut now = Q::zero();
    let mut path = vec![(Q::zero(), cur.zeta.clone())];
    let mut events: Vec<FlowEvent> = Vec::new();
    let guard = 16 * d + 16;
    for _ in 0..guard {
        if now >= *time {
            break;
        }
        let s = sign_of(&cur);
        // velocities, frozen at the boundary being approached
        let vel: Vec<Q> = (0..d)
            .map(|i| {
                let v = -&two_e * qi(s[i] as i64);
                if (v.is_negative() && cur.zeta[i] <= -e.clone())
                    || (v.is_positive() && cur.zeta[i] >= e)
                {
                    Q::zero()
                } else {
                    v
                }
            })
            .collect();
        if vel.iter().all(|v| v.is_zero()) {
            break;
        }
        // next event: boundary hit or an untouched pair becoming touching
        let mut next: Option<(Q, EventKind, Vec<usize>)> = None;
        let mut consider = |dt: Q, kind: EventKind, idx: Vec<usize>| {
            if dt <= Q::zero() {
                return;
            }
            match &next {
                Some((best, _, _)) if *best <= dt => {}
                _ => next = Some((dt, kind, idx)),
            }
        };
        for i in 0..d {
            if vel[i].is_negative() {
                consider(
                    (&cur.zeta[i] + &e) / &two_e,
                    EventKind::ClipAtE,
                    vec![i + 1],
                );
            } else if vel[i].is_positive() {
                consider((&e - &cur.zeta[i]) / &two_e, EventKind::ClipAtE, vec![i + 1]);
            }
        }
        for i in 0..d.saturating_sub(1) {
            let sum = &cur.zeta[i] + &cur.zeta[i + 1];
            let rate = &vel[i] + &vel[i + 1];
            if sum.is_positive() && rate.is_negative() {
                consider(sum / -rate, merge_kind, vec![i + 1, i + 2]);
            }
        }
        let remaining = time - &now;
        let (dt, kind, idx) = match next {
            Some((dt, kind, idx)) if dt <= remaining => (dt, Some(kind), idx),
            _ => (remaining, None, vec![]),
        };
        let zeta: Vec<Q> = cur
            .zeta
            .iter()
            .zip(vel.iter())
            .map(|(z, v)| z + v * &dt)
            .collect();
        now = &now + &dt;
        cur = StuntedParams::new(cur.geometry.clone(), zeta)
            .expect("descent preserves the constraints");
        path.push((now.clone(), cur.zeta.clone()));
        if let Some(kind) = kind {
            events.push(FlowEvent {
                time: now.clone(),
                kind,
                indices: idx,
            });
        } else {
            break;
        }
    }
    if path.last().map(|(s, _)| s.clone()) != Some(time.clone()) {
        path.push((time.clone(), cur.zeta.clone()));
    }
    events.push(FlowEvent {
        time: time.clone(),
        kind: EventKind::FlowEnd,
        indices: vec![],
    });
    FlowTrace { d, path, events }
}

/// `delta_flow`: isolated plateaus descend until they touch or clip.
pub fn delta_flow(t: &StuntedParams, time: &Q) -> FlowTrace {
    descent_flow(t, time, |p| signs(p).sgn, EventKind::Touch)
}

/// `hat_delta_flow`: odd blocks keep moving with alternating signs; block
/// collisions recompute the signs.
pub fn hat_delta_flow(t: &StuntedParams, time: &Q) -> FlowTrace {
    descent_flow(t, time, |p| signs(p).hsgn, EventKind::BlockMerge)
}

pub fn delta(t: &StuntedParams, time: &Q) -> StuntedParams {
    let tr = delta_flow(t, time);
    StuntedParams::new(t.geometry.clone(), tr.end_params()).unwrap()
}

pub fn hat_delta(t: &StuntedParams, time: &Q) -> StuntedParams {
    let tr = hat_delta_flow(t, time);
    StuntedParams::new(t.geometry.clone(), tr.end_params()).unwrap()
}

/// Membership in the monotone simplex Sigma^d: for odd d the single
/// constant map (alternating +-e), for even d the monotone maps (touching
/// pairs (2k-1, 2k) with nondecreasing levels).
pub fn in_sigma(t: &StuntedParams) -> bool {
    let d = t.geometry.d;
    if d % 2 == 1 {
        (0..d).all(|i| {
            let expect = if i % 2 == 0 {
                -t.geometry.e.clone()
            } else {
                t.geometry.e.clone()
            };
            t.zeta[i] == expect
        })
    } else {
        (0..d / 2).all(|k| (&t.zeta[2 * k] + &t.zeta[2 * k + 1]).is_zero())
    }
}

/// Canonical endpoint T_0 of the retract: the barycenter of Sigma^d (the
/// constant map for odd d).
pub fn sigma_barycenter(geometry: &crate::maps::SawtoothGeometry) -> StuntedParams {
    let d = geometry.d;
    let e = &geometry.e;
    let mut zeta = Vec::with_capacity(d);
    if d % 2 == 1 {
        for i in 0..d {
            zeta.push(if i % 2 == 0 { -e.clone() } else { e.clone() });
        }
    } else {
        let m = d / 2;
        for k in 0..m {
            // evenly spaced increasing levels in (-e, e)
            let level = -e + qi(2) * e * qr(k as i64 + 1, m as i64 + 1);
            zeta.push(level.clone());
            zeta.push(-level);
        }
    }
    StuntedParams::new(geometry.clone(), zeta).expect("barycenter is valid")
}

/// `sigma_retract`: linear interpolation inside Sigma^d toward the
/// barycenter; r_0 = id, r_1 = T_0.
pub fn sigma_retract(t: &StuntedParams, time: &Q) -> Result<StuntedParams> {
    if !in_sigma(t) {
        return Err(CoreError::NotInSigma(
            "map is not monotone (touching pattern) or not the constant map".into(),
        ));
    }
    let t0 = sigma_barycenter(&t.geometry);
    let s = time.clone().min(qi(1)).max(qi(0));
    let zeta = t
        .zeta
        .iter()
        .zip(t0.zeta.iter())
        .map(|(a, b)| a + (b - a) * &s)
        .collect();
    StuntedParams::new(t.geometry.clone(), zeta)
}

/// `retract_zero`: hat-delta for t in [0, 1/2], then the simplex retract of
/// hat_delta_1 for t in [1/2, 1]. Requires a certified zero-entropy bracket
/// and a not-certified-degenerate map.
pub fn retract_zero(t: &StuntedParams, time: &Q, tol: f64, budget: usize) -> Result<StuntedParams> {
    let est: EntropyEstimate = entropy_lap_best(&t.to_map(), 40, tol);
    if est.upper > tol {
        return Err(CoreError::InvalidParameter(format!(
            "retract_zero requires certified entropy <= {tol}, bracket [{}, {}]",
            est.lower, est.upper
        )));
    }
    let sm = StuntedMap::new(t.clone());
    if crate::correspondence::is_nondegenerate(&sm, budget) == TriState::No {
        return Err(CoreError::InvalidParameter(
            "retract_zero requires a non-degenerate map".into(),
        ));
    }
    if *time <= qr(1, 2) {
        Ok(hat_delta(t, &(qi(2) * time)))
    } else {
        let base = hat_delta(t, &qi(1));
        sigma_retract(&base, &(qi(2) * time - qi(1)))
    }
}

/// Observed plateau periods along a parameter path (diagnostics for the
/// zero-entropy retract: periods are powers of two).
pub fn observed_plateau_periods(t: &StuntedParams, budget: usize) -> Vec<Option<usize>> {
    let sm = StuntedMap::new(t.clone());
    let d = t.geometry.d;
    let (periodic, _, _) = plateau_periodicity(&sm, budget);
    let mut out = vec![None; d];
    for i in 1..=d {
        if !periodic[i - 1] {
            continue;
        }
        // length of the index cycle through i
        let mut steps = 0usize;
        let mut cur = t.plateau_value(i);
        let mut period = None;
        for s in 1..=budget {
            // follow the value orbit until it re-enters plateau i
            let mut inside = None;
            for j in 1..=d {
                let (lo, hi) = t.plateau(j);
                if cur >= lo && cur <= hi {
                    inside = Some(j);
                    break;
                }
            }
            if let Some(j) = inside {
                if j == i {
                    period = Some(s + steps);
                    break;
                }
                cur = t.plateau_value(j);
                steps += 0;
            } else {
                cur = match sm.pl.eval(&cur) {
                    Ok(v) => v,
                    Err(_) => break,
                };
            }
            if s == budget {
                break;
            }
        }
        out[i - 1] = period;
    }
    out
}

/// `Gamma`: push entropy up to the target level h0 and stop at the last
/// parameter time where it still equals h0 (bisection with entropy
/// brackets). Returns gamma_{t * t_max}(T).
pub fn big_gamma(t: &StuntedParams, time: &Q, h0: f64, tol: f64) -> Result<StuntedParams> {
    let est = entropy_lap_best(&t.to_map(), 40, tol.min(1e-6));
    if est.lower > h0 + tol {
        return Err(CoreError::EntropyAboveTarget {
            lower: est.lower,
            upper: est.upper,
            h0,
        });
    }
    // Decide h(gamma_s(T)) > h0 with increasing census depth; undecidable
    // within the cap counts as "not above" (the bisection then returns a
    // tolerance-qualified t_max).
    let above = |s: &Q| -> bool {
        let m = gamma(t, s).to_map();
        for depth in [40usize, 80, 160] {
            let est = entropy_lap_best(&m, depth, tol.min(1e-9));
            if est.lower > h0 + 1e-12 {
                return true;
            }
            if est.upper <= h0 + 1e-12 {
                return false;
            }
        }
        false
    };
    // t_max in [0, 1]: h(gamma_s) is nondecreasing in s and gamma saturates
    // at s = 1.
    let mut lo = Q::zero();
    let mut hi = qi(1);
    if above(&lo) {
        // already at the target level within tolerance: t_max = 0
        hi = Q::zero();
    } else if !above(&hi) {
        lo = qi(1);
    }
    let resolution = qr(1, 1 << 20);
    while (&hi - &lo) > resolution {
        let mid = (&lo + &hi) / qi(2);
        if above(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(gamma(t, &(time * &lo)))
}

/// State of the beta flow's first-entry structure.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BetaSets {
    /// i in I(T): hull [Z_i, Z_{i+1}] is in a first-entry domain (i is
    /// 1-based, i ranges over 1..d).
    i_set: Vec<usize>,
    /// subset landing in the interior of the target plateau
    io_set: Vec<usize>,
    /// first-entry times n_i for members of I
    entry: Vec<(usize, usize, usize)>, // (i, n_i, target plateau)
}

fn beta_sets(t: &StuntedParams, budget: usize) -> Result<BetaSets> {
    let sm = StuntedMap::new(t.clone());
    let d = t.geometry.d;
    let (periodic, _, unknown) = plateau_periodicity(&sm, budget);
    if unknown.iter().any(|u| *u) {
        return Err(CoreError::UnknownStructure(
            "plateau periodicity undecided within budget".into(),
        ));
    }
    let mut i_set = Vec::new();
    let mut io_set = Vec::new();
    let mut entry = Vec::new();
    for i in 1..d {
        // hull of Z_i and Z_{i+1}
        let (lo, _) = t.plateau(i);
        let (_, hi) = t.plateau(i + 1);
        let (mut a, mut b) = (lo, hi);
        let mut last_qualified: Option<(usize, usize, bool)> = None; // (n, target, interior)
        let mut touched = vec![false; d]; // plateaus already intersected
        let mut seen = std::collections::BTreeSet::new();
        let mut decided = false;
        // s = 0 state: condition 3 stops the scan as soon as T^s(hull)
        // meets a periodic plateau (entries recorded earlier stay valid:
        // their n satisfies n <= s and condition 3 quantifies over s' < n).
        'scan: for s in 0..=budget {
            if !seen.insert((a.clone(), b.clone())) {
                decided = true;
                break;
            }
            if s > 0 {
                // entry check at n = s: containment in a single plateau
                // that was never intersected before (condition 2)
                for j in 1..=d {
                    let (plo, phi) = t.plateau(j);
                    if a >= plo && b <= phi && !touched[j - 1] {
                        let interior = a > plo && b < phi;
                        last_qualified = Some((s, j, interior));
                        break;
                    }
                }
            }
            // Record intersections; condition 3 stops the scan at the first
            // touch of a periodic plateau (an entry recorded at this very
            // step stays valid since condition 3 quantifies over s' < n).
            for j in 1..=d {
                let (plo, phi) = t.plateau(j);
                if a <= phi && b >= plo {
                    if periodic[j - 1] {
                        decided = true;
                        break 'scan;
                    }
                    touched[j - 1] = true;
                }
            }
            if s == budget {
                break;
            }
            let (na, nb) = sm.pl.image_of_interval(&a, &b)?;
            a = na;
            b = nb;
        }
        if !decided && last_qualified.is_none() {
            return Err(CoreError::UnknownStructure(format!(
                "hull of plateaus {} and {} undecided within budget",
                i,
                i + 1
            )));
        }
        if let Some((n, j, interior)) = last_qualified {
            i_set.push(i);
            entry.push((i, n, j));
            if interior {
                io_set.push(i);
            }
        }
    }
    Ok(BetaSets {
        i_set,
        io_set,
        entry,
    })
}

/// `beta_flow`: raise zeta_j at rate 2e exactly when j or j-1 lies in
/// I^o(T); recompute the sets at each event. The paper's counting caps the
/// number of regime changes at 2d.
pub fn beta_flow(t: &StuntedParams, time: &Q, budget: usize) -> Result<FlowTrace> {
    let d = t.geometry.d;
    let e = t.geometry.e.clone();
    let two_e = qi(2) * &e;
    let mut cur = t.clone();
    let mut now = Q::zero();
    let mut path = vec![(Q::zero(), cur.zeta.clone())];
    let mut events: Vec<FlowEvent> = Vec::new();
    let mut regime_changes = 0usize;
    let mut last_io: Option<Vec<usize>> = None;
    let guard = 64 * (d + 1);
    for _ in 0..guard {
        if now >= *time {
            break;
        }
        let sets = beta_sets(&cur, budget)?;
        if let Some(prev) = &last_io {
            if *prev != sets.io_set {
                regime_changes += 1;
                if regime_changes > 2 * d {
                    return Err(CoreError::UnknownStructure(
                        "beta flow exceeded the 2d regime-change cap (internal error)".into(),
                    ));
                }
                events.push(FlowEvent {
                    time: now.clone(),
                    kind: EventKind::SignChange,
                    indices: sets.io_set.clone(),
                });
            }
        }
        last_io = Some(sets.io_set.clone());
        if sets.io_set.is_empty() {
            break; // stationary (eq. (11) everywhere)
        }
        // moving coordinates
        let mut moving = vec![false; d];
        for &i in &sets.io_set {
            moving[i - 1] = true;
            moving[i] = true; // j = i+1 (0-based i is i-1)
        }
        let vel: Vec<Q> = (0..d)
            .map(|j| {
                if moving[j] && cur.zeta[j] < e {
                    two_e.clone()
                } else {
                    Q::zero()
                }
            })
            .collect();
        if vel.iter().all(|v| v.is_zero()) {
            break;
        }
        // next micro-event: the structural data are piecewise linear in t;
        // advance in small exact steps until something changes. Candidate
        // times: clip at e, and the first change of the entry containment,
        // found by exact bisection over rationals on the predicate "the
        // beta sets changed" (the change is a root of a linear equation, so
        // the bisection terminates at an exact dyadic rational multiple).
        let mut dt_candidates: Vec<Q> = Vec::new();
        for j in 0..d {
            if vel[j].is_positive() {
                dt_candidates.push((&e - &cur.zeta[j]) / &two_e);
            }
        }
        dt_candidates.push(time - &now);
        // entry-interval exit times: endpoints of T^{n_i}(hull) move outward
        // at known linear speeds; compute the exact crossing against the
        // (also linear) plateau edges by direct evaluation of the affine
        // motions.
        if let Some(dt) = beta_next_structural_change(&cur, &sets, &vel, &two_e) {
            dt_candidates.push(dt);
        }
        let dt = dt_candidates
            .into_iter()
            .filter(|q| q.is_positive())
            .min()
            .unwrap_or_else(|| time - &now);
        let zeta: Vec<Q> = cur
            .zeta
            .iter()
            .zip(vel.iter())
            .map(|(z, v)| {
                let raised = z + v * &dt;
                if raised > e {
                    e.clone()
                } else {
                    raised
                }
            })
            .collect();
        now = &now + &dt;
        cur = StuntedParams::new(cur.geometry.clone(), zeta)?;
        path.push((now.clone(), cur.zeta.clone()));
    }
    if path.last().map(|(s, _)| s.clone()) != Some(time.clone()) {
        path.push((time.clone(), cur.zeta.clone()));
    }
    events.push(FlowEvent {
        time: time.clone(),
        kind: EventKind::FlowEnd,
        indices: vec![],
    });
    Ok(FlowTrace { d, path, events })
}

/// Exact first time at which the first-entry image of some hull in I^o
/// meets the boundary of its target plateau, assuming the current velocity
/// field. The image endpoints and the plateau edges are affine in t, so the
/// crossing is the root of a linear equation; it is found by interval
/// refinement on exact rationals against the (recomputable) predicate.
fn beta_next_structural_change(
    cur: &StuntedParams,
    sets: &BetaSets,
    vel: &[Q],
    _two_e: &Q,
) -> Option<Q> {
    // Conservative exact step: advance to the first dyadic time where the
    // containment predicate changes, by bisection between "still inside"
    // and "outside", starting from an upper bound where the structure has
    // certainly changed. The predicate is monotone (Claim 2: endpoints move
    // outward at speed >= 2e while plateau edges move at most 2e/lambda).
    let probe = |dt: &Q| -> bool {
        // true when every I^o entry is still strictly interior after dt
        let zeta: Vec<Q> = cur
            .zeta
            .iter()
            .zip(vel.iter())
            .map(|(z, v)| {
                let raised = z + v * dt;
                let e = &cur.geometry.e;
                if raised > *e {
                    e.clone()
                } else {
                    raised
                }
            })
            .collect();
        let Ok(p) = StuntedParams::new(cur.geometry.clone(), zeta) else {
            return false;
        };
        let sm = StuntedMap::new(p.clone());
        for (i, n, j) in &sets.entry {
            if !sets.io_set.contains(i) {
                continue;
            }
            let (lo, _) = p.plateau(*i);
            let (_, hi) = p.plateau(*i + 1);
            let (mut a, mut b) = (lo, hi);
            for _ in 0..*n {
                match sm.pl.image_of_interval(&a, &b) {
                    Ok((na, nb)) => {
                        a = na;
                        b = nb;
                    }
                    Err(_) => return false,
                }
            }
            let (plo, phi) = p.plateau(*j);
            if !(a > plo && b < phi) {
                return false;
            }
        }
        true
    };
    if !probe(&Q::zero()) {
        return None;
    }
    // exponential search for an upper bound
    let mut hi = qr(1, 1024);
    let mut found = false;
    for _ in 0..24 {
        if !probe(&hi) {
            found = true;
            break;
        }
        hi = &hi * qi(2);
    }
    if !found {
        return None;
    }
    let mut lo = Q::zero();
    for _ in 0..80 {
        let mid = (&lo + &hi) / qi(2);
        if probe(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Snap to the exact linear root: endpoints move at +-lambda^k-combined
    // rational speeds, so the root is rational with a moderate denominator.
    // Reconstruct it from the bisection bracket by rational reconstruction
    // on the affine motion: evaluate the signed distances at two times and
    // interpolate exactly.
    let d0 = beta_signed_gap(cur, sets, vel, &lo);
    let d1 = beta_signed_gap(cur, sets, vel, &hi);
    match (d0, d1) {
        (Some(g0), Some(g1)) if g0 != g1 => {
            // root of the affine function through (lo, g0), (hi, g1)
            let root = &lo - &g0 * (&hi - &lo) / (&g1 - &g0);
            if root >= lo && root <= hi {
                Some(root)
            } else {
                Some(hi)
            }
        }
        _ => Some(hi),
    }
}

/// Minimal signed distance from the entry images to their target plateau
/// boundaries at time dt (affine in dt within a regime).
fn beta_signed_gap(cur: &StuntedParams, sets: &BetaSets, vel: &[Q], dt: &Q) -> Option<Q> {
    let e = &cur.geometry.e;
    let zeta: Vec<Q> = cur
        .zeta
        .iter()
        .zip(vel.iter())
        .map(|(z, v)| {
            let raised = z + v * dt;
            if raised > *e {
                e.clone()
            } else {
                raised
            }
        })
        .collect();
    let p = StuntedParams::new(cur.geometry.clone(), zeta).ok()?;
    let sm = StuntedMap::new(p.clone());
    let mut best: Option<Q> = None;
    for (i, n, j) in &sets.entry {
        if !sets.io_set.contains(i) {
            continue;
        }
        let (lo, _) = p.plateau(*i);
        let (_, hi) = p.plateau(*i + 1);
        let (mut a, mut b) = (lo, hi);
        for _ in 0..*n {
            let (na, nb) = sm.pl.image_of_interval(&a, &b).ok()?;
            a = na;
            b = nb;
        }
        let (plo, phi) = p.plateau(*j);
        let gap = (&a - &plo).min(&phi - &b);
        best = Some(match best {
            None => gap,
            Some(g) => g.min(gap),
        });
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_geometry, Shape};

    fn params(d: usize, zeta: Vec<Q>) -> StuntedParams {
        let g = make_geometry(d, Shape::Plus).unwrap();
        StuntedParams::new(g, zeta).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let t = params(1, vec![qi(0)]);
        assert_eq!(gamma(&t, &qr(1, 4)).zeta, vec![qr(3, 4)]);
        assert_eq!(gamma(&t, &qi(0)).zeta, t.zeta);
        assert_eq!(gamma(&t, &qi(2)).zeta, vec![qr(3, 2)]);
        let tr = gamma_trace(&t, &qi(0));
        assert_eq!(tr.path.len(), 1);
    }

    #[test]
    fn signs_examples() {
        // isolated plateau
        let t = params(1, vec![qr(3, 4)]);
        let s = signs(&t);
        assert_eq!(s.sgn, vec![1]);
        assert_eq!(s.hsgn, vec![1]);

        // 2-block
        let t = params(2, vec![qr(1, 2), qr(-1, 2)]);
        let s = signs(&t);
        assert_eq!(s.sgn, vec![0, 0]);
        assert_eq!(s.hsgn, vec![0, 0]);

        // 3-block
        let t = params(3, vec![qr(1, 2), qr(-1, 2), qr(1, 2)]);
        let s = signs(&t);
        assert_eq!(s.sgn, vec![0, 0, 0]);
        assert_eq!(s.hsgn, vec![1, -1, 1]);
    }

    #[test]
    fn delta_touch_event_at_3_32() {
        let t = params(2, vec![qr(1, 2), qr(1, 2)]);
        let tr = delta_flow(&t, &qi(1));
        let touch = tr
            .events
            .iter()
            .find(|e| e.kind == EventKind::Touch)
            .expect("touch event");
        assert_eq!(touch.time, qr(3, 32));
        // frozen thereafter
        let z = tr.sample(&qr(1, 2));
        assert_eq!(&z[0] + &z[1], qi(0));
        let z_end = tr.end_params();
        assert_eq!(z, z_end);
    }

    #[test]
    fn delta_clip_event_for_single_plateau() {
        let t = params(1, vec![qr(3, 4)]);
        let tr = delta_flow(&t, &qi(1));
        let clip = tr
            .events
            .iter()
            .find(|e| e.kind == EventKind::ClipAtE)
            .expect("clip event");
        assert_eq!(clip.time, qr(3, 4)); // (3/4 + 3/2) / 3
        assert_eq!(tr.end_params(), vec![qr(-3, 2)]);
    }

    #[test]
    fn already_touching_pair_is_stationary_under_delta() {
        let t = params(2, vec![qr(1, 2), qr(-1, 2)]);
        let tr = delta_flow(&t, &qi(1));
        assert_eq!(tr.end_params(), t.zeta);
    }

    #[test]
    fn hat_delta_reaches_sigma() {
        // odd d: constant map
        let t = params(1, vec![qr(3, 4)]);
        let out = hat_delta(&t, &qi(1));
        assert_eq!(out.zeta, vec![qr(-3, 2)]);
        assert!(in_sigma(&out));

        // even d: monotone map
        let t = params(2, vec![qr(5, 2), qr(1, 3)]);
        let out = hat_delta(&t, &qi(1));
        assert!(in_sigma(&out), "zeta = {:?}", out.zeta);

        // 3-block: middle rises while outer fall, touching preserved
        let t = params(3, vec![qr(1, 2), qr(-1, 2), qr(1, 2)]);
        let short = hat_delta(&t, &qr(1, 100));
        assert!(short.touching(1) && short.touching(2));
        assert!(short.zeta[0] < t.zeta[0]);
        assert!(short.zeta[1] > t.zeta[1]);
    }

    #[test]
    fn hat_delta_semigroup_exact() {
        let t = params(2, vec![qr(5, 2), qr(1, 3)]);
        let t1 = qr(1, 7);
        let t2 = qr(2, 9);
        let once = hat_delta(&t, &(&t1 + &t2));
        let twice = hat_delta(&hat_delta(&t, &t2), &t1);
        assert_eq!(once.zeta, twice.zeta);
    }

    #[test]
    fn sigma_retract_examples() {
        // odd d: singleton
        let g = make_geometry(1, Shape::Plus).unwrap();
        let t0 = sigma_barycenter(&g);
        let r = sigma_retract(&t0, &qr(1, 2)).unwrap();
        assert_eq!(r.zeta, t0.zeta);

        // even d: midpoint parameters stay in the simplex
        let t = params(2, vec![qi(1), qi(-1)]);
        assert!(in_sigma(&t));
        let mid = sigma_retract(&t, &qr(1, 2)).unwrap();
        assert!(in_sigma(&mid));
        let end = sigma_retract(&t, &qi(1)).unwrap();
        assert_eq!(end.zeta, sigma_barycenter(&t.geometry).zeta);

        // non-monotone map rejected
        let bad = params(2, vec![qi(1), qi(1)]);
        assert!(matches!(
            sigma_retract(&bad, &qr(1, 2)),
            Err(CoreError::NotInSigma(_))
        ));
    }

    #[test]
    fn retract_zero_composition() {
        // d=1, zeta = 3/4 has entropy 0: hat-delta path to the constant map.
        let t = params(1, vec![qr(3, 4)]);
        let quarter = retract_zero(&t, &qr(1, 4), 1e-9, 2000).unwrap();
        assert_eq!(quarter.zeta, vec![qr(3, 4) - qi(3) * qr(1, 2)]);
        let end = retract_zero(&t, &qi(1), 1e-9, 2000).unwrap();
        assert_eq!(end.zeta, vec![qr(-3, 2)]);
        // positive entropy rejected
        let full = params(1, vec![qr(3, 2)]);
        assert!(retract_zero(&full, &qr(1, 2), 1e-9, 2000).is_err());
    }

    #[test]
    fn period_halving_observed_for_period_two_plateau() {
        // zeta = 6/5: the plateau maps onto the period-2 orbit through its
        // own boundary.
        let t = params(1, vec![qr(6, 5)]);
        let periods = observed_plateau_periods(&t, 2000);
        assert_eq!(periods, vec![Some(2)]);
        // after enough hat-delta time the plateau becomes fixed (period 1)
        let later = hat_delta(&t, &qr(1, 4));
        let periods = observed_plateau_periods(&later, 2000);
        assert_eq!(periods, vec![Some(1)]);
    }

    #[test]
    fn big_gamma_examples() {
        // d=1, h0 = log 2, start at zeta = 0: Gamma_1 = (e).
        let t = params(1, vec![qi(0)]);
        let out = big_gamma(&t, &qi(1), 2f64.ln(), 1e-6).unwrap();
        assert_eq!(out.zeta, vec![qr(3, 2)]);
        // t = 0 is the identity
        let out = big_gamma(&t, &qi(0), 2f64.ln(), 1e-6).unwrap();
        assert_eq!(out.zeta, t.zeta);
        // target below current entropy is rejected
        let full = params(1, vec![qr(3, 2)]);
        assert!(matches!(
            big_gamma(&full, &qi(1), 0.1, 1e-6),
            Err(CoreError::EntropyAboveTarget { .. })
        ));
    }

    #[test]
    fn beta_flow_identity_when_io_empty() {
        let t = params(2, vec![qr(8, 3), qr(8, 3)]);
        let tr = beta_flow(&t, &qi(1), 2000).unwrap();
        assert_eq!(tr.end_params(), t.zeta);
    }

    #[test]
    fn beta_flow_raises_pair_until_boundary_event() {
        // d=3 fixture: hull [Z_2, Z_3] lands in int Z_1 after one step; the
        // image [-zeta_2, zeta_3] expands at speed 2e on both sides while
        // Z_1 is static. The right gap closes first, at
        // (Z_1.hi - zeta_3)/2e = (-5/6 + 3/2)/(15/2) = 4/45.
        let t = params(3, vec![qr(-5, 6), qi(2), qr(-3, 2)]);
        let tr = beta_flow(&t, &qr(1, 2), 4000).unwrap();
        // zeta_2 and zeta_3 rose, zeta_1 untouched
        let end = tr.end_params();
        assert_eq!(end[0], qr(-5, 6));
        assert!(end[1] > qi(2));
        assert!(end[2] > qr(-3, 2));
        // the flow froze after the structural event: final values constant
        let late = tr.sample(&qr(2, 5));
        assert_eq!(late, end);
    }
}
