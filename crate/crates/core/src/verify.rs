//! Seeded property suites behind `cmd_verify` and the acceptance tests:
//! rome identities, entropy monotonicity in zeta, semi-conjugacy residuals,
//! and flow invariants.

use crate::cycles::minimal_cycles;
use crate::deformations::{delta_flow, gamma, hat_delta, hat_delta_flow};
use crate::entropy::{bracket_le, entropy_lap_best, EntropyEstimate};
use crate::maps::{make_geometry, PiecewiseAffineMap, Shape, StuntedParams};
use crate::markov::TransitionGraph;
use crate::rat::{q_to_f64, qi, qr, Q};
use crate::rome::rome_identity_check;
use crate::slope_model::constant_slope_model;
use rand::Rng;
use rand::SeedableRng;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;

/// Outcome of one property suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

/// Random graph on <= 6 vertices with a valid rome (acyclic complement).
fn random_graph_with_rome(rng: &mut ChaCha8Rng) -> (TransitionGraph, Vec<usize>) {
    loop {
        let n = rng.gen_range(2..=6usize);
        let mut matrix = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(0.45) {
                    matrix[i][j] = rng.gen_range(1..=2);
                }
            }
        }
        let r = rng.gen_range(1..=n);
        let mut rome: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            let j = rng.gen_range(0..=k);
            rome.swap(k, j);
        }
        rome.truncate(r);
        rome.sort();
        // acyclic complement?
        let comp: Vec<usize> = (0..n).filter(|v| !rome.contains(v)).collect();
        let mut indeg = vec![0usize; n];
        for &u in &comp {
            for &v in &comp {
                if matrix[u][v] > 0 {
                    indeg[v] += 1;
                }
            }
        }
        let mut queue: Vec<usize> = comp.iter().cloned().filter(|v| indeg[*v] == 0).collect();
        let mut seen = 0;
        let mut indeg2 = indeg.clone();
        while let Some(u) = queue.pop() {
            seen += 1;
            for &v in &comp {
                if matrix[u][v] > 0 {
                    indeg2[v] -= 1;
                    if indeg2[v] == 0 {
                        queue.push(v);
                    }
                }
            }
        }
        if seen != comp.len() {
            continue;
        }
        let pts: Vec<Q> = (0..=n as i64).map(qi).collect();
        let vertices = (0..n).map(|i| (qi(i as i64), qi(i as i64 + 1))).collect();
        return (
            TransitionGraph {
                points: pts,
                vertices,
                matrix,
            },
            rome,
        );
    }
}

/// Rome identity on seeded random graphs at random rational points.
pub fn run_rome_suite(seed: u64, graphs: usize, points: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut failures = Vec::new();
    for g in 0..graphs {
        let (graph, rome) = random_graph_with_rome(&mut rng);
        for p in 0..points {
            let num = rng.gen_range(-40i64..=40).max(1) * if rng.gen_bool(0.5) { -1 } else { 1 };
            let den = rng.gen_range(1i64..=12);
            let x = qr(num, den);
            match rome_identity_check(&graph, &rome, &x) {
                Ok(true) => passed += 1,
                Ok(false) => failures.push(format!("graph {g} point {p}: identity failed")),
                Err(e) => failures.push(format!("graph {g} point {p}: {e}")),
            }
        }
    }
    SuiteReport {
        name: "rome".into(),
        passed,
        total: graphs * points,
        failures,
        notes: vec![],
    }
}

/// Random stunted parameters with small denominators (orbits close fast).
pub fn random_params(rng: &mut ChaCha8Rng, d: usize) -> StuntedParams {
    let g = make_geometry(d, Shape::Plus).unwrap();
    let e = g.e.clone();
    loop {
        let zeta: Vec<Q> = (0..d)
            .map(|_| {
                let den = *[4i64, 6, 8, 12].get(rng.gen_range(0..4)).unwrap();
                let max = (q_to_f64(&e) * den as f64).floor() as i64;
                qr(rng.gen_range(-max..=max), den)
            })
            .collect();
        if let Ok(p) = StuntedParams::new(g.clone(), zeta) {
            return p;
        }
    }
}

/// Entropy monotonicity in zeta (bracket-aware), on seeded random pairs.
pub fn run_monotone_suite(seed: u64, pairs: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut failures = Vec::new();
    for k in 0..pairs {
        let d = rng.gen_range(1..=3usize);
        let lo = random_params(&mut rng, d);
        // raise a random subset of coordinates, staying within constraints
        let mut hi_zeta = lo.zeta.clone();
        for i in 0..d {
            if rng.gen_bool(0.7) {
                let room = &lo.geometry.e - &hi_zeta[i];
                if room > Q::zero() {
                    let num = rng.gen_range(0..=8i64);
                    hi_zeta[i] = &hi_zeta[i] + room * qr(num, 8);
                }
            }
        }
        let hi = StuntedParams::new(lo.geometry.clone(), hi_zeta).expect("raising is safe");
        let ea = entropy_lap_best(&lo.to_map(), 40, 1e-6);
        let eb = entropy_lap_best(&hi.to_map(), 40, 1e-6);
        if bracket_le(&ea, &eb) {
            passed += 1;
        } else {
            failures.push(format!(
                "pair {k}: h({:?}) = {} > h({:?}) = {} beyond brackets",
                lo.zeta, ea.value, hi.zeta, eb.value
            ));
        }
    }
    SuiteReport {
        name: "monotone".into(),
        passed,
        total: pairs,
        failures,
        notes: vec![],
    }
}

/// Semi-conjugacy residuals at truncation N = 40 for seeded maps with
/// certified entropy >= 0.1.
pub fn run_semiconj_suite(seed: u64, count: usize, tol: f64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut found = 0;
    let mut attempts = 0;
    while found < count && attempts < 10_000 {
        attempts += 1;
        let d = rng.gen_range(1..=3usize);
        let p = random_params(&mut rng, d);
        let m = p.to_map();
        let est: EntropyEstimate = entropy_lap_best(&m, 40, 1e-9);
        if est.lower < 0.1 {
            continue;
        }
        found += 1;
        match constant_slope_model(&m, est.value, 40, 200) {
            Ok(model) => {
                if model.residual <= tol {
                    passed += 1;
                } else {
                    failures.push(format!(
                        "map {found} (zeta {:?}): residual {}",
                        p.zeta, model.residual
                    ));
                }
                notes.push(format!(
                    "map {found}: h = {:.6}, residual = {:.3e}",
                    est.value, model.residual
                ));
            }
            Err(e) => failures.push(format!("map {found}: {e}")),
        }
    }
    SuiteReport {
        name: "semiconj".into(),
        passed,
        total: found,
        failures,
        notes,
    }
}

/// Flow invariants: entropy monotone along gamma (up) and delta/hat-delta
/// (down) at sampled times, the exact 3/32 touch event, and the exact
/// hat-delta semigroup identity.
pub fn run_flows_suite(seed: u64, maps: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut total = 0;
    let mut failures = Vec::new();

    // exact event time 3/32 for the d=2 example
    total += 1;
    {
        let g = make_geometry(2, Shape::Plus).unwrap();
        let t = StuntedParams::new(g, vec![qr(1, 2), qr(1, 2)]).unwrap();
        let tr = delta_flow(&t, &qi(1));
        let ok = tr
            .events
            .iter()
            .any(|e| e.kind == crate::deformations::EventKind::Touch && e.time == qr(3, 32));
        if ok {
            passed += 1;
        } else {
            failures.push("d=2 delta touch event not at 3/32".into());
        }
    }

    for k in 0..maps {
        let d = rng.gen_range(1..=3usize);
        let p = random_params(&mut rng, d);

        // gamma nondecreasing, delta and hat-delta nonincreasing at 10 times
        let mut ok = true;
        let mut prev_g: Option<EntropyEstimate> = None;
        let mut prev_d: Option<EntropyEstimate> = None;
        let mut prev_h: Option<EntropyEstimate> = None;
        let dtr = delta_flow(&p, &qi(1));
        let htr = hat_delta_flow(&p, &qi(1));
        for step in 0..=10 {
            let s = qr(step, 10);
            let eg = entropy_lap_best(&gamma(&p, &s).to_map(), 30, 1e-6);
            if let Some(prev) = &prev_g {
                if !bracket_le(prev, &eg) {
                    ok = false;
                    failures.push(format!("map {k}: gamma entropy decreased at t={step}/10"));
                }
            }
            prev_g = Some(eg);
            let zd = dtr.sample(&s);
            let ed = entropy_lap_best(
                &StuntedParams::new(p.geometry.clone(), zd).unwrap().to_map(),
                30,
                1e-6,
            );
            if let Some(prev) = &prev_d {
                if !bracket_le(&ed, prev) {
                    ok = false;
                    failures.push(format!("map {k}: delta entropy increased at t={step}/10"));
                }
            }
            prev_d = Some(ed);
            let zh = htr.sample(&s);
            let eh = entropy_lap_best(
                &StuntedParams::new(p.geometry.clone(), zh).unwrap().to_map(),
                30,
                1e-6,
            );
            if let Some(prev) = &prev_h {
                if !bracket_le(&eh, prev) {
                    ok = false;
                    failures.push(format!(
                        "map {k}: hat-delta entropy increased at t={step}/10"
                    ));
                }
            }
            prev_h = Some(eh);
        }

        // exact semigroup identity for hat-delta
        let t1 = qr(rng.gen_range(1..=8i64), 16);
        let t2 = qr(rng.gen_range(1..=8i64), 16);
        let once = hat_delta(&p, &(&t1 + &t2));
        let twice = hat_delta(&hat_delta(&p, &t2), &t1);
        if once.zeta != twice.zeta {
            ok = false;
            failures.push(format!("map {k}: hat-delta semigroup identity failed"));
        }

        // flow paths satisfy the constraints at sampled times (the
        // constructors check them exactly)
        for step in 0..=10 {
            let s = qr(step, 10);
            let z = htr.sample(&s);
            if StuntedParams::new(p.geometry.clone(), z).is_err() {
                ok = false;
                failures.push(format!("map {k}: hat-delta left the parameter space"));
            }
        }

        total += 1;
        if ok {
            passed += 1;
        }
    }
    SuiteReport {
        name: "flows".into(),
        passed,
        total,
        failures,
        notes: vec![],
    }
}

/// Cycle bound theta^k <= 2^d on seeded constant-slope maps.
pub fn run_cycles_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut total = 0;
    let mut failures = Vec::new();
    let mut made = 0;
    let mut attempts = 0;
    while made < count && attempts < 20_000 {
        attempts += 1;
        // random constant-slope map: tent-like with m laps of slope +-theta
        let m_laps = rng.gen_range(2..=4usize);
        let theta_num = rng.gen_range(11i64..=22);
        let theta = qr(theta_num, 10); // 1.1 .. 2.2
        // breakpoints: random widths summing to 1
        let mut widths: Vec<i64> = (0..m_laps).map(|_| rng.gen_range(1..=6i64)).collect();
        let total_w: i64 = widths.iter().sum();
        let mut xs = vec![qi(0)];
        let mut acc = qi(0);
        for w in &mut widths {
            acc = &acc + qr(*w, total_w);
            xs.push(acc.clone());
        }
        *xs.last_mut().unwrap() = qi(1);
        // values: start somewhere, alternate slopes
        let v0 = qr(rng.gen_range(0..=10i64), 10);
        let mut ys = vec![v0];
        let mut sign = if rng.gen_bool(0.5) { 1i64 } else { -1 };
        let mut valid = true;
        for k in 0..m_laps {
            let dx = &xs[k + 1] - &xs[k];
            let dy = &theta * dx * qi(sign);
            let y = ys.last().unwrap() + dy;
            if y < qi(0) || y > qi(1) {
                valid = false;
                break;
            }
            ys.push(y);
            sign = -sign;
        }
        if !valid {
            continue;
        }
        let Ok(map) = PiecewiseAffineMap::new(xs, ys) else {
            continue;
        };
        if map.interior_turning_points().is_empty() {
            continue;
        }
        made += 1;
        total += 1;
        let d = map.interior_turning_points().len();
        let th = q_to_f64(&theta);
        match minimal_cycles(&map, 400) {
            Ok(dec) => {
                let bound_ok = dec
                    .cycles
                    .iter()
                    .all(|c| th.powi(c.period as i32) <= (2f64).powi(d as i32) + 1e-9);
                if bound_ok {
                    passed += 1;
                } else {
                    failures.push(format!("map {made}: cycle bound violated"));
                }
            }
            Err(e) => failures.push(format!("map {made}: {e}")),
        }
    }
    SuiteReport {
        name: "cycles".into(),
        passed,
        total,
        failures,
        notes: vec![],
    }
}
