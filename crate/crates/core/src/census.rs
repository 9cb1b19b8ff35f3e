//! Exact lap-number census of piecewise-affine maps.
//!
//! Pieces of the n-th iterate are obtained by pulling the breakpoints of T
//! back through monotone pieces. Two observations make this fast:
//!
//! * a piece of T^n is determined, for counting purposes, by the *image*
//!   interval of T^n on it, so pieces sharing an image can be aggregated
//!   with multiplicities;
//! * every image endpoint is a forward iterate of a breakpoint value of T,
//!   so the set of distinct image intervals grows polynomially even when the
//!   piece count grows exponentially.
//!
//! The resulting structure is a directed multigraph on image intervals (a
//! Hofbauer-style tower). When the reachable part of the graph is finite the
//! census closes and the growth rate is the Perron eigenvalue of an integer
//! matrix; otherwise the level counts still give certified upper bounds and
//! any fully-expanded subgraph gives certified lower bounds.

use crate::error::{CoreError, Result};
use crate::maps::PiecewiseAffineMap;
use crate::rat::Q;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Exact lap counts l(T^1), ..., l(T^n). Constant pieces count as laps.
#[derive(Debug, Clone)]
pub struct LapCensus {
    pub counts: Vec<BigUint>,
    pub depth: usize,
}

#[derive(Debug, Clone)]
struct Expansion {
    /// Child vertex ids of monotone sub-pieces (with repetition).
    mono: Vec<usize>,
    /// Number of constant sub-pieces produced.
    consts: u64,
}

/// Tower of image intervals for one fixed map, with memoized expansions.
pub struct CensusEngine {
    map: PiecewiseAffineMap,
    index: BTreeMap<(Q, Q), usize>,
    intervals: Vec<(Q, Q)>,
    expansions: Vec<Option<Expansion>>,
}

/// Count state at one census level.
#[derive(Debug, Clone)]
pub struct CensusState {
    /// vertex id -> multiplicity of monotone pieces with that image.
    pub mono: BTreeMap<usize, BigUint>,
    /// total number of constant pieces.
    pub consts: BigUint,
}

impl CensusState {
    pub fn total(&self) -> BigUint {
        let mut t = self.consts.clone();
        for v in self.mono.values() {
            t += v;
        }
        t
    }
}

impl CensusEngine {
    pub fn new(map: &PiecewiseAffineMap) -> Self {
        CensusEngine {
            map: map.clone(),
            index: BTreeMap::new(),
            intervals: Vec::new(),
            expansions: Vec::new(),
        }
    }

    pub fn map(&self) -> &PiecewiseAffineMap {
        &self.map
    }

    pub fn node_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, id: usize) -> &(Q, Q) {
        &self.intervals[id]
    }

    pub fn is_expanded(&self, id: usize) -> bool {
        self.expansions[id].is_some()
    }

    fn vertex(&mut self, lo: Q, hi: Q) -> usize {
        debug_assert!(lo < hi);
        let key = (lo, hi);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.intervals.len();
        self.index.insert(key.clone(), id);
        self.intervals.push(key);
        self.expansions.push(None);
        id
    }

    /// Children of an image interval: split at interior breakpoints of T and
    /// push each sub-piece through its lap.
    fn expand(&mut self, id: usize) {
        if self.expansions[id].is_some() {
            return;
        }
        let (a, b) = self.intervals[id].clone();
        let xs: Vec<Q> = self.map.breakpoints().to_vec();
        let mut cuts: Vec<Q> = vec![a.clone()];
        for x in &xs {
            if *x > a && *x < b {
                cuts.push(x.clone());
            }
        }
        cuts.push(b.clone());
        let mut mono = Vec::new();
        let mut consts = 0u64;
        for w in cuts.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            // The sub-piece [p, q] lies inside a single lap of T.
            let vp = self.map.eval(p).expect("image interval inside domain");
            let vq = self.map.eval(q).expect("image interval inside domain");
            if vp == vq {
                consts += 1;
            } else {
                let (lo, hi) = if vp < vq { (vp, vq) } else { (vq, vp) };
                let child = self.vertex(lo, hi);
                mono.push(child);
            }
        }
        self.expansions[id] = Some(Expansion { mono, consts });
    }

    /// Level-1 state for the full map.
    pub fn initial_state(&mut self) -> CensusState {
        let (lo, hi) = self.map.domain();
        self.initial_state_on(&lo, &hi)
    }

    /// Level-1 state for the restriction T|[u, v] (laps of T clipped to the
    /// interval; used by the constant-slope model's generating functions).
    pub fn initial_state_on(&mut self, u: &Q, v: &Q) -> CensusState {
        let mut mono: BTreeMap<usize, BigUint> = BTreeMap::new();
        let mut consts = BigUint::zero();
        if u >= v {
            // Degenerate restriction: a single constant piece.
            consts += 1u32;
            return CensusState { mono, consts };
        }
        let xs: Vec<Q> = self.map.breakpoints().to_vec();
        let mut cuts = vec![u.clone()];
        for x in &xs {
            if *x > *u && *x < *v {
                cuts.push(x.clone());
            }
        }
        cuts.push(v.clone());
        for w in cuts.windows(2) {
            let vp = self.map.eval(&w[0]).unwrap();
            let vq = self.map.eval(&w[1]).unwrap();
            if vp == vq {
                consts += 1u32;
            } else {
                let (lo, hi) = if vp < vq { (vp, vq) } else { (vq, vp) };
                let id = self.vertex(lo, hi);
                *mono.entry(id).or_insert_with(BigUint::zero) += 1u32;
            }
        }
        CensusState { mono, consts }
    }

    /// One census step: refine every piece by the breakpoints of T.
    pub fn step(&mut self, state: &CensusState) -> CensusState {
        let mut mono: BTreeMap<usize, BigUint> = BTreeMap::new();
        let mut consts = state.consts.clone();
        let ids: Vec<usize> = state.mono.keys().cloned().collect();
        for id in ids {
            self.expand(id);
        }
        for (id, count) in &state.mono {
            let exp = self.expansions[*id].as_ref().unwrap().clone();
            for child in exp.mono {
                *mono.entry(child).or_insert_with(BigUint::zero) += count;
            }
            consts += count * BigUint::from(exp.consts);
        }
        CensusState { mono, consts }
    }

    /// Breadth-first expansion of every discovered vertex. Returns true when
    /// the reachable graph is finite and fully expanded (the census
    /// "closes"), false when `max_nodes` was hit first.
    pub fn close_graph(&mut self, seeds: &CensusState, max_nodes: usize) -> bool {
        use std::collections::BTreeSet;
        let mut queued: BTreeSet<usize> = seeds.mono.keys().cloned().collect();
        let mut queue: Vec<usize> = queued.iter().cloned().collect();
        let mut qpos = 0usize;
        while qpos < queue.len() {
            if self.intervals.len() > max_nodes {
                return false;
            }
            let id = queue[qpos];
            qpos += 1;
            if self.expansions[id].is_none() {
                self.expand(id);
            }
            let children = self.expansions[id].as_ref().unwrap().mono.clone();
            for child in children {
                if queued.insert(child) {
                    queue.push(child);
                }
            }
        }
        true
    }

    /// Adjacency (with multiplicities) restricted to expanded vertices.
    /// Row i lists (child, multiplicity) for expanded child vertices only.
    pub fn expanded_subgraph(&self) -> Vec<Vec<(usize, u64)>> {
        let n = self.intervals.len();
        let mut adj = vec![Vec::new(); n];
        for id in 0..n {
            if let Some(exp) = &self.expansions[id] {
                let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
                for child in &exp.mono {
                    if self.expansions[*child].is_some() {
                        *counts.entry(*child).or_insert(0) += 1;
                    }
                }
                adj[id] = counts.into_iter().collect();
            }
        }
        adj
    }

    /// Adjacency over all vertices (children that are unexpanded included);
    /// only valid when the graph is closed.
    pub fn full_graph(&self) -> Vec<Vec<(usize, u64)>> {
        let n = self.intervals.len();
        let mut adj = vec![Vec::new(); n];
        for id in 0..n {
            if let Some(exp) = &self.expansions[id] {
                let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
                for child in &exp.mono {
                    *counts.entry(*child).or_insert(0) += 1;
                }
                adj[id] = counts.into_iter().collect();
            }
        }
        adj
    }
}

/// `lap_census`: exact counts l(T^1), ..., l(T^n).
///
/// `max_nodes` caps the number of distinct image intervals (the blow-up
/// guard; piece *counts* may be astronomically larger since they are only
/// stored as big integers).
pub fn lap_census(map: &PiecewiseAffineMap, n: usize, max_nodes: usize) -> Result<LapCensus> {
    if n == 0 {
        return Err(CoreError::InvalidParameter("depth must be >= 1".into()));
    }
    let mut engine = CensusEngine::new(map);
    let mut state = engine.initial_state();
    let mut counts = vec![state.total()];
    for _ in 1..n {
        state = engine.step(&state);
        counts.push(state.total());
        if engine.node_count() > max_nodes {
            return Err(CoreError::PieceBudget(format!(
                "more than {max_nodes} distinct image intervals"
            )));
        }
    }
    Ok(LapCensus { counts, depth: n })
}

/// Reference implementation: explicit domain pieces, exponential in n.
/// Used as the oracle for the fast census.
pub fn lap_census_bruteforce(map: &PiecewiseAffineMap, n: usize) -> Vec<BigUint> {
    #[derive(Clone)]
    struct Piece {
        lo: Q,
        hi: Q,
        img_lo: Q,
        img_hi: Q,
        constant: bool,
    }
    let (dlo, dhi) = map.domain();
    let xs = map.breakpoints().to_vec();
    let mut pieces: Vec<Piece> = Vec::new();
    // level 1: laps of T
    let mut cuts = vec![dlo.clone()];
    for x in &xs {
        if *x > dlo && *x < dhi {
            cuts.push(x.clone());
        }
    }
    cuts.push(dhi.clone());
    for w in cuts.windows(2) {
        let va = map.eval(&w[0]).unwrap();
        let vb = map.eval(&w[1]).unwrap();
        let constant = va == vb;
        let (img_lo, img_hi) = if va <= vb { (va, vb) } else { (vb, va) };
        pieces.push(Piece {
            lo: w[0].clone(),
            hi: w[1].clone(),
            img_lo,
            img_hi,
            constant,
        });
    }
    let mut counts = vec![BigUint::from(pieces.len())];
    for _ in 1..n {
        let mut next: Vec<Piece> = Vec::new();
        for p in &pieces {
            if p.constant {
                let v = map.eval(&p.img_lo).unwrap();
                next.push(Piece {
                    lo: p.lo.clone(),
                    hi: p.hi.clone(),
                    img_lo: v.clone(),
                    img_hi: v,
                    constant: true,
                });
                continue;
            }
            // split the image at interior breakpoints, transport back
            let increasing = map.eval(&p.lo).unwrap() < map.eval(&p.hi).unwrap();
            let mut icuts = vec![p.img_lo.clone()];
            for x in &xs {
                if *x > p.img_lo && *x < p.img_hi {
                    icuts.push(x.clone());
                }
            }
            icuts.push(p.img_hi.clone());
            // domain subinterval corresponding to an image subinterval of an
            // affine piece: invert the affine map T^n|piece
            let span_dom = &p.hi - &p.lo;
            let span_img = &p.img_hi - &p.img_lo;
            for w in icuts.windows(2) {
                let (ia, ib) = (&w[0], &w[1]);
                let (ta, tb) = if increasing {
                    (
                        &p.lo + (ia - &p.img_lo) * &span_dom / &span_img,
                        &p.lo + (ib - &p.img_lo) * &span_dom / &span_img,
                    )
                } else {
                    (
                        &p.lo + (&p.img_hi - ib) * &span_dom / &span_img,
                        &p.lo + (&p.img_hi - ia) * &span_dom / &span_img,
                    )
                };
                let va = map.eval(ia).unwrap();
                let vb = map.eval(ib).unwrap();
                let constant = va == vb;
                let (img_lo, img_hi) = if va <= vb { (va, vb) } else { (vb, va) };
                next.push(Piece {
                    lo: ta,
                    hi: tb,
                    img_lo,
                    img_hi,
                    constant,
                });
            }
        }
        pieces = next;
        counts.push(BigUint::from(pieces.len()));
    }
    counts
}

/// Submultiplicativity check helper (used by tests and cmd_verify).
pub fn is_submultiplicative(counts: &[BigUint]) -> bool {
    let n = counts.len();
    for a in 1..=n {
        for b in 1..=n {
            if a + b <= n {
                let lhs = &counts[a + b - 1];
                let rhs = &counts[a - 1] * &counts[b - 1];
                if *lhs > rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// l(T^n) restricted to [u, v] for one depth per call site; shares the
/// engine's memoized tower across calls.
pub fn census_on_interval(
    engine: &mut CensusEngine,
    u: &Q,
    v: &Q,
    n: usize,
) -> Vec<BigUint> {
    let mut state = engine.initial_state_on(u, v);
    let mut counts = vec![state.total()];
    for _ in 1..n {
        state = engine.step(&state);
        counts.push(state.total());
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_geometry, Shape, StuntedParams};
    use crate::rat::{qi, qr};

    fn stunted(d: usize, zeta: Vec<Q>) -> PiecewiseAffineMap {
        let g = make_geometry(d, Shape::Plus).unwrap();
        StuntedParams::new(g, zeta).unwrap().to_map()
    }

    #[test]
    fn full_stunted_census_is_2n_plus_lower_order() {
        let m = stunted(1, vec![qr(3, 2)]);
        let c = lap_census(&m, 10, 10_000).unwrap();
        for (k, v) in c.counts.iter().enumerate() {
            let expected = BigUint::from(2u32).pow(k as u32 + 2) - BigUint::from(1u32);
            assert_eq!(*v, expected, "l(T^{}) = 2^{}+... mismatch", k + 1, k + 1);
        }
        assert!(is_submultiplicative(&c.counts));
    }

    #[test]
    fn constant_map_census_is_one() {
        let m = stunted(1, vec![qr(-3, 2)]);
        let c = lap_census(&m, 8, 100).unwrap();
        assert!(c.counts.iter().all(|v| *v == BigUint::from(1u32)));
    }

    #[test]
    fn fast_census_matches_bruteforce() {
        let cases = vec![
            stunted(1, vec![qr(3, 2)]),
            stunted(1, vec![qr(3, 4)]),
            stunted(1, vec![qr(33, 26)]),
            stunted(2, vec![qr(8, 3), qr(8, 3)]),
            stunted(2, vec![qi(1), qi(2)]),
            stunted(2, vec![qr(1, 2), qr(-1, 2)]),
            stunted(3, vec![qi(2), qi(1), qr(-1, 2)]),
        ];
        for m in cases {
            let fast = lap_census(&m, 7, 100_000).unwrap();
            let brute = lap_census_bruteforce(&m, 7);
            assert_eq!(fast.counts, brute, "census mismatch for {m:?}");
        }
    }

    #[test]
    fn golden_mean_census_grows_like_phi() {
        let m = stunted(1, vec![qr(33, 26)]);
        let c = lap_census(&m, 24, 10_000).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let ratio = crate::rat::ln_ratio(&c.counts[23], &c.counts[22]);
        assert!((ratio - phi.ln()).abs() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn census_blowup_guard_fires() {
        // Stunted maps close fast (integer slope, wide plateaus), so the
        // guard is exercised with a tent of non-integer slope, whose image
        // endpoints have exploding denominators.
        let m = PiecewiseAffineMap::new(
            vec![qi(0), qr(1, 2), qi(1)],
            vec![qi(0), qr(7071, 10000), qi(0)],
        )
        .unwrap();
        let err = lap_census(&m, 60, 12).unwrap_err();
        assert!(matches!(err, CoreError::PieceBudget(_)));
    }
}
