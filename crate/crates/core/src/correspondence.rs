//! The correspondence between polynomials and stunted sawtooth maps: the map
//! ST through kneading data, preplateaus W(T), critical graphs, wandering
//! pairs, and class representatives.
//!
//! All eventual/absorbing properties are budgeted and tri-state. Rational
//! parameters keep orbit denominators bounded (the slope is an integer), so
//! point orbits are decided exactly by cycle detection whenever the budget
//! allows.

use crate::error::{CoreError, Result};
use crate::maps::{make_geometry, PolynomialMap, StuntedParams};
use crate::rat::{qi, Q};
use num_traits::Zero;
use crate::symbolic::{kneading, realize_in_sawtooth, StuntedMap};
use std::collections::BTreeSet;

/// Result of `st_map`: stunted parameters with per-coordinate error bounds.
#[derive(Debug, Clone)]
pub struct StResult {
    pub params: StuntedParams,
    pub errors: Vec<Q>,
}

/// `st_map`: realize the kneading invariant of `f` inside the sawtooth and
/// recover the plateau parameters from the half-width formula.
pub fn st_map(f: &PolynomialMap, depth: usize) -> Result<StResult> {
    let d = f.modality();
    let g = make_geometry(d, f.shape)?;
    let kn = kneading(f, depth)?;
    let mut zeta = Vec::with_capacity(d);
    let mut errors = Vec::with_capacity(d);
    for i in 0..d {
        let realized = realize_in_sawtooth(&g, &kn.nu[i])?;
        let c = &g.turning[i];
        let w = &realized.point - c;
        let mut z = &g.lambda * (qi(1) - w);
        // clamp into [-e, e] (truncation can overshoot by the error bound)
        if z > g.e {
            z = g.e.clone();
        }
        if z < -g.e.clone() {
            z = -g.e.clone();
        }
        zeta.push(z);
        // conservative per-coordinate bound: the depth-n cylinder width
        // (the realization enclosure can be tighter, even exact, when a
        // periodic tail was detected)
        let cylinder = qi(2) * &g.e * (qi(1) / &g.lambda).pow(depth as i32 - 1);
        let err = (&g.lambda * &realized.err).max(&g.lambda * cylinder);
        errors.push(err);
    }
    // Project tiny oblique violations (within the error bounds) back onto
    // the constraint set.
    for i in 0..d.saturating_sub(1) {
        let s = &zeta[i] + &zeta[i + 1];
        if s < Q::zero() {
            let slack = &errors[i] + &errors[i + 1] + Q::new(1.into(), 1_000_000.into());
            if -s.clone() <= slack {
                let shift = -s / qi(2);
                zeta[i] += &shift;
                zeta[i + 1] += &shift;
            }
        }
    }
    let params = StuntedParams::new(g, zeta)?;
    Ok(StResult { params, errors })
}

/// Fate of a point's forward orbit relative to int(union of plateaus).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    /// Enters the open plateau union after this many steps (0 = already in).
    Enters(usize),
    /// Certified to avoid it forever (orbit is eventually periodic).
    Avoids,
    /// Budget exhausted.
    Unknown,
}

/// Open interior of the union of plateaus: one open hull per block of
/// touching plateaus.
pub fn plateau_union_interior(t: &StuntedParams) -> Vec<(Q, Q)> {
    t.blocks()
        .into_iter()
        .map(|(a, b)| {
            let (lo, _) = t.plateau(a);
            let (_, hi) = t.plateau(b);
            (lo, hi)
        })
        .collect()
}

fn in_open_set(x: &Q, set: &[(Q, Q)]) -> bool {
    set.iter().any(|(a, b)| x > a && x < b)
}

/// Decide the fate of a point exactly (cycle detection) within `budget`.
pub fn point_fate(t: &StuntedMap, x: &Q, budget: usize) -> Fate {
    let interior = plateau_union_interior(&t.params);
    let mut seen: BTreeSet<Q> = BTreeSet::new();
    let mut cur = x.clone();
    for step in 0..budget {
        if in_open_set(&cur, &interior) {
            return Fate::Enters(step);
        }
        if !seen.insert(cur.clone()) {
            return Fate::Avoids;
        }
        cur = match t.pl.eval(&cur) {
            Ok(v) => v,
            Err(_) => return Fate::Unknown,
        };
    }
    Fate::Unknown
}

/// Merge open pieces into maximal open intervals: overlapping pieces always
/// merge; touching pieces merge exactly when the shared endpoint itself
/// belongs to the set, decided by the membership predicate.
fn merge_pieces<F: Fn(&Q) -> bool>(mut pieces: Vec<(Q, Q)>, member: F) -> Vec<(Q, Q)> {
    pieces.sort();
    let mut out: Vec<(Q, Q)> = Vec::new();
    for (lo, hi) in pieces {
        match out.last_mut() {
            Some((_, phi)) if lo < *phi => {
                if hi > *phi {
                    *phi = hi;
                }
            }
            Some((_, phi)) if lo == *phi && member(&lo) => {
                if hi > *phi {
                    *phi = hi;
                }
            }
            _ => {
                if lo < hi {
                    out.push((lo, hi));
                }
            }
        }
    }
    out
}

/// Components of the preimage of an open interval set under T, merged.
fn preimage_open(t: &StuntedMap, set: &[(Q, Q)]) -> Vec<(Q, Q)> {
    let pl = &t.pl;
    let xs = pl.breakpoints();
    let ys = pl.values();
    let mut pieces: Vec<(Q, Q)> = Vec::new();
    for k in 0..pl.lap_count() {
        let (x0, x1) = (&xs[k], &xs[k + 1]);
        let (y0, y1) = (&ys[k], &ys[k + 1]);
        for (vlo, vhi) in set {
            if y0 == y1 {
                // constant lap: inside iff the value is inside
                if y0 > vlo && y0 < vhi {
                    pieces.push((x0.clone(), x1.clone()));
                }
                continue;
            }
            // affine lap: solve y0 + s (x - x0) in (vlo, vhi)
            let s = pl.slope(k);
            let a = x0 + (vlo - y0) / &s;
            let b = x0 + (vhi - y0) / &s;
            let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
            if lo < *x0 {
                lo = x0.clone();
            }
            if hi > *x1 {
                hi = x1.clone();
            }
            if lo < hi {
                pieces.push((lo, hi));
            }
        }
    }
    merge_pieces(pieces, |x| {
        t.pl.eval(x).map(|y| in_open_set(&y, set)).unwrap_or(false)
    })
}

/// One pullback generation: W union T^{-1}(W), merged. A junction point
/// belongs to the union iff it lies in W or maps into W.
fn union_with_preimage(t: &StuntedMap, w: &[(Q, Q)]) -> Vec<(Q, Q)> {
    let mut all: Vec<(Q, Q)> = w.to_vec();
    all.extend(preimage_open(t, w));
    merge_pieces(all, |x| {
        in_open_set(x, w)
            || t.pl.eval(x).map(|y| in_open_set(&y, w)).unwrap_or(false)
    })
}

/// The preplateau W(T) truncated to `gens` pullback generations.
#[derive(Debug, Clone)]
pub struct Preplateau {
    /// Critical components: component of W containing each plateau block.
    pub components: Vec<(Q, Q)>,
    /// plateau index (1-based position - 1) -> index into `components`.
    pub membership: Vec<usize>,
    /// True per component when both endpoints are certified to avoid the
    /// plateau interiors forever (the component can never grow or merge).
    pub certified: Vec<bool>,
    pub budget_used: usize,
    /// True when the pullback stabilized globally within the budget.
    pub complete: bool,
}

/// `preplateau`: breadth-first pullback of int(union of plateaus).
pub fn preplateau(t: &StuntedMap, budget: usize) -> Preplateau {
    let gens = budget.min(24).max(1);
    let orbit_budget = budget.max(256);
    let comp_cap = 60_000usize;
    let mut w = plateau_union_interior(&t.params);
    let mut complete = false;
    let mut used = 0usize;
    for gen in 1..=gens {
        used = gen;
        let next = union_with_preimage(t, &w);
        if next == w {
            complete = true;
            break;
        }
        w = next;
        if w.len() > comp_cap {
            break;
        }
    }
    // Components containing the plateau blocks (the turning point of the
    // block's first plateau is always interior to its block, hence in W).
    let blocks = t.params.blocks();
    let mut components: Vec<(Q, Q)> = Vec::new();
    let mut block_comp: Vec<usize> = Vec::new();
    for (a, _b) in &blocks {
        let c = &t.params.geometry.turning[*a - 1];
        let comp = w
            .iter()
            .find(|(lo, hi)| lo < c && c < hi)
            .cloned()
            .expect("block interior is contained in W at every generation");
        let idx = components
            .iter()
            .position(|c0| *c0 == comp)
            .unwrap_or_else(|| {
                components.push(comp.clone());
                components.len() - 1
            });
        block_comp.push(idx);
    }
    let mut membership = vec![0usize; t.params.geometry.d];
    for (bi, (a, b)) in blocks.iter().enumerate() {
        for i in *a..=*b {
            membership[i - 1] = block_comp[bi];
        }
    }
    let certified = components
        .iter()
        .map(|(lo, hi)| {
            matches!(point_fate(t, lo, orbit_budget), Fate::Avoids)
                && matches!(point_fate(t, hi, orbit_budget), Fate::Avoids)
        })
        .collect();
    Preplateau {
        components,
        membership,
        certified,
        budget_used: used,
        complete,
    }
}

/// Kind of a critical relation W_i -> W_j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrowKind {
    Interior,
    Boundary,
}

/// Directed graph on critical preplateau components; each node has at most
/// one outgoing arrow (the first entry decides).
#[derive(Debug, Clone)]
pub struct CriticalGraph {
    pub components: Vec<(Q, Q)>,
    pub membership: Vec<usize>,
    /// arrow of node i: (target, kind), or None when there is none.
    pub arrows: Vec<Option<(usize, ArrowKind)>>,
    /// per-node flag: arrow undecided within budget.
    pub unknown: Vec<bool>,
    /// any component uncertified (graph derived from an under-approximation)
    pub approximate: bool,
}

impl CriticalGraph {
    /// DOT-compatible rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph critical {\n");
        for (i, (lo, hi)) in self.components.iter().enumerate() {
            s.push_str(&format!(
                "  W{} [label=\"W{} = ({}, {})\"];\n",
                i,
                i,
                crate::rat::fmt_q(lo),
                crate::rat::fmt_q(hi)
            ));
        }
        for (i, arrow) in self.arrows.iter().enumerate() {
            if let Some((j, kind)) = arrow {
                let style = match kind {
                    ArrowKind::Interior => "solid",
                    ArrowKind::Boundary => "dashed",
                };
                s.push_str(&format!("  W{i} -> W{j} [style={style}];\n"));
            } else if self.unknown[i] {
                s.push_str(&format!("  W{i} -> W{i} [style=dotted, label=\"?\"];\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Arrow-kind classification of an entry point into component (lo, hi):
/// interior when strictly inside, or on the boundary at a domain endpoint
/// (the relative interior of the component within [-e, e]).
fn entry_kind(p: &Q, lo: &Q, hi: &Q, e: &Q) -> ArrowKind {
    if p > lo && p < hi {
        ArrowKind::Interior
    } else if (*p == -e.clone() && lo == p) || (*p == *e && hi == p) {
        ArrowKind::Interior
    } else {
        ArrowKind::Boundary
    }
}

/// `critical_graph`: arrows by first entry of each component's orbit into
/// another component (point orbit when T is constant on the component's
/// closure, interval orbit otherwise).
pub fn critical_graph(t: &StuntedMap, budget: usize) -> CriticalGraph {
    let pre = preplateau(t, budget);
    let e = t.params.geometry.e.clone();
    let n = pre.components.len();
    let mut arrows: Vec<Option<(usize, ArrowKind)>> = vec![None; n];
    let mut unknown = vec![false; n];
    for i in 0..n {
        let (lo, hi) = pre.components[i].clone();
        let (ilo, ihi) = t.pl.image_of_interval(&lo, &hi).unwrap();
        if ilo == ihi {
            // point orbit of the constant value
            let mut cur = ilo;
            let mut seen: BTreeSet<Q> = BTreeSet::new();
            let mut found = false;
            for _step in 1..=budget {
                // first entry into the closure of some component
                let mut hit = None;
                for (j, (clo, chi)) in pre.components.iter().enumerate() {
                    if cur >= *clo && cur <= *chi {
                        hit = Some(j);
                        break;
                    }
                }
                if let Some(j) = hit {
                    let (clo, chi) = &pre.components[j];
                    arrows[i] = Some((j, entry_kind(&cur, clo, chi, &e)));
                    found = true;
                    break;
                }
                if !seen.insert(cur.clone()) {
                    found = true; // certified: no arrow
                    break;
                }
                cur = match t.pl.eval(&cur) {
                    Ok(v) => v,
                    Err(_) => break,
                };
            }
            if !found {
                unknown[i] = true;
            }
        } else {
            // interval orbit of the open component
            let (mut a, mut b) = (ilo, ihi);
            let mut seen: BTreeSet<(Q, Q)> = BTreeSet::new();
            let mut found = false;
            for _step in 1..=budget {
                let mut decided = None;
                for (j, (clo, chi)) in pre.components.iter().enumerate() {
                    if a >= *clo && b <= *chi {
                        let kind = if b > a {
                            // a nondegenerate interval inside the closure
                            // meets the open component
                            ArrowKind::Interior
                        } else {
                            entry_kind(&a, clo, chi, &e)
                        };
                        decided = Some((j, kind));
                        break;
                    }
                }
                if let Some(d) = decided {
                    arrows[i] = Some(d);
                    found = true;
                    break;
                }
                if !seen.insert((a.clone(), b.clone())) {
                    found = true; // interval orbit cycles without entering
                    break;
                }
                let (na, nb) = match t.pl.image_of_interval(&a, &b) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                a = na;
                b = nb;
            }
            if !found {
                unknown[i] = true;
            }
        }
    }
    let approximate = pre.certified.iter().any(|c| !c);
    CriticalGraph {
        components: pre.components,
        membership: pre.membership,
        arrows,
        unknown,
        approximate,
    }
}

/// Verdict for one plateau pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairVerdict {
    DegenerateToPeriodicPlateau,
    Nondegenerate,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct WanderingPairReport {
    /// (i, j, first collapse time, verdict); only wandering pairs are listed
    /// (pairs whose hull provably never collapses are omitted).
    pub pairs: Vec<(usize, usize, usize, PairVerdict)>,
}

/// Plateau periodicity: follow the chain plateau -> plateau induced by the
/// value orbits; a plateau is periodic when the index chain closes a cycle
/// through it. Returns (periodic?, eventually-periodic?) per plateau.
pub fn plateau_periodicity(t: &StuntedMap, budget: usize) -> (Vec<bool>, Vec<bool>, Vec<bool>) {
    let d = t.params.geometry.d;
    // next plateau hit by the value orbit of plateau i (1-based), if decided
    let mut next: Vec<Option<Option<usize>>> = vec![None; d]; // None=unknown, Some(None)=never
    for i in 1..=d {
        let v = t.params.plateau_value(i);
        let mut cur = v;
        let mut seen: BTreeSet<Q> = BTreeSet::new();
        for _ in 0..budget {
            let mut hit = None;
            for j in 1..=d {
                let (lo, hi) = t.params.plateau(j);
                if cur >= lo && cur <= hi {
                    hit = Some(j);
                    break;
                }
            }
            if let Some(j) = hit {
                next[i - 1] = Some(Some(j));
                break;
            }
            if !seen.insert(cur.clone()) {
                next[i - 1] = Some(None);
                break;
            }
            cur = match t.pl.eval(&cur) {
                Ok(x) => x,
                Err(_) => break,
            };
        }
    }
    let mut periodic = vec![false; d];
    let mut eventually = vec![false; d];
    let mut unknown = vec![false; d];
    for i in 1..=d {
        // follow the chain from i
        let mut seen_idx: Vec<usize> = vec![i];
        let mut cur = i;
        loop {
            match next[cur - 1] {
                None => {
                    unknown[i - 1] = true;
                    break;
                }
                Some(None) => break, // terminal: never reaches periodicity
                Some(Some(j)) => {
                    if let Some(pos) = seen_idx.iter().position(|x| *x == j) {
                        // cycle found: plateaus in the cycle are periodic
                        if pos == 0 && j == i {
                            periodic[i - 1] = true;
                        }
                        if seen_idx[pos..].contains(&i) || j == i {
                            periodic[i - 1] = true;
                        }
                        eventually[i - 1] = true;
                        break;
                    }
                    seen_idx.push(j);
                    cur = j;
                }
            }
        }
    }
    (periodic, eventually, unknown)
}

/// `wandering_pairs`: iterate the hull of each plateau pair exactly; a
/// collapse to a point is followed by the verdict of the collapsed point's
/// orbit (reaches an eventually-periodic plateau or not).
pub fn wandering_pairs(t: &StuntedMap, budget: usize) -> WanderingPairReport {
    let d = t.params.geometry.d;
    let (_periodic, eventually, per_unknown) = plateau_periodicity(t, budget);
    let mut pairs = Vec::new();
    for i in 1..=d {
        for j in i + 1..=d {
            let (lo, _) = t.params.plateau(i);
            let (_, hi) = t.params.plateau(j);
            let (mut a, mut b) = (lo, hi);
            let mut seen: BTreeSet<(Q, Q)> = BTreeSet::new();
            let mut outcome: Option<(usize, PairVerdict)> = None;
            for step in 0..budget {
                if a == b {
                    // collapsed: classify the point orbit
                    let verdict = classify_collapsed(t, &a, &eventually, &per_unknown, budget);
                    outcome = Some((step, verdict));
                    break;
                }
                if !seen.insert((a.clone(), b.clone())) {
                    break; // interval orbit cycles without collapsing
                }
                let (na, nb) = match t.pl.image_of_interval(&a, &b) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                a = na;
                b = nb;
            }
            match outcome {
                Some((n, verdict)) => pairs.push((i, j, n, verdict)),
                None => {
                    if seen.len() >= budget {
                        pairs.push((i, j, 0, PairVerdict::Unknown));
                    }
                    // cycle without collapse: not a wandering pair, omit
                }
            }
        }
    }
    WanderingPairReport { pairs }
}

fn classify_collapsed(
    t: &StuntedMap,
    p: &Q,
    eventually_periodic: &[bool],
    per_unknown: &[bool],
    budget: usize,
) -> PairVerdict {
    let d = t.params.geometry.d;
    let mut cur = p.clone();
    let mut seen: BTreeSet<Q> = BTreeSet::new();
    for _ in 0..budget {
        for j in 1..=d {
            let (lo, hi) = t.params.plateau(j);
            if cur >= lo && cur <= hi {
                if per_unknown[j - 1] {
                    return PairVerdict::Unknown;
                }
                return if eventually_periodic[j - 1] {
                    PairVerdict::DegenerateToPeriodicPlateau
                } else {
                    PairVerdict::Nondegenerate
                };
            }
        }
        if !seen.insert(cur.clone()) {
            return PairVerdict::Nondegenerate; // periodic orbit off plateaus
        }
        cur = match t.pl.eval(&cur) {
            Ok(x) => x,
            Err(_) => return PairVerdict::Unknown,
        };
    }
    PairVerdict::Unknown
}

/// Tri-state non-degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

/// `is_nondegenerate`: yes iff every wandering pair degenerates into a
/// periodic plateau and nothing is unknown.
pub fn is_nondegenerate(t: &StuntedMap, budget: usize) -> TriState {
    let report = wandering_pairs(t, budget);
    let mut yes = true;
    for (_, _, _, v) in &report.pairs {
        match v {
            PairVerdict::Nondegenerate => return TriState::No,
            PairVerdict::Unknown => yes = false,
            PairVerdict::DegenerateToPeriodicPlateau => {}
        }
    }
    if yes {
        TriState::Yes
    } else {
        TriState::Unknown
    }
}

/// `class_representative`: re-aim every plateau whose component has an
/// interior critical relation at the midpoint of the target component.
pub fn class_representative(t: &StuntedMap, budget: usize) -> Result<StuntedParams> {
    let graph = critical_graph(t, budget);
    if graph.unknown.iter().any(|u| *u) {
        return Err(CoreError::UnknownStructure(
            "critical graph has undecided arrows".into(),
        ));
    }
    let d = t.params.geometry.d;
    let mut zeta = t.params.zeta.clone();
    for i in 1..=d {
        let comp = graph.membership[i - 1];
        if let Some((j, ArrowKind::Interior)) = graph.arrows[comp] {
            let (lo, hi) = &graph.components[j];
            let mid = (lo + hi) / qi(2);
            zeta[i - 1] = if t.params.geometry.shape.turn_is_max(i) {
                mid
            } else {
                -mid
            };
        }
    }
    StuntedParams::new(t.params.geometry.clone(), zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{family_member, Shape};
    use num_traits::Signed;
    use crate::rat::qr;

    fn stunted(d: usize, shape: Shape, zeta: Vec<Q>) -> StuntedMap {
        let g = make_geometry(d, shape).unwrap();
        StuntedMap::new(StuntedParams::new(g, zeta).unwrap())
    }

    #[test]
    fn st_map_logistic_examples() {
        // lambda = 1.5: attracting fixed point left of c, ST = -e exactly.
        let f = family_member("logistic", &[("lambda".to_string(), 1.5)].into()).unwrap();
        let st = st_map(&f, 30).unwrap();
        assert_eq!(st.params.zeta, vec![qr(-3, 2)]);

        // lambda = 3: plateau [-p1, p1], zeta = 3/4 exactly via the periodic
        // tail.
        let f = family_member("logistic", &[("lambda".to_string(), 3.0)].into()).unwrap();
        let st = st_map(&f, 30).unwrap();
        assert_eq!(st.params.zeta, vec![qr(3, 4)]);

        // lambda = 4: top corner within 3*lambda^-30.
        let f = family_member("logistic", &[("lambda".to_string(), 4.0)].into()).unwrap();
        let st = st_map(&f, 30).unwrap();
        let err = (st.params.zeta[0].clone() - qr(3, 2)).abs();
        let bound = qi(3) * qr(1, 3).pow(30);
        assert!(err <= bound, "err {err:?}");
    }

    #[test]
    fn preplateau_constant_map() {
        let t = stunted(1, Shape::Plus, vec![qr(-3, 2)]);
        let pre = preplateau(&t, 1000);
        assert_eq!(pre.components, vec![(qr(-3, 2), qr(3, 2))]);
        assert!(pre.complete);
        assert!(pre.certified[0]);
        assert_eq!(pre.budget_used, 1);
    }

    #[test]
    fn preplateau_fixed_boundary_plateau() {
        // zeta = 3/4: plateau [-3/4, 3/4], the fixed point p1 = 3/4 excluded.
        let t = stunted(1, Shape::Plus, vec![qr(3, 4)]);
        let pre = preplateau(&t, 2000);
        assert_eq!(pre.components[0], (qr(-3, 4), qr(3, 4)));
        assert!(pre.certified[0]);
    }

    #[test]
    fn preplateau_touching_block_is_single_component() {
        // d = 2 with touching plateaus: one component contains both.
        let t = stunted(2, Shape::Plus, vec![qr(1, 2), qr(-1, 2)]);
        let pre = preplateau(&t, 2000);
        assert_eq!(pre.membership[0], pre.membership[1]);
    }

    #[test]
    fn critical_graph_examples() {
        // zeta = 3/4: single node, boundary self-arrow (value = fixed
        // boundary point).
        let t = stunted(1, Shape::Plus, vec![qr(3, 4)]);
        let g = critical_graph(&t, 2000);
        assert_eq!(g.arrows[0], Some((0, ArrowKind::Boundary)));

        // zeta = -e: constant map, interior self-arrow (value at the domain
        // endpoint, inside the relative interior of its component).
        let t = stunted(1, Shape::Plus, vec![qr(-3, 2)]);
        let g = critical_graph(&t, 2000);
        assert_eq!(g.arrows[0], Some((0, ArrowKind::Interior)));

        // d = 2 two-cycle fixture: plateau values map into each other's
        // plateau interiors.
        let t = stunted(2, Shape::Plus, vec![qi(1), qi(1)]);
        let g = critical_graph(&t, 2000);
        assert_eq!(g.components.len(), 2);
        assert_eq!(g.arrows[0].map(|(j, _)| j), Some(1));
        assert_eq!(g.arrows[1].map(|(j, _)| j), Some(0));
        assert!(matches!(g.arrows[0], Some((_, ArrowKind::Interior))));
    }

    #[test]
    fn wandering_pair_fixtures() {
        // Generic d=2 map without collapsing hulls: empty report.
        let t = stunted(2, Shape::Plus, vec![qr(8, 3), qr(8, 3)]);
        let report = wandering_pairs(&t, 3000);
        assert!(report.pairs.is_empty(), "{report:?}");
        assert_eq!(is_nondegenerate(&t, 3000), TriState::Yes);

        // d=3 fixture: hull [Z_2, Z_3] lands in int Z_1, Z_1 periodic via
        // the 2-cycle Z_1 -> Z_3 -> Z_1.
        let t = stunted(3, Shape::Plus, vec![qi(1), qi(2), qr(-3, 2)]);
        let report = wandering_pairs(&t, 3000);
        let found = report
            .pairs
            .iter()
            .find(|(i, j, _, _)| *i == 2 && *j == 3)
            .expect("pair (2,3) should collapse");
        assert_eq!(found.3, PairVerdict::DegenerateToPeriodicPlateau);
        assert_eq!(found.2, 2); // T^2(hull) is a point

        // Certified nondegenerate fixture (d = 4): the hull [Z_1, Z_2]
        // collapses into int Z_3, whose value lands in the terminal plateau
        // Z_4 with value -e (a fixed point off every plateau). At d = 3 the
        // corresponding knife-edge geometry always closes into a periodic
        // plateau chain.
        let t = stunted(4, Shape::Plus, vec![qr(5, 4), qi(-1), qi(3), qr(24, 5)]);
        let report = wandering_pairs(&t, 3000);
        let found = report
            .pairs
            .iter()
            .find(|(i, j, _, _)| *i == 1 && *j == 2)
            .expect("pair (1,2) should collapse");
        assert_eq!(found.3, PairVerdict::Nondegenerate);
        assert_eq!(found.2, 2);
        assert_eq!(is_nondegenerate(&t, 3000), TriState::No);

        // Budget starvation gives unknown: a point near the repelling fixed
        // endpoint needs ~7 steps to reach the plateau interior.
        let t2 = stunted(1, Shape::Plus, vec![qr(3, 4)]);
        let near_fixed = qr(-3, 2) + qr(1, 1000);
        assert_eq!(point_fate(&t2, &near_fixed, 3), Fate::Unknown);
        assert!(matches!(point_fate(&t2, &near_fixed, 64), Fate::Enters(_)));
    }

    #[test]
    fn class_representative_examples() {
        // zeta = -e: re-aim to the midpoint 0 of W = (-e, e).
        let t = stunted(1, Shape::Plus, vec![qr(-3, 2)]);
        let rep = class_representative(&t, 2000).unwrap();
        assert_eq!(rep.zeta, vec![qi(0)]);

        // idempotence
        let t0 = StuntedMap::new(rep);
        let rep2 = class_representative(&t0, 2000).unwrap();
        assert_eq!(rep2.zeta, t0.params.zeta);

        // zeta = 3/4 is rigid (boundary arrow, no re-aim).
        let t = stunted(1, Shape::Plus, vec![qr(3, 4)]);
        let rep = class_representative(&t, 2000).unwrap();
        assert_eq!(rep.zeta, vec![qr(3, 4)]);
    }

    #[test]
    fn graph_constant_along_class() {
        // Raising zeta toward the representative keeps the critical graph:
        // members of the class <T_{-e}> (zeta in [-e, 3/4)).
        for z in [qr(-3, 2), qr(-1, 2), qi(0), qr(1, 2)] {
            let t = stunted(1, Shape::Plus, vec![z]);
            let g = critical_graph(&t, 2000);
            assert_eq!(g.arrows[0].map(|(j, k)| (j, k)), Some((0, ArrowKind::Interior)));
        }
    }
}
