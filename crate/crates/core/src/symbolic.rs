//! Itineraries over the alphabet {I_0, c_1, I_1, ..., c_d, I_d}, the signed
//! lexicographic order, kneading invariants of polynomials, and realization
//! of itineraries as points of the sawtooth map.

use crate::error::{CoreError, Result};
use crate::maps::{PiecewiseAffineMap, PolynomialMap, SawtoothGeometry, Shape, StuntedParams};
use crate::rat::{qi, Q};
use std::cmp::Ordering;
use std::fmt;

/// One symbol: an open lap I_j (0-based) or a turning point c_i (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Lap(usize),
    Turn(usize),
}

impl Symbol {
    /// Spatial rank: I_0 < c_1 < I_1 < c_2 < ... (lap j has rank 2j, turn i
    /// has rank 2i - 1).
    fn rank(self) -> usize {
        match self {
            Symbol::Lap(j) => 2 * j,
            Symbol::Turn(i) => 2 * i - 1,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Lap(j) => write!(f, "I{j}"),
            Symbol::Turn(i) => write!(f, "c{i}"),
        }
    }
}

/// A finite-depth itinerary, optionally marked as eventually periodic: when
/// `period = Some(p)`, the final `p` stored symbols repeat forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub symbols: Vec<Symbol>,
    pub period: Option<usize>,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(CoreError::InvalidParameter(
                "symbol sequence must have depth >= 1".into(),
            ));
        }
        Ok(SymbolSequence {
            symbols,
            period: None,
        })
    }

    pub fn with_period(symbols: Vec<Symbol>, period: usize) -> Result<Self> {
        if symbols.is_empty() || period == 0 || period > symbols.len() {
            return Err(CoreError::InvalidParameter(
                "period marker inconsistent with stored symbols".into(),
            ));
        }
        Ok(SymbolSequence {
            symbols,
            period: Some(period),
        })
    }

    pub fn depth(&self) -> usize {
        self.symbols.len()
    }

    /// Symbol at position k, unrolling the periodic tail when present.
    pub fn at(&self, k: usize) -> Option<Symbol> {
        if k < self.symbols.len() {
            return Some(self.symbols[k]);
        }
        let p = self.period?;
        let start = self.symbols.len() - p;
        Some(self.symbols[start + (k - start) % p])
    }

    pub fn contains_turn(&self) -> bool {
        self.symbols.iter().any(|s| matches!(s, Symbol::Turn(_)))
    }

    /// Text rendering: "I1 I0 I0 | per(I0)".
    pub fn render(&self) -> String {
        let mut out = String::new();
        let n = self.symbols.len();
        let head = match self.period {
            Some(p) => n - p,
            None => n,
        };
        for (k, s) in self.symbols.iter().take(head).enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push_str(&s.to_string());
        }
        if let Some(p) = self.period {
            if head > 0 {
                out.push_str(" ");
            }
            out.push_str("| per(");
            for (k, s) in self.symbols[head..head + p].iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                out.push_str(&s.to_string());
            }
            out.push(')');
        }
        out
    }

    pub fn parse(s: &str) -> Result<SymbolSequence> {
        let (head, tail) = match s.split_once('|') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let parse_sym = |w: &str| -> Result<Symbol> {
            if let Some(rest) = w.strip_prefix('I') {
                Ok(Symbol::Lap(rest.parse().map_err(|_| {
                    CoreError::Parse(format!("bad symbol {w:?}"))
                })?))
            } else if let Some(rest) = w.strip_prefix('c') {
                let i: usize = rest
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad symbol {w:?}")))?;
                if i == 0 {
                    return Err(CoreError::Parse("turn index is 1-based".into()));
                }
                Ok(Symbol::Turn(i))
            } else {
                Err(CoreError::Parse(format!("bad symbol {w:?}")))
            }
        };
        let mut symbols: Vec<Symbol> = Vec::new();
        for w in head.split_whitespace() {
            symbols.push(parse_sym(w)?);
        }
        match tail {
            None => SymbolSequence::new(symbols),
            Some(t) => {
                let t = t.trim();
                let inner = t
                    .strip_prefix("per(")
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(|| CoreError::Parse(format!("bad period marker {t:?}")))?;
                let mut tail_syms = Vec::new();
                for w in inner.split_whitespace() {
                    tail_syms.push(parse_sym(w)?);
                }
                let p = tail_syms.len();
                symbols.extend(tail_syms);
                SymbolSequence::with_period(symbols, p)
            }
        }
    }
}

/// Maps that can drive an exact itinerary: evaluation plus the ambient
/// turning points that define the alphabet.
pub trait ExactMap {
    fn domain_q(&self) -> (Q, Q);
    fn turning_q(&self) -> Vec<Q>;
    fn eval_q(&self, x: &Q) -> Result<Q>;
}

impl ExactMap for SawtoothGeometry {
    fn domain_q(&self) -> (Q, Q) {
        (-self.e.clone(), self.e.clone())
    }
    fn turning_q(&self) -> Vec<Q> {
        self.turning.clone()
    }
    fn eval_q(&self, x: &Q) -> Result<Q> {
        self.eval(x)
    }
}

/// A stunted sawtooth map together with its geometry (for the alphabet).
#[derive(Debug, Clone)]
pub struct StuntedMap {
    pub params: StuntedParams,
    pub pl: PiecewiseAffineMap,
}

impl StuntedMap {
    pub fn new(params: StuntedParams) -> Self {
        let pl = params.to_map();
        StuntedMap { params, pl }
    }
}

impl ExactMap for StuntedMap {
    fn domain_q(&self) -> (Q, Q) {
        let e = &self.params.geometry.e;
        (-e.clone(), e.clone())
    }
    fn turning_q(&self) -> Vec<Q> {
        self.params.geometry.turning.clone()
    }
    fn eval_q(&self, x: &Q) -> Result<Q> {
        self.pl.eval(x)
    }
}

impl ExactMap for PiecewiseAffineMap {
    fn domain_q(&self) -> (Q, Q) {
        self.domain()
    }
    fn turning_q(&self) -> Vec<Q> {
        self.interior_turning_points()
    }
    fn eval_q(&self, x: &Q) -> Result<Q> {
        self.eval(x)
    }
}

/// Position of a point relative to the turning points: exact lap/turn symbol.
fn classify(x: &Q, turning: &[Q]) -> Symbol {
    for (i, c) in turning.iter().enumerate() {
        if x == c {
            return Symbol::Turn(i + 1);
        }
        if x < c {
            return Symbol::Lap(i);
        }
    }
    Symbol::Lap(turning.len())
}

/// `itinerary`: depth-n symbolic orbit of x under an exact map. Symbols are
/// emitted before each application of the map, so a final iterate may land
/// outside the domain only if another symbol would be required.
pub fn itinerary(map: &dyn ExactMap, x: &Q, depth: usize) -> Result<SymbolSequence> {
    if depth == 0 {
        return Err(CoreError::InvalidParameter("depth must be >= 1".into()));
    }
    let turning = map.turning_q();
    let (lo, hi) = map.domain_q();
    if *x < lo || *x > hi {
        return Err(CoreError::DomainViolation {
            x: crate::rat::fmt_q(x),
            lo: crate::rat::fmt_q(&lo),
            hi: crate::rat::fmt_q(&hi),
        });
    }
    let mut symbols = Vec::with_capacity(depth);
    let mut cur = x.clone();
    for k in 0..depth {
        symbols.push(classify(&cur, &turning));
        if k + 1 < depth {
            cur = map.eval_q(&cur)?;
        }
    }
    SymbolSequence::new(symbols)
}

/// `signed_lex_compare`: compare two itineraries in the signed lexicographic
/// order for the given shape. The sign flips with each orientation-reversing
/// lap in the common prefix; turn symbols do not flip orientation. Sequences
/// are compared up to the shorter depth (tails beyond it are ignored).
pub fn signed_lex_compare(a: &SymbolSequence, b: &SymbolSequence, shape: Shape) -> Ordering {
    let n = a.depth().min(b.depth());
    let mut flip = false;
    for k in 0..n {
        let sa = a.symbols[k];
        let sb = b.symbols[k];
        if sa != sb {
            let spatial = sa.rank().cmp(&sb.rank());
            return if flip { spatial.reverse() } else { spatial };
        }
        if let Symbol::Lap(j) = sa {
            if shape.lap_reversing(j) {
                flip = !flip;
            }
        }
    }
    Ordering::Equal
}

/// ordered kneading data of a polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KneadingInvariant {
    pub nu: Vec<SymbolSequence>,
    pub depth: usize,
}

/// Default float resolution: orbit points closer than this to a critical
/// point (without being an exact hit) raise `AmbiguousSymbol`.
pub const DEFAULT_RESOLUTION: f64 = 1e-10;
/// Relative distance below which a float orbit point counts as an exact hit
/// of a critical point.
const EXACT_EPS: f64 = 1e-13;

fn float_classify(
    x: f64,
    crit: &[f64],
    side: i8,
    resolution: f64,
    step: usize,
) -> Result<(usize, Option<usize>)> {
    // Returns (lap index of the germ x + side*0, Some(critical index) if x is
    // an exact hit).
    for (i, c) in crit.iter().enumerate() {
        let scale = 1.0 + c.abs();
        if (x - c).abs() <= EXACT_EPS * scale {
            let lap = if side > 0 { i + 1 } else { i };
            return Ok((lap, Some(i)));
        }
        if (x - c).abs() < resolution * scale {
            return Err(CoreError::AmbiguousSymbol { step });
        }
        if x < *c {
            return Ok((i, None));
        }
    }
    Ok((crit.len(), None))
}

/// `kneading`: the d one-sided limit itineraries nu_i = lim_{x -> c_i+}.
///
/// The orbit of the critical value is followed in floats; when it lands
/// exactly on a critical point the symbol stream continues with the one-sided
/// limit germ, whose side is determined by the extremum type. An eventually
/// periodic tail is detected (symbol repetition together with orbit-point
/// recurrence) and recorded in the period marker.
pub fn kneading(f: &PolynomialMap, depth: usize) -> Result<KneadingInvariant> {
    kneading_with_resolution(f, depth, DEFAULT_RESOLUTION)
}

pub fn kneading_with_resolution(
    f: &PolynomialMap,
    depth: usize,
    resolution: f64,
) -> Result<KneadingInvariant> {
    if depth == 0 {
        return Err(CoreError::InvalidParameter("depth must be >= 1".into()));
    }
    let crit = &f.critical_points;
    let mut nu = Vec::with_capacity(crit.len());
    for i in 0..crit.len() {
        let mut symbols = Vec::with_capacity(depth);
        let mut orbit: Vec<f64> = Vec::with_capacity(depth);
        // First symbol: the lap just right of c_i.
        symbols.push(Symbol::Lap(i + 1));
        orbit.push(crit[i]);
        let mut x = f.eval_unchecked(crit[i]);
        let mut side: i8 = if f.critical_is_max(i) { -1 } else { 1 };
        for step in 1..depth {
            let (lap, hit) = float_classify(x, crit, side, resolution, step)?;
            symbols.push(Symbol::Lap(lap));
            orbit.push(x);
            if step + 1 < depth {
                match hit {
                    Some(j) => {
                        side = if f.critical_is_max(j) { -1 } else { 1 };
                        x = f.eval_unchecked(crit[j]);
                    }
                    None => {
                        let d = f.deriv(x);
                        if d < 0.0 {
                            side = -side;
                        }
                        x = f.eval_unchecked(x);
                    }
                }
            }
        }
        let period = detect_period(&symbols, &orbit);
        let seq = match period {
            Some(p) => SymbolSequence::with_period(symbols, p)?,
            None => SymbolSequence::new(symbols)?,
        };
        nu.push(seq);
    }
    Ok(KneadingInvariant { nu, depth })
}

/// Detect an eventually periodic symbol tail: the last window of length p
/// must repeat at least three times and cover at least half the depth.
/// The realization error of a marked sequence stays within the depth-n
/// cylinder whatever the true tail is, so no orbit-value recurrence is
/// required (slowly converging orbits, e.g. parabolic ones, would never
/// pass a float recurrence test).
fn detect_period(symbols: &[Symbol], _orbit: &[f64]) -> Option<usize> {
    let n = symbols.len();
    let window = n / 2;
    for p in 1..=window / 3 {
        let start = n - window;
        let ok_sym = (start..n - p).all(|k| symbols[k] == symbols[k + p]);
        if ok_sym {
            return Some(p);
        }
    }
    None
}

/// Result of `realize_in_sawtooth`: the realized point with a certified
/// enclosure.
#[derive(Debug, Clone)]
pub struct Realized {
    pub point: Q,
    pub lo: Q,
    pub hi: Q,
    /// Half-width of the enclosure (error bound, <= 2e lambda^{-n}).
    pub err: Q,
}

/// `realize_in_sawtooth`: the unique point s whose one-sided itinerary under
/// S is `nu`, obtained by composing the inverse branches of S. A periodic
/// tail marker collapses the enclosure to an exact rational point.
pub fn realize_in_sawtooth(g: &SawtoothGeometry, nu: &SymbolSequence) -> Result<Realized> {
    if nu.contains_turn() {
        return Err(CoreError::InvalidParameter(
            "sequence must not contain turn symbols".into(),
        ));
    }
    for (k, s) in nu.symbols.iter().enumerate() {
        if let Symbol::Lap(j) = s {
            if *j > g.d {
                return Err(CoreError::Inadmissible { depth: k });
            }
        }
    }
    let n = nu.depth();
    let lap_interval = |j: usize| -> (Q, Q) { (g.lap_bound(j), g.lap_bound(j + 1)) };
    let lap_index = |s: Symbol| -> usize {
        match s {
            Symbol::Lap(j) => j,
            Symbol::Turn(_) => unreachable!(),
        }
    };
    // Inverse branch through lap j: x = left + (y - base)/slope, clipped.
    let pull = |j: usize, (ylo, yhi): (Q, Q)| -> Option<(Q, Q)> {
        let left = g.lap_bound(j);
        let base = g.bound_value_pub(j);
        let slope = g.lap_slope(j);
        let a = &left + (&ylo - &base) / &slope;
        let b = &left + (&yhi - &base) / &slope;
        let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
        let (llo, lhi) = lap_interval(j);
        if lo < llo {
            lo = llo.clone();
        }
        if hi > lhi {
            hi = lhi.clone();
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    };

    // Seed interval for the tail.
    let mut cur: (Q, Q);
    let mut start = n;
    if let Some(p) = nu.period {
        // Exact fixed interval of the periodic inverse-branch composition.
        // The composition of the p branches is affine with |slope| lambda^-p;
        // its fixed point solves a linear equation exactly.
        let tail: Vec<usize> = (n - p..n).map(|k| lap_index(nu.symbols[k])).collect();
        // Compose forward maps S^p restricted along the cycle: x -> A x + B.
        let mut a = qi(1);
        let mut b = qi(0);
        for &j in tail.iter().rev() {
            // inverse branch of lap j: x -> left + (x - base)/slope
            let left = g.lap_bound(j);
            let base = g.bound_value_pub(j);
            let slope = g.lap_slope(j);
            // new composite: first apply previous composite, then this branch
            a = &a / &slope;
            b = &left + (&b - &base) / &slope;
        }
        // fixed point of x -> a x + b
        let denom = qi(1) - &a;
        let fix = &b / &denom;
        // Verify the fixed point lies in the first tail lap (admissibility).
        let (llo, lhi) = lap_interval(tail[0]);
        if fix < llo || fix > lhi {
            return Err(CoreError::Inadmissible { depth: n - p });
        }
        cur = (fix.clone(), fix);
        start = n - p;
    } else {
        let j = lap_index(nu.symbols[n - 1]);
        cur = lap_interval(j);
    }
    if start > 0 {
        let until = if nu.period.is_some() { start } else { n - 1 };
        for k in (0..until).rev() {
            let j = lap_index(nu.symbols[k]);
            match pull(j, cur) {
                Some(next) => cur = next,
                None => return Err(CoreError::Inadmissible { depth: k }),
            }
        }
    }
    let (lo, hi) = cur;
    let err = (&hi - &lo) / qi(2);
    let point = (&lo + &hi) / qi(2);
    Ok(Realized { point, lo, hi, err })
}

impl SawtoothGeometry {
    /// Public access to a lap's left boundary value (for inverse branches).
    pub fn bound_value_pub(&self, j: usize) -> Q {
        if j >= 1 {
            self.turn_value(j)
        } else {
            match self.shape {
                Shape::Plus => -self.e.clone(),
                Shape::Minus => self.e.clone(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{family_member, make_geometry};
    use num_traits::Signed;
    use crate::rat::qr;

    fn seq(symbols: Vec<Symbol>) -> SymbolSequence {
        SymbolSequence::new(symbols).unwrap()
    }

    #[test]
    fn itinerary_examples() {
        // Full stunted map, fixed endpoint -e stays in I_0.
        let g = make_geometry(1, Shape::Plus).unwrap();
        let t = StuntedMap::new(StuntedParams::new(g.clone(), vec![qr(3, 2)]).unwrap());
        let it = itinerary(&t, &qr(-3, 2), 4).unwrap();
        assert_eq!(it.symbols, vec![Symbol::Lap(0); 4]);

        // Exact turning point of the d=2 sawtooth.
        let g2 = make_geometry(2, Shape::Plus).unwrap();
        let it = itinerary(&g2, &qi(-1), 1).unwrap();
        assert_eq!(it.symbols, vec![Symbol::Turn(1)]);
    }

    #[test]
    fn signed_lex_examples() {
        let a = seq(vec![Symbol::Lap(0), Symbol::Lap(0)]);
        let b = seq(vec![Symbol::Lap(1), Symbol::Lap(0)]);
        assert_eq!(signed_lex_compare(&a, &b, Shape::Plus), Ordering::Less);

        // I_1 is orientation reversing for shape +, so the order flips.
        let a = seq(vec![Symbol::Lap(1), Symbol::Lap(0)]);
        let b = seq(vec![Symbol::Lap(1), Symbol::Lap(1)]);
        assert_eq!(signed_lex_compare(&a, &b, Shape::Plus), Ordering::Greater);

        assert_eq!(signed_lex_compare(&a, &a, Shape::Plus), Ordering::Equal);
        assert_eq!(signed_lex_compare(&a, &a, Shape::Minus), Ordering::Equal);
    }

    #[test]
    fn kneading_logistic_four() {
        let f = family_member("logistic", &[("lambda".to_string(), 4.0)].into()).unwrap();
        let k = kneading(&f, 5).unwrap();
        assert_eq!(k.nu.len(), 1);
        // nu_1 = I_1 I_1 I_0 I_0 ...: for x just right of c the image
        // 1 - 4(x-c)^2 still lies in I_1 before the orbit drops to the
        // fixed endpoint. Realizing this sequence in the sawtooth gives the
        // same top-corner parameter as the shorthand I_1 I_0-bar.
        assert_eq!(
            k.nu[0].symbols,
            vec![
                Symbol::Lap(1),
                Symbol::Lap(1),
                Symbol::Lap(0),
                Symbol::Lap(0),
                Symbol::Lap(0)
            ]
        );
    }

    #[test]
    fn kneading_logistic_three() {
        let f = family_member("logistic", &[("lambda".to_string(), 3.0)].into()).unwrap();
        let k = kneading(&f, 4).unwrap();
        assert_eq!(k.nu[0].symbols, vec![Symbol::Lap(1); 4]);
    }

    #[test]
    fn kneading_detects_periodic_tail() {
        let f = family_member("logistic", &[("lambda".to_string(), 1.5)].into()).unwrap();
        let k = kneading(&f, 24).unwrap();
        // nu_1 = I_1 then I_0 forever
        assert_eq!(k.nu[0].symbols[0], Symbol::Lap(1));
        assert!(k.nu[0].symbols[1..].iter().all(|s| *s == Symbol::Lap(0)));
        assert_eq!(k.nu[0].period, Some(1));
    }

    #[test]
    fn critical_relation_forces_symbol_adjacency() {
        // Chebyshev T_3 has f(c_1) = 1 (the fixed endpoint), f(c_2) = -1.
        let f = family_member("chebyshev-3", &std::collections::BTreeMap::new()).unwrap();
        let k = kneading(&f, 6).unwrap();
        assert_eq!(k.nu[0].symbols[0], Symbol::Lap(1));
        assert!(k.nu[0].symbols[1..].iter().all(|s| *s == Symbol::Lap(2)));
        assert_eq!(k.nu[1].symbols[0], Symbol::Lap(2));
        assert!(k.nu[1].symbols[1..].iter().all(|s| *s == Symbol::Lap(0)));
    }

    #[test]
    fn realize_fixed_point_of_decreasing_branch() {
        let g = make_geometry(1, Shape::Plus).unwrap();
        // all-I_1: the orientation reversing fixed point p_1 = e/2 = 3/4.
        let nu = SymbolSequence::with_period(vec![Symbol::Lap(1); 8], 1).unwrap();
        let r = realize_in_sawtooth(&g, &nu).unwrap();
        assert_eq!(r.point, qr(3, 4));
        assert_eq!(r.err, qi(0));

        // all-I_0: the fixed endpoint -e.
        let nu = SymbolSequence::with_period(vec![Symbol::Lap(0); 8], 1).unwrap();
        let r = realize_in_sawtooth(&g, &nu).unwrap();
        assert_eq!(r.point, qr(-3, 2));
    }

    #[test]
    fn realize_with_enclosure_only() {
        let g = make_geometry(1, Shape::Plus).unwrap();
        // I_1 then I_0 x29, no period marker: encloses e within 3*3^-30.
        let mut syms = vec![Symbol::Lap(1)];
        syms.extend(vec![Symbol::Lap(0); 29]);
        let nu = SymbolSequence::new(syms).unwrap();
        let r = realize_in_sawtooth(&g, &nu).unwrap();
        let bound = qi(3) * qr(1, 3).pow(30) * qi(3);
        assert!((r.point.clone() - qr(3, 2)).abs() <= bound);
        assert!(r.err <= qi(3) * qr(1, 3).pow(30));
        // Right-inverse property: itinerary(S, s + 3^-32, 30) = nu.
        let delta = qr(1, 3).pow(32);
        let probe = &r.lo + &delta;
        let it = itinerary(&g, &probe, 30).unwrap();
        assert_eq!(it.symbols, nu.symbols);
    }

    #[test]
    fn realize_rejects_bad_alphabet() {
        // For the sawtooth itself every sequence over {I_0..I_d} is realized
        // (each lap covers the full interval), so the failure mode is an
        // out-of-range lap symbol, reported with its depth.
        let g = make_geometry(1, Shape::Plus).unwrap();
        let nu = seq(vec![Symbol::Lap(0), Symbol::Lap(2), Symbol::Lap(0)]);
        match realize_in_sawtooth(&g, &nu) {
            Err(CoreError::Inadmissible { depth }) => assert_eq!(depth, 1),
            other => panic!("expected inadmissible, got {other:?}"),
        }
    }

    #[test]
    fn itinerary_monotone_in_signed_lex_order() {
        // Dense rational grid on a stunted map with nontrivial plateaus.
        let g = make_geometry(2, Shape::Plus).unwrap();
        let t = StuntedMap::new(StuntedParams::new(g, vec![qi(1), qi(2)]).unwrap());
        let depth = 8;
        let mut prev: Option<SymbolSequence> = None;
        for k in -48..=48i64 {
            let x = qr(k, 18);
            let it = itinerary(&t, &x, depth).unwrap();
            if let Some(p) = &prev {
                assert_ne!(
                    signed_lex_compare(p, &it, Shape::Plus),
                    Ordering::Greater,
                    "monotonicity failed at x = {k}/18"
                );
            }
            prev = Some(it);
        }
    }

    #[test]
    fn render_parse_roundtrip() {
        let s = SymbolSequence::with_period(
            vec![Symbol::Lap(1), Symbol::Lap(0), Symbol::Lap(0), Symbol::Lap(0)],
            1,
        )
        .unwrap();
        let text = s.render();
        assert_eq!(text, "I1 I0 I0 | per(I0)");
        assert_eq!(SymbolSequence::parse(&text).unwrap(), s);

        let t = seq(vec![Symbol::Lap(2), Symbol::Turn(1), Symbol::Lap(0)]);
        assert_eq!(SymbolSequence::parse(&t.render()).unwrap(), t);
    }
}
