//! The group generated by the branches: reduced words, an inner
//! approximation of the limit set, Schottky pairings from isometric circles,
//! and probes comparing α- and ω-limits of the piecewise map with the limit
//! set.

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::{dedup_points, PointIndex};
use crate::piecewise::PiecewiseMap;
use crate::prediscontinuity::{boundary_arcs, pd_partial, ALPHA_DENSITY, DEFAULT_ARC_BUDGET};
use crate::sphere::{circle_intersect, Arc, GenCircle, Moebius, MoebiusKind, SpherePoint};

/// Default cap on the number of enumerated words.
pub const WORD_BUDGET: usize = 4_000_000;

/// One letter: a generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    /// Position in the alphabet g0, g0⁻¹, g1, g1⁻¹, …
    fn rank(self) -> usize {
        2 * self.generator + self.inverse as usize
    }
}

impl fmt::Display for Letter {
    // a, A, b, B, … for up to 26 generators, g12 / G12 beyond
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generator < 26 {
            let c = (b'a' + self.generator as u8) as char;
            write!(f, "{}", if self.inverse { c.to_ascii_uppercase() } else { c })
        } else {
            write!(f, "{}{}", if self.inverse { 'G' } else { 'g' }, self.generator)
        }
    }
}

/// A freely reduced word together with the map it evaluates to. The word
/// `l1 l2 … ln` evaluates to `l1 ∘ l2 ∘ … ∘ ln`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupWord {
    letters: Vec<Letter>,
    evaluated: Moebius,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord { letters: Vec::new(), evaluated: Moebius::identity() }
    }

    pub fn letter(gens: &[Moebius], l: Letter) -> Self {
        let m = &gens[l.generator];
        GroupWord { letters: vec![l], evaluated: if l.inverse { m.inverse() } else { *m } }
    }

    /// Evaluates a letter sequence, reducing it first.
    pub fn from_letters(gens: &[Moebius], letters: &[Letter]) -> Self {
        letters.iter().fold(GroupWord::identity(), |w, &l| w.concat(&GroupWord::letter(gens, l)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn evaluated(&self) -> &Moebius {
        &self.evaluated
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[1] != p[0].inv())
    }

    /// The reduced product `self · other`.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut cancel = 0;
        while cancel < self.len().min(other.len())
            && self.letters[self.len() - 1 - cancel] == other.letters[cancel].inv()
        {
            cancel += 1;
        }
        let mut letters = self.letters[..self.len() - cancel].to_vec();
        letters.extend_from_slice(&other.letters[cancel..]);
        GroupWord { letters, evaluated: self.evaluated.compose(&other.evaluated) }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect(), evaluated: self.evaluated.inverse() }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        self.letters.iter().try_for_each(|l| write!(f, "{l}"))
    }
}

/// All reduced words of length 1..=`max_len`, shortest first and
/// lexicographic in the alphabet g0, g0⁻¹, g1, g1⁻¹, … within a length.
pub fn enumerate_words(gens: &[Moebius], max_len: usize) -> Result<Vec<GroupWord>> {
    enumerate_words_with_budget(gens, max_len, WORD_BUDGET)
}

pub fn enumerate_words_with_budget(gens: &[Moebius], max_len: usize, budget: usize) -> Result<Vec<GroupWord>> {
    if max_len == 0 {
        return Err(Error::validation("word length", "the maximal word length must be at least 1"));
    }
    if gens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let alphabet: Vec<Letter> = (0..gens.len()).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect();
    let (k, mut total) = (alphabet.len(), alphabet.len());
    for n in 2..=max_len {
        total = total.saturating_add(k * (k - 1).pow(n as u32 - 1));
        if total > budget {
            return Err(Error::Truncated { level: n, count: total, budget });
        }
    }
    let mut level: Vec<GroupWord> = alphabet.iter().map(|&l| GroupWord::letter(gens, l)).collect();
    let mut out = level.clone();
    for _ in 1..max_len {
        level = level
            .par_iter()
            .flat_map_iter(|w| {
                let last = *w.letters.last().expect("words are nonempty");
                alphabet.iter().filter(move |&&l| l != last.inv()).map(move |&l| {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    let g = &gens[l.generator];
                    let step = if l.inverse { g.inverse() } else { *g };
                    GroupWord { letters, evaluated: w.evaluated.compose(&step) }
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    debug_assert!(out.windows(2).all(|p| {
        let key = |w: &GroupWord| (w.len(), w.letters.iter().map(|l| l.rank()).collect::<Vec<_>>());
        key(&p[0]) < key(&p[1])
    }));
    Ok(out)
}

/// Attracting (or parabolic) fixed points of group elements: an inner
/// approximation of the limit set.
#[derive(Clone, Debug)]
pub struct LimitSetApprox {
    points: Vec<SpherePoint>,
    max_len: usize,
    dedup_eps: f64,
    index: PointIndex,
}

impl LimitSetApprox {
    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn dedup_eps(&self) -> f64 {
        self.dedup_eps
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Chordal distance from `p` to the nearest point (∞ if empty).
    pub fn distance(&self, p: SpherePoint) -> f64 {
        self.index.distance(p)
    }

    /// Directed Hausdorff distance from `points` to the approximation.
    pub fn directed_from(&self, points: &[SpherePoint]) -> f64 {
        self.index.max_distance(points)
    }

    /// One point per line, `re im`, with `inf inf` for ∞.
    pub fn export(&self) -> String {
        let mut out =
            format!("# limit set approximation: words up to length {}, dedup {:e}\n", self.max_len, self.dedup_eps);
        for p in &self.points {
            match p {
                SpherePoint::Finite(z) => {
                    let _ = writeln!(out, "{:.12e} {:.12e}", z.re, z.im);
                }
                SpherePoint::Infinity => out.push_str("inf inf\n"),
            }
        }
        out
    }
}

/// Collects the attracting fixed point of every loxodromic or hyperbolic
/// word, and the fixed point of every parabolic word, of length ≤ `max_len`.
pub fn limit_set_approx(gens: &[Moebius], max_len: usize, dedup_eps: f64) -> Result<LimitSetApprox> {
    if max_len < 2 {
        return Err(Error::validation("word length", "limit sets need words of length at least 2"));
    }
    let words = enumerate_words(gens, max_len)?;
    let candidates: Vec<SpherePoint> = words
        .par_iter()
        .filter_map(|w| {
            let cl = w.evaluated.classify();
            match cl.kind {
                MoebiusKind::Hyperbolic | MoebiusKind::Loxodromic => cl.attracting,
                MoebiusKind::Parabolic => cl.fixed_points.first().map(|f| f.point),
                MoebiusKind::Identity | MoebiusKind::Elliptic => None,
            }
        })
        .collect();
    let points = dedup_points(candidates, dedup_eps);
    let index = PointIndex::new(&points);
    Ok(LimitSetApprox { points, max_len, dedup_eps, index })
}

/// The isometric circle |cz + d| = 1 of a normalized map, if c ≠ 0.
pub fn isometric_circle(m: &Moebius) -> Option<(Complex64, f64)> {
    let [_, _, c, d] = m.coefficients();
    if c.norm() < 1e-12 {
        return None;
    }
    Some((-d / c, 1.0 / c.norm()))
}

/// A ping-pong pairing of four disjoint discs.
#[derive(Clone, Debug, PartialEq)]
pub struct SchottkyPairing {
    /// Isometric circles of f, f⁻¹, g, g⁻¹; f maps the first onto the
    /// second and g the third onto the fourth.
    pub circles: [GenCircle; 4],
    discs: [(Complex64, f64); 4],
    /// Whether the supplied discontinuity circle lies in the common exterior.
    pub boundary_in_fundamental_region: Option<bool>,
}

impl SchottkyPairing {
    /// Whether `p` lies in the common exterior of the four closed discs.
    pub fn in_fundamental_region(&self, p: SpherePoint) -> bool {
        match p {
            SpherePoint::Infinity => true,
            SpherePoint::Finite(z) => self.discs.iter().all(|&(c, r)| (z - c).norm() > r),
        }
    }

    /// A point of the fundamental region: the centroid of the disc centers
    /// when it is outside all discs, ∞ otherwise.
    pub fn base_point(&self) -> SpherePoint {
        let c = self.discs.iter().map(|d| d.0).sum::<Complex64>() / 4.0;
        let p = SpherePoint::Finite(c);
        if self.in_fundamental_region(p) {
            p
        } else {
            SpherePoint::Infinity
        }
    }
}

const SCHOTTKY_SAMPLES: usize = 64;
const SCHOTTKY_TOL: f64 = 1e-9;

/// Looks for a Schottky pairing among the isometric circles of f and g.
/// `None` means no pairing was detected, not that the group is not Schottky.
pub fn schottky_check(f: &Moebius, g: &Moebius, boundary: Option<&GenCircle>) -> Option<SchottkyPairing> {
    let (fi, gi) = (f.inverse(), g.inverse());
    let discs = [isometric_circle(f)?, isometric_circle(&fi)?, isometric_circle(g)?, isometric_circle(&gi)?];
    for i in 0..4 {
        for j in i + 1..4 {
            if (discs[i].0 - discs[j].0).norm() <= discs[i].1 + discs[j].1 + SCHOTTKY_TOL {
                return None;
            }
        }
    }
    for (m, src, dst) in [(f, 0, 1), (&fi, 1, 0), (g, 2, 3), (&gi, 3, 2)] {
        let (c, r) = discs[src];
        let (c2, r2) = discs[dst];
        for k in 0..SCHOTTKY_SAMPLES {
            let z = c + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / SCHOTTKY_SAMPLES as f64);
            let w = m.apply(SpherePoint::Finite(z)).finite()?;
            if ((w - c2).norm() - r2).abs() > SCHOTTKY_TOL * (1.0 + r2) {
                return None;
            }
        }
        // ∞ lies outside every disc and must land strictly inside the target
        let w = m.apply(SpherePoint::Infinity).finite()?;
        if (w - c2).norm() >= r2 {
            return None;
        }
    }
    let circles = discs.map(|(c, r)| GenCircle::circle(c, r).expect("radius is positive"));
    let mut pairing = SchottkyPairing { circles, discs, boundary_in_fundamental_region: None };
    if let Some(b) = boundary {
        let samples = Arc::full(b).interior_samples(256);
        let inside = samples.iter().all(|&p| pairing.in_fundamental_region(p))
            && pairing.circles.iter().all(|c| circle_intersect(b, c).is_ok_and(|pts| pts.is_empty()));
        pairing.boundary_in_fundamental_region = Some(inside);
    }
    Some(pairing)
}

/// One row of the α-limit probe.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaRow {
    pub level: usize,
    pub arcs: usize,
    pub samples: usize,
    /// Directed distance from the shell to the limit-set approximation;
    /// `None` when the shell is empty.
    pub directed: Option<f64>,
}

/// α-limit probe: deep shells of the pre-discontinuity set against the
/// limit set of the branch group.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaReport {
    pub word_len: usize,
    pub limit_points: usize,
    /// Minimal chordal distance between ∂R and the limit-set approximation.
    pub boundary_distance: f64,
    pub rows: Vec<AlphaRow>,
    /// Set when the strata were cut short; rows stop at the last full level.
    pub truncated: Option<String>,
}

impl AlphaReport {
    /// The hypothesis ∂R ∩ Λ = ∅, judged at `margin`.
    pub fn hypothesis_holds(&self, margin: f64) -> bool {
        self.boundary_distance > margin
    }
}

impl fmt::Display for AlphaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# limit set: words <= {}, {} points", self.word_len, self.limit_points)?;
        writeln!(f, "# dist(boundary, limit set) = {:.6e}", self.boundary_distance)?;
        if let Some(t) = &self.truncated {
            writeln!(f, "# truncated: {t}")?;
        }
        writeln!(f, "{:>6} {:>10} {:>10} {:>14}", "level", "arcs", "samples", "directed")?;
        for r in &self.rows {
            match r.directed {
                Some(d) => writeln!(f, "{:>6} {:>10} {:>10} {:>14.6e}", r.level, r.arcs, r.samples, d)?,
                None => writeln!(f, "{:>6} {:>10} {:>10} {:>14}", r.level, r.arcs, r.samples, "empty")?,
            }
        }
        Ok(())
    }
}

/// Minimal distance between ∂R and a limit-set approximation, exact on the
/// boundary arcs.
pub fn boundary_limit_distance(f: &PiecewiseMap, limit: &LimitSetApprox) -> f64 {
    let arcs: Vec<Arc> = boundary_arcs(f.partition()).arcs().cloned().collect();
    limit
        .points()
        .par_iter()
        .map(|&p| arcs.iter().map(|a| a.distance(p)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min)
}

/// Reports, for each level in `levels`, the directed distance from the
/// level's shell F^{-n}(∂R) to the limit set, together with the hypothesis
/// distance between ∂R and the limit set.
pub fn alpha_limit_probe(f: &PiecewiseMap, levels: &[usize], word_len: usize) -> Result<AlphaReport> {
    let limit = limit_set_approx(f.branches(), word_len, 1e-9)?;
    let boundary_distance = boundary_limit_distance(f, &limit);
    let deepest = levels.iter().copied().max().unwrap_or(0);
    let (strata, err) = pd_partial(f, deepest, DEFAULT_ARC_BUDGET);
    let mut rows = Vec::new();
    for &n in levels {
        let Some(shell) = strata.shell(n) else { continue };
        let samples = dedup_points(shell.samples(ALPHA_DENSITY), 1e-9);
        let directed = (!samples.is_empty()).then(|| limit.directed_from(&samples));
        rows.push(AlphaRow { level: n, arcs: shell.arc_count(), samples: samples.len(), directed });
    }
    Ok(AlphaReport {
        word_len,
        limit_points: limit.len(),
        boundary_distance,
        rows,
        truncated: err.map(|e| e.to_string()),
    })
}

/// ω-limit probe result.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaReport {
    pub iterations: usize,
    pub word_len: usize,
    /// Per seed: number of accumulation-point clusters and their directed
    /// distance to the limit set.
    pub per_seed: Vec<(usize, f64)>,
    pub max: f64,
}

impl fmt::Display for OmegaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# iterations {}, words <= {}", self.iterations, self.word_len)?;
        writeln!(f, "{:>6} {:>10} {:>14}", "seed", "clusters", "directed")?;
        for (i, (k, d)) in self.per_seed.iter().enumerate() {
            writeln!(f, "{:>6} {:>10} {:>14.6e}", i, k, d)?;
        }
        writeln!(f, "# max {:.6e}", self.max)
    }
}

/// Cluster radius for accumulation points of an orbit tail.
pub const OMEGA_CLUSTER: f64 = 1e-3;

/// Estimates accumulation points of each seed's orbit from the last 20% of
/// `n_iter` iterates and measures their distance to the limit set.
pub fn omega_limit_probe(
    f: &PiecewiseMap,
    seeds: &[SpherePoint],
    n_iter: usize,
    word_len: usize,
) -> Result<OmegaReport> {
    if n_iter < 500 {
        return Err(Error::validation("iteration count", format!("{n_iter} is below 500")));
    }
    let limit = limit_set_approx(f.branches(), word_len, 1e-9)?;
    let per_seed: Vec<(usize, f64)> = seeds
        .par_iter()
        .map(|&s| {
            let orbit = f.orbit(s, n_iter);
            let tail = orbit[n_iter - n_iter / 5..].to_vec();
            let clusters = dedup_points(tail, OMEGA_CLUSTER);
            (clusters.len(), limit.directed_from(&clusters))
        })
        .collect();
    let max = per_seed.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(OmegaReport { iterations: n_iter, word_len, per_seed, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{gallery, schottky_maps, spider_maps};
    use std::f64::consts::TAU;

    use crate::sphere::chordal;

    fn spiders() -> (Moebius, Moebius) {
        let (f, g) = spider_maps();
        (f.to_map().unwrap(), g.to_map().unwrap())
    }

    fn schottkys(lambda: f64) -> (Moebius, Moebius) {
        let (f, g) = schottky_maps(lambda);
        (f.to_map().unwrap(), g.to_map().unwrap())
    }

    fn two_z() -> Moebius {
        Moebius::scaling(Complex64::new(2.0, 0.0)).unwrap()
    }

    #[test]
    fn word_counts() {
        let g = two_z();
        let h = Moebius::translation(Complex64::new(1.0, 0.0));
        let one = enumerate_words(&[g], 3).unwrap();
        let names: Vec<String> = one.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["a", "A", "aa", "AA", "aaa", "AAA"]);
        assert_eq!(enumerate_words(&[g, h], 1).unwrap().len(), 4);
        let two = enumerate_words(&[g, h], 2).unwrap();
        assert_eq!(two.len(), 16);
        assert!(two.iter().all(GroupWord::is_reduced));
        let names: Vec<String> = two[4..].iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["aa", "ab", "aB", "AA", "Ab", "AB", "ba", "bA", "bb", "Ba", "BA", "BB"]);
    }

    #[test]
    fn word_budget_truncates() {
        let (f, g) = spiders();
        assert!(matches!(enumerate_words_with_budget(&[f, g], 10, 1000), Err(Error::Truncated { level: 6, .. })));
        assert!(enumerate_words(&[f], 0).is_err());
    }

    #[test]
    fn concat_reduces_and_evaluates() {
        let (f, g) = spiders();
        let gens = [f, g];
        let a = Letter::new(0, false);
        let b = Letter::new(1, false);
        let u = GroupWord::from_letters(&gens, &[a, b, b]);
        let v = GroupWord::from_letters(&gens, &[b.inv(), a]);
        let uv = u.concat(&v);
        assert_eq!(uv.to_string(), "aba");
        let direct = f.compose(&g).compose(&f);
        let p = SpherePoint::new(0.3, -0.2);
        assert!(chordal(uv.evaluated().apply(p), direct.apply(p)) < 1e-12);
        assert!(u.concat(&u.inverse()).is_empty());
        assert!(u.concat(&u.inverse()).evaluated().is_identity());
    }

    #[test]
    fn scaling_group_limit_set() {
        let l = limit_set_approx(&[two_z()], 4, 1e-9).unwrap();
        assert_eq!(l.len(), 2);
        assert!(l.points().contains(&SpherePoint::Infinity));
        assert!(l.points().iter().any(|&p| chordal(p, SpherePoint::new(0.0, 0.0)) < 1e-12));
    }

    #[test]
    fn spider_limit_set_is_the_unit_circle() {
        let (f, g) = spiders();
        let l = limit_set_approx(&[f, g], 8, 1e-9).unwrap();
        assert!(l.len() > 1000);
        for p in l.points() {
            let z = p.finite().unwrap();
            assert!((z.norm() - 1.0).abs() < 1e-6, "{z}");
        }
    }

    #[test]
    fn schottky_limit_set_avoids_the_boundary() {
        let (f, g) = schottkys(0.6);
        let l = limit_set_approx(&[f, g], 8, 1e-9).unwrap();
        let circle = GenCircle::circle(Complex64::new(0.0, 1.0), 0.5).unwrap();
        // oracle: a dense polygon on the circle
        let ring: Vec<SpherePoint> = (0..20_000)
            .map(|k| {
                SpherePoint::Finite(Complex64::new(0.0, 1.0) + Complex64::from_polar(0.5, k as f64 * TAU / 20_000.0))
            })
            .collect();
        let oracle = l
            .points()
            .iter()
            .map(|&p| ring.iter().map(|&q| chordal(p, q)).fold(f64::INFINITY, f64::min))
            .fold(f64::INFINITY, f64::min);
        assert!(oracle >= 0.1, "{oracle}");
        let f_map = gallery("fig_schottky").unwrap().map().clone();
        let exact = boundary_limit_distance(&f_map, &l);
        assert!((exact - oracle).abs() < 1e-3, "{exact} vs {oracle}");
        assert!(circle.form(SpherePoint::new(0.0, 1.0)) < 0.0);
    }

    #[test]
    fn schottky_check_examples() {
        let s = gallery("fig_schottky").unwrap();
        let [f, g] = s.map().branches() else { panic!() };
        let boundary = s.map().partition().boundary_circles()[0];
        let p = schottky_check(f, g, Some(&boundary)).unwrap();
        assert_eq!(p.boundary_in_fundamental_region, Some(true));
        assert!(p.in_fundamental_region(p.base_point()));
        assert!(schottky_check(&two_z(), &two_z(), None).is_none());
        let (f, g) = spiders();
        assert!(schottky_check(&f, &g, None).is_none());
    }

    #[test]
    fn isometric_circle_of_inversion_pair() {
        // z -> 3 + 0.36/(z + 3) has isometric circle |z + 3| = 0.6
        let (f, _) = schottkys(0.6);
        let (c, r) = isometric_circle(&f).unwrap();
        assert!((c - Complex64::new(-3.0, 0.0)).norm() < 1e-12 && (r - 0.6).abs() < 1e-12);
        assert!(isometric_circle(&two_z()).is_none());
    }

    #[test]
    fn alpha_probe_examples() {
        let unstable = gallery("fig_spidunstable").unwrap();
        let r = alpha_limit_probe(unstable.map(), &[4], 6).unwrap();
        assert!(!r.hypothesis_holds(0.02));
        assert!(r.boundary_distance < 0.02);

        let conn = gallery("fig_conn_left").unwrap();
        let r = alpha_limit_probe(conn.map(), &[8], 6).unwrap();
        assert!(r.rows.iter().all(|row| row.directed.is_none_or(|d| d <= 0.05)));
    }

    #[test]
    fn omega_of_a_fixed_point_is_in_the_limit_set() {
        let s = gallery("fig_attr").unwrap();
        let seed = SpherePoint::new(0.0, 0.0);
        assert_eq!(s.map().eval(seed), seed);
        let r = omega_limit_probe(s.map(), &[seed], 500, 6).unwrap();
        assert!(r.max < 1e-12, "{}", r.max);
        assert!(omega_limit_probe(s.map(), &[seed], 499, 6).is_err());
    }
}
