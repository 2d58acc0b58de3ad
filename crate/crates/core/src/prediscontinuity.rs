//! Pre-discontinuity strata: the preimages of the discontinuity set as
//! word-labeled families of circular arcs.
//!
//! Level 0 is the boundary of the partition. Level n + 1 is obtained by
//! pulling every level-n arc back through every branch m and keeping the
//! part inside the closure of region m; the word of the new cell is the old
//! word followed by m. A pulled-back piece that coincides with an arc
//! already present at a lower level (or earlier in the same level) is
//! dropped, so each shell holds only the new part of the stratum.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::dedup_points;
use crate::piecewise::{Partition, PiecewiseMap};
use crate::sphere::{Arc, GenCircle, SpherePoint, CIRCLE_TOL};

/// A sequence of region indices.
pub type Word = Vec<u8>;

/// Default cap on the number of arcs in a single stratum.
pub const DEFAULT_ARC_BUDGET: usize = 2_000_000;

/// Preimage circles with a smaller chordal radius are kept as single
/// points. Below this size the circle coefficients lose enough precision
/// that forward images drift from the boundary by more than 1e-8.
pub const MIN_CHORDAL_RADIUS: f64 = 1e-4;

/// Default sampling density (points per unit chordal length) for
/// [`alpha_probe`].
pub const ALPHA_DENSITY: f64 = 200.0;

// One pulled-back cell: word, arcs, collapsed points and collapse count.
type Pulled = (Word, Vec<Arc>, Vec<SpherePoint>, usize);

/// One level of the stratification: the cells C_{n,t}.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArcStratum {
    level: usize,
    cells: BTreeMap<Word, Vec<Arc>>,
    isolated: BTreeMap<Word, Vec<SpherePoint>>,
    collapsed: usize,
}

impl ArcStratum {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn cells(&self) -> &BTreeMap<Word, Vec<Arc>> {
        &self.cells
    }

    /// Isolated points by word: tangencies, and preimages too small to be
    /// kept as circles.
    pub fn isolated(&self) -> &BTreeMap<Word, Vec<SpherePoint>> {
        &self.isolated
    }

    pub fn arcs(&self) -> impl Iterator<Item = &Arc> {
        self.cells.values().flatten()
    }

    pub fn arc_count(&self) -> usize {
        self.cells.values().map(Vec::len).sum()
    }

    /// True when the stratum holds no arcs (isolated points may remain).
    pub fn is_empty(&self) -> bool {
        self.arc_count() == 0
    }

    /// How many pulled-back arcs were too small to keep and became points.
    pub fn collapsed(&self) -> usize {
        self.collapsed
    }

    /// Arc-length-uniform samples at `density` points per unit chordal
    /// length, followed by the isolated points.
    pub fn samples(&self, density: f64) -> Vec<SpherePoint> {
        let mut out: Vec<SpherePoint> = self.arcs().flat_map(|a| a.samples(density)).collect();
        out.extend(self.isolated.values().flatten());
        out
    }
}

/// Level 0: the boundary of each region (its constraint circles clipped by
/// its other constraints), deduplicated, under the empty word.
pub fn boundary_arcs(partition: &Partition) -> ArcStratum {
    let mut coverage = Coverage::default();
    let mut arcs = Vec::new();
    for region in partition.regions() {
        let cs = region.constraints();
        for (i, (k, _)) in cs.iter().enumerate() {
            let others: Vec<_> = cs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| *c).collect();
            let clipped = Arc::full(k).clip(&others).expect("distinct constraints of one region");
            for arc in clipped.arcs {
                arcs.extend(coverage.insert(&arc));
            }
        }
    }
    let mut cells = BTreeMap::new();
    if !arcs.is_empty() {
        cells.insert(Vec::new(), arcs);
    }
    ArcStratum { level: 0, cells, isolated: BTreeMap::new(), collapsed: 0 }
}

/// Tracks which angular intervals of which circles are already present.
#[derive(Clone, Debug, Default)]
struct Coverage {
    keys: HashMap<[i64; 4], Vec<usize>>,
    circles: Vec<(GenCircle, Vec<(f64, f64)>)>,
}

const KEY_STEP: f64 = 1e-6;
const KEY_SLACK: f64 = 2e-9;

impl Coverage {
    fn coords(c: &GenCircle) -> [f64; 4] {
        let (a, b, d) = c.canonical().coefficients();
        [a, b.re, b.im, d]
    }

    fn find(&self, c: &GenCircle) -> Option<usize> {
        let x = Coverage::coords(c);
        let lo: Vec<i64> = x.iter().map(|v| ((v - KEY_SLACK) / KEY_STEP).floor() as i64).collect();
        let hi: Vec<i64> = x.iter().map(|v| ((v + KEY_SLACK) / KEY_STEP).floor() as i64).collect();
        for mask in 0..16u32 {
            let mut key = [0i64; 4];
            let mut skip = false;
            for i in 0..4 {
                let bit = mask >> i & 1 == 1;
                if bit && hi[i] == lo[i] {
                    skip = true;
                    break;
                }
                key[i] = if bit { hi[i] } else { lo[i] };
            }
            if skip {
                continue;
            }
            if let Some(ids) = self.keys.get(&key) {
                if let Some(&id) = ids.iter().find(|&&id| self.circles[id].0.same_locus(c)) {
                    return Some(id);
                }
            }
        }
        None
    }

    /// Returns the parts of `arc` not yet covered and records them.
    fn insert(&mut self, arc: &Arc) -> Vec<Arc> {
        match self.find(arc.circle()) {
            Some(id) => {
                let fresh = arc.subtract(&self.circles[id].1);
                self.circles[id].1.extend(fresh.iter().map(Arc::interval));
                fresh
            }
            None => {
                let x = Coverage::coords(arc.circle());
                let key = x.map(|v| (v / KEY_STEP).floor() as i64);
                self.keys.entry(key).or_default().push(self.circles.len());
                self.circles.push((*arc.circle(), vec![arc.interval()]));
                vec![*arc]
            }
        }
    }
}

/// The cumulative stratification PD_0 ⊂ PD_1 ⊂ … ⊂ PD_N, kept as shells.
#[derive(Clone, Debug)]
pub struct Strata {
    shells: Vec<ArcStratum>,
    coverage: Coverage,
    stabilized_at: Option<usize>,
    // once pieces collapse to points, an empty shell no longer means the
    // strata have stopped growing
    lossy: bool,
}

impl Strata {
    /// Starts the stratification at level 0.
    pub fn new(f: &PiecewiseMap) -> Self {
        let level0 = boundary_arcs(f.partition());
        let mut coverage = Coverage::default();
        for arc in level0.arcs() {
            coverage.insert(arc);
        }
        let stabilized_at = if level0.is_empty() { Some(0) } else { None };
        Strata { shells: vec![level0], coverage, stabilized_at, lossy: false }
    }

    /// Adds the next shell.
    pub fn extend(&mut self, f: &PiecewiseMap, budget: usize) -> Result<()> {
        let last = self.shells.last().expect("level 0 is always present");
        let level = last.level + 1;
        let m = f.branches().len();
        let jobs: Vec<(&Word, &Vec<Arc>, usize)> =
            last.cells.iter().flat_map(|(w, arcs)| (0..m).map(move |b| (w, arcs, b))).collect();
        let pulled: Vec<Result<Pulled>> = jobs
            .par_iter()
            .map(|&(w, arcs, b)| {
                let inv = f.branch(b).inverse();
                let constraints = f.partition().regions()[b].constraints();
                let mut out = Vec::new();
                let mut points = Vec::new();
                let mut collapsed = 0;
                let region = &f.partition().regions()[b];
                for arc in arcs {
                    let mapped = arc.map(&inv).and_then(|a| {
                        if a.chart().chordal_speed() < MIN_CHORDAL_RADIUS {
                            Err(Error::DegenerateCircle(a.chart().chordal_speed()))
                        } else {
                            Ok(a)
                        }
                    });
                    match mapped.and_then(|a| a.clip(constraints)) {
                        Ok(clipped) => {
                            out.extend(clipped.arcs);
                            points.extend(clipped.points);
                        }
                        // too small to keep as a circle: keep it as a point
                        Err(Error::DegenerateCircle(_)) => {
                            let p = inv.apply(arc.midpoint());
                            if region.contains_closed(p, CIRCLE_TOL) {
                                points.push(p);
                                collapsed += 1;
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
                let mut word = w.clone();
                word.push(b as u8);
                Ok((word, out, points, collapsed))
            })
            .collect();
        let raw: usize = pulled.iter().map(|r| r.as_ref().map_or(0, |x| x.1.len())).sum();
        if raw > 4 * budget {
            return Err(Error::Truncated { level, count: raw, budget });
        }
        let mut cells = BTreeMap::new();
        let mut isolated = BTreeMap::new();
        let mut count = 0;
        let mut collapsed = 0;
        for item in pulled {
            let (word, arcs, points, lost) = item?;
            collapsed += lost;
            let mut fresh = Vec::new();
            for arc in &arcs {
                fresh.extend(self.coverage.insert(arc));
            }
            count += fresh.len();
            if count > budget {
                return Err(Error::Truncated { level, count, budget });
            }
            if !fresh.is_empty() {
                cells.insert(word.clone(), fresh);
            }
            if !points.is_empty() {
                isolated.insert(word, points);
            }
        }
        let shell = ArcStratum { level, cells, isolated, collapsed };
        self.lossy |= collapsed > 0;
        if shell.is_empty() && !self.lossy && self.stabilized_at.is_none() {
            self.stabilized_at = Some(level - 1);
        }
        self.shells.push(shell);
        Ok(())
    }

    /// Shells 0..=n, in order.
    pub fn shells(&self) -> &[ArcStratum] {
        &self.shells
    }

    pub fn shell(&self, n: usize) -> Option<&ArcStratum> {
        self.shells.get(n)
    }

    /// Deepest computed level.
    pub fn depth(&self) -> usize {
        self.shells.len() - 1
    }

    /// First n with PD_{n+1} = PD_n, if observed.
    pub fn stabilized_at(&self) -> Option<usize> {
        self.stabilized_at
    }

    /// All arcs of levels 0..=n.
    pub fn arcs_up_to(&self, n: usize) -> impl Iterator<Item = &Arc> {
        self.shells.iter().take(n + 1).flat_map(ArcStratum::arcs)
    }

    pub fn arc_count(&self) -> usize {
        self.shells.iter().map(ArcStratum::arc_count).sum()
    }

    /// Samples of PD_n, deduplicated at chordal 1e-9.
    pub fn samples_up_to(&self, n: usize, density: f64) -> Vec<SpherePoint> {
        let pts: Vec<SpherePoint> = self.arcs_up_to(n).flat_map(|a| a.samples(density)).collect();
        dedup_points(pts, 1e-9)
    }

    /// Chordal distance from a point to PD_n (exact, over all arcs).
    pub fn distance_up_to(&self, n: usize, p: SpherePoint) -> f64 {
        self.arcs_up_to(n).map(|a| a.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// Line-delimited export: `level word a b_re b_im d start_re start_im
    /// mid_re mid_im end_re end_im`, one arc per line, with `-` for the
    /// empty word and `inf inf` for the point at infinity.
    pub fn export(&self) -> String {
        let mut out = String::from("# level word a b_re b_im d start_re start_im mid_re mid_im end_re end_im\n");
        for shell in &self.shells {
            for (word, arcs) in &shell.cells {
                let w: String = if word.is_empty() { "-".into() } else { word.iter().map(|s| s.to_string()).collect() };
                for arc in arcs {
                    let (a, b, d) = arc.circle().coefficients();
                    let _ = write!(out, "{} {} {:.12e} {:.12e} {:.12e} {:.12e}", shell.level, w, a, b.re, b.im, d);
                    for p in [arc.point_at(0.0), arc.point_at(0.5), arc.point_at(1.0)] {
                        match p {
                            SpherePoint::Finite(z) => {
                                let _ = write!(out, " {:.12e} {:.12e}", z.re, z.im);
                            }
                            SpherePoint::Infinity => out.push_str(" inf inf"),
                        }
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Computes the shells of levels 0..=n.
pub fn pd_up_to(f: &PiecewiseMap, n: usize) -> Result<Strata> {
    pd_up_to_with_budget(f, n, DEFAULT_ARC_BUDGET)
}

pub fn pd_up_to_with_budget(f: &PiecewiseMap, n: usize, budget: usize) -> Result<Strata> {
    let mut s = Strata::new(f);
    for _ in 0..n {
        s.extend(f, budget)?;
    }
    Ok(s)
}

/// Like [`pd_up_to`], but keeps the levels computed before a truncation.
pub fn pd_partial(f: &PiecewiseMap, n: usize, budget: usize) -> (Strata, Option<Error>) {
    let mut s = Strata::new(f);
    for _ in 0..n {
        if let Err(e) = s.extend(f, budget) {
            return (s, Some(e));
        }
    }
    (s, None)
}

/// The level-n pullback of the level-(n−1) stratum, computed on its own.
pub fn pullback_stratum(f: &PiecewiseMap, n: usize) -> Result<ArcStratum> {
    let s = pd_up_to(f, n)?;
    Ok(s.shells[n].clone())
}

/// Samples of PD_n at `density` points per unit chordal length.
pub fn sample_pd(f: &PiecewiseMap, n: usize, density: f64) -> Result<Vec<SpherePoint>> {
    Ok(pd_up_to(f, n)?.samples_up_to(n, density))
}

/// Samples of the deepest shell F^{-n}(∂R) only.
pub fn alpha_probe(f: &PiecewiseMap, n: usize) -> Result<Vec<SpherePoint>> {
    alpha_probe_with_density(f, n, ALPHA_DENSITY)
}

pub fn alpha_probe_with_density(f: &PiecewiseMap, n: usize, density: f64) -> Result<Vec<SpherePoint>> {
    let s = pd_up_to(f, n)?;
    Ok(dedup_points(s.shells[n].samples(density), 1e-9))
}
