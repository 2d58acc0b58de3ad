use std::f64::consts::TAU;

use super::circle::{intersection_angles, map_circle, CircleChart, GenCircle, Side, CIRCLE_TOL};
use super::moebius::Moebius;
use super::point::{chordal, SpherePoint};
use crate::error::Result;

/// Spans within this much of 2π are full circles.
const FULL_EPS: f64 = 1e-12;
/// Pieces shorter than this (chordally) collapse to points.
const MIN_LENGTH: f64 = 1e-10;

/// A closed sub-arc of a generalized circle.
///
/// The arc runs counterclockwise in the chart of its (canonical) parent from
/// angle `start` through `start + span`. A span of 2π is the full circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    circle: GenCircle,
    chart: CircleChart,
    start: f64,
    span: f64,
}

impl Arc {
    pub fn full(circle: &GenCircle) -> Self {
        let circle = circle.canonical();
        Arc { chart: circle.chart(), circle, start: 0.0, span: TAU }
    }

    /// An arc of `circle` (made canonical) from angle `start` through `span`
    /// radians in its chart.
    pub fn new(circle: &GenCircle, start: f64, span: f64) -> Self {
        let circle = circle.canonical();
        let span = span.clamp(0.0, TAU);
        let (start, span) = if span >= TAU - FULL_EPS { (0.0, TAU) } else { (start.rem_euclid(TAU), span) };
        Arc { chart: circle.chart(), circle, start, span }
    }

    fn on_chart(circle: GenCircle, chart: CircleChart, start: f64, span: f64) -> Self {
        if span >= TAU - FULL_EPS {
            Arc { circle, chart, start: 0.0, span: TAU }
        } else {
            Arc { circle, chart, start: start.rem_euclid(TAU), span }
        }
    }

    pub fn circle(&self) -> &GenCircle {
        &self.circle
    }

    pub fn chart(&self) -> &CircleChart {
        &self.chart
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn is_full(&self) -> bool {
        self.span >= TAU
    }

    /// The point at fraction `t ∈ [0, 1]` of the arc.
    pub fn point_at(&self, t: f64) -> SpherePoint {
        self.chart.point(self.start + t * self.span)
    }

    pub fn endpoints(&self) -> (SpherePoint, SpherePoint) {
        (self.point_at(0.0), self.point_at(1.0))
    }

    pub fn midpoint(&self) -> SpherePoint {
        self.point_at(0.5)
    }

    pub fn chordal_length(&self) -> f64 {
        self.span * self.chart.chordal_speed()
    }

    /// Whether the chart angle θ lies on the arc (with angular slack).
    pub fn contains_angle(&self, theta: f64, slack: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let off = (theta - self.start).rem_euclid(TAU);
        off <= self.span + slack || off >= TAU - slack
    }

    /// Exact chordal distance from a point to the arc.
    pub fn distance(&self, p: SpherePoint) -> f64 {
        let w = self.chart.to_std().apply(p);
        let theta = match w {
            SpherePoint::Finite(w) if w.norm() > 0.0 => w.arg(),
            // the chart poles are equidistant from every point of the circle
            _ => return chordal(p, self.point_at(0.0)),
        };
        if self.contains_angle(theta, 0.0) {
            chordal(p, self.chart.point(theta))
        } else {
            let (a, b) = self.endpoints();
            chordal(p, a).min(chordal(p, b))
        }
    }

    /// `n` points at parameter fractions (k + 0.5)/n.
    pub fn interior_samples(&self, n: usize) -> Vec<SpherePoint> {
        (0..n).map(|k| self.point_at((k as f64 + 0.5) / n as f64)).collect()
    }

    /// Samples spaced at most `1/density` apart in chordal length, including
    /// the endpoints of a proper arc.
    pub fn samples(&self, density: f64) -> Vec<SpherePoint> {
        let n = ((self.chordal_length() * density).ceil() as usize).max(1);
        if self.is_full() {
            (0..n.max(3)).map(|k| self.point_at(k as f64 / n.max(3) as f64)).collect()
        } else {
            (0..=n).map(|k| self.point_at(k as f64 / n as f64)).collect()
        }
    }

    /// Image of the arc under a Möbius map; fails like [`map_circle`].
    pub fn map(&self, m: &Moebius) -> Result<Arc> {
        let circle = map_circle(m, &self.circle)?.canonical();
        let chart = circle.chart();
        if self.is_full() {
            return Ok(Arc::on_chart(circle, chart, 0.0, TAU));
        }
        let t0 = chart.angle(m.apply(self.point_at(0.0)));
        let tm = chart.angle(m.apply(self.point_at(0.5)));
        let t1 = chart.angle(m.apply(self.point_at(1.0)));
        let ccw = (t1 - t0).rem_euclid(TAU);
        let mid = (tm - t0).rem_euclid(TAU);
        Ok(if mid <= ccw { Arc::on_chart(circle, chart, t0, ccw) } else { Arc::on_chart(circle, chart, t1, TAU - ccw) })
    }

    /// Restricts the arc to the closed region cut out by `constraints`.
    ///
    /// Pieces that degenerate to a point (tangencies, or pieces shorter than
    /// 1e-10) are returned separately.
    pub fn clip(&self, constraints: &[(GenCircle, Side)]) -> Result<Clipped> {
        let mut pieces = vec![(self.start, self.start + self.span)];
        let mut points = Vec::new();
        let speed = self.chart.chordal_speed();
        for (k, side) in constraints {
            if pieces.is_empty() {
                break;
            }
            if k.same_locus(&self.circle) {
                continue;
            }
            let cut = intersection_angles(&self.circle, k)?;
            let inside = |theta: f64| side.holds(k.form(self.chart.point(theta)));
            if cut.tangent {
                let t = cut.angles[0];
                if !inside(t + std::f64::consts::PI) {
                    if pieces.iter().any(|&(s, e)| contains(s, e, t, 1e-12)) {
                        points.push(self.chart.point(t));
                    }
                    pieces.clear();
                }
                continue;
            }
            let mut next = Vec::with_capacity(pieces.len() + 2);
            for (s, e) in pieces {
                let mut bounds = vec![s];
                let mut cuts: Vec<f64> =
                    cut.angles.iter().map(|&t| s + (t - s).rem_euclid(TAU)).filter(|&t| t > s && t < e).collect();
                cuts.sort_by(f64::total_cmp);
                bounds.extend(cuts);
                bounds.push(e);
                for w in bounds.windows(2) {
                    let (ps, pe) = (w[0], w[1]);
                    let value = k.form(self.chart.point(0.5 * (ps + pe)));
                    if side.holds(value) || (side.holds_closed(value, 0.0) && (pe - ps) * speed < MIN_LENGTH) {
                        next.push((ps, pe));
                    }
                }
            }
            pieces = next;
        }
        let pieces = merge(pieces, self.is_full());
        let mut arcs = Vec::with_capacity(pieces.len());
        for (s, e) in pieces {
            if (e - s) * speed < MIN_LENGTH {
                points.push(self.chart.point(0.5 * (s + e)));
            } else {
                arcs.push(Arc::on_chart(self.circle, self.chart, s, e - s));
            }
        }
        points.retain(|p| constraints.iter().all(|(k, side)| side.holds_closed(k.form(*p), CIRCLE_TOL)));
        Ok(Clipped { arcs, points })
    }

    /// Removes the angular intervals `covered` (on the same chart) from the
    /// arc. Pieces shorter than 1e-9 chordally are dropped.
    pub fn subtract(&self, covered: &[(f64, f64)]) -> Vec<Arc> {
        let mut pieces = vec![(self.start, self.start + self.span)];
        for &(cs, ce) in covered {
            let mut next = Vec::with_capacity(pieces.len() + 1);
            for (s, e) in pieces {
                let mut rest = vec![(s, e)];
                for k in -1..=2 {
                    let (a, b) = (cs + k as f64 * TAU, ce + k as f64 * TAU);
                    rest = rest
                        .into_iter()
                        .flat_map(|(s, e)| {
                            let mut out = Vec::with_capacity(2);
                            if b <= s || a >= e {
                                out.push((s, e));
                            } else {
                                if a > s {
                                    out.push((s, a));
                                }
                                if b < e {
                                    out.push((b, e));
                                }
                            }
                            out
                        })
                        .collect();
                }
                next.extend(rest);
            }
            pieces = next;
        }
        let speed = self.chart.chordal_speed();
        merge(pieces, self.is_full())
            .into_iter()
            .filter(|(s, e)| (e - s) * speed >= 1e-9)
            .map(|(s, e)| Arc::on_chart(self.circle, self.chart, s, e - s))
            .collect()
    }

    /// The angular interval covered by the arc.
    pub fn interval(&self) -> (f64, f64) {
        (self.start, self.start + self.span)
    }
}

fn contains(s: f64, e: f64, t: f64, slack: f64) -> bool {
    let off = (t - s).rem_euclid(TAU);
    off <= e - s + slack || off >= TAU - slack
}

fn merge(mut pieces: Vec<(f64, f64)>, wrap: bool) -> Vec<(f64, f64)> {
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (s, e) in pieces {
        match out.last_mut() {
            Some(last) if s <= last.1 + 1e-13 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    if wrap && out.len() > 1 {
        let first = out[0];
        let last = *out.last().unwrap();
        if last.1 >= first.0 + TAU - 1e-13 {
            out.pop();
            out[0] = (last.0, first.1 + TAU);
        }
    }
    out
}

/// Output of [`Arc::clip`].
#[derive(Clone, Debug, Default)]
pub struct Clipped {
    pub arcs: Vec<Arc>,
    pub points: Vec<SpherePoint>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn map_preserves_selected_arc() {
        let k = GenCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let arc = Arc::new(&k, 0.3, 1.0);
        let m = Moebius::new(c(1.0, 0.5), c(0.2, 0.0), c(0.3, -0.1), c(1.0, 0.0)).unwrap();
        let img = arc.map(&m).unwrap();
        for i in 0..=10 {
            let p = m.apply(arc.point_at(i as f64 / 10.0));
            assert!(img.distance(p) < 1e-9);
            assert!(img.circle().form(p).abs() < 1e-9);
        }
        assert!(img.distance(m.apply(arc.chart().point(0.3 + 3.0))) > 1e-3);
    }

    #[test]
    fn clip_to_half_plane() {
        let k = GenCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let lower = GenCircle::line(c(0.0, 0.0), c(0.0, 1.0)).unwrap();
        let out = Arc::full(&k).clip(&[(lower, Side::Negative)]).unwrap();
        assert_eq!(out.arcs.len(), 1);
        let a = out.arcs[0];
        assert!((a.chordal_length() - std::f64::consts::PI).abs() < 1e-9);
        for p in a.interior_samples(16) {
            assert!(p.finite().unwrap().im < 0.0);
        }
    }

    #[test]
    fn clip_tangent_gives_point() {
        let k = GenCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let outside_touch = GenCircle::circle(c(2.0, 0.0), 1.0).unwrap();
        let out = Arc::full(&k).clip(&[(outside_touch, Side::Negative)]).unwrap();
        assert!(out.arcs.is_empty());
        assert_eq!(out.points.len(), 1);
        assert!(chordal(out.points[0], 1.0.into()) < 1e-9);
        let keep = Arc::full(&k).clip(&[(outside_touch, Side::Positive)]).unwrap();
        assert!(keep.arcs[0].is_full() && keep.points.is_empty());
    }

    #[test]
    fn distance_exact() {
        let k = GenCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let full = Arc::full(&k);
        let d = full.distance(SpherePoint::new(2.0, 0.0));
        assert!((d - chordal(2.0.into(), 1.0.into())).abs() < 1e-14);
        assert!((full.distance(SpherePoint::ZERO) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn subtract_intervals() {
        let k = GenCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let full = Arc::full(&k);
        let rest = full.subtract(&[(1.0, 2.0)]);
        assert_eq!(rest.len(), 1);
        assert!((rest[0].span() - (TAU - 1.0)).abs() < 1e-12);
        assert!(full.subtract(&[(0.5, 0.5 + TAU)]).is_empty());
        let arc = Arc::new(&k, 6.0, 1.0);
        let rest = arc.subtract(&[(0.2, 0.3)]);
        assert_eq!(rest.len(), 2);
    }
}
