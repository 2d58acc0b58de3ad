//! Geometry of the Riemann sphere: points, the chordal metric, Möbius maps,
//! generalized circles and their arcs.

mod arc;
mod circle;
mod moebius;
mod point;

pub use arc::{Arc, Clipped};
pub use circle::{
    circle_intersect, intersection_angles, map_circle, CircleChart, GenCircle, Intersection, Side, CIRCLE_TOL,
};
pub use moebius::{Classification, FixedPoint, Moebius, MoebiusKind, TRACE_TOL};
pub use point::{chordal, SpherePoint};
