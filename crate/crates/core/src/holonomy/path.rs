use std::f64::consts::TAU;

use serde::Serialize;

use crate::numkernel::C64;

/// Piece of a path in the `v`-plane, parametrized by `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// `center + radius e^{i(start + sweep s)}`.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + sweep * s),
        }
    }

    pub fn velocity(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => {
                C64::new(0.0, sweep) * C64::from_polar(radius, start + sweep * s)
            }
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, sweep } => Segment::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }

    /// Smallest distance from `z` to the segment.
    pub fn distance_to(&self, z: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((z - from) * d.conj()).re / len2).clamp(0.0, 1.0)
                };
                (from + d * t - z).norm()
            }
            // full circles only are used, so the distance is radial
            Segment::Arc { center, radius, .. } => ((z - center).norm() - radius).abs(),
        }
    }
}

/// Loop around one center: a circle of `radius`, traversed once with the given orientation
/// starting at angle `base_angle`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LoopSpec {
    pub center: C64,
    pub radius: f64,
    /// `+1` counterclockwise, `-1` clockwise.
    pub orientation: i8,
    pub base_angle: f64,
}

impl LoopSpec {
    pub fn circle(&self) -> Segment {
        Segment::Arc {
            center: self.center,
            radius: self.radius,
            start: self.base_angle,
            sweep: TAU * f64::from(self.orientation.signum()),
        }
    }

    pub fn start_point(&self) -> C64 {
        self.center + C64::from_polar(self.radius, self.base_angle)
    }
}

/// Concatenation of segments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Path {
    pub segments: Vec<Segment>,
}

impl Path {
    pub fn circle(spec: &LoopSpec) -> Path {
        Path { segments: vec![spec.circle()] }
    }

    /// Straight stem from `base` to the circle, the circle, and back along the stem.
    /// The circle starts at the point nearest `base`.
    pub fn lollipop(base: C64, center: C64, radius: f64, orientation: i8) -> Path {
        let angle = (base - center).arg();
        let spec = LoopSpec { center, radius, orientation, base_angle: angle };
        let entry = spec.start_point();
        Path {
            segments: vec![
                Segment::Line { from: base, to: entry },
                spec.circle(),
                Segment::Line { from: entry, to: base },
            ],
        }
    }

    pub fn reversed(&self) -> Path {
        Path { segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    pub fn then(&self, other: &Path) -> Path {
        Path { segments: self.segments.iter().chain(&other.segments).copied().collect() }
    }

    pub fn distance_to(&self, z: C64) -> f64 {
        self.segments.iter().map(|s| s.distance_to(z)).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_velocity_matches_difference() {
        let a = Segment::Arc { center: C64::new(1.0, -1.0), radius: 0.3, start: 0.4, sweep: -TAU };
        let s = 0.37;
        let h = 1e-6;
        let fd = (a.point(s + h) - a.point(s - h)) / (2.0 * h);
        assert!((fd - a.velocity(s)).norm() < 1e-8);
    }

    #[test]
    fn reversal_swaps_endpoints() {
        let p = Path::lollipop(C64::new(3.0, 0.0), C64::new(0.0, 0.0), 0.5, 1);
        let r = p.reversed();
        let first = r.segments[0];
        assert!((first.point(0.0) - C64::new(3.0, 0.0)).norm() < 1e-15);
        let arc = r.segments[1];
        assert!((arc.point(1.0) - p.segments[1].point(0.0)).norm() < 1e-12);
        assert!((p.distance_to(C64::new(0.0, 0.0)) - 0.5).abs() < 1e-15);
    }
}
