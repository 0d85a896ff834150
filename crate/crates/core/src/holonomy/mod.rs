//! Holonomy of the line at infinity.
//!
//! In a chart `(u, v)` where the line at infinity is `u = 0`, the leaves near it solve
//! `du/dv = U(u, v) / V(u, v)`. Transporting `u` along a loop in the `v`-plane gives the holonomy
//! germ of that loop; around a singular point at infinity its derivative at `u = 0` is
//! `exp(2πi λ/μ)`.

mod integrator;
mod path;

pub use integrator::{integrate, IntegratorSettings, Outcome};
pub use path::{LoopSpec, Path, Segment};

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::{infinite_singular_points, infinity_chart_field, VectorField, DEFAULT_TOL};
use crate::numkernel::{BiPoly, C64};

/// Centers farther out than this in a candidate chart make it unsuitable.
const MAX_CENTER: f64 = 10.0;
/// `|V|` below this fraction of its coefficient scale is treated as a zero on the path.
const TRANSVERSAL_TOL: f64 = 1e-12;
/// Default `|u0|` values for the multiplier, largest first.
const DEFAULT_RADII: [f64; 4] = [1e-3, 5e-4, 2.5e-4, 1.25e-4];
/// Largest `|u|` the pilot run may reach when scaled to the first radius.
const PILOT_TARGET: f64 = 1e-3;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The chart `(u, v)` of a linear image `L v` of the field, with the line at infinity at `u = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalChart {
    /// `L`, applied to the field before passing to `(u, v) = (1/x, y/x)`.
    pub linear: [[C64; 2]; 2],
    #[serde(skip)]
    u_field: BiPoly,
    #[serde(skip)]
    v_field: BiPoly,
    /// `v`-coordinate of each singular point at infinity, in the field's label order;
    /// `None` for a point this chart misses.
    pub centers: Vec<Option<C64>>,
    /// `λ/μ` of each point at infinity.
    pub ratios: Vec<C64>,
    v_scale: f64,
}

fn candidate_maps() -> Vec<[[C64; 2]; 2]> {
    let (zero, one) = (c(0.0), c(1.0));
    let mut out = vec![[[one, zero], [zero, one]], [[zero, one], [one, zero]]];
    for t in [c(0.5), c(-0.5), C64::new(0.0, 0.5), C64::new(0.0, -0.5), c(1.0), c(-1.0), c(2.0), c(-2.0)] {
        out.push([[one, t], [zero, one]]);
    }
    out
}

impl TransversalChart {
    pub fn new(v: &VectorField, linear: [[C64; 2]; 2]) -> Result<TransversalChart> {
        let points = infinite_singular_points(v, DEFAULT_TOL)?;
        let w = v.affine_pushforward(linear, [c(0.0), c(0.0)])?;
        let (u_field, v_field) = infinity_chart_field(&w)?;
        let mut centers = Vec::with_capacity(points.len());
        let mut ratios = Vec::with_capacity(points.len());
        for p in &points {
            let d = p.location.direction().expect("point at infinity");
            let a = linear[0][0] * d[0] + linear[0][1] * d[1];
            let b = linear[1][0] * d[0] + linear[1][1] * d[1];
            centers.push(if a.norm() * MAX_CENTER >= b.norm() { Some(b / a) } else { None });
            ratios.push(
                p.char_ratio
                    .ok_or_else(|| Error::DegenerateSingularity(format!("{:?}", p.location)))?,
            );
        }
        let v_scale = v_field.max_abs();
        Ok(TransversalChart { linear, u_field, v_field, centers, ratios, v_scale })
    }

    /// First chart among identity, swap and a few shears in which every point in `which` is finite.
    pub fn select(v: &VectorField, which: &[usize]) -> Result<TransversalChart> {
        for m in candidate_maps() {
            let chart = TransversalChart::new(v, m)?;
            if let Some(&bad) = which.iter().find(|&&j| j >= chart.centers.len()) {
                return Err(Error::InvalidInput(format!("no point at infinity with index {bad}")));
            }
            if which.iter().all(|&j| chart.centers[j].is_some()) {
                return Ok(chart);
            }
        }
        Err(Error::InvalidInput("no chart keeps the chosen points finite".into()))
    }

    pub fn center(&self, j: usize) -> Result<C64> {
        self.centers
            .get(j)
            .copied()
            .flatten()
            .ok_or_else(|| Error::InvalidInput(format!("point {j} is not finite in this chart")))
    }

    fn finite_centers(&self) -> Vec<(usize, C64)> {
        self.centers.iter().enumerate().filter_map(|(j, c)| c.map(|c| (j, c))).collect()
    }

    /// Distance from center `j` to the nearest other finite center.
    pub fn isolation(&self, j: usize) -> Result<f64> {
        let cj = self.center(j)?;
        Ok(self
            .finite_centers()
            .iter()
            .filter(|(k, _)| *k != j)
            .map(|(_, ck)| (ck - cj).norm())
            .fold(f64::INFINITY, f64::min))
    }

    fn rhs(&self, seg: &Segment, s: f64, u: C64) -> Result<C64> {
        let v = seg.point(s);
        let den = self.v_field.eval(u, v);
        if den.norm() <= TRANSVERSAL_TOL * self.v_scale {
            return Err(Error::NearSingularTransversal(den.norm()));
        }
        Ok(seg.velocity(s) * self.u_field.eval(u, v) / den)
    }

    /// Transport `u0` along the path. `u0 = 0` stays exactly 0.
    ///
    /// The absolute tolerance is tightened to `rtol |u0|` for small starting points, so the
    /// relative accuracy does not degrade as `u0 -> 0`.
    pub fn transport(&self, path: &Path, u0: C64, settings: &IntegratorSettings) -> Result<Outcome> {
        if u0 == c(0.0) {
            return Ok(Outcome { value: c(0.0), max_abs: 0.0, steps: 0 });
        }
        let settings = &IntegratorSettings {
            atol: settings.atol.min(settings.rtol * u0.norm()),
            ..*settings
        };
        let mut u = u0;
        let mut max_abs = u0.norm();
        let mut steps = 0;
        for seg in &path.segments {
            let out = integrate(|s, u| self.rhs(seg, s, u), 0.0, 1.0, u, settings)?;
            u = out.value;
            max_abs = max_abs.max(out.max_abs);
            steps += out.steps;
        }
        Ok(Outcome { value: u, max_abs, steps })
    }
}

/// A loop on the line at infinity together with the chart and integrator that define its
/// return map on the transversal `v = loop start`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyGerm {
    pub chart: TransversalChart,
    pub loop_spec: LoopSpec,
    pub settings: IntegratorSettings,
}

impl HolonomyGerm {
    /// Counterclockwise loop around point `which`, radius defaulting to a third of the distance
    /// to the nearest other center.
    pub fn around(v: &VectorField, which: usize, radius: Option<f64>, settings: IntegratorSettings) -> Result<HolonomyGerm> {
        let chart = TransversalChart::select(v, &[which])?;
        let center = chart.center(which)?;
        let iso = chart.isolation(which)?;
        let radius = radius.unwrap_or(if iso.is_finite() { iso / 3.0 } else { 1.0 });
        if !(radius > 0.0) || radius >= 0.5 * iso {
            return Err(Error::InvalidInput(format!(
                "loop radius {radius} must be positive and below half the gap {iso}"
            )));
        }
        Ok(HolonomyGerm {
            chart,
            loop_spec: LoopSpec { center, radius, orientation: 1, base_angle: 0.0 },
            settings,
        })
    }

    pub fn reversed(&self) -> HolonomyGerm {
        let mut g = self.clone();
        g.loop_spec.orientation = -g.loop_spec.orientation;
        g
    }

    pub fn path(&self) -> Path {
        Path::circle(&self.loop_spec)
    }
}

/// Return map of the germ's loop at `u0`.
pub fn holonomy_map(germ: &HolonomyGerm, u0: C64) -> Result<C64> {
    Ok(germ.chart.transport(&germ.path(), u0, &germ.settings)?.value)
}

/// Value at 0 of the interpolating polynomial through `(x_k, y_k)`.
pub fn neville_at_zero(xs: &[f64], ys: &[C64]) -> C64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub index: usize,
    /// `λ/μ` from the singular-point data.
    pub ratio: C64,
    /// `exp(2πi λ/μ)`.
    pub expected: C64,
    /// Extrapolated `Δ'(0)`.
    pub estimate: C64,
    pub error: f64,
    /// `|u0|` values actually used after the pilot scaling.
    pub radii: Vec<f64>,
    /// `Δ(u0)/u0` at each radius.
    pub quotients: Vec<C64>,
}

/// `Δ'(0)` for the loop around point `which`, by extrapolating `Δ(u0)/u0` to `u0 = 0`.
///
/// `radii` must be decreasing; empty selects a default ladder. A pilot run with a tiny `u0`
/// measures how far the transported point travels and the ladder is shrunk so the largest
/// run stays near the linear regime.
pub fn holonomy_multiplier(
    v: &VectorField,
    which: usize,
    radii: &[f64],
    settings: IntegratorSettings,
) -> Result<MultiplierReport> {
    let germ = HolonomyGerm::around(v, which, None, settings)?;
    let mut radii: Vec<f64> = if radii.is_empty() { DEFAULT_RADII.to_vec() } else { radii.to_vec() };
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[0] > w[1] && w[1] > 0.0)) {
        return Err(Error::InvalidInput("radii must be positive and strictly decreasing".into()));
    }
    let pilot_u = 1e-8;
    let pilot = germ.chart.transport(&germ.path(), c(pilot_u), &germ.settings)?;
    let gain = pilot.max_abs / pilot_u;
    if gain * radii[0] > PILOT_TARGET {
        let s = PILOT_TARGET / (gain * radii[0]);
        radii.iter_mut().for_each(|r| *r *= s);
    }
    let mut quotients = Vec::with_capacity(radii.len());
    for &r in &radii {
        quotients.push(holonomy_map(&germ, c(r))? / r);
    }
    let estimate = neville_at_zero(&radii, &quotients);
    let coarse = neville_at_zero(&radii[..radii.len() - 1], &quotients[..radii.len() - 1]);
    let drift = (estimate - coarse).norm();
    if !estimate.is_finite() || drift > 1e-3 * estimate.norm().max(1.0) {
        return Err(Error::ExtrapolationUnstable(drift));
    }
    let ratio = germ.chart.ratios[which];
    let expected = (C64::new(0.0, TAU) * ratio).exp();
    Ok(MultiplierReport {
        index: which,
        ratio,
        expected,
        estimate,
        error: (estimate - expected).norm(),
        radii,
        quotients,
    })
}

/// Lollipop generators based at one point of the `v`-plane, one per point at infinity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorSystem {
    pub chart: TransversalChart,
    pub base: C64,
    /// Label of each generator's center, in product order.
    pub order: Vec<usize>,
    pub radii: Vec<f64>,
    pub settings: IntegratorSettings,
}

/// Smallest `distance(stem_j, c_i) / r_i` over stems and foreign centers.
fn stem_clearance(centers: &[(usize, C64)], radii: &[f64], base: C64) -> f64 {
    let mut worst = f64::INFINITY;
    for (a, &(_, ca)) in centers.iter().enumerate() {
        let stem = Segment::Line { from: base, to: ca };
        for (b, &(_, cb)) in centers.iter().enumerate() {
            if a != b {
                worst = worst.min(stem.distance_to(cb) / radii[b]);
            }
        }
    }
    worst
}

impl GeneratorSystem {
    /// All points at infinity must be finite in one chart. `base` is a `v`-coordinate in that
    /// chart; `None` picks a point outside the centers with the best stem clearance.
    pub fn new(v: &VectorField, base: Option<C64>, settings: IntegratorSettings) -> Result<GeneratorSystem> {
        let all: Vec<usize> = (0..v.degree() + 1).collect();
        let chart = TransversalChart::select(v, &all)?;
        let centers = chart.finite_centers();
        let mut radii = Vec::with_capacity(centers.len());
        for &(j, _) in &centers {
            radii.push(chart.isolation(j)? / 3.0);
        }
        let base = match base {
            Some(b) => b,
            None => {
                let mean: C64 = centers.iter().map(|(_, c)| c).sum::<C64>() / centers.len() as f64;
                let spread = centers.iter().map(|(_, c)| (c - mean).norm()).fold(0.0, f64::max).max(1e-3);
                (0..24)
                    .map(|k| mean + C64::from_polar(2.0 * spread, PI * k as f64 / 12.0))
                    .max_by(|a, b| {
                        stem_clearance(&centers, &radii, *a).total_cmp(&stem_clearance(&centers, &radii, *b))
                    })
                    .expect("candidates")
            }
        };
        for (&(_, cj), &rj) in centers.iter().zip(&radii) {
            if (base - cj).norm() <= 1.5 * rj {
                return Err(Error::InvalidInput("base point lies inside a generator loop".into()));
            }
        }
        if stem_clearance(&centers, &radii, base) <= 1.5 {
            return Err(Error::InvalidInput("a stem passes too close to another center".into()));
        }
        // counterclockwise by argument seen from the base, starting after the widest gap
        let mut by_angle: Vec<(f64, usize, f64)> = centers
            .iter()
            .zip(&radii)
            .map(|(&(j, cj), &r)| ((cj - base).arg(), j, r))
            .collect();
        by_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = by_angle.len();
        let gap = |i: usize| {
            let next = by_angle[(i + 1) % n].0 + if i + 1 == n { TAU } else { 0.0 };
            next - by_angle[i].0
        };
        let widest = (0..n).max_by(|&a, &b| gap(a).total_cmp(&gap(b))).unwrap_or(0);
        let rotated: Vec<_> = (0..n).map(|k| by_angle[(widest + 1 + k) % n]).collect();
        Ok(GeneratorSystem {
            base,
            order: rotated.iter().map(|t| t.1).collect(),
            radii: rotated.iter().map(|t| t.2).collect(),
            chart,
            settings,
        })
    }

    /// Lollipop path of generator `label`, counterclockwise.
    pub fn generator(&self, label: usize) -> Result<Path> {
        let k = self
            .order
            .iter()
            .position(|&j| j == label)
            .ok_or_else(|| Error::InvalidInput(format!("no generator {label}")))?;
        Ok(Path::lollipop(self.base, self.chart.center(label)?, self.radii[k], 1))
    }

    /// All generators concatenated in product order.
    pub fn product_path(&self) -> Result<Path> {
        let mut p = Path { segments: Vec::new() };
        for &j in &self.order {
            p = p.then(&self.generator(j)?);
        }
        Ok(p)
    }

    pub fn transport(&self, path: &Path, u0: C64) -> Result<C64> {
        Ok(self.chart.transport(path, u0, &self.settings)?.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductReport {
    pub base: C64,
    pub order: Vec<usize>,
    /// `max |F(u) - u| / |u|` over the nonzero samples, `F` the product of the generators.
    pub residual: f64,
}

/// Transport along the product of all generators; the loop is contractible on the line at
/// infinity minus the singular points, so the result should be the identity.
pub fn generator_product_check(
    v: &VectorField,
    base: Option<C64>,
    samples: &[C64],
    settings: IntegratorSettings,
) -> Result<ProductReport> {
    let sys = GeneratorSystem::new(v, base, settings)?;
    let path = sys.product_path()?;
    let mut residual: f64 = 0.0;
    for &u in samples {
        let out = sys.transport(&path, u)?;
        if u != c(0.0) {
            residual = residual.max((out - u).norm() / u.norm());
        } else if out != c(0.0) {
            residual = f64::INFINITY;
        }
    }
    Ok(ProductReport { base: sys.base, order: sys.order, residual })
}

/// `|f_i f_j f_i^{-1} f_j^{-1}(u0) - u0|` for generators `i`, `j`; `f_j^{-1}` is applied first.
pub fn commutator_probe(v: &VectorField, i: usize, j: usize, u0: C64, settings: IntegratorSettings) -> Result<f64> {
    let sys = GeneratorSystem::new(v, None, settings)?;
    let (gi, gj) = (sys.generator(i)?, sys.generator(j)?);
    let path = gj.reversed().then(&gi.reversed()).then(&gj).then(&gi);
    Ok((sys.transport(&path, u0)? - u0).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::three_line_field;
    use crate::sampling::random_field;

    fn separable() -> VectorField {
        VectorField::new(
            BiPoly::from_real_terms(&[(1.0, 2, 0), (-2.0, 1, 0)]),
            BiPoly::from_real_terms(&[(1.0, 0, 2), (-2.0, 0, 1)]),
        )
        .unwrap()
    }

    fn index_of(v: &VectorField, dir: [f64; 2]) -> usize {
        let pts = infinite_singular_points(v, DEFAULT_TOL).unwrap();
        let target = crate::foliation::Location::Infinite {
            chart: crate::foliation::InfinityChart::X,
            coord: c(dir[1] / dir[0]),
        };
        pts.iter().position(|p| p.location.distance(&target) < 1e-9).unwrap()
    }

    #[test]
    fn zero_is_fixed() {
        let g = HolonomyGerm::around(&separable(), 0, None, IntegratorSettings::default()).unwrap();
        assert_eq!(holonomy_map(&g, c(0.0)).unwrap(), c(0.0));
    }

    #[test]
    fn separable_loop_around_diagonal() {
        let v = separable();
        let g = HolonomyGerm::around(&v, index_of(&v, [1.0, 1.0]), None, IntegratorSettings::default()).unwrap();
        let u0 = c(1e-3);
        assert!((holonomy_map(&g, u0).unwrap() / u0 - 1.0).norm() < 1e-3);
    }

    #[test]
    fn multipliers_match_ratios() {
        let v = separable();
        let r = holonomy_multiplier(&v, index_of(&v, [1.0, 0.0]), &[], IntegratorSettings::default()).unwrap();
        assert!((r.estimate - 1.0).norm() < 1e-5, "{r:?}");
        let tl = three_line_field(c(1.0), c(2.0), c(1.0));
        let r = holonomy_multiplier(&tl, index_of(&tl, [1.0, 0.0]), &[], IntegratorSettings::default()).unwrap();
        assert!((r.ratio - 0.5).norm() < 1e-12);
        assert!((r.estimate + 1.0).norm() < 1e-5, "{r:?}");
        let rf = random_field(2, 2);
        for j in 0..3 {
            let r = holonomy_multiplier(&rf, j, &[], IntegratorSettings::default()).unwrap();
            assert!(r.error < 1e-4, "{r:?}");
        }
    }

    #[test]
    fn point_at_vertical_direction_uses_swapped_chart() {
        let v = separable();
        let pts = infinite_singular_points(&v, DEFAULT_TOL).unwrap();
        let j = pts.len() - 1;
        let r = holonomy_multiplier(&v, j, &[], IntegratorSettings::default()).unwrap();
        assert!(r.error < 1e-5);
    }

    #[test]
    fn reversed_loop_undoes_the_map() {
        let v = random_field(4, 2);
        let g = HolonomyGerm::around(&v, 1, None, IntegratorSettings::default()).unwrap();
        let u0 = C64::new(1e-4, 2e-5);
        let back = holonomy_map(&g.reversed(), holonomy_map(&g, u0).unwrap()).unwrap();
        assert!((back - u0).norm() < 1e-8 * u0.norm());
    }

    #[test]
    fn product_of_generators_is_trivial() {
        let samples = [c(0.0), c(1e-3), C64::new(0.0, 5e-4)];
        for v in [separable(), three_line_field(c(1.0), c(1.0), c(1.0))] {
            let r = generator_product_check(&v, None, &samples, IntegratorSettings::default()).unwrap();
            assert!(r.residual < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn commutator_of_separable_generators_is_small() {
        // both multipliers are 1, so the linear parts commute
        let v = separable();
        let s = IntegratorSettings::default();
        for u0 in [1e-3, 1e-4] {
            assert!(commutator_probe(&v, 0, 1, c(u0), s).unwrap() / u0 < 1e-6);
        }
        assert_eq!(commutator_probe(&v, 0, 1, c(0.0), s).unwrap(), 0.0);
    }

    #[test]
    fn commutator_of_random_field_is_reported() {
        let r = commutator_probe(&random_field(6, 2), 0, 2, c(1e-2), IntegratorSettings::default());
        // escape is possible for strongly expanding generators; otherwise the value is finite
        if let Ok(x) = r {
            assert!(x.is_finite() && x >= 0.0);
        }
    }

    #[test]
    fn neville_recovers_polynomials() {
        let xs = [0.4, 0.2, 0.1];
        let ys: Vec<C64> = xs.iter().map(|&x| c(3.0 - 2.0 * x + 5.0 * x * x)).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).norm() < 1e-12);
    }
}
