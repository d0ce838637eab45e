//! Varieties given by implicit equations, with parametric samplers for lines,
//! circles and affine k-planes.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

// Needed without std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::polyalg::{MonomialBasis, Polynomial};
use crate::rng::{label, substream, StreamRng};

const FRAME_TOL: f64 = 1e-9;

/// Construction parameters for a variety.
#[derive(Debug, Clone, PartialEq)]
pub enum VarietyKind {
    /// `point + t dir`; `dir` is normalized on build.
    Line { point: Vec<f64>, dir: Vec<f64> },
    /// Circle of `radius` about `center` in the plane spanned by an
    /// orthonormal `frame`; in R² the frame defaults to the coordinate axes.
    Circle { center: Vec<f64>, radius: f64, frame: Option<[Vec<f64>; 2]> },
    /// `point + span(frame)` with an orthonormal frame; an empty frame is a
    /// single point.
    KPlane { point: Vec<f64>, frame: Vec<Vec<f64>> },
    /// Common zero set of `polys`, declared to have dimension `k`. No sampler.
    Implicit { k: usize, polys: Vec<Polynomial> },
}

/// Parametric description used for sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    Line { point: Vec<f64>, dir: Vec<f64> },
    Circle { center: Vec<f64>, radius: f64, frame: [Vec<f64>; 2] },
    KPlane { point: Vec<f64>, frame: Vec<Vec<f64>> },
}

/// A `k`-dimensional variety in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarietySpec {
    n: usize,
    k: usize,
    defining: Vec<Polynomial>,
    sampler: Option<Sampler>,
}

/// Points filling a tube neighborhood, each standing for `weight` volume.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedCloud {
    pub points: Vec<Vec<f64>>,
    /// On-variety point each tube point was jittered from.
    pub anchors: Vec<Vec<f64>>,
    pub weight: f64,
}

impl WeightedCloud {
    pub fn total_weight(&self) -> f64 {
        self.weight * self.points.len() as f64
    }
}

impl VarietySpec {
    pub fn build(n: usize, kind: VarietyKind) -> Result<Self> {
        match kind {
            VarietyKind::Line { point, dir } => {
                check_len(n, &point)?;
                check_len(n, &dir)?;
                let norm = norm(&dir);
                if norm == 0.0 || !norm.is_finite() {
                    return Err(inconsistent("line direction must be nonzero"));
                }
                let dir: Vec<f64> = dir.iter().map(|d| d / norm).collect();
                Self::flat(n, point, vec![dir], |point, frame| Sampler::Line {
                    point,
                    dir: frame.into_iter().next().expect("one direction"),
                })
            }
            VarietyKind::KPlane { point, frame } => {
                check_len(n, &point)?;
                Self::flat(n, point, frame, |point, frame| Sampler::KPlane { point, frame })
            }
            VarietyKind::Circle { center, radius, frame } => {
                check_len(n, &center)?;
                if n < 2 {
                    return Err(inconsistent("a circle needs n >= 2"));
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(inconsistent("circle radius must be positive"));
                }
                let frame = match frame {
                    Some(f) => f,
                    None if n == 2 => [vec![1.0, 0.0], vec![0.0, 1.0]],
                    None => return Err(inconsistent("a circle in n > 2 needs a frame")),
                };
                check_orthonormal(n, &frame)?;
                let basis2 = Arc::new(MonomialBasis::new(n, 2)?);
                let mut sphere = vec![0.0; basis2.len()];
                sphere[0] = dot(&center, &center) - radius * radius;
                for i in 0..n {
                    sphere[1 + i] = -2.0 * center[i];
                    let mut e = vec![0u32; n];
                    e[i] = 2;
                    sphere[basis2.index_of(&e).expect("degree 2")] = 1.0;
                }
                let mut defining = vec![Polynomial::new(basis2, sphere)?];
                defining.extend(linear_equations(n, &center, &complement(n, &frame))?);
                Ok(Self { n, k: 1, defining, sampler: Some(Sampler::Circle { center, radius, frame }) })
            }
            VarietyKind::Implicit { k, polys } => {
                if k >= n {
                    return Err(inconsistent("variety dimension must be below n"));
                }
                if polys.is_empty() {
                    return Err(inconsistent("implicit variety needs at least one equation"));
                }
                for p in &polys {
                    check_len(n, &vec![0.0; p.n()])?;
                    if p.degree().is_none() {
                        return Err(inconsistent("implicit equations must be nonzero"));
                    }
                }
                Ok(Self { n, k, defining: polys, sampler: None })
            }
        }
    }

    fn flat(
        n: usize,
        point: Vec<f64>,
        frame: Vec<Vec<f64>>,
        wrap: impl FnOnce(Vec<f64>, Vec<Vec<f64>>) -> Sampler,
    ) -> Result<Self> {
        let k = frame.len();
        if k >= n {
            return Err(inconsistent("variety dimension must be below n"));
        }
        check_orthonormal(n, &frame)?;
        let defining = linear_equations(n, &point, &complement(n, &frame))?;
        Ok(Self { n, k, defining, sampler: Some(wrap(point, frame)) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn defining(&self) -> &[Polynomial] {
        &self.defining
    }

    pub fn sampler(&self) -> Option<&Sampler> {
        self.sampler.as_ref()
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.sampler {
            Some(Sampler::Line { .. }) => "line",
            Some(Sampler::Circle { .. }) => "circle",
            Some(Sampler::KPlane { .. }) => "kplane",
            None => "implicit",
        }
    }

    /// `(point, unit direction)` when this variety is a line.
    pub fn as_line(&self) -> Option<(&[f64], &[f64])> {
        match &self.sampler {
            Some(Sampler::Line { point, dir }) => Some((point, dir)),
            _ => None,
        }
    }

    /// `max_j |p_j(x)|` over the defining equations.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for p in &self.defining {
            worst = worst.max(p.eval(x)?.abs());
        }
        Ok(worst)
    }

    fn sampler_or_err(&self) -> Result<&Sampler> {
        self.sampler.as_ref().ok_or(Error::UnsupportedVariety("implicit"))
    }

    /// `k`-dimensional measure of `γ ∩ B_radius` (counting measure for points).
    pub fn k_volume_in_ball(&self, radius: f64) -> Result<f64> {
        Ok(match self.sampler_or_err()? {
            Sampler::Line { point, dir } => line_chord(point, dir, radius).map_or(0.0, |(_, h)| 2.0 * h),
            Sampler::Circle { center, radius: r, frame } => {
                circle_arc(center, *r, frame, radius).map_or(0.0, |(_, span)| r * span)
            }
            Sampler::KPlane { point, frame } => match plane_disk(point, frame, radius) {
                None => 0.0,
                Some(_) if frame.is_empty() => 1.0,
                Some((_, rho)) => unit_ball_volume(frame.len()) * rho.powi(frame.len() as i32),
            },
        })
    }

    /// Deterministic points of `γ ∩ B_radius`. Lines and circles are sampled
    /// by stratified parameters; k-planes uniformly in their disk.
    pub fn sample_in_ball(&self, radius: f64, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let sampler = self.sampler_or_err()?;
        let mut rng = substream(seed, label::VARIETY_SAMPLES, 0);
        let pts = self.draw(sampler, radius, count, &mut rng);
        Ok(pts.into_iter().filter(|x| norm(x) <= radius).collect())
    }

    fn draw(&self, sampler: &Sampler, radius: f64, count: usize, rng: &mut StreamRng) -> Vec<Vec<f64>> {
        match sampler {
            Sampler::Line { point, dir } => match line_chord(point, dir, radius) {
                None => Vec::new(),
                Some((t0, h)) => stratified(rng, count, t0 - h, t0 + h).map(|t| axpy(point, t, dir)).collect(),
            },
            Sampler::Circle { center, radius: r, frame } => match circle_arc(center, *r, frame, radius) {
                None => Vec::new(),
                Some((start, span)) => {
                    stratified(rng, count, start, start + span).map(|th| circle_point(center, *r, frame, th)).collect()
                }
            },
            Sampler::KPlane { point, frame } => match plane_disk(point, frame, radius) {
                None => Vec::new(),
                Some((foot, _)) if frame.is_empty() => vec![foot],
                Some((foot, rho)) => (0..count)
                    .map(|_| {
                        let c = uniform_in_ball(rng, frame.len(), rho);
                        let mut x = foot.clone();
                        for (ci, f) in c.iter().zip(frame) {
                            x.iter_mut().zip(f).for_each(|(xi, fi)| *xi += ci * fi);
                        }
                        x
                    })
                    .collect(),
            },
        }
    }

    /// Points of `N_δ γ ∩ B_radius`: on-variety samples from `γ ∩ B_{radius+δ}`
    /// jittered uniformly in the normal `(n-k)`-disk of radius `delta`. The
    /// per-point weight is `vol_k(γ ∩ B_{radius+δ}) · vol_{n-k}(B_δ) / count`.
    pub fn tube_sample(&self, delta: f64, radius: f64, count: usize, seed: u64) -> Result<WeightedCloud> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument("tube radius must be positive"));
        }
        let sampler = self.sampler_or_err()?;
        let outer = radius + delta;
        let kvol = self.k_volume_in_ball(outer)?;
        let mut rng = substream(seed, label::TUBE, 0);
        let base = self.draw(sampler, outer, count, &mut rng);
        if base.is_empty() || kvol == 0.0 {
            return Ok(WeightedCloud::default());
        }
        let m = self.n - self.k;
        let weight = kvol * unit_ball_volume(m) * delta.powi(m as i32) / base.len() as f64;
        let fixed_normals = match sampler {
            Sampler::Line { dir, .. } => Some(complement(self.n, core::slice::from_ref(dir))),
            Sampler::KPlane { frame, .. } => Some(complement(self.n, frame)),
            Sampler::Circle { .. } => None,
        };
        let mut cloud = WeightedCloud { points: Vec::new(), anchors: Vec::new(), weight };
        for anchor in base {
            let normals = match (&fixed_normals, sampler) {
                (Some(nrm), _) => nrm.clone(),
                (None, Sampler::Circle { center, frame, .. }) => {
                    let radial = unit(&sub(&anchor, center));
                    let mut nrm = vec![radial];
                    nrm.extend(complement(self.n, frame));
                    nrm
                }
                _ => unreachable!(),
            };
            let c = uniform_in_ball(&mut rng, m, delta);
            let mut x = anchor.clone();
            for (ci, v) in c.iter().zip(&normals) {
                x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += ci * vi);
            }
            if norm(&x) <= radius {
                cloud.points.push(x);
                cloud.anchors.push(anchor);
            }
        }
        if cloud.points.is_empty() {
            return Ok(WeightedCloud::default());
        }
        Ok(cloud)
    }
}

fn inconsistent(msg: &str) -> Error {
    Error::InconsistentVariety(msg.into())
}

fn check_len(n: usize, v: &[f64]) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(inconsistent("coordinates must be finite"));
    }
    Ok(())
}

fn check_orthonormal(n: usize, frame: &[Vec<f64>]) -> Result<()> {
    for (i, a) in frame.iter().enumerate() {
        check_len(n, a)?;
        for (j, b) in frame.iter().enumerate().take(i + 1) {
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot(a, b) - want).abs() > FRAME_TOL {
                return Err(inconsistent("frame vectors must be orthonormal"));
            }
        }
    }
    Ok(())
}

/// Orthonormal basis of the orthogonal complement of an orthonormal frame,
/// by greedy Gram–Schmidt over the coordinate axes.
pub(crate) fn complement(n: usize, frame: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut span: Vec<Vec<f64>> = frame.to_vec();
    let mut out = Vec::new();
    while span.len() < n {
        let best = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                for v in &span {
                    let d = dot(&e, v);
                    e.iter_mut().zip(v).for_each(|(x, y)| *x -= d * y);
                }
                e
            })
            .max_by(|a, b| norm(a).partial_cmp(&norm(b)).expect("finite"))
            .expect("n >= 1");
        let v = unit(&best);
        span.push(v.clone());
        out.push(v);
    }
    out
}

fn linear_equations(n: usize, point: &[f64], normals: &[Vec<f64>]) -> Result<Vec<Polynomial>> {
    let basis = Arc::new(MonomialBasis::new(n, 1)?);
    normals
        .iter()
        .map(|nu| {
            let mut c = vec![-dot(nu, point)];
            c.extend_from_slice(nu);
            Polynomial::new(basis.clone(), c)
        })
        .collect()
}

fn stratified<'a>(rng: &'a mut StreamRng, count: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> + 'a {
    let step = (hi - lo) / count as f64;
    (0..count).map(move |i| lo + (i as f64 + rng.random::<f64>()) * step)
}

fn uniform_in_ball(rng: &mut StreamRng, dim: usize, radius: f64) -> Vec<f64> {
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let len = norm(&g);
        if len > 0.0 {
            let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
            return g.iter().map(|x| x * r / len).collect();
        }
    }
}

/// Volume of the unit ball in `R^dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    libm::pow(core::f64::consts::PI, half) / libm::tgamma(half + 1.0)
}

/// Parameter midpoint and half-length of the chord of `B_radius` cut by the line.
fn line_chord(point: &[f64], dir: &[f64], radius: f64) -> Option<(f64, f64)> {
    let t0 = -dot(point, dir);
    let foot = axpy(point, t0, dir);
    let gap = radius * radius - dot(&foot, &foot);
    (gap >= 0.0).then(|| (t0, gap.sqrt()))
}

/// `(start angle, angular span)` of the arc of the circle inside `B_radius`.
fn circle_arc(center: &[f64], r: f64, frame: &[Vec<f64>; 2], radius: f64) -> Option<(f64, f64)> {
    use core::f64::consts::PI;
    let a = dot(center, &frame[0]);
    let b = dot(center, &frame[1]);
    let rho = (a * a + b * b).sqrt();
    // |x(θ)|² = |c|² + r² + 2 r ρ cos(θ - φ)
    let slack = radius * radius - dot(center, center) - r * r;
    if rho * r == 0.0 {
        return (slack >= 0.0).then_some((0.0, 2.0 * PI));
    }
    let kappa = slack / (2.0 * r * rho);
    if kappa >= 1.0 {
        return Some((0.0, 2.0 * PI));
    }
    if kappa < -1.0 {
        return None;
    }
    let phi = libm::atan2(b, a);
    let half_gap = libm::acos(kappa);
    Some((phi + half_gap, 2.0 * (PI - half_gap)))
}

fn circle_point(center: &[f64], r: f64, frame: &[Vec<f64>; 2], theta: f64) -> Vec<f64> {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    center.iter().zip(frame[0].iter().zip(&frame[1])).map(|(x, (e1, e2))| x + r * (c * e1 + s * e2)).collect()
}

/// Foot of the perpendicular from the origin and radius of the disk
/// `plane ∩ B_radius`.
fn plane_disk(point: &[f64], frame: &[Vec<f64>], radius: f64) -> Option<(Vec<f64>, f64)> {
    let mut foot = point.to_vec();
    for f in frame {
        let d = dot(point, f);
        foot.iter_mut().zip(f).for_each(|(x, y)| *x -= d * y);
    }
    let gap = radius * radius - dot(&foot, &foot);
    (gap >= 0.0).then(|| (foot, gap.sqrt()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: &[f64]) -> Vec<f64> {
    let l = norm(a);
    a.iter().map(|x| x / l).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn axpy(a: &[f64], t: f64, u: &[f64]) -> Vec<f64> {
    a.iter().zip(u).map(|(x, y)| x + t * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(point: &[f64], dir: &[f64]) -> VarietySpec {
        VarietySpec::build(point.len(), VarietyKind::Line { point: point.to_vec(), dir: dir.to_vec() }).unwrap()
    }

    #[test]
    fn line_in_plane_has_one_equation() {
        let g = line(&[0.0, 0.0], &[1.0, 0.0]);
        assert_eq!(g.k(), 1);
        assert_eq!(g.defining().len(), 1);
        let y = Polynomial::from_terms(2, &[(1.0, &[0, 1])]).unwrap();
        assert_eq!(g.defining()[0].coeffs(), y.coeffs());
    }

    #[test]
    fn line_in_space_has_two_equations() {
        let g = line(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]);
        assert_eq!(g.defining().len(), 2);
        for t in [-3.0, 0.0, 2.5] {
            let s = t / 3f64.sqrt();
            assert!(g.residual(&[1.0 + s, 2.0 + s, 3.0 + s]).unwrap() < 1e-12);
        }
    }

    #[test]
    fn unit_circle_equation() {
        let g =
            VarietySpec::build(2, VarietyKind::Circle { center: vec![0.0, 0.0], radius: 1.0, frame: None }).unwrap();
        assert_eq!(g.defining().len(), 1);
        let want = Polynomial::from_terms(2, &[(1.0, &[2, 0]), (1.0, &[0, 2]), (-1.0, &[0, 0])]).unwrap();
        assert_eq!(g.defining()[0].coeffs(), want.coeffs());
    }

    #[test]
    fn plane_in_space() {
        let g = VarietySpec::build(
            3,
            VarietyKind::KPlane { point: vec![0.0; 3], frame: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]] },
        )
        .unwrap();
        assert_eq!(g.k(), 2);
        let z = Polynomial::from_terms(3, &[(1.0, &[0, 0, 1])]).unwrap();
        assert_eq!(g.defining()[0].coeffs(), z.coeffs());
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(VarietySpec::build(2, VarietyKind::Line { point: vec![0.0, 0.0], dir: vec![0.0, 0.0] }).is_err());
        assert!(
            VarietySpec::build(2, VarietyKind::Circle { center: vec![0.0, 0.0], radius: -1.0, frame: None }).is_err()
        );
        let frame = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(VarietySpec::build(2, VarietyKind::KPlane { point: vec![0.0, 0.0], frame }).is_err());
        assert!(
            VarietySpec::build(2, VarietyKind::KPlane { point: vec![0.0, 0.0], frame: vec![vec![1.0, 1.0]] }).is_err()
        );
        let p = Polynomial::from_terms(2, &[(1.0, &[1, 0])]).unwrap();
        assert!(VarietySpec::build(2, VarietyKind::Implicit { k: 2, polys: vec![p] }).is_err());
    }

    #[test]
    fn implicit_has_no_sampler() {
        let p = Polynomial::from_terms(2, &[(1.0, &[1, 0])]).unwrap();
        let g = VarietySpec::build(2, VarietyKind::Implicit { k: 1, polys: vec![p] }).unwrap();
        assert_eq!(g.sample_in_ball(1.0, 4, 0), Err(Error::UnsupportedVariety("implicit")));
        assert!(g.residual(&[0.0, 5.0]).unwrap() == 0.0);
    }

    #[test]
    fn axis_samples() {
        let g = line(&[0.0, 0.0], &[1.0, 0.0]);
        let pts = g.sample_in_ball(1.0, 3, 9).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert_eq!(p[1], 0.0);
            assert!(p[0].abs() <= 1.0);
        }
    }

    #[test]
    fn missing_line_gives_no_samples() {
        let g = line(&[0.0, 10.0], &[1.0, 0.0]);
        assert!(g.sample_in_ball(1.0, 10, 0).unwrap().is_empty());
        let cloud = g.tube_sample(0.1, 1.0, 100, 0).unwrap();
        assert!(cloud.points.is_empty());
        assert_eq!(cloud.total_weight(), 0.0);
    }

    #[test]
    fn circle_samples_lie_on_circle() {
        let g =
            VarietySpec::build(2, VarietyKind::Circle { center: vec![0.0, 0.0], radius: 1.0, frame: None }).unwrap();
        let pts = g.sample_in_ball(1.0, 100, 3).unwrap();
        assert_eq!(pts.len(), 100);
        for p in &pts {
            assert!(g.residual(p).unwrap() < 1e-9);
            assert!(norm(p) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn partial_circle_arc() {
        // circle of radius 1 about (1, 0) meets B_1 in the arc of angle 2π/3
        let g =
            VarietySpec::build(2, VarietyKind::Circle { center: vec![1.0, 0.0], radius: 1.0, frame: None }).unwrap();
        let len = g.k_volume_in_ball(1.0).unwrap();
        assert!((len - 2.0 * core::f64::consts::PI / 3.0).abs() < 1e-12);
        for p in g.sample_in_ball(1.0, 50, 1).unwrap() {
            assert!(norm(&p) <= 1.0 + 1e-12);
            assert!(g.residual(&p).unwrap() < 1e-9);
        }
    }

    #[test]
    fn circle_in_space_residuals() {
        let s = 0.5f64.sqrt();
        let frame = [vec![s, s, 0.0], vec![0.0, 0.0, 1.0]];
        let g = VarietySpec::build(
            3,
            VarietyKind::Circle { center: vec![0.2, -0.1, 0.3], radius: 0.7, frame: Some(frame) },
        )
        .unwrap();
        assert_eq!(g.defining().len(), 2);
        for p in g.sample_in_ball(5.0, 64, 2).unwrap() {
            assert!(g.residual(&p).unwrap() < 1e-9);
        }
        let cloud = g.tube_sample(0.05, 5.0, 200, 2).unwrap();
        for (p, a) in cloud.points.iter().zip(&cloud.anchors) {
            assert!(norm(&sub(p, a)) <= 0.05 + 1e-12);
        }
    }

    #[test]
    fn tube_area_of_axis() {
        let g = line(&[0.0, 0.0], &[1.0, 0.0]);
        let cloud = g.tube_sample(0.1, 1.0, 10_000, 5).unwrap();
        let area = cloud.total_weight();
        assert!((area - 0.4).abs() < 0.04, "area {area}");
        for (p, a) in cloud.points.iter().zip(&cloud.anchors) {
            assert!(norm(&sub(p, a)) <= 0.1 + 1e-12);
            assert!(norm(p) <= 1.0);
        }
    }

    #[test]
    fn tiny_tube_hugs_the_line() {
        let g = line(&[0.0, 0.3], &[0.6, 0.8]);
        let cloud = g.tube_sample(1e-6, 2.0, 500, 8).unwrap();
        for p in &cloud.points {
            assert!(g.residual(p).unwrap() <= 1e-6 + 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = line(&[0.1, 0.2, 0.3], &[0.0, 0.6, 0.8]);
        assert_eq!(g.sample_in_ball(2.0, 40, 77).unwrap(), g.sample_in_ball(2.0, 40, 77).unwrap());
        assert_eq!(g.tube_sample(0.1, 2.0, 40, 77).unwrap(), g.tube_sample(0.1, 2.0, 40, 77).unwrap());
    }

    #[test]
    fn point_variety_and_plane_volume() {
        let p = VarietySpec::build(2, VarietyKind::KPlane { point: vec![0.3, 0.4], frame: vec![] }).unwrap();
        assert_eq!(p.k(), 0);
        assert_eq!(p.sample_in_ball(1.0, 10, 0).unwrap(), vec![vec![0.3, 0.4]]);
        let plane = VarietySpec::build(
            3,
            VarietyKind::KPlane { point: vec![0.0, 0.0, 0.5], frame: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]] },
        )
        .unwrap();
        let area = plane.k_volume_in_ball(1.0).unwrap();
        assert!((area - core::f64::consts::PI * 0.75).abs() < 1e-12);
        for x in plane.sample_in_ball(1.0, 100, 4).unwrap() {
            assert!(plane.residual(&x).unwrap() < 1e-9);
            assert!(norm(&x) <= 1.0);
        }
    }
}
