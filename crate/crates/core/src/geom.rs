//! Planar vectors, isometries and incidence predicates.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeomError;
use crate::real::{Real, Width};

/// A point or vector in the plane over any [`Real`] scalar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec2<R> {
    pub x: R,
    pub y: R,
}

/// Double-precision planar vector; holonomies and unfolded corner images.
pub type PlanarVec = Vec2<f64>;

impl<R: Real> Vec2<R> {
    pub fn new(x: R, y: R) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2::new(R::from_i64(0), R::from_i64(0))
    }

    pub fn dot(&self, o: &Self) -> R {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn cross(&self, o: &Self) -> R {
        wedge(self, o)
    }

    pub fn norm_sq(&self) -> R {
        self.dot(self)
    }

    pub fn norm(&self) -> R {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: &R) -> Self {
        Vec2::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }

    /// Counterclockwise rotation by `theta` radians.
    pub fn rotate(&self, theta: &R) -> Self {
        let (c, s) = (theta.cos(), theta.sin());
        Vec2::new(
            c.clone() * self.x.clone() - s.clone() * self.y.clone(),
            s * self.x.clone() + c * self.y.clone(),
        )
    }

    pub fn to_f64(&self) -> PlanarVec {
        Vec2::new(self.x.to_f64(), self.y.to_f64())
    }

    pub fn lift(v: &PlanarVec) -> Self {
        Vec2::new(R::from_f64(v.x), R::from_f64(v.y))
    }
}

impl PlanarVec {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn checked(x: f64, y: f64) -> Result<Self, GeomError> {
        let v = Vec2 { x, y };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeomError::NonFinite)
        }
    }
}

impl<R: Real> Add for Vec2<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<R: Real> Sub for Vec2<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl<R: Real> Neg for Vec2<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<PlanarVec> for f64 {
    type Output = PlanarVec;
    fn mul(self, v: PlanarVec) -> PlanarVec {
        Vec2::new(self * v.x, self * v.y)
    }
}

/// Signed area of the parallelogram spanned by `u` and `v`.
pub fn wedge<R: Real>(u: &Vec2<R>, v: &Vec2<R>) -> R {
    u.x.clone() * v.y.clone() - u.y.clone() * v.x.clone()
}

/// `x ↦ linear·x + translation` with an orthogonal linear part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry<R> {
    pub linear: [[R; 2]; 2],
    pub translation: Vec2<R>,
}

impl<R: Real> Isometry<R> {
    pub fn identity() -> Self {
        let (o, z) = (R::from_i64(1), R::from_i64(0));
        Isometry {
            linear: [[o.clone(), z.clone()], [z, o]],
            translation: Vec2::zero(),
        }
    }

    pub fn translation(t: Vec2<R>) -> Self {
        Isometry {
            translation: t,
            ..Self::identity()
        }
    }

    /// Reflection in the line through `a` and `b`.
    pub fn reflection(a: &Vec2<R>, b: &Vec2<R>) -> Self {
        let d = b.clone() - a.clone();
        let n2 = d.norm_sq();
        let c = (d.x.clone() * d.x.clone() - d.y.clone() * d.y.clone()) / n2.clone();
        let s = R::from_i64(2) * d.x * d.y / n2;
        let linear = [[c.clone(), s.clone()], [s, -c]];
        let la = apply_linear(&linear, a);
        Isometry {
            linear,
            translation: a.clone() - la,
        }
    }

    pub fn apply(&self, p: &Vec2<R>) -> Vec2<R> {
        apply_linear(&self.linear, p) + self.translation.clone()
    }

    pub fn apply_linear(&self, v: &Vec2<R>) -> Vec2<R> {
        apply_linear(&self.linear, v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let a = &self.linear;
        let b = &other.linear;
        let m = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
        Isometry {
            linear: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]],
            translation: self.apply(&other.translation),
        }
    }

    pub fn inverse(&self) -> Self {
        let l = &self.linear;
        let lt = [[l[0][0].clone(), l[1][0].clone()], [l[0][1].clone(), l[1][1].clone()]];
        let t = apply_linear(&lt, &self.translation);
        Isometry {
            linear: lt,
            translation: -t,
        }
    }

    pub fn det(&self) -> R {
        let l = &self.linear;
        l[0][0].clone() * l[1][1].clone() - l[0][1].clone() * l[1][0].clone()
    }

    /// Largest deviation of the linear part from orthogonality.
    pub fn orthogonality_defect(&self) -> f64 {
        let l = &self.linear;
        let c0 = Vec2::new(l[0][0].clone(), l[1][0].clone());
        let c1 = Vec2::new(l[0][1].clone(), l[1][1].clone());
        let one = R::from_i64(1);
        [
            (c0.norm_sq() - one.clone()).abs(),
            (c1.norm_sq() - one).abs(),
            c0.dot(&c1).abs(),
        ]
        .iter()
        .map(|v| v.to_f64())
        .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Isometry<f64> {
        let l = &self.linear;
        Isometry {
            linear: [
                [l[0][0].to_f64(), l[0][1].to_f64()],
                [l[1][0].to_f64(), l[1][1].to_f64()],
            ],
            translation: self.translation.to_f64(),
        }
    }
}

fn apply_linear<R: Real>(l: &[[R; 2]; 2], p: &Vec2<R>) -> Vec2<R> {
    Vec2::new(
        l[0][0].clone() * p.x.clone() + l[0][1].clone() * p.y.clone(),
        l[1][0].clone() * p.x.clone() + l[1][1].clone() * p.y.clone(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    /// Relative tolerance for point-on-line and crossing tests.
    pub epsilon_incidence: f64,
    /// Decimal digits used when a predicate is escalated.
    pub working_digits: u32,
}

impl PrecisionConfig {
    pub fn new(epsilon_incidence: f64, working_digits: u32) -> Result<Self, GeomError> {
        if !(epsilon_incidence > 0.0 && epsilon_incidence < 1e-6) {
            return Err(GeomError::BadEpsilon(epsilon_incidence));
        }
        if working_digits < 16 || Width::for_digits(working_digits).is_none() {
            return Err(GeomError::BadDigits(working_digits));
        }
        Ok(PrecisionConfig {
            epsilon_incidence,
            working_digits,
        })
    }

    pub fn width(&self) -> Width {
        Width::for_digits(self.working_digits).unwrap_or(Width::W256)
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            epsilon_incidence: 1e-9,
            working_digits: 50,
        }
    }
}

/// Reflection of `p` in the line through `a` and `b`.
pub fn reflect_across_edge(
    p: &PlanarVec,
    a: &PlanarVec,
    b: &PlanarVec,
    cfg: &PrecisionConfig,
) -> Result<PlanarVec, GeomError> {
    let scale = a.norm().max(b.norm()).max(1.0);
    if (*b - *a).norm() < cfg.epsilon_incidence * scale {
        return Err(GeomError::DegenerateEdge);
    }
    if !(p.is_finite() && a.is_finite() && b.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    Ok(Isometry::reflection(a, b).apply(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingKind {
    NoCross,
    InteriorTransversal,
    EndpointTouch,
    CollinearOverlap,
}

/// Sign of `wedge(b - a, c - a)` with values inside the relative band treated as 0.
pub fn orient(a: &PlanarVec, b: &PlanarVec, c: &PlanarVec, eps: f64) -> i8 {
    let u = *b - *a;
    let v = *c - *a;
    let w = wedge(&u, &v);
    if w.abs() <= eps * u.norm() * v.norm() {
        0
    } else if w > 0.0 {
        1
    } else {
        -1
    }
}

pub fn segment_crossing(
    seg_a: (PlanarVec, PlanarVec),
    seg_b: (PlanarVec, PlanarVec),
    cfg: &PrecisionConfig,
) -> CrossingKind {
    let eps = cfg.epsilon_incidence;
    let (a1, a2) = seg_a;
    let (b1, b2) = seg_b;
    let o1 = orient(&a1, &a2, &b1, eps);
    let o2 = orient(&a1, &a2, &b2, eps);
    let o3 = orient(&b1, &b2, &a1, eps);
    let o4 = orient(&b1, &b2, &a2, eps);

    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        // Both on one line: compare projections on a shared axis.
        let d = if (a2 - a1).norm() >= (b2 - b1).norm() { a2 - a1 } else { b2 - b1 };
        let p = |v: &PlanarVec| v.dot(&d);
        let (a_lo, a_hi) = minmax(p(&a1), p(&a2));
        let (b_lo, b_hi) = minmax(p(&b1), p(&b2));
        let overlap = a_hi.min(b_hi) - a_lo.max(b_lo);
        let tol = eps * d.norm_sq();
        return if overlap > tol {
            CrossingKind::CollinearOverlap
        } else if overlap >= -tol {
            CrossingKind::EndpointTouch
        } else {
            CrossingKind::NoCross
        };
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return CrossingKind::InteriorTransversal;
    }
    let within = |p: &PlanarVec, s: &PlanarVec, e: &PlanarVec| {
        let d = *e - *s;
        let t = (*p - *s).dot(&d) / d.norm_sq();
        let tol = eps.sqrt();
        (-tol..=1.0 + tol).contains(&t)
    };
    let touches = (o1 == 0 && within(&b1, &a1, &a2))
        || (o2 == 0 && within(&b2, &a1, &a2))
        || (o3 == 0 && within(&a1, &b1, &b2))
        || (o4 == 0 && within(&a2, &b1, &b2));
    if touches {
        CrossingKind::EndpointTouch
    } else {
        CrossingKind::NoCross
    }
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
