//! Labeled rational polygons and the regular N-gon.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::PolygonError;
use crate::expr::Expr;
use crate::geom::{segment_crossing, wedge, CrossingKind, PlanarVec, PrecisionConfig, Vec2};
use crate::real::{Hp192, Real};

pub const POLYGON_SCHEMA: &str = "billiard-polygon/1";

/// A reduced fraction `p/q` with `q > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frac {
    pub p: i64,
    pub q: i64,
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

impl Frac {
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        let g = gcd(p, q).max(1) * q.signum();
        Frac { p: p / g, q: q / g }
    }

    pub fn to_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Frac {
    type Err = PolygonError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PolygonError::BadAngle(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: i64 = p.parse().map_err(|_| bad())?;
        let q: i64 = q.parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Ok(Frac::new(p, q))
    }
}

impl Serialize for Frac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Frac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// On-disk polygon record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonFile {
    pub schema: String,
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<[Expr; 2]>,
    /// Interior angle at each vertex as a multiple of π; `null` if unknown.
    pub angles: Vec<Option<Frac>>,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// A simple counterclockwise polygon with exact vertex expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonSpec {
    name: String,
    exprs: Vec<[Expr; 2]>,
    vertices: Vec<PlanarVec>,
    side_labels: Vec<String>,
    angle_fractions: Vec<Option<Frac>>,
}

fn default_label(i: usize) -> String {
    let mut s = String::new();
    let mut i = i;
    loop {
        s.insert(0, (b'a' + (i % 26) as u8) as char);
        if i < 26 {
            return s;
        }
        i = i / 26 - 1;
    }
}

impl PolygonSpec {
    /// Builds and validates a polygon. Empty `labels` means `a, b, c, ...`.
    pub fn new(
        name: impl Into<String>,
        exprs: Vec<[Expr; 2]>,
        angle_fractions: Vec<Option<Frac>>,
        labels: Vec<String>,
    ) -> Result<Self, PolygonError> {
        let n = exprs.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices);
        }
        let side_labels = if labels.is_empty() {
            (0..n).map(default_label).collect()
        } else {
            labels
        };
        if side_labels.len() != n {
            return Err(PolygonError::LabelCount {
                got: side_labels.len(),
                expected: n,
            });
        }
        if angle_fractions.len() != n {
            return Err(PolygonError::Schema(format!(
                "{} angles for {} vertices",
                angle_fractions.len(),
                n
            )));
        }
        let vertices: Vec<PlanarVec> = exprs
            .iter()
            .map(|[x, y]| PlanarVec::checked(x.eval(), y.eval()))
            .collect::<Result<_, _>>()?;
        let p = PolygonSpec {
            name: name.into(),
            exprs,
            vertices,
            side_labels,
            angle_fractions,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_file(f: PolygonFile) -> Result<Self, PolygonError> {
        if f.schema != POLYGON_SCHEMA {
            return Err(PolygonError::Schema(format!(
                "expected schema `{POLYGON_SCHEMA}`, found `{}`",
                f.schema
            )));
        }
        Self::new(f.name, f.vertices, f.angles, f.labels)
    }

    pub fn from_json(s: &str) -> Result<Self, PolygonError> {
        let f: PolygonFile = serde_json::from_str(s).map_err(|e| PolygonError::Schema(e.to_string()))?;
        Self::from_file(f)
    }

    pub fn to_file(&self) -> PolygonFile {
        PolygonFile {
            schema: POLYGON_SCHEMA.into(),
            name: self.name.clone(),
            vertices: self.exprs.clone(),
            angles: self.angle_fractions.clone(),
            labels: self.side_labels.clone(),
        }
    }

    fn validate(&self) -> Result<(), PolygonError> {
        let n = self.len();
        if self.signed_area() <= 0.0 {
            return Err(PolygonError::Clockwise);
        }
        let cfg = PrecisionConfig::default();
        for i in 0..n {
            let (a, b) = self.side(i);
            if (b - a).norm() < 1e-12 {
                return Err(PolygonError::NotSimple);
            }
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let kind = segment_crossing(self.side(i), self.side(j), &cfg);
                let ok = if adjacent {
                    // neighbours may only share their common corner
                    kind != CrossingKind::CollinearOverlap && kind != CrossingKind::InteriorTransversal
                } else {
                    kind == CrossingKind::NoCross
                };
                if !ok {
                    return Err(PolygonError::NotSimple);
                }
            }
        }
        if self.angle_fractions.iter().all(Option::is_some) {
            let mut sum = Frac::new(0, 1);
            for (i, f) in self.angle_fractions.iter().enumerate() {
                let f = f.expect("checked");
                if f.p <= 0 || f.p >= 2 * f.q {
                    return Err(PolygonError::BadAngle(f.to_string()));
                }
                let measured = self.interior_angle(i) / std::f64::consts::PI;
                if (measured - f.to_f64()).abs() > 1e-9 {
                    return Err(PolygonError::AngleMismatch {
                        vertex: i,
                        measured,
                        declared: f.to_f64(),
                    });
                }
                sum = Frac::new(sum.p * f.q + f.p * sum.q, sum.q * f.q);
            }
            if sum != Frac::new(n as i64 - 2, 1) {
                return Err(PolygonError::AngleSum {
                    got: sum.to_string(),
                    expected: n as i64 - 2,
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[PlanarVec] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> PlanarVec {
        self.vertices[i % self.len()]
    }

    pub fn vertex_exprs(&self) -> &[[Expr; 2]] {
        &self.exprs
    }

    /// Vertices re-evaluated at the precision of `R`.
    pub fn vertices_at<R: Real>(&self) -> Vec<Vec2<R>> {
        self.exprs.iter().map(|[x, y]| Vec2::new(x.eval(), y.eval())).collect()
    }

    pub fn side_labels(&self) -> &[String] {
        &self.side_labels
    }

    pub fn angle_fractions(&self) -> &[Option<Frac>] {
        &self.angle_fractions
    }

    /// Side `i` runs from vertex `i` to vertex `i + 1`.
    pub fn side(&self, i: usize) -> (PlanarVec, PlanarVec) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn side_vector(&self, i: usize) -> PlanarVec {
        let (a, b) = self.side(i);
        b - a
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| wedge(&self.vertex(i), &self.vertex(i + 1)))
            .sum::<f64>()
            / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Interior angle at vertex `i` in radians, in `(0, 2π)`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let v = self.vertex(i);
        let fwd = self.vertex(i + 1) - v;
        let back = self.vertex(i + n - 1) - v;
        let a = wedge(&fwd, &back).atan2(fwd.dot(&back));
        if a <= 0.0 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a
        }
    }

    pub fn is_convex(&self) -> bool {
        (0..self.len()).all(|i| self.interior_angle(i) < std::f64::consts::PI - 1e-12)
    }

    /// True when every vertex is an exactly representable small integer and
    /// every side is axis-parallel, so reflected copies are computed without
    /// rounding in double precision.
    pub fn is_integral_rectilinear(&self) -> bool {
        let exact = self.exprs.iter().zip(&self.vertices).all(|([x, y], v)| {
            let ok = |e: &Expr, f: f64| {
                f.fract() == 0.0 && f.abs() < 1e6 && (e.eval::<Hp192>() - Hp192::from_f64(f)).is_zero()
            };
            ok(x, v.x) && ok(y, v.y)
        });
        exact && (0..self.len()).all(|i| {
            let d = self.side_vector(i);
            d.x == 0.0 || d.y == 0.0
        })
    }

    pub fn circumradius_about(&self, c: PlanarVec) -> f64 {
        self.vertices.iter().map(|v| (*v - c).norm()).fold(0.0, f64::max)
    }
}

/// N with its residue class, as used throughout the regular-polygon formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGonParams {
    pub n: u32,
    pub parity_class: ParityClass,
    pub k: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParityClass {
    #[serde(rename = "4k")]
    FourK,
    #[serde(rename = "4k+2")]
    FourKPlusTwo,
    #[serde(rename = "odd")]
    Odd,
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityClass::FourK => "4k",
            ParityClass::FourKPlusTwo => "4k+2",
            ParityClass::Odd => "odd",
        })
    }
}

impl NGonParams {
    pub fn new(n: i64) -> Result<Self, PolygonError> {
        if n < 3 {
            return Err(PolygonError::InvalidN { got: n, min: 3 });
        }
        let n = n as u32;
        let (parity_class, k) = match n % 4 {
            0 => (ParityClass::FourK, n / 4),
            2 => (ParityClass::FourKPlusTwo, (n - 2) / 4),
            _ => (ParityClass::Odd, (n - 1) / 2),
        };
        Ok(NGonParams { n, parity_class, k })
    }

    pub fn is_even(&self) -> bool {
        self.parity_class != ParityClass::Odd
    }
}

/// The regular N-gon inscribed in the unit circle with a vertex at `(1, 0)`.
pub fn regular_ngon(n: i64) -> Result<PolygonSpec, PolygonError> {
    NGonParams::new(n)?;
    let exprs = (0..n)
        .map(|j| [Expr::cos_pi(2 * j, n), Expr::sin_pi(2 * j, n)])
        .collect();
    let angle = Frac::new(n - 2, n);
    PolygonSpec::new(format!("ngon:{n}"), exprs, vec![Some(angle); n as usize], vec![])
}

pub fn unit_square() -> PolygonSpec {
    let e = |a: i64, b: i64| [Expr::from_int(a), Expr::from_int(b)];
    PolygonSpec::new(
        "square",
        vec![e(0, 0), e(1, 0), e(1, 1), e(0, 1)],
        vec![Some(Frac::new(1, 2)); 4],
        vec![],
    )
    .expect("unit square is valid")
}

pub fn equilateral_triangle() -> PolygonSpec {
    let p = |s: &str| Expr::parse(s).expect("well-formed");
    PolygonSpec::new(
        "triangle",
        vec![[p("0"), p("0")], [p("1"), p("0")], [p("1/2"), p("sqrt(3)/2")]],
        vec![Some(Frac::new(1, 3)); 3],
        vec![],
    )
    .expect("equilateral triangle is valid")
}

/// Resolves `square`, `triangle` and `ngon:N`.
pub fn polygon_alias(name: &str) -> Result<PolygonSpec, PolygonError> {
    match name {
        "square" => Ok(unit_square()),
        "triangle" => Ok(equilateral_triangle()),
        _ => match name.strip_prefix("ngon:") {
            Some(n) => regular_ngon(
                n.parse()
                    .map_err(|_| PolygonError::Schema(format!("bad N in `{name}`")))?,
            ),
            None => Err(PolygonError::Schema(format!("unknown polygon alias `{name}`"))),
        },
    }
}

/// Order of the group generated by reflections in lines through the origin
/// parallel to the sides.
///
/// The rotation subgroup is generated by twice the pairwise angles between
/// side directions. Those angles are integer combinations of the interior
/// angles, so the subgroup is cyclic of order lcm of the reduced angle
/// denominators and the full dihedral group has twice that order.
pub fn rationality_check(p: &PolygonSpec) -> Result<u64, PolygonError> {
    let mut m = 1i64;
    for (i, f) in p.angle_fractions().iter().enumerate() {
        let f = f.ok_or(PolygonError::IrrationalAngle(i))?;
        m = lcm(m, f.q);
    }
    Ok(2 * m as u64)
}
