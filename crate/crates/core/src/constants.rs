//! Closed-form complexity constants for regular polygons and the
//! cusp-by-cusp pipeline that reproduces them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ConstantsError;
use crate::geom::{wedge, PlanarVec, Vec2};
use crate::polygon::{NGonParams, ParityClass};
use crate::real::{at_width, Hp128, Hp192, Real, Width};

fn params(n: i64, min: i64) -> Result<NGonParams, ConstantsError> {
    if n < min {
        return Err(ConstantsError::InvalidN { got: n, min });
    }
    NGonParams::new(n).map_err(|_| ConstantsError::InvalidN { got: n, min })
}

fn r<R: Real>(n: i64) -> R {
    R::from_i64(n)
}

/// `(cos, sin)` at the angles `π(a/b + i·c/d)` for `i < count`, stepped by
/// rotation so only two angles need transcendental evaluation. The rounding
/// error grows linearly in `count`.
fn angle_walk<R: Real>(first: (i64, i64), step: (i64, i64), count: i64) -> impl Iterator<Item = (R, R)> {
    let t0 = R::pi_ratio(first.0, first.1);
    let dt = R::pi_ratio(step.0, step.1);
    let (dc, ds) = (dt.cos(), dt.sin());
    let mut cur = (t0.cos(), t0.sin());
    (0..count.max(0)).map(move |_| {
        let (c, s) = cur.clone();
        cur = (
            c.clone() * dc.clone() - s.clone() * ds.clone(),
            c.clone() * ds.clone() + s.clone() * dc.clone(),
        );
        (c, s)
    })
}

/// `Σ_{j=1}^{m-1} 1/sin²(πj/m)` by direct summation, and `(m²-1)/3`.
pub fn fundamental_identity<R: Real>(m: i64) -> Result<(R, R), ConstantsError> {
    if m < 2 {
        return Err(ConstantsError::InvalidM(m));
    }
    let lhs = angle_walk::<R>((1, m), (1, m), m - 1).fold(r::<R>(0), |acc, (_, s)| acc + s.square().recip());
    let rhs = R::from_ratio(m * m - 1, 3);
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub m: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

fn rel<R: Real>(a: &R, b: &R) -> f64 {
    ((a.clone() - b.clone()).abs() / b.abs()).to_f64()
}

/// The identity for every `2 ≤ m ≤ m_max` at 38 significant digits.
pub fn fundamental_identity_sweep(m_max: i64) -> Result<Vec<IdentityRow>, ConstantsError> {
    if m_max < 2 {
        return Err(ConstantsError::InvalidM(m_max));
    }
    (2..=m_max)
        .into_par_iter()
        .map(|m| {
            let (l, rh) = fundamental_identity::<Hp128>(m)?;
            Ok(IdentityRow {
                m,
                lhs: l.to_f64(),
                rhs: rh.to_f64(),
                rel_err: rel(&l, &rh),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrigSum {
    /// `Σ_{j=1}^{k-1} 1/cos²(jπ/2k)`
    Zero,
    /// `Σ_{j=1}^{k} 1/cos²((2j-1)π/4k)`
    PiOverN,
    /// `Σ_{j=1}^{k} 1/cos²(jπ/(2k+1))`
    ZeroStar,
    /// `Σ_{j=1}^{k} 1/cos²((2j-1)π/(4k+2))`
    PiOverNStar,
    /// `Σ_{j=1}^{k} 1/sin²(2πj/(2k+1))`
    HalfPiStarStar,
}

impl TrigSum {
    pub const ALL: [TrigSum; 5] = [
        TrigSum::Zero,
        TrigSum::PiOverN,
        TrigSum::ZeroStar,
        TrigSum::PiOverNStar,
        TrigSum::HalfPiStarStar,
    ];

    /// The residue class of N whose constant uses this sum.
    pub fn parity_class(self) -> ParityClass {
        match self {
            TrigSum::Zero | TrigSum::PiOverN => ParityClass::FourK,
            TrigSum::ZeroStar | TrigSum::PiOverNStar => ParityClass::FourKPlusTwo,
            TrigSum::HalfPiStarStar => ParityClass::Odd,
        }
    }

    pub fn direct<R: Real>(self, k: i64) -> R {
        let sum = |first: (i64, i64), step: (i64, i64), count: i64, use_sin: bool| {
            angle_walk::<R>(first, step, count).fold(r::<R>(0), |acc, (c, s)| {
                acc + if use_sin { s } else { c }.square().recip()
            })
        };
        match self {
            TrigSum::Zero => sum((1, 2 * k), (1, 2 * k), k - 1, false),
            TrigSum::PiOverN => sum((1, 4 * k), (1, 2 * k), k, false),
            TrigSum::ZeroStar => sum((1, 2 * k + 1), (1, 2 * k + 1), k, false),
            TrigSum::PiOverNStar => sum((1, 4 * k + 2), (1, 2 * k + 1), k, false),
            TrigSum::HalfPiStarStar => sum((2, 2 * k + 1), (2, 2 * k + 1), k, true),
        }
    }

    pub fn closed<R: Real>(self, k: i64) -> R {
        match self {
            TrigSum::Zero => R::from_ratio(2 * (k * k - 1), 3),
            TrigSum::PiOverN => r(2 * k * k),
            TrigSum::ZeroStar => r(2 * (k * k + k)),
            TrigSum::PiOverNStar | TrigSum::HalfPiStarStar => R::from_ratio(2 * (k * k + k), 3),
        }
    }
}

/// The half-sum as written in one derivation step, `((2k+1)² - 3)/6`, which
/// disagrees with the closed form `(2/3)(k² + k)` by exactly `1/3`.
pub fn half_pi_star_star_printed_step<R: Real>(k: i64) -> R {
    R::from_ratio((2 * k + 1) * (2 * k + 1) - 3, 6)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigSumRow {
    pub k: i64,
    pub sum: TrigSum,
    pub relevant_to: ParityClass,
    pub direct: f64,
    pub closed: f64,
    pub rel_err: f64,
}

/// All five sums for `1 ≤ k ≤ k_max`, at 38 significant digits.
pub fn trig_sum_sweep(k_max: i64) -> Vec<TrigSumRow> {
    (1..=k_max)
        .into_par_iter()
        .flat_map_iter(|k| {
            TrigSum::ALL.into_iter().map(move |s| {
                let d: Hp128 = s.direct(k);
                let c: Hp128 = s.closed(k);
                let rel_err = if c.is_zero() { d.abs().to_f64() } else { rel(&d, &c) };
                TrigSumRow {
                    k,
                    sum: s,
                    relevant_to: s.parity_class(),
                    direct: d.to_f64(),
                    closed: c.to_f64(),
                    rel_err,
                }
            })
        })
        .collect()
}

/// `{z : Σ_j |z ∧ z_j| ≤ 1}` for pairwise non-parallel `z_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaPolygon<R> {
    pub defining_holonomies: Vec<Vec2<R>>,
    pub tau: Vec<R>,
    /// `±τ_j z_j` sorted by angle from the positive real axis.
    pub vertices: Vec<Vec2<R>>,
    pub area: R,
}

fn upper<R: Real>(v: &Vec2<R>) -> bool {
    let z = r::<R>(0);
    v.y > z || (v.y == z && v.x > z)
}

pub fn omega_polygon<R: Real>(holonomies: &[Vec2<R>]) -> Result<OmegaPolygon<R>, ConstantsError> {
    let m = holonomies.len();
    if m < 2 {
        return Err(ConstantsError::TooFewHolonomies);
    }
    let eps = R::from_f64(1e-12);
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (&holonomies[i], &holonomies[j]);
            if wedge(a, b).abs() <= eps.clone() * a.norm() * b.norm() {
                return Err(ConstantsError::ParallelHolonomies(i, j));
            }
        }
    }
    let tau: Vec<R> = (0..m)
        .map(|j| {
            (0..m)
                .filter(|&i| i != j)
                .fold(r::<R>(0), |acc, i| acc + wedge(&holonomies[j], &holonomies[i]).abs())
                .recip()
        })
        .collect();
    let mut vertices: Vec<Vec2<R>> = holonomies
        .iter()
        .zip(&tau)
        .flat_map(|(z, t)| {
            let v = z.scale(t);
            [v.clone(), -v]
        })
        .collect();
    vertices.sort_by(|a, b| {
        upper(b)
            .cmp(&upper(a))
            .then_with(|| r::<R>(0).partial_cmp(&wedge(a, b)).expect("finite"))
    });
    let n = vertices.len();
    let area = (0..n).fold(r::<R>(0), |acc, i| acc + wedge(&vertices[i], &vertices[(i + 1) % n])) / r(2);
    Ok(OmegaPolygon {
        defining_holonomies: holonomies.to_vec(),
        tau,
        vertices,
        area,
    })
}

impl<R: Real> OmegaPolygon<R> {
    /// `max_v |Σ_i |v ∧ z_i| - 1|` over the vertices.
    pub fn vertex_defect(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| {
                let s = self
                    .defining_holonomies
                    .iter()
                    .fold(r::<R>(0), |acc, z| acc + wedge(v, z).abs());
                (s - r(1)).abs().to_f64()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[(i + 1) % n].clone() - self.vertices[i].clone();
            let b = self.vertices[(i + 2) % n].clone() - self.vertices[(i + 1) % n].clone();
            wedge(&a, &b) > r(0)
        })
    }

    pub fn is_centrally_symmetric(&self) -> bool {
        let n = self.vertices.len();
        (0..n / 2).all(|i| {
            let s = self.vertices[i].clone() + self.vertices[i + n / 2].clone();
            s.norm().to_f64() < 1e-9
        })
    }

    pub fn circumradius(&self) -> R {
        self.vertices
            .iter()
            .map(|v| v.norm())
            .fold(r(0), R::max_of)
    }
}

/// Side holonomies `ζ_{j+1} - ζ_j` of the inscribed N-gon for `j < count`.
pub fn side_holonomies<R: Real>(n: i64, count: i64) -> Vec<Vec2<R>> {
    let z = |j: i64| Vec2::new(R::pi_ratio(2 * j, n).cos(), R::pi_ratio(2 * j, n).sin());
    (0..count).map(|j| z(j + 1) - z(j)).collect()
}

/// Area of `Ω̂` for the N-gon's filling system at its native scale.
pub fn omega_area_closed<R: Real>(n: i64) -> Result<R, ConstantsError> {
    let p = params(n, 3)?;
    Ok(if p.is_even() {
        R::from_ratio(n, 4) * R::pi_ratio(1, n).tan()
    } else {
        let rho = (r::<R>(2) * (r::<R>(1) + R::pi_ratio(1, n).cos())).recip();
        rho.square() * r(n) * R::pi_ratio(1, n).sin()
    })
}

/// Ω̂ built from the filling-system holonomies of `S_N`.
pub fn omega_for_ngon<R: Real>(n: i64) -> Result<OmegaPolygon<R>, ConstantsError> {
    let p = params(n, 3)?;
    let count = if p.is_even() { n / 2 } else { n };
    omega_polygon(&side_holonomies(n, count))
}

pub fn area_a<R: Real>(n: i64) -> R {
    R::from_ratio(n, 2) * R::pi_ratio(2, n).sin()
}

pub fn side_r<R: Real>(n: i64) -> R {
    (r::<R>(2) * (r::<R>(1) - R::pi_ratio(2, n).cos())).sqrt()
}

/// Covolume of the Veech group of `S_N`.
pub fn covolume<R: Real>(n: i64) -> R {
    let c = R::pi() * R::from_ratio(n - 2, n);
    if n % 2 == 0 {
        r::<R>(2) * c
    } else {
        c
    }
}

pub fn sigma<R: Real>(n: i64) -> R {
    if n % 2 == 0 {
        r(1)
    } else {
        let c = R::pi_ratio(1, n).cos();
        r::<R>(4) * c.clone() / (r::<R>(1) + c).square()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CuspDirection {
    Horizontal,
    PiOverN,
    Vertical,
}

impl CuspDirection {
    pub fn angle<R: Real>(self, n: i64) -> R {
        match self {
            CuspDirection::Horizontal => r(0),
            CuspDirection::PiOverN => R::pi_ratio(1, n),
            CuspDirection::Vertical => R::pi_ratio(1, 2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cusp<R> {
    pub direction: CuspDirection,
    /// `(native length, multiplicity)`
    pub lengths: Vec<(R, u32)>,
}

impl<R: Real> Cusp<R> {
    pub fn flat(&self) -> Vec<R> {
        self.lengths
            .iter()
            .flat_map(|(l, m)| std::iter::repeat(l.clone()).take(*m as usize))
            .collect()
    }
}

/// Saddle connections of one cusp direction, one per cylinder boundary.
pub fn cusp_representatives<R: Real>(n: i64) -> Result<Vec<Cusp<R>>, ConstantsError> {
    let p = params(n, 3)?;
    let k = p.k as i64;
    let two = || r::<R>(2);
    let cos2 = |a: i64, b: i64| two() * R::pi_ratio(a, b).cos();
    Ok(match p.parity_class {
        ParityClass::FourK => {
            let mut h = vec![(two(), 1)];
            h.extend((1..k).map(|j| (cos2(j, 2 * k), 2)));
            let mut d = vec![(cos2(2 * k - 1, 4 * k), 1)];
            d.extend((1..k).map(|j| (cos2(2 * j - 1, 4 * k), 2)));
            vec![
                Cusp {
                    direction: CuspDirection::Horizontal,
                    lengths: h,
                },
                Cusp {
                    direction: CuspDirection::PiOverN,
                    lengths: d,
                },
            ]
        }
        ParityClass::FourKPlusTwo => {
            let mut h = vec![(two(), 1), (cos2(k, 2 * k + 1), 1)];
            h.extend((1..k).map(|j| (cos2(j, 2 * k + 1), 2)));
            let d = (1..=k).map(|j| (cos2(2 * j - 1, n), 2)).collect();
            vec![
                Cusp {
                    direction: CuspDirection::Horizontal,
                    lengths: h,
                },
                Cusp {
                    direction: CuspDirection::PiOverN,
                    lengths: d,
                },
            ]
        }
        ParityClass::Odd => {
            let sin2 = |j: i64| two() * R::pi_ratio(2 * j, n).sin();
            let mut v = vec![(sin2(k), 1)];
            v.extend((1..k).map(|j| (sin2(j), 2)));
            vec![Cusp {
                direction: CuspDirection::Vertical,
                lengths: v,
            }]
        }
    })
}

/// `(1/π)(1/covol)·2cot(π/N)·Σ 1/|z|²`
pub fn cusp_constant<R: Real>(reps: &[R], n: i64, covol: &R) -> Result<R, ConstantsError> {
    if reps.is_empty() {
        return Err(ConstantsError::EmptyReps);
    }
    if reps.iter().any(Real::is_zero) {
        return Err(ConstantsError::ZeroLengthRep);
    }
    let s = reps.iter().fold(r::<R>(0), |acc, z| acc + z.square().recip());
    Ok(r::<R>(2) * R::pi_ratio(1, n).cot() * s / (R::pi() * covol.clone()))
}

/// Closed form of one cusp constant, used to cross-check the summation.
pub fn cusp_constant_closed<R: Real>(n: i64, dir: CuspDirection) -> Result<R, ConstantsError> {
    let p = params(n, 3)?;
    let k = p.k as i64;
    let pre = R::from_ratio(n, n - 2) * R::pi_ratio(1, n).cot() / R::pi().square();
    let bracket = match (p.parity_class, dir) {
        (ParityClass::FourK, CuspDirection::Horizontal) => R::from_ratio(1, 4) + R::from_ratio(k * k - 1, 3),
        (ParityClass::FourK, CuspDirection::PiOverN) => {
            r::<R>(k * k) - (r::<R>(4) * R::pi_ratio(1, n).sin().square()).recip()
        }
        (ParityClass::FourKPlusTwo, CuspDirection::Horizontal) => {
            R::from_ratio(1, 4) + TrigSum::ZeroStar.closed::<R>(k) / r(2)
                - (r::<R>(4) * R::pi_ratio(k, 2 * k + 1).cos().square()).recip()
        }
        (ParityClass::FourKPlusTwo, CuspDirection::PiOverN) => TrigSum::PiOverNStar.closed::<R>(k) / r(2),
        (ParityClass::Odd, CuspDirection::Vertical) => {
            TrigSum::HalfPiStarStar.closed::<R>(k)
                - (r::<R>(2) * R::pi_ratio(2 * k, n).sin().square()).recip()
        }
        _ => return Err(ConstantsError::InvalidN { got: n, min: 3 }),
    };
    Ok(pre * bracket)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspValue<R> {
    pub direction: CuspDirection,
    pub reps: Vec<R>,
    pub value: R,
    pub closed: R,
}

/// Every intermediate of the pipeline at a chosen area normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombBreakdown<R> {
    /// Area of the surface at which the cusp constants are taken.
    pub area: R,
    pub cusps: Vec<CuspValue<R>>,
    pub c_geometric: R,
    pub omega_area: R,
    pub c_comb: R,
}

/// `area²·c_G·|Ω̂|` with all holonomies rescaled so that `S_N` has the
/// given area.
pub fn c_comb_at<R: Real>(n: i64, area: Option<R>) -> Result<CombBreakdown<R>, ConstantsError> {
    let p = params(n, 3)?;
    let native = if p.is_even() { area_a::<R>(n) } else { r::<R>(2) * area_a::<R>(n) };
    let area = area.unwrap_or_else(|| native.clone());
    let s = (area.clone() / native).sqrt();
    let covol = covolume::<R>(n);
    let cusps = cusp_representatives::<R>(n)?
        .into_iter()
        .map(|c| {
            let reps: Vec<R> = c.flat().into_iter().map(|l| l * s.clone()).collect();
            let value = cusp_constant(&reps, n, &covol)?;
            let closed = cusp_constant_closed::<R>(n, c.direction)? / s.square();
            Ok(CuspValue {
                direction: c.direction,
                reps,
                value,
                closed,
            })
        })
        .collect::<Result<Vec<_>, ConstantsError>>()?;
    let c_geometric = cusps.iter().fold(r::<R>(0), |acc, c| acc + c.value.clone());
    let count = if p.is_even() { n / 2 } else { n };
    let holonomies: Vec<Vec2<R>> = side_holonomies::<R>(n, count).iter().map(|z| z.scale(&s)).collect();
    let omega_area = omega_polygon(&holonomies)?.area;
    let c_comb = area.square() * c_geometric.clone() * omega_area.clone();
    Ok(CombBreakdown {
        area,
        cusps,
        c_geometric,
        omega_area,
        c_comb,
    })
}

/// Combinatorial counting constant of `S_N` with respect to its sides.
pub fn c_comb<R: Real>(n: i64) -> Result<R, ConstantsError> {
    Ok(c_comb_at::<R>(n, None)?.c_comb)
}

/// `c_N` straight from the closed formula; halved relative to the true
/// value at N = 3, 4.
pub fn c_n_formula<R: Real>(n: i64) -> Result<R, ConstantsError> {
    params(n, 3)?;
    let s2 = R::pi_ratio(2, n).sin().square();
    let pre = r::<R>(n * n * n * n) * s2 / (r::<R>(48) * R::pi().square() * r(n - 2));
    let bracket = R::from_ratio(n * n, 12)
        - (r::<R>(4) * R::pi_ratio(1, n).sin().square()).recip()
        - R::from_ratio(1, 12);
    Ok(sigma::<R>(n) * pre * bracket)
}

/// `c_comb/3` for even N, `c_comb/6` for odd N.
pub fn c_n_pipeline<R: Real>(n: i64) -> Result<R, ConstantsError> {
    let d = if n % 2 == 0 { 3 } else { 6 };
    Ok(c_comb::<R>(n)? / r(d))
}

/// Complexity constants of the triangle and square, twice the formula value
/// because their Veech groups differ from the Hecke groups by index two.
pub fn special_value<R: Real>(n: i64) -> Option<R> {
    match n {
        3 => Some(R::from_ratio(3, 4) / R::pi().square()),
        4 => Some(r::<R>(4) / R::pi().square()),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnValue<R> {
    /// The constant to use.
    pub value: R,
    pub closed: R,
    pub pipeline: R,
    /// Set for N = 3, 4 where `value = 2·closed`.
    pub index_two_special_case: bool,
}

pub fn c_n<R: Real>(n: i64) -> Result<CnValue<R>, ConstantsError> {
    let closed = c_n_formula::<R>(n)?;
    let pipeline = c_n_pipeline::<R>(n)?;
    let special = special_value::<R>(n);
    Ok(CnValue {
        index_two_special_case: special.is_some(),
        value: special.unwrap_or_else(|| closed.clone()),
        closed,
        pipeline,
    })
}

/// `(1/48)(1/3 - 1/π²)`
pub fn limit_constant<R: Real>() -> R {
    (R::from_ratio(1, 3) - R::pi().square().recip()) / r(48)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub n: i64,
    pub ratio: f64,
    pub rel_dev: f64,
}

/// `c_N/N³` and its relative distance to the limit for `5 ≤ N ≤ n_max`,
/// sampled at `step`.
pub fn asymptotic_limit_check(n_max: i64, step: usize) -> Result<Vec<LimitRow>, ConstantsError> {
    params(n_max, 5)?;
    let lim = limit_constant::<Hp192>();
    let mut ns: Vec<i64> = (5..=n_max).step_by(step.max(1)).collect();
    if ns.last() != Some(&n_max) {
        ns.push(n_max);
    }
    ns.into_par_iter()
        .map(|n| {
            let c = c_n_formula::<Hp192>(n)?;
            let ratio = c / r::<Hp192>(n * n * n);
            Ok(LimitRow {
                n,
                ratio: ratio.to_f64(),
                rel_dev: rel(&ratio, &lim),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspReport {
    pub direction: CuspDirection,
    pub representatives: Vec<f64>,
    pub value: f64,
    pub closed_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub working_digits: u32,
    pub closed_route: String,
    pub pipeline_route: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub n: i64,
    pub k: u32,
    pub parity_class: ParityClass,
    pub a_n: f64,
    pub r_n: f64,
    pub covol: f64,
    pub cusp_constants: Vec<CuspReport>,
    pub c_geometric: f64,
    pub omega_hat_area: f64,
    pub omega_hat_area_closed: f64,
    pub c_comb: f64,
    pub sigma_n: f64,
    pub c_n_pipeline: f64,
    pub c_n_closed: f64,
    /// Reported constant; differs from `c_n_closed` only at N = 3, 4.
    pub c_n: f64,
    pub index_two_special_case: bool,
    pub limit_ratio: f64,
    pub dual_route_rel_err: f64,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

pub const DUAL_ROUTE_TOL: f64 = 1e-9;

impl ConstantsReport {
    /// Both routes agree; at N = 3, 4 the reported value is twice the formula.
    pub fn passes(&self) -> bool {
        let special_ok = !self.index_two_special_case
            || ((self.c_n - 2.0 * self.c_n_closed).abs() <= 1e-12 * self.c_n);
        self.dual_route_rel_err < DUAL_ROUTE_TOL
            && ((self.omega_hat_area - self.omega_hat_area_closed) / self.omega_hat_area_closed).abs() < DUAL_ROUTE_TOL
            && special_ok
    }
}

/// Report at the default 56-digit width.
pub fn constants_report(n: i64) -> Result<ConstantsReport, ConstantsError> {
    constants_report_at::<Hp192>(n)
}

pub fn constants_report_with(n: i64, width: Width) -> Result<ConstantsReport, ConstantsError> {
    at_width!(width, H => constants_report_at::<H>(n))
}

/// Evaluates everything in `H` and rounds to double for the report.
pub fn constants_report_at<H: Real>(n: i64) -> Result<ConstantsReport, ConstantsError> {
    let p = params(n, 3)?;
    let b = c_comb_at::<H>(n, None)?;
    let v = c_n::<H>(n)?;
    let dual = rel(&v.pipeline, &v.closed);
    let mut notes = vec![];
    if v.index_two_special_case {
        notes.push(format!(
            "N = {n}: the Veech group has index two in the Hecke group, so the true constant is twice the formula value"
        ));
    }
    if p.parity_class == ParityClass::Odd {
        notes.push(
            "the half-sum step ((2k+1)^2 - 3)/6 is off by 1/3; direct summation confirms (2/3)(k^2 + k)".into(),
        );
    }
    let cube = r::<H>(n * n * n);
    Ok(ConstantsReport {
        n,
        k: p.k,
        parity_class: p.parity_class,
        a_n: area_a::<H>(n).to_f64(),
        r_n: side_r::<H>(n).to_f64(),
        covol: covolume::<H>(n).to_f64(),
        cusp_constants: b
            .cusps
            .iter()
            .map(|c| CuspReport {
                direction: c.direction,
                representatives: c.reps.iter().map(Real::to_f64).collect(),
                value: c.value.to_f64(),
                closed_form: c.closed.to_f64(),
            })
            .collect(),
        c_geometric: b.c_geometric.to_f64(),
        omega_hat_area: b.omega_area.to_f64(),
        omega_hat_area_closed: omega_area_closed::<H>(n)?.to_f64(),
        c_comb: b.c_comb.to_f64(),
        sigma_n: sigma::<H>(n).to_f64(),
        c_n_pipeline: v.pipeline.to_f64(),
        c_n_closed: v.closed.to_f64(),
        c_n: v.value.to_f64(),
        index_two_special_case: v.index_two_special_case,
        limit_ratio: (v.value / cube).to_f64(),
        dual_route_rel_err: dual,
        notes,
        provenance: Provenance {
            working_digits: H::DIGITS,
            closed_route: "closed formula with odd-N correction factor".into(),
            pipeline_route: "cusp representatives, cusp constants, omega-region area, lift degree 3 or 6".into(),
        },
    })
}

/// Double-precision planar holonomies of the N-gon sides.
pub fn side_holonomies_f64(n: i64, count: i64) -> Vec<PlanarVec> {
    side_holonomies::<f64>(n, count)
}
