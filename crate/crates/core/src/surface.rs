//! Translation surfaces presented as one or two polygons with edge gluings.

use serde::{Deserialize, Serialize};

use crate::error::PolygonError;
use crate::expr::Expr;
use crate::geom::{wedge, PlanarVec, Vec2};
use crate::polygon::{regular_ngon, Frac, NGonParams, PolygonFile, PolygonSpec};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub copy: usize,
    pub edge: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub a: EdgeRef,
    pub b: EdgeRef,
}

/// One class of the filling system: the edge pair of a gluing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillingClass {
    pub gluing: usize,
    /// Holonomy of the `a` side, native scaling.
    pub holonomy: PlanarVec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    /// `(copy, vertex)` corners identified to this point.
    pub members: Vec<(usize, usize)>,
    /// Total cone angle in radians.
    pub cone_angle: f64,
}

impl SingularPoint {
    /// A cone angle of exactly 2π: a marked regular point.
    pub fn is_marked(&self) -> bool {
        (self.cone_angle - 2.0 * std::f64::consts::PI).abs() < 1e-9
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    name: String,
    copies: Vec<PolygonSpec>,
    gluings: Vec<Gluing>,
    class_of: Vec<Vec<usize>>,
    partner: Vec<Vec<EdgeRef>>,
    filling_system: Vec<FillingClass>,
    singular_points: Vec<SingularPoint>,
    area: f64,
    /// Genus-one presentations (N = 3, 4) whose constants need special care.
    pub genus_one_caveat: bool,
}

impl SurfaceSpec {
    /// Validates that every edge is glued exactly once to a parallel,
    /// equal-length, opposite edge.
    pub fn new(name: impl Into<String>, copies: Vec<PolygonSpec>, gluings: Vec<Gluing>) -> Result<Self, PolygonError> {
        let err = |s: String| PolygonError::Gluing(s);
        let mut class_of: Vec<Vec<Option<usize>>> = copies.iter().map(|c| vec![None; c.len()]).collect();
        let mut partner: Vec<Vec<Option<EdgeRef>>> = copies.iter().map(|c| vec![None; c.len()]).collect();
        for (gi, g) in gluings.iter().enumerate() {
            for e in [g.a, g.b] {
                let slot = class_of
                    .get_mut(e.copy)
                    .and_then(|c| c.get_mut(e.edge))
                    .ok_or_else(|| err(format!("edge {e:?} does not exist")))?;
                if slot.replace(gi).is_some() {
                    return Err(err(format!("edge {e:?} glued twice")));
                }
            }
            let za = copies[g.a.copy].side_vector(g.a.edge);
            let zb = copies[g.b.copy].side_vector(g.b.edge);
            let scale = za.norm().max(zb.norm());
            if (za + zb).norm() > 1e-9 * scale {
                return Err(err(format!("edges {:?} and {:?} are not opposite translates", g.a, g.b)));
            }
            partner[g.a.copy][g.a.edge] = Some(g.b);
            partner[g.b.copy][g.b.edge] = Some(g.a);
        }
        let class_of: Vec<Vec<usize>> = class_of
            .into_iter()
            .enumerate()
            .map(|(c, v)| {
                v.into_iter()
                    .enumerate()
                    .map(|(e, x)| x.ok_or_else(|| err(format!("edge ({c}, {e}) is not glued"))))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        let partner = partner
            .into_iter()
            .map(|v| v.into_iter().map(|x| x.expect("all edges glued")).collect())
            .collect();
        let filling_system = gluings
            .iter()
            .enumerate()
            .map(|(gi, g)| FillingClass {
                gluing: gi,
                holonomy: copies[g.a.copy].side_vector(g.a.edge),
            })
            .collect();
        let area = copies.iter().map(PolygonSpec::area).sum();
        let mut s = SurfaceSpec {
            name: name.into(),
            copies,
            gluings,
            class_of,
            partner,
            filling_system,
            singular_points: vec![],
            area,
            genus_one_caveat: false,
        };
        s.singular_points = s.chase_corners();
        Ok(s)
    }

    fn chase_corners(&self) -> Vec<SingularPoint> {
        let offsets: Vec<usize> = self
            .copies
            .iter()
            .scan(0, |acc, c| {
                let o = *acc;
                *acc += c.len();
                Some(o)
            })
            .collect();
        let total: usize = self.copies.iter().map(PolygonSpec::len).sum();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let id = |c: usize, v: usize| offsets[c] + v % self.copies[c].len();
        for g in &self.gluings {
            let (a, b) = (g.a, g.b);
            for (x, y) in [(id(a.copy, a.edge), id(b.copy, b.edge + 1)), (id(a.copy, a.edge + 1), id(b.copy, b.edge))] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
        let mut groups: Vec<(usize, SingularPoint)> = vec![];
        for (c, poly) in self.copies.iter().enumerate() {
            for v in 0..poly.len() {
                let r = find(&mut parent, id(c, v));
                let angle = poly.interior_angle(v);
                match groups.iter_mut().find(|(root, _)| *root == r) {
                    Some((_, sp)) => {
                        sp.members.push((c, v));
                        sp.cone_angle += angle;
                    }
                    None => groups.push((
                        r,
                        SingularPoint {
                            members: vec![(c, v)],
                            cone_angle: angle,
                        },
                    )),
                }
            }
        }
        groups.into_iter().map(|(_, sp)| sp).collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn copies(&self) -> &[PolygonSpec] {
        &self.copies
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn filling_system(&self) -> &[FillingClass] {
        &self.filling_system
    }

    pub fn singular_points(&self) -> &[SingularPoint] {
        &self.singular_points
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn class_of(&self, e: EdgeRef) -> usize {
        self.class_of[e.copy][e.edge]
    }

    pub fn partner(&self, e: EdgeRef) -> EdgeRef {
        self.partner[e.copy][e.edge]
    }

    /// Offset that places the partner copy flush against edge `e` when
    /// `e`'s copy sits at the origin.
    pub fn shift_across(&self, e: EdgeRef) -> PlanarVec {
        let f = self.partner(e);
        self.copies[e.copy].vertex(e.edge) - self.copies[f.copy].vertex(f.edge + 1)
    }

    pub fn shift_across_at<R: Real>(&self, e: EdgeRef, verts: &[Vec<Vec2<R>>]) -> Vec2<R> {
        let f = self.partner(e);
        let nf = verts[f.copy].len();
        verts[e.copy][e.edge].clone() - verts[f.copy][(f.edge + 1) % nf].clone()
    }

    /// Translation gluings that differ by a pure translation; always true
    /// once constructed but exposed for property tests.
    pub fn gluings_are_translations(&self) -> bool {
        self.gluings.iter().all(|g| {
            let za = self.copies[g.a.copy].side_vector(g.a.edge);
            let zb = self.copies[g.b.copy].side_vector(g.b.edge);
            (za + zb).norm() <= 1e-9 * za.norm()
        })
    }

    /// Every edge lies in the filling system, so cutting along it leaves
    /// exactly the polygon copies.
    pub fn filling_property(&self) -> bool {
        let covered: usize = self.class_of.iter().map(Vec::len).sum();
        covered == 2 * self.gluings.len() && self.filling_system.len() == self.gluings.len()
    }

    /// `z_i/z_j ∉ ℝ` for all distinct classes.
    pub fn filling_pairwise_nonparallel(&self) -> bool {
        let zs: Vec<PlanarVec> = self.filling_system.iter().map(|c| c.holonomy).collect();
        zs.iter().enumerate().all(|(i, a)| {
            zs[i + 1..]
                .iter()
                .all(|b| wedge(a, b).abs() > 1e-9 * a.norm() * b.norm())
        })
    }

    pub fn edge_count(&self) -> usize {
        self.copies.iter().map(PolygonSpec::len).sum()
    }
}

/// Opposite sides of `P_N` glued for even N; for odd N the polygon together
/// with its mirror image across the vertical side from `e_N(k)` to `e_N(k+1)`.
///
/// N = 3, 4 give flat tori; they are built with `genus_one_caveat` set.
pub fn ngon_surface(n: i64) -> Result<SurfaceSpec, PolygonError> {
    let params = NGonParams::new(n)?;
    let base = regular_ngon(n)?;
    let nu = n as usize;
    let mut s = if params.is_even() {
        let half = nu / 2;
        let gluings = (0..half)
            .map(|j| Gluing {
                a: EdgeRef { copy: 0, edge: j },
                b: EdgeRef { copy: 0, edge: j + half },
            })
            .collect();
        SurfaceSpec::new(format!("S_{n}"), vec![base], gluings)?
    } else {
        let k = params.k as i64;
        // Mirror in the vertical side equals the half-turn about its midpoint
        // because P_N is symmetric about the real axis.
        let exprs = (0..n)
            .map(|j| {
                [
                    Expr::parse(&format!(
                        "cos({}*pi/{n}) + cos({}*pi/{n}) - cos({}*pi/{n})",
                        2 * k,
                        2 * (k + 1),
                        2 * j
                    ))
                    .expect("well-formed"),
                    Expr::parse(&format!("-sin({}*pi/{n})", 2 * j)).expect("well-formed"),
                ]
            })
            .collect();
        let mirror = PolygonSpec::new(
            format!("ngon:{n}:mirror"),
            exprs,
            vec![Some(Frac::new(n - 2, n)); nu],
            vec![],
        )?;
        let gluings = (0..nu)
            .map(|j| Gluing {
                a: EdgeRef { copy: 0, edge: j },
                b: EdgeRef { copy: 1, edge: j },
            })
            .collect();
        SurfaceSpec::new(format!("S_{n}"), vec![base, mirror], gluings)?
    };
    s.genus_one_caveat = n <= 4;
    Ok(s)
}

/// A copy of `s` with every coordinate multiplied by `factor`.
pub fn rescaled(s: &SurfaceSpec, factor: f64) -> Result<SurfaceSpec, PolygonError> {
    let f = format!("{factor:e}");
    let copies = s
        .copies
        .iter()
        .map(|c| {
            let exprs = c
                .vertex_exprs()
                .iter()
                .map(|[x, y]| {
                    Ok([
                        Expr::parse(&format!("{f}*({x})"))?,
                        Expr::parse(&format!("{f}*({y})"))?,
                    ])
                })
                .collect::<Result<Vec<_>, PolygonError>>()?;
            PolygonSpec::new(
                format!("{}*{f}", c.name()),
                exprs,
                c.angle_fractions().to_vec(),
                c.side_labels().to_vec(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = SurfaceSpec::new(format!("{}*{f}", s.name), copies, s.gluings.clone())?;
    out.genus_one_caveat = s.genus_one_caveat;
    Ok(out)
}

pub const SURFACE_SCHEMA: &str = "translation-surface/1";

/// On-disk form of a surface: polygon copies plus gluing pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub schema: String,
    pub name: String,
    pub copies: Vec<PolygonFile>,
    pub gluings: Vec<Gluing>,
}

impl SurfaceSpec {
    pub fn to_file(&self) -> SurfaceFile {
        SurfaceFile {
            schema: SURFACE_SCHEMA.into(),
            name: self.name.clone(),
            copies: self.copies.iter().map(PolygonSpec::to_file).collect(),
            gluings: self.gluings.clone(),
        }
    }

    pub fn from_file(f: SurfaceFile) -> Result<Self, PolygonError> {
        if f.schema != SURFACE_SCHEMA {
            return Err(PolygonError::Schema(format!(
                "expected schema `{SURFACE_SCHEMA}`, found `{}`",
                f.schema
            )));
        }
        let copies = f
            .copies
            .into_iter()
            .map(PolygonSpec::from_file)
            .collect::<Result<Vec<_>, _>>()?;
        SurfaceSpec::new(f.name, copies, f.gluings)
    }

    pub fn from_json(s: &str) -> Result<Self, PolygonError> {
        let f: SurfaceFile = serde_json::from_str(s).map_err(|e| PolygonError::Schema(e.to_string()))?;
        Self::from_file(f)
    }
}

/// `ngon:N` names the surface `S_N`.
pub fn surface_alias(name: &str) -> Result<SurfaceSpec, PolygonError> {
    let n = name
        .strip_prefix("ngon:")
        .and_then(|n| n.parse::<i64>().ok())
        .ok_or_else(|| PolygonError::Schema(format!("unknown surface `{name}`")))?;
    ngon_surface(n)
}
