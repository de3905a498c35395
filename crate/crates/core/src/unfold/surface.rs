//! Saddle connections on a translation surface presented by polygons.

use serde::{Deserialize, Serialize};

use super::billiard::in_pool;
use super::engine::{run, Develop, EnumStats, Hit, Limits, Start, Visitor};
use super::lengths::three_lengths;
use super::EnumConfig;
use crate::error::EnumError;
use crate::geom::{PlanarVec, Vec2};
use crate::real::{at_width, Real};
use crate::surface::{EdgeRef, SurfaceSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleConnection {
    /// `(copy, vertex)` of the outgoing corner.
    pub start: (usize, usize),
    pub end: (usize, usize),
    /// Singular point indices of the two endpoints.
    pub start_point: usize,
    pub end_point: usize,
    /// Native scaling.
    pub holonomy: PlanarVec,
    pub crossings_per_class: Vec<u32>,
    pub length_geometric: f64,
    pub length_combinatorial: u32,
    pub length_regularized: f64,
    /// Set when the connection is itself an edge of the filling system.
    pub filling_class: Option<usize>,
}

/// At least one bound must be set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLimits {
    pub max_combinatorial: Option<u32>,
    /// Native-scale holonomy length bound.
    pub max_native_length: Option<f64>,
    /// Report the filling-system edges themselves (combinatorial length 0).
    pub include_filling_edges: bool,
}

struct Translator<'a, E> {
    s: &'a SurfaceSpec,
    hp_verts: Vec<Vec<Vec2<E>>>,
    edge_base: Vec<usize>,
}

impl<'a, E: Real> Translator<'a, E> {
    fn new(s: &'a SurfaceSpec) -> Self {
        let edge_base = s
            .copies()
            .iter()
            .scan(0, |acc, c| {
                let o = *acc;
                *acc += c.len();
                Some(o)
            })
            .collect();
        Translator {
            s,
            hp_verts: s.copies().iter().map(|c| c.vertices_at()).collect(),
            edge_base,
        }
    }
}

#[derive(Clone, Debug)]
struct Placed {
    copy: usize,
    offset: PlanarVec,
}

impl<E: Real> Develop<E> for Translator<'_, E> {
    type Frame = Placed;
    type Hp = Vec2<E>;

    fn place(&self, f: &Placed, out: &mut Vec<PlanarVec>) {
        out.extend(self.s.copies()[f.copy].vertices().iter().map(|v| *v + f.offset));
    }
    fn step(&self, f: &Placed, edge: usize) -> (Placed, usize) {
        let e = EdgeRef { copy: f.copy, edge };
        let g = self.s.partner(e);
        (
            Placed {
                copy: g.copy,
                offset: f.offset + self.s.shift_across(e),
            },
            g.edge,
        )
    }
    fn label(&self, f: &Placed, edge: usize) -> u32 {
        (self.edge_base[f.copy] + edge) as u32
    }
    fn hp_root(&self, _: &Placed) -> Vec2<E> {
        Vec2::zero()
    }
    fn hp_step(&self, h: &Vec2<E>, f: &Placed, edge: usize) -> Vec2<E> {
        h.clone() + self.s.shift_across_at(EdgeRef { copy: f.copy, edge }, &self.hp_verts)
    }
    fn hp_vertex(&self, h: &Vec2<E>, f: &Placed, v: usize) -> Vec2<E> {
        self.hp_verts[f.copy][v].clone() + h.clone()
    }
    fn exact(&self) -> bool {
        false
    }
}

struct Gather<'a> {
    s: &'a SurfaceSpec,
    class_of_edge: &'a [usize],
    point_of: &'a [Vec<usize>],
    start_of: &'a [(usize, usize)],
    max_native: f64,
    out: Vec<SaddleConnection>,
}

impl Visitor<Placed> for Gather<'_> {
    fn hit(&mut self, h: &Hit<'_, Placed>) {
        if h.holonomy.norm() > self.max_native {
            return;
        }
        let mut crossings = vec![0u32; self.s.filling_system().len()];
        for &e in h.path {
            crossings[self.class_of_edge[e as usize]] += 1;
        }
        let start = self.start_of[h.start];
        let end = (h.end_frame.copy, h.end_vertex);
        let l = three_lengths(&h.holonomy, &crossings, self.s);
        self.out.push(SaddleConnection {
            start,
            end,
            start_point: self.point_of[start.0][start.1],
            end_point: self.point_of[end.0][end.1],
            holonomy: h.holonomy,
            crossings_per_class: crossings,
            length_geometric: l.geometric,
            length_combinatorial: l.combinatorial,
            length_regularized: l.regularized,
            filling_class: None,
        });
    }
    fn merge(&mut self, o: Self) {
        self.out.extend(o.out);
    }
}

/// Saddle connections within the given bounds, ordered by geometric length
/// and then by start corner and holonomy.
pub fn saddle_connections_within(
    s: &SurfaceSpec,
    lim: &SurfaceLimits,
    cfg: &EnumConfig,
) -> Result<(Vec<SaddleConnection>, EnumStats), EnumError> {
    if s.copies().iter().any(|c| !c.is_convex()) {
        return Err(EnumError::NonConvex);
    }
    let max_native = lim.max_native_length.unwrap_or(f64::INFINITY);
    let class_of_edge: Vec<usize> = s
        .copies()
        .iter()
        .enumerate()
        .flat_map(|(c, p)| (0..p.len()).map(move |e| s.class_of(EdgeRef { copy: c, edge: e })))
        .collect();
    let mut point_of: Vec<Vec<usize>> = s.copies().iter().map(|c| vec![0; c.len()]).collect();
    for (i, sp) in s.singular_points().iter().enumerate() {
        for &(c, v) in &sp.members {
            point_of[c][v] = i;
        }
    }
    let start_of: Vec<(usize, usize)> = s
        .copies()
        .iter()
        .enumerate()
        .flat_map(|(c, p)| (0..p.len()).map(move |v| (c, v)))
        .collect();
    let starts: Vec<Start<Placed>> = start_of
        .iter()
        .enumerate()
        .map(|(id, &(copy, vertex))| Start {
            frame: Placed {
                copy,
                offset: Vec2::new(0.0, 0.0),
            },
            vertex,
            id,
        })
        .collect();
    let limits = Limits {
        max_depth: lim.max_combinatorial.map_or(usize::MAX, |m| m as usize),
        max_dist: lim.max_native_length,
        node_budget: cfg.node_budget,
        epsilon: cfg.precision.epsilon_incidence,
    };
    let make = || Gather {
        s,
        class_of_edge: &class_of_edge,
        point_of: &point_of,
        start_of: &start_of,
        max_native,
        out: vec![],
    };
    let (g, stats) = in_pool(cfg, || {
        at_width!(cfg.precision.width(), H => {
            let dev = Translator::<H>::new(s);
            run(&dev, &starts, limits, make)
        })
    })?;
    if stats.truncated {
        return Err(EnumError::ExplosionGuard {
            budget: cfg.node_budget,
            partial: g.out.len(),
        });
    }
    let mut out = g.out;
    if lim.include_filling_edges {
        for (j, class) in s.filling_system().iter().enumerate() {
            let a = s.gluings()[class.gluing].a;
            let n = s.copies()[a.copy].len();
            let z = class.holonomy;
            if z.norm() > max_native {
                continue;
            }
            for (from, to, hol) in [(a.edge, (a.edge + 1) % n, z), ((a.edge + 1) % n, a.edge, -z)] {
                let l = three_lengths(&hol, &vec![0; s.filling_system().len()], s);
                out.push(SaddleConnection {
                    start: (a.copy, from),
                    end: (a.copy, to),
                    start_point: point_of[a.copy][from],
                    end_point: point_of[a.copy][to],
                    holonomy: hol,
                    crossings_per_class: vec![0; s.filling_system().len()],
                    length_geometric: l.geometric,
                    length_combinatorial: 0,
                    length_regularized: l.regularized,
                    filling_class: Some(j),
                });
            }
        }
    }
    out.sort_by(|a, b| {
        a.length_geometric
            .total_cmp(&b.length_geometric)
            .then(a.start.cmp(&b.start))
            .then(a.holonomy.x.total_cmp(&b.holonomy.x))
            .then(a.holonomy.y.total_cmp(&b.holonomy.y))
    });
    Ok((out, stats))
}

/// Every saddle connection with area-normalized length at most
/// `max_geometric_length`, filling-system edges included.
pub fn enumerate_saddle_connections(
    s: &SurfaceSpec,
    max_geometric_length: f64,
    cfg: &EnumConfig,
) -> Result<(Vec<SaddleConnection>, EnumStats), EnumError> {
    let lim = SurfaceLimits {
        max_combinatorial: None,
        max_native_length: Some(max_geometric_length * s.area().sqrt()),
        include_filling_edges: true,
    };
    saddle_connections_within(s, &lim, cfg)
}
