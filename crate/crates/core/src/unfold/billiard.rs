//! Generalized diagonals of a convex rational polygon.

use serde::{Deserialize, Serialize};

use super::engine::{run, Develop, EnumStats, Hit, Limits, Start, Visitor};
use super::EnumConfig;
use crate::error::EnumError;
use crate::geom::{Isometry, PlanarVec, Vec2};
use crate::polygon::PolygonSpec;
use crate::real::{at_width, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Oriented,
    Unoriented,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Each side counted once as a diagonal of combinatorial length 0.
    Include,
    Exclude,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthRule {
    /// Combinatorial length is the number of bounces.
    Bounces,
    /// Combinatorial length is the number of copies traversed, bounces + 1.
    Tiles,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagonalConventions {
    pub orientation: Orientation,
    pub boundary: Boundary,
    pub length: LengthRule,
}

impl DiagonalConventions {
    /// The convention that reproduces sampled word counts exactly.
    pub const CALIBRATED: DiagonalConventions = DiagonalConventions {
        orientation: Orientation::Oriented,
        boundary: Boundary::Include,
        length: LengthRule::Tiles,
    };

    pub fn all() -> Vec<DiagonalConventions> {
        let mut v = vec![];
        for orientation in [Orientation::Oriented, Orientation::Unoriented] {
            for boundary in [Boundary::Include, Boundary::Exclude] {
                for length in [LengthRule::Bounces, LengthRule::Tiles] {
                    v.push(DiagonalConventions {
                        orientation,
                        boundary,
                        length,
                    });
                }
            }
        }
        v
    }

    /// Combinatorial length of an interior diagonal with `bounces` bounces.
    pub fn interior_length(&self, bounces: usize) -> usize {
        match self.length {
            LengthRule::Bounces => bounces,
            LengthRule::Tiles => bounces + 1,
        }
    }
}

impl std::fmt::Display for DiagonalConventions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let o = match self.orientation {
            Orientation::Oriented => "oriented",
            Orientation::Unoriented => "unoriented",
        };
        let b = match self.boundary {
            Boundary::Include => "include-boundary",
            Boundary::Exclude => "exclude-boundary",
        };
        let l = match self.length {
            LengthRule::Bounces => "bounces",
            LengthRule::Tiles => "tiles",
        };
        write!(f, "{o}+{b}+{l}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedDiagonal {
    pub start_corner: usize,
    pub end_corner: usize,
    /// Placement of the copy holding the end corner.
    pub end_copy: Isometry<f64>,
    /// Side indices hit, in order.
    pub bounce_word: Vec<u32>,
    pub bounce_count: usize,
    pub holonomy: PlanarVec,
    pub geometric_length: f64,
    /// A side of the polygon rather than an interior trajectory.
    pub boundary: bool,
}

impl GeneralizedDiagonal {
    fn sort_key(&self) -> (usize, &[u32], usize, usize) {
        (self.bounce_count, &self.bounce_word, self.start_corner, self.end_corner)
    }

    /// `(start, word, end)` is no larger than the reversed traversal.
    pub fn is_canonical(&self) -> bool {
        canonical(self.start_corner, &self.bounce_word, self.end_corner)
    }

    pub fn labels<'a>(&self, p: &'a PolygonSpec) -> Vec<&'a str> {
        self.bounce_word
            .iter()
            .map(|&i| p.side_labels()[i as usize].as_str())
            .collect()
    }
}

fn canonical(start: usize, word: &[u32], end: usize) -> bool {
    match start.cmp(&end) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => word.iter().le(word.iter().rev()),
    }
}

pub(crate) struct Reflector<'a, E> {
    poly: &'a PolygonSpec,
    mirrors: Vec<Isometry<f64>>,
    hp_verts: Vec<Vec2<E>>,
    hp_mirrors: Vec<Isometry<E>>,
    exact: bool,
}

impl<'a, E: Real> Reflector<'a, E> {
    pub(crate) fn new(poly: &'a PolygonSpec) -> Self {
        let n = poly.len();
        let mirrors = (0..n)
            .map(|i| {
                let (a, b) = poly.side(i);
                Isometry::reflection(&a, &b)
            })
            .collect();
        let hp_verts: Vec<Vec2<E>> = poly.vertices_at();
        let hp_mirrors = (0..n)
            .map(|i| Isometry::reflection(&hp_verts[i], &hp_verts[(i + 1) % n]))
            .collect();
        Reflector {
            poly,
            mirrors,
            hp_verts,
            hp_mirrors,
            exact: poly.is_integral_rectilinear(),
        }
    }
}

impl<E: Real> Develop<E> for Reflector<'_, E> {
    type Frame = Isometry<f64>;
    type Hp = Isometry<E>;

    fn place(&self, f: &Self::Frame, out: &mut Vec<PlanarVec>) {
        out.extend(self.poly.vertices().iter().map(|v| f.apply(v)));
    }
    fn step(&self, f: &Self::Frame, edge: usize) -> (Self::Frame, usize) {
        (f.compose(&self.mirrors[edge]), edge)
    }
    fn label(&self, _: &Self::Frame, edge: usize) -> u32 {
        edge as u32
    }
    fn hp_root(&self, _: &Self::Frame) -> Self::Hp {
        Isometry::identity()
    }
    fn hp_step(&self, h: &Self::Hp, _: &Self::Frame, edge: usize) -> Self::Hp {
        h.compose(&self.hp_mirrors[edge])
    }
    fn hp_vertex(&self, h: &Self::Hp, _: &Self::Frame, v: usize) -> Vec2<E> {
        h.apply(&self.hp_verts[v])
    }
    fn exact(&self) -> bool {
        self.exact
    }
}

fn starts(p: &PolygonSpec) -> Vec<Start<Isometry<f64>>> {
    (0..p.len())
        .map(|i| Start {
            frame: Isometry::identity(),
            vertex: i,
            id: i,
        })
        .collect()
}

fn limits(max_bounces: usize, cfg: &EnumConfig) -> Limits {
    Limits {
        max_depth: max_bounces,
        max_dist: None,
        node_budget: cfg.node_budget,
        epsilon: cfg.precision.epsilon_incidence,
    }
}

#[derive(Default)]
struct Collect(Vec<GeneralizedDiagonal>);

impl Visitor<Isometry<f64>> for Collect {
    fn hit(&mut self, h: &Hit<'_, Isometry<f64>>) {
        self.0.push(GeneralizedDiagonal {
            start_corner: h.start,
            end_corner: h.end_vertex,
            end_copy: h.end_frame.clone(),
            bounce_word: h.path.to_vec(),
            bounce_count: h.depth,
            holonomy: h.holonomy,
            geometric_length: h.holonomy.norm(),
            boundary: false,
        });
    }
    fn merge(&mut self, o: Self) {
        self.0.extend(o.0);
    }
}

/// Interior diagonal counts by bounce number.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalHistogram {
    pub sides: u64,
    /// `oriented[b]`: interior diagonals with exactly `b` bounces.
    pub oriented: Vec<u64>,
    /// Same, one per unordered pair of traversal directions.
    pub unoriented: Vec<u64>,
}

impl DiagonalHistogram {
    /// Number of diagonals of combinatorial length `n` exactly.
    pub fn at_length(&self, n: usize, c: &DiagonalConventions) -> u64 {
        let interior = match c.orientation {
            Orientation::Oriented => &self.oriented,
            Orientation::Unoriented => &self.unoriented,
        };
        let boundary = if c.boundary == Boundary::Include && n == 0 {
            self.sides
        } else {
            0
        };
        let b = match c.length {
            LengthRule::Bounces => Some(n),
            LengthRule::Tiles => n.checked_sub(1),
        };
        boundary + b.and_then(|b| interior.get(b)).copied().unwrap_or(0)
    }

    /// `N_C(n)`: diagonals of combinatorial length at most `n`.
    pub fn cumulative(&self, n: usize, c: &DiagonalConventions) -> u64 {
        (0..=n).map(|i| self.at_length(i, c)).sum()
    }

    /// Largest `n` for which `cumulative(n, c)` is fully resolved.
    pub fn max_length(&self, c: &DiagonalConventions) -> usize {
        let depth = self.oriented.len().saturating_sub(1);
        match c.length {
            LengthRule::Bounces => depth,
            LengthRule::Tiles => depth + 1,
        }
    }
}

struct Histo {
    oriented: Vec<u64>,
    unoriented: Vec<u64>,
}

impl Visitor<Isometry<f64>> for Histo {
    fn hit(&mut self, h: &Hit<'_, Isometry<f64>>) {
        self.oriented[h.depth] += 1;
        if canonical(h.start, h.path, h.end_vertex) {
            self.unoriented[h.depth] += 1;
        }
    }
    fn merge(&mut self, o: Self) {
        for (a, b) in self.oriented.iter_mut().zip(o.oriented) {
            *a += b;
        }
        for (a, b) in self.unoriented.iter_mut().zip(o.unoriented) {
            *a += b;
        }
    }
}

fn check(p: &PolygonSpec) -> Result<(), EnumError> {
    if !p.is_convex() {
        return Err(EnumError::NonConvex);
    }
    Ok(())
}

fn finish<T>(out: T, stats: EnumStats, cfg: &EnumConfig, partial: usize) -> Result<(T, EnumStats), EnumError> {
    if stats.truncated {
        return Err(EnumError::ExplosionGuard {
            budget: cfg.node_budget,
            partial,
        });
    }
    Ok((out, stats))
}

pub(crate) fn in_pool<T: Send>(cfg: &EnumConfig, f: impl FnOnce() -> T + Send) -> Result<T, EnumError> {
    match cfg.threads {
        None => Ok(f()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| EnumError::ThreadPool(e.to_string())),
    }
}

/// Every generalized diagonal with at most `max_bounces` bounces, sorted by
/// `(bounce_count, bounce_word, start_corner, end_corner)`.
pub fn enumerate_diagonals(
    p: &PolygonSpec,
    max_bounces: usize,
    conventions: &DiagonalConventions,
    cfg: &EnumConfig,
) -> Result<(Vec<GeneralizedDiagonal>, EnumStats), EnumError> {
    check(p)?;
    let (Collect(mut items), stats) = in_pool(cfg, || {
        at_width!(cfg.precision.width(), H => {
            let dev = Reflector::<H>::new(p);
            run(&dev, &starts(p), limits(max_bounces, cfg), Collect::default)
        })
    })?;
    let (mut items, stats) = finish(std::mem::take(&mut items), stats, cfg, items.len())?;
    if conventions.orientation == Orientation::Unoriented {
        items.retain(GeneralizedDiagonal::is_canonical);
    }
    if conventions.boundary == Boundary::Include {
        items.extend((0..p.len()).map(|i| {
            let z = p.side_vector(i);
            GeneralizedDiagonal {
                start_corner: i,
                end_corner: (i + 1) % p.len(),
                end_copy: Isometry::identity(),
                bounce_word: vec![],
                bounce_count: 0,
                holonomy: z,
                geometric_length: z.norm(),
                boundary: true,
            }
        }));
    }
    items.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok((items, stats))
}

/// Interior diagonal counts for every bounce number up to `max_bounces`
/// without materializing the diagonals.
pub fn diagonal_histogram(
    p: &PolygonSpec,
    max_bounces: usize,
    cfg: &EnumConfig,
) -> Result<(DiagonalHistogram, EnumStats), EnumError> {
    check(p)?;
    let (h, stats) = in_pool(cfg, || {
        at_width!(cfg.precision.width(), H => {
            let dev = Reflector::<H>::new(p);
            run(&dev, &starts(p), limits(max_bounces, cfg), || Histo {
                oriented: vec![0; max_bounces + 1],
                unoriented: vec![0; max_bounces + 1],
            })
        })
    })?;
    let total = h.oriented.iter().sum::<u64>() as usize;
    let (h, stats) = finish(h, stats, cfg, total)?;
    Ok((
        DiagonalHistogram {
            sides: p.len() as u64,
            oriented: h.oriented,
            unoriented: h.unoriented,
        },
        stats,
    ))
}
