//! Counting functions built on the enumerators, the sampling oracle for
//! billiard words, and convention calibration.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::omega_polygon;
use crate::error::{CountError, EnumError};
use crate::geom::{PlanarVec, Vec2};
use crate::polygon::PolygonSpec;
use crate::surface::SurfaceSpec;
use crate::unfold::{
    diagonal_histogram, saddle_connections_within, DiagonalConventions, DiagonalHistogram, EnumConfig, LengthRule,
    SaddleConnection, SurfaceLimits,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKind {
    DiagonalsByBounce,
    ComplexityByWordLength,
    ScByGeometric,
    ScByCombinatorial,
    ScByRegularized,
}

impl CountKind {
    /// Power of the threshold used by the normalized column.
    pub fn exponent(self) -> i32 {
        match self {
            CountKind::ComplexityByWordLength => 3,
            _ => 2,
        }
    }

    /// The geometric count is normalized by `πL²`.
    pub fn normalizer(self, threshold: f64) -> f64 {
        let p = threshold.powi(self.exponent());
        if self == CountKind::ScByGeometric {
            std::f64::consts::PI * p
        } else {
            p
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub threshold: f64,
    pub count: u64,
    /// Absent at threshold 0.
    pub normalized: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    pub subject: String,
    /// SHA-256 of the subject's canonical JSON.
    pub spec_hash: String,
    pub conventions: Option<DiagonalConventions>,
    pub enum_config: EnumConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    pub kind: CountKind,
    pub rows: Vec<CountRow>,
    pub metadata: SeriesMetadata,
}

impl CountSeries {
    fn build(kind: CountKind, points: impl IntoIterator<Item = (f64, u64)>, metadata: SeriesMetadata) -> Self {
        let rows = points
            .into_iter()
            .map(|(threshold, count)| CountRow {
                threshold,
                count,
                normalized: (threshold > 0.0).then(|| count as f64 / kind.normalizer(threshold)),
            })
            .collect();
        CountSeries { kind, rows, metadata }
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].count <= w[1].count)
    }

    /// Every normalized value equals `count / normalizer(threshold)`.
    pub fn normalization_consistent(&self) -> bool {
        self.rows.iter().all(|r| match r.normalized {
            None => r.threshold == 0.0,
            Some(v) => v == r.count as f64 / self.kind.normalizer(r.threshold),
        })
    }

    pub fn last_normalized(&self) -> Option<f64> {
        self.rows.iter().rev().find_map(|r| r.normalized)
    }

    /// Header row and one record per threshold.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["threshold", "count", "normalized"])?;
        for r in &self.rows {
            wr.write_record([
                format!("{}", r.threshold),
                r.count.to_string(),
                r.normalized.map(|v| format!("{v}")).unwrap_or_default(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn sha_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn polygon_hash(p: &PolygonSpec) -> String {
    sha_hex(serde_json::to_string(&p.to_file()).expect("serializable").as_bytes())
}

pub fn surface_hash(s: &SurfaceSpec) -> String {
    sha_hex(serde_json::to_string(&s.to_file()).expect("serializable").as_bytes())
}

/// Bounce depth needed to resolve `N_C(n)` under `c`.
fn bounces_for(n: usize, c: &DiagonalConventions) -> Option<usize> {
    match c.length {
        LengthRule::Bounces => Some(n),
        LengthRule::Tiles => n.checked_sub(1),
    }
}

/// `N_C(n)` for every `n ≤ n_max` from a single enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCounts {
    pub conventions: DiagonalConventions,
    /// `cumulative[n] = N_C(n)`.
    pub cumulative: Vec<u64>,
    pub metadata: SeriesMetadata,
}

impl DiagonalCounts {
    pub fn compute(
        p: &PolygonSpec,
        n_max: usize,
        conventions: &DiagonalConventions,
        cfg: &EnumConfig,
    ) -> Result<Self, CountError> {
        let hist = match bounces_for(n_max, conventions) {
            Some(b) => diagonal_histogram(p, b, cfg)?.0,
            None => DiagonalHistogram {
                sides: p.len() as u64,
                ..Default::default()
            },
        };
        Ok(Self::from_histogram(p, &hist, n_max, conventions, cfg))
    }

    pub fn from_histogram(
        p: &PolygonSpec,
        hist: &DiagonalHistogram,
        n_max: usize,
        conventions: &DiagonalConventions,
        cfg: &EnumConfig,
    ) -> Self {
        let cumulative = (0..=n_max)
            .scan(0u64, |acc, n| {
                *acc += hist.at_length(n, conventions);
                Some(*acc)
            })
            .collect();
        DiagonalCounts {
            conventions: *conventions,
            cumulative,
            metadata: SeriesMetadata {
                subject: p.name().to_string(),
                spec_hash: polygon_hash(p),
                conventions: Some(*conventions),
                enum_config: *cfg,
            },
        }
    }

    pub fn n_max(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn n_c(&self, n: usize) -> u64 {
        self.cumulative[n]
    }

    /// `ρ(t) = Σ_{n<t} N_C(n)`, available for `t ≤ n_max + 1`.
    pub fn rho(&self, t: usize) -> u64 {
        self.cumulative[..t].iter().sum()
    }

    pub fn diagonal_series(&self) -> CountSeries {
        CountSeries::build(
            CountKind::DiagonalsByBounce,
            self.cumulative.iter().enumerate().map(|(n, &c)| (n as f64, c)),
            self.metadata.clone(),
        )
    }

    pub fn complexity_series(&self) -> CountSeries {
        CountSeries::build(
            CountKind::ComplexityByWordLength,
            (1..=self.n_max() + 1).map(|t| (t as f64, self.rho(t))),
            self.metadata.clone(),
        )
    }
}

/// `N_C(P, n)`: generalized diagonals of combinatorial length at most `n`.
pub fn count_diagonals(
    p: &PolygonSpec,
    n: usize,
    conventions: &DiagonalConventions,
    cfg: &EnumConfig,
) -> Result<u64, CountError> {
    Ok(DiagonalCounts::compute(p, n, conventions, cfg)?.n_c(n))
}

/// Complexity `ρ(P, t)` through the summation identity.
pub fn complexity_rho(
    p: &PolygonSpec,
    t: usize,
    conventions: &DiagonalConventions,
    cfg: &EnumConfig,
) -> Result<u64, CountError> {
    if t == 0 {
        return Err(CountError::ZeroLength);
    }
    Ok(DiagonalCounts::compute(p, t - 1, conventions, cfg)?.rho(t))
}

/// Initial condition of a sampled billiard orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sample_index: u64,
    pub side: usize,
    pub position: PlanarVec,
    /// Unit direction pointing into the polygon.
    pub direction: PlanarVec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordSample {
    /// Side indices, starting with the side the orbit leaves from.
    pub word: Vec<u32>,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledWords {
    pub t: usize,
    pub num_samples: u64,
    pub seed: u64,
    /// Samples discarded because the orbit hit a corner.
    pub corner_hits: u64,
    /// One witness per distinct word, sorted by word.
    pub words: Vec<WordSample>,
}

impl SampledWords {
    pub fn count(&self) -> usize {
        self.words.len()
    }
}

const BATCH: u64 = 4096;
const JITTER: f64 = 1e-4;
/// Reciprocal powers of the plastic number.
const R2: (f64, f64) = (0.754_877_666_246_692_8, 0.569_840_290_998_053_3);

/// Maps sample `i` to a boundary point and inward direction. Depends only on
/// `(i, seed)`, so a longer run always extends a shorter one.
fn initial_condition(p: &PolygonSpec, perimeter: f64, i: u64, jitter: (f64, f64)) -> Witness {
    let fi = i as f64;
    let u = (0.5 + R2.0 * fi + jitter.0).rem_euclid(1.0);
    let v = (0.5 + R2.1 * fi + jitter.1).rem_euclid(1.0);
    let mut s = u * perimeter;
    let n = p.len();
    let mut side = 0;
    while side + 1 < n && s >= p.side_vector(side).norm() {
        s -= p.side_vector(side).norm();
        side += 1;
    }
    let (a, b) = p.side(side);
    let d = b - a;
    let len = d.norm();
    let t = (s / len).clamp(1e-12, 1.0 - 1e-12);
    let theta = (v * std::f64::consts::PI).clamp(1e-12, std::f64::consts::PI - 1e-12);
    Witness {
        sample_index: i,
        side,
        position: a + t * d,
        direction: d.scale(&(1.0 / len)).rotate(&theta),
    }
}

/// Side sequence of length `t` from a witness; `None` when the orbit comes
/// within `1e-9` of a corner.
pub fn replay_word(p: &PolygonSpec, w: &Witness, t: usize) -> Option<Vec<u32>> {
    let n = p.len();
    let mut word = Vec::with_capacity(t);
    let (mut x, mut d, mut cur) = (w.position, w.direction, w.side);
    word.push(cur as u32);
    while word.len() < t {
        let mut best: Option<(f64, f64, usize)> = None;
        for j in (0..n).filter(|&j| j != cur) {
            let (a, b) = p.side(j);
            let e = b - a;
            let den = d.cross(&e);
            if den.abs() < 1e-15 {
                continue;
            }
            let ax = a - x;
            let lam = ax.cross(&e) / den;
            let mu = ax.cross(&d) / den;
            if lam > 1e-12 && (-1e-9..=1.0 + 1e-9).contains(&mu) && best.map_or(true, |(l, _, _)| lam < l) {
                best = Some((lam, mu, j));
            }
        }
        let (lam, mu, j) = best?;
        if !(1e-9..=1.0 - 1e-9).contains(&mu) {
            return None;
        }
        let (a, b) = p.side(j);
        let e = b - a;
        let nrm = Vec2::new(-e.y, e.x).scale(&(1.0 / e.norm()));
        x = x + lam * d;
        d = d - (2.0 * d.dot(&nrm)) * nrm;
        cur = j;
        word.push(j as u32);
    }
    Some(word)
}

fn batch_words(p: &PolygonSpec, t: usize, seed: u64, batch: u64, range: std::ops::Range<u64>) -> (HashMap<Vec<u32>, Witness>, u64) {
    let perimeter: f64 = (0..p.len()).map(|i| p.side_vector(i).norm()).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let lo = batch * BATCH;
    let mut out: HashMap<Vec<u32>, Witness> = HashMap::new();
    let mut corners = 0;
    for i in lo..lo + BATCH {
        let jitter = (rng.gen_range(-JITTER..JITTER), rng.gen_range(-JITTER..JITTER));
        if !range.contains(&i) {
            continue;
        }
        let w = initial_condition(p, perimeter, i, jitter);
        match replay_word(p, &w, t) {
            Some(word) => {
                out.entry(word).or_insert(w);
            }
            None => corners += 1,
        }
    }
    (out, corners)
}

/// Distinct length-`t` words seen from samples `[0, num_samples)`; a lower
/// bound on `ρ(P, t)` that is deterministic in `seed`.
pub fn sampled_word_count(
    p: &PolygonSpec,
    t: usize,
    num_samples: u64,
    seed: u64,
) -> Result<SampledWords, CountError> {
    if t == 0 {
        return Err(CountError::ZeroLength);
    }
    if !p.is_convex() {
        return Err(EnumError::NonConvex.into());
    }
    let batches = num_samples.div_ceil(BATCH);
    let parts: Vec<_> = (0..batches)
        .into_par_iter()
        .map(|b| batch_words(p, t, seed, b, 0..num_samples))
        .collect();
    let mut words: BTreeMap<Vec<u32>, Witness> = BTreeMap::new();
    let mut corner_hits = 0;
    for (m, c) in parts {
        corner_hits += c;
        for (word, w) in m {
            words
                .entry(word)
                .and_modify(|old| {
                    if w.sample_index < old.sample_index {
                        *old = w;
                    }
                })
                .or_insert(w);
        }
    }
    Ok(SampledWords {
        t,
        num_samples,
        seed,
        corner_hits,
        words: words
            .into_iter()
            .map(|(word, witness)| WordSample { word, witness })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Saturation {
    pub t: usize,
    pub count: usize,
    pub samples_used: u64,
    /// `(num_samples, count)` at each doubling.
    pub history: Vec<(u64, usize)>,
    pub saturated: bool,
}

/// Doubles the sample count from `initial` until the word count is unchanged
/// over two doublings or `max_samples` is reached.
pub fn saturate(p: &PolygonSpec, t: usize, seed: u64, initial: u64, max_samples: u64) -> Result<Saturation, CountError> {
    let mut n = initial.max(1);
    let mut history = vec![];
    let mut stable = 0;
    loop {
        let c = sampled_word_count(p, t, n, seed)?.count();
        if history.last().is_some_and(|&(_, prev)| prev == c) {
            stable += 1;
        } else {
            stable = 0;
        }
        history.push((n, c));
        if stable >= 2 || n >= max_samples {
            return Ok(Saturation {
                t,
                count: c,
                samples_used: n,
                history,
                saturated: stable >= 2,
            });
        }
        n = (n * 2).min(max_samples);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub seed: u64,
    pub initial_samples: u64,
    pub max_samples: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            seed: 0x5eed,
            initial_samples: 1 << 17,
            max_samples: 1 << 22,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub polygon: String,
    pub conventions: DiagonalConventions,
    pub t: usize,
    pub rho: u64,
    pub sampled: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub t_max: usize,
    /// Every convention matching on all polygons, in [`DiagonalConventions::all`] order.
    pub admissible: Vec<DiagonalConventions>,
    pub table: Vec<CalibrationRow>,
    pub sampling: SamplingConfig,
    pub saturations: Vec<(String, Saturation)>,
}

impl Calibration {
    pub fn chosen(&self) -> DiagonalConventions {
        self.admissible[0]
    }

    pub fn is_unique(&self) -> bool {
        self.admissible.len() == 1
    }
}

/// Renders the mismatch table, one line per `(polygon, convention)`.
pub fn format_table(rows: &[CalibrationRow]) -> String {
    let mut groups: BTreeMap<(String, String), Vec<&CalibrationRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.polygon.clone(), r.conventions.to_string())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((poly, conv), rs)| {
            let cells: Vec<String> = rs
                .iter()
                .map(|r| {
                    let mark = if r.rho == r.sampled { "" } else { "*" };
                    format!("{}/{}{mark}", r.rho, r.sampled)
                })
                .collect();
            format!("{poly:<10} {conv:<34} rho/sampled: {}", cells.join(" "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Finds the conventions under which `ρ(P, t)` equals the saturated sampled
/// word count for every `t ≤ t_max` and every polygon.
pub fn calibrate_conventions(
    polygons: &[PolygonSpec],
    t_max: usize,
    sampling: &SamplingConfig,
    cfg: &EnumConfig,
) -> Result<Calibration, CountError> {
    if polygons.is_empty() {
        return Err(CountError::EmptyList);
    }
    if t_max == 0 {
        return Err(CountError::ZeroLength);
    }
    let mut table = vec![];
    let mut saturations = vec![];
    for p in polygons {
        let (hist, _) = diagonal_histogram(p, t_max, cfg)?;
        let sampled: Vec<Saturation> = (1..=t_max)
            .map(|t| saturate(p, t, sampling.seed, sampling.initial_samples, sampling.max_samples))
            .collect::<Result<_, _>>()?;
        for c in DiagonalConventions::all() {
            let counts = DiagonalCounts::from_histogram(p, &hist, t_max, &c, cfg);
            for (t, s) in (1..=t_max).zip(&sampled) {
                table.push(CalibrationRow {
                    polygon: p.name().to_string(),
                    conventions: c,
                    t,
                    rho: counts.rho(t),
                    sampled: s.count as u64,
                });
            }
        }
        saturations.extend(sampled.into_iter().map(|s| (p.name().to_string(), s)));
    }
    let admissible: Vec<DiagonalConventions> = DiagonalConventions::all()
        .into_iter()
        .filter(|c| table.iter().filter(|r| r.conventions == *c).all(|r| r.rho == r.sampled))
        .collect();
    if admissible.is_empty() {
        return Err(CountError::CalibrationFailed {
            table: format_table(&table),
        });
    }
    Ok(Calibration {
        t_max,
        admissible,
        table,
        sampling: *sampling,
        saturations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthKind {
    Geometric,
    Combinatorial,
    Regularized,
}

impl LengthKind {
    pub fn count_kind(self) -> CountKind {
        match self {
            LengthKind::Geometric => CountKind::ScByGeometric,
            LengthKind::Combinatorial => CountKind::ScByCombinatorial,
            LengthKind::Regularized => CountKind::ScByRegularized,
        }
    }

    pub fn of(self, sc: &SaddleConnection) -> f64 {
        match self {
            LengthKind::Geometric => sc.length_geometric,
            LengthKind::Combinatorial => sc.length_combinatorial as f64,
            LengthKind::Regularized => sc.length_regularized,
        }
    }
}

/// `l_max·2^(-j/4)` for `j = 0..points`, ascending.
pub fn threshold_grid(l_max: f64, points: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..points).map(|j| l_max * 2f64.powf(-(j as f64) / 4.0)).collect();
    g.reverse();
    g
}

/// Every saddle connection (both orientations) whose `kind` length is at
/// most `l_max`.
pub fn saddle_connection_sample(
    s: &SurfaceSpec,
    l_max: f64,
    kind: LengthKind,
    cfg: &EnumConfig,
) -> Result<Vec<SaddleConnection>, CountError> {
    let area = s.area();
    let lim = match kind {
        LengthKind::Geometric => SurfaceLimits {
            max_combinatorial: None,
            max_native_length: Some(l_max * area.sqrt()),
            include_filling_edges: true,
        },
        LengthKind::Combinatorial => SurfaceLimits {
            max_combinatorial: Some(l_max.floor() as u32),
            max_native_length: None,
            include_filling_edges: true,
        },
        LengthKind::Regularized => {
            let zs: Vec<PlanarVec> = s.filling_system().iter().map(|c| c.holonomy).collect();
            let omega = omega_polygon(&zs)?;
            SurfaceLimits {
                max_combinatorial: None,
                max_native_length: Some(l_max * area * omega.circumradius() * (1.0 + 1e-9)),
                include_filling_edges: true,
            }
        }
    };
    let (mut v, _) = saddle_connections_within(s, &lim, cfg)?;
    v.retain(|sc| kind.of(sc) <= l_max);
    Ok(v)
}

/// Unoriented saddle connection counts at each threshold. Each connection is
/// enumerated once from each endpoint, so the oriented count is halved.
pub fn sc_count_series_on(
    s: &SurfaceSpec,
    thresholds: &[f64],
    kind: LengthKind,
    cfg: &EnumConfig,
) -> Result<CountSeries, CountError> {
    let l_max = thresholds.iter().copied().fold(0.0, f64::max);
    if l_max <= 0.0 {
        return Err(CountError::ZeroLength);
    }
    let sample = saddle_connection_sample(s, l_max, kind, cfg)?;
    let mut lengths: Vec<f64> = sample.iter().map(|sc| kind.of(sc)).collect();
    lengths.sort_by(f64::total_cmp);
    let points = thresholds.iter().map(|&l| {
        let oriented = lengths.partition_point(|&x| x <= l) as u64;
        (l, oriented / 2)
    });
    Ok(CountSeries::build(
        kind.count_kind(),
        points,
        SeriesMetadata {
            subject: s.name().to_string(),
            spec_hash: surface_hash(s),
            conventions: None,
            enum_config: *cfg,
        },
    ))
}

/// Series on the default grid of 13 thresholds spanning a factor of 8.
pub fn sc_count_series(
    s: &SurfaceSpec,
    l_max: f64,
    kind: LengthKind,
    cfg: &EnumConfig,
) -> Result<CountSeries, CountError> {
    sc_count_series_on(s, &threshold_grid(l_max, 13), kind, cfg)
}

/// Fraction of connections with `ℓ_G ≤ L` for which `|ℓ_C - ℓ_R| > ε ℓ_G`.
pub fn epsilon_regular_fractions(sample: &[SaddleConnection], thresholds: &[f64], eps: f64) -> Vec<(f64, f64)> {
    thresholds
        .iter()
        .map(|&l| {
            let within: Vec<&SaddleConnection> = sample.iter().filter(|s| s.length_geometric <= l).collect();
            let bad = within
                .iter()
                .filter(|s| (s.length_combinatorial as f64 - s.length_regularized).abs() > eps * s.length_geometric)
                .count();
            let frac = if within.is_empty() {
                0.0
            } else {
                bad as f64 / within.len() as f64
            };
            (l, frac)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::unit_square;

    #[test]
    fn replay_straight_across() {
        let p = unit_square();
        let w = Witness {
            sample_index: 0,
            side: 0,
            position: Vec2::new(0.3, 0.0),
            direction: Vec2::new(0.0, 1.0),
        };
        assert_eq!(replay_word(&p, &w, 4), Some(vec![0, 2, 0, 2]));
    }

    #[test]
    fn grid_ratio() {
        let g = threshold_grid(16.0, 5);
        assert_eq!(g.last(), Some(&16.0));
        assert!((g[0] - 8.0).abs() < 1e-12);
    }
}
