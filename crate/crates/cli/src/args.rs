use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use billiard_core::count::LengthKind;
use billiard_core::unfold::{Boundary, DiagonalConventions, LengthRule, Orientation};

#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "billiards", version, about = "Complexity constants and saddle connection counts for polygonal billiards")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Global {
    /// Decimal digits for escalated predicates and constants (16..=76).
    #[arg(long, global = true, env = "NGON_DIGITS", default_value_t = 50)]
    pub digits: u32,
    /// Relative incidence tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub epsilon: f64,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Enumeration node budget.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub node_budget: u64,
    /// Emit JSON (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV with a `#`-prefixed config header line.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Global {
    pub fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else {
            Format::Json
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum Command {
    /// Complexity constants of regular N-gons by closed form and by cusp pipeline.
    Constants(ConstantsArgs),
    /// Trigonometric identities behind the closed forms.
    Identities(IdentitiesArgs),
    /// Generalized diagonals of a polygon.
    Diagonals(DiagonalsArgs),
    /// Billiard word complexity.
    Complexity(ComplexityArgs),
    /// Saddle connection counting series on a surface.
    Converge(ConvergeArgs),
    /// Saddle connections of a surface up to a length bound.
    Saddles(SaddlesArgs),
    /// The region bounded by the filling-system wedge sum.
    Omega(OmegaArgs),
    /// Billiard words observed by sampling orbits.
    Words(WordsArgs),
    /// Diagonal conventions matching the sampled word counts.
    Calibrate(CalibrateArgs),
    /// Re-run the command recorded in an output file and compare data.
    Rerun(RerunArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsArgs {
    #[arg(long, conflicts_with = "n_range", required_unless_present = "n_range")]
    pub n: Option<i64>,
    /// Inclusive range `A..B`.
    #[arg(long, value_parser = parse_range)]
    pub n_range: Option<(i64, i64)>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct IdentitiesArgs {
    #[arg(long, default_value_t = 500)]
    pub m_max: i64,
    #[arg(long, default_value_t = 200)]
    pub k_max: i64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PolygonSource {
    /// `square`, `triangle` or `ngon:N`.
    #[arg(long, conflicts_with = "polygon_file")]
    pub polygon: Option<String>,
    /// JSON polygon file.
    #[arg(long)]
    pub polygon_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceSource {
    /// `ngon:N`.
    #[arg(long, conflicts_with = "surface_file")]
    pub surface: Option<String>,
    /// JSON surface file.
    #[arg(long)]
    pub surface_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum OrientationArg {
    Oriented,
    Unoriented,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum BoundaryArg {
    Include,
    Exclude,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum LengthRuleArg {
    Bounces,
    Tiles,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ConventionArgs {
    #[arg(long, value_enum, default_value = "oriented")]
    pub orientation: OrientationArg,
    #[arg(long, value_enum, default_value = "include")]
    pub boundary: BoundaryArg,
    #[arg(long, value_enum, default_value = "tiles")]
    pub length_rule: LengthRuleArg,
}

impl ConventionArgs {
    pub fn conventions(&self) -> DiagonalConventions {
        DiagonalConventions {
            orientation: match self.orientation {
                OrientationArg::Oriented => Orientation::Oriented,
                OrientationArg::Unoriented => Orientation::Unoriented,
            },
            boundary: match self.boundary {
                BoundaryArg::Include => Boundary::Include,
                BoundaryArg::Exclude => Boundary::Exclude,
            },
            length: match self.length_rule {
                LengthRuleArg::Bounces => LengthRule::Bounces,
                LengthRuleArg::Tiles => LengthRule::Tiles,
            },
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DiagonalsArgs {
    #[command(flatten)]
    pub source: PolygonSource,
    #[command(flatten)]
    pub conventions: ConventionArgs,
    /// Largest combinatorial length counted.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// One record per diagonal instead of the counting series.
    #[arg(long)]
    pub items: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub source: PolygonSource,
    #[command(flatten)]
    pub conventions: ConventionArgs,
    /// Word length.
    #[arg(long)]
    pub t: usize,
    /// Report every length from 1 to `t`.
    #[arg(long)]
    pub series: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum LengthArg {
    #[value(alias = "geometric")]
    Geom,
    #[value(alias = "combinatorial")]
    Comb,
    #[value(alias = "regularized")]
    Reg,
}

impl LengthArg {
    pub fn kind(self) -> LengthKind {
        match self {
            LengthArg::Geom => LengthKind::Geometric,
            LengthArg::Comb => LengthKind::Combinatorial,
            LengthArg::Reg => LengthKind::Regularized,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub source: SurfaceSource,
    #[arg(long, value_enum)]
    pub length: LengthArg,
    #[arg(long)]
    pub lmax: f64,
    /// Thresholds on the grid `lmax·2^(-j/4)`.
    #[arg(long, default_value_t = 13)]
    pub points: usize,
    /// Fail with exit code 2 when the last normalized value is farther than
    /// this relative distance from the target.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SaddlesArgs {
    #[command(flatten)]
    pub source: SurfaceSource,
    /// Area-one geometric length bound.
    #[arg(long)]
    pub lmax: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OmegaArgs {
    #[arg(long)]
    pub n: i64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct WordsArgs {
    #[command(flatten)]
    pub source: PolygonSource,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CalibrateArgs {
    /// Comma-separated polygon aliases.
    #[arg(long, value_delimiter = ',', default_value = "square,triangle")]
    pub polygons: Vec<String>,
    #[arg(long, default_value_t = 6)]
    pub t_max: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, default_value_t = 1 << 17)]
    pub initial_samples: u64,
    #[arg(long, default_value_t = 1 << 22)]
    pub max_samples: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RerunArgs {
    pub file: PathBuf,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}
