//! Typed guide inputs (`KIND=PATH`) and their decoding into a guide stack.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chunkstyle::assets::{coord_guide, gray_guide, label_guide, normal_guide};
use chunkstyle::{compose_guides, GuideField, Raster};

use crate::error::{CliError, CliResult};
use crate::png_io::read_u8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GuideKind {
    /// RGB normal pass, `n = 2 * rgb - 1`; back-facing pixels are masked out.
    Normal,
    /// RG texture coordinates.
    Uv,
    /// RG displacement field.
    Displacement,
    /// Hard labels; channel bytes packed into one integer per pixel.
    Segmentation,
    /// Grayscale appearance guide.
    Appearance,
}

impl GuideKind {
    pub const ALL: [GuideKind; 5] = [
        GuideKind::Normal,
        GuideKind::Uv,
        GuideKind::Displacement,
        GuideKind::Segmentation,
        GuideKind::Appearance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GuideKind::Normal => "normal",
            GuideKind::Uv => "uv",
            GuideKind::Displacement => "displacement",
            GuideKind::Segmentation => "segmentation",
            GuideKind::Appearance => "appearance",
        }
    }

    pub fn decode(self, raster: &Raster<u8>) -> chunkstyle::Result<GuideField<f32>> {
        match self {
            GuideKind::Normal => normal_guide(raster),
            GuideKind::Uv | GuideKind::Displacement => coord_guide(raster),
            GuideKind::Segmentation => label_guide(raster),
            GuideKind::Appearance => gray_guide(raster),
        }
    }
}

impl fmt::Display for GuideKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GuideKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown guide kind '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// `KIND=PATH` as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct GuideSpec {
    pub kind: GuideKind,
    pub path: PathBuf,
}

impl FromStr for GuideSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, path) = s
            .split_once('=')
            .ok_or_else(|| format!("expected KIND=PATH, got '{s}'"))?;
        if path.is_empty() {
            return Err(format!("missing path in '{s}'"));
        }
        Ok(Self {
            kind: kind.parse()?,
            path: PathBuf::from(path),
        })
    }
}

/// `KIND=WEIGHT` channel weight override.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub kind: GuideKind,
    pub weight: f32,
}

impl FromStr for WeightSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, w) = s
            .split_once('=')
            .ok_or_else(|| format!("expected KIND=WEIGHT, got '{s}'"))?;
        let weight: f32 = w.parse().map_err(|_| format!("invalid weight '{w}'"))?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(format!("weight must be finite and non-negative, got {w}"));
        }
        Ok(Self {
            kind: kind.parse()?,
            weight,
        })
    }
}

/// Source and target guides must list the same kinds in the same order.
pub fn check_kinds(source: &[GuideSpec], target: &[GuideSpec]) -> CliResult<()> {
    let kinds = |v: &[GuideSpec]| v.iter().map(|g| g.kind).collect::<Vec<_>>();
    if source.is_empty() {
        return Err(CliError::config("at least one --source-guide is required"));
    }
    if kinds(source) != kinds(target) {
        let list = |v: &[GuideSpec]| {
            v.iter()
                .map(|g| g.kind.name())
                .collect::<Vec<_>>()
                .join(",")
        };
        return Err(CliError::config(format!(
            "source guide kinds [{}] do not match target guide kinds [{}]",
            list(source),
            list(target)
        )));
    }
    if source
        .iter()
        .filter(|g| g.kind == GuideKind::Segmentation)
        .count()
        > 1
    {
        return Err(CliError::config(
            "at most one segmentation guide is supported",
        ));
    }
    Ok(())
}

fn weight_for(kind: GuideKind, weights: &[WeightSpec]) -> Option<f32> {
    weights
        .iter()
        .rev()
        .find(|w| w.kind == kind)
        .map(|w| w.weight)
}

/// Decodes one guide image, naming the file in any error.
pub fn load_part(
    kind: GuideKind,
    path: &Path,
    weights: &[WeightSpec],
) -> CliResult<GuideField<f32>> {
    let raster = read_u8(path)?;
    let mut guide = kind
        .decode(&raster)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if let Some(w) = weight_for(kind, weights) {
        guide = guide.scaled(w)?;
    }
    Ok(guide)
}

/// Loads and composes a guide stack from already decoded parts.
pub fn compose(parts: Vec<GuideField<f32>>, side: &str) -> CliResult<GuideField<f32>> {
    compose_guides(&parts).map_err(|e| CliError::config(format!("{side} guides: {e}")))
}

pub fn load_stack(
    specs: &[GuideSpec],
    weights: &[WeightSpec],
    side: &str,
) -> CliResult<GuideField<f32>> {
    let parts = specs
        .iter()
        .map(|s| load_part(s.kind, &s.path, weights))
        .collect::<CliResult<Vec<_>>>()?;
    compose(parts, side)
}
