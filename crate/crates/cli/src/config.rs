//! The experiment file format and its translation into library types.

use std::path::PathBuf;

use catvisc::glued::Face;
use catvisc::sequences::SequencePair;
use catvisc::viscosity::IterationConfig;
use catvisc::{MapKind, MapSpec, Point, Space};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKindConfig {
    Plane,
    Sphere,
    Glued,
}

/// `kind` plus, for spheres, an optional curvature and cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: SpaceKindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_center: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_radius: Option<f64>,
}

/// A point as plain coordinates, in polar form on a sphere, or in a face
/// chart of the glued complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointConfig {
    Coords(Vec<f64>),
    Polar(PolarConfig),
    Glued(GluedPointConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarConfig {
    pub colatitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluedPointConfig {
    pub face: Face,
    pub u: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapConfig {
    Identity,
    Rotation { axis: [f64; 3], angle: f64 },
    SegmentProjection { a: PointConfig, b: PointConfig },
    Homothety { anchor: PointConfig, k: f64 },
    Constant { point: PointConfig },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

fn default_report_every() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    #[serde(rename = "T")]
    pub t: MapConfig,
    /// Required by `iterate`; `halpern` replaces it with the constant map to `u`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<MapConfig>,
    pub u: PointConfig,
    #[serde(default = "SequencePair::standard")]
    pub sequences: SequencePair,
    pub max_iter: usize,
    #[serde(default = "default_report_every")]
    pub report_every: usize,
    /// The constant `M` of the curvature-one hypotheses.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Parses JSON, reporting failures with a JSON pointer to the offending value.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        CliError::Config(format!("invalid config at {pointer}: {}", e.inner()))
    })
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl SpaceConfig {
    pub fn build(&self) -> Result<Space, CliError> {
        let cap = match (self.cap_center, self.cap_radius) {
            (Some(c), Some(r)) => Some((c, r)),
            (None, None) => None,
            _ => return Err(CliError::Config("space: cap-center and cap-radius go together".into())),
        };
        let flat = |name: &str| -> Result<(), CliError> {
            if self.kappa.is_some_and(|k| k != 0.0) || cap.is_some() {
                return Err(CliError::Config(format!("space: {name} takes no kappa or cap")));
            }
            Ok(())
        };
        let space = match self.kind {
            SpaceKindConfig::Plane => {
                flat("plane")?;
                Space::plane()
            }
            SpaceKindConfig::Glued => {
                flat("glued")?;
                Space::glued()
            }
            SpaceKindConfig::Sphere => match (self.kappa.unwrap_or(1.0), cap) {
                (1.0, None) => Space::sphere(),
                (1.0, Some((c, r))) => Space::sphere_cap(c, r)?,
                (k, None) => Space::scaled_sphere(k)?,
                (k, Some((c, r))) => Space::scaled_sphere_cap(k, c, r)?,
            },
        };
        Ok(space)
    }
}

impl PointConfig {
    pub fn build(&self, space: &Space) -> Result<Point, CliError> {
        let p = match (self, space.is_spherical()) {
            (PointConfig::Coords(c), false) if c.len() == 2 && space.kind == catvisc::SpaceKind::Plane => {
                Point::planar(c[0], c[1])
            }
            (PointConfig::Coords(c), true) if c.len() == 3 => Point::spherical([c[0], c[1], c[2]])?,
            (PointConfig::Polar(p), true) => Point::from_polar(p.colatitude, p.longitude),
            (PointConfig::Glued(g), false) if space.kind == catvisc::SpaceKind::GluedExample => {
                catvisc::glued::standard().point(g.face, g.u, g.w)?
            }
            _ => {
                return Err(CliError::Config(format!(
                    "point {self:?} does not fit a {:?} space",
                    space.kind
                )))
            }
        };
        space.check_point(&p)?;
        Ok(p)
    }
}

impl MapConfig {
    pub fn build(&self, space: Space) -> Result<MapSpec, CliError> {
        let kind = match self {
            MapConfig::Identity => MapKind::Identity,
            MapConfig::Rotation { axis, angle } => MapKind::Rotation { axis: *axis, angle: *angle },
            MapConfig::SegmentProjection { a, b } => MapKind::SegmentProjection {
                segment: catvisc::GeodesicSegment::new(&space, a.build(&space)?, b.build(&space)?)?,
            },
            MapConfig::Homothety { anchor, k } => MapKind::Homothety { anchor: anchor.build(&space)?, k: *k },
            MapConfig::Constant { point } => MapKind::Constant { point: point.build(&space)? },
        };
        Ok(MapSpec::new(space, kind)?)
    }
}

impl ExperimentConfig {
    /// Builds the run; with `halpern` the contraction is the constant map to `u`.
    pub fn build(&self, halpern: bool, explore_no_n: bool, seed: u64) -> Result<IterationConfig, CliError> {
        let space = self.space.build()?;
        let t = self.t.build(space)?;
        let u = self.u.build(&space)?;
        let f = match (&self.f, halpern) {
            (_, true) => MapSpec::constant(space, u)?,
            (Some(f), false) => f.build(space)?,
            (None, false) => return Err(CliError::Config("invalid config at /f: missing contraction f".into())),
        };
        let mut cfg = IterationConfig::new(space, t, f, u);
        cfg.sequences = self.sequences.clone();
        cfg.max_iter = self.max_iter;
        cfg.report_every = self.report_every;
        cfg.m = self.m;
        cfg.allow_no_n_property = explore_no_n;
        cfg.seed = seed;
        Ok(cfg)
    }
}

/// A one-off projection query: the projection of `x` onto `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectQuery {
    pub space: SpaceConfig,
    pub a: PointConfig,
    pub b: PointConfig,
    pub x: PointConfig,
}
