//! Scene files: a piecewise map plus everything needed to render it.
//!
//! Scenes are JSON. Complex numbers are `[re, im]` pairs, circles are
//! `{"a": .., "b": [re, im], "d": ..}` (the locus a|z|² + b z̄ + b̄ z + d = 0,
//! negative side inside), and maps are `{"a": [..], "b": [..], "c": [..],
//! "d": [..]}` for z ↦ (az + b)/(cz + d).

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatou::Viewport;
use crate::piecewise::{Partition, PiecewiseMap, Region};
use crate::sphere::{GenCircle, Moebius, Side, SpherePoint};

/// A circle as written in a scene file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub a: f64,
    pub b: [f64; 2],
    pub d: f64,
}

impl CircleSpec {
    /// |z − center| = radius, disc on the negative side.
    pub fn disc(center: [f64; 2], radius: f64) -> Self {
        CircleSpec {
            a: 1.0,
            b: [-center[0], -center[1]],
            d: center[0] * center[0] + center[1] * center[1] - radius * radius,
        }
    }

    pub fn to_circle(&self) -> Result<GenCircle> {
        GenCircle::new(self.a, c(self.b), self.d)
    }
}

/// Which side of a circle a region lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideSpec {
    Negative,
    Positive,
}

impl From<SideSpec> for Side {
    fn from(s: SideSpec) -> Side {
        match s {
            SideSpec::Negative => Side::Negative,
            SideSpec::Positive => Side::Positive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub circle: CircleSpec,
    pub side: SideSpec,
}

/// A Möbius map as written in a scene file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
}

impl MapSpec {
    pub fn from_complex(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Self {
        let p = |z: Complex64| [z.re, z.im];
        MapSpec { a: p(a), b: p(b), c: p(cc), d: p(d) }
    }

    pub fn to_map(&self) -> Result<Moebius> {
        Moebius::new(c(self.a), c(self.b), c(self.c), c(self.d))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub constraints: Vec<ConstraintSpec>,
    pub map: MapSpec,
    /// A point strictly inside the region; searched for when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior: Option<[f64; 2]>,
}

/// Render switches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderToggles {
    #[serde(default = "yes")]
    pub pd_overlay: bool,
    #[serde(default = "yes")]
    pub periodic_markers: bool,
    #[serde(default = "yes")]
    pub component_coloring: bool,
}

fn yes() -> bool {
    true
}

impl Default for RenderToggles {
    fn default() -> Self {
        RenderToggles { pd_overlay: true, periodic_markers: true, component_coloring: true }
    }
}

/// A labeled point of interest (for example a point of a named component).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub label: String,
    pub point: [f64; 2],
}

/// The on-disk form of a scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub regions: Vec<RegionSpec>,
    pub viewport: Viewport,
    pub resolution: [usize; 2],
    pub prefix: usize,
    pub depth: usize,
    #[serde(default)]
    pub render: RenderToggles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub markers: Vec<Marker>,
}

/// A validated scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneConfig {
    file: SceneFile,
    map: PiecewiseMap,
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl SceneConfig {
    /// Validates a scene description.
    pub fn new(file: SceneFile) -> Result<Self> {
        if file.regions.is_empty() {
            return Err(Error::validation("coverage", "a scene needs at least one region"));
        }
        file.viewport.validate()?;
        let [w, h] = file.resolution;
        if w < 16 || h < 16 {
            return Err(Error::validation("resolution", format!("{w}x{h} is below 16x16")));
        }
        if file.prefix == 0 || file.prefix > 64 {
            return Err(Error::validation("prefix length", format!("{} is outside 1..=64", file.prefix)));
        }
        let mut regions = Vec::with_capacity(file.regions.len());
        let mut branches = Vec::with_capacity(file.regions.len());
        for (i, r) in file.regions.iter().enumerate() {
            let finite = r.map.a.iter().chain(&r.map.b).chain(&r.map.c).chain(&r.map.d).all(|v| v.is_finite());
            if !finite {
                return Err(Error::validation("finite numbers", format!("region {i} map")));
            }
            branches
                .push(r.map.to_map().map_err(|e| Error::validation("degenerate branch", format!("region {i}: {e}")))?);
            let mut constraints = Vec::with_capacity(r.constraints.len());
            for k in &r.constraints {
                let circle = k
                    .circle
                    .to_circle()
                    .map_err(|e| Error::validation("degenerate circle", format!("region {i}: {e}")))?;
                constraints.push((circle, k.side.into()));
            }
            let region = match r.interior {
                Some(p) => Region::new(constraints, SpherePoint::Finite(c(p))),
                None => Region::from_constraints(constraints),
            }
            .map_err(|e| match e {
                Error::Validation { invariant, detail } => {
                    Error::Validation { invariant, detail: format!("region {i}: {detail}") }
                }
                e => e,
            })?;
            regions.push(region);
        }
        let map = PiecewiseMap::new(Partition::new(regions)?, branches)?;
        Ok(SceneConfig { file, map })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        SceneConfig::new(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        SceneConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("scene files serialize")
    }

    pub fn file(&self) -> &SceneFile {
        &self.file
    }

    pub fn map(&self) -> &PiecewiseMap {
        &self.map
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn viewport(&self) -> Viewport {
        self.file.viewport
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.file.resolution[0], self.file.resolution[1])
    }

    pub fn prefix(&self) -> usize {
        self.file.prefix
    }

    pub fn depth(&self) -> usize {
        self.file.depth
    }

    pub fn toggles(&self) -> RenderToggles {
        self.file.render
    }

    pub fn output(&self) -> Option<&str> {
        self.file.output.as_deref()
    }

    pub fn marker(&self, label: &str) -> Option<SpherePoint> {
        self.file.markers.iter().find(|m| m.label == label).map(|m| SpherePoint::Finite(c(m.point)))
    }

    /// A copy with other render settings; validation is unaffected.
    pub fn with_settings(
        &self,
        resolution: Option<(usize, usize)>,
        depth: Option<usize>,
        prefix: Option<usize>,
    ) -> Result<Self> {
        let mut file = self.file.clone();
        if let Some((w, h)) = resolution {
            file.resolution = [w, h];
        }
        if let Some(n) = depth {
            file.depth = n;
        }
        if let Some(k) = prefix {
            file.prefix = k;
        }
        SceneConfig::new(file)
    }

    pub fn with_viewport(&self, viewport: Viewport) -> Result<Self> {
        let mut file = self.file.clone();
        file.viewport = viewport;
        SceneConfig::new(file)
    }
}
