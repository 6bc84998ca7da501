//! Scenario files: a line-oriented, sectioned text format describing the
//! camera network, target views, feature model, communication graph, gains,
//! integration settings, and analysis parameters.
//!
//! Grammar (full-line or trailing `#` comments allowed, blank lines ignored):
//!
//! ```text
//! [camera]                  # one section per camera
//! id = 1
//! position = 0 0 0          # meters, world frame
//! orientation = 0 0 0       # axis*angle, radians (optional, default 0)
//! focal_length = 0.03       # meters
//! visible = true
//! estimate_position = 0 0 1     # optional initial estimate override
//! estimate_orientation = 0 0 0  # optional initial estimate override
//! blackout = 2.0 3.0            # optional, repeatable: visibility dropout [s, e)
//!
//! [target]                  # one per viewing camera
//! camera = 1
//! position = 0.55 1.0 -1.91
//! orientation = 0.30 0.19 0.21
//! body_velocity = 0 0 0 0 0 0   # optional: linear then angular
//!
//! [features]                # optional; default = tetrahedron of edge 0.2 m
//! point = 0.1 0.1 0.1       # repeatable, at least 4 in total
//!
//! [graph]
//! edge = 1 2                # repeatable, unordered pairs
//!
//! [gains]
//! k_e = 1
//! k_s = 1
//!
//! [integration]             # optional, defaults shown
//! dt = 0.001
//! t_final = 20
//! record_every = 10
//! scheme = euler            # euler | midpoint
//! error_mode = visual       # visual | geometric
//!
//! [analysis]                # optional, defaults shown
//! zeta_margin = 0.1
//! epsilon = 0.5
//! tail_fraction = 0.2
//! ```

use crate::camera::{CameraIntrinsics, FeatureModel};
use crate::graph::CommGraph;
use crate::observer::{
    CameraNode, ErrorMode, Gains, Network, ObserverState, Scheme, SimulationParams, TargetView,
    VisibilitySchedule,
};
use crate::se3::{exp_so3, Pose, Rotation, Twist};
use nalgebra::Vector3;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("communication graph is not connected")]
    DisconnectedGraph,
    #[error("could not read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraSpec {
    pub id: usize,
    pub position: Vector3<f64>,
    /// Axis times angle, radians.
    pub orientation: Vector3<f64>,
    pub focal_length: f64,
    pub visible: bool,
    pub estimate_position: Option<Vector3<f64>>,
    pub estimate_orientation: Option<Vector3<f64>>,
    pub blackouts: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub camera: usize,
    pub position: Vector3<f64>,
    pub orientation: Vector3<f64>,
    pub linear_velocity: Vector3<f64>,
    pub angular_velocity: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSpec {
    pub k_e: f64,
    pub k_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSpec {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub scheme: Scheme,
    pub error_mode: ErrorMode,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        IntegrationSpec {
            dt: 1e-3,
            t_final: 20.0,
            record_every: 10,
            scheme: Scheme::LieEuler,
            error_mode: ErrorMode::Visual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSpec {
    pub zeta_margin: f64,
    pub epsilon: f64,
    pub tail_fraction: f64,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec { zeta_margin: 0.1, epsilon: 0.5, tail_fraction: 0.2 }
    }
}

/// A fully validated simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cameras: Vec<CameraSpec>,
    pub targets: Vec<TargetSpec>,
    pub features: Vec<Vector3<f64>>,
    pub edges: Vec<(usize, usize)>,
    pub gains: GainSpec,
    pub integration: IntegrationSpec,
    pub analysis: AnalysisSpec,
}

#[derive(Default)]
struct SectionBuilder {
    entries: Vec<(usize, String, String)>,
}

impl SectionBuilder {
    fn take_unique(&mut self, key: &str) -> Result<Option<(usize, String)>, ScenarioError> {
        let mut found = None;
        for (line, k, v) in &self.entries {
            if k == key {
                if found.is_some() {
                    return Err(parse_err(*line, format!("duplicate key `{key}`")));
                }
                found = Some((*line, v.clone()));
            }
        }
        self.entries.retain(|(_, k, _)| k != key);
        Ok(found)
    }

    fn take_all(&mut self, key: &str) -> Vec<(usize, String)> {
        let taken = self
            .entries
            .iter()
            .filter(|(_, k, _)| k == key)
            .map(|(line, _, v)| (*line, v.clone()))
            .collect();
        self.entries.retain(|(_, k, _)| k != key);
        taken
    }

    fn reject_leftovers(&self, section: &str) -> Result<(), ScenarioError> {
        if let Some((line, key, _)) = self.entries.first() {
            return Err(parse_err(*line, format!("unknown key `{key}` in [{section}]")));
        }
        Ok(())
    }
}

fn parse_f64(line: usize, v: &str) -> Result<f64, ScenarioError> {
    v.trim().parse().map_err(|_| parse_err(line, format!("expected a number, got `{v}`")))
}

fn parse_usize(line: usize, v: &str) -> Result<usize, ScenarioError> {
    v.trim().parse().map_err(|_| parse_err(line, format!("expected an integer, got `{v}`")))
}

fn parse_bool(line: usize, v: &str) -> Result<bool, ScenarioError> {
    match v.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(parse_err(line, format!("expected true or false, got `{other}`"))),
    }
}

fn parse_components(line: usize, v: &str, n: usize) -> Result<Vec<f64>, ScenarioError> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != n {
        return Err(parse_err(line, format!("expected {n} components, got {}", parts.len())));
    }
    parts.iter().map(|p| parse_f64(line, p)).collect()
}

fn parse_vec3(line: usize, v: &str) -> Result<Vector3<f64>, ScenarioError> {
    let c = parse_components(line, v, 3)?;
    Ok(Vector3::new(c[0], c[1], c[2]))
}

fn parse_pair(line: usize, v: &str) -> Result<(f64, f64), ScenarioError> {
    let c = parse_components(line, v, 2)?;
    Ok((c[0], c[1]))
}

/// Parses and validates a scenario from text. Diagnostics carry the 1-based
/// line number of the offending entry.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut sections: Vec<(usize, String, SectionBuilder)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "unterminated section header"))?
                .trim()
                .to_string();
            sections.push((line_no, name, SectionBuilder::default()));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(line_no, format!("expected `key = value`, got `{line}`")));
        };
        let Some((_, _, section)) = sections.last_mut() else {
            return Err(parse_err(line_no, "entry before any [section] header"));
        };
        section.entries.push((line_no, key.trim().to_string(), value.trim().to_string()));
    }
    if sections.is_empty() {
        return Err(parse_err(1, "empty scenario: no sections found"));
    }

    let mut cameras = Vec::new();
    let mut targets = Vec::new();
    let mut features = Vec::new();
    let mut edges = Vec::new();
    let mut gains: Option<GainSpec> = None;
    let mut integration = IntegrationSpec::default();
    let mut analysis = AnalysisSpec::default();

    for (header_line, name, mut section) in sections {
        match name.as_str() {
            "camera" => {
                let require = |field: Option<(usize, String)>, what: &str| {
                    field.ok_or_else(|| {
                        parse_err(header_line, format!("[camera] is missing `{what}`"))
                    })
                };
                let (l, v) = require(section.take_unique("id")?, "id")?;
                let id = parse_usize(l, &v)?;
                let (l, v) = require(section.take_unique("position")?, "position")?;
                let position = parse_vec3(l, &v)?;
                let orientation = match section.take_unique("orientation")? {
                    Some((l, v)) => parse_vec3(l, &v)?,
                    None => Vector3::zeros(),
                };
                let (l, v) = require(section.take_unique("focal_length")?, "focal_length")?;
                let focal_length = parse_f64(l, &v)?;
                let (l, v) = require(section.take_unique("visible")?, "visible")?;
                let visible = parse_bool(l, &v)?;
                let estimate_position = section
                    .take_unique("estimate_position")?
                    .map(|(l, v)| parse_vec3(l, &v))
                    .transpose()?;
                let estimate_orientation = section
                    .take_unique("estimate_orientation")?
                    .map(|(l, v)| parse_vec3(l, &v))
                    .transpose()?;
                let blackouts = section
                    .take_all("blackout")
                    .into_iter()
                    .map(|(l, v)| parse_pair(l, &v))
                    .collect::<Result<Vec<_>, _>>()?;
                section.reject_leftovers("camera")?;
                cameras.push(CameraSpec {
                    id,
                    position,
                    orientation,
                    focal_length,
                    visible,
                    estimate_position,
                    estimate_orientation,
                    blackouts,
                });
            }
            "target" => {
                let require = |field: Option<(usize, String)>, what: &str| {
                    field.ok_or_else(|| {
                        parse_err(header_line, format!("[target] is missing `{what}`"))
                    })
                };
                let (l, v) = require(section.take_unique("camera")?, "camera")?;
                let camera = parse_usize(l, &v)?;
                let (l, v) = require(section.take_unique("position")?, "position")?;
                let position = parse_vec3(l, &v)?;
                let (l, v) = require(section.take_unique("orientation")?, "orientation")?;
                let orientation = parse_vec3(l, &v)?;
                let (linear_velocity, angular_velocity) =
                    match section.take_unique("body_velocity")? {
                        Some((l, v)) => {
                            let c = parse_components(l, &v, 6)?;
                            (Vector3::new(c[0], c[1], c[2]), Vector3::new(c[3], c[4], c[5]))
                        }
                        None => (Vector3::zeros(), Vector3::zeros()),
                    };
                section.reject_leftovers("target")?;
                targets.push(TargetSpec {
                    camera,
                    position,
                    orientation,
                    linear_velocity,
                    angular_velocity,
                });
            }
            "features" => {
                for (l, v) in section.take_all("point") {
                    features.push(parse_vec3(l, &v)?);
                }
                section.reject_leftovers("features")?;
            }
            "graph" => {
                for (l, v) in section.take_all("edge") {
                    let c = parse_components(l, &v, 2)?;
                    let (a, b) = (c[0], c[1]);
                    if a.fract() != 0.0 || b.fract() != 0.0 || a < 1.0 || b < 1.0 {
                        return Err(parse_err(l, "edge endpoints must be positive integers"));
                    }
                    edges.push((a as usize, b as usize));
                }
                section.reject_leftovers("graph")?;
            }
            "gains" => {
                let require = |field: Option<(usize, String)>, what: &str| {
                    field.ok_or_else(|| {
                        parse_err(header_line, format!("[gains] is missing `{what}`"))
                    })
                };
                let (l, v) = require(section.take_unique("k_e")?, "k_e")?;
                let k_e = parse_f64(l, &v)?;
                let (l, v) = require(section.take_unique("k_s")?, "k_s")?;
                let k_s = parse_f64(l, &v)?;
                section.reject_leftovers("gains")?;
                gains = Some(GainSpec { k_e, k_s });
            }
            "integration" => {
                if let Some((l, v)) = section.take_unique("dt")? {
                    integration.dt = parse_f64(l, &v)?;
                }
                if let Some((l, v)) = section.take_unique("t_final")? {
                    integration.t_final = parse_f64(l, &v)?;
                }
                if let Some((l, v)) = section.take_unique("record_every")? {
                    integration.record_every = parse_usize(l, &v)?;
                }
                if let Some((l, v)) = section.take_unique("scheme")? {
                    integration.scheme = match v.as_str() {
                        "euler" => Scheme::LieEuler,
                        "midpoint" => Scheme::Midpoint,
                        other => {
                            return Err(parse_err(
                                l,
                                format!("scheme must be euler or midpoint, got `{other}`"),
                            ))
                        }
                    };
                }
                if let Some((l, v)) = section.take_unique("error_mode")? {
                    integration.error_mode = match v.as_str() {
                        "visual" => ErrorMode::Visual,
                        "geometric" => ErrorMode::Geometric,
                        other => {
                            return Err(parse_err(
                                l,
                                format!("error_mode must be visual or geometric, got `{other}`"),
                            ))
                        }
                    };
                }
                section.reject_leftovers("integration")?;
            }
            "analysis" => {
                if let Some((l, v)) = section.take_unique("zeta_margin")? {
                    analysis.zeta_margin = parse_f64(l, &v)?;
                }
                if let Some((l, v)) = section.take_unique("epsilon")? {
                    analysis.epsilon = parse_f64(l, &v)?;
                }
                if let Some((l, v)) = section.take_unique("tail_fraction")? {
                    analysis.tail_fraction = parse_f64(l, &v)?;
                }
                section.reject_leftovers("analysis")?;
            }
            other => return Err(parse_err(header_line, format!("unknown section `[{other}]`"))),
        }
    }

    if features.is_empty() {
        features = FeatureModel::default_tetrahedron().points().to_vec();
    }
    let gains = gains.ok_or_else(|| ScenarioError::Validation("missing [gains] section".into()))?;

    let mut scenario =
        Scenario { cameras, targets, features, edges, gains, integration, analysis };
    validate_and_normalize(&mut scenario)?;
    Ok(scenario)
}

/// Reads and parses a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}

/// Every float in a scenario must be finite; NaN or infinities would flow
/// silently into the dynamics.
fn require_finite(s: &Scenario) -> Result<(), ScenarioError> {
    let bad = |what: String| ScenarioError::Validation(format!("{what} must be finite"));
    let v3 = |v: &Vector3<f64>| v.iter().all(|x| x.is_finite());
    for cam in &s.cameras {
        let fields_ok = v3(&cam.position)
            && v3(&cam.orientation)
            && cam.focal_length.is_finite()
            && cam.estimate_position.as_ref().is_none_or(v3)
            && cam.estimate_orientation.as_ref().is_none_or(v3)
            && cam.blackouts.iter().all(|(a, b)| a.is_finite() && b.is_finite());
        if !fields_ok {
            return Err(bad(format!("camera {}: every value", cam.id)));
        }
    }
    for t in &s.targets {
        if !(v3(&t.position) && v3(&t.orientation) && v3(&t.linear_velocity) && v3(&t.angular_velocity)) {
            return Err(bad(format!("target of camera {}: every value", t.camera)));
        }
    }
    if !s.features.iter().all(v3) {
        return Err(bad("feature points".into()));
    }
    let scalars = [
        s.gains.k_e,
        s.gains.k_s,
        s.integration.dt,
        s.integration.t_final,
        s.analysis.zeta_margin,
        s.analysis.epsilon,
        s.analysis.tail_fraction,
    ];
    if !scalars.iter().all(|x| x.is_finite()) {
        return Err(bad("gains, integration, and analysis parameters".into()));
    }
    Ok(())
}

fn validate_and_normalize(s: &mut Scenario) -> Result<(), ScenarioError> {
    let invalid = |m: String| ScenarioError::Validation(m);
    require_finite(s)?;
    if s.cameras.is_empty() {
        return Err(invalid("at least one camera is required".into()));
    }
    let n = s.cameras.len();
    s.cameras.sort_by_key(|c| c.id);
    for (idx, cam) in s.cameras.iter().enumerate() {
        if cam.id != idx + 1 {
            return Err(invalid(format!(
                "camera ids must be exactly 1..={n} without repeats; found id {}",
                cam.id
            )));
        }
        if cam.focal_length <= 0.0 {
            return Err(invalid(format!("camera {}: focal_length must be positive", cam.id)));
        }
        for &(start, end) in &cam.blackouts {
            if !(start >= 0.0 && end > start) {
                return Err(invalid(format!(
                    "camera {}: blackout interval [{start}, {end}) is not ordered",
                    cam.id
                )));
            }
            if !cam.visible {
                return Err(invalid(format!(
                    "camera {}: blackout on a camera that never views the target",
                    cam.id
                )));
            }
        }
    }
    s.targets.sort_by_key(|t| t.camera);
    for pair in s.targets.windows(2) {
        if pair[0].camera == pair[1].camera {
            return Err(invalid(format!("duplicate [target] for camera {}", pair[0].camera)));
        }
    }
    for t in &s.targets {
        match s.cameras.get(t.camera.wrapping_sub(1)) {
            None => return Err(invalid(format!("[target] references unknown camera {}", t.camera))),
            Some(cam) if !cam.visible => {
                return Err(invalid(format!(
                    "camera {} does not view the target but has a [target] section",
                    t.camera
                )))
            }
            _ => {}
        }
    }
    for cam in s.cameras.iter().filter(|c| c.visible) {
        if !s.targets.iter().any(|t| t.camera == cam.id) {
            return Err(invalid(format!("visible camera {} has no [target] section", cam.id)));
        }
    }
    if s.features.len() < 4 {
        return Err(invalid(format!("need at least 4 feature points, got {}", s.features.len())));
    }
    let graph = CommGraph::new(n, &s.edges)
        .map_err(|e| invalid(format!("communication graph: {e}")))?;
    if !graph.is_connected() {
        return Err(ScenarioError::DisconnectedGraph);
    }
    s.edges = graph.edges().collect();
    if s.gains.k_e <= 0.0 || s.gains.k_s < 0.0 {
        return Err(invalid(format!(
            "gains must satisfy k_e > 0 and k_s >= 0, got k_e = {}, k_s = {}",
            s.gains.k_e, s.gains.k_s
        )));
    }
    if s.integration.dt <= 0.0 {
        return Err(invalid("integration dt must be positive".into()));
    }
    if s.integration.t_final < 0.0 {
        return Err(invalid("integration t_final must be nonnegative".into()));
    }
    if s.integration.record_every == 0 {
        return Err(invalid("record_every must be at least 1".into()));
    }
    if s.analysis.zeta_margin <= 0.0 {
        return Err(invalid("analysis zeta_margin must be positive".into()));
    }
    if s.analysis.epsilon <= 0.0 {
        return Err(invalid("analysis epsilon must be positive".into()));
    }
    if !(s.analysis.tail_fraction > 0.0 && s.analysis.tail_fraction <= 1.0) {
        return Err(invalid("analysis tail_fraction must be in (0, 1]".into()));
    }
    Ok(())
}

/// Canonical text form; [`parse_scenario`] of the output reproduces the value
/// exactly (floats use round-trip-exact formatting).
pub fn serialize(s: &Scenario) -> String {
    use std::fmt::Write;
    let f = crate::runner::fmt_f64;
    let v3 = |v: &Vector3<f64>| format!("{} {} {}", f(v[0]), f(v[1]), f(v[2]));
    let mut out = String::new();
    for cam in &s.cameras {
        writeln!(out, "[camera]").unwrap();
        writeln!(out, "id = {}", cam.id).unwrap();
        writeln!(out, "position = {}", v3(&cam.position)).unwrap();
        writeln!(out, "orientation = {}", v3(&cam.orientation)).unwrap();
        writeln!(out, "focal_length = {}", f(cam.focal_length)).unwrap();
        writeln!(out, "visible = {}", cam.visible).unwrap();
        if let Some(p) = &cam.estimate_position {
            writeln!(out, "estimate_position = {}", v3(p)).unwrap();
        }
        if let Some(r) = &cam.estimate_orientation {
            writeln!(out, "estimate_orientation = {}", v3(r)).unwrap();
        }
        for &(start, end) in &cam.blackouts {
            writeln!(out, "blackout = {} {}", f(start), f(end)).unwrap();
        }
        writeln!(out).unwrap();
    }
    for t in &s.targets {
        writeln!(out, "[target]").unwrap();
        writeln!(out, "camera = {}", t.camera).unwrap();
        writeln!(out, "position = {}", v3(&t.position)).unwrap();
        writeln!(out, "orientation = {}", v3(&t.orientation)).unwrap();
        writeln!(
            out,
            "body_velocity = {} {}",
            v3(&t.linear_velocity),
            v3(&t.angular_velocity)
        )
        .unwrap();
        writeln!(out).unwrap();
    }
    writeln!(out, "[features]").unwrap();
    for p in &s.features {
        writeln!(out, "point = {}", v3(p)).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "[graph]").unwrap();
    for &(a, b) in &s.edges {
        writeln!(out, "edge = {a} {b}").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "[gains]").unwrap();
    writeln!(out, "k_e = {}", f(s.gains.k_e)).unwrap();
    writeln!(out, "k_s = {}", f(s.gains.k_s)).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[integration]").unwrap();
    writeln!(out, "dt = {}", f(s.integration.dt)).unwrap();
    writeln!(out, "t_final = {}", f(s.integration.t_final)).unwrap();
    writeln!(out, "record_every = {}", s.integration.record_every).unwrap();
    let scheme = match s.integration.scheme {
        Scheme::LieEuler => "euler",
        Scheme::Midpoint => "midpoint",
    };
    writeln!(out, "scheme = {scheme}").unwrap();
    let mode = match s.integration.error_mode {
        ErrorMode::Visual => "visual",
        ErrorMode::Geometric => "geometric",
    };
    writeln!(out, "error_mode = {mode}").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[analysis]").unwrap();
    writeln!(out, "zeta_margin = {}", f(s.analysis.zeta_margin)).unwrap();
    writeln!(out, "epsilon = {}", f(s.analysis.epsilon)).unwrap();
    writeln!(out, "tail_fraction = {}", f(s.analysis.tail_fraction)).unwrap();
    out
}

/// Builds the runtime network, initial state, and simulation parameters.
pub fn build(s: &Scenario) -> Result<(Network, ObserverState, SimulationParams), ScenarioError> {
    let wrap = |m: String| ScenarioError::Validation(m);
    let cameras: Vec<CameraNode> = s
        .cameras
        .iter()
        .map(|c| {
            Ok(CameraNode {
                id: c.id,
                pose_in_world: Pose::new(exp_so3(&c.orientation), c.position),
                intrinsics: CameraIntrinsics::new(c.focal_length).map_err(|e| wrap(e.to_string()))?,
                visible: c.visible,
            })
        })
        .collect::<Result<_, ScenarioError>>()?;
    let targets: BTreeMap<usize, TargetView> = s
        .targets
        .iter()
        .map(|t| {
            (
                t.camera,
                TargetView {
                    pose_in_world: Pose::new(exp_so3(&t.orientation), t.position),
                    body_velocity: Twist::new(t.linear_velocity, t.angular_velocity),
                },
            )
        })
        .collect();
    let features = FeatureModel::new(s.features.clone()).map_err(|e| wrap(e.to_string()))?;
    let graph = CommGraph::new(s.cameras.len(), &s.edges).map_err(|e| wrap(e.to_string()))?;
    let net = Network::new(cameras, targets, features, graph).map_err(|e| wrap(e.to_string()))?;

    let mut state = net.initial_state();
    for (idx, cam) in s.cameras.iter().enumerate() {
        let position = cam.estimate_position.unwrap_or(Vector3::new(0.0, 0.0, 1.0));
        let rotation = match cam.estimate_orientation {
            Some(xi) => exp_so3(&xi),
            None => Rotation::identity(),
        };
        state.estimates[idx] = Pose::new(rotation, position);
    }

    let gains = Gains::new(s.gains.k_e, s.gains.k_s).map_err(|e| wrap(e.to_string()))?;
    let mut schedule = VisibilitySchedule::default();
    for cam in &s.cameras {
        for &(start, end) in &cam.blackouts {
            schedule.add_blackout(cam.id, start, end);
        }
    }
    let params = SimulationParams {
        gains,
        dt: s.integration.dt,
        t_final: s.integration.t_final,
        record_every: s.integration.record_every,
        scheme: s.integration.scheme,
        error_mode: s.integration.error_mode,
        schedule,
        zeta_margin: s.analysis.zeta_margin,
    };
    Ok((net, state, params))
}
