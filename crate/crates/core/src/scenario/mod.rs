//! VANET scenarios: mobility, radio parameters and CBR data flows.

mod grid;
mod trace;

pub use grid::{generate_grid_scenario, FlowTemplate, GridSpec};
pub use trace::{load_trace, MobilityTrace, TraceSample};

use crate::error::{Error, Result};
use crate::NodeId;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

/// Maximum radio range of the modeled 802.11p interface, meters.
pub const DEFAULT_RADIO_RANGE: f64 = 500.0;
/// Channel bandwidth, bits per second.
pub const DEFAULT_BANDWIDTH: f64 = 6.0e6;
pub const DEFAULT_SIM_DURATION: f64 = 180.0;

/// Rectangular simulation area in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    pub fn square_meters(&self) -> f64 {
        self.width * self.height
    }
}

/// Constant-bit-rate data source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CbrFlow {
    pub source: NodeId,
    pub destination: NodeId,
    #[serde(rename = "packet_size_bytes")]
    pub packet_size: u32,
    /// Packets per second.
    #[serde(rename = "rate_pps")]
    pub rate: f64,
    #[serde(rename = "start_s")]
    pub start: f64,
    #[serde(rename = "duration_s")]
    pub duration: f64,
}

impl CbrFlow {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    fn validate(&self, node_count: usize, sim_duration: f64) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.source == self.destination {
            return bad(format!("flow source and destination are both {}", self.source));
        }
        if self.source as usize >= node_count || self.destination as usize >= node_count {
            return bad(format!(
                "flow {}->{} references a node outside 0..{node_count}",
                self.source, self.destination
            ));
        }
        if self.packet_size == 0 || !(self.rate > 0.0) || !(self.start >= 0.0) || !(self.duration >= 0.0) {
            return bad(format!(
                "flow {}->{} has invalid size/rate/timing",
                self.source, self.destination
            ));
        }
        if self.end() > sim_duration + 1e-9 {
            return bad(format!(
                "flow {}->{} ends at {} after the simulation end {sim_duration}",
                self.source,
                self.destination,
                self.end()
            ));
        }
        Ok(())
    }
}

/// Packet loss on top of the unit-disk radio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossModel {
    #[default]
    Ideal,
    /// Loss probability grows linearly from 0 at distance 0 to
    /// `p_at_max_range` at the radio range.
    Bernoulli { p_at_max_range: f64 },
}

impl LossModel {
    pub fn loss_probability(&self, distance: f64, range: f64) -> f64 {
        match *self {
            LossModel::Ideal => 0.0,
            LossModel::Bernoulli { p_at_max_range } => (p_at_max_range * distance / range).clamp(0.0, 1.0),
        }
    }
}

/// Size class used to group validation results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioClass {
    Small,
    Medium,
    Large,
}

impl ScenarioClass {
    /// Classifies by area: up to 180 000 m² small, up to 300 000 m² medium.
    pub fn from_area(area: Area) -> Self {
        let m2 = area.square_meters();
        if m2 <= 180_000.0 {
            ScenarioClass::Small
        } else if m2 <= 300_000.0 {
            ScenarioClass::Medium
        } else {
            ScenarioClass::Large
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ScenarioClass::Small => "small",
            ScenarioClass::Medium => "medium",
            ScenarioClass::Large => "large",
        }
    }
}

/// A complete simulation input.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub area: Area,
    pub trace: MobilityTrace,
    pub flows: Vec<CbrFlow>,
    pub radio_range: f64,
    pub bandwidth: f64,
    pub sim_duration: f64,
    pub loss_model: LossModel,
}

impl Scenario {
    pub fn node_count(&self) -> usize {
        self.trace.node_count()
    }

    pub fn class(&self) -> ScenarioClass {
        ScenarioClass::from_area(self.area)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radio_range > 0.0) {
            return Err(Error::Validation("radio range must be positive".into()));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::Validation("bandwidth must be positive".into()));
        }
        if !(self.sim_duration > 0.0) {
            return Err(Error::Validation("simulation duration must be positive".into()));
        }
        if let LossModel::Bernoulli { p_at_max_range } = self.loss_model {
            if !(0.0..=1.0).contains(&p_at_max_range) {
                return Err(Error::Validation("p_at_max_range must lie in [0, 1]".into()));
            }
        }
        self.trace.check_bounds(self.area.width, self.area.height)?;
        for flow in &self.flows {
            flow.validate(self.node_count(), self.sim_duration)?;
        }
        Ok(())
    }

    /// Writes `<dir>/<stem>.json` and `<dir>/<stem>.trace.csv`, returning both paths.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let trace_name = format!("{stem}.trace.csv");
        let trace_path = dir.join(&trace_name);
        fs::write(&trace_path, self.trace.to_csv())?;
        let file = ScenarioFile {
            name: Some(self.name.clone()),
            area: self.area,
            radio_range_m: self.radio_range,
            bandwidth_bps: self.bandwidth,
            duration_s: self.sim_duration,
            loss_model: self.loss_model,
            trace_file: PathBuf::from(trace_name),
            flows: self.flows.clone(),
        };
        let json_path = dir.join(format!("{stem}.json"));
        fs::write(&json_path, serde_json::to_string_pretty(&file)? + "\n")?;
        Ok((json_path, trace_path))
    }

    /// Loads a scenario JSON file; a relative `trace_file` resolves against
    /// the JSON file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        let trace_path = if file.trace_file.is_absolute() {
            file.trace_file.clone()
        } else {
            path.parent().unwrap_or(Path::new(".")).join(&file.trace_file)
        };
        let trace = load_trace(&fs::read_to_string(&trace_path)?)?;
        let name = file.name.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        let scenario = Scenario {
            name,
            area: file.area,
            trace,
            flows: file.flows,
            radio_range: file.radio_range_m,
            bandwidth: file.bandwidth_bps,
            sim_duration: file.duration_s,
            loss_model: file.loss_model,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// On-disk scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub area: Area,
    pub radio_range_m: f64,
    pub bandwidth_bps: f64,
    pub duration_s: f64,
    #[serde(default)]
    pub loss_model: LossModel,
    pub trace_file: PathBuf,
    pub flows: Vec<CbrFlow>,
}

/// Stationary scenario with nodes at the given coordinates.
pub fn static_scenario(name: &str, positions: &[(f64, f64)], flows: Vec<CbrFlow>, duration: f64) -> Result<Scenario> {
    let samples = positions
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| TraceSample {
            time: 0.0,
            node: i as NodeId,
            x,
            y,
        })
        .collect();
    let trace = MobilityTrace::new(samples)?;
    let width = positions.iter().map(|p| p.0).fold(1.0, f64::max);
    let height = positions.iter().map(|p| p.1).fold(1.0, f64::max);
    let scenario = Scenario {
        name: name.to_string(),
        area: Area::new(width, height),
        trace,
        flows,
        radio_range: DEFAULT_RADIO_RANGE,
        bandwidth: DEFAULT_BANDWIDTH,
        sim_duration: duration,
        loss_model: LossModel::Ideal,
    };
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_round_trip() {
        let dir = std::env::temp_dir().join(format!("eolsr-scn-{}", std::process::id()));
        let flow = CbrFlow {
            source: 0,
            destination: 1,
            packet_size: 512,
            rate: 2.0,
            start: 10.0,
            duration: 5.0,
        };
        let s = static_scenario("pair", &[(0.0, 0.0), (100.0, 0.0)], vec![flow], 20.0).unwrap();
        let (json, _) = s.save(&dir, "pair").unwrap();
        let back = Scenario::load(&json).unwrap();
        assert_eq!(s, back);
        let _ = fs::remove_dir_all(dir);
    }

    #[test]
    fn flow_validation() {
        let mut f = CbrFlow {
            source: 0,
            destination: 0,
            packet_size: 512,
            rate: 1.0,
            start: 0.0,
            duration: 1.0,
        };
        assert!(static_scenario("x", &[(0.0, 0.0), (1.0, 1.0)], vec![f], 10.0).is_err());
        f.destination = 5;
        assert!(static_scenario("x", &[(0.0, 0.0), (1.0, 1.0)], vec![f], 10.0).is_err());
        f.destination = 1;
        f.duration = 20.0;
        assert!(static_scenario("x", &[(0.0, 0.0), (1.0, 1.0)], vec![f], 10.0).is_err());
    }

    #[test]
    fn classes_follow_area() {
        assert_eq!(ScenarioClass::from_area(Area::new(400.0, 300.0)), ScenarioClass::Small);
        assert_eq!(ScenarioClass::from_area(Area::new(600.0, 400.0)), ScenarioClass::Medium);
        assert_eq!(ScenarioClass::from_area(Area::new(600.0, 600.0)), ScenarioClass::Large);
    }

    #[test]
    fn bernoulli_loss_scales_with_distance() {
        let m = LossModel::Bernoulli { p_at_max_range: 0.2 };
        assert_eq!(m.loss_probability(0.0, 500.0), 0.0);
        assert!((m.loss_probability(250.0, 500.0) - 0.1).abs() < 1e-12);
        assert_eq!(LossModel::Ideal.loss_probability(400.0, 500.0), 0.0);
    }
}
