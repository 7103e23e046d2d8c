use crate::error::{Error, Result};
use crate::NodeId;
use std::fmt::Write as _;

/// One position sample of one vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub time: f64,
    pub node: NodeId,
    pub x: f64,
    pub y: f64,
}

/// Sampled vehicle positions over time.
///
/// Samples are kept sorted by `(time, node)` with no duplicate pair, and every
/// node `0..node_count` has a sample at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTrace {
    samples: Vec<TraceSample>,
    duration: f64,
    // per-node (time, x, y), time-sorted
    tracks: Vec<Vec<(f64, f64, f64)>>,
}

impl MobilityTrace {
    /// Validates and indexes a set of samples. Rows may arrive in any order.
    pub fn new(mut samples: Vec<TraceSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Validation("trace has no samples".into()));
        }
        for s in &samples {
            if !(s.time.is_finite() && s.x.is_finite() && s.y.is_finite()) || s.time < 0.0 {
                return Err(Error::Validation(format!(
                    "non-finite or negative value in sample for node {} at t={}",
                    s.node, s.time
                )));
            }
        }
        samples.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.node.cmp(&b.node)));
        for w in samples.windows(2) {
            if w[0].time == w[1].time && w[0].node == w[1].node {
                return Err(Error::Validation(format!(
                    "duplicate sample for node {} at t={}",
                    w[0].node, w[0].time
                )));
            }
        }
        let node_count = samples.iter().map(|s| s.node as usize + 1).max().unwrap_or(0);
        let mut tracks = vec![Vec::new(); node_count];
        for s in &samples {
            tracks[s.node as usize].push((s.time, s.x, s.y));
        }
        for (node, track) in tracks.iter().enumerate() {
            if track.first().map(|p| p.0) != Some(0.0) {
                return Err(Error::Validation(format!("node {node} has no sample at t=0")));
            }
        }
        let duration = samples.last().map(|s| s.time).unwrap_or(0.0);
        Ok(Self {
            samples,
            duration,
            tracks,
        })
    }

    pub fn node_count(&self) -> usize {
        self.tracks.len()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    /// Position of `node` at time `t`, linearly interpolated between the
    /// bracketing samples and held after the node's last sample.
    pub fn position_at(&self, node: NodeId, t: f64) -> Result<(f64, f64)> {
        let track = self.tracks.get(node as usize).ok_or(Error::UnknownNode(node))?;
        Ok(interpolate(track, t))
    }

    /// Positions of every node at time `t`, indexed by node id.
    pub fn positions_at(&self, t: f64, out: &mut Vec<(f64, f64)>) {
        out.clear();
        out.extend(self.tracks.iter().map(|track| interpolate(track, t)));
    }

    /// Checks that all coordinates lie inside `[0, width] x [0, height]`.
    pub fn check_bounds(&self, width: f64, height: f64) -> Result<()> {
        match self
            .samples
            .iter()
            .find(|s| s.x < 0.0 || s.y < 0.0 || s.x > width || s.y > height)
        {
            Some(s) => Err(Error::Validation(format!(
                "node {} at t={} lies outside the {width}x{height} area",
                s.node, s.time
            ))),
            None => Ok(()),
        }
    }

    /// Serializes to the `time_s,node_id,x_m,y_m` CSV format with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s,node_id,x_m,y_m\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", s.time, s.node, s.x, s.y);
        }
        out
    }
}

fn interpolate(track: &[(f64, f64, f64)], t: f64) -> (f64, f64) {
    let idx = track.partition_point(|p| p.0 <= t);
    if idx == 0 {
        let p = track[0];
        return (p.1, p.2);
    }
    let a = track[idx - 1];
    if idx == track.len() || a.0 == t {
        return (a.1, a.2);
    }
    let b = track[idx];
    let f = (t - a.0) / (b.0 - a.0);
    (a.1 + f * (b.1 - a.1), a.2 + f * (b.2 - a.2))
}

/// Parses a mobility trace from CSV text (`time_s,node_id,x_m,y_m`, header
/// optional).
pub fn load_trace(text: &str) -> Result<MobilityTrace> {
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if samples.is_empty() && fields.first().is_some_and(|f| f.parse::<f64>().is_err()) {
            // header row
            continue;
        }
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let num = |idx: usize, what: &str| -> Result<f64> {
            fields[idx].parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid {what} '{}'", fields[idx]),
            })
        };
        let node = fields[1].parse::<NodeId>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid node_id '{}'", fields[1]),
        })?;
        samples.push(TraceSample {
            time: num(0, "time_s")?,
            node,
            x: num(2, "x_m")?,
            y: num(3, "y_m")?,
        });
    }
    MobilityTrace::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_point_trace() -> MobilityTrace {
        load_trace("0,0,0,0\n10,0,100,0\n").unwrap()
    }

    #[test]
    fn minimal_file_loads() {
        let t = load_trace("0,0,10,20\n0,1,50,60\n").unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.duration(), 0.0);
        assert_eq!(t.position_at(1, 0.0).unwrap(), (50.0, 60.0));
    }

    #[test]
    fn header_and_unsorted_rows() {
        let t = load_trace("time_s,node_id,x_m,y_m\n5,0,1,1\n0,1,2,2\n0,0,0,0\n").unwrap();
        assert_eq!(t.samples()[0].node, 0);
        assert_eq!(t.samples()[2].time, 5.0);
    }

    #[test]
    fn duplicate_sample_rejected() {
        let err = load_trace("0,0,1,1\n0,0,2,2\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn missing_time_zero_rejected() {
        let err = load_trace("0,0,1,1\n1,1,2,2\n").unwrap_err();
        assert!(err.to_string().contains("node 1"), "{err}");
    }

    #[test]
    fn malformed_row_reports_line() {
        match load_trace("0,0,1,1\n1,0,abc,2\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
        match load_trace("0,0,1\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn twenty_nodes_one_second_sampling() {
        let mut text = String::new();
        for t in 0..=180 {
            for n in 0..20 {
                text.push_str(&format!("{t},{n},{},{}\n", n * 10, t));
            }
        }
        let trace = load_trace(&text).unwrap();
        assert_eq!(trace.samples().len(), 20 * 181);
        assert_eq!(trace.duration(), 180.0);
    }

    #[test]
    fn interpolation_rules() {
        let t = two_point_trace();
        assert_eq!(t.position_at(0, 0.0).unwrap(), (0.0, 0.0));
        assert_eq!(t.position_at(0, 10.0).unwrap(), (100.0, 0.0));
        assert_eq!(t.position_at(0, 4.0).unwrap(), (40.0, 0.0));
        assert_eq!(t.position_at(0, 25.0).unwrap(), (100.0, 0.0));
        assert!(matches!(t.position_at(3, 1.0), Err(Error::UnknownNode(3))));
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in proptest::collection::vec((0u32..5, 0.0f64..1000.0, 0.0f64..1000.0), 1..40)) {
            let mut samples: Vec<TraceSample> = (0..5).map(|n| TraceSample { time: 0.0, node: n, x: 1.0, y: 2.0 }).collect();
            for (i, (node, x, y)) in rows.into_iter().enumerate() {
                samples.push(TraceSample { time: 1.0 + i as f64 * 0.37, node, x, y });
            }
            let trace = MobilityTrace::new(samples).unwrap();
            let back = load_trace(&trace.to_csv()).unwrap();
            prop_assert_eq!(trace, back);
        }
    }
}
