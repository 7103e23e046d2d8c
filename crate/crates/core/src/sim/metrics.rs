use super::energy::EnergyLedger;
use serde::{Deserialize, Serialize};

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    /// Delivered over sent data packets, percent. Absent without data traffic.
    pub pdr: Option<f64>,
    /// Mean end-to-end delay of delivered packets, milliseconds.
    pub e2ed_ms: Option<f64>,
    /// Control transmissions per delivered data packet, percent.
    pub nrl: Option<f64>,
    /// Mean hop count of delivered packets.
    pub hops: Option<f64>,
    pub energy: EnergyLedger,
    pub data_sent: u64,
    pub data_delivered: u64,
    pub control_transmissions: u64,
}

impl SimMetrics {
    pub fn e_total(&self) -> f64 {
        self.energy.e_total()
    }

    pub fn row(&self, scenario_id: &str, config_id: &str, seed: u64) -> MetricsRow {
        MetricsRow {
            scenario_id: scenario_id.to_string(),
            config_id: config_id.to_string(),
            seed,
            pdr: self.pdr,
            e2ed_ms: self.e2ed_ms,
            nrl: self.nrl,
            hops: self.hops,
            e_sent_mj: self.energy.e_sent,
            e_recv_mj: self.energy.e_recv,
            e_total_mj: self.energy.e_total(),
            e_total_per_vehicle_mj: self.energy.e_total_per_vehicle(),
            data_sent: self.data_sent,
            data_delivered: self.data_delivered,
            control_tx: self.control_transmissions,
        }
    }
}

/// Flat serialization of [`SimMetrics`], one CSV row or JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario_id: String,
    pub config_id: String,
    pub seed: u64,
    pub pdr: Option<f64>,
    pub e2ed_ms: Option<f64>,
    pub nrl: Option<f64>,
    pub hops: Option<f64>,
    pub e_sent_mj: f64,
    pub e_recv_mj: f64,
    pub e_total_mj: f64,
    pub e_total_per_vehicle_mj: f64,
    pub data_sent: u64,
    pub data_delivered: u64,
    pub control_tx: u64,
}

pub const METRICS_CSV_HEADER: [&str; 14] = [
    "scenario_id",
    "config_id",
    "seed",
    "pdr",
    "e2ed_ms",
    "nrl",
    "hops",
    "e_sent_mj",
    "e_recv_mj",
    "e_total_mj",
    "e_total_per_vehicle_mj",
    "data_sent",
    "data_delivered",
    "control_tx",
];

/// Writes rows as CSV with a header.
pub fn write_metrics_csv<W: std::io::Write>(out: W, rows: &[MetricsRow]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(METRICS_CSV_HEADER).map_err(csv_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_columns() {
        let m = SimMetrics {
            pdr: Some(50.0),
            e2ed_ms: None,
            nrl: Some(200.0),
            hops: Some(1.0),
            energy: EnergyLedger::new(2),
            data_sent: 2,
            data_delivered: 1,
            control_transmissions: 2,
        };
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[m.row("s", "rfc", 7)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), METRICS_CSV_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "s,rfc,7,50.0,,200.0,1.0,0.0,0.0,0.0,0.0,2,1,2");
    }
}
