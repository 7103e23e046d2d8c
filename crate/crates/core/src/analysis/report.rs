//! Validation of configurations across scenarios.

use super::perf::{gap_energy, gap_pdr};
use crate::error::{Error, Result};
use crate::evo::parallel_map;
use crate::olsr::{rfc_default, OlsrConfig};
use crate::scenario::{Scenario, ScenarioClass};
use crate::sim::{run_simulation, MetricsRow, NicProfile, SimMetrics};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// A configuration and its metrics next to the RFC reference on the same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub candidate: SimMetrics,
    pub reference: SimMetrics,
    pub gap_energy: f64,
    /// Absent when either run had no data traffic.
    pub gap_pdr: Option<f64>,
}

pub fn compare_against_reference(
    scenario: &Scenario,
    config: &OlsrConfig,
    nic: &NicProfile<f64>,
    seed: u64,
) -> Result<Comparison> {
    let candidate = run_simulation(scenario, config, nic, seed)?;
    let reference = run_simulation(scenario, &rfc_default(), nic, seed)?;
    let gap_e = gap_energy(candidate.e_total(), reference.e_total());
    let gap_p = candidate.pdr.zip(reference.pdr).map(|(p, r)| gap_pdr(p, r));
    Ok(Comparison {
        candidate,
        reference,
        gap_energy: gap_e,
        gap_pdr: gap_p,
    })
}

/// Column order of the report.
pub const REPORT_COLUMNS: [&str; 8] = ["e_sent", "e_recv", "e_total", "e_tot_x_v", "pdr", "e2ed", "nrl", "hops"];

/// Averages of one configuration within one section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub config: String,
    /// `e_sent, e_recv, e_total, e_tot_x_v, pdr, e2ed, nrl, hops`; a value is
    /// absent when no run produced it.
    pub values: [Option<f64>; 8],
    pub runs: usize,
    /// Per column, whether this row holds the section's best value.
    pub best: [bool; 8],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSection {
    /// Scenario class label, or "overall".
    pub label: String,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub sections: Vec<ReportSection>,
    /// Every successful run.
    pub runs: Vec<MetricsRow>,
    /// Runs that failed, as `(config, scenario, seed, error)`.
    pub failures: Vec<(String, String, u64, String)>,
}

fn metric_values(m: &SimMetrics) -> [Option<f64>; 8] {
    [
        Some(m.energy.e_sent),
        Some(m.energy.e_recv),
        Some(m.energy.e_total()),
        Some(m.energy.e_total_per_vehicle()),
        m.pdr,
        m.e2ed_ms,
        m.nrl,
        m.hops,
    ]
}

const PDR_COLUMN: usize = 4;

/// Simulates every (config, scenario, seed) combination on `workers` threads
/// and averages the metrics per configuration, per scenario class and overall.
pub fn validation_report(
    configs: &[(String, OlsrConfig)],
    scenarios: &[Scenario],
    nic: &NicProfile<f64>,
    seeds: &[u64],
    workers: usize,
) -> Result<ValidationReport> {
    if configs.is_empty() || scenarios.is_empty() || seeds.is_empty() {
        return Err(Error::Validation(
            "validation needs at least one config, scenario and seed".into(),
        ));
    }
    let cells: Vec<(usize, usize, u64)> = (0..configs.len())
        .flat_map(|c| (0..scenarios.len()).flat_map(move |s| seeds.iter().map(move |&seed| (c, s, seed))))
        .collect();
    let results = parallel_map(cells.len(), workers, |i| {
        let (c, s, seed) = cells[i];
        run_simulation(&scenarios[s], &configs[c].1, nic, seed)
    });

    let mut classes: Vec<ScenarioClass> = scenarios.iter().map(Scenario::class).collect();
    classes.sort();
    classes.dedup();
    let mut groups: Vec<(String, Option<ScenarioClass>)> =
        classes.iter().map(|c| (c.label().to_string(), Some(*c))).collect();
    groups.push(("overall".to_string(), None));

    let mut report = ValidationReport {
        sections: Vec::new(),
        runs: Vec::new(),
        failures: Vec::new(),
    };
    // sums[group][config][column] = (sum, count)
    let mut sums = vec![vec![[(0.0, 0usize); 8]; configs.len()]; groups.len()];
    let mut runs = vec![vec![0usize; configs.len()]; groups.len()];
    for (&(c, s, seed), result) in cells.iter().zip(results) {
        let scenario = &scenarios[s];
        match result {
            Ok(m) => {
                let values = metric_values(&m);
                for (g, (_, class)) in groups.iter().enumerate() {
                    if class.is_some_and(|k| k != scenario.class()) {
                        continue;
                    }
                    runs[g][c] += 1;
                    for (acc, v) in sums[g][c].iter_mut().zip(values) {
                        if let Some(v) = v {
                            acc.0 += v;
                            acc.1 += 1;
                        }
                    }
                }
                report.runs.push(m.row(&scenario.name, &configs[c].0, seed));
            }
            Err(e) => {
                log::warn!("run {} on {} (seed {seed}) failed: {e}", configs[c].0, scenario.name);
                report
                    .failures
                    .push((configs[c].0.clone(), scenario.name.clone(), seed, e.to_string()));
            }
        }
    }

    for (g, (label, _)) in groups.iter().enumerate() {
        let mut rows: Vec<ReportRow> = configs
            .iter()
            .enumerate()
            .map(|(c, (name, _))| ReportRow {
                config: name.clone(),
                values: sums[g][c].map(|(sum, n)| (n > 0).then(|| sum / n as f64)),
                runs: runs[g][c],
                best: [false; 8],
            })
            .collect();
        mark_best(&mut rows);
        report.sections.push(ReportSection {
            label: label.clone(),
            rows,
        });
    }
    Ok(report)
}

// PDR is the only column where higher is better.
fn mark_best(rows: &mut [ReportRow]) {
    for col in 0..8 {
        let key = |v: f64| if col == PDR_COLUMN { -v } else { v };
        let best = rows
            .iter()
            .filter_map(|r| r.values[col])
            .map(key)
            .fold(f64::INFINITY, f64::min);
        for r in rows.iter_mut() {
            r.best[col] = r.values[col].is_some_and(|v| key(v) == best);
        }
    }
}

impl ValidationReport {
    /// One line per (section, config) with a `best` column listing the columns
    /// where the row is best.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["section", "config", "runs"];
        header.extend(REPORT_COLUMNS);
        header.push("best");
        w.write_record(&header).map_err(crate::sim::csv_err)?;
        for section in &self.sections {
            for row in &section.rows {
                let mut rec = vec![section.label.clone(), row.config.clone(), row.runs.to_string()];
                rec.extend(row.values.iter().map(|v| v.map_or(String::new(), |v| v.to_string())));
                let best: Vec<&str> = REPORT_COLUMNS
                    .iter()
                    .zip(row.best)
                    .filter(|(_, b)| *b)
                    .map(|(c, _)| *c)
                    .collect();
                rec.push(best.join(";"));
                w.write_record(&rec).map_err(crate::sim::csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Aligned plain-text table. Best values carry a trailing `*`; PDR and NRL
    /// are shown as percentages.
    pub fn to_text(&self) -> String {
        let headers = [
            "config", "E_sent", "E_recv", "E_total", "E_totxv", "PDR", "E2ED", "NRL", "hops",
        ];
        let mut lines: Vec<Vec<String>> = Vec::new();
        let mut section_at = Vec::new();
        for section in &self.sections {
            section_at.push((lines.len(), section.label.clone()));
            for row in &section.rows {
                let mut cells = vec![row.config.clone()];
                for (col, v) in row.values.iter().enumerate() {
                    let mut s = match (v, col) {
                        (None, _) => "-".to_string(),
                        (Some(v), 4 | 6) => format!("{v:.2}%"),
                        (Some(v), _) => format!("{v:.2}"),
                    };
                    if row.best[col] {
                        s.push('*');
                    }
                    cells.push(s);
                }
                lines.push(cells);
            }
        }
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for l in &lines {
            for (w, c) in widths.iter_mut().zip(l) {
                *w = (*w).max(c.chars().count());
            }
        }
        let fmt = |cells: &[String]| {
            let mut s = String::new();
            for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
                if i == 0 {
                    let _ = write!(s, "{c:<w$}");
                } else {
                    let _ = write!(s, "  {c:>w$}");
                }
            }
            s.trim_end().to_string()
        };
        let mut out = fmt(&headers.map(String::from));
        out.push('\n');
        let mut next_section = section_at.iter().peekable();
        for (i, l) in lines.iter().enumerate() {
            while let Some((_, label)) = next_section.next_if(|(at, _)| *at == i) {
                out.push_str(label);
                out.push('\n');
            }
            out.push_str(&fmt(l));
            out.push('\n');
        }
        out
    }
}
