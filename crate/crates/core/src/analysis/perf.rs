use crate::error::{Error, Result};
use crate::num::Scalar;
use serde::{Deserialize, Serialize};

/// Relative energy saving against the reference; positive means savings.
pub fn gap_energy<T: Scalar>(energy: T, e_rfc: T) -> T {
    (e_rfc - energy) / e_rfc
}

/// PDR loss against the reference in absolute percentage points over 100;
/// positive means loss.
pub fn gap_pdr<T: Scalar>(pdr: T, pdr_rfc: T) -> T {
    (pdr_rfc - pdr) / T::lit(100.0)
}

pub fn speedup<T: Scalar>(mean_t1: T, mean_tm: T) -> T {
    mean_t1 / mean_tm
}

pub fn efficiency<T: Scalar>(s_m: T, m: usize) -> T {
    s_m / T::from_count(m)
}

/// Mean wall time per worker count and the derived speedup and efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub worker_counts: Vec<usize>,
    pub mean_times: Vec<f64>,
    pub speedups: Vec<f64>,
    pub efficiencies: Vec<f64>,
    pub repetitions: usize,
}

#[derive(Debug, Serialize)]
struct BenchRow {
    m: usize,
    mean_time_s: f64,
    speedup: f64,
    efficiency: f64,
}

impl BenchResult {
    /// Builds the result from raw timings per worker count. One of the counts
    /// must be 1; it is the baseline.
    pub fn from_timings(timings: &[(usize, Vec<f64>)]) -> Result<Self> {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        if timings
            .iter()
            .any(|(m, t)| *m == 0 || t.is_empty() || t.iter().any(|x| !(*x > 0.0)))
        {
            return Err(Error::Validation("every worker count needs positive timings".into()));
        }
        let t1 = timings
            .iter()
            .find(|(m, _)| *m == 1)
            .map(|(_, t)| mean(t))
            .ok_or_else(|| Error::Validation("timings for one worker are required as baseline".into()))?;
        let mut r = Self {
            worker_counts: Vec::new(),
            mean_times: Vec::new(),
            speedups: Vec::new(),
            efficiencies: Vec::new(),
            repetitions: timings.iter().map(|(_, t)| t.len()).min().unwrap_or(0),
        };
        for (m, t) in timings {
            let tm = mean(t);
            let s = speedup(t1, tm);
            r.worker_counts.push(*m);
            r.mean_times.push(tm);
            r.speedups.push(s);
            r.efficiencies.push(efficiency(s, *m));
        }
        Ok(r)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for i in 0..self.worker_counts.len() {
            w.serialize(BenchRow {
                m: self.worker_counts[i],
                mean_time_s: self.mean_times[i],
                speedup: self.speedups[i],
                efficiency: self.efficiencies[i],
            })
            .map_err(crate::sim::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn table_values() {
        assert_abs_diff_eq!(gap_energy(6305.58, 9104.19), 0.3074, epsilon = 1e-4);
        assert_abs_diff_eq!(gap_pdr(75.14, 87.12), 0.1198, epsilon = 1e-4);
        assert_abs_diff_eq!(speedup(64459.6, 11113.73), 5.80, epsilon = 0.01);
        assert_abs_diff_eq!(efficiency(19.10, 24), 0.7958, epsilon = 5e-4);
        assert_abs_diff_eq!(efficiency(11.81f32, 16), 0.738, epsilon = 1e-3);
    }

    #[test]
    fn bench_baseline() {
        let r = BenchResult::from_timings(&[(1, vec![4.0, 6.0]), (8, vec![1.0, 1.0])]).unwrap();
        assert_eq!(r.speedups, vec![1.0, 5.0]);
        assert_eq!(r.efficiencies, vec![1.0, 0.625]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("m,mean_time_s,speedup,efficiency\n1,5.0,1.0,1.0\n"));
        assert!(BenchResult::from_timings(&[(2, vec![1.0])]).is_err());
    }

    proptest! {
        #[test]
        fn identities(e in 0.0f64..1e5, e_rfc in 1.0f64..1e5, t in 0.001f64..1e4, m in 1usize..64) {
            prop_assert!((gap_energy(e, e_rfc) + e / e_rfc - 1.0).abs() < 1e-9);
            prop_assert!((efficiency(speedup(t * m as f64, t), m) - 1.0).abs() < 1e-12);
        }
    }
}
