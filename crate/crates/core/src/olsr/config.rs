use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The eight tunable OLSR parameters. Times are in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlsrConfig {
    pub hello_interval: f64,
    pub refresh_interval: f64,
    pub tc_interval: f64,
    pub willingness: u8,
    pub neighb_hold_time: f64,
    pub top_hold_time: f64,
    pub mid_hold_time: f64,
    pub dup_hold_time: f64,
}

pub const WILL_NEVER: u8 = 0;
pub const WILL_DEFAULT: u8 = 3;
pub const WILL_ALWAYS: u8 = 7;

impl OlsrConfig {
    /// Energy-aware configuration found by the 24-thread parallel GA on the
    /// medium urban scenario.
    pub const ENERGY_AWARE: OlsrConfig = OlsrConfig {
        hello_interval: 14.890,
        refresh_interval: 7.416,
        tc_interval: 28.158,
        willingness: 5,
        neighb_hold_time: 20.825,
        top_hold_time: 70.959,
        mid_hold_time: 10.814,
        dup_hold_time: 90.000,
    };

    pub fn validate(&self) -> Result<()> {
        let space = ParamSpace::standard();
        for (i, (value, gene)) in encode_genome(self).iter().zip(space.genes.iter()).enumerate() {
            if !value.is_finite() || *value < gene.min || *value > gene.max {
                return Err(Error::Validation(format!(
                    "{} = {value} outside [{}, {}] (gene {i})",
                    gene.name, gene.min, gene.max
                )));
            }
        }
        Ok(())
    }
}

/// Default parameter values of RFC 3626; hold times are three times the
/// corresponding emission interval.
pub fn rfc_default() -> OlsrConfig {
    OlsrConfig {
        hello_interval: 2.0,
        refresh_interval: 2.0,
        tc_interval: 5.0,
        willingness: WILL_DEFAULT,
        neighb_hold_time: 3.0 * 2.0,
        top_hold_time: 3.0 * 5.0,
        mid_hold_time: 3.0 * 5.0,
        dup_hold_time: 30.0,
    }
}

/// Period between HELLO emissions. Every link must be re-advertised within
/// `refresh_interval`, and HELLOs carry the full link set, so the shorter of the
/// two intervals governs.
pub fn hello_emission_interval(config: &OlsrConfig) -> f64 {
    config.hello_interval.min(config.refresh_interval)
}

/// Gene positions in the encoded vector.
pub mod gene {
    pub const HELLO: usize = 0;
    pub const REFRESH: usize = 1;
    pub const TC: usize = 2;
    pub const WILLINGNESS: usize = 3;
    pub const NEIGHB_HOLD: usize = 4;
    pub const MID_HOLD: usize = 5;
    pub const TOP_HOLD: usize = 6;
    pub const DUP_HOLD: usize = 7;
    pub const COUNT: usize = 8;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneSpec {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub rfc: f64,
    pub integer: bool,
}

impl GeneSpec {
    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    /// Clamps into bounds, rounding integer genes.
    pub fn repair(&self, v: f64) -> f64 {
        let v = if self.integer { v.round() } else { v };
        v.clamp(self.min, self.max)
    }
}

/// Bounds and RFC defaults of the eight genes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    pub genes: [GeneSpec; gene::COUNT],
}

impl ParamSpace {
    pub fn standard() -> Self {
        let g = |name, min, max, rfc| GeneSpec {
            name,
            min,
            max,
            rfc,
            integer: false,
        };
        Self {
            genes: [
                g("hello_interval", 2.0, 15.0, 2.0),
                g("refresh_interval", 2.0, 15.0, 2.0),
                g("tc_interval", 4.0, 35.0, 5.0),
                GeneSpec {
                    name: "willingness",
                    min: 0.0,
                    max: 7.0,
                    rfc: 3.0,
                    integer: true,
                },
                g("neighb_hold_time", 5.5, 45.0, 6.0),
                g("mid_hold_time", 10.5, 90.0, 15.0),
                g("top_hold_time", 10.5, 90.0, 15.0),
                g("dup_hold_time", 10.5, 90.0, 30.0),
            ],
        }
    }

    pub fn rfc_genes(&self) -> Vec<f64> {
        self.genes.iter().map(|g| g.rfc).collect()
    }

    /// Clamps every gene into range and rounds the integer gene.
    pub fn repair(&self, genes: &mut [f64]) {
        for (v, spec) in genes.iter_mut().zip(self.genes.iter()) {
            *v = spec.repair(*v);
        }
    }

    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == gene::COUNT
            && genes
                .iter()
                .zip(self.genes.iter())
                .all(|(&v, s)| v.is_finite() && v >= s.min && v <= s.max && (!s.integer || v.fract() == 0.0))
    }
}

impl Default for ParamSpace {
    fn default() -> Self {
        Self::standard()
    }
}

/// Decodes a gene vector ordered (hello, refresh, tc, willingness,
/// neighb_hold, mid_hold, top_hold, dup_hold).
pub fn decode_genome(genes: &[f64], space: &ParamSpace) -> Result<OlsrConfig> {
    if genes.len() != gene::COUNT {
        return Err(Error::Validation(format!(
            "genome has {} genes, expected 8",
            genes.len()
        )));
    }
    if let Some(i) = genes.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("gene {i} is not finite")));
    }
    let v = |i: usize| space.genes[i].repair(genes[i]);
    Ok(OlsrConfig {
        hello_interval: v(gene::HELLO),
        refresh_interval: v(gene::REFRESH),
        tc_interval: v(gene::TC),
        willingness: v(gene::WILLINGNESS) as u8,
        neighb_hold_time: v(gene::NEIGHB_HOLD),
        top_hold_time: v(gene::TOP_HOLD),
        mid_hold_time: v(gene::MID_HOLD),
        dup_hold_time: v(gene::DUP_HOLD),
    })
}

pub fn encode_genome(config: &OlsrConfig) -> [f64; gene::COUNT] {
    [
        config.hello_interval,
        config.refresh_interval,
        config.tc_interval,
        f64::from(config.willingness),
        config.neighb_hold_time,
        config.mid_hold_time,
        config.top_hold_time,
        config.dup_hold_time,
    ]
}
