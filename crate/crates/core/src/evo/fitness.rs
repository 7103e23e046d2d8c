use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::sim::SimMetrics;
use serde::{Deserialize, Serialize};

/// Reference values and weights of the fitness function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessContext<T = f64> {
    /// Energy of the RFC configuration, millijoules.
    pub e_rfc: T,
    /// PDR of the RFC configuration, percent.
    pub pdr_rfc: T,
    pub w1: T,
    pub w2: T,
    pub delta: T,
    pub pdr_max: T,
    /// Fraction of `pdr_rfc` below which a solution is penalized.
    pub admission: T,
}

impl<T: Scalar> FitnessContext<T> {
    pub fn new(e_rfc: T, pdr_rfc: T) -> Result<Self> {
        let ctx = Self {
            e_rfc,
            pdr_rfc,
            w1: T::lit(0.9),
            w2: T::lit(-0.1),
            delta: T::lit(0.1),
            pdr_max: T::lit(100.0),
            admission: T::lit(0.85),
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_rfc > T::zero()) || !self.e_rfc.is_finite() {
            return Err(Error::Validation(format!(
                "reference energy must be positive, got {}",
                self.e_rfc
            )));
        }
        if !(self.pdr_rfc > T::zero() && self.pdr_rfc <= T::lit(100.0)) {
            return Err(Error::Validation(format!(
                "reference PDR must be in (0, 100], got {}",
                self.pdr_rfc
            )));
        }
        if (self.w1 + self.w2.abs() - T::one()).abs() > T::lit(1e-6) {
            return Err(Error::Validation("weights must satisfy w1 + |w2| = 1".into()));
        }
        Ok(())
    }

    /// Lowest PDR accepted without penalty.
    pub fn pdr_floor(&self) -> T {
        self.admission * self.pdr_rfc
    }
}

/// Weighted fitness; lower is better.
pub fn fitness<T: Scalar>(energy: T, pdr: T, ctx: &FitnessContext<T>) -> T {
    ctx.delta + (ctx.w1 * energy / ctx.e_rfc + ctx.w2 * pdr / ctx.pdr_max)
}

/// Fitness plus the penalty applied below the admitted PDR.
pub fn penalized_fitness<T: Scalar>(energy: T, pdr: T, ctx: &FitnessContext<T>) -> T {
    fitness(energy, pdr, ctx) + ctx.admission * (ctx.pdr_rfc - pdr) / ctx.pdr_rfc * energy / ctx.e_rfc
}

/// Outcome of evaluating one individual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    pub f: f64,
    /// Fitness before any penalty.
    pub f_raw: f64,
    pub penalized: bool,
    /// Millijoules.
    pub energy: f64,
    /// Percent.
    pub pdr: f64,
    #[serde(skip)]
    pub metrics: Option<SimMetrics>,
}

/// Assigned to individuals whose evaluation failed.
pub const WORST_FITNESS: f64 = f64::INFINITY;

impl FitnessRecord {
    pub fn score(energy: f64, pdr: f64, ctx: &FitnessContext<f64>) -> Self {
        let f_raw = fitness(energy, pdr, ctx);
        let penalized = pdr < ctx.pdr_floor();
        let f = if penalized {
            penalized_fitness(energy, pdr, ctx)
        } else {
            f_raw
        };
        Self {
            f,
            f_raw,
            penalized,
            energy,
            pdr,
            metrics: None,
        }
    }

    /// Scores a simulation result. Runs without data traffic count as 0 % PDR.
    pub fn from_metrics(metrics: SimMetrics, ctx: &FitnessContext<f64>) -> Self {
        let mut rec = Self::score(metrics.e_total(), metrics.pdr.unwrap_or(0.0), ctx);
        rec.metrics = Some(metrics);
        rec
    }

    /// Record for an objective that is not simulation-backed.
    pub fn plain(f: f64) -> Self {
        Self {
            f,
            f_raw: f,
            penalized: false,
            energy: f64::NAN,
            pdr: f64::NAN,
            metrics: None,
        }
    }

    pub fn failed() -> Self {
        Self {
            f: WORST_FITNESS,
            f_raw: WORST_FITNESS,
            penalized: true,
            energy: f64::NAN,
            pdr: f64::NAN,
            metrics: None,
        }
    }

    pub fn is_failed(&self) -> bool {
        !self.f.is_finite()
    }
}
