//! Gap metrics, parallel performance figures, rank-based tests and the
//! validation report.

mod perf;
mod ranks;
mod report;

pub use perf::{efficiency, gap_energy, gap_pdr, speedup, BenchResult};
pub use ranks::{
    average_ranks, friedman_ranks, kruskal_wallis, ks_normality, wilcoxon_signed_rank, RankDetails, RankTest,
    RankTestResult,
};
pub use report::{
    compare_against_reference, validation_report, Comparison, ReportRow, ReportSection, ValidationReport,
    REPORT_COLUMNS,
};
