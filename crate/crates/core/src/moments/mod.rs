//! Fourth moments of `X_0 + X_1` and `gamma(X_0) + X_1`, the series `S(q)`,
//! and the sweep over `q`.

mod partitions;
mod theorem;

pub use partitions::{moment_pair_partitions, pair_partition_polynomial, MAX_ORDER};
pub use theorem::{
    m4_gamma_analytic, m4_gamma_operator, m4_sum_analytic, m4_sum_operator, report_from, s_of_q, sweep,
    theorem_check, theorem_check_with, uniform_grid, GammaOperatorReport, Method, MomentReport,
    PipelineConfig, SweepRow, TheoremDiagnostics, Verdict,
};
