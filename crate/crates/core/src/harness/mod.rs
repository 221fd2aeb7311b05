// SPDX-License-Identifier: Apache-2.0

//! FG vs. MVG experiments: configuration, execution, statistics, persistence
//! and replay.

mod config;
mod experiment;
mod export;
mod record;
mod summary;

pub use config::{
    apply_override, default_test, default_training, Aggregation, CircuitSection, ExperimentConfig,
    GaSection, GoalsSection, RunSection, ScheduleSection, Seeds, ThresholdSection,
};
pub use experiment::{prepare, replay, run_experiment, Prepared};
pub use export::{
    export_summary, histogram_csv, histogram_file, read_records, summary_csv, write_records,
    Metadata, RecordWriter, RECORDS_FILE, SUMMARY_FILE, SUMMARY_HEADER,
};
pub use record::RunRecord;
pub use summary::{
    flexibility_report, summarize, CostSummary, FlexibilityReport, RatioEstimate,
    ScenarioFlexibility, ScenarioSummary, SummaryStats, BOOTSTRAP_RESAMPLES,
};
