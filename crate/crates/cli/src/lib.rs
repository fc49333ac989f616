//! Verification harness for `calib-core`: suite configuration, the shipped
//! suites and their reports.

pub mod config;
pub mod suites;

pub use calib_core::report::{CheckRecord, Report};
pub use config::{ConfigError, SuiteConfig};
pub use suites::{run_suite, SUITES};

/// Exit status when every check passes.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one check fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for configuration and input errors.
pub const EXIT_CONFIG: i32 = 2;

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }

    pub fn render(self, report: &Report) -> String {
        match self {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => report.to_csv(),
        }
    }
}
