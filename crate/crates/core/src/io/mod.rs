//! CSV ingestion and result documents.

mod csv;
mod report;

pub use self::csv::{parse_csv, write_csv, CountKind};
pub use report::{write_asymcov, write_fit, write_study};
