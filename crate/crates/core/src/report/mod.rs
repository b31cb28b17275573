//! Output formatting shared by the verification harness and the CLI.

mod format;
mod table;

pub use format::{format_extended_real, format_real, SIGNIFICANT_DIGITS};
pub use table::{render_csv, render_table, Table};
