//! Experiment runner behind the `pccsim` binary: parameter sweeps over the
//! cloning simulator, emitted as CSV or JSON tables.

pub mod args;
pub mod error;
pub mod sweep;
pub mod table;

pub use error::{CliError, Result};
pub use sweep::{run_sweep, Experiment, Mode, StrategyKind, SweepSpec};
pub use table::{emit_table, Destination, Format, ResultTable};

/// Parses arguments, runs the sweep and writes the table.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = args::parse_invocation(args)?;
    let table = run_sweep(&inv.spec)?;
    emit_table(&table, inv.format, &inv.destination)
}
