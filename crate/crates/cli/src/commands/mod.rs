mod analyze;
mod report;
mod synth;
mod validate;

use std::path::Path;

pub use analyze::{analyze, analyze_rows};
pub use report::report;
pub use synth::synth;
pub use validate::{validate, validate_pair};

use crate::CliError;

/// Writes `contents` to `path`, creating parent directories.
pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
