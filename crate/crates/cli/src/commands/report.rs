use std::fs::File;
use std::path::Path;

use gemination_core::gemination::{read_tokens_csv, GeminationError};
use gemination_core::stats::{build_report, render_json, render_text, series_csv};

use super::write_file;
use crate::{CliError, RunConfig, Status};

/// Builds the report from a token table and writes `report.txt`,
/// `report.json` and the plot-data CSVs under `out_dir`.
pub fn report(tokens_csv: &Path, out_dir: &Path, config: &RunConfig) -> Result<Status, CliError> {
    let file = File::open(tokens_csv).map_err(|e| CliError::io(tokens_csv, e))?;
    let rows = read_tokens_csv(file, config.ratio_threshold).map_err(|e| match e {
        GeminationError::Io(m) => CliError::io(tokens_csv, m),
        other => CliError::Data(format!("{}: {other}", tokens_csv.display())),
    })?;
    let tokens: Vec<_> = rows.iter().filter_map(|r| r.token().cloned()).collect();
    let failed = rows.len() - tokens.len();

    let mut report = build_report(&tokens, &config.report());
    if failed > 0 {
        report.notes.push(format!("{failed} row(s) with measurement errors are left out."));
    }
    let text = render_text(&report);
    write_file(&out_dir.join("report.txt"), &text)?;
    write_file(&out_dir.join("report.json"), render_json(&report))?;
    for (name, contents) in series_csv(&report) {
        write_file(&out_dir.join(name), contents)?;
    }
    print!("{text}");
    Ok(Status::Clean)
}
