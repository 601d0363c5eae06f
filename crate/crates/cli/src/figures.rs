use std::path::{Path, PathBuf};

use attenuant_core::schemes::{self, FigureGrid, FigureId};

use crate::error::CliError;
use crate::output::fmt12;

pub fn write_figure(id: FigureId, grid: &FigureGrid, dir: &Path) -> Result<PathBuf, CliError> {
    let rows = schemes::figure_data(id, grid)?;
    let path = dir.join(format!("{}.csv", id.name()));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["curve", "x", "y"])?;
    for r in rows {
        w.write_record([r.curve, fmt12(r.x), fmt12(r.y)])?;
    }
    w.flush()?;
    Ok(path)
}
