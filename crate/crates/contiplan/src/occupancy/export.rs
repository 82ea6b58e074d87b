//! Debug grid export: run-length-encoded binary plus a JSON sidecar.

use super::grid::OccupancyGrid;
use super::OccupancyError;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 8] = b"CPGRID01";

#[derive(Serialize, Deserialize)]
struct GridSidecar {
    origin: [f64; 3],
    voxel_size: f64,
    dims: [usize; 3],
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Write `<path>` (RLE binary) and `<path>.json` (origin, voxel size, dims).
pub fn export_grid(grid: &OccupancyGrid, path: &Path) -> Result<(), OccupancyError> {
    let io_err = |e: std::io::Error| OccupancyError::Io(format!("{}: {e}", path.display()));
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(MAGIC).map_err(io_err)?;
    let cells = grid.cells();
    let first = cells.first().copied().unwrap_or(false);
    file.write_u8(first as u8).map_err(io_err)?;
    let mut runs: Vec<u32> = Vec::new();
    let mut current = first;
    let mut run = 0u32;
    for &c in cells {
        if c == current {
            run += 1;
        } else {
            runs.push(run);
            current = c;
            run = 1;
        }
    }
    runs.push(run);
    file.write_u32::<LittleEndian>(runs.len() as u32).map_err(io_err)?;
    for r in &runs {
        file.write_u32::<LittleEndian>(*r).map_err(io_err)?;
    }
    let sidecar = GridSidecar {
        origin: [grid.origin().x, grid.origin().y, grid.origin().z],
        voxel_size: grid.voxel_size(),
        dims: grid.dims(),
    };
    let sc_path = sidecar_path(path);
    std::fs::write(&sc_path, serde_json::to_string_pretty(&sidecar).unwrap())
        .map_err(|e| OccupancyError::Io(format!("{}: {e}", sc_path.display())))?;
    Ok(())
}

/// Load a grid written by [`export_grid`].
pub fn import_grid(path: &Path) -> Result<OccupancyGrid, OccupancyError> {
    let io_err = |e: std::io::Error| OccupancyError::Io(format!("{}: {e}", path.display()));
    let sc_path = sidecar_path(path);
    let sidecar: GridSidecar = serde_json::from_str(
        &std::fs::read_to_string(&sc_path)
            .map_err(|e| OccupancyError::Io(format!("{}: {e}", sc_path.display())))?,
    )
    .map_err(|e| OccupancyError::GridFormat(format!("{}: {e}", sc_path.display())))?;

    let mut file = std::fs::File::open(path).map_err(io_err)?;
    let mut magic = [0u8; 8];
    file.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(OccupancyError::GridFormat(format!(
            "{}: bad magic header",
            path.display()
        )));
    }
    let first = file.read_u8().map_err(io_err)? != 0;
    let n_runs = file.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let total = sidecar.dims[0] * sidecar.dims[1] * sidecar.dims[2];
    let mut cells = Vec::with_capacity(total);
    let mut value = first;
    for _ in 0..n_runs {
        let run = file.read_u32::<LittleEndian>().map_err(io_err)? as usize;
        cells.extend(std::iter::repeat_n(value, run));
        value = !value;
    }
    if cells.len() != total {
        return Err(OccupancyError::GridFormat(format!(
            "{}: run lengths sum to {} but dims give {total}",
            path.display(),
            cells.len()
        )));
    }
    OccupancyGrid::from_parts(
        Vector3::from_column_slice(&sidecar.origin),
        sidecar.voxel_size,
        sidecar.dims,
        cells,
    )
}
