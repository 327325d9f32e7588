//! Rectangular density-grid evaluation for contour data export (bivariate
//! configurations). Rows of constant x are evaluated independently, so the
//! grid fans out across the rayon pool when the `parallel` feature is on;
//! both lanes produce identical values and identical CSV bytes.

use crate::error::{Error, Result};
use crate::exec;
use crate::modulation::SecDensity;

/// An inclusive evaluation rectangle with node counts per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidParameter(
                "grid requires finite bounds with x_min < x_max and y_min < y_max".into(),
            ));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidParameter(
                "grid requires nx >= 2 and ny >= 2".into(),
            ));
        }
        Ok(GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        })
    }

    /// Parses the CLI form `xmin,xmax,ymin,ymax,nx,ny`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(Error::Parse(format!(
                "grid spec needs 6 comma-separated fields, got {}",
                parts.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            parts[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("grid field {}: not a number", i + 1)))
        };
        let count = |i: usize| -> Result<usize> {
            parts[i]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("grid field {}: not a count", i + 1)))
        };
        GridSpec::new(num(0)?, num(1)?, num(2)?, num(3)?, count(4)?, count(5)?)
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        linspace(self.y_min, self.y_max, self.ny)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

/// Density values over the grid in row-major, y-inner order:
/// `values[ix * ny + iy] = f(xs[ix], ys[iy])`.
pub fn density_grid(s: &SecDensity, grid: &GridSpec) -> Result<Vec<f64>> {
    density_grid_with(s, grid, false)
}

/// Sequential reference lane of [`density_grid`]; identical output.
pub fn density_grid_seq(s: &SecDensity, grid: &GridSpec) -> Result<Vec<f64>> {
    density_grid_with(s, grid, true)
}

fn density_grid_with(s: &SecDensity, grid: &GridSpec, force_seq: bool) -> Result<Vec<f64>> {
    if s.baseline().dim() != 2 {
        return Err(Error::UnsupportedCase("density grids require d = 2".into()));
    }
    let xs = grid.xs();
    let ys = grid.ys();
    let row = |ix: usize| -> Vec<f64> {
        let x = xs[ix];
        ys.iter()
            .map(|&y| s.density(&[x], &[y]).expect("dims fixed"))
            .collect()
    };
    let rows = if force_seq {
        exec::map_indexed_seq(grid.nx, row)
    } else {
        exec::map_indexed(grid.nx, row)
    };
    Ok(rows.concat())
}

/// CSV export with a provenance comment header, `x,y,density` column names,
/// and one `x,y,f` row per node in the same order as [`density_grid`].
pub fn density_grid_csv(s: &SecDensity, grid: &GridSpec, values: &[f64]) -> String {
    let xs = grid.xs();
    let ys = grid.ys();
    let mut out = String::with_capacity(values.len() * 24);
    out.push_str(&format!(
        "# secdist v{} density-grid params={} grid={},{},{},{},{},{}\n",
        env!("CARGO_PKG_VERSION"),
        s.label(),
        grid.x_min,
        grid.x_max,
        grid.y_min,
        grid.y_max,
        grid.nx,
        grid.ny
    ));
    out.push_str("x,y,density\n");
    for (ix, &x) in xs.iter().enumerate() {
        for (iy, &y) in ys.iter().enumerate() {
            out.push_str(&format!("{x},{y},{}\n", values[ix * grid.ny + iy]));
        }
    }
    out
}
