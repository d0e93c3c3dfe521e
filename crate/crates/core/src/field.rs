//! Radial space-time grids with light-cone support tracking.
//!
//! Fields live on uniform grids r_i = i·Δr, t_n = n·Δt and represent radial
//! functions V(|x|, t) supported in the forward cone {|x| ≤ t + k}. Samples
//! outside the cone are forced to exact zeros, and the spatial extent must
//! cover the cone up to the final time so that nothing leaks off the grid.

use crate::{Error, Result};
use std::io::{BufRead, Write};

/// Samples of a radial function on a rectangular (r, t) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    k: f64,
    dr: f64,
    dt: f64,
    nr: usize,
    nt: usize,
    /// Row-major: values[n * nr + i] = V(r_i, t_n).
    values: Vec<f64>,
}

impl SpaceTimeField {
    /// An all-zero field. `nr`/`nt` are point counts (so the final time is
    /// (nt−1)·Δt) and the grid must satisfy (nr−1)·Δr ≥ (nt−1)·Δt + k.
    pub fn zeros(k: f64, dr: f64, dt: f64, nr: usize, nt: usize) -> Result<Self> {
        if !(k >= 1.0) || !(dr > 0.0) || !(dt > 0.0) || nr < 2 || nt < 1 {
            return Err(Error::InvalidParameter(
                "field needs k >= 1, positive spacings and at least a 2x1 grid".into(),
            ));
        }
        let r_max = dr * (nr - 1) as f64;
        let t_max = dt * (nt - 1) as f64;
        if r_max + 1e-12 < t_max + k {
            return Err(Error::InvalidParameter(format!(
                "grid radius {r_max} does not cover the light cone radius {}",
                t_max + k
            )));
        }
        Ok(SpaceTimeField {
            k,
            dr,
            dt,
            nr,
            nt,
            values: vec![0.0; nr * nt],
        })
    }

    /// Samples `f(r, t)` on the grid, zeroing everything outside the cone.
    pub fn from_fn(
        k: f64,
        dr: f64,
        dt: f64,
        nr: usize,
        nt: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut field = Self::zeros(k, dr, dt, nr, nt)?;
        for n in 0..nt {
            let t = field.t(n);
            for i in 0..nr {
                let r = field.r(i);
                if r <= t + k {
                    field.values[n * nr + i] = f(r, t);
                }
            }
        }
        Ok(field)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn r(&self, i: usize) -> f64 {
        self.dr * i as f64
    }

    pub fn t(&self, n: usize) -> f64 {
        self.dt * n as f64
    }

    /// Final grid time.
    pub fn t_end(&self) -> f64 {
        self.t(self.nt - 1)
    }

    /// Radius of the support cone at time slice n.
    pub fn support_radius(&self, n: usize) -> f64 {
        self.t(n) + self.k
    }

    pub fn value(&self, i: usize, n: usize) -> f64 {
        self.values[n * self.nr + i]
    }

    /// Sets a sample; writes outside the cone are clamped to zero to keep
    /// the support invariant.
    pub fn set_value(&mut self, i: usize, n: usize, v: f64) {
        let inside = self.r(i) <= self.t(n) + self.k;
        self.values[n * self.nr + i] = if inside { v } else { 0.0 };
    }

    pub fn time_slice(&self, n: usize) -> &[f64] {
        &self.values[n * self.nr..(n + 1) * self.nr]
    }

    /// Bilinear interpolation, exactly zero outside the cone or the grid.
    pub fn eval(&self, r: f64, t: f64) -> f64 {
        if r < 0.0 || t < 0.0 || r > t + self.k {
            return 0.0;
        }
        let x = r / self.dr;
        let y = t / self.dt;
        let i0 = (x.floor() as usize).min(self.nr - 1);
        let n0 = (y.floor() as usize).min(self.nt - 1);
        let i1 = (i0 + 1).min(self.nr - 1);
        let n1 = (n0 + 1).min(self.nt - 1);
        if x > (self.nr - 1) as f64 || y > (self.nt - 1) as f64 {
            return 0.0;
        }
        let fx = (x - i0 as f64).clamp(0.0, 1.0);
        let fy = (y - n0 as f64).clamp(0.0, 1.0);
        let v00 = self.value(i0, n0);
        let v10 = self.value(i1, n0);
        let v01 = self.value(i0, n1);
        let v11 = self.value(i1, n1);
        (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
    }

    /// Pointwise map preserving the grid (and re-imposing the cone zeros).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for n in 0..self.nt {
            for i in 0..self.nr {
                let inside = self.r(i) <= self.t(n) + self.k;
                out.values[n * self.nr + i] =
                    if inside { f(self.value(i, n)) } else { 0.0 };
            }
        }
        out
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.nr != other.nr
            || self.nt != other.nt
            || self.dr != other.dr
            || self.dt != other.dt
            || self.k != other.k
        {
            return Err(Error::InvalidParameter(
                "zip_map requires identical grids".into(),
            ));
        }
        let mut out = self.clone();
        for n in 0..self.nt {
            for i in 0..self.nr {
                let inside = self.r(i) <= self.t(n) + self.k;
                out.values[n * self.nr + i] = if inside {
                    f(self.value(i, n), other.value(i, n))
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }

    /// Largest |V| over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when all samples vanish outside the cone (always holds for
    /// fields built through this API; checked on ingestion).
    pub fn support_ok(&self) -> bool {
        for n in 0..self.nt {
            for i in 0..self.nr {
                if self.r(i) > self.t(n) + self.k && self.value(i, n) != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Writes the flat CSV layout: a header row `nr,nt,dr,dt,k` followed by
    /// one row per time slice.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "{},{},{:.17e},{:.17e},{:.17e}",
            self.nr, self.nt, self.dr, self.dt, self.k
        )?;
        for n in 0..self.nt {
            let row: Vec<String> = self
                .time_slice(n)
                .iter()
                .map(|v| format!("{v:.17e}"))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads the layout produced by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty field file".into()))??;
        let parts: Vec<&str> = header.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Parse("field header needs nr,nt,dr,dt,k".into()));
        }
        let nr: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse("bad nr".into()))?;
        let nt: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse("bad nt".into()))?;
        let dr: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse("bad dr".into()))?;
        let dt: f64 = parts[3]
            .trim()
            .parse()
            .map_err(|_| Error::Parse("bad dt".into()))?;
        let k: f64 = parts[4]
            .trim()
            .parse()
            .map_err(|_| Error::Parse("bad k".into()))?;
        let mut field = Self::zeros(k, dr, dt, nr, nt)?;
        for n in 0..nt {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing field row {n}")))??;
            let row: Vec<&str> = line.split(',').collect();
            if row.len() != nr {
                return Err(Error::Parse(format!(
                    "field row {n} has {} entries, expected {nr}",
                    row.len()
                )));
            }
            for (i, cell) in row.iter().enumerate() {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad sample at ({i},{n})")))?;
                field.values[n * nr + i] = v;
            }
        }
        if !field.support_ok() {
            return Err(Error::InvalidParameter(
                "field violates the light-cone support condition".into(),
            ));
        }
        Ok(field)
    }
}
