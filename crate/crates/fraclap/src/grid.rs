//! Finitely supported functions on the mesh `Z_h`.

use std::io::{BufRead, Write};

use crate::{Error, Result};

/// A real function on `Z_h` with finitely many stored values
/// `u_{offset}, ..., u_{offset+N-1}` and implicit zeros outside.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    h: f64,
    offset: i64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(h: f64, offset: i64, values: Vec<f64>) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::domain(format!("mesh size must be positive, got {h}")));
        }
        if values.is_empty() {
            return Err(Error::domain("grid function needs at least one value"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("grid function values must be finite"));
        }
        Ok(GridFunction { h, offset, values })
    }

    /// Kronecker delta at index `j0`.
    pub fn delta(h: f64, j0: i64) -> Self {
        GridFunction {
            h,
            offset: j0,
            values: vec![1.0],
        }
    }

    /// Constant value `c` on `lo..=hi`.
    pub fn constant(h: f64, lo: i64, hi: i64, c: f64) -> Result<Self> {
        if hi < lo {
            return Err(Error::domain("empty index window"));
        }
        Self::new(h, lo, vec![c; (hi - lo + 1) as usize])
    }

    /// Samples `f(h j)` over `lo..=hi`.
    pub fn from_fn(h: f64, lo: i64, hi: i64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if hi < lo {
            return Err(Error::domain("empty index window"));
        }
        Self::new(h, lo, (lo..=hi).map(|j| f(h * j as f64)).collect())
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inclusive stored index range `(lo, hi)`.
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.values.len() as i64 - 1)
    }

    /// Number of mesh points carrying a nonzero value.
    pub fn support_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    /// Value at index `j` (zero outside the stored window).
    pub fn value(&self, j: i64) -> f64 {
        let i = j - self.offset;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// Iterator over `(j, u_j)` for the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.offset + i as i64, v))
    }

    /// `ℓ^p_h` norm `(h Σ |u_j|^p)^{1/p}` for `1 <= p < ∞`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        debug_assert!(p >= 1.0);
        let acc: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (self.h * acc).powf(1.0 / p)
    }

    /// `ℓ^2_h` norm.
    pub fn l2_norm(&self) -> f64 {
        (self.h * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// `ℓ^∞_h` norm.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `⟨u, v⟩_{ℓ^2_h} = h Σ u_j v_j`; meshes must agree.
    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        if self.h != other.h {
            return Err(Error::contract("inner product across different meshes"));
        }
        let lo = self.offset.max(other.offset);
        let hi = (self.offset + self.len() as i64).min(other.offset + other.len() as i64) - 1;
        let mut acc = 0.0;
        for j in lo..=hi {
            acc += self.value(j) * other.value(j);
        }
        Ok(self.h * acc)
    }

    /// Pointwise linear combination `a·self + b·other` on the union window.
    pub fn axpby(&self, a: f64, b: f64, other: &GridFunction) -> Result<GridFunction> {
        if self.h != other.h {
            return Err(Error::contract("combining functions on different meshes"));
        }
        let lo = self.offset.min(other.offset);
        let hi = (self.support().1).max(other.support().1);
        let values = (lo..=hi)
            .map(|j| a * self.value(j) + b * other.value(j))
            .collect();
        GridFunction::new(self.h, lo, values)
    }

    /// Restriction of the stored values to `lo..=hi` (zero-padded as needed).
    pub fn window(&self, lo: i64, hi: i64) -> Result<GridFunction> {
        if hi < lo {
            return Err(Error::domain("empty index window"));
        }
        GridFunction::new(self.h, lo, (lo..=hi).map(|j| self.value(j)).collect())
    }

    /// Maximum of `|u_j - v_j|` over the union of stored windows.
    pub fn sup_diff(&self, other: &GridFunction) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.support().1.max(other.support().1);
        (lo..=hi).fold(0.0f64, |m, j| m.max((self.value(j) - other.value(j)).abs()))
    }

    /// CSV with columns `j, x, value`; a leading comment line carries the
    /// mesh size and offset so the file round-trips exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# h={:.17e} offset={}", self.h, self.offset)?;
        writeln!(w, "j,x,value")?;
        for (j, v) in self.iter() {
            writeln!(w, "{j},{:.17e},{:.17e}", self.h * j as f64, v)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("csv is ascii")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<GridFunction> {
        let mut h = None;
        let mut offset = None;
        let mut rows: Vec<(i64, f64)> = Vec::new();
        for line in r.lines() {
            let line = line.map_err(|e| Error::InvalidInput(format!("read failure: {e}")))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("h=") {
                        h = Some(v.parse::<f64>().map_err(|_| {
                            Error::InvalidInput(format!("bad h in header: {tok}"))
                        })?);
                    } else if let Some(v) = tok.strip_prefix("offset=") {
                        offset = Some(v.parse::<i64>().map_err(|_| {
                            Error::InvalidInput(format!("bad offset in header: {tok}"))
                        })?);
                    }
                }
                continue;
            }
            if line.starts_with('j') {
                continue; // column header
            }
            let mut cols = line.split(',');
            let j = cols
                .next()
                .and_then(|c| c.trim().parse::<i64>().ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad index column: {line}")))?;
            let v = cols
                .nth(1)
                .and_then(|c| c.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad value column: {line}")))?;
            rows.push((j, v));
        }
        let h = h.ok_or_else(|| Error::InvalidInput("missing '# h=... offset=...' header".into()))?;
        if rows.is_empty() {
            return Err(Error::InvalidInput("no data rows".into()));
        }
        rows.sort_by_key(|r| r.0);
        let lo = offset.unwrap_or(rows[0].0);
        let hi = rows.last().unwrap().0;
        let mut values = vec![0.0; (hi - lo + 1) as usize];
        for (j, v) in rows {
            values[(j - lo) as usize] = v;
        }
        GridFunction::new(h, lo, values)
    }

    pub fn from_csv_str(s: &str) -> Result<GridFunction> {
        Self::read_csv(s.as_bytes())
    }
}
