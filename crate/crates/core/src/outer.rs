//! Recovering `Sech` in the upper half plane from `|Sech|` on the real line.
//!
//! `Sech` is outer there, so
//! `Sech(σ) = exp((1/iπ) ∫ (1 + sσ)/((s − σ)(1 + s²)) log|Sech(s)| ds)`.
//! The samples are joined linearly in `log|Sech|` and the kernel is integrated
//! exactly on each cell; beyond the sampled range `|Sech| = 1` contributes nothing.

use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hexp::Evaluator;
use crate::profile::ImpedanceProfile;
use crate::scattering::fmt_f64;
use crate::transfer::Transfer;

/// Default distance from the real axis below which reconstruction is refused.
pub const DEFAULT_DELTA: f64 = 1e-2;

pub const CSV_HEADER: &str = "sigma,abs_sech";

/// Samples of `|Sech|` on a strictly increasing real grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusData {
    grid: Vec<f64>,
    values: Vec<f64>,
    /// `x1 − x0` of the generating profile, when known, so the propagation phase
    /// `e^{i(x1−x0)σ}` of the transmitted signal can be reattached.
    pub length: Option<f64>,
}

impl ModulusData {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidArgument("modulus data needs at least two samples".into()));
        }
        for (i, pair) in grid.windows(2).enumerate() {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidArgument(format!(
                    "grid must be strictly increasing at index {}",
                    i + 1
                )));
            }
        }
        for (s, v) in grid.iter().zip(&values) {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveModulus { sigma: *s, value: *v });
            }
        }
        Ok(Self {
            grid,
            values,
            length: None,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest `|log|Sech||` at either end of the grid, a measure of the tail error.
    pub fn edge_log_magnitude(&self) -> f64 {
        self.values[0].ln().abs().max(self.values[self.values.len() - 1].ln().abs())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for (s, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{},{}", fmt_f64(*s), fmt_f64(*v))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || (n == 0 && line == CSV_HEADER) {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected 'sigma,abs_sech', got '{line}'", n + 1));
            let (a, b) = line.split_once(',').ok_or_else(bad)?;
            grid.push(a.trim().parse::<f64>().map_err(|_| bad())?);
            values.push(b.trim().parse::<f64>().map_err(|_| bad())?);
        }
        Self::new(grid, values)
    }
}

/// `Sech(σ)` for `Im σ ≥ delta`.
pub fn outer_reconstruct(data: &ModulusData, sigma: Complex64, delta: f64) -> Result<Complex64> {
    if !(sigma.im >= delta) {
        return Err(Error::TooCloseToAxis { im: sigma.im, delta });
    }
    let cells: Vec<usize> = (0..data.grid.len() - 1).collect();
    let integral: Complex64 = cells
        .par_iter()
        .map(|&k| {
            let (a, b) = (data.grid[k], data.grid[k + 1]);
            let (la, lb) = (data.values[k].ln(), data.values[k + 1].ln());
            let m = (lb - la) / (b - a);
            // ∫ ℓ/(s − σ): write ℓ(s) = ℓ(σ) + m (s − σ) with ℓ extended linearly
            let at_sigma = (sigma - a) * m + la;
            let first = at_sigma * ((b - sigma) / (a - sigma)).ln() + m * (b - a);
            // ∫ ℓ s/(1 + s²) with ℓ = c + m s
            let c = la - m * a;
            let second = c * 0.5 * ((1.0 + b * b) / (1.0 + a * a)).ln() + m * ((b - a) - (b.atan() - a.atan()));
            first - second
        })
        .sum();
    let value = (integral / Complex64::new(0.0, std::f64::consts::PI)).exp();
    if !value.is_finite() {
        return Err(Error::NonFiniteResult);
    }
    Ok(value)
}

/// `|Sech(σ)| = 1/|Cosh(σ)|` on a real grid (any sign of σ) for an absolutely
/// continuous profile.
pub fn power_spectrum(profile: &ImpedanceProfile, sigma_grid: &[f64], evaluator: Evaluator) -> Result<ModulusData> {
    power_spectrum_with(profile, sigma_grid, |_| evaluator)
}

/// As [`power_spectrum`], choosing the evaluator per frequency (fixed-step
/// integrators need resolution growing with `|σ|`).
pub fn power_spectrum_with<F>(profile: &ImpedanceProfile, sigma_grid: &[f64], evaluator_for: F) -> Result<ModulusData>
where
    F: Fn(f64) -> Evaluator + Sync,
{
    profile.ac_pieces()?;
    let values = sigma_grid
        .par_iter()
        .map(|&s| {
            Transfer::new(profile, evaluator_for(s))
                .total(s)
                .map(|g| 1.0 / g.z.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut data = ModulusData::new(sigma_grid.to_vec(), values)?;
    data.length = Some(profile.length());
    Ok(data)
}
