//! Convergence tables: each evaluator against an independent reference.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::hexp::{eval_ode, eval_opuc, Evaluator};
use crate::oracle::reference_transfer;
use crate::profile::ImpedanceProfile;
use crate::scattering::fmt_f64;
use crate::su11::mat_max_abs_diff;
use crate::transfer::Transfer;

/// Resolution used for the direct-integration reference, in steps per unit length.
pub const REFERENCE_STEPS_PER_UNIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub method: &'static str,
    pub resolution: usize,
    pub error: f64,
    /// Error of the previous row of the same method divided by this one.
    pub ratio: Option<f64>,
}

fn resolution(e: &Evaluator) -> usize {
    match *e {
        Evaluator::Series { grid_n, .. } => grid_n,
        Evaluator::Ode { steps } => steps,
        Evaluator::Opuc { n } => n,
    }
}

/// Max-entry error of the full transfer matrix for each evaluator, measured
/// against two direct solves of the second-order equation.
pub fn converge(profile: &ImpedanceProfile, sigma: f64, evaluators: &[Evaluator]) -> Result<Vec<ConvergenceRow>> {
    let reference = reference_transfer(profile, sigma, REFERENCE_STEPS_PER_UNIT)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(evaluators.len());
    for e in evaluators {
        let g = Transfer::new(profile, *e).total(sigma)?;
        let error = mat_max_abs_diff(&g.to_array(), &reference);
        let method = e.method().name();
        let ratio = rows.iter().rev().find(|r| r.method == method).map(|r| r.error / error);
        rows.push(ConvergenceRow {
            method,
            resolution: resolution(e),
            error,
            ratio,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpucRow {
    pub n: usize,
    pub error_plus: f64,
    pub error_minus: f64,
    pub ratio: Option<f64>,
}

/// Error of the polynomial approximant `(Ψ*, Φ*)` against the RK4 evaluator for each `n`.
pub fn opuc_table(
    profile: &ImpedanceProfile,
    sigma: f64,
    ns: &[usize],
    reference_steps: usize,
) -> Result<Vec<OpucRow>> {
    let pieces = profile.ac_pieces()?;
    let s = Complex64::new(sigma, 0.0);
    let reference = eval_ode(pieces, s, reference_steps)?;
    let mut rows: Vec<OpucRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let v = eval_opuc(pieces, s, n)?;
        let error_plus = (v.e_plus - reference.e_plus).norm();
        let error_minus = (v.e_minus - reference.e_minus).norm();
        let ratio = rows.last().map(|r| r.error_plus / error_plus);
        rows.push(OpucRow {
            n,
            error_plus,
            error_minus,
            ratio,
        });
    }
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_converge_csv<W: Write>(rows: &[ConvergenceRow], mut out: W) -> io::Result<()> {
    writeln!(out, "method,resolution,error,ratio")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.method, r.resolution, fmt_f64(r.error), opt(r.ratio))?;
    }
    Ok(())
}

pub fn write_opuc_csv<W: Write>(rows: &[OpucRow], mut out: W) -> io::Result<()> {
    writeln!(out, "n,error_plus,error_minus,ratio")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.n,
            fmt_f64(r.error_plus),
            fmt_f64(r.error_minus),
            opt(r.ratio)
        )?;
    }
    Ok(())
}
