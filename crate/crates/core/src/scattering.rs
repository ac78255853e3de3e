//! Transmission and reflection coefficients of the Schrödinger equation with the
//! Miura potential `q = α² − α′` of an absolutely continuous profile.
//!
//! Outside `(x0, x1)` the impedance is extended by constants, so reflection data
//! keep their `e^{±2iσx0}` phase factors. Profiles built this way carry no bound
//! states, and none are searched for.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hexp::Evaluator;
use crate::profile::ImpedanceProfile;
use crate::transfer::Transfer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrixEntry {
    pub sigma: f64,
    pub t: Complex64,
    pub r1: Complex64,
    pub r2: Complex64,
}

impl SMatrixEntry {
    /// `max(||t|² + |r1|² − 1|, ||t|² + |r2|² − 1|)`.
    pub fn unitarity_residual(&self) -> f64 {
        let t2 = self.t.norm_sqr();
        ((t2 + self.r1.norm_sqr() - 1.0).abs()).max((t2 + self.r2.norm_sqr() - 1.0).abs())
    }

    pub fn row(&self) -> SMatrixRow {
        SMatrixRow {
            sigma: self.sigma,
            re_t: self.t.re,
            im_t: self.t.im,
            abs_t: self.t.norm(),
            re_r1: self.r1.re,
            im_r1: self.r1.im,
            re_r2: self.r2.re,
            im_r2: self.r2.im,
            unitarity_residual: self.unitarity_residual(),
        }
    }
}

/// Flat record used for CSV and JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SMatrixRow {
    pub sigma: f64,
    pub re_t: f64,
    pub im_t: f64,
    pub abs_t: f64,
    pub re_r1: f64,
    pub im_r1: f64,
    pub re_r2: f64,
    pub im_r2: f64,
    pub unitarity_residual: f64,
}

pub const CSV_HEADER: &str = "sigma,re_t,im_t,abs_t,re_r1,im_r1,re_r2,im_r2,unitarity_residual";

fn s_from_transfer(t: &Transfer, sigma: f64) -> Result<SMatrixEntry> {
    let p = t.profile();
    let g = t.total(sigma)?;
    let phase = Complex64::from_polar(1.0, p.length() * sigma);
    let cosh = phase * g.z;
    let sinh = phase * g.w;
    if cosh.norm() == 0.0 {
        return Err(Error::CoshZero);
    }
    let x0 = p.x0();
    let entry = SMatrixEntry {
        sigma,
        t: cosh.inv(),
        r1: -Complex64::from_polar(1.0, -2.0 * sigma * x0) * sinh.conj() / cosh,
        r2: Complex64::from_polar(1.0, 2.0 * sigma * x0) * sinh / cosh,
    };
    if !(entry.t.is_finite() && entry.r1.is_finite() && entry.r2.is_finite()) {
        return Err(Error::NonFiniteResult);
    }
    Ok(entry)
}

/// `t = Sech`, `r2 = e^{2iσx0} Tanh`, `r1 = −e^{−2iσx0} conj(Sinh)/Cosh`.
pub fn s_matrix(profile: &ImpedanceProfile, sigma: f64, evaluator: Evaluator) -> Result<SMatrixEntry> {
    profile.ac_pieces()?;
    s_from_transfer(&Transfer::new(profile, evaluator), sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostReport {
    /// Deviation of `G A(x0)` from `(0, e^{iσx1})` for the solution incoming from the right.
    pub f1_residual: f64,
    /// Deviation of `G A(x0)` from `(e^{−iσx1}/T1, R1 e^{iσx1}/T1)` for the one from the left.
    pub f2_residual: f64,
}

impl JostReport {
    pub fn max(&self) -> f64 {
        self.f1_residual.max(self.f2_residual)
    }
}

/// Builds the two scattering solutions at `x0` from the computed coefficients and
/// checks their asymptotic form at `x1` after transfer.
pub fn jost_asymptotics_check(profile: &ImpedanceProfile, sigma: f64, evaluator: Evaluator) -> Result<JostReport> {
    profile.ac_pieces()?;
    let tr = Transfer::new(profile, evaluator);
    let s = s_from_transfer(&tr, sigma)?;
    let g = tr.total(sigma)?;
    let (x0, x1) = (profile.x0(), profile.x1());
    let e = |x: f64| Complex64::from_polar(1.0, sigma * x);

    let f1 = g.apply([s.r2 / s.t * e(-x0), e(x0) / s.t]);
    let f1_residual = f1[0].norm().max((f1[1] - e(x1)).norm());

    let f2 = g.apply([e(-x0), Complex64::new(0.0, 0.0)]);
    let f2_residual = (f2[0] - e(-x1) / s.t)
        .norm()
        .max((f2[1] - s.r1 / s.t * e(x1)).norm());
    Ok(JostReport {
        f1_residual,
        f2_residual,
    })
}

/// S-matrix at every grid point, in grid order; points are computed in parallel.
pub fn sweep(profile: &ImpedanceProfile, sigma_grid: &[f64], evaluator: Evaluator) -> Result<Vec<SMatrixEntry>> {
    profile.ac_pieces()?;
    for (i, s) in sigma_grid.iter().enumerate() {
        if !(*s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma grid entry {i} = {s} is not positive")));
        }
        if i > 0 && *s <= sigma_grid[i - 1] {
            return Err(Error::InvalidArgument("sigma grid must be strictly increasing".into()));
        }
    }
    let tr = Transfer::new(profile, evaluator);
    sigma_grid.par_iter().map(|&s| s_from_transfer(&tr, s)).collect()
}

/// `n` equally spaced points on `[lo, hi]` (a single point gives `lo`).
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Fixed 17-significant-digit formatting used by every table writer.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(entries: &[SMatrixEntry], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for e in entries {
        let r = e.row();
        let cols = [
            r.sigma,
            r.re_t,
            r.im_t,
            r.abs_t,
            r.re_r1,
            r.im_r1,
            r.re_r2,
            r.im_r2,
            r.unitarity_residual,
        ];
        let line: Vec<String> = cols.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn to_json(entries: &[SMatrixEntry]) -> String {
    let rows: Vec<SMatrixRow> = entries.iter().map(SMatrixEntry::row).collect();
    serde_json::to_string_pretty(&rows).expect("rows always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::constant_alpha_g;
    use crate::profile::{AlphaSpec, JumpPoint, Segment};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ode() -> Evaluator {
        Evaluator::Ode { steps: 4096 }
    }

    fn constant_profile() -> ImpedanceProfile {
        ImpedanceProfile::single(Segment::constant(0.0, 1.0, 1.0).unwrap())
    }

    #[test]
    fn free_line() {
        let p = ImpedanceProfile::single(Segment::zero(0.0, 1.0).unwrap());
        let s = s_matrix(&p, 2.0, ode()).unwrap();
        assert!((s.t - 1.0).norm() < 1e-15);
        assert_eq!((s.r1.norm(), s.r2.norm()), (0.0, 0.0));
        assert_eq!(jost_asymptotics_check(&p, 2.0, ode()).unwrap().max(), 0.0);
    }

    #[test]
    fn constant_alpha_matches_closed_form() {
        let s = s_matrix(&constant_profile(), 2.0, ode()).unwrap();
        let g = constant_alpha_g(1.0, 1.0, 2.0);
        let cosh = Complex64::from_polar(1.0, 2.0) * g.z;
        assert!((s.t - cosh.inv()).norm() < 1e-9);
        // Cosh = e^{2i}(cos√3 − 2i sin√3/√3)
        let r3 = 3f64.sqrt();
        let quoted = Complex64::from_polar(1.0, 2.0) * Complex64::new(r3.cos(), -2.0 * r3.sin() / r3);
        assert!((s.t - quoted.inv()).norm() < 1e-9);
        assert!((s.t.norm_sqr() + s.r2.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(s.unitarity_residual() < 1e-9);
        assert!(jost_asymptotics_check(&constant_profile(), 2.0, ode()).unwrap().max() < 1e-8);
    }

    #[test]
    fn jumps_are_rejected() {
        let p = ImpedanceProfile::new(
            0.0,
            1.0,
            vec![Segment::zero(0.0, 1.0).unwrap(), Segment::zero(1.0, 2.0).unwrap()],
            vec![JumpPoint { y: 1.0, gamma: 2.0 }],
        )
        .unwrap();
        assert_eq!(s_matrix(&p, 1.0, ode()), Err(Error::HasJumps));
        assert_eq!(sweep(&p, &[1.0], ode()), Err(Error::HasJumps));
    }

    #[test]
    fn translation_only_rotates_reflection() {
        let p = ImpedanceProfile::single(
            Segment::new(0.0, 1.0, AlphaSpec::GaussianBump { amplitude: 1.0, center: 0.4, width: 0.2 }).unwrap(),
        );
        let d = 0.7;
        let q = p.translated(d).unwrap();
        let (s, a, b) = (3.0, s_matrix(&p, 3.0, ode()).unwrap(), s_matrix(&q, 3.0, ode()).unwrap());
        assert!((a.t - b.t).norm() < 1e-12);
        assert!((b.r2 - a.r2 * Complex64::from_polar(1.0, 2.0 * s * d)).norm() < 1e-12);
        assert!((b.r1 - a.r1 * Complex64::from_polar(1.0, -2.0 * s * d)).norm() < 1e-12);
    }

    #[test]
    fn random_profiles_satisfy_jost_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let seg = Segment::new(
                0.0,
                1.0,
                AlphaSpec::GaussianBump {
                    amplitude: rng.gen_range(-2.0..2.0),
                    center: rng.gen_range(0.3..0.7),
                    width: rng.gen_range(0.08..0.3),
                },
            )
            .unwrap();
            let p = ImpedanceProfile::single(seg);
            for s in [1.0, 5.0, 10.0] {
                let rep = jost_asymptotics_check(&p, s, ode()).unwrap();
                assert!(rep.max() < 1e-6, "{rep:?}");
                let e = s_matrix(&p, s, ode()).unwrap();
                assert!((e.r1.norm() - e.r2.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sweep_examples() {
        let free = ImpedanceProfile::single(Segment::zero(0.0, 1.0).unwrap());
        assert!(sweep(&free, &[], ode()).unwrap().is_empty());
        let rows = sweep(&free, &[1.0, 2.0, 3.0], ode()).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| (r.t - 1.0).norm() < 1e-15));
        assert!(sweep(&free, &[2.0, 1.0], ode()).is_err());
        assert!(sweep(&free, &[0.0, 1.0], ode()).is_err());

        let grid = linear_grid(0.1, 30.0, 512);
        let rows = sweep(&constant_profile(), &grid, ode()).unwrap();
        assert!(rows.iter().all(|r| r.unitarity_residual() < 1e-8));
        assert_eq!(rows.iter().map(|r| r.sigma).collect::<Vec<_>>(), grid);
    }

    #[test]
    fn transmission_approaches_one() {
        let p = ImpedanceProfile::single(
            Segment::new(0.0, 1.0, AlphaSpec::GaussianBump { amplitude: 1.0, center: 0.5, width: 0.15 }).unwrap(),
        );
        let top: Vec<f64> = [3.0, 10.0, 30.0]
            .iter()
            .map(|&s| 1.0 - s_matrix(&p, s, ode()).unwrap().t.norm())
            .collect();
        assert!(top[0] > top[1] && top[1] > top[2], "{top:?}");
    }

    #[test]
    fn csv_and_json_layout() {
        let rows = sweep(&constant_profile(), &[1.0, 2.0], ode()).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(lines[1].starts_with("1.0000000000000000e0,"));
        let json: serde_json::Value = serde_json::from_str(&to_json(&rows)).unwrap();
        let keys: Vec<&str> = json[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
        for col in CSV_HEADER.split(',') {
            assert!(keys.contains(&col));
        }
    }
}
