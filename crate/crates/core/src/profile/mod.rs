//! Piecewise absolutely continuous impedance profiles.
//!
//! The stored primitive is `α = −½ (log ζ)′` on each segment together with the
//! jump ratios `γ = ζ(y−)/ζ(y+)` at the breakpoints. `ζ` itself is reconstructed
//! on demand from `ζ(x0+)`.

mod file;
mod segment;

pub use file::{parse_profile, read_profile, ProfileFile};
pub use segment::{miura_potential, AlphaSpec, GridAlpha, Segment};

use crate::error::{Error, Result};
use crate::su11::Su11Matrix;

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpPoint {
    pub y: f64,
    pub gamma: f64,
}

impl JumpPoint {
    pub fn is_trivial(&self) -> bool {
        self.gamma == 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceProfile {
    x0: f64,
    zeta_left: f64,
    segments: Vec<Segment>,
    jumps: Vec<JumpPoint>,
    // ζ(lo+) of every segment
    zeta_lo: Vec<f64>,
}

fn breakpoint_tol(a: f64, b: f64) -> f64 {
    1e-12 * (1.0 + a.abs().max(b.abs()))
}

impl ImpedanceProfile {
    /// Builds a profile. `jumps[i]` sits between `segments[i]` and `segments[i + 1]`.
    pub fn new(
        x0: f64,
        zeta_left: f64,
        segments: Vec<Segment>,
        jumps: Vec<JumpPoint>,
    ) -> Result<Self> {
        if !(zeta_left > 0.0 && zeta_left.is_finite()) {
            return Err(Error::InvalidProfile(format!("zeta_left = {zeta_left} must be positive")));
        }
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidProfile("profile has no segments".into()))?;
        if (first.lo() - x0).abs() > breakpoint_tol(x0, first.lo()) {
            return Err(Error::InvalidProfile(format!(
                "first segment starts at {} but x0 = {x0}",
                first.lo()
            )));
        }
        for w in segments.windows(2) {
            if (w[0].hi() - w[1].lo()).abs() > breakpoint_tol(w[0].hi(), w[1].lo()) {
                return Err(Error::InvalidProfile(format!(
                    "segments ({}, {}) and ({}, {}) do not tile",
                    w[0].lo(),
                    w[0].hi(),
                    w[1].lo(),
                    w[1].hi()
                )));
            }
        }
        if jumps.len() + 1 != segments.len() {
            return Err(Error::InvalidProfile(format!(
                "{} segments need {} jumps, got {}",
                segments.len(),
                segments.len() - 1,
                jumps.len()
            )));
        }
        for (j, jump) in jumps.iter().enumerate() {
            let b = segments[j].hi();
            if (jump.y - b).abs() > breakpoint_tol(jump.y, b) {
                return Err(Error::InvalidProfile(format!(
                    "jump at {} does not coincide with breakpoint {b}",
                    jump.y
                )));
            }
            if !(jump.gamma > 0.0 && jump.gamma.is_finite()) {
                return Err(Error::NonPositiveGamma(jump.gamma));
            }
        }

        let mut zeta_lo = Vec::with_capacity(segments.len());
        let mut z = zeta_left;
        for (i, s) in segments.iter().enumerate() {
            if i > 0 {
                z /= jumps[i - 1].gamma;
            }
            zeta_lo.push(z);
            let decay = (-2.0 * s.alpha_integral()).exp();
            if !(decay.is_finite() && decay > 0.0) {
                return Err(Error::NonFiniteAlpha);
            }
            z *= decay;
            if !(z.is_finite() && z > 0.0) {
                return Err(Error::InvalidProfile("reconstructed impedance is not finite and positive".into()));
            }
        }

        Ok(Self {
            x0,
            zeta_left,
            segments,
            jumps,
            zeta_lo,
        })
    }

    /// A profile without impedance jumps (γ = 1 at every breakpoint).
    pub fn continuous(zeta_left: f64, segments: Vec<Segment>) -> Result<Self> {
        let x0 = segments
            .first()
            .map(Segment::lo)
            .ok_or_else(|| Error::InvalidProfile("profile has no segments".into()))?;
        let jumps = segments
            .iter()
            .take(segments.len().saturating_sub(1))
            .map(|s| JumpPoint { y: s.hi(), gamma: 1.0 })
            .collect();
        Self::new(x0, zeta_left, segments, jumps)
    }

    /// Single segment, `ζ(x0+) = 1`.
    pub fn single(segment: Segment) -> Self {
        Self::continuous(1.0, vec![segment]).expect("a single valid segment is a valid profile")
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x1(&self) -> f64 {
        self.segments.last().map(Segment::hi).unwrap_or(self.x0)
    }

    pub fn length(&self) -> f64 {
        self.x1() - self.x0
    }

    pub fn zeta_left(&self) -> f64 {
        self.zeta_left
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn jumps(&self) -> &[JumpPoint] {
        &self.jumps
    }

    /// True when some breakpoint carries a real discontinuity (γ ≠ 1).
    pub fn has_jumps(&self) -> bool {
        self.jumps.iter().any(|j| !j.is_trivial())
    }

    /// All segments, provided ζ has no discontinuities.
    pub fn ac_pieces(&self) -> Result<&[Segment]> {
        if self.has_jumps() {
            return Err(Error::HasJumps);
        }
        Ok(&self.segments)
    }

    /// `ζ(x0+)` of segment `i` at its left end.
    pub fn zeta_at_segment_start(&self, i: usize) -> f64 {
        self.zeta_lo[i]
    }

    pub fn is_step(&self) -> bool {
        self.segments.iter().all(|s| s.alpha_spec().is_zero())
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(x > self.x0 && x < self.x1()) {
            return Err(Error::OutOfDomain {
                x,
                lo: self.x0,
                hi: self.x1(),
            });
        }
        Ok(())
    }

    /// Index of the segment holding `x` strictly inside, or `Err(AtJump)` when `x`
    /// is a breakpoint with γ ≠ 1. Continuity breakpoints resolve to the right segment.
    pub fn segment_index_at(&self, x: f64) -> Result<usize> {
        self.check_domain(x)?;
        for (i, jump) in self.jumps.iter().enumerate() {
            if (x - jump.y).abs() <= breakpoint_tol(x, jump.y) {
                if jump.is_trivial() {
                    return Ok(i + 1);
                }
                return Err(Error::AtJump { y: jump.y });
            }
        }
        Ok(self
            .segments
            .iter()
            .position(|s| x < s.hi())
            .unwrap_or(self.segments.len() - 1))
    }

    fn zeta_in_segment(&self, i: usize, x: f64) -> Result<f64> {
        let s = &self.segments[i];
        let v = self.zeta_lo[i] * (-2.0 * s.integral(s.lo(), x)).exp();
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::NonFiniteAlpha)
        }
    }

    /// `ζ(x)` for `x0 < x < x1` off the jump set.
    pub fn zeta_at(&self, x: f64) -> Result<f64> {
        let i = self.segment_index_at(x)?;
        self.zeta_in_segment(i, x)
    }

    /// `ζ(x−)` or `ζ(x+)`. Also defined at `x0` (right limit) and `x1` (left limit).
    pub fn zeta_one_sided(&self, x: f64, side: Side) -> Result<f64> {
        let tol = breakpoint_tol(x, self.x0);
        if (x - self.x0).abs() <= tol && side == Side::Right {
            return Ok(self.zeta_left);
        }
        if (x - self.x1()).abs() <= breakpoint_tol(x, self.x1()) && side == Side::Left {
            let last = self.segments.len() - 1;
            return self.zeta_in_segment(last, self.x1());
        }
        self.check_domain(x)?;
        for (i, jump) in self.jumps.iter().enumerate() {
            if (x - jump.y).abs() <= breakpoint_tol(x, jump.y) {
                return match side {
                    Side::Left => self.zeta_in_segment(i, self.segments[i].hi()),
                    Side::Right => Ok(self.zeta_lo[i + 1]),
                };
            }
        }
        self.zeta_at(x)
    }

    /// Splits ζ = ζ₀ ζ₁ into a step factor with `ζ₀(x0+) = 1` and an absolutely
    /// continuous factor carrying the original α.
    pub fn factorize(&self) -> Result<(ImpedanceProfile, ImpedanceProfile)> {
        let steps = self
            .segments
            .iter()
            .map(|s| s.with_alpha(AlphaSpec::Zero))
            .collect::<Result<Vec<_>>>()?;
        let step = ImpedanceProfile::new(self.x0, 1.0, steps, self.jumps.clone())?;
        let smooth_jumps = self
            .jumps
            .iter()
            .map(|j| JumpPoint { y: j.y, gamma: 1.0 })
            .collect();
        let ac = ImpedanceProfile::new(self.x0, self.zeta_left, self.segments.clone(), smooth_jumps)?;
        Ok((step, ac))
    }

    /// The same medium shifted right by `d`.
    pub fn translated(&self, d: f64) -> Result<ImpedanceProfile> {
        let segments = self.segments.iter().map(|s| s.translated(d)).collect();
        let jumps = self
            .jumps
            .iter()
            .map(|j| JumpPoint { y: j.y + d, gamma: j.gamma })
            .collect();
        ImpedanceProfile::new(self.x0 + d, self.zeta_left, segments, jumps)
    }
}

/// Jump matrix `J = (1/(2√γ)) [[1+γ, 1−γ], [1−γ, 1+γ]]` relating `A(y+) = J A(y−)`.
pub fn jump_matrix(gamma: f64) -> Result<Su11Matrix> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::NonPositiveGamma(gamma));
    }
    let s = 0.5 / gamma.sqrt();
    Ok(Su11Matrix::new(
        num_complex::Complex64::new((1.0 + gamma) * s, 0.0),
        num_complex::Complex64::new((gamma - 1.0) * s, 0.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su11::{mat_max_abs_diff, mat_mul};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn zeta_constant_profile() {
        let p = ImpedanceProfile::single(Segment::zero(0.0, 1.0).unwrap());
        assert_eq!(p.zeta_at(0.3).unwrap(), 1.0);
        assert_eq!(p.zeta_at(0.999).unwrap(), 1.0);
    }

    #[test]
    fn zeta_constant_alpha() {
        let p = ImpedanceProfile::single(Segment::constant(0.0, 1.0, 1.0).unwrap());
        assert!((p.zeta_at(0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn zeta_across_jump() {
        let p = ImpedanceProfile::new(
            0.0,
            1.0,
            vec![Segment::zero(0.0, 0.5).unwrap(), Segment::zero(0.5, 1.0).unwrap()],
            vec![JumpPoint { y: 0.5, gamma: 4.0 }],
        )
        .unwrap();
        assert_eq!(p.zeta_at(0.75).unwrap(), 0.25);
        assert_eq!(p.zeta_at(0.25).unwrap(), 1.0);
        assert!(matches!(p.zeta_at(0.5), Err(Error::AtJump { .. })));
        assert_eq!(p.zeta_one_sided(0.5, Side::Left).unwrap(), 1.0);
        assert_eq!(p.zeta_one_sided(0.5, Side::Right).unwrap(), 0.25);
        assert!(matches!(p.zeta_at(1.2), Err(Error::OutOfDomain { .. })));
        assert!(matches!(p.zeta_at(0.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn validation_errors() {
        let seg = || Segment::zero(0.0, 0.5).unwrap();
        let seg2 = || Segment::zero(0.5, 1.0).unwrap();
        assert!(ImpedanceProfile::new(0.0, 0.0, vec![seg()], vec![]).is_err());
        assert!(ImpedanceProfile::new(0.0, 1.0, vec![seg(), seg2()], vec![]).is_err());
        // jump strictly inside a segment
        assert!(ImpedanceProfile::new(0.0, 1.0, vec![seg(), seg2()], vec![JumpPoint { y: 0.7, gamma: 2.0 }]).is_err());
        assert_eq!(
            ImpedanceProfile::new(0.0, 1.0, vec![seg(), seg2()], vec![JumpPoint { y: 0.5, gamma: -1.0 }]),
            Err(Error::NonPositiveGamma(-1.0))
        );
        // gap between segments
        assert!(ImpedanceProfile::continuous(1.0, vec![seg(), Segment::zero(0.6, 1.0).unwrap()]).is_err());
    }

    #[test]
    fn jump_matrix_examples() {
        assert_eq!(jump_matrix(1.0).unwrap(), Su11Matrix::IDENTITY);
        let j = jump_matrix(4.0).unwrap().to_array();
        let expect = [[c(1.25), c(-0.75)], [c(-0.75), c(1.25)]];
        assert!(mat_max_abs_diff(&j, &expect) < 1e-15);
        let j = jump_matrix(0.25).unwrap().to_array();
        let expect = [[c(1.25), c(0.75)], [c(0.75), c(1.25)]];
        assert!(mat_max_abs_diff(&j, &expect) < 1e-15);
        assert!(matches!(jump_matrix(0.0), Err(Error::NonPositiveGamma(_))));
    }

    #[test]
    fn factorize_mixed_profile_round_trip() {
        let p = ImpedanceProfile::new(
            0.0,
            1.3,
            vec![Segment::constant(0.0, 0.4, 1.0).unwrap(), Segment::constant(0.4, 1.0, 1.0).unwrap()],
            vec![JumpPoint { y: 0.4, gamma: 2.0 }],
        )
        .unwrap();
        let (step, ac) = p.factorize().unwrap();
        assert!(step.is_step());
        assert_eq!(step.zeta_left(), 1.0);
        assert!(!ac.has_jumps());
        for k in 1..=100 {
            let x = k as f64 / 101.0;
            if (x - 0.4).abs() < 1e-12 {
                continue;
            }
            let prod = step.zeta_at(x).unwrap() * ac.zeta_at(x).unwrap();
            assert!((prod - p.zeta_at(x).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn factorize_pure_cases() {
        let step = ImpedanceProfile::new(
            0.0,
            3.0,
            vec![Segment::zero(0.0, 0.5).unwrap(), Segment::zero(0.5, 1.0).unwrap()],
            vec![JumpPoint { y: 0.5, gamma: 2.0 }],
        )
        .unwrap();
        let (s, a) = step.factorize().unwrap();
        assert_eq!(s.zeta_at(0.7).unwrap(), 0.5);
        assert_eq!(a.zeta_at(0.7).unwrap(), 3.0);
        let smooth = ImpedanceProfile::single(Segment::constant(0.0, 1.0, 0.3).unwrap());
        let (s, a) = smooth.factorize().unwrap();
        assert_eq!(s.zeta_at(0.7).unwrap(), 1.0);
        assert_eq!(a, smooth);
    }

    #[test]
    fn zeta_round_trip_from_sampled_alpha() {
        // ζ(x) = 2 + sin(3x); α = −½ ζ′/ζ sampled on a grid
        let zeta = |x: f64| 2.0 + (3.0 * x).sin();
        let alpha = |x: f64| -0.5 * 3.0 * (3.0 * x).cos() / zeta(x);
        let err = |n: usize| {
            let samples = (0..=n).map(|k| alpha(k as f64 / n as f64)).collect();
            let p = ImpedanceProfile::continuous(zeta(0.0), vec![Segment::grid(0.0, 1.0, samples).unwrap()]).unwrap();
            (1..50)
                .map(|k| {
                    let x = k as f64 / 50.0;
                    (p.zeta_at(x).unwrap() - zeta(x)).abs()
                })
                .fold(0.0, f64::max)
        };
        let e1 = err(200);
        let e2 = err(400);
        assert!(e1 < 1e-4);
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn jump_inverse_pair(log_g in -6.9f64..6.9) {
            let g = log_g.exp();
            let j = jump_matrix(g).unwrap().to_array();
            let ji = jump_matrix(1.0 / g).unwrap().to_array();
            let id = [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
            prop_assert!(mat_max_abs_diff(&mat_mul(&j, &ji), &id) < 1e-12 * (g + 1.0 / g));
        }

        #[test]
        fn jump_det_and_lambda_unitarity(log_g in -6.9f64..6.9) {
            let j = jump_matrix(log_g.exp()).unwrap();
            prop_assert!((j.det() - 1.0).abs() < 1e-12 * j.z.norm_sqr());
            // Λ Jᵀ Λ = J⁻¹
            let a = j.to_array();
            let lam_jt_lam = [[a[0][0], -a[1][0]], [-a[0][1], a[1][1]]];
            let prod = mat_mul(&lam_jt_lam, &a);
            let id = [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
            prop_assert!(mat_max_abs_diff(&prod, &id) < 1e-12 * j.z.norm_sqr());
        }
    }
}
