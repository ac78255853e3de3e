//! Reference solutions that do not go through the harmonic exponential.
//!
//! [`ode_solve`] integrates `(ζu′)′ + σ²ζu = 0` directly in the continuous
//! variables `(u, ζu′)`. [`picard_solve`] iterates the integral equation
//! `A(x) = A(p) − ∫_p^x 𝔪 A` on sub-intervals short enough for the iteration
//! to contract. The constant-α closed forms are exact matrix exponentials.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{cumulative_kernel, rk4_step, sinhc};
use crate::profile::{jump_matrix, ImpedanceProfile, Segment, Side};
use crate::su11::{Mat2, Su11Matrix};

/// Default number of RK4 steps per unit length used by [`ode_solve`].
pub const DEFAULT_STEPS_PER_UNIT: usize = 4000;

/// `E_α(σ)` for constant `α` on an interval of length `L`:
/// `e^{iσL}(cosh kL + (α − iσ) sinh(kL)/k)` with `k = √(α² − σ²)`.
pub fn constant_alpha_hexp(alpha: f64, length: f64, sigma: Complex64) -> Complex64 {
    let k = (Complex64::new(alpha * alpha, 0.0) - sigma * sigma).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let s = sinhc(k * length) * length;
    (i * sigma * length).exp() * ((k * length).cosh() + (alpha - i * sigma) * s)
}

/// `G = e^{−L𝔪}` for constant `α` and real `σ`.
pub fn constant_alpha_g(alpha: f64, length: f64, sigma: f64) -> Su11Matrix {
    let k = Complex64::new(alpha * alpha - sigma * sigma, 0.0).sqrt();
    let s = sinhc(k * length) * length;
    Su11Matrix::new(
        (k * length).cosh() - Complex64::new(0.0, sigma) * s,
        s * alpha,
    )
}

/// Solves for `(u, u′)` at each sample, starting from `u(x0+) = u0`, `u′(x0+) = du0`.
///
/// `steps_per_unit` fixes the RK4 step as `1/steps_per_unit` (rounded so every
/// stop point is hit exactly). Samples may be given in any order; `x1` is allowed
/// and gives left limits there. A sample on a jump is rejected.
pub fn ode_solve(
    profile: &ImpedanceProfile,
    sigma: f64,
    u0: Complex64,
    du0: Complex64,
    xs: &[f64],
    steps_per_unit: usize,
) -> Result<Vec<(Complex64, Complex64)>> {
    if steps_per_unit == 0 {
        return Err(Error::InvalidArgument("steps_per_unit must be positive".into()));
    }
    let target_h = 1.0 / steps_per_unit as f64;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut stop_for_segment = Vec::with_capacity(xs.len());
    for &k in &order {
        let x = xs[k];
        let seg = if (x - profile.x1()).abs() <= 1e-12 * (1.0 + x.abs()) {
            profile.segments().len() - 1
        } else {
            profile.segment_index_at(x)?
        };
        stop_for_segment.push((seg, x.min(profile.segments()[seg].hi())));
    }

    let mut out = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); xs.len()];
    let mut state = [u0, du0 * profile.zeta_left()];
    let s2 = sigma * sigma;
    let mut next = 0;
    for (i, seg) in profile.segments().iter().enumerate() {
        let zeta_lo = profile.zeta_at_segment_start(i);
        let zeta = |x: f64| zeta_lo * (-2.0 * seg.integral(seg.lo(), x)).exp();
        let rhs = |x: f64, y: &[Complex64; 2]| {
            let z = zeta(x);
            [y[1] / z, -y[0] * (s2 * z)]
        };
        let mut x = seg.lo();
        loop {
            let stop = if next < order.len() && stop_for_segment[next].0 == i {
                stop_for_segment[next].1
            } else {
                seg.hi()
            };
            let span = stop - x;
            if span > 0.0 {
                let m = (span / target_h).ceil().max(1.0) as usize;
                let h = span / m as f64;
                if h == 0.0 || x + h == x {
                    return Err(Error::StepUnderflow(h));
                }
                for k in 0..m {
                    state = rk4_step(&rhs, x + k as f64 * h, &state, h);
                }
                x = stop;
            }
            if next < order.len() && stop_for_segment[next].0 == i {
                out[order[next]] = (state[0], state[1] / zeta(stop));
                next += 1;
            } else {
                break;
            }
        }
    }
    Ok(out)
}

/// Result of [`picard_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution {
    /// `A` at the right end of the segment.
    pub a: [Complex64; 2],
    /// Iterations used on each sub-interval.
    pub iterations: Vec<usize>,
    /// Contraction factor `len·|σ| + ∫|α|` of each sub-interval.
    pub factors: Vec<f64>,
}

/// Target contraction factor for the sub-interval split.
pub const PICARD_CONTRACTION: f64 = 0.5;
/// Maximum number of sub-intervals per segment.
pub const PICARD_PIECE_CAP: usize = 100_000;
const PICARD_NODES: usize = 257;
const PICARD_MAX_ITER: usize = 500;

fn picard_split(seg: &Segment, sigma: f64) -> Result<Vec<(f64, f64)>> {
    let cost = |a: f64, b: f64| (b - a) * sigma.abs() + seg.l1(a, b);
    let mut out = Vec::new();
    let mut p = seg.lo();
    while p < seg.hi() {
        if out.len() >= PICARD_PIECE_CAP {
            return Err(Error::ContractionUnachievable { cap: PICARD_PIECE_CAP });
        }
        let q = if cost(p, seg.hi()) <= PICARD_CONTRACTION {
            seg.hi()
        } else {
            let (mut lo, mut hi) = (p, seg.hi());
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cost(p, mid) <= PICARD_CONTRACTION {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo <= p {
                return Err(Error::ContractionUnachievable { cap: PICARD_PIECE_CAP });
            }
            lo
        };
        out.push((p, q));
        p = q;
    }
    Ok(out)
}

/// Fixed-point iteration for `A′ = −𝔪A`, `𝔪 = [[iσ, α], [α, −iσ]]`, from `A(lo) = a0`
/// to `A(hi)`, stopping each sub-interval when the update falls below `tol·‖A(p)‖`.
pub fn picard_solve(seg: &Segment, sigma: f64, a0: [Complex64; 2], tol: f64) -> Result<PicardSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let i_sigma = Complex64::new(0.0, sigma);
    let zero = Complex64::new(0.0, 0.0);
    let mut a = a0;
    let mut iterations = Vec::new();
    let mut factors = Vec::new();
    for (p, q) in picard_split(seg, sigma)? {
        factors.push((q - p) * sigma.abs() + seg.l1(p, q));
        let m = PICARD_NODES - 1;
        let h = (q - p) / m as f64;
        let alpha: Vec<f64> = (0..=m)
            .map(|k| seg.alpha(if k == m { q } else { p + k as f64 * h }))
            .collect();
        let scale = a[0].norm().max(a[1].norm()).max(f64::MIN_POSITIVE);
        let mut cur = [vec![a[0]; m + 1], vec![a[1]; m + 1]];
        let mut count = 0;
        loop {
            count += 1;
            if count > PICARD_MAX_ITER {
                return Err(Error::ContractionUnachievable { cap: PICARD_PIECE_CAP });
            }
            let f0: Vec<Complex64> = (0..=m).map(|k| i_sigma * cur[0][k] + cur[1][k] * alpha[k]).collect();
            let f1: Vec<Complex64> = (0..=m).map(|k| cur[0][k] * alpha[k] - i_sigma * cur[1][k]).collect();
            let i0 = cumulative_kernel(&f0, h, zero);
            let i1 = cumulative_kernel(&f1, h, zero);
            let mut change: f64 = 0.0;
            for k in 0..=m {
                let n0 = a[0] - i0[k];
                let n1 = a[1] - i1[k];
                change = change.max((n0 - cur[0][k]).norm()).max((n1 - cur[1][k]).norm());
                cur[0][k] = n0;
                cur[1][k] = n1;
            }
            if change <= tol * scale {
                break;
            }
        }
        iterations.push(count);
        a = [cur[0][m], cur[1][m]];
    }
    Ok(PicardSolution { a, iterations, factors })
}

fn split_of(u: Complex64, du: Complex64, zeta: f64, sigma: f64) -> [Complex64; 2] {
    let s = zeta.sqrt() * 0.5;
    let q = du / Complex64::new(0.0, sigma);
    [(u - q) * s, (u + q) * s]
}

fn unsplit(a: [Complex64; 2], zeta: f64, sigma: f64) -> (Complex64, Complex64) {
    let r = zeta.sqrt();
    ((a[0] + a[1]) / r, Complex64::new(0.0, sigma) * (a[1] - a[0]) / r)
}

/// `(u, u′)` at each sample through Picard iteration on every segment and the
/// jump matrices between them.
pub fn picard_field(
    profile: &ImpedanceProfile,
    sigma: f64,
    u0: Complex64,
    du0: Complex64,
    xs: &[f64],
    tol: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    if sigma == 0.0 {
        return Err(Error::SigmaZero);
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    for &x in xs {
        if !((x - profile.x1()).abs() <= 1e-12 * (1.0 + x.abs())) {
            profile.segment_index_at(x)?;
        }
    }
    let mut out = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); xs.len()];
    let mut a = split_of(u0, du0, profile.zeta_left(), sigma);
    let mut next = 0;
    let segments = profile.segments();
    for (i, seg) in segments.iter().enumerate() {
        let zeta_lo = profile.zeta_at_segment_start(i);
        let mut x = seg.lo();
        while next < order.len() && (xs[order[next]] < seg.hi() || i + 1 == segments.len()) {
            let stop = xs[order[next]].min(seg.hi());
            if stop > x {
                a = picard_solve(&seg.restrict(x, stop)?, sigma, a, tol)?.a;
                x = stop;
            }
            let zeta = zeta_lo * (-2.0 * seg.integral(seg.lo(), stop)).exp();
            out[order[next]] = unsplit(a, zeta, sigma);
            next += 1;
        }
        if seg.hi() > x {
            a = picard_solve(&seg.restrict(x, seg.hi())?, sigma, a, tol)?.a;
        }
        if i + 1 < segments.len() {
            a = jump_matrix(profile.jumps()[i].gamma)?.apply(a);
        }
    }
    Ok(out)
}

/// Transfer matrix from `A(x0+)` to `A(x1−)` assembled from two direct ODE solves.
pub fn reference_transfer(profile: &ImpedanceProfile, sigma: f64, steps_per_unit: usize) -> Result<Mat2> {
    if sigma == 0.0 {
        return Err(Error::SigmaZero);
    }
    let z0 = profile.zeta_left();
    let z1 = profile.zeta_one_sided(profile.x1(), Side::Left)?;
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    for col in 0..2 {
        let mut a = [Complex64::new(0.0, 0.0); 2];
        a[col] = Complex64::new(1.0, 0.0);
        let (u, du) = unsplit(a, z0, sigma);
        let end = ode_solve(profile, sigma, u, du, &[profile.x1()], steps_per_unit)?[0];
        let out = split_of(end.0, end.1, z1, sigma);
        g[0][col] = out[0];
        g[1][col] = out[1];
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{AlphaSpec, JumpPoint};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn free(l: f64) -> ImpedanceProfile {
        ImpedanceProfile::single(Segment::zero(0.0, l).unwrap())
    }

    #[test]
    fn free_cosine() {
        let xs: Vec<f64> = (1..10).map(|k| 0.2 * k as f64).collect();
        let out = ode_solve(&free(2.0), 3.0, c(1.0), c(0.0), &xs, 4000).unwrap();
        for (x, (u, du)) in xs.iter().zip(out) {
            assert!((u - (3.0 * x).cos()).norm() < 1e-9);
            assert!((du + 3.0 * (3.0 * x).sin()).norm() < 1e-9);
        }
    }

    #[test]
    fn sigma_zero_is_linear() {
        let out = ode_solve(&free(1.0), 0.0, c(0.0), c(1.0), &[0.25, 0.75, 0.5], 100).unwrap();
        for (x, (u, _)) in [0.25, 0.75, 0.5].iter().zip(out) {
            assert!((u - x).norm() < 1e-15);
        }
    }

    #[test]
    fn continuity_across_jump() {
        let p = ImpedanceProfile::new(
            0.0,
            1.0,
            vec![Segment::zero(0.0, 1.0).unwrap(), Segment::zero(1.0, 2.0).unwrap()],
            vec![JumpPoint { y: 1.0, gamma: 4.0 }],
        )
        .unwrap();
        let e = 1e-9;
        let out = ode_solve(&p, 1.3, c(1.0), c(0.2), &[1.0 - e, 1.0 + e], 20_000).unwrap();
        assert!((out[0].0 - out[1].0).norm() < 1e-8);
        // ζ jumps down by 4, so u′ jumps up by 4
        assert!((out[1].1 - 4.0 * out[0].1).norm() < 1e-7);
        assert!(matches!(ode_solve(&p, 1.3, c(1.0), c(0.0), &[1.0], 100), Err(Error::AtJump { .. })));
    }

    #[test]
    fn rk4_halving_ratio() {
        // ζ = e^{−2x} gives the closed-form transfer matrix e^{−𝔪}
        let p = ImpedanceProfile::single(Segment::constant(0.0, 1.0, 1.0).unwrap());
        let exact = constant_alpha_g(1.0, 1.0, 2.0).to_array();
        let err = |n: usize| {
            let g = reference_transfer(&p, 2.0, n).unwrap();
            crate::su11::mat_max_abs_diff(&g, &exact)
        };
        let (e1, e2) = (err(50), err(100));
        let ratio = e1 / e2;
        assert!((13.0..19.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn closed_forms_agree() {
        let s = Complex64::new(2.0, 0.0);
        let g = constant_alpha_g(1.0, 1.0, 2.0);
        let ep = constant_alpha_hexp(1.0, 1.0, s);
        let em = constant_alpha_hexp(-1.0, 1.0, s);
        let phase = Complex64::from_polar(1.0, -2.0);
        assert!((g.z - phase * (ep + em) * 0.5).norm() < 1e-14);
        assert!((g.w - phase * (ep - em) * 0.5).norm() < 1e-14);
        assert!((g.det() - 1.0).abs() < 1e-13);
        assert!((constant_alpha_hexp(1.0, 1.0, c(0.0)) - 1f64.exp()).norm() < 1e-14);
        let g0 = constant_alpha_g(1.0, 1.0, 0.0);
        assert!((g0.z - 1f64.cosh()).norm() < 1e-14 && (g0.w - 1f64.sinh()).norm() < 1e-14);
    }

    #[test]
    fn picard_matches_closed_form() {
        let seg = Segment::constant(0.0, 1.0, 1.0).unwrap();
        let a0 = [c(0.3), Complex64::new(0.1, -0.7)];
        let sol = picard_solve(&seg, 2.0, a0, 1e-10).unwrap();
        let exact = constant_alpha_g(1.0, 1.0, 2.0).apply(a0);
        assert!((sol.a[0] - exact[0]).norm() < 1e-8);
        assert!((sol.a[1] - exact[1]).norm() < 1e-8);
        let limit = (1e-10f64).ln() / PICARD_CONTRACTION.ln() + 2.0;
        assert!(sol.iterations.iter().all(|&k| k as f64 <= limit), "{:?}", sol.iterations);
        assert!(sol.factors.iter().all(|&f| f <= PICARD_CONTRACTION + 1e-12));
    }

    #[test]
    fn picard_free_phase() {
        let seg = Segment::zero(0.0, 3.0).unwrap();
        let sol = picard_solve(&seg, 0.1, [c(1.0), c(1.0)], 1e-12).unwrap();
        assert!((sol.a[0] - Complex64::from_polar(1.0, -0.3)).norm() < 1e-11);
        assert!((sol.a[1] - Complex64::from_polar(1.0, 0.3)).norm() < 1e-11);
    }

    #[test]
    fn picard_and_rk4_agree_with_jumps() {
        let p = ImpedanceProfile::new(
            0.0,
            1.5,
            vec![
                Segment::new(0.0, 1.0, AlphaSpec::GaussianBump { amplitude: 1.0, center: 0.5, width: 0.2 }).unwrap(),
                Segment::constant(1.0, 1.5, -0.5).unwrap(),
                Segment::new(1.5, 2.5, AlphaSpec::Linear { intercept: 0.4, slope: -0.2 }).unwrap(),
            ],
            vec![JumpPoint { y: 1.0, gamma: 3.0 }, JumpPoint { y: 1.5, gamma: 0.4 }],
        )
        .unwrap();
        let xs: Vec<f64> = (0..20).map(|k| 0.05 + 0.12 * k as f64).collect();
        let a = ode_solve(&p, 4.0, c(1.0), c(0.5), &xs, 8000).unwrap();
        let b = picard_field(&p, 4.0, c(1.0), c(0.5), &xs, 1e-12).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.0 - y.0).norm() < 1e-8, "{x:?} {y:?}");
            assert!((x.1 - y.1).norm() < 1e-7);
        }
    }

    #[test]
    fn picard_rejects_unbounded_work() {
        let seg = Segment::zero(0.0, 1.0).unwrap();
        assert!(matches!(
            picard_solve(&seg, 1e9, [c(1.0), c(0.0)], 1e-8),
            Err(Error::ContractionUnachievable { .. })
        ));
    }
}
