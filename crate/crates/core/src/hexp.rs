//! The harmonic exponential `E_α(σ)` of a run of contiguous segments and its
//! hyperbolic combinations.
//!
//! Three evaluators are provided: an iterated-integral series, a fixed-step RK4
//! integration of the coupled system `F′ = αG`, `G′ = αF + 2iσG`, and the
//! Szegő-polynomial approximant `Ψ*_{n,n}(e^{2iΔσ})`. Each returns the pair
//! `(E_α, E_{−α})`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{cumulative_kernel, distribute, rk4_step};
use crate::opuc::{recurrence_eval, VerblunskyChain};
use crate::profile::Segment;

/// Contiguous run of segments on which `α` is integrated.
pub trait Support {
    fn pieces(&self) -> &[Segment];
}

impl Support for Segment {
    fn pieces(&self) -> &[Segment] {
        std::slice::from_ref(self)
    }
}

impl Support for [Segment] {
    fn pieces(&self) -> &[Segment] {
        self
    }
}

impl Support for Vec<Segment> {
    fn pieces(&self) -> &[Segment] {
        self
    }
}

fn checked_pieces<S: Support + ?Sized>(support: &S) -> Result<&[Segment]> {
    let pieces = support.pieces();
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("no segments to integrate over".into()));
    }
    for pair in pieces.windows(2) {
        let (a, b) = (pair[0].hi(), pair[1].lo());
        if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
            return Err(Error::InvalidArgument(format!(
                "segments are not contiguous: {a} then {b}"
            )));
        }
    }
    Ok(pieces)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    Ode,
    Opuc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Ode => "ode",
            Method::Opuc => "opuc",
        }
    }
}

/// A method together with its resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evaluator {
    Series { max_order: usize, grid_n: usize },
    Ode { steps: usize },
    Opuc { n: usize },
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::Ode { steps: 4096 }
    }
}

impl Evaluator {
    pub const DEFAULT_SERIES: Evaluator = Evaluator::Series {
        max_order: 25,
        grid_n: 4096,
    };
    pub const DEFAULT_OPUC: Evaluator = Evaluator::Opuc { n: 100_000 };

    pub fn method(&self) -> Method {
        match self {
            Evaluator::Series { .. } => Method::Series,
            Evaluator::Ode { .. } => Method::Ode,
            Evaluator::Opuc { .. } => Method::Opuc,
        }
    }

    pub fn evaluate<S: Support + ?Sized>(&self, support: &S, sigma: Complex64) -> Result<HexpValue> {
        match *self {
            Evaluator::Series { max_order, grid_n } => {
                eval_series(support, sigma, max_order, grid_n).map(|s| s.value)
            }
            Evaluator::Ode { steps } => eval_ode(support, sigma, steps),
            Evaluator::Opuc { n } => eval_opuc(support, sigma, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexpValue {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub sigma: Complex64,
    pub seg_lo: f64,
    pub seg_hi: f64,
    pub method: Method,
}

impl HexpValue {
    /// `|Re(E₊ Ē₋) − 1|`, which vanishes for real σ.
    pub fn normalization_residual(&self) -> f64 {
        ((self.e_plus * self.e_minus.conj()).re - 1.0).abs()
    }

    pub fn hyperbolic(&self) -> Result<HyperbolicSet> {
        hyperbolic(self)
    }

    fn is_finite(&self) -> bool {
        self.e_plus.is_finite() && self.e_minus.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicSet {
    pub cosh: Complex64,
    pub sinh: Complex64,
    pub sech: Complex64,
    pub tanh: Complex64,
}

/// `Cosh = (E₊ + E₋)/2`, `Sinh = (E₊ − E₋)/2`, `Sech = 1/Cosh`, `Tanh = Sinh/Cosh`.
pub fn hyperbolic(h: &HexpValue) -> Result<HyperbolicSet> {
    let cosh = (h.e_plus + h.e_minus) * 0.5;
    let sinh = (h.e_plus - h.e_minus) * 0.5;
    if cosh.norm() == 0.0 || !cosh.is_finite() {
        return Err(Error::CoshZero);
    }
    Ok(HyperbolicSet {
        cosh,
        sinh,
        sech: cosh.inv(),
        tanh: sinh / cosh,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualValue {
    pub value: Complex64,
}

/// `e^{2i(hi−lo)σ} · conj(value)`; `value` must already be the evaluation at `conj σ`.
pub fn dual(value: Complex64, sigma: Complex64, lo: f64, hi: f64) -> DualValue {
    let phase = (Complex64::new(0.0, 2.0 * (hi - lo)) * sigma).exp();
    DualValue {
        value: phase * value.conj(),
    }
}

/// Bound on the first omitted series term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationEstimate {
    pub beta_sigma: f64,
    pub alpha_l1: f64,
    pub order: usize,
    pub bound: f64,
}

/// Largest order whose factorial is finite in `f64`.
const MAX_FACTORIAL_ORDER: usize = 170;

impl TruncationEstimate {
    pub fn new(sigma: Complex64, length: f64, alpha_l1: f64, order: usize) -> Result<Self> {
        if order > MAX_FACTORIAL_ORDER {
            return Err(Error::OrderOverflow(order));
        }
        let beta_sigma = if sigma.im >= 0.0 {
            1.0
        } else {
            (2.0 * sigma.im.abs() * length).exp()
        };
        let bound = beta_sigma * power_over_factorial(alpha_l1, order);
        Ok(Self {
            beta_sigma,
            alpha_l1,
            order,
            bound,
        })
    }

    /// Bound on the whole tail `Σ_{j ≥ order} |C_j|`.
    pub fn tail_bound(&self) -> f64 {
        let mut term = power_over_factorial(self.alpha_l1, self.order);
        let mut sum = 0.0;
        let mut j = self.order;
        while term > 0.0 && term > 1e-18 * sum {
            sum += term;
            j += 1;
            term *= self.alpha_l1 / j as f64;
        }
        self.beta_sigma * sum
    }
}

fn power_over_factorial(x: f64, n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * x / k as f64)
}

/// Series value with its terms `C_0 = 1, C_1, …, C_J` (for `+α`).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEvaluation {
    pub value: HexpValue,
    pub terms: Vec<Complex64>,
    pub truncation: TruncationEstimate,
}

/// `E_α(σ) = Σ_{j ≤ J} C_j` and `E_{−α}(σ) = Σ (−1)^j C_j`, with the terms from
/// the recursion `F_j = ∫ α G_{j−1}`, `G_j(x) = ∫ e^{2iσ(x−s)} α F_{j−1}`.
pub fn eval_series<S: Support + ?Sized>(
    support: &S,
    sigma: Complex64,
    max_order: usize,
    grid_n: usize,
) -> Result<SeriesEvaluation> {
    let pieces = checked_pieces(support)?;
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!("grid_n must be at least 2, got {grid_n}")));
    }
    let lo = pieces[0].lo();
    let hi = pieces[pieces.len() - 1].hi();
    let l1: f64 = pieces.iter().map(Segment::alpha_l1).sum();
    if !l1.is_finite() {
        return Err(Error::NonFiniteAlpha);
    }
    let truncation = TruncationEstimate::new(sigma, hi - lo, l1, max_order + 1)?;

    let lengths: Vec<f64> = pieces.iter().map(Segment::length).collect();
    let cells = distribute(grid_n, &lengths, 3);
    let lambda = Complex64::new(0.0, 2.0) * sigma;

    struct Piece {
        h: f64,
        alpha: Vec<f64>,
        // e^{2iσ(x_k − start)}
        phase: Vec<Complex64>,
    }
    let grid: Vec<Piece> = pieces
        .iter()
        .zip(&cells)
        .map(|(seg, &m)| {
            let h = seg.length() / m as f64;
            let xs = (0..=m).map(|k| if k == m { seg.hi() } else { seg.lo() + k as f64 * h });
            Piece {
                h,
                alpha: xs.clone().map(|x| seg.alpha(x)).collect(),
                phase: xs.map(|x| (lambda * (x - seg.lo())).exp()).collect(),
            }
        })
        .collect();

    let mut f_prev: Vec<Vec<Complex64>> = grid
        .iter()
        .map(|p| vec![Complex64::new(1.0, 0.0); p.alpha.len()])
        .collect();
    let mut start_phase = Complex64::new(1.0, 0.0);
    let mut g_prev: Vec<Vec<Complex64>> = grid
        .iter()
        .map(|p| {
            let v: Vec<Complex64> = p.phase.iter().map(|e| start_phase * e).collect();
            start_phase = *v.last().unwrap();
            v
        })
        .collect();

    let mut terms = vec![Complex64::new(1.0, 0.0)];
    for _ in 1..=max_order {
        let mut f_next = Vec::with_capacity(grid.len());
        let mut g_next = Vec::with_capacity(grid.len());
        let mut f_start = Complex64::new(0.0, 0.0);
        let mut g_start = Complex64::new(0.0, 0.0);
        for (i, p) in grid.iter().enumerate() {
            let fa: Vec<Complex64> = p.alpha.iter().zip(&g_prev[i]).map(|(a, g)| g * a).collect();
            let ga: Vec<Complex64> = p.alpha.iter().zip(&f_prev[i]).map(|(a, f)| f * a).collect();
            let fi = cumulative_kernel(&fa, p.h, Complex64::new(0.0, 0.0));
            let gi = cumulative_kernel(&ga, p.h, lambda);
            let f: Vec<Complex64> = fi.iter().map(|v| f_start + v).collect();
            let g: Vec<Complex64> = gi.iter().zip(&p.phase).map(|(v, e)| g_start * e + v).collect();
            f_start = *f.last().unwrap();
            g_start = *g.last().unwrap();
            f_next.push(f);
            g_next.push(g);
        }
        terms.push(f_start);
        f_prev = f_next;
        g_prev = g_next;
    }

    let e_plus: Complex64 = terms.iter().sum();
    let e_minus: Complex64 = terms
        .iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { *c } else { -c })
        .sum();
    let value = HexpValue {
        e_plus,
        e_minus,
        sigma,
        seg_lo: lo,
        seg_hi: hi,
        method: Method::Series,
    };
    if !value.is_finite() {
        return Err(Error::NonFiniteResult);
    }
    Ok(SeriesEvaluation {
        value,
        terms,
        truncation,
    })
}

/// Minimum step count accepted by [`eval_ode`].
pub const MIN_ODE_STEPS: usize = 8;

/// RK4 on `F′ = ±αG`, `G′ = ±αF + 2iσG` with `F = G = 1` at the left end.
pub fn eval_ode<S: Support + ?Sized>(support: &S, sigma: Complex64, steps: usize) -> Result<HexpValue> {
    let pieces = checked_pieces(support)?;
    if steps < MIN_ODE_STEPS {
        return Err(Error::StepCountTooSmall {
            got: steps,
            min: MIN_ODE_STEPS,
        });
    }
    let lengths: Vec<f64> = pieces.iter().map(Segment::length).collect();
    let counts = distribute(steps, &lengths, 1);
    let two_i_sigma = Complex64::new(0.0, 2.0) * sigma;
    let one = Complex64::new(1.0, 0.0);
    // [F₊, G₊, F₋, G₋]
    let mut y = [one; 4];
    for (seg, &m) in pieces.iter().zip(&counts) {
        let rhs = |x: f64, y: &[Complex64; 4]| {
            let a = seg.alpha(x);
            [
                y[1] * a,
                y[0] * a + two_i_sigma * y[1],
                -y[3] * a,
                -y[2] * a + two_i_sigma * y[3],
            ]
        };
        let h = seg.length() / m as f64;
        for k in 0..m {
            y = rk4_step(&rhs, seg.lo() + k as f64 * h, &y, h);
        }
    }
    let value = HexpValue {
        e_plus: y[0],
        e_minus: y[2],
        sigma,
        seg_lo: pieces[0].lo(),
        seg_hi: pieces[pieces.len() - 1].hi(),
        method: Method::Ode,
    };
    if !value.is_finite() {
        return Err(Error::NonFiniteResult);
    }
    Ok(value)
}

/// `E_α ≈ Ψ*_{n,n}(e^{2iΔσ})`, `E_{−α} ≈ Φ*_{n,n}(e^{2iΔσ})` with `r_j = Δα(lo + jΔ)`.
pub fn eval_opuc<S: Support + ?Sized>(support: &S, sigma: Complex64, n: usize) -> Result<HexpValue> {
    let pieces = checked_pieces(support)?;
    let chain = VerblunskyChain::from_alpha(pieces, sigma, n)?;
    let q = recurrence_eval(&chain, n)?;
    let value = HexpValue {
        e_plus: q.psi_star,
        e_minus: q.phi_star,
        sigma,
        seg_lo: pieces[0].lo(),
        seg_hi: pieces[pieces.len() - 1].hi(),
        method: Method::Opuc,
    };
    if !value.is_finite() {
        return Err(Error::NonFiniteResult);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::constant_alpha_hexp;
    use crate::profile::AlphaSpec;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI, SQRT_2};

    fn unit_const(c: f64) -> Segment {
        Segment::constant(0.0, 1.0, c).unwrap()
    }

    fn real(s: f64) -> Complex64 {
        Complex64::new(s, 0.0)
    }

    #[test]
    fn zero_alpha_is_identity_for_every_method() {
        let seg = Segment::zero(0.0, 2.0).unwrap();
        let s = Complex64::new(1.3, 0.2);
        let ser = eval_series(&seg, s, 6, 64).unwrap().value;
        let ode = eval_ode(&seg, s, 64).unwrap();
        let op = eval_opuc(&seg, s, 50).unwrap();
        for v in [ser, ode, op] {
            assert_eq!((v.e_plus, v.e_minus), (real(1.0), real(1.0)));
        }
    }

    #[test]
    fn sigma_zero_is_exponential() {
        let seg = unit_const(1.0);
        let ser = eval_series(&seg, real(0.0), 20, 256).unwrap().value;
        assert!((ser.e_plus - E).norm() < 1e-10);
        assert!((ser.e_minus - 1.0 / E).norm() < 1e-10);
        let ode = eval_ode(&seg, real(0.0), 2048).unwrap();
        assert!((ode.e_plus - E).norm() < 1e-10);
        let op = eval_opuc(&seg, real(0.0), 10_000).unwrap();
        assert!((op.e_plus - E).norm() < 2e-4);
        assert!((op.e_minus - 1.0 / E).norm() < 2e-4);
    }

    #[test]
    fn closed_form_agreement() {
        let seg = unit_const(1.0);
        let s = real(2.0);
        let exact_p = constant_alpha_hexp(1.0, 1.0, s);
        let exact_m = constant_alpha_hexp(-1.0, 1.0, s);
        let ser = eval_series(&seg, s, 25, 4096).unwrap().value;
        assert!((ser.e_plus - exact_p).norm() < 1e-8);
        assert!((ser.e_minus - exact_m).norm() < 1e-8);
        let ode = eval_ode(&seg, s, 4096).unwrap();
        assert!((ode.e_plus - exact_p).norm() < 1e-9);
        assert!((ode.e_minus - exact_m).norm() < 1e-9);
        let op = eval_opuc(&seg, s, 100_000).unwrap();
        assert!((op.e_plus - exact_p).norm() < 1e-4);
        assert!((op.e_minus - exact_m).norm() < 1e-4);
    }

    #[test]
    fn composite_support_matches_single_segment() {
        let whole = unit_const(0.7);
        let split = vec![
            Segment::constant(0.0, 0.3, 0.7).unwrap(),
            Segment::constant(0.3, 1.0, 0.7).unwrap(),
        ];
        let s = real(3.0);
        let a = eval_ode(&whole, s, 2000).unwrap();
        let b = eval_ode(&split, s, 2000).unwrap();
        assert!((a.e_plus - b.e_plus).norm() < 1e-10);
        let c = eval_series(&split, s, 25, 2000).unwrap().value;
        assert!((a.e_plus - c.e_plus).norm() < 1e-8);
        let gap = vec![Segment::zero(0.0, 0.3).unwrap(), Segment::zero(0.4, 1.0).unwrap()];
        assert!(eval_ode(&gap, s, 64).is_err());
    }

    #[test]
    fn piecewise_alpha_with_discontinuity() {
        // α jumps from 1 to −2 at the breakpoint
        let pieces = vec![
            Segment::constant(0.0, 0.5, 1.0).unwrap(),
            Segment::constant(0.5, 1.0, -2.0).unwrap(),
        ];
        let s = real(1.5);
        let ser = eval_series(&pieces, s, 30, 4096).unwrap().value;
        let ode = eval_ode(&pieces, s, 8192).unwrap();
        assert!((ser.e_plus - ode.e_plus).norm() < 1e-9);
        assert!((ser.e_minus - ode.e_minus).norm() < 1e-9);
    }

    #[test]
    fn series_second_term_matches_double_quadrature() {
        // C_2 = ∫∫_{s1<s2} α(s1) α(s2) e^{2iσ(s2 − s1)} ds1 ds2 on the Gaussian bump
        let seg = Segment::new(
            0.0,
            1.0,
            AlphaSpec::GaussianBump {
                amplitude: 1.5,
                center: 0.4,
                width: 0.15,
            },
        )
        .unwrap();
        let s = 2.5;
        let terms = eval_series(&seg, real(s), 2, 2048).unwrap().terms;
        let m = 2000;
        let h = 1.0 / m as f64;
        let mut direct = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let s1 = (i as f64 + 0.5) * h;
            for j in 0..m {
                let s2 = (j as f64 + 0.5) * h;
                let w = if j > i { 1.0 } else if j == i { 0.5 } else { 0.0 };
                if w > 0.0 {
                    direct += Complex64::from_polar(w * seg.alpha(s1) * seg.alpha(s2), 2.0 * s * (s2 - s1));
                }
            }
        }
        direct *= h * h;
        assert!((terms[2] - direct).norm() < 1e-5, "{} vs {}", terms[2], direct);
        let first: Complex64 = (0..m)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                Complex64::from_polar(seg.alpha(x), 2.0 * s * x)
            })
            .sum::<Complex64>()
            * h;
        assert!((terms[1] - first).norm() < 1e-6);
    }

    #[test]
    fn truncation_bound_is_honored() {
        let seg = Segment::new(
            0.0,
            2.0,
            AlphaSpec::GaussianBump {
                amplitude: 2.0,
                center: 1.0,
                width: 0.3,
            },
        )
        .unwrap();
        for s in [0.0, 1.0, 4.0] {
            let j = 4;
            let short = eval_series(&seg, real(s), j, 2048).unwrap();
            let long = eval_series(&seg, real(s), j + 10, 2048).unwrap();
            let tail = long.value.e_plus - short.value.e_plus;
            // equality holds at σ = 0 for positive α
            assert!(long.terms[j + 1].norm() <= short.truncation.bound * (1.0 + 1e-9), "{s}");
            assert!(tail.norm() <= short.truncation.tail_bound());
        }
    }

    #[test]
    fn truncation_estimate_fields() {
        let t = TruncationEstimate::new(Complex64::new(1.0, -0.5), 2.0, 3.0, 4).unwrap();
        assert!((t.beta_sigma - 2f64.exp()).abs() < 1e-14);
        assert!((t.bound - t.beta_sigma * 81.0 / 24.0).abs() < 1e-12);
        assert_eq!(TruncationEstimate::new(real(0.0), 1.0, 1.0, 171), Err(Error::OrderOverflow(171)));
        assert!(matches!(eval_series(&unit_const(1.0), real(1.0), 200, 16), Err(Error::OrderOverflow(_))));
    }

    #[test]
    fn ode_rejects_tiny_step_count() {
        assert_eq!(
            eval_ode(&unit_const(1.0), real(1.0), 4),
            Err(Error::StepCountTooSmall { got: 4, min: 8 })
        );
    }

    #[test]
    fn opuc_reports_out_of_range_coefficients() {
        let seg = unit_const(50.0);
        assert!(matches!(
            eval_opuc(&seg, real(1.0), 10),
            Err(Error::VerblunskyOutOfRange { .. })
        ));
    }

    #[test]
    fn hyperbolic_examples() {
        let trivial = HexpValue {
            e_plus: real(1.0),
            e_minus: real(1.0),
            sigma: real(0.0),
            seg_lo: 0.0,
            seg_hi: 1.0,
            method: Method::Ode,
        };
        let h = hyperbolic(&trivial).unwrap();
        assert_eq!((h.cosh, h.sinh, h.sech, h.tanh), (real(1.0), real(0.0), real(1.0), real(0.0)));
        let v = eval_series(&unit_const(1.0), real(0.0), 25, 1024).unwrap().value;
        let h = v.hyperbolic().unwrap();
        assert!((h.cosh - 1f64.cosh()).norm() < 1e-12);
        assert!((h.tanh - 1f64.tanh()).norm() < 1e-12);
        let v = eval_ode(&unit_const(1.0), real(2.0), 4096).unwrap();
        let h = v.hyperbolic().unwrap();
        assert!((h.cosh.norm_sqr() - h.sinh.norm_sqr() - 1.0).abs() < 1e-9);
        assert!((h.cosh * h.sech - 1.0).norm() < 1e-14);
        let zero = HexpValue { e_minus: real(-1.0), ..trivial };
        assert_eq!(hyperbolic(&zero), Err(Error::CoshZero));
    }

    #[test]
    fn dual_examples() {
        let d = dual(real(1.0), real(0.7), 0.0, 2.0);
        assert!((d.value - Complex64::from_polar(1.0, 2.8)).norm() < 1e-15);
        let d = dual(real(1.0), real(PI), 0.0, 0.5);
        assert!((d.value + 1.0).norm() < 1e-15);
    }

    #[test]
    fn dual_of_evaluation_matches_g_equation() {
        // G(x1) from the ODE equals the dual of F evaluated at conj σ
        let seg = Segment::new(0.0, 1.0, AlphaSpec::Linear { intercept: 0.5, slope: -1.0 }).unwrap();
        let s = Complex64::new(1.2, 0.3);
        let f_conj = eval_ode(&seg, s.conj(), 4096).unwrap().e_plus;
        let d = dual(f_conj, s, 0.0, 1.0).value;
        let g_direct = {
            let one = Complex64::new(1.0, 0.0);
            let mut y = [one, one];
            let m = 4096;
            let h = 1.0 / m as f64;
            let rhs = |x: f64, y: &[Complex64; 2]| {
                let a = seg.alpha(x);
                [y[1] * a, y[0] * a + Complex64::new(0.0, 2.0) * s * y[1]]
            };
            for k in 0..m {
                y = rk4_step(&rhs, k as f64 * h, &y, h);
            }
            y[1]
        };
        assert!((d - g_direct).norm() < 1e-10);
    }

    proptest! {
        #[test]
        fn dual_is_involutive(re in -5.0..5.0f64, im in -5.0..5.0f64, s in -10.0..10.0f64, len in 0.01..3.0f64) {
            let v = Complex64::new(re, im);
            let once = dual(v, real(s), 0.0, len).value;
            let twice = dual(once, real(s), 0.0, len).value;
            prop_assert!((twice - v).norm() < 1e-12 * (1.0 + v.norm()));
        }

        #[test]
        fn series_and_ode_agree(amp in -2.0..2.0f64, c in 0.2..0.8f64, w in 0.05..0.3f64, s in -20.0..20.0f64) {
            let seg = Segment::new(0.0, 1.0, AlphaSpec::GaussianBump { amplitude: amp, center: c, width: w }).unwrap();
            let ser = eval_series(&seg, real(s), 25, 4096).unwrap().value;
            let ode = eval_ode(&seg, real(s), 4096).unwrap();
            prop_assert!((ser.e_plus - ode.e_plus).norm() < 1e-7);
            prop_assert!((ser.e_minus - ode.e_minus).norm() < 1e-7);
            prop_assert!(ode.normalization_residual() < 1e-8);
        }

        #[test]
        fn lower_bound_in_upper_half_plane(re in -20.0..20.0f64, im in 0.0..5.0f64, amp in -2.0..2.0f64) {
            let seg = Segment::new(0.0, 1.0, AlphaSpec::Linear { intercept: amp, slope: -amp }).unwrap();
            let v = eval_ode(&seg, Complex64::new(re, im), 4096).unwrap();
            prop_assert!((v.e_plus + v.e_minus).norm() >= SQRT_2 - 1e-8);
        }
    }

    #[test]
    fn opuc_matches_ode_on_random_segments() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let seg = Segment::new(
                0.0,
                1.0,
                AlphaSpec::GaussianBump {
                    amplitude: rng.gen_range(-2.0..2.0),
                    center: rng.gen_range(0.3..0.7),
                    width: rng.gen_range(0.1..0.3),
                },
            )
            .unwrap();
            let s = real(rng.gen_range(-20.0..20.0));
            let ode = eval_ode(&seg, s, 4096).unwrap();
            let op = eval_opuc(&seg, s, 100_000).unwrap();
            assert!((op.e_plus - ode.e_plus).norm() < 1e-3);
        }
    }

    #[test]
    fn approaches_one_at_high_frequency() {
        let seg = Segment::new(
            0.0,
            1.0,
            AlphaSpec::GaussianBump {
                amplitude: 1.0,
                center: 0.5,
                width: 0.1,
            },
        )
        .unwrap();
        let dist: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&s| (eval_ode(&seg, real(s), (40.0 * s) as usize).unwrap().e_plus - 1.0).norm())
            .collect();
        assert!(dist[0] > dist[1] && dist[1] > dist[2], "{dist:?}");
    }

    #[test]
    fn sech_at_i_is_positive() {
        let seg = Segment::new(0.0, 1.0, AlphaSpec::Linear { intercept: 1.0, slope: 0.5 }).unwrap();
        let h = eval_ode(&seg, Complex64::new(0.0, 1.0), 4096).unwrap().hyperbolic().unwrap();
        assert!(h.sech.re > 0.0);
        assert!(h.sech.im.abs() < 1e-9);
    }
}
