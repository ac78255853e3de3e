//! Transfer matrices and propagation of `A = (a, b)` through a profile.
//!
//! On an absolutely continuous stretch `A(x) = G A(x0+)` with
//! `G = [[e^{−iLσ}Cosh, −e^{−iLσ}Sinh], [−conj(·), conj(·)]]`; across a jump
//! `A(y+) = J A(y−)`. The splitting is
//! `a = √ζ/2 (u − u′/(iσ))`, `b = √ζ/2 (u + u′/(iσ))`, so σ = 0 is excluded here.

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hexp::{hyperbolic, Evaluator, Support};
use crate::numerics::{cumulative_kernel, distribute};
use crate::profile::{jump_matrix, ImpedanceProfile, Segment, Side};
use crate::su11::Su11Matrix;

/// `G` over a contiguous support at real frequency σ.
pub fn g_matrix<S: Support + ?Sized>(support: &S, sigma: f64, evaluator: Evaluator) -> Result<Su11Matrix> {
    let v = evaluator.evaluate(support, Complex64::new(sigma, 0.0))?;
    let h = hyperbolic(&v)?;
    let phase = Complex64::from_polar(1.0, -(v.seg_hi - v.seg_lo) * sigma);
    Ok(Su11Matrix::new(phase * h.cosh, phase * h.sinh))
}

/// `H = G⁻¹ = [[z̄, w], [w̄, z]]`.
pub fn h_matrix(g: &Su11Matrix) -> Result<Su11Matrix> {
    g.inverse()
}

/// `(a, b)` at a point, for a real frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldState {
    pub a: Complex64,
    pub b: Complex64,
    pub x: f64,
    pub sigma: f64,
}

impl FieldState {
    pub fn from_u_du(u: Complex64, du: Complex64, zeta: f64, x: f64, sigma: f64) -> Result<Self> {
        if sigma == 0.0 {
            return Err(Error::SigmaZero);
        }
        let s = 0.5 * zeta.sqrt();
        let q = du / Complex64::new(0.0, sigma);
        Ok(Self {
            a: (u - q) * s,
            b: (u + q) * s,
            x,
            sigma,
        })
    }

    /// `(u, u′)` given `ζ` at the state's location (one-sided at a jump).
    pub fn u_du(&self, zeta: f64) -> (Complex64, Complex64) {
        let r = zeta.sqrt();
        (
            (self.a + self.b) / r,
            Complex64::new(0.0, self.sigma) * (self.b - self.a) / r,
        )
    }

    fn vector(&self) -> [Complex64; 2] {
        [self.a, self.b]
    }

    fn moved(&self, v: [Complex64; 2], x: f64) -> Self {
        Self {
            a: v[0],
            b: v[1],
            x,
            sigma: self.sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    segment: usize,
    sigma_bits: u64,
    evaluator: Evaluator,
}

/// Propagator for one profile and evaluator, with per-segment `G` matrices cached.
///
/// The cache may be shared across threads; concurrent misses for the same key
/// compute the same matrix twice and keep whichever lands first.
#[derive(Debug)]
pub struct Transfer<'p> {
    profile: &'p ImpedanceProfile,
    evaluator: Evaluator,
    cache: RwLock<HashMap<CacheKey, Su11Matrix>>,
}

/// Where a requested point sits relative to the segments.
enum Location {
    /// Interior point of segment `i` (or its right end when `end` is true).
    Segment { i: usize, end: bool },
    /// After segment `i` and its jump matrix.
    AfterJump(usize),
}

impl<'p> Transfer<'p> {
    pub fn new(profile: &'p ImpedanceProfile, evaluator: Evaluator) -> Self {
        Self {
            profile,
            evaluator,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn profile(&self) -> &ImpedanceProfile {
        self.profile
    }

    pub fn evaluator(&self) -> Evaluator {
        self.evaluator
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("cache lock poisoned").len()
    }

    /// `G` of segment `i` at σ.
    pub fn segment_g(&self, i: usize, sigma: f64) -> Result<Su11Matrix> {
        let key = CacheKey {
            segment: i,
            sigma_bits: sigma.to_bits(),
            evaluator: self.evaluator,
        };
        if let Some(g) = self.cache.read().expect("cache lock poisoned").get(&key) {
            return Ok(*g);
        }
        let g = g_matrix(&self.profile.segments()[i], sigma, self.evaluator)?;
        self.cache
            .write()
            .expect("cache lock poisoned")
            .entry(key)
            .or_insert(g);
        Ok(g)
    }

    /// Product of every segment `G` and jump `J` from `x0+` to `x1−`.
    pub fn total(&self, sigma: f64) -> Result<Su11Matrix> {
        let mut m = Su11Matrix::IDENTITY;
        for i in 0..self.profile.segments().len() {
            m = self.segment_g(i, sigma)? * m;
            if let Some(j) = self.profile.jumps().get(i) {
                if !j.is_trivial() {
                    m = jump_matrix(j.gamma)? * m;
                }
            }
        }
        Ok(m)
    }

    fn locate(&self, x: f64, side: Option<Side>) -> Result<Location> {
        let p = self.profile;
        let last = p.segments().len() - 1;
        if (x - p.x1()).abs() <= 1e-12 * (1.0 + x.abs()) {
            return Ok(Location::Segment { i: last, end: true });
        }
        for (i, jump) in p.jumps().iter().enumerate() {
            if (x - jump.y).abs() <= 1e-12 * (1.0 + x.abs()) {
                if jump.is_trivial() {
                    return Ok(Location::Segment { i, end: true });
                }
                return match side {
                    Some(Side::Left) => Ok(Location::Segment { i, end: true }),
                    Some(Side::Right) => Ok(Location::AfterJump(i)),
                    None => Err(Error::AtJump { y: jump.y }),
                };
            }
        }
        let i = p.segment_index_at(x)?;
        Ok(Location::Segment { i, end: false })
    }

    /// `A(x)` from `A(x0+)`. At a jump, `side` selects `A(y−)` or `A(y+)`;
    /// without it the request fails with `AtJump`.
    pub fn propagate(&self, a0: &FieldState, x: f64, side: Option<Side>) -> Result<FieldState> {
        let p = self.profile;
        if a0.sigma == 0.0 {
            return Err(Error::SigmaZero);
        }
        if (a0.x - p.x0()).abs() > 1e-12 * (1.0 + a0.x.abs()) {
            return Err(Error::InvalidArgument(format!(
                "initial state must sit at x0 = {}, got {}",
                p.x0(),
                a0.x
            )));
        }
        if (x - p.x0()).abs() <= 1e-12 * (1.0 + x.abs()) {
            return Ok(*a0);
        }
        let sigma = a0.sigma;
        let (upto, partial, jump_after) = match self.locate(x, side)? {
            Location::Segment { i, end: true } => (i + 1, None, None),
            Location::Segment { i, end: false } => (i, Some(i), None),
            Location::AfterJump(i) => (i + 1, None, Some(i)),
        };
        let mut v = a0.vector();
        for i in 0..upto {
            v = self.segment_g(i, sigma)?.apply(v);
            let ends_at_jump = i + 1 == upto && partial.is_none() && jump_after != Some(i);
            if !ends_at_jump {
                if let Some(j) = p.jumps().get(i) {
                    if !j.is_trivial() {
                        v = jump_matrix(j.gamma)?.apply(v);
                    }
                }
            }
        }
        if let Some(i) = partial {
            let seg = &p.segments()[i];
            if x > seg.lo() {
                let part = seg.restrict(seg.lo(), x)?;
                v = g_matrix(&part, sigma, self.evaluator)?.apply(v);
            }
        }
        Ok(a0.moved(v, x))
    }

    fn zeta(&self, x: f64, side: Option<Side>) -> Result<f64> {
        let p = self.profile;
        if (x - p.x1()).abs() <= 1e-12 * (1.0 + x.abs()) {
            return p.zeta_one_sided(x, Side::Left);
        }
        if (x - p.x0()).abs() <= 1e-12 * (1.0 + x.abs()) {
            return p.zeta_one_sided(x, Side::Right);
        }
        match side {
            Some(s) => p.zeta_one_sided(x, s),
            None => p.zeta_at(x),
        }
    }

    /// `(u, u′)` at `x` from `u(x0+) = u0`, `u′(x0+) = du0`.
    pub fn wavefield(
        &self,
        sigma: f64,
        u0: Complex64,
        du0: Complex64,
        x: f64,
        side: Option<Side>,
    ) -> Result<(Complex64, Complex64)> {
        let p = self.profile;
        let a0 = FieldState::from_u_du(u0, du0, p.zeta_left(), p.x0(), sigma)?;
        let a = self.propagate(&a0, x, side)?;
        Ok(a.u_du(self.zeta(x, side)?))
    }
}

/// `A(x)` from `A(x0+)` through the profile; `sigma` overrides the state's frequency.
pub fn propagate(
    profile: &ImpedanceProfile,
    sigma: f64,
    a0: &FieldState,
    x: f64,
    evaluator: Evaluator,
) -> Result<FieldState> {
    let a0 = FieldState { sigma, ..*a0 };
    Transfer::new(profile, evaluator).propagate(&a0, x, None)
}

/// `(u, u′)` at `x` from `u(x0+) = u0`, `u′(x0+) = du0`.
pub fn wavefield_u(
    profile: &ImpedanceProfile,
    sigma: f64,
    u0: Complex64,
    du0: Complex64,
    x: f64,
    evaluator: Evaluator,
) -> Result<(Complex64, Complex64)> {
    Transfer::new(profile, evaluator).wavefield(sigma, u0, du0, x, None)
}

/// `(u, u′)` on an absolutely continuous stretch in closed form from `G`:
/// with `P = z − w̄` and `Q = z + w̄`,
/// `u = ρ (u0 Re P − u0′ Im P / σ)` and `u′ = ρ (σ u0 Im Q + u0′ Re Q)`,
/// where `ρ = √(ζ(start)/ζ(x))`. Real `(u0, u0′)` give real output.
pub fn u_form(g: &Su11Matrix, zeta_ratio: f64, sigma: f64, u0: f64, du0: f64) -> Result<(f64, f64)> {
    if sigma == 0.0 {
        return Err(Error::SigmaZero);
    }
    let rho = zeta_ratio.sqrt();
    let p = g.z - g.w.conj();
    let q = g.z + g.w.conj();
    Ok((
        rho * (u0 * p.re - du0 * p.im / sigma),
        rho * (sigma * u0 * q.im + du0 * q.re),
    ))
}

/// Cosine and sine coefficient sums of the alternating-phase expansion
/// truncated at `max_order`: `u = ρ (c_u u0 + c_du u0′)` with
/// `c_u = Σ (−1)^j Re V_j`, `c_du = −(1/σ) Σ Im V_j`, where `V_j` is the `j`-fold
/// iterated integral whose phases alternate starting from `−(−1)^j`.
pub fn cos_sin_series<S: Support + ?Sized>(
    support: &S,
    sigma: f64,
    max_order: usize,
    grid_n: usize,
) -> Result<(f64, f64)> {
    if sigma == 0.0 {
        return Err(Error::SigmaZero);
    }
    let pieces = support.pieces();
    if pieces.is_empty() || grid_n < 2 {
        return Err(Error::InvalidArgument("need at least one segment and grid_n >= 2".into()));
    }
    let lo = pieces[0].lo();
    let lengths: Vec<f64> = pieces.iter().map(Segment::length).collect();
    let cells = distribute(grid_n, &lengths, 3);
    let grid: Vec<(f64, Vec<f64>, Vec<f64>)> = pieces
        .iter()
        .zip(&cells)
        .map(|(seg, &m)| {
            let h = seg.length() / m as f64;
            let xs: Vec<f64> = (0..=m).map(|k| if k == m { seg.hi() } else { seg.lo() + k as f64 * h }).collect();
            let alpha = xs.iter().map(|&x| seg.alpha(x)).collect();
            (h, xs, alpha)
        })
        .collect();

    let mut c_u = 0.0;
    let mut c_du = 0.0;
    for first in [-1.0, 1.0] {
        // chain with phases first, −first, first, …; order j uses first = −(−1)^j
        let mut eps = first;
        let mut v: Vec<Vec<Complex64>> = grid
            .iter()
            .map(|(_, xs, _)| {
                xs.iter()
                    .map(|&x| Complex64::from_polar(1.0, sigma * eps * (x - lo)))
                    .collect()
            })
            .collect();
        for j in 0..=max_order {
            let wanted = if j % 2 == 0 { -1.0 } else { 1.0 };
            if wanted == first {
                let end = *v.last().unwrap().last().unwrap();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                c_u += sign * end.re;
                c_du -= end.im / sigma;
            }
            if j == max_order {
                break;
            }
            eps = -eps;
            let lambda = Complex64::new(0.0, sigma * eps);
            let mut start = Complex64::new(0.0, 0.0);
            v = grid
                .iter()
                .zip(&v)
                .map(|((h, xs, alpha), prev)| {
                    let f: Vec<Complex64> = prev.iter().zip(alpha).map(|(p, a)| p * a).collect();
                    let cum = cumulative_kernel(&f, *h, lambda);
                    let x_start = xs[0];
                    let out: Vec<Complex64> = cum
                        .iter()
                        .zip(xs)
                        .map(|(c, &x)| start * (lambda * (x - x_start)).exp() + c)
                        .collect();
                    start = *out.last().unwrap();
                    out
                })
                .collect();
        }
    }
    Ok((c_u, c_du))
}

/// Diagonal high-frequency asymptote `D = diag(e^{−iLσ}, e^{iLσ})` of a segment's `G`.
pub fn high_freq_g(segment: &Segment, sigma: f64) -> Su11Matrix {
    Su11Matrix::phase(segment.length() * sigma)
}

/// Exact transfer matrix of a step profile (α ≡ 0): diagonal phases and jumps.
pub fn step_transfer(step_profile: &ImpedanceProfile, sigma: f64) -> Result<Su11Matrix> {
    if !step_profile.is_step() {
        return Err(Error::NonStepProfile);
    }
    step_chain(step_profile, sigma)
}

/// Same chain with every segment replaced by its high-frequency asymptote.
pub fn step_chain(profile: &ImpedanceProfile, sigma: f64) -> Result<Su11Matrix> {
    let mut m = Su11Matrix::IDENTITY;
    for (i, seg) in profile.segments().iter().enumerate() {
        m = high_freq_g(seg, sigma) * m;
        if let Some(j) = profile.jumps().get(i) {
            m = jump_matrix(j.gamma)? * m;
        }
    }
    Ok(m)
}

/// `A(x1−)` of a step profile from `A(x0+)`.
pub fn step_solution(step_profile: &ImpedanceProfile, sigma: f64, a0: &FieldState) -> Result<FieldState> {
    if sigma == 0.0 {
        return Err(Error::SigmaZero);
    }
    let v = step_transfer(step_profile, sigma)?.apply(a0.vector());
    Ok(a0.moved(v, step_profile.x1()))
}
