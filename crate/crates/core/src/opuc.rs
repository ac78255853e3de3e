//! Orthogonal polynomials on the unit circle driven by real Verblunsky coefficients.
//!
//! The matrix `M₀ M₁ ⋯ M_j`, with `M₀ = [[1, 1], [−1, 1]]` and
//! `M_k = [[z, z r_k], [r_k, 1]]`, has entries `[[Ψ_j, Ψ*_j], [−Φ_j, Φ*_j]]`.
//! `Φ_j` is the monic Szegő polynomial; `Ψ_j` is the same object for the negated
//! coefficients.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::profile::Segment;

/// Largest `n` accepted by [`psi_star_explicit`].
pub const EXPLICIT_MAX_N: usize = 20;
/// Largest `n` accepted by [`PolyCoefficients::from_chain`].
pub const COEFFICIENT_MAX_N: usize = 12;
/// Default number of circle samples for [`zero_free_check`].
pub const CIRCLE_POINTS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyChain {
    coeffs: Vec<f64>,
    delta: f64,
    z_ref: Complex64,
}

impl VerblunskyChain {
    pub fn new(coeffs: Vec<f64>, delta: f64, z_ref: Complex64) -> Result<Self> {
        for (i, r) in coeffs.iter().enumerate() {
            if !(r.abs() < 1.0) {
                return Err(Error::VerblunskyOutOfRange { index: i + 1, r: *r });
            }
        }
        Ok(Self { coeffs, delta, z_ref })
    }

    /// `r_j = Δ α(y_j)` on the uniform partition `y_j = lo + jΔ`, `Δ = L/n`,
    /// evaluated at `z = e^{2iΔσ}`.
    pub fn from_alpha(pieces: &[Segment], sigma: Complex64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("OPUC evaluation needs n >= 1".into()));
        }
        let lo = pieces[0].lo();
        let hi = pieces[pieces.len() - 1].hi();
        let delta = (hi - lo) / n as f64;
        let mut piece = 0;
        let coeffs = (1..=n)
            .map(|j| {
                let y = if j == n { hi } else { lo + j as f64 * delta };
                while piece + 1 < pieces.len() && y > pieces[piece].hi() {
                    piece += 1;
                }
                delta * pieces[piece].alpha(y)
            })
            .collect();
        let z = (Complex64::new(0.0, 2.0 * delta) * sigma).exp();
        Self::new(coeffs, delta, z)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn z_ref(&self) -> Complex64 {
        self.z_ref
    }

    pub fn at(&self, z: Complex64) -> Self {
        Self {
            z_ref: z,
            ..self.clone()
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|r| -r).collect(),
            ..self.clone()
        }
    }

    /// `Π (1 − r_k²)`.
    pub fn norm_product(&self) -> f64 {
        self.coeffs.iter().map(|r| 1.0 - r * r).product()
    }
}

/// Values of `Ψ_j, Ψ*_j, Φ_j, Φ*_j` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyQuad {
    pub psi: Complex64,
    pub psi_star: Complex64,
    pub phi: Complex64,
    pub phi_star: Complex64,
}

impl PolyQuad {
    pub const ONE: PolyQuad = PolyQuad {
        psi: Complex64::new(1.0, 0.0),
        psi_star: Complex64::new(1.0, 0.0),
        phi: Complex64::new(1.0, 0.0),
        phi_star: Complex64::new(1.0, 0.0),
    };

    /// Determinant of `[[Ψ, Ψ*], [−Φ, Φ*]]`.
    pub fn det(&self) -> Complex64 {
        self.psi * self.phi_star + self.phi * self.psi_star
    }
}

fn check_index(chain: &VerblunskyChain, j: usize) -> Result<()> {
    if j > chain.n() {
        return Err(Error::IndexOutOfRange { index: j, max: chain.n() });
    }
    Ok(())
}

/// `M₀ M₁ ⋯ M_j` by explicit 2×2 multiplication.
pub fn product_eval(chain: &VerblunskyChain, j: usize) -> Result<PolyQuad> {
    check_index(chain, j)?;
    let z = chain.z_ref;
    let one = Complex64::new(1.0, 0.0);
    let mut m = [[one, one], [-one, one]];
    for &r in &chain.coeffs[..j] {
        let f = [[z, z * r], [Complex64::new(r, 0.0), one]];
        m = crate::su11::mat_mul(&m, &f);
    }
    Ok(PolyQuad {
        psi: m[0][0],
        psi_star: m[0][1],
        phi: -m[1][0],
        phi_star: m[1][1],
    })
}

/// One Szegő step `Φ_{j+1} = zΦ_j − rΦ*_j`, `Φ*_{j+1} = Φ*_j − z r Φ_j`.
/// The Ψ pair follows the same step with `−r`.
pub fn szego_step(phi: Complex64, phi_star: Complex64, z: Complex64, r: f64) -> (Complex64, Complex64) {
    (z * phi - phi_star * r, phi_star - z * phi * r)
}

/// Same values as [`product_eval`], by recurrence.
pub fn recurrence_eval(chain: &VerblunskyChain, j: usize) -> Result<PolyQuad> {
    check_index(chain, j)?;
    let z = chain.z_ref;
    let mut q = PolyQuad::ONE;
    for &r in &chain.coeffs[..j] {
        (q.phi, q.phi_star) = szego_step(q.phi, q.phi_star, z, r);
        (q.psi, q.psi_star) = szego_step(q.psi, q.psi_star, z, -r);
    }
    Ok(q)
}

/// `Ψ*_{n,n}(z)` as the sum over index tuples `ν_1 < ⋯ < ν_k` of
/// `z^{κ(ν)} Π r_{ν_i}`, where `κ` pairs indices from the right with alternating
/// signs and an odd leftover pairs with 0.
///
/// Tuples are enumerated from the right with two coefficient vectors: sets with
/// an even count (exponent complete) and an odd count (leftmost index pending).
pub fn psi_star_explicit(chain: &VerblunskyChain) -> Result<Complex64> {
    let n = chain.n();
    if n > EXPLICIT_MAX_N {
        return Err(Error::NTooLargeForExplicit { n, max: EXPLICIT_MAX_N });
    }
    let mut even = vec![0.0; n + 1];
    let mut odd = vec![0.0; n + 1];
    even[0] = 1.0;
    for nu in (1..=n).rev() {
        let r = chain.coeffs[nu - 1];
        let mut next_even = even.clone();
        let mut next_odd = odd.clone();
        for e in 0..=n {
            if even[e] != 0.0 {
                next_odd[e + nu] += even[e] * r;
            }
            if odd[e] != 0.0 {
                // pending exponent always exceeds the index being subtracted
                next_even[e - nu] += odd[e] * r;
            }
        }
        even = next_even;
        odd = next_odd;
    }
    let total: Vec<f64> = even.iter().zip(&odd).map(|(a, b)| a + b).collect();
    Ok(horner(&total, chain.z_ref))
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Coefficient vectors (ascending powers) of the four polynomials at index `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoefficients {
    pub psi: Vec<f64>,
    pub psi_star: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_star: Vec<f64>,
}

impl PolyCoefficients {
    pub fn from_chain(chain: &VerblunskyChain, j: usize) -> Result<Self> {
        let n = chain.n();
        if n > COEFFICIENT_MAX_N {
            return Err(Error::NTooLargeForExplicit { n, max: COEFFICIENT_MAX_N });
        }
        check_index(chain, j)?;
        let step = |p: &[f64], ps: &[f64], r: f64| {
            // (zP − r P*, P* − r zP)
            let mut zp = vec![0.0; p.len() + 1];
            zp[1..].copy_from_slice(p);
            let mut ps_ext = ps.to_vec();
            ps_ext.push(0.0);
            let next: Vec<f64> = zp.iter().zip(&ps_ext).map(|(a, b)| a - r * b).collect();
            let next_star: Vec<f64> = ps_ext.iter().zip(&zp).map(|(a, b)| a - r * b).collect();
            (next, next_star)
        };
        let mut c = PolyCoefficients {
            psi: vec![1.0],
            psi_star: vec![1.0],
            phi: vec![1.0],
            phi_star: vec![1.0],
        };
        for &r in &chain.coeffs[..j] {
            (c.phi, c.phi_star) = step(&c.phi, &c.phi_star, r);
            (c.psi, c.psi_star) = step(&c.psi, &c.psi_star, -r);
        }
        Ok(c)
    }

    pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
        horner(coeffs, z)
    }
}

/// Orthogonality density of `Φ_{n,0..n}`: `Π(1 − r²) / (2π |Φ_{n,n}(e^{iθ})|²)`.
pub fn measure_density(chain: &VerblunskyChain, theta: f64) -> f64 {
    density(chain, theta, false)
}

/// Orthogonality density of `Ψ_{n,0..n}`, the same with `|Ψ_{n,n}|²`.
pub fn measure_density_psi(chain: &VerblunskyChain, theta: f64) -> f64 {
    density(chain, theta, true)
}

fn density(chain: &VerblunskyChain, theta: f64, psi: bool) -> f64 {
    let q = recurrence_eval(&chain.at(Complex64::from_polar(1.0, theta)), chain.n())
        .expect("index n is always in range");
    let p = if psi { q.psi } else { q.phi };
    chain.norm_product() / (2.0 * PI * p.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroFreeTarget {
    PhiStar,
    PsiStar,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFreeReport {
    pub min_modulus: f64,
    pub winding: i64,
    /// `√2 Π √(1 − r²)`, reported for the `Ψ* + Φ*` target.
    pub lower_bound: Option<f64>,
}

impl ZeroFreeReport {
    pub fn meets_lower_bound(&self, tol: f64) -> bool {
        self.lower_bound.is_none_or(|b| self.min_modulus >= b - tol)
    }
}

/// Minimum modulus and winding number of `Φ*_{n,n}`, `Ψ*_{n,n}` or their sum along
/// the unit circle. A zero winding number certifies no roots in the open disk.
pub fn zero_free_check(chain: &VerblunskyChain, which: ZeroFreeTarget) -> Result<ZeroFreeReport> {
    zero_free_check_with(chain, which, CIRCLE_POINTS)
}

pub fn zero_free_check_with(
    chain: &VerblunskyChain,
    which: ZeroFreeTarget,
    points: usize,
) -> Result<ZeroFreeReport> {
    let value = |theta: f64| {
        let q = recurrence_eval(&chain.at(Complex64::from_polar(1.0, theta)), chain.n())
            .expect("index n is always in range");
        match which {
            ZeroFreeTarget::PhiStar => q.phi_star,
            ZeroFreeTarget::PsiStar => q.psi_star,
            ZeroFreeTarget::Sum => q.phi_star + q.psi_star,
        }
    };
    let first = value(0.0);
    let mut prev = first;
    let mut min_modulus = first.norm();
    let mut turn = 0.0;
    for k in 1..=points {
        let cur = if k == points {
            first
        } else {
            value(2.0 * PI * k as f64 / points as f64)
        };
        min_modulus = min_modulus.min(cur.norm());
        turn += (cur / prev).arg();
        prev = cur;
    }
    let winding = (turn / (2.0 * PI)).round() as i64;
    if winding != 0 {
        return Err(Error::WindingNonzero(winding));
    }
    let lower_bound = (which == ZeroFreeTarget::Sum).then(|| SQRT_2 * chain.norm_product().sqrt());
    Ok(ZeroFreeReport {
        min_modulus,
        winding,
        lower_bound,
    })
}
