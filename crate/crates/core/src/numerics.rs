//! Small fixed-order numerical kernels shared by the evaluators and the oracles.

use num_complex::Complex64;

/// Cell weights (×h/24) of the cubic-interpolation rule on the four nodes
/// surrounding a cell. The first and last cells use one-sided stencils.
const W_FIRST: [f64; 4] = [9.0, 19.0, -5.0, 1.0];
const W_INTERIOR: [f64; 4] = [-1.0, 13.0, 13.0, -1.0];
const W_LAST: [f64; 4] = [1.0, -5.0, 19.0, 9.0];

/// Fourth-order cumulative integral with an exponential kernel on a uniform grid.
///
/// Returns `I` with `I[0] = 0` and
/// `I[k] = ∫_{x_0}^{x_k} exp(λ (x_k − s)) f(s) ds`, so that `λ = 0` gives the
/// plain running integral. Needs at least four nodes.
pub fn cumulative_kernel(f: &[Complex64], h: f64, lambda: Complex64) -> Vec<Complex64> {
    let m = f.len();
    assert!(m >= 4, "cumulative_kernel needs at least 4 nodes, got {m}");
    let last = m - 1;
    // e^{λ h d} for d = -2..=3
    let pw: [Complex64; 6] = std::array::from_fn(|i| (lambda * h * (i as f64 - 2.0)).exp());
    let phase = |d: i64| pw[(d + 2) as usize];
    let step = pw[3];

    let mut out = Vec::with_capacity(m);
    out.push(Complex64::new(0.0, 0.0));
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..last {
        let (base, w) = if k == 0 {
            (0, &W_FIRST)
        } else if k + 1 == last {
            (last - 3, &W_LAST)
        } else {
            (k - 1, &W_INTERIOR)
        };
        let mut cell = Complex64::new(0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            let node = base + i;
            cell += f[node] * phase(k as i64 + 1 - node as i64) * *wi;
        }
        acc = acc * step + cell * (h / 24.0);
        out.push(acc);
    }
    out
}

/// One classical fourth-order Runge–Kutta step for an autonomous-in-form
/// system `y' = f(x, y)` with `N` complex components.
pub fn rk4_step<const N: usize, F>(f: &F, x: f64, y: &[Complex64; N], h: f64) -> [Complex64; N]
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let axpy = |y: &[Complex64; N], k: &[Complex64; N], s: f64| -> [Complex64; N] {
        std::array::from_fn(|i| y[i] + k[i] * s)
    };
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = f(x + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = f(x + h, &axpy(y, &k3, h));
    std::array::from_fn(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
}

/// `sinh(k)/k` with the removable singularity at `k = 0` filled in.
pub fn sinhc(k: Complex64) -> Complex64 {
    if k.norm() < 1e-4 {
        let k2 = k * k;
        Complex64::new(1.0, 0.0) + k2 / 6.0 + k2 * k2 / 120.0
    } else {
        k.sinh() / k
    }
}

/// Splits `n` units over pieces proportionally to their lengths, with a floor.
pub(crate) fn distribute(n: usize, lengths: &[f64], min_each: usize) -> Vec<usize> {
    let total: f64 = lengths.iter().sum();
    lengths
        .iter()
        .map(|l| (((n as f64) * l / total).round() as usize).max(min_each))
        .collect()
}
