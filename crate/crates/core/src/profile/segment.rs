use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::sync::Arc;

use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Uniformly sampled α, linearly interpolated between samples.
///
/// Coordinates are absolute: sample `k` sits at `origin + k * spacing`. A
/// restricted segment keeps pointing at the parent samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAlpha {
    origin: f64,
    spacing: f64,
    samples: Arc<[f64]>,
    // running trapezoid integral at each node
    cumulative: Arc<[f64]>,
}

impl GridAlpha {
    pub fn new(origin: f64, spacing: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidProfile("grid alpha needs at least 2 samples".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite() && origin.is_finite()) {
            return Err(Error::InvalidProfile(format!("bad grid spacing {spacing}")));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!("grid sample {bad} is not finite")));
        }
        let mut cumulative = Vec::with_capacity(samples.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in samples.windows(2) {
            acc += 0.5 * spacing * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Ok(Self {
            origin,
            spacing,
            samples: samples.into(),
            cumulative: cumulative.into(),
        })
    }

    /// Samples spanning `[lo, hi]` inclusive.
    pub fn spanning(lo: f64, hi: f64, samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InvalidProfile("grid alpha needs at least 2 samples".into()));
        }
        Self::new(lo, (hi - lo) / (n - 1) as f64, samples)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn end(&self) -> f64 {
        self.origin + self.spacing * (self.samples.len() - 1) as f64
    }

    // cell index and fractional offset, clamped into the grid
    fn locate(&self, x: f64) -> (usize, f64) {
        let last = self.samples.len() - 1;
        let p = ((x - self.origin) / self.spacing).clamp(0.0, last as f64);
        let k = (p.floor() as usize).min(last - 1);
        (k, p - k as f64)
    }

    fn value(&self, x: f64) -> f64 {
        let (k, t) = self.locate(x);
        self.samples[k] + t * (self.samples[k + 1] - self.samples[k])
    }

    fn antiderivative(&self, x: f64) -> f64 {
        let (k, t) = self.locate(x);
        let f0 = self.samples[k];
        let f1 = self.samples[k + 1];
        self.cumulative[k] + self.spacing * (t * f0 + 0.5 * t * t * (f1 - f0))
    }

    fn l1(&self, a: f64, b: f64) -> f64 {
        let (ka, _) = self.locate(a);
        let (kb, _) = self.locate(b);
        let mut total = 0.0;
        for k in ka..=kb {
            let cell_lo = self.origin + k as f64 * self.spacing;
            let lo = a.max(cell_lo);
            let hi = b.min(cell_lo + self.spacing);
            if hi > lo {
                total += linear_l1(self.value(lo), self.value(hi), hi - lo);
            }
        }
        total
    }

    fn central_difference(&self, k: usize) -> f64 {
        (self.samples[k + 1] - self.samples[k - 1]) / (2.0 * self.spacing)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        let last = self.samples.len() - 1;
        let p = (x - self.origin) / self.spacing;
        let nearest = p.round();
        if (p - nearest).abs() < 1e-9 {
            let k = nearest as i64;
            if k >= 1 && (k as usize) < last {
                return Ok(self.central_difference(k as usize));
            }
            return Err(Error::BoundaryPoint(x));
        }
        let k = p.floor() as i64;
        if k >= 1 && ((k + 1) as usize) < last {
            let k = k as usize;
            let t = p - k as f64;
            let d0 = self.central_difference(k);
            let d1 = self.central_difference(k + 1);
            return Ok(d0 + t * (d1 - d0));
        }
        Err(Error::BoundaryPoint(x))
    }
}

/// ∫|f| for `f` linear on an interval of length `len` with end values `fa`, `fb`.
fn linear_l1(fa: f64, fb: f64, len: f64) -> f64 {
    if fa * fb >= 0.0 {
        0.5 * len * (fa + fb).abs()
    } else {
        0.5 * len * (fa * fa + fb * fb) / (fa.abs() + fb.abs())
    }
}

/// The log-derivative `α = −½ (log ζ)′` on one absolutely continuous piece.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    Zero,
    Constant(f64),
    /// `α(x) = intercept + slope · x`
    Linear { intercept: f64, slope: f64 },
    /// `α(x) = amplitude · exp(−(x − center)² / (2 width²))`
    GaussianBump {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    Grid(GridAlpha),
}

impl AlphaSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AlphaSpec::Zero => "zero",
            AlphaSpec::Constant(_) => "constant",
            AlphaSpec::Linear { .. } => "linear",
            AlphaSpec::GaussianBump { .. } => "gaussian-bump",
            AlphaSpec::Grid(_) => "grid",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AlphaSpec::Zero => true,
            AlphaSpec::Constant(c) => *c == 0.0,
            AlphaSpec::Linear { intercept, slope } => *intercept == 0.0 && *slope == 0.0,
            AlphaSpec::GaussianBump { amplitude, .. } => *amplitude == 0.0,
            AlphaSpec::Grid(g) => g.samples.iter().all(|v| *v == 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidProfile(format!("{what} = {v} is not finite")))
            }
        };
        match self {
            AlphaSpec::Zero | AlphaSpec::Grid(_) => Ok(()),
            AlphaSpec::Constant(c) => finite(*c, "constant alpha"),
            AlphaSpec::Linear { intercept, slope } => {
                finite(*intercept, "intercept")?;
                finite(*slope, "slope")
            }
            AlphaSpec::GaussianBump {
                amplitude,
                center,
                width,
            } => {
                finite(*amplitude, "amplitude")?;
                finite(*center, "center")?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::InvalidProfile(format!("gaussian width {width} must be positive")));
                }
                Ok(())
            }
        }
    }

    fn translated(&self, d: f64) -> AlphaSpec {
        match self {
            AlphaSpec::Zero | AlphaSpec::Constant(_) => self.clone(),
            AlphaSpec::Linear { intercept, slope } => AlphaSpec::Linear {
                intercept: intercept - slope * d,
                slope: *slope,
            },
            AlphaSpec::GaussianBump {
                amplitude,
                center,
                width,
            } => AlphaSpec::GaussianBump {
                amplitude: *amplitude,
                center: center + d,
                width: *width,
            },
            AlphaSpec::Grid(g) => AlphaSpec::Grid(GridAlpha {
                origin: g.origin + d,
                ..g.clone()
            }),
        }
    }
}

/// A sub-interval `[lo, hi]` of the profile carrying its own α.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    lo: f64,
    hi: f64,
    alpha: AlphaSpec,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, alpha: AlphaSpec) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidProfile(format!("segment ({lo}, {hi}) is empty or not finite")));
        }
        alpha.validate()?;
        if let AlphaSpec::Grid(g) = &alpha {
            let slack = 1e-9 * g.spacing;
            if lo < g.origin - slack || hi > g.end() + slack {
                return Err(Error::InvalidProfile(format!(
                    "grid covers [{}, {}] but segment is [{lo}, {hi}]",
                    g.origin,
                    g.end()
                )));
            }
        }
        Ok(Self { lo, hi, alpha })
    }

    pub fn zero(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, AlphaSpec::Zero)
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Result<Self> {
        Self::new(lo, hi, AlphaSpec::Constant(c))
    }

    /// Grid α with samples spanning exactly `[lo, hi]`.
    pub fn grid(lo: f64, hi: f64, samples: Vec<f64>) -> Result<Self> {
        let g = GridAlpha::spanning(lo, hi, samples)?;
        Self::new(lo, hi, AlphaSpec::Grid(g))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn alpha_spec(&self) -> &AlphaSpec {
        &self.alpha
    }

    /// α at `x`; the closed forms are evaluated anywhere, grids are clamped.
    pub fn alpha(&self, x: f64) -> f64 {
        match &self.alpha {
            AlphaSpec::Zero => 0.0,
            AlphaSpec::Constant(c) => *c,
            AlphaSpec::Linear { intercept, slope } => intercept + slope * x,
            AlphaSpec::GaussianBump {
                amplitude,
                center,
                width,
            } => {
                let u = (x - center) / width;
                amplitude * (-0.5 * u * u).exp()
            }
            AlphaSpec::Grid(g) => g.value(x),
        }
    }

    /// `∫_a^b α`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match &self.alpha {
            AlphaSpec::Zero => 0.0,
            AlphaSpec::Constant(c) => c * (b - a),
            AlphaSpec::Linear { intercept, slope } => {
                intercept * (b - a) + 0.5 * slope * (b * b - a * a)
            }
            AlphaSpec::GaussianBump {
                amplitude,
                center,
                width,
            } => gaussian_integral(*amplitude, *center, *width, a, b),
            AlphaSpec::Grid(g) => g.antiderivative(b) - g.antiderivative(a),
        }
    }

    /// `∫_a^b |α|`.
    pub fn l1(&self, a: f64, b: f64) -> f64 {
        match &self.alpha {
            AlphaSpec::Zero => 0.0,
            AlphaSpec::Constant(c) => c.abs() * (b - a),
            AlphaSpec::Linear { .. } => linear_l1(self.alpha(a), self.alpha(b), b - a),
            AlphaSpec::GaussianBump {
                amplitude,
                center,
                width,
            } => gaussian_integral(*amplitude, *center, *width, a, b).abs(),
            AlphaSpec::Grid(g) => g.l1(a, b),
        }
    }

    pub fn alpha_integral(&self) -> f64 {
        self.integral(self.lo, self.hi)
    }

    pub fn alpha_l1(&self) -> f64 {
        self.l1(self.lo, self.hi)
    }

    /// `sup |α|` over the segment.
    pub fn alpha_sup(&self) -> f64 {
        match &self.alpha {
            AlphaSpec::Zero => 0.0,
            AlphaSpec::Constant(c) => c.abs(),
            AlphaSpec::Linear { .. } => self.alpha(self.lo).abs().max(self.alpha(self.hi).abs()),
            AlphaSpec::GaussianBump { center, .. } => {
                let peak = center.clamp(self.lo, self.hi);
                self.alpha(peak).abs()
            }
            AlphaSpec::Grid(g) => {
                let (ka, _) = g.locate(self.lo);
                let (kb, _) = g.locate(self.hi);
                let inner = g.samples[ka + 1..=kb]
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                inner
                    .max(self.alpha(self.lo).abs())
                    .max(self.alpha(self.hi).abs())
            }
        }
    }

    /// `α′(x)`; grids use central differences and refuse boundary cells.
    pub fn alpha_derivative(&self, x: f64) -> Result<f64> {
        match &self.alpha {
            AlphaSpec::Zero | AlphaSpec::Constant(_) => Ok(0.0),
            AlphaSpec::Linear { slope, .. } => Ok(*slope),
            AlphaSpec::GaussianBump { center, width, .. } => {
                Ok(-self.alpha(x) * (x - center) / (width * width))
            }
            AlphaSpec::Grid(g) => g.derivative(x),
        }
    }

    /// The same α restricted to `[a, b] ⊂ [lo, hi]`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Segment> {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        if a < self.lo - slack || b > self.hi + slack {
            return Err(Error::OutOfDomain {
                x: if a < self.lo { a } else { b },
                lo: self.lo,
                hi: self.hi,
            });
        }
        Segment::new(a.max(self.lo), b.min(self.hi), self.alpha.clone())
    }

    pub fn translated(&self, d: f64) -> Segment {
        Segment {
            lo: self.lo + d,
            hi: self.hi + d,
            alpha: self.alpha.translated(d),
        }
    }

    pub fn with_alpha(&self, alpha: AlphaSpec) -> Result<Segment> {
        Segment::new(self.lo, self.hi, alpha)
    }
}

fn gaussian_integral(amplitude: f64, center: f64, width: f64, a: f64, b: f64) -> f64 {
    let s = SQRT_2 * width;
    amplitude * width * FRAC_PI_2.sqrt() * (erf((b - center) / s) - erf((a - center) / s))
}

/// Schrödinger potential of the Miura map, `q = α² − α′`.
pub fn miura_potential(segment: &Segment, x: f64) -> Result<f64> {
    let a = segment.alpha(x);
    Ok(a * a - segment.alpha_derivative(x)?)
}
