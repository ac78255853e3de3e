//! Reference profiles shared by the acceptance runner, the CLI and the benches.

use rand::Rng;

use crate::profile::{AlphaSpec, ImpedanceProfile, JumpPoint, Segment};

/// `α ≡ c` on `(0, L)`, i.e. `ζ = e^{−2cx}`.
pub fn constant_alpha(c: f64, length: f64) -> ImpedanceProfile {
    ImpedanceProfile::single(Segment::constant(0.0, length, c).expect("valid segment"))
}

/// Gaussian bump centred on `(0, 1)` with `L¹` norm 1 up to its truncated tails.
pub fn unit_bump() -> ImpedanceProfile {
    let width = 0.12;
    ImpedanceProfile::single(
        Segment::new(
            0.0,
            1.0,
            AlphaSpec::GaussianBump {
                amplitude: 1.0 / (width * (2.0 * std::f64::consts::PI).sqrt()),
                center: 0.5,
                width,
            },
        )
        .expect("valid segment"),
    )
}

/// Three segments of every smooth kind separated by two genuine jumps.
pub fn mixed_with_jumps() -> ImpedanceProfile {
    let samples: Vec<f64> = (0..=40).map(|k| 0.6 * (k as f64 * 0.15).sin()).collect();
    ImpedanceProfile::new(
        0.0,
        1.5,
        vec![
            Segment::new(
                0.0,
                0.8,
                AlphaSpec::GaussianBump {
                    amplitude: 1.2,
                    center: 0.4,
                    width: 0.15,
                },
            )
            .expect("valid segment"),
            Segment::new(0.8, 1.5, AlphaSpec::Linear { intercept: 0.9, slope: -0.6 }).expect("valid segment"),
            Segment::grid(1.5, 2.2, samples).expect("valid segment"),
        ],
        vec![JumpPoint { y: 0.8, gamma: 3.0 }, JumpPoint { y: 1.5, gamma: 0.5 }],
    )
    .expect("valid profile")
}

/// A random smooth segment on `(lo, hi)`; `max_alpha` bounds `|α|`.
pub fn random_segment<R: Rng>(rng: &mut R, lo: f64, hi: f64, max_alpha: f64) -> Segment {
    let len = hi - lo;
    let spec = match rng.gen_range(0..4) {
        0 => AlphaSpec::Constant(rng.gen_range(-max_alpha..max_alpha)),
        1 => {
            let a = rng.gen_range(-max_alpha..max_alpha);
            let b = rng.gen_range(-max_alpha..max_alpha);
            AlphaSpec::Linear {
                intercept: a - (b - a) * lo / len,
                slope: (b - a) / len,
            }
        }
        2 => AlphaSpec::GaussianBump {
            amplitude: rng.gen_range(-max_alpha..max_alpha),
            center: rng.gen_range(lo + 0.2 * len..hi - 0.2 * len),
            width: rng.gen_range(0.08..0.3) * len,
        },
        _ => {
            let n = rng.gen_range(8..40);
            let phase = rng.gen_range(0.0..6.0);
            let amp = rng.gen_range(-max_alpha..max_alpha);
            let samples = (0..=n).map(|k| amp * (phase + 3.0 * k as f64 / n as f64).sin()).collect();
            return Segment::grid(lo, hi, samples).expect("valid segment");
        }
    };
    Segment::new(lo, hi, spec).expect("valid segment")
}

/// One to three random segments on `(0, L)`, `L ∈ [0.5, 2]`; with `jumps` the
/// breakpoints carry random ratios in `[0.25, 4]`.
pub fn random_profile<R: Rng>(rng: &mut R, jumps: bool) -> ImpedanceProfile {
    let count = rng.gen_range(1..=3);
    let length = rng.gen_range(0.5..2.0);
    let mut cuts: Vec<f64> = (1..count).map(|_| rng.gen_range(0.2..0.8) * length).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(length);
    let segments: Vec<Segment> = edges
        .windows(2)
        .map(|w| random_segment(rng, w[0], w[1], 2.0))
        .collect();
    let jump_points = edges[1..edges.len() - 1]
        .iter()
        .map(|&y| JumpPoint {
            y,
            gamma: if jumps { 4f64.powf(rng.gen_range(-1.0..1.0)) } else { 1.0 },
        })
        .collect();
    ImpedanceProfile::new(0.0, rng.gen_range(0.5..2.0), segments, jump_points).expect("valid profile")
}
