//! TOML profile documents.
//!
//! ```toml
//! x0 = 0.0
//! zeta_left = 1.0
//!
//! [[segments]]
//! lo = 0.0
//! hi = 0.5
//! alpha = { kind = "constant", params = [1.0] }
//!
//! [[segments]]
//! lo = 0.5
//! hi = 1.0
//! alpha = { kind = "grid", samples = [0.0, 0.2, 0.4] }
//!
//! [[jumps]]
//! y = 0.5
//! gamma = 4.0
//! ```
//!
//! Breakpoints without a `[[jumps]]` entry are continuity points (γ = 1).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AlphaSpec, ImpedanceProfile, JumpPoint, Segment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub x0: f64,
    pub zeta_left: f64,
    pub segments: Vec<SegmentEntry>,
    #[serde(default)]
    pub jumps: Vec<JumpEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentEntry {
    pub lo: f64,
    pub hi: f64,
    pub alpha: AlphaEntry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpEntry {
    pub y: f64,
    pub gamma: f64,
}

impl AlphaEntry {
    fn to_spec(&self, lo: f64, hi: f64, index: usize) -> Result<AlphaSpec> {
        let bad = |msg: String| Error::InvalidProfile(format!("segment {index}: {msg}"));
        let params = |n: usize| -> Result<&[f64]> {
            if self.samples.is_some() {
                return Err(bad(format!("kind '{}' takes params, not samples", self.kind)));
            }
            let p = self.params.as_deref().unwrap_or(&[]);
            if p.len() != n {
                return Err(bad(format!("kind '{}' takes {n} params, got {}", self.kind, p.len())));
            }
            Ok(p)
        };
        Ok(match self.kind.as_str() {
            "zero" => {
                params(0)?;
                AlphaSpec::Zero
            }
            "constant" => AlphaSpec::Constant(params(1)?[0]),
            "linear" => {
                let p = params(2)?;
                AlphaSpec::Linear {
                    intercept: p[0],
                    slope: p[1],
                }
            }
            "gaussian-bump" => {
                let p = params(3)?;
                AlphaSpec::GaussianBump {
                    amplitude: p[0],
                    center: p[1],
                    width: p[2],
                }
            }
            "grid" => {
                if self.params.is_some() {
                    return Err(bad("kind 'grid' takes samples, not params".into()));
                }
                let s = self
                    .samples
                    .clone()
                    .ok_or_else(|| bad("kind 'grid' needs samples".into()))?;
                AlphaSpec::Grid(super::GridAlpha::spanning(lo, hi, s)?)
            }
            other => return Err(bad(format!("unknown alpha kind '{other}'"))),
        })
    }

    fn from_spec(spec: &AlphaSpec) -> Self {
        let (params, samples) = match spec {
            AlphaSpec::Zero => (Some(vec![]), None),
            AlphaSpec::Constant(c) => (Some(vec![*c]), None),
            AlphaSpec::Linear { intercept, slope } => (Some(vec![*intercept, *slope]), None),
            AlphaSpec::GaussianBump {
                amplitude,
                center,
                width,
            } => (Some(vec![*amplitude, *center, *width]), None),
            AlphaSpec::Grid(g) => (None, Some(g.samples().to_vec())),
        };
        AlphaEntry {
            kind: spec.kind().to_string(),
            params,
            samples,
        }
    }
}

impl ProfileFile {
    pub fn into_profile(self) -> Result<ImpedanceProfile> {
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| Segment::new(s.lo, s.hi, s.alpha.to_spec(s.lo, s.hi, i)?))
            .collect::<Result<Vec<_>>>()?;
        let mut jumps: Vec<JumpPoint> = segments
            .iter()
            .take(segments.len().saturating_sub(1))
            .map(|s| JumpPoint { y: s.hi(), gamma: 1.0 })
            .collect();
        for entry in &self.jumps {
            let slot = jumps
                .iter_mut()
                .find(|j| (j.y - entry.y).abs() <= 1e-12 * (1.0 + j.y.abs()))
                .ok_or_else(|| {
                    Error::InvalidProfile(format!("jump at {} is not a segment breakpoint", entry.y))
                })?;
            slot.gamma = entry.gamma;
        }
        ImpedanceProfile::new(self.x0, self.zeta_left, segments, jumps)
    }

    /// Document form of a profile; grid segments are written with their samples
    /// over the segment's own span, so restricted grids are not representable.
    pub fn from_profile(profile: &ImpedanceProfile) -> Self {
        ProfileFile {
            x0: profile.x0(),
            zeta_left: profile.zeta_left(),
            segments: profile
                .segments()
                .iter()
                .map(|s| SegmentEntry {
                    lo: s.lo(),
                    hi: s.hi(),
                    alpha: AlphaEntry::from_spec(s.alpha_spec()),
                })
                .collect(),
            jumps: profile
                .jumps()
                .iter()
                .filter(|j| !j.is_trivial())
                .map(|j| JumpEntry { y: j.y, gamma: j.gamma })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("profile documents always serialize")
    }
}

pub fn parse_profile(text: &str) -> Result<ImpedanceProfile> {
    let doc: ProfileFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_profile()
}

pub fn read_profile(path: impl AsRef<Path>) -> Result<ImpedanceProfile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_profile(&text)
}
