//! Barrier profile catalog, scattering window, and outer-channel wavenumbers.

use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use libm::{cosh, exp, sqrt};

/// One-dimensional barrier profile: five analytic families plus a sampled profile.
///
/// Profiles describe V(x) inside a truncation window only; outside the window the
/// potential is the constant V₁ (left) or V₃ (right) held by [`ScatteringSetup`],
/// and callers clamp accordingly.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialProfile {
    /// V(x) = v0·(b − x): descending ramp reaching zero at x = b.
    LinearStep { v0: f64, b: f64 },
    /// V(x) = v0·e^{−(x−a)}: decaying step anchored at x = a.
    ExponentialStep { v0: f64, a: f64 },
    /// V(x) = v0·(b² − (x − x0)²): inverted parabola, vertex at x0, height v0·b².
    Parabolic { v0: f64, b: f64, x0: f64 },
    /// V(x) = v0 / cosh²(x − x0): symmetric smooth bump of height v0.
    BellShaped { v0: f64, x0: f64 },
    /// V(x) = ½·[a·s/(1+s) + b·s/(1+s)²], s = e^{x−x0}: asymmetric smooth barrier
    /// rising from 0 on the left to the plateau a/2 on the right.
    Eckart { a: f64, b: f64, x0: f64 },
    /// Piecewise-linear interpolation through knots with strictly increasing x.
    Sampled { knots: Vec<(f64, f64)> },
}

impl PotentialProfile {
    /// Check structural invariants: finite parameters, and for `Sampled` at least
    /// two knots with strictly increasing abscissae.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")))
            }
        };
        match self {
            PotentialProfile::LinearStep { v0, b } => {
                finite(*v0, "v0")?;
                finite(*b, "b")
            }
            PotentialProfile::ExponentialStep { v0, a } => {
                finite(*v0, "v0")?;
                finite(*a, "a")
            }
            PotentialProfile::Parabolic { v0, b, x0 } => {
                finite(*v0, "v0")?;
                finite(*b, "b")?;
                finite(*x0, "x0")
            }
            PotentialProfile::BellShaped { v0, x0 } => {
                finite(*v0, "v0")?;
                finite(*x0, "x0")
            }
            PotentialProfile::Eckart { a, b, x0 } => {
                finite(*a, "a")?;
                finite(*b, "b")?;
                finite(*x0, "x0")
            }
            PotentialProfile::Sampled { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "sampled profile needs at least 2 knots, got {}",
                        knots.len()
                    )));
                }
                for pair in knots.windows(2) {
                    if !(pair[0].0 < pair[1].0) {
                        return Err(Error::InvalidArgument(format!(
                            "sampled knots must be strictly increasing in x: {} then {}",
                            pair[0].0, pair[1].0
                        )));
                    }
                }
                for &(x, v) in knots {
                    finite(x, "knot x")?;
                    finite(v, "knot V")?;
                }
                Ok(())
            }
        }
    }

    /// V(x) by the family's defining formula. Analytic families evaluate anywhere;
    /// `Sampled` errors outside its knot range.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        match self {
            PotentialProfile::LinearStep { v0, b } => Ok(v0 * (b - x)),
            PotentialProfile::ExponentialStep { v0, a } => Ok(v0 * exp(-(x - a))),
            PotentialProfile::Parabolic { v0, b, x0 } => Ok(v0 * (b * b - (x - x0) * (x - x0))),
            PotentialProfile::BellShaped { v0, x0 } => {
                let c = cosh(x - x0);
                Ok(v0 / (c * c))
            }
            PotentialProfile::Eckart { a, b, x0 } => {
                // s/(1+s) and s/(1+s)² in terms of u = e^{-(x-x0)} stay bounded for
                // large |x - x0| where s itself overflows.
                let u = exp(-(x - x0));
                let first = 1.0 / (1.0 + u);
                let second = u / ((1.0 + u) * (1.0 + u));
                Ok(0.5 * (a * first + b * second))
            }
            PotentialProfile::Sampled { knots } => {
                let lo = knots[0].0;
                let hi = knots[knots.len() - 1].0;
                if x < lo || x > hi {
                    return Err(Error::SampledDomain { x, lo, hi });
                }
                let idx = knots.partition_point(|&(kx, _)| kx <= x);
                if idx == knots.len() {
                    return Ok(knots[knots.len() - 1].1);
                }
                let (x0, v0) = knots[idx - 1];
                let (x1, v1) = knots[idx];
                Ok(v0 + (v1 - v0) * (x - x0) / (x1 - x0))
            }
        }
    }

    /// Location and value of the global maximum over the window [a, b].
    ///
    /// Closed-form where available (ramp and exponential at the left edge, parabola
    /// and bell at their clamped vertex); golden-section search for Eckart; knot scan
    /// for sampled profiles.
    pub fn peak(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if !(a < b) {
            return Err(Error::InvalidSetup(format!("window needs a < b, got [{a}, {b}]")));
        }
        match self {
            PotentialProfile::LinearStep { .. } | PotentialProfile::ExponentialStep { .. } => {
                Ok((a, self.evaluate(a)?))
            }
            PotentialProfile::Parabolic { x0, .. } | PotentialProfile::BellShaped { x0, .. } => {
                let x = x0.clamp(a, b);
                Ok((x, self.evaluate(x)?))
            }
            PotentialProfile::Eckart { .. } => self.golden_section_max(a, b),
            PotentialProfile::Sampled { knots } => {
                let mut best = (a, self.evaluate(a)?);
                for &(x, v) in knots.iter().filter(|&&(x, _)| x > a && x < b) {
                    if v > best.1 {
                        best = (x, v);
                    }
                }
                let vb = self.evaluate(b)?;
                if vb > best.1 {
                    best = (b, vb);
                }
                Ok(best)
            }
        }
    }

    // Golden-section search for an interior maximum, with an edge check since a
    // monotone stretch of the profile can beat the interior stationary point.
    fn golden_section_max(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut lo = a;
        let mut hi = b;
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = self.evaluate(x1)?;
        let mut f2 = self.evaluate(x2)?;
        while hi - lo > 1e-10 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = self.evaluate(x2)?;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = self.evaluate(x1)?;
            }
        }
        let xm = 0.5 * (lo + hi);
        let vm = self.evaluate(xm)?;
        let va = self.evaluate(a)?;
        let vb = self.evaluate(b)?;
        let mut best = (xm, vm);
        if va > best.1 {
            best = (a, va);
        }
        if vb > best.1 {
            best = (b, vb);
        }
        Ok(best)
    }
}

/// Scattering window and channel data: boundaries a < b, outer constants V₁/V₃,
/// and particle energy E with both channels open (E > V₁ and E > V₃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSetup {
    pub a: f64,
    pub b: f64,
    pub v1: f64,
    pub v3: f64,
    pub e: f64,
}

impl ScatteringSetup {
    /// Validate and construct; fails fast on a ≥ b, nonfinite fields, or a closed channel.
    pub fn new(a: f64, b: f64, v1: f64, v3: f64, e: f64) -> Result<Self> {
        for (v, name) in [(a, "a"), (b, "b"), (v1, "v1"), (v3, "v3"), (e, "e")] {
            if !v.is_finite() {
                return Err(Error::InvalidSetup(format!("{name} must be finite, got {v}")));
            }
        }
        if !(a < b) {
            return Err(Error::InvalidSetup(format!("window needs a < b, got [{a}, {b}]")));
        }
        if e <= v1 {
            return Err(Error::ClosedChannel { e, v_outer: v1 });
        }
        if e <= v3 {
            return Err(Error::ClosedChannel { e, v_outer: v3 });
        }
        Ok(ScatteringSetup { a, b, v1, v3, e })
    }

    /// Channel wavenumbers (k₁, k₃) = (√(2(E−V₁)), √(2(E−V₃))); both real and
    /// positive by construction.
    pub fn wavenumbers(&self) -> (f64, f64) {
        (sqrt(2.0 * (self.e - self.v1)), sqrt(2.0 * (self.e - self.v3)))
    }
}
