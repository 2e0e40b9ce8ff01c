//! Link latency functions: affine costs and the piecewise-linear "elbow".

use crate::error::{Error, Result};

/// Per-link latency as a function of total link flow.
///
/// Both variants are non-negative, non-decreasing and convex on `x >= 0`,
/// which is what every solver in this crate relies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatencyFn {
    /// `T(x) = slope * x + intercept` with `slope, intercept >= 0`.
    Affine { slope: f64, intercept: f64 },
    /// `T(x) = max(offset, (knee_latency / width) * (x - knee) + knee_latency)`:
    /// a flat floor at `offset`, then an ascent of gradient `knee_latency / width`
    /// that passes through `knee_latency` at flow `knee`.
    Elbow {
        knee_latency: f64,
        width: f64,
        knee: f64,
        offset: f64,
    },
}

impl LatencyFn {
    pub fn affine(slope: f64, intercept: f64) -> Result<Self> {
        if !(slope >= 0.0) || !slope.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "affine latency needs slope >= 0, got {slope}"
            )));
        }
        if !(intercept >= 0.0) || !intercept.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "affine latency needs intercept >= 0, got {intercept}"
            )));
        }
        Ok(LatencyFn::Affine { slope, intercept })
    }

    pub fn elbow(knee_latency: f64, width: f64, knee: f64, offset: f64) -> Result<Self> {
        if !(knee_latency > 0.0) || !knee_latency.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "elbow latency needs knee_latency > 0, got {knee_latency}"
            )));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "elbow latency needs width > 0, got {width}"
            )));
        }
        if !(knee > 0.0) || !knee.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "elbow latency needs knee > 0, got {knee}"
            )));
        }
        if !(offset >= 0.0) || !offset.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "elbow latency needs offset >= 0, got {offset}"
            )));
        }
        Ok(LatencyFn::Elbow {
            knee_latency,
            width,
            knee,
            offset,
        })
    }

    /// Constant latency, i.e. `Affine { slope: 0, intercept: value }`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::affine(0.0, value)
    }

    /// Latency at total flow `x`. Rejects negative flow.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::NegativeFlow(x));
        }
        Ok(self.value(x))
    }

    /// Latency at total flow `x`, assuming `x >= 0`.
    #[inline]
    pub(crate) fn value(&self, x: f64) -> f64 {
        debug_assert!(x >= -1e-9, "latency evaluated at negative flow {x}");
        match *self {
            LatencyFn::Affine { slope, intercept } => slope * x + intercept,
            LatencyFn::Elbow {
                knee_latency,
                width,
                knee,
                offset,
            } => {
                let ascent = (knee_latency / width) * (x - knee) + knee_latency;
                ascent.max(offset)
            }
        }
    }

    /// Right derivative at `x` (the subgradient choice used everywhere).
    #[inline]
    pub(crate) fn slope_at(&self, x: f64) -> f64 {
        match *self {
            LatencyFn::Affine { slope, .. } => slope,
            LatencyFn::Elbow {
                knee_latency,
                width,
                knee,
                offset,
            } => {
                let ascent = (knee_latency / width) * (x - knee) + knee_latency;
                if ascent >= offset {
                    knee_latency / width
                } else {
                    0.0
                }
            }
        }
    }

    /// Flow values in `[0, inf)` where the latency is non-differentiable,
    /// in ascending order. An elbow has exactly one such point (clamped to 0).
    pub fn kink_points(&self) -> Vec<f64> {
        match *self {
            LatencyFn::Affine { .. } => Vec::new(),
            LatencyFn::Elbow {
                knee_latency,
                width,
                knee,
                offset,
            } => {
                // Ascent meets the floor where (L/w)(x - knee) + L = offset.
                let x = knee + width * (offset - knee_latency) / knee_latency;
                vec![x.max(0.0)]
            }
        }
    }

    /// `∫_0^x T(s) ds`, the per-link term of the Beckmann potential.
    pub fn integral(&self, x: f64) -> Result<f64> {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::NegativeFlow(x));
        }
        Ok(self.integral_unchecked(x))
    }

    pub(crate) fn integral_unchecked(&self, x: f64) -> f64 {
        match *self {
            LatencyFn::Affine { slope, intercept } => 0.5 * slope * x * x + intercept * x,
            LatencyFn::Elbow {
                knee_latency,
                width,
                knee,
                offset,
            } => {
                let g = knee_latency / width;
                // Antiderivative of the ascent g*(s - knee) + L.
                let ascent_area =
                    |s: f64| 0.5 * g * (s - knee) * (s - knee) + knee_latency * (s - knee);
                let kink = (knee + width * (offset - knee_latency) / knee_latency).max(0.0);
                if x <= kink {
                    offset * x
                } else {
                    offset * kink + ascent_area(x) - ascent_area(kink)
                }
            }
        }
    }

    /// True for `Affine { slope: 0, .. }`.
    pub fn is_constant(&self) -> bool {
        matches!(self, LatencyFn::Affine { slope, .. } if *slope == 0.0)
    }
}
