use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Evaluation budget for one adaptive integration.
pub const MAX_EVALUATIONS: usize = 1_000_000;

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Odd indices of XGK are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Stopping rule: accept once `error ≤ max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    /// Same number used as absolute and relative tolerance.
    pub fn uniform(tol: f64) -> Self {
        Tolerance { abs: tol, rel: tol }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel, NumericsError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite { at: x })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&node, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * node;
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Globally adaptive 15-point Gauss–Kronrod integration of `f` over `[a, b]`
/// with `tol` used both as absolute and relative tolerance.
///
/// Nodes are strictly interior, so `f` is never evaluated at `a` or `b`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult, NumericsError> {
    integrate(f, &[a, b], Tolerance::uniform(tol), MAX_EVALUATIONS)
}

/// Adaptive integration over `breakpoints[0] .. breakpoints[last]`, with the
/// interior breakpoints seeding the initial partition.
///
/// Breakpoints must be strictly increasing. Narrow features should be
/// bracketed by a short panel: nodes never sit on a breakpoint. The panel with the largest
/// error estimate is bisected until the summed estimate meets `tol` or the
/// evaluation budget runs out.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: Tolerance,
    max_evaluations: usize,
) -> Result<QuadratureResult, NumericsError> {
    let lo = breakpoints.first().copied().unwrap_or(f64::NAN);
    let hi = breakpoints.last().copied().unwrap_or(f64::NAN);
    if breakpoints.len() < 2
        || !lo.is_finite()
        || !hi.is_finite()
        || breakpoints.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        heap.push(kronrod_panel(&f, w[0], w[1])?);
        evaluations += EVALS_PER_PANEL;
    }

    // Panels too narrow to bisect further keep their error permanently.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;

    loop {
        let (value, error) = heap.iter().fold((frozen_value, frozen_error), |(v, e), p| {
            (v + p.value, e + p.error)
        });
        let roundoff = 50.0 * f64::EPSILON * value.abs();
        if error <= tol.target(value) || error <= roundoff {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Err(NumericsError::NonConvergence {
                    evaluations,
                    error_estimate: error,
                    value,
                })
            }
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        if evaluations + 2 * EVALS_PER_PANEL > max_evaluations {
            return Err(NumericsError::NonConvergence {
                evaluations,
                error_estimate: error,
                value,
            });
        }
        heap.push(kronrod_panel(&f, worst.lo, mid)?);
        heap.push(kronrod_panel(&f, mid, worst.hi)?);
        evaluations += 2 * EVALS_PER_PANEL;
    }
}
