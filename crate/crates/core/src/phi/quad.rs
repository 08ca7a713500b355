//! Adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at t = {at}")]
    NonFinite { at: f64 },
    #[error("no convergence after {segments} segments (estimate {value}, error {error})")]
    NoConvergence {
        segments: usize,
        value: f64,
        error: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub segments: usize,
}

/// Tolerances and subdivision cap.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_segments: 4000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };
    let fc = eval(center)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * x;
        let sum = eval(center - dx)? + eval(center + dx)?;
        kron += w * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    })
}

/// `∫_a^b f`, refining the worst segment until the summed error estimate is
/// below `max(abs_tol, rel_tol |I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Quadrature, QuadError> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            segments: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > opts.abs_tol.max(opts.rel_tol * value.abs()) {
        if heap.len() >= opts.max_segments {
            return Err(QuadError::NoConvergence {
                segments: heap.len(),
                value,
                error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&mut f, worst.a, mid)?;
        let right = kronrod(&mut f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Recompute from scratch now and then so cancellation in the running
        // sums cannot stall the loop.
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(Quadrature {
        value: heap.iter().map(|s| s.value).sum(),
        error,
        segments: heap.len(),
    })
}

/// Largest `s` used when integrating over `[0, ∞)`; `e^{-s}` stays normal.
pub const SEMI_INFINITE_CUTOFF: f64 = 640.0;

/// `∫_0^∞ f` for a nonnegative integrand, summed over the blocks
/// `[0,1], [1,2], [2,4], ...`. Returns `None` when the blocks have not
/// become negligible by [`SEMI_INFINITE_CUTOFF`] (divergent or too slowly
/// convergent).
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    opts: QuadOptions,
) -> Result<Option<Quadrature>, QuadError> {
    let mut total = 0.0;
    let mut error = 0.0;
    let mut segments = 0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while hi <= SEMI_INFINITE_CUTOFF {
        let block = integrate(&mut f, lo, hi, opts)?;
        total += block.value;
        error += block.error;
        segments += block.segments;
        if lo >= 4.0 && block.value.abs() <= opts.rel_tol * 1e-3 * total.abs() {
            return Ok(Some(Quadrature {
                value: total,
                error,
                segments,
            }));
        }
        lo = hi;
        hi *= 2.0;
    }
    Ok(None)
}
