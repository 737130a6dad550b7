//! Adaptive Gauss–Kronrod quadrature, a semi-infinite map and a Wynn-epsilon
//! accelerated Fourier-cosine tail.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae; odd indices are the embedded 7-point Gauss nodes.
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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Absolute and relative error targets; a result is accepted when its error
/// estimate is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
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

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut magnitude = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[j] * (f1 + f2);
        magnitude += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Panel {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
        magnitude: magnitude * half.abs(),
    }
}

/// Adaptive G7–K15 quadrature of `f` over the finite interval [a, b].
///
/// Subdivides the panel with the largest error until the tolerance is met or
/// `max_panels` is reached. An error estimate at the level of floating-point
/// roundoff in Σ|f| is accepted as converged.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_panels: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut magnitude = first.magnitude;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                estimate: value,
                error,
                evaluations,
            });
        }
        let roundoff = 50.0 * f64::EPSILON * magnitude;
        if error <= tol.target(value) || error <= roundoff {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() >= max_panels {
            return Err(Error::Quadrature {
                estimate: value,
                error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // panel cannot be split any further in floating point
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
    }
}

/// ∫_a^∞ f via ω = a + c(1/s² − 1), s ∈ (0, 1].
///
/// `scale` (c) should be near the frequency where f turns into its tail.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    tol: Tolerance,
    max_panels: usize,
) -> Result<Estimate> {
    let mapped = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let inv = 1.0 / (s * s);
        let w = a + scale * (inv - 1.0);
        let v = f(w);
        if v == 0.0 {
            0.0
        } else {
            v * 2.0 * scale * inv / s
        }
    };
    integrate(mapped, 0.0, 1.0, tol, max_panels)
}

/// Wynn's epsilon algorithm on a sequence of partial sums.
///
/// Returns the last even-column entry and the distance to the previous one
/// as an error estimate.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    if n < 3 {
        let last = *sums.last().unwrap_or(&0.0);
        let prev = if n >= 2 { sums[n - 2] } else { 0.0 };
        return (last, (last - prev).abs());
    }
    // prev_col holds ε_{k-1}, cur_col holds ε_k
    let mut prev_col = vec![0.0; n + 1];
    let mut cur_col: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut best_err = (sums[n - 1] - sums[n - 2]).abs();
    let mut k = 0;
    while cur_col.len() >= 2 {
        let mut next = Vec::with_capacity(cur_col.len() - 1);
        for i in 0..cur_col.len() - 1 {
            let diff = cur_col[i + 1] - cur_col[i];
            let v = if diff == 0.0 {
                f64::INFINITY
            } else {
                prev_col[i + 1] + 1.0 / diff
            };
            next.push(v);
        }
        k += 1;
        if k % 2 == 0 {
            let m = next.len();
            if !next.iter().all(|v| v.is_finite()) {
                break;
            }
            if m >= 2 {
                let err = (next[m - 1] - next[m - 2]).abs();
                if err < best_err {
                    best = next[m - 1];
                    best_err = err;
                }
            } else {
                break;
            }
        }
        prev_col = cur_col;
        cur_col = next;
    }
    (best, best_err)
}

/// ∫_{k0·π/τ}^∞ g(ω) cos(ωτ) dω for a smooth, monotonically decaying g.
///
/// Splitting at multiples of π/τ gives an alternating series of half-cycle
/// integrals, summed with Wynn's epsilon algorithm.
pub fn oscillatory_tail<F: Fn(f64) -> f64>(
    g: F,
    tau: f64,
    k0: usize,
    tol: Tolerance,
) -> Result<f64> {
    let tau = tau.abs();
    let h = PI / tau;
    let panel_tol = Tolerance::new(tol.abs * 1e-2, tol.rel * 1e-2);
    let mut sums = Vec::with_capacity(64);
    let mut acc = 0.0;
    let mut last = f64::NAN;
    for k in k0..k0 + 400 {
        let a = k as f64 * h;
        let piece = integrate(|w| g(w) * (w * tau).cos(), a, a + h, panel_tol, 200)?;
        acc += piece.value;
        sums.push(acc);
        if sums.len() >= 8 && sums.len() % 2 == 0 {
            let (est, err) = wynn_epsilon(&sums[sums.len().saturating_sub(40)..]);
            let target = tol.target(est);
            if err <= target && (est - last).abs() <= target {
                return Ok(est);
            }
            last = est;
        }
        if piece.value == 0.0 && acc == 0.0 {
            return Ok(0.0);
        }
    }
    Err(Error::Quadrature {
        estimate: last,
        error: f64::NAN,
        evaluations: 0,
    })
}

/// Fourier-cosine integral ∫_0^∞ g(ω) cos(ωτ) dω of a slowly decaying g.
///
/// Half-cycles up to the first multiple of π/τ beyond `head_hint` are
/// integrated directly; the remainder goes through [`oscillatory_tail`].
pub fn cosine_transform<F: Fn(f64) -> f64>(
    g: F,
    tau: f64,
    head_hint: f64,
    tol: Tolerance,
) -> Result<f64> {
    let tau = tau.abs();
    if tau == 0.0 {
        return Ok(integrate_to_infinity(&g, 0.0, head_hint.max(1e-300), tol, 4000)?.value);
    }
    let h = PI / tau;
    let k0 = ((head_hint / h).ceil() as usize).clamp(1, 4000);
    let mut head = 0.0;
    for k in 0..k0 {
        let a = k as f64 * h;
        head += integrate(|w| g(w) * (w * tau).cos(), a, a + h, tol, 400)?.value;
    }
    Ok(head + oscillatory_tail(&g, tau, k0, tol)?)
}
