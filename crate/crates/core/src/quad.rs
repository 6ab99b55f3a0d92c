//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals, scalar and
//! vector valued.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

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

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

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

/// Integrates `f` over `[a, b]`, optionally pre-split at `breaks`.
///
/// Refinement stops once the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)` or `max_segments` is reached.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> QuadResult {
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    points.extend(inner);
    points.push(b);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&mut f, w[0], w[1]);
        evaluations += 15;
        total += v;
        total_err += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }

    while total_err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_segments {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid);
        let (v2, e2) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    QuadResult {
        value,
        error,
        converged: error <= abs_tol.max(rel_tol * value.abs()),
        evaluations,
    }
}

/// Result of a vector-valued integration.
#[derive(Debug, Clone)]
pub struct VecQuadResult {
    pub value: Vec<f64>,
    /// L1 norm (sum of absolute entries) of the error estimate.
    pub error: f64,
    pub converged: bool,
    pub segments: usize,
}

struct VecSegment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for VecSegment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for VecSegment {}
impl PartialOrd for VecSegment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VecSegment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15_vec<F: FnMut(f64) -> Vec<f64>>(f: &mut F, a: f64, b: f64, len: usize) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = vec![0.0; len];
    let mut gauss = vec![0.0; len];
    let fc = f(c);
    for i in 0..len {
        kronrod[i] = fc[i] * WGK[7];
        gauss[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..len {
            let s = f1[i] + f2[i];
            kronrod[i] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0;
    for i in 0..len {
        err += ((kronrod[i] - gauss[i]) * h).abs();
        kronrod[i] *= h;
    }
    (kronrod, err)
}

/// Vector-valued adaptive quadrature; the error is measured in the L1 sense
/// over the components.
pub fn integrate_vec<F: FnMut(f64) -> Vec<f64>>(
    mut f: F,
    len: usize,
    breaks: &[f64],
    abs_tol: f64,
    max_segments: usize,
) -> VecQuadResult {
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15_vec(&mut f, w[0], w[1], len);
        total_err += e;
        heap.push(VecSegment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    while total_err > abs_tol && heap.len() < max_segments {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = gk15_vec(&mut f, seg.a, mid, len);
        let (v2, e2) = gk15_vec(&mut f, mid, seg.b, len);
        total_err += e1 + e2 - seg.error;
        heap.push(VecSegment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(VecSegment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    let mut value = vec![0.0; len];
    let mut error = 0.0;
    let segments = heap.len();
    for seg in heap {
        for (acc, v) in value.iter_mut().zip(&seg.value) {
            *acc += v;
        }
        error += seg.error;
    }
    VecQuadResult {
        value,
        error,
        converged: error <= abs_tol,
        segments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &[], 1e-14, 1e-14, 50);
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &[], 1e-12, 1e-12, 400);
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn vector_components() {
        let r = integrate_vec(
            |x| vec![x.sin(), x.cos()],
            2,
            &[0.0, 1.0, std::f64::consts::PI],
            1e-13,
            200,
        );
        assert!((r.value[0] - 2.0).abs() < 1e-12);
        assert!(r.value[1].abs() < 1e-12);
    }
}
