//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! Intervals are bisected in order of largest error estimate until the
//! summed estimate meets the tolerance. Semi-infinite tails are mapped to
//! (0, 1] through ω = L/t.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Segment {
    Finite,
    /// ∫_L^∞ f(ω) dω over t ∈ (0, 1].
    Upper(f64),
    /// ∫_{−∞}^{−L} f(ω) dω over t ∈ (0, 1].
    Lower(f64),
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    seg: Segment,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, seg: Segment, x: f64) -> f64 {
    match seg {
        Segment::Finite => f(x),
        Segment::Upper(l) => f(l / x) * l / (x * x),
        Segment::Lower(l) => f(-l / x) * l / (x * x),
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, seg: Segment, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, seg, center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut res_abs = kron.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = eval(f, seg, center - x);
        let f2 = eval(f, seg, center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let (kron, res_abs, res_asc) = (kron * half, res_abs * scale, res_asc * scale);
    let mut err = (kron - gauss * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (kron, err)
}

fn run<F: Fn(f64) -> f64>(f: &F, initial: Vec<(f64, f64, Segment)>, opts: &QuadOptions) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for (a, b, seg) in initial {
        if a == b {
            continue;
        }
        let (value, error) = kronrod(f, seg, a, b);
        evaluations += 15;
        heap.push(Piece { a, b, seg, value, error });
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Integration(format!(
                "non-finite integrand after {evaluations} evaluations"
            )));
        }
        let tolerance = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tolerance {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
                intervals: heap.len(),
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Integration(format!(
                "{} intervals exhausted: value {value:.6e}, error estimate {error:.3e}, tolerance {tolerance:.3e}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::Integration(format!(
                "interval [{:e}, {:e}] cannot be subdivided further (error estimate {error:.3e})",
                worst.a, worst.b
            )));
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod(f, worst.seg, a, b);
            evaluations += 15;
            heap.push(Piece { a, b, seg: worst.seg, value, error });
        }
    }
}

fn sorted_points(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// ∫_a^b f, with the range pre-split at `breakpoints` inside (a, b).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidParameter(format!("bad integration range [{a}, {b}]")));
    }
    let pts = sorted_points(a, b, breakpoints);
    let pieces = pts.windows(2).map(|w| (w[0], w[1], Segment::Finite)).collect();
    run(&f, pieces, opts)
}

/// ∫_{−∞}^{∞} f: the core [−L, L] is split at `breakpoints` and the two
/// tails are mapped onto (0, 1].
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    half_width: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "core half-width must be > 0, got {half_width}"
        )));
    }
    let pts = sorted_points(-half_width, half_width, breakpoints);
    let mut pieces: Vec<_> = pts.windows(2).map(|w| (w[0], w[1], Segment::Finite)).collect();
    pieces.push((0.0, 1.0, Segment::Upper(half_width)));
    pieces.push((0.0, 1.0, Segment::Lower(half_width)));
    run(&f, pieces, opts)
}
