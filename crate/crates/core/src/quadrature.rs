//! Adaptive Gauss-Kronrod quadrature (21-point rule, global bisection on the
//! interval with the largest error estimate).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: 0.0,
            max_intervals: 4000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Abscissae of the 21-point Kronrod rule on `[a, b]`, in the order
/// expected by [`gauss_kronrod_21_combine`].
pub fn gauss_kronrod_21_nodes(a: f64, b: f64) -> [f64; 21] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut x = [center; 21];
    for j in 0..10 {
        let dx = half * XGK[j];
        x[2 * j] = center - dx;
        x[2 * j + 1] = center + dx;
    }
    x
}

/// Combine integrand values at [`gauss_kronrod_21_nodes`] into
/// (integral, error estimate).
pub fn gauss_kronrod_21_combine(a: f64, b: f64, fx: &[f64; 21]) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let f_center = fx[20];
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();
    for j in 0..10 {
        let (f1, f2) = (fx[2 * j], fx[2 * j + 1]);
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fx[2 * j] - mean).abs() + (fx[2 * j + 1] - mean).abs());
    }
    let err = (res_kronrod - res_gauss) * half;
    let abs_half = half.abs();
    (
        res_kronrod * half,
        rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    )
}

/// One application of the 21-point Kronrod rule with its embedded
/// 10-point Gauss rule. Returns (integral, error estimate).
pub fn gauss_kronrod_21<F>(f: &F, a: f64, b: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let x = gauss_kronrod_21_nodes(a, b);
    let fx = x.map(f);
    gauss_kronrod_21_combine(a, b, &fx)
}

/// Integrate `f` over `[a, b]`, starting from the subdivision given by
/// `breakpoints` (interior points, sorted, may be empty).
pub fn integrate_with_breakpoints<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_batched(|x: &[f64; 21]| Ok(x.map(&f)), a, b, breakpoints, tol)
}

/// The general adaptive driver. `eval` receives the 21 abscissae of one
/// panel and returns the integrand there; it may fail, and it may evaluate
/// the points in parallel. Results depend only on the values returned.
pub fn integrate_batched<F>(
    eval: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Integral>
where
    F: Fn(&[f64; 21]) -> Result<[f64; 21]>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            intervals: 0,
        });
    }
    let panel = |lo: f64, hi: f64| -> Result<(f64, f64)> {
        let fx = eval(&gauss_kronrod_21_nodes(lo, hi))?;
        Ok(gauss_kronrod_21_combine(lo, hi, &fx))
    };

    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);

    let mut heap = BinaryHeap::with_capacity(edges.len() * 2);
    for w in edges.windows(2) {
        let (value, error) = panel(w[0], w[1])?;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let mut evaluations = 21 * heap.len();
    let (mut total, mut err) = totals(&heap);

    loop {
        if !total.is_finite() {
            return Err(Error::Numerical {
                message: "non-finite integrand".into(),
                estimate: total,
                abs_error: err,
                intervals: heap.len(),
            });
        }
        let target = tol.abs.max(tol.rel * total.abs());
        if err <= target {
            let (value, abs_error) = totals(&heap);
            return Ok(Integral {
                value,
                abs_error,
                evaluations,
                intervals: heap.len(),
            });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Numerical {
                message: format!("interval budget exhausted on [{a:e}, {b:e}]"),
                estimate: total,
                abs_error: err,
                intervals: heap.len(),
            });
        }

        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // The interval cannot be split any further in f64.
            return Err(Error::Numerical {
                message: format!("roundoff limit reached near x = {mid:e}"),
                estimate: total,
                abs_error: err,
                intervals: heap.len() + 1,
            });
        }
        let (v1, e1) = panel(worst.a, mid)?;
        let (v2, e2) = panel(mid, worst.b)?;
        evaluations += 42;
        total += (v1 + v2) - worst.value;
        err += (e1 + e2) - worst.error;
        if heap.len() % 64 == 0 {
            (total, err) = totals(&heap);
            total += v1 + v2;
            err += e1 + e2;
        }
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

// Summed in interval order so the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = NeumaierSum::new();
    let mut error = 0.0;
    for s in segs {
        value.add(s.value);
        error += s.error;
    }
    (value.total(), error)
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_with_breakpoints(f, a, b, &[], tol)
}

/// Integrate `f` over `[a, ∞)` using the map `x = a + t/(1 - t)`.
pub fn integrate_to_infinity<F>(f: F, a: f64, tol: Tolerance) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = a + t / one_minus;
        let v = f(x) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}
