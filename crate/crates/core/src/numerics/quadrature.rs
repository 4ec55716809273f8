use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Values that can be integrated: closed under addition and real scaling, with a magnitude.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

/// Tolerances and limits for the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of interval bisections in one adaptive integration.
    pub max_subdivisions: usize,
    /// Innermost excision radius of the principal-value extrapolation.
    pub pv_epsilon: f64,
    /// Hard upper limit for semi-infinite panel marching. Integration normally stops
    /// earlier, once the integrand stays below `abs_tol` on three consecutive panels.
    pub tail_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 400,
            pv_epsilon: 1e-4,
            tail_cutoff: 1e9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub abs_error: f64,
    pub evaluations: usize,
    /// Set when a semi-infinite integral hit `tail_cutoff` before its integrand decayed.
    pub truncated: bool,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// One 21-point Kronrod rule on `[a, b]` with its embedded 10-point Gauss estimate.
/// Returns the Kronrod value and the error estimate.
pub fn gauss_kronrod_21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[10];
    let mut resg = V::zero();
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1 + f2;
        resk = resk + s * WGK[j];
        if j % 2 == 1 {
            resg = resg + s * WG[j / 2];
        }
    }
    let resk = resk * h;
    let resg = resg * h;
    let err = (resk - resg).magnitude();
    (resk, err)
}

#[derive(Clone, Copy)]
struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// `b` may be `f64::INFINITY`, in which case the interval is mapped onto
/// `[0, 1)` by `x = a + t / (1 - t)`.
pub fn integrate_adaptive<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<V>> {
    if b.is_infinite() && b > 0.0 {
        let mapped = move |t: f64| {
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            f(x) * (1.0 / (one_minus * one_minus))
        };
        return adaptive_finite(mapped, 0.0, 1.0, cfg);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits", alloc::format!("[{a}, {b}]")));
    }
    adaptive_finite(f, a, b, cfg)
}

fn adaptive_finite<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<V>> {
    if a == b {
        return Ok(Estimate {
            value: V::zero(),
            abs_error: 0.0,
            evaluations: 0,
            truncated: false,
        });
    }
    let (value, err) = gauss_kronrod_21(&mut f, a, b);
    let mut segs: Vec<Segment<V>> = alloc::vec![Segment { a, b, value, err }];
    let mut total = value;
    let mut total_err = err;
    let mut evaluations = 21;
    let mut splits = 0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if total_err <= tol {
            break;
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                estimate: total.magnitude(),
                abs_error: total_err,
            });
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, s)| if s.err > best.1 { (i, s.err) } else { best });
        let seg = segs.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // The interval cannot be split further in floating point.
            return Err(Error::NonConvergence {
                what: "adaptive quadrature (interval exhausted)",
                estimate: total.magnitude(),
                abs_error: total_err,
            });
        }
        let (v1, e1) = gauss_kronrod_21(&mut f, seg.a, mid);
        let (v2, e2) = gauss_kronrod_21(&mut f, mid, seg.b);
        evaluations += 42;
        splits += 1;
        total = total - seg.value + v1 + v2;
        segs.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            err: e1,
        });
        segs.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            err: e2,
        });
        // Re-sum the error to avoid drift from repeated subtraction.
        total_err = segs.iter().map(|s| s.err).sum();
    }
    Ok(Estimate {
        value: total,
        abs_error: total_err,
        evaluations,
        truncated: false,
    })
}

/// Integrates `f` over `[a, inf)` by marching panels of doubling width, starting
/// with `first_width`. Each panel is integrated adaptively. Marching stops once
/// `|f|` stays below `cfg.abs_tol` on three consecutive panels, or at `cfg.tail_cutoff`
/// (reported through `truncated`).
pub fn integrate_panels<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    first_width: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<V>> {
    if !(first_width > 0.0) {
        return Err(Error::domain("panel width", alloc::format!("{first_width}")));
    }
    let mut total = V::zero();
    let mut total_err = 0.0;
    let mut evaluations = 0;
    let mut quiet = 0;
    let mut lo = a;
    let mut width = first_width;
    loop {
        let hi = lo + width;
        let peak = Cell::new(0.0f64);
        let panel_cfg = QuadratureConfig {
            abs_tol: cfg.abs_tol.max(cfg.rel_tol * total.magnitude()) * 0.5,
            ..*cfg
        };
        let est = integrate_adaptive(
            |x| {
                let v = f(x);
                let m = v.magnitude();
                if m > peak.get() {
                    peak.set(m);
                }
                v
            },
            lo,
            hi,
            &panel_cfg,
        )
        ;
        let est = match est {
            Ok(est) => est,
            // Oscillatory integrands can outgrow a doubled panel: retry narrower.
            Err(Error::NonConvergence { .. }) if width > first_width / 1024.0 => {
                width *= 0.5;
                continue;
            }
            Err(Error::NonConvergence { abs_error, .. }) => {
                return Err(Error::NonConvergence {
                    what: "semi-infinite panel quadrature",
                    estimate: total.magnitude(),
                    abs_error: abs_error + total_err,
                })
            }
            Err(other) => return Err(other),
        };
        total = total + est.value;
        total_err += est.abs_error;
        evaluations += est.evaluations;
        if peak.get() < cfg.abs_tol {
            quiet += 1;
            if quiet >= 3 {
                return Ok(Estimate {
                    value: total,
                    abs_error: total_err,
                    evaluations,
                    truncated: false,
                });
            }
        } else {
            quiet = 0;
        }
        if hi >= cfg.tail_cutoff {
            return Ok(Estimate {
                value: total,
                abs_error: total_err + peak.get() * width,
                evaluations,
                truncated: true,
            });
        }
        lo = hi;
        width *= 2.0;
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(&xi, &wi)| (c + h * xi, h * wi)).collect()
}
