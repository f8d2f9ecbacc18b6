//! One-dimensional quadrature: adaptive Gauss–Kronrod on finite intervals,
//! decade panels with geometric tail extrapolation for improper radial
//! integrals, and Gauss–Legendre node generation for fixed designs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

/// Integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

impl std::ops::Mul<f64> for Estimate {
    type Output = Estimate;
    fn mul(self, k: f64) -> Estimate {
        Estimate {
            value: self.value * k,
            error: self.error * k.abs(),
            evaluations: self.evaluations,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
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

/// 15-point Kronrod rule with the embedded 7-point Gauss error estimate
/// (QUADPACK error rescaling).
pub fn gauss_kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = ((res_k - res_g) * half).abs();
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    Estimate {
        value: res_k * half,
        error: scaled,
        evaluations: 15,
    }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
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
        self.est
            .error
            .partial_cmp(&other.est.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive bisection on `[a, b]` (finite).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate::default());
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(crate::error::invalid("bounds", "integrate requires finite bounds"));
    }
    let first = gauss_kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut err = first.error;
    let mut evals = first.evaluations;
    heap.push(Panel { a, b, est: first });
    let mut subdivisions = 1;
    while err > cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                lower: a,
                upper: b,
                error: err,
                tolerance: cfg.abs_tol.max(cfg.rel_tol * total.abs()),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval exhausted at machine precision; accept what we have
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod15(&f, worst.a, mid);
        let right = gauss_kronrod15(&f, mid, worst.b);
        total += left.value + right.value - worst.est.value;
        err += left.error + right.error - worst.est.error;
        evals += 30;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: right,
        });
        subdivisions += 1;
    }
    // recompute from panels to avoid drift in the running sums
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
    if !value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            lower: a,
            upper: b,
            error: f64::INFINITY,
            tolerance: cfg.abs_tol,
        });
    }
    Ok(Estimate {
        value,
        error,
        evaluations: evals,
    })
}

const MAX_DECADES: usize = 60;

/// Integral over `[lower, upper]` where `lower` may be `0` and `upper` may be
/// infinite. Improper ends are covered by decade panels; once the ratio of
/// successive panel contributions settles, the remaining geometric series is
/// summed in closed form. Exact for pure power laws, which is the regime the
/// declared envelopes guarantee.
pub fn integrate_decades<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    if lower < 0.0 || upper < lower {
        return Err(crate::error::invalid("bounds", "need 0 <= lower <= upper"));
    }
    if lower == upper {
        return Ok(Estimate::default());
    }
    match (lower == 0.0, upper.is_infinite()) {
        (false, false) => integrate(&f, lower, upper, cfg),
        (true, false) => decade_sweep(&f, upper, Direction::TowardZero, cfg),
        (false, true) => decade_sweep(&f, lower, Direction::TowardInfinity, cfg),
        (true, true) => {
            let a = decade_sweep(&f, 1.0, Direction::TowardZero, cfg)?;
            let b = decade_sweep(&f, 1.0, Direction::TowardInfinity, cfg)?;
            Ok(a + b)
        }
    }
}

#[derive(Clone, Copy)]
enum Direction {
    TowardZero,
    TowardInfinity,
}

fn decade_sweep<F: Fn(f64) -> f64>(
    f: &F,
    anchor: f64,
    dir: Direction,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let panel_cfg = QuadConfig {
        abs_tol: cfg.abs_tol * 1e-2,
        ..*cfg
    };
    let mut total = Estimate::default();
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut edge = anchor;
    for _ in 0..MAX_DECADES {
        let next = match dir {
            Direction::TowardZero => edge * 0.1,
            Direction::TowardInfinity => edge * 10.0,
        };
        let (a, b) = match dir {
            Direction::TowardZero => (next, edge),
            Direction::TowardInfinity => (edge, next),
        };
        let panel = integrate(f, a, b, &panel_cfg)?;
        total = total + panel;
        let c = panel.value;
        let negligible = c.abs() <= 1e-3 * cfg.abs_tol
            && c.abs() <= cfg.rel_tol * 1e-3 * total.value.abs().max(f64::MIN_POSITIVE);
        if c == 0.0 || negligible {
            return Ok(total);
        }
        if let Some(p) = prev {
            let ratio = c / p;
            if let Some(pr) = prev_ratio {
                let settled = (ratio - pr).abs() <= 1e-4 * ratio.abs().max(1e-12);
                if ratio.abs() < 1.0 && (settled || ratio.abs() < 1e-6) {
                    let tail = c * ratio / (1.0 - ratio);
                    let tail_err = (tail * (ratio - pr).abs() / (1.0 - ratio.abs())).abs()
                        + 1e-12 * tail.abs();
                    let tol = cfg.abs_tol.max(cfg.rel_tol * total.value.abs());
                    if tail.abs() <= 1e6 * tol || settled {
                        total.value += tail;
                        total.error += tail_err;
                        return Ok(total);
                    }
                }
            }
            prev_ratio = Some(ratio);
        }
        prev = Some(c);
        edge = next;
    }
    Err(Error::QuadratureNonConvergence {
        lower: if matches!(dir, Direction::TowardZero) { 0.0 } else { anchor },
        upper: if matches!(dir, Direction::TowardZero) { anchor } else { f64::INFINITY },
        error: total.error,
        tolerance: cfg.abs_tol,
    })
}

/// Integral over `[0, ∞)` of an integrand whose behaviour changes only near
/// the given characteristic `scales`. The window two decades either side of
/// the scales is integrated adaptively in `ln r`; the ends use decade panels,
/// so the integrand must follow a power law beyond the window.
pub fn integrate_radial<F: Fn(f64) -> f64>(f: F, scales: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    let (lo, hi) = window(scales);
    let inner = integrate(|u: f64| {
        let r = u.exp();
        f(r) * r
    }, lo.ln(), hi.ln(), cfg)?;
    let near = integrate_decades(&f, 0.0, lo, cfg)?;
    let far = integrate_decades(&f, hi, f64::INFINITY, cfg)?;
    Ok(near + inner + far)
}

/// Same as [`integrate_radial`] but over `[0, upper]`.
pub fn integrate_radial_to<F: Fn(f64) -> f64>(
    f: F,
    upper: f64,
    scales: &[f64],
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let (lo, _) = window(scales);
    let lo = lo.min(upper * 1e-2);
    let inner = integrate(|u: f64| {
        let r = u.exp();
        f(r) * r
    }, lo.ln(), upper.ln(), cfg)?;
    let near = integrate_decades(&f, 0.0, lo, cfg)?;
    Ok(near + inner)
}

/// Same as [`integrate_radial`] but over `[lower, ∞)` with `lower > 0`.
pub fn integrate_radial_from<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    scales: &[f64],
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let (_, hi) = window(scales);
    let hi = hi.max(lower * 1e2);
    let inner = integrate(|u: f64| {
        let r = u.exp();
        f(r) * r
    }, lower.ln(), hi.ln(), cfg)?;
    let far = integrate_decades(&f, hi, f64::INFINITY, cfg)?;
    Ok(inner + far)
}

fn window(scales: &[f64]) -> (f64, f64) {
    let mut lo: f64 = 1.0;
    let mut hi: f64 = 1.0;
    for &s in scales.iter().filter(|s| s.is_finite() && **s > 0.0) {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    (lo * 1e-2, hi * 1e2)
}

/// `∫_a^∞ h(r) r^{-p} dr` for `p > 1` and bounded `h` that either converges
/// or oscillates almost periodically at infinity. Decade panels are summed
/// until the weighted mean of `h` over a decade stabilises; the remainder is
/// that mean times `∫ r^{-p}`.
pub fn integrate_weighted_tail<H: Fn(f64) -> f64>(
    h: H,
    p: f64,
    a: f64,
    max_decades: usize,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    if !(p > 1.0) || !(a > 0.0) {
        return Err(crate::error::invalid("p", "need p > 1 and a > 0"));
    }
    let panel_cfg = QuadConfig {
        abs_tol: cfg.abs_tol * 1e-2,
        max_subdivisions: cfg.max_subdivisions.max(20_000),
        ..*cfg
    };
    let weight = |x: f64, y: f64| (x.powf(1.0 - p) - y.powf(1.0 - p)) / (p - 1.0);
    let mut total = Estimate::default();
    let mut prev_mean: Option<f64> = None;
    let mut edge = a;
    for _ in 0..max_decades.max(2) {
        let next = edge * 10.0;
        let panel = integrate(|r: f64| h(r) * r.powf(-p), edge, next, &panel_cfg)?;
        total = total + panel;
        let m = panel.value / weight(edge, next);
        let tail_w = next.powf(1.0 - p) / (p - 1.0);
        if let Some(pm) = prev_mean {
            let tol = cfg.abs_tol.max(cfg.rel_tol * total.value.abs());
            if ((m - pm) * tail_w).abs() <= tol {
                total.value += m * tail_w;
                total.error += ((m - pm) * tail_w).abs();
                return Ok(total);
            }
        }
        prev_mean = Some(m);
        edge = next;
    }
    let m = prev_mean.unwrap_or(0.0);
    let tail_w = edge.powf(1.0 - p) / (p - 1.0);
    let tol = cfg.abs_tol.max(cfg.rel_tol * total.value.abs());
    Err(Error::QuadratureNonConvergence {
        lower: a,
        upper: f64::INFINITY,
        error: (m * tail_w).abs(),
        tolerance: tol,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
