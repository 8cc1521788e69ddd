//! Standard-normal primitives: Φ, φ, Φ⁻¹, the Mills ratio φ/Φ and its root,
//! and the Gaussian trade-off curve G_μ(α) = Φ(Φ⁻¹(1−α) − μ).
//!
//! Φ is built on Cody's rational minimax erf/erfc, accurate to a few ulp;
//! every threshold and audit quantity downstream inherits that accuracy.
#![allow(clippy::excessive_precision)]

use crate::error::Error;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

// Cody's rational approximations for erf/erfc (double precision).
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_09e1,
    2.440_246_379_344_441_73e2,
    1.282_616_526_077_372_28e3,
    2.844_236_833_439_170_62e3,
];
const ERFC_C: [f64; 9] = [
    5.641_884_969_886_700_89e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_31e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
const ERFC_D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_58e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];
const ERFC_P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_42e0,
    1.872_952_849_923_460_47e0,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];
const SQRPI: f64 = 5.641_895_835_477_562_869_5e-1;

/// erf(x) for |x| <= 0.46875.
fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// exp(-y^2) with the argument split to limit rounding in the tail.
fn exp_neg_ysq(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// erfc(y) for y > 0.46875.
fn erfc_tail(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        exp_neg_ysq(y) * (num + ERFC_C[7]) / (den + ERFC_D[7])
    } else if y < 26.6 {
        let z = 1.0 / (y * y);
        let mut num = ERFC_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERFC_P[i]) * z;
            den = (den + ERFC_Q[i]) * z;
        }
        let r = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        exp_neg_ysq(y) * (SQRPI - r) / y
    } else {
        0.0
    }
}

fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        1.0 - erf_small(x)
    } else if x > 0.0 {
        erfc_tail(y)
    } else {
        2.0 - erfc_tail(y)
    }
}

/// Standard normal CDF Φ(z). Saturates to 0/1 for |z| beyond the erfc range.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Upper tail 1 − Φ(z), computed without cancellation.
pub(crate) fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Standard normal density φ(z).
pub fn normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

// Acklam's rational approximation to Φ⁻¹, |relative error| < 1.15e-9.
const ACK_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239e0,
];
const ACK_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACK_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838e0,
    -2.549_732_539_343_734e0,
    4.374_664_141_464_968e0,
    2.938_163_982_698_783e0,
];
const ACK_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996e0,
    3.754_408_661_907_416e0,
];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((ACK_C[0] * q + ACK_C[1]) * q + ACK_C[2]) * q + ACK_C[3]) * q + ACK_C[4]) * q
            + ACK_C[5])
            / ((((ACK_D[0] * q + ACK_D[1]) * q + ACK_D[2]) * q + ACK_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((ACK_A[0] * r + ACK_A[1]) * r + ACK_A[2]) * r + ACK_A[3]) * r + ACK_A[4]) * r
            + ACK_A[5])
            * q
            / (((((ACK_B[0] * r + ACK_B[1]) * r + ACK_B[2]) * r + ACK_B[3]) * r + ACK_B[4]) * r
                + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((ACK_C[0] * q + ACK_C[1]) * q + ACK_C[2]) * q + ACK_C[3]) * q + ACK_C[4]) * q
            + ACK_C[5])
            / ((((ACK_D[0] * q + ACK_D[1]) * q + ACK_D[2]) * q + ACK_D[3]) * q + 1.0)
    }
}

/// Standard normal quantile Φ⁻¹(p) for p in (0, 1).
///
/// Rational initial estimate refined by one Halley step against the
/// high-accuracy CDF; |Φ(result) − p| stays well under 1e-12.
pub fn normal_quantile(p: f64) -> Result<f64, Error> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "normal_quantile requires p in (0,1), got {p}"
        )));
    }
    Ok(normal_quantile_unchecked(p))
}

pub(crate) fn normal_quantile_unchecked(p: f64) -> f64 {
    let x = acklam(p);
    let pdf = normal_pdf(x);
    if pdf == 0.0 {
        return x;
    }
    // Residual in whichever tail representation is exact for this p.
    let e = if p <= 0.5 {
        normal_cdf(x) - p
    } else {
        (1.0 - p) - normal_sf(x)
    };
    let u = e / pdf;
    x - u / (1.0 + 0.5 * x * u)
}

/// Mills ratio h(z) = φ(z)/Φ(z), strictly decreasing on ℝ.
///
/// For z < −8 the direct quotient degrades to 0/0; there the reciprocal
/// upper-tail Mills ratio is evaluated by its continued fraction instead.
pub fn mills_ratio(z: f64) -> f64 {
    if z >= -8.0 {
        normal_pdf(z) / normal_cdf(z)
    } else {
        let x = -z;
        // (1-Φ(x))/φ(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))), backward.
        let mut f = 0.0;
        for k in (1..=48u32).rev() {
            f = f64::from(k) / (x + f);
        }
        x + f
    }
}

/// Root z* of φ(z)/Φ(z) = sigma, for sigma > 0.
///
/// Geometric bracket expansion from z = 0, then bisection; the Mills ratio
/// is monotone so convergence is unconditional.
pub fn solve_z_star(sigma: f64) -> Result<f64, Error> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!(
            "solve_z_star requires sigma > 0, got {sigma}"
        )));
    }
    let tol = 1e-13 * sigma.max(1.0);
    let h0 = mills_ratio(0.0);
    if (h0 - sigma).abs() <= tol {
        return Ok(0.0);
    }
    // h decreasing: sigma < h(0) puts the root at z > 0, else z < 0.
    let (mut lo, mut hi) = if sigma < h0 {
        let mut hi = 1.0;
        while mills_ratio(hi) > sigma {
            hi *= 2.0;
        }
        (0.0, hi)
    } else {
        let mut lo = -1.0;
        while mills_ratio(lo) < sigma {
            lo *= 2.0;
        }
        (lo, 0.0)
    };
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let h = mills_ratio(mid);
        if (h - sigma).abs() <= tol || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if h > sigma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Gaussian trade-off curve G_μ(α) = Φ(Φ⁻¹(1 − α) − μ).
pub fn gdp_tradeoff(alpha: f64, mu: f64) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "gdp_tradeoff requires alpha in [0,1], got {alpha}"
        )));
    }
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!(
            "gdp_tradeoff requires mu >= 0, got {mu}"
        )));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    Ok(normal_cdf(normal_quantile_unchecked(1.0 - alpha) - mu))
}

/// One (α, β) point on a Gaussian trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdpCurvePoint {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
}

impl GdpCurvePoint {
    /// The point of G_μ at level alpha.
    pub fn on_curve(alpha: f64, mu: f64) -> Result<Self, Error> {
        let beta = gdp_tradeoff(alpha, mu)?;
        Ok(GdpCurvePoint { alpha, beta, mu })
    }
}
