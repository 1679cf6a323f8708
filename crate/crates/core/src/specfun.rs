//! Special functions used by the coupling, packet and kernel code.
//!
//! Phase conventions: Clebsch–Gordan coefficients follow Condon–Shortley,
//! and `d^1_{m,m'}(θ)` is the standard small Wigner matrix for a rotation
//! about the y-axis, `d^1 = exp(-iθJ_y)` restricted to real entries.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("angular index out of range: {0}")]
    Domain(String),
    #[error("faddeeva overflow at z = {re} + {im}i")]
    Saturation { re: f64, im: f64 },
}

/// Element `d^1_{n,np}(theta)` of the spin-1 rotation matrix.
pub fn wigner_d1(n: i32, np: i32, theta: f64) -> Result<f64, SpecfunError> {
    if n.abs() > 1 || np.abs() > 1 {
        return Err(SpecfunError::Domain(format!(
            "d^1 needs |n|, |n'| <= 1, got ({n}, {np})"
        )));
    }
    let (s, c) = theta.sin_cos();
    let hs = s * FRAC_1_SQRT_2;
    let v = match (n, np) {
        (1, 1) | (-1, -1) => 0.5 * (1.0 + c),
        (1, -1) | (-1, 1) => 0.5 * (1.0 - c),
        (1, 0) | (0, -1) => -hs,
        (0, 1) | (-1, 0) => hs,
        (0, 0) => c,
        _ => unreachable!(),
    };
    Ok(v)
}

/// Full 3x3 matrix, rows and columns ordered `+1, 0, -1`.
pub fn wigner_d1_matrix(theta: f64) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, n) in [1, 0, -1].into_iter().enumerate() {
        for (j, np) in [1, 0, -1].into_iter().enumerate() {
            out[i][j] = wigner_d1(n, np, theta).expect("indices in range");
        }
    }
    out
}

fn factorial(n: i64) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn doubled(x: f64, what: &str) -> Result<i64, SpecfunError> {
    let d = 2.0 * x;
    if (d - d.round()).abs() > 1e-9 {
        return Err(SpecfunError::Domain(format!("{what} = {x} is not a half-integer")));
    }
    Ok(d.round() as i64)
}

/// Clebsch–Gordan coefficient `<j1 m1; j2 m2 | J M>` (Condon–Shortley).
///
/// Arguments are integers or half-integers. Couplings violating the triangle
/// rule, m-additivity or `|m| <= j` give `0`; negative `j` is an error.
pub fn clebsch_gordan(
    j1: f64,
    m1: f64,
    j2: f64,
    m2: f64,
    j: f64,
    m: f64,
) -> Result<f64, SpecfunError> {
    let (tj1, tm1) = (doubled(j1, "j1")?, doubled(m1, "m1")?);
    let (tj2, tm2) = (doubled(j2, "j2")?, doubled(m2, "m2")?);
    let (tj, tm) = (doubled(j, "J")?, doubled(m, "M")?);
    if tj1 < 0 || tj2 < 0 || tj < 0 {
        return Err(SpecfunError::Domain(format!(
            "negative angular momentum in <{j1} {m1}; {j2} {m2} | {j} {m}>"
        )));
    }
    if tm1 + tm2 != tm
        || tj < (tj1 - tj2).abs()
        || tj > tj1 + tj2
        || (tj1 + tj2 + tj) % 2 != 0
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm.abs() > tj
        || (tj1 + tm1) % 2 != 0
        || (tj2 + tm2) % 2 != 0
        || (tj + tm) % 2 != 0
    {
        return Ok(0.0);
    }
    // All combinations below are even, so halving is exact.
    let h = |x: i64| x / 2;
    let a = h(tj1 + tj2 - tj);
    let b = h(tj1 - tj2 + tj);
    let c = h(-tj1 + tj2 + tj);
    let d = h(tj1 + tj2 + tj) + 1;
    let pref = ((tj + 1) as f64 * factorial(a) * factorial(b) * factorial(c) / factorial(d)).sqrt()
        * (factorial(h(tj1 + tm1))
            * factorial(h(tj1 - tm1))
            * factorial(h(tj2 + tm2))
            * factorial(h(tj2 - tm2))
            * factorial(h(tj + tm))
            * factorial(h(tj - tm)))
        .sqrt();
    let kmin = 0.max(h(tj2 - tj - tm1)).max(h(tj1 - tj + tm2));
    let kmax = a.min(h(tj1 - tm1)).min(h(tj2 + tm2));
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(a - k)
            * factorial(h(tj1 - tm1) - k)
            * factorial(h(tj2 + tm2) - k)
            * factorial(h(tj - tj2 + tm1) + k)
            * factorial(h(tj - tj1 - tm2) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / den;
    }
    Ok(pref * sum)
}

/// Cylindrical Bessel function of the first kind `J_m(x)` for integer order.
pub fn bessel_j(m: i32, x: f64) -> f64 {
    let order = m.unsigned_abs() as usize;
    let mut sign = if m < 0 && order % 2 == 1 { -1.0 } else { 1.0 };
    if x < 0.0 && order % 2 == 1 {
        sign = -sign;
    }
    sign * bessel_j_nonneg(order, x.abs())
}

fn bessel_j_nonneg(order: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    // Ascending series: fast and cancellation-free while x^2/4 is small
    // compared with the order.
    if x < 1.0 || x * x < 0.5 * (order as f64 + 1.0) {
        return bessel_j_series(order, x);
    }
    bessel_j_miller(order, x)
}

fn bessel_j_series(order: usize, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powi(order as i32) / factorial(order as i64);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalised with `J_0 + 2 Σ J_{2k} = 1`.
fn bessel_j_miller(order: usize, x: f64) -> f64 {
    let big = order.max(x as usize);
    let mut start = big + 20 + (40.0 * big as f64).sqrt() as usize;
    start += start % 2;
    let (mut jp1, mut j) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    let mut result = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        // j now holds the (unnormalised) value of order k - 1.
        if k - 1 == order {
            result = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    result / norm
}

/// Spherical Bessel function `j_L(x)`, `x >= 0`.
pub fn spherical_bessel(l: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    if x < 2.0 {
        return spherical_bessel_series(l, x);
    }
    if (l as f64) <= x {
        let (s, c) = x.sin_cos();
        let mut jm1 = s / x;
        if l == 0 {
            return jm1;
        }
        let mut j = s / (x * x) - c / x;
        for k in 1..l {
            let jp1 = (2 * k + 1) as f64 / x * j - jm1;
            jm1 = j;
            j = jp1;
        }
        return j;
    }
    // Backward recurrence, normalised to j_0.
    let start = l as usize + 20 + x as usize;
    let (mut jp1, mut j) = (0.0_f64, 1e-300_f64);
    let mut target = 0.0;
    for k in (1..=start).rev() {
        let jm1 = (2 * k + 1) as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            target *= 1e-250;
        }
        if k - 1 == l as usize {
            target = j;
        }
    }
    // j holds order 0 and jp1 order 1; normalise on whichever is larger.
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    if j0.abs() >= j1.abs() {
        target * j0 / j
    } else {
        target * j1 / jp1
    }
}

fn spherical_bessel_series(l: u32, x: f64) -> f64 {
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= x / (2 * k + 1) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100u32 {
        term *= q / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Spherical Neumann function `y_L(x)`, `x > 0`, by upward recurrence.
pub fn spherical_neumann(l: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let mut ym1 = -c / x;
    if l == 0 {
        return ym1;
    }
    let mut y = -c / (x * x) - s / x;
    for k in 1..l {
        let yp1 = (2 * k + 1) as f64 / x * y - ym1;
        ym1 = y;
        y = yp1;
    }
    y
}

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const MAX_EXP_ARG: f64 = 708.503_061_461_606;
const MAX_TRIG_ARG: f64 = 3.537_118_876_014_22e15;

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`.
///
/// Inside a small ellipse around the origin a power series is summed; elsewhere
/// a continued fraction (with a Taylor shift near the real axis) is used. The
/// lower half-plane follows from `w(z) = 2 exp(-z^2) - w(-z)`, which overflows
/// for large `Im z < 0`; those inputs return [`SpecfunError::Saturation`].
pub fn faddeeva(z: Complex64) -> Result<Complex64, SpecfunError> {
    let (xi, yi) = (z.re, z.im);
    let saturated = || SpecfunError::Saturation { re: xi, im: yi };
    if !xi.is_finite() || !yi.is_finite() {
        return Err(saturated());
    }
    let xabs = xi.abs();
    let yabs = yi.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;
    let mut xquad = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;
    let near_origin = qrho < 0.085264;
    let (mut u, mut v);
    let (mut u2, mut v2) = (0.0, 0.0);
    if near_origin {
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i64;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let xaux = (xsum * xquad - ysum * yquad) / i as f64;
            ysum = (xsum * yquad + ysum * xquad) / i as f64;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0_i64;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i64;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i64;
            nu = (16.0 + 26.0 * qrho).round() as i64;
        }
        let h2 = 2.0 * h;
        let shifted = h > 0.0;
        let mut qlambda = if shifted { h2.powi(kapn as i32) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if shifted && n <= kapn {
                let tx = qlambda + sx;
                let nsx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                sx = nsx;
                qlambda /= h2;
            }
        }
        if shifted {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        } else {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }
    if yi < 0.0 {
        if near_origin {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            xquad = -xquad;
            if yquad > MAX_TRIG_ARG || xquad > MAX_EXP_ARG {
                return Err(saturated());
            }
            let w1 = 2.0 * xquad.exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    let out = Complex64::new(u, v);
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(saturated());
    }
    Ok(out)
}

/// `erfc(z)` for complex `z` with `Re z >= 0` via `exp(-z^2) w(iz)`.
pub fn erfc_complex(z: Complex64) -> Result<Complex64, SpecfunError> {
    let w = faddeeva(Complex64::i() * z)?;
    Ok((-z * z).exp() * w)
}

/// `ln n!` for small non-negative integers.
pub fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn d1_identity_at_zero() {
        assert_eq!(wigner_d1(1, 1, 0.0).unwrap(), 1.0);
        assert_eq!(wigner_d1(1, 0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn d1_out_of_range_is_error() {
        assert!(wigner_d1(2, 0, 0.1).is_err());
        assert!(wigner_d1(0, -3, 0.1).is_err());
    }

    #[test]
    fn d1_quarter_turn() {
        let v = wigner_d1(1, 0, FRAC_PI_2).unwrap();
        assert!((v + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cg_trivial_cases() {
        assert!((clebsch_gordan(1.0, 0.0, 0.0, 0.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(1.0, 1.0, 2.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(clebsch_gordan(-1.0, 0.0, 1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn cg_half_integer() {
        // <1/2 1/2; 1/2 -1/2 | 0 0> = 1/sqrt(2)
        let v = clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0.0, 0.0).unwrap();
        assert!((v - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn bessel_trivial() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert!((bessel_j(-1, 0.7) + bessel_j(1, 0.7)).abs() < 1e-16);
        assert!((bessel_j(3, -1.3) + bessel_j(3, 1.3)).abs() < 1e-16);
    }

    #[test]
    fn spherical_trivial() {
        assert_eq!(spherical_bessel(0, 0.0), 1.0);
        assert_eq!(spherical_bessel(2, 0.0), 0.0);
    }

    #[test]
    fn faddeeva_origin_and_reflection() {
        assert_eq!(faddeeva(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let z = Complex64::new(1.0, 2.0);
        let lhs = faddeeva(-z.conj()).unwrap();
        let rhs = faddeeva(z).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn faddeeva_saturates_deep_in_lower_half_plane() {
        assert!(matches!(
            faddeeva(Complex64::new(1.0, -40.0)),
            Err(SpecfunError::Saturation { .. })
        ));
    }
}
