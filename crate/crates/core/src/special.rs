//! Complex Gamma (Lanczos, g = 7, n = 9) with reflection, and the
//! Bernoulli numbers used by the Euler–Maclaurin tails.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(z)` for `Re z >= 1/2` (principal branch of the Lanczos form).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `ln Gamma(z)` for `Re z > 0`, continuous in `z` (not reduced mod 2 pi i).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma needs Re z > 0");
    if z.re < 0.5 {
        ln_gamma_right(z + 1.0) - z.ln()
    } else {
        ln_gamma_right(z)
    }
}

pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        PI / ((PI * z).sin() * ln_gamma_right(1.0 - z).exp())
    } else {
        ln_gamma_right(z).exp()
    }
}

/// `1 / Gamma(z)`, entire; exactly zero at the non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return Complex64::new(0.0, 0.0);
        }
        (PI * z).sin() * ln_gamma_right(1.0 - z).exp() / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// Digamma `psi(z) = Gamma'(z)/Gamma(z)` for `Re z > 0`: upward recurrence
/// to `Re z >= 10`, then the asymptotic series.
pub fn digamma(mut z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        shift -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for (k, &b) in BERNOULLI_EVEN.iter().take(8).enumerate() {
        series += b / (2 * (k + 1)) as f64 * pow;
        pow *= inv2;
    }
    shift + z.ln() - 0.5 / z - series
}

/// `Gamma(1 - s) * sin(pi (s + kappa) / 2)` through the reflection formula,
/// so that the removable singularities at `s = 0` (kappa = 1) and at the
/// poles of `Gamma(1-s)` cancelled by the sine are handled analytically.
pub fn gamma_sine_factor(s: Complex64, kappa: u8) -> Complex64 {
    let half = 0.5 * PI * s;
    if kappa == 1 && s.norm() < 1e-4 {
        // 1/Gamma(s) = s / Gamma(s+1)
        let s_over_sin = (2.0 / PI) * (1.0 + half * half / 6.0 + 7.0 * half.powi(4) / 360.0);
        return 0.5 * PI * rgamma(s + 1.0) * s_over_sin;
    }
    let denom = if kappa == 0 { half.cos() } else { half.sin() };
    0.5 * PI * rgamma(s) / denom
}

/// `B_{2k}` for `k = 1..=13`.
pub const BERNOULLI_EVEN: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

/// `B_{2k} / (2k)!` for `k = 1..=13`.
pub fn bernoulli_over_factorial() -> [f64; 13] {
    let mut out = [0.0; 13];
    let mut fact = 1.0f64;
    for k in 1..=13usize {
        fact *= ((2 * k - 1) * (2 * k)) as f64;
        out[k - 1] = BERNOULLI_EVEN[k - 1] / fact;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma(c(5.0, 0.0)) - 24.0).norm() < 1e-12);
        assert!((gamma(c(0.5, 0.0)) - PI.sqrt()).norm() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-13);
        // |Gamma(1+i)|^2 = pi / sinh(pi)
        let g = gamma(c(1.0, 1.0));
        assert!((g.norm_sqr() - PI / PI.sinh()).abs() < 1e-14);
        // |Gamma(1/2 + i t)|^2 = pi / cosh(pi t)
        let g = gamma(c(0.5, 3.0));
        assert!((g.norm_sqr() / (PI / (3.0 * PI).cosh()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recurrence_holds_off_axis() {
        for &z in &[c(0.3, 2.0), c(-2.7, 5.0), c(4.1, -20.0)] {
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs / rhs - 1.0).norm() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        for n in 0..5 {
            assert_eq!(rgamma(c(-(n as f64), 0.0)), c(0.0, 0.0));
        }
        let z = c(2.5, -1.0);
        assert!((rgamma(z) * gamma(z) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn gamma_sine_matches_direct_product() {
        for kappa in [0u8, 1] {
            for &s in &[c(0.3, 2.0), c(-1.6, 7.5), c(2.2, -4.0), c(0.5, 0.0)] {
                let direct = gamma(1.0 - s) * (0.5 * PI * (s + kappa as f64)).sin();
                let reflected = gamma_sine_factor(s, kappa);
                assert!((direct / reflected - 1.0).norm() < 1e-12, "s = {s}, kappa = {kappa}");
            }
        }
        // kappa = 1, s = 0: Gamma(1) sin(pi/2) = 1
        assert!((gamma_sine_factor(c(0.0, 0.0), 1) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn digamma_values() {
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((digamma(c(1.0, 0.0)) + euler_gamma).norm() < 1e-14);
        assert!((digamma(c(0.5, 0.0)) + euler_gamma + 2.0 * 2f64.ln()).norm() < 1e-14);
        // against a central difference of ln Gamma
        let z = c(3.0, 40.0);
        let h = 1e-5;
        let fd = (ln_gamma_right(z + h) - ln_gamma_right(z - h)) / (2.0 * h);
        assert!((digamma(z) - fd).norm() < 1e-8);
    }

    #[test]
    fn bernoulli_ratios() {
        let b = bernoulli_over_factorial();
        assert!((b[0] - 1.0 / 12.0).abs() < 1e-18);
        assert!((b[1] + 1.0 / 720.0).abs() < 1e-18);
        // |B_{2k}|/(2k)! ~ 2 / (2 pi)^{2k}
        let k = 13.0;
        assert!((b[12].abs() * (2.0 * PI).powf(2.0 * k) / 2.0 - 1.0).abs() < 1e-6);
    }
}
