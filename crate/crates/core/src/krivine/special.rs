//! Special functions needed by the embedding constructions: integer-order
//! Bessel `J_n`, spherical Bessel `j_l`, Legendre polynomials and real
//! spherical harmonics.
//!
//! All uses in this crate have small arguments (`x` at most a few), so
//! `J_n` uses its power series directly, while `j_l` uses the classical
//! downward (Miller) recurrence normalized against the closed form
//! `j_0 = sin(x)/x`, which stays stable at small arguments where the
//! upward recurrence loses all accuracy.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Bessel function of the first kind, integer order, by power series.
///
/// Accurate to near machine precision for `|x| <= 6`; this crate only
/// evaluates it for `0 <= x <= 2`.
pub fn bessel_j(order: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let mut sum = term;
    let h2 = half * half;
    for m in 1..=300 {
        term *= -h2 / (m as f64 * (m + order) as f64);
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
    }
    sum
}

/// Spherical Bessel functions `j_0(x) .. j_l_max(x)` for `x >= 0`.
///
/// Runs the three-term recurrence downward from order `l_max + 20` with a
/// throwaway start, rescaling on overflow, then normalizes against
/// `j_0 = sin(x)/x`.
pub fn spherical_bessel(l_max: usize, x: f64) -> Result<Vec<f64>> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "spherical Bessel argument must be finite and nonnegative, got {x}"
        )));
    }
    let mut out = vec![0.0; l_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let start = l_max + 20;
    let mut above = 0.0_f64; // f_{k+1}
    let mut here = 1e-30_f64; // f_k, arbitrary scale fixed by normalization
    for k in (0..=start).rev() {
        // f_{k-1} stored into `here` after the shift below
        let below = (2 * k + 1) as f64 / x * here - above;
        if k <= l_max {
            out[k] = here;
        }
        above = here;
        here = below;
        if here.abs() > 1e250 {
            let scale = 1e-250;
            here *= scale;
            above *= scale;
            for v in &mut out {
                *v *= scale;
            }
        }
    }
    // `here` now holds the unnormalized f_{-1}; out[0] holds f_0.
    let j0 = libm::sin(x) / x;
    let scale = j0 / out[0];
    if !scale.is_finite() {
        return Err(Error::Internal(format!(
            "spherical Bessel normalization failed at x = {x}"
        )));
    }
    for v in &mut out {
        *v *= scale;
    }
    Ok(out)
}

/// Legendre polynomial `P_l(t)` by the Bonnet recurrence.
pub fn legendre_p(l: usize, t: f64) -> f64 {
    let mut prev = 1.0;
    if l == 0 {
        return prev;
    }
    let mut here = t;
    for k in 1..l {
        let next = ((2 * k + 1) as f64 * t * here - k as f64 * prev) / (k + 1) as f64;
        prev = here;
        here = next;
    }
    here
}

/// Real spherical harmonics up to degree `l_max` at a point of the unit
/// sphere, organized for extraction of normalized degree blocks.
///
/// The degree-`l` block is the `2l+1` vector with components
/// `sqrt(4 pi / (2l+1)) * Y_lm`, `m = -l..l`, in the real convention
/// (sine components for `m < 0`, cosine for `m > 0`). By the addition
/// theorem these blocks satisfy `block_l(u) . block_l(v) = P_l(u . v)`,
/// and in particular have unit norm.
pub struct SphericalHarmonics {
    l_max: usize,
    /// Fully normalized associated Legendre values, indexed `l(l+1)/2+m`.
    plm: Vec<f64>,
    /// `cos(m phi)`, `sin(m phi)` for `m = 0..=l_max`.
    cos_m: Vec<f64>,
    sin_m: Vec<f64>,
}

impl SphericalHarmonics {
    /// Evaluates at a unit vector `(x, y, z)`.
    pub fn evaluate(l_max: usize, point: &[f64]) -> Result<Self> {
        if point.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "spherical harmonics need a point in R^3, got dimension {}",
                point.len()
            )));
        }
        let (x, y, z) = (point[0], point[1], point[2]);
        let cos_t = z;
        let sin_t = libm::sqrt(x * x + y * y);
        let phi = libm::atan2(y, x);

        // Fully normalized associated Legendre recurrence (no
        // Condon-Shortley phase): p(0,0) = sqrt(1/4pi),
        // p(m,m) = sqrt((2m+1)/2m) sin_t p(m-1,m-1),
        // p(m+1,m) = sqrt(2m+3) cos_t p(m,m),
        // p(l,m) = a (cos_t p(l-1,m) - b p(l-2,m)).
        let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
        let mut plm = vec![0.0; (l_max + 1) * (l_max + 2) / 2];
        plm[0] = libm::sqrt(1.0 / (4.0 * core::f64::consts::PI));
        for m in 1..=l_max {
            plm[idx(m, m)] =
                libm::sqrt((2 * m + 1) as f64 / (2 * m) as f64) * sin_t * plm[idx(m - 1, m - 1)];
        }
        for m in 0..l_max {
            plm[idx(m + 1, m)] = libm::sqrt((2 * m + 3) as f64) * cos_t * plm[idx(m, m)];
        }
        for m in 0..=l_max {
            for l in (m + 2)..=l_max {
                let lf = l as f64;
                let mf = m as f64;
                let a = libm::sqrt((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf));
                let b = libm::sqrt(
                    ((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0),
                );
                plm[idx(l, m)] = a * (cos_t * plm[idx(l - 1, m)] - b * plm[idx(l - 2, m)]);
            }
        }

        let mut cos_m = vec![0.0; l_max + 1];
        let mut sin_m = vec![0.0; l_max + 1];
        for m in 0..=l_max {
            cos_m[m] = libm::cos(m as f64 * phi);
            sin_m[m] = libm::sin(m as f64 * phi);
        }
        Ok(SphericalHarmonics {
            l_max,
            plm,
            cos_m,
            sin_m,
        })
    }

    /// The normalized degree-`l` block described on the type.
    pub fn degree_block(&self, l: usize) -> Result<Vec<f64>> {
        if l > self.l_max {
            return Err(Error::InvalidArgument(format!(
                "degree {l} exceeds the evaluated maximum {}",
                self.l_max
            )));
        }
        let idx = |m: usize| l * (l + 1) / 2 + m;
        let scale = libm::sqrt(4.0 * core::f64::consts::PI / (2 * l + 1) as f64);
        let sqrt2 = core::f64::consts::SQRT_2;
        let mut block = vec![0.0; 2 * l + 1];
        // m = -l..-1 (sine), m = 0, m = 1..l (cosine).
        for m in 1..=l {
            block[l - m] = scale * sqrt2 * self.plm[idx(m)] * self.sin_m[m];
            block[l + m] = scale * sqrt2 * self.plm[idx(m)] * self.cos_m[m];
        }
        block[l] = scale * self.plm[idx(0)];
        Ok(block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    use crate::rng::{sample_sphere, RandomSource};

    #[test]
    fn bessel_j_matches_closed_form_checks() {
        // J_0(0) = 1, J_n(0) = 0.
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(3, 0.0), 0.0);
        // J_0' = -J_1 via central differences.
        let x = 1.3;
        let h = 1e-5;
        let deriv = (bessel_j(0, x + h) - bessel_j(0, x - h)) / (2.0 * h);
        assert_relative_eq!(deriv, -bessel_j(1, x), epsilon = 1e-9);
        // Recurrence J_{n-1} + J_{n+1} = (2n/x) J_n.
        for n in 1..6 {
            assert_relative_eq!(
                bessel_j(n - 1, x) + bessel_j(n + 1, x),
                2.0 * n as f64 / x * bessel_j(n, x),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn spherical_bessel_matches_closed_forms() {
        // The closed forms cancel catastrophically near zero, so they are
        // trusted oracles only at moderate arguments.
        for &x in &[0.5, 1.036, 1.5, 2.0] {
            let j = spherical_bessel(3, x).unwrap();
            let j0 = libm::sin(x) / x;
            let j1 = libm::sin(x) / (x * x) - libm::cos(x) / x;
            assert_relative_eq!(j[0], j0, epsilon = 1e-14);
            assert_relative_eq!(j[1], j1, max_relative = 1e-12);
            // j_2 = (3/x^2 - 1) sin x / x - 3 cos x / x^2
            let j2 = (3.0 / (x * x) - 1.0) * libm::sin(x) / x - 3.0 * libm::cos(x) / (x * x);
            assert_relative_eq!(j[2], j2, max_relative = 1e-10);
        }
        // Series oracles for tiny arguments:
        // j_l = x^l / (2l+1)!! * (1 - x^2 / (2(2l+3)) + O(x^4)).
        for &x in &[1e-6, 1e-3] {
            let j = spherical_bessel(2, x).unwrap();
            assert_relative_eq!(j[1], x / 3.0 * (1.0 - x * x / 10.0), max_relative = 1e-12);
            assert_relative_eq!(
                j[2],
                x * x / 15.0 * (1.0 - x * x / 14.0),
                max_relative = 1e-12
            );
        }
        let j = spherical_bessel(5, 1e-4).unwrap();
        assert_relative_eq!(j[3], 1e-12 / 105.0, max_relative = 1e-7);
        assert_relative_eq!(j[5], 1e-20 / 10395.0, max_relative = 1e-7);
        // x = 0 and invalid arguments.
        let j = spherical_bessel(4, 0.0).unwrap();
        assert_eq!(j[0], 1.0);
        assert_eq!(j[3], 0.0);
        assert!(spherical_bessel(2, -1.0).is_err());
    }

    #[test]
    fn legendre_satisfies_known_values() {
        assert_eq!(legendre_p(0, 0.3), 1.0);
        assert_eq!(legendre_p(1, 0.3), 0.3);
        let t = -0.42;
        assert_relative_eq!(legendre_p(2, t), 0.5 * (3.0 * t * t - 1.0), epsilon = 1e-15);
        assert_relative_eq!(
            legendre_p(3, t),
            0.5 * (5.0 * t * t * t - 3.0 * t),
            epsilon = 1e-15
        );
        for l in 0..10 {
            assert_relative_eq!(legendre_p(l, 1.0), 1.0, epsilon = 1e-13);
            assert_relative_eq!(
                legendre_p(l, -1.0),
                if l % 2 == 0 { 1.0 } else { -1.0 },
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn degree_one_block_is_the_point_itself() {
        // sqrt(4pi/3) (Y_1,-1, Y_10, Y_11) = (y, z, x).
        let p = [0.48, -0.6, 0.64];
        let sh = SphericalHarmonics::evaluate(3, &p).unwrap();
        let b = sh.degree_block(1).unwrap();
        assert_relative_eq!(b[0], p[1], epsilon = 1e-14);
        assert_relative_eq!(b[1], p[2], epsilon = 1e-14);
        assert_relative_eq!(b[2], p[0], epsilon = 1e-14);
        assert!(sh.degree_block(4).is_err());
    }

    #[test]
    fn degree_blocks_satisfy_the_addition_theorem() {
        let mut rng = RandomSource::new(31).rng();
        for _ in 0..25 {
            let u = sample_sphere(&mut rng, 3).unwrap();
            let v = sample_sphere(&mut rng, 3).unwrap();
            let su = SphericalHarmonics::evaluate(9, u.components()).unwrap();
            let sv = SphericalHarmonics::evaluate(9, v.components()).unwrap();
            let t = u.dot(&v).unwrap();
            for l in 0..=9 {
                let bu = su.degree_block(l).unwrap();
                let bv = sv.degree_block(l).unwrap();
                let dot: f64 = bu.iter().zip(&bv).map(|(a, b)| a * b).sum();
                assert_relative_eq!(dot, legendre_p(l, t), epsilon = 1e-12);
                // Unit norm at u = v.
                let norm: f64 = bu.iter().map(|a| a * a).sum();
                assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
            }
        }
        // Poles are regular points of the recurrence.
        let sh = SphericalHarmonics::evaluate(7, &[0.0, 0.0, 1.0]).unwrap();
        let b = sh.degree_block(7).unwrap();
        let norm: f64 = b.iter().map(|a| a * a).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
    }
}
