use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CVector, C64};

/// Complex Wiener increments, one per Lindblad channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseIncrement {
    pub values: CVector,
}

impl NoiseIncrement {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Real components `(dW^R, dW^I)` with `dW = (dW^R + i dW^I) / sqrt(2)`.
    pub fn real_components(&self) -> Vec<f64> {
        let m = self.values.len();
        let mut out = vec![0.0; 2 * m];
        for (l, z) in self.values.iter().enumerate() {
            out[l] = std::f64::consts::SQRT_2 * z.re;
            out[l + m] = std::f64::consts::SQRT_2 * z.im;
        }
        out
    }
}

/// Random stream `k` of the family selected by `seed`.
///
/// Streams are independent of each other and of the order they are drawn in.
pub fn trajectory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `m` increments `(g_R + i g_I) sqrt(dt / 2)`.
pub fn sample_wiener<R: Rng + ?Sized>(m: usize, dt: f64, rng: &mut R) -> NoiseIncrement {
    let mut values = CVector::zeros(m);
    fill_wiener(
        values.as_mut_slice(),
        dt.sqrt() * std::f64::consts::FRAC_1_SQRT_2,
        rng,
    );
    NoiseIncrement { values }
}

pub(crate) fn fill_wiener<R: Rng + ?Sized>(out: &mut [C64], scale: f64, rng: &mut R) {
    for z in out {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = C64::new(re * scale, im * scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_complex_wiener_law() {
        let n = 1_000_000usize;
        let dt = 1e-3;
        let mut rng = trajectory_rng(7, 0);
        let (mut mean, mut cov, mut pcov, mut cross) = (
            C64::new(0.0, 0.0),
            [0.0; 2],
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        );
        for _ in 0..n {
            let w = sample_wiener(2, dt, &mut rng).values;
            mean += w[0];
            cov[0] += w[0].norm_sqr();
            cov[1] += w[1].norm_sqr();
            pcov += w[0] * w[0];
            cross += w[0] * w[1].conj();
        }
        let nf = n as f64;
        mean /= nf;
        pcov /= nf;
        cross /= nf;
        assert!(mean.norm() < 4.0 * (dt / nf).sqrt());
        for c in cov {
            assert!((c / nf - dt).abs() < 5.0 * dt / nf.sqrt());
        }
        assert!(pcov.norm() < 5.0 * dt / nf.sqrt());
        assert!(cross.norm() < 5.0 * dt / nf.sqrt());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample_wiener(3, 1e-3, &mut trajectory_rng(1, 4));
        let b = sample_wiener(3, 1e-3, &mut trajectory_rng(1, 4));
        let c = sample_wiener(3, 1e-3, &mut trajectory_rng(1, 5));
        let d = sample_wiener(3, 1e-3, &mut trajectory_rng(2, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn real_components_layout() {
        let w = NoiseIncrement {
            values: CVector::from_column_slice(&[C64::new(1.0, 2.0), C64::new(3.0, 4.0)]),
        };
        let r = w.real_components();
        let s = std::f64::consts::SQRT_2;
        assert_eq!(r, vec![s, 3.0 * s, 2.0 * s, 4.0 * s]);
    }
}
