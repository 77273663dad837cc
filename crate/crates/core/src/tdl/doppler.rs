use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Normalized Doppler power spectrum of one tap. Frequencies in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DopplerShape {
    /// Classical spectrum of isotropic 2D scattering, support |ν| < f_d.
    Bathtub {
        f_d: f64,
    },
    Gaussian {
        center: f64,
        std: f64,
    },
    /// Uniform on |ν| < f_d.
    Flat {
        f_d: f64,
    },
}

impl DopplerShape {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DopplerShape::Bathtub { f_d } | DopplerShape::Flat { f_d } => f_d > 0.0,
            DopplerShape::Gaussian { center, std } => std > 0.0 && center.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid Doppler shape {self:?}")))
        }
    }

    /// Largest frequency carrying appreciable power, Hz.
    pub fn max_frequency(&self) -> f64 {
        match *self {
            DopplerShape::Bathtub { f_d } | DopplerShape::Flat { f_d } => f_d,
            DopplerShape::Gaussian { center, std } => center.abs() + 5.0 * std,
        }
    }

    /// Power of the spectrum inside [a, b], a <= b.
    fn band_power(&self, a: f64, b: f64) -> f64 {
        match *self {
            DopplerShape::Bathtub { f_d } => {
                let x0 = (a / f_d).clamp(-1.0, 1.0);
                let x1 = (b / f_d).clamp(-1.0, 1.0);
                (x1.asin() - x0.asin()) / PI
            }
            DopplerShape::Flat { f_d } => ((b.min(f_d) - a.max(-f_d)).max(0.0)) / (2.0 * f_d),
            DopplerShape::Gaussian { .. } => doppler_spectrum_eval(self, 0.5 * (a + b)) * (b - a),
        }
    }
}

/// Spectral density at `nu` (Hz⁻¹); each shape integrates to one.
pub fn doppler_spectrum_eval(shape: &DopplerShape, nu: f64) -> f64 {
    match *shape {
        DopplerShape::Bathtub { f_d } => {
            let x = nu / f_d;
            if x.abs() >= 1.0 {
                0.0
            } else {
                1.0 / (PI * f_d * (1.0 - x * x).sqrt())
            }
        }
        DopplerShape::Flat { f_d } => {
            if nu.abs() < f_d {
                1.0 / (2.0 * f_d)
            } else {
                0.0
            }
        }
        DopplerShape::Gaussian { center, std } => {
            let z = (nu - center) / std;
            (-0.5 * z * z).exp() / (std * (2.0 * PI).sqrt())
        }
    }
}

/// Unit-power complex Gaussian process with the given Doppler spectrum.
///
/// White Gaussian noise is shaped in the frequency domain: every FFT bin
/// gets the spectrum's power inside that bin, so the result is periodic
/// with period `duration`.
pub fn fading_process<R: Rng + ?Sized>(
    shape: &DopplerShape,
    duration: f64,
    sample_rate: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    shape.validate()?;
    let f_max = shape.max_frequency();
    if !(sample_rate > 4.0 * f_max) {
        return Err(Error::invalid(format!(
            "sample rate {sample_rate} Hz must exceed 4 x {f_max} Hz"
        )));
    }
    if !(duration > 0.0) {
        return Err(Error::invalid("fading duration must be > 0"));
    }
    let n = (duration * sample_rate).round().max(1.0) as usize;
    let df = sample_rate / n as f64;
    let freq = |k: usize| {
        if k <= n / 2 {
            k as f64 * df
        } else {
            (k as f64 - n as f64) * df
        }
    };
    let mut weights: Vec<f64> = (0..n)
        .map(|k| {
            let f = freq(k);
            shape.band_power(f - 0.5 * df, f + 0.5 * df).max(0.0)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("Doppler spectrum has no power on the frequency grid"));
    }
    for w in &mut weights {
        *w /= total;
    }
    let mut buf: Vec<Complex64> = weights
        .iter()
        .map(|&w| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * (0.5 * w).sqrt()
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    /// Integral of the density over its support by substitution ν = f_d sin u
    /// for the bathtub, plain midpoint rule otherwise.
    fn integral(shape: &DopplerShape) -> f64 {
        let n = 200_000;
        match *shape {
            DopplerShape::Bathtub { f_d } => {
                let h = PI / n as f64;
                (0..n)
                    .map(|i| {
                        let u = -PI / 2.0 + (i as f64 + 0.5) * h;
                        doppler_spectrum_eval(shape, f_d * u.sin()) * f_d * u.cos() * h
                    })
                    .sum()
            }
            _ => {
                let (lo, hi) = (-200.0, 200.0);
                let h = (hi - lo) / n as f64;
                (0..n)
                    .map(|i| doppler_spectrum_eval(shape, lo + (i as f64 + 0.5) * h) * h)
                    .sum()
            }
        }
    }

    #[test]
    fn spectra_normalized() {
        for s in [
            DopplerShape::Bathtub { f_d: 37.0 },
            DopplerShape::Flat { f_d: 12.0 },
            DopplerShape::Gaussian { center: -5.0, std: 9.0 },
        ] {
            assert_abs_diff_eq!(integral(&s), 1.0, epsilon = 1e-6);
        }
        let flat = DopplerShape::Flat { f_d: 25.0 };
        assert_eq!(doppler_spectrum_eval(&flat, 3.0), 1.0 / 50.0);
        assert_eq!(doppler_spectrum_eval(&flat, 30.0), 0.0);
        let b = DopplerShape::Bathtub { f_d: 10.0 };
        let min = doppler_spectrum_eval(&b, 0.0);
        assert!((1..1000).all(|i| doppler_spectrum_eval(&b, -10.0 + 0.02 * i as f64) >= min));
        assert_eq!(doppler_spectrum_eval(&b, 10.0), 0.0);
    }

    #[test]
    fn unit_power_and_sampling_check() {
        let shape = DopplerShape::Bathtub { f_d: 50.0 };
        let mut rng = stream(1, 0);
        let mut acc = 0.0;
        let mut count = 0usize;
        while count < 1_000_000 {
            let x = fading_process(&shape, 10.0, 1000.0, &mut rng).unwrap();
            acc += x.iter().map(|v| v.norm_sqr()).sum::<f64>();
            count += x.len();
        }
        assert!((acc / count as f64 - 1.0).abs() < 0.01);
        assert!(fading_process(&shape, 1.0, 200.0, &mut rng).is_err());
        assert!(fading_process(&DopplerShape::Bathtub { f_d: 0.0 }, 1.0, 200.0, &mut rng).is_err());
    }

    #[test]
    fn quasi_static_limit() {
        let shape = DopplerShape::Bathtub { f_d: 1e-3 };
        let x = fading_process(&shape, 1.0, 100.0, &mut stream(2, 0)).unwrap();
        let p = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - x[0]).norm_sqr()).sum::<f64>() / x.len() as f64;
        assert!(var / p < 1e-6);
    }
}
