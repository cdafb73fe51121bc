//! Full-window spectrum and its banded moments: centroid, spread, skewness.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::stft::forward_fft;
use super::FeatureError;

/// One-sided magnitude spectrum with its frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<F> {
    /// Bin center frequencies in Hz, `f_k = k * fs / n`.
    pub freqs: Vec<F>,
    /// Magnitude per bin.
    pub mags: Vec<F>,
}

impl<F: Scalar> Spectrum<F> {
    pub fn len(&self) -> usize {
        self.mags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mags.is_empty()
    }
}

/// Inclusive bin range `[lo, hi]` over which spectral moments are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub lo: usize,
    pub hi: usize,
}

impl Band {
    /// Default analysis band: every bin except DC, up to Nyquist. The
    /// accelerometer reports the static acceleration of gravity, which
    /// would otherwise dominate the centroid.
    pub fn excluding_dc(spectrum_len: usize) -> Self {
        Band { lo: 1, hi: spectrum_len.saturating_sub(1) }
    }

    fn validate(&self, spectrum_len: usize) -> Result<(), FeatureError> {
        if self.lo > self.hi || self.hi >= spectrum_len {
            return Err(FeatureError::InvalidParams(format!(
                "band [{}, {}] out of range for {spectrum_len}-bin spectrum",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// One-sided magnitude spectrum of the whole series (rectangular window).
pub fn periodogram<F: Scalar>(series: &[F], sample_rate_hz: f64) -> Result<Spectrum<F>, FeatureError> {
    if series.len() < 2 {
        return Err(FeatureError::SeriesTooShort { needed: 2, got: series.len() });
    }
    let n = series.len();
    let bins = n / 2 + 1;
    let fft = forward_fft(n);
    let mut buf: Vec<num_complex::Complex<f64>> =
        series.iter().map(|&v| num_complex::Complex::new(v.as_f64(), 0.0)).collect();
    fft.process(&mut buf);
    let freqs = (0..bins).map(|k| F::of(k as f64 * sample_rate_hz / n as f64)).collect();
    let mags = buf[..bins].iter().map(|c| F::of(c.norm())).collect();
    Ok(Spectrum { freqs, mags })
}

fn band_mass<F: Scalar>(spectrum: &Spectrum<F>, band: Band) -> Result<F, FeatureError> {
    band.validate(spectrum.len())?;
    let total: F = spectrum.mags[band.lo..=band.hi].iter().copied().sum();
    if total <= F::zero() {
        return Err(FeatureError::ZeroSpectrum);
    }
    Ok(total)
}

/// Magnitude-weighted mean frequency over the band, in Hz.
pub fn spectral_centroid<F: Scalar>(spectrum: &Spectrum<F>, band: Band) -> Result<F, FeatureError> {
    let total = band_mass(spectrum, band)?;
    let mut weighted = F::zero();
    for k in band.lo..=band.hi {
        weighted += spectrum.freqs[k] * spectrum.mags[k];
    }
    Ok(weighted / total)
}

/// Magnitude-weighted standard deviation of frequency about `centroid`, in Hz.
pub fn spectral_spread<F: Scalar>(
    spectrum: &Spectrum<F>,
    band: Band,
    centroid: F,
) -> Result<F, FeatureError> {
    let total = band_mass(spectrum, band)?;
    let mut second = F::zero();
    for k in band.lo..=band.hi {
        let d = spectrum.freqs[k] - centroid;
        second += d * d * spectrum.mags[k];
    }
    Ok((second / total).sqrt())
}

/// Third standardized spectral moment: asymmetry of the spectrum about its
/// centroid. Undefined when the spread is zero (single spectral line).
pub fn spectral_skewness<F: Scalar>(spectrum: &Spectrum<F>, band: Band) -> Result<F, FeatureError> {
    let total = band_mass(spectrum, band)?;
    let mu1 = spectral_centroid(spectrum, band)?;
    let mu2 = spectral_spread(spectrum, band, mu1)?;
    if mu2 <= F::zero() {
        return Err(FeatureError::DegenerateSpectrum);
    }
    let mut third = F::zero();
    for k in band.lo..=band.hi {
        let d = spectrum.freqs[k] - mu1;
        third += d * d * d * spectrum.mags[k];
    }
    Ok(third / (mu2 * mu2 * mu2 * total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_spectrum(len: usize, at: usize, value: f64) -> Spectrum<f64> {
        let freqs = (0..len).map(|k| k as f64 * 10.0).collect();
        let mut mags = vec![0.0; len];
        mags[at] = value;
        Spectrum { freqs, mags }
    }

    #[test]
    fn centroid_of_single_line_is_its_frequency() {
        let s = line_spectrum(41, 10, 3.0); // 100 Hz
        let band = Band::excluding_dc(s.len());
        assert_eq!(spectral_centroid(&s, band).unwrap(), 100.0);
        assert_eq!(spectral_spread(&s, band, 100.0).unwrap(), 0.0);
        assert!(matches!(spectral_skewness(&s, band), Err(FeatureError::DegenerateSpectrum)));
    }

    #[test]
    fn centroid_of_flat_spectrum_is_band_midpoint() {
        let freqs: Vec<f64> = (0..21).map(|k| k as f64 * 5.0).collect();
        let s = Spectrum { freqs, mags: vec![1.0; 21] };
        let band = Band { lo: 1, hi: 20 };
        let mean_f = (1..=20).map(|k| k as f64 * 5.0).sum::<f64>() / 20.0;
        assert!((spectral_centroid(&s, band).unwrap() - mean_f).abs() < 1e-12);
    }

    #[test]
    fn spread_of_two_equal_lines() {
        let freqs: Vec<f64> = (0..41).map(|k| k as f64).collect();
        let mut mags = vec![0.0; 41];
        mags[15] = 2.0;
        mags[25] = 2.0;
        let s = Spectrum { freqs, mags };
        let band = Band::excluding_dc(41);
        let mu1 = spectral_centroid(&s, band).unwrap();
        assert!((mu1 - 20.0).abs() < 1e-12);
        assert!((spectral_spread(&s, band, mu1).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_band_is_an_error() {
        let s = line_spectrum(11, 0, 1.0); // only DC is nonzero
        let band = Band::excluding_dc(s.len());
        assert!(matches!(spectral_centroid(&s, band), Err(FeatureError::ZeroSpectrum)));
    }

    #[test]
    fn periodogram_locates_a_sinusoid() {
        // 50 Hz sinusoid sampled at 800 Hz over 800 samples: bin 50 exactly.
        let series: Vec<f64> = (0..800)
            .map(|n| (2.0 * std::f64::consts::PI * 50.0 * n as f64 / 800.0).sin())
            .collect();
        let s = periodogram(&series, 800.0).unwrap();
        assert_eq!(s.len(), 401);
        let argmax = s
            .mags
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmax, 50);
        assert_eq!(s.freqs[argmax], 50.0);
    }
}
