//! Poisson-distributed point obstacles on the unit interval.
//!
//! Obstacle positions are generated by summing independent exponential gaps
//! with mean 1/nu until the running sum leaves [0,1]; the boundary gaps
//! [0, z_1] and [z_m, 1] count as ordinary intervals (the endpoints already
//! carry Dirichlet conditions). The draw is a pure function of (nu, seed):
//! ChaCha12 keyed by the seed, gaps via the inverse transform -ln(1-u)/nu.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Obstacles closer than this are merged into one site carrying summed
/// multiplicity (a double delta of strength 2*sigma at finite sigma; identical
/// at the hard wall). Avoids degenerate zero-length intervals downstream.
pub const MERGE_DISTANCE: f64 = 1e-9;

/// One Poisson realization of the obstacle configuration.
///
/// `positions` are the distinct obstacle sites, strictly increasing, in (0,1);
/// `multiplicities[i]` is how many raw draws merged into site i (almost always
/// 1). `lengths` are the gaps between consecutive sites including both
/// boundary gaps, so `lengths.len() == positions.len() + 1` and the lengths
/// sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSample {
    pub seed: u64,
    pub nu: f64,
    pub positions: Vec<f64>,
    pub multiplicities: Vec<u32>,
    pub lengths: Vec<f64>,
}

impl DisorderSample {
    /// Number of obstacle sites.
    pub fn m_omega(&self) -> usize {
        self.positions.len()
    }

    /// Total delta count including merged multiplicities; the potential
    /// integral is sigma times this.
    pub fn total_weight(&self) -> u64 {
        self.multiplicities.iter().map(|&m| m as u64).sum()
    }

    /// Build from explicit raw positions (unsorted ok, duplicates merged).
    /// `nu` is recorded as metadata and may be 0 for a hand-built sample.
    pub fn from_positions(nu: f64, seed: u64, raw: &[f64]) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::domain(format!("nu must be >= 0 and finite, got {nu}")));
        }
        let mut sorted: Vec<f64> = Vec::with_capacity(raw.len());
        for &z in raw {
            if !z.is_finite() {
                return Err(Error::domain(format!("obstacle position must be finite, got {z}")));
            }
            // Positions outside the open interval carry no weight: the wave
            // function already vanishes at the endpoints.
            if z > 0.0 && z < 1.0 {
                sorted.push(z);
            }
        }
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut positions: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut multiplicities: Vec<u32> = Vec::with_capacity(sorted.len());
        for z in sorted {
            match positions.last() {
                Some(&prev) if z - prev < MERGE_DISTANCE => {
                    *multiplicities.last_mut().unwrap() += 1;
                }
                _ => {
                    positions.push(z);
                    multiplicities.push(1);
                }
            }
        }

        let mut lengths = Vec::with_capacity(positions.len() + 1);
        let mut prev = 0.0;
        for &z in &positions {
            lengths.push(z - prev);
            prev = z;
        }
        lengths.push(1.0 - prev);

        Ok(DisorderSample { seed, nu, positions, multiplicities, lengths })
    }

    /// Index and length of the maximal gap; ties broken by smallest index.
    pub fn largest_interval(&self) -> (usize, f64) {
        let mut best = 0;
        for (i, &l) in self.lengths.iter().enumerate() {
            if l > self.lengths[best] {
                best = i;
            }
        }
        (best, self.lengths[best])
    }

    /// Endpoints (a, b) of gap `i`.
    pub fn gap_bounds(&self, i: usize) -> (f64, f64) {
        let a = if i == 0 { 0.0 } else { self.positions[i - 1] };
        let b = if i == self.positions.len() { 1.0 } else { self.positions[i] };
        (a, b)
    }
}

/// JSON form: lengths and multiplicities are derived, not stored; merged
/// sites serialize as repeated positions so the round trip is lossless.
#[derive(Serialize, Deserialize)]
struct SampleJson {
    seed: u64,
    nu: f64,
    positions: Vec<f64>,
}

impl Serialize for DisorderSample {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut flat = Vec::with_capacity(self.positions.len());
        for (&z, &m) in self.positions.iter().zip(&self.multiplicities) {
            for _ in 0..m {
                flat.push(z);
            }
        }
        SampleJson { seed: self.seed, nu: self.nu, positions: flat }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DisorderSample {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = SampleJson::deserialize(de)?;
        DisorderSample::from_positions(raw.nu, raw.seed, &raw.positions)
            .map_err(serde::de::Error::custom)
    }
}

/// Sample a Poisson point process of intensity `nu` on (0,1).
pub fn sample_poisson(nu: f64, seed: u64) -> Result<DisorderSample> {
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::domain(format!("nu must be > 0 and finite, got {nu}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut raw = Vec::new();
    let mut z = 0.0;
    loop {
        let u: f64 = rng.random();
        z += -(-u).ln_1p() / nu; // -ln(1-u)/nu, exact exponential inverse transform
        if z >= 1.0 {
            break;
        }
        raw.push(z);
    }
    DisorderSample::from_positions(nu, seed, &raw)
}

/// Empirical summary over a set of samples with common nu.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalStatistics {
    pub n_samples: usize,
    pub nu: f64,
    /// Mean and std over samples of the per-sample mean gap 1/(m+1).
    pub mean_gap: f64,
    pub std_gap: f64,
    /// Mean and std of m_omega / nu.
    pub mean_m_over_nu: f64,
    pub std_m_over_nu: f64,
    /// Mean and std of the largest-gap length.
    pub mean_ell_max: f64,
    pub std_ell_max: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Means and (population) standard deviations of gap observables; a single
/// sample reports zero spread.
pub fn interval_statistics(samples: &[DisorderSample]) -> Result<IntervalStatistics> {
    let first = samples
        .first()
        .ok_or_else(|| Error::usage("interval_statistics needs a nonempty sample list"))?;
    let nu = first.nu;
    if samples.iter().any(|s| s.nu != nu) {
        return Err(Error::usage("interval_statistics requires a common nu"));
    }
    let gaps: Vec<f64> = samples.iter().map(|s| 1.0 / (s.m_omega() as f64 + 1.0)).collect();
    let ms: Vec<f64> = samples.iter().map(|s| s.m_omega() as f64 / nu).collect();
    let maxes: Vec<f64> = samples.iter().map(|s| s.largest_interval().1).collect();
    let (mean_gap, std_gap) = mean_std(&gaps);
    let (mean_m_over_nu, std_m_over_nu) = mean_std(&ms);
    let (mean_ell_max, std_ell_max) = mean_std(&maxes);
    Ok(IntervalStatistics {
        n_samples: samples.len(),
        nu,
        mean_gap,
        std_gap,
        mean_m_over_nu,
        std_m_over_nu,
        mean_ell_max,
        std_ell_max,
    })
}
