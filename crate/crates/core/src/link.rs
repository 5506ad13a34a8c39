//! Point-to-point link: free-space budget and a baseband antipodal loopback.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::geometry::{rayleigh_distance, wavelength};

/// Bits per independently seeded noise block.
const BLOCK_BITS: usize = 1 << 16;

/// Free-space path loss `20·log10(4πd/λ)` in dB.
pub fn fspl(distance_m: f64, wavelength_m: f64) -> Result<f64> {
    if !(distance_m > 0.0) || !(wavelength_m > 0.0) {
        return Err(domain(format!(
            "path loss needs positive distance and wavelength, got d={distance_m}, λ={wavelength_m}"
        )));
    }
    Ok(20.0 * (4.0 * PI * distance_m / wavelength_m).log10())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub distance_m: f64,
    pub frequency_hz: f64,
    pub noise_power_dbm: f64,
    /// Largest dimension of the transmitting aperture, for the far-field
    /// check. `None` skips the check.
    pub aperture_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub distance_m: f64,
    pub wavelength_m: f64,
    pub fspl_db: f64,
    pub rx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub snr_db: f64,
    pub rayleigh_distance_m: Option<f64>,
    /// Set when the receiver sits inside the Rayleigh distance.
    pub far_field_warning: bool,
}

pub fn link_budget(params: &LinkParams) -> Result<LinkBudget> {
    if !(params.distance_m > 0.0) {
        return Err(domain(format!(
            "distance must be positive, got {}",
            params.distance_m
        )));
    }
    let wavelength_m = wavelength(params.frequency_hz)?;
    let fspl_db = fspl(params.distance_m, wavelength_m)?;
    let rx_power_dbm = params.tx_power_dbm + params.tx_gain_dbi + params.rx_gain_dbi - fspl_db;
    let rayleigh_distance_m = params
        .aperture_m
        .map(|d| rayleigh_distance(d, wavelength_m))
        .transpose()?;
    Ok(LinkBudget {
        tx_power_dbm: params.tx_power_dbm,
        tx_gain_dbi: params.tx_gain_dbi,
        rx_gain_dbi: params.rx_gain_dbi,
        distance_m: params.distance_m,
        wavelength_m,
        fspl_db,
        rx_power_dbm,
        noise_power_dbm: params.noise_power_dbm,
        snr_db: rx_power_dbm - params.noise_power_dbm,
        rayleigh_distance_m,
        far_field_warning: rayleigh_distance_m.is_some_and(|r| params.distance_m < r),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamResult {
    pub sent_bits: Vec<u8>,
    pub received_bits: Vec<u8>,
    pub bit_error_rate: f64,
    pub snr_db_used: f64,
    pub seed: u64,
}

impl StreamResult {
    pub fn errors(&self) -> usize {
        self.sent_bits
            .iter()
            .zip(&self.received_bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// `[1, 0, 0, …]` of the given length.
pub fn impulse_stream(len: usize) -> Vec<u8> {
    let mut bits = vec![0u8; len];
    if let Some(b) = bits.first_mut() {
        *b = 1;
    }
    bits
}

/// Parse an ASCII `0`/`1` string.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(domain(format!(
                "bit string may only contain 0 and 1, found '{other}'"
            ))),
        })
        .collect()
}

/// Uniform random bits from a seeded generator.
pub fn random_bits(count: usize, seed: u64) -> Vec<u8> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(0..=1u8)).collect()
}

/// Antipodal transmission over AWGN with hard decisions. `snr_db` is
/// Eb/N0; `f64::INFINITY` disables the noise.
pub fn simulate_stream(bits: &[u8], snr_db: f64, seed: u64) -> Result<StreamResult> {
    if bits.is_empty() {
        return Err(domain("bit stream is empty"));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(domain(format!("bit values must be 0 or 1, found {b}")));
    }
    if snr_db.is_nan() {
        return Err(domain("SNR is NaN"));
    }
    // Eb = 1, so the per-dimension noise deviation is sqrt(N0/2).
    let sigma = if snr_db == f64::INFINITY {
        0.0
    } else {
        (0.5 / 10f64.powf(snr_db / 10.0)).sqrt()
    };

    let received_bits: Vec<u8> = bits
        .par_chunks(BLOCK_BITS)
        .enumerate()
        .flat_map_iter(|(block, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            chunk.iter().map(move |&b| {
                let symbol = if b == 1 { 1.0 } else { -1.0 };
                let noise: f64 = StandardNormal.sample(&mut rng);
                let y = symbol + sigma * noise;
                u8::from(y >= 0.0)
            })
        })
        .collect();

    let errors = bits
        .iter()
        .zip(&received_bits)
        .filter(|(a, b)| a != b)
        .count();
    Ok(StreamResult {
        sent_bits: bits.to_vec(),
        bit_error_rate: errors as f64 / bits.len() as f64,
        received_bits,
        snr_db_used: snr_db,
        seed,
    })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fspl_doubling(d in 1e-3f64..1e4, lam in 1e-3f64..10.0) {
            let step = fspl(2.0 * d, lam).unwrap() - fspl(d, lam).unwrap();
            prop_assert!((step - 20.0 * 2f64.log10()).abs() < 1e-9);
        }

        #[test]
        fn budget_identities(
            tx in -30f64..30.0, gt in -10f64..30.0, gr in -10f64..30.0,
            d in 0.1f64..1e3, f in 1e8f64..1e11, noise in -120f64..-20.0
        ) {
            let b = link_budget(&LinkParams {
                tx_power_dbm: tx, tx_gain_dbi: gt, rx_gain_dbi: gr, distance_m: d,
                frequency_hz: f, noise_power_dbm: noise, aperture_m: None,
            }).unwrap();
            prop_assert_eq!(b.rx_power_dbm, b.tx_power_dbm + b.tx_gain_dbi + b.rx_gain_dbi - b.fspl_db);
            prop_assert_eq!(b.snr_db, b.rx_power_dbm - b.noise_power_dbm);
        }

        #[test]
        fn ber_non_increasing_in_snr(seed in 0u64..1000) {
            let bits = random_bits(20_000, seed);
            let mut last = 1.0;
            for snr in [-4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0] {
                let ber = simulate_stream(&bits, snr, seed).unwrap().bit_error_rate;
                prop_assert!(ber <= last, "BER rose at {} dB: {} > {}", snr, ber, last);
                last = ber;
            }
        }
    }
}
