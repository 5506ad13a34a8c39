//! Reference implementations and generators shared by the integration tests.
//! Everything here is written from the textbook formulas and deliberately
//! avoids calling into the library's own field code.
#![allow(dead_code)]

pub mod checks;

use num_complex::Complex64;
use proptest::prelude::*;
use rhs_core::geometry::ElementFactor;
use rhs_core::{FeedPosition, RhsConfig};
use std::f64::consts::PI;

pub const C: f64 = 299_792_458.0;

/// Element coordinates, row-major, element (i, j) at (j·dx, i·dy).
pub fn lattice(cfg: &RhsConfig) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(cfg.rows * cfg.cols);
    for i in 0..cfg.rows {
        for j in 0..cfg.cols {
            out.push((j as f64 * cfg.spacing_x_m, i as f64 * cfg.spacing_y_m));
        }
    }
    out
}

/// Direct double sum over feeds and elements.
pub fn naive_field(cfg: &RhsConfig, amps: &[f64], theta: f64, phi: f64) -> Complex64 {
    let lam = C / cfg.frequency_hz;
    let k0 = 2.0 * PI / lam;
    let ks = 2.0 * PI * cfg.surface_index / lam;
    let u = (theta.sin() * phi.cos(), theta.sin() * phi.sin());
    let mut e = Complex64::new(0.0, 0.0);
    for feed in &cfg.feeds {
        for (&(x, y), &m) in lattice(cfg).iter().zip(amps) {
            let r = ((x - feed.0.x).powi(2) + (y - feed.0.y).powi(2)).sqrt();
            let phase = -ks * r + k0 * (x * u.0 + y * u.1);
            e += m * (-cfg.leakage_alpha * r).exp() * Complex64::new(phase.cos(), phase.sin());
        }
    }
    let ef = match cfg.element_factor {
        ElementFactor::Isotropic => 1.0,
        ElementFactor::Cosine => theta.cos().abs(),
    };
    e * ef / (cfg.feeds.len() as f64).sqrt()
}

/// Interferogram amplitude averaged over feeds, straight from the
/// object/reference phase definitions.
pub fn naive_hologram(cfg: &RhsConfig, theta: f64, phi: f64) -> Vec<f64> {
    let lam = C / cfg.frequency_hz;
    lattice(cfg)
        .iter()
        .map(|&(x, y)| {
            let obj = 2.0 * PI / lam * (x * theta.sin() * phi.cos() + y * theta.sin() * phi.sin());
            let s: f64 = cfg
                .feeds
                .iter()
                .map(|f| {
                    let r = ((x - f.0.x).powi(2) + (y - f.0.y).powi(2)).sqrt();
                    let refp = 2.0 * PI * cfg.surface_index / lam * r;
                    ((obj - refp).cos() + 1.0) / 2.0
                })
                .sum();
            s / cfg.feeds.len() as f64
        })
        .collect()
}

/// Power integral of `naive_field` over the upper hemisphere by the
/// midpoint rule in standard spherical coordinates.
pub fn naive_hemisphere_power(cfg: &RhsConfig, amps: &[f64], n_theta: usize, n_phi: usize) -> f64 {
    let dt = (PI / 2.0) / n_theta as f64;
    let dp = 2.0 * PI / n_phi as f64;
    let mut total = 0.0;
    for a in 0..n_theta {
        let t = (a as f64 + 0.5) * dt;
        let w = t.sin() * dt * dp;
        for b in 0..n_phi {
            let p = (b as f64 + 0.5) * dp - PI;
            total += naive_field(cfg, amps, t, p).norm_sqr() * w;
        }
    }
    total
}

/// Q(x) for the Gaussian tail.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / 2f64.sqrt())
}

/// Random surfaces of up to `max_rows × max_cols` elements with sub-λ
/// pitch, 1–3 feeds inside the aperture and random loss.
pub fn surface(max_rows: usize, max_cols: usize) -> impl Strategy<Value = RhsConfig> {
    surface_of((1..=max_rows, 1..=max_cols))
}

/// Random surfaces whose `(rows, cols)` come from `shape`.
pub fn surface_of(
    shape: impl Strategy<Value = (usize, usize)>,
) -> impl Strategy<Value = RhsConfig> {
    (
        shape,
        8e9f64..14e9,
        0.1f64..0.7,
        0.1f64..0.7,
        1.0f64..2.5,
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..=3),
        prop_oneof![Just(0.0), 0.0f64..30.0],
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(
            |((rows, cols), f, sx, sy, n, feeds, alpha, cosine, ground)| {
                let lam = C / f;
                let (dx, dy) = (sx * lam, sy * lam);
                let feeds = feeds
                    .into_iter()
                    .map(|(u, v)| {
                        FeedPosition::new(u * dx * (cols - 1) as f64, v * dy * (rows - 1) as f64)
                    })
                    .collect();
                let mut cfg = RhsConfig::new(f, rows, cols, dx, dy, feeds).unwrap();
                cfg.surface_index = n;
                cfg.leakage_alpha = alpha;
                cfg.ground_plane = ground;
                if cosine {
                    cfg.element_factor = ElementFactor::Cosine;
                }
                cfg
            },
        )
}

/// A surface together with random amplitudes of matching length, at least
/// one of them clearly non-zero.
pub fn surface_with_amps(
    max_rows: usize,
    max_cols: usize,
) -> impl Strategy<Value = (RhsConfig, Vec<f64>)> {
    with_amps(surface(max_rows, max_cols))
}

pub fn with_amps(
    surfaces: impl Strategy<Value = RhsConfig>,
) -> impl Strategy<Value = (RhsConfig, Vec<f64>)> {
    surfaces.prop_flat_map(|cfg| {
        let n = cfg.element_count();
        (Just(cfg), prop::collection::vec(0.0f64..=1.0, n), 0..n).prop_map(|(cfg, mut amps, k)| {
            amps[k] = amps[k].max(0.5);
            (cfg, amps)
        })
    })
}

/// (θ, φ) in radians over the full visible range.
pub fn direction() -> impl Strategy<Value = (f64, f64)> {
    (-90.0f64..=90.0, -180.0f64..=180.0).prop_map(|(t, p)| (t.to_radians(), p.to_radians()))
}
