//! Property bodies shared by the proptest suites and the acceptance runner.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rhs_core::farfield::{
    beam_metrics, directivity, hemisphere_pattern, radiated_field, radiated_power, EvalOptions,
};
use rhs_core::holography::{pattern_multi_feed, pattern_single_feed, quantize_pattern};
use rhs_core::{Direction, HolographicPattern, PatternCut, PinState, RhsConfig};
use std::f64::consts::PI;

use super::{
    naive_field, naive_hemisphere_power, naive_hologram, surface, surface_of, surface_with_amps,
    with_amps,
};

pub type Check = Result<(), TestCaseError>;

pub fn amplitude_range(cfg: &RhsConfig, (t, p): (f64, f64)) -> Check {
    let grid = cfg.grid().unwrap();
    let dir = Direction::new(t, p).unwrap();
    for a in pattern_multi_feed(cfg, &grid, dir).unwrap().amplitudes() {
        prop_assert!((0.0..=1.0).contains(a), "{}", a);
    }
    for k in 0..cfg.feeds.len() {
        for a in pattern_single_feed(cfg, &grid, k, dir)
            .unwrap()
            .amplitudes()
        {
            prop_assert!((0.0..=1.0).contains(a), "{}", a);
        }
    }
    Ok(())
}

/// With the feed list cut to one, the averaged pattern is the single-feed
/// pattern and both match the direct interferogram.
pub fn single_feed_reduction(cfg: &RhsConfig, (t, p): (f64, f64)) -> Check {
    let mut one = cfg.clone();
    one.feeds.truncate(1);
    let grid = one.grid().unwrap();
    let dir = Direction::new(t, p).unwrap();
    let multi = pattern_multi_feed(&one, &grid, dir).unwrap();
    let single = pattern_single_feed(&one, &grid, 0, dir).unwrap();
    let oracle = naive_hologram(&one, t, p);
    for ((m, s), o) in multi
        .amplitudes()
        .iter()
        .zip(single.amplitudes())
        .zip(&oracle)
    {
        prop_assert!((m - s).abs() <= 1e-15);
        prop_assert!((m - o).abs() <= 1e-9, "{} vs {}", m, o);
    }
    Ok(())
}

pub fn quantization_monotone(amps: &[f64], t1: f64, t2: f64) -> Check {
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let p = HolographicPattern::new(amps.to_vec()).unwrap();
    let a = quantize_pattern(&p, lo).unwrap();
    let b = quantize_pattern(&p, hi).unwrap();
    for (n, (sa, sb)) in a.states().iter().zip(b.states()).enumerate() {
        // Raising the threshold can only switch more diodes ON.
        prop_assert!(
            !(*sa == PinState::On && *sb == PinState::Off),
            "element {}",
            n
        );
        let expect = if amps[n] < lo {
            PinState::On
        } else {
            PinState::Off
        };
        prop_assert_eq!(*sa, expect);
    }
    prop_assert!(a.count_on() <= b.count_on());
    Ok(())
}

/// Mean directivity over the sphere is one: the library's trapezoidal total
/// power against an independent midpoint rule on the direct sum.
pub fn directivity_normalization(cfg: &RhsConfig, amps: &[f64]) -> Check {
    let grid = cfg.grid().unwrap();
    let pat = HolographicPattern::new(amps.to_vec()).unwrap();
    let far = hemisphere_pattern(cfg, &grid, &pat, &EvalOptions::default()).unwrap();
    let total = radiated_power(&far).unwrap();
    let mut oracle = naive_hemisphere_power(cfg, amps, 90, 180);
    if !cfg.ground_plane {
        oracle *= 2.0;
    }
    let mean_d = oracle / total;
    prop_assert!((mean_d - 1.0).abs() < 0.01, "mean directivity {}", mean_d);
    let d = directivity(&far, Direction::broadside()).unwrap();
    let want = 10.0 * (4.0 * PI * naive_field(cfg, amps, 0.0, 0.0).norm_sqr() / total).log10();
    prop_assert!(
        (d - want).abs() < 1e-9 || want < -200.0,
        "{} vs {}",
        d,
        want
    );
    Ok(())
}

pub fn scaling_invariance(cfg: &RhsConfig, amps: &[f64], c: f64) -> Check {
    let grid = cfg.grid().unwrap();
    let opts = EvalOptions::default();
    let base = HolographicPattern::new(amps.to_vec()).unwrap();
    let scaled = HolographicPattern::new(amps.iter().map(|a| a * c).collect()).unwrap();
    let a = hemisphere_pattern(cfg, &grid, &base, &opts)
        .and_then(|f| beam_metrics(&f, PatternCut::Horizontal));
    let b = hemisphere_pattern(cfg, &grid, &scaled, &opts)
        .and_then(|f| beam_metrics(&f, PatternCut::Horizontal));
    match (a, b) {
        (Ok(a), Ok(b)) => {
            prop_assert_eq!(a.main_lobe, b.main_lobe);
            prop_assert!((a.peak_directivity_dbi - b.peak_directivity_dbi).abs() <= 1e-9);
            prop_assert!((a.hpbw_deg - b.hpbw_deg).abs() <= 1e-9);
            prop_assert_eq!(a.sidelobe_direction, b.sidelobe_direction);
            if a.peak_sidelobe_level_db.is_finite() {
                prop_assert!((a.peak_sidelobe_level_db - b.peak_sidelobe_level_db).abs() <= 1e-9);
            } else {
                prop_assert_eq!(a.peak_sidelobe_level_db, b.peak_sidelobe_level_db);
            }
        }
        (Err(_), Err(_)) => {}
        (a, b) => prop_assert!(false, "scaling changed the outcome: {:?} vs {:?}", a, b),
    }
    Ok(())
}

pub fn field_oracle(cfg: &RhsConfig, amps: &[f64], (t, p): (f64, f64)) -> Check {
    let grid = cfg.grid().unwrap();
    let pat = HolographicPattern::new(amps.to_vec()).unwrap();
    let got = radiated_field(cfg, &grid, &pat, Direction::new(t, p).unwrap()).unwrap();
    let want = naive_field(cfg, amps, t, p);
    let scale = want.norm().max(1.0);
    prop_assert!((got - want).norm() <= 1e-9 * scale, "{} vs {}", got, want);
    Ok(())
}

pub fn range_inputs() -> impl Strategy<Value = (RhsConfig, (f64, f64))> {
    (surface(4, 6), super::direction())
}

pub fn reduction_inputs() -> impl Strategy<Value = (RhsConfig, (f64, f64))> {
    (surface(3, 6), super::direction())
}

pub fn quantization_inputs() -> impl Strategy<Value = (Vec<f64>, f64, f64)> {
    (
        prop::collection::vec(0.0f64..=1.0, 1..64),
        0.0f64..=1.0,
        0.0f64..=1.0,
    )
}

pub fn normalization_inputs() -> impl Strategy<Value = (RhsConfig, Vec<f64>)> {
    surface_with_amps(2, 3)
}

pub fn scaling_inputs() -> impl Strategy<Value = ((RhsConfig, Vec<f64>), f64)> {
    (surface_with_amps(1, 8), 0.01f64..1.0)
}

/// Ten-element surfaces in every row/column split.
pub fn oracle_inputs() -> impl Strategy<Value = ((RhsConfig, Vec<f64>), (f64, f64))> {
    (
        with_amps(surface_of(prop_oneof![
            Just((1, 10)),
            Just((2, 5)),
            Just((5, 2)),
            Just((10, 1))
        ])),
        super::direction(),
    )
}
