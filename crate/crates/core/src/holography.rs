//! Amplitude-only holographic pattern synthesis.
//!
//! Each element records the real part of the interference between the
//! desired object wave and the guided reference wave from every feed,
//! normalized to [0, 1]. The resulting amplitudes are then thresholded to
//! binary PIN-diode states.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::geometry::{Direction, ElementGrid, FeedPosition, Point2, RhsConfig};

/// Radiation amplitude per element, index-aligned with [`ElementGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct HolographicPattern {
    amplitudes: Vec<f64>,
}

impl HolographicPattern {
    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if let Some((i, a)) = amplitudes
            .iter()
            .enumerate()
            .find(|(_, a)| !(0.0..=1.0).contains(*a))
        {
            return Err(domain(format!(
                "amplitude {a} at element {i} outside [0, 1]"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.amplitudes
    }
}

/// Diode state of one element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PinState {
    /// Diodes conducting: the element is detuned and barely radiates.
    On,
    /// Diodes open: the element radiates.
    Off,
}

impl PinState {
    pub fn as_str(self) -> &'static str {
        match self {
            PinState::On => "ON",
            PinState::Off => "OFF",
        }
    }
}

impl std::str::FromStr for PinState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ON" | "on" => Ok(PinState::On),
            "OFF" | "off" => Ok(PinState::Off),
            other => Err(domain(format!("unknown pin state '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinStateMap {
    states: Vec<PinState>,
    threshold_used: f64,
}

impl PinStateMap {
    pub fn new(states: Vec<PinState>, threshold_used: f64) -> Result<Self> {
        check_threshold(threshold_used)?;
        Ok(Self {
            states,
            threshold_used,
        })
    }

    pub fn states(&self) -> &[PinState] {
        &self.states
    }

    pub fn threshold_used(&self) -> f64 {
        self.threshold_used
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn count_on(&self) -> usize {
        self.states.iter().filter(|s| **s == PinState::On).count()
    }
}

/// Reference-wave phase `k_s·|r_n^k|` at an element, unwrapped.
pub fn reference_phase(
    feed: FeedPosition,
    element_position: Point2,
    surface_index: f64,
    wavelength_m: f64,
) -> f64 {
    debug_assert!(wavelength_m > 0.0 && surface_index >= 1.0);
    2.0 * PI * surface_index / wavelength_m * feed.0.distance(element_position)
}

/// Object-wave phase: the in-plane free-space wavevector dotted with the
/// element position.
pub fn object_phase(element_position: Point2, direction: Direction, wavelength_m: f64) -> f64 {
    debug_assert!(wavelength_m > 0.0);
    let (ux, uy) = direction.in_plane();
    2.0 * PI / wavelength_m * (element_position.x * ux + element_position.y * uy)
}

/// Wrap a phase into [0, 2π).
pub fn wrap_phase(phase: f64) -> f64 {
    phase.rem_euclid(2.0 * PI)
}

/// Normalized interferogram `(Re[Ψ_obj Ψ_ref*] + 1) / 2` for one feed.
#[inline]
fn interference_amplitude(
    feed: FeedPosition,
    pos: Point2,
    direction: Direction,
    config: &RhsConfig,
    lam: f64,
) -> f64 {
    let delta =
        object_phase(pos, direction, lam) - reference_phase(feed, pos, config.surface_index, lam);
    (delta.cos() + 1.0) / 2.0
}

fn check_grid(config: &RhsConfig, grid: &ElementGrid) -> Result<()> {
    config.validate()?;
    if grid.len() != config.element_count() {
        return Err(domain(format!(
            "grid has {} elements but config describes {}",
            grid.len(),
            config.element_count()
        )));
    }
    Ok(())
}

/// Holographic pattern produced by a single feed.
pub fn pattern_single_feed(
    config: &RhsConfig,
    grid: &ElementGrid,
    feed_index: usize,
    direction: Direction,
) -> Result<HolographicPattern> {
    check_grid(config, grid)?;
    let feed = *config.feeds.get(feed_index).ok_or(Error::FeedIndex {
        index: feed_index,
        count: config.feeds.len(),
    })?;
    let lam = config.wavelength();
    let amplitudes = grid
        .positions()
        .iter()
        .map(|&p| interference_amplitude(feed, p, direction, config, lam))
        .collect();
    Ok(HolographicPattern { amplitudes })
}

/// Holographic pattern averaged over every feed of the surface.
pub fn pattern_multi_feed(
    config: &RhsConfig,
    grid: &ElementGrid,
    direction: Direction,
) -> Result<HolographicPattern> {
    if config.feeds.is_empty() {
        return Err(domain("multi-feed synthesis needs at least one feed"));
    }
    check_grid(config, grid)?;
    let lam = config.wavelength();
    let k = config.feeds.len() as f64;
    let amplitudes = grid
        .positions()
        .iter()
        .map(|&p| {
            let sum: f64 = config
                .feeds
                .iter()
                .map(|&f| interference_amplitude(f, p, direction, config, lam))
                .sum();
            (sum / k).clamp(0.0, 1.0)
        })
        .collect();
    Ok(HolographicPattern { amplitudes })
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(domain(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    Ok(())
}

/// Threshold amplitudes into diode states. Amplitudes strictly below the
/// threshold switch the diodes ON; ties stay OFF (radiating).
pub fn quantize_pattern(pattern: &HolographicPattern, threshold: f64) -> Result<PinStateMap> {
    check_threshold(threshold)?;
    let states = pattern
        .amplitudes
        .iter()
        .map(|&a| {
            if a < threshold {
                PinState::On
            } else {
                PinState::Off
            }
        })
        .collect();
    Ok(PinStateMap {
        states,
        threshold_used: threshold,
    })
}

/// Radiation amplitudes realized by a diode map.
pub fn pin_map_to_amplitudes(map: &PinStateMap, config: &RhsConfig) -> Result<HolographicPattern> {
    if map.len() != config.element_count() {
        return Err(domain(format!(
            "pin map has {} states but config describes {} elements",
            map.len(),
            config.element_count()
        )));
    }
    let amplitudes = map
        .states
        .iter()
        .map(|s| match s {
            PinState::Off => config.amp_on,
            PinState::On => config.amp_off,
        })
        .collect();
    HolographicPattern::new(amplitudes)
}

/// Subtract a weighted auxiliary pattern aimed at the sidelobe direction,
/// clamping the result to [0, 1].
pub fn suppress_sidelobe(
    pattern: &HolographicPattern,
    config: &RhsConfig,
    grid: &ElementGrid,
    sidelobe_direction: Direction,
    weight: f64,
) -> Result<HolographicPattern> {
    if !(weight >= 0.0) || !weight.is_finite() {
        return Err(domain(format!(
            "sidelobe weight must be >= 0, got {weight}"
        )));
    }
    if pattern.len() != grid.len() {
        return Err(domain(format!(
            "pattern has {} amplitudes but grid has {} elements",
            pattern.len(),
            grid.len()
        )));
    }
    if weight == 0.0 {
        return Ok(pattern.clone());
    }
    let aux = pattern_multi_feed(config, grid, sidelobe_direction)?;
    let amplitudes = pattern
        .amplitudes
        .iter()
        .zip(&aux.amplitudes)
        .map(|(m, s)| (m - weight * s).clamp(0.0, 1.0))
        .collect();
    Ok(HolographicPattern { amplitudes })
}
