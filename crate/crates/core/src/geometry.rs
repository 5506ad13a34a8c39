//! Physical description of a reconfigurable holographic surface.
//!
//! Coordinate convention: the surface lies in the z = 0 plane with broadside
//! along +z. Elevation `theta` is measured from +z, azimuth `phi` from +x in
//! the surface plane. Lengths are meters and angles radians throughout the
//! library; degrees only appear at the file and CLI boundary.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default effective index of the guided reference wave.
pub const DEFAULT_SURFACE_INDEX: f64 = 1.52;

/// Slack allowed on angle range checks so that values produced by degree
/// conversion (e.g. `90f64.to_radians()`) are accepted.
const ANGLE_SLACK: f64 = 1e-12;

/// Free-space wavelength in meters.
pub fn wavelength(frequency_hz: f64) -> Result<f64> {
    if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
        return Err(domain(format!(
            "frequency must be positive, got {frequency_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT / frequency_hz)
}

/// Near/far-field boundary `2 D² / λ`.
pub fn rayleigh_distance(max_dimension_m: f64, wavelength_m: f64) -> Result<f64> {
    if !(max_dimension_m > 0.0) || !(wavelength_m > 0.0) {
        return Err(domain(format!(
            "rayleigh distance needs positive dimension and wavelength, got D={max_dimension_m}, λ={wavelength_m}"
        )));
    }
    Ok(2.0 * max_dimension_m * max_dimension_m / wavelength_m)
}

/// A point in the surface plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Location of a feed launching the reference wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedPosition(pub Point2);

impl FeedPosition {
    pub const fn new(x: f64, y: f64) -> Self {
        Self(Point2::new(x, y))
    }

    pub fn coordinate(&self) -> Point2 {
        self.0
    }
}

/// A far-field direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// `theta` in [-π/2, π/2], `phi` in [-π, π].
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || theta.abs() > FRAC_PI_2 + ANGLE_SLACK {
            return Err(domain(format!("theta {theta} rad outside [-π/2, π/2]")));
        }
        if !phi.is_finite() || phi.abs() > PI + ANGLE_SLACK {
            return Err(domain(format!("phi {phi} rad outside [-π, π]")));
        }
        Ok(Self {
            theta: theta.clamp(-FRAC_PI_2, FRAC_PI_2),
            phi: phi.clamp(-PI, PI),
        })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub const fn broadside() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta.to_degrees()
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi.to_degrees()
    }

    /// Projection of the unit propagation vector onto the surface plane.
    pub fn in_plane(&self) -> (f64, f64) {
        in_plane(self.theta, self.phi)
    }
}

#[inline]
pub(crate) fn in_plane(theta: f64, phi: f64) -> (f64, f64) {
    let s = theta.sin();
    (s * phi.cos(), s * phi.sin())
}

/// Per-element radiation pattern applied on top of the array factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementFactor {
    #[default]
    Isotropic,
    /// `cos θ` amplitude taper.
    Cosine,
}

impl ElementFactor {
    #[inline]
    pub(crate) fn gain(self, theta: f64) -> f64 {
        match self {
            ElementFactor::Isotropic => 1.0,
            ElementFactor::Cosine => theta.cos().abs(),
        }
    }
}

/// Row-major element lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGrid {
    rows: usize,
    cols: usize,
    positions: Vec<Point2>,
}

impl ElementGrid {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    /// `(row, col)` of element `index`.
    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.cols, index % self.cols)
    }
}

/// Lattice with element `(i, j)` at `(j·spacing_x, i·spacing_y)`.
pub fn build_grid(
    rows: usize,
    cols: usize,
    spacing_x_m: f64,
    spacing_y_m: f64,
) -> Result<ElementGrid> {
    if rows == 0 || cols == 0 {
        return Err(domain(format!(
            "grid must have at least one row and column, got {rows}x{cols}"
        )));
    }
    if !(spacing_x_m > 0.0) || !(spacing_y_m > 0.0) {
        return Err(domain(format!(
            "element spacings must be positive, got ({spacing_x_m}, {spacing_y_m})"
        )));
    }
    let positions = (0..rows)
        .flat_map(|i| {
            (0..cols).map(move |j| Point2::new(j as f64 * spacing_x_m, i as f64 * spacing_y_m))
        })
        .collect();
    Ok(ElementGrid {
        rows,
        cols,
        positions,
    })
}

/// Full physical description of one surface.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsConfig {
    pub frequency_hz: f64,
    /// Effective refractive index of the guided reference wave.
    pub surface_index: f64,
    pub rows: usize,
    pub cols: usize,
    pub spacing_x_m: f64,
    pub spacing_y_m: f64,
    pub feeds: Vec<FeedPosition>,
    /// Radiation amplitude of an element whose diodes are OFF (radiating).
    pub amp_on: f64,
    /// Radiation amplitude of an element whose diodes are ON (suppressed).
    pub amp_off: f64,
    /// Reference-wave decay along the surface, Np/m.
    pub leakage_alpha: f64,
    pub element_factor: ElementFactor,
    /// Radiation confined to the upper hemisphere (ground plane present).
    pub ground_plane: bool,
    /// Largest aperture dimension used for the Rayleigh distance. When
    /// unset it is derived from the lattice extent.
    pub max_dimension_m: Option<f64>,
}

impl RhsConfig {
    /// Ideal-amplitude surface with default physics settings.
    pub fn new(
        frequency_hz: f64,
        rows: usize,
        cols: usize,
        spacing_x_m: f64,
        spacing_y_m: f64,
        feeds: Vec<FeedPosition>,
    ) -> Result<Self> {
        let cfg = Self {
            frequency_hz,
            surface_index: DEFAULT_SURFACE_INDEX,
            rows,
            cols,
            spacing_x_m,
            spacing_y_m,
            feeds,
            amp_on: 1.0,
            amp_off: 0.0,
            leakage_alpha: 0.0,
            element_factor: ElementFactor::Isotropic,
            ground_plane: true,
            max_dimension_m: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The 16-element one-dimensional prototype: 0.82 cm pitch at 12 GHz,
    /// fed from the left end, 15.2 cm overall length.
    pub fn prototype_1d() -> Self {
        Self::linear(16)
    }

    /// A one-dimensional surface with the prototype pitch and feed.
    pub fn linear(cols: usize) -> Self {
        let mut cfg = Self::new(
            12e9,
            1,
            cols.max(1),
            0.0082,
            0.0082,
            vec![FeedPosition::new(0.0, 0.0)],
        )
        .expect("static prototype parameters are valid");
        if cols == 16 {
            cfg.max_dimension_m = Some(0.152);
        }
        cfg
    }

    /// 8×8 two-dimensional surface at λ/3 pitch with a corner feed.
    pub fn array_2d_8x8() -> Self {
        let pitch = SPEED_OF_LIGHT / 12e9 / 3.0;
        Self::new(12e9, 8, 8, pitch, pitch, vec![FeedPosition::new(0.0, 0.0)])
            .expect("static 2D parameters are valid")
    }

    /// Switch to the measured non-ideal element efficiencies
    /// (OFF-state 0.35, ON-state 0.15).
    pub fn with_non_ideal_amplitudes(mut self) -> Self {
        self.amp_on = 0.35;
        self.amp_off = 0.15;
        self
    }

    pub fn validate(&self) -> Result<()> {
        wavelength(self.frequency_hz)?;
        if !(self.surface_index >= 1.0) || !self.surface_index.is_finite() {
            return Err(domain(format!(
                "surface_index must be >= 1, got {}",
                self.surface_index
            )));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(domain("rows and cols must be >= 1"));
        }
        if !(self.spacing_x_m > 0.0) || !(self.spacing_y_m > 0.0) {
            return Err(domain("element spacings must be positive"));
        }
        if self.feeds.is_empty() {
            return Err(domain("at least one feed is required"));
        }
        if let Some(f) = self
            .feeds
            .iter()
            .find(|f| !f.0.x.is_finite() || !f.0.y.is_finite())
        {
            return Err(domain(format!(
                "feed coordinate ({}, {}) is not finite",
                f.0.x, f.0.y
            )));
        }
        for (name, v) in [("amp_on", self.amp_on), ("amp_off", self.amp_off)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(domain(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.amp_off > self.amp_on {
            return Err(domain(format!(
                "amp_off ({}) must not exceed amp_on ({})",
                self.amp_off, self.amp_on
            )));
        }
        if !(self.leakage_alpha >= 0.0) || !self.leakage_alpha.is_finite() {
            return Err(domain(format!(
                "leakage_alpha must be >= 0, got {}",
                self.leakage_alpha
            )));
        }
        if let Some(d) = self.max_dimension_m {
            if !(d > 0.0) {
                return Err(domain(format!("max_dimension_m must be positive, got {d}")));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    /// Free-space wavenumber `2π/λ`.
    pub fn free_space_wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    /// Guided-wave propagation constant `2π·n/λ`.
    pub fn guided_wavenumber(&self) -> f64 {
        self.surface_index * self.free_space_wavenumber()
    }

    pub fn element_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn grid(&self) -> Result<ElementGrid> {
        build_grid(self.rows, self.cols, self.spacing_x_m, self.spacing_y_m)
    }

    /// Aperture size: the configured value, or the diagonal of the lattice
    /// footprint (one pitch per element in each direction).
    pub fn max_dimension(&self) -> f64 {
        self.max_dimension_m.unwrap_or_else(|| {
            (self.cols as f64 * self.spacing_x_m).hypot(self.rows as f64 * self.spacing_y_m)
        })
    }

    pub fn rayleigh_distance(&self) -> Result<f64> {
        rayleigh_distance(self.max_dimension(), self.wavelength())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wavelength_at_12ghz() {
        assert_relative_eq!(wavelength(12e9).unwrap(), 0.024_982_704_8, epsilon = 1e-9);
        assert_relative_eq!(wavelength(2.998e8).unwrap(), 1.0, epsilon = 1e-3);
        assert!(wavelength(0.0).is_err());
        assert!(wavelength(-1.0).is_err());
    }

    #[test]
    fn prototype_pitch_is_about_a_third_of_a_wavelength() {
        let ratio = 0.0082 / wavelength(12e9).unwrap();
        assert!((ratio - 0.328).abs() < 1e-3);
        assert!((ratio - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn one_dimensional_grid() {
        let g = build_grid(1, 16, 0.0082, 0.0082).unwrap();
        assert_eq!(g.len(), 16);
        for (j, p) in g.positions().iter().enumerate() {
            assert_relative_eq!(p.x, j as f64 * 0.0082);
            assert_eq!(p.y, 0.0);
        }
        assert_relative_eq!(g.positions()[15].x, 0.1230, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_and_rectangular_grids() {
        let g = build_grid(1, 1, 0.01, 0.01).unwrap();
        assert_eq!(g.positions(), &[Point2::new(0.0, 0.0)]);

        let g = build_grid(2, 2, 0.01, 0.02).unwrap();
        assert_eq!(
            g.positions(),
            &[
                Point2::new(0.0, 0.0),
                Point2::new(0.01, 0.0),
                Point2::new(0.0, 0.02),
                Point2::new(0.01, 0.02)
            ]
        );
        assert_eq!(g.row_col(3), (1, 1));
    }

    #[test]
    fn grid_rejects_bad_dimensions() {
        assert!(build_grid(0, 4, 0.01, 0.01).is_err());
        assert!(build_grid(4, 0, 0.01, 0.01).is_err());
        assert!(build_grid(2, 2, 0.0, 0.01).is_err());
        assert!(build_grid(2, 2, 0.01, -0.01).is_err());
    }

    #[test]
    fn rayleigh_distance_values() {
        let lam = wavelength(12e9).unwrap();
        let d = rayleigh_distance(0.152, lam).unwrap();
        assert!((d - 1.8496).abs() < 1e-3, "{d}");
        assert_eq!(format!("{d:.1}"), "1.8");
        let half = rayleigh_distance(0.076, lam).unwrap();
        assert!((half - 0.4624).abs() < 1e-3, "{half}");
        assert_relative_eq!(half * 4.0, d, max_relative = 1e-14);

        let big_d = 0.3;
        assert_relative_eq!(rayleigh_distance(big_d, 2.0 * big_d * big_d).unwrap(), 1.0);
        assert!(rayleigh_distance(0.0, lam).is_err());
        assert!(rayleigh_distance(0.1, 0.0).is_err());
    }

    #[test]
    fn direction_ranges() {
        assert!(Direction::from_degrees(90.0, 180.0).is_ok());
        assert!(Direction::from_degrees(-90.0, -180.0).is_ok());
        assert!(Direction::from_degrees(91.0, 0.0).is_err());
        assert!(Direction::from_degrees(0.0, 181.0).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn config_invariants() {
        let mut cfg = RhsConfig::prototype_1d();
        assert!(cfg.validate().is_ok());
        cfg.amp_off = 0.5;
        cfg.amp_on = 0.4;
        assert!(cfg.validate().is_err());

        let mut cfg = RhsConfig::prototype_1d();
        cfg.feeds.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = RhsConfig::prototype_1d();
        cfg.surface_index = 0.9;
        assert!(cfg.validate().is_err());

        let cfg = RhsConfig::prototype_1d().with_non_ideal_amplitudes();
        assert!(cfg.validate().is_ok());
        assert_eq!((cfg.amp_on, cfg.amp_off), (0.35, 0.15));
    }

    #[test]
    fn prototype_rayleigh_distance_uses_overall_length() {
        let d = RhsConfig::prototype_1d().rayleigh_distance().unwrap();
        assert!((1.80..=1.90).contains(&d));
    }
}
