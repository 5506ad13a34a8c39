//! Far-field evaluation of a surface driven by a holographic pattern.
//!
//! Each element re-radiates the guided reference wave it sees, weighted by
//! its amplitude:
//!
//! ```text
//! E(θ,φ) = EF(θ)/√K · Σ_k Σ_n m_n · e^{-α r_nk} · e^{-j k_s r_nk} · e^{+j k_0 (x_n sinθ cosφ + y_n sinθ sinφ)}
//! ```
//!
//! Feeds are combined coherently with an equal power split. Directivity is
//! obtained by trapezoidal quadrature over a sampled hemisphere.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::geometry::{in_plane, Direction, ElementFactor, ElementGrid, Point2, RhsConfig};
use crate::holography::{
    pattern_multi_feed, pin_map_to_amplitudes, quantize_pattern, HolographicPattern,
};

pub const DEFAULT_THETA_STEP_DEG: f64 = 1.0;
pub const DEFAULT_PHI_STEP_DEG: f64 = 2.0;

/// Floor used when a normalized magnitude is exactly zero.
pub const DB_FLOOR: f64 = -300.0;

/// Relative tolerance on the sampled solid angle before directivity is
/// refused.
const COVERAGE_TOLERANCE: f64 = 0.02;

/// Sampled far field, `field[i][j]` at `(theta[i], phi[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    theta: Vec<f64>,
    phi: Vec<f64>,
    field: Vec<Complex64>,
    frequency_hz: f64,
    ground_plane: bool,
}

impl FarFieldPattern {
    pub fn theta_samples(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi_samples(&self) -> &[f64] {
        &self.phi
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    /// Whether radiation is confined to the upper hemisphere.
    pub fn ground_plane(&self) -> bool {
        self.ground_plane
    }

    pub fn field(&self, i: usize, j: usize) -> Complex64 {
        self.field[i * self.phi.len() + j]
    }

    pub fn power(&self, i: usize, j: usize) -> f64 {
        self.field(i, j).norm_sqr()
    }

    pub fn max_power(&self) -> f64 {
        self.field.iter().map(|e| e.norm_sqr()).fold(0.0, f64::max)
    }
}

/// Which great-circle cut a metric is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatternCut {
    /// φ = 0 (the x–z plane).
    Horizontal,
    /// φ = 90° (the y–z plane).
    Vertical,
    /// Arbitrary azimuth in radians.
    Azimuth(f64),
}

impl PatternCut {
    pub fn phi(self) -> f64 {
        match self {
            PatternCut::Horizontal => 0.0,
            PatternCut::Vertical => FRAC_PI_2,
            PatternCut::Azimuth(phi) => phi,
        }
    }

    /// Direction at elevation `theta` inside this cut.
    pub fn direction(self, theta: f64) -> Result<Direction> {
        Direction::new(theta, self.phi())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamMetrics {
    pub main_lobe: Direction,
    pub peak_directivity_dbi: f64,
    pub hpbw_deg: f64,
    /// Highest sidelobe relative to the main lobe; `-inf` when the main
    /// lobe spans the whole cut.
    pub peak_sidelobe_level_db: f64,
    pub sidelobe_direction: Option<Direction>,
}

/// Uniform samples from `start` to `stop` inclusive, in radians.
pub fn angle_samples_deg(start_deg: f64, stop_deg: f64, step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg > 0.0) || !(stop_deg >= start_deg) {
        return Err(domain(format!(
            "invalid angle range {start_deg}..{stop_deg} step {step_deg}"
        )));
    }
    let n = ((stop_deg - start_deg) / step_deg + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n)
        .map(|i| (start_deg + i as f64 * step_deg).to_radians())
        .collect();
    let last = *out.last().expect("at least one sample");
    if stop_deg.to_radians() - last > 1e-9 {
        out.push(stop_deg.to_radians());
    }
    Ok(out)
}

/// θ ∈ [-90°, 90°] × φ ∈ [0°, 180°], which covers the upper hemisphere once.
pub fn hemisphere_grid(theta_step_deg: f64, phi_step_deg: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((
        angle_samples_deg(-90.0, 90.0, theta_step_deg)?,
        angle_samples_deg(0.0, 180.0, phi_step_deg)?,
    ))
}

fn check_samples(name: &str, s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(domain(format!("{name} grid is empty")));
    }
    if s.iter().any(|v| !v.is_finite()) || s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

fn check_theta(s: &[f64]) -> Result<()> {
    check_samples("theta", s)?;
    if s[0] < -FRAC_PI_2 - 1e-12 || s[s.len() - 1] > FRAC_PI_2 + 1e-12 {
        return Err(domain("theta samples must lie in [-90°, 90°]"));
    }
    Ok(())
}

/// Per-element complex drive, precomputed once per pattern.
struct Excitation {
    positions: Vec<Point2>,
    weights: Vec<Complex64>,
    k0: f64,
    element_factor: ElementFactor,
}

impl Excitation {
    fn new(
        config: &RhsConfig,
        grid: &ElementGrid,
        amplitudes: &HolographicPattern,
    ) -> Result<Self> {
        config.validate()?;
        if amplitudes.len() != grid.len() || grid.len() != config.element_count() {
            return Err(domain(format!(
                "amplitude count {} does not match grid size {} (config {})",
                amplitudes.len(),
                grid.len(),
                config.element_count()
            )));
        }
        let ks = config.guided_wavenumber();
        let norm = 1.0 / (config.feeds.len() as f64).sqrt();
        let weights = grid
            .positions()
            .iter()
            .zip(amplitudes.amplitudes())
            .map(|(&p, &m)| {
                let guided: Complex64 = config
                    .feeds
                    .iter()
                    .map(|f| {
                        let r = f.0.distance(p);
                        Complex64::from_polar((-config.leakage_alpha * r).exp(), -ks * r)
                    })
                    .sum();
                guided * (m * norm)
            })
            .collect();
        Ok(Self {
            positions: grid.positions().to_vec(),
            weights,
            k0: config.free_space_wavenumber(),
            element_factor: config.element_factor,
        })
    }

    fn field_at(&self, theta: f64, phi: f64) -> Complex64 {
        let (ux, uy) = in_plane(theta, phi);
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, w) in self.positions.iter().zip(&self.weights) {
            acc += w * Complex64::cis(self.k0 * (p.x * ux + p.y * uy));
        }
        acc * self.element_factor.gain(theta)
    }
}

/// Complex far field radiated toward `direction`.
pub fn radiated_field(
    config: &RhsConfig,
    grid: &ElementGrid,
    amplitudes: &HolographicPattern,
    direction: Direction,
) -> Result<Complex64> {
    let exc = Excitation::new(config, grid, amplitudes)?;
    Ok(exc.field_at(direction.theta(), direction.phi()))
}

fn sample_pattern<F>(
    config: &RhsConfig,
    theta: &[f64],
    phi: &[f64],
    eval: F,
) -> Result<FarFieldPattern>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    check_theta(theta)?;
    check_samples("phi", phi)?;
    let field: Vec<Complex64> = theta
        .par_iter()
        .flat_map_iter(|&t| phi.iter().map(move |&p| (t, p)))
        .map(|(t, p)| eval(t, p))
        .collect();
    Ok(FarFieldPattern {
        theta: theta.to_vec(),
        phi: phi.to_vec(),
        field,
        frequency_hz: config.frequency_hz,
        ground_plane: config.ground_plane,
    })
}

/// Transmit pattern sampled on a θ × φ grid (radians).
pub fn full_pattern(
    config: &RhsConfig,
    grid: &ElementGrid,
    amplitudes: &HolographicPattern,
    theta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<FarFieldPattern> {
    let exc = Excitation::new(config, grid, amplitudes)?;
    sample_pattern(config, theta_grid, phi_grid, |t, p| exc.field_at(t, p))
}

/// Receive pattern: a plane wave arriving from each sampled direction is
/// picked up by every element, weighted by its amplitude and guided back
/// to each feed, and the feed outputs are combined coherently.
pub fn receive_pattern(
    config: &RhsConfig,
    grid: &ElementGrid,
    amplitudes: &HolographicPattern,
    theta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<FarFieldPattern> {
    config.validate()?;
    if amplitudes.len() != grid.len() || grid.len() != config.element_count() {
        return Err(domain("amplitude count does not match grid size"));
    }
    let k0 = config.free_space_wavenumber();
    let ks = config.guided_wavenumber();
    let alpha = config.leakage_alpha;
    let combine = 1.0 / (config.feeds.len() as f64).sqrt();
    let positions = grid.positions();
    let m = amplitudes.amplitudes();
    let ef = config.element_factor;
    sample_pattern(config, theta_grid, phi_grid, |theta, phi| {
        let (ux, uy) = in_plane(theta, phi);
        let mut port_sum = Complex64::new(0.0, 0.0);
        for feed in &config.feeds {
            let mut port = Complex64::new(0.0, 0.0);
            for (n, pos) in positions.iter().enumerate() {
                // e^{-jk·r} with k = -k0·û for a wave arriving from û.
                let incident = Complex64::cis(k0 * (pos.x * ux + pos.y * uy));
                let r = feed.0.distance(*pos);
                let coupled = incident * (m[n] * (-alpha * r).exp());
                port += coupled * Complex64::cis(-ks * r);
            }
            port_sum += port;
        }
        port_sum * combine * ef.gain(theta)
    })
}

/// Trapezoidal weights for one axis.
fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = x[i + 1] - x[i];
        w[i] += h / 2.0;
        w[i + 1] += h / 2.0;
    }
    w
}

/// Quadrature of `|E|²` over the sampled region (`∫∫ P |sinθ| dθ dφ`) and the
/// solid angle the samples cover.
fn integrate_power(pattern: &FarFieldPattern) -> (f64, f64) {
    let wt = trapezoid_weights(&pattern.theta);
    let wp = trapezoid_weights(&pattern.phi);
    let mut power = 0.0;
    let mut solid_angle = 0.0;
    for (i, &t) in pattern.theta.iter().enumerate() {
        let s = t.sin().abs() * wt[i];
        for (j, w) in wp.iter().enumerate() {
            power += pattern.power(i, j) * s * w;
            solid_angle += s * w;
        }
    }
    (power, solid_angle)
}

/// Total radiated power in field-squared units times steradians.
pub fn radiated_power(pattern: &FarFieldPattern) -> Result<f64> {
    let (power, covered) = integrate_power(pattern);
    if ((covered / (2.0 * PI)) - 1.0).abs() > COVERAGE_TOLERANCE {
        return Err(domain(format!(
            "pattern covers {:.3} sr; directivity needs the full hemisphere (2π sr)",
            covered
        )));
    }
    // A planar aperture without a ground plane radiates a mirror image
    // into the lower hemisphere.
    let total = if pattern.ground_plane {
        power
    } else {
        2.0 * power
    };
    if !(total > 0.0) {
        return Err(domain("total radiated power is zero"));
    }
    Ok(total)
}

/// Find `(lo, frac)` so that `x` lies between samples `lo` and `lo + 1`.
fn bracket(samples: &[f64], x: f64) -> Option<(usize, f64)> {
    let n = samples.len();
    if x < samples[0] - 1e-12 || x > samples[n - 1] + 1e-12 {
        return None;
    }
    if n == 1 {
        return Some((0, 0.0));
    }
    let hi = samples.partition_point(|&s| s < x).clamp(1, n - 1);
    let lo = hi - 1;
    let frac = ((x - samples[lo]) / (samples[hi] - samples[lo])).clamp(0.0, 1.0);
    Some((lo, frac))
}

/// Bilinearly interpolated `|E|²` at a direction.
fn power_at(pattern: &FarFieldPattern, direction: Direction) -> Result<f64> {
    let (theta, phi) = (direction.theta(), direction.phi());
    let candidates = [(theta, phi), (-theta, phi + PI), (-theta, phi - PI)];
    for (t, p) in candidates {
        if let (Some((i, ft)), Some((j, fp))) =
            (bracket(&pattern.theta, t), bracket(&pattern.phi, p))
        {
            let i1 = (i + 1).min(pattern.theta.len() - 1);
            let j1 = (j + 1).min(pattern.phi.len() - 1);
            let v = pattern.power(i, j) * (1.0 - ft) * (1.0 - fp)
                + pattern.power(i1, j) * ft * (1.0 - fp)
                + pattern.power(i, j1) * (1.0 - ft) * fp
                + pattern.power(i1, j1) * ft * fp;
            return Ok(v);
        }
    }
    Err(domain(format!(
        "direction ({:.3}°, {:.3}°) is outside the sampled pattern",
        direction.theta_deg(),
        direction.phi_deg()
    )))
}

/// Directivity toward `direction`, in dBi.
pub fn directivity(pattern: &FarFieldPattern, direction: Direction) -> Result<f64> {
    let total = radiated_power(pattern)?;
    Ok(to_db(4.0 * PI * power_at(pattern, direction)? / total))
}

/// Largest sampled directivity and where it occurs.
pub fn peak_directivity(pattern: &FarFieldPattern) -> Result<(Direction, f64)> {
    let total = radiated_power(pattern)?;
    let (idx, p) = pattern.field.iter().map(|e| e.norm_sqr()).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, p)| if p > acc.1 { (i, p) } else { acc },
    );
    let (i, j) = (idx / pattern.phi.len(), idx % pattern.phi.len());
    let dir = Direction::new(pattern.theta[i], pattern.phi[j])?;
    Ok((dir, to_db(4.0 * PI * p / total)))
}

fn to_db(power_ratio: f64) -> f64 {
    10.0 * power_ratio.log10()
}

/// Column index of the cut's azimuth in the sampled φ grid.
fn cut_column(pattern: &FarFieldPattern, cut: PatternCut) -> Result<usize> {
    let target = cut.phi();
    pattern
        .phi
        .iter()
        .position(|p| (p - target).abs() < 1e-9)
        .ok_or_else(|| {
            domain(format!(
                "pattern has no samples at φ = {:.3}°",
                target.to_degrees()
            ))
        })
}

/// `|E|²` along a cut, with the cut's θ samples.
pub fn cut_power(pattern: &FarFieldPattern, cut: PatternCut) -> Result<Vec<(f64, f64)>> {
    let j = cut_column(pattern, cut)?;
    Ok(pattern
        .theta
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, pattern.power(i, j)))
        .collect())
}

/// Normalized magnitude along a cut: `(angle_deg, dB relative to the cut peak)`.
pub fn normalized_cut(pattern: &FarFieldPattern, cut: PatternCut) -> Result<Vec<(f64, f64)>> {
    let samples = cut_power(pattern, cut)?;
    let peak = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::NoMainLobe);
    }
    Ok(samples
        .into_iter()
        .map(|(t, p)| {
            let db = if p > 0.0 { to_db(p / peak) } else { DB_FLOOR };
            (t.to_degrees(), db.max(DB_FLOOR))
        })
        .collect())
}

/// θ where the power crosses `level` between samples `a` and `b`.
fn crossing(theta: &[f64], power: &[f64], a: usize, b: usize, level: f64) -> f64 {
    let (pa, pb) = (power[a], power[b]);
    if (pb - pa).abs() < f64::MIN_POSITIVE {
        return theta[a];
    }
    theta[a] + (level - pa) / (pb - pa) * (theta[b] - theta[a])
}

/// Main lobe, half-power beamwidth and peak sidelobe within one cut.
pub fn beam_metrics(pattern: &FarFieldPattern, cut: PatternCut) -> Result<BeamMetrics> {
    let samples = cut_power(pattern, cut)?;
    let theta: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let power: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let n = power.len();

    let (imax, peak) =
        power.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc },
        );
    let floor = power.iter().cloned().fold(f64::INFINITY, f64::min);
    if n < 2 || !(peak > 0.0) || peak - floor <= 1e-9 * peak {
        return Err(Error::NoMainLobe);
    }

    let half = peak / 2.0;
    let mut left = theta[0];
    for i in (0..imax).rev() {
        if power[i] < half {
            left = crossing(&theta, &power, i, i + 1, half);
            break;
        }
    }
    let mut right = theta[n - 1];
    for i in imax + 1..n {
        if power[i] < half {
            right = crossing(&theta, &power, i - 1, i, half);
            break;
        }
    }
    let hpbw_deg = (right - left).to_degrees();

    let mut lnull = imax;
    while lnull > 0 && power[lnull - 1] <= power[lnull] {
        lnull -= 1;
    }
    let mut rnull = imax;
    while rnull + 1 < n && power[rnull + 1] <= power[rnull] {
        rnull += 1;
    }
    let is_local_max = |i: usize| {
        let up_left = i == 0 || power[i] >= power[i - 1];
        let up_right = i + 1 == n || power[i] >= power[i + 1];
        up_left && up_right
    };
    let sidelobe = (0..n)
        .filter(|&i| (i < lnull || i > rnull) && is_local_max(i))
        .max_by(|&a, &b| power[a].total_cmp(&power[b]));

    let (peak_sidelobe_level_db, sidelobe_direction) = match sidelobe {
        Some(i) if power[i] > 0.0 => (
            to_db(power[i] / peak).min(0.0),
            Some(cut.direction(theta[i])?),
        ),
        _ => (f64::NEG_INFINITY, None),
    };

    let main_lobe = cut.direction(theta[imax])?;
    let total = radiated_power(pattern)?;
    Ok(BeamMetrics {
        main_lobe,
        peak_directivity_dbi: to_db(4.0 * PI * peak / total),
        hpbw_deg,
        peak_sidelobe_level_db,
        sidelobe_direction,
    })
}

/// Options shared by pattern evaluation pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub quantize: bool,
    pub threshold: f64,
    pub theta_step_deg: f64,
    pub phi_step_deg: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            quantize: false,
            threshold: 0.5,
            theta_step_deg: DEFAULT_THETA_STEP_DEG,
            phi_step_deg: DEFAULT_PHI_STEP_DEG,
        }
    }
}

/// Amplitudes used to drive the surface for a target: the multi-feed
/// holographic pattern, optionally thresholded and realized as diode states.
pub fn synthesize(
    config: &RhsConfig,
    grid: &ElementGrid,
    target: Direction,
    opts: &EvalOptions,
) -> Result<HolographicPattern> {
    let pattern = pattern_multi_feed(config, grid, target)?;
    if opts.quantize {
        let map = quantize_pattern(&pattern, opts.threshold)?;
        pin_map_to_amplitudes(&map, config)
    } else {
        Ok(pattern)
    }
}

/// Hemisphere pattern for the given amplitudes at the requested resolution.
pub fn hemisphere_pattern(
    config: &RhsConfig,
    grid: &ElementGrid,
    amplitudes: &HolographicPattern,
    opts: &EvalOptions,
) -> Result<FarFieldPattern> {
    let (theta, phi) = hemisphere_grid(opts.theta_step_deg, opts.phi_step_deg)?;
    full_pattern(config, grid, amplitudes, &theta, &phi)
}

#[derive(Debug)]
pub struct SweepRow {
    pub target: Direction,
    pub metrics: Result<BeamMetrics>,
}

/// Synthesize, optionally quantize and evaluate one beam per target.
/// Per-target failures are reported in their row.
pub fn steering_sweep(
    config: &RhsConfig,
    grid: &ElementGrid,
    targets: &[Direction],
    cut: PatternCut,
    opts: &EvalOptions,
) -> Result<Vec<SweepRow>> {
    if targets.is_empty() {
        return Err(domain("sweep needs at least one target"));
    }
    Ok(targets
        .iter()
        .map(|&target| {
            let metrics = synthesize(config, grid, target, opts)
                .and_then(|amps| hemisphere_pattern(config, grid, &amps, opts))
                .and_then(|pat| beam_metrics(&pat, cut));
            SweepRow { target, metrics }
        })
        .collect())
}
