//! Scenario runners behind the `rhs` binary.
//!
//! Each runner loads a config, evaluates one experiment and writes its
//! artifacts into an output directory. Angles are degrees here and radians
//! once they reach `rhs_core`.

use serde::Serialize;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use thiserror::Error;

use rhs_core::config::{load_config, ConfigError};
use rhs_core::export::{
    clean_deg, read_pattern_csv, write_cut_csv, write_overlay_csv, write_pattern_csv,
    write_sweep_csv, MetricsRecord, StreamRecord,
};
use rhs_core::farfield::{
    angle_samples_deg, beam_metrics, full_pattern, hemisphere_pattern, normalized_cut,
    peak_directivity, synthesize, SweepRow,
};
use rhs_core::holography::{
    pattern_multi_feed, pin_map_to_amplitudes, quantize_pattern, suppress_sidelobe,
};
use rhs_core::link::{impulse_stream, link_budget, parse_bits, random_bits, simulate_stream};
use rhs_core::{
    Direction, EvalOptions, HolographicPattern, LinkParams, PatternCut, PinState, PinStateMap,
    RhsConfig,
};

pub const PATTERN_CSV: &str = "pattern.csv";
pub const CUT_CSV: &str = "cut.csv";
pub const METRICS_JSON: &str = "metrics.json";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const OVERLAY_CSV: &str = "overlay.csv";
pub const GAIN_SCALING_CSV: &str = "gain_scaling.csv";
pub const LINK_JSON: &str = "link_budget.json";
pub const STREAM_JSON: &str = "stream.json";
pub const QUANTIZE_JSON: &str = "quantize.json";

/// Exit status for a config that cannot be parsed.
pub const EXIT_PARSE: i32 = 3;
/// Exit status for arguments outside their documented range.
pub const EXIT_DOMAIN: i32 = 4;
/// Exit status for I/O and other runtime failures.
pub const EXIT_RUNTIME: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{scenario}: {source}")]
    Scenario {
        scenario: &'static str,
        #[source]
        source: rhs_core::Error,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot encode {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Read { .. }) => EXIT_RUNTIME,
            CliError::Config(_) => EXIT_PARSE,
            CliError::Scenario { source, .. } => match source {
                rhs_core::Error::Config(ConfigError::Read { .. }) => EXIT_RUNTIME,
                rhs_core::Error::Config(_) => EXIT_PARSE,
                rhs_core::Error::Io(_) | rhs_core::Error::Csv(_) => EXIT_RUNTIME,
                _ => EXIT_DOMAIN,
            },
            CliError::Io { .. } | CliError::Json { .. } => EXIT_RUNTIME,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

trait Context<T> {
    fn in_scenario(self, scenario: &'static str) -> Result<T>;
}

impl<T> Context<T> for rhs_core::Result<T> {
    fn in_scenario(self, scenario: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Scenario { scenario, source })
    }
}

/// Inputs every command accepts.
#[derive(Debug, Clone)]
pub struct Common {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub eval: EvalOptions,
    pub seed: u64,
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The cut containing a target: the plane through broadside and the
/// target azimuth, folded into [0°, 180°).
pub fn cut_for(target: Direction) -> PatternCut {
    let mut phi = target.phi_deg();
    if phi < 0.0 {
        phi += 180.0;
    }
    if phi >= 180.0 - 1e-9 {
        phi -= 180.0;
    }
    if phi.abs() < 1e-9 {
        PatternCut::Horizontal
    } else if (phi - 90.0).abs() < 1e-9 {
        PatternCut::Vertical
    } else {
        PatternCut::Azimuth(phi.to_radians())
    }
}

/// Drive amplitudes for stored holographic amplitudes and diode states.
pub fn drive_amplitudes(
    config: &RhsConfig,
    pattern: &HolographicPattern,
    pins: &PinStateMap,
    quantize: bool,
) -> rhs_core::Result<HolographicPattern> {
    if quantize {
        pin_map_to_amplitudes(pins, config)
    } else {
        Ok(pattern.clone())
    }
}

/// Beam metrics from a pattern CSV written by [`run_pattern`].
pub fn metrics_from_pattern_csv(
    config: &RhsConfig,
    csv_path: &Path,
    cut: PatternCut,
    eval: &EvalOptions,
) -> rhs_core::Result<MetricsRecord> {
    let (pattern, states) = read_pattern_csv(File::open(csv_path)?)?;
    let pins = PinStateMap::new(states, eval.threshold)?;
    let grid = config.grid()?;
    let amps = drive_amplitudes(config, &pattern, &pins, eval.quantize)?;
    let far = hemisphere_pattern(config, &grid, &amps, eval)?;
    Ok(MetricsRecord::from(&beam_metrics(&far, cut)?))
}

#[derive(Debug, Clone)]
pub struct PatternRequest {
    pub common: Common,
    pub theta_deg: f64,
    pub phi_deg: f64,
    /// Subtract an auxiliary beam toward `(theta_deg, weight)`, in the
    /// target's cut.
    pub suppress: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct PatternOutput {
    pub metrics: MetricsRecord,
    pub pattern_csv: PathBuf,
    pub cut_csv: PathBuf,
    pub metrics_json: PathBuf,
}

pub fn run_pattern(req: &PatternRequest) -> Result<PatternOutput> {
    const SCENARIO: &str = "pattern";
    let c = &req.common;
    let config = load_config(&c.config)?;
    let grid = config.grid().in_scenario(SCENARIO)?;
    let target = Direction::from_degrees(req.theta_deg, req.phi_deg).in_scenario(SCENARIO)?;
    let cut = cut_for(target);

    let mut pattern = pattern_multi_feed(&config, &grid, target).in_scenario(SCENARIO)?;
    if let Some((theta_deg, weight)) = req.suppress {
        let lobe = cut
            .direction(theta_deg.to_radians())
            .in_scenario(SCENARIO)?;
        pattern =
            suppress_sidelobe(&pattern, &config, &grid, lobe, weight).in_scenario(SCENARIO)?;
    }
    let pins = quantize_pattern(&pattern, c.eval.threshold).in_scenario(SCENARIO)?;
    let amps = drive_amplitudes(&config, &pattern, &pins, c.eval.quantize).in_scenario(SCENARIO)?;
    let far = hemisphere_pattern(&config, &grid, &amps, &c.eval).in_scenario(SCENARIO)?;
    let metrics = MetricsRecord::from(&beam_metrics(&far, cut).in_scenario(SCENARIO)?);
    let cut_db = normalized_cut(&far, cut).in_scenario(SCENARIO)?;

    prepare_out_dir(&c.out_dir)?;
    let pattern_csv = c.out_dir.join(PATTERN_CSV);
    write_pattern_csv(create(&pattern_csv)?, &grid, &pattern, &pins).in_scenario(SCENARIO)?;
    let cut_csv = c.out_dir.join(CUT_CSV);
    write_cut_csv(create(&cut_csv)?, &cut_db).in_scenario(SCENARIO)?;
    let metrics_json = c.out_dir.join(METRICS_JSON);
    write_json(&metrics_json, &metrics)?;
    Ok(PatternOutput {
        metrics,
        pattern_csv,
        cut_csv,
        metrics_json,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Horizontal,
    Vertical,
}

impl Plane {
    pub fn cut(self) -> PatternCut {
        match self {
            Plane::Horizontal => PatternCut::Horizontal,
            Plane::Vertical => PatternCut::Vertical,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub common: Common,
    pub plane: Plane,
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
}

#[derive(Debug)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub sweep_csv: PathBuf,
    pub overlay_csv: PathBuf,
}

pub fn run_sweep(req: &SweepRequest) -> Result<SweepOutput> {
    const SCENARIO: &str = "sweep";
    let c = &req.common;
    let config = load_config(&c.config)?;
    let grid = config.grid().in_scenario(SCENARIO)?;
    let cut = req.plane.cut();
    let targets = angle_samples_deg(req.start_deg, req.stop_deg, req.step_deg)
        .and_then(|t| {
            t.into_iter()
                .map(|theta| cut.direction(theta))
                .collect::<rhs_core::Result<Vec<_>>>()
        })
        .in_scenario(SCENARIO)?;
    let cut_theta = angle_samples_deg(-90.0, 90.0, c.eval.theta_step_deg).in_scenario(SCENARIO)?;

    let mut rows = Vec::with_capacity(targets.len());
    let mut labels = Vec::with_capacity(targets.len());
    let mut cuts = Vec::with_capacity(targets.len());
    for &target in &targets {
        let amps = synthesize(&config, &grid, target, &c.eval).in_scenario(SCENARIO)?;
        let metrics = hemisphere_pattern(&config, &grid, &amps, &c.eval)
            .and_then(|far| beam_metrics(&far, cut));
        let plane =
            full_pattern(&config, &grid, &amps, &cut_theta, &[cut.phi()]).in_scenario(SCENARIO)?;
        cuts.push(normalized_cut(&plane, cut).in_scenario(SCENARIO)?);
        labels.push(format!("target_{}", clean_deg(target.theta_deg())));
        rows.push(SweepRow { target, metrics });
    }

    prepare_out_dir(&c.out_dir)?;
    let sweep_csv = c.out_dir.join(SWEEP_CSV);
    write_sweep_csv(create(&sweep_csv)?, &rows).in_scenario(SCENARIO)?;
    let overlay_csv = c.out_dir.join(OVERLAY_CSV);
    write_overlay_csv(create(&overlay_csv)?, &labels, &cuts).in_scenario(SCENARIO)?;
    Ok(SweepOutput {
        rows,
        sweep_csv,
        overlay_csv,
    })
}

#[derive(Debug, Clone)]
pub struct GainScalingRequest {
    pub common: Common,
    /// Column counts; the config's row count is kept.
    pub ladder: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainStep {
    pub n_elements: usize,
    pub directivity_dbi: f64,
    /// Change from the previous rung; `None` on the first.
    pub delta_db: Option<f64>,
}

/// Broadside directivity of `config` resized to `cols` columns.
pub fn broadside_directivity(
    config: &RhsConfig,
    cols: usize,
    eval: &EvalOptions,
) -> rhs_core::Result<f64> {
    let mut cfg = config.clone();
    cfg.cols = cols;
    cfg.max_dimension_m = None;
    cfg.validate()?;
    let grid = cfg.grid()?;
    let amps = synthesize(&cfg, &grid, Direction::broadside(), eval)?;
    let far = hemisphere_pattern(&cfg, &grid, &amps, eval)?;
    Ok(beam_metrics(&far, PatternCut::Horizontal)?.peak_directivity_dbi)
}

pub fn run_gain_scaling(req: &GainScalingRequest) -> Result<Vec<GainStep>> {
    const SCENARIO: &str = "gain-scaling";
    let c = &req.common;
    let config = load_config(&c.config)?;
    if req.ladder.len() < 2 {
        return Err(rhs_core::Error::Domain(format!(
            "element-count ladder needs at least two entries, got {}",
            req.ladder.len()
        )))
        .in_scenario(SCENARIO);
    }
    let mut steps: Vec<GainStep> = Vec::with_capacity(req.ladder.len());
    for &cols in &req.ladder {
        let d = broadside_directivity(&config, cols, &c.eval).in_scenario(SCENARIO)?;
        let delta_db = steps.last().map(|prev| d - prev.directivity_dbi);
        steps.push(GainStep {
            n_elements: config.rows * cols,
            directivity_dbi: d,
            delta_db,
        });
    }

    prepare_out_dir(&c.out_dir)?;
    let path = c.out_dir.join(GAIN_SCALING_CSV);
    let mut w = String::from("n_elements,directivity_dbi,delta_db\n");
    for s in &steps {
        let delta = s.delta_db.map(|d| d.to_string()).unwrap_or_default();
        w.push_str(&format!(
            "{},{},{}\n",
            s.n_elements, s.directivity_dbi, delta
        ));
    }
    fs::write(&path, w).map_err(|source| CliError::Io { path, source })?;
    Ok(steps)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BitSource {
    /// A one followed by `len - 1` zeros.
    Impulse(usize),
    /// Explicit ASCII 0/1 string.
    Bits(String),
    /// Uniform random bits drawn from the run seed.
    Random(usize),
}

#[derive(Debug, Clone)]
pub struct LinkRequest {
    pub common: Common,
    pub distance_m: f64,
    pub tx_power_dbm: f64,
    pub rx_gain_dbi: f64,
    pub noise_power_dbm: f64,
    /// Replaces the synthesized broadside directivity when set.
    pub tx_gain_dbi: Option<f64>,
    pub bits: BitSource,
}

#[derive(Debug, Clone)]
pub struct LinkOutput {
    pub budget: rhs_core::LinkBudget,
    pub stream: StreamRecord,
    pub errors: usize,
}

/// Peak directivity of the config's broadside beam.
pub fn synthesized_tx_gain(config: &RhsConfig, eval: &EvalOptions) -> rhs_core::Result<f64> {
    let grid = config.grid()?;
    let amps = synthesize(config, &grid, Direction::broadside(), eval)?;
    let far = hemisphere_pattern(config, &grid, &amps, eval)?;
    Ok(peak_directivity(&far)?.1)
}

pub fn run_link(req: &LinkRequest) -> Result<LinkOutput> {
    const SCENARIO: &str = "link";
    let c = &req.common;
    let config = load_config(&c.config)?;
    let tx_gain_dbi = match req.tx_gain_dbi {
        Some(g) => g,
        None => synthesized_tx_gain(&config, &c.eval).in_scenario(SCENARIO)?,
    };
    let budget = link_budget(&LinkParams {
        tx_power_dbm: req.tx_power_dbm,
        tx_gain_dbi,
        rx_gain_dbi: req.rx_gain_dbi,
        distance_m: req.distance_m,
        frequency_hz: config.frequency_hz,
        noise_power_dbm: req.noise_power_dbm,
        aperture_m: Some(config.max_dimension()),
    })
    .in_scenario(SCENARIO)?;
    let bits = match &req.bits {
        BitSource::Impulse(len) => impulse_stream(*len),
        BitSource::Bits(s) => parse_bits(s).in_scenario(SCENARIO)?,
        BitSource::Random(n) => random_bits(*n, c.seed),
    };
    let result = simulate_stream(&bits, budget.snr_db, c.seed).in_scenario(SCENARIO)?;
    let stream = StreamRecord::from(&result);

    prepare_out_dir(&c.out_dir)?;
    write_json(&c.out_dir.join(LINK_JSON), &budget)?;
    write_json(&c.out_dir.join(STREAM_JSON), &stream)?;
    Ok(LinkOutput {
        budget,
        stream,
        errors: result.errors(),
    })
}

#[derive(Debug, Clone)]
pub struct QuantizeRequest {
    pub common: Common,
    pub theta_deg: f64,
    pub phi_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizeSummary {
    pub threshold: f64,
    pub n_elements: usize,
    pub n_on: usize,
    pub n_off: usize,
}

pub fn run_quantize(req: &QuantizeRequest) -> Result<QuantizeSummary> {
    const SCENARIO: &str = "quantize";
    let c = &req.common;
    let config = load_config(&c.config)?;
    let grid = config.grid().in_scenario(SCENARIO)?;
    let target = Direction::from_degrees(req.theta_deg, req.phi_deg).in_scenario(SCENARIO)?;
    let pattern = pattern_multi_feed(&config, &grid, target).in_scenario(SCENARIO)?;
    let pins = quantize_pattern(&pattern, c.eval.threshold).in_scenario(SCENARIO)?;
    let n_on = pins.states().iter().filter(|s| **s == PinState::On).count();
    let summary = QuantizeSummary {
        threshold: pins.threshold_used(),
        n_elements: pins.len(),
        n_on,
        n_off: pins.len() - n_on,
    };

    prepare_out_dir(&c.out_dir)?;
    write_pattern_csv(
        create(&c.out_dir.join(PATTERN_CSV))?,
        &grid,
        &pattern,
        &pins,
    )
    .in_scenario(SCENARIO)?;
    write_json(&c.out_dir.join(QUANTIZE_JSON), &summary)?;
    Ok(summary)
}
