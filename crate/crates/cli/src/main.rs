use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use rhs_cli::{
    run_gain_scaling, run_link, run_pattern, run_quantize, run_sweep, BitSource, CliError, Common,
    GainScalingRequest, LinkRequest, PatternRequest, Plane, QuantizeRequest, SweepRequest,
};
use rhs_core::farfield::{DEFAULT_PHI_STEP_DEG, DEFAULT_THETA_STEP_DEG};
use rhs_core::EvalOptions;

/// Reconfigurable holographic surface simulator.
#[derive(Parser)]
#[command(name = "rhs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Surface config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the emitted artifacts.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Amplitude threshold for the ON/OFF decision.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Drive the surface with the binary diode states instead of
    /// continuous amplitudes.
    #[arg(long)]
    quantize: bool,
    #[arg(long, default_value_t = DEFAULT_THETA_STEP_DEG)]
    theta_step_deg: f64,
    #[arg(long, default_value_t = DEFAULT_PHI_STEP_DEG)]
    phi_step_deg: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            config: a.config,
            out_dir: a.out_dir,
            eval: EvalOptions {
                quantize: a.quantize,
                threshold: a.threshold,
                theta_step_deg: a.theta_step_deg,
                phi_step_deg: a.phi_step_deg,
            },
            seed: a.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PlaneArg {
    Horizontal,
    Vertical,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize one beam and write its pattern, cut and metrics.
    Pattern {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_deg: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi_deg: f64,
        /// Elevation of a sidelobe to attenuate, within the target's cut.
        #[arg(long, allow_negative_numbers = true, requires = "suppress_weight")]
        suppress_sidelobe_deg: Option<f64>,
        /// Weight of the subtracted auxiliary pattern.
        #[arg(long, requires = "suppress_sidelobe_deg")]
        suppress_weight: Option<f64>,
    },
    /// Steer across a range of elevations in one plane.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "horizontal")]
        plane: PlaneArg,
        #[arg(long, allow_negative_numbers = true)]
        start_deg: f64,
        #[arg(long, allow_negative_numbers = true)]
        stop_deg: f64,
        #[arg(long, default_value_t = 10.0)]
        step_deg: f64,
    },
    /// Broadside directivity against the number of columns.
    GainScaling {
        #[command(flatten)]
        common: CommonArgs,
        /// Column counts, e.g. 16,32,64.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        ladder: Vec<usize>,
    },
    /// Link budget and baseband loopback at the resulting SNR.
    Link {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        distance_m: f64,
        #[arg(long, allow_negative_numbers = true)]
        tx_power_dbm: f64,
        #[arg(long, allow_negative_numbers = true)]
        rx_gain_dbi: f64,
        #[arg(long, allow_negative_numbers = true)]
        noise_dbm: f64,
        /// Override the synthesized broadside Tx gain.
        #[arg(long, allow_negative_numbers = true)]
        tx_gain_dbi: Option<f64>,
        /// Explicit ASCII 0/1 stream.
        #[arg(long, conflicts_with_all = ["count", "impulse_len"])]
        bits: Option<String>,
        /// Number of random bits.
        #[arg(long, conflicts_with = "impulse_len")]
        count: Option<usize>,
        /// Length of the impulse stream used when no bits are given.
        #[arg(long, default_value_t = 1000)]
        impulse_len: usize,
    },
    /// Write the diode states for a target.
    Quantize {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_deg: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi_deg: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pattern {
            common,
            theta_deg,
            phi_deg,
            suppress_sidelobe_deg,
            suppress_weight,
        } => {
            let out = run_pattern(&PatternRequest {
                common: common.into(),
                theta_deg,
                phi_deg,
                suppress: suppress_sidelobe_deg.zip(suppress_weight),
            })?;
            println!(
                "main lobe {:.2}°, {:.2} dBi, HPBW {:.2}° -> {}",
                out.metrics.main_lobe_theta_deg,
                out.metrics.peak_directivity_dbi,
                out.metrics.hpbw_deg,
                out.metrics_json.display()
            );
        }
        Command::Sweep {
            common,
            plane,
            start_deg,
            stop_deg,
            step_deg,
        } => {
            let plane = match plane {
                PlaneArg::Horizontal => Plane::Horizontal,
                PlaneArg::Vertical => Plane::Vertical,
            };
            let out = run_sweep(&SweepRequest {
                common: common.into(),
                plane,
                start_deg,
                stop_deg,
                step_deg,
            })?;
            println!("{} targets -> {}", out.rows.len(), out.sweep_csv.display());
        }
        Command::GainScaling { common, ladder } => {
            for step in run_gain_scaling(&GainScalingRequest {
                common: common.into(),
                ladder,
            })? {
                match step.delta_db {
                    Some(d) => println!(
                        "N={:<5} {:.2} dBi ({d:+.2} dB)",
                        step.n_elements, step.directivity_dbi
                    ),
                    None => println!("N={:<5} {:.2} dBi", step.n_elements, step.directivity_dbi),
                }
            }
        }
        Command::Link {
            common,
            distance_m,
            tx_power_dbm,
            rx_gain_dbi,
            noise_dbm,
            tx_gain_dbi,
            bits,
            count,
            impulse_len,
        } => {
            let bits = match (bits, count) {
                (Some(s), _) => BitSource::Bits(s),
                (None, Some(n)) => BitSource::Random(n),
                (None, None) => BitSource::Impulse(impulse_len),
            };
            let out = run_link(&LinkRequest {
                common: common.into(),
                distance_m,
                tx_power_dbm,
                rx_gain_dbi,
                noise_power_dbm: noise_dbm,
                tx_gain_dbi,
                bits,
            })?;
            if out.budget.far_field_warning {
                eprintln!(
                    "warning: {} m is inside the Rayleigh distance ({:.2} m)",
                    out.budget.distance_m,
                    out.budget.rayleigh_distance_m.unwrap_or(f64::NAN)
                );
            }
            println!(
                "SNR {:.2} dB, {} of {} bits in error (BER {})",
                out.budget.snr_db, out.errors, out.stream.n_bits, out.stream.ber
            );
        }
        Command::Quantize {
            common,
            theta_deg,
            phi_deg,
        } => {
            let s = run_quantize(&QuantizeRequest {
                common: common.into(),
                theta_deg,
                phi_deg,
            })?;
            println!(
                "{} ON / {} OFF at threshold {}",
                s.n_on, s.n_off, s.threshold
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
