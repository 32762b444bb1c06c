//! `star`: batch front end for the surface-code, injection and resource simulations.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use star_core::estimator::{DeviceSpec, LayoutScheme};
use star_core::injection::VariantKind;
use star_core::surface_code::RotatedSurfaceLayout;
use star_core::StarError;

use output::{emit, emit_document, Format, Meta};

#[derive(Parser, Debug)]
#[command(
    name = "star",
    version,
    about = "Surface-code memory, ancilla injection and resource estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
}

#[derive(Args, Debug)]
struct Sampling {
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; does not affect results.
    #[arg(long, env = "STAR_THREADS")]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct Device {
    /// Physical qubits (accepts `1e4`).
    #[arg(long = "n-phys", default_value = "1e4", value_parser = parse_count)]
    n_phys: u64,
    #[arg(long, default_value_t = 1e-4)]
    p: f64,
    #[arg(long, value_delimiter = ',', default_value = "7")]
    d: Vec<usize>,
    /// Rotation coefficient: a variant name, a fraction like `2/15` or a number.
    #[arg(long, default_value = "direct")]
    variant: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Logical error rates of the d-round memory experiment over a (d, p) grid.
    Memory {
        #[arg(long, value_delimiter = ',', default_value = "3")]
        d: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.001")]
        p: Vec<f64>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// Ancilla-state injection: exact leading coefficients or Monte-Carlo rates.
    Inject {
        /// Print exact first-order coefficients instead of sampling.
        #[arg(long)]
        oracle: bool,
        /// `direct`, `indirect_two_cnot`, `indirect_ancilla` or `all`.
        #[arg(long, default_value = "direct")]
        variant: String,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        d: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.0001")]
        p: Vec<f64>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// Fit `P_L = C (p/p_th)^((d+1)/2)` to a memory CSV.
    Fit {
        /// CSV written by `star memory`.
        input: Option<PathBuf>,
        /// Print the bundled reference fit instead.
        #[arg(long, conflicts_with = "input")]
        reference: bool,
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Logical qubits, Clifford and rotation budgets, quantum volume.
    Estimate {
        #[command(flatten)]
        device: Device,
        #[arg(long, default_value = "compact")]
        scheme: String,
        /// Fit JSON from `star fit --format json`; the bundled reference fit by default.
        #[arg(long)]
        fit: Option<PathBuf>,
        /// Rounds per Clifford operation, in units of one round.
        #[arg(long, default_value_t = 1.0)]
        clifford_divisor: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Comparison with distillation-based architectures.
    Compare {
        #[command(flatten)]
        device: Device,
        #[command(flatten)]
        common: Common,
    },
    /// Hubbard and QAOA problem sizes that fit the budgets.
    Apps {
        #[command(flatten)]
        device: Device,
        #[arg(long, default_value = "compact")]
        scheme: String,
        #[command(flatten)]
        common: Common,
    },
    /// Repeat-until-success statistics.
    Rus {
        #[arg(long = "p-z1", value_delimiter = ',', default_value = "0.001")]
        p_z1: Vec<f64>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// JSON dump of the code layout.
    Layout {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(v >= 0.0 && v.fract() == 0.0 && v < 1e18) {
        return Err(format!("not a non-negative integer: {s:?}"));
    }
    Ok(v as u64)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn variants(s: &str) -> star_core::Result<Vec<VariantKind>> {
    if s == "all" {
        Ok(VariantKind::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

#[derive(Debug)]
enum Failure {
    Star(StarError),
    Io(std::io::Error),
}

impl From<StarError> for Failure {
    fn from(e: StarError) -> Self {
        Failure::Star(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Memory {
            d,
            p,
            sampling,
            common,
        } => {
            let rows = commands::memory(&d, &p, sampling.shots, sampling.seed, sampling.threads)?;
            let meta = Meta::new("memory")
                .with("d", join(&d))
                .with("p", join(&p))
                .with("shots", sampling.shots)
                .with("seed", sampling.seed);
            emit(&meta, &rows, common.format, common.out.as_deref())?;
        }
        Command::Inject {
            oracle,
            variant,
            d,
            p,
            sampling,
            common,
        } => {
            let vs = variants(&variant)?;
            if oracle {
                let rows = commands::inject_oracle(&d, &vs)?;
                let meta = Meta::new("inject")
                    .with("oracle", true)
                    .with("variant", &variant)
                    .with("d", join(&d));
                emit(&meta, &rows, common.format, common.out.as_deref())?;
            } else {
                let rows =
                    commands::inject(&d, &p, &vs, sampling.shots, sampling.seed, sampling.threads)?;
                let meta = Meta::new("inject")
                    .with("variant", &variant)
                    .with("d", join(&d))
                    .with("p", join(&p))
                    .with("shots", sampling.shots)
                    .with("seed", sampling.seed);
                emit(&meta, &rows, common.format, common.out.as_deref())?;
            }
        }
        Command::Fit {
            input,
            reference,
            p_min,
            p_max,
            common,
        } => {
            let (fit, meta) = if reference {
                (
                    star_core::estimator::FitResult::reference(),
                    Meta::new("fit").with("reference", true),
                )
            } else {
                let input = input.ok_or_else(|| {
                    StarError::Config("fit needs an input CSV or --reference".into())
                })?;
                let (fit, n) = commands::fit(&input, p_min, p_max)?;
                let meta = Meta::new("fit")
                    .with("input", input.display())
                    .with("p_min", p_min)
                    .with("p_max", p_max)
                    .with("points", n);
                (fit, meta)
            };
            match common.format {
                Format::Json => emit_document(
                    &meta,
                    &serde_json::json!({ "fit": fit }),
                    common.out.as_deref(),
                )?,
                Format::Csv => emit(
                    &meta,
                    &commands::fit_rows(&fit),
                    Format::Csv,
                    common.out.as_deref(),
                )?,
            }
        }
        Command::Estimate {
            device,
            scheme,
            fit,
            clifford_divisor,
            common,
        } => {
            let spec = DeviceSpec {
                n_phys: device.n_phys,
                p: device.p,
            };
            let scheme: LayoutScheme = scheme.parse()?;
            let c_z = commands::parse_coefficient(&device.variant)?;
            let fit_result = commands::load_fit(fit.as_deref())?;
            let reports =
                commands::estimate(&spec, &device.d, scheme, &fit_result, c_z, clifford_divisor)?;
            let meta = Meta::new("estimate")
                .with("n_phys", spec.n_phys)
                .with("p", spec.p)
                .with("d", join(&device.d))
                .with("scheme", scheme)
                .with("variant", &device.variant)
                .with(
                    "fit",
                    fit.as_ref()
                        .map_or("reference".to_string(), |f| f.display().to_string()),
                )
                .with("clifford_divisor", clifford_divisor);
            match common.format {
                Format::Json => emit(&meta, &reports, Format::Json, common.out.as_deref())?,
                Format::Csv => {
                    let rows: Vec<commands::EstimateRow> = reports.iter().map(Into::into).collect();
                    emit(&meta, &rows, Format::Csv, common.out.as_deref())?
                }
            }
        }
        Command::Compare { device, common } => {
            let spec = DeviceSpec {
                n_phys: device.n_phys,
                p: device.p,
            };
            let c_z = commands::parse_coefficient(&device.variant)?;
            let rows = commands::compare(&spec, &device.d, c_z)?;
            let meta = Meta::new("compare")
                .with("n_phys", spec.n_phys)
                .with("p", spec.p)
                .with("d", join(&device.d))
                .with("variant", &device.variant);
            emit(&meta, &rows, common.format, common.out.as_deref())?;
        }
        Command::Apps {
            device,
            scheme,
            common,
        } => {
            let spec = DeviceSpec {
                n_phys: device.n_phys,
                p: device.p,
            };
            let scheme: LayoutScheme = scheme.parse()?;
            let c_z = commands::parse_coefficient(&device.variant)?;
            let rows = commands::apps(&spec, &device.d, scheme, c_z)?;
            let meta = Meta::new("apps")
                .with("n_phys", spec.n_phys)
                .with("p", spec.p)
                .with("d", join(&device.d))
                .with("scheme", scheme)
                .with("variant", &device.variant);
            emit(&meta, &rows, common.format, common.out.as_deref())?;
        }
        Command::Rus {
            p_z1,
            sampling,
            common,
        } => {
            let rows = commands::rus(&p_z1, sampling.shots, sampling.seed, sampling.threads)?;
            let meta = Meta::new("rus")
                .with("p_z1", join(&p_z1))
                .with("runs", sampling.shots)
                .with("seed", sampling.seed);
            emit(&meta, &rows, common.format, common.out.as_deref())?;
        }
        Command::Layout { d, common } => {
            let layout = RotatedSurfaceLayout::new(d)?;
            emit_document(
                &Meta::new("layout").with("d", d),
                &layout,
                common.out.as_deref(),
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Star(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                StarError::Config(_) | StarError::DegenerateFit(_) => 2,
                StarError::ScheduleInvalid(_) => 3,
                StarError::NonUnitary(_) => 1,
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
