use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use robeam::montecarlo::{self, fmt_f64, SimConfig, SimConfigFile, SimReport};
use robeam::solver::{self, BeamformerSolution};
use robeam::worstcase::{self, SampleMode};
use robeam::{model, Beamformer, Complex64, RandomStream};

use crate::error::CliError;
use crate::{Format, Sweep};

/// Relative energy tolerance between the dual and closed-form paths.
const CROSS_CHECK_TOL: f64 = 1e-6;

pub const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "-",
    env!("ROBEAM_GIT_DESCRIBE")
);

fn emit(out: Option<&Path>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct CrossCheck {
    closed_form_guaranteed_energy: f64,
    energy_rel_delta: f64,
    w_phase_distance: f64,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    solution: &'a BeamformerSolution,
    cross_check: CrossCheck,
}

fn phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let ph = if ip.norm() > 0.0 {
        ip / ip.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * ph).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn solve(input: &Path, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let inst = model::parse_instance(&read(input)?)?;
    let sol = solver::solve_dual_sdp(&inst)?;
    let cf = solver::solve_closed_form(&inst)?;
    let scale = sol.guaranteed_energy.abs().max(cf.guaranteed_energy.abs());
    let energy_rel_delta = if scale > 0.0 {
        (sol.guaranteed_energy - cf.guaranteed_energy).abs() / scale
    } else {
        0.0
    };
    if energy_rel_delta > CROSS_CHECK_TOL {
        return Err(CliError::Tolerance(format!(
            "dual and closed-form energies differ by {energy_rel_delta:e} (relative)"
        )));
    }
    let check = CrossCheck {
        closed_form_guaranteed_energy: cf.guaranteed_energy,
        energy_rel_delta,
        w_phase_distance: phase_distance(sol.w.entries(), cf.w.entries()),
    };
    let body = match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&SolveOutput {
                solution: &sol,
                cross_check: check,
            })
            .expect("solution serializes");
            v.push(b'\n');
            v
        }
        Format::Csv => format!(
            "guaranteed_energy,nominal_energy,lambda,mu,duality_gap\n{},{},{},{},{}\n",
            fmt_f64(sol.guaranteed_energy),
            fmt_f64(sol.nominal_energy),
            fmt_f64(sol.lambda),
            fmt_f64(sol.mu),
            fmt_f64(sol.duality_gap),
        )
        .into_bytes(),
    };
    emit(out, &body)
}

#[derive(Deserialize)]
struct BeamformerFile {
    w: Vec<Complex64>,
}

pub fn verify(
    input: &Path,
    beam: &Path,
    samples: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let inst = model::parse_instance(&read(input)?)?;
    let file: BeamformerFile = serde_json::from_slice(&read(beam)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", beam.display())))?;
    let w = Beamformer::new(file.w)?;
    let mut rng = RandomStream::from_seed(seed);
    let report = worstcase::adversarial_check(&inst, &w, samples, &mut rng)?;
    let mut body = serde_json::to_vec_pretty(&report).expect("report serializes");
    body.push(b'\n');
    emit(out, &body)?;
    if report.rate_outage || report.energy_bound_violated {
        eprintln!(
            "outage: min_rate {} vs target {}",
            report.min_rate, inst.rate_target
        );
        return Err(CliError::Outage);
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Campaign config (TOML). Unset fields take the defaults.
    #[arg(short = 'c', long = "config")]
    pub config: Option<PathBuf>,
    /// Overrides the config seed. One of the two is required.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    /// Metadata sidecar path; defaults to `<out>.meta.json` when `-o` is given.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Worker threads (defaults to rayon's choice).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value = "fig2")]
    pub sweep: Sweep,
    #[arg(long)]
    pub n_antennas: Option<usize>,
    #[arg(long)]
    pub power: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub rate_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub n_channels: Option<usize>,
    #[arg(long)]
    pub n_error_samples: Option<usize>,
    #[arg(long)]
    pub channel_norm: Option<f64>,
    #[arg(long, value_parser = parse_mode)]
    pub sampling: Option<SampleMode>,
}

fn parse_mode(s: &str) -> Result<SampleMode, String> {
    match s {
        "interior" => Ok(SampleMode::Interior),
        "boundary" => Ok(SampleMode::Boundary),
        _ => Err(format!("unknown sampling mode `{s}` (interior|boundary)")),
    }
}

fn load_config(args: &SimulateArgs) -> Result<SimConfig, CliError> {
    let mut file: SimConfigFile = match &args.config {
        Some(path) => {
            let text = String::from_utf8(read(path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => SimConfigFile::default(),
    };
    macro_rules! overlay {
        ($($field:ident),*) => {$(
            if let Some(v) = &args.$field {
                file.$field = Some(v.clone());
            }
        )*};
    }
    overlay!(seed, n_antennas, power, sigma2, epsilons, rate_grid, n_channels, n_error_samples, channel_norm, sampling);
    Ok(file.resolve()?)
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'a str,
    seed: u64,
    sampling: SampleMode,
    sweep: &'a str,
    config: &'a SimConfig,
    failures: &'a [montecarlo::TrialFailure],
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let config = load_config(args)?;
    let run = || -> robeam::Result<SimReport> {
        match args.sweep {
            Sweep::Fig2 => montecarlo::fig2_sweep(&config),
            Sweep::Fig3 => montecarlo::fig3_sweep(&config),
        }
    };
    let report = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Input(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    if !report.failures.is_empty() {
        eprintln!("{} trial(s) failed and were excluded", report.failures.len());
    }
    emit(args.out.as_deref(), report.to_csv().as_bytes())?;

    let meta_path = args.meta.clone().or_else(|| {
        args.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".meta.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = meta_path {
        let meta = Metadata {
            version: VERSION,
            seed: config.seed,
            sampling: report.sampling,
            sweep: match args.sweep {
                Sweep::Fig2 => "fig2",
                Sweep::Fig3 => "fig3",
            },
            config: &config,
            failures: &report.failures,
        };
        let mut body = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
        body.push(b'\n');
        fs::write(path, body)?;
    }
    Ok(())
}
