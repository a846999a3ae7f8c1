use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chromadiff::diffusion::{coupling_edge_map, input_weights};
use chromadiff::metrics::{combined_ssim_map, evaluate};
use chromadiff::synthetic::SyntheticKind;
use chromadiff::{add_gaussian_noise, denoise_observed, load, psnr, save, PlanarImage, SchemeKind};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

mod bench;
mod settings;

use settings::{DiffusionFlags, DEFAULT_SIGMA_N};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(chromadiff::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(chromadiff::Error::Argument(_)) => 1,
            CliError::Core(chromadiff::Error::Io { .. } | chromadiff::Error::Format { .. }) => 2,
            CliError::Core(chromadiff::Error::Divergence { .. }) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<chromadiff::Error> for CliError {
    fn from(e: chromadiff::Error) -> Self {
        CliError::Core(e)
    }
}

/// `inf` for identical images, otherwise six decimals.
pub fn format_db(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".to_string()
    } else {
        format!("{v:.6}")
    }
}

/// Color image denoising by coupled tensor diffusion.
#[derive(Parser, Debug)]
#[command(name = "chromadiff", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Add Gaussian noise to an image and print its PSNR against the input
    Noise {
        input: PathBuf,
        output: PathBuf,
        /// Noise standard deviation on the 0..255 scale
        #[arg(long, default_value_t = DEFAULT_SIGMA_N)]
        sigma_n: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Denoise an image
    Denoise(DenoiseArgs),
    /// Noise and denoise every image in a directory and write a CSV report
    Bench(BenchArgs),
    /// Write the synthetic disk, stripes and checkerboard images as PNG
    Synth {
        dir: PathBuf,
        #[arg(long, default_value_t = 128)]
        size: usize,
    },
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    flags: DiffusionFlags,
    /// Noise-free reference; enables PSNR/MSSIM reporting
    #[arg(long, value_name = "PATH")]
    clean: Option<PathBuf>,
    /// Treat the input as clean: corrupt it with --sigma-n/--seed noise first
    /// and score against it
    #[arg(long)]
    add_noise: bool,
    /// Also report the iteration with the highest PSNR
    #[arg(long)]
    report_best: bool,
    /// Write the channel weights as an RGB PNG
    #[arg(long, value_name = "PATH")]
    dump_weights: Option<PathBuf>,
    /// Write max_i |f_C(U_i)| of the input, rescaled to [0, 1]
    #[arg(long, value_name = "PATH")]
    dump_coupling: Option<PathBuf>,
    /// Write the channel-mean SSIM map against the reference, rescaled to [0, 1]
    #[arg(long, value_name = "PATH")]
    dump_ssim: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    corpus: PathBuf,
    out_csv: PathBuf,
    #[command(flatten)]
    flags: DiffusionFlags,
    /// Schemes to run, comma separated
    #[arg(long, value_delimiter = ',', default_value = "proposed,td,pm")]
    schemes: Vec<String>,
}

fn cmd_noise(input: &Path, output: &Path, sigma_n: f64, seed: u64) -> Result<(), CliError> {
    let clean = load(input)?;
    let noisy = add_gaussian_noise(&clean, sigma_n, seed)?;
    save(&noisy, output)?;
    println!("psnr_db={}", format_db(psnr(&noisy, &clean)?));
    Ok(())
}

fn cmd_denoise(args: &DenoiseArgs) -> Result<(), CliError> {
    let settings = args.flags.resolve()?;
    let input = load(&args.input)?;
    let (noisy, reference) = if args.add_noise {
        (add_gaussian_noise(&input, settings.sigma_n, settings.seed)?, Some(input))
    } else {
        let reference = args.clean.as_deref().map(load).transpose()?;
        (input, reference)
    };
    if let Some(r) = &reference {
        if !r.same_shape(&noisy) {
            return Err(CliError::Usage("reference and input differ in size".into()));
        }
    }
    if (args.report_best || args.dump_ssim.is_some()) && reference.is_none() {
        return Err(CliError::Usage(
            "--report-best and --dump-ssim need --clean or --add-noise".into(),
        ));
    }

    let cfg = &settings.diffusion;
    if args.dump_weights.is_some() || args.dump_coupling.is_some() {
        let weights = input_weights(&noisy, &cfg.tv)?;
        if let Some(path) = &args.dump_weights {
            save(&weights.to_image(), path)?;
        }
        if let Some(path) = &args.dump_coupling {
            save(&PlanarImage::new(vec![coupling_edge_map(&noisy, &weights)?])?, path)?;
        }
    }

    let mut best = (0usize, f64::NEG_INFINITY);
    if let Some(r) = reference.as_ref().filter(|_| args.report_best) {
        best = (0, psnr(&noisy, r)?);
    }
    let out = denoise_observed(&noisy, cfg, settings.scheme, |k, u| {
        if let Some(r) = reference.as_ref().filter(|_| args.report_best) {
            let p = psnr(u, r).unwrap_or(f64::NEG_INFINITY);
            if p > best.1 {
                best = (k, p);
            }
        }
    })?;
    save(&out, &args.output)?;

    if let Some(r) = &reference {
        let report = evaluate(&out, r, false)?;
        println!(
            "scheme={} iters={} psnr_db={} mssim={:.6}",
            settings.scheme,
            cfg.iterations,
            format_db(report.psnr_db),
            report.mssim
        );
        if args.report_best {
            println!("best_iteration={} best_psnr_db={}", best.0, format_db(best.1));
        }
        if let Some(path) = &args.dump_ssim {
            let map = combined_ssim_map(&out, r)?;
            save(&PlanarImage::new(vec![map.rescaled_unit()])?, path)?;
        }
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let settings = args.flags.resolve()?;
    let schemes = args
        .schemes
        .iter()
        .map(|s| s.parse::<SchemeKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if schemes.is_empty() {
        return Err(CliError::Usage("no schemes selected".into()));
    }
    let rows = bench::run(&args.corpus, &schemes, &settings)?;
    let csv = bench::render_csv(&rows, &schemes, &settings);
    std::fs::write(&args.out_csv, csv).map_err(|source| {
        CliError::Core(chromadiff::Error::Io {
            path: args.out_csv.clone(),
            source,
        })
    })?;
    for line in bench::summary(&rows, &schemes) {
        println!("{line}");
    }
    Ok(())
}

fn cmd_synth(dir: &Path, size: usize) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        CliError::Core(chromadiff::Error::Io {
            path: dir.to_path_buf(),
            source,
        })
    })?;
    for kind in SyntheticKind::ALL {
        let path = dir.join(format!("{kind}.png"));
        save(&kind.render(size)?, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Noise {
            input,
            output,
            sigma_n,
            seed,
        } => cmd_noise(input, output, *sigma_n, *seed),
        Command::Denoise(args) => cmd_denoise(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Synth { dir, size } => cmd_synth(dir, *size),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chromadiff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
