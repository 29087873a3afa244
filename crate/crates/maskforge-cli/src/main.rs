//! maskforge CLI: region-mask overlapped fingerprint images, synthesize
//! test fixtures with ground truth, and evaluate against them.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use maskforge::image::GrayImage;
use maskforge::pgm::{read_pgm, write_pgm, write_ppm};
use maskforge::pipeline::{self, PipelineConfig, PipelineError};
use maskforge::synth::{
    compose_overlap, generate_fixture, load_fixture, save_fixture, synthetic_print, NoiseKind,
    OverlapFixture,
};
use maskforge::{eval, BinaryMask};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_PIPELINE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "maskforge",
    about = "Automated region masking of overlapped fingerprint impressions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Region-mask a single PGM image and write the masks, the colored
    /// reconstruction and the provenance record.
    Mask(MaskArgs),
    /// Build an overlapped fixture from single prints (files or generated)
    /// and write it with its ground-truth masks.
    Synth(SynthArgs),
    /// Run the pipeline over a directory of fixtures and write a JSON
    /// report with IoU, coverage and timing.
    Eval(EvalArgs),
}

#[derive(Args)]
struct MaskArgs {
    /// Input image (PGM, P5 or P2)
    input: PathBuf,
    /// Output directory
    #[arg(short, long)]
    out: PathBuf,
    /// Pipeline config JSON (unknown keys rejected)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the intermediate stages as stage_<letter>.pgm
    #[arg(long)]
    trace: bool,
    /// Re-run the pipeline on the extracted overlap region (three or more
    /// prints can leave sub-overlaps inside it)
    #[arg(long)]
    recurse_overlap: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Comma-separated single-print PGMs to fuse (2 or 3)
    #[arg(long, value_delimiter = ',')]
    prints: Vec<PathBuf>,
    /// Generate prints instead: <n>x<width>x<height>, e.g. 2x640x480
    #[arg(long, conflicts_with = "prints")]
    generate: Option<String>,
    /// Rotation in degrees per print, comma-separated
    #[arg(long, value_delimiter = ',')]
    rotate: Vec<f64>,
    /// Offset per print as dy:dx, comma-separated
    #[arg(long, value_delimiter = ',')]
    offset: Vec<String>,
    /// Noise: gaussian:<sigma> | saltpepper:<density> | poisson | speckle:<variance>
    #[arg(long)]
    noise: Option<String>,
    /// RNG seed (defaults to MASKFORGE_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output fixture directory
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory whose subdirectories are fixtures
    #[arg(long)]
    fixtures: PathBuf,
    /// Pipeline config JSON
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report output path
    #[arg(short, long)]
    out: PathBuf,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version go to stdout with success
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Mask(args) => cmd_mask(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    let cfg = match path {
        None => PipelineConfig::default(),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
    };
    cfg.validate().map_err(|e| anyhow!(e.to_string()))?;
    Ok(cfg)
}

fn read_gray(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_pgm(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    fs::write(path, write_pgm(&mask.to_gray()))
        .with_context(|| format!("writing {}", path.display()))
}

fn run_and_write(img: &GrayImage, cfg: &PipelineConfig, args: &MaskArgs, outdir: &Path) -> Result<bool> {
    let result = pipeline::run(img, cfg, args.trace);
    let (set, trace) = match result {
        Ok(ok) => ok,
        Err(e @ PipelineError::InvalidConfig(_)) => bail!(e.to_string()),
        Err(e) => {
            eprintln!("pipeline error: {e}");
            return Ok(false);
        }
    };

    write_mask(&outdir.join("foreground.pgm"), &set.foreground)?;
    write_mask(&outdir.join("overlap.pgm"), &set.overlap)?;
    for (i, c) in set.components.iter().enumerate() {
        write_mask(&outdir.join(format!("component_{i}.pgm")), c)?;
    }
    fs::write(
        outdir.join("reconstruction.ppm"),
        write_ppm(&pipeline::reconstruct(&set)),
    )?;
    fs::write(
        outdir.join("provenance.json"),
        serde_json::to_vec_pretty(&set.provenance)?,
    )?;
    if let Some(trace) = trace {
        for (key, img) in trace.stages() {
            fs::write(outdir.join(format!("stage_{key}.pgm")), write_pgm(img))?;
        }
    }
    println!(
        "{}: overlap + {} components (angle {}°, line {}), results in {}",
        args.input.display(),
        set.components.len(),
        set.provenance.angle_deg,
        set.provenance.line_len,
        outdir.display()
    );

    if args.recurse_overlap {
        // keep only the overlap zone of the padded input and re-run
        let p = cfg.pad;
        let (w, h) = (img.width(), img.height());
        let masked = GrayImage::from_fn(w, h, |x, y| {
            if set.overlap.get(x + p, y + p) {
                img.get(x, y)
            } else {
                255
            }
        });
        let subdir = outdir.join("recurse");
        fs::create_dir_all(&subdir)?;
        match pipeline::run(&masked, cfg, false) {
            Ok((subset, _)) => {
                write_mask(&subdir.join("overlap.pgm"), &subset.overlap)?;
                for (i, c) in subset.components.iter().enumerate() {
                    write_mask(&subdir.join(format!("component_{i}.pgm")), c)?;
                }
                fs::write(
                    subdir.join("reconstruction.ppm"),
                    write_ppm(&pipeline::reconstruct(&subset)),
                )?;
                println!(
                    "recurse: overlap + {} components in {}",
                    subset.components.len(),
                    subdir.display()
                );
            }
            Err(e) => eprintln!("recurse: overlap region did not split further ({e})"),
        }
    }
    Ok(true)
}

fn cmd_mask(args: MaskArgs) -> Result<ExitCode> {
    let cfg = load_config(&args.config)?;
    let img = read_gray(&args.input)?;
    fs::create_dir_all(&args.out)?;
    let ok = run_and_write(&img, &cfg, &args, &args.out)?;
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_PIPELINE)
    })
}

fn parse_noise(spec: &str) -> Result<NoiseKind> {
    let (kind, param) = match spec.split_once(':') {
        Some((k, p)) => (k, Some(p)),
        None => (spec, None),
    };
    let value = |what: &str| -> Result<f64> {
        param
            .ok_or_else(|| anyhow!("noise {kind} needs a parameter ({what})"))?
            .parse()
            .map_err(|_| anyhow!("invalid {what} in noise spec {spec:?}"))
    };
    Ok(match kind {
        "gaussian" => NoiseKind::Gaussian {
            sigma: value("sigma")?,
        },
        "saltpepper" => NoiseKind::SaltPepper {
            density: value("density")?,
        },
        "poisson" => NoiseKind::Poisson,
        "speckle" => NoiseKind::Speckle {
            variance: value("variance")?,
        },
        other => bail!("unknown noise kind {other:?}"),
    })
}

fn parse_offset(spec: &str) -> Result<(i32, i32)> {
    let (dy, dx) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("offset must be dy:dx, got {spec:?}"))?;
    Ok((
        dy.trim().parse().map_err(|_| anyhow!("bad dy in {spec:?}"))?,
        dx.trim().parse().map_err(|_| anyhow!("bad dx in {spec:?}"))?,
    ))
}

fn parse_generate(spec: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = spec.split('x').collect();
    if parts.len() != 3 {
        bail!("--generate expects <n>x<width>x<height>, got {spec:?}");
    }
    let parse = |s: &str, what: &str| -> Result<usize> {
        s.parse().map_err(|_| anyhow!("bad {what} in {spec:?}"))
    };
    Ok((
        parse(parts[0], "count")?,
        parse(parts[1], "width")?,
        parse(parts[2], "height")?,
    ))
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode> {
    let seed = args
        .seed
        .or_else(|| {
            std::env::var("MASKFORGE_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);

    let mut fixture: OverlapFixture = if let Some(genspec) = &args.generate {
        let (n, w, h) = parse_generate(genspec)?;
        if !args.rotate.is_empty() || !args.offset.is_empty() {
            let prints: Vec<GrayImage> = (0..n)
                .map(|i| {
                    let side_w = w * 5 / 8;
                    let side_h = h * 7 / 8;
                    synthetic_print(side_w, side_h, 9 + i, (37.0 + 67.0 * i as f64) % 180.0,
                        seed.wrapping_add(i as u64))
                })
                .collect();
            compose_explicit(&prints, &args, (w, h))?
        } else {
            generate_fixture(seed, n, (w, h))?
        }
    } else if !args.prints.is_empty() {
        let prints: Vec<GrayImage> = args
            .prints
            .iter()
            .map(|p| read_gray(p))
            .collect::<Result<_>>()?;
        let canvas = prints
            .iter()
            .fold((0usize, 0usize), |acc, p| {
                (acc.0.max(p.width() * 2), acc.1.max(p.height() * 2))
            });
        compose_explicit(&prints, &args, canvas)?
    } else {
        bail!("synth needs --prints or --generate");
    };

    if let Some(spec) = &args.noise {
        fixture.apply_noise(parse_noise(spec)?, seed);
    }
    fixture.params.seed = seed;
    save_fixture(&args.out, &fixture)?;
    println!(
        "fixture with {} prints written to {} (degenerate: {})",
        fixture.gt_components.len(),
        args.out.display(),
        fixture.params.degenerate
    );
    Ok(ExitCode::SUCCESS)
}

fn compose_explicit(
    prints: &[GrayImage],
    args: &SynthArgs,
    canvas: (usize, usize),
) -> Result<OverlapFixture> {
    let n = prints.len();
    let rotations: Vec<f64> = if args.rotate.is_empty() {
        vec![0.0; n]
    } else if args.rotate.len() == n {
        args.rotate.clone()
    } else {
        bail!("--rotate needs {n} comma-separated angles");
    };
    let offsets: Vec<(i32, i32)> = if args.offset.is_empty() {
        // spread horizontally so neighbors overlap
        let step = (canvas.0 / (n + 1)) as i32 / 2;
        (0..n)
            .map(|i| (0, (i as i32 - (n as i32 - 1) / 2) * step))
            .collect()
    } else if args.offset.len() == n {
        args.offset
            .iter()
            .map(|s| parse_offset(s))
            .collect::<Result<_>>()?
    } else {
        bail!("--offset needs {n} comma-separated dy:dx pairs");
    };
    Ok(compose_overlap(prints, &rotations, &offsets, canvas)?)
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode> {
    let cfg = load_config(&args.config)?;
    let mut dirs: Vec<PathBuf> = fs::read_dir(&args.fixtures)
        .with_context(|| format!("reading {}", args.fixtures.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir() && p.join("image.pgm").exists())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        bail!("no fixtures under {}", args.fixtures.display());
    }

    let mut fixtures = Vec::new();
    for dir in &dirs {
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let fx = load_fixture(dir).with_context(|| format!("loading {}", dir.display()))?;
        fixtures.push((name, fx));
    }

    let jobs = args.jobs.unwrap_or(1);
    let report = eval::evaluate_all(&fixtures, &cfg, jobs);
    fs::write(&args.out, serde_json::to_vec_pretty(&report)?)?;
    println!(
        "{} fixtures: {} ok, {} failed; median runtime {} ms; report at {}",
        report.fixtures.len(),
        report.aggregate.ok_count,
        report.aggregate.error_count,
        report
            .aggregate
            .median_runtime_ms
            .map(|m| m.to_string())
            .unwrap_or_else(|| "n/a".into()),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
