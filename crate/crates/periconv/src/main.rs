//! Command-line front end: convolve/cross-correlate image files, dump and
//! invert the periodic transform, print cost reports and trade-off tables,
//! and run the self-check suites.
//!
//! Human-readable summaries go to standard error as one JSON line; the
//! machine payload goes to `--out` or standard output. Exit codes:
//! 0 success, 2 usage error, 3 data error, 4 validation failure.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use periconv::{
    pgm, textio, unsigned_bits_for, validate, AppError, AppResult, Backend, ConvRequest,
    ConvResult, KernelData,
};
use periconv_core::{
    cost, dprt, modular, ArchConfig, ImageBlock, Kernel, Method, Mode, ResourceAxis,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "periconv",
    version,
    about = "Exact 2D convolution and cross-correlation through a periodic \
             transform over prime-sized grids, with low-rank approximation \
             and hardware cost reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convolve or cross-correlate an image with a kernel
    Convolve(ConvolveArgs),
    /// Forward periodic transform of a square image (CSV dump, N+1 rows)
    Dprt(TransformArgs),
    /// Invert a transform dump back to the original image
    Idprt(InverseArgs),
    /// Cycle and resource report for one architecture configuration (JSON)
    Cost(CostArgs),
    /// Non-dominated cycles-versus-resource table for a scalable method (CSV)
    Pareto(ParetoArgs),
    /// Run the seeded self-check suites
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Linear convolution
    Conv,
    /// Cross-correlation (kernel flipped on both axes)
    Xcorr,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    /// Exact transform-domain pipeline
    Dprt,
    /// Exact spatial-domain sums (oracle)
    Direct,
    /// Floating-point low-rank separable approximation
    Rank,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Pgm,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FloatModelArg {
    /// Lookup-calibrated: 32 one-bit adds per float adder, 4.4 fixed
    /// multipliers per float multiplier
    Table,
    /// Synthesis-derived: 320 one-bit adds per float adder
    Synthesis,
}

#[derive(Args)]
struct ConvolveArgs {
    /// Image file: PGM (P2/P5) or CSV of nonnegative integers
    #[arg(long)]
    image: PathBuf,
    /// Kernel file: CSV, integer or real entries
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Conv)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Dprt)]
    backend: BackendArg,
    /// Separable terms kept by the rank backend (default: numerical rank)
    #[arg(long)]
    rank: Option<usize>,
    /// Overlap-add block size (tiles the image; identical output)
    #[arg(long)]
    block: Option<usize>,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct TransformArgs {
    /// Image file: PGM or CSV of nonnegative integers
    #[arg(long)]
    input: PathBuf,
    /// Zero-pad a non-square or non-prime image up to the next prime size
    #[arg(long)]
    pad_to_prime: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InverseArgs {
    /// Transform dump: CSV with N+1 rows of N columns
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    /// One of: fastconv, fastscaleconv, fastrankconv, sersys, scasys,
    /// sliwin, fftr2
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Transform size (prime for the transform methods; power of two for
    /// fftr2)
    #[arg(long = "N")]
    n: Option<u64>,
    /// Kernel/block size
    #[arg(long = "P")]
    p: Option<u64>,
    /// Parallel section count (fastscaleconv: divides N+1; fastrankconv:
    /// divides gcd(P, N) or equals N)
    #[arg(long = "J")]
    j: Option<u64>,
    /// Row-memory ports for the scalable transform (default: min(J, N))
    #[arg(long = "H")]
    h: Option<u64>,
    /// Separable terms for fastrankconv
    #[arg(long)]
    rank: Option<u64>,
    /// Column tiling of the scalable systolic array (power of two)
    #[arg(long = "PA")]
    pa: Option<u64>,
    /// Row tiling of the scalable systolic array (default: P / PA)
    #[arg(long = "PB")]
    pb: Option<u64>,
    /// Butterflies fed per cycle in the transform-multiply pipeline (2 or 4)
    #[arg(long = "D")]
    d: Option<u64>,
    /// Datapath word width
    #[arg(long, default_value_t = 12)]
    data_bits: u32,
    /// Input pixel width
    #[arg(long, default_value_t = 8)]
    image_bits: u32,
    /// How floating-point resources are converted to fixed-point equivalents
    #[arg(long, value_enum, default_value_t = FloatModelArg::Table)]
    float_model: FloatModelArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParetoArgs {
    /// fastscaleconv (sweeps J over divisors of N+1) or fastrankconv
    /// (sweeps J over divisors shared with the kernel size, plus N)
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Transform size (fastscaleconv)
    #[arg(long = "N")]
    n: Option<u64>,
    /// Kernel size (fastrankconv; the transform size becomes 2P-1)
    #[arg(long = "P")]
    p: Option<u64>,
    /// Separable terms (fastrankconv; default 1)
    #[arg(long)]
    rank: Option<u64>,
    /// Resource to trade against cycles: flipflops, adds, multipliers,
    /// or memory
    #[arg(long, value_parser = parse_axis)]
    axis: ResourceAxis,
    #[arg(long, default_value_t = 12)]
    data_bits: u32,
    #[arg(long, default_value_t = 8)]
    image_bits: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// RNG seed; a fixed seed reproduces the report byte for byte
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Largest transform size exercised by the roundtrip suite
    #[arg(long, default_value_t = 101)]
    max_size: usize,
    /// Push a tampered transform through the pipeline; the divisibility
    /// suite is then expected to fail (demonstrates the designed failure)
    #[arg(long)]
    inject_corruption: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
        format!("unknown method '{s}' (expected one of: {})", names.join(", "))
    })
}

fn parse_axis(s: &str) -> Result<ResourceAxis, String> {
    ResourceAxis::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ResourceAxis::ALL.iter().map(|a| a.name()).collect();
        format!("unknown axis '{s}' (expected one of: {})", names.join(", "))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Convolve(args) => cmd_convolve(args),
        Command::Dprt(args) => cmd_dprt(args),
        Command::Idprt(args) => cmd_idprt(args),
        Command::Cost(args) => cmd_cost(args),
        Command::Pareto(args) => cmd_pareto(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn read_file(path: &Path) -> AppResult<Vec<u8>> {
    std::fs::read(path).map_err(|err| AppError::Io { path: path.display().to_string(), err })
}

fn read_text(path: &Path) -> AppResult<String> {
    String::from_utf8(read_file(path)?).map_err(|_| AppError::Parse {
        context: path.display().to_string(),
        msg: String::from("file is not valid UTF-8"),
    })
}

fn write_payload(out: &Option<PathBuf>, bytes: &[u8]) -> AppResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|err| AppError::Io { path: path.display().to_string(), err }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(|err| AppError::Io { path: String::from("<stdout>"), err })
        }
    }
}

/// Loads a PGM or nonnegative-integer CSV file as an image.
fn load_image(path: &Path) -> AppResult<ImageBlock> {
    let context = path.display().to_string();
    let bytes = read_file(path)?;
    if pgm::looks_like_pgm(&bytes) {
        let img = pgm::read_pgm(&context, &bytes)?;
        let bits = unsigned_bits_for(&[img.maxval as i128]);
        let data = img.pixels.iter().map(|&p| p as i128).collect();
        return ImageBlock::new(img.rows, img.cols, bits, data).map_err(AppError::from);
    }
    let text = String::from_utf8(bytes).map_err(|_| AppError::Parse {
        context: context.clone(),
        msg: String::from("not a PGM file and not UTF-8 CSV"),
    })?;
    let (rows, cols, data) = textio::parse_int_matrix(&context, &text)?;
    if let Some(&neg) = data.iter().find(|&&v| v < 0) {
        return Err(AppError::Parse {
            context,
            msg: format!("image entries must be nonnegative, found {neg}"),
        });
    }
    let bits = unsigned_bits_for(&data);
    ImageBlock::new(rows, cols, bits, data).map_err(AppError::from)
}

/// Loads a CSV kernel; integer files stay exact, real files go to the
/// low-rank backend.
fn load_kernel(path: &Path) -> AppResult<KernelData> {
    let context = path.display().to_string();
    let bytes = read_file(path)?;
    if pgm::looks_like_pgm(&bytes) {
        return Err(AppError::Parse {
            context,
            msg: String::from("kernels are CSV only (integer or real entries)"),
        });
    }
    let text = String::from_utf8(bytes).map_err(|_| AppError::Parse {
        context: context.clone(),
        msg: String::from("file is not valid UTF-8"),
    })?;
    let (rows, cols, values, integral) = textio::parse_real_matrix(&context, &text)?;
    if integral {
        let data: Vec<i128> = values.iter().map(|&v| v as i128).collect();
        let bits = periconv::signed_bits_for(&data);
        Ok(KernelData::Exact(Kernel::new(rows, cols, bits, data)?))
    } else {
        Ok(KernelData::Real { rows, cols, data: values })
    }
}

fn cmd_convolve(args: ConvolveArgs) -> AppResult<()> {
    if args.rank.is_some() && !matches!(args.backend, BackendArg::Rank) {
        return Err(AppError::Usage(String::from("--rank only applies to --backend rank")));
    }
    if args.block == Some(0) {
        return Err(AppError::Usage(String::from("--block must be at least 1")));
    }
    let image = load_image(&args.image)?;
    let kernel = load_kernel(&args.kernel)?;
    let mode = match args.mode {
        ModeArg::Conv => Mode::Convolution,
        ModeArg::Xcorr => Mode::CrossCorrelation,
    };
    let backend = match args.backend {
        BackendArg::Dprt => Backend::Dprt,
        BackendArg::Direct => Backend::Direct,
        BackendArg::Rank => Backend::LowRank { rank: args.rank },
    };
    let request = ConvRequest { image, kernel, mode, backend, block: args.block };
    let outcome = request.run()?;

    let mode_name = match args.mode {
        ModeArg::Conv => "conv",
        ModeArg::Xcorr => "xcorr",
    };
    let backend_name = match args.backend {
        BackendArg::Dprt => "dprt",
        BackendArg::Direct => "direct",
        BackendArg::Rank => "rank",
    };
    let (payload, summary) = match &outcome {
        ConvResult::Exact { result, n, budget } => {
            let payload = match args.format {
                FormatArg::Csv => {
                    textio::format_int_csv(result.rows(), result.cols(), result.as_slice())
                        .into_bytes()
                }
                FormatArg::Pgm => {
                    let max = result.as_slice().iter().copied().max().unwrap_or(0);
                    let min = result.as_slice().iter().copied().min().unwrap_or(0);
                    if min < 0 || max > 65_535 {
                        return Err(AppError::Parse {
                            context: String::from("pgm output"),
                            msg: format!(
                                "result range [{min}, {max}] does not fit 16-bit grayscale"
                            ),
                        });
                    }
                    let img = pgm::PgmImage {
                        rows: result.rows(),
                        cols: result.cols(),
                        maxval: (max as u32).max(1),
                        pixels: result.as_slice().iter().map(|&v| v as u32).collect(),
                    };
                    pgm::write_pgm(&img, true)
                }
                FormatArg::Json => {
                    let mut text = serde_json::to_string_pretty(&json!({
                        "rows": result.rows(),
                        "cols": result.cols(),
                        "transform_size": n,
                        "data": rows_of(result.as_slice(), result.cols()),
                    }))
                    .expect("json");
                    text.push('\n');
                    text.into_bytes()
                }
            };
            let summary = json!({
                "command": "convolve",
                "mode": mode_name,
                "backend": backend_name,
                "rows": result.rows(),
                "cols": result.cols(),
                "transform_size": n,
                "block": args.block,
                "bit_budget": budget,
                "result_bits": result.bits(),
            });
            (payload, summary)
        }
        ConvResult::Approximate { rows, cols, data, rank, frob_error, dropped_sigma } => {
            let payload = match args.format {
                FormatArg::Csv => textio::format_real_csv(*rows, *cols, data).into_bytes(),
                FormatArg::Pgm => {
                    return Err(AppError::Parse {
                        context: String::from("pgm output"),
                        msg: String::from(
                            "the rank backend emits real numbers; pgm needs nonnegative integers (use csv or json)",
                        ),
                    })
                }
                FormatArg::Json => {
                    let mut text = serde_json::to_string_pretty(&json!({
                        "rows": rows,
                        "cols": cols,
                        "rank": rank,
                        "frob_error": frob_error,
                        "data": rows_of_f64(data, *cols),
                    }))
                    .expect("json");
                    text.push('\n');
                    text.into_bytes()
                }
            };
            let summary = json!({
                "command": "convolve",
                "mode": mode_name,
                "backend": backend_name,
                "rows": rows,
                "cols": cols,
                "rank": rank,
                "frob_error": frob_error,
                "dropped_sigma": dropped_sigma,
                "block": args.block,
            });
            (payload, summary)
        }
    };
    write_payload(&args.out, &payload)?;
    eprintln!("{summary}");
    Ok(())
}

fn rows_of(data: &[i128], cols: usize) -> Vec<Vec<i128>> {
    data.chunks(cols.max(1)).map(|chunk| chunk.to_vec()).collect()
}

fn rows_of_f64(data: &[f64], cols: usize) -> Vec<Vec<f64>> {
    data.chunks(cols.max(1)).map(|chunk| chunk.to_vec()).collect()
}

fn cmd_dprt(args: TransformArgs) -> AppResult<()> {
    let img = load_image(&args.input)?;
    let (rows, cols) = (img.rows(), img.cols());
    let ready = rows == cols && modular::is_prime(rows as u64);
    let img = if ready {
        img
    } else if args.pad_to_prime {
        let target = modular::next_prime(rows.max(cols) as u64) as usize;
        dprt::zero_pad(&img, target)?
    } else {
        return Err(AppError::Parse {
            context: args.input.display().to_string(),
            msg: format!(
                "input is {rows}x{cols}; the transform needs a square image of prime size \
                 (pass --pad-to-prime to zero-pad)"
            ),
        });
    };
    let transform = dprt::forward(&img)?;
    let n = transform.n();
    let flat: Vec<i128> = (0..=n).flat_map(|m| transform.direction(m).to_vec()).collect();
    write_payload(&args.out, textio::format_int_csv(n + 1, n, &flat).as_bytes())?;
    eprintln!(
        "{}",
        json!({
            "command": "dprt",
            "transform_size": n,
            "directions": n + 1,
            "bits": transform.bits(),
            "total_mass": transform.total(),
            "padded": !ready,
        })
    );
    Ok(())
}

fn cmd_idprt(args: InverseArgs) -> AppResult<()> {
    let context = args.input.display().to_string();
    let text = read_text(&args.input)?;
    let (rows, cols, data) = textio::parse_int_matrix(&context, &text)?;
    if cols == 0 || rows != cols + 1 {
        return Err(AppError::Parse {
            context,
            msg: format!("a transform dump has N+1 rows of N columns; got {rows}x{cols}"),
        });
    }
    let bits = periconv::signed_bits_for(&data);
    let transform = periconv_core::DprtArray::from_raw(cols, bits, data)?;
    let img = dprt::inverse(&transform)?;
    write_payload(&args.out, textio::format_int_csv(img.rows(), img.cols(), img.as_slice()).as_bytes())?;
    eprintln!(
        "{}",
        json!({
            "command": "idprt",
            "transform_size": cols,
            "rows": img.rows(),
            "cols": img.cols(),
        })
    );
    Ok(())
}

fn require(method: Method, flag: &str, value: Option<u64>) -> AppResult<u64> {
    value.ok_or_else(|| AppError::Usage(format!("--method {} requires --{flag}", method.name())))
}

fn cmd_cost(args: CostArgs) -> AppResult<()> {
    let method = args.method;
    let mut cfg = match method {
        Method::FastConv => ArchConfig::fast_conv(require(method, "N", args.n)?),
        Method::FastScaleConv => {
            let n = require(method, "N", args.n)?;
            let j = require(method, "J", args.j)?;
            ArchConfig::fast_scale_conv(n, j, args.h.unwrap_or_else(|| j.min(n)))
        }
        Method::FastRankConv => {
            let p = require(method, "P", args.p)?;
            let j = require(method, "J", args.j)?;
            let mut cfg = ArchConfig::fast_rank_conv(p, j, args.rank.unwrap_or(1));
            if let Some(n) = args.n {
                cfg.n = n;
            }
            cfg
        }
        Method::SerSys => ArchConfig::ser_sys(require(method, "P", args.p)?),
        Method::ScaSys => {
            let p = require(method, "P", args.p)?;
            let pa = require(method, "PA", args.pa)?;
            let pb = args.pb.unwrap_or(if pa == 0 { 0 } else { p / pa });
            ArchConfig::sca_sys(p, pa, pb)
        }
        Method::SliWin => ArchConfig::sli_win(require(method, "P", args.p)?),
        Method::Fftr2 => ArchConfig::fftr2(require(method, "N", args.n)?, args.d.unwrap_or(2)),
    };
    cfg.data_bits = args.data_bits;
    cfg.image_bits = args.image_bits;
    cfg.float_model = match args.float_model {
        FloatModelArg::Table => cost::FloatCostModel::table_calibrated(),
        FloatModelArg::Synthesis => cost::FloatCostModel::synthesis_ratios(),
    };
    let report = cost::cost(&cfg).map_err(|e| AppError::Usage(e.to_string()))?;
    let mut payload = serde_json::to_string_pretty(&report).expect("json");
    payload.push('\n');
    write_payload(&args.out, payload.as_bytes())?;
    eprintln!(
        "{}",
        json!({
            "command": "cost",
            "method": method.name(),
            "cycles": report.cycles,
            "flipflops": report.flipflops,
            "onebit_adds": report.onebit_adds,
            "multipliers": report.multipliers,
            "memory_bits": report.memory_bits,
        })
    );
    Ok(())
}

fn cmd_pareto(args: ParetoArgs) -> AppResult<()> {
    let method = args.method;
    let mut base = match method {
        Method::FastScaleConv => {
            let n = require(method, "N", args.n)?;
            ArchConfig::fast_scale_conv(n, 1, 1)
        }
        Method::FastRankConv => {
            let p = require(method, "P", args.p)?;
            ArchConfig::fast_rank_conv(p, 1, args.rank.unwrap_or(1))
        }
        other => {
            return Err(AppError::Usage(format!(
                "pareto sweeps exist for the scalable methods (fastscaleconv, fastrankconv), \
                 not {}",
                other.name()
            )))
        }
    };
    base.data_bits = args.data_bits;
    base.image_bits = args.image_bits;
    let front =
        cost::pareto::pareto_front(&base, args.axis).map_err(|e| AppError::Usage(e.to_string()))?;
    let mut csv = String::from("J,H,cycles,resource\n");
    for point in &front {
        let h = match method {
            Method::FastScaleConv => point.config.h.to_string(),
            _ => String::new(),
        };
        csv.push_str(&format!("{},{},{},{}\n", point.config.j, h, point.cycles, point.resource));
    }
    write_payload(&args.out, csv.as_bytes())?;
    eprintln!(
        "{}",
        json!({
            "command": "pareto",
            "method": method.name(),
            "axis": args.axis.name(),
            "points": front.len(),
        })
    );
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> AppResult<()> {
    if args.max_size < 2 {
        return Err(AppError::Usage(String::from("--max-size must be at least 2")));
    }
    if args.max_size > dprt::MAX_TRANSFORM_SIZE {
        return Err(AppError::Usage(format!(
            "--max-size exceeds the supported transform size {}",
            dprt::MAX_TRANSFORM_SIZE
        )));
    }
    let report = validate::run(args.seed, args.max_size, args.inject_corruption);
    write_payload(&args.out, report.render().as_bytes())?;
    let failed: Vec<&str> =
        report.suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
    eprintln!(
        "{}",
        json!({
            "command": "validate",
            "seed": args.seed,
            "max_size": args.max_size,
            "passed": report.all_passed(),
            "failed_suites": failed,
        })
    );
    if report.all_passed() {
        Ok(())
    } else {
        Err(AppError::Validation(format!(
            "{} of {} suites failed",
            failed.len(),
            report.suites.len()
        )))
    }
}
