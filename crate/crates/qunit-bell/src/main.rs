use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qunit_bell::survey::ReportFormat;
use qunit_bell::{
    bell_max, bell_value_general, classical_limit_scan, correlation, correlation_poly,
    distinct_correlations, fingerprint, sample_survey, survey, wigner_d_squared, Error, MaskFamily,
    ParityMask, Result, SampleSpec, SpinLabel, SurveyReport, DEFAULT_GRID_POINTS,
    DEFAULT_REFINE_TOL,
};

/// Bell-inequality surveys for spin-s singlets with parity-bit observables.
#[derive(Parser)]
#[command(name = "qunit-bell", version, about)]
struct Cli {
    /// Spin as an integer or half-integer fraction, e.g. `2` or `3/2`.
    #[arg(long, global = true)]
    spin: Option<String>,

    /// Doubled spin; `--two-s 3` is spin 3/2. Alternative to --spin.
    #[arg(long, global = true)]
    two_s: Option<u32>,

    /// Grid points for the theta scan over (0, pi].
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,

    /// Golden-section refinement tolerance in radians.
    #[arg(long, global = true, default_value_t = DEFAULT_REFINE_TOL)]
    tol: f64,

    /// Worker threads, or `auto` for one per core.
    #[arg(long, global = true, default_value = "auto")]
    threads: String,

    /// Seed for sampled surveys.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the squared d-matrix table |d^s_{m',n}(theta)|^2.
    Dmat {
        /// Rotation angle in radians.
        #[arg(long)]
        theta: f64,
    },
    /// Describe one parity mask: bits, signs, trace, tensor overlaps.
    Mask(MaskArgs),
    /// Evaluate a correlation function at an angle, as a polynomial, or as
    /// its dedup fingerprint.
    Corr {
        #[arg(long)]
        p: u64,
        #[arg(long, conflicts_with_all = ["poly", "fingerprint"])]
        theta: Option<f64>,
        #[arg(long, conflicts_with = "fingerprint")]
        poly: bool,
        #[arg(long)]
        fingerprint: bool,
    },
    /// Group all canonical masks of a spin by correlation function.
    Dedupe,
    /// Maximize the Bell function for one mask.
    Max(MaxArgs),
    /// Survey a whole spin (exhaustive) or a sampled mask set.
    Survey {
        /// Add this many randomly drawn canonical masks (sampled mode).
        #[arg(long)]
        sample: Option<usize>,
        /// Comma-separated explicit mask integers (sampled mode).
        #[arg(long, value_delimiter = ',')]
        include: Vec<u64>,
    },
    /// Track one mask family across a ladder of dimensions.
    Classical {
        #[arg(long)]
        family: String,
        /// Comma-separated doubled spins, e.g. 3,9,19,29,39,49.
        #[arg(long, value_delimiter = ',')]
        two_s_list: Vec<u32>,
    },
}

#[derive(Args)]
struct MaskArgs {
    #[arg(long)]
    p: u64,
}

#[derive(Args)]
struct MaxArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value = "planar")]
    geometry: String,
    /// Four pair angles for --geometry free: ab,ab',a'b,a'b'.
    #[arg(long, value_delimiter = ',')]
    angles: Vec<f64>,
}

fn spin_from(cli: &Cli) -> Result<SpinLabel> {
    match (&cli.spin, cli.two_s) {
        (Some(text), None) => SpinLabel::from_str(text),
        (None, Some(two_s)) => SpinLabel::from_two_s(two_s),
        (Some(_), Some(_)) => Err(Error::BadArguments(
            "pass either --spin or --two-s, not both".to_string(),
        )),
        (None, None) => Err(Error::BadArguments("missing --spin (or --two-s)".to_string())),
    }
}

fn print_or_write(cli: &Cli, body: String) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, body).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            println!("{}", body.trim_end_matches('\n'));
            Ok(())
        }
    }
}

fn fraction_label(two_m: i32) -> String {
    if two_m % 2 == 0 {
        format!("{}", two_m / 2)
    } else {
        format!("{}/2", two_m)
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Dmat { theta } => {
            let spin = spin_from(cli)?;
            let table = wigner_d_squared(spin, *theta)?;
            let n = spin.dimension();
            // rows labeled by m' descending from +s
            let body = match cli.format {
                Format::Csv => {
                    let mut out = String::from("m_prime");
                    for c in 0..n {
                        out.push_str(&format!(
                            ",{}",
                            fraction_label(2 * c as i32 - spin.two_s() as i32)
                        ));
                    }
                    out.push('\n');
                    for r in (0..n).rev() {
                        out.push_str(&fraction_label(2 * r as i32 - spin.two_s() as i32));
                        for c in 0..n {
                            out.push_str(&format!(",{:.16e}", table.entry(r, c)));
                        }
                        out.push('\n');
                    }
                    out
                }
                Format::Json => {
                    let rows: Vec<Vec<f64>> = (0..n)
                        .rev()
                        .map(|r| (0..n).map(|c| table.entry(r, c)).collect())
                        .collect();
                    let labels: Vec<String> = (0..n)
                        .rev()
                        .map(|r| fraction_label(2 * r as i32 - spin.two_s() as i32))
                        .collect();
                    serde_json::to_string_pretty(&json!({
                        "spin": spin,
                        "theta": theta,
                        "row_m_prime_descending": labels,
                        "sq": rows,
                    }))
                    .expect("serializes")
                }
            };
            print_or_write(cli, body)
        }
        Command::Mask(args) => {
            let spin = spin_from(cli)?;
            let mask = ParityMask::from_integer(spin, args.p)?;
            let bits: Vec<u8> = (0..spin.dimension())
                .map(|r| ((args.p >> r) & 1) as u8)
                .collect();
            let labels: Vec<String> = spin.two_m_values().map(fraction_label).collect();
            let mut overlaps = serde_json::Map::new();
            for k in 1..=spin.two_s().min(6) {
                overlaps.insert(format!("k{k}"), json!(mask.tensor_overlap(k)?));
            }
            let body = serde_json::to_string_pretty(&json!({
                "spin": spin,
                "p": args.p,
                "m_ascending": labels,
                "bits": bits,
                "signs": mask.signs(),
                "trace": mask.identity_overlap(),
                "tensor_overlaps": overlaps,
            }))
            .expect("serializes");
            print_or_write(cli, body)
        }
        Command::Corr {
            p,
            theta,
            poly,
            fingerprint: want_fingerprint,
        } => {
            let spin = spin_from(cli)?;
            let mask = ParityMask::from_integer(spin, *p)?;
            let body = if *poly {
                let poly = correlation_poly(&mask)?;
                serde_json::to_string_pretty(&json!({
                    "spin": spin, "p": p, "cos_poly_coeffs": poly.coeffs,
                }))
                .expect("serializes")
            } else if *want_fingerprint {
                let fp = fingerprint(&mask)?;
                serde_json::to_string_pretty(&json!({
                    "spin": spin, "p": p, "fingerprint": fp.values,
                }))
                .expect("serializes")
            } else {
                let theta = theta.ok_or_else(|| {
                    Error::BadArguments("corr needs --theta, --poly, or --fingerprint".to_string())
                })?;
                let value = correlation(&mask, theta)?;
                serde_json::to_string_pretty(&json!({
                    "spin": spin, "p": p, "theta": theta, "correlation": value,
                }))
                .expect("serializes")
            };
            print_or_write(cli, body)
        }
        Command::Dedupe => {
            let spin = spin_from(cli)?;
            let groups = distinct_correlations(spin)?;
            let body = serde_json::to_string_pretty(&json!({
                "spin": spin,
                "groups": groups.groups,
                "count": groups.distinct_count(),
                "min_separation": groups.min_separation,
            }))
            .expect("serializes");
            print_or_write(cli, body)
        }
        Command::Max(args) => {
            let spin = spin_from(cli)?;
            let mask = ParityMask::from_integer(spin, args.p)?;
            let body = match args.geometry.as_str() {
                "planar" => {
                    let result = bell_max(&mask, cli.grid, cli.tol)?;
                    serde_json::to_string_pretty(&result).expect("serializes")
                }
                "free" => {
                    let angles: [f64; 4] = args.angles.clone().try_into().map_err(|_| {
                        Error::BadArguments("--geometry free needs --angles a,b,c,d".to_string())
                    })?;
                    let value = bell_value_general(&mask, angles)?;
                    serde_json::to_string_pretty(&json!({
                        "spin": spin, "p": args.p, "geometry": "free",
                        "angles": angles, "b": value, "violates": value > 2.0,
                    }))
                    .expect("serializes")
                }
                other => return Err(Error::BadArguments(format!("unknown geometry `{other}`"))),
            };
            print_or_write(cli, body)
        }
        Command::Survey { sample, include } => {
            let spin = spin_from(cli)?;
            let report = if sample.is_some() || !include.is_empty() {
                let spec = SampleSpec {
                    count: sample.unwrap_or(0),
                    seed: cli.seed.unwrap_or(0),
                    include: include.clone(),
                };
                sample_survey(spin, &spec, cli.grid, cli.tol)?
            } else {
                survey(spin, cli.grid, cli.tol)?
            };
            emit_report(cli, &report)
        }
        Command::Classical { family, two_s_list } => {
            let family: MaskFamily = family.parse()?;
            let spins = two_s_list
                .iter()
                .map(|&t| SpinLabel::from_two_s(t))
                .collect::<Result<Vec<_>>>()?;
            let records = classical_limit_scan(family, &spins, cli.grid, cli.tol)?;
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&json!({
                    "family": family.name(),
                    "records": records,
                }))
                .expect("serializes"),
                Format::Csv => {
                    let mut out = String::from("N,P,theta_star,b_max,violates\n");
                    for r in &records {
                        out.push_str(&format!(
                            "{},{},{:.16e},{:.16e},{}\n",
                            r.dimension, r.p, r.theta_star, r.b_max, r.violates
                        ));
                    }
                    out
                }
            };
            print_or_write(cli, body)
        }
    }
}

fn emit_report(cli: &Cli, report: &SurveyReport) -> Result<()> {
    let body = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.out {
        Some(path) => qunit_bell::emit(
            report,
            path,
            if cli.format == Format::Csv {
                ReportFormat::Csv
            } else {
                ReportFormat::Json
            },
        ),
        None => {
            println!("{}", body.trim_end_matches('\n'));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = || match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    };
    match cli.threads.as_str() {
        "auto" => worker(),
        text => match text.parse::<usize>() {
            Ok(n) if n > 0 => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
                .install(worker),
            _ => {
                eprintln!("error: --threads must be a positive integer or `auto`");
                ExitCode::from(2)
            }
        },
    }
}
