//! `mahonian` command-line front end.
//!
//! Every subcommand writes one JSON document (default) or CSV table to
//! stdout, to `--out`, or to `$MAHONIAN_OUT_DIR/<subcommand>.<ext>`.
//! Exit status: 0 success, 1 a check failed, 2 usage or parameter error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mahonian::analysis::{self, CurveReport};
use mahonian::checks::{self, CheckOutcome};
use mahonian::dist::{self, MomentReport, PmfRecord};
use mahonian::qpoly::{self, PolyRecord};
use mahonian::sampler::{self, BatchStats, SampleStream};
use mahonian::{Composition, ExactPmf, DEFAULT_SEED};
use serde_json::{json, Value};

/// Largest word length accepted by the exact subcommands.
const MAX_EXACT_N: usize = 512;
/// Largest alphabet accepted by the exact subcommands.
const MAX_M: u32 = 1024;
/// Largest path length for the exhaustive bijection sweep (2^n paths).
const MAX_BIJECTION_N: usize = 22;
/// Largest word length for sampling.
const MAX_SAMPLE_N: usize = 1_000_000;
/// Largest number of Monte Carlo replicates.
const MAX_REPS: usize = 100_000_000;
/// Upper bound on `n · reps` letters drawn by one `sample` call.
const MAX_SAMPLE_LETTERS: u64 = 10_000_000_000;
/// Largest θ grid for `cf`.
const MAX_GRID: usize = 1 << 20;

#[derive(Parser, Debug)]
#[command(name = "mahonian", version, about = "Inversions in random words: exact laws, limits and samplers")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Output file; overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory receiving `<subcommand>.<ext>` when `--out` is absent.
    #[arg(long, env = "MAHONIAN_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Construction {
    Word,
    U,
    Ferrers,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Galois polynomial (--n --m), q-binomial (--n --k) or q-multinomial (--parts).
    Poly {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated composition, e.g. 2,2,1.
        #[arg(long, value_delimiter = ',')]
        parts: Option<Vec<usize>>,
    },
    /// Exact law of the inversion count of a uniform word (or permutation).
    Pmf {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "permutation")]
        m: Option<u32>,
        /// Inversions of a uniform permutation of n letters instead.
        #[arg(long)]
        permutation: bool,
    },
    /// Closed-form moments against the moments of the exact law.
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
    },
    /// Total variation distance to the permutation law, with its bound.
    Tv {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,5,50")]
        ms: Vec<u32>,
    },
    /// Local limit residuals for exact and leading-order moments.
    Llt {
        #[arg(long, value_delimiter = ',', default_value = "2,3,10")]
        ms: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        ns: Vec<usize>,
    },
    /// Kolmogorov distance to the normal law.
    Clt {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        ns: Vec<usize>,
    },
    /// Minimum normalised |characteristic function| on small and large θ.
    Cf {
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        ms: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = checks::CF_GRID)]
        grid: usize,
    },
    /// Exhaustive word/path/Ferrers bijection checks for every n <= --max-n.
    Bijections {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        /// Ferrers area moments are checked exactly up to this n.
        #[arg(long, default_value_t = 20)]
        moments_max_n: usize,
    },
    /// Monte Carlo batches from one of the equivalent constructions.
    Sample {
        #[arg(value_enum)]
        construction: Construction,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Emit summary statistics instead of per-replicate records.
        #[arg(long)]
        summary: bool,
    },
    /// Full acceptance sweep; exits 1 if any criterion fails.
    Report {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Include wall-clock seconds (makes the output non-reproducible).
        #[arg(long)]
        timings: bool,
    },
}

/// What went wrong, mapped to an exit status.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<mahonian::Error> for Failure {
    fn from(e: mahonian::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Output {
    body: String,
    passed: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Self { body, passed: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("mahonian: check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("mahonian: error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = execute(&cli.command, cli.format)?;
    write_output(cli, &out.body)?;
    if out.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} reported a failure", subcommand_name(&cli.command))))
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Poly { .. } => "poly",
        Command::Pmf { .. } => "pmf",
        Command::Moments { .. } => "moments",
        Command::Tv { .. } => "tv",
        Command::Llt { .. } => "llt",
        Command::Clt { .. } => "clt",
        Command::Cf { .. } => "cf",
        Command::Bijections { .. } => "bijections",
        Command::Sample { .. } => "sample",
        Command::Report { .. } => "report",
    }
}

fn write_output(cli: &Cli, body: &str) -> Result<(), Failure> {
    let path = match (&cli.out, &cli.out_dir) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
            dir.join(format!("{}.{}", subcommand_name(&cli.command), cli.format.extension()))
        }
        (None, None) => {
            print!("{body}");
            return Ok(());
        }
    };
    std::fs::write(&path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn check_range<T: PartialOrd + std::fmt::Display>(name: &str, v: T, lo: T, hi: T) -> Result<(), Failure> {
    if v < lo || v > hi {
        return Err(Failure::Usage(format!("--{name} = {v} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_grid<T: PartialOrd + std::fmt::Display + Copy>(name: &str, vs: &[T], lo: T, hi: T) -> Result<(), Failure> {
    if vs.is_empty() {
        return Err(Failure::Usage(format!("--{name} must list at least one value")));
    }
    vs.iter().try_for_each(|&v| check_range(name, v, lo, hi))
}

fn json_line(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn execute(cmd: &Command, format: Format) -> Result<Output, Failure> {
    match cmd {
        Command::Poly { n, m, k, parts } => poly(*n, *m, *k, parts.as_deref(), format),
        Command::Pmf { n, m, permutation } => pmf(*n, *m, *permutation, format),
        Command::Moments { n, m } => moments(*n, *m, format),
        Command::Tv { n, ms } => {
            check_range("n", *n, 2, MAX_EXACT_N)?;
            check_grid("ms", ms, 1, MAX_M)?;
            let report = analysis::tv_curve::<f64>(*n, ms)?;
            let within = report
                .rows
                .iter()
                .all(|r| r.exact.get("within_bound").map(String::as_str) == Some("true"));
            let mut out = curve(&report, format);
            out.passed = within;
            Ok(out)
        }
        Command::Llt { ms, ns } => {
            check_grid("ms", ms, 2, MAX_M)?;
            check_grid("ns", ns, 2, MAX_EXACT_N)?;
            Ok(curve(&analysis::llt_curve::<f64>(ms, ns)?, format))
        }
        Command::Clt { m, ns } => {
            check_range("m", *m, 2, MAX_M)?;
            check_grid("ns", ns, 2, MAX_EXACT_N)?;
            Ok(curve(&analysis::clt_curve::<f64>(*m, ns)?, format))
        }
        Command::Cf { ms, ns, grid } => {
            check_grid("ms", ms, 2, MAX_M)?;
            check_grid("ns", ns, 2, MAX_EXACT_N)?;
            check_range("grid", *grid, 16, MAX_GRID)?;
            Ok(curve(&analysis::cf_curve::<f64>(ms, ns, *grid)?, format))
        }
        Command::Bijections { max_n, moments_max_n } => {
            if *max_n > MAX_BIJECTION_N {
                return Err(mahonian::Error::BudgetExceeded {
                    requested: format!("2^{} paths", max_n + 1),
                    budget: 1 << (MAX_BIJECTION_N + 1),
                }
                .into());
            }
            check_range("moments-max-n", *moments_max_n, 0, MAX_EXACT_N)?;
            let r = checks::bijections_up_to(*max_n, *moments_max_n)?;
            let body = match format {
                Format::Json => json_line(&r),
                Format::Csv => {
                    let mut s = String::from("max_n,moments_max_n,paths_checked,failures\n");
                    let _ = writeln!(s, "{},{},{},{}", r.max_n, r.moments_max_n, r.paths_checked, r.failures.len());
                    s
                }
            };
            Ok(Output { body, passed: r.passed() })
        }
        Command::Sample { construction, n, m, reps, seed, stream, summary } => {
            sample(*construction, *n, *m, *reps, SampleStream::new(*seed, *stream), *summary, format)
        }
        Command::Report { seed, timings } => {
            let outcomes = checks::run_all(*seed);
            for o in &outcomes {
                eprintln!("{o}");
            }
            let passed = outcomes.iter().all(|o| o.passed);
            Ok(Output { body: report_body(&outcomes, *seed, *timings, format), passed })
        }
    }
}

fn poly(n: Option<usize>, m: Option<u32>, k: Option<usize>, parts: Option<&[usize]>, format: Format) -> Result<Output, Failure> {
    let record = match (n, m, k, parts) {
        (None, None, None, Some(parts)) => {
            check_range("parts (total)", parts.iter().sum::<usize>(), 0, MAX_EXACT_N)?;
            let c = Composition::new(parts.to_vec())?;
            let mut r = PolyRecord::new(c.n(), c.m(), &qpoly::q_multinomial(&c));
            r.parts = Some(parts.to_vec());
            r
        }
        (Some(n), None, Some(k), None) => {
            check_range("n", n, 0, MAX_EXACT_N)?;
            let p = qpoly::q_binomial(n, k)?;
            let mut r = PolyRecord::new(n, 2, &p);
            r.parts = Some(vec![k, n - k]);
            r
        }
        (Some(n), Some(m), None, None) => {
            check_range("n", n, 0, MAX_EXACT_N)?;
            check_range("m", m, 1, MAX_M)?;
            PolyRecord::new(n, m as usize, &qpoly::galois_poly(n, m)?)
        }
        _ => {
            return Err(Failure::Usage(
                "poly takes exactly one of: --n N --m M, --n N --k K, or --parts P1,P2,...".into(),
            ))
        }
    };
    let body = match format {
        Format::Json => json_line(&record),
        Format::Csv => {
            let mut s = String::from("power,coeff\n");
            for (i, c) in record.coeffs.iter().enumerate() {
                let _ = writeln!(s, "{i},{c}");
            }
            s
        }
    };
    Ok(Output::ok(body))
}

fn pmf_csv(p: &ExactPmf) -> String {
    let mut s = String::from("k,numerator,probability\n");
    for (k, (num, prob)) in p.numerators().iter().zip(p.probabilities::<f64>()).enumerate() {
        let _ = writeln!(s, "{k},{num},{prob:.16e}");
    }
    s
}

fn pmf(n: usize, m: Option<u32>, permutation: bool, format: Format) -> Result<Output, Failure> {
    check_range("n", n, 0, MAX_EXACT_N)?;
    let p = if permutation {
        if m.is_some() {
            return Err(Failure::Usage("--permutation does not take --m".into()));
        }
        dist::permutation_inversion_pmf(n)
    } else {
        let m = m.expect("clap requires --m without --permutation");
        check_range("m", m, 1, MAX_M)?;
        dist::exact_pmf(n, m)?
    };
    let body = match format {
        Format::Json => json_line(&PmfRecord::new(None, None, &p)),
        Format::Csv => pmf_csv(&p),
    };
    Ok(Output::ok(body))
}

fn moments(n: usize, m: u32, format: Format) -> Result<Output, Failure> {
    check_range("n", n, 0, MAX_EXACT_N)?;
    check_range("m", m, 1, MAX_M)?;
    let r = MomentReport::compute(n, m)?;
    let body = match format {
        Format::Json => json_line(&r),
        Format::Csv => {
            let mut s = String::from("n,m,mean,variance,mean_from_pmf,variance_from_pmf,exact_equal\n");
            let frac = |x: &dist::RationalRecord| format!("{}/{}", x.num, x.den);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.n,
                r.m,
                frac(&r.closed_form.mean),
                frac(&r.closed_form.variance),
                frac(&r.from_pmf.mean),
                frac(&r.from_pmf.variance),
                r.exact_equal
            );
            s
        }
    };
    Ok(Output { body, passed: r.exact_equal })
}

fn curve(report: &CurveReport<f64>, format: Format) -> Output {
    Output::ok(match format {
        Format::Json => json_line(report),
        Format::Csv => report.to_csv(),
    })
}

fn sample(
    construction: Construction,
    n: usize,
    m: u32,
    reps: usize,
    stream: SampleStream,
    summary: bool,
    format: Format,
) -> Result<Output, Failure> {
    check_range("n", n, 1, MAX_SAMPLE_N)?;
    check_range("m", m, 1, MAX_M)?;
    check_range("reps", reps, 1, MAX_REPS)?;
    let letters = n as u64 * reps as u64;
    if letters > MAX_SAMPLE_LETTERS {
        return Err(mahonian::Error::BudgetExceeded {
            requested: format!("n * reps = {letters}"),
            budget: MAX_SAMPLE_LETTERS,
        }
        .into());
    }
    let meta = json!({
        "construction": format!("{construction:?}").to_lowercase(),
        "n": n,
        "m": m,
        "reps": reps,
        "master_seed": stream.master_seed(),
        "stream_index": stream.stream_index(),
    });
    let meta_line = format!(
        "# construction={} n={n} m={m} reps={reps} master_seed={} stream_index={}\n",
        meta["construction"].as_str().unwrap_or_default(),
        stream.master_seed(),
        stream.stream_index()
    );
    let body = match construction {
        Construction::Word => {
            let draws = sampler::batch_joint(n, m, reps, &stream)?;
            match (summary, format) {
                (true, Format::Json) => json_line(&json!({ "metadata": meta, "summary": BatchStats::from_joint(&draws) })),
                (true, Format::Csv) => {
                    let st = BatchStats::from_joint(&draws);
                    let mut s = meta_line + "count,mean,variance\n";
                    let _ = writeln!(s, "{},{:.16e},{:.16e}", st.count, st.mean, st.variance);
                    s
                }
                (false, Format::Json) => {
                    let records: Vec<Value> = draws.iter().map(|d| json!({ "V": d.v, "N": d.counts })).collect();
                    json_line(&json!({ "metadata": meta, "records": records }))
                }
                (false, Format::Csv) => sampler::joint_csv(&draws, n, m, &stream),
            }
        }
        Construction::U => {
            let draws = sampler::batch(reps, &stream, |rs| {
                let pairs = sampler::sample_upairs(n, m, rs).expect("validated parameters");
                sampler::u_statistic(&pairs).expect("finite draws")
            });
            integer_batch(&draws, "U", meta, meta_line, summary, format)
        }
        Construction::Ferrers => {
            if summary {
                let r = analysis::ferrers_joint_check(n, reps, &stream)?;
                match format {
                    Format::Json => json_line(&json!({ "metadata": meta, "summary": r })),
                    Format::Csv => {
                        let mut s = meta_line + "area_mean,area_variance,height_mean,height_variance,correlation\n";
                        let _ = writeln!(
                            s,
                            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                            r.area.mean, r.area.variance, r.height.mean, r.height.variance, r.correlation
                        );
                        s
                    }
                }
            } else {
                let draws = sampler::batch(reps, &stream, |rs| sampler::sample_ferrers(n, rs));
                match format {
                    Format::Json => {
                        let records: Vec<Value> = draws.iter().map(|d| json!({ "area": d.area, "height": d.height })).collect();
                        json_line(&json!({ "metadata": meta, "records": records }))
                    }
                    Format::Csv => {
                        let mut s = meta_line + "rep,area,height\n";
                        for (rep, d) in draws.iter().enumerate() {
                            let _ = writeln!(s, "{rep},{},{}", d.area, d.height);
                        }
                        s
                    }
                }
            }
        }
    };
    Ok(Output::ok(body))
}

fn integer_batch(draws: &[u64], name: &str, meta: Value, meta_line: String, summary: bool, format: Format) -> String {
    if summary {
        let st = mahonian::stats::Summary::of_iter(draws.iter().map(|&v| v as f64));
        return match format {
            Format::Json => json_line(&json!({ "metadata": meta, "summary": st })),
            Format::Csv => {
                let mut s = meta_line + "count,mean,variance\n";
                let _ = writeln!(s, "{},{:.16e},{:.16e}", st.count, st.mean, st.variance);
                s
            }
        };
    }
    match format {
        Format::Json => json_line(&json!({ "metadata": meta, "records": draws })),
        Format::Csv => {
            let mut s = meta_line + &format!("rep,{name}\n");
            for (rep, v) in draws.iter().enumerate() {
                let _ = writeln!(s, "{rep},{v}");
            }
            s
        }
    }
}

fn report_body(outcomes: &[CheckOutcome], seed: u64, timings: bool, format: Format) -> String {
    let passed = outcomes.iter().filter(|o| o.passed).count();
    match format {
        Format::Json => {
            let items: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    let mut v = serde_json::to_value(o).expect("serializable");
                    if !timings {
                        if let Some(obj) = v.as_object_mut() {
                            obj.remove("seconds");
                        }
                    }
                    v
                })
                .collect();
            json_line(&json!({
                "master_seed": seed,
                "passed": passed,
                "total": outcomes.len(),
                "criteria": items,
            }))
        }
        Format::Csv => {
            let mut s = format!("# master_seed={seed}\n");
            s.push_str(if timings { "id,kind,name,passed,seconds,detail\n" } else { "id,kind,name,passed,detail\n" });
            for o in outcomes {
                let kind = format!("{:?}", o.kind).to_lowercase();
                let detail = o.detail.replace('"', "\"\"");
                if timings {
                    let _ = writeln!(s, "{},{kind},{},{},{:.3},\"{detail}\"", o.id, o.name, o.passed, o.seconds);
                } else {
                    let _ = writeln!(s, "{},{kind},{},{},\"{detail}\"", o.id, o.name, o.passed);
                }
            }
            s
        }
    }
}
