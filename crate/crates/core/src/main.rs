use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use l1mst::cones::{validate_family, ConeDump, ConeFamily, FamilyKind, DEFAULT_MAX_DIM};
use l1mst::dominance::Backend;
use l1mst::io::{random_integer_points, read_points, write_points, write_result, Instance};
use l1mst::mst::prim_dense_oracle;
use l1mst::pipeline::{solve, solve_with_family, SolveOptions};
use l1mst::sweep::{Schedule, SweepOptions};
use l1mst::Error;

#[derive(Parser)]
#[command(name = "l1mst", version, about = "Minimum spanning trees under the Manhattan metric")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the minimum spanning tree of a point file.
    Mst(MstArgs),
    /// Dump a cone family as JSON together with its validation reports.
    Cones(ConesArgs),
    /// Compare the solver against the dense oracle on random instances.
    Verify(VerifyArgs),
    /// Time the solver and print CSV rows.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Cone family: yao or octant2d (plane only).
    #[arg(long, default_value = "yao", value_parser = parse_family)]
    family: FamilyKind,
    /// Pass schedule: pruned or exhaustive.
    #[arg(long, default_value = "pruned")]
    schedule: Schedule,
    /// Worker threads for the sweep passes.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    /// Largest dimension for which cones are built.
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
}

impl SolverArgs {
    fn sweep(&self, backend: Backend) -> SweepOptions {
        SweepOptions {
            backend,
            schedule: self.schedule,
            threads: usize::from(self.threads),
        }
    }

    fn solve_options(&self, backend: Backend) -> SolveOptions {
        SolveOptions {
            family: self.family,
            max_dim: self.max_dim,
            sweep: self.sweep(backend),
        }
    }
}

#[derive(Args)]
struct MstArgs {
    /// Point file; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Result file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Expected dimension; inferred from the first point when omitted.
    #[arg(long)]
    dim: Option<usize>,
    /// Dominance index: tree or reference.
    #[arg(long, default_value = "tree")]
    backend: Backend,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ConesArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value = "yao", value_parser = parse_family)]
    family: FamilyKind,
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    /// Sampled pairs per cone, and sampled directions for coverage.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Largest instance size; sizes are drawn from 2..=max-n.
    #[arg(long, default_value_t = 64)]
    max_n: usize,
    /// Coordinates are integers in [-range, range].
    #[arg(long, default_value_t = 1000)]
    range: i64,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory receiving failing instances.
    #[arg(long, default_value = ".")]
    fail_dir: PathBuf,
    #[arg(long, default_value = "tree")]
    backend: Backend,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance sizes; `2^k` is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_size,
          default_value = "2^10,2^11,2^12,2^13,2^14,2^15,2^16,2^17")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    dims: Vec<usize>,
    /// Timed repetitions per row; the median is reported.
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 1_000_000)]
    range: i64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Backends to time, comma separated. The reference backend is
    /// quadratic per pass.
    #[arg(long = "backend", value_delimiter = ',', default_value = "tree")]
    backends: Vec<Backend>,
    #[command(flatten)]
    solver: SolverArgs,
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    match s {
        "yao" => Ok(FamilyKind::Yao),
        "octant2d" => Ok(FamilyKind::Octant2d),
        _ => Err(format!("unknown family `{s}` (expected yao or octant2d)")),
    }
}

fn parse_size(s: &str) -> Result<usize, String> {
    let parsed = match s.split_once('^') {
        Some((base, exp)) => base
            .parse::<usize>()
            .ok()
            .zip(exp.parse::<u32>().ok())
            .and_then(|(b, e)| b.checked_pow(e)),
        None => s.parse().ok(),
    };
    parsed.ok_or_else(|| format!("invalid size `{s}`"))
}

/// Command failures, mapped to exit codes.
enum Failure {
    Verification(String),
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Mst(args) => cmd_mst(args),
        Command::Cones(args) => cmd_cones(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_mst(args: MstArgs) -> Result<(), Failure> {
    let inst = match &args.input {
        Some(path) => read_points(BufReader::new(File::open(path)?), args.dim)?,
        None => read_points(io::stdin().lock(), args.dim)?,
    };
    let solution = solve(&inst.points, &args.solver.solve_options(args.backend))?;
    write_result(&solution.mst, &inst, open_output(args.output.as_deref())?)?;
    Ok(())
}

fn cmd_cones(args: ConesArgs) -> Result<(), Failure> {
    let family = ConeFamily::of_kind(args.family, args.dim, args.max_dim)?;
    let mut dump = ConeDump::new(&family);
    let summary = validate_family(&family, args.trials, args.seed);
    let ok = summary.proximity.passed && summary.coverage.passed();
    dump.validation = Some(summary);
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer(&mut out, &dump).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification("cone family failed validation".into()))
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if args.trials == 0 || args.max_n < 2 || args.dims.is_empty() || args.range < 0 {
        return Err(Error::Config("need trials >= 1, max-n >= 2, range >= 0 and at least one dimension".into()).into());
    }
    let families = args
        .dims
        .iter()
        .map(|&d| ConeFamily::of_kind(args.solver.family, d, args.solver.max_dim))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = args.solver.sweep(args.backend);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut passed = vec![0usize; args.dims.len()];
    let mut run = vec![0usize; args.dims.len()];
    let mut out = io::stdout().lock();
    let mut failures = Vec::new();
    for trial in 0..args.trials {
        let slot = trial % args.dims.len();
        let d = args.dims[slot];
        let n = rng.gen_range(2..=args.max_n);
        let rows = random_integer_points(&mut rng, n, d, args.range);
        let inst = Instance::from_rows(d, &rows)?;
        let family = &families[slot];
        let expected = prim_dense_oracle(&inst.points).total_weight;
        let verdict = match solve_with_family(&inst.points, family, &opts) {
            Ok(s) if s.mst.total_weight != expected => Err(format!("total {} but oracle {}", s.mst.total_weight, expected)),
            Ok(s) if s.candidate_edges as u128 > family.total_cones() as u128 * inst.points.len() as u128 => {
                Err(format!("{} candidate edges exceed the bound", s.candidate_edges))
            }
            Ok(_) => Ok(()),
            Err(e) => Err(e.to_string()),
        };
        run[slot] += 1;
        match verdict {
            Ok(()) => passed[slot] += 1,
            Err(why) => {
                let path = args.fail_dir.join(format!("verify-seed{}-trial{trial}.txt", args.seed));
                dump_instance(&path, &rows, &why)?;
                writeln!(out, "trial {trial}: d={d} n={n}: {why}; instance written to {}", path.display())?;
                failures.push(trial);
            }
        }
    }
    for (slot, d) in args.dims.iter().enumerate() {
        writeln!(out, "d={d}\t{}/{}", passed[slot], run[slot])?;
    }
    let total: usize = passed.iter().sum();
    writeln!(out, "passed\t{total}/{}", args.trials)?;
    out.flush()?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} of {} trials failed", failures.len(), args.trials)))
    }
}

fn dump_instance(path: &Path, rows: &[Vec<f64>], why: &str) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "# {why}")?;
    write_points(rows.iter().map(|r| r.as_slice()), &mut f).map_err(|e| match e {
        Error::Io(e) => e,
        other => io::Error::other(other.to_string()),
    })
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        return Err(Error::Config("need trials >= 1".into()).into());
    }
    if args.sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("sizes must be ascending".into()).into());
    }
    let mut out = io::stdout().lock();
    writeln!(out, "d,n,backend,median_ms,edges")?;
    for &d in &args.dims {
        let family = ConeFamily::of_kind(args.solver.family, d, args.solver.max_dim)?;
        for &n in &args.sizes {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ ((d as u64) << 40) ^ n as u64);
            let rows = random_integer_points(&mut rng, n, d, args.range);
            let inst = Instance::from_rows(d, &rows)?;
            for &backend in &args.backends {
                let opts = args.solver.sweep(backend);
                let mut times = Vec::with_capacity(args.trials);
                let mut edges = 0;
                for _ in 0..args.trials {
                    let start = Instant::now();
                    edges = solve_with_family(&inst.points, &family, &opts)?.candidate_edges;
                    times.push(start.elapsed().as_secs_f64() * 1e3);
                }
                times.sort_by(f64::total_cmp);
                writeln!(out, "{d},{n},{backend},{:.3},{edges}", times[times.len() / 2])?;
                out.flush()?;
            }
        }
    }
    Ok(())
}
