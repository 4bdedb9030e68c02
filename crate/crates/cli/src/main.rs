use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use permlab::descent::kernel_coeffs;
use permlab::harness::{run_in_memory, stream, with_thread_cap, ExperimentKind, ExperimentSpec};
use permlab::limits::{omega, F2Evaluator, F2_S_RANGE};
use permlab::samplers::PermutationSampler;
use permlab::{rsk_shape, Permutation};

#[derive(Parser)]
#[command(name = "permlab", version, about = "Random permutation laws, RSK shapes and their limits")]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw permutations, one word per line.
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Longest increasing and decreasing subsequence of each input word.
    Lis(InputArgs),
    /// RSK shape of each input word as comma-separated rows.
    Shape(InputArgs),
    /// Descent set of each input word.
    Descents(InputArgs),
    /// Longest increasing subsequence before and after merging all cycles.
    Couple {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Descent kernel coefficients k(i) for i = -1..=max.
    Kernel {
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, default_value_t = 10)]
        max: usize,
    },
    /// Empirical descent correlations against the kernel determinant.
    DescentCorr {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// Sets such as "1,2;1,3;1,2,3".
        #[arg(long)]
        sets: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tracy-Widom GUE distribution function on a grid.
    F2 {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = permlab::limits::DEFAULT_F2_ORDER)]
        order: usize,
    },
    /// Limit shape of Young diagrams on a grid.
    Omega {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run a Monte Carlo experiment; the summary goes to stderr.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Read words from this file instead of stdin.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Default)]
struct DistArgs {
    /// uniform, ewens, gen-ewens, pd, central or diluted.
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Generalized Ewens weights, comma-separated.
    #[arg(long)]
    weights: Option<String>,
    /// Stick vector, comma-separated.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    x0: Option<String>,
    /// Law applied off the fixed set of a diluted distribution.
    #[arg(long)]
    base: Option<String>,
}

impl DistArgs {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("dist", &self.dist),
            ("theta", &self.theta),
            ("weights", &self.weights),
            ("x", &self.x),
            ("x0", &self.x0),
            ("base", &self.base),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }

    fn apply(&self, spec: &mut ExperimentSpec) -> Result<()> {
        for (k, v) in self.pairs() {
            spec.set(k, v)?;
        }
        Ok(())
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long)]
    step: f64,
}

impl GridArgs {
    fn points(&self) -> Result<Vec<f64>> {
        if self.step <= 0.0 || !self.step.is_finite() || !self.from.is_finite() || !self.to.is_finite() || self.to < self.from {
            bail!("need finite from <= to and step > 0");
        }
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.from + i as f64 * self.step).collect())
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// tw-edge, vkls, descent-corr, descent-density, edge-two-sample or couple.
    kind: String,
    /// Spec file of key = value lines; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    conjugate: Option<String>,
    #[arg(long)]
    sets: Option<String>,
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
}

impl ExperimentArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let kind: ExperimentKind = self.kind.parse()?;
        let mut spec = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let mut s = ExperimentSpec::parse(&format!("kind = {kind}\n{text}"))?;
                s.kind = kind;
                s
            }
            None => ExperimentSpec::new(kind),
        };
        self.dist.apply(&mut spec)?;
        let flags = [
            ("n", &self.n),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("k", &self.k),
            ("conjugate", &self.conjugate),
            ("sets", &self.sets),
            ("order", &self.order),
            ("threshold", &self.threshold),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                spec.set(k, v)?;
            }
        }
        spec.out = None;
        Ok(spec)
    }
}

fn read_words(input: &InputArgs) -> Result<Vec<Permutation>> {
    let reader: Box<dyn BufRead> = match &input.input {
        Some(p) => Box::new(BufReader::new(
            File::open(p).with_context(|| format!("opening {}", p.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let mut out = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(line.parse().with_context(|| format!("line {}", no + 1))?);
    }
    Ok(out)
}

fn dist_spec(dist: &DistArgs) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(ExperimentKind::TwEdge);
    dist.apply(&mut spec)?;
    Ok(spec)
}

fn run_experiment(spec: &ExperimentSpec, w: &mut dyn Write) -> Result<()> {
    let res = run_in_memory(spec)?;
    res.write_csv(&mut *w)?;
    eprint!("{}", res.summary_csv());
    Ok(())
}

fn execute(cmd: Command, w: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Sample { dist, n, count, seed } => {
            let law = dist_spec(&dist)?.dist.build()?;
            let sampler = law.sampler(n)?;
            for i in 0..count {
                writeln!(w, "{}", sampler.sample(n, &mut stream(seed, 0, i)))?;
            }
        }
        Command::Lis(input) => {
            writeln!(w, "index,n,lis,lds")?;
            for (i, p) in read_words(&input)?.iter().enumerate() {
                writeln!(w, "{i},{},{},{}", p.len(), p.lis_length(), p.lds_length())?;
            }
        }
        Command::Shape(input) => {
            for p in read_words(&input)? {
                writeln!(w, "{}", rsk_shape(&p))?;
            }
        }
        Command::Descents(input) => {
            writeln!(w, "index,count,positions")?;
            for (i, p) in read_words(&input)?.iter().enumerate() {
                let d = p.descent_set();
                let pos: Vec<String> = d.positions().iter().map(|v| v.to_string()).collect();
                writeln!(w, "{i},{},{}", d.len(), pos.join(" "))?;
            }
        }
        Command::Couple { dist, n, count, seed } => {
            let mut spec = dist_spec(&dist)?;
            spec.kind = ExperimentKind::Couple;
            spec.n = n;
            spec.reps = count;
            spec.seed = seed;
            run_experiment(&spec, w)?;
        }
        Command::Kernel { x0, max } => {
            let k = kernel_coeffs(x0, max)?;
            writeln!(w, "i,k")?;
            for (i, v) in k.entries() {
                writeln!(w, "{i},{v:.16e}")?;
            }
        }
        Command::DescentCorr { dist, n, reps, sets, seed } => {
            let mut spec = dist_spec(&dist)?;
            spec.kind = ExperimentKind::DescentCorr;
            spec.n = n;
            spec.reps = reps;
            spec.seed = seed;
            spec.set("sets", &sets)?;
            run_experiment(&spec, w)?;
        }
        Command::F2 { grid, order } => {
            let f = F2Evaluator::new(order);
            writeln!(w, "s,f2")?;
            for s in grid.points()? {
                let v = if (F2_S_RANGE.0..=F2_S_RANGE.1).contains(&s) { f.eval(s)? } else { f.cdf(s) };
                writeln!(w, "{s},{v:.16e}")?;
            }
        }
        Command::Omega { grid } => {
            writeln!(w, "s,omega")?;
            for s in grid.points()? {
                writeln!(w, "{s},{:.16e}", omega(s))?;
            }
        }
        Command::Experiment(args) => run_experiment(&args.spec()?, w)?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut w: Box<dyn Write + Send> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    with_thread_cap(|| execute(cli.command, &mut *w))?;
    w.flush()?;
    Ok(())
}
