//! `rdigits`: digit expansions, carry probes, cube sums and proof checks for
//! linearly recurrent numeration systems.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on bad input.

mod output;
mod systems;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use rdigits::carrylab::{self, Radius};
use rdigits::cubesum::{self, CubeConfig, CubeQuery, Engine, Frequency, DEFAULT_BUDGET};
use rdigits::numsys::DEFAULT_ROOT_TOLERANCE;
use rdigits::proofkit::{self, PairLayout, WindowPattern};
use rdigits::{Execution, Num, NumerationSystem, Report, Truncation};

use output::{Format, Sink};

const THETA_HELP: &str = "Frequency: p/q selects exact rational phases (residues of pE mod q), \
anything else is read as a decimal and evaluated directly in double precision";

#[derive(Parser)]
#[command(name = "rdigits", version, about = "Digit expansions and Gowers-type cube sums in linearly recurrent numeration systems")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Keyvalue)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for enumerations (1 runs sequentially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cap on enumerated terms.
    #[arg(long, global = true, env = "RD_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Keep digit indices 0..λ−1 instead of 0..=λ in truncated sums.
    #[arg(long, global = true)]
    exclusive: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArg {
    /// System file, or the name of a bundled system (zeckendorf, tribonacci,
    /// two-one, descending, base2, base3, base4).
    #[arg(long)]
    system: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Naive,
    Dp,
    Auto,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Naive => Engine::Naive,
            EngineArg::Dp => Engine::Dp,
            EngineArg::Auto => Engine::Auto,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a system definition and report its terms and dominant root.
    Validate {
        #[command(flatten)]
        system: SystemArg,
        /// Number of terms to list.
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Greedy expansion of an integer.
    Expand {
        #[command(flatten)]
        system: SystemArg,
        n: BigUint,
    },
    /// Digit sum, optionally truncated at index λ.
    Sod {
        #[command(flatten)]
        system: SystemArg,
        n: BigUint,
        #[arg(long)]
        lambda: Option<usize>,
    },
    /// Low part v(n, λ) carried by digits 0..=λ.
    Lowpart {
        #[command(flatten)]
        system: SystemArg,
        n: BigUint,
        #[arg(long)]
        lambda: usize,
    },
    /// Empirical carry radii for integers whose digits 0..=m vanish.
    CarryRadius {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        m: usize,
        /// Search below this integer.
        #[arg(long, conflicts_with = "bound_index")]
        bound: Option<u64>,
        /// Search below G_i.
        #[arg(long)]
        bound_index: Option<usize>,
    },
    /// One cube sum.
    Gowers {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long, allow_hyphen_values = true, help = THETA_HELP)]
        theta: Frequency,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
    },
    /// Cube sums over a range of λ with empirical decay rates.
    Decay {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        s: usize,
        #[arg(long, allow_hyphen_values = true, help = THETA_HELP)]
        theta: Frequency,
        #[arg(long, default_value_t = 1)]
        lmin: usize,
        #[arg(long)]
        lmax: usize,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        /// Savings constant h; defaults to (a_1 − 1) + a_2 + ⋯ + a_d.
        #[arg(long)]
        h: Option<u64>,
    },
    /// Partition identity between class sums at levels μ and μ′.
    ProofcheckRefine {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        mu: usize,
        #[arg(long)]
        muprime: usize,
        #[arg(long, allow_hyphen_values = true, help = THETA_HELP)]
        theta: Frequency,
    },
    /// Build a cancellation pair and check its digit-sum and phase relations.
    ProofcheckPair {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        mu: usize,
        /// Carry radius; defaults to the measured additive radius plus d.
        #[arg(long)]
        r: Option<usize>,
        /// Low parts n_0,…,n_s; zeros by default.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Top window, highest digit first, used for every coordinate; zeros by default.
        #[arg(long, value_delimiter = ',')]
        window: Vec<u32>,
        /// Check every class below G_{μ+1} and every combination of admissible windows.
        #[arg(long)]
        all: bool,
        #[arg(long, allow_hyphen_values = true, help = THETA_HELP, conflicts_with = "grid")]
        theta: Option<Frequency>,
        /// Check θ = j/N for j = 0..N−1 (default 16 when no θ is given).
        #[arg(long)]
        grid: Option<u64>,
        /// Truncation index for class sums; defaults to μ′ + 1.
        #[arg(long)]
        lambda: Option<usize>,
        /// Zeros between the low digits and the middle section; defaults to 2r + 1.
        #[arg(long)]
        low_gap: Option<usize>,
    },
    /// Count composition identity and growth of class counts.
    ProofcheckCounts {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Span L of the composition identity (must exceed d).
        #[arg(long, default_value_t = 3)]
        span: usize,
        /// Spans for the growth bound.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5, 6])]
        spans: Vec<usize>,
    },
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Ok,
    Failed,
}

struct Ctx {
    config: CubeConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let execution = match cli.threads {
        Some(0) => bail!("--threads must be positive"),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("starting the thread pool")?;
            Execution::Parallel
        }
        None => Execution::Parallel,
    };
    let ctx = Ctx {
        config: CubeConfig {
            budget: cli.budget,
            truncation: if cli.exclusive {
                Truncation::Exclusive
            } else {
                Truncation::Inclusive
            },
            execution,
        },
    };
    let mut sink = Sink::open(cli.output.as_deref(), cli.format)?;
    let verdict = dispatch(&ctx, cli.command, &mut sink)?;
    sink.finish()?;
    Ok(verdict)
}

fn dispatch(ctx: &Ctx, command: Command, sink: &mut Sink) -> Result<Verdict> {
    match command {
        Command::Validate { system, terms } => validate(&system.system, terms, sink),
        Command::Expand { system, n } => {
            let sys = systems::build(&system.system)?;
            let digits = sys.greedy_expand(&n);
            sink.report(
                &Report::new()
                    .with("n", &n)
                    .with("digits", &digits)
                    .with("length", digits.len())
                    .with("s_G", digits.sum()),
            )?;
            Ok(Verdict::Ok)
        }
        Command::Sod { system, n, lambda } => {
            let sys = systems::build(&system.system)?;
            let mut r = Report::new().with("n", &n).with("s_G", sys.sum_of_digits(&n));
            if let Some(lambda) = lambda {
                r.push("lambda", lambda);
                r.push("truncated", sys.truncated_sum_with(&n, lambda, ctx.config.truncation));
            }
            sink.report(&r)?;
            Ok(Verdict::Ok)
        }
        Command::Lowpart { system, n, lambda } => {
            let sys = systems::build(&system.system)?;
            sink.report(
                &Report::new()
                    .with("n", &n)
                    .with("lambda", lambda)
                    .with("low_part", sys.low_part(&n, lambda)),
            )?;
            Ok(Verdict::Ok)
        }
        Command::CarryRadius {
            system,
            m,
            bound,
            bound_index,
        } => {
            let sys = systems::build(&system.system)?;
            let bound = match (bound, bound_index) {
                (Some(b), _) => b,
                (None, Some(i)) => sys.term_u64(i).ok_or_else(|| anyhow!("G_{i} does not fit in 64 bits"))?,
                (None, None) => sys.term_u64(m + 10).ok_or_else(|| anyhow!("default bound G_{} is too large", m + 10))?,
            };
            let profile = carrylab::estimate_carry_radius(&sys, m, bound, ctx.config.execution)?;
            let mut r = profile.report();
            r.push(
                "block_radius",
                profile.block_radius(sys.degree()).map(|x| x.to_string()).unwrap_or_else(|| "unbounded".into()),
            );
            sink.report(&r)?;
            Ok(Verdict::Ok)
        }
        Command::Gowers {
            system,
            s,
            lambda,
            theta,
            engine,
        } => {
            let sys = systems::build(&system.system)?;
            let v = cubesum::cube_sum(&CubeQuery::new(&sys, s, lambda, theta), engine.into(), &ctx.config)?;
            sink.report(
                &Report::new()
                    .with("system", sys.label())
                    .with("s", s)
                    .with("lambda", lambda)
                    .with("theta", theta)
                    .with("re", Num(v.value.re))
                    .with("im", Num(v.value.im))
                    .with("modulus", Num(v.modulus))
                    .with("term_count", &v.term_count),
            )?;
            Ok(Verdict::Ok)
        }
        Command::Decay {
            system,
            s,
            theta,
            lmin,
            lmax,
            engine,
            h,
        } => {
            let sys = systems::build(&system.system)?;
            if lmin == 0 || lmin > lmax {
                bail!("need 1 <= lmin <= lmax, got {lmin}, {lmax}");
            }
            let table = cubesum::decay_scan(&sys, s, theta, lmin, lmax, h, engine.into(), &ctx.config)?;
            sink.decay(&table)?;
            Ok(Verdict::Ok)
        }
        Command::ProofcheckRefine {
            system,
            s,
            lambda,
            mu,
            muprime,
            theta,
        } => {
            let sys = systems::build(&system.system)?;
            let rep = proofkit::check_refinement(&sys, s, lambda, &theta, mu, muprime, &ctx.config)?;
            sink.report(&rep.report())?;
            Ok(if rep.passed() { Verdict::Ok } else { Verdict::Failed })
        }
        Command::ProofcheckPair {
            system,
            s,
            mu,
            r,
            n,
            window,
            all,
            theta,
            grid,
            lambda,
            low_gap,
        } => {
            let sys = systems::build(&system.system)?;
            let r = match r {
                Some(r) => r,
                None => default_radius(&sys, ctx.config.execution)?,
            };
            let thetas: Vec<Frequency> = match (theta, grid) {
                (Some(t), _) => vec![t],
                (None, g) => {
                    let g = g.unwrap_or(16);
                    if g == 0 {
                        bail!("--grid must be positive");
                    }
                    (0..g).map(|j| Frequency::ratio(j as i64, g)).collect()
                }
            };
            let layout = PairLayout { low_gap, span: None };
            pair_check(ctx, &sys, s, mu, r, &n, &window, all, &thetas, lambda, layout, sink)
        }
        Command::ProofcheckCounts {
            system,
            s,
            k,
            span,
            spans,
        } => {
            let sys = systems::build(&system.system)?;
            let comp = proofkit::check_composition(&sys, s, k, span)?;
            let growth = proofkit::verify_growth_bound(&sys, s, k, &spans)?;
            let mut r = comp.report();
            r.extend(growth.report());
            sink.report(&r)?;
            Ok(if comp.passed() && growth.bounded() {
                Verdict::Ok
            } else {
                Verdict::Failed
            })
        }
    }
}

fn validate(spec: &str, terms: usize, sink: &mut Sink) -> Result<Verdict> {
    let file = systems::load(spec)?;
    let sys = match file.build() {
        Ok(sys) => sys,
        Err(e) => {
            sink.report(&Report::new().with("valid", false).with("reason", e))?;
            return Ok(Verdict::Failed);
        }
    };
    let mut r = Report::new()
        .with("valid", true)
        .with("system", sys.label())
        .with("coeffs", join(sys.coeffs()))
        .with("initial", join(sys.initial()))
        .with("terms", join(&(0..terms).map(|i| sys.term(i)).collect::<Vec<_>>()))
        .with("h", sys.savings_constant());
    match sys.dominant_root(DEFAULT_ROOT_TOLERANCE) {
        Ok(p) => {
            r.push("beta", Num(p.beta));
            r.push("conjugate_moduli", join(&p.conjugate_moduli.iter().map(|&m| Num(m)).collect::<Vec<_>>()));
            r.push("pisot", p.is_pisot);
        }
        Err(e) => {
            r.push("beta", "");
            r.push("root_error", e);
        }
    }
    sink.report(&r)?;
    Ok(Verdict::Ok)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Additive radius at `m = 5` below `G_14`, plus the degree.
fn default_radius(sys: &NumerationSystem, exec: Execution) -> Result<usize> {
    let bound = sys.term_u64(14).ok_or_else(|| anyhow!("G_14 is too large; pass --r"))?;
    let profile = carrylab::estimate_carry_radius(sys, 5, bound, exec)?;
    match profile.r_add {
        Radius::Finite(r) => Ok(r + sys.degree()),
        Radius::Unbounded => bail!("additive carry radius is unbounded at this scale; pass --r"),
    }
}

#[allow(clippy::too_many_arguments)]
fn pair_check(
    ctx: &Ctx,
    sys: &NumerationSystem,
    s: usize,
    mu: usize,
    r: usize,
    n: &[u64],
    window: &[u32],
    all: bool,
    thetas: &[Frequency],
    lambda: Option<usize>,
    layout: PairLayout,
    sink: &mut Sink,
) -> Result<Verdict> {
    let d = sys.degree();
    let cases: Vec<(Vec<u64>, Vec<WindowPattern>)> = if all {
        let patterns = proofkit::admissible_patterns(sys);
        let classes = product(sys.g(mu + 1), s + 1);
        let windows = product(patterns.len() as u64, s + 1);
        classes
            .iter()
            .flat_map(|c| {
                windows
                    .iter()
                    .map(|w| (c.clone(), w.iter().map(|&j| patterns[j as usize].clone()).collect()))
                    .collect::<Vec<_>>()
            })
            .collect()
    } else {
        let n = if n.is_empty() { vec![0; s + 1] } else { n.to_vec() };
        let window = if window.is_empty() { vec![0; d + 1] } else { window.to_vec() };
        if window.len() != d + 1 {
            bail!("--window needs {} digits", d + 1);
        }
        vec![(n, vec![WindowPattern { digits: window }; s + 1])]
    };

    let mut failed = 0usize;
    let mut checks = 0usize;
    let mut worst = 0.0f64;
    // a failing case if there is one, else the only case
    let mut detail: Option<(bool, Report)> = None;
    for (n, windows) in &cases {
        let assembly = proofkit::build_cancellation_pair(sys, s, mu, r, n, windows, layout)?;
        let lambda = lambda.unwrap_or(assembly.mu_prime + 1);
        for theta in thetas {
            let v = proofkit::check_pair_identity(sys, &assembly, theta, lambda, &ctx.config)?;
            checks += 1;
            if v.scale_c > 0.0 {
                worst = worst.max(v.deviation_c / v.scale_c);
            }
            let keep = match &detail {
                None => !v.passed() || cases.len() == 1,
                Some((passed, _)) => *passed && !v.passed(),
            };
            if keep {
                let mut rep = assembly.report().with("lambda", lambda).with("theta", theta);
                rep.extend(v.report());
                detail = Some((v.passed(), rep));
            }
            if !v.passed() {
                failed += 1;
            }
        }
    }
    let mut r_out = Report::new()
        .with("system", sys.label())
        .with("r", r)
        .with("pairs", cases.len())
        .with("checks", checks)
        .with("failures", failed)
        .with("worst_relative_deviation", Num(worst));
    if let Some((_, rep)) = detail {
        r_out.extend(rep);
    }
    sink.report(&r_out)?;
    Ok(if failed == 0 { Verdict::Ok } else { Verdict::Failed })
}

fn product(side: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..side).map(move |x| {
                    let mut t: Vec<u64> = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}
