//! `racbox`: build boxes, run protocols, compile RACs and run the checks.
//!
//! Exit status: 0 pass, 1 a checked claim failed, 2 usage or input error,
//! 3 budget exhausted before the result was complete.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use racbox::box_core::{make_bn_box, make_bnd_box, make_rb, parse_box, serialize_box};
use racbox::infotheory::{verify_capacity_bound_bits, verify_capacity_bound_dits, CapacityStrategy, BUILTIN_STRATEGIES};
use racbox::protocols::{
    bn_box_via_rb, bnd_box_via_rb, induced_b_box, rac_via_bn_box, rac_via_bnd_box, resource_inequality_sim,
    verify_lemma1, ProtocolRun,
};
use racbox::rational::{format as fmt_q, parse as parse_q, to_f64};
use racbox::search::{
    evaluate_strategy_file, guessing_feasibility, search, verify_observation2, GuessConstraint, MessageFamily,
    SearchConfig,
};
use racbox::tables::StrategyFile;
use racbox::wiring::{bound_table, check_tree_lemma, compile_rac, forward_win, render_bound_table, winning_probability};
use racbox::{Execution, ProbeReport, Quantity, RbVariant, Sign, SignalingDirection, Status};

#[derive(Parser)]
#[command(name = "racbox", version, about = "Exact no-signaling box and random access code toolkit")]
struct Cli {
    /// Emit `key=value` lines only, ending with `status=pass|fail`.
    #[arg(long, global = true)]
    machine: bool,
    /// Run exhaustive loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bn,
    Bnd,
    Rb,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    NoSignaling,
    SignalingHalf,
    Plus,
    Minus,
    Three,
}

impl From<VariantArg> for RbVariant {
    fn from(v: VariantArg) -> RbVariant {
        match v {
            VariantArg::NoSignaling => RbVariant::NoSignaling,
            VariantArg::SignalingHalf => RbVariant::SignalingHalf,
            VariantArg::Plus => RbVariant::Plus,
            VariantArg::Minus => RbVariant::Minus,
            VariantArg::Three => RbVariant::Three,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    A2b,
    B2a,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    RacViaBn,
    BnViaRb,
    RacViaBnd,
    BndViaRb,
    ResourceInequality,
    Lemma1,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Any,
    Relay,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Feasible,
    Infeasible,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a box family member and print it in the text box format.
    Build {
        #[arg(long, value_enum, default_value = "bn")]
        family: Family,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        #[arg(long, value_enum, default_value = "no-signaling")]
        variant: VariantArg,
        /// Write the box here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check normalization and no-signaling of a box file.
    CheckNs {
        #[arg(long = "box")]
        box_file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        direction: Direction,
    },
    /// Run a protocol exactly and check its claim.
    Simulate {
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        /// RAC box used by `resource-inequality` (default: no-signaling for
        /// bits, three for dits).
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// Compile an (n→1) RAC from (2→1) RAC boxes. For n <= 10 the wiring is
    /// also run exhaustively on perfect boxes (`win_perfect`).
    Compile {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Per-box success probability for the noisy winning probability.
        #[arg(long, default_value = "3/4")]
        p2: String,
        /// Also print the wiring as Graphviz.
        #[arg(long)]
        dot: bool,
    },
    /// Protocol bounds C_n and T_n for n = 2..=nmax.
    Table {
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        #[arg(long, default_value = "3/4")]
        c2: String,
        /// Defaults to (2+√2)/4.
        #[arg(long)]
        t2: Option<String>,
    },
    /// Check the channel capacity bound for a strategy.
    Capacity {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Builtin name (protocol, send-x1, ignore-rb) or a strategy file.
        #[arg(long, default_value = "protocol")]
        strategy: String,
    },
    /// Exhaustive search for the best (n→1) RAC with k boxes and one bit.
    Search {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        rbs: usize,
        /// Time limit in seconds.
        #[arg(long, default_value_t = 3600)]
        budget: u64,
        #[arg(long, value_enum, default_value = "any")]
        family: FamilyArg,
        /// Write the witness strategy here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Re-evaluate a stored witness instead of searching.
        #[arg(long, conflicts_with_all = ["witness_out", "observation2"])]
        verify: Option<PathBuf>,
        /// Compare relayed against box-independent messages (one box).
        #[arg(long)]
        observation2: bool,
    },
    /// Decide whether perfect-guess requirements admit a distribution.
    Feasibility {
        /// Message alphabet size.
        #[arg(long, default_value_t = 2)]
        messages: usize,
        /// Uniform independent variable, `NAME:SIZE` (repeatable).
        #[arg(long = "var", required = true)]
        vars: Vec<String>,
        /// Requirement `M:NAME` or `M:NAME=GUESS` (repeatable).
        #[arg(long = "require")]
        requires: Vec<String>,
        /// Fail unless the decision matches.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
}

enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Output {
    report: ProbeReport,
    /// Human-mode extras (tables, box text, witnesses).
    extra: Vec<String>,
}

impl Output {
    fn new(report: ProbeReport) -> Self {
        Output { report, extra: Vec::new() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match run(cli.command, exec) {
        Ok(out) => {
            if cli.machine {
                for line in out.report.to_lines() {
                    println!("{line}");
                }
            } else {
                for extra in &out.extra {
                    print!("{extra}");
                    if !extra.ends_with('\n') {
                        println!();
                    }
                }
                let lines = out.report.to_lines();
                let width = lines.iter().map(|l| l.find('=').unwrap_or(0)).max().unwrap_or(0);
                for line in lines {
                    let (k, v) = line.split_once('=').unwrap_or((&line, ""));
                    println!("{k:<width$}  {v}");
                }
            }
            ExitCode::from(match out.report.status {
                Status::Pass | Status::PremiseUnmet | Status::UnderDetermined => 0,
                Status::Fail => 1,
                Status::Incomplete => 3,
            })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("racbox: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_prob(s: &str) -> Result<f64, Failure> {
    let v = match parse_q(s) {
        Some(q) => to_f64(&q),
        None => s.parse::<f64>().map_err(|_| Failure::Usage(format!("not a probability: `{s}`")))?,
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(Failure::Usage(format!("probability {s} outside [0, 1]")));
    }
    Ok(v)
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn run(command: Command, exec: Execution) -> Result<Output, Failure> {
    match command {
        Command::Build { family, n, d, sign, variant, out } => {
            let b = match family {
                Family::Bn => make_bn_box(n)?,
                Family::Bnd => make_bnd_box(n, d, sign.into())?,
                Family::Rb => make_rb(n, d, variant.into())?,
            };
            let text = serialize_box(&b);
            let mut report = ProbeReport::new("build", pass_if(b.check_normalization()))
                .detail("rows", b.signature().input_count())
                .detail("columns", b.signature().output_count());
            let mut extra = Vec::new();
            match out {
                Some(path) => {
                    fs::write(&path, &text)?;
                    report = report.detail("written", path.display());
                }
                None => extra.push(text),
            }
            Ok(Output { report, extra })
        }
        Command::CheckNs { box_file, direction } => {
            let text = fs::read_to_string(&box_file)?;
            let b = parse_box(&text)?;
            let normalized = b.check_normalization();
            let a2b = b.check_no_signaling(SignalingDirection::AliceToBob);
            let b2a = b.check_no_signaling(SignalingDirection::BobToAlice);
            let ok = normalized
                && match direction {
                    Direction::A2b => a2b,
                    Direction::B2a => b2a,
                    Direction::Both => a2b && b2a,
                };
            Ok(Output::new(
                ProbeReport::new("check-ns", pass_if(ok))
                    .detail("normalized", normalized)
                    .detail("no_signaling_a2b", a2b)
                    .detail("no_signaling_b2a", b2a),
            ))
        }
        Command::Simulate { protocol, n, d, sign, variant } => simulate(protocol, n, d, sign.into(), variant),
        Command::Compile { n, p2, dot } => {
            let p2 = parse_prob(&p2)?;
            let (tree, cost) = compile_rac(n)?;
            let lemma = check_tree_lemma(&tree)?;
            let mut report = ProbeReport::new("compile", Status::Pass)
                .detail("n", cost.n)
                .detail("rb_count", cost.rb_count)
                .detail("message_bits", cost.message_bits)
                .detail("concatenation_uses", cost.concatenation_uses)
                .detail("addition_uses", cost.addition_uses)
                .detail("tree_lemma", lemma.status.verdict())
                .detail("p2", p2)
                .detail("win_noisy", format!("{:.12}", winning_probability(&tree, p2)?));
            let mut ok = cost.rb_count == n - 1 && lemma.passed();
            if n <= 10 {
                let rb = make_rb(2, 2, RbVariant::NoSignaling)?;
                let stats = forward_win(&tree, &rb, exec)?;
                report = report.detail("win_perfect", fmt_q(&stats.worst));
                ok &= stats.worst == racbox::rational::int(1);
            }
            report.status = pass_if(ok);
            let extra = if dot { vec![tree.to_dot()] } else { vec![] };
            Ok(Output { report, extra })
        }
        Command::Table { nmax, c2, t2 } => {
            let c2 = parse_prob(&c2)?;
            let t2 = match t2 {
                Some(s) => parse_prob(&s)?,
                None => (2.0 + 2f64.sqrt()) / 4.0,
            };
            let rows = bound_table(nmax, c2, t2)?;
            let mut report = ProbeReport::new("table", Status::Pass).detail("c2", c2).detail("t2", t2);
            for r in &rows {
                report = report.detail(format!("row{}", r.n), format!("n={} C={:.6} T={:.6}", r.n, r.c, r.t));
            }
            Ok(Output {
                report,
                extra: vec![render_bound_table(&rows)],
            })
        }
        Command::Capacity { n, d, strategy } => {
            let s = if BUILTIN_STRATEGIES.contains(&strategy.as_str()) {
                CapacityStrategy::builtin(&strategy, n, d)?
            } else {
                let text = fs::read_to_string(&strategy)?;
                CapacityStrategy::from_file(&StrategyFile::parse(&text)?)?
            };
            let report = if d == 2 {
                verify_capacity_bound_bits(n, &s)?
            } else {
                verify_capacity_bound_dits(n, d, &s)?
            };
            Ok(Output::new(report.detail("strategy", strategy)))
        }
        Command::Search {
            n,
            rbs,
            budget,
            family,
            witness_out,
            verify,
            observation2,
        } => {
            if let Some(path) = verify {
                let file = StrategyFile::parse(&fs::read_to_string(&path)?)?;
                let value = evaluate_strategy_file(&file)?;
                return Ok(Output::new(
                    ProbeReport::new("search-verify", Status::Pass)
                        .with_quantity(Quantity::Exact(value))
                        .detail("n", file.param("n").unwrap_or("?"))
                        .detail("rbs", file.param("k").unwrap_or("?")),
                ));
            }
            if observation2 {
                return Ok(Output::new(verify_observation2(n)?));
            }
            let result = search(SearchConfig {
                n,
                k: rbs,
                family: match family {
                    FamilyArg::Any => MessageFamily::Any,
                    FamilyArg::Relay => MessageFamily::Relay,
                    FamilyArg::Fixed => MessageFamily::Fixed,
                },
                budget: Some(Duration::from_secs(budget)),
                exec,
                no_symmetry: false,
            })?;
            let mut report = result.to_report();
            let mut extra = Vec::new();
            if let Some(w) = &result.witness {
                let text = w.to_file().to_text();
                match witness_out {
                    Some(path) => {
                        fs::write(&path, &text)?;
                        report = report.detail("witness_file", path.display());
                    }
                    None => extra.push(text),
                }
            }
            Ok(Output { report, extra })
        }
        Command::Feasibility {
            messages,
            vars,
            requires,
            expect,
        } => {
            let vars = vars
                .iter()
                .map(|v| {
                    let (name, size) = v
                        .split_once(':')
                        .ok_or_else(|| Failure::Usage(format!("expected NAME:SIZE, got `{v}`")))?;
                    Ok((name.to_string(), size.parse::<usize>()?))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let constraints = requires
                .iter()
                .map(|r| {
                    let (m, rest) = r
                        .split_once(':')
                        .ok_or_else(|| Failure::Usage(format!("expected M:NAME[=GUESS], got `{r}`")))?;
                    let (name, guess) = match rest.split_once('=') {
                        Some((name, g)) => (name, Some(g.parse::<usize>()?)),
                        None => (rest, None),
                    };
                    Ok(GuessConstraint::new(m.parse::<usize>()?, name, guess))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let mut report = guessing_feasibility(messages, &constraints, &vars)?;
            if let Some(e) = expect {
                let feasible = report.get("feasible") == Some("true");
                report.status = pass_if(feasible == matches!(e, Expect::Feasible));
            }
            Ok(Output::new(report))
        }
    }
}

fn rac_report(name: &str, run: &ProtocolRun) -> ProbeReport {
    let (avg, worst) = run.rac_win().expect("RAC-shaped protocol");
    ProbeReport::new(name, pass_if(worst == racbox::rational::int(1)))
        .with_quantity(Quantity::Exact(worst))
        .detail("win", fmt_q(&worst))
        .detail("win_average", fmt_q(&avg))
        .detail("message_alphabet", run.message_alphabet.size())
}

fn simulate(
    protocol: ProtocolArg,
    n: usize,
    d: usize,
    sign: Sign,
    variant: Option<VariantArg>,
) -> Result<Output, Failure> {
    let report = match protocol {
        ProtocolArg::RacViaBn => rac_report("rac-via-bn", &rac_via_bn_box(n)?),
        ProtocolArg::RacViaBnd => rac_report("rac-via-bnd", &rac_via_bnd_box(n, d, sign)?).detail("sign", sign.as_str()),
        ProtocolArg::BnViaRb => {
            let run = bn_box_via_rb(n)?;
            let exact = run.result == make_bn_box(n)?;
            ProbeReport::new("bn-via-rb", pass_if(exact)).detail("table_exact", exact)
        }
        ProtocolArg::BndViaRb => {
            let run = bnd_box_via_rb(n, d, sign)?;
            let exact = run.result == make_bnd_box(n, d, sign)?;
            ProbeReport::new("bnd-via-rb", pass_if(exact))
                .detail("sign", sign.as_str())
                .detail("table_exact", exact)
        }
        ProtocolArg::ResourceInequality => {
            let variant: RbVariant = match variant {
                Some(v) => v.into(),
                None if d == 2 => RbVariant::NoSignaling,
                None => RbVariant::Three,
            };
            let (run, channel) = resource_inequality_sim(n, d, variant)?;
            let target = make_bnd_box(n, d, Sign::Plus)?;
            let mut box_exact = true;
            for z in 0..d {
                box_exact &= induced_b_box(&run.result, z)? == target;
            }
            let expected = racbox::rational::ratio((n - 1) as i64, n as i64);
            let ok = box_exact && channel.faithful && channel.erasure_probability == expected;
            ProbeReport::new("resource-inequality", pass_if(ok))
                .with_quantity(Quantity::Exact(channel.erasure_probability))
                .with_bound(Quantity::Exact(expected))
                .detail("variant", variant.as_str())
                .detail("box_exact", box_exact)
                .detail("erasure_faithful", channel.faithful)
                .detail("capacity", fmt_q(&channel.capacity))
        }
        ProtocolArg::Lemma1 => verify_lemma1(n, d)?,
    };
    let report = if report.get("n").is_some() { report } else { report.detail("n", n).detail("d", d) };
    Ok(Output::new(report))
}
