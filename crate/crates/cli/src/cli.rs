//! Argument grammar and dispatch for the `learnspace` binary.
//!
//! Every command reads and writes the plain-text formats of
//! [`learnspace::format`]. Exit codes: 0 on success, 1 on bad input or a
//! failed check, 2 when a resource guard stopped the computation.

use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use learnspace::analytics::{conditional_probability, Condition, ProbabilityModel};
use learnspace::base::{
    atoms_from_rows, base_from_rows, color_base, dowling_generate_with, is_learning_space, BaseFamily,
    LearningSpaceCheck, DEFAULT_STATE_LIMIT,
};
use learnspace::bench::{parse_suite, run_suite, to_csv, validate_csv};
use learnspace::engine::{Compressed, Compressor, Limits};
use learnspace::explore::{ExplorationSession, Query, SessionMode, SessionStats};
use learnspace::format::{
    read_circuits, read_dimplications, read_domain, read_implications, read_rows, read_sets, write_circuits,
    write_dimplications, write_domain, write_implications, write_rows, write_sets,
};
use learnspace::generate::{gen_base, gen_learning_space, gen_theta, LayeredParams};
use learnspace::lattice::{read_ji_map, JiPoset};
use learnspace::prime::{check_rooted_axioms, prime_dimps, reduce_dimp_base, rooted_circuits, RootedCheck};
use learnspace::{Domain, ItemSet, RowFamily};

#[derive(Debug, Parser)]
#[command(
    name = "learnspace",
    version,
    about = "Compressed knowledge spaces and learning spaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub guards: Guards,
    #[command(subcommand)]
    pub command: Command,
}

/// Resource guards shared by all commands.
#[derive(Debug, Args)]
pub struct Guards {
    /// Abort after this many seconds.
    #[arg(long, global = true, value_name = "SECS")]
    pub timeout: Option<f64>,
    /// Abort when more rows than this would be produced.
    #[arg(long, global = true, value_name = "N")]
    pub max_rows: Option<usize>,
    /// Abort when more states than this would be enumerated.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_STATE_LIMIT)]
    pub max_states: usize,
}

impl Guards {
    fn limits(&self) -> Limits {
        Limits {
            max_rows: self.max_rows,
            deadline: self.timeout.map(|s| Instant::now() + Duration::from_secs_f64(s)),
            cancel: None,
        }
    }
}

/// A base file, optionally shrinking the domain to the covered items.
#[derive(Debug, Args)]
pub struct BaseInput {
    /// Base file: one nonempty set per line.
    #[arg(long, value_name = "FILE")]
    pub base: PathBuf,
    /// Drop uncovered items from the domain instead of failing.
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress the space of a dimplication file into rows.
    Compress {
        #[arg(long, value_name = "FILE")]
        dimps: PathBuf,
        /// Print only the number of states.
        #[arg(long)]
        count: bool,
        /// Prepend the working-stack trace as comment lines.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Compress the closure system of an implication file into rows.
    Closure {
        #[arg(long, value_name = "FILE")]
        imps: PathBuf,
        #[arg(long)]
        count: bool,
        #[arg(long)]
        trace: bool,
        /// Expand the closed sets through a join-irreducible map and list the
        /// resulting states.
        #[arg(long, value_name = "FILE")]
        map: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// List every state generated by a base.
    Dowling {
        #[command(flatten)]
        input: BaseInput,
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Extract the base from rows or from a dimplication file.
    Base {
        #[arg(
            long,
            value_name = "FILE",
            conflicts_with = "dimps",
            required_unless_present = "dimps"
        )]
        rows: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        dimps: Option<PathBuf>,
        /// Annotate every set with its color (learning spaces only).
        #[arg(long)]
        colors: bool,
        #[command(flatten)]
        output: Output,
    },
    /// List the atoms at one item.
    Atoms {
        #[arg(long, value_name = "FILE")]
        rows: PathBuf,
        #[arg(long, value_name = "LABEL")]
        item: String,
        #[command(flatten)]
        output: Output,
    },
    /// List the prime dimplications of the space generated by a base.
    Primedimps {
        #[command(flatten)]
        input: BaseInput,
        /// Write rooted circuits `A+q @ q` instead.
        #[arg(long)]
        as_circuits: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Drop dimplications entailed by the others.
    Reduce {
        #[arg(long, value_name = "FILE")]
        dimps: PathBuf,
        #[arg(long, default_value_t = 1)]
        passes: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Build the implication base over join-irreducibles of a learning space.
    Sigma {
        #[command(flatten)]
        input: BaseInput,
        /// Where to write the label map (join-irreducible label to item set).
        #[arg(long, value_name = "FILE")]
        map: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Count states, or compute an exact conditional probability.
    Stats {
        #[arg(long, value_name = "FILE")]
        rows: PathBuf,
        /// Items the event requires.
        #[arg(long, value_name = "LABELS")]
        contain: Option<String>,
        /// Items the event forbids.
        #[arg(long, value_name = "LABELS")]
        avoid: Option<String>,
        /// Items the condition requires.
        #[arg(long, value_name = "LABELS")]
        given_contain: Option<String>,
        /// Items the condition forbids.
        #[arg(long, value_name = "LABELS")]
        given_avoid: Option<String>,
        /// Weight only the maximal states of the conditioning family.
        #[arg(long)]
        maximal_only: bool,
    },
    /// Generate seeded random instances.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
        #[command(flatten)]
        output: Output,
    },
    /// Run a benchmark suite, or validate a CSV report.
    Bench {
        #[arg(
            long,
            value_name = "FILE",
            conflicts_with = "validate",
            required_unless_present = "validate"
        )]
        suite: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        validate: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Check a structural property; exits 1 when it fails.
    Check {
        /// Is the generated space a learning space?
        #[arg(long, value_name = "FILE")]
        base: Option<PathBuf>,
        /// Do the rooted sets satisfy the circuit axioms?
        #[arg(long, value_name = "FILE")]
        circuits: Option<PathBuf>,
        /// Are the rows pairwise disjoint?
        #[arg(long, value_name = "FILE")]
        rows: Option<PathBuf>,
    },
    /// Build a space from yes/no answers to queries.
    Explore {
        /// Hidden base answering the queries (oracle mode).
        #[arg(long, value_name = "FILE", conflicts_with_all = ["domain", "load"])]
        base: Option<PathBuf>,
        /// Any file whose first line fixes the domain (interactive mode).
        #[arg(long, value_name = "FILE", conflicts_with = "load")]
        domain: Option<PathBuf>,
        /// Resume a saved session.
        #[arg(long, value_name = "FILE")]
        load: Option<PathBuf>,
        /// Save the session here on exit.
        #[arg(long, value_name = "FILE")]
        save: Option<PathBuf>,
        /// Largest premise size queried (default: all).
        #[arg(long, value_name = "N")]
        a_max: Option<usize>,
        /// Write the final rows here.
        #[command(flatten)]
        output: Output,
    },
    /// Serve exploration sessions over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Save every session here and reload them on start.
        #[arg(long, value_name = "DIR")]
        state_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// `h` dimplications with premises of size `a` and conclusions of size `b`.
    Theta {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// `n` distinct sets of size `c`.
    Base {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow uncovered items.
        #[arg(long)]
        no_coverage: bool,
    },
    /// A layered learning space.
    Ls {
        #[arg(long)]
        mu: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        kappa: usize,
        /// Number of colors.
        #[arg(long)]
        colors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Lib(learnspace::Error),
    Io(PathBuf, io::Error),
    /// A check ran and found a violation.
    Failed(String),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_resource_abort() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Failed(msg) | CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<learnspace::Error> for CliError {
    fn from(e: learnspace::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn emit(output: &Output, text: &str) -> CliResult {
    match &output.out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads a base; empty sets (such as a `-` line in a state list) are dropped.
pub fn load_base(input: &BaseInput) -> CliResult<BaseFamily> {
    let (dom, sets) = read_sets(&read(&input.base)?)?;
    let sets: Vec<ItemSet> = sets.into_iter().filter(|s| !s.is_empty()).collect();
    let b = if input.allow_partial {
        BaseFamily::shrink_to_cover(&dom, sets)?
    } else {
        BaseFamily::new(dom, sets)?
    };
    Ok(b)
}

/// Trace lines are comments, so the output still reads as a rows file.
fn with_trace(c: &Compressed) -> String {
    let mut out = String::new();
    for step in &c.trace {
        out.push_str(&format!("# {} | next {}\n", step.row.to_tokens(), step.pending + 1));
    }
    out.push_str(&format!("# peak stack {}\n", c.peak_stack));
    out.push_str(&write_rows(&c.family));
    out
}

fn compressed_text(c: &Compressed, count: bool, trace: bool) -> String {
    if count {
        format!("{}\n", c.family.count())
    } else if trace {
        with_trace(c)
    } else {
        write_rows(&c.family)
    }
}

/// Item sets of each join-irreducible label in `ji`, read from a map file
/// whose first line is the item domain.
fn load_map(ji: &Domain, text: &str) -> CliResult<(Domain, Vec<ItemSet>)> {
    let items = read_domain(text)?;
    let body: String = text
        .lines()
        .skip_while(|l| !l.trim_start().starts_with("domain:"))
        .skip(1)
        .map(|l| format!("{l}\n"))
        .collect();
    let mut parts = vec![None; ji.width()];
    for (label, set) in read_ji_map(&items, &body)? {
        parts[ji.index_of(&label)?] = Some(set);
    }
    let parts = parts
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| CliError::Usage(format!("map has no entry for `{}`", ji.label(i)))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((items, parts))
}

fn expand_states(f: &RowFamily, text: &str, max_states: usize) -> CliResult<String> {
    let (items, parts) = load_map(f.domain(), text)?;
    if f.count() > max_states.into() {
        return Err(learnspace::Error::Resource(learnspace::ResourceAbort::LimitExceeded {
            what: "states",
            limit: max_states,
        })
        .into());
    }
    let mut states: Vec<ItemSet> = f
        .members()
        .map(|x| {
            x.iter().fold(items.empty_set(), |mut acc, p| {
                acc.union_with(&parts[p]);
                acc
            })
        })
        .collect();
    states.sort();
    Ok(write_sets(&items, &states))
}

fn condition(dom: &Domain, contain: &Option<String>, avoid: &Option<String>) -> CliResult<Condition> {
    let parse = |s: &Option<String>| s.as_deref().map_or(Ok(dom.empty_set()), |t| dom.parse_set(t));
    Ok(Condition::new(parse(contain)?, parse(avoid)?))
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> CliResult {
    let guards = &cli.guards;
    match cli.command {
        Command::Compress {
            dimps,
            count,
            trace,
            output,
        } => {
            let (dom, theta) = read_dimplications(&read(&dimps)?)?;
            let c = Compressor::new()
                .limits(guards.limits())
                .trace(trace)
                .space(&dom, &theta)?;
            emit(&output, &compressed_text(&c, count, trace))
        }
        Command::Closure {
            imps,
            count,
            trace,
            map,
            output,
        } => {
            let (dom, sigma) = read_implications(&read(&imps)?)?;
            let c = Compressor::new()
                .limits(guards.limits())
                .trace(trace)
                .closure_system(&dom, &sigma)?;
            match map {
                Some(map) if !count => emit(&output, &expand_states(&c.family, &read(&map)?, guards.max_states)?),
                _ => emit(&output, &compressed_text(&c, count, trace)),
            }
        }
        Command::Dowling { input, count, output } => {
            let b = load_base(&input)?;
            let states = dowling_generate_with(&b, guards.max_states, &guards.limits())?;
            if count {
                emit(&output, &format!("{}\n", states.len()))
            } else {
                emit(&output, &write_sets(b.domain(), &states))
            }
        }
        Command::Base {
            rows,
            dimps,
            colors,
            output,
        } => {
            let f = match (rows, dimps) {
                (Some(rows), _) => read_rows(&read(&rows)?)?,
                (None, Some(dimps)) => {
                    let (dom, theta) = read_dimplications(&read(&dimps)?)?;
                    Compressor::new().limits(guards.limits()).space(&dom, &theta)?.family
                }
                (None, None) => return Err(CliError::Usage("give --rows or --dimps".into())),
            };
            let b = base_from_rows(&f)?;
            if colors {
                emit(&output, &color_base(&b)?.to_text())
            } else {
                emit(&output, &write_sets(b.domain(), b.sets()))
            }
        }
        Command::Atoms { rows, item, output } => {
            let f = read_rows(&read(&rows)?)?;
            let m = f.domain().index_of(&item)?;
            emit(&output, &write_sets(f.domain(), &atoms_from_rows(&f, m)?))
        }
        Command::Primedimps {
            input,
            as_circuits,
            output,
        } => {
            let b = load_base(&input)?;
            let theta = prime_dimps(&b);
            if as_circuits {
                emit(&output, &write_circuits(b.domain(), &rooted_circuits(&theta)?))
            } else {
                emit(&output, &write_dimplications(b.domain(), &theta))
            }
        }
        Command::Reduce { dimps, passes, output } => {
            let (dom, theta) = read_dimplications(&read(&dimps)?)?;
            emit(&output, &write_dimplications(&dom, &reduce_dimp_base(&theta, passes)))
        }
        Command::Sigma { input, map, output } => {
            let cb = color_base(&load_base(&input)?)?;
            let p = JiPoset::build(&cb);
            write(&map, &format!("{}{}", write_domain(p.items()), p.map_text()))?;
            emit(&output, &write_implications(p.labels(), &p.sigma()))
        }
        Command::Stats {
            rows,
            contain,
            avoid,
            given_contain,
            given_avoid,
            maximal_only,
        } => {
            let f = read_rows(&read(&rows)?)?;
            let dom = f.domain().clone();
            let conditioned = [&contain, &avoid, &given_contain, &given_avoid]
                .iter()
                .any(|o| o.is_some());
            if !conditioned && !maximal_only {
                println!("{}", f.count());
                return Ok(());
            }
            let event = condition(&dom, &contain, &avoid)?;
            let given = condition(&dom, &given_contain, &given_avoid)?;
            let model = if maximal_only {
                ProbabilityModel::MaximalOnly
            } else {
                ProbabilityModel::Uniform
            };
            println!("{}", conditional_probability(&f, &event, &given, model)?);
            Ok(())
        }
        Command::Gen { what, output } => {
            let text = match what {
                GenCommand::Theta { w, h, a, b, seed } => {
                    let (dom, theta) = gen_theta(w, h, a, b, seed)?;
                    write_dimplications(&dom, &theta)
                }
                GenCommand::Base {
                    w,
                    n,
                    c,
                    seed,
                    no_coverage,
                } => {
                    let b = gen_base(w, n, c, seed, !no_coverage)?;
                    write_sets(b.domain(), b.sets())
                }
                GenCommand::Ls {
                    mu,
                    lambda,
                    kappa,
                    colors,
                    seed,
                } => {
                    let b = gen_learning_space(&LayeredParams::with_color_count(mu, lambda, kappa, colors), seed)?;
                    write_sets(b.domain(), b.sets())
                }
            };
            emit(&output, &text)
        }
        Command::Bench {
            suite,
            validate,
            output,
        } => {
            if let Some(csv) = validate {
                let records = validate_csv(&read(&csv)?)?;
                println!("valid: {} records", records.len());
                return Ok(());
            }
            let path = suite.ok_or_else(|| CliError::Usage("give --suite or --validate".into()))?;
            let parsed = parse_suite(&read(&path)?)?;
            let dir = path.parent().unwrap_or(Path::new("."));
            emit(&output, &to_csv(&run_suite(&parsed, dir))?)
        }
        Command::Check { base, circuits, rows } => check(base, circuits, rows),
        Command::Explore {
            base,
            domain,
            load,
            save,
            a_max,
            output,
        } => {
            let session = match (base, domain, load) {
                (Some(path), _, _) => {
                    let hidden = load_base(&BaseInput {
                        base: path,
                        allow_partial: false,
                    })?;
                    ExplorationSession::new(hidden.domain().clone(), SessionMode::Oracle(hidden), a_max)?
                }
                (None, Some(path), _) => {
                    ExplorationSession::new(read_domain(&read(&path)?)?, SessionMode::Human, a_max)?
                }
                (None, None, Some(path)) => ExplorationSession::from_snapshot(&read(&path)?)?,
                (None, None, None) => return Err(CliError::Usage("give --base, --domain or --load".into())),
            };
            let session = session.with_max_rows(guards.max_rows);
            let stdin = io::stdin();
            explore(session, &mut stdin.lock(), &mut io::stdout(), save.as_deref(), &output)
        }
        Command::Serve { addr, state_dir } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(PathBuf::from(&addr), e))?;
            runtime
                .block_on(crate::server::serve(&addr, state_dir))
                .map_err(|e| CliError::Io(PathBuf::from(&addr), e))
        }
    }
}

fn check(base: Option<PathBuf>, circuits: Option<PathBuf>, rows: Option<PathBuf>) -> CliResult {
    let mut failures = Vec::new();
    let mut checked = false;
    if let Some(path) = base {
        checked = true;
        let b = load_base(&BaseInput {
            base: path,
            allow_partial: false,
        })?;
        match is_learning_space(&b) {
            LearningSpaceCheck::Yes => println!("learning space: yes"),
            LearningSpaceCheck::No { set, items } => {
                let dom = b.domain();
                let msg = format!(
                    "learning space: no ({} is an atom at both {} and {})",
                    dom.format_set(&set),
                    dom.label(items.0),
                    dom.label(items.1)
                );
                println!("{msg}");
                failures.push(msg);
            }
        }
    }
    if let Some(path) = circuits {
        checked = true;
        let (dom, rc) = read_circuits(&read(&path)?)?;
        let show = |i: usize| format!("{} @ {}", dom.format_set(rc[i].carrier()), dom.label(rc[i].root()));
        let msg = match check_rooted_axioms(&rc) {
            RootedCheck::Holds => None,
            RootedCheck::Nested(i, j) => Some(format!("{} is nested in {}", show(i), show(j))),
            RootedCheck::Unresolved(i, j) => Some(format!("{} and {} have no resolvent", show(i), show(j))),
        };
        match msg {
            None => println!("rooted circuits: yes"),
            Some(m) => {
                println!("rooted circuits: no ({m})");
                failures.push(m);
            }
        }
    }
    if let Some(path) = rows {
        checked = true;
        let f = read_rows(&read(&path)?)?;
        match f.overlapping_pair() {
            None => println!("disjoint rows: yes ({} states)", f.count()),
            Some((i, j)) => {
                let m = format!("rows {} and {} overlap", i + 1, j + 1);
                println!("disjoint rows: no ({m})");
                failures.push(m);
            }
        }
    }
    if !checked {
        return Err(CliError::Usage("give --base, --circuits or --rows".into()));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failures.join("; ")))
    }
}

fn stats_line(s: &SessionStats) -> String {
    format!(
        "states {}, rows {}, base {}, accepted {}, rejected {}",
        s.states, s.rows, s.base, s.accepted, s.rejected
    )
}

/// The query in words: a student who masters none of `A` also fails `q`.
pub fn phrase(dom: &Domain, q: &Query) -> String {
    format!(
        "If a student masters none of {{{}}}, does the student necessarily fail {}?",
        dom.set_labels(&q.premise).join(", "),
        dom.label(q.item)
    )
}

/// Drives a session to the end. Oracle sessions answer themselves; human
/// sessions read `y`, `n`, `w` (what-if preview) or `q` (stop) from `input`.
pub fn explore(
    mut s: ExplorationSession,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    save: Option<&Path>,
    output: &Output,
) -> CliResult {
    let io_err = |e: io::Error| CliError::Io(PathBuf::from("<stdout>"), e);
    let dom = s.domain().clone();
    let result = loop {
        let q = match s.next_query() {
            Ok(Some(q)) => q,
            Ok(None) | Err(learnspace::Error::SessionFinished) => break Ok(()),
            Err(e) => break Err(e.into()),
        };
        let text = format!("{} ~> {}", dom.format_set(&q.premise), dom.label(q.item));
        let accept = match s.oracle_answer(&q) {
            Some(answer) => answer,
            None => {
                writeln!(out, "{}\n  [y]es, [n]o, [w]hat if, [q]uit: ", phrase(&dom, &q)).map_err(io_err)?;
                out.flush().map_err(io_err)?;
                match read_answer(&mut s, &q, input, out).map_err(io_err)? {
                    Some(a) => a,
                    None => break Ok(()),
                }
            }
        };
        match s.apply_answer(&q, accept) {
            Ok(stats) => {
                let verdict = if accept { "yes" } else { "no" };
                writeln!(out, "{text}: {verdict} ({})", stats_line(&stats)).map_err(io_err)?;
            }
            Err(e) => break Err(e.into()),
        }
    };
    writeln!(out, "{}", stats_line(&s.stats())).map_err(io_err)?;
    if let Some(path) = save {
        write(path, &s.to_snapshot())?;
    }
    if output.out.is_some() {
        emit(output, &write_rows(s.rows()))?;
    }
    result
}

fn read_answer(
    s: &mut ExplorationSession,
    q: &Query,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> io::Result<Option<bool>> {
    loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        match line.trim() {
            "y" | "yes" => return Ok(Some(true)),
            "n" | "no" => return Ok(Some(false)),
            "q" | "quit" => return Ok(None),
            "w" | "what if" => match s.what_if(q) {
                Ok(n) => writeln!(out, "  accepting leaves {n} states")?,
                Err(e) => writeln!(out, "  {e}")?,
            },
            other => writeln!(out, "  unrecognised answer `{other}`")?,
        }
    }
}
