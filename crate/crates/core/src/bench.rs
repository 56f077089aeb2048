//! Benchmark harness: a TOML suite of instances, each run through one or more
//! routes, reported as CSV.
//!
//! ```toml
//! [defaults]
//! timeout_secs = 60
//!
//! [[instance]]
//! name = "theta-30"
//! kind = "theta"          # theta | base | ls | file
//! w = 30
//! h = 50
//! a = 2
//! b = 8
//! seed = 1
//! repeat = 5              # seeds seed, seed+1, ...
//! routes = ["e"]          # e | n | dowling
//! ```
//!
//! Kinds and their parameters: `theta` (`w`, `h`, `a`, `b`), `base` (`w`,
//! `n`, `c`, optional `ensure_coverage`), `ls` (`mu`, `lambda`, `kappa`,
//! `colors`), `file` (`path` to a dimplication or base file, relative to the
//! suite file).
//!
//! Routes:
//!
//! * `e`: for dimplication sources the family itself is compressed; for
//!   bases the prime dimplications are computed, reduced, then compressed.
//! * `n`: the base is colored and its implication base over join irreducibles
//!   is compressed into 012n-rows. Needs a learning space.
//! * `dowling`: all states are generated from the base one by one.
//!
//! Dimplication sources obtain their base from the compressed rows when the
//! `n` or `dowling` route asks for it; that time is part of `t_prepare_ms`.
//!
//! One CSV line is written per instance, seed and route, with the columns of
//! [`CSV_COLUMNS`]:
//!
//! | column | content |
//! |---|---|
//! | `instance` | instance name |
//! | `kind` | `theta`, `base`, `ls` or `file` |
//! | `params` | generator parameters, `key=value` separated by spaces |
//! | `seed` | 64-bit seed (0 for files) |
//! | `route` | `e`, `n` or `dowling` |
//! | `states` | exact number of states, decimal |
//! | `rows` | number of final rows (empty for `dowling`) |
//! | `ratio` | states per row, three decimals (empty for `dowling`) |
//! | `theta_pd` | prime dimplications, or input dimplications for `e` on dimplication sources |
//! | `theta_reduced` | dimplications after reduction (`e` on bases only) |
//! | `sigma` | implications over join irreducibles (`n` only) |
//! | `t_prepare_ms` | building the formulas or base |
//! | `t_reduce_ms` | reducing the dimplications |
//! | `t_compress_ms` | the engine run or the generation |
//! | `t_total_ms` | sum of the three |
//! | `peak_stack` | largest working-stack size (empty for `dowling`) |
//! | `status` | `ok`, `timeout`, `limit: ...`, `skipped: ...` or `error: ...` |
//!
//! Empty cells mean "not applicable" and appear only in the columns noted;
//! when `status` is not `ok` every measured column may be empty.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{base_from_rows, color_base, dowling_generate_with, BaseFamily, DEFAULT_STATE_LIMIT};
use crate::engine::{Compressor, Limits};
use crate::error::{Error, ResourceAbort, Result};
use crate::format::{read_dimplications, read_sets};
use crate::generate::{gen_base, gen_learning_space, gen_theta, LayeredParams};
use crate::lattice::JiPoset;
use crate::model::{Dimplication, Domain};
use crate::prime::{prime_dimps, reduce_dimp_base};

/// Header of the CSV report, in order.
pub const CSV_COLUMNS: [&str; 17] = [
    "instance",
    "kind",
    "params",
    "seed",
    "route",
    "states",
    "rows",
    "ratio",
    "theta_pd",
    "theta_reduced",
    "sigma",
    "t_prepare_ms",
    "t_reduce_ms",
    "t_compress_ms",
    "t_total_ms",
    "peak_stack",
    "status",
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(rename = "instance", default)]
    pub instances: Vec<InstanceSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub max_rows: Option<usize>,
    #[serde(default = "default_max_states")]
    pub max_states: usize,
    #[serde(default = "default_passes")]
    pub reduce_passes: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            timeout_secs: default_timeout(),
            max_rows: None,
            max_states: default_max_states(),
            reduce_passes: default_passes(),
        }
    }
}

fn default_timeout() -> f64 {
    60.0
}

fn default_max_states() -> usize {
    DEFAULT_STATE_LIMIT
}

fn default_passes() -> usize {
    1
}

fn default_repeat() -> usize {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    #[serde(flatten)]
    pub source: Source,
    pub routes: Vec<Route>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repeat")]
    pub repeat: usize,
    #[serde(default)]
    pub timeout_secs: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Theta {
        w: usize,
        h: usize,
        a: usize,
        b: usize,
    },
    Base {
        w: usize,
        n: usize,
        c: usize,
        #[serde(default = "default_true")]
        ensure_coverage: bool,
    },
    Ls {
        mu: usize,
        lambda: usize,
        kappa: usize,
        colors: usize,
    },
    File {
        path: PathBuf,
    },
}

impl Source {
    fn kind(&self) -> &'static str {
        match self {
            Source::Theta { .. } => "theta",
            Source::Base { .. } => "base",
            Source::Ls { .. } => "ls",
            Source::File { .. } => "file",
        }
    }

    fn params(&self) -> String {
        match self {
            Source::Theta { w, h, a, b } => format!("w={w} h={h} a={a} b={b}"),
            Source::Base { w, n, c, .. } => format!("w={w} n={n} c={c}"),
            Source::Ls {
                mu,
                lambda,
                kappa,
                colors,
            } => format!("mu={mu} lambda={lambda} kappa={kappa} colors={colors}"),
            Source::File { path } => format!("path={}", path.display()),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    E,
    N,
    Dowling,
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::E => "e",
            Route::N => "n",
            Route::Dowling => "dowling",
        }
    }
}

/// One CSV line.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    pub kind: String,
    pub params: String,
    pub seed: u64,
    pub route: String,
    pub states: Option<String>,
    pub rows: Option<usize>,
    pub ratio: Option<String>,
    pub theta_pd: Option<usize>,
    pub theta_reduced: Option<usize>,
    pub sigma: Option<usize>,
    pub t_prepare_ms: Option<f64>,
    pub t_reduce_ms: Option<f64>,
    pub t_compress_ms: Option<f64>,
    pub t_total_ms: Option<f64>,
    pub peak_stack: Option<usize>,
    pub status: String,
}

impl BenchRecord {
    fn new(spec: &InstanceSpec, seed: u64, route: Route) -> Self {
        BenchRecord {
            instance: spec.name.clone(),
            kind: spec.source.kind().to_string(),
            params: spec.source.params(),
            seed,
            route: route.name().to_string(),
            states: None,
            rows: None,
            ratio: None,
            theta_pd: None,
            theta_reduced: None,
            sigma: None,
            t_prepare_ms: None,
            t_reduce_ms: None,
            t_compress_ms: None,
            t_total_ms: None,
            peak_stack: None,
            status: "ok".into(),
        }
    }

    fn set_rows(&mut self, states: &BigUint, rows: usize) {
        self.states = Some(states.to_string());
        self.rows = Some(rows);
        if rows > 0 {
            let ratio = states.to_f64().unwrap_or(f64::INFINITY) / rows as f64;
            self.ratio = Some(format!("{ratio:.3}"));
        }
    }

    fn finish_times(&mut self) {
        let parts = [self.t_prepare_ms, self.t_reduce_ms, self.t_compress_ms];
        self.t_total_ms = Some(parts.iter().flatten().sum());
    }

    /// States as an exact integer.
    pub fn states_value(&self) -> Option<BigUint> {
        self.states.as_deref().and_then(|s| s.parse().ok())
    }
}

pub fn parse_suite(text: &str) -> Result<Suite> {
    toml::from_str(text).map_err(|e| Error::Precondition(format!("bad suite: {e}")))
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, ms(start.elapsed()))
}

fn status_of(e: &Error) -> String {
    match e {
        Error::Resource(ResourceAbort::Timeout) => "timeout".into(),
        Error::Resource(ResourceAbort::Cancelled) => "cancelled".into(),
        Error::Resource(ResourceAbort::LimitExceeded { what, limit }) => format!("limit: more than {limit} {what}"),
        other => format!("error: {other}"),
    }
}

enum Material {
    Formulas(Domain, Vec<Dimplication>),
    Base(BaseFamily),
}

fn materialize(source: &Source, seed: u64, dir: &Path) -> Result<Material> {
    Ok(match source {
        Source::Theta { w, h, a, b } => {
            let (dom, theta) = gen_theta(*w, *h, *a, *b, seed)?;
            Material::Formulas(dom, theta)
        }
        Source::Base {
            w,
            n,
            c,
            ensure_coverage,
        } => Material::Base(gen_base(*w, *n, *c, seed, *ensure_coverage)?),
        Source::Ls {
            mu,
            lambda,
            kappa,
            colors,
        } => Material::Base(gen_learning_space(
            &LayeredParams::with_color_count(*mu, *lambda, *kappa, *colors),
            seed,
        )?),
        Source::File { path } => {
            let full = dir.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", full.display())))?;
            if text.contains("~>") {
                let (dom, theta) = read_dimplications(&text)?;
                Material::Formulas(dom, theta)
            } else {
                let (dom, sets) = read_sets(&text)?;
                let sets = sets.into_iter().filter(|s| !s.is_empty()).collect();
                Material::Base(BaseFamily::new(dom, sets)?)
            }
        }
    })
}

struct Job<'a> {
    spec: &'a InstanceSpec,
    seed: u64,
}

fn run_job(job: &Job, defaults: &Defaults, dir: &Path) -> Vec<BenchRecord> {
    let timeout = job.spec.timeout_secs.unwrap_or(defaults.timeout_secs);
    let limits = Limits {
        max_rows: defaults.max_rows,
        deadline: Some(Instant::now() + Duration::from_secs_f64(timeout.max(0.0))),
        cancel: None,
    };
    let (material, t_material) = timed(|| materialize(&job.spec.source, job.seed, dir));
    let material = match material {
        Ok(m) => m,
        Err(e) => {
            return job
                .spec
                .routes
                .iter()
                .map(|&r| {
                    let mut rec = BenchRecord::new(job.spec, job.seed, r);
                    rec.status = status_of(&e);
                    rec
                })
                .collect()
        }
    };
    log::info!("instance {} seed {} ready in {t_material} ms", job.spec.name, job.seed);
    let mut derived_base: Option<(Result<BaseFamily>, f64)> = None;
    job.spec
        .routes
        .iter()
        .map(|&route| {
            let mut rec = BenchRecord::new(job.spec, job.seed, route);
            let outcome = match (&material, route) {
                (Material::Formulas(dom, theta), Route::E) => e_route_formulas(&mut rec, dom, theta, &limits),
                (Material::Base(b), Route::E) => e_route_base(&mut rec, b, defaults.reduce_passes, &limits),
                (Material::Base(b), Route::N) => n_route(&mut rec, b, &limits),
                (Material::Base(b), Route::Dowling) => dowling_route(&mut rec, b, defaults.max_states, &limits),
                (Material::Formulas(dom, theta), _) => {
                    let (base, t) = derived_base
                        .get_or_insert_with(|| {
                            timed(|| {
                                let rows = Compressor::new().limits(limits.clone()).space(dom, theta)?.family;
                                base_from_rows(&rows)
                            })
                        })
                        .clone();
                    base.and_then(|b| {
                        let r = match route {
                            Route::N => n_route(&mut rec, &b, &limits),
                            _ => dowling_route(&mut rec, &b, defaults.max_states, &limits),
                        };
                        rec.t_prepare_ms = Some(rec.t_prepare_ms.unwrap_or(0.0) + t);
                        r
                    })
                }
            };
            if let Err(e) = outcome {
                rec.status = status_of(&e);
            }
            rec.finish_times();
            rec
        })
        .collect()
}

fn e_route_formulas(rec: &mut BenchRecord, dom: &Domain, theta: &[Dimplication], limits: &Limits) -> Result<()> {
    rec.theta_pd = Some(theta.len());
    rec.t_prepare_ms = Some(0.0);
    let (out, t) = timed(|| Compressor::new().limits(limits.clone()).space(dom, theta));
    rec.t_compress_ms = Some(t);
    let out = out?;
    rec.set_rows(&out.family.count(), out.family.len());
    rec.peak_stack = Some(out.peak_stack);
    Ok(())
}

fn e_route_base(rec: &mut BenchRecord, b: &BaseFamily, passes: usize, limits: &Limits) -> Result<()> {
    let (pd, t) = timed(|| prime_dimps(b));
    rec.t_prepare_ms = Some(t);
    rec.theta_pd = Some(pd.len());
    limits.check_time()?;
    let (reduced, t) = timed(|| reduce_dimp_base(&pd, passes));
    rec.t_reduce_ms = Some(t);
    rec.theta_reduced = Some(reduced.len());
    limits.check_time()?;
    let (out, t) = timed(|| Compressor::new().limits(limits.clone()).space(b.domain(), &reduced));
    rec.t_compress_ms = Some(t);
    let out = out?;
    rec.set_rows(&out.family.count(), out.family.len());
    rec.peak_stack = Some(out.peak_stack);
    Ok(())
}

fn n_route(rec: &mut BenchRecord, b: &BaseFamily, limits: &Limits) -> Result<()> {
    let (prepared, t) = timed(|| {
        color_base(b).map(|cb| {
            let p = JiPoset::build(&cb);
            let sigma = p.sigma();
            (p, sigma)
        })
    });
    rec.t_prepare_ms = Some(t);
    let (p, sigma) = match prepared {
        Ok(x) => x,
        Err(Error::NotLearningSpace(_)) => {
            rec.status = "skipped: not a learning space".into();
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    rec.sigma = Some(sigma.len());
    limits.check_time()?;
    let (out, t) = timed(|| {
        Compressor::new()
            .limits(limits.clone())
            .closure_system(p.labels(), &sigma)
    });
    rec.t_compress_ms = Some(t);
    let out = out?;
    rec.set_rows(&out.family.count(), out.family.len());
    rec.peak_stack = Some(out.peak_stack);
    Ok(())
}

fn dowling_route(rec: &mut BenchRecord, b: &BaseFamily, max_states: usize, limits: &Limits) -> Result<()> {
    rec.t_prepare_ms = Some(0.0);
    let (states, t) = timed(|| dowling_generate_with(b, max_states, limits));
    rec.t_compress_ms = Some(t);
    rec.states = Some(states?.len().to_string());
    Ok(())
}

/// Runs every instance, seed and route; instances run in parallel. Relative
/// file paths resolve against `dir`.
pub fn run_suite(suite: &Suite, dir: &Path) -> Vec<BenchRecord> {
    let jobs: Vec<Job> = suite
        .instances
        .iter()
        .flat_map(|spec| {
            (0..spec.repeat.max(1) as u64).map(move |i| Job {
                spec,
                seed: spec.seed.wrapping_add(i),
            })
        })
        .collect();
    jobs.par_iter()
        .map(|job| run_job(job, &suite.defaults, dir))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// The report as CSV text with a header line.
pub fn to_csv(records: &[BenchRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::Precondition(format!("csv: {e}")))?;
    }
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)
            .map_err(|e| Error::Precondition(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Precondition(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Checks a report against the documented columns and value types; returns
/// the parsed records.
pub fn validate_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let bad = |m: String| Error::Precondition(format!("csv schema: {m}"));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(bad(format!("header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.deserialize::<BenchRecord>().enumerate() {
        let rec = rec.map_err(|e| bad(format!("record {}: {e}", i + 1)))?;
        if !["e", "n", "dowling"].contains(&rec.route.as_str()) {
            return Err(bad(format!("record {}: route {}", i + 1, rec.route)));
        }
        if !["theta", "base", "ls", "file"].contains(&rec.kind.as_str()) {
            return Err(bad(format!("record {}: kind {}", i + 1, rec.kind)));
        }
        if rec.status == "ok" {
            let states = rec
                .states_value()
                .ok_or_else(|| bad(format!("record {}: states", i + 1)))?;
            if rec.route != "dowling" {
                let rows = rec.rows.ok_or_else(|| bad(format!("record {}: rows missing", i + 1)))?;
                if BigUint::from(rows) > states {
                    return Err(bad(format!("record {}: more rows than states", i + 1)));
                }
                if rec.peak_stack.is_none() {
                    return Err(bad(format!("record {}: peak_stack missing", i + 1)));
                }
            }
            if rec.t_total_ms.is_none() {
                return Err(bad(format!("record {}: t_total_ms missing", i + 1)));
            }
        }
        out.push(rec);
    }
    Ok(out)
}
