//! Command-line front end: `present`, `ranks` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or validation
//! error, 3 refusal because of a size cap.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomdata::BaseGeometry;
use crate::present::{build_reduced, build_weighted, iterated_presentation, Presentation};
use crate::ranks::{graded_ranks_with, rank_oracle, RankOptions, RankTable, DEFAULT_MONOMIAL_CAP};
use crate::setcomb::{
    all_walks, canonical_walk, large_from_weights, parse_rational, LargeFamily, Subset, Weights,
    DEFAULT_WALK_CAP,
};
use crate::verify::{self, VerdictReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fmchow",
    version,
    about = "Chow rings of weighted Fulton-MacPherson compactifications of P^d"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the presentation of the Chow ring (text dump and JSON mirror).
    Present(JobArgs),
    /// Compute graded ranks from the presentation and from the blow-up oracle.
    Ranks(JobArgs),
    /// Run verification scenarios (all default scenarios when none are named).
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkChoice {
    Canonical,
    All,
}

#[derive(Args, Debug, Clone, Default)]
pub struct JobArgs {
    /// JSON job configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dimension of the projective space.
    #[arg(long)]
    pub d: Option<u32>,
    /// Number of points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated rational weights, e.g. `1,1/2,1/2`.
    #[arg(long, value_delimiter = ',', conflicts_with = "large_sets")]
    pub weights: Option<Vec<String>>,
    /// Large sets separated by `;`, elements by `,`, e.g. `1,2;1,3;1,2,3`.
    #[arg(long)]
    pub large_sets: Option<String>,
    /// Use the reduced presentation of X[n] (all weights 1).
    #[arg(long)]
    pub fm: bool,
    /// Also write a Singular script with the ring and ideal.
    #[arg(long)]
    pub export_cas: bool,
    /// Also rank the iterated blow-up construction along these walks.
    #[arg(long, value_enum)]
    pub walk: Option<WalkChoice>,
    /// Maximum number of monomials in one degree.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Scenario names: counterexample, equivalence, construction, coincidence.
    pub names: Vec<String>,
    #[command(flatten)]
    pub job: JobArgs,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BaseSpec {
    pub kind: String,
    pub dim: u32,
}

/// Job configuration as read from a JSON file.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_sets: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub fm: bool,
    #[serde(default)]
    pub export_cas: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// The fully resolved job. This is what output files embed; the output
/// directory is not part of it.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ResolvedJob {
    pub base: BaseSpec,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    pub large_sets: Vec<Subset>,
    pub fm: bool,
    pub export_cas: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkChoice>,
    pub cap: usize,
    #[serde(skip)]
    pub family: LargeFamily,
    #[serde(skip)]
    pub out: PathBuf,
}

impl ResolvedJob {
    pub fn geometry(&self) -> Result<BaseGeometry> {
        BaseGeometry::new(self.base.dim, self.n)
    }

    pub fn rank_options(&self) -> RankOptions {
        RankOptions {
            monomial_cap: self.cap,
            parallel: true,
        }
    }

    fn config_json(&self) -> String {
        serde_json::to_string(self).expect("resolved job serializes")
    }
}

fn parse_large_sets(text: &str) -> Result<Vec<Vec<usize>>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|set| {
            set.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Usage(format!("`{e}` is not a point label")))
                })
                .collect()
        })
        .collect()
}

/// Merges the config file (if any) with the flags and validates the result.
pub fn resolve(args: &JobArgs) -> Result<ResolvedJob> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<JobConfig>(&text)
                .map_err(|e| Error::Usage(format!("invalid config {}: {e}", path.display())))?
        }
        None => JobConfig::default(),
    };
    if let Some(d) = args.d {
        cfg.base = Some(BaseSpec {
            kind: "projective".into(),
            dim: d,
        });
    }
    if args.n.is_some() {
        cfg.n = args.n;
    }
    if args.weights.is_some() {
        cfg.weights = args.weights.clone();
        cfg.large_sets = None;
    }
    if let Some(ls) = &args.large_sets {
        cfg.large_sets = Some(parse_large_sets(ls)?);
        cfg.weights = None;
    }
    cfg.fm |= args.fm;
    cfg.export_cas |= args.export_cas;
    if args.walk.is_some() {
        cfg.walk = args.walk;
    }
    if args.cap.is_some() {
        cfg.cap = args.cap;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    resolve_config(cfg)
}

pub fn resolve_config(cfg: JobConfig) -> Result<ResolvedJob> {
    let base = cfg
        .base
        .ok_or_else(|| Error::Usage("missing base dimension (--d)".into()))?;
    if base.kind != "projective" {
        return Err(Error::Usage(format!(
            "unsupported base kind `{}`",
            base.kind
        )));
    }
    if base.dim == 0 {
        return Err(Error::Usage("base dimension must be positive".into()));
    }
    let mut weights = cfg.weights;
    if cfg.fm && weights.is_none() && cfg.large_sets.is_none() {
        if let Some(n) = cfg.n {
            weights = Some(vec!["1".into(); n]);
        }
    }
    let (n, weights, family) = match (weights, cfg.large_sets) {
        (Some(_), Some(_)) => {
            return Err(Error::Usage(
                "give either weights or large sets, not both".into(),
            ))
        }
        (None, None) => return Err(Error::Usage("missing weights or large sets".into())),
        (Some(ws), None) => {
            let w = Weights::parse(&ws).map_err(|e| Error::Usage(e.to_string()))?;
            if cfg.n.is_some_and(|n| n != w.n()) {
                return Err(Error::Usage(format!(
                    "{} weights given for n = {}",
                    w.n(),
                    cfg.n.unwrap()
                )));
            }
            let canonical = ws
                .iter()
                .map(|s| parse_rational(s).map(|q| q.to_string()))
                .collect::<Result<Vec<_>>>()?;
            (w.n(), Some((w, canonical)), None)
        }
        (None, Some(sets)) => {
            let n = cfg
                .n
                .ok_or_else(|| Error::Usage("large sets need --n".into()))?;
            let subsets = sets
                .into_iter()
                .map(Subset::from_elems)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Usage(e.to_string()))?;
            let fam = LargeFamily::new(n, subsets).map_err(|e| Error::Usage(e.to_string()))?;
            (n, None, Some(fam))
        }
    };
    let family = match (&weights, family) {
        (Some((w, _)), _) => large_from_weights(w),
        (None, Some(f)) => f,
        (None, None) => unreachable!(),
    };
    if cfg.fm {
        let all_ones = match &weights {
            Some((w, _)) => w.is_all_ones(),
            None => family.is_all_subsets(),
        };
        if !all_ones {
            return Err(Error::Usage("--fm requires all weights equal to 1".into()));
        }
    }
    Ok(ResolvedJob {
        base,
        n,
        weights: weights.map(|(_, c)| c),
        large_sets: family.iter().collect(),
        fm: cfg.fm,
        export_cas: cfg.export_cas,
        walk: cfg.walk,
        cap: cfg.cap.unwrap_or(DEFAULT_MONOMIAL_CAP),
        family,
        out: cfg.out.unwrap_or_else(|| PathBuf::from("out")),
    })
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn build(job: &ResolvedJob) -> Result<Presentation> {
    let g = job.geometry()?;
    if job.fm {
        build_reduced(&g)
    } else {
        build_weighted(&g, &job.family)
    }
}

#[derive(Serialize)]
struct PresentJson<'a> {
    config: &'a ResolvedJob,
    kind: &'static str,
    #[serde(flatten)]
    presentation: crate::present::PresentationJson,
}

/// Writes `presentation.txt`, `presentation.json` and, if asked,
/// `presentation.sing`. Returns the written paths.
pub fn cmd_present(job: &ResolvedJob) -> Result<Vec<PathBuf>> {
    let p = build(job)?;
    let kind = if job.fm { "reduced" } else { "weighted" };
    let mut written = Vec::new();

    let text = format!(
        "# presentation: {kind}\n# config: {}\n{}",
        job.config_json(),
        p.dump()
    );
    let txt = job.out.join("presentation.txt");
    write_atomic(&txt, &text)?;
    written.push(txt);

    let json = PresentJson {
        config: job,
        kind,
        presentation: p.to_json(),
    };
    let path = job.out.join("presentation.json");
    write_atomic(&path, &(serde_json::to_string_pretty(&json)? + "\n"))?;
    written.push(path);

    if job.export_cas {
        let cas = format!("// config: {}\n{}", job.config_json(), p.to_singular());
        let path = job.out.join("presentation.sing");
        write_atomic(&path, &cas)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RanksOutput {
    pub config: ResolvedJob,
    pub presentation_ranks: RankTable,
    pub oracle_ranks: RankTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk_ranks: Option<Vec<RankTable>>,
    pub agree: bool,
}

pub fn compute_ranks(job: &ResolvedJob) -> Result<RanksOutput> {
    let g = job.geometry()?;
    let opts = job.rank_options();
    let presentation_ranks = graded_ranks_with(&build(job)?, &opts)?;
    let oracle_ranks = rank_oracle(g.d, g.n, &job.family);
    let walks = match job.walk {
        None => Vec::new(),
        Some(WalkChoice::Canonical) => vec![canonical_walk(&job.family)],
        Some(WalkChoice::All) => all_walks(&job.family, DEFAULT_WALK_CAP)?,
    };
    let walk_ranks = if job.walk.is_some() {
        Some(
            walks
                .iter()
                .map(|w| graded_ranks_with(&iterated_presentation(&g, &job.family, w)?, &opts))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let agree = presentation_ranks == oracle_ranks
        && walk_ranks.iter().flatten().all(|t| *t == oracle_ranks);
    Ok(RanksOutput {
        config: job.clone(),
        presentation_ranks,
        oracle_ranks,
        walk_ranks,
        agree,
    })
}

/// Writes `ranks.json`; returns the result and the path.
pub fn cmd_ranks(job: &ResolvedJob) -> Result<(RanksOutput, PathBuf)> {
    let out = compute_ranks(job)?;
    let path = job.out.join("ranks.json");
    write_atomic(&path, &(serde_json::to_string_pretty(&out)? + "\n"))?;
    Ok((out, path))
}

pub const SCENARIOS: [&str; 4] = [
    "counterexample",
    "equivalence",
    "construction",
    "coincidence",
];

/// Runs the named scenarios, or the default suite when `names` is empty.
pub fn run_scenarios(names: &[String], job: &JobArgs) -> Result<Vec<VerdictReport>> {
    if let Some(bad) = names.iter().find(|n| !SCENARIOS.contains(&n.as_str())) {
        return Err(Error::Usage(format!(
            "unknown scenario `{bad}` (expected one of {})",
            SCENARIOS.join(", ")
        )));
    }
    let opts = RankOptions {
        monomial_cap: job.cap.unwrap_or(DEFAULT_MONOMIAL_CAP),
        parallel: true,
    };
    if names.is_empty() {
        return verify::default_suite(&opts, DEFAULT_WALK_CAP);
    }
    let needs_instance = names.iter().any(|n| n != "counterexample");
    let resolved = if needs_instance {
        let mut args = job.clone();
        // Equivalence only needs d and n; default to all-ones weights.
        if args.weights.is_none() && args.large_sets.is_none() && args.config.is_none() {
            let n = args
                .n
                .ok_or_else(|| Error::Usage("scenario needs --n".into()))?;
            args.weights = Some(vec!["1".into(); n]);
        }
        Some(resolve(&args)?)
    } else {
        None
    };
    names
        .iter()
        .map(|name| {
            let r = resolved.as_ref();
            match name.as_str() {
                "counterexample" => verify::check_counterexample(),
                "equivalence" => {
                    let r = r.expect("resolved");
                    verify::check_equivalence(r.base.dim, r.n, &opts)
                }
                "construction" => {
                    let r = r.expect("resolved");
                    verify::check_construction(r.base.dim, r.n, &r.family, DEFAULT_WALK_CAP, &opts)
                }
                "coincidence" => {
                    let r = r.expect("resolved");
                    verify::check_coincidence(r.base.dim, r.n, &r.family, &opts)
                }
                _ => unreachable!("validated above"),
            }
        })
        .collect()
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded(_) => EXIT_CAP,
        Error::Usage(_) | Error::Argument(_) | Error::Parse(_) | Error::WalkOrder(_) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

fn report_file_name(r: &VerdictReport, k: usize) -> String {
    let mut name = format!("{k:02}-{}", r.scenario);
    if let Some(obj) = r.params.as_object() {
        for key in ["d", "n"] {
            if let Some(v) = obj.get(key) {
                name.push_str(&format!("-{key}{v}"));
            }
        }
    }
    name + ".json"
}

/// Dispatches a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Present(args) => resolve(&args).and_then(|job| {
            for path in cmd_present(&job)? {
                println!("wrote {}", path.display());
            }
            Ok(EXIT_OK)
        }),
        Command::Ranks(args) => resolve(&args).and_then(|job| {
            let (out, path) = cmd_ranks(&job)?;
            println!("presentation ranks: {}", out.presentation_ranks);
            println!("oracle ranks:       {}", out.oracle_ranks);
            for t in out.walk_ranks.iter().flatten() {
                println!("walk ranks:         {t}");
            }
            println!("agree: {}", out.agree);
            println!("wrote {}", path.display());
            Ok(if out.agree { EXIT_OK } else { EXIT_FAILED })
        }),
        Command::Verify(args) => run_scenarios(&args.names, &args.job).and_then(|reports| {
            let dir = args
                .job
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("out"))
                .join("reports");
            let mut all = true;
            for (k, r) in reports.iter().enumerate() {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!(
                    "{status} {} {} ({} ms)",
                    r.scenario, r.params, r.duration_ms
                );
                all &= r.passed;
                write_atomic(
                    &dir.join(report_file_name(r, k)),
                    &(serde_json::to_string_pretty(r)? + "\n"),
                )?;
            }
            Ok(if all { EXIT_OK } else { EXIT_FAILED })
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
