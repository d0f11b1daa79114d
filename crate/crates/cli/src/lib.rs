//! Library behind the `courant-kit` binary: input documents, commands, reports.

pub mod commands;
pub mod corpus;
pub mod doc;
pub mod error;
pub mod report;

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use courant_core::field::Q;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub use error::{CliError, Outcome};
pub use report::{Check, Provenance, Report, SectionReport, Status};

pub const SCHEMA: &str = include_str!("../schema/input.schema.json");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckLie,
    InvariantForms,
    Signature,
    CheckCourant,
    CheckGacs,
    Integrability,
    Nondeg,
    Ldata,
    Transport,
    NormalForm,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckLie => "check-lie",
            Command::InvariantForms => "invariant-forms",
            Command::Signature => "signature",
            Command::CheckCourant => "check-courant",
            Command::CheckGacs => "check-gacs",
            Command::Integrability => "integrability",
            Command::Nondeg => "nondeg",
            Command::Ldata => "ldata",
            Command::Transport => "transport",
            Command::NormalForm => "normal-form",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    #[serde(rename = "18")]
    S18,
    #[serde(rename = "10")]
    S10,
    Oracle,
    #[default]
    All,
}

impl std::str::FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "18" => Ok(Suite::S18),
            "10" => Ok(Suite::S10),
            "oracle" => Ok(Suite::Oracle),
            "all" => Ok(Suite::All),
            _ => Err(CliError::Option(format!("--suite must be 18, 10, oracle or all, not {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NondegMode {
    Complete,
    Check,
    #[default]
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct Options {
    pub suite: Suite,
    #[serde(serialize_with = "ser_points")]
    pub points: Vec<Vec<Q>>,
    pub seed: u64,
    pub trials: usize,
    pub parallel: bool,
    pub nondeg: NondegMode,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { suite: Suite::All, points: Vec::new(), seed: 0, trials: 20, parallel: false, nondeg: NondegMode::Both, timings: false }
    }
}

fn ser_points<S: serde::Serializer>(p: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = p.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect();
    v.serialize(s)
}

/// Parses `"1,0,-1/2"`.
pub fn parse_point(s: &str) -> Result<Vec<Q>, CliError> {
    s.split(',')
        .map(|t| {
            courant_core::field::parse_rational(t.trim())
                .ok_or_else(|| CliError::Option(format!("--point {s:?}: {t:?} is not a rational")))
        })
        .collect()
}

/// One unit of work: a command on a document, with the checks expected to fail.
#[derive(Clone, Debug)]
pub struct Job {
    pub name: String,
    pub command: Command,
    pub doc: Value,
    pub options: Options,
    pub expect: BTreeMap<String, Status>,
    pub expect_values: BTreeMap<String, Value>,
}

impl Job {
    pub fn new(name: impl Into<String>, command: Command, doc: Value) -> Self {
        Job {
            name: name.into(),
            command,
            doc,
            options: Options::default(),
            expect: BTreeMap::new(),
            expect_values: BTreeMap::new(),
        }
    }

    pub fn expect_fail(mut self, check: &str) -> Self {
        self.expect.insert(check.to_string(), Status::Fail);
        self
    }

    pub fn expect_value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.expect_values.insert(key.to_string(), v.into());
        self
    }

    pub fn with_options(mut self, f: impl FnOnce(&mut Options)) -> Self {
        f(&mut self.options);
        self
    }
}

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let schema: Value = serde_json::from_str(SCHEMA).expect("bundled schema is JSON");
        jsonschema::validator_for(&schema).expect("bundled schema is valid")
    })
}

/// Validates against the bundled schema; the first violation is reported with its JSON pointer.
pub fn validate(doc: &Value) -> Result<(), CliError> {
    let mut errs: Vec<(String, String)> =
        validator().iter_errors(doc).map(|e| (e.instance_path().as_str().to_string(), e.to_string())).collect();
    errs.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    match errs.into_iter().next() {
        None => Ok(()),
        Some((pointer, message)) => Err(CliError::Schema { pointer: if pointer.is_empty() { "/".into() } else { pointer }, message }),
    }
}

pub fn run_job(job: &Job) -> Result<SectionReport, CliError> {
    validate(&job.doc)?;
    let mut sec = SectionReport::new(&job.name, job.command.name());
    let start = Instant::now();
    commands::execute(job.command, &job.doc, &job.options, &mut sec)?;
    for (key, want) in &job.expect_values {
        let got = sec.values.get(key).cloned();
        let ok = got.as_ref() == Some(want);
        let detail = format!("expected {want}, got {}", got.map_or("nothing".to_string(), |g| g.to_string()));
        sec.flag_with(&format!("value {key}"), ok, detail);
    }
    for (name, status) in &job.expect {
        match sec.check_mut(name) {
            Some(c) => c.expected = *status,
            None => {
                sec.flag_with(&format!("expected check {name:?} present"), false, "the command did not produce it");
            }
        }
    }
    if job.options.timings {
        sec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(sec)
}

/// Runs jobs in parallel, keeping their order.
pub fn run_jobs(jobs: &[Job]) -> Result<Vec<SectionReport>, CliError> {
    jobs.par_iter().map(run_job).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn provenance(input: &[u8], opts: &Options) -> Provenance {
    Provenance {
        tool_version: VERSION.to_string(),
        input_sha256: sha256_hex(input),
        seed: opts.seed,
        options: serde_json::to_value(opts).expect("options serialize"),
    }
}

/// Runs `command` on a document read from `bytes`.
pub fn run_document(command: Command, bytes: &[u8], opts: &Options) -> Result<Report, CliError> {
    let doc: Value = serde_json::from_slice(bytes)?;
    let job = Job { options: opts.clone(), ..Job::new("input", command, doc) };
    let sec = run_job(&job)?;
    Ok(Report::new(command.name(), provenance(bytes, opts), vec![sec]))
}

/// Runs a named corpus entry.
pub fn run_corpus(name: &str, opts: &Options) -> Result<Report, CliError> {
    let jobs = corpus::jobs(name, opts)?;
    let docs: Vec<&Value> = jobs.iter().map(|j| &j.doc).collect();
    let bytes = serde_json::to_vec(&docs)?;
    let sections = run_jobs(&jobs)?;
    Ok(Report::new(&format!("corpus {name}"), provenance(&bytes, opts), sections))
}
