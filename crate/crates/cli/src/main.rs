//! `piiguard` command-line front end.

mod serve;
mod settings;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use piiguard::eval::{self, AnnotatedRecord, CorpusSpec, MatchMode, PredictionRecord};
use piiguard::triage::{self, SuppressionEntry, SuppressionStore, TriageReport};
use piiguard::{EntityType, Error, GuardReport, Verdict};

use settings::{FlagValues, Settings};

const EXIT_OK: u8 = 0;
const EXIT_VIOLATIONS: u8 = 2;
const EXIT_BLOCKED: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Debug, Parser)]
#[command(name = "piiguard", version, about = "Detect, score and redact personal data in text and pull requests")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML config file (env: PIIGUARD_CONFIG).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in template id or template file (env: PIIGUARD_TEMPLATE).
    #[arg(long, global = true, value_name = "ID|PATH")]
    template: Option<String>,
    /// Comma-separated locale tags (env: PIIGUARD_LOCALES).
    #[arg(long, global = true, value_name = "LIST")]
    locales: Option<String>,
    /// Comma-separated entity types to skip (env: PIIGUARD_DISABLED_TYPES).
    #[arg(long, global = true, value_name = "LIST")]
    disable_types: Option<String>,
    /// Bits per character above which a token counts as a secret (env: PIIGUARD_ENTROPY_THRESHOLD).
    #[arg(long, global = true, value_name = "BITS")]
    entropy_threshold: Option<f64>,
    /// Suppression store file (env: PIIGUARD_SUPPRESSIONS).
    #[arg(long, global = true, value_name = "PATH")]
    suppressions: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan one document. Exit 0 pass, 2 masked, 3 blocked.
    Scan {
        /// Document path, or `-` for standard input.
        file: PathBuf,
        /// Write the JSON report here (`-` for standard output).
        #[arg(long, value_name = "PATH")]
        report: Option<String>,
        #[arg(long)]
        doc_id: Option<String>,
    },
    /// Print the masked document. Exit codes as for `scan`.
    Mask { file: PathBuf },
    /// Triage a pull request directory or export file.
    TriagePr {
        source: PathBuf,
        #[arg(long, value_name = "PATH")]
        report: Option<String>,
    },
    /// Reviewer feedback.
    Feedback {
        #[command(subcommand)]
        action: FeedbackCommand,
    },
    /// Score predictions against an annotated corpus.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        /// Prediction file; when omitted the pipeline predicts.
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long, default_value = "exact")]
        mode: MatchMode,
        #[arg(long, value_name = "PATH")]
        report: Option<String>,
    },
    /// Write the pipeline's predictions for a corpus.
    Predict {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Measure scan latency over a corpus.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = eval::latency::MIN_ITERATIONS)]
        iterations: usize,
        #[arg(long, value_name = "PATH")]
        report: Option<String>,
    },
    /// Generate a synthetic annotated corpus.
    GenCorpus {
        #[arg(long)]
        seed: u64,
        /// Corpus spec (TOML). Defaults to 10 records per locale and type, 30% negative.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Guard length-prefixed documents from standard input.
    Serve,
}

#[derive(Debug, Subcommand)]
enum FeedbackCommand {
    /// Record a false-positive verdict.
    Add {
        /// Fingerprint as printed by `triage-pr`.
        #[arg(long, conflicts_with_all = ["file", "from_report"])]
        fingerprint: Option<String>,
        /// Compute the fingerprint from a mention in this file.
        #[arg(long, requires_all = ["start", "end", "entity_type"], conflicts_with = "from_report")]
        file: Option<PathBuf>,
        #[arg(long)]
        start: Option<usize>,
        #[arg(long)]
        end: Option<usize>,
        #[arg(long = "type")]
        entity_type: Option<EntityType>,
        /// Suppress every flagged mention of a saved triage report.
        #[arg(long)]
        from_report: Option<PathBuf>,
        #[arg(long, env = "PIIGUARD_REVIEWER", default_value = "unknown")]
        reviewer: String,
    },
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => EXIT_IO,
            Error::Contract(_) => EXIT_SOFTWARE,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_error(what: &str, e: io::Error) -> CliError {
    CliError {
        code: EXIT_IO,
        message: format!("I/O error on {what}: {e}"),
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_error("standard input", e))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| io_error(&path.display().to_string(), e))
    }
}

fn write_output(dest: &str, bytes: &[u8]) -> CliResult<()> {
    if dest == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| io_error("standard output", e))
    } else {
        std::fs::write(dest, bytes).map_err(|e| io_error(dest, e))
    }
}

fn json_pretty<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("report serializes");
    s.push(b'\n');
    s
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => EXIT_OK,
        Verdict::Masked => EXIT_VIOLATIONS,
        Verdict::Blocked => EXIT_BLOCKED,
    }
}

fn print_scan_summary(report: &GuardReport) {
    println!("verdict: {:?}", report.verdict);
    for (i, m) in report.mentions.iter().enumerate() {
        let level = report.assessment_for(i).map_or(0, |a| a.level.number());
        println!(
            "  {}..{}  {:<15} L{}  {:?}  {:?}",
            m.span.start,
            m.span.end,
            m.entity_type.name(),
            level,
            report.action_for(i),
            m.surface
        );
    }
}

fn print_triage_summary(r: &TriageReport) {
    let state = if r.flagged { "flagged" } else { "clean" };
    println!("{}: {state} ({} reasons, {} suppressed)", r.pr_id, r.flag_reasons.len(), r.suppressed.len());
    for f in &r.flag_reasons {
        println!(
            "  {}  {:<15} L{}  {:?}  {}  {}",
            f.file,
            f.entity_type.name(),
            f.level.number(),
            f.action,
            f.rule_id,
            f.fingerprint
        );
    }
    for s in &r.skipped {
        println!("  skipped {} ({})", s.path, s.reason);
    }
}

fn read_corpus(path: &Path) -> CliResult<Vec<AnnotatedRecord>> {
    let records: Vec<AnnotatedRecord> = eval::read_jsonl(path)?;
    let problems: Vec<String> = records.iter().flat_map(AnnotatedRecord::problems).collect();
    if !problems.is_empty() {
        return Err(usage(format!("invalid corpus: {}", problems.join("; "))));
    }
    Ok(records)
}

fn jsonl<T: serde::Serialize>(items: &[T]) -> Vec<u8> {
    let mut buf = Vec::new();
    eval::write_jsonl(&mut buf, items).expect("writing to memory");
    buf
}

fn run(cli: Cli) -> CliResult<u8> {
    let g = &cli.global;
    let flags = FlagValues {
        config: g.config.clone(),
        template: g.template.clone(),
        locales: g.locales.clone(),
        disabled_types: g.disable_types.clone(),
        entropy_threshold: g.entropy_threshold,
        suppressions: g.suppressions.clone(),
    };
    let settings = Settings::resolve(&flags, |k| std::env::var(k).ok())?;

    match cli.command {
        Command::Scan { file, report, doc_id } => {
            let guard = settings.guard()?;
            let text = read_input(&file)?;
            let id = doc_id.unwrap_or_else(|| file.display().to_string());
            let r = guard.scan(&id, &text)?;
            match report {
                Some(dest) => write_output(&dest, &json_pretty(&r))?,
                None => print_scan_summary(&r),
            }
            Ok(verdict_code(r.verdict))
        }
        Command::Mask { file } => {
            let guard = settings.guard()?;
            let text = read_input(&file)?;
            let r = guard.scan(&file.display().to_string(), &text)?;
            match &r.masked_text {
                Some(m) => write_output("-", m.as_bytes())?,
                None => eprintln!("document blocked by policy; nothing printed"),
            }
            Ok(verdict_code(r.verdict))
        }
        Command::TriagePr { source, report } => {
            let guard = settings.guard()?;
            let pr = triage::ingest(&source)?;
            let snapshot = match &settings.suppressions {
                Some(p) => SuppressionStore::open(p)?.snapshot(),
                None => Default::default(),
            };
            let r = triage::triage(&pr, &guard, &snapshot)?;
            match report {
                Some(dest) => write_output(&dest, &json_pretty(&r))?,
                None => print_triage_summary(&r),
            }
            Ok(if r.blocked() {
                EXIT_BLOCKED
            } else if r.flagged {
                EXIT_VIOLATIONS
            } else {
                EXIT_OK
            })
        }
        Command::Feedback {
            action:
                FeedbackCommand::Add {
                    fingerprint,
                    file,
                    start,
                    end,
                    entity_type,
                    from_report,
                    reviewer,
                },
        } => {
            let path = settings
                .suppressions
                .clone()
                .ok_or_else(|| usage("a suppression store is required (--suppressions or PIIGUARD_SUPPRESSIONS)"))?;
            let mut store = SuppressionStore::open(&path)?;
            if let Some(report) = from_report {
                let r: TriageReport = serde_json::from_str(&read_input(&report)?)
                    .map_err(|e| usage(format!("{}: not a triage report: {e}", report.display())))?;
                let added = triage::suppress_all(&r, &mut store, &reviewer)?;
                println!("recorded {added} new suppression(s) from {}", r.pr_id);
                return Ok(EXIT_OK);
            }
            let fp = match (fingerprint, file) {
                (Some(fp), None) => fp,
                (None, Some(file)) => {
                    let text = read_input(&file)?;
                    let (s, e, ty) = (start.unwrap_or(0), end.unwrap_or(0), entity_type.expect("required by clap"));
                    if s >= e || e > text.len() || !text.is_char_boundary(s) || !text.is_char_boundary(e) {
                        return Err(usage(format!("span {s}..{e} is not a valid mention span in {}", file.display())));
                    }
                    triage::fingerprint(&text, s, e, ty)
                }
                _ => return Err(usage("give one of --fingerprint, --file or --from-report")),
            };
            let fresh = store.record(SuppressionEntry::false_positive(&fp, &reviewer))?;
            println!("{} {fp}", if fresh { "recorded" } else { "already recorded" });
            Ok(EXIT_OK)
        }
        Command::Eval {
            corpus,
            predictions,
            mode,
            report,
        } => {
            let gold = read_corpus(&corpus)?;
            let preds: Vec<PredictionRecord> = match predictions {
                Some(p) => eval::read_jsonl(&p)?,
                None => eval::predict(&settings.guard()?, &gold)?,
            };
            let metrics = eval::score(&preds, &gold, mode)?;
            write_output(report.as_deref().unwrap_or("-"), &json_pretty(&metrics))?;
            Ok(EXIT_OK)
        }
        Command::Predict { corpus, out } => {
            let gold = read_corpus(&corpus)?;
            let preds = eval::predict(&settings.guard()?, &gold)?;
            write_output(&out, &jsonl(&preds))?;
            Ok(EXIT_OK)
        }
        Command::Bench {
            corpus,
            iterations,
            report,
        } => {
            let docs: Vec<String> = read_corpus(&corpus)?.into_iter().map(|r| r.text).collect();
            let r = eval::bench_latency(&docs, &settings.guard()?, iterations)?;
            write_output(report.as_deref().unwrap_or("-"), &json_pretty(&r))?;
            Ok(EXIT_OK)
        }
        Command::GenCorpus { seed, spec, out } => {
            let spec = match spec {
                Some(p) => CorpusSpec::load(&p)?,
                None => CorpusSpec::full(10, 0.3),
            };
            write_output(&out, &jsonl(&eval::generate_corpus(seed, &spec)))?;
            Ok(EXIT_OK)
        }
        Command::Serve => {
            let guard = settings.guard()?;
            let mut input = io::stdin().lock();
            let mut output = io::stdout().lock();
            serve::serve(&guard, &mut input, &mut output).map_err(|e| io_error("serve stream", e))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("piiguard: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
