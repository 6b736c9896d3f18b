use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use lambda_sync::builtins::builtin;
use lambda_sync::certificate::{Certificate, Status};
use lambda_sync::lambda_graph::{to_dot, to_json, to_text};
use lambda_sync::language::Oracle;
use lambda_sync::matrix::InvariantReport;
use lambda_sync::pipeline::{self, Comparison, RunConfig, Verdict};
use lambda_sync::presentations::PresentationDocument;
use lambda_sync::Error;

#[derive(Parser)]
#[command(name = "lsync", version, about = "λ-graph systems and matrix invariants of subshifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify property (D) and λ-synchronization.
    Check(Opts),
    /// Build the λ-synchronizing λ-graph system and verify it.
    Build(Opts),
    /// Groups, dimension data, entropies and simplicity conditions.
    Invariants(Opts),
    /// Side-by-side invariants of two presentations (give two sources).
    Compare(Opts),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
struct Opts {
    /// Builtin presentation, e.g. golden-mean, reversed-even-shift, block-2-full-2.
    #[arg(long = "builtin", value_name = "NAME")]
    builtins: Vec<String>,
    /// Presentation document (JSON).
    #[arg(long = "file", value_name = "PATH")]
    files: Vec<PathBuf>,
    #[arg(short = 'L', long = "max-level", default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    max_level: u32,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    max_word_len: u32,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    follower_horizon: u32,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    tail_len: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Rebuild at larger horizons and flag the system STABLE when both agree.
    #[arg(long)]
    stability_recheck: bool,
    /// Write outputs into this directory instead of stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

struct Source {
    label: String,
    oracle: Oracle,
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            max_level: self.max_level as usize,
            max_word_len: self.max_word_len as usize,
            follower_horizon: self.follower_horizon as usize,
            tail_len: self.tail_len as usize,
            stability_recheck: self.stability_recheck,
        }
    }

    fn sources(&self) -> anyhow::Result<Vec<Source>> {
        let mut out = Vec::new();
        for name in &self.builtins {
            out.push(Source {
                label: name.clone(),
                oracle: builtin(name)?,
            });
        }
        for path in &self.files {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            out.push(Source {
                label: path.display().to_string(),
                oracle: PresentationDocument::from_json(&text)?.oracle()?,
            });
        }
        Ok(out)
    }

    fn single(&self) -> anyhow::Result<Source> {
        let mut s = self.sources()?;
        if s.len() != 1 {
            bail!("expected exactly one of --builtin or --file, got {}", s.len());
        }
        Ok(s.remove(0))
    }
}

/// Maps a run outcome to the process exit code.
fn status_code(s: Status) -> u8 {
    match s {
        Status::Verified => 0,
        Status::Refuted => 2,
        Status::Inconclusive => 3,
    }
}

fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::EmptySyncLevel(_) | Error::HorizonExceeded { .. }) => 3,
        Some(Error::CommutationFailure { .. }) => 2,
        _ => 1,
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

struct Output {
    files: Vec<(String, String)>,
    summary: String,
}

fn emit(opts: &Opts, out: Output) -> anyhow::Result<()> {
    match &opts.out {
        None => {
            for (_, body) in &out.files {
                print!("{body}");
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, body) in &out.files {
                let path = dir.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}", out.summary);
        }
    }
    Ok(())
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Text => "txt",
    }
}

fn render_certificate(out: &mut String, c: &Certificate) {
    let exact = if c.exact { ", exact" } else { "" };
    let _ = writeln!(
        out,
        "{}: {} (checked {}, horizon {}/{}{exact})",
        c.property, c.status, c.checked, c.horizon.word_length_bound, c.horizon.follower_horizon
    );
    if let Some(w) = &c.witness {
        let items: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "  witness: {}", items.join(", "));
    }
    for f in c.failures.iter().take(5) {
        let ev: Vec<String> = f.evidence.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "  unwitnessed: {} {}", f.subject, ev.join(", ").trim());
    }
    if c.failures.len() > 5 {
        let _ = writeln!(out, "  ... {} more", c.failures.len() - 5);
    }
    if c.inherited_failures > 0 {
        let _ = writeln!(out, "  inherited failures: {}", c.inherited_failures);
    }
    for n in &c.notes {
        let _ = writeln!(out, "  note: {n}");
    }
}

fn no_dot(opts: &Opts, cmd: &str) -> anyhow::Result<()> {
    if opts.format == Format::Dot {
        bail!("--format dot is only available for build, not {cmd}");
    }
    Ok(())
}

fn cmd_check(opts: &Opts) -> anyhow::Result<u8> {
    no_dot(opts, "check")?;
    let src = opts.single()?;
    let cfg = opts.config();
    let certs = pipeline::check(src.oracle.as_ref(), &cfg);
    let status = pipeline::overall_status(&certs);
    let body = match opts.format {
        Format::Json => pretty(&json!({
            "oracle": src.label,
            "config": cfg,
            "status": status,
            "certificates": certs,
        })),
        _ => {
            let mut s = format!("{}\n", src.label);
            for c in &certs {
                render_certificate(&mut s, c);
            }
            s
        }
    };
    emit(
        opts,
        Output {
            files: vec![(format!("check.{}", extension(opts.format)), body)],
            summary: format!("{}: {status}\n", src.label),
        },
    )?;
    Ok(status_code(status))
}

fn cmd_build(opts: &Opts) -> anyhow::Result<u8> {
    let src = opts.single()?;
    let cfg = opts.config();
    let lambda_sync = lambda_sync::synchronization::check_lambda_synchronizing(src.oracle.as_ref(), cfg.horizon());
    if lambda_sync.status == Status::Refuted {
        let mut s = format!("{}: not λ-synchronizing, no system built\n", src.label);
        render_certificate(&mut s, &lambda_sync);
        eprint!("{s}");
        return Ok(status_code(Status::Refuted));
    }
    let report = pipeline::build(src.oracle.as_ref(), &cfg)?;
    let status = report.status();
    let g = &report.system;
    let system = match opts.format {
        Format::Json => pretty(&to_json(g)),
        Format::Dot => to_dot(g),
        Format::Text => to_text(g),
    };
    let stable = match g.provenance.stable {
        Some(true) => "STABLE",
        Some(false) => "UNSTABLE",
        None => "not rechecked",
    };
    let mut text = format!(
        "{}\nvertex counts: {:?}\nstability: {stable}\naxioms: {} ({} failures)\n",
        src.label,
        g.vertex_counts(),
        if report.axioms.passed() { "pass" } else { "FAIL" },
        report.axioms.failures.len()
    );
    let _ = writeln!(
        text,
        "left-resolving: {}, predecessor-separated: {}, embeds in canonical: {}",
        report.structure.left_resolving,
        report.structure.predecessor_separated,
        report.structure.embeds_in_canonical.map_or("n/a".into(), |b| b.to_string())
    );
    let _ = writeln!(
        text,
        "path labels of length {}: {} of {} words, {} missing, {} extra",
        report.presents.n,
        report.presents.path_labels,
        report.presents.language_size,
        report.presents.missing.len(),
        report.presents.extra.len()
    );
    for f in &report.axioms.failures {
        let _ = writeln!(text, "  axiom failure: {f:?}");
    }
    for f in &report.structure.failures {
        let _ = writeln!(text, "  structural failure: {f}");
    }
    let _ = writeln!(text, "status: {status}");
    let report_body = match opts.format {
        Format::Text => text.clone(),
        _ => pretty(&json!({
            "oracle": src.label,
            "config": cfg,
            "status": status,
            "vertex_counts": g.vertex_counts(),
            "provenance": g.provenance,
            "axioms": report.axioms,
            "structure": report.structure,
            "presents": report.presents,
        })),
    };
    let files = match (&opts.out, opts.format) {
        // Only the system itself goes to stdout.
        (None, Format::Json | Format::Dot) => vec![("system".to_string(), system)],
        (None, Format::Text) => vec![("system".to_string(), system), ("report".to_string(), text.clone())],
        (Some(_), f) => vec![
            (format!("system.{}", extension(f)), system),
            (
                format!("report.{}", if f == Format::Text { "txt" } else { "json" }),
                report_body,
            ),
        ],
    };
    emit(opts, Output { files, summary: text })?;
    Ok(status_code(status))
}

fn render_invariants(r: &InvariantReport) -> String {
    let mut s = format!("{}\nvertex counts: {:?}\n", r.oracle, r.vertex_counts);
    for (name, seq) in r.groups.named() {
        let _ = writeln!(s, "{name}: {}", seq.render());
    }
    for (k, v) in &r.ext {
        let _ = writeln!(s, "{k}: {v}");
    }
    let _ = writeln!(
        s,
        "λ-entropy: {:.9}\nvolume entropy: {:.9}{}",
        r.lambda_entropy.estimate(),
        r.volume_entropy.estimate(),
        if r.volume_entropy.limit.is_some() { " (stationary)" } else { "" }
    );
    let _ = writeln!(s, "dimension data commutes: {}", r.dimension.commutes);
    for c in &r.certificates {
        render_certificate(&mut s, c);
    }
    let _ = writeln!(s, "simplicity hypotheses: {}", r.simplicity.hypotheses);
    let _ = writeln!(s, "{}", r.simplicity.conclusion);
    s
}

fn cmd_invariants(opts: &Opts) -> anyhow::Result<u8> {
    no_dot(opts, "invariants")?;
    let src = opts.single()?;
    let cfg = opts.config();
    let report = pipeline::invariants(src.oracle.as_ref(), &src.label, &cfg)?;
    let status = pipeline::overall_status(&report.certificates);
    let body = match opts.format {
        Format::Json => pretty(&json!({ "config": cfg, "status": status, "report": report })),
        _ => render_invariants(&report),
    };
    let summary = format!(
        "{}: K0 {}, BF0 {}, volume entropy {:.6}, {status}\n",
        src.label,
        report.groups.k0.render(),
        report.groups.bf0.render(),
        report.volume_entropy.estimate()
    );
    emit(
        opts,
        Output {
            files: vec![(format!("invariants.{}", extension(opts.format)), body)],
            summary,
        },
    )?;
    Ok(status_code(status))
}

fn render_comparison(c: &Comparison) -> String {
    let mut s = format!("{} vs {}\n", c.left, c.right);
    for r in &c.rows {
        let _ = writeln!(s, "{:<15} {:<10} {} | {}", r.invariant, format!("{:?}", r.verdict).to_uppercase(), r.left, r.right);
    }
    s
}

fn cmd_compare(opts: &Opts) -> anyhow::Result<u8> {
    no_dot(opts, "compare")?;
    let sources = opts.sources()?;
    if sources.len() != 2 {
        bail!("compare needs exactly two sources, got {}", sources.len());
    }
    let cfg = opts.config();
    let a = pipeline::invariants(sources[0].oracle.as_ref(), &sources[0].label, &cfg)?;
    let b = pipeline::invariants(sources[1].oracle.as_ref(), &sources[1].label, &cfg)?;
    let cmp = pipeline::compare_reports(&a, &b);
    let verdict = cmp.verdict();
    let body = match opts.format {
        Format::Json => pretty(&json!({ "config": cfg, "verdict": verdict, "comparison": cmp })),
        _ => render_comparison(&cmp),
    };
    emit(
        opts,
        Output {
            files: vec![(format!("compare.{}", extension(opts.format)), body)],
            summary: format!("{} vs {}: {verdict:?}\n", cmp.left, cmp.right),
        },
    )?;
    Ok(match verdict {
        Verdict::Match => 0,
        Verdict::Mismatch => 2,
        Verdict::Unstable => 3,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Check(o) => cmd_check(o),
        Command::Build(o) => cmd_build(o),
        Command::Invariants(o) => cmd_invariants(o),
        Command::Compare(o) => cmd_compare(o),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
