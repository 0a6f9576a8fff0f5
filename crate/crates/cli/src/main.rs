use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use waring_core::apolarity::{binary_decompose, binary_rank, parse_decomposition};
use waring_core::decompose::{decompose_ternary_quintic, verify, DecomposeOptions};
use waring_core::lineconfig::refine_configuration;
use waring_core::poly::{parse_form, parse_forms};
use waring_core::ranklocus::build_r;
use waring_core::selftest::{run_all, SelftestOptions};
use waring_core::{DualForm, Error, HomogeneousForm, Scalar, TolerancePolicy};

const EXIT_FAILURE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "waring", version, about = "Waring decompositions of binary forms and ternary quintics")]
struct Cli {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true, default_value_t = 256)]
    precision: usize,
    /// Seed for every random choice. WARING_SEED is used when the flag is absent.
    #[arg(long, global = true, env = "WARING_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 64)]
    max_retries: usize,
    /// Append output to this file instead of writing to stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// A form read from a file (`-` for stdin) or given inline, with `;` for newlines.
#[derive(Args, Debug)]
struct FormInput {
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "path")]
    inline: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Waring rank of a binary form, with a minimal decomposition.
    Rank(FormInput),
    /// Decompose a ternary quintic (or a binary form) into powers of linear forms.
    Decompose(FormInput),
    /// Residual of a decomposition against a form.
    Verify {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        decomposition: PathBuf,
    },
    /// Dump the rank-two pencil r, the forms aⁱ and the exceptional set.
    Pencil {
        /// Factors lⁱ as `a b` pairs separated by `;`.
        #[arg(long)]
        factors: String,
        #[arg(long, default_value = "1 0")]
        x0: String,
        #[arg(long, default_value = "0 1")]
        x1: String,
    },
    /// Find and certify an apolar line configuration of a ternary quintic.
    Lines(FormInput),
    /// Decompose every form of a file, one report line each.
    Batch { path: PathBuf },
    /// Run the acceptance suite.
    Selftest,
}

/// Failures mapped to exit codes: usage and parse errors give 3, the rest 2.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Run(e.to_string())
        }
    }
}

struct Ctx {
    policy: TolerancePolicy,
    seed: u64,
    max_retries: usize,
}

impl Ctx {
    fn opts(&self, seed: u64) -> DecomposeOptions {
        DecomposeOptions {
            seed,
            max_retries: self.max_retries,
            policy: self.policy,
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))
}

fn load_form(input: &FormInput, ctx: &Ctx) -> Result<HomogeneousForm, Failure> {
    let text = match (&input.inline, &input.path) {
        (Some(s), _) => s.replace(';', "\n"),
        (None, Some(p)) => read_text(p)?,
        (None, None) => read_text(Path::new("-"))?,
    };
    Ok(parse_form(&text, ctx.policy.precision_bits)?)
}

fn parse_pair(s: &str, prec: usize) -> Result<[Scalar; 2], Failure> {
    let v: Vec<Scalar> = s
        .split_whitespace()
        .map(|t| Scalar::parse(t, prec))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| Failure::Usage(format!("expected two coefficients, got `{s}`")))
}

fn rank(f: &HomogeneousForm, ctx: &Ctx) -> Result<String, Failure> {
    if f.nvars() != 2 {
        return Err(Failure::Usage(format!(
            "rank needs a binary form, got {} variables",
            f.nvars()
        )));
    }
    let r = binary_rank(f, &ctx.policy)?;
    let d = binary_decompose(f, &ctx.policy)?;
    Ok(format!("rank = {r}\n{d}"))
}

fn decompose(f: &HomogeneousForm, ctx: &Ctx) -> Result<String, Failure> {
    if f.nvars() == 2 {
        return Ok(binary_decompose(f, &ctx.policy)?.to_string());
    }
    let d = decompose_ternary_quintic(f, &ctx.opts(ctx.seed))?;
    // the report goes out as comments so the output parses as a decomposition
    let mut out = d.decomposition.to_string();
    for line in d.report.to_string().lines() {
        writeln!(out, "# {line}").unwrap();
    }
    Ok(out)
}

fn verify_cmd(form: &Path, dec: &Path, ctx: &Ctx) -> Result<String, Failure> {
    let f = parse_form(&read_text(form)?, ctx.policy.precision_bits)?;
    let d = parse_decomposition(&read_text(dec)?, f.degree(), ctx.policy.precision_bits)?;
    let r = verify(&f, &d)?;
    let line = format!("residual = {r:e}\n");
    if r > ctx.policy.zero_threshold {
        return Err(Failure::Run(format!(
            "{line}residual exceeds threshold {:e}",
            ctx.policy.zero_threshold
        )));
    }
    Ok(line)
}

fn pencil(factors: &str, x0: &str, x1: &str, ctx: &Ctx) -> Result<String, Failure> {
    let prec = ctx.policy.precision_bits;
    let ls: Vec<DualForm> = factors
        .split(';')
        .map(|s| parse_pair(s, prec).map(|c| DualForm::linear(&c)))
        .collect::<Result<_, _>>()?;
    let x0 = HomogeneousForm::linear(&parse_pair(x0, prec)?);
    let x1 = HomogeneousForm::linear(&parse_pair(x1, prec)?);
    let pen = build_r(&ls, &x0, &x1, &ctx.policy)?;
    let mut out = String::new();
    writeln!(out, "d = {}", pen.d).unwrap();
    for (j, row) in pen.r.rows().iter().enumerate() {
        write!(out, "# r row {j}\n{row}").unwrap();
    }
    for (i, a) in pen.a.iter().enumerate() {
        let c = a.coeffs();
        writeln!(out, "a{} = {} {}", i + 1, c[0], c[1]).unwrap();
    }
    for p in pen.exceptional_set() {
        writeln!(out, "X = {} {}", p[0], p[1]).unwrap();
    }
    Ok(out)
}

fn lines(f: &HomogeneousForm, ctx: &Ctx) -> Result<String, Failure> {
    let cfg = refine_configuration(f, ctx.seed, ctx.max_retries, &ctx.policy)?;
    Ok(cfg.to_string())
}

/// Returns the report and whether every form succeeded.
fn batch(path: &Path, ctx: &Ctx) -> Result<(String, bool), Failure> {
    let forms = parse_forms(&read_text(path)?, ctx.policy.precision_bits)?;
    let lines: Vec<(String, bool)> = forms
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let opts = ctx.opts(ctx.seed.wrapping_add(i as u64));
            let res = if f.nvars() == 2 {
                binary_decompose(f, &ctx.policy)
            } else {
                decompose_ternary_quintic(f, &opts).map(|d| d.decomposition)
            };
            match res {
                Ok(d) => (
                    format!("form {i}: terms = {}, residual = {:e}, status = ok", d.len(), d.residual),
                    true,
                ),
                Err(e) => (format!("form {i}: status = failed, error = {e}"), false),
            }
        })
        .collect();
    let ok = lines.iter().all(|(_, ok)| *ok);
    let mut out = String::new();
    for (l, _) in lines {
        out.push_str(&l);
        out.push('\n');
    }
    Ok((out, ok))
}

fn selftest(ctx: &Ctx) -> (String, bool) {
    let opts = SelftestOptions {
        seed: ctx.seed,
        max_retries: ctx.max_retries,
        policy: ctx.policy,
        ..Default::default()
    };
    let results = run_all(&opts);
    let mut out = String::new();
    for r in &results {
        writeln!(out, "{r}").unwrap();
    }
    (out, results.iter().all(|r| r.passed))
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let policy = TolerancePolicy::new(cli.precision).map_err(|e| Failure::Usage(e.to_string()))?;
    if cli.max_retries < 1 {
        return Err(Failure::Usage("--max-retries must be at least 1".into()));
    }
    let ctx = Ctx {
        policy,
        seed: cli.seed,
        max_retries: cli.max_retries,
    };
    let ok = |s: String| Ok((s, true));
    match &cli.command {
        Command::Rank(i) => ok(rank(&load_form(i, &ctx)?, &ctx)?),
        Command::Decompose(i) => ok(decompose(&load_form(i, &ctx)?, &ctx)?),
        Command::Verify { form, decomposition } => ok(verify_cmd(form, decomposition, &ctx)?),
        Command::Pencil { factors, x0, x1 } => ok(pencil(factors, x0, x1, &ctx)?),
        Command::Lines(i) => ok(lines(&load_form(i, &ctx)?, &ctx)?),
        Command::Batch { path } => batch(path, &ctx),
        Command::Selftest => Ok(selftest(&ctx)),
    }
}

fn emit(text: &str, output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(p) => OpenOptions::new().create(true).append(true).open(p)?.write_all(text.as_bytes()),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let (text, code) = match run(&cli) {
        Ok((t, true)) => (t, ExitCode::SUCCESS),
        Ok((t, false)) => (t, ExitCode::from(EXIT_FAILURE)),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    if let Err(e) = emit(&text, cli.output.as_deref()) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    code
}
