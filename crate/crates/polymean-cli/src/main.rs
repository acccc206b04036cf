//! `polymean` — exact and asymptotic mean values of multiplicative functions
//! over F_q[T], with a brute-force verification harness.
//!
//! Subcommands: `exact` (Theorem-1 polynomial in q, or exact rational value
//! at fixed q), `asympt` (truncated expansions with explicit error bounds
//! and precondition gates), `verify` (three-way agreement of the polynomial,
//! the Euler-product extraction, and exhaustive enumeration over F_p[T]),
//! and `check` (sufficient-condition reports).
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3
//! unsupported mode for the given profile, 4 enumeration budget exceeded.

mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use polymean::asympt::{
    check_conda, check_prop_a, check_prop_b, gorodetsky_expand_with, thm2_expand_with,
    ConditionReport, ExpansionReport, GorodetskyOpts,
};
use polymean::exact::{t_exact_euler, t_poly_thm1};
use polymean::oracle::{brute_t_batch, BruteOpts, DEFAULT_WORK_BUDGET};
use polymean::{parse_preset, Coeff, DProfile, Error};

use report::{coeff_brief, coeff_string, coeff_value, emit, Output, Report};

const EXIT_MISMATCH: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_UNSUPPORTED: i32 = 3;
const EXIT_BUDGET: i32 = 4;

const DEFAULT_PRECISION_BITS: u32 = 128;

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
    fn unsupported(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_UNSUPPORTED, message: message.into() }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "polymean",
    version,
    about = "Mean values of multiplicative functions over F_q[T]: exact, asymptotic, verified"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact mean values: the polynomial T(N) in q, or its value at fixed q.
    Exact(ExactArgs),
    /// Asymptotic expansions with explicit error bounds and gate reports.
    Asympt(AsymptArgs),
    /// Three-way verification: Theorem-1 polynomial vs Euler product vs
    /// brute-force enumeration over F_p[T].
    Verify(VerifyArgs),
    /// Sufficient-condition checks: Propositions A and B and the recursion
    /// bound k|a_k| <= 1.
    Check(CheckArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Float-lane working precision in bits. Wins over the
    /// POLYMEAN_PRECISION_BITS environment variable; default 128.
    #[arg(long)]
    precision_bits: Option<u32>,
}

impl CommonArgs {
    fn precision(&self) -> CliResult<u32> {
        if let Some(p) = self.precision_bits {
            return Ok(p);
        }
        match std::env::var("POLYMEAN_PRECISION_BITS") {
            Ok(s) => s.trim().parse::<u32>().map_err(|_| {
                CliError::usage(format!("POLYMEAN_PRECISION_BITS is not a valid bit count: {s:?}"))
            }),
            Err(_) => Ok(DEFAULT_PRECISION_BITS),
        }
    }
}

/// Preset parameters as separate flags, for presets named without inline
/// arguments (`--preset inv_tau_m --m 3` ≡ `--preset "inv_tau_m(3)"`).
#[derive(Args, Default)]
struct PresetParams {
    /// m parameter (tau_m, ratio_tau, inv_tau_m, inv_tau_m_Fr).
    #[arg(long)]
    m: Option<u64>,
    /// r parameter (tau_k_of_F_r, inv_tau_Fr, inv_tau_m_Fr).
    #[arg(long)]
    r: Option<u64>,
    /// k parameter (tau_k_of_F_r).
    #[arg(long)]
    k: Option<u64>,
    /// alpha parameter (inv_tau_alpha): rational like 2 or 3/2.
    #[arg(long)]
    alpha: Option<String>,
    /// c parameter (c_omega): rational in (0,1).
    #[arg(long)]
    c: Option<String>,
    /// g7 factors as "m:gamma,m:gamma,...".
    #[arg(long)]
    pairs: Option<String>,
    /// Explicit profile values d_1,d_2,... as rationals.
    #[arg(long)]
    ds: Option<String>,
}

impl PresetParams {
    fn any(&self) -> bool {
        self.m.is_some()
            || self.r.is_some()
            || self.k.is_some()
            || self.alpha.is_some()
            || self.c.is_some()
            || self.pairs.is_some()
            || self.ds.is_some()
    }
}

/// Combine a preset name with parameter flags into the inline form that
/// `parse_preset` understands.
fn assemble_preset(name: &str, params: &PresetParams) -> CliResult<String> {
    let name = name.trim();
    if !params.any() {
        return Ok(name.to_string());
    }
    if name.contains('(') {
        return Err(CliError::usage(format!(
            "preset {name:?} already carries inline arguments; drop the parameter flags"
        )));
    }
    let need = |v: &Option<u64>, flag: &str| -> CliResult<u64> {
        v.ok_or_else(|| CliError::usage(format!("preset {name} needs --{flag}")))
    };
    let need_s = |v: &Option<String>, flag: &str| -> CliResult<String> {
        v.clone()
            .ok_or_else(|| CliError::usage(format!("preset {name} needs --{flag}")))
    };
    let args = match name.to_ascii_lowercase().as_str() {
        "tau_m" | "ratio_tau" | "inv_tau_m" => need(&params.m, "m")?.to_string(),
        "inv_tau_fr" => need(&params.r, "r")?.to_string(),
        "inv_tau_m_fr" => format!("{},{}", need(&params.m, "m")?, need(&params.r, "r")?),
        "tau_k_of_f_r" => format!("{},{}", need(&params.k, "k")?, need(&params.r, "r")?),
        "inv_tau_alpha" => need_s(&params.alpha, "alpha")?,
        "c_omega" => need_s(&params.c, "c")?,
        "g7" => need_s(&params.pairs, "pairs")?,
        "explicit" => need_s(&params.ds, "ds")?,
        other => {
            return Err(CliError::usage(format!(
                "preset {other} takes no parameter flags"
            )))
        }
    };
    Ok(format!("{name}({args})"))
}

fn resolve_preset(name: &str, params: &PresetParams, precision_bits: u32) -> CliResult<DProfile> {
    let full = assemble_preset(name, params)?;
    parse_preset(&full, precision_bits).map_err(CliError::usage)
}

/// Parse "N" or an inclusive range "LO..HI".
fn parse_n_range(s: &str) -> CliResult<Vec<usize>> {
    let s = s.trim();
    let parse_one = |t: &str| -> CliResult<usize> {
        t.trim()
            .parse::<usize>()
            .map_err(|_| CliError::usage(format!("bad degree {t:?}")))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse_one(a)?, parse_one(b.trim_start_matches('='))?),
        None => {
            let n = parse_one(s)?;
            (n, n)
        }
    };
    if lo < 1 || hi < lo {
        return Err(CliError::usage(format!("bad degree range {s:?}")));
    }
    if hi - lo > 10_000 {
        return Err(CliError::usage(format!("degree range {s:?} is too wide")));
    }
    Ok((lo..=hi).collect())
}

fn parse_q_list(s: &str) -> CliResult<Vec<u64>> {
    let mut qs = Vec::new();
    for part in s.split(',') {
        let q = part
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::usage(format!("bad field size {part:?}")))?;
        if q < 2 {
            return Err(CliError::usage(format!("field size must be >= 2, got {q}")));
        }
        qs.push(q);
    }
    Ok(qs)
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exact(args) => cmd_exact(args),
        Command::Asympt(args) => cmd_asympt(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Check(args) => cmd_check(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}

// ---------------------------------------------------------------- exact ----

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ExactMode {
    /// The full polynomial T(N) = Σ_l A_l(N) q^{N−l} with exact rational
    /// coefficients (exact-lane presets only).
    ExactPoly,
    /// The value T(N) at each requested q via Euler-product extraction.
    ExactValue,
}

#[derive(Args)]
struct ExactArgs {
    /// Preset name, optionally with inline arguments ("inv_tau_m(3)").
    #[arg(long)]
    preset: String,
    #[command(flatten)]
    params: PresetParams,
    /// Degree N, or an inclusive range "LO..HI" (one result record per N).
    #[arg(long = "N")]
    degree: String,
    /// Field size(s) q, comma-separated (exact-value mode).
    #[arg(long)]
    q: Option<String>,
    /// What to compute.
    #[arg(long, value_enum)]
    mode: ExactMode,
    #[command(flatten)]
    common: CommonArgs,
}

fn cmd_exact(args: ExactArgs) -> CliResult<()> {
    let precision_bits = args.common.precision()?;
    let profile = resolve_preset(&args.preset, &args.params, precision_bits)?;
    let degrees = parse_n_range(&args.degree)?;

    let mode_name = match args.mode {
        ExactMode::ExactPoly => "exact-poly",
        ExactMode::ExactValue => "exact-value",
    };
    let qs = match (args.mode, &args.q) {
        (ExactMode::ExactValue, None) => {
            return Err(CliError::usage("exact-value mode needs --q"));
        }
        (ExactMode::ExactValue, Some(s)) => parse_q_list(s)?,
        (ExactMode::ExactPoly, _) => Vec::new(),
    };

    let mut output = Output::new(
        "exact",
        json!({
            "preset": profile.name(),
            "N": degrees,
            "q": qs,
            "mode": mode_name,
            "precision_bits": precision_bits,
        }),
    );
    let mut text = String::new();
    let mut csv_rows = Vec::new();
    let csv_header;

    match args.mode {
        ExactMode::ExactPoly => {
            csv_header = vec!["preset", "N", "poly"];
            for &n in &degrees {
                let poly = t_poly_thm1(&profile, n).map_err(|e| match e {
                    Error::FloatProfileNotSupported(msg) => CliError::unsupported(msg),
                    other => CliError::usage(other.to_string()),
                })?;
                let rendered = poly.poly.to_string();
                let coefficients: Vec<String> =
                    poly.coefficients.iter().map(|c| c.to_string()).collect();
                output.results.push(json!({
                    "N": n,
                    "poly": rendered,
                    "coefficients_by_l": coefficients,
                }));
                text.push_str(&format!("T(N={n}) [{}] = {rendered}\n", profile.name()));
                csv_rows.push(vec![profile.name().to_string(), n.to_string(), rendered]);
            }
        }
        ExactMode::ExactValue => {
            csv_header = vec!["preset", "N", "q", "value"];
            for &n in &degrees {
                for &q in &qs {
                    let value = t_exact_euler(&profile, n, q);
                    let mut record = json!({
                        "N": n,
                        "q": q,
                        "value": coeff_value(&value),
                    });
                    if !value.mode().is_exact() {
                        record["precision_bits"] = json!(precision_bits);
                    }
                    output.results.push(record);
                    text.push_str(&format!(
                        "T(N={n}, q={q}) [{}] = {}\n",
                        profile.name(),
                        coeff_string(&value)
                    ));
                    csv_rows.push(vec![
                        profile.name().to_string(),
                        n.to_string(),
                        q.to_string(),
                        coeff_string(&value),
                    ]);
                }
            }
        }
    }

    emit(
        args.common.format,
        args.common.out.as_deref(),
        &Report { output, text, csv_header, csv_rows },
    )
    .map_err(CliError::usage)
}

// --------------------------------------------------------------- asympt ----

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AsymptMode {
    /// Truncation of the exact expansion after h terms, with the theorem's
    /// explicit error constant.
    Thm2,
    /// Refined correction series evaluated through the auxiliary a(x)
    /// series; error bound is an order-of-magnitude shape.
    Gorodetsky,
}

#[derive(Args)]
struct AsymptArgs {
    /// Expansion to evaluate.
    #[arg(long, value_enum)]
    mode: AsymptMode,
    /// Preset name, optionally with inline arguments.
    #[arg(long)]
    preset: String,
    #[command(flatten)]
    params: PresetParams,
    /// Degree N, or an inclusive range "LO..HI".
    #[arg(long = "N")]
    degree: String,
    /// Field size(s) q, comma-separated.
    #[arg(long)]
    q: String,
    /// Thm2: number of exact terms kept (main value sums l < h).
    #[arg(long, default_value_t = 1)]
    h: usize,
    /// Gorodetsky: correction order n.
    #[arg(long = "n", default_value_t = 0)]
    corrections: usize,
    /// Gorodetsky: Taylor order for the a(x) series (default max(2n+8, 32)).
    #[arg(long)]
    taylor_order: Option<usize>,
    /// Depth of the k|a_k| <= 1 spot check recorded in the preconditions.
    #[arg(long, default_value_t = 50)]
    conda_depth: usize,
    /// Exit with a usage error if any precondition gate fails.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    common: CommonArgs,
}

fn expansion_record(report: &ExpansionReport, precision_bits: u32) -> serde_json::Value {
    let preconditions: Vec<serde_json::Value> = report
        .preconditions
        .iter()
        .map(|p| {
            json!({
                "name": p.name,
                "required": p.required,
                "actual": p.actual,
                "satisfied": p.satisfied,
            })
        })
        .collect();
    let mut record = json!({
        "mode": match report.mode {
            polymean::asympt::ExpansionMode::Thm2 => "thm2",
            polymean::asympt::ExpansionMode::Gorodetsky => "gorodetsky",
        },
        "N": report.n,
        "q": report.q,
        "truncation": report.truncation,
        "main_value": coeff_value(&report.main_value),
        "main_value_lane": if report.main_value.mode().is_exact() { "exact" } else { "approx" },
        "error_bound": coeff_value(&report.error_bound),
        "error_bound_rigorous": report.error_bound_rigorous,
        "preconditions": preconditions,
        "rigorous": report.rigorous,
        "precision_bits": precision_bits,
    });
    if let Some(t) = report.taylor_order {
        record["taylor_order"] = json!(t);
    }
    if let Some(t) = &report.taylor_tail_estimate {
        record["taylor_tail_estimate"] = coeff_value(t);
    }
    record
}

fn expansion_text(report: &ExpansionReport, preset: &str) -> String {
    let mut s = String::new();
    let mode = match report.mode {
        polymean::asympt::ExpansionMode::Thm2 => "thm2",
        polymean::asympt::ExpansionMode::Gorodetsky => "gorodetsky",
    };
    let trunc_label = match report.mode {
        polymean::asympt::ExpansionMode::Thm2 => "h",
        polymean::asympt::ExpansionMode::Gorodetsky => "n",
    };
    s.push_str(&format!(
        "{mode} expansion: preset {preset}, N = {}, q = {}, {trunc_label} = {}\n",
        report.n, report.q, report.truncation
    ));
    s.push_str(&format!(
        "  main value  = {}\n",
        coeff_brief(&report.main_value)
    ));
    let bound_kind = if report.error_bound_rigorous {
        "explicit constant, valid under the preconditions"
    } else {
        "order-of-magnitude shape only"
    };
    s.push_str(&format!(
        "  error bound = {} ({bound_kind})\n",
        coeff_brief(&report.error_bound)
    ));
    if let Some(t) = report.taylor_order {
        s.push_str(&format!("  taylor order = {t}"));
        if let Some(tail) = &report.taylor_tail_estimate {
            s.push_str(&format!(", dropped tail ≈ {}", coeff_brief(tail)));
        }
        s.push('\n');
    }
    s.push_str("  preconditions:\n");
    for p in &report.preconditions {
        let mark = if p.satisfied { "ok  " } else { "FAIL" };
        s.push_str(&format!(
            "    [{mark}] {:<34} required {:<28} actual {}\n",
            p.name, p.required, p.actual
        ));
    }
    s.push_str(&format!(
        "  rigorous: {}\n",
        if report.rigorous { "yes" } else { "no" }
    ));
    s
}

fn cmd_asympt(args: AsymptArgs) -> CliResult<()> {
    let precision_bits = args.common.precision()?;
    let profile = resolve_preset(&args.preset, &args.params, precision_bits)?;
    let degrees = parse_n_range(&args.degree)?;
    let qs = parse_q_list(&args.q)?;

    let mode_name = match args.mode {
        AsymptMode::Thm2 => "thm2",
        AsymptMode::Gorodetsky => "gorodetsky",
    };
    let mut inputs = json!({
        "preset": profile.name(),
        "N": degrees,
        "q": qs,
        "mode": mode_name,
        "precision_bits": precision_bits,
        "strict": args.strict,
        "conda_depth": args.conda_depth,
    });
    match args.mode {
        AsymptMode::Thm2 => inputs["h"] = json!(args.h),
        AsymptMode::Gorodetsky => {
            inputs["n"] = json!(args.corrections);
            if let Some(t) = args.taylor_order {
                inputs["taylor_order"] = json!(t);
            }
        }
    }
    let mut output = Output::new("asympt", inputs);
    let mut text = String::new();
    let csv_header = vec![
        "preset",
        "mode",
        "N",
        "q",
        "truncation",
        "main_value",
        "error_bound",
        "rigorous",
    ];
    let mut csv_rows = Vec::new();
    let mut gate_failures = 0usize;

    for &n in &degrees {
        for &q in &qs {
            let report = match args.mode {
                AsymptMode::Thm2 => thm2_expand_with(&profile, n, q, args.h, args.conda_depth),
                AsymptMode::Gorodetsky => gorodetsky_expand_with(
                    &profile,
                    n,
                    q,
                    args.corrections,
                    &GorodetskyOpts {
                        taylor_order: args.taylor_order,
                        conda_depth: args.conda_depth,
                    },
                ),
            }
            .map_err(|e| match e {
                Error::D1OutOfRange(msg) => CliError::unsupported(msg),
                other => CliError::usage(other.to_string()),
            })?;

            for p in &report.preconditions {
                if !p.satisfied {
                    gate_failures += 1;
                    output.warnings.push(format!(
                        "N={n} q={q}: precondition not satisfied: {} (required {}, actual {})",
                        p.name, p.required, p.actual
                    ));
                }
            }
            output.results.push(expansion_record(&report, precision_bits));
            text.push_str(&expansion_text(&report, profile.name()));
            csv_rows.push(vec![
                profile.name().to_string(),
                mode_name.to_string(),
                n.to_string(),
                q.to_string(),
                report.truncation.to_string(),
                coeff_string(&report.main_value),
                coeff_string(&report.error_bound),
                report.rigorous.to_string(),
            ]);
        }
    }

    if !output.warnings.is_empty() && args.common.format == Format::Text {
        text.push_str("warnings:\n");
        for w in &output.warnings {
            text.push_str(&format!("  {w}\n"));
        }
    }

    emit(
        args.common.format,
        args.common.out.as_deref(),
        &Report { output, text, csv_header, csv_rows },
    )
    .map_err(CliError::usage)?;

    if args.strict && gate_failures > 0 {
        return Err(CliError::usage(format!(
            "--strict: {gate_failures} precondition gate(s) failed"
        )));
    }
    Ok(())
}

// --------------------------------------------------------------- verify ----

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated preset list (inline arguments allowed).
    #[arg(long)]
    presets: String,
    /// Largest degree N to verify.
    #[arg(long = "max-N")]
    max_n: usize,
    /// Smallest degree N to verify.
    #[arg(long = "min-N", default_value_t = 1)]
    min_n: usize,
    /// Comma-separated prime moduli for the brute-force oracle.
    #[arg(long)]
    q: String,
    /// Worker threads for the enumeration (0 = one per available core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Refuse enumerations with more than this many polynomials.
    #[arg(long, default_value_t = DEFAULT_WORK_BUDGET)]
    budget: u64,
    #[command(flatten)]
    common: CommonArgs,
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let precision_bits = args.common.precision()?;
    let mut profiles = Vec::new();
    for name in args.presets.split(',') {
        let profile = parse_preset(name.trim(), precision_bits).map_err(CliError::usage)?;
        if !profile.is_exact() {
            return Err(CliError::unsupported(format!(
                "preset {} is float-lane; three-way verification needs exact presets",
                profile.name()
            )));
        }
        profiles.push(profile);
    }
    if profiles.is_empty() {
        return Err(CliError::usage("--presets must name at least one preset"));
    }
    let primes = parse_q_list(&args.q)?;
    for &p in &primes {
        if !is_prime_u64(p) {
            return Err(CliError::usage(format!(
                "q = {p} is not prime; the brute-force oracle enumerates F_p[T] only"
            )));
        }
    }
    if args.min_n < 1 || args.max_n < args.min_n {
        return Err(CliError::usage("need 1 <= min-N <= max-N"));
    }

    let preset_names: Vec<String> = profiles.iter().map(|p| p.name().to_string()).collect();
    let mut output = Output::new(
        "verify",
        json!({
            "presets": preset_names,
            "N": [args.min_n, args.max_n],
            "q": primes,
            "workers": args.workers,
            "budget": args.budget,
        }),
    );
    let mut text = String::new();
    let csv_header = vec!["preset", "N", "q", "value", "status"];
    let mut csv_rows = Vec::new();

    let opts = BruteOpts { budget: args.budget, workers: args.workers };
    let profile_refs: Vec<&DProfile> = profiles.iter().collect();
    let mut first_mismatch: Option<String> = None;
    let mut checked = 0usize;

    for n in args.min_n..=args.max_n {
        // One Theorem-1 polynomial per (preset, N), evaluated at every q.
        let mut polys = Vec::new();
        for profile in &profiles {
            polys.push(t_poly_thm1(profile, n).map_err(|e| CliError::unsupported(e.to_string()))?);
        }
        for &p in &primes {
            let brute = brute_t_batch(&profile_refs, p, n, opts).map_err(|e| match e {
                Error::BudgetExceeded { needed, budget } => CliError {
                    code: EXIT_BUDGET,
                    message: format!(
                        "enumeration of degree {n} over F_{p} needs {needed} polynomials, budget {budget}"
                    ),
                },
                other => CliError::usage(other.to_string()),
            })?;
            for (i, profile) in profiles.iter().enumerate() {
                let from_poly = Coeff::Exact(polys[i].poly.eval(p));
                let from_euler = t_exact_euler(profile, n, p);
                let from_brute = brute[i].clone();
                let ok = from_poly == from_euler && from_euler == from_brute;
                checked += 1;
                let status = if ok { "PASS" } else { "FAIL" };
                let mut record = json!({
                    "preset": profile.name(),
                    "N": n,
                    "q": p,
                    "value": coeff_value(&from_brute),
                    "status": status,
                });
                if !ok {
                    record["poly_at_q"] = coeff_value(&from_poly);
                    record["euler"] = coeff_value(&from_euler);
                    record["brute"] = coeff_value(&from_brute);
                    if first_mismatch.is_none() {
                        first_mismatch = Some(format!(
                            "mismatch at (preset {}, N = {n}, q = {p}): poly@q = {}, euler = {}, brute = {}",
                            profile.name(),
                            coeff_string(&from_poly),
                            coeff_string(&from_euler),
                            coeff_string(&from_brute)
                        ));
                    }
                }
                output.results.push(record);
                text.push_str(&format!(
                    "{status} preset={} N={n} q={p} T={}\n",
                    profile.name(),
                    coeff_string(&from_brute)
                ));
                csv_rows.push(vec![
                    profile.name().to_string(),
                    n.to_string(),
                    p.to_string(),
                    coeff_string(&from_brute),
                    status.to_string(),
                ]);
            }
        }
    }

    match &first_mismatch {
        None => text.push_str(&format!("all {checked} triples PASS\n")),
        Some(m) => text.push_str(&format!("{m}\n")),
    }

    emit(
        args.common.format,
        args.common.out.as_deref(),
        &Report { output, text, csv_header, csv_rows },
    )
    .map_err(CliError::usage)?;

    match first_mismatch {
        None => Ok(()),
        Some(m) => Err(CliError { code: EXIT_MISMATCH, message: m }),
    }
}

// ---------------------------------------------------------------- check ----

#[derive(Args)]
struct CheckArgs {
    /// Preset name, optionally with inline arguments.
    #[arg(long)]
    preset: String,
    #[command(flatten)]
    params: PresetParams,
    /// Depth K up to which each condition is checked.
    #[arg(long = "K", default_value_t = 100)]
    depth: usize,
    #[command(flatten)]
    common: CommonArgs,
}

fn condition_record(label: &str, r: &ConditionReport) -> serde_json::Value {
    json!({
        "condition": label,
        "checked_up_to": r.checked_up_to,
        "first_violation": r.first_violation,
        "holds": r.holds,
    })
}

fn condition_text(what: &str, r: &ConditionReport) -> String {
    match r.first_violation {
        None => format!("  {what:<34} holds up to K = {}\n", r.checked_up_to),
        Some(k) => format!("  {what:<34} fails at k = {k}\n"),
    }
}

fn cmd_check(args: CheckArgs) -> CliResult<()> {
    let precision_bits = args.common.precision()?;
    let profile = resolve_preset(&args.preset, &args.params, precision_bits)?;
    if args.depth < 1 {
        return Err(CliError::usage("--K must be at least 1"));
    }

    let prop_a = check_prop_a(&profile, args.depth);
    let prop_b = check_prop_b(&profile, args.depth);
    let conda = check_conda(&profile, args.depth);

    let mut output = Output::new(
        "check",
        json!({
            "preset": profile.name(),
            "K": args.depth,
            "precision_bits": precision_bits,
        }),
    );
    output.results.push(condition_record("CondA", &prop_a));
    output.results.push(condition_record("CondB", &prop_b));
    output
        .results
        .push(condition_record("CondARecursionBound", &conda));

    let mut text = format!(
        "condition checks: preset {}, K = {}\n",
        profile.name(),
        args.depth
    );
    text.push_str(&condition_text("propA (monotone, log-growth):", &prop_a));
    text.push_str(&condition_text("propB (partial-sum bound):", &prop_b));
    text.push_str(&condition_text("conda (k|a_k| <= 1):", &conda));

    let csv_header = vec!["preset", "condition", "checked_up_to", "first_violation", "holds"];
    let csv_rows = [("CondA", &prop_a), ("CondB", &prop_b), ("CondARecursionBound", &conda)]
        .into_iter()
        .map(|(label, r)| {
            vec![
                profile.name().to_string(),
                label.to_string(),
                r.checked_up_to.to_string(),
                r.first_violation.map_or(String::new(), |k| k.to_string()),
                r.holds.to_string(),
            ]
        })
        .collect();

    emit(
        args.common.format,
        args.common.out.as_deref(),
        &Report { output, text, csv_header, csv_rows },
    )
    .map_err(CliError::usage)
}
