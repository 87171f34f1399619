use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use wkron::covariants::{theorem2_form, theorem2_weight, Multidegree};
use wkron::exact::{parse_rational, rational_to_f64, Rational};
use wkron::ghz;
use wkron::kronstate::{compare_with_reference, from_table, khat, reference_tables, to_table, KhatCache};
use wkron::partitions::{all_tuples, kron_coeff, w_admissible, PartitionTuple};
use wkron::protocol::{self, InputState, Mode};
use wkron::wstates::{w_normal_form, WClassState};
use wkron::Error;

#[derive(Parser, Debug)]
#[command(name = "wkron", version, about = "W-class Kronecker states, sector probabilities and covariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Number of parties N.
    #[arg(long, global = true)]
    parties: Option<usize>,
    /// Number of copies n; `ghz-spectrum` takes a comma list.
    #[arg(long, global = true, value_delimiter = ',')]
    copies: Vec<u32>,
    /// Partition tuple, e.g. "2,1;2,1;2,1".
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// `W`, `ghz`, `ghz:1/3`, or W-class weights "c0,c1,..,cN".
    #[arg(long, global = true, default_value = "W")]
    state: String,
    /// GHZ parameter alpha.
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Arithmetic for the dense oracle; chosen by size when absent.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Number of sampled runs.
    #[arg(long, global = true, default_value_t = 1)]
    runs: usize,
    /// Auxiliary-variable degrees for `covariant`, e.g. "1,1,3".
    #[arg(long, global = true)]
    nu: Option<String>,
    /// Emit K-hat itself instead of the normalized state.
    #[arg(long, global = true)]
    unnormalized: bool,
    /// Worker threads.
    #[arg(long, global = true, env = "WKRON_WORKERS")]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Coefficient table of a W-class Kronecker state.
    Kron,
    /// Sector probabilities over every partition tuple.
    Prob,
    /// Residual Schmidt spectra of GHZ-class typical sectors.
    GhzSpectrum,
    /// Recurrence against the dense oracle.
    Verify,
    /// Simulated protocol runs.
    Sample,
    /// The predicted covariant of a multidegree.
    Covariant,
    /// Reproduce the reference coefficient tables.
    Tables,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Float,
}

/// Parsed and validated command-line settings.
#[derive(Debug)]
struct RunConfig {
    command: Command,
    parties: Option<usize>,
    copies: Vec<u32>,
    lambdas: Option<PartitionTuple>,
    state: String,
    alpha: Option<Rational>,
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: u64,
    mode: Option<Mode>,
    runs: usize,
    nu: Option<Vec<u32>>,
    unnormalized: bool,
}

impl RunConfig {
    fn from_cli(cli: Cli) -> anyhow::Result<Self> {
        let lambdas = cli.lambda.as_deref().map(str::parse::<PartitionTuple>).transpose()?;
        let alpha = cli.alpha.as_deref().map(parse_rational).transpose()?;
        let nu = cli
            .nu
            .as_deref()
            .map(|s| s.split(',').map(|x| x.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>())
            .transpose()
            .map_err(|e| Error::InvalidInput(format!("bad --nu: {e}")))?;
        if let (Some(p), Some(l)) = (cli.parties, &lambdas) {
            if p != l.parties() {
                return Err(bad(format!("--parties {p} disagrees with --lambda {l}")));
            }
        }
        Ok(RunConfig {
            command: cli.command,
            parties: cli.parties,
            copies: cli.copies,
            lambdas,
            state: cli.state,
            alpha,
            format: cli.format,
            out: cli.out,
            seed: cli.seed,
            mode: cli.mode.map(|m| match m {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Float => Mode::Float,
            }),
            runs: cli.runs,
            nu,
            unnormalized: cli.unnormalized,
        })
    }

    fn parties(&self) -> usize {
        self.parties.or(self.lambdas.as_ref().map(PartitionTuple::parties)).unwrap_or(3)
    }

    fn copies(&self) -> anyhow::Result<u32> {
        match (self.copies.as_slice(), &self.lambdas) {
            ([n], Some(l)) if *n != l.size() => Err(bad(format!("--copies {n} disagrees with --lambda {l}"))),
            ([n], _) => Ok(*n),
            ([], Some(l)) => Ok(l.size()),
            ([], None) => Err(bad("--copies is required")),
            _ => Err(bad("--copies takes a single value here")),
        }
    }

    fn lambdas(&self) -> anyhow::Result<&PartitionTuple> {
        self.lambdas.as_ref().ok_or_else(|| bad("--lambda is required"))
    }

    fn state(&self) -> anyhow::Result<InputState> {
        let parties = self.parties();
        let spec = self.state.trim();
        if spec.eq_ignore_ascii_case("w") {
            return Ok(InputState::W(w_normal_form(parties)?));
        }
        if let Some(rest) = spec.strip_prefix("ghz") {
            let alpha = match rest.strip_prefix(':') {
                Some(a) => parse_rational(a)?,
                None => self.alpha.clone().ok_or_else(|| bad("ghz state needs an alpha"))?,
            };
            return Ok(InputState::ghz(parties, alpha)?);
        }
        let w: WClassState = spec.parse()?;
        if self.parties.is_some_and(|p| p != w.parties()) {
            return Err(bad(format!("state has {} parties, --parties says {parties}", w.parties())));
        }
        Ok(InputState::W(w))
    }
}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidInput(msg.into()).into()
}

fn emit(cfg: &RunConfig, body: &str) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn to_csv(header: &[String], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn cmd_kron(cfg: &RunConfig) -> anyhow::Result<()> {
    let lambdas = cfg.lambdas()?;
    if !cfg.copies.is_empty() {
        cfg.copies()?;
    }
    if !w_admissible(lambdas) {
        return Err(bad(format!("{lambdas} is outside the W-admissible set")));
    }
    let table = to_table(&khat(lambdas), !cfg.unnormalized)?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => emit(cfg, &to_json(&table)?),
        Format::Csv => {
            let mut header: Vec<String> = (1..=table.parties).map(|i| format!("q{i}")).collect();
            header.extend(["sign", "num", "den", "value"].map(String::from));
            let rows: Vec<Vec<String>> = table
                .entries
                .iter()
                .map(|e| {
                    let mut r: Vec<String> = e.q.iter().map(ToString::to_string).collect();
                    let (num, den) = e.value.radicand_parts();
                    r.extend([e.value.sign().to_string(), num, den, e.value.to_f64().to_string()]);
                    r
                })
                .collect();
            emit(cfg, &to_csv(&header, &rows)?)
        }
    }
}

fn cmd_prob(cfg: &RunConfig) -> anyhow::Result<()> {
    let n = cfg.copies()?;
    let state = cfg.state()?;
    let (source, dist) = match (&state, cfg.mode) {
        (InputState::W(s), None) => ("closed-form", protocol::Distribution::Exact(wkron::probw::distribution_psi(s, n)?)),
        (_, mode) => {
            let dense = match mode {
                Some(m) => protocol::tensor_power_mode(&state, n, m)?,
                None => protocol::tensor_power(&state, n)?,
            };
            let sectors = protocol::multilocal_schur(&dense)?;
            let probs: Vec<(PartitionTuple, Option<Rational>, f64)> =
                sectors.values().map(|b| (b.lambdas.clone(), b.norm_sq(), b.norm_sq_f64())).collect();
            let dist = if probs.iter().all(|p| p.1.is_some()) {
                protocol::Distribution::Exact(probs.into_iter().map(|(t, p, _)| (t, p.expect("exact"))).collect())
            } else {
                protocol::Distribution::Float(probs.into_iter().map(|(t, _, f)| (t, f)).collect())
            };
            ("dense-oracle", dist)
        }
    };
    let mut rows = Vec::new();
    match &dist {
        protocol::Distribution::Exact(v) => {
            let mut cum = Rational::from_integer(0.into());
            for (t, p) in v {
                cum += p;
                rows.push(vec![
                    t.to_string(),
                    p.to_string(),
                    rational_to_f64(p).to_string(),
                    cum.to_string(),
                    rational_to_f64(&cum).to_string(),
                ]);
            }
        }
        protocol::Distribution::Float(v) => {
            let mut cum = 0.0;
            for (t, p) in v {
                cum += p;
                rows.push(vec![t.to_string(), String::new(), p.to_string(), String::new(), cum.to_string()]);
            }
        }
    }
    let header = ["lambda", "p_exact", "p_float", "cumulative_exact", "cumulative_float"].map(String::from);
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(cfg, &to_csv(&header, &rows)?),
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| json!({"lambda": r[0], "p_exact": r[1], "p_float": r[2].parse::<f64>().ok(), "cumulative_exact": r[3]}))
                .collect();
            emit(cfg, &to_json(&json!({"source": source, "n": n, "rows": rows}))?)
        }
    }
}

fn cmd_ghz_spectrum(cfg: &RunConfig) -> anyhow::Result<()> {
    let alpha = match (&cfg.alpha, cfg.state.strip_prefix("ghz:")) {
        (Some(a), _) => a.clone(),
        (None, Some(a)) => parse_rational(a)?,
        _ => return Err(bad("--alpha is required")),
    };
    if cfg.copies.is_empty() {
        return Err(bad("--copies is required"));
    }
    let rows = ghz::spectrum_rows(cfg.parties(), &cfg.copies, &alpha)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => emit(cfg, &to_json(&rows)?),
        Format::Csv => {
            let header = ["n", "lambda", "rank_index", "gamma"].map(String::from);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.n.to_string(), r.lambda.clone(), r.rank_index.to_string(), r.gamma.to_string()])
                .collect();
            emit(cfg, &to_csv(&header, &body)?)
        }
    }
}

#[derive(Serialize)]
struct VerifyCase {
    lambdas: String,
    entries: usize,
    /// Largest float deviation between recurrence and oracle coefficients.
    residual: f64,
    exact_match: bool,
    error: Option<String>,
}

fn cmd_verify(cfg: &RunConfig) -> anyhow::Result<()> {
    let plan: Vec<(usize, u32)> = match (cfg.parties, cfg.copies.as_slice()) {
        (Some(p), [n]) => vec![(p, *n)],
        (Some(3), []) => vec![(3, 5)],
        (Some(4), []) => vec![(4, 4)],
        (Some(p), []) => vec![(p, 2)],
        (None, [n]) => vec![(3, *n), (4, *n)],
        (None, []) => vec![(3, 5), (4, 4)],
        _ => return Err(bad("--copies takes a single maximum here")),
    };
    let mut cases = Vec::new();
    let mut cache = KhatCache::new();
    for (parties, max_n) in plan {
        for n in 1..=max_n {
            for t in all_tuples(parties, n).into_iter().filter(w_admissible) {
                let k = cache.khat(&t);
                let case = match protocol::oracle_khat(&t) {
                    Ok(o) => {
                        let keys: std::collections::BTreeSet<_> = k.coeffs.keys().chain(o.coeffs.keys()).collect();
                        let residual =
                            keys.iter().map(|q| (k.get(q).to_f64() - o.get(q).to_f64()).abs()).fold(0.0, f64::max);
                        VerifyCase { lambdas: t.to_string(), entries: k.len(), residual, exact_match: o == k, error: None }
                    }
                    Err(e) => VerifyCase {
                        lambdas: t.to_string(),
                        entries: k.len(),
                        residual: f64::NAN,
                        exact_match: false,
                        error: Some(e.to_string()),
                    },
                };
                cases.push(case);
            }
        }
    }
    let failures = cases.iter().filter(|c| !c.exact_match).count();
    emit(cfg, &to_json(&json!({"sectors": cases.len(), "failures": failures, "cases": cases}))?)?;
    if failures > 0 {
        return Err(Error::Inconsistency(format!("{failures} sectors disagree with the oracle")).into());
    }
    Ok(())
}

fn cmd_sample(cfg: &RunConfig) -> anyhow::Result<()> {
    let n = cfg.copies()?;
    let state = cfg.state()?;
    if cfg.runs == 0 {
        return Err(bad("--runs must be positive"));
    }
    if cfg.runs == 1 {
        let outcome = protocol::sample_run(&state, n, cfg.seed)?;
        return match cfg.format.unwrap_or(Format::Json) {
            Format::Json => emit(cfg, &to_json(&outcome)?),
            Format::Csv => emit(
                cfg,
                &to_csv(
                    &["run", "lambda", "probability"].map(String::from),
                    &[vec!["0".into(), outcome.lambdas.to_string(), outcome.probability.to_string()]],
                )?,
            ),
        };
    }
    let outcomes = protocol::sample_many(&state, n, cfg.seed, cfg.runs)?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut counts = std::collections::BTreeMap::<String, usize>::new();
            for o in &outcomes {
                *counts.entry(o.to_string()).or_default() += 1;
            }
            let parties = state.parties();
            let entropy: Vec<f64> = (0..parties).map(|i| protocol::mean_reduced_entropy(&outcomes, i)).collect();
            let list: Vec<String> = outcomes.iter().map(ToString::to_string).collect();
            emit(
                cfg,
                &to_json(&json!({
                    "seed": cfg.seed,
                    "runs": cfg.runs,
                    "counts": counts,
                    "mean_reduced_entropy": entropy,
                    "outcomes": list,
                }))?,
            )
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                outcomes.iter().enumerate().map(|(i, o)| vec![i.to_string(), o.to_string()]).collect();
            emit(cfg, &to_csv(&["run", "lambda"].map(String::from), &rows)?)
        }
    }
}

fn cmd_covariant(cfg: &RunConfig) -> anyhow::Result<()> {
    let InputState::W(state) = cfg.state()? else {
        return Err(bad("covariants are defined here for W-class states only"));
    };
    let n = cfg.copies()?;
    let nu = match (&cfg.nu, &cfg.lambdas) {
        (Some(nu), _) => nu.clone(),
        (None, Some(l)) => l.iter().map(|p| p.nu()).collect(),
        (None, None) => return Err(bad("--nu or --lambda is required")),
    };
    if nu.len() != state.parties() {
        return Err(bad("--nu needs one degree per party"));
    }
    let degree = Multidegree { n, nu };
    let form = theorem2_form(&state, &degree)?;
    let terms: Vec<_> = form
        .iter()
        .flat_map(|p| p.terms().iter())
        .map(|(e, c)| json!({"exponents": e, "coefficient": c.to_string(), "value": c.to_f64()}))
        .collect();
    let body = json!({
        "multidegree": degree.to_string(),
        "w": theorem2_weight(degree.n, &degree.nu),
        "vanishes": form.is_none(),
        "polynomial": form.as_ref().map(ToString::to_string),
        "terms": terms,
    });
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => emit(cfg, &to_json(&body)?),
        Format::Csv => {
            let rows: Vec<Vec<String>> = form
                .iter()
                .flat_map(|p| p.terms().iter())
                .map(|(e, c)| {
                    let ex: Vec<String> = e.iter().map(ToString::to_string).collect();
                    vec![ex.join(" "), c.to_string(), c.to_f64().to_string()]
                })
                .collect();
            emit(cfg, &to_csv(&["exponents", "coefficient", "value"].map(String::from), &rows)?)
        }
    }
}

fn cmd_tables(cfg: &RunConfig) -> anyhow::Result<()> {
    let mut out = Vec::new();
    for reference in reference_tables() {
        let k = khat(&reference.lambdas);
        let table = to_table(&k, true)?;
        if from_table(&table)? != wkron::kronstate::normalized(&k)? {
            return Err(Error::Inconsistency(format!("table {} does not round-trip", reference.name)).into());
        }
        let comparison = compare_with_reference(&k, &reference);
        out.push(json!({
            "name": reference.name,
            "kron_coeff": kron_coeff(&reference.lambdas),
            "comparison": comparison,
            "table": table,
        }));
    }
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => emit(cfg, &to_json(&out)?),
        Format::Csv => bail!(Error::InvalidInput("tables are emitted as JSON only".into())),
    }
}

fn run(cfg: &RunConfig) -> anyhow::Result<()> {
    match cfg.command {
        Command::Kron => cmd_kron(cfg),
        Command::Prob => cmd_prob(cfg),
        Command::GhzSpectrum => cmd_ghz_spectrum(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Sample => cmd_sample(cfg),
        Command::Covariant => cmd_covariant(cfg),
        Command::Tables => cmd_tables(cfg),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Inconsistency(_)) => 1,
        Some(_) => 2,
        None if err.downcast_ref::<io::Error>().is_some() => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("wkron: {e}");
        }
    }
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wkron: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
