use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use alpha_selfaction::damped::{
    damped_moment, solve_beta, BetaMode, BetaOptions, DampedMoment, MomentMode, MomentOptions,
};
use alpha_selfaction::densities::{angular_reduce, format_pattern, reference_mismatches, AngularMomentum, BispinorKind, Operator, SphereQuadrature};
use alpha_selfaction::eigen::{refine_alpha, solve_alpha, EigenConfig, EigenMode};
use alpha_selfaction::oracle::{fig1_data, Fig1Data};
use alpha_selfaction::reference::{check_iterates, check_products, CoefficientReport};
use alpha_selfaction::series::{generate_family, product_density, FamilyKind, ProductKind};
use alpha_selfaction::{verify, LogPolySeries};

#[derive(Parser, Debug)]
#[command(name = "alpha-selfaction", version, about = "Series, moments and eigenvalue condition for the self-action radial system")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel steps.
    #[arg(long, global = true, env = "ALPHA_SELFACTION_THREADS")]
    threads: Option<usize>,

    /// Series order.
    #[arg(long, global = true, default_value_t = 2)]
    order: usize,

    #[arg(long, global = true)]
    alpha: Option<f64>,

    #[arg(long, global = true)]
    beta: Option<f64>,

    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    /// Root bracket for `alpha` and `refine`.
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"])]
    bracket: Option<Vec<f64>>,

    /// Eigen mode (`alpha`, `refine`), beta mode (`beta`) or moment mode (`moments`).
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Profile samples for `fig1`.
    #[arg(long, global = true, default_value_t = 512)]
    samples: usize,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Print the iterates of both solution families.
    Series,
    /// Compare generated iterates and products with their published forms.
    CheckCoefficients,
    /// Print the normalized GG and FF product densities.
    Products,
    /// Sphere-reduced bilinear densities for all 16 operators.
    Densities,
    /// Damped moments M(p, q, η) with η = 2β.
    Moments,
    /// Solve the β condition at one α.
    Beta,
    /// Solve the eigencondition for α.
    Alpha,
    /// Closed-form root followed by full-series roots per order.
    Refine,
    /// Radial profile data.
    Fig1,
    /// Run every reproduction check.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Text,
}

const DEFAULT_ALPHA: f64 = 0.0073;

/// A subcommand result: one table, its JSON form, optional prose, and the
/// exit status.
struct Output {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json: Value,
    text: Option<String>,
    ok: bool,
}

impl Output {
    fn table(header: Vec<&'static str>, rows: Vec<Vec<String>>, json: Value) -> Self {
        Output { header, rows, json, text: None, ok: true }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Text => match &self.text {
                Some(t) => t.clone(),
                None => aligned(&self.header, &self.rows),
            },
        }
    }
}

fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header.to_vec());
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl From<alpha_selfaction::Error> for Failure {
    fn from(e: alpha_selfaction::Error) -> Self {
        match e {
            alpha_selfaction::Error::Parse(m) => Failure::Usage(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn parse_mode<T>(cli: &Cli) -> Res<Option<T>>
where
    T: std::str::FromStr<Err = alpha_selfaction::Error>,
{
    cli.mode.as_deref().map(str::parse).transpose().map_err(|e: alpha_selfaction::Error| {
        Failure::Usage(format!("--mode: {e}"))
    })
}

fn reject_mode(cli: &Cli, name: &str) -> Res<()> {
    match &cli.mode {
        Some(m) => Err(Failure::Usage(format!("--mode `{m}` is not used by `{name}`"))),
        None => Ok(()),
    }
}

fn series_rows(family: &str, label: &str, s: &LogPolySeries, rows: &mut Vec<Vec<String>>) {
    for t in s.terms() {
        rows.push(vec![
            family.to_string(),
            label.to_string(),
            t.alpha_pow.to_string(),
            t.s_pow.to_string(),
            t.log_pow.to_string(),
            t.coeff.to_string(),
        ]);
    }
}

fn cmd_series(cli: &Cli) -> Res<Output> {
    reject_mode(cli, "series")?;
    let families = [
        generate_family(FamilyKind::First, cli.order),
        generate_family(FamilyKind::Second, cli.order),
    ];
    let mut rows = Vec::new();
    let mut text = String::new();
    for f in &families {
        for (label, s) in f.iterates() {
            series_rows(f.kind.name(), &label, s, &mut rows);
            text.push_str(&format!("{label} = {s}\n"));
        }
    }
    let json = json!(families.iter().map(|f| f.to_json()).collect::<Vec<_>>());
    let mut out = Output::table(vec!["family", "iterate", "alpha_pow", "s_pow", "log_pow", "coefficient"], rows, json);
    out.text = Some(text);
    Ok(out)
}

fn report_rows(kind: &str, r: &CoefficientReport, rows: &mut Vec<Vec<String>>) {
    for c in &r.checks {
        let status = if c.skipped {
            "skipped"
        } else if c.matches() {
            "matched"
        } else {
            "mismatch"
        };
        rows.push(vec![
            kind.to_string(),
            c.label.clone(),
            status.to_string(),
            if c.partial { "leading" } else { "full" }.to_string(),
            c.difference.to_string(),
        ]);
    }
}

fn cmd_check(cli: &Cli) -> Res<Output> {
    reject_mode(cli, "check-coefficients")?;
    let iterates = check_iterates(cli.order);
    let products = check_products(cli.order)?;
    let mut rows = Vec::new();
    report_rows("iterate", &iterates, &mut rows);
    report_rows("product", &products, &mut rows);
    let ok = iterates.all_match() && products.all_match();
    let text = rows
        .iter()
        .map(|r| {
            let extra = if r[2] == "mismatch" { format!("  difference {}", r[4]) } else { String::new() };
            format!("{:<8} {:<6} {}{extra}\n", r[0], r[1], r[2])
        })
        .collect::<String>()
        + if ok { "all matched\n" } else { "MISMATCH\n" };
    let json = json!({ "order": cli.order, "iterates": iterates, "products": products, "all_match": ok });
    let mut out = Output::table(vec!["kind", "label", "status", "scope", "difference"], rows, json);
    out.text = Some(text);
    out.ok = ok;
    Ok(out)
}

fn cmd_products(cli: &Cli) -> Res<Output> {
    reject_mode(cli, "products")?;
    let first = generate_family(FamilyKind::First, cli.order);
    let second = generate_family(FamilyKind::Second, cli.order);
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut json = Vec::new();
    for kind in [ProductKind::GG, ProductKind::FF] {
        let p = product_density(&first, &second, kind)?;
        let name = format!("{kind:?}");
        let normalized = p.normalized();
        series_rows(&name, "normalized", &normalized, &mut rows);
        text.push_str(&format!(
            "{name} (complete through α^{}) = {normalized}\n",
            p.complete_through
        ));
        json.push(json!({
            "kind": name,
            "complete_through": p.complete_through,
            "discarded_from": p.discarded_from,
            "normalized": normalized,
        }));
    }
    let mut out = Output::table(vec!["product", "form", "alpha_pow", "s_pow", "log_pow", "coefficient"], rows, json!(json));
    out.text = Some(text);
    Ok(out)
}

fn cmd_densities(cli: &Cli) -> Res<Output> {
    reject_mode(cli, "densities")?;
    let quad = SphereQuadrature::default();
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut tables = Vec::new();
    for kind in [BispinorKind::First, BispinorKind::Second] {
        for up in [true, false] {
            let spin = AngularMomentum::half(up);
            for op in Operator::ALL {
                let t = angular_reduce(op, kind, spin, &quad)?;
                for e in t.surviving() {
                    rows.push(vec![
                        kind.particle().to_string(),
                        spin.label(),
                        op.label(),
                        op.quantity().unwrap_or("").to_string(),
                        e.radial.clone(),
                        e.left_harmonic.0.to_string(),
                        e.left_harmonic.1.to_string(),
                        e.fraction.map(|f| f.to_string()).unwrap_or_default(),
                        num(e.integral_re),
                    ]);
                }
                if t.survives() {
                    text.push_str(&format!(
                        "{} {} {:<6} {:<4} {}\n",
                        kind.particle(),
                        spin.label(),
                        op.label(),
                        op.quantity().unwrap_or("-"),
                        t.render()
                    ));
                }
                tables.push(t);
            }
        }
    }
    let mismatches: Vec<Value> = reference_mismatches()
        .into_iter()
        .map(|(op, printed)| {
            text.push_str(&format!(
                "printed pattern for {} differs: computed {} vs printed {}\n",
                op.label(),
                format_pattern(&op.pattern()),
                format_pattern(&printed)
            ));
            json!({ "operator": op.label(), "computed": format_pattern(&op.pattern()), "printed": format_pattern(&printed) })
        })
        .collect();
    let json = json!({ "tables": tables, "pattern_mismatches": mismatches });
    let mut out = Output::table(
        vec!["particle", "m", "operator", "quantity", "radial", "l", "m_l", "fraction", "sphere_integral"],
        rows,
        json,
    );
    out.text = Some(text);
    Ok(out)
}

fn alpha_or_default(cli: &Cli) -> f64 {
    cli.alpha.unwrap_or(DEFAULT_ALPHA)
}

fn cmd_moments(cli: &Cli) -> Res<Output> {
    let mode: MomentMode = parse_mode(cli)?.unwrap_or_default();
    let alpha = alpha_or_default(cli);
    let beta = cli.beta.unwrap_or(alpha * alpha / 8.0);
    let eta = 2.0 * beta;
    let mut rows = Vec::new();
    let mut json = Vec::new();
    for p in -4..=3 {
        for q in 0..=2u32 {
            let v = damped_moment(DampedMoment::new(p, q, eta), mode, cli.tol)?;
            rows.push(vec![p.to_string(), q.to_string(), num(eta), num(v)]);
            json.push(json!({ "p": p, "q": q, "eta": eta, "value": v }));
        }
    }
    Ok(Output::table(vec!["p", "q", "eta", "value"], rows, json!({ "mode": mode, "moments": json })))
}

fn cmd_beta(cli: &Cli) -> Res<Output> {
    let mode: Option<BetaMode> = parse_mode(cli)?;
    let alpha = alpha_or_default(cli);
    let opts = BetaOptions {
        order: cli.order,
        moments: MomentOptions { tol: cli.tol, ..MomentOptions::default() },
        ..BetaOptions::default()
    };
    let r = solve_beta(alpha, &opts)?;
    let out = match mode {
        Some(m) => Output::table(
            vec!["alpha", "mode", "beta"],
            vec![vec![num(alpha), cli.mode.clone().unwrap_or_default(), num(r.get(m))]],
            json!({ "alpha": alpha, "mode": cli.mode, "beta": r.get(m) }),
        ),
        None => Output::table(
            vec!["alpha", "beta_asymptotic", "beta_numeric", "beta_full_series"],
            vec![vec![num(alpha), num(r.beta_asymptotic), num(r.beta_numeric), num(r.beta_full_series)]],
            serde_json::to_value(r).expect("serializable"),
        ),
    };
    Ok(out)
}

fn eigen_config(cli: &Cli) -> Res<EigenConfig> {
    let mut cfg = EigenConfig {
        mode: parse_mode(cli)?.unwrap_or(EigenMode::Closed),
        tol: cli.tol,
        series_order: cli.order,
        ..EigenConfig::default()
    };
    if let Some(b) = &cli.bracket {
        if b[0].partial_cmp(&b[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Failure::Usage(format!("--bracket needs LO < HI, got {} {}", b[0], b[1])));
        }
        cfg.bracket = (b[0], b[1]);
    }
    Ok(cfg)
}

fn cmd_alpha(cli: &Cli) -> Res<Output> {
    let cfg = eigen_config(cli)?;
    let r = solve_alpha(&cfg)?;
    let mode = match r.mode {
        EigenMode::Closed => "closed",
        EigenMode::FullSeries => "full_series",
    };
    Ok(Output::table(
        vec!["mode", "alpha", "beta", "residual", "iterations"],
        vec![vec![mode.into(), num(r.alpha), num(r.beta), num(r.residual.value()), r.iterations.to_string()]],
        serde_json::to_value(r).expect("serializable"),
    ))
}

fn cmd_refine(cli: &Cli) -> Res<Output> {
    let cfg = eigen_config(cli)?;
    let r = refine_alpha(cli.order, &cfg)?;
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.order.map(|o| o.to_string()).unwrap_or_else(|| "closed".into()),
                num(row.alpha),
                num(row.beta),
                row.change.map(num).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Output::table(
        vec!["order", "alpha", "beta", "change"],
        rows,
        serde_json::to_value(&r).expect("serializable"),
    ))
}

fn cmd_fig1(cli: &Cli) -> Res<Output> {
    reject_mode(cli, "fig1")?;
    let alpha = alpha_or_default(cli);
    let beta = match cli.beta {
        Some(b) => b,
        None => solve_beta(alpha, &BetaOptions::default())?.beta_numeric,
    };
    let d: Fig1Data = fig1_data(alpha, beta, cli.samples)?;
    let rows = d
        .rows
        .iter()
        .map(|r| [r.s, r.big_f, r.big_g, r.small_f, r.small_g, r.gg, r.ff].map(num).to_vec())
        .collect();
    Ok(Output::table(
        Fig1Data::CSV_HEADER.split(',').collect(),
        rows,
        serde_json::to_value(&d).expect("serializable"),
    ))
}

fn cmd_verify(cli: &Cli) -> Res<Output> {
    reject_mode(cli, "verify")?;
    let outcomes = verify::run_all();
    let ok = outcomes.iter().all(|o| o.passed);
    let rows = outcomes
        .iter()
        .map(|o| {
            vec![
                o.id.to_string(),
                o.name.to_string(),
                if o.passed { "pass" } else { "fail" }.to_string(),
                format!("\"{}\"", o.detail.replace('"', "'")),
            ]
        })
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let text = outcomes.iter().map(|o| o.summary() + "\n").collect::<String>()
        + &format!("{passed}/{} passed\n", outcomes.len());
    let mut out = Output::table(
        vec!["id", "name", "status", "detail"],
        rows,
        json!({
            "passed": passed,
            "total": outcomes.len(),
            "outcomes": outcomes
                .iter()
                .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }))
                .collect::<Vec<_>>(),
        }),
    );
    out.text = Some(text);
    out.ok = ok;
    Ok(out)
}

fn run(cli: &Cli) -> Res<Output> {
    match cli.command {
        Command::Series => cmd_series(cli),
        Command::CheckCoefficients => cmd_check(cli),
        Command::Products => cmd_products(cli),
        Command::Densities => cmd_densities(cli),
        Command::Moments => cmd_moments(cli),
        Command::Beta => cmd_beta(cli),
        Command::Alpha => cmd_alpha(cli),
        Command::Refine => cmd_refine(cli),
        Command::Fig1 => cmd_fig1(cli),
        Command::Verify => cmd_verify(cli),
    }
}

fn write_output(cli: &Cli, body: &str) -> io::Result<()> {
    match &cli.out {
        Some(path) => File::create(path)?.write_all(body.as_bytes()),
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is built once");
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = write_output(&cli, &out.render(cli.format)) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
