//! `bell`: evaluate Bell expressions, certify NS-equivalences and check the
//! optimal-steering criterion from the command line.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when `--expect-ow`
//! is given and the verdict is not OW.

mod input;
mod report;
mod scan;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use bell_core::cglmp::{
    cglmp3_report, gd_game, optimal_state, psi_gamma_coefficient, zohren_gill, TABLE1_EXPECTATION,
    TABLE1_LAMBDA,
};
use bell_core::mermin::{
    ghz_realization, ghz_z_realization, mermin_expression, product_realization,
    tripartite_ow_report, SteeringType,
};
use bell_core::ns::{ns_constant_certificate, ns_equivalent};
use bell_core::ow::{ow_game_search, ow_report, solve_gamma, GammaFamily, OwReport, DEFAULT_TOL};
use bell_core::quantum::{Realization, Steering};
use bell_core::scenario::{evaluate, local_bound};
use bell_core::seesaw::{seesaw_maximize, SeesawConfig};
use bell_core::table::{format_table, format_value};
use bell_core::BellExpression;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use input::{fixture, read_realization, read_table, Fixture, FixtureParams, RealizationJson};
use report::{table_rows, CertificateJson, GammaJson, Header, LineJson, OwReportJson, SearchJson};
use scan::ScanKind;

#[derive(Parser, Debug)]
#[command(
    name = "bell",
    version,
    about = "Bell expressions, NS-equivalence and optimal steering"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Saturation tolerance for OW verdicts.
    #[arg(long, global = true, env = "BELL_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exit with status 2 unless the verdict is OW.
    #[arg(long, global = true)]
    expect_ow: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Args, Debug, Clone, Default)]
struct Source {
    /// Coefficient table in the block text format.
    table: Option<PathBuf>,
    /// Built-in family instead of (or as realization source for) a table.
    #[arg(long)]
    family: Option<String>,
    /// Scenario `mA,mB,nA,nB` for tables without delimiters.
    #[arg(long)]
    scenario: Option<String>,
    /// Realization JSON document.
    #[arg(long)]
    realization: Option<PathBuf>,
    /// Steering direction such as `A->B`, `B->A`, `A->BC`, `AB->C`.
    #[arg(long)]
    direction: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Three-parameter angles `a00,a01,a10`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    /// Local dimension for the CGLMP families.
    #[arg(long)]
    d: Option<usize>,
    /// See-saw restarts where a realization has to be recovered.
    #[arg(long, default_value_t = 50)]
    restarts: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Value of an expression at a realization.
    Eval(Source),
    /// Local bound by enumeration of deterministic strategies.
    LocalBound(Source),
    /// Print a table in the block layout.
    Show(Source),
    /// Certificate that a table is constant on NS behaviors.
    NsConst {
        table: PathBuf,
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Certificate that two tables differ by an NS constant.
    NsEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Saturation report for a realization.
    OwCheck(Source),
    /// Search for an NS-equivalent OW-game at a two-qubit realization.
    OwSearch(Source),
    /// Solve for Γ in a one-parameter family.
    GammaSolve {
        #[command(flatten)]
        src: Source,
        /// Direction table `D` of the family `base + Γ·D`; the base is the positional table.
        #[arg(long)]
        along: Option<PathBuf>,
    },
    /// Numerical maximization over states and projective measurements.
    Seesaw {
        #[command(flatten)]
        src: Source,
        /// Local dimensions `dA,dB`.
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        dims: Vec<usize>,
        /// Save the best realization as JSON.
        #[arg(long)]
        save_realization: Option<PathBuf>,
    },
    /// Summary of a built-in family member.
    Family {
        name: String,
        #[command(flatten)]
        src: Source,
        /// Scan this many seeded members instead (three-param and tilted).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Seeded scan over a family.
    Scan {
        #[arg(value_enum)]
        kind: ScanKind,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Record per-sample wall time; output is then no longer reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// CGLMP games at their optimal states.
    Cglmp {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, value_enum, default_value_t = Game::Zg)]
        game: Game,
        #[arg(long, value_enum)]
        report: Option<CglmpReport>,
    },
    /// Tripartite Mermin expression.
    Mermin {
        #[arg(long = "type", value_parser = ["i", "ii"], default_value = "i")]
        ty: String,
        #[arg(long, value_enum, default_value_t = MerminState::Ghz)]
        state: MerminState,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Game {
    Zg,
    Gd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CglmpReport {
    Table1,
    Ow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MerminState {
    Ghz,
    GhzZ,
    Product,
}

/// Rendered command result.
struct Out {
    json: String,
    text: String,
    csv: Option<String>,
    verdict: Option<bool>,
}

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    header: Header,
    #[serde(flatten)]
    body: &'a T,
}

fn json<T: Serialize>(command: &str, seed: Option<u64>, body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Doc {
        header: Header::new(command, seed),
        body,
    })?;
    s.push('\n');
    Ok(s)
}

struct Ctx {
    tol: f64,
    seed: u64,
}

impl Ctx {
    fn params(&self, s: &Source) -> FixtureParams {
        FixtureParams {
            gamma: s.gamma,
            theta: s.theta,
            angles: s.angles.clone(),
            seed: self.seed,
            restarts: s.restarts,
            d: s.d,
        }
    }
}

/// Expression plus whatever realization and direction the source supplies.
struct Resolved {
    expr: BellExpression,
    realization: Option<Realization>,
    direction: Steering,
    gamma_family: Option<GammaFamily>,
    /// Whether the run drew random numbers.
    seeded: bool,
}

fn resolve(ctx: &Ctx, s: &Source) -> Result<Resolved> {
    let fx: Option<Fixture> = match &s.family {
        Some(name) => Some(fixture(name, &ctx.params(s))?),
        None => None,
    };
    let seeded = matches!(s.family.as_deref(), Some("c1" | "c2"))
        || (s.family.as_deref() == Some("three-param") && s.angles.is_none());
    let expr = match (&s.table, &fx) {
        (Some(t), _) => read_table(t, s.scenario.as_deref())?,
        (None, Some(f)) => f.expr.clone(),
        (None, None) => bail!("give a table file or --family"),
    };
    let realization = match (&s.realization, &fx) {
        (Some(p), _) => Some(read_realization(p)?),
        (None, Some(f)) => Some(f.realization.clone()),
        (None, None) => None,
    };
    let direction = match (&s.direction, &fx) {
        (Some(d), _) => Steering::parse(d)?,
        (None, Some(f)) => f.direction.clone(),
        (None, None) => Steering::a_to_b(),
    };
    let gamma_family = fx.and_then(|f| f.gamma_family);
    Ok(Resolved {
        expr,
        realization,
        direction,
        gamma_family,
        seeded,
    })
}

fn need_realization(r: &Resolved) -> Result<&Realization> {
    r.realization
        .as_ref()
        .ok_or_else(|| anyhow!("no realization: pass --realization or --family"))
}

fn seed_if(seeded: bool, ctx: &Ctx) -> Option<u64> {
    seeded.then_some(ctx.seed)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into())
}

fn verdict_word(ow: bool) -> &'static str {
    scan::verdict_label(ow)
}

fn ow_text(r: &OwReport) -> String {
    let j = OwReportJson::from(r);
    let mut t = String::new();
    let _ = writeln!(
        t,
        "direction {}  tol {:e}  value {:.10}",
        j.direction, j.tol, j.value
    );
    let _ = writeln!(
        t,
        "{:>8} {:>8} {:>14} {:>14} {:>14} {:>14}",
        "x", "a", "weight", "<B>", "lambda_max", "gap"
    );
    for c in &j.contexts {
        let _ = writeln!(
            t,
            "{:>8} {:>8} {:>14.10} {:>14} {:>14.10} {:>14}",
            c.x.to_string(),
            c.a.to_string(),
            c.weight,
            fmt_opt(c.expectation),
            c.lambda_max,
            c.gap
                .map(|g| format!("{g:.3e}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    let _ = writeln!(
        t,
        "max gap {}  verdict {}",
        fmt_opt(j.max_gap),
        verdict_word(j.verdict)
    );
    t
}

fn ow_csv(r: &OwReport) -> Result<String> {
    let j = OwReportJson::from(r);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "a", "weight", "expectation", "lambda_max", "gap"])?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for c in &j.contexts {
        w.write_record([
            c.x.to_string(),
            c.a.to_string(),
            c.weight.to_string(),
            opt(c.expectation),
            c.lambda_max.to_string(),
            opt(c.gap),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn ow_out(command: &str, seed: Option<u64>, r: &OwReport) -> Result<Out> {
    #[derive(Serialize)]
    struct Body {
        report: OwReportJson,
    }
    Ok(Out {
        json: json(command, seed, &Body { report: r.into() })?,
        text: ow_text(r),
        csv: Some(ow_csv(r)?),
        verdict: Some(r.verdict),
    })
}

fn cmd_eval(ctx: &Ctx, s: &Source) -> Result<Out> {
    let r = resolve(ctx, s)?;
    let p = need_realization(&r)?.behavior()?;
    let value = evaluate(&r.expr, &p)?;
    #[derive(Serialize)]
    struct Body<'a> {
        label: &'a str,
        value: f64,
    }
    Ok(Out {
        json: json(
            "eval",
            seed_if(r.seeded, ctx),
            &Body {
                label: r.expr.label(),
                value,
            },
        )?,
        text: format!("{}  value {}\n", r.expr.label(), format_value(value)),
        csv: None,
        verdict: None,
    })
}

fn cmd_local_bound(ctx: &Ctx, s: &Source) -> Result<Out> {
    let r = resolve(ctx, s)?;
    let lb = local_bound(&r.expr)?;
    #[derive(Serialize)]
    struct Body<'a> {
        label: &'a str,
        value: f64,
        maximizers: Vec<Vec<Vec<usize>>>,
    }
    let maximizers: Vec<_> = lb
        .maximizers
        .iter()
        .map(|d| d.assignment().to_vec())
        .collect();
    let mut text = format!(
        "{}  local bound {}  ({} maximizers)\n",
        r.expr.label(),
        format_value(lb.value),
        maximizers.len()
    );
    for m in &maximizers {
        let _ = writeln!(text, "  {m:?}");
    }
    Ok(Out {
        json: json(
            "local-bound",
            seed_if(r.seeded, ctx),
            &Body {
                label: r.expr.label(),
                value: lb.value,
                maximizers,
            },
        )?,
        text,
        csv: None,
        verdict: None,
    })
}

fn cmd_show(ctx: &Ctx, s: &Source) -> Result<Out> {
    let r = resolve(ctx, s)?;
    #[derive(Serialize)]
    struct Body<'a> {
        label: &'a str,
        inputs: &'a [usize],
        outputs: &'a [usize],
        rows: Vec<Vec<f64>>,
    }
    let sc = r.expr.scenario();
    let text = match format_table(&r.expr) {
        Ok(t) => format!("{t}\n"),
        Err(_) => {
            let cs: Vec<String> = r.expr.coeffs().iter().map(|&v| format_value(v)).collect();
            format!("{}\n", cs.join(" "))
        }
    };
    Ok(Out {
        json: json(
            "show",
            seed_if(r.seeded, ctx),
            &Body {
                label: r.expr.label(),
                inputs: sc.inputs(),
                outputs: sc.outputs(),
                rows: table_rows(&r.expr),
            },
        )?,
        text,
        csv: None,
        verdict: None,
    })
}

fn cert_text(c: &CertificateJson) -> String {
    if !c.constant {
        return "not an NS constant\n".into();
    }
    let mut t = format!("NS constant k = {}\n", fmt_opt(c.k));
    if c.alpha.is_some() {
        let _ = writeln!(
            t,
            "alpha {}  beta {}  gamma {}  delta {}  residual {}",
            fmt_opt(c.alpha),
            fmt_opt(c.beta),
            fmt_opt(c.gamma),
            fmt_opt(c.delta),
            c.residual.map(|r| format!("{r:e}")).unwrap_or_default()
        );
    }
    t
}

fn cmd_ns_const(table: &PathBuf, scenario: Option<&str>) -> Result<Out> {
    let e = read_table(table, scenario)?;
    let c = CertificateJson::from(ns_constant_certificate(&e)?.as_ref());
    Ok(Out {
        json: json("ns-const", None, &c)?,
        text: cert_text(&c),
        csv: None,
        verdict: None,
    })
}

fn cmd_ns_equiv(a: &PathBuf, b: &PathBuf, scenario: Option<&str>) -> Result<Out> {
    let ea = read_table(a, scenario)?;
    let eb = read_table(b, scenario)?;
    let c = CertificateJson::from(ns_equivalent(&ea, &eb)?.as_ref());
    Ok(Out {
        json: json("ns-equiv", None, &c)?,
        text: cert_text(&c),
        csv: None,
        verdict: None,
    })
}

fn cmd_ow_check(ctx: &Ctx, s: &Source) -> Result<Out> {
    let r = resolve(ctx, s)?;
    let rep = ow_report(&r.expr, need_realization(&r)?, &r.direction, ctx.tol)?;
    ow_out("ow-check", seed_if(r.seeded, ctx), &rep)
}

fn cmd_ow_search(ctx: &Ctx, s: &Source) -> Result<Out> {
    let r = resolve(ctx, s)?;
    let o = ow_game_search(&r.expr, need_realization(&r)?, ctx.tol)?;
    let j = SearchJson::from(&o);
    let mut text = format!(
        "found {}  weights {:?}  k {}  rank {}  residual {:e}\n",
        j.found,
        j.weights,
        format_value(j.k),
        j.rank,
        j.residual
    );
    if let Some(g) = &o.game {
        let _ = writeln!(text, "{}", format_table(g)?);
    }
    if let Some(d) = &j.diagnostic {
        let _ = writeln!(text, "{d}");
    }
    let verdict = o.report.as_ref().map(|r| r.verdict).unwrap_or(false);
    Ok(Out {
        json: json("ow-search", seed_if(r.seeded, ctx), &j)?,
        text,
        csv: None,
        verdict: Some(verdict),
    })
}

fn cmd_gamma_solve(ctx: &Ctx, s: &Source, along: Option<&PathBuf>) -> Result<Out> {
    let mut r = resolve(ctx, s)?;
    let fam = match (along, r.gamma_family.take()) {
        (Some(p), _) => GammaFamily::new(r.expr.clone(), read_table(p, s.scenario.as_deref())?)?,
        (None, Some(f)) => f,
        (None, None) => {
            bail!("no Γ family: use --family c1|c2|tilted or a base table with --along")
        }
    };
    let g = solve_gamma(&fam, need_realization(&r)?, &r.direction, ctx.tol)?;
    let j = GammaJson::from(&g);
    let mut text = String::new();
    for c in &j.candidates {
        let _ = writeln!(text, "x {} a {}  candidate {:.10}", c.x, c.a, c.gamma);
    }
    let _ = writeln!(
        text,
        "gamma {}  spread {}",
        fmt_opt(j.gamma),
        fmt_opt(j.spread)
    );
    if let Some(d) = &j.diagnostic {
        let _ = writeln!(text, "{d}");
    }
    if let Some(rep) = &g.report {
        text.push_str(&ow_text(rep));
    }
    Ok(Out {
        json: json("gamma-solve", seed_if(r.seeded, ctx), &j)?,
        text,
        csv: None,
        verdict: Some(g.gamma.is_some()),
    })
}

fn cmd_seesaw(ctx: &Ctx, s: &Source, dims: &[usize], save: Option<&PathBuf>) -> Result<Out> {
    let [da, db] = dims[..] else {
        bail!("--dims takes two values dA,dB");
    };
    let r = resolve(ctx, s)?;
    let cfg = SeesawConfig {
        restarts: s.restarts.max(1),
        seed: ctx.seed,
        ..SeesawConfig::default()
    };
    let res = seesaw_maximize(&r.expr, [da, db], &cfg)?;
    let rep = ow_report(&r.expr, &res.realization, &r.direction, ctx.tol)?;
    if let Some(p) = save {
        let doc =
            serde_json::to_string_pretty(&RealizationJson::from_realization(&res.realization))?;
        fs::write(p, doc + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    #[derive(Serialize)]
    struct Body {
        value: f64,
        best_restart: usize,
        restarts: usize,
        values: Vec<f64>,
        report: OwReportJson,
    }
    let body = Body {
        value: res.value,
        best_restart: res.best_restart,
        restarts: cfg.restarts,
        values: res.values.clone(),
        report: (&rep).into(),
    };
    let text = format!(
        "value {:.12}  best restart {} of {}\n{}",
        res.value,
        res.best_restart,
        cfg.restarts,
        ow_text(&rep)
    );
    Ok(Out {
        json: json("seesaw", Some(ctx.seed), &body)?,
        text,
        csv: Some(ow_csv(&rep)?),
        verdict: Some(rep.verdict),
    })
}

fn scan_out(ctx: &Ctx, kind: ScanKind, samples: usize, timing: bool) -> Result<Out> {
    let s = scan::run(kind, samples, ctx.seed, ctx.tol, timing)?;
    let text = format!(
        "{} samples of {} (seed {})  all OW {}  worst gap {:e}\n",
        s.samples, s.kind, ctx.seed, s.all_ow, s.worst_gap
    );
    Ok(Out {
        json: json("scan", Some(ctx.seed), &s)?,
        text,
        csv: Some(scan::to_csv(&s)?),
        verdict: Some(s.all_ow),
    })
}

fn cmd_family(ctx: &Ctx, name: &str, s: &Source, samples: Option<usize>) -> Result<Out> {
    if let Some(n) = samples {
        let kind = match name {
            "three-param" => ScanKind::ThreeParam,
            "tilted" => ScanKind::Tilted,
            _ => bail!("--samples applies to three-param and tilted only"),
        };
        return scan_out(ctx, kind, n, false);
    }
    let src = Source {
        family: Some(name.to_string()),
        ..s.clone()
    };
    let r = resolve(ctx, &src)?;
    let real = need_realization(&r)?;
    let value = evaluate(&r.expr, &real.behavior()?)?;
    let lb = local_bound(&r.expr)?.value;
    let rep = ow_report(&r.expr, real, &r.direction, ctx.tol)?;
    #[derive(Serialize)]
    struct Body<'a> {
        family: &'a str,
        label: &'a str,
        gamma: Option<f64>,
        theta: Option<f64>,
        rows: Vec<Vec<f64>>,
        local_bound: f64,
        value: f64,
        report: OwReportJson,
        lines: Option<Vec<LineJson>>,
    }
    let lines = bound_lines(name, &r, ctx, s)?;
    let body = Body {
        family: name,
        label: r.expr.label(),
        gamma: s.gamma,
        theta: s.theta,
        rows: table_rows(&r.expr),
        local_bound: lb,
        value,
        report: (&rep).into(),
        lines: lines
            .as_ref()
            .map(|v| v.iter().map(LineJson::from).collect()),
    };
    let mut text = String::new();
    if let Ok(t) = format_table(&r.expr) {
        let _ = writeln!(text, "{t}");
    }
    let _ = writeln!(
        text,
        "local bound {}  value {:.10}",
        format_value(lb),
        value
    );
    text.push_str(&ow_text(&rep));
    if let Some(ls) = &lines {
        for l in ls {
            let _ = writeln!(
                text,
                "line x {:?} a {:?}  lambda {:.6}  scale {:.6}  shift {:.6}  residual {:.1e}",
                l.context.inputs, l.context.outputs, l.lambda, l.scale, l.shift, l.residual
            );
        }
    }
    Ok(Out {
        json: json("family", seed_if(r.seeded, ctx), &body)?,
        text,
        csv: Some(ow_csv(&rep)?),
        verdict: Some(rep.verdict),
    })
}

/// Printed bound lines for the families that come with them.
fn bound_lines(
    name: &str,
    r: &Resolved,
    ctx: &Ctx,
    s: &Source,
) -> Result<Option<Vec<bell_core::ow::BoundLineCheck>>> {
    use bell_core::families::{counterexample_bound_lines, tilted_bound_lines, CounterExample};
    use bell_core::ow::check_bound_lines;
    let real = need_realization(r)?;
    let lines = match name {
        "c1" | "c2" => {
            let which = if name == "c1" {
                CounterExample::C1
            } else {
                CounterExample::C2
            };
            counterexample_bound_lines(which, s.gamma.unwrap_or(which.reported_gamma()))
        }
        "tilted" if s.gamma.unwrap_or(1.0) == 1.0 => {
            tilted_bound_lines(&input::tilted_point(&ctx.params(s))?)
        }
        _ => return Ok(None),
    };
    Ok(Some(check_bound_lines(
        &r.expr,
        real,
        &r.direction,
        &lines,
    )?))
}

fn cmd_cglmp(ctx: &Ctx, d: usize, game: Game, which: Option<CglmpReport>) -> Result<Out> {
    match which.unwrap_or(CglmpReport::Ow) {
        CglmpReport::Table1 => {
            if d != 3 || game != Game::Zg {
                bail!("--report table1 is defined for --d 3 --game zg");
            }
            let rep = cglmp3_report()?;
            #[derive(Serialize)]
            struct Row {
                x: usize,
                a: usize,
                lambda: f64,
                expectation: Option<f64>,
                reported_lambda: f64,
                reported_expectation: f64,
            }
            #[derive(Serialize)]
            struct Body {
                d: usize,
                game: &'static str,
                state_coefficient: f64,
                rows: Vec<Row>,
                report: OwReportJson,
            }
            let rows: Vec<Row> = rep
                .contexts
                .iter()
                .enumerate()
                .map(|(i, c)| Row {
                    x: c.context.inputs[0],
                    a: c.context.outputs[0],
                    lambda: c.lambda_max,
                    expectation: c.expectation,
                    reported_lambda: TABLE1_LAMBDA[i],
                    reported_expectation: TABLE1_EXPECTATION[i],
                })
                .collect();
            let mut text = format!(
                "{:>3} {:>3} {:>10} {:>10} {:>10} {:>10}\n",
                "x", "a", "lambda", "<B>", "ref", "ref <B>"
            );
            for r in &rows {
                let _ = writeln!(
                    text,
                    "{:>3} {:>3} {:>10.4} {:>10} {:>10.4} {:>10.4}",
                    r.x,
                    r.a,
                    r.lambda,
                    r.expectation
                        .map(|e| format!("{e:.4}"))
                        .unwrap_or_else(|| "-".into()),
                    r.reported_lambda,
                    r.reported_expectation
                );
            }
            let body = Body {
                d,
                game: "zg",
                state_coefficient: psi_gamma_coefficient(),
                rows,
                report: (&rep).into(),
            };
            Ok(Out {
                json: json("cglmp", None, &body)?,
                text,
                csv: Some(ow_csv(&rep)?),
                verdict: Some(rep.verdict),
            })
        }
        CglmpReport::Ow => {
            let expr = match game {
                Game::Zg => zohren_gill(d)?,
                Game::Gd => gd_game(d)?,
            };
            let opt = optimal_state(d)?;
            let rep = ow_report(&expr, &opt.realization, &Steering::a_to_b(), ctx.tol)?;
            let value = evaluate(&expr, &opt.realization.behavior()?)?;
            #[derive(Serialize)]
            struct Body {
                d: usize,
                game: &'static str,
                value: f64,
                lambda: f64,
                multiplicity: usize,
                report: OwReportJson,
            }
            let body = Body {
                d,
                game: if game == Game::Zg { "zg" } else { "gd" },
                value,
                lambda: opt.lambda,
                multiplicity: opt.multiplicity,
                report: (&rep).into(),
            };
            let text = format!(
                "d {d}  value {value:.10}  top eigenvalue {:.10}\n{}",
                opt.lambda,
                ow_text(&rep)
            );
            Ok(Out {
                json: json("cglmp", None, &body)?,
                text,
                csv: Some(ow_csv(&rep)?),
                verdict: Some(rep.verdict),
            })
        }
    }
}

fn cmd_mermin(ctx: &Ctx, ty: &str, state: MerminState) -> Result<Out> {
    let ty = SteeringType::parse(ty)?;
    let r = match state {
        MerminState::Ghz => ghz_realization(),
        MerminState::GhzZ => ghz_z_realization(),
        MerminState::Product => product_realization(),
    };
    let rep = tripartite_ow_report(&mermin_expression(), &r, ty, ctx.tol)?;
    ow_out("mermin", None, &rep)
}

fn run(cli: &Cli) -> Result<Out> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        bail!("--tol must be positive, got {}", cli.tol);
    }
    let ctx = Ctx {
        tol: cli.tol,
        seed: cli.seed,
    };
    match &cli.cmd {
        Cmd::Eval(s) => cmd_eval(&ctx, s),
        Cmd::LocalBound(s) => cmd_local_bound(&ctx, s),
        Cmd::Show(s) => cmd_show(&ctx, s),
        Cmd::NsConst { table, scenario } => cmd_ns_const(table, scenario.as_deref()),
        Cmd::NsEquiv { a, b, scenario } => cmd_ns_equiv(a, b, scenario.as_deref()),
        Cmd::OwCheck(s) => cmd_ow_check(&ctx, s),
        Cmd::OwSearch(s) => cmd_ow_search(&ctx, s),
        Cmd::GammaSolve { src, along } => cmd_gamma_solve(&ctx, src, along.as_ref()),
        Cmd::Seesaw {
            src,
            dims,
            save_realization,
        } => cmd_seesaw(&ctx, src, dims, save_realization.as_ref()),
        Cmd::Family { name, src, samples } => cmd_family(&ctx, name, src, *samples),
        Cmd::Scan {
            kind,
            samples,
            timing,
        } => scan_out(&ctx, *kind, *samples, *timing),
        Cmd::Cglmp { d, game, report } => cmd_cglmp(&ctx, *d, *game, *report),
        Cmd::Mermin { ty, state } => cmd_mermin(&ctx, ty, *state),
    }
}

fn emit(cli: &Cli, out: &Out) -> Result<()> {
    let doc = match cli.format {
        Format::Json => &out.json,
        Format::Text => &out.text,
        Format::Csv => out
            .csv
            .as_ref()
            .ok_or_else(|| anyhow!("csv output is not available for this command"))?,
    };
    match &cli.output {
        Some(p) => fs::write(p, doc).with_context(|| format!("writing {}", p.display())),
        None => match std::io::stdout().lock().write_all(doc.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let out = match run(&cli).and_then(|o| emit(&cli, &o).map(|_| o)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if cli.expect_ow && out.verdict != Some(true) {
        eprintln!("verdict is not OW");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
