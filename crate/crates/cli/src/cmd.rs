use std::f64::consts::{LN_2, PI};
use std::io::Read;
use std::path::Path;

use serde_json::{json, Value};
use tmlab::analyze::{
    f_trajectory, fig2_enclosures, limit_estimates, xi_mu_trajectory, xi_psi_trajectory, LimitEstimate, SampleGrid,
    Trajectory,
};
use tmlab::descriptor::{Descriptor, Point, PointSpec};
use tmlab::measure::{
    cylinder_leading_term, cylinder_measure_estimate, riesz_quadrature, EstimateConfig, QuadratureConfig,
};
use tmlab::report::{Provenance, VerifyReport};
use tmlab::seqcore::{AlternationCode, BinaryWord};
use tmlab::spectrum::spectrum_grid;
use tmlab::verify::{self, Suite};

use crate::output::{Cell, Context, Table};
use crate::{Failure, Format, Kind, SuiteArg, Which};

/// Rows a `fig2` request may produce.
const MAX_FIG2_ROWS: u128 = 1 << 24;

pub struct Targets {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

fn need(v: Option<f64>, flag: &str, kind: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--kind {kind} requires --{flag}")))
}

pub fn spectrum(ctx: &mut Context, q: usize) -> Result<(), Failure> {
    let rows = spectrum_grid(q)?;
    let mut t = Table::new(vec!["alpha", "beta", "f", "eta"]);
    for r in rows {
        t.push(vec![r.alpha.into(), r.beta.into(), r.f.into(), r.eta.into()]);
    }
    let prov = Provenance::new("spectrum").param("q", q);
    t.write(ctx, &prov, ctx.format_or(Format::Csv))
}

pub fn construct(
    ctx: &mut Context,
    kind: Kind,
    targets: Targets,
    lambda: u64,
    seed: u64,
    prefix_len: Option<usize>,
) -> Result<(), Failure> {
    if ctx.format_or(Format::Json) != Format::Json {
        return Err(Failure::Usage("descriptors are written as JSON only".into()));
    }
    let spec = match kind {
        Kind::Joint => PointSpec::Joint {
            alpha: need(targets.alpha, "alpha", "joint")?,
            beta: need(targets.beta, "beta", "joint")?,
            lambda,
            seed,
        },
        Kind::Intermediate => PointSpec::Intermediate {
            gamma: need(targets.gamma, "gamma", "intermediate")?,
            alpha: need(targets.alpha, "alpha", "intermediate")?,
            lambda,
            seed,
        },
        Kind::Bounded => PointSpec::Bounded { lambda, seed },
    };
    let (d, _) = Descriptor::constructed(spec, prefix_len)?;
    let mut prov = Provenance::new("construct").seed(Some(seed)).param("lambda", lambda);
    for (k, v) in [("alpha", targets.alpha), ("beta", targets.beta), ("gamma", targets.gamma)] {
        if let Some(v) = v {
            prov = prov.param(k, v);
        }
    }
    if let Some(n) = prefix_len {
        prov = prov.param("prefix_len", n);
    }
    // Readers ignore unknown members, so the provenance rides along.
    let mut doc: Value = serde_json::from_str(&d.to_json()).expect("descriptor JSON");
    doc["provenance"] = json!(prov);
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    ctx.write_str(&s)
}

fn read_descriptor(path: &Path) -> Result<Descriptor, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read descriptor {}: {e}", path.display())))?
    };
    Ok(Descriptor::from_json(&text)?)
}

fn tail_extra(t: &mut Table, traj: &Trajectory, tail: Option<f64>) -> Result<(), Failure> {
    if let Some(f) = tail {
        let e: LimitEstimate = limit_estimates(traj, f)?;
        t.extra.push(("limit_estimate", json!(e)));
    }
    Ok(())
}

pub fn trajectory(
    ctx: &mut Context,
    descriptor: &Path,
    which: Which,
    n_max: u128,
    tail: Option<f64>,
    lambda: Option<u64>,
    grid_ratio: f64,
) -> Result<(), Failure> {
    if n_max == 0 {
        return Err(Failure::Usage("--n-max must be positive".into()));
    }
    if !(grid_ratio > 1.0 && grid_ratio.is_finite()) {
        return Err(Failure::Usage("--grid-ratio must exceed 1".into()));
    }
    let d = read_descriptor(descriptor)?;
    let point = d.realize()?;
    let mut prov = Provenance::new("trajectory")
        .seed(d.seed())
        .param("which", which_name(which))
        .param("n_max", n_max);
    if let Some(f) = tail {
        prov = prov.param("tail", f);
    }
    let natural = ctx.natural_log;
    let table = match which {
        Which::XiMu | Which::XiPsi => {
            prov = prov.param("grid_ratio", grid_ratio).param("natural_log", natural);
            let code = point.code_covering(n_max)?;
            let grid = SampleGrid {
                ratio: grid_ratio,
                ..SampleGrid::default()
            };
            let mu = which == Which::XiMu;
            let traj = if mu {
                xi_mu_trajectory(&code, n_max, grid)?
            } else {
                xi_psi_trajectory(&code, n_max, grid)?
            };
            let mut t = Table::new(vec!["n", "value", "lo", "hi"]);
            for s in traj.samples() {
                t.push(xi_row(&code, s.index, s.value, mu, natural)?);
            }
            tail_extra(&mut t, &traj, tail)?;
            t
        }
        Which::F | Which::Rho => {
            let lambda = match (lambda, &point) {
                (Some(l), _) => l,
                (None, Point::Constructed(c)) => c.lambda(),
                (None, Point::Code { .. }) => {
                    return Err(Failure::Usage("--lambda is required for codes without a threshold".into()))
                }
            };
            prov = prov.param("lambda", lambda);
            let m_max = usize::try_from(n_max).map_err(|_| Failure::Usage("--n-max is too large".into()))?;
            let code = point.code_with_blocks(m_max)?;
            let c = f_trajectory(&code, m_max, lambda)?;
            if which == Which::F {
                let mut t = Table::new(vec!["m", "F", "F_lambda", "ell", "rho"]);
                for (i, s) in c.f.samples().iter().enumerate() {
                    t.push(vec![
                        Cell::Int(s.index),
                        s.value.into(),
                        c.f_lambda.samples()[i].value.into(),
                        c.ell.samples()[i].value.into(),
                        c.rho.at(s.index).into(),
                    ]);
                }
                tail_extra(&mut t, &c.f, tail)?;
                t
            } else {
                let mut t = Table::new(vec!["m", "rho"]);
                for s in c.rho.samples() {
                    t.push(vec![Cell::Int(s.index), s.value.into()]);
                }
                if !c.rho.is_empty() {
                    tail_extra(&mut t, &c.rho, tail)?;
                }
                t
            }
        }
        Which::Fig2 => {
            if tail.is_some() {
                return Err(Failure::Usage("--tail does not apply to fig2".into()));
            }
            if n_max > MAX_FIG2_ROWS {
                return Err(Failure::Usage(format!("fig2 emits one row per position; --n-max is capped at {MAX_FIG2_ROWS}")));
            }
            prov = prov.param("natural_log", natural);
            let code = point.code_covering(n_max)?;
            let scale = if natural { LN_2 } else { 1.0 };
            let mut t = Table::new(vec!["n", "mu_lead", "mu_lo", "mu_hi", "psi_lead", "psi_lo", "psi_hi"]);
            for r in fig2_enclosures(&code, 1, n_max)? {
                t.push(vec![
                    Cell::Int(r.n),
                    Cell::Int(r.mu_lead),
                    (r.mu_lo * scale).into(),
                    (r.mu_hi * scale).into(),
                    Cell::Int(r.psi_lead),
                    (r.psi_lo * scale).into(),
                    (r.psi_hi * scale).into(),
                ]);
            }
            t
        }
    };
    table.write(ctx, &prov, ctx.format_or(Format::Csv))
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::XiMu => "xi_mu",
        Which::XiPsi => "xi_psi",
        Which::F => "F",
        Which::Rho => "rho",
        Which::Fig2 => "fig2",
    }
}

/// `n, xi, lo, hi` with the rigorous bracket of `-log mu(C_n)` (or of
/// `-S_n psi`) divided by `n^2 log 2`; raw values in nats when `natural`.
fn xi_row(code: &AlternationCode, n: u128, xi: f64, mu: bool, natural: bool) -> Result<Vec<Cell>, Failure> {
    let lead = if mu {
        cylinder_leading_term(code, n)? as f64
    } else {
        xi * (n as f64) * (n as f64)
    };
    let nf = n as f64;
    let lo = nf + lead - 2.0 * nf * PI.log2();
    let hi = nf + lead + if mu { 1.0 } else { 0.0 };
    Ok(if natural {
        vec![Cell::Int(n), (lead * LN_2).into(), (lo * LN_2).into(), (hi * LN_2).into()]
    } else {
        let sq = nf * nf;
        vec![Cell::Int(n), xi.into(), (lo / sq).into(), (hi / sq).into()]
    })
}

pub fn measure(
    ctx: &mut Context,
    word: &str,
    depth: usize,
    budget: Option<u128>,
    quadrature: Option<usize>,
) -> Result<(), Failure> {
    let w = BinaryWord::parse(word)?;
    let mut cfg = EstimateConfig::new(depth);
    if let Some(b) = budget {
        cfg = cfg.with_budget(b);
    }
    let e = cylinder_measure_estimate(&w, &cfg)?;
    let quad = match quadrature {
        Some(levels) => {
            let mut q = QuadratureConfig::recommended(levels.max(w.len()));
            if let Some(b) = budget {
                q.budget = b;
            }
            Some(riesz_quadrature(&w, &q)?)
        }
        None => None,
    };
    let natural = ctx.natural_log;
    // Natural log internally; base 2 unless asked otherwise.
    let unit = if natural { 1.0 } else { LN_2 };
    let mut t = Table::new(vec!["word", "depth", "value", "log_value", "lo", "hi", "anchor_spread", "inside", "quadrature"]);
    t.push(vec![
        Cell::Text(w.to_string()),
        Cell::Int(depth as u128),
        e.value().into(),
        (e.log_value / unit).into(),
        (e.bounds.lo / unit).into(),
        (e.bounds.hi / unit).into(),
        e.anchor_spread.into(),
        Cell::Int(e.inside_sandwich as u128),
        quad.into(),
    ]);
    let mut prov = Provenance::new("measure")
        .param("word", w.to_string())
        .param("depth", depth)
        .param("log_base", if natural { "e" } else { "2" });
    if let Some(b) = budget {
        prov = prov.param("budget", b);
    }
    if let Some(l) = quadrature {
        prov = prov.param("levels", l);
    }
    t.write(ctx, &prov, ctx.format_or(Format::Csv))
}

pub fn verify(ctx: &mut Context, suite: SuiteArg) -> Result<(), Failure> {
    let s = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Measure => Suite::Measure,
        SuiteArg::Spectrum => Suite::Spectrum,
        SuiteArg::Construct => Suite::Construct,
        SuiteArg::Analyze => Suite::Analyze,
    };
    let checks = verify::run_suite(s)?;
    let name = format!("{s:?}").to_lowercase();
    let prov = Provenance::new("verify").seed(Some(verify::SEED)).param("suite", &name);
    let report = VerifyReport::new(prov, checks);
    match ctx.format_or(Format::Json) {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(&report).expect("serializable");
            out.push('\n');
            ctx.write_str(&out)?;
        }
        Format::Csv => {
            let mut t = Table::new(vec!["check", "status", "residual", "window_lo", "window_hi", "detail"]);
            for c in &report.checks {
                let status = serde_json::to_value(c.status).expect("serializable");
                t.push(vec![
                    Cell::Text(c.check.clone()),
                    Cell::Text(status.as_str().unwrap_or_default().to_string()),
                    c.residual.into(),
                    c.window.map_or(Cell::Empty, |w| Cell::Int(w[0])),
                    c.window.map_or(Cell::Empty, |w| Cell::Int(w[1])),
                    Cell::Text(csv_quote(&c.detail)),
                ]);
            }
            t.write(ctx, &report.provenance, Format::Csv)?;
        }
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.check.as_str()).collect();
        Err(Failure::Check(failed.join(", ")))
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
