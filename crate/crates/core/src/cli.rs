//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
//! usage, parse or domain errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bellman::{eval_a, eval_bellman, eval_boundary, eval_boundary_prime, eval_decay, solve_s};
use crate::concavity::sweep;
use crate::error::{Error, Result};
use crate::geometry::{classify, AlphaContext, OmegaPoint, RegionId};
use crate::optimizers::{m_norm_report, report_table, DEFAULT_DEPTH};
use crate::output::{fmt_num, Cell, Table};
use crate::trees::{verify_tree, AlphaTree, MaximalKind};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "blo-bellman", version, about = "Bellman function for maximal operators on BMO")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Tree parameter α ∈ (0, ½].
    #[arg(long, global = true, conflicts_with = "n")]
    pub alpha: Option<f64>,
    /// Dyadic parameter: α = 2^{-n}.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Membership tolerance for Ω.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate B (and A when --L is given) at a point of Ω.
    Eval {
        #[arg(long, num_args = 2, value_names = ["X1", "X2"], allow_negative_numbers = true, required = true)]
        x: Vec<f64>,
        #[arg(long = "L", allow_negative_numbers = true)]
        l: Option<f64>,
    },
    /// Emit sample tables for plotting.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        /// Sample grid `lo:hi:step`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Number of region generations for `boundary-regions`.
        #[arg(long, default_value_t = 4)]
        kmax: u64,
    },
    /// Randomized α-concavity sweep.
    Concavity {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Verify the tree inequalities for a JSON tree.
    Tree { path: PathBuf },
    /// Statistics of the norm-optimizing sequence.
    Optimizer {
        #[arg(long, default_value_t = 12)]
        jmax: u32,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
    },
    /// Region of a point, or a region map over an x1 grid.
    Regions {
        #[arg(long, num_args = 2, value_names = ["X1", "X2"], allow_negative_numbers = true)]
        x: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Phi,
    B,
    BoundaryRegions,
}

/// Result of one command: the rendered output and whether checks passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn pass(text: String) -> Self {
        Self { text, passed: true }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if code == EXIT_PASS { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            if let Err(e) = emit(&cli.global, &o.text, out) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            if o.passed {
                EXIT_PASS
            } else {
                let _ = writeln!(err, "verification failed");
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Convergence(_) => EXIT_FAIL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn emit(g: &GlobalArgs, text: &str, out: &mut dyn Write) -> std::io::Result<()> {
    match &g.out {
        Some(p) => std::fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn context(g: &GlobalArgs) -> Result<AlphaContext> {
    let ctx = match (g.alpha, g.n) {
        (Some(a), None) => AlphaContext::new(a)?,
        (None, Some(n)) => AlphaContext::dyadic(n)?,
        _ => return Err(Error::Domain("exactly one of --alpha or --n is required".into())),
    };
    Ok(match g.tol {
        Some(t) if t >= 0.0 && t.is_finite() => ctx.with_tol(t),
        Some(t) => return Err(Error::Domain(format!("tolerance must be finite and >= 0, got {t}"))),
        None => ctx,
    })
}

fn render(t: &Table, f: Format) -> String {
    match f {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    }
}

/// Parses `lo:hi:step` into its sample points.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Parse(format!("grid must be lo:hi:step, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(Error::Domain(format!("grid needs finite lo <= hi and step > 0, got '{spec}'")));
    }
    let count = ((hi - lo) / step + 1e-9).floor();
    if count > 1e7 {
        return Err(Error::Resource(format!("grid '{spec}' has too many points")));
    }
    Ok((0..=count as usize).map(|i| lo + i as f64 * step).collect())
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Eval { x, l } => cmd_eval(g, OmegaPoint::new(x[0], x[1]), *l),
        Command::Table { kind, grid, kmax } => cmd_table(g, *kind, grid.as_deref(), *kmax),
        Command::Concavity { samples } => cmd_concavity(g, *samples),
        Command::Tree { path } => cmd_tree(g, path),
        Command::Optimizer { jmax, depth } => cmd_optimizer(g, *jmax, *depth),
        Command::Regions { x, grid } => cmd_regions(g, x.as_deref(), grid.as_deref()),
    }
}

fn cmd_eval(g: &GlobalArgs, x: OmegaPoint, l: Option<f64>) -> Result<Outcome> {
    let ctx = context(g)?;
    let x = ctx.admit(x)?;
    let b = eval_bellman(x, &ctx)?;
    let s = match b.region {
        RegionId::K(_) => Some(solve_s(x, &ctx)?.s),
        _ => None,
    };
    let a = l.map(|l| eval_a(x, l, &ctx)).transpose()?;
    let mut cols = vec!["x1", "x2", "region", "s", "B", "grad1", "grad2", "underflow"];
    let mut row: Vec<Cell> = vec![
        x.x1.into(),
        x.x2.into(),
        b.region.to_string().into(),
        s.map_or(Cell::Text(String::new()), Cell::Num),
        b.value.into(),
        b.grad1.into(),
        b.grad2.into(),
        (b.underflow as i64).into(),
    ];
    if let (Some(l), Some(a)) = (l, a) {
        cols.extend(["L", "A"]);
        row.extend([l.into(), a.into()]);
    }
    let mut t = Table::new(cols);
    t.push(row);
    Ok(Outcome::pass(render(&t, g.format)))
}

fn cmd_table(g: &GlobalArgs, kind: TableKind, grid: Option<&str>, kmax: u64) -> Result<Outcome> {
    let ctx = context(g)?;
    let t = match kind {
        TableKind::Phi => {
            let default = format!("0:{}:{}", 5.0 * ctx.tau, ctx.tau / 8.0);
            let mut ts = parse_grid(grid.unwrap_or(&default))?;
            if ts[0] < 0.0 {
                return Err(Error::Domain("decay table needs t >= 0".into()));
            }
            let (lo, hi) = (ts[0], *ts.last().unwrap());
            let mut k = (lo / ctx.tau).ceil() as u64;
            while k as f64 * ctx.tau <= hi {
                ts.push(k as f64 * ctx.tau);
                k += 1;
            }
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            let mut t = Table::new(["t", "phi"]);
            for x in ts {
                t.push(vec![x.into(), eval_decay(x, &ctx)?.into()]);
            }
            t
        }
        TableKind::B => {
            let default = format!("{}:2:{}", -5.0 * ctx.tau, ctx.tau / 8.0);
            let mut t = Table::new(["p", "b", "b_prime"]);
            for p in parse_grid(grid.unwrap_or(&default))? {
                t.push(vec![p.into(), eval_boundary(p, &ctx).into(), eval_boundary_prime(p, &ctx).into()]);
            }
            t
        }
        TableKind::BoundaryRegions => {
            let mut t = Table::new([
                "k",
                "odd_region",
                "even_region",
                "chord_left_x1",
                "chord_right_x1",
                "tangency_x1",
            ]);
            for k in 0..kmax {
                let kf = k as f64;
                t.push(vec![
                    (k as i64).into(),
                    RegionId::K(2 * k + 1).to_string().into(),
                    RegionId::K(2 * k + 2).to_string().into(),
                    ctx.p(kf + 1.0).into(),
                    ctx.p(kf).into(),
                    (-(kf + 1.0) * ctx.tau).into(),
                ]);
            }
            t
        }
    };
    Ok(Outcome::pass(render(&t, g.format)))
}

fn cmd_concavity(g: &GlobalArgs, samples: usize) -> Result<Outcome> {
    let ctx = context(g)?;
    let report = sweep(&ctx, samples, g.seed)?;
    let text = match g.format {
        Format::Csv => report.to_record(),
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
    };
    Ok(Outcome {
        text,
        passed: report.passed(),
    })
}

fn cmd_tree(g: &GlobalArgs, path: &PathBuf) -> Result<Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let tree = AlphaTree::from_json(&text)?;
    let ctx = match (g.alpha, g.n) {
        (None, None) => AlphaContext::new(tree.alpha)?,
        _ => context(g)?,
    };
    if ctx.alpha > tree.alpha {
        return Err(Error::Domain(format!(
            "alpha {} exceeds the tree's alpha {}",
            ctx.alpha, tree.alpha
        )));
    }
    let ctx = match g.tol {
        Some(t) => ctx.with_tol(t),
        None => ctx,
    };
    let n = verify_tree(&tree, &ctx, MaximalKind::Natural)?;
    let m = verify_tree(&tree, &ctx, MaximalKind::Classical)?;
    let passed = n.passed() && m.passed();
    let text = match g.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "alpha": ctx.alpha,
                "nodes": tree.len(),
                "natural": n,
                "classical": m,
                "passed": passed,
            }))
            .expect("serializable")
                + "\n"
        }
        Format::Csv => {
            let mut lines = vec![
                format!("alpha={}", fmt_num(ctx.alpha)),
                format!("nodes={}", tree.len()),
            ];
            for (name, v) in [("natural", &n), ("classical", &m)] {
                lines.push(format!("{name}.bmo={}", fmt_num(v.bmo)));
                lines.push(format!("{name}.blo={}", fmt_num(v.blo)));
                lines.push(format!("{name}.key_obs_max_error={}", fmt_num(v.key_obs_max_error)));
                lines.push(format!("{name}.induction_min_margin={}", fmt_num(v.induction_min_margin)));
                lines.push(format!("{name}.main_min_margin={}", fmt_num(v.main_min_margin)));
                lines.push(format!("{name}.corollary_margin={}", fmt_num(v.corollary_margin)));
            }
            lines.push(format!("passed={passed}"));
            lines.join("\n") + "\n"
        }
    };
    Ok(Outcome { text, passed })
}

fn cmd_optimizer(g: &GlobalArgs, jmax: u32, depth: u32) -> Result<Outcome> {
    if jmax < 1 {
        return Err(Error::Domain("jmax must be at least 1".into()));
    }
    let rows = m_norm_report(1..=jmax, depth)?;
    let passed = rows.iter().all(|r| r.targets_enclosed());
    Ok(Outcome {
        text: render(&report_table(&rows), g.format),
        passed,
    })
}

fn cmd_regions(g: &GlobalArgs, x: Option<&[f64]>, grid: Option<&str>) -> Result<Outcome> {
    let ctx = context(g)?;
    if let Some(x) = x {
        let x = ctx.admit(OmegaPoint::new(x[0], x[1]))?;
        let region = classify(x, &ctx)?;
        let mut t = Table::new(["x1", "x2", "region", "s", "z", "u", "v"]);
        let mut row: Vec<Cell> = vec![x.x1.into(), x.x2.into(), region.to_string().into()];
        if let RegionId::K(_) = region {
            let f = solve_s(x, &ctx)?;
            row.extend([f.s.into(), f.z.into(), f.u.into(), f.v.into()]);
        } else {
            row.extend((0..4).map(|_| Cell::Text(String::new())));
        }
        t.push(row);
        return Ok(Outcome::pass(render(&t, g.format)));
    }
    let default = format!("{}:1:{}", -4.0 * ctx.tau, ctx.tau / 4.0);
    let mut t = Table::new(["x1", "d", "x2", "region"]);
    for x1 in parse_grid(grid.unwrap_or(&default))? {
        for i in 0..=10 {
            let x = OmegaPoint::from_d(x1, i as f64 / 10.0);
            t.push(vec![x1.into(), x.d().into(), x.x2.into(), classify(x, &ctx)?.to_string().into()]);
        }
    }
    Ok(Outcome::pass(render(&t, g.format)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("blo-bellman").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn field(csv: &str, name: &str) -> String {
        let mut lines = csv.lines();
        let head: Vec<&str> = lines.next().unwrap().split(',').collect();
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        row[head.iter().position(|h| *h == name).unwrap()].to_string()
    }

    #[test]
    fn eval_examples() {
        let (code, out, _) = call(&["eval", "--n", "2", "--x", "0", "1"]);
        assert_eq!(code, 0);
        // the corner belongs to both Ω₊ and Ω₀; the smaller index wins
        assert_eq!(field(&out, "region"), "Plus");
        assert_eq!(field(&out, "B").parse::<f64>().unwrap(), 1.0);
        let (code, out, _) = call(&["eval", "--n", "2", "--x", "-1.5", "3.25"]);
        assert_eq!(code, 0);
        assert!((field(&out, "B").parse::<f64>().unwrap() - 0.25).abs() < 1e-12);
        let (code, _, err) = call(&["eval", "--alpha", "0.7", "--x", "0", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("alpha"), "{err}");
    }

    #[test]
    fn eval_outside_strip_names_inequality() {
        let (code, _, err) = call(&["eval", "--n", "1", "--x", "0", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("x2"), "{err}");
    }

    #[test]
    fn alpha_and_n_are_exclusive() {
        assert_eq!(call(&["eval", "--n", "1", "--alpha", "0.5", "--x", "0", "1"]).0, 2);
        assert_eq!(call(&["eval", "--x", "0", "1"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert_eq!(call(&["table", "phi", "--n", "1", "--grid", "0:1:-1"]).0, 2);
    }

    #[test]
    fn optimizer_depth_below_j() {
        assert_eq!(call(&["optimizer", "--jmax", "3", "--depth", "2"]).0, 2);
        let (code, out, _) = call(&["optimizer", "--jmax", "3", "--depth", "24"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn concavity_rejects_zero_samples() {
        assert_eq!(call(&["concavity", "--n", "2", "--samples", "0"]).0, 2);
    }
}
