//! Experiment driver: convergence scans, estimator-deviation scans, and the
//! adaptive laser-beam run, with CSV/JSON output.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use nlsplit_cli::{
    dyadic_steps, emit, eps_scan, global_error_scan, order_scan, run_laser, wkb_scan, OutputFormat,
    RunConfig, ScanContext, ScanRecord,
};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "nlsplit", about = "Split-step Schrödinger experiment harness")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Scheme name(s): lie, strang, ruth3, yoshida4, auz5 (repeatable).
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    /// Semiclassical parameter ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Gridpoints per axis.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Smallest step of the dyadic t-grid.
    #[arg(long)]
    t_min: Option<f64>,
    /// Largest step of the dyadic t-grid.
    #[arg(long)]
    t_max: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Local error and estimator deviation per step size at fixed ε.
    OrderScan(CommonFlags),
    /// The same quantities along the coupled diagonal t = ε.
    EpsScan(CommonFlags),
    /// Order scan with the oscillatory WKB initial state.
    WkbScan(CommonFlags),
    /// Global error at a fixed horizon per step size.
    GlobalScan {
        #[command(flatten)]
        common: CommonFlags,
        /// Integration horizon.
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Adaptive 2D beam propagation; writes step trace, slices, snapshots.
    LaserBeam {
        /// Local absolute tolerance for the controller.
        #[arg(long)]
        tol: Option<f64>,
        /// Propagation length.
        #[arg(long)]
        t_end: Option<f64>,
        /// Gridpoints per axis.
        #[arg(long)]
        grid_n: Option<usize>,
        /// Scheme driving the adaptive run.
        #[arg(long)]
        scheme: Option<String>,
        /// Output directory for traces and snapshots.
        #[arg(long, default_value = "laser-out")]
        out: PathBuf,
        /// Initial state: tanh-gaussian or plain-gaussian.
        #[arg(long)]
        state: Option<String>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => Ok(RunConfig::from_file(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn apply_common(cfg: &mut RunConfig, flags: &CommonFlags) {
    if !flags.schemes.is_empty() {
        cfg.schemes = flags.schemes.clone();
    }
    if let Some(e) = flags.eps {
        cfg.eps = e;
    }
    if let Some(n) = flags.grid_n {
        cfg.grid_n = n;
    }
    if let Some(t) = flags.t_min {
        cfg.t_min = t;
    }
    if let Some(t) = flags.t_max {
        cfg.t_max = t;
    }
}

fn scan_context(cfg: &RunConfig) -> Result<ScanContext> {
    let grid = nlsplit_core::make_grid(1, -cfg.half_width, cfg.half_width, cfg.grid_n)?;
    let mut ctx = ScanContext::new(grid, cfg.theta, cfg.potential()?);
    ctx.ref_substeps = cfg.ref_substeps;
    Ok(ctx)
}

fn write_records(records: &[ScanRecord], flags: &CommonFlags) -> Result<()> {
    let format: OutputFormat = flags.format.parse()?;
    match &flags.out {
        Some(path) => {
            emit(records, path, format)?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => print!("{}", nlsplit_cli::emit::render(records, format)),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = load_config(&cli.config)?;
    match cli.command {
        Command::OrderScan(flags) => {
            apply_common(&mut cfg, &flags);
            let ctx = scan_context(&cfg)?;
            let ts = dyadic_steps(cfg.t_max, cfg.t_min);
            let records = order_scan(&ctx, &cfg.schemes, cfg.eps, &ts, &cfg.state)?;
            write_records(&records, &flags)
        }
        Command::EpsScan(flags) => {
            apply_common(&mut cfg, &flags);
            let ctx = scan_context(&cfg)?;
            let eps_list = dyadic_steps(cfg.t_max, cfg.t_min);
            let records = eps_scan(&ctx, &cfg.schemes, &eps_list, &cfg.state)?;
            write_records(&records, &flags)
        }
        Command::WkbScan(flags) => {
            apply_common(&mut cfg, &flags);
            let ctx = scan_context(&cfg)?;
            let ts = dyadic_steps(cfg.t_max, cfg.t_min);
            let records = wkb_scan(&ctx, &cfg.schemes, cfg.eps, &ts)?;
            write_records(&records, &flags)
        }
        Command::GlobalScan { common, t_end } => {
            apply_common(&mut cfg, &common);
            if let Some(t) = t_end {
                cfg.t_end = t;
            }
            let ctx = scan_context(&cfg)?;
            let hs = dyadic_steps(cfg.t_max, cfg.t_min);
            let mut records = Vec::new();
            for scheme in &cfg.schemes {
                records.extend(global_error_scan(
                    &ctx, scheme, cfg.eps, &hs, cfg.t_end, &cfg.state,
                )?);
            }
            write_records(&records, &common)
        }
        Command::LaserBeam {
            tol,
            t_end,
            grid_n,
            scheme,
            out,
            state,
        } => {
            let mut lcfg = cfg.laser.clone();
            if let Some(t) = tol {
                lcfg.tol = t;
            }
            if let Some(t) = t_end {
                lcfg.z_end = t;
            }
            if let Some(n) = grid_n {
                lcfg.grid_n = n;
            }
            if let Some(s) = scheme {
                lcfg.scheme = s;
            }
            match state.as_deref() {
                Some("plain-gaussian") => {
                    lcfg.state = nlsplit_cli::InitialState::PlainGaussian {
                        amplitude: 1.0,
                        radius: 0.5,
                    }
                }
                Some("tanh-gaussian") | None => {}
                Some(other) => {
                    anyhow::bail!("unknown laser state `{other}` (tanh-gaussian or plain-gaussian)")
                }
            }
            run_laser_command(&lcfg, &out)
        }
    }
}

fn run_laser_command(lcfg: &nlsplit_cli::LaserConfig, out: &PathBuf) -> Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let result = run_laser(lcfg)?;

    // accepted-step trace
    std::fs::write(
        out.join("steps.csv"),
        nlsplit_cli::emit::trace_csv(&result.trajectory),
    )?;

    // |ψ| and Re ψ along the x-z slice at y = 0
    for (name, f) in [
        (
            "slice_abs.csv",
            &(|v: num_complex::Complex64| v.norm()) as &dyn Fn(_) -> f64,
        ),
        ("slice_re.csv", &|v: num_complex::Complex64| v.re),
    ] {
        let mut text = String::from("z");
        for x in &result.xs {
            let _ = write!(text, ",{x}");
        }
        text.push('\n');
        for slice in &result.slices {
            let _ = write!(text, "{}", slice.z);
            for v in &slice.values {
                let _ = write!(text, ",{}", f(*v));
            }
            text.push('\n');
        }
        std::fs::write(out.join(name), text)?;
    }

    // full-field snapshots
    nlsplit_cli::write_snapshot(&result.initial, 0.0, &out.join("initial.bin"))?;
    nlsplit_cli::write_snapshot(
        &result.trajectory.final_state,
        *result.trajectory.times.last().unwrap(),
        &out.join("final.bin"),
    )?;

    eprintln!(
        "laser run: {} accepted steps ({} rejected), h in [{:.3e}, {:.3e}], max est {:.3e}; \
         traces and snapshots in {}",
        result.trajectory.accepted_steps(),
        result.trajectory.rejected_steps(),
        result.trajectory.min_accepted_h().unwrap_or(f64::NAN),
        result.trajectory.max_accepted_h().unwrap_or(f64::NAN),
        result.trajectory.max_est_norm(),
        out.display()
    );
    Ok(())
}
