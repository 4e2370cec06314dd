use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use oscsim_core::scenario::{
    compare, emit_plot, load_config, read_columns, run, sweep, ModelKind, PlotStyle, ScenarioConfig, Series, FIELDS_HEADER,
    TRANSIENT_HEADER,
};

#[derive(Parser)]
#[command(name = "oscsim", version, about = "Drift-diffusion transients of bulk-heterojunction solar cells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Light-on transient of the configured model.
    Run(RunArgs),
    /// Stationary solution under illumination.
    Steady(RunArgs),
    /// Full and reduced transients side by side.
    Compare(RunArgs),
    /// Cartesian parameter sweep.
    Sweep(RunArgs),
    /// Render CSV outputs to SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Runs never draw random numbers; the flag records that in the metadata.
    #[arg(long)]
    seed_free: bool,
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Snapshot times in seconds, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    order_cap: Option<u8>,
    #[arg(long)]
    rtol: Option<f64>,
    /// One value (densities, m^-3) or four: phi,n,p,X.
    #[arg(long, value_delimiter = ',')]
    atol: Option<Vec<f64>>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
    /// Plot carrier densities instead of |E| for field files.
    #[arg(long)]
    density: bool,
    #[arg(long, default_value = "plot.svg")]
    output: String,
}

fn load(args: &RunArgs) -> Result<ScenarioConfig> {
    let mut cfg = load_config(&args.config).with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(s) = &args.snapshots {
        cfg.output.snapshots = s.clone();
    }
    if let Some(k) = args.order_cap {
        cfg.bdf.order_cap = k as usize;
    }
    if let Some(r) = args.rtol {
        cfg.bdf.rtol = r;
    }
    match args.atol.as_deref() {
        None => {}
        Some([d]) => {
            cfg.bdf.atol[1] = *d;
            cfg.bdf.atol[2] = *d;
        }
        Some([a, b, c, d]) => cfg.bdf.atol = [*a, *b, *c, *d],
        Some(v) => bail!("--atol takes 1 or 4 values, got {}", v.len()),
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_meta(dir: &Path, cfg: &ScenarioConfig, command: &str, common: &Common) -> Result<()> {
    let text = format!(
        "command = \"{command}\"\nconfig_hash = \"{:016x}\"\nseed_free = {}\nversion = \"{}\"\n",
        cfg.hash(),
        common.seed_free,
        env!("CARGO_PKG_VERSION")
    );
    std::fs::write(dir.join("meta.toml"), text)?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let cfg = load(&a)?;
            let dir = &a.common.out_dir;
            let s = run(&cfg, dir)?;
            write_meta(dir, &cfg, "run", &a.common)?;
            println!("J_final = {:e} A/m^2 after {} steps", s.j_final, s.steps);
            if let Some(r) = s.rise {
                println!("J_inf = {:e} A/m^2, t10 = {:e} s, t50 = {:e} s, t90 = {:e} s", r.j_inf, r.t10, r.t50, r.t90);
            }
            for f in s.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Steady(a) => {
            let mut cfg = load(&a)?;
            cfg.model = ModelKind::Steady;
            let dir = &a.common.out_dir;
            let s = run(&cfg, dir)?;
            write_meta(dir, &cfg, "steady", &a.common)?;
            println!("J = {:e} A/m^2", s.j_final);
            for f in s.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Compare(a) => {
            let cfg = load(&a)?;
            let dir = &a.common.out_dir;
            let (full, reduced, files) = compare(&cfg, dir)?;
            write_meta(dir, &cfg, "compare", &a.common)?;
            println!(
                "J_final full = {:e}, reduced = {:e} A/m^2",
                full.j.last().unwrap_or(&f64::NAN),
                reduced.j.last().unwrap_or(&f64::NAN)
            );
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Sweep(a) => {
            let cfg = load(&a)?;
            let dir = &a.common.out_dir;
            let rows = sweep(&cfg, dir)?;
            write_meta(dir, &cfg, "sweep", &a.common)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} runs, {} failed; wrote {}", rows.len(), failed, dir.join("sweep.csv").display());
        }
        Command::Plot(a) => plot(&a)?,
    }
    Ok(())
}

fn label(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn plot(a: &PlotArgs) -> Result<()> {
    let mut series = Vec::new();
    let mut style = None;
    for path in &a.csv {
        let (header, cols) = read_columns(path).with_context(|| format!("reading {}", path.display()))?;
                let s = if header == TRANSIENT_HEADER[..] {
            series.push(Series { label: label(path), x: cols[0].clone(), y: cols[1].clone() });
            PlotStyle::photocurrent()
        } else if header == FIELDS_HEADER[..] && a.density {
            series.push(Series { label: format!("n {}", label(path)), x: cols[0].clone(), y: cols[2].clone() });
            series.push(Series { label: format!("p {}", label(path)), x: cols[0].clone(), y: cols[3].clone() });
            PlotStyle::density()
        } else if header == FIELDS_HEADER[..] {
            let e = cols[5].iter().map(|v| v.abs()).collect();
            series.push(Series { label: label(path), x: cols[0].clone(), y: e });
            PlotStyle::field()
        } else {
            bail!("{}: unrecognised header `{}`", path.display(), header.join(","));
        };
        match &style {
            None => style = Some(s),
            Some(prev) if *prev != s => bail!("cannot overlay transient and profile files in one plot"),
            _ => {}
        }
    }
    std::fs::create_dir_all(&a.common.out_dir)?;
    let out = a.common.out_dir.join(&a.output);
    std::fs::write(&out, emit_plot(&series, &style.expect("at least one csv"))?)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
