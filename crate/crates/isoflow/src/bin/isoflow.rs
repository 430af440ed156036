//! Thin batch CLI over the library: `isoflow <command> [--config file.json]
//! [overrides...]`. Exit codes: 0 success, 1 verification failure, 2 error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use isoflow::driver::{self, Command, Cx, Format, Mode, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "isoflow",
    about = "Isoperiodic deformations on the elliptic family v^2 = u(u-1)(u-x)",
    disable_help_subcommand = true
)]
struct Cli {
    /// periods | verify | flow | boussinesq | rauch-check
    command: Option<String>,

    /// JSON run configuration; inline flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,

    /// Modulus x as "re" or "re,im"
    #[arg(long)]
    x: Option<String>,

    /// End of the x-path (flow only)
    #[arg(long = "x-end")]
    x_end: Option<String>,

    /// Pole position y0 as "re" or "re,im"
    #[arg(long)]
    y0: Option<String>,

    /// Sheet sign of v(Q0): 1 or -1
    #[arg(long, allow_hyphen_values = true)]
    sheet: Option<i8>,

    /// Pole-order parameter (pole order is n+2)
    #[arg(long)]
    n: Option<usize>,

    #[arg(long = "A-re")]
    a_re: Option<f64>,

    #[arg(long = "A-im")]
    a_im: Option<f64>,

    /// first_order | second_order | both
    #[arg(long)]
    mode: Option<String>,

    /// Relative tolerance for quadrature and the ODE solver
    #[arg(long)]
    tol: Option<f64>,

    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv | json
    #[arg(long)]
    format: Option<String>,
}

fn parse_complex(text: &str) -> Result<Cx, String> {
    let mut parts = text.splitn(2, ',');
    let re: f64 = parts
        .next()
        .unwrap_or_default()
        .trim()
        .parse()
        .map_err(|e| format!("bad real part in {text:?}: {e}"))?;
    let im: f64 = match parts.next() {
        Some(s) => s
            .trim()
            .parse()
            .map_err(|e| format!("bad imaginary part in {text:?}: {e}"))?,
        None => 0.0,
    };
    Ok(Cx { re, im })
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RunConfig::from_json(&text).map_err(|e| format!("bad config: {e}"))?
        }
        None => {
            let x = cli
                .x
                .as_deref()
                .ok_or("either --config or --x is required")?;
            let text = r#"{ "command": "periods", "curve": { "x": { "re": 0.0 } } }"#;
            let mut c = RunConfig::from_json(text).map_err(|e| e.to_string())?;
            c.curve.x = parse_complex(x)?;
            c
        }
    };

    if let Some(cmd) = &cli.command {
        config.command = match cmd.as_str() {
            "periods" => Command::Periods,
            "verify" => Command::Verify,
            "flow" => Command::Flow,
            "boussinesq" => Command::Boussinesq,
            "rauch-check" => Command::RauchCheck,
            other => return Err(format!("unknown command {other:?}")),
        };
    }
    if let Some(x) = &cli.x {
        config.curve.x = parse_complex(x)?;
    }
    if let Some(x_end) = &cli.x_end {
        config.curve.x_end = Some(parse_complex(x_end)?);
    }
    if let Some(y0) = &cli.y0 {
        config.pole.y0 = parse_complex(y0)?;
    }
    if let Some(sheet) = cli.sheet {
        config.pole.sheet = sheet;
    }
    if let Some(n) = cli.n {
        config.flow.n = n;
    }
    if let Some(re) = cli.a_re {
        config.flow.a.re = re;
    }
    if let Some(im) = cli.a_im {
        config.flow.a.im = im;
    }
    if let Some(mode) = &cli.mode {
        config.flow.mode = match mode.as_str() {
            "first_order" => Mode::FirstOrder,
            "second_order" => Mode::SecondOrder,
            "both" => Mode::Both,
            other => return Err(format!("unknown mode {other:?}")),
        };
    }
    if let Some(tol) = cli.tol {
        config.tolerances.rel = tol;
        config.tolerances.abs = tol * 1e-2;
    }
    if let Some(out) = &cli.out {
        config.output.path = Some(out.display().to_string());
    }
    if let Some(format) = &cli.format {
        config.output.format = match format.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(format!("unknown format {other:?}")),
        };
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("isoflow: {message}");
            return ExitCode::from(2);
        }
    };
    match driver::run(&config) {
        Ok(output) => {
            match &config.output.path {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &output.body) {
                        eprintln!("isoflow: cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                    println!("{}", output.summary);
                }
                None => {
                    print!("{}", output.body);
                    eprintln!("{}", output.summary);
                }
            }
            if output.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("isoflow: {e}");
            ExitCode::from(2)
        }
    }
}
