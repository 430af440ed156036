//! Batch orchestration: JSON run configuration, the five run commands and
//! deterministic CSV/JSON emission (fixed 17-significant-digit formatting,
//! no timestamps).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::boussinesq::{
    boussinesq_residual, compute_wave_data, effectivization_diagnostic, solve_c, u_hat, GridSpec,
    ThetaParams,
};
use crate::curve::{rauch_check, Curve, SheetedPoint};
use crate::flow::{integrate_flow, FlowConfig, FlowMode};
use crate::numerics::{IvpSpec, QuadratureSpec};
use crate::{bell, Error, Result};

/// Complex number in configs and JSON output.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

impl From<Cx> for Complex64 {
    fn from(c: Cx) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Periods,
    Verify,
    Flow,
    Boussinesq,
    RauchCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FirstOrder,
    SecondOrder,
    Both,
}

impl From<Mode> for FlowMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FirstOrder => FlowMode::FirstOrder,
            Mode::SecondOrder => FlowMode::SecondOrder,
            Mode::Both => FlowMode::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSection {
    pub x: Cx,
    #[serde(default)]
    pub x_end: Option<Cx>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoleSection {
    pub y0: Cx,
    #[serde(default = "default_sheet")]
    pub sheet: i8,
}

fn default_sheet() -> i8 {
    1
}

impl Default for PoleSection {
    fn default() -> Self {
        PoleSection {
            y0: Cx { re: 2.0, im: 0.0 },
            sheet: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowSection {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Cx,
    pub mode: Mode,
    pub samples: usize,
}

impl Default for FlowSection {
    fn default() -> Self {
        FlowSection {
            n: 0,
            a: Cx::default(),
            mode: Mode::FirstOrder,
            samples: 21,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BoussinesqSection {
    pub z0: Cx,
    pub grid: usize,
}

impl Default for BoussinesqSection {
    fn default() -> Self {
        BoussinesqSection {
            z0: Cx { re: 0.3, im: 0.0 },
            grid: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceSection {
    pub rel: f64,
    pub abs: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSection {
    pub format: Format,
    pub path: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            format: Format::Csv,
            path: None,
        }
    }
}

/// Top-level run configuration (JSON).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub curve: CurveSection,
    #[serde(default)]
    pub pole: PoleSection,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub boussinesq: BoussinesqSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn quad(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.tolerances.rel,
            abs_tol: self.tolerances.abs,
            ..QuadratureSpec::default()
        }
    }

    fn ivp(&self) -> IvpSpec {
        IvpSpec {
            rel_tol: self.tolerances.rel,
            abs_tol: self.tolerances.abs,
            ..IvpSpec::default()
        }
    }
}

/// Result of one run: the body to emit, a summary document and the overall
/// verdict (drives the exit code).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub body: String,
    pub summary: serde_json::Value,
    pub pass: bool,
}

/// Fixed-width scientific notation, 17 significant digits.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn cx_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_body(header: &[&str], rows: &[Vec<f64>], summary: &serde_json::Value) -> String {
    let rows_json: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (name, v) in header.iter().zip(row) {
                obj.insert((*name).to_string(), json!(v));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "rows": rows_json, "summary": summary }))
        .expect("serializable")
        + "\n"
}

fn emit(config: &RunConfig, header: &[&str], rows: &[Vec<f64>], summary: serde_json::Value, pass: bool) -> RunOutput {
    let body = match config.output.format {
        Format::Csv => csv(header, rows),
        Format::Json => json_body(header, rows, &summary),
    };
    RunOutput {
        body,
        summary,
        pass,
    }
}

/// Executes one configured run.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    match config.command {
        Command::Periods => run_periods(config),
        Command::Verify => run_verify(config),
        Command::Flow => run_flow(config),
        Command::Boussinesq => run_boussinesq(config),
        Command::RauchCheck => run_rauch(config),
    }
}

fn curve_and_pole(config: &RunConfig) -> Result<(Curve, SheetedPoint)> {
    let x = config.curve.x.into();
    let point = crate::curve::CurveFamilyPoint::new(x)?;
    let basis = crate::curve::CycleBasis::for_region(point.region)?;
    let curve = Curve::with_basis(point, &basis, &config.quad())?;
    let q0 = SheetedPoint::new(config.pole.y0.into(), config.pole.sheet)?;
    Ok((curve, q0))
}

fn run_periods(config: &RunConfig) -> Result<RunOutput> {
    let (curve, q0) = curve_and_pole(config)?;
    let ev = curve.eval_omega(&q0)?;
    let p = curve.periods;
    let header = [
        "x_re", "x_im", "i0_re", "i0_im", "tau_re", "tau_im", "ix_re", "ix_im", "b_flipped",
        "omega_p0_re", "omega_p0_im", "omega_p1_re", "omega_p1_im", "omega_px_re", "omega_px_im",
        "omega_q0_re", "omega_q0_im",
    ];
    let rows = vec![vec![
        curve.x().re,
        curve.x().im,
        p.i0.re,
        p.i0.im,
        p.tau.re,
        p.tau.im,
        p.ix.re,
        p.ix.im,
        if p.b_flipped { 1.0 } else { 0.0 },
        ev.omega_p0.re,
        ev.omega_p0.im,
        ev.omega_p1.re,
        ev.omega_p1.im,
        ev.omega_px.re,
        ev.omega_px.im,
        ev.omega_q0.re,
        ev.omega_q0.im,
    ]];
    let summary = json!({
        "x": cx_json(curve.x()),
        "i0": cx_json(p.i0),
        "tau": cx_json(p.tau),
        "ix": cx_json(p.ix),
        "b_flipped": p.b_flipped,
    });
    Ok(emit(config, &header, &rows, summary, true))
}

fn run_verify(config: &RunConfig) -> Result<RunOutput> {
    let (curve, q0) = curve_and_pole(config)?;
    let mut checks: Vec<(&str, f64, f64)> = Vec::new(); // name, residual, tolerance

    let p0 = curve.omega_p0();
    let p1 = curve.omega_p1();
    let px = curve.omega_px();
    let scale = p0.norm_sqr() + p1.norm_sqr() + px.norm_sqr();
    checks.push((
        "omega_square_identity",
        (p0 * p0 + p1 * p1 + px * px).norm() / scale,
        1e-12,
    ));

    let (iz, i1) = curve.compute_i01()?;
    let i0sq = curve.periods.i0 * curve.periods.i0;
    let x = curve.x();
    let r0 = iz / p0;
    let r1 = i1 / p1;
    let rx = curve.periods.ix / px;
    let rscale = rx.norm().max(1.0);
    checks.push(("relation_i0x", (r0 - rx + x * i0sq / 4.0).norm() / rscale, 1e-10));
    checks.push((
        "relation_i1x",
        (r1 - rx + (x - 1.0) * i0sq / 4.0).norm() / rscale,
        1e-10,
    ));
    checks.push(("relation_i01", (r0 - r1 + i0sq / 4.0).norm() / rscale, 1e-10));

    // Bell recursion vs explicit partition sum at the configured pole
    let table = bell::BellTable::at(x, q0.y0, 8)?;
    let mut worst = 0.0f64;
    for l in 0..=8usize {
        let e = bell::bell_explicit(l, &table.sigma)?;
        worst = worst.max((e - table.l(l)).norm() / table.l(l).norm().max(1.0));
    }
    checks.push(("bell_recursion_vs_partition", worst, 1e-12));

    let wq = curve.omega_q0(&q0)?;
    let wq_flip = curve.omega_q0(&q0.flipped())?;
    checks.push((
        "omega_q0_sheet_antisymmetry",
        (wq + wq_flip).norm() / wq.norm(),
        1e-14,
    ));

    let pass = checks.iter().all(|(_, r, tol)| r <= tol);
    let header = ["check", "residual", "tolerance", "pass"];
    let mut body = String::new();
    body.push_str(&header.join(","));
    body.push('\n');
    for (name, r, tol) in &checks {
        body.push_str(&format!(
            "{name},{},{},{}\n",
            fmt(*r),
            fmt(*tol),
            u8::from(r <= tol)
        ));
    }
    let summary = json!({
        "x": cx_json(x),
        "pass": pass,
        "checks": checks.iter().map(|(name, r, tol)| json!({
            "name": name, "residual": r, "tolerance": tol, "pass": r <= tol
        })).collect::<Vec<_>>(),
    });
    let body = match config.output.format {
        Format::Csv => body,
        Format::Json => serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
    };
    Ok(RunOutput {
        body,
        summary,
        pass,
    })
}

fn run_flow(config: &RunConfig) -> Result<RunOutput> {
    let x_end = config.curve.x_end.ok_or_else(|| Error::Config {
        field: "curve.x_end".into(),
        message: "flow needs an x-path end point".into(),
    })?;
    let q0 = SheetedPoint::new(config.pole.y0.into(), config.pole.sheet)?;
    let mut fc = FlowConfig::new(
        config.flow.n,
        config.flow.a.into(),
        config.curve.x.into(),
        x_end.into(),
        q0,
    );
    fc.mode = config.flow.mode.into();
    fc.samples = config.flow.samples;
    fc.quad = config.quad();
    fc.ivp = config.ivp();
    let result = integrate_flow(&fc)?;

    let header = [
        "x_re", "x_im", "y0_re", "y0_im", "y0p_re", "y0p_im", "b_re", "b_im", "abs_b_drift",
    ];
    let rows: Vec<Vec<f64>> = result
        .samples
        .iter()
        .map(|s| {
            vec![
                s.x.re,
                s.x.im,
                s.y0.re,
                s.y0.im,
                s.y0p.re,
                s.y0p.im,
                s.b.re,
                s.b.im,
                (s.b - result.b0).norm(),
            ]
        })
        .collect();
    let summary = json!({
        "b0": cx_json(result.b0),
        "max_b_drift": result.max_b_drift,
        "relative_b_drift": result.max_b_drift / result.b0.norm(),
        "mode_gap": result.mode_gap,
        "steps_accepted": result.steps_accepted,
        "steps_rejected": result.steps_rejected,
    });
    Ok(emit(config, &header, &rows, summary, true))
}

fn run_boussinesq(config: &RunConfig) -> Result<RunOutput> {
    let (curve, q0) = curve_and_pole(config)?;
    let mut wave = compute_wave_data(&curve, &q0, config.boussinesq.z0.into())?;
    let params = ThetaParams::for_tau(wave.tau)?;
    let n = config.boussinesq.grid.max(8);
    let grid = GridSpec::one_period(&wave, n, n)?;
    let (c, spread) = solve_c(&wave, &params, &grid)?;
    wave.c = Some(c);
    let max_residual = boussinesq_residual(&wave, &params, &grid)?;
    let (rho_plus, rho_minus) = effectivization_diagnostic(&wave, &params)?;

    let header = ["x", "y", "u_hat_re", "u_hat_im"];
    let mut rows = Vec::new();
    for (gx, gy) in grid.points() {
        let v = u_hat(gx, gy, &wave, &params, 0, 0)?;
        rows.push(vec![gx, gy, v.re, v.im]);
    }
    let summary = json!({
        "u": cx_json(wave.u),
        "v": cx_json(wave.v),
        "z0": cx_json(wave.z0),
        "c": cx_json(c),
        "c_spread": spread,
        "max_residual": max_residual,
        "rho_plus": cx_json(rho_plus),
        "rho_minus": cx_json(rho_minus),
    });
    let pass = max_residual < 1e-8;
    Ok(emit(config, &header, &rows, summary, pass))
}

fn run_rauch(config: &RunConfig) -> Result<RunOutput> {
    let q0 = SheetedPoint::new(config.pole.y0.into(), config.pole.sheet)?;
    let report = rauch_check(config.curve.x.into(), &q0, 1e-4)?;
    let pass = report
        .iter()
        .all(|r| r.relative_residual < 1e-6 && (r.half_step_ratio - 4.0).abs() < 1.0);
    let header = ["formula", "relative_residual", "half_step_ratio", "pass"];
    let mut body = String::new();
    body.push_str(&header.join(","));
    body.push('\n');
    for r in &report {
        body.push_str(&format!(
            "{},{},{},{}\n",
            r.name,
            fmt(r.relative_residual),
            fmt(r.half_step_ratio),
            u8::from(r.relative_residual < 1e-6 && (r.half_step_ratio - 4.0).abs() < 1.0)
        ));
    }
    let summary = json!({
        "pass": pass,
        "residuals": report.iter().map(|r| json!({
            "formula": r.name,
            "relative_residual": r.relative_residual,
            "half_step_ratio": r.half_step_ratio,
        })).collect::<Vec<_>>(),
    });
    let body = match config.output.format {
        Format::Csv => body,
        Format::Json => serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
    };
    Ok(RunOutput {
        body,
        summary,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let text = r#"{
            "command": "flow",
            "curve": { "x": { "re": 0.4 }, "x_end": { "re": 0.6 } },
            "pole": { "y0": { "re": 2.0 }, "sheet": 1 },
            "flow": { "n": 0, "A": { "re": 0.0 }, "mode": "first_order", "samples": 5 }
        }"#;
        let config = RunConfig::from_json(text).unwrap();
        assert_eq!(config.command, Command::Flow);
        assert_eq!(config.flow.samples, 5);
        assert_eq!(config.pole.sheet, 1);
        let back = serde_json::to_string(&config).unwrap();
        let again = RunConfig::from_json(&back).unwrap();
        assert_eq!(again.flow.samples, 5);
    }

    #[test]
    fn periods_emits_deterministic_csv() {
        let config = RunConfig {
            command: Command::Periods,
            curve: CurveSection {
                x: Cx { re: 0.5, im: 0.0 },
                x_end: None,
            },
            pole: PoleSection::default(),
            flow: FlowSection::default(),
            boussinesq: BoussinesqSection::default(),
            tolerances: ToleranceSection::default(),
            output: OutputSection::default(),
        };
        let a = run(&config).unwrap();
        let b = run(&config).unwrap();
        assert_eq!(a.body, b.body);
        assert!(a.pass);
        assert!(a.body.starts_with("x_re,x_im,i0_re"));
    }

    #[test]
    fn verify_passes_at_half() {
        let config = RunConfig {
            command: Command::Verify,
            curve: CurveSection {
                x: Cx { re: 0.5, im: 0.0 },
                x_end: None,
            },
            pole: PoleSection::default(),
            flow: FlowSection::default(),
            boussinesq: BoussinesqSection::default(),
            tolerances: ToleranceSection::default(),
            output: OutputSection::default(),
        };
        let out = run(&config).unwrap();
        assert!(out.pass, "{}", out.body);
    }
}
