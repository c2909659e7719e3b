//! Command-line front end. The binary only parses arguments and maps errors to exit codes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::{ConfigRule, Error, Result};
use crate::harness::{run_identity_suite, run_nonstationary_study, run_scaling_study, SuiteSpec};
use crate::model::{derive_geometry, Multi, Vec3};
use crate::oracle::{first_order_coeff, Region};
use crate::packet::{make_packet, packet_eval, packet_evolve, track_report};

#[derive(Debug, Parser)]
#[command(name = "mott", version, about = "Track formation from a spherical wave: packets, coefficients and scaling studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; overrides `output.path`. Standard output when neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides `quadrature.target_tol`.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegionArg {
    Cone,
    Sphere,
    Complement,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Cone => Region::Cone,
            RegionArg::Sphere => Region::Sphere,
            RegionArg::Complement => Region::Complement,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the configuration and print the derived geometry.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Table of outgoing tracks, heaviest first.
    Tracks {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate one outgoing packet at a lab point.
    Packet {
        #[command(flatten)]
        common: Common,
        /// Lab point `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// One-based oscillator index.
        #[arg(long, default_value_t = 1)]
        j: usize,
        /// Excitation `n1,n2,n3`.
        #[arg(long, default_value = "0,0,0")]
        n: String,
        /// Free evolution time applied to the packet.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
    },
    /// Evaluate one first-order coefficient by direct quadrature.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Rescaled point `x = R / eps` as `x1,x2,x3`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value = "0,0,0")]
        n: String,
        /// Time; `study.t` or `t_final` when absent.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value = "cone")]
        region: RegionArg,
    },
    /// Run the exact-identity suite.
    Identities {
        #[command(flatten)]
        common: Common,
    },
    /// Residual scaling study over `eps_list`.
    Scaling {
        #[command(flatten)]
        common: Common,
    },
    /// Off-cone suppression study over `eps_list`.
    Nonstat {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Tracks { common }
            | Command::Packet { common, .. }
            | Command::Oracle { common, .. }
            | Command::Identities { common }
            | Command::Scaling { common }
            | Command::Nonstat { common } => common,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.into())
    }
}

/// Result table plus `key=value` summary lines.
#[derive(Debug, Clone, Default)]
pub struct Report {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    summary: Vec<Vec<(&'static str, f64)>>,
}

/// Digits after the point in scientific notation: 17 significant in files, 15 on the console.
fn fmt_num(v: f64, file: bool) -> String {
    // Adding zero turns -0 into +0.
    let v = v + 0.0;
    if file { format!("{v:.16e}") } else { format!("{v:.14e}") }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), ..Default::default() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn csv(&self, file: bool) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Num(v) => fmt_num(*v, file),
                    Cell::Text(s) => csv_field(s),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn summary_lines(&self, file: bool) -> String {
        let mut out = String::new();
        for line in &self.summary {
            let parts: Vec<String> = line.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v, file))).collect();
            let _ = writeln!(out, "{}", parts.join(" "));
        }
        out
    }

    pub fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, c) in self.columns.iter().zip(row) {
                    let v = match c {
                        Cell::Int(v) => json!(v),
                        Cell::Num(v) => json!(v),
                        Cell::Text(s) => json!(s),
                    };
                    m.insert((*k).to_string(), v);
                }
                Value::Object(m)
            })
            .collect();
        let mut summary = Map::new();
        for (k, v) in self.summary.iter().flatten() {
            summary.insert((*k).to_string(), json!(v));
        }
        let doc = json!({ "rows": rows, "summary": summary });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

/// What a command produced and whether it counts as success.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    /// Set when every number is valid but a check failed.
    pub failure: Option<String>,
}

fn parse_triple<T: std::str::FromStr>(s: &str, what: &str) -> Result<[T; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::config(ConfigRule::Field, format!("{what} must be three comma-separated numbers, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<T>().map_err(|_| bad())?);
    }
    out.try_into().map_err(|_| bad())
}

fn oscillator_index(j: usize, count: usize) -> Result<usize> {
    if j == 0 || j > count {
        return Err(Error::config(ConfigRule::Field, format!("oscillator {j} is not in 1..={count}")));
    }
    Ok(j - 1)
}

fn n_cells(n: &Multi) -> Vec<Cell> {
    n.iter().map(|&v| Cell::from(v)).collect()
}

fn cmd_validate(rc: &RunConfig) -> Result<Outcome> {
    let cfg = rc.model()?;
    let geom = derive_geometry(&cfg)?;
    let mut r = Report::new(&["j", "a_x", "a_y", "a_z", "tau", "dir_x", "dir_y", "dir_z"]);
    for (j, o) in cfg.oscillators.iter().enumerate() {
        let d = geom.directions[j];
        let a = o.position;
        r.push(vec![
            (j + 1).into(),
            a.x.into(),
            a.y.into(),
            a.z.into(),
            geom.tau[j].into(),
            d.x.into(),
            d.y.into(),
            d.z.into(),
        ]);
    }
    r.summary.push(vec![
        ("epsilon", cfg.epsilon),
        ("theta0", geom.theta0),
        ("delta", geom.delta),
    ]);
    r.summary.push(vec![
        ("t_osc", geom.t_osc),
        ("t_transit", geom.t_transit),
        ("ratio", geom.ratio),
    ]);
    Ok(Outcome { report: r, failure: None })
}

fn cmd_tracks(rc: &RunConfig) -> Result<Outcome> {
    let cfg = rc.model()?;
    let mut r = Report::new(&[
        "j", "n1", "n2", "n3", "abs_n", "dir_x", "dir_y", "dir_z", "momentum", "z_shift", "weight",
    ]);
    for t in track_report(&cfg)? {
        let mut row = vec![(t.j + 1).into()];
        row.extend(n_cells(&t.n));
        row.push((t.n.iter().sum::<usize>()).into());
        row.extend([t.dir.x.into(), t.dir.y.into(), t.dir.z.into()]);
        row.extend([t.momentum.into(), t.z_shift.into(), t.weight.into()]);
        r.push(row);
    }
    Ok(Outcome { report: r, failure: None })
}

fn complex_cells(z: C64) -> [Cell; 2] {
    [z.re.into(), z.im.into()]
}

fn cmd_packet(rc: &RunConfig, r_arg: &str, j: usize, n_arg: &str, t: Option<f64>) -> Result<Outcome> {
    let cfg = rc.model()?;
    let j0 = oscillator_index(j, cfg.oscillators.len())?;
    let n: Multi = parse_triple(n_arg, "--n")?;
    let pos = Vec3::from(parse_triple::<f64>(r_arg, "--r")?);
    let desc = make_packet(&cfg, j0, n)?;
    let value = match t {
        Some(t) => packet_evolve(&desc, t, &pos)?,
        None => packet_eval(&desc, &pos),
    };
    let mut r = Report::new(&["j", "n1", "n2", "n3", "r_x", "r_y", "r_z", "t", "re", "im"]);
    let mut row = vec![j.into()];
    row.extend(n_cells(&n));
    row.extend([pos.x.into(), pos.y.into(), pos.z.into(), t.unwrap_or(0.0).into()]);
    row.extend(complex_cells(value));
    r.push(row);
    Ok(Outcome { report: r, failure: None })
}

fn cmd_oracle(rc: &RunConfig, x_arg: &str, j: usize, n_arg: &str, t: Option<f64>, region: Region) -> Result<Outcome> {
    let cfg = rc.model()?;
    let j0 = oscillator_index(j, cfg.oscillators.len())?;
    let n: Multi = parse_triple(n_arg, "--n")?;
    let x = Vec3::from(parse_triple::<f64>(x_arg, "--x")?);
    let t = t.unwrap_or(rc.study_spec()?.t);
    let c = first_order_coeff(&cfg, j0, &n, t, &x, region)?;
    if !c.converged {
        log::warn!("coefficient did not meet target_tol: est_error {:.3e}", c.est_error);
    }
    let lead = packet_eval(&make_packet(&cfg, j0, n)?, &(x * cfg.epsilon)) * cfg.epsilon.powi(2);
    let mut r = Report::new(&[
        "j", "n1", "n2", "n3", "region", "t", "x1", "x2", "x3", "re", "im", "est_error", "status", "lead_re",
        "lead_im",
    ]);
    let mut row = vec![j.into()];
    row.extend(n_cells(&n));
    row.extend([region.name().into(), t.into(), x.x.into(), x.y.into(), x.z.into()]);
    row.extend(complex_cells(c.value));
    row.extend([c.est_error.into(), if c.converged { "ok" } else { "WARN" }.into()]);
    row.extend(complex_cells(lead));
    r.push(row);
    Ok(Outcome { report: r, failure: None })
}

fn cmd_identities(rc: &RunConfig) -> Result<Outcome> {
    let cfg = rc.model()?;
    let suite = run_identity_suite(&cfg, &SuiteSpec::default())?;
    let mut r = Report::new(&["check", "measured", "expected", "tolerance", "pass"]);
    for row in &suite.rows {
        r.push(vec![
            row.name.as_str().into(),
            row.measured.into(),
            row.expected.into(),
            row.tolerance.into(),
            row.pass.into(),
        ]);
    }
    let failed: Vec<&str> = suite.rows.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let failure = (!failed.is_empty()).then(|| format!("identity checks failed: {}", failed.join(", ")));
    Ok(Outcome { report: r, failure })
}

fn status(converged: bool) -> Cell {
    if converged { "ok" } else { "WARN" }.into()
}

fn cmd_scaling(rc: &RunConfig) -> Result<Outcome> {
    let cfg = rc.model()?;
    let study = run_scaling_study(&cfg, &rc.study_spec()?, &rc.eps_list())?;
    let mut r = Report::new(&["eps", "residual", "reference", "relative", "coverage", "quad_error", "status"]);
    for p in &study.points {
        if !p.converged {
            log::warn!("eps {}: quadrature error {:.3e} above target_tol", p.eps, p.quad_error);
        }
        r.push(vec![
            p.eps.into(),
            p.residual.into(),
            p.reference.into(),
            (p.residual / p.reference).into(),
            p.coverage.into(),
            p.quad_error.into(),
            status(p.converged),
        ]);
    }
    r.summary.push(vec![("slope_rel", study.fit_rel.slope), ("slope_ref", study.fit_ref.slope), ("r2_ref", study.fit_ref.r2)]);
    r.summary.push(vec![("slope_abs", study.fit_abs.slope), ("r2", study.fit_abs.r2)]);
    Ok(Outcome { report: r, failure: None })
}

fn cmd_nonstat(rc: &RunConfig) -> Result<Outcome> {
    let cfg = rc.model()?;
    let study = run_nonstationary_study(&cfg, &rc.study_spec()?, &rc.eps_list())?;
    let mut r = Report::new(&["eps", "complement", "cone", "ratio", "quad_error", "status"]);
    for p in &study.points {
        if !p.converged {
            log::warn!("eps {}: quadrature error {:.3e} above target_tol", p.eps, p.quad_error);
        }
        r.push(vec![
            p.eps.into(),
            p.complement.into(),
            p.cone.into(),
            p.ratio().into(),
            p.quad_error.into(),
            status(p.converged),
        ]);
    }
    r.summary.push(vec![("slope_ratio", study.fit.slope), ("r2", study.fit.r2)]);
    Ok(Outcome { report: r, failure: None })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Runs a parsed command line. Results go to the output file or to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn std::io::Write) -> Result<()> {
    let common = cli.command.common();
    let mut rc = RunConfig::load(&common.config)?;
    if let Some(tol) = common.tol {
        rc.quadrature.target_tol = tol;
        rc.quadrature.validate()?;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Error::config(ConfigRule::Field, "--threads must be positive"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::numerical(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| match &cli.command {
        Command::Validate { .. } => cmd_validate(&rc),
        Command::Tracks { .. } => cmd_tracks(&rc),
        Command::Packet { r, j, n, t, .. } => cmd_packet(&rc, r, *j, n, *t),
        Command::Oracle { x, j, n, t, region, .. } => cmd_oracle(&rc, x, *j, n, *t, (*region).into()),
        Command::Identities { .. } => cmd_identities(&rc),
        Command::Scaling { .. } => cmd_scaling(&rc),
        Command::Nonstat { .. } => cmd_nonstat(&rc),
    })?;

    let out_path = common.out.clone().or_else(|| rc.output.path.as_ref().map(PathBuf::from));
    let io_err = |source| Error::Io { path: "<stdout>".into(), source };
    let report = &outcome.report;
    match (out_path, rc.output.format) {
        (Some(p), Format::Csv) => {
            write_file(&p, &report.csv(true))?;
            stdout.write_all(report.summary_lines(false).as_bytes()).map_err(io_err)?;
        }
        (Some(p), Format::Json) => write_file(&p, &report.json())?,
        (None, Format::Csv) => {
            let text = report.csv(false) + &report.summary_lines(false);
            stdout.write_all(text.as_bytes()).map_err(io_err)?;
        }
        (None, Format::Json) => stdout.write_all(report.json().as_bytes()).map_err(io_err)?,
    }
    match outcome.failure {
        Some(msg) => Err(Error::numerical(msg)),
        None => Ok(()),
    }
}
