use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spacelike::deform::CONSTANT_K_TOL;
use spacelike::grid::GridSpec;
use spacelike::rotational::{ShootOptions, Start};
use spacelike_cli::fields::{field_table, scan, Format, Quantity};
use spacelike_cli::rotsurf::{run_rotsurf, sidecar_path};
use spacelike_cli::suite::{run_suite, ModeArg, SuiteConfig};
use spacelike_cli::{load_spec, CliError};

#[derive(Parser)]
#[command(name = "h2r1", version, about = "Geometry and identity checks for spacelike surfaces in H2 x R1")]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, env = "THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct ModeFlags {
    /// Deformation constant in g~ = g + c dh^2 (default 1).
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Assert constant curvature K and use c = 1/(K + 1).
    #[arg(long = "constant-k", allow_negative_numbers = true)]
    constant_k: Option<f64>,
}

impl ModeFlags {
    fn mode(self) -> ModeArg {
        match (self.c, self.constant_k) {
            (_, Some(k)) => ModeArg::ConstantK(k),
            (Some(c), None) => ModeArg::FreeC(c),
            (None, None) => ModeArg::FreeC(1.0),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite and print a JSON report.
    Verify {
        /// Surface description file.
        spec: PathBuf,
        /// Sample grid, `NUxNV` or `N`.
        #[arg(long, default_value = "20x20")]
        grid: GridSpec,
        #[command(flatten)]
        mode: ModeFlags,
        /// Per-identity tolerance override, e.g. `--tol eq7=1e-10`.
        #[arg(long = "tol", value_name = "ID=VALUE", value_parser = parse_tolerance)]
        tolerances: Vec<(String, f64)>,
        /// Allowed |K - K_asserted| in constant-curvature mode.
        #[arg(long = "k-tol", default_value_t = CONSTANT_K_TOL)]
        k_tol: f64,
    },
    /// Write the per-point field table.
    Report {
        /// Surface description file.
        spec: PathBuf,
        /// Sample grid, `NUxNV` or `N`.
        #[arg(long, default_value = "20x20")]
        grid: GridSpec,
        #[command(flatten)]
        mode: ModeFlags,
        #[arg(long = "k-tol", default_value_t = CONSTANT_K_TOL)]
        k_tol: f64,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Shoot a rotational profile of constant curvature.
    Rotsurf {
        #[arg(long = "K", visible_alias = "k", allow_negative_numbers = true)]
        k: f64,
        /// Start on the rotation axis (requires K < -1).
        #[arg(long, conflicts_with = "annulus", required_unless_present = "annulus")]
        axis: bool,
        /// Start at r0 with h(r0) = h0 and h'(r0) = v0.
        #[arg(long, num_args = 3, value_names = ["R0", "H0", "V0"], allow_negative_numbers = true)]
        annulus: Option<Vec<f64>>,
        #[arg(long = "r-max", default_value_t = ShootOptions::default().r_max)]
        r_max: f64,
        #[arg(long = "r-min", default_value_t = ShootOptions::default().r_min)]
        r_min: f64,
        #[arg(long = "max-step", default_value_t = ShootOptions::default().max_step)]
        max_step: f64,
        #[arg(long, default_value_t = ShootOptions::default().atol)]
        atol: f64,
        /// CSV output; diagnostics go to `<out>.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extreme values of a deformation quantity over the grid.
    Scan {
        /// Surface description file.
        spec: PathBuf,
        #[arg(long)]
        quantity: Quantity,
        /// Sample grid, `NUxNV` or `N`.
        #[arg(long, default_value = "20x20")]
        grid: GridSpec,
        #[command(flatten)]
        mode: ModeFlags,
        #[arg(long = "k-tol", default_value_t = CONSTANT_K_TOL)]
        k_tol: f64,
    },
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (id, v) = s.split_once('=').ok_or_else(|| format!("expected ID=VALUE, found '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("invalid tolerance '{v}'"))?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(format!("tolerance must be finite and non-negative, found {v}"));
    }
    Ok((id.trim().to_string(), v))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    std::io::stdout().write_all(s.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Verify { spec, grid, mode, tolerances, k_tol } => {
            let spec = load_spec(&spec)?;
            let mut cfg = SuiteConfig::new(grid, mode.mode());
            cfg.tolerances = tolerances.into_iter().collect::<BTreeMap<_, _>>();
            cfg.constant_k_tol = k_tol;
            let report = run_suite(&spec, &cfg)?;
            print_json(&report)?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Report { spec, grid, mode, k_tol, out, format } => {
            let spec = load_spec(&spec)?;
            let table = field_table(&spec, &grid, mode.mode(), k_tol)?;
            let text = table.render(format);
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?,
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?,
            }
            Ok(0)
        }
        Command::Rotsurf { k, axis, annulus, r_max, r_min, max_step, atol, out } => {
            let start = match (axis, annulus) {
                (true, _) => Start::axis_for(k)?,
                (false, Some(v)) => Start::Annulus { r0: v[0], h0: v[1], v0: v[2] },
                (false, None) => return Err(CliError::Usage("one of --axis or --annulus is required".into())),
            };
            let opts = ShootOptions { r_max, r_min, max_step, atol, ..ShootOptions::default() };
            let diag = run_rotsurf(start, k, &opts, &out)?;
            eprintln!(
                "wrote {} ({} samples) and {}",
                out.display(),
                diag.samples,
                sidecar_path(&out).display()
            );
            Ok(0)
        }
        Command::Scan { spec, quantity, grid, mode, k_tol } => {
            let spec = load_spec(&spec)?;
            let summary = scan(&spec, quantity, &grid, mode.mode(), k_tol)?;
            print_json(&summary)?;
            Ok(if summary.bounds.iter().all(|b| b.holds) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides_parse() {
        assert_eq!(parse_tolerance("eq7=1e-10").unwrap(), ("eq7".to_string(), 1e-10));
        assert_eq!(parse_tolerance(" lemma3 = 0 ").unwrap(), ("lemma3".to_string(), 0.0));
        assert!(parse_tolerance("eq7").is_err());
        assert!(parse_tolerance("eq7=-1").is_err());
        assert!(parse_tolerance("eq7=nan").is_err());
    }

    #[test]
    fn mode_defaults_to_unit_c() {
        assert_eq!(ModeFlags { c: None, constant_k: None }.mode(), ModeArg::FreeC(1.0));
        assert_eq!(ModeFlags { c: None, constant_k: Some(-0.5) }.mode(), ModeArg::ConstantK(-0.5));
    }

    #[test]
    fn command_line_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
