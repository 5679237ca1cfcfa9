//! `berg`: Bergman kernels, finite ball quotients and Hartogs domains from the
//! command line. Every subcommand writes JSON or CSV to stdout.

mod commands;
mod input;
mod verify_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use berg_core::hartogs::{OmegaPoint, DEFAULT_SERIES_TERMS};
use berg_core::verify::Domain;
use berg_core::C64;
use clap::{Parser, Subcommand};

use commands::{print_json, BasisKind, FitArgs, GroupCheck, KernelKind};
use input::{parse_complex, parse_exponents, parse_point_arg, Exponents, Point};

#[derive(Parser)]
#[command(name = "berg", version, about = "Bergman kernels of balls, ball quotients and Hartogs domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ball kernel `n!/πⁿ (1 − ⟨z, w⟩)^{−(n+1)}` as {re, im}.
    BallKernel {
        #[arg(long)]
        dim: usize,
        /// Comma-separated complex coordinates, e.g. `0.1+0.2i,0.3`.
        #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
        z: Point,
        #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
        w: Point,
    },
    /// Levi-form eigenvalues of a polynomial hypersurface at a point.
    Levi {
        /// Polynomial record `{dim, terms: [[a, b, re, im], …]}`.
        #[arg(long)]
        rho: PathBuf,
        #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
        point: Point,
    },
    /// Group closure, order and optional predicates.
    Group {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, value_enum)]
        check: Option<GroupCheck>,
    },
    /// Minimal homogeneous invariant generators and their syzygies.
    BasicMap {
        #[arg(long)]
        group: PathBuf,
        /// Degree bound for relations among generators.
        #[arg(long)]
        syzygies: Option<u32>,
    },
    /// Deck sum `Σ_γ K(γz, w) det γ` as CSV.
    QuotientSum {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        dim: usize,
        /// JSON list of `[z, w]` pairs.
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Base kernel pulled back through a cover, as CSV.
    QuotientPush {
        /// Group file object with an extra `map` list of polynomial records.
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Kernel of `Ω` at `(z, λ)` and `(w, τ)`; the second point defaults to
    /// the first.
    OmegaKernel {
        #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
        z: Point,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: C64,
        #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
        w: Option<Point>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: Option<C64>,
        /// Partial sum with this many terms instead of the closed form.
        #[arg(long, num_args = 0..=1, default_missing_value = "300", conflicts_with = "closed")]
        series: Option<usize>,
        #[arg(long)]
        closed: bool,
    },
    /// `‖λ^m z^α‖²` on `Ω`, exact and by quadrature.
    Moments {
        #[arg(long)]
        m: u32,
        #[arg(long, value_parser = parse_exponents)]
        alpha: Exponents,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        numeric: bool,
    },
    /// CSV of diagonal kernel values of `Ω` on a grid in `(|z_1|, |λ|)`.
    OmegaGrid {
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 2.0)]
        z_max: f64,
        /// Largest `|λ|² h(z)` on the grid.
        #[arg(long, default_value_t = 0.9)]
        max_level: f64,
    },
    /// Fit `Σ a_j(z, z̄) K^j = 0` to sampled diagonal kernel values.
    Fit {
        #[arg(long, value_enum)]
        kernel: KernelKind,
        /// Degree bound in `(z, z̄)` for each `a_j`.
        #[arg(long)]
        dz: u32,
        /// Degree in `K`.
        #[arg(long)]
        dk: usize,
        #[arg(long, value_enum)]
        basis: Option<BasisKind>,
        /// Per-variable exponent bound for the radial basis.
        #[arg(long)]
        per_var: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        boundary_check: bool,
        /// Samples `[[z, K], …]` for `--kernel file`.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Inner radius for `--kernel annulus`.
        #[arg(long, default_value_t = 0.5)]
        r0: f64,
    },
    /// Verification checks as JSON lines; exit 0 if all pass, 1 otherwise.
    Verify {
        #[arg(value_enum)]
        check: verify_cmd::Check,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo sample count.
        #[arg(long = "N", short = 'N', default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// `disk`, `ball-N`, `omega`, `annulus` or `annulus:R`.
        #[arg(long)]
        domain: Option<String>,
        /// Monomial exponents for `repro` and `orthogonality`.
        #[arg(long, value_parser = parse_exponents)]
        f: Option<Exponents>,
        #[arg(long, value_parser = parse_exponents)]
        g: Option<Exponents>,
        #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
        z0: Option<Point>,
        /// Cover degree for `isometry` and `transform`.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 5)]
        d_max: u32,
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        /// Record wall time in each report.
        #[arg(long)]
        timing: bool,
    },
}

fn omega_point(z: &[C64], lambda: C64) -> Result<OmegaPoint> {
    anyhow::ensure!(z.len() == 2, "--z needs two coordinates");
    Ok(OmegaPoint::new(z[0], z[1], lambda))
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::BallKernel { dim, z, w } => print_json(&commands::ball_kernel(dim, &z.0, &w.0)?),
        Command::Levi { rho, point } => print_json(&commands::levi(&rho, &point.0)?),
        Command::Group { gens, check } => print_json(&commands::group(&gens, check)?),
        Command::BasicMap { group, syzygies } => print_json(&commands::basic_map(&group, syzygies)?),
        Command::QuotientSum { group, dim, pairs } => commands::quotient_sum(&group, dim, &pairs)?,
        Command::QuotientPush { cover, pairs } => commands::quotient_push(&cover, &pairs)?,
        Command::OmegaKernel { z, lambda, w, tau, series, closed: _ } => {
            let p = omega_point(&z.0, lambda)?;
            let q = omega_point(w.as_ref().map_or(&z.0, |w| &w.0), tau.unwrap_or(lambda))?;
            let series = series.map(|m| if m == 0 { DEFAULT_SERIES_TERMS } else { m });
            print_json(&commands::omega_kernel(p, q, series)?)
        }
        Command::Moments { m, alpha, exact, numeric } => print_json(&commands::moments(m, &alpha.0, exact, numeric)?),
        Command::OmegaGrid { steps, z_max, max_level } => commands::omega_grid(steps, z_max, max_level)?,
        Command::Fit { kernel, dz, dk, basis, per_var, samples, seed, boundary_check, file, r0 } => {
            let args = FitArgs { kernel, dz, dk, basis, per_var, samples, seed, boundary_check, file: file.as_deref(), r0 };
            print_json(&commands::fit(&args)?)
        }
        Command::Verify { check, seed, samples, tol, domain, f, g, z0, k, d_max, pairs, timing } => {
            let domain = domain.map(|d| d.parse::<Domain>()).transpose()?;
            let (f, g, z0) = (f.map(|e| e.0), g.map(|e| e.0), z0.map(|p| p.0));
            let args = verify_cmd::VerifyArgs { check, seed, samples, tol, domain, f, g, z0, k, d_max, pairs, timing };
            let reports = verify_cmd::run(&args)?;
            for r in &reports {
                println!("{}", r.to_json_line());
            }
            commands::flush();
            return Ok(if reports.iter().all(|r| r.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    commands::flush();
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
