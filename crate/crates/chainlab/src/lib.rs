//! Command-line front end for `chainlab-core`.
//!
//! [`run`] parses an argument vector, dispatches to the library and renders
//! a [`Report`] as text, LaTeX or JSON. Exit codes: 0 for any mathematical
//! verdict, 1 for usage and input errors, 2 when an internal cross-check
//! disagrees.

pub mod latex;
mod report;

use chainlab_core::chain::{build_chain, Ode, ParamFunction};
use chainlab_core::expr::{is_zero, parse, parse_equation, to_text, TextStyle};
use chainlab_core::linearize::is_linearizable;
use chainlab_core::symmetry::{is_symmetry, VectorField};
use chainlab_core::transform::{
    classify_alpha, maps_to, pullback_fiber, transformed_parameter, witness_element, GroupElement, MoebiusMap,
    PointTransformation, Representative,
};
use chainlab_core::{Error, Expr, JetSpace, Oracle, Rational};
use clap::{Parser, Subcommand, ValueEnum};

pub use report::{ClassReport, Report, WitnessReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "chainlab", version, about = "Riccati and Abel chain toolkit")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand (d/dx + F)^n y = 0.
    Build {
        #[arg(long)]
        param: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
    },
    /// Decide whether the chain member is linearizable by a point transformation.
    Linearize {
        #[arg(long)]
        param: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
    },
    /// Apply x = rho(z), y = R(z) w and print the transformed chain member.
    Transform {
        #[arg(long)]
        param: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
        /// k1,k2,k3,k4 of rho = (k1 + k2 z)/(k3 + k4 z).
        #[arg(long, allow_hyphen_values = true)]
        mobius: String,
        /// R(z).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "r0", required_unless_present = "r0")]
        scale: Option<String>,
        /// Constant of the subgroup scaling R = r0 rho_z^((n-1)/2).
        #[arg(long, allow_hyphen_values = true)]
        r0: Option<String>,
    },
    /// Find the orbit class of F = alpha(x) y and a group element reaching it.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
    },
    /// Check that xi d/dx + phi d/dy is a point symmetry of the chain member.
    VerifySymmetry {
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long)]
        param: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
    },
    /// Check that z = Z(x,y), w = W(x,y) sends the source equation to the target.
    MapsTo {
        #[arg(long)]
        source: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long)]
        target: String,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::VerificationFailed(_) | Error::ProbeSingular => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn oracle() -> Result<Oracle, Failure> {
    match std::env::var("CHAINLAB_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Oracle::with_seed)
            .map_err(|_| Failure::Usage(format!("CHAINLAB_SEED must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(Oracle::default()),
    }
}

fn rational_arg(text: &str) -> Result<Rational, Failure> {
    parse(text, &JetSpace::xy())?
        .as_rational()
        .cloned()
        .ok_or_else(|| Failure::Usage(format!("`{text}` is not a rational number")))
}

fn param(text: &str) -> Result<ParamFunction, Failure> {
    Ok(ParamFunction::xy(parse(text, &JetSpace::xy())?)?)
}

fn text_of(e: &Expr, space: &JetSpace) -> String {
    to_text(e, &TextStyle::plain(space))
}

fn equation_report(report: &mut Report, ode: &Ode) {
    report.equation = Some(ode.to_text());
    report.latex = Some(latex::equation(ode.lhs()));
}

fn ode_from_text(text: &str, space: &JetSpace) -> Result<Ode, Failure> {
    Ok(Ode::monic(parse_equation(text, space)?, space)?)
}

fn execute(command: Command) -> Result<Report, Failure> {
    let xs = JetSpace::xy();
    match command {
        Command::Build { param: p, order } => {
            let ode = build_chain(&param(&p)?, order)?;
            let mut r = Report::new("build", order);
            equation_report(&mut r, &ode);
            Ok(r)
        }
        Command::Linearize { param: p, order } => {
            let v = is_linearizable(&param(&p)?, order, &oracle()?)?;
            let mut r = Report::new("linearize", order);
            r.verdict = Some(format!("{:?}", v.status));
            r.residuals = Some(v.residuals.iter().map(|e| text_of(e, &xs)).collect());
            r.residuals_latex = v.residuals.iter().map(latex::expr).collect();
            Ok(r)
        }
        Command::Transform { param: p, order, mobius, scale, r0 } => {
            let ks: Vec<Rational> = mobius.split(',').map(|k| rational_arg(k.trim())).collect::<Result<_, _>>()?;
            let ks: [Rational; 4] = ks
                .try_into()
                .map_err(|_| Failure::Usage(format!("--mobius needs four values k1,k2,k3,k4, got `{mobius}`")))?;
            let m = MoebiusMap::from_rationals(ks)?;
            let g = match (scale, r0) {
                (Some(s), _) => GroupElement::new(m, parse(&s, &JetSpace::zw())?)?,
                (None, Some(c)) => GroupElement::subgroup(m, Expr::rational(rational_arg(&c)?), order)?,
                (None, None) => return Err(Failure::Usage("one of --scale or --r0 is required".into())),
            };
            let f = param(&p)?;
            let q = transformed_parameter(&f, &g, order)?;
            let direct = build_chain(&q, order)?;
            let pulled = pullback_fiber(&build_chain(&f, order)?, &g)?;
            if !is_zero(&(pulled.lhs() - direct.lhs()), &oracle()?)?.is_zero() {
                return Err(Failure::Verification("the pulled-back equation differs from the transformed chain".into()));
            }
            let mut r = Report::new("transform", order);
            equation_report(&mut r, &direct);
            Ok(r)
        }
        Command::Classify { alpha, order } => {
            let a = parse(&alpha, &xs)?;
            let mut r = Report::new("classify", order);
            match classify_alpha(&a, order)? {
                None => r.verdict = Some("Unclassified".into()),
                Some(label) => {
                    r.verdict = Some(format!("E{}", label.j));
                    let g = witness_element(&label, &Representative::default())?;
                    r.witness = Some(WitnessReport::new(&g));
                    r.class = Some(ClassReport::new(&label));
                }
            }
            Ok(r)
        }
        Command::VerifySymmetry { xi, phi, param: p, order } => {
            let v = VectorField::new(parse(&xi, &xs)?, parse(&phi, &xs)?)?;
            let ode = build_chain(&param(&p)?, order)?;
            let verdict = is_symmetry(&v, &ode, &oracle()?)?;
            let mut r = Report::new("verify-symmetry", order);
            r.verdict = Some(if verdict.is_zero() { "Symmetry" } else { "NotSymmetry" }.into());
            equation_report(&mut r, &ode);
            Ok(r)
        }
        Command::MapsTo { source, z, w, target } => {
            let a = ode_from_text(&source, &xs)?;
            let b = ode_from_text(&target, &JetSpace::zw())?;
            let t = PointTransformation::forward(parse(&z, &xs)?, parse(&w, &xs)?)?;
            let verdict = maps_to(&a, &t, &b, &oracle()?)?;
            let mut r = Report::new("maps-to", a.order());
            r.verdict = Some(if verdict.is_zero() { "Maps" } else { "DoesNotMap" }.into());
            Ok(r)
        }
    }
}

/// Run one command; returns the exit code and everything to print.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    match execute(cli.command) {
        Ok(report) => (0, report.render(cli.format)),
        Err(Failure::Usage(m)) => (1, format!("error: {m}\n")),
        Err(Failure::Verification(m)) => (2, format!("verification failed: {m}\n")),
    }
}
