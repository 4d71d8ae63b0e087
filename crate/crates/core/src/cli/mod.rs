//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 inconsistent bound inputs.

pub mod profile;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::json;

use crate::bounds::{
    alpha_upper_bound_shifted, s_lower_bound, s_transfer_upper_bound, BoundError, BoundInput, BoundResult,
    Outcome,
};
use crate::casestudies::{
    poisson_indices, poisson_region, ppoisson_case_split, stokes_admissible_inv_p, stokes_bound,
    stokes_data_chain_check, CaseError, PPoissonCase, PPoissonOutcome, PoissonCase, StokesCase, StokesComponent,
    StokesOutcome,
};
use crate::exactnum::{ExtRat, Rational};
use crate::rules::{embed_check, interpolate, EmbedVerdict};
use crate::spaces::{adaptivity_point, DomainContext, SpaceDescriptor};
use svg::{Diagram, DiagramSpec, Style};

/// A finite rational read from a string such as `"3/2"` or `"-4"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRational(pub Rational);

impl<'de> Deserialize<'de> for FiniteRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ExtRat::deserialize(deserializer)? {
            ExtRat::Finite(q) => Ok(FiniteRational(q)),
            other => Err(serde::de::Error::custom(format!("expected a finite rational, got {other}"))),
        }
    }
}

impl Serialize for FiniteRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExtRat::from(&self.0).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError(pub String);

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        InputError(msg.into())
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(InputError),
    Inconsistent(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Inconsistent(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "error: {e}"),
            CliError::Inconsistent(msg) => write!(f, "inconsistent input: {msg}"),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e)
    }
}

impl From<CaseError> for CliError {
    fn from(e: CaseError) -> Self {
        match e {
            CaseError::Bound(b) => bound_error(b),
            other => CliError::Input(InputError::new(other.to_string())),
        }
    }
}

pub(crate) fn bound_error(e: BoundError) -> CliError {
    match e {
        BoundError::InconsistentInput(msg) => CliError::Inconsistent(msg),
        other => CliError::Input(InputError::new(other.to_string())),
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    match s.parse::<ExtRat>().map_err(|e| e.to_string())? {
        ExtRat::Finite(q) => Ok(q),
        other => Err(format!("expected a finite rational, got {other}")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "regcalc", version, about = "Exact regularity calculus in the DeVore-Triebel diagram")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputFlags {
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Append six-digit decimal approximations to text output.
    #[arg(long)]
    pub decimal: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide an embedding between two spaces, e.g. "B^{2}_{2,2}" "B^{1}_{4,4}".
    Embed {
        source: String,
        target: String,
        #[arg(long)]
        d: u32,
        #[arg(long, value_parser = parse_rational)]
        eps: Option<Rational>,
        #[arg(long)]
        json: bool,
    },
    /// Complex interpolation [A0, A1]_theta.
    Interpolate {
        a0: String,
        a1: String,
        #[arg(long, value_parser = parse_rational)]
        theta: Rational,
        #[arg(long)]
        json: bool,
    },
    /// Answer the queries of a profile document; writes a JSON report.
    Profile {
        path: PathBuf,
        /// Accepted for symmetry; the report is always JSON.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Single bound evaluations.
    Bound {
        #[command(subcommand)]
        which: BoundCommand,
    },
    /// Worked examples.
    Case {
        #[command(subcommand)]
        which: CaseCommand,
    },
    /// Render a diagram description to SVG.
    Diagram {
        path: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundCommand {
    /// Upper bound for the adaptivity index.
    Alpha {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: ExtRat,
        #[arg(long)]
        sbar: ExtRat,
        #[arg(long)]
        pz: ExtRat,
        #[arg(long)]
        z: ExtRat,
        /// Shifted adaptivity scale `B^{r+alpha}`.
        #[arg(long, value_parser = parse_rational)]
        r: Option<Rational>,
        #[command(flatten)]
        out: OutputFlags,
    },
    /// Lower bound for the Sobolev index from an adaptivity index.
    SLower {
        #[arg(long)]
        d: u32,
        #[arg(long, value_parser = parse_rational)]
        alpha: Rational,
        #[arg(long)]
        p: ExtRat,
        #[arg(long)]
        pz: ExtRat,
        #[arg(long, value_parser = parse_rational)]
        z: Rational,
        #[command(flatten)]
        out: OutputFlags,
    },
    /// Transfer an upper bound for the Sobolev index to larger p.
    STransfer {
        #[arg(long, value_parser = parse_rational)]
        sbar: Rational,
        #[arg(long)]
        p: ExtRat,
        #[arg(long, value_parser = parse_rational)]
        z: Rational,
        #[arg(long)]
        pz: ExtRat,
        #[arg(long)]
        phat: ExtRat,
        #[command(flatten)]
        out: OutputFlags,
    },
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum CaseCommand {
    /// Poisson problem on C^1 domains.
    Poisson {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: ExtRat,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        out: OutputFlags,
    },
    /// p-Poisson problem, 1 < p < 2.
    Ppoisson {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: ExtRat,
        #[arg(long, value_parser = parse_rational)]
        sbar: Option<Rational>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        out: OutputFlags,
    },
    /// Stationary Stokes system on Lipschitz domains.
    Stokes {
        #[arg(long)]
        d: u32,
        #[arg(long, value_parser = parse_rational)]
        eps: Rational,
        #[arg(long, value_parser = parse_rational)]
        sigma: Rational,
        #[arg(long, value_parser = parse_rational)]
        sbar2: Option<Rational>,
        #[arg(long, default_value = "velocity")]
        component: String,
        /// Check the data embedding chains at this p (needs --chain-s).
        #[arg(long, requires = "chain_s")]
        chain_p: Option<ExtRat>,
        #[arg(long, value_parser = parse_rational, requires = "chain_p")]
        chain_s: Option<Rational>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        out: OutputFlags,
    },
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(InputError::new(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(stdout, "{text}").map_err(|e| CliError::Input(InputError::new(e.to_string())))
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn inv(p: &ExtRat, name: &str) -> Result<Rational, CliError> {
    match p {
        ExtRat::PosInf => Ok(Rational::zero()),
        ExtRat::Finite(q) if q > &Rational::zero() => Ok(q.recip()),
        _ => Err(InputError::new(format!("{name} must be positive or inf")).into()),
    }
}

fn with_decimal(exact: &ExtRat, decimal: bool) -> String {
    if decimal && exact.is_finite() {
        format!("{exact} (≈ {})", exact.to_decimal_string())
    } else {
        exact.to_string()
    }
}

fn parse_space(s: &str) -> Result<SpaceDescriptor, CliError> {
    s.parse::<SpaceDescriptor>()
        .map_err(|e| InputError::new(e.to_string()).into())
}

fn context(d: u32, eps: &Option<Rational>) -> Result<DomainContext, CliError> {
    match eps {
        Some(e) => DomainContext::with_epsilon(d, e.clone()),
        None => DomainContext::new(d),
    }
    .map_err(|e| InputError::new(e.to_string()).into())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Embed {
            source,
            target,
            d,
            eps,
            json,
        } => {
            let ctx = context(*d, eps)?;
            let (a, b) = (parse_space(source)?, parse_space(target)?);
            let verdict = embed_check(&a, &b, &ctx);
            if *json {
                emit(stdout, &pretty(&verdict))
            } else {
                emit(stdout, &verdict_text(&verdict))
            }
        }
        Command::Interpolate { a0, a1, theta, json } => {
            let (a, b) = (parse_space(a0)?, parse_space(a1)?);
            let c = interpolate(&a, &b, theta).map_err(|e| InputError::new(e.to_string()))?;
            if *json {
                let pt = c.diagram_point();
                emit(
                    stdout,
                    &pretty(&json!({"space": c, "point": [ExtRat::from(pt.x), ExtRat::from(pt.y)]})),
                )
            } else {
                emit(stdout, &c.to_string())
            }
        }
        Command::Profile { path, out, svg, .. } => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let doc = profile::ProfileDocument::parse(&text)?;
            let result = profile::evaluate(&doc)?;
            let report = pretty(&result.report);
            if let Some(svg) = svg {
                write_file(svg, &svg::render(&result.diagram))?;
            }
            match out {
                Some(path) => write_file(path, &format!("{report}\n")),
                None => emit(stdout, &report),
            }
        }
        Command::Bound { which } => run_bound(which, stdout),
        Command::Case { which } => run_case(which, stdout),
        Command::Diagram { path, svg } => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let spec: DiagramSpec =
                serde_json::from_str(&text).map_err(|e| InputError::new(format!("invalid diagram: {e}")))?;
            let rendered = svg::render(&Diagram::from_spec(&spec)?);
            match svg {
                Some(path) => write_file(path, &rendered),
                None => write!(stdout, "{rendered}").map_err(|e| InputError::new(e.to_string()).into()),
            }
        }
    }
}

pub fn verdict_text(v: &EmbedVerdict) -> String {
    match v {
        EmbedVerdict::Embeds { rule, chain } => {
            let mut lines = vec![format!("Embeds [rule {}]", rule.name())];
            for step in chain {
                lines.push(format!("  {} -> {}  [rule {}]", step.from, step.to, step.rule.name()));
            }
            lines.join("\n")
        }
        EmbedVerdict::NotEmbeds { rule } => format!("NotEmbeds [rule {}]", rule.name()),
        EmbedVerdict::Unknown => "Unknown".to_string(),
    }
}

fn bound_text(res: &BoundResult, decimal: bool) -> String {
    match &res.outcome {
        Outcome::Finite(v) => format!("ᾱ_p ≤ {}", with_decimal(&v.into(), decimal)),
        Outcome::Infinite => "ᾱ_p ≤ inf".to_string(),
        Outcome::NoBound => match &res.mu {
            Some(mu) => format!("no bound: z ≤ μ = {}", with_decimal(&mu.into(), decimal)),
            None => "no bound".to_string(),
        },
    }
}

fn run_bound(which: &BoundCommand, stdout: &mut dyn Write) -> Result<(), CliError> {
    match which {
        BoundCommand::Alpha {
            d,
            p,
            sbar,
            pz,
            z,
            r,
            out,
        } => {
            let input = BoundInput::new(*d, inv(p, "p")?, sbar.clone(), inv(pz, "p_z")?, z.clone());
            let res = alpha_upper_bound_shifted(&input, r.as_ref().unwrap_or(&Rational::zero())).map_err(bound_error)?;
            if out.json {
                emit(stdout, &pretty(&res))
            } else {
                emit(stdout, &bound_text(&res, out.decimal))
            }
        }
        BoundCommand::SLower {
            d,
            alpha,
            p,
            pz,
            z,
            out,
        } => {
            let v = s_lower_bound(alpha, &inv(p, "p")?, &inv(pz, "p_z")?, z, *d).map_err(bound_error)?;
            if out.json {
                emit(stdout, &pretty(&json!({"s_lower": ExtRat::from(v)})))
            } else {
                emit(stdout, &format!("s̄_p ≥ {}", with_decimal(&v.into(), out.decimal)))
            }
        }
        BoundCommand::STransfer {
            sbar,
            p,
            z,
            pz,
            phat,
            out,
        } => {
            let v = s_transfer_upper_bound(sbar, &inv(p, "p")?, z, &inv(pz, "p_z")?, &inv(phat, "p̂")?)
                .map_err(bound_error)?;
            if out.json {
                emit(stdout, &pretty(&json!({"s_transfer": ExtRat::from(v)})))
            } else {
                emit(stdout, &format!("s̄_p̂ ≤ {}", with_decimal(&v.into(), out.decimal)))
            }
        }
    }
}

fn run_case(which: &CaseCommand, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (doc, text, diagram, svg, out) = match which {
        CaseCommand::Poisson { d, p, svg, out } => {
            let c = PoissonCase::new(*d, inv(p, "p")?)?;
            let rep = poisson_indices(&c)?;
            let text = decorate(rep.to_string(), out.decimal, &[&rep.s_bar, &rep.alpha_bar]);
            let diagram = poisson_diagram(&c, &rep.alpha_bar);
            (json!({"case": "poisson", "report": rep}), text, diagram, svg, out)
        }
        CaseCommand::Ppoisson { d, p, sbar, svg, out } => {
            let c = PPoissonCase::new(*d, inv(p, "p")?, sbar.clone())?;
            let rep = ppoisson_case_split(&c)?;
            let text = match &rep.outcome {
                PPoissonOutcome::Case1 { bound } => decorate(rep.to_string(), out.decimal, &[&bound.as_ext()]),
                PPoissonOutcome::Case2 => rep.to_string(),
            };
            let diagram = ppoisson_diagram(&c, &rep.p_z, &rep.s_bar, &rep.outcome);
            (json!({"case": "ppoisson", "report": rep}), text, diagram, svg, out)
        }
        CaseCommand::Stokes {
            d,
            eps,
            sigma,
            sbar2,
            component,
            chain_p,
            chain_s,
            svg,
            out,
        } => {
            let component: StokesComponent = component.parse()?;
            let c = StokesCase::new(*d, eps.clone(), sigma.clone(), sbar2.clone())?;
            let iv = stokes_admissible_inv_p(&c);
            let mut doc = json!({
                "case": "stokes",
                "admissible_inv_p": {"lo": iv.lo, "hi": iv.hi},
            });
            let mut lines = Vec::new();
            let mut diagram = Diagram::new(*d, "Stokes system");
            if c.s_bar2.is_some() {
                let rep = stokes_bound(&c, component)?;
                lines.push(match &rep.outcome {
                    StokesOutcome::Case1 { bound, .. } => {
                        decorate(rep.to_string(), out.decimal, &[&ExtRat::from(bound)])
                    }
                    StokesOutcome::Case2 => rep.to_string(),
                });
                diagram = stokes_diagram(diagram, &c, component, &rep.outcome, rep.delta_bar.as_ref());
                doc["report"] = serde_json::to_value(&rep).expect("serializable");
            } else {
                lines.push(format!("admissible 1/p: [{}, {}]", iv.lo, iv.hi));
            }
            if let (Some(p), Some(s)) = (chain_p, chain_s) {
                let reports = stokes_data_chain_check(&c, &inv(p, "chain-p")?, s)?;
                for r in &reports {
                    let names: Vec<String> = r.spaces.iter().map(ToString::to_string).collect();
                    lines.push(format!("{}: {}", r.datum, names.join(" -> ")));
                }
                doc["chains"] = serde_json::to_value(&reports).expect("serializable");
            }
            (doc, lines.join("\n"), diagram, svg, out)
        }
    };
    if let Some(path) = svg {
        write_file(path, &svg::render(&diagram))?;
    }
    if out.json {
        emit(stdout, &pretty(&doc))
    } else {
        emit(stdout, &text)
    }
}

/// Adds decimal renderings of `values` after the exact text.
fn decorate(text: String, decimal: bool, values: &[&ExtRat]) -> String {
    if !decimal {
        return text;
    }
    let approx: Vec<String> = values.iter().map(|v| v.to_decimal_string()).collect();
    format!("{text}  (≈ {})", approx.join(", "))
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn poisson_diagram(c: &PoissonCase, alpha_bar: &ExtRat) -> Diagram {
    let region = poisson_region(c);
    let edge = c.right_edge();
    let one = rat(1, 1);
    let s_bar = &one + &c.inv_p;
    let mut diagram = Diagram::new(c.d, "Poisson problem")
        .region(region.generators())
        .line((&Rational::zero(), &one), (&edge, &(&edge + &one)), Style::Solid, "1/ρ ↦ 1+1/ρ", false)
        .ray(&c.inv_p, "1/ρ ↦ d(1/ρ − 1/p)")
        .point(&c.inv_p, &s_bar, "s̄_p", true)
        .point(&edge, &(&edge + &one), "", true);
    if let ExtRat::Finite(a) = alpha_bar {
        if let Ok(pt) = adaptivity_point(a, &c.inv_p, c.d) {
            diagram = diagram.point(&pt.x, &pt.y, "ᾱ_p", true);
        }
    }
    diagram
}

fn ppoisson_diagram(c: &PPoissonCase, p_z: &Rational, s_bar: &Rational, outcome: &PPoissonOutcome) -> Diagram {
    let one = rat(1, 1);
    let inv_pz = p_z.recip();
    let mut diagram = Diagram::new(c.d, "p-Poisson problem")
        .line(
            (&Rational::zero(), &one),
            (&one, &rat(2, 1)),
            Style::Dotted,
            "1/ρ ↦ 1+1/ρ",
            true,
        )
        .ray(&c.inv_p, "1/ρ ↦ d(1/ρ − 1/p)")
        .point(&c.inv_p, s_bar, "s̄_p", false)
        .point(&inv_pz, &rat(3, 2), "z = 3/2", false);
    if let PPoissonOutcome::Case1 { bound } = outcome {
        if let Some(a) = bound.value() {
            if let Ok(pt) = adaptivity_point(a, &c.inv_p, c.d) {
                diagram = diagram
                    .line((&inv_pz, &rat(3, 2)), (&pt.x, &pt.y), Style::Dashed, "", false)
                    .point(&pt.x, &pt.y, "ᾱ_p", true);
            }
        }
    }
    diagram
}

fn stokes_diagram(
    mut diagram: Diagram,
    c: &StokesCase,
    component: StokesComponent,
    outcome: &StokesOutcome,
    delta_bar: Option<&Rational>,
) -> Diagram {
    let half = rat(1, 2);
    let s_bar = c.s_bar2.clone().unwrap_or_else(|| component.floor());
    diagram = diagram
        .ray(&half, "1/ρ ↦ d(1/ρ − 1/2)")
        .point(&half, &s_bar, "s̄₂", false);
    if let (StokesOutcome::Case1 { bound, .. }, Some(delta_bar)) = (outcome, delta_bar) {
        // Auxiliary assertions at 1/p_z = 1/2 - t for t in the open family interval.
        let d1 = c.ctx.d() - rat(1, 1);
        let m = c.m();
        let offset = component.floor() - &half;
        let ends: Vec<(Rational, Rational)> = [(&m - delta_bar) / &d1, &m / &d1]
            .into_iter()
            .map(|t| {
                let x = &half - &t;
                let z = &offset + &x;
                (x, z)
            })
            .collect();
        diagram = diagram
            .line((&ends[0].0, &ends[0].1), (&ends[1].0, &ends[1].1), Style::Dashed, "", false)
            .point(&ends[0].0, &ends[0].1, "", true)
            .point(&ends[1].0, &ends[1].1, "z", true);
        if let Ok(pt) = adaptivity_point(bound, &half, c.ctx.dimension()) {
            diagram = diagram.point(&pt.x, &pt.y, "ᾱ₂", true);
        }
    }
    diagram
}
