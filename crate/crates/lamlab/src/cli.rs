//! The `lamlab` command line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::Value;

use crate::circle::{Angle, Leaf};
use crate::error::{Error, Result};
use crate::lamination::{LaminationApprox, LaminationSpec};
use crate::limits;
use crate::mating::{self, MatingSpec, Side};
use crate::qml::{self, Tuning};
use crate::render::{self, Layer, Style};
use crate::symdyn::{self, Address24, Address313, Bounds, Formulas, Scheme, TransitionMatrix};

#[derive(Debug, Parser)]
#[command(name = "lamlab", version, about = "Quadratic invariant laminations and matings")]
pub struct Cli {
    /// Largest period any enumeration may reach.
    #[arg(long, global = true, env = "LAMLAB_MAX_PERIOD", default_value_t = limits::DEFAULT_MAX_PERIOD)]
    pub max_period: u32,

    /// Largest pullback depth.
    #[arg(long, global = true, default_value_t = limits::DEFAULT_MAX_DEPTH)]
    pub max_depth: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minor leaf through a periodic angle.
    Minor { angle: Angle },
    /// All minor leaves of period at most N.
    Qml { period: u32 },
    /// Finite approximation of a lamination.
    Lam(LamArgs),
    /// Mating report for two laminations.
    Mate(MateArgs),
    /// Periodic point and component counts.
    Count(CountArgs),
    /// Renormalization address arithmetic.
    Address {
        #[command(subcommand)]
        action: AddressCommand,
    },
    /// Chord diagram of one lamination or of a mating.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct DrawArgs {
    /// Pullback depth.
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    /// Seed periodic leaves up to this period.
    #[arg(long, default_value_t = 10)]
    pub period_bound: u32,
    /// Draw leaves as arcs orthogonal to the circle.
    #[arg(long)]
    pub geodesic: bool,
    /// Image size in pixels.
    #[arg(long, default_value_t = 800)]
    pub size: u32,
}

#[derive(Debug, Args)]
pub struct LamArgs {
    pub p: Angle,
    #[command(flatten)]
    pub draw: DrawArgs,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MateArgs {
    pub p: Angle,
    pub q: Angle,
    /// Exit 3 unless the disjoint-closure criterion holds.
    #[arg(long = "check-3-5")]
    pub check: bool,
    /// Periods searched for classes.
    #[arg(long, default_value_t = 12)]
    pub period_bound: u32,
    /// Pullback depth of the drawn laminations.
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    #[arg(long)]
    pub geodesic: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// JSON array of rows.
    #[arg(long, requires = "period")]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub period: Option<u32>,
    /// Also report exact-period and orbit counts.
    #[arg(long)]
    pub exact: bool,
    /// Also report components, two points each.
    #[arg(long)]
    pub components: bool,
    /// Hyperbolic components of period dividing M.
    #[arg(long, conflicts_with_all = ["matrix", "points"])]
    pub mandelbrot: Option<u32>,
    /// Components for a given number of periodic points.
    #[arg(long, conflicts_with = "matrix")]
    pub points: Option<BigUint>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Thm24,
    S313,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Thm24 => Scheme::Thm24,
            SchemeArg::S313 => Scheme::S313,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormulasArg {
    Derivation,
    Displayed,
}

#[derive(Debug, Subcommand)]
pub enum AddressCommand {
    /// Check one address; exit 3 if invalid.
    Validate {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long)]
        m: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        mseq: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        i1: u64,
        #[arg(long)]
        tuning_tail: bool,
        #[arg(long, value_enum, default_value = "derivation")]
        formulas: FormulasArg,
    },
    /// Print every valid address within the bounds, one JSON object per line.
    Enumerate {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        i1: u64,
        #[arg(long)]
        terms: usize,
        #[arg(long, default_value_t = 1)]
        j_min: u64,
        #[arg(long)]
        j_max: u64,
        #[arg(long)]
        m_max: u64,
    },
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub p: Angle,
    pub q: Option<Angle>,
    #[command(flatten)]
    pub draw: DrawArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// JSON shape of `lamlab minor`.
#[derive(Debug, Serialize)]
pub struct MinorReport {
    pub minor: Leaf,
    pub period: u32,
    pub limb_root: Leaf,
    pub tuning: Option<Tuning>,
}

pub fn minor_report(x: &Angle) -> Result<MinorReport> {
    let m = qml::minor_of(x)?;
    Ok(MinorReport {
        limb_root: qml::minimal_minor_below(x)?.leaf,
        tuning: qml::is_tuning(x)?,
        minor: m.leaf,
        period: m.period,
    })
}

/// Approximation of `L_p` as drawn and reported by `lam`.
pub fn lamination_approx(p: &Angle, depth: u32, period_bound: u32) -> Result<LaminationApprox> {
    let spec = LaminationSpec::new(p)?;
    LaminationApprox::build_with_periodic(&spec, depth, period_bound)
}

/// Layers for a mating picture: `p` leaves, then conjugated `q` leaves.
pub fn mating_layers(spec: &MatingSpec, depth: u32, period_bound: u32) -> Result<Vec<Layer>> {
    let mut layers = Vec::new();
    for side in [Side::P, Side::Q] {
        let mut layer = Layer::default();
        if let Some(l) = spec.lamination(side) {
            let approx = LaminationApprox::build_with_periodic(l, depth, period_bound)?;
            let conj = side == Side::Q;
            layer.leaves = approx
                .leaves
                .iter()
                .map(|x| if conj { x.conjugate() } else { x.clone() })
                .collect();
            layer.polygons = approx
                .polygons
                .iter()
                .map(|poly| {
                    if conj {
                        crate::lamination::Polygon::new(
                            poly.vertices.iter().map(Angle::conjugate).collect(),
                        )
                    } else {
                        poly.clone()
                    }
                })
                .collect();
        }
        layers.push(layer);
    }
    Ok(layers)
}

fn approx_layer(a: &LaminationApprox) -> Layer {
    Layer {
        leaves: a.leaves.iter().cloned().collect(),
        polygons: a.polygons.iter().cloned().collect(),
    }
}

fn big_json(x: &BigUint) -> Value {
    match symdyn::to_u64(x) {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

fn to_json<T: Serialize>(x: &T) -> Result<String> {
    serde_json::to_string_pretty(x).map_err(|e| Error::consistency(e.to_string()))
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))
}

fn style(geodesic: bool, size: u32) -> Style {
    Style {
        geodesic,
        size,
        ..Style::default()
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    limits::set_max_period(cli.max_period);
    limits::set_max_depth(cli.max_depth);
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "lamlab: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::domain(format!("cannot write output: {e}")))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Minor { angle } => {
            if angle.is_zero() {
                emit(out, &to_json(&serde_json::json!({
                    "minor": null,
                    "notice": Error::DegenerateMinor.to_string(),
                }))?)?;
                return Ok(0);
            }
            emit(out, &to_json(&minor_report(&angle)?)?)?;
        }
        Command::Qml { period } => {
            emit(out, &to_json(&qml::pairing_of_period(period)?)?)?;
        }
        Command::Lam(a) => {
            let approx = lamination_approx(&a.p, a.draw.depth, a.draw.period_bound)?;
            let json = to_json(&approx.report())?;
            if let Some(path) = &a.json {
                write_file(path, &format!("{json}\n"))?;
            }
            if let Some(path) = &a.svg {
                let svg = render::render_svg(&[approx_layer(&approx)], &style(a.draw.geodesic, a.draw.size));
                write_file(path, &svg)?;
            }
            emit(out, &json)?;
        }
        Command::Mate(a) => {
            let spec = MatingSpec::new(&a.p, &a.q)?;
            let report = mating::check_theorem_3_5(&spec, a.period_bound)?;
            let json = to_json(&report)?;
            if let Some(path) = &a.json {
                write_file(path, &format!("{json}\n"))?;
            }
            if let Some(path) = &a.svg {
                let layers = mating_layers(&spec, a.depth, a.period_bound.min(10))?;
                write_file(path, &render::render_svg(&layers, &style(a.geodesic, 800)))?;
            }
            emit(out, &json)?;
            if a.check && !report.thm35_ok {
                return Ok(3);
            }
        }
        Command::Count(a) => return count(a, out),
        Command::Address { action } => return address(action, out),
        Command::Render(a) => {
            let layers = match &a.q {
                None => vec![approx_layer(&lamination_approx(&a.p, a.draw.depth, a.draw.period_bound)?)],
                Some(q) => mating_layers(&MatingSpec::new(&a.p, q)?, a.draw.depth, a.draw.period_bound)?,
            };
            let svg = render::render_svg(&layers, &style(a.draw.geodesic, a.draw.size));
            match &a.out {
                Some(path) => write_file(path, &svg)?,
                None => write!(out, "{svg}").map_err(|e| Error::domain(e.to_string()))?,
            }
        }
    }
    Ok(0)
}

fn count(a: CountArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(m) = a.mandelbrot {
        emit(out, &symdyn::mandelbrot_component_count(m)?.to_string())?;
        return Ok(0);
    }
    if let Some(points) = &a.points {
        emit(out, &symdyn::component_count_from_points(points)?.to_string())?;
        return Ok(0);
    }
    let (Some(path), Some(n)) = (&a.matrix, a.period) else {
        return Err(Error::domain("give --mandelbrot, --points, or --matrix with --period"));
    };
    let m = TransitionMatrix::from_json(&read_file(path)?)?;
    let fixed = symdyn::count_fixed(&m, n)?;
    let mut obj = serde_json::Map::new();
    obj.insert("period".into(), Value::from(n));
    obj.insert("fixed".into(), big_json(&fixed));
    if a.exact {
        obj.insert("exact".into(), big_json(&symdyn::count_exact_period(&m, n)?));
        obj.insert("orbits".into(), big_json(&symdyn::count_orbits(&m, n)?));
    }
    if a.components {
        obj.insert("components".into(), big_json(&symdyn::component_count_from_points(&fixed)?));
    }
    emit(out, &to_json(&Value::Object(obj))?)?;
    Ok(0)
}

fn address(cmd: AddressCommand, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        AddressCommand::Validate {
            scheme,
            m,
            j,
            mseq,
            i1,
            tuning_tail,
            formulas,
        } => {
            let verdict = match scheme {
                SchemeArg::Thm24 => symdyn::validate_thm24(&Address24 {
                    m,
                    j,
                    m_seq: mseq,
                    tuning_tail,
                })?,
                SchemeArg::S313 => symdyn::validate_lemma314_with(
                    &Address313 { m, i1, j, m_seq: mseq },
                    match formulas {
                        FormulasArg::Derivation => Formulas::Derivation,
                        FormulasArg::Displayed => Formulas::Displayed,
                    },
                )?,
            };
            emit(out, &to_json(&verdict)?)?;
            Ok(if verdict.valid { 0 } else { 3 })
        }
        AddressCommand::Enumerate {
            scheme,
            m,
            i1,
            terms,
            j_min,
            j_max,
            m_max,
        } => {
            let bounds = Bounds {
                m,
                i1,
                terms,
                j_min,
                j_max,
                m_max,
            };
            for a in symdyn::enumerate_addresses(scheme.into(), &bounds)? {
                emit(out, &serde_json::to_string(&a).map_err(|e| Error::consistency(e.to_string()))?)?;
            }
            Ok(0)
        }
    }
}
