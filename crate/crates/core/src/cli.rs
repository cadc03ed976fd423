//! The `genus2` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::comparison::{
    comparison_policy, eps_coords_series, ratio_modular, ratio_unnormalized, ComparisonReport, RatioSampler,
    RATIO_RADII,
};
use crate::lattice::{z2_lattice_eps, z2_lattice_rho, EvenLattice, ThetaPolicy};
use crate::series::TruncatedSeries;
use crate::sewing_eps::{z2_boson_eps, EpsPoint, EpsSewing, PeriodMatrix, SewPolicy};
use crate::sewing_rho::{period_matrix_chi_expansion, z2_boson_rho, RhoPoint, RhoSewing};
use crate::verify::{format_complex, json_complex, json_number, run_suite, SuiteParams, SUITES};
use crate::{Error, Result, C64};

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`; exponents such as `1e-3+2i` are allowed.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read '{s}' as a complex number a+bi");
    if t.is_empty() {
        return Err(bad());
    }
    let imag = |p: &str| -> std::result::Result<f64, String> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    let b = body.as_bytes();
    let split = (1..b.len())
        .rev()
        .find(|&k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

#[derive(Parser, Debug)]
#[command(name = "genus2", version, about = "Period matrices and partition functions of genus two surfaces sewn from tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Period matrix at a sewing point.
    Period {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Genus two partition function of a rank c boson or of a lattice theory.
    Partition {
        #[command(flatten)]
        point: PointArgs,
        /// central charge of the boson model
        #[arg(long, default_value_t = 1.0, conflicts_with = "lattice")]
        c: f64,
        /// lattice JSON file `{"rank": l, "gram": [[...]]}`; selects the lattice model
        #[arg(long)]
        lattice: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a check suite and print its report.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, value_parser = parse_complex)]
        tau: Option<C64>,
        #[arg(long, value_parser = parse_complex)]
        chi: Option<C64>,
        #[command(flatten)]
        common: Common,
    },
    /// Series coefficients in w along rho = -chi w^2.
    Expand {
        target: Target,
        #[arg(long, value_parser = parse_complex)]
        tau: C64,
        #[arg(long, value_parser = parse_complex)]
        chi: C64,
        /// number of coefficients to print (w^0 to w^(order-1)), capped by what is known
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Eps,
    Rho,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    OmegaChi,
    EpsCoords,
    Ratio,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    /// torus modulus (rho scheme; default for tau1 and tau2)
    #[arg(long, value_parser = parse_complex)]
    pub tau: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub tau1: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub tau2: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eps: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub w: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "chi")]
    pub rho: Option<C64>,
    /// rho = -chi w^2
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub chi: Option<C64>,
}

#[derive(Args, Debug)]
pub struct Common {
    /// relative stability demanded between successive truncations
    #[arg(long)]
    pub tol: Option<f64>,
    /// largest truncation size
    #[arg(long)]
    pub cap: Option<usize>,
    /// write the output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Common {
    fn policy(&self) -> Result<SewPolicy> {
        let mut p = SewPolicy::default();
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::input(format!("--tol must be positive, got {t}")));
            }
            p.tol = t;
        }
        if let Some(c) = self.cap {
            p.cap = c;
        }
        Ok(p)
    }
}

enum Point {
    Eps(EpsPoint),
    Rho(RhoPoint),
}

fn need(v: Option<C64>, flag: &str, scheme: &str) -> Result<C64> {
    v.ok_or_else(|| Error::input(format!("the {scheme} scheme needs --{flag}")))
}

impl PointArgs {
    fn point(&self) -> Result<Point> {
        match self.scheme {
            Scheme::Eps => {
                let t1 = need(self.tau1.or(self.tau), "tau1", "eps")?;
                let t2 = need(self.tau2.or(self.tau), "tau2", "eps")?;
                Ok(Point::Eps(EpsPoint::new(t1, t2, need(self.eps, "eps", "eps")?)?))
            }
            Scheme::Rho => {
                let tau = need(self.tau, "tau", "rho")?;
                let w = need(self.w, "w", "rho")?;
                match (self.rho, self.chi) {
                    (Some(r), None) => Ok(Point::Rho(RhoPoint::new(tau, w, r)?)),
                    (None, Some(x)) => Ok(Point::Rho(RhoPoint::from_chi(tau, w, x)?)),
                    _ => Err(Error::input("the rho scheme needs exactly one of --rho, --chi")),
                }
            }
        }
    }
}

fn obj(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

fn point_json(p: &Point) -> (&'static str, Value) {
    match p {
        Point::Eps(p) => (
            "eps",
            obj(vec![("tau1", json_complex(p.tau1)), ("tau2", json_complex(p.tau2)), ("eps", json_complex(p.eps))]),
        ),
        Point::Rho(p) => (
            "rho",
            obj(vec![
                ("tau", json_complex(p.tau)),
                ("w", json_complex(p.w)),
                ("rho", json_complex(p.rho)),
                ("chi", json_complex(p.chi())),
            ]),
        ),
    }
}

fn omega_json(om: &PeriodMatrix) -> Value {
    Value::Array(vec![
        Value::Array(vec![json_complex(om.o11), json_complex(om.o12)]),
        Value::Array(vec![json_complex(om.o12), json_complex(om.o22)]),
    ])
}

fn series_json(s: &TruncatedSeries, count: usize) -> Value {
    let n = (s.order().max(0) as usize).min(count);
    Value::Array((0..n as i64).map(|k| json_complex(s.coeff(k).unwrap_or_default())).collect())
}

fn report_json(r: &ComparisonReport) -> Value {
    obj(vec![
        ("kind", Value::String(r.kind.clone())),
        (
            "fitted_coeffs",
            Value::Array(
                r.fitted_coeffs
                    .iter()
                    .map(|f| {
                        obj(vec![
                            ("power", Value::from(f.power)),
                            ("value", json_complex(f.value)),
                            ("spread", json_number(f.spread)),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("paper_prediction", json_complex(r.paper_prediction)),
        ("residual", json_number(r.residual)),
    ])
}

/// Result of a command: the rendered output and whether it counts as a pass.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("value serializes") + "\n",
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            let mut s = String::from("field,value\n");
            for (k, v) in rows {
                s.push_str(&format!("{k},{v}\n"));
            }
            s
        }
    }
}

// [re, im] pairs print as a+bi
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => {
            let nums: Vec<Option<f64>> = a.iter().map(|x| if x.is_null() { Some(f64::NAN) } else { x.as_f64() }).collect();
            if a.len() == 2 && nums.iter().all(Option::is_some) {
                out.push((prefix.to_string(), format_complex(C64::new(nums[0].unwrap(), nums[1].unwrap()))));
            } else {
                a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out));
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn period(point: &PointArgs, policy: &SewPolicy) -> Result<Value> {
    let p = point.point()?;
    let (det, om, n) = match &p {
        Point::Eps(pt) => {
            let e = EpsSewing::new(*pt, policy)?.evaluate()?;
            (e.det, e.omega, e.n)
        }
        Point::Rho(pt) => {
            let e = RhoSewing::new(*pt, policy)?.evaluate()?;
            (e.det, e.omega, e.n)
        }
    };
    let (scheme, pj) = point_json(&p);
    Ok(obj(vec![
        ("command", Value::from("period")),
        ("scheme", Value::from(scheme)),
        ("point", pj),
        ("omega", omega_json(&om)),
        ("im_omega_positive_definite", Value::Bool(om.in_siegel_space())),
        ("det", json_complex(det)),
        ("truncation", Value::from(n)),
    ]))
}

fn partition(point: &PointArgs, c: f64, lattice: Option<&PathBuf>, policy: &SewPolicy) -> Result<Value> {
    let lat = match lattice {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
            Some(EvenLattice::from_json(&text)?)
        }
        None => None,
    };
    let p = point.point()?;
    let theta = ThetaPolicy::default();
    let (value, n) = match (&p, &lat) {
        (Point::Eps(pt), None) => (z2_boson_eps(pt, c, policy)?, EpsSewing::new(*pt, policy)?.evaluate()?.n),
        (Point::Rho(pt), None) => (z2_boson_rho(pt, c, policy)?, RhoSewing::new(*pt, policy)?.evaluate()?.n),
        (Point::Eps(pt), Some(l)) => (z2_lattice_eps(l, pt, policy, &theta)?.0, EpsSewing::new(*pt, policy)?.evaluate()?.n),
        (Point::Rho(pt), Some(l)) => (z2_lattice_rho(l, pt, policy, &theta)?.0, RhoSewing::new(*pt, policy)?.evaluate()?.n),
    };
    let (scheme, pj) = point_json(&p);
    let mut fields = vec![
        ("command", Value::from("partition")),
        ("scheme", Value::from(scheme)),
        ("point", pj),
        ("value", json_complex(value)),
        ("truncation", Value::from(n)),
    ];
    match &lat {
        Some(l) => {
            fields.push(("model", Value::from("lattice")));
            fields.push(("rank", Value::from(l.rank())));
            fields.push(("gram", serde_json::to_value(l.gram()).expect("gram serializes")));
        }
        None => {
            fields.push(("model", Value::from("boson")));
            fields.push(("c", json_number(c)));
        }
    }
    Ok(obj(fields))
}

fn expand(target: Target, tau: C64, chi: C64, order: usize, policy: &SewPolicy) -> Result<Value> {
    let head = |name: &str| {
        vec![
            ("command", Value::from("expand")),
            ("target", Value::from(name)),
            ("tau", json_complex(tau)),
            ("chi", json_complex(chi)),
        ]
    };
    Ok(match target {
        Target::OmegaChi => {
            let ex = period_matrix_chi_expansion(tau, chi, &policy.eval)?;
            let mut f = head("omega_chi");
            f.push(("quantity", Value::from("2 pi i Omega_ij, coefficients of w^0, w^1, ...")));
            f.push((
                "series",
                obj(vec![
                    ("o11", series_json(&ex.o11, order)),
                    ("o12", series_json(&ex.o12, order)),
                    ("o22", series_json(&ex.o22, order)),
                ]),
            ));
            obj(f)
        }
        Target::EpsCoords => {
            let ex = eps_coords_series(tau, chi, &policy.eval)?;
            let mut f = head("eps_coords");
            f.push(("quantity", Value::from("(2 pi i tau_1, 2 pi i tau_2, eps), coefficients of w^0, w^1, ...")));
            f.push((
                "series",
                obj(vec![
                    ("tau1", series_json(&ex.t1, order)),
                    ("tau2", series_json(&ex.t2, order)),
                    ("eps", series_json(&ex.eps, order)),
                ]),
            ));
            obj(f)
        }
        Target::Ratio => {
            let mut s = RatioSampler::new(tau, chi, &comparison_policy())?;
            let u = ratio_unnormalized(&mut s, &RATIO_RADII)?;
            let m = ratio_modular(&mut s, &RATIO_RADII)?;
            let mut f = head("ratio");
            f.push(("unnormalized", report_json(&u)));
            f.push(("modular", report_json(&m)));
            obj(f)
        }
    })
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<(Outcome, Option<PathBuf>)> {
    let (value, common, pass) = match &cli.command {
        Command::Period { point, common } => (period(point, &common.policy()?)?, common, true),
        Command::Partition { point, c, lattice, common } => {
            (partition(point, *c, lattice.as_ref(), &common.policy()?)?, common, true)
        }
        Command::Verify { suite, tau, chi, common } => {
            let policy = if common.tol.is_some() || common.cap.is_some() { Some(common.policy()?) } else { None };
            let report = run_suite(suite, &SuiteParams { tau: *tau, chi: *chi, policy })?;
            let text = match common.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => report.to_csv(),
            };
            return Ok((Outcome { text, pass: report.pass }, common.out.clone()));
        }
        Command::Expand { target, tau, chi, order, common } => {
            (expand(*target, *tau, *chi, *order, &common.policy()?)?, common, true)
        }
    };
    Ok((Outcome { text: render(&value, common.format), pass }, common.out.clone()))
}

/// Parses `args` (including the program name), runs, writes the output and
/// returns the exit code: 0 on success, 1 when a check fails, 2 on errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok((out, path)) => {
            match path {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, &out.text) {
                        eprintln!("genus2: cannot write {}: {e}", p.display());
                        return 2;
                    }
                }
                None => print!("{}", out.text),
            }
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("genus2: {e}");
            2
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_strings() {
        let c = |re, im| C64::new(re, im);
        assert_eq!(parse_complex("2i"), Ok(c(0.0, 2.0)));
        assert_eq!(parse_complex("0.3"), Ok(c(0.3, 0.0)));
        assert_eq!(parse_complex("0.1-0.2i"), Ok(c(0.1, -0.2)));
        assert_eq!(parse_complex("-i"), Ok(c(0.0, -1.0)));
        assert_eq!(parse_complex("1e-3+2e-1i"), Ok(c(1e-3, 0.2)));
        assert_eq!(parse_complex("-1.5E+2 + i"), Ok(c(-150.0, 1.0)));
        assert!(parse_complex("2k").is_err());
        assert!(parse_complex("").is_err());
    }
}
