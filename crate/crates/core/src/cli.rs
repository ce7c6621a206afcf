//! Command-line front end. `run` is the whole program minus process exit.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::algnum::field::{parse_coords, FieldElement, NumberField};
use crate::algnum::IntPoly;
use crate::error::{Error, Result};
use crate::heights::{self, BoundParams};
use crate::lmfdb::{default_cache_root, LmfdbClient, Policy, UreqTransport};
use crate::localfields::{self, CrystallineParams, OracleResult};
use crate::matgroups::{self, FiniteGroup, FiniteRingSpec, GroupHom, Mat2, MatSubspace, SubgroupGens};
use crate::newforms::{self, CertifyOutcome, DataSource};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bogocert", version, about = "Certify height lower bounds for modular Galois representations")]
pub struct Cli {
    /// Never touch the network; use the cache and bundled fixtures only.
    #[arg(long, global = true)]
    pub offline: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Cache directory (defaults to $BOGOCERT_CACHE or the user cache dir).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Re-download records even when cached.
    #[arg(long, global = true, conflicts_with = "offline")]
    pub refresh: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weil height of an algebraic number.
    Height(HeightArgs),
    /// Place-sum lower bound for the height of a non-root of unity.
    Bound(BoundArgs),
    /// Valuation growth s_{p,rho}(lambda).
    Accel(AccelArgs),
    /// Acceleration depth lambda and the constant c from C1 and C2.
    Const(ConstArgs),
    /// Matrix group computations.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Division fields of the unramified quadratic extension of Q_p.
    #[command(subcommand)]
    Local(LocalCommand),
    /// Newform records and the P0-P3 hypotheses.
    #[command(subcommand)]
    Newform(NewformCommand),
    /// Search for the smallest prime at which every hypothesis holds.
    Certify(CertifyArgs),
    /// Recompute the reference table of trace-zero examples.
    Table,
}

#[derive(Args, Debug)]
pub struct HeightArgs {
    /// Minimal polynomial, e.g. "x^2 - x - 1" or "[-1, -1, 1]".
    #[arg(long, conflicts_with_all = ["field", "coords"])]
    pub minpoly: Option<String>,
    /// Defining polynomial of a number field.
    #[arg(long, requires = "coords")]
    pub field: Option<String>,
    /// Power-basis coordinates of an element of --field.
    #[arg(long, requires = "field")]
    pub coords: Option<String>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long = "S")]
    pub s: u64,
    /// Local-to-global degree ratio, e.g. 1/2.
    #[arg(long)]
    pub ratio: String,
    #[arg(long)]
    pub p: u64,
}

#[derive(Args, Debug)]
pub struct AccelArgs {
    #[arg(long)]
    pub p: u64,
    /// Positive rational, e.g. 1/25 or 0.04.
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub lambda: BigUint,
}

#[derive(Args, Debug)]
pub struct ConstArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long = "C1")]
    pub c1: String,
    #[arg(long = "C2")]
    pub c2: BigUint,
}

#[derive(Args, Debug)]
pub struct RingArgs {
    /// Z/25, Z/5^2, GF(5), GF(5^2) or GF(5)xGF(5).
    #[arg(long)]
    pub ring: String,
    /// Enumeration cap on group orders.
    #[arg(long, default_value_t = matgroups::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ambient {
    Gl2,
    Sl2,
    Ghat,
}

#[derive(Subcommand, Debug)]
pub enum GroupCommand {
    /// Normal closure of a subgroup inside GL2, SL2 or Ghat.
    NormalClosure {
        #[command(flatten)]
        ring: RingArgs,
        /// Generator matrices such as "[[1,1],[0,1]]".
        #[arg(long = "gen")]
        gens: Vec<String>,
        /// Use the non-split Cartan subgroup (prime fields only).
        #[arg(long, conflicts_with = "gens")]
        nonsplit_cartan: bool,
        #[arg(long, value_enum, default_value_t = Ambient::Gl2)]
        ambient: Ambient,
        /// Weight for the Ghat ambient.
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
    /// Center of the group generated by matrices.
    Center {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
    },
    /// Fiber product of small groups over a common quotient, from a spec file.
    Fiber {
        /// File with `target <group>` and `group <group> images <i>...` lines.
        spec: PathBuf,
    },
    /// Span of trace-zero matrices under SL2 conjugation.
    Adjoint {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "seed", required = true)]
        seeds: Vec<String>,
    },
}

#[derive(Args, Debug)]
pub struct LocalArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
}

#[derive(Subcommand, Debug)]
pub enum LocalCommand {
    /// Structure of Gal(L(p^n)/L), checked by enumeration when small.
    Gal(LocalArgs),
    /// Lower ramification filtration.
    Ram(LocalArgs),
    /// Surjectivity of the norm on the last unit quotient.
    Norm(LocalArgs),
    /// C1, C2 and the break-index bound for n up to --n.
    Constants {
        #[command(flatten)]
        local: LocalArgs,
        /// Degree of the Hecke field.
        #[arg(long, default_value_t = 1)]
        d: u32,
    },
    /// Orders of omega compatible with the order of chi(p).
    Omega {
        #[arg(long)]
        chi_order: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum NewformCommand {
    /// P0-P3 at p, with big-image evidence.
    Check {
        label: String,
        #[arg(long)]
        p: u64,
    },
    /// Frobenius polynomial at r reduced at a degree-one prime above p.
    Charpoly {
        label: String,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        p: u64,
        /// Root of the Hecke polynomial mod p fixing the prime (default: smallest).
        #[arg(long)]
        root: Option<u64>,
    },
    /// Basic data of a record.
    Show { label: String },
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    pub label: String,
    #[arg(long, default_value_t = 500)]
    pub bound: u64,
}

/// What a command produced: a structured value, its text rendering, and
/// whether the requested check passed.
pub struct Report {
    pub value: Value,
    pub text: String,
    pub pass: bool,
}

impl Report {
    fn new(value: Value, text: String, pass: bool) -> Self {
        Report { value, text, pass }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) => EXIT_USAGE,
        Error::DataInsufficient(_) | Error::Schema { .. } | Error::Network(_) | Error::Io(_) => EXIT_DATA,
        Error::Unsupported(_) | Error::Overflow { .. } | Error::NotApplicable(_) => EXIT_FAIL,
    }
}

/// Parse `argv`, run, write the report; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let written = match cli.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.value).expect("serializable")),
                Format::Text => write!(out, "{}", report.text),
            };
            if written.is_err() {
                return EXIT_FAIL;
            }
            if report.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn client(cli: &Cli) -> LmfdbClient {
    let root = cli.cache_dir.clone().unwrap_or_else(default_cache_root);
    if cli.offline {
        LmfdbClient::new(root, None, Policy::OfflineOnly)
    } else {
        let policy = if cli.refresh { Policy::Refresh } else { Policy::CacheFirst };
        LmfdbClient::new(root, Some(Box::new(UreqTransport::default())), policy)
    }
}

pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Height(a) => height(a),
        Command::Bound(a) => bound(a),
        Command::Accel(a) => accel(a),
        Command::Const(a) => constant(a),
        Command::Group(g) => group(g),
        Command::Local(l) => local(l),
        Command::Newform(n) => newform(n, &client(cli)),
        Command::Certify(c) => certify(c, &client(cli)),
        Command::Table => table(&client(cli)),
    }
}

fn height(a: &HeightArgs) -> Result<Report> {
    let x = match (&a.minpoly, &a.field, &a.coords) {
        (Some(f), _, _) => FieldElement::from_minimal_polynomial(&f.parse::<IntPoly>()?)?,
        (None, Some(f), Some(c)) => {
            let field = NumberField::from_poly(f.parse::<IntPoly>()?)?;
            FieldElement::new(&field, parse_coords(c)?)?
        }
        _ => return Err(Error::invalid("give --minpoly, or --field with --coords")),
    };
    let h = heights::weil_height(&x)?;
    let mp = x.minimal_polynomial();
    let value = json!({
        "minimal_polynomial": mp.to_string(),
        "degree": mp.degree(),
        "height": h,
        "root_of_unity_or_zero_height": x.is_root_of_unity(),
    });
    let text = format!("minimal polynomial: {mp}\nheight: {h}\n");
    Ok(Report::new(value, text, true))
}

fn parse_ratio(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::invalid(format!("ratio {s:?} must look like 1/2"));
    match s.split_once('/') {
        Some((n, d)) => Ok((n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?)),
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
    }
}

fn bound(a: &BoundArgs) -> Result<Report> {
    let params = BoundParams { a: a.a, b: a.b, rho: a.rho, s_size: a.s, degree_ratio: parse_ratio(&a.ratio)?, p: a.p };
    let v = heights::lower_bound(&params)?;
    let value = json!({ "params": params, "lower_bound": v, "positive": v > 0.0 });
    let text = format!("lower bound: {v:.12}\n{}\n", if v > 0.0 { "positive" } else { "not positive" });
    Ok(Report::new(value, text, v > 0.0))
}

fn accel(a: &AccelArgs) -> Result<Report> {
    let rho = heights::parse_positive_rational(&a.rho)?;
    let s = heights::accelerate(a.p, &rho, &a.lambda)?;
    let shown = crate::algnum::field::format_rational(&s);
    let approx = num_traits::ToPrimitive::to_f64(&s).unwrap_or(f64::INFINITY);
    let value = json!({ "p": a.p, "rho": a.rho, "lambda": a.lambda.to_string(), "s": shown, "s_approx": approx });
    Ok(Report::new(value, format!("s = {shown} ({approx:.9})\n"), true))
}

fn constant(a: &ConstArgs) -> Result<Report> {
    let c1 = heights::parse_positive_rational(&a.c1)?;
    let k = heights::bogomolov_constant(a.p, &c1, &a.c2)?;
    let text = format!("lambda = {}\nc = {}\nlog10 c = {:.9}\n", k.lambda, k.c_display(), k.log10_c);
    Ok(Report::new(serde_json::to_value(&k).expect("serializable"), text, true))
}

fn ring(r: &RingArgs) -> Result<Arc<FiniteRingSpec>> {
    Ok(Arc::new(r.ring.parse::<FiniteRingSpec>()?))
}

fn mats(spec: &FiniteRingSpec, v: &[String]) -> Result<Vec<Mat2>> {
    v.iter().map(|s| Mat2::parse(spec, s)).collect()
}

/// Named small groups: S<n>, D<n>, Q8, Z/<n>.
pub fn named_group(name: &str) -> Result<FiniteGroup> {
    let num = |s: &str| s.parse::<usize>().ok().filter(|&n| (1..=6).contains(&n));
    if name == "Q8" {
        return Ok(FiniteGroup::quaternion());
    }
    if let Some(n) = name.strip_prefix("Z/").and_then(|s| s.parse::<usize>().ok()).filter(|&n| (1..=720).contains(&n)) {
        return Ok(FiniteGroup::cyclic(n));
    }
    if let Some(n) = name.strip_prefix('S').and_then(num) {
        return Ok(FiniteGroup::symmetric(n));
    }
    if let Some(n) = name.strip_prefix('D').and_then(|s| s.parse::<usize>().ok()).filter(|&n| (2..=60).contains(&n)) {
        return Ok(FiniteGroup::dihedral(n));
    }
    Err(Error::invalid(format!("unknown group {name:?}; use S<n>, D<n>, Q8 or Z/<n>")))
}

/// Parse a fiber-product spec. Lines: `target <group>` and
/// `group <group> images <target index per generator>`; `#` starts a comment.
pub fn parse_fiber_spec(text: &str) -> Result<(FiniteGroup, Vec<FiniteGroup>, Vec<GroupHom>)> {
    let mut target = None;
    let mut parts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |m: &str| Error::invalid(format!("line {}: {m}", i + 1));
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["target", name] => target = Some(named_group(name)?),
            ["group", name, "images", rest @ ..] => {
                let images: Vec<usize> = rest.iter().map(|w| w.parse().map_err(|_| bad("bad image index"))).collect::<Result<_>>()?;
                parts.push((named_group(name)?, images));
            }
            _ => return Err(bad("expected `target <group>` or `group <group> images ...`")),
        }
    }
    let target = target.ok_or_else(|| Error::invalid("spec has no target line"))?;
    let mut groups = Vec::new();
    let mut homs = Vec::new();
    for (g, images) in parts {
        homs.push(GroupHom::from_generator_images(&g, &target, &images)?);
        groups.push(g);
    }
    Ok((target, groups, homs))
}

fn group(g: &GroupCommand) -> Result<Report> {
    match g {
        GroupCommand::NormalClosure { ring: r, gens, nonsplit_cartan, ambient, k } => {
            let spec = ring(r)?;
            let h = if *nonsplit_cartan {
                matgroups::nonsplit_cartan(&spec)?
            } else {
                if gens.is_empty() {
                    return Err(Error::invalid("give --gen matrices or --nonsplit-cartan"));
                }
                matgroups::group_closure(&SubgroupGens::new(&spec, mats(&spec, gens)?)?, r.cap)?
            };
            let amb = match ambient {
                Ambient::Gl2 => matgroups::gl2(&spec, r.cap)?,
                Ambient::Sl2 => matgroups::sl2(&spec, r.cap)?,
                Ambient::Ghat => matgroups::ghat(&spec, *k, r.cap)?,
            };
            let nc = matgroups::normal_closure(&h, &amb, r.cap)?;
            let (ho, no, ao) = (h.order(), nc.order(), amb.order());
            let value = json!({
                "ring": spec.to_string(),
                "subgroup_order": ho,
                "normal_closure_order": no,
                "ambient_order": ao,
                "equals_ambient": no == ao,
            });
            let text = format!(
                "subgroup order: {}\nnormal closure order: {}\nambient order: {}\n",
                ho.unwrap_or(0),
                no.unwrap_or(0),
                ao.unwrap_or(0)
            );
            Ok(Report::new(value, text, true))
        }
        GroupCommand::Center { ring: r, gens } => {
            let spec = ring(r)?;
            let g = matgroups::group_closure(&SubgroupGens::new(&spec, mats(&spec, gens)?)?, r.cap)?;
            let z = matgroups::center(&g)?;
            let elems: Vec<Value> = z.elements().unwrap_or_default().iter().map(|m| m.to_json(&spec)).collect();
            let value = json!({ "group_order": g.order(), "center_order": z.order(), "center": elems });
            let text = format!("group order: {}\ncenter order: {}\n", g.order().unwrap_or(0), z.order().unwrap_or(0));
            Ok(Report::new(value, text, true))
        }
        GroupCommand::Fiber { spec } => {
            let text = std::fs::read_to_string(spec)?;
            let (target, groups, homs) = parse_fiber_spec(&text)?;
            let fp = matgroups::fiber_product(&groups, &homs, &target)?;
            let center = fp.group.center();
            let cw = fp.componentwise_central(&groups);
            let law = center == cw;
            let value = json!({
                "name": fp.group.name,
                "order": fp.group.order(),
                "center_order": center.len(),
                "componentwise_central": cw.len(),
                "center_law_holds": law,
            });
            let text = format!(
                "{}: order {}\ncenter order {}, componentwise central {}\n",
                fp.group.name,
                fp.group.order(),
                center.len(),
                cw.len()
            );
            Ok(Report::new(value, text, law))
        }
        GroupCommand::Adjoint { ring: r, seeds } => {
            let spec = ring(r)?;
            let v = MatSubspace::span(&spec, &mats(&spec, seeds)?)?;
            let closure = matgroups::adjoint_closure(&spec, &v)?;
            let (_, trace_zero, _) = matgroups::trace_subspaces(&spec)?;
            let full = closure.dim() == trace_zero.dim();
            let value = json!({ "seed_dim": v.dim(), "closure_dim": closure.dim(), "trace_zero_dim": trace_zero.dim(), "full": full });
            let text = format!("closure dimension {} of {}\n", closure.dim(), trace_zero.dim());
            Ok(Report::new(value, text, true))
        }
    }
}

fn local(l: &LocalCommand) -> Result<Report> {
    match l {
        LocalCommand::Gal(a) => {
            let params = CrystallineParams::new(a.p, a.k, a.n)?;
            let s = localfields::gal_structure(&params)?;
            let oracle = localfields::unit_group_oracle(&params)?;
            let pass = !matches!(oracle, OracleResult::Enumerated { matches_formula: false, .. });
            let inv: Vec<String> = s.invariants.iter().map(u128::to_string).collect();
            let check = match &oracle {
                OracleResult::Enumerated { matches_formula, .. } => {
                    format!("enumeration {}", if *matches_formula { "agrees" } else { "DISAGREES" })
                }
                OracleResult::FormulaOnly { reason } => format!("formula only ({reason})"),
            };
            let text = format!("invariants: {}\norder: {}\ndelta: {}\n{check}\n", inv.join(","), s.order, params.delta);
            let value = json!({ "params": params, "structure": s, "oracle": oracle });
            Ok(Report::new(value, text, pass))
        }
        LocalCommand::Ram(a) => {
            let params = CrystallineParams::new(a.p, a.k, a.n)?;
            let f = localfields::ramification_filtration(&params)?;
            let mut text = String::new();
            for b in &f.breaks {
                text.push_str(&format!(
                    "i in [{}, {}]: G_i = Gal(L(p^{})/L(p^{})), order {}\n",
                    b.i_start, b.i_end, a.n, b.fixed_level, b.group_order
                ));
            }
            let (num, den) = f.ratio();
            text.push_str(&format!("i_n = {}, |G_(i_n)| = {}, e_n/(i_n+1) = {num}/{den}\n", f.last_break, f.last_order));
            Ok(Report::new(json!({ "params": params, "filtration": f }), text, true))
        }
        LocalCommand::Norm(a) => {
            let r = localfields::norm_surjective(a.p, a.n, a.k)?;
            let text = format!(
                "image {} of {}: {}{}\n",
                r.image_size,
                r.quotient_size,
                if r.surjective { "surjective" } else { "not surjective" },
                if r.degenerate { " (p divides k-1)" } else { "" }
            );
            Ok(Report::new(serde_json::to_value(&r).expect("serializable"), text, r.surjective))
        }
        LocalCommand::Constants { local: a, d } => {
            let r = localfields::assumption3_constants(a.p, a.k, *d, a.n)?;
            let mut text = format!("C1 = {}\nC2 = {}\n", r.c1, r.c2);
            for c in &r.checks {
                text.push_str(&format!(
                    "n = {}: e_n = {}, i_n = {}, e_n/(i_n+1) = {}/{} {}\n",
                    c.n,
                    c.e_n,
                    c.i_n,
                    c.ratio.0,
                    c.ratio.1,
                    if c.ok { "ok" } else { "FAILS" }
                ));
            }
            Ok(Report::new(serde_json::to_value(&r).expect("serializable"), text, r.all_ok))
        }
        LocalCommand::Omega { chi_order } => {
            let o = localfields::omega_order(*chi_order)?;
            let fmt = |s: &std::collections::BTreeSet<u64>| s.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
            let text = format!("direct: {}\ntwisted: {}\n", fmt(&o.direct), fmt(&o.twisted));
            Ok(Report::new(serde_json::to_value(&o).expect("serializable"), text, true))
        }
    }
}

fn mark(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn newform(n: &NewformCommand, data: &dyn DataSource) -> Result<Report> {
    match n {
        NewformCommand::Check { label, p } => {
            let rec = data.newform(label)?;
            let report = newforms::full_report(&rec, *p, data)?;
            let mut text = format!(
                "{label} at p = {p}\nP0 (p does not divide N): {}\nP1 (a_p = 0): {}\nP3 (p >= 5 and weight conditions): {}\nP2 (big image): {}\n",
                mark(report.p0),
                mark(report.p1),
                mark(report.p3),
                mark(report.p2_positive()),
            );
            for f in report.failures() {
                text.push_str(&format!("  {f}\n"));
            }
            text.push_str(&format!("verdict: {}\n", if report.verdict() { "pass" } else { "fail" }));
            Ok(Report::new(serde_json::to_value(&report).expect("serializable"), text, report.verdict()))
        }
        NewformCommand::Charpoly { label, r, p, root } => {
            let rec = data.newform(label)?;
            let root = match root {
                Some(x) => *x,
                None => *crate::algnum::splitting_type(&rec.field, *p)?
                    .degree_one_roots()
                    .first()
                    .ok_or_else(|| Error::NotApplicable(format!("no degree-one prime above {p}")))?,
            };
            let f = newforms::frobenius_charpoly(&rec, *r, *p, root)?;
            let irr = newforms::irreducible_quadratic(&f);
            let value = json!({ "charpoly": f, "display": f.to_string(), "irreducible": irr });
            let text = format!("{f}\n{}\n", if irr { "irreducible" } else { "reducible" });
            Ok(Report::new(value, text, true))
        }
        NewformCommand::Show { label } => {
            let rec = data.newform(label)?;
            let value = json!({
                "label": rec.label,
                "level": rec.level,
                "weight": rec.weight,
                "char_conductor": rec.char_conductor,
                "hecke_field": rec.field.display_name(),
                "field_poly": rec.field.poly().to_string(),
                "coefficients_known": rec.coeff_bound(),
                "cm": rec.cm,
                "twist_minimal": rec.twist_minimal,
            });
            let a: Vec<String> = (1..=rec.coeff_bound().min(10)).map(|n| format!("a_{n} = {}", rec.an[n as usize - 1])).collect();
            let text = format!(
                "{} level {} weight {} conductor {}\nHecke field {}\n{}\n",
                rec.label,
                rec.level,
                rec.weight,
                rec.char_conductor,
                rec.field.display_name(),
                a.join("\n")
            );
            Ok(Report::new(value, text, true))
        }
    }
}

fn certify(a: &CertifyArgs, data: &dyn DataSource) -> Result<Report> {
    let rec = data.newform(&a.label)?;
    let outcome = newforms::certify(&rec, a.bound, data)?;
    let value = serde_json::to_value(&outcome).expect("serializable");
    Ok(match &outcome {
        CertifyOutcome::Certified(c) => {
            let k = &c.constants.bogomolov;
            let mut text = format!(
                "{}: certified at p = {} (prime above p: X - {})\ndelta = {}\nC1 = {}\nC2 = {}^{}\ng = 2^{}\nlambda = {}\nc = {}\n",
                c.label,
                c.p,
                c.embedding.1,
                c.delta,
                c.constants.c1,
                c.p,
                4 * c.hecke_degree,
                2 * (c.p - 1),
                k.lambda,
                k.c_display()
            );
            for l in &c.filtration {
                text.push_str(&format!("n = {}: |H_n| = {}, i_n = {}, |G_(i_n)| = {}\n", l.n, l.galois_order, l.i_n, l.last_group_order));
            }
            Report::new(value, text, c.verdict)
        }
        CertifyOutcome::Failed(f) => {
            let mut text = format!("{}: no prime up to {} satisfies every condition\n", f.label, f.bound);
            for pf in f.failures.iter().filter(|pf| pf.p >= 5) {
                text.push_str(&format!("p = {}: {}\n", pf.p, pf.reasons.join("; ")));
            }
            Report::new(value, text, false)
        }
    })
}

fn table(data: &dyn DataSource) -> Result<Report> {
    let t = newforms::reproduce_table(data)?;
    let mut text = format!("{:<10} {:>3} {:<12} {:>4} {:>4} {:>4}  {}\n", "label", "N", "field", "cond", "r", "p", "charpoly");
    for r in &t.rows {
        text.push_str(&format!(
            "{:<10} {:>3} {:<12} {:>4} {:>4} {:>4}  {}{}\n",
            r.label,
            r.level,
            r.field,
            r.conductor,
            r.r,
            r.p,
            r.charpoly,
            if r.matches() { "" } else { "  MISMATCH" }
        ));
        for d in &r.diffs {
            text.push_str(&format!("    {}: table {} / computed {}\n", d.column, d.expected, d.computed));
        }
        if !r.matches() {
            if let Some(q) = r.first_valid_p {
                text.push_str(&format!("    smallest p with a_p = 0 and this polynomial irreducible: {q}\n"));
            }
        }
    }
    text.push_str(&format!("{}/{} rows match\n", t.matched, t.total));
    Ok(Report::new(serde_json::to_value(&t).expect("serializable"), text, t.all_match()))
}
