//! Run-configuration schema and validation.
//!
//! A sweep is described by one TOML document with a section per concern:
//!
//! ```toml
//! [profile]                 # barrier family and its parameters
//! family = "linear-step"
//! v0 = 0.5
//! b = 3.0
//!
//! [setup]                   # scattering window and outer levels
//! a = 1.0
//! b = 3.0
//! v1 = 0.0                  # a number, or "evaluate-at-a"
//! v3 = 0.0                  # a number, or "evaluate-at-b"
//!
//! [basis]                   # κ grid (start/step/end) or explicit kappas = [...]
//! start = 0.1
//! step = 0.1
//! end = 6.0
//!
//! [slopes]                  # the two imposed boundary log-derivatives at b
//! lambda_b = 1.0
//! lambda_b_tilde = 4.0
//!
//! [energy]                  # sweep energies: grid (start/step/end) or list = [...]
//! start = 0.1
//! step = 0.1
//! end = 1.6
//!
//! [quadrature]              # optional; potential-matrix quadrature target
//! tol = 1e-10
//!
//! [oracle]                  # optional; independent integration alongside each row
//! enabled = true
//! tol = 1e-9
//!
//! [output]                  # optional; basename for exported files
//! stem = "linear-step"
//! ```
//!
//! Every named family carries stock defaults for all sections except
//! `[profile]`, so a minimal document is just a family name. The `sampled`
//! family has no stock geometry and requires `[setup]`, `[basis]`, `[slopes]`,
//! and `[energy]` explicitly.
//!
//! Validation is fail-fast: the first violated field is named in the error
//! (`energy.step: must be positive, got 0`), unknown keys anywhere are
//! rejected, and every precondition of the underlying solver — open channels
//! at every swept energy included — is checked before any solve starts.

use serde::Deserialize;
use std::fmt;
use vrm_core::basis::kappa_grid;
use vrm_core::{BasisSet, PotentialProfile, QuadratureSpec, ScatteringSetup};

/// A validation failure, tagged with the configuration field that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Dotted path of the offending field (`energy.step`), or `document` for
    /// syntax/unknown-key errors reported by the TOML parser itself.
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { field: field.into(), message: message.into() }
}

/// A fully validated run: every solver precondition has already been checked,
/// so executing the sweep can only fail inside the numerics themselves.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Kebab-case family id, used for display and default output naming.
    pub family: String,
    pub profile: PotentialProfile,
    pub a: f64,
    pub b: f64,
    pub v1: f64,
    pub v3: f64,
    pub basis: BasisSet,
    pub lambda_b: f64,
    pub lambda_b_tilde: f64,
    /// Strictly ascending sweep energies, all with both channels open.
    pub energies: Vec<f64>,
    pub quad: QuadratureSpec,
    pub oracle: bool,
    pub oracle_tol: f64,
    /// Basename for exported files (`<stem>.csv`, `<stem>_T.dat`, …).
    pub stem: String,
}

impl RunConfig {
    /// Scattering setup at one sweep energy.
    pub fn setup_for(&self, e: f64) -> vrm_core::Result<ScatteringSetup> {
        ScatteringSetup::new(self.a, self.b, self.v1, self.v3, e)
    }
}

// ---------------------------------------------------------------------------
// Raw document shape. Everything is optional except the family; defaults are
// filled per family during validation. `deny_unknown_fields` turns typos into
// parse errors with line numbers instead of silently ignored keys.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    profile: ProfileSec,
    setup: Option<SetupSec>,
    basis: Option<BasisSec>,
    slopes: Option<SlopesSec>,
    energy: Option<EnergySec>,
    quadrature: Option<QuadSec>,
    oracle: Option<OracleSec>,
    output: Option<OutputSec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSec {
    family: String,
    v0: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    x0: Option<f64>,
    knots: Option<Vec<(f64, f64)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetupSec {
    a: Option<f64>,
    b: Option<f64>,
    v1: Option<OuterLevel>,
    v3: Option<OuterLevel>,
}

/// Outer constant: an explicit number, or a keyword asking for the barrier
/// profile evaluated at the matching boundary.
#[derive(Deserialize)]
#[serde(untagged)]
enum OuterLevel {
    Explicit(f64),
    Keyword(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisSec {
    start: Option<f64>,
    step: Option<f64>,
    end: Option<f64>,
    kappas: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlopesSec {
    lambda_b: Option<f64>,
    lambda_b_tilde: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergySec {
    start: Option<f64>,
    step: Option<f64>,
    end: Option<f64>,
    list: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadSec {
    tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleSec {
    enabled: Option<bool>,
    tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSec {
    stem: Option<String>,
}

// ---------------------------------------------------------------------------
// Stock defaults per family. Windows, slope pairs, and grids mirror the stock
// catalog documents in data/catalog/, which spell the same values out with
// comments; keeping them here as well makes a bare `family = "..."` document
// runnable.
// ---------------------------------------------------------------------------

enum BasisDefault {
    Grid(f64, f64, f64),
    List(&'static [f64]),
}

struct Stock {
    window: (f64, f64),
    /// Whether V₁/V₃ default to the profile evaluated at a/b instead of zero.
    outer_from_profile: (bool, bool),
    basis: BasisDefault,
    slopes: (f64, f64),
    energy: (f64, f64, f64),
}

/// κ values used for the stock parabolic sweep: 0.1 + 0.4·i with every third
/// step shortened, covering [0.1, 6.0] with 13 functions.
const PARABOLIC_KAPPAS: &[f64] = &[
    0.1, 0.5, 0.9, 1.3, 2.0, 2.4, 3.0, 3.4, 4.0, 4.4, 5.0, 5.4, 6.0,
];

fn stock(family: &str) -> Option<Stock> {
    let s = match family {
        "linear-step" => Stock {
            window: (1.0, 3.0),
            outer_from_profile: (false, false),
            basis: BasisDefault::Grid(0.1, 0.1, 6.0),
            slopes: (1.0, 4.0),
            energy: (0.1, 0.1, 1.6),
        },
        "exponential-step" => Stock {
            window: (1.0, 8.0),
            outer_from_profile: (false, false),
            basis: BasisDefault::Grid(0.1, 0.1, 6.0),
            slopes: (2.0, 8.0),
            energy: (0.05, 0.05, 0.7),
        },
        "parabolic" => Stock {
            window: (1.0, 3.0),
            outer_from_profile: (false, false),
            basis: BasisDefault::List(PARABOLIC_KAPPAS),
            slopes: (2.0, 3.0),
            energy: (0.05, 0.05, 0.6),
        },
        "bell-shaped" => Stock {
            window: (1.0, 9.0),
            outer_from_profile: (false, false),
            basis: BasisDefault::Grid(0.1, 0.2, 3.0),
            slopes: (1.0, 9.0),
            energy: (0.5, 0.25, 4.0),
        },
        // The asymmetric barrier tends to different constants on each side, so
        // the outer levels default to the profile's own boundary values.
        "eckart" => Stock {
            window: (2.0, 13.0),
            outer_from_profile: (true, true),
            basis: BasisDefault::Grid(0.001, 0.2, 3.0),
            slopes: (2.0, 13.0),
            energy: (0.7, 0.15, 3.55),
        },
        _ => return None,
    };
    Some(s)
}

/// Default profile parameters per family, applied field-wise when `[profile]`
/// omits them.
fn default_param(family: &str, param: &str) -> Option<f64> {
    let v = match (family, param) {
        ("linear-step", "v0") => 0.5,
        ("linear-step", "b") => 3.0,
        ("exponential-step", "v0") => 0.5,
        ("exponential-step", "a") => 1.0,
        ("parabolic", "v0") => 0.5,
        ("parabolic", "b") => 1.0,
        ("parabolic", "x0") => 2.0,
        ("bell-shaped", "v0") => 2.0,
        ("bell-shaped", "x0") => 5.0,
        ("eckart", "a") => 1.0,
        ("eckart", "b") => 8.0,
        ("eckart", "x0") => 8.0,
        _ => return None,
    };
    Some(v)
}

const FAMILIES: &[&str] = &[
    "linear-step",
    "exponential-step",
    "parabolic",
    "bell-shaped",
    "eckart",
    "sampled",
];

/// Stock catalog documents, embedded so the binary is self-contained. These are
/// the canonical sweep definitions the `table` and `check` subcommands run.
const CATALOG: &[(&str, &str)] = &[
    ("linear-step", include_str!("../data/catalog/linear-step.toml")),
    ("exponential-step", include_str!("../data/catalog/exponential-step.toml")),
    ("parabolic", include_str!("../data/catalog/parabolic.toml")),
    ("bell-shaped", include_str!("../data/catalog/bell-shaped.toml")),
    ("eckart", include_str!("../data/catalog/eckart.toml")),
];

/// The embedded stock document for a family, if one exists.
pub fn catalog_document(family: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(f, _)| *f == family).map(|(_, d)| *d)
}

/// Families with an embedded stock document, in catalog order.
pub fn catalog_families() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(f, _)| *f)
}

/// Parse and validate the stock document for a family. Panics only if an
/// embedded catalog file is broken, which the test suite rules out.
pub fn stock_config(family: &str) -> RunConfig {
    let doc = catalog_document(family)
        .unwrap_or_else(|| panic!("no stock catalog document for family {family}"));
    parse_config(doc).unwrap_or_else(|e| panic!("stock {family} document invalid: {e}"))
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Parse a configuration document and check every solver precondition.
///
/// Errors name the first violated field in document order: profile, setup,
/// basis, slopes, energy, quadrature, oracle, output.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: Doc = toml::from_str(text).map_err(|e| {
        // The TOML error already carries line/column and the offending key.
        err("document", e.to_string().trim().replace('\n', " "))
    })?;

    let family = doc.profile.family.clone();
    if !FAMILIES.contains(&family.as_str()) {
        return Err(err(
            "profile.family",
            format!("unknown family \"{family}\" (expected one of {})", FAMILIES.join(", ")),
        ));
    }

    let profile = build_profile(&family, &doc.profile)?;
    profile.validate().map_err(|e| err("profile", e.to_string()))?;

    let defaults = stock(&family);

    // Window and outer levels.
    let setup_sec = doc.setup.as_ref();
    let a = resolve_scalar(setup_sec.and_then(|s| s.a), defaults.as_ref().map(|d| d.window.0))
        .ok_or_else(|| err("setup.a", format!("required for family \"{family}\"")))?;
    let b = resolve_scalar(setup_sec.and_then(|s| s.b), defaults.as_ref().map(|d| d.window.1))
        .ok_or_else(|| err("setup.b", format!("required for family \"{family}\"")))?;
    for (v, f) in [(a, "setup.a"), (b, "setup.b")] {
        if !v.is_finite() {
            return Err(err(f, format!("must be finite, got {v}")));
        }
    }
    if !(a < b) {
        return Err(err("setup", format!("window needs a < b, got [{a}, {b}]")));
    }
    let v1 = resolve_outer(
        setup_sec.and_then(|s| s.v1.as_ref()),
        defaults.as_ref().map(|d| d.outer_from_profile.0),
        &profile,
        a,
        "setup.v1",
        "evaluate-at-a",
    )?;
    let v3 = resolve_outer(
        setup_sec.and_then(|s| s.v3.as_ref()),
        defaults.as_ref().map(|d| d.outer_from_profile.1),
        &profile,
        b,
        "setup.v3",
        "evaluate-at-b",
    )?;

    // Basis.
    let kappas = resolve_basis(doc.basis.as_ref(), defaults.as_ref(), &family)?;
    let basis = BasisSet::new(kappas, a, b).map_err(|e| err("basis", e.to_string()))?;

    // Boundary slopes.
    let slopes_sec = doc.slopes.as_ref();
    let lambda_b = resolve_scalar(
        slopes_sec.and_then(|s| s.lambda_b),
        defaults.as_ref().map(|d| d.slopes.0),
    )
    .ok_or_else(|| err("slopes.lambda_b", format!("required for family \"{family}\"")))?;
    let lambda_b_tilde = resolve_scalar(
        slopes_sec.and_then(|s| s.lambda_b_tilde),
        defaults.as_ref().map(|d| d.slopes.1),
    )
    .ok_or_else(|| err("slopes.lambda_b_tilde", format!("required for family \"{family}\"")))?;
    for (v, f) in [(lambda_b, "slopes.lambda_b"), (lambda_b_tilde, "slopes.lambda_b_tilde")] {
        if !v.is_finite() {
            return Err(err(f, format!("must be finite, got {v}")));
        }
    }
    if lambda_b == lambda_b_tilde {
        return Err(err("slopes", "lambda_b and lambda_b_tilde must differ"));
    }

    // Energies, each with both channels open.
    let energies = resolve_energies(doc.energy.as_ref(), defaults.as_ref(), &family)?;
    for &e in &energies {
        ScatteringSetup::new(a, b, v1, v3, e)
            .map_err(|src| err("energy", format!("E = {e}: {src}")))?;
    }

    // Tolerances.
    let mut quad = QuadratureSpec::default();
    if let Some(q) = doc.quadrature.as_ref() {
        if let Some(tol) = q.tol {
            if !tol.is_finite() || tol <= 0.0 {
                return Err(err("quadrature.tol", format!("must be positive, got {tol}")));
            }
            quad.tol = tol;
        }
    }
    let oracle_sec = doc.oracle.as_ref();
    let oracle = oracle_sec.and_then(|o| o.enabled).unwrap_or(false);
    let oracle_tol = oracle_sec.and_then(|o| o.tol).unwrap_or(1e-9);
    if !oracle_tol.is_finite() || oracle_tol < 1e-12 {
        return Err(err(
            "oracle.tol",
            format!("reference integration supports tol >= 1e-12, got {oracle_tol}"),
        ));
    }

    // Output naming.
    let stem = doc
        .output
        .and_then(|o| o.stem)
        .unwrap_or_else(|| family.clone());
    if stem.is_empty() || stem.contains(['/', '\\']) {
        return Err(err(
            "output.stem",
            format!("must be a non-empty bare name without path separators, got \"{stem}\""),
        ));
    }

    Ok(RunConfig {
        family,
        profile,
        a,
        b,
        v1,
        v3,
        basis,
        lambda_b,
        lambda_b_tilde,
        energies,
        quad,
        oracle,
        oracle_tol,
        stem,
    })
}

fn resolve_scalar(given: Option<f64>, fallback: Option<f64>) -> Option<f64> {
    given.or(fallback)
}

fn build_profile(family: &str, sec: &ProfileSec) -> Result<PotentialProfile, ConfigError> {
    // Reject parameters foreign to the family before touching the accepted ones,
    // so a misplaced key is named rather than silently unused.
    let accepted: &[&str] = match family {
        "linear-step" => &["v0", "b"],
        "exponential-step" => &["v0", "a"],
        "parabolic" => &["v0", "b", "x0"],
        "bell-shaped" => &["v0", "x0"],
        "eckart" => &["a", "b", "x0"],
        "sampled" => &["knots"],
        _ => unreachable!("family checked by caller"),
    };
    let given: &[(&str, bool)] = &[
        ("v0", sec.v0.is_some()),
        ("a", sec.a.is_some()),
        ("b", sec.b.is_some()),
        ("x0", sec.x0.is_some()),
        ("knots", sec.knots.is_some()),
    ];
    for (name, present) in given {
        if *present && !accepted.contains(name) {
            return Err(err(
                &format!("profile.{name}"),
                format!("not a parameter of family \"{family}\""),
            ));
        }
    }

    let get = |given: Option<f64>, name: &str| -> Result<f64, ConfigError> {
        given
            .or_else(|| default_param(family, name))
            .ok_or_else(|| err(&format!("profile.{name}"), format!("required for family \"{family}\"")))
    };

    let profile = match family {
        "linear-step" => PotentialProfile::LinearStep { v0: get(sec.v0, "v0")?, b: get(sec.b, "b")? },
        "exponential-step" => {
            PotentialProfile::ExponentialStep { v0: get(sec.v0, "v0")?, a: get(sec.a, "a")? }
        }
        "parabolic" => PotentialProfile::Parabolic {
            v0: get(sec.v0, "v0")?,
            b: get(sec.b, "b")?,
            x0: get(sec.x0, "x0")?,
        },
        "bell-shaped" => {
            PotentialProfile::BellShaped { v0: get(sec.v0, "v0")?, x0: get(sec.x0, "x0")? }
        }
        "eckart" => PotentialProfile::Eckart {
            a: get(sec.a, "a")?,
            b: get(sec.b, "b")?,
            x0: get(sec.x0, "x0")?,
        },
        "sampled" => {
            let knots = sec
                .knots
                .clone()
                .ok_or_else(|| err("profile.knots", "required for family \"sampled\""))?;
            PotentialProfile::Sampled { knots }
        }
        _ => unreachable!("family checked by caller"),
    };
    Ok(profile)
}

fn resolve_outer(
    given: Option<&OuterLevel>,
    default_from_profile: Option<bool>,
    profile: &PotentialProfile,
    x: f64,
    field: &str,
    keyword: &str,
) -> Result<f64, ConfigError> {
    let eval_here = || {
        profile
            .evaluate(x)
            .map_err(|e| err(field, format!("{keyword} failed: {e}")))
    };
    match given {
        Some(OuterLevel::Explicit(v)) => {
            if !v.is_finite() {
                return Err(err(field, format!("must be finite, got {v}")));
            }
            Ok(*v)
        }
        Some(OuterLevel::Keyword(k)) if k == keyword => eval_here(),
        Some(OuterLevel::Keyword(k)) => Err(err(
            field,
            format!("expected a number or \"{keyword}\", got \"{k}\""),
        )),
        None => match default_from_profile {
            Some(true) => eval_here(),
            Some(false) => Ok(0.0),
            None => Ok(0.0),
        },
    }
}

/// Check the start/step/end triple for a named grid, then expand it with the
/// same inclusive arithmetic the κ grids use, so identical bounds always
/// produce bit-identical nodes.
fn expand_grid(
    start: Option<f64>,
    step: Option<f64>,
    end: Option<f64>,
    section: &str,
) -> Result<Vec<f64>, ConfigError> {
    let field = |name: &str| format!("{section}.{name}");
    let start = start.ok_or_else(|| err(&field("start"), "required alongside step/end"))?;
    let step = step.ok_or_else(|| err(&field("step"), "required alongside start/end"))?;
    let end = end.ok_or_else(|| err(&field("end"), "required alongside start/step"))?;
    for (v, name) in [(start, "start"), (step, "step"), (end, "end")] {
        if !v.is_finite() {
            return Err(err(&field(name), format!("must be finite, got {v}")));
        }
    }
    if step <= 0.0 {
        return Err(err(&field("step"), format!("must be positive, got {step}")));
    }
    if end < start {
        return Err(err(&field("end"), format!("lies before start {start}")));
    }
    kappa_grid(start, step, end).map_err(|e| err(section, e.to_string()))
}

fn resolve_basis(
    sec: Option<&BasisSec>,
    defaults: Option<&Stock>,
    family: &str,
) -> Result<Vec<f64>, ConfigError> {
    match sec {
        Some(s) => {
            let grid_given = s.start.is_some() || s.step.is_some() || s.end.is_some();
            match (&s.kappas, grid_given) {
                (Some(_), true) => {
                    Err(err("basis", "give either start/step/end or kappas, not both"))
                }
                (Some(list), false) => {
                    if list.is_empty() {
                        return Err(err("basis.kappas", "must not be empty"));
                    }
                    Ok(list.clone())
                }
                (None, true) => expand_grid(s.start, s.step, s.end, "basis"),
                (None, false) => stock_basis(defaults, family),
            }
        }
        None => stock_basis(defaults, family),
    }
}

fn stock_basis(defaults: Option<&Stock>, family: &str) -> Result<Vec<f64>, ConfigError> {
    match defaults.map(|d| &d.basis) {
        Some(BasisDefault::Grid(s, st, e)) => expand_grid(Some(*s), Some(*st), Some(*e), "basis"),
        Some(BasisDefault::List(list)) => Ok(list.to_vec()),
        None => Err(err("basis", format!("required for family \"{family}\""))),
    }
}

fn resolve_energies(
    sec: Option<&EnergySec>,
    defaults: Option<&Stock>,
    family: &str,
) -> Result<Vec<f64>, ConfigError> {
    let energies = match sec {
        Some(s) => {
            let grid_given = s.start.is_some() || s.step.is_some() || s.end.is_some();
            match (&s.list, grid_given) {
                (Some(_), true) => {
                    return Err(err("energy", "give either start/step/end or list, not both"))
                }
                (Some(list), false) => {
                    if list.is_empty() {
                        return Err(err("energy.list", "must not be empty"));
                    }
                    for w in list.windows(2) {
                        if !(w[0] < w[1]) {
                            return Err(err(
                                "energy.list",
                                format!("must be strictly ascending, got {} then {}", w[0], w[1]),
                            ));
                        }
                    }
                    list.clone()
                }
                (None, true) => expand_grid(s.start, s.step, s.end, "energy")?,
                (None, false) => stock_energies(defaults, family)?,
            }
        }
        None => stock_energies(defaults, family)?,
    };
    for &e in &energies {
        if !e.is_finite() {
            return Err(err("energy", format!("energies must be finite, got {e}")));
        }
    }
    Ok(energies)
}

fn stock_energies(defaults: Option<&Stock>, family: &str) -> Result<Vec<f64>, ConfigError> {
    match defaults.map(|d| d.energy) {
        Some((s, st, e)) => expand_grid(Some(s), Some(st), Some(e), "energy"),
        None => Err(err("energy", format!("required for family \"{family}\""))),
    }
}
