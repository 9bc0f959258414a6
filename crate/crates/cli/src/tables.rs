//! Reproduction of the embedded reference tables and figure claims.
//!
//! The published values live in `data/reference.toml`, compiled into the
//! binary; this module runs the canonical sweeps behind each table and emits a
//! per-cell comparison report. Every report line quotes the table id and the
//! column label it checks, so a failure can be traced straight back to the
//! embedded data file.

use crate::config::stock_config;
use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use std::fmt::Write as _;
use std::sync::OnceLock;
use vrm_core::oracles::integrate_reference;
use vrm_core::solver::solve_tunneling;
use vrm_core::{BasisSet, PotentialProfile, QuadratureSpec, ScatteringSetup};

/// |ΔT| gate between the variational and reference-integrated coefficients in
/// the width-comparison property check.
pub const TABLE1_PAIR_TOL: f64 = 5e-4;
/// |ΔT| gate for reproduced VRM cells of the exponential-step table.
pub const TABLE2_VRM_TOL: f64 = 5e-3;
/// |ΔT| gate between the reference integration and the analytic column of the
/// exponential-step table.
pub const TABLE2_ANA_TOL: f64 = 1.5e-3;
/// |ΔT| gate for reproduced VRM cells of the parabolic table.
pub const TABLE3_VRM_TOL: f64 = 5e-3;
/// |ΔT| gate between the reference integration and the transfer-matrix column
/// of the parabolic table.
pub const TABLE3_TM_TOL: f64 = 2e-3;

/// Internal tolerance for reference integrations backing table cells and
/// bisections; far below every comparison gate above.
pub(crate) const ORACLE_TOL: f64 = 1e-10;

pub const TABLE_IDS: &[&str] = &["table1", "table2", "table3", "figure-claims"];

// ---------------------------------------------------------------------------
// Embedded reference data
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefData {
    pub table1: RefTable<Table1Row>,
    pub table2: RefTable<Table2Row>,
    pub table3: RefTable<Table3Row>,
    pub figure_claims: RefTable<ClaimRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefTable<R> {
    pub title: String,
    pub provenance: String,
    pub rows: Vec<R>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Row {
    pub b: f64,
    pub vrm: f64,
    pub ana: f64,
    pub tm: f64,
    pub mat: f64,
    pub wkb: f64,
    pub mwkb: f64,
    pub maf: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table2Row {
    pub e_over_v0: f64,
    pub vrm: f64,
    pub ana: f64,
    pub tm: f64,
    pub mat: f64,
    pub wkb: f64,
    pub mwkb: f64,
    pub maf: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table3Row {
    pub e_over_v0: f64,
    pub vrm: f64,
    pub tm: f64,
    pub mat: f64,
    pub wkb: f64,
    pub maf: f64,
    pub mmaf: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimRow {
    pub id: String,
    pub family: String,
    /// One of `crossing`, `oracle-t-at`, `vrm-t-at`.
    pub check: String,
    /// Overrides the stock scattering window when present.
    pub window: Option<[f64; 2]>,
    /// Energy bracket for `crossing` bisection.
    pub bracket: Option<[f64; 2]>,
    /// Evaluation energy for the point checks.
    pub e: Option<f64>,
    pub value: f64,
    pub tol: f64,
    pub provenance: String,
}

/// The embedded reference data, parsed once.
pub fn reference() -> &'static RefData {
    static DATA: OnceLock<RefData> = OnceLock::new();
    DATA.get_or_init(|| {
        toml::from_str(include_str!("../data/reference.toml"))
            .expect("embedded reference data is valid; guarded by the test suite")
    })
}

// ---------------------------------------------------------------------------
// Comparison report
// ---------------------------------------------------------------------------

/// One compared cell: a number computed here against an embedded reference
/// value, with the tolerance that decides pass/fail.
#[derive(Debug, Clone)]
pub struct CellCheck {
    pub table: String,
    /// Row identification as printed ("B = 6, E = 2.1784").
    pub row: String,
    /// Column label exactly as the embedded table names it ("VRM", "ANA", …).
    pub column: String,
    pub computed: f64,
    pub reference: f64,
    pub tol: f64,
}

impl CellCheck {
    pub fn delta(&self) -> f64 {
        (self.computed - self.reference).abs()
    }

    pub fn pass(&self) -> bool {
        self.delta() <= self.tol
    }

    pub fn line(&self) -> String {
        format!(
            "{} [{}] column {}: computed {:.6}, reference {:.4}, |Δ| = {:.2e} (tol {:.1e})  {}",
            self.table,
            self.row,
            self.column,
            self.computed,
            self.reference,
            self.delta(),
            self.tol,
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

/// A non-cell check (trend, ordering) attached to a table report.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub table: String,
    pub label: String,
    pub detail: String,
    pub pass: bool,
}

impl PropertyCheck {
    pub fn line(&self) -> String {
        format!(
            "{} property \"{}\": {}  {}",
            self.table,
            self.label,
            self.detail,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug)]
pub struct TableReport {
    pub id: String,
    pub title: String,
    pub provenance: String,
    pub cells: Vec<CellCheck>,
    pub properties: Vec<PropertyCheck>,
    pub notes: Vec<String>,
}

impl TableReport {
    fn new(id: &str, title: &str, provenance: &str) -> Self {
        TableReport {
            id: id.into(),
            title: title.into(),
            provenance: provenance.into(),
            cells: Vec::new(),
            properties: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(CellCheck::pass) && self.properties.iter().all(|p| p.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.id, self.title);
        let _ = writeln!(out, "  source: {}", self.provenance);
        for cell in &self.cells {
            let _ = writeln!(out, "  {}", cell.line());
        }
        for prop in &self.properties {
            let _ = writeln!(out, "  {}", prop.line());
        }
        for note in &self.notes {
            let _ = writeln!(out, "  note: {note}");
        }
        let _ = writeln!(
            out,
            "  => {}",
            if self.all_pass() { "ALL CELLS PASS" } else { "FAILURES PRESENT" }
        );
        out
    }
}

/// Run the canonical computation behind one embedded table and compare cells.
pub fn reproduce_table(id: &str) -> Result<TableReport> {
    match id {
        "table1" => table1_report(),
        "table2" => table2_report(),
        "table3" => table3_report(),
        "figure-claims" => claims_report(),
        other => bail!("unknown table id \"{other}\" (expected one of {})", TABLE_IDS.join(", ")),
    }
}

// ---------------------------------------------------------------------------
// Shared numeric helpers
// ---------------------------------------------------------------------------

pub(crate) fn oracle_t(
    profile: &PotentialProfile,
    a: f64,
    b: f64,
    v1: f64,
    v3: f64,
    e: f64,
) -> Result<f64> {
    let setup = ScatteringSetup::new(a, b, v1, v3, e)?;
    Ok(integrate_reference(profile, &setup, ORACLE_TOL)?.0)
}

/// Find the energy in `[lo, hi]` where the reference-integrated transmission
/// equals `target`. Relies on T increasing with E, which holds for every
/// barrier treated here; a bracket that does not straddle the target is
/// reported as an error rather than forced.
fn bisect_oracle_t(
    profile: &PotentialProfile,
    a: f64,
    b: f64,
    v1: f64,
    v3: f64,
    bracket: (f64, f64),
    target: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let f = |e: f64| -> Result<f64> { Ok(oracle_t(profile, a, b, v1, v3, e)? - target) };
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        bail!(
            "bracket [{lo}, {hi}] does not straddle T = {target}: T(lo) = {:.6}, T(hi) = {:.6}",
            f_lo + target,
            f_hi + target
        );
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn vrm_t(
    profile: &PotentialProfile,
    setup: &ScatteringSetup,
    basis: &BasisSet,
    lambda_b: f64,
    lambda_b_tilde: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(solve_tunneling(profile, setup, basis, lambda_b, lambda_b_tilde, quad)?.t)
}

// ---------------------------------------------------------------------------
// table1: linear ramp at five widths, property mode
// ---------------------------------------------------------------------------

fn table1_report() -> Result<TableReport> {
    let data = &reference().table1;
    let mut report = TableReport::new("table1", &data.title, &data.provenance);
    report.notes.push(
        "the energy behind these cells is unpublished, so absolute reproduction is not \
         claimed; cells are checked in property mode instead"
            .into(),
    );

    // Geometry per width: the stock linear-ramp document pins the left edge at
    // a = 1 and ends the window where the ramp reaches zero, so width B means
    // profile parameter b = B with window [1, B]. The stock document records
    // this inference alongside its own b = 3 instance.
    let stock = stock_config("linear-step");
    let v0 = match stock.profile {
        PotentialProfile::LinearStep { v0, .. } => v0,
        _ => unreachable!("stock linear-step document carries a linear-step profile"),
    };
    let kappas = stock.basis.kappas().to_vec();
    let a = stock.a;
    let geometry = |width: f64| -> Result<(PotentialProfile, BasisSet)> {
        let profile = PotentialProfile::LinearStep { v0, b: width };
        let basis = BasisSet::new(kappas.clone(), a, width)?;
        Ok((profile, basis))
    };

    // Calibrate E*: the energy at which the reference integration reproduces
    // the narrowest width's analytic cell. All fixed-energy checks run there.
    let row0 = &data.rows[0];
    let (profile0, _) = geometry(row0.b)?;
    let e_star = bisect_oracle_t(&profile0, a, row0.b, 0.0, 0.0, (0.3, 1.2), row0.ana)
        .context("calibrating the shared energy against the first ANA cell")?;
    report.notes.push(format!(
        "calibrated E* = {e_star:.6}: reference integration matches the B = {} ANA cell {:.4}",
        row0.b, row0.ana
    ));

    let mut fixed_e: Vec<(f64, f64)> = Vec::new();
    for (i, row) in data.rows.iter().enumerate() {
        let (profile, basis) = geometry(row.b)?;

        // Variational vs reference integration at the shared energy.
        let t_ref_star = oracle_t(&profile, a, row.b, 0.0, 0.0, e_star)?;
        let setup_star = ScatteringSetup::new(a, row.b, 0.0, 0.0, e_star)?;
        let t_vrm_star = vrm_t(
            &profile,
            &setup_star,
            &basis,
            stock.lambda_b,
            stock.lambda_b_tilde,
            &stock.quad,
        )?;
        report.cells.push(CellCheck {
            table: "table1".into(),
            row: format!("B = {}, E* = {:.4}", row.b, e_star),
            column: "VRM vs oracle".into(),
            computed: t_vrm_star,
            reference: t_ref_star,
            tol: TABLE1_PAIR_TOL,
        });
        fixed_e.push((row.b, t_ref_star));

        // Per-row calibrated energy: where the reference integration lands on
        // this row's ANA cell. Skipped for the first row, where it would just
        // repeat E*. The turning-point geometry V(x_t) = E shifts by 0.5 per
        // unit of width, which centres the bracket.
        if i > 0 {
            let guess = e_star + 0.5 * (row.b - row0.b);
            let e_row = bisect_oracle_t(
                &profile,
                a,
                row.b,
                0.0,
                0.0,
                (guess - 0.8, guess + 0.8),
                row.ana,
            )
            .with_context(|| format!("calibrating the B = {} row energy", row.b))?;
            let t_ref_row = oracle_t(&profile, a, row.b, 0.0, 0.0, e_row)?;
            let setup_row = ScatteringSetup::new(a, row.b, 0.0, 0.0, e_row)?;
            let t_vrm_row = vrm_t(
                &profile,
                &setup_row,
                &basis,
                stock.lambda_b,
                stock.lambda_b_tilde,
                &stock.quad,
            )?;
            report.cells.push(CellCheck {
                table: "table1".into(),
                row: format!("B = {}, E = {:.4} (matches ANA {:.4})", row.b, e_row, row.ana),
                column: "VRM vs oracle".into(),
                computed: t_vrm_row,
                reference: t_ref_row,
                tol: TABLE1_PAIR_TOL,
            });
            report.notes.push(format!(
                "B = {}: reference integration reaches the ANA cell {:.4} at E = {:.6}",
                row.b, row.ana, e_row
            ));
        }
    }

    // The published trend: the accurate columns decrease monotonically with
    // width. At a fixed energy the effect is far stronger — every extra unit
    // of width raises and widens the barrier — so strict decrease must hold.
    let decreasing = fixed_e.windows(2).all(|w| w[0].1 > w[1].1);
    let sequence = fixed_e
        .iter()
        .map(|(b, t)| format!("T(B={b}) = {t:.3e}"))
        .collect::<Vec<_>>()
        .join(" > ");
    report.properties.push(PropertyCheck {
        table: "table1".into(),
        label: format!("oracle T strictly decreasing in B at fixed E* = {e_star:.4}"),
        detail: sequence,
        pass: decreasing,
    });

    Ok(report)
}

// ---------------------------------------------------------------------------
// table2 / table3: absolute cell reproduction
// ---------------------------------------------------------------------------

fn table2_report() -> Result<TableReport> {
    let data = &reference().table2;
    let mut report = TableReport::new("table2", &data.title, &data.provenance);
    let cfg = stock_config("exponential-step");
    let v0 = cfg.profile.peak(cfg.a, cfg.b)?.1;
    report.notes.push(format!(
        "stock exponential-step geometry; row energies are E = (E/V0)·{v0}"
    ));
    report.notes.push(
        "ANA cells are compared against this crate's independent reference integration".into(),
    );
    for row in &data.rows {
        let e = row.e_over_v0 * v0;
        let setup = cfg.setup_for(e)?;
        let t_vrm =
            vrm_t(&cfg.profile, &setup, &cfg.basis, cfg.lambda_b, cfg.lambda_b_tilde, &cfg.quad)?;
        report.cells.push(CellCheck {
            table: "table2".into(),
            row: format!("E/V0 = {}", row.e_over_v0),
            column: "VRM".into(),
            computed: t_vrm,
            reference: row.vrm,
            tol: TABLE2_VRM_TOL,
        });
        let t_ref = oracle_t(&cfg.profile, cfg.a, cfg.b, cfg.v1, cfg.v3, e)?;
        report.cells.push(CellCheck {
            table: "table2".into(),
            row: format!("E/V0 = {}", row.e_over_v0),
            column: "ANA".into(),
            computed: t_ref,
            reference: row.ana,
            tol: TABLE2_ANA_TOL,
        });
    }
    Ok(report)
}

fn table3_report() -> Result<TableReport> {
    let data = &reference().table3;
    let mut report = TableReport::new("table3", &data.title, &data.provenance);
    let cfg = stock_config("parabolic");
    let v0 = cfg.profile.peak(cfg.a, cfg.b)?.1;
    report.notes.push(format!(
        "stock parabolic geometry; row energies are E = (E/V0)·{v0}"
    ));
    report.notes.push(
        "with no analytic column for this profile, the TM cells are compared against this \
         crate's independent reference integration"
            .into(),
    );
    for row in &data.rows {
        let e = row.e_over_v0 * v0;
        let setup = cfg.setup_for(e)?;
        let t_vrm =
            vrm_t(&cfg.profile, &setup, &cfg.basis, cfg.lambda_b, cfg.lambda_b_tilde, &cfg.quad)?;
        report.cells.push(CellCheck {
            table: "table3".into(),
            row: format!("E/V0 = {}", row.e_over_v0),
            column: "VRM".into(),
            computed: t_vrm,
            reference: row.vrm,
            tol: TABLE3_VRM_TOL,
        });
        let t_ref = oracle_t(&cfg.profile, cfg.a, cfg.b, cfg.v1, cfg.v3, e)?;
        report.cells.push(CellCheck {
            table: "table3".into(),
            row: format!("E/V0 = {}", row.e_over_v0),
            column: "TM".into(),
            computed: t_ref,
            reference: row.tm,
            tol: TABLE3_TM_TOL,
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// figure-claims: headline curve features
// ---------------------------------------------------------------------------

fn claims_report() -> Result<TableReport> {
    let data = &reference().figure_claims;
    let ids: Vec<&str> = data.rows.iter().map(|r| r.id.as_str()).collect();
    claims_subset(&ids)
}

/// Run a chosen subset of the figure claims, by id.
pub fn claims_subset(ids: &[&str]) -> Result<TableReport> {
    let data = &reference().figure_claims;
    let mut report = TableReport::new("figure-claims", &data.title, &data.provenance);
    for id in ids {
        let row = data
            .rows
            .iter()
            .find(|r| r.id == *id)
            .ok_or_else(|| anyhow!("no embedded claim with id \"{id}\""))?;
        let cell = run_claim(row).with_context(|| format!("claim \"{}\"", row.id))?;
        report.notes.push(format!("{}: {}", row.id, row.provenance));
        report.cells.push(cell);
    }
    Ok(report)
}

fn run_claim(row: &ClaimRow) -> Result<CellCheck> {
    let cfg = stock_config(&row.family);
    let (a, b) = match row.window {
        Some([wa, wb]) => (wa, wb),
        None => (cfg.a, cfg.b),
    };
    let cell = |column: &str, computed: f64| CellCheck {
        table: "figure-claims".into(),
        row: row.id.clone(),
        column: column.into(),
        computed,
        reference: row.value,
        tol: row.tol,
    };
    match row.check.as_str() {
        "crossing" => {
            let bracket = row
                .bracket
                .ok_or_else(|| anyhow!("crossing checks need a bracket"))?;
            let e_cross = bisect_oracle_t(
                &cfg.profile,
                a,
                b,
                cfg.v1,
                cfg.v3,
                (bracket[0], bracket[1]),
                0.5,
            )?;
            Ok(cell("crossing energy (R = T)", e_cross))
        }
        "oracle-t-at" => {
            let e = row.e.ok_or_else(|| anyhow!("point checks need an energy"))?;
            Ok(cell("T (reference integration)", oracle_t(&cfg.profile, a, b, cfg.v1, cfg.v3, e)?))
        }
        "vrm-t-at" => {
            if row.window.is_some() {
                // The stock basis is tied to the stock window; no claim needs this.
                bail!("window overrides are only supported for reference-integration checks");
            }
            let e = row.e.ok_or_else(|| anyhow!("point checks need an energy"))?;
            let setup = cfg.setup_for(e)?;
            let t = vrm_t(&cfg.profile, &setup, &cfg.basis, cfg.lambda_b, cfg.lambda_b_tilde, &cfg.quad)?;
            Ok(cell("T (variational)", t))
        }
        other => bail!("unknown check kind \"{other}\" in embedded reference data"),
    }
}
