//! The acceptance suite: nine numbered criteria covering table reproduction,
//! closed-form agreement, curve features, the energy-average diagnostic, and
//! the solver property set. The `check` subcommand and the acceptance
//! integration tests both run these, so the command line and the test suite
//! can never drift apart on what "passing" means.

use crate::config::{catalog_families, stock_config};
use crate::runner::{run_sweep, SweepRow};
use crate::tables::{claims_subset, reproduce_table, TableReport, ORACLE_TOL};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::OnceLock;
use vrm_core::basis::assemble_all;
use vrm_core::linalg::Matrix;
use vrm_core::oracles::{
    bell_transmission_exact, eckart_reflection_exact, integrate_reference,
    matched_pair_transmission, SolutionPair,
};
use vrm_core::solver::{average_energy, inner_solution, solve_tunneling};
use vrm_core::{PotentialProfile, ScatteringSetup, VariationalSystem};

/// Gate for closed-form vs reference integration on windows wide enough that
/// truncation is negligible.
const CLOSED_FORM_WIDE_TOL: f64 = 1e-6;
/// Gate for the bell closed form on the stock (truncated) window.
const BELL_NARROW_TOL: f64 = 5e-3;
/// Gate for the variational sweep against the bell closed form.
const BELL_VRM_TOL: f64 = 2e-2;
/// Gate for the variational sweep against 1 − R of the asymmetric closed form.
const ECKART_TRACK_TOL: f64 = 3e-2;
/// Hard gate on |E_av/E − 1| across every stock sweep.
const EAV_HARD_GATE: f64 = 0.02;
/// Unitarity gates: reference integration and variational defaults.
const ORACLE_UNITARITY_TOL: f64 = 1e-8;
const VRM_DEFECT_TOL: f64 = 5e-3;
/// Transmission must not depend on the imposed slope pair beyond this.
const SLOPE_PAIR_TOL: f64 = 1e-3;
/// Energy average must not depend on coefficient scale beyond this.
// Cancellation in cᵀPc amplifies roundoff under a non-power-of-two rescale;
// a homogeneity bug would show at O(1), so 1e-6 still discriminates sharply.
const NORMALIZATION_TOL: f64 = 1e-6;
/// Rank-one boundary eigenvalue vs the brute-force determinant route.
const RANK_ONE_TOL: f64 = 1e-8;
/// Matched analytic pairs vs the reference integrator.
const PAIR_AGREEMENT_TOL: f64 = 1e-8;

/// Published per-profile ranges of the |E_av/E − 1| diagnostic in percent,
/// quoted alongside the stock sweeps. Informational only: the stock grids are
/// reconstructions, and band edges move with the grid. No range was published
/// for the parabolic profile.
const PUBLISHED_EAV_BANDS: &[(&str, Option<(f64, f64)>)] = &[
    ("linear-step", Some((0.03, 1.75))),
    ("exponential-step", Some((0.013, 2.1))),
    ("parabolic", None),
    ("bell-shaped", Some((0.0065, 0.694))),
    ("eckart", Some((0.078, 1.43))),
];

pub const CRITERIA_COUNT: usize = 9;

/// Outcome of one criterion: a pass/fail verdict plus the evidence lines that
/// justify it.
#[derive(Debug)]
pub struct CriterionReport {
    pub number: usize,
    pub label: &'static str,
    pub pass: bool,
    pub lines: Vec<String>,
}

impl CriterionReport {
    /// The one-line verdict: `criterion 3 (linear-ramp width table in property mode): PASS`.
    pub fn headline(&self) -> String {
        format!(
            "criterion {} ({}): {}",
            self.number,
            self.label,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Run all nine criteria in order.
pub fn run_all(workers: usize) -> Vec<CriterionReport> {
    (1..=CRITERIA_COUNT).map(|n| run_criterion(n, workers)).collect()
}

/// Run one criterion by number (1–9).
pub fn run_criterion(number: usize, workers: usize) -> CriterionReport {
    match number {
        1 => table_criterion(1, "exponential-step table cells (VRM and analytic columns)", reproduce_table("table2")),
        2 => table_criterion(2, "parabolic table cells (VRM and transfer-matrix columns)", reproduce_table("table3")),
        3 => table_criterion(3, "linear-ramp width table in property mode", reproduce_table("table1")),
        4 => bell_criterion(workers),
        5 => eckart_criterion(workers),
        6 => table_criterion(
            6,
            "R = T crossing energies",
            claims_subset(&["linear-crossing", "exponential-crossing", "parabolic-crossing"]),
        ),
        7 => table_criterion(
            7,
            "over-barrier transmission at the peak energy",
            claims_subset(&[
                "linear-over-barrier",
                "exponential-over-barrier",
                "parabolic-over-barrier",
            ]),
        ),
        8 => eav_criterion(workers),
        9 => property_criterion(workers),
        other => panic!("criterion numbers run 1..={CRITERIA_COUNT}, got {other}"),
    }
}

fn table_criterion(
    number: usize,
    label: &'static str,
    result: anyhow::Result<TableReport>,
) -> CriterionReport {
    match result {
        Ok(report) => {
            let pass = report.all_pass();
            let mut lines: Vec<String> = report.cells.iter().map(|c| c.line()).collect();
            lines.extend(report.properties.iter().map(|p| p.line()));
            lines.extend(report.notes.iter().map(|n| format!("note: {n}")));
            CriterionReport { number, label, pass, lines }
        }
        Err(e) => CriterionReport {
            number,
            label,
            pass: false,
            lines: vec![format!("execution error: {e:#}")],
        },
    }
}

// ---------------------------------------------------------------------------
// Shared stock sweeps (criteria 4, 5, 8, 9)
// ---------------------------------------------------------------------------

/// All five stock sweeps with the oracle enabled, computed once per process.
fn stock_sweeps(workers: usize) -> &'static [(String, Vec<SweepRow>)] {
    static CACHE: OnceLock<Vec<(String, Vec<SweepRow>)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        catalog_families()
            .map(|family| {
                let cfg = stock_config(family);
                (family.to_string(), run_sweep(&cfg, workers))
            })
            .collect()
    })
}

fn sweep_for<'a>(sweeps: &'a [(String, Vec<SweepRow>)], family: &str) -> &'a [SweepRow] {
    &sweeps.iter().find(|(f, _)| f == family).expect("every catalog family is swept").1
}

/// Split rows into solved results and error lines; criteria treat any errored
/// row as an automatic failure with the message preserved.
fn solved(rows: &[SweepRow]) -> (Vec<(f64, &vrm_core::TunnelingResult)>, Vec<String>) {
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for row in rows {
        match &row.result {
            Ok(res) => ok.push((row.e, res)),
            Err(msg) => errors.push(format!("E = {}: {msg}", row.e)),
        }
    }
    (ok, errors)
}

// ---------------------------------------------------------------------------
// Criterion 4: bell-shaped closed form
// ---------------------------------------------------------------------------

fn bell_criterion(workers: usize) -> CriterionReport {
    let number = 4;
    let label = "bell-shaped closed form, window truncation, and variational agreement";
    let run = || -> anyhow::Result<(bool, Vec<String>)> {
        let mut lines = Vec::new();
        let mut pass = true;
        let cfg = stock_config("bell-shaped");
        let (v0, x0) = match cfg.profile {
            PotentialProfile::BellShaped { v0, x0 } => (v0, x0),
            _ => unreachable!("stock bell-shaped document carries a bell profile"),
        };

        // Closed form vs reference integration, wide window: truncation error
        // pushed below the gate by taking x0 ± 10.
        let (wa, wb) = (x0 - 10.0, x0 + 10.0);
        let mut wide_max: f64 = 0.0;
        for &e in &cfg.energies {
            let exact = bell_transmission_exact(e, v0)?;
            let setup = ScatteringSetup::new(wa, wb, 0.0, 0.0, e)?;
            let (t, _) = integrate_reference(&cfg.profile, &setup, ORACLE_TOL)?;
            wide_max = wide_max.max((t - exact).abs());
        }
        pass &= wide_max <= CLOSED_FORM_WIDE_TOL;
        lines.push(format!(
            "closed form vs reference integration on [{wa}, {wb}]: max |ΔT| = {wide_max:.2e} \
             over {} energies (tol {CLOSED_FORM_WIDE_TOL:.0e})  {}",
            cfg.energies.len(),
            verdict(wide_max <= CLOSED_FORM_WIDE_TOL)
        ));

        // Stock (truncated) window and the variational sweep itself.
        let rows = sweep_for(stock_sweeps(workers), "bell-shaped");
        let (_, errors) = solved(rows);
        if !errors.is_empty() {
            pass = false;
            lines.extend(errors.iter().map(|e| format!("sweep error: {e}")));
        }
        let mut narrow_max: f64 = 0.0;
        let mut vrm_max: f64 = 0.0;
        for row in rows {
            let Ok(res) = &row.result else { continue };
            let exact = bell_transmission_exact(row.e, v0)?;
            let t_narrow = match row.oracle.as_ref() {
                Some(Ok((t, _))) => *t,
                _ => anyhow::bail!("stock sweep row E = {} lacks an oracle value", row.e),
            };
            narrow_max = narrow_max.max((t_narrow - exact).abs());
            vrm_max = vrm_max.max((res.t - exact).abs());
        }
        pass &= narrow_max <= BELL_NARROW_TOL && vrm_max <= BELL_VRM_TOL;
        lines.push(format!(
            "closed form vs reference integration on the stock [{}, {}] window: \
             max |ΔT| = {narrow_max:.2e} (tol {BELL_NARROW_TOL:.0e})  {}",
            cfg.a,
            cfg.b,
            verdict(narrow_max <= BELL_NARROW_TOL)
        ));
        lines.push(format!(
            "variational sweep vs closed form: max |ΔT| = {vrm_max:.2e} (tol {BELL_VRM_TOL:.0e})  {}",
            verdict(vrm_max <= BELL_VRM_TOL)
        ));

        // The headline point value at the barrier-peak energy.
        let claim = claims_subset(&["bell-peak-transmission"])?;
        pass &= claim.all_pass();
        lines.extend(claim.cells.iter().map(|c| c.line()));
        Ok((pass, lines))
    };
    finish(number, label, run())
}

// ---------------------------------------------------------------------------
// Criterion 5: asymmetric-barrier closed form
// ---------------------------------------------------------------------------

fn eckart_criterion(workers: usize) -> CriterionReport {
    let number = 5;
    let label = "asymmetric-barrier closed form and variational tracking";
    let run = || -> anyhow::Result<(bool, Vec<String>)> {
        let mut lines = Vec::new();
        let mut pass = true;
        let cfg = stock_config("eckart");
        let (pa, pb, x0) = match cfg.profile {
            PotentialProfile::Eckart { a, b, x0 } => (a, b, x0),
            _ => unreachable!("stock eckart document carries an eckart profile"),
        };

        // Closed form vs reference integration on a window wide enough that
        // both tails sit at their asymptotes.
        let (wa, wb) = (x0 - 20.0, x0 + 20.0);
        let v1 = cfg.profile.evaluate(wa)?;
        let v3 = cfg.profile.evaluate(wb)?;
        let mut wide_max: f64 = 0.0;
        let wide_energies = vrm_core::basis::kappa_grid(0.7, 0.3, 4.0)?;
        for &e in &wide_energies {
            let exact = eckart_reflection_exact(e, pa, pb)?;
            let setup = ScatteringSetup::new(wa, wb, v1, v3, e)?;
            let (_, r) = integrate_reference(&cfg.profile, &setup, ORACLE_TOL)?;
            wide_max = wide_max.max((r - exact).abs());
        }
        pass &= wide_max <= CLOSED_FORM_WIDE_TOL;
        lines.push(format!(
            "closed form vs reference integration on [{wa}, {wb}]: max |ΔR| = {wide_max:.2e} \
             over {} energies (tol {CLOSED_FORM_WIDE_TOL:.0e})  {}",
            wide_energies.len(),
            verdict(wide_max <= CLOSED_FORM_WIDE_TOL)
        ));

        // The stock variational sweep must track 1 − R of the untruncated
        // closed form even though it runs on the truncated window.
        let rows = sweep_for(stock_sweeps(workers), "eckart");
        let (results, errors) = solved(rows);
        if !errors.is_empty() {
            pass = false;
            lines.extend(errors.iter().map(|e| format!("sweep error: {e}")));
        }
        let mut track_max: f64 = 0.0;
        for (e, res) in &results {
            let exact_t = 1.0 - eckart_reflection_exact(*e, pa, pb)?;
            track_max = track_max.max((res.t - exact_t).abs());
        }
        pass &= track_max <= ECKART_TRACK_TOL;
        lines.push(format!(
            "variational sweep vs 1 − R closed form: max |ΔT| = {track_max:.2e} \
             (tol {ECKART_TRACK_TOL:.0e})  {}",
            verdict(track_max <= ECKART_TRACK_TOL)
        ));

        // Transmission saturates just above the barrier peak.
        let claim = claims_subset(&["eckart-saturation"])?;
        pass &= claim.all_pass();
        lines.extend(claim.cells.iter().map(|c| c.line()));
        Ok((pass, lines))
    };
    finish(number, label, run())
}

// ---------------------------------------------------------------------------
// Criterion 8: energy-average diagnostic
// ---------------------------------------------------------------------------

fn eav_criterion(workers: usize) -> CriterionReport {
    let number = 8;
    let label = "energy-average diagnostic within 2% on stock sweeps";
    let run = || -> anyhow::Result<(bool, Vec<String>)> {
        let mut lines = Vec::new();
        let mut pass = true;
        let sweeps = stock_sweeps(workers);
        for (family, band) in PUBLISHED_EAV_BANDS {
            let rows = sweep_for(sweeps, family);
            let (results, errors) = solved(rows);
            if !errors.is_empty() {
                pass = false;
                lines.extend(errors.iter().map(|e| format!("{family} sweep error: {e}")));
                continue;
            }
            let rels: Vec<f64> =
                results.iter().map(|(e, res)| (res.e_av - e).abs() / e).collect();
            let lo = rels.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = rels.iter().cloned().fold(0.0f64, f64::max);
            let ok = hi <= EAV_HARD_GATE;
            pass &= ok;
            lines.push(format!(
                "{family}: |E_av/E − 1| ∈ [{:.4}%, {:.4}%] over {} rows (hard gate {}%)  {}",
                lo * 100.0,
                hi * 100.0,
                rels.len(),
                EAV_HARD_GATE * 100.0,
                verdict(ok)
            ));
            match band {
                Some((blo, bhi)) => {
                    let within = hi * 100.0 <= *bhi;
                    lines.push(format!(
                        "{family}: published range {blo}%–{bhi}%: observed max {} (informational; \
                         stock grids are reconstructions)",
                        if within {
                            "within the published range".to_string()
                        } else {
                            format!("{:.3}% exceeds the published {bhi}%", hi * 100.0)
                        }
                    ));
                }
                None => lines.push(format!(
                    "{family}: no published range for this diagnostic; observed only"
                )),
            }
        }
        Ok((pass, lines))
    };
    finish(number, label, run())
}

// ---------------------------------------------------------------------------
// Criterion 9: property suite
// ---------------------------------------------------------------------------

fn property_criterion(workers: usize) -> CriterionReport {
    let number = 9;
    let label = "solver property suite";
    let run = || -> anyhow::Result<(bool, Vec<String>)> {
        let mut lines = Vec::new();
        let mut pass = true;

        // Unitarity on every stock sweep: tight for the reference integrator,
        // loose for the variational defaults.
        let sweeps = stock_sweeps(workers);
        let mut oracle_worst: f64 = 0.0;
        let mut vrm_worst: f64 = 0.0;
        let mut row_count = 0usize;
        for (family, rows) in sweeps {
            let (results, errors) = solved(rows);
            if !errors.is_empty() {
                pass = false;
                lines.extend(errors.iter().map(|e| format!("{family} sweep error: {e}")));
            }
            for (e, res) in &results {
                vrm_worst = vrm_worst.max(res.unitarity_defect);
                match rows.iter().find(|r| r.e == *e).unwrap().oracle.as_ref() {
                    Some(Ok((t, r))) => {
                        oracle_worst = oracle_worst.max((t + r - 1.0).abs());
                    }
                    _ => anyhow::bail!("{family} row E = {e} lacks an oracle value"),
                }
                row_count += 1;
            }
        }
        pass &= oracle_worst <= ORACLE_UNITARITY_TOL && vrm_worst <= VRM_DEFECT_TOL;
        lines.push(format!(
            "unitarity over {row_count} stock rows: reference max |T + R − 1| = {oracle_worst:.2e} \
             (tol {ORACLE_UNITARITY_TOL:.0e}), variational max defect = {vrm_worst:.2e} \
             (tol {VRM_DEFECT_TOL:.0e})  {}",
            verdict(oracle_worst <= ORACLE_UNITARITY_TOL && vrm_worst <= VRM_DEFECT_TOL)
        ));

        // The imposed slope pair is scaffolding; transmission must not see it.
        let mut slope_max: f64 = 0.0;
        let linear = stock_config("linear-step");
        for &e in &[0.4, 0.8, 1.2] {
            let setup = linear.setup_for(e)?;
            let base = solve_tunneling(&linear.profile, &setup, &linear.basis, 1.0, 4.0, &linear.quad)?;
            for (lb, lbt) in [(2.5, 6.5), (0.5, 7.0)] {
                let alt = solve_tunneling(&linear.profile, &setup, &linear.basis, lb, lbt, &linear.quad)?;
                slope_max = slope_max.max((alt.t - base.t).abs());
            }
        }
        let exp = stock_config("exponential-step");
        {
            let setup = exp.setup_for(0.3)?;
            let base = solve_tunneling(&exp.profile, &setup, &exp.basis, 2.0, 8.0, &exp.quad)?;
            let alt = solve_tunneling(&exp.profile, &setup, &exp.basis, 3.0, 9.0, &exp.quad)?;
            slope_max = slope_max.max((alt.t - base.t).abs());
        }
        pass &= slope_max <= SLOPE_PAIR_TOL;
        lines.push(format!(
            "imposed-slope-pair invariance: max |ΔT| = {slope_max:.2e} (tol {SLOPE_PAIR_TOL:.0e})  {}",
            verdict(slope_max <= SLOPE_PAIR_TOL)
        ));

        // Energy average is a ratio of quadratic forms, so coefficient scale
        // cancels. Two assertions with different sharpness: scaling by a power
        // of two commutes with binary rounding, so ×4 must reproduce the value
        // bitwise; a general factor hits different roundings inside the
        // cancellation-prone cᵀPc sum, so ×3.7 is only held to amplified
        // roundoff (measured ~3e-9 on this system).
        let setup = linear.setup_for(0.8)?;
        let (sys, em) = assemble_all(&linear.basis, &linear.profile, &setup, &linear.quad)?;
        let sol = inner_solution(&sys, linear.lambda_b)?;
        let e1 = average_energy(&sol.c, &em)?;
        let pow2: Vec<f64> = sol.c.iter().map(|x| 4.0 * x).collect();
        let e_pow2 = average_energy(&pow2, &em)?;
        let pow2_ok = e_pow2.to_bits() == e1.to_bits();
        let scaled: Vec<f64> = sol.c.iter().map(|x| 3.7 * x).collect();
        let e2 = average_energy(&scaled, &em)?;
        let norm_delta = (e2 / e1 - 1.0).abs();
        let general_ok = norm_delta <= NORMALIZATION_TOL;
        let norm_ok = pow2_ok && general_ok;
        pass &= norm_ok;
        lines.push(format!(
            "normalization invariance of the energy average: ×4 bitwise {}, \
             ×3.7 relative |Δ| = {norm_delta:.2e} (tol {NORMALIZATION_TOL:.0e})  {}",
            if pow2_ok { "equal" } else { "UNEQUAL" },
            verdict(norm_ok)
        ));

        // Rank-one boundary eigenvalue vs an independent determinant route:
        // det(M − t·v_a v_aᵀ) is affine in t, so two determinants pin its root.
        let (ro_max, ro_ok) = rank_one_vs_determinants();
        pass &= ro_ok;
        lines.push(format!(
            "rank-one solve vs determinant route on 50 random order-6 systems: \
             max relative |Δλ_a| = {ro_max:.2e} (tol {RANK_ONE_TOL:.0e})  {}",
            verdict(ro_ok)
        ));

        // Matched analytic solution pairs vs the reference integrator on flat
        // profiles, where both are exact.
        let (pair_max, pair_ok) = matched_pairs_vs_integrator()?;
        pass &= pair_ok;
        lines.push(format!(
            "matched analytic pairs vs reference integration (plane-wave and flat-barrier): \
             max |ΔT| = {pair_max:.2e} (tol {PAIR_AGREEMENT_TOL:.0e})  {}",
            verdict(pair_ok)
        ));

        Ok((pass, lines))
    };
    finish(number, label, run())
}

/// Determinant by Gaussian elimination with partial pivoting; independent of
/// the solver's LU code on purpose.
fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = 1.0;
    let mut prod = 1.0;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .expect("nonempty pivot range");
        if a[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        prod *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    sign * prod
}

fn rank_one_vs_determinants() -> (f64, bool) {
    let mut rng = StdRng::seed_from_u64(0xACCE97);
    let n = 6;
    let lambda_b = 1.5;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random_range(-1.0..1.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            // Diagonal dominance keeps every draw comfortably solvable.
            row[i] = rng.random_range(12.0..14.0);
        }
        let v_a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v_b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sys = VariationalSystem {
            a_matrix: Matrix::from_fn(n, |i, j| a[i][j]),
            v_a: v_a.clone(),
            v_b: v_b.clone(),
        };
        let sol = inner_solution(&sys, lambda_b).expect("diagonally dominant system solves");

        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] + lambda_b * v_b[i] * v_b[j]).collect())
            .collect();
        let m_minus: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| m[i][j] - v_a[i] * v_a[j]).collect())
            .collect();
        let d0 = det(&m);
        let d1 = det(&m_minus);
        let lam_ref = d0 / (d0 - d1);
        worst = worst.max((sol.lambda_a - lam_ref).abs() / lam_ref.abs().max(1.0));
    }
    (worst, worst <= RANK_ONE_TOL)
}

fn matched_pairs_vs_integrator() -> anyhow::Result<(f64, bool)> {
    let (a, b) = (1.0, 2.5);
    let mut worst: f64 = 0.0;

    // Plane waves over a flat zero potential: transmission is exactly 1 and
    // both routes must say so.
    {
        let e = 0.8f64;
        let k = (2.0 * e).sqrt();
        let setup = ScatteringSetup::new(a, b, 0.0, 0.0, e)?;
        let pair = SolutionPair::from_fns(
            |x| {
                let w = Complex64::new((k * x).cos(), (k * x).sin());
                (w, Complex64::new(0.0, k) * w)
            },
            |x| {
                let w = Complex64::new((k * x).cos(), -(k * x).sin());
                (w, Complex64::new(0.0, -k) * w)
            },
            a,
            b,
        );
        let t_pair = matched_pair_transmission(&pair, &setup)?;
        let flat = PotentialProfile::Sampled { knots: vec![(a, 0.0), (b, 0.0)] };
        let (t_ref, _) = integrate_reference(&flat, &setup, ORACLE_TOL)?;
        worst = worst.max((t_pair - t_ref).abs());
    }

    // Flat barrier, tunneling and over-barrier regimes: analytic pairs are
    // hyperbolic/trigonometric and the integrator sees the same rectangle.
    let v0 = 0.8;
    let flat = PotentialProfile::Sampled { knots: vec![(a, v0), (b, v0)] };
    for e in [0.3, 1.1] {
        let setup = ScatteringSetup::new(a, b, 0.0, 0.0, e)?;
        let pair = if e < v0 {
            let beta = (2.0 * (v0 - e)).sqrt();
            SolutionPair::from_fns(
                |x| {
                    (
                        Complex64::new((beta * x).cosh(), 0.0),
                        Complex64::new(beta * (beta * x).sinh(), 0.0),
                    )
                },
                |x| {
                    (
                        Complex64::new((beta * x).sinh(), 0.0),
                        Complex64::new(beta * (beta * x).cosh(), 0.0),
                    )
                },
                a,
                b,
            )
        } else {
            let q = (2.0 * (e - v0)).sqrt();
            SolutionPair::from_fns(
                |x| {
                    (
                        Complex64::new((q * x).cos(), 0.0),
                        Complex64::new(-q * (q * x).sin(), 0.0),
                    )
                },
                |x| {
                    (
                        Complex64::new((q * x).sin(), 0.0),
                        Complex64::new(q * (q * x).cos(), 0.0),
                    )
                },
                a,
                b,
            )
        };
        let t_pair = matched_pair_transmission(&pair, &setup)?;
        let (t_ref, _) = integrate_reference(&flat, &setup, ORACLE_TOL)?;
        worst = worst.max((t_pair - t_ref).abs());
    }
    Ok((worst, worst <= PAIR_AGREEMENT_TOL))
}

// ---------------------------------------------------------------------------

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn finish(
    number: usize,
    label: &'static str,
    run: anyhow::Result<(bool, Vec<String>)>,
) -> CriterionReport {
    match run {
        Ok((pass, lines)) => CriterionReport { number, label, pass, lines },
        Err(e) => CriterionReport {
            number,
            label,
            pass: false,
            lines: vec![format!("execution error: {e:#}")],
        },
    }
}
