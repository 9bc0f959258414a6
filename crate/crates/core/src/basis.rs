//! Cosine basis on the inner window and assembly of the variational matrices.
//!
//! The trial wavefunction in the barrier region is ψ₂(x) = Σᵢ cᵢ cos(κᵢ x). All
//! purely trigonometric integrals (kinetic and overlap) are evaluated in closed
//! form; only ∫χᵢVχⱼ goes through quadrature, so quadrature error enters the
//! final matrices exactly once.

use crate::linalg::Matrix;
use crate::potentials::{PotentialProfile, ScatteringSetup};
use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{ceil, cos, sin};

/// Inclusive arithmetic grid {start, start+step, …}, keeping the endpoint when it
/// lands within 1e−12 of a grid point.
pub fn kappa_grid(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    for (v, name) in [(start, "start"), (step, "step"), (end, "end")] {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
        }
    }
    if step <= 0.0 {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let slack = 1e-12f64.min(0.5 * step);
    if end < start - slack {
        return Err(Error::InvalidArgument(format!(
            "grid end {end} lies before start {start}"
        )));
    }
    if (end - start) / step > 1e6 {
        return Err(Error::InvalidArgument(format!(
            "grid from {start} to {end} at step {step} is unreasonably large"
        )));
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let v = start + (i as f64) * step;
        if v > end + slack {
            break;
        }
        grid.push(v);
        i += 1;
    }
    Ok(grid)
}

/// Node and weight spacing for the adaptive potential quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute convergence target for every matrix entry.
    pub tol: f64,
    /// Panel-doubling budget before giving up.
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { tol: 1e-10, max_doublings: 14 }
    }
}

/// Cosine basis χᵢ(x) = cos(κᵢ x) over a window [a, b].
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    kappas: Vec<f64>,
    a: f64,
    b: f64,
}

impl BasisSet {
    /// Validate and construct: κ strictly increasing and nonnegative (duplicates
    /// would make the assembled matrix singular), at least two functions, a < b.
    pub fn new(kappas: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidBasis(format!("window needs finite a < b, got [{a}, {b}]")));
        }
        if kappas.len() < 2 {
            return Err(Error::InvalidBasis(format!(
                "need at least 2 basis functions, got {}",
                kappas.len()
            )));
        }
        for pair in kappas.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::InvalidBasis(format!(
                    "kappas must be strictly increasing: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if !kappas[0].is_finite() || kappas[0] < 0.0 || !kappas[kappas.len() - 1].is_finite() {
            return Err(Error::InvalidBasis(format!(
                "kappas must be finite and nonnegative, got first {}",
                kappas[0]
            )));
        }
        Ok(BasisSet { kappas, a, b })
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    /// The window (a, b) the basis lives on.
    pub fn window(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// (χᵢ(x), χᵢ′(x)) = (cos κᵢx, −κᵢ sin κᵢx); zero-based index.
    pub fn basis_eval(&self, i: usize, x: f64) -> Result<(f64, f64)> {
        let k = *self
            .kappas
            .get(i)
            .ok_or_else(|| Error::InvalidBasis(format!("basis index {i} out of range")))?;
        Ok((cos(k * x), -k * sin(k * x)))
    }

    /// χᵢ(x) for every i, e.g. the boundary vectors v_a, v_b.
    pub fn values_at(&self, x: f64) -> Vec<f64> {
        self.kappas.iter().map(|&k| cos(k * x)).collect()
    }

    /// χᵢ′(x) for every i.
    pub fn derivatives_at(&self, x: f64) -> Vec<f64> {
        self.kappas.iter().map(|&k| -k * sin(k * x)).collect()
    }
}

/// Assembled linear system for the barrier region: the symmetric matrix acting on
/// the coefficient vector plus the boundary-value vectors whose outer products
/// carry the boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalSystem {
    pub a_matrix: Matrix,
    pub v_a: Vec<f64>,
    pub v_b: Vec<f64>,
}

/// Matrices for the energy average over the barrier region: numerator P
/// (kinetic-plus-potential) and symmetric positive-definite overlap Rm.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMatrices {
    pub p: Matrix,
    pub rm: Matrix,
}

// ∫ₐᵇ cos(px)cos(qx) dx in closed form.
fn int_cos_cos(p: f64, q: f64, a: f64, b: f64) -> f64 {
    if (p - q).abs() < 1e-14 {
        if p.abs() < 1e-14 {
            return b - a;
        }
        0.5 * (b - a) + (sin(2.0 * p * b) - sin(2.0 * p * a)) / (4.0 * p)
    } else {
        let d = p - q;
        let s = p + q;
        0.5 * ((sin(d * b) - sin(d * a)) / d + (sin(s * b) - sin(s * a)) / s)
    }
}

// ∫ₐᵇ sin(px)sin(qx) dx in closed form.
fn int_sin_sin(p: f64, q: f64, a: f64, b: f64) -> f64 {
    if (p - q).abs() < 1e-14 {
        if p.abs() < 1e-14 {
            return 0.0;
        }
        0.5 * (b - a) - (sin(2.0 * p * b) - sin(2.0 * p * a)) / (4.0 * p)
    } else {
        let d = p - q;
        let s = p + q;
        0.5 * ((sin(d * b) - sin(d * a)) / d - (sin(s * b) - sin(s * a)) / s)
    }
}

// 12-point Gauss–Legendre rule on [−1, 1]; exact through degree 23.
const GL_NODES: [f64; 6] = [
    0.125_233_408_511_468_9,
    0.367_831_498_998_180_2,
    0.587_317_954_286_617_5,
    0.769_902_674_194_304_7,
    0.904_117_256_370_474_9,
    0.981_560_634_246_719_3,
];
const GL_WEIGHTS: [f64; 6] = [
    0.249_147_045_813_402_8,
    0.233_492_536_538_354_8,
    0.203_167_426_723_065_9,
    0.160_078_328_543_346_2,
    0.106_939_325_995_318_4,
    0.047_175_336_386_511_83,
];

// One composite Gauss–Legendre pass over the window: Wᵢⱼ = ∫χᵢVχⱼ with the
// profile evaluated once per node. Only i ≤ j is accumulated; the mirror keeps
// the result exactly symmetric.
fn potential_pass(
    basis: &BasisSet,
    profile: &PotentialProfile,
    panels: usize,
) -> Result<Matrix> {
    let n = basis.len();
    let mut w = Matrix::zeros(n);
    let h = (basis.b - basis.a) / panels as f64;
    let mut chi = vec![0.0; n];
    for p in 0..panels {
        let mid = basis.a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for (t, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for &sign in &[-1.0, 1.0] {
                let x = mid + sign * half * t;
                let v = profile.evaluate(x)?;
                let scale = wt * half * v;
                for (c, &k) in chi.iter_mut().zip(basis.kappas.iter()) {
                    *c = cos(k * x);
                }
                for i in 0..n {
                    let ci = chi[i] * scale;
                    for (j, &cj) in chi.iter().enumerate().skip(i) {
                        w.set(i, j, w.get(i, j) + ci * cj);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            w.set(i, j, w.get(j, i));
        }
    }
    Ok(w)
}

// Adaptive potential integral: start with enough panels to put ≥ 8 nodes per
// period of the fastest integrand component (frequency 2κ_max), then double
// until every entry moves by less than quad.tol.
fn potential_matrix(
    basis: &BasisSet,
    profile: &PotentialProfile,
    quad: &QuadratureSpec,
) -> Result<Matrix> {
    if !(quad.tol > 0.0) || !quad.tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "quadrature tol must be positive and finite, got {}",
            quad.tol
        )));
    }
    if quad.max_doublings == 0 {
        return Err(Error::InvalidArgument(
            "quadrature needs max_doublings >= 1 to verify convergence".into(),
        ));
    }
    let k_max = basis.kappas[basis.len() - 1];
    let span = basis.b - basis.a;
    let mut panels = (ceil(2.0 * k_max * span / (3.0 * PI)) as usize).max(4);
    let mut prev = potential_pass(basis, profile, panels)?;
    let mut residual = f64::INFINITY;
    for _ in 0..quad.max_doublings {
        panels *= 2;
        let next = potential_pass(basis, profile, panels)?;
        residual = 0.0;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                residual = residual.max((next.get(i, j) - prev.get(i, j)).abs());
            }
        }
        if residual <= quad.tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged { residual, tol: quad.tol })
}

fn check_domains(basis: &BasisSet, setup: &ScatteringSetup) -> Result<()> {
    if basis.a != setup.a || basis.b != setup.b {
        return Err(Error::InvalidSetup(format!(
            "basis window [{}, {}] does not match scattering window [{}, {}]",
            basis.a, basis.b, setup.a, setup.b
        )));
    }
    Ok(())
}

/// Assemble both the linear system and the energy matrices with a single
/// quadrature pass over the potential.
pub fn assemble_all(
    basis: &BasisSet,
    profile: &PotentialProfile,
    setup: &ScatteringSetup,
    quad: &QuadratureSpec,
) -> Result<(VariationalSystem, EnergyMatrices)> {
    check_domains(basis, setup)?;
    profile.validate()?;
    let n = basis.len();
    let kap = basis.kappas();
    let (a, b) = (basis.a, basis.b);
    let overlap = Matrix::from_fn(n, |i, j| int_cos_cos(kap[i], kap[j], a, b));
    let kinetic = Matrix::from_fn(n, |i, j| kap[i] * kap[j] * int_sin_sin(kap[i], kap[j], a, b));
    let w = potential_matrix(basis, profile, quad)?;
    let e = setup.e;
    let a_matrix = Matrix::from_fn(n, |i, j| {
        -kinetic.get(i, j) + 2.0 * e * overlap.get(i, j) - 2.0 * w.get(i, j)
    });
    let p = Matrix::from_fn(n, |i, j| 0.5 * kap[j] * kap[j] * overlap.get(i, j) + w.get(i, j));
    let system = VariationalSystem {
        a_matrix,
        v_a: basis.values_at(a),
        v_b: basis.values_at(b),
    };
    Ok((system, EnergyMatrices { p, rm: overlap }))
}

/// The symmetric linear system alone: Aᵢⱼ = −∫χᵢ′χⱼ′ + 2E∫χᵢχⱼ − 2∫χᵢVχⱼ over
/// [a, b] (atomic units with 2m/ħ² = 2; E taken from the setup), plus boundary
/// vectors (v_a)ᵢ = χᵢ(a), (v_b)ᵢ = χᵢ(b).
pub fn assemble_system(
    basis: &BasisSet,
    profile: &PotentialProfile,
    setup: &ScatteringSetup,
    quad: &QuadratureSpec,
) -> Result<VariationalSystem> {
    assemble_all(basis, profile, setup, quad).map(|(s, _)| s)
}

/// The energy-average matrices alone: Pᵢⱼ = (κⱼ²/2)∫χᵢχⱼ + ∫χᵢVχⱼ and the
/// overlap Rmᵢⱼ = ∫χᵢχⱼ.
pub fn assemble_energy_matrices(
    basis: &BasisSet,
    profile: &PotentialProfile,
    setup: &ScatteringSetup,
    quad: &QuadratureSpec,
) -> Result<EnergyMatrices> {
    assemble_all(basis, profile, setup, quad).map(|(_, m)| m)
}
