//! Rank-one reduction of the boundary-value eigenproblem, plane-wave matching,
//! and the end-to-end transmission pipeline.
//!
//! The boundary terms enter the assembled system as outer products v vᵀ, so the
//! generalized eigenproblem collapses to a single linear solve: with
//! M = A + λ(b)·v_b v_bᵀ, the unique finite eigenvalue is λ(a) = 1/(v_aᵀ M⁻¹ v_a)
//! and the coefficient vector is the solve against v_a.

use crate::basis::{assemble_all, BasisSet, EnergyMatrices, QuadratureSpec, VariationalSystem};
use crate::linalg::Matrix;
use crate::potentials::{PotentialProfile, ScatteringSetup};
use crate::{Error, Result};
use alloc::vec::Vec;
use libm::{cos, sin};
use num_complex::Complex64;

/// Coefficients of one inner-region solution with its boundary logarithmic
/// derivatives: `lambda_b` is the imposed value (after any retry perturbation),
/// `lambda_a` the resulting one.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub c: Vec<f64>,
    pub lambda_b: f64,
    pub lambda_a: f64,
}

/// Plane-wave coefficients in the outer regions: ψ₁ = a₁e^{ik₁x} + b₁e^{−ik₁x}
/// left of the window, ψ₃ = a₃e^{ik₃x} + b₃e^{−ik₃x} right of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelAmplitudes {
    pub a1: Complex64,
    pub b1: Complex64,
    pub a3: Complex64,
    pub b3: Complex64,
}

/// One energy point of a transmission sweep, with its quality diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingResult {
    pub e: f64,
    pub t: f64,
    pub r: f64,
    pub e_av: f64,
    pub unitarity_defect: f64,
    pub cond_indicator: f64,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn cis(t: f64) -> Complex64 {
    Complex64::new(cos(t), sin(t))
}

/// Solve for the inner coefficients at an imposed λ(b), also returning the exact
/// 1-norm condition number of the shifted system as a quality indicator.
pub fn inner_solution_with_cond(
    sys: &VariationalSystem,
    lambda_b: f64,
) -> Result<(InnerSolution, f64)> {
    let n = sys.a_matrix.order();
    if sys.v_a.len() != n || sys.v_b.len() != n {
        return Err(Error::InvalidArgument(
            "boundary vectors do not match the matrix order".into(),
        ));
    }
    let m = Matrix::from_fn(n, |i, j| {
        sys.a_matrix.get(i, j) + lambda_b * sys.v_b[i] * sys.v_b[j]
    });
    let factors = match m.lu() {
        Ok(f) => f,
        Err(_) => return Err(Error::SingularSystem { lambda_b }),
    };
    let w = m.refined_solve(&factors, &sys.v_a);
    if !w.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularSystem { lambda_b });
    }
    let s = dot(&sys.v_a, &w);
    let lambda_a = 1.0 / s;
    if s == 0.0 || !lambda_a.is_finite() {
        return Err(Error::DegenerateBoundary);
    }
    // Normalize to v_aᵀC = 1; near a resonance that scale can overflow, in which
    // case a unit-norm C carries the same physics (everything downstream is
    // scale-free).
    let mut c: Vec<f64> = w.iter().map(|&v| v * lambda_a).collect();
    if !c.iter().all(|v| v.is_finite()) {
        let norm = libm::sqrt(w.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateBoundary);
        }
        c = w.iter().map(|&v| v / norm).collect();
    }
    let cond = m.cond_one(&factors);
    Ok((InnerSolution { c, lambda_b, lambda_a }, cond))
}

/// [`inner_solution_with_cond`] without the diagnostic.
pub fn inner_solution(sys: &VariationalSystem, lambda_b: f64) -> Result<InnerSolution> {
    inner_solution_with_cond(sys, lambda_b).map(|(sol, _)| sol)
}

impl ChannelAmplitudes {
    /// Solve the two 2×2 continuity systems for given boundary data (ψ, ψ′) at
    /// x = a (left channel, wavenumber k1) and x = b (right channel, k3).
    #[allow(clippy::too_many_arguments)]
    pub fn from_boundary(
        u_a: f64,
        du_a: f64,
        u_b: f64,
        du_b: f64,
        k1: f64,
        k3: f64,
        a: f64,
        b: f64,
    ) -> Self {
        let i = Complex64::new(0.0, 1.0);
        let slope_a = du_a / (i * k1);
        let slope_b = du_b / (i * k3);
        ChannelAmplitudes {
            a1: 0.5 * (u_a + slope_a) * cis(-k1 * a),
            b1: 0.5 * (u_a - slope_a) * cis(k1 * a),
            a3: 0.5 * (u_b + slope_b) * cis(-k3 * b),
            b3: 0.5 * (u_b - slope_b) * cis(k3 * b),
        }
    }
}

/// Match one inner solution to plane waves on both sides. The boundary slope fed
/// into the continuity equations is λ·ψ — the logarithmic derivative the solve
/// imposed (at b) and produced (at a) — which is what the eigenproblem actually
/// constrains, not the term-by-term derivative of the truncated expansion.
pub fn match_amplitudes(
    sol: &InnerSolution,
    basis: &BasisSet,
    setup: &ScatteringSetup,
) -> Result<ChannelAmplitudes> {
    if basis.len() != sol.c.len() {
        return Err(Error::InvalidArgument(
            "coefficient vector does not match the basis size".into(),
        ));
    }
    let (a, b) = basis.window();
    if a != setup.a || b != setup.b {
        return Err(Error::InvalidSetup(
            "basis window does not match scattering window".into(),
        ));
    }
    let u_a = dot(&basis.values_at(a), &sol.c);
    let u_b = dot(&basis.values_at(b), &sol.c);
    if u_a == 0.0 || u_b == 0.0 || !u_a.is_finite() || !u_b.is_finite() {
        return Err(Error::DegenerateBoundary);
    }
    let (k1, k3) = setup.wavenumbers();
    Ok(ChannelAmplitudes::from_boundary(
        u_a,
        sol.lambda_a * u_a,
        u_b,
        sol.lambda_b * u_b,
        k1,
        k3,
        a,
        b,
    ))
}

/// Combine the amplitude sets of two independent inner solutions into (R, T).
///
/// The transmitted-amplitude numerator is a₃b̃₃ − b₃ã₃, obtained from the channel
/// weights B = b̃₃/D, B̃ = −b₃/D with D = a₁b̃₃ − b₃ã₁ under a unit incident wave
/// and no left-moving wave on the transmitted side.
pub fn reflection_transmission(
    amps: &ChannelAmplitudes,
    amps_t: &ChannelAmplitudes,
    k1: f64,
    k3: f64,
) -> Result<(f64, f64)> {
    let d = amps.a1 * amps_t.b3 - amps.b3 * amps_t.a1;
    let scale2 = (amps.a1.norm_sqr() * amps_t.b3.norm_sqr())
        .max(amps.b3.norm_sqr() * amps_t.a1.norm_sqr());
    if d.norm_sqr() <= 1e-28 * scale2 {
        return Err(Error::DependentSolutions);
    }
    let rho = (amps.b1 * amps_t.b3 - amps.b3 * amps_t.b1) / d;
    let tau = (amps.a3 * amps_t.b3 - amps.b3 * amps_t.a3) / d;
    let r = rho.norm_sqr();
    let t = (k3 / k1) * tau.norm_sqr();
    if !r.is_finite() || !t.is_finite() {
        return Err(Error::DependentSolutions);
    }
    Ok((r, t))
}

/// Energy expectation of the inner solution, CᵀPC / CᵀRmC.
pub fn average_energy(c: &[f64], em: &EnergyMatrices) -> Result<f64> {
    if c.len() != em.p.order() || c.len() != em.rm.order() {
        return Err(Error::InvalidArgument(
            "coefficient vector does not match the matrix order".into(),
        ));
    }
    let den = dot(c, &em.rm.mul_vec(c));
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateNorm);
    }
    Ok(dot(c, &em.p.mul_vec(c)) / den)
}

// Retry ladder for resonant λ(b) choices: the imposed value can make
// A + λ(b)Δᵇ singular, so step λ(b) by +0.5 up to 3 times, skipping a
// candidate that would collide with the other solution's λ(b).
fn solve_with_retry(
    sys: &VariationalSystem,
    lambda_b: f64,
    other_lambda_b: f64,
) -> Result<(InnerSolution, f64)> {
    let mut last_err = None;
    let mut candidate = lambda_b;
    let mut attempts = 0;
    loop {
        if candidate != other_lambda_b {
            match inner_solution_with_cond(sys, candidate) {
                Ok(out) => return Ok(out),
                Err(e) => last_err = Some(e),
            }
        }
        if attempts == 3 {
            let err = last_err.unwrap_or(Error::SingularSystem { lambda_b });
            return Err(err.at_stage("inner-solve", Some(candidate)));
        }
        attempts += 1;
        candidate = lambda_b + 0.5 * attempts as f64;
    }
}

struct PairEval {
    res: TunnelingResult,
    cond: f64,
    cond_t: f64,
    lb: f64,
    lbt: f64,
    // |E_av(first solution) − E_av(second solution)|: the same diagnostic along
    // two independent routes. Infinite when the second route degenerates.
    e_av_spread: f64,
}

// Solve → match → combine → average for one slope pair on an assembled system.
fn evaluate_pair(
    sys: &VariationalSystem,
    em: &EnergyMatrices,
    basis: &BasisSet,
    setup: &ScatteringSetup,
    lambda_b: f64,
    lambda_b_tilde: f64,
) -> Result<PairEval> {
    let (sol, cond) = solve_with_retry(sys, lambda_b, lambda_b_tilde)?;
    let (sol_t, cond_t) = solve_with_retry(sys, lambda_b_tilde, sol.lambda_b)?;
    let amps = match_amplitudes(&sol, basis, setup)
        .map_err(|e| e.at_stage("match", Some(sol.lambda_b)))?;
    let amps_t = match_amplitudes(&sol_t, basis, setup)
        .map_err(|e| e.at_stage("match", Some(sol_t.lambda_b)))?;
    let (k1, k3) = setup.wavenumbers();
    let (r, t) = reflection_transmission(&amps, &amps_t, k1, k3)
        .map_err(|e| e.at_stage("combine", Some(sol_t.lambda_b)))?;
    let e_av = average_energy(&sol.c, em).map_err(|e| e.at_stage("average", None))?;
    let e_av_spread = match average_energy(&sol_t.c, em) {
        Ok(e_av_t) => (e_av - e_av_t).abs(),
        Err(_) => f64::INFINITY,
    };
    Ok(PairEval {
        res: TunnelingResult {
            e: setup.e,
            t,
            r,
            e_av,
            unitarity_defect: (t + r - 1.0).abs(),
            cond_indicator: cond.max(cond_t),
        },
        cond,
        cond_t,
        lb: sol.lambda_b,
        lbt: sol_t.lambda_b,
        e_av_spread,
    })
}

fn step_away(value: f64, other: f64) -> f64 {
    let candidate = value + 0.5;
    if candidate == other {
        candidate + 0.5
    } else {
        candidate
    }
}

// A slope choice can land near a resonance of A + λ(b)Δᵇ without making the
// solve fail outright. The computable symptoms: a broken flux balance, a
// downstream degeneracy (stage error), or the two routes disagreeing on E_av —
// the pole-adjacent coefficient vector picks up an admixture whose boundary
// derivative is wild even though (R, T), which see only boundary ratios,
// stay clean. Ambient two-route E_av spreads sit below 0.8% of E on the stock
// settings; pole-adjacent ones jump past 3%.
const DEFECT_RETRY_GATE: f64 = 1e-4;
const EAV_SPREAD_RETRY_GATE: f64 = 1.5e-2;

// Normalized badness of an evaluation: 1.0 at either retry gate.
fn retry_score(eval: &PairEval, e: f64) -> f64 {
    let defect = eval.res.unitarity_defect / DEFECT_RETRY_GATE;
    let spread = eval.e_av_spread / (EAV_SPREAD_RETRY_GATE * e);
    defect.max(spread)
}

/// Full pipeline for one energy point: assemble the system once, solve the inner
/// problem for both λ(b) choices (with the retry ladder), match both solutions to
/// plane waves, combine into (R, T), and evaluate E_av on the first solution.
///
/// If the combined result conserves flux worse than 1e−4, the two solutions
/// disagree on E_av by more than 1.5% of E, or the evaluation fails outright on
/// a degeneracy, the slope implicated by the conditioning (or by the failure) is
/// stepped away from the suspected resonance by +0.5, up to three times, and the
/// cleanest result is returned.
pub fn solve_tunneling(
    profile: &PotentialProfile,
    setup: &ScatteringSetup,
    basis: &BasisSet,
    lambda_b: f64,
    lambda_b_tilde: f64,
    quad: &QuadratureSpec,
) -> Result<TunnelingResult> {
    if lambda_b == lambda_b_tilde {
        return Err(Error::InvalidArgument(
            "the two imposed boundary derivatives must differ".into(),
        ));
    }
    if !lambda_b.is_finite() || !lambda_b_tilde.is_finite() {
        return Err(Error::InvalidArgument(
            "imposed boundary derivatives must be finite".into(),
        ));
    }
    let (sys, em) =
        assemble_all(basis, profile, setup, quad).map_err(|e| e.at_stage("assemble", None))?;
    let (mut lb, mut lbt) = (lambda_b, lambda_b_tilde);
    let mut bump_first = true;
    let mut best: Option<(PairEval, f64)> = None;
    let mut last_err = None;
    for attempt in 0..4 {
        if attempt > 0 {
            if bump_first {
                lb = step_away(lb, lbt);
            } else {
                lbt = step_away(lbt, lb);
            }
        }
        match evaluate_pair(&sys, &em, basis, setup, lb, lbt) {
            Ok(eval) => {
                bump_first = eval.cond >= eval.cond_t;
                (lb, lbt) = (eval.lb, eval.lbt);
                let score = retry_score(&eval, setup.e);
                if best.as_ref().is_none_or(|(_, s)| score < *s) {
                    best = Some((eval, score));
                }
                if score <= 1.0 {
                    break;
                }
            }
            Err(e) => {
                // A failed perturbation is no reason to discard a valid result.
                if best.is_some() {
                    break;
                }
                // Step the slope the failure names; the first drives E_av, so
                // it is the default suspect.
                bump_first = !matches!(&e, Error::Stage { lambda_b: Some(l), .. } if *l == lbt);
                last_err = Some(e);
            }
        }
    }
    match best {
        Some((eval, _)) => Ok(eval.res),
        None => Err(last_err.unwrap_or(Error::DegenerateBoundary)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::kappa_grid;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn scalar_system(alpha: f64, chi_a: f64, chi_b: f64) -> VariationalSystem {
        VariationalSystem {
            a_matrix: Matrix::from_fn(1, |_, _| alpha),
            v_a: vec![chi_a],
            v_b: vec![chi_b],
        }
    }

    #[test]
    fn scalar_solve_matches_hand_algebra() {
        // N=1: λ(a) = (α + λ_b χ(b)²)/χ(a)².
        let sys = scalar_system(0.7, 0.6, -0.8);
        let sol = inner_solution(&sys, 2.0).unwrap();
        assert_relative_eq!(sol.lambda_a, (0.7 + 2.0 * 0.64) / 0.36, max_relative = 1e-13);
        assert_relative_eq!(sol.c[0], 1.0 / 0.6, max_relative = 1e-13);
        assert_relative_eq!(sol.lambda_b, 2.0);
    }

    #[test]
    fn eigen_residual_small() {
        // [A + λ_bΔᵇ]C = λ_aΔᵃC re-checked entry-wise on a dense 4×4 system.
        let a = Matrix::from_fn(4, |i, j| {
            let (i, j) = (i as f64, j as f64);
            1.0 / (1.0 + i + j) + if i == j { 2.0 } else { 0.0 }
        });
        let sys = VariationalSystem {
            a_matrix: a,
            v_a: vec![1.0, -0.5, 0.3, 0.9],
            v_b: vec![0.2, 1.1, -0.7, 0.4],
        };
        let sol = inner_solution(&sys, 3.0).unwrap();
        let n = 4;
        let mc: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (sys.a_matrix.get(i, j) + 3.0 * sys.v_b[i] * sys.v_b[j]) * sol.c[j]
                    })
                    .sum::<f64>()
            })
            .collect();
        let va_c = dot(&sys.v_a, &sol.c);
        let norm_a = sys.a_matrix.one_norm();
        let norm_c = sol.c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (mci, vai) in mc.iter().zip(&sys.v_a) {
            let resid = mci - sol.lambda_a * vai * va_c;
            assert!(resid.abs() <= 1e-10 * norm_a * norm_c);
        }
    }

    #[test]
    fn zero_incoming_boundary_is_degenerate() {
        let sys = scalar_system(0.7, 0.0, 1.0);
        assert!(matches!(inner_solution(&sys, 2.0), Err(Error::DegenerateBoundary)));
    }

    #[test]
    fn retry_ladder_steps_past_singular_shift() {
        // α = −2, χ(b) = 1 makes M = λ_b − 2 singular exactly at λ_b = 2.
        let sys = scalar_system(-2.0, 1.0, 1.0);
        let (sol, _) = solve_with_retry(&sys, 2.0, 99.0).unwrap();
        assert_relative_eq!(sol.lambda_b, 2.5);
        // If the first fallback collides with the other solution's λ(b), it is
        // skipped rather than reused.
        let (sol, _) = solve_with_retry(&sys, 2.0, 2.5).unwrap();
        assert_relative_eq!(sol.lambda_b, 3.0);
    }

    #[test]
    fn retry_ladder_gives_up_with_context() {
        let sys = scalar_system(0.7, 0.0, 1.0);
        match solve_with_retry(&sys, 2.0, 99.0) {
            Err(Error::Stage { stage, lambda_b, .. }) => {
                assert_eq!(stage, "inner-solve");
                assert_eq!(lambda_b, Some(3.5));
            }
            other => panic!("expected staged error, got {other:?}"),
        }
    }

    #[test]
    fn cosine_boundary_data_split_evenly() {
        // ψ = cos(kx) is (e^{ikx} + e^{−ikx})/2, so both amplitudes are 1/2.
        let (k, x) = (0.7, 1.3);
        let amps =
            ChannelAmplitudes::from_boundary(cos(k * x), -k * sin(k * x), 1.0, 0.0, k, 1.0, x, 9.0);
        assert_relative_eq!(amps.a1.re, 0.5, epsilon = 1e-14);
        assert!(amps.a1.im.abs() < 1e-14);
        assert_relative_eq!(amps.b1.re, 0.5, epsilon = 1e-14);
        assert!(amps.b1.im.abs() < 1e-14);
    }

    #[test]
    fn sine_boundary_data_split_oddly() {
        // ψ = sin(kx) = (e^{ikx} − e^{−ikx})/(2i) → a₁ = 1/(2i) = −i/2.
        let (k, x) = (0.7, 1.3);
        let amps =
            ChannelAmplitudes::from_boundary(sin(k * x), k * cos(k * x), 1.0, 0.0, k, 1.0, x, 9.0);
        assert!(amps.a1.re.abs() < 1e-14);
        assert_relative_eq!(amps.a1.im, -0.5, epsilon = 1e-14);
        assert!(amps.b1.re.abs() < 1e-14);
        assert_relative_eq!(amps.b1.im, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn free_propagation_is_fully_transmitted() {
        // Two independent free solutions cos(kx) and sin(kx) with V ≡ 0 on both
        // sides must combine to (R, T) = (0, 1).
        let (k, a, b) = (0.9, 1.0, 8.0);
        let amps = ChannelAmplitudes::from_boundary(
            cos(k * a),
            -k * sin(k * a),
            cos(k * b),
            -k * sin(k * b),
            k,
            k,
            a,
            b,
        );
        let amps_t = ChannelAmplitudes::from_boundary(
            sin(k * a),
            k * cos(k * a),
            sin(k * b),
            k * cos(k * b),
            k,
            k,
            a,
            b,
        );
        let (r, t) = reflection_transmission(&amps, &amps_t, k, k).unwrap();
        assert!(r.abs() < 1e-13);
        assert_relative_eq!(t, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn identical_solutions_rejected() {
        let amps = ChannelAmplitudes::from_boundary(1.0, 0.5, 1.0, 0.5, 1.0, 1.0, 0.0, 1.0);
        assert!(matches!(
            reflection_transmission(&amps, &amps, 1.0, 1.0),
            Err(Error::DependentSolutions)
        ));
    }

    #[test]
    fn average_energy_of_free_mode_is_kinetic() {
        // One basis function, V ≡ 0: P = (κ²/2)·Rm, so the ratio is κ²/2 for
        // any coefficient scale.
        let kappa = 1.7;
        let overlap = 2.3;
        let em = EnergyMatrices {
            p: Matrix::from_fn(1, |_, _| 0.5 * kappa * kappa * overlap),
            rm: Matrix::from_fn(1, |_, _| overlap),
        };
        assert_relative_eq!(average_energy(&[0.4], &em).unwrap(), 0.5 * kappa * kappa);
        assert_relative_eq!(
            average_energy(&[-5.0], &em).unwrap(),
            average_energy(&[0.4], &em).unwrap()
        );
        let em_bad = EnergyMatrices {
            p: Matrix::from_fn(1, |_, _| 1.0),
            rm: Matrix::from_fn(1, |_, _| 0.0),
        };
        assert!(matches!(average_energy(&[1.0], &em_bad), Err(Error::DegenerateNorm)));
    }

    #[test]
    fn matched_wave_is_continuous_at_both_boundaries() {
        // Full decaying-step run at production scale: the reconstructed outer
        // waves must reproduce the boundary values and slopes fed to them.
        let basis = BasisSet::new(kappa_grid(0.1, 0.1, 6.0).unwrap(), 1.0, 8.0).unwrap();
        let profile = PotentialProfile::ExponentialStep { v0: 0.5, a: 1.0 };
        let setup = ScatteringSetup::new(1.0, 8.0, 0.0, 0.0, 0.125).unwrap();
        let (sys, _) = assemble_all(&basis, &profile, &setup, &QuadratureSpec::default()).unwrap();
        let sol = inner_solution(&sys, 2.0).unwrap();
        let amps = match_amplitudes(&sol, &basis, &setup).unwrap();
        let (k1, k3) = setup.wavenumbers();
        let i = Complex64::new(0.0, 1.0);
        let u_a = dot(&basis.values_at(1.0), &sol.c);
        let u_b = dot(&basis.values_at(8.0), &sol.c);
        let psi_a = amps.a1 * cis(k1 * 1.0) + amps.b1 * cis(-k1 * 1.0);
        let dpsi_a = i * k1 * (amps.a1 * cis(k1 * 1.0) - amps.b1 * cis(-k1 * 1.0));
        let psi_b = amps.a3 * cis(k3 * 8.0) + amps.b3 * cis(-k3 * 8.0);
        let dpsi_b = i * k3 * (amps.a3 * cis(k3 * 8.0) - amps.b3 * cis(-k3 * 8.0));
        let err = |z: Complex64| libm::sqrt(z.norm_sqr());
        assert!(err(psi_a - u_a) <= 1e-10 * u_a.abs());
        assert!(err(dpsi_a - sol.lambda_a * u_a) <= 1e-10 * (sol.lambda_a * u_a).abs());
        assert!(err(psi_b - u_b) <= 1e-10 * u_b.abs());
        assert!(err(dpsi_b - sol.lambda_b * u_b) <= 1e-10 * (sol.lambda_b * u_b).abs());
    }

    #[test]
    fn rescaling_coefficients_leaves_transmission_unchanged() {
        let basis = BasisSet::new(kappa_grid(0.5, 0.5, 3.0).unwrap(), 1.0, 8.0).unwrap();
        let profile = PotentialProfile::ExponentialStep { v0: 0.5, a: 1.0 };
        let setup = ScatteringSetup::new(1.0, 8.0, 0.0, 0.0, 0.25).unwrap();
        let (sys, _) = assemble_all(&basis, &profile, &setup, &QuadratureSpec::default()).unwrap();
        let (k1, k3) = setup.wavenumbers();
        let mut sol = inner_solution(&sys, 2.0).unwrap();
        let mut sol_t = inner_solution(&sys, 8.0).unwrap();
        let amps = match_amplitudes(&sol, &basis, &setup).unwrap();
        let amps_t = match_amplitudes(&sol_t, &basis, &setup).unwrap();
        let (r0, t0) = reflection_transmission(&amps, &amps_t, k1, k3).unwrap();
        for v in sol.c.iter_mut() {
            *v *= -3.7;
        }
        for v in sol_t.c.iter_mut() {
            *v *= 0.002;
        }
        let amps = match_amplitudes(&sol, &basis, &setup).unwrap();
        let amps_t = match_amplitudes(&sol_t, &basis, &setup).unwrap();
        let (r1, t1) = reflection_transmission(&amps, &amps_t, k1, k3).unwrap();
        assert!((r1 - r0).abs() <= 1e-12);
        assert!((t1 - t0).abs() <= 1e-12);
    }

    #[test]
    fn pipeline_smoke_on_decaying_step() {
        let basis = BasisSet::new(kappa_grid(0.1, 0.1, 6.0).unwrap(), 1.0, 8.0).unwrap();
        let profile = PotentialProfile::ExponentialStep { v0: 0.5, a: 1.0 };
        let setup = ScatteringSetup::new(1.0, 8.0, 0.0, 0.0, 0.125).unwrap();
        let out =
            solve_tunneling(&profile, &setup, &basis, 2.0, 8.0, &QuadratureSpec::default())
                .unwrap();
        assert!((out.t - 0.4793).abs() < 2e-3, "T = {}", out.t);
        assert!(out.unitarity_defect <= 5e-3);
        assert!(out.r > 0.0 && out.r < 1.0);
        assert!((out.e_av / 0.125 - 1.0).abs() < 0.03);
        assert!(out.cond_indicator >= 1.0);
        assert_relative_eq!(out.e, 0.125);
    }

    #[test]
    fn pole_adjacent_slope_heals_by_perturbation() {
        // At E = 0.4 the λ(b) = 2 solve sits at a pole of λ(a): the coefficient
        // vector lands in the overlap's numerical null space and E_av degenerates.
        // The pipeline must step the slope away and still return a sound result.
        let basis = BasisSet::new(kappa_grid(0.1, 0.1, 6.0).unwrap(), 1.0, 8.0).unwrap();
        let profile = PotentialProfile::ExponentialStep { v0: 0.5, a: 1.0 };
        let setup = ScatteringSetup::new(1.0, 8.0, 0.0, 0.0, 0.4).unwrap();
        let out = solve_tunneling(&profile, &setup, &basis, 2.0, 8.0, &QuadratureSpec::default())
            .unwrap();
        assert!(out.unitarity_defect <= 1e-4, "defect = {}", out.unitarity_defect);
        assert!((out.e_av / 0.4 - 1.0).abs() < 0.02, "E_av = {}", out.e_av);
        assert!((out.t - 0.884048).abs() < 1e-3, "T = {}", out.t);
    }

    #[test]
    fn inconsistent_average_energy_heals_by_perturbation() {
        // Near E = 1.2 the λ(b) = 1 route on the linear step picks up a
        // resonance admixture: flux balance stays fine (the admixture only
        // rescales boundary ratios) but its raw E_av drifts past 3% while the
        // second route stays put. The two-route consistency check must catch
        // this and re-solve on a stepped slope.
        let e = 0.1 * 12.0;
        let basis = BasisSet::new(kappa_grid(0.1, 0.1, 6.0).unwrap(), 1.0, 3.0).unwrap();
        let profile = PotentialProfile::LinearStep { v0: 1.0, b: 3.0 };
        let setup = ScatteringSetup::new(1.0, 3.0, 0.0, 0.0, e).unwrap();
        let out = solve_tunneling(&profile, &setup, &basis, 1.0, 4.0, &QuadratureSpec::default())
            .unwrap();
        assert!(out.unitarity_defect <= 1e-4, "defect = {}", out.unitarity_defect);
        assert!((out.e_av / e - 1.0).abs() < 1.5e-2, "E_av = {}", out.e_av);
        assert!((out.t - 0.375323).abs() < 1e-3, "T = {}", out.t);
    }

    #[test]
    fn equal_imposed_derivatives_rejected() {
        let basis = BasisSet::new(vec![0.5, 1.0], 1.0, 8.0).unwrap();
        let profile = PotentialProfile::ExponentialStep { v0: 0.5, a: 1.0 };
        let setup = ScatteringSetup::new(1.0, 8.0, 0.0, 0.0, 0.25).unwrap();
        assert!(matches!(
            solve_tunneling(&profile, &setup, &basis, 2.0, 2.0, &QuadratureSpec::default()),
            Err(Error::InvalidArgument(_))
        ));
    }
}
