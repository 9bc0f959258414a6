//! Sweep execution: one solve per energy on a bounded worker pool.

use crate::config::RunConfig;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use vrm_core::oracles::integrate_reference;
use vrm_core::solver::solve_tunneling;
use vrm_core::TunnelingResult;

/// One sweep row: the energy, the variational result (or the error message the
/// solver produced), and the independent reference integration when enabled.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub e: f64,
    pub result: Result<TunnelingResult, String>,
    /// `(T, R)` from the reference integrator; `None` when the oracle is off.
    pub oracle: Option<Result<(f64, f64), String>>,
}

/// Run every configured energy on up to `workers` threads and return rows in
/// config (ascending-energy) order.
///
/// Failures are per-row: a solver error is recorded in its row and the sweep
/// continues, so the output always has exactly one row per energy. Each row is
/// computed independently of the others, which makes the result — and any file
/// exported from it — identical for every worker count.
pub fn run_sweep(cfg: &RunConfig, workers: usize) -> Vec<SweepRow> {
    let n = cfg.energies.len();
    let workers = workers.clamp(1, n.max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<SweepRow>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let row = compute_row(cfg, cfg.energies[i]);
                *slots[i].lock().unwrap() = Some(row);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .unwrap()
                .expect("every slot filled: indices are claimed exactly once")
        })
        .collect()
}

fn compute_row(cfg: &RunConfig, e: f64) -> SweepRow {
    let result = cfg
        .setup_for(e)
        .and_then(|setup| {
            solve_tunneling(
                &cfg.profile,
                &setup,
                &cfg.basis,
                cfg.lambda_b,
                cfg.lambda_b_tilde,
                &cfg.quad,
            )
        })
        .map_err(|err| err.to_string());
    let oracle = cfg.oracle.then(|| {
        cfg.setup_for(e)
            .and_then(|setup| integrate_reference(&cfg.profile, &setup, cfg.oracle_tol))
            .map_err(|err| err.to_string())
    });
    SweepRow { e, result, oracle }
}

/// Multi-line summary of every failed row, or `None` for a clean sweep.
pub fn error_summary(rows: &[SweepRow]) -> Option<String> {
    let mut lines = Vec::new();
    for row in rows {
        if let Err(msg) = &row.result {
            lines.push(format!("E = {}: solver: {msg}", row.e));
        }
        if let Some(Err(msg)) = &row.oracle {
            lines.push(format!("E = {}: oracle: {msg}", row.e));
        }
    }
    if lines.is_empty() {
        None
    } else {
        lines.insert(0, format!("{} row(s) failed:", lines.len()));
        Some(lines.join("\n  "))
    }
}
