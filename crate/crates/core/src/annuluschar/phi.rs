//! Averages over `φ ∈ [0, 2π)` of integrands that are smooth between finitely
//! many breakpoints. The breakpoints are where a discrete key (typically the
//! band signature of the a-points of `f − e^{iφ}`) changes; they are located
//! by bisection and every smooth piece gets its own Gauss–Legendre rule.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::Result;
use crate::quad::gauss_legendre;

const GL_ORDER: usize = 10;
const BREAK_TOL: f64 = 1e-14;
const MAX_DEPTH: usize = 64;

/// `(1/2π) ∫_0^{2π} value(φ) dφ` over `panels` equal panels, each further
/// split where `key` changes.
pub(crate) fn phi_mean<S, K, V>(panels: usize, key: K, value: V) -> Result<f64>
where
    S: PartialEq + Send,
    K: Fn(f64) -> Result<S> + Sync,
    V: Fn(f64) -> Result<f64> + Sync,
{
    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let h = TAU / panels as f64;
    let per_panel: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            let m = 0.5 * (a + b);
            let (ka, km, kb) = (key(a)?, key(m)?, key(b)?);
            let mut cuts = vec![a];
            breakpoints(&key, (a, ka), (m, &km), &mut cuts, 0)?;
            breakpoints(&key, (m, km), (b, &kb), &mut cuts, 0)?;
            cuts.push(b);
            let mut sum = 0.0;
            for w in cuts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for (x, wt) in nodes.iter().zip(&weights) {
                    sum += wt * half * value(mid + half * x)?;
                }
            }
            Ok(sum)
        })
        .collect::<Result<_>>()?;
    Ok(per_panel.iter().sum::<f64>() / TAU)
}

fn breakpoints<S, K>(
    key: &K,
    lo: (f64, S),
    hi: (f64, &S),
    cuts: &mut Vec<f64>,
    depth: usize,
) -> Result<()>
where
    S: PartialEq,
    K: Fn(f64) -> Result<S>,
{
    if lo.1 == *hi.1 {
        return Ok(());
    }
    if hi.0 - lo.0 <= BREAK_TOL || depth >= MAX_DEPTH {
        cuts.push(0.5 * (lo.0 + hi.0));
        return Ok(());
    }
    let m = 0.5 * (lo.0 + hi.0);
    let km = key(m)?;
    let upper_changes = km != *hi.1;
    if km != lo.1 {
        breakpoints(key, lo, (m, &km), cuts, depth + 1)?;
    }
    if upper_changes {
        breakpoints(key, (m, km), hi, cuts, depth + 1)?;
    }
    Ok(())
}
