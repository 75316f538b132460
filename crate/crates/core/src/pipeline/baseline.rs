use rand::Rng;

use crate::dynbase::BackendKind;
use crate::error::Result;
use crate::lazy::{lazy_sampling_greedy, LazyGreedyConfig};
use crate::matroid::MatroidInstance;
use crate::oracle::ValuationOracle;
use crate::set::ElementSet;

/// The classic matroid greedy: add the feasible element of largest marginal until no
/// element fits. `Θ(nk)` marginals; ties go to the lowest index.
pub fn baseline_greedy(oracle: &ValuationOracle, matroid: &MatroidInstance) -> Result<ElementSet> {
    let n = matroid.ground_size();
    let mut anchor = oracle.anchor(&[])?;
    let mut state = matroid.indep_new(&[])?;
    let mut dead = vec![false; n];
    while !state.is_full() {
        let mut best: Option<(f64, usize)> = None;
        for e in 0..n {
            if dead[e] || state.chosen().contains(e) {
                continue;
            }
            if !state.can_add(e)? {
                dead[e] = true;
                continue;
            }
            let g = anchor.marginal(e)?;
            if best.is_none_or(|(b, _)| g > b) {
                best = Some((g, e));
            }
        }
        let Some((_, e)) = best else { break };
        state.add(e)?;
        anchor.insert(e)?;
    }
    Ok(state.chosen().clone())
}

/// Extends the independent set `set` to a base by adding elements in index order.
pub fn complete_to_base(matroid: &MatroidInstance, set: &ElementSet) -> Result<ElementSet> {
    let mut state = matroid.indep_new(set)?;
    for e in 0..matroid.ground_size() {
        if state.is_full() {
            break;
        }
        if !state.chosen().contains(e) && state.can_add(e)? {
            state.add(e)?;
        }
    }
    Ok(state.chosen().clone())
}

/// The lazy sampling greedy alone, completed to a base. Returns the base and `|S|`.
pub fn lazy_only<R: Rng + ?Sized>(
    oracle: &ValuationOracle,
    matroid: &MatroidInstance,
    m: f64,
    eps: f64,
    backend: BackendKind,
    rng: &mut R,
) -> Result<(ElementSet, usize)> {
    if m <= 0.0 {
        return Ok((complete_to_base(matroid, &ElementSet::new())?, 0));
    }
    let mut config = LazyGreedyConfig::new(eps, m);
    config.backend = backend;
    let out = lazy_sampling_greedy(oracle, matroid, config, rng)?;
    let size = out.solution.len();
    Ok((complete_to_base(matroid, &out.solution)?, size))
}

/// Best base by enumeration, uncounted. Only for `n ≤ 24` and rank at most 4.
pub fn brute_force_opt(oracle: &ValuationOracle, matroid: &MatroidInstance) -> Option<(ElementSet, f64)> {
    if matroid.ground_size() > 24 || matroid.rank() > 4 {
        return None;
    }
    matroid
        .enumerate_bases()
        .into_iter()
        .map(|b| {
            let v = oracle.peek(&b);
            (b, v)
        })
        .fold(None, |best: Option<(ElementSet, f64)>, (b, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((b, v)),
        })
}
