use super::Levels;
use crate::matroid::MatroidInstance;

/// Recomputes the greedy base from scratch, keeping frozen elements pinned.
#[derive(Clone, Debug)]
pub(crate) struct NaiveAux<'a> {
    matroid: &'a MatroidInstance,
    faulty: bool,
}

impl<'a> NaiveAux<'a> {
    pub(crate) fn build(matroid: &'a MatroidInstance, faulty: bool, state: &mut Levels) -> Self {
        let aux = Self { matroid, faulty };
        for e in aux.greedy(state) {
            state.in_base[e] = true;
        }
        aux
    }

    fn greedy(&self, state: &Levels) -> Vec<usize> {
        let weights: Vec<f64> = state.level.iter().map(|&l| -f64::from(l)).collect();
        let pinned: Vec<usize> = (0..state.frozen.len()).filter(|&e| state.frozen[e]).collect();
        self.matroid.max_weight_base_pinned(&weights, &pinned).into_vec()
    }

    pub(crate) fn decrease(&mut self, e: usize, state: &mut Levels) -> Option<usize> {
        if self.faulty {
            return None;
        }
        let fresh = self.greedy(state);
        let mut added = None;
        let mut now = vec![false; state.in_base.len()];
        for &f in &fresh {
            now[f] = true;
            if !state.in_base[f] {
                assert!(added.replace(f).is_none(), "one decrease swaps at most one element");
            }
        }
        for (g, (&was, &is)) in state.in_base.iter().zip(&now).enumerate() {
            assert!(!was || is || g == e, "only the decreased element may leave");
        }
        state.in_base = now;
        added
    }
}
