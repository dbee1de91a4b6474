//! Seeded random generators for test inputs.

use morseflow::{DirectedGraph, Extension, SymbolicSignal};
use rand::Rng;

/// Random admissible signal over `g`: a successor walk of `1..=max_len`
/// vertices, an extension rule valid for that walk, a dwell offset that is
/// exactly zero half the time, and a small random anchor.
pub fn random_signal<R: Rng>(rng: &mut R, g: &DirectedGraph, h: f64, max_len: usize) -> SymbolicSignal {
    for _ in 0..1000 {
        let len = rng.random_range(1..=max_len);
        let mut word = vec![rng.random_range(0..g.n_vertices())];
        while word.len() < len {
            let succ = g.successors(*word.last().expect("nonempty"));
            word.push(succ[rng.random_range(0..succ.len())]);
        }
        let first = word[0];
        let last = *word.last().expect("nonempty");
        let periodic_ok = g.has_edge(last, first);
        let frozen_ok = g.has_edge(first, first) && g.has_edge(last, last);
        let extension = match (periodic_ok, frozen_ok) {
            (true, true) => {
                if rng.random_bool(0.5) {
                    Extension::PeriodicWord
                } else {
                    Extension::ConstantEnds
                }
            }
            (true, false) => Extension::PeriodicWord,
            (false, true) => Extension::ConstantEnds,
            (false, false) => continue,
        };
        let tau = if rng.random_bool(0.5) {
            0.0
        } else {
            rng.random_range(0.0..h)
        };
        let anchor = rng.random_range(-3..=3);
        return SymbolicSignal::admissible(g, word, h, tau, anchor, extension)
            .expect("construction satisfies the admissibility rules");
    }
    panic!("no admissible signal found in 1000 draws");
}

/// Random time of the form `k * h / denom` with `|k| <= denom * max_dwells`.
/// For a power-of-two `h` and `denom` these times make the offset arithmetic
/// in signal shifts exact.
pub fn random_dyadic_time<R: Rng>(rng: &mut R, h: f64, denom: i64, max_dwells: i64) -> f64 {
    let k = rng.random_range(-denom * max_dwells..=denom * max_dwells);
    k as f64 * h / denom as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn signals_come_out_admissible_and_varied() {
        let g = DirectedGraph::new(3, [(0, 1), (1, 0), (1, 1), (1, 2), (2, 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut zero_tau = 0;
        for _ in 0..200 {
            let sig = random_signal(&mut rng, &g, 0.5, 5);
            assert!(sig.check_admissible(&g).is_ok());
            assert!((0.0..0.5).contains(&sig.tau()));
            if sig.tau() == 0.0 {
                zero_tau += 1;
            }
        }
        assert!(zero_tau > 50 && zero_tau < 150);
    }

    #[test]
    fn dyadic_times_compose_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let s = random_dyadic_time(&mut rng, 0.25, 64, 8);
            let t = random_dyadic_time(&mut rng, 0.25, 64, 8);
            let direct = s + t;
            let k = (direct / (0.25 / 64.0)).round();
            assert_eq!(direct, k * (0.25 / 64.0));
        }
    }
}
