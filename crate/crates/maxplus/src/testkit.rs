//! Deterministic case generators and brute-force oracles for the test
//! suites. Not part of the stable API.
//!
//! Generated finite scalars are dyadic rationals (multiples of 1/1024 with
//! magnitude below 2^10), so sums of a handful of them are exact in f64 and
//! algebraic laws can be asserted bitwise.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::MaxPlusMatrix;
use crate::scalar::MaxPlusScalar;
use crate::seed::SeedSpec;

/// Seeded generator of random scalars and matrices for law checking.
pub struct CaseGen {
    rng: ChaCha8Rng,
}

impl CaseGen {
    pub fn new(stream: &SeedSpec) -> Self {
        Self { rng: stream.rng() }
    }

    /// A dyadic finite scalar, or `eps` with probability `eps_prob`.
    pub fn scalar(&mut self, eps_prob: f64) -> MaxPlusScalar {
        if self.rng.gen::<f64>() < eps_prob {
            MaxPlusScalar::EPS
        } else {
            self.finite_scalar()
        }
    }

    pub fn finite_scalar(&mut self) -> MaxPlusScalar {
        let ticks = self.rng.gen_range(-(1 << 20)..=(1 << 20)) as f64;
        MaxPlusScalar::finite(ticks / 1024.0)
    }

    pub fn dim(&mut self, max: usize) -> usize {
        self.rng.gen_range(1..=max)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, eps_prob: f64) -> MaxPlusMatrix {
        let entries = (0..rows * cols).map(|_| self.scalar(eps_prob)).collect();
        MaxPlusMatrix::new(rows, cols, entries).expect("positive dims")
    }

    pub fn finite_matrix(&mut self, rows: usize, cols: usize) -> MaxPlusMatrix {
        self.matrix(rows, cols, 0.0)
    }
}

/// Maximum cycle mean by direct enumeration of all simple cycles of the
/// weighted digraph of `a` (edge `i -> j` exists where `a_ij` is finite).
///
/// Independent of the trace-formula implementation of the spectral radius;
/// feasible for the small dimensions the test suites use.
pub fn max_cycle_mean(a: &MaxPlusMatrix) -> MaxPlusScalar {
    assert!(a.is_square(), "cycle means need a square matrix");
    let n = a.rows();
    let mut best = MaxPlusScalar::EPS;
    let mut path = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    // each simple cycle is enumerated exactly once: rooted at its smallest
    // node, extending only through larger nodes
    for start in 0..n {
        path.push(start);
        visited[start] = true;
        extend_cycles(a, start, &mut path, &mut visited, 0.0, &mut best);
        visited[start] = false;
        path.pop();
    }
    best
}

fn extend_cycles(
    a: &MaxPlusMatrix,
    start: usize,
    path: &mut Vec<usize>,
    visited: &mut [bool],
    weight: f64,
    best: &mut MaxPlusScalar,
) {
    let current = *path.last().expect("nonempty path");
    let closing = a.get(current, start);
    if closing.is_finite() {
        let mean = (weight + closing.as_f64()) / path.len() as f64;
        *best = best.oplus(MaxPlusScalar::finite(mean));
    }
    for next in (start + 1)..a.rows() {
        if visited[next] {
            continue;
        }
        let edge = a.get(current, next);
        if !edge.is_finite() {
            continue;
        }
        visited[next] = true;
        path.push(next);
        extend_cycles(a, start, path, visited, weight + edge.as_f64(), best);
        path.pop();
        visited[next] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_mean_on_known_graphs() {
        let two_cycle: MaxPlusMatrix = "eps,1;2,eps".parse().unwrap();
        assert_eq!(max_cycle_mean(&two_cycle), MaxPlusScalar::finite(1.5));

        let self_loop: MaxPlusMatrix = "3,eps;eps,1".parse().unwrap();
        assert_eq!(max_cycle_mean(&self_loop), MaxPlusScalar::finite(3.0));

        let acyclic: MaxPlusMatrix = "eps,1;eps,eps".parse().unwrap();
        assert!(max_cycle_mean(&acyclic).is_eps());
    }

    #[test]
    fn generated_scalars_are_dyadic_or_eps() {
        let mut cases = CaseGen::new(&SeedSpec::new(0));
        for _ in 0..100 {
            let s = cases.scalar(0.3);
            if s.is_finite() {
                assert_eq!(s.as_f64(), (s.as_f64() * 1024.0).round() / 1024.0);
            }
        }
    }
}
