//! Index arithmetic for tensor-product spaces.

use crate::par::{self, Execution};
use crate::{CMatrix, C64};

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every multi-index over `positions`, first position most
/// significant.
pub(crate) fn offsets(dims: &[usize], positions: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &p in positions {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &o in &out {
            for k in 0..dims[p] {
                next.push(o + k * st[p]);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn complement(n: usize, positions: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !positions.contains(i)).collect()
}

/// Precomputed gather/scatter pattern for a local operator.
pub(crate) struct LocalPattern {
    pub target: Vec<usize>,
    pub base: Vec<usize>,
}

impl LocalPattern {
    pub(crate) fn new(dims: &[usize], positions: &[usize]) -> Self {
        let rest = complement(dims.len(), positions);
        LocalPattern {
            target: offsets(dims, positions),
            base: offsets(dims, &rest),
        }
    }

    /// In-place `data <- (U on targets) data` for one state-sized slice.
    pub(crate) fn apply(&self, u: &CMatrix, data: &mut [C64]) {
        let k = self.target.len();
        let mut buf = vec![C64::new(0.0, 0.0); k];
        for &b in &self.base {
            for (j, t) in self.target.iter().enumerate() {
                buf[j] = data[b + t];
            }
            for i in 0..k {
                let mut s = C64::new(0.0, 0.0);
                for (j, x) in buf.iter().enumerate() {
                    s += u[(i, j)] * x;
                }
                data[b + self.target[i]] = s;
            }
        }
    }

    /// [`LocalPattern::apply`] with the per-block products computed under
    /// `exec`; the scatter stays sequential.
    pub(crate) fn apply_with(&self, exec: Execution, u: &CMatrix, data: &mut [C64]) {
        if !exec.is_parallel() || self.base.len() < PARALLEL_MIN_BLOCKS {
            return self.apply(u, data);
        }
        let k = self.target.len();
        let snapshot: &[C64] = data;
        let blocks = par::map(exec, &self.base, |&b| {
            let x: Vec<C64> = self.target.iter().map(|t| snapshot[b + t]).collect();
            (0..k)
                .map(|i| x.iter().enumerate().map(|(j, v)| u[(i, j)] * v).sum::<C64>())
                .collect::<Vec<C64>>()
        });
        for (&b, block) in self.base.iter().zip(blocks) {
            for (t, v) in self.target.iter().zip(block) {
                data[b + t] = v;
            }
        }
    }
}

/// Below this many blocks the parallel split costs more than it saves.
const PARALLEL_MIN_BLOCKS: usize = 256;

/// Map from a permuted register to the original flat index:
/// `result[new_index] = old_index`.
pub(crate) fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    // Enumerating the old positions in the new order gives old offsets in
    // new-index order.
    offsets(dims, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_are_row_major() {
        assert_eq!(strides(&[2, 3, 4]), vec![12, 4, 1]);
    }

    #[test]
    fn offsets_enumerate_in_order() {
        assert_eq!(offsets(&[2, 3], &[1]), vec![0, 1, 2]);
        assert_eq!(offsets(&[2, 3], &[0]), vec![0, 3]);
        assert_eq!(offsets(&[2, 2], &[1, 0]), vec![0, 2, 1, 3]);
    }

    #[test]
    fn identity_permutation() {
        assert_eq!(permutation_map(&[2, 3], &[0, 1]), (0..6).collect::<Vec<_>>());
    }
}
