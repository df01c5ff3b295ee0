//! Compensated, order-deterministic summation.
//!
//! Terms are cut into fixed-size leaves, each leaf is summed sequentially with
//! Neumaier compensation, and the leaf accumulators are merged by a pairwise
//! tree whose shape depends only on the number of leaves. Leaves may be
//! computed on the rayon pool; the result is bit-identical whatever the thread
//! count, because neither the leaf boundaries nor the merge order change.

use num_complex::Complex64;
use rayon::prelude::*;

/// Terms per leaf.
pub const LEAF_SIZE: usize = 256;

/// Below this many terms the leaves are computed on the calling thread.
const PARALLEL_THRESHOLD: usize = 8192;

/// Neumaier (improved Kahan) accumulator for one real component.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: Neumaier) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex terms (components summed separately).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: ComplexNeumaier) {
        self.re.merge(other.re);
        self.im.merge(other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

fn leaf_sum<T, F>(chunk: &[T], f: &F) -> ComplexNeumaier
where
    F: Fn(&T) -> Complex64,
{
    let mut acc = ComplexNeumaier::default();
    for item in chunk {
        acc.add(f(item));
    }
    acc
}

fn tree_merge(mut level: Vec<ComplexNeumaier>) -> ComplexNeumaier {
    if level.is_empty() {
        return ComplexNeumaier::default();
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| {
                let mut acc = pair[0];
                if let Some(rhs) = pair.get(1) {
                    acc.merge(*rhs);
                }
                acc
            })
            .collect();
    }
    level[0]
}

/// Sums `f(item)` over `items` with the fixed leaf/tree reduction.
pub fn sum_complex_by<T, F>(items: &[T], f: F) -> Complex64
where
    T: Sync,
    F: Fn(&T) -> Complex64 + Sync,
{
    let leaves: Vec<ComplexNeumaier> = if items.len() >= PARALLEL_THRESHOLD {
        items
            .par_chunks(LEAF_SIZE)
            .map(|chunk| leaf_sum(chunk, &f))
            .collect()
    } else {
        items
            .chunks(LEAF_SIZE)
            .map(|chunk| leaf_sum(chunk, &f))
            .collect()
    };
    tree_merge(leaves).value()
}

/// Vector-valued variant: `f(item, out)` adds its contribution into `out`
/// (length `dim`); every component follows the same leaf/tree shape.
pub fn sum_vec_by<T, F>(items: &[T], dim: usize, f: F) -> Vec<Complex64>
where
    T: Sync,
    F: Fn(&T, &mut [Complex64]) + Sync,
{
    let leaf = |chunk: &[T]| {
        let mut acc = vec![ComplexNeumaier::default(); dim];
        let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
        for item in chunk {
            scratch.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            f(item, &mut scratch);
            for (a, z) in acc.iter_mut().zip(&scratch) {
                a.add(*z);
            }
        }
        acc
    };
    let leaves: Vec<Vec<ComplexNeumaier>> = if items.len() >= PARALLEL_THRESHOLD {
        items.par_chunks(LEAF_SIZE).map(leaf).collect()
    } else {
        items.chunks(LEAF_SIZE).map(leaf).collect()
    };
    (0..dim)
        .map(|d| tree_merge(leaves.iter().map(|l| l[d]).collect()).value())
        .collect()
}

pub fn sum_real_by<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    sum_complex_by(items, |item| Complex64::new(f(item), 0.0)).re
}

pub fn sum_complex(terms: &[Complex64]) -> Complex64 {
    sum_complex_by(terms, |z| *z)
}

pub fn sum_real(terms: &[f64]) -> f64 {
    sum_real_by(terms, |x| *x)
}
