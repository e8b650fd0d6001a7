//! Seeded inputs shared by the benchmarks.

use colfin::verify::{sample, trial_rng};
use colfin::{Element, FieldSpec, FinitaryMatrix, LatticeNode, StringMatrix, UpperTriangularOracle};

pub const SEED: u64 = 2024;

/// Elements of each sandwich node at the given window.
pub fn sandwich_elements(spec: FieldSpec, window: usize, count: usize) -> Vec<Element> {
    let nodes = [LatticeNode::SLfr, LatticeNode::GLfr, LatticeNode::DscSLfr, LatticeNode::DscGLfr];
    (0..count)
        .map(|t| {
            let rng = &mut trial_rng(SEED, t);
            sample::node_element(spec, rng, nodes[t % nodes.len()], window).expect("sandwich nodes exist over Q and GF(p), p > 2")
        })
        .collect()
}

/// Determinant-1 finitary matrices of window at most `window`.
pub fn special_finitary(spec: FieldSpec, window: usize, count: usize) -> Vec<FinitaryMatrix> {
    (0..count).map(|t| sample::finitary_det_one(spec, &mut trial_rng(SEED, t), window, 4)).collect()
}

pub fn periodic_strings(spec: FieldSpec, max_block: usize, count: usize) -> Vec<StringMatrix> {
    (0..count).map(|t| sample::string(spec, &mut trial_rng(SEED ^ 1, t), true, max_block, 2)).collect()
}

pub fn triangular_prefixes(spec: FieldSpec, size: usize, count: usize) -> Vec<UpperTriangularOracle> {
    (0..count).map(|t| sample::triangular_prefix(spec, &mut trial_rng(SEED ^ 2, t), size, 2)).collect()
}
