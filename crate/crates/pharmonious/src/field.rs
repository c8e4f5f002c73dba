//! Real-valued node data: boundary data F, obstacles Ψ, payoffs G, and
//! iterates of the dynamic programming operator.

use alloc::vec::Vec;

use crate::geometry::Grid;

/// One finite real value per grid node.
///
/// Values are required to be finite everywhere; "no obstacle" is encoded
/// by a finite sentinel below the data range, never by −∞.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps raw per-node values. Panics on non-finite entries.
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(
            values.iter().all(|v| v.is_finite()),
            "scalar fields must be finite at every node"
        );
        ScalarField { values }
    }

    /// Samples a function of the node coordinates over the whole grid.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_values((0..grid.len()).map(|i| f(grid.coords(i))).collect())
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self::from_values(alloc::vec![value; grid.len()])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute difference against another field of equal length.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
