//! Points of the ambient space and the pairing used throughout.
//!
//! A [`Point`] is a finite-dimensional vector with every coordinate finite;
//! the constructor rejects NaN and infinities so downstream arithmetic never
//! has to re-check. The duality pairing is the Euclidean inner product.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinate vectors.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point must have dimension >= 1".into()));
        }
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinitePoint { index });
            }
        }
        Ok(Self { coords })
    }

    /// Internal constructor for arithmetic results. Callers that may produce
    /// overflow (iterated expanding maps) must check [`Point::is_finite`]
    /// before storing the value in a trace.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Point {
        Point::from_raw(self.coords.iter().map(|a| a * k).collect())
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &Point, b: f64) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Unchecked pairing for internal call sites that already validated dims.
    pub(crate) fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Euclidean pairing `<x, y>`; errors on dimension mismatch.
pub fn inner_product(x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(x.dot(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_matches_hand_value() {
        let x = Point::new(vec![1.0, 2.0]).unwrap();
        let y = Point::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(inner_product(&x, &y).unwrap(), 11.0);
    }

    #[test]
    fn inner_product_orthogonal_is_zero() {
        let x = Point::new(vec![1.0, 0.0]).unwrap();
        let y = Point::new(vec![0.0, 5.0]).unwrap();
        assert_eq!(inner_product(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_rejects_dimension_mismatch() {
        let x = Point::new(vec![1.0, 2.0]).unwrap();
        let y = Point::new(vec![1.0]).unwrap();
        assert!(matches!(
            inner_product(&x, &y),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn constructor_rejects_non_finite() {
        assert!(matches!(
            Point::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinitePoint { index: 1 })
        ));
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn arithmetic_helpers() {
        let x = Point::new(vec![1.0, -2.0]).unwrap();
        let y = Point::new(vec![0.5, 4.0]).unwrap();
        assert_eq!(x.add(&y).coords(), &[1.5, 2.0]);
        assert_eq!(x.sub(&y).coords(), &[0.5, -6.0]);
        assert_eq!(x.scale(2.0).coords(), &[2.0, -4.0]);
        assert_eq!(x.lin_comb(2.0, &y, 1.0).coords(), &[2.5, 0.0]);
        assert_eq!(x.dist(&y), (0.25f64 + 36.0).sqrt());
    }
}
