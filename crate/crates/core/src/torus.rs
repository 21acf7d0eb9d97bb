//! Geometry of the unit torus: wrapped points and minimum-image displacements.

use serde::{Deserialize, Serialize};

/// A point on the unit torus `[0,1)^d`, stored with one coordinate per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

/// Wrap a single coordinate into `[0, 1)`.
#[inline]
pub fn wrap_coord(x: f64) -> f64 {
    let w = x - x.floor();
    // `x - x.floor()` can round up to exactly 1.0 for tiny negative inputs.
    if w >= 1.0 {
        w - 1.0
    } else {
        w
    }
}

/// Map a raw displacement component into the half-open interval `[-1/2, 1/2)`.
#[inline]
pub fn min_image_coord(r: f64) -> f64 {
    let m = r - (r + 0.5).floor();
    if m >= 0.5 {
        m - 1.0
    } else if m < -0.5 {
        m + 1.0
    } else {
        m
    }
}

impl TorusPoint {
    /// Build a point, wrapping every coordinate into `[0,1)`.
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        let mut coords = coords.into();
        for c in coords.iter_mut() {
            *c = wrap_coord(*c);
        }
        TorusPoint { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Translate by `delta` and re-wrap.
    pub fn translate(&self, delta: &[f64]) -> TorusPoint {
        debug_assert_eq!(delta.len(), self.coords.len());
        TorusPoint::new(
            self.coords
                .iter()
                .zip(delta)
                .map(|(c, d)| c + d)
                .collect::<Vec<_>>(),
        )
    }
}

/// Minimum-image displacement `a - b`, each component in `[-1/2, 1/2)`.
///
/// Ties at exactly 1/2 resolve to -1/2 (half-open convention).
pub fn minimum_image(a: &TorusPoint, b: &TorusPoint) -> Vec<f64> {
    debug_assert_eq!(a.dim(), b.dim());
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| min_image_coord(x - y))
        .collect()
}

/// Minimum-image displacement between raw coordinate slices.
#[inline]
pub fn minimum_image_raw(a: &[f64], b: &[f64], out: &mut [f64]) {
    for i in 0..a.len() {
        out[i] = min_image_coord(a[i] - b[i]);
    }
}

/// Euclidean length of a displacement.
#[inline]
pub fn norm(r: &[f64]) -> f64 {
    r.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_idempotent_and_in_range() {
        for &x in &[-3.7, -1.0, -1e-18, 0.0, 0.25, 0.999999, 1.0, 7.3] {
            let w = wrap_coord(x);
            assert!((0.0..1.0).contains(&w), "wrap({x}) = {w}");
            assert_eq!(wrap_coord(w), w);
        }
    }

    #[test]
    fn min_image_basic() {
        let a = TorusPoint::new(vec![0.9]);
        let b = TorusPoint::new(vec![0.2]);
        let r = minimum_image(&a, &b);
        assert!((r[0] - (-0.3)).abs() < 1e-15);
    }

    #[test]
    fn min_image_identity() {
        let a = TorusPoint::new(vec![0.3, 0.8, 0.1]);
        let r = minimum_image(&a, &a);
        assert!(r.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn min_image_half_convention() {
        // Exactly 1/2 apart: the half-open convention picks -1/2.
        let a = TorusPoint::new(vec![0.75]);
        let b = TorusPoint::new(vec![0.25]);
        let r = minimum_image(&a, &b);
        assert_eq!(r[0], -0.5);
    }

    #[test]
    fn min_image_congruent_mod_one() {
        let a = TorusPoint::new(vec![0.13, 0.97]);
        let b = TorusPoint::new(vec![0.64, 0.02]);
        let r = minimum_image(&a, &b);
        for i in 0..2 {
            let diff = a.coords()[i] - b.coords()[i] - r[i];
            assert!((diff - diff.round()).abs() < 1e-12);
            assert!((-0.5..0.5).contains(&r[i]));
        }
    }
}
