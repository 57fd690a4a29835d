//! Procedural binary test images: white shapes (1) on black (0), centered.

use std::f64::consts::{FRAC_PI_2, PI};

use elastica_core::ScalarField64;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TestShape {
    /// Filled disk of radius 0.3·size.
    Ball,
    /// Filled square of side size/2.
    Square,
    /// Five-pointed star, outer radius 0.4·size, inner 0.16·size.
    Star,
    /// Ring of mean radius 0.3·size and width 0.12·size.
    Circle,
}

fn inside_polygon(x: f64, y: f64, vertices: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let mut prev = vertices[vertices.len() - 1];
    for &cur in vertices {
        if (cur.1 > y) != (prev.1 > y)
            && x < (prev.0 - cur.0) * (y - cur.1) / (prev.1 - cur.1) + cur.0
        {
            inside = !inside;
        }
        prev = cur;
    }
    inside
}

fn star_vertices(outer: f64, inner: f64) -> Vec<(f64, f64)> {
    (0..10)
        .map(|k| {
            let r = if k % 2 == 0 { outer } else { inner };
            let phi = FRAC_PI_2 + k as f64 * PI / 5.0;
            (r * phi.cos(), r * phi.sin())
        })
        .collect()
}

/// A `size × size` image of `shape`. Pixel `(i, j)` is sampled at its center.
pub fn generate(shape: TestShape, size: usize) -> Result<ScalarField64> {
    let n = size as f64;
    let c = (n - 1.0) / 2.0;
    let star = star_vertices(0.4 * n, 0.16 * n);
    let field = ScalarField64::from_fn(size, size, |i, j| {
        let (x, y) = (i as f64 - c, c - j as f64);
        let r = x.hypot(y);
        let hit = match shape {
            TestShape::Ball => r <= 0.3 * n,
            TestShape::Square => x.abs() < 0.25 * n && y.abs() < 0.25 * n,
            TestShape::Star => inside_polygon(x, y, &star),
            TestShape::Circle => (r - 0.3 * n).abs() <= 0.06 * n,
        };
        if hit {
            1.0
        } else {
            0.0
        }
    })?;
    Ok(field)
}
