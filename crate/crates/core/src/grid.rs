//! Periodic staggered-grid containers.
//!
//! Every field is an `width x height` array indexed by `(i, j)`, `i` running
//! along x₁ and `j` along x₂, 0-based. Indices wrap modulo the grid size so
//! any neighbor offset is a valid read.
//!
//! The three node families share the same index set:
//!
//! * •-nodes: cell centers, where images and scalar diagnostics live;
//! * ○-nodes: `(i + 1/2, j)`, first components of vector fields;
//! * □-nodes: `(i, j + 1/2)`, second components of vector fields.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{ensure_positive, ElasticaError, Result};
use crate::Real;

/// Mesh spacing together with the grid extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry<T> {
    width: usize,
    height: usize,
    h: T,
}

impl<T: Real> GridGeometry<T> {
    pub fn new(width: usize, height: usize, h: T) -> Result<Self> {
        check_dims(width, height)?;
        ensure_positive("mesh size h", h)?;
        Ok(Self { width, height, h })
    }

    /// Unit spacing, the usual choice for images.
    pub fn unit(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, T::one())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn h(&self) -> T {
        self.h
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width < 2 || height < 2 {
        Err(ElasticaError::GridTooSmall { width, height })
    } else {
        Ok(())
    }
}

/// Real samples on one node family of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, T::zero())
    }

    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    /// Builds a field from samples stored row by row (`j` outer, `i` inner).
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(ElasticaError::LengthMismatch {
                width,
                height,
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                data.push(f(i, j));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major samples (`j` outer, `i` inner).
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        (j % self.height) * self.width + (i % self.width)
    }

    /// Periodic read at a signed offset.
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> T {
        let i = i.rem_euclid(self.width as isize) as usize;
        let j = j.rem_euclid(self.height as isize) as usize;
        self.data[j * self.width + i]
    }

    /// The shifted field `(i, j) -> self(i + di, j + dj)`.
    pub fn shifted(&self, di: isize, dj: isize) -> Self {
        let (w, hgt) = (self.width as isize, self.height as isize);
        let si = di.rem_euclid(w) as usize;
        let sj = dj.rem_euclid(hgt) as usize;
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.height {
            let src = ((j + sj) % self.height) * self.width;
            let row = &self.data[src..src + self.width];
            data.extend_from_slice(&row[si..]);
            data.extend_from_slice(&row[..si]);
        }
        Self {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise combination; panics if the dimensions differ.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.dims(), other.dims(), "field dimensions differ");
        Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(ElasticaError::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            })
        }
    }

    pub fn sum(&self) -> T {
        self.data.iter().copied().sum()
    }

    pub fn mean(&self) -> T {
        self.sum() / T::from_count(self.data.len())
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dims(), other.dims(), "field dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum()
    }

    /// Euclidean norm of the sample vector (no cell measure).
    pub fn norm_l2(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn max(&self) -> T {
        self.data
            .iter()
            .copied()
            .fold(T::neg_infinity(), |m, v| m.max(v))
    }

    pub fn min(&self) -> T {
        self.data
            .iter()
            .copied()
            .fold(T::infinity(), |m, v| m.min(v))
    }

    pub fn scale(&self, factor: T) -> Self {
        self.map(|v| v * factor)
    }

    /// Converts to another precision.
    pub fn cast<U: Real>(&self) -> ScalarField<U> {
        ScalarField {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// Wrapping index: `field[(i, j)]` reads `(i mod width, j mod height)`.
impl<T: Real> Index<(usize, usize)> for ScalarField<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[self.offset(i, j)]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ScalarField<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        let k = self.offset(i, j);
        &mut self.data[k]
    }
}

impl<T: Real> Add for &ScalarField<T> {
    type Output = ScalarField<T>;

    fn add(self, rhs: Self) -> ScalarField<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &ScalarField<T> {
    type Output = ScalarField<T>;

    fn sub(self, rhs: Self) -> ScalarField<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul<T> for &ScalarField<T> {
    type Output = ScalarField<T>;

    fn mul(self, rhs: T) -> ScalarField<T> {
        self.scale(rhs)
    }
}

/// Vector field on the staggered grid: first component at ○-nodes, second at
/// □-nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField<T> {
    first: ScalarField<T>,
    second: ScalarField<T>,
}

impl<T: Real> StaggeredField<T> {
    pub fn new(first: ScalarField<T>, second: ScalarField<T>) -> Result<Self> {
        first.same_dims(&second)?;
        Ok(Self { first, second })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Ok(Self {
            first: ScalarField::zeros(width, height)?,
            second: ScalarField::zeros(width, height)?,
        })
    }

    /// ○-node component.
    pub fn first(&self) -> &ScalarField<T> {
        &self.first
    }

    /// □-node component.
    pub fn second(&self) -> &ScalarField<T> {
        &self.second
    }

    pub fn first_mut(&mut self) -> &mut ScalarField<T> {
        &mut self.first
    }

    pub fn second_mut(&mut self) -> &mut ScalarField<T> {
        &mut self.second
    }

    pub fn into_parts(self) -> (ScalarField<T>, ScalarField<T>) {
        (self.first, self.second)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.first.dims()
    }

    pub fn width(&self) -> usize {
        self.first.width()
    }

    pub fn height(&self) -> usize {
        self.first.height()
    }

    /// Index-paired components `(first(i, j), second(i, j))`.
    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> [T; 2] {
        [self.first[(i, j)], self.second[(i, j)]]
    }

    /// Euclidean length of the index-paired components at every index.
    pub fn paired_magnitude(&self) -> ScalarField<T> {
        self.first.zip_map(&self.second, |a, b| a.hypot(b))
    }

    pub fn map(&self, f: impl Fn(T) -> T + Copy) -> Self {
        Self {
            first: self.first.map(f),
            second: self.second.map(f),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T + Copy) -> Self {
        Self {
            first: self.first.zip_map(&other.first, f),
            second: self.second.zip_map(&other.second, f),
        }
    }

    pub fn dot(&self, other: &Self) -> T {
        self.first.dot(&other.first) + self.second.dot(&other.second)
    }

    pub fn norm_l2(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn cast<U: Real>(&self) -> StaggeredField<U> {
        StaggeredField {
            first: self.first.cast(),
            second: self.second.cast(),
        }
    }
}

// Difference operators. In 1-based notation the backward difference along x₁
// wraps row i = 1 onto i = M₁ and the forward one wraps i = M₁ onto i = 1;
// here both wraps come from `shifted`.

/// `(v(i, j) - v(i-1, j)) / h`.
pub fn diff_backward_1<T: Real>(v: &ScalarField<T>, h: T) -> ScalarField<T> {
    v.zip_map(&v.shifted(-1, 0), |c, w| (c - w) / h)
}

/// `(v(i, j) - v(i, j-1)) / h`.
pub fn diff_backward_2<T: Real>(v: &ScalarField<T>, h: T) -> ScalarField<T> {
    v.zip_map(&v.shifted(0, -1), |c, s| (c - s) / h)
}

/// `(v(i+1, j) - v(i, j)) / h`.
pub fn diff_forward_1<T: Real>(v: &ScalarField<T>, h: T) -> ScalarField<T> {
    v.shifted(1, 0).zip_map(v, |e, c| (e - c) / h)
}

/// `(v(i, j+1) - v(i, j)) / h`.
pub fn diff_forward_2<T: Real>(v: &ScalarField<T>, h: T) -> ScalarField<T> {
    v.shifted(0, 1).zip_map(v, |n, c| (n - c) / h)
}

/// Forward gradient; the components land on ○- and □-nodes respectively.
pub fn grad_plus<T: Real>(v: &ScalarField<T>, h: T) -> StaggeredField<T> {
    StaggeredField {
        first: diff_forward_1(v, h),
        second: diff_forward_2(v, h),
    }
}

/// Backward divergence `∂₁⁻q₁ + ∂₂⁻q₂`, the negative adjoint of [`grad_plus`].
pub fn div_minus<T: Real>(q: &StaggeredField<T>, h: T) -> ScalarField<T> {
    &diff_backward_1(&q.first, h) + &diff_backward_2(&q.second, h)
}

/// Averages a ○-node field onto □-nodes:
/// `[μ₁(i,j+1) + μ₁(i-1,j+1) + μ₁(i,j) + μ₁(i-1,j)] / 4`.
pub fn avg_to_square<T: Real>(mu1: &ScalarField<T>) -> ScalarField<T> {
    let quarter = T::lit(0.25);
    ScalarField::from_fn(mu1.width, mu1.height, |i, j| {
        let (i, j) = (i as isize, j as isize);
        (mu1.at(i, j + 1) + mu1.at(i - 1, j + 1) + mu1.at(i, j) + mu1.at(i - 1, j)) * quarter
    })
    .expect("dimensions already validated")
}

/// Averages a □-node field onto ○-nodes:
/// `[μ₂(i+1,j) + μ₂(i,j) + μ₂(i+1,j-1) + μ₂(i,j-1)] / 4`.
pub fn avg_to_circle<T: Real>(mu2: &ScalarField<T>) -> ScalarField<T> {
    let quarter = T::lit(0.25);
    ScalarField::from_fn(mu2.width, mu2.height, |i, j| {
        let (i, j) = (i as isize, j as isize);
        (mu2.at(i + 1, j) + mu2.at(i, j) + mu2.at(i + 1, j - 1) + mu2.at(i, j - 1)) * quarter
    })
    .expect("dimensions already validated")
}

/// Magnitude of a staggered field at the •-nodes, averaging each component
/// over its two neighbors.
pub fn magnitude_at_bullet<T: Real>(q: &StaggeredField<T>) -> ScalarField<T> {
    let half = T::lit(0.5);
    ScalarField::from_fn(q.width(), q.height(), |i, j| {
        let (i, j) = (i as isize, j as isize);
        let m1 = (q.first.at(i, j) + q.first.at(i - 1, j)) * half;
        let m2 = (q.second.at(i, j) + q.second.at(i, j - 1)) * half;
        m1.hypot(m2)
    })
    .expect("dimensions already validated")
}

/// Divergence at the •-nodes:
/// `[μ₁(i,j) - μ₁(i-1,j) + μ₂(i,j) - μ₂(i,j-1)] / h`.
pub fn divergence_at_bullet<T: Real>(mu: &StaggeredField<T>, h: T) -> ScalarField<T> {
    ScalarField::from_fn(mu.width(), mu.height(), |i, j| {
        let (i, j) = (i as isize, j as isize);
        (mu.first.at(i, j) - mu.first.at(i - 1, j) + mu.second.at(i, j) - mu.second.at(i, j - 1))
            / h
    })
    .expect("dimensions already validated")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ScalarField<f64> {
        ScalarField::from_fn(w, h, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(matches!(
            ScalarField::<f64>::zeros(1, 5),
            Err(ElasticaError::GridTooSmall {
                width: 1,
                height: 5
            })
        ));
        assert!(ScalarField::<f64>::from_vec(2, 2, vec![0.0; 3]).is_err());
        assert!(GridGeometry::<f64>::new(4, 4, 0.0).is_err());
        assert!(StaggeredField::new(
            ScalarField::<f64>::zeros(3, 3).unwrap(),
            ScalarField::zeros(3, 4).unwrap()
        )
        .is_err());
    }

    #[test]
    fn wrapping_reads() {
        let v = ScalarField::from_fn(3, 2, |i, j| (10 * j + i) as f64).unwrap();
        assert_eq!(v.at(-1, 0), 2.0);
        assert_eq!(v.at(3, -1), 10.0);
        assert_eq!(v[(4, 3)], 11.0);
        let s = v.shifted(1, -1);
        for j in 0..2 {
            for i in 0..3 {
                assert_eq!(s[(i, j)], v.at(i as isize + 1, j as isize - 1));
            }
        }
    }

    #[test]
    fn differences_of_constants_vanish() {
        let c = ScalarField::filled(5, 3, 0.7).unwrap();
        for d in [
            diff_backward_1(&c, 1.0),
            diff_backward_2(&c, 0.5),
            diff_forward_1(&c, 2.0),
            diff_forward_2(&c, 1.0),
        ] {
            assert_eq!(d.max_abs(), 0.0);
        }
    }

    #[test]
    fn backward_difference_wraps_on_two_point_axis() {
        // v(1, j) = 0, v(2, j) = 1 in 1-based terms
        let v = ScalarField::from_fn(2, 3, |i, _| i as f64).unwrap();
        let d = diff_backward_1(&v, 1.0);
        for j in 0..3 {
            assert_eq!(d[(0, j)], -1.0);
            assert_eq!(d[(1, j)], 1.0);
        }
    }

    #[test]
    fn linear_field_has_constant_interior_slope() {
        let h = 0.5;
        let v = ScalarField::from_fn(6, 4, |i, j| 3.0 * i as f64 - 2.0 * j as f64).unwrap();
        let d1 = diff_backward_1(&v, h);
        let d2 = diff_forward_2(&v, h);
        for j in 0..4 {
            for i in 1..6 {
                assert_relative_eq!(d1[(i, j)], 3.0 / h);
            }
            // wrap row jumps back by the full ramp
            assert_relative_eq!(d1[(0, j)], -15.0 / h);
        }
        for j in 0..3 {
            for i in 0..6 {
                assert_relative_eq!(d2[(i, j)], -2.0 / h);
            }
        }
    }

    #[test]
    fn second_difference_is_periodic_three_point_stencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 0.7;
        let v = random_field(&mut rng, 5, 4);
        let lap = diff_backward_1(&diff_forward_1(&v, h), h);
        for j in 0..4isize {
            for i in 0..5isize {
                let oracle = (v.at(i + 1, j) - 2.0 * v.at(i, j) + v.at(i - 1, j)) / (h * h);
                assert_relative_eq!(lap.at(i, j), oracle, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn div_of_grad_is_five_point_laplacian() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1.3;
        let v = random_field(&mut rng, 6, 5);
        let lap = div_minus(&grad_plus(&v, h), h);
        for j in 0..5isize {
            for i in 0..6isize {
                let oracle = (v.at(i + 1, j) + v.at(i - 1, j) + v.at(i, j + 1) + v.at(i, j - 1)
                    - 4.0 * v.at(i, j))
                    / (h * h);
                assert_relative_eq!(lap.at(i, j), oracle, epsilon = 1e-12);
            }
        }
        assert!(lap.dot(&v) <= 0.0);
    }

    #[test]
    fn grad_plus_matches_component_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = random_field(&mut rng, 4, 7);
        let g = grad_plus(&v, 0.25);
        assert_eq!(g.first(), &diff_forward_1(&v, 0.25));
        assert_eq!(g.second(), &diff_forward_2(&v, 0.25));
        let flat = grad_plus(&ScalarField::filled(4, 7, 2.0).unwrap(), 1.0);
        assert_eq!(flat.norm_l2(), 0.0);
    }

    #[test]
    fn divergences_telescope_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let q = StaggeredField::new(random_field(&mut rng, 7, 5), random_field(&mut rng, 7, 5))
            .unwrap();
        assert!(div_minus(&q, 1.0).sum().abs() < 1e-12);
        assert!(divergence_at_bullet(&q, 0.3).sum().abs() < 1e-12);
        assert_eq!(
            div_minus(&StaggeredField::zeros(7, 5).unwrap(), 1.0).max_abs(),
            0.0
        );
    }

    #[test]
    fn divergence_at_bullet_equals_div_minus() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = StaggeredField::new(random_field(&mut rng, 5, 6), random_field(&mut rng, 5, 6))
            .unwrap();
        let a = divergence_at_bullet(&q, 0.5);
        let b = div_minus(&q, 0.5);
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
        let c = StaggeredField::new(
            ScalarField::filled(5, 6, 1.5).unwrap(),
            ScalarField::filled(5, 6, -2.0).unwrap(),
        )
        .unwrap();
        assert_eq!(divergence_at_bullet(&c, 1.0).max_abs(), 0.0);
    }

    #[test]
    fn averaging_a_spike() {
        let mut spike = ScalarField::<f64>::zeros(4, 4).unwrap();
        // (2, 2) in 1-based indexing
        spike[(1, 1)] = 1.0;

        let sq = avg_to_square(&spike);
        // μ₁(i,j+1), μ₁(i-1,j+1), μ₁(i,j), μ₁(i-1,j) hit (1,1) from these
        let hits_sq = [(1, 0), (2, 0), (1, 1), (2, 1)];
        for j in 0..4 {
            for i in 0..4 {
                let want = if hits_sq.contains(&(i, j)) { 0.25 } else { 0.0 };
                assert_eq!(sq[(i, j)], want, "square ({i},{j})");
            }
        }

        let ci = avg_to_circle(&spike);
        let hits_ci = [(0, 1), (1, 1), (0, 2), (1, 2)];
        for j in 0..4 {
            for i in 0..4 {
                let want = if hits_ci.contains(&(i, j)) { 0.25 } else { 0.0 };
                assert_eq!(ci[(i, j)], want, "circle ({i},{j})");
            }
        }
    }

    #[test]
    fn averaging_preserves_constants_and_mean() {
        let c = ScalarField::filled(5, 3, -0.3).unwrap();
        for a in [avg_to_square(&c), avg_to_circle(&c)] {
            for &v in a.as_slice() {
                assert_relative_eq!(v, -0.3, epsilon = 1e-15);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = random_field(&mut rng, 6, 4);
        assert_relative_eq!(avg_to_square(&v).mean(), v.mean(), epsilon = 1e-14);
        assert_relative_eq!(avg_to_circle(&v).mean(), v.mean(), epsilon = 1e-14);
    }

    #[test]
    fn averaging_matches_hand_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = random_field(&mut rng, 5, 5);
        let ci = avg_to_circle(&v);
        let sq = avg_to_square(&v);
        for j in 0..5isize {
            for i in 0..5isize {
                let c = (v.at(i + 1, j) + v.at(i, j) + v.at(i + 1, j - 1) + v.at(i, j - 1)) / 4.0;
                let s = (v.at(i, j + 1) + v.at(i - 1, j + 1) + v.at(i, j) + v.at(i - 1, j)) / 4.0;
                assert_relative_eq!(ci.at(i, j), c, epsilon = 1e-15);
                assert_relative_eq!(sq.at(i, j), s, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn magnitude_of_constant_field() {
        let q = StaggeredField::new(
            ScalarField::filled(3, 4, 3.0).unwrap(),
            ScalarField::filled(3, 4, 4.0).unwrap(),
        )
        .unwrap();
        for &m in magnitude_at_bullet(&q).as_slice() {
            assert_relative_eq!(m, 5.0);
        }
        let zero = StaggeredField::<f64>::zeros(3, 4).unwrap();
        assert_eq!(magnitude_at_bullet(&zero).max_abs(), 0.0);
    }

    #[test]
    fn magnitude_matches_hand_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let q = StaggeredField::new(random_field(&mut rng, 4, 6), random_field(&mut rng, 4, 6))
            .unwrap();
        let m = magnitude_at_bullet(&q);
        for j in 0..6isize {
            for i in 0..4isize {
                let a = (q.first().at(i, j) + q.first().at(i - 1, j)) / 2.0;
                let b = (q.second().at(i, j) + q.second().at(i, j - 1)) / 2.0;
                assert_relative_eq!(m.at(i, j), (a * a + b * b).sqrt(), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn single_precision_operators() {
        let v = ScalarField::<f32>::from_fn(4, 4, |i, j| (i * j) as f32).unwrap();
        let lap = div_minus(&grad_plus(&v, 1.0), 1.0);
        assert!(lap.sum().abs() < 1e-4);
    }
}
