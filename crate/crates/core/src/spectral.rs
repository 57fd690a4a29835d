//! 2D periodic DFT and the two constant-coefficient solvers built on it.
//!
//! The forward transform is unnormalized and the inverse carries the
//! `1/(M₁N₁)` factor. Under that convention the shift `S⁺φ(i) = φ(i+1)` has
//! symbol `e^{+iz}` with `z = 2πk/M₁`, `k = 0..M₁`, which is all the solvers
//! below rely on.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure_nonnegative, ensure_positive, Result};
use crate::grid::{ScalarField, StaggeredField};
use crate::Real;

/// Complex spectrum of a [`ScalarField`], same layout (`k_j` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    width: usize,
    height: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Coefficient at frequency index `(k_i, k_j)`.
    pub fn get(&self, ki: usize, kj: usize) -> Complex<T> {
        self.data[(kj % self.height) * self.width + ki % self.width]
    }
}

/// Angular frequencies `z = 2πk/n` for `k = 0..n`.
pub fn angular_frequencies<T: Real>(n: usize) -> Vec<T> {
    let step = T::TAU() / T::from_count(n);
    (0..n).map(|k| step * T::from_count(k)).collect()
}

/// Planned row and column transforms for one grid size. Plans are immutable
/// and shareable across threads.
#[derive(Clone)]
pub struct Fft2<T: Real> {
    width: usize,
    height: usize,
    row_forward: Arc<dyn Fft<T>>,
    row_inverse: Arc<dyn Fft<T>>,
    col_forward: Arc<dyn Fft<T>>,
    col_inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for Fft2<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl<T: Real> Fft2<T> {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_forward: planner.plan_fft_forward(width),
            row_inverse: planner.plan_fft_inverse(width),
            col_forward: planner.plan_fft_forward(height),
            col_inverse: planner.plan_fft_inverse(height),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn check(&self, dims: (usize, usize)) {
        assert_eq!(
            dims,
            (self.width, self.height),
            "FFT plan built for another grid size"
        );
    }

    fn transform(&self, buf: &mut [Complex<T>], rows: &Arc<dyn Fft<T>>, cols: &Arc<dyn Fft<T>>) {
        let (w, h) = (self.width, self.height);
        rows.process(buf);
        let mut transposed = vec![Complex::default(); w * h];
        for j in 0..h {
            for i in 0..w {
                transposed[i * h + j] = buf[j * w + i];
            }
        }
        cols.process(&mut transposed);
        for i in 0..w {
            for j in 0..h {
                buf[j * w + i] = transposed[i * h + j];
            }
        }
    }

    pub fn forward(&self, f: &ScalarField<T>) -> ComplexField<T> {
        self.check(f.dims());
        let mut data: Vec<Complex<T>> = f
            .as_slice()
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        self.transform(&mut data, &self.row_forward, &self.col_forward);
        ComplexField {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Normalized inverse, returning the full complex samples.
    pub fn inverse_complex(&self, spectrum: ComplexField<T>) -> ComplexField<T> {
        self.check((spectrum.width, spectrum.height));
        let mut data = spectrum.data;
        self.transform(&mut data, &self.row_inverse, &self.col_inverse);
        let norm = T::one() / T::from_count(self.width * self.height);
        for c in &mut data {
            *c = *c * norm;
        }
        ComplexField {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Normalized inverse keeping the real part, plus the largest discarded
    /// imaginary magnitude.
    pub fn inverse_real(&self, spectrum: ComplexField<T>) -> (ScalarField<T>, T) {
        let samples = self.inverse_complex(spectrum);
        let imag = samples
            .data
            .iter()
            .fold(T::zero(), |m, c| m.max(c.im.abs()));
        let real = samples.data.iter().map(|c| c.re).collect();
        let field = ScalarField::from_vec(self.width, self.height, real)
            .expect("plan dimensions are valid");
        (field, imag)
    }

    /// Solves the coupled 2x2 system for `λ` given the right-hand sides.
    ///
    /// `[γh² + c*(I-S₁⁺)(I-S₁⁻)]λ₁ + c*(I-S₁⁺)(I-S₂⁻)λ₂ = g₁` and the mirrored
    /// equation for `g₂`, diagonalized frequency by frequency.
    pub fn solve_lambda_system(
        &self,
        g1: &ScalarField<T>,
        g2: &ScalarField<T>,
        gamma: T,
        c_star: T,
        h: T,
    ) -> Result<(StaggeredField<T>, T)> {
        ensure_positive("gamma", gamma)?;
        ensure_nonnegative("c*", c_star)?;
        ensure_positive("mesh size h", h)?;
        g1.same_dims(g2)?;
        let symbols = LambdaSystemSymbols::new(self.width, self.height, gamma, c_star, h);
        let f1 = self.forward(g1);
        let f2 = self.forward(g2);
        let mut s1 = Vec::with_capacity(f1.data.len());
        let mut s2 = Vec::with_capacity(f1.data.len());
        for kj in 0..self.height {
            for ki in 0..self.width {
                let k = kj * self.width + ki;
                let [a11, a12, a21, a22] = symbols.matrix(ki, kj);
                let det = symbols.determinant(ki, kj);
                s1.push((a22 * f1.data[k] - a12 * f2.data[k]) / det);
                s2.push((-a21 * f1.data[k] + a11 * f2.data[k]) / det);
            }
        }
        let spec = |data| ComplexField {
            width: self.width,
            height: self.height,
            data,
        };
        let (l1, im1) = self.inverse_real(spec(s1));
        let (l2, im2) = self.inverse_real(spec(s2));
        Ok((StaggeredField::new(l1, l2)?, im1.max(im2)))
    }

    /// Solves `[(I-S₁⁻)(S₁⁺-I) + (I-S₂⁻)(S₂⁺-I) - τh²]u = g`.
    pub fn solve_helmholtz(&self, g: &ScalarField<T>, tau: T, h: T) -> Result<(ScalarField<T>, T)> {
        ensure_positive("tau", tau)?;
        ensure_positive("mesh size h", h)?;
        let w = helmholtz_symbol(self.width, self.height, tau, h);
        let mut spectrum = self.forward(g);
        for (c, &wk) in spectrum.data.iter_mut().zip(w.as_slice()) {
            *c = *c / wk;
        }
        Ok(self.inverse_real(spectrum))
    }
}

/// Forward DFT with a freshly planned transform.
pub fn dft2<T: Real>(f: &ScalarField<T>) -> ComplexField<T> {
    Fft2::new(f.width(), f.height()).forward(f)
}

/// Inverse of [`dft2`], real part only.
pub fn idft2<T: Real>(spectrum: &ComplexField<T>) -> ScalarField<T> {
    Fft2::new(spectrum.width, spectrum.height)
        .inverse_real(spectrum.clone())
        .0
}

/// Per-frequency coefficients of the Fourier-transformed λ-system.
#[derive(Debug, Clone)]
pub struct LambdaSystemSymbols<T> {
    gamma_h2: T,
    c_star: T,
    /// `1 - e^{i z}` along each axis
    forward_i: Vec<Complex<T>>,
    forward_j: Vec<Complex<T>>,
    cos_i: Vec<T>,
    cos_j: Vec<T>,
}

impl<T: Real> LambdaSystemSymbols<T> {
    pub fn new(width: usize, height: usize, gamma: T, c_star: T, h: T) -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zi = angular_frequencies::<T>(width);
        let zj = angular_frequencies::<T>(height);
        Self {
            gamma_h2: gamma * h * h,
            c_star,
            forward_i: zi
                .iter()
                .map(|&z| one - Complex::from_polar(T::one(), z))
                .collect(),
            forward_j: zj
                .iter()
                .map(|&z| one - Complex::from_polar(T::one(), z))
                .collect(),
            cos_i: zi.iter().map(|z| z.cos()).collect(),
            cos_j: zj.iter().map(|z| z.cos()).collect(),
        }
    }

    /// `[a₁₁, a₁₂, a₂₁, a₂₂]` at frequency `(k_i, k_j)`.
    ///
    /// `a₁₁ = γh² - 2c*(cos zᵢ - 1)` and
    /// `a₁₂ = c*(cos zᵢ - 1 + i sin zᵢ)(cos zⱼ - 1 - i sin zⱼ)`, with `a₂₁`
    /// and `a₂₂` mirrored.
    pub fn matrix(&self, ki: usize, kj: usize) -> [Complex<T>; 4] {
        let two = T::lit(2.0);
        let c = self.c_star;
        let (fi, fj) = (self.forward_i[ki], self.forward_j[kj]);
        let a11 = self.gamma_h2 - two * c * (self.cos_i[ki] - T::one());
        let a22 = self.gamma_h2 - two * c * (self.cos_j[kj] - T::one());
        // (1 - e^{iz_i})(1 - e^{-iz_j}) = (e^{iz_i} - 1)(e^{-iz_j} - 1)
        let a12 = fi * fj.conj() * c;
        let a21 = fj * fi.conj() * c;
        [
            Complex::new(a11, T::zero()),
            a12,
            a21,
            Complex::new(a22, T::zero()),
        ]
    }

    /// `D = γ²h⁴ + 2γh²c*(2 - cos zᵢ - cos zⱼ)`.
    pub fn determinant(&self, ki: usize, kj: usize) -> T {
        let two = T::lit(2.0);
        self.gamma_h2 * self.gamma_h2
            + two * self.gamma_h2 * self.c_star * (two - self.cos_i[ki] - self.cos_j[kj])
    }
}

/// Symbol `w = 2(cos zᵢ - 1) + 2(cos zⱼ - 1) - τh²` of the Helmholtz stencil,
/// strictly negative for `τ > 0`.
pub fn helmholtz_symbol<T: Real>(width: usize, height: usize, tau: T, h: T) -> ScalarField<T> {
    let two = T::lit(2.0);
    let zi = angular_frequencies::<T>(width);
    let zj = angular_frequencies::<T>(height);
    let shift = tau * h * h;
    ScalarField::from_fn(width, height, |ki, kj| {
        two * (zi[ki].cos() - T::one()) + two * (zj[kj].cos() - T::one()) - shift
    })
    .expect("grid dimensions validated by caller")
}

/// One-shot λ-system solve.
pub fn solve_lambda_system<T: Real>(
    g1: &ScalarField<T>,
    g2: &ScalarField<T>,
    gamma: T,
    c_star: T,
    h: T,
) -> Result<StaggeredField<T>> {
    Fft2::new(g1.width(), g1.height())
        .solve_lambda_system(g1, g2, gamma, c_star, h)
        .map(|(lambda, _)| lambda)
}

/// One-shot Helmholtz solve.
pub fn solve_helmholtz<T: Real>(g: &ScalarField<T>, tau: T, h: T) -> Result<ScalarField<T>> {
    Fft2::new(g.width(), g.height())
        .solve_helmholtz(g, tau, h)
        .map(|(u, _)| u)
}

/// Applies the λ-system stencil directly in physical space, returning
/// `(g₁, g₂)`. Inverse of [`solve_lambda_system`] up to rounding.
pub fn apply_lambda_operator<T: Real>(
    lambda: &StaggeredField<T>,
    gamma: T,
    c_star: T,
    h: T,
) -> (ScalarField<T>, ScalarField<T>) {
    let (l1, l2) = (lambda.first(), lambda.second());
    let gh2 = gamma * h * h;
    let two = T::lit(2.0);
    // (I-S₁⁺)(I-S₁⁻)λ₁ and (I-S₁⁺)(I-S₂⁻)λ₂
    let d11 = &(&l1.scale(two) - &l1.shifted(1, 0)) - &l1.shifted(-1, 0);
    let d12 = &(&(l2 - &l2.shifted(1, 0)) - &l2.shifted(0, -1)) + &l2.shifted(1, -1);
    // (I-S₂⁺)(I-S₁⁻)λ₁ and (I-S₂⁺)(I-S₂⁻)λ₂
    let d21 = &(&(l1 - &l1.shifted(0, 1)) - &l1.shifted(-1, 0)) + &l1.shifted(-1, 1);
    let d22 = &(&l2.scale(two) - &l2.shifted(0, 1)) - &l2.shifted(0, -1);
    let g1 = &l1.scale(gh2) + &(&d11 + &d12).scale(c_star);
    let g2 = &l2.scale(gh2) + &(&d21 + &d22).scale(c_star);
    (g1, g2)
}

/// Applies `(I-S₁⁻)(S₁⁺-I) + (I-S₂⁻)(S₂⁺-I) - τh²` to `u`.
pub fn apply_helmholtz_operator<T: Real>(u: &ScalarField<T>, tau: T, h: T) -> ScalarField<T> {
    let four = T::lit(4.0);
    let lap = &(&(&(&u.shifted(1, 0) + &u.shifted(-1, 0)) + &u.shifted(0, 1)) + &u.shifted(0, -1))
        - &u.scale(four);
    &lap - &u.scale(tau * h * h)
}
