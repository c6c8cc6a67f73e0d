//! Dense-matrix oracles built directly from closed forms, independent of
//! the gate-level builders.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uqcut::problem::{hamiltonian_diagonal, random_instance, IsingInstance, ScaledInstance};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// `[[sin D, cos D], [cos D, −sin D]]` with `D = diag(C)/K`, block index on
/// the most significant qubit.
pub fn block_encoding_oracle(s: &ScaledInstance) -> CMat {
    let d = hamiltonian_diagonal(s.base()).unwrap();
    let dim = d.len();
    let mut u = CMat::zeros(2 * dim, 2 * dim);
    for (q, &e) in d.iter().enumerate() {
        let x = e / s.k_const();
        u[(q, q)] = c(x.sin());
        u[(q, dim + q)] = c(x.cos());
        u[(dim + q, q)] = c(x.cos());
        u[(dim + q, dim + q)] = c(-x.sin());
    }
    u
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U` with the control on the most significant qubit.
pub fn controlled(u: &CMat) -> CMat {
    let dim = u.nrows();
    let mut m = CMat::zeros(2 * dim, 2 * dim);
    for k in 0..dim {
        m[(k, k)] = c(1.0);
    }
    m.view_mut((dim, dim), (dim, dim)).copy_from(u);
    m
}

/// Anti-diagonal plus signed-diagonal pattern, scaled by `1/√2`: column `c`
/// has `±1` at row `c` (`+` in the first half, `−` in the second) and `+1`
/// at row `N − 1 − c`.
pub fn entanglement_oracle(n: usize) -> CMat {
    let dim = 1usize << n;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMat::zeros(dim, dim);
    for col in 0..dim {
        m[(col, col)] += c(if col < dim / 2 { h } else { -h });
        m[(dim - 1 - col, col)] += c(h);
    }
    m
}

/// Probabilities of `⊗ RY(θ_i)|0⟩`, first angle most significant.
pub fn product_probabilities(thetas: &[f64]) -> Vec<f64> {
    let n = thetas.len();
    (0..1usize << n)
        .map(|q| {
            thetas
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let bit = (q >> (n - 1 - i)) & 1;
                    let (s, co) = (t / 2.0).sin_cos();
                    if bit == 1 { s * s } else { co * co }
                })
                .product()
        })
        .collect()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn hadamard() -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
    let scaled = a / c(2f64.powi(squarings as i32));
    let mut term = identity(a.nrows());
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / c(k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Draws an instance with random size in `sizes` and signed weights,
/// including unary terms.
pub fn random_ising(r: &mut ChaCha8Rng, sizes: &[usize]) -> IsingInstance {
    let n = sizes[r.random_range(0..sizes.len())];
    random_instance(n, 0.5, 5.0, true, false, r.random()).unwrap()
}

pub fn random_angles(r: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k)
        .map(|_| r.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}
