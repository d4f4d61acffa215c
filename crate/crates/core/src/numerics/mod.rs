//! Dense linear algebra, a portable RNG and the Adam optimizer.

mod adam;
mod matrix;
mod rng;

pub use adam::{AdamState, BETA1, BETA2, EPS as ADAM_EPS};
pub use matrix::{
    argmax, axpy, dot, l2_norm, l2_normalize, l2_normalize_floor_in_place, l2_normalize_in_place,
    matmul, matmul_transa, matmul_transb, Matrix,
};
pub use rng::Rng;

/// Guard added to the norm when length-normalizing layer inputs.
pub const NORM_EPS: f64 = 1e-8;

/// Overflow-safe `ln(1 + eᵘ)`.
pub fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else if u < -30.0 {
        u.exp()
    } else {
        u.exp().ln_1p()
    }
}

pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable softmax in place.
pub fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    logits.iter_mut().for_each(|v| *v /= sum);
}
