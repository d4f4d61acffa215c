use crate::error::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPS: f64 = 1e-8;

/// Adam moment estimates for one parameter tensor, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub lr: f64,
}

impl AdamState {
    pub fn new(len: usize, lr: f64) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            beta1: BETA1,
            beta2: BETA2,
            eps: EPS,
            lr,
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::dim(
                "adam_step",
                (params.len(), self.m.len()),
                (grads.len(), self.m.len()),
            ));
        }
        self.t += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        let t = i32::try_from(self.t).unwrap_or(i32::MAX);
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut s = AdamState::new(3, 0.01);
        let mut p = vec![1.0, -2.0, 0.5];
        for _ in 0..10 {
            s.step(&mut p, &[0.0; 3]).unwrap();
        }
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
        assert_eq!(s.t, 10);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut s = AdamState::new(1, 0.01);
        let mut p = vec![1.0];
        s.step(&mut p, &[1.0]).unwrap();
        let expected = 1.0 - 0.01 * 1.0 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);
        assert!((p[0] - 0.99).abs() < 1e-9);
    }

    #[test]
    fn five_constant_steps_match_reference() {
        // Hand recursion: with constant g the bias-corrected m̂ = g and
        // v̂ = g² at every t, so each step moves by lr·g/(|g| + eps).
        let mut s = AdamState::new(1, 0.01);
        let mut p = vec![0.0];
        for _ in 0..5 {
            s.step(&mut p, &[2.0]).unwrap();
        }
        let per_step = 0.01 * 2.0 / (2.0 + 1e-8);
        assert!((p[0] - (-5.0 * per_step)).abs() < 1e-12, "{}", p[0]);
        assert!((p[0] + 0.049_999_999_75).abs() < 1e-10);
        assert!(s.v.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut s = AdamState::new(2, 0.01);
        let mut p = vec![0.0; 3];
        assert!(matches!(
            s.step(&mut p, &[0.0; 3]),
            Err(Error::Dimension { .. })
        ));
    }
}
