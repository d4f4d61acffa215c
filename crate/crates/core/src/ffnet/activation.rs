use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::sigmoid;

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
const GELU_A: f64 = 0.044_715;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivationKind {
    Relu,
    LeakyRelu(f64),
    Tanh,
    Sigmoid,
    /// tanh approximation of GELU
    Gelu,
}

impl ActivationKind {
    pub const ALL_DEFAULT: [ActivationKind; 5] = [
        ActivationKind::Relu,
        ActivationKind::LeakyRelu(0.01),
        ActivationKind::Tanh,
        ActivationKind::Sigmoid,
        ActivationKind::Gelu,
    ];

    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            ActivationKind::Relu => z.max(0.0),
            ActivationKind::LeakyRelu(s) => {
                if z > 0.0 {
                    z
                } else {
                    s * z
                }
            }
            ActivationKind::Tanh => z.tanh(),
            ActivationKind::Sigmoid => sigmoid(z),
            ActivationKind::Gelu => 0.5 * z * (1.0 + (GELU_C * (z + GELU_A * z * z * z)).tanh()),
        }
    }

    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            ActivationKind::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::LeakyRelu(s) => {
                if z > 0.0 {
                    1.0
                } else {
                    s
                }
            }
            ActivationKind::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            ActivationKind::Sigmoid => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
            ActivationKind::Gelu => {
                let u = GELU_C * (z + GELU_A * z * z * z);
                let t = u.tanh();
                let du = GELU_C * (1.0 + 3.0 * GELU_A * z * z);
                0.5 * (1.0 + t) + 0.5 * z * (1.0 - t * t) * du
            }
        }
    }

    /// Upper bound on |f(z)|, if the activation is bounded.
    pub fn bound(self) -> Option<f64> {
        match self {
            ActivationKind::Tanh | ActivationKind::Sigmoid => Some(1.0),
            _ => None,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            ActivationKind::Relu => 0,
            ActivationKind::LeakyRelu(_) => 1,
            ActivationKind::Tanh => 2,
            ActivationKind::Sigmoid => 3,
            ActivationKind::Gelu => 4,
        }
    }

    /// Inverse of [`tag`](Self::tag). Leaky slope is supplied separately.
    pub fn from_tag(tag: u8, leaky_slope: f64) -> Option<Self> {
        Some(match tag {
            0 => ActivationKind::Relu,
            1 => ActivationKind::LeakyRelu(leaky_slope),
            2 => ActivationKind::Tanh,
            3 => ActivationKind::Sigmoid,
            4 => ActivationKind::Gelu,
            _ => return None,
        })
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActivationKind::Relu => write!(f, "relu"),
            ActivationKind::LeakyRelu(s) => write!(f, "leaky_relu:{s}"),
            ActivationKind::Tanh => write!(f, "tanh"),
            ActivationKind::Sigmoid => write!(f, "sigmoid"),
            ActivationKind::Gelu => write!(f, "gelu"),
        }
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.as_str(), None),
        };
        match (name, arg) {
            ("relu", None) => Ok(ActivationKind::Relu),
            ("leaky_relu", None) => Ok(ActivationKind::LeakyRelu(0.01)),
            ("leaky_relu", Some(a)) => a
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(ActivationKind::LeakyRelu)
                .ok_or_else(|| Error::usage(format!("bad leaky_relu slope `{a}`"))),
            ("tanh", None) => Ok(ActivationKind::Tanh),
            ("sigmoid", None) => Ok(ActivationKind::Sigmoid),
            ("gelu", None) => Ok(ActivationKind::Gelu),
            _ => Err(Error::usage(format!("unknown activation `{s}`"))),
        }
    }
}
