//! One-dimensional rules on ℝ: a uniform midpoint grid in `t` pushed through a
//! map `x = φ(t)` with weights `φ'(t)·h`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AxisMap {
    /// `x = t / (1 − t²)` on `(−1, 1)`.
    RationalStretch,
    /// `x = sinh(2 sinh t)` on ℝ.
    #[default]
    DoubleExponential,
}

impl AxisMap {
    pub fn point(self, t: f64) -> (f64, f64) {
        match self {
            AxisMap::RationalStretch => {
                let s = 1.0 - t * t;
                (t / s, (1.0 + t * t) / (s * s))
            }
            AxisMap::DoubleExponential => {
                let u = 2.0 * t.sinh();
                (u.sinh(), 2.0 * t.cosh() * u.cosh())
            }
        }
    }

    /// Parameter `t` with `φ(t) = radius`.
    pub fn parameter_for(self, radius: f64) -> f64 {
        match self {
            AxisMap::RationalStretch => (-1.0 + (1.0 + 4.0 * radius * radius).sqrt()) / (2.0 * radius),
            AxisMap::DoubleExponential => (radius.asinh() / 2.0).asinh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// `count` midpoint nodes covering `[−radius, radius]` in `x`.
    pub fn new(map: AxisMap, radius: f64, count: usize) -> Self {
        let t_max = map.parameter_for(radius);
        let h = 2.0 * t_max / count as f64;
        let (nodes, weights) = (0..count)
            .map(|j| {
                let t = -t_max + (j as f64 + 0.5) * h;
                let (x, dx) = map.point(t);
                (x, dx * h)
            })
            .unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
