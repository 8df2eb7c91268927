//! One-hidden-layer networks with sparse first-layer weights.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitKind {
    /// `max(0, sum w * in + bias)`.
    Relu,
    /// `min` over listed inputs of `w * in`; the bias is ignored.
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenUnit {
    pub weights: Vec<(usize, f64)>,
    pub bias: f64,
    pub kind: UnitKind,
}

impl HiddenUnit {
    pub fn relu(weights: Vec<(usize, f64)>, bias: f64) -> Self {
        Self { weights, bias, kind: UnitKind::Relu }
    }

    pub fn min(weights: Vec<(usize, f64)>) -> Self {
        Self { weights, bias: 0.0, kind: UnitKind::Min }
    }

    pub fn activate(&self, input: &[f64]) -> f64 {
        match self.kind {
            UnitKind::Relu => {
                let pre: f64 = self.weights.iter().map(|&(i, w)| w * input[i]).sum::<f64>() + self.bias;
                pre.max(0.0)
            }
            UnitKind::Min => self.weights.iter().map(|&(i, w)| w * input[i]).fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub input_dim: usize,
    pub hidden: Vec<HiddenUnit>,
    /// `(hidden unit index, weight)` pairs.
    pub output: Vec<(usize, f64)>,
    pub output_bias: f64,
}

impl Network {
    /// Validate indices and assemble a network.
    pub fn new(input_dim: usize, hidden: Vec<HiddenUnit>, output: Vec<(usize, f64)>, output_bias: f64) -> Result<Self> {
        for (u, unit) in hidden.iter().enumerate() {
            if let Some(&(i, _)) = unit.weights.iter().find(|&&(i, _)| i >= input_dim) {
                return param(format!("unit {u} reads input {i} but input_dim = {input_dim}"));
            }
            if unit.kind == UnitKind::Min && unit.weights.is_empty() {
                return param(format!("min unit {u} has no inputs"));
            }
        }
        if let Some(&(u, _)) = output.iter().find(|&&(u, _)| u >= hidden.len()) {
            return param(format!("output reads unit {u} but there are {} units", hidden.len()));
        }
        Ok(Self { input_dim, hidden, output, output_bias })
    }

    /// A network that ignores its input and returns `value`.
    pub fn constant(input_dim: usize, value: f64) -> Self {
        Self { input_dim, hidden: Vec::new(), output: Vec::new(), output_bias: value }
    }

    pub fn hidden_activations(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_dim {
            return param(format!("input length {} does not match network input_dim {}", input.len(), self.input_dim));
        }
        Ok(self.hidden.iter().map(|u| u.activate(input)).collect())
    }

    pub fn eval(&self, input: &[f64]) -> Result<f64> {
        let h = self.hidden_activations(input)?;
        Ok(self.output.iter().map(|&(u, w)| w * h[u]).sum::<f64>() + self.output_bias)
    }

    /// Evaluate on a 0/1 input given by its active positions.
    pub fn eval_binary_support(&self, active: &[usize]) -> Result<f64> {
        let mut input = vec![0.0; self.input_dim];
        for &i in active {
            if i >= self.input_dim {
                return param(format!("active position {i} out of range"));
            }
            input[i] = 1.0;
        }
        self.eval(&input)
    }

    /// Total number of nonzero first-layer weights.
    pub fn first_layer_nnz(&self) -> usize {
        self.hidden.iter().map(|u| u.weights.iter().filter(|&&(_, w)| w != 0.0).count()).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let net: Network = serde_json::from_str(json)?;
        Self::new(net.input_dim, net.hidden, net.output, net.output_bias)
    }
}
