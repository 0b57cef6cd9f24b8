use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Scalar;

use super::AgentError;

/// Fully connected layer, `weights` row-major `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn new(inputs: usize, outputs: usize, weights: Vec<T>, bias: Vec<T>) -> Result<Self, AgentError> {
        if weights.len() != inputs * outputs {
            return Err(AgentError::ShapeMismatch { expected: inputs * outputs, got: weights.len() });
        }
        if bias.len() != outputs {
            return Err(AgentError::ShapeMismatch { expected: outputs, got: bias.len() });
        }
        Ok(Self { inputs, outputs, weights, bias })
    }

    fn affine(&self, x: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.inputs)
                .zip(&self.bias)
                .map(|(row, &b)| row.iter().zip(x).fold(b, |acc, (&w, &xi)| acc + w * xi)),
        );
    }
}

/// Per-layer parameter gradients, same layout as the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub weights: Vec<Vec<T>>,
    pub bias: Vec<Vec<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn norm(&self) -> T {
        self.weights.iter().chain(&self.bias).flatten().map(|&g| g * g).sum::<T>().sqrt()
    }

    pub fn scale(&mut self, k: T) {
        for g in self.weights.iter_mut().chain(self.bias.iter_mut()).flatten() {
            *g = *g * k;
        }
    }

    /// Flattened in [`QNetwork::params`] order.
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.bias) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

/// Activations recorded by a forward pass, needed for backprop.
#[derive(Debug, Clone)]
pub struct Trace<T> {
    /// Input to each layer; the last entry is the network output.
    acts: Vec<Vec<T>>,
}

impl<T: Scalar> Trace<T> {
    pub fn output(&self) -> &[T] {
        self.acts.last().expect("trace has output")
    }
}

/// MLP: rectified-linear hidden layers, linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork<T> {
    layers: Vec<Dense<T>>,
}

impl<T: Scalar> QNetwork<T> {
    /// He-uniform weights and zero biases from a seeded stream.
    pub fn new(input: usize, hidden: &[usize], output: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sizes = vec![input];
        sizes.extend_from_slice(hidden);
        sizes.push(output);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (i, o) = (w[0], w[1]);
                let bound = (6.0 / i.max(1) as f64).sqrt();
                let weights = (0..i * o).map(|_| T::of(rng.random_range(-bound..bound))).collect();
                Dense { inputs: i, outputs: o, weights, bias: vec![T::zero(); o] }
            })
            .collect();
        Self { layers }
    }

    pub fn from_layers(layers: Vec<Dense<T>>) -> Result<Self, AgentError> {
        if layers.is_empty() {
            return Err(AgentError::BadConfig("network needs at least one layer".into()));
        }
        for w in layers.windows(2) {
            if w[0].outputs != w[1].inputs {
                return Err(AgentError::ShapeMismatch { expected: w[0].outputs, got: w[1].inputs });
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Dense<T>] {
        &self.layers
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs)
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    pub fn forward(&self, x: &[T]) -> Result<Vec<T>, AgentError> {
        Ok(self.forward_trace(x)?.acts.pop().expect("output"))
    }

    pub fn forward_trace(&self, x: &[T]) -> Result<Trace<T>, AgentError> {
        if x.len() != self.input_size() {
            return Err(AgentError::ShapeMismatch { expected: self.input_size(), got: x.len() });
        }
        let last = self.layers.len() - 1;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for (k, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.outputs);
            layer.affine(acts.last().expect("input"), &mut out);
            if k < last {
                for v in &mut out {
                    *v = v.max(T::zero());
                }
            }
            acts.push(out);
        }
        Ok(Trace { acts })
    }

    pub fn zero_gradients(&self) -> Gradients<T> {
        Gradients {
            weights: self.layers.iter().map(|l| vec![T::zero(); l.weights.len()]).collect(),
            bias: self.layers.iter().map(|l| vec![T::zero(); l.bias.len()]).collect(),
        }
    }

    /// Accumulates `d loss / d params` into `grads` given `d loss / d output`.
    pub fn backward(&self, trace: &Trace<T>, d_out: &[T], grads: &mut Gradients<T>) {
        let mut delta = d_out.to_vec();
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let input = &trace.acts[k];
            let gw = &mut grads.weights[k];
            for (o, &d) in delta.iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                grads.bias[k][o] = grads.bias[k][o] + d;
                let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                for (g, &x) in row.iter_mut().zip(input) {
                    *g = *g + d * x;
                }
            }
            if k == 0 {
                break;
            }
            // through the affine map, then the rectifier of the previous layer
            let mut prev = vec![T::zero(); layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (p, &w) in prev.iter_mut().zip(row) {
                    *p = *p + d * w;
                }
            }
            for (p, &a) in prev.iter_mut().zip(input) {
                if a <= T::zero() {
                    *p = T::zero();
                }
            }
            delta = prev;
        }
    }

    /// `params -= lr * grads`.
    pub fn apply_gradients(&mut self, grads: &Gradients<T>, lr: T) {
        for (k, layer) in self.layers.iter_mut().enumerate() {
            for (w, &g) in layer.weights.iter_mut().zip(&grads.weights[k]) {
                *w = *w - lr * g;
            }
            for (b, &g) in layer.bias.iter_mut().zip(&grads.bias[k]) {
                *b = *b - lr * g;
            }
        }
    }

    /// All parameters, layer by layer, weights before biases.
    pub fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_params(&mut self, params: &[T]) -> Result<(), AgentError> {
        if params.len() != self.n_params() {
            return Err(AgentError::ShapeMismatch { expected: self.n_params(), got: params.len() });
        }
        let mut it = params.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *w = it.next().expect("length checked");
            }
        }
        Ok(())
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| a.inputs == b.inputs && a.outputs == b.outputs)
    }

    /// Overwrites every parameter with `other`'s.
    pub fn copy_from(&mut self, other: &Self) -> Result<(), AgentError> {
        if !self.same_shape(other) {
            return Err(AgentError::ShapeMismatch { expected: self.n_params(), got: other.n_params() });
        }
        self.layers.clone_from(&other.layers);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_outputs_zero() {
        let mut net = QNetwork::<f64>::new(6, &[4], 3, 1);
        net.set_params(&vec![0.0; net.n_params()]).unwrap();
        assert_eq!(net.forward(&[1.0, -2.0, 3.0, 0.5, 9.0, -1.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn hand_sized_network() {
        // 2 inputs -> 1 hidden (relu) -> 2 outputs
        let hidden = Dense::new(2, 1, vec![0.5, -1.0], vec![0.25]).unwrap();
        let out = Dense::new(1, 2, vec![2.0, -3.0], vec![0.1, 0.2]).unwrap();
        let net = QNetwork::from_layers(vec![hidden, out]).unwrap();
        // h = relu(0.5*2 - 1*0.5 + 0.25) = 0.75; q = [1.5 + 0.1, -2.25 + 0.2]
        let q: Vec<f64> = net.forward(&[2.0, 0.5]).unwrap();
        assert!((q[0] - 1.6).abs() < 1e-12);
        assert!((q[1] + 2.05).abs() < 1e-12);
        // negative pre-activation is clipped: h = relu(0 - 3 + 0.25) = 0
        assert_eq!(net.forward(&[0.0, 3.0]).unwrap(), vec![0.1, 0.2]);
    }

    #[test]
    fn shape_errors() {
        let net = QNetwork::<f32>::new(3, &[2], 1, 0);
        assert!(matches!(net.forward(&[1.0]), Err(AgentError::ShapeMismatch { .. })));
        let other = QNetwork::<f32>::new(4, &[2], 1, 0);
        let mut a = net.clone();
        assert!(a.copy_from(&other).is_err());
    }

    #[test]
    fn seeded_init_is_reproducible() {
        assert_eq!(QNetwork::<f64>::new(5, &[8, 8], 2, 3), QNetwork::<f64>::new(5, &[8, 8], 2, 3));
        assert_ne!(QNetwork::<f64>::new(5, &[8, 8], 2, 3), QNetwork::<f64>::new(5, &[8, 8], 2, 4));
    }
}
