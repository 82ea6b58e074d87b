use ndarray::{Array1, Array2, Axis, NdFloat};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fully connected network with tanh hidden layers, a bottleneck midpoint,
/// and identity skip connections on matching-width layers. Generic over the
/// scalar so training runs in f32 while gradient checks run in f64.
#[derive(Debug, Clone)]
pub struct Net<T> {
    pub sizes: Vec<usize>,
    /// Weight matrices, input-by-output.
    pub weights: Vec<Array2<T>>,
    pub biases: Vec<Array1<T>>,
    /// Per-layer flag: add the layer input to its activation output.
    pub residual: Vec<bool>,
}

/// Layer widths of the desk-scale preset: `n_layers` weight matrices, hidden
/// width `hidden` contracted 2x at the midpoint, skip connections where the
/// widths allow, every third layer starting from the second.
pub fn desk_architecture(input_dim: usize, hidden: usize, n_layers: usize, output_dim: usize) -> (Vec<usize>, Vec<bool>) {
    let n_hidden = n_layers - 1;
    let mut sizes = Vec::with_capacity(n_layers + 1);
    sizes.push(input_dim);
    for i in 0..n_hidden {
        if n_hidden >= 3 && i == (n_hidden - 1) / 2 {
            sizes.push((hidden / 2).max(1));
        } else {
            sizes.push(hidden);
        }
    }
    sizes.push(output_dim);
    let residual = (0..n_layers)
        .map(|i| i + 1 < n_layers && sizes[i] == sizes[i + 1] && i % 3 == 1)
        .collect();
    (sizes, residual)
}

impl<T: NdFloat> Net<T> {
    /// Xavier-uniform weights, zero biases; deterministic per seed.
    pub fn new(sizes: Vec<usize>, residual: Vec<bool>, seed: u64) -> Self {
        assert_eq!(residual.len() + 1, sizes.len(), "one flag per weight layer");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::with_capacity(sizes.len() - 1);
        let mut biases = Vec::with_capacity(sizes.len() - 1);
        for pair in sizes.windows(2) {
            let (n_in, n_out) = (pair[0], pair[1]);
            let limit = (6.0 / (n_in + n_out) as f64).sqrt();
            let w = Array2::from_shape_fn((n_in, n_out), |_| {
                T::from(rng.gen_range(-limit..limit)).expect("finite init")
            });
            weights.push(w);
            biases.push(Array1::zeros(n_out));
        }
        Self {
            sizes,
            weights,
            biases,
            residual,
        }
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    /// Forward pass; returns the output and every layer activation (the
    /// input first), as needed by `backward`.
    pub fn forward(&self, x: &Array2<T>) -> (Array2<T>, Vec<Array2<T>>) {
        let mut acts = Vec::with_capacity(self.n_layers() + 1);
        acts.push(x.clone());
        let mut h = x.clone();
        for i in 0..self.n_layers() {
            let mut z = h.dot(&self.weights[i]) + &self.biases[i];
            if i + 1 < self.n_layers() {
                z.mapv_inplace(|v| v.tanh());
                if self.residual[i] {
                    z += &h;
                }
            }
            h = z.clone();
            acts.push(z);
        }
        (h, acts)
    }

    /// Backprop of dL/d(output) through the network; returns gradients in
    /// layer order.
    pub fn backward(
        &self,
        acts: &[Array2<T>],
        dy: &Array2<T>,
    ) -> (Vec<Array2<T>>, Vec<Array1<T>>) {
        let n = self.n_layers();
        let mut grad_w: Vec<Array2<T>> = Vec::with_capacity(n);
        let mut grad_b: Vec<Array1<T>> = Vec::with_capacity(n);
        for i in 0..n {
            grad_w.push(Array2::zeros(self.weights[i].dim()));
            grad_b.push(Array1::zeros(self.biases[i].dim()));
        }
        let mut d = dy.clone();
        for i in (0..n).rev() {
            let h_in = &acts[i];
            let dz = if i + 1 < n {
                let out = &acts[i + 1];
                // recover tanh(z): the stored activation minus the skip term
                let tanh_z = if self.residual[i] { out - h_in } else { out.clone() };
                let one = T::one();
                &d * &tanh_z.mapv(|v| one - v * v)
            } else {
                d.clone()
            };
            grad_w[i] = h_in.t().dot(&dz);
            grad_b[i] = dz.sum_axis(Axis(0));
            let mut d_next = dz.dot(&self.weights[i].t());
            if i + 1 < n && self.residual[i] {
                d_next += &d;
            }
            d = d_next;
        }
        (grad_w, grad_b)
    }

    /// Loss of Eq.-style batch-mean summed squared error, plus its output
    /// gradient.
    pub fn loss_and_grad(output: &Array2<T>, target: &Array2<T>) -> (T, Array2<T>) {
        let diff = output - target;
        let batch = T::from(output.nrows()).expect("batch size fits scalar");
        let loss = diff.mapv(|v| v * v).sum() / batch;
        let two = T::from(2.0).expect("2");
        let dy = diff.mapv(|v| two * v / batch);
        (loss, dy)
    }
}

/// Adam moment-decay and stability constants.
#[derive(Debug, Clone, Copy)]
pub struct AdamHyper<T> {
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

/// First-moment/second-moment buffers for Adam.
pub struct AdamState<T> {
    m_w: Vec<Array2<T>>,
    v_w: Vec<Array2<T>>,
    m_b: Vec<Array1<T>>,
    v_b: Vec<Array1<T>>,
    t: i32,
}

impl<T: NdFloat> AdamState<T> {
    pub fn new(net: &Net<T>) -> Self {
        Self {
            m_w: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_w: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_b: net.biases.iter().map(|b| Array1::zeros(b.dim())).collect(),
            v_b: net.biases.iter().map(|b| Array1::zeros(b.dim())).collect(),
            t: 0,
        }
    }

    pub fn step(
        &mut self,
        net: &mut Net<T>,
        grad_w: &[Array2<T>],
        grad_b: &[Array1<T>],
        lr: T,
        hyper: &AdamHyper<T>,
    ) {
        self.t += 1;
        let one = T::one();
        let AdamHyper { beta1, beta2, eps } = *hyper;
        let bc1 = one - beta1.powi(self.t);
        let bc2 = one - beta2.powi(self.t);
        for i in 0..net.weights.len() {
            self.m_w[i].zip_mut_with(&grad_w[i], |m, &g| *m = beta1 * *m + (one - beta1) * g);
            self.v_w[i].zip_mut_with(&grad_w[i], |v, &g| *v = beta2 * *v + (one - beta2) * g * g);
            ndarray::Zip::from(&mut net.weights[i])
                .and(&self.m_w[i])
                .and(&self.v_w[i])
                .for_each(|w, &m, &v| *w -= lr * (m / bc1) / ((v / bc2).sqrt() + eps));
            self.m_b[i].zip_mut_with(&grad_b[i], |m, &g| *m = beta1 * *m + (one - beta1) * g);
            self.v_b[i].zip_mut_with(&grad_b[i], |v, &g| *v = beta2 * *v + (one - beta2) * g * g);
            ndarray::Zip::from(&mut net.biases[i])
                .and(&self.m_b[i])
                .and(&self.v_b[i])
                .for_each(|b, &m, &v| *b -= lr * (m / bc1) / ((v / bc2).sqrt() + eps));
        }
    }
}

/// Plain gradient-descent update.
pub fn sgd_step<T: NdFloat>(net: &mut Net<T>, grad_w: &[Array2<T>], grad_b: &[Array1<T>], lr: T) {
    for i in 0..net.weights.len() {
        net.weights[i].zip_mut_with(&grad_w[i], |w, &g| *w -= lr * g);
        net.biases[i].zip_mut_with(&grad_b[i], |b, &g| *b -= lr * g);
    }
}

/// Compare analytic gradients against central finite differences; returns the
/// worst relative error over every weight and bias. f64 only: f32 cannot
/// resolve the difference quotients.
pub fn gradient_check(net: &mut Net<f64>, x: &Array2<f64>, y: &Array2<f64>, h: f64) -> f64 {
    let (out, acts) = net.forward(x);
    let (_, dy) = Net::loss_and_grad(&out, y);
    let (grad_w, grad_b) = net.backward(&acts, &dy);

    let loss_of = |net: &Net<f64>| {
        let (out, _) = net.forward(x);
        Net::loss_and_grad(&out, y).0
    };
    let mut worst: f64 = 0.0;
    for li in 0..net.n_layers() {
        let (rows, cols) = net.weights[li].dim();
        for r in 0..rows {
            for c in 0..cols {
                let orig = net.weights[li][[r, c]];
                net.weights[li][[r, c]] = orig + h;
                let lp = loss_of(net);
                net.weights[li][[r, c]] = orig - h;
                let lm = loss_of(net);
                net.weights[li][[r, c]] = orig;
                let numeric = (lp - lm) / (2.0 * h);
                let analytic = grad_w[li][[r, c]];
                let denom = analytic.abs().max(numeric.abs()).max(1e-6);
                worst = worst.max((analytic - numeric).abs() / denom);
            }
        }
        for (c, &analytic) in grad_b[li].iter().enumerate() {
            let orig = net.biases[li][c];
            net.biases[li][c] = orig + h;
            let lp = loss_of(net);
            net.biases[li][c] = orig - h;
            let lm = loss_of(net);
            net.biases[li][c] = orig;
            let numeric = (lp - lm) / (2.0 * h);
            let denom = analytic.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((analytic - numeric).abs() / denom);
        }
    }
    worst
}
