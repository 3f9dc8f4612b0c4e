#![allow(dead_code)]

use nnverify::scenario::random_network;
use nnverify::{Activation, IntervalBox, Network, Sampler};

/// Second, independent forward pass: explicit index loops, and sigmoid via
/// the tanh identity instead of the exp formula used by the library.
pub fn reference_eval(net: &Network<f64>, x: &[f64]) -> Vec<f64> {
    let mut cur = x.to_vec();
    for layer in net.layers() {
        let mut next = vec![0.0; layer.outputs()];
        for (i, out) in next.iter_mut().enumerate() {
            let row = layer.row(i);
            let mut z = layer.bias()[i];
            for j in 0..layer.inputs() {
                z += row[j] * cur[j];
            }
            *out = match layer.activation() {
                Activation::Relu => {
                    if z > 0.0 {
                        z
                    } else {
                        0.0
                    }
                }
                Activation::Sigmoid => 0.5 * (1.0 + (0.5 * z).tanh()),
                Activation::Tanh => {
                    let e = (2.0 * z).exp();
                    if e.is_infinite() {
                        1.0
                    } else {
                        (e - 1.0) / (e + 1.0)
                    }
                }
                Activation::Linear => z,
            };
        }
        cur = next;
    }
    cur
}

/// Random network of the given depth with widths in `1..=max_width` and
/// activations drawn from the whole catalog.
pub fn mixed_network(s: &mut Sampler, depth: usize, max_width: usize, inputs: usize, outputs: usize) -> Network<f64> {
    let mut sizes = vec![inputs];
    for _ in 1..depth {
        sizes.push(1 + s.index(max_width));
    }
    sizes.push(outputs);
    let acts: Vec<Activation> = (0..depth).map(|_| Activation::ALL[s.index(4)]).collect();
    random_network(&sizes, &acts, 1.0, s).unwrap()
}

pub fn random_box(s: &mut Sampler, dim: usize, max_half: f64) -> IntervalBox<f64> {
    let b: Vec<(f64, f64)> = (0..dim)
        .map(|_| {
            let c = s.uniform(-3.0, 3.0);
            let h = s.uniform(0.0, max_half);
            (c - h, c + h)
        })
        .collect();
    IntervalBox::from_bounds(&b).unwrap()
}

pub fn sigmoid_net(sizes: &[usize], seed: u64) -> Network<f64> {
    let acts = vec![Activation::Sigmoid; sizes.len() - 1];
    random_network(sizes, &acts, 1.0, &mut Sampler::new(seed)).unwrap()
}

pub fn bx(b: &[(f64, f64)]) -> IntervalBox<f64> {
    IntervalBox::from_bounds(b).unwrap()
}
