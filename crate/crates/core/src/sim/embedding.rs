use rand::Rng;
use serde::{Deserialize, Serialize};

/// Uniform order statistics built from normalized exponential partial sums:
/// `y_i = (e_1 + ... + e_i) / (e_1 + ... + e_{n+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub y: Vec<f64>,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.y.first().is_none_or(|&y| y > 0.0)
            && self.y.last().is_none_or(|&y| y < 1.0)
            && self.y.windows(2).all(|w| w[0] < w[1])
    }
}

/// Draws `n + 1` unit exponentials by inverse CDF and normalizes their
/// partial sums. Exactly `n + 1` uniforms are consumed.
pub fn exponential_embedding<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Embedding {
    let mut partial = Vec::with_capacity(n + 1);
    let mut total = 0.0;
    for _ in 0..=n {
        let u: f64 = rng.gen();
        let u = if u == 0.0 { f64::MIN_POSITIVE } else { u };
        total += -u.ln();
        partial.push(total);
    }
    partial.pop();
    for p in &mut partial {
        *p /= total;
    }
    Embedding { y: partial }
}
