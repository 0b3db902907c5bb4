use super::{rat_to_f64, Polynomial};

/// A polynomial with coefficients converted to `f64` for repeated evaluation.
///
/// Terms keep the graded order of the source polynomial and are summed in
/// that order.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        CompiledPoly {
            nvars: p.nvars(),
            terms: p
                .terms()
                .map(|(m, c)| (m.exponents().to_vec(), rat_to_f64(c)))
                .collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates at `x`; the caller guarantees `x.len() == nvars`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= xi.powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }
}
