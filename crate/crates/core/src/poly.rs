//! Quadratic pseudo-Boolean polynomials over registry variables.

use std::collections::BTreeMap;

pub type VarId = usize;

/// A variable or its negation `1 − x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: VarId,
    pub neg: bool,
}

impl Lit {
    pub fn pos(var: VarId) -> Self {
        Lit { var, neg: false }
    }

    pub fn neg(var: VarId) -> Self {
        Lit { var, neg: true }
    }

    pub fn negate(self) -> Self {
        Lit { var: self.var, neg: !self.neg }
    }

    pub fn eval(self, x: &[bool]) -> bool {
        x[self.var] != self.neg
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly {
    pub constant: f64,
    pub linear: BTreeMap<VarId, f64>,
    /// Keys are ordered pairs `(i, j)` with `i < j`.
    pub quadratic: BTreeMap<(VarId, VarId), f64>,
}

impl Poly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn add_linear(&mut self, v: VarId, c: f64) {
        *self.linear.entry(v).or_insert(0.0) += c;
    }

    pub fn add_quadratic(&mut self, a: VarId, b: VarId, c: f64) {
        if a == b {
            self.add_linear(a, c);
        } else {
            let key = if a < b { (a, b) } else { (b, a) };
            *self.quadratic.entry(key).or_insert(0.0) += c;
        }
    }

    /// Adds `c · l`.
    pub fn add_lit(&mut self, l: Lit, c: f64) {
        if l.neg {
            self.add_constant(c);
            self.add_linear(l.var, -c);
        } else {
            self.add_linear(l.var, c);
        }
    }

    /// Adds `c · l1 · l2`.
    pub fn add_lit_product(&mut self, l1: Lit, l2: Lit, c: f64) {
        if l1.var == l2.var {
            if l1.neg == l2.neg {
                self.add_lit(l1, c);
            }
            return;
        }
        match (l1.neg, l2.neg) {
            (false, false) => self.add_quadratic(l1.var, l2.var, c),
            (true, false) => {
                self.add_linear(l2.var, c);
                self.add_quadratic(l1.var, l2.var, -c);
            }
            (false, true) => {
                self.add_linear(l1.var, c);
                self.add_quadratic(l1.var, l2.var, -c);
            }
            (true, true) => {
                self.add_constant(c);
                self.add_linear(l1.var, -c);
                self.add_linear(l2.var, -c);
                self.add_quadratic(l1.var, l2.var, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, scale: f64) {
        self.constant += scale * other.constant;
        for (&v, &c) in &other.linear {
            self.add_linear(v, scale * c);
        }
        for (&(a, b), &c) in &other.quadratic {
            self.add_quadratic(a, b, scale * c);
        }
    }

    pub fn eval(&self, x: &[bool]) -> f64 {
        let mut e = self.constant;
        for (&v, &c) in &self.linear {
            if x[v] {
                e += c;
            }
        }
        for (&(a, b), &c) in &self.quadratic {
            if x[a] && x[b] {
                e += c;
            }
        }
        e
    }

    /// Variables appearing with a nonzero coefficient.
    pub fn support(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self
            .linear
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, _)| *v)
            .chain(self.quadratic.iter().filter(|(_, c)| **c != 0.0).flat_map(|((a, b), _)| [*a, *b]))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn literal_products_expand_exactly(a in 0usize..3, b in 0usize..3, na: bool, nb: bool, bits in 0u8..8) {
            let x: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
            let (l1, l2) = (Lit { var: a, neg: na }, Lit { var: b, neg: nb });
            let mut p = Poly::new();
            p.add_lit_product(l1, l2, 1.5);
            let expect = if l1.eval(&x) && l2.eval(&x) { 1.5 } else { 0.0 };
            prop_assert!((p.eval(&x) - expect).abs() < 1e-12);
        }
    }
}
