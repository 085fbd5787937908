//! Reduction of function symbols modulo ODE relations.
//!
//! A rule `σ^(k) = rhs` rewrites the `k`-th derivative of `σ`. Higher
//! derivatives are obtained by differentiating the replacement and reducing
//! again; the results are memoized.

use std::collections::HashMap;

use parking_lot::Mutex;

use crate::atom::{sym, Atom, Symbol};
use crate::expr::Expr;

#[derive(Debug, Clone)]
struct Rule {
    name: Symbol,
    arg: Symbol,
    order: u32,
    rhs: Expr,
}

#[derive(Debug, Default)]
pub struct RuleSet {
    rules: Vec<Rule>,
    cache: Mutex<HashMap<(usize, u32), Expr>>,
}

impl Clone for RuleSet {
    fn clone(&self) -> Self {
        RuleSet { rules: self.rules.clone(), cache: Mutex::new(self.cache.lock().clone()) }
    }
}

impl RuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `name^(order)(arg) = rhs`. The right-hand side must only involve
    /// lower derivatives of `name`.
    pub fn with(mut self, name: &str, arg: &str, order: u32, rhs: Expr) -> Self {
        self.rules.push(Rule { name: sym(name), arg: sym(arg), order, rhs });
        self.cache.lock().clear();
        self
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn replacement(&self, idx: usize, order: u32) -> Expr {
        let r = &self.rules[idx];
        if order == r.order {
            return r.rhs.clone();
        }
        if let Some(e) = self.cache.lock().get(&(idx, order)) {
            return e.clone();
        }
        let prev = self.replacement(idx, order - 1);
        let e = self.apply(&prev.diff(&r.arg));
        self.cache.lock().insert((idx, order), e.clone());
        e
    }

    /// Rewrites every derivative of a ruled symbol at or above its rule order.
    pub fn apply(&self, e: &Expr) -> Expr {
        if self.rules.is_empty() {
            return e.clone();
        }
        e.map_atoms(&|a| match a {
            Atom::Func { name, arg, order } => self
                .rules
                .iter()
                .position(|r| r.name == *name && r.arg == *arg && *order >= r.order)
                .map(|i| self.replacement(i, *order)),
            _ => None,
        })
    }

    /// Derivative followed by reduction.
    pub fn diff(&self, e: &Expr, v: &str) -> Expr {
        self.apply(&e.diff(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // s'' = -s
        let s = Expr::func("s", "x", 0);
        let rules = RuleSet::new().with("s", "x", 2, -&s);
        let d4 = rules.apply(&Expr::func("s", "x", 4));
        assert!(d4.equals(&s));
        let d3 = rules.apply(&Expr::func("s", "x", 3));
        assert!(d3.equals(&-Expr::func("s", "x", 1)));
    }

    #[test]
    fn variable_coefficient() {
        // s'' = I s / 3
        let s = Expr::func("s", "x", 0);
        let i = Expr::func("I", "x", 0);
        let rules = RuleSet::new().with("s", "x", 2, &(&Expr::rational(1, 3) * &i) * &s);
        let d3 = rules.apply(&Expr::func("s", "x", 3));
        let expect = &Expr::rational(1, 3) * &(&(&Expr::func("I", "x", 1) * &s) + &(&i * &Expr::func("s", "x", 1)));
        assert!(d3.equals(&expect));
    }
}
