//! Exterior calculus on a single coordinate chart.
//!
//! A [`Form`] stores components on increasing multi-indices, encoded as bit
//! masks, relative to *some* basis of one-forms. Calculus (`d`, Lie
//! derivatives) is only meaningful for coordinate components; [`Coframe`]
//! converts between coordinate and coframe components.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use ambient_expr::{Atom, Expr, RuleSet};

use crate::linalg::{expr_inverse, ExprMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("singular {0}")]
    Singular(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0}")]
    Other(String),
}

/// Ordered coordinates, with the rewrite rules in force for derivatives.
#[derive(Debug, Clone)]
pub struct Chart {
    coords: Vec<String>,
    rules: Arc<RuleSet>,
}

impl Chart {
    pub fn new(coords: &[&str]) -> Self {
        let mut seen = std::collections::HashSet::new();
        assert!(coords.iter().all(|c| seen.insert(*c)), "coordinate names must be distinct");
        assert!(!coords.is_empty() && coords.len() <= 7, "chart dimension must be in 1..=7");
        Chart { coords: coords.iter().map(|s| s.to_string()).collect(), rules: Arc::new(RuleSet::new()) }
    }

    pub fn with_rules(&self, rules: RuleSet) -> Self {
        Chart { coords: self.coords.clone(), rules: Arc::new(rules) }
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn index(&self, name: &str) -> Result<usize, GeomError> {
        self.coords.iter().position(|c| c == name).ok_or_else(|| GeomError::UnknownCoordinate(name.to_string()))
    }

    pub fn var(&self, i: usize) -> Expr {
        Expr::var(&self.coords[i])
    }

    /// `∂e/∂xᵢ` followed by the chart's rewrite rules.
    pub fn diff(&self, e: &Expr, i: usize) -> Expr {
        let d = e.diff(&self.coords[i]);
        if self.rules.is_empty() || d.is_zero() {
            d
        } else {
            self.rules.apply(&d)
        }
    }

    pub fn diff_by(&self, e: &Expr, name: &str) -> Result<Expr, GeomError> {
        Ok(self.diff(e, self.index(name)?))
    }

    pub fn reduce(&self, e: &Expr) -> Expr {
        self.rules.apply(e)
    }

    /// `dxᵢ`.
    pub fn dx(&self, i: usize) -> Form {
        Form::basis(self.dim(), &[i])
    }

    pub fn d_coord(&self, name: &str) -> Form {
        self.dx(self.index(name).expect("coordinate"))
    }

    /// Coordinate vector field `∂ᵢ`.
    pub fn partial(&self, i: usize) -> VectorField {
        let mut v = VectorField::zero(self.dim());
        v.comps[i] = Expr::one();
        v
    }

    pub fn partial_by(&self, name: &str) -> VectorField {
        self.partial(self.index(name).expect("coordinate"))
    }
}

/// Simultaneous substitution of coordinates (and of `exp` of coordinates).
pub fn subs_coords(e: &Expr, map: &HashMap<String, Expr>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    e.map_atoms(&|a| match a {
        Atom::Var(s) => map.get(&**s).cloned(),
        Atom::Exp(s) => map.get(&**s).map(Expr::exp),
        _ => None,
    })
}

fn mask_of(idx: &[usize]) -> Option<(u32, bool)> {
    // returns mask and whether the permutation sorting idx is odd
    let mut mask = 0u32;
    let mut odd = false;
    for (k, &i) in idx.iter().enumerate() {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
        odd ^= idx[..k].iter().filter(|&&j| j > i).count() % 2 == 1;
    }
    Some((mask, odd))
}

/// Indices of a mask in increasing order.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `e^A ∧ e^B` relative to `e^{A∪B}` for disjoint masks.
fn wedge_sign(a: u32, b: u32) -> bool {
    let mut odd = false;
    for j in mask_indices(b) {
        odd ^= (a >> (j + 1)).count_ones() % 2 == 1;
    }
    odd
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    dim: usize,
    deg: usize,
    terms: BTreeMap<u32, Expr>,
}

impl Form {
    pub fn zero(dim: usize, deg: usize) -> Self {
        Form { dim, deg, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, e: Expr) -> Self {
        let mut f = Form::zero(dim, 0);
        if !e.is_zero() {
            f.terms.insert(0, e);
        }
        f
    }

    /// `e^{i₁} ∧ … ∧ e^{iₖ}` (zero when an index repeats).
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut f = Form::zero(dim, idx.len());
        if let Some((m, odd)) = mask_of(idx) {
            f.terms.insert(m, if odd { Expr::int(-1) } else { Expr::one() });
        }
        f
    }

    pub fn one_form(comps: Vec<Expr>) -> Self {
        let mut f = Form::zero(comps.len(), 1);
        for (i, c) in comps.into_iter().enumerate() {
            if !c.is_zero() {
                f.terms.insert(1 << i, c);
            }
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> {
        self.terms.iter().map(|(m, e)| (mask_indices(*m), e))
    }

    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    /// Component on the (not necessarily sorted) multi-index.
    pub fn comp(&self, idx: &[usize]) -> Expr {
        match mask_of(idx) {
            Some((m, odd)) => match self.terms.get(&m) {
                Some(e) if odd => -e,
                Some(e) => e.clone(),
                None => Expr::zero(),
            },
            None => Expr::zero(),
        }
    }

    /// Components of a one-form as a vector.
    pub fn as_covector(&self) -> Vec<Expr> {
        assert_eq!(self.deg, 1);
        (0..self.dim).map(|i| self.comp(&[i])).collect()
    }

    fn insert_add(&mut self, m: u32, e: Expr) {
        if e.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = &*x + &e;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, e);
            }
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!((self.dim, self.deg), (other.dim, other.deg), "adding forms of different type");
        let mut out = self.clone();
        for (m, e) in &other.terms {
            out.insert_add(*m, e.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.map(|e| -e)
    }

    pub fn scale(&self, c: &Expr) -> Form {
        if c.is_zero() {
            return Form::zero(self.dim, self.deg);
        }
        self.map(|e| e * c)
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        let mut out = Form::zero(self.dim, self.deg);
        for (m, e) in &self.terms {
            let v = f(e);
            if !v.is_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    pub fn wedge(&self, other: &Form) -> Form {
        assert_eq!(self.dim, other.dim);
        let mut out = Form::zero(self.dim, self.deg + other.deg);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let p = x * y;
                out.insert_add(a | b, if wedge_sign(*a, *b) { -p } else { p });
            }
        }
        out
    }

    /// Exterior derivative of coordinate components.
    pub fn d(&self, chart: &Chart) -> Form {
        assert_eq!(self.dim, chart.dim());
        let mut out = Form::zero(self.dim, self.deg + 1);
        for (m, e) in &self.terms {
            for j in 0..self.dim {
                if m & (1 << j) != 0 {
                    continue;
                }
                let de = chart.diff(e, j);
                if de.is_zero() {
                    continue;
                }
                let odd = (m & ((1 << j) - 1)).count_ones() % 2 == 1;
                out.insert_add(m | (1 << j), if odd { -de } else { de });
            }
        }
        out
    }

    /// `ι_X α` for a vector with components in the dual basis.
    pub fn interior(&self, x: &[Expr]) -> Form {
        assert_eq!(x.len(), self.dim);
        if self.deg == 0 {
            return Form::zero(self.dim, 0);
        }
        let mut out = Form::zero(self.dim, self.deg - 1);
        for (m, e) in &self.terms {
            for (k, i) in mask_indices(*m).into_iter().enumerate() {
                if x[i].is_zero() {
                    continue;
                }
                let p = &x[i] * e;
                out.insert_add(m & !(1 << i), if k % 2 == 1 { -p } else { p });
            }
        }
        out
    }

    /// `α(X₁, …, X_k)`.
    pub fn eval(&self, args: &[&[Expr]]) -> Expr {
        assert_eq!(args.len(), self.deg);
        let mut f = self.clone();
        for x in args {
            f = f.interior(x);
        }
        f.comp(&[])
    }

    /// Rewrites components after substituting each basis one-form `eⁱ` by
    /// `images[i]` (a one-form in another basis).
    pub fn substitute_basis(&self, images: &[Form]) -> Form {
        assert_eq!(images.len(), self.dim);
        let dim = images.first().map_or(self.dim, Form::dim);
        let mut out = Form::zero(dim, self.deg);
        for (m, e) in &self.terms {
            let mut t = Form::scalar(dim, e.clone());
            for i in mask_indices(*m) {
                t = t.wedge(&images[i]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Lie derivative along a vector field (Cartan's formula).
    pub fn lie(&self, x: &VectorField, chart: &Chart) -> Form {
        let a = self.d(chart).interior(&x.comps);
        if self.deg == 0 {
            return a;
        }
        a.add(&self.interior(&x.comps).d(chart))
    }

    /// Coefficients rewritten by `chart`'s rules.
    pub fn reduce(&self, chart: &Chart) -> Form {
        if chart.rules().is_empty() {
            return self.clone();
        }
        self.map(|e| chart.reduce(e))
    }

    /// Pullback along a map given by the target coordinates as expressions in
    /// the source chart.
    pub fn pullback(&self, target: &Chart, source: &Chart, map: &[Expr]) -> Result<Form, GeomError> {
        if map.len() != target.dim() || self.dim != target.dim() {
            return Err(GeomError::Dimension { expected: target.dim(), got: map.len() });
        }
        let subs: HashMap<String, Expr> = target.coords().iter().cloned().zip(map.iter().cloned()).collect();
        let dmap: Vec<Form> = map.iter().map(|f| Form::scalar(source.dim(), f.clone()).d(source)).collect();
        let mut out = Form::zero(source.dim(), self.deg);
        for (m, e) in &self.terms {
            let mut t = Form::scalar(source.dim(), subs_coords(e, &subs));
            for i in mask_indices(*m) {
                t = t.wedge(&dmap[i]);
            }
            out = out.add(&t);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub comps: Vec<Expr>,
}

impl VectorField {
    pub fn zero(dim: usize) -> Self {
        VectorField { comps: vec![Expr::zero(); dim] }
    }

    pub fn new(comps: Vec<Expr>) -> Self {
        VectorField { comps }
    }

    /// Builds from `(coordinate, component)` pairs.
    pub fn from_pairs(chart: &Chart, pairs: &[(&str, Expr)]) -> Self {
        let mut v = VectorField::zero(chart.dim());
        for (c, e) in pairs {
            let i = chart.index(c).expect("coordinate");
            v.comps[i] = &v.comps[i] + e;
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    /// `X(f)`.
    pub fn apply(&self, f: &Expr, chart: &Chart) -> Expr {
        let mut s = Expr::zero();
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = chart.diff(f, i);
            if !d.is_zero() {
                s = &s + &(c * &d);
            }
        }
        s
    }

    pub fn bracket(&self, other: &VectorField, chart: &Chart) -> VectorField {
        VectorField {
            comps: (0..self.dim())
                .map(|i| &self.apply(&other.comps[i], chart) - &other.apply(&self.comps[i], chart))
                .collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        VectorField { comps: self.comps.iter().map(|a| a * c).collect() }
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField { comps: self.comps.iter().map(f).collect() }
    }
}

/// A coframe `θ¹…θⁿ` in coordinates together with its dual frame.
#[derive(Debug, Clone)]
pub struct Coframe {
    forms: Vec<Form>,
    frame: Vec<VectorField>,
    /// `θ^a_i`
    theta: ExprMatrix,
    /// `E_a^i`
    e: ExprMatrix,
}

impl Coframe {
    pub fn new(forms: Vec<Form>) -> Result<Self, GeomError> {
        let n = forms.len();
        if forms.iter().any(|f| f.deg() != 1 || f.dim() != n) {
            return Err(GeomError::Dimension { expected: n, got: forms.first().map_or(0, Form::dim) });
        }
        let theta: ExprMatrix = forms.iter().map(Form::as_covector).collect();
        let (inv, _) = expr_inverse(&theta).ok_or(GeomError::Singular("coframe"))?;
        // E_a^i = (θ⁻¹)^i_a
        let e: ExprMatrix = (0..n).map(|a| (0..n).map(|i| inv[i][a].clone()).collect()).collect();
        let frame = e.iter().map(|row| VectorField::new(row.clone())).collect();
        Ok(Coframe { forms, frame, theta, e })
    }

    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn form(&self, a: usize) -> &Form {
        &self.forms[a]
    }

    pub fn frame(&self) -> &[VectorField] {
        &self.frame
    }

    pub fn vector(&self, a: usize) -> &VectorField {
        &self.frame[a]
    }

    pub fn theta(&self) -> &ExprMatrix {
        &self.theta
    }

    pub fn e(&self) -> &ExprMatrix {
        &self.e
    }

    /// Coordinate form from coframe components.
    pub fn to_coords(&self, f: &Form) -> Form {
        f.substitute_basis(&self.forms)
    }

    /// Coframe components of a coordinate form.
    pub fn to_frame(&self, f: &Form) -> Form {
        let n = self.dim();
        let images: Vec<Form> = (0..n).map(|i| Form::one_form((0..n).map(|a| self.e[a][i].clone()).collect())).collect();
        f.substitute_basis(&images)
    }

    /// Coordinate components of `Σ cᵃ E_a`.
    pub fn vector_from_frame(&self, c: &[Expr]) -> VectorField {
        let n = self.dim();
        let mut v = VectorField::zero(n);
        for (a, ca) in c.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for i in 0..n {
                if !self.e[a][i].is_zero() {
                    v.comps[i] = &v.comps[i] + &(ca * &self.e[a][i]);
                }
            }
        }
        v
    }

    /// Frame components `θᵃ(X)`.
    pub fn vector_to_frame(&self, v: &VectorField) -> Vec<Expr> {
        self.theta
            .iter()
            .map(|row| {
                let mut s = Expr::zero();
                for (t, x) in row.iter().zip(&v.comps) {
                    if !t.is_zero() && !x.is_zero() {
                        s = &s + &(t * x);
                    }
                }
                s
            })
            .collect()
    }

    /// `θᵃ(E_b) = δᵃ_b`, checked exactly.
    pub fn duality_holds(&self) -> bool {
        let n = self.dim();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let v = self.forms[a].eval(&[&self.frame[b].comps]);
                if a == b {
                    v.is_one()
                } else {
                    v.is_zero()
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::new(&["x", "y", "p", "q", "z"])
    }

    #[test]
    fn d_of_contact_form() {
        let c = chart();
        let p = Expr::var("p");
        let w1 = c.d_coord("y").sub(&c.d_coord("x").scale(&p));
        let dw = w1.d(&c);
        let expect = c.d_coord("x").wedge(&c.d_coord("p"));
        assert_eq!(dw, expect);
        assert!(dw.d(&c).is_zero());
    }

    #[test]
    fn interior_of_wedge() {
        let c = chart();
        let w = c.d_coord("q").wedge(&c.d_coord("x"));
        let r = w.interior(&c.partial_by("q").comps);
        assert_eq!(r, c.d_coord("x"));
        assert!(w.interior(&c.partial_by("q").comps).interior(&c.partial_by("q").comps).is_zero());
    }

    #[test]
    fn graded_commutativity() {
        let c = chart();
        let a = c.d_coord("x").wedge(&c.d_coord("y"));
        let b = c.d_coord("p").scale(&Expr::var("z"));
        assert_eq!(a.wedge(&b), b.wedge(&a));
        let e = c.d_coord("q");
        assert_eq!(b.wedge(&e), e.wedge(&b).neg());
    }

    #[test]
    fn cartan_formula_on_function() {
        let c = chart();
        let f = Form::scalar(5, Expr::var("x") * Expr::var("y"));
        let x = c.partial_by("y");
        let l = f.lie(&x, &c);
        assert!(l.comp(&[]).equals(&Expr::var("x")));
    }

    #[test]
    fn pullback_along_jet() {
        let base = Chart::new(&["s"]);
        let c = chart();
        let s = Expr::var("s");
        let map = vec![s.clone(), s.pow_i(3), Expr::int(3) * s.pow_i(2), Expr::int(6) * s.clone(), Expr::zero()];
        let w3 = c.d_coord("p").sub(&c.d_coord("x").scale(&Expr::var("q")));
        assert!(w3.pullback(&c, &base, &map).unwrap().is_zero());
    }
}
