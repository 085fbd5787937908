//! Sparse tensors with mixed slots.

use std::collections::{BTreeMap, HashMap};

use ambient_expr::{Expr, Scalar};
use smallvec::SmallVec;

use crate::forms::{Chart, Form, VectorField};
use crate::linalg::ExprMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Up,
    Down,
}

pub type Index = SmallVec<[u8; 6]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    dim: usize,
    slots: Vec<Slot>,
    comps: BTreeMap<Index, Expr>,
}

fn permutation_sign(p: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                odd = !odd;
            }
        }
    }
    odd
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

impl Tensor {
    pub fn zero(dim: usize, slots: &[Slot]) -> Self {
        Tensor { dim, slots: slots.to_vec(), comps: BTreeMap::new() }
    }

    pub fn covariant(dim: usize, rank: usize) -> Self {
        Tensor::zero(dim, &vec![Slot::Down; rank])
    }

    /// Symmetric bilinear form from a matrix.
    pub fn from_matrix(m: &ExprMatrix) -> Self {
        let n = m.len();
        let mut t = Tensor::covariant(n, 2);
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                t.set(&[i, j], e.clone());
            }
        }
        t
    }

    /// (1,1) tensor from a matrix `M^i_j`.
    pub fn endomorphism(m: &ExprMatrix) -> Self {
        let n = m.len();
        let mut t = Tensor::zero(n, &[Slot::Up, Slot::Down]);
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                t.set(&[i, j], e.clone());
            }
        }
        t
    }

    pub fn vector(v: &VectorField) -> Self {
        let mut t = Tensor::zero(v.dim(), &[Slot::Up]);
        for (i, e) in v.comps.iter().enumerate() {
            t.set(&[i], e.clone());
        }
        t
    }

    /// Full antisymmetric components of a form.
    pub fn from_form(f: &Form) -> Self {
        let k = f.deg();
        let mut t = Tensor::covariant(f.dim(), k);
        let perms = permutations(k);
        for (idx, e) in f.terms() {
            for p in &perms {
                let j: Vec<usize> = p.iter().map(|&x| idx[x]).collect();
                t.set(&j, if permutation_sign(p) { -e } else { e.clone() });
            }
        }
        t
    }

    /// The form with the increasing-index components of an alternating tensor.
    pub fn to_form(&self) -> Form {
        assert!(self.slots.iter().all(|s| *s == Slot::Down));
        let k = self.rank();
        let mut f = Form::zero(self.dim, k);
        for (idx, e) in &self.comps {
            if idx.windows(2).all(|w| w[0] < w[1]) {
                let i: Vec<usize> = idx.iter().map(|&x| x as usize).collect();
                f = f.add(&Form::basis(self.dim, &i).scale(e));
            }
        }
        f
    }

    /// `α ⊙ β = ½(α⊗β + β⊗α)` for one-forms.
    pub fn sym(a: &Form, b: &Form) -> Self {
        let half = Expr::rational(1, 2);
        let ta = Tensor::from_form(a);
        let tb = Tensor::from_form(b);
        ta.tensor(&tb).add(&tb.tensor(&ta)).scale(&half)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&Index, &Expr)> {
        self.comps.iter()
    }

    pub fn get(&self, idx: &[usize]) -> Expr {
        let k: Index = idx.iter().map(|&i| i as u8).collect();
        self.comps.get(&k).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn set(&mut self, idx: &[usize], e: Expr) {
        assert_eq!(idx.len(), self.rank());
        let k: Index = idx.iter().map(|&i| i as u8).collect();
        if e.is_zero() {
            self.comps.remove(&k);
        } else {
            self.comps.insert(k, e);
        }
    }

    fn add_at(&mut self, k: Index, e: Expr) {
        if e.is_zero() {
            return;
        }
        match self.comps.get_mut(&k) {
            Some(x) => {
                let s = &*x + &e;
                if s.is_zero() {
                    self.comps.remove(&k);
                } else {
                    *x = s;
                }
            }
            None => {
                self.comps.insert(k, e);
            }
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.slots, other.slots);
        let mut out = self.clone();
        for (k, e) in &other.comps {
            out.add_at(k.clone(), e.clone());
        }
        out
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, c: &Expr) -> Tensor {
        self.map(|e| e * c)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Tensor {
        let mut out = Tensor::zero(self.dim, &self.slots);
        for (k, e) in &self.comps {
            let v = f(e);
            if !v.is_zero() {
                out.comps.insert(k.clone(), v);
            }
        }
        out
    }

    pub fn tensor(&self, other: &Tensor) -> Tensor {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        let mut out = Tensor::zero(self.dim, &slots);
        for (a, x) in &self.comps {
            for (b, y) in &other.comps {
                let mut k = a.clone();
                k.extend_from_slice(b);
                out.add_at(k, x * y);
            }
        }
        out
    }

    /// Contraction of an upper slot with a lower slot.
    pub fn contract(&self, i: usize, j: usize) -> Tensor {
        assert_ne!(self.slots[i], self.slots[j], "contraction needs one upper and one lower slot");
        let slots: Vec<Slot> = self.slots.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, s)| *s).collect();
        let mut out = Tensor::zero(self.dim, &slots);
        for (k, e) in &self.comps {
            if k[i] != k[j] {
                continue;
            }
            let nk: Index = k.iter().enumerate().filter(|(m, _)| *m != i && *m != j).map(|(_, x)| *x).collect();
            out.add_at(nk, e.clone());
        }
        out
    }

    /// Reorders slots: the result's slot `k` is the original slot `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        let slots: Vec<Slot> = perm.iter().map(|&p| self.slots[p]).collect();
        let mut out = Tensor::zero(self.dim, &slots);
        for (k, e) in &self.comps {
            let nk: Index = perm.iter().map(|&p| k[p]).collect();
            out.comps.insert(nk, e.clone());
        }
        out
    }

    /// Inserts a vector into slot `s` (which must be lower).
    pub fn insert(&self, s: usize, v: &[Expr]) -> Tensor {
        assert_eq!(self.slots[s], Slot::Down);
        let slots: Vec<Slot> = self.slots.iter().enumerate().filter(|(k, _)| *k != s).map(|(_, x)| *x).collect();
        let mut out = Tensor::zero(self.dim, &slots);
        for (k, e) in &self.comps {
            let c = &v[k[s] as usize];
            if c.is_zero() {
                continue;
            }
            let mut nk = k.clone();
            nk.remove(s);
            out.add_at(nk, e * c);
        }
        out
    }

    /// Linear change of basis, one slot at a time.
    ///
    /// For lower slots the new component is `Σᵢ down[a][i]·Tᵢ`; for upper slots
    /// `Σⱼ up[b][j]·Tʲ`.
    pub fn transform(&self, down: &ExprMatrix, up: &ExprMatrix) -> Tensor {
        let mut cur = self.clone();
        for s in 0..self.rank() {
            let m = match self.slots[s] {
                Slot::Down => down,
                Slot::Up => up,
            };
            // column lists: for old index i, the (a, m[a][i]) with nonzero entries
            let cols: Vec<Vec<(u8, &Expr)>> = (0..self.dim)
                .map(|i| (0..m.len()).filter(|&a| !m[a][i].is_zero()).map(|a| (a as u8, &m[a][i])).collect())
                .collect();
            let mut next = Tensor::zero(m.len(), &self.slots);
            for (k, e) in &cur.comps {
                for (a, c) in &cols[k[s] as usize] {
                    let mut nk = k.clone();
                    nk[s] = *a;
                    next.add_at(nk, e * *c);
                }
            }
            cur = next;
        }
        cur
    }

    /// Lie derivative along `x`, in coordinates.
    pub fn lie(&self, x: &VectorField, chart: &Chart) -> Tensor {
        let mut out = Tensor::zero(self.dim, &self.slots);
        for (k, e) in &self.comps {
            out.add_at(k.clone(), x.apply(e, chart));
        }
        let dx: Vec<Vec<Expr>> = x.comps.iter().map(|c| (0..self.dim).map(|i| chart.diff(c, i)).collect()).collect();
        for (k, e) in &self.comps {
            for s in 0..self.rank() {
                let old = k[s] as usize;
                match self.slots[s] {
                    // + T_{..m..} ∂_i X^m  lands on index i
                    Slot::Down => {
                        for i in 0..self.dim {
                            let c = &dx[old][i];
                            if c.is_zero() {
                                continue;
                            }
                            let mut nk = k.clone();
                            nk[s] = i as u8;
                            out.add_at(nk, e * c);
                        }
                    }
                    // - T^{..m..} ∂_m X^j  lands on index j
                    Slot::Up => {
                        for j in 0..self.dim {
                            let c = &dx[j][old];
                            if c.is_zero() {
                                continue;
                            }
                            let mut nk = k.clone();
                            nk[s] = j as u8;
                            out.add_at(nk, -(e * c));
                        }
                    }
                }
            }
        }
        out.reduce(chart)
    }

    pub fn reduce(&self, chart: &Chart) -> Tensor {
        if chart.rules().is_empty() {
            return self.clone();
        }
        self.map(|e| chart.reduce(e))
    }

    /// Square matrix of a rank-2 tensor.
    pub fn matrix(&self) -> ExprMatrix {
        assert_eq!(self.rank(), 2);
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(&[i, j])).collect()).collect()
    }

    /// Components that differ between the two tensors.
    pub fn diff_entries(&self, other: &Tensor) -> Vec<(Index, Expr)> {
        self.sub(other).comps.into_iter().collect()
    }

    pub fn is_symmetric(&self, i: usize, j: usize) -> bool {
        let mut p: Vec<usize> = (0..self.rank()).collect();
        p.swap(i, j);
        self.permute(&p) == *self
    }

    pub fn is_antisymmetric(&self, i: usize, j: usize) -> bool {
        let mut p: Vec<usize> = (0..self.rank()).collect();
        p.swap(i, j);
        self.permute(&p).add(self).is_zero()
    }

    /// Exact numeric components at a point.
    pub fn eval(&self, point: &HashMap<String, Scalar>) -> Result<BTreeMap<Index, Scalar>, ambient_expr::EvalError> {
        let mut out = BTreeMap::new();
        for (k, e) in &self.comps {
            let v = e.eval(point)?;
            if !v.is_zero() {
                out.insert(k.clone(), v);
            }
        }
        Ok(out)
    }
}

/// `Σ` over the nonzero terms of a form expanded with one-forms: a helper for
/// the symmetric products in metric formulas.
pub fn quadratic(dim: usize, terms: &[(Expr, &Form, &Form)]) -> Tensor {
    let mut t = Tensor::covariant(dim, 2);
    for (c, a, b) in terms {
        t = t.add(&Tensor::sym(a, b).scale(c));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_product_halves() {
        let c = Chart::new(&["a", "b"]);
        let t = Tensor::sym(&c.dx(0), &c.dx(1)).scale(&Expr::int(3));
        assert!(t.get(&[0, 1]).equals(&Expr::rational(3, 2)));
        assert!(t.get(&[1, 0]).equals(&Expr::rational(3, 2)));
        assert!(t.get(&[0, 0]).is_zero());
    }

    #[test]
    fn form_round_trip() {
        let c = Chart::new(&["a", "b", "c"]);
        let f = c.dx(2).wedge(&c.dx(0)).wedge(&c.dx(1)).scale(&Expr::var("a"));
        let t = Tensor::from_form(&f);
        assert!(t.is_antisymmetric(0, 1) && t.is_antisymmetric(1, 2));
        assert_eq!(t.to_form(), f);
    }

    #[test]
    fn lie_of_metric_along_killing_field() {
        // rotation field on the Euclidean plane
        let c = Chart::new(&["x", "y"]);
        let g = Tensor::from_matrix(&vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::one()]]);
        let x = VectorField::new(vec![-Expr::var("y"), Expr::var("x")]);
        assert!(g.lie(&x, &c).is_zero());
        let dil = VectorField::new(vec![Expr::var("x"), Expr::var("y")]);
        assert_eq!(g.lie(&dil, &c), g.scale(&Expr::int(2)));
    }
}
