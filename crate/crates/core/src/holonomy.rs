//! Matrix Lie algebras and their fingerprints, and the curvature filtration
//! `V⁰ ⊆ V¹ ⊆ …` of an infinitesimal holonomy algebra.

use std::collections::HashMap;
use std::fmt;

use ambient_expr::{Atom, EvalError, Expr, Scalar};
use rayon::prelude::*;

use crate::linalg::{span_rank, Matrix};
use crate::riemann::Metric;
use crate::tensor::{Slot, Tensor};

/// Incrementally built echelon basis of a subspace of `Scalarⁿ`.
#[derive(Debug, Clone, Default)]
pub struct Span {
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Span {
    pub fn new() -> Self {
        Span::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (p, r) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(r) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else { return false };
        let inv = r[p].inv().expect("nonzero pivot");
        let r: Vec<Scalar> = r.iter().map(|x| x * &inv).collect();
        self.rows.push((p, r));
        true
    }
}

fn flat(m: &Matrix) -> Vec<Scalar> {
    m.entries().to_vec()
}

/// A Lie subalgebra of `gl(n)` with a fixed basis.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    n: usize,
    basis: Vec<Matrix>,
    /// rows of the flattened basis that form an invertible square block
    rows: Vec<usize>,
    block_inv: Matrix,
}

impl LieAlgebra {
    /// The subalgebra generated by `gens` under brackets.
    pub fn generated_by(n: usize, gens: &[Matrix]) -> Self {
        let mut span = Span::new();
        let mut basis: Vec<Matrix> = Vec::new();
        for g in gens {
            if span.insert(&flat(g)) {
                basis.push(g.clone());
            }
        }
        let mut i = 0;
        while i < basis.len() {
            for j in 0..i {
                let b = basis[j].bracket(&basis[i]);
                if span.insert(&flat(&b)) {
                    basis.push(b);
                }
            }
            i += 1;
        }
        LieAlgebra::from_basis(n, basis)
    }

    /// Assumes `basis` is independent and bracket-closed.
    pub fn from_basis(n: usize, basis: Vec<Matrix>) -> Self {
        let k = basis.len();
        let mut rows = Vec::new();
        let mut span = Span::new();
        for r in 0..n * n {
            let v: Vec<Scalar> = basis.iter().map(|b| b.entries()[r].clone()).collect();
            if span.insert(&v) {
                rows.push(r);
                if rows.len() == k {
                    break;
                }
            }
        }
        let mut block = Matrix::zeros(k, k);
        for (a, &r) in rows.iter().enumerate() {
            for (b, m) in basis.iter().enumerate() {
                block[(a, b)] = m.entries()[r].clone();
            }
        }
        let block_inv = if k == 0 { Matrix::zeros(0, 0) } else { block.inverse().expect("independent basis") };
        LieAlgebra { n, basis, rows, block_inv }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        let c = self.coords_unchecked(m);
        let mut s = Matrix::zeros(self.n, self.n);
        for (ci, b) in c.iter().zip(&self.basis) {
            s = &s + &b.scale(ci);
        }
        s == *m
    }

    fn coords_unchecked(&self, m: &Matrix) -> Vec<Scalar> {
        let v: Vec<Scalar> = self.rows.iter().map(|&r| m.entries()[r].clone()).collect();
        self.block_inv.apply(&v)
    }

    /// Coordinates in the basis, if `m` lies in the algebra.
    pub fn coords(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        self.contains(m).then(|| self.coords_unchecked(m))
    }

    pub fn is_closed(&self) -> bool {
        (0..self.dim()).all(|i| (i + 1..self.dim()).all(|j| self.contains(&self.basis[i].bracket(&self.basis[j]))))
    }

    /// `ad(B_i)` in the basis.
    pub fn ad(&self, i: usize) -> Matrix {
        let k = self.dim();
        let mut m = Matrix::zeros(k, k);
        for j in 0..k {
            let c = self.coords_unchecked(&self.basis[i].bracket(&self.basis[j]));
            for (a, x) in c.into_iter().enumerate() {
                m[(a, j)] = x;
            }
        }
        m
    }

    pub fn killing_form(&self) -> Matrix {
        let k = self.dim();
        let ads: Vec<Matrix> = (0..k).map(|i| self.ad(i)).collect();
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let t = (&ads[i] * &ads[j]).trace();
                m[(i, j)] = t.clone();
                m[(j, i)] = t;
            }
        }
        m
    }

    /// `[B_i, [B_j, B_k]] + cyclic = 0` for all triples.
    pub fn jacobi_holds(&self) -> bool {
        let b = &self.basis;
        let k = b.len();
        (0..k).all(|i| {
            (i..k).all(|j| {
                (j..k).all(|l| {
                    let s = &(&b[i].bracket(&b[j].bracket(&b[l])) + &b[j].bracket(&b[l].bracket(&b[i])))
                        + &b[l].bracket(&b[i].bracket(&b[j]));
                    s.is_zero()
                })
            })
        })
    }

    fn bracket_span(&self, a: &[Matrix], b: &[Matrix]) -> Vec<Matrix> {
        let mut span = Span::new();
        let mut out = Vec::new();
        for x in a {
            for y in b {
                let c = x.bracket(y);
                if span.insert(&flat(&c)) {
                    out.push(c);
                }
            }
        }
        out
    }

    fn center_dim(&self) -> usize {
        let k = self.dim();
        if k == 0 {
            return 0;
        }
        // Σ c_i ad(B_i) = 0
        let ads: Vec<Matrix> = (0..k).map(|i| self.ad(i)).collect();
        let mut m = Matrix::zeros(k * k, k);
        for (i, a) in ads.iter().enumerate() {
            for (r, x) in a.entries().iter().enumerate() {
                m[(r, i)] = x.clone();
            }
        }
        m.kernel().len()
    }

    pub fn fingerprint(&self) -> LieFingerprint {
        let mut lower = vec![self.dim()];
        let mut cur = self.basis.clone();
        while !cur.is_empty() {
            let next = self.bracket_span(&self.basis, &cur);
            let stable = next.len() == cur.len();
            lower.push(next.len());
            if stable {
                break;
            }
            cur = next;
        }
        let mut derived = vec![self.dim()];
        let mut cur = self.basis.clone();
        while !cur.is_empty() {
            let next = self.bracket_span(&cur, &cur);
            let stable = next.len() == cur.len();
            derived.push(next.len());
            if stable {
                break;
            }
            cur = next;
        }
        let kf = self.killing_form();
        let (pos, neg, _) = kf.inertia();
        let center = self.center_dim();
        let dim = self.dim();
        let nilpotent = *lower.last().unwrap() == 0;
        let solvable = *derived.last().unwrap() == 0;
        let semisimple = dim > 0 && pos + neg == dim;
        let mut fp = LieFingerprint {
            dim,
            lower_central: lower,
            derived,
            center,
            killing_rank: pos + neg,
            killing_signature: (pos, neg),
            nilpotent,
            solvable,
            semisimple,
            label: LieLabel::Unknown,
        };
        fp.label = fp.classify();
        fp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LieLabel {
    Trivial,
    R3,
    Sl2,
    H5,
    K,
    G2,
    Unknown,
}

impl fmt::Display for LieLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LieLabel::Trivial => "trivial",
            LieLabel::R3 => "R3",
            LieLabel::Sl2 => "sl2",
            LieLabel::H5 => "h5",
            LieLabel::K => "k",
            LieLabel::G2 => "g2",
            LieLabel::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieFingerprint {
    pub dim: usize,
    /// dimensions of `g ⊇ [g, g] ⊇ [g, [g, g]] ⊇ …` until it stabilizes
    pub lower_central: Vec<usize>,
    /// dimensions of `g ⊇ [g, g] ⊇ [[g, g], [g, g]] ⊇ …`
    pub derived: Vec<usize>,
    pub center: usize,
    pub killing_rank: usize,
    /// `(positive, negative)`
    pub killing_signature: (usize, usize),
    pub nilpotent: bool,
    pub solvable: bool,
    pub semisimple: bool,
    pub label: LieLabel,
}

impl LieFingerprint {
    /// Number of nonzero terms in the lower central series of a nilpotent algebra.
    pub fn nilpotency_step(&self) -> Option<usize> {
        self.nilpotent.then(|| self.lower_central.iter().filter(|&&d| d > 0).count())
    }

    fn classify(&self) -> LieLabel {
        let abelian = self.derived.get(1).copied().unwrap_or(0) == 0;
        match self.dim {
            0 => LieLabel::Trivial,
            3 if abelian => LieLabel::R3,
            3 if self.killing_rank == 3 => LieLabel::Sl2,
            5 if self.nilpotency_step() == Some(2) && self.center == 1 && self.derived.get(1) == Some(&1) => LieLabel::H5,
            8 if !self.semisimple && !self.solvable => LieLabel::K,
            14 if self.semisimple => LieLabel::G2,
            _ => LieLabel::Unknown,
        }
    }
}

impl fmt::Display for LieFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (dim {}, lcs {:?}, derived {:?}, center {}, killing rank {} signature {:?})",
            self.label, self.dim, self.lower_central, self.derived, self.center, self.killing_rank, self.killing_signature
        )
    }
}

/// `(1,1)` tensor evaluated to a matrix `M^i_j`.
pub fn eval_endo(t: &Tensor, val: &dyn Fn(&Atom) -> Option<Scalar>) -> Result<Matrix, EvalError> {
    assert_eq!(t.slots(), &[Slot::Up, Slot::Down]);
    let n = t.dim();
    let mut m = Matrix::zeros(n, n);
    for (k, e) in t.comps() {
        m[(k[0] as usize, k[1] as usize)] = e.eval_with(val)?;
    }
    Ok(m)
}

/// Symbolic generators and pointwise dimensions of `V⁰ ⊆ … ⊆ V^depth`.
#[derive(Debug, Clone)]
pub struct Filtration {
    /// `levels[r]`: generators of `V^r` as `(1,1)` tensors
    pub levels: Vec<Vec<Tensor>>,
    /// pointwise dimension of each level, per evaluation point
    pub dims: Vec<Vec<usize>>,
    /// spanning matrices of the deepest level at each point
    pub spans: Vec<Vec<Matrix>>,
}

/// Builds the filtration from the curvature of `g`.
///
/// Level 0 holds the endomorphisms `R(∂_A, ∂_B)`; level `r` adds `∇_{∂_J} S`
/// for the generators `S` of level `r − 1`. At each level the generators are
/// pruned to a subset that is independent at the first point, which is exact
/// at points where that subset stays independent (checked via the ranks at
/// the remaining points). `points` supply atom values for evaluation.
pub fn v_filtration(
    g: &Metric,
    depth: usize,
    points: &[&(dyn Fn(&Atom) -> Option<Scalar> + Sync)],
) -> Result<Filtration, EvalError> {
    let n = g.dim();
    let riem = g.riemann();
    let mut level0 = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            // S^C_D = R^C_{D A B}
            let mut s = Tensor::zero(n, &[Slot::Up, Slot::Down]);
            for (k, e) in riem.comps() {
                if k[2] as usize == a && k[3] as usize == b {
                    s.set(&[k[0] as usize, k[1] as usize], e.clone());
                }
            }
            if !s.is_zero() {
                level0.push(s);
            }
        }
    }
    let mut levels = Vec::new();
    let mut dims = vec![Vec::new(); points.len()];
    let mut current = prune(level0, points[0])?;
    let mut all: Vec<Tensor> = current.clone();
    for r in 0..=depth {
        if r > 0 {
            let derived: Vec<Tensor> = current
                .par_iter()
                .flat_map_iter(|s| {
                    let ds = g.covariant_derivative(s);
                    (0..n).map(move |j| {
                        let mut v = vec![Expr::zero(); n];
                        v[j] = Expr::one();
                        ds.insert(2, &v)
                    })
                })
                .filter(|t| !t.is_zero())
                .collect();
            let mut cand = all.clone();
            cand.extend(derived);
            all = prune(cand, points[0])?;
            current = all.clone();
        }
        for (p, val) in points.iter().enumerate() {
            let mats: Vec<Vec<Scalar>> =
                all.iter().map(|t| eval_endo(t, *val).map(|m| flat(&m))).collect::<Result<_, _>>()?;
            dims[p].push(span_rank(&mats));
        }
        levels.push(all.clone());
    }
    let spans = points
        .iter()
        .map(|val| all.iter().map(|t| eval_endo(t, *val)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    Ok(Filtration { levels, dims, spans })
}

fn prune(cands: Vec<Tensor>, val: &dyn Fn(&Atom) -> Option<Scalar>) -> Result<Vec<Tensor>, EvalError> {
    let mut span = Span::new();
    let mut keep = Vec::new();
    for t in cands {
        if span.insert(&flat(&eval_endo(&t, val)?)) {
            keep.push(t);
        }
    }
    Ok(keep)
}

/// Whether two families of matrices span the same space.
pub fn span_matches(a: &[Matrix], b: &[Matrix]) -> bool {
    let fa: Vec<Vec<Scalar>> = a.iter().map(flat).collect();
    let fb: Vec<Vec<Scalar>> = b.iter().map(flat).collect();
    let ra = span_rank(&fa);
    let rb = span_rank(&fb);
    let mut both = fa;
    both.extend(fb);
    ra == rb && span_rank(&both) == ra
}

/// Atom values for evaluation: coordinates from `point`, other atoms (function
/// symbols) from `extra`.
pub fn evaluator(point: HashMap<String, Scalar>, extra: HashMap<String, Scalar>) -> impl Fn(&Atom) -> Option<Scalar> + Sync {
    move |a: &Atom| match a {
        Atom::Var(s) => point.get(&**s).cloned(),
        other => extra.get(&other.to_string()).cloned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    #[test]
    fn sl2_fingerprint() {
        let e = m(&[&[0, 1], &[0, 0]]);
        let f = m(&[&[0, 0], &[1, 0]]);
        let alg = LieAlgebra::generated_by(2, &[e, f]);
        let fp = alg.fingerprint();
        assert_eq!(fp.dim, 3);
        assert_eq!(fp.label, LieLabel::Sl2);
        assert_eq!(fp.killing_signature, (2, 1));
        assert!(alg.jacobi_holds());
    }

    #[test]
    fn heisenberg_in_gl3() {
        // strictly upper triangular 3×3: the 3-dimensional Heisenberg algebra
        let a = m(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let b = m(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]);
        let alg = LieAlgebra::generated_by(3, &[a, b]);
        let fp = alg.fingerprint();
        assert_eq!(fp.dim, 3);
        assert_eq!(fp.lower_central, vec![3, 1, 0]);
        assert_eq!(fp.nilpotency_step(), Some(2));
        assert_eq!(fp.center, 1);
        assert_eq!(fp.label, LieLabel::Unknown);
    }

    #[test]
    fn abelian_diagonal() {
        let gens: Vec<Matrix> = (0..3).map(|i| Matrix::unit(3, i, i)).collect();
        let fp = LieAlgebra::generated_by(3, &gens).fingerprint();
        assert_eq!(fp.label, LieLabel::R3);
        assert_eq!(fp.center, 3);
    }

    #[test]
    fn span_comparison() {
        let a = Matrix::unit(2, 0, 1);
        let b = Matrix::unit(2, 1, 0);
        assert!(span_matches(&[a.clone(), b.clone()], &[&a + &b, &a - &b]));
        assert!(!span_matches(&[a.clone()], &[b]));
    }
}
