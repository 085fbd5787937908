//! The imaginary split octonions as `(ℝ⁷, Φ)`: the standard 3-form and its
//! bilinear form, the cross product, `g₂` and the stabilizers of null vectors.

use ambient_expr::{Expr, Rational64, Scalar};

use crate::forms::{Form, GeomError};
use crate::holonomy::{LieAlgebra, LieFingerprint, LieLabel};
use crate::linalg::{intersect, span_rank, ExprMatrix, Matrix};

pub const DIM: usize = 7;

fn root(p: u32, n: i64, d: i64) -> Scalar {
    Scalar::prime_power(p, Rational64::new(n, d))
}

fn sqrt2() -> Scalar {
    Scalar::sqrt2()
}

/// `Φ = (1/√6)(−√2 e¹⁵⁶ − e²⁴⁵ − e³⁴⁶ + e¹⁴⁷ − √2 e²³⁷)`, as a form on ℝ⁷.
pub fn standard_phi() -> Form {
    let c = root(2, -1, 2) * &root(3, -1, 2);
    let s2 = sqrt2();
    let one = Scalar::one();
    let terms: [(&[usize], Scalar); 5] = [
        (&[1, 5, 6], -&s2),
        (&[2, 4, 5], -&one),
        (&[3, 4, 6], -&one),
        (&[1, 4, 7], one.clone()),
        (&[2, 3, 7], -&s2),
    ];
    let mut f = Form::zero(DIM, 3);
    for (idx, k) in terms {
        let i: Vec<usize> = idx.iter().map(|x| x - 1).collect();
        f = f.add(&Form::basis(DIM, &i).scale(&Expr::scalar(&k * &c)));
    }
    f
}

/// The printed Gram matrix of `H(Φ)`.
pub fn standard_gram() -> Matrix {
    let mut g = Matrix::zeros(DIM, DIM);
    for (i, j) in [(0, 6), (1, 4), (2, 5)] {
        g[(i, j)] = Scalar::one();
        g[(j, i)] = Scalar::one();
    }
    g[(3, 3)] = Scalar::from_int(-1);
    g
}

pub fn j_block() -> Matrix {
    Matrix::from_ints(&[&[0, -1], &[1, 0]])
}

/// Dense components `Φ_{abc}` of a constant 3-form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeForm {
    c: Vec<Scalar>,
}

impl ThreeForm {
    pub fn from_form(f: &Form) -> Result<Self, GeomError> {
        let n = f.dim();
        if f.deg() != 3 {
            return Err(GeomError::Other("not a 3-form".into()));
        }
        let mut c = vec![Scalar::zero(); n * n * n];
        for (idx, e) in f.terms() {
            let v = e.as_scalar().ok_or(GeomError::Other("non-constant 3-form".into()))?;
            let (a, b, d) = (idx[0], idx[1], idx[2]);
            for (p, sign) in [((a, b, d), 1), ((b, d, a), 1), ((d, a, b), 1), ((b, a, d), -1), ((a, d, b), -1), ((d, b, a), -1)] {
                c[(p.0 * n + p.1) * n + p.2] = if sign > 0 { v.clone() } else { -&v };
            }
        }
        Ok(ThreeForm { c })
    }

    fn n(&self) -> usize {
        (self.c.len() as f64).cbrt().round() as usize
    }

    pub fn get(&self, a: usize, b: usize, d: usize) -> &Scalar {
        let n = self.n();
        &self.c[(a * n + b) * n + d]
    }

    /// `Φ(x, y, ·)` as a covector.
    pub fn partial(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.n();
        let mut out = vec![Scalar::zero(); n];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let xy = xa * yb;
                for (d, o) in out.iter_mut().enumerate() {
                    let v = self.get(a, b, d);
                    if !v.is_zero() {
                        *o += &(&xy * v);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Scalar {
        let p = self.partial(x, y);
        let mut s = Scalar::zero();
        for (a, b) in p.iter().zip(z) {
            s += &(a * b);
        }
        s
    }

    /// `X·Φ = −Φ(X·, ·, ·) − Φ(·, X·, ·) − Φ(·, ·, X·)`, the derivation action.
    pub fn derivation(&self, x: &Matrix) -> ThreeForm {
        let n = self.n();
        let mut c = vec![Scalar::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let mut s = Scalar::zero();
                    for m in 0..n {
                        if !x[(m, a)].is_zero() {
                            s -= &(&x[(m, a)] * self.get(m, b, d));
                        }
                        if !x[(m, b)].is_zero() {
                            s -= &(&x[(m, b)] * self.get(a, m, d));
                        }
                        if !x[(m, d)].is_zero() {
                            s -= &(&x[(m, d)] * self.get(a, b, m));
                        }
                    }
                    c[(a * n + b) * n + d] = s;
                }
            }
        }
        ThreeForm { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Scalar::is_zero)
    }

    /// `Ann x = {y : Φ(x, y, ·) = 0}`.
    pub fn annihilator(&self, x: &[Scalar]) -> Vec<Vec<Scalar>> {
        let n = self.n();
        let mut m = Matrix::zeros(n, n);
        for b in 0..n {
            let mut e = vec![Scalar::zero(); n];
            e[b] = Scalar::one();
            for (d, v) in self.partial(x, &e).into_iter().enumerate() {
                m[(d, b)] = v;
            }
        }
        m.kernel()
    }
}

/// `x × y = −g⁻¹ Φ(x, y, ·)`, so that `Φ(x, y, z) = −⟨x × y, z⟩`.
pub fn cross_product(x: &[Scalar], y: &[Scalar], phi: &ThreeForm, ginv: &Matrix) -> Vec<Scalar> {
    let p = phi.partial(x, y);
    ginv.apply(&p).into_iter().map(|v| -v).collect()
}

/// `tr(z ↦ x × (y × z))`.
pub fn cross_trace(x: &[Scalar], y: &[Scalar], phi: &ThreeForm, ginv: &Matrix) -> Scalar {
    let n = x.len();
    let mut t = Scalar::zero();
    for k in 0..n {
        let mut e = vec![Scalar::zero(); n];
        e[k] = Scalar::one();
        let yz = cross_product(y, &e, phi, ginv);
        t += &cross_product(x, &yz, phi, ginv)[k];
    }
    t
}

pub fn inner(g: &Matrix, x: &[Scalar], y: &[Scalar]) -> Scalar {
    let gy = g.apply(y);
    let mut s = Scalar::zero();
    for (a, b) in x.iter().zip(&gy) {
        s += &(a * b);
    }
    s
}

/// Outcome of comparing `√6 (X⌟φ)∧(Y⌟φ)∧φ` with `g(X, Y)·vol`.
#[derive(Debug, Clone)]
pub struct HIdentity {
    /// the left side equals `λ·g(X, Y)` times the basis 7-form for all pairs
    pub proportional: bool,
    /// `λ`, when proportional
    pub lambda: Option<Expr>,
    /// `λ² = |det g|`, so that `λ e¹…⁷` is the metric volume form up to sign
    pub volume_matches: bool,
    /// `±1`: orientation of `vol` relative to the basis
    pub orientation: Option<i8>,
}

impl HIdentity {
    pub fn holds(&self) -> bool {
        self.proportional && self.volume_matches
    }
}

/// Checks `H(φ) = g` with `φ` and `g` given in the same basis; no roots of
/// `det g` are taken, the volume is certified through `λ² = ±det g`.
pub fn h_identity(phi: &Form, g: &ExprMatrix, reduce: &dyn Fn(&Expr) -> Expr) -> HIdentity {
    let n = phi.dim();
    let s6 = Expr::scalar(root(2, 1, 2) * &root(3, 1, 2));
    let top: Vec<usize> = (0..n).collect();
    let basis_vec = |a: usize| -> Vec<Expr> { (0..n).map(|i| if i == a { Expr::one() } else { Expr::zero() }).collect() };
    let contractions: Vec<Form> = (0..n).map(|a| phi.interior(&basis_vec(a))).collect();
    let mut lhs = vec![vec![Expr::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let w = contractions[a].wedge(&contractions[b]).wedge(phi);
            let v = reduce(&(&s6 * &w.comp(&top)));
            lhs[a][b] = v.clone();
            lhs[b][a] = v;
        }
    }
    let fail = HIdentity { proportional: false, lambda: None, volume_matches: false, orientation: None };
    // λ from a nonzero entry of g
    let Some((a0, b0)) = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).find(|&(a, b)| !g[a][b].is_zero()) else {
        return fail;
    };
    let lambda = reduce(&(&lhs[a0][b0] / &g[a0][b0]));
    for a in 0..n {
        for b in a..n {
            if !reduce(&(&lhs[a][b] - &(&lambda * &g[a][b]))).is_zero() {
                return fail;
            }
        }
    }
    let det = crate::linalg::expr_inverse(g).map(|(_, d)| d).unwrap_or_else(Expr::zero);
    let l2 = reduce(&lambda.pow_i(2));
    let volume_matches = reduce(&(&l2 - &det)).is_zero() || reduce(&(&l2 + &det)).is_zero();
    let orientation = lambda.as_term().map(|(c, _)| if c.signum() == std::cmp::Ordering::Less { -1 } else { 1 });
    HIdentity { proportional: true, lambda: Some(lambda), volume_matches, orientation }
}

/// Parameters of a `g₂` element in the block form with sizes `(1, 2, 1, 2, 1)`.
#[derive(Debug, Clone, Default)]
pub struct G2Params {
    pub a: [[Scalar; 2]; 2],
    pub x: [Scalar; 2],
    pub y: [Scalar; 2],
    pub z: [Scalar; 2],
    pub w: [Scalar; 2],
    pub r: Scalar,
    pub s: Scalar,
}

impl G2Params {
    /// The 14 coordinate directions `(A₁₁, A₁₂, A₂₁, A₂₂, X, Y, Z, W, r, s)`.
    pub fn unit(k: usize) -> Self {
        let mut p = G2Params::default();
        let one = Scalar::one();
        match k {
            0..=3 => p.a[k / 2][k % 2] = one,
            4 | 5 => p.x[k - 4] = one,
            6 | 7 => p.y[k - 6] = one,
            8 | 9 => p.z[k - 8] = one,
            10 | 11 => p.w[k - 10] = one,
            12 => p.r = one,
            13 => p.s = one,
            _ => panic!("g2 has 14 parameters"),
        }
        p
    }

    pub fn matrix(&self) -> Matrix {
        let s2 = sqrt2();
        let is2 = root(2, -1, 2);
        let j = j_block();
        let tr = &self.a[0][0] + &self.a[1][1];
        let mut m = Matrix::zeros(DIM, DIM);
        // block offsets
        let (b1, b2, b3, b4, b5) = (0usize, 1usize, 3usize, 4usize, 6usize);
        m[(b1, b1)] = tr.clone();
        m[(b5, b5)] = -&tr;
        m[(b1, b3)] = self.s.clone();
        m[(b3, b5)] = self.s.clone();
        m[(b3, b1)] = self.r.clone();
        m[(b5, b3)] = self.r.clone();
        for i in 0..2 {
            m[(b1, b2 + i)] = self.z[i].clone();
            m[(b1, b4 + i)] = self.w[i].clone();
            m[(b2 + i, b1)] = self.x[i].clone();
            m[(b2 + i, b5)] = -&self.w[i];
            m[(b4 + i, b1)] = self.y[i].clone();
            m[(b4 + i, b5)] = -&self.z[i];
            m[(b5, b2 + i)] = -&self.y[i];
            m[(b5, b4 + i)] = -&self.x[i];
            for k in 0..2 {
                m[(b2 + i, b2 + k)] = self.a[i][k].clone();
                m[(b4 + i, b4 + k)] = -&self.a[k][i];
                // (s/√2) J and −(r/√2) J
                m[(b2 + i, b4 + k)] = &(&self.s * &is2) * &j[(i, k)];
                m[(b4 + i, b2 + k)] = -&(&(&self.r * &is2) * &j[(i, k)]);
            }
            // √2 J Zᵀ, √2 J X (columns); −√2 Xᵀ J, −√2 Z J (rows)
            let mut jz = Scalar::zero();
            let mut jx = Scalar::zero();
            let mut xj = Scalar::zero();
            let mut zj = Scalar::zero();
            for k in 0..2 {
                jz += &(&j[(i, k)] * &self.z[k]);
                jx += &(&j[(i, k)] * &self.x[k]);
                xj += &(&self.x[k] * &j[(k, i)]);
                zj += &(&self.z[k] * &j[(k, i)]);
            }
            m[(b2 + i, b3)] = &s2 * &jz;
            m[(b4 + i, b3)] = &s2 * &jx;
            m[(b3, b2 + i)] = -&(&s2 * &xj);
            m[(b3, b4 + i)] = -&(&s2 * &zj);
        }
        m
    }
}

/// The 14 matrices of the `g₂` parametrization.
pub fn g2_basis() -> Vec<Matrix> {
    (0..14).map(|k| G2Params::unit(k).matrix()).collect()
}

/// The parametrization of `𝔨 = stab(e₁)`: `A ∈ sl(2)`, `Z`, `W`, `s`.
pub fn k_basis() -> Vec<Matrix> {
    let mut out = Vec::new();
    let one = Scalar::one();
    let mut h = G2Params::default();
    h.a = [[one.clone(), Scalar::zero()], [Scalar::zero(), -&one]];
    out.push(h.matrix());
    for k in [1, 2, 8, 9, 10, 11, 13] {
        out.push(G2Params::unit(k).matrix());
    }
    out
}

/// The printed common stabilizer of `e₁, e₂`, with parameters
/// `(a₁₂, Z₂, s, W₁, W₂)`; `resolved` flips the sign of the `a₁₂` entry in
/// row 6 to `−a₁₂`, as forced by the `−Aᵀ` block.
pub fn h5_basis(resolved: bool) -> Vec<Matrix> {
    let s2 = sqrt2();
    let is2 = root(2, -1, 2);
    let one = Scalar::one();
    let at = |entries: &[(usize, usize, Scalar)]| {
        let mut m = Matrix::zeros(DIM, DIM);
        for (i, j, v) in entries {
            m[(i - 1, j - 1)] = v.clone();
        }
        m
    };
    let a12_low = if resolved { -&one } else { one.clone() };
    vec![
        at(&[(2, 3, one.clone()), (6, 5, a12_low)]),
        at(&[(1, 3, one.clone()), (2, 4, -&s2), (4, 5, -&s2), (6, 7, -&one)]),
        at(&[(1, 4, one.clone()), (2, 6, -&is2), (3, 5, is2.clone()), (4, 7, one.clone())]),
        at(&[(1, 5, one.clone()), (2, 7, -&one)]),
        at(&[(1, 6, one.clone()), (3, 7, -&one)]),
    ]
}

/// `{X ∈ span(h) : X v = 0}`.
pub fn stabilizer(v: &[Scalar], h: &[Matrix]) -> Vec<Matrix> {
    if h.is_empty() {
        return Vec::new();
    }
    let n = v.len();
    let mut m = Matrix::zeros(n, h.len());
    for (k, x) in h.iter().enumerate() {
        for (i, c) in x.apply(v).into_iter().enumerate() {
            m[(i, k)] = c;
        }
    }
    m.kernel()
        .into_iter()
        .map(|c| {
            let mut s = Matrix::zeros(n, n);
            for (ck, x) in c.iter().zip(h) {
                if !ck.is_zero() {
                    s = &s + &x.scale(ck);
                }
            }
            s
        })
        .collect()
}

/// Vectors fixed by every element of `h`.
pub fn fixed_vectors(h: &[Matrix], n: usize) -> Vec<Vec<Scalar>> {
    if h.is_empty() {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    let mut m = Matrix::zeros(n * h.len(), n);
    for (k, x) in h.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                m[(k * n + i, j)] = x[(i, j)].clone();
            }
        }
    }
    m.kernel()
}

pub fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

/// Orbit case of a pair of null vectors under the common stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCase {
    K,
    H5,
    R3,
    Sl2,
}

impl PairCase {
    pub fn expected_label(&self) -> LieLabel {
        match self {
            PairCase::K => LieLabel::K,
            PairCase::H5 => LieLabel::H5,
            PairCase::R3 => LieLabel::R3,
            PairCase::Sl2 => LieLabel::Sl2,
        }
    }
}

impl std::fmt::Display for PairCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairCase::K => "K",
            PairCase::H5 => "H5",
            PairCase::R3 => "R3",
            PairCase::Sl2 => "SL2",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PairClassification {
    pub case: PairCase,
    pub stabilizer_dim: usize,
    pub fingerprint: LieFingerprint,
}

impl PairClassification {
    pub fn consistent(&self) -> bool {
        self.fingerprint.label == self.case.expected_label()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PairError {
    #[error("{0} is not a nonzero null vector")]
    NotNull(&'static str),
    #[error("vectors must have 7 components")]
    Dimension,
}

/// The standard split-octonion data bundled for repeated use.
#[derive(Debug, Clone)]
pub struct Octonions {
    pub phi: ThreeForm,
    pub gram: Matrix,
    pub gram_inv: Matrix,
    pub g2: Vec<Matrix>,
}

impl Default for Octonions {
    fn default() -> Self {
        Octonions::new()
    }
}

impl Octonions {
    pub fn new() -> Self {
        let phi = ThreeForm::from_form(&standard_phi()).expect("constant form");
        let gram = standard_gram();
        let gram_inv = gram.inverse().expect("nondegenerate");
        Octonions { phi, gram, gram_inv, g2: g2_basis() }
    }

    pub fn is_null(&self, x: &[Scalar]) -> bool {
        inner(&self.gram, x, x).is_zero()
    }

    pub fn classify_pair(&self, x: &[Scalar], y: &[Scalar]) -> Result<PairClassification, PairError> {
        if x.len() != DIM || y.len() != DIM {
            return Err(PairError::Dimension);
        }
        if x.iter().all(Scalar::is_zero) || !self.is_null(x) {
            return Err(PairError::NotNull("x"));
        }
        if y.iter().all(Scalar::is_zero) || !self.is_null(y) {
            return Err(PairError::NotNull("y"));
        }
        let case = if span_rank(&[x.to_vec(), y.to_vec()]) == 1 {
            PairCase::K
        } else if self.phi.partial(x, y).iter().all(Scalar::is_zero) {
            PairCase::H5
        } else if inner(&self.gram, x, y).is_zero() {
            PairCase::R3
        } else {
            PairCase::Sl2
        };
        let st = stabilizer(y, &stabilizer(x, &self.g2));
        let alg = LieAlgebra::generated_by(DIM, &st);
        Ok(PairClassification { case, stabilizer_dim: st.len(), fingerprint: alg.fingerprint() })
    }

    /// `[x] ⊂ Ann x ⊂ (Ann x)^⊥ ⊂ [x]^⊥` for a null `x`; returns the dimensions
    /// when all inclusions hold.
    pub fn null_flag(&self, x: &[Scalar]) -> Option<[usize; 4]> {
        let line = vec![x.to_vec()];
        let ann = self.phi.annihilator(x);
        let ann_perp = self.perp(&ann);
        let x_perp = self.perp(&line);
        let contains = |big: &[Vec<Scalar>], small: &[Vec<Scalar>]| intersect(big, small).len() == span_rank(small);
        (contains(&ann, &line) && contains(&ann_perp, &ann) && contains(&x_perp, &ann_perp))
            .then(|| [1, span_rank(&ann), span_rank(&ann_perp), span_rank(&x_perp)])
    }

    /// `g`-orthogonal complement of a span.
    pub fn perp(&self, vs: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        let m = Matrix::from_rows(vs.iter().map(|v| self.gram.apply(v)).collect());
        m.kernel()
    }

    /// `c` with `tr(z ↦ x × (y × z)) = c·⟨x, y⟩` for all `x, y`, when such a
    /// constant exists.
    pub fn cross_trace_coefficient(&self) -> Option<Scalar> {
        let mut c: Option<Scalar> = None;
        for i in 0..DIM {
            for j in i..DIM {
                let t = cross_trace(&unit(DIM, i), &unit(DIM, j), &self.phi, &self.gram_inv);
                let g = &self.gram[(i, j)];
                if g.is_zero() {
                    if !t.is_zero() {
                        return None;
                    }
                    continue;
                }
                let r = &t * &g.inv()?;
                match &c {
                    None => c = Some(r),
                    Some(c0) if *c0 != r => return None,
                    _ => {}
                }
            }
        }
        c
    }

    /// A rational null vector with the given first six coordinates
    /// (`x₁ ≠ 0`), solving `2x₁x₇ + 2x₂x₅ + 2x₃x₆ − x₄² = 0` for `x₇`.
    pub fn null_vector(first: [Scalar; 6]) -> Vec<Scalar> {
        let [x1, x2, x3, x4, x5, x6] = first;
        let num = &(&(&x4 * &x4) - &(&Scalar::from_int(2) * &(&x2 * &x5))) - &(&Scalar::from_int(2) * &(&x3 * &x6));
        let x7 = &num * &(&Scalar::from_int(2) * &x1).inv().expect("x1 must be nonzero");
        vec![x1, x2, x3, x4, x5, x6, x7]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Vec<Scalar> {
        unit(DIM, i - 1)
    }

    #[test]
    fn phi_component() {
        let o = Octonions::new();
        let expect = -&(&sqrt2() * &(&root(2, -1, 2) * &root(3, -1, 2)));
        assert_eq!(o.phi.get(0, 4, 5), &expect);
        assert_eq!(o.phi.get(4, 0, 5), &-&expect);
    }

    #[test]
    fn gram_signature() {
        assert_eq!(standard_gram().inertia(), (3, 4, 0));
    }

    #[test]
    fn printed_gram_is_h_of_phi() {
        let g: ExprMatrix = (0..DIM).map(|i| (0..DIM).map(|j| Expr::scalar(standard_gram()[(i, j)].clone())).collect()).collect();
        let h = h_identity(&standard_phi(), &g, &|e| e.clone());
        assert!(h.holds(), "{h:?}");
    }

    #[test]
    fn h_identity_scales() {
        let l = Expr::int(2);
        let phi = standard_phi().scale(&l.pow_i(3));
        let g: ExprMatrix =
            (0..DIM).map(|i| (0..DIM).map(|j| &Expr::scalar(standard_gram()[(i, j)].clone()) * &l.pow_i(2)).collect()).collect();
        assert!(h_identity(&phi, &g, &|e| e.clone()).holds());
        // the wrong scaling of g is detected
        let g1: ExprMatrix =
            (0..DIM).map(|i| (0..DIM).map(|j| &Expr::scalar(standard_gram()[(i, j)].clone()) * &l).collect()).collect();
        assert!(!h_identity(&phi, &g1, &|e| e.clone()).holds());
    }

    #[test]
    fn annihilators() {
        let o = Octonions::new();
        assert_eq!(o.phi.annihilator(&e(1)).len(), 3);
        assert_eq!(o.phi.annihilator(&e(4)).len(), 1);
    }

    #[test]
    fn g2_is_in_so34_and_kills_phi() {
        let o = Octonions::new();
        let g2 = g2_basis();
        assert_eq!(span_rank(&g2.iter().map(|m| m.entries().to_vec()).collect::<Vec<_>>()), 14);
        for x in &g2 {
            assert!((&(&x.transpose() * &o.gram) + &(&o.gram * x)).is_zero());
            assert!(o.phi.derivation(x).is_zero());
        }
        let alg = LieAlgebra::from_basis(DIM, g2);
        assert!(alg.is_closed());
    }

    #[test]
    fn k_and_h5() {
        let o = Octonions::new();
        let k = stabilizer(&e(1), &o.g2);
        assert_eq!(k.len(), 8);
        assert!(crate::holonomy::span_matches(&k, &k_basis()));
        let h = stabilizer(&e(2), &k);
        assert_eq!(h.len(), 5);
        assert!(crate::holonomy::span_matches(&h, &h5_basis(true)));
        assert!(!crate::holonomy::span_matches(&h, &h5_basis(false)));
    }

    #[test]
    fn pair_cases() {
        let o = Octonions::new();
        let three_e1: Vec<Scalar> = e(1).iter().map(|v| v * &Scalar::from_int(3)).collect();
        for (y, case, dim) in [(three_e1, PairCase::K, 8), (e(2), PairCase::H5, 5), (e(5), PairCase::R3, 3), (e(7), PairCase::Sl2, 3)] {
            let c = o.classify_pair(&e(1), &y).unwrap();
            assert_eq!(c.case, case);
            assert_eq!(c.stabilizer_dim, dim);
            assert!(c.consistent(), "{case}: {}", c.fingerprint);
        }
        assert!(o.classify_pair(&e(1), &e(4)).is_err());
    }

    #[test]
    fn fixed_vectors_of_h5() {
        let fixed = fixed_vectors(&h5_basis(true), DIM);
        assert_eq!(fixed.len(), 2);
        assert!(crate::holonomy::span_matches(
            &fixed.iter().map(|v| Matrix::from_rows(vec![v.clone()])).collect::<Vec<_>>(),
            &[Matrix::from_rows(vec![e(1)]), Matrix::from_rows(vec![e(2)])]
        ));
        assert!(fixed_vectors(&g2_basis(), DIM).is_empty());
        assert_eq!(fixed_vectors(&[], DIM).len(), DIM);
    }

    #[test]
    fn trace_coefficient() {
        let o = Octonions::new();
        assert_eq!(o.cross_trace_coefficient(), Some(Scalar::from_int(-1)));
        let x: Vec<Scalar> = [1, 2, 0, -1, 3, 1, 2].into_iter().map(Scalar::from_int).collect();
        let y: Vec<Scalar> = [0, 1, 1, 2, -1, 0, 1].into_iter().map(Scalar::from_int).collect();
        assert_eq!(cross_trace(&x, &y, &o.phi, &o.gram_inv), -&inner(&o.gram, &x, &y));
    }

    #[test]
    fn null_flags() {
        let o = Octonions::new();
        assert_eq!(o.null_flag(&e(1)), Some([1, 3, 4, 6]));
        let x = Octonions::null_vector([1, 2, -1, 3, 1, 2].map(Scalar::from_int));
        assert!(o.is_null(&x));
        assert_eq!(o.null_flag(&x), Some([1, 3, 4, 6]));
    }
}
