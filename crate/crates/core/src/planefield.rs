//! Monge normal form `z' = F(x, y, y', y'', z)`, plane-field brackets and
//! symmetries, the `F(q)` Cartan quartic and binary-quartic root types.

use std::fmt;

use ambient_expr::{Expr, Scalar};

use crate::forms::{Chart, Coframe, Form, GeomError, VectorField};
use crate::linalg::{expr_inverse, expr_rank, ExprMatrix};

/// Coordinate order of the jet chart.
pub const JET_COORDS: [&str; 5] = ["x", "y", "p", "q", "z"];

pub fn jet_chart() -> Chart {
    Chart::new(&JET_COORDS)
}

/// The plane field `D_F = ker{ω¹, ω², ω³} = ⟨E₄, E₅⟩` with the augmented
/// coframe `ω⁴ = dq`, `ω⁵ = dx`.
#[derive(Debug, Clone)]
pub struct PlaneField {
    chart: Chart,
    f: Expr,
    coframe: Coframe,
}

impl PlaneField {
    /// Builds `D_F` on `chart`, which must carry the jet coordinates.
    pub fn from_monge(chart: &Chart, f: Expr) -> Result<Self, GeomError> {
        for c in JET_COORDS {
            chart.index(c)?;
        }
        let d = |c: &str| chart.d_coord(c);
        let v = Expr::var;
        let fq = chart.diff_by(&f, "q")?;
        let w3 = d("p").sub(&d("x").scale(&v("q")));
        let w1 = d("y").sub(&d("x").scale(&v("p")));
        let w2 = d("z").sub(&d("x").scale(&f)).sub(&w3.scale(&fq));
        let w4 = d("q");
        let w5 = d("x");
        let mut forms = vec![w1, w2, w3, w4, w5];
        // extend to a coframe on larger charts by the remaining coordinate differentials
        for (i, c) in chart.coords().iter().enumerate() {
            if !JET_COORDS.contains(&c.as_str()) {
                forms.push(chart.dx(i));
            }
        }
        let coframe = Coframe::new(forms)?;
        Ok(PlaneField { chart: chart.clone(), f, coframe })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    /// `ωᵃ`, `a = 1…5`.
    pub fn omega(&self, a: usize) -> &Form {
        self.coframe.form(a - 1)
    }

    /// `E_a`, `a = 1…5`.
    pub fn e(&self, a: usize) -> &VectorField {
        self.coframe.vector(a - 1)
    }

    pub fn span(&self) -> [&VectorField; 2] {
        [self.e(4), self.e(5)]
    }

    pub fn annihilators(&self) -> [&Form; 3] {
        [self.omega(1), self.omega(2), self.omega(3)]
    }

    /// `ωⁱ(V)` for `i = 1, 2, 3`.
    pub fn annihilator_values(&self, v: &VectorField) -> [Expr; 3] {
        let a = self.annihilators();
        [0, 1, 2].map(|i| self.chart.reduce(&a[i].eval(&[&v.comps])))
    }

    pub fn contains(&self, v: &VectorField) -> bool {
        self.annihilator_values(v).iter().all(Expr::is_zero)
    }

    /// `[D, D] = ker{ω¹, ω²}`: `[E₄, E₅]` is killed by `ω¹, ω²` but not by `ω³`.
    pub fn derived_is_ker_w1_w2(&self) -> bool {
        let b = self.e(4).bracket(self.e(5), &self.chart);
        let [a1, a2, a3] = self.annihilator_values(&b);
        a1.is_zero() && a2.is_zero() && !a3.is_zero()
    }

    pub fn genericity(&self) -> Genericity {
        let ch = &self.chart;
        let (e4, e5) = (self.e(4), self.e(5));
        let b = e4.bracket(e5, ch);
        let c4 = e4.bracket(&b, ch);
        let c5 = e5.bracket(&b, ch);
        let rows = |vs: &[&VectorField]| -> ExprMatrix { vs.iter().map(|v| v.comps.iter().map(|e| ch.reduce(e)).collect()).collect() };
        let r1 = expr_rank(&rows(&[e4, e5]));
        let r2 = expr_rank(&rows(&[e4, e5, &b]));
        let m3 = rows(&[e4, e5, &b, &c4, &c5]);
        let r3 = expr_rank(&m3);
        // the 5×5 minor on the jet coordinates: its zero set is where growth fails
        let cols: Vec<usize> = JET_COORDS.iter().map(|c| ch.index(c).unwrap()).collect();
        let sq: ExprMatrix = m3.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect();
        let locus = expr_inverse(&sq).map(|(_, d)| d).unwrap_or_else(Expr::zero);
        Genericity { ranks: (r1, r2, r3), locus }
    }

    /// `[ξ, V] ∈ D` for both spanning fields; returns the offending
    /// annihilator values when it fails.
    pub fn symmetry_residuals(&self, xi: &VectorField) -> Vec<Expr> {
        let mut out = Vec::new();
        for v in self.span() {
            let b = xi.bracket(v, &self.chart);
            out.extend(self.annihilator_values(&b).iter().map(|e| self.chart.reduce(e)));
        }
        out
    }

    pub fn is_symmetry(&self, xi: &VectorField) -> bool {
        self.symmetry_residuals(xi).iter().all(Expr::is_zero)
    }
}

/// Ranks of `D`, `[D, D]`, `[D, [D, D]]` at a generic point, and the
/// determinant whose vanishing marks where the growth vector drops.
#[derive(Debug, Clone)]
pub struct Genericity {
    pub ranks: (usize, usize, usize),
    pub locus: Expr,
}

impl Genericity {
    pub fn is_generic(&self) -> bool {
        self.ranks == (2, 3, 5)
    }
}

/// `Ψ[U] = 10 U⁗U³ − 80 U‴U′U² − 51 (U″)²U² + 336 U″(U′)²U − 224 (U′)⁴`,
/// derivatives in `q`.
pub fn psi_operator(u: &Expr) -> Expr {
    let d1 = u.diff("q");
    let d2 = d1.diff("q");
    let d3 = d2.diff("q");
    let d4 = d3.diff("q");
    let u2 = u.pow_i(2);
    let c = |n: i64| Expr::int(n);
    c(10) * &d4 * &u.pow_i(3) - c(80) * &d3 * &d1 * &u2 - c(51) * &d2.pow_i(2) * &u2 + c(336) * &d2 * &d1.pow_i(2) * u
        - c(224) * &d1.pow_i(4)
}

/// Binary quartic `Σ a_k u^k v^{4−k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quartic {
    pub coeffs: [Expr; 5],
}

impl Quartic {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    pub fn specialize(&self, val: &dyn Fn(&ambient_expr::Atom) -> Option<Scalar>) -> Result<[Scalar; 5], ambient_expr::EvalError> {
        let mut out: [Scalar; 5] = Default::default();
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            *o = c.eval_with(val)?;
        }
        Ok(out)
    }
}

/// `A_{F(q)} = (F″)^{-4} Ψ[F″] dq⁴` with `u = dq`.
pub fn cartan_quartic_fq(f: &Expr) -> Result<Quartic, GeomError> {
    let f2 = f.diff("q").diff("q");
    let inv = f2.inv().ok_or(GeomError::Singular("F'' vanishes identically"))?;
    let a4 = &inv.pow_i(4) * &psi_operator(&f2);
    Ok(Quartic { coeffs: [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero(), a4] })
}

/// Root multiplicities of a binary quartic over ℂ, or `[∞]` when it vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootType {
    Simple,
    Double,
    DoubleDouble,
    Triple,
    Quadruple,
    Infinite,
}

impl RootType {
    pub fn partition(&self) -> &'static [u32] {
        match self {
            RootType::Simple => &[1, 1, 1, 1],
            RootType::Double => &[2, 1, 1],
            RootType::DoubleDouble => &[2, 2],
            RootType::Triple => &[3, 1],
            RootType::Quadruple => &[4],
            RootType::Infinite => &[],
        }
    }

    pub fn from_partition(p: &[u32]) -> Option<RootType> {
        let mut v = p.to_vec();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Some(match v.as_slice() {
            [1, 1, 1, 1] => RootType::Simple,
            [2, 1, 1] => RootType::Double,
            [2, 2] => RootType::DoubleDouble,
            [3, 1] => RootType::Triple,
            [4] => RootType::Quadruple,
            [] => RootType::Infinite,
            _ => return None,
        })
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == RootType::Infinite {
            return write!(f, "[inf]");
        }
        let parts: Vec<String> = self.partition().iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Dense univariate polynomial over `Scalar`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UPoly(pub Vec<Scalar>);

impl UPoly {
    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(Scalar::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * &Scalar::from_int(k as i64)).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::default();
        }
        let mut out = vec![Scalar::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::new(out)
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].inv().expect("nonzero leading coefficient");
        let mut r = self.0.clone();
        let mut q = vec![Scalar::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let c = &r[k] * &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k - dd + j] = &r[k - dd + j] - &(&c * dj);
                }
                q[k - dd] = c;
            }
            r.pop();
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn monic(&self) -> UPoly {
        match self.0.last() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                UPoly(self.0.iter().map(|c| c * &inv).collect())
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p(x + k)`.
    pub fn shift(&self, k: &Scalar) -> UPoly {
        let mut out = UPoly::default();
        let lin = UPoly::new(vec![k.clone(), Scalar::one()]);
        for c in self.0.iter().rev() {
            out = out.mul(&lin);
            let mut v = out.0.clone();
            if v.is_empty() {
                v.push(Scalar::zero());
            }
            v[0] = &v[0] + c;
            out = UPoly::new(v);
        }
        out
    }
}

/// Root type of `Σ a_k u^k v^{4−k}` from the degree of `gcd(p, p′)` after
/// moving any root off infinity.
pub fn root_type(a: &[Scalar; 5]) -> RootType {
    let p = UPoly::new(a.to_vec());
    if p.is_zero() {
        return RootType::Infinite;
    }
    // Q(s, 1 + k s) = Σ a_j s^j (1 + k s)^{4−j} has degree 4 once Q(1, k) ≠ 0
    let mut k = 0i64;
    let q = loop {
        let q = shifted(a, &Scalar::from_int(k));
        if q.degree() == Some(4) {
            break q;
        }
        k += 1;
    };
    let g = q.gcd(&q.derivative());
    match g.degree().unwrap_or(0) {
        0 => RootType::Simple,
        1 => RootType::Double,
        2 => {
            if g.gcd(&g.derivative()).degree() == Some(0) {
                RootType::DoubleDouble
            } else {
                RootType::Triple
            }
        }
        _ => RootType::Quadruple,
    }
}

fn shifted(a: &[Scalar; 5], k: &Scalar) -> UPoly {
    let mut q = UPoly::default();
    for (j, aj) in a.iter().enumerate() {
        if aj.is_zero() {
            continue;
        }
        let mut t = UPoly::new(vec![Scalar::zero(); j].into_iter().chain([aj.clone()]).collect());
        for _ in 0..4 - j {
            t = t.mul(&UPoly::new(vec![Scalar::one(), k.clone()]));
        }
        q = add(&q, &t);
    }
    q
}

fn add(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.0.len().max(b.0.len());
    UPoly::new(
        (0..n)
            .map(|i| {
                let x = a.0.get(i).cloned().unwrap_or_else(Scalar::zero);
                let y = b.0.get(i).cloned().unwrap_or_else(Scalar::zero);
                &x + &y
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: [i64; 5]) -> [Scalar; 5] {
        v.map(Scalar::from_int)
    }

    #[test]
    fn frame_matches_monge_formulas() {
        let c = jet_chart();
        let f = Expr::func("F", "x", 0) * Expr::var("q").pow_i(2) + Expr::var("y") * Expr::var("z");
        let d = PlaneField::from_monge(&c, f.clone()).unwrap();
        assert!(d.coframe().duality_holds());
        let fq = f.diff("q");
        let e3 = VectorField::from_pairs(&c, &[("p", Expr::one()), ("z", fq)]);
        assert_eq!(d.e(3), &e3);
        let v = Expr::var;
        let e5 = VectorField::from_pairs(&c, &[("x", Expr::one()), ("y", v("p")), ("p", v("q")), ("z", f)]);
        assert_eq!(d.e(5), &e5);
        assert!(d.derived_is_ker_w1_w2());
    }

    #[test]
    fn genericity_tracks_fqq() {
        let c = jet_chart();
        let q = Expr::var("q");
        assert!(PlaneField::from_monge(&c, q.pow_i(2)).unwrap().genericity().is_generic());
        let g = PlaneField::from_monge(&c, q.clone()).unwrap().genericity();
        assert!(g.ranks.2 < 5);
        let g = PlaneField::from_monge(&c, q.pow_i(3)).unwrap().genericity();
        assert!(g.is_generic());
        assert!(g.locus.depends_on("q"));
    }

    #[test]
    fn dq_is_not_a_symmetry_of_the_flat_model() {
        let c = jet_chart();
        let d = PlaneField::from_monge(&c, Expr::var("q").pow_i(2)).unwrap();
        assert!(d.is_symmetry(&c.partial_by("z")));
        assert!(!d.is_symmetry(&c.partial_by("q")));
    }

    #[test]
    fn psi_of_constants_vanishes() {
        assert!(psi_operator(&Expr::int(2)).is_zero());
        let q = Expr::var("q");
        assert!(!psi_operator(&(Expr::int(20) * q.pow_i(3))).is_zero());
    }

    #[test]
    fn root_type_table() {
        // u⁴
        assert_eq!(root_type(&ints([0, 0, 0, 0, 1])), RootType::Quadruple);
        // v⁴: root at infinity in s = u/v
        assert_eq!(root_type(&ints([1, 0, 0, 0, 0])), RootType::Quadruple);
        // s(s−1)(s−2)(s−3) = s⁴ − 6s³ + 11s² − 6s
        assert_eq!(root_type(&ints([0, -6, 11, -6, 1])), RootType::Simple);
        // (s² + 1)² = s⁴ + 2s² + 1
        assert_eq!(root_type(&ints([1, 0, 2, 0, 1])), RootType::DoubleDouble);
        // s³ v
        assert_eq!(root_type(&ints([0, 0, 0, 1, 0])), RootType::Triple);
        // s² v (s − v)
        assert_eq!(root_type(&ints([0, 0, -1, 1, 0])), RootType::Double);
        assert_eq!(root_type(&ints([0, 0, 0, 0, 0])), RootType::Infinite);
    }

    #[test]
    fn poly_gcd_and_shift() {
        let p = UPoly::new(vec![Scalar::from_int(-1), Scalar::zero(), Scalar::one()]);
        let q = UPoly::new(vec![Scalar::from_int(1), Scalar::one()]);
        assert_eq!(p.gcd(&q), q);
        let s = q.shift(&Scalar::from_int(2));
        assert_eq!(s, UPoly::new(vec![Scalar::from_int(3), Scalar::one()]));
    }
}
