//! Concrete catalog: the `I(x)` and `F(q)` families with their metrics,
//! ambient metrics, parallel 3-forms and null vectors, the explicit Cartan
//! section, and the Strazzullo fields.

use std::fmt::Write as _;

use ambient_expr::{Expr, Rational64, RuleSet, Scalar};

use crate::forms::{Chart, Coframe, Form, GeomError, VectorField};
use crate::planefield::{jet_chart, psi_operator, PlaneField};
use crate::riemann::Metric;
use crate::tensor::{Slot, Tensor};

/// Ambient coordinates `(t, x, y, p, q, z, ρ)`.
pub const AMBIENT_COORDS: [&str; 7] = ["t", "x", "y", "p", "q", "z", "rho"];

pub fn ambient_chart() -> Chart {
    Chart::new(&AMBIENT_COORDS)
}

/// `2^{-5/6} 3^{-1/3}`
pub fn c_i() -> Scalar {
    &Scalar::prime_power(2, Rational64::new(-5, 6)) * &Scalar::prime_power(3, Rational64::new(-1, 3))
}

/// `2^{1/3} 3^{5/3} 5^{3/2}`
pub fn c_f() -> Scalar {
    &(&Scalar::prime_power(2, Rational64::new(1, 3)) * &Scalar::prime_power(3, Rational64::new(5, 3)))
        * &Scalar::prime_power(5, Rational64::new(3, 2))
}

fn v(name: &str) -> Expr {
    Expr::var(name)
}

fn q(n: i64, d: i64) -> Expr {
    Expr::rational(n, d)
}

/// The plane field of `F` on the jet chart together with its lift to the
/// ambient chart, where the coframe is reordered as `(dt, ω¹, …, ω⁵, dρ)`.
#[derive(Debug, Clone)]
pub struct Frames {
    pub base: PlaneField,
    pub ambient: Coframe,
    pub chart: Chart,
}

impl Frames {
    pub fn new(f: &Expr, rules: &RuleSet) -> Result<Self, GeomError> {
        let base = PlaneField::from_monge(&jet_chart().with_rules(rules.clone()), f.clone())?;
        let chart = ambient_chart().with_rules(rules.clone());
        let lifted = PlaneField::from_monge(&chart, f.clone())?;
        let mut forms = vec![chart.d_coord("t")];
        forms.extend((1..=5).map(|a| lifted.omega(a).clone()));
        forms.push(chart.d_coord("rho"));
        Ok(Frames { base, ambient: Coframe::new(forms)?, chart })
    }

    /// `ω^a` on the ambient chart; 0 is `dt` and 6 is `dρ`.
    pub fn w(&self, a: usize) -> &Form {
        self.ambient.form(a)
    }

    /// Dual frame on the ambient chart; 0 is `∂t` and 6 is `∂ρ`.
    pub fn e(&self, a: usize) -> &VectorField {
        self.ambient.vector(a)
    }

    fn wedge(&self, idx: &[usize]) -> Form {
        let mut f = self.w(idx[0]).clone();
        for &i in &idx[1..] {
            f = f.wedge(self.w(i));
        }
        f
    }

    /// `Σ c · w^{i}∧w^{j}∧…` on the ambient chart.
    pub fn form(&self, terms: &[(Expr, &[usize])]) -> Form {
        let deg = terms[0].1.len();
        let mut out = Form::zero(7, deg);
        for (c, idx) in terms {
            out = out.add(&self.wedge(idx).scale(c));
        }
        out.reduce(&self.chart)
    }

    /// Symmetric 2-tensor from terms `c · w^i w^j`.
    pub fn quadratic(&self, terms: &[(Expr, usize, usize)]) -> Tensor {
        let t: Vec<(Expr, &Form, &Form)> = terms.iter().map(|(c, a, b)| (c.clone(), self.w(*a), self.w(*b))).collect();
        crate::tensor::quadratic(7, &t)
    }

    /// `E ⊗ w` as an endomorphism.
    pub fn endo(&self, terms: &[(Expr, usize, usize)]) -> Tensor {
        let mut t = Tensor::zero(7, &[Slot::Up, Slot::Down]);
        for (c, e, w) in terms {
            t = t.add(&Tensor::vector(self.e(*e)).tensor(&Tensor::from_form(self.w(*w))).scale(c));
        }
        t.reduce(&self.chart)
    }

    /// Base-chart quadratic form from terms `c · ω^i ω^j` (1-based).
    pub fn base_quadratic(&self, terms: &[(Expr, usize, usize)]) -> Tensor {
        let t: Vec<(Expr, &Form, &Form)> =
            terms.iter().map(|(c, a, b)| (c.clone(), self.base.omega(*a), self.base.omega(*b))).collect();
        crate::tensor::quadratic(5, &t)
    }

    /// The 4-tensor `k (a⊗b⊗a⊗b − a⊗b⊗b⊗a − b⊗a⊗a⊗b + b⊗a⊗b⊗a)`.
    pub fn curvature_pattern(&self, k: &Expr, a: usize, b: usize) -> Tensor {
        let ta = Tensor::from_form(self.w(a));
        let tb = Tensor::from_form(self.w(b));
        let p = |x: &Tensor, y: &Tensor, z: &Tensor, w: &Tensor| x.tensor(y).tensor(z).tensor(w);
        p(&ta, &tb, &ta, &tb)
            .sub(&p(&ta, &tb, &tb, &ta))
            .sub(&p(&tb, &ta, &ta, &tb))
            .add(&p(&tb, &ta, &tb, &ta))
            .scale(k)
            .reduce(&self.chart)
    }
}

/// `ρ`-homogeneous ambient extension `2ρ dt² + 2t dt dρ + t²(g + ρ h)`.
fn ambient_from(fr: &Frames, g: &[(Expr, usize, usize)], h: &[(Expr, usize, usize)]) -> Tensor {
    let t = v("t");
    let rho = v("rho");
    let t2 = t.pow_i(2);
    let mut terms = vec![(&Expr::int(2) * &rho, 0, 0), (&Expr::int(2) * &t, 0, 6)];
    terms.extend(g.iter().map(|(c, a, b)| (c * &t2, *a, *b)));
    terms.extend(h.iter().map(|(c, a, b)| (&(c * &t2) * &rho, *a, *b)));
    fr.quadratic(&terms).reduce(&fr.chart)
}

/// Data shared by the two families for the ambient checks.
pub trait AmbientModel: Sync {
    fn name(&self) -> &'static str;
    fn frames(&self) -> &Frames;
    /// Name and argument of the formal scale `σ`.
    fn sigma_arg(&self) -> &'static str;
    /// `σ''` in terms of `σ, σ'` for the almost-Ricci-flat scales.
    fn sigma_rhs(&self, name: &str) -> Expr;
    /// Ambient metric on the given chart.
    fn ambient_tensor(&self) -> Tensor;
    fn phi3(&self) -> Form;
    fn xi(&self, sigma: &str) -> VectorField;

    fn sigma_rules(&self, names: &[&str]) -> RuleSet {
        let arg = self.sigma_arg();
        names.iter().fold(RuleSet::new(), |r, n| r.with(n, arg, 2, self.sigma_rhs(n)))
    }

    fn ambient_metric(&self, chart: &Chart) -> Result<Metric, GeomError> {
        Metric::from_tensor(chart, &self.ambient_tensor())
    }
}

/// Nurowski representative terms for the `I(x)` family, 1-based coframe indices.
fn g_i_terms(i: &Expr) -> Vec<(Expr, usize, usize)> {
    vec![
        (&Expr::int(-3) * i, 1, 1),
        (Expr::int(3), 1, 4),
        (&(&Expr::int(-10) * i) * &v("p"), 1, 5),
        (Expr::int(-3), 2, 5),
        (Expr::int(-2), 3, 3),
    ]
}

/// The family `z' = F_I` for a function `I(x)`.
#[derive(Debug, Clone)]
pub struct IModel {
    pub i: Expr,
    pub f: Expr,
    pub frames: Frames,
}

impl IModel {
    /// `F_I = −½[q² + (10/3) I p² + (1 + I² − I'') y²]`.
    pub fn f_i(i: &Expr) -> Expr {
        let ipp = i.diff("x").diff("x");
        let inner = &(&v("q").pow_i(2) + &(&(&q(10, 3) * i) * &v("p").pow_i(2)))
            + &(&(&(&Expr::one() + &i.pow_i(2)) - &ipp) * &v("y").pow_i(2));
        &q(-1, 2) * &inner
    }

    pub fn new(i: Expr) -> Result<Self, GeomError> {
        IModel::with_rules(i, RuleSet::new())
    }

    pub fn with_rules(i: Expr, rules: RuleSet) -> Result<Self, GeomError> {
        let f = IModel::f_i(&i);
        let frames = Frames::new(&f, &rules)?;
        Ok(IModel { i, f, frames })
    }

    /// `I` as an opaque function of `x`.
    pub fn symbolic() -> Self {
        IModel::new(Expr::func("I", "x", 0)).expect("coframe")
    }

    pub fn g(&self) -> Tensor {
        self.frames.base_quadratic(&g_i_terms(&self.i))
    }

    pub fn metric(&self) -> Result<Metric, GeomError> {
        Metric::from_tensor(self.frames.base.chart(), &self.g())
    }

    /// `g̃_I` with the `ρ` correction scaled by `k` (`k = 1` as printed).
    pub fn ambient_with(&self, k: &Expr) -> Tensor {
        let h = vec![(&(&q(-2, 3) * &self.i) * k, 5, 5)];
        ambient_from(&self.frames, &g_i_terms(&self.i), &h)
    }

    /// Ambient metric of `λ g_I`: `2ρ dt² + 2t dt dρ + t²(λ g_I − ⅔ I dx² ρ)`.
    pub fn ambient_scaled(&self, lambda: &Expr) -> Tensor {
        let g: Vec<_> = g_i_terms(&self.i).into_iter().map(|(c, a, b)| (&c * lambda, a, b)).collect();
        ambient_from(&self.frames, &g, &[(&q(-2, 3) * &self.i, 5, 5)])
    }

    /// `φ_I = −9C ω¹∧ω²` on the jet chart.
    pub fn phi2(&self) -> Form {
        let b = &self.frames.base;
        b.omega(1).wedge(b.omega(2)).scale(&Expr::scalar(&Scalar::from_int(-9) * &c_i()))
    }

    pub fn expected_curvature(&self) -> Tensor {
        self.frames.curvature_pattern(&(&Expr::int(15) * &v("t").pow_i(2)), 1, 5)
    }

    /// `ψ₁, …, ψ₅`.
    pub fn psi(&self) -> Vec<Tensor> {
        let fr = &self.frames;
        let ti = Expr::one() / v("t");
        let i = &self.i;
        let ip = &(i * &v("p"));
        let n = |k: i64| Expr::int(k);
        vec![
            fr.endo(&[(n(1), 2, 1), (n(1), 4, 5)]),
            fr.endo(&[(ti.clone(), 2, 0), (n(15), 6, 5)]),
            fr.endo(&[(n(4), 2, 3), (n(-3), 3, 5), (&n(-6) * &ti, 4, 0), (n(90), 6, 1)]),
            fr.endo(&[
                (n(3), 1, 5),
                (n(3), 2, 4),
                (&n(-10) * ip, 2, 5),
                (&n(9) * &ti, 3, 0),
                (&n(6) * i, 4, 5),
                (n(180), 6, 3),
            ]),
            fr.endo(&[
                (ti.clone(), 1, 0),
                (&ti * i, 4, 0),
                (&n(15) * i, 6, 1),
                (n(-15), 6, 4),
                (&n(50) * ip, 6, 5),
            ]),
        ]
    }

    /// `−(1/9)(σE₃ + 4σ'E₄)` on the jet chart.
    pub fn expected_symmetry(&self, sigma: &str) -> VectorField {
        let b = &self.frames.base;
        let s = Expr::func(sigma, "x", 0);
        let sp = Expr::func(sigma, "x", 1);
        b.e(3).scale(&s).add(&b.e(4).scale(&(&Expr::int(4) * &sp))).scale(&q(-1, 9))
    }

    /// The residual `3σ^{-1}(σ'' − ⅓Iσ) dx²` on the jet chart.
    pub fn expected_einstein(&self, sigma: &Expr) -> Tensor {
        let b = &self.frames.base;
        let spp = b.chart().diff_by(&b.chart().diff_by(sigma, "x").unwrap(), "x").unwrap();
        let c = &(&Expr::int(3) / sigma) * &(&spp - &(&(&q(1, 3) * &self.i) * sigma));
        let dx = b.chart().d_coord("x");
        crate::tensor::quadratic(5, &[(c, &dx, &dx)]).reduce(b.chart())
    }
}

impl AmbientModel for IModel {
    fn name(&self) -> &'static str {
        "I(x)"
    }
    fn frames(&self) -> &Frames {
        &self.frames
    }
    fn sigma_arg(&self) -> &'static str {
        "x"
    }
    fn sigma_rhs(&self, name: &str) -> Expr {
        &(&q(1, 3) * &self.i) * &Expr::func(name, "x", 0)
    }
    fn ambient_tensor(&self) -> Tensor {
        self.ambient_with(&Expr::one())
    }

    fn phi3(&self) -> Form {
        let fr = &self.frames;
        let t2 = v("t").pow_i(2);
        let t3 = v("t").pow_i(3);
        let i = &self.i;
        let rho = v("rho");
        let n = |k: i64| Expr::int(k);
        let terms: Vec<(Expr, &[usize])> = vec![
            (&n(-9) * &t2, &[0, 1, 2]),
            (&n(-2) * &t2, &[0, 3, 6]),
            (&n(-3) * &t3, &[1, 3, 4]),
            (&(&(&n(10) * &t3) * i) * &v("p"), &[1, 3, 5]),
            (-&(&t3 * i), &[1, 5, 6]),
            (&n(3) * &t3, &[2, 3, 5]),
            (t3.clone(), &[4, 5, 6]),
            (&(&(&n(-3) * &t2) * i) * &rho, &[0, 1, 5]),
            (&t2 * &rho, &[0, 4, 5]),
        ];
        fr.form(&terms).scale(&Expr::scalar(c_i()))
    }

    /// `ξ^σ = t^{-1}(−⅔σ' ∂z + σ ∂ρ)`.
    fn xi(&self, sigma: &str) -> VectorField {
        let ti = Expr::one() / v("t");
        let c = &self.frames.chart;
        VectorField::from_pairs(
            c,
            &[
                ("z", &(&q(-2, 3) * &Expr::func(sigma, "x", 1)) * &ti),
                ("rho", &Expr::func(sigma, "x", 0) * &ti),
            ],
        )
    }
}

/// A monomial `c · ω^{i₁} ω^{i₂} …` in a printed metric formula.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub coeff: Expr,
    pub factors: Vec<usize>,
}

/// How the printed `−20 (F'')⁴ ω₃³` term of `g_F` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Omega3Term {
    /// exponent 3, as printed
    Printed,
    /// exponent 2
    Squared,
    /// term dropped
    Omitted,
}

/// The family `z' = F(q)`.
#[derive(Debug, Clone)]
pub struct FqModel {
    pub f: Expr,
    pub frames: Frames,
    d: [Expr; 5],
}

impl FqModel {
    pub fn new(f: Expr) -> Result<Self, GeomError> {
        FqModel::with_rules(f, RuleSet::new())
    }

    pub fn with_rules(f: Expr, rules: RuleSet) -> Result<Self, GeomError> {
        let mut d = vec![f.clone()];
        for k in 1..5 {
            let next = d[k - 1].diff("q");
            d.push(next);
        }
        if d[2].is_zero() {
            return Err(GeomError::Singular("F'' vanishes identically"));
        }
        let frames = Frames::new(&f, &rules)?;
        Ok(FqModel { f, frames, d: d.try_into().expect("five derivatives") })
    }

    /// `F` as an opaque function of `q`.
    pub fn symbolic() -> Self {
        FqModel::new(Expr::func("F", "q", 0)).expect("F'' is nonzero")
    }

    /// `F^{(k)}`, `k ≤ 4`.
    pub fn deriv(&self, k: usize) -> &Expr {
        &self.d[k]
    }

    /// `g_F` as printed, with the `ω₃` term read as requested.
    pub fn g_monomials(&self, w3: Omega3Term) -> Vec<Monomial> {
        let (f2, f3, f4) = (&self.d[2], &self.d[3], &self.d[4]);
        let m = |c: Expr, f: &[usize]| Monomial { coeff: c, factors: f.to_vec() };
        let mut out = vec![
            m(&Expr::int(30) * &f2.pow_i(4), &[1, 4]),
            m(&(&Expr::int(-3) * &(f4 * f2)) + &(&Expr::int(4) * &f3.pow_i(2)), &[2, 2]),
            m(&(&Expr::int(-10) * f3) * &f2.pow_i(2), &[2, 3]),
            m(&Expr::int(30) * &f2.pow_i(3), &[2, 5]),
        ];
        let c = &Expr::int(-20) * &f2.pow_i(4);
        match w3 {
            Omega3Term::Printed => out.push(m(c, &[3, 3, 3])),
            Omega3Term::Squared => out.push(m(c, &[3, 3])),
            Omega3Term::Omitted => {}
        }
        out
    }

    fn quadratic_terms(&self, w3: Omega3Term) -> Result<Vec<(Expr, usize, usize)>, GeomError> {
        self.g_monomials(w3)
            .into_iter()
            .map(|m| match m.factors[..] {
                [a, b] => Ok((m.coeff, a, b)),
                _ => Err(GeomError::Other(format!("term of degree {} in a quadratic form", m.factors.len()))),
            })
            .collect()
    }

    pub fn g(&self, w3: Omega3Term) -> Result<Tensor, GeomError> {
        Ok(self.frames.base_quadratic(&self.quadratic_terms(w3)?))
    }

    pub fn metric(&self, w3: Omega3Term) -> Result<Metric, GeomError> {
        Metric::from_tensor(self.frames.base.chart(), &self.g(w3)?)
    }

    /// `−(17F⁗F'' − 56F'''²)/(5F''²)`
    pub fn rho_coefficient(&self) -> Expr {
        let (f2, f3, f4) = (&self.d[2], &self.d[3], &self.d[4]);
        -&(&(&(&Expr::int(17) * &(f4 * f2)) - &(&Expr::int(56) * &f3.pow_i(2))) / &(&Expr::int(5) * &f2.pow_i(2)))
    }

    pub fn ambient(&self, w3: Omega3Term) -> Result<Tensor, GeomError> {
        Ok(ambient_from(&self.frames, &self.quadratic_terms(w3)?, &[(self.rho_coefficient(), 4, 4)]))
    }

    /// `φ_F = C' F''⁵ ω¹∧ω²` on the jet chart.
    pub fn phi2(&self) -> Form {
        let b = &self.frames.base;
        b.omega(1).wedge(b.omega(2)).scale(&(&Expr::scalar(c_f()) * &self.d[2].pow_i(5)))
    }

    /// `(3/20) t² F''^{-2} Ψ[F''] × (ω², ω⁴)` pattern.
    pub fn expected_curvature(&self) -> Tensor {
        let k = &(&(&q(3, 20) * &v("t").pow_i(2)) / &self.d[2].pow_i(2)) * &psi_operator(&self.d[2]);
        self.frames.curvature_pattern(&k, 2, 4)
    }

    /// The coefficient triple of `σ'', σ', σ` in the almost-Ricci-flat ODE.
    pub fn ode_triple(&self) -> [Expr; 3] {
        let (f2, f3, f4) = (&self.d[2], &self.d[3], &self.d[4]);
        [
            &Expr::int(10) * &f2.pow_i(2),
            &(&Expr::int(-40) * f3) * f2,
            &(&Expr::int(-17) * &(f4 * f2)) + &(&Expr::int(56) * &f3.pow_i(2)),
        ]
    }

    /// The six symmetry generators, on the jet chart.
    pub fn symmetries(&self) -> Vec<VectorField> {
        let c = self.frames.base.chart();
        let f = &self.f;
        let f1 = &self.d[1];
        let integral = Expr::integral("intFppF", "q", &self.d[2] * f);
        let (x, y, p, qq, z) = (v("x"), v("y"), v("p"), v("q"), v("z"));
        vec![
            c.partial_by("x"),
            c.partial_by("y"),
            c.partial_by("z"),
            VectorField::from_pairs(c, &[("x", x.clone()), ("y", &Expr::int(2) * &y), ("p", p.clone()), ("z", z.clone())]),
            VectorField::from_pairs(c, &[("y", x), ("p", Expr::one())]),
            VectorField::from_pairs(
                c,
                &[("x", f1.clone()), ("y", &(&p * f1) - &z), ("p", &(&qq * f1) - f), ("z", integral)],
            ),
        ]
    }
}

impl AmbientModel for FqModel {
    fn name(&self) -> &'static str {
        "F(q)"
    }
    fn frames(&self) -> &Frames {
        &self.frames
    }
    fn sigma_arg(&self) -> &'static str {
        "q"
    }
    fn sigma_rhs(&self, name: &str) -> Expr {
        let [a, b, c] = self.ode_triple();
        let s = Expr::func(name, "q", 0);
        let sp = Expr::func(name, "q", 1);
        -&(&(&(&b * &sp) + &(&c * &s)) / &a)
    }
    fn ambient_tensor(&self) -> Tensor {
        self.ambient(Omega3Term::Squared).expect("quadratic")
    }

    fn phi3(&self) -> Form {
        let fr = &self.frames;
        let (f2, f3, f4) = (&self.d[2], &self.d[3], &self.d[4]);
        let t2 = v("t").pow_i(2);
        let t3 = v("t").pow_i(3);
        let rho = v("rho");
        let f2i = Expr::one() / f2;
        let terms: Vec<(Expr, &[usize])> = vec![
            (&f2.pow_i(5) * &t2, &[0, 1, 2]),
            (&(&q(1, 9) * f3) * &t2, &[0, 2, 6]),
            (&(&q(-1, 45) * &f2.pow_i(2)) * &t2, &[0, 3, 6]),
            (&(&(&q(5, 3) * f3) * &f2.pow_i(4)) * &t3, &[1, 2, 4]),
            (&(&q(-1, 3) * &f2.pow_i(6)) * &t3, &[1, 3, 4]),
            (&(&q(-1, 3) * &f2.pow_i(5)) * &t3, &[2, 3, 5]),
            (&(&q(1, 900) * &(f4 - &(&(&Expr::int(168) * &f3.pow_i(2)) * &f2i))) * &t3, &[2, 4, 6]),
            (&(&(&q(7, 90) * f3) * f2) * &t3, &[3, 4, 6]),
            (&(&q(1, 90) * &f2.pow_i(2)) * &t3, &[4, 5, 6]),
            (
                &(&(&q(1, 900) * &(&(&Expr::int(103) * f4) - &(&(&Expr::int(504) * &f3.pow_i(2)) * &f2i))) * &t2) * &rho,
                &[0, 2, 4],
            ),
            (&(&(&(&q(7, 90) * f3) * f2) * &t2) * &rho, &[0, 3, 4]),
            (&(&(&q(1, 90) * &f2.pow_i(2)) * &t2) * &rho, &[0, 4, 5]),
        ];
        fr.form(&terms).scale(&Expr::scalar(c_f()))
    }

    /// `ξ^σ = (1/15) F''^{-4} t^{-1} σ' ∂y + t^{-1} σ ∂ρ`.
    fn xi(&self, sigma: &str) -> VectorField {
        let ti = Expr::one() / v("t");
        let c = &self.frames.chart;
        VectorField::from_pairs(
            c,
            &[
                ("y", &(&(&q(1, 15) / &self.d[2].pow_i(4)) * &ti) * &Expr::func(sigma, "q", 1)),
                ("rho", &Expr::func(sigma, "q", 0) * &ti),
            ],
        )
    }
}

/// `F = e^y [1 + (e^{-2y} q − ½ e^{-2y} p²)^r]`, `r ∈ {−1, 2}`.
pub fn strazzullo_f(r: i64) -> Expr {
    let ey = Expr::exp(&v("y"));
    let em2y = Expr::exp(&(&Expr::int(-2) * &v("y")));
    let u = &(&em2y * &v("q")) - &(&(&q(1, 2) * &em2y) * &v("p").pow_i(2));
    &ey * &(&Expr::one() + &u.pow_i(r))
}

/// The four printed symmetry generators of the Strazzullo fields.
pub fn strazzullo_symmetries() -> Vec<VectorField> {
    let c = jet_chart();
    let (x, p, qq) = (v("x"), v("p"), v("q"));
    let n = |k: i64| Expr::int(k);
    vec![
        c.partial_by("x"),
        VectorField::from_pairs(&c, &[("x", x.clone()), ("y", n(-1)), ("p", -&p), ("q", &n(-2) * &qq)]),
        VectorField::from_pairs(
            &c,
            &[
                ("x", x.pow_i(2)),
                ("y", &n(-2) * &x),
                ("p", &n(-2) * &(&(&x * &p) + &n(1))),
                ("q", &n(-2) * &(&p + &(&(&n(2) * &x) * &qq))),
            ],
        ),
        c.partial_by("z"),
    ]
}

/// Which transcription of the explicit section to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionVariant {
    /// exactly as printed
    Printed,
    /// `η¹` with `−½(1 + I² − I'') y²` in the `dx` coefficient and
    /// `η⁴ = dq − I dy`; this section satisfies every structure equation
    /// once `η⁴∧η⁴` in `dη³` is read as `η⁴∧η⁵`
    Resolved,
}

/// Which right-hand side to use for `dη³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eta3Term {
    /// `η⁴∧η⁴`, as printed
    Printed,
    /// `η⁴∧η⁵`
    Eta4Eta5,
}

/// The explicit section `η¹, …, η⁵, π¹, π²` on the jet chart.
#[derive(Debug, Clone)]
pub struct CartanSection {
    pub i: Expr,
    pub chart: Chart,
    /// `η¹ … η⁵`
    pub eta: [Form; 5],
    pub pi1: Form,
    pub pi2: Form,
    pub coframe: Coframe,
}

/// Residual of one structure equation `d(lhs) − rhs`.
#[derive(Debug, Clone)]
pub struct StructureResidual {
    pub name: &'static str,
    pub residual: Form,
    /// the residual expanded in the `η` basis
    pub in_frame: String,
}

impl StructureResidual {
    pub fn is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

impl CartanSection {
    pub fn new(i: Expr, variant: SectionVariant) -> Result<Self, GeomError> {
        let chart = jet_chart();
        let d = |c: &str| chart.d_coord(c);
        let ip = i.diff("x");
        let ipp = ip.diff("x");
        let (y, p, qq) = (v("y"), v("p"), v("q"));
        let k = &(&Expr::one() + &i.pow_i(2)) - &ipp;
        let k_term = match variant {
            SectionVariant::Printed => &q(1, 2) * &k,
            SectionVariant::Resolved => &(&q(1, 2) * &k) * &y.pow_i(2),
        };
        let eta1 = d("z")
            .add(&d("y").scale(&(&(&q(7, 3) * &p) * &i)))
            .add(&d("p").scale(&qq))
            .sub(&d("x").scale(&(&(&(&q(1, 2) * &qq.pow_i(2)) + &(&(&q(2, 3) * &i) * &p.pow_i(2))) - &k_term)));
        let eta2 = d("y").sub(&d("x").scale(&p));
        let eta3 = d("p").neg().add(&d("x").scale(&qq));
        let eta4 = match variant {
            SectionVariant::Printed => d("q").sub(&d("x").scale(&i)),
            SectionVariant::Resolved => d("q").sub(&d("y").scale(&i)),
        };
        let eta5 = d("x");
        let pi1 = Form::zero(5, 1);
        let pi2 = d("y")
            .scale(&-&ip)
            .sub(&d("p").scale(&(&q(4, 3) * &i)))
            .add(&d("x").scale(&(&(&(&k * &y) - &(&(&q(4, 3) * &ip) * &p)) - &(&i * &qq))));
        let eta = [eta1, eta2, eta3, eta4, eta5];
        let coframe = Coframe::new(eta.to_vec())?;
        Ok(CartanSection { i, chart, eta, pi1, pi2, coframe })
    }

    pub fn symbolic(variant: SectionVariant) -> Self {
        CartanSection::new(Expr::func("I", "x", 0), variant).expect("coframe")
    }

    fn e(&self, k: usize) -> &Form {
        &self.eta[k - 1]
    }

    /// Left sides and right sides, in order `dη¹, …, dη⁵, dπ¹, dπ²`.
    pub fn equations(&self, eta3: Eta3Term) -> Vec<(&'static str, Form, Form)> {
        let i = &self.i;
        let (p1, p2) = (&self.pi1, &self.pi2);
        let w = |a: &Form, b: &Form| a.wedge(b);
        let last = match eta3 {
            Eta3Term::Printed => w(self.e(4), self.e(4)),
            Eta3Term::Eta4Eta5 => w(self.e(4), self.e(5)),
        };
        vec![
            ("d eta1", self.e(1).clone(), w(self.e(1), p1).scale(&Expr::int(2)).add(&w(self.e(2), p2)).add(&w(self.e(3), self.e(4)))),
            ("d eta2", self.e(2).clone(), w(self.e(2), p1).add(&w(self.e(3), self.e(5)))),
            ("d eta3", self.e(3).clone(), w(self.e(2), self.e(5)).scale(i).add(&w(self.e(3), p1)).add(&last)),
            (
                "d eta4",
                self.e(4).clone(),
                w(self.e(3), self.e(5)).scale(&(&q(4, 3) * i)).add(&w(self.e(4), p1)).add(&w(self.e(5), p2)),
            ),
            ("d eta5", self.e(5).clone(), Form::zero(5, 2)),
            ("d pi1", p1.clone(), Form::zero(5, 2)),
            ("d pi2", p2.clone(), w(p1, p2).neg().sub(&w(self.e(4), self.e(5)).scale(i)).add(&w(self.e(2), self.e(5)))),
        ]
    }

    pub fn residuals(&self, eta3: Eta3Term) -> Vec<StructureResidual> {
        self.equations(eta3)
            .into_iter()
            .map(|(name, lhs, rhs)| {
                let residual = lhs.d(&self.chart).sub(&rhs).reduce(&self.chart);
                let in_frame = self.frame_string(&residual);
                StructureResidual { name, residual, in_frame }
            })
            .collect()
    }

    /// Renders a form in the `η` basis, e.g. `(-I)*eta2^eta5 + (1)*eta4^eta5`.
    pub fn frame_string(&self, f: &Form) -> String {
        let fr = self.coframe.to_frame(f).reduce(&self.chart);
        let mut s = String::new();
        for (idx, c) in fr.terms() {
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let names: Vec<String> = idx.iter().map(|k| format!("eta{}", k + 1)).collect();
            let _ = write!(s, "({})*{}", c, names.join("^"));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    /// Pullbacks of `η¹, η², η³` along the prolongation `(x, f, f', f'', z(x))`
    /// of a solution of `z' = F_I`.
    pub fn solution_pullbacks(&self) -> Vec<Expr> {
        let f = Expr::func("f", "x", 0);
        let fp = f.diff("x");
        let fpp = fp.diff("x");
        let fi = IModel::f_i(&self.i);
        let sub = |e: &Expr| e.subs_var("y", &f).subs_var("p", &fp).subs_var("q", &fpp);
        let zp = sub(&fi);
        // dx-rates of (x, y, p, q, z)
        let rates = [Expr::one(), fp.clone(), fpp.clone(), fpp.diff("x"), zp];
        self.eta[..3]
            .iter()
            .map(|e| {
                let comps = e.as_covector();
                let mut s = Expr::zero();
                for (c, r) in comps.iter().zip(&rates) {
                    s = &s + &(&sub(c) * r);
                }
                s
            })
            .collect()
    }

    /// `ker{η¹, η², η³} = D_I`.
    pub fn kernel_is_plane_field(&self) -> Result<bool, GeomError> {
        let pf = PlaneField::from_monge(&self.chart, IModel::f_i(&self.i))?;
        Ok(pf.span().iter().all(|x| {
            self.eta[..3].iter().all(|e| self.chart.reduce(&e.interior(&x.comps).comp(&[])).is_zero())
        }))
    }
}

/// `ξ^a = φ^{ab} σ_b + ¼ φ^{ba}{}_{,b} σ`.
pub fn aes_to_symmetry(sigma: &Expr, g: &Metric, phi: &Form) -> VectorField {
    let ch = g.chart();
    let n = g.dim();
    let up = g.raise(&g.raise(&Tensor::from_form(phi), 0), 1);
    let dsigma = Tensor::from_form(&Form::one_form((0..n).map(|i| ch.diff(sigma, i)).collect()));
    let first = up.tensor(&dsigma).contract(1, 2);
    let div = g.covariant_derivative(&up).contract(0, 2);
    let t = first.add(&div.scale(&(&q(1, 4) * sigma))).reduce(ch);
    VectorField::new((0..n).map(|i| t.get(&[i])).collect())
}

/// `ξ ↦ φ_{ab} ξ^{b,a} − ½ ξ^a φ_{ab,}{}^{b}`.
pub fn symmetry_to_aes(xi: &VectorField, g: &Metric, phi: &Form) -> Expr {
    let ch = g.chart();
    let phit = Tensor::from_form(phi);
    // ∇_a ξ^b stored as T^b_a, raised to T^{ba}
    let dxi = g.raise(&g.covariant_derivative(&Tensor::vector(xi)), 1);
    // φ_{ab} T^{ba}
    let first = phit.tensor(&dxi).contract(1, 2).contract(0, 1);
    // φ_{ab,}^{b}
    let div = g.raise(&g.covariant_derivative(&phit), 2).contract(1, 2);
    let second = Tensor::vector(xi).tensor(&div).contract(0, 1);
    ch.reduce(&(&first.get(&[]) - &(&q(1, 2) * &second.get(&[]))))
}

/// Results of the parallel-null-pair checks for two formal scales.
#[derive(Debug, Clone)]
pub struct PairReport {
    pub parallel: [bool; 2],
    pub null: [bool; 2],
    /// the Wronskian `σ₁σ₂' − σ₂σ₁'` is nonzero
    pub independent: bool,
    /// `Φ̃(ξ₁, ξ₂, ·) = 0`
    pub annihilates: bool,
}

impl PairReport {
    pub fn all(&self) -> bool {
        self.parallel.iter().all(|&b| b) && self.null.iter().all(|&b| b) && self.independent && self.annihilates
    }
}

/// Checks `ξ^{σ₁}, ξ^{σ₂}` for two formal solutions of the scale ODE;
/// `perturb` is added to `ξ^{σ₁}` before checking.
pub fn parallel_pair_check(model: &dyn AmbientModel, perturb: Option<&VectorField>) -> Result<PairReport, GeomError> {
    let names = ["sigma1", "sigma2"];
    let rules = model.sigma_rules(&names);
    let chart = model.frames().chart.with_rules(rules);
    let g = model.ambient_metric(&chart)?;
    let mut xis: Vec<VectorField> = names.iter().map(|s| model.xi(s)).collect();
    if let Some(p) = perturb {
        xis[0] = xis[0].add(p);
    }
    let parallel = [0, 1].map(|k| g.covariant_derivative(&Tensor::vector(&xis[k])).reduce(&chart).is_zero());
    let null = [0, 1].map(|k| chart.reduce(&g.inner(&xis[k].comps, &xis[k].comps)).is_zero());
    let arg = model.sigma_arg();
    let (s1, s2) = (Expr::func(names[0], arg, 0), Expr::func(names[1], arg, 0));
    let wr = &(&s1 * &Expr::func(names[1], arg, 1)) - &(&s2 * &Expr::func(names[0], arg, 1));
    let phi = model.phi3();
    let annihilates = phi.interior(&xis[0].comps).interior(&xis[1].comps).reduce(&chart).is_zero();
    Ok(PairReport { parallel, null, independent: !wr.is_zero(), annihilates })
}

/// Residual of the printed integral curve `γ(τ)` of `ξ^σ` on `{t = K/σ(x₀)}`:
/// `γ'(τ) − ξ^σ(γ(τ))`, in the coordinates `(z, ρ)`.
pub fn integral_curve_residual(model: &IModel) -> [Expr; 2] {
    let k = v("K");
    let s = Expr::func("sigma", "x", 0);
    let sp = Expr::func("sigma", "x", 1);
    let printed_z = -&(&(&s * &sp) / &(&Expr::int(3) * &k));
    let printed_rho = &s.pow_i(2) / &k;
    let xi = model.xi("sigma");
    let at = |e: &Expr| e.subs_var("t", &(&k / &s));
    let zi = model.frames.chart.index("z").expect("z");
    let ri = model.frames.chart.index("rho").expect("rho");
    [&printed_z - &at(&xi.comps[zi]), &printed_rho - &at(&xi.comps[ri])]
}

/// `Ric(σ^{-2} g)` on the base chart of the family.
pub fn einstein_residual(sigma: &Expr, g: &Metric) -> Result<Tensor, GeomError> {
    crate::riemann::einstein_scale_residual(sigma, g)
}

/// Splits `σ · r` into coefficients of `σ'', σ', σ` for a formal `σ(arg)`.
/// Returns `None` when `σ · r` is not linear in those atoms.
pub fn linear_ode_coefficients(r: &Expr, sigma: &str, arg: &str) -> Option<[Expr; 3]> {
    let s0 = Expr::func(sigma, arg, 0);
    let e = &s0 * r;
    let ids: Vec<u32> = (0..3).rev().map(|k| Expr::func(sigma, arg, k).atom_ids()[0]).collect();
    let mut out: [Expr; 3] = [Expr::zero(), Expr::zero(), Expr::zero()];
    let mut rest = e;
    for (slot, id) in ids.iter().enumerate() {
        let parts = rest.coefficients_in(*id)?;
        let mut next = Expr::zero();
        for (exp, c) in parts {
            if exp == Rational64::from_integer(0) {
                next = c;
            } else if exp == Rational64::from_integer(1) {
                out[slot] = c;
            } else {
                return None;
            }
        }
        rest = next;
    }
    rest.is_zero().then_some(out)
}

/// `Ψ[(q^m)'']` for a rational exponent `m`.
pub fn flat_exponent_psi(m: Rational64) -> Expr {
    let f = v("q").pow_rational(m).expect("power of a coordinate");
    psi_operator(&f.diff("q").diff("q"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2alg::h_identity;

    fn s(p: u32, e: (i64, i64)) -> Scalar {
        Scalar::prime_power(p, Rational64::new(e.0, e.1))
    }

    #[test]
    fn i_family_ricci_flat_and_curvature_scale() {
        let m = IModel::symbolic();
        let ch = &m.frames.chart;
        let g = m.ambient_metric(ch).unwrap();
        let r = g.riemann();
        assert!(g.ricci_from(&r).is_zero());
        let low = g.riemann_lowered();
        let exp = m.expected_curvature();
        assert!(!low.sub(&exp).is_zero());
        assert!(low.scale(&Expr::int(10)).sub(&exp).reduce(ch).is_zero());
        let g10 = Metric::from_tensor(ch, &m.ambient_scaled(&Expr::int(10))).unwrap();
        assert!(g10.ricci().is_zero());
        assert!(g10.riemann_lowered().sub(&exp).reduce(ch).is_zero());
    }

    #[test]
    fn i_family_three_form() {
        let m = IModel::symbolic();
        let ch = &m.frames.chart;
        let g = m.ambient_metric(ch).unwrap();
        let phi = m.phi3();
        assert!(g.covariant_derivative(&Tensor::from_form(&phi)).is_zero());
        assert!(!h_identity(&phi, g.matrix(), &|e| ch.reduce(e)).holds());
        let k = &s(2, (-1, 6)) * &s(3, (-1, 6));
        assert!(h_identity(&phi.scale(&Expr::scalar(k)), g.matrix(), &|e| ch.reduce(e)).holds());
    }

    #[test]
    fn f_family_three_form() {
        let m = FqModel::symbolic();
        let ch = &m.frames.chart;
        let g = m.ambient_metric(ch).unwrap();
        assert!(g.ricci().is_zero());
        assert!(g.riemann_lowered().sub(&m.expected_curvature()).reduce(ch).is_zero());
        let phi = m.phi3();
        assert!(g.covariant_derivative(&Tensor::from_form(&phi)).is_zero());
        assert!(!h_identity(&phi, g.matrix(), &|e| ch.reduce(e)).holds());
        let k = &s(2, (1, 6)) * &s(3, (-1, 6));
        assert!(h_identity(&phi.scale(&Expr::scalar(k)), g.matrix(), &|e| ch.reduce(e)).holds());
    }

    #[test]
    fn f_family_printed_cube_rejected() {
        let m = FqModel::symbolic();
        assert!(m.g(Omega3Term::Printed).is_err());
        assert!(m.g(Omega3Term::Squared).is_ok());
        assert!(FqModel::new(v("q")).is_err());
    }

    #[test]
    fn null_pairs() {
        assert!(parallel_pair_check(&IModel::symbolic(), None).unwrap().all());
        let f = FqModel::symbolic();
        assert!(parallel_pair_check(&f, None).unwrap().all());
        let n = f.frames.chart.dim();
        let mut c = vec![Expr::zero(); n];
        c[1] = Expr::one();
        let bad = parallel_pair_check(&f, Some(&VectorField::new(c))).unwrap();
        assert!(!bad.all());
    }

    #[test]
    fn printed_section_fails_resolved_section_holds() {
        let p = CartanSection::symbolic(SectionVariant::Printed);
        let zeros: Vec<bool> = p.residuals(Eta3Term::Printed).iter().map(|r| r.is_zero()).collect();
        assert_eq!(zeros, [false, true, false, false, true, true, false]);
        assert!(!p.solution_pullbacks()[0].is_zero());
        assert!(!p.kernel_is_plane_field().unwrap());
        let r = CartanSection::symbolic(SectionVariant::Resolved);
        assert!(r.residuals(Eta3Term::Eta4Eta5).iter().all(|x| x.is_zero()));
        let d3 = &r.residuals(Eta3Term::Printed)[2];
        assert_eq!(d3.in_frame, "(1)*eta4^eta5");
        assert!(r.solution_pullbacks().iter().all(|e| e.is_zero()));
        assert!(r.kernel_is_plane_field().unwrap());
    }

    #[test]
    fn einstein_scales() {
        let m = IModel::symbolic();
        let sg = Expr::func("sigma", "x", 0);
        let r = einstein_residual(&sg, &m.metric().unwrap()).unwrap();
        assert!(r.sub(&m.expected_einstein(&sg)).reduce(m.frames.base.chart()).is_zero());

        let f = FqModel::symbolic();
        let sq = Expr::func("sigma", "q", 0);
        let r = einstein_residual(&sq, &f.metric(Omega3Term::Squared).unwrap()).unwrap();
        let c = linear_ode_coefficients(&r.get(&[3, 3]), "sigma", "q").unwrap();
        let want = f.ode_triple();
        let ch = f.frames.base.chart();
        for k in 0..3 {
            assert!(ch.reduce(&(&(&c[k] * &want[0]) - &(&want[k] * &c[0]))).is_zero());
        }
        let mut other = r.clone();
        other.set(&[3, 3], Expr::zero());
        assert!(other.reduce(ch).is_zero());
    }

    #[test]
    fn scale_to_symmetry_constant() {
        let i = Expr::func("I", "x", 0);
        let sg = Expr::func("sigma", "x", 0);
        let rules = RuleSet::new().with("sigma", "x", 2, &(&q(1, 3) * &i) * &sg);
        let m = IModel::with_rules(i, rules).unwrap();
        let g = m.metric().unwrap();
        let xi = aes_to_symmetry(&sg, &g, &m.phi2());
        assert!(g.conformal_killing_residual(&xi).is_zero());
        // a conformal symmetry that does not preserve D
        assert!(!m.frames.base.is_symmetry(&xi));
        let k = Expr::scalar(-&(&Scalar::from_int(9) * &c_i()));
        let want = m.expected_symmetry("sigma").scale(&k);
        assert!(xi.sub(&want).map(|e| m.frames.base.chart().reduce(e)).is_zero());
        let back = symmetry_to_aes(&xi, &g, &m.phi2());
        let c = Expr::scalar(&(&s(2, (1, 3)) * &s(3, (1, 3))) * &Scalar::from_frac(1, 3));
        assert!(m.frames.base.chart().reduce(&(&back - &(&c * &sg))).is_zero());
    }

    #[test]
    fn symmetry_lists() {
        let f = FqModel::symbolic();
        assert!(f.symmetries().iter().all(|x| f.frames.base.is_symmetry(x)));
        for r in [-1, 2] {
            let p = PlaneField::from_monge(&jet_chart(), strazzullo_f(r)).unwrap();
            assert!(strazzullo_symmetries().iter().all(|x| p.is_symmetry(x)));
        }
    }

    #[test]
    fn flat_exponents() {
        for (a, b) in [(-1, 1), (1, 3), (2, 3), (2, 1)] {
            assert!(flat_exponent_psi(Rational64::new(a, b)).is_zero());
        }
        assert!(!flat_exponent_psi(Rational64::from_integer(5)).is_zero());
    }

    #[test]
    fn integral_curve() {
        let [z, rho] = integral_curve_residual(&IModel::symbolic());
        assert!(rho.is_zero());
        let want = &(&Expr::func("sigma", "x", 0) * &Expr::func("sigma", "x", 1)) / &(&Expr::int(3) * &v("K"));
        assert!((&z - &want).is_zero());
    }
}
