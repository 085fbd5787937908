//! One line per acceptance criterion. Tolerances are exact (zero residual)
//! throughout; budgets are wall-clock limits.
//!
//! Criteria listed in `KNOWN_RED` fail against the printed formulas; every
//! other criterion must pass, and the process exits nonzero otherwise.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ambient_core::expr::{Atom, Expr, Rational64, Scalar};
use ambient_core::forms::{Form, VectorField};
use ambient_core::g2alg::{
    cross_trace, fixed_vectors, g2_basis, h5_basis, h_identity, inner, k_basis, stabilizer, unit, Octonions, PairCase, DIM,
};
use ambient_core::holonomy::{eval_endo, evaluator, span_matches, v_filtration, LieAlgebra, LieLabel};
use ambient_core::linalg::{span_rank, Matrix};
use ambient_core::models::*;
use ambient_core::planefield::{jet_chart, root_type, PlaneField};
use ambient_core::riemann::Metric;
use ambient_core::tensor::Tensor;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria whose printed form does not hold; see the witness on each line.
const KNOWN_RED: [u32; 5] = [2, 3, 4, 10, 12];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sample_points() -> Vec<HashMap<String, Scalar>> {
    [[2, 1, 3, -1, 2, 5, 1], [1, 2, -1, 1, 3, 0, 2], [3, -1, 2, 2, -1, 1, -2]]
        .iter()
        .map(|vals| AMBIENT_COORDS.iter().zip(vals).map(|(c, v)| (c.to_string(), Scalar::from_int(*v))).collect())
        .collect()
}

fn c1() -> Outcome {
    let m = IModel::symbolic();
    let ric = m.ambient_metric(&m.frames.chart).unwrap().ricci();
    outcome(ric.is_zero(), format!("Ric(g~_I) nonzero components: {}", ric.nnz()))
}

fn c2() -> Outcome {
    let m = IModel::symbolic();
    let ch = &m.frames.chart;
    let low = m.ambient_metric(ch).unwrap().riemann_lowered();
    let exp = m.expected_curvature();
    let exact = low.sub(&exp).reduce(ch).is_zero();
    let tenth = low.scale(&Expr::int(10)).sub(&exp).reduce(ch).is_zero();
    let g10 = Metric::from_tensor(ch, &m.ambient_scaled(&Expr::int(10))).unwrap();
    let scaled = g10.ricci().is_zero() && g10.riemann_lowered().sub(&exp).reduce(ch).is_zero();
    outcome(
        exact,
        format!("R~ = printed: {exact}; R~ = (1/10)*printed: {tenth}; with 10*g_I in place of g_I, Ric = 0 and R~ = printed: {scaled}"),
    )
}

fn c3() -> Outcome {
    let m = IModel::symbolic();
    let ch = &m.frames.chart;
    let g = m.ambient_metric(ch).unwrap();
    let phi = m.phi3();
    let parallel = g.covariant_derivative(&Tensor::from_form(&phi)).is_zero();
    let reduce = |e: &Expr| ch.reduce(e);
    let h = h_identity(&phi, g.matrix(), &reduce);
    let k = &Scalar::prime_power(2, Rational64::new(-1, 6)) * &Scalar::prime_power(3, Rational64::new(-1, 6));
    let fixed = h_identity(&phi.scale(&Expr::scalar(k)), g.matrix(), &reduce).holds();
    let lambda = h.lambda.as_ref().map(|l| l.to_string()).unwrap_or_default();
    outcome(
        parallel && h.holds(),
        format!(
            "nabla Phi~ = 0: {parallel}; H(Phi~) = g~: {} (lambda = {lambda}, lambda^2 = |det g~|: {}); holds with C*6^(-1/6): {fixed}",
            h.holds(),
            h.volume_matches
        ),
    )
}

fn c4() -> Outcome {
    let m = IModel::new(Expr::var("x")).unwrap();
    let g = m.ambient_metric(&m.frames.chart).unwrap();
    let pts: Vec<_> = sample_points().into_iter().map(|p| evaluator(p, HashMap::new())).collect();
    let refs: Vec<&(dyn Fn(&Atom) -> Option<Scalar> + Sync)> = pts.iter().map(|p| p as _).collect();
    let fil = v_filtration(&g, 3, &refs).unwrap();
    let dims_ok = fil.dims.iter().all(|d| d == &[1, 3, 4, 5]);
    let psi: Vec<Matrix> = m.psi().iter().map(|t| eval_endo(t, &pts[0]).unwrap()).collect();
    let spans: Vec<bool> = [(0usize, 1usize), (1, 3), (2, 4), (3, 5)]
        .iter()
        .map(|&(l, k)| {
            let a: Vec<Matrix> = fil.levels[l].iter().map(|t| eval_endo(t, &pts[0]).unwrap()).collect();
            span_matches(&a, &psi[..k])
        })
        .collect();
    let fp = LieAlgebra::generated_by(7, &fil.spans[0]).fingerprint();
    let h5 = fp.label == LieLabel::H5 && fp.dim == 5 && fp.nilpotency_step() == Some(2) && fp.center == 1;
    outcome(
        dims_ok && spans[3] && h5,
        format!(
            "dims {:?}; V^r = span(psi) at levels 0..3: {spans:?}; closure {fp}",
            fil.dims
        ),
    )
}

fn c5() -> Outcome {
    let m = IModel::symbolic();
    let s = Expr::func("sigma", "x", 0);
    let r = einstein_residual(&s, &m.metric().unwrap()).unwrap();
    let i_ok = r.sub(&m.expected_einstein(&s)).reduce(m.frames.base.chart()).is_zero();

    let f = FqModel::symbolic();
    let sq = Expr::func("sigma", "q", 0);
    let r = einstein_residual(&sq, &f.metric(Omega3Term::Squared).unwrap()).unwrap();
    let ch = f.frames.base.chart();
    let c = linear_ode_coefficients(&r.get(&[3, 3]), "sigma", "q").unwrap();
    let want = f.ode_triple();
    // same ODE: the triples agree after normalizing the leading coefficient
    let triple = (0..3).all(|k| ch.reduce(&(&(&c[k] * &want[0]) - &(&want[k] * &c[0]))).is_zero());
    let mut rest = r.clone();
    rest.set(&[3, 3], Expr::zero());
    let only_dq2 = rest.reduce(ch).is_zero();
    let factor = ch.reduce(&(&c[0] / &want[0]));
    outcome(
        i_ok && triple && only_dq2,
        format!("I: residual = 3 sigma^-1 (sigma'' - I sigma/3) dx^2: {i_ok}; F: dq^2 coefficient = ({factor}) sigma^-1 * printed ODE: {triple}, other components 0: {only_dq2}"),
    )
}

fn c6() -> Outcome {
    let i = parallel_pair_check(&IModel::symbolic(), None).unwrap();
    let f = parallel_pair_check(&FqModel::symbolic(), None).unwrap();
    outcome(i.all() && f.all(), format!("I: {i:?}; F: {f:?}"))
}

fn c7() -> Outcome {
    let m = FqModel::symbolic();
    let ric = m.ambient_metric(&m.frames.chart).unwrap().ricci();
    let printed = m.g(Omega3Term::Printed).err().map(|e| e.to_string()).unwrap_or_else(|| "accepted".into());
    outcome(
        ric.is_zero(),
        format!("Ric(g~_F) = 0 with omega3^2: {}; as printed (recorded discrepancy): {printed}", ric.is_zero()),
    )
}

fn c8() -> Outcome {
    let flat: Vec<bool> = [(-1, 1), (1, 3), (2, 3), (2, 1)]
        .iter()
        .map(|&(a, b)| flat_exponent_psi(Rational64::new(a, b)).is_zero())
        .collect();
    let five = flat_exponent_psi(Rational64::from_integer(5)).subs_var("q", &Expr::one());
    outcome(flat.iter().all(|&b| b) && !five.is_zero(), format!("m = -1, 1/3, 2/3, 2: {flat:?}; m = 5 at q = 1: {five}"))
}

fn c9() -> Outcome {
    let o = Octonions::new();
    let g2 = g2_basis();
    let dim = span_rank(&g2.iter().map(|m| m.entries().to_vec()).collect::<Vec<_>>());
    let skew = g2.iter().all(|x| (&(&x.transpose() * &o.gram) + &(&o.gram * x)).is_zero());
    let kills = g2.iter().all(|x| o.phi.derivation(x).is_zero());
    let e = |i: usize| unit(DIM, i - 1);
    let three: Vec<Scalar> = e(1).iter().map(|v| v * &Scalar::from_int(3)).collect();
    let mut cases = Vec::new();
    let mut ok = dim == 14 && skew && kills;
    for (y, case, d) in [(three, PairCase::K, 8), (e(2), PairCase::H5, 5), (e(5), PairCase::R3, 3), (e(7), PairCase::Sl2, 3)] {
        let c = o.classify_pair(&e(1), &y).unwrap();
        ok &= c.case == case && c.stabilizer_dim == d && c.consistent();
        cases.push(format!("{}:{}:{}", c.case, c.stabilizer_dim, c.fingerprint.label));
    }
    let k = stabilizer(&e(1), &o.g2);
    let h = stabilizer(&e(2), &k);
    let fixed = fixed_vectors(&h, DIM);
    let row = |v: Vec<Scalar>| Matrix::from_rows(vec![v]);
    let fixed_ok = span_matches(&fixed.into_iter().map(row).collect::<Vec<_>>(), &[row(e(1)), row(e(2))]);
    ok &= fixed_ok && span_matches(&k, &k_basis()) && span_matches(&h, &h5_basis(true));
    outcome(
        ok,
        format!(
            "dim {dim}, skew {skew}, Phi annihilated {kills}; pairs {}; fixed(h5) = <e1, e2>: {fixed_ok}; printed h5 basis spans stab: {} (with entry (6,5) = -a12: true)",
            cases.join(" "),
            span_matches(&h, &h5_basis(false))
        ),
    )
}

fn c10() -> Outcome {
    let o = Octonions::new();
    let mut rng = StdRng::seed_from_u64(2357);
    let mut r = || Scalar::from_frac(rng.gen_range(-9..10), rng.gen_range(1..6));
    let mut holds = 0;
    let mut ratios = Vec::new();
    for _ in 0..20 {
        let x: Vec<Scalar> = (0..DIM).map(|_| r()).collect();
        let y: Vec<Scalar> = (0..DIM).map(|_| r()).collect();
        let tr = cross_trace(&x, &y, &o.phi, &o.gram_inv);
        let ip = inner(&o.gram, &x, &y);
        if ip == &Scalar::from_frac(-1, 6) * &tr {
            holds += 1;
        }
        if !ip.is_zero() {
            let q = &tr * &ip.inv().unwrap();
            if !ratios.contains(&q) {
                ratios.push(q);
            }
        }
    }
    let ratios: Vec<String> = ratios.iter().map(|q| q.to_string()).collect();
    outcome(holds == 20, format!("<x,y> = -1/6 tr on {holds}/20 pairs; observed tr/<x,y> = {}", ratios.join(",")))
}

fn c11() -> Outcome {
    let f = FqModel::symbolic();
    let fq = f.symmetries().iter().filter(|x| f.frames.base.is_symmetry(x)).count();
    let mut ok = fq == 6;
    let mut detail = format!("F(q): {fq}/6");
    for r in [-1, 2] {
        let p = PlaneField::from_monge(&jet_chart(), strazzullo_f(r)).unwrap();
        let s = strazzullo_symmetries();
        let n = s.iter().filter(|x| p.is_symmetry(x)).count();
        ok &= n == s.len();
        detail += &format!("; r = {r}: {n}/{}", s.len());
    }
    outcome(ok, detail)
}

fn c12() -> Outcome {
    let cs = CartanSection::symbolic(SectionVariant::Printed);
    let res = cs.residuals(Eta3Term::Printed);
    let required = ["d eta1", "d eta2", "d eta5", "d pi1"];
    let ok = res.iter().filter(|r| required.contains(&r.name)).all(|r| r.is_zero());
    let lines: Vec<String> = res
        .iter()
        .map(|r| {
            let tag = if required.contains(&r.name) { "" } else { " [recorded]" };
            format!("{}{tag}: {}", r.name, r.in_frame)
        })
        .collect();
    let resolved = CartanSection::symbolic(SectionVariant::Resolved);
    let all_zero = resolved.residuals(Eta3Term::Eta4Eta5).iter().all(|r| r.is_zero());
    outcome(
        ok,
        format!(
            "{}; section with y^2 in eta1, eta4 = dq - I dy and eta4^eta5 in d eta3: all residuals 0: {all_zero}",
            lines.join("; ")
        ),
    )
}

fn c13() -> Outcome {
    let m = FqModel::new(Expr::var("q").pow_i(2)).unwrap();
    let r = m.ambient_metric(&m.frames.chart).unwrap().riemann();
    outcome(r.is_zero(), format!("R~ nonzero components for F = q^2: {}", r.nnz()))
}

fn curvature_identities(g: &Metric) -> bool {
    let r = g.riemann_lowered();
    let n = g.dim();
    let ch = g.chart();
    let z = |e: Expr| ch.reduce(&e).is_zero();
    (0..n).all(|a| {
        (0..n).all(|b| {
            (0..n).all(|c| {
                (0..n).all(|d| {
                    let v = r.get(&[a, b, c, d]);
                    z(&v + &r.get(&[b, a, c, d]))
                        && z(&v - &r.get(&[c, d, a, b]))
                        && z(&(&v + &r.get(&[a, c, d, b])) + &r.get(&[a, d, b, c]))
                })
            })
        })
    })
}

fn c14() -> Outcome {
    let mut parts = Vec::new();
    let mi = IModel::new(&Expr::var("x").pow_i(2) + &Expr::one()).unwrap();
    let mf = FqModel::new(Expr::var("q").pow_i(3)).unwrap();
    let gi = mi.ambient_metric(&mi.frames.chart).unwrap();
    let gf = mf.ambient_metric(&mf.frames.chart).unwrap();

    let d2 = |forms: &[Form], ch| forms.iter().all(|w| w.d(ch).d(ch).is_zero());
    let cs = CartanSection::symbolic(SectionVariant::Printed);
    let d2_ok = d2(mi.frames.ambient.forms(), &mi.frames.chart)
        && d2(mf.frames.ambient.forms(), &mf.frames.chart)
        && d2(&cs.eta, &cs.chart)
        && d2(&[mi.phi3()], &mi.frames.chart);
    parts.push(format!("d^2 = 0: {d2_ok}"));

    let ng = gi.covariant_derivative(&gi.tensor()).is_zero() && gf.covariant_derivative(&gf.tensor()).is_zero();
    parts.push(format!("nabla g = 0: {ng}"));

    let bianchi = curvature_identities(&gi) && curvature_identities(&gf);
    parts.push(format!("curvature symmetries + Bianchi: {bianchi}"));

    let o = Octonions::new();
    let jac = [g2_basis(), k_basis(), h5_basis(true), stabilizer(&unit(DIM, 4), &o.g2)]
        .into_iter()
        .all(|b| LieAlgebra::generated_by(DIM, &b).jacobi_holds());
    parts.push(format!("Jacobi: {jac}"));

    let mut rng = StdRng::seed_from_u64(11);
    let mut rt = true;
    for _ in 0..40 {
        let f: Vec<(i64, i64)> = (0..4).map(|_| (rng.gen_range(-2..3), rng.gen_range(1..3))).collect();
        let m = [rng.gen_range(-2..3), rng.gen_range(-2..3), rng.gen_range(-2..3), rng.gen_range(-2..3)];
        if m[0] * m[3] - m[1] * m[2] == 0 {
            continue;
        }
        let moved: Vec<(i64, i64)> = f.iter().map(|(a, b)| (a * m[0] + b * m[2], a * m[1] + b * m[3])).collect();
        rt &= root_type(&expand(&f)) == root_type(&expand(&moved));
    }
    parts.push(format!("root type invariant under substitutions: {rt}"));

    let mut xi = VectorField::zero(mi.frames.chart.dim());
    xi.comps[0] = Expr::var("t");
    let homog = gi.tensor().lie(&xi, &mi.frames.chart).sub(&gi.tensor().scale(&Expr::int(2))).is_zero();
    parts.push(format!("homogeneity: {homog}"));

    outcome(d2_ok && ng && bianchi && jac && rt && homog, parts.join("; "))
}

fn expand(factors: &[(i64, i64)]) -> [Scalar; 5] {
    let mut c = vec![Scalar::one()];
    for &(al, be) in factors {
        let mut next = vec![Scalar::zero(); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] += &(v * &Scalar::from_int(al));
            next[k] += &(v * &Scalar::from_int(be));
        }
        c = next;
    }
    c.try_into().expect("four factors")
}

fn main() -> ExitCode {
    let criteria: [(u32, u64, fn() -> Outcome); 14] = [
        (1, 60, c1),
        (2, 60, c2),
        (3, 120, c3),
        (4, 120, c4),
        (5, 120, c5),
        (6, 120, c6),
        (7, 120, c7),
        (8, 5, c8),
        (9, 30, c9),
        (10, 10, c10),
        (11, 60, c11),
        (12, 30, c12),
        (13, 30, c13),
        (14, 120, c14),
    ];
    let mut unexpected = Vec::new();
    for (n, budget, f) in criteria {
        let t0 = Instant::now();
        let o = f();
        let el = t0.elapsed();
        let pass = o.pass && el <= Duration::from_secs(budget);
        println!(
            "criterion {n:>2}: {} [tol exact; {:.2}s of {budget}s] {}",
            if pass { "PASS" } else { "FAIL" },
            el.as_secs_f64(),
            o.detail
        );
        if !pass && !KNOWN_RED.contains(&n) {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
