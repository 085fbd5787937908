use ambient_core::expr::{Expr, Scalar};
use ambient_core::forms::{Chart, Form};
use ambient_core::g2alg::{g2_basis, stabilizer, Octonions, DIM};
use ambient_core::holonomy::LieAlgebra;
use ambient_core::linalg::Matrix;
use ambient_core::models::{AmbientModel, FqModel, IModel};
use ambient_core::planefield::{root_type, RootType};
use ambient_core::riemann::Metric;
use ambient_core::tensor::Tensor;
use proptest::prelude::*;

fn chart3() -> Chart {
    Chart::new(&["x", "y", "z"])
}

/// Small polynomials in `x, y, z`.
fn poly() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..4, 0i64..3, 0i64..3, 0i64..2), 1..4).prop_map(|terms| {
        terms.into_iter().fold(Expr::zero(), |acc, (c, a, b, d)| {
            &acc + &(&(&(&Expr::int(c) * &Expr::var("x").pow_i(a)) * &Expr::var("y").pow_i(b)) * &Expr::var("z").pow_i(d))
        })
    })
}

fn one_form() -> impl Strategy<Value = Form> {
    prop::collection::vec(poly(), 3).prop_map(Form::one_form)
}

/// `diag(1 + a x², 1 + b y², 1 + c x y) + e (dx dz + dz dx)`, nondegenerate near 0.
fn metric3() -> impl Strategy<Value = Metric> {
    (-2i64..3, -2i64..3, -2i64..3, -1i64..2).prop_map(|(a, b, c, e)| {
        let (x, y) = (Expr::var("x"), Expr::var("y"));
        let one = Expr::one();
        let z = Expr::zero();
        let g = vec![
            vec![&one + &(&Expr::int(a) * &x.pow_i(2)), z.clone(), Expr::rational(e, 2)],
            vec![z.clone(), &one + &(&Expr::int(b) * &y.pow_i(2)), z.clone()],
            vec![Expr::rational(e, 2), z.clone(), &one + &(&(&Expr::int(c) * &x) * &y)],
        ];
        Metric::new(&chart3(), g).expect("nondegenerate")
    })
}

fn curvature_identities(g: &Metric) -> bool {
    let r = g.riemann_lowered();
    let n = g.dim();
    let ch = g.chart();
    let zero = |e: Expr| ch.reduce(&e).is_zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = r.get(&[a, b, c, d]);
                    if !zero(&v + &r.get(&[b, a, c, d])) || !zero(&v + &r.get(&[a, b, d, c])) || !zero(&v - &r.get(&[c, d, a, b])) {
                        return false;
                    }
                    let bianchi = &(&v + &r.get(&[a, c, d, b])) + &r.get(&[a, d, b, c]);
                    if !zero(bianchi) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn i_poly() -> impl Strategy<Value = Expr> {
    (-2i64..3, -2i64..3, -1i64..2).prop_map(|(a, b, c)| {
        let x = Expr::var("x");
        &(&Expr::int(a) + &(&Expr::int(b) * &x)) + &(&Expr::int(c) * &x.pow_i(2))
    })
}

/// Coefficients of `Π (α_i u + β_i v)`, indexed by the power of `u`.
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

/// Multiplicities of projectively distinct factors.
fn partition(factors: &[(i64, i64)]) -> Vec<u32> {
    let mut groups: Vec<((i64, i64), u32)> = Vec::new();
    for &f in factors {
        match groups.iter_mut().find(|(g, _)| g.0 * f.1 - g.1 * f.0 == 0) {
            Some((_, m)) => *m += 1,
            None => groups.push((f, 1)),
        }
    }
    groups.into_iter().map(|(_, m)| m).collect()
}

fn factor() -> impl Strategy<Value = (i64, i64)> {
    (-3i64..4, -3i64..4).prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0)
}

fn random_null() -> impl Strategy<Value = Vec<Scalar>> {
    (1i64..4, prop::array::uniform5(-3i64..4)).prop_map(|(x1, r)| {
        Octonions::null_vector([x1, r[0], r[1], r[2], r[3], r[4]].map(Scalar::from_int))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_squared_is_zero(a in one_form(), b in one_form()) {
        let ch = chart3();
        prop_assert!(a.d(&ch).d(&ch).is_zero());
        let w = a.wedge(&b);
        prop_assert!(w.d(&ch).d(&ch).is_zero());
        // Leibniz
        let lhs = w.d(&ch);
        let rhs = a.d(&ch).wedge(&b).sub(&a.wedge(&b.d(&ch)));
        prop_assert!(lhs.sub(&rhs).reduce(&ch).is_zero());
    }

    #[test]
    fn metric_is_parallel_and_curvature_symmetric(g in metric3()) {
        prop_assert!(g.covariant_derivative(&g.tensor()).reduce(g.chart()).is_zero());
        prop_assert!(curvature_identities(&g));
    }

    #[test]
    fn jacobi_on_generated_subalgebras(picks in prop::collection::vec((0usize..14, -2i64..3), 1..4)) {
        let basis = g2_basis();
        let gens: Vec<Matrix> = picks.iter().map(|(i, c)| basis[*i].scale(&Scalar::from_int(*c))).collect();
        let alg = LieAlgebra::generated_by(DIM, &gens);
        prop_assert!(alg.is_closed());
        prop_assert!(alg.jacobi_holds());
        prop_assert!(alg.dim() <= 14);
    }

    #[test]
    fn root_type_is_substitution_invariant(
        fs in prop::array::uniform4(factor()),
        m in prop::array::uniform4(-2i64..3),
        lead in 1i64..4,
    ) {
        prop_assume!(m[0] * m[3] - m[1] * m[2] != 0);
        let want = RootType::from_partition(&partition(&fs)).expect("partition of 4");
        let mut a = expand(&fs);
        a.iter_mut().for_each(|c| *c = &*c * &Scalar::from_int(lead));
        prop_assert_eq!(root_type(&a), want);
        // (u, v) -> (m0 u + m1 v, m2 u + m3 v)
        let moved: Vec<(i64, i64)> = fs.iter().map(|(al, be)| (al * m[0] + be * m[2], al * m[1] + be * m[3])).collect();
        prop_assert_eq!(root_type(&expand(&moved)), want);
    }

    #[test]
    fn null_vector_stabilizers(x in random_null(), y in random_null()) {
        let o = Octonions::new();
        prop_assert!(o.is_null(&x));
        prop_assert_eq!(stabilizer(&x, &o.g2).len(), 8);
        prop_assert_eq!(o.null_flag(&x), Some([1, 3, 4, 6]));
        let c = o.classify_pair(&x, &y).expect("null pair");
        prop_assert!(c.consistent(), "{} {}", c.case, c.fingerprint);
        prop_assert_eq!(c.stabilizer_dim, match c.case {
            ambient_core::g2alg::PairCase::K => 8,
            ambient_core::g2alg::PairCase::H5 => 5,
            _ => 3,
        });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn catalog_i_family(i in i_poly()) {
        let m = IModel::new(i).unwrap();
        let g = m.ambient_metric(&m.frames.chart).unwrap();
        prop_assert!(g.covariant_derivative(&g.tensor()).is_zero());
        prop_assert!(g.ricci().is_zero());
        prop_assert!(curvature_identities(&g));
        prop_assert!(g.covariant_derivative(&Tensor::from_form(&m.phi3())).is_zero());
        for a in m.frames.ambient.forms() {
            prop_assert!(a.d(&m.frames.chart).d(&m.frames.chart).is_zero());
        }
    }

    #[test]
    fn catalog_fq_family(k in 3i64..6, c in 1i64..3) {
        let q = Expr::var("q");
        let m = FqModel::new(&Expr::int(c) * &q.pow_i(k)).unwrap();
        let g = m.ambient_metric(&m.frames.chart).unwrap();
        prop_assert!(g.covariant_derivative(&g.tensor()).is_zero());
        prop_assert!(g.ricci().is_zero());
        prop_assert!(curvature_identities(&g));
    }
}
