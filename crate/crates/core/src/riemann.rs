//! Levi-Civita connection, curvature and the metric-level checks built on them.
//!
//! Conventions: `Γ^a_bc = ½ g^{ad}(∂_b g_dc + ∂_c g_db − ∂_d g_bc)`,
//! `R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} − Γ^a_{de} Γ^e_{cb}`,
//! so that `R(∂_c, ∂_d)∂_b = R^a_{bcd} ∂_a`, and `Ric_{bd} = R^a_{bad}`.

use std::collections::HashMap;

use ambient_expr::{Expr, Rational64};
use rayon::prelude::*;

use crate::forms::{Chart, GeomError, VectorField};
use crate::linalg::{expr_inverse, ExprMatrix};
use crate::tensor::{Index, Slot, Tensor};

#[derive(Debug, Clone)]
pub struct Metric {
    chart: Chart,
    g: ExprMatrix,
    inv: ExprMatrix,
    det: Expr,
    /// `gamma[a][b][c] = Γ^a_bc`
    gamma: Vec<Vec<Vec<Expr>>>,
}

impl Metric {
    pub fn new(chart: &Chart, g: ExprMatrix) -> Result<Self, GeomError> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(GeomError::Dimension { expected: n, got: g.len() });
        }
        for i in 0..n {
            for j in 0..i {
                if !g[i][j].equals(&g[j][i]) {
                    return Err(GeomError::Other("metric matrix is not symmetric".into()));
                }
            }
        }
        let (inv, det) = expr_inverse(&g).ok_or(GeomError::Singular("metric"))?;
        if det.is_zero() {
            return Err(GeomError::Singular("metric"));
        }
        // ∂_k g_ij
        let dg: Vec<Vec<Vec<Expr>>> = (0..n)
            .into_par_iter()
            .map(|k| g.iter().map(|row| row.iter().map(|e| chart.diff(e, k)).collect()).collect())
            .collect();
        let half = Expr::rational(1, 2);
        let gamma: Vec<Vec<Vec<Expr>>> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut out = vec![vec![Expr::zero(); n]; n];
                for b in 0..n {
                    for c in b..n {
                        let mut s = Expr::zero();
                        for d in 0..n {
                            if inv[a][d].is_zero() {
                                continue;
                            }
                            let t = &(&dg[b][d][c] + &dg[c][d][b]) - &dg[d][b][c];
                            if !t.is_zero() {
                                s = &s + &(&inv[a][d] * &t);
                            }
                        }
                        let v = chart.reduce(&(&s * &half));
                        out[b][c] = v.clone();
                        out[c][b] = v;
                    }
                }
                out
            })
            .collect();
        Ok(Metric { chart: chart.clone(), g, inv, det, gamma })
    }

    /// Metric from a symmetric covariant tensor.
    pub fn from_tensor(chart: &Chart, t: &Tensor) -> Result<Self, GeomError> {
        Metric::new(chart, t.matrix())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.g
    }

    pub fn inverse(&self) -> &ExprMatrix {
        &self.inv
    }

    pub fn det(&self) -> &Expr {
        &self.det
    }

    pub fn tensor(&self) -> Tensor {
        Tensor::from_matrix(&self.g)
    }

    pub fn christoffel(&self, a: usize, b: usize, c: usize) -> &Expr {
        &self.gamma[a][b][c]
    }

    /// `g(X, Y)`.
    pub fn inner(&self, x: &[Expr], y: &[Expr]) -> Expr {
        let mut s = Expr::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() && !self.g[i][j].is_zero() {
                    s = &s + &(&(xi * yj) * &self.g[i][j]);
                }
            }
        }
        self.chart.reduce(&s)
    }

    /// `R^a_{bcd}`.
    pub fn riemann(&self) -> Tensor {
        let n = self.dim();
        let ch = &self.chart;
        let gm = &self.gamma;
        let rows: Vec<Vec<(Index, Expr)>> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut out = Vec::new();
                for b in 0..n {
                    for c in 0..n {
                        for d in c + 1..n {
                            let mut s = &ch.diff(&gm[a][d][b], c) - &ch.diff(&gm[a][c][b], d);
                            for e in 0..n {
                                if !gm[a][c][e].is_zero() && !gm[e][d][b].is_zero() {
                                    s = &s + &(&gm[a][c][e] * &gm[e][d][b]);
                                }
                                if !gm[a][d][e].is_zero() && !gm[e][c][b].is_zero() {
                                    s = &s - &(&gm[a][d][e] * &gm[e][c][b]);
                                }
                            }
                            let s = ch.reduce(&s);
                            if !s.is_zero() {
                                out.push((Index::from_slice(&[a as u8, b as u8, c as u8, d as u8]), s.clone()));
                                out.push((Index::from_slice(&[a as u8, b as u8, d as u8, c as u8]), -s));
                            }
                        }
                    }
                }
                out
            })
            .collect();
        let mut t = Tensor::zero(n, &[Slot::Up, Slot::Down, Slot::Down, Slot::Down]);
        for (k, e) in rows.into_iter().flatten() {
            let idx: Vec<usize> = k.iter().map(|&x| x as usize).collect();
            t.set(&idx, e);
        }
        t
    }

    /// `R_{abcd} = g_{ae} R^e_{bcd}`.
    pub fn riemann_lowered(&self) -> Tensor {
        self.lower(&self.riemann(), 0)
    }

    /// `Ric_{bd} = R^a_{bad}`.
    pub fn ricci(&self) -> Tensor {
        self.ricci_from(&self.riemann())
    }

    pub fn ricci_from(&self, riem: &Tensor) -> Tensor {
        riem.contract(0, 2).map(|e| self.chart.reduce(e))
    }

    pub fn scalar_curvature(&self, ric: &Tensor) -> Expr {
        let mut s = Expr::zero();
        for (k, e) in ric.comps() {
            let (i, j) = (k[0] as usize, k[1] as usize);
            if !self.inv[i][j].is_zero() {
                s = &s + &(&self.inv[i][j] * e);
            }
        }
        self.chart.reduce(&s)
    }

    /// Lowers upper slot `s` with the metric (the slot keeps its position).
    pub fn lower(&self, t: &Tensor, s: usize) -> Tensor {
        self.move_index(t, s, &self.g, Slot::Down)
    }

    /// Raises lower slot `s` with the inverse metric.
    pub fn raise(&self, t: &Tensor, s: usize) -> Tensor {
        self.move_index(t, s, &self.inv, Slot::Up)
    }

    fn move_index(&self, t: &Tensor, s: usize, m: &ExprMatrix, to: Slot) -> Tensor {
        assert_ne!(t.slots()[s], to, "slot already in the requested position");
        let mut slots = t.slots().to_vec();
        slots[s] = to;
        let mut acc: HashMap<Index, Expr> = HashMap::new();
        for (k, e) in t.comps() {
            let old = k[s] as usize;
            for (new, row) in m.iter().enumerate() {
                let c = &row[old];
                if c.is_zero() {
                    continue;
                }
                let mut nk = k.clone();
                nk[s] = new as u8;
                let v = e * c;
                let slot = acc.entry(nk).or_insert_with(Expr::zero);
                *slot = &*slot + &v;
            }
        }
        let mut out = Tensor::zero(self.dim(), &slots);
        let mut entries: Vec<_> = acc.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for (k, e) in entries {
            let idx: Vec<usize> = k.iter().map(|&x| x as usize).collect();
            out.set(&idx, self.chart.reduce(&e));
        }
        out
    }

    /// `∇T`, with the derivative index appended as the last lower slot.
    pub fn covariant_derivative(&self, t: &Tensor) -> Tensor {
        let n = self.dim();
        let ch = &self.chart;
        let gm = &self.gamma;
        let mut slots = t.slots().to_vec();
        slots.push(Slot::Down);
        let entries: Vec<(&Index, &Expr)> = t.comps().collect();
        let parts: Vec<Vec<(Index, Expr)>> = entries
            .par_iter()
            .map(|(k, e)| {
                let mut out = Vec::new();
                for j in 0..n {
                    let d = ch.diff(e, j);
                    if !d.is_zero() {
                        let mut nk = (*k).clone();
                        nk.push(j as u8);
                        out.push((nk, d));
                    }
                }
                for (s, slot) in t.slots().iter().enumerate() {
                    let m = k[s] as usize;
                    for j in 0..n {
                        for x in 0..n {
                            let (c, sign) = match slot {
                                // + Γ^x_{j m} T^{..m..}
                                Slot::Up => (&gm[x][j][m], false),
                                // − Γ^m_{j x} T_{..m..}
                                Slot::Down => (&gm[m][j][x], true),
                            };
                            if c.is_zero() {
                                continue;
                            }
                            let mut nk = (*k).clone();
                            nk[s] = x as u8;
                            nk.push(j as u8);
                            let v = c * *e;
                            out.push((nk, if sign { -v } else { v }));
                        }
                    }
                }
                out
            })
            .collect();
        let mut acc: HashMap<Index, Expr> = HashMap::new();
        for (k, e) in parts.into_iter().flatten() {
            let slot = acc.entry(k).or_insert_with(Expr::zero);
            *slot = &*slot + &e;
        }
        let mut entries: Vec<_> = acc.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let reduced: Vec<(Index, Expr)> = entries.into_par_iter().map(|(k, e)| (k, ch.reduce(&e))).collect();
        let mut out = Tensor::zero(n, &slots);
        for (k, e) in reduced {
            let idx: Vec<usize> = k.iter().map(|&x| x as usize).collect();
            out.set(&idx, e);
        }
        out
    }

    /// `∇_X Y`.
    pub fn nabla(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let dy = self.covariant_derivative(&Tensor::vector(y));
        let r = dy.insert(1, &x.comps);
        VectorField::new((0..self.dim()).map(|i| r.get(&[i])).collect())
    }

    /// Trace-free part of `L_ξ g`.
    pub fn conformal_killing_residual(&self, xi: &VectorField) -> Tensor {
        let lg = self.tensor().lie(xi, &self.chart);
        let tr = self.scalar_curvature(&lg);
        let n = Expr::int(self.dim() as i64);
        lg.sub(&self.tensor().scale(&(&tr / &n))).map(|e| self.chart.reduce(e))
    }

    /// `|det g|^{1/2}` when it is exactly extractable.
    pub fn volume_density(&self) -> Result<Expr, GeomError> {
        sqrt_abs(&self.det).ok_or(GeomError::Other(format!("no exact square root of det g = {}", self.det)))
    }
}

/// `|e|^{1/2}` for single-term expressions with exact roots.
pub fn sqrt_abs(e: &Expr) -> Option<Expr> {
    let (c, _) = e.as_term()?;
    let abs = if c.signum() == std::cmp::Ordering::Less { -e } else { e.clone() };
    abs.pow_rational(Rational64::new(1, 2))
}

/// Ricci tensor of `σ^{-2} g`.
pub fn einstein_scale_residual(sigma: &Expr, g: &Metric) -> Result<Tensor, GeomError> {
    let f = (Expr::one() / sigma).pow_i(2);
    let m: ExprMatrix = g.matrix().iter().map(|r| r.iter().map(|e| e * &f).collect()).collect();
    Ok(Metric::new(g.chart(), m)?.ricci())
}

/// Results of the four ambient-metric checks.
#[derive(Debug, Clone)]
pub struct AmbientReport {
    /// `L_{t∂t} g̃ − 2g̃`
    pub homogeneity: Tensor,
    /// restriction to `{ρ = 0, t = 1}` minus `g`
    pub restriction: Tensor,
    /// `∇_T T − T` for `T = t∂t`
    pub straightness: VectorField,
    pub ricci: Tensor,
}

impl AmbientReport {
    pub fn homogeneous(&self) -> bool {
        self.homogeneity.is_zero()
    }
    pub fn restricts(&self) -> bool {
        self.restriction.is_zero()
    }
    pub fn straight(&self) -> bool {
        self.straightness.is_zero()
    }
    pub fn ricci_flat(&self) -> bool {
        self.ricci.is_zero()
    }
    pub fn all(&self) -> bool {
        self.homogeneous() && self.restricts() && self.straight() && self.ricci_flat()
    }
}

/// Checks `gt` on a chart `(t, base…, ρ)` against the base metric `g`.
pub fn ambient_axioms(gt: &Metric, g: &Metric, t: &str, rho: &str) -> Result<AmbientReport, GeomError> {
    let ch = gt.chart();
    let ti = ch.index(t)?;
    let ri = ch.index(rho)?;
    let tv = Expr::var(t);
    let mut tdt = VectorField::zero(ch.dim());
    tdt.comps[ti] = tv.clone();
    let homogeneity = gt.tensor().lie(&tdt, ch).sub(&gt.tensor().scale(&Expr::int(2)));

    let base = g.chart();
    let map: Vec<Expr> = ch
        .coords()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == ti {
                Ok(Expr::one())
            } else if i == ri {
                Ok(Expr::zero())
            } else {
                base.index(c).map(|_| Expr::var(c))
            }
        })
        .collect::<Result<_, _>>()?;
    let restricted = pullback_covariant(&gt.tensor(), ch, base, &map);
    let restriction = restricted.sub(&g.tensor());

    let ntt = gt.nabla(&tdt, &tdt);
    let straightness = ntt.sub(&tdt);
    let ricci = gt.ricci();
    Ok(AmbientReport { homogeneity, restriction, straightness, ricci })
}

/// Pullback of a covariant tensor along a map given in source coordinates.
pub fn pullback_covariant(t: &Tensor, target: &Chart, source: &Chart, map: &[Expr]) -> Tensor {
    assert!(t.slots().iter().all(|s| *s == Slot::Down));
    let subs: HashMap<String, Expr> = target.coords().iter().cloned().zip(map.iter().cloned()).collect();
    let jac: ExprMatrix = (0..source.dim()).map(|a| map.iter().map(|f| source.diff(f, a)).collect()).collect();
    t.map(|e| crate::forms::subs_coords(e, &subs)).transform(&jac, &jac)
}
