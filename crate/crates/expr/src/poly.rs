//! Laurent–Puiseux polynomials over [`Scalar`] in interned atoms.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use smallvec::SmallVec;

use crate::atom::{atom, Atom};
use crate::scalar::Scalar;

/// A monomial: sorted `(atom id, exponent)` pairs with nonzero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(pub(crate) SmallVec<[(u32, Rational64); 4]>);

impl Mono {
    pub fn one() -> Self {
        Mono(SmallVec::new())
    }

    pub fn atom(id: u32, e: Rational64) -> Self {
        let mut m = Mono::one();
        if !e.is_zero() {
            m.0.push((id, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(u32, Rational64)] {
        &self.0
    }

    pub fn exponent(&self, id: u32) -> Rational64 {
        self.0.iter().find(|(a, _)| *a == id).map(|p| p.1).unwrap_or_else(Rational64::zero)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        if other.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return other.clone();
        }
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = other.0[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = ea + eb;
                    if !s.is_zero() {
                        out.push((a, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    pub fn pow(&self, e: Rational64) -> Mono {
        if e.is_zero() {
            return Mono::one();
        }
        Mono(self.0.iter().map(|&(a, x)| (a, x * e)).collect())
    }

    pub fn inv(&self) -> Mono {
        Mono(self.0.iter().map(|&(a, x)| (a, -x)).collect())
    }

    pub fn div(&self, other: &Mono) -> Mono {
        self.mul(&other.inv())
    }

    /// Componentwise minimum of exponents, with absent atoms counting as 0.
    pub fn min(&self, other: &Mono) -> Mono {
        let mut out = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let a = self.0.get(i).copied();
            let b = other.0.get(j).copied();
            match (a, b) {
                (Some((x, ex)), Some((y, ey))) if x == y => {
                    let m = ex.min(ey);
                    if !m.is_zero() {
                        out.push((x, m));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((x, ex)), Some((y, _))) if x < y => {
                    if ex.is_negative() {
                        out.push((x, ex));
                    }
                    i += 1;
                }
                (Some((x, ex)), None) => {
                    if ex.is_negative() {
                        out.push((x, ex));
                    }
                    i += 1;
                }
                (_, Some((y, ey))) => {
                    if ey.is_negative() {
                        out.push((y, ey));
                    }
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Mono(out)
    }

    /// Lexicographic monomial order on exponent vectors (indexed by atom id).
    /// Compatible with multiplication, which the division routine relies on.
    pub fn lex_cmp(&self, other: &Mono) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            let a = self.0.get(i).copied();
            let b = other.0.get(j).copied();
            match (a, b) {
                (None, None) => return Ordering::Equal,
                (Some((x, ex)), Some((y, ey))) if x == y => {
                    if ex != ey {
                        return ex.cmp(&ey);
                    }
                    i += 1;
                    j += 1;
                }
                (Some((x, ex)), Some((y, _))) if x < y => return ex.cmp(&Rational64::zero()),
                (Some((_, ex)), None) => return ex.cmp(&Rational64::zero()),
                (_, Some((_, ey))) => return Rational64::zero().cmp(&ey),
            }
        }
    }

    /// Atoms with exponents, ordered structurally (for printing).
    pub fn structural(&self) -> Vec<(std::sync::Arc<Atom>, Rational64)> {
        let mut v: Vec<_> = self.0.iter().map(|&(a, e)| (atom(a), e)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn structural_cmp(&self, other: &Mono) -> Ordering {
        let a = self.structural();
        let b = other.structural();
        // Higher total degree first, then lexicographic on atoms.
        let da: Rational64 = a.iter().map(|p| p.1).sum();
        let db: Rational64 = b.iter().map(|p| p.1).sum();
        db.cmp(&da).then_with(|| {
            for (x, y) in a.iter().zip(b.iter()) {
                let c = x.0.cmp(&y.0).then_with(|| y.1.cmp(&x.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            b.len().cmp(&a.len())
        })
    }
}

/// Sorted list of terms with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    pub(crate) terms: Vec<(Mono, Scalar)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::term(Mono::one(), c)
    }

    pub fn term(m: Mono, c: Scalar) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn from_terms(terms: Vec<(Mono, Scalar)>) -> Self {
        let mut map: HashMap<Mono, Scalar> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            match map.get_mut(&m) {
                Some(x) => *x += &c,
                None => {
                    map.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Mono, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(Scalar::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Mono, &Scalar)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((m, c)),
            _ => None,
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &self.terms[i].1 + &other.terms[j].1;
                    if !s.is_zero() {
                        out.push((self.terms[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        let mut terms: Vec<_> = self.terms.iter().map(|(x, c)| (x.mul(m), c.clone())).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn mul_term(&self, m: &Mono, c: &Scalar) -> Poly {
        self.mul_mono(m).scale(c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some((m, c)) = other.single_term() {
            return self.mul_term(m, c);
        }
        if let Some((m, c)) = self.single_term() {
            return other.mul_term(m, c);
        }
        let mut map: HashMap<Mono, Scalar> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match map.get_mut(&m) {
                    Some(x) => *x += &c,
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The monomial content: the largest monomial dividing every term.
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Mono::one();
        };
        let mut m = first.clone();
        for (x, _) in it {
            m = Mono::min(&m, x);
        }
        m
    }

    /// Leading term under [`Mono::lex_cmp`].
    pub fn lex_lead(&self) -> Option<&(Mono, Scalar)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(&b.0))
    }

    /// The structurally leading term, used to normalize denominators.
    pub fn structural_lead(&self) -> Option<&(Mono, Scalar)> {
        self.terms.iter().min_by(|a, b| a.0.structural_cmp(&b.0))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// Both operands are shifted by their monomial content so that all
    /// exponents are nonnegative; every quotient term must then lie in the box
    /// bounded by the per-atom degree differences, which bounds the loop.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some((m, c)) = d.single_term() {
            return Some(self.mul_term(&m.inv(), &c.inv()?));
        }
        let cn = self.mono_content();
        let cd = d.mono_content();
        let n = self.mul_mono(&cn.inv());
        let d = d.mul_mono(&cd.inv());
        let nmax = n.max_degrees();
        let dmax = d.max_degrees();
        let mut bound: HashMap<u32, Rational64> = HashMap::new();
        for (a, e) in &dmax {
            let b = nmax.get(a).copied().unwrap_or_else(Rational64::zero) - e;
            if b.is_negative() {
                return None;
            }
            bound.insert(*a, b);
        }
        for (a, e) in &nmax {
            bound.entry(*a).or_insert(*e);
        }
        let (dl_m, dl_c) = d.lex_lead()?.clone();
        let dl_inv = dl_c.inv()?;
        let mut rem = n;
        let mut quot: Vec<(Mono, Scalar)> = Vec::new();
        while !rem.is_zero() {
            let (rm, rc) = rem.lex_lead()?.clone();
            let qm = rm.div(&dl_m);
            let inside = qm.factors().iter().all(|(a, e)| {
                !e.is_negative() && bound.get(a).is_some_and(|b| e <= b)
            });
            if !inside {
                return None;
            }
            let qc = &rc * &dl_inv;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(quot).mul_mono(&cn.div(&cd)))
    }

    fn max_degrees(&self) -> HashMap<u32, Rational64> {
        let mut out: HashMap<u32, Rational64> = HashMap::new();
        for (m, _) in &self.terms {
            for &(a, e) in m.factors() {
                let x = out.entry(a).or_insert(e);
                if e > *x {
                    *x = e;
                }
            }
        }
        out
    }

    pub fn atoms(&self, out: &mut Vec<u32>) {
        for (m, _) in &self.terms {
            for &(a, _) in m.factors() {
                out.push(a);
            }
        }
    }

    pub fn max_terms(&self) -> usize {
        self.terms.len()
    }
}
