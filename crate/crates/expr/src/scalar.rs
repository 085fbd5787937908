//! Exact scalars: ℚ-linear combinations of radical monomials `2^a 3^b 5^c`.
//!
//! Every value is stored canonically. Each exponent is reduced into `[0, 1)` and
//! the integer parts are folded into the rational coefficient, so two scalars
//! are equal exactly when their term lists are equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::{smallvec, SmallVec};

/// The primes whose radicals are admitted as coefficients.
pub const PRIMES: [u32; 3] = [2, 3, 5];

const ZERO_EXP: Rational64 = Rational64::new_raw(0, 1);

/// A radical monomial `2^a 3^b 5^c` with every exponent in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Radical([Rational64; 3]);

impl Radical {
    pub const ONE: Radical = Radical([ZERO_EXP; 3]);

    pub fn exponents(&self) -> [Rational64; 3] {
        self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Product of two radicals, returned with the integer carries per prime.
    fn mul(self, other: Radical) -> (Radical, [i64; 3]) {
        let mut exps = [ZERO_EXP; 3];
        let mut carry = [0i64; 3];
        for k in 0..3 {
            let s = self.0[k] + other.0[k];
            if s >= Rational64::one() {
                exps[k] = s - Rational64::one();
                carry[k] = 1;
            } else {
                exps[k] = s;
            }
        }
        (Radical(exps), carry)
    }

    fn denominators(&self) -> [i64; 3] {
        [*self.0[0].denom(), *self.0[1].denom(), *self.0[2].denom()]
    }
}

/// Splits `e` into `floor(e)` and the fractional part in `[0, 1)`.
fn split_exponent(e: Rational64) -> (i64, Rational64) {
    let fl = e.floor();
    (fl.to_integer(), e - fl)
}

fn prime_power(p: u32, k: i64) -> BigRational {
    let base = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// An exact element of the real field generated over ℚ by radicals of 2, 3 and 5.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar {
    terms: SmallVec<[(Radical, BigRational); 1]>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: SmallVec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            Scalar { terms: smallvec![(Radical::ONE, q)] }
        }
    }

    /// `p^e` for `p` one of 2, 3, 5.
    pub fn prime_power(p: u32, e: Rational64) -> Self {
        let idx = PRIMES
            .iter()
            .position(|&q| q == p)
            .expect("radicals are only supported for the primes 2, 3 and 5");
        let (int, frac) = split_exponent(e);
        let mut exps = [ZERO_EXP; 3];
        exps[idx] = frac;
        Scalar { terms: smallvec![(Radical(exps), prime_power(p, int))] }
    }

    pub fn sqrt2() -> Self {
        Self::prime_power(2, Rational64::new(1, 2))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn terms(&self) -> &[(Radical, BigRational)] {
        &self.terms
    }

    /// The rational value, when the scalar has no radical part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(r, q)] if r.is_one() => Some(q.clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    fn from_terms(mut terms: Vec<(Radical, BigRational)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: SmallVec<[(Radical, BigRational); 1]> = SmallVec::new();
        for (r, q) in terms {
            match out.last_mut() {
                Some(last) if last.0 == r => last.1 += q,
                _ => out.push((r, q)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Scalar { terms: out }
    }

    fn mul_term(&self, r: Radical, q: &BigRational) -> Vec<(Radical, BigRational)> {
        self.terms
            .iter()
            .map(|(r0, q0)| {
                let (rad, carry) = r0.mul(r);
                let mut c = q0 * q;
                for (k, &n) in carry.iter().enumerate() {
                    if n != 0 {
                        c *= BigRational::from_integer(BigInt::from(PRIMES[k]));
                    }
                }
                (rad, c)
            })
            .collect()
    }

    /// Multiplicative inverse; `None` only for zero.
    pub fn inv(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => None,
            [(r, q)] => {
                let mut exps = [ZERO_EXP; 3];
                let mut coeff = q.recip();
                for k in 0..3 {
                    if !r.0[k].is_zero() {
                        exps[k] = Rational64::one() - r.0[k];
                        coeff /= BigRational::from_integer(BigInt::from(PRIMES[k]));
                    }
                }
                Some(Scalar { terms: smallvec![(Radical(exps), coeff)] })
            }
            _ => Some(self.inv_by_linear_algebra()),
        }
    }

    /// Inverts a multi-term scalar by solving `x * y = 1` over ℚ in the
    /// radical basis of the smallest subfield containing `x`.
    fn inv_by_linear_algebra(&self) -> Scalar {
        let mut dens = [1i64; 3];
        for (r, _) in &self.terms {
            let d = r.denominators();
            for k in 0..3 {
                dens[k] = dens[k].lcm(&d[k]);
            }
        }
        let mut basis = Vec::new();
        for a in 0..dens[0] {
            for b in 0..dens[1] {
                for c in 0..dens[2] {
                    basis.push(Radical([
                        Rational64::new(a, dens[0]),
                        Rational64::new(b, dens[1]),
                        Rational64::new(c, dens[2]),
                    ]));
                }
            }
        }
        let n = basis.len();
        let index = |r: &Radical| basis.iter().position(|b| b == r).expect("radical in subfield basis");
        // Column j holds the coordinates of x * basis[j].
        let mut m = vec![vec![BigRational::zero(); n + 1]; n];
        for (j, b) in basis.iter().enumerate() {
            for (r, q) in self.mul_term(*b, &BigRational::one()) {
                m[index(&r)][j] += q;
            }
        }
        m[index(&Radical::ONE)][n] = BigRational::one();
        let sol = solve_rational(m, n).expect("nonzero field element is invertible");
        Scalar::from_terms(basis.into_iter().zip(sol).collect())
    }

    pub fn pow_i64(&self, k: i64) -> Option<Scalar> {
        if k < 0 {
            return self.inv()?.pow_i64(-k);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Some(acc)
    }

    /// Rational power of a single-term scalar, when the result stays inside the
    /// coefficient field (the rational part must be a perfect power up to
    /// factors of 2, 3 and 5). Integer powers work for every scalar.
    pub fn pow_rational(&self, e: Rational64) -> Option<Scalar> {
        if e.is_integer() {
            return self.pow_i64(e.to_integer());
        }
        let [(rad, q)] = self.terms.as_slice() else {
            return None;
        };
        if q.is_negative() {
            return None;
        }
        let mut exps = rad.0;
        let mut num = q.numer().clone();
        let mut den = q.denom().clone();
        for (k, &p) in PRIMES.iter().enumerate() {
            let pb = BigInt::from(p);
            while num.is_multiple_of(&pb) {
                num /= &pb;
                exps[k] += Rational64::one();
            }
            while den.is_multiple_of(&pb) {
                den /= &pb;
                exps[k] -= Rational64::one();
            }
        }
        let root = |v: &BigInt| -> Option<BigInt> {
            let n = *e.denom() as u32;
            let r = v.nth_root(n);
            (r.pow(n) == *v).then_some(r)
        };
        let num_r = root(&num)?.pow(e.numer().unsigned_abs() as u32);
        let den_r = root(&den)?.pow(e.numer().unsigned_abs() as u32);
        let mut out = if e.is_negative() {
            Scalar::from_rational(BigRational::new(den_r, num_r))
        } else {
            Scalar::from_rational(BigRational::new(num_r, den_r))
        };
        for (k, &p) in PRIMES.iter().enumerate() {
            let ex = exps[k] * e;
            if !ex.is_zero() {
                out = &out * &Scalar::prime_power(p, ex);
            }
        }
        Some(out)
    }

    pub fn sqrt(&self) -> Option<Scalar> {
        self.pow_rational(Rational64::new(1, 2))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, q)| {
                let mut v = q.to_f64().unwrap_or(f64::NAN);
                for k in 0..3 {
                    let e = r.0[k];
                    if !e.is_zero() {
                        v *= (PRIMES[k] as f64).powf(*e.numer() as f64 / *e.denom() as f64);
                    }
                }
                v
            })
            .sum()
    }

    /// Exact sign. Floating point settles almost every case; near-cancellations
    /// fall back to interval bounds with increasing precision.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if let Some(q) = self.as_rational() {
            return q.cmp(&BigRational::zero());
        }
        let v = self.to_f64();
        let scale: f64 = Scalar { terms: self.terms.iter().map(|(r, q)| (*r, q.abs())).collect() }.to_f64();
        if v.abs() > 1e-9 * scale {
            return if v > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        let mut bits = 128u32;
        loop {
            let (lo, hi) = self.interval(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    /// Rational bounds `[lo, hi]` on the value using `bits` bits per radical.
    fn interval(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        let scale = BigInt::one() << bits;
        for (r, q) in &self.terms {
            let mut tlo = BigRational::one();
            let mut thi = BigRational::one();
            for k in 0..3 {
                let e = r.0[k];
                if e.is_zero() {
                    continue;
                }
                let n = *e.denom() as u32;
                let m = *e.numer() as u32;
                let target = BigInt::from(PRIMES[k]).pow(m) * scale.pow(n);
                let root = target.nth_root(n);
                tlo *= BigRational::new(root.clone(), scale.clone());
                thi *= BigRational::new(root + 1, scale.clone());
            }
            if q.is_positive() {
                lo += q * tlo;
                hi += q * thi;
            } else {
                lo += q * thi;
                hi += q * tlo;
            }
        }
        (lo, hi)
    }
}

/// Solves an augmented `n × (n+1)` system over ℚ.
fn solve_rational(mut m: Vec<Vec<BigRational>>, n: usize) -> Option<Vec<BigRational>> {
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let d = &m[col][c] * &f;
                    m[r][c] -= d;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::from_rational(q)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let mut out: SmallVec<[(Radical, BigRational); 1]> = SmallVec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            let ord = match (self.terms.get(i), rhs.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(rhs.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &self.terms[i].1 + &rhs.terms[j].1;
                    if !s.is_zero() {
                        out.push((self.terms[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Scalar { terms: out }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if let [(r, q)] = rhs.terms.as_slice() {
            if r.is_one() {
                return Scalar { terms: self.terms.iter().map(|(r0, q0)| (*r0, q0 * q)).collect() };
            }
        }
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (r, q) in &rhs.terms {
            terms.extend(self.mul_term(*r, q));
        }
        Scalar::from_terms(terms)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(r, q)| (*r, -q)).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_exp(e: Rational64) -> String {
    if e.is_integer() && !e.is_negative() {
        e.to_integer().to_string()
    } else {
        format!("({e})")
    }
}

pub(crate) fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, r: &Radical, q: &BigRational, leading: bool) -> fmt::Result {
    let neg = q.is_negative();
    if !leading {
        f.write_str(if neg { " - " } else { " + " })?;
    } else if neg {
        f.write_str("-")?;
    }
    let a = q.abs();
    let mut parts = Vec::new();
    if !a.is_one() || r.is_one() {
        parts.push(fmt_rational(&a));
    }
    for k in 0..3 {
        if !r.0[k].is_zero() {
            parts.push(format!("{}^{}", PRIMES[k], fmt_exp(r.0[k])));
        }
    }
    f.write_str(&parts.join("*"))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (r, q)) in self.terms.iter().enumerate() {
            fmt_term(f, r, q, i == 0)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let s = Scalar::sqrt2();
        assert_eq!(&s * &s, Scalar::from_int(2));
        assert!((&(&s * &s) - &Scalar::from_int(2)).is_zero());
    }

    #[test]
    fn sqrt2_sqrt3_is_sqrt6() {
        let a = &Scalar::prime_power(2, r(1, 2)) * &Scalar::prime_power(3, r(1, 2));
        assert_eq!(a.sqrt().unwrap(), &Scalar::prime_power(2, r(1, 4)) * &Scalar::prime_power(3, r(1, 4)));
        assert!((a.to_f64() - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn integer_parts_fold_into_coefficient() {
        let c = Scalar::prime_power(2, r(-5, 6));
        assert_eq!(c.terms()[0].0.exponents()[0], r(1, 6));
        assert_eq!(c.terms()[0].1, BigRational::new(1.into(), 2.into()));
        assert!((c.to_f64() - 2f64.powf(-5.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn multi_term_inverse() {
        let x = &Scalar::one() + &Scalar::sqrt2();
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        let z = &(&Scalar::prime_power(3, r(1, 3)) + &Scalar::from_int(2)) + &Scalar::prime_power(5, r(1, 2));
        assert!((&z * &z.inv().unwrap()).is_one());
    }

    #[test]
    fn rational_powers() {
        assert_eq!(Scalar::from_int(8).pow_rational(r(1, 3)), Some(Scalar::from_int(2)));
        assert_eq!(Scalar::from_int(7).pow_rational(r(1, 2)), None);
        assert_eq!(Scalar::from_frac(9, 4).pow_rational(r(-1, 2)), Some(Scalar::from_frac(2, 3)));
        let s = Scalar::from_int(12).sqrt().unwrap();
        assert_eq!(&s * &s, Scalar::from_int(12));
    }

    #[test]
    fn exact_sign_of_near_cancellation() {
        // 99/70 is a continued-fraction convergent of sqrt(2).
        let d = &Scalar::sqrt2() - &Scalar::from_frac(99, 70);
        assert_eq!(d.signum(), Ordering::Less);
        let d = &Scalar::sqrt2() - &Scalar::from_frac(140, 99);
        assert_eq!(d.signum(), Ordering::Greater);
    }

    #[test]
    fn display() {
        let c = &Scalar::prime_power(2, r(-5, 6)) * &Scalar::prime_power(3, r(-1, 3));
        assert_eq!(c.to_string(), "1/6*2^(1/6)*3^(2/3)");
        assert_eq!(Scalar::from_frac(-3, 2).to_string(), "-3/2");
    }
}
