//! Atoms: the indeterminates of the polynomial layer.
//!
//! Atoms are interned into a process-wide table and referenced by `u32` ids, so
//! monomials are cheap to compare and hash. Id order is only used internally;
//! anything user-visible sorts by the structural order on [`Atom`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;

use crate::expr::Expr;

pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// A chart coordinate.
    Var(Symbol),
    /// `order`-th derivative of a function symbol of one coordinate.
    Func { name: Symbol, arg: Symbol, order: u32 },
    /// `exp` of a single coordinate.
    Exp(Symbol),
    /// Antiderivative symbol with respect to `var`; its `var`-derivative is `integrand`.
    Integral { name: Symbol, var: Symbol, integrand: Expr },
    /// `exp` of an argument that is not ℚ-linear in the coordinates.
    ExpOf(Expr),
    /// `base^(1/d)` for a base that is not a single term.
    Root { base: Expr, d: i64 },
}

impl Atom {
    fn rank(&self) -> u8 {
        match self {
            Atom::Var(_) => 0,
            Atom::Func { .. } => 1,
            Atom::Exp(_) => 2,
            Atom::Integral { .. } => 3,
            Atom::ExpOf(_) => 4,
            Atom::Root { .. } => 5,
        }
    }

    /// Coordinates this atom may depend on, when known exactly.
    pub fn depends_on(&self, v: &str) -> bool {
        match self {
            Atom::Var(s) | Atom::Exp(s) => &**s == v,
            Atom::Func { arg, .. } => &**arg == v,
            Atom::Integral { var, .. } => &**var == v,
            Atom::ExpOf(e) | Atom::Root { base: e, .. } => e.depends_on(v),
        }
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        let r = self.rank().cmp(&other.rank());
        if r != Ordering::Equal {
            return r;
        }
        match (self, other) {
            (Atom::Var(a), Atom::Var(b)) | (Atom::Exp(a), Atom::Exp(b)) => a.cmp(b),
            (Atom::Func { name: n1, arg: a1, order: o1 }, Atom::Func { name: n2, arg: a2, order: o2 }) => {
                (n1, a1, o1).cmp(&(n2, a2, o2))
            }
            (Atom::Integral { name: n1, var: v1, .. }, Atom::Integral { name: n2, var: v2, .. }) => {
                (n1, v1).cmp(&(n2, v2)).then_with(|| self.to_string().cmp(&other.to_string()))
            }
            (Atom::Root { d: d1, .. }, Atom::Root { d: d2, .. }) => {
                d1.cmp(d2).then_with(|| self.to_string().cmp(&other.to_string()))
            }
            _ => self.to_string().cmp(&other.to_string()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(s) => f.write_str(s),
            Atom::Func { name, order, .. } => {
                f.write_str(name)?;
                for _ in 0..*order {
                    f.write_str("'")?;
                }
                Ok(())
            }
            Atom::Exp(s) => write!(f, "exp({s})"),
            Atom::Integral { name, .. } => f.write_str(name),
            Atom::ExpOf(e) => write!(f, "exp({e})"),
            Atom::Root { base, d } => write!(f, "({base})^(1/{d})"),
        }
    }
}

/// Derivative of an atom with respect to one coordinate.
#[derive(Clone, Debug)]
pub(crate) enum AtomDeriv {
    Zero,
    One,
    /// Another atom, coefficient one.
    Atom(u32),
    General(Expr),
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Arc<Atom>, u32>,
    atoms: Vec<Arc<Atom>>,
    derivs: HashMap<(u32, Symbol), AtomDeriv>,
}

fn table() -> &'static RwLock<Interner> {
    static T: OnceLock<RwLock<Interner>> = OnceLock::new();
    T.get_or_init(Default::default)
}

pub fn intern(a: Atom) -> u32 {
    if let Some(&id) = table().read().ids.get(&a) {
        return id;
    }
    let mut t = table().write();
    if let Some(&id) = t.ids.get(&a) {
        return id;
    }
    let id = t.atoms.len() as u32;
    let a = Arc::new(a);
    t.atoms.push(a.clone());
    t.ids.insert(a, id);
    id
}

pub fn atom(id: u32) -> Arc<Atom> {
    table().read().atoms[id as usize].clone()
}

pub fn var_id(name: &str) -> u32 {
    intern(Atom::Var(sym(name)))
}

pub(crate) fn is_root(id: u32) -> bool {
    matches!(*atom(id), Atom::Root { .. })
}

pub(crate) fn atom_deriv(id: u32, v: &Symbol) -> AtomDeriv {
    if let Some(d) = table().read().derivs.get(&(id, v.clone())) {
        return d.clone();
    }
    let a = atom(id);
    let d = match &*a {
        Atom::Var(s) => {
            if s == v {
                AtomDeriv::One
            } else {
                AtomDeriv::Zero
            }
        }
        Atom::Func { name, arg, order } => {
            if arg == v {
                AtomDeriv::Atom(intern(Atom::Func { name: name.clone(), arg: arg.clone(), order: order + 1 }))
            } else {
                AtomDeriv::Zero
            }
        }
        Atom::Exp(s) => {
            if s == v {
                AtomDeriv::Atom(id)
            } else {
                AtomDeriv::Zero
            }
        }
        Atom::Integral { var, integrand, .. } => {
            if var == v {
                AtomDeriv::General(integrand.clone())
            } else {
                AtomDeriv::Zero
            }
        }
        Atom::ExpOf(e) => {
            let de = e.diff(v);
            if de.is_zero() {
                AtomDeriv::Zero
            } else {
                AtomDeriv::General(&Expr::from_atom(id) * &de)
            }
        }
        Atom::Root { base, d } => {
            let db = base.diff(v);
            if db.is_zero() {
                AtomDeriv::Zero
            } else {
                // (b^(1/d))' = (1/d) b^(1/d) b' / b
                let own = Expr::from_atom(id);
                let k = Expr::rational(1, *d);
                AtomDeriv::General(&(&(&k * &own) * &db) / base)
            }
        }
    };
    table().write().derivs.insert((id, v.clone()), d.clone());
    d
}
