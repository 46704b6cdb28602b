//! Closed-form expressions in `x, y` with symbolic differentiation.

use crate::geometry::Point2;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Y,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

pub fn c(v: f64) -> Expr {
    Expr::Const(v)
}

pub fn x() -> Expr {
    Expr::X
}

pub fn y() -> Expr {
    Expr::Y
}

pub fn sin(e: Expr) -> Expr {
    match e {
        Expr::Const(v) => Expr::Const(v.sin()),
        e => Expr::Sin(Arc::new(e)),
    }
}

pub fn cos(e: Expr) -> Expr {
    match e {
        Expr::Const(v) => Expr::Const(v.cos()),
        e => Expr::Cos(Arc::new(e)),
    }
}

impl Expr {
    pub fn eval(&self, p: Point2) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::X => p.x,
            Expr::Y => p.y,
            Expr::Add(a, b) => a.eval(p) + b.eval(p),
            Expr::Sub(a, b) => a.eval(p) - b.eval(p),
            Expr::Mul(a, b) => a.eval(p) * b.eval(p),
            Expr::Neg(a) => -a.eval(p),
            Expr::Sin(a) => a.eval(p).sin(),
            Expr::Cos(a) => a.eval(p).cos(),
        }
    }

    pub fn diff(&self, v: Var) -> Expr {
        match self {
            Expr::Const(_) => c(0.0),
            Expr::X => c(if v == Var::X { 1.0 } else { 0.0 }),
            Expr::Y => c(if v == Var::Y { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => a.diff(v) + b.diff(v),
            Expr::Sub(a, b) => a.diff(v) - b.diff(v),
            Expr::Mul(a, b) => a.diff(v) * (**b).clone() + (**a).clone() * b.diff(v),
            Expr::Neg(a) => -a.diff(v),
            Expr::Sin(a) => cos((**a).clone()) * a.diff(v),
            Expr::Cos(a) => -(sin((**a).clone()) * a.diff(v)),
        }
    }

    pub fn grad(&self) -> (Expr, Expr) {
        (self.diff(Var::X), self.diff(Var::Y))
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => c(a + b),
            (Some(z), _) if z == 0.0 => o,
            (_, Some(z)) if z == 0.0 => self,
            _ => Expr::Add(Arc::new(self), Arc::new(o)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => c(a - b),
            (Some(z), _) if z == 0.0 => -o,
            (_, Some(z)) if z == 0.0 => self,
            _ => Expr::Sub(Arc::new(self), Arc::new(o)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => c(a * b),
            (Some(z), _) | (_, Some(z)) if z == 0.0 => c(0.0),
            (Some(one), _) if one == 1.0 => o,
            (_, Some(one)) if one == 1.0 => self,
            _ => Expr::Mul(Arc::new(self), Arc::new(o)),
        }
    }
}

impl Mul<Expr> for f64 {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        c(self) * o
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(v) => c(-v),
            Expr::Neg(a) => (*a).clone(),
            e => Expr::Neg(Arc::new(e)),
        }
    }
}
