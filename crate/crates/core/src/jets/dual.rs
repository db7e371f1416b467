//! First-order dual numbers that nest.
//!
//! `Dual<Dual<Dual<f64>>>` carries three independent infinitesimals, so a
//! single evaluation seeded along coordinates `(i, j, k)` yields the exact
//! partial `∂_i ∂_j ∂_k` together with every lower-order partial along the way.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real-like scalar that field definitions are generic over.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn cst(v: f64) -> Self;
    /// Innermost real part.
    fn re(&self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn powf(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }

    fn scale(self, c: f64) -> Self {
        self * Self::cst(c)
    }

    fn add_cst(self, c: f64) -> Self {
        self + Self::cst(c)
    }
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn powf(self, e: Self) -> Self {
        f64::powf(self, e)
    }
    #[inline]
    fn scale(self, c: f64) -> Self {
        self * c
    }
    #[inline]
    fn add_cst(self, c: f64) -> Self {
        self + c
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    /// Chain rule for a unary function with value `v` and derivative `dv` at `re`.
    #[inline]
    fn chain(v: T, dv: T, eps: T) -> Self {
        Self {
            re: v,
            eps: dv * eps,
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Self::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn cst(v: f64) -> Self {
        Self::new(T::cst(v), T::cst(0.0))
    }
    #[inline]
    fn re(&self) -> f64 {
        self.re.re()
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Self::chain(e, e, self.eps)
    }
    fn ln(self) -> Self {
        Self::chain(self.re.ln(), T::cst(1.0) / self.re, self.eps)
    }
    fn sin(self) -> Self {
        Self::chain(self.re.sin(), self.re.cos(), self.eps)
    }
    fn cos(self) -> Self {
        Self::chain(self.re.cos(), -self.re.sin(), self.eps)
    }
    fn sinh(self) -> Self {
        Self::chain(self.re.sinh(), self.re.cosh(), self.eps)
    }
    fn cosh(self) -> Self {
        Self::chain(self.re.cosh(), self.re.sinh(), self.eps)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Self::chain(s, T::cst(0.5) / s, self.eps)
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::cst(1.0),
            1 => self,
            _ => {
                let lower = self.re.powi(n - 1);
                Self::chain(lower * self.re, lower.scale(n as f64), self.eps)
            }
        }
    }
    #[inline]
    fn scale(self, c: f64) -> Self {
        Self::new(self.re.scale(c), self.eps.scale(c))
    }
    #[inline]
    fn add_cst(self, c: f64) -> Self {
        Self::new(self.re.add_cst(c), self.eps)
    }
}

pub type D1 = Dual<f64>;
pub type D2 = Dual<D1>;
pub type D3 = Dual<D2>;

/// Coordinate `x_l = p_l` seeded with one infinitesimal per requested direction.
///
/// The outermost infinitesimal tracks direction `i`, then `j`, then `k`.
pub fn seed3(p: f64, l: usize, i: usize, j: usize, k: usize) -> D3 {
    let on = |a: usize| if a == l { 1.0 } else { 0.0 };
    Dual::new(
        Dual::new(Dual::new(p, on(k)), Dual::new(on(j), 0.0)),
        Dual::new(Dual::new(on(i), 0.0), Dual::cst(0.0)),
    )
}

pub fn seed2(p: f64, l: usize, i: usize, j: usize) -> D2 {
    let on = |a: usize| if a == l { 1.0 } else { 0.0 };
    Dual::new(Dual::new(p, on(j)), Dual::new(on(i), 0.0))
}

pub fn seed1(p: f64, l: usize, i: usize) -> D1 {
    Dual::new(p, if i == l { 1.0 } else { 0.0 })
}

/// Components of a triple-seeded result.
#[derive(Clone, Copy, Debug)]
pub struct Unpacked3 {
    pub value: f64,
    pub di: f64,
    pub dj: f64,
    pub dk: f64,
    pub dij: f64,
    pub dik: f64,
    pub djk: f64,
    pub dijk: f64,
}

pub fn unpack3(y: D3) -> Unpacked3 {
    Unpacked3 {
        value: y.re.re.re,
        dk: y.re.re.eps,
        dj: y.re.eps.re,
        djk: y.re.eps.eps,
        di: y.eps.re.re,
        dik: y.eps.re.eps,
        dij: y.eps.eps.re,
        dijk: y.eps.eps.eps,
    }
}
