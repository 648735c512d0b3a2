//! Dense polynomials, truncated power series and Laurent polynomials over an
//! exact coefficient ring, plus exact determinants of small matrices.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ring::{ExactDiv, Field, Ring};

/// Dense univariate polynomial; `coeffs[i]` multiplies `z^i`, trailing zeros trimmed.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C: Ring> {
    ctx: C::Ctx,
    coeffs: Vec<C>,
}

impl<C: Ring> Poly<C> {
    pub fn new(ctx: &C::Ctx, mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(Ring::is_zero) {
            coeffs.pop();
        }
        Poly { ctx: ctx.clone(), coeffs }
    }

    pub fn constant(c: C) -> Self {
        let ctx = c.ctx();
        Self::new(&ctx, vec![c])
    }

    /// `c z^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        let ctx = c.ctx();
        let mut coeffs = vec![C::zero(&ctx); k];
        coeffs.push(c);
        Self::new(&ctx, coeffs)
    }

    /// The variable `z`.
    pub fn variable(ctx: &C::Ctx) -> Self {
        Self::monomial(C::one(ctx), 1)
    }

    pub fn context(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(|| C::zero(&self.ctx))
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(&self.ctx, self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(&self.ctx); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { ctx: self.ctx.clone(), coeffs }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.mul_int(i as i64)).collect();
        Self::new(&self.ctx, coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &C) -> C {
        self.coeffs.iter().rev().fold(C::zero(&self.ctx), |acc, c| acc.mul(x).add(c))
    }

    /// Substitutes `z ↦ z^k`.
    pub fn compose_power(&self, k: usize) -> Self {
        assert!(k >= 1, "composition with z^0 is not a substitution");
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(&self.ctx); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Poly { ctx: self.ctx.clone(), coeffs }
    }

    /// `z^n p(1/z)`; requires `deg p <= n`.
    pub fn reversed(&self, n: usize) -> Self {
        assert!(self.degree().is_none_or(|d| d <= n), "reversal degree below polynomial degree");
        let coeffs = (0..=n).map(|i| self.coeff(n - i)).collect();
        Self::new(&self.ctx, coeffs)
    }

    pub fn map<D: Ring>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(ctx, self.coeffs.iter().map(f).collect())
    }

    /// True when every odd-degree coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Ring::is_zero)
    }
}

impl<C: Field> Poly<C> {
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor.leading().ok_or(Error::DivisionByZero)?;
        let lead_inv = lead.inv().ok_or(Error::DivisionByZero)?;
        let dn = divisor.coeffs.len();
        if self.coeffs.len() < dn {
            return Ok((Self::zero(&self.ctx), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![C::zero(&self.ctx); self.coeffs.len() - dn + 1];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dn - 1].mul(&lead_inv);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].sub(&c.mul(dj));
            }
            quot[i] = c;
        }
        rem.truncate(dn - 1);
        Ok((Self::new(&self.ctx, quot), Self::new(&self.ctx, rem)))
    }
}

impl<C: Ring> Ring for Poly<C> {
    type Ctx = C::Ctx;

    fn ctx(&self) -> C::Ctx {
        self.ctx.clone()
    }
    fn zero(ctx: &C::Ctx) -> Self {
        Poly { ctx: ctx.clone(), coeffs: Vec::new() }
    }
    fn one(ctx: &C::Ctx) -> Self {
        Poly { ctx: ctx.clone(), coeffs: vec![C::one(ctx)] }
    }
    fn from_int(ctx: &C::Ctx, n: i64) -> Self {
        Self::new(ctx, vec![C::from_int(ctx, n)])
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() { (self, rhs) } else { (rhs, self) };
        let mut coeffs = long.coeffs.clone();
        for (a, b) in coeffs.iter_mut().zip(&short.coeffs) {
            *a = a.add(b);
        }
        Self::new(&self.ctx, coeffs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero(&self.ctx);
        }
        let mut coeffs = vec![C::zero(&self.ctx); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Self::new(&self.ctx, coeffs)
    }
    fn neg(&self) -> Self {
        Poly { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(Ring::neg).collect() }
    }
}

impl<C: Field> ExactDiv for Poly<C> {
    fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor).ok()?;
        r.is_zero().then_some(q)
    }
}

/// Power series known up to and including `z^order`.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedSeries<C: Ring> {
    ctx: C::Ctx,
    coeffs: Vec<C>,
}

impl<C: Ring> TruncatedSeries<C> {
    pub fn new(ctx: &C::Ctx, mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero(ctx));
        TruncatedSeries { ctx: ctx.clone(), coeffs }
    }

    pub fn from_poly(p: &Poly<C>, order: usize) -> Self {
        Self::new(p.context(), p.coeffs().iter().take(order + 1).cloned().collect(), order)
    }

    pub fn one(ctx: &C::Ctx, order: usize) -> Self {
        Self::new(ctx, vec![C::one(ctx)], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn context(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        Self::new(&self.ctx, self.coeffs[..=order].to_vec(), order)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order).map(|i| self.coeffs[i].add(&rhs.coeffs[i])).collect();
        Self::new(&self.ctx, coeffs, order)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order).map(|i| self.coeffs[i].sub(&rhs.coeffs[i])).collect();
        Self::new(&self.ctx, coeffs, order)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![C::zero(&self.ctx); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        TruncatedSeries { ctx: self.ctx.clone(), coeffs }
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncatedSeries { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    /// Multiplication by `z^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.order();
        let mut coeffs = vec![C::zero(&self.ctx); k.min(order + 1)];
        coeffs.extend(self.coeffs.iter().take((order + 1).saturating_sub(k)).cloned());
        TruncatedSeries { ctx: self.ctx.clone(), coeffs }
    }

    pub fn derivative(&self) -> Self {
        let order = self.order();
        let coeffs = (1..=order).map(|i| self.coeffs[i].mul_int(i as i64)).collect();
        // One order of accuracy is lost.
        Self::new(&self.ctx, coeffs, order.saturating_sub(1))
    }
}

impl<C: Field> TruncatedSeries<C> {
    /// `num / den` up to the smaller of the two orders.
    pub fn div(&self, den: &Self) -> Result<Self> {
        let inv0 = den.coeffs[0].inv().ok_or(Error::NonInvertibleConstantTerm)?;
        let unit = inv0.is_one();
        let order = self.order().min(den.order());
        let mut out: Vec<C> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = self.coeffs[n].clone();
            for k in 1..=n {
                let d = &den.coeffs[k];
                if !d.is_zero() && !out[n - k].is_zero() {
                    acc = acc.sub(&d.mul(&out[n - k]));
                }
            }
            out.push(if unit { acc } else { acc.mul(&inv0) });
        }
        Ok(TruncatedSeries { ctx: self.ctx.clone(), coeffs: out })
    }
}

/// Free function form of [`TruncatedSeries::div`].
pub fn series_div<C: Field>(num: &TruncatedSeries<C>, den: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    num.div(den)
}

/// Laurent polynomial `Σ coeffs[i] t^{lo + i}`, zero ends trimmed.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentPoly<C: Ring> {
    ctx: C::Ctx,
    lo: i64,
    coeffs: Vec<C>,
}

impl<C: Ring> LaurentPoly<C> {
    pub fn new(ctx: &C::Ctx, lo: i64, coeffs: Vec<C>) -> Self {
        let mut out = LaurentPoly { ctx: ctx.clone(), lo, coeffs };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Ring::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    /// `c t^e`.
    pub fn monomial(c: C, e: i64) -> Self {
        let ctx = c.ctx();
        Self::new(&ctx, e, vec![c])
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    pub fn coeff(&self, e: i64) -> C {
        let idx = e - self.lo;
        if idx < 0 {
            return C::zero(&self.ctx);
        }
        self.coeffs.get(idx as usize).cloned().unwrap_or_else(|| C::zero(&self.ctx))
    }

    /// `(min, max)` exponent of the nonzero terms.
    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        (!self.coeffs.is_empty()).then(|| (self.lo, self.lo + self.coeffs.len() as i64 - 1))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.lo + i as i64, c))
    }

    pub fn from_poly(p: &Poly<C>) -> Self {
        Self::new(p.context(), 0, p.coeffs().to_vec())
    }
}

impl<C: Ring> Ring for LaurentPoly<C> {
    type Ctx = C::Ctx;

    fn ctx(&self) -> C::Ctx {
        self.ctx.clone()
    }
    fn zero(ctx: &C::Ctx) -> Self {
        LaurentPoly { ctx: ctx.clone(), lo: 0, coeffs: Vec::new() }
    }
    fn one(ctx: &C::Ctx) -> Self {
        LaurentPoly { ctx: ctx.clone(), lo: 0, coeffs: vec![C::one(ctx)] }
    }
    fn from_int(ctx: &C::Ctx, n: i64) -> Self {
        Self::new(ctx, 0, vec![C::from_int(ctx, n)])
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() {
            return rhs.clone();
        }
        if rhs.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(rhs.lo);
        let hi = (self.lo + self.coeffs.len() as i64).max(rhs.lo + rhs.coeffs.len() as i64);
        let mut coeffs = vec![C::zero(&self.ctx); (hi - lo) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (self.lo - lo) as usize + i;
            coeffs[k] = coeffs[k].add(c);
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            let k = (rhs.lo - lo) as usize + i;
            coeffs[k] = coeffs[k].add(c);
        }
        Self::new(&self.ctx, lo, coeffs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero(&self.ctx);
        }
        let mut coeffs = vec![C::zero(&self.ctx); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Self::new(&self.ctx, self.lo + rhs.lo, coeffs)
    }
    fn neg(&self) -> Self {
        LaurentPoly { ctx: self.ctx.clone(), lo: self.lo, coeffs: self.coeffs.iter().map(Ring::neg).collect() }
    }
}

macro_rules! forward_ops {
    ($ty:ident) => {
        impl<C: Ring> std::ops::Add<&$ty<C>> for &$ty<C> {
            type Output = $ty<C>;
            fn add(self, rhs: &$ty<C>) -> $ty<C> {
                Ring::add(self, rhs)
            }
        }
        impl<C: Ring> std::ops::Sub<&$ty<C>> for &$ty<C> {
            type Output = $ty<C>;
            fn sub(self, rhs: &$ty<C>) -> $ty<C> {
                Ring::sub(self, rhs)
            }
        }
        impl<C: Ring> std::ops::Mul<&$ty<C>> for &$ty<C> {
            type Output = $ty<C>;
            fn mul(self, rhs: &$ty<C>) -> $ty<C> {
                Ring::mul(self, rhs)
            }
        }
        impl<C: Ring> std::ops::Neg for &$ty<C> {
            type Output = $ty<C>;
            fn neg(self) -> $ty<C> {
                Ring::neg(self)
            }
        }
    };
}

forward_ops!(Poly);
forward_ops!(LaurentPoly);

/// Dense square matrix over a ring, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<R: Ring> {
    ctx: R::Ctx,
    n: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn from_fn(ctx: &R::Ctx, n: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { ctx: ctx.clone(), n, data }
    }

    pub fn zeros(ctx: &R::Ctx, n: usize) -> Self {
        Self::from_fn(ctx, n, |_, _| R::zero(ctx))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.n + j] = v;
    }

    /// Adds `v` to entry `(i, j)`; coinciding positions accumulate.
    pub fn add_at(&mut self, i: usize, j: usize, v: &R) {
        let k = i * self.n + j;
        self.data[k] = self.data[k].add(v);
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.ctx, self.n, |i, j| self.get(j, i).clone())
    }

    /// Simultaneous cyclic shift of rows and columns by `k`.
    pub fn cyclic_shift(&self, k: usize) -> Self {
        let n = self.n;
        Self::from_fn(&self.ctx, n, |i, j| self.get((i + k) % n, (j + k) % n).clone())
    }

    pub fn map<S: Ring>(&self, ctx: &S::Ctx, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix { ctx: ctx.clone(), n: self.n, data: self.data.iter().map(f).collect() }
    }

    /// Determinant by Laplace expansion along rows, memoised on the set of used columns.
    pub fn det_cofactor(&self) -> R {
        assert!(self.n <= 24, "cofactor expansion limited to small matrices");
        let mut memo: HashMap<u32, R> = HashMap::new();
        self.minor_det(0, 0, &mut memo)
    }

    fn minor_det(&self, row: usize, used: u32, memo: &mut HashMap<u32, R>) -> R {
        if row == self.n {
            return R::one(&self.ctx);
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = R::zero(&self.ctx);
        let mut position = 0usize;
        for col in 0..self.n {
            if used & (1 << col) != 0 {
                continue;
            }
            let entry = self.get(row, col);
            if !entry.is_zero() {
                let term = entry.mul(&self.minor_det(row + 1, used | (1 << col), memo));
                acc = if position.is_multiple_of(2) { acc.add(&term) } else { acc.sub(&term) };
            }
            position += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
}

impl<R: ExactDiv> Matrix<R> {
    /// Fraction-free Bareiss elimination with row pivoting.
    pub fn det_bareiss(&self) -> R {
        let n = self.n;
        if n == 0 {
            return R::one(&self.ctx);
        }
        let mut a = self.data.clone();
        let mut negate = false;
        let mut prev = R::one(&self.ctx);
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return R::zero(&self.ctx);
                };
                for j in 0..n {
                    a.swap(k * n + j, r * n + j);
                }
                negate = !negate;
            }
            let pivot = a[k * n + k].clone();
            for i in k + 1..n {
                let aik = a[i * n + k].clone();
                for j in k + 1..n {
                    let num = a[i * n + j].mul(&pivot).sub(&aik.mul(&a[k * n + j]));
                    a[i * n + j] = if prev.is_one() {
                        num
                    } else {
                        num.exact_div(&prev).expect("Bareiss division is exact")
                    };
                }
                a[i * n + k] = R::zero(&self.ctx);
            }
            prev = pivot;
        }
        let det = a[n * n - 1].clone();
        if negate {
            det.neg()
        } else {
            det
        }
    }
}
