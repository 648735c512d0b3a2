//! Exact arithmetic in the cyclotomic field `Q(ζ)`, `ζ = e^{2πi p/q}`.
//!
//! Elements are stored as residues modulo the cyclotomic polynomial `Φ_q`
//! in the power basis `1, ζ, …, ζ^{d-1}` (`d = φ(q)`), with integer
//! numerators over one positive common denominator. The representation is
//! canonical: two elements are equal iff their stored data are equal.
//!
//! The generator is the flux phase itself, so the same coefficient vector
//! denotes Galois-conjugate numbers for different `p`; `p` only enters when
//! an element is evaluated numerically.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{ExactDiv, Field, Ring};

/// Rational flux `p/q`, with `ζ = e^{2πi p/q}` a primitive `q`-th root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FluxContext {
    p: u32,
    q: u32,
}

impl FluxContext {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        let valid = match (p, q) {
            (0, 1) => true,
            (_, 0 | 1) => false,
            _ => p >= 1 && p < q && p.gcd(&q) == 1,
        };
        if valid {
            Ok(FluxContext { p, q })
        } else {
            Err(Error::InvalidFlux { p, q })
        }
    }

    /// Zero flux, `ζ = 1`.
    pub fn trivial() -> Self {
        FluxContext { p: 0, q: 1 }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Flux angle `γ = 2πp/q`. Only used on floating-point paths.
    pub fn gamma(&self) -> f64 {
        2.0 * PI * f64::from(self.p) / f64::from(self.q)
    }

    /// The flux `(q - p)/q`, whose phase is the complex conjugate.
    pub fn mirror(&self) -> Self {
        if self.q == 1 {
            *self
        } else {
            FluxContext { p: self.q - self.p, q: self.q }
        }
    }

    /// All valid fluxes with denominator at most `q_max`, ordered by `(q, p)`.
    pub fn all_up_to(q_max: u32) -> Vec<FluxContext> {
        let mut out = Vec::new();
        if q_max >= 1 {
            out.push(FluxContext::trivial());
        }
        for q in 2..=q_max {
            for p in 1..q {
                if p.gcd(&q) == 1 {
                    out.push(FluxContext { p, q });
                }
            }
        }
        out
    }
}

impl fmt::Display for FluxContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// The `q`-th cyclotomic polynomial, coefficients indexed by degree.
///
/// Obtained by dividing `x^q - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(q: u32) -> Vec<BigInt> {
    assert!(q >= 1, "cyclotomic polynomial needs q >= 1");
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("cache poisoned").get(&q) {
        return hit.clone();
    }

    let mut poly = vec![BigInt::zero(); q as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[q as usize] = BigInt::one();
    for d in (1..q).filter(|d| q.is_multiple_of(*d)) {
        poly = div_exact_monic(&poly, &cyclotomic_polynomial(d));
    }
    cache.lock().expect("cache poisoned").insert(q, poly.clone());
    poly
}

fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division by cyclotomic factor not exact");
    quot
}

#[derive(Debug)]
struct FieldInner {
    flux: FluxContext,
    /// Monic `Φ_q`, length `degree + 1`.
    modulus: Vec<BigInt>,
    degree: usize,
    /// `ζ^j mod Φ_q` for `j = 0..q`.
    powers: Vec<Vec<BigInt>>,
}

/// Shared handle describing one cyclotomic field together with its flux.
#[derive(Clone)]
pub struct CyclotomicField(Arc<FieldInner>);

impl CyclotomicField {
    pub fn new(flux: FluxContext) -> Self {
        let modulus = cyclotomic_polynomial(flux.q);
        let degree = modulus.len() - 1;
        let powers = (0..flux.q as usize)
            .map(|j| {
                let mut v = vec![BigInt::zero(); j.max(degree) + 1];
                v[j] = BigInt::one();
                reduce_in_place(&mut v, &modulus);
                v
            })
            .collect();
        CyclotomicField(Arc::new(FieldInner { flux, modulus, degree, powers }))
    }

    pub fn flux(&self) -> FluxContext {
        self.0.flux
    }

    pub fn q(&self) -> u32 {
        self.0.flux.q
    }

    /// `φ(q)`, the dimension over `Q`.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.0.modulus
    }
}

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.flux == other.0.flux
    }
}

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{}) @ {}", self.0.flux.q, self.0.flux)
    }
}

fn reduce_in_place(v: &mut Vec<BigInt>, modulus: &[BigInt]) {
    let d = modulus.len() - 1;
    for i in (d..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[i]);
        for (j, mj) in modulus[..d].iter().enumerate() {
            if !mj.is_zero() {
                v[i - d + j] -= &c * mj;
            }
        }
    }
    v.resize(d, BigInt::zero());
}

/// An element of `Q(ζ)`: `(Σ num[k] ζ^k) / den`.
#[derive(Clone)]
pub struct Cyclotomic {
    field: CyclotomicField,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.den == other.den && self.num == other.num
    }
}

impl Eq for Cyclotomic {}

impl Cyclotomic {
    fn from_parts(field: &CyclotomicField, mut num: Vec<BigInt>, den: BigInt) -> Self {
        if num.len() != field.degree() {
            if num.len() < field.degree() {
                num.resize(field.degree(), BigInt::zero());
            } else {
                reduce_in_place(&mut num, field.modulus());
            }
        }
        let mut out = Cyclotomic { field: field.clone(), num, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
    }

    pub fn zero(field: &CyclotomicField) -> Self {
        Cyclotomic { field: field.clone(), num: vec![BigInt::zero(); field.degree()], den: BigInt::one() }
    }

    pub fn one(field: &CyclotomicField) -> Self {
        Self::from_integer(field, BigInt::one())
    }

    pub fn from_integer(field: &CyclotomicField, n: BigInt) -> Self {
        let mut num = vec![BigInt::zero(); field.degree()];
        num[0] = n;
        Cyclotomic { field: field.clone(), num, den: BigInt::one() }
    }

    pub fn from_rational(field: &CyclotomicField, r: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); field.degree()];
        num[0] = r.numer().clone();
        Self::from_parts(field, num, r.denom().clone())
    }

    /// Builds `Σ c_k ζ^k` from rational coefficients of any length.
    pub fn from_coeffs(field: &CyclotomicField, coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Self::from_parts(field, num, den)
    }

    /// `ζ^k` for any integer exponent.
    pub fn zeta_pow(field: &CyclotomicField, k: i64) -> Self {
        let j = k.rem_euclid(i64::from(field.q())) as usize;
        Cyclotomic { field: field.clone(), num: field.0.powers[j].clone(), den: BigInt::one() }
    }

    /// The generator `ζ` itself.
    pub fn zeta(field: &CyclotomicField) -> Self {
        Self::zeta_pow(field, 1)
    }

    /// `Σ_j r_j ζ^j` where `residues[j]` collects everything with exponent `≡ j (mod q)`.
    pub fn from_residues(field: &CyclotomicField, residues: &[BigInt]) -> Self {
        let q = field.q() as usize;
        let mut num = vec![BigInt::zero(); field.degree()];
        for (j, r) in residues.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            for (acc, pj) in num.iter_mut().zip(&field.0.powers[j % q]) {
                if !pj.is_zero() {
                    *acc += r * pj;
                }
            }
        }
        Cyclotomic { field: field.clone(), num, den: BigInt::one() }
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn flux(&self) -> FluxContext {
        self.field.flux()
    }

    /// Power-basis coefficients as exact rationals (length `φ(q)`).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// True when every power-basis coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// `Some(r)` when the element is the rational number `r`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.field.flux().to_string(),
                right: other.field.flux().to_string(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    fn add_unchecked(&self, other: &Self, negate: bool) -> Self {
        let combine = |a: &BigInt, b: &BigInt| if negate { a - b } else { a + b };
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| combine(a, b)).collect();
            let mut out = Cyclotomic { field: self.field.clone(), num, den: self.den.clone() };
            out.normalize();
            return out;
        }
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let num = self.num.iter().zip(&other.num).map(|(a, b)| combine(&(a * &fa), &(b * &fb))).collect();
        let mut out = Cyclotomic { field: self.field.clone(), num, den };
        out.normalize();
        out
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.field.degree();
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce_in_place(&mut prod, self.field.modulus());
        let mut out = Cyclotomic { field: self.field.clone(), num: prod, den: &self.den * &other.den };
        out.normalize();
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * factor.numer()).collect();
        Self::from_parts(&self.field, num, &self.den * factor.denom())
    }

    pub fn scale_int(&self, factor: &BigInt) -> Self {
        let num = self.num.iter().map(|c| c * factor).collect();
        Self::from_parts(&self.field, num, self.den.clone())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]` modulo `Φ_q`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let to_q = |v: &[BigInt]| -> Vec<BigRational> { v.iter().map(|c| BigRational::from_integer(c.clone())).collect() };
        let mut r0 = to_q(self.field.modulus());
        let mut r1 = trim_q(to_q(&self.num));
        let mut s0: Vec<BigRational> = Vec::new();
        let mut s1 = vec![<BigRational as One>::one()];
        while !r1.is_empty() {
            let (quot, rem) = divmod_q(&r0, &r1);
            let next_s = sub_q(&s0, &mul_q(&quot, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, next_s);
        }
        // r0 is a nonzero constant because Φ_q is irreducible.
        let g = r0[0].clone();
        let inv: Vec<BigRational> = s0.iter().map(|c| c / &g).collect();
        // self.num/den inverted: multiply by den.
        let field = &self.field;
        let base = Self::from_coeffs(field, &inv);
        Ok(base.scale_int(&self.den))
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conjugate(&self) -> Self {
        let q = i64::from(self.field.q());
        let mut acc = vec![BigInt::zero(); self.field.degree()];
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = (q - k as i64).rem_euclid(q) as usize;
            for (a, pj) in acc.iter_mut().zip(&self.field.0.powers[j]) {
                if !pj.is_zero() {
                    *a += c * pj;
                }
            }
        }
        Self::from_parts(&self.field, acc, self.den.clone())
    }

    pub fn is_real(&self) -> bool {
        *self == self.conjugate()
    }

    /// Numerical value at `ζ = e^{2πi p/q}`.
    ///
    /// Up to 15 digits a compensated `f64` sum is used; above that the sum
    /// is formed in big-integer fixed point and rounded once at the end,
    /// which protects against cancellation between large coefficients.
    pub fn to_complex(&self, precision: u32) -> Complex64 {
        if precision <= 15 {
            self.to_complex_f64()
        } else {
            self.to_complex_fixed(precision)
        }
    }

    /// Shorthand for the real part at default precision.
    pub fn to_f64(&self) -> f64 {
        self.to_complex(15).re
    }

    fn to_complex_f64(&self) -> Complex64 {
        let q = u64::from(self.field.q());
        let p = u64::from(self.field.flux().p);
        let (mut re, mut re_c) = (0.0f64, 0.0f64);
        let (mut im, mut im_c) = (0.0f64, 0.0f64);
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let value = if self.den.is_one() {
                c.to_f64().unwrap_or(f64::NAN)
            } else {
                BigRational::new(c.clone(), self.den.clone()).to_f64().unwrap_or(f64::NAN)
            };
            let angle = 2.0 * PI * ((k as u64 * p) % q) as f64 / q as f64;
            neumaier(&mut re, &mut re_c, value * angle.cos());
            neumaier(&mut im, &mut im_c, value * angle.sin());
        }
        Complex64::new(re + re_c, im + im_c)
    }

    fn to_complex_fixed(&self, precision: u32) -> Complex64 {
        let bits = (f64::from(precision) * std::f64::consts::LOG2_10).ceil() as u64 + 64;
        let q = u64::from(self.field.q());
        let p = u64::from(self.field.flux().p);
        let pi = fixed_pi(bits);
        let mut re = BigInt::zero();
        let mut im = BigInt::zero();
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (cos, sin) = fixed_cos_sin(((k as u64 * p) % q) as i64, q as i64, &pi, bits);
            re += c * cos;
            im += c * sin;
        }
        let scale = &self.den << bits;
        Complex64::new(
            BigRational::new(re, scale.clone()).to_f64().unwrap_or(f64::NAN),
            BigRational::new(im, scale).to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Mirrors `ζ` to the flux `p'/q` with the same `q` without touching coefficients.
    pub fn with_flux(&self, field: &CyclotomicField) -> Result<Self> {
        if field.q() != self.field.q() {
            return Err(Error::ContextMismatch {
                left: self.field.flux().to_string(),
                right: field.flux().to_string(),
            });
        }
        Ok(Cyclotomic { field: field.clone(), num: self.num.clone(), den: self.den.clone() })
    }
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// `π · 2^bits` via Machin's formula.
fn fixed_pi(bits: u64) -> BigInt {
    let guard = 16;
    let one = BigInt::one() << (bits + guard);
    let atan_inv = |x: u64| -> BigInt {
        let x2 = BigInt::from(x * x);
        let mut term = &one / x;
        let mut sum = term.clone();
        let mut n = 1u64;
        loop {
            term /= &x2;
            if term.is_zero() {
                break;
            }
            let t = &term / (2 * n + 1);
            if n % 2 == 1 {
                sum -= t;
            } else {
                sum += t;
            }
            n += 1;
        }
        sum
    };
    (atan_inv(5) * 16 - atan_inv(239) * 4) >> guard
}

/// `(cos, sin)` of `2π·num/den`, scaled by `2^bits`.
fn fixed_cos_sin(num: i64, den: i64, pi: &BigInt, bits: u64) -> (BigInt, BigInt) {
    // Reduce to (-π, π].
    let mut n = num.rem_euclid(den);
    if 2 * n > den {
        n -= den;
    }
    let theta = (pi * (2 * n)) / den;
    let mut cos = BigInt::one() << bits;
    let mut sin = BigInt::zero();
    let mut term = cos.clone();
    let mut k = 1u64;
    loop {
        term = (&term * &theta) >> bits;
        term /= k;
        if term.is_zero() {
            break;
        }
        match k % 4 {
            0 => cos += &term,
            1 => sin += &term,
            2 => cos -= &term,
            _ => sin -= &term,
        }
        k += 1;
    }
    (cos, sin)
}

fn trim_q(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn sub_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(<BigRational as Zero>::zero);
            let y = b.get(i).cloned().unwrap_or_else(<BigRational as Zero>::zero);
            x - y
        })
        .collect();
    trim_q(out)
}

fn mul_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![<BigRational as Zero>::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_q(out)
}

fn divmod_q(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return (Vec::new(), trim_q(rem));
    }
    let lead_inv = b.last().expect("nonzero divisor").recip();
    let mut quot = vec![<BigRational as Zero>::zero(); a.len() - b.len() + 1];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + b.len() - 1] * &lead_inv;
        if Zero::is_zero(&c) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    rem.truncate(b.len() - 1);
    (trim_q(quot), trim_q(rem))
}

impl Ring for Cyclotomic {
    type Ctx = CyclotomicField;

    fn ctx(&self) -> CyclotomicField {
        self.field.clone()
    }
    fn zero(ctx: &CyclotomicField) -> Self {
        Cyclotomic::zero(ctx)
    }
    fn one(ctx: &CyclotomicField) -> Self {
        Cyclotomic::one(ctx)
    }
    fn from_int(ctx: &CyclotomicField, n: i64) -> Self {
        Cyclotomic::from_integer(ctx, BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("cyclotomic context mismatch")
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).expect("cyclotomic context mismatch")
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("cyclotomic context mismatch")
    }
    fn neg(&self) -> Self {
        Cyclotomic { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
    fn mul_int(&self, n: i64) -> Self {
        self.scale_int(&BigInt::from(n))
    }
}

impl Field for Cyclotomic {
    fn inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn from_rational(ctx: &CyclotomicField, r: &BigRational) -> Self {
        Cyclotomic::from_rational(ctx, r)
    }
}

impl ExactDiv for Cyclotomic {
    fn exact_div(&self, divisor: &Self) -> Option<Self> {
        self.try_div(divisor).ok()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait<&Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                Ring::$inner(self, rhs)
            }
        }
        impl std::ops::$trait<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                Ring::$inner(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                Ring::$inner(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Ring::neg(&self)
    }
}

impl std::ops::Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Ring::neg(self)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = BigRational::new(c.clone(), self.den.clone());
            let neg = r.is_negative();
            let mag = r.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !One::is_one(&mag) {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "ζ")?;
                    } else {
                        write!(f, "ζ^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.field.flux(), self)
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicJson {
    q: u32,
    p: u32,
    coeffs: Vec<String>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let flux = self.field.flux();
        CyclotomicJson {
            q: flux.q,
            p: flux.p,
            coeffs: self.coeffs().iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CyclotomicJson::deserialize(deserializer)?;
        let flux = FluxContext::new(raw.p, raw.q).map_err(D::Error::custom)?;
        let coeffs = raw.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        Ok(Cyclotomic::from_coeffs(&CyclotomicField::new(flux), &coeffs))
    }
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.sign() == Sign::NoSign {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32, q: u32) -> CyclotomicField {
        CyclotomicField::new(FluxContext::new(p, q).unwrap())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(8), ints(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(5), ints(&[1, 1, 1, 1, 1]));
        // Φ_105 is the first with a coefficient of magnitude 2.
        assert!(cyclotomic_polynomial(105).iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn flux_validation() {
        assert!(FluxContext::new(0, 1).is_ok());
        assert!(FluxContext::new(1, 1).is_err());
        assert!(FluxContext::new(2, 4).is_err());
        assert!(FluxContext::new(0, 4).is_err());
        assert!(FluxContext::new(4, 4).is_err());
        assert!(FluxContext::new(3, 8).is_ok());
        assert_eq!(FluxContext::all_up_to(4).len(), 1 + 1 + 2 + 2);
    }

    #[test]
    fn zeta_times_zeta_inverse() {
        for q in 1..=12 {
            let f = field(if q == 1 { 0 } else { 1 }, q);
            let z = Cyclotomic::zeta(&f);
            let zi = Cyclotomic::zeta_pow(&f, i64::from(q) - 1);
            assert!(Ring::is_one(&(&z * &zi)));
            assert_eq!(z.conjugate(), zi);
            assert!(Ring::is_one(&Ring::pow(&z, q)));
        }
    }

    #[test]
    fn sqrt_two_in_q8() {
        let f = field(1, 8);
        let s = Cyclotomic::zeta(&f) + Cyclotomic::zeta_pow(&f, -1);
        assert!(s.is_real());
        assert_eq!(&s * &s, Cyclotomic::from_integer(&f, BigInt::from(2)));
        let v = s.to_complex(15);
        assert!((v.re - 2f64.sqrt()).abs() < 1e-14 && v.im.abs() < 1e-14);
    }

    #[test]
    fn to_complex_examples() {
        let f = field(1, 4);
        let i = Cyclotomic::zeta(&f).to_complex(15);
        assert!((i.re).abs() < 1e-13 && (i.im - 1.0).abs() < 1e-13);
        assert_eq!(Cyclotomic::one(&f).to_complex(15), Complex64::new(1.0, 0.0));

        let f8 = field(1, 8);
        let s = Cyclotomic::zeta(&f8) + Cyclotomic::zeta_pow(&f8, -1);
        let x = Cyclotomic::from_integer(&f8, BigInt::from(72)) - s.scale_int(&BigInt::from(8));
        let expected = 72.0 - 8.0 * 2f64.sqrt();
        assert!((x.to_complex(15).re - expected).abs() < 1e-10);
        assert!((x.to_complex(40).re - expected).abs() < 1e-12);
        assert!(x.to_complex(40).im.abs() < 1e-30);
    }

    #[test]
    fn high_precision_handles_cancellation() {
        // (10^30 + 1) + 10^30 (ζ + ζ^{-1}) = 1 at q = 3.
        let f = field(1, 3);
        let big = BigInt::from(10).pow(30);
        let c = Cyclotomic::zeta(&f) + Cyclotomic::zeta_pow(&f, -1); // = -1
        let x = Cyclotomic::from_integer(&f, &big + 1) + c.scale_int(&big);
        assert_eq!(x.as_rational(), Some(<BigRational as num_traits::One>::one()));
        assert!((x.to_complex(40).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_character_sums() {
        for q in 2..=10u32 {
            for p in (1..q).filter(|p| p.gcd(&q) == 1) {
                let f = field(p, q);
                for j in 0..q as i64 {
                    let sum = (0..q as i64)
                        .map(|k| Cyclotomic::zeta_pow(&f, j * k))
                        .fold(Cyclotomic::zero(&f), |a, b| a + b);
                    let expected = if j == 0 { i64::from(q) } else { 0 };
                    assert_eq!(sum, Cyclotomic::from_integer(&f, BigInt::from(expected)));
                }
                let powers: Vec<_> = (0..q as i64).map(|k| Cyclotomic::zeta_pow(&f, k)).collect();
                for a in 0..powers.len() {
                    for b in a + 1..powers.len() {
                        assert_ne!(powers[a], powers[b]);
                    }
                }
            }
        }
    }

    #[test]
    fn division_errors() {
        let f = field(1, 5);
        assert_eq!(Cyclotomic::zero(&f).inverse(), Err(Error::DivisionByZero));
        let g = field(2, 5);
        let err = Cyclotomic::one(&f).try_add(&Cyclotomic::one(&g)).unwrap_err();
        assert!(matches!(err, Error::ContextMismatch { .. }));
    }

    #[test]
    fn json_round_trip() {
        let f = field(1, 8);
        let s = Cyclotomic::zeta(&f) - Cyclotomic::zeta_pow(&f, 3).scale(&BigRational::new(3.into(), 7.into()));
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"q":8,"p":1,"coeffs":["0/1","1/1","0/1","-3/7"]}"#);
        let back: Cyclotomic = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let loose: Cyclotomic = serde_json::from_str(r#"{"q":8,"p":1,"coeffs":["2"]}"#).unwrap();
        assert_eq!(loose, Cyclotomic::from_integer(&f, BigInt::from(2)));
        assert!(serde_json::from_str::<Cyclotomic>(r#"{"q":8,"p":2,"coeffs":["2"]}"#).is_err());
    }
}
