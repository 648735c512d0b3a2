//! The band polynomial `b(z)` and its Kreft coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::cyclo::{Cyclotomic, CyclotomicField, FluxContext};
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::series::{LaurentPoly, Matrix, Poly};

type CPoly = Poly<Cyclotomic>;

/// `b(z) = -Σ a(2i) z^{2i}` together with its Kreft coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPolynomial {
    ctx: FluxContext,
    b: CPoly,
    a: Vec<Cyclotomic>,
}

impl BandPolynomial {
    /// Builds from `b`, checking parity, degree, constant term and realness.
    pub fn from_poly(ctx: FluxContext, b: CPoly) -> Result<Self> {
        let half = (ctx.q() / 2) as usize;
        if b.degree() != Some(2 * half) {
            return Err(Error::Invariant(format!("b_{ctx} has degree {:?}, expected {}", b.degree(), 2 * half)));
        }
        if !b.is_even() {
            return Err(Error::Invariant(format!("b_{ctx} has odd-degree terms")));
        }
        if !b.coeff(0).is_one() {
            return Err(Error::Invariant(format!("b_{ctx} has constant term {}", b.coeff(0))));
        }
        if let Some(c) = b.coeffs().iter().find(|c| !c.is_real()) {
            return Err(Error::Invariant(format!("b_{ctx} has non-real coefficient {c}")));
        }
        let a = (0..=half).map(|i| b.coeff(2 * i).neg()).collect();
        Ok(BandPolynomial { ctx, b, a })
    }

    /// Builds from `a(0), a(2), ..., a(2⌊q/2⌋)`.
    pub fn from_kreft(ctx: FluxContext, a: &[Cyclotomic]) -> Result<Self> {
        let field = CyclotomicField::new(ctx);
        let mut coeffs = vec![Cyclotomic::zero(&field); 2 * a.len().max(1) - 1];
        for (i, ai) in a.iter().enumerate() {
            coeffs[2 * i] = ai.neg();
        }
        Self::from_poly(ctx, Poly::new(&field, coeffs))
    }

    pub fn ctx(&self) -> FluxContext {
        self.ctx
    }

    pub fn field(&self) -> &CyclotomicField {
        self.b.context()
    }

    pub fn b(&self) -> &CPoly {
        &self.b
    }

    /// Kreft coefficients `a(2i)` for `i = 0..=⌊q/2⌋`.
    pub fn kreft(&self) -> &[Cyclotomic] {
        &self.a
    }

    /// Coefficients of `b` as floats, index = degree.
    pub fn float_coeffs(&self) -> Vec<f64> {
        self.b.coeffs().iter().map(|c| c.to_complex(30).re).collect()
    }

    /// Coefficients of `P(E) = E^q b(1/E)`, index = degree in `E`.
    pub fn secular_float_coeffs(&self) -> Vec<f64> {
        let q = self.ctx.q() as usize;
        let b = self.float_coeffs();
        (0..=q).map(|j| b.get(q - j).copied().unwrap_or(0.0)).collect()
    }

    /// `b(z) - (z/q) b'(z)`.
    pub fn numerator(&self) -> CPoly {
        let q = BigRational::from_integer(BigInt::from(self.ctx.q()));
        let inv_q = Cyclotomic::from_rational(self.field(), &q.recip());
        self.b.sub(&self.b.derivative().shift(1).scale(&inv_q))
    }
}

impl Serialize for BandPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("BandPolynomial", 4)?;
        s.serialize_field("p", &self.ctx.p())?;
        s.serialize_field("q", &self.ctx.q())?;
        s.serialize_field("b", self.b.coeffs())?;
        s.serialize_field("a", &self.a)?;
        s.end()
    }
}

fn two_cos(field: &CyclotomicField, k: i64) -> Cyclotomic {
    Cyclotomic::zeta_pow(field, k) + Cyclotomic::zeta_pow(field, -k)
}

/// Adds `v` into `(k, k±1 mod q)`, so neighbours and corners coincide for small q.
fn add_cyclic_neighbours<R: Ring>(m: &mut Matrix<R>, upper: &R, lower: &R) {
    let q = m.dim();
    for k in 0..q {
        m.add_at(k, (k + 1) % q, upper);
        m.add_at((k + 1) % q, k, lower);
    }
}

/// `Δ(z,z,z,z) + 4z^q` from the q×q walk matrix.
pub fn band_poly_via_determinant(ctx: FluxContext) -> Result<BandPolynomial> {
    let field = CyclotomicField::new(ctx);
    let q = ctx.q() as usize;
    let z = Poly::variable(&field);
    let mut m = Matrix::from_fn(&field, q, |i, j| {
        if i == j {
            CPoly::one(&field).sub(&z.scale(&two_cos(&field, i as i64)))
        } else {
            CPoly::zero(&field)
        }
    });
    add_cyclic_neighbours(&mut m, &z.neg(), &z.neg());
    let delta = m.det_bareiss();
    if q % 2 == 1 && delta.coeff(q) != Cyclotomic::from_integer(&field, BigInt::from(-4)) {
        return Err(Error::Invariant(format!("z^{q} coefficient of Δ is {}, expected -4", delta.coeff(q))));
    }
    let four_zq = Poly::monomial(Cyclotomic::from_integer(&field, BigInt::from(4)), q);
    BandPolynomial::from_poly(ctx, delta.add(&four_zq))
}

/// `a(0), a(2), ..., a(2⌊q/2⌋)` from the nested sums of `4 sin²` factors.
pub fn kreft_via_nested_sums(ctx: FluxContext) -> Vec<Cyclotomic> {
    let field = CyclotomicField::new(ctx);
    let q = ctx.q() as i64;
    let four_sin2 = |m: i64| Cyclotomic::from_integer(&field, BigInt::from(2)) - two_cos(&field, m);
    let mut out = vec![Cyclotomic::from_integer(&field, BigInt::from(-1))];
    for i in 1..=q / 2 {
        let top = (q - 2 * i) as usize;
        // inner[k] = nested sum over the factors j+1..=i with the j-th index fixed at k.
        let mut inner = vec![Cyclotomic::one(&field); top + 1];
        for j in (1..=i).rev() {
            let offset = 2 * i - 2 * j + 1;
            let mut running = Cyclotomic::zero(&field);
            let mut next = Vec::with_capacity(top + 1);
            for (k, tail) in inner.iter().enumerate() {
                running = running + four_sin2(k as i64 + offset) * tail;
                next.push(running.clone());
            }
            inner = next;
        }
        let total = inner[top].clone();
        out.push(if i % 2 == 1 { total } else { total.neg() });
    }
    out
}

/// Harmonic `(j, numerators of a polynomial in q, denominator)`: contributes
/// `(Σ c_e q^e)/d · cos(2πjp/q)`, with `j = 0` the constant part.
type Harmonic = (i64, &'static [i64], i64);

const KREFT_CLOSED_FORMS: [&[Harmonic]; 5] = [
    &[(0, &[0, 2], 1)],
    &[(0, &[0, 7, -2], 1), (1, &[0, 2], 1)],
    &[(0, &[0, 116, -42, 4], 3), (1, &[0, 24, -4], 1), (2, &[0, 4], 1)],
    &[
        (0, &[0, 1617, -617, 84, -4], 6),
        (1, &[0, 252, -62, 4], 1),
        (2, &[0, 77, -9], 1),
        (3, &[0, 12], 1),
        (4, &[0, 2], 1),
    ],
    &[
        (0, &[0, 32916, -12505, 1925, -140, 4], 15),
        (1, &[0, 7896, -2260, 228, -8], 3),
        (2, &[0, 1108, -206, 10], 1),
        (3, &[0, 312, -28], 1),
        (4, &[0, 84, -4], 1),
        (5, &[0, 16], 1),
        (6, &[0, 4], 1),
    ],
];

/// Closed-form trigonometric expression for `a(2i)`, `1 <= i <= 5`.
pub fn kreft_closed_form(ctx: FluxContext, i: usize) -> Option<Cyclotomic> {
    let terms = KREFT_CLOSED_FORMS.get(i.checked_sub(1)?)?;
    let field = CyclotomicField::new(ctx);
    let q = BigInt::from(ctx.q());
    let mut acc = Cyclotomic::zero(&field);
    for &(j, poly, den) in terms.iter() {
        let value = poly.iter().rev().fold(BigInt::from(0), |acc, &c| acc * &q + c);
        let r = BigRational::new(value, BigInt::from(den));
        let trig = if j == 0 {
            Cyclotomic::one(&field)
        } else {
            two_cos(&field, j).scale(&BigRational::new(1.into(), 2.into()))
        };
        acc = acc + trig.scale(&r);
    }
    Some(acc)
}

/// `det m(E, 0, 0)` as a polynomial in `E`.
pub fn secular_polynomial(ctx: FluxContext) -> CPoly {
    let field = CyclotomicField::new(ctx);
    let q = ctx.q() as usize;
    let e = Poly::variable(&field);
    let mut m = Matrix::from_fn(&field, q, |i, j| {
        if i == j {
            Poly::constant(two_cos(&field, i as i64)).sub(&e)
        } else {
            CPoly::zero(&field)
        }
    });
    let one = CPoly::one(&field);
    add_cyclic_neighbours(&mut m, &one, &one);
    m.det_bareiss()
}

/// Recovers `b` from the secular polynomial via `E^q b(1/E) = (-1)^q det m(E,0,0) + 4`.
pub fn band_poly_from_secular(ctx: FluxContext) -> Result<BandPolynomial> {
    let det = secular_polynomial(ctx);
    let field = det.context().clone();
    let q = ctx.q() as usize;
    let signed = if q.is_multiple_of(2) { det } else { det.neg() };
    let p = signed.add(&CPoly::from_int(&field, 4));
    BandPolynomial::from_poly(ctx, p.reversed(q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumeratorReport {
    pub ctx: FluxContext,
    /// `[x⁰y⁰]` of the numerator determinant.
    pub extracted: CPoly,
    /// `b - (z/q) b'`.
    pub expected: CPoly,
    pub holds: bool,
}

type Trivariate = LaurentPoly<LaurentPoly<CPoly>>;

fn xyz_term(c: CPoly, ex: i64, ey: i64) -> Trivariate {
    LaurentPoly::monomial(LaurentPoly::monomial(c, ey), ex)
}

/// Cramer numerator for `A_0` with `x1 = zx, x2 = z/x, y1 = zy, y2 = z/y`,
/// expanded exactly and reduced to its `x⁰y⁰` coefficient.
pub fn numerator_identity_check(ctx: FluxContext) -> Result<NumeratorReport> {
    let field = CyclotomicField::new(ctx);
    let q = ctx.q() as usize;
    let z = Poly::variable(&field);
    let neg_z = z.neg();
    let mut m = Matrix::from_fn(&field, q, |i, j| {
        if i == j {
            let zeta_k = Cyclotomic::zeta_pow(&field, i as i64);
            let zeta_mk = Cyclotomic::zeta_pow(&field, -(i as i64));
            xyz_term(CPoly::one(&field), 0, 0)
                .add(&xyz_term(neg_z.scale(&zeta_k), 0, 1))
                .add(&xyz_term(neg_z.scale(&zeta_mk), 0, -1))
        } else {
            Trivariate::zero(&field)
        }
    });
    add_cyclic_neighbours(&mut m, &xyz_term(neg_z.clone(), -1, 0), &xyz_term(neg_z.clone(), 1, 0));
    for i in 0..q {
        m.set(i, 0, Trivariate::one(&field));
    }
    let det = m.det_cofactor();
    let extracted = det.coeff(0).coeff(0);
    let expected = band_poly_via_determinant(ctx)?.numerator();
    let holds = extracted == expected;
    Ok(NumeratorReport { ctx, extracted, expected, holds })
}
