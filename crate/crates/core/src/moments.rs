//! Exact closed-walk counts `Z_n(ζ) = Tr H^n` by several independent routes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::f64::consts::PI;

use crate::asympt;
use crate::combinat::{central_binomial, multinomial};
use crate::cyclo::{Cyclotomic, CyclotomicField, FluxContext};
use crate::error::{Error, Result};
use crate::hofstadter::DensityOfStates;
use crate::numeric::{derivative_real, elliptic_k, eval_real};
use crate::ring::Ring;
use crate::series::{Poly, TruncatedSeries};
use crate::spectrum::{band_poly_via_determinant, BandPolynomial};
use crate::walks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Series,
    SumFormula,
    Dp,
    Enumeration,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Route::Series => "series",
            Route::SumFormula => "sum",
            Route::Dp => "dp",
            Route::Enumeration => "enum",
        };
        f.write_str(s)
    }
}

/// `Z_0 .. Z_N` for one flux, each tagged with the route that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    ctx: FluxContext,
    values: Vec<Cyclotomic>,
    routes: Vec<Route>,
}

impl MomentTable {
    pub fn new(ctx: FluxContext, values: Vec<Cyclotomic>, routes: Vec<Route>) -> Result<Self> {
        if values.len() != routes.len() {
            return Err(Error::InvalidArgument("one route tag per value is required".into()));
        }
        let table = MomentTable { ctx, values, routes };
        table.check_invariants()?;
        Ok(table)
    }

    pub fn ctx(&self) -> FluxContext {
        self.ctx
    }

    /// Largest `n` in the table.
    pub fn max_n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Cyclotomic] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<&Cyclotomic> {
        self.values.get(n)
    }

    pub fn route(&self, n: usize) -> Option<Route> {
        self.routes.get(n).copied()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_complex(30).re).collect()
    }

    fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(format!("{}: {msg}", self.ctx)));
        for (n, v) in self.values.iter().enumerate() {
            if n % 2 == 1 && !v.is_zero() {
                return fail(format!("Z_{n} = {v} should vanish"));
            }
            if !v.is_real() {
                return fail(format!("Z_{n} = {v} is not real"));
            }
            if !v.is_integral() {
                return fail(format!("Z_{n} = {v} has a denominator"));
            }
        }
        if self.values.first().is_some_and(|v| !v.is_one()) {
            return fail("Z_0 != 1".into());
        }
        let four = Cyclotomic::from_integer(self.values[0].field(), BigInt::from(4));
        if self.values.get(2).is_some_and(|v| *v != four) {
            return fail("Z_2 != 4".into());
        }
        Ok(())
    }
}

/// Coefficients of `(1 - z b'/(q b)) Σ_k C(2k,k)² (z^q/b)^{2k}` up to `z^N`.
pub fn moments_by_series(ctx: FluxContext, max_n: usize) -> Result<MomentTable> {
    let band = band_poly_via_determinant(ctx)?;
    moments_by_series_from(&band, max_n)
}

pub fn moments_by_series_from(band: &BandPolynomial, max_n: usize) -> Result<MomentTable> {
    let ctx = band.ctx();
    let field = band.field();
    let q = ctx.q() as usize;
    let b = TruncatedSeries::from_poly(band.b(), max_n);
    let prefactor = TruncatedSeries::from_poly(&band.numerator(), max_n).div(&b)?;
    let zq = TruncatedSeries::from_poly(&Poly::monomial(Cyclotomic::one(field), q), max_n);
    let w = zq.div(&b)?;
    let w2 = w.mul(&w);
    let k_max = max_n / (2 * q);
    let coeff = |k: usize| Cyclotomic::from_integer(field, central_binomial(k as u64).pow(2));
    let mut sum = TruncatedSeries::new(field, vec![coeff(k_max)], max_n);
    for k in (0..k_max).rev() {
        sum = sum.mul(&w2).add(&TruncatedSeries::new(field, vec![coeff(k)], max_n));
    }
    let f = prefactor.mul(&sum);
    MomentTable::new(ctx, f.coeffs().to_vec(), vec![Route::Series; max_n + 1])
}

/// Explicit finite sum over `k` and weighted partitions `ℓ` with `Σ j ℓ_j = n/2 - kq`.
pub fn moments_by_sum_formula(ctx: FluxContext, n: usize) -> Result<Cyclotomic> {
    let band = band_poly_via_determinant(ctx)?;
    moments_by_sum_formula_from(&band, n)
}

pub fn moments_by_sum_formula_from(band: &BandPolynomial, n: usize) -> Result<Cyclotomic> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidLength(n));
    }
    let ctx = band.ctx();
    let field = band.field().clone();
    let q = ctx.q() as usize;
    let half = q / 2;
    let a = &band.kreft()[1..];
    let mut total = Cyclotomic::zero(&field);
    let mut k = 0;
    while k * q <= n / 2 {
        let target = n / 2 - k * q;
        let weight = central_binomial(k as u64).pow(2);
        let mut parts = vec![0u64; half];
        let mut acc = Cyclotomic::zero(&field);
        partitions(half, target, &mut parts, &mut |ell| {
            let size: u64 = ell.iter().sum::<u64>() + 2 * k as u64;
            let mut lower = ell.to_vec();
            lower.push(2 * k as u64);
            let r = BigRational::new(multinomial(&lower), BigInt::from(size));
            let mut term = Cyclotomic::from_rational(&field, &r);
            for (aj, &lj) in a.iter().zip(ell) {
                if lj > 0 {
                    term = term.mul(&Ring::pow(aj, lj as u32));
                }
            }
            acc = acc.add(&term);
        });
        total = total.add(&acc.scale_int(&weight));
        k += 1;
    }
    Ok(total.scale(&BigRational::new(BigInt::from(n), BigInt::from(q))))
}

/// Calls `visit` for every `ℓ` in `N^len` with `Σ_{j=1}^{len} j ℓ_j = target`.
fn partitions(len: usize, target: usize, parts: &mut [u64], visit: &mut impl FnMut(&[u64])) {
    fn rec(j: usize, remaining: usize, parts: &mut [u64], visit: &mut impl FnMut(&[u64])) {
        if j == 1 {
            parts[0] = remaining as u64;
            visit(parts);
            return;
        }
        for l in 0..=remaining / j {
            parts[j - 1] = l as u64;
            rec(j - 1, remaining - l * j, parts, visit);
        }
        parts[j - 1] = 0;
    }
    if len == 0 {
        if target == 0 {
            visit(parts);
        }
        return;
    }
    rec(len, target, parts, visit);
}

/// Sum-formula values for `n = 0..=N`, with `Z_0 = 1` and odd entries zero.
pub fn moments_table_by_sum_formula(ctx: FluxContext, max_n: usize) -> Result<MomentTable> {
    let band = band_poly_via_determinant(ctx)?;
    let field = band.field().clone();
    let values = (0..=max_n)
        .map(|n| match n {
            0 => Ok(Cyclotomic::one(&field)),
            _ if n % 2 == 1 => Ok(Cyclotomic::zero(&field)),
            _ => moments_by_sum_formula_from(&band, n),
        })
        .collect::<Result<Vec<_>>>()?;
    MomentTable::new(ctx, values, vec![Route::SumFormula; max_n + 1])
}

/// Walk-counting values for `n = 0..=N`.
pub fn moments_table_by_dp(ctx: FluxContext, max_n: usize) -> Result<MomentTable> {
    let field = CyclotomicField::new(ctx);
    let values = (0..=max_n)
        .map(|n| if n % 2 == 1 { Ok(Cyclotomic::zero(&field)) } else { walks::closed_zn_dp(n, ctx) })
        .collect::<Result<Vec<_>>>()?;
    MomentTable::new(ctx, values, vec![Route::Dp; max_n + 1])
}

/// `(shift, [c2, c1, c0])`: the term `(c2 n² + c1 n + c0) Z_{n - shift}`.
const Q4_RECURRENCE: [(usize, [i64; 3]); 7] = [
    (14, [4096, -98304, 589824]),
    (12, [-14848, 316416, -1691648]),
    (10, [17920, -323840, 1469440]),
    (8, [-9696, 138368, -493568]),
    (6, [2720, -28320, 74112]),
    (4, [-412, 2768, -4800]),
    (2, [32, -104, 96]),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub checked: Vec<usize>,
    pub first_failure: Option<usize>,
}

impl RecurrenceReport {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks the seven-term recurrence for `Z_n(±i)` at every even `2 <= n <= N`.
pub fn recurrence_check_q4(table: &MomentTable) -> Result<RecurrenceReport> {
    if table.ctx().q() != 4 {
        return Err(Error::InvalidArgument(format!("recurrence is for q = 4, got {}", table.ctx())));
    }
    let field = table.values()[0].field().clone();
    let mut checked = Vec::new();
    let mut first_failure = None;
    for n in (2..=table.max_n()).step_by(2) {
        let ni = n as i64;
        let lhs = table.values()[n].scale_int(&BigInt::from(ni * ni));
        let mut rhs = Cyclotomic::zero(&field);
        for (shift, [c2, c1, c0]) in Q4_RECURRENCE {
            if shift <= n {
                let c = BigInt::from(c2 * ni * ni + c1 * ni + c0);
                if !c.is_zero() {
                    rhs = rhs + table.values()[n - shift].scale_int(&c);
                }
            }
        }
        checked.push(n);
        if lhs != rhs && first_failure.is_none() {
            first_failure = Some(n);
        }
    }
    Ok(RecurrenceReport { checked, first_failure })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratingIdentityReport {
    pub z0: f64,
    /// `∫ ρ(E) / (1 - z0 E) dE` by quadrature.
    pub lhs: f64,
    /// `P(z0) (2/π) K(16 z0^{2q} / b(z0)²)`.
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
}

impl GeneratingIdentityReport {
    pub fn holds(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Compares the resolvent of the density of states with the closed form of the moment series.
pub fn dos_generating_identity_check(ctx: FluxContext, z0: &BigRational, tolerance: f64) -> Result<GeneratingIdentityReport> {
    let band = band_poly_via_determinant(ctx)?;
    let z = z0.to_f64().ok_or_else(|| Error::InvalidArgument(format!("z0 = {z0} is not representable")))?;
    let radius = asympt::dominant_singularities_of(&band)?.modulus;
    if z.abs() >= radius {
        return Err(Error::OutsideRadius { z0: z, radius });
    }
    let q = f64::from(ctx.q());
    let b = band.float_coeffs();
    let b_z = eval_real(&b, z);
    let prefactor = 1.0 - z * eval_real(&derivative_real(&b), z) / (q * b_z);
    let rhs = prefactor * 2.0 / PI * elliptic_k(16.0 * z.powf(2.0 * q) / (b_z * b_z));
    let lhs = DensityOfStates::from_band(&band).integrate(|e| 1.0 / (1.0 - z * e));
    Ok(GeneratingIdentityReport { z0: z, lhs, rhs, residual: (lhs - rhs).abs(), tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::binomial;
    use proptest::prelude::*;

    fn flux(p: u32, q: u32) -> FluxContext {
        FluxContext::new(p, q).unwrap()
    }

    fn int(field: &CyclotomicField, n: i64) -> Cyclotomic {
        Cyclotomic::from_integer(field, BigInt::from(n))
    }

    #[test]
    fn one_eighth_series() {
        let table = moments_by_series(flux(1, 8), 8).unwrap();
        let f = table.values()[0].field().clone();
        let sqrt2 = Cyclotomic::zeta(&f) + Cyclotomic::zeta_pow(&f, -1);
        let lin = |a: i64, b: i64| int(&f, a) + sqrt2.scale_int(&BigInt::from(b));
        let expected = [lin(1, 0), lin(0, 0), lin(4, 0), lin(0, 0), lin(28, 4), lin(0, 0), lin(232, 72), lin(0, 0), lin(2140, 960)];
        assert_eq!(table.values(), expected);
        assert_eq!(moments_by_sum_formula(flux(1, 8), 8).unwrap(), lin(2140, 960));
    }

    #[test]
    fn trivial_flux_is_squared_central_binomial() {
        let table = moments_by_series(FluxContext::trivial(), 20).unwrap();
        let f = table.values()[0].field().clone();
        for n in (0..=20).step_by(2) {
            assert_eq!(table.values()[n], Cyclotomic::from_integer(&f, binomial(n as u64, n as u64 / 2).pow(2)));
        }
    }

    #[test]
    fn small_q_closed_forms() {
        let f2 = CyclotomicField::new(flux(1, 2));
        let series = moments_by_series(flux(1, 2), 24).unwrap();
        for n in (2..=24u64).step_by(2) {
            let mut s = BigInt::zero();
            for k in 0..=n / 4 {
                s += central_binomial(k).pow(2) * binomial(n / 2, 2 * k) * (BigInt::from(1) << (n - 4 * k));
            }
            assert_eq!(series.values()[n as usize], Cyclotomic::from_integer(&f2, s));
        }
        assert_eq!(series.values()[4], int(&f2, 20));

        for ctx in [flux(1, 3), flux(2, 3)] {
            let f3 = CyclotomicField::new(ctx);
            let series = moments_by_series(ctx, 24).unwrap();
            for n in (2..=24u64).step_by(2) {
                let mut s = <BigRational as Zero>::zero();
                for k in 0..=n / 6 {
                    let num = central_binomial(k).pow(2) * binomial(n / 2 - k, 2 * k) * BigInt::from(6).pow((n / 2 - 3 * k) as u32);
                    s += BigRational::new(num, BigInt::from(n - 2 * k));
                }
                s *= BigRational::new(BigInt::from(2 * n), BigInt::from(3));
                assert_eq!(series.values()[n as usize], Cyclotomic::from_rational(&f3, &s));
            }
            assert_eq!(moments_by_sum_formula(ctx, 6).unwrap(), int(&f3, 148));
        }
    }

    #[test]
    fn sum_formula_errors() {
        assert_eq!(moments_by_sum_formula(flux(1, 3), 0), Err(Error::InvalidLength(0)));
        assert_eq!(moments_by_sum_formula(flux(1, 3), 5), Err(Error::InvalidLength(5)));
    }

    #[test]
    fn routes_agree() {
        for ctx in FluxContext::all_up_to(8) {
            let series = moments_by_series(ctx, 14).unwrap();
            let sum = moments_table_by_sum_formula(ctx, 14).unwrap();
            let dp = moments_table_by_dp(ctx, 14).unwrap();
            assert_eq!(series.values(), sum.values(), "{ctx}");
            assert_eq!(series.values(), dp.values(), "{ctx}");
            assert_eq!(dp.route(4), Some(Route::Dp));
        }
    }

    #[test]
    fn q4_recurrence() {
        for ctx in [flux(1, 4), flux(3, 4)] {
            let table = moments_by_series(ctx, 40).unwrap();
            let report = recurrence_check_q4(&table).unwrap();
            assert!(report.holds(), "{report:?}");
            assert_eq!(report.checked.first(), Some(&2));
            assert_eq!(report.checked.last(), Some(&40));
        }
        let other = moments_by_series(flux(1, 3), 4).unwrap();
        assert!(recurrence_check_q4(&other).is_err());
    }

    #[test]
    fn corrupted_table_fails_recurrence() {
        let table = moments_by_series(flux(1, 4), 20).unwrap();
        let mut values = table.values().to_vec();
        values[16] = values[16].clone() + int(values[16].field(), 2);
        let bad = MomentTable::new(table.ctx(), values, vec![Route::Series; 21]).unwrap();
        assert_eq!(recurrence_check_q4(&bad).unwrap().first_failure, Some(16));
    }

    #[test]
    fn invariants_rejected() {
        let f = CyclotomicField::new(flux(1, 5));
        let bad = vec![int(&f, 1), int(&f, 1)];
        assert!(MomentTable::new(flux(1, 5), bad, vec![Route::Series; 2]).is_err());
        let complex = vec![int(&f, 1), Cyclotomic::zero(&f), int(&f, 4), Cyclotomic::zero(&f), Cyclotomic::zeta(&f)];
        assert!(MomentTable::new(flux(1, 5), complex, vec![Route::Series; 5]).is_err());
    }

    #[test]
    fn prefactor_is_log_derivative() {
        // With w = z^q u and u = 1/b: (z/q) w'/w = 1 + z u'/(q u).
        for ctx in [flux(1, 5), flux(3, 8), flux(2, 7)] {
            let band = band_poly_via_determinant(ctx).unwrap();
            let field = band.field().clone();
            let order = 20;
            let b = TruncatedSeries::from_poly(band.b(), order + 1);
            let lhs = TruncatedSeries::from_poly(&band.numerator(), order).div(&b.truncate(order)).unwrap();
            let u = TruncatedSeries::one(&field, order + 1).div(&b).unwrap();
            let inv_q = Cyclotomic::from_rational(&field, &BigRational::new(1.into(), BigInt::from(ctx.q())));
            let log_term = u.derivative().shift(1).div(&u.truncate(order)).unwrap().scale(&inv_q);
            let rhs = TruncatedSeries::one(&field, order).add(&log_term);
            assert_eq!(lhs, rhs, "{ctx}");
        }
    }

    #[test]
    fn resolvent_matches_series() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        for (p, q, z) in [(1, 2, r(1, 10)), (1, 3, r(1, 5)), (2, 5, r(1, 5)), (0, 1, r(-1, 5))] {
            let rep = dos_generating_identity_check(FluxContext::new(p, q).unwrap(), &z, 1e-6).unwrap();
            assert!(rep.holds(), "{p}/{q}: {rep:?}");
        }
        let rep = dos_generating_identity_check(FluxContext::new(1, 2).unwrap(), &r(0, 1), 1e-6).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-7 && (rep.rhs - 1.0).abs() < 1e-15);
        let err = dos_generating_identity_check(FluxContext::new(1, 2).unwrap(), &r(1, 2), 1e-6);
        assert!(matches!(err, Err(Error::OutsideRadius { .. })));
    }

    #[test]
    fn growth_is_monotone() {
        for ctx in FluxContext::all_up_to(8) {
            let t = moments_by_series(ctx, 30).unwrap().to_f64();
            for n in (2..28).step_by(2) {
                assert!(t[n + 2] > t[n], "{ctx} n={n}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn mirror_flux_moments_coincide(ctx in prop::sample::select(FluxContext::all_up_to(9))) {
            let a = moments_by_series(ctx, 16).unwrap().to_f64();
            let b = moments_by_series(ctx.mirror(), 16).unwrap().to_f64();
            prop_assert_eq!(a, b);
        }
    }
}
