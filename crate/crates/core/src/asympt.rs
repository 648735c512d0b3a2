//! Dominant singularities of the moment generating function and the law
//! `Z_n ~ (β/n) α^n` for even `n`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::cyclo::{Cyclotomic, FluxContext};
use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numeric::{derivative_real, eval_real, polynomial_roots};
use crate::ring::Ring;
use crate::series::Poly;
use crate::spectrum::{band_poly_via_determinant, BandPolynomial};

const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Singularities {
    pub ctx: FluxContext,
    /// Roots of `b - 4z^q` and `b + 4z^q` of minimal modulus.
    pub dominant: Vec<Complex64>,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthConstants {
    pub ctx: FluxContext,
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub singularities: Vec<Complex64>,
}

fn shifted_band(band: &BandPolynomial, sign: i64) -> Vec<Complex64> {
    let field = band.field();
    let q = band.ctx().q() as usize;
    let term = Poly::monomial(Cyclotomic::from_integer(field, BigInt::from(4 * sign)), q);
    band.b().add(&term).coeffs().iter().map(|c| c.to_complex(30)).collect()
}

/// Minimal-modulus roots of `b(z) ∓ 4z^q`.
pub fn dominant_singularities(ctx: FluxContext) -> Result<Singularities> {
    dominant_singularities_of(&band_poly_via_determinant(ctx)?)
}

pub fn dominant_singularities_of(band: &BandPolynomial) -> Result<Singularities> {
    let mut roots = polynomial_roots(&shifted_band(band, -1))?;
    roots.extend(polynomial_roots(&shifted_band(band, 1))?);
    let modulus = roots.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !modulus.is_finite() {
        return Err(Error::Invariant(format!("b_{} ∓ 4z^q has no roots", band.ctx())));
    }
    let mut dominant: Vec<Complex64> = Vec::new();
    for z in roots.into_iter().filter(|z| z.norm() <= modulus * (1.0 + TIE_TOLERANCE)) {
        if !dominant.iter().any(|w| (w - z).norm() <= TIE_TOLERANCE * modulus) {
            dominant.push(z);
        }
    }
    dominant.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Singularities { ctx: band.ctx(), dominant, modulus })
}

/// `α = 1/ρ` and `β = 2P(ρ)/π` with `P(z) = 1 - z b'(z)/(q b(z))`.
pub fn growth_constants(ctx: FluxContext) -> Result<GrowthConstants> {
    growth_constants_of(&band_poly_via_determinant(ctx)?)
}

pub fn growth_constants_of(band: &BandPolynomial) -> Result<GrowthConstants> {
    let sing = dominant_singularities_of(band)?;
    let rho = sing.modulus;
    let is_real_pair = sing.dominant.len() == 2
        && sing.dominant.iter().all(|z| z.im.abs() <= TIE_TOLERANCE * rho)
        && (sing.dominant[0].re + sing.dominant[1].re).abs() <= TIE_TOLERANCE * rho;
    if !is_real_pair {
        return Err(Error::ComplexDominant(sing.dominant));
    }
    let b = band.float_coeffs();
    let q = band.ctx().q() as f64;
    let b_rho = eval_real(&b, rho);
    let db_rho = eval_real(&derivative_real(&b), rho);
    let prefactor = 1.0 - rho * db_rho / (q * b_rho);
    let residual = (b_rho.abs() - 4.0 * rho.powf(q)).abs();
    if residual > 1e-12 {
        return Err(Error::Invariant(format!("|b(ρ)| - 4ρ^q = {residual:e} at ρ = {rho}")));
    }
    Ok(GrowthConstants {
        ctx: band.ctx(),
        rho,
        alpha: 1.0 / rho,
        beta: 2.0 * prefactor / PI,
        singularities: sing.dominant,
    })
}

/// `(n, |n Z_n α^{-n} - β| / β)` for every even `n >= 2` in the table.
pub fn asymptotic_fit_check(table: &MomentTable) -> Result<Vec<(usize, f64)>> {
    let gc = growth_constants(table.ctx())?;
    Ok(table
        .to_f64()
        .into_iter()
        .enumerate()
        .skip(2)
        .step_by(2)
        .map(|(n, z)| {
            let scaled = n as f64 * z * (gc.rho.ln() * n as f64).exp();
            (n, (scaled - gc.beta).abs() / gc.beta)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moments_by_series;
    use proptest::prelude::*;

    fn flux(p: u32, q: u32) -> FluxContext {
        FluxContext::new(p, q).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn singularity_examples() {
        let s2 = dominant_singularities(flux(1, 2)).unwrap();
        assert_eq!(s2.dominant.len(), 2);
        assert!(close(s2.modulus, 1.0 / 8f64.sqrt()));
        let s3 = dominant_singularities(flux(1, 3)).unwrap();
        assert!(close(s3.modulus, (3f64.sqrt() - 1.0) / 2.0));
        let s4 = dominant_singularities(flux(1, 4)).unwrap();
        assert!(close(s4.modulus, 1.0 / 8f64.sqrt()));
        for z in s3.dominant.iter().chain(&s2.dominant) {
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn tabulated_constants() {
        let s5 = 5f64.sqrt();
        let s21 = 21f64.sqrt();
        let table = [
            (1, 2, 8f64.sqrt(), 4.0 / PI),
            (1, 3, 1.0 + 3f64.sqrt(), (4.0 + 2.0 * 3f64.sqrt()) / PI),
            (1, 4, 8f64.sqrt(), 16.0 / PI),
            (1, 5, (1.0 + s5 + (70.0 + 2.0 * s5).sqrt()) / 4.0, (19.0 + 11.0 * s5 + (670.0 + 298.0 * s5).sqrt()) / (2.0 * PI)),
            (2, 5, (3.0 + s5) / 2.0, (7.0 + 3.0 * s5) / PI),
            (1, 6, (5.0 + s21).sqrt(), (56.0 + 12.0 * s21) / PI),
        ];
        for (p, q, alpha, beta) in table {
            for ctx in [flux(p, q), flux(q - p, q)] {
                let gc = growth_constants(ctx).unwrap();
                assert!(close(gc.alpha, alpha), "{ctx}: α {} vs {alpha}", gc.alpha);
                assert!(close(gc.beta, beta), "{ctx}: β {} vs {beta}", gc.beta);
            }
        }
        let free = growth_constants(FluxContext::trivial()).unwrap();
        assert!(close(free.alpha, 4.0) && close(free.beta, 2.0 / PI));
    }

    #[test]
    fn fit_converges() {
        for (ctx, n) in [(flux(1, 2), 40), (flux(1, 3), 60)] {
            let table = moments_by_series(ctx, n).unwrap();
            let fit = asymptotic_fit_check(&table).unwrap();
            let (last_n, last) = *fit.last().unwrap();
            assert_eq!(last_n, n);
            assert!(last < 0.1, "{ctx}: {last}");
            let tail: Vec<f64> = fit.iter().rev().take(10).map(|x| x.1).collect();
            assert!(tail.windows(2).all(|w| w[0] <= w[1]), "{ctx}: {tail:?}");
        }
    }

    #[test]
    fn constants_within_spectral_bounds() {
        for ctx in FluxContext::all_up_to(10) {
            match growth_constants(ctx) {
                Ok(gc) => {
                    assert!(gc.alpha > 2.0 && gc.alpha <= 4.0 + 1e-12, "{ctx}: {}", gc.alpha);
                    assert!(gc.beta > 0.0, "{ctx}");
                }
                Err(Error::ComplexDominant(_)) => {}
                Err(e) => panic!("{ctx}: {e}"),
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn mirror_symmetry(ctx in prop::sample::select(FluxContext::all_up_to(12))) {
            let a = dominant_singularities(ctx).unwrap();
            let b = dominant_singularities(ctx.mirror()).unwrap();
            prop_assert!((a.modulus - b.modulus).abs() < 1e-12);
        }
    }
}
