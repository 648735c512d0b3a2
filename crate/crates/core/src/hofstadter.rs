//! Spectral side: the q×q Harper matrix, Brillouin-zone traces, the Chambers
//! relation, the density of states and band edges for the butterfly.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclo::FluxContext;
use crate::error::Result;
use crate::numeric::{
    complex_determinant, derivative_real, elliptic_k_complement, eval_real, hermitian_eigenvalues,
    symmetric_eigenvalues, tanh_sinh,
};
use crate::spectrum::{band_poly_via_determinant, BandPolynomial};

/// Bands whose edges are closer than this are merged.
pub const BAND_MERGE_TOLERANCE: f64 = 1e-8;

/// Hofstadter Hamiltonian at quasimomentum `(kx, ky)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarperMatrix {
    ctx: FluxContext,
    kx: f64,
    ky: f64,
    entries: Vec<Complex64>,
}

impl HarperMatrix {
    pub fn new(ctx: FluxContext, kx: f64, ky: f64) -> Self {
        let q = ctx.q() as usize;
        let mut entries = vec![Complex64::new(0.0, 0.0); q * q];
        for k in 0..q {
            entries[k * q + k] += 2.0 * (ky + ctx.gamma() * k as f64).cos();
        }
        for k in 0..q.saturating_sub(1) {
            entries[k * q + k + 1] += 1.0;
            entries[(k + 1) * q + k] += 1.0;
        }
        let phase = Complex64::from_polar(1.0, q as f64 * kx);
        entries[q - 1] += phase.conj();
        entries[(q - 1) * q] += phase;
        HarperMatrix { ctx, kx, ky, entries }
    }

    pub fn ctx(&self) -> FluxContext {
        self.ctx
    }

    pub fn momentum(&self) -> (f64, f64) {
        (self.kx, self.ky)
    }

    pub fn dim(&self) -> usize {
        self.ctx.q() as usize
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim() + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (self.entry(i, j) - self.entry(j, i).conj()).norm() <= tol))
    }

    /// `m(E, kx, ky) = H - E`.
    pub fn secular_matrix(&self, e: f64) -> Vec<Complex64> {
        let n = self.dim();
        let mut m = self.entries.clone();
        for i in 0..n {
            m[i * n + i] -= e;
        }
        m
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        if self.entries.iter().all(|z| z.im == 0.0) {
            let real: Vec<f64> = self.entries.iter().map(|z| z.re).collect();
            symmetric_eigenvalues(n, &real)
        } else {
            hermitian_eigenvalues(n, &self.entries)
        }
    }
}

pub fn eigenvalues(m: &HarperMatrix) -> Vec<f64> {
    m.eigenvalues()
}

/// `(1/q)` times the mean of `Σ_r E_r^n` over an `N × N` periodic grid on `[-π, π)²`.
pub fn trace_moment_numeric(ctx: FluxContext, n: u32, grid: usize) -> f64 {
    let q = ctx.q() as f64;
    let k = |i: usize| -PI + 2.0 * PI * i as f64 / grid as f64;
    let total: f64 = (0..grid)
        .into_par_iter()
        .map(|ix| {
            (0..grid)
                .map(|iy| HarperMatrix::new(ctx, k(ix), k(iy)).eigenvalues().iter().map(|e| e.powi(n as i32)).sum::<f64>())
                .sum::<f64>()
        })
        .sum();
    total / (grid * grid) as f64 / q
}

/// `|det m(E,kx,ky) - det m(E,0,0) + 2(-1)^q (cos q kx + cos q ky - 2)|`.
pub fn chambers_check(ctx: FluxContext, e: f64, kx: f64, ky: f64) -> f64 {
    let q = ctx.q() as usize;
    let lhs = complex_determinant(q, &HarperMatrix::new(ctx, kx, ky).secular_matrix(e));
    let base = complex_determinant(q, &HarperMatrix::new(ctx, 0.0, 0.0).secular_matrix(e));
    let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
    let qf = q as f64;
    let rhs = base - 2.0 * sign * ((qf * kx).cos() - 1.0 + (qf * ky).cos() - 1.0);
    (lhs - rhs).norm()
}

/// `P(E) = tr Π_m T_m(E) + 2` with the Harper transfer matrices `T_m = [[E - 2cos(γm), -1], [1, 0]]`.
pub fn transfer_secular(ctx: FluxContext, e: f64) -> f64 {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for k in 0..ctx.q() {
        let d = e - 2.0 * (ctx.gamma() * f64::from(k)).cos();
        m = [[m[0][0] * d + m[0][1], -m[0][0]], [m[1][0] * d + m[1][1], -m[1][0]]];
    }
    m[0][0] + m[1][1] + 2.0
}

/// Largest `|E^q b(1/E) - 2(cos q kx + cos q ky)|` over the eigenvalues at `(kx, ky)`.
pub fn secular_consistency(band: &BandPolynomial, kx: f64, ky: f64) -> f64 {
    let p = band.secular_float_coeffs();
    let q = band.ctx().q() as f64;
    let target = 2.0 * ((q * kx).cos() + (q * ky).cos());
    HarperMatrix::new(band.ctx(), kx, ky)
        .eigenvalues()
        .into_iter()
        .map(|e| (eval_real(&p, e) - target).abs())
        .fold(0.0, f64::max)
}

/// Eigenvalues of the real symmetric Harper matrix with `kx = ky = k` and `q k ∈ {0, π}`.
fn real_harper_eigenvalues(ctx: FluxContext, antiperiodic: bool) -> Vec<f64> {
    let q = ctx.q() as usize;
    let ky = if antiperiodic { PI / q as f64 } else { 0.0 };
    let corner = if antiperiodic { -1.0 } else { 1.0 };
    let mut m = vec![0.0; q * q];
    for k in 0..q {
        m[k * q + k] += 2.0 * (ky + ctx.gamma() * k as f64).cos();
    }
    for k in 0..q.saturating_sub(1) {
        m[k * q + k + 1] += 1.0;
        m[(k + 1) * q + k] += 1.0;
    }
    m[q - 1] += corner;
    m[(q - 1) * q] += corner;
    symmetric_eigenvalues(q, &m)
}

/// One interval per sorted eigenvalue branch, between the roots of `P = 4` and `P = -4`.
pub fn raw_band_edges(ctx: FluxContext) -> Vec<(f64, f64)> {
    let top = real_harper_eigenvalues(ctx, false);
    let bottom = real_harper_eigenvalues(ctx, true);
    top.into_iter().zip(bottom).map(|(a, b)| (a.min(b), a.max(b))).collect()
}

/// Disjoint spectral bands, touching bands merged.
pub fn band_intervals(ctx: FluxContext) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in raw_band_edges(ctx) {
        match out.last_mut() {
            Some(last) if lo - last.1 <= BAND_MERGE_TOLERANCE => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// `ρ(E) = |P'(E)| K(1 - (P/4)²) / (2π² q)` on the bands, zero elsewhere.
#[derive(Debug, Clone)]
pub struct DensityOfStates {
    ctx: FluxContext,
    secular: Vec<f64>,
    secular_derivative: Vec<f64>,
    bands: Vec<(f64, f64)>,
    breakpoints: Vec<f64>,
}

impl DensityOfStates {
    pub fn new(ctx: FluxContext) -> Result<Self> {
        Ok(Self::from_band(&band_poly_via_determinant(ctx)?))
    }

    pub fn from_band(band: &BandPolynomial) -> Self {
        let ctx = band.ctx();
        let secular = band.secular_float_coeffs();
        let secular_derivative = derivative_real(&secular);
        let mut breakpoints: Vec<f64> = raw_band_edges(ctx).into_iter().flat_map(|(a, b)| [a, b]).collect();
        // Zeros of P, where K has its logarithmic singularity.
        let k = PI / (2.0 * f64::from(ctx.q()));
        breakpoints.extend(HarperMatrix::new(ctx, k, k).eigenvalues());
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
        DensityOfStates { ctx, secular, secular_derivative, bands: band_intervals(ctx), breakpoints }
    }

    pub fn ctx(&self) -> FluxContext {
        self.ctx
    }

    pub fn bands(&self) -> &[(f64, f64)] {
        &self.bands
    }

    pub fn secular(&self, e: f64) -> f64 {
        eval_real(&self.secular, e)
    }

    pub fn density(&self, e: f64) -> f64 {
        let p = self.secular(e);
        if p.is_nan() || p.abs() >= 4.0 {
            return 0.0;
        }
        let dp = eval_real(&self.secular_derivative, e).abs();
        dp * elliptic_k_complement(p.abs() / 4.0) / (2.0 * PI * PI * f64::from(self.ctx.q()))
    }

    /// `∫ ρ(E) g(E) dE` over the bands.
    pub fn integrate(&self, g: impl Fn(f64) -> f64 + Sync) -> f64 {
        self.breakpoints
            .windows(2)
            .filter(|w| self.secular(0.5 * (w[0] + w[1])).abs() < 4.0)
            .map(|w| tanh_sinh(|e| self.density(e) * g(e), w[0], w[1], 1e-12))
            .sum()
    }

    pub fn normalization(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn moment(&self, n: i32) -> f64 {
        self.integrate(|e| e.powi(n))
    }
}

pub fn density_of_states(ctx: FluxContext, e: f64) -> Result<f64> {
    Ok(DensityOfStates::new(ctx)?.density(e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ButterflyRow {
    pub p: u32,
    pub q: u32,
    pub band_index: usize,
    pub e_lo: f64,
    pub e_hi: f64,
}

/// Band intervals for every valid flux with `q <= q_max`, sorted by `(q, p, band)`.
pub fn butterfly_export(q_max: u32) -> Vec<ButterflyRow> {
    FluxContext::all_up_to(q_max)
        .into_par_iter()
        .flat_map_iter(|ctx| {
            band_intervals(ctx).into_iter().enumerate().map(move |(i, (lo, hi))| ButterflyRow {
                p: ctx.p(),
                q: ctx.q(),
                band_index: i,
                e_lo: lo,
                e_hi: hi,
            })
        })
        .collect()
}

/// Plain decimal with `sig` significant digits; values below `1e-13` print as `0`.
pub fn format_significant(x: f64, sig: usize) -> String {
    if x.abs() < 1e-13 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_butterfly_csv<W: Write>(rows: &[ButterflyRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "p,q,band_index,E_lo,E_hi")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.p, r.q, r.band_index, format_significant(r.e_lo, 12), format_significant(r.e_hi, 12))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moments_by_series;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn flux(p: u32, q: u32) -> FluxContext {
        FluxContext::new(p, q).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let e = HarperMatrix::new(FluxContext::trivial(), 0.0, 0.0).eigenvalues();
        assert_eq!(e.len(), 1);
        assert!((e[0] - 4.0).abs() < 1e-15);
        let e = HarperMatrix::new(flux(1, 2), 0.0, 0.0).eigenvalues();
        assert!((e[0] + 8f64.sqrt()).abs() < 1e-12 && (e[1] - 8f64.sqrt()).abs() < 1e-12);
        let m = HarperMatrix::new(flux(3, 7), 0.4, -1.3);
        assert!(m.is_hermitian(1e-15));
        assert!(m.eigenvalues().iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn trace_moments_match_exact() {
        assert_eq!(trace_moment_numeric(flux(2, 5), 0, 16), 1.0);
        assert!((trace_moment_numeric(flux(1, 2), 4, 64) - 20.0).abs() < 1e-8);
        assert!((trace_moment_numeric(flux(1, 3), 6, 64) - 148.0).abs() < 1e-6);
        for ctx in FluxContext::all_up_to(5) {
            let exact = moments_by_series(ctx, 10).unwrap().to_f64();
            for n in (2..=10).step_by(2) {
                let numeric = trace_moment_numeric(ctx, n as u32, 64);
                assert!((numeric - exact[n]).abs() < 1e-6 * exact[n].max(1.0), "{ctx} n={n}: {numeric} vs {}", exact[n]);
            }
        }
    }

    #[test]
    fn chambers_identity() {
        assert!(chambers_check(flux(1, 3), 0.7, 0.0, 0.0) < 1e-12);
        assert!(chambers_check(flux(1, 3), 0.7, 0.3, -1.1) < 1e-10);
        let mut rng = StdRng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let (e, kx, ky) = (rng.gen_range(-4.0..4.0), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            worst = worst.max(chambers_check(flux(1, 5), e, kx, ky));
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn transfer_matrix_matches_band_polynomial() {
        for ctx in FluxContext::all_up_to(9) {
            let p = band_poly_via_determinant(ctx).unwrap().secular_float_coeffs();
            for e in [-3.7, -1.2, 0.0, 0.45, 2.9] {
                let a = transfer_secular(ctx, e);
                assert!((a - eval_real(&p, e)).abs() < 1e-9 * a.abs().max(1.0), "{ctx} E={e}");
            }
        }
    }

    #[test]
    fn secular_equation_at_eigenvalues() {
        let mut rng = StdRng::seed_from_u64(5);
        for ctx in FluxContext::all_up_to(8) {
            let band = band_poly_via_determinant(ctx).unwrap();
            for _ in 0..10 {
                let (kx, ky) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
                assert!(secular_consistency(&band, kx, ky) < 1e-8, "{ctx}");
            }
        }
    }

    #[test]
    fn density_examples() {
        let dos = DensityOfStates::new(flux(1, 3)).unwrap();
        assert_eq!(dos.density(4.5), 0.0);
        assert_eq!(dos.density(-5.0), 0.0);
        let (lo, _) = dos.bands()[0];
        let edge = dos.density(lo + 1e-12);
        assert!(edge.is_finite() && edge >= 0.0);
        let free = DensityOfStates::new(FluxContext::trivial()).unwrap();
        assert!((free.density(2.0) - crate::numeric::elliptic_k(0.75) / (2.0 * PI * PI)).abs() < 1e-14);
        assert!(free.density(1e-9) > free.density(0.5));
    }

    #[test]
    fn density_normalisation_and_moments() {
        for ctx in FluxContext::all_up_to(4) {
            let dos = DensityOfStates::new(ctx).unwrap();
            assert!((dos.normalization() - 1.0).abs() < 1e-6, "{ctx}: {}", dos.normalization());
            let exact = moments_by_series(ctx, 8).unwrap().to_f64();
            for n in (2..=8).step_by(2) {
                let m = dos.moment(n as i32);
                assert!((m - exact[n]).abs() < 1e-4, "{ctx} n={n}: {m} vs {}", exact[n]);
            }
        }
    }

    #[test]
    fn bands_match_secular_condition() {
        for ctx in FluxContext::all_up_to(12) {
            let band = band_poly_via_determinant(ctx).unwrap();
            let p = band.secular_float_coeffs();
            for (lo, hi) in band_intervals(ctx) {
                assert!((eval_real(&p, lo).abs() - 4.0).abs() < 1e-7, "{ctx}");
                assert!((eval_real(&p, hi).abs() - 4.0).abs() < 1e-7, "{ctx}");
                assert!(eval_real(&p, 0.5 * (lo + hi)).abs() <= 4.0 + 1e-9, "{ctx}");
            }
        }
    }

    #[test]
    fn butterfly_rows() {
        let rows = butterfly_export(3);
        let trivial: Vec<_> = rows.iter().filter(|r| r.q == 1).collect();
        assert_eq!(trivial.len(), 1);
        assert!((trivial[0].e_lo + 4.0).abs() < 1e-12 && (trivial[0].e_hi - 4.0).abs() < 1e-12);
        let half: Vec<_> = rows.iter().filter(|r| r.q == 2).collect();
        assert_eq!(half.len(), 1);
        assert!((half[0].e_hi - 8f64.sqrt()).abs() < 1e-12);
        let mut buf = Vec::new();
        write_butterfly_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("p,q,band_index,E_lo,E_hi\n0,1,0,-4.00000000000,4.00000000000\n"), "{text}");
        assert_eq!(format_significant(2.0 * 3f64.sqrt(), 12), "3.46410161514");
        assert_eq!(format_significant(-0.0, 12), "0");
    }

    #[test]
    fn butterfly_mirror_rows() {
        let rows = butterfly_export(20);
        for r in rows.iter().filter(|r| r.q > 1) {
            let m = rows.iter().find(|s| s.q == r.q && s.p == r.q - r.p && s.band_index == r.band_index).unwrap();
            assert!((m.e_lo - r.e_lo).abs() < 1e-10 && (m.e_hi - r.e_hi).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn spectrum_symmetric_in_momentum(ctx in prop::sample::select(FluxContext::all_up_to(9)), kx in -PI..PI, ky in -PI..PI) {
            let a = HarperMatrix::new(ctx, kx, ky).eigenvalues();
            let b = HarperMatrix::new(ctx, -kx, -ky).eigenvalues();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
                prop_assert!(x.abs() <= 4.0 + 1e-12);
            }
        }
    }
}
