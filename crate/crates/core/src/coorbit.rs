//! Wavelet transform on phase space, twisted convolution, the reproducing
//! projection and coorbit norms.
//!
//! With the Haar normalization fixed in [`crate::group`], the orthogonality
//! constant is exactly one:
//! `<W_{phi0} f, W_{phi1} g>_{L^2(Xi)} = <f, g> <phi1, phi0>`.
//! On a finite group every nonzero window is admissible and all coorbit
//! spaces coincide as sets, so the L^p structure is carried entirely by the
//! norm values.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, LpExponent, Signal};
use crate::heisenberg::{parity, rep_u, Cocycle, PhaseFunction, PhasePoint};
use crate::linalg::CMatrix;
use crate::scalar::{c_zero, Scalar, C};

/// Parity type of a window: `R phi0 = +phi0` or `R phi0 = -phi0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParitySign {
    Even,
    Odd,
}

/// Analysis window: a nonzero signal together with its detected parity.
#[derive(Debug, Clone)]
pub struct Window<T> {
    phi0: Signal<T>,
    norm_sq: T,
    parity: Option<ParitySign>,
    label: String,
}

impl<T: Scalar> Window<T> {
    pub fn new(group: &FiniteAbelianGroup, phi0: Signal<T>) -> Result<Self> {
        if phi0.len() != group.cardinality() {
            return Err(Error::ShapeMismatch {
                what: "window length",
                expected: group.cardinality(),
                found: phi0.len(),
            });
        }
        let norm_sq = phi0.inner(&phi0, group.weights::<T>().group)?.re;
        if norm_sq <= T::zero() {
            return Err(Error::ZeroWindow);
        }
        let reflected = parity(group, &phi0)?;
        let tol = T::lit(1e-10) * norm_sq.sqrt();
        let parity = if reflected.sub(&phi0)?.norm(T::one()) <= tol {
            Some(ParitySign::Even)
        } else if reflected.add(&phi0)?.norm(T::one()) <= tol {
            Some(ParitySign::Odd)
        } else {
            None
        };
        Ok(Window {
            phi0,
            norm_sq,
            parity,
            label: "phi0".into(),
        })
    }

    /// The point-mass window at the identity (even, norm one).
    pub fn delta(group: &FiniteAbelianGroup) -> Self {
        let mut w = Self::new(group, Signal::delta(group, &group.identity()))
            .expect("delta window is valid");
        w.label = "delta_e".into();
        w
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn phi0(&self) -> &Signal<T> {
        &self.phi0
    }

    pub fn norm_sq(&self) -> T {
        self.norm_sq
    }

    pub fn parity(&self) -> Option<ParitySign> {
        self.parity
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Wavelet transform `[W_{phi0}(f)](xi) = <f, U_xi phi0>`.
pub fn wavelet<T: Scalar>(
    c: &Cocycle<T>,
    w: &Window<T>,
    f: &Signal<T>,
) -> Result<PhaseFunction<T>> {
    let g = c.group();
    if f.len() != g.cardinality() {
        return Err(Error::ShapeMismatch {
            what: "signal length",
            expected: g.cardinality(),
            found: f.len(),
        });
    }
    let wg = g.weights::<T>().group;
    let mut values = Vec::with_capacity(g.xi_cardinality());
    for xi in g.xi_points() {
        let shifted = rep_u(c, &xi, &w.phi0)?;
        values.push(f.inner(&shifted, wg)?);
    }
    Ok(PhaseFunction::new(values))
}

/// Matrix of the wavelet transform (rows phase space, columns the group).
pub fn wavelet_matrix<T: Scalar>(c: &Cocycle<T>, w: &Window<T>) -> Result<CMatrix<T>> {
    let g = c.group();
    let wg = g.weights::<T>().group;
    let n = g.cardinality();
    let mut m = CMatrix::zeros(g.xi_cardinality(), n);
    for (row, xi) in g.xi_points().enumerate() {
        let shifted = rep_u(c, &xi, &w.phi0)?;
        for col in 0..n {
            m[(row, col)] = shifted.values()[col].conj() * Complex::new(wg, T::zero());
        }
    }
    Ok(m)
}

/// Adjoint transform `W* F = sum_xi F(xi) U_xi phi0 wXi` (Hilbert-space
/// adjoint with respect to the weighted inner products).
pub fn wavelet_adjoint<T: Scalar>(
    c: &Cocycle<T>,
    w: &Window<T>,
    f: &PhaseFunction<T>,
) -> Result<Signal<T>> {
    let g = c.group();
    if f.len() != g.xi_cardinality() {
        return Err(Error::ShapeMismatch {
            what: "phase function length",
            expected: g.xi_cardinality(),
            found: f.len(),
        });
    }
    let w_xi = g.weights::<T>().phase;
    let mut acc = Signal::zeros(g.cardinality());
    for (idx, xi) in g.xi_points().enumerate() {
        let shifted = rep_u(c, &xi, &w.phi0)?;
        let coeff = f.values()[idx] * Complex::new(w_xi, T::zero());
        acc = acc.add(&shifted.scale(coeff))?;
    }
    Ok(acc)
}

/// Residual of the orthogonality relation
/// `|<W_{w0} f, W_{w1} g>_{L^2(Xi)} - <f, g> <phi1, phi0>|`; the Haar
/// normalization makes the constant one, so this must vanish.
pub fn godement_residual<T: Scalar>(
    c: &Cocycle<T>,
    f: &Signal<T>,
    g_sig: &Signal<T>,
    w0: &Window<T>,
    w1: &Window<T>,
) -> Result<T> {
    let weights = c.group().weights::<T>();
    let wf = wavelet(c, w0, f)?;
    let wg = wavelet(c, w1, g_sig)?;
    let lhs = wf.inner(&wg, weights.phase)?;
    let rhs = f.inner(g_sig, weights.group)? * w1.phi0.inner(&w0.phi0, weights.group)?;
    Ok((lhs - rhs).norm())
}

/// Twisted convolution
/// `(F *' H)(xi) = sum_eta F(eta) H(eta^{-1} xi) m(eta, eta^{-1} xi) wXi`.
pub fn twisted_convolution<T: Scalar>(
    c: &Cocycle<T>,
    f: &PhaseFunction<T>,
    h: &PhaseFunction<T>,
) -> Result<PhaseFunction<T>> {
    let g = c.group();
    let n = g.xi_cardinality();
    if f.len() != n || h.len() != n {
        return Err(Error::ShapeMismatch {
            what: "phase function length",
            expected: n,
            found: if f.len() != n { f.len() } else { h.len() },
        });
    }
    let w_xi = Complex::new(g.weights::<T>().phase, T::zero());
    let points: Vec<PhasePoint> = g.xi_points().collect();
    let mut out = vec![c_zero(); n];
    for (xi_idx, slot) in out.iter_mut().enumerate() {
        let xi = &points[xi_idx];
        let mut acc: C<T> = c_zero();
        for (eta_idx, eta) in points.iter().enumerate() {
            let rest = g.xi_op(&g.xi_inv(eta)?, xi)?;
            let twist = c.m(eta, &rest)?;
            acc += f.values()[eta_idx] * h.values()[g.xi_index(&rest)] * twist;
        }
        *slot = acc * w_xi;
    }
    Ok(PhaseFunction::new(out))
}

/// Orthogonal projection of `L^2(Xi)` onto the range of the wavelet
/// transform: `F -> (1/||phi0||^2) F *' W_{phi0}(phi0)`.
pub fn coorbit_project<T: Scalar>(
    c: &Cocycle<T>,
    w: &Window<T>,
    f: &PhaseFunction<T>,
) -> Result<PhaseFunction<T>> {
    let kernel = wavelet(c, w, &w.phi0)?;
    let conv = twisted_convolution(c, f, &kernel)?;
    Ok(conv.scale(Complex::new(T::one() / w.norm_sq, T::zero())))
}

/// Matrix of [`coorbit_project`] on phase space.
pub fn projection_matrix<T: Scalar>(c: &Cocycle<T>, w: &Window<T>) -> Result<CMatrix<T>> {
    let g = c.group();
    let n = g.xi_cardinality();
    let mut m = CMatrix::zeros(n, n);
    for col in 0..n {
        let basis = PhaseFunction::delta(g, &g.xi_at(col));
        let image = coorbit_project(c, w, &basis)?;
        for row in 0..n {
            m[(row, col)] = image.values()[row];
        }
    }
    Ok(m)
}

/// Reproducing kernel of the wavelet range at the point `xi`:
/// `K_xi(eta) = (1/||phi0||^2) W(phi0)(xi^{-1} eta) m(xi,xi^{-1}) conj(m(xi^{-1},eta))`.
pub fn reproducing_kernel<T: Scalar>(
    c: &Cocycle<T>,
    w: &Window<T>,
    xi: &PhasePoint,
) -> Result<PhaseFunction<T>> {
    let g = c.group();
    let base = wavelet(c, w, &w.phi0)?;
    let xi_inv = g.xi_inv(xi)?;
    let front = c.m(xi, &xi_inv)?;
    let scale = Complex::new(T::one() / w.norm_sq, T::zero());
    let mut out = vec![c_zero(); g.xi_cardinality()];
    for (eta_idx, slot) in out.iter_mut().enumerate() {
        let eta = g.xi_at(eta_idx);
        let arg = g.xi_op(&xi_inv, &eta)?;
        *slot = base.values()[g.xi_index(&arg)] * front * c.m(&xi_inv, &eta)?.conj() * scale;
    }
    Ok(PhaseFunction::new(out))
}

/// Same kernel through the representation: `K_xi = (1/||phi0||^2) W(U_xi phi0)`.
pub fn reproducing_kernel_via_rep<T: Scalar>(
    c: &Cocycle<T>,
    w: &Window<T>,
    xi: &PhasePoint,
) -> Result<PhaseFunction<T>> {
    let shifted = rep_u(c, xi, &w.phi0)?;
    let transformed = wavelet(c, w, &shifted)?;
    Ok(transformed.scale(Complex::new(T::one() / w.norm_sq, T::zero())))
}

/// A coorbit (modulation) norm value.
#[derive(Debug, Clone, PartialEq)]
pub struct CoorbitNormReport<T> {
    pub p: LpExponent<T>,
    pub value: T,
    pub window: String,
}

/// `||f||_{p, phi0} = ||W_{phi0}(f)||_{L^p(Xi)}` with the phase-space Haar
/// weight; `p = inf` is the plain sup norm.
pub fn coorbit_norm<T: Scalar>(
    c: &Cocycle<T>,
    w: &Window<T>,
    f: &Signal<T>,
    p: LpExponent<T>,
) -> Result<CoorbitNormReport<T>> {
    let transform = wavelet(c, w, f)?;
    let value = transform.lp_norm(p, c.group().weights::<T>().phase);
    Ok(CoorbitNormReport {
        p,
        value,
        window: w.label.clone(),
    })
}

/// Constant `C` with `||W_{phi1}(f)||_{L^1} <= C ||W_{phi0}(f)||_{L^1}`:
/// the minimum over phase points with `<U_xi phi1, phi0> != 0` of
/// `||W_{phi1}(phi1)||_{L^1} / |<U_xi phi1, phi0>|`. Some admissible point
/// always exists by irreducibility; finding none means corrupted data.
pub fn window_equivalence_constant<T: Scalar>(
    c: &Cocycle<T>,
    w0: &Window<T>,
    w1: &Window<T>,
) -> Result<T> {
    let g = c.group();
    let weights = g.weights::<T>();
    let numerator = wavelet(c, w1, &w1.phi0)?.lp_norm(LpExponent::Finite(T::one()), weights.phase);
    let floor = T::lit(1e-12) * (w0.norm_sq * w1.norm_sq).sqrt();
    let mut best: Option<T> = None;
    for xi in g.xi_points() {
        let pairing = w0
            .phi0
            .inner(&rep_u(c, &xi, &w1.phi0)?, weights.group)?
            .norm();
        if pairing > floor {
            let candidate = numerator / pairing;
            best = Some(match best {
                None => candidate,
                Some(b) => b.min(candidate),
            });
        }
    }
    best.ok_or(Error::ConsistencyFailure {
        check: "window equivalence: no phase point pairs the windows",
        residual: f64::INFINITY,
        tol: 0.0,
    })
}

/// Residual `| ||Rf||_{p,phi0} - ||f||_{p,phi0} |` for a parity-symmetric
/// window. Windows without parity symmetry are rejected.
pub fn parity_isometry_residual<T: Scalar>(
    c: &Cocycle<T>,
    w: &Window<T>,
    f: &Signal<T>,
    p: LpExponent<T>,
) -> Result<T> {
    if w.parity.is_none() {
        return Err(Error::WindowWithoutParity);
    }
    let reflected = parity(c.group(), f)?;
    let a = coorbit_norm(c, w, &reflected, p)?.value;
    let b = coorbit_norm(c, w, f, p)?.value;
    Ok((a - b).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;

    type C64 = Complex<f64>;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn setup(orders: &[usize]) -> Cocycle<f64> {
        Cocycle::standard(FiniteAbelianGroup::new(orders.to_vec()).unwrap())
    }

    /// Deterministic quasi-random signal for tests.
    fn test_signal(n: usize, seed: u64) -> Signal<f64> {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        };
        Signal::new((0..n).map(|_| c(next(), next())).collect())
    }

    #[test]
    fn wavelet_of_delta_window_is_identity_indicator() {
        let co = setup(&[2, 3]);
        let g = co.group();
        let w = Window::delta(g);
        let table = wavelet(&co, &w, w.phi0()).unwrap();
        for (idx, xi) in g.xi_points().enumerate() {
            let expect = if xi.x == g.identity() { 1.0 } else { 0.0 };
            assert!((table.values()[idx] - c(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn wavelet_frozen_table_on_z2() {
        // phi0 = delta_0, f = (0, 1): W(f)(x, nu) = conj(nu(1)) [x = 1].
        let co = setup(&[2]);
        let g = co.group();
        let w = Window::delta(g);
        let f = Signal::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let table = wavelet(&co, &w, &f).unwrap();
        assert_eq!(
            table.values(),
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]
        );
        // And the zero signal maps to zero.
        let zero = wavelet(&co, &w, &Signal::zeros(2)).unwrap();
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn adjoint_pairing_identity() {
        let co = setup(&[4]);
        let g = co.group();
        let weights = g.weights::<f64>();
        let w = Window::new(g, test_signal(4, 7)).unwrap();
        let f = test_signal(4, 11);
        let big = PhaseFunction::new(test_signal(16, 13).values().to_vec());
        let lhs = wavelet(&co, &w, &f)
            .unwrap()
            .inner(&big, weights.phase)
            .unwrap();
        let rhs = f
            .inner(&wavelet_adjoint(&co, &w, &big).unwrap(), weights.group)
            .unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn resolution_of_identity() {
        let co = setup(&[2, 3]);
        let g = co.group();
        let w = Window::new(g, test_signal(6, 3)).unwrap();
        let f = test_signal(6, 21);
        let back = wavelet_adjoint(&co, &w, &wavelet(&co, &w, &f).unwrap()).unwrap();
        // W* W = ||phi0||^2 id.
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b * c(w.norm_sq(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn godement_hand_value_and_random_residuals() {
        let co = setup(&[2]);
        let g = co.group();
        let d = Window::delta(g);
        // All four vectors delta_0: both sides equal 1.
        let f = Signal::delta(g, &g.identity());
        let lhs = wavelet(&co, &d, &f)
            .unwrap()
            .inner(&wavelet(&co, &d, &f).unwrap(), g.weights::<f64>().phase)
            .unwrap();
        assert!((lhs - c(1.0, 0.0)).norm() < 1e-14);
        assert!(godement_residual(&co, &f, &f, &d, &d).unwrap() < 1e-14);

        // Orthogonal pair with equal windows: both sides vanish.
        let f0 = Signal::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let f1 = Signal::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(godement_residual(&co, &f0, &f1, &d, &d).unwrap() < 1e-14);

        // Random quadruples on Z2 x Z3.
        let co6 = setup(&[2, 3]);
        let g6 = co6.group();
        for seed in 0..25u64 {
            let w0 = Window::new(g6, test_signal(6, 100 + seed)).unwrap();
            let w1 = Window::new(g6, test_signal(6, 200 + seed)).unwrap();
            let f = test_signal(6, 300 + seed);
            let h = test_signal(6, 400 + seed);
            assert!(godement_residual(&co6, &f, &h, &w0, &w1).unwrap() < 1e-10);
        }
    }

    #[test]
    fn twisted_convolution_identity_and_deltas() {
        let co = setup(&[2]);
        let g = co.group();
        let w = Window::delta(g);
        let f = wavelet(&co, &w, w.phi0()).unwrap();
        // F *' F = F since ||delta||^2 = 1.
        let ff = twisted_convolution(&co, &f, &f).unwrap();
        for (a, b) in ff.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-14);
        }
        // The point mass at (e, 1) scaled by 1/wXi is a two-sided unit.
        let co4 = setup(&[4]);
        let g4 = co4.group();
        let unit =
            PhaseFunction::delta(g4, &g4.xi_identity()).scale(c(g4.cardinality() as f64, 0.0));
        let f4 = PhaseFunction::new(test_signal(16, 5).values().to_vec());
        let right = twisted_convolution(&co4, &f4, &unit).unwrap();
        let left = twisted_convolution(&co4, &unit, &f4).unwrap();
        for ((a, b), orig) in right.values().iter().zip(left.values()).zip(f4.values()) {
            assert!((a - orig).norm() < 1e-12);
            assert!((b - orig).norm() < 1e-12);
        }
    }

    #[test]
    fn twisted_convolution_associativity_and_young() {
        let co = setup(&[4]);
        let g = co.group();
        let f = PhaseFunction::new(test_signal(16, 31).values().to_vec());
        let h = PhaseFunction::new(test_signal(16, 32).values().to_vec());
        let l = PhaseFunction::new(test_signal(16, 33).values().to_vec());
        let lhs = twisted_convolution(&co, &twisted_convolution(&co, &f, &h).unwrap(), &l).unwrap();
        let rhs = twisted_convolution(&co, &f, &twisted_convolution(&co, &h, &l).unwrap()).unwrap();
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        // |F *' H| <= |F| * |H| pointwise (plain convolution of moduli).
        let conv = twisted_convolution(&co, &f, &h).unwrap();
        let w_xi = g.weights::<f64>().phase;
        for (xi_idx, xi) in g.xi_points().enumerate() {
            let mut bound = 0.0;
            for (eta_idx, eta) in g.xi_points().enumerate() {
                let rest = g.xi_op(&g.xi_inv(&eta).unwrap(), &xi).unwrap();
                bound += f.values()[eta_idx].norm() * h.values()[g.xi_index(&rest)].norm();
            }
            bound *= w_xi;
            assert!(conv.values()[xi_idx].norm() <= bound + 1e-12);
        }
    }

    #[test]
    fn wavelet_twisted_convolution_identity() {
        // W_{w0}(f3) *' W_{w1}(f2) = <f2, phi0> W_{w1}(f3).
        let co = setup(&[4]);
        let g = co.group();
        for seed in 0..10u64 {
            let w0 = Window::new(g, test_signal(4, 500 + seed)).unwrap();
            let w1 = Window::new(g, test_signal(4, 600 + seed)).unwrap();
            let f2 = test_signal(4, 700 + seed);
            let f3 = test_signal(4, 800 + seed);
            let lhs = twisted_convolution(
                &co,
                &wavelet(&co, &w0, &f3).unwrap(),
                &wavelet(&co, &w1, &f2).unwrap(),
            )
            .unwrap();
            let scale = f2.inner(w0.phi0(), g.weights::<f64>().group).unwrap();
            let rhs = wavelet(&co, &w1, &f3).unwrap().scale(scale);
            for (a, b) in lhs.values().iter().zip(rhs.values()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_selfadjoint_and_fixes_range() {
        let co = setup(&[4]);
        let g = co.group();
        let w = Window::new(g, test_signal(4, 42)).unwrap();
        let p = projection_matrix(&co, &w).unwrap();
        // P^2 = P.
        assert!(p.matmul(&p).sub(&p).frobenius_norm() < 1e-10);
        // Self-adjoint (uniform phase-space weight: plain Hermitian).
        assert!(p.sub(&p.adjoint()).frobenius_norm() < 1e-10);
        // Fixes the wavelet range: P W = W.
        let mw = wavelet_matrix(&co, &w).unwrap();
        assert!(p.matmul(&mw).sub(&mw).frobenius_norm() < 1e-10);
        // P(0) = 0 and an off-range function moves.
        let zero = coorbit_project(&co, &w, &PhaseFunction::zeros(16)).unwrap();
        assert!(zero.values().iter().all(|v| v.norm() < 1e-15));
        let off = PhaseFunction::delta(g, &g.xi_at(3));
        let moved = coorbit_project(&co, &w, &off).unwrap().sub(&off).unwrap();
        assert!(moved.norm(g.weights::<f64>().phase) > 1e-3);
    }

    #[test]
    fn projection_matches_scaled_gram() {
        // P = (1/||phi0||^2) W W* with the weighted adjoint.
        let co = setup(&[2, 2]);
        let g = co.group();
        let w = Window::new(g, test_signal(4, 9)).unwrap();
        let weights = g.weights::<f64>();
        let mw = wavelet_matrix(&co, &w).unwrap();
        let ww_star = mw
            .matmul(&mw.adjoint())
            .scale(c(weights.phase / weights.group / w.norm_sq(), 0.0));
        let p = projection_matrix(&co, &w).unwrap();
        assert!(p.sub(&ww_star).frobenius_norm() < 1e-10);
        // W* W = ||phi0||^2 id.
        let gram = mw
            .adjoint()
            .matmul(&mw)
            .scale(c(weights.phase / weights.group, 0.0));
        let expect = CMatrix::identity(4).scale(c(w.norm_sq(), 0.0));
        assert!(gram.sub(&expect).frobenius_norm() < 1e-10);
    }

    #[test]
    fn reproducing_kernel_reproduces_and_formulas_agree() {
        let co = setup(&[2]);
        let g = co.group();
        let w = Window::new(g, test_signal(2, 77)).unwrap();
        let weights = g.weights::<f64>();
        let f = test_signal(2, 78);
        let table = wavelet(&co, &w, &f).unwrap();
        for (idx, xi) in g.xi_points().enumerate() {
            let k1 = reproducing_kernel(&co, &w, &xi).unwrap();
            let k2 = reproducing_kernel_via_rep(&co, &w, &xi).unwrap();
            for (a, b) in k1.values().iter().zip(k2.values()) {
                assert!((a - b).norm() < 1e-12);
            }
            let reproduced = table.inner(&k1, weights.phase).unwrap();
            assert!((reproduced - table.values()[idx]).norm() < 1e-10);
        }
        // Diagonal value: K_xi(xi) = W(phi0)(e) / ||phi0||^2 = 1.
        let xi = g.xi_at(2);
        let k = reproducing_kernel(&co, &w, &xi).unwrap();
        assert!((k.values()[g.xi_index(&xi)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn coorbit_norm_special_cases() {
        let co = setup(&[4]);
        let g = co.group();
        // Unit-norm window: p = 2 coorbit norm is the L^2 norm.
        let mut phi = test_signal(4, 91);
        let n = phi.norm(1.0);
        phi = phi.scale(c(1.0 / n, 0.0));
        let w = Window::new(g, phi).unwrap();
        let f = test_signal(4, 92);
        let report = coorbit_norm(&co, &w, &f, LpExponent::new(2.0).unwrap()).unwrap();
        assert!((report.value - f.norm(1.0)).abs() < 1e-12);

        // Delta window: coorbit norm is the plain l^p norm, any p.
        let d = Window::delta(g);
        for p in [1.0, 2.0, 3.0] {
            let lp = LpExponent::new(p).unwrap();
            let norm = coorbit_norm(&co, &d, &f, lp).unwrap().value;
            assert!((norm - f.lp_norm(lp, 1.0)).abs() < 1e-12);
        }
        let inf = LpExponent::<f64>::Infinity;
        assert!(
            (coorbit_norm(&co, &d, &f, inf).unwrap().value - f.lp_norm(inf, 1.0)).abs() < 1e-12
        );

        // Zero signal has zero norm.
        let zero = Signal::zeros(4);
        assert_eq!(
            coorbit_norm(&co, &d, &zero, LpExponent::new(1.0).unwrap())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn embedding_bound_l1_controls_l2() {
        // ||f|| ||phi0|| <= ||f||_{1, phi0}.
        let co = setup(&[2, 3]);
        let g = co.group();
        for seed in 0..10u64 {
            let w = Window::new(g, test_signal(6, 900 + seed)).unwrap();
            let f = test_signal(6, 950 + seed);
            let l1 = coorbit_norm(&co, &w, &f, LpExponent::new(1.0).unwrap())
                .unwrap()
                .value;
            assert!(f.norm(1.0) * w.norm_sq().sqrt() <= l1 + 1e-12);
        }
    }

    #[test]
    fn window_equivalence_bounds_ratios() {
        let co = setup(&[2]);
        let g = co.group();
        let w0 = Window::delta(g);
        let w1 = Window::new(g, Signal::delta(g, &g.element(&[1]).unwrap())).unwrap();
        let cst = window_equivalence_constant(&co, &w0, &w1).unwrap();
        assert!(cst >= 1.0 - 1e-12);
        for seed in 0..20u64 {
            let f = test_signal(2, 1000 + seed);
            let n1 = coorbit_norm(&co, &w1, &f, LpExponent::new(1.0).unwrap())
                .unwrap()
                .value;
            let n0 = coorbit_norm(&co, &w0, &f, LpExponent::new(1.0).unwrap())
                .unwrap()
                .value;
            assert!(n1 <= cst * n0 + 1e-10);
        }
        // Same window: the ratio bound C >= 1 holds trivially.
        let cst_same = window_equivalence_constant(&co, &w0, &w0).unwrap();
        assert!(cst_same >= 1.0 - 1e-12);
        // Scaling a window leaves the bound valid (homogeneity).
        let w1s = Window::new(g, w1.phi0().scale(c(2.0, 0.0))).unwrap();
        let cst_scaled = window_equivalence_constant(&co, &w0, &w1s).unwrap();
        for seed in 0..10u64 {
            let f = test_signal(2, 2000 + seed);
            let n1 = coorbit_norm(&co, &w1s, &f, LpExponent::new(1.0).unwrap())
                .unwrap()
                .value;
            let n0 = coorbit_norm(&co, &w0, &f, LpExponent::new(1.0).unwrap())
                .unwrap()
                .value;
            assert!(n1 <= cst_scaled * n0 + 1e-10);
        }
    }

    #[test]
    fn parity_isometry_for_symmetric_windows() {
        let co = setup(&[4]);
        let g = co.group();
        let d = Window::delta(g);
        assert_eq!(d.parity(), Some(ParitySign::Even));
        for seed in 0..10u64 {
            let f = test_signal(4, 3000 + seed);
            for p in [
                LpExponent::new(1.0).unwrap(),
                LpExponent::new(2.0).unwrap(),
                LpExponent::Infinity,
            ] {
                assert!(parity_isometry_residual(&co, &d, &f, p).unwrap() < 1e-10);
            }
        }
        // Even input trivially has equal norms.
        let even = Signal::new(vec![c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(0.5, -1.0)]);
        assert!(parity_isometry_residual(&co, &d, &even, LpExponent::Infinity).unwrap() < 1e-14);
        // A window without parity symmetry is rejected.
        let skew = Window::new(
            g,
            Signal::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        )
        .unwrap();
        assert!(matches!(
            parity_isometry_residual(&co, &skew, &even, LpExponent::Infinity),
            Err(Error::WindowWithoutParity)
        ));
    }

    #[test]
    fn wavelet_intertwines_u_and_v() {
        use crate::heisenberg::rep_v;
        let co = setup(&[4]);
        let g = co.group();
        let w = Window::new(g, test_signal(4, 51)).unwrap();
        let f = test_signal(4, 52);
        for i in 0..g.xi_cardinality() {
            let xi = g.xi_at(i);
            let lhs = wavelet(&co, &w, &rep_u(&co, &xi, &f).unwrap()).unwrap();
            let rhs = rep_v(&co, &xi, &wavelet(&co, &w, &f).unwrap()).unwrap();
            for (a, b) in lhs.values().iter().zip(rhs.values()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn wavelet_is_injective() {
        // The weighted Gram of the wavelet matrix is ||phi0||^2 I, so the
        // smallest singular value stays away from zero.
        let co = setup(&[2, 3]);
        let g = co.group();
        let w = Window::new(g, test_signal(6, 61)).unwrap();
        let mw = wavelet_matrix(&co, &w).unwrap();
        assert!(mw.min_singular_value() > 1e-8);
    }
}
#[cfg(test)]
mod duality_tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;

    /// The L^p/L^q duality content at finite scale: Hoelder's inequality
    /// for the phase-space pairing against coorbit norms, and the raw
    /// nesting values across exponents.
    #[test]
    fn hoelder_pairing_against_coorbit_norms() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let co = Cocycle::standard(g.clone());
        let w_xi = g.weights::<f64>().phase;
        let mut state = 0xabcdef1234u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..20 {
            let window = Window::new(
                &g,
                Signal::new((0..6).map(|_| Complex::new(next(), next())).collect()),
            )
            .unwrap();
            let f = Signal::new((0..6).map(|_| Complex::new(next(), next())).collect());
            let h = Signal::new((0..6).map(|_| Complex::new(next(), next())).collect());
            let wf = wavelet(&co, &window, &f).unwrap();
            let wh = wavelet(&co, &window, &h).unwrap();
            let pairing = wf.inner(&wh, w_xi).unwrap().norm();
            for (p, q) in [(1.0, f64::INFINITY), (2.0, 2.0), (3.0, 1.5), (4.0, 4.0 / 3.0)] {
                let np = coorbit_norm(&co, &window, &f, LpExponent::new(p).unwrap())
                    .unwrap()
                    .value;
                let nq = coorbit_norm(&co, &window, &h, LpExponent::new(q).unwrap())
                    .unwrap()
                    .value;
                assert!(pairing <= np * nq + 1e-10, "p = {p}: {pairing} > {np} * {nq}");
            }
        }
    }
}
