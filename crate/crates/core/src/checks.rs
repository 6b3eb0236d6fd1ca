//! Runtime verification suites: each lemma-level identity of the library is
//! exposed as a named check with a numeric residual, so that the self-test
//! front end can re-run the whole battery at a configurable tolerance.
//!
//! Boolean outcomes (set equalities, verdicts) report residual 0 or 1.

use num_complex::Complex;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coorbit::{
    coorbit_norm, godement_residual, parity_isometry_residual, projection_matrix,
    reproducing_kernel, reproducing_kernel_via_rep, twisted_convolution, wavelet, wavelet_matrix,
    window_equivalence_constant, Window,
};
use crate::error::Result;
use crate::group::{
    fourier, fourier_dual_inv, fourier_inv, FiniteAbelianGroup, LpExponent, Signal,
};
use crate::heisenberg::{
    parity_intertwine_residual, rep_u, rep_u_matrix, rep_v, sigma_iso_check, Cocycle,
    PhaseFunction, PhasePoint,
};
use crate::limitops::{
    compactness_diagnostic, example_gallery, limit_operator, periodize, shift, BandedZOperator,
    CompactnessVerdict, GalleryKind, LimitOperatorSpec, TailClass,
};
use crate::linalg::CMatrix;
use crate::opalg::{
    alpha, band_support, band_support_by_action, band_truncate, default_probes, fourier_conjugate,
    oscillation, oscillation_dual_bound, qha_convolve, smooth_fourier, BandSet,
    KernelOperator, PhaseMeasure,
};
use crate::propa::{build_partition, folner_for, probe_box, probe_cross, verify_partition};

/// One verified identity.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub group: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, group: &str, residual: f64, tol: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            group: group.into(),
            residual,
            tol,
            pass: residual <= tol,
            detail: detail.into(),
        }
    }

    fn boolean(name: &str, group: &str, ok: bool, tol: f64, detail: impl Into<String>) -> Self {
        Check::new(name, group, if ok { 0.0 } else { 1.0 }, tol, detail)
    }
}

#[derive(Debug, Clone)]
pub struct SelftestConfig {
    pub tol: f64,
    pub seed: u64,
    pub groups: Vec<Vec<usize>>,
    pub trials: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            tol: 1e-10,
            seed: 7,
            groups: vec![vec![2], vec![4], vec![2, 3]],
            trials: 100,
        }
    }
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal<f64> {
    Signal::new(
        (0..n)
            .map(|_| Complex::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
            .collect(),
    )
}

pub fn random_operator(
    rng: &mut ChaCha8Rng,
    g: &FiniteAbelianGroup,
) -> Result<KernelOperator<f64>> {
    let n = g.cardinality();
    let s = random_signal(rng, n * n);
    KernelOperator::new(
        g.clone(),
        CMatrix::from_fn(n, n, |r, c| s.values()[r * n + c]),
    )
}

fn nonzero_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal<f64> {
    loop {
        let s = random_signal(rng, n);
        if s.norm(1.0) > 1e-3 {
            return s;
        }
    }
}

fn group_label(orders: &[usize]) -> String {
    orders
        .iter()
        .map(|n| format!("Z{n}"))
        .collect::<Vec<_>>()
        .join("x")
}

/// Runs every suite on every configured group, then the lattice and
/// partition suites; returns one entry per check.
pub fn run_selftest(cfg: &SelftestConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    for orders in &cfg.groups {
        let g = FiniteAbelianGroup::new(orders.clone())?;
        checks.extend(group_suite(&g, &mut rng, cfg.tol, cfg.trials)?);
        checks.extend(coorbit_suite(&g, &mut rng, cfg.tol, cfg.trials)?);
        checks.extend(operator_suite(&g, &mut rng, cfg.tol, cfg.trials)?);
    }
    checks.extend(lattice_suite(cfg.tol)?);
    checks.extend(partition_suite(cfg.tol)?);
    Ok(checks)
}

/// Character, Fourier and representation identities.
pub fn group_suite(
    g: &FiniteAbelianGroup,
    rng: &mut ChaCha8Rng,
    tol: f64,
    trials: usize,
) -> Result<Vec<Check>> {
    let label = group_label(g.orders());
    let n = g.cardinality();
    let w = g.weights::<f64>();
    let mut out = Vec::new();

    // Character orthogonality, exhaustive.
    let mut resid: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for x in 0..n {
                acc += g.character_at::<f64>(a, x) * g.character_at::<f64>(b, x).conj();
            }
            let expect = if a == b { n as f64 } else { 0.0 };
            resid = resid.max((acc * w.group - expect).norm());
        }
    }
    out.push(Check::new(
        "character_orthogonality",
        &label,
        resid,
        tol,
        "sum_x nu(x) conj(mu(x)) wG = |G| wG [nu = mu], exhaustive",
    ));

    // Fourier unitarity and inversion on random signals.
    let mut unit: f64 = 0.0;
    let mut invr: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let f = random_signal(rng, n);
        let h = random_signal(rng, n);
        let ff = fourier(g, &f)?;
        let fh = fourier(g, &h)?;
        unit = unit.max((ff.inner(&fh, w.dual)? - f.inner(&h, w.group)?).norm());
        let back = fourier_inv(g, &ff)?;
        invr = invr.max(back.sub(&f)?.norm(1.0));
    }
    out.push(Check::new(
        "fourier_unitarity",
        &label,
        unit,
        tol,
        "<Ff, Fh> with dual weights equals <f, h>",
    ));
    out.push(Check::new(
        "fourier_inversion",
        &label,
        invr,
        tol,
        "inverse transform recovers the signal",
    ));

    let co: Cocycle<f64> = Cocycle::standard(g.clone());

    // Cocycle identity: exhaustive on tiny groups, sampled otherwise.
    let nxi = g.xi_cardinality();
    let mut resid: f64 = 0.0;
    let mut triples = 0usize;
    let exhaustive = nxi <= 64;
    let check_triple = |i: usize, j: usize, k: usize, resid: &mut f64| -> Result<()> {
        let (x, y, z) = (g.xi_at(i), g.xi_at(j), g.xi_at(k));
        let lhs = co.m(&g.xi_op(&x, &y)?, &z)? * co.m(&x, &y)?;
        let rhs = co.m(&x, &g.xi_op(&y, &z)?)? * co.m(&y, &z)?;
        let diff: Complex<f64> = lhs - rhs;
        *resid = resid.max(diff.norm());
        Ok(())
    };
    if exhaustive {
        for i in 0..nxi {
            for j in 0..nxi {
                for k in 0..nxi {
                    check_triple(i, j, k, &mut resid)?;
                    triples += 1;
                }
            }
        }
    } else {
        for _ in 0..1000 {
            let i = rng.random_range(0..nxi);
            let j = rng.random_range(0..nxi);
            let k = rng.random_range(0..nxi);
            check_triple(i, j, k, &mut resid)?;
            triples += 1;
        }
    }
    out.push(Check::new(
        "cocycle_identity",
        &label,
        resid,
        tol,
        format!(
            "m(xy,z) m(x,y) = m(x,yz) m(y,z) over {triples} triples{}",
            if exhaustive { " (exhaustive)" } else { "" }
        ),
    ));

    // Inversion symmetry and normalization of the multiplier.
    let mut resid: f64 = 0.0;
    let e = g.xi_identity();
    for i in 0..nxi {
        let p = g.xi_at(i);
        resid = resid.max((co.m(&e, &p)? - Complex::new(1.0, 0.0)).norm());
        for j in 0..nxi.min(64) {
            let q = g.xi_at(j);
            let lhs = co.m(&p, &q)?;
            let rhs = co.m(&g.xi_inv(&p)?, &g.xi_inv(&q)?)?;
            resid = resid.max((lhs - rhs).norm());
        }
    }
    out.push(Check::new(
        "cocycle_normalization",
        &label,
        resid,
        tol,
        "m(e, .) = 1 and m(xi, eta) = m(xi^-1, eta^-1)",
    ));

    // Projective law and unitarity of the representation, as matrices.
    let mut law: f64 = 0.0;
    let mut unitary: f64 = 0.0;
    let id = CMatrix::identity(n);
    for i in 0..nxi {
        let p = g.xi_at(i);
        let up = rep_u_matrix(&co, &p)?;
        unitary = unitary.max(up.adjoint().matmul(&up).sub(&id).frobenius_norm());
        for j in 0..nxi {
            let q = g.xi_at(j);
            let uq = rep_u_matrix(&co, &q)?;
            let upq = rep_u_matrix(&co, &g.xi_op(&p, &q)?)?.scale(co.m(&p, &q)?);
            law = law.max(up.matmul(&uq).sub(&upq).frobenius_norm());
        }
    }
    out.push(Check::new(
        "projective_law",
        &label,
        law,
        tol,
        "U_xi U_eta = m(xi, eta) U_{xi eta} as matrices",
    ));
    out.push(Check::new(
        "representation_unitarity",
        &label,
        unitary,
        tol,
        "U_xi* U_xi = id",
    ));

    // Symplectic form isomorphism.
    let sigma = sigma_iso_check(&co, 1e-10)?;
    out.push(Check::boolean(
        "sigma_isomorphism",
        &label,
        sigma.pass,
        tol,
        "xi -> m(xi, .) / m(., xi) is an isomorphism onto the dual of phase space",
    ));

    // Parity: involution, self-adjointness and intertwining.
    let r = crate::heisenberg::parity_matrix::<f64>(g);
    let mut resid = r.matmul(&r).sub(&id).frobenius_norm();
    resid = resid.max(r.sub(&r.adjoint()).frobenius_norm());
    for i in 0..nxi {
        resid = resid.max(parity_intertwine_residual(&co, &g.xi_at(i))?);
    }
    out.push(Check::new(
        "parity_intertwining",
        &label,
        resid,
        tol,
        "R^2 = id, R = R*, R U_xi = U_{xi^-1} R",
    ));

    Ok(out)
}

/// Wavelet-transform identities: orthogonality relations, covariance,
/// twisted convolution, projection, reproducing kernel, norms.
pub fn coorbit_suite(
    g: &FiniteAbelianGroup,
    rng: &mut ChaCha8Rng,
    tol: f64,
    trials: usize,
) -> Result<Vec<Check>> {
    let label = group_label(g.orders());
    let n = g.cardinality();
    let nxi = g.xi_cardinality();
    let w = g.weights::<f64>();
    let co: Cocycle<f64> = Cocycle::standard(g.clone());
    let mut out = Vec::new();

    // Orthogonality relations with constant one.
    let mut resid: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let w0 = Window::new(g, nonzero_signal(rng, n))?;
        let w1 = Window::new(g, nonzero_signal(rng, n))?;
        let f = random_signal(rng, n);
        let h = random_signal(rng, n);
        resid = resid.max(godement_residual(&co, &f, &h, &w0, &w1)?);
    }
    out.push(Check::new(
        "godement_orthogonality",
        &label,
        resid,
        tol,
        "<W_{w0} f, W_{w1} h> = <f, h> <phi1, phi0> (constant one)",
    ));

    // Covariance: wavelet intertwines U with the phase-space action V.
    let mut resid: f64 = 0.0;
    let wv = Window::new(g, nonzero_signal(rng, n))?;
    let f = random_signal(rng, n);
    for i in 0..nxi {
        let xi = g.xi_at(i);
        let lhs = wavelet(&co, &wv, &rep_u(&co, &xi, &f)?)?;
        let rhs = rep_v(&co, &xi, &wavelet(&co, &wv, &f)?)?;
        resid = resid.max(lhs.sub(&rhs)?.lp_norm(LpExponent::Infinity, w.phase));
    }
    out.push(Check::new(
        "wavelet_covariance",
        &label,
        resid,
        tol,
        "W(U_xi f) = V_xi W(f)",
    ));

    // Twisted-convolution identity.
    let mut resid: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let w0 = Window::new(g, nonzero_signal(rng, n))?;
        let w1 = Window::new(g, nonzero_signal(rng, n))?;
        let f2 = random_signal(rng, n);
        let f3 = random_signal(rng, n);
        let lhs = twisted_convolution(&co, &wavelet(&co, &w0, &f3)?, &wavelet(&co, &w1, &f2)?)?;
        let rhs = wavelet(&co, &w1, &f3)?.scale(f2.inner(w0.phi0(), w.group)?);
        resid = resid.max(lhs.sub(&rhs)?.lp_norm(LpExponent::Infinity, w.phase));
    }
    out.push(Check::new(
        "twisted_convolution_identity",
        &label,
        resid,
        tol,
        "W_{w0}(f3) *' W_{w1}(f2) = <f2, phi0> W_{w1}(f3)",
    ));

    // Associativity of the twisted convolution.
    let mut resid: f64 = 0.0;
    for _ in 0..trials.clamp(1, 20) {
        let a = PhaseFunction::new(random_signal(rng, nxi).values().to_vec());
        let b = PhaseFunction::new(random_signal(rng, nxi).values().to_vec());
        let c = PhaseFunction::new(random_signal(rng, nxi).values().to_vec());
        let lhs = twisted_convolution(&co, &twisted_convolution(&co, &a, &b)?, &c)?;
        let rhs = twisted_convolution(&co, &a, &twisted_convolution(&co, &b, &c)?)?;
        resid = resid.max(lhs.sub(&rhs)?.lp_norm(LpExponent::Infinity, w.phase));
    }
    out.push(Check::new(
        "twisted_convolution_associativity",
        &label,
        resid,
        tol,
        "(F *' H) *' L = F *' (H *' L)",
    ));

    // Projection: idempotent, self-adjoint, fixes the wavelet range; the
    // range characterization separates off-range functions.
    let wp = Window::new(g, nonzero_signal(rng, n))?;
    let p = projection_matrix(&co, &wp)?;
    let mw = wavelet_matrix(&co, &wp)?;
    let mut resid = p.matmul(&p).sub(&p).frobenius_norm();
    resid = resid.max(p.sub(&p.adjoint()).frobenius_norm());
    resid = resid.max(p.matmul(&mw).sub(&mw).frobenius_norm());
    out.push(Check::new(
        "orthogonal_projection",
        &label,
        resid,
        tol,
        "P^2 = P = P*, P W = W for P = (1/||phi0||^2)(.) *' W(phi0)",
    ));
    // Range characterization: some function off the range must move.
    let off = PhaseFunction::delta(g, &g.xi_at(nxi / 2));
    let moved = crate::coorbit::coorbit_project(&co, &wp, &off)?
        .sub(&off)?
        .norm(w.phase);
    out.push(Check::boolean(
        "projection_range_characterization",
        &label,
        moved > 1e-6,
        tol,
        "a generic off-range function is moved by the projection",
    ));

    // Reproducing kernel: evaluation and agreement of the two formulas.
    let mut resid: f64 = 0.0;
    let f = random_signal(rng, n);
    let table = wavelet(&co, &wp, &f)?;
    for i in 0..nxi {
        let xi = g.xi_at(i);
        let k1 = reproducing_kernel(&co, &wp, &xi)?;
        let k2 = reproducing_kernel_via_rep(&co, &wp, &xi)?;
        resid = resid.max(k1.sub(&k2)?.lp_norm(LpExponent::Infinity, w.phase));
        resid = resid.max((table.inner(&k1, w.phase)? - table.values()[i]).norm());
    }
    out.push(Check::new(
        "reproducing_kernel",
        &label,
        resid,
        tol,
        "<F, K_xi> = F(xi) on the range; both kernel formulas agree",
    ));

    // Window independence: the proof constant bounds empirical ratios.
    let w0 = Window::new(g, nonzero_signal(rng, n))?;
    let w1 = Window::new(g, nonzero_signal(rng, n))?;
    let cst = window_equivalence_constant(&co, &w0, &w1)?;
    let mut excess: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let f = random_signal(rng, n);
        let n1 = coorbit_norm(&co, &w1, &f, LpExponent::new(1.0)?)?.value;
        let n0 = coorbit_norm(&co, &w0, &f, LpExponent::new(1.0)?)?.value;
        excess = excess.max(n1 - cst * n0);
    }
    out.push(Check::new(
        "window_independence",
        &label,
        excess.max(0.0),
        tol,
        format!("||W_w1 f||_1 <= C ||W_w0 f||_1 with C = {cst:.6}"),
    ));

    // Embedding bound of the L^1 coorbit norm.
    let mut excess: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let wx = Window::new(g, nonzero_signal(rng, n))?;
        let f = random_signal(rng, n);
        let l1 = coorbit_norm(&co, &wx, &f, LpExponent::new(1.0)?)?.value;
        excess = excess.max(f.norm(w.group) * wx.norm_sq().sqrt() - l1);
    }
    out.push(Check::new(
        "coorbit_embedding",
        &label,
        excess.max(0.0),
        tol,
        "||f|| ||phi0|| <= ||f||_{1, phi0}",
    ));

    // Wavelet injectivity through the Gram identity W* W = ||phi0||^2 id.
    let gram = mw
        .adjoint()
        .matmul(&mw)
        .scale(Complex::new(w.phase / w.group, 0.0));
    let resid = gram
        .sub(&CMatrix::identity(n).scale(Complex::new(wp.norm_sq(), 0.0)))
        .frobenius_norm();
    out.push(Check::new(
        "wavelet_injectivity",
        &label,
        resid,
        tol,
        "W* W = ||phi0||^2 id (hence the transform is injective)",
    ));

    // Parity isometry on coorbit norms for a symmetric window.
    let d = Window::delta(g);
    let mut resid: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let f = random_signal(rng, n);
        for p in [
            LpExponent::new(1.0)?,
            LpExponent::new(2.0)?,
            LpExponent::Infinity,
        ] {
            resid = resid.max(parity_isometry_residual(&co, &d, &f, p)?);
        }
    }
    out.push(Check::new(
        "parity_isometry",
        &label,
        resid,
        tol,
        "||Rf||_{p, phi0} = ||f||_{p, phi0} for R phi0 = +/- phi0",
    ));

    // Modulation-space identification: the delta window computes plain
    // l^p norms.
    let mut resid: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let f = random_signal(rng, n);
        for p in [1.0, 2.0, 3.0] {
            let lp = LpExponent::new(p)?;
            resid = resid.max((coorbit_norm(&co, &d, &f, lp)?.value - f.lp_norm(lp, w.group)).abs());
        }
        let inf = LpExponent::Infinity;
        resid = resid.max((coorbit_norm(&co, &d, &f, inf)?.value - f.lp_norm(inf, w.group)).abs());
    }
    out.push(Check::new(
        "modulation_space_identification",
        &label,
        resid,
        tol,
        "delta-window coorbit norms equal plain l^p norms",
    ));

    Ok(out)
}

/// Kernel-operator identities: conjugation action, band algebra, the
/// kernel multiplier, oscillation and Fourier conjugation.
pub fn operator_suite(
    g: &FiniteAbelianGroup,
    rng: &mut ChaCha8Rng,
    tol: f64,
    trials: usize,
) -> Result<Vec<Check>> {
    let label = group_label(g.orders());
    let n = g.cardinality();
    let co: Cocycle<f64> = Cocycle::standard(g.clone());
    let mut out = Vec::new();

    // Pairing convention guard.
    let a = random_operator(rng, g)?;
    let phi = random_signal(rng, n);
    let psi = random_signal(rng, n);
    let w = g.weights::<f64>();
    let lhs = a.apply(&phi)?.inner(&psi, w.group)?;
    let pk = a.pairing_kernel();
    let mut rhs = Complex::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            rhs += pk[(x, y)] * phi.values()[x] * psi.values()[y].conj();
        }
    }
    rhs *= w.group * w.group;
    out.push(Check::new(
        "kernel_pairing_convention",
        &label,
        (lhs - rhs).norm(),
        tol,
        "<A phi, psi> matches the pairing form of the stored kernel",
    ));

    // alpha is a true action implemented by the closed-form kernel map.
    let mut resid: f64 = 0.0;
    let nxi = g.xi_cardinality();
    for _ in 0..trials.clamp(1, 20) {
        let i = rng.random_range(0..nxi);
        let j = rng.random_range(0..nxi);
        let xi = g.xi_at(i);
        let eta = g.xi_at(j);
        let lhs = alpha(&co, &xi, &alpha(&co, &eta, &a)?)?;
        let rhs = alpha(&co, &g.xi_op(&xi, &eta)?, &a)?;
        resid = resid.max(lhs.kernel().sub(rhs.kernel()).max_abs());
        let xi_inv = g.xi_inv(&xi)?;
        let u = rep_u_matrix(&co, &xi)?;
        let u_inv = rep_u_matrix(&co, &xi_inv)?.scale(co.m(&xi, &xi_inv)?.conj());
        let slow = u.matmul(a.kernel()).matmul(&u_inv);
        resid = resid.max(alpha(&co, &xi, &a)?.kernel().sub(&slow).max_abs());
    }
    out.push(Check::new(
        "phase_space_action",
        &label,
        resid,
        tol,
        "alpha_xi alpha_eta = alpha_{xi eta}; closed form = U A U^{-1}",
    ));

    // Band algebra: product and adjoint laws on random masked operators.
    let mut ok = true;
    for _ in 0..trials.clamp(1, 25) {
        let mask_a: Vec<_> = (0..n)
            .filter(|_| rng.random::<f64>() < 0.5)
            .map(|i| g.element_at(i))
            .collect();
        let mask_b: Vec<_> = (0..n)
            .filter(|_| rng.random::<f64>() < 0.5)
            .map(|i| g.element_at(i))
            .collect();
        if mask_a.is_empty() || mask_b.is_empty() {
            continue;
        }
        let ka = BandSet::from_elements(g.clone(), &mask_a);
        let kb = BandSet::from_elements(g.clone(), &mask_b);
        let op_a = band_truncate(&random_operator(rng, g)?, &ka)?.0;
        let op_b = band_truncate(&random_operator(rng, g)?, &kb)?.0;
        ok &= band_support(&op_a.compose(&op_b)?, 1e-12).is_subset(&ka.product(&kb));
        ok &= band_support(&op_a.adjoint(), 0.0) == band_support(&op_a, 0.0).inverse();
        ok &= band_support_by_action(&op_a, 1e-12)? == band_support(&op_a, 1e-12);
    }
    out.push(Check::boolean(
        "band_algebra_laws",
        &label,
        ok,
        tol,
        "band(AB) inside band(A) band(B); band(A*) = band(A)^-1; kernel and action routes agree",
    ));

    // Kernel multiplier: the phase-space average equals the entrywise
    // multiplier (the library rechecks internally; record the residual).
    let mut resid: f64 = 0.0;
    for _ in 0..trials.clamp(1, 50) {
        let b = random_operator(rng, g)?;
        let gsig = random_signal(rng, n);
        let mu = PhaseMeasure::delta0_tensor(g, &gsig)?;
        let averaged = qha_convolve(&co, &mu, &b)?;
        let direct = smooth_fourier(&co, &gsig, &b)?;
        resid = resid.max(averaged.kernel().sub(direct.kernel()).max_abs());
    }
    out.push(Check::new(
        "kernel_multiplier",
        &label,
        resid,
        tol,
        "(delta_0 x g) * A has kernel g^(x^-1 y) k_A(x, y)",
    ));

    // Smoothing directions: banded transform bands the operator; a
    // transform equal to one on the band reproduces it.
    let k_band = BandSet::from_elements(
        g.clone(),
        &[g.identity(), g.element_at(1 % n)],
    );
    let mut band_resid: f64 = 0.0;
    let mut repro_resid: f64 = 0.0;
    for _ in 0..trials.clamp(1, 25) {
        let b = random_operator(rng, g)?;
        let mut g_hat = Signal::zeros(n);
        for idx in k_band.indices() {
            g_hat.values_mut()[idx] =
                Complex::new(rng.random::<f64>() + 0.2, rng.random::<f64>());
        }
        let gsig = fourier_dual_inv(g, &g_hat)?;
        let smoothed = smooth_fourier(&co, &gsig, &b)?;
        // Largest kernel entry outside the band, relative to the scale.
        let scale = smoothed.kernel().max_abs().max(1e-30);
        for x in 0..n {
            for y in 0..n {
                let diff = g.op(&g.inv(&g.element_at(x))?, &g.element_at(y))?;
                if !k_band.contains(&diff) {
                    band_resid = band_resid.max(smoothed.kernel()[(x, y)].norm() / scale);
                }
            }
        }
        // Reproduction with g^ = 1 on the band.
        let banded = band_truncate(&b, &k_band)?.0;
        let mut ones = Signal::zeros(n);
        for idx in k_band.indices() {
            ones.values_mut()[idx] = Complex::new(1.0, 0.0);
        }
        let gsig = fourier_dual_inv(g, &ones)?;
        let back = smooth_fourier(&co, &gsig, &banded)?;
        repro_resid = repro_resid.max(back.kernel().sub(banded.kernel()).max_abs());
    }
    out.push(Check::new(
        "smoothing_bands_operator",
        &label,
        band_resid,
        tol,
        "supp g^ inside K forces the smoothed kernel into the band K",
    ));
    out.push(Check::new(
        "smoothing_reproduces_banded",
        &label,
        repro_resid,
        tol,
        "g^ = 1 on K reproduces K-banded operators exactly",
    ));

    // Phase-space convolution norm bound.
    let mut excess: f64 = 0.0;
    for _ in 0..trials.clamp(1, 10) {
        let b = random_operator(rng, g)?;
        let density = PhaseFunction::new(random_signal(rng, nxi).values().to_vec());
        let mu = PhaseMeasure::Density(density);
        excess = excess.max(qha_convolve(&co, &mu, &b)?.op_norm() - mu.total_variation(g) * b.op_norm());
    }
    out.push(Check::new(
        "qha_convolution_norm_bound",
        &label,
        excess.max(0.0),
        tol,
        "||mu * A|| <= ||mu||_TV ||A||",
    ));

    // Oscillation invariances and the Schur-type band bound.
    let (probes_g, probes_d) = default_probes(g, 2);
    let diag = KernelOperator::multiplication(g.clone(), &random_signal(rng, n))?;
    let report = oscillation(&co, &diag, &probes_g, &probes_d)?;
    let mut resid = report.osc_dual;
    let conv = KernelOperator::convolution(g.clone(), &random_signal(rng, n))?;
    let report = oscillation(&co, &conv, &probes_g, &probes_d)?;
    resid = resid.max(report.osc_group);
    out.push(Check::new(
        "oscillation_invariances",
        &label,
        resid,
        tol,
        "diagonal symbols are modulation invariant; convolutions are translation invariant",
    ));
    let banded = band_truncate(&random_operator(rng, g)?, &k_band)?.0;
    let band = band_support(&banded, 1e-12);
    let mut excess: f64 = 0.0;
    for nu in &probes_d {
        let xi = PhasePoint {
            x: g.identity(),
            nu: nu.clone(),
        };
        let osc = alpha(&co, &xi, &banded)?.sub(&banded)?.op_norm();
        excess = excess.max(osc - oscillation_dual_bound(&banded, nu, &band)?);
    }
    out.push(Check::new(
        "oscillation_band_bound",
        &label,
        excess.max(0.0),
        tol,
        "||alpha_{(e,nu)} A - A|| <= max_{k in K} |nu(k) - 1| schur(A)",
    ));

    // Fourier conjugation: multiplication goes to Toeplitz convolution in
    // the dual variable; conjugating twice returns the operator.
    let f = random_signal(rng, n);
    let mf = KernelOperator::multiplication(g.clone(), &f)?;
    let tilde = fourier_conjugate(&mf)?;
    let f_hat = fourier(g, &f)?;
    let mut resid: f64 = 0.0;
    for nu in 0..n {
        for mu in 0..n {
            let diff = g.op(&g.inv(&g.element_at(mu))?, &g.element_at(nu))?;
            resid = resid.max((tilde.kernel()[(nu, mu)] - f_hat.values()[g.index_of(&diff)]).norm());
        }
    }
    let b = random_operator(rng, g)?;
    let back = fourier_conjugate(&fourier_conjugate(&b)?)?;
    resid = resid.max(back.kernel().sub(b.kernel()).max_abs());
    out.push(Check::new(
        "fourier_conjugation",
        &label,
        resid,
        tol,
        "F M_f F^-1 is convolution by the transform; the round trip is the identity",
    ));

    Ok(out)
}

/// Windowed-lattice identities: gallery verdicts, truncation evidence,
/// limit-shift compatibility and the periodization bridge.
pub fn lattice_suite(tol: f64) -> Result<Vec<Check>> {
    let label = "Z^1".to_string();
    let mut out = Vec::new();

    // Reciprocal diagonal: compact with exactly computable evidence.
    let radius = 30;
    let recip = BandedZOperator::diagonal_from_fn(
        1,
        radius,
        |j| Complex::new(1.0 / (1.0 + j[0].abs() as f64), 0.0),
        TailClass::C0,
    )?;
    let report = compactness_diagnostic(&recip, 1e-6)?;
    let mut resid: f64 = if report.verdict == CompactnessVerdict::Compact {
        0.0
    } else {
        1.0
    };
    for &(nn, sigma) in &report.evidence {
        if nn < radius {
            resid = resid.max((sigma - 1.0 / (nn as f64 + 2.0)).abs());
        }
    }
    out.push(Check::new(
        "compactness_evidence_diagonal",
        &label,
        resid,
        tol.max(1e-12),
        "diag 1/(1+|j|): compact, tail norms exactly 1/(n+2)",
    ));

    // Identity and shift: not compact, nonzero limit operators.
    let id = example_gallery(
        &GalleryKind::ConvL1 {
            psi: vec![(0, Complex::new(1.0, 0.0))],
        },
        16,
    )?;
    let s = example_gallery(
        &GalleryKind::ConvL1 {
            psi: vec![(1, Complex::new(1.0, 0.0))],
        },
        16,
    )?;
    let id_report = compactness_diagnostic(&id.operator, 1e-6)?;
    let s_report = compactness_diagnostic(&s.operator, 1e-6)?;
    let s_limit = limit_operator(&s.operator, &LimitOperatorSpec::axis(0, true))?;
    let ok = id_report.verdict == CompactnessVerdict::NotCompact
        && s_report.verdict == CompactnessVerdict::NotCompact
        && !s_limit.is_zero(1e-12);
    out.push(Check::boolean(
        "compactness_laurent",
        &label,
        ok,
        tol,
        "identity and shift are not compact; the shift is its own limit operator",
    ));

    // Product gallery: compact with the tail dropping under the threshold.
    let product = example_gallery(
        &GalleryKind::Product {
            rate: 2.0,
            psi: vec![
                (-1, Complex::new(1.0, 0.0)),
                (0, Complex::new(0.5, 0.0)),
                (1, Complex::new(0.25, 0.0)),
            ],
        },
        40,
    )?;
    let report = compactness_diagnostic(&product.operator, 1e-6)?;
    let monotone = report
        .evidence
        .windows(2)
        .all(|p| p[1].1 <= p[0].1 + 1e-12);
    let ok = report.verdict == CompactnessVerdict::Compact
        && report.n_star.is_some()
        && monotone;
    out.push(Check::boolean(
        "compactness_product_gallery",
        &label,
        ok,
        tol,
        "vanishing symbol times banded convolution: compact, monotone evidence, threshold reached",
    ));

    // Limit extraction commutes with lattice shifts for structured tails.
    let spec = LimitOperatorSpec::axis(0, true);
    let direct = limit_operator(&product.operator, &spec)?;
    let shifted = limit_operator(&shift(&product.operator, &[7])?, &spec)?;
    let ok = direct.is_zero(1e-12) && shifted.is_zero(1e-12);
    let s_direct = limit_operator(&s.operator, &spec)?;
    let s_shifted = limit_operator(&shift(&s.operator, &[5])?, &spec)?;
    let same = s_direct
        .diagonals()
        .iter()
        .zip(s_shifted.diagonals())
        .all(|(a, b)| a.values == b.values);
    out.push(Check::boolean(
        "limit_shift_invariance",
        &label,
        ok && same,
        tol,
        "limits of shifted operators agree with unshifted limits",
    ));

    // Periodization bridge into the finite-group band analysis.
    let (group, op) = periodize(&product.operator)?;
    let band = band_support(&op, 0.0);
    let width = band
        .elements()
        .iter()
        .map(|e| {
            let r = e.residues()[0] as i64;
            let m = group.orders()[0] as i64;
            r.min(m - r)
        })
        .max()
        .unwrap_or(0);
    out.push(Check::boolean(
        "periodization_bridge",
        &label,
        width == product.operator.band_width(),
        tol,
        "wrapping the window onto a cyclic group reproduces the band width",
    ));

    Ok(out)
}

/// Folner boxes and the partition-of-unity conditions.
pub fn partition_suite(tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    // d = 1: the canonical box and the exact invariance value.
    let probe = probe_box(1, 1);
    let k = folner_for(Ratio::new(1, 20), &probe, 1)?;
    let ok_n = k.dims() == [41];
    let p = build_partition(&k, 100)?;
    let report = verify_partition(&p, &probe, Ratio::new(1, 20), 3)?;
    let ok = ok_n
        && report.pass
        && report.almost_invariance.equals_folner_ratio
        && report.almost_invariance.max_sum == Ratio::new(2, 41);
    out.push(Check::boolean(
        "folner_partition_line",
        "Z^1",
        ok,
        tol,
        "box of side 41 at tolerance 1/20; invariance sums exactly 2/41",
    ));

    // d = 2 with the unit cross.
    let probe = probe_cross(2, 1);
    let k = folner_for(Ratio::new(1, 10), &probe, 2)?;
    let p = build_partition(&k, 25)?;
    let report = verify_partition(&p, &probe, Ratio::new(1, 10), 2)?;
    out.push(Check::boolean(
        "folner_partition_plane",
        "Z^2",
        report.pass && report.almost_invariance.equals_folner_ratio,
        tol,
        "square box with counted cross ratios below 1/10; all four conditions exact",
    ));

    // Scaling law of the invariance sums.
    let mut ok = true;
    for n in [5i64, 10, 20] {
        let k = crate::propa::FolnerSet::new(vec![n])?;
        let p = build_partition(&k, 3 * n)?;
        let report = verify_partition(&p, &[vec![1], vec![-1]], Ratio::new(1, 1), 2)?;
        for (h, v) in &report.almost_invariance.per_probe {
            ok &= *v == Ratio::new(2 * h[0].abs(), n);
        }
    }
    out.push(Check::boolean(
        "folner_scaling",
        "Z^1",
        ok,
        tol,
        "invariance sum equals 2|h|/N for |h| < N",
    ));

    Ok(out)
}
