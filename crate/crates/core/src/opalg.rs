//! Operators on a finite abelian group stored by their integral kernels:
//! phase-space conjugation, band supports, convolution of operators with
//! phase-space measures, the Fourier-side kernel multiplier, oscillation
//! moduli and Fourier conjugation.
//!
//! Conventions, fixed once:
//! - The stored matrix is the action kernel: `(Af)(x) = sum_y k(x,y) f(y) w`
//!   with the row indexing the output variable and `w` the Haar weight of
//!   the operator's domain (1 on G, `1/|G|` on the dual).
//! - The band difference of an entry `(x, y)` is `x^{-1} y`; a band set `K`
//!   collects the differences realized above a threshold.
//! - Smoothing an operator in the dual direction multiplies the kernel
//!   entrywise by `h_g(x, y) = g^(x^{-1} y)` with `g^` the transform of
//!   [`crate::group::fourier_dual`]; this is verified at runtime against the
//!   independent phase-space average.

use std::collections::BTreeSet;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::group::{fourier_dual, DualElement, FiniteAbelianGroup, GroupElement, Signal};
use crate::heisenberg::{Cocycle, PhaseFunction, PhasePoint};
use crate::linalg::CMatrix;
use crate::scalar::{c_one, c_real, c_zero, Scalar, C};

/// Which side of the Fourier transform the operator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Functions on G; Haar weight 1 per point.
    Group,
    /// Functions on the dual; Haar weight `1/|G|` per point.
    Dual,
}

/// An operator stored as its integral kernel (action convention, row =
/// output index).
#[derive(Debug, Clone)]
pub struct KernelOperator<T> {
    group: FiniteAbelianGroup,
    side: Side,
    kernel: CMatrix<T>,
}

impl<T: Scalar> KernelOperator<T> {
    pub fn new(group: FiniteAbelianGroup, kernel: CMatrix<T>) -> Result<Self> {
        Self::with_side(group, Side::Group, kernel)
    }

    pub fn with_side(group: FiniteAbelianGroup, side: Side, kernel: CMatrix<T>) -> Result<Self> {
        let n = group.cardinality();
        if kernel.rows() != n || kernel.cols() != n {
            return Err(Error::ShapeMismatch {
                what: "kernel matrix",
                expected: n,
                found: kernel.rows().max(kernel.cols()),
            });
        }
        if kernel
            .data()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter {
                reason: "kernel entries must be finite".into(),
            });
        }
        Ok(KernelOperator {
            group,
            side,
            kernel,
        })
    }

    pub fn from_fn(
        group: FiniteAbelianGroup,
        f: impl FnMut(&GroupElement, &GroupElement) -> C<T>,
    ) -> Self {
        let n = group.cardinality();
        let mut f = f;
        let kernel = CMatrix::from_fn(n, n, |r, c| f(&group.element_at(r), &group.element_at(c)));
        KernelOperator {
            group,
            side: Side::Group,
            kernel,
        }
    }

    /// Identity operator on G (kernel `I / w`).
    pub fn identity(group: FiniteAbelianGroup) -> Self {
        let n = group.cardinality();
        let kernel = CMatrix::identity(n);
        KernelOperator {
            group,
            side: Side::Group,
            kernel,
        }
    }

    /// Identity operator on the dual side.
    pub fn identity_dual(group: FiniteAbelianGroup) -> Self {
        let n = group.cardinality();
        let w = group.weights::<T>().dual;
        let kernel = CMatrix::identity(n).scale(c_real(T::one() / w));
        KernelOperator {
            group,
            side: Side::Dual,
            kernel,
        }
    }

    /// Multiplication operator `M_f`.
    pub fn multiplication(group: FiniteAbelianGroup, f: &Signal<T>) -> Result<Self> {
        let n = group.cardinality();
        if f.len() != n {
            return Err(Error::ShapeMismatch {
                what: "multiplier length",
                expected: n,
                found: f.len(),
            });
        }
        let mut kernel = CMatrix::zeros(n, n);
        for i in 0..n {
            kernel[(i, i)] = f.values()[i]; // domain weight 1 on G
        }
        Ok(KernelOperator {
            group,
            side: Side::Group,
            kernel,
        })
    }

    /// Convolution operator `C_psi f = psi * f`, kernel `k(x,y) = psi(x y^{-1})`.
    pub fn convolution(group: FiniteAbelianGroup, psi: &Signal<T>) -> Result<Self> {
        let n = group.cardinality();
        if psi.len() != n {
            return Err(Error::ShapeMismatch {
                what: "convolution symbol length",
                expected: n,
                found: psi.len(),
            });
        }
        let mut kernel = CMatrix::zeros(n, n);
        for x in 0..n {
            let xe = group.element_at(x);
            for y in 0..n {
                let ye_inv = group.inv(&group.element_at(y))?;
                kernel[(x, y)] = psi.values()[group.index_of(&group.op(&xe, &ye_inv)?)];
            }
        }
        Ok(KernelOperator {
            group,
            side: Side::Group,
            kernel,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn kernel(&self) -> &CMatrix<T> {
        &self.kernel
    }

    /// Haar weight of the operator's domain.
    pub fn weight(&self) -> T {
        match self.side {
            Side::Group => self.group.weights::<T>().group,
            Side::Dual => self.group.weights::<T>().dual,
        }
    }

    /// Kernel in the pairing orientation (input variable first), i.e. the
    /// transpose of the stored action matrix. With this orientation
    /// `<A phi, psi> = sum_{x,y} k(x,y) phi(x) conj(psi(y)) w^2`.
    pub fn pairing_kernel(&self) -> CMatrix<T> {
        self.kernel.transpose()
    }

    pub fn apply(&self, f: &Signal<T>) -> Result<Signal<T>> {
        let n = self.group.cardinality();
        if f.len() != n {
            return Err(Error::ShapeMismatch {
                what: "signal length",
                expected: n,
                found: f.len(),
            });
        }
        let w = c_real(self.weight());
        let out = self
            .kernel
            .matvec(f.values())
            .into_iter()
            .map(|z| z * w)
            .collect();
        Ok(Signal::new(out))
    }

    /// Adjoint with respect to the weighted inner product: the conjugate
    /// transpose of the kernel (uniform weights drop out).
    pub fn adjoint(&self) -> Self {
        KernelOperator {
            group: self.group.clone(),
            side: self.side,
            kernel: self.kernel.adjoint(),
        }
    }

    /// Operator composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.group != other.group || self.side != other.side {
            return Err(Error::InvalidParameter {
                reason: "composition requires operators on the same domain".into(),
            });
        }
        let kernel = self
            .kernel
            .matmul(&other.kernel)
            .scale(c_real(self.weight()));
        Ok(KernelOperator {
            group: self.group.clone(),
            side: self.side,
            kernel,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.group != other.group || self.side != other.side {
            return Err(Error::InvalidParameter {
                reason: "sum requires operators on the same domain".into(),
            });
        }
        Ok(KernelOperator {
            group: self.group.clone(),
            side: self.side,
            kernel: self.kernel.add(&other.kernel),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        KernelOperator {
            group: self.group.clone(),
            side: self.side,
            kernel: self.kernel.scale(s),
        }
    }

    /// Operator norm on the weighted l^2 space (spectral norm of `w k`).
    pub fn op_norm(&self) -> T {
        self.kernel.spectral_norm() * self.weight()
    }

    pub fn hs_norm(&self) -> T {
        self.kernel.frobenius_norm() * self.weight()
    }

    /// Schur-test upper bound `sqrt(max row sum * max col sum)` of the
    /// weighted kernel; an upper bound for the induced norm on every l^p.
    pub fn schur_bound(&self) -> T {
        let w = self.weight();
        (self.kernel.max_row_sum() * w * self.kernel.max_col_sum() * w).sqrt()
    }
}

/// A set of admissible band differences, stored as element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSet {
    group: FiniteAbelianGroup,
    members: BTreeSet<usize>,
}

impl BandSet {
    pub fn empty(group: FiniteAbelianGroup) -> Self {
        BandSet {
            group,
            members: BTreeSet::new(),
        }
    }

    pub fn full(group: FiniteAbelianGroup) -> Self {
        let members = (0..group.cardinality()).collect();
        BandSet { group, members }
    }

    pub fn identity_only(group: FiniteAbelianGroup) -> Self {
        let idx = group.index_of(&group.identity());
        BandSet {
            group,
            members: BTreeSet::from([idx]),
        }
    }

    pub fn from_elements(group: FiniteAbelianGroup, elems: &[GroupElement]) -> Self {
        let members = elems.iter().map(|e| group.index_of(e)).collect();
        BandSet { group, members }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn insert(&mut self, e: &GroupElement) {
        self.members.insert(self.group.index_of(e));
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.members.contains(&self.group.index_of(e))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.members
            .iter()
            .map(|&i| self.group.element_at(i))
            .collect()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains_identity(&self) -> bool {
        self.members
            .contains(&self.group.index_of(&self.group.identity()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.members.iter().all(|&i| {
            let inv = self.group.inv(&self.group.element_at(i)).expect("shape ok");
            self.members.contains(&self.group.index_of(&inv))
        })
    }

    /// `K^{-1}`.
    pub fn inverse(&self) -> Self {
        let members = self
            .members
            .iter()
            .map(|&i| {
                let inv = self.group.inv(&self.group.element_at(i)).expect("shape ok");
                self.group.index_of(&inv)
            })
            .collect();
        BandSet {
            group: self.group.clone(),
            members,
        }
    }

    /// Pointwise product set `K1 K2`.
    pub fn product(&self, other: &Self) -> Self {
        let mut members = BTreeSet::new();
        for &i in &self.members {
            for &j in &other.members {
                let prod = self
                    .group
                    .op(&self.group.element_at(i), &self.group.element_at(j))
                    .expect("shape ok");
                members.insert(self.group.index_of(&prod));
            }
        }
        BandSet {
            group: self.group.clone(),
            members,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        BandSet {
            group: self.group.clone(),
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// Conjugation by the representation: `alpha_xi(A) = U_xi A U_xi^{-1}`.
///
/// The kernel transforms as
/// `k(x, y) -> nu(x) conj(nu(y)) k(x0^{-1} x, x0^{-1} y)`; the phase table
/// `a` cancels, so the action is independent of the cocycle normalization.
pub fn alpha<T: Scalar>(
    c: &Cocycle<T>,
    xi: &PhasePoint,
    a: &KernelOperator<T>,
) -> Result<KernelOperator<T>> {
    let g = c.group();
    if g != a.group() {
        return Err(Error::InvalidParameter {
            reason: "alpha requires the operator and cocycle on the same group".into(),
        });
    }
    if a.side() != Side::Group {
        return Err(Error::InvalidParameter {
            reason: "alpha acts on operators over G".into(),
        });
    }
    let n = g.cardinality();
    let x0_inv = g.inv(&xi.x)?;
    let nu_idx = g.dual_index_of(&xi.nu);
    let mut kernel = CMatrix::zeros(n, n);
    for x in 0..n {
        let sx = g.index_of(&g.op(&x0_inv, &g.element_at(x))?);
        let phase_x = g.character_at::<T>(nu_idx, x);
        for y in 0..n {
            let sy = g.index_of(&g.op(&x0_inv, &g.element_at(y))?);
            let phase = phase_x * g.character_at::<T>(nu_idx, y).conj();
            kernel[(x, y)] = phase * a.kernel()[(sx, sy)];
        }
    }
    KernelOperator::with_side(g.clone(), Side::Group, kernel)
}

/// Minimal band set at tolerance `tol` (relative to the largest kernel
/// entry): the set of differences `x^{-1} y` with `|k(x,y)| > tol max|k|`.
/// With `tol = 0` the membership is exact.
pub fn band_support<T: Scalar>(a: &KernelOperator<T>, tol: T) -> BandSet {
    let g = a.group().clone();
    let n = g.cardinality();
    let threshold = tol * a.kernel().max_abs();
    let mut band = BandSet::empty(g.clone());
    for x in 0..n {
        let x_inv = g.inv(&g.element_at(x)).expect("shape ok");
        for y in 0..n {
            if a.kernel()[(x, y)].norm() > threshold {
                band.insert(&g.op(&x_inv, &g.element_at(y)).expect("shape ok"));
            }
        }
    }
    band
}

/// Default relative tolerance keeping float noise out of band sets.
pub fn band_support_default<T: Scalar>(a: &KernelOperator<T>) -> BandSet {
    band_support(a, T::lit(1e-12))
}

/// Band support recovered through the action on point masses: the operator
/// is applied to every delta and the support of each image is collected.
/// Yields the same set as [`band_support`]; the two routes express the
/// kernel-support characterization of band operators.
pub fn band_support_by_action<T: Scalar>(a: &KernelOperator<T>, tol: T) -> Result<BandSet> {
    let g = a.group().clone();
    let n = g.cardinality();
    let threshold = tol * a.kernel().max_abs() * a.weight();
    let mut band = BandSet::empty(g.clone());
    for h in 0..n {
        let he = g.element_at(h);
        let image = a.apply(&Signal::delta(&g, &he))?;
        for x in 0..n {
            if image.values()[x].norm() > threshold {
                let diff = g.op(&g.inv(&g.element_at(x))?, &he)?;
                band.insert(&diff);
            }
        }
    }
    Ok(band)
}

/// Whether `A` is a band operator of band-width at most `K` at the given
/// relative tolerance.
pub fn is_band_operator<T: Scalar>(a: &KernelOperator<T>, k: &BandSet, tol: T) -> bool {
    band_support(a, tol).is_subset(k)
}

/// Nearest band operator: zeroes every kernel entry whose difference lies
/// outside `K`, returning the truncation and the operator-norm distance.
pub fn band_truncate<T: Scalar>(
    a: &KernelOperator<T>,
    k: &BandSet,
) -> Result<(KernelOperator<T>, T)> {
    let g = a.group().clone();
    let n = g.cardinality();
    let mut kernel = CMatrix::zeros(n, n);
    for x in 0..n {
        let x_inv = g.inv(&g.element_at(x))?;
        for y in 0..n {
            let diff = g.op(&x_inv, &g.element_at(y))?;
            if k.contains(&diff) {
                kernel[(x, y)] = a.kernel()[(x, y)];
            }
        }
    }
    let truncated = KernelOperator::with_side(g, a.side(), kernel)?;
    let distance = a.sub(&truncated)?.op_norm();
    Ok((truncated, distance))
}

/// A finite complex measure on phase space: weighted point masses or a
/// density against the phase-space Haar weight.
#[derive(Debug, Clone)]
pub enum PhaseMeasure<T> {
    Atoms(Vec<(PhasePoint, C<T>)>),
    Density(PhaseFunction<T>),
}

impl<T: Scalar> PhaseMeasure<T> {
    /// Unit point mass at the identity of phase space.
    pub fn delta_identity(group: &FiniteAbelianGroup) -> Self {
        PhaseMeasure::Atoms(vec![(group.xi_identity(), c_one())])
    }

    /// The measure `delta_0 (x) g` supported on `{e} x G^`, with `g`
    /// integrated against the dual Haar weight.
    pub fn delta0_tensor(group: &FiniteAbelianGroup, g_on_dual: &Signal<T>) -> Result<Self> {
        let n = group.cardinality();
        if g_on_dual.len() != n {
            return Err(Error::ShapeMismatch {
                what: "dual signal length",
                expected: n,
                found: g_on_dual.len(),
            });
        }
        let wd = group.weights::<T>().dual;
        let atoms = (0..n)
            .map(|i| {
                let point = PhasePoint {
                    x: group.identity(),
                    nu: group.dual_at(i),
                };
                (point, g_on_dual.values()[i] * c_real(wd))
            })
            .collect();
        Ok(PhaseMeasure::Atoms(atoms))
    }

    /// The product density `f (x) g` on phase space.
    pub fn tensor(
        group: &FiniteAbelianGroup,
        f_on_group: &Signal<T>,
        g_on_dual: &Signal<T>,
    ) -> Result<Self> {
        let n = group.cardinality();
        if f_on_group.len() != n || g_on_dual.len() != n {
            return Err(Error::ShapeMismatch {
                what: "tensor factor length",
                expected: n,
                found: f_on_group.len().min(g_on_dual.len()),
            });
        }
        let mut values = Vec::with_capacity(group.xi_cardinality());
        for x in 0..n {
            for nu in 0..n {
                values.push(f_on_group.values()[x] * g_on_dual.values()[nu]);
            }
        }
        Ok(PhaseMeasure::Density(PhaseFunction::new(values)))
    }

    /// Total variation norm.
    pub fn total_variation(&self, group: &FiniteAbelianGroup) -> T {
        match self {
            PhaseMeasure::Atoms(atoms) => atoms
                .iter()
                .map(|(_, w)| w.norm())
                .fold(T::zero(), |a, b| a + b),
            PhaseMeasure::Density(f) => {
                let w = group.weights::<T>().phase;
                f.values()
                    .iter()
                    .map(|z| z.norm())
                    .fold(T::zero(), |a, b| a + b)
                    * w
            }
        }
    }
}

/// Convolution of a phase-space measure with an operator:
/// `mu * A = integral of alpha_z(A) d mu(z)`.
pub fn qha_convolve<T: Scalar>(
    c: &Cocycle<T>,
    mu: &PhaseMeasure<T>,
    a: &KernelOperator<T>,
) -> Result<KernelOperator<T>> {
    let g = c.group();
    let n = g.cardinality();
    let mut kernel = CMatrix::zeros(n, n);
    match mu {
        PhaseMeasure::Atoms(atoms) => {
            for (point, weight) in atoms {
                if weight.norm() == T::zero() {
                    continue;
                }
                let shifted = alpha(c, point, a)?;
                kernel = kernel.add(&shifted.kernel().scale(*weight));
            }
        }
        PhaseMeasure::Density(f) => {
            if f.len() != g.xi_cardinality() {
                return Err(Error::ShapeMismatch {
                    what: "density length",
                    expected: g.xi_cardinality(),
                    found: f.len(),
                });
            }
            let w_xi = g.weights::<T>().phase;
            for (idx, point) in g.xi_points().enumerate() {
                let weight = f.values()[idx] * c_real(w_xi);
                if weight.norm() == T::zero() {
                    continue;
                }
                let shifted = alpha(c, &point, a)?;
                kernel = kernel.add(&shifted.kernel().scale(weight));
            }
        }
    }
    KernelOperator::with_side(g.clone(), Side::Group, kernel)
}

/// The entrywise multiplier implementing smoothing in the dual direction:
/// `h_g(x, y) = g^(x^{-1} y)` on the action kernel.
pub fn multiplier_matrix<T: Scalar>(
    group: &FiniteAbelianGroup,
    g_hat: &Signal<T>,
) -> Result<CMatrix<T>> {
    let n = group.cardinality();
    if g_hat.len() != n {
        return Err(Error::ShapeMismatch {
            what: "transform length",
            expected: n,
            found: g_hat.len(),
        });
    }
    let mut m = CMatrix::zeros(n, n);
    for x in 0..n {
        let x_inv = group.inv(&group.element_at(x))?;
        for y in 0..n {
            let diff = group.op(&x_inv, &group.element_at(y))?;
            m[(x, y)] = g_hat.values()[group.index_of(&diff)];
        }
    }
    Ok(m)
}

/// Smooths `A` in the dual direction by `g` on the dual group, computing
/// both the phase-space average `(delta_0 (x) g) * A` and the kernel
/// multiplier `h_g . k_A`, and insisting that they agree.
pub fn smooth_fourier<T: Scalar>(
    c: &Cocycle<T>,
    g_on_dual: &Signal<T>,
    a: &KernelOperator<T>,
) -> Result<KernelOperator<T>> {
    smooth_fourier_tol(c, g_on_dual, a, T::lit(1e-10))
}

pub fn smooth_fourier_tol<T: Scalar>(
    c: &Cocycle<T>,
    g_on_dual: &Signal<T>,
    a: &KernelOperator<T>,
    tol: T,
) -> Result<KernelOperator<T>> {
    let g = c.group();
    // Route one: average of conjugated copies.
    let mu = PhaseMeasure::delta0_tensor(g, g_on_dual)?;
    let averaged = qha_convolve(c, &mu, a)?;
    // Route two: entrywise multiplier by the transform of g.
    let g_hat = fourier_dual(g, g_on_dual)?;
    let kernel = multiplier_matrix(g, &g_hat)?.hadamard(a.kernel());
    let direct = KernelOperator::with_side(g.clone(), Side::Group, kernel)?;

    let residual = averaged.kernel().sub(direct.kernel()).max_abs();
    let scale = a.kernel().max_abs().max(T::one());
    if residual > tol * scale {
        return Err(Error::ConsistencyFailure {
            check: "kernel multiplier vs phase-space average",
            residual: residual.to_f64().unwrap_or(f64::NAN),
            tol: (tol * scale).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(direct)
}

/// Oscillation of an operator under the probed phase-space shifts.
#[derive(Debug, Clone)]
pub struct OscillationReport<T> {
    /// Operator-norm differences for translation probes `(x, 1)`.
    pub group_probes: Vec<(GroupElement, T)>,
    /// Operator-norm differences for modulation probes `(e, nu)`.
    pub dual_probes: Vec<(DualElement, T)>,
    pub osc_group: T,
    pub osc_dual: T,
}

/// Exact operator-norm oscillation `||alpha_xi(A) - A||` over the probes.
pub fn oscillation<T: Scalar>(
    c: &Cocycle<T>,
    a: &KernelOperator<T>,
    probes_group: &[GroupElement],
    probes_dual: &[DualElement],
) -> Result<OscillationReport<T>> {
    let g = c.group();
    let mut group_probes = Vec::with_capacity(probes_group.len());
    let mut osc_group = T::zero();
    for x in probes_group {
        let xi = PhasePoint {
            x: x.clone(),
            nu: g.dual_identity(),
        };
        let diff = alpha(c, &xi, a)?.sub(a)?.op_norm();
        osc_group = osc_group.max(diff);
        group_probes.push((x.clone(), diff));
    }
    let mut dual_probes = Vec::with_capacity(probes_dual.len());
    let mut osc_dual = T::zero();
    for nu in probes_dual {
        let xi = PhasePoint {
            x: g.identity(),
            nu: nu.clone(),
        };
        let diff = alpha(c, &xi, a)?.sub(a)?.op_norm();
        osc_dual = osc_dual.max(diff);
        dual_probes.push((nu.clone(), diff));
    }
    Ok(OscillationReport {
        group_probes,
        dual_probes,
        osc_group,
        osc_dual,
    })
}

/// Schur-type bound for the modulation oscillation of a band operator:
/// `||alpha_{(e,nu)}(A) - A|| <= max_{k in K} |nu(k) - 1| * schur(A)`.
pub fn oscillation_dual_bound<T: Scalar>(
    a: &KernelOperator<T>,
    nu: &DualElement,
    band: &BandSet,
) -> Result<T> {
    let g = a.group();
    let mut factor = T::zero();
    for k in band.elements() {
        let v = (g.character::<T>(nu, &k)? - c_one()).norm();
        factor = factor.max(v);
    }
    Ok(factor * a.schur_bound())
}

/// Default probe sets: the coordinate generators of G and of the dual and
/// their first `size` powers, identity excluded.
pub fn default_probes(
    group: &FiniteAbelianGroup,
    size: usize,
) -> (Vec<GroupElement>, Vec<DualElement>) {
    let mut seen = BTreeSet::new();
    let mut elems = Vec::new();
    for axis in 0..group.rank() {
        for power in 1..=size {
            let mut res = vec![0i64; group.rank()];
            res[axis] = power as i64;
            let e = group.reduce(&res).expect("shape ok");
            let idx = group.index_of(&e);
            if idx != 0 && seen.insert(idx) {
                elems.push(e);
            }
        }
    }
    let duals = elems
        .iter()
        .map(|e| {
            group
                .dual_element(&e.residues().iter().map(|&r| r as i64).collect::<Vec<_>>())
                .expect("same shape")
        })
        .collect();
    (elems, duals)
}

/// The Fourier transform as a matrix from signals on G to signals on the
/// dual.
pub fn fourier_matrix<T: Scalar>(group: &FiniteAbelianGroup) -> CMatrix<T> {
    let n = group.cardinality();
    let wg = group.weights::<T>().group;
    CMatrix::from_fn(n, n, |nu, x| {
        group.character_at::<T>(nu, x).conj() * c_real(wg)
    })
}

pub fn fourier_inv_matrix<T: Scalar>(group: &FiniteAbelianGroup) -> CMatrix<T> {
    let n = group.cardinality();
    let wd = group.weights::<T>().dual;
    CMatrix::from_fn(n, n, |x, nu| group.character_at::<T>(nu, x) * c_real(wd))
}

/// Conjugation by the Fourier transform, toggling the operator's side:
/// `A -> F A F^{-1}` on the group side, `B -> F^{-1} B F` on the dual side,
/// so that applying it twice returns the original operator.
///
/// On the group side the resulting kernel is
/// `k~(nu, mu) = sum_{x,y} k(x,y) conj(nu(x)) mu(y) wG^2`.
pub fn fourier_conjugate<T: Scalar>(a: &KernelOperator<T>) -> Result<KernelOperator<T>> {
    let g = a.group().clone();
    let n = g.cardinality();
    match a.side() {
        Side::Group => {
            let wg = g.weights::<T>().group;
            let scale = c_real(wg * wg);
            let mut kernel = CMatrix::zeros(n, n);
            for nu in 0..n {
                for mu in 0..n {
                    let mut acc: C<T> = c_zero();
                    for x in 0..n {
                        let cx = g.character_at::<T>(nu, x).conj();
                        for y in 0..n {
                            acc += a.kernel()[(x, y)] * cx * g.character_at::<T>(mu, y);
                        }
                    }
                    kernel[(nu, mu)] = acc * scale;
                }
            }
            KernelOperator::with_side(g, Side::Dual, kernel)
        }
        Side::Dual => {
            let wd = g.weights::<T>().dual;
            let scale = c_real(wd * wd);
            let mut kernel = CMatrix::zeros(n, n);
            for x in 0..n {
                for y in 0..n {
                    let mut acc: C<T> = c_zero();
                    for nu in 0..n {
                        let cx = g.character_at::<T>(nu, x);
                        for mu in 0..n {
                            acc += a.kernel()[(nu, mu)] * cx * g.character_at::<T>(mu, y).conj();
                        }
                    }
                    kernel[(x, y)] = acc * scale;
                }
            }
            KernelOperator::with_side(g, Side::Group, kernel)
        }
    }
}

/// Mass-one triangular bumps on G shrinking to the point mass at the
/// identity; ordered from widest to the delta.
pub fn fejer_family<T: Scalar>(group: &FiniteAbelianGroup, stages: usize) -> Vec<Signal<T>> {
    bump_family(group, stages, T::one())
}

/// Same bumps on the dual group, normalized against the dual Haar weight
/// (total mass one as a measure).
pub fn fejer_family_dual<T: Scalar>(group: &FiniteAbelianGroup, stages: usize) -> Vec<Signal<T>> {
    bump_family(group, stages, group.weights::<T>().dual)
}

fn bump_family<T: Scalar>(group: &FiniteAbelianGroup, stages: usize, weight: T) -> Vec<Signal<T>> {
    let max_extent = group.orders().iter().map(|&n| n / 2).max().unwrap_or(0);
    let mut family = Vec::with_capacity(stages);
    for stage in 0..stages {
        let radius = if stages <= 1 {
            0
        } else {
            // Linear shrink from the largest extent down to zero.
            max_extent * (stages - 1 - stage) / (stages - 1)
        };
        family.push(triangular_bump(group, radius, weight));
    }
    family
}

fn triangular_bump<T: Scalar>(group: &FiniteAbelianGroup, radius: usize, weight: T) -> Signal<T> {
    let n = group.cardinality();
    let mut values = vec![c_zero(); n];
    let mut mass = T::zero();
    for (idx, e) in group.elements().enumerate() {
        let mut v = T::one();
        for (&r, &order) in e.residues().iter().zip(group.orders()) {
            let dist = r.min(order - r); // circular distance to the identity
            let t = T::one() - T::from_usize_exact(dist) / T::from_usize_exact(radius + 1);
            v *= t.max(T::zero());
        }
        values[idx] = c_real(v);
        mass += v * weight;
    }
    let norm = c_real(T::one() / mass);
    Signal::new(values.into_iter().map(|z| z * norm).collect())
}

/// One stage of a membership profile.
#[derive(Debug, Clone)]
pub struct C1Stage<T> {
    pub index: usize,
    /// `||(f_n (x) g_n) * A - A||` for the joint family.
    pub error: T,
    /// `||(f_n (x) delta_0) * A - A||` (translation direction only).
    pub error_group: T,
    /// `||(delta_0 (x) g_n) * A - A||` (modulation direction only).
    pub error_dual: T,
}

/// Quantitative membership profile: smoothing errors along an approximate
/// unit, plus the band supports on both sides of the Fourier transform.
#[derive(Debug, Clone)]
pub struct C1Profile<T> {
    pub stages: Vec<C1Stage<T>>,
    pub band: BandSet,
    pub band_fourier_side: BandSet,
}

/// Runs the approximate-unit families against `A`. The families must have
/// equal length; entries are paired stage by stage.
pub fn c1_membership_profile<T: Scalar>(
    c: &Cocycle<T>,
    a: &KernelOperator<T>,
    f_family: &[Signal<T>],
    g_family: &[Signal<T>],
) -> Result<C1Profile<T>> {
    if f_family.len() != g_family.len() {
        return Err(Error::ShapeMismatch {
            what: "approximate-unit family length",
            expected: f_family.len(),
            found: g_family.len(),
        });
    }
    let g = c.group();
    let mut delta_d = Signal::zeros(g.cardinality());
    delta_d.values_mut()[g.dual_index_of(&g.dual_identity())] =
        c_real(T::one() / g.weights::<T>().dual);

    let mut stages = Vec::with_capacity(f_family.len());
    for (index, (f_n, g_n)) in f_family.iter().zip(g_family).enumerate() {
        let joint = qha_convolve(c, &PhaseMeasure::tensor(g, f_n, g_n)?, a)?;
        let error = joint.sub(a)?.op_norm();
        let only_group = qha_convolve(c, &PhaseMeasure::tensor(g, f_n, &delta_d)?, a)?;
        let error_group = only_group.sub(a)?.op_norm();
        let only_dual = qha_convolve(c, &PhaseMeasure::delta0_tensor(g, g_n)?, a)?;
        let error_dual = only_dual.sub(a)?.op_norm();
        stages.push(C1Stage {
            index,
            error,
            error_group,
            error_dual,
        });
    }
    Ok(C1Profile {
        stages,
        band: band_support_default(a),
        band_fourier_side: band_support_default(&fourier_conjugate(a)?),
    })
}
