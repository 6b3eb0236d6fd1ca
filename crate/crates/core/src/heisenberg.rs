//! Phase space `Xi = G x G^`, the Heisenberg 2-cocycle, the standard
//! projective representation `U`, its phase-space companion `V`, and the
//! parity operator.
//!
//! The default cocycle is `m((x,nu),(y,mu)) = conj(mu(x))`; an arbitrary
//! phase table `a` may be supplied, in which case
//! `m(xi,eta) = a(xi) a(eta) conj(a(xi eta)) conj(mu(x))`. Tables must fix
//! `a(e,1) = 1` and `a(xi^{-1}) = a(xi)` and be unimodular; every such
//! cocycle is similar to the default one.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::group::{lp_norm_of, DualElement, FiniteAbelianGroup, GroupElement, LpExponent, Signal};
use crate::linalg::CMatrix;
use crate::scalar::{c_one, c_zero, Scalar, C};

/// Point of phase space, `xi = (x, nu)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    pub x: GroupElement,
    pub nu: DualElement,
}

/// Phase-space indexing: lexicographic in `(x, nu)`.
impl FiniteAbelianGroup {
    pub fn xi_cardinality(&self) -> usize {
        self.cardinality() * self.cardinality()
    }

    pub fn xi_identity(&self) -> PhasePoint {
        PhasePoint {
            x: self.identity(),
            nu: self.dual_identity(),
        }
    }

    pub fn xi_index(&self, p: &PhasePoint) -> usize {
        self.index_of(&p.x) * self.cardinality() + self.dual_index_of(&p.nu)
    }

    pub fn xi_at(&self, idx: usize) -> PhasePoint {
        let n = self.cardinality();
        PhasePoint {
            x: self.element_at(idx / n),
            nu: self.dual_at(idx % n),
        }
    }

    pub fn xi_points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.xi_cardinality()).map(move |i| self.xi_at(i))
    }

    pub fn xi_op(&self, p: &PhasePoint, q: &PhasePoint) -> Result<PhasePoint> {
        Ok(PhasePoint {
            x: self.op(&p.x, &q.x)?,
            nu: self.dual_op(&p.nu, &q.nu)?,
        })
    }

    pub fn xi_inv(&self, p: &PhasePoint) -> Result<PhasePoint> {
        Ok(PhasePoint {
            x: self.inv(&p.x)?,
            nu: self.dual_inv(&p.nu)?,
        })
    }

    /// Phase space as a finite abelian group in its own right (orders
    /// doubled); indexing agrees with [`Self::xi_index`].
    pub fn xi_group(&self) -> FiniteAbelianGroup {
        let mut orders = self.orders().to_vec();
        orders.extend_from_slice(self.orders());
        FiniteAbelianGroup::new(orders).expect("doubled orders are valid")
    }
}

/// Complex function on phase space, lexicographic in `(x, nu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction<T> {
    values: Vec<C<T>>,
}

impl<T: Scalar> PhaseFunction<T> {
    pub fn new(values: Vec<C<T>>) -> Self {
        PhaseFunction { values }
    }

    pub fn zeros(len: usize) -> Self {
        PhaseFunction {
            values: vec![c_zero(); len],
        }
    }

    /// Point mass at a phase point (value 1, no Haar factor).
    pub fn delta(group: &FiniteAbelianGroup, at: &PhasePoint) -> Self {
        let mut f = Self::zeros(group.xi_cardinality());
        f.values[group.xi_index(at)] = c_one();
        f
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C<T>] {
        &mut self.values
    }

    pub fn inner(&self, other: &Self, weight: T) -> Result<C<T>> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                what: "phase function length",
                expected: self.len(),
                found: other.len(),
            });
        }
        let mut acc: C<T> = c_zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b.conj();
        }
        Ok(acc * Complex::new(weight, T::zero()))
    }

    pub fn lp_norm(&self, p: LpExponent<T>, weight: T) -> T {
        lp_norm_of(&self.values, p, weight)
    }

    pub fn norm(&self, weight: T) -> T {
        self.lp_norm(LpExponent::Finite(T::lit(2.0)), weight)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        PhaseFunction {
            values: self.values.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                what: "phase function length",
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(PhaseFunction::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }
}

/// Heisenberg multiplier data: an optional unimodular phase table `a` on
/// phase space (`None` means `a = 1` identically).
#[derive(Debug, Clone)]
pub struct Cocycle<T> {
    group: FiniteAbelianGroup,
    table: Option<Vec<C<T>>>,
}

impl<T: Scalar> Cocycle<T> {
    /// The standard cocycle `m(xi, eta) = conj(mu(x))`.
    pub fn standard(group: FiniteAbelianGroup) -> Self {
        Cocycle { group, table: None }
    }

    /// Cocycle twisted by a phase table in phase-space order.
    pub fn with_table(group: FiniteAbelianGroup, table: Vec<C<T>>, tol: T) -> Result<Self> {
        if table.len() != group.xi_cardinality() {
            return Err(Error::ShapeMismatch {
                what: "cocycle table length",
                expected: group.xi_cardinality(),
                found: table.len(),
            });
        }
        let e = group.xi_identity();
        let at_e = table[group.xi_index(&e)];
        if (at_e - c_one()).norm() > tol {
            return Err(Error::InvalidCocycleTable {
                reason: "a(e,1) must equal 1".into(),
            });
        }
        for (idx, &value) in table.iter().enumerate() {
            if (value.norm() - T::one()).abs() > tol {
                return Err(Error::InvalidCocycleTable {
                    reason: format!("|a| must be 1 everywhere, violated at index {idx}"),
                });
            }
            let p = group.xi_at(idx);
            let inv = group.xi_inv(&p)?;
            let mirrored = table[group.xi_index(&inv)];
            if (value - mirrored).norm() > tol {
                return Err(Error::InvalidCocycleTable {
                    reason: format!("a(xi^-1) must equal a(xi), violated at index {idx}"),
                });
            }
        }
        Ok(Cocycle {
            group,
            table: Some(table),
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn table(&self) -> Option<&[C<T>]> {
        self.table.as_deref()
    }

    pub fn a(&self, p: &PhasePoint) -> C<T> {
        match &self.table {
            None => c_one(),
            Some(t) => t[self.group.xi_index(p)],
        }
    }

    /// The 2-cocycle `m(xi, eta) = a(xi) a(eta) conj(a(xi eta)) conj(mu(x))`.
    pub fn m(&self, p: &PhasePoint, q: &PhasePoint) -> Result<C<T>> {
        let phase = self.group.character::<T>(&q.nu, &p.x)?.conj();
        match &self.table {
            None => Ok(phase),
            Some(_) => {
                let pq = self.group.xi_op(p, q)?;
                Ok(self.a(p) * self.a(q) * self.a(&pq).conj() * phase)
            }
        }
    }
}

/// `U_{(x,nu)} f(y) = a(x,nu) nu(y) f(x^{-1} y)`.
pub fn rep_u<T: Scalar>(c: &Cocycle<T>, xi: &PhasePoint, f: &Signal<T>) -> Result<Signal<T>> {
    let g = c.group();
    if f.len() != g.cardinality() {
        return Err(Error::ShapeMismatch {
            what: "signal length",
            expected: g.cardinality(),
            found: f.len(),
        });
    }
    let a = c.a(xi);
    let x_inv = g.inv(&xi.x)?;
    let nu_idx = g.dual_index_of(&xi.nu);
    let mut out = vec![c_zero(); g.cardinality()];
    for (y_idx, slot) in out.iter_mut().enumerate() {
        let y = g.element_at(y_idx);
        let src = g.index_of(&g.op(&x_inv, &y)?);
        *slot = a * g.character_at::<T>(nu_idx, y_idx) * f.values()[src];
    }
    Ok(Signal::new(out))
}

/// Matrix of `U_xi` in the delta basis (row = output index).
pub fn rep_u_matrix<T: Scalar>(c: &Cocycle<T>, xi: &PhasePoint) -> Result<CMatrix<T>> {
    let g = c.group();
    let n = g.cardinality();
    let a = c.a(xi);
    let x_inv = g.inv(&xi.x)?;
    let nu_idx = g.dual_index_of(&xi.nu);
    let mut m = CMatrix::zeros(n, n);
    for y_idx in 0..n {
        let y = g.element_at(y_idx);
        let src = g.index_of(&g.op(&x_inv, &y)?);
        m[(y_idx, src)] = a * g.character_at::<T>(nu_idx, y_idx);
    }
    Ok(m)
}

/// Phase-space representation `V_xi F(eta) = m(xi,xi^{-1}) conj(m(xi^{-1},eta)) F(xi^{-1} eta)`.
///
/// `V` is what `U` looks like through the wavelet transform; it acts as a
/// unimodular relabeling, hence isometrically on every weighted `l^p`.
pub fn rep_v<T: Scalar>(
    c: &Cocycle<T>,
    xi: &PhasePoint,
    f: &PhaseFunction<T>,
) -> Result<PhaseFunction<T>> {
    let g = c.group();
    if f.len() != g.xi_cardinality() {
        return Err(Error::ShapeMismatch {
            what: "phase function length",
            expected: g.xi_cardinality(),
            found: f.len(),
        });
    }
    let xi_inv = g.xi_inv(xi)?;
    let front = c.m(xi, &xi_inv)?;
    let mut out = vec![c_zero(); f.len()];
    for (eta_idx, slot) in out.iter_mut().enumerate() {
        let eta = g.xi_at(eta_idx);
        let src = g.xi_index(&g.xi_op(&xi_inv, &eta)?);
        *slot = front * c.m(&xi_inv, &eta)?.conj() * f.values()[src];
    }
    Ok(PhaseFunction::new(out))
}

/// Parity `(Rf)(y) = f(y^{-1})`; self-adjoint, unitary, squares to the
/// identity. Other admissible choices differ from this one by a phase.
pub fn parity<T: Scalar>(group: &FiniteAbelianGroup, f: &Signal<T>) -> Result<Signal<T>> {
    if f.len() != group.cardinality() {
        return Err(Error::ShapeMismatch {
            what: "signal length",
            expected: group.cardinality(),
            found: f.len(),
        });
    }
    let mut out = vec![c_zero(); f.len()];
    for (y_idx, slot) in out.iter_mut().enumerate() {
        let y = group.element_at(y_idx);
        let src = group.index_of(&group.inv(&y)?);
        *slot = f.values()[src];
    }
    Ok(Signal::new(out))
}

pub fn parity_matrix<T: Scalar>(group: &FiniteAbelianGroup) -> CMatrix<T> {
    let n = group.cardinality();
    let mut m = CMatrix::zeros(n, n);
    for y_idx in 0..n {
        let y = group.element_at(y_idx);
        let src = group.index_of(&group.inv(&y).expect("shape ok"));
        m[(y_idx, src)] = c_one();
    }
    m
}

/// Frobenius residual of the intertwining relation `R U_xi = U_{xi^{-1}} R`.
pub fn parity_intertwine_residual<T: Scalar>(c: &Cocycle<T>, xi: &PhasePoint) -> Result<T> {
    let g = c.group();
    let r = parity_matrix::<T>(g);
    let u = rep_u_matrix(c, xi)?;
    let u_inv_pt = rep_u_matrix(c, &g.xi_inv(xi)?)?;
    Ok(r.matmul(&u).sub(&u_inv_pt.matmul(&r)).frobenius_norm())
}

/// Outcome of the exhaustive symplectic-isomorphism check for
/// `sigma(xi, .) = m(xi, .) / m(., xi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaIsoReport {
    pub pass: bool,
    /// First `(xi, eta)` index pair where `sigma(xi, .)` failed to be a character.
    pub character_failure: Option<(usize, usize)>,
    /// First `(xi1, xi2)` pair where `xi -> sigma(xi, .)` failed to be a homomorphism.
    pub homomorphism_failure: Option<(usize, usize)>,
    /// First pair of distinct `xi` mapping to the same character.
    pub injectivity_collision: Option<(usize, usize)>,
}

/// Verifies that `xi -> sigma(xi, .)` is an isomorphism onto the dual of
/// phase space: each `sigma(xi, .)` is a character, the map is a
/// homomorphism, and it is injective (hence bijective by cardinality).
/// Exhaustive; refuses phase spaces larger than 4096 points.
pub fn sigma_iso_check<T: Scalar>(c: &Cocycle<T>, tol: T) -> Result<SigmaIsoReport> {
    let g = c.group();
    let nxi = g.xi_cardinality();
    if nxi > 4096 {
        return Err(Error::InvalidParameter {
            reason: format!("sigma check is exhaustive and limited to |Xi| <= 4096, got {nxi}"),
        });
    }
    let xi_g = g.xi_group();
    let rank = xi_g.rank();

    let sigma = |i: usize, j: usize| -> Result<C<T>> {
        let p = g.xi_at(i);
        let q = g.xi_at(j);
        Ok(c.m(&p, &q)? * c.m(&q, &p)?.conj())
    };

    let mut labels: Vec<usize> = Vec::with_capacity(nxi);
    let mut report = SigmaIsoReport {
        pass: true,
        character_failure: None,
        homomorphism_failure: None,
        injectivity_collision: None,
    };

    'outer: for i in 0..nxi {
        // Identify the candidate character from values on the generators.
        let mut residues: Vec<i64> = Vec::with_capacity(rank);
        for axis in 0..rank {
            let order = xi_g.orders()[axis];
            let mut gen_res = vec![0i64; rank];
            gen_res[axis] = 1 % order as i64;
            let gen_idx = xi_g.index_of(&xi_g.element(&gen_res)?);
            let value = sigma(i, gen_idx)?;
            let turns = value.arg().to_f64().unwrap_or(0.0) / std::f64::consts::TAU;
            let w = (turns * order as f64).round() as i64;
            residues.push(w.rem_euclid(order as i64));
        }
        let label = xi_g.dual_index_of(&xi_g.dual_element(&residues)?);
        // Verify the identification pointwise.
        for j in 0..nxi {
            let predicted = xi_g.character_at::<T>(label, j);
            if (sigma(i, j)? - predicted).norm() > tol {
                report.pass = false;
                report.character_failure = Some((i, j));
                break 'outer;
            }
        }
        labels.push(label);
    }

    if report.pass {
        // Homomorphism property on the identified labels is exact integer
        // arithmetic in the dual of phase space.
        'hom: for i in 0..nxi {
            for j in 0..nxi {
                let ij = xi_g.index_of(&xi_g.op(&xi_g.element_at(i), &xi_g.element_at(j))?);
                let expected = xi_g.dual_index_of(&xi_g.dual_op(
                    &xi_g.dual_at(labels[i]),
                    &xi_g.dual_at(labels[j]),
                )?);
                if labels[ij] != expected {
                    report.pass = false;
                    report.homomorphism_failure = Some((i, j));
                    break 'hom;
                }
            }
        }
    }

    if report.pass {
        let mut seen = vec![usize::MAX; nxi];
        for (i, &label) in labels.iter().enumerate() {
            if seen[label] != usize::MAX {
                report.pass = false;
                report.injectivity_collision = Some((seen[label], i));
                break;
            }
            seen[label] = i;
        }
    }

    Ok(report)
}
