//! Finite abelian groups, their duals, characters and the Fourier transform.
//!
//! A group is a product of cyclic groups `Z_{n1} x ... x Z_{nk}`. Elements
//! are reduced residue tuples, enumerated lexicographically; the dual group
//! is represented by the same index set (finite abelian groups are
//! self-dual) so that phase space stays indexable.
//!
//! Haar normalization is fixed once and for all: weight 1 per point of G,
//! `1/|G|` per point of the dual, and their product `1/|G|` per point of
//! phase space. This is the normalization that makes the orthogonality
//! constant in the coorbit module equal to one.

use num_complex::Complex;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_zero, Scalar, C};

/// `Z_{n1} x ... x Z_{nk}` with lexicographic element enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    orders: Vec<usize>,
    cardinality: usize,
}

/// Element of a [`FiniteAbelianGroup`]; residues are componentwise reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    residues: Vec<usize>,
}

/// Element of the dual group, stored as a residue tuple of the same shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualElement {
    residues: Vec<usize>,
}

impl GroupElement {
    pub fn residues(&self) -> &[usize] {
        &self.residues
    }
}

impl DualElement {
    pub fn residues(&self) -> &[usize] {
        &self.residues
    }
}

/// Haar weights per point of G, the dual and phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarWeights<T> {
    pub group: T,
    pub dual: T,
    pub phase: T,
}

impl FiniteAbelianGroup {
    /// Build `Z_{n1} x ... x Z_{nk}`. Rejects an empty list and any order < 1.
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::EmptyOrders);
        }
        for (index, &order) in orders.iter().enumerate() {
            if order < 1 {
                return Err(Error::NonPositiveOrder {
                    index,
                    order: order as i64,
                });
            }
        }
        let cardinality = orders.iter().product();
        Ok(FiniteAbelianGroup { orders, cardinality })
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.rank()],
        }
    }

    /// Neutral element of the dual group (the trivial character).
    pub fn dual_identity(&self) -> DualElement {
        DualElement {
            residues: vec![0; self.rank()],
        }
    }

    /// Validated element construction; rejects unreduced residues.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        Ok(GroupElement {
            residues: self.checked_residues(residues)?,
        })
    }

    pub fn dual_element(&self, residues: &[i64]) -> Result<DualElement> {
        Ok(DualElement {
            residues: self.checked_residues(residues)?,
        })
    }

    fn checked_residues(&self, residues: &[i64]) -> Result<Vec<usize>> {
        if residues.len() != self.rank() {
            return Err(Error::ShapeMismatch {
                what: "element residues",
                expected: self.rank(),
                found: residues.len(),
            });
        }
        let mut out = Vec::with_capacity(self.rank());
        for (index, (&residue, &order)) in residues.iter().zip(&self.orders).enumerate() {
            if residue < 0 || residue as usize >= order {
                return Err(Error::UnreducedResidue {
                    index,
                    residue,
                    order,
                });
            }
            out.push(residue as usize);
        }
        Ok(out)
    }

    /// Componentwise reduction mod the orders; accepts arbitrary integers.
    pub fn reduce(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(Error::ShapeMismatch {
                what: "element residues",
                expected: self.rank(),
                found: residues.len(),
            });
        }
        let reduced = residues
            .iter()
            .zip(&self.orders)
            .map(|(&r, &n)| r.rem_euclid(n as i64) as usize)
            .collect();
        Ok(GroupElement { residues: reduced })
    }

    pub fn reduce_dual(&self, residues: &[i64]) -> Result<DualElement> {
        let e = self.reduce(residues)?;
        Ok(DualElement {
            residues: e.residues,
        })
    }

    fn check_shape(&self, residues: &[usize], what: &'static str) -> Result<()> {
        if residues.len() != self.rank() {
            return Err(Error::ShapeMismatch {
                what,
                expected: self.rank(),
                found: residues.len(),
            });
        }
        Ok(())
    }

    /// Group operation, written multiplicatively.
    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_shape(&a.residues, "group element")?;
        self.check_shape(&b.residues, "group element")?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.orders)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_shape(&a.residues, "group element")?;
        let residues = a
            .residues
            .iter()
            .zip(&self.orders)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn dual_op(&self, a: &DualElement, b: &DualElement) -> Result<DualElement> {
        let r = self.op(
            &GroupElement {
                residues: a.residues.clone(),
            },
            &GroupElement {
                residues: b.residues.clone(),
            },
        )?;
        Ok(DualElement {
            residues: r.residues,
        })
    }

    pub fn dual_inv(&self, a: &DualElement) -> Result<DualElement> {
        let r = self.inv(&GroupElement {
            residues: a.residues.clone(),
        })?;
        Ok(DualElement {
            residues: r.residues,
        })
    }

    /// Lexicographic index of a (reduced) element.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        debug_assert_eq!(a.residues.len(), self.rank());
        let mut idx = 0usize;
        for (&r, &n) in a.residues.iter().zip(&self.orders) {
            idx = idx * n + r;
        }
        idx
    }

    pub fn dual_index_of(&self, a: &DualElement) -> usize {
        let mut idx = 0usize;
        for (&r, &n) in a.residues.iter().zip(&self.orders) {
            idx = idx * n + r;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        assert!(idx < self.cardinality, "element index out of range");
        let mut residues = vec![0usize; self.rank()];
        for (slot, &n) in residues.iter_mut().zip(&self.orders).rev() {
            *slot = idx % n;
            idx /= n;
        }
        GroupElement { residues }
    }

    pub fn dual_at(&self, idx: usize) -> DualElement {
        let e = self.element_at(idx);
        DualElement {
            residues: e.residues,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.cardinality).map(move |i| self.element_at(i))
    }

    pub fn duals(&self) -> impl Iterator<Item = DualElement> + '_ {
        (0..self.cardinality).map(move |i| self.dual_at(i))
    }

    pub fn weights<T: Scalar>(&self) -> HaarWeights<T> {
        let n = T::from_usize_exact(self.cardinality);
        HaarWeights {
            group: T::one(),
            dual: T::one() / n,
            phase: T::one() / n,
        }
    }

    /// Character evaluation `nu(x) = exp(2 pi i sum_j nu_j x_j / n_j)`.
    ///
    /// The phase is accumulated as an exact rational number of turns;
    /// quarter turns are mapped to exact `1, i, -1, -i` so that groups whose
    /// orders divide 4 have an exactly unitary character table.
    pub fn character<T: Scalar>(&self, nu: &DualElement, x: &GroupElement) -> Result<C<T>> {
        self.check_shape(&nu.residues, "dual element")?;
        self.check_shape(&x.residues, "group element")?;
        Ok(self.character_unchecked(nu, x))
    }

    fn character_unchecked<T: Scalar>(&self, nu: &DualElement, x: &GroupElement) -> C<T> {
        // Accumulate sum_j (nu_j x_j mod n_j) / n_j as a reduced fraction.
        let mut num: i128 = 0;
        let mut den: i128 = 1;
        for ((&v, &r), &n) in nu.residues.iter().zip(&x.residues).zip(&self.orders) {
            let n = n as i128;
            let t = ((v as i128) * (r as i128)) % n;
            // num/den + t/n
            num = num * n + t * den;
            den *= n;
            let g = num.gcd(&den);
            if g > 1 {
                num /= g;
                den /= g;
            }
        }
        num = num.rem_euclid(den);
        unit_phase(num, den)
    }

    /// Character evaluation by element indices; skips shape checks.
    pub fn character_at<T: Scalar>(&self, nu_idx: usize, x_idx: usize) -> C<T> {
        let nu = self.dual_at(nu_idx);
        let x = self.element_at(x_idx);
        self.character_unchecked(&nu, &x)
    }
}

/// `exp(2 pi i num/den)` with exact values at quarter turns.
fn unit_phase<T: Scalar>(num: i128, den: i128) -> C<T> {
    debug_assert!(den > 0 && (0..den).contains(&num));
    if num == 0 {
        return c_one();
    }
    // Reduced fractions with denominator 1, 2 or 4 are exact.
    if 4 % den == 0 {
        let quarters = num * (4 / den);
        return match quarters {
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            3 => Complex::new(T::zero(), -T::one()),
            _ => c_one(),
        };
    }
    let turns = T::from_i128(num).expect("phase numerator fits the scalar")
        / T::from_i128(den).expect("phase denominator fits the scalar");
    Complex::from_polar(T::one(), T::TAU() * turns)
}

/// Complex function on the group (or on the dual — same length), stored in
/// lexicographic element order.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    values: Vec<C<T>>,
}

impl<T: Scalar> Signal<T> {
    pub fn new(values: Vec<C<T>>) -> Self {
        Signal { values }
    }

    pub fn zeros(len: usize) -> Self {
        Signal {
            values: vec![c_zero(); len],
        }
    }

    /// Point mass at the given element.
    pub fn delta(group: &FiniteAbelianGroup, at: &GroupElement) -> Self {
        let mut s = Self::zeros(group.cardinality());
        s.values[group.index_of(at)] = c_one();
        s
    }

    pub fn delta_dual(group: &FiniteAbelianGroup, at: &DualElement) -> Self {
        let mut s = Self::zeros(group.cardinality());
        s.values[group.dual_index_of(at)] = c_one();
        s
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

    pub fn into_values(self) -> Vec<C<T>> {
        self.values
    }

    /// Weighted inner product, antilinear in the second slot.
    pub fn inner(&self, other: &Self, weight: T) -> Result<C<T>> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                what: "signal length",
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

    pub fn norm(&self, weight: T) -> T {
        let sq: T = self
            .values
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        (sq * weight).sqrt()
    }

    /// Weighted l^p norm; `p = inf` is the plain sup of moduli.
    pub fn lp_norm(&self, p: LpExponent<T>, weight: T) -> T {
        lp_norm_of(&self.values, p, weight)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Signal {
            values: self.values.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                what: "signal length",
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Signal {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }
}

pub(crate) fn lp_norm_of<T: Scalar>(values: &[C<T>], p: LpExponent<T>, weight: T) -> T {
    match p {
        LpExponent::Infinity => values
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b)),
        LpExponent::Finite(p) => {
            let sum = values
                .iter()
                .map(|z| z.norm().powf(p))
                .fold(T::zero(), |a, b| a + b);
            (sum * weight).powf(T::one() / p)
        }
    }
}

/// Exponent for L^p norms, validated to lie in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Scalar> LpExponent<T> {
    pub fn new(p: T) -> Result<Self> {
        if p.is_infinite() && p > T::zero() {
            Ok(LpExponent::Infinity)
        } else if p.is_finite() && p >= T::one() {
            Ok(LpExponent::Finite(p))
        } else {
            Err(Error::InvalidExponent)
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            LpExponent::Finite(p) => p.to_f64().unwrap_or(f64::NAN),
            LpExponent::Infinity => f64::INFINITY,
        }
    }
}

/// Forward Fourier transform: `(Ff)(nu) = sum_x f(x) conj(nu(x)) wG`.
pub fn fourier<T: Scalar>(group: &FiniteAbelianGroup, f: &Signal<T>) -> Result<Signal<T>> {
    expect_len(group, f)?;
    let n = group.cardinality();
    let wg = group.weights::<T>().group;
    let mut out = Vec::with_capacity(n);
    for nu in 0..n {
        let mut acc: C<T> = c_zero();
        for x in 0..n {
            acc += f.values()[x] * group.character_at::<T>(nu, x).conj();
        }
        out.push(acc * Complex::new(wg, T::zero()));
    }
    Ok(Signal::new(out))
}

/// Transform of a function on the dual group, evaluated on G:
/// `h^(t) = sum_nu h(nu) conj(nu(t)) wDual`.
///
/// Note: composed with [`fourier`] this gives the parity of the input, not
/// the identity; the actual inverse transform is [`fourier_inv`].
pub fn fourier_dual<T: Scalar>(group: &FiniteAbelianGroup, h: &Signal<T>) -> Result<Signal<T>> {
    expect_len(group, h)?;
    let n = group.cardinality();
    let wd = group.weights::<T>().dual;
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let mut acc: C<T> = c_zero();
        for nu in 0..n {
            acc += h.values()[nu] * group.character_at::<T>(nu, t).conj();
        }
        out.push(acc * Complex::new(wd, T::zero()));
    }
    Ok(Signal::new(out))
}

/// Inverse Fourier transform: `f(x) = sum_nu (Ff)(nu) nu(x) wDual`.
pub fn fourier_inv<T: Scalar>(group: &FiniteAbelianGroup, h: &Signal<T>) -> Result<Signal<T>> {
    expect_len(group, h)?;
    let n = group.cardinality();
    let wd = group.weights::<T>().dual;
    let mut out = Vec::with_capacity(n);
    for x in 0..n {
        let mut acc: C<T> = c_zero();
        for nu in 0..n {
            acc += h.values()[nu] * group.character_at::<T>(nu, x);
        }
        out.push(acc * Complex::new(wd, T::zero()));
    }
    Ok(Signal::new(out))
}

/// Inverse of [`fourier_dual`]: recovers `h` on the dual from its transform
/// on G via `h(nu) = sum_t h^(t) nu(t) wG`.
pub fn fourier_dual_inv<T: Scalar>(group: &FiniteAbelianGroup, g: &Signal<T>) -> Result<Signal<T>> {
    expect_len(group, g)?;
    let n = group.cardinality();
    let wg = group.weights::<T>().group;
    let mut out = Vec::with_capacity(n);
    for nu in 0..n {
        let mut acc: C<T> = c_zero();
        for t in 0..n {
            acc += g.values()[t] * group.character_at::<T>(nu, t);
        }
        out.push(acc * Complex::new(wg, T::zero()));
    }
    Ok(Signal::new(out))
}

fn expect_len<T: Scalar>(group: &FiniteAbelianGroup, f: &Signal<T>) -> Result<()> {
    if f.len() != group.cardinality() {
        return Err(Error::ShapeMismatch {
            what: "signal length",
            expected: group.cardinality(),
            found: f.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod cross_group_tests {
    use super::*;

    #[test]
    fn mixing_groups_is_a_shape_error() {
        let g4 = FiniteAbelianGroup::new(vec![4]).unwrap();
        let g23 = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let a = g4.element(&[1]).unwrap();
        let b = g23.element(&[1, 2]).unwrap();
        assert!(matches!(g4.op(&a, &b), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(g23.inv(&a), Err(Error::ShapeMismatch { .. })));
        let f = Signal::<f64>::zeros(4);
        assert!(matches!(
            fourier(&g23, &f),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn trivial_group_works() {
        let g = FiniteAbelianGroup::new(vec![1]).unwrap();
        assert_eq!(g.cardinality(), 1);
        let f = Signal::new(vec![num_complex::Complex::new(2.5, -1.0)]);
        let ff = fourier(&g, &f).unwrap();
        assert_eq!(ff.values(), f.values());
        assert_eq!(g.inv(&g.identity()).unwrap(), g.identity());
    }
}
