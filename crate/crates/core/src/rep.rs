//! Regular representations and the reduced norm.

use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::groupoid::{ArrowId, UnitId};
use crate::linalg::CMatrix;
use crate::scalar::{Scalar, Tolerances};
use crate::twist::GradedTwist;

/// Jacobi sweep budget for the spectral-norm eigensolve.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// The matrix of `pi_x(f)` on the basis of point masses over `Gx`.
#[derive(Clone, Debug)]
pub struct RegularRep<T> {
    base_unit: UnitId,
    basis: Vec<ArrowId>,
    matrix: CMatrix<T>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error("unknown unit index {0}")]
    UnknownUnit(usize),
}

impl<T: Scalar> RegularRep<T> {
    pub fn base_unit(&self) -> UnitId {
        self.base_unit
    }

    /// `Gx` in arrow order; row/column `i` of the matrix corresponds to the
    /// point mass at `basis()[i]`.
    pub fn basis(&self) -> &[ArrowId] {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }
}

/// The regular representation of `f` at the unit `x`: entry `(zeta, eta)`
/// is `f(zeta eta^{-1}) sigma(zeta eta^{-1}, eta)`.
pub fn regular_rep<T: Scalar>(
    t: &GradedTwist<T>,
    f: &AlgebraElement<T>,
    x: UnitId,
) -> Result<RegularRep<T>, RepError> {
    let g = t.groupoid();
    if x.0 >= g.n_units() {
        return Err(RepError::UnknownUnit(x.0));
    }
    let basis = g.arrows_from(x);
    let matrix = CMatrix::from_fn(basis.len(), basis.len(), |zi, ei| {
        let zeta = basis[zi];
        let eta = basis[ei];
        let gamma = g
            .compose(zeta, g.inv(eta))
            .expect("arrows over the same unit compose with inverses");
        f.coeff(gamma) * t.sigma(gamma, eta)
    });
    Ok(RegularRep {
        base_unit: x,
        basis,
        matrix,
    })
}

/// Reduced norm: the largest spectral norm of the regular representations,
/// over all units. The maximum is order-independent, so the per-unit
/// evaluations may be reordered or parallelized freely.
pub fn reduced_norm<T: Scalar>(t: &GradedTwist<T>, f: &AlgebraElement<T>) -> T {
    let spectral = Tolerances::<T>::default().spectral;
    t.groupoid()
        .units()
        .map(|x| {
            regular_rep(t, f, x)
                .expect("unit comes from the groupoid")
                .matrix
                .spectral_norm(spectral, MAX_JACOBI_SWEEPS)
        })
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

/// Entrywise distance between two representation matrices.
pub fn matrix_distance<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.sub(b).max_abs()
}

/// Convenience: `pi_x` of the identity-sized zero checks out as all zero.
pub fn rep_of_delta<T: Scalar>(
    t: &GradedTwist<T>,
    gamma: ArrowId,
    x: UnitId,
) -> Result<RegularRep<T>, RepError> {
    regular_rep(t, &AlgebraElement::delta(t.groupoid().n_arrows(), gamma), x)
}
