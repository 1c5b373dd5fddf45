//! The superoperators of the master equation, applied literally through
//! products with the pseudo-spin matrices:
//!
//!   J₀ρ = [σ_z/4, ρ]    J₊ρ = σ₊ρσ₊    J₋ρ = σ₋ρσ₋
//!   K₀ρ = (σ₊σ₋ρ + ρσ₊σ₋ − ρ)/2    K₊ρ = σ₊ρσ₋    K₋ρ = σ₋ρσ₊
//!
//! This assembly path shares nothing with the elementwise generator in
//! [`crate::propagator`], so agreement between the two is a genuine
//! cross-check of the derivation.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::kernels::CoefficientSet;

fn sigma_plus() -> Matrix2<C64> {
    Matrix2::new(C64::ZERO, C64::ONE, C64::ZERO, C64::ZERO)
}

fn sigma_minus() -> Matrix2<C64> {
    Matrix2::new(C64::ZERO, C64::ZERO, C64::ONE, C64::ZERO)
}

fn sigma_z() -> Matrix2<C64> {
    Matrix2::new(C64::ONE, C64::ZERO, C64::ZERO, C64::from(-1.0))
}

/// One named term of the master-equation generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperoperatorTerm {
    J0,
    JPlus,
    JMinus,
    K0,
    KPlus,
    KMinus,
}

impl SuperoperatorTerm {
    pub const ALL: [Self; 6] = [Self::J0, Self::JPlus, Self::JMinus, Self::K0, Self::KPlus, Self::KMinus];

    pub fn apply(&self, rho: &Matrix2<C64>) -> Matrix2<C64> {
        let sp = sigma_plus();
        let sm = sigma_minus();
        match self {
            Self::J0 => {
                let szq = sigma_z() * C64::from(0.25);
                szq * rho - rho * szq
            }
            Self::JPlus => sp * rho * sp,
            Self::JMinus => sm * rho * sm,
            Self::K0 => {
                let num = sp * sm;
                (num * rho + rho * num - rho) * C64::from(0.5)
            }
            Self::KPlus => sp * rho * sm,
            Self::KMinus => sm * rho * sp,
        }
    }
}

/// Right-hand side of the master equation at fixed coefficients:
/// ρ̇ = −g²(Reα + Ref)ρ + ε₀J₀ρ + ε₊J₊ρ + ε₋J₋ρ + ν₀K₀ρ + ν₊K₊ρ + ν₋K₋ρ.
pub fn master_rhs(c: &CoefficientSet, rho: &Matrix2<C64>) -> Matrix2<C64> {
    rho * C64::from(c.scalar())
        + SuperoperatorTerm::J0.apply(rho) * c.eps0
        + SuperoperatorTerm::JPlus.apply(rho) * c.eps_plus
        + SuperoperatorTerm::JMinus.apply(rho) * c.eps_minus
        + SuperoperatorTerm::K0.apply(rho) * C64::from(c.nu0)
        + SuperoperatorTerm::KPlus.apply(rho) * C64::from(c.nu_plus)
        + SuperoperatorTerm::KMinus.apply(rho) * C64::from(c.nu_minus)
}
