//! Two-dimensional fractional calculus: Riemann-Liouville and Caputo
//! partial fractional derivatives of scalar fields on the first quadrant,
//! and numerical verification of how they transform under SO(2) rotation
//! of the coordinate frame — operator identities, first-order
//! transformation laws with boundary terms, and rotation-invariant
//! combinations.

pub mod error;
pub mod field;
pub mod fracderiv;
pub mod invariants;
pub mod quadrature;
pub mod rotation;
pub mod specfun;
pub mod transform;

pub use error::{Error, Result};
pub use field::{
    in_wedge, pullback, rotate_point, Axis, Point, PowerSum, PowerTerm, Rotation, ScalarField,
};
pub use fracderiv::{
    caputo_closed_form, caputo_quadrature, commutes_check, eval_deriv, frac_deriv,
    frac_deriv_field, leibniz_series, rl_closed_form, rl_fractional_integral,
    rl_of_first_derivative, rl_via_bridge, DerivKind, DerivSpec, FracOrder, LeibnizResult, Route,
};
pub use invariants::{
    fit_combination_constant, scalar_field_check, scan_invariant, FitResult, InvariantExpr,
    ScanReport, ScanRow,
};
pub use quadrature::{singular_upper_integral, QuadratureSpec, Scheme, DEFAULT_NODES};
pub use rotation::{
    apply_generator, check_product_rule, commutator_integer_checks, exp_generator_series,
    rotate_polynomial, CommutatorCheck, CommutatorReport, SeriesResult,
};
pub use transform::{
    commutator_x_with_frac, frac_deriv_rotated_axis, infinitesimal_caputo, infinitesimal_rl,
    laplacian_invariance, scalar_residual, CommutatorSides, TransformReport,
};
