//! Hankel determinants `H_{m,n} = det (s_{m+i+j})_{0 <= i, j < n}` of the
//! fixed point `s = 1011101101101110...` of the substitution `1 -> 101, 0 -> 1`.
//!
//! [`eval_closed`] evaluates a determinant in constant time from the cell's
//! place in a tiling of the quarter plane by three families of
//! parallelograms. [`eval_oracle`] computes the same determinant directly
//! from the word, and [`verify_window`] compares the two over a window.
//!
//! ```
//! use sturmian_hankel::{eval_closed, eval_oracle, Method};
//!
//! let closed = eval_closed(3, 9).unwrap();
//! assert_eq!(closed, 2);
//! assert_eq!(eval_oracle(3, 9, Method::Bareiss).unwrap(), closed);
//! ```

pub mod closed_form;
pub mod error;
pub mod oracle;
pub mod partition;
pub mod render;
pub mod sequence;
pub mod value;
pub mod verify;

pub use closed_form::{eval_closed, eval_t, eval_u, eval_v};
pub use error::{Error, Result};
pub use oracle::{det_bareiss, det_crt, eval_oracle, matrix, oracle_column, HankelMatrix, Method};
pub use partition::{
    classify, family_member, family_upto, is_member, locate, parallelograms_in_window,
    verify_partition, AnchorKind, CellClass, CellFlags, CoverageAnomaly, CoverageReport,
    Parallelogram, Region, RegionKind, Window,
};
pub use render::{color, render_closed, render_oracle, Layout, Raster, PALETTE_VERSION};
pub use sequence::{
    decode, encode, f, f_mod4, phi, s_at, s_at_half, s_prefix, shift_even_differs,
    shift_odd_differs, validate, FRep, Validation, Violation,
};
pub use value::HankelValue;
pub use verify::{verify_window, Census, Mismatch, OracleMode, VerifyConfig, VerifyReport};
