#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod codazzi;
pub mod deform;
pub mod error;
pub mod expr;
pub mod grid;
pub mod jet;
pub mod rotational;
pub mod scalar;
pub mod specfile;
pub mod surface;
pub mod tensor;
