//! Compilers for the three simulation formula families.

pub mod compile;
pub mod props;

pub use compile::{
    build_Psi_product, build_psi_instance, build_psi_one_counter, build_psi_parameterized,
    recurrence_extension, CompileOptions, CompiledFormula, Family, IncScope, IntervalBound,
    LTransShape, RecurrenceShape,
};
pub use props::{l, r, succ_index, succ_prop, tag_name, PropUniverse, Side, BASE};
