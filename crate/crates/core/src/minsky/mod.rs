//! Counter machines, their computations, synchronized products and the
//! two-counter to product translation.

pub mod machine;
pub mod product;
pub mod run;
pub mod translate;

pub use machine::{validate_machine, Instruction, Machine, MachineError};
pub use product::{product_successors, Partition, ProductError, SyncProduct};
pub use run::{
    run_with_period_detection, successors, Computation, ComputationError, Configuration, Stepper,
    Strategy,
};
pub use translate::{two_counter_to_product, TranslateError, Translation};
