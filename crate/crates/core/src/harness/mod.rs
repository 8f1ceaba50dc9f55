//! Instrumentation around the pipeline: input generators, an independent
//! bramble verifier, order bounds, and the acceptance checks.

mod gen;
mod order;
mod selftest;
mod verify;

pub use gen::{
    gen_bidirected_grid, gen_cylindrical_grid, gen_grid_path_system, gen_rect_path_system,
    snake_columns, snake_rows, trapped_lane_system,
};
pub use order::{bramble_order, exhaustive_min_hitting_set, order_of_sets, OrderBounds};
pub use selftest::{
    checks, criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, Check,
};
pub use verify::{naive_accepts, verify_bramble, verify_elements, BrambleReport, BrambleViolation};
