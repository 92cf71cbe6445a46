//! Benchmark instance generators, independent oracles and the table runner.

mod generators;
mod oracle;
mod table;

pub use generators::{
    gen_binary_quadratic, gen_complex_quartic_sphere, gen_multisphere, gen_unitnorm_complex_quadratic,
    generate, mordell_instance, Family, Instance, InstanceSpec,
};
pub use oracle::{
    oracle_binary, oracle_multistart_complex, oracle_multistart_real, MultistartConfig,
    MultistartResult,
};
pub use table::{run_table, table_to_csv, table_to_json, MethodSpec, TableConfig, TableRow};
