#![allow(dead_code)]

pub mod behavior;
pub mod engine_oracle;
pub mod plasticity_oracle;
