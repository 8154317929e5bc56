#![allow(dead_code)]

pub mod equivalence;
pub mod oracles;
pub mod props;
