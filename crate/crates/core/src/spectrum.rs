// placeholder
use crate::normspace::NormDescriptor;
use crate::exactnum::IntervalReal;

pub fn empirical_dirichlet_upper(_m: usize, _n: usize, _norm1: &NormDescriptor, _norm2: &NormDescriptor, _sweep: usize, _cap: i64, _seed: u64) -> crate::Result<IntervalReal> { unimplemented!() }
