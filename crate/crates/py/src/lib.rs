use pyo3::prelude::*;

#[pymodule]
fn dirichlet_lab_py(_m: &Bound<'_, PyModule>) -> PyResult<()> { Ok(()) }
