use pyo3::prelude::*;

#[pymodule]
fn kamtori_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
