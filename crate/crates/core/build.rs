// ndarray-linalg is built without a bundled LAPACK; link the system OpenBLAS,
// which provides both BLAS and LAPACK symbols. Override with YB_READOUT_LAPACK.
fn main() {
    println!("cargo:rerun-if-env-changed=YB_READOUT_LAPACK");
    let lib = std::env::var("YB_READOUT_LAPACK").unwrap_or_else(|_| "openblas".to_string());
    println!("cargo:rustc-link-lib={lib}");
}
