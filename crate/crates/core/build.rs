fn main() {
    // LAPACK comes from the system OpenBLAS build.
    let lib = std::env::var("DJSPEC_LAPACK_LIB").unwrap_or_else(|_| "openblas".to_string());
    println!("cargo:rustc-link-lib=dylib={lib}");
    println!("cargo:rerun-if-env-changed=DJSPEC_LAPACK_LIB");
}
