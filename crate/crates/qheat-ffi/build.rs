fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/qheat.h"));
        }
        Err(e) => {
            // header generation failures must not mask compile errors in
            // the crate itself
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
}
