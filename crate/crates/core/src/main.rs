fn main() {
    std::process::exit(symgeom::cli::main());
}
