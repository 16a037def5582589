fn main() { dirichlet_lab::cli::run_main() }
