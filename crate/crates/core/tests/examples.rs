//! Every example in examples/ runs to completion.

#[path = "../examples/cap_spectrum.rs"]
mod cap_spectrum;

#[test]
fn example_cap_spectrum() {
    cap_spectrum::run().unwrap();
}

#[path = "../examples/hardy_certificate.rs"]
mod hardy_certificate;

#[test]
fn example_hardy_certificate() {
    hardy_certificate::run().unwrap();
}

#[path = "../examples/exact_frequency.rs"]
mod exact_frequency;

#[test]
fn example_exact_frequency() {
    exact_frequency::run().unwrap();
}

#[path = "../examples/perturbed_corner.rs"]
mod perturbed_corner;

#[test]
fn example_perturbed_corner() {
    perturbed_corner::run().unwrap();
}

#[path = "../examples/straightening.rs"]
mod straightening;

#[test]
fn example_straightening() {
    straightening::run().unwrap();
}

#[path = "../examples/cauchy_coefficients.rs"]
mod cauchy_coefficients;

#[test]
fn example_cauchy_coefficients() {
    cauchy_coefficients::run().unwrap();
}

#[path = "../examples/blowup_decay.rs"]
mod blowup_decay;

#[test]
fn example_blowup_decay() {
    blowup_decay::run().unwrap();
}

#[path = "../examples/pohozaev.rs"]
mod pohozaev;

#[test]
fn example_pohozaev() {
    pohozaev::run().unwrap();
}

#[path = "../examples/log_corner.rs"]
mod log_corner;

#[test]
fn example_log_corner() {
    log_corner::run().unwrap();
}

#[path = "../examples/dirichlet_solver.rs"]
mod dirichlet_solver;

#[test]
fn example_dirichlet_solver() {
    dirichlet_solver::run().unwrap();
}

#[path = "../examples/coefficient_orders.rs"]
mod coefficient_orders;

#[test]
fn example_coefficient_orders() {
    coefficient_orders::run().unwrap();
}
