#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qjac {

struct resonance_error : std::runtime_error {
    int exponent;
    resonance_error(int n, const std::string& what)
        : std::runtime_error(what), exponent(n) {}
};

struct not_invertible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct contract_violation : std::logic_error {
    using std::logic_error::logic_error;
};

struct degeneracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct contour_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct precision_loss_error : std::runtime_error {
    double achieved;
    precision_loss_error(double got, const std::string& what)
        : std::runtime_error(what), achieved(got) {}
};

struct eval_range_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct regularization_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct limit_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Residue of an antiderivative log term against a pole; both branch
// readings are reported.
struct ambiguity_error : std::runtime_error {
    std::complex<double> branch_a, branch_b;
    ambiguity_error(std::complex<double> a, std::complex<double> b, const std::string& what)
        : std::runtime_error(what), branch_a(a), branch_b(b) {}
};

} // namespace qjac
