#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cf {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense order-M tensor, row-major (last index fastest).
struct ComplexTensor {
    std::vector<std::size_t> shape;
    std::vector<cplx> data;

    ComplexTensor() = default;
    explicit ComplexTensor(std::vector<std::size_t> s);

    std::size_t order() const { return shape.size(); }
    std::size_t size() const { return data.size(); }
    cplx& operator[](std::size_t k) { return data[k]; }
    const cplx& operator[](std::size_t k) const { return data[k]; }
    std::size_t offset(const std::vector<std::size_t>& idx) const;
    double norm() const;
};

// Bessel functions of the first kind, integer order.
double bessel_j(int n, double x);
// J_0..J_nmax at one argument (single Miller pass).
std::vector<double> bessel_j_table(int nmax, double x);
double bessel_j0_zero(int k);

struct SvdResult {
    RealVector s;  // descending
    ComplexMatrix u;
    ComplexMatrix v;
};
SvdResult svd(const ComplexMatrix& m);

struct HosvdResult {
    ComplexTensor core;
    std::vector<ComplexMatrix> factors;
    std::vector<RealVector> mode_singular_values;
};
ComplexMatrix unfold(const ComplexTensor& t, std::size_t mode);
// t ×_mode m : contracts axis `mode` of t with the columns of m (result axis size = m.rows()).
ComplexTensor mode_product(const ComplexTensor& t, const ComplexMatrix& m, std::size_t mode);
HosvdResult hosvd(const ComplexTensor& t);
ComplexTensor hosvd_reconstruct(const HosvdResult& h);

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-14;
    double h_init = 0.0;  // 0 picks a starting step automatically
    long max_steps = 50'000'000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    double last_h = 0.0;
};

// dy = f(t, y); y may hold several independent columns.
using OdeRhs = std::function<void(double, const ComplexMatrix&, ComplexMatrix&)>;

// Dormand–Prince 5(4) with componentwise mixed error control.
ComplexMatrix ode_propagate(const OdeRhs& f, const ComplexMatrix& y0, double t0, double t1,
                            const OdeOptions& opt = {}, OdeStats* stats = nullptr);

// c_n = (1/T) ∫ f(t) e^{+inΩt} dt on a uniform periodic grid; result[n + n_max].
std::vector<cplx> periodic_fourier_harmonics(const std::vector<cplx>& samples, int n_max);

// Adaptive Gauss–Kronrod on [a, b].
cplx integrate(const std::function<cplx(double)>& f, double a, double b, double tol = 1e-12,
               double* error = nullptr);
// ∫_{-∞}^{∞} via x = c + w·tan θ.
cplx integrate_real_line(const std::function<cplx(double)>& f, double centre, double width,
                         double tol = 1e-12, double* error = nullptr);

// OpenMP loop over [0, n); the first exception thrown by a worker is rethrown here.
template <class F>
void parallel_for(long n, F&& body)
{
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k) {
        try {
            body(k);
        } catch (...) {
#pragma omp critical(cf_parallel_for)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace cf
