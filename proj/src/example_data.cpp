#include <initializer_list>

#include "tilq/fixtures.hpp"

namespace tilq {

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

SharedDynamics dynamics_5_1() {
    SharedDynamics d;
    d.A = {mat2(1.12, 0.21, -0.13, 0.98), mat2(2.12, -0.35, -0.21, 3.43), mat2(5.46, 1.21, -0.98, 4.21)};
    d.B = {mat2(1.45, -0.23, -0.2, 4), mat2(1.5, 0.3, -0.2, 3), mat2(-4.36, 0.82, 1.21, 4.21)};
    d.C = {mat2(1, 0.32, 0.25, 3), mat2(1.65, -0.13, -0.42, 6), mat2(-3, 1.53, -0.62, 4.78)};
    d.D = {mat2(5, 1, -0.85, 8), mat2(4, 0.53, -0.42, 5), mat2(9.21, -2.03, -1.52, 6.98)};
    return d;
}

Family q_5_1() {
    return Family::from_per_k({mat2(-2, 0.8, 0.8, 1.6), mat2(4, 0, 0, 0), mat2(1.56, -0.23, -0.23, 2.54)});
}

Family r_5_1() {
    Family R(3, false);
    R.at(0, 0) = mat2(-0.5, 0, 0, 1);
    R.at(0, 1) = mat2(-5, 0, 0, -4);
    R.at(0, 2) = mat2(-9, 0, 0, 10);
    R.at(1, 1) = mat2(4, -0.3, -0.3, 7);
    R.at(1, 2) = mat2(2.24, -5.67, -5.67, -1.27);
    R.at(2, 2) = mat2(6.29, -1.67, -1.67, 8.38);
    return R;
}

}  // namespace

ProblemData example_1_1() {
    DiscountSpec spec;
    spec.kind = DiscountKind::hyperbolic;
    spec.base_Q = scalar(0.0);
    spec.base_R = scalar(1.0);
    spec.base_G = scalar(2.0);
    SharedDynamics d;
    d.A.assign(4, scalar(1.0));
    d.B.assign(4, scalar(1.0));
    d.C.assign(4, scalar(1.0));
    d.D.assign(4, scalar(0.0));
    return from_discounting(spec, d, 4);
}

ProblemData example_5_1() {
    Matrix G = mat2(1, 0, 0, 2);
    return from_shared(dynamics_5_1(), q_5_1(), r_5_1(), {G, G, G});
}

ProblemData example_5_2() {
    Family R = r_5_1();
    R.at(0, 1) = mat2(-1, 0, 0, -0.6);
    R.at(0, 2) = mat2(9.45, 1.32, 1.32, 10.78);
    R.at(1, 2) = mat2(5.24, -1.67, -1.67, 7.27);
    Matrix G = mat2(1, 0, 0, 2);
    return from_shared(dynamics_5_1(), q_5_1(), R, {G, G, G});
}

ProblemData example_5_3() {
    ProblemData p = ProblemData::zeros(2, 2, 2);
    p.A.at(0, 0) = mat2(2.3, 0.41, -0.3, 1.9);
    p.A.at(0, 1) = mat2(4.12, -0.35, 0.31, 3.03);
    p.A.at(1, 1) = mat2(6, 1.63, -1.37, 7);
    p.B.at(0, 0) = mat2(2.45, -0.3, 0.2, 4);
    p.B.at(0, 1) = mat2(2.5, 0.6, -0.2, 3);
    p.B.at(1, 1) = mat2(4, 0.93, 1.07, 3);
    p.C.at(0, 0) = mat2(2.2, 0.32, 0.5, 3);
    p.C.at(0, 1) = mat2(3.65, -0.3, -0.42, 5.6);
    p.C.at(1, 1) = mat2(8, 2.03, -1.23, 10);
    p.D.at(0, 0) = mat2(5.6, 1, 0.73, 7.8);
    p.D.at(0, 1) = mat2(5, 0.73, -0.47, 5.2);
    p.D.at(1, 1) = mat2(5, -0.93, 1.016, 4.65);
    p.Q.at(0, 0) = mat2(2, 0.8, 0.8, 1.6);
    p.Q.at(0, 1) = mat2(4, 0, 0, 0);
    p.Q.at(1, 1) = mat2(2, 0.1, 0.1, 5);
    p.R.at(0, 0) = mat2(-0.5, 0, 0, 1);
    p.R.at(0, 1) = mat2(-5, 0, 0, -4);
    p.R.at(1, 1) = mat2(4, -0.3, -0.3, 7);
    p.G = {mat2(1, 0, 0, 2), mat2(2, -0.3, -0.3, 3)};
    finalize(p);
    return p;
}

}  // namespace tilq
