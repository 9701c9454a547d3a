// Compares the serial and OpenMP execution paths on a fourth-order identity
// sweep and on a flux sweep. The parallel path must reproduce the serial
// results bit for bit (per-point storage, serial reduction), so the max
// deviation printed below is expected to be exactly 0.

#include "aecurv/flux.hpp"
#include "aecurv/fourth_order.hpp"
#include "aecurv/metric.hpp"
#include "aecurv/parallel.hpp"
#include "aecurv/quadrature.hpp"
#include "aecurv/sampling.hpp"
#include "aecurv/tensor.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace aecurv;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::vector<double> frame_sweep(const MetricSpec& spec,
                                const std::vector<std::vector<double>>& pts, Exec mode) {
    std::vector<double> q(pts.size(), 0.0);
    par_for(pts.size(), [&](size_t i) {
        FourthOrderFrame fo = fourth_order_frame(curvature_frame(metric_frame(spec, pts[i], 4)));
        q[i] = fo.q.value();
    }, mode);
    return q;
}

} // namespace

int main(int argc, char** argv) {
    int points = argc > 1 ? std::atoi(argv[1]) : 256;
    std::printf("threads available: %d\n", max_threads());

    MetricSpec spec = catalog_metric("conformal", {{"n", "5"}});
    auto pts = shell_points(5, 1.0, 8.0, points, 42);

    double t0 = now_s();
    std::vector<double> serial = frame_sweep(spec, pts, Exec::serial);
    double t1 = now_s();
    std::vector<double> parallel = frame_sweep(spec, pts, Exec::parallel);
    double t2 = now_s();

    double worst = 0.0;
    for (size_t i = 0; i < serial.size(); ++i)
        worst = std::max(worst, std::abs(serial[i] - parallel[i]));
    std::printf("fourth-order sweep, %d points (n=5, order 4):\n", points);
    std::printf("  serial   %8.3f s\n", t1 - t0);
    std::printf("  parallel %8.3f s   speedup %.2fx\n", t2 - t1, (t1 - t0) / (t2 - t1));
    std::printf("  max |serial - parallel| = %.3e\n", worst);

    SphereQuadrature quad = build_quadrature(5, 4);
    std::vector<double> radii = dyadic_radii(1.0, 3, 6);
    t0 = now_s();
    FluxSeries fs = gj_flux(spec, quad, radii, Exec::serial);
    t1 = now_s();
    FluxSeries fp = gj_flux(spec, quad, radii, Exec::parallel);
    t2 = now_s();
    worst = 0.0;
    for (size_t i = 0; i < fs.values.size(); ++i)
        worst = std::max(worst, std::abs(fs.values[i] - fp.values[i]));
    std::printf("G_J flux sweep, %zu nodes x %zu radii:\n", quad.nodes.size(), radii.size());
    std::printf("  serial   %8.3f s\n", t1 - t0);
    std::printf("  parallel %8.3f s   speedup %.2fx\n", t2 - t1, (t1 - t0) / (t2 - t1));
    std::printf("  max |serial - parallel| = %.3e\n", worst);
    return worst == 0.0 ? 0 : 1;
}
