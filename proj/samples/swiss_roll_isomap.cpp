// Isomap on a swiss roll: how well do embedded distances follow the
// graph geodesics and the true (unrolled) distances?
//
//   swiss_roll_isomap [n] [k] [seed] [out.svg]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "sfl/app/plot.hpp"
#include "sfl/core/csv.hpp"
#include "sfl/core/timer.hpp"
#include "sfl/manifold/isomap.hpp"
#include "sfl/synth/swiss_roll.hpp"

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i] / a.size();
        mb += b[i] / b.size();
    }
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 500;
    const std::size_t k = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 10;
    const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 42;
    const std::string svg = argc > 4 ? argv[4] : "";

    try {
        const auto roll = sfl::synth::gen_swiss_roll(n, 0.0, seed);
        sfl::Stopwatch sw;
        const auto geo = sfl::manifold::geodesic_distances(roll.points, k);
        const auto emb = sfl::manifold::fit_isomap(roll.points, 2, k);
        const double secs = sw.seconds();

        std::vector<double> truth, geodesic, embedded;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) {
                truth.push_back(std::hypot(roll.intrinsic(i, 0) - roll.intrinsic(j, 0),
                                           roll.intrinsic(i, 1) - roll.intrinsic(j, 1)));
                geodesic.push_back(geo(i, j));
                embedded.push_back(std::hypot(emb.coords(i, 0) - emb.coords(j, 0), emb.coords(i, 1) - emb.coords(j, 1)));
            }
        std::printf("n=%zu k=%zu seed=%llu  (%.2f s)\n", n, k, static_cast<unsigned long long>(seed), secs);
        std::printf("  r(intrinsic, embedded) = %.4f\n", pearson(truth, embedded));
        std::printf("  r(geodesic,  embedded) = %.4f\n", pearson(geodesic, embedded));
        std::printf("  r(intrinsic, geodesic) = %.4f\n", pearson(truth, geodesic));

        if (!svg.empty()) {
            // Colour by thirds of the roll angle.
            std::vector<int> band;
            const double lo = 1.5 * M_PI, span = 3.0 * M_PI;
            for (double t : roll.angle) band.push_back(std::min(2, static_cast<int>(3.0 * (t - lo) / span)));
            sfl::csv::write_file_atomic(svg, sfl::app::plot_embedding(emb.coords, band, "Isomap swiss roll"));
            std::printf("wrote %s\n", svg.c_str());
        }
    } catch (const sfl::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
