// Builds the erosion x grayscale bifiltration of a synthetic image, slices it
// and prints a perslay feature vector together with a few diagrams.
#include <cmath>
#include <cstdio>

#include "cumper/filtrations.hpp"
#include "cumper/multipers.hpp"
#include "cumper/vectorize.hpp"

int main() {
    constexpr int side = 32;
    std::vector<double> pixels(side * side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const double dx = r - side / 2.0, dy = c - side / 2.0;
            // Two bright rings on a dark background.
            const double d = std::sqrt(dx * dx + dy * dy);
            pixels[r * side + c] = 255.0 * (std::abs(d - 6.0) < 1.5 || std::abs(d - 12.0) < 1.5 ? 0.1 : 0.9);
        }
    cumper::ValueGrid gray(side, side, pixels);

    auto thresholds = cumper::linear_thresholds(gray.min_value(), gray.max_value(), 16);
    auto bif = cumper::erosion_bifiltration(gray, thresholds, {0, 1, 2, 3}).grid;
    auto sliced = cumper::slice_rows(bif, cumper::SliceAxis::rows, cumper::HomologyDims::both, 1);

    for (int s = 0; s < sliced.size(); ++s)
        std::printf("erosion row %d: %zu H0 pairs, %zu H1 pairs\n", s, sliced.slices[s].dim0.size(),
                    sliced.slices[s].dim1.size());

    cumper::VectorizationParams params;
    params.sample_times = cumper::default_sample_times(20, 16.0);
    auto features = cumper::psi_mp(sliced, params);
    std::printf("feature length %zu:", features.aggregate.size());
    for (double x : features.aggregate) std::printf(" %.3g", x);
    std::printf("\n");
}
