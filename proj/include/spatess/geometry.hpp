#pragma once
// Regions (disc / unit-width rectangle), point generators (uniform, regular,
// inhibited subsampling) and pairwise-distance helpers.
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatess/correlation.hpp"

namespace spatess {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class Shape { Disc, Rect };
enum class Scheme { Uniform, Regular, Inhibited };

Shape parse_shape(const std::string& name);
const char* shape_name(Shape s);

struct Region {
    Shape shape = Shape::Disc;
    double radius = 1.0;  // disc radius R
    double width = 1.0;   // rect height w, other side fixed at 1

    static Region disc(double R);
    static Region rect(double w);

    double area() const;
    double scale() const;  // R for disc, sqrt(A) for rect
    bool contains(const Point& p, double eps = 1e-9) const;
};

struct PointSet {
    std::vector<Point> pts;
    Scheme scheme = Scheme::Uniform;
    std::uint64_t seed = 0;
    double delta = 0.0;    // inhibition distance (Inhibited only)
    int close_pairs = 0;   // k (Inhibited only)
    double eta = 0.0;      // close-pair radius (Inhibited only)

    int size() const { return static_cast<int>(pts.size()); }
};

PointSet gen_uniform(const Region& region, int n, std::uint64_t seed);
PointSet gen_regular(const Region& region, int n, std::uint64_t seed);

// Subsample n points from the frame with min pairwise distance >= delta among
// the n-k inhibited points; each of the k close-pair points lies within eta
// of a selected point. delta = nullopt means auto (binary-search the largest
// feasible delta, 50 restarts per probe).
PointSet sample_inhibited(const PointSet& frame, int n, std::optional<double> delta,
                          int k, double eta, std::uint64_t seed);

std::vector<double> pairwise_distances(const PointSet& points);  // n*n row-major
double min_pairwise_distance(const PointSet& points);
double mean_nn_distance(const PointSet& points);

// sum_{i != j} f(d_ij, r): both orientations counted, as in the ESS denominator
double pair_sum_f(const PointSet& points, Family family, double r);

PointSet read_points_csv(const std::string& path);
void write_points_csv(const std::string& path, const PointSet& points);

} // namespace spatess
