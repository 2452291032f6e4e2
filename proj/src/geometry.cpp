#include "spatess/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "spatess/rng.hpp"

namespace spatess {

Shape parse_shape(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "disc") return Shape::Disc;
    if (s == "rect") return Shape::Rect;
    throw ConfigError("unknown shape '" + name + "' (expected disc|rect)");
}

const char* shape_name(Shape s) { return s == Shape::Disc ? "disc" : "rect"; }

Region Region::disc(double R) {
    if (!(R > 0.0)) throw ConfigError("disc radius must be > 0");
    Region r;
    r.shape = Shape::Disc;
    r.radius = R;
    return r;
}

Region Region::rect(double w) {
    if (!(w > 0.0) || w > 1.0) throw ConfigError("rect height w must lie in (0,1]");
    Region r;
    r.shape = Shape::Rect;
    r.width = w;
    return r;
}

double Region::area() const {
    return shape == Shape::Disc ? std::numbers::pi * radius * radius : width;
}

double Region::scale() const {
    return shape == Shape::Disc ? radius : std::sqrt(width);
}

bool Region::contains(const Point& p, double eps) const {
    if (shape == Shape::Disc)
        return p.x * p.x + p.y * p.y <= radius * radius * (1.0 + eps) + eps;
    return p.x >= -eps && p.x <= 1.0 + eps && p.y >= -eps && p.y <= width + eps;
}

// ---- generators ----

PointSet gen_uniform(const Region& region, int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("gen_uniform requires n >= 1");
    Rng rng(mix_seed(seed, 0));
    PointSet out;
    out.scheme = Scheme::Uniform;
    out.seed = seed;
    out.pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (region.shape == Shape::Disc) {
            double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
            double rad = region.radius * std::sqrt(rng.uniform());
            out.pts.push_back({rad * std::cos(theta), rad * std::sin(theta)});
        } else {
            double x = rng.uniform();
            double y = region.width * rng.uniform();
            out.pts.push_back({x, y});
        }
    }
    return out;
}

namespace {

// Sunflower layout: radius sqrt((i+0.5)/n), golden-angle increments, plus a
// seeded global rotation.
std::vector<Point> sunflower_disc(double R, int n, double rot) {
    const double golden2 = std::numbers::phi * std::numbers::phi;
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double rad = R * std::sqrt((i + 0.5) / n);
        double ang = 2.0 * std::numbers::pi * i / golden2 + rot;
        pts.push_back({rad * std::cos(ang), rad * std::sin(ang)});
    }
    return pts;
}

double min_dist_of(const std::vector<Point>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
    return best;
}

// Staggered lattice on [0,1] x [0,w]: common column pitch, odd rows offset by
// half a pitch, surplus positions dropped at evenly spaced columns of the
// last row. Row count chosen to maximize the realized min pairwise distance.
std::vector<Point> grid_rect(double w, int n) {
    if (n == 1) return {{0.5, 0.5 * w}};
    std::vector<Point> best;
    double best_md = -1.0;
    int nr_hi = std::min(n, static_cast<int>(std::ceil(2.0 * std::sqrt(n * w))) + 2);
    for (int nr = 1; nr <= nr_hi; ++nr) {
        int nc = (n + nr - 1) / nr;
        double dx = 1.0 / nc;
        double dy = w / nr;
        std::vector<Point> pts;
        pts.reserve(static_cast<std::size_t>(n));
        int left = n;
        for (int row = 0; row < nr && left > 0; ++row) {
            int take = std::min(nc, left);
            double y = dy * (row + 0.5);
            double off = (row % 2 == 1) ? 0.5 : 0.0;
            if (take == nc) {
                for (int c = 0; c < nc; ++c)
                    pts.push_back({(c + 0.5 + off) * dx, y});
            } else {
                // spread the kept columns evenly across the row
                for (int i = 0; i < take; ++i) {
                    int c = static_cast<int>(std::floor((i + 0.5) * nc / static_cast<double>(take)));
                    pts.push_back({(c + 0.5 + off) * dx, y});
                }
            }
            left -= take;
        }
        for (auto& p : pts) p.x = std::min(p.x, 1.0);
        double md = min_dist_of(pts);
        if (md > best_md + 1e-15) {
            best_md = md;
            best = std::move(pts);
        }
    }
    return best;
}

} // namespace

PointSet gen_regular(const Region& region, int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("gen_regular requires n >= 1");
    PointSet out;
    out.scheme = Scheme::Regular;
    out.seed = seed;
    if (region.shape == Shape::Disc) {
        Rng rng(mix_seed(seed, 1));
        double rot = rng.uniform(0.0, 2.0 * std::numbers::pi);
        out.pts = sunflower_disc(region.radius, n, rot);
    } else {
        out.pts = grid_rect(region.width, n);
    }
    return out;
}

// ---- inhibited subsampling ----

namespace {

// Greedy accept pass over a shuffled frame order; returns selected indices
// (sorted) or empty on failure.
std::vector<int> try_inhibited(const std::vector<Point>& frame, int n_core, double delta,
                               std::uint64_t attempt_seed) {
    Rng rng(attempt_seed);
    std::vector<int> order(frame.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    std::vector<int> sel;
    sel.reserve(static_cast<std::size_t>(n_core));
    for (int idx : order) {
        bool ok = true;
        for (int jdx : sel) {
            if (std::hypot(frame[idx].x - frame[jdx].x, frame[idx].y - frame[jdx].y) < delta) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        sel.push_back(idx);
        if (static_cast<int>(sel.size()) == n_core) {
            std::sort(sel.begin(), sel.end());
            return sel;
        }
    }
    return {};
}

std::vector<int> inhibited_with_restarts(const std::vector<Point>& frame, int n_core,
                                         double delta, std::uint64_t seed, int restarts) {
    for (int a = 0; a < restarts; ++a) {
        auto sel = try_inhibited(frame, n_core, delta, mix_seed(seed, 100 + a));
        if (!sel.empty()) return sel;
    }
    return {};
}

} // namespace

PointSet sample_inhibited(const PointSet& frame, int n, std::optional<double> delta,
                          int k, double eta, std::uint64_t seed) {
    const int N = frame.size();
    if (n < 1 || n > N) throw ConfigError("sample_inhibited requires 1 <= n <= frame size");
    if (k < 0 || k > n) throw ConfigError("sample_inhibited requires 0 <= k <= n");
    if (k > 0 && !(eta > 0.0)) throw ConfigError("close pairs require eta > 0");
    const int n_core = n - k;
    const int restarts = 50;

    std::vector<int> core;
    double used_delta = 0.0;
    if (delta.has_value()) {
        if (*delta < 0.0) throw ConfigError("delta must be >= 0");
        used_delta = *delta;
        core = inhibited_with_restarts(frame.pts, n_core, used_delta, seed, restarts);
        if (core.empty())
            throw InfeasibleError("no inhibited subset of size " + std::to_string(n_core) +
                                  " found at delta=" + std::to_string(used_delta));
    } else {
        // binary-search the largest feasible delta
        double hi = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                hi = std::max(hi, std::hypot(frame.pts[i].x - frame.pts[j].x,
                                             frame.pts[i].y - frame.pts[j].y));
        hi = std::max(hi, 1e-12) * 1.0000001;
        double lo = 0.0;
        core = inhibited_with_restarts(frame.pts, n_core, 0.0, seed, restarts);
        for (int it = 0; it < 25; ++it) {
            double mid = 0.5 * (lo + hi);
            auto sel = inhibited_with_restarts(frame.pts, n_core, mid, mix_seed(seed, 7000 + it), restarts);
            if (!sel.empty()) {
                lo = mid;
                core = std::move(sel);
            } else {
                hi = mid;
            }
        }
        used_delta = lo;
    }

    std::vector<bool> taken(static_cast<std::size_t>(N), false);
    for (int idx : core) taken[static_cast<std::size_t>(idx)] = true;

    // close pairs: each drawn within eta of a randomly chosen selected point
    std::vector<int> extras;
    if (k > 0) {
        Rng rng(mix_seed(seed, 9999));
        for (int j = 0; j < k; ++j) {
            bool placed = false;
            for (int attempt = 0; attempt < restarts && !placed; ++attempt) {
                int anchor = core[static_cast<std::size_t>(rng.uniform_int(0, core.size() - 1))];
                std::vector<int> near;
                for (int idx = 0; idx < N; ++idx) {
                    if (taken[static_cast<std::size_t>(idx)]) continue;
                    if (std::hypot(frame.pts[idx].x - frame.pts[anchor].x,
                                   frame.pts[idx].y - frame.pts[anchor].y) <= eta) {
                        near.push_back(idx);
                    }
                }
                if (near.empty()) continue;
                int pick = near[static_cast<std::size_t>(rng.uniform_int(0, near.size() - 1))];
                taken[static_cast<std::size_t>(pick)] = true;
                extras.push_back(pick);
                placed = true;
            }
            if (!placed)
                throw InfeasibleError("no frame point within eta of the selected set for close pair " +
                                      std::to_string(j + 1));
        }
    }

    std::vector<int> all = core;
    all.insert(all.end(), extras.begin(), extras.end());
    std::sort(all.begin(), all.end());

    PointSet out;
    out.scheme = Scheme::Inhibited;
    out.seed = seed;
    out.delta = used_delta;
    out.close_pairs = k;
    out.eta = eta;
    out.pts.reserve(all.size());
    for (int idx : all) out.pts.push_back(frame.pts[static_cast<std::size_t>(idx)]);
    return out;
}

// ---- distances ----

std::vector<double> pairwise_distances(const PointSet& points) {
    const int n = points.size();
    if (n < 1) throw ComputeError("pairwise_distances requires at least one point");
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double v = std::hypot(points.pts[i].x - points.pts[j].x,
                                  points.pts[i].y - points.pts[j].y);
            d[static_cast<std::size_t>(i) * n + j] = v;
            d[static_cast<std::size_t>(j) * n + i] = v;
        }
    }
    return d;
}

double min_pairwise_distance(const PointSet& points) {
    if (points.size() < 2) return std::numeric_limits<double>::infinity();
    return min_dist_of(points.pts);
}

double mean_nn_distance(const PointSet& points) {
    const int n = points.size();
    if (n < 2) throw ComputeError("mean_nn_distance requires at least two points");
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            best = std::min(best, std::hypot(points.pts[i].x - points.pts[j].x,
                                             points.pts[i].y - points.pts[j].y));
        }
        total += best;
    }
    return total / n;
}

double pair_sum_f(const PointSet& points, Family family, double r) {
    const int n = points.size();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = std::hypot(points.pts[i].x - points.pts[j].x,
                                  points.pts[i].y - points.pts[j].y);
            sum += correlation(family, d, r);
        }
    }
    return 2.0 * sum;
}

// ---- CSV I/O ----

PointSet read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open points file '" + path + "'");
    PointSet out;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (first) {
            first = false;
            if (line.rfind("x,y", 0) == 0) continue;  // header
        }
        std::istringstream ss(line);
        std::string xs, ys;
        if (!std::getline(ss, xs, ',') || !std::getline(ss, ys)) {
            throw ConfigError("malformed points row at " + path + ":" + std::to_string(lineno));
        }
        try {
            out.pts.push_back({std::stod(xs), std::stod(ys)});
        } catch (const std::exception&) {
            throw ConfigError("non-numeric coordinate at " + path + ":" + std::to_string(lineno));
        }
    }
    if (out.pts.empty()) throw ConfigError("points file '" + path + "' has no rows");
    return out;
}

void write_points_csv(const std::string& path, const PointSet& points) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ComputeError("cannot write '" + tmp + "'");
        out << "x,y\n";
        char buf[64];
        for (const auto& p : points.pts) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
            out << buf;
        }
    }
    std::rename(tmp.c_str(), path.c_str());
}

} // namespace spatess
