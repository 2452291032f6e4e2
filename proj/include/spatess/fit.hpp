#pragma once
// Simulate-and-fit pipeline: (q, s) draws per cell, bounded Levenberg least
// squares over the four candidate forms, and full-table regeneration.
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spatess/approx.hpp"

namespace spatess {

struct SimDraw {
    double q = 0.0;
    double s = 0.0;
    int n = 0;
    double r = 0.0;
};

// One draw of the pipeline: r ~ U(0.001, 2), n ~ U{10..200}, rect width
// w ~ U(0.1, 1); unit disc. Layout per scheme (uniform / regular).
std::vector<SimDraw> simulate_cell(Family family, Sampling sampling, Shape shape,
                                   int replicates, std::uint64_t seed);

// Single (q, s) evaluation on a caller-supplied region.
std::pair<double, double> simulate_s(Family family, const Region& region, int n,
                                     double r, Sampling scheme, std::uint64_t seed);

struct FitOutcome {
    Form form = Form::Algebraic;
    std::vector<double> coeffs;
    double mse = 0.0;
    bool converged = false;
};

// Least-squares fit per candidate form (5 documented multi-starts each),
// sorted ascending by MSE; non-converged forms sort last.
std::vector<FitOutcome> fit_approximation(const std::vector<std::pair<double, double>>& data,
                                          const std::vector<Form>& forms);

struct CellFit {
    Family family = Family::Exponential;
    Sampling sampling = Sampling::Simple;
    Shape shape = Shape::Disc;
    std::vector<FitOutcome> forms;  // ascending MSE
    int replicates = 0;
    std::uint64_t seed = 0;

    const FitOutcome& best() const { return forms.front(); }
};

// Full 3 families x {simple, spatial} x {disc, rect} table.
std::vector<CellFit> regenerate_table1(std::uint64_t seed, int replicates);

std::string cellfits_to_json(const std::vector<CellFit>& cells,
                             const std::string& config_hash = "");
std::string draws_to_csv(const std::vector<SimDraw>& draws);

} // namespace spatess
