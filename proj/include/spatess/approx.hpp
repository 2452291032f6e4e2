#pragma once
// Closed-form approximations s~(q) to the within-cluster mean correlation,
// the ratio q per sampling scheme, and the shipped coefficient presets.
#include <string>
#include <vector>

#include "spatess/geometry.hpp"

namespace spatess {

enum class Sampling { Simple, Spatial };
enum class Form { Algebraic, Tanh, Logistic, Cubic };

Sampling parse_sampling(const std::string& name);
const char* sampling_name(Sampling s);
Form parse_form(const std::string& name);
const char* form_name(Form f);

struct ApproxSpec {
    Family family = Family::Exponential;
    Sampling sampling = Sampling::Simple;
    Shape shape = Shape::Disc;
    Form form = Form::Algebraic;
    std::vector<double> coeffs;
};

struct Preset {
    ApproxSpec spec;
    double mse = 0.0;
    const char* origin = "printed";  // "printed" (encoded as published) | "refit"
    std::uint64_t seed = 0;          // refit provenance
    int replicates = 0;
};

// q1 = r/scale (Simple); q2 = r/(sqrt(scale) + scale/n) (Spatial, needs n).
double ratio_q(Sampling sampling, double r, double scale, int n = -1);

// Raw form value (no clamping).
double eval_form(Form form, const std::vector<double>& coeffs, double q);

// Form value clamped to [0, 1].
double s_tilde(const ApproxSpec& spec, double q);

const std::vector<Preset>& shipped_presets();
const Preset& find_preset(Family family, Sampling sampling, Shape shape);

} // namespace spatess
