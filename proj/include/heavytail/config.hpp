#pragma once

#include <cstdint>
#include <string>

namespace heavytail {

enum class EnsembleKind {
    wigner_levy,
    goe,
    free_sum_diag,
    free_sum_wl,
    deformed_wigner,
    wishart_student,
};

std::string to_string(EnsembleKind k);
EnsembleKind ensemble_kind_from_string(const std::string& s);

// Full description of a matrix ensemble; with a seed it regenerates any run.
struct EnsembleConfig {
    EnsembleKind kind = EnsembleKind::goe;
    int N = 0;
    int T = 0;       // Wishart columns
    int K = 0;       // free-sum terms
    double alpha = 2.0;
    double beta = 0.0;
    double range = 1.0;
    double sigma = 1.0;      // GOE scale
    double a = 1.0;          // mixture scale constant
    double ratio = 0.0;      // N/T
    double scaling_exponent = 0.5;
    int trials = 1;

    void validate() const;
};

}  // namespace heavytail
