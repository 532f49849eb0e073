#pragma once

#include "mefgen/image.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mefgen {

enum class Polarity { lower_better, higher_better };

inline const char* to_string(Polarity p) {
    return p == Polarity::lower_better ? "lower-better" : "higher-better";
}

// A no-reference quality score. Finite by contract.
struct IqaScore {
    std::string metric;
    double value = 0.0;
    Polarity polarity = Polarity::lower_better;
};

// Returns true when `a` is strictly better than `b` under the polarity.
inline bool score_better(Polarity polarity, double a, double b) {
    return polarity == Polarity::lower_better ? a < b : a > b;
}

// A configured metric: name, polarity, and an evaluator that throws on
// failure. Evaluators are pure functions of pixel data and loaded model
// parameters and can be shared across workers.
struct Scorer {
    std::string name;
    Polarity polarity = Polarity::lower_better;
    std::function<double(const SrgbImage&)> eval;

    IqaScore score(const SrgbImage& img) const { return {name, eval(img), polarity}; }
};

using ScorerList = std::vector<Scorer>;

}  // namespace mefgen
