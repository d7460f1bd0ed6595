#pragma once

#include <string>
#include <vector>

#include "interval.hpp"
#include "log_enclosure.hpp"

namespace weakl1 {

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Fail: return "Fail";
        default: return "Inconclusive";
    }
}

// Fail dominates, then Inconclusive; Pass only if both pass.
inline Verdict combine_verdicts(Verdict a, Verdict b) {
    if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
    if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
    return Verdict::Pass;
}

struct ProbeBudget {
    Rational tol{1, 1000000};     // relative enclosure width per norm
    bool exhaustive = true;       // otherwise sample sign vectors
    long sample_count = 0;        // used when !exhaustive
    unsigned long long seed = 0;  // used when !exhaustive
    long eval_budget = 400000000; // per-norm evaluation allowance

    void validate() const {
        if (!(tol > Rational(0))) throw invalid_parameter("budget: tol must be positive");
        if (!exhaustive && sample_count < 1)
            throw invalid_parameter("budget: sample count must be >= 1");
        if (eval_budget < 1) throw invalid_parameter("budget: eval budget must be >= 1");
    }
};

struct ProbeRow {
    std::string label;
    RatInterval enc{Rational(0), Rational(0)}; // certified; point interval when exact
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
};

struct ProbeReport {
    std::string kind;
    long n = 0, N = 0, M = 0;
    Rational tol{0};
    std::string sign_mode; // "all", "sample:K seed:S", or "" when not sign-indexed
    bool has_window = false;
    RatInterval window_lo{Rational(0), Rational(0)}; // target (1/2) n ln n
    RatInterval window_hi{Rational(0), Rational(0)}; // target n ln n
    std::vector<ProbeRow> rows;
    bool has_average = false;
    RatInterval average{Rational(0), Rational(0)};
    bool has_ratio = false;
    RatInterval ratio{Rational(0), Rational(0)};
    RatInterval ratio_bound{Rational(0), Rational(0)};
    Verdict ratio_verdict = Verdict::Inconclusive;
    std::vector<std::string> notes;
    Verdict overall = Verdict::Inconclusive;
};

// Certified targets (1/2) n ln n and n ln n for the lemma window.
struct LemmaWindow {
    RatInterval half; // (1/2) n ln n
    RatInterval full; // n ln n
};

inline LemmaWindow lemma_window(long n, const Rational& eps = Rational(1, 1000000000)) {
    RatInterval ln = ln_enclosure(Rational(n), eps);
    return LemmaWindow{Rational(n, 2) * ln, Rational(n) * ln};
}

} // namespace weakl1
