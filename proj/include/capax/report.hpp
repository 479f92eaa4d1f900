#pragma once
// Shared outcome types for solvers, principle checks, and verification suites.

#include <string>
#include <vector>

namespace capax {

enum class SolveStatus { converged, max_iter, infeasible, unbounded, skipped };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::skipped: return "skipped";
    }
    return "unknown";
}

// Itemized result of a verification suite: every assertion is counted and
// failures carry a human-readable label.
struct CheckReport {
    bool pass = true;
    int checks_run = 0;
    int checks_failed = 0;
    int skipped = 0;
    double worst_violation = 0.0;
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void record(bool ok, double violation, const std::string& label) {
        ++checks_run;
        if (violation > worst_violation) worst_violation = violation;
        if (!ok) {
            pass = false;
            ++checks_failed;
            failures.push_back(label);
        }
    }

    void skip(const std::string& label) {
        ++skipped;
        notes.push_back("skipped: " + label);
    }

    void absorb(const CheckReport& other, const std::string& prefix) {
        pass = pass && other.pass;
        checks_run += other.checks_run;
        checks_failed += other.checks_failed;
        skipped += other.skipped;
        worst_violation = worst_violation > other.worst_violation ? worst_violation
                                                                  : other.worst_violation;
        for (const auto& f : other.failures) failures.push_back(prefix + f);
        for (const auto& m : other.notes) notes.push_back(prefix + m);
    }
};

// Outcome of an empirical maximum-principle check over sampled measures.
struct PrincipleReport {
    bool pass = true;
    int trials = 0;    // premise-satisfying trials actually asserted
    int vacuous = 0;   // sampled trials whose premise was not met
    double worst_violation = 0.0;
};

}  // namespace capax
