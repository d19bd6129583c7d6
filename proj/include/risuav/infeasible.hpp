#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace risuav {

/// No admissible trajectory exists. Carries the offending route point (and slot for stage 2).
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(int stage, int k, std::optional<int> epsilon, const std::string& reason)
        : std::runtime_error(describe(stage, k, epsilon, reason)), stage_(stage), k_(k), epsilon_(epsilon),
          reason_(reason) {}

    [[nodiscard]] int stage() const { return stage_; }
    [[nodiscard]] int k() const { return k_; }
    [[nodiscard]] std::optional<int> epsilon() const { return epsilon_; }
    [[nodiscard]] const std::string& reason() const { return reason_; }

private:
    static std::string describe(int stage, int k, std::optional<int> epsilon, const std::string& reason) {
        std::string s = "stage " + std::to_string(stage) + " infeasible at k=" + std::to_string(k);
        if (epsilon) s += ", epsilon=" + std::to_string(*epsilon);
        return s + ": " + reason;
    }

    int stage_;
    int k_;
    std::optional<int> epsilon_;
    std::string reason_;
};

}  // namespace risuav
