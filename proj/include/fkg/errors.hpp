#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkg {

/// Raised when a model configuration fails validation. Carries every
/// offending field, not just the first one found.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct NodeIndex {
    int i = 0;  // time level
    int j = 0;  // age level

    friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

/// Non-finite or overflowing state produced by the explicit scheme.
class BlowUpError : public std::runtime_error {
public:
    explicit BlowUpError(const std::string& what, std::optional<NodeIndex> node = std::nullopt)
        : std::runtime_error(what), node_(node) {}

    std::optional<NodeIndex> node() const noexcept { return node_; }

private:
    std::optional<NodeIndex> node_;
};

}  // namespace fkg
