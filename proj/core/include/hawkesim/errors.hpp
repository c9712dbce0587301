#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Invalid user-facing input: malformed config files, bad parameters,
// unstable kernels.  Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine could not produce a trustworthy result
// (non-convergence, too few usable points, recursion caps).
// Mapped to exit code 4 by the CLI.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// Internal consistency violation in the simulator: a computed intensity
// exceeded the dominating envelope it was thinned against.  Always a bug
// or catastrophic round-off, never a statistical fluctuation.
class EnvelopeBreach : public std::logic_error {
public:
    explicit EnvelopeBreach(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hawkes
