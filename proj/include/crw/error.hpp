#pragma once

#include <stdexcept>
#include <string>

namespace crw {

enum class Errc {
    BadShape,
    NotStochastic,
    NonzeroDiagonal,
    Reducible,
    NoArrivals,
    BadNormalization,
    DivisionByZero,
    ZeroCoordinate,
    DegenerateAffine,
    SingularBoundaryPolynomial,
    NoExitAtTwo,
    ZeroToNegativePower,
    EqualRates,
    UnsupportedPattern,
    NotSimpleExtension,
    NotTandem,
    EqualDrifts,
    AssumptionViolated,
    NotBalayageDetermined,
    SingularBasis,
    UnsupportedTail,
    TooLarge,
    NonConvergent,
    NotTandem2D,
    DegenerateTilt,
    NoRoot,
    BadArgument,
    Config,
};

const char* errc_name(Errc c);

/// Library exception; every failure carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace crw
