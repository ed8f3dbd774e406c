#pragma once

#include <stdexcept>

namespace parmimo {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error { public: using Error::Error; };
class RangeError : public Error { public: using Error::Error; };
class IndexError : public Error { public: using Error::Error; };
class LengthError : public Error { public: using Error::Error; };
class UnsupportedConstellation : public Error { public: using Error::Error; };
class RankDeficiencyError : public Error { public: using Error::Error; };
class StateError : public Error { public: using Error::Error; };
class InfeasibleAllocation : public Error { public: using Error::Error; };
class ZeroSignal : public Error { public: using Error::Error; };
class EmptySample : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace parmimo
