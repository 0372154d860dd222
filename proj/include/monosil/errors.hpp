#ifndef MONOSIL_ERRORS_HPP_
#define MONOSIL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace monosil
{

class Error : public std::runtime_error
{
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

class DegenerateConfiguration : public Error
{
public:
    explicit DegenerateConfiguration(const std::string &msg) : Error(msg) {}
};

class PointAtInfinity : public Error
{
public:
    explicit PointAtInfinity(const std::string &msg) : Error(msg) {}
};

class DegenerateGrid : public Error
{
public:
    explicit DegenerateGrid(const std::string &msg) : Error(msg) {}
};

class SelfIntersecting : public Error
{
public:
    explicit SelfIntersecting(const std::string &msg) : Error(msg) {}
};

class OffsetDegenerate : public Error
{
public:
    explicit OffsetDegenerate(const std::string &msg) : Error(msg) {}
};

class NonBinaryInput : public Error
{
public:
    explicit NonBinaryInput(const std::string &msg) : Error(msg) {}
};

class NoLanePixels : public Error
{
public:
    explicit NoLanePixels(const std::string &side) : Error("no lane pixels on " + side + " side"), side_(side) {}
    const std::string &side() const { return side_; }

private:
    std::string side_;
};

class InsufficientSupport : public Error
{
public:
    explicit InsufficientSupport(const std::string &msg) : Error(msg) {}
};

class IllConditioned : public Error
{
public:
    explicit IllConditioned(const std::string &msg) : Error(msg) {}
};

class BothLanesLost : public Error
{
public:
    explicit BothLanesLost(const std::string &msg) : Error(msg) {}
};

class NonFiniteState : public Error
{
public:
    explicit NonFiniteState(const std::string &msg) : Error(msg) {}
};

class HorizonMismatch : public Error
{
public:
    explicit HorizonMismatch(const std::string &msg) : Error(msg) {}
};

class SingularHessian : public Error
{
public:
    explicit SingularHessian(const std::string &msg) : Error(msg) {}
};

class InvalidLane : public Error
{
public:
    explicit InvalidLane(const std::string &msg) : Error(msg) {}
};

class ConfigError : public Error
{
public:
    explicit ConfigError(const std::string &msg) : Error(msg) {}
};

} // namespace monosil

#endif
