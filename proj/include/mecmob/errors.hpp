#pragma once

#include <stdexcept>
#include <string>

namespace mecmob {

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class InfeasibleScenario : public std::runtime_error {
public:
    InfeasibleScenario(int period, const std::string& what)
        : std::runtime_error(what), period_(period) {}
    int period() const { return period_; }

private:
    int period_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

class FrameInfeasible : public std::runtime_error {
public:
    FrameInfeasible(int frame, const std::string& what) : std::runtime_error(what), frame_(frame) {}
    int frame() const { return frame_; }

private:
    int frame_;
};

/// Two or more arms share the optimal objective, so a gap of zero was supplied.
class DegenerateGap : public std::domain_error {
public:
    explicit DegenerateGap(const std::string& what) : std::domain_error(what) {}
};

/// Failure inside one replication of an experiment, tagged with its index.
class ReplicationError : public std::runtime_error {
public:
    ReplicationError(int replication, const std::string& what)
        : std::runtime_error("replication " + std::to_string(replication) + ": " + what),
          replication_(replication) {}
    int replication() const { return replication_; }

private:
    int replication_;
};

}  // namespace mecmob
