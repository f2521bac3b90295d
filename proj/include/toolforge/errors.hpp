#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace toolforge {

// Base class for every failure this library reports. Catch this (or a
// subclass) rather than std::exception when you want library errors only.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Config / input validation.
struct ConfigError : Error {
    using Error::Error;
};

// ---- geometry ----

struct EmptyCloud : Error {
    EmptyCloud() : Error("point cloud is empty") {}
    explicit EmptyCloud(const std::string& what_for)
        : Error("point cloud is empty: " + what_for) {}
};

struct EmptySurface : Error {
    EmptySurface() : Error("solid has no surface area to sample") {}
};

struct NoVisibleSurface : Error {
    NoVisibleSurface() : Error("view direction culls the entire surface") {}
};

// ---- shape editing ----

struct MissingDimension : Error {
    explicit MissingDimension(const std::string& name)
        : Error("missing required dimension: " + name) {}
};

struct NonPositiveDimension : Error {
    explicit NonPositiveDimension(const std::string& name)
        : Error("dimension must be positive: " + name) {}
};

struct UnknownFeature : Error {
    explicit UnknownFeature(const std::string& name)
        : Error("unknown semantic feature: " + name) {}
};

struct ScaleOutOfRange : Error {
    ScaleOutOfRange(const std::string& feature, double value, double lo, double hi)
        : Error("scale " + std::to_string(value) + " for feature " + feature +
                " outside allowed range [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]") {}
};

struct GridTooLarge : Error {
    std::uint64_t actual;
    std::uint64_t max;
    GridTooLarge(std::uint64_t actual_, std::uint64_t max_)
        : Error("combination grid size " + std::to_string(actual_) +
                " exceeds maximum " + std::to_string(max_)),
          actual(actual_), max(max_) {}
};

struct FamilyMismatch : Error {
    FamilyMismatch(const std::string& expected, const std::string& got)
        : Error("tool family mismatch: expected " + expected + ", got " + got) {}
};

// ---- causal discovery ----

struct MissingDefaultPoint : Error {
    explicit MissingDefaultPoint(const std::string& feature)
        : Error("response curve for " + feature +
                " does not cover the feature's default value") {}
};

struct NoWorkingRange : Error {
    explicit NoWorkingRange(const std::string& feature)
        : Error("no grid point for causal feature " + feature +
                " reaches the success threshold") {}
};

struct NoCausalFeatures : Error {
    NoCausalFeatures() : Error("no feature's effect size clears the noise floor") {}
};

// ---- classification / transfer ----

struct MissingRange : Error {
    explicit MissingRange(const std::string& feature)
        : Error("no working range recorded for causal feature " + feature) {}
};

struct MissingPhysicalMeasurement : Error {
    explicit MissingPhysicalMeasurement(const std::string& feature)
        : Error("feature " + feature +
                " cannot be inferred from a point cloud; supply an external "
                "measurement") {}
};

struct NoKeypoints : Error {
    explicit NoKeypoints(const std::string& family)
        : Error("tool family " + family + " defines no keypoints") {}
};

// ---- suggestion backends ----

struct BackendUnavailable : Error {
    explicit BackendUnavailable(const std::string& detail)
        : Error("suggestion backend unavailable: " + detail) {}
};

struct EmptyProposal : Error {
    EmptyProposal() : Error("suggestion backend returned no usable candidates") {}
};

struct Exhausted : Error {
    Exhausted() : Error("no further feature candidates available") {}
};

// ---- pipeline ----

struct MissingStageInput : Error {
    explicit MissingStageInput(const std::string& what)
        : Error("required input from an earlier stage is missing: " + what) {}
};

// Wraps any error thrown while running a pipeline stage, adding stage and
// (when applicable) target context. The original message is preserved.
struct StageError : Error {
    std::string stage;
    StageError(const std::string& stage_, const std::string& msg)
        : Error("stage " + stage_ + ": " + msg), stage(stage_) {}
    StageError(const std::string& stage_, const std::string& target_id,
               const std::string& msg)
        : Error("stage " + stage_ + " (target " + target_id + "): " + msg),
          stage(stage_) {}
};

}  // namespace toolforge
