#pragma once

#include <cstdint>
#include <string>

#include "memtrack/policy.hpp"
#include "memtrack/version.hpp"

namespace memtrack {

/// Provenance header of a persisted run: stable digest of the canonicalized
/// config, the scenario seed, the policy, tool version, and creation time.
/// created_at is the one field excluded from byte-level determinism checks.
struct RunManifest {
    int schema = kRunSchemaVersion;
    std::string digest;
    std::uint64_t seed = 0;
    PolicyKind policy = PolicyKind::Coupled;
    std::string version = kToolVersion;
    std::string created_at;

    bool operator==(const RunManifest& other) const {
        return schema == other.schema && digest == other.digest && seed == other.seed &&
               policy == other.policy && version == other.version &&
               created_at == other.created_at;
    }
};

}  // namespace memtrack
