#pragma once

#include "qvertex/duality.hpp"
#include "qvertex/qhahn.hpp"
#include "qvertex/vertex.hpp"
#include "qvertex/zr.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qv {

// xoshiro256** seeded through splitmix64. Per-replication streams are
// derived from (master seed, replication index) so replications can run
// in any order, or concurrently, and reproduce bitwise.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);
    static Rng stream(std::uint64_t master_seed, std::uint64_t replication);

    std::uint64_t next_u64();
    double next_double();  // uniform in [0, 1)
    // index into `probs` (need not sum exactly to 1; the last bucket absorbs)
    std::size_t pick(const std::vector<double>& probs);

  private:
    std::uint64_t s_[4];
};

// Converts an exact probability column to doubles: entries below -1e-12
// are an error, small negative dust is clamped to 0.
std::vector<double> to_probabilities(const std::vector<Rat>& column);

struct StepCounters {
    long forbidden_transitions = 0;  // triangularity violations observed
    long aux_leaks = 0;              // sweeps whose auxiliary exited nonempty
};

// One parallel q-Hahn update (total asymmetry right if `right`), sampling
// per-site emissions from Phi_q. Closed boundary. Conserves totals.
ZRConfig step_parallel_qhahn(const ZRConfig& cfg, const QHahnParams& p, bool right, Rng& rng);

// One sweep of the sequential vertex dynamics on spins m_x with auxiliary
// spin l: the auxiliary enters carrying `aux_in` and the per-site columns of
// S are sampled. Returns the new configuration and the exiting auxiliary
// state. Direction left means the auxiliary sweeps from site L-1 down to 0.
struct SweepResult {
    std::vector<Composition> config;
    Composition aux_out;
};
SweepResult step_sequential(const std::vector<Composition>& cfg, const TransferSpec& spec, const Composition& aux_in,
                            bool left, Rng& rng, StepCounters* counters = nullptr);

// Continuous-time zero-range run with Phi'_q rates up to time t (Gillespie).
ZRConfig run_continuous(const ZRConfig& cfg, const Rat& mu, const Rat& q, bool right, double t, Rng& rng);

struct DualityEstimate {
    double mean = 0;
    double std_error = 0;
    long replications = 0;
    std::optional<double> exact;
};

enum class SimModel { QHahnParallel, QBosonContinuous };

struct SimSpec {
    SimModel model = SimModel::QHahnParallel;
    int n = 1;
    int sites = 3;
    Rat q, lambda, mu;   // lambda unused for the continuous model
    ZRConfig initial_left;    // eta(0), evolves left
    ZRConfig initial_right;   // xi(0),  evolves right
    int steps = 1;            // discrete horizon
    double time = 1.0;        // continuous horizon
    long replications = 10000;
    std::uint64_t seed = 1;
};

// Forward estimate E[D(eta(T), xi(0))] and reverse estimate E[D(eta(0), xi(T))]
// with the base-q D_0 observable; exact references are attached when the
// sector dimensions stay below `exact_dim_cap`.
std::pair<DualityEstimate, DualityEstimate> estimate_duality(const SimSpec& spec,
                                                             std::size_t exact_dim_cap = 10000);

}  // namespace qv
